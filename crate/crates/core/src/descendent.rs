//! The descendent algebra of the plane in normalized c_k(j) coordinates.
//!
//! A class of type (d, chi) fixes the twist r = 3/2 - chi/d. The raw symbols
//! ch_i(H^j) are realized as polynomials in the c-variables; c-coordinates are
//! the single internal basis everywhere else in the crate.

use crate::poly::Polynomial;
use crate::rat::{factorial, frac, rat, Rat};
use crate::vars::{ckj_label, parse_ckj, VariableTable, Var};
use crate::{Error, Result};
use num::traits::Zero;
use num::Integer;
use std::sync::Arc;

/// A topological type alpha = (d, chi) of a one-dimensional sheaf class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ToppType {
    pub d: u32,
    pub chi: i64,
}

impl ToppType {
    pub fn new(d: u32, chi: i64) -> Self {
        assert!(d >= 1);
        ToppType { d, chi }
    }

    /// Arithmetic genus of degree-d plane curves.
    pub fn g(&self) -> u32 {
        let d = self.d as i64;
        ((d - 1) * (d - 2) / 2) as u32
    }

    /// Dimension of the linear system |dH|.
    pub fn b(&self) -> u32 {
        self.d * (self.d + 3) / 2
    }

    pub fn dim_stack(&self) -> u32 {
        self.d * self.d
    }

    pub fn dim_space(&self) -> u32 {
        self.d * self.d + 1
    }

    pub fn slope(&self) -> Rat {
        Rat::new(self.chi.into(), (self.d as i64).into())
    }

    /// Multiplicity m = gcd(d, chi).
    pub fn multiplicity(&self) -> u32 {
        (self.d as i64).gcd(&self.chi) as u32
    }

    pub fn coprime(&self) -> bool {
        self.multiplicity() == 1
    }

    /// Twist coefficient r with rho = r*H, chosen so that ch(alpha * e^rho)
    /// has vanishing point-class component.
    pub fn r(&self) -> Rat {
        frac(3, 2) - self.slope()
    }

    /// Pairing of ch(alpha) with H^j: the j=0 value is chi - 3d/2 by
    /// Hirzebruch-Riemann-Roch on the plane.
    pub fn chern_pairing(&self, j: u32) -> Rat {
        match j {
            2 => Rat::zero(),
            1 => rat(self.d as i64),
            0 => rat(self.chi) - frac(3, 2) * rat(self.d as i64),
            _ => panic!("j must be 0, 1 or 2"),
        }
    }

    /// Pairing of ch(alpha * e^rho) with H^j: the twist kills the j=0 value.
    pub fn chern_pairing_twisted(&self, j: u32) -> Rat {
        match j {
            2 => Rat::zero(),
            1 => rat(self.d as i64),
            0 => Rat::zero(),
            _ => panic!("j must be 0, 1 or 2"),
        }
    }
}

/// Working context: a topological type together with a truncated c-variable
/// table. `space` drops c_1(1) (the normalized realization sends it to zero).
#[derive(Debug, Clone)]
pub struct DescCtx {
    pub alpha: ToppType,
    pub dmax: u32,
    pub space: bool,
    pub table: Arc<VariableTable>,
}

impl DescCtx {
    pub fn new(alpha: ToppType, dmax: u32, space: bool) -> Self {
        DescCtx {
            alpha,
            dmax,
            space,
            table: VariableTable::descendent_table(dmax, !space),
        }
    }

    /// The class c_k(j) as a polynomial: a variable when in range, a boundary
    /// constant when the index drops off the table (c_1(0) = 0, c_0(1) = d,
    /// c_{-1}(2) = 0, everything below vanishes).
    pub fn ckj(&self, k: i64, j: u32) -> Result<Polynomial> {
        debug_assert!(j <= 2);
        let zero = || Ok(Polynomial::zero(&self.table));
        match (j, k) {
            (0, k) if k <= 1 => zero(),
            (1, k) if k < 0 => zero(),
            (1, 0) => Ok(Polynomial::constant(&self.table, rat(self.alpha.d as i64))),
            (1, 1) if self.space => zero(),
            (2, k) if k < 0 => zero(),
            (j, k) => {
                let k = k as u32;
                let deg = k + j - 1;
                if deg > self.dmax {
                    return Err(Error::DegreeOverflow(deg, self.dmax));
                }
                Ok(Polynomial::var(
                    &self.table,
                    self.table
                        .index_of(&ckj_label(k, j))
                        .expect("c-variable missing from table"),
                ))
            }
        }
    }

    /// Realize the raw symbol ch_i(H^j): the triangular dictionary
    /// ch_i(H^j) = sum_t ((-r)^t / t!) c_{i-j-t+1}(j+t).
    pub fn realize(&self, i: u32, j: u32) -> Result<Polynomial> {
        assert!(j <= 2);
        let r = self.alpha.r();
        let mut out = Polynomial::zero(&self.table);
        for t in 0..=(2 - j) {
            let coeff = crate::rat::pow(&(-r.clone()), t) / factorial(t);
            let c = self.ckj(i as i64 - j as i64 - t as i64 + 1, j + t)?;
            out.add_assign(&c.scale(&coeff));
        }
        Ok(out)
    }

    /// The derivation R_{-1}: c_k(j) -> c_{k-1}(j) with boundary constants.
    pub fn r_minus1(&self, p: &Polynomial) -> Polynomial {
        p.apply_derivation(|i| {
            let v = self.table.var(i);
            let (k, j) = parse_ckj(&v.label).expect("non-c variable in descendent table");
            self.ckj(k as i64 - 1, j).expect("R_{-1} lowers degree")
        })
    }

    /// eta in coordinate form: the substitution c_1(1) -> 0 (identity on
    /// space tables). The remaining variables are reinterpreted as their
    /// weight-zero representatives; see `eta_operator_form`.
    pub fn eta(&self, p: &Polynomial) -> Polynomial {
        match self.table.index_of(&ckj_label(1, 1)) {
            None => p.clone(),
            Some(i) => p.substitute(i, &Polynomial::zero(&self.table)),
        }
    }

    /// eta in its operator form sum_j ((-1)^j/j!) (c_1(1)/d)^j R_{-1}^j.
    /// Its image is the weight-zero subalgebra; on any p it agrees with the
    /// substitution form evaluated on the weight-zero representatives
    /// eta_op(c_k(j)).
    pub fn eta_operator_form(&self, p: &Polynomial) -> Polynomial {
        let c11 = match self.table.index_of(&ckj_label(1, 1)) {
            None => return p.clone(),
            Some(i) => Polynomial::var(&self.table, i),
        };
        let c11_over_d = c11.scale(&Rat::new(1.into(), (self.alpha.d as i64).into()));
        let mut out = Polynomial::zero(&self.table);
        let mut rpow = p.clone();
        let mut j = 0u32;
        loop {
            let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
            let coeff = sign / factorial(j);
            out.add_assign(&c11_over_d.pow(j).mul(&rpow).scale(&coeff));
            if rpow.is_zero() {
                break;
            }
            rpow = self.r_minus1(&rpow);
            j += 1;
        }
        out
    }
}

/// Label of the raw descendent symbol ch_i(H^j).
pub fn symbol_label(i: u32, j: u32) -> String {
    format!("ch{i}(H{j})")
}

pub fn parse_symbol(label: &str) -> Option<(u32, u32)> {
    let rest = label.strip_prefix("ch")?;
    let open = rest.find("(H")?;
    let i: u32 = rest[..open].parse().ok()?;
    let j: u32 = rest[open + 2..].strip_suffix(')')?.parse().ok()?;
    Some((i, j))
}

/// Free algebra on the raw symbols ch_i(H^j), 1 <= i <= imax, 0 <= j <= 2.
pub fn symbol_table(imax: u32) -> Arc<VariableTable> {
    let mut vars = Vec::new();
    for i in 1..=imax {
        for j in 0..=2 {
            vars.push(Var { label: symbol_label(i, j), degree: i, chern: j });
        }
    }
    VariableTable::new(vars)
}

/// The twist automorphism F_rho on the symbol algebra:
/// ch_i(H^j) -> sum_t (rho^t/t!) ch_i(H^{j+t}), truncated at H^2.
pub fn f_rho_twist(p: &Polynomial, rho_coeff: &Rat) -> Polynomial {
    let table = p.table.clone();
    p.apply_map(&table, |v| {
        let (i, j) = parse_symbol(&table.var(v).label).expect("non-symbol variable");
        let mut out = Polynomial::zero(&table);
        for t in 0..=(2 - j) {
            let coeff = crate::rat::pow(rho_coeff, t) / factorial(t);
            let idx = table
                .index_of(&symbol_label(i, j + t))
                .expect("symbol missing");
            out.add_assign(&Polynomial::var(&table, idx).scale(&coeff));
        }
        out
    })
}

/// The weight-zero-with-u model: the space c-table extended by one degree-1
/// variable u, the image of ch_1(delta).
pub fn wt0_u_table(dmax: u32) -> Arc<VariableTable> {
    let mut vars: Vec<Var> = VariableTable::descendent_table(dmax, false)
        .vars()
        .to_vec();
    vars.push(Var { label: "u".into(), degree: 1, chern: 1 });
    VariableTable::new(vars)
}

impl DescCtx {
    /// varphi: D -> D_wt0[u], sum_i (u^i/i!) eta(R_{-1}^i(p)).
    pub fn varphi(&self, p: &Polynomial) -> Result<Polynomial> {
        assert!(!self.space, "varphi acts on the full algebra");
        let target = wt0_u_table(self.dmax);
        let u = Polynomial::var_by_label(&target, "u").unwrap();
        let mut out = Polynomial::zero(&target);
        let mut rpow = p.clone();
        let mut i = 0u32;
        loop {
            let part = self.eta(&rpow).map_table(&target)?;
            out.add_assign(&u.pow(i).mul(&part).scale(&(rat(1) / factorial(i))));
            if rpow.is_zero() {
                break;
            }
            rpow = self.r_minus1(&rpow);
            i += 1;
        }
        Ok(out)
    }

    /// phi: D_wt0[u] -> D, sending u to c_1(1)/d and each weight-zero
    /// coordinate to its weight-zero representative eta_op(c_k(j)).
    pub fn phi(&self, q: &Polynomial) -> Result<Polynomial> {
        assert!(!self.space);
        let source = q.table.clone();
        let c11 = self.ckj(1, 1)?;
        let d_inv = Rat::new(1.into(), (self.alpha.d as i64).into());
        Ok(q.apply_map(&self.table, |v| {
            let label = &source.var(v).label;
            if label == "u" {
                c11.scale(&d_inv)
            } else {
                let raw = Polynomial::var_by_label(&self.table, label)
                    .expect("wt0 variable missing");
                self.eta_operator_form(&raw)
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;

    #[test]
    fn derived_quantities() {
        let a = ToppType::new(3, 1);
        assert_eq!(a.g(), 1);
        assert_eq!(a.b(), 9);
        assert_eq!(a.dim_stack(), 9);
        assert_eq!(a.dim_space(), 10);
        assert_eq!(a.multiplicity(), 1);
        assert_eq!(ToppType::new(4, 2).multiplicity(), 2);
        assert_eq!(a.r(), frac(3, 2) - frac(1, 3));
    }

    #[test]
    fn chern_pairing_values() {
        assert_eq!(ToppType::new(2, 0).chern_pairing(1), rat(2));
        assert_eq!(ToppType::new(1, 0).chern_pairing(0), frac(-3, 2));
        assert_eq!(ToppType::new(5, 2).chern_pairing_twisted(0), rat(0));
        assert_eq!(ToppType::new(5, 2).chern_pairing_twisted(2), rat(0));
    }

    #[test]
    fn realize_dictionary() {
        let ctx = DescCtx::new(ToppType::new(2, 1), 5, false);
        // ch_2(H^2) -> c_1(2)
        let p = ctx.realize(2, 2).unwrap();
        assert_eq!(p.to_string(), "c1(2)");
        // ch_0(H) -> d
        assert_eq!(ctx.realize(0, 1).unwrap().constant_term(), rat(2));
        // ch_0(1) -> chi - 3d/2
        assert_eq!(ctx.realize(0, 0).unwrap().constant_term(), rat(1) - rat(3));
        // ch_1(H) on the space: c_1(1) = 0 leaves -r*c_0(2)
        let space = DescCtx::new(ToppType::new(2, 1), 5, true);
        let p = space.realize(1, 1).unwrap();
        let r = ToppType::new(2, 1).r();
        let expect = space.ckj(0, 2).unwrap().scale(&(-r));
        assert_eq!(p, expect);
    }

    #[test]
    fn realize_is_invertible() {
        // the triangular dictionary can be resolved back to single c-classes
        let a = ToppType::new(3, 1);
        let ctx = DescCtx::new(a, 6, false);
        let r = a.r();
        for i in 1..=6u32 {
            let two = ctx.realize(i, 2).unwrap();
            assert_eq!(two, ctx.ckj(i as i64 - 1, 2).unwrap());
            let one = ctx.realize(i, 1).unwrap().add(&two.scale(&r));
            assert_eq!(one, ctx.ckj(i as i64, 1).unwrap());
            let zero = ctx
                .realize(i, 0)
                .unwrap()
                .add(&one.scale(&r))
                .sub(&two.scale(&(r.clone() * r.clone() * frac(1, 2))));
            assert_eq!(zero, ctx.ckj(i as i64 + 1, 0).unwrap());
        }
    }

    #[test]
    fn r_minus1_boundaries() {
        let ctx = DescCtx::new(ToppType::new(2, 0), 4, false);
        let c11 = ctx.ckj(1, 1).unwrap();
        assert_eq!(ctx.r_minus1(&c11).constant_term(), rat(2));
        let c20 = ctx.ckj(2, 0).unwrap();
        assert!(ctx.r_minus1(&c20).is_zero());
        let c02 = ctx.ckj(0, 2).unwrap();
        assert!(ctx.r_minus1(&c02.mul(&c20)).is_zero());
    }

    #[test]
    fn eta_properties() {
        let ctx = DescCtx::new(ToppType::new(2, 0), 6, false);
        let c11 = ctx.ckj(1, 1).unwrap();
        let c20 = ctx.ckj(2, 0).unwrap();
        assert!(ctx.eta(&c11).is_zero());
        assert_eq!(ctx.eta(&c20), c20);
        assert!(ctx.eta(&c11.pow(2)).is_zero());
        // the operator form also kills c_1(1) and lands in weight zero
        let p = Polynomial::parse(&ctx.table, "c1(1)^2*c2(0) + 3*c0(2)*c1(2) - 1/2*c1(1)*c0(2)^2")
            .unwrap();
        assert!(ctx.eta_operator_form(&c11).is_zero());
        // R_{-1} of the operator form vanishes
        assert!(ctx.r_minus1(&ctx.eta_operator_form(&p)).is_zero());
        // both forms are algebra homomorphisms
        let q = Polynomial::parse(&ctx.table, "c1(1)*c3(0) + c0(2)^2").unwrap();
        assert_eq!(ctx.eta(&p.mul(&q)), ctx.eta(&p).mul(&ctx.eta(&q)));
        assert_eq!(
            ctx.eta_operator_form(&p.mul(&q)),
            ctx.eta_operator_form(&p).mul(&ctx.eta_operator_form(&q))
        );
        // the two forms agree through the weight-zero re-identification:
        // eta_op(p) = eta_sub(p) evaluated at c_k(j) -> eta_op(c_k(j))
        let table = ctx.table.clone();
        let rewritten = ctx.eta(&p).apply_map(&table, |i| {
            ctx.eta_operator_form(&Polynomial::var(&table, i))
        });
        assert_eq!(ctx.eta_operator_form(&p), rewritten);
        // idempotent: the operator form fixes its own image
        let img = ctx.eta_operator_form(&p);
        assert_eq!(ctx.eta_operator_form(&img), img);
    }

    #[test]
    fn f_rho_inverse_pair() {
        let t = symbol_table(4);
        let rho = frac(3, 2);
        for label in ["ch1(H0)", "ch2(H1)", "ch3(H2)"] {
            let p = Polynomial::var_by_label(&t, label).unwrap();
            let tw = f_rho_twist(&p, &rho);
            let back = f_rho_twist(&tw, &(-rho.clone()));
            assert_eq!(back, p);
        }
        // H^2 symbols are fixed
        let p = Polynomial::var_by_label(&t, "ch2(H2)").unwrap();
        assert_eq!(f_rho_twist(&p, &rho), p);
        // ch_i(H) -> ch_i(H) + rho*ch_i(H^2)
        let p = Polynomial::var_by_label(&t, "ch2(H1)").unwrap();
        let expect = p.add(&Polynomial::var_by_label(&t, "ch2(H2)").unwrap().scale(&rho));
        assert_eq!(f_rho_twist(&p, &rho), expect);
    }

    #[test]
    fn phi_varphi_inverse() {
        let ctx = DescCtx::new(ToppType::new(2, 0), 5, false);
        for s in [
            "c1(1)",
            "c2(0)",
            "c0(2)",
            "c1(1)^2*c2(0)",
            "c1(1)*c0(2) - 2*c3(0)",
            "c2(1)*c1(2) + c1(1)^3",
        ] {
            let p = Polynomial::parse(&ctx.table, s).unwrap();
            let round = ctx.phi(&ctx.varphi(&p).unwrap()).unwrap();
            assert_eq!(round, p, "phi . varphi != id on {s}");
        }
        // and the other composition, on polynomials in D_wt0[u]
        let t = wt0_u_table(5);
        for s in ["u", "u^2*c2(0)", "c0(2)*u - c1(2)", "c3(0)"] {
            let q = Polynomial::parse(&t, s).unwrap();
            let round = ctx.varphi(&ctx.phi(&q).unwrap()).unwrap();
            assert_eq!(round, q, "varphi . phi != id on {s}");
        }
    }
}
