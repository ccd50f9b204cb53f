//! Virasoro operators on the descendent algebra: the derivations R_n, the
//! multiplication elements T_n, the total operators L_n, the delta-normalized
//! R_n^delta / L_n^delta and the weight-zero combination L_wt0, together with
//! Virasoro closure of relation sets.

use crate::descendent::DescCtx;
use crate::linalg::GradedIdeal;
use crate::poly::Polynomial;
use crate::rat::{factorial, frac, rat, Rat};
use crate::vars::parse_ckj;
use crate::{Error, Result};
use std::cell::RefCell;
use std::collections::BTreeMap;

/// Kuenneth decomposition of the pushforward of td(P^2) along the diagonal:
/// triples (j_L, j_R, coefficient) for H^{j_L} (x) H^{j_R}.
pub const KUNNETH: [(u32, u32, (i64, i64)); 6] = [
    (2, 0, (1, 1)),
    (1, 1, (1, 1)),
    (0, 2, (1, 1)),
    (1, 2, (3, 2)),
    (2, 1, (3, 2)),
    (2, 2, (1, 1)),
];

/// Operator context: a descendent context plus a cache of the T_n elements.
pub struct Virasoro {
    pub ctx: DescCtx,
    t_cache: RefCell<BTreeMap<u32, Polynomial>>,
}

impl Virasoro {
    pub fn new(ctx: DescCtx) -> Self {
        Virasoro { ctx, t_cache: RefCell::new(BTreeMap::new()) }
    }

    /// The derivation R_n: c_k(j) -> (k+j-1)(k+j)...(k+j-1+n) c_{k+n}(j),
    /// a product of n+1 consecutive factors. n = -1 is the plain shift.
    pub fn apply_rn(&self, n: i64, p: &Polynomial) -> Result<Polynomial> {
        assert!(n >= -1);
        if n == -1 {
            return Ok(self.ctx.r_minus1(p));
        }
        let n = n as u32;
        let d = p.max_degree();
        if !p.is_zero() && d + n > self.ctx.dmax {
            return Err(Error::DegreeOverflow(d + n, self.ctx.dmax));
        }
        let table = p.table.clone();
        Ok(p.apply_derivation(|i| {
            let (k, j) = parse_ckj(&table.var(i).label).expect("non-c variable");
            let mut coeff = Rat::from_integer(1.into());
            for t in 0..=n as i64 {
                coeff *= rat(k as i64 + j as i64 - 1 + t);
            }
            self.ctx
                .ckj(k as i64 + n as i64, j)
                .expect("degree bound checked")
                .scale(&coeff)
        }))
    }

    /// The multiplication element T_n = sum_{a+b=n} sum_i a! b! (-1)^{j_L}
    /// ch_a(H^{j_L}) ch_b(H^{j_R}) realized in c-coordinates.
    pub fn t_element(&self, n: u32) -> Result<Polynomial> {
        if n > self.ctx.dmax {
            return Err(Error::DegreeOverflow(n, self.ctx.dmax));
        }
        if let Some(t) = self.t_cache.borrow().get(&n) {
            return Ok(t.clone());
        }
        let mut out = Polynomial::zero(&self.ctx.table);
        for a in 0..=n {
            let b = n - a;
            for (jl, jr, (num, den)) in KUNNETH {
                let sign = if jl % 2 == 0 { rat(1) } else { rat(-1) };
                let coeff = factorial(a) * factorial(b) * sign * frac(num, den);
                let left = self.ctx.realize(a, jl)?;
                let right = self.ctx.realize(b, jr)?;
                out.add_assign(&left.mul(&right).scale(&coeff));
            }
        }
        self.t_cache.borrow_mut().insert(n, out.clone());
        Ok(out)
    }

    /// L_n = R_n + mult(T_n); T_{-1} is the empty sum, so L_{-1} = R_{-1}.
    pub fn apply_ln(&self, n: i64, p: &Polynomial) -> Result<Polynomial> {
        let rn = self.apply_rn(n, p)?;
        if n < 0 {
            return Ok(rn);
        }
        let t = self.t_element(n as u32)?;
        Ok(rn.add(&t.mul(p)))
    }

    /// R_n^delta = R_n - ((n+1)!/d) mult(c_{n+1}(1)) o R_{-1}.
    pub fn apply_rn_delta(&self, n: u32, p: &Polynomial) -> Result<Polynomial> {
        let rn = self.apply_rn(n as i64, p)?;
        let c = self.ctx.ckj(n as i64 + 1, 1)?;
        let coeff = factorial(n + 1) / rat(self.ctx.alpha.d as i64);
        Ok(rn.sub(&c.mul(&self.ctx.r_minus1(p)).scale(&coeff)))
    }

    /// L_n^delta = R_n + T_n - ((n+1)!/d) R_{-1} o mult(c_{n+1}(1)).
    pub fn apply_ln_delta(&self, n: u32, p: &Polynomial) -> Result<Polynomial> {
        let ln = self.apply_ln(n as i64, p)?;
        let c = self.ctx.ckj(n as i64 + 1, 1)?;
        let coeff = factorial(n + 1) / rat(self.ctx.alpha.d as i64);
        Ok(ln.sub(&self.ctx.r_minus1(&c.mul(p)).scale(&coeff)))
    }

    /// L_wt0 = sum_{n >= -1} ((-1)^n/(n+1)!) L_n o L_{-1}^{n+1}; the sum is
    /// finite because L_{-1} lowers degree.
    pub fn apply_lwt0(&self, p: &Polynomial) -> Result<Polynomial> {
        let mut out = Polynomial::zero(&self.ctx.table);
        let mut inner = p.clone();
        let mut n: i64 = -1;
        loop {
            if inner.is_zero() && n >= 0 {
                break;
            }
            let sign = if n.rem_euclid(2) == 0 { rat(1) } else { rat(-1) };
            let coeff = sign / factorial((n + 1) as u32);
            out.add_assign(&self.apply_ln(n, &inner)?.scale(&coeff));
            inner = self.ctx.r_minus1(&inner);
            n += 1;
        }
        Ok(out)
    }

    /// Virasoro closure: all R_n(g) (or L_n(g) when `use_ln`) of result
    /// degree <= dtarget, reduced to normal form against the ideal; only
    /// nonzero normal forms are returned.
    pub fn closure(
        &self,
        gens: &[Polynomial],
        ideal: &GradedIdeal,
        dtarget: u32,
        use_ln: bool,
    ) -> Result<Vec<Polynomial>> {
        let mut out = Vec::new();
        for g in gens {
            let Some(d) = g.homogeneous_degree() else {
                return Err(Error::Inhomogeneous(g.to_string()));
            };
            for n in 1..=dtarget.saturating_sub(d) {
                let img = if use_ln {
                    self.apply_ln(n as i64, g)?
                } else {
                    self.apply_rn(n as i64, g)?
                };
                let nf = ideal.normal_form(&img)?;
                if !nf.is_zero() {
                    out.push(nf);
                }
            }
        }
        Ok(out)
    }
}
