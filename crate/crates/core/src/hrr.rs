//! Intersection theory on completed space rings: the tangent character from
//! the diagonal Kuenneth decomposition, Todd classes via the power-sum kappa
//! series, the normalized integration functional and Euler characteristics of
//! line bundles.

use crate::linalg::GradedIdeal;
use crate::pipeline::RingPresentation;
use crate::poly::{Monomial, Polynomial};
use crate::rat::{factorial, frac, rat, Rat};
use crate::virasoro::KUNNETH;
use crate::{Error, Result};
use num::traits::Zero;

/// Coefficients of log(x/(1-e^{-x})) = sum kappa_m x^m, m >= 1.
pub fn kappa_series(n: usize) -> Vec<Rat> {
    // x/(1-e^{-x}) = x / (x - x^2/2! + x^3/3! - ...) = 1/(1 - x/2! + x^2/3! - ...)
    let mut denom = vec![rat(0); n + 1];
    for m in 0..=n {
        let sign = if m % 2 == 0 { rat(1) } else { rat(-1) };
        denom[m] = sign / factorial(m as u32 + 1);
    }
    let f = series_inverse(&denom, n);
    let lg = series_log(&f, n);
    lg[1..].to_vec()
}

fn series_mul(a: &[Rat], b: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![rat(0); n + 1];
    for i in 0..=n.min(a.len().saturating_sub(1)) {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..=(n - i).min(b.len().saturating_sub(1)) {
            out[i + j] += a[i].clone() * b[j].clone();
        }
    }
    out
}

fn series_inverse(a: &[Rat], n: usize) -> Vec<Rat> {
    assert!(!a[0].is_zero());
    let mut out = vec![rat(0); n + 1];
    out[0] = rat(1) / a[0].clone();
    for m in 1..=n {
        let mut s = rat(0);
        for i in 1..=m.min(a.len() - 1) {
            s += a[i].clone() * out[m - i].clone();
        }
        out[m] = -s / a[0].clone();
    }
    out
}

fn series_log(a: &[Rat], n: usize) -> Vec<Rat> {
    // log(a) with a[0] = 1 via (log a)' = a'/a
    assert_eq!(a[0], rat(1));
    let inv = series_inverse(a, n);
    let mut da = vec![rat(0); n + 1];
    for m in 1..=n.min(a.len() - 1) {
        da[m - 1] = a[m].clone() * rat(m as i64);
    }
    let dl = series_mul(&da, &inv, n);
    let mut out = vec![rat(0); n + 1];
    for m in 1..=n {
        out[m] = dl[m - 1].clone() / rat(m as i64);
    }
    out
}

/// A cohomology class of a space ring as normal-formed graded parts, indexed
/// by q-degree.
pub type GradedClass = Vec<Polynomial>;

fn nf(ideal: &GradedIdeal, p: &Polynomial) -> Result<Polynomial> {
    if p.is_zero() {
        return Ok(p.clone());
    }
    ideal.normal_form(p)
}

fn graded_mul(ideal: &GradedIdeal, a: &GradedClass, b: &GradedClass, n: usize) -> Result<GradedClass> {
    let table = &ideal.table;
    let mut out: GradedClass = (0..=n).map(|_| Polynomial::zero(table)).collect();
    for i in 0..=n.min(a.len().saturating_sub(1)) {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..=(n - i).min(b.len().saturating_sub(1)) {
            if b[j].is_zero() {
                continue;
            }
            let p = a[i].mul(&b[j]);
            out[i + j].add_assign(&nf(ideal, &p)?);
        }
    }
    for p in &mut out {
        *p = nf(ideal, p)?;
    }
    Ok(out)
}

/// exp of a graded class with zero constant part, truncated at degree n.
fn graded_exp(ideal: &GradedIdeal, s: &GradedClass, n: usize) -> Result<GradedClass> {
    assert!(s.is_empty() || s[0].is_zero());
    let table = &ideal.table;
    let mut out: GradedClass = (0..=n).map(|_| Polynomial::zero(table)).collect();
    out[0] = Polynomial::one(table);
    let mut pow: GradedClass = out.clone();
    for k in 1..=n {
        pow = graded_mul(ideal, &pow, s, n)?;
        let c = rat(1) / factorial(k as u32);
        for d in 0..=n {
            out[d].add_assign(&pow[d].scale(&c));
        }
        if pow.iter().all(|p| p.is_zero()) {
            break;
        }
    }
    Ok(out)
}

/// ch(T_M) = 1 - sum_{a,b,i} (-1)^{a + deg gamma_i^L} d_i ch_a(gamma_i^L) ch_b(gamma_i^R),
/// realized in the quotient ring; entry m is ch_m.
pub fn tangent_character(pres: &RingPresentation) -> Result<GradedClass> {
    if !pres.complete {
        return Err(Error::MissingPrerequisite(
            "tangent character needs a complete ring".into(),
        ));
    }
    let n = pres.top_degree() as usize;
    if (pres.dmax as usize) < n {
        return Err(Error::DegreeOverflow(n as u32, pres.dmax));
    }
    let ctx = &pres.rewrite.ctx;
    let ideal = &pres.ideal;
    let mut out: GradedClass = (0..=n).map(|_| Polynomial::zero(&ideal.table)).collect();
    out[0] = Polynomial::one(&ideal.table);
    for m in 0..=n {
        for a in 0..=m as u32 {
            let b = m as u32 - a;
            for (jl, jr, (num, den)) in KUNNETH {
                let sign = if (a + jl) % 2 == 0 { rat(1) } else { rat(-1) };
                let l = pres.rewrite.reduce(&ctx.realize(a, jl)?)?;
                if l.is_zero() {
                    continue;
                }
                let r = pres.rewrite.reduce(&ctx.realize(b, jr)?)?;
                if r.is_zero() {
                    continue;
                }
                let term = l.mul(&r).scale(&(-sign * frac(num, den)));
                out[m].add_assign(&nf(ideal, &term)?);
            }
        }
        out[m] = nf(ideal, &out[m])?;
    }
    Ok(out)
}

/// td = exp(sum_m kappa_m m! ch_m) from the power sums p_m = m! ch_m.
pub fn todd(ideal: &GradedIdeal, ch: &GradedClass) -> Result<GradedClass> {
    let n = ch.len() - 1;
    let kappa = kappa_series(n.max(1));
    let mut s: GradedClass = (0..=n).map(|_| Polynomial::zero(&ideal.table)).collect();
    for m in 1..=n {
        s[m] = ch[m].scale(&(kappa[m - 1].clone() * factorial(m as u32)));
    }
    graded_exp(ideal, &s, n)
}

/// The normalized integration functional of a Gorenstein space ring: the
/// point class and the scale lambda fixed by chi(M, O) = 1.
#[derive(Debug, Clone)]
pub struct IntegrationFunctional {
    pub top: Monomial,
    pub lambda: Rat,
}

impl IntegrationFunctional {
    /// Integral of a class given by graded parts; only the top part counts.
    pub fn integrate(&self, ideal: &GradedIdeal, class: &GradedClass, n: usize) -> Result<Rat> {
        if class.len() <= n {
            return Ok(rat(0));
        }
        let top_part = nf(ideal, &class[n])?;
        Ok(top_part.coeff(&self.top) * self.lambda.clone())
    }

    pub fn integrate_poly(&self, ideal: &GradedIdeal, p: &Polynomial, n: u32) -> Result<Rat> {
        let part = p.graded_part(n);
        Ok(nf(ideal, &part)?.coeff(&self.top) * self.lambda.clone())
    }
}

/// Fix the functional so that the top Todd part integrates to 1.
pub fn normalize_integral(pres: &RingPresentation) -> Result<IntegrationFunctional> {
    if !pres.gorenstein {
        return Err(Error::MissingPrerequisite(
            "integration needs a Gorenstein space ring".into(),
        ));
    }
    let n = pres.top_degree();
    let basis = pres.ideal.quotient_basis(n);
    if basis.len() != 1 {
        return Err(Error::Structural(format!(
            "top degree {n} of ({},{}) has dimension {}",
            pres.alpha.d,
            pres.alpha.chi,
            basis.len()
        )));
    }
    let top = basis[0].clone();
    let td = todd(&pres.ideal, &tangent_character(pres)?)?;
    let c = nf(&pres.ideal, &td[n as usize])?.coeff(&top);
    if c.is_zero() {
        return Err(Error::Structural(
            "top Todd part vanishes; the ring cannot integrate td to 1".into(),
        ));
    }
    Ok(IntegrationFunctional { top, lambda: rat(1) / c })
}

/// chi(M, m c_0(2)) = integral of exp(m c_0(2)) td(M); exact, and integral on
/// consistent rings.
pub fn euler_characteristic(pres: &RingPresentation, m: i64) -> Result<Rat> {
    let functional = normalize_integral(pres)?;
    let n = pres.top_degree() as usize;
    let ideal = &pres.ideal;
    let xi = Polynomial::var_by_label(&ideal.table, "c0(2)")
        .ok_or_else(|| Error::Structural("space table without c0(2)".into()))?;
    let mut s: GradedClass = (0..=n).map(|_| Polynomial::zero(&ideal.table)).collect();
    s[1] = xi.scale(&rat(m));
    let line = graded_exp(ideal, &s, n)?;
    let td = todd(ideal, &tangent_character(pres)?)?;
    let total = graded_mul(ideal, &line, &td, n)?;
    functional.integrate(ideal, &total, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descendent::ToppType;
    use crate::pipeline::{build_ring, BuildOptions, Kind, Registry};
    use num::traits::ToPrimitive;

    fn binom(n: i64, k: i64) -> Rat {
        let mut out = rat(1);
        for i in 0..k {
            out = out * frac(n - i, i + 1);
        }
        out
    }

    #[test]
    fn kappa_values() {
        let k = kappa_series(4);
        assert_eq!(k[0], frac(1, 2));
        assert_eq!(k[1], frac(-1, 24));
        // odd coefficients vanish beyond the first
        assert_eq!(k[2], rat(0));
    }

    #[test]
    fn todd_of_zero_is_one() {
        let mut reg = Registry::new();
        let pres = build_ring(&mut reg, ToppType::new(1, 0), Kind::Space, 4, &BuildOptions::default()).unwrap();
        let zero_ch: GradedClass =
            (0..=2).map(|_| Polynomial::zero(&pres.ideal.table)).collect();
        let td = todd(&pres.ideal, &zero_ch).unwrap();
        assert_eq!(td[0], Polynomial::one(&pres.ideal.table));
        assert!(td[1].is_zero());
        assert!(td[2].is_zero());
    }

    #[test]
    fn tangent_p2() {
        let mut reg = Registry::new();
        let pres = build_ring(&mut reg, ToppType::new(1, 0), Kind::Space, 4, &BuildOptions::default()).unwrap();
        let ch = tangent_character(&pres).unwrap();
        // rank of T_{P^2} = dim M = d^2 + 1 = 2
        assert_eq!(ch[0].constant_term(), rat(2));
        // ch_1 = c_1(T) = 3H
        let h = Polynomial::var_by_label(&pres.ideal.table, "c0(2)").unwrap();
        assert_eq!(ch[1], h.scale(&rat(3)));
        // ch_2 = (3/2)H^2
        assert_eq!(ch[2], nf(&pres.ideal, &h.mul(&h).scale(&frac(3, 2))).unwrap());
    }

    #[test]
    fn euler_m10_binomial() {
        let mut reg = Registry::new();
        let pres = build_ring(&mut reg, ToppType::new(1, 0), Kind::Space, 4, &BuildOptions::default()).unwrap();
        for m in 0..=6 {
            let chi = euler_characteristic(&pres, m).unwrap();
            assert_eq!(chi, binom(m + 2, m), "m = {m}");
        }
        assert!(chi_is_integer(&euler_characteristic(&pres, 11).unwrap()));
    }

    #[test]
    fn euler_m21_binomial() {
        let mut reg = Registry::new();
        let pres = build_ring(&mut reg, ToppType::new(2, 1), Kind::Space, 5, &BuildOptions::default()).unwrap();
        for m in 0..=6 {
            let chi = euler_characteristic(&pres, m).unwrap();
            assert_eq!(chi, binom(m + 5, m), "m = {m}");
        }
    }

    fn chi_is_integer(x: &Rat) -> bool {
        x.denom().to_i64() == Some(1)
    }
}
