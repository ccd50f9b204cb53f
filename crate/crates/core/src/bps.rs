//! BPS integrality as a plethystic identity between shifted Poincaré series:
//! truncated Laurent series in q^{1/2}, the monoid ring of a fixed slope ray,
//! PE / plog, and the structural form of the stack series.

use crate::rat::{rat, Rat};
use crate::{Error, Result};
use num::traits::Zero;
use std::collections::BTreeMap;

/// Cap value marking a series that is exact at every exponent, e.g. a finite
/// Laurent polynomial.
pub const EXACT_CAP: i64 = i64::MAX / 8;

/// Laurent series in q^{1/2}; exponents are stored doubled so that the
/// half-integer shifts of the BPS identity stay exact. Coefficients with
/// doubled exponent above `cap2` are unknown and dropped; arithmetic shrinks
/// the cap to the range it can certify.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    pub cap2: i64,
    terms: BTreeMap<i64, Rat>,
}

impl QSeries {
    pub fn zero(cap2: i64) -> Self {
        QSeries { cap2, terms: BTreeMap::new() }
    }

    pub fn one(cap2: i64) -> Self {
        Self::monomial(0, rat(1), cap2)
    }

    /// c * q^{e2/2}.
    pub fn monomial(e2: i64, c: Rat, cap2: i64) -> Self {
        let mut s = Self::zero(cap2);
        s.set(e2, c);
        s
    }

    /// Series with integer q-exponents from plain coefficients c_0, c_1, ...
    pub fn from_ints(coeffs: &[i64], cap2: i64) -> Self {
        let mut s = Self::zero(cap2);
        for (i, &c) in coeffs.iter().enumerate() {
            s.set(2 * i as i64, rat(c));
        }
        s
    }

    pub fn set(&mut self, e2: i64, c: Rat) {
        if e2 > self.cap2 || c.is_zero() {
            self.terms.remove(&e2);
            if c.is_zero() {
                return;
            }
            return;
        }
        self.terms.insert(e2, c);
    }

    pub fn coeff(&self, e2: i64) -> Rat {
        self.terms.get(&e2).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn min_exp2(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn truncate(&self, cap2: i64) -> QSeries {
        let mut out = Self::zero(cap2.min(self.cap2));
        for (&e, c) in &self.terms {
            if e <= out.cap2 {
                out.terms.insert(e, c.clone());
            }
        }
        out
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let mut out = self.truncate(self.cap2.min(other.cap2));
        for (&e, c) in &other.terms {
            if e <= out.cap2 {
                let v = out.coeff(e) + c;
                out.set(e, v);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> QSeries {
        let mut out = Self::zero(self.cap2);
        for (&e, v) in &self.terms {
            out.set(e, v * c);
        }
        out
    }

    pub fn neg(&self) -> QSeries {
        self.scale(&rat(-1))
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        // coefficient at e is certain iff every split a + b = e has both
        // factors below their caps; negative minimal exponents shrink the
        // certified range
        let min_a = self.min_exp2().unwrap_or(0).min(0);
        let min_b = other.min_exp2().unwrap_or(0).min(0);
        let cap2 = (self.cap2.saturating_add(min_b))
            .min(other.cap2.saturating_add(min_a))
            .min(EXACT_CAP);
        let mut out = Self::zero(cap2);
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &other.terms {
                if e1 + e2 <= cap2 {
                    let v = out.coeff(e1 + e2) + c1 * c2;
                    out.set(e1 + e2, v);
                }
            }
        }
        out
    }

    /// Multiply by q^{s2/2}.
    pub fn shift(&self, s2: i64) -> QSeries {
        let mut out = Self::zero(self.cap2.saturating_add(s2).min(EXACT_CAP));
        for (&e, c) in &self.terms {
            out.set(e + s2, c.clone());
        }
        out
    }

    /// Adams operation q^{1/2} -> q^{n/2}.
    pub fn adams(&self, n: i64) -> QSeries {
        let mut out = Self::zero(self.cap2.saturating_mul(n).min(EXACT_CAP));
        for (&e, c) in &self.terms {
            out.set(e * n, c.clone());
        }
        out
    }

    /// 1/(1 - q) expanded to the cap.
    pub fn geometric(cap2: i64) -> QSeries {
        let mut s = Self::zero(cap2);
        let mut e = 0;
        while e <= cap2 {
            s.set(e, rat(1));
            e += 2;
        }
        s
    }

    /// Plain integer-exponent coefficients c_0..=c_n; error when a half
    /// exponent or non-integer coefficient survives.
    pub fn to_ints(&self, n: usize) -> Result<Vec<i64>> {
        let mut out = vec![0i64; n + 1];
        for (&e, c) in &self.terms {
            if e % 2 != 0 || e < 0 {
                return Err(Error::Structural(format!(
                    "unexpected exponent {}/2 in integral series",
                    e
                )));
            }
            let i = (e / 2) as usize;
            if i <= n {
                if !crate::rat::is_integer(c) {
                    return Err(Error::Structural(format!(
                        "non-integer coefficient {c} at q^{i}"
                    )));
                }
                out[i] = c.numer().try_into().map_err(|_| {
                    Error::Structural("coefficient overflow".into())
                })?;
            }
        }
        Ok(out)
    }
}

/// A series over the monoid ring of one slope ray: component d carries a
/// q^{1/2}-Laurent series, truncated at d <= dcut.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoidSeries {
    pub dcut: u32,
    pub cap2: i64,
    pub comps: BTreeMap<u32, QSeries>,
}

impl MonoidSeries {
    pub fn zero(dcut: u32, cap2: i64) -> Self {
        MonoidSeries { dcut, cap2, comps: BTreeMap::new() }
    }

    pub fn comp(&self, d: u32) -> QSeries {
        self.comps
            .get(&d)
            .cloned()
            .unwrap_or_else(|| QSeries::zero(self.cap2))
    }

    pub fn set_comp(&mut self, d: u32, s: QSeries) {
        if d == 0 || d > self.dcut {
            return;
        }
        if s.is_zero() {
            self.comps.remove(&d);
        } else {
            self.comps.insert(d, s);
        }
    }

    fn e0(&self) -> Option<&QSeries> {
        self.comps.get(&0)
    }

    pub fn add_assign(&mut self, other: &MonoidSeries) {
        for (&d, s) in &other.comps {
            if d > self.dcut {
                continue;
            }
            let v = match self.comps.get(&d) {
                Some(cur) => cur.add(s),
                None => s.clone(),
            };
            if v.is_zero() {
                self.comps.remove(&d);
            } else {
                self.comps.insert(d, v);
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> MonoidSeries {
        let mut out = Self::zero(self.dcut, self.cap2);
        for (&d, s) in &self.comps {
            out.comps.insert(d, s.scale(c));
        }
        out
    }

    pub fn mul(&self, other: &MonoidSeries) -> MonoidSeries {
        let mut out = Self::zero(self.dcut, self.cap2);
        for (&d1, s1) in &self.comps {
            for (&d2, s2) in &other.comps {
                if d1 + d2 > self.dcut {
                    continue;
                }
                let prod = s1.mul(s2);
                let v = match out.comps.get(&(d1 + d2)) {
                    Some(cur) => cur.add(&prod),
                    None => prod,
                };
                out.comps.insert(d1 + d2, v);
            }
        }
        out
    }

    /// Adams operation: e^d -> e^{nd}, q^{1/2} -> q^{n/2}.
    pub fn adams(&self, n: u32) -> MonoidSeries {
        let mut out = Self::zero(self.dcut, self.cap2);
        for (&d, s) in &self.comps {
            if d * n <= self.dcut {
                out.comps.insert(d * n, s.adams(n as i64));
            }
        }
        out
    }
}

/// Plethystic exponential; the input must have no e^0 component.
pub fn pe(f: &MonoidSeries) -> Result<MonoidSeries> {
    if f.e0().is_some() {
        return Err(Error::Structural(
            "pe input must have zero e^0 component".into(),
        ));
    }
    let mut s = MonoidSeries::zero(f.dcut, f.cap2);
    for n in 1..=f.dcut.max(1) {
        s.add_assign(&f.adams(n).scale(&(rat(1) / rat(n as i64))));
    }
    // exp of s: truncation in e-degree bounds the sum
    let mut out = MonoidSeries::zero(f.dcut, f.cap2);
    out.comps.insert(0, QSeries::one(EXACT_CAP));
    let mut term = out.clone();
    for k in 1..=f.dcut.max(1) {
        term = term.mul(&s).scale(&(rat(1) / rat(k as i64)));
        if term.comps.is_empty() {
            break;
        }
        out.add_assign(&term);
    }
    Ok(out)
}

/// Plethystic logarithm; the input must have e^0 component 1.
pub fn plog(g: &MonoidSeries) -> Result<MonoidSeries> {
    match g.e0() {
        Some(s) if s.terms.len() == 1 && s.coeff(0) == rat(1) => {}
        _ => {
            return Err(Error::Structural(
                "plog input must have e^0 component 1".into(),
            ))
        }
    }
    // log(1 + h) with h = g - 1
    let mut h = g.clone();
    h.comps.remove(&0);
    let mut log = MonoidSeries::zero(g.dcut, g.cap2);
    let mut pow = MonoidSeries::zero(g.dcut, g.cap2);
    pow.comps.insert(0, QSeries::one(EXACT_CAP));
    for k in 1..=g.dcut.max(1) {
        pow = pow.mul(&h);
        if pow.comps.is_empty() {
            break;
        }
        let sign = if k % 2 == 1 { rat(1) } else { rat(-1) };
        log.add_assign(&pow.scale(&(sign / rat(k as i64))));
    }
    // Moebius inversion of the Adams sum
    let mut out = MonoidSeries::zero(g.dcut, g.cap2);
    for n in 1..=g.dcut.max(1) {
        let m = moebius(n);
        if m == 0 {
            continue;
        }
        out.add_assign(&log.adams(n).scale(&(rat(m) / rat(n as i64))));
    }
    Ok(out)
}

fn moebius(n: u32) -> i64 {
    let mut n = n;
    let mut m = 1i64;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        m = -m;
    }
    m
}

/// Stack series along one slope ray from intersection inputs:
/// sum_d Ebar(stack_d) e^d = PE(-q^{1/2}/(1-q) * sum_d IEbar(M_d) e^d).
/// Input: IEbar per d (shifted intersection series); output: Ebar per d.
pub fn stack_series(
    ie: &BTreeMap<u32, QSeries>,
    dcut: u32,
    cap2: i64,
) -> Result<BTreeMap<u32, QSeries>> {
    let mut maxneg: i64 = 0;
    for s in ie.values() {
        maxneg = maxneg.max(-s.min_exp2().unwrap_or(0));
    }
    // the Adams operations in pe stretch negative exponents by up to dcut
    let working = cap2 + (dcut as i64) * (maxneg + 2);
    let mut f = MonoidSeries::zero(dcut, working);
    for d in 1..=dcut {
        let s = ie.get(&d).ok_or_else(|| {
            Error::MissingPrerequisite(format!("IEbar input for d={d} on the slope ray"))
        })?;
        let half = QSeries::monomial(1, rat(-1), EXACT_CAP); // -q^{1/2}
        let factor = half.mul(&QSeries::geometric(working));
        f.set_comp(d, factor.mul(s));
    }
    let g = pe(&f)?;
    let mut out = BTreeMap::new();
    for d in 1..=dcut {
        let c = g.comp(d);
        if c.cap2 < cap2 {
            return Err(Error::Structural(format!(
                "stack series for d={d} certified only to doubled exponent {}",
                c.cap2
            )));
        }
        out.insert(d, c.truncate(cap2));
    }
    Ok(out)
}

/// Shift a plain Poincaré series E into Ebar = (-q^{1/2})^{-dim} E.
pub fn shift_down(e: &QSeries, dim: u32) -> QSeries {
    let sign = if dim % 2 == 0 { rat(1) } else { rat(-1) };
    e.shift(-(dim as i64)).scale(&sign)
}

/// Undo the shift: E = (-q^{1/2})^{dim} Ebar.
pub fn shift_up(ebar: &QSeries, dim: u32) -> QSeries {
    let sign = if dim % 2 == 0 { rat(1) } else { rat(-1) };
    ebar.shift(dim as i64).scale(&sign)
}

/// Thm 4.6 structural form: A_{d,m} = E(stack) * prod_{j=1}^m (1 - q^j) is a
/// polynomial with constant term 1, degree N = d^2 + m(m+1)/2 and leading
/// coefficient (-1)^{m-1}. Returns A's integer coefficients 0..=N.
pub fn structural_decompose(e_stack: &QSeries, d: u32, m: u32) -> Result<Vec<i64>> {
    let n_deg = d * d + m * (m + 1) / 2;
    if e_stack.cap2 < 2 * n_deg as i64 {
        return Err(Error::DegreeOverflow(n_deg, (e_stack.cap2 / 2) as u32));
    }
    let mut a = e_stack.clone();
    for j in 1..=m {
        let mut factor = QSeries::one(a.cap2);
        factor.set(2 * j as i64, rat(-1));
        a = a.mul(&factor);
    }
    let coeffs = a.to_ints((a.cap2 / 2) as usize)?;
    for (i, &c) in coeffs.iter().enumerate() {
        if i > n_deg as usize && c != 0 {
            return Err(Error::Structural(format!(
                "A_{{{d},{m}}} has nonzero coefficient {c} at q^{i} beyond degree {n_deg}"
            )));
        }
    }
    let a_coeffs: Vec<i64> = coeffs[..=n_deg as usize].to_vec();
    if a_coeffs[0] != 1 {
        return Err(Error::Structural(format!(
            "A_{{{d},{m}}} constant term {} != 1",
            a_coeffs[0]
        )));
    }
    let want_lead = if m % 2 == 1 { 1 } else { -1 };
    if a_coeffs[n_deg as usize] != want_lead {
        return Err(Error::Structural(format!(
            "A_{{{d},{m}}} leading coefficient {} != {want_lead}",
            a_coeffs[n_deg as usize]
        )));
    }
    Ok(a_coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pe_geometric_example() {
        // PE(q e): coefficient of e^d is q^d
        let mut f = MonoidSeries::zero(5, 20);
        f.set_comp(1, QSeries::monomial(2, rat(1), 20));
        let g = pe(&f).unwrap();
        for d in 1..=5u32 {
            assert_eq!(g.comp(d), QSeries::monomial(2 * d as i64, rat(1), 20));
        }
    }

    #[test]
    fn pe_plog_inverse() {
        let mut f = MonoidSeries::zero(4, 12);
        f.set_comp(1, QSeries::from_ints(&[1, -2, 3], 12));
        f.set_comp(2, QSeries::monomial(-3, rat(5), 12));
        f.set_comp(3, QSeries::from_ints(&[0, 7], 12));
        let g = pe(&f).unwrap();
        let back = plog(&g).unwrap();
        for d in 1..=4u32 {
            let (b, a) = (back.comp(d), f.comp(d));
            assert!(b.cap2 >= 6, "certified cap collapsed at e^{d}");
            for e in -6..=6 {
                assert_eq!(b.coeff(e), a.coeff(e), "plog(pe(f)) != f at e^{d}, q^{e}/2");
            }
        }
        // guards
        let mut bad = f.clone();
        bad.comps.insert(0, QSeries::one(12));
        assert!(pe(&bad).is_err());
        assert!(plog(&f).is_err());
    }

    #[test]
    fn stack_series_d1() {
        // IEbar(M_{1,0}) = q^{-1}(1 + q + q^2)
        let mut ie = BTreeMap::new();
        ie.insert(1, QSeries::from_ints(&[1, 1, 1], EXACT_CAP).shift(-2));
        let out = stack_series(&ie, 1, 30).unwrap();
        let ebar = &out[&1];
        // Ebar = -q^{-1/2}(1+q+q^2)/(1-q)
        let want = QSeries::monomial(-1, rat(-1), EXACT_CAP)
            .mul(&QSeries::from_ints(&[1, 1, 1], EXACT_CAP))
            .mul(&QSeries::geometric(40))
            .truncate(30);
        assert_eq!(ebar.terms, want.terms);
        // E = (-q^{1/2})^1 Ebar = (1+q+q^2)/(1-q) = 1 + 2q + 3q^2 + 3q^3 + ...
        let e = shift_up(ebar, 1);
        assert_eq!(e.to_ints(5).unwrap(), vec![1, 2, 3, 3, 3, 3]);
    }

    #[test]
    fn stack_series_d2_golden() {
        // inputs: IEbar(M_1) from M_{1,0}, IEbar(M_2) from E(M_{2,1}) = P^5
        let cap2 = 40;
        let mut ie = BTreeMap::new();
        ie.insert(1, shift_down(&QSeries::from_ints(&[1, 1, 1], EXACT_CAP), 2));
        ie.insert(
            2,
            shift_down(&QSeries::from_ints(&[1, 1, 1, 1, 1, 1], EXACT_CAP), 5),
        );
        let out = stack_series(&ie, 2, cap2).unwrap();
        let e = shift_up(&out[&2], 4);
        // (1+q+2q^2+2q^3+3q^4+q^5-q^7)/((1-q)(1-q^2))
        let num = QSeries::from_ints(&[1, 1, 2, 2, 3, 1, 0, -1], EXACT_CAP);
        let mut den1 = QSeries::one(EXACT_CAP);
        den1.set(2, rat(-1));
        let mut den2 = QSeries::one(EXACT_CAP);
        den2.set(4, rat(-1));
        let lhs = e.mul(&den1).mul(&den2);
        assert_eq!(lhs.to_ints(10).unwrap(), num.to_ints(10).unwrap());
        assert_eq!(e.to_ints(4).unwrap(), vec![1, 2, 5, 8, 14]);
    }

    #[test]
    fn structural_checks() {
        // (d,m) = (1,1): A = E(stack_1)(1-q) = 1 + q + q^2
        let e1 = QSeries::from_ints(&[1, 2, 3, 3, 3, 3, 3, 3], 14);
        let a = structural_decompose(&e1, 1, 1).unwrap();
        assert_eq!(a, vec![1, 1, 1]);
        // (d,m) = (2,2) from the golden series
        let cap2 = 40;
        let mut ie = BTreeMap::new();
        ie.insert(1, shift_down(&QSeries::from_ints(&[1, 1, 1], EXACT_CAP), 2));
        ie.insert(
            2,
            shift_down(&QSeries::from_ints(&[1, 1, 1, 1, 1, 1], EXACT_CAP), 5),
        );
        let out = stack_series(&ie, 2, cap2).unwrap();
        let e2 = shift_up(&out[&2], 4);
        let a = structural_decompose(&e2, 2, 2).unwrap();
        assert_eq!(a, vec![1, 1, 2, 2, 3, 1, 0, -1]);
        // tampering trips the checks
        let mut bad = e2.clone();
        bad.set(0, rat(2));
        assert!(structural_decompose(&bad, 2, 2).is_err());
    }

    #[test]
    fn moebius_small() {
        assert_eq!(
            (1..=12).map(moebius).collect::<Vec<_>>(),
            vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
        );
    }
}
