//! The three families of geometric relations: Mumford relations (MR),
//! generalized Mumford relations (GMR) and base relations (BR), their
//! primitive subsets, and the quadratic-descendent identities they satisfy.

use crate::descendent::{DescCtx, ToppType};
use crate::linalg::GradedIdeal;
use crate::poly::{Monomial, Polynomial};
use crate::rat::{binomial, factorial, frac, rat, Rat};
use crate::vars::{parse_ckj, VariableTable};
use crate::virasoro::{Virasoro, KUNNETH};
use crate::{Error, Result};
use num::traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    MR,
    GMR,
    BR,
}

/// A batch of homogeneous relations with enough provenance to regenerate it.
#[derive(Debug, Clone)]
pub struct RelationBatch {
    pub family: Family,
    pub provenance: String,
    pub relations: Vec<Polynomial>,
}

/// ch_l of td(P^2) = 1 + (3/2)H + H^2, realized in c-coordinates.
pub fn td_ch(ctx: &DescCtx, l: u32) -> Result<Polynomial> {
    let mut out = ctx.realize(l, 0)?;
    out.add_assign(&ctx.realize(l, 1)?.scale(&frac(3, 2)));
    out.add_assign(&ctx.realize(l, 2)?);
    Ok(out)
}

/// exp(sum_l (-1)^{l-1}(l-1)! ch_l(td P^2)) truncated past `cap`.
#[cfg(test)]
fn mr_exponential(ctx: &DescCtx, cap: u32) -> Result<Polynomial> {
    let mut s = Polynomial::zero(&ctx.table);
    for l in 1..=cap {
        let sign = if l % 2 == 1 { rat(1) } else { rat(-1) };
        s.add_assign(&td_ch(ctx, l)?.scale(&(sign * factorial(l - 1))));
    }
    let mut out = Polynomial::one(&ctx.table);
    let mut term = Polynomial::one(&ctx.table);
    for n in 1..=cap {
        term = term.mul_truncated(&s, cap).scale(&(rat(1) / rat(n as i64)));
        if term.is_zero() {
            break;
        }
        out.add_assign(&term);
    }
    Ok(out)
}

/// The involution psi_2 on c-coordinates: c_k(j) -> (-1)^k c_k(j).
pub fn psi2(p: &Polynomial) -> Polynomial {
    let table = p.table.clone();
    p.apply_map(&table, |i| {
        let (k, _) = parse_ckj(&table.var(i).label).expect("non-c variable");
        let v = Polynomial::var(&table, i);
        if k % 2 == 1 {
            v.neg()
        } else {
            v
        }
    })
}

/// Mumford relations MR^{±,k,j} for all chi~ < j <= dtarget, where
/// chi~ = ±chi + kd is the rank of the twisted pushforward bundle.
/// The class is realized in (d, chi~) and transported back along psi_1 / psi_2.
pub fn mumford_relations(
    ctx: &DescCtx,
    sign: Sign,
    k: i64,
    dtarget: u32,
) -> Result<RelationBatch> {
    mumford_relations_mapped(ctx, sign, k, dtarget, &|p| Ok(p.clone()), &ctx.table)
}

/// Mumford relations pushed through a ring homomorphism `reduce` from the
/// c-algebra of `ctx` into `target` (e.g. the generator-ring rewrite). The
/// exponential is expanded on the far side of the hom, which keeps the
/// intermediate polynomials small.
pub fn mumford_relations_mapped(
    ctx: &DescCtx,
    sign: Sign,
    k: i64,
    dtarget: u32,
    reduce: &dyn Fn(&Polynomial) -> Result<Polynomial>,
    target: &Arc<VariableTable>,
) -> Result<RelationBatch> {
    let d = ctx.alpha.d;
    let chi = ctx.alpha.chi;
    let chi_t = match sign {
        Sign::Plus => chi + k * d as i64,
        Sign::Minus => -chi + k * d as i64,
    };
    let g = ctx.alpha.g() as i64;
    if chi_t < g {
        return Err(Error::RankCondition(format!(
            "need ±chi + kd >= g: got {chi_t} < {g} for (d,chi)=({d},{chi}), k={k}"
        )));
    }
    let twisted = DescCtx::new(ToppType::new(d, chi_t), ctx.dmax, ctx.space);
    let mut s = Polynomial::zero(target);
    for l in 1..=dtarget {
        let sl = if l % 2 == 1 { rat(1) } else { rat(-1) };
        let raw = td_ch(&twisted, l)?.map_table(&ctx.table)?;
        let transported = match sign {
            Sign::Plus => raw,
            Sign::Minus => psi2(&raw),
        };
        s.add_assign(&reduce(&transported)?.scale(&(sl * factorial(l - 1))));
    }
    let mut a = Polynomial::one(target);
    let mut term = Polynomial::one(target);
    for n in 1..=dtarget {
        term = term
            .mul_truncated(&s, dtarget)
            .scale(&(rat(1) / rat(n as i64)));
        if term.is_zero() {
            break;
        }
        a.add_assign(&term);
    }
    let mut relations = Vec::new();
    let lo = (chi_t + 1).max(1) as u32;
    for j in lo..=dtarget {
        let rel = a.graded_part(j);
        if !rel.is_zero() {
            relations.push(rel);
        }
    }
    let sgn = if sign == Sign::Plus { "+" } else { "-" };
    Ok(RelationBatch {
        family: Family::MR,
        provenance: format!("MR {sgn} k={k} j<={dtarget} on ({d},{chi})"),
        relations,
    })
}

/// Primitive Mumford relations: j = rank + 1 for every admissible (±, k)
/// whose rank chi~ satisfies g <= chi~ <= dtarget - 1.
pub fn primitive_mr(ctx: &DescCtx, dtarget: u32) -> Result<RelationBatch> {
    primitive_mr_mapped(ctx, dtarget, &|p| Ok(p.clone()), &ctx.table)
}

/// Primitive Mumford relations through a ring homomorphism; see
/// [`mumford_relations_mapped`].
pub fn primitive_mr_mapped(
    ctx: &DescCtx,
    dtarget: u32,
    reduce: &dyn Fn(&Polynomial) -> Result<Polynomial>,
    target: &Arc<VariableTable>,
) -> Result<RelationBatch> {
    let d = ctx.alpha.d as i64;
    let chi = ctx.alpha.chi;
    let g = ctx.alpha.g() as i64;
    let mut relations: Vec<Polynomial> = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let base = match sign {
            Sign::Plus => chi,
            Sign::Minus => -chi,
        };
        // k range so that g <= base + kd <= dtarget - 1
        let klo = (g - base).div_euclid(d) + i64::from((g - base).rem_euclid(d) != 0);
        let khi = (dtarget as i64 - 1 - base).div_euclid(d);
        for k in klo..=khi {
            let chi_t = base + k * d;
            let j = (chi_t + 1) as u32;
            let batch = mumford_relations_mapped(ctx, sign, k, j, reduce, target)?;
            for r in batch.relations {
                if !relations.contains(&r) {
                    relations.push(r);
                }
            }
        }
    }
    Ok(RelationBatch {
        family: Family::MR,
        provenance: format!("pMR j=rank+1<= {dtarget} on ({},{})", ctx.alpha.d, chi),
        relations,
    })
}

/// An element of the quadratic descendent algebra D_alpha (x) D_alpha',
/// stored as left polynomials keyed by right monomials, truncated so that
/// left degree + right degree <= dmax.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticElement {
    pub ltable: Arc<VariableTable>,
    pub rtable: Arc<VariableTable>,
    pub dmax: u32,
    terms: BTreeMap<Monomial, Polynomial>,
}

impl QuadraticElement {
    pub fn zero(lt: &Arc<VariableTable>, rt: &Arc<VariableTable>, dmax: u32) -> Self {
        QuadraticElement {
            ltable: lt.clone(),
            rtable: rt.clone(),
            dmax,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(lt: &Arc<VariableTable>, rt: &Arc<VariableTable>, dmax: u32) -> Self {
        let mut q = Self::zero(lt, rt, dmax);
        q.terms
            .insert(Monomial::one(rt.len()), Polynomial::one(lt));
        q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Polynomial)> {
        self.terms.iter()
    }

    fn insert(&mut self, m: Monomial, p: Polynomial) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(q) => {
                q.add_assign(&p);
                if q.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, p);
            }
        }
    }

    /// Add l (x) r, truncating past total degree dmax.
    pub fn add_tensor(&mut self, l: &Polynomial, r: &Polynomial) {
        for (m, c) in r.terms() {
            if m.degree() > self.dmax {
                continue;
            }
            let cap = self.dmax - m.degree();
            let mut part = Polynomial::zero(&self.ltable);
            for (ml, cl) in l.terms() {
                if ml.degree() <= cap {
                    part.add_assign(&Polynomial::from_term(&self.ltable, ml.clone(), cl.clone()));
                }
            }
            self.insert(m.clone(), part.scale(c));
        }
    }

    pub fn add_assign(&mut self, other: &QuadraticElement) {
        for (m, p) in &other.terms {
            self.insert(m.clone(), p.clone());
        }
    }

    pub fn scale(&self, c: &Rat) -> QuadraticElement {
        let mut out = self.clone();
        if c.is_zero() {
            out.terms.clear();
            return out;
        }
        for p in out.terms.values_mut() {
            *p = p.scale(c);
        }
        out
    }

    pub fn sub(&self, other: &QuadraticElement) -> QuadraticElement {
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.insert(m.clone(), p.neg());
        }
        out
    }

    pub fn mul(&self, other: &QuadraticElement) -> QuadraticElement {
        let mut out = Self::zero(&self.ltable, &self.rtable, self.dmax);
        for (m1, p1) in &self.terms {
            for (m2, p2) in &other.terms {
                let m = m1.mul(m2);
                if m.degree() > self.dmax {
                    continue;
                }
                let cap = self.dmax - m.degree();
                let prod = p1.mul_truncated(p2, cap);
                out.insert(m, prod);
            }
        }
        out
    }

    /// The part of total degree j (left + right), homogeneous on both sides.
    pub fn total_part(&self, j: u32) -> QuadraticElement {
        let mut out = Self::zero(&self.ltable, &self.rtable, self.dmax);
        for (m, p) in &self.terms {
            if m.degree() > j {
                continue;
            }
            out.insert(m.clone(), p.graded_part(j - m.degree()));
        }
        out
    }

    /// Drop all terms of total degree > cap.
    pub fn truncate_to(&self, cap: u32) -> QuadraticElement {
        let mut out = Self::zero(&self.ltable, &self.rtable, cap.min(self.dmax));
        for (m, p) in &self.terms {
            if m.degree() > cap {
                continue;
            }
            let bound = cap - m.degree();
            let mut keep = Polynomial::zero(&self.ltable);
            for (ml, cl) in p.terms() {
                if ml.degree() <= bound {
                    keep.add_assign(&Polynomial::from_term(&self.ltable, ml.clone(), cl.clone()));
                }
            }
            out.insert(m.clone(), keep);
        }
        out
    }

    /// Apply a linear operator to every left factor.
    pub fn map_left(&self, f: impl Fn(&Polynomial) -> Result<Polynomial>) -> Result<Self> {
        let mut out = Self::zero(&self.ltable, &self.rtable, self.dmax);
        for (m, p) in &self.terms {
            out.insert(m.clone(), f(p)?);
        }
        Ok(out)
    }

    /// Apply R_n to the right tensor factor.
    pub fn apply_rn_right(&self, vr: &Virasoro, n: i64) -> Result<Self> {
        let mut out = Self::zero(&self.ltable, &self.rtable, self.dmax + n.max(0) as u32);
        for (m, p) in &self.terms {
            let r = Polynomial::from_term(&self.rtable, m.clone(), rat(1));
            let img = vr.apply_rn(n, &r)?;
            for (m2, c2) in img.terms() {
                out.insert(m2.clone(), p.scale(c2));
            }
        }
        Ok(out)
    }

    pub fn apply_rn_left(&self, vl: &Virasoro, n: i64) -> Result<Self> {
        let mut out = self.map_left(|p| vl.apply_rn(n, p))?;
        out.dmax += n.max(0) as u32;
        Ok(out)
    }
}

/// exp of a quadratic element with no constant term.
fn qexp(s: &QuadraticElement) -> QuadraticElement {
    let mut out = QuadraticElement::one(&s.ltable, &s.rtable, s.dmax);
    let mut term = QuadraticElement::one(&s.ltable, &s.rtable, s.dmax);
    for n in 1..=s.dmax.max(1) {
        term = term.mul(s).scale(&(rat(1) / rat(n as i64)));
        if term.is_zero() {
            break;
        }
        out.add_assign(&term);
    }
    out
}

/// One tensor factor of a GMR computation: a working context plus a ring
/// homomorphism into the table the computation runs over (identity for the
/// plain full-table case, the rewrite reduction for generator rings).
pub struct GmrSide<'a> {
    pub ctx: &'a DescCtx,
    pub table: Arc<VariableTable>,
    pub map: &'a dyn Fn(&Polynomial) -> Result<Polynomial>,
    /// Quotient vanishes above this degree (completed rings); lets the sweep
    /// skip functionals past the socle without extending the ideal slices.
    pub top: Option<u32>,
}

fn identity_hom(p: &Polynomial) -> Result<Polynomial> {
    Ok(p.clone())
}

impl<'a> GmrSide<'a> {
    /// Side whose hom is the identity on the context table.
    pub fn plain(ctx: &'a DescCtx) -> Self {
        GmrSide { ctx, table: ctx.table.clone(), map: &identity_hom, top: None }
    }
}

/// The class C = exp(sum (-1)^{b+j_L}(a+b-1)! ch_a(H^{j_L}) (x) ch_b(H^{j_R}))
/// realized in the c-coordinates of both factors, truncated at total degree
/// `dmax`.
pub fn c_class(ctx_l: &DescCtx, ctx_r: &DescCtx, dmax: u32) -> Result<QuadraticElement> {
    c_class_in(&GmrSide::plain(ctx_l), &GmrSide::plain(ctx_r), dmax)
}

/// The class C with both tensor factors pushed through the side homs before
/// exponentiating; the homs are ring maps, so this commutes with exp.
pub fn c_class_in(left: &GmrSide, right: &GmrSide, dmax: u32) -> Result<QuadraticElement> {
    let mut s = QuadraticElement::zero(&left.table, &right.table, dmax);
    for total in 1..=dmax {
        for a in 0..=total {
            let b = total - a;
            // factors above a side's cutoff only feed terms the sweep drops;
            // skipping them keeps both presentations shallow
            if right.top.is_some_and(|t| b > t) || left.top.is_some_and(|t| a > t) {
                continue;
            }
            for (jl, jr, (num, den)) in KUNNETH {
                let sign = if (b + jl) % 2 == 0 { rat(1) } else { rat(-1) };
                let coeff = sign * factorial(total - 1) * frac(num, den);
                let l = (left.map)(&left.ctx.realize(a, jl)?)?.scale(&coeff);
                let r = (right.map)(&right.ctx.realize(b, jr)?)?;
                s.add_tensor(&l, &r);
            }
        }
    }
    Ok(qexp(&s))
}

/// The slope window chi'/d' < chi/d < chi'/d' + 3 required for GMR.
pub fn slope_window(alpha: ToppType, alpha_prime: ToppType) -> bool {
    let s = alpha.slope();
    let sp = alpha_prime.slope();
    sp < s && s < sp + rat(3)
}

/// All alpha' = (d', chi') preceding alpha in the order (d' < d, or d' = d
/// with smaller gcd) whose slope window admits GMR against alpha.
pub fn admissible_primes(alpha: ToppType) -> Vec<ToppType> {
    let mut out = Vec::new();
    for dp in 1..=alpha.d {
        // chi' ranges over the open interval (d' chi/d - 3d', d' chi/d)
        let lo = (rat(dp as i64) * alpha.slope() - rat(3 * dp as i64)).floor().to_integer();
        let hi = (rat(dp as i64) * alpha.slope()).ceil().to_integer();
        let (lo, hi): (i64, i64) = (
            lo.try_into().expect("chi' range"),
            hi.try_into().expect("chi' range"),
        );
        for chi_p in lo..=hi {
            let ap = ToppType::new(dp, chi_p);
            if !slope_window(alpha, ap) {
                continue;
            }
            let precedes =
                dp < alpha.d || (dp == alpha.d && ap.multiplicity() < alpha.multiplicity());
            if precedes {
                out.push(ap);
            }
        }
    }
    out
}

/// GMR sweep: realize the right factor of C_j in the given presentation of
/// the alpha' ring and emit one left relation per coordinate functional of
/// the quotient monomial basis. `dr_filter` restricts the functional degree.
fn gmr_sweep(
    left: &GmrSide,
    right: &GmrSide,
    ideal_prime: &GradedIdeal,
    j: u32,
    dtarget: u32,
    dr_filter: Option<u32>,
) -> Result<Vec<Polynomial>> {
    let alpha = left.ctx.alpha;
    let ap = right.ctx.alpha;
    debug_assert_eq!(ideal_prime.table, right.table);
    if !slope_window(alpha, ap) {
        return Err(Error::SlopeWindow(format!(
            "need chi'/d' < chi/d < chi'/d' + 3 for ({},{}) against ({},{})",
            ap.d, ap.chi, alpha.d, alpha.chi
        )));
    }
    let dd = alpha.d * ap.d;
    if j <= dd {
        return Err(Error::RankCondition(format!(
            "GMR needs j > dd' = {dd}, got j = {j}"
        )));
    }
    let dr_max = match right.top {
        Some(t) => t.min(j - 1),
        None => j - 1,
    };
    if dr_max > ideal_prime.dmax {
        return Err(Error::MissingPrerequisite(format!(
            "alpha' ring truncated at {} but functionals up to degree {} needed",
            ideal_prime.dmax, dr_max
        )));
    }
    let c = c_class_in(left, right, j)?;
    let cj = c.total_part(j);
    let mut acc: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
    for (m, p) in cj.terms() {
        let dr = m.degree();
        if dr > dr_max || dr >= j || j - dr > dtarget {
            continue;
        }
        if let Some(want) = dr_filter {
            if dr != want {
                continue;
            }
        }
        let nf = ideal_prime.normal_form(&Polynomial::from_term(&right.table, m.clone(), rat(1)))?;
        for (mu, cmu) in nf.terms() {
            let entry = acc
                .entry(mu.clone())
                .or_insert_with(|| Polynomial::zero(&left.table));
            entry.add_assign(&p.scale(cmu));
        }
    }
    Ok(acc.into_values().filter(|p| !p.is_zero()).collect())
}

/// Full GMR batch for a fixed Chern index j > dd'.
pub fn gmr_relations(
    ctx: &DescCtx,
    ctx_prime: &DescCtx,
    ideal_prime: &GradedIdeal,
    j: u32,
    dtarget: u32,
) -> Result<RelationBatch> {
    gmr_relations_in(&GmrSide::plain(ctx), &GmrSide::plain(ctx_prime), ideal_prime, j, dtarget)
}

/// Full GMR batch with explicit side homs; see [`GmrSide`].
pub fn gmr_relations_in(
    left: &GmrSide,
    right: &GmrSide,
    ideal_prime: &GradedIdeal,
    j: u32,
    dtarget: u32,
) -> Result<RelationBatch> {
    let relations = gmr_sweep(left, right, ideal_prime, j, dtarget, None)?;
    Ok(RelationBatch {
        family: Family::GMR,
        provenance: format!(
            "GMR alpha'=({},{}) j={j} on ({},{})",
            right.ctx.alpha.d, right.ctx.alpha.chi, left.ctx.alpha.d, left.ctx.alpha.chi
        ),
        relations,
    })
}

/// Primitive GMR: j = dd'+1 with every functional, plus j = dd'+2 paired
/// against functionals of homological degree dd'+2 (so the right monomial has
/// weighted degree (dd'+2)/2; absent when dd' is odd).
pub fn primitive_gmr(
    ctx: &DescCtx,
    ctx_prime: &DescCtx,
    ideal_prime: &GradedIdeal,
    dtarget: u32,
) -> Result<RelationBatch> {
    primitive_gmr_in(&GmrSide::plain(ctx), &GmrSide::plain(ctx_prime), ideal_prime, dtarget)
}

/// Primitive GMR with explicit side homs; see [`GmrSide`].
pub fn primitive_gmr_in(
    left: &GmrSide,
    right: &GmrSide,
    ideal_prime: &GradedIdeal,
    dtarget: u32,
) -> Result<RelationBatch> {
    let dd = left.ctx.alpha.d * right.ctx.alpha.d;
    let mut relations = gmr_sweep(left, right, ideal_prime, dd + 1, dtarget, None)?;
    if (dd + 2) % 2 == 0 {
        let extra = gmr_sweep(left, right, ideal_prime, dd + 2, dtarget, Some((dd + 2) / 2))?;
        relations.extend(extra);
    }
    Ok(RelationBatch {
        family: Family::GMR,
        provenance: format!(
            "pGMR alpha'=({},{}) on ({},{})",
            right.ctx.alpha.d, right.ctx.alpha.chi, left.ctx.alpha.d, left.ctx.alpha.chi
        ),
        relations,
    })
}

/// Base relations: all products ch_{i_1}(H^2) ... ch_{i_{b+1}}(H^2) with
/// i_t >= 1 and total degree <= dtarget; ch_i(H^2) = c_{i-1}(2).
pub fn base_relations(ctx: &DescCtx, dtarget: u32) -> Result<RelationBatch> {
    let b = ctx.alpha.b();
    let factors = b + 1;
    let vars: Vec<usize> = (0..ctx.table.len())
        .filter(|&i| {
            parse_ckj(&ctx.table.var(i).label)
                .map(|(_, j)| j == 2)
                .unwrap_or(false)
        })
        .collect();
    let mut relations = Vec::new();
    let mut exps = vec![0u32; vars.len()];
    fn rec(
        vars: &[usize],
        table: &Arc<VariableTable>,
        i: usize,
        left: u32,
        cap: u32,
        exps: &mut Vec<u32>,
        out: &mut Vec<Polynomial>,
    ) {
        if i == vars.len() {
            if left == 0 {
                let mut full = vec![0u32; table.len()];
                for (t, &v) in vars.iter().enumerate() {
                    full[v] = exps[t];
                }
                let m = Monomial::from_exps(table, full);
                if m.degree() <= cap {
                    out.push(Polynomial::from_term(table, m, rat(1)));
                }
            }
            return;
        }
        for e in 0..=left {
            exps[i] = e;
            rec(vars, table, i + 1, left - e, cap, exps, out);
        }
        exps[i] = 0;
    }
    rec(
        &vars,
        &ctx.table,
        0,
        factors,
        dtarget,
        &mut exps,
        &mut relations,
    );
    Ok(RelationBatch {
        family: Family::BR,
        provenance: format!("BR b+1={factors} on ({},{})", ctx.alpha.d, ctx.alpha.chi),
        relations,
    })
}

/// The primitive base relation c_0(2)^{b+1}.
pub fn primitive_br(ctx: &DescCtx) -> Result<Polynomial> {
    Ok(ctx.ckj(0, 2)?.pow(ctx.alpha.b() + 1))
}

/// Residual of the quadratic identity: del_n(C) minus the stated
/// multiplication element times C, compared through total degree `cap`.
pub fn quadratic_identity_check(
    vl: &Virasoro,
    vr: &Virasoro,
    n: u32,
    cap: u32,
) -> Result<QuadraticElement> {
    // one extra total degree so the id (x) R_{-1} summand is complete at cap
    let c = c_class(&vl.ctx, &vr.ctx, cap + n + 1)?;
    let mut lhs = c.apply_rn_left(vl, n as i64)?;
    for k in -1..=n as i64 {
        let coeff = binomial((n + 1) as u64, (k + 1) as u64);
        lhs.add_assign(&c.apply_rn_right(vr, k)?.scale(&coeff));
    }
    let mut mult = QuadraticElement::zero(&vl.ctx.table, &vr.ctx.table, cap + n);
    for a in 0..=n {
        for b in 0..=(n - a) {
            let coeff = factorial(a) * factorial(n - a) / factorial(n - a - b);
            for (jl, jr, (num, den)) in KUNNETH {
                let sign = if (jl + 1) % 2 == 0 { rat(1) } else { rat(-1) };
                let l = vl.ctx.realize(a, jl)?.scale(&(sign * coeff.clone() * frac(num, den)));
                let r = vr.ctx.realize(b, jr)?;
                mult.add_tensor(&l, &r);
            }
        }
    }
    let rhs = mult.mul(&c);
    Ok(lhs.sub(&rhs).truncate_to(cap))
}

/// Lemma: (a)_m = sum_{l=0}^m (-1)^l binom(m,l) (a+b-l)_{m-l} (b)_l.
pub fn falling_factorial_identity(a: &Rat, b: &Rat, m: u32) -> bool {
    let lhs = crate::rat::falling(a, m);
    let mut rhs = Rat::zero();
    for l in 0..=m {
        let sign = if l % 2 == 0 { rat(1) } else { rat(-1) };
        let term = sign
            * binomial(m as u64, l as u64)
            * crate::rat::falling(&(a.clone() + b.clone() - rat(l as i64)), m - l)
            * crate::rat::falling(b, l);
        rhs += term;
    }
    lhs == rhs
}
