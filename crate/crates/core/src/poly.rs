//! Sparse multivariate polynomials over exact rationals, graded by the
//! weighted degree of their variable table.
//!
//! The monomial order is graded reverse-lexicographic: higher weighted degree
//! first; within a degree, the first table position where two exponent vectors
//! differ decides, the *smaller* exponent winning. Later table variables are
//! thereby more significant, so e.g. c2(0) > c1(1) > c0(2) in degree one.

use crate::rat::{format_rat, parse_rat, Rat};
use crate::vars::VariableTable;
use crate::{Error, Result};
use num::traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial { exps: vec![0; n], degree: 0 }
    }

    pub fn var(table: &VariableTable, i: usize) -> Self {
        let mut exps = vec![0; table.len()];
        exps[i] = 1;
        Monomial { exps, degree: table.var(i).degree }
    }

    pub fn from_exps(table: &VariableTable, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), table.len());
        let degree = exps
            .iter()
            .zip(table.vars())
            .map(|(e, v)| e * v.degree)
            .sum();
        Monomial { exps, degree }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a + b)
            .collect();
        Monomial { exps, degree: self.degree + other.degree }
    }

    /// Total Chern weight: sum of exponent times the variable's Chern index.
    pub fn chern_weight(&self, table: &VariableTable) -> u32 {
        self.exps
            .iter()
            .zip(table.vars())
            .map(|(e, v)| e * v.chern)
            .sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree.cmp(&other.degree) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.exps.iter().zip(&other.exps) {
            if a != b {
                // revlex: smaller exponent at the least significant
                // differing position means the larger monomial
                return if a < b { Ordering::Greater } else { Ordering::Less };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of weighted degree `d`, largest first in the monomial order.
pub fn monomials_of_degree(table: &VariableTable, d: u32) -> Vec<Monomial> {
    let degrees = table.degrees();
    let mut out = Vec::new();
    let mut exps = vec![0u32; degrees.len()];
    fn rec(degrees: &[u32], i: usize, rem: u32, exps: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == degrees.len() {
            if rem == 0 {
                out.push(exps.clone());
            }
            return;
        }
        let maxe = rem / degrees[i];
        for e in 0..=maxe {
            exps[i] = e;
            rec(degrees, i + 1, rem - e * degrees[i], exps, out);
        }
        exps[i] = 0;
    }
    let mut raw = Vec::new();
    rec(&degrees, 0, d, &mut exps, &mut raw);
    for e in raw {
        out.push(Monomial { exps: e, degree: d });
    }
    out.sort_by(|a, b| b.cmp(a));
    out
}

#[derive(Debug, Clone)]
pub struct Polynomial {
    pub table: Arc<VariableTable>,
    terms: BTreeMap<Monomial, Rat>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        *self.table == *other.table && self.terms == other.terms
    }
}
impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(table: &Arc<VariableTable>) -> Self {
        Polynomial { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(table: &Arc<VariableTable>, c: Rat) -> Self {
        let mut p = Self::zero(table);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(table.len()), c);
        }
        p
    }

    pub fn one(table: &Arc<VariableTable>) -> Self {
        Self::constant(table, Rat::one())
    }

    pub fn var(table: &Arc<VariableTable>, i: usize) -> Self {
        let mut p = Self::zero(table);
        p.terms.insert(Monomial::var(table, i), Rat::one());
        p
    }

    pub fn var_by_label(table: &Arc<VariableTable>, label: &str) -> Option<Self> {
        table.index_of(label).map(|i| Self::var(table, i))
    }

    pub fn from_term(table: &Arc<VariableTable>, m: Monomial, c: Rat) -> Self {
        let mut p = Self::zero(table);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Leading (largest) term in the monomial order.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        debug_assert!(*self.table == *other.table);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Polynomial {
        if s.is_zero() {
            return Self::zero(&self.table);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s.clone();
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, s: &Rat) -> Polynomial {
        let mut out = Self::zero(&self.table);
        if s.is_zero() {
            return out;
        }
        for (mm, c) in &self.terms {
            out.terms.insert(mm.mul(m), c.clone() * s.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert!(*self.table == *other.table);
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m.mul(m2), c.clone() * c2.clone());
            }
        }
        out
    }

    /// Multiplication discarding all terms of weighted degree > `cap`.
    pub fn mul_truncated(&self, other: &Polynomial, cap: u32) -> Polynomial {
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            if m.degree() > cap {
                continue;
            }
            for (m2, c2) in &other.terms {
                if m.degree() + m2.degree() > cap {
                    continue;
                }
                out.add_term(m.mul(m2), c.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Self::one(&self.table);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Weighted degree if homogeneous (zero counts as degree 0), else None.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let d = match it.next() {
            None => return Some(0),
            Some(m) => m.degree(),
        };
        if it.all(|m| m.degree() == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn graded_parts(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Self::zero(&self.table))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn graded_part(&self, d: u32) -> Polynomial {
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            if m.degree() == d {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Algebra homomorphism determined by variable images over a target table.
    pub fn apply_map(
        &self,
        target: &Arc<VariableTable>,
        image: impl Fn(usize) -> Polynomial,
    ) -> Polynomial {
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&image(i).pow(e));
                }
            }
            out.add_assign(&term);
        }
        out
    }

    /// Re-express this polynomial over another table containing (at least)
    /// the same labels.
    pub fn map_table(&self, target: &Arc<VariableTable>) -> Result<Polynomial> {
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let label = &self.table.var(i).label;
                let j = target.index_of(label).ok_or_else(|| {
                    Error::Parse(format!("variable {label} missing from target table"))
                })?;
                exps[j] = e;
            }
            out.add_term(Monomial::from_exps(target, exps), c.clone());
        }
        Ok(out)
    }

    /// Substitute a polynomial for a single variable (same table).
    pub fn substitute(&self, var: usize, value: &Polynomial) -> Polynomial {
        let table = self.table.clone();
        self.apply_map(&table, |i| {
            if i == var {
                value.clone()
            } else {
                Polynomial::var(&table, i)
            }
        })
    }

    /// Derivation determined by variable images (Leibniz rule).
    pub fn apply_derivation(&self, image: impl Fn(usize) -> Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(&self.table);
        for (m, c) in &self.terms {
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = image(i);
                if img.is_zero() {
                    continue;
                }
                let mut exps = m.exps().to_vec();
                exps[i] -= 1;
                let rest = Monomial::from_exps(&self.table, exps);
                let coeff = c.clone() * crate::rat::rat(e as i64);
                out.add_assign(&img.mul_monomial(&rest, &coeff));
            }
        }
        out
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.table.len()))
    }

    /// Parse the canonical text form, e.g. "c2(0) - 1/8*c0(2)".
    pub fn parse(table: &Arc<VariableTable>, s: &str) -> Result<Polynomial> {
        let mut out = Polynomial::zero(table);
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(out);
        }
        // split into signed terms at top-level +/-
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0usize;
        let mut cur = String::new();
        let mut neg = false;
        let mut chars = s.chars().peekable();
        while let Some(ch) = chars.next() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                }
                ')' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| Error::Parse(format!("unbalanced parens in {s}")))?;
                    cur.push(ch);
                }
                '+' | '-' if depth == 0 && !cur.trim().is_empty() => {
                    terms.push((neg, std::mem::take(&mut cur)));
                    neg = ch == '-';
                }
                '-' if depth == 0 && cur.trim().is_empty() => {
                    neg = !neg;
                }
                '+' if depth == 0 && cur.trim().is_empty() => {}
                _ => cur.push(ch),
            }
        }
        if !cur.trim().is_empty() {
            terms.push((neg, cur));
        }
        for (neg, t) in terms {
            let mut coeff = if neg { -Rat::one() } else { Rat::one() };
            let mut mono = Monomial::one(table.len());
            for factor in split_top_level(&t, '*') {
                let factor = factor.trim();
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {t}")));
                }
                if factor.chars().next().unwrap().is_ascii_digit() {
                    let c = parse_rat(factor)
                        .ok_or_else(|| Error::Parse(format!("bad coefficient {factor}")))?;
                    coeff *= c;
                } else {
                    let (label, exp) = match split_top_level(factor, '^').as_slice() {
                        [l] => (l.trim().to_string(), 1u32),
                        [l, e] => (
                            l.trim().to_string(),
                            e.trim()
                                .parse()
                                .map_err(|_| Error::Parse(format!("bad exponent in {factor}")))?,
                        ),
                        _ => return Err(Error::Parse(format!("bad factor {factor}"))),
                    };
                    let i = table
                        .index_of(&label)
                        .ok_or_else(|| Error::Parse(format!("unknown variable {label}")))?;
                    for _ in 0..exp {
                        mono = mono.mul(&Monomial::var(table, i));
                    }
                }
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            c if c == sep && depth == 0 => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

impl fmt::Display for Polynomial {
    /// Canonical text form: terms largest-first, coefficients as "num/den",
    /// variables within a monomial in table order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c < &Rat::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_one() {
                parts.push(format_rat(&mag));
            }
            for (i, &e) in m.exps().iter().enumerate() {
                let label = &self.table.var(i).label;
                match e {
                    0 => {}
                    1 => parts.push(label.clone()),
                    _ => parts.push(format!("{label}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
