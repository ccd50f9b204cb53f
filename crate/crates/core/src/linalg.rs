//! Exact degreewise linear algebra: reduced row echelon bases of graded ideal
//! slices, normal forms and Hilbert functions. No Groebner machinery; every
//! slice is pure linear algebra over the monomials of its degree.

use crate::poly::{monomials_of_degree, Monomial, Polynomial};
use crate::rat::Rat;
use crate::vars::VariableTable;
use crate::{Error, Result};
use num::traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Reduce `p` against an inter-reduced monic row set indexed by leading
/// monomial. The result contains no pivot monomial.
fn reduce_against(mut p: Polynomial, pivots: &BTreeMap<Monomial, Polynomial>) -> Polynomial {
    loop {
        let hit = p
            .terms()
            .rev()
            .find(|(m, _)| pivots.contains_key(*m))
            .map(|(m, c)| (m.clone(), c.clone()));
        match hit {
            None => return p,
            Some((m, c)) => {
                let row = &pivots[&m];
                p = p.sub(&row.scale(&c));
            }
        }
    }
}

/// Reduced row-echelon basis of the span of homogeneous rows of one degree.
/// Returns rows monic, inter-reduced, sorted by leading monomial descending.
pub fn rref(rows: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let mut degree: Option<u32> = None;
    for r in rows {
        if r.is_zero() {
            continue;
        }
        match r.homogeneous_degree() {
            None => return Err(Error::Inhomogeneous(r.to_string())),
            Some(d) => match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => {
                    return Err(Error::Inhomogeneous(format!(
                        "mixed degrees {d0} and {d} in one slice"
                    )))
                }
                _ => {}
            },
        }
    }
    let mut pivots: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
    for r in rows {
        let red = reduce_against(r.clone(), &pivots);
        if red.is_zero() {
            continue;
        }
        let (lm, lc) = {
            let (m, c) = red.leading().unwrap();
            (m.clone(), c.clone())
        };
        let monic = red.scale(&(Rat::one() / lc));
        // eliminate the new pivot monomial from existing rows
        let keys: Vec<Monomial> = pivots.keys().cloned().collect();
        for k in keys {
            let row = &pivots[&k];
            let c = row.coeff(&lm);
            if !c.is_zero() {
                let newrow = row.sub(&monic.scale(&c));
                pivots.insert(k, newrow);
            }
        }
        pivots.insert(lm, monic);
    }
    Ok(pivots.into_values().rev().collect())
}

/// A graded ideal tracked degree by degree up to a truncation bound.
#[derive(Debug, Clone)]
pub struct GradedIdeal {
    pub table: Arc<VariableTable>,
    pub dmax: u32,
    generators: Vec<Polynomial>,
    /// slice D -> inter-reduced monic echelon basis of the ideal in degree D
    slices: BTreeMap<u32, Vec<Polynomial>>,
    /// slice D -> pivot map for fast reduction
    pivot_maps: BTreeMap<u32, BTreeMap<Monomial, Polynomial>>,
}

impl GradedIdeal {
    pub fn new(table: &Arc<VariableTable>, dmax: u32) -> Self {
        let mut g = GradedIdeal {
            table: table.clone(),
            dmax,
            generators: Vec::new(),
            slices: BTreeMap::new(),
            pivot_maps: BTreeMap::new(),
        };
        for d in 0..=dmax {
            g.slices.insert(d, Vec::new());
            g.pivot_maps.insert(d, BTreeMap::new());
        }
        g
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    /// Add homogeneous generators and recompute all slices that can change.
    pub fn add_generators(&mut self, gens: &[Polynomial]) -> Result<()> {
        let mut min_changed = u32::MAX;
        for g in gens {
            if g.is_zero() {
                continue;
            }
            let d = g
                .homogeneous_degree()
                .ok_or_else(|| Error::Inhomogeneous(g.to_string()))?;
            min_changed = min_changed.min(d);
            self.generators.push(g.clone());
        }
        if min_changed == u32::MAX {
            return Ok(());
        }
        for d in min_changed..=self.dmax {
            self.compute_slice(d)?;
        }
        Ok(())
    }

    /// Slice D = span of degree-D generators plus the variable multiples of
    /// slice (D - deg x_i), echelonized.
    fn compute_slice(&mut self, d: u32) -> Result<()> {
        let mut rows: Vec<Polynomial> = self
            .generators
            .iter()
            .filter(|g| g.homogeneous_degree() == Some(d))
            .cloned()
            .collect();
        for (i, v) in self.table.vars().iter().enumerate() {
            if v.degree > d {
                continue;
            }
            let lower = &self.slices[&(d - v.degree)];
            let xm = Monomial::var(&self.table, i);
            for row in lower {
                rows.push(row.mul_monomial(&xm, &Rat::one()));
            }
        }
        let basis = rref(&rows)?;
        let mut pmap = BTreeMap::new();
        for b in &basis {
            pmap.insert(b.leading().unwrap().0.clone(), b.clone());
        }
        self.slices.insert(d, basis);
        self.pivot_maps.insert(d, pmap);
        Ok(())
    }

    pub fn slice(&self, d: u32) -> &[Polynomial] {
        self.slices.get(&d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn rank(&self, d: u32) -> usize {
        self.slice(d).len()
    }

    /// Canonical representative of p modulo the ideal (graded part by part).
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial> {
        let mut out = Polynomial::zero(&self.table);
        for (d, part) in p.graded_parts() {
            if d > self.dmax {
                return Err(Error::DegreeOverflow(d, self.dmax));
            }
            out.add_assign(&reduce_against(part, &self.pivot_maps[&d]));
        }
        Ok(out)
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Quotient dimensions per degree 0..=dmax.
    pub fn hilbert(&self) -> Vec<usize> {
        (0..=self.dmax)
            .map(|d| monomials_of_degree(&self.table, d).len() - self.rank(d))
            .collect()
    }

    /// Monomials of degree d that are not pivot monomials: a basis of the
    /// quotient in that degree.
    pub fn quotient_basis(&self, d: u32) -> Vec<Monomial> {
        let pmap = &self.pivot_maps[&d];
        monomials_of_degree(&self.table, d)
            .into_iter()
            .filter(|m| !pmap.contains_key(m))
            .collect()
    }
}

/// Basis of the left kernel of the matrix with the given rows: all rational
/// vectors v with sum_i v_i rows[i] = 0. Plain Gaussian elimination with a
/// bookkeeping block.
pub fn left_kernel(rows: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = rows.len();
    if n == 0 {
        return Vec::new();
    }
    let m = rows[0].len();
    // work rows: [row | e_i]
    let mut work: Vec<Vec<Rat>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut w = r.clone();
            w.resize(m + n, Rat::zero());
            w[m + i] = Rat::one();
            w
        })
        .collect();
    let mut kernel = Vec::new();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row index in `done`, col)
    let mut done: Vec<Vec<Rat>> = Vec::new();
    for mut w in work.drain(..) {
        for &(ri, c) in &pivots {
            let f = w[c].clone();
            if !f.is_zero() {
                let pr = done[ri].clone();
                for k in 0..m + n {
                    w[k] -= f.clone() * pr[k].clone();
                }
            }
        }
        match (0..m).find(|&c| !w[c].is_zero()) {
            Some(c) => {
                let inv = Rat::one() / w[c].clone();
                for k in 0..m + n {
                    w[k] *= inv.clone();
                }
                pivots.push((done.len(), c));
                done.push(w);
            }
            None => kernel.push(w[m..].to_vec()),
        }
    }
    kernel
}

/// Coefficients of Prod_i 1/(1 - q^{deg_i}) through q^dmax: the Hilbert
/// function of the free graded ring. Independent series-expansion oracle.
pub fn free_hilbert(degrees: &[u32], dmax: u32) -> Vec<u64> {
    let n = dmax as usize + 1;
    let mut out = vec![0u64; n];
    out[0] = 1;
    for &d in degrees {
        let d = d as usize;
        // multiply by 1/(1-q^d): prefix recurrence
        for i in d..n {
            out[i] += out[i - d];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::monomials_of_degree;

    #[test]
    fn rref_spec_examples() {
        let t = VariableTable::simple(&[("x", 1), ("y", 1)]);
        let r1 = Polynomial::parse(&t, "x - 2*y").unwrap();
        let r2 = Polynomial::parse(&t, "2*x - 4*y").unwrap();
        let basis = rref(&[r1.clone(), r2]).unwrap();
        assert_eq!(basis.len(), 1);
        // same span: the input rows reduce to zero against the basis
        let c = r1.coeff(basis[0].leading().unwrap().0);
        assert!(r1.sub(&basis[0].scale(&c)).is_zero());
        assert!(rref(&[]).unwrap().is_empty());
        // projection property
        let again = rref(&basis).unwrap();
        assert_eq!(again, basis);
    }

    #[test]
    fn rref_rejects_inhomogeneous() {
        let t = VariableTable::simple(&[("x", 1), ("y", 2)]);
        let bad = Polynomial::parse(&t, "x + y").unwrap();
        assert!(rref(&[bad]).is_err());
    }

    #[test]
    fn m20_degree2_slice_rank() {
        // all monomial multiples of r1 in degree 2 of the (2,0) stack ring:
        // rank 4, quotient dim 9 - 4 = 5
        let t = VariableTable::stack_generators(2);
        let r1 = Polynomial::parse(&t, "c2(0) - 1/8*c0(2)").unwrap();
        let mut ideal = GradedIdeal::new(&t, 6);
        ideal.add_generators(&[r1]).unwrap();
        assert_eq!(ideal.rank(2), 3);
        let h = ideal.hilbert();
        assert_eq!(h, vec![1, 2, 6, 10, 20, 30, 50]);
    }

    #[test]
    fn free_ring_hilbert_matches_series() {
        let t = VariableTable::stack_generators(2);
        let ideal = GradedIdeal::new(&t, 6);
        let h = ideal.hilbert();
        assert_eq!(h, vec![1, 3, 9, 19, 39, 69, 119]);
        let oracle = free_hilbert(&t.degrees(), 6);
        assert_eq!(h.iter().map(|&x| x as u64).collect::<Vec<_>>(), oracle);
    }

    #[test]
    fn cube_relation_slice() {
        // ideal <(a+b)^3> in QQ[a,b], slice at degree 4 has dimension 2
        let t = VariableTable::simple(&[("a", 1), ("b", 1)]);
        let g = Polynomial::parse(&t, "a + b").unwrap().pow(3);
        let mut ideal = GradedIdeal::new(&t, 6);
        ideal.add_generators(&[g.clone()]).unwrap();
        assert_eq!(ideal.rank(3), 1);
        assert_eq!(ideal.rank(4), 2);
        assert!(ideal.contains(&g.mul(&g)).unwrap());
        let nf = ideal
            .normal_form(&Polynomial::parse(&t, "a^3").unwrap())
            .unwrap();
        assert!(!nf.is_zero());
        // normal form is linear and idempotent
        let nf2 = ideal.normal_form(&nf).unwrap();
        assert_eq!(nf, nf2);
    }

    #[test]
    fn normal_form_difference_in_ideal() {
        let t = VariableTable::stack_generators(2);
        let r1 = Polynomial::parse(&t, "c2(0) - 1/8*c0(2)").unwrap();
        let mut ideal = GradedIdeal::new(&t, 8);
        ideal.add_generators(&[r1]).unwrap();
        let p = Polynomial::parse(&t, "c2(0)^3 + c0(2)*c1(1)^2").unwrap();
        let nf = ideal.normal_form(&p).unwrap();
        assert!(ideal.contains(&p.sub(&nf)).unwrap());
        // modulo <c0(2) - 2 c2(0)> the pivot is the higher-Chern class c2(0),
        // so c0(2) is its own normal form and c2(0) reduces to c0(2)/2
        let mut ideal2 = GradedIdeal::new(&t, 4);
        ideal2
            .add_generators(&[Polynomial::parse(&t, "c0(2) - 2*c2(0)").unwrap()])
            .unwrap();
        let nf = ideal2
            .normal_form(&Polynomial::parse(&t, "c2(0)").unwrap())
            .unwrap();
        assert_eq!(nf, Polynomial::parse(&t, "1/2*c0(2)").unwrap());
    }

    #[test]
    fn monomial_count_equals_series_coefficient() {
        let t = VariableTable::stack_generators(3);
        let oracle = free_hilbert(&t.degrees(), 8);
        for d in 0..=8u32 {
            assert_eq!(monomials_of_degree(&t, d).len() as u64, oracle[d as usize]);
        }
    }
}
