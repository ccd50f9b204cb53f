//! Variable tables: ordered sets of graded generators.
//!
//! Every polynomial refers to one shared table. The table order is the
//! significance order of the monomial order: variables sorted by
//! (degree ascending, Chern index ascending, label), with *later* entries more
//! significant. Degrees are in q-units, i.e. half the cohomological degree.

use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Var {
    pub label: String,
    /// Weighted degree in q-units; always >= 1.
    pub degree: u32,
    pub chern: u32,
}

#[derive(Debug)]
pub struct VariableTable {
    vars: Vec<Var>,
    by_label: HashMap<String, usize>,
}

impl PartialEq for VariableTable {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
    }
}
impl Eq for VariableTable {}

/// Canonical label of the normalized class c_k(j).
pub fn ckj_label(k: u32, j: u32) -> String {
    format!("c{k}({j})")
}

/// Parse a label of the form "c{k}({j})"; returns (k, j) when it matches.
pub fn parse_ckj(label: &str) -> Option<(u32, u32)> {
    let rest = label.strip_prefix('c')?;
    let open = rest.find('(')?;
    let k: u32 = rest[..open].parse().ok()?;
    let inner = rest[open + 1..].strip_suffix(')')?;
    let j: u32 = inner.parse().ok()?;
    Some((k, j))
}

/// Weighted degree of c_k(j) in q-units.
pub fn ckj_degree(k: u32, j: u32) -> u32 {
    k + j - 1
}

impl VariableTable {
    /// Build a table, sorting entries into the canonical significance order.
    pub fn new(mut vars: Vec<Var>) -> Arc<Self> {
        assert!(vars.iter().all(|v| v.degree >= 1), "variable degree must be >= 1");
        vars.sort_by(|a, b| {
            (a.degree, a.chern, &a.label).cmp(&(b.degree, b.chern, &b.label))
        });
        let mut by_label = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            let prev = by_label.insert(v.label.clone(), i);
            assert!(prev.is_none(), "duplicate variable label {}", v.label);
        }
        Arc::new(VariableTable { vars, by_label })
    }

    /// Table of one variable per label/degree pair, Chern index 0.
    pub fn simple(entries: &[(&str, u32)]) -> Arc<Self> {
        Self::new(
            entries
                .iter()
                .map(|(l, d)| Var { label: l.to_string(), degree: *d, chern: 0 })
                .collect(),
        )
    }

    /// All normalized classes of q-degree 1..=dmax.
    ///
    /// Degree D contributes c_{D+1}(0), c_D(1) and c_{D-1}(2); `keep_c11`
    /// controls whether the stack-only class c_1(1) is present.
    pub fn descendent_table(dmax: u32, keep_c11: bool) -> Arc<Self> {
        let mut vars = Vec::new();
        for deg in 1..=dmax {
            vars.push(Self::ckj_var(deg + 1, 0));
            if deg >= 2 || keep_c11 {
                vars.push(Self::ckj_var(deg, 1));
            }
            vars.push(Self::ckj_var(deg - 1, 2));
        }
        Self::new(vars)
    }

    /// Generator table of the stack ring of class d: the 3d classes
    /// c_{k+1}(0), c_k(1), c_{k-1}(2) for 1 <= k <= d.
    pub fn stack_generators(d: u32) -> Arc<Self> {
        Self::descendent_table(d, true)
    }

    /// Generator table of the space ring: the stack table without c_1(1).
    pub fn space_generators(d: u32) -> Arc<Self> {
        Self::descendent_table(d, false)
    }

    fn ckj_var(k: u32, j: u32) -> Var {
        Var { label: ckj_label(k, j), degree: ckj_degree(k, j), chern: k }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, i: usize) -> &Var {
        &self.vars[i]
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    /// Index of c_k(j) in this table, if present.
    pub fn index_of_ckj(&self, k: u32, j: u32) -> Option<usize> {
        self.index_of(&ckj_label(k, j))
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.vars.iter().map(|v| v.degree).collect()
    }
}
