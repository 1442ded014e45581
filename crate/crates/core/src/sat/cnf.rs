use std::fmt::Write as _;

use super::{ClauseSink, Lit, Var};

/// A CNF held in memory, with optional variable labels for dumps.
#[derive(Clone, Debug, Default)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    labels: Vec<(Var, String)>,
    record_labels: bool,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_labels() -> Self {
        Self {
            record_labels: true,
            ..Self::default()
        }
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn labels(&self) -> &[(Var, String)] {
        &self.labels
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// DIMACS text with a `c` comment per labeled variable.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (v, name) in &self.labels {
            let _ = writeln!(out, "c {} {}", v.index(), name);
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        write_clauses(&mut out, &self.clauses);
        out
    }
}

pub(crate) fn write_clauses(out: &mut String, clauses: &[Vec<Lit>]) {
    for c in clauses {
        for l in c {
            let _ = write!(out, "{} ", l.dimacs());
        }
        out.push_str("0\n");
    }
}

impl ClauseSink for CnfFormula {
    fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var::from_index(self.num_vars)
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert!(lits.iter().all(|l| l.var().index() <= self.num_vars));
        self.clauses.push(lits.to_vec());
    }

    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn wants_labels(&self) -> bool {
        self.record_labels
    }

    fn label(&mut self, var: Var, name: String) {
        if self.record_labels {
            self.labels.push((var, name));
        }
    }
}
