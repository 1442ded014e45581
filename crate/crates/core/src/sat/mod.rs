//! Incremental satisfiability contract used by every encoder.

mod cadical_engine;
mod cnf;
mod propagate;

use std::fmt;
use std::ops::Neg;

pub use cadical_engine::CadicalEngine;
pub use cnf::CnfFormula;
pub use propagate::{unit_propagate, Propagation};

use crate::error::Result;

/// 1-based variable index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn from_index(index: usize) -> Self {
        assert!(index >= 1 && index < i32::MAX as usize);
        Var(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }

    pub fn lit(self, polarity: bool) -> Lit {
        if polarity {
            self.pos()
        } else {
            self.neg()
        }
    }
}

/// DIMACS-style signed literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(value: i32) -> Self {
        assert!(value != 0 && value != i32::MIN);
        Lit(value)
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl Neg for Lit {
    type Output = Lit;

    fn neg(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Anything clauses can be written into: a live engine or a plain formula.
pub trait ClauseSink {
    fn new_var(&mut self) -> Var;

    fn add_clause(&mut self, lits: &[Lit]);

    fn num_vars(&self) -> usize;

    /// Whether [`ClauseSink::label`] is recorded; encoders skip building
    /// names otherwise.
    fn wants_labels(&self) -> bool {
        false
    }

    fn label(&mut self, _var: Var, _name: String) {}

    fn new_labeled(&mut self, name: impl FnOnce() -> String) -> Var
    where
        Self: Sized,
    {
        let v = self.new_var();
        if self.wants_labels() {
            self.label(v, name());
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// Stopped by the deadline before an answer was reached.
    Interrupted,
}

pub trait SatEngine: ClauseSink {
    /// Solves under per-call assumptions; clauses persist across calls.
    fn solve(&mut self, assumptions: &[Lit]) -> SolveResult;

    /// Value of `var` in the last model.
    fn model_value(&self, var: Var) -> bool;

    fn lit_value(&self, lit: Lit) -> bool {
        self.model_value(lit.var()) == lit.is_positive()
    }

    /// Unit propagation alone, no decisions, from the assumptions.
    fn propagate_only(&mut self, assumptions: &[Lit]) -> Result<Propagation>;
}
