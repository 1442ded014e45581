use std::time::Instant;

use super::{unit_propagate, ClauseSink, CnfFormula, Lit, Propagation, SatEngine, SolveResult, Var};
use crate::error::{Error, Result};

struct Deadline(Option<Instant>);

impl cadical::Callbacks for Deadline {
    fn terminate(&mut self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

/// [`SatEngine`] backed by CaDiCaL.
///
/// When recording is enabled the engine keeps a copy of every clause, which
/// backs [`SatEngine::propagate_only`] and DIMACS dumps.
pub struct CadicalEngine {
    solver: cadical::Solver<Deadline>,
    num_vars: usize,
    reserved: usize,
    record: Option<CnfFormula>,
}

impl Default for CadicalEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl CadicalEngine {
    pub fn new() -> Self {
        let mut solver = cadical::Solver::new();
        solver.set_callbacks(Some(Deadline(None)));
        Self {
            solver,
            num_vars: 0,
            reserved: 0,
            record: None,
        }
    }

    pub fn recording() -> Self {
        let mut engine = Self::new();
        engine.record = Some(CnfFormula::with_labels());
        engine
    }

    pub fn is_recording(&self) -> bool {
        self.record.is_some()
    }

    pub fn recorded(&self) -> Option<&CnfFormula> {
        self.record.as_ref()
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        if let Some(cb) = self.solver.get_callbacks() {
            cb.0 = deadline;
        }
    }

    pub fn num_clauses(&self) -> usize {
        self.solver.num_clauses()
    }
}

impl ClauseSink for CadicalEngine {
    fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        if let Some(r) = self.record.as_mut() {
            r.new_var();
        }
        Var::from_index(self.num_vars)
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert!(lits.iter().all(|l| l.var().index() <= self.num_vars));
        self.solver.add_clause(lits.iter().map(|l| l.dimacs()));
        if let Some(r) = self.record.as_mut() {
            r.add_clause(lits);
        }
    }

    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn wants_labels(&self) -> bool {
        self.record.is_some()
    }

    fn label(&mut self, var: Var, name: String) {
        if let Some(r) = self.record.as_mut() {
            r.label(var, name);
        }
    }
}

impl SatEngine for CadicalEngine {
    fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        if self.reserved < self.num_vars {
            self.solver.reserve(self.num_vars as i32);
            self.reserved = self.num_vars;
        }
        match self.solver.solve_with(assumptions.iter().map(|l| l.dimacs())) {
            Some(true) => SolveResult::Sat,
            Some(false) => SolveResult::Unsat,
            None => SolveResult::Interrupted,
        }
    }

    fn model_value(&self, var: Var) -> bool {
        self.solver.value(var.index() as i32).unwrap_or(false)
    }

    fn propagate_only(&mut self, assumptions: &[Lit]) -> Result<Propagation> {
        let record = self.record.as_ref().ok_or_else(|| {
            Error::Engine("propagation needs an engine created with `recording()`".into())
        })?;
        Ok(unit_propagate(record, assumptions))
    }
}
