use std::time::Instant;

use crate::bn::{BooleanNetwork, Configuration, PartialAssignment};
use crate::encoding::{
    encode_containment, encode_marker_on_cube, encode_ts_circuit_with, new_inputs, EncodeOptions,
    FunctionSpec, PerturbationVars, SequentialCounter,
};
use crate::error::{Error, Result};
use crate::sat::{CadicalEngine, ClauseSink, Lit, SatEngine, SolveResult};
use crate::trapspace::TrapSpaceSearch;

use super::counterexample::{find_counter_example, search_restricted};
use super::stats::{CegarStats, Status};
use super::{RefinementVariant, ReprogrammingOptions};

/// Candidate formula and counter-example search for one reprogramming
/// instance. Refinements persist across bounds and solutions.
pub struct ReprogrammingSolver {
    network: BooleanNetwork,
    marker: PartialAssignment,
    options: ReprogrammingOptions,
    engine: CadicalEngine,
    clamps: PerturbationVars,
    counter: SequentialCounter,
    ce: TrapSpaceSearch,
    ce_log: Vec<Configuration>,
    stats: CegarStats,
    deadline: Option<Instant>,
    max_k: usize,
}

#[derive(Clone, Debug)]
pub struct ReprogrammingOutcome {
    pub status: Status,
    /// Subset-minimal solutions in discovery order; a lower bound on timeout.
    pub solutions: Vec<PartialAssignment>,
    pub stats: CegarStats,
    pub counter_examples: Vec<Configuration>,
}

impl ReprogrammingSolver {
    pub fn new(
        network: &BooleanNetwork,
        marker: &PartialAssignment,
        k: usize,
        options: &ReprogrammingOptions,
    ) -> Result<Self> {
        Self::with_engine(network, marker, k, options, CadicalEngine::new())
    }

    /// As [`ReprogrammingSolver::new`], recording clauses for dumps.
    pub fn recording(
        network: &BooleanNetwork,
        marker: &PartialAssignment,
        k: usize,
        options: &ReprogrammingOptions,
    ) -> Result<Self> {
        Self::with_engine(network, marker, k, options, CadicalEngine::recording())
    }

    fn with_engine(
        network: &BooleanNetwork,
        marker: &PartialAssignment,
        k: usize,
        options: &ReprogrammingOptions,
        mut engine: CadicalEngine,
    ) -> Result<Self> {
        let n = network.len();
        if k > n {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds the {n} components")));
        }
        if let Some(i) = marker.max_key().filter(|&i| i >= n) {
            return Err(Error::Dimension { expected: n, found: i + 1 });
        }
        let controllable = options.controllable(n, marker);
        let clamps = PerturbationVars::new(&mut engine, network, &controllable);
        for c in clamps.clamps().iter().flatten() {
            engine.add_clause(&[c.clamped.pos(), c.value.neg()]);
        }
        let spec = FunctionSpec::Perturbable(network, &clamps);
        let w = new_inputs(&mut engine, n, "w");
        let circuit = encode_ts_circuit_with(&mut engine, spec, &w, &EncodeOptions::tagged("tsw"));
        encode_marker_on_cube(&mut engine, circuit.output(), marker);
        let clamped: Vec<Lit> = clamps.clamped_vars().iter().map(|v| v.pos()).collect();
        let counter = SequentialCounter::new(&mut engine, &clamped, k);

        let mut ce = TrapSpaceSearch::perturbable(network, &controllable);
        ce.exclude_marker_matches(marker);
        let deadline = options.timeout.map(|t| Instant::now() + t);
        engine.set_deadline(deadline);
        ce.set_deadline(deadline);
        Ok(Self {
            network: network.clone(),
            marker: marker.clone(),
            options: options.clone(),
            engine,
            clamps,
            counter,
            ce,
            ce_log: Vec::new(),
            stats: CegarStats::default(),
            deadline,
            max_k: k,
        })
    }

    pub fn stats(&self) -> &CegarStats {
        &self.stats
    }

    pub fn counter_examples(&self) -> &[Configuration] {
        &self.ce_log
    }

    pub fn engine(&self) -> &CadicalEngine {
        &self.engine
    }

    fn check_deadline(&self) -> Result<()> {
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            Err(Error::Timeout)
        } else {
            Ok(())
        }
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool> {
        self.check_deadline()?;
        self.stats.candidate_solves += 1;
        let start = Instant::now();
        let r = self.engine.solve(assumptions);
        CegarStats::add_time(&mut self.stats.time_ms.candidate, start.elapsed());
        match r {
            SolveResult::Sat => Ok(true),
            SolveResult::Unsat => Ok(false),
            SolveResult::Interrupted => Err(Error::Timeout),
        }
    }

    /// A candidate perturbation of size at most `bound`.
    pub fn candidate(&mut self, bound: usize) -> Result<Option<PartialAssignment>> {
        let bound = bound.min(self.max_k);
        let assumptions: Vec<Lit> = self.counter.at_most(bound).into_iter().collect();
        if !self.solve(&assumptions)? {
            return Ok(None);
        }
        let p = self.clamps.decode(&self.engine);
        debug_assert!(p.len() <= bound);
        Ok(Some(p))
    }

    /// Whether `p` still satisfies the candidate formula.
    pub fn is_feasible(&mut self, p: &PartialAssignment) -> Result<bool> {
        let Some(assumptions) = self.clamps.assumptions_for(p) else {
            return Ok(false);
        };
        if p.len() > self.max_k {
            return Ok(false);
        }
        self.solve(&assumptions)
    }

    /// A configuration outside the marker in a minimal trap space of `f/p`.
    pub fn counter_example(&mut self, p: &PartialAssignment) -> Result<Option<Configuration>> {
        let start = Instant::now();
        let before = self.ce.stats();
        self.ce.set_perturbation(p)?;
        let r = search_restricted(&mut self.ce, &self.marker);
        let after = self.ce.stats();
        self.stats.ce_solves += (after.search_solves - before.search_solves)
            + (after.witness_solves - before.witness_solves);
        CegarStats::add_time(&mut self.stats.time_ms.counter_example, start.elapsed());
        let x = r?;
        if let Some(x) = &x {
            self.ce_log.push(x.clone());
            self.stats.counter_examples += 1;
        }
        Ok(x)
    }

    /// Removes `rejected` from the candidate formula using `x`.
    pub fn refine(&mut self, rejected: &PartialAssignment, x: &Configuration) -> Result<()> {
        if self.stats.refinements as usize >= self.options.refinement_cap {
            return Err(Error::RefinementCap(self.options.refinement_cap));
        }
        let start = Instant::now();
        self.stats.refinements += 1;
        let r = self.stats.refinements;
        match self.options.variant {
            RefinementVariant::V0 => {
                let clause = self.exact_block(rejected);
                self.engine.add_clause(&clause);
            }
            variant => {
                let n = self.network.len();
                let spec = FunctionSpec::Perturbable(&self.network, &self.clamps);
                let xin = new_inputs(&mut self.engine, n, &format!("cex{r}"));
                for (i, &l) in xin.iter().enumerate() {
                    self.engine.add_clause(&[if x.get(i) { l } else { -l }]);
                }
                let outer = encode_ts_circuit_with(&mut self.engine, spec, &xin, &EncodeOptions::tagged(format!("tsx{r}")));
                let yin = new_inputs(&mut self.engine, n, &format!("y{r}"));
                let inner = encode_ts_circuit_with(&mut self.engine, spec, &yin, &EncodeOptions::tagged(format!("tsy{r}")));
                // y ∈ TS(x̂) follows from TS(y) ⊆ TS(x̂)
                encode_containment(&mut self.engine, outer.output(), inner.output(), true);
                if variant == RefinementVariant::V2 {
                    encode_marker_on_cube(&mut self.engine, inner.output(), &self.marker);
                }
            }
        }
        CegarStats::add_time(&mut self.stats.time_ms.refine, start.elapsed());
        Ok(())
    }

    /// Clause excluding exactly `p` (clamps are canonical when unset).
    fn exact_block(&self, p: &PartialAssignment) -> Vec<Lit> {
        let mut clause = Vec::new();
        for (i, c) in self.clamps.clamps().iter().enumerate() {
            let Some(c) = c else { continue };
            match p.get(i) {
                Some(b) => {
                    clause.push(c.clamped.neg());
                    clause.push(c.value.lit(!b));
                }
                None => clause.push(c.clamped.pos()),
            }
        }
        clause
    }

    /// Excludes `p` and every perturbation extending it.
    pub fn block_supersets(&mut self, p: &PartialAssignment) {
        let mut clause = Vec::new();
        for (i, b) in p.iter() {
            let c = self.clamps.clamp(i).expect("solutions only clamp controllable components");
            clause.push(c.clamped.neg());
            clause.push(c.value.lit(!b));
        }
        self.engine.add_clause(&clause);
    }

    /// Independent check on the concrete network `f/p`.
    pub fn verify(&mut self, p: &PartialAssignment) -> Result<bool> {
        let start = Instant::now();
        let ok = p.len() <= self.max_k
            && self.clamps.assumptions_for(p).is_some()
            && find_counter_example(&self.network.perturbed(p), &self.marker)?.is_none();
        CegarStats::add_time(&mut self.stats.time_ms.verify, start.elapsed());
        Ok(ok)
    }

    /// Subset-minimal solutions by increasing size, up to `limit` of them.
    pub fn run(mut self, limit: Option<usize>) -> Result<ReprogrammingOutcome> {
        let mut solutions = Vec::new();
        let status = match self.enumerate_into(&mut solutions, limit) {
            Ok(()) if solutions.is_empty() => Status::Unsat,
            Ok(()) => Status::Sat,
            Err(Error::Timeout) => Status::Timeout,
            Err(e) => return Err(e),
        };
        Ok(ReprogrammingOutcome {
            status,
            solutions,
            stats: self.stats,
            counter_examples: self.ce_log,
        })
    }

    fn enumerate_into(&mut self, out: &mut Vec<PartialAssignment>, limit: Option<usize>) -> Result<()> {
        for bound in 0..=self.max_k {
            loop {
                if limit.is_some_and(|l| out.len() >= l) {
                    return Ok(());
                }
                let Some(p) = self.candidate(bound)? else { break };
                match self.counter_example(&p)? {
                    Some(x) => self.refine(&p, &x)?,
                    None => {
                        if !self.verify(&p)? {
                            return Err(Error::Engine(format!(
                                "candidate {:?} failed concrete verification",
                                p.to_json_value(self.network.names())
                            )));
                        }
                        self.block_supersets(&p);
                        out.push(p);
                    }
                }
            }
        }
        Ok(())
    }
}

/// First subset-minimal solution of smallest size.
pub fn solve_reprogramming(
    f: &BooleanNetwork,
    marker: &PartialAssignment,
    k: usize,
    options: &ReprogrammingOptions,
) -> Result<ReprogrammingOutcome> {
    ReprogrammingSolver::new(f, marker, k, options)?.run(Some(1))
}

/// Every subset-minimal solution of size at most `k`.
pub fn enumerate_reprogramming(
    f: &BooleanNetwork,
    marker: &PartialAssignment,
    k: usize,
    options: &ReprogrammingOptions,
) -> Result<ReprogrammingOutcome> {
    ReprogrammingSolver::new(f, marker, k, options)?.run(None)
}
