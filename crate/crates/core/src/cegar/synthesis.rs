use std::time::{Duration, Instant};

use crate::bn::{BooleanNetwork, Configuration, InfluenceGraph, PartialAssignment};
use crate::encoding::{
    encode_containment, encode_marker_on_cube, encode_synth_structure, encode_ts_circuit_with, new_inputs,
    EncodeOptions, FunctionSpec, SynthesisMode, SynthesisVars, DEFAULT_CLAUSE_BUDGET,
};
use crate::error::{Error, Result};
use crate::sat::{CadicalEngine, ClauseSink, SatEngine, SolveResult};

use super::counterexample::find_counter_example;
use super::stats::{CegarStats, Status};
use super::{RefinementVariant, DEFAULT_REFINEMENT_CAP};

#[derive(Clone, Debug)]
pub struct SynthesisOptions {
    pub mode: SynthesisMode,
    pub clause_budget: usize,
    pub variant: RefinementVariant,
    pub timeout: Option<Duration>,
    pub refinement_cap: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            mode: SynthesisMode::Exact,
            clause_budget: DEFAULT_CLAUSE_BUDGET,
            variant: RefinementVariant::default(),
            timeout: None,
            refinement_cap: DEFAULT_REFINEMENT_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisOutcome {
    pub status: Status,
    pub network: Option<BooleanNetwork>,
    pub stats: CegarStats,
    pub counter_examples: Vec<Configuration>,
}

pub struct SynthesisSolver {
    marker: PartialAssignment,
    options: SynthesisOptions,
    engine: CadicalEngine,
    vars: SynthesisVars,
    ce_log: Vec<Configuration>,
    stats: CegarStats,
    deadline: Option<Instant>,
}

impl SynthesisSolver {
    pub fn new(graph: &InfluenceGraph, marker: &PartialAssignment, options: &SynthesisOptions) -> Result<Self> {
        Self::with_engine(graph, marker, options, CadicalEngine::new())
    }

    pub fn recording(graph: &InfluenceGraph, marker: &PartialAssignment, options: &SynthesisOptions) -> Result<Self> {
        Self::with_engine(graph, marker, options, CadicalEngine::recording())
    }

    fn with_engine(
        graph: &InfluenceGraph,
        marker: &PartialAssignment,
        options: &SynthesisOptions,
        mut engine: CadicalEngine,
    ) -> Result<Self> {
        let n = graph.len();
        if let Some(i) = marker.max_key().filter(|&i| i >= n) {
            return Err(Error::Dimension { expected: n, found: i + 1 });
        }
        let vars = encode_synth_structure(&mut engine, graph, options.mode, options.clause_budget)?;
        let w = new_inputs(&mut engine, n, "w");
        let circuit = encode_ts_circuit_with(
            &mut engine,
            FunctionSpec::Synthesizable(&vars),
            &w,
            &EncodeOptions::tagged("tsw"),
        );
        encode_marker_on_cube(&mut engine, circuit.output(), marker);
        let deadline = options.timeout.map(|t| Instant::now() + t);
        engine.set_deadline(deadline);
        Ok(Self {
            marker: marker.clone(),
            options: options.clone(),
            engine,
            vars,
            ce_log: Vec::new(),
            stats: CegarStats::default(),
            deadline,
        })
    }

    pub fn stats(&self) -> &CegarStats {
        &self.stats
    }

    pub fn engine(&self) -> &CadicalEngine {
        &self.engine
    }

    pub fn candidate(&mut self) -> Result<Option<BooleanNetwork>> {
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::Timeout);
        }
        self.stats.candidate_solves += 1;
        let start = Instant::now();
        let r = self.engine.solve(&[]);
        CegarStats::add_time(&mut self.stats.time_ms.candidate, start.elapsed());
        match r {
            SolveResult::Sat => Ok(Some(self.vars.decode(&self.engine))),
            SolveResult::Unsat => Ok(None),
            SolveResult::Interrupted => Err(Error::Timeout),
        }
    }

    pub fn counter_example(&mut self, f: &BooleanNetwork) -> Result<Option<Configuration>> {
        let start = Instant::now();
        self.stats.ce_solves += 1;
        let x = find_counter_example(f, &self.marker)?;
        CegarStats::add_time(&mut self.stats.time_ms.counter_example, start.elapsed());
        if let Some(x) = &x {
            self.ce_log.push(x.clone());
            self.stats.counter_examples += 1;
        }
        Ok(x)
    }

    /// Refines after `x` refuted the candidate from the last model.
    pub fn refine(&mut self, x: &Configuration) -> Result<()> {
        if self.stats.refinements as usize >= self.options.refinement_cap {
            return Err(Error::RefinementCap(self.options.refinement_cap));
        }
        let start = Instant::now();
        self.stats.refinements += 1;
        let r = self.stats.refinements;
        match self.options.variant {
            RefinementVariant::V0 => {
                let clause = self.vars.blocking_clause(&self.engine);
                self.engine.add_clause(&clause);
            }
            variant => {
                let n = self.vars.len();
                let spec = FunctionSpec::Synthesizable(&self.vars);
                let xin = new_inputs(&mut self.engine, n, &format!("cex{r}"));
                for (i, &l) in xin.iter().enumerate() {
                    self.engine.add_clause(&[if x.get(i) { l } else { -l }]);
                }
                let outer =
                    encode_ts_circuit_with(&mut self.engine, spec, &xin, &EncodeOptions::tagged(format!("tsx{r}")));
                let yin = new_inputs(&mut self.engine, n, &format!("y{r}"));
                let inner =
                    encode_ts_circuit_with(&mut self.engine, spec, &yin, &EncodeOptions::tagged(format!("tsy{r}")));
                encode_containment(&mut self.engine, outer.output(), inner.output(), true);
                if variant == RefinementVariant::V2 {
                    encode_marker_on_cube(&mut self.engine, inner.output(), &self.marker);
                }
            }
        }
        CegarStats::add_time(&mut self.stats.time_ms.refine, start.elapsed());
        Ok(())
    }

    fn verify(&self, f: &BooleanNetwork) -> bool {
        let g = f.influence_graph();
        let graph = self.vars.graph();
        let shape = match self.options.mode {
            SynthesisMode::Exact => g.same_edges(graph),
            SynthesisMode::Subset => g.is_subgraph_of(graph),
        };
        shape && f.is_locally_monotone()
    }

    pub fn run(mut self) -> Result<SynthesisOutcome> {
        let result = self.cegar();
        let (status, network) = match result {
            Ok(Some(f)) => (Status::Sat, Some(f)),
            Ok(None) => (Status::Unsat, None),
            Err(Error::Timeout) => (Status::Timeout, None),
            Err(e) => return Err(e),
        };
        Ok(SynthesisOutcome {
            status,
            network,
            stats: self.stats,
            counter_examples: self.ce_log,
        })
    }

    fn cegar(&mut self) -> Result<Option<BooleanNetwork>> {
        while let Some(f) = self.candidate()? {
            match self.counter_example(&f)? {
                Some(x) => self.refine(&x)?,
                None => {
                    let start = Instant::now();
                    let ok = self.verify(&f);
                    CegarStats::add_time(&mut self.stats.time_ms.verify, start.elapsed());
                    if !ok {
                        return Err(Error::Engine("synthesized network violates the graph".into()));
                    }
                    return Ok(Some(f));
                }
            }
        }
        Ok(None)
    }
}

pub fn solve_synthesis(
    graph: &InfluenceGraph,
    marker: &PartialAssignment,
    options: &SynthesisOptions,
) -> Result<SynthesisOutcome> {
    SynthesisSolver::new(graph, marker, options)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::Sign;
    use crate::oracle::{all_mts_match, brute_synthesis};

    fn complete_positive(n: usize, self_loops: bool) -> InfluenceGraph {
        let mut g = InfluenceGraph::with_default_names(n);
        for i in 0..n {
            for j in 0..n {
                if i != j || self_loops {
                    g.add_edge(i, j, Sign::Positive);
                }
            }
        }
        g
    }

    #[test]
    fn complete_positive_graph() {
        let m: PartialAssignment = [(0, false)].into_iter().collect();
        for loops in [false, true] {
            let g = complete_positive(3, loops);
            for v in RefinementVariant::ALL {
                let options = SynthesisOptions {
                    variant: v,
                    ..SynthesisOptions::default()
                };
                let out = solve_synthesis(&g, &m, &options).unwrap();
                assert_eq!(out.status, Status::Unsat, "loops={loops} variant={v}");
                let free = solve_synthesis(&g, &PartialAssignment::new(), &options).unwrap();
                assert_eq!(free.status, Status::Sat);
            }
        }
    }

    #[test]
    fn chain() {
        let g = InfluenceGraph::parse("x1\nx1 -> x2 +").unwrap();
        let m: PartialAssignment = [(1, true)].into_iter().collect();
        let out = solve_synthesis(&g, &m, &SynthesisOptions::default()).unwrap();
        let f = out.network.unwrap();
        assert_eq!(f.function(0).as_constant(), Some(true));
        assert!(all_mts_match(&f, &m).unwrap());
    }

    #[test]
    fn agrees_with_oracle_on_small_graphs() {
        let graphs = [
            "a -> b +\nb -> a +\nb -> c -\nc -> c +",
            "a -> b -\nb -> a -\na -> c +\nb -> c +",
            "a -> a +\nb -> a -\nc -> b +\na -> c -",
        ];
        let markers: Vec<PartialAssignment> = vec![
            PartialAssignment::new(),
            [(0, true)].into_iter().collect(),
            [(2, false)].into_iter().collect(),
            [(0, true), (1, false)].into_iter().collect(),
        ];
        for text in graphs {
            let g = InfluenceGraph::parse(text).unwrap();
            for mode in [SynthesisMode::Exact, SynthesisMode::Subset] {
                for m in &markers {
                    let expected = brute_synthesis(&g, mode, 2, m).unwrap().is_some();
                    for v in RefinementVariant::ALL {
                        let options = SynthesisOptions {
                            mode,
                            clause_budget: 2,
                            variant: v,
                            ..SynthesisOptions::default()
                        };
                        let out = solve_synthesis(&g, m, &options).unwrap();
                        assert_eq!(out.status == Status::Sat, expected, "{text:?} {mode:?} {m:?} {v}");
                        if let Some(f) = out.network {
                            assert!(all_mts_match(&f, m).unwrap());
                        }
                    }
                }
            }
        }
    }
}
