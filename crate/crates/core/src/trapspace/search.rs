//! SAT-backed minimality checks, descent and MTS search.
//!
//! One engine holds two trap-space circuits over the same (optionally
//! perturbable) network. The `x` circuit drives the search for new
//! configurations; the `y` circuit answers minimality queries. Clamp values
//! are passed as assumptions, so one engine serves every perturbation.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bn::{BooleanNetwork, Configuration, PartialAssignment};
use crate::encoding::{
    encode_ts_circuit_with, new_inputs, EncodeOptions, FunctionSpec, PerturbationVars, TsCircuit,
};
use crate::error::{Error, Result};
use crate::random::rng;
use crate::sat::{CadicalEngine, ClauseSink, Lit, SatEngine, SolveResult};
use crate::subcube::Subcube;

use super::ts_of;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct SearchStats {
    /// Solver calls looking for a new configuration.
    pub search_solves: u64,
    /// Solver calls asking for a minimality witness.
    pub witness_solves: u64,
    /// Descent steps found by sampling vertices instead of solving.
    pub sampled_steps: u64,
    /// Rejected minimal trap spaces blocked with everything above them.
    pub blocked_spaces: u64,
}

pub struct TrapSpaceSearch {
    base: BooleanNetwork,
    current: BooleanNetwork,
    clamps: Option<PerturbationVars>,
    engine: CadicalEngine,
    x: TsCircuit,
    y: TsCircuit,
    /// `open[i]` iff dimension `i` of `TS(y)` is free.
    open: Vec<Lit>,
    context: Vec<Lit>,
    context_guard: Option<Lit>,
    deadline: Option<Instant>,
    stats: SearchStats,
    sampler: ChaCha8Rng,
}

/// Random vertices tried per descent step before asking the solver.
const DESCENT_SAMPLES: usize = 4;

impl TrapSpaceSearch {
    pub fn new(f: &BooleanNetwork) -> Self {
        Self::build(f, None)
    }

    /// Search over `f/P` where `P` ranges over the controllable components.
    pub fn perturbable(f: &BooleanNetwork, controllable: &[bool]) -> Self {
        Self::build(f, Some(controllable))
    }

    fn build(f: &BooleanNetwork, controllable: Option<&[bool]>) -> Self {
        let mut engine = CadicalEngine::new();
        let clamps = controllable.map(|c| PerturbationVars::new(&mut engine, f, c));
        let spec = match &clamps {
            Some(vars) => FunctionSpec::Perturbable(f, vars),
            None => FunctionSpec::Concrete(f),
        };
        let n = f.len();
        let xin = new_inputs(&mut engine, n, "x");
        let x = encode_ts_circuit_with(&mut engine, spec, &xin, &EncodeOptions::tagged("tsx"));
        let yin = new_inputs(&mut engine, n, "y");
        let y = encode_ts_circuit_with(&mut engine, spec, &yin, &EncodeOptions::tagged("tsy"));
        let out = y.output().clone();
        let open = (0..n)
            .map(|i| {
                let o = engine.new_var().pos();
                engine.add_clause(&[-o, out.one[i]]);
                engine.add_clause(&[-o, out.zero[i]]);
                engine.add_clause(&[o, -out.one[i], -out.zero[i]]);
                o
            })
            .collect();
        let context = clamps
            .as_ref()
            .map(|c| c.assumptions_for(&PartialAssignment::new()).expect("empty perturbation"))
            .unwrap_or_default();
        Self {
            base: f.clone(),
            current: f.clone(),
            clamps,
            engine,
            x,
            y,
            open,
            context,
            context_guard: None,
            deadline: None,
            stats: SearchStats::default(),
            sampler: rng(0),
        }
    }

    /// The concrete network queries currently refer to.
    pub fn network(&self) -> &BooleanNetwork {
        &self.current
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
        self.engine.set_deadline(deadline);
    }

    /// Switches queries to `f/P`. Image blocks added afterwards only apply
    /// while `P` is active.
    pub fn set_perturbation(&mut self, p: &PartialAssignment) -> Result<()> {
        let Some(clamps) = &self.clamps else {
            if p.is_empty() {
                return Ok(());
            }
            return Err(Error::InvalidArgument("search was built without clamps".into()));
        };
        let mut context = clamps.assumptions_for(p).ok_or_else(|| {
            Error::InvalidArgument("perturbation touches an uncontrollable component".into())
        })?;
        if let Some(g) = self.context_guard.take() {
            self.engine.add_clause(&[-g]);
        }
        let guard = self.engine.new_var().pos();
        context.push(guard);
        self.context = context;
        self.context_guard = Some(guard);
        self.current = self.base.perturbed(p);
        Ok(())
    }

    fn solve(&mut self, extra: &[Lit]) -> Result<bool> {
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::Timeout);
        }
        let mut assumptions = self.context.clone();
        assumptions.extend_from_slice(extra);
        match self.engine.solve(&assumptions) {
            SolveResult::Sat => Ok(true),
            SolveResult::Unsat => Ok(false),
            SolveResult::Interrupted => Err(Error::Timeout),
        }
    }

    /// A vertex `y` of the saturated trap space `h` with `TS(y) ⊊ h`.
    pub fn witness(&mut self, h: &Subcube) -> Result<Option<Configuration>> {
        let free: Vec<usize> = h.free_dims().collect();
        if free.is_empty() {
            return Ok(None);
        }
        let act = self.engine.new_var().pos();
        let mut clause = vec![-act];
        clause.extend(free.iter().map(|&i| -self.open[i]));
        self.engine.add_clause(&clause);
        let mut assumptions = vec![act];
        for (i, b) in h.fixed_dims() {
            assumptions.push(if b { self.y.inputs()[i] } else { -self.y.inputs()[i] });
        }
        self.stats.witness_solves += 1;
        let found = self.solve(&assumptions);
        let result = match found {
            Ok(true) => Ok(Some(self.y.decode_input(&self.engine))),
            Ok(false) => Ok(None),
            Err(e) => Err(e),
        };
        self.engine.add_clause(&[-act]);
        result
    }

    pub fn is_minimal(&mut self, h: &Subcube) -> Result<bool> {
        Ok(self.witness(h)?.is_none())
    }

    pub fn in_mts(&mut self, x: &Configuration) -> Result<bool> {
        let h = ts_of(&self.current, x);
        self.is_minimal(&h)
    }

    /// A minimal trap space inside `TS(x)`.
    pub fn descend(&mut self, x: &Configuration) -> Result<Subcube> {
        let h = ts_of(&self.current, x);
        self.descend_from(h)
    }

    fn descend_from(&mut self, mut h: Subcube) -> Result<Subcube> {
        loop {
            if let Some(t) = self.sampled_step(&h) {
                h = t;
                continue;
            }
            match self.witness(&h)? {
                Some(y) => h = ts_of(&self.current, &y),
                None => return Ok(h),
            }
        }
    }

    /// The trap space of a random vertex of `h`, when strictly smaller.
    fn sampled_step(&mut self, h: &Subcube) -> Option<Subcube> {
        h.free_dims().next()?;
        for _ in 0..DESCENT_SAMPLES {
            let mut y = Configuration::zeros(h.len());
            for i in h.free_dims() {
                y.set(i, self.sampler.gen_bool(0.5));
            }
            let t = ts_of(&self.current, &h.vertex_from(&y));
            if t != *h {
                self.stats.sampled_steps += 1;
                return Some(t);
            }
        }
        None
    }

    /// Permanently restricts the search to configurations outside `m`.
    pub fn exclude_cube(&mut self, m: &Subcube) {
        let clause: Vec<Lit> = m
            .fixed_dims()
            .map(|(i, b)| if b { -self.x.inputs()[i] } else { self.x.inputs()[i] })
            .collect();
        self.engine.add_clause(&clause);
    }

    /// Permanently restricts the search to configurations not matching `marker`.
    pub fn exclude_marker_matches(&mut self, marker: &PartialAssignment) {
        let clause: Vec<Lit> = marker
            .iter()
            .map(|(i, b)| if b { -self.x.inputs()[i] } else { self.x.inputs()[i] })
            .collect();
        self.engine.add_clause(&clause);
    }

    /// Excludes every configuration whose trap space contains the minimal
    /// trap space `m`, for the current perturbation. Such a configuration
    /// lies in `m` or in no minimal trap space at all.
    pub fn block_superspaces(&mut self, m: &Subcube) {
        let out = self.x.output();
        let mut clause: Vec<Lit> = self.context_guard.map(|g| vec![-g]).unwrap_or_default();
        for i in 0..m.len() {
            for b in [true, false] {
                if m.rail(b, i) {
                    clause.push(-out.rail(b, i));
                }
            }
        }
        self.engine.add_clause(&clause);
        self.stats.blocked_spaces += 1;
    }

    /// Searches for a configuration in a minimal trap space `m` accepted by
    /// `accept`, which returns the configuration to report. Each rejected
    /// `m` is blocked together with every trap space above it.
    pub fn search<F>(&mut self, mut accept: F) -> Result<Option<(Configuration, Subcube)>>
    where
        F: FnMut(&Subcube) -> Option<Configuration>,
    {
        loop {
            self.stats.search_solves += 1;
            if !self.solve(&[])? {
                return Ok(None);
            }
            let x = self.x.decode_input(&self.engine);
            let h = ts_of(&self.current, &x);
            debug_assert_eq!(self.x.decode_output(&self.engine), h);
            let h = self.descend_from(h)?;
            if let Some(z) = accept(&h) {
                return Ok(Some((z, h)));
            }
            self.block_superspaces(&h);
        }
    }

    /// Minimal trap spaces, up to `limit` of them.
    pub fn enumerate_mts(&mut self, limit: Option<usize>) -> Result<Vec<Subcube>> {
        let mut found: Vec<Subcube> = Vec::new();
        while limit.is_none_or(|l| found.len() < l) {
            let known = found.clone();
            let next = self.search(|m| {
                (!known.contains(m)).then(|| m.vertex_from(&Configuration::zeros(m.len())))
            })?;
            let Some((_, m)) = next else { break };
            self.block_superspaces(&m);
            found.push(m);
        }
        Ok(found)
    }
}

/// Minimal trap spaces of `f`, up to `limit`.
pub fn enumerate_mts(f: &BooleanNetwork, limit: Option<usize>) -> Result<Vec<Subcube>> {
    TrapSpaceSearch::new(f).enumerate_mts(limit)
}

pub fn is_minimal(f: &BooleanNetwork, h: &Subcube) -> Result<bool> {
    TrapSpaceSearch::new(f).is_minimal(h)
}

pub fn in_mts(f: &BooleanNetwork, x: &Configuration) -> Result<bool> {
    TrapSpaceSearch::new(f).in_mts(x)
}

pub fn descend_to_mts(f: &BooleanNetwork, x: &Configuration) -> Result<Subcube> {
    TrapSpaceSearch::new(f).descend(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnet::parse_bnet;

    fn mirror() -> BooleanNetwork {
        parse_bnet("a, b\nb, a\nc, !d & (a | b)\nd, !c").unwrap()
    }

    fn toggle() -> BooleanNetwork {
        parse_bnet("x1, !x2\nx2, !x1\nx3, x1 & !x2 & !x4\nx4, x3 | x5\nx5, x5 & !x3").unwrap()
    }

    fn sorted(v: Vec<Subcube>) -> Vec<String> {
        let mut s: Vec<String> = v.iter().map(|h| h.to_string()).collect();
        s.sort();
        s
    }

    #[test]
    fn mirror_facts() {
        let f = mirror();
        let mut s = TrapSpaceSearch::new(&f);
        assert!(s.is_minimal(&"1101".parse().unwrap()).unwrap());
        assert!(!s.is_minimal(&"11--".parse().unwrap()).unwrap());
        assert!(!s.in_mts(&"1100".parse().unwrap()).unwrap());
        // 1110 is a fixed point as well
        let m = s.descend(&"1100".parse().unwrap()).unwrap().to_string();
        assert!(m == "1101" || m == "1110");
        assert_eq!(sorted(enumerate_mts(&f, None).unwrap()), ["0001", "1101", "1110"]);
    }

    #[test]
    fn toggle_mts() {
        let f = toggle();
        assert_eq!(
            sorted(enumerate_mts(&f, None).unwrap()),
            ["01000", "01011", "10--0", "10011"]
        );
        let p: PartialAssignment = [(2, true), (0, false)].into_iter().collect();
        assert_eq!(sorted(enumerate_mts(&f.perturbed(&p), None).unwrap()), ["01110"]);
        let mut s = TrapSpaceSearch::perturbable(&f, &[true; 5]);
        s.set_perturbation(&p).unwrap();
        assert_eq!(sorted(s.enumerate_mts(None).unwrap()), ["01110"]);
        assert!(!is_minimal(&f, &"10---".parse().unwrap()).unwrap());
        assert!(is_minimal(&f, &"10--0".parse().unwrap()).unwrap());
        assert_eq!(enumerate_mts(&f, Some(1)).unwrap().len(), 1);
    }

    #[test]
    fn perturbation_switch_keeps_blocks_local() {
        let f = toggle();
        let mut s = TrapSpaceSearch::perturbable(&f, &[true; 5]);
        let p: PartialAssignment = [(2, true)].into_iter().collect();
        s.set_perturbation(&p).unwrap();
        let x: Configuration = "10110".parse().unwrap();
        assert!(s.network().is_fixed_point(&x));
        assert!(s.in_mts(&x).unwrap());
        let with_p = sorted(s.enumerate_mts(None).unwrap());
        s.set_perturbation(&PartialAssignment::new()).unwrap();
        // cubes excluded above are permanent, so use a fresh search for f
        assert_eq!(enumerate_mts(&f, None).unwrap().len(), 4);
        let expected = sorted(enumerate_mts(&f.perturbed(&p), None).unwrap());
        assert_eq!(with_p, expected);
    }

    #[test]
    fn constant_network() {
        let f = parse_bnet("a, 1\nb, 0").unwrap();
        assert_eq!(sorted(enumerate_mts(&f, None).unwrap()), ["10"]);
    }
}
