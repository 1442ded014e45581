//! Layered trap-space circuit.
//!
//! Layer 0 holds the rails of the input configuration; layer `t+1` opens
//! rail `(b, i)` when it was open at layer `t` or when component `i` can
//! output `b` somewhere in the layer-`t` subcube. After `n` layers the rails
//! describe the smallest trap space containing the input. Every equation
//! is a full bi-implication, so fixing the inputs determines every rail by
//! unit propagation alone.

use crate::bn::{BooleanNetwork, ComponentId, Configuration, UnateDnf};
use crate::sat::{ClauseSink, Lit, SatEngine, Var};
use crate::subcube::Subcube;

use super::synth::{SynthComponent, SynthesisVars};

/// Distributed clause count above which a rail definition goes through an
/// auxiliary literal instead of being inlined.
pub const DEFAULT_INLINE_LIMIT: usize = 16;

/// Clamp variables of one controllable component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Clamp {
    pub clamped: Var,
    pub value: Var,
}

/// Clamp variables for every component; `None` for uncontrollable ones.
#[derive(Clone, Debug)]
pub struct PerturbationVars {
    clamps: Vec<Option<Clamp>>,
}

impl PerturbationVars {
    pub fn new<S: ClauseSink>(sink: &mut S, network: &BooleanNetwork, controllable: &[bool]) -> Self {
        assert_eq!(controllable.len(), network.len());
        let clamps = controllable
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                c.then(|| Clamp {
                    clamped: sink.new_labeled(|| format!("clamped[{}]", network.name(i))),
                    value: sink.new_labeled(|| format!("value[{}]", network.name(i))),
                })
            })
            .collect();
        Self { clamps }
    }

    pub fn clamps(&self) -> &[Option<Clamp>] {
        &self.clamps
    }

    pub fn clamp(&self, i: ComponentId) -> Option<Clamp> {
        self.clamps[i]
    }

    pub fn clamped_vars(&self) -> Vec<Var> {
        self.clamps.iter().flatten().map(|c| c.clamped).collect()
    }

    pub fn all_vars(&self) -> Vec<Var> {
        self.clamps
            .iter()
            .flatten()
            .flat_map(|c| [c.clamped, c.value])
            .collect()
    }

    /// Assumptions fixing the clamp variables to exactly `p`.
    ///
    /// Returns `None` when `p` touches an uncontrollable component.
    pub fn assumptions_for(&self, p: &crate::bn::PartialAssignment) -> Option<Vec<Lit>> {
        if p.keys().any(|i| self.clamps[i].is_none()) {
            return None;
        }
        let mut out = Vec::new();
        for (i, clamp) in self.clamps.iter().enumerate() {
            let Some(clamp) = clamp else { continue };
            match p.get(i) {
                Some(b) => {
                    out.push(clamp.clamped.pos());
                    out.push(clamp.value.lit(b));
                }
                None => out.push(clamp.clamped.neg()),
            }
        }
        Some(out)
    }

    pub fn decode<E: SatEngine>(&self, engine: &E) -> crate::bn::PartialAssignment {
        self.clamps
            .iter()
            .enumerate()
            .filter_map(|(i, c)| {
                let c = c.as_ref()?;
                engine
                    .model_value(c.clamped)
                    .then(|| (i, engine.model_value(c.value)))
            })
            .collect()
    }
}

/// Local functions the circuit evaluates.
#[derive(Clone, Copy)]
pub enum FunctionSpec<'a> {
    Concrete(&'a BooleanNetwork),
    /// `f/P` for a symbolic `P` given by clamp variables.
    Perturbable(&'a BooleanNetwork, &'a PerturbationVars),
    /// DNFs chosen by selector variables.
    Synthesizable(&'a SynthesisVars),
}

impl FunctionSpec<'_> {
    pub fn len(&self) -> usize {
        match self {
            FunctionSpec::Concrete(f) | FunctionSpec::Perturbable(f, _) => f.len(),
            FunctionSpec::Synthesizable(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn name(&self, i: ComponentId) -> &str {
        match self {
            FunctionSpec::Concrete(f) | FunctionSpec::Perturbable(f, _) => f.name(i),
            FunctionSpec::Synthesizable(s) => &s.graph().names()[i],
        }
    }

    fn clamp(&self, i: ComponentId) -> Option<Clamp> {
        match self {
            FunctionSpec::Perturbable(_, vars) => vars.clamp(i),
            _ => None,
        }
    }
}

/// Rails of one layer: `one[i]` / `zero[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rails {
    pub one: Vec<Lit>,
    pub zero: Vec<Lit>,
}

impl Rails {
    pub fn rail(&self, b: bool, i: ComponentId) -> Lit {
        if b {
            self.one[i]
        } else {
            self.zero[i]
        }
    }

    pub fn len(&self) -> usize {
        self.one.len()
    }

    pub fn is_empty(&self) -> bool {
        self.one.is_empty()
    }

    pub fn decode<E: SatEngine>(&self, engine: &E) -> Subcube {
        let values: Vec<Option<bool>> = (0..self.len())
            .map(|i| {
                match (engine.lit_value(self.one[i]), engine.lit_value(self.zero[i])) {
                    (true, true) => None,
                    (true, false) => Some(true),
                    (false, true) => Some(false),
                    (false, false) => panic!("model assigns an empty dimension"),
                }
            })
            .collect();
        Subcube::from_values(&values)
    }

    /// Every rail literal, ones first.
    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.one.iter().chain(self.zero.iter()).copied()
    }
}

#[derive(Clone, Debug)]
pub struct TsCircuit {
    inputs: Vec<Lit>,
    layers: Vec<Rails>,
}

impl TsCircuit {
    pub fn inputs(&self) -> &[Lit] {
        &self.inputs
    }

    pub fn layers(&self) -> &[Rails] {
        &self.layers
    }

    /// Rails of the last layer, i.e. of `TS(input)`.
    pub fn output(&self) -> &Rails {
        self.layers.last().expect("circuit has at least one layer")
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn decode_input<E: SatEngine>(&self, engine: &E) -> Configuration {
        let values: Vec<bool> = self.inputs.iter().map(|&l| engine.lit_value(l)).collect();
        Configuration::from_bools(&values)
    }

    pub fn decode_output<E: SatEngine>(&self, engine: &E) -> Subcube {
        self.output().decode(engine)
    }

    /// Assumptions fixing the inputs to `x`.
    pub fn input_assumptions(&self, x: &Configuration) -> Vec<Lit> {
        self.inputs
            .iter()
            .enumerate()
            .map(|(i, &l)| if x.get(i) { l } else { -l })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct EncodeOptions {
    pub inline_limit: usize,
    /// Prefix for variable labels in dumps.
    pub tag: String,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            inline_limit: DEFAULT_INLINE_LIMIT,
            tag: "ts".into(),
        }
    }
}

impl EncodeOptions {
    pub fn tagged(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            ..Self::default()
        }
    }
}

/// Fresh input variables, one per component.
pub fn new_inputs<S: ClauseSink>(sink: &mut S, n: usize, tag: &str) -> Vec<Lit> {
    (0..n)
        .map(|i| sink.new_labeled(|| format!("{tag}[{i}]")).pos())
        .collect()
}

pub fn encode_ts_circuit<S: ClauseSink>(sink: &mut S, spec: FunctionSpec<'_>, inputs: &[Lit]) -> TsCircuit {
    encode_ts_circuit_with(sink, spec, inputs, &EncodeOptions::default())
}

pub fn encode_ts_circuit_with<S: ClauseSink>(
    sink: &mut S,
    spec: FunctionSpec<'_>,
    inputs: &[Lit],
    options: &EncodeOptions,
) -> TsCircuit {
    let n = spec.len();
    assert_eq!(inputs.len(), n, "one input per component");
    let tag = &options.tag;
    let new_layer = |sink: &mut S, t: usize| -> Rails {
        let mut layer = Rails {
            one: Vec::with_capacity(n),
            zero: Vec::with_capacity(n),
        };
        for i in 0..n {
            layer
                .one
                .push(sink.new_labeled(|| format!("{tag}.h{t}(1,{})", spec.name(i))).pos());
        }
        for i in 0..n {
            layer
                .zero
                .push(sink.new_labeled(|| format!("{tag}.h{t}(0,{})", spec.name(i))).pos());
        }
        layer
    };

    let first = new_layer(sink, 0);
    for (i, &x) in inputs.iter().enumerate() {
        let (one, zero) = (first.one[i], first.zero[i]);
        sink.add_clause(&[-one, x]);
        sink.add_clause(&[one, -x]);
        sink.add_clause(&[-zero, -x]);
        sink.add_clause(&[zero, x]);
    }
    let mut layers = vec![first];
    for t in 0..n {
        let next = new_layer(sink, t + 1);
        let prev = &layers[t];
        for i in 0..n {
            for b in [true, false] {
                let g = output_formula(sink, spec, i, prev, b);
                let g = g.limit(sink, options.inline_limit);
                emit_rail(sink, next.rail(b, i), prev.rail(b, i), &g, spec.clamp(i), b);
            }
        }
        layers.push(next);
    }
    TsCircuit {
        inputs: inputs.to_vec(),
        layers,
    }
}

/// Literal true iff component `i` can output `target` in the subcube given
/// by `layer`.
pub fn encode_fun_eval<S: ClauseSink>(
    sink: &mut S,
    spec: FunctionSpec<'_>,
    i: ComponentId,
    layer: &Rails,
    target: bool,
) -> Lit {
    let g = output_formula(sink, spec, i, layer, target);
    g.define(sink)
}

/// Formula over rails for "component `i` can output `target`".
///
/// For a unate DNF, value 1 is reachable iff some clause has all literals
/// compatible with the cube; value 0 iff every clause has a falsifiable
/// literal, since taking every variable at its falsifying extreme breaks
/// all clauses at once.
pub(crate) fn output_formula<S: ClauseSink>(
    sink: &mut S,
    spec: FunctionSpec<'_>,
    i: ComponentId,
    layer: &Rails,
    target: bool,
) -> RailFormula {
    match spec {
        FunctionSpec::Concrete(f) | FunctionSpec::Perturbable(f, _) => {
            dnf_formula(f.function(i), layer, target)
        }
        FunctionSpec::Synthesizable(vars) => match &vars.components()[i] {
            SynthComponent::Constant { value } => RailFormula::Lit(value.lit(target)),
            SynthComponent::Dnf {
                regulators,
                used,
                selectors,
            } => {
                let mut groups = Vec::with_capacity(used.len());
                for (c, &u) in used.iter().enumerate() {
                    let mut group = vec![if target { u.pos() } else { u.neg() }];
                    for (k, &(j, sign)) in regulators.iter().enumerate() {
                        let s = selectors[c][k];
                        // rail making the literal true (target 1) or false (target 0)
                        let rail = layer.rail(sign.is_positive() == target, j);
                        let aux = sink.new_var().pos();
                        if target {
                            // aux <-> (s -> rail)
                            sink.add_clause(&[-aux, s.neg(), rail]);
                            sink.add_clause(&[aux, s.pos()]);
                            sink.add_clause(&[aux, -rail]);
                        } else {
                            // aux <-> (s & rail)
                            sink.add_clause(&[-aux, s.pos()]);
                            sink.add_clause(&[-aux, rail]);
                            sink.add_clause(&[aux, s.neg(), -rail]);
                        }
                        group.push(aux);
                    }
                    groups.push(group);
                }
                if target {
                    RailFormula::Dnf(groups)
                } else {
                    RailFormula::Cnf(groups)
                }
            }
        },
    }
}

fn dnf_formula(f: &UnateDnf, layer: &Rails, target: bool) -> RailFormula {
    if let Some(c) = f.as_constant() {
        return RailFormula::Const(c == target);
    }
    let groups = f
        .clauses()
        .iter()
        .map(|clause| {
            clause
                .literals()
                .iter()
                .map(|l| layer.rail(l.positive == target, l.var))
                .collect()
        })
        .collect();
    if target {
        RailFormula::Dnf(groups)
    } else {
        RailFormula::Cnf(groups)
    }
}

/// A small two-level formula over literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum RailFormula {
    Const(bool),
    Lit(Lit),
    Dnf(Vec<Vec<Lit>>),
    Cnf(Vec<Vec<Lit>>),
}

impl RailFormula {
    /// Clauses produced by distributing the two-level side.
    fn distribution_size(&self) -> usize {
        match self {
            RailFormula::Dnf(groups) | RailFormula::Cnf(groups) => groups
                .iter()
                .map(|g| g.len().max(1))
                .fold(1usize, |acc, k| acc.saturating_mul(k)),
            _ => 1,
        }
    }

    fn limit<S: ClauseSink>(self, sink: &mut S, inline_limit: usize) -> RailFormula {
        if self.distribution_size() > inline_limit {
            RailFormula::Lit(self.define(sink))
        } else {
            self
        }
    }

    /// Tseitin definition; the returned literal is equivalent to `self`.
    pub(crate) fn define<S: ClauseSink>(&self, sink: &mut S) -> Lit {
        match self {
            RailFormula::Lit(l) => *l,
            RailFormula::Const(b) => {
                let v = sink.new_var();
                sink.add_clause(&[v.lit(*b)]);
                v.pos()
            }
            RailFormula::Dnf(terms) => {
                let out = sink.new_var().pos();
                let mut disjuncts = Vec::with_capacity(terms.len());
                for t in terms {
                    let lit = match t.as_slice() {
                        [] => {
                            sink.add_clause(&[out]);
                            return out;
                        }
                        [l] => *l,
                        _ => {
                            let a = sink.new_var().pos();
                            let mut back = vec![a];
                            for &l in t {
                                sink.add_clause(&[-a, l]);
                                back.push(-l);
                            }
                            sink.add_clause(&back);
                            a
                        }
                    };
                    sink.add_clause(&[-lit, out]);
                    disjuncts.push(lit);
                }
                disjuncts.push(-out);
                sink.add_clause(&disjuncts);
                out
            }
            RailFormula::Cnf(clauses) => {
                let out = sink.new_var().pos();
                let mut conjuncts = Vec::with_capacity(clauses.len());
                for c in clauses {
                    let lit = match c.as_slice() {
                        [] => {
                            sink.add_clause(&[-out]);
                            return out;
                        }
                        [l] => *l,
                        _ => {
                            let o = sink.new_var().pos();
                            let mut fwd = vec![-o];
                            for &l in c {
                                sink.add_clause(&[o, -l]);
                                fwd.push(l);
                            }
                            sink.add_clause(&fwd);
                            o
                        }
                    };
                    sink.add_clause(&[-out, lit]);
                    conjuncts.push(lit);
                }
                let mut back: Vec<Lit> = conjuncts.iter().map(|&l| -l).collect();
                back.push(out);
                sink.add_clause(&back);
                out
            }
        }
    }

    /// Emits CNF for `self ∨ rest`.
    pub(crate) fn emit_or<S: ClauseSink>(&self, sink: &mut S, rest: &[Lit]) {
        match self {
            RailFormula::Const(true) => {}
            RailFormula::Const(false) => sink.add_clause(rest),
            RailFormula::Lit(l) => sink.add_clause(&with(rest, &[*l])),
            RailFormula::Cnf(clauses) => {
                for c in clauses {
                    sink.add_clause(&with(rest, c));
                }
            }
            RailFormula::Dnf(terms) => {
                if terms.iter().any(|t| t.is_empty()) {
                    return;
                }
                for_each_pick(terms, |pick| sink.add_clause(&with(rest, pick)));
            }
        }
    }

    /// Emits CNF for `¬self ∨ rest`.
    pub(crate) fn emit_not_or<S: ClauseSink>(&self, sink: &mut S, rest: &[Lit]) {
        match self {
            RailFormula::Const(true) => sink.add_clause(rest),
            RailFormula::Const(false) => {}
            RailFormula::Lit(l) => sink.add_clause(&with(rest, &[-*l])),
            RailFormula::Dnf(terms) => {
                for t in terms {
                    let negated: Vec<Lit> = t.iter().map(|&l| -l).collect();
                    sink.add_clause(&with(rest, &negated));
                }
            }
            RailFormula::Cnf(clauses) => {
                if clauses.iter().any(|c| c.is_empty()) {
                    return;
                }
                for_each_pick(clauses, |pick| {
                    let negated: Vec<Lit> = pick.iter().map(|&l| -l).collect();
                    sink.add_clause(&with(rest, &negated));
                });
            }
        }
    }
}

fn with(rest: &[Lit], extra: &[Lit]) -> Vec<Lit> {
    let mut out = Vec::with_capacity(rest.len() + extra.len());
    out.extend_from_slice(rest);
    for &l in extra {
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

/// Calls `f` with every choice of one literal per group.
fn for_each_pick(groups: &[Vec<Lit>], mut f: impl FnMut(&[Lit])) {
    let mut idx = vec![0usize; groups.len()];
    let mut pick: Vec<Lit> = groups.iter().map(|g| g[0]).collect();
    loop {
        let mut dedup = pick.clone();
        dedup.sort();
        dedup.dedup();
        if !dedup.windows(2).any(|w| w[0] == -w[1]) {
            f(&dedup);
        }
        let mut k = 0;
        loop {
            if k == groups.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < groups[k].len() {
                pick[k] = groups[k][idx[k]];
                break;
            }
            idx[k] = 0;
            pick[k] = groups[k][0];
            k += 1;
        }
    }
}

/// `out ⟺ prev ∨ (¬clamped ∧ g) ∨ (clamped ∧ value=b)`.
fn emit_rail<S: ClauseSink>(
    sink: &mut S,
    out: Lit,
    prev: Lit,
    g: &RailFormula,
    clamp: Option<Clamp>,
    b: bool,
) {
    sink.add_clause(&[-prev, out]);
    match clamp {
        None => {
            g.emit_not_or(sink, &[out]);
            g.emit_or(sink, &[-out, prev]);
        }
        Some(Clamp { clamped, value }) => {
            let forced = value.lit(b);
            g.emit_not_or(sink, &[clamped.pos(), out]);
            sink.add_clause(&[clamped.neg(), -forced, out]);
            g.emit_or(sink, &[-out, prev, clamped.pos()]);
            sink.add_clause(&[-out, prev, clamped.neg(), forced]);
        }
    }
}
