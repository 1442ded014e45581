//! Boolean networks with unate DNF local functions.
//!
//! Every local function is kept as an irredundant unate DNF: each component
//! occurs with a single sign across the whole function and no clause is
//! absorbed by another. On that representation syntactic occurrence and
//! semantic influence coincide, so the influence graph is read directly off
//! the clauses.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub type ComponentId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn from_polarity(positive: bool) -> Self {
        if positive {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub index: ComponentId,
    pub name: String,
}

/// A signed occurrence of a component inside a local function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: ComponentId,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: ComponentId, positive: bool) -> Self {
        Self { var, positive }
    }

    pub fn sign(self) -> Sign {
        Sign::from_polarity(self.positive)
    }

    pub fn eval(self, x: &Configuration) -> bool {
        x.get(self.var) == self.positive
    }
}

/// A conjunction of literals, sorted by component index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    fn from_sorted(literals: Vec<Literal>) -> Self {
        Self { literals }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn eval(&self, x: &Configuration) -> bool {
        self.literals.iter().all(|l| l.eval(x))
    }

    fn is_subset_of(&self, other: &Clause) -> bool {
        // both sorted
        let mut it = other.literals.iter();
        'outer: for l in &self.literals {
            for m in it.by_ref() {
                if m == l {
                    continue 'outer;
                }
                if m > l {
                    return false;
                }
            }
            return false;
        }
        true
    }
}

/// Irredundant unate DNF, or a constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnateDnf {
    clauses: Vec<Clause>,
    constant: Option<bool>,
}

impl UnateDnf {
    pub fn constant(value: bool) -> Self {
        Self {
            clauses: Vec::new(),
            constant: Some(value),
        }
    }

    pub fn literal(var: ComponentId, positive: bool) -> Self {
        Self {
            clauses: vec![Clause::from_sorted(vec![Literal::new(var, positive)])],
            constant: None,
        }
    }

    /// Normalizes a DNF given as a list of literal sets.
    ///
    /// Fails with the offending component index when a component occurs
    /// with both signs. An empty clause makes the function constant true and
    /// an empty clause list makes it constant false.
    pub fn from_clauses<I, C>(clauses: I) -> std::result::Result<Self, ComponentId>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Literal>,
    {
        let mut signs: BTreeMap<ComponentId, bool> = BTreeMap::new();
        let mut normalized: Vec<Clause> = Vec::new();
        for clause in clauses {
            let mut lits: Vec<Literal> = clause.into_iter().collect();
            for l in &lits {
                match signs.insert(l.var, l.positive) {
                    Some(previous) if previous != l.positive => return Err(l.var),
                    _ => {}
                }
            }
            lits.sort();
            lits.dedup();
            normalized.push(Clause::from_sorted(lits));
        }
        if normalized.iter().any(Clause::is_empty) {
            return Ok(Self::constant(true));
        }
        if normalized.is_empty() {
            return Ok(Self::constant(false));
        }
        normalized.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        normalized.dedup();
        let mut kept: Vec<Clause> = Vec::with_capacity(normalized.len());
        for c in normalized {
            if !kept.iter().any(|k| k.is_subset_of(&c)) {
                kept.push(c);
            }
        }
        kept.sort();
        Ok(Self {
            clauses: kept,
            constant: None,
        })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn as_constant(&self) -> Option<bool> {
        self.constant
    }

    pub fn eval(&self, x: &Configuration) -> bool {
        match self.constant {
            Some(b) => b,
            None => self.clauses.iter().any(|c| c.eval(x)),
        }
    }

    /// Regulators with their sign, sorted by component index.
    pub fn support(&self) -> Vec<(ComponentId, Sign)> {
        let set: BTreeSet<(ComponentId, Sign)> = self
            .clauses
            .iter()
            .flat_map(|c| c.literals.iter().map(|l| (l.var, l.sign())))
            .collect();
        set.into_iter().collect()
    }

    pub fn max_var(&self) -> Option<ComponentId> {
        self.clauses
            .iter()
            .flat_map(|c| c.literals.iter().map(|l| l.var))
            .max()
    }

    /// Renders the function in bnet syntax.
    pub fn to_expression(&self, names: &[String]) -> String {
        if let Some(b) = self.constant {
            return if b { "1" } else { "0" }.to_string();
        }
        let multi = self.clauses.len() > 1;
        self.clauses
            .iter()
            .map(|c| {
                let body = c
                    .literals
                    .iter()
                    .map(|l| {
                        if l.positive {
                            names[l.var].clone()
                        } else {
                            format!("!{}", names[l.var])
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" & ");
                if multi && c.len() > 1 {
                    format!("({body})")
                } else {
                    body
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// A full Boolean state of the network.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    bits: FixedBitSet,
}

impl Configuration {
    pub fn zeros(n: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn from_bools(values: &[bool]) -> Self {
        let mut c = Self::zeros(values.len());
        for (i, &b) in values.iter().enumerate() {
            c.bits.set(i, b);
        }
        c
    }

    /// Configuration whose bit `i` is bit `i` of `index`.
    pub fn from_index(n: usize, index: u64) -> Self {
        let mut c = Self::zeros(n);
        for i in 0..n.min(64) {
            c.bits.set(i, (index >> i) & 1 == 1);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.len() == 0
    }

    pub fn get(&self, i: ComponentId) -> bool {
        self.bits.contains(i)
    }

    pub fn set(&mut self, i: ComponentId, value: bool) {
        self.bits.set(i, value);
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn matches(&self, marker: &PartialAssignment) -> bool {
        marker.iter().all(|(i, b)| self.get(i) == b)
    }

    /// Iterates all 2^n configurations.
    pub fn all(n: usize) -> impl Iterator<Item = Configuration> {
        assert!(n < 64, "cannot enumerate 2^{n} configurations");
        (0..(1u64 << n)).map(move |k| Configuration::from_index(n, k))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidValue {
                    name: s.to_string(),
                    message: format!("unexpected character `{other}` in configuration"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Configuration::from_bools(&values))
    }
}

/// Partial map from components to Booleans; used both for markers and
/// perturbations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialAssignment {
    entries: BTreeMap<ComponentId, bool>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, i: ComponentId, value: bool) -> Option<bool> {
        self.entries.insert(i, value)
    }

    pub fn get(&self, i: ComponentId) -> Option<bool> {
        self.entries.get(&i).copied()
    }

    pub fn contains(&self, i: ComponentId) -> bool {
        self.entries.contains_key(&i)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ComponentId, bool)> + '_ {
        self.entries.iter().map(|(&i, &b)| (i, b))
    }

    pub fn keys(&self) -> impl Iterator<Item = ComponentId> + '_ {
        self.entries.keys().copied()
    }

    /// True when every entry of `self` also belongs to `other`.
    pub fn is_submap_of(&self, other: &PartialAssignment) -> bool {
        self.iter().all(|(i, b)| other.get(i) == Some(b))
    }

    /// `self` extended by the entries of `other`, `other` winning on
    /// shared keys.
    pub fn overridden_by(&self, other: &PartialAssignment) -> PartialAssignment {
        let mut out = self.clone();
        for (i, b) in other.iter() {
            out.insert(i, b);
        }
        out
    }

    pub fn max_key(&self) -> Option<ComponentId> {
        self.entries.keys().next_back().copied()
    }

    /// Parses `{"name": 0|1, ...}`.
    pub fn from_json(network_names: &NameIndex, text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_json_value(network_names, &value)
    }

    pub fn from_json_value(names: &NameIndex, value: &Value) -> Result<Self> {
        let object = value.as_object().ok_or_else(|| Error::InvalidValue {
            name: "<root>".into(),
            message: "expected a JSON object of name -> 0/1".into(),
        })?;
        let mut out = PartialAssignment::new();
        for (name, v) in object {
            let i = names
                .index_of(name)
                .ok_or_else(|| Error::UnknownName(name.clone()))?;
            let b = match v {
                Value::Bool(b) => *b,
                Value::Number(num) if num.as_u64() == Some(0) => false,
                Value::Number(num) if num.as_u64() == Some(1) => true,
                other => {
                    return Err(Error::InvalidValue {
                        name: name.clone(),
                        message: format!("expected 0 or 1, found {other}"),
                    })
                }
            };
            out.insert(i, b);
        }
        Ok(out)
    }

    pub fn to_json_value(&self, names: &[String]) -> Value {
        let mut map = Map::new();
        for (i, b) in self.iter() {
            map.insert(names[i].clone(), Value::from(u8::from(b)));
        }
        Value::Object(map)
    }
}

impl FromIterator<(ComponentId, bool)> for PartialAssignment {
    fn from_iter<T: IntoIterator<Item = (ComponentId, bool)>>(iter: T) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Name lookup shared by networks and influence graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NameIndex {
    names: Vec<String>,
    index: HashMap<String, ComponentId>,
}

impl NameIndex {
    pub fn new(names: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateComponent(name.clone()));
            }
        }
        Ok(Self { names, index })
    }

    pub fn index_of(&self, name: &str) -> Option<ComponentId> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct BooleanNetwork {
    names: NameIndex,
    functions: Vec<UnateDnf>,
    perturbation: PartialAssignment,
}

impl PartialEq for BooleanNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.names.names == other.names.names
            && self.functions == other.functions
            && self.perturbation == other.perturbation
    }
}

impl Eq for BooleanNetwork {}

impl BooleanNetwork {
    pub fn new(names: Vec<String>, functions: Vec<UnateDnf>) -> Result<Self> {
        if names.len() != functions.len() {
            return Err(Error::Dimension {
                expected: names.len(),
                found: functions.len(),
            });
        }
        let n = names.len();
        for f in &functions {
            if let Some(v) = f.max_var() {
                if v >= n {
                    return Err(Error::Dimension {
                        expected: n,
                        found: v + 1,
                    });
                }
            }
        }
        Ok(Self {
            names: NameIndex::new(names)?,
            functions,
            perturbation: PartialAssignment::new(),
        })
    }

    /// Network with default names `x1..xn`.
    pub fn with_default_names(functions: Vec<UnateDnf>) -> Result<Self> {
        let names = (1..=functions.len()).map(|i| format!("x{i}")).collect();
        Self::new(names, functions)
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn names(&self) -> &[String] {
        self.names.names()
    }

    pub fn name_index(&self) -> &NameIndex {
        &self.names
    }

    pub fn name(&self, i: ComponentId) -> &str {
        &self.names.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<ComponentId> {
        self.names.index_of(name)
    }

    pub fn components(&self) -> impl Iterator<Item = Component> + '_ {
        self.names.names.iter().enumerate().map(|(index, name)| Component {
            index,
            name: name.clone(),
        })
    }

    pub fn function(&self, i: ComponentId) -> &UnateDnf {
        &self.functions[i]
    }

    pub fn functions(&self) -> &[UnateDnf] {
        &self.functions
    }

    /// Clamps applied so far by [`BooleanNetwork::perturbed`].
    pub fn perturbation(&self) -> &PartialAssignment {
        &self.perturbation
    }

    pub fn eval_local(&self, i: ComponentId, x: &Configuration) -> bool {
        self.functions[i].eval(x)
    }

    pub fn eval(&self, x: &Configuration) -> Configuration {
        let mut out = Configuration::zeros(self.len());
        for i in 0..self.len() {
            out.set(i, self.eval_local(i, x));
        }
        out
    }

    pub fn is_fixed_point(&self, x: &Configuration) -> bool {
        (0..self.len()).all(|i| self.eval_local(i, x) == x.get(i))
    }

    /// `f/P`: components in `P` get the clamped constant.
    pub fn perturbed(&self, p: &PartialAssignment) -> BooleanNetwork {
        let mut out = self.clone();
        for (i, b) in p.iter() {
            out.functions[i] = UnateDnf::constant(b);
        }
        out.perturbation = self.perturbation.overridden_by(p);
        out
    }

    pub fn influence_graph(&self) -> InfluenceGraph {
        let mut graph = InfluenceGraph::empty(self.names.names.clone());
        for (target, f) in self.functions.iter().enumerate() {
            for (source, sign) in f.support() {
                graph.add_edge(source, target, sign);
            }
        }
        graph
    }

    pub fn is_locally_monotone(&self) -> bool {
        self.influence_graph().is_locally_monotone()
    }

    pub fn to_bnet(&self) -> String {
        let mut out = String::from("targets, factors\n");
        for (i, f) in self.functions.iter().enumerate() {
            out.push_str(&format!(
                "{}, {}\n",
                self.names.names[i],
                f.to_expression(self.names.names())
            ));
        }
        out
    }
}

/// Signed directed graph over the components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfluenceGraph {
    names: Vec<String>,
    pos_edges: BTreeSet<(ComponentId, ComponentId)>,
    neg_edges: BTreeSet<(ComponentId, ComponentId)>,
}

impl InfluenceGraph {
    pub fn empty(names: Vec<String>) -> Self {
        Self {
            names,
            pos_edges: BTreeSet::new(),
            neg_edges: BTreeSet::new(),
        }
    }

    pub fn with_default_names(n: usize) -> Self {
        Self::empty((1..=n).map(|i| format!("x{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn add_edge(&mut self, source: ComponentId, target: ComponentId, sign: Sign) {
        assert!(source < self.len() && target < self.len());
        match sign {
            Sign::Positive => self.pos_edges.insert((source, target)),
            Sign::Negative => self.neg_edges.insert((source, target)),
        };
    }

    pub fn pos_edges(&self) -> &BTreeSet<(ComponentId, ComponentId)> {
        &self.pos_edges
    }

    pub fn neg_edges(&self) -> &BTreeSet<(ComponentId, ComponentId)> {
        &self.neg_edges
    }

    pub fn is_locally_monotone(&self) -> bool {
        self.pos_edges.is_disjoint(&self.neg_edges)
    }

    /// First edge carrying both signs, if any.
    pub fn dual_edge(&self) -> Option<(ComponentId, ComponentId)> {
        self.pos_edges.intersection(&self.neg_edges).next().copied()
    }

    /// Regulators of `target` with their sign, sorted by source index.
    /// A dual edge shows up twice.
    pub fn regulators(&self, target: ComponentId) -> Vec<(ComponentId, Sign)> {
        let mut out: Vec<(ComponentId, Sign)> = self
            .pos_edges
            .iter()
            .filter(|e| e.1 == target)
            .map(|e| (e.0, Sign::Positive))
            .chain(
                self.neg_edges
                    .iter()
                    .filter(|e| e.1 == target)
                    .map(|e| (e.0, Sign::Negative)),
            )
            .collect();
        out.sort();
        out
    }

    pub fn edges(&self) -> impl Iterator<Item = (ComponentId, ComponentId, Sign)> + '_ {
        self.pos_edges
            .iter()
            .map(|&(s, t)| (s, t, Sign::Positive))
            .chain(self.neg_edges.iter().map(|&(s, t)| (s, t, Sign::Negative)))
    }

    /// `true` when the edge set of `self` is included in `other`'s.
    pub fn is_subgraph_of(&self, other: &InfluenceGraph) -> bool {
        self.pos_edges.is_subset(&other.pos_edges) && self.neg_edges.is_subset(&other.neg_edges)
    }

    pub fn same_edges(&self, other: &InfluenceGraph) -> bool {
        self.pos_edges == other.pos_edges && self.neg_edges == other.neg_edges
    }

    /// Parses lines of the form `source -> target +` (or `-`).
    ///
    /// Nodes are numbered in order of first appearance; a line holding a
    /// single name declares an isolated node. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, ComponentId> = HashMap::new();
        let mut intern = |name: &str| -> ComponentId {
            if let Some(&i) = index.get(name) {
                return i;
            }
            names.push(name.to_string());
            index.insert(name.to_string(), names.len() - 1);
            names.len() - 1
        };
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |column: usize, message: &str| Error::Syntax {
                line: lineno + 1,
                column,
                message: message.to_string(),
            };
            let Some(arrow) = line.find("->") else {
                if line.split_whitespace().count() == 1 && is_identifier(line) {
                    intern(line);
                    continue;
                }
                return Err(syntax(1, "expected `source -> target +|-`"));
            };
            let source = line[..arrow].trim();
            let mut rest = line[arrow + 2..].split_whitespace();
            let target = rest.next().ok_or_else(|| syntax(arrow + 3, "missing target"))?;
            let sign = match rest.next() {
                Some("+") => Sign::Positive,
                Some("-") => Sign::Negative,
                _ => return Err(syntax(arrow + 3, "expected sign `+` or `-` after target")),
            };
            if rest.next().is_some() {
                return Err(syntax(arrow + 3, "trailing tokens after sign"));
            }
            if !is_identifier(source) || !is_identifier(target) {
                return Err(syntax(1, "invalid node name"));
            }
            let s = intern(source);
            let t = intern(target);
            edges.push((s, t, sign));
        }
        let mut graph = InfluenceGraph::empty(names);
        for (s, t, sign) in edges {
            graph.add_edge(s, t, sign);
        }
        Ok(graph)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut mentioned = vec![false; self.len()];
        for (s, t, sign) in self.edges() {
            mentioned[s] = true;
            mentioned[t] = true;
            out.push_str(&format!("{} -> {} {}\n", self.names[s], self.names[t], sign));
        }
        for (i, m) in mentioned.iter().enumerate() {
            if !m {
                out.push_str(&format!("{}\n", self.names[i]));
            }
        }
        out
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | ':' | '\''))
}
