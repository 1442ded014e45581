//! Selector variables describing a DNF domain over an influence graph.

use crate::bn::{BooleanNetwork, ComponentId, InfluenceGraph, Literal, Sign, UnateDnf};
use crate::error::{Error, Result};
use crate::sat::{ClauseSink, Lit, SatEngine, Var};

/// Clause budget used when none is given.
pub const DEFAULT_CLAUSE_BUDGET: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthesisMode {
    /// Every edge of the graph must occur in the function.
    #[default]
    Exact,
    /// Functions may use any subset of the edges.
    Subset,
}

#[derive(Clone, Debug)]
pub enum SynthComponent {
    /// No regulators: the function is a free constant.
    Constant { value: Var },
    Dnf {
        regulators: Vec<(ComponentId, Sign)>,
        /// `used[c]`: clause slot `c` is part of the function.
        used: Vec<Var>,
        /// `selectors[c][k]`: regulator `k` occurs in clause slot `c`.
        selectors: Vec<Vec<Var>>,
    },
}

#[derive(Clone, Debug)]
pub struct SynthesisVars {
    graph: InfluenceGraph,
    mode: SynthesisMode,
    components: Vec<SynthComponent>,
}

impl SynthesisVars {
    pub fn graph(&self) -> &InfluenceGraph {
        &self.graph
    }

    pub fn mode(&self) -> SynthesisMode {
        self.mode
    }

    pub fn components(&self) -> &[SynthComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Every variable that determines the decoded network.
    pub fn decision_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for c in &self.components {
            match c {
                SynthComponent::Constant { value } => out.push(*value),
                SynthComponent::Dnf { used, selectors, .. } => {
                    out.extend(used);
                    out.extend(selectors.iter().flatten());
                }
            }
        }
        out
    }

    /// Clause excluding the network encoded by the current model.
    pub fn blocking_clause<E: SatEngine>(&self, engine: &E) -> Vec<Lit> {
        self.decision_vars()
            .into_iter()
            .map(|v| v.lit(!engine.model_value(v)))
            .collect()
    }

    pub fn decode<E: SatEngine>(&self, engine: &E) -> BooleanNetwork {
        let functions = self
            .components
            .iter()
            .map(|c| match c {
                SynthComponent::Constant { value } => UnateDnf::constant(engine.model_value(*value)),
                SynthComponent::Dnf {
                    regulators,
                    used,
                    selectors,
                } => {
                    let clauses: Vec<Vec<Literal>> = used
                        .iter()
                        .zip(selectors)
                        .filter(|(u, _)| engine.model_value(**u))
                        .map(|(_, row)| {
                            regulators
                                .iter()
                                .zip(row)
                                .filter(|(_, s)| engine.model_value(**s))
                                .map(|(&(j, sign), _)| Literal::new(j, sign.is_positive()))
                                .collect()
                        })
                        .collect();
                    UnateDnf::from_clauses(clauses).expect("selectors respect edge signs")
                }
            })
            .collect();
        BooleanNetwork::new(self.graph.names().to_vec(), functions)
            .expect("graph names are unique")
    }
}

/// Largest antichain of subsets of a `d`-set.
pub fn sperner_bound(d: usize) -> usize {
    let k = d / 2;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (d - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Allocates selectors and emits the structural clauses of the domain.
///
/// Clause slots are used as a prefix, rows are strictly decreasing in
/// lexicographic order and no used clause contains another, so each
/// irredundant DNF has exactly one encoding.
pub fn encode_synth_structure<S: ClauseSink>(
    sink: &mut S,
    graph: &InfluenceGraph,
    mode: SynthesisMode,
    clause_budget: usize,
) -> Result<SynthesisVars> {
    if clause_budget < 1 {
        return Err(Error::InvalidArgument("clause budget must be at least 1".into()));
    }
    if let Some((source, target)) = graph.dual_edge() {
        return Err(Error::NonMonotoneGraph {
            source_name: graph.names()[source].clone(),
            target: graph.names()[target].clone(),
        });
    }
    let names = graph.names();
    let mut components = Vec::with_capacity(graph.len());
    for i in 0..graph.len() {
        let regulators = graph.regulators(i);
        let d = regulators.len();
        if d == 0 {
            let value = sink.new_labeled(|| format!("const[{}]", names[i]));
            components.push(SynthComponent::Constant { value });
            continue;
        }
        let slots = clause_budget.min(sperner_bound(d));
        let used: Vec<Var> = (0..slots)
            .map(|c| sink.new_labeled(|| format!("used[{},{c}]", names[i])))
            .collect();
        let selectors: Vec<Vec<Var>> = (0..slots)
            .map(|c| {
                regulators
                    .iter()
                    .map(|&(j, _)| sink.new_labeled(|| format!("sel[{},{c},{}]", names[i], names[j])))
                    .collect()
            })
            .collect();

        sink.add_clause(&[used[0].pos()]);
        for c in 0..slots {
            if c > 0 {
                sink.add_clause(&[used[c].neg(), used[c - 1].pos()]);
            }
            let mut some: Vec<Lit> = vec![used[c].neg()];
            for &s in &selectors[c] {
                sink.add_clause(&[used[c].pos(), s.neg()]);
                some.push(s.pos());
            }
            sink.add_clause(&some);
        }
        for c in 1..slots {
            encode_lex_greater(sink, &selectors[c - 1], &selectors[c], used[c]);
        }
        for c in 0..slots {
            for (c2, &used_c2) in used.iter().enumerate().skip(c + 1) {
                // row c2 must have a literal row c lacks, and vice versa
                for (a, b) in [(c, c2), (c2, c)] {
                    let mut clause = vec![used_c2.neg()];
                    for (&sb, &sa) in selectors[b].iter().zip(&selectors[a]) {
                        let w = sink.new_var();
                        sink.add_clause(&[w.neg(), sb.pos()]);
                        sink.add_clause(&[w.neg(), sa.neg()]);
                        clause.push(w.pos());
                    }
                    sink.add_clause(&clause);
                }
            }
        }
        if mode == SynthesisMode::Exact {
            for k in 0..d {
                let clause: Vec<Lit> = selectors.iter().map(|row| row[k].pos()).collect();
                sink.add_clause(&clause);
            }
        }
        components.push(SynthComponent::Dnf {
            regulators,
            used,
            selectors,
        });
    }
    Ok(SynthesisVars {
        graph: graph.clone(),
        mode,
        components,
    })
}

/// `guard → a >lex b`, comparing from index 0.
fn encode_lex_greater<S: ClauseSink>(sink: &mut S, a: &[Var], b: &[Var], guard: Var) {
    // eq[k]: rows agree on 0..k
    let mut eq_prev: Option<Lit> = None;
    let mut wins = vec![guard.neg()];
    for k in 0..a.len() {
        // win_k: prefix equal and a[k]=1, b[k]=0
        let win = sink.new_var().pos();
        sink.add_clause(&[-win, a[k].pos()]);
        sink.add_clause(&[-win, b[k].neg()]);
        if let Some(e) = eq_prev {
            sink.add_clause(&[-win, e]);
        }
        wins.push(win);
        if k + 1 < a.len() {
            let eq = sink.new_var().pos();
            if let Some(e) = eq_prev {
                sink.add_clause(&[-eq, e]);
            }
            sink.add_clause(&[-eq, a[k].neg(), b[k].pos()]);
            sink.add_clause(&[-eq, a[k].pos(), b[k].neg()]);
            eq_prev = Some(eq);
        }
    }
    sink.add_clause(&wins);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{CadicalEngine, SolveResult};

    fn all_models(graph: &InfluenceGraph, mode: SynthesisMode, budget: usize) -> Vec<BooleanNetwork> {
        let mut e = CadicalEngine::new();
        let vars = encode_synth_structure(&mut e, graph, mode, budget).unwrap();
        let mut out = Vec::new();
        while e.solve(&[]) == SolveResult::Sat {
            out.push(vars.decode(&e));
            let block = vars.blocking_clause(&e);
            e.add_clause(&block);
        }
        out
    }

    #[test]
    fn sperner() {
        assert_eq!(sperner_bound(0), 1);
        assert_eq!(sperner_bound(1), 1);
        assert_eq!(sperner_bound(3), 3);
        assert_eq!(sperner_bound(4), 6);
    }

    #[test]
    fn isolated_node_is_constant() {
        let g = InfluenceGraph::with_default_names(1);
        let models = all_models(&g, SynthesisMode::Exact, 4);
        assert_eq!(models.len(), 2);
        assert!(models.iter().all(|f| f.function(0).as_constant().is_some()));
    }

    #[test]
    fn two_regulators_exact_domain() {
        // x1 | x2 and x1 & x2 are the only unate functions using both
        let mut g = InfluenceGraph::with_default_names(3);
        g.add_edge(0, 2, Sign::Positive);
        g.add_edge(1, 2, Sign::Positive);
        let models = all_models(&g, SynthesisMode::Exact, 4);
        // constants on nodes 0 and 1 double the count twice
        assert_eq!(models.len(), 2 * 4);
        let subset = all_models(&g, SynthesisMode::Subset, 4);
        assert_eq!(subset.len(), 4 * 4);
    }

    #[test]
    fn decoded_models_are_distinct_and_irredundant() {
        let mut g = InfluenceGraph::with_default_names(3);
        for j in 0..3 {
            g.add_edge(j, 0, Sign::Positive);
        }
        g.add_edge(0, 1, Sign::Negative);
        g.add_edge(0, 2, Sign::Positive);
        let models = all_models(&g, SynthesisMode::Exact, 32);
        let mut tables: Vec<Vec<bool>> = models
            .iter()
            .map(|f| {
                crate::bn::Configuration::all(3)
                    .map(|x| f.eval_local(0, &x))
                    .collect()
            })
            .collect();
        let count = tables.len();
        tables.sort();
        tables.dedup();
        assert_eq!(tables.len(), count);
        // monotone functions of 3 variables depending on all of them: 9
        assert_eq!(count, 9);
        for f in &models {
            assert!(f.influence_graph().same_edges(&g));
        }
    }
}
