//! Seeded random instances: locally monotone networks and markers.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bn::{BooleanNetwork, ComponentId, Literal, PartialAssignment, UnateDnf};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random unate DNF over `d` regulators with fixed signs and at most
/// `max_clauses` clauses before absorption.
fn random_function<R: Rng>(rng: &mut R, regulators: &[(ComponentId, bool)], max_clauses: usize) -> UnateDnf {
    let d = regulators.len();
    let count = rng.gen_range(1..=max_clauses.max(1));
    let clauses: Vec<Vec<Literal>> = (0..count)
        .map(|_| {
            let mask = rng.gen_range(1u32..(1 << d));
            (0..d)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| Literal::new(regulators[k].0, regulators[k].1))
                .collect()
        })
        .collect();
    UnateDnf::from_clauses(clauses).expect("one sign per regulator")
}

/// Random locally monotone network; every component has between one and
/// `max_indegree` regulators.
pub fn random_network<R: Rng>(rng: &mut R, n: usize, max_indegree: usize) -> BooleanNetwork {
    let nodes: Vec<ComponentId> = (0..n).collect();
    let functions = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=max_indegree.min(n).max(1));
            let regulators: Vec<(ComponentId, bool)> = nodes
                .choose_multiple(rng, d)
                .map(|&j| (j, rng.gen_bool(0.6)))
                .collect();
            random_function(rng, &regulators, 3)
        })
        .collect();
    BooleanNetwork::with_default_names(functions).expect("default names are unique")
}

/// Components in strongly connected components without outgoing edges.
pub fn output_components(f: &BooleanNetwork) -> Vec<ComponentId> {
    let mut g: DiGraph<ComponentId, ()> = DiGraph::new();
    let idx: Vec<_> = (0..f.len()).map(|i| g.add_node(i)).collect();
    for (s, t, _) in f.influence_graph().edges() {
        g.add_edge(idx[s], idx[t], ());
    }
    let mut out = Vec::new();
    for scc in tarjan_scc(&g) {
        let members: Vec<ComponentId> = scc.iter().map(|&v| g[v]).collect();
        let leaves = scc
            .iter()
            .all(|&v| g.neighbors(v).all(|w| members.contains(&g[w])));
        if leaves {
            out.extend(members);
        }
    }
    out.sort_unstable();
    out
}

/// Random marker on `size` components, drawn from output components
/// first and from the rest when those run out.
pub fn random_marker<R: Rng>(rng: &mut R, f: &BooleanNetwork, size: usize) -> PartialAssignment {
    let mut outputs = output_components(f);
    outputs.shuffle(rng);
    let mut others: Vec<ComponentId> = (0..f.len()).filter(|i| !outputs.contains(i)).collect();
    others.shuffle(rng);
    outputs
        .into_iter()
        .chain(others)
        .take(size)
        .map(|i| (i, rng.gen_bool(0.5)))
        .collect()
}
