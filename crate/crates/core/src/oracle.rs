//! Brute-force ground truth for small instances.
//!
//! Everything here works from the definitions alone: closure is checked
//! vertex by vertex and no saturation or SAT solving is involved. Each entry
//! point refuses instances above its size guard.

use std::collections::BTreeSet;

use crate::bn::{BooleanNetwork, ComponentId, Configuration, InfluenceGraph, Literal, PartialAssignment, UnateDnf};
use crate::cegar::ReprogrammingOptions;
use crate::encoding::SynthesisMode;
use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::subcube::Subcube;

pub const MTS_LIMIT: usize = 12;
pub const TS_LIMIT: usize = 10;
pub const REPROGRAMMING_LIMIT: (usize, usize) = (10, 3);
pub const SYNTHESIS_LIMIT: (usize, usize, usize) = (3, 2, 3);

fn guard(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::OracleScale(what()))
    }
}

/// Whether every vertex of `h` is mapped into `h`.
pub fn is_closed(f: &BooleanNetwork, h: &Subcube) -> bool {
    let fixed: Vec<(ComponentId, bool)> = h.fixed_dims().collect();
    h.vertices()
        .all(|v| fixed.iter().all(|&(i, b)| f.eval_local(i, &v) == b))
}

pub fn brute_mts(f: &BooleanNetwork) -> Result<Vec<Subcube>> {
    brute_mts_with(f, Execution::default())
}

pub fn brute_mts_with(f: &BooleanNetwork, exec: Execution) -> Result<Vec<Subcube>> {
    let n = f.len();
    guard(n <= MTS_LIMIT, || format!("minimal trap spaces need n <= {MTS_LIMIT}, got {n}"))?;
    let total = 3u64.pow(n as u32);
    let mut closed: Vec<Subcube> = exec
        .map_range(total, |k| {
            let h = Subcube::from_base3(n, k);
            is_closed(f, &h).then_some(h)
        })
        .into_iter()
        .flatten()
        .collect();
    closed.sort_by_key(|h| h.free_count());
    let mut minimal: Vec<Subcube> = Vec::new();
    for h in closed {
        if !minimal.iter().any(|m| m.is_subcube_of(&h)) {
            minimal.push(h);
        }
    }
    Ok(minimal)
}

/// Intersection of every trap space containing `x`.
pub fn brute_ts(f: &BooleanNetwork, x: &Configuration) -> Result<Subcube> {
    let n = f.len();
    guard(n <= TS_LIMIT, || format!("smallest trap space needs n <= {TS_LIMIT}, got {n}"))?;
    let mut acc = Subcube::full(n);
    for mask in 0u64..(1u64 << n) {
        let values: Vec<Option<bool>> = (0..n)
            .map(|i| (mask >> i & 1 == 0).then(|| x.get(i)))
            .collect();
        let h = Subcube::from_values(&values);
        if is_closed(f, &h) {
            acc = acc.intersection(&h).expect("both contain x");
        }
    }
    Ok(acc)
}

/// Every perturbation of size at most `k` over `allowed`, smallest first.
pub fn perturbations(allowed: &[ComponentId], k: usize) -> Vec<PartialAssignment> {
    let mut out = vec![PartialAssignment::new()];
    let mut frontier = vec![(PartialAssignment::new(), 0usize)];
    for _ in 0..k {
        let mut next = Vec::new();
        for (p, start) in &frontier {
            for (pos, &i) in allowed.iter().enumerate().skip(*start) {
                for b in [false, true] {
                    let mut q = p.clone();
                    q.insert(i, b);
                    out.push(q.clone());
                    next.push((q, pos + 1));
                }
            }
        }
        frontier = next;
    }
    out
}

pub fn all_mts_match(f: &BooleanNetwork, marker: &PartialAssignment) -> Result<bool> {
    Ok(brute_mts_with(f, Execution::Sequential)?
        .iter()
        .all(|m| m.matches(marker)))
}

/// Subset-minimal perturbations making every MTS match `marker`.
pub fn brute_reprogramming(
    f: &BooleanNetwork,
    marker: &PartialAssignment,
    k: usize,
    options: &ReprogrammingOptions,
) -> Result<Vec<PartialAssignment>> {
    let n = f.len();
    let (max_n, max_k) = REPROGRAMMING_LIMIT;
    guard(n <= max_n && k <= max_k, || {
        format!("reprogramming needs n <= {max_n} and k <= {max_k}, got n = {n}, k = {k}")
    })?;
    let allowed: Vec<ComponentId> = options
        .controllable(n, marker)
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| c.then_some(i))
        .collect();
    let candidates = perturbations(&allowed, k);
    let verdicts = Execution::default().map(&candidates, |p| all_mts_match(&f.perturbed(p), marker));
    let mut solutions = Vec::new();
    for (p, ok) in candidates.into_iter().zip(verdicts) {
        if ok? {
            solutions.push(p);
        }
    }
    Ok(subset_minimal(solutions))
}

/// Keeps the perturbations with no other member strictly inside them.
pub fn subset_minimal(mut solutions: Vec<PartialAssignment>) -> Vec<PartialAssignment> {
    solutions.sort_by_key(|p| p.len());
    let mut kept: Vec<PartialAssignment> = Vec::new();
    for p in solutions {
        if !kept.iter().any(|q| q.is_submap_of(&p)) {
            kept.push(p);
        }
    }
    kept.sort();
    kept
}

/// Every irredundant unate DNF over `regulators` with at most `budget`
/// clauses; with `exact`, only those mentioning every regulator.
pub fn dnf_domain(regulators: &[(ComponentId, crate::bn::Sign)], budget: usize, exact: bool) -> Vec<UnateDnf> {
    let d = regulators.len();
    if d == 0 {
        return vec![UnateDnf::constant(false), UnateDnf::constant(true)];
    }
    let clauses: Vec<u32> = (1u32..(1 << d)).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<u32> = Vec::new();
    fn rec(
        clauses: &[u32],
        start: usize,
        budget: usize,
        chosen: &mut Vec<u32>,
        visit: &mut dyn FnMut(&[u32]),
    ) {
        if !chosen.is_empty() {
            visit(chosen);
        }
        if chosen.len() == budget {
            return;
        }
        for idx in start..clauses.len() {
            let c = clauses[idx];
            if chosen.iter().any(|&o| o & c == o || o & c == c) {
                continue;
            }
            chosen.push(c);
            rec(clauses, idx + 1, budget, chosen, visit);
            chosen.pop();
        }
    }
    let full = (1u32 << d) - 1;
    rec(&clauses, 0, budget, &mut chosen, &mut |set| {
        if exact && set.iter().fold(0, |acc, c| acc | c) != full {
            return;
        }
        let dnf: Vec<Vec<Literal>> = set
            .iter()
            .map(|&c| {
                (0..d)
                    .filter(|k| c >> k & 1 == 1)
                    .map(|k| Literal::new(regulators[k].0, regulators[k].1.is_positive()))
                    .collect()
            })
            .collect();
        out.push(UnateDnf::from_clauses(dnf).expect("regulator signs are fixed"));
    });
    out
}

/// A network in the DNF domain of `graph` whose MTSs all match `marker`.
pub fn brute_synthesis(
    graph: &InfluenceGraph,
    mode: SynthesisMode,
    budget: usize,
    marker: &PartialAssignment,
) -> Result<Option<BooleanNetwork>> {
    let n = graph.len();
    let (max_n, max_c, max_d) = SYNTHESIS_LIMIT;
    let max_in = (0..n).map(|i| graph.regulators(i).len()).max().unwrap_or(0);
    guard(n <= max_n && budget <= max_c && max_in <= max_d, || {
        format!(
            "synthesis needs n <= {max_n}, C <= {max_c}, in-degree <= {max_d}; \
             got n = {n}, C = {budget}, in-degree = {max_in}"
        )
    })?;
    if let Some((s, t)) = graph.dual_edge() {
        return Err(Error::NonMonotoneGraph {
            source_name: graph.names()[s].clone(),
            target: graph.names()[t].clone(),
        });
    }
    let domains: Vec<Vec<UnateDnf>> = (0..n)
        .map(|i| dnf_domain(&graph.regulators(i), budget, mode == SynthesisMode::Exact))
        .collect();
    if domains.iter().any(|d| d.is_empty()) {
        return Ok(None);
    }
    let mut idx = vec![0usize; n];
    loop {
        let functions = (0..n).map(|i| domains[i][idx[i]].clone()).collect();
        let f = BooleanNetwork::new(graph.names().to_vec(), functions)?;
        if all_mts_match(&f, marker)? {
            return Ok(Some(f));
        }
        let mut k = 0;
        loop {
            if k == n {
                return Ok(None);
            }
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Minimal elements among all `TS(x)`, a second route to the MTS set.
pub fn mts_from_images(f: &BooleanNetwork) -> Result<Vec<Subcube>> {
    let n = f.len();
    let images: BTreeSet<String> = Configuration::all(n)
        .map(|x| brute_ts(f, &x).map(|h| h.to_string()))
        .collect::<Result<_>>()?;
    let images: Vec<Subcube> = images.iter().map(|s| s.parse().expect("own output")).collect();
    Ok(images
        .iter()
        .filter(|h| !images.iter().any(|o| o.is_strict_subcube_of(h)))
        .cloned()
        .collect())
}
