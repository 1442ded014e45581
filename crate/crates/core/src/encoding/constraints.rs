use crate::bn::PartialAssignment;
use crate::sat::{ClauseSink, Lit, Var};

use super::circuit::Rails;

/// Forces the cube described by `rails` to match `marker`.
pub fn encode_marker_on_cube<S: ClauseSink>(sink: &mut S, rails: &Rails, marker: &PartialAssignment) {
    for (i, b) in marker.iter() {
        sink.add_clause(&[rails.rail(b, i)]);
        sink.add_clause(&[-rails.rail(!b, i)]);
    }
}

/// Literal true iff the cube described by `rails` matches `marker`.
pub fn marker_match_lit<S: ClauseSink>(sink: &mut S, rails: &Rails, marker: &PartialAssignment) -> Lit {
    let out = sink.new_var().pos();
    let mut back = vec![out];
    for (i, b) in marker.iter() {
        let off = rails.rail(!b, i);
        sink.add_clause(&[-out, -off]);
        back.push(off);
    }
    sink.add_clause(&back);
    out
}

/// Forces `inner ⊆ outer`, and `inner ≠ outer` unless `strict` is false.
///
/// Returns the `diff` variables, `diff[k]` true iff rail `k` (ones first)
/// is open in `outer` and closed in `inner`.
pub fn encode_strict_containment<S: ClauseSink>(sink: &mut S, outer: &Rails, inner: &Rails) -> Vec<Var> {
    encode_containment(sink, outer, inner, true)
}

pub fn encode_containment<S: ClauseSink>(sink: &mut S, outer: &Rails, inner: &Rails, strict: bool) -> Vec<Var> {
    assert_eq!(outer.len(), inner.len());
    let mut diffs = Vec::with_capacity(2 * outer.len());
    for (o, i) in outer.lits().zip(inner.lits()) {
        sink.add_clause(&[-i, o]);
        let d = sink.new_var();
        sink.add_clause(&[d.neg(), o]);
        sink.add_clause(&[d.neg(), -i]);
        sink.add_clause(&[d.pos(), -o, i]);
        diffs.push(d);
    }
    if strict {
        let clause: Vec<Lit> = diffs.iter().map(|d| d.pos()).collect();
        sink.add_clause(&clause);
    }
    diffs
}

/// Sequential counter: `at_least(m)` is implied by `m` or more true inputs.
///
/// Only the upward implications are encoded, which is all an upper bound
/// needs: assuming `¬at_least(k+1)` caps the count at `k`.
#[derive(Clone, Debug)]
pub struct SequentialCounter {
    outputs: Vec<Lit>,
    len: usize,
}

impl SequentialCounter {
    /// Counter able to express every bound up to `max_bound`.
    pub fn new<S: ClauseSink>(sink: &mut S, inputs: &[Lit], max_bound: usize) -> Self {
        let width = (max_bound + 1).min(inputs.len());
        let mut prev: Vec<Lit> = Vec::new();
        for (j, &x) in inputs.iter().enumerate() {
            let w = width.min(j + 1);
            let cur: Vec<Lit> = (0..w)
                .map(|m| sink.new_labeled(|| format!("card[{j},{}]", m + 1)).pos())
                .collect();
            sink.add_clause(&[-x, cur[0]]);
            for m in 0..w {
                if m < prev.len() {
                    sink.add_clause(&[-prev[m], cur[m]]);
                }
                if m >= 1 && m - 1 < prev.len() {
                    sink.add_clause(&[-x, -prev[m - 1], cur[m]]);
                }
            }
            prev = cur;
        }
        Self {
            outputs: prev,
            len: inputs.len(),
        }
    }

    /// Assumption bounding the count by `k`, or `None` when no bound applies.
    pub fn at_most(&self, k: usize) -> Option<Lit> {
        if k >= self.len {
            return None;
        }
        Some(-*self.outputs.get(k).expect("bound within counter width"))
    }
}

pub fn encode_cardinality_at_most<S: ClauseSink>(sink: &mut S, vars: &[Var], k: usize) -> Option<Lit> {
    let inputs: Vec<Lit> = vars.iter().map(|v| v.pos()).collect();
    SequentialCounter::new(sink, &inputs, k).at_most(k)
}
