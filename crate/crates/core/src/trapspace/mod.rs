//! Trap spaces: rail saturation, closure checks and minimality.

mod search;

pub use search::{descend_to_mts, enumerate_mts, in_mts, is_minimal, SearchStats, TrapSpaceSearch};

use crate::bn::{BooleanNetwork, ComponentId, Configuration, PartialAssignment};
use crate::error::{Error, Result};
use crate::subcube::Subcube;

/// Largest dimension for engine-free minimality checks.
pub const BRUTE_MINIMALITY_LIMIT: usize = 12;

/// Whether some vertex of `h` maps component `i` to `b`.
///
/// For `b = 1` some clause must have every literal compatible with `h`; for
/// `b = 0` every clause must have a literal `h` can falsify.
pub fn can_output(f: &BooleanNetwork, i: ComponentId, h: &Subcube, b: bool) -> bool {
    let fi = f.function(i);
    if let Some(c) = fi.as_constant() {
        return c == b;
    }
    if b {
        fi.clauses()
            .iter()
            .any(|c| c.literals().iter().all(|l| h.rail(l.positive, l.var)))
    } else {
        fi.clauses()
            .iter()
            .all(|c| c.literals().iter().any(|l| h.rail(!l.positive, l.var)))
    }
}

/// One Gauss-Seidel sweep in ascending index order; true if a rail opened.
fn sweep(f: &BooleanNetwork, h: &mut Subcube) -> bool {
    let mut changed = false;
    for i in 0..f.len() {
        if let Some(v) = h.get(i) {
            if can_output(f, i, h, !v) {
                h.open_rail(!v, i);
                changed = true;
            }
        }
    }
    changed
}

/// Saturates `h` in place to the smallest trap space containing it.
pub fn saturate(f: &BooleanNetwork, h: &mut Subcube) {
    while sweep(f, h) {}
}

/// Smallest trap space containing `x`.
pub fn ts_of(f: &BooleanNetwork, x: &Configuration) -> Subcube {
    let mut h = Subcube::point(x);
    saturate(f, &mut h);
    h
}

/// `x` followed by the state after each sweep that opened a rail.
pub fn ts_trace(f: &BooleanNetwork, x: &Configuration) -> Vec<Subcube> {
    let mut h = Subcube::point(x);
    let mut trace = vec![h.clone()];
    while sweep(f, &mut h) {
        trace.push(h.clone());
    }
    trace
}

pub fn is_trap_space(f: &BooleanNetwork, h: &Subcube) -> bool {
    h.fixed_dims().all(|(i, v)| !can_output(f, i, h, !v))
}

/// Vertex `y` of the trap space `h` with `TS(y) ⊊ h`, by enumeration.
pub fn brute_witness(f: &BooleanNetwork, h: &Subcube) -> Result<Option<Configuration>> {
    if h.free_count() > BRUTE_MINIMALITY_LIMIT {
        return Err(Error::EngineRequired(h.free_count()));
    }
    Ok(h.vertices().find(|y| ts_of(f, y) != *h))
}

/// Minimality of a saturated trap space by enumerating its vertices.
pub fn is_minimal_brute(f: &BooleanNetwork, h: &Subcube) -> Result<bool> {
    Ok(brute_witness(f, h)?.is_none())
}

/// Rails `P` forces on every trap space of `f/P` containing `x`.
pub fn perturbation_rails(p: &PartialAssignment, x: &Configuration) -> Subcube {
    let mut h = Subcube::point(x);
    for (i, b) in p.iter() {
        if x.get(i) != b {
            h.set(i, None);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnet::parse_bnet;

    fn cascade() -> BooleanNetwork {
        parse_bnet("x1, x2\nx2, x3 & x4\nx3, x4 & !x2\nx4, !x1 | x4").unwrap()
    }

    fn mirror() -> BooleanNetwork {
        parse_bnet("a, b\nb, a\nc, !d & (a | b)\nd, !c").unwrap()
    }

    #[test]
    fn cascade_trace() {
        let trace: Vec<String> = ts_trace(&cascade(), &"0000".parse().unwrap())
            .iter()
            .map(|h| h.to_string())
            .collect();
        assert_eq!(trace, ["0000", "000-", "00--", "0---", "----"]);
    }

    #[test]
    fn can_output_cases() {
        let f = cascade();
        assert!(can_output(&f, 3, &"0000".parse().unwrap(), true));
        let g = mirror();
        assert!(can_output(&g, 3, &"11-0".parse().unwrap(), false));
        let c = parse_bnet("a, 1").unwrap();
        assert!(!can_output(&c, 0, &"-".parse().unwrap(), false));
    }

    #[test]
    fn mirror_trap_spaces() {
        let f = mirror();
        assert!(is_trap_space(&f, &"11--".parse().unwrap()));
        assert!(is_trap_space(&f, &Subcube::full(4)));
        assert!(!is_trap_space(&f, &"1111".parse().unwrap()));
        assert_eq!(ts_of(&f, &"1100".parse().unwrap()).to_string(), "11--");
        assert!(!is_minimal_brute(&f, &"11--".parse().unwrap()).unwrap());
        assert!(is_minimal_brute(&f, &"1101".parse().unwrap()).unwrap());
    }

    #[test]
    fn perturbed_rails() {
        let f = cascade();
        let p: PartialAssignment = [(0, true), (2, false)].into_iter().collect();
        let g = f.perturbed(&p);
        for x in Configuration::all(4) {
            let h = ts_of(&g, &x);
            let forced = perturbation_rails(&p, &x);
            for (i, _) in p.iter() {
                assert_eq!(h.get(i), forced.get(i));
            }
        }
    }
}
