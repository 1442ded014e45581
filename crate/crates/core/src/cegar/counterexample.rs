use crate::bn::{BooleanNetwork, Configuration, PartialAssignment};
use crate::error::Result;
use crate::subcube::Subcube;
use crate::trapspace::TrapSpaceSearch;

/// A vertex of `m` that does not match `marker`, if any.
pub fn violating_vertex(m: &Subcube, marker: &PartialAssignment) -> Option<Configuration> {
    if m.matches(marker) {
        return None;
    }
    let mut x = m.vertex_from(&Configuration::zeros(m.len()));
    for (i, b) in marker.iter() {
        if m.is_free(i) {
            x.set(i, !b);
        }
    }
    debug_assert!(!x.matches(marker));
    Some(x)
}

/// A configuration outside `marker` lying in a minimal trap space of `g`.
pub fn find_counter_example(g: &BooleanNetwork, marker: &PartialAssignment) -> Result<Option<Configuration>> {
    let mut search = TrapSpaceSearch::new(g);
    counter_example_in(&mut search, marker)
}

/// Runs the counter-example search on a prepared search whose inputs are
/// already restricted to configurations outside the marker.
pub(crate) fn counter_example_in(
    search: &mut TrapSpaceSearch,
    marker: &PartialAssignment,
) -> Result<Option<Configuration>> {
    search.exclude_marker_matches(marker);
    search_restricted(search, marker)
}

pub(crate) fn search_restricted(
    search: &mut TrapSpaceSearch,
    marker: &PartialAssignment,
) -> Result<Option<Configuration>> {
    Ok(search
        .search(|m| violating_vertex(m, marker))?
        .map(|(x, _)| x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnet::parse_bnet;
    use crate::trapspace::in_mts;

    fn toggle() -> BooleanNetwork {
        parse_bnet("x1, !x2\nx2, !x1\nx3, x1 & !x2 & !x4\nx4, x3 | x5\nx5, x5 & !x3").unwrap()
    }

    #[test]
    fn perturbed_toggle() {
        let f = toggle();
        let m: PartialAssignment = [(1, true), (2, true)].into_iter().collect();
        let g = f.perturbed(&[(2, true)].into_iter().collect());
        // 10110 is the only counter-example here
        assert_eq!(find_counter_example(&g, &m).unwrap().unwrap().to_string(), "10110");
        let h = f.perturbed(&[(1, true), (2, true)].into_iter().collect());
        assert_eq!(find_counter_example(&h, &m).unwrap(), None);
    }

    #[test]
    fn identity_network() {
        let f = parse_bnet("a, a\nb, b").unwrap();
        let m: PartialAssignment = [(0, true)].into_iter().collect();
        let x = find_counter_example(&f, &m).unwrap().unwrap();
        assert!(!x.get(0));
        assert!(in_mts(&f, &x).unwrap());
    }

    #[test]
    fn empty_marker_has_none() {
        let f = toggle();
        assert_eq!(find_counter_example(&f, &PartialAssignment::new()).unwrap(), None);
    }

    #[test]
    fn vertex_choice() {
        let m: PartialAssignment = [(0, true), (2, false)].into_iter().collect();
        assert_eq!(violating_vertex(&"1-0".parse().unwrap(), &m), None);
        assert_eq!(violating_vertex(&"--0".parse().unwrap(), &m).unwrap().to_string(), "000");
        assert_eq!(violating_vertex(&"11-".parse().unwrap(), &m).unwrap().to_string(), "111");
    }
}
