use trapmark::bn::{InfluenceGraph, PartialAssignment, Sign};
use trapmark::cegar::{find_counter_example, solve_reprogramming, ReprogrammingOptions, Status};
use trapmark::{parse_bnet, Error};

#[test]
fn xor_is_not_locally_monotone() {
    match parse_bnet("a, (b & !c) | (!b & c)\nb, a\nc, a") {
        Err(Error::NonUnate { component, variable }) => {
            assert_eq!(component, "a");
            assert!(variable == "b" || variable == "c");
        }
        other => panic!("expected a unateness error, got {other:?}"),
    }
    let mut g = InfluenceGraph::with_default_names(2);
    g.add_edge(0, 1, Sign::Positive);
    assert!(g.is_locally_monotone());
    g.add_edge(0, 1, Sign::Negative);
    assert!(!g.is_locally_monotone());
    assert_eq!(g.dual_edge(), Some((0, 1)));
}

#[test]
fn toggle_counter_example() {
    let f = parse_bnet("x1, !x2\nx2, !x1\nx3, x1 & !x2 & !x4\nx4, x3 | x5\nx5, x5 & !x3").unwrap();
    let m: PartialAssignment = [(1, true), (2, true)].into_iter().collect();
    let g = f.perturbed(&[(2, true)].into_iter().collect());
    let x = find_counter_example(&g, &m).unwrap().unwrap();
    assert_eq!(x.to_string(), "10110");
    assert!(g.is_fixed_point(&x));
}

#[test]
fn uncontrollable_components_are_never_clamped() {
    let f = parse_bnet("x1, !x2\nx2, !x1\nx3, x1 & !x2 & !x4\nx4, x3 | x5\nx5, x5 & !x3").unwrap();
    let m: PartialAssignment = [(1, true), (2, true)].into_iter().collect();
    let mut options = ReprogrammingOptions::default();
    options.uncontrollable.insert(0);
    let out = solve_reprogramming(&f, &m, 2, &options).unwrap();
    assert_eq!(out.status, Status::Sat);
    assert!(out.solutions.iter().all(|p| !p.contains(0)));
}
