//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero when a criterion fails for any reason other than a known
//! inconsistency in the reference data, whose checkable remainder must hold.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use trapmark::bn::{BooleanNetwork, Configuration, InfluenceGraph, PartialAssignment, Sign};
use trapmark::cegar::{
    enumerate_reprogramming, solve_reprogramming, solve_synthesis, RefinementVariant, ReprogrammingOptions,
    ReprogrammingSolver, Status, SynthesisOptions,
};
use trapmark::encoding::{encode_ts_circuit, new_inputs, FunctionSpec};
use trapmark::oracle::{brute_mts, brute_reprogramming, brute_ts, is_closed, perturbations};
use trapmark::qdimacs::{expand_and_solve, export_qdimacs, parse_qdimacs};
use trapmark::random::{random_marker, random_network, rng};
use trapmark::sat::{CadicalEngine, SatEngine};
use trapmark::trapspace::{enumerate_mts, is_minimal, ts_of, ts_trace};
use trapmark::{parse_bnet, Subcube};

use rand::Rng;

struct Verdict {
    pass: bool,
    /// Failure caused by reference data that contradicts the definitions;
    /// everything else the criterion asks for was checked and holds.
    known_erratum: bool,
    detail: String,
}

impl Verdict {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            known_erratum: false,
            detail: detail.into(),
        }
    }
}

fn cube(s: &str) -> Subcube {
    s.replace('*', "-").parse().unwrap()
}

fn assignment(pairs: &[(usize, bool)]) -> PartialAssignment {
    pairs.iter().copied().collect()
}

fn sorted_strings(v: &[Subcube]) -> Vec<String> {
    let mut s: Vec<String> = v.iter().map(ToString::to_string).collect();
    s.sort();
    s
}

fn sorted(mut v: Vec<PartialAssignment>) -> Vec<PartialAssignment> {
    v.sort();
    v
}

fn cascade() -> BooleanNetwork {
    parse_bnet("x1, x2\nx2, x3 & x4\nx3, x4 & !x2\nx4, !x1 | x4").unwrap()
}

fn mirror() -> BooleanNetwork {
    parse_bnet("x1, x2\nx2, x1\nx3, !x4 & (x1 | x2)\nx4, !x3").unwrap()
}

fn toggle() -> BooleanNetwork {
    parse_bnet("x1, !x2\nx2, !x1\nx3, x1 & !x2 & !x4\nx4, x3 | x5\nx5, x5 & !x3").unwrap()
}

struct Instance {
    f: BooleanNetwork,
    marker: PartialAssignment,
    options: ReprogrammingOptions,
}

const SUITE_SIZE: u64 = 216;
const SUITE_K: usize = 2;

fn suite() -> Vec<Instance> {
    (0..SUITE_SIZE)
        .map(|seed| {
            let mut r = rng(1000 + seed);
            let n = 3 + (seed % 6) as usize;
            let f = random_network(&mut r, n, 3);
            let size = r.gen_range(1..=3.min(n));
            let marker = random_marker(&mut r, &f, size);
            let options = ReprogrammingOptions {
                forbid_marker_nodes: seed % 2 == 1,
                ..ReprogrammingOptions::default()
            };
            Instance { f, marker, options }
        })
        .collect()
}

fn criterion1() -> Verdict {
    let f = cascade();
    let x = Configuration::zeros(4);
    let start = Instant::now();
    let h = ts_of(&f, &x);
    let elapsed = start.elapsed();
    let trace: Vec<String> = ts_trace(&f, &x).iter().map(ToString::to_string).collect();
    let pass = h == cube("****") && trace == ["0000", "000-", "00--", "0---", "----"] && elapsed < Duration::from_millis(1);
    Verdict::check(pass, format!("trace {} in {elapsed:?}", trace.join(" -> ")))
}

fn criterion2() -> Verdict {
    let start = Instant::now();
    let f = mirror();
    let h = cube("11**");
    let closed = is_closed(&f, &h);
    let minimal = is_minimal(&f, &h).unwrap();
    let brute = brute_mts(&f).unwrap();
    let sat = enumerate_mts(&f, None).unwrap();
    let contains_1101 = cube("1101").is_subcube_of(&h) && brute.contains(&cube("1101"));
    let brute_s = sorted_strings(&brute);
    let agree = brute_s == sorted_strings(&sat);
    let listed = brute_s == ["0001", "1101"];
    let elapsed = start.elapsed();
    let rest = closed && !minimal && contains_1101 && agree && brute.contains(&cube("0001")) && elapsed < Duration::from_secs(1);
    // 1110 is a fixed point: f(1110) = (1, 1, 1, 0)
    let erratum = f.is_fixed_point(&"1110".parse().unwrap()) && brute_s == ["0001", "1101", "1110"];
    Verdict {
        pass: rest && listed,
        known_erratum: rest && !listed && erratum,
        detail: format!(
            "11** closed={closed} minimal={minimal} contains 1101={contains_1101}; oracle MTS {brute_s:?}, \
             search agrees={agree}; expected [0001, 1101] but 1110 is a fixed point; {elapsed:?}"
        ),
    }
}

fn criterion3() -> Verdict {
    let f = toggle();
    let mts = sorted_strings(&enumerate_mts(&f, None).unwrap());
    let oracle = sorted_strings(&brute_mts(&f).unwrap());
    let listed = mts == ["010--", "10---"];
    let perturbed = f.perturbed(&assignment(&[(2, true), (0, false)]));
    let single = sorted_strings(&enumerate_mts(&perturbed, None).unwrap());
    let single_ok = single == ["01110"] && sorted_strings(&brute_mts(&perturbed).unwrap()) == single;
    let fixed = f
        .perturbed(&assignment(&[(2, true)]))
        .is_fixed_point(&"10110".parse().unwrap());
    let rest = single_ok && fixed && mts == oracle;
    // 010** holds the fixed points 01000 and 01011
    let erratum = ["01000", "01011"].iter().all(|x| f.is_fixed_point(&x.parse().unwrap()));
    Verdict {
        pass: rest && listed,
        known_erratum: rest && !listed && erratum,
        detail: format!(
            "MTS {mts:?} (oracle agrees={}), expected [010--, 10---] but 01000 and 01011 are fixed points; \
             f/{{x3=1,x1=0}} -> {single:?}; 10110 fixed in f/{{x3=1}}: {fixed}",
            mts == oracle
        ),
    }
}

fn criterion4() -> Verdict {
    let start = Instant::now();
    let f = toggle();
    let m = assignment(&[(1, true), (2, true)]);
    let options = ReprogrammingOptions::default();
    let out = enumerate_reprogramming(&f, &m, 2, &options).unwrap();
    let brute = sorted(brute_reprogramming(&f, &m, 2, &options).unwrap());
    let got = sorted(out.solutions.clone());
    let contains = got.contains(&assignment(&[(0, false), (2, true)])) && got.contains(&assignment(&[(1, true), (2, true)]));
    let k0 = solve_reprogramming(&f, &m, 0, &options).unwrap().status;
    let elapsed = start.elapsed();
    let pass = out.status == Status::Sat && got == brute && contains && k0 == Status::Unsat && elapsed < Duration::from_secs(5);
    let names = f.names();
    let shown: Vec<String> = got.iter().map(|p| p.to_json_value(names).to_string()).collect();
    Verdict::check(pass, format!("k=2 -> {shown:?} (oracle agrees={}), k=0 -> {k0:?}; {elapsed:?}", got == brute))
}

fn complete_positive(n: usize, self_loops: bool) -> InfluenceGraph {
    let mut g = InfluenceGraph::with_default_names(n);
    for i in 0..n {
        for j in 0..n {
            if i != j || self_loops {
                g.add_edge(i, j, Sign::Positive);
            }
        }
    }
    g
}

fn criterion5() -> Verdict {
    let mut details = Vec::new();
    let mut pass = true;
    for loops in [false, true] {
        let g = complete_positive(3, loops);
        let start = Instant::now();
        let unsat = solve_synthesis(&g, &assignment(&[(0, false)]), &SynthesisOptions::default()).unwrap();
        let elapsed = start.elapsed();
        let sat = solve_synthesis(&g, &PartialAssignment::new(), &SynthesisOptions::default()).unwrap();
        pass &= unsat.status == Status::Unsat && elapsed < Duration::from_secs(10) && sat.status == Status::Sat;
        details.push(format!(
            "self-loops={loops}: M={{x1=0}} {:?} in {elapsed:?}, M={{}} {:?}",
            unsat.status, sat.status
        ));
    }
    Verdict::check(pass, details.join("; "))
}

fn criterion6(suite: &[Instance]) -> Verdict {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut ts_checked = 0usize;
    for (idx, inst) in suite.iter().enumerate() {
        for x in Configuration::all(inst.f.len()) {
            ts_checked += 1;
            if ts_of(&inst.f, &x) != brute_ts(&inst.f, &x).unwrap() {
                mismatches.push(format!("ts #{idx} at {x}"));
            }
        }
        let expected = sorted(brute_reprogramming(&inst.f, &inst.marker, SUITE_K, &inst.options).unwrap());
        for v in RefinementVariant::ALL {
            let options = ReprogrammingOptions {
                variant: v,
                ..inst.options.clone()
            };
            let out = enumerate_reprogramming(&inst.f, &inst.marker, SUITE_K, &options).unwrap();
            if out.status == Status::Timeout || sorted(out.solutions) != expected {
                mismatches.push(format!("reprogramming #{idx} V{v}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && elapsed < Duration::from_secs(600);
    Verdict::check(
        pass,
        format!(
            "{} networks x 3 variants, {ts_checked} saturations; mismatches {mismatches:?}; {elapsed:?}",
            suite.len()
        ),
    )
}

fn criterion7(suite: &[Instance]) -> Verdict {
    let mut incomplete = Vec::new();
    let mut checked = 0usize;
    for (idx, inst) in suite.iter().enumerate() {
        let f = &inst.f;
        let mut engine = CadicalEngine::recording();
        let inputs = new_inputs(&mut engine, f.len(), "x");
        let circuit = encode_ts_circuit(&mut engine, FunctionSpec::Concrete(f), &inputs);
        for x in Configuration::all(f.len()) {
            checked += 1;
            let expected = ts_of(f, &x);
            let p = engine.propagate_only(&circuit.input_assumptions(&x)).unwrap();
            let complete = !p.is_conflict()
                && (0..f.len()).all(|i| {
                    [true, false]
                        .iter()
                        .all(|&b| p.value(circuit.output().rail(b, i)) == Some(expected.rail(b, i)))
                });
            if !complete {
                incomplete.push(format!("#{idx} at {x}"));
            }
        }
    }
    Verdict::check(
        incomplete.is_empty(),
        format!("{checked} inputs propagated without decisions; incomplete {incomplete:?}"),
    )
}

fn criterion8() -> Verdict {
    let f = cascade();
    let e = export_qdimacs(&f, &assignment(&[(0, true)]), 2, &ReprogrammingOptions::default()).unwrap();
    let budget = e.budget.core();
    let parsed = parse_qdimacs(&e.text).map(|q| q == e.formula && q.is_closed()).unwrap_or(false);
    let mut disagreements = Vec::new();
    let mut compared = 0;
    for seed in 0..24u64 {
        let mut r = rng(5000 + seed);
        let n = 3 + (seed % 3) as usize;
        let g = random_network(&mut r, n, 3);
        let size = r.gen_range(1..=2);
        let m = random_marker(&mut r, &g, size);
        let k = (seed % 3) as usize;
        let options = ReprogrammingOptions {
            forbid_marker_nodes: seed % 2 == 0,
            ..ReprogrammingOptions::default()
        };
        let q = export_qdimacs(&g, &m, k, &options).unwrap();
        let qbf = expand_and_solve(&q.formula).unwrap();
        let cegar = solve_reprogramming(&g, &m, k, &options).unwrap().status == Status::Sat;
        compared += 1;
        if qbf != cegar {
            disagreements.push(seed);
        }
    }
    Verdict::check(
        budget == 104 && parsed && disagreements.is_empty(),
        format!("n=4 core variables {budget}, parses={parsed}; {compared} expansions, disagreements {disagreements:?}"),
    )
}

const SCALE_N: usize = 200;
const SCALE_INSTANCES: u64 = 20;
const SCALE_K: usize = 4;
const SCALE_TIMEOUT: Duration = Duration::from_secs(120);

fn criterion9() -> Verdict {
    let mut v2_solved = 0;
    let mut trend_violations = Vec::new();
    let mut rows = Vec::new();
    for seed in 1..=SCALE_INSTANCES {
        let mut r = rng(seed);
        let f = random_network(&mut r, SCALE_N, 3);
        let m = random_marker(&mut r, &f, 3);
        let mut ces = Vec::new();
        for v in [RefinementVariant::V2, RefinementVariant::V1, RefinementVariant::V0] {
            // an instance some variant already missed is not commonly solved
            if ces.iter().any(Option::is_none) {
                ces.push(None);
                continue;
            }
            let options = ReprogrammingOptions {
                variant: v,
                forbid_marker_nodes: true,
                timeout: Some(SCALE_TIMEOUT),
                ..ReprogrammingOptions::default()
            };
            let start = Instant::now();
            let out = solve_reprogramming(&f, &m, SCALE_K, &options).unwrap();
            let done = out.status != Status::Timeout && start.elapsed() <= SCALE_TIMEOUT;
            ces.push(done.then_some(out.stats.counter_examples));
            if v == RefinementVariant::V2 && done {
                v2_solved += 1;
            }
        }
        let [c2, c1, c0] = [ces[0], ces[1], ces[2]];
        if let (Some(c2), Some(c1), Some(c0)) = (c2, c1, c0) {
            if !(c2 <= c1 && c1 <= c0) {
                trend_violations.push(seed);
            }
        }
        let show = |c: Option<u64>| c.map_or("-".to_string(), |c| c.to_string());
        rows.push(format!("{seed}:{}/{}/{}", show(c0), show(c1), show(c2)));
    }
    let ratio = v2_solved as f64 / SCALE_INSTANCES as f64;
    Verdict::check(
        ratio >= 0.8 && trend_violations.is_empty(),
        format!(
            "V2 solved {v2_solved}/{SCALE_INSTANCES}; counter-examples V0/V1/V2 per seed, - for unsolved or skipped [{}]; \
             trend violations {trend_violations:?}",
            rows.join(" ")
        ),
    )
}

/// Refinements checked per instance and variant.
const SAFETY_REFINEMENTS: usize = 12;

fn refinement_safety(inst: &Instance, variant: RefinementVariant) -> Result<usize, String> {
    let f = &inst.f;
    let n = f.len();
    let options = ReprogrammingOptions {
        variant,
        ..inst.options.clone()
    };
    let allowed: Vec<usize> = options
        .controllable(n, &inst.marker)
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| c.then_some(i))
        .collect();
    let domain: Vec<(PartialAssignment, Vec<Subcube>)> = perturbations(&allowed, SUITE_K)
        .into_iter()
        .map(|p| {
            let mts = brute_mts(&f.perturbed(&p)).unwrap();
            (p, mts)
        })
        .collect();
    let mut solver = ReprogrammingSolver::new(f, &inst.marker, SUITE_K, &options).map_err(|e| e.to_string())?;
    let mut rejected: Vec<PartialAssignment> = Vec::new();
    let mut refinements = 0;
    'bounds: for bound in 0..=SUITE_K {
        while let Some(p) = solver.candidate(bound).map_err(|e| e.to_string())? {
            if rejected.contains(&p) {
                return Err(format!("rejected candidate {p:?} returned again"));
            }
            let Some(x) = solver.counter_example(&p).map_err(|e| e.to_string())? else {
                solver.block_supersets(&p);
                continue;
            };
            solver.refine(&p, &x).map_err(|e| e.to_string())?;
            refinements += 1;
            if solver.is_feasible(&p).map_err(|e| e.to_string())? {
                return Err(format!("{p:?} feasible after its refinement"));
            }
            rejected.push(p);
            if variant != RefinementVariant::V0 {
                let point = Subcube::point(&x);
                for (q, mts) in &domain {
                    let in_mts = mts.iter().any(|m| point.is_subcube_of(m));
                    if in_mts && solver.is_feasible(q).map_err(|e| e.to_string())? {
                        return Err(format!("{q:?} keeps {x} in a minimal trap space yet stays feasible"));
                    }
                }
            }
            if refinements >= SAFETY_REFINEMENTS {
                break 'bounds;
            }
        }
    }
    Ok(refinements)
}

fn criterion10(suite: &[Instance]) -> Verdict {
    let mut failures = Vec::new();
    let mut refinements = 0;
    for (idx, inst) in suite.iter().enumerate() {
        for v in RefinementVariant::ALL {
            match refinement_safety(inst, v) {
                Ok(r) => refinements += r,
                Err(e) => failures.push(format!("#{idx} V{v}: {e}")),
            }
        }
    }
    Verdict::check(
        failures.is_empty(),
        format!("{refinements} refinements checked; failures {failures:?}"),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() -> ExitCode {
    let suite = suite();
    let sizes: BTreeSet<usize> = suite.iter().map(|i| i.f.len()).collect();
    assert_eq!(sizes, (3..=8).collect());

    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("saturation trace", Box::new(criterion1)),
        ("trap-space facts, mirror network", Box::new(criterion2)),
        ("MTS enumeration, toggle network", Box::new(criterion3)),
        ("reprogramming golden run", Box::new(criterion4)),
        ("synthesis golden run", Box::new(criterion5)),
        ("oracle equivalence suite", Box::new(|| criterion6(&suite))),
        ("propagation completeness", Box::new(|| criterion7(&suite))),
        ("QDIMACS budget and verdicts", Box::new(criterion8)),
        ("scale smoke test", Box::new(criterion9)),
        ("refinement safety", Box::new(|| criterion10(&suite))),
    ];

    // optional criterion numbers select a subset; flags from the test runner are ignored
    let selected: BTreeSet<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(i + 1)) {
            continue;
        }
        let v = run();
        let label = if v.pass { "PASS" } else { "FAIL" };
        let note = if v.known_erratum { " [reference data inconsistent; remainder verified]" } else { "" };
        println!("criterion {:>2} {label} {name}{note}: {}", i + 1, v.detail);
        if !v.pass && !v.known_erratum {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed");
        ExitCode::FAILURE
    }
}
