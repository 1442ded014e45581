//! Monolithic 3-QBF model of reprogramming in QDIMACS.
//!
//! `∃P ∀x ∃(TS(x), y, TS(y), diff, counter)`: either `x` matches the
//! marker, or some `y` in `TS(x)` has a strictly smaller trap space.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bn::{BooleanNetwork, PartialAssignment};
use crate::cegar::ReprogrammingOptions;
use crate::encoding::{
    encode_containment, encode_ts_circuit_with, new_inputs, EncodeOptions, FunctionSpec, PerturbationVars,
    SequentialCounter,
};
use crate::error::{Error, Result};
use crate::sat::{CadicalEngine, ClauseSink, CnfFormula, Lit, SatEngine, SolveResult, Var};

/// Variable counts per role.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VariableBudget {
    pub clamps: usize,
    pub inputs: usize,
    pub ts_x: usize,
    pub witness: usize,
    pub ts_y: usize,
    pub diff: usize,
    /// Definitions introduced for wide local functions.
    pub function_aux: usize,
    pub cardinality: usize,
}

impl VariableBudget {
    /// Everything except cardinality and function auxiliaries.
    pub fn core(&self) -> usize {
        self.clamps + self.inputs + self.ts_x + self.witness + self.ts_y + self.diff
    }

    pub fn total(&self) -> usize {
        self.core() + self.function_aux + self.cardinality
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qdimacs {
    pub num_vars: usize,
    pub prefix: Vec<(Quantifier, Vec<Var>)>,
    pub clauses: Vec<Vec<Lit>>,
}

#[derive(Clone, Debug)]
pub struct QdimacsExport {
    pub text: String,
    pub budget: VariableBudget,
    pub formula: Qdimacs,
}

pub fn export_qdimacs(
    f: &BooleanNetwork,
    marker: &PartialAssignment,
    k: usize,
    options: &ReprogrammingOptions,
) -> Result<QdimacsExport> {
    let n = f.len();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the {n} components")));
    }
    if let Some(i) = marker.max_key().filter(|&i| i >= n) {
        return Err(Error::Dimension { expected: n, found: i + 1 });
    }
    let mut cnf = CnfFormula::with_labels();
    let mut budget = VariableBudget::default();
    let layer_vars = 2 * n * (n + 1);

    let clamps = PerturbationVars::new(&mut cnf, f, &options.controllable(n, marker));
    budget.clamps = cnf.num_vars();
    let outer_end = cnf.num_vars();
    let x = new_inputs(&mut cnf, n, "x");
    budget.inputs = n;
    let forall_end = cnf.num_vars();

    for c in clamps.clamps().iter().flatten() {
        cnf.add_clause(&[c.clamped.pos(), c.value.neg()]);
    }
    let spec = FunctionSpec::Perturbable(f, &clamps);
    let before = cnf.num_vars();
    let ts_x = encode_ts_circuit_with(&mut cnf, spec, &x, &EncodeOptions::tagged("tsx"));
    budget.ts_x = layer_vars;
    budget.function_aux += cnf.num_vars() - before - layer_vars;

    let y = new_inputs(&mut cnf, n, "y");
    budget.witness = n;
    let before = cnf.num_vars();
    let ts_y = encode_ts_circuit_with(&mut cnf, spec, &y, &EncodeOptions::tagged("tsy"));
    budget.ts_y = layer_vars;
    budget.function_aux += cnf.num_vars() - before - layer_vars;

    let out = ts_x.output();
    for (i, &yi) in y.iter().enumerate() {
        cnf.add_clause(&[-yi, out.one[i]]);
        cnf.add_clause(&[yi, out.zero[i]]);
    }
    let diffs = encode_containment(&mut cnf, out, ts_y.output(), false);
    budget.diff = diffs.len();
    for (i, b) in marker.iter() {
        let mut clause = vec![x[i].var().lit(b)];
        clause.extend(diffs.iter().map(|d| d.pos()));
        cnf.add_clause(&clause);
    }

    let before = cnf.num_vars();
    let clamped: Vec<Lit> = clamps.clamped_vars().iter().map(|v| v.pos()).collect();
    let counter = SequentialCounter::new(&mut cnf, &clamped, k);
    if let Some(bound) = counter.at_most(k) {
        cnf.add_clause(&[bound]);
    }
    budget.cardinality = cnf.num_vars() - before;

    let range = |a: usize, b: usize| (a + 1..=b).map(Var::from_index).collect::<Vec<_>>();
    let mut prefix = Vec::new();
    if outer_end > 0 {
        prefix.push((Quantifier::Exists, range(0, outer_end)));
    }
    prefix.push((Quantifier::Forall, range(outer_end, forall_end)));
    if cnf.num_vars() > forall_end {
        prefix.push((Quantifier::Exists, range(forall_end, cnf.num_vars())));
    }
    let formula = Qdimacs {
        num_vars: cnf.num_vars(),
        prefix,
        clauses: cnf.clauses().to_vec(),
    };

    let mut text = String::new();
    let _ = writeln!(text, "c marker reprogramming, n = {n}, k = {k}");
    let _ = writeln!(
        text,
        "c variables: clamps {} inputs {} ts(x) {} y {} ts(y) {} diff {} function-aux {} cardinality {}",
        budget.clamps, budget.inputs, budget.ts_x, budget.witness, budget.ts_y, budget.diff, budget.function_aux,
        budget.cardinality
    );
    let _ = writeln!(text, "c cardinality counter lives in the innermost existential block");
    for (v, name) in cnf.labels() {
        let _ = writeln!(text, "c {} {}", v.index(), name);
    }
    text.push_str(&formula.to_string());
    Ok(QdimacsExport { text, budget, formula })
}

impl std::fmt::Display for Qdimacs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for (q, vars) in &self.prefix {
            f.write_str(match q {
                Quantifier::Exists => "e",
                Quantifier::Forall => "a",
            })?;
            for v in vars {
                write!(f, " {}", v.index())?;
            }
            f.write_str(" 0\n")?;
        }
        for c in &self.clauses {
            for l in c {
                write!(f, "{} ", l.dimacs())?;
            }
            f.write_str("0\n")?;
        }
        Ok(())
    }
}

/// Parses QDIMACS, checking header counts and that no variable is bound
/// twice.
pub fn parse_qdimacs(text: &str) -> Result<Qdimacs> {
    let err = |line: usize, msg: &str| Error::Qdimacs(format!("line {line}: {msg}"));
    let mut header: Option<(usize, usize)> = None;
    let mut prefix: Vec<(Quantifier, Vec<Var>)> = Vec::new();
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut bound = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().expect("non-empty line");
        if first == "p" {
            if header.is_some() {
                return Err(err(line_no, "second header"));
            }
            let fields: Vec<&str> = tokens.collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(err(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let v = fields[1].parse().map_err(|_| err(line_no, "bad variable count"))?;
            let c = fields[2].parse().map_err(|_| err(line_no, "bad clause count"))?;
            header = Some((v, c));
            bound = vec![false; v + 1];
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(err(line_no, "content before header"));
        };
        if first == "a" || first == "e" {
            if !clauses.is_empty() || !current.is_empty() {
                return Err(err(line_no, "quantifier after clauses"));
            }
            let q = if first == "a" { Quantifier::Forall } else { Quantifier::Exists };
            let mut vars = Vec::new();
            let mut closed = false;
            for t in tokens {
                let v: i64 = t.parse().map_err(|_| err(line_no, "bad variable"))?;
                if v == 0 {
                    closed = true;
                    break;
                }
                if v < 0 || v as usize > num_vars {
                    return Err(err(line_no, "variable out of range"));
                }
                if std::mem::replace(&mut bound[v as usize], true) {
                    return Err(err(line_no, "variable quantified twice"));
                }
                vars.push(Var::from_index(v as usize));
            }
            if !closed {
                return Err(err(line_no, "quantifier line without terminating 0"));
            }
            if prefix.last().is_some_and(|(last, _)| *last == q) {
                return Err(err(line_no, "adjacent blocks with the same quantifier"));
            }
            prefix.push((q, vars));
            continue;
        }
        for t in std::iter::once(first).chain(tokens) {
            let v: i64 = t.parse().map_err(|_| err(line_no, "bad literal"))?;
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if v.unsigned_abs() as usize > num_vars {
                    return Err(err(line_no, "literal out of range"));
                }
                current.push(Lit::from_dimacs(v as i32));
            }
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(Error::Qdimacs("missing header".into()));
    };
    if !current.is_empty() {
        return Err(Error::Qdimacs("unterminated clause".into()));
    }
    if clauses.len() != num_clauses {
        return Err(Error::Qdimacs(format!(
            "header declares {num_clauses} clauses, found {}",
            clauses.len()
        )));
    }
    Ok(Qdimacs {
        num_vars,
        prefix,
        clauses,
    })
}

impl Qdimacs {
    /// Whether every variable belongs to exactly one block.
    pub fn is_closed(&self) -> bool {
        let mut seen = vec![false; self.num_vars + 1];
        for (_, vars) in &self.prefix {
            for v in vars {
                if std::mem::replace(&mut seen[v.index()], true) {
                    return false;
                }
            }
        }
        seen[1..].iter().all(|&s| s)
    }
}

/// Largest number of expanded (non-innermost) variables accepted.
pub const EXPANSION_LIMIT: usize = 24;

/// Truth of a closed QBF by expanding every block except an innermost
/// existential one, which goes to the SAT engine.
pub fn expand_and_solve(q: &Qdimacs) -> Result<bool> {
    let mut blocks = q.prefix.clone();
    let inner_exists = matches!(blocks.last(), Some((Quantifier::Exists, _)));
    if inner_exists {
        blocks.pop();
    }
    let expanded: usize = blocks.iter().map(|(_, v)| v.len()).sum();
    if expanded > EXPANSION_LIMIT {
        return Err(Error::OracleScale(format!(
            "expansion over {expanded} variables exceeds {EXPANSION_LIMIT}"
        )));
    }
    let mut engine = CadicalEngine::new();
    while engine.num_vars() < q.num_vars {
        engine.new_var();
    }
    for c in &q.clauses {
        engine.add_clause(c);
    }
    let mut assumptions = Vec::new();
    Ok(expand(&mut engine, &blocks, 0, &mut assumptions))
}

fn expand(engine: &mut CadicalEngine, blocks: &[(Quantifier, Vec<Var>)], depth: usize, assumptions: &mut Vec<Lit>) -> bool {
    let Some((q, vars)) = blocks.get(depth) else {
        return engine.solve(assumptions) == SolveResult::Sat;
    };
    let base = assumptions.len();
    let total = 1u64 << vars.len();
    for mask in 0..total {
        assumptions.truncate(base);
        assumptions.extend(vars.iter().enumerate().map(|(i, v)| v.lit(mask >> i & 1 == 1)));
        let value = expand(engine, blocks, depth + 1, assumptions);
        match (q, value) {
            (Quantifier::Exists, true) => {
                assumptions.truncate(base);
                return true;
            }
            (Quantifier::Forall, false) => {
                assumptions.truncate(base);
                return false;
            }
            _ => {}
        }
    }
    assumptions.truncate(base);
    *q == Quantifier::Forall
}
