//! Plain unit propagation over a recorded CNF.

use super::{ClauseSink, CnfFormula, Lit, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Conflict,
    /// Per-variable values derived by propagation (index 0 unused).
    Fixed(Vec<Option<bool>>),
}

impl Propagation {
    pub fn value(&self, lit: Lit) -> Option<bool> {
        match self {
            Propagation::Conflict => None,
            Propagation::Fixed(values) => {
                values[lit.var().index()].map(|v| v == lit.is_positive())
            }
        }
    }

    pub fn var_value(&self, var: Var) -> Option<bool> {
        self.value(var.pos())
    }

    pub fn is_conflict(&self) -> bool {
        matches!(self, Propagation::Conflict)
    }
}

fn code(l: Lit) -> usize {
    2 * l.var().index() + usize::from(!l.is_positive())
}

fn assign(values: &mut [Option<bool>], trail: &mut Vec<Lit>, l: Lit) -> bool {
    match values[l.var().index()] {
        Some(v) => v == l.is_positive(),
        None => {
            values[l.var().index()] = Some(l.is_positive());
            trail.push(l);
            true
        }
    }
}

/// Propagates `assumptions` to fixpoint. Each clause is revisited whenever
/// one of its literals becomes false.
pub fn unit_propagate(cnf: &CnfFormula, assumptions: &[Lit]) -> Propagation {
    let n = cnf.num_vars();
    let mut values: Vec<Option<bool>> = vec![None; n + 1];
    let mut trail: Vec<Lit> = Vec::new();
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 2];
    for (idx, c) in cnf.clauses().iter().enumerate() {
        for &l in c {
            occurs[code(l)].push(idx);
        }
    }

    for &a in assumptions {
        if !assign(&mut values, &mut trail, a) {
            return Propagation::Conflict;
        }
    }

    let examine = |values: &[Option<bool>], clause: &[Lit]| -> Result<Option<Lit>, ()> {
        let mut open = None;
        let mut open_count = 0;
        for &l in clause {
            match values[l.var().index()] {
                Some(v) if v == l.is_positive() => return Ok(None),
                Some(_) => {}
                None => {
                    if open != Some(l) {
                        open_count += 1;
                    }
                    open = Some(l);
                }
            }
        }
        match open_count {
            0 => Err(()),
            1 => Ok(open),
            _ => Ok(None),
        }
    };

    let mut pending: Vec<Lit> = Vec::new();
    for c in cnf.clauses() {
        match examine(&values, c) {
            Err(()) => return Propagation::Conflict,
            Ok(Some(unit)) => pending.push(unit),
            Ok(None) => {}
        }
    }
    for unit in pending {
        if !assign(&mut values, &mut trail, unit) {
            return Propagation::Conflict;
        }
    }

    let mut head = 0;
    while let Some(&l) = trail.get(head) {
        head += 1;
        for &idx in &occurs[code(-l)] {
            match examine(&values, &cnf.clauses()[idx]) {
                Err(()) => return Propagation::Conflict,
                Ok(Some(unit)) => {
                    if !assign(&mut values, &mut trail, unit) {
                        return Propagation::Conflict;
                    }
                }
                Ok(None) => {}
            }
        }
    }
    Propagation::Fixed(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::ClauseSink;

    #[test]
    fn chain_propagates() {
        let mut cnf = CnfFormula::new();
        let a = cnf.new_var();
        let b = cnf.new_var();
        let c = cnf.new_var();
        cnf.add_clause(&[a.neg(), b.pos()]);
        cnf.add_clause(&[b.neg(), c.pos()]);
        let p = unit_propagate(&cnf, &[a.pos()]);
        assert_eq!(p.var_value(c), Some(true));
        let q = unit_propagate(&cnf, &[]);
        assert_eq!(q.var_value(c), None);
        let r = unit_propagate(&cnf, &[a.pos(), c.neg()]);
        assert!(r.is_conflict());
    }

    #[test]
    fn and_gate() {
        let mut cnf = CnfFormula::new();
        let v: Vec<Var> = (0..4).map(|_| cnf.new_var()).collect();
        // v3 <-> v0 & v1 & v2
        cnf.add_clause(&[v[0].neg(), v[1].neg(), v[2].neg(), v[3].pos()]);
        for i in 0..3 {
            cnf.add_clause(&[v[3].neg(), v[i].pos()]);
        }
        let p = unit_propagate(&cnf, &[v[0].pos(), v[1].pos(), v[2].pos()]);
        assert_eq!(p.var_value(v[3]), Some(true));
        let p = unit_propagate(&cnf, &[v[1].neg()]);
        assert_eq!(p.var_value(v[3]), Some(false));
        let p = unit_propagate(&cnf, &[v[3].pos()]);
        assert_eq!(p.var_value(v[2]), Some(true));
        let p = unit_propagate(&cnf, &[v[0].pos(), v[1].pos(), v[3].neg()]);
        assert_eq!(p.var_value(v[2]), Some(false));
    }

    #[test]
    fn unit_clause_in_formula() {
        let mut cnf = CnfFormula::new();
        let a = cnf.new_var();
        let b = cnf.new_var();
        cnf.add_clause(&[a.pos()]);
        cnf.add_clause(&[a.neg(), b.neg()]);
        let p = unit_propagate(&cnf, &[]);
        assert_eq!(p.var_value(b), Some(false));
        cnf.add_clause(&[]);
        assert!(unit_propagate(&cnf, &[]).is_conflict());
    }
}
