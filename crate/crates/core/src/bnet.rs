//! Reader for the `bnet` text format.
//!
//! One component per line, `name, expression`, with `!` binding tighter than
//! `&`, which binds tighter than `|`. Lines starting with `#` and the usual
//! `targets, factors` header are skipped. Expressions are normalized into
//! irredundant unate DNFs; a component referenced with both signs is
//! rejected.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::bn::{is_identifier, BooleanNetwork, ComponentId, Literal, UnateDnf};
use crate::error::{Error, Result};

/// Upper bound on the number of DNF clauses produced while distributing an
/// expression.
pub const DNF_CLAUSE_LIMIT: usize = 1 << 16;

pub fn parse_bnet(text: &str) -> Result<BooleanNetwork> {
    let mut rows: Vec<(usize, usize, String, &str)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(comma) = raw.find(',') else {
            return Err(Error::Syntax {
                line: lineno + 1,
                column: raw.len() + 1,
                message: "expected `name, expression`".into(),
            });
        };
        let name = raw[..comma].trim();
        if rows.is_empty() && name.eq_ignore_ascii_case("targets") {
            continue;
        }
        if !is_identifier(name) || name == "0" || name == "1" {
            return Err(Error::Syntax {
                line: lineno + 1,
                column: 1,
                message: format!("invalid component name `{name}`"),
            });
        }
        rows.push((lineno + 1, comma + 1, name.to_string(), &raw[comma + 1..]));
    }

    let mut index: HashMap<&str, ComponentId> = HashMap::new();
    for (i, row) in rows.iter().enumerate() {
        if index.insert(row.2.as_str(), i).is_some() {
            return Err(Error::DuplicateComponent(row.2.clone()));
        }
    }

    let mut functions = Vec::with_capacity(rows.len());
    for (line, offset, name, body) in &rows {
        let tokens = tokenize(body, *line, *offset)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            line: *line,
            end_column: offset + body.chars().count() + 1,
        };
        let expr = parser.parse_expr()?;
        if let Some(tok) = parser.peek() {
            return Err(Error::Syntax {
                line: *line,
                column: tok.column,
                message: format!("unexpected {}", tok.kind.describe()),
            });
        }
        let names: Vec<&String> = rows.iter().map(|r| &r.2).collect();
        functions.push(expr_to_dnf(&expr, &index, name, *line, &names)?);
    }
    let names = rows.into_iter().map(|r| r.2).collect();
    BooleanNetwork::new(names, functions)
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Ident(String),
    Const(bool),
    Not,
    And,
    Or,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Const(b) => format!("constant `{}`", u8::from(*b)),
            TokenKind::Not => "`!`".into(),
            TokenKind::And => "`&`".into(),
            TokenKind::Or => "`|`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    column: usize,
}

fn tokenize(body: &str, line: usize, offset: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = body.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let column = offset + i + 1;
        let c = chars[i];
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => TokenKind::Not,
            '&' => TokenKind::And,
            '|' => TokenKind::Or,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '.' | ':' | '\''))
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let kind = match word.as_str() {
                    "0" | "false" => TokenKind::Const(false),
                    "1" | "true" => TokenKind::Const(true),
                    _ => TokenKind::Ident(word),
                };
                tokens.push(Token { kind, column });
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        tokens.push(Token { kind, column });
        i += 1;
    }
    Ok(tokens)
}

#[derive(Clone, Debug)]
enum Expr {
    Const(bool),
    Var(String),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error_here(&self, message: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.peek().map_or(self.end_column, |t| t.column),
            message: message.to_string(),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.parse_and()?];
        while matches!(self.peek(), Some(Token { kind: TokenKind::Or, .. })) {
            self.pos += 1;
            terms.push(self.parse_and()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Or(terms)
        })
    }

    fn parse_and(&mut self) -> Result<Expr> {
        let mut factors = vec![self.parse_unary()?];
        while matches!(self.peek(), Some(Token { kind: TokenKind::And, .. })) {
            self.pos += 1;
            factors.push(self.parse_unary()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::And(factors)
        })
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_here("unexpected end of expression"));
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Not => Ok(Expr::Not(Box::new(self.parse_unary()?))),
            TokenKind::Const(b) => Ok(Expr::Const(b)),
            TokenKind::Ident(name) => Ok(Expr::Var(name)),
            TokenKind::LParen => {
                let inner = self.parse_expr()?;
                match self.peek() {
                    Some(Token {
                        kind: TokenKind::RParen,
                        ..
                    }) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error_here("expected `)`")),
                }
            }
            other => {
                self.pos -= 1;
                Err(self.error_here(&format!("unexpected {}", other.describe())))
            }
        }
    }
}

/// Clauses as literal sets; `[{}]` is true and `[]` is false.
type Dnf = Vec<BTreeSet<Literal>>;

fn expr_to_dnf(
    expr: &Expr,
    index: &HashMap<&str, ComponentId>,
    component: &str,
    line: usize,
    names: &[&String],
) -> Result<UnateDnf> {
    let mut signs: BTreeMap<ComponentId, bool> = BTreeMap::new();
    // Signs are checked on the negation normal form, before distribution
    // could hide a literal next to its complement.
    let dnf = nnf_dnf(expr, true, index, line, component, &mut signs)?;
    UnateDnf::from_clauses(dnf).map_err(|var| Error::NonUnate {
        component: component.to_string(),
        variable: names[var].to_string(),
    })
}

fn nnf_dnf(
    expr: &Expr,
    positive: bool,
    index: &HashMap<&str, ComponentId>,
    line: usize,
    component: &str,
    signs: &mut BTreeMap<ComponentId, bool>,
) -> Result<Dnf> {
    let limit_error = || Error::DnfTooLarge {
        component: component.to_string(),
        limit: DNF_CLAUSE_LIMIT,
    };
    Ok(match expr {
        Expr::Const(b) => {
            if *b == positive {
                vec![BTreeSet::new()]
            } else {
                Vec::new()
            }
        }
        Expr::Var(name) => {
            let var = *index.get(name.as_str()).ok_or_else(|| Error::UndefinedComponent {
                line,
                name: name.clone(),
            })?;
            if let Some(previous) = signs.insert(var, positive) {
                if previous != positive {
                    return Err(Error::NonUnate {
                        component: component.to_string(),
                        variable: name.clone(),
                    });
                }
            }
            vec![BTreeSet::from([Literal::new(var, positive)])]
        }
        Expr::Not(inner) => nnf_dnf(inner, !positive, index, line, component, signs)?,
        Expr::And(items) | Expr::Or(items) => {
            let conjunctive = matches!(expr, Expr::And(_)) == positive;
            let parts = items
                .iter()
                .map(|e| nnf_dnf(e, positive, index, line, component, signs))
                .collect::<Result<Vec<_>>>()?;
            if conjunctive {
                let mut acc: Dnf = vec![BTreeSet::new()];
                for part in parts {
                    if acc.len().saturating_mul(part.len()) > DNF_CLAUSE_LIMIT {
                        return Err(limit_error());
                    }
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for a in &acc {
                        for b in &part {
                            next.push(a.union(b).copied().collect());
                        }
                    }
                    acc = next;
                }
                acc
            } else {
                let out: Dnf = parts.into_iter().flatten().collect();
                if out.len() > DNF_CLAUSE_LIMIT {
                    return Err(limit_error());
                }
                out
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{Configuration, Sign};

    const EXAMPLE1: &str = "a, b\nb, a\nc, !d & (a | b)\nd, !c";

    #[test]
    fn parses_mirror() {
        let f = parse_bnet(EXAMPLE1).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f.names(), &["a", "b", "c", "d"]);
        let x: Configuration = "1100".parse().unwrap();
        assert!(f.eval_local(2, &x));
        assert_eq!(f.function(2).clauses().len(), 2);
        assert_eq!(
            f.function(2).support(),
            vec![(0, Sign::Positive), (1, Sign::Positive), (3, Sign::Negative)]
        );
    }

    #[test]
    fn constants() {
        let f = parse_bnet("a, 1").unwrap();
        assert_eq!(f.function(0).as_constant(), Some(true));
        let g = parse_bnet("a, a | 1\nb, b & 0").unwrap();
        assert_eq!(g.function(0).as_constant(), Some(true));
        assert_eq!(g.function(1).as_constant(), Some(false));
    }

    #[test]
    fn rejects_both_signs() {
        match parse_bnet("a, b & !b\nb, a") {
            Err(Error::NonUnate {
                component,
                variable,
            }) => {
                assert_eq!(component, "a");
                assert_eq!(variable, "b");
            }
            other => panic!("expected NonUnate, got {other:?}"),
        }
        assert!(matches!(
            parse_bnet("a, (a & !b) | (!a & b)\nb, a"),
            Err(Error::NonUnate { .. })
        ));
    }

    #[test]
    fn reports_positions() {
        match parse_bnet("a, b\nb, a & (b") {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 10);
            }
            other => panic!("{other:?}"),
        }
        match parse_bnet("a, b $ a\nb, a") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_bnet("a, zz"),
            Err(Error::UndefinedComponent { line: 1, .. })
        ));
        assert!(matches!(
            parse_bnet("a, a\na, 1"),
            Err(Error::DuplicateComponent(_))
        ));
    }

    #[test]
    fn skips_header_and_comments() {
        let f = parse_bnet("# comment\ntargets, factors\nx, !y\n\ny, x\n").unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn precedence() {
        // a | b & c == a | (b & c)
        let f = parse_bnet("a, a | b & c\nb, b\nc, c").unwrap();
        assert_eq!(f.function(0).clauses().len(), 2);
        let g = parse_bnet("a, !(a | b) \nb, b").unwrap();
        assert_eq!(g.function(0).clauses().len(), 1);
        assert_eq!(g.function(0).clauses()[0].len(), 2);
    }

    #[test]
    fn serialize_round_trip() {
        let f = parse_bnet(EXAMPLE1).unwrap();
        let g = parse_bnet(&f.to_bnet()).unwrap();
        assert_eq!(f, g);
    }
}
