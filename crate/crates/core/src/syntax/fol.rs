use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lexer::{indexed, Cursor, Token};
use super::ParseError;

/// An individual variable of the correspondence language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_owned())
    }
}

/// The three binary relation symbols of the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    /// `R`, the intuitionistic accessibility relation.
    Access,
    /// `R□` (written `Rb`).
    Box,
    /// `R◇` (written `Rd`).
    Diamond,
}

impl Rel {
    pub const ALL: [Rel; 3] = [Rel::Access, Rel::Box, Rel::Diamond];

    pub fn ascii(self) -> &'static str {
        match self {
            Rel::Access => "R",
            Rel::Box => "Rb",
            Rel::Diamond => "Rd",
        }
    }

    pub fn unicode(self) -> &'static str {
        match self {
            Rel::Access => "R",
            Rel::Box => "R□",
            Rel::Diamond => "R◇",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ascii())
    }
}

impl FromStr for Rel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" => Ok(Rel::Access),
            "Rb" | "R□" => Ok(Rel::Box),
            "Rd" | "R◇" => Ok(Rel::Diamond),
            other => Err(format!("unknown relation `{other}` (expected R, Rb or Rd)")),
        }
    }
}

/// A first-order formula over `{R, R□, R◇, P1, P2, ...}` without identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FolFormula {
    Bottom,
    Pred(u32, Var),
    Rel(Rel, Var, Var),
    And(Box<FolFormula>, Box<FolFormula>),
    Or(Box<FolFormula>, Box<FolFormula>),
    Implies(Box<FolFormula>, Box<FolFormula>),
    Forall(Var, Box<FolFormula>),
    Exists(Var, Box<FolFormula>),
}

impl FolFormula {
    pub fn pred(n: u32, v: impl Into<Var>) -> Self {
        FolFormula::Pred(n, v.into())
    }

    pub fn rel(r: Rel, a: impl Into<Var>, b: impl Into<Var>) -> Self {
        FolFormula::Rel(r, a.into(), b.into())
    }

    pub fn and(l: Self, r: Self) -> Self {
        FolFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Self, r: Self) -> Self {
        FolFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Self, r: Self) -> Self {
        FolFormula::Implies(Box::new(l), Box::new(r))
    }

    pub fn forall(v: impl Into<Var>, body: Self) -> Self {
        FolFormula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<Var>, body: Self) -> Self {
        FolFormula::Exists(v.into(), Box::new(body))
    }

    /// Quantifier rank: 0 on atoms, max over connectives, +1 per quantifier.
    pub fn degree(&self) -> usize {
        match self {
            FolFormula::Bottom | FolFormula::Pred(..) | FolFormula::Rel(..) => 0,
            FolFormula::And(l, r) | FolFormula::Or(l, r) | FolFormula::Implies(l, r) => {
                l.degree().max(r.degree())
            }
            FolFormula::Forall(_, b) | FolFormula::Exists(_, b) => b.degree() + 1,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a Var>, out: &mut BTreeSet<Var>) {
        let mut note = |v: &'a Var, bound: &Vec<&'a Var>| {
            if !bound.contains(&v) {
                out.insert(v.clone());
            }
        };
        match self {
            FolFormula::Bottom => {}
            FolFormula::Pred(_, v) => note(v, bound),
            FolFormula::Rel(_, a, b) => {
                note(a, bound);
                note(b, bound);
            }
            FolFormula::And(l, r) | FolFormula::Or(l, r) | FolFormula::Implies(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            FolFormula::Forall(v, b) | FolFormula::Exists(v, b) => {
                bound.push(v);
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Unary predicate indices occurring in the formula.
    pub fn predicates(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let FolFormula::Pred(n, _) = f {
                out.insert(*n);
            }
        });
        out
    }

    /// Binary relation symbols occurring in the formula.
    pub fn relations(&self) -> BTreeSet<Rel> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let FolFormula::Rel(r, ..) = f {
                out.insert(*r);
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&FolFormula)) {
        f(self);
        match self {
            FolFormula::And(l, r) | FolFormula::Or(l, r) | FolFormula::Implies(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            FolFormula::Forall(_, b) | FolFormula::Exists(_, b) => b.visit(f),
            _ => {}
        }
    }

    /// Equality up to consistent renaming of bound variables.
    pub fn alpha_eq(&self, other: &FolFormula) -> bool {
        fn go<'a>(
            a: &'a FolFormula,
            b: &'a FolFormula,
            env: &mut Vec<(&'a Var, &'a Var)>,
        ) -> bool {
            let same = |x: &Var, y: &Var, env: &Vec<(&Var, &Var)>| {
                // innermost binding wins
                for (l, r) in env.iter().rev() {
                    if *l == x || *r == y {
                        return *l == x && *r == y;
                    }
                }
                x == y
            };
            match (a, b) {
                (FolFormula::Bottom, FolFormula::Bottom) => true,
                (FolFormula::Pred(n, x), FolFormula::Pred(m, y)) => n == m && same(x, y, env),
                (FolFormula::Rel(r, x1, x2), FolFormula::Rel(s, y1, y2)) => {
                    r == s && same(x1, y1, env) && same(x2, y2, env)
                }
                (FolFormula::And(l1, r1), FolFormula::And(l2, r2))
                | (FolFormula::Or(l1, r1), FolFormula::Or(l2, r2))
                | (FolFormula::Implies(l1, r1), FolFormula::Implies(l2, r2)) => {
                    go(l1, l2, env) && go(r1, r2, env)
                }
                (FolFormula::Forall(x, b1), FolFormula::Forall(y, b2))
                | (FolFormula::Exists(x, b1), FolFormula::Exists(y, b2)) => {
                    env.push((x, y));
                    let ok = go(b1, b2, env);
                    env.pop();
                    ok
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Renames free occurrences of variables according to `map`.
    pub fn rename_free(&self, map: &HashMap<Var, Var>) -> FolFormula {
        let sub = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            FolFormula::Bottom => FolFormula::Bottom,
            FolFormula::Pred(n, v) => FolFormula::Pred(*n, sub(v)),
            FolFormula::Rel(r, a, b) => FolFormula::Rel(*r, sub(a), sub(b)),
            FolFormula::And(l, r) => FolFormula::and(l.rename_free(map), r.rename_free(map)),
            FolFormula::Or(l, r) => FolFormula::or(l.rename_free(map), r.rename_free(map)),
            FolFormula::Implies(l, r) => {
                FolFormula::implies(l.rename_free(map), r.rename_free(map))
            }
            FolFormula::Forall(v, b) | FolFormula::Exists(v, b) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body = Box::new(b.rename_free(&inner));
                match self {
                    FolFormula::Forall(..) => FolFormula::Forall(v.clone(), body),
                    _ => FolFormula::Exists(v.clone(), body),
                }
            }
        }
    }

    pub fn unicode(&self) -> impl fmt::Display + '_ {
        Unicode(self)
    }

    fn precedence(&self) -> u8 {
        match self {
            FolFormula::Implies(..) | FolFormula::Forall(..) | FolFormula::Exists(..) => 0,
            FolFormula::Or(..) => 1,
            FolFormula::And(..) => 2,
            _ => 3,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, prec: u8, uni: bool) -> fmt::Result {
        // Unicode quantifiers take a unary body, so they never need wrapping.
        let own = match self {
            FolFormula::Forall(..) | FolFormula::Exists(..) if uni => 3,
            _ => self.precedence(),
        };
        let wrap = own < prec;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            FolFormula::Bottom => f.write_str(if uni { "⊥" } else { "false" })?,
            FolFormula::Pred(n, v) => write!(f, "P{n}({v})")?,
            FolFormula::Rel(r, a, b) => {
                let name = if uni { r.unicode() } else { r.ascii() };
                write!(f, "{name}({a},{b})")?
            }
            FolFormula::Implies(l, r) => {
                l.write(f, 1, uni)?;
                f.write_str(if uni { " → " } else { " -> " })?;
                r.write(f, 0, uni)?;
            }
            FolFormula::Or(l, r) => {
                l.write(f, 1, uni)?;
                f.write_str(if uni { " ∨ " } else { " | " })?;
                r.write(f, 2, uni)?;
            }
            FolFormula::And(l, r) => {
                l.write(f, 2, uni)?;
                f.write_str(if uni { " ∧ " } else { " & " })?;
                r.write(f, 3, uni)?;
            }
            FolFormula::Forall(v, b) | FolFormula::Exists(v, b) => {
                let universal = matches!(self, FolFormula::Forall(..));
                if uni {
                    f.write_str(if universal { "∀" } else { "∃" })?;
                    write!(f, "{v}")?;
                    if b.precedence() == 3 && !matches!(**b, FolFormula::Forall(..) | FolFormula::Exists(..)) {
                        f.write_str(" ")?;
                    }
                    b.write(f, 3, uni)?;
                } else {
                    f.write_str(if universal { "forall " } else { "exists " })?;
                    write!(f, "{v}. ")?;
                    b.write(f, 0, uni)?;
                }
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for FolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0, false)
    }
}

struct Unicode<'a>(&'a FolFormula);

impl fmt::Display for Unicode<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, 0, true)
    }
}

impl FromStr for FolFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_fol(s)
    }
}

/// Parses a correspondence-language formula.
///
/// `forall x. body` extends as far right as possible. The unicode form
/// `∀x body` (no dot) takes a single unary body, e.g. `∀y(R(x,y) → P1(y))`.
pub fn parse_fol(text: &str) -> Result<FolFormula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = implication(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

fn implication(cur: &mut Cursor) -> Result<FolFormula, ParseError> {
    let lhs = disjunction(cur)?;
    if cur.eat(&Token::Implies) {
        let rhs = implication(cur)?;
        Ok(FolFormula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn disjunction(cur: &mut Cursor) -> Result<FolFormula, ParseError> {
    let mut lhs = conjunction(cur)?;
    while cur.eat(&Token::Or) {
        let rhs = conjunction(cur)?;
        lhs = FolFormula::or(lhs, rhs);
    }
    Ok(lhs)
}

fn conjunction(cur: &mut Cursor) -> Result<FolFormula, ParseError> {
    let mut lhs = unary(cur)?;
    while cur.eat(&Token::And) {
        let rhs = unary(cur)?;
        lhs = FolFormula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn variable(cur: &mut Cursor) -> Result<Var, ParseError> {
    let pos = cur.pos();
    match cur.bump() {
        Some(Token::Ident(w)) if is_variable(&w) => Ok(Var(w)),
        Some(t) => Err(ParseError::Syntax {
            pos,
            message: format!("expected a variable, found {}", t.describe()),
        }),
        None => Err(ParseError::Syntax {
            pos,
            message: "expected a variable, found end of input".into(),
        }),
    }
}

fn is_variable(word: &str) -> bool {
    !matches!(word, "R" | "Rb" | "Rd") && indexed(word, 'P').is_none()
}

fn args(cur: &mut Cursor, name: &str, arity: usize) -> Result<Vec<Var>, ParseError> {
    let pos = cur.pos();
    cur.expect(Token::LParen)?;
    let mut out = vec![variable(cur)?];
    while cur.eat(&Token::Comma) {
        out.push(variable(cur)?);
    }
    cur.expect(Token::RParen)?;
    if out.len() != arity {
        return Err(ParseError::Arity {
            pos,
            symbol: name.to_owned(),
            expected: arity,
            found: out.len(),
        });
    }
    Ok(out)
}

fn unary(cur: &mut Cursor) -> Result<FolFormula, ParseError> {
    let pos = cur.pos();
    match cur.bump() {
        Some(Token::Bottom) => Ok(FolFormula::Bottom),
        Some(Token::LParen) => {
            let f = implication(cur)?;
            cur.expect(Token::RParen)?;
            Ok(f)
        }
        Some(q @ (Token::Forall | Token::Exists)) => {
            let v = variable(cur)?;
            let body = if cur.eat(&Token::Dot) {
                implication(cur)?
            } else {
                unary(cur)?
            };
            Ok(match q {
                Token::Forall => FolFormula::forall(v, body),
                _ => FolFormula::exists(v, body),
            })
        }
        Some(Token::RelBox) => {
            let a = args(cur, "R□", 2)?;
            Ok(FolFormula::Rel(Rel::Box, a[0].clone(), a[1].clone()))
        }
        Some(Token::RelDia) => {
            let a = args(cur, "R◇", 2)?;
            Ok(FolFormula::Rel(Rel::Diamond, a[0].clone(), a[1].clone()))
        }
        Some(Token::Ident(word)) => {
            if let Ok(r) = word.parse::<Rel>() {
                let a = args(cur, &word, 2)?;
                return Ok(FolFormula::Rel(r, a[0].clone(), a[1].clone()));
            }
            if let Some(n) = indexed(&word, 'P') {
                let a = args(cur, &word, 1)?;
                return Ok(FolFormula::Pred(n, a[0].clone()));
            }
            Err(ParseError::Syntax {
                pos,
                message: format!("expected an atom or quantifier, found variable `{word}`"),
            })
        }
        Some(t) => Err(ParseError::Syntax {
            pos,
            message: format!("expected a formula, found {}", t.describe()),
        }),
        None => Err(ParseError::Syntax {
            pos,
            message: "expected a formula, found end of input".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        assert_eq!(
            parse_fol("forall x. R(x,x)").unwrap(),
            FolFormula::forall("x", FolFormula::rel(Rel::Access, "x", "x"))
        );
        assert_eq!(parse_fol("P1(x)").unwrap(), FolFormula::pred(1, "x"));
        assert_eq!(
            parse_fol("exists y. (R(x,y) & P2(y))").unwrap(),
            FolFormula::exists(
                "y",
                FolFormula::and(FolFormula::rel(Rel::Access, "x", "y"), FolFormula::pred(2, "y"))
            )
        );
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_fol("forall y. R(x,y) -> P1(y)").unwrap();
        assert_eq!(
            f,
            FolFormula::forall(
                "y",
                FolFormula::implies(FolFormula::rel(Rel::Access, "x", "y"), FolFormula::pred(1, "y"))
            )
        );
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec![Var::from("x")]);
    }

    #[test]
    fn unicode_form_round_trips() {
        let f = parse_fol("forall y. R(x,y) -> forall z. Rb(y,z) -> P1(z)").unwrap();
        let text = f.unicode().to_string();
        assert_eq!(text, "∀y(R(x,y) → ∀z(R□(y,z) → P1(z)))");
        assert_eq!(parse_fol(&text).unwrap(), f);
        assert_eq!(parse_fol(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn arity_misuse_is_rejected() {
        assert!(matches!(parse_fol("R(x)"), Err(ParseError::Arity { expected: 2, found: 1, .. })));
        assert!(matches!(parse_fol("P1(x,y)"), Err(ParseError::Arity { expected: 1, found: 2, .. })));
        assert!(parse_fol("forall R. P1(R)").is_err());
        assert!(parse_fol("x").is_err());
        assert!(parse_fol("P0(x)").is_err());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(FolFormula::Bottom.degree(), 0);
        assert_eq!(parse_fol("forall y. (R(x,y) -> P1(y))").unwrap().degree(), 1);
        assert_eq!(
            parse_fol("forall y. (R(x,y) -> forall z. (Rb(y,z) -> P1(z)))").unwrap().degree(),
            2
        );
        assert_eq!(parse_fol("(exists y. R(x,y)) & forall y. forall z. R(y,z)").unwrap().degree(), 2);
    }

    #[test]
    fn alpha_equivalence() {
        let a = parse_fol("forall y. R(x,y) -> exists z. Rd(y,z)").unwrap();
        let b = parse_fol("forall u. R(x,u) -> exists v. Rd(u,v)").unwrap();
        let c = parse_fol("forall u. R(x,u) -> exists v. Rd(v,u)").unwrap();
        let d = parse_fol("forall u. R(w,u) -> exists v. Rd(u,v)").unwrap();
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
        assert!(!a.alpha_eq(&d));
    }

    #[test]
    fn vocabulary_queries() {
        let f = parse_fol("exists y. Rd(x,y) & P3(y) | P1(x)").unwrap();
        assert_eq!(f.predicates().into_iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(f.relations().into_iter().collect::<Vec<_>>(), vec![Rel::Diamond]);
        assert!(!f.is_sentence());
        assert!(parse_fol("forall x. R(x,x)").unwrap().is_sentence());
    }
}
