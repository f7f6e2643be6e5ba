use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::lexer::{indexed, Cursor, Token};
use super::ParseError;

/// A formula of basic modal intuitionistic logic.
///
/// There is no primitive negation or truth constant; `¬I` is written
/// `I -> false` and `⊤` is `false -> false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModalFormula {
    Bottom,
    /// Proposition letter `p_n`, `n >= 1`.
    Prop(u32),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Implies(Box<ModalFormula>, Box<ModalFormula>),
    Box(Box<ModalFormula>),
    Diamond(Box<ModalFormula>),
}

impl ModalFormula {
    pub fn prop(n: u32) -> Self {
        assert!(n >= 1, "proposition letters are indexed from 1");
        ModalFormula::Prop(n)
    }

    pub fn and(l: Self, r: Self) -> Self {
        ModalFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Self, r: Self) -> Self {
        ModalFormula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Self, r: Self) -> Self {
        ModalFormula::Implies(Box::new(l), Box::new(r))
    }

    pub fn boxed(inner: Self) -> Self {
        ModalFormula::Box(Box::new(inner))
    }

    pub fn diamond(inner: Self) -> Self {
        ModalFormula::Diamond(Box::new(inner))
    }

    /// `false -> false`, true at every point under every variant.
    pub fn top() -> Self {
        Self::implies(ModalFormula::Bottom, ModalFormula::Bottom)
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            ModalFormula::Bottom | ModalFormula::Prop(_) => 1,
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::Implies(l, r) => {
                1 + l.size() + r.size()
            }
            ModalFormula::Box(c) | ModalFormula::Diamond(c) => 1 + c.size(),
        }
    }

    /// Connective nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            ModalFormula::Bottom | ModalFormula::Prop(_) => 0,
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::Implies(l, r) => {
                1 + l.depth().max(r.depth())
            }
            ModalFormula::Box(c) | ModalFormula::Diamond(c) => 1 + c.depth(),
        }
    }

    pub fn letters(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<u32>) {
        match self {
            ModalFormula::Bottom => {}
            ModalFormula::Prop(n) => {
                out.insert(*n);
            }
            ModalFormula::And(l, r) | ModalFormula::Or(l, r) | ModalFormula::Implies(l, r) => {
                l.collect_letters(out);
                r.collect_letters(out);
            }
            ModalFormula::Box(c) | ModalFormula::Diamond(c) => c.collect_letters(out),
        }
    }

    /// Renders with unicode connectives (`⊥ ∧ ∨ → □ ◇`). The output parses back.
    pub fn unicode(&self) -> impl fmt::Display + '_ {
        Unicode(self)
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, prec: u8, uni: bool) -> fmt::Result {
        let (and, or, imp, bx, dia, bot) = if uni {
            (" ∧ ", " ∨ ", " → ", "□", "◇", "⊥")
        } else {
            (" & ", " | ", " -> ", "box ", "dia ", "false")
        };
        let own = self.precedence();
        let wrap = own < prec;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            ModalFormula::Bottom => f.write_str(bot)?,
            ModalFormula::Prop(n) => write!(f, "p{n}")?,
            ModalFormula::Implies(l, r) => {
                l.write(f, PREC_OR, uni)?;
                f.write_str(imp)?;
                r.write(f, PREC_IMPLIES, uni)?;
            }
            ModalFormula::Or(l, r) => {
                l.write(f, PREC_OR, uni)?;
                f.write_str(or)?;
                r.write(f, PREC_AND, uni)?;
            }
            ModalFormula::And(l, r) => {
                l.write(f, PREC_AND, uni)?;
                f.write_str(and)?;
                r.write(f, PREC_UNARY, uni)?;
            }
            ModalFormula::Box(c) => {
                f.write_str(bx)?;
                c.write(f, PREC_UNARY, uni)?;
            }
            ModalFormula::Diamond(c) => {
                f.write_str(dia)?;
                c.write(f, PREC_UNARY, uni)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }

    fn precedence(&self) -> u8 {
        match self {
            ModalFormula::Implies(..) => PREC_IMPLIES,
            ModalFormula::Or(..) => PREC_OR,
            ModalFormula::And(..) => PREC_AND,
            _ => PREC_UNARY,
        }
    }
}

const PREC_IMPLIES: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, PREC_IMPLIES, false)
    }
}

struct Unicode<'a>(&'a ModalFormula);

impl fmt::Display for Unicode<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, PREC_IMPLIES, true)
    }
}

impl FromStr for ModalFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_modal(s)
    }
}

/// Parses a modal formula.
///
/// Binding, tightest first: `box`/`dia`, `&`, `|`, `->`. The binary
/// conjunction and disjunction associate to the left, implication to the right.
pub fn parse_modal(text: &str) -> Result<ModalFormula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = implication(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

fn implication(cur: &mut Cursor) -> Result<ModalFormula, ParseError> {
    let lhs = disjunction(cur)?;
    if cur.eat(&Token::Implies) {
        let rhs = implication(cur)?;
        Ok(ModalFormula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn disjunction(cur: &mut Cursor) -> Result<ModalFormula, ParseError> {
    let mut lhs = conjunction(cur)?;
    while cur.eat(&Token::Or) {
        let rhs = conjunction(cur)?;
        lhs = ModalFormula::or(lhs, rhs);
    }
    Ok(lhs)
}

fn conjunction(cur: &mut Cursor) -> Result<ModalFormula, ParseError> {
    let mut lhs = unary(cur)?;
    while cur.eat(&Token::And) {
        let rhs = unary(cur)?;
        lhs = ModalFormula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn unary(cur: &mut Cursor) -> Result<ModalFormula, ParseError> {
    let pos = cur.pos();
    match cur.bump() {
        Some(Token::BoxOp) => Ok(ModalFormula::boxed(unary(cur)?)),
        Some(Token::DiaOp) => Ok(ModalFormula::diamond(unary(cur)?)),
        Some(Token::Bottom) => Ok(ModalFormula::Bottom),
        Some(Token::LParen) => {
            let f = implication(cur)?;
            cur.expect(Token::RParen)?;
            Ok(f)
        }
        Some(Token::Ident(word)) => match indexed(&word, 'p') {
            Some(n) => Ok(ModalFormula::Prop(n)),
            None => Err(ParseError::Syntax {
                pos,
                message: format!("`{word}` is not a proposition letter (expected p1, p2, ...)"),
            }),
        },
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

    fn p(n: u32) -> ModalFormula {
        ModalFormula::prop(n)
    }

    #[test]
    fn parses_examples() {
        assert_eq!(parse_modal("box p1").unwrap(), ModalFormula::boxed(p(1)));
        assert_eq!(
            parse_modal("(p1 -> false)").unwrap(),
            ModalFormula::implies(p(1), ModalFormula::Bottom)
        );
        assert_eq!(
            parse_modal("dia (p1 & p2)").unwrap(),
            ModalFormula::diamond(ModalFormula::and(p(1), p(2)))
        );
    }

    #[test]
    fn binding_and_associativity() {
        let f = parse_modal("p1 & p2 | p3 -> p4 -> p5").unwrap();
        let expect = ModalFormula::implies(
            ModalFormula::or(ModalFormula::and(p(1), p(2)), p(3)),
            ModalFormula::implies(p(4), p(5)),
        );
        assert_eq!(f, expect);
        let g = parse_modal("box p1 & p2").unwrap();
        assert_eq!(g, ModalFormula::and(ModalFormula::boxed(p(1)), p(2)));
        let h = parse_modal("p1 | p2 | p3").unwrap();
        assert_eq!(h, ModalFormula::or(ModalFormula::or(p(1), p(2)), p(3)));
    }

    #[test]
    fn unicode_input() {
        assert_eq!(
            parse_modal("□(p1 → ⊥) ∧ ◇p2").unwrap(),
            parse_modal("box (p1 -> false) & dia p2").unwrap()
        );
    }

    #[test]
    fn printing_is_minimal_and_reparses() {
        let f = ModalFormula::and(p(1), ModalFormula::and(p(2), p(3)));
        assert_eq!(f.to_string(), "p1 & (p2 & p3)");
        let g = ModalFormula::implies(ModalFormula::implies(p(1), p(2)), p(3));
        assert_eq!(g.to_string(), "(p1 -> p2) -> p3");
        assert_eq!(ModalFormula::top().unicode().to_string(), "⊥ → ⊥");
        for f in [f, g] {
            assert_eq!(parse_modal(&f.to_string()).unwrap(), f);
            assert_eq!(parse_modal(&f.unicode().to_string()).unwrap(), f);
        }
    }

    #[test]
    fn errors_carry_positions() {
        match parse_modal("p1 & ") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse_modal("p1 # p2") {
            Err(ParseError::UnknownToken { pos, found }) => {
                assert_eq!((pos, found), (3, '#'));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_modal("p0").is_err());
        assert!(parse_modal("q1").is_err());
        assert!(parse_modal("(p1").is_err());
        assert!(parse_modal("p1 p2").is_err());
    }

    #[test]
    fn size_depth_letters() {
        let f = parse_modal("box (p1 -> p3) | p1").unwrap();
        assert_eq!(f.size(), 6);
        assert_eq!(f.depth(), 3);
        assert_eq!(f.letters().into_iter().collect::<Vec<_>>(), vec![1, 3]);
    }
}
