//! Satisfaction of modal formulas under the four clause systems, and
//! classical evaluation of correspondence formulas.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::kripke::{KripkeStructure, World};
use crate::syntax::{FolFormula, ModalFormula, Rel, Var};

/// Which of the two clauses interprets a modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    /// One guarded quantifier over `R□` / `R◇`.
    One,
    /// An outer `∀` over `R` followed by the quantifier over `R□` / `R◇`.
    Two,
}

impl Clause {
    fn digit(self) -> char {
        match self {
            Clause::One => '1',
            Clause::Two => '2',
        }
    }
}

/// A choice of box clause and diamond clause, written `ij` with the box
/// digit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variant {
    pub box_clause: Clause,
    pub diamond_clause: Clause,
}

impl Variant {
    pub const V11: Variant = Variant::new(Clause::One, Clause::One);
    pub const V12: Variant = Variant::new(Clause::One, Clause::Two);
    pub const V21: Variant = Variant::new(Clause::Two, Clause::One);
    pub const V22: Variant = Variant::new(Clause::Two, Clause::Two);
    pub const ALL: [Variant; 4] = [Variant::V11, Variant::V12, Variant::V21, Variant::V22];

    pub const fn new(box_clause: Clause, diamond_clause: Clause) -> Self {
        Variant {
            box_clause,
            diamond_clause,
        }
    }

    /// `(·,2)` variants carry the second relation `B` in their asimulations.
    pub fn uses_b(self) -> bool {
        self.diamond_clause == Clause::Two
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.box_clause.digit(), self.diamond_clause.digit())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let clause = |c| match c {
            '1' => Ok(Clause::One),
            '2' => Ok(Clause::Two),
            _ => Err(format!("bad variant `{s}` (expected 11, 12, 21 or 22)")),
        };
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(b), Some(d), None) => Ok(Variant::new(clause(b)?, clause(d)?)),
            _ => Err(format!("bad variant `{s}` (expected 11, 12, 21 or 22)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("free variable `{0}` is not bound by the environment")]
    Unbound(Var),
    #[error("world #{0} is not in the model")]
    UnknownWorld(World),
}

/// Variable assignment.
pub type Env = BTreeMap<Var, World>;

/// Classical truth of `phi` in `m` under `env`; quantifiers range over all worlds.
pub fn eval_fol(m: &KripkeStructure, env: &Env, phi: &FolFormula) -> Result<bool, EvalError> {
    for v in phi.free_vars() {
        match env.get(&v) {
            None => return Err(EvalError::Unbound(v)),
            Some(&w) if w >= m.len() => return Err(EvalError::UnknownWorld(w)),
            Some(_) => {}
        }
    }
    let mut stack: Vec<(&str, World)> = env.iter().map(|(v, &w)| (v.as_str(), w)).collect();
    Ok(fol_rec(m, &mut stack, phi))
}

fn lookup(stack: &[(&str, World)], v: &Var) -> World {
    stack
        .iter()
        .rev()
        .find(|(n, _)| *n == v.as_str())
        .map(|&(_, w)| w)
        .expect("free variables are checked before evaluation")
}

fn fol_rec<'a>(m: &KripkeStructure, stack: &mut Vec<(&'a str, World)>, phi: &'a FolFormula) -> bool {
    match phi {
        FolFormula::Bottom => false,
        FolFormula::Pred(n, v) => m.holds(*n, lookup(stack, v)),
        FolFormula::Rel(r, a, b) => m.has_edge(*r, lookup(stack, a), lookup(stack, b)),
        FolFormula::And(l, r) => fol_rec(m, stack, l) && fol_rec(m, stack, r),
        FolFormula::Or(l, r) => fol_rec(m, stack, l) || fol_rec(m, stack, r),
        FolFormula::Implies(l, r) => !fol_rec(m, stack, l) || fol_rec(m, stack, r),
        FolFormula::Forall(v, body) => m.worlds().all(|w| {
            stack.push((v.as_str(), w));
            let t = fol_rec(m, stack, body);
            stack.pop();
            t
        }),
        FolFormula::Exists(v, body) => m.worlds().any(|w| {
            stack.push((v.as_str(), w));
            let t = fol_rec(m, stack, body);
            stack.pop();
            t
        }),
    }
}

/// Truth of `f` at `w` under the variant's clauses.
///
/// Implication is the intuitionistic clause `∀t(wRt ⇒ (t ⊨ I ⇒ t ⊨ J))`;
/// the second diamond clause reads `∀t(wRt ⇒ ∃u(tR◇u ∧ u ⊨ I))`.
pub fn eval_modal(
    m: &KripkeStructure,
    w: World,
    f: &ModalFormula,
    v: Variant,
) -> Result<bool, EvalError> {
    if w >= m.len() {
        return Err(EvalError::UnknownWorld(w));
    }
    Ok(truth_set(m, f, v).contains(w))
}

/// The set of worlds where `f` holds, computed bottom-up over the formula.
pub fn truth_set(m: &KripkeStructure, f: &ModalFormula, v: Variant) -> FixedBitSet {
    let alg = TruthAlgebra::new(m, v);
    alg.eval(f)
}

/// Truth-set operations for one structure and variant. Every connective is
/// a function of its arguments' truth sets.
pub struct TruthAlgebra<'a> {
    m: &'a KripkeStructure,
    variant: Variant,
}

impl<'a> TruthAlgebra<'a> {
    pub fn new(m: &'a KripkeStructure, variant: Variant) -> Self {
        TruthAlgebra { m, variant }
    }

    pub fn structure(&self) -> &KripkeStructure {
        self.m
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn eval(&self, f: &ModalFormula) -> FixedBitSet {
        match f {
            ModalFormula::Bottom => self.bottom(),
            ModalFormula::Prop(n) => self.prop(*n),
            ModalFormula::And(l, r) => self.and(&self.eval(l), &self.eval(r)),
            ModalFormula::Or(l, r) => self.or(&self.eval(l), &self.eval(r)),
            ModalFormula::Implies(l, r) => self.implies(&self.eval(l), &self.eval(r)),
            ModalFormula::Box(c) => self.boxed(&self.eval(c)),
            ModalFormula::Diamond(c) => self.diamond(&self.eval(c)),
        }
    }

    pub fn bottom(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.m.len())
    }

    pub fn prop(&self, letter: u32) -> FixedBitSet {
        self.m
            .extension(letter)
            .cloned()
            .unwrap_or_else(|| self.bottom())
    }

    pub fn and(&self, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
        let mut out = a.clone();
        out.intersect_with(b);
        out
    }

    pub fn or(&self, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
        let mut out = a.clone();
        out.union_with(b);
        out
    }

    pub fn implies(&self, a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
        let mut out = self.bottom();
        for w in self.m.worlds() {
            let ok = self
                .m
                .successors(Rel::Access, w)
                .iter()
                .all(|&t| !a.contains(t) || b.contains(t));
            out.set(w, ok);
        }
        out
    }

    /// `{w : every rel-successor of w is in a}`.
    fn all_succ(&self, rel: Rel, a: &FixedBitSet) -> FixedBitSet {
        let mut out = self.bottom();
        for w in self.m.worlds() {
            out.set(w, self.m.successors(rel, w).iter().all(|&t| a.contains(t)));
        }
        out
    }

    /// `{w : some rel-successor of w is in a}`.
    fn some_succ(&self, rel: Rel, a: &FixedBitSet) -> FixedBitSet {
        let mut out = self.bottom();
        for w in self.m.worlds() {
            out.set(w, self.m.successors(rel, w).iter().any(|&t| a.contains(t)));
        }
        out
    }

    pub fn boxed(&self, a: &FixedBitSet) -> FixedBitSet {
        let inner = self.all_succ(Rel::Box, a);
        match self.variant.box_clause {
            Clause::One => inner,
            Clause::Two => self.all_succ(Rel::Access, &inner),
        }
    }

    pub fn diamond(&self, a: &FixedBitSet) -> FixedBitSet {
        let inner = self.some_succ(Rel::Diamond, a);
        match self.variant.diamond_clause {
            Clause::One => inner,
            Clause::Two => self.all_succ(Rel::Access, &inner),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_fol, parse_modal};

    fn env(pairs: &[(&str, World)]) -> Env {
        pairs.iter().map(|&(v, w)| (Var::from(v), w)).collect()
    }

    #[test]
    fn fol_examples() {
        let mut m = KripkeStructure::with_worlds(1);
        m.set_true(1, 0);
        let e = env(&[("x", 0)]);
        assert!(eval_fol(&m, &e, &parse_fol("P1(x)").unwrap()).unwrap());
        assert!(!eval_fol(&m, &e, &parse_fol("exists y. R(x,y)").unwrap()).unwrap());
        assert!(eval_fol(&m, &e, &parse_fol("forall y. (R(x,y) -> P1(y))").unwrap()).unwrap());
    }

    #[test]
    fn fol_errors() {
        let m = KripkeStructure::with_worlds(1);
        let f = parse_fol("P1(x) & R(x,z)").unwrap();
        assert_eq!(
            eval_fol(&m, &env(&[("x", 0)]), &f),
            Err(EvalError::Unbound(Var::from("z")))
        );
        assert_eq!(
            eval_fol(&m, &env(&[("x", 3), ("z", 0)]), &f),
            Err(EvalError::UnknownWorld(3))
        );
        // bound variables need no binding
        assert!(eval_fol(&m, &Env::new(), &parse_fol("forall x. R(x,x) -> false").unwrap()).unwrap());
    }

    #[test]
    fn shadowing_uses_innermost_binding() {
        let mut m = KripkeStructure::with_worlds(2);
        m.add_edge(Rel::Access, 0, 1);
        m.set_true(1, 1);
        // inner x rebinds; P1(x) refers to the R-successor
        let f = parse_fol("exists x. R(x,x) | P1(x)").unwrap();
        assert!(eval_fol(&m, &env(&[("x", 0)]), &f).unwrap());
        let g = parse_fol("P1(x) | exists x. R(x,x)").unwrap();
        assert!(!eval_fol(&m, &env(&[("x", 0)]), &g).unwrap());
    }

    #[test]
    fn modal_examples_on_isolated_world() {
        let m = KripkeStructure::with_worlds(1);
        let box_bot = parse_modal("box false").unwrap();
        let dia_top = parse_modal("dia (false -> false)").unwrap();
        let dia_bot = parse_modal("dia false").unwrap();
        assert!(eval_modal(&m, 0, &box_bot, Variant::V11).unwrap());
        assert!(!eval_modal(&m, 0, &dia_top, Variant::V11).unwrap());
        assert!(eval_modal(&m, 0, &dia_bot, Variant::V12).unwrap());
        assert!(eval_modal(&m, 0, &dia_bot, Variant::V22).unwrap());
        assert!(!eval_modal(&m, 0, &dia_bot, Variant::V21).unwrap());
        assert_eq!(eval_modal(&m, 4, &dia_bot, Variant::V11), Err(EvalError::UnknownWorld(4)));
    }

    #[test]
    fn implication_is_variant_independent() {
        let mut m = KripkeStructure::with_worlds(3);
        m.add_edge(Rel::Access, 0, 1);
        m.add_edge(Rel::Access, 0, 2);
        m.set_true(1, 1);
        m.set_true(1, 2);
        m.set_true(2, 1);
        let f = parse_modal("p1 -> p2").unwrap();
        let sets: Vec<_> = Variant::ALL.iter().map(|&v| truth_set(&m, &f, v)).collect();
        assert!(sets.windows(2).all(|w| w[0] == w[1]));
        assert!(!sets[0].contains(0));
        assert!(sets[0].contains(1) && sets[0].contains(2));
    }

    #[test]
    fn variant_text() {
        for v in Variant::ALL {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert!("13".parse::<Variant>().is_err());
        assert!("1".parse::<Variant>().is_err());
        assert!(Variant::V12.uses_b() && !Variant::V21.uses_b());
    }
}
