//! Generalized modalities: a modality is a prefix of guarded quantifiers
//! `(Q, R)`, outermost first. From a prefix we build its translation and
//! the asimulation conditions it needs, and check those conditions on
//! finite models.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asimulation::{Condition, DirectedPair, Direction, Premise, Verdict, Violation};
use crate::kripke::{KripkeStructure, World};
use crate::semantics::Variant;
use crate::syntax::{FolFormula, ModalFormula, Rel, Var};
use crate::translate::{guarded_exists, guarded_forall, translate_with, Fresh};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("a modality needs at least one guarded quantifier")]
    EmptyPrefix,
    #[error("bad signature item `{0}` (expected A:<rel> or E:<rel> with rel one of R, Rb, Rd)")]
    BadItem(String),
    #[error("expected {expected} relations, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("world {0} does not exist in its model")]
    WorldOutOfRange(World),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Forall => "A",
            Quantifier::Exists => "E",
        })
    }
}

/// A prefix of guarded quantifiers, outermost first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModalitySignature {
    prefix: Vec<(Quantifier, Rel)>,
}

impl ModalitySignature {
    pub fn new(prefix: Vec<(Quantifier, Rel)>) -> Result<Self, GenError> {
        if prefix.is_empty() {
            return Err(GenError::EmptyPrefix);
        }
        Ok(ModalitySignature { prefix })
    }

    /// `□` under the one-step clause.
    pub fn box1() -> Self {
        ModalitySignature {
            prefix: vec![(Quantifier::Forall, Rel::Box)],
        }
    }

    /// `□` under the two-step clause.
    pub fn box2() -> Self {
        ModalitySignature {
            prefix: vec![(Quantifier::Forall, Rel::Access), (Quantifier::Forall, Rel::Box)],
        }
    }

    pub fn diamond1() -> Self {
        ModalitySignature {
            prefix: vec![(Quantifier::Exists, Rel::Diamond)],
        }
    }

    pub fn diamond2() -> Self {
        ModalitySignature {
            prefix: vec![(Quantifier::Forall, Rel::Access), (Quantifier::Exists, Rel::Diamond)],
        }
    }

    pub fn prefix(&self) -> &[(Quantifier, Rel)] {
        &self.prefix
    }

    pub fn alternations(&self) -> usize {
        self.prefix.windows(2).filter(|w| w[0].0 != w[1].0).count()
    }

    /// Number of relations an asimulation for this modality carries.
    pub fn k_mu(&self) -> usize {
        1 + self.alternations()
    }
}

impl fmt::Display for ModalitySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (q, r)) in self.prefix.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{q}:{}", r.ascii())?;
        }
        Ok(())
    }
}

impl FromStr for ModalitySignature {
    type Err = GenError;

    /// `A:R;A:Rb` style, outermost first.
    fn from_str(s: &str) -> Result<Self, GenError> {
        let prefix = s
            .split(';')
            .map(|item| {
                let bad = || GenError::BadItem(item.trim().to_string());
                let (q, r) = item.trim().split_once(':').ok_or_else(bad)?;
                let q = match q.trim() {
                    "A" => Quantifier::Forall,
                    "E" => Quantifier::Exists,
                    _ => return Err(bad()),
                };
                let r = r.trim().parse::<Rel>().map_err(|_| bad())?;
                Ok((q, r))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ModalitySignature::new(prefix)
    }
}

/// The translation of `μI` at `x`: the guarded prefix over fresh variables,
/// with `I` translated under `v` at the innermost one. Bound variables come
/// from the same counter [`crate::translate::translate`] uses.
pub fn gen_st(sig: &ModalitySignature, inner: &ModalFormula, v: Variant, x: &Var) -> FolFormula {
    let mut fresh = Fresh::new(x);
    let vars: Vec<Var> = sig.prefix.iter().map(|_| fresh.var()).collect();
    let last = vars.last().expect("prefix is non-empty");
    let mut body = translate_with(inner, v, last, &mut fresh);
    for (i, (q, rel)) in sig.prefix.iter().enumerate().rev() {
        let prev = if i == 0 { x } else { &vars[i - 1] };
        body = match q {
            Quantifier::Forall => guarded_forall(*rel, prev, vars[i].clone(), body),
            Quantifier::Exists => guarded_exists(*rel, prev, vars[i].clone(), body),
        };
    }
    body
}

/// Which side the guard chain of a schema walks in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemaForm {
    /// Every chain from `b₁` in the target needs a matching chain from
    /// `a₁` in the source (the form of a universal modality).
    TargetGuarded,
    /// Every chain from `a₁` in the source needs a matching chain from
    /// `b₁` in the target (the form of an existential modality).
    SourceGuarded,
}

/// `a₁ A_p b₁` plus a chain `S₁ … S_m` on one side requires a chain along
/// the same relations on the other side whose endpoints are in `A_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionSchema {
    /// 1-based index of the premise relation.
    pub premise: usize,
    pub form: SchemaForm,
    pub chain: Vec<Rel>,
    /// 1-based index of the relation the chain endpoints must be in.
    pub conclusion: usize,
}

impl fmt::Display for ConditionSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.chain.len();
        let walk = |side: char| {
            self.chain
                .iter()
                .enumerate()
                .map(|(s, r)| format!("{}({side}{},{side}{})", r.ascii(), s + 1, s + 2))
                .collect::<Vec<_>>()
                .join(" & ")
        };
        let exists = |side: char| {
            (2..=m + 1)
                .map(|s| format!("{side}{s}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let (guard, witness) = match self.form {
            SchemaForm::TargetGuarded => ('b', 'a'),
            SchemaForm::SourceGuarded => ('a', 'b'),
        };
        write!(
            f,
            "a1 A{} b1 & {} => exists {} ({} & a{} A{} b{})",
            self.premise,
            walk(guard),
            exists(witness),
            walk(witness),
            m + 1,
            self.conclusion,
            m + 1
        )
    }
}

/// The conditions `r₁ … r_{k_μ}` of a signature, by induction from the
/// innermost quantifier outwards. The last condition always has premise
/// `A₁`.
pub fn gen_conditions(sig: &ModalitySignature) -> Vec<ConditionSchema> {
    let form = |q: Quantifier| match q {
        Quantifier::Forall => SchemaForm::TargetGuarded,
        Quantifier::Exists => SchemaForm::SourceGuarded,
    };
    let mut inward = sig.prefix.iter().rev();
    let &(q1, r1) = inward.next().expect("prefix is non-empty");
    let mut out = vec![ConditionSchema {
        premise: 1,
        form: form(q1),
        chain: vec![r1],
        conclusion: 1,
    }];
    let mut prev = q1;
    for &(q, rel) in inward {
        if q == prev {
            out.last_mut().expect("non-empty").chain.insert(0, rel);
        } else {
            let k = out.len() + 1;
            out.last_mut().expect("non-empty").premise = k;
            out.push(ConditionSchema {
                premise: 1,
                form: form(q),
                chain: vec![rel],
                conclusion: k,
            });
        }
        prev = q;
    }
    out
}

/// Endpoints of all walks from `start` along `chain`, each with one walk
/// reaching it.
fn walks(m: &KripkeStructure, start: World, chain: &[Rel]) -> Vec<Vec<World>> {
    let mut paths = vec![vec![start]];
    for &rel in chain {
        paths = paths
            .into_iter()
            .flat_map(|p| {
                let last = *p.last().expect("non-empty");
                m.successors(rel, last).iter().map(move |&n| {
                    let mut q = p.clone();
                    q.push(n);
                    q
                })
            })
            .collect();
    }
    for p in &mut paths {
        p.remove(0);
    }
    paths
}

fn endpoints(m: &KripkeStructure, start: World, chain: &[Rel]) -> BTreeSet<World> {
    let mut cur = BTreeSet::from([start]);
    for &rel in chain {
        cur = cur
            .iter()
            .flat_map(|&w| m.successors(rel, w).iter().copied())
            .collect();
    }
    cur
}

/// Checks `relations = [A₁, …, A_{k_μ}]` against the basic conditions on
/// `A₁` ((type), (elem) at `t → u`, (base), (step)) and every generated
/// schema. Schema violations are reported as [`Condition::Schema`].
pub fn check_generated(
    m1: &KripkeStructure,
    t: World,
    m2: &KripkeStructure,
    u: World,
    sig: &ModalitySignature,
    relations: &[BTreeSet<DirectedPair>],
) -> Result<Verdict, GenError> {
    let k = sig.k_mu();
    if relations.len() != k {
        return Err(GenError::LengthMismatch {
            expected: k,
            found: relations.len(),
        });
    }
    if t >= m1.len() {
        return Err(GenError::WorldOutOfRange(t));
    }
    if u >= m2.len() {
        return Err(GenError::WorldOutOfRange(u));
    }
    let ok_range = |p: &DirectedPair| {
        let (s, g) = p.dir.models(m1, m2);
        p.from < s.len() && p.to < g.len()
    };
    let violation = |condition, premise: Option<DirectedPair>, trigger, letter| Violation {
        condition,
        premise: premise.map(Premise::Pair),
        trigger,
        letter,
    };
    let mut out = Vec::new();

    for (i, rel) in relations.iter().enumerate() {
        let cond = if i == 0 { Condition::Type } else { Condition::BType };
        for p in rel.iter().filter(|p| !ok_range(p)) {
            out.push(violation(cond, Some(*p), Vec::new(), None));
        }
    }
    let a1 = &relations[0];
    if !a1.contains(&DirectedPair::new(Direction::OneTwo, t, u)) {
        out.push(violation(Condition::Elem, None, Vec::new(), None));
    }

    let letters: BTreeSet<u32> = m1.letters().chain(m2.letters()).collect();
    for p in a1.iter().filter(|p| ok_range(p)) {
        let (src, tgt) = p.dir.models(m1, m2);
        for &l in &letters {
            if src.holds(l, p.from) && !tgt.holds(l, p.to) {
                out.push(violation(Condition::Base, Some(*p), Vec::new(), Some(l)));
            }
        }
        for &d in tgt.successors(Rel::Access, p.to) {
            let matched = src.successors(Rel::Access, p.from).iter().any(|&c| {
                a1.contains(&DirectedPair::new(p.dir, c, d))
                    && a1.contains(&DirectedPair::new(p.dir.reverse(), d, c))
            });
            if !matched {
                out.push(violation(Condition::Step, Some(*p), vec![d], None));
            }
        }
    }

    for (idx, schema) in gen_conditions(sig).iter().enumerate() {
        let premise = &relations[schema.premise - 1];
        let conclusion = &relations[schema.conclusion - 1];
        for p in premise.iter().filter(|p| ok_range(p)) {
            let (src, tgt) = p.dir.models(m1, m2);
            match schema.form {
                SchemaForm::TargetGuarded => {
                    let reach = endpoints(src, p.from, &schema.chain);
                    for walk in walks(tgt, p.to, &schema.chain) {
                        let f = *walk.last().expect("chains are non-empty");
                        if !reach.iter().any(|&e| conclusion.contains(&DirectedPair::new(p.dir, e, f))) {
                            out.push(violation(Condition::Schema(idx + 1), Some(*p), walk, None));
                        }
                    }
                }
                SchemaForm::SourceGuarded => {
                    let reach = endpoints(tgt, p.to, &schema.chain);
                    for walk in walks(src, p.from, &schema.chain) {
                        let e = *walk.last().expect("chains are non-empty");
                        if !reach.iter().any(|&f| conclusion.contains(&DirectedPair::new(p.dir, e, f))) {
                            out.push(violation(Condition::Schema(idx + 1), Some(*p), walk, None));
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict::new(out))
}
