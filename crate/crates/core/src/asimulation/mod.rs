//! Asimulations between two pointed models: relation types, checkers for
//! every variant, the maximal (greatest-fixpoint) asimulation and a
//! distinguishing-formula search.
//!
//! Worlds of the two models are never mixed: every pair carries a
//! [`Direction`] saying which model its source lives in.

mod check;
mod distinguish;
mod fixpoint;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kripke::{KripkeStructure, World};
use crate::semantics::Variant;

pub use check::{check_asimulation, check_k_asimulation};
pub use distinguish::distinguishing_formula;
pub use fixpoint::maximal_asimulation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Source in the first model, target in the second.
    #[serde(rename = "12")]
    OneTwo,
    #[serde(rename = "21")]
    TwoOne,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::OneTwo, Direction::TwoOne];

    pub fn reverse(self) -> Direction {
        match self {
            Direction::OneTwo => Direction::TwoOne,
            Direction::TwoOne => Direction::OneTwo,
        }
    }

    /// `(source model, target model)`.
    pub fn models<'a>(
        self,
        m1: &'a KripkeStructure,
        m2: &'a KripkeStructure,
    ) -> (&'a KripkeStructure, &'a KripkeStructure) {
        match self {
            Direction::OneTwo => (m1, m2),
            Direction::TwoOne => (m2, m1),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::OneTwo => "12",
            Direction::TwoOne => "21",
        })
    }
}

/// `from` belongs to the direction's source model, `to` to its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedPair {
    pub dir: Direction,
    pub from: World,
    pub to: World,
}

impl DirectedPair {
    pub fn new(dir: Direction, from: World, to: World) -> Self {
        DirectedPair { dir, from, to }
    }

    pub fn reverse(self) -> Self {
        DirectedPair::new(self.dir.reverse(), self.to, self.from)
    }
}

/// Relation `A` and, for the (·,2) variants, relation `B`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Asimulation {
    pub rel_a: BTreeSet<DirectedPair>,
    pub rel_b: Option<BTreeSet<DirectedPair>>,
}

/// A pair of equal-length world sequences sharing one direction. The index
/// `m` of the conditions is `len - 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqPair {
    pub dir: Direction,
    pub from: Vec<World>,
    pub to: Vec<World>,
}

impl SeqPair {
    pub fn new(dir: Direction, from: Vec<World>, to: Vec<World>) -> Self {
        SeqPair { dir, from, to }
    }

    pub fn singleton(dir: Direction, from: World, to: World) -> Self {
        SeqPair::new(dir, vec![from], vec![to])
    }

    /// `len - 1`. Only meaningful for well-formed pairs.
    pub fn m(&self) -> usize {
        self.from.len().saturating_sub(1)
    }

    pub fn last(&self) -> Option<(World, World)> {
        Some((*self.from.last()?, *self.to.last()?))
    }

    pub fn extended(&self, from_ext: &[World], to_ext: &[World]) -> SeqPair {
        let mut from = self.from.clone();
        from.extend_from_slice(from_ext);
        let mut to = self.to.clone();
        to.extend_from_slice(to_ext);
        SeqPair::new(self.dir, from, to)
    }

    pub fn reverse(&self) -> SeqPair {
        SeqPair::new(self.dir.reverse(), self.to.clone(), self.from.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeqAsimulation {
    pub rel_a: BTreeSet<SeqPair>,
    pub rel_b: Option<BTreeSet<SeqPair>>,
}

/// Which family of conditions a relation is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsimKind {
    /// Only (type), (elem), (base) and (step).
    Basic,
    Modal(Variant),
}

impl AsimKind {
    pub fn uses_b(self) -> bool {
        matches!(self, AsimKind::Modal(v) if v.uses_b())
    }

    /// Conditions imposed on members of `A` (besides (type)).
    pub fn a_conditions(self) -> &'static [Condition] {
        use crate::semantics::Clause::*;
        use Condition::*;
        match self {
            AsimKind::Basic => &[Base, Step],
            AsimKind::Modal(v) => match (v.box_clause, v.diamond_clause) {
                (One, One) => &[Base, Step, Box1, Diam1],
                (Two, One) => &[Base, Step, Box2, Diam1],
                (One, Two) => &[Base, Step, Box1, Diam2First],
                (Two, Two) => &[Base, Step, Box2, Diam2First],
            },
        }
    }

    /// Conditions imposed on members of `B`.
    pub fn b_conditions(self) -> &'static [Condition] {
        if self.uses_b() {
            &[Condition::Diam2Second]
        } else {
            &[]
        }
    }
}

impl fmt::Display for AsimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsimKind::Basic => f.write_str("basic"),
            AsimKind::Modal(v) => write!(f, "{v}"),
        }
    }
}

impl From<Variant> for AsimKind {
    fn from(v: Variant) -> Self {
        AsimKind::Modal(v)
    }
}

impl FromStr for AsimKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "basic" {
            return Ok(AsimKind::Basic);
        }
        s.parse::<Variant>()
            .map(AsimKind::Modal)
            .map_err(|_| format!("expected 11, 12, 21, 22 or basic, got `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    Type,
    BType,
    Elem,
    Base,
    Step,
    Box1,
    Box2,
    Diam1,
    Diam2First,
    Diam2Second,
    /// The `n`-th generated schema (1-based), see [`crate::genmod`].
    Schema(usize),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Type => f.write_str("type"),
            Condition::BType => f.write_str("B-type"),
            Condition::Elem => f.write_str("elem"),
            Condition::Base => f.write_str("base"),
            Condition::Step => f.write_str("step"),
            Condition::Box1 => f.write_str("box-1"),
            Condition::Box2 => f.write_str("box-2"),
            Condition::Diam1 => f.write_str("diam-1"),
            Condition::Diam2First => f.write_str("diam-2(1)"),
            Condition::Diam2Second => f.write_str("diam-2(2)"),
            Condition::Schema(n) => write!(f, "r{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Premise {
    Pair(DirectedPair),
    Seq(SeqPair),
}

impl Premise {
    pub fn dir(&self) -> Direction {
        match self {
            Premise::Pair(p) => p.dir,
            Premise::Seq(p) => p.dir,
        }
    }

    /// The last worlds of the premise's two sides.
    pub fn last(&self) -> Option<(World, World)> {
        match self {
            Premise::Pair(p) => Some((p.from, p.to)),
            Premise::Seq(p) => p.last(),
        }
    }
}

/// One failed instance of a condition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub condition: Condition,
    /// The pair the condition was instantiated at; absent for (elem).
    pub premise: Option<Premise>,
    /// The guard-chain worlds for which no witness exists. For conditions
    /// triggered on the target side these live in the target model.
    pub trigger: Vec<World>,
    /// The letter (base) fails for.
    pub letter: Option<u32>,
}

impl Violation {
    /// Human-readable form with world names resolved.
    pub fn describe(&self, m1: &KripkeStructure, m2: &KripkeStructure) -> String {
        let mut out = self.condition.to_string();
        if let Some(p) = &self.premise {
            let (src, tgt) = p.dir().models(m1, m2);
            let seq = |m: &KripkeStructure, ws: &[World]| {
                ws.iter().map(|&w| m.name(w).to_string()).collect::<Vec<_>>().join(",")
            };
            match p {
                Premise::Pair(p) => out.push_str(&format!(
                    " at {} {} -> {}",
                    p.dir,
                    src.name(p.from),
                    tgt.name(p.to)
                )),
                Premise::Seq(p) => out.push_str(&format!(
                    " at {} ({}) -> ({})",
                    p.dir,
                    seq(src, &p.from),
                    seq(tgt, &p.to)
                )),
            }
            if !self.trigger.is_empty() {
                let side = match self.condition {
                    Condition::Diam1 | Condition::Diam2Second => src,
                    _ => tgt,
                };
                out.push_str(&format!(": no witness for {}", seq(side, &self.trigger)));
            }
        }
        if let Some(l) = self.letter {
            out.push_str(&format!(": p{l} is not preserved"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn new(violations: Vec<Violation>) -> Self {
        Verdict {
            ok: violations.is_empty(),
            violations,
        }
    }

    /// True when every violation is of one of the listed conditions.
    pub fn ok_except(&self, ignored: &[Condition]) -> bool {
        self.violations.iter().all(|v| ignored.contains(&v.condition))
    }

    pub fn conditions(&self) -> BTreeSet<Condition> {
        self.violations.iter().map(|v| v.condition).collect()
    }
}

#[derive(Debug, Error)]
pub enum AsimError {
    #[error("relation B given, but variant {0} has no B relation")]
    UnexpectedB(AsimKind),
    #[error("variant {0} needs a B relation")]
    MissingB(AsimKind),
    #[error("world {0} does not exist in its model")]
    WorldOutOfRange(World),
    #[error("unknown world `{name}` in model {side}")]
    UnknownWorld { name: String, side: u8 },
    #[error("malformed relation document: {0}")]
    Malformed(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc<W> {
    dir: Direction,
    from: W,
    to: W,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc<W> {
    #[serde(rename = "relA")]
    rel_a: Vec<PairDoc<W>>,
    #[serde(rename = "relB", default, skip_serializing_if = "Option::is_none")]
    rel_b: Option<Vec<PairDoc<W>>>,
}

fn lookup(m1: &KripkeStructure, m2: &KripkeStructure, dir: Direction, name: &str, source: bool) -> Result<World, AsimError> {
    let (src, tgt) = dir.models(m1, m2);
    let m = if source { src } else { tgt };
    let side = match (source, dir) {
        (true, Direction::OneTwo) | (false, Direction::TwoOne) => 1,
        _ => 2,
    };
    m.world(name).ok_or_else(|| AsimError::UnknownWorld {
        name: name.to_string(),
        side,
    })
}

impl Asimulation {
    /// Parses the relation interchange format; worlds are given by name.
    pub fn from_json(text: &str, m1: &KripkeStructure, m2: &KripkeStructure) -> Result<Self, AsimError> {
        let doc: RelationDoc<String> =
            serde_json::from_str(text).map_err(|e| AsimError::Malformed(e.to_string()))?;
        let conv = |pairs: &[PairDoc<String>]| -> Result<BTreeSet<DirectedPair>, AsimError> {
            pairs
                .iter()
                .map(|p| {
                    Ok(DirectedPair::new(
                        p.dir,
                        lookup(m1, m2, p.dir, &p.from, true)?,
                        lookup(m1, m2, p.dir, &p.to, false)?,
                    ))
                })
                .collect()
        };
        Ok(Asimulation {
            rel_a: conv(&doc.rel_a)?,
            rel_b: doc.rel_b.as_deref().map(conv).transpose()?,
        })
    }

    pub fn to_json(&self, m1: &KripkeStructure, m2: &KripkeStructure) -> String {
        let conv = |pairs: &BTreeSet<DirectedPair>| -> Vec<PairDoc<String>> {
            pairs
                .iter()
                .map(|p| {
                    let (src, tgt) = p.dir.models(m1, m2);
                    PairDoc {
                        dir: p.dir,
                        from: src.name(p.from).to_string(),
                        to: tgt.name(p.to).to_string(),
                    }
                })
                .collect()
        };
        let doc = RelationDoc {
            rel_a: conv(&self.rel_a),
            rel_b: self.rel_b.as_ref().map(conv),
        };
        serde_json::to_string_pretty(&doc).expect("relation documents always serialize")
    }
}

impl SeqAsimulation {
    /// Like [`Asimulation::from_json`], with `from`/`to` as arrays of names.
    pub fn from_json(text: &str, m1: &KripkeStructure, m2: &KripkeStructure) -> Result<Self, AsimError> {
        let doc: RelationDoc<Vec<String>> =
            serde_json::from_str(text).map_err(|e| AsimError::Malformed(e.to_string()))?;
        let conv = |pairs: &[PairDoc<Vec<String>>]| -> Result<BTreeSet<SeqPair>, AsimError> {
            pairs
                .iter()
                .map(|p| {
                    let from = p
                        .from
                        .iter()
                        .map(|n| lookup(m1, m2, p.dir, n, true))
                        .collect::<Result<_, _>>()?;
                    let to = p
                        .to
                        .iter()
                        .map(|n| lookup(m1, m2, p.dir, n, false))
                        .collect::<Result<_, _>>()?;
                    Ok(SeqPair::new(p.dir, from, to))
                })
                .collect()
        };
        Ok(SeqAsimulation {
            rel_a: conv(&doc.rel_a)?,
            rel_b: doc.rel_b.as_deref().map(conv).transpose()?,
        })
    }

    pub fn to_json(&self, m1: &KripkeStructure, m2: &KripkeStructure) -> String {
        let conv = |pairs: &BTreeSet<SeqPair>| -> Vec<PairDoc<Vec<String>>> {
            pairs
                .iter()
                .map(|p| {
                    let (src, tgt) = p.dir.models(m1, m2);
                    PairDoc {
                        dir: p.dir,
                        from: p.from.iter().map(|&w| src.name(w).to_string()).collect(),
                        to: p.to.iter().map(|&w| tgt.name(w).to_string()).collect(),
                    }
                })
                .collect()
        };
        let doc = RelationDoc {
            rel_a: conv(&self.rel_a),
            rel_b: self.rel_b.as_ref().map(conv),
        };
        serde_json::to_string_pretty(&doc).expect("relation documents always serialize")
    }
}

#[cfg(test)]
mod tests;
