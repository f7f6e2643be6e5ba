use std::collections::BTreeSet;

use crate::kripke::{KripkeStructure, World};
use crate::syntax::Rel;

use super::{
    AsimError, AsimKind, Asimulation, Condition, DirectedPair, Direction, Premise, SeqAsimulation,
    SeqPair, Verdict, Violation,
};

/// Which relation a witness must belong to. `ARev` asks for the reversed
/// pair in `A`, as the two-way requirement of (step) does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Which {
    A,
    ARev,
    B,
}

/// Length guard of the sequence conditions. `Guard(None)` switches all
/// guards off, which is how the plain (unindexed) conditions are checked.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Guard(pub Option<(usize, usize)>);

impl Guard {
    pub(crate) const OFF: Guard = Guard(None);

    fn allows(self, c: Condition) -> bool {
        let Some((m, k)) = self.0 else { return true };
        match c {
            Condition::Step | Condition::Diam1 | Condition::Diam2Second => m < k,
            Condition::Box1 | Condition::Box2 | Condition::Diam2First => m + 1 < k,
            _ => true,
        }
    }
}

/// The last worlds `a` (in `src`) and `b` (in `tgt`) of a premise.
pub(crate) struct PairCtx<'a> {
    pub src: &'a KripkeStructure,
    pub tgt: &'a KripkeStructure,
    pub a: World,
    pub b: World,
    pub letters: &'a [u32],
}

/// Membership of the premise extended by `(from_ext, to_ext)`.
pub(crate) type Member<'a> = dyn Fn(Which, &[World], &[World]) -> bool + 'a;

/// Reports `(condition, trigger, letter)`; returning `false` stops the check.
pub(crate) type Report<'a> = dyn FnMut(Condition, Vec<World>, Option<u32>) -> bool + 'a;

/// Checks the listed conditions for a member of `A`. Returns `false` if
/// the reporter asked to stop.
pub(crate) fn check_a_pair(
    ctx: &PairCtx,
    conds: &[Condition],
    guard: Guard,
    member: &Member,
    report: &mut Report,
) -> bool {
    let (src, tgt, a, b) = (ctx.src, ctx.tgt, ctx.a, ctx.b);
    for &cond in conds {
        if !guard.allows(cond) {
            continue;
        }
        match cond {
            Condition::Base => {
                for &l in ctx.letters {
                    if src.holds(l, a) && !tgt.holds(l, b) && !report(cond, Vec::new(), Some(l)) {
                        return false;
                    }
                }
            }
            Condition::Step => {
                for &d in tgt.successors(Rel::Access, b) {
                    let found = src
                        .successors(Rel::Access, a)
                        .iter()
                        .any(|&c| member(Which::A, &[c], &[d]) && member(Which::ARev, &[c], &[d]));
                    if !found && !report(cond, vec![d], None) {
                        return false;
                    }
                }
            }
            Condition::Box1 => {
                for &d in tgt.successors(Rel::Box, b) {
                    let found = src
                        .successors(Rel::Box, a)
                        .iter()
                        .any(|&c| member(Which::A, &[c], &[d]));
                    if !found && !report(cond, vec![d], None) {
                        return false;
                    }
                }
            }
            Condition::Box2 => {
                for &d in tgt.successors(Rel::Access, b) {
                    for &f in tgt.successors(Rel::Box, d) {
                        let found = src.successors(Rel::Access, a).iter().any(|&c| {
                            src.successors(Rel::Box, c)
                                .iter()
                                .any(|&e| member(Which::A, &[c, e], &[d, f]))
                        });
                        if !found && !report(cond, vec![d, f], None) {
                            return false;
                        }
                    }
                }
            }
            Condition::Diam1 => {
                for &c in src.successors(Rel::Diamond, a) {
                    let found = tgt
                        .successors(Rel::Diamond, b)
                        .iter()
                        .any(|&d| member(Which::A, &[c], &[d]));
                    if !found && !report(cond, vec![c], None) {
                        return false;
                    }
                }
            }
            Condition::Diam2First => {
                for &d in tgt.successors(Rel::Access, b) {
                    let found = src
                        .successors(Rel::Access, a)
                        .iter()
                        .any(|&c| member(Which::B, &[c], &[d]));
                    if !found && !report(cond, vec![d], None) {
                        return false;
                    }
                }
            }
            _ => {}
        }
    }
    true
}

/// Checks the conditions on a member of `B`.
pub(crate) fn check_b_pair(ctx: &PairCtx, guard: Guard, member: &Member, report: &mut Report) -> bool {
    if !guard.allows(Condition::Diam2Second) {
        return true;
    }
    for &c in ctx.src.successors(Rel::Diamond, ctx.a) {
        let found = ctx
            .tgt
            .successors(Rel::Diamond, ctx.b)
            .iter()
            .any(|&d| member(Which::A, &[c], &[d]));
        if !found && !report(Condition::Diam2Second, vec![c], None) {
            return false;
        }
    }
    true
}

pub(crate) fn joint_letters(m1: &KripkeStructure, m2: &KripkeStructure) -> Vec<u32> {
    let set: BTreeSet<u32> = m1.letters().chain(m2.letters()).collect();
    set.into_iter().collect()
}

fn validate_b<T>(kind: AsimKind, b: &Option<T>) -> Result<(), AsimError> {
    match (kind.uses_b(), b.is_some()) {
        (true, false) => Err(AsimError::MissingB(kind)),
        (false, true) => Err(AsimError::UnexpectedB(kind)),
        _ => Ok(()),
    }
}

fn check_root(m1: &KripkeStructure, t: World, m2: &KripkeStructure, u: World) -> Result<(), AsimError> {
    if t >= m1.len() {
        return Err(AsimError::WorldOutOfRange(t));
    }
    if u >= m2.len() {
        return Err(AsimError::WorldOutOfRange(u));
    }
    Ok(())
}

fn in_range(m1: &KripkeStructure, m2: &KripkeStructure, p: &DirectedPair) -> bool {
    let (src, tgt) = p.dir.models(m1, m2);
    p.from < src.len() && p.to < tgt.len()
}

/// Checks `rel` against every condition of `kind` and reports each failed
/// instance.
pub fn check_asimulation(
    m1: &KripkeStructure,
    t: World,
    m2: &KripkeStructure,
    u: World,
    kind: AsimKind,
    rel: &Asimulation,
) -> Result<Verdict, AsimError> {
    validate_b(kind, &rel.rel_b)?;
    check_root(m1, t, m2, u)?;
    let letters = joint_letters(m1, m2);
    let empty = BTreeSet::new();
    let rel_b = rel.rel_b.as_ref().unwrap_or(&empty);
    let mut out = Vec::new();

    for (set, cond) in [(&rel.rel_a, Condition::Type), (rel_b, Condition::BType)] {
        for p in set.iter().filter(|p| !in_range(m1, m2, p)) {
            out.push(Violation {
                condition: cond,
                premise: Some(Premise::Pair(*p)),
                trigger: Vec::new(),
                letter: None,
            });
        }
    }
    if !rel.rel_a.contains(&DirectedPair::new(Direction::OneTwo, t, u)) {
        out.push(Violation {
            condition: Condition::Elem,
            premise: None,
            trigger: Vec::new(),
            letter: None,
        });
    }

    for (is_b, set) in [(false, &rel.rel_a), (true, rel_b)] {
        for p in set.iter().filter(|p| in_range(m1, m2, p)) {
            let (src, tgt) = p.dir.models(m1, m2);
            let ctx = PairCtx {
                src,
                tgt,
                a: p.from,
                b: p.to,
                letters: &letters,
            };
            let member = |w: Which, fe: &[World], te: &[World]| {
                let (c, d) = (*fe.last().unwrap(), *te.last().unwrap());
                match w {
                    Which::A => rel.rel_a.contains(&DirectedPair::new(p.dir, c, d)),
                    Which::ARev => rel.rel_a.contains(&DirectedPair::new(p.dir.reverse(), d, c)),
                    Which::B => rel_b.contains(&DirectedPair::new(p.dir, c, d)),
                }
            };
            let mut report = |condition, trigger, letter| {
                out.push(Violation {
                    condition,
                    premise: Some(Premise::Pair(*p)),
                    trigger,
                    letter,
                });
                true
            };
            if is_b {
                check_b_pair(&ctx, Guard::OFF, &member, &mut report);
            } else {
                check_a_pair(&ctx, kind.a_conditions(), Guard::OFF, &member, &mut report);
            }
        }
    }
    Ok(Verdict::new(out))
}

fn seq_in_range(m1: &KripkeStructure, m2: &KripkeStructure, p: &SeqPair) -> bool {
    let (src, tgt) = p.dir.models(m1, m2);
    !p.from.is_empty()
        && p.from.len() == p.to.len()
        && p.from.iter().all(|&w| w < src.len())
        && p.to.iter().all(|&w| w < tgt.len())
}

/// The `k`-indexed check over sequence pairs. A condition is only checked
/// at pairs whose index `m` passes the condition's guard.
pub fn check_k_asimulation(
    m1: &KripkeStructure,
    t: World,
    m2: &KripkeStructure,
    u: World,
    k: usize,
    kind: AsimKind,
    rel: &SeqAsimulation,
) -> Result<Verdict, AsimError> {
    validate_b(kind, &rel.rel_b)?;
    check_root(m1, t, m2, u)?;
    let letters = joint_letters(m1, m2);
    let empty = BTreeSet::new();
    let rel_b = rel.rel_b.as_ref().unwrap_or(&empty);
    let mut out = Vec::new();

    for (set, cond) in [(&rel.rel_a, Condition::Type), (rel_b, Condition::BType)] {
        for p in set.iter().filter(|p| !seq_in_range(m1, m2, p)) {
            out.push(Violation {
                condition: cond,
                premise: Some(Premise::Seq(p.clone())),
                trigger: Vec::new(),
                letter: None,
            });
        }
    }
    if !rel.rel_a.contains(&SeqPair::singleton(Direction::OneTwo, t, u)) {
        out.push(Violation {
            condition: Condition::Elem,
            premise: None,
            trigger: Vec::new(),
            letter: None,
        });
    }

    for (is_b, set) in [(false, &rel.rel_a), (true, rel_b)] {
        for p in set.iter().filter(|p| seq_in_range(m1, m2, p)) {
            let (src, tgt) = p.dir.models(m1, m2);
            let (a, b) = p.last().expect("well-formed pairs are non-empty");
            let ctx = PairCtx {
                src,
                tgt,
                a,
                b,
                letters: &letters,
            };
            let member = |w: Which, fe: &[World], te: &[World]| {
                let ext = p.extended(fe, te);
                match w {
                    Which::A => rel.rel_a.contains(&ext),
                    Which::ARev => rel.rel_a.contains(&ext.reverse()),
                    Which::B => rel_b.contains(&ext),
                }
            };
            let mut report = |condition, trigger, letter| {
                out.push(Violation {
                    condition,
                    premise: Some(Premise::Seq(p.clone())),
                    trigger,
                    letter,
                });
                true
            };
            let guard = Guard(Some((p.m(), k)));
            if is_b {
                check_b_pair(&ctx, guard, &member, &mut report);
            } else {
                check_a_pair(&ctx, kind.a_conditions(), guard, &member, &mut report);
            }
        }
    }
    Ok(Verdict::new(out))
}
