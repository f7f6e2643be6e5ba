//! Bounded formula pools, the type sets `tp`, `tp̄` and `imp`, complete
//! conjunctions, and the type-inclusion constructions of (k-)asimulations.
//!
//! A pool holds one representative per truth set over a corpus of models,
//! among all formulas whose translation degree is within a bound. It is
//! computed as a lightest-derivation closure: candidates are explored in
//! order of size and kept only if no formula of no greater degree already
//! has the same truth set. Because the number of truth sets over a finite
//! corpus is finite, the closure terminates even without a size cap.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::asimulation::{Asimulation, DirectedPair, Direction, SeqAsimulation, SeqPair};
use crate::kripke::{KripkeStructure, World};
use crate::semantics::{Clause, TruthAlgebra, Variant};
use crate::syntax::{ModalFormula, Rel, Signature};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypesError {
    #[error("the deduplication corpus is empty")]
    EmptyCorpus,
    #[error("no pool for degree bound {0}")]
    MissingBound(usize),
    #[error("world {0} has an empty type, so there is nothing to conjoin")]
    EmptyType(World),
    #[error("stabilization bound must be at least 1")]
    ZeroBound,
}

#[derive(Debug, Clone, Copy)]
enum Deriv {
    Bottom,
    Prop(u32),
    Box(usize),
    Diamond(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
}

#[derive(Debug, Clone)]
struct Entry {
    truth: FixedBitSet,
    degree: usize,
    size: usize,
    deriv: Deriv,
}

/// The lightest-derivation closure up to a maximal degree; pools for every
/// smaller bound are read off it.
#[derive(Debug, Clone)]
pub struct PoolFamily {
    signature: Signature,
    variant: Variant,
    max_bound: usize,
    pools: Vec<FormulaPool>,
}

#[derive(Debug, Clone)]
pub struct FormulaPool {
    signature: Signature,
    variant: Variant,
    degree_bound: usize,
    members: Vec<ModalFormula>,
    degrees: Vec<usize>,
}

impl FormulaPool {
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn members(&self) -> &[ModalFormula] {
        &self.members
    }

    /// Translation degree of each member.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Truth sets of every member on `m`, in member order.
    pub fn evaluate(&self, m: &KripkeStructure) -> PoolTruths {
        let alg = TruthAlgebra::new(m, self.variant);
        let truths: Vec<FixedBitSet> = self.members.iter().map(|f| alg.eval(f)).collect();
        let mut tp = vec![FixedBitSet::with_capacity(self.len()); m.len()];
        for (i, t) in truths.iter().enumerate() {
            for w in t.ones() {
                tp[w].insert(i);
            }
        }
        let full = {
            let mut s = FixedBitSet::with_capacity(self.len());
            s.insert_range(..);
            s
        };
        let imp = m
            .worlds()
            .map(|a| {
                let mut acc = full.clone();
                for &b in m.successors(Rel::Diamond, a) {
                    acc.difference_with(&tp[b]);
                }
                acc
            })
            .collect();
        PoolTruths { tp, imp, full }
    }
}

/// Per-world type sets of one model over one pool, as bitsets over the
/// pool's member indices.
#[derive(Debug, Clone)]
pub struct PoolTruths {
    tp: Vec<FixedBitSet>,
    imp: Vec<FixedBitSet>,
    full: FixedBitSet,
}

impl PoolTruths {
    pub fn tp(&self, a: World) -> &FixedBitSet {
        &self.tp[a]
    }

    pub fn tpbar(&self, a: World) -> FixedBitSet {
        let mut out = self.full.clone();
        out.difference_with(&self.tp[a]);
        out
    }

    pub fn imp(&self, a: World) -> &FixedBitSet {
        &self.imp[a]
    }
}

impl PoolFamily {
    /// Enumerates pools for every bound `0..=max_bound` at once.
    ///
    /// `size_cap` bounds the tree size of the formulas considered; with
    /// `usize::MAX` the pools contain every truth-set class of the bound.
    pub fn enumerate(
        sig: &Signature,
        v: Variant,
        max_bound: usize,
        corpus: &[&KripkeStructure],
        size_cap: usize,
    ) -> Result<PoolFamily, TypesError> {
        if corpus.is_empty() {
            return Err(TypesError::EmptyCorpus);
        }
        let (union, _) = KripkeStructure::disjoint_union(corpus);
        let entries = closure(&union, sig, v, max_bound, size_cap);
        let mut all_true = FixedBitSet::with_capacity(union.len());
        all_true.insert_range(..);
        let top = ModalFormula::top();

        let mut built: Vec<Option<ModalFormula>> = vec![None; entries.len()];
        let pools = (0..=max_bound)
            .map(|bound| {
                // lightest entry per truth set among those within the bound,
                // listed in order of first acceptance
                let mut chosen: HashMap<&FixedBitSet, usize> = HashMap::new();
                let mut order = Vec::new();
                for (i, e) in entries.iter().enumerate().filter(|(_, e)| e.degree <= bound) {
                    if !chosen.contains_key(&e.truth) {
                        chosen.insert(&e.truth, i);
                        order.push(i);
                    }
                }
                let mut members = Vec::with_capacity(order.len());
                let mut degrees = Vec::with_capacity(order.len());
                for i in order {
                    let e = &entries[i];
                    if bound >= 1 && e.truth == all_true {
                        members.push(top.clone());
                        degrees.push(1);
                    } else {
                        members.push(build(&entries, &mut built, i));
                        degrees.push(e.degree);
                    }
                }
                FormulaPool {
                    signature: sig.clone(),
                    variant: v,
                    degree_bound: bound,
                    members,
                    degrees,
                }
            })
            .collect();
        Ok(PoolFamily {
            signature: sig.clone(),
            variant: v,
            max_bound,
            pools,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn max_bound(&self) -> usize {
        self.max_bound
    }

    pub fn get(&self, bound: usize) -> Result<&FormulaPool, TypesError> {
        self.pools.get(bound).ok_or(TypesError::MissingBound(bound))
    }
}

fn build(entries: &[Entry], built: &mut Vec<Option<ModalFormula>>, i: usize) -> ModalFormula {
    if let Some(f) = &built[i] {
        return f.clone();
    }
    let mut sub = |j: usize| build(entries, built, j);
    let f = match entries[i].deriv {
        Deriv::Bottom => ModalFormula::Bottom,
        Deriv::Prop(l) => ModalFormula::Prop(l),
        Deriv::Box(j) => ModalFormula::boxed(sub(j)),
        Deriv::Diamond(j) => ModalFormula::diamond(sub(j)),
        Deriv::And(j, k) => {
            let l = sub(j);
            ModalFormula::and(l, sub(k))
        }
        Deriv::Or(j, k) => {
            let l = sub(j);
            ModalFormula::or(l, sub(k))
        }
        Deriv::Implies(j, k) => {
            let l = sub(j);
            ModalFormula::implies(l, sub(k))
        }
    };
    built[i] = Some(f.clone());
    f
}

fn step(c: Clause) -> usize {
    match c {
        Clause::One => 1,
        Clause::Two => 2,
    }
}

/// Accepted entries in order of acceptance, i.e. by size.
fn closure(union: &KripkeStructure, sig: &Signature, v: Variant, max_bound: usize, size_cap: usize) -> Vec<Entry> {
    let alg = TruthAlgebra::new(union, v);
    let mut accepted: Vec<Entry> = Vec::new();
    // degrees already reached per truth set; an entry is dominated when
    // some accepted entry with the same truth set has no greater degree
    let mut reached: HashMap<FixedBitSet, usize> = HashMap::new();
    let dominated = |reached: &HashMap<FixedBitSet, usize>, truth: &FixedBitSet, degree: usize| {
        reached.get(truth).is_some_and(|&d| d <= degree)
    };
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new();
    let mut pending: Vec<Entry> = Vec::new();
    let push = |heap: &mut BinaryHeap<Reverse<(usize, usize)>>, pending: &mut Vec<Entry>, e: Entry| {
        heap.push(Reverse((e.size, pending.len())));
        pending.push(e);
    };

    if size_cap >= 1 {
        push(&mut heap, &mut pending, Entry {
            truth: alg.bottom(),
            degree: 0,
            size: 1,
            deriv: Deriv::Bottom,
        });
        for l in sig.letters() {
            push(&mut heap, &mut pending, Entry {
                truth: alg.prop(l),
                degree: 0,
                size: 1,
                deriv: Deriv::Prop(l),
            });
        }
    }

    while let Some(Reverse((_, id))) = heap.pop() {
        let e = pending[id].clone();
        if dominated(&reached, &e.truth, e.degree) {
            continue;
        }
        reached.insert(e.truth.clone(), e.degree);
        let i = accepted.len();
        accepted.push(e);
        let e = &accepted[i];

        let mut fresh = Vec::new();
        if e.size < size_cap {
            let bd = e.degree + step(v.box_clause);
            if bd <= max_bound {
                fresh.push(Entry {
                    truth: alg.boxed(&e.truth),
                    degree: bd,
                    size: e.size + 1,
                    deriv: Deriv::Box(i),
                });
            }
            let dd = e.degree + step(v.diamond_clause);
            if dd <= max_bound {
                fresh.push(Entry {
                    truth: alg.diamond(&e.truth),
                    degree: dd,
                    size: e.size + 1,
                    deriv: Deriv::Diamond(i),
                });
            }
        }
        for (j, o) in accepted.iter().enumerate() {
            let size = e.size + o.size + 1;
            if size > size_cap {
                continue;
            }
            let deg = e.degree.max(o.degree);
            fresh.push(Entry {
                truth: alg.and(&e.truth, &o.truth),
                degree: deg,
                size,
                deriv: Deriv::And(j, i),
            });
            fresh.push(Entry {
                truth: alg.or(&e.truth, &o.truth),
                degree: deg,
                size,
                deriv: Deriv::Or(j, i),
            });
            if deg < max_bound {
                fresh.push(Entry {
                    truth: alg.implies(&o.truth, &e.truth),
                    degree: deg + 1,
                    size,
                    deriv: Deriv::Implies(j, i),
                });
                if j != i {
                    fresh.push(Entry {
                        truth: alg.implies(&e.truth, &o.truth),
                        degree: deg + 1,
                        size,
                        deriv: Deriv::Implies(i, j),
                    });
                }
            }
        }
        for f in fresh {
            if !dominated(&reached, &f.truth, f.degree) {
                push(&mut heap, &mut pending, f);
            }
        }
    }
    accepted
}

/// Pool of every truth-set class over `corpus` with degree at most
/// `degree_bound` and size at most `size_cap`.
pub fn enumerate_pool(
    sig: &Signature,
    v: Variant,
    degree_bound: usize,
    corpus: &[&KripkeStructure],
    size_cap: usize,
) -> Result<FormulaPool, TypesError> {
    let mut family = PoolFamily::enumerate(sig, v, degree_bound, corpus, size_cap)?;
    Ok(family.pools.pop().expect("bound 0 always exists"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeKind {
    /// Members true at the point.
    Tp,
    /// Members false at the point.
    TpBar,
    /// Members false at every `R◇`-successor of the point.
    Imp,
}

/// A subset of a pool, as indices into its members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSet {
    pub kind: TypeKind,
    pub members: FixedBitSet,
}

impl TypeSet {
    pub fn formulas<'p>(&'p self, pool: &'p FormulaPool) -> impl Iterator<Item = &'p ModalFormula> + 'p {
        self.members.ones().map(move |i| &pool.members[i])
    }

    pub fn is_subset(&self, other: &TypeSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn contains(&self, member: usize) -> bool {
        self.members.contains(member)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }
}

pub fn type_set(m: &KripkeStructure, a: World, pool: &FormulaPool, kind: TypeKind) -> TypeSet {
    let truths = pool.evaluate(m);
    let members = match kind {
        TypeKind::Tp => truths.tp(a).clone(),
        TypeKind::TpBar => truths.tpbar(a),
        TypeKind::Imp => truths.imp(a).clone(),
    };
    TypeSet { kind, members }
}

/// The conjunction of every pool member true at `a`, in pool order.
pub fn complete_conjunction(m: &KripkeStructure, a: World, pool: &FormulaPool) -> Result<ModalFormula, TypesError> {
    let tp = type_set(m, a, pool, TypeKind::Tp);
    tp.formulas(pool)
        .cloned()
        .reduce(ModalFormula::and)
        .ok_or(TypesError::EmptyType(a))
}

/// Type sets of both models for one bound.
struct Side {
    models: [PoolTruths; 2],
}

impl Side {
    fn new(pool: &FormulaPool, m1: &KripkeStructure, m2: &KripkeStructure) -> Side {
        Side {
            models: [pool.evaluate(m1), pool.evaluate(m2)],
        }
    }

    fn of(&self, dir: Direction) -> (&PoolTruths, &PoolTruths) {
        match dir {
            Direction::OneTwo => (&self.models[0], &self.models[1]),
            Direction::TwoOne => (&self.models[1], &self.models[0]),
        }
    }

    fn tp_included(&self, dir: Direction, a: World, b: World) -> bool {
        let (s, t) = self.of(dir);
        s.tp(a).is_subset(t.tp(b))
    }

    fn imp_reverse_included(&self, dir: Direction, a: World, b: World) -> bool {
        let (s, t) = self.of(dir);
        t.imp(b).is_subset(s.imp(a))
    }
}

/// The sequence relations of the canonical `k`-construction, materialized
/// from the singleton pairs along the extensions the conditions inspect.
/// A pair at index `m` is in `A` iff `m ≤ k` and the `tp` of its last
/// worlds at bound `k - m + 2` are included; `B` uses `imp` at bound
/// `k - m + 1` with the inclusion reversed.
pub fn canonical_k_asimulation(
    m1: &KripkeStructure,
    t: World,
    m2: &KripkeStructure,
    u: World,
    k: usize,
    v: Variant,
    pools: &PoolFamily,
) -> Result<SeqAsimulation, TypesError> {
    let _ = (t, u);
    let sides: Vec<Option<Side>> = (0..=k + 2)
        .map(|l| {
            if l == 0 {
                Ok(None)
            } else {
                pools.get(l).map(|p| Some(Side::new(p, m1, m2)))
            }
        })
        .collect::<Result<_, _>>()?;
    let side = |l: usize| sides[l].as_ref().expect("bounds from 1 are present");
    let in_a = |p: &SeqPair| {
        let m = p.m();
        let (a, b) = p.last().expect("non-empty");
        m <= k && side(k - m + 2).tp_included(p.dir, a, b)
    };
    let in_b = |p: &SeqPair| {
        let m = p.m();
        let (a, b) = p.last().expect("non-empty");
        m <= k && side(k - m + 1).imp_reverse_included(p.dir, a, b)
    };

    let mut rel_a: BTreeSet<SeqPair> = BTreeSet::new();
    let mut rel_b: BTreeSet<SeqPair> = BTreeSet::new();
    let mut work: Vec<(bool, SeqPair)> = Vec::new();
    let offer = |is_b: bool, p: SeqPair, rel_a: &mut BTreeSet<SeqPair>, rel_b: &mut BTreeSet<SeqPair>, work: &mut Vec<(bool, SeqPair)>| {
        let (set, holds) = if is_b { (rel_b, in_b(&p)) } else { (rel_a, in_a(&p)) };
        if holds && !set.contains(&p) {
            set.insert(p.clone());
            work.push((is_b, p));
        }
    };

    for dir in Direction::BOTH {
        let (src, tgt) = dir.models(m1, m2);
        for a in src.worlds() {
            for b in tgt.worlds() {
                offer(false, SeqPair::singleton(dir, a, b), &mut rel_a, &mut rel_b, &mut work);
                if v.uses_b() {
                    offer(true, SeqPair::singleton(dir, a, b), &mut rel_a, &mut rel_b, &mut work);
                }
            }
        }
    }

    while let Some((is_b, p)) = work.pop() {
        let m = p.m();
        if m + 1 > k {
            continue;
        }
        let (src, tgt) = p.dir.models(m1, m2);
        let (a, b) = p.last().expect("non-empty");
        let succ = |m: &KripkeStructure, rel, w| m.successors(rel, w).to_vec();
        let mut next: Vec<(bool, SeqPair)> = Vec::new();
        if is_b {
            for c in succ(src, Rel::Diamond, a) {
                for d in succ(tgt, Rel::Diamond, b) {
                    next.push((false, p.extended(&[c], &[d])));
                }
            }
        } else {
            for c in succ(src, Rel::Access, a) {
                for d in succ(tgt, Rel::Access, b) {
                    let ext = p.extended(&[c], &[d]);
                    next.push((false, ext.reverse()));
                    if v.uses_b() {
                        next.push((true, ext.clone()));
                    }
                    next.push((false, ext));
                }
            }
            match v.box_clause {
                Clause::One => {
                    for c in succ(src, Rel::Box, a) {
                        for d in succ(tgt, Rel::Box, b) {
                            next.push((false, p.extended(&[c], &[d])));
                        }
                    }
                }
                Clause::Two if m + 2 <= k => {
                    for c in succ(src, Rel::Access, a) {
                        for e in succ(src, Rel::Box, c) {
                            for d in succ(tgt, Rel::Access, b) {
                                for f in succ(tgt, Rel::Box, d) {
                                    next.push((false, p.extended(&[c, e], &[d, f])));
                                }
                            }
                        }
                    }
                }
                Clause::Two => {}
            }
            if v.diamond_clause == Clause::One {
                for c in succ(src, Rel::Diamond, a) {
                    for d in succ(tgt, Rel::Diamond, b) {
                        next.push((false, p.extended(&[c], &[d])));
                    }
                }
            }
        }
        for (is_b, q) in next {
            offer(is_b, q, &mut rel_a, &mut rel_b, &mut work);
        }
    }

    Ok(SeqAsimulation {
        rel_a,
        rel_b: v.uses_b().then_some(rel_b),
    })
}

/// Result of [`canonical_asimulation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalAsimulation {
    pub relation: Asimulation,
    /// Whether raising the bound by one leaves the relations unchanged.
    pub stabilized: bool,
}

/// Type-inclusion relations between two finite models: `A` holds for pairs
/// whose `tp` is included at every bound up to `bound`, `B` for pairs whose
/// `imp` is included the other way round.
pub fn canonical_asimulation(
    m1: &KripkeStructure,
    t: World,
    m2: &KripkeStructure,
    u: World,
    v: Variant,
    bound: usize,
) -> Result<CanonicalAsimulation, TypesError> {
    let _ = (t, u);
    if bound == 0 {
        return Err(TypesError::ZeroBound);
    }
    let sig = Signature::new(m1.letters().chain(m2.letters()));
    let family = PoolFamily::enumerate(&sig, v, bound + 1, &[m1, m2], usize::MAX)?;
    let sides: Vec<Side> = (0..=bound + 1)
        .map(|l| Side::new(family.get(l).expect("enumerated"), m1, m2))
        .collect();
    let relation_at = |upto: usize| {
        let mut rel = Asimulation {
            rel_a: BTreeSet::new(),
            rel_b: v.uses_b().then(BTreeSet::new),
        };
        for dir in Direction::BOTH {
            let (src, tgt) = dir.models(m1, m2);
            for a in src.worlds() {
                for b in tgt.worlds() {
                    let p = DirectedPair::new(dir, a, b);
                    if sides[..=upto].iter().all(|s| s.tp_included(dir, a, b)) {
                        rel.rel_a.insert(p);
                    }
                    if let Some(rb) = rel.rel_b.as_mut() {
                        if sides[..=upto].iter().all(|s| s.imp_reverse_included(dir, a, b)) {
                            rb.insert(p);
                        }
                    }
                }
            }
        }
        rel
    };
    let relation = relation_at(bound);
    let stabilized = relation == relation_at(bound + 1);
    Ok(CanonicalAsimulation { relation, stabilized })
}
