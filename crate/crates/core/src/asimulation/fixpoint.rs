use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;

use crate::kripke::{KripkeStructure, World};
use crate::syntax::Rel;

use super::check::{check_a_pair, check_b_pair, joint_letters, Guard, PairCtx, Which};
use super::{AsimKind, Asimulation, DirectedPair, Direction};

/// Dense numbering of all cross pairs of two models.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairSpace {
    n1: usize,
    n2: usize,
}

impl PairSpace {
    pub(crate) fn new(m1: &KripkeStructure, m2: &KripkeStructure) -> Self {
        PairSpace {
            n1: m1.len(),
            n2: m2.len(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        2 * self.n1 * self.n2
    }

    pub(crate) fn index(&self, dir: Direction, from: World, to: World) -> usize {
        match dir {
            Direction::OneTwo => from * self.n2 + to,
            Direction::TwoOne => self.n1 * self.n2 + from * self.n1 + to,
        }
    }

    pub(crate) fn pair(&self, i: usize) -> DirectedPair {
        let half = self.n1 * self.n2;
        if i < half {
            DirectedPair::new(Direction::OneTwo, i / self.n2, i % self.n2)
        } else {
            let j = i - half;
            DirectedPair::new(Direction::TwoOne, j / self.n1, j % self.n1)
        }
    }
}

struct Refiner<'a> {
    m1: &'a KripkeStructure,
    m2: &'a KripkeStructure,
    space: PairSpace,
    a: FixedBitSet,
    b: FixedBitSet,
    // queued[i] for A, queued[len + i] for B
    queued: FixedBitSet,
    queue: VecDeque<(bool, usize)>,
}

impl Refiner<'_> {
    fn push(&mut self, is_b: bool, i: usize) {
        let present = if is_b { self.b.contains(i) } else { self.a.contains(i) };
        let slot = if is_b { self.space.len() + i } else { i };
        if present && !self.queued.put(slot) {
            self.queue.push_back((is_b, i));
        }
    }

    fn push_product(&mut self, is_b: bool, dir: Direction, xs: &[World], ys: &[World]) {
        for &x in xs {
            for &y in ys {
                let i = self.space.index(dir, x, y);
                self.push(is_b, i);
            }
        }
    }

    /// Re-queues every pair whose conditions may have used the deleted pair.
    fn deleted(&mut self, is_b: bool, p: DirectedPair) {
        let (src, tgt) = p.dir.models(self.m1, self.m2);
        let (x, y) = (p.from, p.to);
        let pr = |m: &KripkeStructure, rel, w| m.predecessors(rel, w).to_vec();
        if is_b {
            self.push_product(false, p.dir, &pr(src, Rel::Access, x), &pr(tgt, Rel::Access, y));
            return;
        }
        let (rx, ry) = (pr(src, Rel::Access, x), pr(tgt, Rel::Access, y));
        self.push_product(false, p.dir, &rx, &ry);
        self.push_product(false, p.dir.reverse(), &ry, &rx);
        self.push_product(false, p.dir, &pr(src, Rel::Box, x), &pr(tgt, Rel::Box, y));
        let two_step = |m: &KripkeStructure, w| {
            let set: BTreeSet<World> = m
                .predecessors(Rel::Box, w)
                .iter()
                .flat_map(|&c| m.predecessors(Rel::Access, c).iter().copied())
                .collect();
            set.into_iter().collect::<Vec<_>>()
        };
        self.push_product(false, p.dir, &two_step(src, x), &two_step(tgt, y));
        let (dx, dy) = (pr(src, Rel::Diamond, x), pr(tgt, Rel::Diamond, y));
        self.push_product(false, p.dir, &dx, &dy);
        self.push_product(true, p.dir, &dx, &dy);
    }
}

/// The largest relation pair `(A, B)` satisfying every condition of `kind`
/// except (elem), by deletion from the full relation. The flag says whether
/// the root pair `t → u` survives, i.e. whether any asimulation exists.
pub fn maximal_asimulation(
    m1: &KripkeStructure,
    t: World,
    m2: &KripkeStructure,
    u: World,
    kind: AsimKind,
) -> (Asimulation, bool) {
    assert!(t < m1.len() && u < m2.len(), "root worlds out of range");
    let space = PairSpace::new(m1, m2);
    let letters = joint_letters(m1, m2);
    let n = space.len();

    let mut a = FixedBitSet::with_capacity(n);
    for i in 0..n {
        let p = space.pair(i);
        let (src, tgt) = p.dir.models(m1, m2);
        a.set(i, letters.iter().all(|&l| !src.holds(l, p.from) || tgt.holds(l, p.to)));
    }
    let mut b = FixedBitSet::with_capacity(n);
    if kind.uses_b() {
        b.insert_range(..);
    }

    let mut r = Refiner {
        m1,
        m2,
        space,
        a,
        b,
        queued: FixedBitSet::with_capacity(2 * n),
        queue: VecDeque::new(),
    };
    for i in 0..n {
        r.push(false, i);
        r.push(true, i);
    }

    let a_conds: Vec<_> = kind
        .a_conditions()
        .iter()
        .copied()
        .filter(|c| *c != super::Condition::Base)
        .collect();

    while let Some((is_b, i)) = r.queue.pop_front() {
        let slot = if is_b { n + i } else { i };
        r.queued.set(slot, false);
        let p = space.pair(i);
        let (src, tgt) = p.dir.models(m1, m2);
        let ctx = PairCtx {
            src,
            tgt,
            a: p.from,
            b: p.to,
            letters: &letters,
        };
        let (rel_a, rel_b) = (&r.a, &r.b);
        let member = |w: Which, fe: &[World], te: &[World]| {
            let (c, d) = (*fe.last().unwrap(), *te.last().unwrap());
            match w {
                Which::A => rel_a.contains(space.index(p.dir, c, d)),
                Which::ARev => rel_a.contains(space.index(p.dir.reverse(), d, c)),
                Which::B => rel_b.contains(space.index(p.dir, c, d)),
            }
        };
        let mut failed = false;
        let mut report = |_, _, _| {
            failed = true;
            false
        };
        if is_b {
            check_b_pair(&ctx, Guard::OFF, &member, &mut report);
        } else {
            check_a_pair(&ctx, &a_conds, Guard::OFF, &member, &mut report);
        }
        if failed {
            if is_b {
                r.b.set(i, false);
            } else {
                r.a.set(i, false);
            }
            r.deleted(is_b, p);
        }
    }

    let collect = |set: &FixedBitSet| set.ones().map(|i| space.pair(i)).collect::<BTreeSet<_>>();
    let root = r.a.contains(space.index(Direction::OneTwo, t, u));
    let rel = Asimulation {
        rel_a: collect(&r.a),
        rel_b: kind.uses_b().then(|| collect(&r.b)),
    };
    (rel, root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asimulation::check_asimulation;
    use crate::asimulation::Condition;
    use crate::kripke::random_model;
    use crate::semantics::Variant;

    #[test]
    fn space_round_trip() {
        let m1 = KripkeStructure::with_worlds(3);
        let m2 = KripkeStructure::with_worlds(2);
        let s = PairSpace::new(&m1, &m2);
        for i in 0..s.len() {
            let p = s.pair(i);
            assert_eq!(s.index(p.dir, p.from, p.to), i);
        }
    }

    #[test]
    fn output_passes_checker() {
        for seed in 0..200u64 {
            let m1 = random_model(1 + (seed % 4) as usize, 0.35, 1, seed);
            let m2 = random_model(1 + (seed % 3) as usize, 0.35, 1, seed + 1000);
            for kind in Variant::ALL.map(AsimKind::Modal).into_iter().chain([AsimKind::Basic]) {
                let (rel, root) = maximal_asimulation(&m1, 0, &m2, 0, kind);
                let v = check_asimulation(&m1, 0, &m2, 0, kind, &rel).unwrap();
                assert!(v.ok_except(&[Condition::Elem]), "seed {seed} {kind}: {:?}", v.violations);
                assert_eq!(root, v.ok);
            }
        }
    }
}
