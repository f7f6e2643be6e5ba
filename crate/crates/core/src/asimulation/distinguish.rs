use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::kripke::{KripkeStructure, World};
use crate::semantics::{TruthAlgebra, Variant};
use crate::syntax::ModalFormula;

use super::check::joint_letters;

struct Entry {
    truth: FixedBitSet,
    formula: ModalFormula,
    size: usize,
    depth: usize,
}

#[derive(Clone, Copy)]
enum Op {
    Box(usize),
    Diamond(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
}

impl Op {
    fn build(self, entries: &[Entry]) -> ModalFormula {
        let f = |i: usize| entries[i].formula.clone();
        match self {
            Op::Box(i) => ModalFormula::boxed(f(i)),
            Op::Diamond(i) => ModalFormula::diamond(f(i)),
            Op::And(i, j) => ModalFormula::and(f(i), f(j)),
            Op::Or(i, j) => ModalFormula::or(f(i), f(j)),
            Op::Implies(i, j) => ModalFormula::implies(f(i), f(j)),
        }
    }
}

/// Searches for a formula true at `t` in `m1` and false at `u` in `m2`,
/// by connective depth. Formulas are deduplicated by their truth set over
/// the disjoint union of the two models, so each depth layer is finite.
/// Among witnesses of minimal depth the smallest one is returned.
pub fn distinguishing_formula(
    m1: &KripkeStructure,
    t: World,
    m2: &KripkeStructure,
    u: World,
    v: Variant,
    max_depth: usize,
) -> Option<ModalFormula> {
    let (union, offsets) = KripkeStructure::disjoint_union(&[m1, m2]);
    let (t, u) = (offsets[0] + t, offsets[1] + u);
    let alg = TruthAlgebra::new(&union, v);
    let splits = |s: &FixedBitSet| s.contains(t) && !s.contains(u);

    let mut entries: Vec<Entry> = Vec::new();
    let mut seen: HashSet<FixedBitSet> = HashSet::new();

    let mut atoms = vec![(alg.bottom(), ModalFormula::Bottom)];
    atoms.extend(
        joint_letters(m1, m2)
            .into_iter()
            .map(|l| (alg.prop(l), ModalFormula::Prop(l))),
    );
    for (truth, formula) in atoms {
        if seen.insert(truth.clone()) {
            entries.push(Entry {
                truth,
                formula,
                size: 1,
                depth: 0,
            });
        }
    }

    for depth in 0..=max_depth {
        if depth > 0 {
            // smallest candidate per new truth set, first found on ties
            let mut best: HashMap<FixedBitSet, (usize, Op)> = HashMap::new();
            let mut order = Vec::new();
            for (truth, size, op) in next_layer(&alg, &entries, depth - 1) {
                if seen.contains(&truth) {
                    continue;
                }
                match best.get_mut(&truth) {
                    Some(slot) => {
                        if size < slot.0 {
                            *slot = (size, op);
                        }
                    }
                    None => {
                        order.push(truth.clone());
                        best.insert(truth, (size, op));
                    }
                }
            }
            if order.is_empty() {
                // nothing new at this depth, so nothing new deeper either
                return None;
            }
            for truth in order {
                let (size, op) = best[&truth];
                let formula = op.build(&entries);
                seen.insert(truth.clone());
                entries.push(Entry {
                    truth,
                    formula,
                    size,
                    depth,
                });
            }
        }
        let witness = entries
            .iter()
            .filter(|e| e.depth == depth && splits(&e.truth))
            .min_by_key(|e| e.size);
        if let Some(w) = witness {
            return Some(w.formula.clone());
        }
    }
    None
}

/// Every one-connective extension whose deepest argument sits at `prev`.
fn next_layer(alg: &TruthAlgebra, entries: &[Entry], prev: usize) -> Vec<(FixedBitSet, usize, Op)> {
    let mut out = Vec::new();
    for (i, e) in entries.iter().enumerate().filter(|(_, e)| e.depth == prev) {
        out.push((alg.boxed(&e.truth), e.size + 1, Op::Box(i)));
        out.push((alg.diamond(&e.truth), e.size + 1, Op::Diamond(i)));
    }
    for (i, l) in entries.iter().enumerate() {
        for (j, r) in entries.iter().enumerate() {
            if l.depth.max(r.depth) != prev {
                continue;
            }
            let size = l.size + r.size + 1;
            if i <= j {
                out.push((alg.and(&l.truth, &r.truth), size, Op::And(i, j)));
                out.push((alg.or(&l.truth, &r.truth), size, Op::Or(i, j)));
            }
            out.push((alg.implies(&l.truth, &r.truth), size, Op::Implies(i, j)));
        }
    }
    out
}
