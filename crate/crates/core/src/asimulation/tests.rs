use std::collections::BTreeSet;

use super::*;
use crate::kripke::random_model;
use crate::semantics::{eval_fol, eval_modal, Env};
use crate::syntax::{ModalFormula, Rel, Var};
use crate::translate::translate;

fn one_point(p1: bool) -> KripkeStructure {
    let mut m = KripkeStructure::with_worlds(1);
    if p1 {
        m.set_true(1, 0);
    }
    m
}

fn cross(m1: &KripkeStructure, m2: &KripkeStructure) -> Vec<DirectedPair> {
    let mut out = Vec::new();
    for a in m1.worlds() {
        for b in m2.worlds() {
            out.push(DirectedPair::new(Direction::OneTwo, a, b));
            out.push(DirectedPair::new(Direction::TwoOne, b, a));
        }
    }
    out
}

fn subset(all: &[DirectedPair], mask: u64) -> BTreeSet<DirectedPair> {
    all.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, p)| *p)
        .collect()
}

/// Union of every relation passing all conditions but (elem).
fn brute_force_union(m1: &KripkeStructure, m2: &KripkeStructure, kind: AsimKind) -> Asimulation {
    let all = cross(m1, m2);
    let n = all.len();
    let b_masks: Vec<Option<u64>> = if kind.uses_b() {
        (0..1u64 << n).map(Some).collect()
    } else {
        vec![None]
    };
    let mut union = Asimulation {
        rel_a: BTreeSet::new(),
        rel_b: kind.uses_b().then(BTreeSet::new),
    };
    for a in 0..1u64 << n {
        for b in &b_masks {
            let rel = Asimulation {
                rel_a: subset(&all, a),
                rel_b: b.map(|b| subset(&all, b)),
            };
            let v = check_asimulation(m1, 0, m2, 0, kind, &rel).unwrap();
            if v.ok_except(&[Condition::Elem]) {
                union.rel_a.extend(rel.rel_a);
                if let (Some(u), Some(b)) = (union.rel_b.as_mut(), rel.rel_b) {
                    u.extend(b);
                }
            }
        }
    }
    union
}

fn all_kinds() -> Vec<AsimKind> {
    let mut k: Vec<_> = Variant::ALL.into_iter().map(AsimKind::Modal).collect();
    k.push(AsimKind::Basic);
    k
}

#[test]
fn identical_points_are_related() {
    let m = one_point(false);
    let rel = Asimulation {
        rel_a: cross(&m, &m).into_iter().collect(),
        rel_b: None,
    };
    let v = check_asimulation(&m, 0, &m, 0, AsimKind::Modal(Variant::V11), &rel).unwrap();
    assert!(v.ok, "{:?}", v.violations);
}

#[test]
fn base_violation_names_the_letter() {
    let (m1, m2) = (one_point(true), one_point(false));
    for kind in all_kinds() {
        let rel = Asimulation {
            rel_a: [DirectedPair::new(Direction::OneTwo, 0, 0)].into(),
            rel_b: kind.uses_b().then(BTreeSet::new),
        };
        let v = check_asimulation(&m1, 0, &m2, 0, kind, &rel).unwrap();
        assert_eq!(v.violations.len(), 1);
        assert_eq!(v.violations[0].condition, Condition::Base);
        assert_eq!(v.violations[0].letter, Some(1));
    }
}

#[test]
fn missing_successor_witness() {
    let m1 = one_point(false);
    let mut m2 = KripkeStructure::with_worlds(2);
    m2.add_edge(Rel::Access, 0, 1);
    let rel = Asimulation {
        rel_a: [DirectedPair::new(Direction::OneTwo, 0, 0)].into(),
        rel_b: None,
    };
    let kind = AsimKind::Modal(Variant::V11);
    // (box-1) is triggered by box successors only
    let v = check_asimulation(&m1, 0, &m2, 0, kind, &rel).unwrap();
    assert_eq!(v.conditions(), [Condition::Step].into());
    m2.add_edge(Rel::Box, 0, 1);
    let v = check_asimulation(&m1, 0, &m2, 0, kind, &rel).unwrap();
    assert_eq!(v.conditions(), [Condition::Step, Condition::Box1].into());
    assert!(v.violations.iter().all(|x| x.trigger == vec![1]));
}

#[test]
fn b_presence_is_validated() {
    let m = one_point(false);
    let rel = Asimulation::default();
    assert!(matches!(
        check_asimulation(&m, 0, &m, 0, AsimKind::Modal(Variant::V22), &rel),
        Err(AsimError::MissingB(_))
    ));
    let rel = Asimulation {
        rel_a: BTreeSet::new(),
        rel_b: Some(BTreeSet::new()),
    };
    assert!(matches!(
        check_asimulation(&m, 0, &m, 0, AsimKind::Modal(Variant::V21), &rel),
        Err(AsimError::UnexpectedB(_))
    ));
}

#[test]
fn out_of_range_pairs_break_type() {
    let m = one_point(false);
    let rel = Asimulation {
        rel_a: [DirectedPair::new(Direction::OneTwo, 0, 0), DirectedPair::new(Direction::TwoOne, 0, 4)].into(),
        rel_b: None,
    };
    let v = check_asimulation(&m, 0, &m, 0, AsimKind::Basic, &rel).unwrap();
    assert_eq!(v.conditions(), [Condition::Type].into());
}

#[test]
fn k_zero_only_needs_base() {
    let mut m1 = KripkeStructure::with_worlds(2);
    m1.add_edge(Rel::Diamond, 0, 1);
    let mut m2 = KripkeStructure::with_worlds(2);
    m2.add_edge(Rel::Access, 0, 1);
    m2.add_edge(Rel::Box, 0, 1);
    for v in Variant::ALL {
        let rel = SeqAsimulation {
            rel_a: [SeqPair::singleton(Direction::OneTwo, 0, 0)].into(),
            rel_b: v.uses_b().then(BTreeSet::new),
        };
        let verdict = check_k_asimulation(&m1, 0, &m2, 0, 0, AsimKind::Modal(v), &rel).unwrap();
        assert!(verdict.ok, "{v}: {:?}", verdict.violations);
        let verdict = check_k_asimulation(&m1, 0, &m2, 0, 2, AsimKind::Modal(v), &rel).unwrap();
        assert!(!verdict.ok);
    }
}

#[test]
fn k_identical_points() {
    let m = one_point(true);
    for k in 0..4 {
        let rel = SeqAsimulation {
            rel_a: [
                SeqPair::singleton(Direction::OneTwo, 0, 0),
                SeqPair::singleton(Direction::TwoOne, 0, 0),
            ]
            .into(),
            rel_b: None,
        };
        assert!(check_k_asimulation(&m, 0, &m, 0, k, AsimKind::Modal(Variant::V11), &rel).unwrap().ok);
    }
}

#[test]
fn step_guard_is_m_less_than_k() {
    // a chain of R-steps in the target, nothing in the source: (step) fails
    // at every pair with m < k, and is not checked at m = k
    let m1 = one_point(false);
    let mut m2 = KripkeStructure::with_worlds(2);
    m2.add_edge(Rel::Access, 0, 1);
    let rel = SeqAsimulation {
        rel_a: [
            SeqPair::singleton(Direction::OneTwo, 0, 0),
            SeqPair::new(Direction::OneTwo, vec![0, 0], vec![0, 0]),
        ]
        .into(),
        rel_b: None,
    };
    let v = check_k_asimulation(&m1, 0, &m2, 0, 1, AsimKind::Basic, &rel).unwrap();
    let flagged: Vec<usize> = v
        .violations
        .iter()
        .map(|x| match &x.premise {
            Some(Premise::Seq(p)) => p.m(),
            _ => panic!("unexpected premise"),
        })
        .collect();
    assert_eq!(flagged, vec![0]);
    let v = check_k_asimulation(&m1, 0, &m2, 0, 2, AsimKind::Basic, &rel).unwrap();
    assert_eq!(v.violations.len(), 2);
}

#[test]
fn maximal_examples() {
    let m = one_point(true);
    let (rel, root) = maximal_asimulation(&m, 0, &m, 0, AsimKind::Modal(Variant::V11));
    assert!(root);
    assert_eq!(rel.rel_a.len(), 2);

    let (m1, m2) = (one_point(true), one_point(false));
    let (rel, root) = maximal_asimulation(&m1, 0, &m2, 0, AsimKind::Modal(Variant::V11));
    assert!(!root);
    assert_eq!(rel.rel_a, [DirectedPair::new(Direction::TwoOne, 0, 0)].into());
    assert_eq!(rel.rel_a, brute_force_union(&m1, &m2, AsimKind::Modal(Variant::V11)).rel_a);

    let mut m1 = KripkeStructure::with_worlds(2);
    m1.add_edge(Rel::Access, 0, 1);
    m1.set_true(1, 1);
    let m2 = one_point(false);
    let kind = AsimKind::Modal(Variant::V11);
    let (rel, root) = maximal_asimulation(&m1, 0, &m2, 0, kind);
    assert!(root);
    assert_eq!(rel, brute_force_union(&m1, &m2, kind));
}

#[test]
fn maximal_equals_brute_force_union() {
    for seed in 0..60u64 {
        let n1 = 1 + (seed % 2) as usize;
        let n2 = 1 + (seed / 2 % 2) as usize;
        let m1 = random_model(n1, 0.4, 1, seed);
        let m2 = random_model(n2, 0.4, 1, seed ^ 0xabcdef);
        for kind in all_kinds() {
            if kind.uses_b() && n1 * n2 > 2 {
                continue;
            }
            let (rel, _) = maximal_asimulation(&m1, 0, &m2, 0, kind);
            assert_eq!(rel, brute_force_union(&m1, &m2, kind), "seed {seed} kind {kind}");
        }
    }
}

#[test]
fn union_of_asimulations_is_an_asimulation() {
    for seed in 0..40u64 {
        let m1 = random_model(2, 0.4, 1, seed);
        let m2 = random_model(1 + (seed % 2) as usize, 0.4, 1, seed + 7);
        let kind = AsimKind::Modal(Variant::ALL[(seed % 4) as usize]);
        if kind.uses_b() {
            continue;
        }
        let all = cross(&m1, &m2);
        let passing: Vec<_> = (0..1u64 << all.len())
            .map(|mask| Asimulation {
                rel_a: subset(&all, mask),
                rel_b: None,
            })
            .filter(|r| check_asimulation(&m1, 0, &m2, 0, kind, r).unwrap().ok_except(&[Condition::Elem]))
            .collect();
        for x in &passing {
            for y in &passing {
                let u = Asimulation {
                    rel_a: x.rel_a.union(&y.rel_a).copied().collect(),
                    rel_b: None,
                };
                assert!(check_asimulation(&m1, 0, &m2, 0, kind, &u).unwrap().ok_except(&[Condition::Elem]));
            }
        }
    }
}

#[test]
fn distinguishing_examples() {
    let (m1, m2) = (one_point(true), one_point(false));
    assert_eq!(
        distinguishing_formula(&m1, 0, &m2, 0, Variant::V11, 3),
        Some(ModalFormula::Prop(1))
    );
    let m = random_model(3, 0.5, 1, 11);
    for v in Variant::ALL {
        assert_eq!(distinguishing_formula(&m, 0, &m.clone(), 0, v, 4), None);
    }
    let m1 = one_point(false);
    let mut m2 = KripkeStructure::with_worlds(2);
    m2.add_edge(Rel::Access, 0, 1);
    for v in [Variant::V12, Variant::V22] {
        let f = distinguishing_formula(&m1, 0, &m2, 0, v, 3).unwrap();
        assert_eq!(f, ModalFormula::diamond(ModalFormula::Bottom));
        let st = translate(&f, v, &Var::from("x"));
        let at = |m: &KripkeStructure, w| eval_fol(m, &Env::from([(Var::from("x"), w)]), &st).unwrap();
        assert!(at(&m1, 0) && !at(&m2, 0));
    }
}

#[test]
fn distinguishing_agrees_with_fixpoint() {
    for seed in 0..80u64 {
        let m1 = random_model(1 + (seed % 3) as usize, 0.35, 1, seed);
        let m2 = random_model(1 + (seed / 3 % 3) as usize, 0.35, 1, seed + 99);
        for v in Variant::ALL {
            let (_, root) = maximal_asimulation(&m1, 0, &m2, 0, AsimKind::Modal(v));
            let f = distinguishing_formula(&m1, 0, &m2, 0, v, 6);
            assert_eq!(root, f.is_none(), "seed {seed} variant {v}: {f:?}");
            if let Some(f) = f {
                assert!(eval_modal(&m1, 0, &f, v).unwrap());
                assert!(!eval_modal(&m2, 0, &f, v).unwrap());
            }
        }
    }
}

#[test]
fn relation_json_round_trip() {
    let m1 = random_model(3, 0.4, 1, 1);
    let m2 = random_model(2, 0.4, 1, 2);
    let (rel, _) = maximal_asimulation(&m1, 0, &m2, 0, AsimKind::Modal(Variant::V22));
    let text = rel.to_json(&m1, &m2);
    assert!(text.contains("\"relA\"") && text.contains("\"relB\"") && text.contains("\"dir\": \"12\""));
    assert_eq!(Asimulation::from_json(&text, &m1, &m2).unwrap(), rel);

    let seq = SeqAsimulation {
        rel_a: [SeqPair::new(Direction::TwoOne, vec![1, 0], vec![2, 2])].into(),
        rel_b: None,
    };
    let text = seq.to_json(&m1, &m2);
    assert_eq!(SeqAsimulation::from_json(&text, &m1, &m2).unwrap(), seq);
    assert!(matches!(
        Asimulation::from_json(r#"{"relA":[{"dir":"12","from":"nope","to":"w0"}]}"#, &m1, &m2),
        Err(AsimError::UnknownWorld { side: 1, .. })
    ));
}
