//! The four standard translations into the correspondence language.

use crate::semantics::{Clause, Variant};
use crate::syntax::{FolFormula, ModalFormula, Rel, Var};

/// Deterministic source of bound variable names `y0, y1, ...`, skipping
/// the reserved free variable.
#[derive(Debug, Clone)]
pub(crate) struct Fresh {
    next: usize,
    reserved: Var,
}

impl Fresh {
    pub(crate) fn new(reserved: &Var) -> Self {
        Fresh {
            next: 0,
            reserved: reserved.clone(),
        }
    }

    pub(crate) fn var(&mut self) -> Var {
        loop {
            let v = Var(format!("y{}", self.next));
            self.next += 1;
            if v != self.reserved {
                return v;
            }
        }
    }
}

/// `ST_ij(f, x)`. Bound variables are `y0, y1, ...` in pre-order, so the
/// output is reproducible byte for byte; the only free variable is `x`
/// (or none, when `f` is variable-free such as `⊥`).
pub fn translate(f: &ModalFormula, v: Variant, x: &Var) -> FolFormula {
    translate_with(f, v, x, &mut Fresh::new(x))
}

pub(crate) fn translate_with(f: &ModalFormula, v: Variant, x: &Var, fresh: &mut Fresh) -> FolFormula {
    match f {
        ModalFormula::Bottom => FolFormula::Bottom,
        ModalFormula::Prop(n) => FolFormula::Pred(*n, x.clone()),
        ModalFormula::And(l, r) => {
            let l = translate_with(l, v, x, fresh);
            FolFormula::and(l, translate_with(r, v, x, fresh))
        }
        ModalFormula::Or(l, r) => {
            let l = translate_with(l, v, x, fresh);
            FolFormula::or(l, translate_with(r, v, x, fresh))
        }
        ModalFormula::Implies(l, r) => {
            let y = fresh.var();
            let l = translate_with(l, v, &y, fresh);
            let r = translate_with(r, v, &y, fresh);
            FolFormula::forall(
                y.clone(),
                FolFormula::implies(
                    FolFormula::Rel(Rel::Access, x.clone(), y),
                    FolFormula::implies(l, r),
                ),
            )
        }
        ModalFormula::Box(c) => match v.box_clause {
            Clause::One => {
                let y = fresh.var();
                let body = translate_with(c, v, &y, fresh);
                guarded_forall(Rel::Box, x, y, body)
            }
            Clause::Two => {
                let y = fresh.var();
                let z = fresh.var();
                let body = translate_with(c, v, &z, fresh);
                let inner = guarded_forall(Rel::Box, &y, z, body);
                guarded_forall(Rel::Access, x, y, inner)
            }
        },
        ModalFormula::Diamond(c) => match v.diamond_clause {
            Clause::One => {
                let y = fresh.var();
                let body = translate_with(c, v, &y, fresh);
                guarded_exists(Rel::Diamond, x, y, body)
            }
            Clause::Two => {
                let y = fresh.var();
                let z = fresh.var();
                let body = translate_with(c, v, &z, fresh);
                let inner = guarded_exists(Rel::Diamond, &y, z, body);
                guarded_forall(Rel::Access, x, y, inner)
            }
        },
    }
}

/// `∀y(rel(x,y) → body)`.
pub(crate) fn guarded_forall(rel: Rel, x: &Var, y: Var, body: FolFormula) -> FolFormula {
    FolFormula::forall(
        y.clone(),
        FolFormula::implies(FolFormula::Rel(rel, x.clone(), y), body),
    )
}

/// `∃y(rel(x,y) ∧ body)`.
pub(crate) fn guarded_exists(rel: Rel, x: &Var, y: Var, body: FolFormula) -> FolFormula {
    FolFormula::exists(
        y.clone(),
        FolFormula::and(FolFormula::Rel(rel, x.clone(), y), body),
    )
}

/// Quantifier rank of `translate(f, v, x)`, computed without building it.
pub fn translation_degree(f: &ModalFormula, v: Variant) -> usize {
    let step = |c: Clause| match c {
        Clause::One => 1,
        Clause::Two => 2,
    };
    match f {
        ModalFormula::Bottom | ModalFormula::Prop(_) => 0,
        ModalFormula::And(l, r) | ModalFormula::Or(l, r) => {
            translation_degree(l, v).max(translation_degree(r, v))
        }
        ModalFormula::Implies(l, r) => 1 + translation_degree(l, v).max(translation_degree(r, v)),
        ModalFormula::Box(c) => step(v.box_clause) + translation_degree(c, v),
        ModalFormula::Diamond(c) => step(v.diamond_clause) + translation_degree(c, v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::random_model;
    use crate::semantics::{eval_fol, eval_modal, Env};
    use crate::syntax::{parse_fol, parse_modal, Signature};
    use proptest::prelude::*;

    fn x() -> Var {
        Var::from("x")
    }

    fn assert_alpha(got: &FolFormula, want: &str) {
        let want = parse_fol(want).unwrap();
        assert!(got.alpha_eq(&want), "{got} is not alpha-equivalent to {want}");
    }

    #[test]
    fn clauses() {
        let bp1 = parse_modal("box p1").unwrap();
        assert_alpha(
            &translate(&bp1, Variant::V22, &x()),
            "forall y. (R(x,y) -> forall z. (Rb(y,z) -> P1(z)))",
        );
        assert_alpha(
            &translate(&bp1, Variant::V12, &x()),
            "forall y. (Rb(x,y) -> P1(y))",
        );
        assert_alpha(
            &translate(&parse_modal("dia p1").unwrap(), Variant::V21, &x()),
            "exists y. (Rd(x,y) & P1(y))",
        );
        assert_alpha(
            &translate(&parse_modal("dia p1").unwrap(), Variant::V12, &x()),
            "forall y. (R(x,y) -> exists z. (Rd(y,z) & P1(z)))",
        );
        for v in Variant::ALL {
            assert_alpha(
                &translate(&parse_modal("p1 -> p2").unwrap(), v, &x()),
                "forall y. (R(x,y) -> (P1(y) -> P2(y)))",
            );
            assert_eq!(translate(&ModalFormula::Bottom, v, &x()), FolFormula::Bottom);
        }
    }

    #[test]
    fn bound_names_are_a_counter() {
        let f = translate(&parse_modal("box p1").unwrap(), Variant::V22, &x());
        assert_eq!(f.to_string(), "forall y0. R(x,y0) -> forall y1. Rb(y0,y1) -> P1(y1)");
        // the reserved free variable is never reused
        let g = translate(&parse_modal("p1 -> p1").unwrap(), Variant::V11, &Var::from("y0"));
        assert_eq!(g.to_string(), "forall y1. R(y0,y1) -> P1(y1) -> P1(y1)");
    }

    #[test]
    fn degree_examples() {
        assert_eq!(translation_degree(&parse_modal("box p1").unwrap(), Variant::V22), 2);
        assert_eq!(translation_degree(&parse_modal("p1 -> p2").unwrap(), Variant::V11), 1);
        let f = parse_modal("dia box p1").unwrap();
        assert_eq!(translation_degree(&f, Variant::V11), 2);
        assert_eq!(translate(&f, Variant::V11, &x()).degree(), 2);
    }

    fn arb_modal() -> impl Strategy<Value = ModalFormula> {
        let leaf = prop_oneof![
            Just(ModalFormula::Bottom),
            (1u32..3).prop_map(ModalFormula::Prop),
        ];
        leaf.prop_recursive(6, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| ModalFormula::and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| ModalFormula::or(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| ModalFormula::implies(l, r)),
                inner.clone().prop_map(ModalFormula::boxed),
                inner.prop_map(ModalFormula::diamond),
            ]
        })
    }

    fn arb_variant() -> impl Strategy<Value = Variant> {
        (0usize..4).prop_map(|i| Variant::ALL[i])
    }

    proptest! {
        #[test]
        fn degree_law(f in arb_modal(), v in arb_variant()) {
            prop_assert_eq!(translate(&f, v, &x()).degree(), translation_degree(&f, v));
        }

        #[test]
        fn only_x_is_free(f in arb_modal(), v in arb_variant()) {
            let free = translate(&f, v, &x()).free_vars();
            prop_assert!(free.iter().all(|fv| *fv == x()));
        }

        #[test]
        fn vocabulary_matches(f in arb_modal(), v in arb_variant()) {
            let t = translate(&f, v, &x());
            prop_assert_eq!(Signature::of_fol(&t), Signature::of_modal(&f));
        }

        #[test]
        fn agrees_with_direct_semantics(
            f in arb_modal(),
            v in arb_variant(),
            n in 1usize..5,
            d in 0.1f64..0.7,
            seed: u64,
        ) {
            let m = random_model(n, d, 2, seed);
            let t = translate(&f, v, &x());
            for w in m.worlds() {
                let mut env = Env::new();
                env.insert(x(), w);
                prop_assert_eq!(eval_fol(&m, &env, &t).unwrap(), eval_modal(&m, w, &f, v).unwrap());
            }
        }
    }
}
