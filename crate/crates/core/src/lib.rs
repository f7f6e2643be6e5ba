//! Asimulations, standard translations and type-theoretic tooling for
//! intuitionistic modal logics with separate box and diamond accessibility.

pub mod asimulation;
pub mod classes;
pub mod genmod;
pub mod harness;
pub mod kripke;
pub mod semantics;
pub mod syntax;
pub mod translate;
pub mod types;

pub use asimulation::{
    check_asimulation, check_k_asimulation, distinguishing_formula, maximal_asimulation, AsimKind,
    Asimulation, Condition, DirectedPair, Direction, SeqAsimulation, SeqPair, Verdict, Violation,
};
pub use kripke::{load_model, random_model, KripkeStructure, ModelError, PointedModel, World};
pub use semantics::{eval_fol, eval_modal, Clause, Env, EvalError, Variant};
pub use syntax::{parse_fol, parse_modal, FolFormula, ModalFormula, ParseError, Rel, Signature, Var};
pub use translate::{translate, translation_degree};
pub use types::{
    canonical_asimulation, canonical_k_asimulation, complete_conjunction, enumerate_pool, type_set, FormulaPool,
    PoolFamily, TypeKind, TypeSet,
};
pub use classes::{kappa_invariance_test, modal_companion_search, satisfies_axioms, Counterexample, ModelClassSpec};
pub use genmod::{
    check_generated, gen_conditions, gen_st, ConditionSchema, GenError, ModalitySignature, Quantifier, SchemaForm,
};
pub use harness::{invariance_test, replay, run_suite, Bounds, Failure, HarnessError, Report, Suite, SuiteConfig};
