//! Model classes cut out by first-order axioms, invariance testing of
//! correspondence formulas along maximal asimulations, and a bounded
//! search for modal formulas agreeing with a given correspondence formula.
//!
//! Everything here quantifies over a supplied finite corpus, so results are
//! evidence about the class, never proofs.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::asimulation::{maximal_asimulation, AsimKind, Direction};
use crate::kripke::{KripkeStructure, World};
use crate::semantics::{eval_fol, truth_set, Env, Variant};
use crate::syntax::{parse_fol, FolFormula, ParseError, Var};
use crate::types::FormulaPool;

#[derive(Debug, Error)]
pub enum ClassError {
    #[error("axiom `{0}` has free variables")]
    NotASentence(String),
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("formula must have at most one free variable, found {0}")]
    FreeVariables(usize),
    #[error("no model of the corpus satisfies the axioms of `{0}`")]
    NoModels(String),
    #[error("unknown axiom set `{0}`")]
    UnknownClass(String),
}

/// A class of models given by a finite list of sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelClassSpec {
    name: String,
    axioms: Vec<FolFormula>,
}

const REFLEXIVE: &str = "forall x. R(x,x)";
const TRANSITIVE: &str = "forall x. forall y. forall z. R(x,y) & R(y,z) -> R(x,z)";
const BOX_IN_DIA: &str = "forall x. forall y. Rb(x,y) -> Rd(x,y)";
const DIA_IN_BOX: &str = "forall x. forall y. Rd(x,y) -> Rb(x,y)";
/// A step along `R` followed by one along `R□` can be replaced by a step
/// along `R□` followed by one along `R`.
const COMPOSITION: &str = "forall x. forall z. (exists y. R(x,y) & Rb(y,z)) -> (exists y. Rb(x,y) & R(y,z))";

impl ModelClassSpec {
    pub fn new(name: impl Into<String>, axioms: Vec<FolFormula>) -> Result<Self, ClassError> {
        if let Some(bad) = axioms.iter().find(|a| !a.is_sentence()) {
            return Err(ClassError::NotASentence(bad.to_string()));
        }
        Ok(ModelClassSpec {
            name: name.into(),
            axioms,
        })
    }

    /// The class of all models.
    pub fn all_models() -> Self {
        ModelClassSpec {
            name: "all".into(),
            axioms: Vec::new(),
        }
    }

    /// One sentence per line; blank lines and lines starting with `#` are
    /// skipped.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self, ClassError> {
        let mut axioms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f = parse_fol(line).map_err(|source| ClassError::Parse { line: i + 1, source })?;
            axioms.push(f);
        }
        Self::new(name, axioms)
    }

    /// The shipped axiom sets: `all`, `reflexive`, `transitive`, `preorder`
    /// (both of the former), `box-eq-dia` and `composition`.
    pub fn shipped(name: &str) -> Result<Self, ClassError> {
        let lines: &[&str] = match name {
            "all" => &[],
            "reflexive" => &[REFLEXIVE],
            "transitive" => &[TRANSITIVE],
            "preorder" => &[REFLEXIVE, TRANSITIVE],
            "box-eq-dia" => &[BOX_IN_DIA, DIA_IN_BOX],
            "composition" => &[COMPOSITION],
            _ => return Err(ClassError::UnknownClass(name.to_string())),
        };
        Self::parse(name, &lines.join("\n"))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn axioms(&self) -> &[FolFormula] {
        &self.axioms
    }
}

impl fmt::Display for ModelClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axioms {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

pub fn satisfies_axioms(m: &KripkeStructure, spec: &ModelClassSpec) -> bool {
    spec.axioms
        .iter()
        .all(|a| eval_fol(m, &Env::new(), a).expect("axioms are sentences"))
}

/// The variable a formula is read in: its only free variable, or `x`.
fn point_var(phi: &FolFormula) -> Result<Var, ClassError> {
    let free = phi.free_vars();
    match free.len() {
        0 => Ok(Var::from("x")),
        1 => Ok(free.into_iter().next().expect("one element")),
        n => Err(ClassError::FreeVariables(n)),
    }
}

fn extension(m: &KripkeStructure, phi: &FolFormula, x: &Var) -> Vec<bool> {
    m.worlds()
        .map(|w| {
            let env = Env::from([(x.clone(), w)]);
            eval_fol(m, &env, phi).expect("free variable is bound")
        })
        .collect()
}

/// `φ` holds at `from` in model `source` but fails at `to` in model
/// `target`, although the maximal asimulation relates the two. Models are
/// indices into the unfiltered corpus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Counterexample {
    pub source: usize,
    pub from: World,
    pub target: usize,
    pub to: World,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "model {} world {} -> model {} world {}",
            self.source, self.from, self.target, self.to
        )
    }
}

/// Looks for pairs along which `φ` is not preserved. Every ordered pair of
/// corpus models in the class is compared, a model with itself included;
/// an empty result means no counterexample was found in this corpus.
pub fn kappa_invariance_test(
    phi: &FolFormula,
    corpus: &[KripkeStructure],
    spec: &ModelClassSpec,
    v: Variant,
) -> Result<Vec<Counterexample>, ClassError> {
    let x = point_var(phi)?;
    let members: Vec<usize> = (0..corpus.len())
        .filter(|&i| satisfies_axioms(&corpus[i], spec))
        .collect();
    if members.is_empty() {
        return Err(ClassError::NoModels(spec.name.clone()));
    }
    let ext: Vec<Vec<bool>> = corpus.iter().map(|m| extension(m, phi, &x)).collect();
    let pairs: Vec<(usize, usize)> = members
        .iter()
        .flat_map(|&i| members.iter().map(move |&j| (i, j)))
        .collect();
    let mut out: Vec<Counterexample> = pairs
        .par_iter()
        .flat_map_iter(|&(i, j)| {
            let (rel, _) = maximal_asimulation(&corpus[i], 0, &corpus[j], 0, AsimKind::Modal(v));
            let ext = &ext;
            rel.rel_a
                .into_iter()
                .filter(|p| p.dir == Direction::OneTwo)
                .filter(move |p| ext[i][p.from] && !ext[j][p.to])
                .map(move |p| Counterexample {
                    source: i,
                    from: p.from,
                    target: j,
                    to: p.to,
                })
        })
        .collect();
    out.sort();
    Ok(out)
}

/// A pool member together with the number of corpus points where it agrees
/// with the correspondence formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Companion {
    pub formula: crate::syntax::ModalFormula,
    pub agree: usize,
    pub total: usize,
}

impl Companion {
    pub fn agreement(&self) -> f64 {
        self.agree as f64 / self.total as f64
    }

    /// Agrees at every point of the corpus.
    pub fn is_exact(&self) -> bool {
        self.agree == self.total
    }
}

/// Ranks the pool by pointwise agreement with `φ` over the class members of
/// the corpus, best first; ties keep pool order.
pub fn modal_companion_search(
    phi: &FolFormula,
    corpus: &[KripkeStructure],
    spec: &ModelClassSpec,
    v: Variant,
    pool: &FormulaPool,
) -> Result<Vec<Companion>, ClassError> {
    let x = point_var(phi)?;
    let members: Vec<&KripkeStructure> = corpus.iter().filter(|m| satisfies_axioms(m, spec)).collect();
    if members.is_empty() {
        return Err(ClassError::NoModels(spec.name.clone()));
    }
    let ext: Vec<Vec<bool>> = members.iter().map(|m| extension(m, phi, &x)).collect();
    let total: usize = members.iter().map(|m| m.len()).sum();
    let mut out: Vec<Companion> = pool
        .members()
        .par_iter()
        .map(|f| {
            let agree = members
                .iter()
                .zip(&ext)
                .map(|(m, e)| {
                    let t = truth_set(m, f, v);
                    m.worlds().filter(|&w| t.contains(w) == e[w]).count()
                })
                .sum();
            Companion {
                formula: f.clone(),
                agree,
                total,
            }
        })
        .collect();
    out.sort_by(|a, b| b.agree.cmp(&a.agree));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::random_model;
    use crate::syntax::{parse_modal, Rel, Signature};
    use crate::translate::translate;
    use crate::types::enumerate_pool;

    fn point(p1: bool) -> KripkeStructure {
        let mut m = KripkeStructure::with_worlds(1);
        if p1 {
            m.set_true(1, 0);
        }
        m
    }

    fn chain() -> KripkeStructure {
        let mut m = KripkeStructure::with_worlds(2);
        m.add_edge(Rel::Access, 0, 1);
        m
    }

    #[test]
    fn axioms_filter_models() {
        let refl = ModelClassSpec::shipped("reflexive").unwrap();
        let mut looped = KripkeStructure::with_worlds(1);
        looped.add_edge(Rel::Access, 0, 0);
        assert!(satisfies_axioms(&looped, &refl));
        assert!(!satisfies_axioms(&point(false), &refl));
        assert!(satisfies_axioms(&point(false), &ModelClassSpec::all_models()));
        for name in ["all", "reflexive", "transitive", "preorder", "box-eq-dia", "composition"] {
            assert_eq!(ModelClassSpec::shipped(name).unwrap().name(), name);
        }
        assert!(ModelClassSpec::shipped("nope").is_err());
        assert!(matches!(
            ModelClassSpec::parse("bad", "R(x,x)"),
            Err(ClassError::NotASentence(_))
        ));
        assert!(matches!(
            ModelClassSpec::parse("bad", "# comment\n\nforall x. R(x)"),
            Err(ClassError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn composition_axiom() {
        let spec = ModelClassSpec::shipped("composition").unwrap();
        let mut m = KripkeStructure::with_worlds(3);
        m.add_edge(Rel::Access, 0, 1);
        m.add_edge(Rel::Box, 1, 2);
        assert!(!satisfies_axioms(&m, &spec));
        m.add_edge(Rel::Box, 0, 1);
        m.add_edge(Rel::Access, 1, 2);
        assert!(satisfies_axioms(&m, &spec));
    }

    #[test]
    fn translations_have_no_counterexamples() {
        let corpus: Vec<_> = (0..6).map(|s| random_model(1 + s % 3, 0.4, 1, s as u64)).collect();
        let all = ModelClassSpec::all_models();
        for v in Variant::ALL {
            for text in ["p1", "box p1", "dia p1 -> p1", "false"] {
                let phi = translate(&parse_modal(text).unwrap(), v, &Var::from("x"));
                assert!(kappa_invariance_test(&phi, &corpus, &all, v).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn non_translations_have_counterexamples() {
        let all = ModelClassSpec::all_models();
        let neg = parse_fol("P1(x) -> false").unwrap();
        let found = kappa_invariance_test(&neg, &[point(false), point(true)], &all, Variant::V11).unwrap();
        assert!(found.contains(&Counterexample {
            source: 0,
            from: 0,
            target: 1,
            to: 0
        }));
        let succ = parse_fol("exists y. R(x,y)").unwrap();
        for v in Variant::ALL {
            let found = kappa_invariance_test(&succ, &[chain(), point(false)], &all, v).unwrap();
            assert!(!found.is_empty(), "{v}");
        }
        assert!(matches!(
            kappa_invariance_test(&succ, &[point(false)], &ModelClassSpec::shipped("reflexive").unwrap(), Variant::V11),
            Err(ClassError::NoModels(_))
        ));
        assert!(matches!(
            kappa_invariance_test(&parse_fol("R(x,y)").unwrap(), &[point(false)], &all, Variant::V11),
            Err(ClassError::FreeVariables(2))
        ));
    }

    #[test]
    fn companions() {
        let corpus: Vec<_> = (0..5).map(|s| random_model(3, 0.4, 2, s)).collect();
        let refs: Vec<_> = corpus.iter().collect();
        let all = ModelClassSpec::all_models();
        let v = Variant::V22;
        let pool = enumerate_pool(&Signature::first(2), v, 1, &refs, usize::MAX).unwrap();

        let phi = translate(&parse_modal("p1 & p2").unwrap(), v, &Var::from("x"));
        let ranked = modal_companion_search(&phi, &corpus, &all, v, &pool).unwrap();
        assert!(ranked[0].is_exact());
        let best = &ranked[0].formula;
        for m in &corpus {
            assert_eq!(truth_set(m, best, v), truth_set(m, &parse_modal("p1 & p2").unwrap(), v));
        }

        let ranked = modal_companion_search(&FolFormula::Bottom, &corpus, &all, v, &pool).unwrap();
        assert_eq!(ranked[0].formula, crate::syntax::ModalFormula::Bottom);
        assert!(ranked[0].is_exact());

        let mixed = vec![chain(), point(false)];
        let mixed_refs: Vec<_> = mixed.iter().collect();
        let pool = enumerate_pool(&Signature::default(), v, 3, &mixed_refs, usize::MAX).unwrap();
        let succ = parse_fol("exists y. R(x,y)").unwrap();
        let ranked = modal_companion_search(&succ, &mixed, &all, v, &pool).unwrap();
        assert!(ranked.iter().all(|c| !c.is_exact()));
    }

    #[test]
    fn relativization_is_monotone() {
        let corpus: Vec<_> = (0..8).map(|s| random_model(2, 0.6, 1, s)).collect();
        let succ = parse_fol("exists y. R(x,y)").unwrap();
        let all = kappa_invariance_test(&succ, &corpus, &ModelClassSpec::all_models(), Variant::V11).unwrap();
        let refl = ModelClassSpec::shipped("reflexive").unwrap();
        if let Ok(fewer) = kappa_invariance_test(&succ, &corpus, &refl, Variant::V11) {
            assert!(fewer.iter().all(|c| all.contains(c)));
        }
    }
}
