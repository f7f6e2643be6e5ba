//! Seeded randomized property suites. Every trial draws its inputs from its
//! own seed, so a failure can be replayed from the seed alone and parallel
//! runs agree with serial ones.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::asimulation::{
    check_asimulation, check_k_asimulation, distinguishing_formula, maximal_asimulation, AsimKind, Asimulation,
    Condition, DirectedPair, Direction, Premise, Verdict,
};
use crate::classes::{kappa_invariance_test, satisfies_axioms, ClassError, Counterexample, ModelClassSpec};
use crate::genmod::{check_generated, ModalitySignature};
use crate::kripke::{random_model_with, KripkeStructure, RandomModelSpec};
use crate::semantics::{eval_fol, eval_modal, Env, Variant};
use crate::syntax::{FolFormula, ModalFormula, Rel, Signature, Var};
use crate::translate::{translate, translation_degree};
use crate::types::{canonical_k_asimulation, PoolFamily};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error("unknown suite `{0}` (known: {})", Suite::ALL.map(|s| s.name()).join(", "))]
    UnknownSuite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Modal truth equals truth of the translation.
    StAgreement,
    /// Quantifier depth of the translation equals the predicted degree.
    DegreeLaw,
    /// Translations transfer along every pair of the maximal asimulation.
    Preservation,
    /// The worklist fixpoint equals naive iterated deletion.
    Fixpoint,
    /// Root in the maximal relation iff no distinguishing formula.
    Distinguish,
    /// The canonical sequence construction passes the `k` checker.
    CanonicalK,
    /// Generated conditions agree with the hand-coded ones.
    Genmod,
    /// Preservation restricted to reflexive transitive models.
    Relativization,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::StAgreement,
        Suite::DegreeLaw,
        Suite::Preservation,
        Suite::Fixpoint,
        Suite::Distinguish,
        Suite::CanonicalK,
        Suite::Genmod,
        Suite::Relativization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::StAgreement => "st-agreement",
            Suite::DegreeLaw => "degree-law",
            Suite::Preservation => "preservation",
            Suite::Fixpoint => "fixpoint",
            Suite::Distinguish => "distinguish",
            Suite::CanonicalK => "canonical-k",
            Suite::Genmod => "genmod",
            Suite::Relativization => "relativization",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

/// Size bounds of the random inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub worlds: usize,
    /// Connective depth of random formulas.
    pub depth: usize,
    pub letters: u32,
    /// Formulas per model pair, where a suite samples several.
    pub formulas: usize,
    /// Largest `k` of the sequence suites.
    pub k: usize,
}

impl Bounds {
    pub fn default_for(suite: Suite) -> Bounds {
        let b = |worlds, depth, letters, formulas, k| Bounds {
            worlds,
            depth,
            letters,
            formulas,
            k,
        };
        match suite {
            Suite::StAgreement => b(6, 4, 2, 1, 0),
            Suite::DegreeLaw => b(1, 5, 3, 1, 0),
            Suite::Preservation => b(5, 3, 2, 50, 0),
            Suite::Fixpoint => b(3, 0, 1, 0, 0),
            Suite::Distinguish => b(4, 6, 2, 0, 0),
            Suite::CanonicalK => b(4, 0, 2, 0, 3),
            Suite::Genmod => b(3, 0, 1, 0, 0),
            Suite::Relativization => b(4, 3, 2, 20, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub bounds: Bounds,
}

impl SuiteConfig {
    pub fn new(suite: Suite, trials: usize, seed: u64) -> Self {
        SuiteConfig {
            suite,
            trials,
            seed,
            bounds: Bounds::default_for(suite),
        }
    }
}

/// One failed trial with everything needed to look at it again.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub seed: u64,
    pub detail: String,
    pub repro: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub bounds: Bounds,
    /// Trials whose inputs fell outside the suite's class and checked nothing.
    pub vacuous: usize,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Deterministic in the configuration.
    pub fn body(&self) -> String {
        let b = &self.bounds;
        let mut s = format!(
            "suite {}\nseed {}\ntrials {}\nbounds worlds={} depth={} letters={} formulas={} k={}\nvacuous {}\nfailures {}\n",
            self.suite,
            self.seed,
            self.trials,
            b.worlds,
            b.depth,
            b.letters,
            b.formulas,
            b.k,
            self.vacuous,
            self.failures.len()
        );
        for f in &self.failures {
            s += &format!("FAIL trial {} seed {}: {}\n", f.trial, f.seed, f.detail);
        }
        s
    }

    pub fn text(&self) -> String {
        format!("{}elapsed {:.3}s\n", self.body(), self.elapsed.as_secs_f64())
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v["elapsed_ms"] = json!(self.elapsed.as_millis() as u64);
        serde_json::to_string_pretty(&v).expect("reports serialize")
    }
}

/// The splitmix64 output function.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `i`: the `i`-th splitmix64 output from `master`.
pub fn trial_seed(master: u64, i: usize) -> u64 {
    mix(master.wrapping_add((i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

enum Outcome {
    Pass,
    Vacuous,
    Fail(String, Value),
}

pub fn run_suite(cfg: &SuiteConfig) -> Report {
    let start = Instant::now();
    let outcomes: Vec<(usize, u64, Outcome)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(cfg.seed, i);
            (i, seed, run_trial(cfg.suite, &cfg.bounds, seed))
        })
        .collect();
    let mut vacuous = 0;
    let mut failures = Vec::new();
    for (trial, seed, o) in outcomes {
        match o {
            Outcome::Pass => {}
            Outcome::Vacuous => vacuous += 1,
            Outcome::Fail(detail, repro) => failures.push(Failure {
                trial,
                seed,
                detail,
                repro,
            }),
        }
    }
    Report {
        suite: cfg.suite.name().to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        bounds: cfg.bounds,
        vacuous,
        failures,
        elapsed: start.elapsed(),
    }
}

/// Re-runs a single trial from its seed; `None` if it passes.
pub fn replay(suite: Suite, bounds: &Bounds, seed: u64) -> Option<(String, Value)> {
    match run_trial(suite, bounds, seed) {
        Outcome::Fail(d, r) => Some((d, r)),
        _ => None,
    }
}

/// Preservation of `φ` along every asimulation pair of the corpus, with no
/// restriction on the models.
pub fn invariance_test(
    phi: &FolFormula,
    corpus: &[KripkeStructure],
    v: Variant,
) -> Result<Vec<Counterexample>, ClassError> {
    kappa_invariance_test(phi, corpus, &ModelClassSpec::all_models(), v)
}

/// A random modal formula of connective depth at most `depth` over letters
/// `1..=letters`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, depth: usize, letters: u32) -> ModalFormula {
    if depth == 0 || rng.gen_bool(0.2) {
        return if letters == 0 || rng.gen_bool(0.15) {
            ModalFormula::Bottom
        } else {
            ModalFormula::Prop(rng.gen_range(1..=letters))
        };
    }
    let sub = |rng: &mut R| random_formula(rng, depth - 1, letters);
    match rng.gen_range(0..5) {
        0 => ModalFormula::and(sub(rng), sub(rng)),
        1 => ModalFormula::or(sub(rng), sub(rng)),
        2 => ModalFormula::implies(sub(rng), sub(rng)),
        3 => ModalFormula::boxed(sub(rng)),
        _ => ModalFormula::diamond(sub(rng)),
    }
}

fn random_structure(rng: &mut ChaCha8Rng, max_worlds: usize, letters: u32) -> KripkeStructure {
    let spec = RandomModelSpec {
        worlds: rng.gen_range(1..=max_worlds.max(1)),
        density: [rng.gen_range(0.1..0.6), rng.gen_range(0.1..0.6), rng.gen_range(0.1..0.6)],
        valuation_density: rng.gen_range(0.2..0.7),
        letters,
    };
    random_model_with(&spec, rng)
}

fn random_variant(rng: &mut ChaCha8Rng) -> Variant {
    Variant::ALL[rng.gen_range(0..4)]
}

fn model_json(m: &KripkeStructure) -> Value {
    serde_json::to_value(m.to_document()).expect("model documents serialize")
}

fn run_trial(suite: Suite, b: &Bounds, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    let result = match suite {
        Suite::StAgreement => st_agreement(rng, b),
        Suite::DegreeLaw => degree_law(rng, b),
        Suite::Preservation => {
            let m1 = random_structure(rng, b.worlds, b.letters);
            let m2 = random_structure(rng, b.worlds, b.letters);
            preservation(rng, b, &m1, &m2)
        }
        Suite::Fixpoint => fixpoint(rng, b),
        Suite::Distinguish => distinguish(rng, b),
        Suite::CanonicalK => canonical_k(rng, b),
        Suite::Genmod => genmod(rng, b),
        Suite::Relativization => return relativization(rng, b),
    };
    match result {
        Ok(()) => Outcome::Pass,
        Err((d, r)) => Outcome::Fail(d, r),
    }
}

type TrialResult = Result<(), (String, Value)>;

fn fol_extension(m: &KripkeStructure, phi: &FolFormula, x: &Var) -> Vec<bool> {
    m.worlds()
        .map(|w| {
            let env = Env::from([(x.clone(), w)]);
            eval_fol(m, &env, phi).expect("translations have only the point variable free")
        })
        .collect()
}

fn st_agreement(rng: &mut ChaCha8Rng, b: &Bounds) -> TrialResult {
    let m = random_structure(rng, b.worlds, b.letters);
    let f = random_formula(rng, b.depth, b.letters);
    let x = Var::from("x");
    for v in Variant::ALL {
        let fol = fol_extension(&m, &translate(&f, v, &x), &x);
        for w in m.worlds() {
            let modal = eval_modal(&m, w, &f, v).expect("world in range");
            if modal != fol[w] {
                return Err((
                    format!("variant {v} world {}: modal {modal}, translation {}", m.name(w), fol[w]),
                    json!({"model": model_json(&m), "formula": f.to_string(), "variant": v.to_string()}),
                ));
            }
        }
    }
    Ok(())
}

fn degree_law(rng: &mut ChaCha8Rng, b: &Bounds) -> TrialResult {
    let f = random_formula(rng, b.depth, b.letters);
    let x = Var::from("x");
    for v in Variant::ALL {
        let got = translate(&f, v, &x).degree();
        let want = translation_degree(&f, v);
        if got != want {
            return Err((
                format!("variant {v}: degree {got}, predicted {want}"),
                json!({"formula": f.to_string(), "variant": v.to_string()}),
            ));
        }
    }
    Ok(())
}

/// Every sampled translation true at the source of a maximal-relation pair
/// is true at its target.
fn preservation(rng: &mut ChaCha8Rng, b: &Bounds, m1: &KripkeStructure, m2: &KripkeStructure) -> TrialResult {
    let x = Var::from("x");
    let formulas: Vec<ModalFormula> = (0..b.formulas).map(|_| random_formula(rng, b.depth, b.letters)).collect();
    for v in Variant::ALL {
        let (rel, _) = maximal_asimulation(m1, 0, m2, 0, AsimKind::Modal(v));
        for f in &formulas {
            let phi = translate(f, v, &x);
            let ext = [fol_extension(m1, &phi, &x), fol_extension(m2, &phi, &x)];
            for p in &rel.rel_a {
                let (s, t) = match p.dir {
                    Direction::OneTwo => (0, 1),
                    Direction::TwoOne => (1, 0),
                };
                if ext[s][p.from] && !ext[t][p.to] {
                    return Err((
                        format!("variant {v}: {f} not preserved along {} {} -> {}", p.dir, p.from, p.to),
                        json!({
                            "m1": model_json(m1), "m2": model_json(m2),
                            "formula": f.to_string(), "variant": v.to_string(),
                            "pair": [p.dir.to_string(), p.from, p.to],
                        }),
                    ));
                }
            }
        }
    }
    Ok(())
}

fn random_kind(rng: &mut ChaCha8Rng) -> AsimKind {
    match rng.gen_range(0..5) {
        4 => AsimKind::Basic,
        i => AsimKind::Modal(Variant::ALL[i]),
    }
}

/// Greatest fixpoint by repeated whole-relation checks: delete every pair
/// that is the premise of a violation until none is left.
fn naive_fixpoint(m1: &KripkeStructure, m2: &KripkeStructure, kind: AsimKind) -> Asimulation {
    let mut all = BTreeSet::new();
    for dir in Direction::BOTH {
        let (s, t) = dir.models(m1, m2);
        for a in s.worlds() {
            for b in t.worlds() {
                all.insert(DirectedPair::new(dir, a, b));
            }
        }
    }
    let mut rel = Asimulation {
        rel_a: all.clone(),
        rel_b: kind.uses_b().then_some(all),
    };
    loop {
        let verdict = check_asimulation(m1, 0, m2, 0, kind, &rel).expect("well-formed input");
        let mut changed = false;
        for viol in verdict.violations {
            let Some(Premise::Pair(p)) = viol.premise else { continue };
            let set = if viol.condition == Condition::Diam2Second {
                rel.rel_b.as_mut().expect("B kinds carry B")
            } else {
                &mut rel.rel_a
            };
            changed |= set.remove(&p);
        }
        if !changed {
            return rel;
        }
    }
}

fn fixpoint(rng: &mut ChaCha8Rng, b: &Bounds) -> TrialResult {
    let m1 = random_structure(rng, b.worlds, b.letters);
    let m2 = random_structure(rng, b.worlds, b.letters);
    let kind = random_kind(rng);
    let (fast, _) = maximal_asimulation(&m1, 0, &m2, 0, kind);
    let slow = naive_fixpoint(&m1, &m2, kind);
    if fast != slow {
        return Err((
            format!("kind {kind}: worklist and naive fixpoints differ"),
            json!({
                "m1": model_json(&m1), "m2": model_json(&m2), "kind": kind.to_string(),
                "worklist": fast.to_json(&m1, &m2), "naive": slow.to_json(&m1, &m2),
            }),
        ));
    }
    Ok(())
}

/// The short search bound used when the roots are related.
const RELATED_DEPTH: usize = 3;

fn distinguish(rng: &mut ChaCha8Rng, b: &Bounds) -> TrialResult {
    let m1 = random_structure(rng, b.worlds, b.letters);
    let m2 = random_structure(rng, b.worlds, b.letters);
    let v = random_variant(rng);
    let (_, root) = maximal_asimulation(&m1, 0, &m2, 0, AsimKind::Modal(v));
    let repro = || json!({"m1": model_json(&m1), "m2": model_json(&m2), "variant": v.to_string()});
    if root {
        if let Some(f) = distinguishing_formula(&m1, 0, &m2, 0, v, RELATED_DEPTH.min(b.depth)) {
            return Err((format!("variant {v}: related roots but {f} distinguishes them"), repro()));
        }
        return Ok(());
    }
    match distinguishing_formula(&m1, 0, &m2, 0, v, b.depth) {
        None => Err((
            format!("variant {v}: unrelated roots but no formula up to depth {}", b.depth),
            repro(),
        )),
        Some(f) => {
            let at_t = eval_modal(&m1, 0, &f, v).expect("root in range");
            let at_u = eval_modal(&m2, 0, &f, v).expect("root in range");
            if at_t && !at_u {
                Ok(())
            } else {
                Err((format!("variant {v}: witness {f} does not separate the roots"), repro()))
            }
        }
    }
}

fn canonical_k(rng: &mut ChaCha8Rng, b: &Bounds) -> TrialResult {
    let letters = rng.gen_range(1..=b.letters.max(1));
    let m1 = random_structure(rng, b.worlds, letters);
    let m2 = random_structure(rng, b.worlds, letters);
    let k = rng.gen_range(0..=b.k);
    let v = random_variant(rng);
    let repro = || {
        json!({"m1": model_json(&m1), "m2": model_json(&m2), "variant": v.to_string(), "k": k})
    };
    let pools = PoolFamily::enumerate(&Signature::first(letters), v, k + 2, &[&m1, &m2], usize::MAX)
        .map_err(|e| (format!("pool enumeration failed: {e}"), repro()))?;
    let rel = canonical_k_asimulation(&m1, 0, &m2, 0, k, v, &pools)
        .map_err(|e| (format!("construction failed: {e}"), repro()))?;
    let verdict = check_k_asimulation(&m1, 0, &m2, 0, k, AsimKind::Modal(v), &rel).expect("well-formed input");
    if verdict.ok_except(&[Condition::Elem]) {
        Ok(())
    } else {
        let first = verdict
            .violations
            .iter()
            .find(|x| x.condition != Condition::Elem)
            .expect("a non-elem violation exists");
        Err((
            format!("variant {v} k={k}: {}", first.describe(&m1, &m2)),
            repro(),
        ))
    }
}

/// The hand-coded counterpart of a built-in signature: the kind to check
/// with, the conditions that belong to the modality, and the schema index
/// each of them corresponds to.
pub struct BuiltinModality {
    pub name: &'static str,
    pub signature: ModalitySignature,
    pub kind: AsimKind,
    pub schemas: &'static [(Condition, usize)],
}

pub fn builtin_modalities() -> [BuiltinModality; 4] {
    [
        BuiltinModality {
            name: "box-1",
            signature: ModalitySignature::box1(),
            kind: AsimKind::Modal(Variant::V11),
            schemas: &[(Condition::Box1, 1)],
        },
        BuiltinModality {
            name: "box-2",
            signature: ModalitySignature::box2(),
            kind: AsimKind::Modal(Variant::V21),
            schemas: &[(Condition::Box2, 1)],
        },
        BuiltinModality {
            name: "diamond-1",
            signature: ModalitySignature::diamond1(),
            kind: AsimKind::Modal(Variant::V11),
            schemas: &[(Condition::Diam1, 1)],
        },
        BuiltinModality {
            name: "diamond-2",
            signature: ModalitySignature::diamond2(),
            kind: AsimKind::Modal(Variant::V12),
            schemas: &[(Condition::Diam2First, 2), (Condition::Diam2Second, 1)],
        },
    ]
}

/// Violations keyed so that both checkers can be compared: hand-coded
/// modality conditions are renamed to their schema index and conditions
/// of the other modality are dropped.
pub type ViolationKey = (Condition, Option<(Direction, usize, usize)>, Vec<usize>, Option<u32>);

impl BuiltinModality {
    pub fn hand_keys(&self, v: &Verdict) -> BTreeSet<ViolationKey> {
        let basic = [Condition::Type, Condition::BType, Condition::Elem, Condition::Base, Condition::Step];
        v.violations
            .iter()
            .filter_map(|x| {
                let cond = if basic.contains(&x.condition) {
                    x.condition
                } else {
                    let &(_, i) = self.schemas.iter().find(|(c, _)| *c == x.condition)?;
                    Condition::Schema(i)
                };
                Some(key(cond, x))
            })
            .collect()
    }

    pub fn generated_keys(v: &Verdict) -> BTreeSet<ViolationKey> {
        v.violations.iter().map(|x| key(x.condition, x)).collect()
    }

    /// Splits a hand-coded relation into the tuple the generated checker reads.
    pub fn tuple(&self, rel: &Asimulation) -> Vec<BTreeSet<DirectedPair>> {
        let mut out = vec![rel.rel_a.clone()];
        if self.signature.k_mu() == 2 {
            out.push(rel.rel_b.clone().unwrap_or_default());
        }
        out
    }
}

fn key(cond: Condition, x: &crate::asimulation::Violation) -> ViolationKey {
    let premise = match &x.premise {
        Some(Premise::Pair(p)) => Some((p.dir, p.from, p.to)),
        _ => None,
    };
    (cond, premise, x.trigger.clone(), x.letter)
}

/// A relation near the maximal one: maximal pairs with a few toggled.
pub fn perturbed_relation<R: Rng + ?Sized>(
    rng: &mut R,
    m1: &KripkeStructure,
    m2: &KripkeStructure,
    kind: AsimKind,
) -> Asimulation {
    let (mut rel, _) = maximal_asimulation(m1, 0, m2, 0, kind);
    let toggle = |set: &mut BTreeSet<DirectedPair>, rng: &mut R| {
        let dir = Direction::BOTH[rng.gen_range(0..2)];
        let (s, t) = dir.models(m1, m2);
        let p = DirectedPair::new(dir, rng.gen_range(0..s.len()), rng.gen_range(0..t.len()));
        if !set.remove(&p) {
            set.insert(p);
        }
    };
    for _ in 0..rng.gen_range(0..=3) {
        toggle(&mut rel.rel_a, rng);
    }
    if let Some(b) = rel.rel_b.as_mut() {
        for _ in 0..rng.gen_range(0..=3) {
            toggle(b, rng);
        }
    }
    rel
}

fn genmod(rng: &mut ChaCha8Rng, b: &Bounds) -> TrialResult {
    let m1 = random_structure(rng, b.worlds, b.letters);
    let m2 = random_structure(rng, b.worlds, b.letters);
    let builtin = &builtin_modalities()[rng.gen_range(0..4)];
    let rel = perturbed_relation(rng, &m1, &m2, builtin.kind);
    let hand = check_asimulation(&m1, 0, &m2, 0, builtin.kind, &rel).expect("well-formed input");
    let gen = check_generated(&m1, 0, &m2, 0, &builtin.signature, &builtin.tuple(&rel)).expect("well-formed input");
    let (h, g) = (builtin.hand_keys(&hand), BuiltinModality::generated_keys(&gen));
    if h != g {
        return Err((
            format!(
                "{}: hand-coded and generated verdicts differ ({} vs {} violations)",
                builtin.name,
                h.len(),
                g.len()
            ),
            json!({
                "m1": model_json(&m1), "m2": model_json(&m2), "signature": builtin.signature.to_string(),
                "relation": rel.to_json(&m1, &m2),
            }),
        ));
    }
    Ok(())
}

/// Reflexive transitive closure of `R`.
fn close_preorder(m: &mut KripkeStructure) {
    let n = m.len();
    let mut reach = vec![vec![false; n]; n];
    for (a, row) in reach.iter_mut().enumerate() {
        row[a] = true;
    }
    for (a, b) in m.edges(Rel::Access).collect::<Vec<_>>() {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    for (i, row) in reach.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            if r && !m.has_edge(Rel::Access, i, j) {
                m.add_edge(Rel::Access, i, j);
            }
        }
    }
}

fn relativization(rng: &mut ChaCha8Rng, b: &Bounds) -> Outcome {
    let spec = ModelClassSpec::shipped("preorder").expect("shipped class");
    let mut models = [
        random_structure(rng, b.worlds, b.letters),
        random_structure(rng, b.worlds, b.letters),
    ];
    for m in &mut models {
        if rng.gen_bool(0.75) {
            close_preorder(m);
        }
    }
    if !models.iter().all(|m| satisfies_axioms(m, &spec)) {
        return Outcome::Vacuous;
    }
    let [m1, m2] = &models;
    if let Err((d, r)) = preservation(rng, b, m1, m2) {
        return Outcome::Fail(d, r);
    }
    let x = Var::from("x");
    let corpus = [m1.clone(), m2.clone()];
    for v in Variant::ALL {
        let f = random_formula(rng, b.depth, b.letters);
        let found = kappa_invariance_test(&translate(&f, v, &x), &corpus, &spec, v).expect("translations are valid");
        if let Some(c) = found.first() {
            return Outcome::Fail(
                format!("variant {v}: translation of {f} not invariant, {c}"),
                json!({"m1": model_json(m1), "m2": model_json(m2), "formula": f.to_string(), "variant": v.to_string()}),
            );
        }
    }
    Outcome::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_fol;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("nope".parse::<Suite>(), Err(HarnessError::UnknownSuite("nope".into())));
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let seeds: BTreeSet<u64> = (0..1000).map(|i| trial_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(trial_seed(7, 3), trial_seed(7, 3));
        assert_ne!(trial_seed(7, 0), trial_seed(8, 0));
    }

    #[test]
    fn every_suite_passes_a_short_run() {
        for s in Suite::ALL {
            let r = run_suite(&SuiteConfig::new(s, 40, 11));
            assert!(r.passed(), "{}", r.body());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        for s in [Suite::StAgreement, Suite::Genmod, Suite::Relativization] {
            let cfg = SuiteConfig::new(s, 60, 99);
            assert_eq!(run_suite(&cfg).body(), run_suite(&cfg).body());
        }
    }

    #[test]
    fn replay_matches_the_trial() {
        let b = Bounds::default_for(Suite::Fixpoint);
        for i in 0..20 {
            let seed = trial_seed(3, i);
            assert_eq!(replay(Suite::Fixpoint, &b, seed), replay(Suite::Fixpoint, &b, seed));
        }
        // an impossible bound makes the distinguishing search fail and the
        // failure must come back identically
        let tight = Bounds {
            depth: 0,
            ..Bounds::default_for(Suite::Distinguish)
        };
        let cfg = SuiteConfig {
            bounds: tight,
            ..SuiteConfig::new(Suite::Distinguish, 200, 5)
        };
        let r = run_suite(&cfg);
        assert!(!r.passed());
        for f in &r.failures {
            let (detail, repro) = replay(Suite::Distinguish, &tight, f.seed).unwrap();
            assert_eq!((detail, repro), (f.detail.clone(), f.repro.clone()));
        }
        assert!(r.body().contains("FAIL trial"));
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["failures"].as_array().unwrap().len(), r.failures.len());
    }

    #[test]
    fn invariance_examples() {
        let x = Var::from("x");
        let mut chain = KripkeStructure::with_worlds(2);
        chain.add_edge(Rel::Access, 0, 1);
        let isolated = KripkeStructure::with_worlds(1);
        let mut lit = KripkeStructure::with_worlds(1);
        lit.set_true(1, 0);
        let dark = KripkeStructure::with_worlds(1);

        let boxed = translate(&ModalFormula::boxed(ModalFormula::Prop(1)), Variant::V11, &x);
        assert!(invariance_test(&boxed, &[chain.clone(), isolated.clone(), lit.clone()], Variant::V11)
            .unwrap()
            .is_empty());
        let neg = parse_fol("P1(x) -> false").unwrap();
        assert!(!invariance_test(&neg, &[lit, dark], Variant::V11).unwrap().is_empty());
        let has_succ = parse_fol("exists y. R(x,y)").unwrap();
        assert!(!invariance_test(&has_succ, &[chain, isolated], Variant::V11).unwrap().is_empty());
    }

    #[test]
    fn closure_gives_preorders() {
        let spec = ModelClassSpec::shipped("preorder").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let mut m = random_structure(&mut rng, 5, 1);
            close_preorder(&mut m);
            assert!(satisfies_axioms(&m, &spec));
        }
    }
}
