//! Finite models of the correspondence vocabulary.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Rel;

/// Index of a world inside its structure.
pub type World = usize;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error("model has no worlds")]
    NoWorlds,
    #[error("duplicate world identifier `{0}`")]
    DuplicateWorld(String),
    #[error("{context} refers to undeclared world `{world}`")]
    Dangling { world: String, context: String },
    #[error("valuation key `{0}` is not a proposition letter (expected p1, p2, ...)")]
    BadLetter(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
}

/// A finite structure `⟨U, ι⟩`: worlds, the relations `R`, `R□`, `R◇`
/// and the extensions of the unary predicates.
///
/// No frame conditions are imposed. Relations are stored both as sorted
/// successor lists and as adjacency bitsets.
#[derive(Debug, Clone)]
pub struct KripkeStructure {
    names: Vec<String>,
    index: HashMap<String, World>,
    succ: [Vec<Vec<World>>; 3],
    pred: [Vec<Vec<World>>; 3],
    adj: [Vec<FixedBitSet>; 3],
    valuation: BTreeMap<u32, FixedBitSet>,
}

impl PartialEq for KripkeStructure {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.succ == other.succ && self.valuation == other.valuation
    }
}

impl Eq for KripkeStructure {}

impl KripkeStructure {
    /// A structure with the given world names and no edges or atoms.
    pub fn new(names: Vec<String>) -> Result<Self, ModelError> {
        if names.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(ModelError::DuplicateWorld(n.clone()));
            }
        }
        let n = names.len();
        let empty_lists = || vec![Vec::new(); n];
        let empty_rows = || vec![FixedBitSet::with_capacity(n); n];
        Ok(KripkeStructure {
            names,
            index,
            succ: [empty_lists(), empty_lists(), empty_lists()],
            pred: [empty_lists(), empty_lists(), empty_lists()],
            adj: [empty_rows(), empty_rows(), empty_rows()],
            valuation: BTreeMap::new(),
        })
    }

    /// `n` worlds named `w0 .. w{n-1}`.
    pub fn with_worlds(n: usize) -> Self {
        assert!(n >= 1, "a model needs at least one world");
        Self::new((0..n).map(|i| format!("w{i}")).collect()).expect("generated names are distinct")
    }

    pub fn add_edge(&mut self, rel: Rel, a: World, b: World) {
        let r = rel.index();
        assert!(a < self.len() && b < self.len(), "edge endpoint out of range");
        if self.adj[r][a].put(b) {
            return;
        }
        let pos = self.succ[r][a].binary_search(&b).unwrap_err();
        self.succ[r][a].insert(pos, b);
        let pos = self.pred[r][b].binary_search(&a).unwrap_err();
        self.pred[r][b].insert(pos, a);
    }

    /// Makes `p_letter` true at `w`.
    pub fn set_true(&mut self, letter: u32, w: World) {
        assert!(letter >= 1, "proposition letters are indexed from 1");
        assert!(w < self.len(), "world out of range");
        let n = self.len();
        self.valuation
            .entry(letter)
            .or_insert_with(|| FixedBitSet::with_capacity(n))
            .insert(w);
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn worlds(&self) -> std::ops::Range<World> {
        0..self.names.len()
    }

    pub fn name(&self, w: World) -> &str {
        &self.names[w]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn world(&self, name: &str) -> Option<World> {
        self.index.get(name).copied()
    }

    pub fn world_or_err(&self, name: &str) -> Result<World, ModelError> {
        self.world(name)
            .ok_or_else(|| ModelError::UnknownWorld(name.to_owned()))
    }

    pub fn successors(&self, rel: Rel, w: World) -> &[World] {
        &self.succ[rel.index()][w]
    }

    pub fn predecessors(&self, rel: Rel, w: World) -> &[World] {
        &self.pred[rel.index()][w]
    }

    pub fn successor_set(&self, rel: Rel, w: World) -> &FixedBitSet {
        &self.adj[rel.index()][w]
    }

    pub fn has_edge(&self, rel: Rel, a: World, b: World) -> bool {
        self.adj[rel.index()][a].contains(b)
    }

    pub fn edges(&self, rel: Rel) -> impl Iterator<Item = (World, World)> + '_ {
        self.succ[rel.index()]
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    pub fn edge_count(&self, rel: Rel) -> usize {
        self.succ[rel.index()].iter().map(Vec::len).sum()
    }

    pub fn holds(&self, letter: u32, w: World) -> bool {
        self.valuation.get(&letter).is_some_and(|s| s.contains(w))
    }

    /// Worlds where `p_letter` is true, or `None` if the letter is true nowhere.
    pub fn extension(&self, letter: u32) -> Option<&FixedBitSet> {
        self.valuation.get(&letter)
    }

    /// Letters true at one or more worlds.
    pub fn letters(&self) -> impl Iterator<Item = u32> + '_ {
        self.valuation
            .iter()
            .filter(|(_, s)| s.count_ones(..) > 0)
            .map(|(&l, _)| l)
    }

    /// Places the given structures side by side. World `w` of `models[i]`
    /// becomes `offsets[i] + w`; names are prefixed with `m{i}:`.
    pub fn disjoint_union(models: &[&KripkeStructure]) -> (KripkeStructure, Vec<usize>) {
        let mut names = Vec::new();
        let mut offsets = Vec::with_capacity(models.len());
        for (i, m) in models.iter().enumerate() {
            offsets.push(names.len());
            names.extend(m.names.iter().map(|n| format!("m{i}:{n}")));
        }
        let mut out = KripkeStructure::new(names).expect("union of non-empty models");
        for (m, &off) in models.iter().zip(&offsets) {
            for rel in Rel::ALL {
                for (a, b) in m.edges(rel) {
                    out.add_edge(rel, off + a, off + b);
                }
            }
            for (&l, set) in &m.valuation {
                for w in set.ones() {
                    out.set_true(l, off + w);
                }
            }
        }
        (out, offsets)
    }

    pub fn to_document(&self) -> ModelDocument {
        let edges = |rel| {
            self.edges(rel)
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect()
        };
        ModelDocument {
            worlds: self.names.clone(),
            r: edges(Rel::Access),
            rb: edges(Rel::Box),
            rd: edges(Rel::Diamond),
            val: self
                .valuation
                .iter()
                .filter(|(_, s)| s.count_ones(..) > 0)
                .map(|(l, s)| (format!("p{l}"), s.ones().map(|w| self.names[w].clone()).collect()))
                .collect(),
        }
    }

    pub fn from_document(doc: &ModelDocument) -> Result<Self, ModelError> {
        let mut m = KripkeStructure::new(doc.worlds.clone())?;
        for (rel, list, field) in [
            (Rel::Access, &doc.r, "R"),
            (Rel::Box, &doc.rb, "Rb"),
            (Rel::Diamond, &doc.rd, "Rd"),
        ] {
            for (a, b) in list {
                let lookup = |w: &String| {
                    m.world(w).ok_or_else(|| ModelError::Dangling {
                        world: w.clone(),
                        context: format!("edge ({a},{b}) in `{field}`"),
                    })
                };
                let (ia, ib) = (lookup(a)?, lookup(b)?);
                m.add_edge(rel, ia, ib);
            }
        }
        for (key, ws) in &doc.val {
            let letter = key
                .strip_prefix('p')
                .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|d| d.parse::<u32>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| ModelError::BadLetter(key.clone()))?;
            for w in ws {
                let iw = m.world(w).ok_or_else(|| ModelError::Dangling {
                    world: w.clone(),
                    context: format!("valuation of `{key}`"),
                })?;
                m.set_true(letter, iw);
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model documents serialize")
    }
}

/// The JSON interchange form:
/// `{"worlds": [...], "R": [[a,b],...], "Rb": [...], "Rd": [...], "val": {"p1": [...]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub worlds: Vec<String>,
    #[serde(rename = "R", default)]
    pub r: Vec<(String, String)>,
    #[serde(rename = "Rb", default)]
    pub rb: Vec<(String, String)>,
    #[serde(rename = "Rd", default)]
    pub rd: Vec<(String, String)>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
}

/// Parses and validates a model document. Rejection is total.
pub fn load_model(document: &str) -> Result<KripkeStructure, ModelError> {
    let doc: ModelDocument =
        serde_json::from_str(document).map_err(|e| ModelError::Malformed(e.to_string()))?;
    KripkeStructure::from_document(&doc)
}

/// A structure with a designated world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub structure: KripkeStructure,
    pub point: World,
}

impl PointedModel {
    pub fn new(structure: KripkeStructure, point: World) -> Result<Self, ModelError> {
        if point >= structure.len() {
            return Err(ModelError::UnknownWorld(format!("#{point}")));
        }
        Ok(PointedModel { structure, point })
    }

    pub fn named(structure: KripkeStructure, point: &str) -> Result<Self, ModelError> {
        let p = structure.world_or_err(point)?;
        Ok(PointedModel {
            structure,
            point: p,
        })
    }
}

/// Parameters for [`random_model_with`]; densities are per relation.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomModelSpec {
    pub worlds: usize,
    /// Edge probability for `R`, `R□`, `R◇`.
    pub density: [f64; 3],
    pub valuation_density: f64,
    pub letters: u32,
}

/// Samples a structure with every directed edge (per relation) and every
/// letter/world membership drawn independently at `density`.
/// Deterministic in all arguments.
pub fn random_model(n_worlds: usize, density: f64, n_props: u32, seed: u64) -> KripkeStructure {
    let spec = RandomModelSpec {
        worlds: n_worlds,
        density: [density; 3],
        valuation_density: density,
        letters: n_props,
    };
    random_model_with(&spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_model_with<R: Rng + ?Sized>(spec: &RandomModelSpec, rng: &mut R) -> KripkeStructure {
    let mut m = KripkeStructure::with_worlds(spec.worlds);
    for rel in Rel::ALL {
        let p = spec.density[rel.index()].clamp(0.0, 1.0);
        for a in 0..spec.worlds {
            for b in 0..spec.worlds {
                if rng.gen_bool(p) {
                    m.add_edge(rel, a, b);
                }
            }
        }
    }
    let p = spec.valuation_density.clamp(0.0, 1.0);
    for letter in 1..=spec.letters {
        for w in 0..spec.worlds {
            if rng.gen_bool(p) {
                m.set_true(letter, w);
            }
        }
    }
    m
}
