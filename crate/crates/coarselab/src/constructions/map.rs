use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{build_product_capped, SpaceGraph};

/// Which construction produced a map, with its parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl Provenance {
    pub fn new(construction: &str) -> Self {
        Provenance {
            construction: construction.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }
}

/// A point-to-point map between two windows.
#[derive(Clone, Debug)]
pub struct MapRecord {
    pub source: Arc<SpaceGraph>,
    pub target: Arc<SpaceGraph>,
    pub assignment: Vec<usize>,
    pub provenance: Provenance,
    /// Largest ratio `d(f(u), f(v)) / d(u, v)` over graph edges `uv`.
    pub measured_lipschitz: f64,
    /// Largest number of source points sent to one target point.
    pub measured_max_fiber: usize,
}

impl MapRecord {
    /// Wraps an assignment, recomputing the measured fields.
    pub fn new(
        source: Arc<SpaceGraph>,
        target: Arc<SpaceGraph>,
        assignment: Vec<usize>,
        provenance: Provenance,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::Domain(assignment.len().min(source.len())));
        }
        for &t in &assignment {
            target.check_index(t)?;
        }
        let measured_lipschitz = lipschitz_on_edges(&source, &target, &assignment);
        let measured_max_fiber = max_fiber(&assignment);
        Ok(MapRecord {
            source,
            target,
            assignment,
            provenance,
            measured_lipschitz,
            measured_max_fiber,
        })
    }

    pub fn apply(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Preimage sizes of every target point in the image.
    pub fn fibers(&self) -> HashMap<usize, usize> {
        let mut m = HashMap::new();
        for &t in &self.assignment {
            *m.entry(t).or_insert(0) += 1;
        }
        m
    }

    /// Source edges whose endpoints are not sent to equal or adjacent points.
    pub fn non_adjacent_edges(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for u in 0..self.source.len() {
            self.source.for_each_neighbor(u, |v| {
                if u < v {
                    let (a, b) = (self.assignment[u], self.assignment[v]);
                    if a != b && !self.target.neighbors(a).contains(&b) {
                        bad.push((u, v));
                    }
                }
            });
        }
        bad
    }
}

/// `g ∘ f`; the target of `f` must be the source of `g`.
pub fn compose(f: &MapRecord, g: &MapRecord) -> Result<MapRecord> {
    if f.target.len() != g.source.len() || f.target.name != g.source.name {
        return Err(Error::Arity(format!(
            "cannot compose {} -> {} with {} -> {}",
            f.source.name, f.target.name, g.source.name, g.target.name
        )));
    }
    let assignment = f.assignment.iter().map(|&t| g.assignment[t]).collect();
    let provenance = Provenance::new("compose")
        .with("inner", f.provenance.construction.clone())
        .with("outer", g.provenance.construction.clone());
    MapRecord::new(f.source.clone(), g.target.clone(), assignment, provenance)
}

/// The product map `(x₁, …, x_k) ↦ (f₁(x₁), …, f_k(x_k))` between
/// ℓ¹-products of the sources and targets.
pub fn product_map(maps: &[MapRecord]) -> Result<MapRecord> {
    let sources: Vec<_> = maps.iter().map(|f| f.source.clone()).collect();
    let targets: Vec<_> = maps.iter().map(|f| f.target.clone()).collect();
    let source = Arc::new(build_product_capped(&sources, crate::spaces::PRODUCT_CAP)?);
    let target = Arc::new(build_product_capped(&targets, u32::MAX as u128)?);
    let assignment = (0..source.len())
        .map(|i| {
            let parts: Vec<usize> = source
                .tuple(i)
                .into_iter()
                .zip(maps)
                .map(|(x, f)| f.assignment[x])
                .collect();
            target.tuple_index(&parts)
        })
        .collect();
    let provenance = Provenance::new("product").with(
        "factors",
        maps.iter().map(|f| f.provenance.construction.clone()).collect::<Vec<_>>(),
    );
    MapRecord::new(source, target, assignment, provenance)
}

fn lipschitz_on_edges(source: &SpaceGraph, target: &SpaceGraph, f: &[usize]) -> f64 {
    let mut best: f64 = 0.0;
    for u in 0..source.len() {
        source.for_each_neighbor(u, |v| {
            if u < v {
                let ds = source.dist(u, v);
                if ds > 0.0 {
                    best = best.max(target.dist(f[u], f[v]) / ds);
                }
            }
        });
    }
    best
}

fn max_fiber(f: &[usize]) -> usize {
    let mut m: HashMap<usize, usize> = HashMap::new();
    let mut best = 0;
    for &t in f {
        let c = m.entry(t).or_insert(0);
        *c += 1;
        best = best.max(*c);
    }
    best
}
