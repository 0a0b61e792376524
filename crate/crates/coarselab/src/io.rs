//! Versioned JSON artifacts, CSV exports and content hashes.
//!
//! Spaces are never serialized point by point: a [`SpaceManifest`] records
//! how to regenerate the window, and every other artifact refers to its
//! spaces by the SHA-256 of the canonical manifest JSON.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::constructions::{tree_walk_window, MapRecord, NerveComplex, Provenance, Tiling};
use crate::covers::{ColoredDecomposition, Cover};
use crate::error::{Error, Result};
use crate::spaces::{build_comb, build_product_capped, generate_net, Model, ModelPoint, SpaceGraph, Window, PRODUCT_CAP};

/// Schema version written into every artifact.
pub const VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Compact JSON with object keys sorted.
pub fn canonical_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let value = serde_json::to_value(v)?;
    Ok(serde_json::to_vec(&value)?)
}

/// Writes pretty JSON with a trailing newline and returns its hash.
pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    let mut bytes = serde_json::to_vec_pretty(&value)?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<String> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, bytes)?;
    Ok(sha256_hex(bytes))
}

pub fn hash_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Reads a versioned artifact; parse failures and version mismatches are
/// schema errors.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path)?;
    let value: Value =
        serde_json::from_slice(&bytes).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    match value.get("version").and_then(Value::as_u64) {
        Some(v) if v == VERSION as u64 => {}
        Some(v) => return Err(Error::Schema(format!("{}: unsupported version {v}", path.display()))),
        None => return Err(Error::Schema(format!("{}: missing version", path.display()))),
    }
    serde_json::from_value(value).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

/// Kind tag of an artifact, if it carries one.
pub fn artifact_kind(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let value: Value =
        serde_json::from_slice(&bytes).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    value
        .get("kind")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| Error::Schema(format!("{}: missing kind", path.display())))
}

/// How to regenerate a space window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceManifest {
    pub version: u32,
    pub kind: String,
    /// One of `z`, `t3`, `h2`, `hd`, `comb`, `product`.
    pub model: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    pub window: Window,
    pub sep: f64,
    pub edge_threshold: f64,
}

impl SpaceManifest {
    fn new(model: &str, window: Window, sep: f64, edge_threshold: f64) -> Self {
        SpaceManifest {
            version: VERSION,
            kind: "space".into(),
            model: model.into(),
            params: BTreeMap::new(),
            window,
            sep,
            edge_threshold,
        }
    }

    fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    pub fn z(lo: i64, hi: i64) -> Self {
        SpaceManifest::new("z", Window::Interval { lo, hi }, 1.0, 1.0)
    }

    pub fn t3(radius: u32) -> Self {
        SpaceManifest::new("t3", Window::TreeBall { radius }, 1.0, 1.0)
    }

    /// Target of the walk on `[−b, b]`.
    pub fn walk_target(b: u64) -> Self {
        SpaceManifest::new("t3", Window::Subtree, 1.0, 1.0).with("walk_half_width", b)
    }

    /// Net of the hyperbolic ball of the given radius about `(0, …, 0; 1)`.
    pub fn hyperbolic(dim: usize, radius: f64, sep: f64, edge_threshold: f64) -> Self {
        let mut center = vec![0.0; dim];
        center[dim - 1] = 1.0;
        let model = if dim == 2 { "h2" } else { "hd" };
        SpaceManifest::new(model, Window::HyperbolicBall { center, radius }, sep, edge_threshold)
    }

    pub fn comb(d: u32, extent: u32) -> Self {
        SpaceManifest::new("comb", Window::Comb { d, extent }, 1.0, 1.0)
    }

    /// Product of the given factors; `cap` bounds the number of tuples.
    pub fn product(factors: Vec<SpaceManifest>, cap: Option<u128>) -> Self {
        let window = Window::Product {
            factors: factors.iter().map(|f| f.window.clone()).collect(),
        };
        let sep = factors.iter().map(|f| f.sep).fold(f64::INFINITY, f64::min);
        let thr = factors.iter().map(|f| f.edge_threshold).fold(0.0, f64::max);
        let mut m = SpaceManifest::new("product", window, sep, thr).with(
            "factors",
            Value::Array(factors.iter().map(|f| serde_json::to_value(f).expect("manifest")).collect()),
        );
        if let Some(cap) = cap {
            m = m.with("cap", cap as u64);
        }
        m
    }

    pub fn hash(&self) -> String {
        sha256_hex(&canonical_json(self).expect("manifest serializes"))
    }

    fn factors(&self) -> Result<Vec<SpaceManifest>> {
        let v = self
            .params
            .get("factors")
            .ok_or_else(|| Error::Schema("product manifest without factors".into()))?;
        serde_json::from_value(v.clone()).map_err(|e| Error::Schema(format!("product factors: {e}")))
    }

    /// Regenerates the window.
    pub fn build(&self) -> Result<SpaceGraph> {
        if self.version != VERSION {
            return Err(Error::Schema(format!("unsupported space version {}", self.version)));
        }
        let bad = || Error::Schema(format!("model {} does not take window {:?}", self.model, self.window));
        match (self.model.as_str(), &self.window) {
            ("z", Window::Interval { .. }) => generate_net(Model::Z, &self.window, self.sep, self.edge_threshold),
            ("t3", Window::TreeBall { .. }) => generate_net(Model::T3, &self.window, self.sep, self.edge_threshold),
            ("t3", Window::Subtree) => {
                let b = self
                    .params
                    .get("walk_half_width")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::Schema("subtree window needs walk_half_width".into()))?;
                let w = tree_walk_window(b)?;
                Ok((*w.map.target).clone())
            }
            ("h2" | "hd", Window::HyperbolicBall { center, .. }) => {
                if (self.model == "h2") != (center.len() == 2) || center.len() < 2 {
                    return Err(bad());
                }
                generate_net(Model::H(center.len()), &self.window, self.sep, self.edge_threshold)
            }
            ("comb", Window::Comb { d, extent }) => build_comb(*d, *extent),
            ("product", Window::Product { .. }) => {
                let cap = self
                    .params
                    .get("cap")
                    .and_then(Value::as_u64)
                    .map_or(PRODUCT_CAP, |c| c as u128);
                let factors = self
                    .factors()?
                    .iter()
                    .map(|f| f.build().map(Arc::new))
                    .collect::<Result<Vec<_>>>()?;
                build_product_capped(&factors, cap)
            }
            _ => Err(bad()),
        }
    }
}

/// Column names of the point export for a space.
fn point_header(space: &SpaceGraph) -> Vec<String> {
    let mut h = vec!["index".to_string()];
    match space.point(0) {
        ModelPoint::HalfPlane { .. } => h.extend(["x".into(), "y".into()]),
        ModelPoint::HalfSpace { x, .. } => {
            h.extend((1..=x.len()).map(|i| format!("x{i}")));
            h.push("y".into());
        }
        ModelPoint::TreeAddress { .. } => h.push("word".into()),
        ModelPoint::Integer { .. } => h.push("n".into()),
        ModelPoint::CombNode { .. } => h.extend(["level".into(), "base".into(), "offsets".into()]),
        ModelPoint::Tuple { .. } => h.push("factor_indices".into()),
        ModelPoint::Abstract { .. } => h.push("id".into()),
    }
    h
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn point_row(space: &SpaceGraph, i: usize) -> Vec<String> {
    let mut row = vec![i.to_string()];
    match space.point(i) {
        ModelPoint::HalfPlane { x, y } => row.extend([x.to_string(), y.to_string()]),
        ModelPoint::HalfSpace { x, y } => {
            row.extend(x.iter().map(f64::to_string));
            row.push(y.to_string());
        }
        ModelPoint::TreeAddress { word } => row.push(word.iter().map(|c| char::from(b'0' + c)).collect()),
        ModelPoint::Integer { n } => row.push(n.to_string()),
        ModelPoint::CombNode { level, base, offsets } => {
            row.extend([level.to_string(), base.to_string(), join(&offsets)])
        }
        ModelPoint::Tuple { .. } => row.push(join(&space.tuple(i))),
        ModelPoint::Abstract { id } => row.push(id.to_string()),
    }
    row
}

/// Point export: one row per point with its model coordinates.
pub fn points_csv(space: &SpaceGraph) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if !space.is_empty() {
        w.write_record(point_header(space))?;
    }
    for i in 0..space.len() {
        w.write_record(point_row(space, i))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Edge export: `i,j` with `i < j`, sorted.
pub fn edges_csv(space: &SpaceGraph) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "j"])?;
    for u in 0..space.len() {
        let mut nb = space.neighbors(u);
        nb.retain(|&v| v > u);
        nb.sort_unstable();
        for v in nb {
            w.write_record([u.to_string(), v.to_string()])?;
        }
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// A table written as CSV with a fixed column order.
pub fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colour: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub points: Vec<u32>,
}

/// A cover or coloured decomposition of a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverFile {
    pub version: u32,
    pub kind: String,
    pub space_ref: String,
    pub space: SpaceManifest,
    pub pieces: Vec<PieceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<bool>,
    pub provenance: Provenance,
}

impl CoverFile {
    pub fn from_cover(space: &SpaceManifest, cover: &Cover, provenance: Provenance) -> Self {
        CoverFile {
            version: VERSION,
            kind: "cover".into(),
            space_ref: space.hash(),
            space: space.clone(),
            pieces: cover
                .pieces
                .iter()
                .enumerate()
                .map(|(id, p)| PieceRecord {
                    id,
                    colour: None,
                    label: cover.labels.get(id).cloned(),
                    points: p.clone(),
                })
                .collect(),
            r: None,
            d: None,
            partition: None,
            provenance,
        }
    }

    pub fn from_decomposition(space: &SpaceManifest, dec: &ColoredDecomposition, provenance: Provenance) -> Self {
        CoverFile {
            version: VERSION,
            kind: "decomposition".into(),
            space_ref: space.hash(),
            space: space.clone(),
            pieces: dec
                .pieces
                .iter()
                .enumerate()
                .map(|(id, p)| PieceRecord {
                    id,
                    colour: Some(dec.colour[id]),
                    label: dec.labels.get(id).cloned(),
                    points: p.clone(),
                })
                .collect(),
            r: Some(dec.r),
            d: Some(dec.d),
            partition: Some(dec.partition),
            provenance,
        }
    }

    /// Regenerates the space after checking the reference.
    pub fn load_space(&self) -> Result<SpaceGraph> {
        check_ref(&self.space, &self.space_ref)?;
        self.space.build()
    }

    pub fn to_cover(&self) -> Cover {
        let mut c = Cover::new(self.pieces.iter().map(|p| p.points.clone()).collect());
        if self.pieces.iter().any(|p| p.label.is_some()) {
            c.labels = self.pieces.iter().map(|p| p.label.clone().unwrap_or_default()).collect();
        }
        c
    }

    pub fn to_decomposition(&self) -> Result<ColoredDecomposition> {
        let colour = self
            .pieces
            .iter()
            .map(|p| p.colour.ok_or_else(|| Error::Schema(format!("piece {} has no colour", p.id))))
            .collect::<Result<Vec<_>>>()?;
        let r = self.r.ok_or_else(|| Error::Schema("decomposition without r".into()))?;
        let mut dec = ColoredDecomposition::new(self.pieces.iter().map(|p| p.points.clone()).collect(), colour, r);
        if let Some(d) = self.d {
            dec.d = d;
        }
        dec.labels = self.to_cover().labels;
        Ok(dec)
    }
}

fn check_ref(m: &SpaceManifest, r: &str) -> Result<()> {
    let h = m.hash();
    if h != r {
        return Err(Error::Schema(format!("space reference {r} does not match manifest hash {h}")));
    }
    Ok(())
}

/// A point-to-point map. Measured fields are recomputed on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub version: u32,
    pub kind: String,
    pub source_ref: String,
    pub target_ref: String,
    pub source: SpaceManifest,
    pub target: SpaceManifest,
    pub pairs: Vec<[usize; 2]>,
    pub provenance: Provenance,
    pub measured_lipschitz: f64,
    pub measured_max_fiber: usize,
}

impl MapFile {
    pub fn new(source: &SpaceManifest, target: &SpaceManifest, f: &MapRecord) -> Self {
        MapFile {
            version: VERSION,
            kind: "map".into(),
            source_ref: source.hash(),
            target_ref: target.hash(),
            source: source.clone(),
            target: target.clone(),
            pairs: f.assignment.iter().enumerate().map(|(i, &j)| [i, j]).collect(),
            provenance: f.provenance.clone(),
            measured_lipschitz: f.measured_lipschitz,
            measured_max_fiber: f.measured_max_fiber,
        }
    }

    pub fn load(&self) -> Result<MapRecord> {
        check_ref(&self.source, &self.source_ref)?;
        check_ref(&self.target, &self.target_ref)?;
        let source = Arc::new(self.source.build()?);
        let target = Arc::new(self.target.build()?);
        let mut assignment = vec![usize::MAX; source.len()];
        for &[i, j] in &self.pairs {
            if i >= source.len() {
                return Err(Error::Schema(format!("pair source {i} out of range")));
            }
            assignment[i] = j;
        }
        if let Some(i) = assignment.iter().position(|&j| j == usize::MAX) {
            return Err(Error::Domain(i));
        }
        MapRecord::new(source, target, assignment, self.provenance.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingFile {
    pub version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub tiling: Tiling,
}

impl TilingFile {
    pub fn new(tiling: &Tiling) -> Self {
        TilingFile {
            version: VERSION,
            kind: "tiling".into(),
            tiling: tiling.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NerveFile {
    pub version: u32,
    pub kind: String,
    pub space_ref: String,
    pub cover_ref: String,
    #[serde(flatten)]
    pub nerve: NerveComplex,
    pub lipschitz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            pass,
            value: None,
            witness: None,
        }
    }

    pub fn value(mut self, v: impl Serialize) -> Self {
        self.value = serde_json::to_value(v).ok();
        self
    }

    pub fn witness(mut self, v: impl Serialize) -> Self {
        self.witness = serde_json::to_value(v).ok();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: u32,
    pub kind: String,
    pub target: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(target: impl Into<String>, checks: Vec<Check>) -> Self {
        VerificationReport {
            version: VERSION,
            kind: "verification".into(),
            target: target.into(),
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// An analysis result tagged with its kind and schema version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Report<T> {
    pub fn new(kind: &str, body: T) -> Self {
        Report {
            version: VERSION,
            kind: kind.into(),
            body,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRef {
    pub path: String,
    pub sha256: String,
}

/// Record of one command invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: u32,
    pub kind: String,
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: Vec<FileRef>,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub outputs: Vec<FileRef>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, seed: u64) -> Self {
        RunManifest {
            version: VERSION,
            kind: "run".into(),
            command: command.into(),
            argv,
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            seed,
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_roundtrip_and_hash() {
        let m = SpaceManifest::product(vec![SpaceManifest::z(-3, 3), SpaceManifest::t3(2)], None);
        let back: SpaceManifest = serde_json::from_slice(&canonical_json(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.hash(), m.hash());
        assert_ne!(SpaceManifest::z(-3, 3).hash(), SpaceManifest::z(-3, 4).hash());
        let s = m.build().unwrap();
        assert_eq!(s.len(), 7 * 10);
    }

    #[test]
    fn exports_are_stable() {
        let s = SpaceManifest::z(-2, 2).build().unwrap();
        let pts = String::from_utf8(points_csv(&s).unwrap()).unwrap();
        assert_eq!(pts, "index,n\n0,-2\n1,-1\n2,0\n3,1\n4,2\n");
        let e = String::from_utf8(edges_csv(&s).unwrap()).unwrap();
        assert_eq!(e, "i,j\n0,1\n1,2\n2,3\n3,4\n");
    }

    #[test]
    fn model_window_mismatch_is_a_schema_error() {
        let mut m = SpaceManifest::z(0, 3);
        m.model = "comb".into();
        assert!(matches!(m.build(), Err(Error::Schema(_))));
    }

    #[test]
    fn tampered_reference_is_rejected() {
        let m = SpaceManifest::z(0, 3);
        let mut f = CoverFile::from_cover(&m, &Cover::new(vec![(0..4).collect()]), Provenance::new("test"));
        assert!(f.load_space().is_ok());
        f.space_ref = "00".into();
        assert!(matches!(f.load_space(), Err(Error::Schema(_))));
    }
}
