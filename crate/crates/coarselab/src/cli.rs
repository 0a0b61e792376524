//! The `coarselab` command line.
//!
//! Every command writes its artifacts plus a `run.json` into one output
//! directory: `--out` when given, else `$COARSELAB_CACHE/<command>`, else
//! `./coarselab-out/<command>`. Space manifests are also stored by hash
//! under `<cache>/spaces/`, so `--space` accepts either a path or a hash.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::distortion::DistortionOptions;
use crate::analysis::growth::BallGrowth;
use crate::analysis::{
    ball_growth, central_piece, distortion_profile, escalation, fit_growth, quasi_convexity_defect,
    radial_sublinearity, DefectOptions,
};
use crate::analysis::growth::piece_growth_with;
use crate::constructions::{
    build_h2_tiling, hd_cover, nerve_map, tiling_to_decomposition, tree_walk_window, HdCoverParams, MapRecord,
    Provenance, TilingWindow,
};
use crate::covers::{
    ball_cover, check_disjointness, kolmogorov_amplify, product_decomposition, pullback_cover, r_multiplicity,
    refine_connected, ColoredDecomposition, Cover, Metric,
};
use crate::error::{Error, Result};
use crate::io::{
    artifact_kind, edges_csv, hash_file, points_csv, read_json, table_csv, write_bytes, write_json, Check,
    CoverFile, FileRef, MapFile, NerveFile, Report, RunManifest, SpaceManifest, TilingFile, VerificationReport,
    VERSION,
};
use crate::spaces::comb::comb_size;
use crate::spaces::{SpaceGraph, Window};

pub const CACHE_ENV: &str = "COARSELAB_CACHE";

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const SIZE_CAP: i32 = 3;
    pub const FAILED: i32 = 4;
    pub const TRUNCATED: i32 = 5;
}

#[derive(Parser, Debug)]
#[command(name = "coarselab", version, about = "Coarse geometry of hyperbolic windows, trees, combs and products")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every sampled statistic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a space window and export its points and edges.
    Space(SpaceArgs),
    /// Build a construction and verify its exhaustive invariants.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Run named checks against an artifact.
    Verify(VerifyArgs),
    /// Window-scale measurements.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Summarize an output directory, or replay a run and compare hashes.
    Report(ReportArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Z,
    T3,
    H2,
    Hd,
    Comb,
}

#[derive(Args, Debug, Serialize)]
pub struct SpaceArgs {
    /// Read the window from a space manifest instead of flags.
    #[arg(long, conflicts_with = "model")]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "manifest")]
    pub model: Option<ModelArg>,
    /// Integer window `[−range, range]`.
    #[arg(long)]
    pub range: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<i64>,
    /// Tree ball radius.
    #[arg(long)]
    pub radius: Option<u32>,
    /// Hyperbolic ball radius about `(0, …, 0; 1)`.
    #[arg(long)]
    pub ball: Option<f64>,
    /// Dimension of the hyperbolic model.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sep: f64,
    /// Edge threshold; defaults to twice the separation.
    #[arg(long)]
    pub thr: Option<f64>,
    /// Comb depth.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub extent: Option<u32>,
    /// Skip the edge export.
    #[arg(long)]
    pub no_edges: bool,
}

#[derive(Subcommand, Debug)]
pub enum BuildCommand {
    /// The ℍ² tiling and its two-colour decomposition of a net.
    Tiling(TilingArgs),
    /// The walk ℤ → T₃ on `[−n, n]`.
    Walk(WalkArgs),
    /// The map ℍ^d → (ℍ²)^{d−1} and the pulled-back cover.
    Bradyfarb(BradyFarbArgs),
    /// The discrete comb of depth `d`.
    Comb(CombArgs),
    /// A product of spaces, optionally with the product decomposition.
    Product(ProductArgs),
    /// The nerve of a cover with its barycentric coordinates.
    Nerve(NerveArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct TilingArgs {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Window as `ball:<radius>`.
    #[arg(long, default_value = "ball:6")]
    pub window: String,
    #[arg(long, default_value_t = 0.5)]
    pub sep: f64,
    #[arg(long)]
    pub thr: Option<f64>,
    /// Smallest Euclidean tile radius listed; defaults to the window's
    /// lowest height.
    #[arg(long)]
    pub resolution: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct WalkArgs {
    /// Half-width of the integer window.
    #[arg(long)]
    pub n: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct BradyFarbArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 4.0)]
    pub ball: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sep: f64,
    #[arg(long)]
    pub thr: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub factor_sep: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct CombArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub extent: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct ProductArgs {
    /// Space manifests (paths or hashes).
    #[arg(long, num_args = 2.., required = true)]
    pub spaces: Vec<String>,
    /// One decomposition per factor, for the product decomposition.
    #[arg(long, num_args = 2)]
    pub decomps: Vec<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct NerveArgs {
    #[arg(long)]
    pub cover: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    pub target: PathBuf,
    /// Comma-separated checks, each `name[:key=value…]`.
    #[arg(long)]
    pub checks: String,
}

#[derive(Subcommand, Debug)]
pub enum AnalyzeCommand {
    /// Ball growth of a window, or of every piece of a decomposition.
    Growth(GrowthArgs),
    /// Distance profile of a map.
    Distortion(DistortionArgs),
    /// Radial sublinearity of a cover, or of a pulled-back ball cover.
    Sublinearity(SublinearityArgs),
    /// Quasi-convexity defect of a piece or a horocycle band in ℍ².
    Defect(DefectArgs),
    /// Growth of iterated neighbourhoods of a piece.
    Escalation(EscalationArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GrowthArgs {
    #[arg(long, conflicts_with = "decomp", required_unless_present = "decomp")]
    pub space: Option<String>,
    #[arg(long)]
    pub decomp: Option<PathBuf>,
    /// Restrict to one piece of the decomposition.
    #[arg(long, requires = "decomp")]
    pub piece: Option<usize>,
    /// `origin`, or a point (the integer itself on ℤ windows).
    #[arg(long, default_value = "origin")]
    pub center: String,
    #[arg(long)]
    pub rmax: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub rmin: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct DistortionArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Anchor of the anchored profile: `origin` or a point.
    #[arg(long)]
    pub anchored: Option<String>,
    /// Exhaustive below this many pairs, sampled above.
    #[arg(long, default_value_t = 1_000_000)]
    pub pairs: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct SublinearityArgs {
    #[arg(long, conflicts_with = "map", required_unless_present = "map")]
    pub cover: Option<PathBuf>,
    #[arg(long, requires = "ball_cover")]
    pub map: Option<PathBuf>,
    /// Radius of the target ball cover pulled back along `--map`; preimages
    /// are split into components at the source edge scale.
    #[arg(long)]
    pub ball_cover: Option<f64>,
    /// Comma-separated radii; defaults to powers of two.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<u64>,
    #[arg(long, default_value = "origin")]
    pub basepoint: String,
}

#[derive(Args, Debug, Serialize)]
pub struct DefectArgs {
    #[arg(long, requires = "piece")]
    pub decomp: Option<PathBuf>,
    #[arg(long)]
    pub piece: Option<usize>,
    /// ℍ² space for the horocycle band.
    #[arg(long, requires = "horocycle")]
    pub space: Option<String>,
    /// Half-length of the band `{|x| ≤ X, |log y| ≤ 1}`.
    #[arg(long)]
    pub horocycle: Option<f64>,
    /// Connectivity scale of the subset.
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub pairs: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct EscalationArgs {
    #[arg(long)]
    pub decomp: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Base piece; defaults to the central `B` piece.
    #[arg(long)]
    pub base: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub rmin: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    /// Output directory to summarize.
    #[arg(required_unless_present = "replay")]
    pub dir: Option<PathBuf>,
    /// Re-run a recorded `run.json` and compare output hashes.
    #[arg(long, conflicts_with = "dir")]
    pub replay: Option<PathBuf>,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_) | Error::Parameter(_) | Error::Arity(_) => exit::SCHEMA,
        Error::SizeCap { .. } => exit::SIZE_CAP,
        Error::Precondition { .. } | Error::Assignment { .. } | Error::Domain(_) | Error::Window { .. } => {
            exit::FAILED
        }
        Error::Truncation(_) => exit::TRUNCATED,
        _ => exit::ERROR,
    }
}

/// Root of the artifact cache.
pub fn cache_root() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("coarselab-out"))
}

/// Parses and runs a command line, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(&cli, argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Precondition { witness, .. } = &e {
                if !witness.is_empty() {
                    eprintln!("witness: {witness:?}");
                }
            }
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli, argv: Vec<String>) -> Result<i32> {
    match &cli.command {
        Command::Space(a) => cmd_space(&mut Run::new(cli, "space", argv, a)?, a),
        Command::Build(b) => match b {
            BuildCommand::Tiling(a) => build_tiling(&mut Run::new(cli, "build-tiling", argv, a)?, a),
            BuildCommand::Walk(a) => build_walk(&mut Run::new(cli, "build-walk", argv, a)?, a),
            BuildCommand::Bradyfarb(a) => build_bradyfarb(&mut Run::new(cli, "build-bradyfarb", argv, a)?, a),
            BuildCommand::Comb(a) => build_comb_cmd(&mut Run::new(cli, "build-comb", argv, a)?, a),
            BuildCommand::Product(a) => build_product_cmd(&mut Run::new(cli, "build-product", argv, a)?, a),
            BuildCommand::Nerve(a) => build_nerve(&mut Run::new(cli, "build-nerve", argv, a)?, a),
        },
        Command::Verify(a) => cmd_verify(&mut Run::new(cli, "verify", argv, a)?, a),
        Command::Analyze(c) => match c {
            AnalyzeCommand::Growth(a) => analyze_growth(&mut Run::new(cli, "analyze-growth", argv, a)?, a),
            AnalyzeCommand::Distortion(a) => {
                analyze_distortion(&mut Run::new(cli, "analyze-distortion", argv, a)?, a)
            }
            AnalyzeCommand::Sublinearity(a) => {
                analyze_sublinearity(&mut Run::new(cli, "analyze-sublinearity", argv, a)?, a)
            }
            AnalyzeCommand::Defect(a) => analyze_defect(&mut Run::new(cli, "analyze-defect", argv, a)?, a),
            AnalyzeCommand::Escalation(a) => {
                analyze_escalation(&mut Run::new(cli, "analyze-escalation", argv, a)?, a)
            }
        },
        Command::Report(a) => cmd_report(a),
    }
}

/// One command invocation: its output directory and the manifest that
/// accumulates inputs and outputs.
struct Run {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Run {
    fn new<P: Serialize>(cli: &Cli, command: &str, argv: Vec<String>, params: &P) -> Result<Run> {
        let dir = cli.out.clone().unwrap_or_else(|| cache_root().join(command));
        fs::create_dir_all(&dir)?;
        let mut manifest = RunManifest::new(command, argv, cli.seed);
        if let Value::Object(m) = serde_json::to_value(params)? {
            manifest.parameters = m.into_iter().collect();
        }
        Ok(Run { dir, manifest })
    }

    fn seed(&self) -> u64 {
        self.manifest.seed
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        let sha256 = hash_file(path)?;
        self.manifest.inputs.push(FileRef {
            path: path.display().to_string(),
            sha256,
        });
        Ok(())
    }

    fn record(&mut self, name: &str, sha256: String) {
        self.manifest.outputs.push(FileRef {
            path: name.into(),
            sha256,
        });
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        let h = write_json(&self.dir.join(name), v)?;
        self.record(name, h);
        Ok(())
    }

    fn bytes(&mut self, name: &str, b: &[u8]) -> Result<()> {
        let h = write_bytes(&self.dir.join(name), b)?;
        self.record(name, h);
        Ok(())
    }

    /// Stores a space manifest in the output directory and the cache.
    fn space(&mut self, name: &str, m: &SpaceManifest) -> Result<()> {
        self.json(name, m)?;
        let cached = cache_root().join("spaces").join(format!("{}.json", m.hash()));
        if !cached.exists() {
            write_json(&cached, m)?;
        }
        Ok(())
    }

    /// Writes the verification report; on failure nothing else is written
    /// and the failed-invariant exit code is returned.
    fn verification(&mut self, target: &str, checks: Vec<Check>) -> Result<Option<i32>> {
        let rep = VerificationReport::new(target, checks);
        print_checks(&rep);
        self.json("verification.json", &rep)?;
        Ok((!rep.passed()).then_some(exit::FAILED))
    }

    fn finish(self, summary: &str) -> Result<i32> {
        write_json(&self.dir.join("run.json"), &self.manifest)?;
        say!("{summary}");
        say!("wrote {}", self.dir.display());
        Ok(exit::OK)
    }

    /// Finishes a run whose verification failed: only the report and the
    /// run record are kept.
    fn fail(self, code: i32) -> Result<i32> {
        write_json(&self.dir.join("run.json"), &self.manifest)?;
        Ok(code)
    }
}

fn print_checks(rep: &VerificationReport) {
    for c in &rep.checks {
        let value = c.value.as_ref().map(|v| format!(" value={v}")).unwrap_or_default();
        let witness = match (&c.witness, c.pass) {
            (Some(w), false) => format!(" witness={w}"),
            _ => String::new(),
        };
        say!("{} {}{value}{witness}", if c.pass { "PASS" } else { "FAIL" }, c.name);
    }
}

/// Resolves a space reference: a manifest path, or a hash in the cache.
fn load_space_ref(run: &mut Run, arg: &str) -> Result<SpaceManifest> {
    let path = Path::new(arg);
    let path = if path.exists() {
        path.to_path_buf()
    } else {
        let cached = cache_root().join("spaces").join(format!("{arg}.json"));
        if !cached.exists() {
            return Err(Error::Schema(format!("no space manifest at {arg} or in the cache")));
        }
        cached
    };
    run.input(&path)?;
    let m: SpaceManifest = read_json(&path)?;
    if m.kind != "space" {
        return Err(Error::Schema(format!("{arg}: expected a space manifest, found {}", m.kind)));
    }
    Ok(m)
}

fn load_cover_file(run: &mut Run, path: &Path) -> Result<CoverFile> {
    run.input(path)?;
    let f: CoverFile = read_json(path)?;
    if f.kind != "cover" && f.kind != "decomposition" {
        return Err(Error::Schema(format!("{}: expected a cover, found {}", path.display(), f.kind)));
    }
    Ok(f)
}

fn load_decomposition(run: &mut Run, path: &Path) -> Result<(CoverFile, SpaceGraph, ColoredDecomposition)> {
    let f = load_cover_file(run, path)?;
    let dec = f.to_decomposition()?;
    let space = f.load_space()?;
    Ok((f, space, dec))
}

fn load_map(run: &mut Run, path: &Path) -> Result<MapRecord> {
    run.input(path)?;
    let f: MapFile = read_json(path)?;
    if f.kind != "map" {
        return Err(Error::Schema(format!("{}: expected a map, found {}", path.display(), f.kind)));
    }
    f.load()
}

/// `origin`, or a point: the integer itself on ℤ windows, else an index.
fn resolve_point(space: &SpaceGraph, s: &str) -> Result<usize> {
    if s == "origin" {
        return Ok(space.basepoint());
    }
    let v: i64 = s
        .parse()
        .map_err(|_| Error::Parameter(format!("point {s:?} is neither `origin` nor an integer")))?;
    let i = match space.window {
        Window::Interval { lo, .. } => v - lo,
        _ => v,
    };
    if i < 0 {
        return Err(Error::Parameter(format!("point {s} lies outside the window")));
    }
    space.check_index(i as usize)?;
    Ok(i as usize)
}

fn default_thr(sep: f64, thr: Option<f64>) -> f64 {
    thr.unwrap_or(2.0 * sep)
}

fn space_summary(space: &SpaceGraph, m: &SpaceManifest) -> Value {
    let hist = space.degree_histogram();
    json!({
        "version": VERSION,
        "kind": "space-summary",
        "space_ref": m.hash(),
        "points": space.len(),
        "degree_bound": hist.len().saturating_sub(1),
        "degree_histogram": hist,
    })
}

fn write_space_exports(run: &mut Run, space: &SpaceGraph, edges: bool) -> Result<()> {
    run.bytes("points.csv", &points_csv(space)?)?;
    if edges {
        run.bytes("edges.csv", &edges_csv(space)?)?;
    }
    Ok(())
}

fn cmd_space(run: &mut Run, a: &SpaceArgs) -> Result<i32> {
    let m = match (&a.manifest, a.model) {
        (Some(p), _) => load_space_ref(run, &p.display().to_string())?,
        (None, Some(model)) => space_manifest_from_flags(model, a)?,
        (None, None) => return Err(Error::Parameter("give --model or --manifest".into())),
    };
    let space = m.build()?;
    run.space("space.json", &m)?;
    write_space_exports(run, &space, !a.no_edges)?;
    let summary = space_summary(&space, &m);
    run.json("summary.json", &summary)?;
    let msg = format!(
        "{} points, degree bound {}, degree histogram {}",
        space.len(),
        summary["degree_bound"],
        summary["degree_histogram"]
    );
    finish(run, msg)
}

fn finish(run: &mut Run, summary: String) -> Result<i32> {
    let r = Run {
        dir: run.dir.clone(),
        manifest: run.manifest.clone(),
    };
    r.finish(&summary)
}

fn fail(run: &mut Run, code: i32) -> Result<i32> {
    let r = Run {
        dir: run.dir.clone(),
        manifest: run.manifest.clone(),
    };
    r.fail(code)
}

fn space_manifest_from_flags(model: ModelArg, a: &SpaceArgs) -> Result<SpaceManifest> {
    let need = |what: &str| Error::Parameter(format!("--model {model:?} needs --{what}"));
    Ok(match model {
        ModelArg::Z => match (a.range, a.lo, a.hi) {
            (Some(r), None, None) => SpaceManifest::z(-r, r),
            (None, Some(lo), Some(hi)) => SpaceManifest::z(lo, hi),
            _ => return Err(need("range, or --lo and --hi")),
        },
        ModelArg::T3 => SpaceManifest::t3(a.radius.ok_or_else(|| need("radius"))?),
        ModelArg::H2 | ModelArg::Hd => {
            let dim = if model == ModelArg::H2 { 2 } else { a.dim };
            if dim < 2 {
                return Err(Error::Parameter(format!("dimension {dim} < 2")));
            }
            let ball = a.ball.ok_or_else(|| need("ball"))?;
            SpaceManifest::hyperbolic(dim, ball, a.sep, default_thr(a.sep, a.thr))
        }
        ModelArg::Comb => SpaceManifest::comb(a.d.ok_or_else(|| need("d"))?, a.extent.ok_or_else(|| need("extent"))?),
    })
}

fn parse_ball_window(s: &str) -> Result<f64> {
    s.strip_prefix("ball:")
        .and_then(|r| r.parse::<f64>().ok())
        .filter(|r| *r > 0.0)
        .ok_or_else(|| Error::Parameter(format!("window {s:?} is not of the form ball:<radius>")))
}

fn build_tiling(run: &mut Run, a: &TilingArgs) -> Result<i32> {
    let radius = parse_ball_window(&a.window)?;
    let m = SpaceManifest::hyperbolic(2, radius, a.sep, default_thr(a.sep, a.thr));
    let space = m.build()?;
    let resolution = a.resolution.unwrap_or((-radius).exp());
    let tiling = build_h2_tiling(
        a.r,
        TilingWindow {
            center: (0.0, 1.0),
            radius,
            resolution,
        },
    )?;
    let dec = tiling_to_decomposition(&tiling, &space)?;
    let mut checks = decomposition_checks(&space, &dec);
    checks.push(colours_check(&dec, 2));
    let cover = dec.to_cover();
    let mult = r_multiplicity(&space, &cover, a.r, Metric::Model);
    checks.push(
        Check::new(format!("multiplicity:R={}:metric=model:max=2", a.r), mult.value <= 2)
            .value(mult.value)
            .witness(&mult),
    );
    if let Some(code) = run.verification("decomposition.json", checks)? {
        return fail(run, code);
    }
    run.space("space.json", &m)?;
    run.json("tiling.json", &TilingFile::new(&tiling))?;
    let prov = Provenance::new("h2_tiling").with("r", a.r).with("resolution", resolution);
    run.json("decomposition.json", &CoverFile::from_decomposition(&m, &dec, prov))?;
    let msg = format!(
        "{} tiles listed, {} net points in {} pieces, dilation {:.6}",
        tiling.tiles.len(),
        space.len(),
        dec.len(),
        tiling.dilation
    );
    finish(run, msg)
}

/// Coverage, partition and disjointness of a decomposition.
fn decomposition_checks(space: &SpaceGraph, dec: &ColoredDecomposition) -> Vec<Check> {
    let mut checks = vec![coverage_check(space, &dec.to_cover(), Some(dec), 1)];
    if dec.partition {
        checks.push(Check::new("partition", true));
    }
    checks.push(disjointness_check(space, dec));
    checks
}

fn coverage_check(space: &SpaceGraph, cover: &Cover, dec: Option<&ColoredDecomposition>, min: u32) -> Check {
    let counts: Vec<u32> = match dec {
        Some(d) => d.coverage_counts(space.len()),
        None => {
            let m = cover.membership(space);
            (0..space.len()).map(|x| m.of(x).len() as u32).collect()
        }
    };
    let low = counts.iter().copied().min().unwrap_or(0);
    let mut c = Check::new(format!("coverage:min={min}"), low >= min).value(low);
    if let Some(x) = counts.iter().position(|&k| k < min) {
        c = c.witness(json!({ "point": x, "count": counts[x] }));
    }
    c
}

fn disjointness_check(space: &SpaceGraph, dec: &ColoredDecomposition) -> Check {
    let v = check_disjointness(space, dec);
    let mut c = Check::new("disjointness", v.is_empty()).value(json!({ "r": dec.r, "violations": v.len() }));
    if let Some(first) = v.first() {
        c = c.witness(first);
    }
    c
}

fn colours_check(dec: &ColoredDecomposition, max: usize) -> Check {
    Check::new(format!("colours:max={max}"), dec.colours() <= max).value(dec.colours())
}

fn partition_check(space: &SpaceGraph, cover: &Cover) -> Check {
    let m = cover.membership(space);
    match (0..space.len()).find(|&x| m.of(x).len() > 1) {
        None => Check::new("partition", true),
        Some(x) => Check::new("partition", false).witness(json!({ "point": x, "pieces": m.of(x) })),
    }
}

fn fibers_check(f: &MapRecord, max: Option<usize>) -> Check {
    let name = max.map_or("fibers".to_string(), |m| format!("fibers:max={m}"));
    let fib = f.fibers();
    let worst = fib.iter().max_by_key(|&(t, k)| (*k, std::cmp::Reverse(*t)));
    let value = worst.map_or(0, |(_, &k)| k);
    let mut c = Check::new(name, max.is_none_or(|m| value <= m)).value(value);
    if let Some((&t, _)) = worst {
        let mut pre: Vec<usize> = (0..f.assignment.len()).filter(|&i| f.assignment[i] == t).collect();
        pre.truncate(8);
        c = c.witness(json!({ "target": t, "preimages": pre }));
    }
    c
}

fn adjacent_check(f: &MapRecord) -> Check {
    let bad = f.non_adjacent_edges();
    let mut c = Check::new("adjacent", bad.is_empty()).value(bad.len());
    if let Some(&(u, v)) = bad.first() {
        c = c.witness(json!({ "edge": [u, v], "images": [f.apply(u), f.apply(v)] }));
    }
    c
}

/// `d(f(o), f(p)) ≤ c·log₂(1 + d(o, p)) + a` for every source point `p`.
fn anchored_log_check(f: &MapRecord, anchor: usize, c: f64, a: f64) -> Check {
    let o = f.apply(anchor);
    let mut worst: Option<(f64, usize)> = None;
    let mut fails = 0usize;
    for p in 0..f.source.len() {
        let bound = c * (1.0 + f.source.dist(anchor, p)).log2() + a;
        let d = f.target.dist(o, f.apply(p));
        let slack = bound - d;
        if slack < 0.0 {
            fails += 1;
        }
        if worst.is_none_or(|(s, _)| slack < s) {
            worst = Some((slack, p));
        }
    }
    let mut check = Check::new(format!("anchored-log:c={c}:a={a}"), fails == 0)
        .value(json!({ "min_slack": worst.map(|w| w.0), "violations": fails }));
    if let Some((slack, p)) = worst.filter(|w| w.0 < 0.0) {
        check = check.witness(json!({ "point": p, "slack": slack }));
    }
    check
}

fn lipschitz_check(f: &MapRecord, max: Option<f64>) -> Check {
    let name = max.map_or("lipschitz".to_string(), |m| format!("lipschitz:max={m}"));
    Check::new(name, max.is_none_or(|m| f.measured_lipschitz <= m)).value(f.measured_lipschitz)
}

fn build_walk(run: &mut Run, a: &WalkArgs) -> Result<i32> {
    let b = a.n;
    let walk = tree_walk_window(b)?;
    let f = &walk.map;
    let source = SpaceManifest::z(-(b as i64), b as i64);
    let target = SpaceManifest::walk_target(b);
    let anchor = f.source.basepoint();
    let checks = vec![
        fibers_check(f, Some(3)),
        adjacent_check(f),
        anchored_log_check(f, anchor, 2.0, 6.0),
        lipschitz_check(f, None),
    ];
    if let Some(code) = run.verification("map.json", checks)? {
        return fail(run, code);
    }
    run.space("source.json", &source)?;
    run.space("target.json", &target)?;
    run.json("map.json", &MapFile::new(&source, &target, f))?;
    let d = walk.anchored_distances();
    let rows = d.iter().enumerate().map(|(i, &x)| vec![(i as i64 - b as i64).to_string(), x.to_string()]);
    run.bytes("anchored.csv", &table_csv(&["n", "distance"], rows)?)?;
    let msg = format!(
        "walk on [-{b}, {b}]: {} target vertices, spine range {}, max fiber {}",
        f.target.len(),
        walk.spine,
        f.measured_max_fiber
    );
    finish(run, msg)
}

fn build_bradyfarb(run: &mut Run, a: &BradyFarbArgs) -> Result<i32> {
    let thr = default_thr(a.sep, a.thr);
    let params = HdCoverParams {
        dim: a.dim,
        radius: a.ball,
        sep: a.sep,
        edge_threshold: thr,
        factor_sep: a.factor_sep,
        r: a.r,
    };
    let hd = hd_cover(&params)?;
    let source = SpaceManifest::hyperbolic(a.dim, a.ball, a.sep, thr);
    let factor = SpaceManifest::hyperbolic(2, a.ball, a.factor_sep, 2.0 * a.factor_sep);
    let dec = &hd.decomposition;
    let mut checks = vec![
        coverage_check(&hd.source, &dec.to_cover(), Some(dec), 1),
        colours_check(dec, a.dim),
        disjointness_check(&hd.source, dec),
    ];
    if let Some(f) = &hd.map {
        checks.push(fibers_check(f, None));
        checks.push(lipschitz_check(f, None));
    }
    if let Some(code) = run.verification("decomposition.json", checks)? {
        return fail(run, code);
    }
    run.space("space.json", &source)?;
    let prov = Provenance::new("hd_cover")
        .with("dim", a.dim)
        .with("r", a.r)
        .with("factor_sep", a.factor_sep);
    run.json("decomposition.json", &CoverFile::from_decomposition(&source, dec, prov))?;
    if let Some(f) = &hd.map {
        let target = SpaceManifest::product(vec![factor.clone(); a.dim - 1], Some(u32::MAX as u128));
        run.space("factor.json", &factor)?;
        run.json("map.json", &MapFile::new(&source, &target, f))?;
        let fprov = Provenance::new("h2_tiling_amplified").with("r", a.r);
        run.json(
            "factor_decomposition.json",
            &CoverFile::from_decomposition(&factor, &hd.factor_decomposition, fprov),
        )?;
    }
    let msg = format!(
        "{} source points, {} pieces in {} colours, claimed r {:.4}",
        hd.source.len(),
        dec.len(),
        dec.colours(),
        dec.r
    );
    finish(run, msg)
}

fn build_comb_cmd(run: &mut Run, a: &CombArgs) -> Result<i32> {
    let m = SpaceManifest::comb(a.d, a.extent);
    let space = m.build()?;
    let expected = comb_size(a.d, a.extent);
    let comps = crate::covers::connected_components(&space, &(0..space.len() as u32).collect::<Vec<_>>(), 1.0);
    let checks = vec![
        Check::new("size", space.len() as u128 == expected).value(json!({ "points": space.len(), "expected": expected })),
        Check::new("connected", comps.len() == 1).value(comps.len()),
    ];
    if let Some(code) = run.verification("space.json", checks)? {
        return fail(run, code);
    }
    run.space("space.json", &m)?;
    write_space_exports(run, &space, true)?;
    run.json("summary.json", &space_summary(&space, &m))?;
    finish(run, format!("comb of depth {} and extent {}: {} points", a.d, a.extent, space.len()))
}

fn build_product_cmd(run: &mut Run, a: &ProductArgs) -> Result<i32> {
    let factors = a
        .spaces
        .iter()
        .map(|s| load_space_ref(run, s))
        .collect::<Result<Vec<_>>>()?;
    let m = SpaceManifest::product(factors.clone(), None);
    let space = m.build()?;
    let mut checks = Vec::new();
    let mut product_dec = None;
    if !a.decomps.is_empty() {
        if factors.len() != 2 {
            return Err(Error::Arity(format!("product decomposition needs 2 factors, got {}", factors.len())));
        }
        let mut decs = Vec::new();
        for (path, fm) in a.decomps.iter().zip(&factors) {
            let (f, fs, dec) = load_decomposition(run, path)?;
            if f.space_ref != fm.hash() {
                return Err(Error::Schema(format!("{} does not decompose the given factor", path.display())));
            }
            decs.push((fs, dec));
        }
        let (m_dim, n_dim) = (decs[0].1.d, decs[1].1.d);
        let amplify = |fs: &SpaceGraph, mut dec: ColoredDecomposition, extra: u32| -> Result<ColoredDecomposition> {
            let n = dec.d;
            for _ in 0..extra {
                dec = kolmogorov_amplify(fs, &dec, n)?;
            }
            Ok(dec)
        };
        let dx = amplify(&decs[0].0, decs[0].1.clone(), n_dim)?;
        let dy = amplify(&decs[1].0, decs[1].1.clone(), m_dim)?;
        let dec = product_decomposition(&dx, &dy, &space)?;
        checks.push(coverage_check(&space, &dec.to_cover(), Some(&dec), 1));
        checks.push(colours_check(&dec, (m_dim + n_dim + 1) as usize));
        checks.push(disjointness_check(&space, &dec));
        product_dec = Some(dec);
    }
    if !checks.is_empty() {
        if let Some(code) = run.verification("decomposition.json", checks)? {
            return fail(run, code);
        }
    }
    run.space("space.json", &m)?;
    run.json("summary.json", &space_summary(&space, &m))?;
    if let Some(dec) = &product_dec {
        run.json(
            "decomposition.json",
            &CoverFile::from_decomposition(&m, dec, Provenance::new("product_decomposition")),
        )?;
    }
    let msg = match &product_dec {
        Some(d) => format!("{} points, {} product pieces in {} colours", space.len(), d.len(), d.colours()),
        None => format!("{} points", space.len()),
    };
    finish(run, msg)
}

fn build_nerve(run: &mut Run, a: &NerveArgs) -> Result<i32> {
    let f = load_cover_file(run, &a.cover)?;
    let space = f.load_space()?;
    let cover = f.to_cover();
    let nerve = nerve_map(&space, &cover)?;
    let bad = nerve.check(&space, &cover);
    let lipschitz = nerve.lipschitz(&space);
    let mut unity = Check::new("partition-of-unity", bad.is_empty()).value(bad.len());
    if let Some(&x) = bad.first() {
        unity = unity.witness(json!({ "point": x }));
    }
    let checks = vec![unity, Check::new("lipschitz", true).value(lipschitz)];
    if let Some(code) = run.verification("nerve.json", checks)? {
        return fail(run, code);
    }
    let file = NerveFile {
        version: VERSION,
        kind: "nerve".into(),
        space_ref: f.space_ref.clone(),
        cover_ref: hash_file(&a.cover)?,
        nerve,
        lipschitz,
    };
    run.json("nerve.json", &file)?;
    let msg = format!(
        "nerve of {} pieces: {} simplices, dimension {}, Lipschitz {:.4}",
        file.nerve.vertices.len(),
        file.nerve.simplices.len(),
        file.nerve.dimension,
        lipschitz
    );
    finish(run, msg)
}

/// A requested check: a name and `key=value` parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl CheckSpec {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.params
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Schema(format!("check {}: bad value {v:?} for {key}", self.name)))
            })
            .transpose()
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::Schema(format!("check {} needs {key}=…", self.name)))
    }
}

/// Parses `name[:k=v…]` items separated by commas; a bare `k=v` item
/// continues the previous check.
pub fn parse_checks(s: &str) -> Result<Vec<CheckSpec>> {
    let mut out: Vec<CheckSpec> = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let mut parts = item.split(':');
        let head = parts.next().unwrap_or_default();
        let (mut spec, rest): (CheckSpec, Vec<&str>) = if head.contains('=') {
            let Some(prev) = out.pop() else {
                return Err(Error::Schema(format!("parameter {head:?} without a check")));
            };
            (prev, std::iter::once(head).chain(parts).collect())
        } else {
            (
                CheckSpec {
                    name: head.to_string(),
                    params: BTreeMap::new(),
                },
                parts.collect(),
            )
        };
        for kv in rest {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Schema(format!("check parameter {kv:?} is not key=value")))?;
            spec.params.insert(k.to_string(), v.to_string());
        }
        out.push(spec);
    }
    if out.is_empty() {
        return Err(Error::Schema("no checks requested".into()));
    }
    Ok(out)
}

const COVER_CHECKS: &[&str] = &["coverage", "disjointness", "multiplicity", "partition", "colours"];
const MAP_CHECKS: &[&str] = &["fibers", "adjacent", "lipschitz", "anchored-log"];
const NERVE_CHECKS: &[&str] = &["partition-of-unity"];
const SPACE_CHECKS: &[&str] = &["connected", "degree"];

fn cmd_verify(run: &mut Run, a: &VerifyArgs) -> Result<i32> {
    let specs = parse_checks(&a.checks)?;
    let kind = artifact_kind(&a.target)?;
    let known = match kind.as_str() {
        "cover" | "decomposition" => COVER_CHECKS,
        "map" => MAP_CHECKS,
        "nerve" => NERVE_CHECKS,
        "space" => SPACE_CHECKS,
        other => return Err(Error::Schema(format!("cannot verify artifacts of kind {other}"))),
    };
    if let Some(s) = specs.iter().find(|s| !known.contains(&s.name.as_str())) {
        return Err(Error::Schema(format!(
            "unknown check {:?} for a {kind}; known: {}",
            s.name,
            known.join(", ")
        )));
    }
    let checks = match kind.as_str() {
        "cover" | "decomposition" => {
            let f = load_cover_file(run, &a.target)?;
            let space = f.load_space()?;
            verify_cover(&space, &f, &specs)?
        }
        "map" => {
            let f = load_map(run, &a.target)?;
            verify_map(&f, &specs)?
        }
        "nerve" => {
            run.input(&a.target)?;
            let f: NerveFile = read_json(&a.target)?;
            let bad: Vec<usize> = (0..f.nerve.coordinates.len())
                .filter(|&x| {
                    let c = &f.nerve.coordinates[x];
                    c.iter().any(|&(_, w)| w < 0.0) || (c.iter().map(|&(_, w)| w).sum::<f64>() - 1.0).abs() > 1e-9
                })
                .collect();
            let mut c = Check::new("partition-of-unity", bad.is_empty()).value(bad.len());
            if let Some(&x) = bad.first() {
                c = c.witness(json!({ "point": x }));
            }
            vec![c]
        }
        _ => {
            let m = load_space_ref(run, &a.target.display().to_string())?;
            let space = m.build()?;
            verify_space(&space, &specs)?
        }
    };
    let rep = VerificationReport::new(a.target.display().to_string(), checks);
    print_checks(&rep);
    run.json("verification.json", &rep)?;
    let passed = rep.passed();
    let n = rep.checks.len();
    let code = finish(run, format!("{} of {n} checks passed", rep.checks.iter().filter(|c| c.pass).count()))?;
    Ok(if passed { code } else { exit::FAILED })
}

fn verify_cover(space: &SpaceGraph, f: &CoverFile, specs: &[CheckSpec]) -> Result<Vec<Check>> {
    let cover = f.to_cover();
    let dec = if f.kind == "decomposition" {
        Some(f.to_decomposition()?)
    } else {
        None
    };
    let need_dec = |name: &str| Error::Schema(format!("check {name} needs a decomposition"));
    let mut out = Vec::new();
    for s in specs {
        out.push(match s.name.as_str() {
            "coverage" => coverage_check(space, &cover, dec.as_ref(), s.get("min")?.unwrap_or(1)),
            "disjointness" => disjointness_check(space, dec.as_ref().ok_or_else(|| need_dec(&s.name))?),
            "partition" => partition_check(space, &cover),
            "colours" => colours_check(dec.as_ref().ok_or_else(|| need_dec(&s.name))?, s.require("max")?),
            "multiplicity" => {
                let radius: f64 = s.require("R")?;
                let metric = match s.params.get("metric").map(String::as_str) {
                    None | Some("graph") => Metric::Graph,
                    Some("model") => Metric::Model,
                    Some(other) => return Err(Error::Schema(format!("unknown metric {other:?}"))),
                };
                let max: Option<usize> = s.get("max")?.or(dec.as_ref().map(|d| d.colours()));
                let mult = r_multiplicity(space, &cover, radius, metric);
                let name = format!(
                    "multiplicity:R={radius}:metric={}{}",
                    if metric == Metric::Graph { "graph" } else { "model" },
                    max.map(|m| format!(":max={m}")).unwrap_or_default()
                );
                Check::new(name, max.is_none_or(|m| mult.value <= m))
                    .value(mult.value)
                    .witness(&mult)
            }
            other => unreachable!("{other} filtered above"),
        });
    }
    Ok(out)
}

fn verify_map(f: &MapRecord, specs: &[CheckSpec]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in specs {
        out.push(match s.name.as_str() {
            "fibers" => fibers_check(f, s.get("max")?),
            "adjacent" => adjacent_check(f),
            "lipschitz" => lipschitz_check(f, s.get("max")?),
            "anchored-log" => {
                let anchor = match s.params.get("anchor") {
                    Some(p) => resolve_point(&f.source, p)?,
                    None => f.source.basepoint(),
                };
                anchored_log_check(f, anchor, s.get("c")?.unwrap_or(2.0), s.get("a")?.unwrap_or(6.0))
            }
            other => unreachable!("{other} filtered above"),
        });
    }
    Ok(out)
}

fn verify_space(space: &SpaceGraph, specs: &[CheckSpec]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in specs {
        out.push(match s.name.as_str() {
            "connected" => {
                let all: Vec<u32> = (0..space.len() as u32).collect();
                let comps = crate::covers::connected_components(space, &all, space.edge_threshold);
                Check::new("connected", comps.len() == 1).value(comps.len())
            }
            "degree" => {
                let max: usize = s.require("max")?;
                let bound = space.degree_histogram().len().saturating_sub(1);
                let mut c = Check::new(format!("degree:max={max}"), bound <= max).value(bound);
                if let Some(x) = (0..space.len()).find(|&x| space.degree(x) > max) {
                    c = c.witness(json!({ "point": x, "degree": space.degree(x) }));
                }
                c
            }
            other => unreachable!("{other} filtered above"),
        });
    }
    Ok(out)
}

fn bool_str(b: bool) -> String {
    b.to_string()
}

fn opt_str<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn growth_rows(g: &crate::analysis::GrowthReport) -> Vec<Vec<String>> {
    g.radii
        .iter()
        .zip(&g.counts)
        .zip(&g.truncated)
        .map(|((r, c), t)| vec![r.to_string(), c.to_string(), bool_str(*t)])
        .collect()
}

fn truncation_advice(what: &str, e: Error) -> Error {
    Error::Truncation(format!("{what}: {e}; enlarge the window or lower --rmin"))
}

fn analyze_growth(run: &mut Run, a: &GrowthArgs) -> Result<i32> {
    if let Some(space_arg) = &a.space {
        let m = load_space_ref(run, space_arg)?;
        let space = m.build()?;
        let center = resolve_point(&space, &a.center)?;
        let g = ball_growth(&space, center, a.rmax);
        let fit = fit_growth(&g, a.rmin).map_err(|e| truncation_advice("window growth", e))?;
        let g = g.with_fit(a.rmin);
        run.json("growth.json", &Report::new("growth", &g))?;
        run.bytes("growth.csv", &table_csv(&["radius", "count", "truncated"], growth_rows(&g))?)?;
        let msg = format!(
            "growth exponent {:.4} (residual {:.4}, {} radii) about point {center}",
            fit.exponent, fit.residual, fit.points
        );
        return finish(run, msg);
    }
    let path = a.decomp.as_ref().expect("clap requires --space or --decomp");
    let (_, space, dec) = load_decomposition(run, path)?;
    let pieces: Vec<usize> = match a.piece {
        Some(k) if k >= dec.len() => return Err(Error::Index { index: k, len: dec.len() }),
        Some(k) => vec![k],
        None => (0..dec.len()).collect(),
    };
    let mut g = BallGrowth::new(space.len());
    let mut member = vec![false; space.len()];
    let mut rows = Vec::new();
    let mut fitted = Vec::new();
    let mut curves = Vec::new();
    for &k in &pieces {
        let Some(rep) = piece_growth_with(&space, &dec.pieces[k], &mut g, &mut member, a.rmax) else {
            continue;
        };
        let fit = fit_growth(&rep, a.rmin).ok();
        if let Some(f) = &fit {
            fitted.push((f.exponent, k));
        }
        rows.push(vec![
            k.to_string(),
            dec.labels.get(k).cloned().unwrap_or_default(),
            dec.colour[k].to_string(),
            dec.pieces[k].len().to_string(),
            opt_str(fit.as_ref().map(|f| f.exponent)),
            opt_str(fit.as_ref().map(|f| f.residual)),
            opt_str(fit.as_ref().map(|f| f.points)),
            opt_str(rep.clean_radius()),
        ]);
        if pieces.len() == 1 {
            curves.push(rep.with_fit(a.rmin));
        }
    }
    if fitted.is_empty() {
        return Err(Error::Truncation(format!(
            "no piece has 4 untruncated radii ≥ {}; enlarge the window or lower --rmin",
            a.rmin
        )));
    }
    let max = fitted.iter().copied().max_by(|x, y| x.0.total_cmp(&y.0)).expect("nonempty");
    let body = json!({
        "pieces": pieces.len(),
        "fitted": fitted.len(),
        "r_min": a.rmin,
        "max_exponent": max.0,
        "max_piece": max.1,
        "curve": curves.first(),
    });
    run.json("growth.json", &Report::new("piece-growth", body))?;
    let header = ["piece", "label", "colour", "points", "exponent", "residual", "fit_points", "clean_radius"];
    run.bytes("growth.csv", &table_csv(&header, rows)?)?;
    let msg = format!(
        "{} of {} pieces fitted; max exponent {:.4} (piece {})",
        fitted.len(),
        pieces.len(),
        max.0,
        max.1
    );
    finish(run, msg)
}

fn analyze_distortion(run: &mut Run, a: &DistortionArgs) -> Result<i32> {
    let f = load_map(run, &a.map)?;
    let anchor = a.anchored.as_deref().map(|s| resolve_point(&f.source, s)).transpose()?;
    let opts = DistortionOptions {
        pair_cap: a.pairs,
        seed: run.seed(),
        anchor,
    };
    let prof = distortion_profile(&f, &opts);
    run.json("distortion.json", &Report::new("distortion", &prof))?;
    let header = ["lo", "hi", "pairs", "min", "max", "mean"];
    let rows = |b: &[crate::analysis::distortion::Bucket]| -> Vec<Vec<String>> {
        b.iter()
            .map(|b| {
                vec![
                    b.lo.to_string(),
                    b.hi.to_string(),
                    b.pairs.to_string(),
                    b.min.to_string(),
                    b.max.to_string(),
                    b.mean.to_string(),
                ]
            })
            .collect()
    };
    run.bytes("distortion.csv", &table_csv(&header, rows(&prof.buckets))?)?;
    let mut msg = format!(
        "{} pairs ({}); log constant {:.4}, envelope {:.4}, affine L {:.4} D {:.4}",
        prof.pairs,
        if prof.exhaustive { "exhaustive" } else { "sampled" },
        prof.log_fit.fitted_c,
        prof.log_fit.envelope_c,
        prof.affine.l,
        prof.affine.d
    );
    if let Some(an) = &prof.anchored {
        run.bytes("anchored.csv", &table_csv(&header, rows(&an.buckets))?)?;
        msg += &format!(
            "; anchored at {}: log constant {:.4}, envelope {:.4}",
            an.anchor, an.log_fit.fitted_c, an.log_fit.envelope_c
        );
    }
    finish(run, msg)
}

fn default_grid(space: &SpaceGraph) -> Vec<u64> {
    let b = space.basepoint();
    let reach = (0..space.len()).map(|x| space.dist(b, x)).fold(0.0, f64::max);
    std::iter::successors(Some(4u64), |m| Some(m * 2))
        .take_while(|&m| (m as f64) <= reach)
        .collect()
}

fn analyze_sublinearity(run: &mut Run, a: &SublinearityArgs) -> Result<i32> {
    let (space, pieces, source_desc): (Arc<SpaceGraph>, Vec<Vec<u32>>, String) = match (&a.cover, &a.map) {
        (Some(path), _) => {
            let f = load_cover_file(run, path)?;
            let space = Arc::new(f.load_space()?);
            (space, f.to_cover().pieces, format!("cover {}", path.display()))
        }
        (None, Some(path)) => {
            let f = load_map(run, path)?;
            let radius = a.ball_cover.expect("clap requires --ball-cover with --map");
            let balls = ball_cover(&f.target, radius);
            let pulled = pullback_cover(&f, &balls)?;
            let refined = refine_connected(&f.source, &pulled, f.source.edge_threshold);
            (
                f.source.clone(),
                refined.pieces,
                format!("pullback of the {radius}-ball cover along {}", path.display()),
            )
        }
        (None, None) => return Err(Error::Parameter("give --cover or --map".into())),
    };
    let basepoint = resolve_point(&space, &a.basepoint)?;
    let grid = if a.grid.is_empty() { default_grid(&space) } else { a.grid.clone() };
    if grid.is_empty() {
        return Err(Error::Truncation("window too small for any grid radius ≥ 4".into()));
    }
    let rep = radial_sublinearity(&space, &pieces, basepoint, &grid);
    if rep.truncated.iter().all(|&t| t) {
        return Err(Error::Truncation(
            "every grid radius is truncated by the window boundary; enlarge the window".into(),
        ));
    }
    run.json("sublinearity.json", &Report::new("sublinearity", &rep))?;
    let rows = (0..rep.m_grid.len()).map(|i| {
        vec![
            rep.m_grid[i].to_string(),
            rep.max_diam[i].to_string(),
            rep.ratio[i].to_string(),
            bool_str(rep.truncated[i]),
        ]
    });
    run.bytes("sublinearity.csv", &table_csv(&["m", "max_diam", "ratio", "truncated"], rows)?)?;
    let msg = format!(
        "{source_desc}: {} pieces, ratios {:?}, trend {:.4}, sublinear {}",
        pieces.len(),
        rep.ratio.iter().map(|r| (r * 1e4).round() / 1e4).collect::<Vec<_>>(),
        rep.trend,
        rep.consistent
    );
    finish(run, msg)
}

fn analyze_defect(run: &mut Run, a: &DefectArgs) -> Result<i32> {
    let (space, subset, what) = match (&a.decomp, &a.space) {
        (Some(path), _) => {
            let (_, space, dec) = load_decomposition(run, path)?;
            let k = a.piece.expect("clap requires --piece with --decomp");
            if k >= dec.len() {
                return Err(Error::Index { index: k, len: dec.len() });
            }
            let subset = dec.pieces[k].clone();
            (space, subset, format!("piece {k}"))
        }
        (None, Some(s)) => {
            let m = load_space_ref(run, s)?;
            let space = m.build()?;
            let x = a.horocycle.expect("clap requires --horocycle with --space");
            if space.halfspace_dim() != Some(2) {
                return Err(Error::Parameter("horocycle bands need an ℍ² space".into()));
            }
            let subset: Vec<u32> = (0..space.len())
                .filter(|&i| {
                    let c = space.coords(i);
                    c[0].abs() <= x && c[1].ln().abs() <= 1.0
                })
                .map(|i| i as u32)
                .collect();
            (space, subset, format!("horocycle band of half-length {x}"))
        }
        (None, None) => return Err(Error::Parameter("give --decomp/--piece or --space/--horocycle".into())),
    };
    let opts = DefectOptions {
        pair_cap: a.pairs,
        seed: run.seed(),
    };
    let rep = quasi_convexity_defect(&space, &subset, a.r, &opts)?;
    run.json("defect.json", &Report::new("defect", &rep))?;
    let row = vec![
        subset.len().to_string(),
        rep.defect.to_string(),
        rep.pairs.to_string(),
        bool_str(rep.exhaustive),
    ];
    run.bytes("defect.csv", &table_csv(&["points", "defect", "pairs", "exhaustive"], [row])?)?;
    let msg = format!(
        "{what}: {} points, defect {:.4} over {} pairs ({})",
        subset.len(),
        rep.defect,
        rep.pairs,
        if rep.exhaustive { "exhaustive" } else { "sampled" }
    );
    finish(run, msg)
}

fn analyze_escalation(run: &mut Run, a: &EscalationArgs) -> Result<i32> {
    let (_, space, dec) = load_decomposition(run, &a.decomp)?;
    let base = match a.base {
        Some(k) => k,
        None => {
            let b_pieces: Vec<usize> = (0..dec.len())
                .filter(|&k| dec.labels.get(k).is_some_and(|l| l.starts_with("B:")))
                .collect();
            let cands = if b_pieces.is_empty() { (0..dec.len()).collect() } else { b_pieces };
            central_piece(&space, &dec.pieces, cands).ok_or_else(|| Error::EmptySpace("no pieces".into()))?
        }
    };
    let rep = escalation(&space, &dec, base, a.s, a.m, a.rmin)?;
    run.json("escalation.json", &Report::new("escalation", &rep))?;
    let rows = rep.levels.iter().map(|l| {
        vec![
            l.m.to_string(),
            l.points.to_string(),
            l.pieces.to_string(),
            l.exponent.to_string(),
            l.residual.to_string(),
            l.fit_points.to_string(),
            l.clean_radius.to_string(),
        ]
    });
    let header = ["m", "points", "pieces", "exponent", "residual", "fit_points", "clean_radius"];
    run.bytes("escalation.csv", &table_csv(&header, rows)?)?;
    let msg = format!(
        "base piece {base}: exponents {:?}, non-decreasing {}",
        rep.exponents().iter().map(|e| (e * 1e4).round() / 1e4).collect::<Vec<_>>(),
        rep.non_decreasing()
    );
    finish(run, msg)
}

fn cmd_report(a: &ReportArgs) -> Result<i32> {
    if let Some(run_path) = &a.replay {
        return replay(run_path);
    }
    let dir = a.dir.as_ref().expect("clap requires a directory");
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.sort();
    for p in entries {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if p.extension().is_some_and(|e| e == "json") {
            say!("{name:<28} {}", summarize_json(&p).unwrap_or_else(|e| format!("unreadable: {e}")));
        } else if p.extension().is_some_and(|e| e == "csv") {
            let rows = fs::read_to_string(&p)?.lines().count().saturating_sub(1);
            say!("{name:<28} csv, {rows} rows");
        }
    }
    Ok(exit::OK)
}

fn summarize_json(path: &Path) -> Result<String> {
    let v: Value = serde_json::from_slice(&fs::read(path)?)?;
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or("?").to_string();
    let field = |k: &str| v.get(k).cloned().unwrap_or(Value::Null);
    Ok(match kind.as_str() {
        "verification" => {
            let checks = v["checks"].as_array().cloned().unwrap_or_default();
            let pass = checks.iter().filter(|c| c["pass"] == Value::Bool(true)).count();
            format!("verification, {pass}/{} checks passed", checks.len())
        }
        "space" => format!("space {} window {}", field("model"), field("window")),
        "space-summary" => format!("{} points, degree bound {}", field("points"), field("degree_bound")),
        "cover" | "decomposition" => format!(
            "{kind}, {} pieces{}",
            v["pieces"].as_array().map_or(0, Vec::len),
            v.get("r").map(|r| format!(", r {r}")).unwrap_or_default()
        ),
        "map" => format!(
            "map, {} pairs, Lipschitz {}, max fiber {}",
            v["pairs"].as_array().map_or(0, Vec::len),
            field("measured_lipschitz"),
            field("measured_max_fiber")
        ),
        "growth" => format!("growth, exponent {}", field("fitted_exponent")),
        "piece-growth" => format!("piece growth, max exponent {}", field("max_exponent")),
        "distortion" => format!("distortion, log constant {}", v["log_fit"]["fitted_c"]),
        "sublinearity" => format!("sublinearity, consistent {}", field("consistent")),
        "defect" => format!("defect {}", field("defect")),
        "escalation" => {
            let e: Vec<Value> = v["levels"]
                .as_array()
                .map(|l| l.iter().map(|x| x["exponent"].clone()).collect())
                .unwrap_or_default();
            format!("escalation, exponents {}", Value::Array(e))
        }
        "run" => format!("run of {}, {} outputs", field("command"), v["outputs"].as_array().map_or(0, Vec::len)),
        other => other.to_string(),
    })
}

/// `argv` with any `--out` option removed.
fn strip_out(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}

/// Re-runs a recorded command into a scratch directory and compares the
/// output hashes with the record.
fn replay(run_path: &Path) -> Result<i32> {
    let rec: RunManifest = read_json(run_path)?;
    if rec.kind != "run" {
        return Err(Error::Schema(format!("{}: not a run record", run_path.display())));
    }
    for i in &rec.inputs {
        let now = hash_file(Path::new(&i.path))?;
        if now != i.sha256 {
            say!("input {} changed since the run", i.path);
            return Ok(exit::FAILED);
        }
    }
    let scratch = std::env::temp_dir().join(format!("coarselab-replay-{}", std::process::id()));
    if scratch.exists() {
        fs::remove_dir_all(&scratch)?;
    }
    let mut argv = vec!["coarselab".to_string()];
    argv.extend(strip_out(&rec.argv));
    argv.push("--out".into());
    argv.push(scratch.display().to_string());
    let code = run(&argv);
    if code != exit::OK {
        say!("replay exited with {code}");
        return Ok(exit::FAILED);
    }
    let mut same = true;
    for o in &rec.outputs {
        let now = hash_file(&scratch.join(&o.path)).ok();
        let ok = now.as_deref() == Some(o.sha256.as_str());
        same &= ok;
        say!("{} {}", if ok { "MATCH" } else { "DIFF " }, o.path);
    }
    fs::remove_dir_all(&scratch)?;
    Ok(if same { exit::OK } else { exit::FAILED })
}
