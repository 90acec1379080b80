//! Batch command-line front end.
//!
//! Each subcommand writes a JSON report plus CSV tables into `--output-dir`.
//! Floats are rounded to 12 significant digits and JSON keys are sorted, so
//! reruns on identical input produce byte-identical files.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::compare::{
    community_eigenvector_centrality, difference_report, fit_power, pagerank, power_grid,
    rescale, ComparisonReport, MadMode, PagerankOptions,
};
use crate::error::{Error, Result};
use crate::graph::{build_matrix, Graph, MatrixMode, SparseMatrix};
use crate::ingest::{
    attach_communities, load_contacts, load_edge_list, load_road_network, ContactOptions,
    ContactWeighting, EdgeListOptions, RoadOptions, RoadWeighting, SpeedUnit,
};
use crate::spectral::{
    centrality_from_spectrum, decompose, decompose_leading, eigengaps, eigenvector_centrality,
    select_k, DecomposeOptions, EigengapAnalysis, KSelection, LanczosOptions, LocalCentrality,
    Normalization, Spectrum,
};

pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_DEGENERATE: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Mode { .. } => EXIT_INPUT,
        Error::Numerical { .. } => EXIT_NUMERICAL,
        Error::DegenerateSpectrum { .. } => EXIT_DEGENERATE,
        Error::Io(_) => EXIT_IO,
    }
}

/// Machine-readable error object written to stderr.
pub fn error_object(e: &Error) -> Value {
    let mut obj = json!({ "kind": e.kind(), "message": e.to_string() });
    if let Error::Numerical { column: Some(c), .. } = e {
        obj["column"] = json!(c);
    }
    json!({ "error": obj })
}

#[derive(Debug, Parser)]
#[command(name = "localcent", version, about = "Local eigenvector centrality for weighted graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Ordered spectrum, eigengaps and the automatically selected k.
    Eigengaps(EigengapsArgs),
    /// Local eigenvector centrality per node.
    Centrality(CentralityArgs),
    /// Compare local centrality against reference centralities.
    Compare(CompareArgs),
    /// Load a dataset and write it back as normalized tables.
    Ingest(IngestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Edgelist,
    Contacts,
    Road,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Count,
    Duration,
    InverseOnePlusTime,
    InverseTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixArg {
    Adjacency,
    Laplacian,
    NormalizedLaplacian,
}

impl From<MatrixArg> for MatrixMode {
    fn from(m: MatrixArg) -> Self {
        match m {
            MatrixArg::Adjacency => MatrixMode::Adjacency,
            MatrixArg::Laplacian => MatrixMode::Laplacian,
            MatrixArg::NormalizedLaplacian => MatrixMode::NormalizedLaplacian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedUnitArg {
    Mph,
    Kmh,
    Ms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MadArg {
    CenterScale,
    ScaleOnly,
    None,
}

impl From<MadArg> for MadMode {
    fn from(m: MadArg) -> Self {
        match m {
            MadArg::CenterScale => MadMode::CenterScale,
            MadArg::ScaleOnly => MadMode::ScaleOnly,
            MadArg::None => MadMode::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    Community,
    Pagerank,
    Eigenvector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KArg(pub KSelection);

impl std::str::FromStr for KArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KArg(KSelection::Auto));
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(KArg(KSelection::Fixed(k))),
            _ => Err(format!("expected `auto` or a positive integer, got {s:?}")),
        }
    }
}

impl Serialize for KArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            KSelection::Auto => s.serialize_str("auto"),
            KSelection::Fixed(k) => s.serialize_u64(k as u64),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Edge list, contact log, or road edge table.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Edgelist)]
    pub format: Format,
    /// Road node table `id,lat,lon`.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// Community table `node_id,community`.
    #[arg(long)]
    pub communities: Option<PathBuf>,
    /// Treat edge-list rows as directed edges.
    #[arg(long)]
    pub directed: bool,
    /// Edge-list field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Contacts: count | duration. Roads: inverse-one-plus-time | inverse-time.
    #[arg(long, value_enum)]
    pub weighting: Option<Weighting>,
    /// Seconds per contact record for duration weighting.
    #[arg(long, default_value_t = 20.0)]
    pub resolution: f64,
    /// Unit for road rows without a unit column.
    #[arg(long, value_enum, default_value_t = SpeedUnitArg::Mph)]
    pub speed_unit: SpeedUnitArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_enum, default_value_t = MatrixArg::Adjacency)]
    pub matrix: MatrixArg,
    /// Symmetric matrices larger than this use the iterative solver.
    #[arg(long, default_value_t = 2000)]
    pub dense_limit: usize,
    /// Leading eigenpairs computed by the iterative solver.
    #[arg(long, default_value_t = 50)]
    pub eigenpairs: usize,
    /// Largest Krylov basis for the iterative solver.
    #[arg(long, default_value_t = 1500)]
    pub krylov_limit: usize,
    /// Seed of the iterative solver's start vector.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EigengapsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub spectrum: SpectrumArgs,
    /// Number of prominent gaps listed.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CentralityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub spectrum: SpectrumArgs,
    /// `auto` or a fixed number of eigenvectors.
    #[arg(long, default_value = "auto")]
    pub k: KArg,
    /// Apply the Hadamard-power rescaling with this exponent.
    #[arg(long)]
    pub rescale_p: Option<f64>,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub spectrum: SpectrumArgs,
    #[arg(long, default_value = "auto")]
    pub k: KArg,
    #[arg(long)]
    pub rescale_p: Option<f64>,
    /// Reference centralities computed from the input graph.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub against: Vec<Reference>,
    /// Precomputed `node_id,value` table used instead of local centrality.
    #[arg(long)]
    pub x_csv: Option<PathBuf>,
    /// Precomputed `node_id,value` reference table.
    #[arg(long)]
    pub y_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
    #[arg(long, value_enum, default_value_t = MadArg::CenterScale)]
    pub mad: MadArg,
    /// Search the rescaling power minimizing the distance to each reference.
    #[arg(long)]
    pub fit_power: bool,
    #[arg(long, default_value_t = 0.05)]
    pub p_step: f64,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IngestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub output_dir: PathBuf,
}

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn fmt12(x: f64) -> String {
    round12(x).to_string()
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = json!(round12(n.as_f64().expect("f64 number")));
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize")
}

fn write_json(dir: &Path, name: &str, mut report: Value) -> Result<()> {
    round_json(&mut report);
    let mut text = serde_json::to_string_pretty(&report).expect("serializable");
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join(name))?));
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn report_header(command: &str, config: &impl Serialize) -> Value {
    json!({
        "tool": { "name": "localcent", "version": env!("CARGO_PKG_VERSION") },
        "command": command,
        "config": to_json(config),
    })
}

/// Loaded input graph plus loader warnings.
pub struct Loaded {
    pub graph: Graph,
    pub warnings: Vec<String>,
    pub descriptor: Value,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

pub fn load_input(a: &InputArgs) -> Result<Loaded> {
    let input = a
        .input
        .as_deref()
        .ok_or_else(|| Error::input("--input is required"))?;
    let weighting_mismatch = |w: Weighting| {
        Error::input(format!("--weighting {w:?} does not apply to {:?} input", a.format))
    };
    let mut warnings = Vec::new();
    let graph = match a.format {
        Format::Edgelist => {
            if let Some(w) = a.weighting {
                return Err(weighting_mismatch(w));
            }
            if !a.delimiter.is_ascii() {
                return Err(Error::input("--delimiter must be an ASCII character"));
            }
            let opts = EdgeListOptions { directed: a.directed, delimiter: a.delimiter as u8 };
            let g = load_edge_list(open(input)?, &opts)?;
            match &a.communities {
                Some(path) => attach_communities(g, open(path)?)?,
                None => g,
            }
        }
        Format::Contacts => {
            let weighting = match a.weighting {
                None | Some(Weighting::Count) => ContactWeighting::Count,
                Some(Weighting::Duration) => ContactWeighting::Duration,
                Some(w) => return Err(weighting_mismatch(w)),
            };
            let opts = ContactOptions { weighting, resolution: a.resolution };
            let mut side = a.communities.as_deref().map(open).transpose()?;
            let net = load_contacts(
                open(input)?,
                side.as_mut().map(|f| f as &mut dyn std::io::Read),
                &opts,
            )?;
            warnings = net.warnings;
            net.graph
        }
        Format::Road => {
            let weighting = match a.weighting {
                None | Some(Weighting::InverseOnePlusTime) => RoadWeighting::InverseOnePlusTime,
                Some(Weighting::InverseTime) => RoadWeighting::InverseTime,
                Some(w) => return Err(weighting_mismatch(w)),
            };
            let speed_unit = match a.speed_unit {
                SpeedUnitArg::Mph => SpeedUnit::MilesPerHour,
                SpeedUnitArg::Kmh => SpeedUnit::KilometresPerHour,
                SpeedUnitArg::Ms => SpeedUnit::MetresPerSecond,
            };
            let nodes = a
                .nodes
                .as_deref()
                .ok_or_else(|| Error::input("road input needs --nodes"))?;
            let g = load_road_network(open(nodes)?, open(input)?, &RoadOptions { speed_unit, weighting })?;
            match &a.communities {
                Some(path) => attach_communities(g, open(path)?)?,
                None => g,
            }
        }
    };
    let descriptor = json!({
        "nodes": graph.node_count(),
        "edges": graph.edges().len(),
        "directed": graph.is_directed(),
        "total_weight": graph.total_weight(),
        "communities": graph.community_labels().map(|l| l.len()),
        "has_coordinates": graph.coords().is_some(),
        "warnings": warnings,
    });
    Ok(Loaded { graph, warnings, descriptor })
}

/// Dense decomposition, or the leading eigenpairs for large symmetric input.
/// A fixed `k` raises the number of computed pairs to at least `k + 10`.
pub fn analyse(g: &Graph, a: &SpectrumArgs, k: KSelection) -> Result<(Spectrum, String)> {
    let mode = MatrixMode::from(a.matrix);
    let n = g.node_count();
    let opts = DecomposeOptions::default();
    if n > a.dense_limit {
        let sparse = SparseMatrix::from_graph(g, mode);
        if sparse.is_symmetric() {
            let lanczos = LanczosOptions { max_dim: a.krylov_limit, seed: a.seed, ..Default::default() };
            let count = match k {
                KSelection::Auto => a.eigenpairs,
                KSelection::Fixed(k) => a.eigenpairs.max(k + 10),
            };
            let s = decompose_leading(&sparse, count, &opts, &lanczos)?;
            return Ok((s, "lanczos".into()));
        }
    }
    Ok((decompose(&build_matrix(g, mode), &opts)?, "dense".into()))
}

fn spectrum_json(s: &Spectrum, solver: &str) -> Value {
    json!({
        "solver": solver,
        "n": s.n,
        "computed": s.len(),
        "complete": s.complete,
        "eigenvalues": s.eigenvalues.iter().map(|l| [l.re, l.im]).collect::<Vec<_>>(),
        "max_residual": s.max_residual(),
        "deficiencies": to_json(&s.deficiencies),
    })
}

fn gaps_json(e: &EigengapAnalysis, top: usize) -> Value {
    json!({
        "gaps": e.gaps,
        "admissible": e.admissible,
        "search_bound": e.search_bound,
        "prominent": e.top(top).iter().map(|&(i, g)| json!({ "index": i, "gap": g })).collect::<Vec<_>>(),
    })
}

fn centrality_map(ids: &[String], values: &[f64]) -> BTreeMap<String, f64> {
    ids.iter().cloned().zip(values.iter().copied()).collect()
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn cmd_eigengaps(a: &EigengapsArgs) -> Result<()> {
    prepare_dir(&a.output_dir)?;
    let loaded = load_input(&a.input)?;
    let (s, solver) = analyse(&loaded.graph, &a.spectrum, KSelection::Auto)?;
    let gaps = eigengaps(&s)?;
    let selection = select_k(&gaps);
    let mut report = report_header("eigengaps", a);
    report["input"] = loaded.descriptor;
    report["spectrum"] = spectrum_json(&s, &solver);
    report["eigengaps"] = gaps_json(&gaps, a.top);
    match &selection {
        Ok(k) => {
            report["status"] = json!("ok");
            report["auto_k"] = json!(k);
        }
        Err(e) => {
            report["status"] = json!("degenerate");
            report["auto_k"] = Value::Null;
            report["reason"] = json!(e.to_string());
        }
    }
    write_json(&a.output_dir, "eigengaps.json", report)?;
    write_csv(
        &a.output_dir,
        "eigengaps.csv",
        &["index", "gap"],
        gaps.gaps.iter().enumerate().map(|(i, g)| vec![(i + 1).to_string(), fmt12(*g)]),
    )?;
    write_csv(
        &a.output_dir,
        "eigenvalues.csv",
        &["index", "re", "im"],
        s.eigenvalues
            .iter()
            .enumerate()
            .map(|(i, l)| vec![(i + 1).to_string(), fmt12(l.re), fmt12(l.im)]),
    )?;
    selection.map(|_| ())
}

/// Local centrality of the input graph honoring the spectrum flags.
fn local(g: &Graph, a: &SpectrumArgs, k: KSelection) -> Result<(LocalCentrality, Spectrum, EigengapAnalysis, String)> {
    let (s, solver) = analyse(g, a, k)?;
    let gaps = eigengaps(&s)?;
    let lc = centrality_from_spectrum(&s, &gaps, k)?;
    Ok((lc, s, gaps, solver))
}

fn write_centrality(dir: &Path, g: &Graph, values: &[f64]) -> Result<()> {
    write_csv(
        dir,
        "centrality.csv",
        &["node_id", "value"],
        g.node_ids().iter().zip(values).map(|(id, v)| vec![id.clone(), fmt12(*v)]),
    )?;
    if let Some(coords) = g.coords() {
        write_csv(
            dir,
            "plot.csv",
            &["node_id", "x", "y", "value"],
            g.node_ids()
                .iter()
                .zip(coords)
                .zip(values)
                .map(|((id, (x, y)), v)| vec![id.clone(), fmt12(*x), fmt12(*y), fmt12(*v)]),
        )?;
    }
    Ok(())
}

pub fn cmd_centrality(a: &CentralityArgs) -> Result<()> {
    prepare_dir(&a.output_dir)?;
    let loaded = load_input(&a.input)?;
    let g = &loaded.graph;
    let mut report = report_header("centrality", a);
    report["input"] = loaded.descriptor.clone();
    let (lc, s, gaps, solver) = match local(g, &a.spectrum, a.k.0) {
        Ok(r) => r,
        Err(Error::DegenerateSpectrum { reason, zero_vector }) => {
            let zeros = zero_vector.map_or_else(|| vec![0.0; g.node_count()], |z| z.values);
            report["status"] = json!("degenerate");
            report["reason"] = json!(reason);
            report["centrality"] = to_json(&centrality_map(g.node_ids(), &zeros));
            write_json(&a.output_dir, "centrality.json", report)?;
            write_centrality(&a.output_dir, g, &zeros)?;
            return Err(Error::DegenerateSpectrum { reason, zero_vector: None });
        }
        Err(e) => return Err(e),
    };
    let mut c = lc.centrality;
    if let Some(p) = a.rescale_p {
        c.values = rescale(&c.values, p)?;
        c.normalization = Normalization::HadamardPower(p);
    }
    report["status"] = json!("ok");
    report["spectrum"] = spectrum_json(&s, &solver);
    report["eigengaps"] = gaps_json(&gaps, 10);
    report["k_requested"] = json!(lc.k_requested);
    report["k_used"] = json!(c.k_used);
    report["selection_mode"] = to_json(&lc.selection_mode);
    report["nonzero_columns"] = json!(lc.v.nonzero_columns());
    report["warnings"] = to_json(&lc.warnings);
    report["normalization"] = to_json(&c.normalization);
    report["centrality"] = to_json(&centrality_map(g.node_ids(), &c.values));
    write_json(&a.output_dir, "centrality.json", report)?;
    write_centrality(&a.output_dir, g, &c.values)
}

/// `node_id,value` table, returned in the order of `ids` when given.
fn read_vector(path: &Path) -> Result<BTreeMap<String, f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let mut out = BTreeMap::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(Error::input(format!(
                "{} line {line}: expected node_id,value",
                path.display()
            )));
        }
        let value = match rec[1].parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ if row == 0 => continue,
            _ => {
                return Err(Error::input(format!(
                    "{} line {line}: value {:?} is not a finite number",
                    path.display(),
                    &rec[1]
                )))
            }
        };
        if out.insert(rec[0].to_string(), value).is_some() {
            return Err(Error::input(format!(
                "{} line {line}: duplicate node id {:?}",
                path.display(),
                &rec[0]
            )));
        }
    }
    Ok(out)
}

fn align(ids: &[String], table: &BTreeMap<String, f64>, what: &str) -> Result<Vec<f64>> {
    let missing: Vec<&str> = ids.iter().filter(|id| !table.contains_key(*id)).map(String::as_str).collect();
    let known: std::collections::HashSet<&str> = ids.iter().map(String::as_str).collect();
    let extra: Vec<&str> = table.keys().map(String::as_str).filter(|id| !known.contains(id)).collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::input(format!(
            "{what} node set differs: missing [{}], unexpected [{}]",
            missing.join(", "),
            extra.join(", ")
        )));
    }
    Ok(ids.iter().map(|id| table[id]).collect())
}

fn comparison_json(r: &ComparisonReport, fit: Option<&crate::compare::PowerFit>) -> Value {
    json!({
        "distance": r.distance,
        "normalization": to_json(&r.normalization),
        "x_mad": r.x_mad,
        "y_mad": r.y_mad,
        "quartiles": to_json(&r.quartiles),
        "fraction_within_one_mad": r.fraction_within_one_mad,
        "fitted_p": fit.map(|f| f.p),
        "fitted_distance": fit.map(|f| f.distance),
    })
}

pub fn cmd_compare(a: &CompareArgs) -> Result<()> {
    prepare_dir(&a.output_dir)?;
    let mode = MadMode::from(a.mad);
    let mut against = a.against.clone();
    against.sort();
    against.dedup();
    if against.is_empty() && a.y_csv.is_none() {
        against.push(Reference::Pagerank);
    }
    let needs_graph = a.x_csv.is_none() || !against.is_empty();
    let loaded = if needs_graph { Some(load_input(&a.input)?) } else { None };

    let mut report = report_header("compare", a);
    let (ids, x_raw) = match (&a.x_csv, &loaded) {
        (Some(path), _) => {
            let table = read_vector(path)?;
            let ids: Vec<String> = match &loaded {
                Some(l) => l.graph.node_ids().to_vec(),
                None => table.keys().cloned().collect(),
            };
            let x = align(&ids, &table, "--x-csv")?;
            report["x"] = json!({ "source": path.display().to_string() });
            (ids, x)
        }
        (None, Some(l)) => {
            let (lc, _, _, solver) = local(&l.graph, &a.spectrum, a.k.0)?;
            report["x"] = json!({
                "source": "local_eigenvector",
                "solver": solver,
                "k_requested": lc.k_requested,
                "k_used": lc.centrality.k_used,
                "selection_mode": to_json(&lc.selection_mode),
                "warnings": to_json(&lc.warnings),
            });
            (l.graph.node_ids().to_vec(), lc.centrality.values)
        }
        (None, None) => unreachable!("graph is loaded when x is computed"),
    };
    if let Some(l) = &loaded {
        report["input"] = l.descriptor.clone();
    }
    let x = match a.rescale_p {
        Some(p) => rescale(&x_raw, p)?,
        None => x_raw.clone(),
    };

    let mut references: Vec<(String, Vec<f64>)> = Vec::new();
    if let Some(path) = &a.y_csv {
        references.push(("y".into(), align(&ids, &read_vector(path)?, "--y-csv")?));
    }
    for r in &against {
        let g = &loaded.as_ref().expect("graph loaded for computed references").graph;
        let (name, values) = match r {
            Reference::Community => ("community", community_eigenvector_centrality(g)?.values),
            Reference::Pagerank => {
                let opts = PagerankOptions { damping: a.damping, ..Default::default() };
                ("pagerank", pagerank(&build_matrix(g, MatrixMode::Adjacency), &opts)?.values)
            }
            Reference::Eigenvector => (
                "eigenvector",
                eigenvector_centrality(&build_matrix(g, MatrixMode::Adjacency))?.values,
            ),
        };
        references.push((name.into(), values));
    }

    let grid = power_grid(a.p_step);
    if a.fit_power && !(a.p_step > 0.0 && a.p_step <= 1.0) {
        return Err(Error::input("--p-step must lie in (0, 1]"));
    }
    let mut comparisons = serde_json::Map::new();
    for (name, y) in &references {
        let r = difference_report(&ids, &x, y, mode)?;
        let fit = if a.fit_power { Some(fit_power(&x_raw, y, &grid, mode)?) } else { None };
        comparisons.insert(name.clone(), comparison_json(&r, fit.as_ref()));
        write_csv(
            &a.output_dir,
            &format!("diffs_{name}.csv"),
            &["node_id", "x", "y", "diff"],
            r.per_node_diff
                .iter()
                .map(|d| vec![d.node_id.clone(), fmt12(d.x), fmt12(d.y), fmt12(d.diff)]),
        )?;
        if let Some(f) = &fit {
            write_csv(
                &a.output_dir,
                &format!("fit_{name}.csv"),
                &["p", "distance"],
                f.curve.iter().map(|(p, d)| vec![fmt12(*p), fmt12(*d)]),
            )?;
        }
    }
    report["comparisons"] = Value::Object(comparisons);
    report["x"]["values"] = to_json(&centrality_map(&ids, &x));
    write_json(&a.output_dir, "compare.json", report)
}

pub fn cmd_ingest(a: &IngestArgs) -> Result<()> {
    prepare_dir(&a.output_dir)?;
    let loaded = load_input(&a.input)?;
    let g = &loaded.graph;
    let ids = g.node_ids();
    write_csv(
        &a.output_dir,
        "edges.csv",
        &["source", "target", "weight"],
        g.edges()
            .iter()
            .map(|e| vec![ids[e.source].clone(), ids[e.target].clone(), fmt12(e.weight)]),
    )?;
    let mut header = vec!["node_id"];
    if g.communities().is_some() {
        header.push("community");
    }
    if g.coords().is_some() {
        header.extend(["x", "y"]);
    }
    write_csv(
        &a.output_dir,
        "nodes.csv",
        &header,
        (0..g.node_count()).map(|i| {
            let mut row = vec![ids[i].clone()];
            if let Some(c) = g.communities() {
                row.push(c[i].clone());
            }
            if let Some(xy) = g.coords() {
                row.extend([fmt12(xy[i].0), fmt12(xy[i].1)]);
            }
            row
        }),
    )?;
    let mut report = report_header("ingest", a);
    report["input"] = loaded.descriptor;
    write_json(&a.output_dir, "ingest.json", report)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Eigengaps(a) => cmd_eigengaps(a),
        Command::Centrality(a) => cmd_centrality(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Ingest(a) => cmd_ingest(a),
    }
}

/// Parse arguments, run, report errors on stderr and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let mut stderr = std::io::stderr().lock();
            let _ = writeln!(stderr, "{}", error_object(&e));
            exit_code(&e)
        }
    }
}
