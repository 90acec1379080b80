//! Loaders for weighted edge lists, temporal contact logs and road-network
//! tables.
//!
//! Every loader returns a graph whose nodes are sorted lexicographically by
//! id, so permuting input rows never changes the result.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeListOptions {
    pub directed: bool,
    pub delimiter: u8,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            directed: false,
            delimiter: b',',
        }
    }
}

fn read_all(mut source: impl Read) -> Result<String> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    Ok(text)
}

fn csv_records(text: &str, delimiter: u8) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + '_ {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .delimiter(delimiter)
        .from_reader(text.as_bytes())
        .into_records()
        .filter_map(|r| match r {
            Ok(rec) if rec.iter().all(str::is_empty) => None,
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line());
                Some(Ok((line, rec)))
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                Some(Err(Error::input(format!("line {line}: {e}"))))
            }
        })
}

fn parse_number(field: &str, what: &str, line: u64) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::input(format!("line {line}: {what} {field:?} is not a finite number")))
}

/// A leading row whose numeric columns do not parse is a header.
fn is_header(rec: &csv::StringRecord, numeric_columns: &[usize], names: &[&str]) -> bool {
    let named = rec
        .iter()
        .next()
        .is_some_and(|f| names.iter().any(|n| f.eq_ignore_ascii_case(n)));
    let non_numeric = numeric_columns
        .iter()
        .any(|&c| rec.get(c).is_some_and(|f| f.parse::<f64>().is_err()));
    named || non_numeric
}

/// Rows `source,target[,weight]`; weight defaults to 1 and parallel edges
/// are summed.
pub fn load_edge_list(source: impl Read, opts: &EdgeListOptions) -> Result<Graph> {
    let text = read_all(source)?;
    let mut builder = GraphBuilder::new(opts.directed);
    for (row, item) in csv_records(&text, opts.delimiter).enumerate() {
        let (line, rec) = item?;
        if row == 0 && is_header(&rec, &[2], &["source", "src"]) {
            continue;
        }
        if !(2..=3).contains(&rec.len()) {
            return Err(Error::input(format!(
                "line {line}: expected source,target[,weight], got {} fields",
                rec.len()
            )));
        }
        let (s, t) = (&rec[0], &rec[1]);
        if s.is_empty() || t.is_empty() {
            return Err(Error::input(format!("line {line}: empty node id")));
        }
        let w = match rec.get(2) {
            Some(f) if !f.is_empty() => parse_number(f, "weight", line)?,
            _ => 1.0,
        };
        if w < 0.0 {
            return Err(Error::input(format!("line {line}: negative weight {w}")));
        }
        builder.add_edge(s, t, w);
    }
    Ok(builder.build()?.canonicalized())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ContactWeighting {
    /// Number of contact records per pair.
    #[default]
    Count,
    /// Cumulative contact time: records × temporal resolution.
    Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactOptions {
    pub weighting: ContactWeighting,
    /// Seconds represented by one contact record.
    pub resolution: f64,
}

impl Default for ContactOptions {
    fn default() -> Self {
        ContactOptions {
            weighting: ContactWeighting::Count,
            resolution: 20.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContactNetwork {
    pub graph: Graph,
    pub records: usize,
    pub warnings: Vec<String>,
}

fn assign_label(labels: &mut HashMap<String, String>, node: &str, label: &str, origin: &str) -> Result<()> {
    match labels.get(node) {
        Some(prev) if prev != label => Err(Error::input(format!(
            "{origin}: node {node:?} labelled both {prev:?} and {label:?}"
        ))),
        Some(_) => Ok(()),
        None => {
            labels.insert(node.to_string(), label.to_string());
            Ok(())
        }
    }
}

/// Temporal contact log `t i j [Ci Cj]`, flattened to an undirected graph.
///
/// `communities` is an optional `node_id,community` table. Labels may come
/// from either source but must agree; either every node is labelled or none.
pub fn load_contacts(
    contacts: impl Read,
    communities: Option<&mut dyn Read>,
    opts: &ContactOptions,
) -> Result<ContactNetwork> {
    if opts.resolution.is_nan() || opts.resolution <= 0.0 {
        return Err(Error::input("contact resolution must be positive"));
    }
    let text = read_all(contacts)?;
    let mut pairs: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut nodes: BTreeMap<String, ()> = BTreeMap::new();
    let mut labels: HashMap<String, String> = HashMap::new();
    let mut warnings = Vec::new();
    let mut records = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() || fields[0].starts_with('#') {
            continue;
        }
        if fields.len() != 3 && fields.len() != 5 {
            return Err(Error::input(format!(
                "line {line}: expected `t i j [Ci Cj]`, got {} fields",
                fields.len()
            )));
        }
        if fields[0].parse::<i64>().is_err() {
            return Err(Error::input(format!(
                "line {line}: timestamp {:?} is not an integer",
                fields[0]
            )));
        }
        let (i, j) = (fields[1], fields[2]);
        if fields.len() == 5 {
            assign_label(&mut labels, i, fields[3], &format!("line {line}"))?;
            assign_label(&mut labels, j, fields[4], &format!("line {line}"))?;
        }
        if i == j {
            warnings.push(format!("line {line}: self-contact of {i:?} skipped"));
            continue;
        }
        nodes.insert(i.to_string(), ());
        nodes.insert(j.to_string(), ());
        let key = if i < j { (i, j) } else { (j, i) };
        *pairs.entry((key.0.to_string(), key.1.to_string())).or_insert(0) += 1;
        records += 1;
    }

    if let Some(side) = communities {
        let table = read_all(side)?;
        let mut ignored = 0;
        for (row, item) in csv_records(&table, b',').enumerate() {
            let (line, rec) = item?;
            if row == 0 && is_header(&rec, &[], &["node_id", "id", "node"]) {
                continue;
            }
            if rec.len() != 2 || rec[0].is_empty() || rec[1].is_empty() {
                return Err(Error::input(format!(
                    "community table line {line}: expected node_id,community"
                )));
            }
            if !nodes.contains_key(&rec[0]) {
                ignored += 1;
                continue;
            }
            assign_label(&mut labels, &rec[0], &rec[1], &format!("community table line {line}"))?;
        }
        if ignored > 0 {
            warnings.push(format!(
                "{ignored} community table entries name nodes without contacts and were ignored"
            ));
        }
    }

    let mut builder = GraphBuilder::new(false);
    for id in nodes.keys() {
        builder.add_node(id);
    }
    let unit = match opts.weighting {
        ContactWeighting::Count => 1.0,
        ContactWeighting::Duration => opts.resolution,
    };
    for ((i, j), count) in &pairs {
        builder.add_edge(i, j, *count as f64 * unit);
    }
    let mut graph = builder.build()?;
    let labelled: Vec<Option<&String>> = graph.node_ids().iter().map(|id| labels.get(id)).collect();
    if labelled.iter().any(Option::is_some) {
        let missing: Vec<&str> = graph
            .node_ids()
            .iter()
            .zip(&labelled)
            .filter(|(_, l)| l.is_none())
            .map(|(id, _)| id.as_str())
            .collect();
        if !missing.is_empty() {
            return Err(Error::input(format!(
                "nodes without a community label: {}",
                missing.join(", ")
            )));
        }
        let labels = labelled.into_iter().map(|l| l.cloned().unwrap_or_default()).collect();
        graph = graph.with_communities(labels)?;
    }
    Ok(ContactNetwork {
        graph: graph.canonicalized(),
        records,
        warnings,
    })
}

/// Attach labels from a `node_id,community` table. Every node must be
/// labelled; entries for unknown nodes are ignored.
pub fn attach_communities(g: Graph, table: impl Read) -> Result<Graph> {
    let text = read_all(table)?;
    let mut labels: HashMap<String, String> = HashMap::new();
    for (row, item) in csv_records(&text, b',').enumerate() {
        let (line, rec) = item?;
        if row == 0 && is_header(&rec, &[], &["node_id", "id", "node"]) {
            continue;
        }
        if rec.len() != 2 || rec[0].is_empty() || rec[1].is_empty() {
            return Err(Error::input(format!(
                "community table line {line}: expected node_id,community"
            )));
        }
        assign_label(&mut labels, &rec[0], &rec[1], &format!("community table line {line}"))?;
    }
    let mut missing = Vec::new();
    let assigned: Vec<String> = g
        .node_ids()
        .iter()
        .map(|id| {
            labels.get(id).cloned().unwrap_or_else(|| {
                missing.push(id.as_str());
                String::new()
            })
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::input(format!(
            "nodes without a community label: {}",
            missing.join(", ")
        )));
    }
    g.with_communities(assigned)
}

/// Acceleration from standstill, m/s².
pub const ACCELERATION: f64 = 2.0;

/// Free-flow time floored by the time needed to cover `length` when
/// accelerating from rest.
pub fn travel_time(length: f64, speed: f64) -> f64 {
    (length / speed).max((2.0 * length / ACCELERATION).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SpeedUnit {
    #[serde(rename = "km/h")]
    KilometresPerHour,
    #[default]
    #[serde(rename = "mph")]
    MilesPerHour,
    #[serde(rename = "m/s")]
    MetresPerSecond,
}

impl SpeedUnit {
    pub fn parse(s: &str) -> Option<SpeedUnit> {
        match s.to_ascii_lowercase().replace(' ', "").as_str() {
            "km/h" | "kmh" | "kph" | "kmph" => Some(SpeedUnit::KilometresPerHour),
            "mph" | "mi/h" => Some(SpeedUnit::MilesPerHour),
            "m/s" | "mps" | "ms" => Some(SpeedUnit::MetresPerSecond),
            _ => None,
        }
    }

    pub fn to_metres_per_second(self, v: f64) -> f64 {
        match self {
            SpeedUnit::KilometresPerHour => v / 3.6,
            SpeedUnit::MilesPerHour => v * 0.44704,
            SpeedUnit::MetresPerSecond => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RoadWeighting {
    /// `1 / (1 + t)`
    #[default]
    InverseOnePlusTime,
    /// `1 / t`
    InverseTime,
}

impl RoadWeighting {
    pub fn weight(self, t: f64) -> f64 {
        match self {
            RoadWeighting::InverseOnePlusTime => 1.0 / (1.0 + t),
            RoadWeighting::InverseTime => 1.0 / t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RoadOptions {
    /// Unit for rows whose unit column is absent or empty.
    pub speed_unit: SpeedUnit,
    pub weighting: RoadWeighting,
}

/// Road network from a node table `id,lat,lon` and an edge table
/// `u,v,length_m,speed[,speed_unit]`.
///
/// The graph is undirected; duplicate links keep the fastest travel time.
/// Coordinates are attached as `(lon, lat)`.
pub fn load_road_network(nodes: impl Read, edges: impl Read, opts: &RoadOptions) -> Result<Graph> {
    let node_text = read_all(nodes)?;
    let mut coords: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for (row, item) in csv_records(&node_text, b',').enumerate() {
        let (line, rec) = item?;
        if row == 0 && is_header(&rec, &[1, 2], &[]) {
            continue;
        }
        if rec.len() != 3 || rec[0].is_empty() {
            return Err(Error::input(format!("node table line {line}: expected id,lat,lon")));
        }
        let lat = parse_number(&rec[1], "latitude", line)?;
        let lon = parse_number(&rec[2], "longitude", line)?;
        if coords.insert(rec[0].to_string(), (lon, lat)).is_some() {
            return Err(Error::input(format!(
                "node table line {line}: duplicate node id {:?}",
                &rec[0]
            )));
        }
    }

    let edge_text = read_all(edges)?;
    let mut times: BTreeMap<(String, String), f64> = BTreeMap::new();
    for (row, item) in csv_records(&edge_text, b',').enumerate() {
        let (line, rec) = item?;
        if row == 0 && is_header(&rec, &[2, 3], &[]) {
            continue;
        }
        if !(4..=5).contains(&rec.len()) {
            return Err(Error::input(format!(
                "edge table line {line}: expected u,v,length_m,speed[,speed_unit]"
            )));
        }
        let (u, v) = (&rec[0], &rec[1]);
        for end in [u, v] {
            if !coords.contains_key(end) {
                return Err(Error::input(format!(
                    "edge table line {line}: endpoint {end:?} is missing from the node table"
                )));
            }
        }
        let length = parse_number(&rec[2], "length", line)?;
        let speed = parse_number(&rec[3], "speed", line)?;
        let unit = match rec.get(4) {
            Some(f) if !f.is_empty() => SpeedUnit::parse(f).ok_or_else(|| {
                Error::input(format!("edge table line {line}: unknown speed unit {f:?}"))
            })?,
            _ => opts.speed_unit,
        };
        if length <= 0.0 || speed <= 0.0 {
            return Err(Error::input(format!(
                "edge table line {line}: length and speed must be positive (got {length}, {speed})"
            )));
        }
        let t = travel_time(length, unit.to_metres_per_second(speed));
        let key = if u <= v { (u, v) } else { (v, u) };
        times
            .entry((key.0.to_string(), key.1.to_string()))
            .and_modify(|best| *best = best.min(t))
            .or_insert(t);
    }

    let ids: Vec<String> = coords.keys().cloned().collect();
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let edges: Vec<(usize, usize, f64)> = times
        .iter()
        .map(|((u, v), &t)| (index[u.as_str()], index[v.as_str()], opts.weighting.weight(t)))
        .collect();
    let xy = coords.values().copied().collect();
    Graph::new(ids, false, edges)?.with_coords(xy)
}
