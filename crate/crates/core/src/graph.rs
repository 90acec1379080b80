//! Graph data model and matrix construction.
//!
//! A [`Graph`] is the universal input object: string node identifiers,
//! nonnegative weighted edges, optional community labels and coordinates.
//! Matrices are built densely ([`SquareMatrix`]) for the eigensolver, or in
//! compressed sparse row form ([`SparseMatrix`]) for the iterative path on
//! large graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Node-labelled weighted graph.
///
/// Parallel edges are summed on construction. Undirected edges are stored
/// once per unordered pair with `source <= target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_ids: Vec<String>,
    directed: bool,
    edges: Vec<Edge>,
    communities: Option<Vec<String>>,
    coords: Option<Vec<(f64, f64)>>,
}

impl Graph {
    pub fn new<I>(node_ids: Vec<String>, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut seen = HashMap::with_capacity(node_ids.len());
        for (i, id) in node_ids.iter().enumerate() {
            if let Some(prev) = seen.insert(id.as_str(), i) {
                return Err(Error::input(format!(
                    "duplicate node id {id:?} at positions {prev} and {i}"
                )));
            }
        }
        let n = node_ids.len();
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (s, t, w) in edges {
            if s >= n || t >= n {
                return Err(Error::input(format!(
                    "edge ({s}, {t}) references a node outside 0..{n}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::input(format!(
                    "edge ({}, {}) has invalid weight {w}",
                    node_ids[s], node_ids[t]
                )));
            }
            let key = if directed || s <= t { (s, t) } else { (t, s) };
            *merged.entry(key).or_insert(0.0) += w;
        }
        let edges = merged
            .into_iter()
            .map(|((source, target), weight)| Edge {
                source,
                target,
                weight,
            })
            .collect();
        Ok(Graph {
            node_ids,
            directed,
            edges,
            communities: None,
            coords: None,
        })
    }

    /// Attach one community label per node.
    pub fn with_communities(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::input(format!(
                "{} community labels for {} nodes",
                labels.len(),
                self.node_count()
            )));
        }
        self.communities = Some(labels);
        Ok(self)
    }

    pub fn with_coords(mut self, coords: Vec<(f64, f64)>) -> Result<Self> {
        if coords.len() != self.node_count() {
            return Err(Error::input(format!(
                "{} coordinates for {} nodes",
                coords.len(),
                self.node_count()
            )));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn communities(&self) -> Option<&[String]> {
        self.communities.as_deref()
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.node_ids.iter().position(|n| n == id)
    }

    /// Distinct community labels in lexicographic order.
    pub fn community_labels(&self) -> Option<Vec<String>> {
        self.communities.as_ref().map(|labels| {
            labels
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Graph with nodes reordered so that `node_ids` are sorted
    /// lexicographically. Edge, label and coordinate data follow the nodes.
    pub fn canonicalized(&self) -> Graph {
        let mut order: Vec<usize> = (0..self.node_count()).collect();
        order.sort_by(|&a, &b| self.node_ids[a].cmp(&self.node_ids[b]));
        self.reordered(&order)
    }

    /// `order[new] = old`.
    fn reordered(&self, order: &[usize]) -> Graph {
        let mut new_index = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let node_ids = order.iter().map(|&o| self.node_ids[o].clone()).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| (new_index[e.source], new_index[e.target], e.weight));
        let mut g = Graph::new(node_ids, self.directed, edges)
            .expect("reordering a valid graph keeps it valid");
        g.communities = self
            .communities
            .as_ref()
            .map(|c| order.iter().map(|&o| c[o].clone()).collect());
        g.coords = self
            .coords
            .as_ref()
            .map(|c| order.iter().map(|&o| c[o]).collect());
        g
    }
}

/// Incremental graph construction keyed by string node ids.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    directed: bool,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, f64)>,
}

impl GraphBuilder {
    pub fn new(directed: bool) -> Self {
        GraphBuilder {
            directed,
            ..Default::default()
        }
    }

    pub fn add_node(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), i);
        i
    }

    pub fn add_edge(&mut self, source: &str, target: &str, weight: f64) {
        let s = self.add_node(source);
        let t = self.add_node(target);
        self.edges.push((s, t, weight));
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.ids
    }

    /// Build with nodes in insertion order.
    pub fn build(self) -> Result<Graph> {
        Graph::new(self.ids, self.directed, self.edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixMode {
    Adjacency,
    Laplacian,
    NormalizedLaplacian,
}

impl fmt::Display for MatrixMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixMode::Adjacency => "adjacency",
            MatrixMode::Laplacian => "laplacian",
            MatrixMode::NormalizedLaplacian => "normalized_laplacian",
        })
    }
}

/// Dense row-major n×n real matrix tagged with the graph representation it
/// holds.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<f64>,
    mode: MatrixMode,
}

impl SquareMatrix {
    pub fn zeros(n: usize, mode: MatrixMode) -> Self {
        SquareMatrix {
            n,
            entries: vec![0.0; n * n],
            mode,
        }
    }

    pub fn from_rows(mode: MatrixMode, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::from_row_major(mode, n, entries)
    }

    pub fn from_row_major(mode: MatrixMode, n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::input(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite entry at ({}, {})",
                pos / n,
                pos % n
            )));
        }
        Ok(SquareMatrix { n, entries, mode })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> MatrixMode {
        self.mode
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exact symmetry of mirrored entries.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `alpha * self`, same mode.
    pub fn scaled(&self, alpha: f64) -> SquareMatrix {
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().map(|v| v * alpha).collect(),
            mode: self.mode,
        }
    }

    /// `P A Pᵀ` where `perm[i]` is the new position of old index `i`.
    pub fn permuted(&self, perm: &[usize]) -> SquareMatrix {
        assert_eq!(perm.len(), self.n);
        let mut out = SquareMatrix::zeros(self.n, self.mode);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }
}

/// Adjacency matrix; parallel edge weights are summed, undirected edges are
/// mirrored and self-loops land on the diagonal.
pub fn build_adjacency(g: &Graph) -> SquareMatrix {
    let n = g.node_count();
    let mut a = SquareMatrix::zeros(n, MatrixMode::Adjacency);
    for e in g.edges() {
        let idx = e.source * n + e.target;
        a.entries[idx] += e.weight;
        if !g.is_directed() && e.source != e.target {
            let mirror = e.target * n + e.source;
            a.entries[mirror] += e.weight;
        }
    }
    a
}

fn require_adjacency(a: &SquareMatrix) -> Result<()> {
    if a.mode != MatrixMode::Adjacency {
        return Err(Error::Mode {
            expected: MatrixMode::Adjacency,
            found: a.mode,
        });
    }
    Ok(())
}

/// `L = D - A` with `D` the diagonal of row sums (out-degree for directed
/// graphs).
pub fn laplacian(a: &SquareMatrix) -> Result<SquareMatrix> {
    require_adjacency(a)?;
    let n = a.n;
    let degrees = a.row_sums();
    let mut l = SquareMatrix::zeros(n, MatrixMode::Laplacian);
    for (i, &degree) in degrees.iter().enumerate() {
        for j in 0..n {
            let d = if i == j { degree } else { 0.0 };
            l.set(i, j, d - a.get(i, j));
        }
    }
    Ok(l)
}

/// `I - D^{-1/2} A D^{-1/2}`. Zero-degree nodes get an all-zero row and
/// column, including the diagonal.
pub fn normalized_laplacian(a: &SquareMatrix) -> Result<SquareMatrix> {
    require_adjacency(a)?;
    let n = a.n;
    let inv_sqrt = inverse_sqrt_degrees(&a.row_sums());
    let mut l = SquareMatrix::zeros(n, MatrixMode::NormalizedLaplacian);
    for i in 0..n {
        for j in 0..n {
            let identity = if i == j && inv_sqrt[i] > 0.0 { 1.0 } else { 0.0 };
            l.set(i, j, identity - inv_sqrt[i] * a.get(i, j) * inv_sqrt[j]);
        }
    }
    Ok(l)
}

fn inverse_sqrt_degrees(degrees: &[f64]) -> Vec<f64> {
    degrees
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect()
}

/// Build the requested matrix representation of `g`.
pub fn build_matrix(g: &Graph, mode: MatrixMode) -> SquareMatrix {
    let a = build_adjacency(g);
    match mode {
        MatrixMode::Adjacency => a,
        MatrixMode::Laplacian => laplacian(&a).expect("adjacency input"),
        MatrixMode::NormalizedLaplacian => normalized_laplacian(&a).expect("adjacency input"),
    }
}

/// Compressed sparse row matrix used by the iterative eigensolver.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
    mode: MatrixMode,
}

impl SparseMatrix {
    /// Same entries as [`build_matrix`], without materializing n² values.
    pub fn from_graph(g: &Graph, mode: MatrixMode) -> SparseMatrix {
        let n = g.node_count();
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for e in g.edges() {
            *rows[e.source].entry(e.target).or_insert(0.0) += e.weight;
            if !g.is_directed() && e.source != e.target {
                *rows[e.target].entry(e.source).or_insert(0.0) += e.weight;
            }
        }
        let degrees: Vec<f64> = rows.iter().map(|r| r.values().sum()).collect();
        match mode {
            MatrixMode::Adjacency => {}
            MatrixMode::Laplacian => {
                for (i, row) in rows.iter_mut().enumerate() {
                    for v in row.values_mut() {
                        *v = -*v;
                    }
                    *row.entry(i).or_insert(0.0) += degrees[i];
                }
            }
            MatrixMode::NormalizedLaplacian => {
                let inv_sqrt = inverse_sqrt_degrees(&degrees);
                for (i, row) in rows.iter_mut().enumerate() {
                    for (&j, v) in row.iter_mut() {
                        *v = -inv_sqrt[i] * *v * inv_sqrt[j];
                    }
                    if inv_sqrt[i] > 0.0 {
                        *row.entry(i).or_insert(0.0) += 1.0;
                    }
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (j, v) in row {
                if v != 0.0 {
                    cols.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseMatrix {
            n,
            row_ptr,
            cols,
            values,
            mode,
        }
    }

    pub fn from_dense(m: &SquareMatrix) -> SparseMatrix {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for i in 0..m.n() {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != 0.0 {
                    cols.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseMatrix {
            n: m.n(),
            row_ptr,
            cols,
            values,
            mode: m.mode(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> MatrixMode {
        self.mode
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let mut entries: HashMap<(usize, usize), f64> = HashMap::with_capacity(self.nnz());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                entries.insert((i, j), v);
            }
        }
        entries
            .iter()
            .all(|(&(i, j), &v)| entries.get(&(j, i)) == Some(&v))
    }
}

/// Subgraph on the nodes carrying `label`, keeping only internal edges.
pub fn induced_subgraph(g: &Graph, label: &str) -> Result<Graph> {
    let labels = g
        .communities()
        .ok_or_else(|| Error::input("graph has no community labels"))?;
    let members: Vec<usize> = (0..g.node_count())
        .filter(|&i| labels[i] == label)
        .collect();
    if members.is_empty() {
        return Err(Error::input(format!("unknown community label {label:?}")));
    }
    let mut local = vec![usize::MAX; g.node_count()];
    for (new, &old) in members.iter().enumerate() {
        local[old] = new;
    }
    let ids = members.iter().map(|&i| g.node_ids()[i].clone()).collect();
    let edges = g
        .edges()
        .iter()
        .filter(|e| local[e.source] != usize::MAX && local[e.target] != usize::MAX)
        .map(|e| (local[e.source], local[e.target], e.weight));
    let mut sub = Graph::new(ids, g.is_directed(), edges)?
        .with_communities(vec![label.to_string(); members.len()])?;
    if let Some(coords) = g.coords() {
        sub = sub.with_coords(members.iter().map(|&i| coords[i]).collect())?;
    }
    Ok(sub)
}

/// Undirected unit-weight planted-partition graph with `communities` blocks
/// of `block_size` nodes. Deterministic for a fixed seed.
pub fn planted_partition(
    communities: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out > p_in {
        return Err(Error::input(format!(
            "planted partition needs 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}"
        )));
    }
    if communities == 0 || block_size == 0 {
        return Err(Error::input(
            "planted partition needs at least one community of at least one node",
        ));
    }
    let n = communities * block_size;
    let width = n.to_string().len();
    let label_width = communities.to_string().len();
    let ids: Vec<String> = (0..n).map(|i| format!("{i:0width$}")).collect();
    let labels: Vec<String> = (0..n)
        .map(|i| format!("C{:0label_width$}", i / block_size))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if i / block_size == j / block_size {
                p_in
            } else {
                p_out
            };
            let draw: f64 = rng.random();
            if draw < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::new(ids, false, edges)?.with_communities(labels)
}
