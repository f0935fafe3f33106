//! Serializable file formats: graphs, bipartite specs, walks, matrices,
//! states, basis maps, and equivalence reports. All carry `"schema": 1`.

use std::collections::BTreeSet;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convert::EquivalenceReport;
use crate::error::{Error, Result};
use crate::graph::{BipartiteWalkSpec, Bijection, LabeledGraph};
use crate::reflection::{self, Polygon, Tessellation};
use crate::walk::{CoinAssignment, WalkState};

pub const SCHEMA_VERSION: u32 = 1;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

/// `{"schema": 1, "vertices": n, "edges": [[u, v], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphFile {
    pub fn from_graph(graph: &LabeledGraph) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            vertices: graph.vertex_count(),
            edges: graph.edges().to_vec(),
        }
    }

    pub fn to_graph(&self) -> Result<LabeledGraph> {
        LabeledGraph::from_edges(self.vertices, self.edges.clone())
    }
}

/// A coined walk: a graph plus a coin choice and optional marked vertices.
///
/// `coin` names the default coin at every vertex (`"grover"` unless given);
/// `coins` overrides single vertices with a named kind or an explicit matrix.
/// A nonempty `marked` list means the abstract search walk: `−I` on the
/// marked vertices, Grover elsewhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoinedWalkFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coins: Vec<CoinOverride>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub marked: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoinOverride {
    pub vertex: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

fn named_coin(kind: &str, d: usize) -> Result<Array2<Complex64>> {
    match kind {
        "grover" => Ok(reflection::grover(d)?.matrix().clone()),
        "hadamard" => {
            if d != 2 {
                return Err(Error::InvalidInput(format!(
                    "hadamard coin needs degree 2, vertex has degree {d}"
                )));
            }
            Ok(reflection::hadamard())
        }
        "identity" => Ok(crate::linalg::identity(d)),
        "minus_identity" => Ok(crate::linalg::identity(d).mapv(|z| -z)),
        "fourier" => Ok(reflection::fourier(d)),
        other => Err(Error::InvalidInput(format!("unknown coin kind '{other}'"))),
    }
}

impl CoinedWalkFile {
    pub fn to_graph(&self) -> Result<LabeledGraph> {
        LabeledGraph::from_edges(self.vertices, self.edges.clone())
    }

    pub fn marked_set(&self) -> crate::search::MarkedSet {
        crate::search::MarkedSet::new(self.marked.iter().copied())
    }

    /// Build the coin assignment; `marked` (if any) forces `−I` blocks.
    pub fn to_coins(&self, graph: &LabeledGraph) -> Result<CoinAssignment> {
        let default_kind = self.coin.as_deref().unwrap_or("grover");
        let marked: BTreeSet<usize> = self.marked.iter().copied().collect();
        let mut blocks = Vec::with_capacity(graph.vertex_count());
        for v in 0..graph.vertex_count() {
            let d = graph.degree(v);
            let block = if marked.contains(&v) {
                crate::linalg::identity(d).mapv(|z| -z)
            } else if let Some(over) = self.coins.iter().find(|o| o.vertex == v) {
                if let Some(matrix) = &over.matrix {
                    matrix_from_rows(matrix)?
                } else if let Some(kind) = &over.kind {
                    named_coin(kind, d)?
                } else {
                    named_coin(default_kind, d)?
                }
            } else if d == 0 {
                Array2::from_elem((0, 0), crate::linalg::C_ZERO)
            } else {
                named_coin(default_kind, d)?
            };
            blocks.push(block);
        }
        CoinAssignment::new(blocks)
    }

    pub fn from_parts(
        graph: &LabeledGraph,
        coins: &CoinAssignment,
        marked: &[usize],
    ) -> Self {
        let overrides = (0..graph.vertex_count())
            .map(|v| CoinOverride {
                vertex: v,
                kind: None,
                matrix: Some(matrix_to_rows(coins.block(v))),
            })
            .collect();
        Self {
            schema: SCHEMA_VERSION,
            vertices: graph.vertex_count(),
            edges: graph.edges().to_vec(),
            coin: None,
            coins: overrides,
            marked: marked.to_vec(),
        }
    }
}

/// Bipartite walk input. Omitted `p`/`q` weights are filled uniformly with
/// the row mass left unassigned; omitted phases are zero. `sinks` lists
/// `x`-rows that are all-zero in `P`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BipartiteFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub x: usize,
    pub y: usize,
    pub edges: Vec<BipartiteEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sinks: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BipartiteEdge {
    pub x: usize,
    pub y: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_prime: Option<f64>,
}

impl BipartiteFile {
    pub fn to_spec(&self) -> Result<BipartiteWalkSpec> {
        let (m, n) = (self.x, self.y);
        let sinks: BTreeSet<usize> = self.sinks.iter().copied().collect();
        let mut p = Array2::zeros((m, n));
        let mut q = Array2::zeros((n, m));
        let mut theta = Array2::zeros((m, n));
        let mut theta_prime = Array2::zeros((m, n));
        let mut any_theta = false;
        let mut any_theta_prime = false;
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.x >= m || e.y >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: if e.x >= m { e.x } else { e.y },
                    count: if e.x >= m { m } else { n },
                });
            }
            edges.push((e.x, e.y));
            if let Some(w) = e.p {
                if sinks.contains(&e.x) && w != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "sink row {} given nonzero p weight",
                        e.x
                    )));
                }
                p[[e.x, e.y]] = w;
            }
            if let Some(w) = e.q {
                q[[e.y, e.x]] = w;
            }
            if let Some(angle) = e.theta {
                theta[[e.x, e.y]] = angle;
                any_theta = any_theta || angle != 0.0;
            }
            if let Some(angle) = e.theta_prime {
                theta_prime[[e.x, e.y]] = angle;
                any_theta_prime = any_theta_prime || angle != 0.0;
            }
        }
        // Spread the unassigned row mass uniformly over edges without an
        // explicit weight; a fully explicit row passes through unchanged.
        fill_rows(&mut p, &edges, |&(x, _)| x, |&(_, y)| y, &sinks);
        fill_rows(&mut q, &edges, |&(_, y)| y, |&(x, _)| x, &BTreeSet::new());
        BipartiteWalkSpec::new(
            m,
            n,
            edges,
            p,
            q,
            any_theta.then_some(theta),
            any_theta_prime.then_some(theta_prime),
            sinks,
        )
    }

    pub fn from_spec(spec: &BipartiteWalkSpec) -> Self {
        let edges = spec
            .edges()
            .iter()
            .map(|&(x, y)| BipartiteEdge {
                x,
                y,
                p: Some(spec.p()[[x, y]]),
                q: Some(spec.q()[[y, x]]),
                theta: spec.theta().map(|t| t[[x, y]]),
                theta_prime: spec.theta_prime().map(|t| t[[x, y]]),
            })
            .collect();
        Self {
            schema: SCHEMA_VERSION,
            x: spec.x_count(),
            y: spec.y_count(),
            edges,
            sinks: spec.sinks().iter().copied().collect(),
        }
    }
}

fn fill_rows<F, G>(
    weights: &mut Array2<f64>,
    edges: &[(usize, usize)],
    row_of: F,
    col_of: G,
    skip: &BTreeSet<usize>,
) where
    F: Fn(&(usize, usize)) -> usize,
    G: Fn(&(usize, usize)) -> usize,
{
    let rows = weights.nrows();
    for row in 0..rows {
        if skip.contains(&row) {
            continue;
        }
        let incident: Vec<usize> = edges
            .iter()
            .filter(|e| row_of(e) == row)
            .map(&col_of)
            .collect();
        if incident.is_empty() {
            continue;
        }
        let assigned: f64 = incident.iter().map(|&c| weights[[row, c]]).sum();
        let missing: Vec<usize> = incident
            .iter()
            .copied()
            .filter(|&c| weights[[row, c]] == 0.0)
            .collect();
        if missing.is_empty() {
            continue;
        }
        let share = (1.0 - assigned) / missing.len() as f64;
        for c in missing {
            weights[[row, c]] = share;
        }
    }
}

/// Staggered walk input: graph plus the two polygon families. Polygons
/// without amplitudes are uniform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StaggeredWalkFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub alpha: Vec<PolygonFile>,
    pub beta: Vec<PolygonFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonFile {
    pub support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

impl PolygonFile {
    pub fn to_polygon(&self) -> Result<Polygon> {
        match &self.amplitudes {
            None => Polygon::uniform(self.support.clone()),
            Some(raw) => {
                let amplitudes = raw.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                Polygon::new(self.support.clone(), amplitudes)
            }
        }
    }

    pub fn from_polygon(polygon: &Polygon) -> Self {
        Self {
            support: polygon.support().to_vec(),
            amplitudes: Some(polygon.amplitudes().iter().map(|a| [a.re, a.im]).collect()),
        }
    }
}

impl StaggeredWalkFile {
    pub fn to_parts(&self) -> Result<(LabeledGraph, Tessellation, Tessellation)> {
        let graph = LabeledGraph::from_edges(self.vertices, self.edges.clone())?;
        let alpha = Tessellation::new(
            self.vertices,
            self.alpha
                .iter()
                .map(PolygonFile::to_polygon)
                .collect::<Result<_>>()?,
        )?;
        let beta = Tessellation::new(
            self.vertices,
            self.beta
                .iter()
                .map(PolygonFile::to_polygon)
                .collect::<Result<_>>()?,
        )?;
        Ok((graph, alpha, beta))
    }

    pub fn from_parts(graph: &LabeledGraph, alpha: &Tessellation, beta: &Tessellation) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            vertices: graph.vertex_count(),
            edges: graph.edges().to_vec(),
            alpha: alpha.polygons().iter().map(PolygonFile::from_polygon).collect(),
            beta: beta.polygons().iter().map(PolygonFile::from_polygon).collect(),
        }
    }
}

/// Dense complex matrix dump: row-major `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &Array2<Complex64>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            matrix: matrix_to_rows(m),
        }
    }

    pub fn to_matrix(&self) -> Result<Array2<Complex64>> {
        matrix_from_rows(&self.matrix)
    }
}

fn matrix_to_rows(m: &Array2<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[[i, j]].re, m[[i, j]].im]).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Array2<Complex64>> {
    let n = rows.len();
    for row in rows {
        if row.len() != rows[0].len() {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
    }
    let cols = if n == 0 { 0 } else { rows[0].len() };
    Ok(Array2::from_shape_fn((n, cols), |(i, j)| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// State dump: basis labels plus `[re, im]` amplitudes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub basis: Vec<String>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &WalkState) -> Self {
        let basis = (0..state.amplitudes().len())
            .map(|i| state.basis().label(i))
            .collect();
        let amplitudes = state.amplitudes().iter().map(|a| [a.re, a.im]).collect();
        Self {
            schema: SCHEMA_VERSION,
            basis,
            amplitudes,
        }
    }

    pub fn to_amplitudes(&self) -> Array1<Complex64> {
        Array1::from_iter(self.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)))
    }
}

/// Basis map dump: `map[i]` is the `(x, y)` pair of basis index `i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BijectionFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub x_count: usize,
    pub y_count: usize,
    pub map: Vec<(usize, usize)>,
}

impl BijectionFile {
    pub fn from_bijection(map: &Bijection) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            x_count: map.x_count(),
            y_count: map.y_count(),
            map: map.pairs().to_vec(),
        }
    }

    pub fn to_bijection(&self) -> Result<Bijection> {
        Bijection::new(self.x_count, self.y_count, self.map.clone())
    }
}

/// Equivalence report dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub max_abs_diff: f64,
    pub idle_dimension: usize,
    pub verdict: bool,
}

impl ReportFile {
    pub fn from_report(report: &EquivalenceReport) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            max_abs_diff: report.max_abs_diff,
            idle_dimension: report.idle_dimension,
            verdict: report.verdict,
        }
    }
}

/// Per-position probability trace CSV (`t,prob_v0,...`), one row per step.
pub fn probability_trace_csv(
    u: &Array2<Complex64>,
    psi0: &WalkState,
    steps: usize,
) -> Result<String> {
    if u.nrows() != psi0.amplitudes().len() {
        return Err(Error::DimensionMismatch {
            expected: psi0.amplitudes().len(),
            got: u.nrows(),
        });
    }
    let positions = psi0.basis().position_count();
    let mut header = String::from("t");
    for v in 0..positions {
        header.push_str(&format!(",prob_v{v}"));
    }
    header.push('\n');
    let mut out = header;
    let mut state = psi0.clone();
    for t in 0..=steps {
        if t > 0 {
            state = crate::walk::evolve(u, &state, 1)?;
        }
        out.push_str(&t.to_string());
        for p in state.vertex_probabilities() {
            out.push_str(&format!(",{p}"));
        }
        out.push('\n');
    }
    Ok(out)
}
