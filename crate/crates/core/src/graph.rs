//! Graphs, multigraphs, and bipartite walk specifications.
//!
//! [`LabeledGraph`] carries, besides the edge list, a deterministic per-vertex
//! labeling of incident arcs and the flip-flop arc pairing; this fixes the
//! computational basis `|v,j⟩` of coined walks once and for all. Parallel edges
//! and loops are kept as distinct edge ids so that clique contraction can
//! produce genuine multigraphs.

use std::collections::{BTreeMap, BTreeSet};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Undirected (multi)graph with per-vertex arc labels and flip-flop pairing.
///
/// At each vertex `v` the incident edge ids, sorted ascending, receive local
/// labels `0..d_v`. The arc `(v, j)` is the directed half of edge
/// `arc_labels[v][j]` leaving `v`; its flip-flop partner `(v', j')` is the half
/// of the same edge leaving the other endpoint. Arcs are indexed globally in
/// the order `(v_0,0), .., (v_0,d_0-1), (v_1,0), ..` which is also the coined
/// walk's basis order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    arc_labels: Vec<Vec<usize>>,
    arc_offsets: Vec<usize>,
    arc_pairing: Vec<usize>,
    loop_edges: Vec<usize>,
}

impl LabeledGraph {
    /// Build a labeled graph from an edge list, assigning arc labels by
    /// ascending edge id at every vertex.
    ///
    /// Any multigraph is accepted; loops are kept and flagged (see
    /// [`LabeledGraph::loop_edges`]).
    pub fn from_edges(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        count: vertex_count,
                    });
                }
            }
        }

        let mut arc_labels = vec![Vec::new(); vertex_count];
        let mut loop_edges = Vec::new();
        // Slots (v, j) of each edge, in the order the edge id was seen at its
        // endpoints. Iterating edges in id order keeps labels ascending.
        let mut edge_slots: Vec<[(usize, usize); 2]> = Vec::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            let ju = arc_labels[u].len();
            arc_labels[u].push(id);
            let jv = arc_labels[v].len();
            arc_labels[v].push(id);
            edge_slots.push([(u, ju), (v, jv)]);
            if u == v {
                loop_edges.push(id);
            }
        }

        let mut arc_offsets = Vec::with_capacity(vertex_count + 1);
        let mut total = 0;
        for labels in &arc_labels {
            arc_offsets.push(total);
            total += labels.len();
        }
        arc_offsets.push(total);

        let mut arc_pairing = vec![0; total];
        for [(u, ju), (v, jv)] in edge_slots {
            let a = arc_offsets[u] + ju;
            let b = arc_offsets[v] + jv;
            arc_pairing[a] = b;
            arc_pairing[b] = a;
        }

        Ok(Self {
            vertex_count,
            edges,
            arc_labels,
            arc_offsets,
            arc_pairing,
            loop_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.arc_labels[v].len()
    }

    /// Total number of arcs, `2|E|`; the coined walk's Hilbert-space dimension.
    pub fn arc_count(&self) -> usize {
        self.arc_pairing.len()
    }

    /// Global index of arc `(v, j)`.
    pub fn arc_index(&self, v: usize, j: usize) -> usize {
        debug_assert!(j < self.degree(v));
        self.arc_offsets[v] + j
    }

    /// Inverse of [`arc_index`](Self::arc_index): the `(v, j)` pair of a global arc.
    pub fn arc_at(&self, arc: usize) -> (usize, usize) {
        let v = match self.arc_offsets.binary_search(&arc) {
            Ok(mut i) => {
                // Skip degree-0 vertices sharing the same offset.
                while i + 1 < self.arc_offsets.len() && self.arc_offsets[i + 1] == arc {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        (v, arc - self.arc_offsets[v])
    }

    /// Flip-flop partner of a global arc.
    pub fn paired_arc(&self, arc: usize) -> usize {
        self.arc_pairing[arc]
    }

    /// Edge id traversed by arc `(v, j)`.
    pub fn edge_of_arc(&self, v: usize, j: usize) -> usize {
        self.arc_labels[v][j]
    }

    /// The two global arcs of an edge, sorted ascending.
    pub fn arcs_of_edge(&self, edge: usize) -> (usize, usize) {
        let (u, v) = self.edges[edge];
        let a = self.arc_index(u, self.arc_labels[u].iter().position(|&e| e == edge).unwrap());
        let b = if u == v {
            // Second slot of a loop.
            let j = self.arc_labels[v]
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e == edge)
                .map(|(j, _)| j)
                .nth(1)
                .unwrap();
            self.arc_index(v, j)
        } else {
            self.arc_index(v, self.arc_labels[v].iter().position(|&e| e == edge).unwrap())
        };
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Edge ids of loops, in ascending order.
    pub fn loop_edges(&self) -> &[usize] {
        &self.loop_edges
    }

    pub fn has_loops(&self) -> bool {
        !self.loop_edges.is_empty()
    }

    /// Whether `u` and `v` are joined by at least one edge (`u != v`).
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        self.arc_labels[u]
            .iter()
            .any(|&e| self.edges[e] == (u, v) || self.edges[e] == (v, u))
    }

    /// Replace every vertex by cliques over its arc labels, keeping original
    /// edges between the expanded endpoints.
    ///
    /// `cells[v]` partitions the labels `0..d_v`; each cell becomes a clique in
    /// the new graph. New vertices are the arcs of `self`, numbered by global
    /// arc index. Clique edges come first (vertices ascending, cells ascending,
    /// pairs lexicographic), then the inherited edges in original id order.
    pub fn expand_to_cliques(&self, cells: &[Vec<Vec<usize>>]) -> Result<LabeledGraph> {
        if cells.len() != self.vertex_count {
            return Err(Error::DimensionMismatch {
                expected: self.vertex_count,
                got: cells.len(),
            });
        }
        for (v, vertex_cells) in cells.iter().enumerate() {
            let d = self.degree(v);
            let mut seen = vec![false; d];
            for cell in vertex_cells {
                if cell.is_empty() {
                    return Err(Error::InvalidPartition {
                        vertex: v,
                        degree: d,
                        detail: "empty cell".into(),
                    });
                }
                for &j in cell {
                    if j >= d || seen[j] {
                        return Err(Error::InvalidPartition {
                            vertex: v,
                            degree: d,
                            detail: format!("label {j} out of range or repeated"),
                        });
                    }
                    seen[j] = true;
                }
            }
            if seen.iter().any(|&s| !s) {
                return Err(Error::InvalidPartition {
                    vertex: v,
                    degree: d,
                    detail: "labels not fully covered".into(),
                });
            }
        }

        let mut new_edges = Vec::new();
        for (v, vertex_cells) in cells.iter().enumerate() {
            for cell in vertex_cells {
                let mut sorted = cell.clone();
                sorted.sort_unstable();
                for i in 0..sorted.len() {
                    for j in i + 1..sorted.len() {
                        new_edges.push((
                            self.arc_index(v, sorted[i]),
                            self.arc_index(v, sorted[j]),
                        ));
                    }
                }
            }
        }
        for edge in 0..self.edge_count() {
            let (a, b) = self.arcs_of_edge(edge);
            new_edges.push((a, b));
        }
        LabeledGraph::from_edges(self.arc_count(), new_edges)
    }

    /// Collapse each support set to a single vertex, keeping one edge per
    /// cross-support edge (parallel edges preserved, internal edges dropped).
    ///
    /// `supports` must partition the vertices; the new vertex `k` stands for
    /// `supports[k]`. Returns the multigraph and the vertex-to-support map.
    pub fn contract_cliques(&self, supports: &[Vec<usize>]) -> Result<(LabeledGraph, Vec<usize>)> {
        let mut owner = vec![usize::MAX; self.vertex_count];
        for (k, support) in supports.iter().enumerate() {
            for &v in support {
                if v >= self.vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        count: self.vertex_count,
                    });
                }
                if owner[v] != usize::MAX {
                    return Err(Error::OverlappingSupports { index: k });
                }
                owner[v] = k;
            }
        }
        if let Some(v) = owner.iter().position(|&k| k == usize::MAX) {
            return Err(Error::UncoveredVertex { vertex: v });
        }

        let mut new_edges = Vec::new();
        for &(u, v) in &self.edges {
            let (a, b) = (owner[u], owner[v]);
            if a != b {
                new_edges.push((a.min(b), a.max(b)));
            }
        }
        let graph = LabeledGraph::from_edges(supports.len(), new_edges)?;
        Ok((graph, owner))
    }
}

/// Basis-index ↔ `(x, y)` pair correspondence, e.g. between line-graph
/// vertices and bipartite edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bijection {
    x_count: usize,
    y_count: usize,
    pairs: Vec<(usize, usize)>,
    index: BTreeMap<(usize, usize), usize>,
}

impl Bijection {
    pub fn new(x_count: usize, y_count: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, &(x, y)) in pairs.iter().enumerate() {
            if x >= x_count || y >= y_count {
                return Err(Error::VertexOutOfRange {
                    vertex: if x >= x_count { x } else { y },
                    count: if x >= x_count { x_count } else { y_count },
                });
            }
            if index.insert((x, y), i).is_some() {
                return Err(Error::MapNotInjective { index: i, x, y });
            }
        }
        Ok(Self {
            x_count,
            y_count,
            pairs,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn x_count(&self) -> usize {
        self.x_count
    }

    pub fn y_count(&self) -> usize {
        self.y_count
    }

    pub fn pair(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn index_of(&self, x: usize, y: usize) -> Option<usize> {
        self.index.get(&(x, y)).copied()
    }

    /// Row-major position of `pair(i)` in the `x_count·y_count` product basis.
    pub fn flat(&self, i: usize) -> usize {
        let (x, y) = self.pairs[i];
        x * self.y_count + y
    }

    /// Dimension of the product basis the pairs embed into.
    pub fn flat_dim(&self) -> usize {
        self.x_count * self.y_count
    }
}

/// Bipartite graph with right-stochastic weight matrices and optional phases.
///
/// `p` maps `X` to `Y` (one row per `x`), `q` maps `Y` to `X`. Rows of `q`
/// always sum to 1; rows of `p` sum to 1 unless the row is a registered sink,
/// in which case it is identically zero. Edges are stored sorted
/// lexicographically by `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteWalkSpec {
    x_count: usize,
    y_count: usize,
    edges: Vec<(usize, usize)>,
    p: Array2<f64>,
    q: Array2<f64>,
    theta: Option<Array2<f64>>,
    theta_prime: Option<Array2<f64>>,
    sinks: BTreeSet<usize>,
}

const ROW_SUM_TOL: f64 = 1e-9;

impl BipartiteWalkSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_count: usize,
        y_count: usize,
        mut edges: Vec<(usize, usize)>,
        p: Array2<f64>,
        q: Array2<f64>,
        theta: Option<Array2<f64>>,
        theta_prime: Option<Array2<f64>>,
        sinks: BTreeSet<usize>,
    ) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyEdgeSet);
        }
        for &(x, y) in &edges {
            if x >= x_count {
                return Err(Error::VertexOutOfRange {
                    vertex: x,
                    count: x_count,
                });
            }
            if y >= y_count {
                return Err(Error::VertexOutOfRange {
                    vertex: y,
                    count: y_count,
                });
            }
        }
        edges.sort_unstable();
        edges.dedup();
        for &s in &sinks {
            if s >= x_count {
                return Err(Error::VertexOutOfRange {
                    vertex: s,
                    count: x_count,
                });
            }
        }
        if p.dim() != (x_count, y_count) {
            return Err(Error::DimensionMismatch {
                expected: x_count * y_count,
                got: p.len(),
            });
        }
        if q.dim() != (y_count, x_count) {
            return Err(Error::DimensionMismatch {
                expected: x_count * y_count,
                got: q.len(),
            });
        }
        let edge_set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
        for x in 0..x_count {
            for y in 0..y_count {
                let on_edge = edge_set.contains(&(x, y));
                if !on_edge && (p[[x, y]] > 0.0 || q[[y, x]] > 0.0) {
                    return Err(Error::WeightOffEdge { x, y });
                }
            }
        }
        for x in 0..x_count {
            let sum: f64 = p.row(x).sum();
            if sinks.contains(&x) {
                if sum != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "sink row {x} of P must be all zero"
                    )));
                }
            } else if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowNotStochastic {
                    matrix: "P",
                    row: x,
                    sum,
                });
            }
        }
        for y in 0..y_count {
            let sum: f64 = q.row(y).sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowNotStochastic {
                    matrix: "Q",
                    row: y,
                    sum,
                });
            }
        }
        Ok(Self {
            x_count,
            y_count,
            edges,
            p,
            q,
            theta,
            theta_prime,
            sinks,
        })
    }

    /// Spec with uniform weights: `p_xy = 1/deg(x)`, `q_yx = 1/deg(y)`, no phases.
    pub fn uniform(x_count: usize, y_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut deg_x = vec![0usize; x_count];
        let mut deg_y = vec![0usize; y_count];
        let mut normalized = edges.clone();
        normalized.sort_unstable();
        normalized.dedup();
        for &(x, y) in &normalized {
            if x >= x_count || y >= y_count {
                // Defer precise reporting to `new`.
                return Self::new(
                    x_count,
                    y_count,
                    edges,
                    Array2::zeros((x_count, y_count)),
                    Array2::zeros((y_count, x_count)),
                    None,
                    None,
                    BTreeSet::new(),
                );
            }
            deg_x[x] += 1;
            deg_y[y] += 1;
        }
        let mut p = Array2::zeros((x_count, y_count));
        let mut q = Array2::zeros((y_count, x_count));
        for &(x, y) in &normalized {
            p[[x, y]] = 1.0 / deg_x[x] as f64;
            q[[y, x]] = 1.0 / deg_y[y] as f64;
        }
        Self::new(x_count, y_count, normalized, p, q, None, None, BTreeSet::new())
    }

    pub fn x_count(&self) -> usize {
        self.x_count
    }

    pub fn y_count(&self) -> usize {
        self.y_count
    }

    /// Edges sorted lexicographically by `(x, y)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.edges.binary_search(&(x, y)).is_ok()
    }

    pub fn p(&self) -> &Array2<f64> {
        &self.p
    }

    pub fn q(&self) -> &Array2<f64> {
        &self.q
    }

    pub fn theta(&self) -> Option<&Array2<f64>> {
        self.theta.as_ref()
    }

    pub fn theta_prime(&self) -> Option<&Array2<f64>> {
        self.theta_prime.as_ref()
    }

    pub fn sinks(&self) -> &BTreeSet<usize> {
        &self.sinks
    }

    pub fn is_sink(&self, x: usize) -> bool {
        self.sinks.contains(&x)
    }

    pub fn degree_x(&self, x: usize) -> usize {
        self.neighbors_of_x(x).count()
    }

    pub fn degree_y(&self, y: usize) -> usize {
        self.neighbors_of_y(y).count()
    }

    /// Neighbors of `x` in ascending `y` order.
    pub fn neighbors_of_x(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |&&(ex, _)| ex == x)
            .map(|&(_, y)| y)
    }

    /// Neighbors of `y` in ascending `x` order.
    pub fn neighbors_of_y(&self, y: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |&&(_, ey)| ey == y)
            .map(|&(x, _)| x)
    }

    /// Same spec with rows of `P` zeroed for `marked`, which become sinks.
    pub fn with_sinks(&self, marked: &BTreeSet<usize>) -> Result<Self> {
        for &x in marked {
            if x >= self.x_count {
                return Err(Error::VertexOutOfRange {
                    vertex: x,
                    count: self.x_count,
                });
            }
        }
        let mut p = self.p.clone();
        let mut sinks = self.sinks.clone();
        for &x in marked {
            p.row_mut(x).fill(0.0);
            sinks.insert(x);
        }
        Self::new(
            self.x_count,
            self.y_count,
            self.edges.clone(),
            p,
            self.q.clone(),
            self.theta.clone(),
            self.theta_prime.clone(),
            sinks,
        )
    }
}

/// Line graph of a bipartite graph, with the edge ↔ vertex bijection.
///
/// One vertex per bipartite edge, indexed lexicographically by `(x, y)`; two
/// vertices are adjacent iff their edges share an endpoint. Line-graph edges
/// are emitted shared-`x` cliques first (ascending `x`), then shared-`y`
/// cliques (ascending `y`) — the latter order is what later ties coin
/// directions to ascending `y`.
pub fn line_graph(spec: &BipartiteWalkSpec) -> Result<(LabeledGraph, Bijection)> {
    let pairs = spec.edges().to_vec();
    if pairs.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    let map = Bijection::new(spec.x_count(), spec.y_count(), pairs.clone())?;

    let mut edges = Vec::new();
    let mut by_x: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut by_y: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(x, y)) in pairs.iter().enumerate() {
        by_x.entry(x).or_default().push(i);
        by_y.entry(y).or_default().push(i);
    }
    for group in by_x.values().chain(by_y.values()) {
        for a in 0..group.len() {
            for b in a + 1..group.len() {
                edges.push((group[a], group[b]));
            }
        }
    }
    let graph = LabeledGraph::from_edges(pairs.len(), edges)?;
    Ok((graph, map))
}
