//! Evolution operators of the three walk models and state evolution.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{BipartiteWalkSpec, LabeledGraph};
use crate::linalg::{unitarity_residual, vector_norm, C_ONE, C_ZERO};
use crate::reflection::{tessellation_of, Polygon, ReflectionKind, ReflectionOperator};

/// Unitarity tolerance for coin blocks and constructed operators.
pub const UNITARY_TOL: f64 = 1e-12;

/// Norm tolerance for walk states.
pub const STATE_NORM_TOL: f64 = 1e-12;

/// Per-vertex coin blocks; their direct sum, in vertex order, is `C'`.
#[derive(Debug, Clone)]
pub struct CoinAssignment {
    blocks: Vec<Array2<Complex64>>,
}

impl CoinAssignment {
    /// Blocks must be square and unitary; sizes are checked against the graph
    /// by [`coined_evolution`].
    pub fn new(blocks: Vec<Array2<Complex64>>) -> Result<Self> {
        for (v, block) in blocks.iter().enumerate() {
            if block.nrows() != block.ncols() {
                return Err(Error::CoinSizeMismatch {
                    vertex: v,
                    expected: block.nrows(),
                    got: block.ncols(),
                });
            }
            let residual = unitarity_residual(block);
            if residual > UNITARY_TOL {
                return Err(Error::NonUnitaryBlock {
                    vertex: v,
                    residual,
                });
            }
        }
        Ok(Self { blocks })
    }

    /// The same coin at every vertex (the regular-graph form `I ⊗ C`).
    pub fn repeated(graph: &LabeledGraph, coin: &Array2<Complex64>) -> Result<Self> {
        Self::new(vec![coin.clone(); graph.vertex_count()])
    }

    /// Grover coin of matching dimension at every vertex.
    pub fn grover(graph: &LabeledGraph) -> Result<Self> {
        let blocks = (0..graph.vertex_count())
            .map(|v| {
                let d = graph.degree(v);
                if d == 0 {
                    Ok(Array2::from_elem((0, 0), C_ZERO))
                } else {
                    Ok(crate::reflection::grover(d)?.matrix().clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }

    pub fn vertex_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, v: usize) -> &Array2<Complex64> {
        &self.blocks[v]
    }

    pub fn blocks(&self) -> &[Array2<Complex64>] {
        &self.blocks
    }

    /// Total dimension of the direct sum.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.nrows()).sum()
    }

    /// The direct sum `C' = C_0 ⊕ C_1 ⊕ …`.
    pub fn direct_sum(&self) -> Array2<Complex64> {
        let n = self.dimension();
        let mut m = Array2::from_elem((n, n), C_ZERO);
        let mut offset = 0;
        for block in &self.blocks {
            let d = block.nrows();
            for i in 0..d {
                for j in 0..d {
                    m[[offset + i, offset + j]] = block[[i, j]];
                }
            }
            offset += d;
        }
        m
    }

    /// Product of two assignments, block by block.
    pub fn compose(&self, right: &CoinAssignment) -> Result<CoinAssignment> {
        if self.blocks.len() != right.blocks.len() {
            return Err(Error::DimensionMismatch {
                expected: self.blocks.len(),
                got: right.blocks.len(),
            });
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&right.blocks)
            .enumerate()
            .map(|(v, (a, b))| {
                if a.nrows() != b.nrows() {
                    return Err(Error::CoinSizeMismatch {
                        vertex: v,
                        expected: a.nrows(),
                        got: b.nrows(),
                    });
                }
                Ok(a.dot(b))
            })
            .collect::<Result<Vec<_>>>()?;
        CoinAssignment::new(blocks)
    }
}

/// Basis labeling of a walk state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Basis {
    /// Arcs `(v, j)` in the coined order; `arc_vertices[i]` is the vertex of arc `i`.
    Coined {
        vertex_count: usize,
        arc_vertices: Vec<usize>,
    },
    /// Product pairs `(x, y)`, row-major.
    Szegedy { x_count: usize, y_count: usize },
    /// Plain vertex basis (staggered walks).
    Vertices { count: usize },
}

impl Basis {
    pub fn coined(graph: &LabeledGraph) -> Basis {
        Basis::Coined {
            vertex_count: graph.vertex_count(),
            arc_vertices: (0..graph.arc_count()).map(|a| graph.arc_at(a).0).collect(),
        }
    }

    pub fn szegedy(spec: &BipartiteWalkSpec) -> Basis {
        Basis::Szegedy {
            x_count: spec.x_count(),
            y_count: spec.y_count(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Basis::Coined { arc_vertices, .. } => arc_vertices.len(),
            Basis::Szegedy { x_count, y_count } => x_count * y_count,
            Basis::Vertices { count } => *count,
        }
    }

    /// Number of positions probabilities aggregate over.
    pub fn position_count(&self) -> usize {
        match self {
            Basis::Coined { vertex_count, .. } => *vertex_count,
            Basis::Szegedy { x_count, .. } => *x_count,
            Basis::Vertices { count } => *count,
        }
    }

    /// Position of a basis index (vertex for coined, `x` for Szegedy).
    pub fn position_of(&self, index: usize) -> usize {
        match self {
            Basis::Coined { arc_vertices, .. } => arc_vertices[index],
            Basis::Szegedy { y_count, .. } => index / y_count,
            Basis::Vertices { .. } => index,
        }
    }

    /// Human-readable label of a basis index, used in state dumps.
    pub fn label(&self, index: usize) -> String {
        match self {
            Basis::Coined { arc_vertices, .. } => {
                let v = arc_vertices[index];
                let j = index
                    - arc_vertices
                        .iter()
                        .position(|&w| w == v)
                        .expect("vertex present");
                format!("({v},{j})")
            }
            Basis::Szegedy { y_count, .. } => {
                format!("({},{})", index / y_count, index % y_count)
            }
            Basis::Vertices { .. } => format!("{index}"),
        }
    }
}

/// Normalized complex amplitude vector over a labeled basis.
#[derive(Debug, Clone)]
pub struct WalkState {
    amplitudes: Array1<Complex64>,
    basis: Basis,
}

impl WalkState {
    pub fn new(amplitudes: Array1<Complex64>, basis: Basis) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::DimensionMismatch {
                expected: basis.dimension(),
                got: amplitudes.len(),
            });
        }
        let norm = vector_norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, basis })
    }

    /// Basis state `|index⟩`.
    pub fn basis_state(index: usize, basis: Basis) -> Result<Self> {
        let mut amplitudes = Array1::from_elem(basis.dimension(), C_ZERO);
        if index >= amplitudes.len() {
            return Err(Error::VertexOutOfRange {
                vertex: index,
                count: amplitudes.len(),
            });
        }
        amplitudes[index] = C_ONE;
        Self::new(amplitudes, basis)
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn norm(&self) -> f64 {
        vector_norm(&self.amplitudes)
    }

    /// Probability of each position: coined walks sum `|amp|²` over a vertex's
    /// arcs, Szegedy walks over `x`'s pairs, vertex bases are pointwise.
    pub fn vertex_probabilities(&self) -> Vec<f64> {
        let mut probs = vec![0.0; self.basis.position_count()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            probs[self.basis.position_of(i)] += amp.norm_sqr();
        }
        probs
    }
}

/// The flip-flop shift operator `S|v,j⟩ = |v',j'⟩` as an orthogonal
/// reflection; its polygons are the `|E|` matched arc pairs `(|v,j⟩+|v',j'⟩)/√2`.
pub fn shift_operator(graph: &LabeledGraph) -> ReflectionOperator {
    let n = graph.arc_count();
    let mut matrix = Array2::from_elem((n, n), C_ZERO);
    for a in 0..n {
        matrix[[graph.paired_arc(a), a]] = C_ONE;
    }
    let polygons: Vec<Polygon> = (0..graph.edge_count())
        .map(|e| {
            let (a, b) = graph.arcs_of_edge(e);
            Polygon::uniform(vec![a, b]).expect("arc pair is a valid polygon")
        })
        .collect();
    // The permutation matrix is the exact value of 2ΣΠ − I over the matched
    // pairs; keep the 0/1 entries rather than rebuilding from projectors.
    ReflectionOperator::from_parts(matrix, polygons, ReflectionKind::Orthogonal)
}

/// Coined evolution `U = S·C'`, with `C'` the direct sum of the coin blocks
/// in the basis order of the graph's arcs.
pub fn coined_evolution(graph: &LabeledGraph, coins: &CoinAssignment) -> Result<Array2<Complex64>> {
    if coins.vertex_count() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.vertex_count(),
            got: coins.vertex_count(),
        });
    }
    for v in 0..graph.vertex_count() {
        if coins.block(v).nrows() != graph.degree(v) {
            return Err(Error::CoinSizeMismatch {
                vertex: v,
                expected: graph.degree(v),
                got: coins.block(v).nrows(),
            });
        }
    }
    let shift = shift_operator(graph);
    Ok(shift.matrix().dot(&coins.direct_sum()))
}

/// The orthonormal vector families `{φ_x}` and `{ψ_y}` of a Szegedy walk.
///
/// `φ_x = Σ_y √p_xy e^{iθ_xy} |x,y⟩` over the `m·n` product basis; sink rows
/// contribute no `φ` vector. `ψ_y` is built from `q` and `θ'` the same way.
pub struct SzegedyVectors {
    pub phi: Vec<(usize, Array1<Complex64>)>,
    pub psi: Vec<Array1<Complex64>>,
}

pub fn szegedy_vectors(spec: &BipartiteWalkSpec) -> Result<SzegedyVectors> {
    let (m, n) = (spec.x_count(), spec.y_count());
    let dim = m * n;
    let mut phi = Vec::new();
    for x in 0..m {
        if spec.is_sink(x) {
            continue;
        }
        let sum: f64 = spec.p().row(x).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::RowNotStochastic {
                matrix: "P",
                row: x,
                sum,
            });
        }
        let mut v = Array1::from_elem(dim, C_ZERO);
        for y in 0..n {
            let w = spec.p()[[x, y]];
            if w > 0.0 {
                let angle = spec.theta().map_or(0.0, |t| t[[x, y]]);
                v[x * n + y] = Complex64::from_polar(w.sqrt(), angle);
            }
        }
        phi.push((x, v));
    }
    let mut psi = Vec::new();
    for y in 0..n {
        let mut v = Array1::from_elem(dim, C_ZERO);
        for x in 0..m {
            let w = spec.q()[[y, x]];
            if w > 0.0 {
                let angle = spec.theta_prime().map_or(0.0, |t| t[[x, y]]);
                v[x * n + y] = Complex64::from_polar(w.sqrt(), angle);
            }
        }
        psi.push(v);
    }
    Ok(SzegedyVectors { phi, psi })
}

/// The two Szegedy reflections `R₀ = 2Σ_x φφ† − I` and `R₁ = 2Σ_y ψψ† − I`.
pub fn szegedy_reflections(
    spec: &BipartiteWalkSpec,
) -> Result<(Array2<Complex64>, Array2<Complex64>)> {
    let vectors = szegedy_vectors(spec)?;
    let dim = spec.x_count() * spec.y_count();
    let mut r0 = Array2::from_elem((dim, dim), C_ZERO);
    for i in 0..dim {
        r0[[i, i]] = -C_ONE;
    }
    let mut r1 = r0.clone();
    for (_, v) in &vectors.phi {
        crate::linalg::add_twice_projector(&mut r0, v);
    }
    for v in &vectors.psi {
        crate::linalg::add_twice_projector(&mut r1, v);
    }
    Ok((r0, r1))
}

/// Szegedy evolution `W = R₁·R₀` on the `m·n` product basis. Non-edge basis
/// vectors are fixed pointwise (both reflections act as `−I` there).
pub fn szegedy_evolution(spec: &BipartiteWalkSpec) -> Result<Array2<Complex64>> {
    let (r0, r1) = szegedy_reflections(spec)?;
    Ok(r1.dot(&r0))
}

/// Which coverage condition a staggered product was validated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaggeredCoverage {
    /// Both factors orthogonal; tessellation union covers all edges.
    Edges,
    /// One factor partial; polygon supports jointly cover all vertices.
    Vertices,
}

/// A validated staggered evolution `U = U₁·U₀`.
#[derive(Debug)]
pub struct StaggeredWalk {
    pub matrix: Array2<Complex64>,
    pub coverage: StaggeredCoverage,
}

/// Build `U₁·U₀` after checking both factors tessellate `graph` and the
/// union satisfies the applicable coverage condition: all edges when both
/// reflections are orthogonal, all vertices when exactly one is partial.
pub fn staggered_evolution(
    u0: &ReflectionOperator,
    u1: &ReflectionOperator,
    graph: &LabeledGraph,
) -> Result<StaggeredWalk> {
    let t0 = tessellation_of(u0, graph)?;
    let t1 = tessellation_of(u1, graph)?;
    let coverage = match (u0.kind(), u1.kind()) {
        (ReflectionKind::Orthogonal, ReflectionKind::Orthogonal) => {
            let mut covered = vec![false; graph.edge_count()];
            for e in t0.covered_edges(graph).into_iter().chain(t1.covered_edges(graph)) {
                covered[e] = true;
            }
            let uncovered: Vec<usize> = (0..graph.edge_count()).filter(|&e| !covered[e]).collect();
            if !uncovered.is_empty() {
                return Err(Error::CoverageViolation {
                    detail: format!("edges not in either tessellation: {uncovered:?}"),
                });
            }
            StaggeredCoverage::Edges
        }
        (ReflectionKind::Partial, ReflectionKind::Partial) => {
            return Err(Error::CoverageViolation {
                detail: "both reflections are partial; at most one may be".into(),
            });
        }
        _ => {
            let mut covered = vec![false; graph.vertex_count()];
            for polygon in t0.polygons().iter().chain(t1.polygons()) {
                for &v in polygon.support() {
                    covered[v] = true;
                }
            }
            let uncovered: Vec<usize> =
                (0..graph.vertex_count()).filter(|&v| !covered[v]).collect();
            if !uncovered.is_empty() {
                return Err(Error::CoverageViolation {
                    detail: format!("vertices not in either tessellation: {uncovered:?}"),
                });
            }
            StaggeredCoverage::Vertices
        }
    };
    Ok(StaggeredWalk {
        matrix: u1.matrix().dot(u0.matrix()),
        coverage,
    })
}

/// Apply `U` to the state `t` times.
pub fn evolve(u: &Array2<Complex64>, state: &WalkState, t: usize) -> Result<WalkState> {
    if u.nrows() != state.amplitudes().len() || u.ncols() != state.amplitudes().len() {
        return Err(Error::DimensionMismatch {
            expected: state.amplitudes().len(),
            got: u.nrows(),
        });
    }
    let mut amplitudes = state.amplitudes().clone();
    for _ in 0..t {
        amplitudes = u.dot(&amplitudes);
    }
    Ok(WalkState {
        amplitudes,
        basis: state.basis().clone(),
    })
}
