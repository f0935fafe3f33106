//! Unitary+Hermitian operators as (partial) orthogonal reflections, and the
//! tessellations their `(+1)`-eigenvectors induce.
//!
//! An orthogonal reflection is `U = 2·Σ_x |ψ_x⁺⟩⟨ψ_x⁺| − I` where the
//! `(+1)`-eigenvectors have pairwise disjoint supports and their sum has no
//! zero entry. Each eigenvector's support is a *polygon*; the polygon family
//! is a *tessellation* of any graph in which every polygon induces a clique.
//! Dropping the everything-covered condition gives a *partial* reflection
//! (at the extreme, `−I` has no polygons at all).

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::linalg::{
    self, add_twice_projector, hermitian_residual, identity, involution_residual, C_ONE, C_ZERO,
};

/// Default tolerance for reflection classification and construction.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Whether a reflection's polygons cover every basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionKind {
    Orthogonal,
    Partial,
}

/// A unit vector with recorded support; its support induces a clique.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    support: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl Polygon {
    /// Polygon from parallel support/amplitude lists. The support is sorted;
    /// amplitudes follow it. All amplitudes must be nonzero and the vector
    /// unit norm within `tol`.
    pub fn new(support: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if support.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                got: amplitudes.len(),
            });
        }
        if support.is_empty() {
            return Err(Error::InvalidInput("empty polygon support".into()));
        }
        let mut paired: Vec<(usize, Complex64)> =
            support.into_iter().zip(amplitudes).collect();
        paired.sort_by_key(|&(i, _)| i);
        for w in paired.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!(
                    "repeated index {} in polygon support",
                    w[0].0
                )));
            }
        }
        if paired.iter().any(|&(_, a)| a == C_ZERO) {
            return Err(Error::InvalidInput(
                "zero amplitude on polygon support".into(),
            ));
        }
        let (support, amplitudes) = paired.into_iter().unzip();
        Ok(Self {
            support,
            amplitudes,
        })
    }

    /// Uniform real polygon `(Σ_i |i⟩)/√k` over the given support.
    pub fn uniform(support: Vec<usize>) -> Result<Self> {
        let k = support.len();
        let amp = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
        Self::new(support, vec![amp; k])
    }

    /// Support indices, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Amplitudes aligned with [`support`](Self::support).
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Dense vector in an `n`-dimensional space.
    pub fn vector(&self, n: usize) -> Array1<Complex64> {
        let mut v = Array1::from_elem(n, C_ZERO);
        for (&i, &a) in self.support.iter().zip(&self.amplitudes) {
            v[i] = a;
        }
        v
    }

    /// Multiply all amplitudes so the first support entry is real positive.
    pub fn phase_normalized(&self) -> Polygon {
        let first = self.amplitudes[0];
        let scale = first.conj() / first.norm();
        Polygon {
            support: self.support.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * scale).collect(),
        }
    }
}

/// Dense Hermitian involution together with its extracted `(+1)` polygons.
#[derive(Debug, Clone)]
pub struct ReflectionOperator {
    matrix: Array2<Complex64>,
    polygons: Vec<Polygon>,
    kind: ReflectionKind,
}

impl ReflectionOperator {
    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn kind(&self) -> ReflectionKind {
        self.kind
    }

    pub fn is_orthogonal(&self) -> bool {
        self.kind == ReflectionKind::Orthogonal
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Polygon family as a tessellation (clique validity is checked against a
    /// graph by [`tessellation_of`]).
    pub fn to_tessellation(&self) -> Tessellation {
        Tessellation {
            dimension: self.dimension(),
            polygons: self.polygons.clone(),
        }
    }

    /// Assemble from parts that satisfy the reflection invariants by
    /// construction, keeping the matrix exact (no projector round-off).
    pub(crate) fn from_parts(
        matrix: Array2<Complex64>,
        polygons: Vec<Polygon>,
        kind: ReflectionKind,
    ) -> Self {
        Self {
            matrix,
            polygons,
            kind,
        }
    }
}

fn kind_from_coverage(n: usize, polygons: &[Polygon]) -> ReflectionKind {
    let covered: usize = polygons.iter().map(Polygon::len).sum();
    if covered == n {
        ReflectionKind::Orthogonal
    } else {
        ReflectionKind::Partial
    }
}

/// The Grover operator `2|ψ⟩⟨ψ| − I` over `d` directions, `ψ` uniform.
pub fn grover(d: usize) -> Result<ReflectionOperator> {
    if d == 0 {
        return Err(Error::InvalidInput("Grover operator needs d >= 1".into()));
    }
    let off = 2.0 / d as f64;
    let mut matrix = Array2::from_elem((d, d), Complex64::new(off, 0.0));
    for i in 0..d {
        matrix[[i, i]] = Complex64::new(off - 1.0, 0.0);
    }
    let polygon = Polygon::uniform((0..d).collect())?;
    Ok(ReflectionOperator {
        matrix,
        polygons: vec![polygon],
        kind: ReflectionKind::Orthogonal,
    })
}

/// `2·Σ |ψ⟩⟨ψ| − I` from unit vectors with pairwise disjoint supports.
pub fn reflection_from_polygons(n: usize, polygons: Vec<Polygon>) -> Result<ReflectionOperator> {
    let mut seen = vec![false; n];
    for (k, polygon) in polygons.iter().enumerate() {
        let norm = polygon.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NonUnitVector { index: k, norm });
        }
        for &i in polygon.support() {
            if i >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: i,
                    count: n,
                });
            }
            if seen[i] {
                return Err(Error::OverlappingSupports { index: k });
            }
            seen[i] = true;
        }
    }
    let mut matrix = Array2::from_elem((n, n), C_ZERO);
    for i in 0..n {
        matrix[[i, i]] = -C_ONE;
    }
    for polygon in &polygons {
        add_twice_projector(&mut matrix, &polygon.vector(n));
    }
    let kind = kind_from_coverage(n, &polygons);
    Ok(ReflectionOperator {
        matrix,
        polygons,
        kind,
    })
}

/// Check that `u` is a Hermitian involution and extract its polygons.
///
/// Forms the projector `Π = (U + I)/2`, splits the indices into connected
/// components of its nonzero pattern, and demands each non-vanishing block be
/// rank 1 (all 2×2 minors below `tol`). The block's vector, phase-normalized
/// to a real positive leading entry, is the polygon. Components on which `Π`
/// vanishes contribute no polygon; full coverage decides the kind.
pub fn classify_reflection(u: &Array2<Complex64>, tol: f64) -> Result<ReflectionOperator> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.ncols(),
        });
    }
    let herm = hermitian_residual(u);
    if herm > tol {
        return Err(Error::NotReflection {
            detail: format!("not Hermitian (residual {herm:.3e})"),
        });
    }
    let invol = involution_residual(u);
    if invol > tol {
        return Err(Error::NotReflection {
            detail: format!("square is not the identity (residual {invol:.3e})"),
        });
    }

    let mut proj = (u + &identity(n)).mapv(|z| z * 0.5);
    // Symmetrize so the component structure is exactly symmetric.
    proj = (&proj + &linalg::adjoint(&proj)).mapv(|z| z * 0.5);

    let components = nonzero_components(&proj, tol);
    let mut polygons = Vec::new();
    for component in components {
        let block_trace: f64 = component.iter().map(|&i| proj[[i, i]].re).sum();
        if component.len() == 1 && block_trace.abs() <= tol {
            continue;
        }
        // Rank-1 test: every 2×2 minor of the block must vanish.
        for (ai, &i) in component.iter().enumerate() {
            for &j in &component[ai + 1..] {
                for (ak, &k) in component.iter().enumerate() {
                    for &l in &component[ak + 1..] {
                        let minor = proj[[i, k]] * proj[[j, l]] - proj[[i, l]] * proj[[j, k]];
                        if minor.norm() > tol {
                            return Err(Error::NotReflection {
                                detail: format!(
                                    "(+1)-eigenspace block on indices {component:?} has rank >= 2"
                                ),
                            });
                        }
                    }
                }
            }
        }
        if (block_trace - 1.0).abs() > tol * component.len() as f64 {
            return Err(Error::NotReflection {
                detail: format!(
                    "(+1)-eigenspace block on indices {component:?} has trace {block_trace:.6}, expected 1"
                ),
            });
        }
        // Rank-1 projector block = ψψ†; recover ψ from the strongest column.
        let pivot = *component
            .iter()
            .max_by(|&&a, &&b| proj[[a, a]].re.total_cmp(&proj[[b, b]].re))
            .unwrap();
        let scale = proj[[pivot, pivot]].re.sqrt();
        let amplitudes: Vec<Complex64> = component
            .iter()
            .map(|&i| proj[[i, pivot]] / scale)
            .collect();
        if amplitudes.contains(&C_ZERO) {
            return Err(Error::NotReflection {
                detail: format!("zero entry inside the support {component:?}"),
            });
        }
        let polygon = Polygon::new(component, amplitudes)?.phase_normalized();
        // Renormalize away the rounding from the column extraction.
        let norm = polygon.norm();
        let polygon = Polygon::new(
            polygon.support.clone(),
            polygon.amplitudes.iter().map(|a| a / norm).collect(),
        )?;
        polygons.push(polygon);
    }

    let kind = kind_from_coverage(n, &polygons);
    Ok(ReflectionOperator {
        matrix: u.clone(),
        polygons,
        kind,
    })
}

/// Connected components of the nonzero pattern (entries above `tol`),
/// each sorted ascending, listed by smallest member.
fn nonzero_components(m: &Array2<Complex64>, tol: f64) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut component = vec![usize::MAX; n];
    let mut components = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        component[start] = id;
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..n {
                if component[j] == usize::MAX && (m[[i, j]].norm() > tol || m[[j, i]].norm() > tol)
                {
                    component[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// A family of disjoint polygons over a fixed basis dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Tessellation {
    dimension: usize,
    polygons: Vec<Polygon>,
}

impl Tessellation {
    pub fn new(dimension: usize, polygons: Vec<Polygon>) -> Result<Self> {
        let mut seen = vec![false; dimension];
        for (k, polygon) in polygons.iter().enumerate() {
            for &i in polygon.support() {
                if i >= dimension {
                    return Err(Error::VertexOutOfRange {
                        vertex: i,
                        count: dimension,
                    });
                }
                if seen[i] {
                    return Err(Error::OverlappingSupports { index: k });
                }
                seen[i] = true;
            }
        }
        Ok(Self {
            dimension,
            polygons,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.polygons.iter().map(|p| p.support().to_vec()).collect()
    }

    /// Polygon index of each vertex, `None` where uncovered.
    pub fn owner_of(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.dimension];
        for (k, polygon) in self.polygons.iter().enumerate() {
            for &i in polygon.support() {
                owner[i] = Some(k);
            }
        }
        owner
    }

    pub fn covers_all_vertices(&self) -> bool {
        self.polygons.iter().map(Polygon::len).sum::<usize>() == self.dimension
    }

    /// Edge ids of `graph` with both endpoints inside one polygon.
    pub fn covered_edges(&self, graph: &LabeledGraph) -> Vec<usize> {
        let owner = self.owner_of();
        graph
            .edges()
            .iter()
            .enumerate()
            .filter(|&(_, &(u, v))| owner[u].is_some() && owner[u] == owner[v])
            .map(|(e, _)| e)
            .collect()
    }

    /// The reflection `2ΣΠ − I` this tessellation induces.
    pub fn reflection(&self) -> Result<ReflectionOperator> {
        reflection_from_polygons(self.dimension, self.polygons.clone())
    }

    /// Verify every polygon induces a clique of `graph`.
    pub fn check_cliques(&self, graph: &LabeledGraph) -> Result<()> {
        for (k, polygon) in self.polygons.iter().enumerate() {
            let support = polygon.support();
            for (a, &u) in support.iter().enumerate() {
                for &v in &support[a + 1..] {
                    if !graph.adjacent(u, v) {
                        return Err(Error::NotAClique { polygon: k, u, v });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Validate that every polygon of `refl` induces a clique of `graph`, i.e.
/// that the reflection tessellates the graph.
pub fn tessellation_of(refl: &ReflectionOperator, graph: &LabeledGraph) -> Result<Tessellation> {
    if refl.dimension() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.vertex_count(),
            got: refl.dimension(),
        });
    }
    let tess = Tessellation::new(graph.vertex_count(), refl.polygons().to_vec())?;
    tess.check_cliques(graph)?;
    Ok(tess)
}

/// The graph a polygon family induces: one edge per in-polygon vertex pair.
pub fn induced_graph(dimension: usize, polygons: &[Polygon]) -> Result<LabeledGraph> {
    let mut edges = Vec::new();
    for polygon in polygons {
        let support = polygon.support();
        for (a, &u) in support.iter().enumerate() {
            for &v in &support[a + 1..] {
                edges.push((u, v));
            }
        }
    }
    LabeledGraph::from_edges(dimension, edges)
}

/// The 2×2 Hadamard gate (a one-polygon orthogonal reflection).
pub fn hadamard() -> Array2<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ndarray::array![
        [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]
    ]
}

/// The `d`-dimensional Fourier gate; unitary, but not a reflection for `d > 2`.
pub fn fourier(d: usize) -> Array2<Complex64> {
    let scale = 1.0 / (d as f64).sqrt();
    Array2::from_shape_fn((d, d), |(j, k)| {
        let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
        Complex64::from_polar(scale, angle)
    })
}
