//! Conversions between the three walk models, and entrywise operator
//! comparison through an explicit basis map.
//!
//! Coined → staggered replaces every vertex by the cliques of its coin's
//! polygons; the coin polygons become tessellation `α`, the shift's matched
//! arc pairs become tessellation `β`. Staggered → Szegedy reads the bipartite
//! graph off the polygon intersections (one vertex per `α`/`β` polygon pair)
//! and the weights off the squared polygon coefficients. Szegedy → coined
//! contracts the line graph's `x`-cliques back to vertices, which is possible
//! exactly when every `y` has degree 2 with half weights.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{line_graph, BipartiteWalkSpec, Bijection, LabeledGraph};
use crate::linalg::C_ZERO;
use crate::reflection::{classify_reflection, Polygon, Tessellation, DEFAULT_TOL};
use crate::walk::CoinAssignment;

const PHASE_TOL: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-12;

/// A staggered walk produced from a coined one: the expanded graph and the
/// two tessellations, plus the map back to the original vertices.
#[derive(Debug, Clone)]
pub struct StaggeredForm {
    /// Expanded graph; its vertices are the arcs of the original graph.
    pub graph: LabeledGraph,
    /// Coin polygons, embedded per vertex; induces `C'`.
    pub alpha: Tessellation,
    /// Matched arc pairs, one per original edge; induces `S`.
    pub beta: Tessellation,
    /// Original vertex of each expanded vertex.
    pub vertex_origin: Vec<usize>,
}

/// A Szegedy walk produced from a staggered one.
#[derive(Debug, Clone)]
pub struct SzegedyForm {
    pub spec: BipartiteWalkSpec,
    /// Staggered vertex ↔ bipartite edge `(x, y)`.
    pub map: Bijection,
}

/// A coined walk produced from a Szegedy one.
#[derive(Debug, Clone)]
pub struct CoinedForm {
    /// `|X|`-multigraph; one vertex per `x`, one edge per `y`.
    pub graph: LabeledGraph,
    pub coins: CoinAssignment,
    /// Arc ↔ bipartite edge `(x, y)`; arcs and line-graph vertices share indices.
    pub map: Bijection,
    /// When every `x` carries the same weight sequence, the single coin
    /// `2|ψ⟩⟨ψ| − I` of the regular form.
    pub regular_coin: Option<Array2<Complex64>>,
}

/// Turn a coined walk whose blocks are all orthogonal reflections into a
/// staggered walk with identical evolution operator.
pub fn coined_to_staggered(
    graph: &LabeledGraph,
    coins: &CoinAssignment,
) -> Result<StaggeredForm> {
    if coins.vertex_count() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.vertex_count(),
            got: coins.vertex_count(),
        });
    }
    let mut cells: Vec<Vec<Vec<usize>>> = Vec::with_capacity(graph.vertex_count());
    let mut alpha_polygons: Vec<Polygon> = Vec::new();
    for v in 0..graph.vertex_count() {
        let block = coins.block(v);
        if block.nrows() != graph.degree(v) {
            return Err(Error::CoinSizeMismatch {
                vertex: v,
                expected: graph.degree(v),
                got: block.nrows(),
            });
        }
        let refl = classify_reflection(block, DEFAULT_TOL).map_err(|e| {
            Error::CoinNotOrthogonalReflection {
                vertex: v,
                detail: e.to_string(),
            }
        })?;
        if !refl.is_orthogonal() {
            return Err(Error::CoinNotOrthogonalReflection {
                vertex: v,
                detail: "its polygons do not cover every coin direction".into(),
            });
        }
        cells.push(refl.polygons().iter().map(|p| p.support().to_vec()).collect());
        for polygon in refl.polygons() {
            let support = polygon
                .support()
                .iter()
                .map(|&j| graph.arc_index(v, j))
                .collect();
            alpha_polygons.push(Polygon::new(support, polygon.amplitudes().to_vec())?);
        }
    }

    let expanded = graph.expand_to_cliques(&cells)?;
    let beta_polygons: Vec<Polygon> = (0..graph.edge_count())
        .map(|e| {
            let (a, b) = graph.arcs_of_edge(e);
            Polygon::uniform(vec![a, b])
        })
        .collect::<Result<Vec<_>>>()?;

    let alpha = Tessellation::new(expanded.vertex_count(), alpha_polygons)?;
    let beta = Tessellation::new(expanded.vertex_count(), beta_polygons)?;
    let vertex_origin = (0..graph.arc_count())
        .map(|a| graph.arc_at(a).0)
        .collect();
    Ok(StaggeredForm {
        graph: expanded,
        alpha,
        beta,
        vertex_origin,
    })
}

/// Turn a staggered walk into the Szegedy walk on the bipartite graph of
/// polygon intersections: `X` are the `α` polygons, `Y` the `β` polygons,
/// weights the squared polygon coefficients, phases their arguments.
///
/// Requires both tessellations to cover all vertices, every edge to lie in
/// exactly one tessellation, and every polygon intersection to hold at most
/// one vertex.
pub fn staggered_to_szegedy(
    graph: &LabeledGraph,
    alpha: &Tessellation,
    beta: &Tessellation,
) -> Result<SzegedyForm> {
    let n = graph.vertex_count();
    for tess in [alpha, beta] {
        if tess.dimension() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: tess.dimension(),
            });
        }
        tess.check_cliques(graph)?;
    }
    if let Some(&edge) = graph.loop_edges().first() {
        return Err(Error::LoopNotSupported { edge });
    }

    let alpha_owner = require_full_coverage(alpha)?;
    let beta_owner = require_full_coverage(beta)?;

    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        let in_alpha = alpha_owner[u] == alpha_owner[v];
        let in_beta = beta_owner[u] == beta_owner[v];
        if in_alpha && in_beta {
            return Err(Error::TessellationsShareEdge { u, v });
        }
        if !in_alpha && !in_beta {
            return Err(Error::CoverageViolation {
                detail: format!("edge {e} = {{{u}, {v}}} lies in neither tessellation"),
            });
        }
    }

    let alpha = normalize_phases(alpha);
    let beta = normalize_phases(beta);
    let (m, k) = (alpha.polygons().len(), beta.polygons().len());
    let mut pairs = Vec::with_capacity(n);
    let mut seen = std::collections::BTreeSet::new();
    for v in 0..n {
        let pair = (alpha_owner[v], beta_owner[v]);
        if !seen.insert(pair) {
            return Err(Error::PolygonIntersectionTooLarge {
                alpha: pair.0,
                beta: pair.1,
            });
        }
        pairs.push(pair);
    }

    let mut p = Array2::zeros((m, k));
    let mut q = Array2::zeros((k, m));
    let mut theta = Array2::zeros((m, k));
    let mut theta_prime = Array2::zeros((m, k));
    for (v, &(x, y)) in pairs.iter().enumerate() {
        let a = amplitude_at(&alpha, x, v);
        let b = amplitude_at(&beta, y, v);
        p[[x, y]] = a.norm_sqr();
        q[[y, x]] = b.norm_sqr();
        theta[[x, y]] = a.arg();
        theta_prime[[x, y]] = b.arg();
    }
    let theta = nonzero_phases(theta);
    let theta_prime = nonzero_phases(theta_prime);

    let spec = BipartiteWalkSpec::new(
        m,
        k,
        pairs.clone(),
        p,
        q,
        theta,
        theta_prime,
        Default::default(),
    )?;
    let map = Bijection::new(m, k, pairs)?;
    Ok(SzegedyForm { spec, map })
}

fn require_full_coverage(tess: &Tessellation) -> Result<Vec<usize>> {
    tess.owner_of()
        .into_iter()
        .enumerate()
        .map(|(v, owner)| owner.ok_or(Error::UncoveredVertex { vertex: v }))
        .collect()
}

fn normalize_phases(tess: &Tessellation) -> Tessellation {
    let polygons = tess
        .polygons()
        .iter()
        .map(|p| p.phase_normalized())
        .collect();
    Tessellation::new(tess.dimension(), polygons).expect("normalization keeps supports")
}

fn amplitude_at(tess: &Tessellation, polygon: usize, vertex: usize) -> Complex64 {
    let p = &tess.polygons()[polygon];
    let slot = p
        .support()
        .iter()
        .position(|&u| u == vertex)
        .expect("vertex in its polygon");
    p.amplitudes()[slot]
}

fn nonzero_phases(theta: Array2<f64>) -> Option<Array2<f64>> {
    if theta.iter().any(|angle| angle.abs() > PHASE_TOL) {
        Some(theta)
    } else {
        None
    }
}

/// Turn a Szegedy walk into the coined walk on the contracted multigraph.
///
/// Demands the Szegedy-to-coined hypotheses: every `y` in `Y` has degree 2,
/// `q_yx ∈ {0, 1/2}`, no phases, and positive `p` on every edge. Sinks are
/// rejected here; [`crate::search::szegedy_search_to_coined`] handles them.
pub fn szegedy_to_coined(spec: &BipartiteWalkSpec) -> Result<CoinedForm> {
    if let Some(&sink) = spec.sinks().iter().next() {
        return Err(Error::HypothesisViolated {
            index: sink,
            detail: "spec has sinks; use the searching conversion".into(),
        });
    }
    szegedy_to_coined_blocks(spec)
}

/// Shared body of the plain and searching Szegedy → coined conversions.
/// Sink rows get the coin `−I`; everything else gets `2·M_x − I`.
pub(crate) fn szegedy_to_coined_blocks(spec: &BipartiteWalkSpec) -> Result<CoinedForm> {
    for y in 0..spec.y_count() {
        let degree = spec.degree_y(y);
        if degree != 2 {
            return Err(Error::HypothesisViolated {
                index: y,
                detail: format!("deg(y) = {degree}, expected 2"),
            });
        }
        for x in spec.neighbors_of_y(y) {
            if (spec.q()[[y, x]] - 0.5).abs() > WEIGHT_TOL {
                return Err(Error::HypothesisViolated {
                    index: y,
                    detail: format!(
                        "q[{y}][{x}] = {}, expected 1/2",
                        spec.q()[[y, x]]
                    ),
                });
            }
        }
    }
    for (label, phases) in [("theta", spec.theta()), ("theta_prime", spec.theta_prime())] {
        if let Some(t) = phases {
            if let Some(((x, _), angle)) =
                t.indexed_iter().find(|(_, angle)| angle.abs() > PHASE_TOL)
            {
                return Err(Error::HypothesisViolated {
                    index: x,
                    detail: format!("nonzero phase {label} = {angle}"),
                });
            }
        }
    }
    for x in 0..spec.x_count() {
        if spec.is_sink(x) {
            continue;
        }
        for y in spec.neighbors_of_x(x) {
            if spec.p()[[x, y]] <= 0.0 {
                return Err(Error::HypothesisViolated {
                    index: x,
                    detail: format!("p[{x}][{y}] vanishes on an edge"),
                });
            }
        }
    }

    let (lg, map) = line_graph(spec)?;
    // Edges of an x are consecutive in the lexicographic bijection.
    let mut supports: Vec<Vec<usize>> = vec![Vec::new(); spec.x_count()];
    for (i, &(x, _)) in map.pairs().iter().enumerate() {
        supports[x].push(i);
    }
    if let Some(x) = supports.iter().position(Vec::is_empty) {
        return Err(Error::HypothesisViolated {
            index: x,
            detail: "x has no incident edges".into(),
        });
    }
    let (graph, _) = lg.contract_cliques(&supports)?;

    let mut blocks = Vec::with_capacity(spec.x_count());
    for (x, support) in supports.iter().enumerate() {
        let d = support.len();
        let mut block = Array2::from_elem((d, d), C_ZERO);
        if spec.is_sink(x) {
            for i in 0..d {
                block[[i, i]] = Complex64::new(-1.0, 0.0);
            }
        } else {
            let weights: Vec<f64> = spec
                .neighbors_of_x(x)
                .map(|y| spec.p()[[x, y]].sqrt())
                .collect();
            for i in 0..d {
                for j in 0..d {
                    let m = weights[i] * weights[j];
                    block[[i, j]] = Complex64::new(2.0 * m - if i == j { 1.0 } else { 0.0 }, 0.0);
                }
            }
        }
        blocks.push(block);
    }
    let coins = CoinAssignment::new(blocks)?;

    let regular_coin = if spec.sinks().is_empty() {
        regular_weight_sequence(spec).map(|weights| {
            let d = weights.len();
            Array2::from_shape_fn((d, d), |(i, j)| {
                let m = (weights[i] * weights[j]).sqrt();
                Complex64::new(2.0 * m - if i == j { 1.0 } else { 0.0 }, 0.0)
            })
        })
    } else {
        None
    };

    Ok(CoinedForm {
        graph,
        coins,
        map,
        regular_coin,
    })
}

/// The shared weight sequence `c_0..c_{d-1}` when all `x` rows agree
/// (in ascending-`y` order), i.e. when the coined form is regular.
fn regular_weight_sequence(spec: &BipartiteWalkSpec) -> Option<Vec<f64>> {
    let first: Vec<f64> = spec
        .neighbors_of_x(0)
        .map(|y| spec.p()[[0, y]])
        .collect();
    for x in 1..spec.x_count() {
        let row: Vec<f64> = spec.neighbors_of_x(x).map(|y| spec.p()[[x, y]]).collect();
        if row.len() != first.len() {
            return None;
        }
        if row
            .iter()
            .zip(&first)
            .any(|(a, b)| (a - b).abs() > WEIGHT_TOL)
        {
            return None;
        }
    }
    Some(first)
}

/// Result of embedding one evolution operator into another.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    /// Largest entry deviation between the embedded operator and the block of
    /// the larger one (identity expected on the complement).
    pub max_abs_diff: f64,
    /// Dimension of the idle subspace, `dim(U_b) − dim(U_a)`.
    pub idle_dimension: usize,
    /// `max_abs_diff <= tolerance`.
    pub verdict: bool,
    pub tolerance: f64,
    /// The basis map used for the embedding.
    pub map: Bijection,
}

/// Check that `u_b` equals `u_a` embedded through `map`, and the identity on
/// the complementary (idle) basis vectors.
pub fn verify_equivalence(
    u_a: &Array2<Complex64>,
    u_b: &Array2<Complex64>,
    map: &Bijection,
    tol: f64,
) -> Result<EquivalenceReport> {
    let k = u_a.nrows();
    if u_a.ncols() != k || map.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: if u_a.ncols() != k { u_a.ncols() } else { map.len() },
        });
    }
    let n = map.flat_dim();
    if u_b.nrows() != n || u_b.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u_b.nrows(),
        });
    }
    let mut back = vec![None; n];
    for i in 0..k {
        back[map.flat(i)] = Some(i);
    }
    let mut max_abs_diff = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let expected = match (back[r], back[c]) {
                (Some(i), Some(j)) => u_a[[i, j]],
                _ if r == c => Complex64::new(1.0, 0.0),
                _ => C_ZERO,
            };
            let diff = (u_b[[r, c]] - expected).norm();
            if diff > max_abs_diff {
                max_abs_diff = diff;
            }
        }
    }
    Ok(EquivalenceReport {
        max_abs_diff,
        idle_dimension: n - k,
        verdict: max_abs_diff <= tol,
        tolerance: tol,
        map: map.clone(),
    })
}
