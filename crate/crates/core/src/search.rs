//! Marked-vertex searching: the abstract search coin (`−I` on marked
//! vertices, Grover elsewhere), Szegedy walks with sinks, uniform initial
//! states, success-probability traces, and the conversions tying the two
//! searching frameworks together through generalized staggered walks.

use std::collections::BTreeSet;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::convert::{szegedy_to_coined_blocks, CoinedForm};
use crate::error::{Error, Result};
use crate::graph::{BipartiteWalkSpec, Bijection, LabeledGraph};
use crate::linalg::C_ZERO;
use crate::reflection::{grover, Polygon, Tessellation};
use crate::walk::{Basis, CoinAssignment, WalkState};

/// Marked positions: vertices of a coined walk, or `X`-vertices of a Szegedy
/// walk. May be empty while constructing operators; search runs require at
/// least one element.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkedSet(BTreeSet<usize>);

impl MarkedSet {
    pub fn new(marked: impl IntoIterator<Item = usize>) -> Self {
        Self(marked.into_iter().collect())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_set(&self) -> &BTreeSet<usize> {
        &self.0
    }

    fn check_within(&self, count: usize) -> Result<()> {
        if let Some(&v) = self.0.iter().find(|&&v| v >= count) {
            return Err(Error::VertexOutOfRange { vertex: v, count });
        }
        Ok(())
    }
}

/// The abstract search coin and its `C' = C·R` factorization.
#[derive(Debug, Clone)]
pub struct SearchCoin {
    /// `−I` on marked vertices, Grover on the others.
    pub coin: CoinAssignment,
    /// The all-Grover part `C`.
    pub grover_part: CoinAssignment,
    /// The marking reflection `R`: `−G` on marked vertices, `+I` elsewhere.
    pub marker_part: CoinAssignment,
}

/// Coin assignment of the abstract search walk on `graph`.
pub fn abstract_search_coin(graph: &LabeledGraph, marked: &MarkedSet) -> Result<SearchCoin> {
    marked.check_within(graph.vertex_count())?;
    let mut coin = Vec::new();
    let mut grover_part = Vec::new();
    let mut marker_part = Vec::new();
    for v in 0..graph.vertex_count() {
        let d = graph.degree(v);
        if d == 0 {
            let empty = Array2::from_elem((0, 0), C_ZERO);
            coin.push(empty.clone());
            grover_part.push(empty.clone());
            marker_part.push(empty);
            continue;
        }
        let g = grover(d)?.matrix().clone();
        if marked.contains(v) {
            coin.push(minus_identity(d));
            marker_part.push(g.mapv(|z| -z));
        } else {
            coin.push(g.clone());
            marker_part.push(crate::linalg::identity(d));
        }
        grover_part.push(g);
    }
    Ok(SearchCoin {
        coin: CoinAssignment::new(coin)?,
        grover_part: CoinAssignment::new(grover_part)?,
        marker_part: CoinAssignment::new(marker_part)?,
    })
}

fn minus_identity(d: usize) -> Array2<Complex64> {
    crate::linalg::identity(d).mapv(|z| -z)
}

/// Zero the `P` rows of `marked`, turning them into sinks; `Q` and the edge
/// set stay untouched.
pub fn mark_sinks(spec: &BipartiteWalkSpec, marked: &MarkedSet) -> Result<BipartiteWalkSpec> {
    spec.with_sinks(marked.as_set())
}

/// Uniform superposition over all arcs, `1/√(2|E|)` each — the coined
/// search's unbiased initial state.
pub fn uniform_arc_state(graph: &LabeledGraph) -> Result<WalkState> {
    let n = graph.arc_count();
    if n == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    WalkState::new(Array1::from_elem(n, amp), Basis::coined(graph))
}

/// The Szegedy search initial state `√(p_xy / |X|)` on every edge.
///
/// Use the spec *before* sinks are introduced ("the uniform superposition of
/// the edges"); with zeroed sink rows the state would not normalize.
pub fn szegedy_edge_state(spec: &BipartiteWalkSpec) -> Result<WalkState> {
    let (m, n) = (spec.x_count(), spec.y_count());
    let mut amplitudes = Array1::from_elem(m * n, C_ZERO);
    for &(x, y) in spec.edges() {
        let w = spec.p()[[x, y]];
        if w > 0.0 {
            amplitudes[x * n + y] = Complex64::new((w / m as f64).sqrt(), 0.0);
        }
    }
    WalkState::new(amplitudes, Basis::szegedy(spec))
}

/// One step of a success-probability trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    /// Total probability on the marked positions.
    pub p_marked: f64,
    /// Probability of each marked position, in ascending position order.
    pub per_marked: Vec<f64>,
}

/// Marked-position probability per step, with the empirical peak.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTrace {
    pub rows: Vec<TraceRow>,
    /// First step attaining the maximum of `p_marked`.
    pub argmax_t: usize,
    pub max_p: f64,
}

impl ProbabilityTrace {
    /// CSV with columns `t,p_marked,p_max_vertex,argmax_flag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,p_marked,p_max_vertex,argmax_flag\n");
        for row in &self.rows {
            let p_max_vertex = row.per_marked.iter().copied().fold(0.0f64, f64::max);
            let flag = u8::from(row.t == self.argmax_t);
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.t, row.p_marked, p_max_vertex, flag
            ));
        }
        out
    }

    pub fn p_marked_series(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.p_marked).collect()
    }
}

/// Evolve `psi0` under `u` for `t = 0..=steps`, recording the probability on
/// the marked positions at every step.
pub fn success_probability_trace(
    u: &Array2<Complex64>,
    psi0: &WalkState,
    marked: &MarkedSet,
    steps: usize,
) -> Result<ProbabilityTrace> {
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    marked.check_within(psi0.basis().position_count())?;
    if u.nrows() != psi0.amplitudes().len() || u.ncols() != psi0.amplitudes().len() {
        return Err(Error::DimensionMismatch {
            expected: psi0.amplitudes().len(),
            got: u.nrows(),
        });
    }
    let mut amplitudes = psi0.amplitudes().clone();
    let mut rows = Vec::with_capacity(steps + 1);
    let mut argmax_t = 0;
    let mut max_p = f64::MIN;
    for t in 0..=steps {
        if t > 0 {
            amplitudes = u.dot(&amplitudes);
        }
        let mut probs = vec![0.0; psi0.basis().position_count()];
        for (i, amp) in amplitudes.iter().enumerate() {
            probs[psi0.basis().position_of(i)] += amp.norm_sqr();
        }
        let per_marked: Vec<f64> = marked.iter().map(|v| probs[v]).collect();
        let p_marked: f64 = per_marked.iter().sum();
        if p_marked > max_p {
            max_p = p_marked;
            argmax_t = t;
        }
        rows.push(TraceRow {
            t,
            p_marked,
            per_marked,
        });
    }
    Ok(ProbabilityTrace {
        rows,
        argmax_t,
        max_p,
    })
}

/// A coined search recast as a Szegedy walk with sinks, via the generalized
/// staggered walk in between.
#[derive(Debug, Clone)]
pub struct SearchSzegedyForm {
    /// Expanded graph: cliques at unmarked vertices, empty graphs at marked
    /// ones (their clique-completion edges are absent).
    pub staggered_graph: LabeledGraph,
    /// Partial tessellation: one uniform polygon per unmarked vertex.
    pub alpha: Tessellation,
    /// Matched arc pairs, one per original edge.
    pub beta: Tessellation,
    /// The expanded graph with the marked vertices' cliques completed; this
    /// is the line graph of the bipartite graph below.
    pub completed_graph: LabeledGraph,
    /// Bipartite spec with the marked rows of `P` zeroed (sinks).
    pub spec: BipartiteWalkSpec,
    /// Expanded vertex (= arc) ↔ bipartite edge `(x, y)`.
    pub map: Bijection,
    /// Original vertex of each expanded vertex.
    pub vertex_origin: Vec<usize>,
}

/// Cast the abstract search walk on `graph` with `marked` vertices into a
/// Szegedy walk on a bipartite graph with sinks.
pub fn coined_search_to_szegedy(
    graph: &LabeledGraph,
    marked: &MarkedSet,
) -> Result<SearchSzegedyForm> {
    marked.check_within(graph.vertex_count())?;
    if let Some(&edge) = graph.loop_edges().first() {
        return Err(Error::LoopNotSupported { edge });
    }
    for v in 0..graph.vertex_count() {
        if graph.degree(v) == 0 {
            return Err(Error::HypothesisViolated {
                index: v,
                detail: "vertex has degree 0".into(),
            });
        }
    }

    let mut staggered_cells = Vec::with_capacity(graph.vertex_count());
    let mut completed_cells = Vec::with_capacity(graph.vertex_count());
    let mut alpha_polygons = Vec::new();
    for v in 0..graph.vertex_count() {
        let d = graph.degree(v);
        let full: Vec<usize> = (0..d).collect();
        completed_cells.push(vec![full.clone()]);
        if marked.contains(v) {
            // Empty d-graph: one singleton cell per direction, no polygon.
            staggered_cells.push(full.iter().map(|&j| vec![j]).collect());
        } else {
            staggered_cells.push(vec![full.clone()]);
            let support = full.iter().map(|&j| graph.arc_index(v, j)).collect();
            alpha_polygons.push(Polygon::uniform(support)?);
        }
    }
    let staggered_graph = graph.expand_to_cliques(&staggered_cells)?;
    let completed_graph = graph.expand_to_cliques(&completed_cells)?;

    let beta_polygons: Vec<Polygon> = (0..graph.edge_count())
        .map(|e| {
            let (a, b) = graph.arcs_of_edge(e);
            Polygon::uniform(vec![a, b])
        })
        .collect::<Result<Vec<_>>>()?;
    let alpha = Tessellation::new(staggered_graph.vertex_count(), alpha_polygons)?;
    let beta = Tessellation::new(staggered_graph.vertex_count(), beta_polygons)?;

    // Bipartite graph behind the completed line graph: X are the vertices,
    // Y the edges, weights uniform before sinks.
    let m = graph.vertex_count();
    let k = graph.edge_count();
    let mut pairs = Vec::with_capacity(graph.arc_count());
    let mut p = Array2::zeros((m, k));
    let mut q = Array2::zeros((k, m));
    for arc in 0..graph.arc_count() {
        let (v, j) = graph.arc_at(arc);
        let e = graph.edge_of_arc(v, j);
        pairs.push((v, e));
        p[[v, e]] = 1.0 / graph.degree(v) as f64;
        q[[e, v]] = 0.5;
    }
    let pre_sink = BipartiteWalkSpec::new(
        m,
        k,
        pairs.clone(),
        p,
        q,
        None,
        None,
        Default::default(),
    )?;
    let spec = pre_sink.with_sinks(marked.as_set())?;
    let map = Bijection::new(m, k, pairs)?;
    let vertex_origin = (0..graph.arc_count()).map(|a| graph.arc_at(a).0).collect();

    Ok(SearchSzegedyForm {
        staggered_graph,
        alpha,
        beta,
        completed_graph,
        spec,
        map,
        vertex_origin,
    })
}

/// Convert a Szegedy walk with sinks in `X` into a coined search walk: the
/// plain conversion on the pre-sink structure, with coin `−I` at every
/// sink-derived vertex.
pub fn szegedy_search_to_coined(spec: &BipartiteWalkSpec) -> Result<CoinedForm> {
    szegedy_to_coined_blocks(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::verify_equivalence;
    use crate::corpus;
    use crate::linalg::{identity, max_abs_diff, unitarity_residual};
    use crate::reflection::{classify_reflection, ReflectionKind, DEFAULT_TOL};
    use crate::walk::{
        coined_evolution, staggered_evolution, szegedy_evolution, szegedy_reflections,
        StaggeredCoverage,
    };

    #[test]
    fn no_marked_vertices_gives_plain_grover_coin() {
        let g = corpus::torus_3x3();
        let search = abstract_search_coin(&g, &MarkedSet::default()).unwrap();
        let grover_coin = CoinAssignment::grover(&g).unwrap();
        for v in 0..9 {
            assert_eq!(search.coin.block(v), grover_coin.block(v));
            assert!(max_abs_diff(search.marker_part.block(v), &identity(4)) < 1e-15);
        }
    }

    #[test]
    fn marked_center_gets_minus_identity() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let search = abstract_search_coin(&g, &marked).unwrap();
        assert!(max_abs_diff(search.coin.block(4), &minus_identity(4)) < 1e-15);
        for v in (0..9).filter(|&v| v != 4) {
            assert_eq!(search.coin.block(v), search.grover_part.block(v));
        }
        // C' = C·R block by block.
        let product = search.grover_part.compose(&search.marker_part).unwrap();
        for v in 0..9 {
            assert!(max_abs_diff(product.block(v), search.coin.block(v)) < 1e-12);
        }
    }

    #[test]
    fn all_marked_turns_evolution_into_minus_shift() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new(0..9);
        let search = abstract_search_coin(&g, &marked).unwrap();
        let u = coined_evolution(&g, &search.coin).unwrap();
        let s = crate::walk::shift_operator(&g);
        let minus_s = s.matrix().mapv(|z| -z);
        assert!(max_abs_diff(&u, &minus_s) < 1e-12);
    }

    #[test]
    fn sinks_zero_p_rows_only() {
        let form = coined_search_to_szegedy(&corpus::torus_3x3(), &MarkedSet::new([4])).unwrap();
        let spec = &form.spec;
        assert!(spec.is_sink(4));
        assert_eq!(spec.p().row(4).sum(), 0.0);
        for y in 0..18 {
            assert!((spec.q().row(y).sum() - 1.0).abs() < 1e-12);
        }
        assert_eq!(spec.edge_count(), 36);
    }

    #[test]
    fn empty_marked_set_changes_nothing() {
        let spec = corpus::cubic_multigraph_spec();
        let same = mark_sinks(&spec, &MarkedSet::default()).unwrap();
        assert_eq!(same, spec);
    }

    #[test]
    fn all_sinks_makes_w_minus_r1() {
        let spec = corpus::cubic_multigraph_spec();
        let marked = MarkedSet::new(0..4);
        let sunk = mark_sinks(&spec, &marked).unwrap();
        let (r0, r1) = szegedy_reflections(&sunk).unwrap();
        assert!(max_abs_diff(&r0, &identity(24).mapv(|z| -z)) < 1e-15);
        let w = szegedy_evolution(&sunk).unwrap();
        assert!(max_abs_diff(&w, &r1.mapv(|z| -z)) < 1e-15);
    }

    #[test]
    fn uniform_arc_state_on_torus() {
        let state = uniform_arc_state(&corpus::torus_3x3()).unwrap();
        assert_eq!(state.amplitudes().len(), 36);
        for amp in state.amplitudes() {
            assert!((amp.re - 1.0 / 6.0).abs() < 1e-15);
            assert_eq!(amp.im, 0.0);
        }
    }

    #[test]
    fn uniform_arc_state_on_single_edge() {
        let g = crate::graph::LabeledGraph::from_edges(2, vec![(0, 1)]).unwrap();
        let state = uniform_arc_state(&g).unwrap();
        for amp in state.amplitudes() {
            assert!((amp.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn szegedy_edge_state_is_uniform_for_regular_specs() {
        let form = coined_search_to_szegedy(&corpus::torus_3x3(), &MarkedSet::default()).unwrap();
        let state = szegedy_edge_state(&form.spec).unwrap();
        let nonzero: Vec<f64> = state
            .amplitudes()
            .iter()
            .filter(|a| a.norm() > 0.0)
            .map(|a| a.re)
            .collect();
        assert_eq!(nonzero.len(), 36);
        for amp in nonzero {
            assert!((amp - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn trace_starts_at_uniform_probability() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let search = abstract_search_coin(&g, &marked).unwrap();
        let u = coined_evolution(&g, &search.coin).unwrap();
        let psi0 = uniform_arc_state(&g).unwrap();
        let trace = success_probability_trace(&u, &psi0, &marked, 30).unwrap();
        assert_eq!(trace.rows.len(), 31);
        assert!((trace.rows[0].p_marked - 1.0 / 9.0).abs() < 1e-15);
        // The search amplifies the marked vertex above twice the uniform level.
        assert!(trace.max_p > 2.0 / 9.0, "max_p = {}", trace.max_p);
        assert!(trace.argmax_t > 0);
    }

    #[test]
    fn trace_against_matrix_power_oracle() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let search = abstract_search_coin(&g, &marked).unwrap();
        let u = coined_evolution(&g, &search.coin).unwrap();
        let psi0 = uniform_arc_state(&g).unwrap();
        let trace = success_probability_trace(&u, &psi0, &marked, 8).unwrap();
        // Independent route: explicit matrix powers applied to the state.
        let mut power = identity(36);
        for t in 0..=8 {
            if t > 0 {
                power = u.dot(&power);
            }
            let state = power.dot(psi0.amplitudes());
            let p: f64 = (0..36)
                .filter(|&i| g.arc_at(i).0 == 4)
                .map(|i| state[i].norm_sqr())
                .sum();
            assert!((trace.rows[t].p_marked - p).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn degenerate_all_marked_trace_stays_at_one() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new(0..9);
        let search = abstract_search_coin(&g, &marked).unwrap();
        let u = coined_evolution(&g, &search.coin).unwrap();
        let psi0 = uniform_arc_state(&g).unwrap();
        let trace = success_probability_trace(&u, &psi0, &marked, 10).unwrap();
        for row in &trace.rows {
            assert!((row.p_marked - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_marked_trace_rejected() {
        let g = corpus::torus_3x3();
        let u = coined_evolution(&g, &CoinAssignment::grover(&g).unwrap()).unwrap();
        let psi0 = uniform_arc_state(&g).unwrap();
        assert!(matches!(
            success_probability_trace(&u, &psi0, &MarkedSet::default(), 5).unwrap_err(),
            Error::EmptyMarkedSet
        ));
    }

    #[test]
    fn search_conversion_reproduces_operator_with_sink() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let form = coined_search_to_szegedy(&g, &marked).unwrap();

        // The marked vertex keeps no clique edges in the staggered graph.
        assert_eq!(
            form.completed_graph.edge_count() - form.staggered_graph.edge_count(),
            6
        );
        assert_eq!(form.alpha.polygons().len(), 8);
        assert_eq!(form.beta.polygons().len(), 18);

        let search = abstract_search_coin(&g, &marked).unwrap();
        let coined = coined_evolution(&g, &search.coin).unwrap();
        let w = szegedy_evolution(&form.spec).unwrap();
        let report = verify_equivalence(&coined, &w, &form.map, 1e-12).unwrap();
        assert!(report.verdict, "max diff {}", report.max_abs_diff);
        assert_eq!(report.idle_dimension, 9 * 18 - 36);
    }

    #[test]
    fn search_conversion_works_on_non_regular_graphs() {
        let g = corpus::paw_graph();
        let marked = MarkedSet::new([2]);
        let form = coined_search_to_szegedy(&g, &marked).unwrap();
        let search = abstract_search_coin(&g, &marked).unwrap();
        let coined = coined_evolution(&g, &search.coin).unwrap();
        let w = szegedy_evolution(&form.spec).unwrap();
        let report = verify_equivalence(&coined, &w, &form.map, 1e-12).unwrap();
        assert!(report.verdict, "max diff {}", report.max_abs_diff);
        let back = szegedy_search_to_coined(&form.spec).unwrap();
        let recovered = coined_evolution(&back.graph, &back.coins).unwrap();
        assert!(max_abs_diff(&coined, &recovered) <= 1e-12);
    }

    #[test]
    fn search_conversion_without_marks_is_plain_pipeline() {
        let g = corpus::torus_3x3();
        let form = coined_search_to_szegedy(&g, &MarkedSet::default()).unwrap();
        assert!(form.spec.sinks().is_empty());
        assert_eq!(form.alpha.polygons().len(), 9);
        let coined =
            coined_evolution(&g, &CoinAssignment::grover(&g).unwrap()).unwrap();
        let w = szegedy_evolution(&form.spec).unwrap();
        let report = verify_equivalence(&coined, &w, &form.map, 1e-12).unwrap();
        assert!(report.verdict);
    }

    #[test]
    fn all_marked_alpha_is_empty_and_p_all_sinks() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new(0..9);
        let form = coined_search_to_szegedy(&g, &marked).unwrap();
        assert!(form.alpha.polygons().is_empty());
        assert_eq!(form.spec.sinks().len(), 9);
        assert_eq!(form.spec.p().sum(), 0.0);
        // U0 = −I, so the staggered product is −U1.
        let u0 = form.alpha.reflection().unwrap();
        assert_eq!(u0.kind(), ReflectionKind::Partial);
        let u1 = form.beta.reflection().unwrap();
        let walk = staggered_evolution(&u0, &u1, &form.staggered_graph).unwrap();
        assert_eq!(walk.coverage, StaggeredCoverage::Vertices);
        assert!(max_abs_diff(&walk.matrix, &u1.matrix().mapv(|z| -z)) < 1e-12);
    }

    #[test]
    fn generalized_staggered_matches_coined_search() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let form = coined_search_to_szegedy(&g, &marked).unwrap();
        let u0 = form.alpha.reflection().unwrap();
        assert_eq!(u0.kind(), ReflectionKind::Partial);
        let u1 = form.beta.reflection().unwrap();
        let walk = staggered_evolution(&u0, &u1, &form.staggered_graph).unwrap();
        assert_eq!(walk.coverage, StaggeredCoverage::Vertices);
        let search = abstract_search_coin(&g, &marked).unwrap();
        let coined = coined_evolution(&g, &search.coin).unwrap();
        assert!(max_abs_diff(&walk.matrix, &coined) <= 1e-12);
    }

    #[test]
    fn completion_edges_change_no_operator_entry() {
        // The staggered product is built from polygons only; validating the
        // same tessellations on the completed graph gives the same matrix.
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let form = coined_search_to_szegedy(&g, &marked).unwrap();
        let u0 = form.alpha.reflection().unwrap();
        let u1 = form.beta.reflection().unwrap();
        let sparse = staggered_evolution(&u0, &u1, &form.staggered_graph).unwrap();
        let completed = staggered_evolution(&u0, &u1, &form.completed_graph).unwrap();
        assert_eq!(max_abs_diff(&sparse.matrix, &completed.matrix), 0.0);
    }

    #[test]
    fn surviving_reflection_is_partial_and_w_unitary() {
        let g = corpus::torus_3x3();
        let form = coined_search_to_szegedy(&g, &MarkedSet::new([4])).unwrap();
        let (r0, _) = szegedy_reflections(&form.spec).unwrap();
        let refl = classify_reflection(&r0, DEFAULT_TOL).unwrap();
        assert_eq!(refl.kind(), ReflectionKind::Partial);
        let w = szegedy_evolution(&form.spec).unwrap();
        assert!(unitarity_residual(&w) < 1e-12);
    }

    #[test]
    fn sink_vertices_convert_back_to_minus_identity_coins() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let form = coined_search_to_szegedy(&g, &marked).unwrap();
        let back = szegedy_search_to_coined(&form.spec).unwrap();
        assert_eq!(back.graph.vertex_count(), 9);
        assert_eq!(back.graph.edge_count(), 18);
        assert!(max_abs_diff(back.coins.block(4), &minus_identity(4)) < 1e-15);
        let g4 = grover(4).unwrap();
        for v in (0..9).filter(|&v| v != 4) {
            assert!(max_abs_diff(back.coins.block(v), g4.matrix()) < 1e-12);
        }
        // Round trip reproduces the abstract search operator on the nose.
        let search = abstract_search_coin(&g, &marked).unwrap();
        let direct = coined_evolution(&g, &search.coin).unwrap();
        let recovered = coined_evolution(&back.graph, &back.coins).unwrap();
        assert!(max_abs_diff(&direct, &recovered) <= 1e-12);
    }

    #[test]
    fn no_sinks_matches_plain_conversion() {
        let spec = corpus::cubic_multigraph_spec();
        let plain = crate::convert::szegedy_to_coined(&spec).unwrap();
        let search = szegedy_search_to_coined(&spec).unwrap();
        assert_eq!(plain.graph.edges(), search.graph.edges());
        for v in 0..4 {
            assert_eq!(plain.coins.block(v), search.coins.block(v));
        }
    }

    #[test]
    fn three_searching_models_trace_identically() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let steps = 30;

        // Coined abstract search.
        let search = abstract_search_coin(&g, &marked).unwrap();
        let u_coined = coined_evolution(&g, &search.coin).unwrap();
        let psi_coined = uniform_arc_state(&g).unwrap();
        let coined_trace =
            success_probability_trace(&u_coined, &psi_coined, &marked, steps).unwrap();

        // Generalized staggered walk, probabilities mapped back to vertices.
        let form = coined_search_to_szegedy(&g, &marked).unwrap();
        let u0 = form.alpha.reflection().unwrap();
        let u1 = form.beta.reflection().unwrap();
        let staggered = staggered_evolution(&u0, &u1, &form.staggered_graph).unwrap();
        let basis = Basis::Coined {
            vertex_count: g.vertex_count(),
            arc_vertices: form.vertex_origin.clone(),
        };
        let n = form.staggered_graph.vertex_count();
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let psi_staggered = WalkState::new(Array1::from_elem(n, amp), basis).unwrap();
        let staggered_trace =
            success_probability_trace(&staggered.matrix, &psi_staggered, &marked, steps).unwrap();

        // Szegedy walk with the sink; the initial state uses pre-sink weights.
        let w = szegedy_evolution(&form.spec).unwrap();
        let pre_sink = coined_search_to_szegedy(&g, &MarkedSet::default()).unwrap().spec;
        let psi_szegedy = szegedy_edge_state(&pre_sink).unwrap();
        let szegedy_trace =
            success_probability_trace(&w, &psi_szegedy, &marked, steps).unwrap();

        for t in 0..=steps {
            let a = coined_trace.rows[t].p_marked;
            let b = staggered_trace.rows[t].p_marked;
            let c = szegedy_trace.rows[t].p_marked;
            assert!((a - b).abs() <= 1e-10, "t={t}: coined {a} vs staggered {b}");
            assert!((a - c).abs() <= 1e-10, "t={t}: coined {a} vs szegedy {c}");
        }
    }

    #[test]
    fn csv_has_one_row_per_step() {
        let g = corpus::torus_3x3();
        let marked = MarkedSet::new([4]);
        let search = abstract_search_coin(&g, &marked).unwrap();
        let u = coined_evolution(&g, &search.coin).unwrap();
        let psi0 = uniform_arc_state(&g).unwrap();
        let trace = success_probability_trace(&u, &psi0, &marked, 12).unwrap();
        let csv = trace.to_csv();
        assert_eq!(csv.lines().count(), 14);
        assert!(csv.starts_with("t,p_marked,p_max_vertex,argmax_flag\n"));
        assert_eq!(csv.lines().filter(|l| l.ends_with(",1")).count(), 1);
    }
}
