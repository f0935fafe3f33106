//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use qwalk_core::convert::{
    coined_to_staggered, staggered_to_szegedy, szegedy_to_coined, verify_equivalence,
};
use qwalk_core::corpus;
use qwalk_core::error::Error;
use qwalk_core::graph::{BipartiteWalkSpec, LabeledGraph};
use qwalk_core::linalg::{identity, involution_residual, max_abs_diff};
use qwalk_core::reflection::{
    classify_reflection, fourier, grover, reflection_from_polygons, Polygon, ReflectionKind,
    Tessellation, DEFAULT_TOL,
};
use qwalk_core::search::{
    abstract_search_coin, coined_search_to_szegedy, success_probability_trace, uniform_arc_state,
    szegedy_edge_state, MarkedSet,
};
use qwalk_core::walk::{
    coined_evolution, evolve, shift_operator, staggered_evolution, szegedy_evolution, Basis,
    CoinAssignment, WalkState,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The paw-instance tessellation vectors, written out literally.
fn paw_alpha() -> Vec<Polygon> {
    let third = 1.0 / 3.0_f64.sqrt();
    let plus = (2.0 + 2.0_f64.sqrt()).sqrt() / 2.0;
    let minus = (2.0 - 2.0_f64.sqrt()).sqrt() / 2.0;
    vec![
        Polygon::new(vec![0], vec![c(1.0)]).unwrap(),
        Polygon::new(vec![1, 2, 3], vec![c(third); 3]).unwrap(),
        Polygon::new(vec![4, 5], vec![c(plus), c(minus)]).unwrap(),
        Polygon::new(vec![6, 7], vec![c(plus), c(minus)]).unwrap(),
    ]
}

fn paw_beta() -> Vec<Polygon> {
    let h = 1.0 / 2.0_f64.sqrt();
    [[0usize, 1], [2, 4], [3, 6], [5, 7]]
        .into_iter()
        .map(|pair| Polygon::new(pair.to_vec(), vec![c(h); 2]).unwrap())
        .collect()
}

/// Expanded paw graph: cliques per vertex plus the four inherited edges.
fn paw_expanded() -> LabeledGraph {
    LabeledGraph::from_edges(
        8,
        vec![
            (1, 2),
            (1, 3),
            (2, 3),
            (4, 5),
            (6, 7),
            (0, 1),
            (2, 4),
            (3, 6),
            (5, 7),
        ],
    )
    .unwrap()
}

fn paw_shift_matrix() -> Array2<Complex64> {
    let rows: [[f64; 8]; 8] = [
        [0., 1., 0., 0., 0., 0., 0., 0.],
        [1., 0., 0., 0., 0., 0., 0., 0.],
        [0., 0., 0., 0., 1., 0., 0., 0.],
        [0., 0., 0., 0., 0., 0., 1., 0.],
        [0., 0., 1., 0., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0., 0., 0., 1.],
        [0., 0., 0., 1., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0., 1., 0., 0.],
    ];
    Array2::from_shape_fn((8, 8), |(i, j)| c(rows[i][j]))
}

#[test]
fn c1_paw_instance_operator_exactness() {
    let started = Instant::now();

    // Direct coined construction: the shift matches the frozen permutation.
    let graph = corpus::paw_graph();
    let coins = corpus::paw_coins();
    let shift = shift_operator(&graph);
    assert_eq!(max_abs_diff(shift.matrix(), &paw_shift_matrix()), 0.0);
    let coined = paw_shift_matrix().dot(&coins.direct_sum());

    // Staggered product from the frozen tessellation vectors.
    let expanded = paw_expanded();
    let u0 = reflection_from_polygons(8, paw_alpha()).unwrap();
    let u1 = reflection_from_polygons(8, paw_beta()).unwrap();
    let staggered = staggered_evolution(&u0, &u1, &expanded).unwrap();
    let diff_staggered = max_abs_diff(&staggered.matrix, &coined);
    assert!(
        diff_staggered <= 1e-12,
        "staggered vs coined: {diff_staggered}"
    );

    // Szegedy walk on the bipartite graph of polygon intersections, with the
    // weights frozen from the tessellation coefficients.
    let pairs = [
        (0, 0),
        (1, 0),
        (1, 1),
        (1, 2),
        (2, 1),
        (2, 3),
        (3, 2),
        (3, 3),
    ];
    let plus = (2.0 + 2.0_f64.sqrt()) / 4.0;
    let minus = (2.0 - 2.0_f64.sqrt()) / 4.0;
    let mut p = Array2::zeros((4, 4));
    p[[0, 0]] = 1.0;
    for y in 0..3 {
        p[[1, y]] = 1.0 / 3.0;
    }
    p[[2, 1]] = plus;
    p[[2, 3]] = minus;
    p[[3, 2]] = plus;
    p[[3, 3]] = minus;
    let mut q = Array2::zeros((4, 4));
    for (x, y) in pairs {
        q[[y, x]] = 0.5;
    }
    let spec = BipartiteWalkSpec::new(
        4,
        4,
        pairs.to_vec(),
        p,
        q,
        None,
        None,
        Default::default(),
    )
    .unwrap();

    // The conversion pipeline reproduces the frozen spec and map.
    let alpha = Tessellation::new(8, paw_alpha()).unwrap();
    let beta = Tessellation::new(8, paw_beta()).unwrap();
    let converted = staggered_to_szegedy(&expanded, &alpha, &beta).unwrap();
    assert_eq!(converted.map.pairs(), &pairs);
    for x in 0..4 {
        for y in 0..4 {
            assert!((converted.spec.p()[[x, y]] - spec.p()[[x, y]]).abs() <= 1e-12);
            assert!((converted.spec.q()[[y, x]] - spec.q()[[y, x]]).abs() <= 1e-12);
        }
    }

    let w = szegedy_evolution(&spec).unwrap();
    assert_eq!(w.nrows(), 16);
    let report = verify_equivalence(&coined, &w, &converted.map, 1e-12).unwrap();
    assert!(
        report.verdict,
        "szegedy vs coined: {}",
        report.max_abs_diff
    );
    assert_eq!(report.idle_dimension, 8);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 (paw instance exactness, staggered {diff_staggered:.2e}, szegedy {:.2e}, {elapsed:?}): PASS",
        report.max_abs_diff
    );
}

#[test]
fn c2_reflection_algebra() {
    for d in 1..=8 {
        let g = grover(d).unwrap();
        assert!(
            involution_residual(g.matrix()) <= 1e-12,
            "grover({d}) squared"
        );
        let refl = classify_reflection(g.matrix(), DEFAULT_TOL).unwrap();
        assert_eq!(refl.polygons().len(), 1, "grover({d}) polygon count");
        assert_eq!(refl.polygons()[0].support().len(), d);
        assert!(refl.is_orthogonal());
    }
    for n in 1..=8 {
        let minus_i = identity(n).mapv(|z| -z);
        let refl = classify_reflection(&minus_i, DEFAULT_TOL).unwrap();
        assert_eq!(refl.kind(), ReflectionKind::Partial);
        assert!(refl.polygons().is_empty());
    }
    let t = 1.0 / 3.0;
    let rows = [
        [-1.0, 2.0, 2.0, 0.0, 0.0],
        [2.0, -1.0, 2.0, 0.0, 0.0],
        [2.0, 2.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 3.0],
        [0.0, 0.0, 0.0, 3.0, 0.0],
    ];
    let five = Array2::from_shape_fn((5, 5), |(i, j)| c(rows[i][j] * t));
    let refl = classify_reflection(&five, DEFAULT_TOL).unwrap();
    let supports: Vec<&[usize]> = refl.polygons().iter().map(|p| p.support()).collect();
    assert_eq!(supports, vec![&[0, 1, 2][..], &[3, 4][..]]);
    println!("ACCEPTANCE 2 (reflection algebra): PASS");
}

#[test]
fn c3_coined_to_staggered_pipeline() {
    let corpus_walks: Vec<(&str, LabeledGraph, CoinAssignment)> = vec![
        ("path4", corpus::path(4), CoinAssignment::grover(&corpus::path(4)).unwrap()),
        ("cycle6", corpus::cycle(6), CoinAssignment::grover(&corpus::cycle(6)).unwrap()),
        ("complete5", corpus::complete(5), CoinAssignment::grover(&corpus::complete(5)).unwrap()),
        ("torus3x3", corpus::torus_3x3(), CoinAssignment::grover(&corpus::torus_3x3()).unwrap()),
        ("paw", corpus::paw_graph(), corpus::paw_coins()),
    ];
    let mut worst = 0.0f64;
    for (name, graph, coins) in &corpus_walks {
        let coined = coined_evolution(graph, coins).unwrap();
        let form = coined_to_staggered(graph, coins).unwrap();
        let u0 = form.alpha.reflection().unwrap();
        let u1 = form.beta.reflection().unwrap();
        let staggered = staggered_evolution(&u0, &u1, &form.graph).unwrap();
        let diff = max_abs_diff(&staggered.matrix, &coined);
        assert!(diff <= 1e-12, "{name}: {diff}");
        worst = worst.max(diff);
    }

    let k5 = corpus::complete(5);
    let err = coined_to_staggered(&k5, &CoinAssignment::repeated(&k5, &fourier(4)).unwrap())
        .unwrap_err();
    assert!(matches!(err, Error::CoinNotOrthogonalReflection { .. }));
    println!("ACCEPTANCE 3 (coined-to-staggered pipeline, worst diff {worst:.2e}): PASS");
}

#[test]
fn c4_szegedy_to_coined_round_trip() {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let spec = corpus::random_degree_two_spec(seed);
        let form = szegedy_to_coined(&spec).unwrap();
        let w = szegedy_evolution(&spec).unwrap();
        let coined = coined_evolution(&form.graph, &form.coins).unwrap();
        let report = verify_equivalence(&coined, &w, &form.map, 1e-12).unwrap();
        assert!(
            report.verdict,
            "seed {seed}: max diff {}",
            report.max_abs_diff
        );
        worst = worst.max(report.max_abs_diff);
    }

    let bad = BipartiteWalkSpec::uniform(3, 1, vec![(0, 0), (1, 0), (2, 0)]).unwrap();
    let err = szegedy_to_coined(&bad).unwrap_err();
    assert!(matches!(err, Error::HypothesisViolated { index: 0, .. }));
    println!("ACCEPTANCE 4 (szegedy-to-coined round trip x20, worst diff {worst:.2e}): PASS");
}

#[test]
fn c5_search_equivalence_on_torus() {
    let started = Instant::now();
    let graph = corpus::torus_3x3();
    let marked = MarkedSet::new([4]);
    let steps = 50;

    // (a) Coined abstract search from the uniform arc state.
    let search = abstract_search_coin(&graph, &marked).unwrap();
    let u_coined = coined_evolution(&graph, &search.coin).unwrap();
    let psi_coined = uniform_arc_state(&graph).unwrap();
    let coined_trace =
        success_probability_trace(&u_coined, &psi_coined, &marked, steps).unwrap();

    // (b) Generalized staggered walk, probabilities mapped back to vertices.
    let form = coined_search_to_szegedy(&graph, &marked).unwrap();
    let u0 = form.alpha.reflection().unwrap();
    assert_eq!(u0.kind(), ReflectionKind::Partial);
    let u1 = form.beta.reflection().unwrap();
    let staggered = staggered_evolution(&u0, &u1, &form.staggered_graph).unwrap();
    let n = form.staggered_graph.vertex_count();
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let basis = Basis::Coined {
        vertex_count: graph.vertex_count(),
        arc_vertices: form.vertex_origin.clone(),
    };
    let psi_staggered = WalkState::new(Array1::from_elem(n, amp), basis).unwrap();
    let staggered_trace =
        success_probability_trace(&staggered.matrix, &psi_staggered, &marked, steps).unwrap();

    // (c) Szegedy walk with the sink, initial state from pre-sink weights.
    let w = szegedy_evolution(&form.spec).unwrap();
    let pre_sink = coined_search_to_szegedy(&graph, &MarkedSet::default())
        .unwrap()
        .spec;
    let psi_szegedy = szegedy_edge_state(&pre_sink).unwrap();
    let szegedy_trace = success_probability_trace(&w, &psi_szegedy, &marked, steps).unwrap();

    let mut worst = 0.0f64;
    for t in 0..=steps {
        let a = coined_trace.rows[t].p_marked;
        let b = staggered_trace.rows[t].p_marked;
        let cc = szegedy_trace.rows[t].p_marked;
        worst = worst.max((a - b).abs()).max((a - cc).abs());
        assert!((a - b).abs() <= 1e-10, "t={t}: coined {a} vs staggered {b}");
        assert!((a - cc).abs() <= 1e-10, "t={t}: coined {a} vs szegedy {cc}");
    }
    assert!(
        (coined_trace.rows[0].p_marked - 1.0 / 9.0).abs() <= 1e-15,
        "p(0) = {}",
        coined_trace.rows[0].p_marked
    );
    assert!(
        coined_trace.max_p > 1.0 / 9.0,
        "no growth: max {}",
        coined_trace.max_p
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5 (search equivalence, worst trace diff {worst:.2e}, peak {:.4} at t={}, {elapsed:?}): PASS",
        coined_trace.max_p, coined_trace.argmax_t
    );
}

#[test]
fn c6_structural_invariants() {
    // Shift operators: involution + perfect matching classification.
    for (name, graph) in [
        ("path4", corpus::path(4)),
        ("cycle6", corpus::cycle(6)),
        ("complete5", corpus::complete(5)),
        ("torus3x3", corpus::torus_3x3()),
        ("paw", corpus::paw_graph()),
    ] {
        let s = shift_operator(&graph);
        assert_eq!(involution_residual(s.matrix()), 0.0, "{name}");
        let refl = classify_reflection(s.matrix(), DEFAULT_TOL).unwrap();
        assert_eq!(refl.polygons().len(), graph.edge_count(), "{name}");
        let mut covered = vec![false; graph.arc_count()];
        for polygon in refl.polygons() {
            assert_eq!(polygon.len(), 2, "{name}");
            for &a in polygon.support() {
                assert!(!covered[a], "{name}: arc {a} covered twice");
                covered[a] = true;
            }
        }
        assert!(covered.into_iter().all(|x| x), "{name}");
    }

    // Szegedy walks act as the exact identity on every non-edge column.
    for spec in [
        corpus::cubic_multigraph_spec(),
        corpus::random_degree_two_spec(3),
    ] {
        let w = szegedy_evolution(&spec).unwrap();
        let n = spec.y_count();
        for x in 0..spec.x_count() {
            for y in 0..n {
                if spec.is_edge(x, y) {
                    continue;
                }
                let col = x * n + y;
                for i in 0..w.nrows() {
                    let expected = if i == col { c(1.0) } else { c(0.0) };
                    assert_eq!(w[[i, col]], expected, "idle column {col}");
                }
            }
        }
    }

    // Norm conservation over 10^4 steps on the torus.
    let graph = corpus::torus_3x3();
    let u = coined_evolution(&graph, &CoinAssignment::grover(&graph).unwrap()).unwrap();
    let psi0 = uniform_arc_state(&graph).unwrap();
    let out = evolve(&u, &psi0, 10_000).unwrap();
    let drift = (out.norm() - 1.0).abs();
    assert!(drift <= 1e-10, "norm drift {drift}");
    println!("ACCEPTANCE 6 (structural invariants, norm drift {drift:.2e} after 1e4 steps): PASS");
}
