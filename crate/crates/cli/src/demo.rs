//! The `demo` subcommand: two end-to-end pipelines with deterministic
//! artifacts.
//!
//! 1. The paw-graph walk (identity, Grover, and Hadamard coins): coined →
//!    staggered → Szegedy, with equivalence reports at every hop.
//! 2. Search on the 3×3 torus with the center vertex marked: coined abstract
//!    search, generalized staggered, and Szegedy-with-sink traces.
//! 3. A seeded random Szegedy walk converted back to a coined walk.

use std::path::Path;

use ndarray::Array1;
use num_complex::Complex64;
use serde_json::json;

use qwalk_core::convert::{coined_to_staggered, staggered_to_szegedy, verify_equivalence};
use qwalk_core::corpus;
use qwalk_core::io::{
    BijectionFile, BipartiteFile, CoinedWalkFile, MatrixFile, ReportFile, StaggeredWalkFile,
};
use qwalk_core::search::{
    abstract_search_coin, coined_search_to_szegedy, success_probability_trace,
    szegedy_edge_state, szegedy_search_to_coined, uniform_arc_state, MarkedSet,
};
use qwalk_core::walk::{coined_evolution, staggered_evolution, szegedy_evolution, Basis, WalkState};

use crate::ops::{write_json, CliError, CliResult};
use crate::RunConfig;

pub fn run(out_dir: &Path, seed: u64, config: &RunConfig) -> CliResult {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::invalid(format!("creating {}: {e}", out_dir.display())))?;
    paw_pipeline(out_dir, config)?;
    torus_search_pipeline(out_dir, config)?;
    seeded_round_trip(out_dir, seed, config)?;
    Ok(())
}

fn paw_pipeline(dir: &Path, config: &RunConfig) -> CliResult {
    let graph = corpus::paw_graph();
    let coins = corpus::paw_coins();
    let coined = coined_evolution(&graph, &coins)?;
    write_json(
        &dir.join("paw_coined_operator.json"),
        &MatrixFile::from_matrix(&coined),
    )?;
    write_json(
        &dir.join("paw_walk.json"),
        &CoinedWalkFile::from_parts(&graph, &coins, &[]),
    )?;

    let staggered = coined_to_staggered(&graph, &coins)?;
    write_json(
        &dir.join("paw_staggered.json"),
        &StaggeredWalkFile::from_parts(&staggered.graph, &staggered.alpha, &staggered.beta),
    )?;
    let u0 = staggered.alpha.reflection()?;
    let u1 = staggered.beta.reflection()?;
    let staggered_op = staggered_evolution(&u0, &u1, &staggered.graph)?;
    let identity = qwalk_core::graph::Bijection::new(1, 8, (0..8).map(|i| (0, i)).collect())?;
    let report = verify_equivalence(&coined, &staggered_op.matrix, &identity, config.tolerance)?;
    write_json(
        &dir.join("paw_staggered_report.json"),
        &ReportFile::from_report(&report),
    )?;

    let szegedy = staggered_to_szegedy(&staggered.graph, &staggered.alpha, &staggered.beta)?;
    write_json(
        &dir.join("paw_szegedy.json"),
        &BipartiteFile::from_spec(&szegedy.spec),
    )?;
    write_json(
        &dir.join("paw_bijection.json"),
        &BijectionFile::from_bijection(&szegedy.map),
    )?;
    let w = szegedy_evolution(&szegedy.spec)?;
    let report = verify_equivalence(&coined, &w, &szegedy.map, config.tolerance)?;
    write_json(
        &dir.join("paw_szegedy_report.json"),
        &ReportFile::from_report(&report),
    )?;
    Ok(())
}

fn torus_search_pipeline(dir: &Path, config: &RunConfig) -> CliResult {
    let graph = corpus::torus_3x3();
    let marked = MarkedSet::new([4]);
    let steps = 50;

    let search = abstract_search_coin(&graph, &marked)?;
    let u_coined = coined_evolution(&graph, &search.coin)?;
    let psi_coined = uniform_arc_state(&graph)?;
    let coined_trace = success_probability_trace(&u_coined, &psi_coined, &marked, steps)?;
    write_text(dir, "torus_search_coined.csv", &coined_trace.to_csv())?;

    let form = coined_search_to_szegedy(&graph, &marked)?;
    write_json(
        &dir.join("torus_search_szegedy.json"),
        &BipartiteFile::from_spec(&form.spec),
    )?;
    let u0 = form.alpha.reflection()?;
    let u1 = form.beta.reflection()?;
    let staggered = staggered_evolution(&u0, &u1, &form.staggered_graph)?;
    let n = form.staggered_graph.vertex_count();
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let basis = Basis::Coined {
        vertex_count: graph.vertex_count(),
        arc_vertices: form.vertex_origin.clone(),
    };
    let psi_staggered = WalkState::new(Array1::from_elem(n, amp), basis)?;
    let staggered_trace =
        success_probability_trace(&staggered.matrix, &psi_staggered, &marked, steps)?;
    write_text(dir, "torus_search_staggered.csv", &staggered_trace.to_csv())?;

    let w = szegedy_evolution(&form.spec)?;
    let pre_sink = coined_search_to_szegedy(&graph, &MarkedSet::default())?.spec;
    write_json(
        &dir.join("torus_szegedy_presink.json"),
        &BipartiteFile::from_spec(&pre_sink),
    )?;
    let psi_szegedy = szegedy_edge_state(&pre_sink)?;
    let szegedy_trace = success_probability_trace(&w, &psi_szegedy, &marked, steps)?;
    write_text(dir, "torus_search_szegedy.csv", &szegedy_trace.to_csv())?;

    // Cross-model trace agreement, and the operator identity behind it.
    let mut max_trace_diff = 0.0f64;
    for t in 0..=steps {
        let a = coined_trace.rows[t].p_marked;
        max_trace_diff = max_trace_diff
            .max((a - staggered_trace.rows[t].p_marked).abs())
            .max((a - szegedy_trace.rows[t].p_marked).abs());
    }
    let operator_report = verify_equivalence(&u_coined, &w, &form.map, config.tolerance)?;
    let back = szegedy_search_to_coined(&form.spec)?;
    let recovered = coined_evolution(&back.graph, &back.coins)?;
    let identity =
        qwalk_core::graph::Bijection::new(1, 36, (0..36).map(|i| (0, i)).collect())?;
    let recovery_report =
        verify_equivalence(&u_coined, &recovered, &identity, config.tolerance)?;
    write_json(
        &dir.join("torus_search_report.json"),
        &json!({
            "schema": 1,
            "steps": steps,
            "max_trace_diff": max_trace_diff,
            "trace_verdict": max_trace_diff <= config.tolerance,
            "peak_probability": coined_trace.max_p,
            "peak_step": coined_trace.argmax_t,
            "operator_max_abs_diff": operator_report.max_abs_diff,
            "operator_verdict": operator_report.verdict,
            "sink_recovery_max_abs_diff": recovery_report.max_abs_diff,
            "sink_recovery_verdict": recovery_report.verdict,
        }),
    )
}

fn seeded_round_trip(dir: &Path, seed: u64, config: &RunConfig) -> CliResult {
    let spec = corpus::random_degree_two_spec(seed);
    write_json(
        &dir.join("roundtrip_szegedy.json"),
        &BipartiteFile::from_spec(&spec),
    )?;
    let form = qwalk_core::convert::szegedy_to_coined(&spec)?;
    write_json(
        &dir.join("roundtrip_coined.json"),
        &CoinedWalkFile::from_parts(&form.graph, &form.coins, &[]),
    )?;
    write_json(
        &dir.join("roundtrip_map.json"),
        &BijectionFile::from_bijection(&form.map),
    )?;
    let w = szegedy_evolution(&spec)?;
    let coined = coined_evolution(&form.graph, &form.coins)?;
    let report = verify_equivalence(&coined, &w, &form.map, config.tolerance)?;
    write_json(
        &dir.join("roundtrip_report.json"),
        &ReportFile::from_report(&report),
    )
}

fn write_text(dir: &Path, name: &str, text: &str) -> CliResult {
    std::fs::write(dir.join(name), text)
        .map_err(|e| CliError::invalid(format!("writing {name}: {e}")))
}
