//! Command implementations: input detection, operator construction,
//! conversion, verification, searching, and matrix dumps.

use std::path::Path;
use std::process::ExitCode;

use ndarray::Array2;
use num_complex::Complex64;
use serde_json::{json, Value};

use qwalk_core::convert::{
    coined_to_staggered, staggered_to_szegedy, szegedy_to_coined, verify_equivalence,
};
use qwalk_core::graph::{line_graph, BipartiteWalkSpec, Bijection, LabeledGraph};
use qwalk_core::io::{
    BijectionFile, BipartiteFile, CoinedWalkFile, MatrixFile, ReportFile, StaggeredWalkFile,
    StateFile,
};
use qwalk_core::linalg::unitarity_residual;
use qwalk_core::reflection::{Polygon, Tessellation};
use qwalk_core::search::{
    abstract_search_coin, coined_search_to_szegedy, mark_sinks, success_probability_trace,
    szegedy_edge_state, szegedy_search_to_coined, uniform_arc_state, MarkedSet,
};
use qwalk_core::walk::{coined_evolution, staggered_evolution, szegedy_evolution, Basis, WalkState};
use qwalk_core::{Error, Result};

use crate::{DumpKind, Model, RunConfig};

/// Error with the exit code it maps to; JSON detail goes to stderr.
pub struct CliError {
    code: u8,
    payload: Value,
}

impl CliError {
    pub fn invalid(detail: String) -> Self {
        Self {
            code: 1,
            payload: json!({"error": "InvalidInput", "detail": detail}),
        }
    }

    fn io(context: &str, err: impl std::fmt::Display) -> Self {
        Self {
            code: 2,
            payload: json!({"error": "Io", "detail": format!("{context}: {err}")}),
        }
    }

    fn verdict_failed(report: &ReportFile) -> Self {
        Self {
            code: 1,
            payload: json!({
                "error": "VerdictFailed",
                "detail": format!("max_abs_diff = {}", report.max_abs_diff),
                "max_abs_diff": report.max_abs_diff,
            }),
        }
    }

    pub fn report(self) -> ExitCode {
        eprintln!("{}", self.payload);
        ExitCode::from(self.code)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let mut payload = json!({"error": err.code(), "detail": err.to_string()});
        if let Some(index) = err.index() {
            payload["index"] = json!(index);
        }
        Self { code: 1, payload }
    }
}

pub type CliResult<T = ()> = std::result::Result<T, CliError>;

fn read_json(path: &Path) -> CliResult<Value> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::io(&format!("parsing {}", path.display()), e))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::io(&format!("creating {}", parent.display()), e))?;
        }
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io("serializing output", e))?;
    text.push('\n');
    write_text(path, &text)
}

fn emit_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> CliResult {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::io("serializing output", e))?;
            println!("{text}");
            Ok(())
        }
    }
}

/// A walk input recognized from its JSON fields.
pub enum ModelInput {
    Coined {
        file: CoinedWalkFile,
        graph: LabeledGraph,
    },
    Szegedy(BipartiteWalkSpec),
    Staggered {
        graph: LabeledGraph,
        alpha: Tessellation,
        beta: Tessellation,
    },
    Operator(Array2<Complex64>),
}

impl ModelInput {
    pub fn name(&self) -> &'static str {
        match self {
            ModelInput::Coined { .. } => "coined",
            ModelInput::Szegedy(_) => "szegedy",
            ModelInput::Staggered { .. } => "staggered",
            ModelInput::Operator(_) => "operator",
        }
    }
}

/// Detect the model from the file's fields: `x`/`y` means a bipartite spec,
/// `alpha`/`beta` a staggered walk, `matrix` a raw operator, `vertices` a
/// coined walk (a bare graph gets the default Grover coin).
pub fn load_model(path: &Path) -> CliResult<ModelInput> {
    let value = read_json(path)?;
    let parse = |v: Value| -> CliResult<ModelInput> {
        if v.get("x").is_some() && v.get("y").is_some() {
            let file: BipartiteFile =
                serde_json::from_value(v).map_err(|e| CliError::io("bipartite input", e))?;
            Ok(ModelInput::Szegedy(file.to_spec()?))
        } else if v.get("alpha").is_some() && v.get("beta").is_some() {
            let file: StaggeredWalkFile =
                serde_json::from_value(v).map_err(|e| CliError::io("staggered input", e))?;
            let (graph, alpha, beta) = file.to_parts()?;
            Ok(ModelInput::Staggered { graph, alpha, beta })
        } else if v.get("matrix").is_some() {
            let file: MatrixFile =
                serde_json::from_value(v).map_err(|e| CliError::io("matrix input", e))?;
            Ok(ModelInput::Operator(file.to_matrix()?))
        } else if v.get("vertices").is_some() {
            let file: CoinedWalkFile =
                serde_json::from_value(v).map_err(|e| CliError::io("coined input", e))?;
            let graph = file.to_graph()?;
            Ok(ModelInput::Coined { file, graph })
        } else {
            Err(CliError::invalid(format!(
                "cannot recognize the model of {}",
                path.display()
            )))
        }
    };
    parse(value)
}

/// The evolution operator of a recognized input.
pub fn build_operator(input: &ModelInput) -> Result<Array2<Complex64>> {
    match input {
        ModelInput::Coined { file, graph } => {
            let coins = file.to_coins(graph)?;
            coined_evolution(graph, &coins)
        }
        ModelInput::Szegedy(spec) => szegedy_evolution(spec),
        ModelInput::Staggered { graph, alpha, beta } => {
            let u0 = alpha.reflection()?;
            let u1 = beta.reflection()?;
            Ok(staggered_evolution(&u0, &u1, graph)?.matrix)
        }
        ModelInput::Operator(matrix) => Ok(matrix.clone()),
    }
}

pub fn build(input: &Path, out: Option<&Path>, _config: &RunConfig) -> CliResult {
    let model = load_model(input)?;
    let operator = build_operator(&model)?;
    let mut summary = json!({
        "schema": 1,
        "model": model.name(),
        "dimension": operator.nrows(),
        "unitarity_residual": unitarity_residual(&operator),
    });
    match &model {
        ModelInput::Coined { graph, file } => {
            summary["vertices"] = json!(graph.vertex_count());
            summary["edges"] = json!(graph.edge_count());
            summary["arcs"] = json!(graph.arc_count());
            summary["marked"] = json!(file.marked);
        }
        ModelInput::Szegedy(spec) => {
            summary["x"] = json!(spec.x_count());
            summary["y"] = json!(spec.y_count());
            summary["edges"] = json!(spec.edge_count());
            summary["sinks"] = json!(spec.sinks().iter().collect::<Vec<_>>());
            summary["idle_dimension"] =
                json!(spec.x_count() * spec.y_count() - spec.edge_count());
        }
        ModelInput::Staggered { graph, alpha, beta } => {
            summary["vertices"] = json!(graph.vertex_count());
            summary["edges"] = json!(graph.edge_count());
            summary["alpha_polygons"] = json!(alpha.polygons().len());
            summary["beta_polygons"] = json!(beta.polygons().len());
        }
        ModelInput::Operator(_) => {}
    }
    emit_json(out, &summary)
}

pub fn dump(input: &Path, what: DumpKind, out: Option<&Path>) -> CliResult {
    let model = load_model(input)?;
    match what {
        DumpKind::Operator => {
            let operator = build_operator(&model)?;
            emit_json(out, &MatrixFile::from_matrix(&operator))
        }
        DumpKind::State => {
            let state = initial_state(&model)?;
            emit_json(out, &StateFile::from_state(&state))
        }
    }
}

/// The model's canonical uniform initial state.
fn initial_state(input: &ModelInput) -> CliResult<WalkState> {
    match input {
        ModelInput::Coined { graph, .. } => Ok(uniform_arc_state(graph)?),
        ModelInput::Szegedy(spec) => {
            if !spec.sinks().is_empty() {
                return Err(CliError::invalid(
                    "the initial state takes pre-sink weights; give the sink-free spec".into(),
                ));
            }
            Ok(szegedy_edge_state(spec)?)
        }
        ModelInput::Staggered { graph, .. } => {
            let n = graph.vertex_count();
            let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
            Ok(WalkState::new(
                ndarray::Array1::from_elem(n, amp),
                Basis::Vertices { count: n },
            )?)
        }
        ModelInput::Operator(_) => Err(CliError::invalid(
            "a raw operator has no canonical initial state".into(),
        )),
    }
}

fn expect_model(input: ModelInput, expected: Model, path: &Path) -> CliResult<ModelInput> {
    let ok = matches!(
        (&input, expected),
        (ModelInput::Coined { .. }, Model::Coined)
            | (ModelInput::Szegedy(_), Model::Szegedy)
            | (ModelInput::Staggered { .. }, Model::Staggered)
    );
    if ok {
        Ok(input)
    } else {
        Err(CliError::invalid(format!(
            "{} holds a {} input, which does not match --from/--model",
            path.display(),
            input.name()
        )))
    }
}

pub fn convert(
    from: Model,
    to: Model,
    input: &Path,
    out: &Path,
    map_out: Option<&Path>,
) -> CliResult {
    let model = expect_model(load_model(input)?, from, input)?;
    let mut map_file: Option<BijectionFile> = None;
    match (model, to) {
        (ModelInput::Coined { file, graph }, Model::Staggered) => {
            let marked = file.marked_set();
            if marked.is_empty() {
                let coins = file.to_coins(&graph)?;
                let form = coined_to_staggered(&graph, &coins)?;
                write_json(
                    out,
                    &StaggeredWalkFile::from_parts(&form.graph, &form.alpha, &form.beta),
                )?;
            } else {
                let form = coined_search_to_szegedy(&graph, &marked)?;
                write_json(
                    out,
                    &StaggeredWalkFile::from_parts(
                        &form.staggered_graph,
                        &form.alpha,
                        &form.beta,
                    ),
                )?;
            }
        }
        (ModelInput::Coined { file, graph }, Model::Szegedy) => {
            let marked = file.marked_set();
            if marked.is_empty() {
                let coins = file.to_coins(&graph)?;
                let staggered = coined_to_staggered(&graph, &coins)?;
                let form =
                    staggered_to_szegedy(&staggered.graph, &staggered.alpha, &staggered.beta)?;
                write_json(out, &BipartiteFile::from_spec(&form.spec))?;
                map_file = Some(BijectionFile::from_bijection(&form.map));
            } else {
                let form = coined_search_to_szegedy(&graph, &marked)?;
                write_json(out, &BipartiteFile::from_spec(&form.spec))?;
                map_file = Some(BijectionFile::from_bijection(&form.map));
            }
        }
        (ModelInput::Staggered { graph, alpha, beta }, Model::Szegedy) => {
            let form = staggered_to_szegedy(&graph, &alpha, &beta)?;
            write_json(out, &BipartiteFile::from_spec(&form.spec))?;
            map_file = Some(BijectionFile::from_bijection(&form.map));
        }
        (ModelInput::Szegedy(spec), Model::Coined) => {
            let form = if spec.sinks().is_empty() {
                szegedy_to_coined(&spec)?
            } else {
                szegedy_search_to_coined(&spec)?
            };
            let marked: Vec<usize> = spec.sinks().iter().copied().collect();
            write_json(
                out,
                &CoinedWalkFile::from_parts(&form.graph, &form.coins, &marked),
            )?;
            map_file = Some(BijectionFile::from_bijection(&form.map));
        }
        (ModelInput::Szegedy(spec), Model::Staggered) => {
            let (graph, alpha, beta) = szegedy_as_staggered(&spec)?;
            write_json(out, &StaggeredWalkFile::from_parts(&graph, &alpha, &beta))?;
        }
        (input, _) => {
            return Err(CliError::invalid(format!(
                "conversion from {} to the requested model is not supported",
                input.name()
            )));
        }
    }
    if let Some(path) = map_out {
        match &map_file {
            Some(file) => write_json(path, file)?,
            None => {
                return Err(CliError::invalid(
                    "this conversion has no basis map (the bases already coincide)".into(),
                ))
            }
        }
    }
    Ok(())
}

/// The staggered walk on the line graph underlying a Szegedy walk: polygons
/// are the `φ`/`ψ` vectors pushed through the edge ↔ vertex bijection.
fn szegedy_as_staggered(
    spec: &BipartiteWalkSpec,
) -> Result<(LabeledGraph, Tessellation, Tessellation)> {
    let (graph, map) = line_graph(spec)?;
    let mut alpha = Vec::new();
    for x in 0..spec.x_count() {
        if spec.is_sink(x) {
            continue;
        }
        let mut support = Vec::new();
        let mut amplitudes = Vec::new();
        for y in spec.neighbors_of_x(x) {
            let w = spec.p()[[x, y]];
            if w > 0.0 {
                let angle = spec.theta().map_or(0.0, |t| t[[x, y]]);
                support.push(map.index_of(x, y).expect("edge in bijection"));
                amplitudes.push(Complex64::from_polar(w.sqrt(), angle));
            }
        }
        if !support.is_empty() {
            alpha.push(Polygon::new(support, amplitudes)?);
        }
    }
    let mut beta = Vec::new();
    for y in 0..spec.y_count() {
        let mut support = Vec::new();
        let mut amplitudes = Vec::new();
        for x in spec.neighbors_of_y(y) {
            let w = spec.q()[[y, x]];
            if w > 0.0 {
                let angle = spec.theta_prime().map_or(0.0, |t| t[[x, y]]);
                support.push(map.index_of(x, y).expect("edge in bijection"));
                amplitudes.push(Complex64::from_polar(w.sqrt(), angle));
            }
        }
        if !support.is_empty() {
            beta.push(Polygon::new(support, amplitudes)?);
        }
    }
    let n = graph.vertex_count();
    Ok((graph, Tessellation::new(n, alpha)?, Tessellation::new(n, beta)?))
}

pub fn verify(
    a: &Path,
    b: &Path,
    map: Option<&Path>,
    out: Option<&Path>,
    config: &RunConfig,
) -> CliResult {
    let u_a = build_operator(&load_model(a)?)?;
    let u_b = build_operator(&load_model(b)?)?;
    let map = match map {
        Some(path) => {
            let value = read_json(path)?;
            let file: BijectionFile =
                serde_json::from_value(value).map_err(|e| CliError::io("map input", e))?;
            file.to_bijection()?
        }
        None => {
            if u_a.nrows() != u_b.nrows() {
                return Err(CliError::invalid(format!(
                    "dimensions {} and {} differ; provide --map",
                    u_a.nrows(),
                    u_b.nrows()
                )));
            }
            identity_map(u_a.nrows())?
        }
    };
    let report = verify_equivalence(&u_a, &u_b, &map, config.tolerance)?;
    let file = ReportFile::from_report(&report);
    emit_json(out, &file)?;
    if file.verdict {
        Ok(())
    } else {
        Err(CliError::verdict_failed(&file))
    }
}

fn identity_map(n: usize) -> Result<Bijection> {
    Bijection::new(1, n, (0..n).map(|i| (0, i)).collect())
}

pub fn search(
    model: Model,
    graph_path: &Path,
    marked: &[usize],
    steps: usize,
    out: &Path,
    per_position_out: Option<&Path>,
) -> CliResult {
    let marked_set = MarkedSet::new(marked.iter().copied());
    let (u, psi0, positions) = match (load_model(graph_path)?, model) {
        (ModelInput::Coined { graph, file }, Model::Coined) => {
            let union: MarkedSet =
                MarkedSet::new(marked.iter().copied().chain(file.marked.iter().copied()));
            let search = abstract_search_coin(&graph, &union)?;
            let u = coined_evolution(&graph, &search.coin)?;
            let psi0 = uniform_arc_state(&graph)?;
            (u, psi0, union)
        }
        (ModelInput::Szegedy(spec), Model::Szegedy) => {
            // The initial state takes the weights before any sink is cut.
            if !spec.sinks().is_empty() {
                return Err(CliError::invalid(
                    "the input spec already has sinks; give the pre-sink spec and mark \
                     vertices with --marked"
                        .into(),
                ));
            }
            let sunk = mark_sinks(&spec, &marked_set)?;
            let w = szegedy_evolution(&sunk)?;
            let psi0 = szegedy_edge_state(&spec)?;
            (w, psi0, marked_set)
        }
        (ModelInput::Staggered { graph, alpha, beta }, Model::Staggered) => {
            staggered_search_walk(&graph, &alpha, &beta, &marked_set)?
        }
        (input, _) => {
            return Err(CliError::invalid(format!(
                "{} holds a {} input, which does not match --model",
                graph_path.display(),
                input.name()
            )));
        }
    };
    let trace = success_probability_trace(&u, &psi0, &positions, steps)?;
    write_text(out, &trace.to_csv())?;
    if let Some(path) = per_position_out {
        write_text(path, &qwalk_core::io::probability_trace_csv(&u, &psi0, steps)?)?;
    }
    Ok(())
}

/// Generalized staggered search: drop the marked `α` polygons; the marked
/// positions are the vertices those polygons covered.
fn staggered_search_walk(
    graph: &LabeledGraph,
    alpha: &Tessellation,
    beta: &Tessellation,
    marked: &MarkedSet,
) -> Result<(Array2<Complex64>, WalkState, MarkedSet)> {
    if let Some(bad) = marked.iter().find(|&k| k >= alpha.polygons().len()) {
        return Err(Error::VertexOutOfRange {
            vertex: bad,
            count: alpha.polygons().len(),
        });
    }
    let mut survivors = Vec::new();
    let mut marked_vertices = Vec::new();
    for (k, polygon) in alpha.polygons().iter().enumerate() {
        if marked.contains(k) {
            marked_vertices.extend_from_slice(polygon.support());
        } else {
            survivors.push(polygon.clone());
        }
    }
    let partial = Tessellation::new(alpha.dimension(), survivors)?;
    let u0 = partial.reflection()?;
    let u1 = beta.reflection()?;
    let walk = staggered_evolution(&u0, &u1, graph)?;
    let n = graph.vertex_count();
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let psi0 = WalkState::new(
        ndarray::Array1::from_elem(n, amp),
        Basis::Vertices { count: n },
    )?;
    Ok((walk.matrix, psi0, MarkedSet::new(marked_vertices)))
}
