//! Discrete-time quantum walk models and the constructive conversions between them.
//!
//! Three walk models are covered:
//!
//! - **Coined walks** on arbitrary (multi)graphs, driven by `U = S·C′` where `S` is
//!   the flip-flop shift and `C′` a direct sum of per-vertex coins.
//! - **Szegedy walks** on bipartite graphs, driven by `W = R₁·R₀`, two reflections
//!   built from right-stochastic matrices `P` and `Q` (with optional complex phases).
//! - **Staggered walks** on graph tessellations, driven by `U = U₁·U₀`, a product of
//!   two orthogonal reflections.
//!
//! The [`convert`] module turns each model into the others whenever the defining
//! operators lie in the shared class (coins that are orthogonal reflections; bipartite
//! graphs whose `Y`-vertices have degree 2 and half-weights), and
//! [`convert::verify_equivalence`] checks the resulting operators entry by entry.
//! The [`search`] module does the same for marked-vertex searching: the abstract
//! search coin (`−I` on marked vertices) maps to Szegedy walks with sinks.
//!
//! Everything is dense `f64`/`Complex64` linear algebra over explicit basis
//! labelings; operators stay small enough that exact entrywise comparison is the
//! primary correctness tool.
//!
//! ```
//! use qwalk_core::convert::{coined_to_staggered, staggered_to_szegedy, verify_equivalence};
//! use qwalk_core::walk::{coined_evolution, szegedy_evolution, CoinAssignment};
//! use qwalk_core::corpus;
//!
//! // A Grover walk on the 3×3 periodic lattice, pushed through both
//! // conversions and compared entry by entry with the Szegedy operator.
//! let graph = corpus::torus_3x3();
//! let coins = CoinAssignment::grover(&graph)?;
//! let coined = coined_evolution(&graph, &coins)?;
//!
//! let staggered = coined_to_staggered(&graph, &coins)?;
//! let szegedy = staggered_to_szegedy(&staggered.graph, &staggered.alpha, &staggered.beta)?;
//! let w = szegedy_evolution(&szegedy.spec)?;
//!
//! let report = verify_equivalence(&coined, &w, &szegedy.map, 1e-12)?;
//! assert!(report.verdict);
//! # Ok::<(), qwalk_core::Error>(())
//! ```

pub mod convert;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod reflection;
pub mod search;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{BipartiteWalkSpec, Bijection, LabeledGraph};
pub use reflection::{ReflectionKind, ReflectionOperator, Polygon, Tessellation};
pub use walk::{Basis, CoinAssignment, WalkState};
