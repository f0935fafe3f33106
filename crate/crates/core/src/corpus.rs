//! Ready-made graphs, coin assignments, and seeded random instances used by
//! the demo pipelines and the test suites.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{BipartiteWalkSpec, LabeledGraph};
use crate::reflection::{grover, hadamard};
use crate::walk::CoinAssignment;

/// Path graph `P_n`.
pub fn path(n: usize) -> LabeledGraph {
    let edges = (0..n.saturating_sub(1)).map(|v| (v, v + 1)).collect();
    LabeledGraph::from_edges(n, edges).expect("valid path")
}

/// Cycle graph `C_n` (`n >= 3`).
pub fn cycle(n: usize) -> LabeledGraph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let edges = (0..n).map(|v| (v, (v + 1) % n)).collect();
    LabeledGraph::from_edges(n, edges).expect("valid cycle")
}

/// Complete graph `K_n`.
pub fn complete(n: usize) -> LabeledGraph {
    let edges = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    LabeledGraph::from_edges(n, edges).expect("valid complete graph")
}

/// Two-dimensional lattice with periodic boundary conditions
/// (`rows, cols >= 3`); every vertex has degree 4.
pub fn torus(rows: usize, cols: usize) -> LabeledGraph {
    assert!(rows >= 3 && cols >= 3, "torus needs at least 3x3");
    let idx = |r: usize, c: usize| (r % rows) * cols + (c % cols);
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            edges.push((idx(r, c), idx(r, c + 1)));
            edges.push((idx(r, c), idx(r + 1, c)));
        }
    }
    LabeledGraph::from_edges(rows * cols, edges).expect("valid torus")
}

/// The 3×3 periodic lattice: 9 vertices, 18 edges, 4-regular.
pub fn torus_3x3() -> LabeledGraph {
    torus(3, 3)
}

/// The paw graph: a triangle `{1,2,3}` with a pendant vertex `0` attached to
/// vertex `1`; degrees 1, 3, 2, 2. The running non-regular demo instance.
pub fn paw_graph() -> LabeledGraph {
    LabeledGraph::from_edges(4, vec![(0, 1), (1, 2), (1, 3), (2, 3)]).expect("valid paw graph")
}

/// Demo coins for [`paw_graph`]: the 1×1 identity on the pendant vertex, the
/// Grover coin on the degree-3 vertex, Hadamard on the degree-2 vertices.
pub fn paw_coins() -> CoinAssignment {
    let one = Array2::from_elem((1, 1), Complex64::new(1.0, 0.0));
    let blocks = vec![
        one,
        grover(3).expect("d=3").matrix().clone(),
        hadamard(),
        hadamard(),
    ];
    CoinAssignment::new(blocks).expect("demo coins are unitary")
}

/// Bipartite spec whose contraction is a cubic 4-vertex multigraph with two
/// double edges: `|X| = 4` (degree 3), `|Y| = 6` (degree 2), uniform weights.
pub fn cubic_multigraph_spec() -> BipartiteWalkSpec {
    // y0, y1 double {0,1}; y2 = {0,2}; y3 = {1,3}; y4, y5 double {2,3}.
    let edges = vec![
        (0, 0),
        (0, 1),
        (0, 2),
        (1, 0),
        (1, 1),
        (1, 3),
        (2, 2),
        (2, 4),
        (2, 5),
        (3, 3),
        (3, 4),
        (3, 5),
    ];
    BipartiteWalkSpec::uniform(4, 6, edges).expect("valid biregular spec")
}

/// Seeded random bipartite spec satisfying the coined-conversion hypotheses:
/// every `y` has degree 2 and `q_yx = 1/2`, with random positive `p` rows.
pub fn random_degree_two_spec(seed: u64) -> BipartiteWalkSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(3..=6);
    // Connected loopless multigraph on m vertices: a random tree plus extras.
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for v in 1..m {
        let u = rng.random_range(0..v);
        pairs.push((u, v));
    }
    let extras = rng.random_range(1..=m);
    for _ in 0..extras {
        let u = rng.random_range(0..m);
        let mut w = rng.random_range(0..m);
        while w == u {
            w = rng.random_range(0..m);
        }
        pairs.push((u.min(w), u.max(w)));
    }

    let y_count = pairs.len();
    let mut edges = Vec::new();
    let mut q = Array2::zeros((y_count, m));
    for (y, &(u, w)) in pairs.iter().enumerate() {
        edges.push((u, y));
        edges.push((w, y));
        q[[y, u]] = 0.5;
        q[[y, w]] = 0.5;
    }
    let mut p = Array2::zeros((m, y_count));
    for x in 0..m {
        let neighbors: Vec<usize> = edges
            .iter()
            .filter(|&&(ex, _)| ex == x)
            .map(|&(_, y)| y)
            .collect();
        let weights: Vec<f64> = neighbors
            .iter()
            .map(|_| 0.1 + 0.9 * rng.random::<f64>())
            .collect();
        let total: f64 = weights.iter().sum();
        for (&y, w) in neighbors.iter().zip(&weights) {
            p[[x, y]] = w / total;
        }
    }
    BipartiteWalkSpec::new(m, y_count, edges, p, q, None, None, Default::default())
        .expect("generated spec is valid")
}

/// Seeded random connected cubic graph on 8 vertices, built as a union of
/// three disjoint perfect matchings (resampled until simple and connected).
pub fn random_cubic_graph(seed: u64) -> LabeledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 8;
    loop {
        let mut edges = Vec::new();
        for _ in 0..3 {
            let mut vertices: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                vertices.swap(i, j);
            }
            for pair in vertices.chunks(2) {
                edges.push((pair[0].min(pair[1]), pair[0].max(pair[1])));
            }
        }
        let mut sorted = edges.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != edges.len() {
            continue;
        }
        let graph = LabeledGraph::from_edges(n, edges).expect("valid matching union");
        if connected(&graph) {
            return graph;
        }
    }
}

fn connected(graph: &LabeledGraph) -> bool {
    let n = graph.vertex_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for j in 0..graph.degree(v) {
            let (w, _) = graph.arc_at(graph.paired_arc(graph.arc_index(v, j)));
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Seeded Haar-like random unitary: Gram-Schmidt of a complex Gaussian matrix.
pub fn random_unitary(n: usize, seed: u64) -> Array2<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = || {
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut columns: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| Complex64::new(gaussian(), gaussian())).collect())
        .collect();
    for k in 0..n {
        let (done, rest) = columns.split_at_mut(k);
        let column = &mut rest[0];
        for prev in done.iter() {
            let overlap: Complex64 = prev
                .iter()
                .zip(column.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for (entry, p) in column.iter_mut().zip(prev) {
                *entry -= overlap * p;
            }
        }
        let norm: f64 = column.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in column.iter_mut() {
            *z /= norm;
        }
    }
    Array2::from_shape_fn((n, n), |(i, j)| columns[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;

    #[test]
    fn family_sizes() {
        assert_eq!(path(4).edge_count(), 3);
        assert_eq!(cycle(6).edge_count(), 6);
        assert_eq!(complete(5).edge_count(), 10);
        let t = torus_3x3();
        assert_eq!(t.vertex_count(), 9);
        assert_eq!(t.edge_count(), 18);
        for v in 0..9 {
            assert_eq!(t.degree(v), 4);
        }
    }

    #[test]
    fn random_spec_satisfies_hypotheses() {
        for seed in 0..10 {
            let spec = random_degree_two_spec(seed);
            for y in 0..spec.y_count() {
                assert_eq!(spec.degree_y(y), 2, "seed {seed}");
                for x in 0..spec.x_count() {
                    let q = spec.q()[[y, x]];
                    assert!(q == 0.0 || q == 0.5);
                }
            }
            for x in 0..spec.x_count() {
                assert!(spec.degree_x(x) >= 1);
            }
        }
    }

    #[test]
    fn random_cubic_graph_is_cubic_and_connected() {
        for seed in 0..5 {
            let g = random_cubic_graph(seed);
            assert_eq!(g.vertex_count(), 8);
            for v in 0..8 {
                assert_eq!(g.degree(v), 3);
            }
            assert!(connected(&g));
        }
    }

    #[test]
    fn random_unitary_is_unitary_and_not_hermitian() {
        let u = random_unitary(4, 7);
        assert!(unitarity_residual(&u) < 1e-10);
        assert!(crate::linalg::hermitian_residual(&u) > 1e-3);
    }
}
