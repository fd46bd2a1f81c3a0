//! Fixtures shared by the benchmarks.

use minorfolio::constructions::{gamma_hat_opts, gnp};
use minorfolio::embedding::{cylindrical_mesh_plane, mesh_rail, mesh_ring, ConcentricCycles};
use minorfolio::{AnnotatedGraph, Graph, RootedGraph};

/// Γ̂_2 rooted at its four terminals.
pub fn gamma_rooted() -> RootedGraph {
    let g = gamma_hat_opts(2, false).expect("k = 2 builds");
    RootedGraph::new(g.graph, &g.terminals).expect("terminals are in range")
}

/// A seeded random host with two red vertices.
pub fn random_annotated(n: usize, p: f64, seed: u64) -> AnnotatedGraph {
    AnnotatedGraph::new(gnp(n, p, seed), &[0, 1]).expect("n >= 2")
}

/// Γ̂_2 with a 12-clique hung on three non-terminal vertices.
pub fn gamma_with_clique() -> AnnotatedGraph {
    let g = gamma_hat_opts(2, false).expect("k = 2 builds");
    let base = g.graph.n();
    let mut edges = g.graph.edges();
    for a in 0..12 {
        for b in a + 1..12 {
            edges.push((base + a, base + b));
        }
    }
    edges.extend([(1, base), (4, base + 1), (7, base + 2)]);
    AnnotatedGraph::new(Graph::new(base + 12, &edges).expect("valid edges"), &g.terminals).expect("terminals are in range")
}

/// A cylindrical nest with `t` cycles and `paths` evenly spaced crossing rails.
pub fn mesh_nest(t: usize, paths: usize) -> (ConcentricCycles, Vec<Vec<usize>>) {
    let rails = 2 * paths;
    let plane = cylindrical_mesh_plane(t, rails).expect("mesh builds");
    let cc = ConcentricCycles::new(plane, (0..t).map(|r| mesh_ring(rails, r)).collect()).expect("rings are concentric");
    let crossing = (0..paths).map(|i| mesh_rail(rails, t - 1, 2 * i)).collect();
    (cc, crossing)
}
