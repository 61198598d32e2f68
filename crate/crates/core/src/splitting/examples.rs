//! Ready-made graph maps used by tests and the command line.

use super::{Edge, GenPath, GoGraph, GraphMap, Vertex, VertexGroup, VertexMap};
use crate::error::Result;
use crate::fgaut::FreeEnd;

fn build(graph: GoGraph, images: &[&str], vertex_maps: Vec<VertexMap>) -> Result<GraphMap> {
    let paths = graph
        .edges()
        .iter()
        .zip(images)
        .map(|(e, text)| GenPath::parse(&graph, e.from, text))
        .collect::<Result<Vec<_>>>()?;
    GraphMap::new(graph, paths, vertex_maps)
}

/// The positive automorphism `a→ab, b→bc, c→cab` as a map of the
/// three-petal rose.
pub fn pf_rose() -> GraphMap {
    let g = GoGraph::rose(&["a", "b", "c"]).expect("valid rose");
    build(g, &["a b", "b c", "c a b"], vec![VertexMap::identity(VertexGroup::Trivial)])
        .expect("valid map")
}

/// A trivial vertex `p` with petals `a`, `b`, joined by the tree edge `e`
/// to a rank-2 free vertex `v` carrying `x→xy, y→x`.
pub fn mixed() -> GraphMap {
    let g = GoGraph::new(
        vec![
            Vertex {
                name: "p".into(),
                group: VertexGroup::Trivial,
            },
            Vertex {
                name: "v".into(),
                group: VertexGroup::Free(2),
            },
        ],
        vec![
            Edge {
                name: "a".into(),
                from: 0,
                to: 0,
                tree: false,
            },
            Edge {
                name: "b".into(),
                from: 0,
                to: 0,
                tree: false,
            },
            Edge {
                name: "e".into(),
                from: 0,
                to: 1,
                tree: true,
            },
        ],
        0,
    )
    .expect("valid graph");
    let psi = VertexMap::free(FreeEnd::parse(&["ab", "a"]).expect("valid"));
    build(
        g,
        &["a e [a] E b", "b a e [b] E", "a b e"],
        vec![VertexMap::identity(VertexGroup::Trivial), psi],
    )
    .expect("valid map")
}

/// Two rank-2 free vertices `u`, `w` joined by a tree edge `e` and a
/// second edge `t`, with nontrivial automorphisms at both ends.
pub fn two_vertex() -> GraphMap {
    let g = GoGraph::new(
        vec![
            Vertex {
                name: "u".into(),
                group: VertexGroup::Free(2),
            },
            Vertex {
                name: "w".into(),
                group: VertexGroup::Free(2),
            },
        ],
        vec![
            Edge {
                name: "e".into(),
                from: 0,
                to: 1,
                tree: true,
            },
            Edge {
                name: "t".into(),
                from: 0,
                to: 1,
                tree: false,
            },
        ],
        0,
    )
    .expect("valid graph");
    let psi_u = VertexMap::free(FreeEnd::parse(&["ab", "a"]).expect("valid"));
    let psi_w = VertexMap::free(FreeEnd::parse(&["b", "aB"]).expect("valid"));
    build(g, &["t [a] E [b] e", "e [a] T [a] t"], vec![psi_u, psi_w]).expect("valid map")
}
