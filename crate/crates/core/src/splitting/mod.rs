//! Graphs of groups with trivial edge groups: generalised paths, normal
//! forms, graph self-maps and their iteration.
//!
//! Elements of the fundamental group are written over the union of the
//! vertex-group generators and one stable letter per non-tree edge. Under
//! that convention the reduced based path of an element has exactly the
//! element's word length: node lengths plus the number of non-tree edges.

mod graph_map;
mod one_edge;
mod path;

pub mod examples;

pub use graph_map::{
    CensusReport, EstimateRow, GraphMap, OmegaReport, OrderCensus, VertexMap,
};
pub use one_edge::{
    claim_un_check, direct_iterate, one_edge_iterate, u_n, ClaimReport, OneEdgeCase, Syllable,
};
pub use path::{GenPath, Token};

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::product::ProductElement;

/// The group attached to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexGroup {
    Trivial,
    Free(usize),
    Abelian(usize),
    Product { free: usize, abelian: usize },
}

impl VertexGroup {
    /// `(free rank, abelian rank)`.
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            VertexGroup::Trivial => (0, 0),
            VertexGroup::Free(r) => (r, 0),
            VertexGroup::Abelian(k) => (0, k),
            VertexGroup::Product { free, abelian } => (free, abelian),
        }
    }

    pub fn identity(&self) -> ProductElement {
        let (r, k) = self.dims();
        ProductElement::identity(r, k)
    }

    pub fn contains(&self, g: &ProductElement) -> bool {
        (g.h.rank(), g.a.len()) == self.dims()
    }

    /// Parse an element literal: a word, or `(word | vector)` when there is
    /// an abelian part.
    pub fn parse_element(&self, text: &str) -> Result<ProductElement> {
        let (r, k) = self.dims();
        ProductElement::parse(text, r, k)
    }

    pub fn format_element(&self, g: &ProductElement) -> String {
        if self.dims().1 == 0 {
            g.h.to_string()
        } else {
            g.to_string()
        }
    }
}

impl fmt::Display for VertexGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VertexGroup::Trivial => write!(f, "trivial"),
            VertexGroup::Free(r) => write!(f, "free({r})"),
            VertexGroup::Abelian(k) => write!(f, "abelian({k})"),
            VertexGroup::Product { free, abelian } => write!(f, "product({free},{abelian})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub group: VertexGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub from: usize,
    pub to: usize,
    /// Member of the chosen maximal tree.
    pub tree: bool,
}

/// An edge with an orientation; `rev` traverses it backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OEdge {
    pub id: usize,
    pub rev: bool,
}

impl OEdge {
    pub fn forward(id: usize) -> Self {
        OEdge { id, rev: false }
    }

    pub fn inverse(self) -> Self {
        OEdge {
            id: self.id,
            rev: !self.rev,
        }
    }
}

/// A finite connected graph with vertex groups, trivial edge groups, a base
/// vertex and a maximal tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    base: usize,
}

fn valid_edge_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn valid_vertex_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Inverse spelling of an edge name: first letter uppercased.
pub(crate) fn inverse_name(name: &str) -> String {
    let mut c = name.chars();
    match c.next() {
        Some(f) => f.to_ascii_uppercase().to_string() + c.as_str(),
        None => String::new(),
    }
}

impl GoGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, base: usize) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Empty("graph with no vertices".into()));
        }
        if base >= vertices.len() {
            return Err(Error::IndexOutOfRange {
                index: base,
                rank: vertices.len(),
            });
        }
        for (i, v) in vertices.iter().enumerate() {
            if !valid_vertex_name(&v.name) {
                return Err(Error::Malformed(format!("bad vertex name {:?}", v.name)));
            }
            if vertices[..i].iter().any(|u| u.name == v.name) {
                return Err(Error::Malformed(format!("duplicate vertex {:?}", v.name)));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if !valid_edge_name(&e.name) {
                return Err(Error::Malformed(format!(
                    "edge name {:?} must start with a lowercase letter",
                    e.name
                )));
            }
            if edges[..i].iter().any(|d| d.name == e.name) {
                return Err(Error::Malformed(format!("duplicate edge {:?}", e.name)));
            }
            for end in [e.from, e.to] {
                if end >= vertices.len() {
                    return Err(Error::IndexOutOfRange {
                        index: end,
                        rank: vertices.len(),
                    });
                }
            }
            if e.tree && e.from == e.to {
                return Err(Error::Precondition(format!("loop {:?} cannot be a tree edge", e.name)));
            }
        }
        let g = GoGraph {
            vertices,
            edges,
            base,
        };
        let tree_edges = g.edges.iter().filter(|e| e.tree).count();
        if tree_edges + 1 != g.vertices.len() || g.tree_parents(g.base).iter().any(Option::is_none) {
            return Err(Error::Precondition(
                "tree edges must form a spanning tree of a connected graph".into(),
            ));
        }
        Ok(g)
    }

    /// One trivial vertex `p` with a loop per name.
    pub fn rose(petals: &[&str]) -> Result<Self> {
        let edges = petals
            .iter()
            .map(|n| Edge {
                name: n.to_string(),
                from: 0,
                to: 0,
                tree: false,
            })
            .collect();
        GoGraph::new(
            vec![Vertex {
                name: "p".into(),
                group: VertexGroup::Trivial,
            }],
            edges,
            0,
        )
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    /// Resolve an edge name or its inverse spelling.
    pub fn edge_by_name(&self, name: &str) -> Option<OEdge> {
        if let Some(id) = self.edges.iter().position(|e| e.name == name) {
            return Some(OEdge::forward(id));
        }
        self.edges
            .iter()
            .position(|e| inverse_name(&e.name) == name)
            .map(|id| OEdge { id, rev: true })
    }

    pub fn edge_name(&self, e: OEdge) -> String {
        let n = &self.edges[e.id].name;
        if e.rev {
            inverse_name(n)
        } else {
            n.clone()
        }
    }

    pub fn origin(&self, e: OEdge) -> usize {
        let d = &self.edges[e.id];
        if e.rev {
            d.to
        } else {
            d.from
        }
    }

    pub fn terminus(&self, e: OEdge) -> usize {
        self.origin(e.inverse())
    }

    pub fn group(&self, v: usize) -> VertexGroup {
        self.vertices[v].group
    }

    /// BFS over tree edges from `root`: for each vertex, the oriented edge
    /// by which it was reached.
    fn tree_parents(&self, root: usize) -> Vec<Option<Option<OEdge>>> {
        let mut parent = vec![None; self.vertices.len()];
        parent[root] = Some(None);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for (id, e) in self.edges.iter().enumerate() {
                if !e.tree {
                    continue;
                }
                for oe in [OEdge::forward(id), OEdge { id, rev: true }] {
                    let w = self.terminus(oe);
                    if self.origin(oe) == u && parent[w].is_none() {
                        parent[w] = Some(Some(oe));
                        queue.push_back(w);
                    }
                }
            }
        }
        parent
    }

    /// The immersed tree path from `u` to `w`.
    pub fn tree_path(&self, u: usize, w: usize) -> Vec<OEdge> {
        let parent = self.tree_parents(u);
        let mut out = Vec::new();
        let mut cur = w;
        while let Some(Some(e)) = parent[cur] {
            out.push(e);
            cur = self.origin(e);
        }
        out.reverse();
        out
    }
}

#[cfg(test)]
mod tests;
