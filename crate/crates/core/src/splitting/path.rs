use std::fmt;

use num_bigint::BigUint;

use super::{GoGraph, OEdge};
use crate::error::{Error, Result};
use crate::product::{Metric, ProductElement};
use crate::word::letter_cap;

/// A generalised path `g₀ e₁ g₁ … e_s g_s`, with an order tag per node.
///
/// Equality ignores the order tags.
#[derive(Debug, Clone)]
pub struct GenPath {
    start: usize,
    nodes: Vec<ProductElement>,
    edges: Vec<OEdge>,
    orders: Vec<u32>,
}

impl PartialEq for GenPath {
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start && self.edges == other.edges && self.nodes == other.nodes
    }
}

impl Eq for GenPath {}

/// One letter of an element word: a vertex-group syllable or a stable letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Node(usize, ProductElement),
    Stable(OEdge),
}

/// Split on whitespace outside `(…)` and `[…]`.
fn split_tokens(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for c in text.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Malformed(format!("unbalanced {c:?} in {text:?}")));
                }
            }
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(c);
        }
    }
    if depth != 0 {
        return Err(Error::Malformed(format!("unbalanced brackets in {text:?}")));
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

impl GenPath {
    pub fn new(
        graph: &GoGraph,
        start: usize,
        nodes: Vec<ProductElement>,
        edges: Vec<OEdge>,
    ) -> Result<Self> {
        if start >= graph.vertices().len() {
            return Err(Error::IndexOutOfRange {
                index: start,
                rank: graph.vertices().len(),
            });
        }
        if nodes.len() != edges.len() + 1 {
            return Err(Error::Malformed(format!(
                "{} nodes for {} edges",
                nodes.len(),
                edges.len()
            )));
        }
        let mut v = start;
        for (j, g) in nodes.iter().enumerate() {
            if j > 0 {
                let e = edges[j - 1];
                if e.id >= graph.edges().len() {
                    return Err(Error::IndexOutOfRange {
                        index: e.id,
                        rank: graph.edges().len(),
                    });
                }
                if graph.origin(e) != v {
                    return Err(Error::Malformed(format!(
                        "edge {} does not start at {}",
                        graph.edge_name(e),
                        graph.vertices()[v].name
                    )));
                }
                v = graph.terminus(e);
            }
            if !graph.group(v).contains(g) {
                return Err(Error::DimensionMismatch(format!(
                    "node {j} is not in the group of vertex {}",
                    graph.vertices()[v].name
                )));
            }
        }
        let orders = vec![0; nodes.len()];
        Ok(GenPath {
            start,
            nodes,
            edges,
            orders,
        })
    }

    /// The constant path at `v`.
    pub fn trivial(graph: &GoGraph, v: usize) -> Self {
        GenPath {
            start: v,
            nodes: vec![graph.group(v).identity()],
            edges: vec![],
            orders: vec![0],
        }
    }

    /// An edge path with trivial nodes.
    pub fn from_edges(graph: &GoGraph, start: usize, edges: &[OEdge]) -> Result<Self> {
        let mut nodes = vec![graph.group(start).identity()];
        for &e in edges {
            nodes.push(graph.group(graph.terminus(e)).identity());
        }
        GenPath::new(graph, start, nodes, edges.to_vec())
    }

    pub(crate) fn from_parts_unchecked(
        start: usize,
        nodes: Vec<ProductElement>,
        edges: Vec<OEdge>,
        orders: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(nodes.len(), edges.len() + 1);
        debug_assert_eq!(orders.len(), nodes.len());
        GenPath {
            start,
            nodes,
            edges,
            orders,
        }
    }

    /// Parse a path literal such as `a e [x] E b`: edge names (uppercase
    /// first letter for the reverse) and bracketed node elements, which
    /// multiply into the current node.
    pub fn parse(graph: &GoGraph, start: usize, text: &str) -> Result<Self> {
        if start >= graph.vertices().len() {
            return Err(Error::IndexOutOfRange {
                index: start,
                rank: graph.vertices().len(),
            });
        }
        let mut v = start;
        let mut nodes = vec![graph.group(v).identity()];
        let mut edges = Vec::new();
        for tok in split_tokens(text)? {
            if let Some(inner) = tok.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let g = graph.group(v).parse_element(inner)?;
                let last = nodes.last_mut().expect("nonempty");
                *last = last.mul(&g)?;
            } else if tok == "1" {
                continue;
            } else {
                let e = graph
                    .edge_by_name(&tok)
                    .ok_or_else(|| Error::Malformed(format!("unknown edge {tok:?}")))?;
                if graph.origin(e) != v {
                    return Err(Error::Malformed(format!(
                        "edge {tok} does not start at vertex {}",
                        graph.vertices()[v].name
                    )));
                }
                v = graph.terminus(e);
                edges.push(e);
                nodes.push(graph.group(v).identity());
            }
        }
        GenPath::new(graph, start, nodes, edges)
    }

    /// Path literal with identity nodes omitted; `1` for the trivial path.
    pub fn format(&self, graph: &GoGraph) -> String {
        let mut parts = Vec::new();
        let mut v = self.start;
        for (j, g) in self.nodes.iter().enumerate() {
            if j > 0 {
                let e = self.edges[j - 1];
                parts.push(graph.edge_name(e));
                v = graph.terminus(e);
            }
            if !g.is_identity() {
                parts.push(format!("[{}]", graph.group(v).format_element(g)));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self, graph: &GoGraph) -> usize {
        self.edges.last().map_or(self.start, |&e| graph.terminus(e))
    }

    pub fn nodes(&self) -> &[ProductElement] {
        &self.nodes
    }

    pub fn edges(&self) -> &[OEdge] {
        &self.edges
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// Vertex occupied by each node.
    pub fn node_vertices(&self, graph: &GoGraph) -> Vec<usize> {
        std::iter::once(self.start)
            .chain(self.edges.iter().map(|&e| graph.terminus(e)))
            .collect()
    }

    /// Edge length `ℓ(π) = s`.
    pub fn edge_length(&self) -> usize {
        self.edges.len()
    }

    /// `(ℓ(π), |π|)` with `|π| = s + Σ|gⱼ|`.
    pub fn lengths(&self) -> (usize, BigUint) {
        let s = self.edges.len();
        let total = self
            .nodes
            .iter()
            .fold(BigUint::from(s), |acc, g| acc + g.length(Metric::Word));
        (s, total)
    }

    pub fn is_closed(&self, graph: &GoGraph) -> bool {
        self.end(graph) == self.start
    }

    pub fn is_immersed(&self) -> bool {
        (1..self.edges.len()).all(|j| !(self.nodes[j].is_identity() && self.edges[j] == self.edges[j - 1].inverse()))
    }

    pub fn inverse(&self, graph: &GoGraph) -> GenPath {
        GenPath {
            start: self.end(graph),
            nodes: self.nodes.iter().rev().map(ProductElement::inverse).collect(),
            edges: self.edges.iter().rev().map(|e| e.inverse()).collect(),
            orders: self.orders.iter().rev().copied().collect(),
        }
    }

    /// Concatenation; the junction nodes multiply and keep the larger order.
    pub fn concat(&self, graph: &GoGraph, other: &GenPath) -> Result<GenPath> {
        if self.end(graph) != other.start {
            return Err(Error::Malformed("paths do not meet".into()));
        }
        let mut out = self.clone();
        let last = out.nodes.len() - 1;
        out.nodes[last] = out.nodes[last].mul(&other.nodes[0])?;
        out.orders[last] = out.orders[last].max(other.orders[0]);
        out.edges.extend_from_slice(&other.edges);
        out.nodes.extend_from_slice(&other.nodes[1..]);
        out.orders.extend_from_slice(&other.orders[1..]);
        if out.edges.len() > letter_cap() {
            return Err(Error::CapExceeded {
                len: out.edges.len(),
                cap: letter_cap(),
            });
        }
        Ok(out)
    }

    /// Multiply `g` into the final node.
    pub fn push_element(&mut self, g: &ProductElement) -> Result<()> {
        let last = self.nodes.len() - 1;
        self.nodes[last] = self.nodes[last].mul(g)?;
        Ok(())
    }

    /// Erase back-tracks `e gⱼ=1 e⁻¹`, merging neighbours, until immersed.
    /// Merged nodes keep the larger of the two orders.
    pub fn pull_tight(&self) -> Result<GenPath> {
        let mut nodes = vec![self.nodes[0].clone()];
        let mut orders = vec![self.orders[0]];
        let mut edges: Vec<OEdge> = Vec::with_capacity(self.edges.len());
        for (j, &e) in self.edges.iter().enumerate() {
            let g = &self.nodes[j + 1];
            let o = self.orders[j + 1];
            let top = nodes.len() - 1;
            if nodes[top].is_identity() && edges.last() == Some(&e.inverse()) {
                edges.pop();
                nodes.pop();
                let ot = orders.pop().expect("nonempty");
                let top = nodes.len() - 1;
                nodes[top] = nodes[top].mul(g)?;
                orders[top] = orders[top].max(o).max(ot);
            } else {
                edges.push(e);
                nodes.push(g.clone());
                orders.push(o);
            }
        }
        Ok(GenPath {
            start: self.start,
            nodes,
            edges,
            orders,
        })
    }

    /// The reduced path based at the base vertex representing a word.
    pub fn from_element(graph: &GoGraph, tokens: &[Token]) -> Result<GenPath> {
        let mut path = GenPath::trivial(graph, graph.base());
        let mut cur = graph.base();
        for t in tokens {
            match t {
                Token::Node(v, g) => {
                    let tp = graph.tree_path(cur, *v);
                    path = path.concat(graph, &GenPath::from_edges(graph, cur, &tp)?)?;
                    if !graph.group(*v).contains(g) {
                        return Err(Error::DimensionMismatch(format!(
                            "element not in the group of vertex {}",
                            graph.vertices()[*v].name
                        )));
                    }
                    path.push_element(g)?;
                    cur = *v;
                }
                Token::Stable(e) => {
                    if graph.edges()[e.id].tree {
                        return Err(Error::Malformed(format!(
                            "{} is a tree edge, not a stable letter",
                            graph.edge_name(*e)
                        )));
                    }
                    let o = graph.origin(*e);
                    let mut tp = graph.tree_path(cur, o);
                    tp.push(*e);
                    path = path.concat(graph, &GenPath::from_edges(graph, cur, &tp)?)?;
                    cur = graph.terminus(*e);
                }
            }
        }
        let back = graph.tree_path(cur, graph.base());
        path = path.concat(graph, &GenPath::from_edges(graph, cur, &back)?)?;
        path.pull_tight()
    }

    /// Canonical word of a closed path at the base vertex: nontrivial nodes
    /// and non-tree edges in order. Reduced paths give reduced words.
    pub fn to_element(&self, graph: &GoGraph) -> Result<Vec<Token>> {
        if self.start != graph.base() || !self.is_closed(graph) {
            return Err(Error::Precondition("path is not a closed loop at the base vertex".into()));
        }
        let vs = self.node_vertices(graph);
        let mut out = Vec::new();
        for (j, g) in self.nodes.iter().enumerate() {
            if j > 0 {
                let e = self.edges[j - 1];
                if !graph.edges()[e.id].tree {
                    out.push(Token::Stable(e));
                }
            }
            if !g.is_identity() {
                out.push(Token::Node(vs[j], g.clone()));
            }
        }
        Ok(out)
    }

    /// Word length of the represented element: `Σ|gⱼ|` plus the number of
    /// non-tree edges, on the reduced path.
    pub fn element_length(&self, graph: &GoGraph) -> Result<BigUint> {
        let p = self.pull_tight()?;
        let stable = p.edges.iter().filter(|e| !graph.edges()[e.id].tree).count();
        Ok(p
            .nodes
            .iter()
            .fold(BigUint::from(stable), |acc, g| acc + g.length(Metric::Word)))
    }

    /// Cyclically tightened form and conjugacy length of a closed path.
    ///
    /// The form is closed with its last node trivial, rotated to a canonical
    /// starting point, so conjugate loops give identical forms.
    pub fn conj_normal_form(&self, graph: &GoGraph) -> Result<(GenPath, BigUint)> {
        if !self.is_closed(graph) {
            return Err(Error::Precondition("conjugacy form needs a closed path".into()));
        }
        let p = self.pull_tight()?;
        let mut start = p.start;
        // trim matching ends: edges[lo..hi], nodes[lo..=hi]
        let (mut lo, mut hi) = (0, p.edges.len());
        while hi - lo >= 2 {
            let joined = p.nodes[hi].mul(&p.nodes[lo])?;
            if joined.is_identity() && p.edges[hi - 1] == p.edges[lo].inverse() {
                start = graph.terminus(p.edges[lo]);
                lo += 1;
                hi -= 1;
            } else {
                break;
            }
        }
        let nodes = p.nodes[lo..=hi].to_vec();
        let edges = p.edges[lo..hi].to_vec();
        let id = |v: usize| graph.group(v).identity();
        if edges.is_empty() {
            let g = nodes[0].clone();
            let len = g.length(Metric::Conjugacy);
            let core = g.h.cyclic_reduce().core;
            let core = min_rotation(&core);
            let form = GenPath::from_parts_unchecked(
                start,
                vec![ProductElement::new(core, g.a)],
                vec![],
                vec![0],
            );
            return Ok((form, len));
        }
        // cyclic sequence of (node before edge, edge)
        let s = edges.len();
        let mut cyc: Vec<(ProductElement, OEdge)> = Vec::with_capacity(s);
        cyc.push((nodes[s].mul(&nodes[0])?, edges[0]));
        for j in 1..s {
            cyc.push((nodes[j].clone(), edges[j]));
        }
        let stable = edges.iter().filter(|e| !graph.edges()[e.id].tree).count();
        let len = cyc
            .iter()
            .fold(BigUint::from(stable), |acc, (g, _)| acc + g.length(Metric::Word));
        let keys: Vec<(OEdge, &[i32], &[num_bigint::BigInt])> =
            cyc.iter().map(|(g, e)| (*e, g.h.letters(), g.a.0.as_slice())).collect();
        let best = least_rotation(&keys);
        let rot: Vec<_> = (0..s).map(|i| cyc[(best + i) % s].clone()).collect();
        let start = graph.origin(rot[0].1);
        let mut fnodes: Vec<ProductElement> = rot.iter().map(|(g, _)| g.clone()).collect();
        fnodes.push(id(start));
        let fedges = rot.iter().map(|(_, e)| *e).collect();
        let orders = vec![0; fnodes.len()];
        Ok((GenPath::from_parts_unchecked(start, fnodes, fedges, orders), len))
    }
}

/// Start of the lexicographically least rotation of a cyclic sequence, in
/// linear time (two-candidate scan).
pub(crate) fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0, 1, 0);
    while i < n && j < n && k < n {
        match s[(i + k) % n].cmp(&s[(j + k) % n]) {
            std::cmp::Ordering::Equal => k += 1,
            ord => {
                if ord == std::cmp::Ordering::Greater {
                    i += k + 1;
                } else {
                    j += k + 1;
                }
                if i == j {
                    j += 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

fn min_rotation(w: &crate::word::Word) -> crate::word::Word {
    let l = w.letters();
    if l.is_empty() {
        return w.clone();
    }
    let best = least_rotation(l);
    let rotated: Vec<i32> = l[best..].iter().chain(&l[..best]).copied().collect();
    crate::word::Word::from_letters(w.rank(), rotated).expect("rotation of a cyclic word")
}

impl Token {
    /// Parse an element word: `v.word` or `v.(word | vector)` for vertex
    /// syllables, edge names for stable letters, `1` for the identity.
    pub fn parse_word(graph: &GoGraph, text: &str) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        for tok in split_tokens(text)? {
            if tok == "1" {
                continue;
            }
            if let Some((v, g)) = tok.split_once('.') {
                let vi = graph
                    .vertex_index(v)
                    .ok_or_else(|| Error::Malformed(format!("unknown vertex {v:?}")))?;
                out.push(Token::Node(vi, graph.group(vi).parse_element(g)?));
            } else {
                let e = graph
                    .edge_by_name(&tok)
                    .ok_or_else(|| Error::Malformed(format!("unknown stable letter {tok:?}")))?;
                if graph.edges()[e.id].tree {
                    return Err(Error::Malformed(format!("{tok} is a tree edge")));
                }
                out.push(Token::Stable(e));
            }
        }
        Ok(out)
    }

    pub fn format_word(graph: &GoGraph, tokens: &[Token]) -> String {
        if tokens.is_empty() {
            return "1".into();
        }
        tokens
            .iter()
            .map(|t| match t {
                Token::Node(v, g) => format!(
                    "{}.{}",
                    graph.vertices()[*v].name,
                    graph.group(*v).format_element(g)
                ),
                Token::Stable(e) => graph.edge_name(*e),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Node(v, g) => write!(f, "v{v}.{g}"),
            Token::Stable(e) => write!(f, "e{}{}", e.id, if e.rev { "⁻¹" } else { "" }),
        }
    }
}
