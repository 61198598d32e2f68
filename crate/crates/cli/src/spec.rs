//! The `.gspec` experiment description format.
//!
//! ```text
//! # comment
//! group F3: free(3)
//! aut phi on F3:
//!   a -> ab
//!   b -> bc
//!   c -> cab
//! experiment pf: aut=phi elements={a, b, ab} n_max=18 metric=conj
//! ```
//!
//! Top-level declarations start in column 1; their bodies are indented.
//! Product automorphisms also list inverse images (`A -> …`) so that the
//! automorphism can be verified, plus `psi = [..]` and `alpha = [..]`.

use std::fmt::{self, Write as _};

use growthlab_core::fgaut::{AutWitness, FreeEnd};
use growthlab_core::product::{Metric, ProductAut, ProductElement};
use growthlab_core::splitting::{Edge, GenPath, GoGraph, GraphMap, Token, Vertex, VertexGroup, VertexMap};
use growthlab_core::word::Word;
use growthlab_core::zlin::{IntMatrix, IntVector};
use growthlab_core::Error as CoreError;

/// A syntax or semantic error with a 1-based source location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutKind {
    Free { map: FreeEnd, inverse: Option<FreeEnd> },
    Abelian { psi: IntMatrix },
    Product { aut: ProductAut },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutDecl {
    pub name: String,
    pub group: String,
    pub kind: AutKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Aut,
    Map,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentDecl {
    pub name: String,
    pub target_kind: TargetKind,
    pub target: String,
    /// Canonical element literals, in spec order.
    pub elements: Vec<String>,
    pub n_max: usize,
    pub metric: Metric,
    pub predict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Group { name: String, kind: VertexGroup },
    Aut(AutDecl),
    Graph { name: String, graph: GoGraph },
    Map { name: String, graph: String, map: GraphMap },
    Experiment(ExperimentDecl),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecFile {
    pub items: Vec<Item>,
}

pub const DEFAULT_N_MAX: usize = 10;

impl SpecFile {
    pub fn group(&self, name: &str) -> Option<VertexGroup> {
        self.items.iter().find_map(|it| match it {
            Item::Group { name: n, kind } if n == name => Some(*kind),
            _ => None,
        })
    }

    pub fn aut(&self, name: &str) -> Option<&AutDecl> {
        self.items.iter().find_map(|it| match it {
            Item::Aut(a) if a.name == name => Some(a),
            _ => None,
        })
    }

    pub fn graph(&self, name: &str) -> Option<&GoGraph> {
        self.items.iter().find_map(|it| match it {
            Item::Graph { name: n, graph } if n == name => Some(graph),
            _ => None,
        })
    }

    pub fn map(&self, name: &str) -> Option<&GraphMap> {
        self.items.iter().find_map(|it| match it {
            Item::Map { name: n, map, .. } if n == name => Some(map),
            _ => None,
        })
    }

    pub fn experiments(&self) -> impl Iterator<Item = &ExperimentDecl> {
        self.items.iter().filter_map(|it| match it {
            Item::Experiment(e) => Some(e),
            _ => None,
        })
    }

    pub fn experiment(&self, name: &str) -> Option<&ExperimentDecl> {
        self.experiments().find(|e| e.name == name)
    }

    fn declared(&self, name: &str) -> bool {
        self.items.iter().any(|it| match it {
            Item::Group { name: n, .. } | Item::Graph { name: n, .. } | Item::Map { name: n, .. } => n == name,
            Item::Aut(a) => a.name == name,
            Item::Experiment(e) => e.name == name,
        })
    }
}

/// A source line with comments stripped.
#[derive(Debug, Clone)]
struct Line<'a> {
    no: usize,
    raw: &'a str,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn indented(&self) -> bool {
        self.text.starts_with(char::is_whitespace)
    }

    /// Column (1-based, in characters) of a subslice of `raw`.
    fn col_of(&self, sub: &str) -> usize {
        let offset = (sub.as_ptr() as usize).saturating_sub(self.raw.as_ptr() as usize);
        let offset = offset.min(self.raw.len());
        self.raw[..offset].chars().count() + 1
    }

    fn err(&self, at: &str, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.no,
            col: self.col_of(at),
            message: message.into(),
        }
    }

    /// Error from the core library, pointing into `at` when the error
    /// carries an offset.
    fn core_err(&self, at: &str, e: CoreError) -> ParseError {
        let col = match &e {
            CoreError::BadLetter { offset, .. } => {
                self.col_of(at) + at.get(..*offset).map_or(0, |p| p.chars().count())
            }
            _ => self.col_of(at),
        };
        ParseError {
            line: self.no,
            col,
            message: e.to_string(),
        }
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Split `s` at the first occurrence of `sep`, trimming both halves
/// without losing their positions.
fn split2<'a>(s: &'a str, sep: &str) -> Option<(&'a str, &'a str)> {
    let (a, b) = s.split_once(sep)?;
    Some((a.trim(), b.trim()))
}

fn parse_group_kind(line: &Line, text: &str) -> PResult<VertexGroup> {
    let t = text.trim();
    let (head, args) = match t.split_once('(') {
        Some((h, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| line.err(text, "expected `)`"))?;
            (h.trim(), inner)
        }
        None => (t, ""),
    };
    let nums = args
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            // `free rank=3` and `3` are both accepted
            let v = s.rsplit('=').next().unwrap_or(s).trim();
            v.parse::<usize>()
                .map_err(|_| line.err(v, format!("expected a rank, got {v:?}")))
        })
        .collect::<PResult<Vec<_>>>()?;
    let kind = match (head, nums.as_slice()) {
        ("trivial", []) => VertexGroup::Trivial,
        ("free", [r]) => VertexGroup::Free(*r),
        ("abelian", [k]) => VertexGroup::Abelian(*k),
        ("product", [r, k]) => VertexGroup::Product { free: *r, abelian: *k },
        _ => {
            return Err(line.err(
                text.trim(),
                format!("unknown group kind {t:?}; expected free(r), abelian(k), product(r,k) or trivial"),
            ))
        }
    };
    if kind.dims().0 > 26 {
        return Err(line.err(text.trim(), "free rank is limited to 26 letters"));
    }
    Ok(kind)
}

/// Generator/`psi`/`alpha` lines of an automorphism or vertex-map body.
#[derive(Default)]
struct MapBody<'a> {
    forward: Vec<Option<(Line<'a>, &'a str)>>,
    inverse: Vec<Option<(Line<'a>, &'a str)>>,
    psi: Option<(Line<'a>, &'a str)>,
    alpha: Option<(Line<'a>, &'a str)>,
}

impl<'a> MapBody<'a> {
    fn new(rank: usize) -> Self {
        MapBody {
            forward: vec![None; rank],
            inverse: vec![None; rank],
            psi: None,
            alpha: None,
        }
    }

    /// Accept one body line; `Ok(false)` if the line is not a map line.
    fn accept(&mut self, line: &Line<'a>) -> PResult<bool> {
        let t = line.text.trim();
        if let Some((lhs, rhs)) = split2(t, "=") {
            let slot = match lhs {
                "psi" => &mut self.psi,
                "alpha" => &mut self.alpha,
                _ => return Ok(false),
            };
            if slot.is_some() {
                return Err(line.err(lhs, format!("duplicate `{lhs}`")));
            }
            *slot = Some((line.clone(), rhs));
            return Ok(true);
        }
        let Some((lhs, rhs)) = split2(t, "->") else {
            return Ok(false);
        };
        let mut cs = lhs.chars();
        let (Some(c), None) = (cs.next(), cs.next()) else {
            return Err(line.err(lhs, format!("expected a single generator letter, got {lhs:?}")));
        };
        let (index, inverse) = match c {
            'a'..='z' => (c as usize - 'a' as usize, false),
            'A'..='Z' => (c as usize - 'A' as usize, true),
            _ => return Err(line.err(lhs, format!("bad generator {c:?}"))),
        };
        let rank = self.forward.len();
        if index >= rank {
            return Err(line.err(lhs, format!("generator {c:?} out of range for rank {rank}")));
        }
        let slot = if inverse {
            &mut self.inverse[index]
        } else {
            &mut self.forward[index]
        };
        if slot.is_some() {
            return Err(line.err(lhs, format!("duplicate image for {c:?}")));
        }
        *slot = Some((line.clone(), rhs));
        Ok(true)
    }

    fn words(slots: &[Option<(Line, &str)>], rank: usize) -> PResult<Option<Vec<Word>>> {
        if slots.iter().all(Option::is_none) {
            return Ok(None);
        }
        slots
            .iter()
            .map(|s| match s {
                Some((l, w)) => Word::parse(w, rank).map_err(|e| l.core_err(w, e)).map(Some),
                None => Ok(None),
            })
            .collect::<PResult<Vec<_>>>()
            .map(|v| v.into_iter().collect::<Option<Vec<_>>>())
    }

    fn matrix(slot: &Option<(Line, &str)>, rows: usize, cols: usize, what: &str) -> PResult<Option<IntMatrix>> {
        let Some((l, text)) = slot else {
            return Ok(None);
        };
        let m = IntMatrix::parse(text).map_err(|e| l.core_err(text, e))?;
        if (m.rows(), m.cols()) != (rows, cols) {
            return Err(l.err(
                text,
                format!("{what} must be {rows}x{cols}, got {}x{}", m.rows(), m.cols()),
            ));
        }
        Ok(Some(m))
    }

    /// Resolve into `(φ, φ⁻¹?, ψ, α)` on `F_r × Z^k`.
    #[allow(clippy::type_complexity)]
    fn finish(
        self,
        header: &Line,
        at: &str,
        (r, k): (usize, usize),
    ) -> PResult<(FreeEnd, Option<FreeEnd>, IntMatrix, IntMatrix)> {
        let fwd = Self::words(&self.forward, r)?;
        let phi = match fwd {
            Some(images) if r > 0 => FreeEnd::new(images).map_err(|e| header.core_err(at, e))?,
            None if r == 0 => FreeEnd::identity(0),
            _ => {
                let missing = self.forward.iter().position(Option::is_none).unwrap_or(0);
                return Err(header.err(
                    at,
                    format!("missing image for generator {:?} (rank {r})", (b'a' + missing as u8) as char),
                ));
            }
        };
        let inverse = match Self::words(&self.inverse, r)? {
            Some(images) => Some(FreeEnd::new(images).map_err(|e| header.core_err(at, e))?),
            None if self.inverse.iter().any(Option::is_some) => {
                return Err(header.err(at, "inverse images must be given for every generator"));
            }
            None => None,
        };
        let psi = Self::matrix(&self.psi, k, k, "psi")?.unwrap_or_else(|| IntMatrix::identity(k));
        let alpha = Self::matrix(&self.alpha, k, r, "alpha")?.unwrap_or_else(|| IntMatrix::zeros(k, r));
        if k == 0 && (self.psi.is_some() || self.alpha.is_some()) {
            return Err(header.err(at, "psi/alpha need an abelian factor"));
        }
        Ok((phi, inverse, psi, alpha))
    }
}

/// Split experiment options on whitespace outside braces and parentheses.
fn split_options(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, c) in s.char_indices() {
        match c {
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if let Some(st) = start.take() {
                out.push(&s[st..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

/// Split a braced element list on top-level commas.
fn split_elements(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

/// Canonical literal of an element of the experiment's base group.
pub fn canonical_element(spec: &SpecFile, exp_kind: TargetKind, target: &str, text: &str) -> Result<String, CoreError> {
    match exp_kind {
        TargetKind::Aut => {
            let aut = spec
                .aut(target)
                .ok_or_else(|| CoreError::Malformed(format!("undeclared automorphism {target:?}")))?;
            let group = spec.group(&aut.group).expect("checked when the aut was declared");
            parse_group_element(group, text).map(|g| format_group_element(group, &g))
        }
        TargetKind::Map => {
            let map = spec
                .map(target)
                .ok_or_else(|| CoreError::Malformed(format!("undeclared map {target:?}")))?;
            let g = map.graph();
            let tokens = Token::parse_word(g, text)?;
            // reduce, so that the label is the normal form
            let path = GenPath::from_element(g, &tokens)?;
            Ok(Token::format_word(g, &path.to_element(g)?))
        }
    }
}

/// Elements of `F_r × Z^k`: words, `(word | vector)`, or for `Z^k` a bare
/// list of integers.
pub fn parse_group_element(group: VertexGroup, text: &str) -> Result<ProductElement, CoreError> {
    let (r, k) = group.dims();
    let t = text.trim();
    if r == 0 && k > 0 && !t.starts_with('(') {
        let entries = t
            .split_whitespace()
            .map(|x| x.parse::<i64>().map_err(|_| CoreError::Malformed(format!("bad vector entry {x:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if entries.len() != k {
            return Err(CoreError::DimensionMismatch(format!(
                "vector has {} entries, rank is {k}",
                entries.len()
            )));
        }
        return Ok(ProductElement::new(Word::identity(0), IntVector::from_i64(&entries)));
    }
    ProductElement::parse(t, r, k)
}

pub fn format_group_element(group: VertexGroup, g: &ProductElement) -> String {
    match group.dims() {
        (_, 0) => g.h.to_string(),
        (0, _) => g.a.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        _ => g.to_string(),
    }
}

pub fn parse_spec(text: &str) -> PResult<SpecFile> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .map(|(i, raw)| Line {
            no: i + 1,
            raw,
            text: raw.split('#').next().unwrap_or("").trim_end(),
        })
        .filter(|l| !l.text.trim().is_empty())
        .collect();
    let mut spec = SpecFile::default();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        if line.indented() {
            return Err(line.err(line.text.trim_start(), "indented line outside a declaration"));
        }
        let body_end = (i + 1..lines.len()).find(|&j| !lines[j].indented()).unwrap_or(lines.len());
        let body = &lines[i + 1..body_end];
        let t = line.text;
        let (keyword, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        let item = match keyword {
            "group" => parse_group(line, rest, body)?,
            "aut" => parse_aut(&spec, line, rest, body)?,
            "graph" => parse_graph(line, rest, body)?,
            "map" => parse_map(&spec, line, rest, body)?,
            "experiment" => parse_experiment(&spec, line, rest, body)?,
            _ => {
                return Err(line.err(
                    keyword,
                    format!("unknown declaration {keyword:?}; expected group, aut, graph, map or experiment"),
                ))
            }
        };
        spec.items.push(item);
        i = body_end;
    }
    Ok(spec)
}

/// `NAME:` or `NAME on OTHER:` header; returns the name, the optional
/// `on` target and the text after the colon.
fn header<'a>(line: &Line, rest: &'a str, with_on: bool) -> PResult<(&'a str, Option<&'a str>, &'a str)> {
    let (head, tail) = rest
        .split_once(':')
        .ok_or_else(|| line.err(rest, "expected `:` after the declaration name"))?;
    let mut parts = head.split_whitespace();
    let name = parts.next().ok_or_else(|| line.err(rest, "missing name"))?;
    if !is_ident(name) {
        return Err(line.err(name, format!("bad name {name:?}")));
    }
    let on = if with_on {
        match (parts.next(), parts.next()) {
            (Some("on"), Some(target)) => Some(target),
            _ => return Err(line.err(head, "expected `NAME on TARGET:`")),
        }
    } else {
        None
    };
    if let Some(extra) = parts.next() {
        return Err(line.err(extra, format!("unexpected {extra:?}")));
    }
    Ok((name, on, tail.trim()))
}

fn check_fresh(spec: Option<&SpecFile>, line: &Line, name: &str) -> PResult<()> {
    if spec.is_some_and(|s| s.declared(name)) {
        return Err(line.err(name, format!("{name:?} is already declared")));
    }
    Ok(())
}

fn no_body(body: &[Line], what: &str) -> PResult<()> {
    match body.first() {
        Some(l) => Err(l.err(l.text.trim_start(), format!("{what} declarations take no body"))),
        None => Ok(()),
    }
}

fn parse_group(line: &Line, rest: &str, body: &[Line]) -> PResult<Item> {
    let (name, _, tail) = header(line, rest, false)?;
    no_body(body, "group")?;
    if tail.is_empty() {
        return Err(line.err(rest, "missing group kind"));
    }
    let kind = parse_group_kind(line, tail)?;
    if kind == VertexGroup::Trivial {
        return Err(line.err(tail, "experiments need a nontrivial group"));
    }
    Ok(Item::Group {
        name: name.to_string(),
        kind,
    })
}

fn parse_aut(spec: &SpecFile, line: &Line, rest: &str, body: &[Line]) -> PResult<Item> {
    let (name, on, tail) = header(line, rest, true)?;
    check_fresh(Some(spec), line, name)?;
    let gname = on.expect("with_on");
    if !tail.is_empty() {
        return Err(line.err(tail, "automorphism images go on the following indented lines"));
    }
    let group = spec
        .group(gname)
        .ok_or_else(|| line.err(gname, format!("undeclared group {gname:?}")))?;
    let (r, k) = group.dims();
    let mut mb = MapBody::new(r);
    for l in body {
        if !mb.accept(l)? {
            return Err(l.err(l.text.trim_start(), "expected `x -> word`, `psi = [..]` or `alpha = [..]`"));
        }
    }
    let (phi, inverse, psi, alpha) = mb.finish(line, name, (r, k))?;
    let kind = match group {
        VertexGroup::Free(_) => {
            if let Some(inv) = &inverse {
                phi.clone()
                    .verify_automorphism(inv.clone())
                    .map_err(|e| line.core_err(name, e))?;
            }
            AutKind::Free { map: phi, inverse }
        }
        VertexGroup::Abelian(_) => {
            if !psi.is_unimodular() {
                return Err(line.err(name, "psi is not invertible over the integers"));
            }
            AutKind::Abelian { psi }
        }
        VertexGroup::Product { .. } => {
            let inv = inverse.ok_or_else(|| {
                line.err(name, "product automorphisms need inverse images (`A -> …` lines)")
            })?;
            let witness: AutWitness = phi.verify_automorphism(inv).map_err(|e| line.core_err(name, e))?;
            AutKind::Product {
                aut: ProductAut::new(witness, psi, alpha).map_err(|e| line.core_err(name, e))?,
            }
        }
        VertexGroup::Trivial => unreachable!("groups are nontrivial"),
    };
    Ok(Item::Aut(AutDecl {
        name: name.to_string(),
        group: gname.to_string(),
        kind,
    }))
}

fn parse_graph(line: &Line, rest: &str, body: &[Line]) -> PResult<Item> {
    let (name, _, tail) = header(line, rest, false)?;
    if !tail.is_empty() {
        return Err(line.err(tail, "graph contents go on the following indented lines"));
    }
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut pending: Vec<(&Line, &str, &str, &str, bool)> = Vec::new();
    let mut base: Option<(&Line, &str)> = None;
    for l in body {
        let t = l.text.trim();
        let (kw, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        match kw {
            "vertex" => {
                let (vname, kind) = split2(rest, ":").ok_or_else(|| l.err(rest, "expected `vertex NAME: kind`"))?;
                if !is_ident(vname) {
                    return Err(l.err(vname, format!("bad vertex name {vname:?}")));
                }
                if vertices.iter().any(|v| v.name == vname) {
                    return Err(l.err(vname, format!("duplicate vertex {vname:?}")));
                }
                vertices.push(Vertex {
                    name: vname.to_string(),
                    group: parse_group_kind(l, kind)?,
                });
            }
            "edge" => {
                let (ename, ends) = split2(rest, ":").ok_or_else(|| l.err(rest, "expected `edge NAME: FROM -> TO [tree]`"))?;
                let (from, to) = split2(ends, "->").ok_or_else(|| l.err(ends, "expected `FROM -> TO`"))?;
                let (to, tree) = match to.split_once(char::is_whitespace) {
                    Some((to, "tree")) => (to, true),
                    Some((_, other)) => return Err(l.err(other.trim(), format!("unexpected {other:?}"))),
                    None => (to, false),
                };
                pending.push((l, ename, from, to, tree));
            }
            "base" => base = Some((l, rest.trim())),
            _ => return Err(l.err(kw, format!("expected vertex, edge or base, got {kw:?}"))),
        }
    }
    let find = |l: &Line, v: &str| {
        vertices
            .iter()
            .position(|x| x.name == v)
            .ok_or_else(|| l.err(v, format!("undeclared vertex {v:?}")))
    };
    let mut edges = Vec::new();
    for (l, ename, from, to, tree) in &pending {
        edges.push(Edge {
            name: ename.to_string(),
            from: find(l, from)?,
            to: find(l, to)?,
            tree: *tree,
        });
    }
    let base = match base {
        Some((l, v)) => find(l, v)?,
        None => 0,
    };
    let graph = GoGraph::new(vertices, edges, base).map_err(|e| line.core_err(name, e))?;
    Ok(Item::Graph {
        name: name.to_string(),
        graph,
    })
}

fn parse_map(spec: &SpecFile, line: &Line, rest: &str, body: &[Line]) -> PResult<Item> {
    let (name, on, tail) = header(line, rest, true)?;
    check_fresh(Some(spec), line, name)?;
    let gname = on.expect("with_on");
    if !tail.is_empty() {
        return Err(line.err(tail, "map contents go on the following indented lines"));
    }
    let graph = spec
        .graph(gname)
        .ok_or_else(|| line.err(gname, format!("undeclared graph {gname:?}")))?;
    let ne = graph.edges().len();
    let nv = graph.vertices().len();
    let mut images: Vec<Option<GenPath>> = vec![None; ne];
    let mut bodies: Vec<Option<(Line, MapBody)>> = (0..nv).map(|_| None).collect();
    let mut current: Option<usize> = None;
    for l in body {
        let t = l.text.trim();
        if let Some(rest) = t.strip_prefix("vertex ") {
            let v = rest
                .trim()
                .strip_suffix(':')
                .map(str::trim)
                .ok_or_else(|| l.err(rest, "expected `vertex NAME:`"))?;
            let vi = graph
                .vertex_index(v)
                .ok_or_else(|| l.err(v, format!("undeclared vertex {v:?}")))?;
            if bodies[vi].is_some() {
                return Err(l.err(v, format!("duplicate block for vertex {v:?}")));
            }
            bodies[vi] = Some((l.clone(), MapBody::new(graph.group(vi).dims().0)));
            current = Some(vi);
            continue;
        }
        if t.contains("->") || t.starts_with("psi") || t.starts_with("alpha") {
            let vi = current.ok_or_else(|| l.err(t, "vertex map line outside a `vertex NAME:` block"))?;
            let mb = &mut bodies[vi].as_mut().expect("opened").1;
            if !mb.accept(l)? {
                return Err(l.err(t, "expected `x -> word`, `psi = [..]` or `alpha = [..]`"));
            }
            continue;
        }
        let (ename, path) = split2(t, ":").ok_or_else(|| l.err(t, "expected `EDGE: path`"))?;
        let e = graph
            .edge_by_name(ename)
            .filter(|e| !e.rev)
            .ok_or_else(|| l.err(ename, format!("undeclared edge {ename:?}")))?;
        if images[e.id].is_some() {
            return Err(l.err(ename, format!("duplicate image for edge {ename:?}")));
        }
        let from = graph.edges()[e.id].from;
        images[e.id] = Some(GenPath::parse(graph, from, path).map_err(|err| l.core_err(path, err))?);
        current = None;
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(id, p)| p.ok_or_else(|| line.err(name, format!("missing image for edge {:?}", graph.edges()[id].name))))
        .collect::<PResult<Vec<_>>>()?;
    let mut vmaps = Vec::with_capacity(nv);
    for (v, b) in bodies.into_iter().enumerate() {
        let group = graph.group(v);
        let m = match b {
            None => VertexMap::identity(group),
            Some((l, mb)) => {
                let vname = graph.vertices()[v].name.as_str();
                let at = l.raw.find(vname).map_or(l.text, |i| &l.raw[i..i + vname.len()]);
                let (phi, _, psi, alpha) = mb.finish(&l, at, group.dims())?;
                VertexMap::new(group, phi, psi, alpha).map_err(|e| l.core_err(at, e))?
            }
        };
        vmaps.push(m);
    }
    let map = GraphMap::new(graph.clone(), images, vmaps).map_err(|e| line.core_err(name, e))?;
    Ok(Item::Map {
        name: name.to_string(),
        graph: gname.to_string(),
        map,
    })
}

fn parse_experiment(spec: &SpecFile, line: &Line, rest: &str, body: &[Line]) -> PResult<Item> {
    let (name, _, tail) = header(line, rest, false)?;
    check_fresh(Some(spec), line, name)?;
    no_body(body, "experiment")?;
    let mut target: Option<(TargetKind, &str)> = None;
    let mut elements: Option<&str> = None;
    let mut n_max = DEFAULT_N_MAX;
    let mut metric = Metric::Word;
    let mut predict = true;
    for opt in split_options(tail) {
        let (k, v) = opt
            .split_once('=')
            .ok_or_else(|| line.err(opt, format!("expected `key=value`, got {opt:?}")))?;
        match k {
            "aut" | "map" => {
                if target.is_some() {
                    return Err(line.err(opt, "exactly one of aut= / map= per experiment"));
                }
                let kind = if k == "aut" { TargetKind::Aut } else { TargetKind::Map };
                let ok = match kind {
                    TargetKind::Aut => spec.aut(v).is_some(),
                    TargetKind::Map => spec.map(v).is_some(),
                };
                if !ok {
                    return Err(line.err(v, format!("undeclared {} {v:?}", if k == "aut" { "automorphism" } else { "map" })));
                }
                target = Some((kind, v));
            }
            "elements" => {
                let inner = v
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| line.err(v, "expected `elements={x, y, …}`"))?;
                elements = Some(inner);
            }
            "n_max" => {
                n_max = v
                    .parse()
                    .map_err(|_| line.err(v, format!("expected a natural number, got {v:?}")))?;
            }
            "metric" => {
                metric = match v {
                    "word" => Metric::Word,
                    "conj" => Metric::Conjugacy,
                    _ => return Err(line.err(v, format!("metric must be word or conj, got {v:?}"))),
                };
            }
            "predict" => {
                predict = match v {
                    "on" | "true" => true,
                    "off" | "false" => false,
                    _ => return Err(line.err(v, format!("predict must be on or off, got {v:?}"))),
                };
            }
            _ => return Err(line.err(k, format!("unknown experiment option {k:?}"))),
        }
    }
    let (target_kind, target) = target.ok_or_else(|| line.err(name, "experiment needs aut= or map="))?;
    let mut canon = Vec::new();
    if let Some(inner) = elements {
        for el in split_elements(inner) {
            if el.is_empty() {
                return Err(line.err(inner, "empty element in list"));
            }
            canon.push(canonical_element(spec, target_kind, target, el).map_err(|e| line.core_err(el, e))?);
        }
    }
    Ok(Item::Experiment(ExperimentDecl {
        name: name.to_string(),
        target_kind,
        target: target.to_string(),
        elements: canon,
        n_max,
        metric,
        predict,
    }))
}

fn write_map_body(out: &mut String, indent: &str, phi: &FreeEnd, inverse: Option<&FreeEnd>, psi: &IntMatrix, alpha: &IntMatrix, with_matrices: bool) {
    for (i, w) in phi.images().iter().enumerate() {
        let _ = writeln!(out, "{indent}{} -> {w}", (b'a' + i as u8) as char);
    }
    if let Some(inv) = inverse {
        for (i, w) in inv.images().iter().enumerate() {
            let _ = writeln!(out, "{indent}{} -> {w}", (b'A' + i as u8) as char);
        }
    }
    if with_matrices {
        let _ = writeln!(out, "{indent}psi = {psi}");
        let _ = writeln!(out, "{indent}alpha = {alpha}");
    }
}

/// Canonical text; `parse_spec(&serialize(s)) == s`.
pub fn serialize(spec: &SpecFile) -> String {
    let mut out = String::new();
    for item in &spec.items {
        match item {
            Item::Group { name, kind } => {
                let _ = writeln!(out, "group {name}: {kind}");
            }
            Item::Aut(a) => {
                let _ = writeln!(out, "aut {} on {}:", a.name, a.group);
                match &a.kind {
                    AutKind::Free { map, inverse } => {
                        write_map_body(&mut out, "  ", map, inverse.as_ref(), &IntMatrix::identity(0), &IntMatrix::identity(0), false)
                    }
                    AutKind::Abelian { psi } => {
                        let _ = writeln!(out, "  psi = {psi}");
                    }
                    AutKind::Product { aut } => write_map_body(
                        &mut out,
                        "  ",
                        aut.phi().forward(),
                        Some(aut.phi().inverse()),
                        aut.psi(),
                        aut.alpha(),
                        true,
                    ),
                }
            }
            Item::Graph { name, graph } => {
                let _ = writeln!(out, "graph {name}:");
                for v in graph.vertices() {
                    let _ = writeln!(out, "  vertex {}: {}", v.name, v.group);
                }
                for e in graph.edges() {
                    let _ = writeln!(
                        out,
                        "  edge {}: {} -> {}{}",
                        e.name,
                        graph.vertices()[e.from].name,
                        graph.vertices()[e.to].name,
                        if e.tree { " tree" } else { "" }
                    );
                }
                let _ = writeln!(out, "  base {}", graph.vertices()[graph.base()].name);
            }
            Item::Map { name, graph: gname, map } => {
                let _ = writeln!(out, "map {name} on {gname}:");
                let g = map.graph();
                for (id, e) in g.edges().iter().enumerate() {
                    let img = map.edge_image(growthlab_core::splitting::OEdge::forward(id));
                    let _ = writeln!(out, "  {}: {}", e.name, img.format(g));
                }
                for (v, vm) in map.vertex_maps().iter().enumerate() {
                    let group = g.group(v);
                    if *vm == VertexMap::identity(group) {
                        continue;
                    }
                    let _ = writeln!(out, "  vertex {}:", g.vertices()[v].name);
                    write_map_body(&mut out, "    ", vm.phi(), None, vm.psi(), vm.alpha(), group.dims().1 > 0);
                }
            }
            Item::Experiment(e) => {
                let _ = writeln!(
                    out,
                    "experiment {}: {}={} elements={{{}}} n_max={} metric={} predict={}",
                    e.name,
                    match e.target_kind {
                        TargetKind::Aut => "aut",
                        TargetKind::Map => "map",
                    },
                    e.target,
                    e.elements.join(", "),
                    e.n_max,
                    match e.metric {
                        Metric::Word => "word",
                        Metric::Conjugacy => "conj",
                    },
                    if e.predict { "on" } else { "off" }
                );
            }
        }
    }
    out
}
