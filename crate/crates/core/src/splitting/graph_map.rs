use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use super::{GenPath, GoGraph, OEdge, VertexGroup};
use crate::error::{Error, Result};
use crate::fgaut::FreeEnd;
use crate::product::{ab, Metric, ProductElement};
use crate::word::letter_cap;
use crate::zlin::{pf_data, IntMatrix, IntVector};

/// An endomorphism `(φ, ψ, α)` of a vertex group `F_r × Z^k`, acting by
/// `(h, a) ↦ (φ(h), α·ab(h) + ψ·a)`. Not required to be invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    group: VertexGroup,
    phi: FreeEnd,
    psi: IntMatrix,
    alpha: IntMatrix,
}

impl VertexMap {
    pub fn identity(group: VertexGroup) -> Self {
        let (r, k) = group.dims();
        VertexMap {
            group,
            phi: FreeEnd::identity(r),
            psi: IntMatrix::identity(k),
            alpha: IntMatrix::zeros(k, r),
        }
    }

    pub fn new(group: VertexGroup, phi: FreeEnd, psi: IntMatrix, alpha: IntMatrix) -> Result<Self> {
        let (r, k) = group.dims();
        if phi.rank() != r {
            return Err(Error::RankMismatch {
                left: r,
                right: phi.rank(),
            });
        }
        if psi.rows() != k || psi.cols() != k || alpha.rows() != k || alpha.cols() != r {
            return Err(Error::DimensionMismatch(format!(
                "vertex map on F{r} x Z^{k} needs a {k}x{k} ψ and a {k}x{r} α"
            )));
        }
        Ok(VertexMap {
            group,
            phi,
            psi,
            alpha,
        })
    }

    /// A free-group endomorphism at a free vertex.
    pub fn free(phi: FreeEnd) -> Self {
        let r = phi.rank();
        VertexMap {
            group: VertexGroup::Free(r),
            phi,
            psi: IntMatrix::identity(0),
            alpha: IntMatrix::zeros(0, r),
        }
    }

    pub fn group(&self) -> VertexGroup {
        self.group
    }

    pub fn phi(&self) -> &FreeEnd {
        &self.phi
    }

    pub fn psi(&self) -> &IntMatrix {
        &self.psi
    }

    pub fn alpha(&self) -> &IntMatrix {
        &self.alpha
    }

    pub fn apply(&self, g: &ProductElement) -> Result<ProductElement> {
        if !self.group.contains(g) {
            return Err(Error::DimensionMismatch(format!("element outside {}", self.group)));
        }
        let h = self.phi.apply(&g.h)?;
        if g.a.is_empty() {
            return Ok(ProductElement::new(h, g.a.clone()));
        }
        let a = self.alpha.apply(&ab(&g.h))?.add(&self.psi.apply(&g.a)?)?;
        Ok(ProductElement::new(h, a))
    }

    pub fn iterate(&self, g: &ProductElement, n: usize) -> Result<ProductElement> {
        let mut cur = g.clone();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &VertexMap) -> Result<VertexMap> {
        if self.group != other.group {
            return Err(Error::DimensionMismatch("vertex maps on different groups".into()));
        }
        let alpha = self
            .alpha
            .mul(&other.phi.abelianize())?
            .add(&self.psi.mul(&other.alpha)?)?;
        Ok(VertexMap {
            group: self.group,
            phi: self.phi.compose(&other.phi)?,
            psi: self.psi.mul(&other.psi)?,
            alpha,
        })
    }
}

/// Number of nodes of each order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderCensus {
    pub counts: BTreeMap<u32, usize>,
    pub total: usize,
}

impl OrderCensus {
    pub fn of(path: &GenPath) -> Self {
        let mut counts = BTreeMap::new();
        for &o in path.orders() {
            *counts.entry(o).or_insert(0) += 1;
        }
        OrderCensus {
            counts,
            total: path.orders().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub n: usize,
    pub measured: OrderCensus,
    pub expected: OrderCensus,
    /// Untightened edge lengths `ℓ(f^j(π))`, `j = 0..=n`, from the transition matrix.
    pub edge_lengths: Vec<BigUint>,
    pub pass: bool,
}

/// The finite sets of possible node occupants by order.
#[derive(Debug, Clone)]
pub struct OmegaReport {
    /// `(vertex, element)` pairs from the edge images, identities included.
    pub omega: Vec<(usize, ProductElement)>,
    /// Number of distinct order-`i` occupants.
    pub occupants: Vec<usize>,
    /// `N_i`: mean word length of the order-`i` occupants.
    pub n: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub n: usize,
    /// Total length of `fⁿ(π)` pulled tight.
    pub measured: BigUint,
    pub predicted: f64,
    pub ratio: f64,
}

/// A self-map of a graph of groups fixing every vertex: one image path per
/// edge and one vertex-group endomorphism per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMap {
    graph: GoGraph,
    images: Vec<GenPath>,
    vertex_maps: Vec<VertexMap>,
}

/// Combos allowed when enumerating occupants of one order at one vertex.
const OCCUPANT_LIMIT: usize = 2_000_000;

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

impl GraphMap {
    pub fn new(graph: GoGraph, images: Vec<GenPath>, vertex_maps: Vec<VertexMap>) -> Result<Self> {
        if images.len() != graph.edges().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} edge images for {} edges",
                images.len(),
                graph.edges().len()
            )));
        }
        if vertex_maps.len() != graph.vertices().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} vertex maps for {} vertices",
                vertex_maps.len(),
                graph.vertices().len()
            )));
        }
        for (v, m) in vertex_maps.iter().enumerate() {
            if m.group() != graph.group(v) {
                return Err(Error::DimensionMismatch(format!(
                    "vertex map at {} acts on {}, vertex group is {}",
                    graph.vertices()[v].name,
                    m.group(),
                    graph.group(v)
                )));
            }
        }
        for (e, img) in graph.edges().iter().zip(&images) {
            if img.edge_length() == 0 {
                return Err(Error::Precondition(format!("edge {} collapses", e.name)));
            }
            if img.start() != e.from || img.end(&graph) != e.to {
                return Err(Error::Precondition(format!(
                    "image of {} must run from {} to {}",
                    e.name,
                    graph.vertices()[e.from].name,
                    graph.vertices()[e.to].name
                )));
            }
        }
        let images = images
            .into_iter()
            .map(|p| {
                let orders = vec![0; p.nodes().len()];
                GenPath::from_parts_unchecked(p.start(), p.nodes().to_vec(), p.edges().to_vec(), orders)
            })
            .collect();
        Ok(GraphMap {
            graph,
            images,
            vertex_maps,
        })
    }

    pub fn graph(&self) -> &GoGraph {
        &self.graph
    }

    pub fn vertex_map(&self, v: usize) -> &VertexMap {
        &self.vertex_maps[v]
    }

    pub fn vertex_maps(&self) -> &[VertexMap] {
        &self.vertex_maps
    }

    /// `f(e)`, reversed for a reversed edge.
    pub fn edge_image(&self, e: OEdge) -> GenPath {
        let p = &self.images[e.id];
        if e.rev {
            p.inverse(&self.graph)
        } else {
            p.clone()
        }
    }

    /// Entry `(i, j)` counts occurrences of edge `i`, either orientation, in `f(e_j)`.
    pub fn transition_matrix(&self) -> IntMatrix {
        let k = self.graph.edges().len();
        let mut m = IntMatrix::zeros(k, k);
        for (j, img) in self.images.iter().enumerate() {
            for e in img.edges() {
                let c = m.get(e.id, j) + BigInt::from(1);
                m.set(e.id, j, c);
            }
        }
        m
    }

    /// `ψ(g₀) f(e₁) ψ(g₁) … f(e_s) ψ(g_s)`, not pulled tight. Interior nodes
    /// of each `f(e)` get order 0; the image of an order-`m` node gets `m + 1`.
    pub fn apply(&self, pi: &GenPath) -> Result<GenPath> {
        let vs = pi.node_vertices(&self.graph);
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        let mut orders = Vec::new();
        nodes.push(self.vertex_maps[vs[0]].apply(&pi.nodes()[0])?);
        orders.push(pi.orders()[0] + 1);
        for (j, &e) in pi.edges().iter().enumerate() {
            let img = self.edge_image(e);
            let last = nodes.len() - 1;
            nodes[last] = nodes[last].mul(&img.nodes()[0])?;
            let m = img.edges().len();
            for k in 0..m {
                edges.push(img.edges()[k]);
                nodes.push(img.nodes()[k + 1].clone());
                orders.push(0);
            }
            let last = nodes.len() - 1;
            let g = self.vertex_maps[vs[j + 1]].apply(&pi.nodes()[j + 1])?;
            nodes[last] = nodes[last].mul(&g)?;
            orders[last] = pi.orders()[j + 1] + 1;
            if edges.len() > letter_cap() {
                return Err(Error::CapExceeded {
                    len: edges.len(),
                    cap: letter_cap(),
                });
            }
        }
        Ok(GenPath::from_parts_unchecked(pi.start(), nodes, edges, orders))
    }

    /// `fⁿ(π)` without intermediate tightening, with the census of every
    /// step `0..=n`. With `tighten`, the final path is pulled tight.
    pub fn iterate(&self, pi: &GenPath, n: usize, tighten: bool) -> Result<(GenPath, Vec<OrderCensus>)> {
        let mut cur = pi.clone();
        let mut census = vec![OrderCensus::of(&cur)];
        for done in 0..n {
            cur = self.apply(&cur).map_err(|e| match e {
                Error::CapExceeded { len, cap } => Error::IterationCap {
                    completed: done,
                    len,
                    cap,
                },
                other => other,
            })?;
            census.push(OrderCensus::of(&cur));
        }
        if tighten {
            cur = cur.pull_tight()?;
        }
        Ok((cur, census))
    }

    /// `fⁿ(π)` pulled tight after every step, which agrees with tightening
    /// once at the end.
    pub fn iterate_tight(&self, pi: &GenPath, n: usize) -> Result<GenPath> {
        let mut cur = pi.pull_tight()?;
        for _ in 0..n {
            cur = self.apply(&cur)?.pull_tight()?;
        }
        Ok(cur)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GraphMap) -> Result<GraphMap> {
        if self.graph != other.graph {
            return Err(Error::Precondition("maps on different graphs".into()));
        }
        let images = other
            .images
            .iter()
            .map(|p| self.apply(p)?.pull_tight())
            .collect::<Result<Vec<_>>>()?;
        let vertex_maps = self
            .vertex_maps
            .iter()
            .zip(&other.vertex_maps)
            .map(|(a, b)| a.compose(b))
            .collect::<Result<Vec<_>>>()?;
        GraphMap::new(self.graph.clone(), images, vertex_maps)
    }

    pub fn power(&self, k: usize) -> Result<GraphMap> {
        if k == 0 {
            return Err(Error::Precondition("the zeroth power is not a graph map here".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Every edge image crosses every edge.
    pub fn images_cover_all_edges(&self) -> bool {
        let m = self.transition_matrix();
        (0..m.rows()).all(|i| (0..m.cols()).all(|j| m.get(i, j) > &BigInt::from(0)))
    }

    /// First and last edge of each `f(e)`, indexed by `2·id + rev`.
    fn end_maps(&self) -> (Vec<usize>, Vec<usize>) {
        let k = self.graph.edges().len();
        let idx = |e: OEdge| 2 * e.id + usize::from(e.rev);
        let mut first = vec![0; 2 * k];
        let mut last = vec![0; 2 * k];
        for id in 0..k {
            for rev in [false, true] {
                let e = OEdge { id, rev };
                let img = self.edge_image(e);
                first[idx(e)] = idx(img.edges()[0]);
                last[idx(e)] = idx(*img.edges().last().expect("nonempty image"));
            }
        }
        (first, last)
    }

    /// For every oriented edge `e`, the iterates `fⁿ(e)`, `n ≥ 1`, all start
    /// with the same edge and end with the same edge.
    ///
    /// Without cancellation between the images of consecutive edges (the
    /// train-track situation) the first edge of `fⁿ(e)` is `Fⁿ(e)` for the
    /// first-edge map `F`, and likewise for last edges; stability for all
    /// `n` is then equivalent to `F` and `L` being idempotent.
    pub fn ends_stable(&self) -> bool {
        let (first, last) = self.end_maps();
        let idem = |m: &[usize]| m.iter().all(|&x| m[x] == x);
        idem(&first) && idem(&last)
    }

    /// Smallest `k ≤ limit` such that every `fᵏ(e)` crosses every edge and
    /// the ends of the iterates of `fᵏ` are stable. Only the transition
    /// matrix and the end maps are powered, never the paths.
    pub fn find_good_power(&self, limit: usize) -> Result<Option<usize>> {
        let (first, last) = self.end_maps();
        let m = self.transition_matrix();
        let mut mk = m.clone();
        let mut fk = first.clone();
        let mut lk = last.clone();
        let positive = |x: &IntMatrix| (0..x.rows()).all(|i| (0..x.cols()).all(|j| x.get(i, j) > &BigInt::from(0)));
        let idem = |x: &[usize]| x.iter().all(|&y| x[y] == y);
        for k in 1..=limit {
            if k > 1 {
                mk = mk.mul(&m)?;
                fk = fk.iter().map(|&x| first[x]).collect();
                lk = lk.iter().map(|&x| last[x]).collect();
            }
            if positive(&mk) && idem(&fk) && idem(&lk) {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Measured order census of `fⁿ(π)` against the closed form: order `i < n`
    /// has `ℓ(f^{n−i}(π)) − ℓ(f^{n−i−1}(π))` nodes, order `n` has `ℓ(π) + 1`.
    pub fn census_check(&self, pi: &GenPath, n: usize) -> Result<CensusReport> {
        let (_, census) = self.iterate(pi, n, false)?;
        let measured = census.last().cloned().expect("n + 1 entries");
        let m = self.transition_matrix();
        let mut counts = IntVector::zeros(self.graph.edges().len());
        for e in pi.edges() {
            counts.0[e.id] += 1;
        }
        let mut ell = Vec::with_capacity(n + 1);
        for j in 0..=n {
            if j > 0 {
                counts = m.apply(&counts)?;
            }
            ell.push(counts.l1().magnitude().clone());
        }
        let mut expected = OrderCensus::default();
        for i in 0..n {
            let c = &ell[n - i] - &ell[n - i - 1];
            let c = c.to_usize().unwrap_or(usize::MAX);
            if c > 0 {
                expected.counts.insert(i as u32, c);
            }
            expected.total += c;
        }
        expected.counts.insert(n as u32, pi.edge_length() + 1);
        expected.total += pi.edge_length() + 1;
        let pass = measured == expected;
        Ok(CensusReport {
            n,
            measured,
            expected,
            edge_lengths: ell,
            pass,
        })
    }

    /// `Ω` and `N_0..=N_horizon`. Order-`i` occupants at a vertex are the
    /// products `(aψ(a)…ψ^{i−2}(a))·ψ^{i−1}(b)ψ^i(c)ψ^{i−1}(d)·(ψ^{i−2}(e)…e)`
    /// with `a, …, e` in that vertex's part of `Ω`.
    pub fn omega_and_n(&self, horizon: usize) -> Result<OmegaReport> {
        let nv = self.graph.vertices().len();
        let mut per_vertex: Vec<Vec<ProductElement>> = vec![Vec::new(); nv];
        let mut seen: HashSet<(usize, ProductElement)> = HashSet::new();
        let mut omega = Vec::new();
        let mut add = |v: usize, g: ProductElement, per_vertex: &mut Vec<Vec<ProductElement>>| {
            if seen.insert((v, g.clone())) {
                per_vertex[v].push(g.clone());
                omega.push((v, g));
            }
        };
        for img in &self.images {
            for (v, g) in img.node_vertices(&self.graph).into_iter().zip(img.nodes()) {
                add(v, g.clone(), &mut per_vertex);
            }
        }
        for v in 0..nv {
            add(v, self.graph.group(v).identity(), &mut per_vertex);
        }

        let mut occupants = Vec::with_capacity(horizon + 1);
        let mut means = Vec::with_capacity(horizon + 1);
        let mean = |sets: &[HashSet<ProductElement>]| -> (usize, f64) {
            let count: usize = sets.iter().map(HashSet::len).sum();
            let total = sets
                .iter()
                .flatten()
                .fold(BigUint::from(0u32), |acc, g| acc + g.length(Metric::Word));
            (count, big_to_f64(&total) / count as f64)
        };
        let order0: Vec<HashSet<ProductElement>> =
            per_vertex.iter().map(|s| s.iter().cloned().collect()).collect();
        let (c, m) = mean(&order0);
        occupants.push(c);
        means.push(m);

        // powers[v][x][k] = ψ^k(x)
        let mut powers: Vec<Vec<Vec<ProductElement>>> = per_vertex
            .iter()
            .map(|s| s.iter().map(|x| vec![x.clone()]).collect())
            .collect();
        // prefix[v][a] = aψ(a)…ψ^{i−2}(a), suffix[v][e] = ψ^{i−2}(e)…e
        let mut prefix: Vec<Vec<ProductElement>> = per_vertex
            .iter()
            .enumerate()
            .map(|(v, s)| vec![self.graph.group(v).identity(); s.len()])
            .collect();
        let mut suffix = prefix.clone();
        for i in 1..=horizon {
            for v in 0..nv {
                let psi = &self.vertex_maps[v];
                for xs in powers[v].iter_mut() {
                    let next = psi.apply(xs.last().expect("nonempty"))?;
                    xs.push(next);
                }
                if i >= 2 {
                    for (x, xs) in powers[v].iter().enumerate() {
                        prefix[v][x] = prefix[v][x].mul(&xs[i - 2])?;
                        suffix[v][x] = xs[i - 2].mul(&suffix[v][x])?;
                    }
                }
            }
            let mut sets = Vec::with_capacity(nv);
            for v in 0..nv {
                let pw = &powers[v];
                let mut left = HashSet::new();
                let mut right = HashSet::new();
                for a in 0..pw.len() {
                    for b in 0..pw.len() {
                        left.insert(prefix[v][a].mul(&pw[b][i - 1])?);
                        right.insert(pw[b][i - 1].mul(&suffix[v][a])?);
                    }
                }
                let middle: HashSet<ProductElement> = pw.iter().map(|xs| xs[i].clone()).collect();
                let combos = left.len() * middle.len() * right.len();
                if combos > OCCUPANT_LIMIT {
                    return Err(Error::CapExceeded {
                        len: combos,
                        cap: OCCUPANT_LIMIT,
                    });
                }
                let mut set = HashSet::new();
                for l in &left {
                    for c in &middle {
                        let lc = l.mul(c)?;
                        for r in &right {
                            set.insert(lc.mul(r)?);
                        }
                    }
                }
                sets.push(set);
            }
            let (c, m) = mean(&sets);
            occupants.push(c);
            means.push(m);
        }
        Ok(OmegaReport {
            omega,
            occupants,
            n: means,
        })
    }

    /// Measured `|fⁿ(π)|` pulled tight against
    /// `Σⱼ|ψⁿ(gⱼ)| + ℓ(π)·(λⁿ + Σ_{j≤n} N_j λ^{n−j})`, for `n = 0..=n_max`.
    ///
    /// The `λⁿ` term accounts for the edges themselves, which the `N_j`
    /// (node lengths only) leave out.
    pub fn predicted_vs_measured(&self, pi: &GenPath, n_max: usize) -> Result<Vec<EstimateRow>> {
        let m = self.transition_matrix();
        if !m.is_primitive() {
            return Err(Error::Precondition("transition matrix is not primitive".into()));
        }
        let lambda = pf_data(&m)?.lambda.to_f64();
        let big_n = self.omega_and_n(n_max)?.n;
        let vs = pi.node_vertices(&self.graph);
        let mut node_iter: Vec<ProductElement> = pi.nodes().to_vec();
        let ell = pi.edge_length() as f64;
        let mut cur = pi.pull_tight()?;
        let mut rows = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            if n > 0 {
                cur = self.apply(&cur)?.pull_tight()?;
                for (g, &v) in node_iter.iter_mut().zip(&vs) {
                    *g = self.vertex_maps[v].apply(g)?;
                }
            }
            let measured = cur.lengths().1;
            let nodes: f64 = node_iter.iter().map(|g| big_to_f64(&g.length(Metric::Word))).sum();
            let series: f64 = (0..=n).map(|j| big_n[j] * lambda.powi((n - j) as i32)).sum();
            let predicted = nodes + ell * (lambda.powi(n as i32) + series);
            let ratio = big_to_f64(&measured) / predicted;
            rows.push(EstimateRow {
                n,
                measured,
                predicted,
                ratio,
            });
        }
        Ok(rows)
    }
}
