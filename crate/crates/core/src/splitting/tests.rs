use num_bigint::BigUint;

use super::examples::{mixed, pf_rose, two_vertex};
use super::*;
use crate::fgaut::{catalog, FreeEnd};
use crate::word::Word;

fn free_vertex_graph() -> GoGraph {
    // p and q both infinite cyclic (letter `a`), tree edge e
    GoGraph::new(
        vec![
            Vertex {
                name: "p".into(),
                group: VertexGroup::Free(1),
            },
            Vertex {
                name: "q".into(),
                group: VertexGroup::Free(1),
            },
        ],
        vec![Edge {
            name: "e".into(),
            from: 0,
            to: 1,
            tree: true,
        }],
        0,
    )
    .unwrap()
}

#[test]
fn graph_validation() {
    let v = |n: &str| Vertex {
        name: n.into(),
        group: VertexGroup::Trivial,
    };
    let e = |n: &str, from, to, tree| Edge {
        name: n.into(),
        from,
        to,
        tree,
    };
    // disconnected
    assert!(GoGraph::new(vec![v("p"), v("q")], vec![], 0).is_err());
    // two tree edges on two vertices
    assert!(GoGraph::new(vec![v("p"), v("q")], vec![e("e", 0, 1, true), e("f", 0, 1, true)], 0).is_err());
    // tree loop
    assert!(GoGraph::new(vec![v("p")], vec![e("e", 0, 0, true)], 0).is_err());
    // uppercase edge name
    assert!(GoGraph::new(vec![v("p")], vec![e("E", 0, 0, false)], 0).is_err());
    assert!(GoGraph::new(vec![v("p"), v("q")], vec![e("e", 0, 1, true), e("f", 1, 0, false)], 0).is_ok());
}

#[test]
fn pull_tight_examples() {
    let g = GoGraph::rose(&["a", "b"]).unwrap();
    let p = GenPath::parse(&g, 0, "a b B A b").unwrap();
    let t = p.pull_tight().unwrap();
    assert_eq!(t.format(&g), "b");
    // three nested back-tracks
    let p = GenPath::parse(&g, 0, "a b a A B A b").unwrap();
    let t = p.pull_tight().unwrap();
    assert_eq!(t.edge_length(), 1);
    assert_eq!(t.pull_tight().unwrap(), t);
    // back-tracks through a nontrivial vertex multiply the neighbours
    let h = free_vertex_graph();
    let p = GenPath::parse(&h, 0, "[a] e E e E e [aa] E e [a]").unwrap();
    let t = p.pull_tight().unwrap();
    assert_eq!(t.format(&h), "[a] e [aaa]");
    let imm = GenPath::parse(&g, 0, "a [1] b A").unwrap();
    assert_eq!(imm.pull_tight().unwrap(), imm);
}

#[test]
fn lengths() {
    let h = free_vertex_graph();
    let single = GenPath::parse(&h, 0, "[aaA a]").unwrap();
    assert_eq!(single.lengths(), (0, BigUint::from(2u32)));
    let g = GoGraph::rose(&["a", "b"]).unwrap();
    assert_eq!(GenPath::parse(&g, 0, "a b").unwrap().lengths(), (2, BigUint::from(2u32)));
    let f = pf_rose();
    let a = GenPath::parse(f.graph(), 0, "a").unwrap();
    let fa = f.apply(&a).unwrap();
    assert_eq!(fa.lengths(), (2, BigUint::from(2u32)));
}

#[test]
fn element_paths() {
    let g = GoGraph::rose(&["t"]).unwrap();
    let w = Token::parse_word(&g, "t t").unwrap();
    let p = GenPath::from_element(&g, &w).unwrap();
    assert_eq!(p.format(&g), "t t");
    assert_eq!(p.to_element(&g).unwrap(), w);

    let h = free_vertex_graph();
    let w = Token::parse_word(&h, "p.a q.A").unwrap();
    let p = GenPath::from_element(&h, &w).unwrap();
    assert_eq!(p.format(&h), "[a] e [A] E");
    assert!(p.is_closed(&h));
    assert_eq!(Token::format_word(&h, &p.to_element(&h).unwrap()), "p.a q.A");
    assert_eq!(p.element_length(&h).unwrap(), BigUint::from(2u32));
    // q.a q.A cancels through the tree
    let w = Token::parse_word(&h, "p.a q.a q.A p.a").unwrap();
    let p = GenPath::from_element(&h, &w).unwrap();
    assert_eq!(p.format(&h), "[aa]");
    assert!(Token::parse_word(&h, "e").is_err());
}

#[test]
fn conjugacy_forms() {
    let g = GoGraph::rose(&["a", "b"]).unwrap();
    let p = GenPath::parse(&g, 0, "a b A B").unwrap();
    let (_, len) = p.conj_normal_form(&g).unwrap();
    assert_eq!(len, BigUint::from(4u32));
    let w = GenPath::parse(&g, 0, "b b a").unwrap();
    let conj = w.concat(&g, &p).unwrap().concat(&g, &w.inverse(&g)).unwrap();
    assert_eq!(conj.conj_normal_form(&g).unwrap(), p.conj_normal_form(&g).unwrap());

    let h = free_vertex_graph();
    let single = GenPath::parse(&h, 0, "[aaA]").unwrap();
    assert_eq!(single.conj_normal_form(&h).unwrap().1, BigUint::from(1u32));
    // q.a conjugated by p.a: cyclic length 1
    let w = Token::parse_word(&h, "p.a q.a p.A").unwrap();
    let p = GenPath::from_element(&h, &w).unwrap();
    let (form, len) = p.conj_normal_form(&h).unwrap();
    assert_eq!(len, BigUint::from(1u32));
    assert_eq!(form.start(), 1);
}

#[test]
fn map_application() {
    let g = GoGraph::rose(&["a", "b"]).unwrap();
    let paths = vec![GenPath::parse(&g, 0, "a").unwrap(), GenPath::parse(&g, 0, "b").unwrap()];
    let id = GraphMap::new(g.clone(), paths, vec![VertexMap::identity(VertexGroup::Trivial)]).unwrap();
    let p = GenPath::parse(&g, 0, "a b A").unwrap();
    let q = id.apply(&p).unwrap();
    assert_eq!(q, p);
    assert_eq!(q.orders(), &[1, 1, 1, 1]);

    let f = pf_rose();
    let fa = f.apply(&GenPath::parse(f.graph(), 0, "a").unwrap()).unwrap();
    assert_eq!(fa.orders(), &[1, 0, 1]);

    let h = free_vertex_graph();
    let psi = VertexMap::free(FreeEnd::parse(&["aa"]).unwrap());
    let m = GraphMap::new(
        h.clone(),
        vec![GenPath::parse(&h, 0, "e").unwrap()],
        vec![psi, VertexMap::identity(VertexGroup::Free(1))],
    )
    .unwrap();
    let single = GenPath::parse(&h, 0, "[a]").unwrap();
    let img = m.apply(&single).unwrap();
    assert_eq!(img.format(&h), "[aa]");
    assert_eq!(img.orders(), &[1]);
    // image endpoints are checked
    assert!(GraphMap::new(h.clone(), vec![GenPath::parse(&h, 0, "e E").unwrap()], m.vertex_maps().to_vec()).is_err());
}

#[test]
fn iteration_and_census() {
    let f = pf_rose();
    let a = GenPath::parse(f.graph(), 0, "a").unwrap();
    let (p0, c0) = f.iterate(&a, 0, false).unwrap();
    assert_eq!(p0, a);
    assert_eq!(c0[0].counts.get(&0), Some(&2));
    let (p3, census) = f.iterate(&a, 3, false).unwrap();
    assert_eq!(p3.edge_length(), 9);
    assert_eq!(census.len(), 4);
    let report = f.census_check(&a, 3).unwrap();
    assert!(report.pass);
    let want: Vec<(u32, usize)> = vec![(0, 5), (1, 2), (2, 1), (3, 2)];
    assert_eq!(report.measured.counts.into_iter().collect::<Vec<_>>(), want);
    assert_eq!(report.edge_lengths, [1u32, 2, 4, 9].map(BigUint::from).to_vec());

    let t = two_vertex();
    let e = GenPath::parse(t.graph(), 0, "[a] e [b]").unwrap();
    for n in 1..=5 {
        let (p, _) = t.iterate(&e, n, false).unwrap();
        let o = p.orders();
        assert_eq!((o[0], o[o.len() - 1]), (n as u32, n as u32));
        assert!(t.census_check(&e, n).unwrap().pass);
    }
}

#[test]
fn vertex_only_census() {
    let h = free_vertex_graph();
    let m = GraphMap::new(
        h.clone(),
        vec![GenPath::parse(&h, 0, "e").unwrap()],
        vec![
            VertexMap::free(FreeEnd::parse(&["aa"]).unwrap()),
            VertexMap::identity(VertexGroup::Free(1)),
        ],
    )
    .unwrap();
    let single = GenPath::parse(&h, 0, "[a]").unwrap();
    let r = m.census_check(&single, 4).unwrap();
    assert!(r.pass);
    assert_eq!(r.measured.counts.into_iter().collect::<Vec<_>>(), vec![(4, 1)]);
}

#[test]
fn omega_examples() {
    let f = pf_rose();
    let om = f.omega_and_n(5).unwrap();
    assert_eq!(om.omega.len(), 1);
    assert!(om.n.iter().all(|&x| x == 0.0));

    // a fixed node element: occupants are products of g-powers, N_i = i + O(1)
    let h = free_vertex_graph();
    let m = GraphMap::new(
        h.clone(),
        vec![GenPath::parse(&h, 0, "[a] e").unwrap()],
        vec![VertexMap::identity(VertexGroup::Free(1)), VertexMap::identity(VertexGroup::Free(1))],
    )
    .unwrap();
    let om = m.omega_and_n(6).unwrap();
    // Ω_p = {a, 1}, Ω_q = {1}: the p-occupants of order i ≥ 2 are a^(x+y)
    // with x ∈ {0, i−1, 2i−2} and y ∈ {0..3}; q contributes the identity
    for i in 2..=6usize {
        let exps: std::collections::BTreeSet<usize> =
            [0, i - 1, 2 * i - 2].iter().flat_map(|x| (0..=3).map(move |y| x + y)).collect();
        assert_eq!(om.occupants[i], exps.len() + 1);
        let mean = exps.iter().sum::<usize>() as f64 / (exps.len() + 1) as f64;
        assert!((om.n[i] - mean).abs() < 1e-12);
    }

    // x2 -> x2 x1 at a vertex: |ψ^i(x2)| = i + 1, but the prefix products
    // x2 ψ(x2) … have quadratic length, and so does N_i
    let g = GoGraph::new(
        vec![Vertex {
            name: "v".into(),
            group: VertexGroup::Free(2),
        }],
        vec![Edge {
            name: "s".into(),
            from: 0,
            to: 0,
            tree: false,
        }],
        0,
    )
    .unwrap();
    let m = GraphMap::new(
        g.clone(),
        vec![GenPath::parse(&g, 0, "s [b] s").unwrap()],
        vec![VertexMap::free(FreeEnd::parse(&["a", "ba"]).unwrap())],
    )
    .unwrap();
    let om = m.omega_and_n(10).unwrap();
    let d: Vec<f64> = om.n.windows(2).map(|w| w[1] - w[0]).collect();
    let d2: Vec<f64> = d.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(d2[4..].iter().all(|&x| x > 0.5 && x < 1.5), "{:?}", om.n);
}

#[test]
fn estimate_single_node() {
    let h = free_vertex_graph();
    // a primitive 1x1 transition matrix needs an edge image crossing e twice
    let loopy = GoGraph::new(
        vec![Vertex {
            name: "v".into(),
            group: VertexGroup::Free(2),
        }],
        vec![Edge {
            name: "s".into(),
            from: 0,
            to: 0,
            tree: false,
        }],
        0,
    )
    .unwrap();
    let psi = FreeEnd::parse(&["ab", "a"]).unwrap();
    let m = GraphMap::new(
        loopy.clone(),
        vec![GenPath::parse(&loopy, 0, "s [a] s").unwrap()],
        vec![VertexMap::free(psi.clone())],
    )
    .unwrap();
    let g = GenPath::parse(&loopy, 0, "[ab]").unwrap();
    let rows = m.predicted_vs_measured(&g, 6).unwrap();
    for r in &rows {
        let exact = psi.iterate(&Word::parse("ab", 2).unwrap(), r.n).unwrap().len();
        assert_eq!(r.measured, BigUint::from(exact));
        assert_eq!(r.predicted, exact as f64);
    }
    // non-primitive transition matrices are refused
    let m = GraphMap::new(
        h.clone(),
        vec![GenPath::parse(&h, 0, "e").unwrap()],
        vec![VertexMap::identity(VertexGroup::Free(1)), VertexMap::identity(VertexGroup::Free(1))],
    )
    .unwrap();
    assert!(m.predicted_vs_measured(&GenPath::parse(&h, 0, "e").unwrap(), 3).is_ok());
    let r = GoGraph::rose(&["a", "b"]).unwrap();
    let perm = GraphMap::new(
        r.clone(),
        vec![GenPath::parse(&r, 0, "b").unwrap(), GenPath::parse(&r, 0, "a").unwrap()],
        vec![VertexMap::identity(VertexGroup::Trivial)],
    )
    .unwrap();
    assert!(perm.predicted_vs_measured(&GenPath::parse(&r, 0, "a").unwrap(), 3).is_err());
}

#[test]
fn estimate_bands() {
    for (f, text) in [(pf_rose(), "a"), (mixed(), "a")] {
        let pi = GenPath::parse(f.graph(), 0, text).unwrap();
        let rows = f.predicted_vs_measured(&pi, 12).unwrap();
        let ratios: Vec<f64> = rows[4..].iter().map(|r| r.ratio).collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(lo > 0.1 && hi < 10.0, "{ratios:?}");
    }
}

#[test]
fn good_powers() {
    // f(a) = ab misses c; f² covers everything and a, b, c all start with themselves
    let f = pf_rose();
    assert!(!f.images_cover_all_edges());
    assert_eq!(f.find_good_power(12).unwrap(), Some(2));
    let f2 = f.power(2).unwrap();
    assert!(f2.images_cover_all_edges() && f2.ends_stable());
    // last edges a→b→E→A→A: the cube is the first idempotent power
    let m = mixed();
    assert!(!m.ends_stable());
    assert_eq!(m.find_good_power(12).unwrap(), Some(3));
}

#[test]
fn one_edge_examples() {
    let id1 = FreeEnd::identity(1);
    let amalgam = OneEdgeCase::Amalgam {
        phi_a: id1.clone(),
        phi_b: id1,
    };
    let g = vec![
        Syllable::A(Word::parse("aa", 1).unwrap()),
        Syllable::B(Word::parse("A", 1).unwrap()),
    ];
    for n in 0..4 {
        assert_eq!(one_edge_iterate(&amalgam, &g, n).unwrap(), amalgam.to_word(&g).unwrap());
    }
    let hnn = OneEdgeCase::Hnn {
        phi_a: FreeEnd::parse(&["ab", "b"]).unwrap(),
        a: Word::parse("a", 2).unwrap(),
    };
    let t = [Syllable::T(false)];
    // φ²(t) = t·a·ab
    assert_eq!(one_edge_iterate(&hnn, &t, 2).unwrap(), Word::parse("caab", 3).unwrap());
    assert_eq!(direct_iterate(&hnn, &t, 2).unwrap(), Word::parse("caab", 3).unwrap());
    let g = vec![Syllable::T(false), Syllable::A(Word::parse("a", 2).unwrap()), Syllable::T(true)];
    assert_eq!(one_edge_iterate(&hnn, &g, 3).unwrap(), direct_iterate(&hnn, &g, 3).unwrap());
    // malformed normal forms
    assert!(one_edge_iterate(&hnn, &[Syllable::T(false), Syllable::T(true)], 1).is_err());
    assert!(one_edge_iterate(&amalgam, &[Syllable::A(Word::identity(1))], 1).is_err());
}

#[test]
fn claim_examples() {
    let psi = FreeEnd::identity(3);
    let one = Word::identity(3);
    assert!(claim_un_check(&one, &one, &one, &psi, 4).unwrap().pass);
    let w = |s: &str| Word::parse(s, 3).unwrap();
    // ψ = id: u_n = aⁿ c eⁿ
    assert_eq!(u_n(&w("a"), &w("b"), &w("c"), &psi, 3).unwrap(), w("aaabccc"));
    assert!(claim_un_check(&w("a"), &w("b"), &w("c"), &psi, 6).unwrap().pass);
    let r = claim_un_check(&w("a"), &w("b"), &w("c"), &catalog::phi_pf(), 6).unwrap();
    assert!(r.pass);
    assert_eq!(r.rows.len(), 7);
}
