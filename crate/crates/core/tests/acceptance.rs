//! The ten acceptance criteria, each at its stated tolerance and time
//! budget. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use growthlab_core::fgaut::{catalog, FreeEnd};
use growthlab_core::product::{beta_class, BetaClass, Metric, ProductAut, ProductElement};
use growthlab_core::rates::{classify_sequence, RateEstimate, Verdict};
use growthlab_core::splitting::examples::{mixed, pf_rose, two_vertex};
use growthlab_core::splitting::{
    claim_un_check, direct_iterate, one_edge_iterate, GenPath, GraphMap, OEdge, OneEdgeCase, Syllable, Token,
};
use growthlab_core::word::Word;
use growthlab_core::zlin::{spectral_growth, AlgebraicReal, IntMatrix, IntVector, SpectralGrowth};
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn pf_lambda() -> f64 {
    common::bisect(|x| x * x * x - 3.0 * x * x + 2.0 * x - 1.0, 2.0, 3.0)
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target
}

fn lengths(words: &[Word], conj: bool) -> Vec<(u64, BigUint)> {
    words
        .iter()
        .enumerate()
        .map(|(n, w)| (n as u64, BigUint::from(if conj { w.conj_len() } else { w.len() })))
        .collect()
}

fn fit(samples: &[(u64, BigUint)]) -> Result<RateEstimate, String> {
    classify_sequence(samples).map_err(|e| e.to_string())
}

fn budget(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        return Err(format!("took {:.1}s, budget {}s", t.as_secs_f64(), limit.as_secs()));
    }
    Ok(())
}

/// PF growth of φ_pf on `a`.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let lambda = pf_lambda();
    let (orbit, err) = catalog::phi_pf().orbit(&Word::parse("a", 3).unwrap(), 20);
    if let Some(e) = err {
        return Err(e.to_string());
    }
    let w = fit(&lengths(&orbit, false))?;
    let c = fit(&lengths(&orbit, true))?;
    if !within(w.lambda_hat, lambda, 0.02) || w.p_hat.abs() > 0.25 {
        return Err(format!("word length: λ̂ = {}, p̂ = {} (λ = {lambda:.6})", w.lambda_hat, w.p_hat));
    }
    if !within(c.lambda_hat, w.lambda_hat, 0.02) {
        return Err(format!("conjugacy λ̂ = {} vs word λ̂ = {}", c.lambda_hat, w.lambda_hat));
    }
    budget(start, Duration::from_secs(30))?;
    Ok(format!("λ̂ = {:.6} (root {lambda:.6}), p̂ = {:.3}, conjugacy λ̂ = {:.6}", w.lambda_hat, w.p_hat, c.lambda_hat))
}

/// Polynomial tower on rank 4.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let psi = catalog::polynomial_tower(4);
    let mut report = Vec::new();
    for k in 1..4 {
        let x = Word::generator(4, k).unwrap();
        let (orbit, err) = psi.orbit(&x, 150);
        if let Some(e) = err {
            return Err(e.to_string());
        }
        for (n, w) in orbit.iter().enumerate() {
            let exact = match k {
                1 => Some(n + 1),
                2 => Some(1 + n * (n + 1) / 2),
                _ => None,
            };
            if let Some(e) = exact {
                if w.len() != e {
                    return Err(format!("|ψ^{n}(x{})| = {}, closed form {e}", k + 1, w.len()));
                }
            }
        }
        let est = fit(&lengths(&orbit, false))?;
        if est.lambda_hat >= 1.02 || (est.p_hat - k as f64).abs() > 0.25 {
            return Err(format!("x{}: λ̂ = {}, p̂ = {}, expected p = {k}", k + 1, est.lambda_hat, est.p_hat));
        }
        report.push(format!("x{} p̂ = {:.3}", k + 1, est.p_hat));
    }
    budget(start, Duration::from_secs(10))?;
    Ok(format!("{}; closed forms exact for n ≤ 150", report.join(", ")))
}

fn norms(a: &IntMatrix, v: &IntVector, n_max: usize) -> Vec<(u64, BigUint)> {
    let mut w = v.clone();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        out.push((n as u64, w.l1().magnitude().clone()));
        w = a.apply(&w).unwrap();
    }
    out
}

/// Jordan growth and random unimodular matrices.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let j = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
    let v = IntVector::from_i64(&[0, 1]);
    let g = spectral_growth(&j, &v).map_err(|e| e.to_string())?;
    let r = g.exact().ok_or("Jordan block fell back to a fit")?;
    if r.degree != 1 || r.base != AlgebraicReal::one() {
        return Err(format!("Jordan block gave {r}"));
    }
    if norms(&j, &v, 100).iter().any(|(n, x)| *x != BigUint::from(n + 1)) {
        return Err("‖Jⁿ(0,1)‖₁ ≠ n + 1".into());
    }
    let c = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]).unwrap();
    let g = spectral_growth(&c, &IntVector::from_i64(&[1, 0])).map_err(|e| e.to_string())?;
    let r = g.exact().ok_or("cat map fell back to a fit")?;
    let golden_sq = AlgebraicReal::largest_root_of(&growthlab_core::zlin::IntPoly::from_i64(&[1, -3, 1])).unwrap();
    if r.degree != 0 || r.base != golden_sq {
        return Err(format!("[[2,1],[1,1]] gave {r}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..20 {
        let (a, _) = common::random_unimodular(3, 10, &mut rng);
        let v = IntVector(common::random_vector(3, &mut rng));
        let SpectralGrowth::Exact(rate) = spectral_growth(&a, &v).map_err(|e| e.to_string())? else {
            return Err("3×3 local minimal polynomial exceeded the exact limit".into());
        };
        let est = fit(&norms(&a, &v, 60))?;
        let mu = rate.base.to_f64();
        let dl = (est.lambda_hat - mu).abs() / mu;
        let dp = (est.p_hat - rate.degree as f64).abs();
        worst = (worst.0.max(dp), worst.1.max(dl));
        if dp > 0.25 || dl > 0.02 {
            return Err(format!("matrix {i} {a:?}, v = {v:?}: spectral {rate}, fit λ̂ = {}, p̂ = {}", est.lambda_hat, est.p_hat));
        }
    }
    budget(start, Duration::from_secs(60))?;
    Ok(format!("exact cases match; 20 random matrices: max |Δp| = {:.3}, max rel |Δμ| = {:.4}", worst.0, worst.1))
}

fn random_paut(rng: &mut impl Rng) -> ProductAut {
    let k = rng.gen_range(1..=3);
    let phi = common::free::random_aut(3, rng.gen_range(0..=3), rng);
    let (psi, _) = common::random_unimodular(k, rng.gen_range(0..=6), rng);
    let rows: Vec<Vec<BigInt>> = (0..k).map(|_| (0..3).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect()).collect();
    ProductAut::new(phi, psi, IntMatrix::from_rows(rows).unwrap()).unwrap()
}

fn random_element(k: usize, rng: &mut impl Rng) -> ProductElement {
    ProductElement::new(
        common::free::random_word(3, 8, rng),
        IntVector((0..k).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect()),
    )
}

/// Group law, powers and the closed-form α_n.
fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let e = |x: growthlab_core::Error| x.to_string();
    for case in 0..1000 {
        let m1 = random_paut(&mut rng);
        let mut m2 = random_paut(&mut rng);
        while m2.abelian_rank() != m1.abelian_rank() {
            m2 = random_paut(&mut rng);
        }
        let k = m1.abelian_rank();
        let (g, h) = (random_element(k, &mut rng), random_element(k, &mut rng));
        let lhs = m1.apply(&g.mul(&h).map_err(e)?).map_err(e)?;
        let rhs = m1.apply(&g).map_err(e)?.mul(&m1.apply(&h).map_err(e)?).map_err(e)?;
        if lhs != rhs {
            return Err(format!("case {case}: χ(gh) ≠ χ(g)χ(h)"));
        }
        let comp = m1.compose(&m2).map_err(e)?;
        if comp.apply(&g).map_err(e)? != m1.apply(&m2.apply(&g).map_err(e)?).map_err(e)? {
            return Err(format!("case {case}: composition is not the action of the product"));
        }
    }
    for case in 0..1000 {
        let m = random_paut(&mut rng);
        let g = random_element(m.abelian_rank(), &mut rng);
        let n = rng.gen_range(0..=12);
        let mut cur = g.clone();
        for _ in 0..n {
            cur = m.apply(&cur).map_err(e)?;
        }
        if m.power(n).map_err(e)?.apply(&g).map_err(e)? != cur {
            return Err(format!("case {case}: power {n} disagrees with iteration"));
        }
    }
    let chi = common::trichotomy::chi();
    let t = catalog::phi_pf().abelianize();
    for n in 1..=10u64 {
        if chi.alpha_power(n as usize).map_err(e)? != t.pow(n - 1).map_err(e)?.scale(&BigInt::from(n)) {
            return Err(format!("α_{n} ≠ n·T^(n−1)"));
        }
    }
    Ok("1000 homomorphism + 1000 power cases exact; α_n = n·T^(n−1) for n ≤ 10".into())
}

/// Trichotomy for the abelian double of φ_pf.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let chi = common::trichotomy::chi();
    let lambda = pf_lambda();
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let sample = common::trichotomy::sample(30, &mut rng);
    let mut tally = [0usize; 3];
    let mut p_range = [(f64::INFINITY, f64::NEG_INFINITY); 2];
    for (g, built) in &sample {
        let class = beta_class(&chi, g).map_err(|e| e.to_string())?;
        if class != *built {
            return Err(format!("{g}: built as {built:?}, pairing says {class:?}"));
        }
        for metric in [Metric::Word, Metric::Conjugacy] {
            let (seq, err) = chi.growth(g, 16, metric);
            if let Some(e) = err {
                return Err(e.to_string());
            }
            let est = fit(&seq)?;
            let ok = match class {
                BetaClass::Identity => est.verdict == Verdict::Constant,
                BetaClass::Kernel | BetaClass::Generic => {
                    let (p, slot) = if class == BetaClass::Generic { (1.0, 1) } else { (0.0, 0) };
                    p_range[slot] = (p_range[slot].0.min(est.p_hat), p_range[slot].1.max(est.p_hat));
                    within(est.lambda_hat, lambda, 0.02) && (est.p_hat - p).abs() <= 0.25
                }
            };
            if !ok {
                return Err(format!("{g} ({class:?}, {metric:?}): λ̂ = {}, p̂ = {}, {}", est.lambda_hat, est.p_hat, est.verdict));
            }
        }
        tally[class as usize] += 1;
    }
    budget(start, Duration::from_secs(300))?;
    Ok(format!(
        "{} identity, {} kernel (p̂ in [{:.3}, {:.3}]), {} generic (p̂ in [{:.3}, {:.3}])",
        tally[0], tally[1], p_range[0].0, p_range[0].1, tally[2], p_range[1].0, p_range[1].1
    ))
}

/// Node-order census against the transition-matrix counts.
fn criterion_6() -> Outcome {
    let mut checked = 0;
    for (name, f) in [("pf_rose", pf_rose()), ("mixed", mixed()), ("two_vertex", two_vertex())] {
        let g = f.graph();
        for id in 0..g.edges().len() {
            let pi = GenPath::from_edges(g, g.edges()[id].from, &[OEdge::forward(id)]).unwrap();
            for n in 1..=8 {
                let r = f.census_check(&pi, n).map_err(|e| e.to_string())?;
                // ℓ(fⁿ(π)) + 1 nodes in all
                let total_ok = r.measured.total == r.edge_lengths[n].to_string().parse::<usize>().unwrap() + 1;
                if !r.pass || !total_ok {
                    return Err(format!("{name}, edge {}, n = {n}: measured {:?}, expected {:?}", g.edge_name(OEdge::forward(id)), r.measured, r.expected));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (map, edge, n) cases exact for 1 ≤ n ≤ 8"))
}

/// The u_n identity.
fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let psis = [FreeEnd::identity(3), catalog::phi_pf(), catalog::nielsen(3)];
    for trial in 0..200 {
        let psi = &psis[trial % 3];
        let a = common::free::random_word(3, 3, &mut rng);
        let c = common::free::random_word(3, 3, &mut rng);
        let e = common::free::random_word(3, 3, &mut rng);
        let r = claim_un_check(&a, &c, &e, psi, 6).map_err(|x| x.to_string())?;
        if !r.pass {
            return Err(format!("a = {a}, c = {c}, e = {e}, ψ = {psi}: {:?}", r.rows));
        }
    }
    Ok("200 triples, n ≤ 6".into())
}

/// One-edge closed forms against direct iteration.
fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cases = [
        ("amalgam", OneEdgeCase::Amalgam { phi_a: catalog::phi_pf(), phi_b: catalog::nielsen(2) }),
        ("hnn", OneEdgeCase::Hnn { phi_a: catalog::phi_pf(), a: Word::parse("aC", 3).unwrap() }),
    ];
    for (name, case) in &cases {
        let (ra, rb) = match case {
            OneEdgeCase::Amalgam { phi_a, phi_b } => (phi_a.rank(), phi_b.rank()),
            OneEdgeCase::Hnn { phi_a, .. } => (phi_a.rank(), 0),
        };
        let mut made = 0;
        while made < 100 {
            let len = rng.gen_range(1..=6);
            let mut g: Vec<Syllable> = Vec::new();
            let mut on_a: bool = rng.gen();
            while g.len() < len {
                let s = match case {
                    OneEdgeCase::Amalgam { .. } => {
                        on_a = !on_a;
                        if on_a { Syllable::A(common::free::random_word(ra, 3, &mut rng)) } else { Syllable::B(common::free::random_word(rb, 3, &mut rng)) }
                    }
                    OneEdgeCase::Hnn { .. } if rng.gen() => Syllable::A(common::free::random_word(ra, 3, &mut rng)),
                    OneEdgeCase::Hnn { .. } => Syllable::T(rng.gen()),
                };
                g.push(s);
            }
            if case.validate(&g).is_err() {
                continue; // not a reduced normal form
            }
            made += 1;
            for n in 0..=8 {
                let a = one_edge_iterate(case, &g, n).map_err(|e| e.to_string())?;
                let b = direct_iterate(case, &g, n).map_err(|e| e.to_string())?;
                if a != b {
                    return Err(format!("{name}, n = {n}, g = {g:?}: {a} vs {b}"));
                }
            }
        }
    }
    Ok("100 normal forms per case (amalgam, HNN with φ(t) = ta), n ≤ 8, word-for-word".into())
}

/// Measured against predicted lengths.
fn criterion_9() -> Outcome {
    let mut worst = 1.0f64;
    let mut lines = Vec::new();
    let runs: [(&str, GraphMap, &[&str]); 2] = [
        ("pf_rose", pf_rose(), &["a", "a b", "c A"]),
        ("mixed", mixed(), &["a", "b", "a v.b A", "a b"]),
    ];
    for (name, f, elements) in runs {
        let g = f.graph();
        let mut c_map = 1.0f64;
        for text in elements {
            let tokens = Token::parse_word(g, text).map_err(|e| e.to_string())?;
            let pi = GenPath::from_element(g, &tokens).map_err(|e| e.to_string())?;
            let rows = f.predicted_vs_measured(&pi, 12).map_err(|e| e.to_string())?;
            for row in rows.iter().filter(|r| (4..=12).contains(&r.n)) {
                c_map = c_map.max(row.ratio).max(1.0 / row.ratio);
            }
        }
        worst = worst.max(c_map);
        lines.push(format!("{name} C = {c_map:.3}"));
    }
    if worst > 10.0 {
        return Err(format!("band constant {worst:.3} > 10 ({})", lines.join(", ")));
    }
    Ok(format!("{}; 4 ≤ n ≤ 12", lines.join(", ")))
}

/// Oracle suites.
fn criterion_10() -> Outcome {
    let checked = common::conj::check_exhaustive(3, 8)?;
    let f = catalog::phi_pf();
    for i in 0..3 {
        common::check_occurrences(&f, &Word::generator(3, i).unwrap(), 20)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let images = (0..3)
            .map(|_| common::free::random_positive_word(3, 2, &mut rng))
            .collect();
        let g = FreeEnd::new(images).unwrap();
        common::check_occurrences(&g, &common::free::random_positive_word(3, 3, &mut rng), 20)?;
    }
    for _ in 0..500 {
        common::predictors::monotonicity_case(&mut rng)?;
    }
    Ok(format!("{checked} words exhaustive; positive maps exact to n = 20; 500 monotonicity cases"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "PF growth", criterion_1),
        (2, "polynomial tower", criterion_2),
        (3, "Jordan growth", criterion_3),
        (4, "product group law", criterion_4),
        (5, "trichotomy", criterion_5),
        (6, "node-order census", criterion_6),
        (7, "u_n identity", criterion_7),
        (8, "one-edge closed forms", criterion_8),
        (9, "length-estimate band", criterion_9),
        (10, "oracle suites", criterion_10),
    ];
    let mut failed = 0;
    for (i, name, run) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {i:>2} PASS  {name} [{secs:.1}s]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {i:>2} FAIL  {name} [{secs:.1}s]: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
