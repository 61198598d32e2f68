//! Helpers shared by the integration tests.
#![allow(dead_code)]

use growthlab_core::fgaut::FreeEnd;
use growthlab_core::word::Word;
use growthlab_core::zlin::IntMatrix;
use num_bigint::BigInt;
use rand::Rng;

/// Elementary integer row operation, with its inverse.
#[derive(Debug, Clone, Copy)]
pub enum Elementary {
    /// row i += s · row j
    Add(usize, usize, i64),
    Swap(usize, usize),
    Negate(usize),
}

impl Elementary {
    pub fn matrix(self, k: usize) -> (IntMatrix, IntMatrix) {
        let mut m = IntMatrix::identity(k);
        let mut inv = IntMatrix::identity(k);
        match self {
            Elementary::Add(i, j, s) => {
                m.set(i, j, s.into());
                inv.set(i, j, (-s).into());
            }
            Elementary::Swap(i, j) => {
                for x in [&mut m, &mut inv] {
                    x.set(i, i, 0.into());
                    x.set(j, j, 0.into());
                    x.set(i, j, 1.into());
                    x.set(j, i, 1.into());
                }
            }
            Elementary::Negate(i) => {
                m.set(i, i, (-1).into());
                inv.set(i, i, (-1).into());
            }
        }
        (m, inv)
    }

    pub fn random(k: usize, rng: &mut impl Rng) -> Self {
        let i = rng.gen_range(0..k);
        if k == 1 {
            return Elementary::Negate(0);
        }
        let j = (i + rng.gen_range(1..k)) % k;
        match rng.gen_range(0..6) {
            0 => Elementary::Swap(i, j),
            1 => Elementary::Negate(i),
            _ => Elementary::Add(i, j, if rng.gen() { 1 } else { -1 }),
        }
    }
}

/// Product of `steps` random elementary matrices, with its inverse.
pub fn random_unimodular(k: usize, steps: usize, rng: &mut impl Rng) -> (IntMatrix, IntMatrix) {
    let mut m = IntMatrix::identity(k);
    let mut inv = IntMatrix::identity(k);
    for _ in 0..steps {
        let (e, ei) = Elementary::random(k, rng).matrix(k);
        m = e.mul(&m).unwrap();
        inv = inv.mul(&ei).unwrap();
    }
    (m, inv)
}

/// Nonzero vector with entries in `-3..=3`.
pub fn random_vector(k: usize, rng: &mut impl Rng) -> Vec<BigInt> {
    loop {
        let v: Vec<BigInt> = (0..k).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
        if v.iter().any(|x| x != &BigInt::from(0)) {
            return v;
        }
    }
}

/// Largest real root of `p` by bisection on `[lo, hi]`, assuming one sign change.
pub fn bisect(p: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let s = p(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid).signum() == s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub mod predictors {
    use growthlab_core::rates::{
        predict_free_product_rate, predict_gog_rate, predict_product_rate, FactorRate, VertexSpec,
    };
    use growthlab_core::zlin::{AlgebraicReal, IntPoly, PureRate};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::Rng;

    /// Bases above 1 in increasing order.
    pub fn bases() -> Vec<AlgebraicReal> {
        let q = |a: i64, b: i64| AlgebraicReal::from_rational(BigRational::new(BigInt::from(a), BigInt::from(b)));
        let root = |c: &[i64]| AlgebraicReal::largest_root_of(&IntPoly::from_i64(c)).unwrap();
        vec![
            q(3, 2),
            root(&[-1, -1, 1]), // golden ratio
            q(2, 1),
            root(&[-1, 2, -3, 1]), // ≈ 2.3247
            q(5, 2),
            q(3, 1),
        ]
    }

    fn bump_base(pool: &[AlgebraicReal], b: &AlgebraicReal) -> AlgebraicReal {
        pool.iter().find(|x| *x > b).cloned().unwrap_or_else(|| b.clone())
    }

    fn random_factor(pool: &[AlgebraicReal], rng: &mut impl Rng) -> FactorRate {
        if rng.gen_ratio(1, 4) {
            FactorRate::SubPolynomial
        } else {
            FactorRate::Docile {
                lambda: pool[rng.gen_range(0..pool.len())].clone(),
                p: rng.gen_range(0..4),
            }
        }
    }

    fn bump_factor(pool: &[AlgebraicReal], f: &FactorRate, rng: &mut impl Rng) -> FactorRate {
        match f {
            FactorRate::SubPolynomial => FactorRate::Docile {
                lambda: pool[rng.gen_range(0..pool.len())].clone(),
                p: rng.gen_range(0..4),
            },
            FactorRate::Docile { lambda, p } => {
                if rng.gen() {
                    FactorRate::Docile { lambda: lambda.clone(), p: p + 1 }
                } else {
                    FactorRate::Docile { lambda: bump_base(pool, lambda), p: *p }
                }
            }
        }
    }

    fn random_vertex(pool: &[AlgebraicReal], rng: &mut impl Rng) -> VertexSpec {
        if rng.gen() {
            VertexSpec::TypeA { q: rng.gen_range(0..4) }
        } else {
            VertexSpec::type_b(pool[rng.gen_range(0..pool.len())].clone(), rng.gen_range(0..4)).unwrap()
        }
    }

    fn bump_vertex(pool: &[AlgebraicReal], v: &VertexSpec, rng: &mut impl Rng) -> VertexSpec {
        match v {
            VertexSpec::TypeA { q } if rng.gen() => VertexSpec::TypeA { q: q + 1 },
            VertexSpec::TypeA { .. } => VertexSpec::type_b(pool[0].clone(), 0).unwrap(),
            VertexSpec::TypeB { lambda, p } => {
                if rng.gen() {
                    VertexSpec::TypeB { lambda: lambda.clone(), p: p + 1 }
                } else {
                    VertexSpec::TypeB { lambda: bump_base(pool, lambda), p: *p }
                }
            }
        }
    }

    fn random_rate(pool: &[AlgebraicReal], rng: &mut impl Rng) -> PureRate {
        if rng.gen_ratio(1, 3) {
            PureRate::polynomial(rng.gen_range(0..4))
        } else {
            PureRate::new(pool[rng.gen_range(0..pool.len())].clone(), rng.gen_range(0..4))
        }
    }

    /// One random instance: raise a single input of each predictor and
    /// check that no prediction goes down. Returns a description of the
    /// first violation.
    pub fn monotonicity_case(rng: &mut impl Rng) -> Result<(), String> {
        let pool = bases();
        // free products, compared on (μ, q)
        let k = rng.gen_range(1..=4);
        let factors: Vec<FactorRate> = (0..k).map(|_| random_factor(&pool, rng)).collect();
        let pf = pool[rng.gen_range(0..pool.len())].clone();
        let mut raised = factors.clone();
        let i = rng.gen_range(0..k);
        raised[i] = bump_factor(&pool, &factors[i], rng);
        let a = predict_free_product_rate(&factors, &pf, None).map_err(|e| e.to_string())?;
        let b = predict_free_product_rate(&raised, &pf, None).map_err(|e| e.to_string())?;
        if (b.mu.clone(), b.q) < (a.mu.clone(), a.q) {
            return Err(format!("free product: {factors:?} -> {raised:?} lowered ({}, {}) to ({}, {})",
                a.mu.to_f64(), a.q, b.mu.to_f64(), b.q));
        }
        // raising the stretch factor never lowers μ
        let pf_up = bump_base(&pool, &pf);
        let c = predict_free_product_rate(&factors, &pf_up, None).map_err(|e| e.to_string())?;
        if c.mu < a.mu {
            return Err(format!("free product: raising λ lowered μ for {factors:?}"));
        }
        // graphs of groups
        let vs: Vec<VertexSpec> = (0..rng.gen_range(1..=4)).map(|_| random_vertex(&pool, rng)).collect();
        let mut vs_up = vs.clone();
        let j = rng.gen_range(0..vs.len());
        vs_up[j] = bump_vertex(&pool, &vs[j], rng);
        let ga = predict_gog_rate(&vs).map_err(|e| e.to_string())?;
        let gb = predict_gog_rate(&vs_up).map_err(|e| e.to_string())?;
        if gb.key() < ga.key() {
            return Err(format!("graph of groups: {vs:?} -> {vs_up:?} lowered the prediction"));
        }
        // direct products
        let rates: Vec<PureRate> = (0..rng.gen_range(1..=3)).map(|_| random_rate(&pool, rng)).collect();
        let ab = random_rate(&pool, rng);
        let mut rates_up = rates.clone();
        let m = rng.gen_range(0..rates.len());
        rates_up[m] = PureRate::new(rates[m].base.clone(), rates[m].degree + 1);
        if predict_product_rate(&rates_up, &ab) < predict_product_rate(&rates, &ab) {
            return Err("direct product: raising a factor lowered the prediction".into());
        }
        Ok(())
    }
}

pub mod free {
    use growthlab_core::fgaut::{AutWitness, FreeEnd};
    use growthlab_core::word::Word;
    use rand::Rng;

    fn gen(rank: usize, i: usize) -> Word {
        Word::generator(rank, i).unwrap()
    }

    /// Random Nielsen move `x_i ↦ x_i x_j^{±1}`, `x_i ↦ x_i⁻¹` or a swap,
    /// with its inverse.
    pub fn random_move(rank: usize, rng: &mut impl Rng) -> AutWitness {
        let mut fwd: Vec<Word> = (0..rank).map(|i| gen(rank, i)).collect();
        let mut inv = fwd.clone();
        let i = rng.gen_range(0..rank);
        let j = (i + rng.gen_range(1..rank)) % rank;
        match rng.gen_range(0..6) {
            0 => {
                fwd.swap(i, j);
                inv.swap(i, j);
            }
            1 => {
                fwd[i] = gen(rank, i).inverse();
                inv[i] = fwd[i].clone();
            }
            _ => {
                let xj = if rng.gen() { gen(rank, j) } else { gen(rank, j).inverse() };
                fwd[i] = gen(rank, i).concat(&xj).unwrap();
                inv[i] = gen(rank, i).concat(&xj.inverse()).unwrap();
            }
        }
        FreeEnd::new(fwd)
            .unwrap()
            .verify_automorphism(FreeEnd::new(inv).unwrap())
            .unwrap()
    }

    pub fn random_aut(rank: usize, moves: usize, rng: &mut impl Rng) -> AutWitness {
        (0..moves).fold(AutWitness::identity(rank), |acc, _| {
            acc.compose(&random_move(rank, rng)).unwrap()
        })
    }

    /// Freely reduced word of at most `max_len` letters.
    pub fn random_word(rank: usize, max_len: usize, rng: &mut impl Rng) -> Word {
        let len = rng.gen_range(0..=max_len);
        let letters: Vec<i32> = (0..len)
            .map(|_| {
                let g = rng.gen_range(1..=rank as i32);
                if rng.gen() { g } else { -g }
            })
            .collect();
        Word::from_letters(rank, letters).unwrap()
    }

    /// Non-empty positive word of at most `max_len` letters.
    pub fn random_positive_word(rank: usize, max_len: usize, rng: &mut impl Rng) -> Word {
        let len = rng.gen_range(1..=max_len);
        Word::from_letters(rank, (0..len).map(|_| rng.gen_range(1..=rank as i32))).unwrap()
    }
}

pub mod trichotomy {
    use growthlab_core::fgaut::catalog;
    use growthlab_core::product::{abelian_double, BetaClass, ProductAut, ProductElement};
    use growthlab_core::word::Word;
    use growthlab_core::zlin::IntVector;
    use num_bigint::BigInt;
    use rand::Rng;

    /// `ℳ(φ_pf, M(φ_pf), I)` on `F₃ × Z³`.
    pub fn chi() -> ProductAut {
        abelian_double(catalog::phi_pf_witness()).unwrap()
    }

    fn vector(rng: &mut impl Rng, lo: i64, hi: i64) -> IntVector {
        IntVector((0..3).map(|_| BigInt::from(rng.gen_range(lo..=hi))).collect())
    }

    /// Word with trivial abelianisation: a product of one or two commutators
    /// of short positive words.
    fn commutator_word(rng: &mut impl Rng) -> Word {
        let mut w = Word::identity(3);
        for _ in 0..rng.gen_range(1..=2) {
            let x = super::free::random_positive_word(3, 2, rng);
            let y = super::free::random_positive_word(3, 2, rng);
            let c = x.concat(&y).unwrap().concat(&x.inverse()).unwrap().concat(&y.inverse()).unwrap();
            w = w.concat(&c).unwrap();
        }
        w
    }

    /// The identity followed by alternating kernel and generic elements,
    /// `size` in all, each tagged with the class it was built to be in. The tag is independent of the library's
    /// pairing: identity, trivial abelianisation, or positive word.
    pub fn sample(size: usize, rng: &mut impl Rng) -> Vec<(ProductElement, BetaClass)> {
        let mut out = vec![(ProductElement::identity(3, 3), BetaClass::Identity)];
        while out.len() < size {
            let e = match out.len() % 2 {
                1 => {
                    let h = if rng.gen() { Word::identity(3) } else { commutator_word(rng) };
                    let mut a = vector(rng, 0, 2);
                    if h.is_identity() && a.is_zero() {
                        a = IntVector::basis(3, rng.gen_range(0..3));
                    }
                    (ProductElement::new(h, a), BetaClass::Kernel)
                }
                _ => (
                    ProductElement::new(super::free::random_positive_word(3, 4, rng), vector(rng, 0, 2)),
                    BetaClass::Generic,
                ),
            };
            out.push(e);
        }
        out
    }
}

pub mod conj {
    //! Conjugacy length by exhaustive conjugator search.

    use std::collections::{HashMap, VecDeque};

    use growthlab_core::word::Word;

    /// All freely reduced letter sequences of length ≤ `max_len` over `rank`.
    pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Vec<i32>> {
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for g in 1..=rank as i32 {
                    for l in [g, -g] {
                        if w.last() != Some(&-l) {
                            let mut v: Vec<i32> = w.clone();
                            v.push(l);
                            next.push(v);
                        }
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// `g·x·g⁻¹` with free cancellation at both ends.
    pub fn conjugate(x: &VecDeque<i32>, g: i32) -> VecDeque<i32> {
        let mut y = x.clone();
        if y.front() == Some(&-g) {
            y.pop_front();
        } else {
            y.push_front(g);
        }
        if y.back() == Some(&g) {
            y.pop_back();
        } else {
            y.push_back(-g);
        }
        y
    }

    /// `min{|h w h⁻¹| : |h| ≤ depth}` by depth-first search over `h`, built one
    /// letter at a time on the left. A branch is cut only when it provably
    /// cannot improve: each further letter shortens the conjugate by at most 2.
    pub fn brute_conj_len(w: &[i32], rank: usize, depth: usize) -> usize {
        fn go(x: &VecDeque<i32>, last: i32, left: usize, rank: usize, best: &mut usize) {
            *best = (*best).min(x.len());
            if left == 0 || x.len().saturating_sub(2 * left) >= *best {
                return;
            }
            for g in 1..=rank as i32 {
                for l in [g, -g] {
                    if l == -last {
                        continue; // h would not be reduced
                    }
                    go(&conjugate(x, l), l, left - 1, rank, best);
                }
            }
        }
        let mut best = w.len();
        go(&w.iter().copied().collect(), 0, depth, rank, &mut best);
        best
    }

    /// Orbit representative under signed permutations of the generators; these
    /// are isometries of the word metric, so they preserve conjugacy length.
    pub fn canonical(w: &[i32], rank: usize) -> Vec<i32> {
        let mut perms: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..rank {
            let mut next = Vec::new();
            for p in &perms {
                for i in (0..rank).filter(|i| !p.contains(i)) {
                    let mut q = p.clone();
                    q.push(i);
                    next.push(q);
                }
            }
            perms = next;
        }
        let mut best: Option<Vec<i32>> = None;
        for p in &perms {
            for signs in 0..(1u32 << rank) {
                let img: Vec<i32> = w
                    .iter()
                    .map(|&l| {
                        let i = l.unsigned_abs() as usize - 1;
                        let s = if signs >> i & 1 == 1 { -1 } else { 1 };
                        s * l.signum() * (p[i] as i32 + 1)
                    })
                    .collect();
                if best.as_ref().is_none_or(|b| img < *b) {
                    best = Some(img);
                }
            }
        }
        best.expect("at least the identity permutation")
    }

    /// `‖w‖` against the exhaustive search for every reduced word of length
    /// ≤ `max_len` in ranks `1..=max_rank`; returns the number of words checked.
    pub fn check_exhaustive(max_rank: usize, max_len: usize) -> Result<usize, String> {
        let mut checked = 0;
        for rank in 1..=max_rank {
            let mut memo: HashMap<Vec<i32>, usize> = HashMap::new();
            for letters in reduced_words(rank, max_len) {
                let w = Word::from_letters(rank, letters.iter().copied()).map_err(|e| e.to_string())?;
                if w.letters() != letters.as_slice() {
                    return Err(format!("{letters:?} is reduced but was rewritten to {w}"));
                }
                let key = canonical(&letters, rank);
                let brute = *memo
                    .entry(key.clone())
                    .or_insert_with(|| brute_conj_len(&key, rank, key.len()));
                if w.conj_len() != brute || w.cyclic_reduce().core.len() != brute {
                    return Err(format!("rank {rank}, w = {w}: ‖w‖ = {}, search gives {brute}", w.conj_len()));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }
}

/// `|φⁿ(w)| = 1ᵀ Mⁿ c(w)` for positive `φ`, `w`, where `M` and `c` are
/// letter counts taken directly from the words; exact in `u128`.
pub fn check_occurrences(f: &FreeEnd, w: &Word, n_max: usize) -> Result<(), String> {
    let r = f.rank();
    let mut m = vec![vec![0u128; r]; r];
    for j in 0..r {
        for &l in f.image(j).letters() {
            m[l as usize - 1][j] += 1;
        }
    }
    let lib = f.occurrence_matrix();
    for i in 0..r {
        for j in 0..r {
            if *lib.get(i, j) != m[i][j].into() {
                return Err(format!("occurrence matrix entry ({i}, {j}) of {f}"));
            }
        }
    }
    let mut c = vec![0u128; r];
    for &l in w.letters() {
        c[l as usize - 1] += 1;
    }
    let (orbit, err) = f.orbit(w, n_max);
    if let Some(e) = err {
        return Err(format!("{f} on {w}: {e}"));
    }
    for (n, img) in orbit.iter().enumerate() {
        if img.len() as u128 != c.iter().sum::<u128>() {
            return Err(format!("{f} on {w}, n = {n}: {} letters, counts give {}", img.len(), c.iter().sum::<u128>()));
        }
        c = (0..r).map(|i| (0..r).map(|j| m[i][j] * c[j]).sum()).collect();
    }
    Ok(())
}
