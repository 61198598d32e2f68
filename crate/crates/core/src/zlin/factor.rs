//! Factorisation of integer polynomials into irreducibles.
//!
//! Cantor–Zassenhaus modulo a single prime large enough to bound every
//! factor's coefficients, followed by subset recombination. Randomness comes
//! from a fixed-seed ChaCha stream so results are reproducible.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::poly::IntPoly;

/// Irreducible factors of `f` over `Z`, each primitive with positive leading
/// coefficient, repeated by multiplicity and sorted by degree then
/// coefficients. Constant content is dropped.
pub fn factor(f: &IntPoly) -> Vec<IntPoly> {
    let mut out = Vec::new();
    if f.is_zero() || f.is_constant() {
        return out;
    }
    for (j, part) in f.primitive().square_free_decomposition().iter().enumerate() {
        if part.degree() == 0 {
            continue;
        }
        for g in factor_square_free(part) {
            for _ in 0..=j {
                out.push(g.clone());
            }
        }
    }
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs())));
    out
}

/// Irreducible factors of a square-free primitive polynomial.
pub fn factor_square_free(f: &IntPoly) -> Vec<IntPoly> {
    let f = f.primitive();
    let mut out = Vec::new();
    // pull out x first; it keeps the modular images coprime to x
    let mut f = f;
    if f.coeff(0).is_zero() {
        out.push(IntPoly::x());
        f = IntPoly::new(f.coeffs()[1..].to_vec());
    }
    if f.degree() == 0 {
        return out;
    }
    if f.degree() == 1 {
        out.push(f);
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d ^ f.degree() as u64);
    let lc = f.lc();
    let bound = coefficient_bound(&f);
    let p = choose_prime(&f, &(BigInt::from(2) * &bound * &lc + 1), &mut rng);
    let modular = Fp::new(p.clone());
    let fp = modular.monic(&modular.reduce(&f));
    let mut locals = Vec::new();
    for (g, d) in modular.distinct_degree(&fp) {
        modular.equal_degree(&g, d, &mut rng, &mut locals);
    }
    out.extend(recombine(&f, locals, &modular));
    out
}

/// `2^deg · ‖f‖₂`, rounded up; bounds the coefficients of any factor.
fn coefficient_bound(f: &IntPoly) -> BigInt {
    let norm2: BigInt = f.coeffs().iter().map(|c| c * c).sum();
    let root = norm2.sqrt() + 1;
    root << f.degree()
}

fn choose_prime(f: &IntPoly, above: &BigInt, rng: &mut ChaCha8Rng) -> BigInt {
    let lc = f.lc();
    let mut candidate = above + rng.gen_bigint_range(&BigInt::zero(), above);
    if candidate.is_even() {
        candidate += 1;
    }
    loop {
        if is_probable_prime(&candidate, rng) && !(&lc % &candidate).is_zero() {
            let fp = Fp::new(candidate.clone());
            let g = fp.reduce(f);
            let d = fp.derivative(&g);
            if fp.gcd(&g, &d).len() == 1 {
                return candidate;
            }
        }
        candidate += 2;
    }
}

/// Miller–Rabin with 32 random bases.
pub fn is_probable_prime(n: &BigInt, rng: &mut ChaCha8Rng) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    for small in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let s = BigInt::from(small);
        if n == &s {
            return true;
        }
        if (n % &s).is_zero() {
            return false;
        }
    }
    let n1: BigInt = n - 1;
    let mut d = n1.clone();
    let mut r = 0u32;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'witness: for _ in 0..32 {
        let a = rng.gen_bigint_range(&two, &n1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..r {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Try products of the modular factors, smallest subsets first.
fn recombine(f: &IntPoly, mut locals: Vec<Vec<BigInt>>, fp: &Fp) -> Vec<IntPoly> {
    let mut f = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= locals.len() {
        let mut found = false;
        for subset in Subsets::new(locals.len(), size) {
            let lc = fp.reduce_int(&f.lc());
            let mut prod = vec![lc];
            for &i in &subset {
                prod = fp.mul(&prod, &locals[i]);
            }
            let candidate = fp.symmetric(&prod).primitive();
            if candidate.degree() == 0 {
                continue;
            }
            if let Some(q) = f.div_exact(&candidate) {
                out.push(candidate);
                f = q.primitive();
                for &i in subset.iter().rev() {
                    locals.remove(i);
                }
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if f.degree() > 0 {
        out.push(f);
    }
    out
}

/// k-subsets of 0..n in lexicographic order.
struct Subsets {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        Subsets {
            n,
            cur: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.take()?;
        let k = cur.len();
        let mut next = cur.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.cur = Some(next);
                return Some(cur);
            }
        }
        Some(cur)
    }
}

/// Polynomial arithmetic over `F_p`, coefficients low to high, trimmed.
struct Fp {
    p: BigInt,
}

type Pp = Vec<BigInt>;

impl Fp {
    fn new(p: BigInt) -> Self {
        Fp { p }
    }

    fn reduce_int(&self, c: &BigInt) -> BigInt {
        c.mod_floor(&self.p)
    }

    fn trim(mut a: Pp) -> Pp {
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
        a
    }

    fn reduce(&self, f: &IntPoly) -> Pp {
        Self::trim(f.coeffs().iter().map(|c| self.reduce_int(c)).collect())
    }

    fn symmetric(&self, a: &Pp) -> IntPoly {
        let half = &self.p >> 1;
        IntPoly::new(
            a.iter()
                .map(|c| if c > &half { c - &self.p } else { c.clone() })
                .collect(),
        )
    }

    fn inv(&self, c: &BigInt) -> BigInt {
        c.modpow(&(&self.p - 2), &self.p)
    }

    fn monic(&self, a: &Pp) -> Pp {
        match a.last() {
            None => vec![],
            Some(l) => {
                let li = self.inv(l);
                a.iter().map(|c| (c * &li) % &self.p).collect()
            }
        }
    }

    fn sub(&self, a: &Pp, b: &Pp) -> Pp {
        let n = a.len().max(b.len());
        let z = BigInt::zero();
        Self::trim(
            (0..n)
                .map(|i| (a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).mod_floor(&self.p))
                .collect(),
        )
    }

    fn mul(&self, a: &Pp, b: &Pp) -> Pp {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Self::trim(out.into_iter().map(|c| c % &self.p).collect())
    }

    fn divrem(&self, a: &Pp, b: &Pp) -> (Pp, Pp) {
        assert!(!b.is_empty(), "division by zero polynomial mod p");
        let mut r = a.clone();
        if r.len() < b.len() {
            return (vec![], r);
        }
        let li = self.inv(b.last().unwrap());
        let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = (r.last().unwrap() * &li) % &self.p;
            for (j, y) in b.iter().enumerate() {
                r[shift + j] = (&r[shift + j] - &c * y).mod_floor(&self.p);
            }
            q[shift] = c;
            r = Self::trim(r);
        }
        (Self::trim(q), r)
    }

    fn rem(&self, a: &Pp, b: &Pp) -> Pp {
        self.divrem(a, b).1
    }

    fn gcd(&self, a: &Pp, b: &Pp) -> Pp {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    fn derivative(&self, a: &Pp) -> Pp {
        Self::trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| (c * BigInt::from(i)) % &self.p)
                .collect(),
        )
    }

    fn powmod(&self, base: &Pp, e: &BigInt, m: &Pp) -> Pp {
        let mut result = vec![BigInt::one()];
        let mut b = self.rem(base, m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = self.rem(&self.mul(&result, &b), m);
            }
            if i + 1 < bits {
                b = self.rem(&self.mul(&b, &b), m);
            }
        }
        self.rem(&result, m)
    }

    /// Split a monic square-free `f` into products of irreducibles of equal degree.
    fn distinct_degree(&self, f: &Pp) -> Vec<(Pp, usize)> {
        let mut out = Vec::new();
        let x = vec![BigInt::zero(), BigInt::one()];
        let mut f = f.clone();
        let mut h = x.clone();
        let mut d = 0;
        while f.len() > 1 {
            d += 1;
            if 2 * d > f.len() - 1 {
                let deg = f.len() - 1;
                out.push((f, deg));
                break;
            }
            h = self.powmod(&h, &self.p, &f);
            let g = self.gcd(&f, &self.sub(&h, &x));
            if g.len() > 1 {
                f = self.divrem(&f, &g).0;
                h = self.rem(&h, &f);
                out.push((g, d));
            }
        }
        out
    }

    fn equal_degree(&self, f: &Pp, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Pp>) {
        let n = f.len() - 1;
        if n == d {
            out.push(self.monic(f));
            return;
        }
        let e = (self.p.pow(d as u32) - 1) / 2;
        loop {
            let a: Pp = Self::trim((0..n).map(|_| rng.gen_bigint_range(&BigInt::zero(), &self.p)).collect());
            if a.len() < 2 {
                continue;
            }
            let b = self.sub(&self.powmod(&a, &e, f), &vec![BigInt::one()]);
            let g = self.gcd(f, &b);
            if g.len() > 1 && g.len() < f.len() {
                let h = self.monic(&self.divrem(f, &g).0);
                self.equal_degree(&g, d, rng, out);
                self.equal_degree(&h, d, rng, out);
                return;
            }
        }
    }
}
