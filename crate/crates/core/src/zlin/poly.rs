//! Dense univariate polynomials with integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `coeffs[i]` is the coefficient of `x^i`; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// `x - r`.
    pub fn linear_root(r: BigInt) -> Self {
        IntPoly::new(vec![-r, BigInt::one()])
    }

    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `p(x²)`.
    pub fn compose_square(&self) -> IntPoly {
        let mut out = vec![BigInt::zero(); 2 * self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[2 * i] = c.clone();
        }
        IntPoly::new(out)
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// Sign of `p(x)` for rational `x`, computed on the homogenized form.
    pub fn sign_at(&self, x: &BigRational) -> Sign {
        if self.is_zero() {
            return Sign::NoSign;
        }
        let num = x.numer();
        let den = x.denom();
        let n = self.degree();
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        // Σ c_i num^i den^(n-i), accumulated from the top coefficient down.
        let mut terms = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            terms.push(den_pow.clone());
            den_pow *= den;
        }
        let mut num_pow = BigInt::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c * &num_pow * &terms[n - i];
            num_pow *= num;
        }
        acc.sign()
    }

    /// Pseudo-remainder `lc(b)^δ a mod b`, sign-corrected so that it equals a
    /// positive multiple of the true remainder.
    pub fn signed_prem(&self, b: &IntPoly) -> IntPoly {
        assert!(!b.is_zero(), "division by zero polynomial");
        if self.coeffs.len() < b.coeffs.len() {
            return self.clone();
        }
        let mut r = self.coeffs.clone();
        let db = b.degree();
        let lb = b.lc();
        let lb_pos = lb.abs();
        let sb = if lb.is_negative() { -BigInt::one() } else { BigInt::one() };
        while r.len() > db && !r.is_empty() {
            let lr = r.last().cloned().unwrap_or_default();
            if lr.is_zero() {
                r.pop();
                continue;
            }
            let shift = r.len() - 1 - db;
            let g = lr.gcd(&lb_pos);
            let mul_r = &lb_pos / &g;
            let mul_b = &lr / &g * &sb;
            for c in r.iter_mut() {
                *c *= &mul_r;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[shift + i] -= &mul_b * bc;
            }
            r.pop();
            let p = IntPoly::new(r).primitive_keep_sign();
            r = p.coeffs;
        }
        IntPoly::new(r)
    }

    /// Divide by the (positive) content only.
    fn primitive_keep_sign(&self) -> IntPoly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact division over Z; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.coeffs.len() < d.coeffs.len() {
            return None;
        }
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let ld = d.lc();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (quo, rem) = top.div_rem(&ld);
            if !rem.is_zero() {
                return None;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &quo * dc;
            }
            q[k] = quo;
        }
        if r.iter().all(Zero::is_zero) {
            Some(IntPoly::new(q))
        } else {
            None
        }
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.signed_prem(&b).primitive();
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// Square-free part (primitive).
    pub fn square_free(&self) -> IntPoly {
        let p = self.primitive();
        if p.degree() == 0 {
            return p;
        }
        let g = p.gcd(&p.derivative());
        p.div_exact(&g).expect("gcd divides").primitive()
    }

    /// Yun's decomposition: returns `(s_1, s_2, …)` with
    /// `primitive(self) = Π s_j^j`, each `s_j` square-free and primitive.
    pub fn square_free_decomposition(&self) -> Vec<IntPoly> {
        let f = self.primitive();
        if f.degree() == 0 {
            return vec![];
        }
        let mut out = Vec::new();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0).expect("gcd divides").primitive();
        let mut c = fp.primitive_times_ratio(&a0);
        let mut d = c.sub(&b.derivative());
        loop {
            let a = b.gcd(&d);
            out.push(a.clone());
            b = b.div_exact(&a).expect("gcd divides").primitive();
            if b.degree() == 0 {
                break;
            }
            c = d.primitive_times_ratio(&a);
            d = c.sub(&b.derivative());
        }
        while out.last().is_some_and(|p| p.degree() == 0) {
            out.pop();
        }
        out
    }

    /// `self / d` where `d` divides `self` up to a rational scalar; the
    /// result is scaled to an integer polynomial with the same sign.
    fn primitive_times_ratio(&self, d: &IntPoly) -> IntPoly {
        // Scale self so the division is exact over Z.
        let lc = d.lc().abs();
        let mut scale = BigInt::one();
        for _ in 0..=self.degree() {
            if let Some(q) = self.scale(&scale).div_exact(d) {
                return q;
            }
            scale *= &lc;
        }
        panic!("divisor does not divide up to scalar");
    }

    /// Cauchy bound: every root has modulus below the returned integer.
    pub fn root_bound(&self) -> BigInt {
        let lc = self.lc().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        BigInt::one() + m.div_ceil(&lc) + BigInt::one()
    }

    /// Sturm sequence of a square-free polynomial.
    pub fn sturm_sequence(&self) -> Vec<IntPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            if seq[n - 1].degree() == 0 {
                break;
            }
            let r = seq[n - 2].signed_prem(&seq[n - 1]);
            let r = r.primitive_keep_sign();
            seq.push(-r);
        }
        seq
    }

    fn sign_at_pos_inf(&self) -> Sign {
        self.lc().sign()
    }

    fn sign_at_neg_inf(&self) -> Sign {
        let s = self.lc().sign();
        if self.degree() % 2 == 1 {
            -s
        } else {
            s
        }
    }

    /// Sign changes in a sequence, zeros skipped.
    fn variations(signs: impl Iterator<Item = Sign>) -> usize {
        let mut last = Sign::NoSign;
        let mut v = 0;
        for s in signs {
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// Number of distinct real roots of a square-free polynomial in
    /// `(lo, hi]`. `None` bounds stand for ∓∞.
    pub fn count_roots(
        seq: &[IntPoly],
        lo: Option<&BigRational>,
        hi: Option<&BigRational>,
    ) -> usize {
        let at = |x: Option<&BigRational>, neg: bool| -> usize {
            match x {
                Some(x) => Self::variations(seq.iter().map(|p| p.sign_at(x))),
                None if neg => Self::variations(seq.iter().map(|p| p.sign_at_neg_inf())),
                None => Self::variations(seq.iter().map(|p| p.sign_at_pos_inf())),
            }
        };
        at(lo, true).saturating_sub(at(hi, false))
    }

    /// Isolate the real roots of a square-free polynomial into disjoint
    /// intervals `(lo, hi)` with non-root endpoints, or exact points
    /// `lo == hi` for roots hit during bisection. Sorted ascending.
    pub fn isolate_real_roots(&self) -> Vec<(BigRational, BigRational)> {
        let p = self.square_free();
        if p.degree() == 0 {
            return vec![];
        }
        let seq = p.sturm_sequence();
        let b = BigRational::from_integer(p.root_bound());
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let n = Self::count_roots(&seq, Some(&lo), Some(&hi));
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / BigRational::from_integer(2.into());
            if p.sign_at(&mid) == Sign::NoSign {
                out.push((mid.clone(), mid.clone()));
                // split around the exact root with a small non-root gap
                let mut eps = (&hi - &lo) / BigRational::from_integer(8.into());
                loop {
                    let l = &mid - &eps;
                    let h = &mid + &eps;
                    if p.sign_at(&l) != Sign::NoSign
                        && p.sign_at(&h) != Sign::NoSign
                        && Self::count_roots(&seq, Some(&l), Some(&h)) == 1
                    {
                        stack.push((lo.clone(), l));
                        stack.push((h, hi.clone()));
                        break;
                    }
                    eps /= BigRational::from_integer(2.into());
                }
            } else {
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
        // Intervals from the Sturm count are half-open (lo, hi]; a root at hi
        // is made exact here.
        let mut fixed = Vec::with_capacity(out.len());
        for (lo, hi) in out {
            if lo != hi && p.sign_at(&hi) == Sign::NoSign {
                fixed.push((hi.clone(), hi));
            } else {
                fixed.push((lo, hi));
            }
        }
        fixed.sort_by(|a, b| a.0.cmp(&b.0));
        fixed
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl IntPoly {
    pub fn sub(&self, rhs: &IntPoly) -> IntPoly {
        self - rhs
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_and_display() {
        let a = p(&[-1, 1]);
        let b = p(&[1, 1]);
        assert_eq!(&a * &b, p(&[-1, 0, 1]));
        assert_eq!((&a * &b).to_string(), "x^2 - 1");
        assert_eq!(p(&[-1, 2, -3, 1]).to_string(), "x^3 - 3x^2 + 2x - 1");
        assert_eq!(p(&[6, 4]).primitive(), p(&[3, 2]));
        assert_eq!(p(&[-6, -4]).primitive(), p(&[3, 2]));
        assert_eq!(p(&[-1, 0, 1]).div_exact(&a), Some(b.clone()));
        assert_eq!(p(&[1, 0, 1]).div_exact(&a), None);
    }

    #[test]
    fn gcd_and_square_free() {
        let a = p(&[-1, 1]);
        let b = p(&[2, 1]);
        let c = p(&[1, 0, 1]);
        let f = &(&(&a * &a) * &b) * &c;
        assert_eq!(f.gcd(&(&a * &c)), &a * &c);
        assert_eq!(f.square_free(), &(&a * &b) * &c);
        let dec = f.square_free_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], &b * &c);
        assert_eq!(dec[1], a);
        let g = &(&p(&[0, 3]) * &p(&[0, 3])) * &p(&[1, 2]);
        let dec = g.square_free_decomposition();
        assert_eq!(dec, vec![p(&[1, 2]), p(&[0, 1])]);
    }

    #[test]
    fn sign_at_rational() {
        let f = p(&[-1, 2, -3, 1]);
        assert_eq!(f.sign_at(&q(232, 100)), Sign::Minus);
        assert_eq!(f.sign_at(&q(233, 100)), Sign::Plus);
        assert_eq!(p(&[-1, 2]).sign_at(&q(1, 2)), Sign::NoSign);
    }

    #[test]
    fn isolation() {
        // (x - 1)(x - 2)(x + 3)(x² - 2)
        let f = &(&(&p(&[-1, 1]) * &p(&[-2, 1])) * &p(&[3, 1])) * &p(&[-2, 0, 1]);
        let roots = f.isolate_real_roots();
        assert_eq!(roots.len(), 5);
        let approx: Vec<f64> = roots
            .iter()
            .map(|(l, h)| {
                let m = (l + h) / BigRational::from_integer(2.into());
                m.numer().to_string().parse::<f64>().unwrap() / m.denom().to_string().parse::<f64>().unwrap()
            })
            .collect();
        let expect = [-3.0, -std::f64::consts::SQRT_2, 1.0, std::f64::consts::SQRT_2, 2.0];
        for (a, e) in approx.iter().zip(expect) {
            assert!((a - e).abs() < 1.0, "{a} vs {e}");
        }
        assert!(p(&[1, 0, 1]).isolate_real_roots().is_empty());
    }
}
