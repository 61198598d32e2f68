use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::algebraic::AlgebraicReal;
use super::poly::IntPoly;
use crate::error::{Error, Result};

/// The real number field `Q(θ)` for a real algebraic `θ`.
#[derive(Debug)]
pub struct NumberField {
    generator: AlgebraicReal,
    /// Monic minimal polynomial over `Q`, low to high.
    modulus: Vec<BigRational>,
}

impl NumberField {
    pub fn new(theta: &AlgebraicReal) -> Arc<NumberField> {
        let mut generator = theta.clone();
        generator.minimize();
        let m = generator.poly();
        let lc = BigRational::from_integer(m.lc());
        let modulus = m
            .coeffs()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()) / &lc)
            .collect();
        Arc::new(NumberField { generator, modulus })
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn generator(&self) -> &AlgebraicReal {
        &self.generator
    }

    pub fn minimal_poly(&self) -> &IntPoly {
        self.generator.poly()
    }
}

/// An element `Σ c_i θ^i` of a [`NumberField`], reduced mod the minimal polynomial.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Polynomial long division over `Q`.
fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero");
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lb;
        for (j, y) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &c * y;
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

fn pmul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn psub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

impl FieldElement {
    pub fn from_rational(field: &Arc<NumberField>, r: BigRational) -> Self {
        FieldElement {
            field: field.clone(),
            coeffs: trim(vec![r]),
        }
    }

    pub fn from_integer(field: &Arc<NumberField>, n: &BigInt) -> Self {
        Self::from_rational(field, BigRational::from_integer(n.clone()))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        FieldElement {
            field: field.clone(),
            coeffs: vec![],
        }
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    /// The generator `θ`.
    pub fn theta(field: &Arc<NumberField>) -> Self {
        Self::from_coeffs(field, vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_coeffs(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Self {
        let (_, r) = divrem(&coeffs, &field.modulus);
        FieldElement {
            field: field.clone(),
            coeffs: r,
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Coefficients on `1, θ, θ², …`, trailing zeros dropped.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &FieldElement) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field.modulus == other.field.modulus,
            "elements of different number fields"
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.check(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        FieldElement {
            field: self.field.clone(),
            coeffs: trim(
                (0..n)
                    .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                    .collect(),
            ),
        }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.check(other);
        Self::from_coeffs(&self.field, pmul(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, r: &BigRational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: trim(self.coeffs.iter().map(|c| c * r).collect()),
        }
    }

    pub fn pow(&self, mut n: u64) -> FieldElement {
        let mut acc = Self::one(&self.field);
        let mut b = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            n >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::Precondition("inverse of zero".into()));
        }
        // s·a + t·m = gcd; track s only
        let (mut r0, mut r1) = (self.field.modulus.clone(), self.coeffs.clone());
        let (mut s0, mut s1): (Vec<BigRational>, Vec<BigRational>) = (vec![], vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = divrem(&r0, &r1);
            let s = psub(&s0, &pmul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r1 is a nonzero constant since the modulus is irreducible
        let c = r1[0].clone();
        Ok(Self::from_coeffs(&self.field, s1).scale(&(BigRational::one() / c)))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Interval enclosure of the value, using the generator's interval.
    fn enclose(&self, theta: &AlgebraicReal) -> (BigRational, BigRational) {
        let (tl, th) = theta.interval();
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            // [lo,hi]·[tl,th] + c
            let products = [&lo * tl, &lo * th, &hi * tl, &hi * th];
            let mn = products.iter().min().unwrap().clone();
            let mx = products.iter().max().unwrap().clone();
            lo = mn + c;
            hi = mx + c;
        }
        (lo, hi)
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let mut theta = self.field.generator.clone();
        loop {
            let (lo, hi) = self.enclose(&theta);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            theta.bisect();
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mut theta = self.field.generator.clone();
        loop {
            let (lo, hi) = self.enclose(&theta);
            let scale = lo.abs().max(hi.abs()).max(BigRational::one());
            if (&hi - &lo) * BigRational::from_integer(BigInt::one() << 55) <= scale || theta.is_rational() {
                return ((lo + hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN);
            }
            theta.bisect();
        }
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.check(other);
        self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum().cmp(&0)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}·")?;
                    }
                    write!(f, "θ")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
