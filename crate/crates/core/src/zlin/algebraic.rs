use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::factor::factor_square_free;
use super::poly::IntPoly;
use crate::error::{Error, Result};

/// A real algebraic number: a root of a square-free primitive integer
/// polynomial, pinned down by an isolating interval.
///
/// Either `lo == hi` and the value is that rational exactly, or `lo < hi`,
/// neither endpoint is a root, and the open interval holds exactly one root.
#[derive(Debug, Clone)]
pub struct AlgebraicReal {
    poly: IntPoly,
    lo: BigRational,
    hi: BigRational,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

impl AlgebraicReal {
    pub fn from_rational(r: BigRational) -> Self {
        let poly = IntPoly::new(vec![-r.numer().clone(), r.denom().clone()]).primitive();
        AlgebraicReal {
            poly,
            lo: r.clone(),
            hi: r,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// Build from a polynomial and an interval claimed to isolate one root.
    pub fn new(poly: &IntPoly, lo: BigRational, hi: BigRational) -> Result<Self> {
        let poly = poly.square_free();
        if poly.degree() == 0 {
            return Err(Error::Precondition("constant polynomial has no roots".into()));
        }
        if lo > hi {
            return Err(Error::Precondition("empty isolating interval".into()));
        }
        if lo == hi {
            if poly.sign_at(&lo) != Sign::NoSign {
                return Err(Error::Precondition(format!("{lo} is not a root of {poly}")));
            }
            return Ok(Self::from_rational(lo));
        }
        if poly.sign_at(&lo) == Sign::NoSign || poly.sign_at(&hi) == Sign::NoSign {
            return Err(Error::Precondition("interval endpoint is a root".into()));
        }
        let seq = poly.sturm_sequence();
        if IntPoly::count_roots(&seq, Some(&lo), Some(&hi)) != 1 {
            return Err(Error::Precondition("interval does not isolate exactly one root".into()));
        }
        Ok(AlgebraicReal { poly, lo, hi })
    }

    /// All real roots of `f`, ascending, without multiplicity.
    pub fn roots_of(f: &IntPoly) -> Vec<AlgebraicReal> {
        if f.is_zero() {
            return vec![];
        }
        let p = f.square_free();
        if p.degree() == 1 {
            let r = BigRational::new(-p.coeff(0), p.coeff(1));
            return vec![Self::from_rational(r)];
        }
        p.isolate_real_roots()
            .into_iter()
            .map(|(lo, hi)| {
                if lo == hi {
                    Self::from_rational(lo)
                } else {
                    AlgebraicReal { poly: p.clone(), lo, hi }
                }
            })
            .collect()
    }

    pub fn largest_root_of(f: &IntPoly) -> Option<AlgebraicReal> {
        Self::roots_of(f).pop()
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn is_rational(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.lo)
    }

    /// Halve the isolating interval.
    pub fn bisect(&mut self) {
        if self.is_rational() {
            return;
        }
        let mid = (&self.lo + &self.hi) * half();
        let s_mid = self.poly.sign_at(&mid);
        if s_mid == Sign::NoSign {
            *self = Self::from_rational(mid);
        } else if s_mid == self.poly.sign_at(&self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Refine until the interval is narrower than `width`.
    pub fn refine_to(&mut self, width: &BigRational) {
        while !self.is_rational() && &(&self.hi - &self.lo) >= width {
            self.bisect();
        }
    }

    /// Replace the defining polynomial by the irreducible factor vanishing here.
    pub fn minimize(&mut self) {
        if self.is_rational() || self.poly.degree() == 1 {
            return;
        }
        for g in factor_square_free(&self.poly) {
            let seq = g.sturm_sequence();
            if g.sign_at(&self.lo) != Sign::NoSign
                && IntPoly::count_roots(&seq, Some(&self.lo), Some(&self.hi)) == 1
            {
                self.poly = g;
                return;
            }
        }
        unreachable!("some irreducible factor vanishes at an isolated root");
    }

    /// Minimal polynomial, primitive with positive leading coefficient.
    pub fn minimal_poly(&self) -> IntPoly {
        let mut m = self.clone();
        m.minimize();
        m.poly
    }

    pub fn to_f64(&self) -> f64 {
        let mut m = self.clone();
        let scale = m.hi.abs().max(m.lo.abs()).max(BigRational::one());
        let width = scale * BigRational::new(BigInt::one(), BigInt::one() << 60);
        m.refine_to(&width);
        let mid = (&m.lo + &m.hi) * half();
        mid.to_f64().unwrap_or(f64::NAN)
    }

    pub fn signum(&self) -> i32 {
        match self.cmp(&Self::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// Non-negative square root.
    pub fn sqrt(&self) -> Result<AlgebraicReal> {
        match self.signum() {
            -1 => return Err(Error::Precondition("square root of a negative number".into())),
            0 => return Ok(Self::zero()),
            _ => {}
        }
        if let Some(r) = self.as_rational() {
            let (n, d) = (r.numer(), r.denom());
            let (sn, sd) = (n.sqrt(), d.sqrt());
            if &(&sn * &sn) == n && &(&sd * &sd) == d {
                return Ok(Self::from_rational(BigRational::new(sn, sd)));
            }
        }
        // strip a factor x so that P(x²) stays square-free
        let mut p = self.poly.clone();
        while p.coeff(0).is_zero() {
            p = IntPoly::new(p.coeffs()[1..].to_vec());
        }
        let zero = Self::zero();
        let positive: Vec<_> = Self::roots_of(&p).into_iter().filter(|r| r > &zero).collect();
        let k = positive
            .iter()
            .position(|r| r == self)
            .expect("value is a positive root of its polynomial");
        let roots: Vec<_> = Self::roots_of(&p.compose_square())
            .into_iter()
            .filter(|r| r > &zero)
            .collect();
        Ok(roots[k].clone())
    }

    fn same_value(a: &AlgebraicReal, b: &AlgebraicReal) -> Option<Ordering> {
        match (a.as_rational(), b.as_rational()) {
            (Some(x), Some(y)) => return Some(x.cmp(y)),
            (Some(x), None) => return Self::rational_vs(x, b),
            (None, Some(y)) => return Self::rational_vs(y, a).map(Ordering::reverse),
            (None, None) => {}
        }
        // open intervals
        if a.hi <= b.lo {
            return Some(Ordering::Less);
        }
        if b.hi <= a.lo {
            return Some(Ordering::Greater);
        }
        // Overlap: equal iff the common factor has a root in it. Endpoints of
        // either interval are non-roots of the gcd.
        let lo = (&a.lo).max(&b.lo);
        let hi = (&a.hi).min(&b.hi);
        let g = a.poly.gcd(&b.poly);
        if g.degree() > 0 {
            let seq = g.sturm_sequence();
            if IntPoly::count_roots(&seq, Some(lo), Some(hi)) > 0 {
                return Some(Ordering::Equal);
            }
        }
        None
    }

    /// Compare rational `r` with an irrational-interval number `b`.
    fn rational_vs(r: &BigRational, b: &AlgebraicReal) -> Option<Ordering> {
        if r <= &b.lo {
            return Some(Ordering::Less);
        }
        if r >= &b.hi {
            return Some(Ordering::Greater);
        }
        if b.poly.sign_at(r) == Sign::NoSign {
            return Some(Ordering::Equal);
        }
        None
    }
}

impl PartialEq for AlgebraicReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AlgebraicReal {}

impl PartialOrd for AlgebraicReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicReal {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.clone();
        let mut b = other.clone();
        loop {
            if let Some(o) = AlgebraicReal::same_value(&a, &b) {
                return o;
            }
            a.bisect();
            b.bisect();
        }
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{:.10} (root of {})", self.to_f64(), self.minimal_poly()),
        }
    }
}
