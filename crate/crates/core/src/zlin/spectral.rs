use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::algebraic::AlgebraicReal;
use super::factor::factor;
use super::field::{FieldElement, NumberField};
use super::matrix::{IntMatrix, IntVector};
use super::poly::IntPoly;
use crate::error::{Error, Result};
use crate::rates::{classify_sequence, RateEstimate};

/// Local minimal polynomials above this degree switch to the empirical path.
pub const EXACT_DEGREE_LIMIT: usize = 12;

/// Horizon of the empirical fallback.
pub const EMPIRICAL_HORIZON: u64 = 200;

/// The growth class `[n^p λ^n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureRate {
    pub base: AlgebraicReal,
    pub degree: u32,
}

impl PureRate {
    pub fn new(base: AlgebraicReal, degree: u32) -> Self {
        PureRate { base, degree }
    }

    /// `[n^p]`.
    pub fn polynomial(degree: u32) -> Self {
        PureRate::new(AlgebraicReal::one(), degree)
    }

    pub fn constant() -> Self {
        Self::polynomial(0)
    }

    pub fn is_exponential(&self) -> bool {
        self.base > AlgebraicReal::one()
    }
}

impl Ord for PureRate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base
            .cmp(&other.base)
            .then(self.degree.cmp(&other.degree))
    }
}

impl PartialOrd for PureRate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PureRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exp = self.is_exponential();
        match (self.degree, exp) {
            (0, false) => write!(f, "[1]"),
            (p, false) => write!(f, "[n^{p}]"),
            (0, true) => write!(f, "[{:.6}^n]", self.base.to_f64()),
            (p, true) => write!(f, "[n^{p} {:.6}^n]", self.base.to_f64()),
        }
    }
}

/// Outcome of [`spectral_growth`].
#[derive(Debug, Clone)]
pub enum SpectralGrowth {
    /// Decided exactly from the local minimal polynomial.
    Exact(PureRate),
    /// Fitted from `‖Aⁿv‖₁`, `n ≤ EMPIRICAL_HORIZON`.
    Empirical(RateEstimate),
}

impl SpectralGrowth {
    pub fn exact(&self) -> Option<&PureRate> {
        match self {
            SpectralGrowth::Exact(r) => Some(r),
            SpectralGrowth::Empirical(_) => None,
        }
    }
}

/// Monic polynomial `m` of least degree with `m(A)v = 0`.
pub fn local_minimal_poly(a: &IntMatrix, v: &IntVector) -> Result<IntPoly> {
    if !a.is_square() || a.cols() != v.len() {
        return Err(Error::DimensionMismatch("matrix and vector shapes differ".into()));
    }
    let k = v.len();
    // echelon rows: (pivot, reduced vector, combination of Krylov vectors)
    let mut basis: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new();
    let mut w = v.clone();
    for step in 0..=k {
        let mut vec: Vec<BigRational> = w.0.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let mut comb = vec![BigRational::zero(); step + 1];
        comb[step] = BigRational::one();
        for (pivot, row, rc) in &basis {
            if vec[*pivot].is_zero() {
                continue;
            }
            let c = &vec[*pivot] / &row[*pivot];
            for (x, y) in vec.iter_mut().zip(row) {
                *x -= &c * y;
            }
            for (x, y) in comb.iter_mut().zip(rc) {
                *x -= &c * y;
            }
        }
        match vec.iter().position(|x| !x.is_zero()) {
            Some(pivot) => basis.push((pivot, vec, comb)),
            None => {
                let coeffs = comb
                    .into_iter()
                    .map(|c| {
                        assert!(c.is_integer(), "local minimal polynomial of an integer matrix is integral");
                        c.to_integer()
                    })
                    .collect();
                return Ok(IntPoly::new(coeffs));
            }
        }
        w = a.apply(&w)?;
    }
    unreachable!("k+1 vectors in dimension k are dependent")
}

/// Newton power sums `p_1..=p_n` of the roots of a monic polynomial.
fn power_sums(f: &IntPoly, n: usize) -> Vec<BigInt> {
    let d = f.degree();
    // e_i = (-1)^i a_{d-i}
    let e = |i: usize| -> BigInt {
        if i > d {
            return BigInt::zero();
        }
        let c = f.coeff(d - i);
        if i % 2 == 1 {
            -c
        } else {
            c
        }
    };
    let mut p = vec![BigInt::zero(); n + 1];
    for k in 1..=n {
        let mut s = BigInt::zero();
        for i in 1..k {
            let t = e(i) * &p[k - i];
            if i % 2 == 1 {
                s += t;
            } else {
                s -= t;
            }
        }
        let t = e(k) * BigInt::from(k);
        if k % 2 == 1 {
            s += t;
        } else {
            s -= t;
        }
        p[k] = s;
    }
    p
}

/// Monic polynomial with the given power sums `p_1..=p_n` of its `n` roots.
fn from_power_sums(p: &[BigInt], n: usize) -> IntPoly {
    let mut e = vec![BigInt::zero(); n + 1];
    e[0] = BigInt::one();
    for k in 1..=n {
        let mut s = BigInt::zero();
        for i in 1..=k {
            let t = &e[k - i] * &p[i];
            if i % 2 == 1 {
                s += t;
            } else {
                s -= t;
            }
        }
        let (q, r) = s.div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero());
        e[k] = q;
    }
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for (k, ek) in e.into_iter().enumerate() {
        coeffs[n - k] = if k % 2 == 1 { -ek } else { ek };
    }
    IntPoly::new(coeffs)
}

/// For monic `f` with roots `α_i`, the monic polynomial with roots
/// `α_i α_j` (`i ≤ j`). Its largest real root is `max |α_i|²`.
pub fn symmetric_square(f: &IntPoly) -> IntPoly {
    assert!(f.is_monic(), "symmetric square needs a monic polynomial");
    let d = f.degree();
    let n = d * (d + 1) / 2;
    let p = power_sums(f, 2 * n);
    let mut q = vec![BigInt::zero(); n + 1];
    for k in 1..=n {
        let s = &p[k] * &p[k] + &p[2 * k];
        q[k] = s / 2;
    }
    from_power_sums(&q, n)
}

/// Largest modulus among the roots of a monic polynomial.
pub fn max_root_modulus(f: &IntPoly) -> AlgebraicReal {
    let s = symmetric_square(f);
    let m2 = AlgebraicReal::largest_root_of(&s).expect("λ·λ̄ is a real root");
    m2.sqrt().expect("squared modulus is non-negative")
}

/// Growth of `n ↦ ‖Aⁿv‖₁` for unimodular `A`.
///
/// The exponent is one less than the multiplicity, in the local minimal
/// polynomial of `v`, of the roots of largest modulus.
pub fn spectral_growth(a: &IntMatrix, v: &IntVector) -> Result<SpectralGrowth> {
    if v.is_zero() {
        return Err(Error::Precondition("spectral growth of the zero vector".into()));
    }
    if !a.is_unimodular() {
        return Err(Error::Precondition("matrix is not invertible over the integers".into()));
    }
    let m = local_minimal_poly(a, v)?;
    if m.degree() > EXACT_DEGREE_LIMIT {
        let mut w = v.clone();
        let mut samples = Vec::with_capacity(EMPIRICAL_HORIZON as usize + 1);
        for n in 0..=EMPIRICAL_HORIZON {
            samples.push((n, w.l1().magnitude().clone()));
            w = a.apply(&w)?;
        }
        return Ok(SpectralGrowth::Empirical(classify_sequence(&samples)?));
    }
    Ok(SpectralGrowth::Exact(recurrence_rate(&m)?))
}

/// Growth class of a sequence whose minimal recurrence has characteristic
/// polynomial `m` (every root occurs with a nonzero coefficient): the top
/// root modulus, with `p` one less than the largest multiplicity attaining
/// it. Roots at zero only contribute transients and are ignored.
pub fn recurrence_rate(m: &IntPoly) -> Result<PureRate> {
    let mut best: Option<(AlgebraicReal, u32)> = None;
    for (j, part) in m.square_free_decomposition().iter().enumerate() {
        let mut part = part.clone();
        while part.degree() > 0 && part.coeff(0).is_zero() {
            part = part.div_exact(&IntPoly::x()).expect("x divides");
        }
        if part.degree() == 0 {
            continue;
        }
        let s = symmetric_square(&part);
        let r = AlgebraicReal::largest_root_of(&s).expect("λ·λ̄ is a real root");
        best = match best {
            None => Some((r, j as u32)),
            Some((b, p)) => match r.cmp(&b) {
                Ordering::Greater => Some((r, j as u32)),
                Ordering::Equal => Some((b, p.max(j as u32))),
                Ordering::Less => Some((b, p)),
            },
        };
    }
    let (m2, p) = best.ok_or_else(|| Error::Precondition("recurrence has only zero roots".into()))?;
    let mut base = m2.sqrt()?;
    if base.poly().degree() <= 16 {
        base.minimize();
    }
    Ok(PureRate::new(base, p))
}
/// Perron–Frobenius data of a primitive non-negative matrix.
#[derive(Debug, Clone)]
pub struct PfData {
    pub lambda: AlgebraicReal,
    pub field: Arc<NumberField>,
    /// Left eigenvector `u·M = λu`, normalised to `u_0 = 1`.
    pub left: Vec<FieldElement>,
}

pub fn pf_data(m: &IntMatrix) -> Result<PfData> {
    if !m.is_square() || !m.is_nonnegative() || !m.is_primitive() {
        return Err(Error::Precondition(
            "Perron-Frobenius data needs a primitive non-negative square matrix".into(),
        ));
    }
    let cp = m.char_poly()?;
    let mut factors = factor(&cp);
    factors.dedup();
    let lambda = factors
        .iter()
        .filter_map(AlgebraicReal::largest_root_of)
        .max()
        .expect("a primitive matrix has a positive eigenvalue");
    let field = NumberField::new(&lambda);
    let lambda = field.generator().clone();
    let left = left_kernel_vector(m, &field)?;
    Ok(PfData { lambda, field, left })
}

/// Solve `u (M − θI) = 0` in `Q(θ)` with `u_0 = 1`.
fn left_kernel_vector(m: &IntMatrix, field: &Arc<NumberField>) -> Result<Vec<FieldElement>> {
    let k = m.rows();
    let theta = FieldElement::theta(field);
    // rows of (Mᵀ − θI)
    let mut rows: Vec<Vec<FieldElement>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let x = FieldElement::from_integer(field, m.get(j, i));
                    if i == j {
                        x.sub(&theta)
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..k).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inverse()?;
        rows[r] = rows[r].iter().map(|x| x.mul(&inv)).collect();
        for i in 0..k {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return Err(Error::Precondition(format!(
            "eigenspace has dimension {}, expected 1",
            free.len()
        )));
    }
    let f = free[0];
    let mut u = vec![FieldElement::zero(field); k];
    u[f] = FieldElement::one(field);
    for (row, &c) in pivots.iter().enumerate() {
        u[c] = rows[row][f].neg();
    }
    let scale = u[0].inverse()?;
    let u: Vec<FieldElement> = u.iter().map(|x| x.mul(&scale)).collect();
    // exact check of u·M = θu
    for j in 0..k {
        let mut lhs = FieldElement::zero(field);
        for (i, ui) in u.iter().enumerate() {
            lhs = lhs.add(&ui.mul(&FieldElement::from_integer(field, m.get(i, j))));
        }
        if lhs != u[j].mul(&theta) {
            return Err(Error::Precondition("eigen-equation failed".into()));
        }
    }
    Ok(u)
}

/// `⟨u, x⟩` in `Q(θ)`.
pub fn pair(u: &[FieldElement], x: &IntVector) -> FieldElement {
    let field = u[0].field();
    u.iter()
        .zip(&x.0)
        .filter(|(_, c)| !c.is_zero())
        .fold(FieldElement::zero(field), |acc, (ui, c)| {
            acc.add(&ui.scale(&BigRational::from_integer(c.clone())))
        })
}

/// Sign pattern of a left eigenvector: true if every entry is positive.
pub fn is_positive_vector(u: &[FieldElement]) -> bool {
    u.iter().all(|x| x.signum() > 0)
}
