//! Growth-rate algebra: comparison and sums of pure rates, empirical
//! classification of measured sequences, tameness diagnostics, and the
//! composition predictors for products, graphs of groups and free products.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::zlin::{recurrence_rate, AlgebraicReal, IntPoly, PureRate, EXACT_DEGREE_LIMIT};

/// Minimum number of samples accepted by [`classify_sequence`].
pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Constant,
    Polynomial,
    PureExponential,
    TameExponential,
    Unclassified,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Constant => "constant",
            Verdict::Polynomial => "polynomial",
            Verdict::PureExponential => "pure-exponential",
            Verdict::TameExponential => "tame-exponential",
            Verdict::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How an estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitMethod {
    /// An exact integer linear recurrence of this order was found and
    /// verified on [`RECURRENCE_MARGIN`] further samples; the rate is read
    /// off its characteristic polynomial.
    Recurrence { order: usize },
    /// Least-squares fit on log scale.
    Regression,
}

/// Samples beyond `2·order` that a recurrence must also satisfy.
pub const RECURRENCE_MARGIN: usize = 4;

/// Fitted growth of a measured sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub lambda_hat: f64,
    pub p_hat: f64,
    /// Inclusive range of `n` used by the fit.
    pub window: (u64, u64),
    /// Root-mean-square residual of the fit, on log scale.
    pub residual: f64,
    pub verdict: Verdict,
    pub method: FitMethod,
}

/// Classification thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Fitted bases below this are snapped to 1.
    pub base_one: f64,
    /// Fitted degrees with smaller modulus count as 0; also the allowed
    /// distance from an integer for a pure verdict.
    pub degree_tol: f64,
    /// Log-scale RMS residual above which nothing is claimed.
    pub max_residual: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            base_one: 1.02,
            degree_tol: 0.25,
            max_residual: 0.15,
        }
    }
}

/// Natural log of a big unsigned integer; 0 is clamped to 1.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::MAX).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::MAX).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Least squares `y ≈ X β` through the normal equations (columns are centred
/// first except the intercept). Returns β and the RMS residual.
fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let m = y.len();
    let k = columns.len();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / m as f64;
    let ym = mean(y);
    let means: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let xc: Vec<Vec<f64>> = columns
        .iter()
        .zip(&means)
        .map(|(c, mu)| c.iter().map(|x| x - mu).collect())
        .collect();
    let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
    // normal equations
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = xc[i].iter().zip(&xc[j]).map(|(p, q)| p * q).sum();
        }
        a[i][k] = xc[i].iter().zip(&yc).map(|(p, q)| p * q).sum();
    }
    // Gaussian elimination with partial pivoting
    for c in 0..k {
        let p = (c..k)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap_or(Ordering::Equal))
            .unwrap();
        a.swap(c, p);
        if a[c][c].abs() < 1e-300 {
            continue;
        }
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for j in c..=k {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..k)
        .map(|i| if a[i][i].abs() < 1e-300 { 0.0 } else { a[i][k] / a[i][i] })
        .collect();
    let rss: f64 = (0..m)
        .map(|r| {
            let fit: f64 = (0..k).map(|i| beta[i] * xc[i][r]).sum();
            (yc[r] - fit).powi(2)
        })
        .sum();
    (beta, (rss / m as f64).sqrt())
}

/// Classify with the default thresholds.
pub fn classify_sequence(samples: &[(u64, BigUint)]) -> Result<RateEstimate> {
    classify_sequence_with(samples, &Thresholds::default())
}

/// Connection polynomial `1 + c₁x + … + c_L x^L` of the shortest linear
/// recurrence `sₙ + c₁sₙ₋₁ + … + c_L sₙ₋_L = 0` generating `s`
/// (Berlekamp–Massey over Q). Gives up once `L` exceeds `max_order`.
pub fn berlekamp_massey(s: &[BigInt], max_order: usize) -> Option<Vec<BigRational>> {
    let s: Vec<BigRational> = s.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = BigRational::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=l {
            d += &c[i] * &s[n - i];
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let coef = &d / &last;
        let mut next = c.clone();
        if next.len() < b.len() + shift {
            next.resize(b.len() + shift, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            next[i + shift] -= &coef * bi;
        }
        if 2 * l <= n {
            b = std::mem::replace(&mut c, next);
            l = n + 1 - l;
            last = d;
            shift = 1;
            if l > max_order {
                return None;
            }
        } else {
            c = next;
            shift += 1;
        }
    }
    c.resize(l + 1, BigRational::zero());
    Some(c)
}

/// Exact classification of a sequence at consecutive `n` that satisfies a
/// short integer linear recurrence, certified on [`RECURRENCE_MARGIN`]
/// samples beyond those that determine it.
fn classify_recurrence(samples: &[(u64, BigUint)], t: &Thresholds) -> Option<RateEstimate> {
    if samples.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return None;
    }
    let s: Vec<BigInt> = samples.iter().map(|(_, v)| BigInt::from(v.clone())).collect();
    let c = berlekamp_massey(&s, EXACT_DEGREE_LIMIT)?;
    let order = c.len() - 1;
    if s.len() < 2 * order + RECURRENCE_MARGIN {
        return None;
    }
    let window = (samples[0].0, samples[samples.len() - 1].0);
    if order == 0 {
        // identically zero
        return Some(RateEstimate {
            lambda_hat: 1.0,
            p_hat: 0.0,
            window,
            residual: 0.0,
            verdict: Verdict::Constant,
            method: FitMethod::Recurrence { order },
        });
    }
    // characteristic polynomial x^L + c₁x^{L−1} + … + c_L, cleared of denominators
    let den = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let coeffs: Vec<BigInt> = c.iter().rev().map(|x| (x * &den).to_integer()).collect();
    let rate = recurrence_rate(&IntPoly::new(coeffs)).ok()?;
    let lambda = rate.base.to_f64();
    if lambda < 1.0 - 1e-12 {
        return None;
    }
    let exponential = lambda >= t.base_one;
    let verdict = match (exponential, rate.degree) {
        (false, 0) => Verdict::Constant,
        (false, _) => Verdict::Polynomial,
        (true, _) => Verdict::PureExponential,
    };
    Some(RateEstimate {
        lambda_hat: if exponential { lambda } else { 1.0 },
        p_hat: rate.degree as f64,
        window,
        residual: 0.0,
        verdict,
        method: FitMethod::Recurrence { order },
    })
}

/// Classify a measured sequence.
///
/// Sequences at consecutive `n` that obey a short integer linear recurrence
/// (lengths under positive maps, abelian orbits, polynomial towers) are
/// classified exactly from the recurrence. Otherwise fit
/// `log y = c + n·log λ + p·log n` over the upper half of the samples (the
/// whole range when that fit is poor); if `λ̂` falls below `base_one` the base
/// is fixed at 1 and `p` refitted.
pub fn classify_sequence_with(samples: &[(u64, BigUint)], t: &Thresholds) -> Result<RateEstimate> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Malformed("sample indices must be strictly increasing".into()));
    }
    if let Some(r) = classify_recurrence(samples, t) {
        return Ok(r);
    }
    classify_regression(samples, t)
}

/// Residual of the upper-half fit above which the whole window is used.
const OSCILLATION_RESIDUAL: f64 = 0.05;

struct WindowFit {
    lambda_hat: f64,
    p_hat: f64,
    residual: f64,
    window: (u64, u64),
}

fn fit_window(samples: &[(u64, BigUint)], t: &Thresholds) -> WindowFit {
    let window = (samples[0].0, samples[samples.len() - 1].0);
    let ns: Vec<f64> = samples.iter().map(|(n, _)| *n as f64).collect();
    let logn: Vec<f64> = ns.iter().map(|&n| n.max(1.0).ln()).collect();
    let y: Vec<f64> = samples.iter().map(|(_, v)| ln_big(v)).collect();

    let (beta, residual) = least_squares(&[ns, logn.clone()], &y);
    let lambda_hat = beta[0].exp();
    if lambda_hat < t.base_one {
        let (b, r) = least_squares(&[logn], &y);
        return WindowFit {
            lambda_hat: 1.0,
            p_hat: b[0],
            residual: r,
            window,
        };
    }
    WindowFit {
        lambda_hat,
        p_hat: beta[1],
        residual,
        window,
    }
}

/// The least-squares path of [`classify_sequence_with`] alone.
pub fn classify_regression(samples: &[(u64, BigUint)], t: &Thresholds) -> Result<RateEstimate> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Malformed("sample indices must be strictly increasing".into()));
    }
    let upper = &samples[samples.len() / 2..];
    let mut fit = fit_window(upper, t);
    // Complex dominant roots make log y oscillate; over the upper half alone
    // n and log n are nearly collinear and p̂ absorbs the wobble. A poor fit
    // there is refitted over every sample with n ≥ 1.
    if fit.residual > OSCILLATION_RESIDUAL {
        let start = samples.iter().position(|(n, _)| *n >= 1).unwrap_or(0);
        let full = &samples[start..];
        if full.len() > upper.len() && full.len() >= MIN_SAMPLES {
            fit = fit_window(full, t);
        }
    }
    let WindowFit {
        lambda_hat,
        p_hat,
        residual,
        window,
    } = fit;
    let verdict = if residual > t.max_residual {
        Verdict::Unclassified
    } else if lambda_hat == 1.0 {
        if p_hat.abs() < t.degree_tol {
            Verdict::Constant
        } else {
            Verdict::Polynomial
        }
    } else if (p_hat - p_hat.round()).abs() < t.degree_tol && p_hat.round() >= 0.0 {
        Verdict::PureExponential
    } else {
        Verdict::TameExponential
    };
    Ok(RateEstimate {
        lambda_hat,
        p_hat,
        window,
        residual,
        verdict,
        method: FitMethod::Regression,
    })
}

/// Total order on pure rates: base first, then degree.
pub fn cmp_pure(a: &PureRate, b: &PureRate) -> Ordering {
    a.cmp(b)
}

/// `[a_n] + [b_n] + …` for pure rates is their maximum.
pub fn sum_rates(rs: &[PureRate]) -> Result<PureRate> {
    rs.iter()
        .max()
        .cloned()
        .ok_or_else(|| Error::Empty("sum of no growth rates".into()))
}

/// Growth of an element under a factor-preserving automorphism of
/// `G₁ × … × G_k × A`.
pub fn predict_product_rate(factor_rates: &[PureRate], abelian_rate: &PureRate) -> PureRate {
    factor_rates
        .iter()
        .chain(std::iter::once(abelian_rate))
        .max()
        .cloned()
        .expect("abelian rate is always present")
}

/// `(λ, p)`: a weakly increasing, polynomially bounded multiple of `λⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TameBound {
    base: AlgebraicReal,
    degree: u32,
}

impl TameBound {
    pub fn new(base: AlgebraicReal, degree: u32) -> Result<Self> {
        if base <= AlgebraicReal::one() {
            return Err(Error::Precondition("tame base must exceed 1".into()));
        }
        Ok(TameBound { base, degree })
    }

    pub fn base(&self) -> &AlgebraicReal {
        &self.base
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

/// Outcome of [`check_tame`].
#[derive(Debug, Clone, PartialEq)]
pub struct TameDiagnostics {
    /// `a_n = value / λⁿ`.
    pub normalized: Vec<f64>,
    /// `max_n (1 − a_n / max_{m≤n} a_m)`, zero for weakly increasing input.
    pub monotone_violation: f64,
    /// Growth of `max_{m≤n} a_m / n^p` between the halves of the window.
    pub polynomial_ratio: f64,
    pub monotone: bool,
    pub bounded: bool,
}

impl TameDiagnostics {
    pub fn pass(&self) -> bool {
        self.monotone && self.bounded
    }
}

/// Largest drop below the running maximum that still counts as weakly
/// increasing (up to a bounded multiplicative constant).
pub const MONOTONE_TOLERANCE: f64 = 0.5;
/// Largest allowed growth of `a_n / n^p` from the lower to the upper half.
pub const POLYNOMIAL_TOLERANCE: f64 = 2.0;

pub fn check_tame(samples: &[(u64, BigUint)], bound: &TameBound) -> Result<TameDiagnostics> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let ln_lambda = bound.base.to_f64().ln();
    let log_a: Vec<f64> = samples
        .iter()
        .map(|(n, v)| ln_big(v) - *n as f64 * ln_lambda)
        .collect();
    let mut running = f64::NEG_INFINITY;
    let mut violation: f64 = 0.0;
    let mut log_r = Vec::with_capacity(samples.len());
    for ((n, _), &la) in samples.iter().zip(&log_a) {
        running = running.max(la);
        violation = violation.max(1.0 - (la - running).exp());
        log_r.push(running - bound.degree as f64 * (*n as f64).max(1.0).ln());
    }
    let half = samples.len() / 2;
    let sup = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let polynomial_ratio = (sup(&log_r[half..]) - sup(&log_r[..half])).exp();
    Ok(TameDiagnostics {
        normalized: log_a.iter().map(|x| x.exp()).collect(),
        monotone_violation: violation,
        polynomial_ratio,
        monotone: violation <= MONOTONE_TOLERANCE,
        bounded: polynomial_ratio <= POLYNOMIAL_TOLERANCE,
    })
}

/// Vertex hypotheses for graph-of-groups predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexSpec {
    /// Every element grows at most like `n^q`.
    TypeA { q: u32 },
    /// The restriction is `(λ, p)`-docile, `λ > 1`.
    TypeB { lambda: AlgebraicReal, p: u32 },
}

impl VertexSpec {
    pub fn type_b(lambda: AlgebraicReal, p: u32) -> Result<Self> {
        if lambda <= AlgebraicReal::one() {
            return Err(Error::Precondition("type-b vertices need λ > 1".into()));
        }
        Ok(VertexSpec::TypeB { lambda, p })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GogPrediction {
    /// Top growth at most `n^exponent`.
    SubPolynomial { exponent: u32 },
    /// `(μ, p)`-docile; the top conjugacy rate is the sum over `dominating`.
    Docile {
        mu: AlgebraicReal,
        p: u32,
        dominating: Vec<usize>,
    },
}

impl GogPrediction {
    /// Comparable key: sub-polynomial sorts below any docile prediction.
    pub fn key(&self) -> (AlgebraicReal, u32) {
        match self {
            GogPrediction::SubPolynomial { exponent } => (AlgebraicReal::one(), *exponent),
            GogPrediction::Docile { mu, p, .. } => (mu.clone(), *p),
        }
    }
}

pub fn predict_gog_rate(vertices: &[VertexSpec]) -> Result<GogPrediction> {
    if vertices.is_empty() {
        return Err(Error::Empty("graph of groups without vertices".into()));
    }
    let mu = vertices
        .iter()
        .filter_map(|v| match v {
            VertexSpec::TypeB { lambda, .. } => Some(lambda),
            VertexSpec::TypeA { .. } => None,
        })
        .max()
        .cloned();
    match mu {
        None => {
            let q = vertices
                .iter()
                .map(|v| match v {
                    VertexSpec::TypeA { q } => *q,
                    VertexSpec::TypeB { .. } => 0,
                })
                .max()
                .unwrap_or(0);
            Ok(GogPrediction::SubPolynomial { exponent: q + 2 })
        }
        Some(mu) => {
            let mut p = 0;
            let mut dominating = Vec::new();
            for (i, v) in vertices.iter().enumerate() {
                if let VertexSpec::TypeB { lambda, p: pi } = v {
                    if lambda == &mu {
                        p = p.max(*pi);
                        dominating.push(i);
                    }
                }
            }
            Ok(GogPrediction::Docile { mu, p, dominating })
        }
    }
}

/// Growth hypothesis on a free factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorRate {
    SubPolynomial,
    Docile { lambda: AlgebraicReal, p: u32 },
}

impl FactorRate {
    fn lambda(&self) -> AlgebraicReal {
        match self {
            FactorRate::SubPolynomial => AlgebraicReal::one(),
            FactorRate::Docile { lambda, .. } => lambda.clone(),
        }
    }
}

/// Rates permitted for conjugacy classes not carried by a factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleRates {
    pub pf_lambda: AlgebraicReal,
    pub nus: Vec<AlgebraicReal>,
    pub max_degree: u32,
}

impl AdmissibleRates {
    /// Sub-polynomial, `[λⁿ]`, or `[n^a νⁿ]` with `ν ∈ Λ`, `a ≤ P + 1`.
    pub fn admits(&self, r: &PureRate) -> bool {
        if !r.is_exponential() {
            return true;
        }
        if r.degree == 0 && r.base == self.pf_lambda {
            return true;
        }
        r.degree <= self.max_degree && self.nus.iter().any(|nu| nu == &r.base)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeProductPrediction {
    pub mu: AlgebraicReal,
    /// Upper bound on the tame degree; exact when `exact` is set.
    pub q: u32,
    pub exact: bool,
    pub admissible: Option<AdmissibleRates>,
}

/// Docility parameters of a fully irreducible outer automorphism of a free
/// product, given the factor hypotheses and the stretch factor `pf_lambda`.
///
/// With `λ_*` the largest factor base and `p` the largest degree attaining
/// it: `λ_* > λ` gives `q ≤ p`, `λ_* = λ` gives `q ≤ p + 1`, and `λ_* < λ`
/// gives `q = 0`.
pub fn predict_free_product_rate(
    factors: &[FactorRate],
    pf_lambda: &AlgebraicReal,
    part3: Option<(&[AlgebraicReal], u32)>,
) -> Result<FreeProductPrediction> {
    if pf_lambda <= &AlgebraicReal::one() {
        return Err(Error::Precondition("stretch factor must exceed 1".into()));
    }
    let lambda_star = factors.iter().map(FactorRate::lambda).max();
    let p_star = |l: &AlgebraicReal| {
        factors
            .iter()
            .filter_map(|f| match f {
                FactorRate::Docile { lambda, p } if lambda == l => Some(*p),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    };
    let (mu, q, exact) = match lambda_star {
        Some(ls) if ls > AlgebraicReal::one() => match ls.cmp(pf_lambda) {
            Ordering::Greater => {
                let p = p_star(&ls);
                (ls, p, false)
            }
            Ordering::Equal => {
                let p = p_star(&ls);
                (ls, p + 1, false)
            }
            Ordering::Less => (pf_lambda.clone(), 0, true),
        },
        _ => (pf_lambda.clone(), 0, true),
    };
    let admissible = part3.map(|(nus, big_p)| AdmissibleRates {
        pf_lambda: pf_lambda.clone(),
        nus: nus.to_vec(),
        max_degree: big_p + 1,
    });
    Ok(FreeProductPrediction {
        mu,
        q,
        exact,
        admissible,
    })
}
