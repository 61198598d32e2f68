//! Automorphisms of `H × A` for a free group `H` and `A = Z^k`, as formal
//! matrices `(φ, ψ, α)` with `φ ∈ Aut(H)`, `ψ ∈ GL_k(Z)` and `α: H → A`
//! factoring through the abelianisation.

use std::fmt;

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::fgaut::AutWitness;
use crate::word::Word;
use crate::zlin::{pair, pf_data, FieldElement, IntMatrix, IntVector};

/// Length functional on `H × A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// `|h| + ℓ¹(a)`.
    Word,
    /// `‖h‖ + ℓ¹(a)`.
    Conjugacy,
}

/// An element `(h, a)` of `H × A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductElement {
    pub h: Word,
    pub a: IntVector,
}

impl ProductElement {
    pub fn new(h: Word, a: IntVector) -> Self {
        ProductElement { h, a }
    }

    pub fn identity(rank: usize, k: usize) -> Self {
        ProductElement::new(Word::identity(rank), IntVector::zeros(k))
    }

    /// Parse `(abC | 1 0 -2)`; a bare word means `a = 0`.
    pub fn parse(text: &str, rank: usize, k: usize) -> Result<Self> {
        let t = text.trim();
        let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) else {
            return Ok(ProductElement::new(Word::parse(t, rank)?, IntVector::zeros(k)));
        };
        let (w, v) = inner
            .split_once('|')
            .ok_or_else(|| Error::Malformed(format!("expected `(word | vector)`, got {t:?}")))?;
        let entries = v
            .split_whitespace()
            .map(|x| {
                x.parse::<BigInt>()
                    .map_err(|_| Error::Malformed(format!("bad vector entry {x:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} entries, abelian rank is {k}",
                entries.len()
            )));
        }
        Ok(ProductElement::new(Word::parse(w, rank)?, IntVector(entries)))
    }

    pub fn is_identity(&self) -> bool {
        self.h.is_identity() && self.a.is_zero()
    }

    pub fn mul(&self, other: &ProductElement) -> Result<ProductElement> {
        Ok(ProductElement::new(self.h.concat(&other.h)?, self.a.add(&other.a)?))
    }

    pub fn inverse(&self) -> ProductElement {
        ProductElement::new(self.h.inverse(), self.a.scale(&BigInt::from(-1)))
    }

    pub fn length(&self, metric: Metric) -> BigUint {
        let h = match metric {
            Metric::Word => self.h.len(),
            Metric::Conjugacy => self.h.conj_len(),
        };
        BigUint::from(h) + self.a.l1().magnitude()
    }
}

impl fmt::Display for ProductElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} |", self.h)?;
        for x in &self.a.0 {
            write!(f, " {x}")?;
        }
        write!(f, ")")
    }
}

/// `ℳ(φ, ψ, α)` acting by `(h, a) ↦ (φ(h), α·ab(h) + ψ·a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductAut {
    phi: AutWitness,
    psi: IntMatrix,
    alpha: IntMatrix,
}

pub(crate) fn ab(h: &Word) -> IntVector {
    IntVector(h.abelian_counts().into_iter().map(BigInt::from).collect())
}

impl ProductAut {
    pub fn new(phi: AutWitness, psi: IntMatrix, alpha: IntMatrix) -> Result<Self> {
        let r = phi.rank();
        let k = psi.rows();
        if !psi.is_square() {
            return Err(Error::DimensionMismatch("ψ must be square".into()));
        }
        if alpha.rows() != k || alpha.cols() != r {
            return Err(Error::DimensionMismatch(format!(
                "α must be {k}x{r}, got {}x{}",
                alpha.rows(),
                alpha.cols()
            )));
        }
        if !psi.is_unimodular() {
            return Err(Error::Precondition("ψ is not invertible over the integers".into()));
        }
        Ok(ProductAut { phi, psi, alpha })
    }

    pub fn identity(rank: usize, k: usize) -> Self {
        ProductAut {
            phi: AutWitness::identity(rank),
            psi: IntMatrix::identity(k),
            alpha: IntMatrix::zeros(k, rank),
        }
    }

    pub fn phi(&self) -> &AutWitness {
        &self.phi
    }

    pub fn psi(&self) -> &IntMatrix {
        &self.psi
    }

    pub fn alpha(&self) -> &IntMatrix {
        &self.alpha
    }

    /// Rank of `H`.
    pub fn rank(&self) -> usize {
        self.phi.rank()
    }

    /// Rank of `A`.
    pub fn abelian_rank(&self) -> usize {
        self.psi.rows()
    }

    fn check_shape(&self, rank: usize, k: usize) -> Result<()> {
        if rank != self.rank() || k != self.abelian_rank() {
            return Err(Error::DimensionMismatch(format!(
                "expected F{} x Z^{}, got F{rank} x Z^{k}",
                self.rank(),
                self.abelian_rank()
            )));
        }
        Ok(())
    }

    /// `self ∘ other = (φ₁φ₂, α₁·M(φ₂) + ψ₁α₂, ψ₁ψ₂)`.
    pub fn compose(&self, other: &ProductAut) -> Result<ProductAut> {
        other.check_shape(self.rank(), self.abelian_rank())?;
        let m2 = other.phi.forward().abelianize();
        let alpha = self.alpha.mul(&m2)?.add(&self.psi.mul(&other.alpha)?)?;
        Ok(ProductAut {
            phi: self.phi.compose(&other.phi)?,
            psi: self.psi.mul(&other.psi)?,
            alpha,
        })
    }

    pub fn apply(&self, g: &ProductElement) -> Result<ProductElement> {
        self.check_shape(g.h.rank(), g.a.len())?;
        let h = self.phi.forward().apply(&g.h)?;
        let a = self.alpha.apply(&ab(&g.h))?.add(&self.psi.apply(&g.a)?)?;
        Ok(ProductElement { h, a })
    }

    /// `α_n = Σ_{j=1}^{n} ψ^{j−1} α M(φ)^{n−j}` via `α_{n+1} = ψα_n + αM(φ)ⁿ`.
    pub fn alpha_power(&self, n: usize) -> Result<IntMatrix> {
        let m = self.phi.forward().abelianize();
        let mut acc = IntMatrix::zeros(self.abelian_rank(), self.rank());
        let mut m_pow = IntMatrix::identity(self.rank());
        for _ in 0..n {
            acc = self.psi.mul(&acc)?.add(&self.alpha.mul(&m_pow)?)?;
            m_pow = m_pow.mul(&m)?;
        }
        Ok(acc)
    }

    /// `ℳ(φⁿ, ψⁿ, α_n)`.
    pub fn power(&self, n: usize) -> Result<ProductAut> {
        Ok(ProductAut {
            phi: self.phi.power(n)?,
            psi: self.psi.pow(n as u64)?,
            alpha: self.alpha_power(n)?,
        })
    }

    /// Lengths of `χⁿ(g)` for `n = 0..=n_max` by repeated application.
    /// Stops early on the letter cap and returns the completed prefix.
    pub fn growth(&self, g: &ProductElement, n_max: usize, metric: Metric) -> (Vec<(u64, BigUint)>, Option<Error>) {
        let mut out = Vec::with_capacity(n_max + 1);
        if let Err(e) = self.check_shape(g.h.rank(), g.a.len()) {
            return (out, Some(e));
        }
        let mut cur = g.clone();
        out.push((0, cur.length(metric)));
        for n in 1..=n_max {
            match self.apply(&cur) {
                Ok(next) => {
                    out.push((n as u64, next.length(metric)));
                    cur = next;
                }
                Err(Error::CapExceeded { len, cap }) => {
                    return (
                        out,
                        Some(Error::IterationCap {
                            completed: n - 1,
                            len,
                            cap,
                        }),
                    )
                }
                Err(e) => return (out, Some(e)),
            }
        }
        (out, None)
    }

    /// `⟨u, ab(h)⟩ ∈ Q(λ)` for the left Perron–Frobenius eigenvector `u` of
    /// `ψ`. Zero exactly on the kernel of the limiting homomorphism
    /// `h ↦ lim λ⁻ⁿ ψⁿ ab(h)`. Requires `ψ = M(φ)` primitive and `α = I`.
    pub fn beta_pairing(&self, h: &Word) -> Result<FieldElement> {
        let m = self.phi.forward().abelianize();
        if self.psi != m {
            return Err(Error::Precondition("ψ must be the abelianisation of φ".into()));
        }
        if self.alpha != IntMatrix::identity(self.rank()) {
            return Err(Error::Precondition("α must be the abelianisation map".into()));
        }
        if h.rank() != self.rank() {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: h.rank(),
            });
        }
        let pf = pf_data(&self.psi)?;
        Ok(pair(&pf.left, &ab(h)))
    }
}

/// Which of the three classes `[1]`, `[λⁿ]`, `[nλⁿ]` an element falls in,
/// decided exactly from [`ProductAut::beta_pairing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BetaClass {
    Identity,
    Kernel,
    Generic,
}

pub fn beta_class(m: &ProductAut, g: &ProductElement) -> Result<BetaClass> {
    if g.is_identity() {
        return Ok(BetaClass::Identity);
    }
    if m.beta_pairing(&g.h)?.is_zero() {
        Ok(BetaClass::Kernel)
    } else {
        Ok(BetaClass::Generic)
    }
}

/// `ℳ(φ, M(φ), I)` on `F_r × Z^r`.
pub fn abelian_double(phi: AutWitness) -> Result<ProductAut> {
    let m = phi.forward().abelianize();
    let r = phi.rank();
    ProductAut::new(phi, m, IntMatrix::identity(r))
}

impl fmt::Display for ProductAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({}; psi = {}; alpha = {})", self.phi.forward(), self.psi, self.alpha)
    }
}
