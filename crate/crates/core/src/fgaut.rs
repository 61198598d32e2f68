//! Endomorphisms of free groups given by generator images.

use std::fmt;

use crate::error::{Error, Result};
use crate::word::{letter_index, Reducer, Word};
use crate::zlin::IntMatrix;

/// An endomorphism of the free group of rank `rank`, one image per generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeEnd {
    rank: usize,
    images: Vec<Word>,
}

impl FreeEnd {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        let rank = images.len();
        if rank == 0 {
            return Err(Error::Empty("endomorphism with no generators".into()));
        }
        for w in &images {
            if w.rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: w.rank(),
                });
            }
        }
        Ok(FreeEnd { rank, images })
    }

    /// Build from word literals, e.g. `["ab", "bc", "cab"]`.
    pub fn parse(images: &[&str]) -> Result<Self> {
        let rank = images.len();
        let words = images
            .iter()
            .map(|s| Word::parse(s, rank))
            .collect::<Result<Vec<_>>>()?;
        FreeEnd::new(words)
    }

    pub fn identity(rank: usize) -> Self {
        FreeEnd {
            rank,
            images: (0..rank)
                .map(|i| Word::generator(rank, i).expect("index < rank"))
                .collect(),
        }
    }

    /// Inner automorphism `x ↦ g x g⁻¹`.
    pub fn inner(g: &Word) -> Result<Self> {
        let rank = g.rank();
        let gi = g.inverse();
        let images = (0..rank)
            .map(|i| g.concat(&Word::generator(rank, i)?)?.concat(&gi))
            .collect::<Result<Vec<_>>>()?;
        FreeEnd::new(images)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, index: usize) -> &Word {
        &self.images[index]
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if self.rank != rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: rank,
            });
        }
        Ok(())
    }

    /// Image of `w`, freely reduced.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.check_rank(w.rank())?;
        let mut r = Reducer::with_capacity(self.rank, w.len());
        for &l in w.letters() {
            let img = &self.images[letter_index(l)];
            if l > 0 {
                r.push_word(img)?;
            } else {
                r.push_inverse(img)?;
            }
        }
        Ok(r.finish())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &FreeEnd) -> Result<FreeEnd> {
        self.check_rank(other.rank)?;
        let images = other
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeEnd {
            rank: self.rank,
            images,
        })
    }

    /// `self^n(w)` by repeated application. On overflow the error reports the
    /// number of completed steps.
    pub fn iterate(&self, w: &Word, n: usize) -> Result<Word> {
        self.check_rank(w.rank())?;
        let mut cur = w.clone();
        for done in 0..n {
            cur = self.apply(&cur).map_err(|e| match e {
                Error::CapExceeded { len, cap } => Error::IterationCap {
                    completed: done,
                    len,
                    cap,
                },
                other => other,
            })?;
        }
        Ok(cur)
    }

    /// All iterates `w, φ(w), …, φⁿ(w)`, stopping early on the cap.
    /// Returns the completed prefix together with the error, if any.
    pub fn orbit(&self, w: &Word, n: usize) -> (Vec<Word>, Option<Error>) {
        let mut out = vec![w.clone()];
        if let Err(e) = self.check_rank(w.rank()) {
            return (out, Some(e));
        }
        for done in 0..n {
            match self.apply(out.last().expect("nonempty")) {
                Ok(next) => out.push(next),
                Err(Error::CapExceeded { len, cap }) => {
                    return (
                        out,
                        Some(Error::IterationCap {
                            completed: done,
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

    /// `self^n` as an endomorphism.
    pub fn power(&self, n: usize) -> Result<FreeEnd> {
        let mut acc = FreeEnd::identity(self.rank);
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Check that `inverse` is a two-sided inverse and wrap the pair.
    pub fn verify_automorphism(self, inverse: FreeEnd) -> Result<AutWitness> {
        self.check_rank(inverse.rank)?;
        let fi = self.compose(&inverse)?;
        let if_ = inverse.compose(&self)?;
        for (side, comp) in [("forward∘inverse", &fi), ("inverse∘forward", &if_)] {
            for (i, img) in comp.images.iter().enumerate() {
                if img.letters() != [i as i32 + 1] {
                    return Err(Error::NotInverse {
                        generator: Word::generator(self.rank, i)?.to_string(),
                        side: side.into(),
                    });
                }
            }
        }
        Ok(AutWitness {
            forward: self,
            inverse,
        })
    }

    /// Matrix of signed letter counts; column `j` is the image of generator `j`.
    pub fn abelianize(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rank, self.rank);
        for (j, img) in self.images.iter().enumerate() {
            for (i, c) in img.abelian_counts().into_iter().enumerate() {
                m.set(i, j, c.into());
            }
        }
        m
    }

    /// Unsigned occurrence counts; entry `(i, j)` counts `i^{±1}` in the
    /// image of generator `j`.
    pub fn occurrence_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rank, self.rank);
        for (j, img) in self.images.iter().enumerate() {
            for (i, c) in img.occurrences().into_iter().enumerate() {
                m.set(i, j, c.into());
            }
        }
        m
    }

    /// No inverse letter in any image.
    pub fn is_positive(&self) -> bool {
        self.images.iter().all(Word::is_positive)
    }

    /// `σ(φ) = max_s |φ(s)|`.
    pub fn sigma(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    /// `min_{|x| ≤ radius} max_s |x φ(s) x⁻¹|`: an upper bound for `τ(φ)`.
    pub fn tau_upper(&self, radius: usize) -> usize {
        tau_upper_of(&self.images, radius)
    }
}

/// Bounded conjugator search over all reduced words of length at most
/// `radius`, applied to a list of images.
pub fn tau_upper_of(images: &[Word], radius: usize) -> usize {
    let rank = match images.first() {
        Some(w) => w.rank(),
        None => return 0,
    };
    let eval = |x: &Word| images.iter().map(|w| w.conjugate_len(x)).max().unwrap_or(0);
    let mut best = eval(&Word::identity(rank));
    let mut frontier = vec![Vec::<i32>::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in 1..=rank as i32 {
                for l in [g, -g] {
                    if x.last() == Some(&-l) {
                        continue;
                    }
                    let mut y = x.clone();
                    y.push(l);
                    let v = eval(&Word::from_reduced_unchecked(rank, y.clone()));
                    best = best.min(v);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    best
}

impl fmt::Display for FreeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, img) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", Word::generator(self.rank, i).map_err(|_| fmt::Error)?, img)?;
        }
        Ok(())
    }
}

/// An endomorphism together with a verified two-sided inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutWitness {
    forward: FreeEnd,
    inverse: FreeEnd,
}

impl AutWitness {
    pub fn identity(rank: usize) -> Self {
        AutWitness {
            forward: FreeEnd::identity(rank),
            inverse: FreeEnd::identity(rank),
        }
    }

    pub fn forward(&self) -> &FreeEnd {
        &self.forward
    }

    pub fn inverse(&self) -> &FreeEnd {
        &self.inverse
    }

    pub fn rank(&self) -> usize {
        self.forward.rank
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AutWitness) -> Result<AutWitness> {
        Ok(AutWitness {
            forward: self.forward.compose(&other.forward)?,
            inverse: other.inverse.compose(&self.inverse)?,
        })
    }

    pub fn invert(&self) -> AutWitness {
        AutWitness {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn power(&self, n: usize) -> Result<AutWitness> {
        Ok(AutWitness {
            forward: self.forward.power(n)?,
            inverse: self.inverse.power(n)?,
        })
    }
}

/// Twisted products `g_n = g φ(g) φ²(g) … φⁿ(g)`, for `n = 0..=count-1`.
pub fn twisted_products(e: &FreeEnd, g: &Word, count: usize) -> Result<Vec<Word>> {
    let mut out = Vec::with_capacity(count);
    let mut power = g.clone();
    let mut acc = g.clone();
    for k in 0..count {
        if k > 0 {
            power = e.apply(&power)?;
            acc = acc.concat(&power)?;
        }
        out.push(acc.clone());
    }
    Ok(out)
}

/// Named maps used throughout the tests and examples.
pub mod catalog {
    use super::*;

    /// `a → ab, b → bc, c → cab`, a positive map on `F₃` with primitive
    /// transition matrix.
    pub fn phi_pf() -> FreeEnd {
        FreeEnd::parse(&["ab", "bc", "cab"]).expect("valid literal")
    }

    /// Inverse of [`phi_pf`], found by back-substitution.
    pub fn phi_pf_inverse() -> FreeEnd {
        FreeEnd::parse(&["acAB", "baC", "cA"]).expect("valid literal")
    }

    pub fn phi_pf_witness() -> AutWitness {
        phi_pf()
            .verify_automorphism(phi_pf_inverse())
            .expect("hand-checked inverse")
    }

    /// `x₁ → x₁`, `x_k → x_k x_{k−1}` on `F_rank`.
    pub fn polynomial_tower(rank: usize) -> FreeEnd {
        let images = (0..rank)
            .map(|k| {
                if k == 0 {
                    Word::generator(rank, 0)
                } else {
                    Word::from_letters(rank, [k as i32 + 1, k as i32])
                }
            })
            .collect::<Result<Vec<_>>>()
            .expect("valid indices");
        FreeEnd::new(images).expect("consistent rank")
    }

    pub fn polynomial_tower_inverse(rank: usize) -> FreeEnd {
        // x_k ↦ x_k ψ⁻¹(x_{k-1})⁻¹
        let mut images: Vec<Word> = Vec::with_capacity(rank);
        for k in 0..rank {
            let gen = Word::generator(rank, k).expect("valid index");
            if k == 0 {
                images.push(gen);
            } else {
                let prev = images[k - 1].inverse();
                images.push(gen.concat(&prev).expect("small"));
            }
        }
        FreeEnd::new(images).expect("consistent rank")
    }

    /// Elementary Nielsen map `a → ab`, other generators fixed.
    pub fn nielsen(rank: usize) -> FreeEnd {
        let mut images: Vec<Word> = (0..rank)
            .map(|i| Word::generator(rank, i).expect("valid index"))
            .collect();
        images[0] = Word::from_letters(rank, [1, 2]).expect("rank >= 2");
        FreeEnd::new(images).expect("consistent rank")
    }

    pub fn nielsen_inverse(rank: usize) -> FreeEnd {
        let mut images: Vec<Word> = (0..rank)
            .map(|i| Word::generator(rank, i).expect("valid index"))
            .collect();
        images[0] = Word::from_letters(rank, [1, -2]).expect("rank >= 2");
        FreeEnd::new(images).expect("consistent rank")
    }
}
