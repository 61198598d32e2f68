//! One-edge splittings with trivial edge group: free products `A ∗ B` and
//! `A ∗ ⟨t⟩` with `φ(t) = t·a`, iterated by closed-form syllable images.

use crate::error::{Error, Result};
use crate::fgaut::FreeEnd;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OneEdgeCase {
    /// `φ = φ_A ∗ φ_B` on `A ∗ B`.
    Amalgam { phi_a: FreeEnd, phi_b: FreeEnd },
    /// `φ|_A = φ_A`, `φ(t) = t·a`.
    Hnn { phi_a: FreeEnd, a: Word },
}

/// A normal-form syllable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Syllable {
    A(Word),
    B(Word),
    /// `t` (`false`) or `t⁻¹` (`true`).
    T(bool),
}

impl OneEdgeCase {
    /// Rank of the free group carrying the whole splitting.
    pub fn combined_rank(&self) -> usize {
        match self {
            OneEdgeCase::Amalgam { phi_a, phi_b } => phi_a.rank() + phi_b.rank(),
            OneEdgeCase::Hnn { phi_a, .. } => phi_a.rank() + 1,
        }
    }

    /// The automorphism on the combined free group: `B` generators (or `t`)
    /// come after those of `A`.
    pub fn combined_map(&self) -> Result<FreeEnd> {
        let n = self.combined_rank();
        match self {
            OneEdgeCase::Amalgam { phi_a, phi_b } => {
                let r = phi_a.rank();
                let mut images = Vec::with_capacity(n);
                for w in phi_a.images() {
                    images.push(w.shifted(0, n)?);
                }
                for w in phi_b.images() {
                    images.push(w.shifted(r, n)?);
                }
                FreeEnd::new(images)
            }
            OneEdgeCase::Hnn { phi_a, a } => {
                let r = phi_a.rank();
                let mut images = phi_a
                    .images()
                    .iter()
                    .map(|w| w.shifted(0, n))
                    .collect::<Result<Vec<_>>>()?;
                let t = Word::generator(n, r)?;
                images.push(t.concat(&a.shifted(0, n)?)?);
                FreeEnd::new(images)
            }
        }
    }

    /// Reject sequences that are not reduced normal forms.
    pub fn validate(&self, g: &[Syllable]) -> Result<()> {
        for (i, s) in g.iter().enumerate() {
            let prev = i.checked_sub(1).map(|j| &g[j]);
            match (self, s) {
                (_, Syllable::A(w)) | (OneEdgeCase::Amalgam { .. }, Syllable::B(w)) if w.is_identity() => {
                    return Err(Error::Malformed(format!("empty syllable at {i}")));
                }
                (OneEdgeCase::Amalgam { phi_a, .. }, Syllable::A(w)) => {
                    check_rank(w, phi_a.rank())?;
                    if matches!(prev, Some(Syllable::A(_))) {
                        return Err(Error::Malformed(format!("adjacent A syllables at {i}")));
                    }
                }
                (OneEdgeCase::Amalgam { phi_b, .. }, Syllable::B(w)) => {
                    check_rank(w, phi_b.rank())?;
                    if matches!(prev, Some(Syllable::B(_))) {
                        return Err(Error::Malformed(format!("adjacent B syllables at {i}")));
                    }
                }
                (OneEdgeCase::Amalgam { .. }, Syllable::T(_)) => {
                    return Err(Error::Malformed("stable letter in a free product".into()));
                }
                (OneEdgeCase::Hnn { .. }, Syllable::B(_)) => {
                    return Err(Error::Malformed("B syllable in an HNN normal form".into()));
                }
                (OneEdgeCase::Hnn { phi_a, .. }, Syllable::A(w)) => {
                    check_rank(w, phi_a.rank())?;
                    if matches!(prev, Some(Syllable::A(_))) {
                        return Err(Error::Malformed(format!("adjacent A syllables at {i}")));
                    }
                }
                (OneEdgeCase::Hnn { .. }, Syllable::T(inv)) => {
                    if matches!(prev, Some(Syllable::T(p)) if p != inv) {
                        return Err(Error::Malformed(format!("cancelling stable letters at {i}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// The element of the combined free group.
    pub fn to_word(&self, g: &[Syllable]) -> Result<Word> {
        let n = self.combined_rank();
        let r = match self {
            OneEdgeCase::Amalgam { phi_a, .. } | OneEdgeCase::Hnn { phi_a, .. } => phi_a.rank(),
        };
        let mut out = Word::identity(n);
        for s in g {
            let w = match s {
                Syllable::A(w) => w.shifted(0, n)?,
                Syllable::B(w) => w.shifted(r, n)?,
                Syllable::T(inv) => {
                    let t = Word::generator(n, r)?;
                    if *inv {
                        t.inverse()
                    } else {
                        t
                    }
                }
            };
            out = out.concat(&w)?;
        }
        Ok(out)
    }
}

fn check_rank(w: &Word, rank: usize) -> Result<()> {
    if w.rank() != rank {
        return Err(Error::RankMismatch {
            left: rank,
            right: w.rank(),
        });
    }
    Ok(())
}

/// `φⁿ(g)` assembled from the closed forms. Free product: syllable-wise
/// `φ_Aⁿ`, `φ_Bⁿ`. Stable letter: with `a_n = a φ(a) … φ^{n−1}(a)`, each
/// `A`-slot `x` between stable letters becomes `[a_n] φⁿ(x) [a_n⁻¹]`, the
/// left factor present after `t`, the right one before `t⁻¹`.
pub fn one_edge_iterate(case: &OneEdgeCase, g: &[Syllable], n: usize) -> Result<Word> {
    case.validate(g)?;
    match case {
        OneEdgeCase::Amalgam { phi_a, phi_b } => {
            let image: Vec<Syllable> = g
                .iter()
                .map(|s| match s {
                    Syllable::A(w) => phi_a.iterate(w, n).map(Syllable::A),
                    Syllable::B(w) => phi_b.iterate(w, n).map(Syllable::B),
                    Syllable::T(_) => unreachable!("validated"),
                })
                .collect::<Result<_>>()?;
            case.to_word(&image)
        }
        OneEdgeCase::Hnn { phi_a, a } => {
            let r = phi_a.rank();
            let mut a_n = Word::identity(r);
            let mut pa = a.clone();
            for _ in 0..n {
                a_n = a_n.concat(&pa)?;
                pa = phi_a.apply(&pa)?;
            }
            // slots x_0 ε_1 x_1 … ε_k x_k, with empty slots made explicit
            let mut slots: Vec<Word> = vec![Word::identity(r)];
            let mut signs: Vec<bool> = Vec::new();
            for s in g {
                match s {
                    Syllable::A(w) => {
                        let last = slots.last_mut().expect("nonempty");
                        *last = last.concat(w)?;
                    }
                    Syllable::T(inv) => {
                        signs.push(*inv);
                        slots.push(Word::identity(r));
                    }
                    Syllable::B(_) => unreachable!("validated"),
                }
            }
            let mut image = Vec::new();
            for (i, x) in slots.iter().enumerate() {
                let mut y = phi_a.iterate(x, n)?;
                if i > 0 && !signs[i - 1] {
                    y = a_n.concat(&y)?;
                }
                if i < signs.len() && signs[i] {
                    y = y.concat(&a_n.inverse())?;
                }
                if !y.is_identity() {
                    image.push(Syllable::A(y));
                }
                if i < signs.len() {
                    image.push(Syllable::T(signs[i]));
                }
            }
            case.to_word(&image)
        }
    }
}

/// `φⁿ(g)` by iterating the combined automorphism letter by letter.
pub fn direct_iterate(case: &OneEdgeCase, g: &[Syllable], n: usize) -> Result<Word> {
    case.validate(g)?;
    case.combined_map()?.iterate(&case.to_word(g)?, n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimReport {
    /// `(n, u_n⁻¹u_{n+1} == ηⁿ(w))`.
    pub rows: Vec<(usize, bool)>,
    pub pass: bool,
}

/// `u_n = a·ψ(a)…ψ^{n−1}(a) · ψⁿ(c) · ψ^{n−1}(e)…ψ(e)·e`.
pub fn u_n(a: &Word, c: &Word, e: &Word, psi: &FreeEnd, n: usize) -> Result<Word> {
    let mut left = Word::identity(a.rank());
    let mut right = Word::identity(a.rank());
    let (mut pa, mut pe) = (a.clone(), e.clone());
    for _ in 0..n {
        left = left.concat(&pa)?;
        right = pe.concat(&right)?;
        pa = psi.apply(&pa)?;
        pe = psi.apply(&pe)?;
    }
    left.concat(&psi.iterate(c, n)?)?.concat(&right)
}

/// Check `u_n⁻¹u_{n+1} = ηⁿ(w)` for `0 ≤ n ≤ n_max`, where
/// `η(x) = e⁻¹ψ(x)e` and `w = c⁻¹·a·ψ(c)·e`.
pub fn claim_un_check(a: &Word, c: &Word, e: &Word, psi: &FreeEnd, n_max: usize) -> Result<ClaimReport> {
    for w in [a, c, e] {
        check_rank(w, psi.rank())?;
    }
    let eta = FreeEnd::inner(&e.inverse())?.compose(psi)?;
    let mut rhs = c.inverse().concat(a)?.concat(&psi.apply(c)?)?.concat(e)?;
    let mut u = u_n(a, c, e, psi, 0)?;
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let next = u_n(a, c, e, psi, n + 1)?;
        let lhs = u.inverse().concat(&next)?;
        rows.push((n, lhs == rhs));
        rhs = eta.apply(&rhs)?;
        u = next;
    }
    let pass = rows.iter().all(|r| r.1);
    Ok(ClaimReport { rows, pass })
}
