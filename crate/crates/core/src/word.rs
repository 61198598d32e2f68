//! Freely reduced words in a free group of finite rank.
//!
//! Letters are stored as signed integers: generator `i` is `i + 1` and its
//! inverse is `-(i + 1)`. Reduction is a single stack pass.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// Default hard cap on the number of letters any operation may produce.
pub const DEFAULT_LETTER_CAP: usize = 100_000_000;

static LETTER_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_LETTER_CAP);

/// Current global letter cap.
pub fn letter_cap() -> usize {
    LETTER_CAP.load(Ordering::Relaxed)
}

/// Set the global letter cap. Returns the previous value.
pub fn set_letter_cap(cap: usize) -> usize {
    LETTER_CAP.swap(cap.max(1), Ordering::Relaxed)
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub index: usize,
    pub inverse: bool,
}

impl Generator {
    pub fn new(index: usize, inverse: bool) -> Self {
        Generator { index, inverse }
    }

    fn letter(self) -> i32 {
        let l = self.index as i32 + 1;
        if self.inverse {
            -l
        } else {
            l
        }
    }

    fn from_letter(l: i32) -> Self {
        Generator {
            index: letter_index(l),
            inverse: l < 0,
        }
    }
}

#[inline]
pub(crate) fn letter_index(l: i32) -> usize {
    (l.unsigned_abs() - 1) as usize
}

fn letter_char(l: i32) -> String {
    let idx = letter_index(l);
    if idx < 26 {
        let c = (b'a' + idx as u8) as char;
        if l < 0 {
            c.to_ascii_uppercase().to_string()
        } else {
            c.to_string()
        }
    } else if l < 0 {
        format!("X{}", idx)
    } else {
        format!("x{}", idx)
    }
}

/// Stack-based reducer shared by every word-producing operation.
pub(crate) struct Reducer {
    rank: usize,
    stack: Vec<i32>,
    cap: usize,
}

impl Reducer {
    pub(crate) fn new(rank: usize) -> Self {
        Reducer {
            rank,
            stack: Vec::new(),
            cap: letter_cap(),
        }
    }

    pub(crate) fn with_capacity(rank: usize, n: usize) -> Self {
        let cap = letter_cap();
        Reducer {
            rank,
            stack: Vec::with_capacity(n.min(cap)),
            cap,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, l: i32) -> Result<()> {
        if self.stack.last() == Some(&-l) {
            self.stack.pop();
        } else {
            if self.stack.len() >= self.cap {
                return Err(Error::CapExceeded {
                    len: self.stack.len() + 1,
                    cap: self.cap,
                });
            }
            self.stack.push(l);
        }
        Ok(())
    }

    pub(crate) fn push_word(&mut self, w: &Word) -> Result<()> {
        for &l in &w.letters {
            self.push(l)?;
        }
        Ok(())
    }

    pub(crate) fn push_inverse(&mut self, w: &Word) -> Result<()> {
        for &l in w.letters.iter().rev() {
            self.push(-l)?;
        }
        Ok(())
    }

    pub(crate) fn finish(self) -> Word {
        Word {
            rank: self.rank,
            letters: self.stack,
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<i32>,
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Self> {
        if index >= rank {
            return Err(Error::IndexOutOfRange { index, rank });
        }
        Ok(Word {
            rank,
            letters: vec![index as i32 + 1],
        })
    }

    /// Freely reduce a raw sequence of generators.
    pub fn reduce(rank: usize, raw: &[Generator]) -> Result<Self> {
        let mut r = Reducer::with_capacity(rank, raw.len());
        for g in raw {
            if g.index >= rank {
                return Err(Error::IndexOutOfRange {
                    index: g.index,
                    rank,
                });
            }
            r.push(g.letter())?;
        }
        Ok(r.finish())
    }

    /// Reduce a sequence of signed letters (`±(index + 1)`).
    pub fn from_letters<I: IntoIterator<Item = i32>>(rank: usize, letters: I) -> Result<Self> {
        let mut r = Reducer::new(rank);
        for l in letters {
            if l == 0 {
                return Err(Error::Malformed("zero letter".into()));
            }
            let index = letter_index(l);
            if index >= rank {
                return Err(Error::IndexOutOfRange { index, rank });
            }
            r.push(l)?;
        }
        Ok(r.finish())
    }

    /// Parse the literal syntax: `a`..`z` for generators in rank order,
    /// uppercase for inverses, whitespace ignored, `1` for the identity.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        let mut r = Reducer::new(rank);
        for (offset, c) in text.char_indices() {
            if c.is_whitespace() || c == '1' {
                continue;
            }
            let (index, inverse) = match c {
                'a'..='z' => (c as usize - 'a' as usize, false),
                'A'..='Z' => (c as usize - 'A' as usize, true),
                _ => {
                    return Err(Error::BadLetter {
                        letter: c,
                        offset,
                        rank,
                    })
                }
            };
            if index >= rank {
                return Err(Error::BadLetter {
                    letter: c,
                    offset,
                    rank,
                });
            }
            r.push(Generator::new(index, inverse).letter())?;
        }
        Ok(r.finish())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Word length `|w|`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.letters.iter().map(|&l| Generator::from_letter(l))
    }

    /// True when no inverse letter occurs.
    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|&l| l > 0)
    }

    fn check_rank(&self, other: &Word) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.check_rank(other)?;
        let cap = letter_cap();
        let common = self
            .letters
            .iter()
            .rev()
            .zip(other.letters.iter())
            .take_while(|(&x, &y)| x == -y)
            .count();
        let len = self.len() + other.len() - 2 * common;
        if len > cap {
            return Err(Error::CapExceeded { len, cap });
        }
        let mut letters = Vec::with_capacity(len);
        letters.extend_from_slice(&self.letters[..self.len() - common]);
        letters.extend_from_slice(&other.letters[common..]);
        Ok(Word {
            rank: self.rank,
            letters,
        })
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: usize) -> Result<Word> {
        let mut acc = Word::identity(self.rank);
        for _ in 0..k {
            acc = acc.concat(self)?;
        }
        Ok(acc)
    }

    /// Split off the longest conjugator so that the remaining core is
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> CyclicWord {
        let n = self.letters.len();
        let mut i = 0;
        while 2 * i + 1 < n && self.letters[i] == -self.letters[n - 1 - i] {
            i += 1;
        }
        CyclicWord {
            core: Word {
                rank: self.rank,
                letters: self.letters[i..n - i].to_vec(),
            },
            conjugator: Word {
                rank: self.rank,
                letters: self.letters[..i].to_vec(),
            },
        }
    }

    /// Conjugacy length `‖w‖`, the length of the cyclically reduced core.
    pub fn conj_len(&self) -> usize {
        let n = self.letters.len();
        let mut i = 0;
        while 2 * i + 1 < n && self.letters[i] == -self.letters[n - 1 - i] {
            i += 1;
        }
        n - 2 * i
    }

    /// `|x · self · x⁻¹|` without materialising the product when `self` is
    /// long compared to `x`.
    pub fn conjugate_len(&self, x: &Word) -> usize {
        let w = &self.letters;
        let xs = &x.letters;
        if w.len() <= 2 * xs.len() + 1 {
            let mut r = Reducer::new(self.rank);
            r.cap = usize::MAX;
            for &l in xs.iter().chain(w.iter()) {
                let _ = r.push(l);
            }
            for &l in xs.iter().rev() {
                let _ = r.push(-l);
            }
            return r.stack.len();
        }
        let left = xs
            .iter()
            .rev()
            .zip(w.iter())
            .take_while(|(&a, &b)| a == -b)
            .count();
        let right = w
            .iter()
            .rev()
            .zip(xs.iter().rev())
            .take_while(|(&a, &b)| a == b)
            .count();
        w.len() + 2 * xs.len() - 2 * left - 2 * right
    }

    /// Signed letter counts (the abelianization image).
    pub fn abelian_counts(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &l in &self.letters {
            v[letter_index(l)] += l.signum() as i64;
        }
        v
    }

    /// Unsigned occurrence counts per generator.
    pub fn occurrences(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.rank];
        for &l in &self.letters {
            v[letter_index(l)] += 1;
        }
        v
    }

    pub(crate) fn from_reduced_unchecked(rank: usize, letters: Vec<i32>) -> Word {
        Word { rank, letters }
    }

    /// Reinterpret in a larger ambient rank (letters unchanged).
    pub fn widen(&self, rank: usize) -> Result<Word> {
        if rank < self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: rank,
            });
        }
        Ok(Word {
            rank,
            letters: self.letters.clone(),
        })
    }

    /// Shift every generator index by `offset`, landing in rank `rank`.
    pub fn shifted(&self, offset: usize, rank: usize) -> Result<Word> {
        if self.rank + offset > rank {
            return Err(Error::RankMismatch {
                left: self.rank + offset,
                right: rank,
            });
        }
        let o = offset as i32;
        Ok(Word {
            rank,
            letters: self
                .letters
                .iter()
                .map(|&l| if l > 0 { l + o } else { l - o })
                .collect(),
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.letters {
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}

/// A cyclically reduced core together with the conjugator that recovers the
/// original word: `word = conjugator · core · conjugator⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicWord {
    pub core: Word,
    pub conjugator: Word,
}

impl CyclicWord {
    pub fn conj_len(&self) -> usize {
        self.core.len()
    }

    /// Rebuild the original word.
    pub fn expand(&self) -> Result<Word> {
        self.conjugator
            .concat(&self.core)?
            .concat(&self.conjugator.inverse())
    }
}
