//! Freely reduced words in a free group.

use std::fmt;

/// A freely reduced word, stored as syllables `(generator, exponent)`.
///
/// Adjacent syllables always have distinct generators and no exponent is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    syllables: Vec<(u32, i32)>,
}

impl Word {
    pub fn identity() -> Self {
        Word { syllables: Vec::new() }
    }

    pub fn generator(g: u32) -> Self {
        Word { syllables: vec![(g, 1)] }
    }

    /// Builds a word from arbitrary syllables, reducing as it goes.
    pub fn from_syllables<I: IntoIterator<Item = (u32, i32)>>(iter: I) -> Self {
        let mut w = Word::identity();
        for (g, e) in iter {
            w.push(g, e);
        }
        w
    }

    /// Builds a word from signed letters: `+(g+1)` for `g`, `-(g+1)` for `g^-1`.
    pub fn from_letters(letters: &[i32]) -> Self {
        Word::from_syllables(letters.iter().map(|&l| ((l.unsigned_abs() - 1), l.signum())))
    }

    fn push(&mut self, g: u32, e: i32) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syllables.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syllables.pop();
                }
                return;
            }
        }
        self.syllables.push((g, e));
    }

    pub fn syllables(&self) -> &[(u32, i32)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters (sum of absolute exponents).
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|s| s.1.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<u32> {
        self.syllables.iter().map(|s| s.0).max()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.syllables {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word { syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `self^by = by^-1 * self * by`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.inverse().mul(self).mul(by)
    }

    /// `(self, other) = self^-1 * other^-1 * self * other`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// Signed letter sequence, see [`Word::from_letters`].
    pub fn letters(&self) -> Vec<i32> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, e) in &self.syllables {
            let l = g as i32 + 1;
            for _ in 0..e.unsigned_abs() {
                out.push(if e > 0 { l } else { -l });
            }
        }
        out
    }

    /// Cyclically reduced form (conjugate with no cancellation between ends).
    pub fn cyclically_reduced(&self) -> Word {
        let mut s = self.syllables.clone();
        loop {
            if s.len() >= 2 && s[0].0 == s[s.len() - 1].0 {
                let (_, e) = s.pop().unwrap();
                s[0].1 += e;
                if s[0].1 == 0 {
                    s.remove(0);
                }
            } else {
                break;
            }
        }
        Word { syllables: s }
    }

    /// Rewrites generator indices through `map`.
    pub fn substitute(&self, map: &[Word]) -> Word {
        let mut out = Word::identity();
        for &(g, e) in &self.syllables {
            out = out.mul(&map[g as usize].pow(e as i64));
        }
        out
    }

    /// Renders using the given generator names, e.g. `a^3*b^-1`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (i, &(g, e)) in self.word.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            let name = self.names.get(g as usize).map(String::as_str).unwrap_or("?");
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}
