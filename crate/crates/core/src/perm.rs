//! Permutations on `{0, …, n-1}` acting on the right.
//!
//! Text form is 1-based cycle notation such as `(1,2,3,4)(5,7)`.

use std::fmt;

use crate::error::{GroupError, Result};

/// A permutation stored as its image array.  `x^(p*q) = (x^p)^q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm { images: (0..degree as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x as usize >= n || seen[x as usize] {
                return Err(GroupError::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[x as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Trusted constructor for arrays already known to be bijections.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        Perm { images }
    }

    /// Parses 1-based cycle notation.  `()` is the identity.
    pub fn from_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let bad = |m: &str| GroupError::InvalidPermutation(format!("`{text}`: {m}"));
        let mut seen = vec![false; degree];
        let body: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = body.as_str();
        while !rest.is_empty() {
            let inner_end = rest.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            if !rest.starts_with('(') {
                return Err(bad("expected `(`"));
            }
            let inner = &rest[1..inner_end];
            rest = &rest[inner_end + 1..];
            if inner.is_empty() {
                continue;
            }
            let pts: Vec<usize> = inner
                .split(',')
                .map(|s| s.parse::<usize>().map_err(|_| bad("bad point")))
                .collect::<Result<_>>()?;
            for &p in &pts {
                if p == 0 || p > degree {
                    return Err(bad("point out of range"));
                }
                if seen[p - 1] {
                    return Err(bad("point repeated"));
                }
                seen[p - 1] = true;
            }
            for k in 0..pts.len() {
                images[pts[k] - 1] = (pts[(k + 1) % pts.len()] - 1) as u32;
            }
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self * other`: first `self`, then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        Perm { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv }
    }

    pub fn pow(&self, k: i64) -> Perm {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Cycles of length at least two, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = vec![s as u32];
            seen[s] = true;
            let mut x = self.images[s];
            while x as usize != s {
                seen[x as usize] = true;
                c.push(x);
                x = self.images[x as usize];
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    pub fn first_moved_point(&self) -> Option<u32> {
        self.images.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32)
    }
}

/// Order of a permutation.
pub fn element_order(x: &Perm) -> u64 {
    x.order()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
