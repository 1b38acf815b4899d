//! Square matrices over GF(2), rows packed into `u64`.

use std::fmt;

use crate::error::{GroupError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    n: usize,
    /// Bit `j` of `rows[i]` is entry (i, j).
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn identity(n: usize) -> Self {
        Gf2Matrix { n, rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > 64 {
            return Err(GroupError::Matrix(format!("dimension {n} outside 1..=64")));
        }
        let mut packed = Vec::with_capacity(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(GroupError::Matrix(format!("row {} has {} entries, expected {n}", i + 1, r.len())));
            }
            let mut bits = 0u64;
            for (j, &v) in r.iter().enumerate() {
                match v {
                    0 => {}
                    1 => bits |= 1 << j,
                    _ => return Err(GroupError::Matrix(format!("entry {v} is not 0 or 1"))),
                }
            }
            packed.push(bits);
        }
        Ok(Gf2Matrix { n, rows: packed })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn mul(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                for k in 0..self.n {
                    if r >> k & 1 == 1 {
                        acc ^= other.rows[k];
                    }
                }
                acc
            })
            .collect();
        Gf2Matrix { n: self.n, rows }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.n {
            if let Some(p) = (rank..self.n).find(|&i| rows[i] >> col & 1 == 1) {
                rows.swap(rank, p);
                for i in 0..self.n {
                    if i != rank && rows[i] >> col & 1 == 1 {
                        rows[i] ^= rows[rank];
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Multiplicative order, or `None` for a singular matrix.
    pub fn order(&self) -> Option<u64> {
        if !self.is_invertible() {
            return None;
        }
        let id = Gf2Matrix::identity(self.n);
        let mut m = self.clone();
        let mut k = 1u64;
        while m != id {
            m = m.mul(self);
            k += 1;
        }
        Some(k)
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<&str> = (0..self.n).map(|j| if self.get(i, j) { "1" } else { "0" }).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
