//! Plain relations `X ⇸ Y` as dense boolean tables.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation{}x{}{:?}", self.rows, self.cols, self.pairs())
    }
}

impl Relation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Relation {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                bits.push(f(i, j));
            }
        }
        Relation { rows, cols, bits }
    }

    pub fn from_pairs(rows: usize, cols: usize, pairs: &[(usize, usize)]) -> Self {
        let mut r = Self::empty(rows, cols);
        for &(i, j) in pairs {
            r.set(i, j, true);
        }
        r
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.bits[i * self.cols + j] = b;
    }

    /// Related pairs in row-major order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn transpose(&self) -> Relation {
        Relation::from_fn(self.cols, self.rows, |j, i| self.get(i, j))
    }

    /// `s·r` for `r: X ⇸ Y`, `s: Y ⇸ Z`.
    pub fn then(&self, s: &Relation) -> Relation {
        assert_eq!(self.cols, s.rows, "relation composition shape");
        Relation::from_fn(self.rows, s.cols, |i, k| {
            (0..self.cols).any(|j| self.get(i, j) && s.get(j, k))
        })
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_and_compose() {
        let r = Relation::from_pairs(2, 3, &[(0, 1), (1, 2)]);
        let s = Relation::from_pairs(3, 1, &[(2, 0)]);
        let t = r.then(&s);
        assert!(!t.get(0, 0));
        assert!(t.get(1, 0));
        assert_eq!(r.transpose().transpose(), r);
        assert_eq!(r.count(), 2);
        assert!(Relation::empty(2, 3).is_subset(&r));
    }
}
