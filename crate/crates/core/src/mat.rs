//! Minimal dense square matrix over a [`Scalar`].
//!
//! Indices are 1-based to mirror the formulas (entries m_ij with
//! 1 ≤ i, j ≤ n); storage is row-major.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 1..=n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Build from a closure over 1-based (row, column).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Mat::from_fn(self.n, |i, j| {
            let mut acc = S::zero();
            for k in 1..=self.n {
                acc = acc + self[(i, k)].clone() * rhs[(k, j)].clone();
            }
            acc
        })
    }

    /// Apply `v -> M v` to a 1-based logical vector.
    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.n);
        (1..=self.n)
            .map(|i| {
                let mut acc = S::zero();
                for k in 1..=self.n {
                    acc = acc + self[(i, k)].clone() * v[k - 1].clone();
                }
                acc
            })
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// True iff every strictly-lower entry is exactly zero.
    pub fn is_upper_triangular(&self) -> bool {
        for i in 2..=self.n {
            for j in 1..i {
                if !self[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn diag(&self) -> Vec<S> {
        (1..=self.n).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[(i - 1) * self.n..i * self.n]
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i >= 1 && i <= self.n && j >= 1 && j <= self.n);
        &self.data[(i - 1) * self.n + (j - 1)]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i >= 1 && i <= self.n && j >= 1 && j <= self.n);
        &mut self.data[(i - 1) * self.n + (j - 1)]
    }
}
