//! Square banded matrices stored by diagonal.

use std::ops::{Add, Mul, Neg, Sub};

/// `n × n` real matrix with `lower` sub-diagonals and `upper`
/// super-diagonals.
///
/// Entry `(i, i + k)` for `k ∈ [−lower, upper]` lives at
/// `data[(k + lower)·n + i]`; slots that would fall outside the matrix are
/// kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    pub fn from_diagonal(diagonal: Vec<f64>) -> Self {
        Self {
            n: diagonal.len(),
            lower: 0,
            upper: 0,
            data: diagonal,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn bandwidth(&self) -> usize {
        self.lower.max(self.upper)
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let k = j as isize - i as isize;
        if k < -(self.lower as isize) || k > self.upper as isize || i >= self.n || j >= self.n {
            return None;
        }
        Some((k + self.lower as isize) as usize * self.n + i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Panics if `(i, j)` is outside the stored band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside band"));
        self.data[s] = value;
    }

    /// Values on diagonal `offset` (positive above the main diagonal), one per
    /// row; rows whose entry would fall outside the matrix read as zero.
    pub fn diagonal(&self, offset: isize) -> &[f64] {
        assert!(offset >= -(self.lower as isize) && offset <= self.upper as isize);
        let d = (offset + self.lower as isize) as usize;
        &self.data[d * self.n..(d + 1) * self.n]
    }

    /// Iterates over stored entries `(i, j, value)` inside the matrix.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n as isize;
        (-(self.lower as isize)..=self.upper as isize).flat_map(move |k| {
            let d = (k + self.lower as isize) as usize;
            (0..n)
                .filter(move |&i| i + k >= 0 && i + k < n)
                .map(move |i| (i as usize, (i + k) as usize, self.data[d * self.n + i as usize]))
        })
    }

    pub fn with_band(&self, lower: usize, upper: usize) -> Self {
        let lower = lower.max(self.lower);
        let upper = upper.max(self.upper);
        if lower == self.lower && upper == self.upper {
            return self.clone();
        }
        let mut out = Self::zeros(self.n, lower, upper);
        for (i, j, v) in self.entries() {
            out.set(i, j, v);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n, self.upper, self.lower);
        for (i, j, v) in self.entries() {
            out.set(j, i, v);
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// `self + diag(values)`.
    pub fn add_diagonal(&self, values: &[f64]) -> Self {
        assert_eq!(values.len(), self.n);
        let mut out = self.clone();
        let d = self.lower * self.n;
        for (slot, v) in out.data[d..d + self.n].iter_mut().zip(values) {
            *slot += v;
        }
        out
    }

    /// `self + shift·I`.
    pub fn shift(&self, shift: f64) -> Self {
        let mut out = self.clone();
        let d = self.lower * self.n;
        for slot in &mut out.data[d..d + self.n] {
            *slot += shift;
        }
        out
    }

    fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let a = self.with_band(other.lower, other.upper);
        let b = other.with_band(self.lower, self.upper);
        Self {
            data: a.data.iter().zip(&b.data).map(|(x, y)| op(*x, *y)).collect(),
            ..a
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n as isize;
        let mut out = Self::zeros(self.n, self.lower + other.lower, self.upper + other.upper);
        for i in 0..n {
            for a in -(self.lower as isize)..=self.upper as isize {
                let k = i + a;
                if k < 0 || k >= n {
                    continue;
                }
                let left = self.data[(a + self.lower as isize) as usize * self.n + i as usize];
                if left == 0.0 {
                    continue;
                }
                for b in -(other.lower as isize)..=other.upper as isize {
                    let j = k + b;
                    if j < 0 || j >= n {
                        continue;
                    }
                    let right = other.data[(b + other.lower as isize) as usize * other.n + k as usize];
                    let d = (a + b + out.lower as isize) as usize;
                    out.data[d * out.n + i as usize] += left * right;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        let n = self.n as isize;
        let mut y = vec![0.0; self.n];
        for k in -(self.lower as isize)..=self.upper as isize {
            let diag = &self.data[(k + self.lower as isize) as usize * self.n..][..self.n];
            let start = (-k).max(0);
            let end = (n - k).min(n);
            for i in start..end {
                y[i as usize] += diag[i as usize] * x[(i + k) as usize];
            }
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|(_, _, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().fold(0.0, |acc, (_, _, v)| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Exact (bitwise) symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(i, j, v)| v == self.get(j, i))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (i, j, v) in self.entries() {
            out[i][j] = v;
        }
        out
    }
}

impl Add for &BandMatrix {
    type Output = BandMatrix;

    fn add(self, rhs: &BandMatrix) -> BandMatrix {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &BandMatrix {
    type Output = BandMatrix;

    fn sub(self, rhs: &BandMatrix) -> BandMatrix {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Mul for &BandMatrix {
    type Output = BandMatrix;

    fn mul(self, rhs: &BandMatrix) -> BandMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &BandMatrix {
    type Output = BandMatrix;

    fn neg(self) -> BandMatrix {
        self.scale(-1.0)
    }
}
