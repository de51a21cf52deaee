//! Sector-block operators: a `2N × 2N` array of banded grid operators, with
//! absent blocks meaning zero.

use std::collections::BTreeMap;

use crate::band::BandMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    sectors: usize,
    dim: usize,
    blocks: BTreeMap<(usize, usize), BandMatrix>,
}

impl BlockOperator {
    pub fn zeros(sectors: usize, dim: usize) -> Self {
        Self {
            sectors,
            dim,
            blocks: BTreeMap::new(),
        }
    }

    /// Block-diagonal operator with the given sector blocks.
    pub fn block_diagonal(blocks: Vec<BandMatrix>) -> Self {
        let dim = blocks.first().map_or(0, BandMatrix::dim);
        let mut op = Self::zeros(blocks.len(), dim);
        for (s, m) in blocks.into_iter().enumerate() {
            op.insert(s, s, m);
        }
        op
    }

    /// `diag(values[0]·I, values[1]·I, …)`.
    pub fn scalar_diagonal(values: &[f64], dim: usize) -> Self {
        Self::block_diagonal(values.iter().map(|&v| BandMatrix::identity(dim).scale(v)).collect())
    }

    pub fn sectors(&self) -> usize {
        self.sectors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Zero-based `(row, column)` sector indices.
    pub fn insert(&mut self, row: usize, col: usize, block: BandMatrix) {
        assert!(row < self.sectors && col < self.sectors, "block ({row}, {col}) out of range");
        assert_eq!(block.dim(), self.dim, "block dimension mismatch");
        self.blocks.insert((row, col), block);
    }

    pub fn block(&self, row: usize, col: usize) -> Option<&BandMatrix> {
        self.blocks.get(&(row, col))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &BandMatrix)> {
        self.blocks.iter()
    }

    pub fn transpose(&self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|(&(r, c), m)| ((c, r), m.transpose()))
                .collect(),
            ..*self
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|(&k, m)| (k, m.scale(factor))).collect(),
            ..*self
        }
    }

    fn check_shape(&self, other: &Self) {
        assert_eq!(self.sectors, other.sectors, "sector count mismatch");
        assert_eq!(self.dim, other.dim, "dimension mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_shape(other);
        let mut out = self.clone();
        for (&k, m) in &other.blocks {
            let sum = match out.blocks.get(&k) {
                Some(existing) => existing + m,
                None => m.clone(),
            };
            out.blocks.insert(k, sum);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        self.check_shape(other);
        let mut out = Self::zeros(self.sectors, self.dim);
        for (&(i, k), left) in &self.blocks {
            for (&(k2, j), right) in other.blocks.range((k, 0)..(k + 1, 0)) {
                debug_assert_eq!(k, k2);
                let product = left.matmul(right);
                let sum = match out.blocks.get(&(i, j)) {
                    Some(existing) => existing + &product,
                    None => product,
                };
                out.blocks.insert((i, j), sum);
            }
        }
        out
    }

    /// `XY + YX`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self))
    }

    /// `XY − YX`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn pow(&self, exponent: u32) -> Self {
        assert!(exponent >= 1);
        let mut out = self.clone();
        for _ in 1..exponent {
            out = out.matmul(self);
        }
        out
    }

    pub fn apply(&self, v: &[Vec<f64>]) -> Vec<Vec<f64>> {
        assert_eq!(v.len(), self.sectors, "sector count mismatch");
        let mut out = vec![vec![0.0; self.dim]; self.sectors];
        for (&(r, c), m) in &self.blocks {
            for (o, x) in out[r].iter_mut().zip(m.matvec(&v[c])) {
                *o += x;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .values()
            .map(|m| m.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.values().fold(0.0, |acc, m| acc.max(m.max_abs()))
    }
}
