use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `x_i = x_min + i·h`, `i = 0..n_points`, with
/// `h = (x_max − x_min)/(n_points − 1)`.
///
/// Operators built on the grid treat every node as an unknown and every
/// neighbour outside the grid as zero (hard walls one spacing beyond the
/// end nodes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite, got [{x_min}, {x_max}]"
            )));
        }
        if x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "x_max ({x_max}) must exceed x_min ({x_min})"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {n_points}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    /// Symmetric box `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Same box with the spacing halved; every coarse node is also a fine node.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * (self.n_points - 1) + 1,
            ..*self
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.x_min == -self.x_max
    }

    /// Index of the node closest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.spacing()).round();
        t.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// `Σ a_i b_i h`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.spacing()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.inner(a, a).sqrt()
    }

    /// Sup norm ignoring `margin` rows at each wall.
    pub fn interior_sup(&self, a: &[f64], margin: usize) -> f64 {
        let n = a.len();
        if n <= 2 * margin {
            return 0.0;
        }
        a[margin..n - margin]
            .iter()
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// Weighted L2 norm ignoring `margin` rows at each wall.
    pub fn interior_norm(&self, a: &[f64], margin: usize) -> f64 {
        let n = a.len();
        if n <= 2 * margin {
            return 0.0;
        }
        let s: f64 = a[margin..n - margin].iter().map(|v| v * v).sum();
        (s * self.spacing()).sqrt()
    }
}

/// Rows adjacent to each wall excluded from interior residual norms.
pub const BOUNDARY_MARGIN: usize = 2;
