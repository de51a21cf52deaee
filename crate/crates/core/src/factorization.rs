//! Grid realizations of `A(g) = d/dx + W(x; g)`, its adjoint and the partner
//! Hamiltonians.
//!
//! `d/dx` is the central difference `(ψ_{i+1} − ψ_{i−1})/2h` with out-of-grid
//! neighbours set to zero. That matrix is exactly antisymmetric, so the
//! discrete `A†` is the plain transpose of `A` and identities built from
//! transposition hold to rounding.

use serde::{Deserialize, Serialize};

use crate::band::BandMatrix;
use crate::catalog::{ParamValue, SuperpotentialFamily};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    /// `A†A`
    AdaggerA,
    /// `AA†`
    AAdagger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HamiltonianMode {
    /// Literal matrix product of the discrete `A` and `A†`.
    Product,
    /// Three-point Laplacian plus `diag(W² ∓ W′)`.
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    matrix: BandMatrix,
    grid: Grid,
}

impl DiscreteOperator {
    pub fn new(matrix: BandMatrix, grid: Grid) -> Self {
        assert_eq!(matrix.dim(), grid.len(), "operator does not match grid");
        Self { matrix, grid }
    }

    pub fn matrix(&self) -> &BandMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> BandMatrix {
        self.matrix
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn bandwidth(&self) -> usize {
        self.matrix.bandwidth()
    }

    pub fn apply(&self, psi: &[f64]) -> Vec<f64> {
        self.matrix.matvec(psi)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.matrix.is_symmetric()
    }
}

/// Antisymmetric central-difference first derivative.
pub fn central_difference(grid: &Grid) -> BandMatrix {
    let n = grid.len();
    let half_inv_h = 0.5 / grid.spacing();
    let mut d = BandMatrix::zeros(n, 1, 1);
    for i in 0..n - 1 {
        d.set(i, i + 1, half_inv_h);
        d.set(i + 1, i, -half_inv_h);
    }
    d
}

/// Three-point `−d²/dx²`: `2/h²` on the diagonal, `−1/h²` off it.
pub fn negative_laplacian(grid: &Grid) -> BandMatrix {
    let n = grid.len();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let mut m = BandMatrix::zeros(n, 1, 1);
    for i in 0..n {
        m.set(i, i, 2.0 * inv_h2);
        if i + 1 < n {
            m.set(i, i + 1, -inv_h2);
            m.set(i + 1, i, -inv_h2);
        }
    }
    m
}

fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    grid.nodes().into_iter().map(f).collect()
}

/// `A(g) = D + diag(W(x_i; g))`.
pub fn build_a(family: &dyn SuperpotentialFamily, g: &ParamValue, grid: &Grid) -> DiscreteOperator {
    let w = sample(grid, |x| family.superpotential(x, g));
    DiscreteOperator::new(central_difference(grid).add_diagonal(&w), *grid)
}

/// Exact transpose.
pub fn adjoint(op: &DiscreteOperator) -> DiscreteOperator {
    DiscreteOperator::new(op.matrix.transpose(), op.grid)
}

/// Partner Hamiltonian `A†A` or `AA†`, either as the literal product of the
/// discrete factors or from the analytic potential `W² ∓ W′`.
pub fn hamiltonian(
    family: &dyn SuperpotentialFamily,
    g: &ParamValue,
    grid: &Grid,
    ordering: Ordering,
    mode: HamiltonianMode,
) -> DiscreteOperator {
    match mode {
        HamiltonianMode::Product => {
            let a = build_a(family, g, grid);
            let at = adjoint(&a);
            let m = match ordering {
                Ordering::AdaggerA => at.matrix.matmul(&a.matrix),
                Ordering::AAdagger => a.matrix.matmul(&at.matrix),
            };
            DiscreteOperator::new(m, *grid)
        }
        HamiltonianMode::Analytic => {
            let v = sample(grid, |x| partner_potential(family, g, ordering, x));
            DiscreteOperator::new(negative_laplacian(grid).add_diagonal(&v), *grid)
        }
    }
}

/// `W² − W′` for `A†A`, `W² + W′` for `AA†`.
pub fn partner_potential(
    family: &dyn SuperpotentialFamily,
    g: &ParamValue,
    ordering: Ordering,
    x: f64,
) -> f64 {
    let w = family.superpotential(x, g);
    let dw = family.superpotential_derivative(x, g);
    match ordering {
        Ordering::AdaggerA => w * w - dw,
        Ordering::AAdagger => w * w + dw,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Harmonic, PoschlTeller};
    use crate::grid::BOUNDARY_MARGIN;
    use proptest::prelude::*;

    fn pt_grid() -> Grid {
        Grid::new(-12.0, 12.0, 2401).unwrap()
    }

    fn gaussian(grid: &Grid, center: f64, width: f64) -> Vec<f64> {
        let v: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|x| (-((x - center) / width).powi(2) / 2.0).exp())
            .collect();
        let norm = grid.norm(&v);
        v.into_iter().map(|x| x / norm).collect()
    }

    #[test]
    fn zero_superpotential_gives_pure_difference() {
        let grid = Grid::new(-1.0, 1.0, 21).unwrap();
        let a = build_a(&PoschlTeller, &0.0.into(), &grid);
        assert_eq!(a.matrix().diagonal(0).iter().map(|v| v.abs()).sum::<f64>(), 0.0);
        let out = a.apply(&vec![1.0; grid.len()]);
        for v in &out[1..grid.len() - 1] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_samples_the_superpotential() {
        let grid = pt_grid();
        let a = build_a(&PoschlTeller, &3.0.into(), &grid);
        for (i, &d) in a.matrix().diagonal(0).iter().enumerate() {
            assert_eq!(d, 3.0 * grid.node(i).tanh());
        }
    }

    #[test]
    fn adjoint_structure() {
        let grid = Grid::new(-2.0, 2.0, 41).unwrap();
        let a = build_a(&PoschlTeller, &2.0.into(), &grid);
        let at = adjoint(&a);
        assert_eq!(at.matrix().diagonal(0), a.matrix().diagonal(0));
        let d = central_difference(&grid);
        for i in 0..grid.len() - 1 {
            assert_eq!(at.matrix().get(i, i + 1), -d.get(i, i + 1));
        }
        assert_eq!(adjoint(&at), a);
        let h = hamiltonian(&PoschlTeller, &2.0.into(), &grid, Ordering::AdaggerA, HamiltonianMode::Product);
        assert_eq!(adjoint(&h), h);
    }

    #[test]
    fn ground_state_is_annihilated_to_second_order() {
        let residual = |grid: Grid| {
            let a = build_a(&PoschlTeller, &3.0.into(), &grid);
            let psi: Vec<f64> = grid.nodes().iter().map(|x| x.cosh().powi(-3)).collect();
            grid.interior_sup(&a.apply(&psi), BOUNDARY_MARGIN)
        };
        let coarse = residual(pt_grid());
        let fine = residual(pt_grid().refined());
        assert!(coarse < 1e-3, "{coarse}");
        let ratio = coarse / fine;
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn analytic_potentials() {
        let grid = pt_grid();
        let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
        let g = ParamValue::scalar(3.0);
        let h1 = hamiltonian(&PoschlTeller, &g, &grid, Ordering::AdaggerA, HamiltonianMode::Analytic);
        let h2 = hamiltonian(&PoschlTeller, &g, &grid, Ordering::AAdagger, HamiltonianMode::Analytic);
        for i in 0..grid.len() {
            let sech2 = grid.node(i).cosh().powi(-2);
            assert!((h1.matrix().get(i, i) - 2.0 * inv_h2 - (9.0 - 12.0 * sech2)).abs() < 1e-9);
            assert!((h2.matrix().get(i, i) - 2.0 * inv_h2 - (9.0 - 6.0 * sech2)).abs() < 1e-9);
        }
        let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
        let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
        let h = hamiltonian(&Harmonic, &1.0.into(), &grid, Ordering::AdaggerA, HamiltonianMode::Analytic);
        for i in 0..grid.len() {
            let x = grid.node(i);
            assert!((h.matrix().get(i, i) - 2.0 * inv_h2 - (x * x - 1.0)).abs() < 1e-9);
        }
        assert!(h1.is_self_adjoint() && h2.is_self_adjoint() && h.is_self_adjoint());
    }

    #[test]
    fn product_and_analytic_modes_converge() {
        for ordering in [Ordering::AdaggerA, Ordering::AAdagger] {
            let gap = |grid: Grid| {
                let g = ParamValue::scalar(3.0);
                let p = hamiltonian(&PoschlTeller, &g, &grid, ordering, HamiltonianMode::Product);
                let a = hamiltonian(&PoschlTeller, &g, &grid, ordering, HamiltonianMode::Analytic);
                let v = gaussian(&grid, 0.3, 0.8);
                let diff: Vec<f64> = p.apply(&v).iter().zip(a.apply(&v)).map(|(x, y)| x - y).collect();
                grid.interior_sup(&diff, BOUNDARY_MARGIN)
            };
            let ratio = gap(pt_grid()) / gap(pt_grid().refined());
            assert!((3.2..=4.8).contains(&ratio), "{ordering:?} ratio {ratio}");
        }
    }

    #[test]
    fn product_mode_bandwidth() {
        let grid = Grid::new(-3.0, 3.0, 31).unwrap();
        let h = hamiltonian(&Harmonic, &1.0.into(), &grid, Ordering::AAdagger, HamiltonianMode::Product);
        assert_eq!(h.bandwidth(), 2);
        assert_eq!(build_a(&Harmonic, &1.0.into(), &grid).bandwidth(), 1);
    }

    proptest! {
        #[test]
        fn discrete_adjointness_is_exact(
            seed_a in prop::collection::vec(-1.0f64..1.0, 64),
            seed_b in prop::collection::vec(-1.0f64..1.0, 64),
            g in 0.5f64..6.0,
        ) {
            let grid = Grid::new(-5.0, 5.0, 64).unwrap();
            let a = build_a(&PoschlTeller, &g.into(), &grid);
            let at = adjoint(&a);
            let lhs: f64 = a.apply(&seed_a).iter().zip(&seed_b).map(|(x, y)| x * y).sum();
            let rhs: f64 = seed_a.iter().zip(at.apply(&seed_b)).map(|(x, y)| x * y).sum();
            let scale: f64 = a.apply(&seed_a).iter().zip(&seed_b).map(|(x, y)| (x * y).abs()).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * scale.max(1.0));
        }
    }
}
