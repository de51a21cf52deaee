use std::sync::Arc;

use crate::band::BandMatrix;
use crate::catalog::{kappa, BoundStates, ParamValue, SuperpotentialFamily};
use crate::error::{Error, Result};
use crate::factorization::build_a;
use crate::grid::Grid;
use crate::spectrum::{orbit, ParameterOrbit};

use super::block::BlockOperator;

/// The 2N-sector model: N partnerships of centrally extended supersymmetric
/// quantum mechanics chained together by the shift operator `S`.
///
/// Sector `j` (one-based) carries `A_j = A(g_j)` from the parameter orbit.
/// Sector Hamiltonians are `H_j = A_j†A_j + b_j` for `j < 2N` and
/// `H_2N = A_{2N−1}A_{2N−1}† + b_{2N−1}`, so `H = S†S + B` holds on the grid
/// to rounding. Conjugation by the parameter-shift unitary is realized by
/// building each block at the shifted parameter.
#[derive(Debug, Clone)]
pub struct MultiSectorModel {
    family: Arc<dyn SuperpotentialFamily>,
    g1: ParamValue,
    partnerships: usize,
    grid: Grid,
    orbit: ParameterOrbit,
    etas: Vec<f64>,
    central_charges: Vec<f64>,
    b: Vec<f64>,
    factors: Vec<BandMatrix>,
    sector_hamiltonians: Vec<BandMatrix>,
}

/// Shape-invariant model with `b₁ = 2η₁²` and `b_{j+1} = b_j + κ(g_j)`; the
/// later η values follow from `2η_j² = b_{2j−1}`.
pub fn build_model(
    family: Arc<dyn SuperpotentialFamily>,
    g1: &ParamValue,
    partnerships: usize,
    grid: &Grid,
    eta1: f64,
) -> Result<MultiSectorModel> {
    check_partnerships(partnerships)?;
    if !eta1.is_finite() {
        return Err(Error::InvalidModel(format!("eta1 must be finite, got {eta1}")));
    }
    let orbit = orbit(family.as_ref(), g1, 2 * partnerships - 1)?;
    let mut b = Vec::with_capacity(2 * partnerships - 1);
    b.push(2.0 * eta1 * eta1);
    for g in &orbit.points()[..orbit.len() - 1] {
        let next = b[b.len() - 1] + kappa(family.as_ref(), g)?;
        b.push(next);
    }
    let central_charges: Vec<f64> = (0..partnerships).map(|p| b[2 * p]).collect();
    let etas = (0..partnerships)
        .map(|p| if p == 0 { eta1 } else { (central_charges[p] / 2.0).sqrt() })
        .collect();
    Ok(MultiSectorModel::assemble(family, g1.clone(), partnerships, *grid, orbit, etas, central_charges, b))
}

/// Model with every η prescribed. Within a partnership the offsets still
/// follow `b_{2j} = b_{2j−1} + κ(g_{2j−1})`, but nothing ties one partnership
/// to the next, so the cross-partnership alignment is generally lost.
pub fn build_model_with_etas(
    family: Arc<dyn SuperpotentialFamily>,
    g1: &ParamValue,
    grid: &Grid,
    etas: &[f64],
) -> Result<MultiSectorModel> {
    let partnerships = etas.len();
    check_partnerships(partnerships)?;
    if etas.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidModel(format!("eta values must be finite, got {etas:?}")));
    }
    let orbit = orbit(family.as_ref(), g1, 2 * partnerships - 1)?;
    let central_charges: Vec<f64> = etas.iter().map(|e| 2.0 * e * e).collect();
    let mut b = Vec::with_capacity(2 * partnerships - 1);
    for (p, &z) in central_charges.iter().enumerate() {
        b.push(z);
        if 2 * p + 1 < orbit.len() {
            b.push(z + kappa(family.as_ref(), &orbit.points()[2 * p])?);
        }
    }
    Ok(MultiSectorModel::assemble(
        family,
        g1.clone(),
        partnerships,
        *grid,
        orbit,
        etas.to_vec(),
        central_charges,
        b,
    ))
}

/// Validates a total sector count and converts it to partnerships.
pub fn partnerships_for_sectors(sectors: usize) -> Result<usize> {
    if sectors == 0 || sectors % 2 == 1 {
        return Err(Error::InvalidModel(format!(
            "sector count must be a positive even number, got {sectors}"
        )));
    }
    Ok(sectors / 2)
}

fn check_partnerships(partnerships: usize) -> Result<()> {
    if partnerships == 0 {
        return Err(Error::InvalidModel("need at least one partnership".into()));
    }
    Ok(())
}

impl MultiSectorModel {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        family: Arc<dyn SuperpotentialFamily>,
        g1: ParamValue,
        partnerships: usize,
        grid: Grid,
        orbit: ParameterOrbit,
        etas: Vec<f64>,
        central_charges: Vec<f64>,
        b: Vec<f64>,
    ) -> Self {
        let factors: Vec<BandMatrix> = orbit
            .points()
            .iter()
            .map(|g| build_a(family.as_ref(), g, &grid).into_matrix())
            .collect();
        let mut sector_hamiltonians: Vec<BandMatrix> = factors
            .iter()
            .zip(&b)
            .map(|(a, &offset)| a.transpose().matmul(a).shift(offset))
            .collect();
        let last = &factors[factors.len() - 1];
        sector_hamiltonians.push(last.matmul(&last.transpose()).shift(b[b.len() - 1]));
        Self {
            family,
            g1,
            partnerships,
            grid,
            orbit,
            etas,
            central_charges,
            b,
            factors,
            sector_hamiltonians,
        }
    }

    /// Same model on a grid with half the spacing.
    pub fn refined(&self) -> Self {
        Self::assemble(
            self.family.clone(),
            self.g1.clone(),
            self.partnerships,
            self.grid.refined(),
            self.orbit.clone(),
            self.etas.clone(),
            self.central_charges.clone(),
            self.b.clone(),
        )
    }

    pub fn family(&self) -> &dyn SuperpotentialFamily {
        self.family.as_ref()
    }

    pub fn g1(&self) -> &ParamValue {
        &self.g1
    }

    pub fn partnerships(&self) -> usize {
        self.partnerships
    }

    pub fn sectors(&self) -> usize {
        2 * self.partnerships
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `g₁ … g_{2N−1}`, the parameters that appear in the sector blocks.
    pub fn orbit(&self) -> &ParameterOrbit {
        &self.orbit
    }

    /// `η_j`, one per partnership.
    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    /// `2η_j²`, one per partnership.
    pub fn central_charges(&self) -> &[f64] {
        &self.central_charges
    }

    /// Bogomol'nyi constants `b₁ … b_{2N−1}`.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Parameter of one-based sector `j` (`g_{2N−1}` for the last sector).
    pub fn sector_parameter(&self, sector: usize) -> &ParamValue {
        let index = (sector - 1).min(self.orbit.len() - 1);
        &self.orbit.points()[index]
    }

    /// One-based partnership index of a one-based sector.
    pub fn partnership_of(&self, sector: usize) -> usize {
        sector.div_ceil(2)
    }

    /// `A(g_j)` for one-based `j < 2N`.
    pub fn factor(&self, j: usize) -> &BandMatrix {
        &self.factors[j - 1]
    }

    pub fn sector_hamiltonian(&self, sector: usize) -> &BandMatrix {
        &self.sector_hamiltonians[sector - 1]
    }

    /// Analytic potential of one-based `sector`, for the finite-difference
    /// oracle.
    pub fn sector_potential(&self, sector: usize, x: f64) -> f64 {
        let g = self.sector_parameter(sector);
        let w = self.family.superpotential(x, g);
        let dw = self.family.superpotential_derivative(x, g);
        if sector == self.sectors() {
            w * w + dw + self.b[self.b.len() - 1]
        } else {
            w * w - dw + self.b[sector - 1]
        }
    }

    /// Number of bound levels of one-based `sector` according to the family.
    pub fn sector_bound_states(&self, sector: usize) -> BoundStates {
        let count = self.family.bound_state_count(self.sector_parameter(sector));
        match count {
            BoundStates::Finite(k) if sector == self.sectors() => BoundStates::Finite(k.saturating_sub(1)),
            other => other,
        }
    }

    fn dim(&self) -> usize {
        self.grid.len()
    }

    /// Shift-form Hamiltonian `diag(H_1, …, H_2N)`.
    pub fn hamiltonian(&self) -> BlockOperator {
        BlockOperator::block_diagonal(self.sector_hamiltonians.clone())
    }

    /// Hamiltonian of the concatenated two-sector superalgebras:
    /// `diag(A₁†A₁ + 2η₁², A₁A₁† + 2η₁², A₃†A₃ + 2η₃², …)`.
    pub fn superalgebra_hamiltonian(&self) -> BlockOperator {
        let mut blocks = Vec::with_capacity(self.sectors());
        for (p, &z) in self.central_charges.iter().enumerate() {
            let a = &self.factors[2 * p];
            blocks.push(a.transpose().matmul(a).shift(z));
            blocks.push(a.matmul(&a.transpose()).shift(z));
        }
        BlockOperator::block_diagonal(blocks)
    }

    /// `Γ = diag(+1, −1, +1, −1, …)`.
    pub fn gamma(&self) -> BlockOperator {
        let signs: Vec<f64> = (0..self.sectors())
            .map(|s| if s % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        BlockOperator::scalar_diagonal(&signs, self.dim())
    }

    /// Supercharge with partnership blocks `[[−η, 0], [A, η]]`.
    pub fn q(&self) -> BlockOperator {
        let n = self.dim();
        let mut q = BlockOperator::zeros(self.sectors(), n);
        for (p, &eta) in self.etas.iter().enumerate() {
            q.insert(2 * p, 2 * p, BandMatrix::identity(n).scale(-eta));
            q.insert(2 * p + 1, 2 * p + 1, BandMatrix::identity(n).scale(eta));
            q.insert(2 * p + 1, 2 * p, self.factors[2 * p].clone());
        }
        q
    }

    pub fn q_dagger(&self) -> BlockOperator {
        self.q().transpose()
    }

    /// Partnership blocks `[[0, 0], [A, 0]]`.
    pub fn q_tilde(&self) -> BlockOperator {
        let mut q = BlockOperator::zeros(self.sectors(), self.dim());
        for p in 0..self.partnerships {
            q.insert(2 * p + 1, 2 * p, self.factors[2 * p].clone());
        }
        q
    }

    pub fn q_tilde_dagger(&self) -> BlockOperator {
        self.q_tilde().transpose()
    }

    /// Central charge, `2η_j²` on both sectors of partnership `j`.
    pub fn central_charge(&self) -> BlockOperator {
        let values: Vec<f64> = self
            .central_charges
            .iter()
            .flat_map(|&z| [z, z])
            .collect();
        BlockOperator::scalar_diagonal(&values, self.dim())
    }

    /// Block sub-diagonal shift operator with blocks `A(g₁), …, A(g_{2N−1})`.
    pub fn shift_operator(&self) -> BlockOperator {
        let mut s = BlockOperator::zeros(self.sectors(), self.dim());
        for (j, a) in self.factors.iter().enumerate() {
            s.insert(j + 1, j, a.clone());
        }
        s
    }

    /// `B = diag(b₁, …, b_{2N−1}, H_2N)`.
    pub fn bps_matrix(&self) -> BlockOperator {
        let n = self.dim();
        let mut blocks: Vec<BandMatrix> = self.b.iter().map(|&b| BandMatrix::identity(n).scale(b)).collect();
        blocks.push(self.sector_hamiltonians[self.sectors() - 1].clone());
        BlockOperator::block_diagonal(blocks)
    }

    /// `⟨ψ, H_j ψ⟩` for a normalized grid state in one-based `sector`.
    pub fn sector_expectation(&self, sector: usize, psi: &[f64]) -> f64 {
        let h = self.sector_hamiltonian(sector).matvec(psi);
        self.grid.inner(psi, &h)
    }
}
