use serde::{Deserialize, Serialize};

use crate::catalog::BoundStates;
use crate::error::{Error, Result};
use crate::oracle::{build_tridiagonal, eigenvector, lowest_eigenvalues, TridiagonalMatrix};
use crate::spectrum::{ground_state, Wavefunction};

use super::model::MultiSectorModel;

/// Bisection width used for sector spectra.
const SECTOR_BISECTION_TOL: f64 = 1e-9;
/// Pre-normalization norm below which an `S†` image counts as annihilated.
pub const CHAIN_TERMINATION_NORM: f64 = 1e-6;

/// Ground state of a sector below the last, annihilated by `S` in the
/// continuum and saturating `H_j ≥ b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BpsState {
    /// One-based sector index.
    pub sector: usize,
    pub state: Wavefunction,
    /// `b_j`.
    pub energy: f64,
}

/// BPS states of sectors `1 … 2N−1`; the last sector has none.
pub fn bps_states(model: &MultiSectorModel) -> Result<Vec<BpsState>> {
    (1..model.sectors())
        .map(|sector| {
            Ok(BpsState {
                sector,
                state: ground_state(model.family(), model.sector_parameter(sector), model.grid())?,
                energy: model.b()[sector - 1],
            })
        })
        .collect()
}

/// Three-point finite-difference Hamiltonian of a sector's analytic
/// potential.
pub fn sector_oracle_matrix(model: &MultiSectorModel, sector: usize) -> TridiagonalMatrix {
    build_tridiagonal(|x| model.sector_potential(sector, x), model.grid())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainLink {
    pub sector: usize,
    pub state: Wavefunction,
    /// Norm of the `S†` image before normalization (1 for the starting state).
    pub pre_norm: f64,
}

/// State of `sector` at `level`: the BPS state for level 1 below the last
/// sector, otherwise the oracle eigenvector of the sector Hamiltonian.
pub fn sector_state(model: &MultiSectorModel, sector: usize, level: usize) -> Result<Wavefunction> {
    if sector == 0 || sector > model.sectors() {
        return Err(Error::InvalidModel(format!(
            "sector {sector} out of range 1..={}",
            model.sectors()
        )));
    }
    if level == 0 || level > model.grid().len() {
        return Err(Error::LevelOutOfRange {
            level,
            available: model.grid().len(),
        });
    }
    if level == 1 && sector < model.sectors() {
        return ground_state(model.family(), model.sector_parameter(sector), model.grid());
    }
    let t = sector_oracle_matrix(model, sector);
    let levels = lowest_eigenvalues(&t, level, SECTOR_BISECTION_TOL)?;
    let pair = eigenvector(&t, levels.entries[level - 1].energy)?;
    Ok(pair.wavefunction(model.grid()))
}

/// Repeatedly applies `S†` (sector `j` → `j − 1` through `A†(g_{j−1})`),
/// normalizing each image, until the image vanishes or leaves sector 1.
pub fn multiplet_chain(model: &MultiSectorModel, sector: usize, level: usize) -> Result<Vec<ChainLink>> {
    let start = sector_state(model, sector, level)?;
    let grid = *model.grid();
    let mut chain = vec![ChainLink {
        sector,
        state: start,
        pre_norm: 1.0,
    }];
    while let Some(link) = chain.last() {
        if link.sector == 1 {
            break;
        }
        let target = link.sector - 1;
        let image = model.factor(target).transpose().matvec(link.state.values());
        let pre_norm = grid.norm(&image);
        if pre_norm <= CHAIN_TERMINATION_NORM {
            break;
        }
        chain.push(ChainLink {
            sector: target,
            state: Wavefunction::new(image, grid),
            pre_norm,
        });
    }
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorLevels {
    pub sector: usize,
    pub partnership: usize,
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    WithinPartnership,
    CrossPartnership,
}

/// Whether level `n + 1` of `lower_sector` matches level `n` of
/// `upper_sector` for every level present in both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentFlag {
    pub lower_sector: usize,
    pub upper_sector: usize,
    pub kind: PairKind,
    pub compared: usize,
    pub max_difference: f64,
    pub aligned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyTable {
    pub tolerance: f64,
    pub sectors: Vec<SectorLevels>,
    pub alignment: Vec<AlignmentFlag>,
}

impl DegeneracyTable {
    pub fn all_aligned(&self) -> bool {
        self.alignment.iter().all(|a| a.aligned)
    }
}

/// Oracle bound levels of every sector (at most `levels_per_sector` each)
/// and the adjacent-sector alignment flags.
pub fn degeneracy_table(model: &MultiSectorModel, levels_per_sector: usize, tol: f64) -> Result<DegeneracyTable> {
    let mut sectors = Vec::with_capacity(model.sectors());
    for sector in 1..=model.sectors() {
        let count = match model.sector_bound_states(sector) {
            BoundStates::Finite(k) => k.min(levels_per_sector),
            BoundStates::Unbounded => levels_per_sector,
        }
        .min(model.grid().len());
        let t = sector_oracle_matrix(model, sector);
        let levels = lowest_eigenvalues(&t, count, SECTOR_BISECTION_TOL)?.energies();
        sectors.push(SectorLevels {
            sector,
            partnership: model.partnership_of(sector),
            levels,
        });
    }
    let alignment = sectors
        .windows(2)
        .map(|pair| {
            let (lower, upper) = (&pair[0], &pair[1]);
            let differences: Vec<f64> = lower
                .levels
                .iter()
                .skip(1)
                .zip(&upper.levels)
                .map(|(a, b)| (a - b).abs())
                .collect();
            let max_difference = differences.iter().copied().fold(0.0, f64::max);
            AlignmentFlag {
                lower_sector: lower.sector,
                upper_sector: upper.sector,
                kind: if lower.partnership == upper.partnership {
                    PairKind::WithinPartnership
                } else {
                    PairKind::CrossPartnership
                },
                compared: differences.len(),
                max_difference,
                aligned: max_difference <= tol,
            }
        })
        .collect();
    Ok(DegeneracyTable {
        tolerance: tol,
        sectors,
        alignment,
    })
}
