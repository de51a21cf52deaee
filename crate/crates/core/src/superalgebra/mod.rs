//! The 2N-sector centrally extended model, its shift operator and the
//! identities tying them to shape invariance.
//!
//! Sectors are numbered from 1 in the public API. The grading is taken as
//! `Γ = diag(+1, −1, +1, −1, …)`, one sign per sector.

mod block;
mod model;
mod states;
mod verify;

pub use block::BlockOperator;
pub use model::{build_model, build_model_with_etas, partnerships_for_sectors, MultiSectorModel};
pub use states::{
    bps_states, degeneracy_table, multiplet_chain, sector_oracle_matrix, sector_state, AlignmentFlag,
    BpsState, ChainLink, DegeneracyTable, PairKind, SectorLevels, CHAIN_TERMINATION_NORM,
};
pub use verify::{
    verify_superalgebra, verify_with, AlgebraReport, IdentityCheck, IdentityClass, TestBumps,
    VerifyOptions, RATIO_WINDOW, STRUCTURAL_TOL,
};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::catalog::{Harmonic, PoschlTeller};
    use crate::error::Error;
    use crate::grid::Grid;
    use crate::spectrum::exact_energies;

    fn small_grid() -> Grid {
        Grid::new(-8.0, 8.0, 321).unwrap()
    }

    #[test]
    fn poschl_teller_constants() {
        let model = build_model(Arc::new(PoschlTeller), &3.0.into(), 2, &small_grid(), 0.0).unwrap();
        assert_eq!(model.b(), &[0.0, 5.0, 8.0]);
        assert_eq!(model.central_charges(), &[0.0, 8.0]);
        assert_eq!(model.etas()[1] * model.etas()[1] * 2.0, 8.0);
        let params: Vec<f64> = (1..=4).map(|j| model.sector_parameter(j).first()).collect();
        assert_eq!(params, vec![3.0, 2.0, 1.0, 1.0]);
    }

    #[test]
    fn harmonic_constants() {
        let model = build_model(Arc::new(Harmonic), &1.0.into(), 2, &small_grid(), 1.0).unwrap();
        assert_eq!(model.b(), &[2.0, 4.0, 6.0]);
        let z = model.central_charge();
        let diag: Vec<f64> = (0..4).map(|s| z.block(s, s).unwrap().get(0, 0)).collect();
        assert_eq!(diag, vec![2.0, 2.0, 6.0, 6.0]);

        let model = build_model(Arc::new(Harmonic), &1.0.into(), 3, &small_grid(), 1.0).unwrap();
        assert_eq!(model.central_charges(), &[2.0, 6.0, 10.0]);
    }

    #[test]
    fn offsets_are_the_exact_energies() {
        let model = build_model(Arc::new(PoschlTeller), &4.5.into(), 2, &small_grid(), 0.0).unwrap();
        let exact = exact_energies(&PoschlTeller, &4.5.into(), 3).unwrap().energies();
        let offsets: Vec<f64> = model.b().iter().map(|b| b - model.b()[0]).collect();
        assert_eq!(offsets, exact);
        for j in 0..2 {
            let kappa = crate::catalog::kappa(&PoschlTeller, &model.orbit().points()[j]).unwrap();
            assert_eq!(model.b()[j + 1] - model.b()[j], kappa);
        }
    }

    #[test]
    fn single_partnership_is_the_two_sector_model() {
        let grid = small_grid();
        let model = build_model(Arc::new(Harmonic), &1.0.into(), 1, &grid, 1.0).unwrap();
        assert_eq!(model.sectors(), 2);
        assert_eq!(model.b(), &[2.0]);
        let q = model.q();
        assert_eq!(q.block(0, 0).unwrap().get(3, 3), -1.0);
        assert_eq!(q.block(1, 1).unwrap().get(3, 3), 1.0);
        assert!(q.block(0, 1).is_none());
        let qq = q.anticommutator(&q);
        assert_eq!(qq.block(0, 0).unwrap().get(5, 5), 2.0);
        assert_eq!(qq.block(1, 1).unwrap().get(5, 5), 2.0);
        assert_eq!(qq.block(1, 0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn orbit_leaving_domain_is_reported() {
        let err = build_model(Arc::new(PoschlTeller), &2.0.into(), 2, &small_grid(), 0.0).unwrap_err();
        assert!(matches!(err, Error::ParameterDomainExit { .. }));
    }

    #[test]
    fn odd_sector_counts_rejected() {
        assert!(partnerships_for_sectors(3).is_err());
        assert!(partnerships_for_sectors(0).is_err());
        assert_eq!(partnerships_for_sectors(6).unwrap(), 3);
        assert!(build_model(Arc::new(Harmonic), &1.0.into(), 0, &small_grid(), 0.0).is_err());
    }

    #[test]
    fn shift_operator_is_nilpotent() {
        for n in 1..=3 {
            let model = build_model(Arc::new(Harmonic), &1.0.into(), n, &small_grid(), 0.0).unwrap();
            let s = model.shift_operator();
            assert_eq!(s.pow(2 * n as u32).frobenius_norm(), 0.0);
            assert!(s.pow(2 * n as u32 - 1).frobenius_norm() > 0.0);
        }
    }

    #[test]
    fn broken_etas_keep_partnerships_internal() {
        let model =
            build_model_with_etas(Arc::new(PoschlTeller), &3.0.into(), &small_grid(), &[0.0, 2.7]).unwrap();
        assert_eq!(model.b()[0], 0.0);
        assert_eq!(model.b()[1], 5.0);
        assert!((model.b()[2] - 2.0 * 2.7 * 2.7).abs() < 1e-12);
    }

    #[test]
    fn sector_states_validate_input() {
        let model = build_model(Arc::new(PoschlTeller), &3.0.into(), 1, &small_grid(), 0.0).unwrap();
        assert!(matches!(sector_state(&model, 3, 1), Err(Error::InvalidModel(_))));
        assert!(matches!(multiplet_chain(&model, 1, 0), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn sector_one_chain_is_the_state_itself() {
        let model = build_model(Arc::new(PoschlTeller), &3.0.into(), 2, &small_grid(), 0.0).unwrap();
        let chain = multiplet_chain(&model, 1, 1).unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain[0].sector, 1);
    }

    #[test]
    fn empty_comparisons_are_aligned() {
        let model = build_model(Arc::new(PoschlTeller), &1.0.into(), 1, &small_grid(), 0.0).unwrap();
        let table = degeneracy_table(&model, 3, 1e-3).unwrap();
        assert_eq!(table.sectors[1].levels.len(), 0);
        assert_eq!(table.alignment[0].compared, 0);
        assert!(table.all_aligned());
    }
}
