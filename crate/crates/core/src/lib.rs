//! Shape-invariant supersymmetric quantum mechanics on a uniform grid.
//!
//! The crate is organised bottom-up:
//!
//! * [`catalog`] holds the solvable superpotential families and the
//!   pointwise shape-invariance check.
//! * [`grid`], [`band`] and [`factorization`] discretize the first-order
//!   operator `A = d/dx + W` and the partner Hamiltonians `A†A`, `AA†`.
//! * [`spectrum`] runs the shape-invariance recursion: parameter orbits,
//!   exact energies and stationary states built from products of `A†`.
//! * [`superalgebra`] assembles the 2N-sector centrally extended model with
//!   its shift operator and checks every algebraic identity numerically.
//! * [`oracle`] is an independent Sturm-bisection eigensolver for the
//!   three-point finite-difference Hamiltonian.

pub mod band;
pub mod catalog;
pub mod error;
pub mod factorization;
pub mod grid;
pub mod oracle;
pub mod spectrum;
pub mod superalgebra;

pub use catalog::{
    kappa, lookup, shape_invariance_residual, BoundStates, Catalog, Domain, Harmonic, ParamValue,
    PoschlTeller, SuperpotentialFamily,
};
pub use error::{Error, Result};
pub use factorization::{adjoint, build_a, hamiltonian, DiscreteOperator, HamiltonianMode, Ordering};
pub use grid::Grid;
pub use oracle::{
    build_tridiagonal, compare_spectra, eigenvector, lowest_eigenvalues, Eigenpair,
    SpectrumComparison, TridiagonalMatrix,
};
pub use spectrum::{
    excited_state, exact_energies, ground_state, orbit, Level, ParameterOrbit, Provenance,
    Spectrum, Wavefunction,
};
pub use superalgebra::{
    bps_states, build_model, build_model_with_etas, degeneracy_table, multiplet_chain,
    verify_superalgebra, AlgebraReport, BpsState, ChainLink, DegeneracyTable, IdentityCheck,
    IdentityClass, MultiSectorModel,
};
