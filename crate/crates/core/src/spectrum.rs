//! The shape-invariance recursion: parameter orbits, exact energies and
//! stationary states.
//!
//! Energies follow `E_n(g₁) = Σ_{j=2}^{n} c(g_j)`, i.e. the sum over the orbit
//! with the first term forced to zero. States are built as
//! `ψ_n(g₁) = A†(g₁)⋯A†(g_{n−1}) ψ₁(g_n)` with the discrete `A†`.

use serde::{Deserialize, Serialize};

use crate::catalog::{ParamValue, SuperpotentialFamily};
use crate::error::{Error, Result};
use crate::factorization::{adjoint, build_a};
use crate::grid::{Grid, BOUNDARY_MARGIN};

/// Wall-to-peak ratio above which a ground-state profile is rejected.
pub const WALL_DECAY_LIMIT: f64 = 1e-6;
/// Magnitude (relative to the peak) below which components are ignored when
/// counting nodes.
pub const NODE_FLOOR: f64 = 1e-9;
/// Components below this magnitude are skipped when fixing the sign.
pub const SIGN_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterOrbit {
    points: Vec<ParamValue>,
    partial_sums: Vec<f64>,
}

impl ParameterOrbit {
    /// `g₁, g₂ = f(g₁), …`
    pub fn points(&self) -> &[ParamValue] {
        &self.points
    }

    /// Entry `n` (zero-based) is `Σ_{j=2}^{n+1} c(g_j)`.
    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// First `k` points of the orbit of `g1` under the family's parameter map.
pub fn orbit(family: &dyn SuperpotentialFamily, g1: &ParamValue, k: usize) -> Result<ParameterOrbit> {
    family.check_arity(g1)?;
    let mut points = Vec::with_capacity(k);
    let mut partial_sums = Vec::with_capacity(k);
    let mut g = g1.clone();
    let mut sum = 0.0;
    for step in 0..k {
        if !family.is_admissible(&g) {
            return Err(Error::ParameterDomainExit {
                family: family.name().to_string(),
                step: step + 1,
                value: g.values().to_vec(),
            });
        }
        if step > 0 {
            sum += family.remainder(&g);
        }
        partial_sums.push(sum);
        let next = family.parameter_map(&g);
        points.push(std::mem::replace(&mut g, next));
    }
    Ok(ParameterOrbit {
        points,
        partial_sums,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// One-based level index; `n = 1` is the ground state.
    pub n: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub entries: Vec<Level>,
    pub provenance: Provenance,
    /// Set when fewer levels than requested exist.
    pub truncated: bool,
}

impl Spectrum {
    pub fn from_energies(energies: &[f64], provenance: Provenance) -> Self {
        Self {
            entries: energies
                .iter()
                .enumerate()
                .map(|(i, &energy)| Level { n: i + 1, energy })
                .collect(),
            provenance,
            truncated: false,
        }
    }

    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|l| l.energy).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].energy < w[1].energy)
    }
}

/// Exact energies of the first `n_levels` levels. Requests beyond the
/// bound-state count are truncated and flagged.
pub fn exact_energies(
    family: &dyn SuperpotentialFamily,
    g1: &ParamValue,
    n_levels: usize,
) -> Result<Spectrum> {
    family.check_arity(g1)?;
    let available = family.bound_state_count(g1).cap(n_levels);
    let orbit = orbit(family, g1, available)?;
    let mut spectrum = Spectrum::from_energies(orbit.partial_sums(), Provenance::Exact);
    spectrum.truncated = available < n_levels;
    Ok(spectrum)
}

/// Real state vector on a grid, normalized so that `Σ ψ_i² h = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    values: Vec<f64>,
    grid: Grid,
}

impl Wavefunction {
    /// Normalizes `values` and applies the sign convention: the first
    /// component above [`SIGN_FLOOR`] in magnitude is positive.
    pub fn new(values: Vec<f64>, grid: Grid) -> Self {
        assert_eq!(values.len(), grid.len(), "state does not match grid");
        let norm = grid.norm(&values);
        let mut values: Vec<f64> = values.into_iter().map(|v| v / norm).collect();
        if values
            .iter()
            .find(|v| v.abs() > SIGN_FLOOR)
            .is_some_and(|v| *v < 0.0)
        {
            values.iter_mut().for_each(|v| *v = -*v);
        }
        Self { values, grid }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn norm(&self) -> f64 {
        self.grid.norm(&self.values)
    }

    pub fn overlap(&self, other: &Wavefunction) -> f64 {
        self.grid.inner(&self.values, &other.values)
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Interior sign changes, ignoring components below [`NODE_FLOOR`] of the
    /// peak.
    /// Interior sign changes, skipping the boundary margin and entries
    /// below `NODE_FLOOR` of the peak.
    pub fn node_count(&self) -> usize {
        let floor = NODE_FLOOR * self.peak();
        let n = self.values.len();
        let interior = &self.values[BOUNDARY_MARGIN.min(n)..n.saturating_sub(BOUNDARY_MARGIN).max(BOUNDARY_MARGIN.min(n))];
        let mut previous = 0.0f64;
        let mut nodes = 0;
        for &v in interior.iter().filter(|v| v.abs() > floor) {
            if previous != 0.0 && v.signum() != previous.signum() {
                nodes += 1;
            }
            previous = v;
        }
        nodes
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Normalized zero mode of `A(g)`, `ψ ∝ exp(−∫₀ˣ W dt)`.
pub fn ground_state(family: &dyn SuperpotentialFamily, g: &ParamValue, grid: &Grid) -> Result<Wavefunction> {
    family.check_arity(g)?;
    let nodes = grid.nodes();
    let exponent: Vec<f64> = match family.antiderivative(0.0, g) {
        Some(origin) => nodes
            .iter()
            .map(|&x| -(family.antiderivative(x, g).unwrap_or(f64::NAN) - origin))
            .collect(),
        None => {
            let w: Vec<f64> = nodes.iter().map(|&x| family.superpotential(x, g)).collect();
            negative_cumulative_trapezoid(&w, grid.spacing(), grid.nearest_index(0.0))
        }
    };
    let top = exponent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let profile: Vec<f64> = exponent.iter().map(|e| (e - top).exp()).collect();
    let psi = Wavefunction::new(profile, *grid);
    let last = grid.len() - 1;
    let ratio = psi.values[0].abs().max(psi.values[last].abs()) / psi.peak();
    if ratio.is_nan() || ratio > WALL_DECAY_LIMIT {
        return Err(Error::NonNormalizable {
            family: family.name().to_string(),
            value: g.values().to_vec(),
            ratio,
        });
    }
    Ok(psi)
}

/// `−∫_{x_ref}^{x_i} w dx` by the trapezoidal rule, accumulated outward from
/// `reference`.
fn negative_cumulative_trapezoid(w: &[f64], h: f64, reference: usize) -> Vec<f64> {
    let mut out = vec![0.0; w.len()];
    for i in reference + 1..w.len() {
        out[i] = out[i - 1] - 0.5 * h * (w[i - 1] + w[i]);
    }
    for i in (0..reference).rev() {
        out[i] = out[i + 1] + 0.5 * h * (w[i] + w[i + 1]);
    }
    out
}

/// Level `n` of `A†(g₁)A(g₁)`, built by applying the discrete `A†(g_j)`
/// factors right to left to the ground state at `g_n`.
pub fn excited_state(
    family: &dyn SuperpotentialFamily,
    g1: &ParamValue,
    n: usize,
    grid: &Grid,
) -> Result<Wavefunction> {
    family.check_arity(g1)?;
    let bound = family.bound_state_count(g1);
    if n == 0 || !bound.allows(n) {
        return Err(Error::LevelOutOfRange {
            level: n,
            available: bound.cap(n.saturating_sub(1)),
        });
    }
    if n == 1 {
        return ground_state(family, g1, grid);
    }
    let orbit = orbit(family, g1, n)?;
    let mut psi = ground_state(family, &orbit.points()[n - 1], grid)?.into_values();
    for g in orbit.points()[..n - 1].iter().rev() {
        psi = adjoint(&build_a(family, g, grid)).apply(&psi);
    }
    Ok(Wavefunction::new(psi, *grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{BoundStates, Harmonic, PoschlTeller};

    fn pt_grid() -> Grid {
        Grid::new(-12.0, 12.0, 2401).unwrap()
    }

    /// Poschl-Teller without a closed-form antiderivative, to exercise the
    /// quadrature path.
    #[derive(Debug)]
    struct NoAntiderivative;

    impl SuperpotentialFamily for NoAntiderivative {
        fn name(&self) -> &str {
            "pt_quadrature"
        }
        fn superpotential(&self, x: f64, g: &ParamValue) -> f64 {
            PoschlTeller.superpotential(x, g)
        }
        fn superpotential_derivative(&self, x: f64, g: &ParamValue) -> f64 {
            PoschlTeller.superpotential_derivative(x, g)
        }
        fn parameter_map(&self, g: &ParamValue) -> ParamValue {
            PoschlTeller.parameter_map(g)
        }
        fn remainder(&self, g: &ParamValue) -> f64 {
            PoschlTeller.remainder(g)
        }
        fn bound_state_count(&self, g: &ParamValue) -> BoundStates {
            PoschlTeller.bound_state_count(g)
        }
        fn is_admissible(&self, g: &ParamValue) -> bool {
            PoschlTeller.is_admissible(g)
        }
        fn parameter_map_description(&self) -> String {
            String::new()
        }
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&PoschlTeller, &3.0.into(), 3).unwrap();
        assert_eq!(o.points(), &[3.0.into(), 2.0.into(), 1.0.into()]);
        assert_eq!(o.partial_sums(), &[0.0, 5.0, 8.0]);

        let o = orbit(&Harmonic, &1.0.into(), 4).unwrap();
        assert_eq!(o.points(), &vec![ParamValue::scalar(1.0); 4][..]);
        assert_eq!(o.partial_sums(), &[0.0, 2.0, 4.0, 6.0]);

        let o = orbit(&PoschlTeller, &4.5.into(), 1).unwrap();
        assert_eq!(o.partial_sums(), &[0.0]);
    }

    #[test]
    fn orbit_leaving_the_domain() {
        let err = orbit(&PoschlTeller, &3.0.into(), 4).unwrap_err();
        assert!(matches!(err, Error::ParameterDomainExit { step: 4, .. }), "{err:?}");
    }

    #[test]
    fn exact_energy_examples() {
        assert_eq!(exact_energies(&PoschlTeller, &3.0.into(), 3).unwrap().energies(), vec![0.0, 5.0, 8.0]);
        assert_eq!(
            exact_energies(&Harmonic, &1.0.into(), 5).unwrap().energies(),
            vec![0.0, 2.0, 4.0, 6.0, 8.0]
        );
        let truncated = exact_energies(&PoschlTeller, &3.0.into(), 5).unwrap();
        assert!(truncated.truncated);
        assert_eq!(truncated.len(), 3);
        assert!(truncated.is_strictly_increasing());
        assert_eq!(exact_energies(&Harmonic, &2.5.into(), 1).unwrap().energies(), vec![0.0]);
    }

    #[test]
    fn ground_state_profiles() {
        let grid = pt_grid();
        let psi = ground_state(&PoschlTeller, &3.0.into(), &grid).unwrap();
        let reference = Wavefunction::new(grid.nodes().iter().map(|x| x.cosh().powi(-3)).collect(), grid);
        let gap = psi.values().iter().zip(reference.values()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        assert!(gap <= 1e-10, "{gap}");
        assert_eq!(psi.node_count(), 0);
        assert!((psi.norm() - 1.0).abs() < 1e-12);

        let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
        let psi = ground_state(&Harmonic, &1.0.into(), &grid).unwrap();
        let reference = Wavefunction::new(grid.nodes().iter().map(|x| (-x * x / 2.0).exp()).collect(), grid);
        assert!((psi.overlap(&reference) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_path_tracks_the_closed_form() {
        let gap = |grid: Grid| {
            let a = ground_state(&NoAntiderivative, &3.0.into(), &grid).unwrap();
            let b = ground_state(&PoschlTeller, &3.0.into(), &grid).unwrap();
            a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        };
        let coarse = gap(pt_grid());
        let fine = gap(pt_grid().refined());
        assert!(coarse < 1e-4, "{coarse}");
        assert!(coarse / fine > 3.2, "{}", coarse / fine);
    }

    #[test]
    fn growing_profile_is_not_normalizable() {
        let err = ground_state(&PoschlTeller, &(-1.0).into(), &pt_grid()).unwrap_err();
        assert!(matches!(err, Error::NonNormalizable { .. }));
        let err = ground_state(&NoAntiderivative, &(-1.0).into(), &pt_grid()).unwrap_err();
        assert!(matches!(err, Error::NonNormalizable { .. }));
    }

    #[test]
    fn sech_one_tail_fails_the_wall_check_on_a_short_box() {
        let err = ground_state(&PoschlTeller, &1.0.into(), &pt_grid()).unwrap_err();
        assert!(matches!(err, Error::NonNormalizable { .. }));
    }

    #[test]
    fn excited_states_have_the_right_nodes() {
        let grid = Grid::new(-20.0, 20.0, 4001).unwrap();
        for n in 1..=3 {
            let psi = excited_state(&PoschlTeller, &3.0.into(), n, &grid).unwrap();
            assert_eq!(psi.node_count(), n - 1);
        }
        let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
        let psi = excited_state(&Harmonic, &1.0.into(), 3, &grid).unwrap();
        assert_eq!(psi.node_count(), 2);
    }

    #[test]
    fn level_one_is_the_ground_state() {
        let grid = pt_grid();
        assert_eq!(
            excited_state(&PoschlTeller, &3.0.into(), 1, &grid).unwrap(),
            ground_state(&PoschlTeller, &3.0.into(), &grid).unwrap()
        );
    }

    #[test]
    fn level_out_of_range() {
        let err = excited_state(&PoschlTeller, &3.0.into(), 9, &pt_grid()).unwrap_err();
        assert_eq!(err, Error::LevelOutOfRange { level: 9, available: 3 });
        assert!(excited_state(&PoschlTeller, &3.0.into(), 0, &pt_grid()).is_err());
    }

    #[test]
    fn sign_convention() {
        let grid = Grid::new(-1.0, 1.0, 9).unwrap();
        let psi = Wavefunction::new(vec![0.0, 0.0, 0.0, -1.0, 2.0, 1.0, 0.0, 0.0, 0.0], grid);
        assert!(psi.values()[3] > 0.0);
        assert_eq!(psi.node_count(), 1);
    }
}
