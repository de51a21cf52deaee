//! Shape-invariant superpotential families.
//!
//! A family is described by its superpotential `W(x; g)`, where the
//! first-order operator is `A(g) = d/dx + W(x; g)`. With that convention the
//! partner Hamiltonians are
//!
//! ```text
//! A†A = -d²/dx² + W² - W'      AA† = -d²/dx² + W² + W'
//! ```
//!
//! and shape invariance, `A(g)A†(g) = A†(f(g))A(f(g)) + c(f(g))`, reduces to a
//! pointwise identity between superpotentials which can be checked without
//! any discretization error.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensionless coupling(s) of a family. The owning family fixes the arity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamValue(Vec<f64>);

impl ParamValue {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteParameter(values));
        }
        Ok(Self(values))
    }

    pub fn scalar(value: f64) -> Self {
        assert!(value.is_finite(), "parameter must be finite");
        Self(vec![value])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// First component; every shipped family has arity one.
    pub fn first(&self) -> f64 {
        self.0[0]
    }
}

impl From<f64> for ParamValue {
    fn from(value: f64) -> Self {
        Self::scalar(value)
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [g] => write!(f, "{g}"),
            values => write!(f, "{values:?}"),
        }
    }
}

/// Physical domain of the superpotential; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub min: f64,
    pub max: f64,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain {
        min: f64::NEG_INFINITY,
        max: f64::INFINITY,
    };

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStates {
    Finite(usize),
    Unbounded,
}

impl BoundStates {
    /// Clamp a requested number of levels to what the family supports.
    pub fn cap(self, requested: usize) -> usize {
        match self {
            BoundStates::Finite(count) => requested.min(count),
            BoundStates::Unbounded => requested,
        }
    }

    pub fn allows(self, level: usize) -> bool {
        match self {
            BoundStates::Finite(count) => level <= count,
            BoundStates::Unbounded => true,
        }
    }
}

/// A solvable family `W(x; g)` together with its parameter map `f` and
/// remainder `c`.
///
/// Implementations are immutable value objects; every method is a pure
/// function of its arguments.
pub trait SuperpotentialFamily: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;

    fn param_arity(&self) -> usize {
        1
    }

    fn domain(&self) -> Domain {
        Domain::REAL_LINE
    }

    /// `W(x; g)`.
    fn superpotential(&self, x: f64, g: &ParamValue) -> f64;

    /// Analytic `∂W/∂x`. Numerical differentiation is never used in its place.
    fn superpotential_derivative(&self, x: f64, g: &ParamValue) -> f64;

    /// The map `f: g₁ → g₂`.
    fn parameter_map(&self, g: &ParamValue) -> ParamValue;

    /// The remainder `c(g)`. The convention `c(g₁) = 0` is applied by the
    /// spectrum engine, not here.
    fn remainder(&self, g: &ParamValue) -> f64;

    /// `∫ W dx`, when a closed form exists.
    fn antiderivative(&self, _x: f64, _g: &ParamValue) -> Option<f64> {
        None
    }

    fn bound_state_count(&self, g: &ParamValue) -> BoundStates;

    /// Whether `g` lies in the parameter set for which the family still has a
    /// bound sector.
    fn is_admissible(&self, g: &ParamValue) -> bool;

    /// Closed-form level energies, used only as a test fixture.
    fn closed_form_energy(&self, _n: usize, _g: &ParamValue) -> Option<f64> {
        None
    }

    /// Human-readable description of `f` and `c`.
    fn parameter_map_description(&self) -> String;

    fn check_arity(&self, g: &ParamValue) -> Result<()> {
        if g.arity() != self.param_arity() {
            return Err(Error::ArityMismatch {
                family: self.name().to_string(),
                expected: self.param_arity(),
                got: g.arity(),
            });
        }
        Ok(())
    }
}

/// `W(x; g) = g tanh(x)`, `f(g) = g − 1`, `c(g) = 2g + 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PoschlTeller;

impl SuperpotentialFamily for PoschlTeller {
    fn name(&self) -> &str {
        "poschl_teller"
    }

    fn superpotential(&self, x: f64, g: &ParamValue) -> f64 {
        g.first() * x.tanh()
    }

    fn superpotential_derivative(&self, x: f64, g: &ParamValue) -> f64 {
        let sech = 1.0 / x.cosh();
        g.first() * sech * sech
    }

    fn parameter_map(&self, g: &ParamValue) -> ParamValue {
        ParamValue::scalar(g.first() - 1.0)
    }

    fn remainder(&self, g: &ParamValue) -> f64 {
        2.0 * g.first() + 1.0
    }

    fn antiderivative(&self, x: f64, g: &ParamValue) -> Option<f64> {
        // ln cosh(x) without overflow for large |x|
        let ax = x.abs();
        let ln_cosh = ax + (-2.0 * ax).exp().ln_1p() - std::f64::consts::LN_2;
        Some(g.first() * ln_cosh)
    }

    fn bound_state_count(&self, g: &ParamValue) -> BoundStates {
        // largest n with g - n + 1 > 0
        let g = g.first();
        if g <= 0.0 {
            return BoundStates::Finite(0);
        }
        let ceil = g.ceil();
        let count = if ceil == g { g } else { ceil };
        BoundStates::Finite(count as usize)
    }

    fn is_admissible(&self, g: &ParamValue) -> bool {
        g.first() > 0.0
    }

    fn closed_form_energy(&self, n: usize, g: &ParamValue) -> Option<f64> {
        let g = g.first();
        let k = g - n as f64 + 1.0;
        Some(g * g - k * k)
    }

    fn parameter_map_description(&self) -> String {
        "W(x;g) = g tanh(x); f(g) = g - 1; c(g) = 2g + 1".to_string()
    }
}

/// `W(x; ω) = ωx`, `f(ω) = ω`, `c(ω) = 2ω`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Harmonic;

impl SuperpotentialFamily for Harmonic {
    fn name(&self) -> &str {
        "harmonic"
    }

    fn superpotential(&self, x: f64, g: &ParamValue) -> f64 {
        g.first() * x
    }

    fn superpotential_derivative(&self, _x: f64, g: &ParamValue) -> f64 {
        g.first()
    }

    fn parameter_map(&self, g: &ParamValue) -> ParamValue {
        g.clone()
    }

    fn remainder(&self, g: &ParamValue) -> f64 {
        2.0 * g.first()
    }

    fn antiderivative(&self, x: f64, g: &ParamValue) -> Option<f64> {
        Some(0.5 * g.first() * x * x)
    }

    fn bound_state_count(&self, g: &ParamValue) -> BoundStates {
        if g.first() > 0.0 {
            BoundStates::Unbounded
        } else {
            BoundStates::Finite(0)
        }
    }

    fn is_admissible(&self, g: &ParamValue) -> bool {
        g.first() > 0.0
    }

    fn closed_form_energy(&self, n: usize, g: &ParamValue) -> Option<f64> {
        Some(2.0 * g.first() * (n as f64 - 1.0))
    }

    fn parameter_map_description(&self) -> String {
        "W(x;w) = w x; f(w) = w; c(w) = 2w".to_string()
    }
}

/// Name-addressable registry of families. The built-ins are always present.
#[derive(Debug, Clone)]
pub struct Catalog {
    families: BTreeMap<String, Arc<dyn SuperpotentialFamily>>,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Catalog {
    pub fn builtin() -> Self {
        let mut catalog = Self {
            families: BTreeMap::new(),
        };
        catalog.register(Arc::new(PoschlTeller));
        catalog.register(Arc::new(Harmonic));
        catalog
    }

    /// Adds or replaces a family under its own name.
    pub fn register(&mut self, family: Arc<dyn SuperpotentialFamily>) {
        self.families.insert(family.name().to_string(), family);
    }

    pub fn lookup(&self, name: &str) -> Result<Arc<dyn SuperpotentialFamily>> {
        self.families
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownFamily(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn SuperpotentialFamily>> {
        self.families.values()
    }

    pub fn names(&self) -> Vec<&str> {
        self.families.keys().map(String::as_str).collect()
    }
}

/// Looks up a built-in family by name.
pub fn lookup(name: &str) -> Result<Arc<dyn SuperpotentialFamily>> {
    Catalog::builtin().lookup(name)
}

/// `κ(g) = c(f(g))`, the c-number commutator of the shifted operators.
pub fn kappa(family: &dyn SuperpotentialFamily, g: &ParamValue) -> Result<f64> {
    family.check_arity(g)?;
    Ok(family.remainder(&family.parameter_map(g)))
}

/// Maximum over `sample_points` of
/// `|W(x;g)² + W′(x;g) − W(x;f(g))² + W′(x;f(g)) − c(f(g))|`.
pub fn shape_invariance_residual(
    family: &dyn SuperpotentialFamily,
    g: &ParamValue,
    sample_points: &[f64],
) -> f64 {
    let next = family.parameter_map(g);
    let c_next = family.remainder(&next);
    sample_points
        .iter()
        .map(|&x| {
            let w = family.superpotential(x, g);
            let dw = family.superpotential_derivative(x, g);
            let w_next = family.superpotential(x, &next);
            let dw_next = family.superpotential_derivative(x, &next);
            ((w * w + dw) - (w_next * w_next - dw_next + c_next)).abs()
        })
        .fold(0.0, f64::max)
}
