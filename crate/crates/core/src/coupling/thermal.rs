use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Planck constant, J s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Depth of the dipole trap holding the atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapDepth<T> {
    /// `U / k_B` in kelvin.
    Kelvin(T),
    /// `U / h` in hertz.
    Hertz(T),
}

impl<T: Real> TrapDepth<T> {
    /// Depth expressed as an equivalent temperature `U / k_B`.
    pub fn kelvin(self) -> T {
        match self {
            TrapDepth::Kelvin(t) => t,
            TrapDepth::Hertz(f) => f * T::lit(PLANCK / BOLTZMANN),
        }
    }
}

/// Overlap `|J| = 1 - (k_B T / U)^2` left by thermal motion in a trap that
/// shares the probe's spatial mode.
pub fn thermal_overlap<T: Real>(temperature: T, depth: TrapDepth<T>) -> Result<T> {
    let u = depth.kelvin();
    if !(u > T::zero()) {
        return Err(Error::InvalidArgument(format!("trap depth must be > 0, got {u} K")));
    }
    if !(temperature >= T::zero()) {
        return Err(Error::InvalidArgument(format!("temperature must be >= 0, got {temperature} K")));
    }
    let ratio = temperature / u;
    if ratio >= T::one() {
        return Err(Error::OutsideValidity(format!(
            "k_B T / U = {ratio} >= 1: atoms are not trapped deeply enough for the quadratic estimate"
        )));
    }
    Ok(T::one() - ratio * ratio)
}

/// Highest temperature (kelvin) compatible with Heisenberg scaling,
/// `U / (k_B sqrt(N))`.
pub fn required_temperature<T: Real>(depth: TrapDepth<T>, n_atoms: T) -> Result<T> {
    let u = depth.kelvin();
    if !(u > T::zero()) {
        return Err(Error::InvalidArgument(format!("trap depth must be > 0, got {u} K")));
    }
    if !(n_atoms >= T::one()) {
        return Err(Error::InvalidArgument(format!("need N >= 1 atoms, got {n_atoms}")));
    }
    Ok(u / n_atoms.sqrt())
}
