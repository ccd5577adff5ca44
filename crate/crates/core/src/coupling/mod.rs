//! Per-atom coupling strengths, effective ensemble parameters and mode
//! overlaps.
//!
//! An atom `j` at position `r_j` couples to an optical mode with strength
//! `eta_j` in `[0, 1]` proportional to the local intensity. The ensemble then
//! behaves like `N_e = N <eta>^2 / <eta^2>` uniformly coupled atoms with
//! coupling `eta_eff = <eta^2> / <eta>`.

mod sample;
mod thermal;

pub use sample::{sample_couplings, sample_positions, AtomCloud, AxialExtent, CloudDistribution, ModeProfile};
pub use thermal::{
    required_temperature, thermal_overlap, TrapDepth, BOLTZMANN, PLANCK,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coupling strengths `eta_1 .. eta_N` of one optical mode, plus the
/// single-atom spin quantum number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingVector<T> {
    eta: Vec<T>,
    spin: T,
}

impl<T: Real> CouplingVector<T> {
    /// Spin-1/2 coupling vector.
    pub fn new(eta: Vec<T>) -> Result<Self> {
        Self::with_spin(eta, T::lit(0.5))
    }

    pub fn with_spin(eta: Vec<T>, spin: T) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidArgument("coupling vector needs N >= 1 atoms".into()));
        }
        if let Some(bad) = eta.iter().find(|e| !e.is_finite() || **e < T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "coupling entries must be finite and non-negative, got {bad}"
            )));
        }
        if eta.iter().all(|e| e.is_zero()) {
            return Err(Error::ZeroCoupling);
        }
        let two_s = (spin * T::lit(2.0)).round();
        if spin <= T::zero() || (spin * T::lit(2.0) - two_s).abs() > T::lit(1e-6) {
            return Err(Error::InvalidArgument(format!(
                "spin must be a positive half-integer, got {spin}"
            )));
        }
        Ok(Self { eta, spin })
    }

    /// All atoms coupled with strength 1.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![T::one(); n])
    }

    pub fn eta(&self) -> &[T] {
        &self.eta
    }

    pub fn spin(&self) -> T {
        self.spin
    }

    /// `2s` as an integer.
    pub fn two_s(&self) -> usize {
        (self.spin * T::lit(2.0)).round().to_usize().unwrap_or(1)
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn set_spin(mut self, spin: T) -> Result<Self> {
        self = Self::with_spin(std::mem::take(&mut self.eta), spin)?;
        Ok(self)
    }

    /// Unit-norm mode coefficients `f_j = eta_j / sqrt(sum eta^2)`.
    pub fn mode_coefficients(&self) -> Vec<T> {
        let norm = self.eta.iter().map(|&e| e * e).sum::<T>().sqrt();
        self.eta.iter().map(|&e| e / norm).collect()
    }
}

/// Effective scalars of a coupling vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams<T> {
    pub n_atoms: usize,
    pub mean_eta: T,
    pub mean_eta_sq: T,
    pub eta_eff: T,
    /// Effective atom number, kept real-valued.
    pub n_eff: T,
    /// Effective total spin `N_e s`.
    pub s_eff: T,
}

pub fn effective_params<T: Real>(cv: &CouplingVector<T>) -> Result<EffectiveParams<T>> {
    let n = T::from_usize_lossy(cv.len());
    let sum: T = cv.eta.iter().copied().sum();
    let sum_sq: T = cv.eta.iter().map(|&e| e * e).sum();
    if sum <= T::zero() {
        return Err(Error::ZeroCoupling);
    }
    let mean_eta = sum / n;
    let mean_eta_sq = sum_sq / n;
    let eta_eff = sum_sq / sum;
    // N <eta> / eta_eff, written to avoid the intermediate division
    let n_eff = sum * sum / sum_sq;
    Ok(EffectiveParams {
        n_atoms: cv.len(),
        mean_eta,
        mean_eta_sq,
        eta_eff,
        n_eff,
        s_eff: n_eff * cv.spin,
    })
}

/// Normalized overlap `J = sum eta_l xi_l / sqrt(sum eta^2 sum xi^2)` of two
/// couplings evaluated on the same atoms.
pub fn overlap_j<T: Real>(eta: &CouplingVector<T>, xi: &CouplingVector<T>) -> Result<T> {
    if eta.len() != xi.len() {
        return Err(Error::LengthMismatch { left: eta.len(), right: xi.len() });
    }
    let dot: T = eta.eta.iter().zip(&xi.eta).map(|(&a, &b)| a * b).sum();
    let na: T = eta.eta.iter().map(|&a| a * a).sum();
    let nb: T = xi.eta.iter().map(|&b| b * b).sum();
    if na.is_zero() || nb.is_zero() {
        return Err(Error::ZeroCoupling);
    }
    let j = dot / (na * nb).sqrt();
    // rounding can push a self-overlap a few ulps past 1
    Ok(j.min(T::one()).max(-T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_pair() {
        let cv = CouplingVector::<f64>::new(vec![1.0, 1.0]).unwrap();
        let p = effective_params(&cv).unwrap();
        assert_eq!(p.eta_eff, 1.0);
        assert_eq!(p.n_eff, 2.0);
        assert_eq!(p.s_eff, 1.0);
    }

    #[test]
    fn unequal_pair() {
        let cv = CouplingVector::<f64>::new(vec![1.0, 0.5]).unwrap();
        let p = effective_params(&cv).unwrap();
        assert!((p.mean_eta - 0.75).abs() < 1e-15);
        assert!((p.mean_eta_sq - 0.625).abs() < 1e-15);
        assert!((p.eta_eff - 5.0 / 6.0).abs() < 1e-15);
        assert!((p.n_eff - 1.8).abs() < 1e-15);
    }

    #[test]
    fn standing_wave_moments_give_two_thirds() {
        // any vector with <eta> = 1/2, <eta^2> = 3/8: half at 1/2 +- sqrt(1/8)
        let d = (1.0f64 / 8.0).sqrt();
        let cv = CouplingVector::<f64>::new(vec![0.5 + d, 0.5 - d, 0.5 + d, 0.5 - d]).unwrap();
        let p = effective_params(&cv).unwrap();
        assert!((p.mean_eta - 0.5).abs() < 1e-15);
        assert!((p.mean_eta_sq - 0.375).abs() < 1e-15);
        assert!((p.eta_eff - 0.75).abs() < 1e-15);
        assert!((p.n_eff - 4.0 * 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_vectors() {
        assert_eq!(CouplingVector::<f64>::new(vec![0.0, 0.0]), Err(Error::ZeroCoupling));
        assert!(CouplingVector::<f64>::new(vec![]).is_err());
        assert!(CouplingVector::<f64>::new(vec![1.0, f64::NAN]).is_err());
        assert!(CouplingVector::<f64>::new(vec![1.0, -0.1]).is_err());
        assert!(CouplingVector::<f64>::with_spin(vec![1.0], 0.3).is_err());
        assert!(CouplingVector::<f64>::with_spin(vec![1.0], 1.0).is_ok());
    }

    #[test]
    fn overlap_examples() {
        let a = CouplingVector::<f64>::new(vec![1.0, 0.5]).unwrap();
        let b = CouplingVector::<f64>::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(overlap_j(&a, &a).unwrap(), 1.0);
        let expect = 1.5 / (1.25f64 * 2.0).sqrt();
        assert!((overlap_j(&a, &b).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.9487).abs() < 1e-4);
        let c = CouplingVector::<f64>::new(vec![1.0, 0.5, 0.1]).unwrap();
        assert_eq!(overlap_j(&a, &c), Err(Error::LengthMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn generic_over_f32() {
        let cv = CouplingVector::<f32>::new(vec![1.0, 0.5]).unwrap();
        let p = effective_params(&cv).unwrap();
        assert!((p.n_eff - 1.8).abs() < 1e-6);
    }

    fn positive_vec() -> impl Strategy<Value = Vec<f64>> {
        (1usize..40).prop_flat_map(|n| prop::collection::vec(0.0f64..1.0, n))
            .prop_filter("nonzero", |v| v.iter().any(|&x| x > 1e-6))
    }

    proptest! {
        #[test]
        fn effective_atom_number_bounded(v in positive_vec()) {
            let cv = CouplingVector::new(v.clone()).unwrap();
            let p = effective_params(&cv).unwrap();
            prop_assert!(p.n_eff > 0.0);
            prop_assert!(p.n_eff <= v.len() as f64 * (1.0 + 1e-12));
            prop_assert!((p.n_eff - v.len() as f64 * p.mean_eta / p.eta_eff).abs() < 1e-9 * p.n_eff);
        }

        #[test]
        fn overlap_bounded_and_scale_invariant(
            (a, b) in (1usize..30).prop_flat_map(|n| (
                prop::collection::vec(0.01f64..1.0, n),
                prop::collection::vec(0.01f64..1.0, n),
            )),
            scale in 0.01f64..100.0,
        ) {
            let ca = CouplingVector::new(a.clone()).unwrap();
            let cb = CouplingVector::new(b).unwrap();
            let j = overlap_j(&ca, &cb).unwrap();
            prop_assert!(j.abs() <= 1.0);
            let scaled = CouplingVector::new(a.iter().map(|x| x * scale).collect()).unwrap();
            let js = overlap_j(&scaled, &cb).unwrap();
            prop_assert!((j - js).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_couplings_saturate_cauchy_schwarz() {
        let cv = CouplingVector::<f64>::new(vec![0.3, 0.0, 0.3, 0.3]).unwrap();
        let p = effective_params(&cv).unwrap();
        // equality counts only coupled atoms
        assert!((p.n_eff - 3.0).abs() < 1e-12);
        let cv = CouplingVector::<f64>::new(vec![0.7; 9]).unwrap();
        let p = effective_params(&cv).unwrap();
        assert!((p.n_eff - 9.0).abs() < 1e-12);
        assert!((p.eta_eff - 0.7).abs() < 1e-15);
    }
}
