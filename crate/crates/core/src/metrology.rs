//! Metrological gain when the readout mode differs from the preparation
//! mode.
//!
//! Gains are referenced to the Heisenberg-limited variance `Var = 1`: a
//! readout variance `Var` on total spin `S` scores `G = S / Var`, so a
//! perfect Heisenberg state read out in its own mode reaches `G = S`.
//!
//! Under a mode change the readout variance follows
//! [`mismatched_variance`] and the phase signal carried by the collective
//! spin is transmitted with amplitude `J`, so
//! `G = J^2 S / Var_out = 1 / [(1 - J^2)/(2 J^2) + Var_in / S]`.
//! For `Var_in >= 1` this never exceeds `1 / [(1 - J^2)/2 + 1/S]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mismatch::mismatched_variance;
use crate::scalar::Real;

/// Upper bound `1 / [(1 - J^2)/2 + 1/S]` on the gain of any squeezed state.
pub fn gain_bound<T: Real>(j: T, s: T) -> Result<T> {
    check(j, s)?;
    Ok(T::one() / ((T::one() - j * j) / T::lit(2.0) + T::one() / s))
}

fn check<T: Real>(j: T, s: T) -> Result<()> {
    if !(j.abs() <= T::one()) {
        return Err(Error::OverlapOutOfRange(j.f64()));
    }
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("total spin must be > 0, got {s}")));
    }
    Ok(())
}

/// Gain of a state with input variance `var_in` (spin units squared, at
/// least the Heisenberg floor 1) read out with overlap `J`.
pub fn gain<T: Real>(var_in: T, j: T, s: T) -> Result<T> {
    check(j, s)?;
    if !(var_in >= T::one()) {
        return Err(Error::InvalidArgument(format!(
            "input variance {var_in} is below the Heisenberg floor 1"
        )));
    }
    let out = mismatched_variance(var_in, j, s)?;
    Ok(j * j * s / out)
}

/// Input variance `S/2 * 10^(-dB/10)` of a state squeezed by `db` below the
/// coherent spin state.
pub fn squeezed_variance<T: Real>(db: T, s: T) -> T {
    s / T::lit(2.0) * T::lit(10.0).powf(-db / T::lit(10.0))
}

pub fn to_db<T: Real>(g: T) -> T {
    T::lit(10.0) * g.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingRegime {
    Heisenberg,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergAssessment<T> {
    pub regime: ScalingRegime,
    /// `Var / S^2 = 1/S^2 + (1 - J^2)/(2S)` for a Heisenberg-limited input.
    pub relative_variance: T,
    /// `1 - |J|` compared against `factor / N`.
    pub mismatch: T,
    pub threshold: T,
}

/// Default prefactor `c` in the Heisenberg criterion `1 - |J| < c / N`.
pub const HEISENBERG_FACTOR: f64 = 0.1;

/// Whether a Heisenberg-limited state survives a mode change of overlap `J`
/// on `n` spins of spin `spin`.
pub fn heisenberg_breakdown<T: Real>(n: T, j: T, spin: T, factor: T) -> Result<HeisenbergAssessment<T>> {
    if !(n >= T::one()) {
        return Err(Error::InvalidArgument(format!("need N >= 1, got {n}")));
    }
    let s = n * spin;
    check(j, s)?;
    let mismatch = T::one() - j.abs();
    let threshold = factor / n;
    let regime = if mismatch < threshold { ScalingRegime::Heisenberg } else { ScalingRegime::Standard };
    Ok(HeisenbergAssessment {
        regime,
        relative_variance: T::one() / (s * s) + (T::one() - j * j) / (T::lit(2.0) * s),
        mismatch,
        threshold,
    })
}

/// One curve of gain versus `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainCurve<T> {
    pub label: String,
    pub j: Vec<T>,
    pub gain: Vec<T>,
}

impl<T: Real> GainCurve<T> {
    pub fn gain_db(&self) -> Vec<T> {
        self.gain.iter().map(|&g| to_db(g)).collect()
    }
}

/// Gain curves for each input squeezing in `db_list`, followed by the bound.
pub fn gain_curves<T: Real>(db_list: &[T], s: T, j_grid: &[T]) -> Result<Vec<GainCurve<T>>> {
    if j_grid.is_empty() {
        return Err(Error::InvalidArgument("empty J grid".into()));
    }
    if let Some(bad) = j_grid.iter().find(|&&j| !(j > T::zero() && j <= T::one())) {
        return Err(Error::InvalidArgument(format!("J grid values must lie in (0, 1], got {bad}")));
    }
    let mut curves = Vec::with_capacity(db_list.len() + 1);
    for &db in db_list {
        let var = squeezed_variance(db, s);
        let gain = j_grid.iter().map(|&j| gain(var, j, s)).collect::<Result<Vec<_>>>()?;
        curves.push(GainCurve { label: format!("{db}dB"), j: j_grid.to_vec(), gain });
    }
    let bound = j_grid.iter().map(|&j| gain_bound(j, s)).collect::<Result<Vec<_>>>()?;
    curves.push(GainCurve { label: "bound".into(), j: j_grid.to_vec(), gain: bound });
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert!((gain_bound(1.0f64, 250.0).unwrap() - 250.0).abs() < 1e-12);
        assert!((gain_bound(0.9f64, 1e300).unwrap() - 1.0 / 0.095).abs() < 1e-12);
        assert!((gain_bound(0.0f64, 100.0).unwrap() - 1.0 / 0.51).abs() < 1e-12);
        assert!(gain_bound(1.1, 100.0).is_err());
        assert!(gain_bound(0.5, 0.0).is_err());
    }

    #[test]
    fn gain_examples() {
        assert!((gain(1.0f64, 1.0, 500.0).unwrap() - 500.0).abs() < 1e-12);
        assert!(gain(0.5, 1.0, 500.0).is_err());
        let var5 = squeezed_variance(5.0, 1000.0);
        let mut last = f64::INFINITY;
        for i in 0..=100 {
            let j = 1.0 - i as f64 * 0.009;
            let g = gain(var5, j, 1000.0).unwrap();
            assert!(g < last);
            last = g;
        }
        assert!((to_db(gain(var5, 1.0, 1000.0).unwrap()) - (5.0 + 10.0 * 2f64.log10())).abs() < 1e-12);
    }

    #[test]
    fn gain_matches_variance_route() {
        for &(var, j, s) in &[(1.0f64, 0.99, 1e3), (40.0, 0.7, 1e4), (3.0, 0.2, 50.0)] {
            let direct = 1.0 / ((1.0 - j * j) / (2.0 * j * j) + var / s);
            let routed = j * j * s / mismatched_variance(var, j, s).unwrap();
            assert!((gain(var, j, s).unwrap() - direct).abs() < 1e-12 * direct);
            assert!((routed - direct).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn heisenberg_regimes() {
        let n = 1e6;
        let a = heisenberg_breakdown(n, 1.0, 0.5, HEISENBERG_FACTOR).unwrap();
        assert_eq!(a.regime, ScalingRegime::Heisenberg);
        let s: f64 = n * 0.5;
        assert!((a.relative_variance - 1.0 / (s * s)).abs() < 1e-24);
        let b = heisenberg_breakdown(n, 1.0 - 10.0 / n, 0.5, HEISENBERG_FACTOR).unwrap();
        assert_eq!(b.regime, ScalingRegime::Standard);
        let mismatch_term = (1.0 - (1.0 - 10.0 / n).powi(2)) / (2.0 * s);
        assert!((mismatch_term - 10.0 / (n * s)).abs() < 1e-5 * mismatch_term);
        assert!(mismatch_term > 4.0 / (s * s));
        let c = heisenberg_breakdown(n, 1.0 - 0.01 / n, 0.5, HEISENBERG_FACTOR).unwrap();
        assert_eq!(c.regime, ScalingRegime::Heisenberg);
    }

    #[test]
    fn dataset_ordering_and_domination() {
        let j: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
        let curves = gain_curves(&[15.0, 10.0, 5.0], 1e4, &j).unwrap();
        assert_eq!(curves.len(), 4);
        assert_eq!(curves[3].label, "bound");
        let last = j.len() - 1;
        assert!(curves[0].gain[last] > curves[1].gain[last]);
        assert!(curves[1].gain[last] > curves[2].gain[last]);
        for c in &curves[..3] {
            for (g, b) in c.gain.iter().zip(&curves[3].gain) {
                assert!(g <= b);
            }
            assert!(c.gain.windows(2).all(|w| w[1] >= w[0]));
        }
        // deep in the mismatch-dominated regime the curves coincide
        let i = 19; // J = 0.1
        let spread = (curves[0].gain[i] - curves[2].gain[i]).abs() / curves[2].gain[i];
        assert!(spread < 0.01, "{spread}");
        assert!(gain_curves(&[5.0], 1e4, &[0.0, 0.5]).is_err());
    }

    #[test]
    fn bound_increasing_by_finite_differences() {
        let h = 1e-6;
        for i in 0..100 {
            let j = i as f64 / 100.0;
            for &s in &[10.0, 1e3, 1e6] {
                assert!(gain_bound(j + h, s).unwrap() > gain_bound(j, s).unwrap());
                assert!(gain_bound(j, s * (1.0 + 1e-3)).unwrap() > gain_bound(j, s).unwrap());
            }
        }
    }
}
