//! Change of mode between state preparation (coupling `eta`) and readout
//! (coupling `xi`).
//!
//! With overlap `J`, the preparation-mode creation operator splits as
//! `a_eta^dag = J a_xi^dag + sqrt(1 - J^2) d_1^dag`, where `d_1` is orthogonal
//! to the readout mode and never observed. Each ladder quantum is therefore
//! kept with amplitude `J` or lost with amplitude `sqrt(1 - J^2)`, and tracing
//! out `d_1` turns the channel into a beamsplitter loss with transmission `J^2`.

use num_complex::Complex;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hp::PureState;
use crate::scalar::{binomial, Real};

fn check_overlap<T: Real>(j: T) -> Result<()> {
    let j = j.f64();
    if !j.is_finite() || j.abs() > 1.0 + 1e-15 {
        return Err(Error::OverlapOutOfRange(j));
    }
    Ok(())
}

/// Amplitudes `a_k = sqrt(C(n,k)) J^(n-k) (1-J^2)^(k/2)` of the `n`-th
/// preparation-mode Dicke state on `|n-k excitations kept, k lost>`.
pub fn expand_dicke<T: Real>(n: usize, j: T) -> Result<Vec<T>> {
    check_overlap(j)?;
    let j = j.max(-T::one()).min(T::one());
    let lost = (T::one() - j * j).max(T::zero()).sqrt();
    Ok((0..=n)
        .map(|k| {
            T::lit(binomial(n, k)).sqrt() * j.powi((n - k) as i32) * lost.powi(k as i32)
        })
        .collect())
}

/// `table[n][k]` = `expand_dicke(n, J)[k]` for all `n <= cutoff`.
fn kraus_table<T: Real>(cutoff: usize, j: T) -> Result<Vec<Vec<T>>> {
    (0..=cutoff).map(|n| expand_dicke(n, j)).collect()
}

/// Readout-mode density matrix of a pure preparation-mode state.
pub fn apply_mismatch<T: Real>(state: &PureState<T>, j: T) -> Result<DensityMatrix<T>> {
    check_overlap(j)?;
    let ladder = *state.ladder();
    let d = ladder.dim();
    let top = state.max_occupied();
    let table = kraus_table(top, j)?;
    let c = state.amplitudes();
    let zero = Complex::new(T::zero(), T::zero());
    let mut rho = vec![zero; d * d];
    // rho'_{n-k, m-k} = sum_k c_n c_m^* a_k(n) a_k(m)
    for n in 0..=top {
        for m in 0..=top {
            let cc = c[n] * c[m].conj();
            if cc == zero {
                continue;
            }
            for k in 0..=n.min(m) {
                rho[(n - k) * d + (m - k)] = rho[(n - k) * d + (m - k)] + cc * (table[n][k] * table[m][k]);
            }
        }
    }
    DensityMatrix::new_unchecked(ladder, rho)
}

/// The same channel applied to a mixed preparation-mode state.
pub fn apply_mismatch_rho<T: Real>(input: &DensityMatrix<T>, j: T) -> Result<DensityMatrix<T>> {
    check_overlap(j)?;
    let ladder = *input.ladder();
    let d = ladder.dim();
    let table = kraus_table(d - 1, j)?;
    let zero = Complex::new(T::zero(), T::zero());
    let mut rho = vec![zero; d * d];
    for n in 0..d {
        for m in 0..d {
            let r = input.get(n, m);
            if r == zero {
                continue;
            }
            for k in 0..=n.min(m) {
                rho[(n - k) * d + (m - k)] = rho[(n - k) * d + (m - k)] + r * (table[n][k] * table[m][k]);
            }
        }
    }
    DensityMatrix::new_unchecked(ladder, rho)
}

/// Readout variance of the measured spin component after the mode change:
/// `J^2 var_in + (1 - J^2) S / 2` (spin units squared).
pub fn mismatched_variance<T: Real>(var_in: T, j: T, s: T) -> Result<T> {
    check_overlap(j)?;
    if !(var_in >= T::zero()) {
        return Err(Error::InvalidArgument(format!("input variance must be >= 0, got {var_in}")));
    }
    if !(s > T::zero()) {
        return Err(Error::InvalidArgument(format!("total spin must be > 0, got {s}")));
    }
    let t = j * j;
    Ok(t * var_in + (T::one() - t) * s / T::lit(2.0))
}
