use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{PureState, SpinLadder};
use crate::scalar::Real;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Density matrix `rho_{nm}` on a ladder, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    ladder: SpinLadder<T>,
    rho: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(ladder: SpinLadder<T>, rho: Vec<Complex<T>>) -> Result<Self> {
        let dm = Self::new_unchecked(ladder, rho)?;
        dm.validate()?;
        Ok(dm)
    }

    pub(crate) fn new_unchecked(ladder: SpinLadder<T>, rho: Vec<Complex<T>>) -> Result<Self> {
        let d = ladder.dim();
        if rho.len() != d * d {
            return Err(Error::InvalidArgument(format!(
                "density matrix needs {} entries for cutoff {}, got {}",
                d * d,
                ladder.cutoff(),
                rho.len()
            )));
        }
        Ok(Self { ladder, rho })
    }

    pub fn from_pure(state: &PureState<T>) -> Self {
        let c = state.amplitudes();
        let d = c.len();
        let mut rho = Vec::with_capacity(d * d);
        for n in 0..d {
            for m in 0..d {
                rho.push(c[n] * c[m].conj());
            }
        }
        Self { ladder: *state.ladder(), rho }
    }

    /// Diagonal state `sum_n p_n |n><n|`.
    pub fn diagonal(ladder: SpinLadder<T>, populations: &[T]) -> Result<Self> {
        let d = ladder.dim();
        if populations.len() > d {
            return Err(Error::IndexOutOfLadder { n: populations.len() - 1, cutoff: ladder.cutoff() });
        }
        let mut rho = vec![Complex::new(T::zero(), T::zero()); d * d];
        for (n, &p) in populations.iter().enumerate() {
            rho[n * d + n] = Complex::new(p, T::zero());
        }
        Self::new(ladder, rho)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_residual();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidArgument(format!("density matrix not Hermitian (residual {herm:e})")));
        }
        let tr = self.trace().f64();
        if (tr - 1.0).abs() > TRACE_TOL.max(1e3 * T::epsilon().f64()) {
            return Err(Error::NotNormalized(tr));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL.max(1e3 * T::epsilon().f64()) {
            return Err(Error::InvalidArgument(format!("density matrix not positive (eigenvalue {min:e})")));
        }
        Ok(())
    }

    pub fn ladder(&self) -> &SpinLadder<T> {
        &self.ladder
    }

    pub fn dim(&self) -> usize {
        self.ladder.dim()
    }

    pub fn get(&self, n: usize, m: usize) -> Complex<T> {
        self.rho[n * self.dim() + m]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.rho
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|n| self.get(n, n).re).sum()
    }

    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|n| self.get(n, n).re).collect()
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> T {
        // Tr(rho rho) = sum |rho_nm|^2 for Hermitian rho
        self.rho.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for n in 0..d {
            for m in n..d {
                worst = worst.max((self.get(n, m) - self.get(m, n).conj()).norm().f64());
            }
        }
        worst
    }

    /// Expectation of the parity operator `(-1)^n`.
    pub fn parity(&self) -> T {
        (0..self.dim())
            .map(|n| if n % 2 == 0 { self.get(n, n).re } else { -self.get(n, n).re })
            .sum()
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex<f64>> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |n, m| {
            let c = self.get(n, m);
            Complex::new(c.re.f64(), c.im.f64())
        })
    }

    /// Eigenvalues in ascending order (computed in `f64`).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.to_nalgebra();
        // symmetrize away rounding noise before the Hermitian solver
        let h = (&m + m.adjoint()) * Complex::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest elementwise distance to another matrix on the same ladder.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.rho
            .iter()
            .zip(&other.rho)
            .map(|(a, b)| (*a - *b).norm().f64())
            .fold(0.0, f64::max)
    }
}

/// JSON form: `{s_eff, cutoff, rho: [[[re, im], ...], ...]}` with rows of
/// the matrix in order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixRecord {
    pub s_eff: f64,
    pub cutoff: usize,
    pub rho: Vec<Vec<[f64; 2]>>,
}

impl<T: Real> From<&DensityMatrix<T>> for DensityMatrixRecord {
    fn from(dm: &DensityMatrix<T>) -> Self {
        let d = dm.dim();
        Self {
            s_eff: dm.ladder.s_eff().f64(),
            cutoff: dm.ladder.cutoff(),
            rho: (0..d)
                .map(|n| (0..d).map(|m| [dm.get(n, m).re.f64(), dm.get(n, m).im.f64()]).collect())
                .collect(),
        }
    }
}

impl DensityMatrixRecord {
    pub fn into_matrix<T: Real>(self) -> Result<DensityMatrix<T>> {
        let ladder = SpinLadder::new(T::lit(self.s_eff), self.cutoff)?;
        let rho = self
            .rho
            .iter()
            .flat_map(|row| row.iter().map(|&[re, im]| Complex::new(T::lit(re), T::lit(im))))
            .collect();
        DensityMatrix::new(ladder, rho)
    }
}
