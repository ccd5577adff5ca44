use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::CouplingVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Spatial profile of the mode the atoms couple to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeProfile<T> {
    Uniform,
    /// `eta = sin^2(2 pi z / wavelength)` along the cavity axis.
    StandingWave { wavelength: T },
    /// `eta = exp(-2 (x^2 + y^2) / w^2)` for a beam of waist `w`.
    GaussianBeam { waist: T },
    /// Per-atom couplings given directly.
    Custom { table: Vec<T> },
}

impl<T> ModeProfile<T> {
    pub fn name(&self) -> &'static str {
        match self {
            ModeProfile::Uniform => "uniform",
            ModeProfile::StandingWave { .. } => "standing_wave",
            ModeProfile::GaussianBeam { .. } => "gaussian_beam",
            ModeProfile::Custom { .. } => "custom",
        }
    }
}

/// Axial extent of a line-shaped cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxialExtent<T> {
    /// Integer number of standing-wave periods (wavelengths of the probe).
    Wavelengths(u32),
    /// Explicit length, in the same units as the wavelength.
    Length(T),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CloudDistribution<T> {
    /// Atoms uniformly distributed along the mode axis.
    UniformLine { extent: AxialExtent<T> },
    /// Transverse Gaussian density of rms radius `sigma_r` per axis.
    GaussianRadial { sigma_r: T },
    /// Fixed positions `[x, y, z]`.
    Explicit { positions: Vec<[T; 3]> },
}

impl<T> CloudDistribution<T> {
    pub fn name(&self) -> &'static str {
        match self {
            CloudDistribution::UniformLine { .. } => "uniform_line",
            CloudDistribution::GaussianRadial { .. } => "gaussian_radial",
            CloudDistribution::Explicit { .. } => "explicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomCloud<T> {
    pub n_atoms: usize,
    pub distribution: CloudDistribution<T>,
    #[serde(default)]
    pub seed: u64,
}

impl<T: Real> AtomCloud<T> {
    pub fn new(n_atoms: usize, distribution: CloudDistribution<T>, seed: u64) -> Self {
        Self { n_atoms, distribution, seed }
    }
}

/// Draws atom positions. Only depends on the cloud, so two profiles sampled on
/// the same cloud see the same atoms.
pub fn sample_positions<T: Real>(cloud: &AtomCloud<T>, wavelength: Option<T>) -> Result<Vec<[f64; 3]>> {
    if cloud.n_atoms == 0 {
        return Err(Error::InvalidArgument("cloud must contain N >= 1 atoms".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cloud.seed);
    match &cloud.distribution {
        CloudDistribution::UniformLine { extent } => {
            let length = match *extent {
                AxialExtent::Length(l) => l.f64(),
                AxialExtent::Wavelengths(k) => {
                    let lambda = wavelength.map(Real::f64).unwrap_or(1.0);
                    k as f64 * lambda
                }
            };
            if !(length > 0.0 && length.is_finite()) {
                return Err(Error::InvalidArgument(format!("line length must be > 0, got {length}")));
            }
            Ok((0..cloud.n_atoms).map(|_| [0.0, 0.0, rng.random::<f64>() * length]).collect())
        }
        CloudDistribution::GaussianRadial { sigma_r } => {
            let sigma = sigma_r.f64();
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!("sigma_r must be > 0, got {sigma}")));
            }
            let normal = Normal::new(0.0, sigma).expect("validated sigma");
            Ok((0..cloud.n_atoms)
                .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng), 0.0])
                .collect())
        }
        CloudDistribution::Explicit { positions } => {
            if positions.len() != cloud.n_atoms {
                return Err(Error::LengthMismatch { left: cloud.n_atoms, right: positions.len() });
            }
            Ok(positions.iter().map(|p| [p[0].f64(), p[1].f64(), p[2].f64()]).collect())
        }
    }
}

/// Per-atom couplings of `profile` for the atoms of `cloud`. Spin defaults to
/// 1/2; use [`CouplingVector::set_spin`] to change it.
pub fn sample_couplings<T: Real>(profile: &ModeProfile<T>, cloud: &AtomCloud<T>) -> Result<CouplingVector<T>> {
    if cloud.n_atoms == 0 {
        return Err(Error::InvalidArgument("cloud must contain N >= 1 atoms".into()));
    }
    let incompatible = || Error::IncompatibleGeometry {
        profile: profile.name(),
        cloud: cloud.distribution.name(),
    };
    let eta: Vec<T> = match profile {
        ModeProfile::Uniform => vec![T::one(); cloud.n_atoms],
        ModeProfile::Custom { table } => {
            if table.len() != cloud.n_atoms {
                return Err(Error::LengthMismatch { left: cloud.n_atoms, right: table.len() });
            }
            let max = table.iter().copied().fold(T::zero(), T::max);
            if max > T::one() {
                log::warn!("custom coupling table has max {max} > 1; used as-is");
            }
            table.clone()
        }
        ModeProfile::StandingWave { wavelength } => {
            if matches!(cloud.distribution, CloudDistribution::GaussianRadial { .. }) {
                return Err(incompatible());
            }
            let lambda = wavelength.f64();
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidArgument(format!("wavelength must be > 0, got {lambda}")));
            }
            let k = 2.0 * std::f64::consts::PI / lambda;
            sample_positions(cloud, Some(*wavelength))?
                .into_iter()
                .map(|p| T::lit((k * p[2]).sin().powi(2)))
                .collect()
        }
        ModeProfile::GaussianBeam { waist } => {
            if matches!(cloud.distribution, CloudDistribution::UniformLine { .. }) {
                return Err(incompatible());
            }
            let w = waist.f64();
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("waist must be > 0, got {w}")));
            }
            sample_positions(cloud, None)?
                .into_iter()
                .map(|p| T::lit((-2.0 * (p[0] * p[0] + p[1] * p[1]) / (w * w)).exp()))
                .collect()
        }
    };
    CouplingVector::new(eta)
}
