use super::{OracleLimits, C64};
use crate::error::{Error, Result};

/// Hilbert space of `n_sites` spins of spin `two_s / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinSpace {
    pub n_sites: usize,
    pub two_s: usize,
}

impl SpinSpace {
    pub fn new(n_sites: usize, two_s: usize, limits: &OracleLimits) -> Result<Self> {
        if n_sites == 0 || two_s == 0 {
            return Err(Error::InvalidArgument("need N >= 1 sites of spin >= 1/2".into()));
        }
        let space = Self { n_sites, two_s };
        let dim = space.checked_dim().ok_or(Error::DimensionOverflow { dim: usize::MAX, limit: limits.max_dim })?;
        if dim > limits.max_dim {
            return Err(Error::DimensionOverflow { dim, limit: limits.max_dim });
        }
        Ok(space)
    }

    fn checked_dim(&self) -> Option<usize> {
        (0..self.n_sites).try_fold(1usize, |acc, _| acc.checked_mul(self.local_dim()))
    }

    pub fn local_dim(&self) -> usize {
        self.two_s + 1
    }

    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.local_dim().pow(self.n_sites as u32)
    }

    /// Stride of site `j` in the flattened index.
    pub fn stride(&self, site: usize) -> usize {
        self.local_dim().pow(site as u32)
    }

    /// Local basis index of `site` in the many-body index `idx`.
    pub fn digit(&self, idx: usize, site: usize) -> usize {
        (idx / self.stride(site)) % self.local_dim()
    }
}

/// Normalized many-body state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    space: SpinSpace,
    amps: Vec<C64>,
}

impl ManyBodyState {
    /// All spins along `-x`.
    pub fn css(space: SpinSpace) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); space.dim()];
        amps[0] = C64::new(1.0, 0.0);
        Self { space, amps }
    }

    /// Normalizes `amps`; fails on a (numerically) null vector.
    pub fn from_unnormalized(space: SpinSpace, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::InvalidArgument(format!(
                "state vector length {} does not match dimension {}",
                amps.len(),
                space.dim()
            )));
        }
        let norm = norm(&amps);
        if !(norm > 1e-12) {
            return Err(Error::NullState(0));
        }
        Ok(Self { space, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub(crate) fn raw(space: SpinSpace, amps: Vec<C64>) -> Self {
        Self { space, amps }
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
