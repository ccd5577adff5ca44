//! Collective atomic-spin states under non-uniform atom-light coupling.
//!
//! A non-uniformly coupled ensemble of `N` spins behaves, for few
//! excitations above a coherent spin state, like a uniformly coupled
//! ensemble of `N_e` spins with coupling `eta_eff`. This crate computes those
//! effective parameters from mode and cloud geometries, builds collective
//! states on the Holstein-Primakoff ladder, maps them between preparation and
//! readout modes, evaluates Wigner functions and metrological gain, and checks
//! the effective description against an exact many-spin simulation.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases at the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod density;
pub mod error;
pub mod hp;
pub mod metrology;
pub mod mismatch;
pub mod oracle;
pub mod scalar;
pub mod special;
pub mod wigner;

pub use coupling::{
    effective_params, overlap_j, required_temperature, sample_couplings, thermal_overlap,
    AtomCloud, AxialExtent, CloudDistribution, CouplingVector, EffectiveParams, ModeProfile,
    TrapDepth,
};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use hp::{PureState, SpinLadder};
pub use metrology::{GainCurve, ScalingRegime};
pub use mismatch::{apply_mismatch, apply_mismatch_rho, expand_dicke, mismatched_variance};
pub use scalar::Real;
pub use wigner::{GridSpec, WignerGrid};

pub use num_complex::Complex;

pub type CouplingVector64 = CouplingVector<f64>;
pub type EffectiveParams64 = EffectiveParams<f64>;
pub type SpinLadder64 = SpinLadder<f64>;
pub type PureState64 = PureState<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type WignerGrid64 = WignerGrid<f64>;
pub type GridSpec64 = GridSpec<f64>;
pub type GainCurve64 = GainCurve<f64>;
pub type ModeProfile64 = ModeProfile<f64>;
pub type AtomCloud64 = AtomCloud<f64>;

pub type CouplingVector32 = CouplingVector<f32>;
pub type PureState32 = PureState<f32>;
pub type DensityMatrix32 = DensityMatrix<f32>;
