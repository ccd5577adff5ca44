//! Exact many-spin reference simulation for small ensembles.
//!
//! The full `(2s+1)^N` Hilbert space is represented explicitly. Collective
//! operators of interest (`S~_alpha`, mode ladder operators) are sums of
//! single-site terms, so they are stored as one `(2s+1) x (2s+1)` matrix per
//! site and applied without forming the full matrix; [`CollectiveOperator::to_dense`]
//! materializes them for small `N`.
//!
//! Single-site basis: eigenstates of `s_x` ordered `m_x = -s, ..., s`, so the
//! coherent spin state along `-x` is basis index 0 and
//! `s_+ = s_y + i s_z` raises `m_x`.

mod checks;
mod ops;
mod state;

pub use checks::{
    commutation_residual, effective_dicke_exact, fit_loglog_slope, hamiltonian_leakage,
    ladder_commutator_on_css, measure_sbeta_dense, measure_sbeta_exact, orthogonal_mode,
    random_couplings, rotate_about_x, run_suite, tv_to_dicke, verify_expansion_exact, SpectralDistribution,
    SuiteConfig, VerificationRecord,
};
pub use ops::{apply_product, build_effective_ops, mode_lowering, CollectiveOperator, EffectiveOperators, LocalOps};
pub use state::{ManyBodyState, SpinSpace};

use num_complex::Complex;

pub type C64 = Complex<f64>;

/// Size limits for exact simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OracleLimits {
    /// Largest many-body dimension `(2s+1)^N` for state vectors.
    pub max_dim: usize,
    /// Largest dimension for which full matrices may be formed.
    pub max_dense_dim: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_dim: 1 << 16, max_dense_dim: 1 << 10 }
    }
}
