//! Collective states on the Holstein-Primakoff ladder of one coupling mode.
//!
//! Ladder index `n` counts excitations above the coherent spin state, i.e.
//! the effective Dicke state `|S_e, -S_e + n>`. Internally the measured spin
//! component is the dimensionless quadrature `x = S_beta / sqrt(S_e)`; spin
//! units appear only at the public boundary.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ln_factorial, Real};
use crate::special::hermite_functions;

pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Truncated ladder of a collective spin with effective total spin `S_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinLadder<T> {
    s_eff: T,
    cutoff: usize,
    tail_tol: f64,
}

impl<T: Real> SpinLadder<T> {
    pub fn new(s_eff: T, cutoff: usize) -> Result<Self> {
        if !(s_eff > T::zero()) || !s_eff.is_finite() {
            return Err(Error::InvalidArgument(format!("S_e must be > 0, got {s_eff}")));
        }
        if cutoff < 1 {
            return Err(Error::InvalidArgument("ladder cutoff must be >= 1".into()));
        }
        let ladder = Self { s_eff, cutoff, tail_tol: DEFAULT_TAIL_TOL };
        if !ladder.hp_valid() {
            log::warn!(
                "ladder cutoff {cutoff} exceeds 0.1 S_e = {}; Holstein-Primakoff picture is approximate",
                s_eff.f64() * 0.1
            );
        }
        Ok(ladder)
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn s_eff(&self) -> T {
        self.s_eff
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tol
    }

    /// Few excitations compared with the total spin: `n_max <= 0.1 S_e`.
    pub fn hp_valid(&self) -> bool {
        (self.cutoff as f64) <= 0.1 * self.s_eff.f64()
    }
}

fn norm_tol<T: Real>() -> f64 {
    (1e3 * T::epsilon().f64()).max(1e-12)
}

/// Pure state `sum_n c_n |n>` on a [`SpinLadder`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    ladder: SpinLadder<T>,
    amps: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Wraps amplitudes that must already be normalized and have negligible
    /// weight on the last ladder level. Shorter vectors are zero-padded.
    pub fn from_amplitudes(ladder: SpinLadder<T>, amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() > ladder.dim() {
            return Err(Error::IndexOutOfLadder { n: amps.len() - 1, cutoff: ladder.cutoff });
        }
        let mut amps = amps;
        amps.resize(ladder.dim(), Complex::new(T::zero(), T::zero()));
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<T>().f64();
        if (norm - 1.0).abs() > norm_tol::<T>() {
            return Err(Error::NotNormalized(norm));
        }
        let state = Self { ladder, amps };
        state.check_tail()?;
        Ok(state)
    }

    /// Normalizes `amps` and wraps them.
    pub fn normalized(ladder: SpinLadder<T>, amps: Vec<Complex<T>>) -> Result<Self> {
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        Self::from_amplitudes(ladder, amps.into_iter().map(|c| c / norm).collect())
    }

    fn check_tail(&self) -> Result<()> {
        let tail = self.tail_mass();
        if tail > self.ladder.tail_tol {
            return Err(Error::CutoffTooSmall { cutoff: self.ladder.cutoff, tail, tol: self.ladder.tail_tol });
        }
        Ok(())
    }

    pub fn ladder(&self) -> &SpinLadder<T> {
        &self.ladder
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Weight on the last ladder level.
    pub fn tail_mass(&self) -> f64 {
        self.amps.last().map_or(0.0, |c| c.norm_sqr().f64())
    }

    /// Largest index with non-negligible weight.
    pub fn max_occupied(&self) -> usize {
        self.amps.iter().rposition(|c| c.norm_sqr().f64() > 1e-30).unwrap_or(0)
    }

    /// Applies the phase `exp(i n beta)` to every ladder amplitude.
    pub fn rotate(&self, beta: T) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, &c)| c * Complex::from_polar(T::one(), T::from_usize_lossy(n) * beta))
            .collect();
        Self { ladder: self.ladder, amps }
    }

    /// Probability-amplitude wavefunction in the dimensionless quadrature.
    fn wavefunction(&self, beta: T, x: T) -> Complex<T> {
        let phi = hermite_functions(self.ladder.cutoff, x);
        self.amps
            .iter()
            .zip(phi)
            .enumerate()
            .map(|(n, (&c, p))| c * Complex::from_polar(p, T::from_usize_lossy(n) * beta))
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// `<x_beta>` and `<x_beta^2>` in dimensionless units.
    fn quadrature_moments(&self, beta: T) -> (T, T) {
        let c = self.rotate(beta).amps;
        let two = T::lit(2.0);
        let mut first = Complex::new(T::zero(), T::zero());
        let mut second_off = Complex::new(T::zero(), T::zero());
        let mut diag = T::zero();
        for n in 0..c.len() {
            let nf = T::from_usize_lossy(n);
            diag = diag + c[n].norm_sqr() * (two * nf + T::one());
            if n + 1 < c.len() {
                first = first + c[n].conj() * c[n + 1] * (nf + T::one()).sqrt();
            }
            if n + 2 < c.len() {
                second_off = second_off + c[n].conj() * c[n + 2] * ((nf + T::one()) * (nf + two)).sqrt();
            }
        }
        let mean = two.sqrt() * first.re;
        let second = (diag + two * second_off.re) / two;
        (mean, second)
    }

    /// `<S_beta>` in spin units.
    pub fn mean_sbeta(&self, beta: T) -> T {
        self.quadrature_moments(beta).0 * self.ladder.s_eff.sqrt()
    }
}

/// Dicke state `|S_e, -S_e + n>`.
pub fn dicke<T: Real>(ladder: SpinLadder<T>, n: usize) -> Result<PureState<T>> {
    if n > ladder.cutoff {
        return Err(Error::IndexOutOfLadder { n, cutoff: ladder.cutoff });
    }
    let mut amps = vec![Complex::new(T::zero(), T::zero()); ladder.dim()];
    amps[n] = Complex::new(T::one(), T::zero());
    if n == ladder.cutoff {
        return Err(Error::CutoffTooSmall { cutoff: ladder.cutoff, tail: 1.0, tol: ladder.tail_tol });
    }
    PureState::from_amplitudes(ladder, amps)
}

/// State with quadrature wavefunction proportional to `x^m exp(-x^2/2)`,
/// i.e. `x^m |0>` normalized: the action of `m` heralded detections of an
/// operator linear in the measured spin component.
pub fn heralded_cat<T: Real>(ladder: SpinLadder<T>, m: usize) -> Result<PureState<T>> {
    if m >= ladder.cutoff {
        return Err(Error::CutoffTooSmall { cutoff: ladder.cutoff, tail: 1.0, tol: ladder.tail_tol });
    }
    // x = (a + a^dag)/sqrt(2) applied m times; support grows by one level each time
    let mut v = vec![0.0f64; m + 1];
    v[0] = 1.0;
    for step in 0..m {
        let mut next = vec![0.0f64; m + 1];
        for n in 0..=step {
            let amp = v[n];
            if amp == 0.0 {
                continue;
            }
            next[n + 1] += amp * ((n + 1) as f64).sqrt() / std::f64::consts::SQRT_2;
            if n > 0 {
                next[n - 1] += amp * (n as f64).sqrt() / std::f64::consts::SQRT_2;
            }
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = next.into_iter().map(|x| x / norm).collect();
    }
    let amps = v.into_iter().map(|x| Complex::new(T::lit(x), T::zero())).collect();
    PureState::normalized(ladder, amps)
}

/// Squeezed vacuum with `Var(S_z) = exp(-2r) S_e / 2`.
///
/// Coefficients are the exact projection of the Gaussian
/// `exp(-x^2 e^{2r} / 2)` onto the Hermite functions, which only populates
/// even levels: `c_{2k} = (-tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r))`.
pub fn squeezed<T: Real>(ladder: SpinLadder<T>, r: T) -> Result<PureState<T>> {
    let r64 = r.f64();
    if !r64.is_finite() {
        return Err(Error::InvalidArgument(format!("squeezing parameter must be finite, got {r64}")));
    }
    let mut amps = vec![Complex::new(T::zero(), T::zero()); ladder.dim()];
    if r64 == 0.0 {
        amps[0] = Complex::new(T::one(), T::zero());
        return PureState::from_amplitudes(ladder, amps);
    }
    let t = r64.tanh();
    let ln_cosh = r64.abs() + (-2.0 * r64.abs()).exp().ln_1p() - std::f64::consts::LN_2;
    let mut kept = 0.0;
    for k in 0..=ladder.cutoff / 2 {
        let ln_mag = k as f64 * t.abs().ln() + 0.5 * ln_factorial(2 * k)
            - k as f64 * std::f64::consts::LN_2
            - ln_factorial(k)
            - 0.5 * ln_cosh;
        let sign = if t > 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        let c = sign * ln_mag.exp();
        kept += c * c;
        amps[2 * k] = Complex::new(T::lit(c), T::zero());
    }
    let lost = (1.0 - kept).max(0.0);
    if lost > ladder.tail_tol || amps[ladder.cutoff].norm_sqr().f64() > ladder.tail_tol {
        return Err(Error::CutoffTooSmall { cutoff: ladder.cutoff, tail: lost, tol: ladder.tail_tol });
    }
    PureState::normalized(ladder, amps)
}

/// Squeezed vacuum specified by its variance reduction in dB.
pub fn squeezed_db<T: Real>(ladder: SpinLadder<T>, db: T) -> Result<PureState<T>> {
    squeezed(ladder, db * T::LN_10() / T::lit(20.0))
}

/// Probability amplitude of reading `s_beta` (spin units) along
/// `S_z cos(beta) + S_y sin(beta)` on the `n`-th ladder state:
/// `(2^n n!)^{-1/2} (pi S_e)^{-1/4} exp(i n beta - s^2 / (2 S_e)) H_n(s / sqrt(S_e))`.
pub fn quadrature_amplitude<T: Real>(ladder: &SpinLadder<T>, n: usize, beta: T, s_beta: T) -> Result<Complex<T>> {
    if n > ladder.cutoff {
        return Err(Error::IndexOutOfLadder { n, cutoff: ladder.cutoff });
    }
    let root = ladder.s_eff.sqrt();
    let phi = hermite_functions(n, s_beta / root)[n];
    Ok(Complex::from_polar(phi / root.sqrt(), T::from_usize_lossy(n) * beta))
}

/// Mass of the measurement distribution inside `[lo, hi]` (spin units),
/// integrated with composite Simpson independent of any caller grid.
fn covered_mass<T: Real>(state: &PureState<T>, beta: T, lo: f64, hi: f64) -> f64 {
    let root = state.ladder.s_eff.f64().sqrt();
    let (a, b) = (lo / root, hi / root);
    let n_eff = (state.max_occupied() as f64 * 2.0 + 1.0).sqrt();
    let mut intervals = ((b - a) * n_eff * 40.0).ceil() as usize;
    intervals = intervals.clamp(2000, 200_000);
    intervals += intervals % 2;
    let h = (b - a) / intervals as f64;
    let pdf = |x: f64| state.wavefunction(beta, T::lit(x)).norm_sqr().f64();
    let mut acc = pdf(a) + pdf(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * pdf(a + i as f64 * h);
    }
    acc * h / 3.0
}

pub const PDF_TAIL_TOL: f64 = 1e-6;

/// Probability density of `S_beta` (per spin unit) on `grid`.
pub fn measurement_pdf<T: Real>(state: &PureState<T>, beta: T, grid: &[T]) -> Result<Vec<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty measurement grid".into()));
    }
    let lo = grid.iter().copied().fold(T::infinity(), T::min).f64();
    let hi = grid.iter().copied().fold(T::neg_infinity(), T::max).f64();
    let covered = if hi > lo { covered_mass(state, beta, lo, hi) } else { 0.0 };
    let missing = 1.0 - covered;
    if missing > PDF_TAIL_TOL {
        return Err(Error::GridTooNarrow { missing });
    }
    let root = state.ladder.s_eff.sqrt();
    Ok(grid
        .iter()
        .map(|&s| state.wavefunction(beta, s / root).norm_sqr() / root)
        .collect())
}

/// Variance of `S_beta` in spin units squared.
pub fn variance_sbeta<T: Real>(state: &PureState<T>, beta: T) -> T {
    let (mean, second) = state.quadrature_moments(beta);
    (second - mean * mean) * state.ladder.s_eff
}

/// JSON form `{s_eff, cutoff, amplitudes: [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PureStateRecord {
    pub s_eff: f64,
    pub cutoff: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl<T: Real> From<&PureState<T>> for PureStateRecord {
    fn from(state: &PureState<T>) -> Self {
        Self {
            s_eff: state.ladder.s_eff.f64(),
            cutoff: state.ladder.cutoff,
            amplitudes: state.amps.iter().map(|c| [c.re.f64(), c.im.f64()]).collect(),
        }
    }
}

impl PureStateRecord {
    pub fn into_state<T: Real>(self) -> Result<PureState<T>> {
        let ladder = SpinLadder::new(T::lit(self.s_eff), self.cutoff)?;
        let amps = self.amplitudes.iter().map(|&[re, im]| Complex::new(T::lit(re), T::lit(im))).collect();
        PureState::from_amplitudes(ladder, amps)
    }
}
