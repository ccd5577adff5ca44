//! Wigner function as a displaced-parity expectation,
//! `W(alpha) = Tr[rho D(alpha) P D(alpha)^dag]`, normalized to `[-1, 1]`.
//!
//! Coordinates are the planar quadratures with `alpha = (x + i p)/sqrt(2)`,
//! so the vacuum is `exp(-(x^2 + p^2))` and `(1/pi) * integral W dx dp = Tr rho`.
//! Because `D(alpha) P D(alpha)^dag = D(2 alpha) P`, the evaluation needs only
//! the Fock matrix elements of `D(2 alpha)` inside the ladder and never
//! truncates a displaced state.

use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::scalar::{ln_factorial, Real};
use crate::special::laguerre_scaled;

/// Fock matrix elements `<m|D(beta)|n>` for `0 <= m, n < dim`, row-major in `m`.
pub fn displacement_matrix(dim: usize, beta: Complex<f64>) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); dim * dim];
    let r2 = beta.norm_sqr();
    if r2 == 0.0 {
        for n in 0..dim {
            out[n * dim + n] = Complex::new(1.0, 0.0);
        }
        return out;
    }
    let ln_r = 0.5 * r2.ln();
    let theta = beta.arg();
    for k in 0..dim {
        let lag = laguerre_scaled(dim - 1 - k, k, r2);
        let up = Complex::from_polar(1.0, k as f64 * theta);
        let down = if k % 2 == 0 { up.conj() } else { -up.conj() };
        for (j, l) in lag.into_iter().enumerate() {
            let ln_mag = 0.5 * (ln_factorial(j) - ln_factorial(j + k)) + k as f64 * ln_r - 0.5 * r2 + l.log_scale;
            let mag = l.mantissa * ln_mag.exp();
            // m = j + k >= n = j
            out[(j + k) * dim + j] = up * mag;
            if k > 0 {
                out[j * dim + j + k] = down * mag;
            }
        }
    }
    out
}

/// Wigner function at the phase-space point `(x, p)`.
pub fn wigner_point<T: Real>(rho: &DensityMatrix<T>, x: T, p: T) -> Result<T> {
    let (x, p) = (x.f64(), p.f64());
    if !x.is_finite() || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite phase-space point ({x}, {p})")));
    }
    Ok(T::lit(wigner_f64(rho, x, p)))
}

fn wigner_f64<T: Real>(rho: &DensityMatrix<T>, x: f64, p: f64) -> f64 {
    let d = rho.dim();
    // 2 alpha = sqrt(2) (x + i p)
    let beta = Complex::new(x, p) * std::f64::consts::SQRT_2;
    let disp = displacement_matrix(d, beta);
    let mut acc = Complex::new(0.0, 0.0);
    for n in 0..d {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for m in 0..d {
            let r = rho.get(n, m);
            if r.re.is_zero() && r.im.is_zero() {
                continue;
            }
            acc += Complex::new(r.re.f64(), r.im.f64()) * disp[m * d + n] * sign;
        }
    }
    debug_assert!(acc.im.abs() < 1e-8, "imaginary Wigner residue {}", acc.im);
    acc.re
}

/// `W(0)` for the first Dicke state after a mode change of overlap `J`:
/// the readout state is `(1 - J^2)|0><0| + J^2 |1><1|`, so `W(0) = 1 - 2 J^2`.
pub fn wigner_origin_dicke1<T: Real>(j: T) -> Result<T> {
    if j.abs() > T::one() {
        return Err(Error::OverlapOutOfRange(j.f64()));
    }
    Ok(T::one() - T::lit(2.0) * j * j)
}

/// Maps a planar point to sphere angles `(phi, theta)` of a collective spin
/// pointing along `-x`, with `S_z ~ sqrt(S_e) x` and `S_y ~ -sqrt(S_e) p`.
/// The origin maps to `(0, pi/2)`.
pub fn sphere_angles<T: Real>(x: T, p: T, s_eff: T) -> (T, T) {
    let root = s_eff.sqrt();
    (-p / root, T::FRAC_PI_2() - x / root)
}

/// Rectangular grid in `(x, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub x_min: T,
    pub x_max: T,
    pub nx: usize,
    pub p_min: T,
    pub p_max: T,
    pub np: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn square(half_width: T, n: usize) -> Self {
        Self { x_min: -half_width, x_max: half_width, nx: n, p_min: -half_width, p_max: half_width, np: n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points per axis".into()));
        }
        if !(self.x_max > self.x_min) || !(self.p_max > self.p_min) {
            return Err(Error::InvalidArgument("grid bounds must satisfy min < max".into()));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.p_min.is_finite() && self.p_max.is_finite()) {
            return Err(Error::InvalidArgument("grid bounds must be finite".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize_lossy(self.nx - 1)
    }

    pub fn dp(&self) -> T {
        (self.p_max - self.p_min) / T::from_usize_lossy(self.np - 1)
    }

    pub fn x(&self, i: usize) -> T {
        self.x_min + self.dx() * T::from_usize_lossy(i)
    }

    pub fn p(&self, i: usize) -> T {
        self.p_min + self.dp() * T::from_usize_lossy(i)
    }

    /// Whether the grid reaches `4 sqrt(n_max)` (plus the vacuum width) in
    /// every direction.
    pub fn covers(&self, n_max: usize) -> bool {
        let r = T::lit(4.0 * (n_max as f64).sqrt().max(1.0));
        self.x_min <= -r && self.x_max >= r && self.p_min <= -r && self.p_max >= r
    }
}

/// `xmin:xmax:n,pmin:pmax:n`
impl FromStr for GridSpec<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("grid `{s}` is not of the form xmin:xmax:n,pmin:pmax:n"));
        let axes: Vec<&str> = s.split(',').collect();
        if axes.len() != 2 {
            return Err(bad());
        }
        let parse_axis = |a: &str| -> Result<(f64, f64, usize)> {
            let parts: Vec<&str> = a.trim().split(':').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            Ok((
                parts[0].trim().parse().map_err(|_| bad())?,
                parts[1].trim().parse().map_err(|_| bad())?,
                parts[2].trim().parse().map_err(|_| bad())?,
            ))
        };
        let (x_min, x_max, nx) = parse_axis(axes[0])?;
        let (p_min, p_max, np) = parse_axis(axes[1])?;
        let spec = GridSpec { x_min, x_max, nx, p_min, p_max, np };
        spec.validate()?;
        Ok(spec)
    }
}

/// Sampled Wigner function; `values[ix * np + ip]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid<T> {
    pub spec: GridSpec<T>,
    pub values: Vec<T>,
}

impl<T: Real> WignerGrid<T> {
    pub fn get(&self, ix: usize, ip: usize) -> T {
        self.values[ix * self.spec.np + ip]
    }

    /// `(1/pi) * integral W dx dp` by the trapezoid rule; equals `Tr rho`
    /// when the grid covers the state.
    pub fn normalization(&self) -> T {
        let (nx, np) = (self.spec.nx, self.spec.np);
        let mut acc = T::zero();
        for ix in 0..nx {
            let wx = if ix == 0 || ix == nx - 1 { T::lit(0.5) } else { T::one() };
            for ip in 0..np {
                let wp = if ip == 0 || ip == np - 1 { T::lit(0.5) } else { T::one() };
                acc = acc + wx * wp * self.get(ix, ip);
            }
        }
        acc * self.spec.dx() * self.spec.dp() / T::PI()
    }

    /// Grid point with the smallest value: `(x, p, W)`.
    pub fn argmin(&self) -> (T, T, T) {
        let (mut best, mut at) = (T::infinity(), (0, 0));
        for ix in 0..self.spec.nx {
            for ip in 0..self.spec.np {
                let v = self.get(ix, ip);
                if v < best {
                    best = v;
                    at = (ix, ip);
                }
            }
        }
        (self.spec.x(at.0), self.spec.p(at.1), best)
    }

    /// Rows of `x, p, W`.
    pub fn rows(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        (0..self.spec.nx).flat_map(move |ix| (0..self.spec.np).map(move |ip| (self.spec.x(ix), self.spec.p(ip), self.get(ix, ip))))
    }
}

fn check_coverage<T: Real>(rho: &DensityMatrix<T>, spec: &GridSpec<T>) {
    let top = rho.populations().iter().rposition(|p| p.f64() > 1e-12).unwrap_or(0);
    if !spec.covers(top) {
        log::warn!("Wigner grid does not reach 4 sqrt(n) = {:.2} for occupied level {top}", 4.0 * (top as f64).sqrt());
    }
}

/// Wigner function on a grid. Rows are evaluated in parallel; every point is
/// computed independently, so the result does not depend on thread count.
pub fn wigner_grid<T: Real>(rho: &DensityMatrix<T>, spec: &GridSpec<T>) -> Result<WignerGrid<T>> {
    spec.validate()?;
    check_coverage(rho, spec);
    Ok(evaluate(rho, spec))
}

fn evaluate<T: Real>(rho: &DensityMatrix<T>, spec: &GridSpec<T>) -> WignerGrid<T> {
    let rows: Vec<Vec<T>> = (0..spec.nx)
        .into_par_iter()
        .map(|ix| {
            let x = spec.x(ix).f64();
            (0..spec.np).map(|ip| T::lit(wigner_f64(rho, x, spec.p(ip).f64()))).collect()
        })
        .collect();
    WignerGrid { spec: *spec, values: rows.into_iter().flatten().collect() }
}

/// Serial evaluation, identical to [`wigner_grid`] point for point.
pub fn wigner_grid_serial<T: Real>(rho: &DensityMatrix<T>, spec: &GridSpec<T>) -> Result<WignerGrid<T>> {
    spec.validate()?;
    let mut values = Vec::with_capacity(spec.nx * spec.np);
    for ix in 0..spec.nx {
        for ip in 0..spec.np {
            values.push(T::lit(wigner_f64(rho, spec.x(ix).f64(), spec.p(ip).f64())));
        }
    }
    Ok(WignerGrid { spec: *spec, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerMinimum<T> {
    pub x: T,
    pub p: T,
    pub value: T,
}

/// Minimum of `W` over the grid, refined by a compass search started from the
/// best grid point.
pub fn min_wigner<T: Real>(rho: &DensityMatrix<T>, spec: &GridSpec<T>) -> Result<WignerMinimum<T>> {
    spec.validate()?;
    let (x0, p0, w0) = evaluate(rho, spec).argmin();
    let (mut x, mut p, mut w) = (x0.f64(), p0.f64(), w0.f64());
    let (lo_x, hi_x, lo_p, hi_p) = (spec.x_min.f64(), spec.x_max.f64(), spec.p_min.f64(), spec.p_max.f64());
    let mut step = spec.dx().f64().min(spec.dp().f64());
    while step > 1e-9 {
        let mut moved = false;
        for (dx, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (nx, np) = ((x + dx).clamp(lo_x, hi_x), (p + dp).clamp(lo_p, hi_p));
            let v = wigner_f64(rho, nx, np);
            if v < w {
                x = nx;
                p = np;
                w = v;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(WignerMinimum { x: T::lit(x), p: T::lit(p), value: T::lit(w) })
}
