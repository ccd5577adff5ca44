//! Hermite functions and associated Laguerre polynomials.

use crate::scalar::Real;

/// Normalized Hermite functions `phi_0(x) ..= phi_nmax(x)`,
/// `phi_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2)`.
///
/// Uses the three-term recursion on the normalized functions, which stays
/// bounded for all `n` and underflows gracefully for large `|x|`.
pub fn hermite_functions<T: Real>(nmax: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(nmax + 1);
    let phi0 = T::PI().powf(T::lit(-0.25)) * (-x * x / T::lit(2.0)).exp();
    out.push(phi0);
    if nmax == 0 {
        return out;
    }
    out.push(T::lit(2.0).sqrt() * x * phi0);
    for n in 1..nmax {
        let nf = T::from_usize_lossy(n);
        let np1 = nf + T::one();
        let next = (T::lit(2.0) / np1).sqrt() * x * out[n] - (nf / np1).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite_poly(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Value of a scaled recursion: `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }
}

const RESCALE_AT: f64 = 1e120;

/// Associated Laguerre polynomials `L_0^{(k)}(x) ..= L_nmax^{(k)}(x)`, each
/// returned in scaled form so that large arguments do not overflow before
/// being multiplied by a small Gaussian envelope.
pub fn laguerre_scaled(nmax: usize, k: usize, x: f64) -> Vec<Scaled> {
    let a = k as f64;
    let mut out = Vec::with_capacity(nmax + 1);
    let mut log_scale = 0.0;
    let mut l0 = 1.0;
    out.push(Scaled { mantissa: l0, log_scale });
    if nmax == 0 {
        return out;
    }
    let mut l1 = 1.0 + a - x;
    out.push(Scaled { mantissa: l1, log_scale });
    for n in 1..nmax {
        let nf = n as f64;
        let l2 = ((2.0 * nf + 1.0 + a - x) * l1 - (nf + a) * l0) / (nf + 1.0);
        l0 = l1;
        l1 = l2;
        if l1.abs() > RESCALE_AT {
            l0 /= RESCALE_AT;
            l1 /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
        out.push(Scaled { mantissa: l1, log_scale });
    }
    out
}

/// Plain associated Laguerre polynomial `L_n^{(k)}(x)`.
pub fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    laguerre_scaled(n, k, x)[n].value()
}
