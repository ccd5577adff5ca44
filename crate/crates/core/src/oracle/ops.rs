use nalgebra::DMatrix;

use super::state::{ManyBodyState, SpinSpace};
use super::{OracleLimits, C64};
use crate::coupling::{effective_params, CouplingVector};
use crate::error::{Error, Result};

/// Single-spin operators in the `s_x` eigenbasis (`m_x = -s ..= s`).
#[derive(Debug, Clone)]
pub struct LocalOps {
    pub sx: DMatrix<C64>,
    pub sy: DMatrix<C64>,
    pub sz: DMatrix<C64>,
    /// `s_+ = s_y + i s_z`
    pub sp: DMatrix<C64>,
    /// `s_- = s_y - i s_z`
    pub sm: DMatrix<C64>,
}

impl LocalOps {
    pub fn new(two_s: usize) -> Self {
        let d = two_s + 1;
        let s = two_s as f64 / 2.0;
        let m = |i: usize| -s + i as f64;
        let sx = DMatrix::from_fn(d, d, |r, c| if r == c { C64::new(m(r), 0.0) } else { C64::new(0.0, 0.0) });
        let sp = DMatrix::from_fn(d, d, |r, c| {
            if r == c + 1 {
                C64::new((s * (s + 1.0) - m(c) * (m(c) + 1.0)).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let sm = sp.adjoint();
        let sy = (&sp + &sm) * C64::new(0.5, 0.0);
        let sz = (&sp - &sm) * C64::new(0.0, -0.5);
        Self { sx, sy, sz, sp, sm }
    }
}

/// Sum of single-site operators `sum_j A_j`, with `A_j` acting on site `j`.
#[derive(Debug, Clone)]
pub struct CollectiveOperator {
    pub label: String,
    space: SpinSpace,
    terms: Vec<Option<DMatrix<C64>>>,
}

impl CollectiveOperator {
    /// `sum_j coeffs[j] * local` on every site.
    pub fn uniform_sum(label: &str, space: SpinSpace, local: &DMatrix<C64>, coeffs: &[C64]) -> Self {
        let terms = coeffs
            .iter()
            .map(|&c| if c == C64::new(0.0, 0.0) { None } else { Some(local * c) })
            .collect();
        Self { label: label.into(), space, terms }
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn term(&self, site: usize) -> Option<&DMatrix<C64>> {
        self.terms[site].as_ref()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            label: format!("{}^dag", self.label),
            space: self.space,
            terms: self.terms.iter().map(|t| t.as_ref().map(|m| m.adjoint())).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            label: self.label.clone(),
            space: self.space,
            terms: self.terms.iter().map(|t| t.as_ref().map(|m| m * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let terms = self
            .terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(a + b),
                (Some(a), None) => Some(a.clone()),
                (None, Some(b)) => Some(b.clone()),
                (None, None) => None,
            })
            .collect();
        Self { label: format!("{}+{}", self.label, other.label), space: self.space, terms }
    }

    /// `[A, B]`; terms on different sites commute, so only same-site
    /// commutators survive.
    pub fn commutator(&self, other: &Self) -> Self {
        let terms = self
            .terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(a * b - b * a),
                _ => None,
            })
            .collect();
        Self { label: format!("[{},{}]", self.label, other.label), space: self.space, terms }
    }

    /// Largest Hermiticity defect over the local terms.
    pub fn hermiticity_residual(&self) -> f64 {
        self.terms
            .iter()
            .flatten()
            .map(|m| (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let d = self.space.local_dim();
        let dim = v.len();
        let mut out = vec![C64::new(0.0, 0.0); dim];
        let mut local = vec![C64::new(0.0, 0.0); d];
        for (site, term) in self.terms.iter().enumerate() {
            let Some(m) = term else { continue };
            let stride = self.space.stride(site);
            let block = stride * d;
            for base in (0..dim).step_by(block) {
                for low in 0..stride {
                    for (a, slot) in local.iter_mut().enumerate() {
                        *slot = v[base + a * stride + low];
                    }
                    for b in 0..d {
                        let mut acc = C64::new(0.0, 0.0);
                        for a in 0..d {
                            acc += m[(b, a)] * local[a];
                        }
                        out[base + b * stride + low] += acc;
                    }
                }
            }
        }
        out
    }

    /// Unnormalized `A |psi>`.
    pub fn apply(&self, state: &ManyBodyState) -> ManyBodyState {
        ManyBodyState::raw(self.space, self.apply_vec(state.amplitudes()))
    }

    pub fn expectation(&self, state: &ManyBodyState) -> C64 {
        super::state::inner(state.amplitudes(), &self.apply_vec(state.amplitudes()))
    }

    /// Full matrix, if the dimension is within `limits.max_dense_dim`.
    pub fn to_dense(&self, limits: &OracleLimits) -> Result<DMatrix<C64>> {
        let dim = self.space.dim();
        if dim > limits.max_dense_dim {
            return Err(Error::DimensionOverflow { dim, limit: limits.max_dense_dim });
        }
        let mut out = DMatrix::zeros(dim, dim);
        let mut e = vec![C64::new(0.0, 0.0); dim];
        for col in 0..dim {
            e[col] = C64::new(1.0, 0.0);
            for (row, v) in self.apply_vec(&e).into_iter().enumerate() {
                out[(row, col)] = v;
            }
            e[col] = C64::new(0.0, 0.0);
        }
        Ok(out)
    }
}

/// `(U (x) U (x) ... (x) U) v` for a single-site matrix `U`.
pub fn apply_product(space: SpinSpace, local: &DMatrix<C64>, v: &[C64]) -> Vec<C64> {
    let d = space.local_dim();
    let mut cur = v.to_vec();
    let mut buf = vec![C64::new(0.0, 0.0); d];
    for site in 0..space.n_sites {
        let stride = space.stride(site);
        let block = stride * d;
        for base in (0..cur.len()).step_by(block) {
            for low in 0..stride {
                for (a, slot) in buf.iter_mut().enumerate() {
                    *slot = cur[base + a * stride + low];
                }
                for b in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..d {
                        acc += local[(b, a)] * buf[a];
                    }
                    cur[base + b * stride + low] = acc;
                }
            }
        }
    }
    cur
}

/// Effective collective operators of one coupling vector.
#[derive(Debug, Clone)]
pub struct EffectiveOperators {
    pub sx: CollectiveOperator,
    pub sy: CollectiveOperator,
    pub sz: CollectiveOperator,
    /// `a = sum_j f_j s_-^(j) / sqrt(2s)` with `f_j = eta_j / sqrt(sum eta^2)`.
    pub a: CollectiveOperator,
    pub a_dag: CollectiveOperator,
}

/// Lowering operator `sum_j f_j s_-^(j) / sqrt(2s)` of an arbitrary mode `f`.
pub fn mode_lowering(space: SpinSpace, f: &[f64]) -> CollectiveOperator {
    let ops = LocalOps::new(space.two_s);
    let scale = 1.0 / (2.0 * space.spin()).sqrt();
    let coeffs: Vec<C64> = f.iter().map(|&x| C64::new(x * scale, 0.0)).collect();
    CollectiveOperator::uniform_sum("b", space, &ops.sm, &coeffs)
}

/// `S~_alpha = (1/eta_eff) sum_j eta_j s_alpha^(j)` and the mode-0 ladder
/// operators.
pub fn build_effective_ops(cv: &CouplingVector<f64>, limits: &OracleLimits) -> Result<EffectiveOperators> {
    let space = SpinSpace::new(cv.len(), cv.two_s(), limits)?;
    let params = effective_params(cv)?;
    let ops = LocalOps::new(space.two_s);
    let w: Vec<C64> = cv.eta().iter().map(|&e| C64::new(e / params.eta_eff, 0.0)).collect();
    let a = mode_lowering(space, &cv.mode_coefficients());
    let mut a = a;
    a.label = "a".into();
    let a_dag = a.adjoint();
    Ok(EffectiveOperators {
        sx: CollectiveOperator::uniform_sum("Sx", space, &ops.sx, &w),
        sy: CollectiveOperator::uniform_sum("Sy", space, &ops.sy, &w),
        sz: CollectiveOperator::uniform_sum("Sz", space, &ops.sz, &w),
        a,
        a_dag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn local_algebra() {
        for two_s in 1..=4 {
            let o = LocalOps::new(two_s);
            let i = C64::new(0.0, 1.0);
            // [s_x, s_y] = i s_z and cyclic
            assert!(close(&(&o.sx * &o.sy - &o.sy * &o.sx), &(&o.sz * i)) < 1e-12);
            assert!(close(&(&o.sy * &o.sz - &o.sz * &o.sy), &(&o.sx * i)) < 1e-12);
            assert!(close(&(&o.sz * &o.sx - &o.sx * &o.sz), &(&o.sy * i)) < 1e-12);
            let s = two_s as f64 / 2.0;
            let casimir = &o.sx * &o.sx + &o.sy * &o.sy + &o.sz * &o.sz;
            let id = DMatrix::<C64>::identity(two_s + 1, two_s + 1) * C64::new(s * (s + 1.0), 0.0);
            assert!(close(&casimir, &id) < 1e-12);
        }
    }

    #[test]
    fn uniform_coupling_reduces_to_total_spin() {
        let lim = OracleLimits::default();
        let cv = CouplingVector::new(vec![1.0, 1.0]).unwrap();
        let ops = build_effective_ops(&cv, &lim).unwrap();
        let sz = ops.sz.to_dense(&lim).unwrap();
        // S_z = s_z (x) 1 + 1 (x) s_z with site 0 the fastest index
        let l = LocalOps::new(1);
        let id = DMatrix::<C64>::identity(2, 2);
        let expect = l.sz.kronecker(&id) + id.kronecker(&l.sz);
        assert!(close(&sz, &expect) < 1e-14);
    }

    #[test]
    fn hermiticity() {
        let lim = OracleLimits::default();
        let cv = CouplingVector::with_spin(vec![0.3, 1.0, 0.6], 1.0).unwrap();
        let ops = build_effective_ops(&cv, &lim).unwrap();
        for op in [&ops.sx, &ops.sy, &ops.sz] {
            assert!(op.hermiticity_residual() < 1e-15);
            let d = op.to_dense(&lim).unwrap();
            assert!(close(&d, &d.adjoint()) < 1e-14);
        }
        let diff = ops.a.add(&ops.a_dag.scale(C64::new(-1.0, 0.0))).to_dense(&lim).unwrap();
        assert!(close(&diff, &(-diff.adjoint())) < 1e-14);
    }

    #[test]
    fn dense_guard() {
        let lim = OracleLimits { max_dim: 1 << 12, max_dense_dim: 16 };
        let cv = CouplingVector::new(vec![1.0; 5]).unwrap();
        let ops = build_effective_ops(&cv, &lim).unwrap();
        assert!(matches!(ops.sz.to_dense(&lim), Err(Error::DimensionOverflow { .. })));
    }
}
