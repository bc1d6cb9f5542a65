//! Scalar cut-off kernels: the flat exponential `ell`, the normalized ramp
//! `lambda`, its antiderivative-shift `phi`, and the derived profiles used by
//! the collar construction (`lambda_eps`, `p_a`, `s_func`, `f`/`g`).
//!
//! `lambda(t) = (1/alpha) ∫_0^t ell(3x) ell(3-3x) dx` with
//! `alpha = ∫_0^1 ell(3x) ell(3-3x) dx`, and `phi(t) = ∫_0^{1/2+t} lambda`.
//! Outside their transition windows both functions have exact closed tails
//! (`lambda`: 0 and 1, `phi`: 0 and `t`), which the evaluators return
//! directly so the identities `lambda(t)+lambda(1-t)=1` and
//! `phi(t)-phi(-t)=t` hold to quadrature accuracy everywhere.
//!
//! Evaluation strategy: `alpha` and the grid data come from adaptive
//! Gauss-Legendre quadrature; on [0,1] both `lambda` and its running
//! integral are cached on a 2048-cell grid as cubic Hermite interpolants
//! with exact node derivatives (`lambda'` is closed-form). The cache is
//! validated against direct quadrature when the context is built.

use crate::dual::Dual;
use crate::quad;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

/// Number of uniform cells in the cached interpolants.
const CACHE_CELLS: usize = 2048;
/// Cache-vs-quadrature error budget checked at construction.
const CACHE_BUDGET: f64 = 1e-10;
/// Flange/flat-tail switch points are exact; everything else goes through
/// the tables.
const HALF: f64 = 0.5;

pub const EPSILON_MAX: f64 = 1.0 / 22.0;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("quadrature produced a non-finite or out-of-range alpha: {0}")]
    AlphaOutOfRange(f64),
    #[error("cached {table} deviates from quadrature by {err:.3e} at t={at} (budget {budget:.1e})")]
    CacheValidation {
        table: &'static str,
        at: f64,
        err: f64,
        budget: f64,
    },
    #[error("cached lambda is not monotone near node {node}")]
    NonMonotoneCache { node: usize },
    #[error("epsilon must lie in (0, 1/22), got {0}")]
    EpsilonOutOfRange(f64),
}

/// `ell(t) = 0` for `t <= 0`, `exp(-1/t)` for `t > 0`. Total and in [0, 1).
pub fn ell(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Integrand of `alpha` and `lambda`: `ell(3x) * ell(3-3x)`.
fn ramp_weight(x: f64) -> f64 {
    ell(3.0 * x) * ell(3.0 - 3.0 * x)
}

/// Uniform-grid cubic Hermite interpolant with exact node derivatives.
#[derive(Debug, Clone)]
struct HermiteTable {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl HermiteTable {
    fn eval(&self, x: f64) -> f64 {
        let n = self.values.len() - 1;
        let step = (self.hi - self.lo) / n as f64;
        let pos = (x - self.lo) / step;
        let idx = (pos.floor() as usize).min(n - 1);
        let s = pos - idx as f64;
        let (v0, v1) = (self.values[idx], self.values[idx + 1]);
        let (d0, d1) = (self.derivs[idx] * step, self.derivs[idx + 1] * step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * v0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * v1
            + (s3 - s2) * d1
    }
}

/// Smoothing parameter for `lambda_eps` and the `f`/`g` profiles.
/// The bound `epsilon < 1/22` keeps `1/(1-2 epsilon) < 11/10`, so the
/// rescaled ramp slope stays below 2.
#[derive(Debug, Clone, Copy)]
pub struct SmoothingParams {
    epsilon: f64,
}

impl SmoothingParams {
    pub fn new(epsilon: f64) -> Result<Self, KernelError> {
        if !(epsilon > 0.0 && epsilon < EPSILON_MAX) {
            return Err(KernelError::EpsilonOutOfRange(epsilon));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for SmoothingParams {
    /// 1/32: comfortably inside the `< 1/22` constraint, exactly representable.
    fn default() -> Self {
        Self { epsilon: 1.0 / 32.0 }
    }
}

/// Immutable bundle of the normalization constant, quadrature settings and
/// the cached evaluators. Pure and safe to share across threads.
#[derive(Debug, Clone)]
pub struct KernelContext {
    alpha: f64,
    quad_tol: f64,
    lambda_table: HermiteTable,
    ramp_integral_table: HermiteTable,
}

impl KernelContext {
    pub fn new() -> Result<Self, KernelError> {
        Self::with_quad_tol(1e-12)
    }

    pub fn with_quad_tol(quad_tol: f64) -> Result<Self, KernelError> {
        let alpha = quad::integrate(&ramp_weight, 0.0, 1.0, quad_tol * 0.1);
        if !(alpha.is_finite() && alpha > 0.1 && alpha < 0.2) {
            return Err(KernelError::AlphaOutOfRange(alpha));
        }

        // lambda on [0,1]: cumulative per-cell panels, node derivatives are
        // the closed form ramp_weight(x)/alpha.
        let n = CACHE_CELLS;
        let step = 1.0 / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut derivs = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        values.push(0.0);
        derivs.push(ramp_weight(0.0) / alpha);
        for i in 0..n {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            acc += quad::gauss20(&ramp_weight, a, b) / alpha;
            values.push(acc);
            derivs.push(ramp_weight(b) / alpha);
        }
        for i in 0..n {
            if values[i + 1] + 1e-12 < values[i] {
                return Err(KernelError::NonMonotoneCache { node: i });
            }
        }
        let lambda_table = HermiteTable {
            lo: 0.0,
            hi: 1.0,
            values,
            derivs,
        };

        // running integral of lambda on [0,1]; node derivatives are the
        // cached lambda values themselves.
        let lam = |x: f64| lambda_table.eval(x);
        let mut ivalues = Vec::with_capacity(n + 1);
        let mut iderivs = Vec::with_capacity(n + 1);
        let mut iacc = 0.0;
        ivalues.push(0.0);
        iderivs.push(0.0);
        for i in 0..n {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            iacc += quad::gauss20(&lam, a, b);
            ivalues.push(iacc);
            iderivs.push(lambda_table.values[i + 1]);
        }
        let ramp_integral_table = HermiteTable {
            lo: 0.0,
            hi: 1.0,
            values: ivalues,
            derivs: iderivs,
        };

        let ctx = Self {
            alpha,
            quad_tol,
            lambda_table,
            ramp_integral_table,
        };
        ctx.validate_cache()?;
        Ok(ctx)
    }

    /// Spot-check both caches against direct quadrature.
    fn validate_cache(&self) -> Result<(), KernelError> {
        for k in 0..=32 {
            let t = k as f64 / 32.0;
            let direct = self.lambda_quadrature(t);
            let err = (self.lambda(t) - direct).abs();
            if err > CACHE_BUDGET {
                return Err(KernelError::CacheValidation {
                    table: "lambda",
                    at: t,
                    err,
                    budget: CACHE_BUDGET,
                });
            }
            let s = t - HALF; // phi argument covering [-1/2, 1/2]
            let direct = self.phi_quadrature(s);
            let err = (self.phi(s) - direct).abs();
            if err > CACHE_BUDGET {
                return Err(KernelError::CacheValidation {
                    table: "phi",
                    at: s,
                    err,
                    budget: CACHE_BUDGET,
                });
            }
        }
        Ok(())
    }

    /// The normalization constant `alpha = ∫_0^1 ell(3x) ell(3-3x) dx`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// `lambda(t)`: 0 for `t <= 0`, 1 for `t >= 1`, strictly increasing
    /// between.
    pub fn lambda(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else {
            // interpolation may undershoot by ~1e-22 where the exact value
            // is flat-zero; the clamp keeps the range contract
            self.lambda_table.eval(t).clamp(0.0, 1.0)
        }
    }

    /// Closed-form `lambda'(t) = ell(3t) ell(3-3t) / alpha` (no differencing).
    pub fn lambda_prime(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            0.0
        } else {
            ramp_weight(t) / self.alpha
        }
    }

    /// Direct adaptive quadrature of `lambda`, bypassing the cache. This is
    /// the reference route the cache is validated against.
    pub fn lambda_quadrature(&self, t: f64) -> f64 {
        let upper = t.clamp(0.0, 1.0);
        quad::integrate(&ramp_weight, 0.0, upper, self.quad_tol) / self.alpha
    }

    /// `phi(t) = ∫_0^{1/2+t} lambda`: 0 for `t <= -1/2`, `t` for `t >= 1/2`.
    pub fn phi(&self, t: f64) -> f64 {
        if t <= -HALF {
            0.0
        } else if t >= HALF {
            t
        } else {
            self.ramp_integral_table.eval(t + HALF).max(0.0)
        }
    }

    /// Direct quadrature of `phi` via the Fubini form
    /// `∫_0^s lambda = (1/alpha) ∫_0^s w(y) (s - y) dy`, `s = t + 1/2`,
    /// independent of both caches.
    pub fn phi_quadrature(&self, t: f64) -> f64 {
        if t <= -HALF {
            return 0.0;
        }
        if t >= HALF {
            return t;
        }
        let s = t + HALF;
        quad::integrate(&|y: f64| ramp_weight(y) * (s - y), 0.0, s, self.quad_tol) / self.alpha
    }

    /// `lambda_eps(t) = lambda((t - eps) / (1 - 2 eps))`: 0 for `t <= eps`,
    /// 1 for `t >= 1 - eps`.
    pub fn lambda_eps(&self, params: &SmoothingParams, t: f64) -> f64 {
        let e = params.epsilon;
        self.lambda((t - e) / (1.0 - 2.0 * e))
    }

    /// `p_a(x)`: `phi(3/2 x - a)/x` for `x > 0`, 0 for `x < (2a-1)/3`.
    /// The branches agree on their overlap because `phi` vanishes there.
    /// Requires `a > 1/2` and `x >= 0`.
    pub fn p_a(&self, a: f64, x: f64) -> f64 {
        debug_assert!(a > 0.5 && x >= 0.0);
        p_a_generic(self, a, x)
    }

    /// Collar profile `f(t, x) = x + t * lambda_eps(4 - 2x)`.
    pub fn f_profile(&self, params: &SmoothingParams, t: f64, x: f64) -> f64 {
        x + t * self.lambda_eps(params, 4.0 - 2.0 * x)
    }

    /// Collar profile `g(t, x) = x - t * lambda_eps(2x)`.
    pub fn g_profile(&self, params: &SmoothingParams, t: f64, x: f64) -> f64 {
        x - t * self.lambda_eps(params, 2.0 * x)
    }
}

/// `s(x) = sin(pi/2 x)/x` for `x != 0`, `pi/2` at `x = 0`. Even and analytic;
/// below `|x| = 1e-4` a 4-term Taylor branch avoids cancellation.
pub fn s_func(x: f64) -> f64 {
    s_generic(x)
}

// ---------------------------------------------------------------------------
// Generic scalar plumbing shared by the f64 and dual-number evaluation paths,
// so Jacobians are differentiated through the same formulas they evaluate.
// ---------------------------------------------------------------------------

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn lift(x: f64) -> Self;
    fn value(self) -> f64;
    fn cos(self) -> Self;
    fn sin(self) -> Self;
    fn abs(self) -> Self;
    fn phi(ctx: &KernelContext, x: Self) -> Self;
}

impl Scalar for f64 {
    fn lift(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn phi(ctx: &KernelContext, x: Self) -> Self {
        ctx.phi(x)
    }
}

impl Scalar for Dual {
    fn lift(x: f64) -> Self {
        Dual::constant(x)
    }
    fn value(self) -> f64 {
        self.val
    }
    fn cos(self) -> Self {
        Dual::cos(self)
    }
    fn sin(self) -> Self {
        Dual::sin(self)
    }
    fn abs(self) -> Self {
        Dual::abs(self)
    }
    fn phi(ctx: &KernelContext, x: Self) -> Self {
        // phi'(t) = lambda(1/2 + t), exact chain rule
        Dual::new(ctx.phi(x.val), ctx.lambda(HALF + x.val) * x.der)
    }
}

pub(crate) fn p_a_generic<T: Scalar>(ctx: &KernelContext, a: f64, x: T) -> T {
    if x.value() <= (2.0 * a - 1.0) / 3.0 {
        // phi(3/2 x - a) = 0 on this range, both branches agree
        T::lift(0.0)
    } else {
        T::phi(ctx, T::lift(1.5) * x - T::lift(a)) / x
    }
}

pub(crate) fn s_generic<T: Scalar>(x: T) -> T {
    let half_pi = std::f64::consts::FRAC_PI_2;
    if x.value().abs() < 1e-4 {
        let z = T::lift(half_pi) * x;
        let z2 = z * z;
        let one = T::lift(1.0);
        T::lift(half_pi)
            * (one - z2 * (T::lift(1.0 / 6.0) - z2 * (T::lift(1.0 / 120.0) - z2 * T::lift(1.0 / 5040.0))))
    } else {
        (T::lift(half_pi) * x).sin() / x
    }
}
