//! Tanh-sinh quadrature and bracketed root finding.
//!
//! The double-exponential substitution `x = tanh(π/2 · sinh t)` clusters nodes
//! at both endpoints so fast that integrable endpoint singularities (inverse
//! square roots, square-root zeros) do not degrade convergence. Each level
//! halves the step in `t` and reuses every node of the previous level.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_levels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_levels: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "quadrature tolerances must be > 0".into(),
            ));
        }
        if self.max_levels < 4 {
            return Err(Error::InvalidConfig("max_levels must be >= 4".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }
}

/// Value of an integral with its error estimate (difference of the last two levels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub levels: usize,
    pub evaluations: usize,
}

/// Levels below this are never accepted as converged.
const MIN_LEVELS: usize = 3;

/// Integrates `f` over `[lo, hi]` (either orientation).
pub fn integrate<F>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    tanh_sinh(&|x, _, _| f(x), lo, hi, cfg, false)
}

/// Like [`integrate`], but `f(x, x - lo, hi - x)` also receives the node's
/// distances from both endpoints, computed without cancellation. Integrands
/// with an endpoint singularity should evaluate it from the offset, because
/// `x` itself rounds to the endpoint long before the nodes stop.
pub fn integrate_with_offsets<F>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64, f64, f64) -> f64,
{
    tanh_sinh(&f, lo, hi, cfg, true)
}

/// With `exact_offsets`, nodes keep being sampled after `x` has rounded onto an
/// endpoint, since the integrand works from the offsets instead.
fn tanh_sinh(
    f: &dyn Fn(f64, f64, f64) -> f64,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
    exact_offsets: bool,
) -> Result<Integral> {
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "non-finite integration limits [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            levels: 0,
            evaluations: 0,
        });
    }
    if hi < lo {
        let r = tanh_sinh(&|x, dl, dh| f(x, dh, dl), hi, lo, cfg, exact_offsets)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }

    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut evaluations = 0usize;

    let mut sample = |x: f64, d_lo: f64, d_hi: f64| -> Result<f64> {
        let y = f(x, d_lo, d_hi);
        evaluations += 1;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteSample { x })
        }
    };

    // Weighted sum over the nodes t = j*h of one level; `odd_only` keeps the
    // nodes that are new at this level.
    let mut sweep = |h: f64, odd_only: bool| -> Result<f64> {
        let mut sum = 0.0;
        if !odd_only {
            sum += FRAC_PI_2 * sample(mid, half, half)?;
        }
        let mut j: u64 = 1;
        let step = if odd_only { 2 } else { 1 };
        loop {
            let t = j as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let cosh_u = u.cosh();
            let weight = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
            // distance of the node pair from the endpoints
            let offset = half / (u.exp() * cosh_u);
            let left = lo + offset;
            let right = hi - offset;
            let left_ok = exact_offsets || left > lo;
            let right_ok = exact_offsets || right < hi;
            if !(weight > 0.0 && offset > 0.0) || !(left_ok || right_ok) {
                break;
            }
            let inner = 2.0 * half - offset;
            if left_ok {
                sum += weight * sample(left, offset, inner)?;
            }
            if right_ok {
                sum += weight * sample(right, inner, offset)?;
            }
            j += step;
        }
        Ok(sum)
    };

    let mut h = 1.0;
    let mut sum = sweep(h, false)?;
    let mut previous = half * h * sum;
    let mut error = f64::INFINITY;
    for level in 1..=cfg.max_levels {
        h *= 0.5;
        sum += sweep(h, true)?;
        let current = half * h * sum;
        error = (current - previous).abs();
        let target = cfg.abs_tol.max(cfg.rel_tol * current.abs());
        if level >= MIN_LEVELS && error <= target {
            return Ok(Integral {
                value: current,
                error,
                levels: level,
                evaluations,
            });
        }
        previous = current;
    }
    Err(Error::NoConvergence {
        value: previous,
        error,
        levels: cfg.max_levels,
    })
}

/// Root of `f` in `[lo, hi]` by bisection safeguarded secant steps.
///
/// Returns once the bracket is no wider than `tol` or an exact zero is hit.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoBracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut bisect_next = false;
    for _ in 0..400 {
        let width = b - a;
        if width <= tol {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let secant = b - fb * (b - a) / (fb - fa);
        // Alternate secant and bisection whenever the secant step lands near an end of the bracket.
        let x = if !bisect_next && secant > a + 0.05 * width && secant < b - 0.05 * width {
            secant
        } else {
            0.5 * (a + b)
        };
        bisect_next = !bisect_next && x == secant;
        if x <= a || x >= b {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::NonFiniteSample { x });
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
    }
    Err(Error::RootNoConvergence { lo: a, hi: b })
}
