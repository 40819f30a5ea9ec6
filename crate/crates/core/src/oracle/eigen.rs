//! Lowest two levels of `-(ħ²/2m) d²/dq² + V` by finite differences.
//!
//! Second-order central differences on a uniform grid with Dirichlet ends
//! give a symmetric tridiagonal matrix. Individual eigenvalues are bracketed
//! by Sturm-sequence bisection, so the tiny gap between the two lowest levels
//! is never lost to deflation or shifts. Grid doublings are combined by
//! Richardson extrapolation in `h²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{DoubleWell, PhysicalContext};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub box_half_width: f64,
    /// Grid intervals on `[-L, L]` at the coarsest level.
    pub n_points: usize,
    /// Number of grid doublings (Richardson steps).
    pub refinement_levels: usize,
}

impl GridConfig {
    pub const DEFAULT_POINTS: usize = 4096;
    pub const DEFAULT_LEVELS: usize = 3;

    /// Six ground-state widths `sqrt(ħ/(mω))` past the wells.
    pub fn for_well<W: DoubleWell + ?Sized>(well: &W) -> Self {
        let ctx = well.ctx();
        Self {
            box_half_width: well.well_position()
                + 6.0 * (ctx.hbar / (ctx.mass * well.omega())).sqrt(),
            n_points: Self::DEFAULT_POINTS,
            refinement_levels: Self::DEFAULT_LEVELS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.box_half_width > 0.0 && self.box_half_width.is_finite()) {
            return Err(Error::InvalidConfig(
                "box_half_width must be positive".into(),
            ));
        }
        if self.n_points < 64 {
            return Err(Error::InvalidConfig("n_points must be >= 64".into()));
        }
        if self.refinement_levels < 1 {
            return Err(Error::InvalidConfig(
                "refinement_levels must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Raw eigenvalues on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridLevel {
    pub intervals: usize,
    pub e0: f64,
    pub e1: f64,
    /// `16 ε_mach ‖H‖∞`, the resolution of the bisection on this grid.
    pub noise_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelPair {
    pub e0: f64,
    pub e1: f64,
    pub delta_e_exact: f64,
    /// Error bar on `delta_e_exact`.
    pub delta_e_error: f64,
    pub e0_error: f64,
    pub e1_error: f64,
    pub levels: Vec<GridLevel>,
    /// Ground state even and first excited state odd under `q -> -q`.
    pub parity_ok: bool,
}

/// Eigenvalue count strictly below `lambda` (negative pivots of `H - λ`).
pub fn sturm_count(diag: &[f64], off: f64, lambda: f64) -> usize {
    let off_sq = off * off;
    let guard = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut pivot = diag[0] - lambda;
    if pivot < 0.0 {
        count += 1;
    }
    for &d in &diag[1..] {
        let safe = if pivot.abs() < guard {
            guard.copysign(pivot)
        } else {
            pivot
        };
        pivot = (d - lambda) - off_sq / safe;
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// k-th smallest eigenvalue (0-based) by bisection to adjacent floats.
pub fn kth_eigenvalue(diag: &[f64], off: f64, k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

fn gershgorin(diag: &[f64], off: f64) -> (f64, f64) {
    let r = 2.0 * off.abs();
    let lo = diag.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - r;
    let hi = diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + r;
    (lo, hi)
}

struct Discretization {
    diag: Vec<f64>,
    off: f64,
}

fn discretize(
    potential: &dyn Fn(f64) -> f64,
    ctx: PhysicalContext,
    half_width: f64,
    intervals: usize,
) -> Discretization {
    let h = 2.0 * half_width / intervals as f64;
    let kinetic = ctx.hbar * ctx.hbar / (2.0 * ctx.mass * h * h);
    let diag = (1..intervals)
        .map(|i| 2.0 * kinetic + potential(-half_width + h * i as f64))
        .collect();
    Discretization {
        diag,
        off: -kinetic,
    }
}

/// Inverse iteration for the eigenvector nearest `shift`.
fn inverse_iteration(diag: &[f64], off: f64, shift: f64) -> Vec<f64> {
    let n = diag.len();
    let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * off.abs();
    let tiny = f64::EPSILON * scale;
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (i as f64 / n as f64)).collect();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    for _ in 0..4 {
        // Thomas algorithm on (H - shift) y = x.
        let mut pivot = diag[0] - shift;
        if pivot.abs() < tiny {
            pivot = tiny;
        }
        c[0] = off / pivot;
        y[0] = x[0] / pivot;
        for i in 1..n {
            pivot = diag[i] - shift - off * c[i - 1];
            if pivot.abs() < tiny {
                pivot = tiny;
            }
            c[i] = off / pivot;
            y[i] = (x[i] - off * y[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    x
}

/// `<ψ | P ψ>` for the reflection `P`: +1 even, -1 odd.
fn parity(v: &[f64]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i] * v[n - 1 - i]).sum::<f64>() / v.iter().map(|x| x * x).sum::<f64>()
}

fn tail_fraction(v: &[f64]) -> f64 {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    v[0].abs().max(v[v.len() - 1].abs()) / peak
}

/// Largest edge amplitude (relative to the peak) accepted for either eigenvector.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Richardson table in `h²`; returns the extrapolated value and the change
/// between the last two diagonal entries.
fn richardson(values: &[f64]) -> (f64, f64) {
    let mut prev_row: Vec<f64> = vec![values[0]];
    let mut prev_best = values[0];
    let mut best = values[0];
    let mut change = f64::INFINITY;
    for &v in &values[1..] {
        let mut row = vec![v];
        let mut factor = 1.0;
        for k in 0..prev_row.len() {
            factor *= 4.0;
            let refined = row[k] + (row[k] - prev_row[k]) / (factor - 1.0);
            row.push(refined);
        }
        best = *row.last().unwrap();
        change = (best - prev_best).abs();
        prev_best = best;
        prev_row = row;
    }
    (best, change)
}

/// The two lowest levels of an arbitrary potential on `[-L, L]`.
pub fn lowest_two_levels(
    potential: &dyn Fn(f64) -> f64,
    ctx: PhysicalContext,
    grid: &GridConfig,
) -> Result<LevelPair> {
    grid.validate()?;
    let mut levels = Vec::with_capacity(grid.refinement_levels + 1);
    let mut parity_ok = false;
    for j in 0..=grid.refinement_levels {
        let intervals = grid.n_points << j;
        let disc = discretize(potential, ctx, grid.box_half_width, intervals);
        let e0 = kth_eigenvalue(&disc.diag, disc.off, 0);
        let e1 = kth_eigenvalue(&disc.diag, disc.off, 1);
        let (lo, hi) = gershgorin(&disc.diag, disc.off);
        let noise_floor = 16.0 * f64::EPSILON * lo.abs().max(hi.abs());
        if e1 - e0 <= noise_floor {
            return Err(Error::NoSeparation {
                delta: e1 - e0,
                floor: noise_floor,
            });
        }
        if j == 0 {
            let edge = potential(grid.box_half_width).min(potential(-grid.box_half_width));
            if edge < 10.0 * e1 {
                return Err(Error::BoxTooSmall(format!(
                    "V at the box edge ({edge:e}) is below 10 e1 ({:e})",
                    10.0 * e1
                )));
            }
            let ground = inverse_iteration(&disc.diag, disc.off, e0);
            let excited = inverse_iteration(&disc.diag, disc.off, e1);
            let tail = tail_fraction(&ground).max(tail_fraction(&excited));
            if tail > TAIL_TOLERANCE {
                return Err(Error::BoxTooSmall(format!(
                    "eigenfunction amplitude at the box edge is {tail:e} of its peak"
                )));
            }
            parity_ok = parity(&ground) > 0.99 && parity(&excited) < -0.99;
        }
        levels.push(GridLevel {
            intervals,
            e0,
            e1,
            noise_floor,
        });
    }
    let column = |f: fn(&GridLevel) -> f64| levels.iter().map(f).collect::<Vec<_>>();
    let (e0, e0_error) = richardson(&column(|l| l.e0));
    let (e1, e1_error) = richardson(&column(|l| l.e1));
    let (delta, delta_change) = richardson(&column(|l| l.e1 - l.e0));
    let route_gap = ((e1 - e0) - delta).abs();
    Ok(LevelPair {
        e0,
        e1,
        delta_e_exact: delta,
        delta_e_error: delta_change.max(route_gap),
        e0_error,
        e1_error,
        levels,
        parity_ok,
    })
}

/// Exact (grid-converged) ground doublet of a double well.
pub fn eigen_splitting<W: DoubleWell + ?Sized>(well: &W, grid: &GridConfig) -> Result<LevelPair> {
    if grid.box_half_width <= well.well_position() {
        return Err(Error::BoxTooSmall(format!(
            "box half-width {} does not enclose the wells at ±{}",
            grid.box_half_width,
            well.well_position()
        )));
    }
    lowest_two_levels(&|q| well.value(q), well.ctx(), grid)
}
