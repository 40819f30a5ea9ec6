//! Exact under-barrier mechanics at energy `E` by direct quadrature.
//!
//! Motion in the upturned potential `-V` at energy `-E` runs between the
//! turning points `±q_t`, where `V(q_t) = E` and `0 < q_t < a`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::DoubleWell;
use crate::quadrature::{find_root, integrate, integrate_with_offsets, QuadratureConfig};

fn check_energy<W: DoubleWell + ?Sized>(well: &W, energy: f64) -> Result<()> {
    let v_max = well.barrier_height();
    if energy > 0.0 && energy < v_max {
        Ok(())
    } else {
        Err(Error::EOutOfRange {
            energy,
            lo: 0.0,
            hi: v_max,
        })
    }
}

/// Root of `V(q) = E` in `(0, a)`.
pub fn turning_point<W: DoubleWell + ?Sized>(well: &W, energy: f64) -> Result<f64> {
    check_energy(well, energy)?;
    let a = well.well_position();
    find_root(|q| well.value(q) - energy, 0.0, a, 4.0 * f64::EPSILON * a)
}

/// `S(E) = 2 ∫_{-q_t}^{q_t} sqrt(2m (V - E)) dq`.
pub fn action_exact<W: DoubleWell + ?Sized>(
    well: &W,
    energy: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let q_t = turning_point(well, energy)?;
    let m = well.ctx().mass;
    let r = integrate(
        |q| (2.0 * m * (well.value(q) - energy).max(0.0)).sqrt(),
        0.0,
        q_t,
        quad,
    )?;
    Ok(4.0 * r.value)
}

/// Distance from `q_t` (relative to `q_t`) inside which `V - E` is taken
/// from its linear expansion, since the direct difference is all rounding there.
const LINEAR_ZONE: f64 = 1e-9;

/// `t₂(E) = ∫_0^{q_t} m dq / sqrt(2m (V - E))`, the quarter period.
pub fn quarter_time_exact<W: DoubleWell + ?Sized>(
    well: &W,
    energy: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let q_t = turning_point(well, energy)?;
    let m = well.ctx().mass;
    let edge_slope = well.slope(q_t).abs();
    let zone = LINEAR_ZONE * q_t;
    let r = integrate_with_offsets(
        |q, _, to_turn| {
            let gap = if to_turn < zone {
                edge_slope * to_turn
            } else {
                well.value(q) - energy
            };
            if gap > 0.0 {
                m / (2.0 * m * gap).sqrt()
            } else {
                0.0
            }
        },
        0.0,
        q_t,
        quad,
    )?;
    Ok(r.value)
}

/// `T(E) = sqrt(2m) ∫_{-q_t}^{q_t} dq / sqrt(V - E)`, four quarter periods.
pub fn period_exact<W: DoubleWell + ?Sized>(
    well: &W,
    energy: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    Ok(4.0 * quarter_time_exact(well, energy, quad)?)
}

/// Harmonic duration from distance `Q_E = sqrt(2E/m)/ω` out to momentum `P`:
/// `(1/ω) asinh(P/(m ω Q_E))`.
pub fn quarter_time_harmonic<W: DoubleWell + ?Sized>(well: &W, energy: f64) -> Result<f64> {
    check_energy(well, energy)?;
    let m = well.ctx().mass;
    let omega = well.omega();
    let q_e = (2.0 * energy / m).sqrt() / omega;
    Ok((well.p_central() / (m * omega * q_e)).asinh() / omega)
}

/// `t₂(E) - t₁(E)`, which tends to the separatrix time defect as `E -> 0`.
pub fn quarter_defect<W: DoubleWell + ?Sized>(
    well: &W,
    energy: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    Ok(quarter_time_exact(well, energy, quad)? - quarter_time_harmonic(well, energy)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonFit {
    pub epsilon: f64,
    /// `(E_k, E_k exp(ω T(E_k)/2))`.
    pub samples: Vec<(f64, f64)>,
    /// Enough samples, successive estimates settling, and the extrapolation
    /// step below 1% of the result.
    pub converged: bool,
}

/// Sample-to-sample changes below this fraction of ε count as settled.
const SETTLED: f64 = 1e-9;

/// Recovers ε from exact periods: `ε_k = E_k exp(ω T(E_k)/2)` extrapolated to
/// `E -> 0` with the model `ε + c₁ E ln E + c₂ E` (as many terms as samples allow).
pub fn fit_epsilon<W: DoubleWell + ?Sized>(
    well: &W,
    energies: &[f64],
    quad: &QuadratureConfig,
) -> Result<EpsilonFit> {
    if energies.is_empty() {
        return Err(Error::InvalidConfig(
            "at least one energy sample required".into(),
        ));
    }
    if energies.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig(
            "energy samples must decrease toward 0".into(),
        ));
    }
    let omega = well.omega();
    let samples = energies
        .iter()
        .map(|&e| Ok((e, e * (0.5 * omega * period_exact(well, e, quad)?).exp())))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let last = *values.last().unwrap();
    let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let floor = SETTLED * last.abs();
    let settling = steps.windows(2).all(|s| s[1] < s[0] || s[1] <= floor);
    if values.len() >= 3 && !settling {
        return Err(Error::NotConverging(values));
    }
    let epsilon = extrapolate(&samples);
    let converged = values.len() >= 3 && ((epsilon - last) / epsilon).abs() < 0.01;
    Ok(EpsilonFit {
        epsilon,
        samples,
        converged,
    })
}

/// Least-squares intercept of `y = c₀ + c₁ E ln E + c₂ E`.
fn extrapolate(samples: &[(f64, f64)]) -> f64 {
    let terms = samples.len().min(3);
    let basis = |e: f64| [1.0, e * e.ln(), e];
    // columns scaled to unit norm before forming the normal equations
    let mut scale = [0.0f64; 3];
    for &(e, _) in samples {
        for (s, b) in scale.iter_mut().zip(basis(e)) {
            *s += b * b;
        }
    }
    let scale = scale.map(f64::sqrt);
    let mut a = [[0.0f64; 4]; 3];
    for &(e, y) in samples {
        let b = basis(e);
        for i in 0..terms {
            for j in 0..terms {
                a[i][j] += b[i] / scale[i] * b[j] / scale[j];
            }
            a[i][3] += b[i] / scale[i] * y;
        }
    }
    solve(&mut a, terms)[0] / scale[0]
}

/// Gaussian elimination with partial pivoting on an augmented `n × (n+1)` block.
fn solve(a: &mut [[f64; 4]; 3], n: usize) -> [f64; 3] {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..=3 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][3] - tail) / a[row][row];
    }
    x
}
