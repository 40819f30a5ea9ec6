//! Brute-force references for the semiclassical chain: the finite-difference
//! spectrum and exact classical action, period and durations.

mod classical;
mod eigen;

pub use classical::{
    action_exact, fit_epsilon, period_exact, quarter_defect, quarter_time_exact,
    quarter_time_harmonic, turning_point, EpsilonFit,
};
pub use eigen::{
    eigen_splitting, kth_eigenvalue, lowest_two_levels, sturm_count, GridConfig, GridLevel,
    LevelPair, TAIL_TOLERANCE,
};

use serde::Serialize;

use crate::error::Result;
use crate::potential::DoubleWell;
use crate::quadrature::QuadratureConfig;

/// Sample energies as fractions of the barrier height.
pub const SAMPLE_FRACTIONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub e0: f64,
    pub e1: f64,
    pub delta_e_exact: f64,
    pub delta_e_error: f64,
    pub epsilon_fit: f64,
    pub epsilon_fit_converged: bool,
    pub s_exact_samples: Vec<(f64, f64)>,
    pub t_exact_samples: Vec<(f64, f64)>,
    /// `(E, t₂(E) - t₁(E))`.
    pub quarter_defect_samples: Vec<(f64, f64)>,
}

/// Spectrum plus classical samples at `SAMPLE_FRACTIONS · V_max`.
pub fn run_oracle<W: DoubleWell + ?Sized>(
    well: &W,
    grid: &GridConfig,
    quad: &QuadratureConfig,
) -> Result<OracleReport> {
    let levels = eigen_splitting(well, grid)?;
    let energies: Vec<f64> = SAMPLE_FRACTIONS
        .iter()
        .map(|f| f * well.barrier_height())
        .collect();
    let fit = fit_epsilon(well, &energies, quad)?;
    let sample = |f: &dyn Fn(f64) -> Result<f64>| {
        energies
            .iter()
            .map(|&e| Ok((e, f(e)?)))
            .collect::<Result<Vec<_>>>()
    };
    Ok(OracleReport {
        e0: levels.e0,
        e1: levels.e1,
        delta_e_exact: levels.delta_e_exact,
        delta_e_error: levels.delta_e_error,
        epsilon_fit: fit.epsilon,
        epsilon_fit_converged: fit.converged,
        s_exact_samples: sample(&|e| action_exact(well, e, quad))?,
        t_exact_samples: fit
            .samples
            .iter()
            .map(|&(e, eps_k)| (e, 2.0 / well.omega() * (eps_k / e).ln()))
            .collect(),
        quarter_defect_samples: sample(&|e| quarter_defect(well, e, quad))?,
    })
}
