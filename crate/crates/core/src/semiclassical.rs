//! The explicit semiclassical chain for the ground-state doublet.
//!
//! Everything here is a closed formula or a regular one-dimensional integral
//! of the potential:
//!
//! * `S0 = 2 ∫ sqrt(2 m V) dq` over `[-a, a]` (separatrix area);
//! * the separatrix time defect `∫_0^P (m/p) (dq/dp|_sep - 1/(m ω)) dp`, taken
//!   in the q-parametrisation `∫_0^a (m/p(q)) (1 - |V'(q)| / (ω p(q))) dq`, where
//!   `p(q) = sqrt(2 m V(q))`;
//! * `ε = (2 P²/m) exp(2 ω · defect)`;
//! * `T(E) = -(2/ω) ln(E/ε)` and the near-separatrix action `S(E)`;
//! * `ΔE = sqrt(π/e) (ħω/π) exp(-S/2ħ)` at `E = ħω/2`.
//!
//! The single-well WKB tail with Herring's flux formula gives a second,
//! quadrature-based route to the same splitting ([`splitting_wkb_direct`]).

use std::f64::consts::{E as EULER, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::DoubleWell;
use crate::quadrature::{find_root, integrate, QuadratureConfig};

/// Which closed form is used for the near-separatrix action `S(E)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionAsymptote {
    /// `S0 + (2E/ω)(ln(E/ε) - 1)`: the antiderivative of `-T(E)` that vanishes
    /// relative to `S0` at `E = 0`, so `-dS/dE = T` holds exactly.
    #[default]
    PeriodConsistent,
    /// `S0 + (2E/ω) ln(E/ε)`, without the linear term. Its `-dS/dE` is
    /// `T - 2/ω`, and it underestimates the splitting by a factor `sqrt(e)`.
    BareLog,
}

/// Lower limit of the tunnelling integral in [`splitting_wkb_direct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchPoint {
    /// Distance `Q = sqrt(ħ/(mω))` from the well minimum, where the harmonic
    /// `k` vanishes. The radicand is clipped at zero where the true `V` dips
    /// below `ħω/2`.
    #[default]
    HarmonicDistance,
    /// The inner turning point where `V = ħω/2`.
    TurningPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SemiclassicalConfig {
    pub quad: QuadratureConfig,
    pub action: ActionAsymptote,
    pub match_point: MatchPoint,
}

/// The potential-dependent constants of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparatrixConstants {
    pub s0: f64,
    pub defect: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub v_max: f64,
    pub mass: f64,
}

impl SeparatrixConstants {
    pub fn compute<W: DoubleWell + ?Sized>(well: &W, cfg: &SemiclassicalConfig) -> Result<Self> {
        let s0 = separatrix_area(well, &cfg.quad)?;
        let defect = time_defect(well, &cfg.quad)?;
        let mass = well.ctx().mass;
        Ok(Self {
            s0,
            defect,
            epsilon: epsilon_from_defect(well, defect),
            omega: well.omega(),
            v_max: well.barrier_height(),
            mass,
        })
    }

    pub fn action(&self, energy: f64, form: ActionAsymptote) -> Result<f64> {
        if !(energy > 0.0 && energy < self.v_max) {
            return Err(Error::EOutOfRange {
                energy,
                lo: 0.0,
                hi: self.v_max,
            });
        }
        let log = (energy / self.epsilon).ln();
        let bracket = match form {
            ActionAsymptote::PeriodConsistent => log - 1.0,
            ActionAsymptote::BareLog => log,
        };
        Ok(self.s0 + 2.0 * energy / self.omega * bracket)
    }

    pub fn period(&self, energy: f64) -> Result<f64> {
        if !(energy > 0.0 && energy < self.epsilon) {
            return Err(Error::EOutOfRange {
                energy,
                lo: 0.0,
                hi: self.epsilon,
            });
        }
        Ok(-2.0 / self.omega * (energy / self.epsilon).ln())
    }
}

/// `S0 = 2 ∫_{-a}^{a} sqrt(2 m V) dq`.
pub fn separatrix_area<W: DoubleWell + ?Sized>(well: &W, quad: &QuadratureConfig) -> Result<f64> {
    let m = well.ctx().mass;
    let a = well.well_position();
    let r = integrate(|q| (2.0 * m * well.value(q).max(0.0)).sqrt(), -a, a, quad)?;
    Ok(2.0 * r.value)
}

/// Fraction of `[0, a]` next to the well bottom that is integrated with fixed
/// Gauss-Legendre nodes, so the cancellation in `1 - |V'|/(ω p)` as `p -> 0`
/// is never probed at rounding-level distances from `a`.
const WELL_END_FRACTION: f64 = 1e-3;

/// Finite difference `t2sep - t1sep` of the separatrix traversal times of the
/// true well and its harmonic approximation.
pub fn time_defect<W: DoubleWell + ?Sized>(well: &W, quad: &QuadratureConfig) -> Result<f64> {
    let m = well.ctx().mass;
    let omega = well.omega();
    let a = well.well_position();
    let integrand = |q: f64| -> f64 {
        let p = (2.0 * m * well.value(q).max(0.0)).sqrt();
        (m / p) * (1.0 - well.slope(q).abs() / (omega * p))
    };
    let split = a * (1.0 - WELL_END_FRACTION);
    let bulk = integrate(integrand, 0.0, split, quad)?.value;
    Ok(bulk + gauss_legendre_5(integrand, split, a))
}

fn gauss_legendre_5(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const NODES: [(f64, f64); 5] = [
        (0.0, 0.568_888_888_888_888_9),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
        (0.906_179_845_938_664, 0.236_926_885_056_189_08),
    ];
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    half * NODES
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

fn epsilon_from_defect<W: DoubleWell + ?Sized>(well: &W, defect: f64) -> f64 {
    let p = well.p_central();
    2.0 * p * p / well.ctx().mass * (2.0 * well.omega() * defect).exp()
}

/// `ε = (2 P²/m) exp(2 ω · defect)`.
pub fn epsilon_constant<W: DoubleWell + ?Sized>(well: &W, quad: &QuadratureConfig) -> Result<f64> {
    Ok(epsilon_from_defect(well, time_defect(well, quad)?))
}

/// Near-separatrix action `S(E)` of the upturned-potential orbit, `0 < E < V_max`.
pub fn action_s<W: DoubleWell + ?Sized>(
    well: &W,
    energy: f64,
    cfg: &SemiclassicalConfig,
) -> Result<f64> {
    SeparatrixConstants::compute(well, cfg)?.action(energy, cfg.action)
}

/// Near-separatrix period `T(E) = -(2/ω) ln(E/ε)`, `0 < E < ε`.
pub fn period_t<W: DoubleWell + ?Sized>(
    well: &W,
    energy: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let defect = time_defect(well, quad)?;
    let epsilon = epsilon_from_defect(well, defect);
    if !(energy > 0.0 && energy < epsilon) {
        return Err(Error::EOutOfRange {
            energy,
            lo: 0.0,
            hi: epsilon,
        });
    }
    Ok(-2.0 / well.omega() * (energy / epsilon).ln())
}

/// Quarter-orbit time bookkeeping for the harmonic matching at `E = ħω/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeBudget {
    /// `Q` with `m ω² Q²/2 = ħω/2`.
    pub q_match: f64,
    /// `(1/ω) ln(2P/(m ω Q))`.
    pub t1_leading: f64,
    /// `(1/ω) asinh(P/(m ω Q))`, the exact hyperbola duration.
    pub t1_exact_harmonic: f64,
    pub defect: f64,
    /// `4 (t1_leading + defect)`.
    pub period_eq7: f64,
}

pub fn time_budget<W: DoubleWell + ?Sized>(
    well: &W,
    quad: &QuadratureConfig,
) -> Result<TimeBudget> {
    let ctx = well.ctx();
    let omega = well.omega();
    let q_match = match_distance(well)?;
    let ratio = well.p_central() / (ctx.mass * omega * q_match);
    let t1_leading = (2.0 * ratio).ln() / omega;
    let t1_exact_harmonic = ratio.asinh() / omega;
    let defect = time_defect(well, quad)?;
    Ok(TimeBudget {
        q_match,
        t1_leading,
        t1_exact_harmonic,
        defect,
        period_eq7: 4.0 * (t1_leading + defect),
    })
}

fn match_distance<W: DoubleWell + ?Sized>(well: &W) -> Result<f64> {
    let ctx = well.ctx();
    let q_match = (ctx.hbar / (ctx.mass * well.omega())).sqrt();
    let a = well.well_position();
    if q_match >= a {
        return Err(Error::MatchPointOutsideWell { q_match, a });
    }
    Ok(q_match)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemiclassicalReport {
    pub s0: f64,
    pub epsilon: f64,
    /// `E = ħω/2`.
    pub e_ground_ref: f64,
    pub s_action: f64,
    pub period: f64,
    pub delta_e: f64,
    pub e_minus: f64,
    pub e_plus: f64,
    /// Instanton flipping rate `ΔE / (2πħ)`.
    pub flip_rate: f64,
}

fn zero_point_energy<W: DoubleWell + ?Sized>(well: &W) -> Result<f64> {
    let zero_point = 0.5 * well.ctx().hbar * well.omega();
    let v_max = well.barrier_height();
    if zero_point >= v_max {
        return Err(Error::BarrierTooLow { zero_point, v_max });
    }
    Ok(zero_point)
}

/// Ground-state doublet `E± = ħω/2 ∓ ΔE/2`.
pub fn ground_splitting<W: DoubleWell + ?Sized>(
    well: &W,
    cfg: &SemiclassicalConfig,
) -> Result<SemiclassicalReport> {
    zero_point_energy(well)?;
    let consts = SeparatrixConstants::compute(well, cfg)?;
    splitting_from_constants(&consts, well.ctx().hbar, cfg.action)
}

/// The doublet from precomputed constants; useful when sweeping `ħ`.
pub fn splitting_from_constants(
    consts: &SeparatrixConstants,
    hbar: f64,
    form: ActionAsymptote,
) -> Result<SemiclassicalReport> {
    let energy = 0.5 * hbar * consts.omega;
    if energy >= consts.v_max {
        return Err(Error::BarrierTooLow {
            zero_point: energy,
            v_max: consts.v_max,
        });
    }
    let s_action = consts.action(energy, form)?;
    let period = consts.period(energy)?;
    let delta_e =
        (PI / EULER).sqrt() * (hbar * consts.omega / PI) * (-s_action / (2.0 * hbar)).exp();
    Ok(SemiclassicalReport {
        s0: consts.s0,
        epsilon: consts.epsilon,
        e_ground_ref: energy,
        s_action,
        period,
        delta_e,
        e_minus: energy - 0.5 * delta_e,
        e_plus: energy + 0.5 * delta_e,
        flip_rate: delta_e / (2.0 * PI * hbar),
    })
}

/// The same splitting with `S` eliminated: `sqrt(2εħω/(π e)) exp(-S0/2ħ)` for
/// the bare-log action, times `sqrt(e)` for the period-consistent one.
pub fn splitting_closed_form(
    consts: &SeparatrixConstants,
    hbar: f64,
    form: ActionAsymptote,
) -> f64 {
    let base = (2.0 * consts.epsilon * hbar * consts.omega / (PI * EULER)).sqrt()
        * (-consts.s0 / (2.0 * hbar)).exp();
    match form {
        ActionAsymptote::BareLog => base,
        ActionAsymptote::PeriodConsistent => base * EULER.sqrt(),
    }
}

/// WKB tail of the single-well ground state continued to the barrier centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WkbTail {
    /// `mω / (ħ sqrt(4πe))`.
    pub norm_sq: f64,
    /// `∫ k du` from the matching point to the barrier centre.
    pub k_integral: f64,
    /// `2 (ħ²/m) N² exp(-2 ∫ k)`.
    pub delta_e_herring: f64,
}

/// Splitting from Herring's formula applied to the WKB tail.
pub fn splitting_wkb_direct<W: DoubleWell + ?Sized>(
    well: &W,
    cfg: &SemiclassicalConfig,
) -> Result<WkbTail> {
    let ctx = well.ctx();
    let (m, hbar) = (ctx.mass, ctx.hbar);
    let energy = zero_point_energy(well)?;
    let a = well.well_position();
    let q_match = match_distance(well)?;
    // u measures the distance from the left minimum towards the centre: q = u - a.
    let u_turn = a - find_root(|q| well.value(q) - energy, 0.0, a, 4.0 * f64::EPSILON * a)?;
    // Between Q and an outer turning point the clipped radicand is zero, so
    // the integral starts at whichever comes later.
    let u_lo = match cfg.match_point {
        MatchPoint::HarmonicDistance => q_match.max(u_turn),
        MatchPoint::TurningPoint => u_turn,
    };
    let k = |u: f64| (2.0 * m * (well.value(u - a) - energy).max(0.0)).sqrt() / hbar;
    let k_integral = integrate(k, u_lo, a, &cfg.quad)?.value;
    let norm_sq = m * well.omega() / (hbar * (4.0 * PI * EULER).sqrt());
    Ok(WkbTail {
        norm_sq,
        k_integral,
        delta_e_herring: 2.0 * hbar * hbar / m * norm_sq * (-2.0 * k_integral).exp(),
    })
}
