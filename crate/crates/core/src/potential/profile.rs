use serde::{Deserialize, Serialize};

use super::expr::{eval_with_derivatives, PotentialExpr};
use crate::error::{Error, Result};
use crate::quadrature::find_root;

/// Mass and reduced Planck constant; fixes the unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalContext {
    pub mass: f64,
    pub hbar: f64,
}

impl PhysicalContext {
    pub fn new(mass: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidContext("mass>0 required"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidContext("hbar>0 required"));
        }
        Ok(Self { mass, hbar })
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self> {
        Self::new(self.mass, hbar)
    }
}

/// Anything the semiclassical chain and the oracles can treat as a symmetric
/// double well with minima at `±a` (where `V = 0`) and the barrier top at 0.
pub trait DoubleWell {
    fn ctx(&self) -> PhysicalContext;
    /// Position of the right-hand minimum.
    fn well_position(&self) -> f64;
    /// `V(0)` above the well bottoms.
    fn barrier_height(&self) -> f64;
    /// Small-oscillation angular frequency at the well bottom.
    fn omega(&self) -> f64;
    fn value(&self, q: f64) -> f64;
    /// `V'(q)`.
    fn slope(&self, q: f64) -> f64;

    /// Momentum at the barrier centre on the separatrix, `sqrt(2 m V_max)`.
    fn p_central(&self) -> f64 {
        (2.0 * self.ctx().mass * self.barrier_height()).sqrt()
    }
}

/// Knobs for [`analyze_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub q_search_max: f64,
    pub scan_points: usize,
    pub symmetry_points: usize,
    /// Relative tolerance of the `V(q) = V(-q)` check.
    pub tol_sym: f64,
    /// Curvature at the minimum below which the well counts as flat.
    pub tol_curvature: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            q_search_max: 10.0,
            scan_points: 256,
            symmetry_points: 64,
            tol_sym: 1e-10,
            tol_curvature: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialProfile {
    #[serde(serialize_with = "serialize_expr")]
    pub expr: PotentialExpr,
    pub ctx: PhysicalContext,
    /// Subtracted from the raw expression so that `V(a) = 0`.
    pub shift: f64,
    pub a: f64,
    pub v_max: f64,
    pub d2_at_well: f64,
    pub omega: f64,
    pub p_central: f64,
}

fn serialize_expr<S: serde::Serializer>(expr: &PotentialExpr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&expr.to_string())
}

impl PotentialProfile {
    /// Shifted `(V, V', V'')` at `q`.
    pub fn derivatives(&self, q: f64) -> Result<(f64, f64, f64)> {
        let (v, d1, d2) = eval_with_derivatives(&self.expr, q)?;
        Ok((v - self.shift, d1, d2))
    }

    /// `V''(0)`, negative at a barrier top.
    pub fn d2_at_top(&self) -> f64 {
        self.expr.jet(super::Jet::variable(0.0)).d2
    }

    /// Re-analyses `c * V` under the same physical context.
    pub fn scaled(&self, factor: f64) -> Result<PotentialProfile> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidConfig("scale>0 required".into()));
        }
        analyze_profile(&self.expr.scaled(factor), self.ctx)
    }

    pub fn with_hbar(&self, hbar: f64) -> Result<PotentialProfile> {
        Ok(PotentialProfile {
            ctx: self.ctx.with_hbar(hbar)?,
            ..self.clone()
        })
    }
}

impl DoubleWell for PotentialProfile {
    fn ctx(&self) -> PhysicalContext {
        self.ctx
    }
    fn well_position(&self) -> f64 {
        self.a
    }
    fn barrier_height(&self) -> f64 {
        self.v_max
    }
    fn omega(&self) -> f64 {
        self.omega
    }
    fn value(&self, q: f64) -> f64 {
        self.expr.eval(q) - self.shift
    }
    fn slope(&self, q: f64) -> f64 {
        self.expr.jet(super::Jet::variable(q)).d1
    }
    fn p_central(&self) -> f64 {
        self.p_central
    }
}

pub fn analyze_profile(expr: &PotentialExpr, ctx: PhysicalContext) -> Result<PotentialProfile> {
    analyze_profile_with(expr, ctx, &AnalysisConfig::default())
}

pub fn analyze_profile_with(
    expr: &PotentialExpr,
    ctx: PhysicalContext,
    cfg: &AnalysisConfig,
) -> Result<PotentialProfile> {
    let ctx = PhysicalContext::new(ctx.mass, ctx.hbar)?;
    if !(cfg.q_search_max > 0.0) || cfg.scan_points < 8 || cfg.symmetry_points < 4 {
        return Err(Error::InvalidConfig(
            "bad potential analysis configuration".into(),
        ));
    }
    let raw = |q: f64| eval_with_derivatives(expr, q);

    // A coarse symmetry screen over the whole search range, so that odd or
    // lopsided inputs are named as such before the minimum search.
    check_symmetry(expr, cfg.q_search_max, None, cfg)?;

    // First sign change of V' from - to + on (0, q_search_max].
    let step = cfg.q_search_max / cfg.scan_points as f64;
    let first_slope = raw(step)?.1;
    if !(first_slope < 0.0) {
        return Err(Error::NotDoubleWell(format!(
            "V'({step}) = {first_slope} >= 0: the potential does not descend from q = 0"
        )));
    }
    let mut bracket = None;
    for i in 2..=cfg.scan_points {
        let q = step * i as f64;
        if raw(q)?.1 >= 0.0 {
            bracket = Some((q - step, q));
            break;
        }
    }
    let (lo, hi) = bracket.ok_or_else(|| {
        Error::NotDoubleWell(format!("no interior minimum on (0, {}]", cfg.q_search_max))
    })?;
    let a = find_root(
        |q| expr.jet(super::Jet::variable(q)).d1,
        lo,
        hi,
        4.0 * f64::EPSILON * hi,
    )?;

    let (v_a, _, d2_at_well) = raw(a)?;
    let (v_0, _, _) = raw(0.0)?;
    let shift = v_a;
    let v_max = v_0 - shift;
    if !(v_max > 0.0) {
        return Err(Error::NotDoubleWell(format!(
            "barrier V(0) - V(a) = {v_max} is not positive"
        )));
    }
    if !(d2_at_well > cfg.tol_curvature) {
        return Err(Error::NotDoubleWell(format!(
            "flat well bottom: V''(a) = {d2_at_well}"
        )));
    }

    check_symmetry(expr, 2.0 * a, Some(v_max), cfg)?;

    // Monotone descent from the barrier top into the well.
    for i in 1..cfg.scan_points {
        let q = a * i as f64 / cfg.scan_points as f64;
        let s = raw(q)?.1;
        if !(s < 0.0) {
            return Err(Error::MultipleBarriers(format!(
                "V'({q}) = {s} >= 0 between the barrier top and the well at {a}"
            )));
        }
    }
    // No deeper wells further out.
    for i in 1..=cfg.scan_points {
        let q = a + (cfg.q_search_max - a).max(0.0) * i as f64 / cfg.scan_points as f64;
        let v = raw(q)?.0 - shift;
        if v < -1e-12 * v_max {
            return Err(Error::MultipleBarriers(format!(
                "V({q}) = {v} lies below the well bottom at {a}"
            )));
        }
    }

    let omega = (d2_at_well / ctx.mass).sqrt();
    let p_central = (2.0 * ctx.mass * v_max).sqrt();
    Ok(PotentialProfile {
        expr: expr.clone(),
        ctx,
        shift,
        a,
        v_max,
        d2_at_well,
        omega,
        p_central,
    })
}

/// Compares `V(q)` and `V(-q)` on Chebyshev points of `(0, q_max]`.
fn check_symmetry(
    expr: &PotentialExpr,
    q_max: f64,
    scale: Option<f64>,
    cfg: &AnalysisConfig,
) -> Result<()> {
    let n = cfg.symmetry_points;
    for k in 0..n {
        let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let q = 0.5 * q_max * (1.0 + theta.cos());
        let right = eval_with_derivatives(expr, q)?.0;
        let left = eval_with_derivatives(expr, -q)?.0;
        let magnitude = right.abs().max(left.abs()).max(scale.unwrap_or(0.0));
        if (right - left).abs() > cfg.tol_sym * magnitude {
            return Err(Error::AsymmetricPotential {
                q,
                left: right,
                right: left,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::parse_potential;
    use proptest::prelude::*;

    fn profile(text: &str) -> Result<PotentialProfile> {
        analyze_profile(&parse_potential(text)?, PhysicalContext::new(1.0, 0.1)?)
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn unit_quartic() {
        let p = profile("(q^2 - 1)^2").unwrap();
        assert!(close(p.a, 1.0, 1e-14));
        assert!(close(p.v_max, 1.0, 1e-14));
        assert!(close(p.omega, 2.0 * 2f64.sqrt(), 1e-14));
        assert!(close(p.p_central, 2f64.sqrt(), 1e-14));
        assert!(p.shift.abs() < 1e-15);
    }

    #[test]
    fn wide_quartic() {
        let p = profile("(q^2 - 4)^2").unwrap();
        assert!(close(p.a, 2.0, 1e-14));
        assert!(close(p.v_max, 16.0, 1e-14));
        assert!(close(p.d2_at_well, 32.0, 1e-13));
        assert!(close(p.omega, 32f64.sqrt(), 1e-13));
        assert!(close(p.p_central, 32f64.sqrt(), 1e-14));
    }

    #[test]
    fn deformed_quartic() {
        let p = profile("(q^2-1)^2*(1+q^2/2)").unwrap();
        assert!(close(p.a, 1.0, 1e-14));
        assert!(close(p.v_max, 1.0, 1e-14));
        assert!(close(p.d2_at_well, 12.0, 1e-13));
        assert!(close(p.omega, 12f64.sqrt(), 1e-13));
        assert!(close(p.p_central, 2f64.sqrt(), 1e-14));
    }

    #[test]
    fn offset_minimum_is_shifted() {
        let p = profile("q^4 - 2*q^2 + 3").unwrap();
        assert!(close(p.shift, 2.0, 1e-14));
        assert!(close(p.v_max, 1.0, 1e-13));
        assert!(p.value(p.a).abs() < 1e-14);
        // already shifted: nothing left to subtract
        let again = profile("q^4 - 2*q^2 + 1").unwrap();
        assert!(again.shift.abs() < 1e-14);
    }

    #[test]
    fn transcendental_double_well() {
        // V' = 4 sinh q (cosh q - 2): minimum at cosh a = 2, V''(a) = 4 cosh 2a - 8 cosh a = 12, V(0) - V(a) = 2.
        let p = profile("cosh(2*q) - 8*cosh(q)").unwrap();
        assert!(close(p.a, 2f64.acosh(), 1e-14));
        assert!(close(p.shift, -9.0, 1e-14));
        assert!(close(p.v_max, 2.0, 1e-13));
        assert!(close(p.d2_at_well, 12.0, 1e-13));
        // V' = 4 sinh q (cosh q - 1) >= 0 has no interior minimum
        assert!(matches!(
            profile("cosh(2*q) - 4*cosh(q)"),
            Err(Error::NotDoubleWell(_))
        ));
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            profile("q^3"),
            Err(Error::AsymmetricPotential { .. })
        ));
        assert!(matches!(profile("q^2"), Err(Error::NotDoubleWell(_))));
        assert!(matches!(profile("-q^2"), Err(Error::NotDoubleWell(_))));
        assert!(matches!(
            profile("(q^2-1)^2 + 0.1*q"),
            Err(Error::AsymmetricPotential { .. })
        ));
        // flat bottoms: (q^2 - 1)^4 has V''(1) = 0
        assert!(matches!(profile("(q^2-1)^4"), Err(Error::NotDoubleWell(_))));
        // outer wells deeper than the inner pair
        assert!(matches!(
            profile("(q^2-1)^2*(q^2-16)^2/100 - q^2/50"),
            Err(Error::MultipleBarriers(_)) | Err(Error::NotDoubleWell(_))
        ));
        assert!(matches!(
            analyze_profile(
                &parse_potential("(q^2-1)^2").unwrap(),
                PhysicalContext {
                    mass: 1.0,
                    hbar: -1.0
                }
            ),
            Err(Error::InvalidContext("hbar>0 required"))
        ));
    }

    proptest! {
        #[test]
        fn scaling(c in 0.01..100.0f64) {
            let base = profile("(q^2 - 1)^2*(1 + q^2/3)").unwrap();
            let scaled = base.scaled(c).unwrap();
            prop_assert!(close(scaled.a, base.a, 1e-12));
            prop_assert!(close(scaled.v_max, c * base.v_max, 1e-12));
            prop_assert!(close(scaled.omega, c.sqrt() * base.omega, 1e-12));
            prop_assert!(close(scaled.p_central, c.sqrt() * base.p_central, 1e-12));
        }

        #[test]
        fn derivatives_match_finite_differences(t in -1.0..1.0f64, which in 0usize..4) {
            let text = ["(q^2 - 1)^2", "(q^2-1)^2*(1+q^2/2)", "cosh(q)/2 - q^2/2 + exp(-q^2)", "cos(q) + q^4/10"][which];
            let e = parse_potential(text).unwrap();
            let q = 2.0 * t * 1.5;
            let h = 1e-5;
            let (_, d1, d2) = eval_with_derivatives(&e, q).unwrap();
            let fd1 = (e.eval(q + h) - e.eval(q - h)) / (2.0 * h);
            let fd2 = (eval_with_derivatives(&e, q + h).unwrap().1 - eval_with_derivatives(&e, q - h).unwrap().1) / (2.0 * h);
            prop_assert!((d1 - fd1).abs() <= 1e-6 * d1.abs().max(1.0), "{} vs {}", d1, fd1);
            prop_assert!((d2 - fd2).abs() <= 1e-6 * d2.abs().max(1.0), "{} vs {}", d2, fd2);
        }
    }
}
