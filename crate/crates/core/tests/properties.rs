use std::f64::consts::PI;

use proptest::prelude::*;
use tunnelsplit_core::oracle::{
    action_exact, eigen_splitting, kth_eigenvalue, period_exact, quarter_time_exact, sturm_count,
    GridConfig, GridLevel,
};
use tunnelsplit_core::semiclassical::{
    ground_splitting, period_t, splitting_closed_form, time_budget, ActionAsymptote,
    SemiclassicalConfig, SeparatrixConstants,
};
use tunnelsplit_core::{
    analyze_profile, parse_potential, Error, PhysicalContext, PotentialProfile,
};

fn profile(text: &str, mass: f64, hbar: f64) -> PotentialProfile {
    analyze_profile(
        &parse_potential(text).unwrap(),
        PhysicalContext::new(mass, hbar).unwrap(),
    )
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `c (q² - L²)²` with `ħ` a fraction of `2 V_max / ω`.
fn quartic(c: f64, l: f64, mass: f64, frac: f64) -> PotentialProfile {
    let text = format!("{c}*(q^2-{})^2", l * l);
    let omega = (8.0 * c * l * l / mass).sqrt();
    let hbar = frac * 2.0 * c * l.powi(4) / omega;
    profile(&text, mass, hbar)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quartic_family_closed_forms(c in 0.1..10.0f64, l in 0.5..3.0f64, mass in 0.2..5.0f64, frac in 0.02..0.3f64) {
        let p = quartic(c, l, mass, frac);
        let cfg = SemiclassicalConfig::default();
        let consts = SeparatrixConstants::compute(&p, &cfg).unwrap();
        prop_assert!(rel(consts.epsilon, 64.0 * c * l.powi(4)) < 1e-9);
        prop_assert!(rel(consts.s0, 8.0 / 3.0 * (2.0 * mass * c).sqrt() * l.powi(3)) < 1e-11);
    }

    #[test]
    fn splitting_report_invariants(c in 0.1..10.0f64, l in 0.5..3.0f64, mass in 0.2..5.0f64, frac in 0.05..0.3f64) {
        let p = quartic(c, l, mass, frac);
        let hbar = p.ctx.hbar;
        for form in [ActionAsymptote::PeriodConsistent, ActionAsymptote::BareLog] {
            let cfg = SemiclassicalConfig { action: form, ..Default::default() };
            let r = ground_splitting(&p, &cfg).unwrap();
            let consts = SeparatrixConstants::compute(&p, &cfg).unwrap();
            prop_assert!(r.s0 > 0.0 && r.epsilon > 0.0 && r.delta_e > 0.0);
            prop_assert!(rel(r.delta_e, splitting_closed_form(&consts, hbar, form)) < 1e-12);
            prop_assert!(rel(r.flip_rate * 2.0 * PI * hbar, r.delta_e) < 1e-15);
            prop_assert!(rel(r.e_plus + r.e_minus, hbar * p.omega) < 1e-15);
            let resolution = 4.0 * f64::EPSILON * r.e_ground_ref;
            prop_assert!(((r.e_plus - r.e_minus) - r.delta_e).abs() <= resolution);
        }
    }

    #[test]
    fn period_identity(c in 0.1..10.0f64, l in 0.5..3.0f64, mass in 0.2..5.0f64, frac in 0.002..0.3f64) {
        let p = quartic(c, l, mass, frac);
        let quad = Default::default();
        let b = time_budget(&p, &quad).unwrap();
        let t = period_t(&p, 0.5 * p.ctx.hbar * p.omega, &quad).unwrap();
        prop_assert!(rel(b.period_eq7, t) < 1e-10);
        prop_assert!(b.t1_exact_harmonic > b.t1_leading && b.t1_leading > 0.0);
    }

    #[test]
    fn action_slope_matches_period(frac in 0.001..0.9f64, gamma in 0.0..2.0f64) {
        let p = profile(&format!("(q^2-1)^2*(1+{gamma}*q^2)"), 1.0, 0.1);
        let consts = SeparatrixConstants::compute(&p, &SemiclassicalConfig::default()).unwrap();
        let e = frac * p.v_max;
        let h = 1e-5 * e;
        let slope = |form| {
            (consts.action(e + h, form).unwrap() - consts.action(e - h, form).unwrap()) / (2.0 * h)
        };
        let t = consts.period(e).unwrap();
        prop_assert!(rel(-slope(ActionAsymptote::PeriodConsistent), t) < 1e-7);
        prop_assert!(rel(-slope(ActionAsymptote::BareLog), t - 2.0 / consts.omega) < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_classical_orbit(frac in 0.001..0.99f64, gamma in 0.0..2.0f64) {
        let p = profile(&format!("(q^2-1)^2*(1+{gamma}*q^2)"), 1.0, 0.1);
        let quad = Default::default();
        let s0 = SeparatrixConstants::compute(&p, &SemiclassicalConfig::default()).unwrap().s0;
        let e = frac * p.v_max;
        let s = action_exact(&p, e, &quad).unwrap();
        prop_assert!(s > 0.0 && s < s0);
        prop_assert!(action_exact(&p, (e * 1.01).min(0.999 * p.v_max), &quad).unwrap() <= s);
        let t = period_exact(&p, e, &quad).unwrap();
        prop_assert!(rel(quarter_time_exact(&p, e, &quad).unwrap(), t / 4.0) < 1e-15);
        let h = 1e-4 * e.min(p.v_max - e);
        let slope = (action_exact(&p, e + h, &quad).unwrap() - action_exact(&p, e - h, &quad).unwrap()) / (2.0 * h);
        prop_assert!(rel(-slope, t) < 1e-5, "{} vs {}", -slope, t);
    }

    #[test]
    fn sturm_counts_bracket_eigenvalues(diag in prop::collection::vec(-5.0..5.0f64, 2..40), off in 0.05..3.0f64) {
        let n = diag.len();
        let values: Vec<f64> = (0..n).map(|k| kth_eigenvalue(&diag, -off, k)).collect();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        for (k, &v) in values.iter().enumerate() {
            let spread = 1e-9 * (1.0 + v.abs());
            prop_assert!(sturm_count(&diag, -off, v - spread) <= k);
            prop_assert!(sturm_count(&diag, -off, v + spread) > k);
        }
        // trace is the sum of the eigenvalues
        let trace: f64 = diag.iter().sum();
        prop_assert!((values.iter().sum::<f64>() - trace).abs() < 1e-9 * (1.0 + trace.abs() + n as f64));
    }
}

#[test]
fn quartic_levels_converge_at_second_order() {
    let p = profile("(q^2-1)^2", 1.0, 0.3);
    let r = eigen_splitting(&p, &GridConfig::for_well(&p)).unwrap();
    assert!(r.parity_ok);
    let columns: [fn(&GridLevel) -> f64; 2] = [|l| l.e0, |l| l.e1];
    for column in columns {
        let d: Vec<f64> = r
            .levels
            .windows(2)
            .map(|w| column(&w[1]) - column(&w[0]))
            .collect();
        for pair in d.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((3.0..=5.0).contains(&ratio), "{ratio}");
        }
    }
    assert!(r.e1 > r.e0 && r.delta_e_exact > 0.0);
}

#[test]
fn unresolvable_splitting_is_reported() {
    let p = profile("(q^2-1)^2", 1.0, 0.05);
    let grid = GridConfig {
        n_points: 64,
        refinement_levels: 1,
        ..GridConfig::for_well(&p)
    };
    match eigen_splitting(&p, &grid) {
        Err(Error::NoSeparation { delta, floor }) => assert!(delta <= floor),
        Ok(r) => assert!(r.delta_e_error > 0.1 * r.delta_e_exact, "{r:?}"),
        Err(e) => panic!("{e}"),
    }
}
