use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use tunnelsplit_core::oracle::{eigen_splitting, run_oracle, OracleReport};
use tunnelsplit_core::semiclassical::{
    ground_splitting, period_t, splitting_wkb_direct, time_budget, SeparatrixConstants,
};
use tunnelsplit_core::{analyze_profile, parse_potential, DoubleWell, PotentialProfile, Result};

use crate::config::{RunConfig, SweepParam};

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize to JSON")
}

pub fn base_profile(cfg: &RunConfig) -> Result<PotentialProfile> {
    analyze_profile(&parse_potential(&cfg.potential_text)?, cfg.ctx)
}

pub fn analyze(cfg: &RunConfig) -> Result<Value> {
    let profile = base_profile(cfg)?;
    let semi = ground_splitting(&profile, &cfg.semi)?;
    let budget = time_budget(&profile, &cfg.semi.quad)?;
    let tail = splitting_wkb_direct(&profile, &cfg.semi)?;
    Ok(json!({
        "command": cfg.command.name(),
        "input": cfg.to_json(),
        "profile": to_json(&profile),
        "time_budget": to_json(&budget),
        "semiclassical": to_json(&semi),
        "wkb_tail": to_json(&tail),
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.value >= self.lo && self.value <= self.hi
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "value": self.value,
            "bound": [self.lo, self.hi],
            "pass": self.pass(),
        })
    }
}

/// 0 when `values` shrink strictly, otherwise 1.
fn growth_flag(values: &[f64]) -> f64 {
    if values.windows(2).all(|w| w[1] < w[0]) {
        0.0
    } else {
        1.0
    }
}

/// Returns the document and whether every check passed.
pub fn verify(cfg: &RunConfig) -> Result<(Value, bool)> {
    let profile = base_profile(cfg)?;
    let quad = &cfg.semi.quad;
    let tol = &cfg.tolerances;
    let semi = ground_splitting(&profile, &cfg.semi)?;
    let budget = time_budget(&profile, quad)?;
    let tail = splitting_wkb_direct(&profile, &cfg.semi)?;
    let grid = cfg.grid.grid_for(&profile);
    let oracle: OracleReport = run_oracle(&profile, &grid, quad)?;
    let consts = SeparatrixConstants::compute(&profile, &cfg.semi)?;

    let residuals = oracle
        .s_exact_samples
        .iter()
        .map(|&(e, s)| Ok((e, (s - consts.action(e, cfg.semi.action)?).abs() / e)))
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<(f64, f64)> = oracle
        .quarter_defect_samples
        .iter()
        .map(|&(e, d)| (e, (d - budget.defect).abs()))
        .collect();
    let period_direct = period_t(&profile, semi.e_ground_ref, quad)?;
    let ratio_semi_exact = semi.delta_e / oracle.delta_e_exact;
    let ratio_herring_exact = tail.delta_e_herring / oracle.delta_e_exact;
    let ratio_herring_semi = tail.delta_e_herring / semi.delta_e;
    let residual_values: Vec<f64> = residuals.iter().map(|r| r.1).collect();
    let gap_values: Vec<f64> = gaps.iter().map(|g| g.1).collect();

    let checks = [
        Check {
            name: "epsilon_fit_rel",
            value: (oracle.epsilon_fit / semi.epsilon - 1.0).abs(),
            lo: 0.0,
            hi: tol.epsilon_rel,
        },
        Check {
            name: "epsilon_fit_converged",
            value: if oracle.epsilon_fit_converged {
                1.0
            } else {
                0.0
            },
            lo: 1.0,
            hi: 1.0,
        },
        Check {
            name: "ratio_semi_exact",
            value: ratio_semi_exact,
            lo: tol.splitting_ratio.0,
            hi: tol.splitting_ratio.1,
        },
        Check {
            name: "ratio_herring_semi",
            value: ratio_herring_semi,
            lo: tol.herring_ratio.0,
            hi: tol.herring_ratio.1,
        },
        Check {
            name: "delta_e_exact_rel_error",
            value: oracle.delta_e_error / oracle.delta_e_exact,
            lo: 0.0,
            hi: tol.exact_error_rel,
        },
        Check {
            name: "action_residual",
            value: *residual_values.last().unwrap(),
            lo: 0.0,
            hi: tol.action_residual,
        },
        Check {
            name: "action_residual_growth",
            value: growth_flag(&residual_values),
            lo: 0.0,
            hi: 0.0,
        },
        Check {
            name: "key_fact_gap",
            value: *gap_values.last().unwrap(),
            lo: 0.0,
            hi: tol.key_fact_gap,
        },
        Check {
            name: "key_fact_gap_growth",
            value: growth_flag(&gap_values),
            lo: 0.0,
            hi: 0.0,
        },
        Check {
            name: "period_identity_rel",
            value: (budget.period_eq7 / period_direct - 1.0).abs(),
            lo: 0.0,
            hi: tol.period_identity_rel,
        },
    ];
    let all_pass = checks.iter().all(Check::pass);
    let doc = json!({
        "command": cfg.command.name(),
        "input": cfg.to_json(),
        "tolerances": tol.to_json(),
        "grid": to_json(&grid),
        "profile": to_json(&profile),
        "time_budget": to_json(&budget),
        "semiclassical": to_json(&semi),
        "wkb_tail": to_json(&tail),
        "oracle": to_json(&oracle),
        "comparison": {
            "delta_e_semiclassical": semi.delta_e,
            "delta_e_herring": tail.delta_e_herring,
            "delta_e_exact": oracle.delta_e_exact,
            "delta_e_exact_error": oracle.delta_e_error,
            "ratio_semi_exact": ratio_semi_exact,
            "ratio_herring_exact": ratio_herring_exact,
            "ratio_herring_semi": ratio_herring_semi,
            "epsilon": semi.epsilon,
            "epsilon_fit": oracle.epsilon_fit,
            "action_residuals": residuals,
            "key_fact_gaps": gaps,
        },
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "all_pass": all_pass,
    });
    Ok((doc, all_pass))
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "param",
    "omega",
    "P",
    "S0",
    "epsilon",
    "S",
    "delta_e_semi",
    "delta_e_herring",
    "delta_e_exact",
    "ratio_semi_exact",
    "flip_rate",
    "error",
];

/// One sweep row; numeric cells stay empty past the first failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub values: [Option<f64>; 10],
    pub error: Option<String>,
}

fn sweep_row(cfg: &RunConfig, base: &PotentialProfile, param: f64) -> SweepRow {
    let mut values = [None; 10];
    let error = fill_row(cfg, base, param, &mut values)
        .err()
        .map(|e| e.to_string());
    SweepRow {
        param,
        values,
        error,
    }
}

fn fill_row(
    cfg: &RunConfig,
    base: &PotentialProfile,
    param: f64,
    out: &mut [Option<f64>; 10],
) -> Result<()> {
    let profile = match cfg.sweep_param {
        SweepParam::Hbar => base.with_hbar(param)?,
        SweepParam::Scale => base.scaled(param)?,
    };
    out[0] = Some(profile.omega());
    out[1] = Some(profile.p_central());
    let consts = SeparatrixConstants::compute(&profile, &cfg.semi)?;
    out[2] = Some(consts.s0);
    out[3] = Some(consts.epsilon);
    let semi = ground_splitting(&profile, &cfg.semi)?;
    out[4] = Some(semi.s_action);
    out[5] = Some(semi.delta_e);
    out[9] = Some(semi.flip_rate);
    out[6] = Some(splitting_wkb_direct(&profile, &cfg.semi)?.delta_e_herring);
    let exact = eigen_splitting(&profile, &cfg.grid.grid_for(&profile))?;
    out[7] = Some(exact.delta_e_exact);
    out[8] = Some(semi.delta_e / exact.delta_e_exact);
    Ok(())
}

/// Rows in the order of `cfg.sweep_values`, computed in parallel.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let base = base_profile(cfg)?;
    Ok(cfg
        .sweep_values
        .par_iter()
        .map(|&v| sweep_row(cfg, &base, v))
        .collect())
}

pub fn sweep_json(cfg: &RunConfig, rows: &[SweepRow]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut map = serde_json::Map::new();
            map.insert(SWEEP_COLUMNS[0].into(), json!(row.param));
            for (name, v) in SWEEP_COLUMNS[1..11].iter().zip(row.values) {
                map.insert((*name).into(), json!(v));
            }
            map.insert("error".into(), json!(row.error));
            Value::Object(map)
        })
        .collect();
    json!({
        "command": cfg.command.name(),
        "input": cfg.to_json(),
        "rows": rows,
    })
}
