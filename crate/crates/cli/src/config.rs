use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tunnelsplit_core::oracle::GridConfig;
use tunnelsplit_core::semiclassical::{ActionAsymptote, MatchPoint, SemiclassicalConfig};
use tunnelsplit_core::{DoubleWell, Error, PhysicalContext, QuadratureConfig, Result};

#[derive(Debug, Parser)]
#[command(
    name = "tunnelsplit",
    version,
    about = "Ground-state tunnelling splitting of symmetric double wells"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the semiclassical chain for one potential.
    Analyze(RunArgs),
    /// Check the semiclassical chain against the exact spectrum and classical quadratures.
    Verify(RunArgs),
    /// Tabulate the chain and the exact splitting over a list of hbar or scale values.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Hbar,
    Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ActionForm {
    /// S0 + (2E/ω)(ln(E/ε) - 1), consistent with T = -dS/dE
    PeriodConsistent,
    /// S0 + (2E/ω) ln(E/ε)
    BareLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatchPointArg {
    HarmonicDistance,
    TurningPoint,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Potential V(q), e.g. "(q^2-1)^2"
    #[arg(long)]
    pub potential: String,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mass: f64,
    /// Defaults to csv for sweep, table otherwise
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Relative tolerance of every quadrature
    #[arg(long)]
    pub tol_quad: Option<f64>,
    /// Grid intervals at the coarsest level of the exact spectrum
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Number of grid doublings for Richardson extrapolation
    #[arg(long)]
    pub refinement_levels: Option<usize>,
    /// Half-width L of the box [-L, L] (default: a + 6 sqrt(hbar/(m omega)))
    #[arg(long, allow_negative_numbers = true)]
    pub box_half_width: Option<f64>,
    #[arg(long, value_enum, default_value_t = SweepParam::Hbar)]
    pub sweep_param: SweepParam,
    /// Comma-separated parameter values
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub sweep_values: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ActionForm::PeriodConsistent)]
    pub action_form: ActionForm,
    /// Lower limit of the tunnelling integral in the Herring route
    #[arg(long, value_enum, default_value_t = MatchPointArg::HarmonicDistance)]
    pub match_point: MatchPointArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Analyze,
    Verify,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Analyze => "analyze",
            CommandKind::Verify => "verify",
            CommandKind::Sweep => "sweep",
        }
    }
}

/// Pass/fail limits for `verify`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyTolerances {
    pub epsilon_rel: f64,
    pub splitting_ratio: (f64, f64),
    pub herring_ratio: (f64, f64),
    pub exact_error_rel: f64,
    pub action_residual: f64,
    pub key_fact_gap: f64,
    pub period_identity_rel: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            epsilon_rel: 0.01,
            splitting_ratio: (0.75, 1.25),
            herring_ratio: (0.8, 1.2),
            exact_error_rel: 1e-3,
            action_residual: 0.05,
            key_fact_gap: 1e-3,
            period_identity_rel: 1e-10,
        }
    }
}

impl VerifyTolerances {
    pub fn to_json(&self) -> Value {
        json!({
            "epsilon_rel": self.epsilon_rel,
            "splitting_ratio": [self.splitting_ratio.0, self.splitting_ratio.1],
            "herring_ratio": [self.herring_ratio.0, self.herring_ratio.1],
            "exact_error_rel": self.exact_error_rel,
            "action_residual": self.action_residual,
            "key_fact_gap": self.key_fact_gap,
            "period_identity_rel": self.period_identity_rel,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridOverrides {
    pub box_half_width: Option<f64>,
    pub n_points: Option<usize>,
    pub refinement_levels: Option<usize>,
}

impl GridOverrides {
    pub fn grid_for<W: DoubleWell + ?Sized>(&self, well: &W) -> GridConfig {
        let default = GridConfig::for_well(well);
        GridConfig {
            box_half_width: self.box_half_width.unwrap_or(default.box_half_width),
            n_points: self.n_points.unwrap_or(default.n_points),
            refinement_levels: self.refinement_levels.unwrap_or(default.refinement_levels),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub potential_text: String,
    pub ctx: PhysicalContext,
    pub format: Format,
    pub semi: SemiclassicalConfig,
    pub grid: GridOverrides,
    pub sweep_param: SweepParam,
    pub sweep_values: Vec<f64>,
    pub tolerances: VerifyTolerances,
}

impl RunConfig {
    pub fn from_command(command: Command) -> Result<Self> {
        let (kind, args) = match command {
            Command::Analyze(a) => (CommandKind::Analyze, a),
            Command::Verify(a) => (CommandKind::Verify, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
        };
        let ctx = PhysicalContext::new(args.mass, args.hbar)?;
        let mut quad = QuadratureConfig::default();
        if let Some(tol) = args.tol_quad {
            quad = quad.with_rel_tol(tol);
        }
        quad.validate()?;
        if kind == CommandKind::Sweep {
            if args.sweep_values.is_empty() {
                return Err(Error::InvalidConfig(
                    "sweep_values must be nonempty for sweep".into(),
                ));
            }
        } else if !args.sweep_values.is_empty() {
            return Err(Error::InvalidConfig(
                "sweep_values only apply to sweep".into(),
            ));
        }
        let format = args.format.unwrap_or(match kind {
            CommandKind::Sweep => Format::Csv,
            _ => Format::Table,
        });
        if format == Format::Csv && kind != CommandKind::Sweep {
            return Err(Error::InvalidConfig(
                "csv output is only available for sweep".into(),
            ));
        }
        Ok(Self {
            command: kind,
            potential_text: args.potential,
            ctx,
            format,
            semi: SemiclassicalConfig {
                quad,
                action: match args.action_form {
                    ActionForm::PeriodConsistent => ActionAsymptote::PeriodConsistent,
                    ActionForm::BareLog => ActionAsymptote::BareLog,
                },
                match_point: match args.match_point {
                    MatchPointArg::HarmonicDistance => MatchPoint::HarmonicDistance,
                    MatchPointArg::TurningPoint => MatchPoint::TurningPoint,
                },
            },
            grid: GridOverrides {
                box_half_width: args.box_half_width,
                n_points: args.grid_points,
                refinement_levels: args.refinement_levels,
            },
            sweep_param: args.sweep_param,
            sweep_values: args.sweep_values,
            tolerances: VerifyTolerances::default(),
        })
    }

    /// The run parameters as echoed in every document.
    pub fn to_json(&self) -> Value {
        let mut input = json!({
            "potential_text": self.potential_text,
            "hbar": self.ctx.hbar,
            "mass": self.ctx.mass,
            "tol_quad": self.semi.quad.rel_tol,
            "action_form": serde_json::to_value(self.semi.action).unwrap(),
            "match_point": serde_json::to_value(self.semi.match_point).unwrap(),
        });
        let map = input.as_object_mut().unwrap();
        if let Some(v) = self.grid.box_half_width {
            map.insert("box_half_width".into(), json!(v));
        }
        if let Some(v) = self.grid.n_points {
            map.insert("grid_points".into(), json!(v));
        }
        if let Some(v) = self.grid.refinement_levels {
            map.insert("refinement_levels".into(), json!(v));
        }
        if self.command == CommandKind::Sweep {
            map.insert(
                "sweep_param".into(),
                json!(match self.sweep_param {
                    SweepParam::Hbar => "hbar",
                    SweepParam::Scale => "scale",
                }),
            );
            map.insert("sweep_values".into(), json!(self.sweep_values));
        }
        input
    }
}
