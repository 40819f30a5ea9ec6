//! Parsing, differentiation and shape analysis of symmetric double-well potentials.

mod expr;
mod jet;
mod profile;
mod synthetic;

pub use expr::{eval_with_derivatives, parse_potential, Func, PotentialExpr};
pub use jet::Jet;
pub use profile::{
    analyze_profile, analyze_profile_with, AnalysisConfig, DoubleWell, PhysicalContext,
    PotentialProfile,
};
pub use synthetic::StraightSeparatrix;
