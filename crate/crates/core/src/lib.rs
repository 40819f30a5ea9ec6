//! Explicit semiclassical ground-state splitting of symmetric double wells.
//!
//! The [`semiclassical`] module evaluates the closed chain from the potential
//! to the splitting: separatrix area, the energy constant ε fixed by the
//! separatrix time defect, the near-separatrix action and period, and the
//! ground-state doublet. The [`oracle`] module recomputes the same physics by
//! brute force (finite-difference spectrum, exact classical quadratures) so
//! every link of the chain can be checked independently.

pub mod error;
pub mod oracle;
pub mod potential;
pub mod quadrature;
pub mod semiclassical;

pub use error::{Error, Result};
pub use potential::{
    analyze_profile, parse_potential, DoubleWell, PhysicalContext, PotentialExpr, PotentialProfile,
};
pub use quadrature::{find_root, integrate, Integral, QuadratureConfig};
