use super::{DoubleWell, PhysicalContext};

/// Two harmonic wells `(m ω²/2)(a - |q|)²` joined with a cusp at `q = 0`.
///
/// In the `(q, p)` plane its separatrix is two straight lines, so the time
/// defect vanishes and `ε = 2 P²/m` exactly. Used as a defect-free reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightSeparatrix {
    pub ctx: PhysicalContext,
    pub omega: f64,
    pub a: f64,
}

impl DoubleWell for StraightSeparatrix {
    fn ctx(&self) -> PhysicalContext {
        self.ctx
    }
    fn well_position(&self) -> f64 {
        self.a
    }
    fn barrier_height(&self) -> f64 {
        0.5 * self.ctx.mass * self.omega * self.omega * self.a * self.a
    }
    fn omega(&self) -> f64 {
        self.omega
    }
    fn value(&self, q: f64) -> f64 {
        let x = self.a - q.abs();
        0.5 * self.ctx.mass * self.omega * self.omega * x * x
    }
    fn slope(&self, q: f64) -> f64 {
        -q.signum() * self.ctx.mass * self.omega * self.omega * (self.a - q.abs())
    }
}
