//! Closed-form equilibria of alignment games, with independent numeric
//! oracles (exact matrix-game LP, best-response search, Monte-Carlo
//! simulation) to certify them.

pub mod continuous;
pub mod discrete;
pub mod error;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod simulate;

pub use error::{Error, Result};
pub use model::{GameSpec, MixedStrategy, Solution};
pub use rational::Rational;

/// Solves `spec` in closed form, or reports that no closed form applies.
pub fn solve(spec: &GameSpec) -> Result<Solution> {
    spec.validate()?;
    match spec.domain {
        model::Domain::Circle => continuous::solve_circle(spec),
        model::Domain::Interval => continuous::solve_interval(spec),
        model::Domain::Finite(_) => discrete::solve_finite(spec),
    }
}
