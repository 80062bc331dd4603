//! Equilibrium computation and verification.

mod green;
mod minimize;
mod nash;
mod nonlinear;
mod poisson;
mod spectral;
mod walk;

pub use green::{green_apply, GreenSeries};
pub use minimize::{minimize_potential, minimize_with_game, write_trace_csv, Minimized, TraceRow};
pub use nash::{verify_nash, verify_nash_with_game, NashReport};
pub use nonlinear::solve_nonlinear_poisson;
pub use poisson::{check_source, degree_mean, pin_degree_mean, solve_linear_poisson};
pub use spectral::{spectral_radius, SpectralTarget};
pub use walk::{RWOperator, RadialChain};

use crate::error::{Error, Result};

/// Iteration controls shared by the iterative solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_init: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub seed: u64,
    /// Half-width of a uniform perturbation of the starting point, drawn
    /// from `seed`. Zero starts exactly at the projected reference action.
    pub init_jitter: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 10_000,
            grad_tol: 1e-8,
            step_init: 1.0,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            seed: 0,
            init_jitter: 0.0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidOptions(m.into()));
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        if !(self.step_init > 0.0) || !self.step_init.is_finite() {
            return bad("step_init must be positive");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c must lie in (0, 1)");
        }
        if !(self.armijo_shrink > 0.0 && self.armijo_shrink < 1.0) {
            return bad("armijo_shrink must lie in (0, 1)");
        }
        if !(self.init_jitter >= 0.0) {
            return bad("init_jitter must be nonnegative");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn option_validation() {
        assert!(SolveOptions::default().validate().is_ok());
        for bad in [
            SolveOptions { armijo_c: 1.0, ..Default::default() },
            SolveOptions { armijo_shrink: 0.0, ..Default::default() },
            SolveOptions { grad_tol: -1.0, ..Default::default() },
            SolveOptions { max_iters: 0, ..Default::default() },
            SolveOptions { step_init: f64::NAN, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidOptions(_))));
        }
    }
}
