//! Weighted averages of real characters χ_{8d} and (d/·) over odd squarefree d.

mod density;
mod empirical;
mod transform;
mod weight;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use density::{
    analytic_density_dual, analytic_density_primal, b_coefficient, b_table, AnalyticDensity,
    DualDensity, PrimalDensity,
};
pub use empirical::{
    character_prime_partial_sum, double_average_d, empirical_m, empirical_m_naive,
    soundararajan_identity_check, soundararajan_identity_with, DoubleAverage, IdentityCheck,
    SquarefreeWeights,
};
pub use transform::{hat_at_zero, tilde_transform, HatTable, TildeTable};
pub use weight::{WeightFunction, WeightKind};

/// Which real family is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// χ_{8d}(p) = (8d/p).
    EightD,
    /// (d/p).
    Dagger,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::EightD => "eight_d",
            Variant::Dagger => "dagger",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eight_d" | "8d" => Ok(Variant::EightD),
            "dagger" => Ok(Variant::Dagger),
            _ => Err(Error::InvalidArgument(format!("unknown variant {s:?}"))),
        }
    }
}

/// Truncation and accuracy knobs for the analytic evaluators.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPolicy {
    /// Largest a in the outer Möbius sum.
    pub a_max: u64,
    /// Φ̃ is treated as zero once its envelope stays below this.
    pub m_cutoff_tol: f64,
    /// Largest n in the dual divisor sum.
    pub n_max: u64,
    /// Absolute quadrature tolerance; interpolation errors are budgeted
    /// inside it.
    pub quad_tol: f64,
    /// Φ̃ (and Ĥ) grid spacing; derived from the error budget when `None`.
    pub grid_step: Option<f64>,
    /// Cap on the Φ̃ argument for weights whose transform does not decay
    /// quickly (indicators, piecewise-linear tables).
    pub sharp_xi_max: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            a_max: 1_000,
            m_cutoff_tol: 1e-14,
            n_max: 10_000,
            quad_tol: 1e-10,
            grid_step: None,
            sharp_xi_max: 1e4,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.a_max < 1 || self.n_max < 1 {
            return Err(Error::InvalidArgument("a_max and n_max must be at least 1".into()));
        }
        if !(positive(self.m_cutoff_tol) && positive(self.quad_tol) && positive(self.sharp_xi_max))
        {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if let Some(h) = self.grid_step {
            if !positive(h) {
                return Err(Error::InvalidArgument("grid_step must be positive".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_defaults_and_validation() {
        let p = TruncationPolicy::default();
        assert!(p.validate().is_ok());
        assert_eq!((p.a_max, p.n_max), (1000, 10_000));
        let bad = TruncationPolicy {
            quad_tol: 0.0,
            ..p.clone()
        };
        assert!(bad.validate().is_err());
        let bad = TruncationPolicy { a_max: 0, ..p };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn variant_parse() {
        assert_eq!("eight_d".parse::<Variant>().unwrap(), Variant::EightD);
        assert_eq!("dagger".parse::<Variant>().unwrap(), Variant::Dagger);
        assert!("nine".parse::<Variant>().is_err());
    }
}
