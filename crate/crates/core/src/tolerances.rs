//! Every numeric gate used by the verification harness and the acceptance
//! suite lives here.

use serde::{Deserialize, Serialize};

/// Relative agreement for quantities that are equal by algebra alone.
pub const ALGEBRAIC: f64 = 1e-12;

/// Smallest admissible tangential Hessian eigenvalue (C²₊ gate).
pub const MIN_RADIUS: f64 = 1e-10;

/// Euler identity and radial-kernel residuals of a support oracle.
pub const DERIVATIVE_IDENTITY: f64 = 1e-9;

/// Relative |slack| below which an inequality is reported as an equality.
pub const EQUALITY: f64 = 1e-8;

/// Relative slack above which an inequality counts as strict.
pub const STRICTNESS: f64 = 1e-6;

/// Relative spread of the Petty ratio below which a body is classified
/// as an ellipsoid.
pub const ELLIPSOID_SPREAD: f64 = 1e-8;

/// Change of a smooth integral under doubling of the rule.
pub const QUADRATURE_PLATEAU: f64 = 1e-10;

/// Absolute per-step slack when checking monotone sequences.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Relative agreement of an extrapolated entropy-power limit.
pub const LIMIT: f64 = 1e-4;

/// Relative agreement of a Monte Carlo deficit with its limit target.
pub const MONTE_CARLO: f64 = 0.15;

/// Tolerance set carried by a run; defaults are the constants above.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub equality: f64,
    pub strictness: f64,
    pub ellipsoid_spread: f64,
    pub monotone_slack: f64,
    pub limit: f64,
    pub monte_carlo: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: EQUALITY,
            strictness: STRICTNESS,
            ellipsoid_spread: ELLIPSOID_SPREAD,
            monotone_slack: MONOTONE_SLACK,
            limit: LIMIT,
            monte_carlo: MONTE_CARLO,
        }
    }
}
