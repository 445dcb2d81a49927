//! Thin-spectrum construction and limit-periodic chains (`f64` only).
//!
//! Pipeline: exclude 0 from the spectrum, repeat the period and open every
//! gap, pick a finite family of perturbations with empty spectral
//! intersection, compute the minimax Lyapunov exponent `eta`, then
//! concatenate long blocks of each family member into one period.

pub mod assemble;
pub mod chain;
pub mod eta;
pub mod family;
pub mod gaps;
pub mod gordon;
pub mod pipeline;
pub mod zero;

use serde::{Deserialize, Serialize};

pub use assemble::{assemble_sequence, min_admissible_n, predicted_bound, Assembly};
pub use chain::{
    build_limit_periodic, ApproximantChain, ChainStage, GordonCertificate, DEFAULT_PERIOD_CAP,
};
pub use eta::{compute_eta, Eta};
pub use family::{
    greedy_scaling_family, greedy_shift_family, scaling_family, shift_family, FamilyKind,
    ScalingFamily,
};
pub use gaps::{open_all_gaps, open_all_gaps_spread, GapMethod, GapOpening};
pub use gordon::{gordon_check, gordon_check_window};
pub use pipeline::{thin_spectrum, PlanOptions, ThinDiagnostics, ThinPlan, ThinResult};
pub use zero::{ensure_zero_excluded, ZeroExclusion};

/// Which coefficients the construction perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Vary the off-diagonal `a`, keep `b = 0`.
    #[serde(rename = "offdiag")]
    OffDiagonal,
    /// Keep `a`, shift the diagonal `b`.
    #[serde(rename = "diag")]
    Diagonal,
}
