//! Three-stage coalitional Colonel Blotto games against a common adversary.
//!
//! Two players hold budgets `x1`, `x2` and front valuations `phi1`, `phi2`;
//! the adversary holds a unit budget. In stage one the players may shift
//! valuation and/or budget between each other, in stage two the adversary
//! splits its budget across the two fronts by best response, and in stage
//! three the per-front games resolve to their equilibrium payoffs.
//!
//! The crate answers, in closed form with a brute-force oracle as a cross
//! check, whether a given game admits transfers that strictly raise *both*
//! players' payoffs:
//!
//! - [`transfer::in_gv`] — mutually beneficial valuation transfers,
//!   certified by the rule catalogue in [`transfer`];
//! - [`transfer::in_gb`] — mutually beneficial budget transfers (grid based);
//! - [`transfer::joint_beneficial_direction`] — joint transfers via the
//!   payoff gradients at the origin.
//!
//! [`scan`] turns these predicates into CSV region scans, Monte Carlo
//! samples, and payoff sweeps; the `coblotto` binary exposes them as
//! `check`, `scan`, `sweep`, and `mc` subcommands.

pub mod adversary;
pub mod model;
pub mod oracle;
pub mod payoff;
pub mod scan;
pub mod transfer;

pub use adversary::{adversary_allocation, adversary_front_payoff, classify_case, AdversaryAllocation};
pub use model::{BudgetRegion, CaseLabel, GameInstance, PostTransferGame, TransferPair};
pub use payoff::{
    fd_gradient, front_payoff, joint_gradients, payoff_deltas, player_payoffs,
    valuation_derivatives, Gradient2, PayoffPair,
};
pub use transfer::{
    in_gb, in_gv, in_measure_zero_joint, intra_case_beneficial, inter_case_beneficial,
    joint_beneficial_direction, membership, membership_with, quadratic_roots, valuation_direction,
    Certificate, CertificateKind, JointDirection, MembershipOptions, MembershipRecord,
    QuadraticRoots, RootKind,
};

/// Errors raised by game construction and the analysis operations.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{field} must be > 0, got {value}")]
    NonPositiveParameter { field: &'static str, value: f64 },
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },
    #[error("{component} = {value} outside open interval ({lo}, {hi})")]
    TransferOutOfRange {
        component: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("no best-response case matched (ratio {ratio_lhs} vs {ratio_rhs}, probe {probe} vs {budget})")]
    Unclassifiable {
        ratio_lhs: f64,
        ratio_rhs: f64,
        probe: f64,
        budget: f64,
    },
    #[error("game lies on a best-response case boundary; derivative undefined")]
    OnCaseBoundary,
    #[error("finite-difference probe at step {h} crosses a case boundary")]
    StepTooLarge { h: f64 },
    #[error("no mutually beneficial valuation transfer exists for this game")]
    NotInGv,
    #[error("payoff gradients admit no common ascent direction")]
    NoDirection,
    #[error("ascent direction failed verification: deltas ({delta1}, {delta2}) at step {step}")]
    DirectionNotVerified { delta1: f64, delta2: f64, step: f64 },
    #[error("all three quadratic coefficients are zero")]
    DegenerateAllZero,
}

pub type Result<T> = std::result::Result<T, Error>;
