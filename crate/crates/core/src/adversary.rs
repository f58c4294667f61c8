//! Stage two: the adversary's best-response split of its unit budget.

use serde::{Deserialize, Serialize};

use crate::model::{CaseLabel, PostTransferGame};
use crate::payoff::front_payoff;
use crate::{Error, Result};

/// The adversary's allocation against the two fronts. Components are
/// nonnegative and sum to 1 up to rounding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryAllocation {
    pub xa1: f64,
    pub xa2: f64,
}

/// Classifies a post-transfer game into its best-response case.
///
/// With the game in canonical orientation and `s = sqrt(phi1*x1*x2/phi2)`,
/// the strict-ratio cases partition by `1 - s`: case 1 for `1 - s <= 0`,
/// case 2 for `1 - s` in `(0, x2]`, case 3 beyond. At ratio equality the
/// split is case 3 below unit total budget and case 4 at or above it.
/// Boundary equalities therefore resolve in case order 1 > 2 > 3 > 4.
pub fn classify_case(p: &PostTransferGame) -> Result<CaseLabel> {
    let (c, swapped) = p.canonicalize();
    let lhs = c.phi1 * c.x2;
    let rhs = c.phi2 * c.x1;
    let s = (c.phi1 * c.x1 * c.x2 / c.phi2).sqrt();
    let probe = 1.0 - s;
    if !(lhs.is_finite() && rhs.is_finite() && probe.is_finite()) {
        return Err(Error::Unclassifiable {
            ratio_lhs: lhs,
            ratio_rhs: rhs,
            probe,
            budget: c.x2,
        });
    }
    let label = if lhs == rhs {
        if c.x1 + c.x2 >= 1.0 {
            CaseLabel::C4
        } else {
            CaseLabel::C3
        }
    } else if probe <= 0.0 {
        CaseLabel::C1a
    } else if probe <= c.x2 {
        CaseLabel::C2a
    } else {
        CaseLabel::C3
    };
    Ok(if swapped { label.swapped() } else { label })
}

/// The adversary's optimal budget split for a post-transfer game.
///
/// Case 1 goes all-in against the weak front; case 2 plays
/// `sqrt(phi_w*x_w*x_s/phi_s)` against it; case 3 splits in proportion to
/// `sqrt(phi_i*x_i)`; case 4 (where the optimum is a flat set) splits in
/// proportion to the budgets, which always lies inside the optimal set.
pub fn adversary_allocation(p: &PostTransferGame) -> Result<AdversaryAllocation> {
    let (c, swapped) = p.canonicalize();
    let label = classify_case(&c)?;
    let (a1, a2) = match label {
        CaseLabel::C1a => (1.0, 0.0),
        CaseLabel::C2a => {
            let s = (c.phi1 * c.x1 * c.x2 / c.phi2).sqrt();
            (s, 1.0 - s)
        }
        CaseLabel::C3 => {
            let w1 = (c.phi1 * c.x1).sqrt();
            let w2 = (c.phi2 * c.x2).sqrt();
            (w1 / (w1 + w2), w2 / (w1 + w2))
        }
        CaseLabel::C4 => {
            let total = c.x1 + c.x2;
            (c.x1 / total, c.x2 / total)
        }
        // Canonical games never classify to a `b` label.
        CaseLabel::C1b | CaseLabel::C2b => unreachable!("canonical game classified to mirror case"),
    };
    Ok(if swapped {
        AdversaryAllocation { xa1: a2, xa2: a1 }
    } else {
        AdversaryAllocation { xa1: a1, xa2: a2 }
    })
}

/// The value the adversary captures on one front: the front total minus
/// the defending player's payoff.
pub fn adversary_front_payoff(phi: f64, x_p: f64, x_a: f64) -> f64 {
    phi - front_payoff(phi, x_p, x_a)
}

/// Default grid size for [`oracle_allocation`]; verification runs may
/// raise it.
pub const DEFAULT_ORACLE_GRID: usize = 10_001;

/// Grid-search oracle for the adversary's split: maximizes the summed
/// front captures over `xa1 in {0, 1/(n-1), ..., 1}`, returning the first
/// maximizer.
pub fn oracle_allocation(p: &PostTransferGame, n: usize) -> AdversaryAllocation {
    assert!(n >= 3, "oracle grid needs at least 3 points");
    let mut best = AdversaryAllocation { xa1: 0.0, xa2: 1.0 };
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..n {
        let xa1 = i as f64 / (n - 1) as f64;
        let xa2 = 1.0 - xa1;
        let value =
            adversary_front_payoff(p.phi1, p.x1, xa1) + adversary_front_payoff(p.phi2, p.x2, xa2);
        if value > best_value {
            best_value = value;
            best = AdversaryAllocation { xa1, xa2 };
        }
    }
    best
}

/// Total value the adversary captures under a given split.
pub fn adversary_total_payoff(p: &PostTransferGame, alloc: &AdversaryAllocation) -> f64 {
    adversary_front_payoff(p.phi1, p.x1, alloc.xa1)
        + adversary_front_payoff(p.phi2, p.x2, alloc.xa2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GameInstance;

    fn post(phi1: f64, phi2: f64, x1: f64, x2: f64) -> PostTransferGame {
        GameInstance { phi1, phi2, x1, x2 }.zero_transfer()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_case(&post(1.2, 1.0, 1.5, 2.0)).unwrap(), CaseLabel::C1a);
        assert_eq!(classify_case(&post(1.2, 1.0, 0.4, 0.9)).unwrap(), CaseLabel::C2a);
        assert_eq!(classify_case(&post(1.0, 1.0, 1.0, 1.0)).unwrap(), CaseLabel::C4);
        assert_eq!(classify_case(&post(1.2, 1.0, 0.2, 0.3)).unwrap(), CaseLabel::C3);
        // Mirrors of the first two.
        assert_eq!(classify_case(&post(1.0, 1.2, 2.0, 1.5)).unwrap(), CaseLabel::C1b);
        assert_eq!(classify_case(&post(1.0, 1.2, 0.9, 0.4)).unwrap(), CaseLabel::C2b);
        // Ratio equality with small budgets falls to case 3.
        assert_eq!(classify_case(&post(1.0, 1.0, 0.2, 0.2)).unwrap(), CaseLabel::C3);
    }

    #[test]
    fn case2_condition_value_matches_hand_computation() {
        // 1 - sqrt(1.2 * 0.4 * 0.9 / 1) = 0.34273...
        let c = post(1.2, 1.0, 0.4, 0.9);
        let s = (c.phi1 * c.x1 * c.x2 / c.phi2).sqrt();
        assert!((1.0 - s - 0.3427328).abs() < 1e-6);
    }

    #[test]
    fn allocation_examples() {
        let a = adversary_allocation(&post(1.2, 1.0, 1.5, 2.0)).unwrap();
        assert_eq!((a.xa1, a.xa2), (1.0, 0.0));

        let a = adversary_allocation(&post(1.2, 1.0, 0.2, 0.3)).unwrap();
        assert!((a.xa1 - 0.47214).abs() < 1e-5);
        assert!((a.xa2 - 0.52786).abs() < 1e-5);

        let a = adversary_allocation(&post(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!((a.xa1, a.xa2), (0.5, 0.5));
    }

    #[test]
    fn allocation_mirrors_exactly() {
        for (phi1, phi2, x1, x2) in [
            (1.2, 1.0, 1.5, 2.0),
            (1.2, 1.0, 0.4, 0.9),
            (1.2, 1.0, 0.2, 0.3),
            (0.7, 2.3, 0.31, 0.62),
        ] {
            let p = post(phi1, phi2, x1, x2);
            let a = adversary_allocation(&p).unwrap();
            let m = adversary_allocation(&p.swap()).unwrap();
            assert_eq!(a.xa1, m.xa2);
            assert_eq!(a.xa2, m.xa1);
        }
    }

    #[test]
    fn adversary_front_payoff_examples() {
        assert!((adversary_front_payoff(1.2, 1.5, 1.0) - 0.4).abs() < 1e-12);
        assert_eq!(adversary_front_payoff(1.0, 0.3, 0.0), 0.0);
        assert!((adversary_front_payoff(2.0, 0.5, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_agrees_on_examples() {
        let a = oracle_allocation(&post(1.2, 1.0, 1.5, 2.0), 100_001);
        assert_eq!((a.xa1, a.xa2), (1.0, 0.0));

        let a = oracle_allocation(&post(1.2, 1.0, 0.2, 0.3), 100_001);
        assert!((a.xa1 - 0.47214).abs() < 2e-5);

        // Case 4 has a flat optimum: every grid point ties up to rounding,
        // so only the attained value is meaningful.
        let p = post(1.0, 1.0, 1.0, 1.0);
        let a = oracle_allocation(&p, 101);
        let closed = adversary_allocation(&p).unwrap();
        let diff = adversary_total_payoff(&p, &a) - adversary_total_payoff(&p, &closed);
        assert!(diff.abs() < 1e-12);
    }
}
