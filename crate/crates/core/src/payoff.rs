//! Stage three: equilibrium payoffs, payoff deltas, and their derivatives
//! with respect to the stage-one transfer.

use serde::{Deserialize, Serialize};

use crate::adversary::{adversary_allocation, classify_case};
use crate::model::{CaseLabel, GameInstance, TransferPair};
use crate::{Error, Result};

/// Both players' equilibrium payoffs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffPair {
    pub u1: f64,
    pub u2: f64,
}

/// A payoff gradient with respect to the transfer pair, evaluated at the
/// zero transfer: `d_b` along the budget component (positive = Player 2 to
/// Player 1), `d_v` along the valuation component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gradient2 {
    pub d_b: f64,
    pub d_v: f64,
}

impl Gradient2 {
    pub fn norm(&self) -> f64 {
        self.d_b.hypot(self.d_v)
    }
}

/// Equilibrium value a player defends on one front, given its budget `x_p`
/// and the adversary's allocation `x_a` against it.
///
/// An uncontested front (`x_a = 0`) is worth its full value. Otherwise the
/// weaker side keeps `phi * min / (2 max)` and the stronger side the
/// complement; ties give `phi / 2` on both branches.
pub fn front_payoff(phi: f64, x_p: f64, x_a: f64) -> f64 {
    if x_a == 0.0 {
        phi
    } else if x_p <= x_a {
        phi * x_p / (2.0 * x_a)
    } else {
        phi * (1.0 - x_a / (2.0 * x_p))
    }
}

/// Both players' payoffs after a transfer, with the adversary re-solving
/// its best response against the post-transfer game.
pub fn player_payoffs(g: &GameInstance, t: &TransferPair) -> Result<PayoffPair> {
    let p = g.apply_transfer(t)?;
    let alloc = adversary_allocation(&p)?;
    Ok(PayoffPair {
        u1: front_payoff(p.phi1, p.x1, alloc.xa1),
        u2: front_payoff(p.phi2, p.x2, alloc.xa2),
    })
}

/// Componentwise payoff change relative to the no-transfer baseline. A
/// transfer is mutually beneficial exactly when both components are
/// strictly positive.
pub fn payoff_deltas(g: &GameInstance, t: &TransferPair) -> Result<(f64, f64)> {
    let base = player_payoffs(g, &TransferPair::ZERO)?;
    let new = player_payoffs(g, t)?;
    Ok((new.u1 - base.u1, new.u2 - base.u2))
}

/// Share of a unit front value a player defends against an all-in
/// adversary: `x/2` when outgunned, `1 - 1/(2x)` otherwise.
pub(crate) fn all_in_rate(x: f64) -> f64 {
    front_payoff(1.0, x, 1.0)
}

fn require_interior(g: &GameInstance) -> Result<(GameInstance, bool, CaseLabel)> {
    let (c, swapped) = g.canonicalize();
    let label = classify_case(&c.zero_transfer())?;
    if label == CaseLabel::C4 {
        return Err(Error::OnCaseBoundary);
    }
    // Exact boundary hits of the strict-ratio cases.
    let s = (c.phi1 * c.x1 * c.x2 / c.phi2).sqrt();
    if c.phi1 * c.x2 == c.phi2 * c.x1 || s == 1.0 || 1.0 - s == c.x2 {
        return Err(Error::OnCaseBoundary);
    }
    Ok((c, swapped, label))
}

/// One-dimensional payoff derivatives along the valuation transfer at the
/// zero transfer, `(du1/d tau_v, du2/d tau_v)`, from the case-specific
/// closed forms.
pub fn valuation_derivatives(g: &GameInstance) -> Result<(f64, f64)> {
    let (c, swapped, label) = require_interior(g)?;
    let (d1, d2) = match label {
        // Adversary all-in against front 1: u1 scales with its all-in
        // rate, front 2 is uncontested.
        CaseLabel::C1a => (-all_in_rate(c.x1), 1.0),
        CaseLabel::C2a => {
            let common = 0.25 * (c.phi1 - c.phi2) * (c.x1 / (c.x2 * c.phi1 * c.phi2)).sqrt();
            (common, 1.0 - 1.0 / (2.0 * c.x2) + common)
        }
        CaseLabel::C3 => {
            let common = 0.25 * (c.phi1 - c.phi2) * (c.x1 * c.x2 / (c.phi1 * c.phi2)).sqrt();
            (-0.5 * c.x1 + common, 0.5 * c.x2 + common)
        }
        _ => unreachable!("interior check rejects case 4 and mirrors are canonicalized"),
    };
    Ok(if swapped { (-d2, -d1) } else { (d1, d2) })
}

/// Payoff gradients of both players with respect to `(tau_b, tau_v)` at the
/// zero transfer, from the case-specific closed forms.
pub fn joint_gradients(g: &GameInstance) -> Result<(Gradient2, Gradient2)> {
    let (c, swapped, label) = require_interior(g)?;
    let (g1, g2) = match label {
        CaseLabel::C1a => {
            // u1 = phi1_bar * rate(x1_bar) against an all-in adversary,
            // u2 = phi2_bar uncontested.
            let g1 = if c.x1 <= 1.0 {
                Gradient2 { d_b: 0.5 * c.phi1, d_v: -0.5 * c.x1 }
            } else {
                Gradient2 {
                    d_b: c.phi1 / (2.0 * c.x1 * c.x1),
                    d_v: 1.0 / (2.0 * c.x1) - 1.0,
                }
            };
            (g1, Gradient2 { d_b: 0.0, d_v: 1.0 })
        }
        CaseLabel::C2a => {
            let db = (c.phi1 * c.phi2).sqrt() * (c.x1 + c.x2)
                / (4.0 * c.x2.powf(1.5) * c.x1.sqrt());
            let dv = 0.25 * (c.phi1 - c.phi2) * (c.x1 / (c.x2 * c.phi1 * c.phi2)).sqrt();
            (
                Gradient2 { d_b: db, d_v: dv },
                Gradient2 {
                    d_b: -c.phi2 / (2.0 * c.x2 * c.x2) + db,
                    d_v: 1.0 - 1.0 / (2.0 * c.x2) + dv,
                },
            )
        }
        CaseLabel::C3 => {
            let eb = 0.25 * (c.phi1 * c.phi2 / (c.x1 * c.x2)).sqrt() * (c.x2 - c.x1);
            let ev = 0.25 * (c.x1 * c.x2 / (c.phi1 * c.phi2)).sqrt() * (c.phi1 - c.phi2);
            (
                Gradient2 { d_b: 0.5 * c.phi1 + eb, d_v: -0.5 * c.x1 + ev },
                Gradient2 { d_b: -0.5 * c.phi2 + eb, d_v: 0.5 * c.x2 + ev },
            )
        }
        _ => unreachable!("interior check rejects case 4 and mirrors are canonicalized"),
    };
    if swapped {
        // A swap exchanges the players and flips both transfer signs.
        let flip = |gr: Gradient2| Gradient2 { d_b: -gr.d_b, d_v: -gr.d_v };
        Ok((flip(g2), flip(g1)))
    } else {
        Ok((g1, g2))
    }
}

/// Central-difference gradients of both payoffs at the zero transfer.
///
/// Fails with [`Error::StepTooLarge`] if any probe point crosses a
/// best-response case boundary, where the payoffs are not smooth.
pub fn fd_gradient(g: &GameInstance, h: f64) -> Result<(Gradient2, Gradient2)> {
    let base_case = classify_case(&g.zero_transfer())?;
    let probe = |t: TransferPair| -> Result<crate::payoff::PayoffPair> {
        let p = g.apply_transfer(&t)?;
        if classify_case(&p)? != base_case {
            return Err(Error::StepTooLarge { h });
        }
        player_payoffs(g, &t)
    };
    let bp = probe(TransferPair::budget(h))?;
    let bm = probe(TransferPair::budget(-h))?;
    let vp = probe(TransferPair::valuation(h))?;
    let vm = probe(TransferPair::valuation(-h))?;
    let g1 = Gradient2 {
        d_b: (bp.u1 - bm.u1) / (2.0 * h),
        d_v: (vp.u1 - vm.u1) / (2.0 * h),
    };
    let g2 = Gradient2 {
        d_b: (bp.u2 - bm.u2) / (2.0 * h),
        d_v: (vp.u2 - vm.u2) / (2.0 * h),
    };
    Ok((g1, g2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(phi1: f64, phi2: f64, x1: f64, x2: f64) -> GameInstance {
        GameInstance { phi1, phi2, x1, x2 }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn front_payoff_examples() {
        assert!(close(front_payoff(1.2, 1.5, 1.0), 0.8, 1e-12));
        assert!(close(front_payoff(1.0, 0.3, 0.52786), 0.28417, 1e-5));
        assert_eq!(front_payoff(2.0, 0.5, 0.5), 1.0);
        assert_eq!(front_payoff(1.0, 0.3, 0.0), 1.0);
    }

    #[test]
    fn front_payoff_is_continuous_at_the_branch_switch() {
        let phi = 1.7;
        let x = 0.83;
        let below = front_payoff(phi, x, x * (1.0 - 1e-12));
        let at = front_payoff(phi, x, x);
        let above = front_payoff(phi, x, x * (1.0 + 1e-12));
        assert!(close(at, phi / 2.0, 1e-12));
        assert!(close(below, at, 1e-10));
        assert!(close(above, at, 1e-10));
    }

    #[test]
    fn player_payoffs_examples() {
        let game = g(1.2, 1.0, 1.5, 2.0);
        let p = player_payoffs(&game, &TransferPair::ZERO).unwrap();
        assert!(close(p.u1, 0.8, 1e-12));
        assert!(close(p.u2, 1.0, 1e-12));

        let p = player_payoffs(&game, &TransferPair::valuation(0.35)).unwrap();
        assert!(close(p.u1, 0.85, 1e-12));
        assert!(close(p.u2, 1.0125, 1e-12));

        let p = player_payoffs(&g(1.0, 1.0, 1.0, 1.0), &TransferPair::ZERO).unwrap();
        assert!(close(p.u1, 0.75, 1e-12));
        assert!(close(p.u2, 0.75, 1e-12));
    }

    #[test]
    fn payoff_delta_examples() {
        let game = g(1.2, 1.0, 1.5, 2.0);
        let (d1, d2) = payoff_deltas(&game, &TransferPair::valuation(0.35)).unwrap();
        assert!(close(d1, 0.05, 1e-12));
        assert!(close(d2, 0.0125, 1e-12));

        let (d1, d2) = payoff_deltas(&game, &TransferPair::valuation(0.2)).unwrap();
        assert!(close(d1, -0.13333333333333333, 1e-12));
        assert!(close(d2, 0.2, 1e-12));

        let (d1, d2) = payoff_deltas(&game, &TransferPair::ZERO).unwrap();
        assert_eq!((d1, d2), (0.0, 0.0));
    }

    #[test]
    fn valuation_derivative_examples() {
        let (d1, d2) = valuation_derivatives(&g(1.2, 1.0, 0.4, 0.9)).unwrap();
        assert!(close(d1, 0.030429, 1e-6));
        assert!(close(d2, 0.474873, 1e-6));

        let (d1, d2) = valuation_derivatives(&g(1.2, 1.0, 0.2, 0.3)).unwrap();
        assert!(close(d1, -0.088820, 1e-6));
        assert!(close(d2, 0.161180, 1e-6));

        let (d1, d2) = valuation_derivatives(&g(1.2, 1.0, 1.5, 2.0)).unwrap();
        assert!(close(d1, -2.0 / 3.0, 1e-12));
        assert!(close(d2, 1.0, 1e-12));

        assert_eq!(valuation_derivatives(&g(1.0, 1.0, 1.0, 1.0)), Err(Error::OnCaseBoundary));
    }

    #[test]
    fn valuation_derivatives_mirror() {
        let (d1, d2) = valuation_derivatives(&g(1.2, 1.0, 0.4, 0.9)).unwrap();
        let (m1, m2) = valuation_derivatives(&g(1.0, 1.2, 0.9, 0.4)).unwrap();
        assert_eq!((m1, m2), (-d2, -d1));
    }

    #[test]
    fn joint_gradient_examples() {
        let (g1, g2) = joint_gradients(&g(1.2, 1.0, 1.5, 2.0)).unwrap();
        assert!(close(g1.d_b, 0.26667, 1e-5));
        assert!(close(g1.d_v, -0.66667, 1e-5));
        assert_eq!((g2.d_b, g2.d_v), (0.0, 1.0));

        let (g1, g2) = joint_gradients(&g(1.2, 1.0, 0.2, 0.3)).unwrap();
        assert!(close(g1.d_b, 0.711803, 1e-6));
        assert!(close(g1.d_v, -0.088820, 1e-6));
        assert!(close(g2.d_b, -0.388197, 1e-6));
        assert!(close(g2.d_v, 0.161180, 1e-6));
    }

    #[test]
    fn gradients_match_finite_differences_on_examples() {
        for game in [
            g(1.2, 1.0, 1.5, 2.0),
            g(1.2, 1.0, 0.2, 0.3),
            g(1.2, 1.0, 0.4, 0.9),
            g(2.0, 0.7, 0.3, 0.55),
        ] {
            let (a1, a2) = joint_gradients(&game).unwrap();
            let (f1, f2) = fd_gradient(&game, 1e-5).unwrap();
            for (a, f) in [
                (a1.d_b, f1.d_b),
                (a1.d_v, f1.d_v),
                (a2.d_b, f2.d_b),
                (a2.d_v, f2.d_v),
            ] {
                let scale = a.abs().max(f.abs());
                if scale > 1e-8 {
                    assert!(
                        (a - f).abs() <= 1e-6 * scale,
                        "{game:?}: analytic {a} vs fd {f}"
                    );
                } else {
                    assert!((a - f).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn fd_gradient_rejects_boundary_games() {
        assert!(matches!(
            fd_gradient(&g(1.0, 1.0, 1.0, 1.0), 1e-5),
            Err(Error::StepTooLarge { .. })
        ));
    }
}
