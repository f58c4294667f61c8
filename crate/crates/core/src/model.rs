//! Game parameters, transfer arithmetic, and budget-space classification.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A game instance: front valuations and player budgets, all strictly
/// positive. The adversary's budget is normalized to 1 and never stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameInstance {
    pub phi1: f64,
    pub phi2: f64,
    pub x1: f64,
    pub x2: f64,
}

/// A signed transfer between the players.
///
/// `tau_v > 0` moves valuation from Player 1 to Player 2 and lives in
/// `(-phi2, phi1)`. `tau_b > 0` moves budget from Player 2 to Player 1 and
/// lives in `(-x1, x2)`; the opposite orientation is just `-tau_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferPair {
    pub tau_v: f64,
    pub tau_b: f64,
}

impl TransferPair {
    pub const ZERO: TransferPair = TransferPair { tau_v: 0.0, tau_b: 0.0 };

    pub fn new(tau_v: f64, tau_b: f64) -> Self {
        TransferPair { tau_v, tau_b }
    }

    /// Valuation-only transfer.
    pub fn valuation(tau_v: f64) -> Self {
        TransferPair { tau_v, tau_b: 0.0 }
    }

    /// Budget-only transfer (positive = Player 2 to Player 1).
    pub fn budget(tau_b: f64) -> Self {
        TransferPair { tau_v: 0.0, tau_b }
    }
}

/// The game after a stage-one transfer has been applied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostTransferGame {
    pub phi1: f64,
    pub phi2: f64,
    pub x1: f64,
    pub x2: f64,
}

/// The adversary's best-response regime. The `a` labels mean Player 1 is
/// the relatively weaker side (`phi1/phi2 >= x1/x2`), `b` the mirror; cases
/// 3 and 4 are symmetric and carry no side tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    C1a,
    C2a,
    C3,
    C4,
    C1b,
    C2b,
}

impl CaseLabel {
    /// The mirror label under a player swap.
    pub fn swapped(self) -> CaseLabel {
        match self {
            CaseLabel::C1a => CaseLabel::C1b,
            CaseLabel::C1b => CaseLabel::C1a,
            CaseLabel::C2a => CaseLabel::C2b,
            CaseLabel::C2b => CaseLabel::C2a,
            CaseLabel::C3 => CaseLabel::C3,
            CaseLabel::C4 => CaseLabel::C4,
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseLabel::C1a => "C1a",
            CaseLabel::C2a => "C2a",
            CaseLabel::C3 => "C3",
            CaseLabel::C4 => "C4",
            CaseLabel::C1b => "C1b",
            CaseLabel::C2b => "C2b",
        };
        f.write_str(s)
    }
}

/// Partition of the positive budget quadrant. `A5` is `x1 + x2 < 1`; the
/// others split on which budgets reach the adversary's unit budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BudgetRegion {
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl std::fmt::Display for BudgetRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BudgetRegion::A1 => "A1",
            BudgetRegion::A2 => "A2",
            BudgetRegion::A3 => "A3",
            BudgetRegion::A4 => "A4",
            BudgetRegion::A5 => "A5",
        };
        f.write_str(s)
    }
}

fn check_field(field: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { field, value });
    }
    if value <= 0.0 {
        return Err(Error::NonPositiveParameter { field, value });
    }
    Ok(())
}

impl GameInstance {
    /// Builds a validated game instance.
    pub fn new(phi1: f64, phi2: f64, x1: f64, x2: f64) -> Result<Self> {
        let g = GameInstance { phi1, phi2, x1, x2 };
        g.validate()?;
        Ok(g)
    }

    /// Checks that all four parameters are finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        check_field("phi1", self.phi1)?;
        check_field("phi2", self.phi2)?;
        check_field("x1", self.x1)?;
        check_field("x2", self.x2)?;
        Ok(())
    }

    /// The same game with the players exchanged.
    pub fn swap(&self) -> GameInstance {
        GameInstance {
            phi1: self.phi2,
            phi2: self.phi1,
            x1: self.x2,
            x2: self.x1,
        }
    }

    /// Reorients the game so that `phi1/phi2 >= x1/x2` (Player 1 weaker or
    /// tied), returning the reoriented game and whether a swap happened.
    ///
    /// All side-dependent predicates are evaluated on the canonical game
    /// and un-swapped afterwards, so mirror games give bit-identical
    /// results.
    pub fn canonicalize(&self) -> (GameInstance, bool) {
        if self.phi1 * self.x2 >= self.phi2 * self.x1 {
            (*self, false)
        } else {
            (self.swap(), true)
        }
    }

    /// The budget region containing `(x1, x2)`. Comparisons follow the set
    /// definitions literally: the `>= 1` bounds are closed, `A5` is the
    /// open `x1 + x2 < 1`.
    pub fn budget_region(&self) -> BudgetRegion {
        if self.x1 + self.x2 < 1.0 {
            BudgetRegion::A5
        } else if self.x1 >= 1.0 && self.x2 >= 1.0 {
            BudgetRegion::A1
        } else if self.x1 >= 1.0 {
            BudgetRegion::A2
        } else if self.x2 >= 1.0 {
            BudgetRegion::A3
        } else {
            BudgetRegion::A4
        }
    }

    /// The game viewed as a zero-transfer post-transfer state.
    pub fn zero_transfer(&self) -> PostTransferGame {
        PostTransferGame {
            phi1: self.phi1,
            phi2: self.phi2,
            x1: self.x1,
            x2: self.x2,
        }
    }

    /// Applies a stage-one transfer, checking it stays inside the open
    /// transfer domains.
    pub fn apply_transfer(&self, t: &TransferPair) -> Result<PostTransferGame> {
        if !t.tau_v.is_finite() {
            return Err(Error::NonFinite { field: "tau_v", value: t.tau_v });
        }
        if !t.tau_b.is_finite() {
            return Err(Error::NonFinite { field: "tau_b", value: t.tau_b });
        }
        if t.tau_v <= -self.phi2 || t.tau_v >= self.phi1 {
            return Err(Error::TransferOutOfRange {
                component: "tau_v",
                value: t.tau_v,
                lo: -self.phi2,
                hi: self.phi1,
            });
        }
        if t.tau_b <= -self.x1 || t.tau_b >= self.x2 {
            return Err(Error::TransferOutOfRange {
                component: "tau_b",
                value: t.tau_b,
                lo: -self.x1,
                hi: self.x2,
            });
        }
        Ok(PostTransferGame {
            phi1: self.phi1 - t.tau_v,
            phi2: self.phi2 + t.tau_v,
            x1: self.x1 + t.tau_b,
            x2: self.x2 - t.tau_b,
        })
    }
}

/// Standalone form of [`GameInstance::validate`].
pub fn validate(g: &GameInstance) -> Result<()> {
    g.validate()
}

/// Standalone form of [`GameInstance::apply_transfer`].
pub fn apply_transfer(g: &GameInstance, t: &TransferPair) -> Result<PostTransferGame> {
    g.apply_transfer(t)
}

impl PostTransferGame {
    /// Reinterprets the post-transfer state as a fresh game instance.
    pub fn as_game(&self) -> GameInstance {
        GameInstance {
            phi1: self.phi1,
            phi2: self.phi2,
            x1: self.x1,
            x2: self.x2,
        }
    }

    pub fn swap(&self) -> PostTransferGame {
        PostTransferGame {
            phi1: self.phi2,
            phi2: self.phi1,
            x1: self.x2,
            x2: self.x1,
        }
    }

    /// Canonical reorientation; see [`GameInstance::canonicalize`].
    pub fn canonicalize(&self) -> (PostTransferGame, bool) {
        if self.phi1 * self.x2 >= self.phi2 * self.x1 {
            (*self, false)
        } else {
            (self.swap(), true)
        }
    }
}
