//! Closed-form existence predicates for mutually beneficial transfers.
//!
//! Valuation-transfer feasibility is decided by a rule catalogue covering
//! every (budget region, source case, post-transfer case) triple. Each
//! rule intersects the exact intervals on which both players' payoff
//! gains are positive with the interval on which the post-transfer game
//! actually lies in the target case, and a nonempty result is returned as
//! a [`Certificate`]. Budget-transfer feasibility is grid based; joint
//! feasibility follows from the payoff gradients at the origin.

use serde::{Deserialize, Serialize};

use crate::adversary::classify_case;
use crate::model::{BudgetRegion, CaseLabel, GameInstance, TransferPair};
use crate::oracle::search_budget;
use crate::payoff::{all_in_rate, joint_gradients, payoff_deltas, player_payoffs};
use crate::{Error, Result};

/// Default grid size for the budget-transfer membership test.
pub const DEFAULT_GB_GRID: usize = 4_001;
/// Default relative tolerance for the measure-zero joint test.
pub const DEFAULT_MEASURE_ZERO_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Quadratic roots
// ---------------------------------------------------------------------------

/// Root structure of `a z^2 + b z + c = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RootKind {
    TwoReal { z_minus: f64, z_plus: f64 },
    DoubleRoot(f64),
    NoReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRoots {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub kind: RootKind,
}

/// Numerically stable quadratic solver. A zero leading coefficient falls
/// back to the linear root, reported as a double root.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Result<QuadraticRoots> {
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return Err(Error::DegenerateAllZero);
    }
    let kind = if a == 0.0 {
        if b == 0.0 {
            RootKind::NoReal
        } else {
            RootKind::DoubleRoot(-c / b)
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        let threshold = 1e-12 * (b * b).max((4.0 * a * c).abs());
        if disc.abs() <= threshold {
            RootKind::DoubleRoot(-b / (2.0 * a))
        } else if disc < 0.0 {
            RootKind::NoReal
        } else {
            // Avoid cancellation: compute the far root first.
            let sign = if b >= 0.0 { 1.0 } else { -1.0 };
            let q = -0.5 * (b + sign * disc.sqrt());
            let r1 = q / a;
            let r2 = if q != 0.0 { c / q } else { 0.0 };
            RootKind::TwoReal {
                z_minus: r1.min(r2),
                z_plus: r1.max(r2),
            }
        }
    };
    Ok(QuadraticRoots { a, b, c, kind })
}

// ---------------------------------------------------------------------------
// Open-interval sets
// ---------------------------------------------------------------------------

/// A finite union of disjoint open intervals, kept sorted.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct IntervalSet(Vec<(f64, f64)>);

impl IntervalSet {
    pub(crate) fn empty() -> Self {
        IntervalSet(Vec::new())
    }

    pub(crate) fn interval(lo: f64, hi: f64) -> Self {
        if lo < hi {
            IntervalSet(vec![(lo, hi)])
        } else {
            IntervalSet::empty()
        }
    }

    pub(crate) fn greater_than(x: f64) -> Self {
        IntervalSet::interval(x, f64::INFINITY)
    }

    pub(crate) fn less_than(x: f64) -> Self {
        IntervalSet::interval(f64::NEG_INFINITY, x)
    }

    pub(crate) fn all() -> Self {
        IntervalSet::interval(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub(crate) fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut ivs: Vec<(f64, f64)> = self.0.iter().chain(other.0.iter()).copied().collect();
        ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match out.last_mut() {
                // Strict overlap merges; touching endpoints stay separate
                // because the shared point itself is excluded.
                Some(last) if iv.0 < last.1 => last.1 = last.1.max(iv.1),
                _ => out.push(iv),
            }
        }
        IntervalSet(out)
    }

    pub(crate) fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let a = self.0[i];
            let b = other.0[j];
            let lo = a.0.max(b.0);
            let hi = a.1.min(b.1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a.1 <= b.1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet(out)
    }

    pub(crate) fn components(&self) -> &[(f64, f64)] {
        &self.0
    }
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

/// Whether a certificate keeps the game in its case or moves it to another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    IntraCase(CaseLabel),
    InterCase(CaseLabel, CaseLabel),
}

/// A constructive witness of valuation-transfer feasibility: the catalogue
/// rule that fired and the open interval of beneficial transfer amounts,
/// expressed in the canonical orientation. `direction` is the transfer
/// sign in the original orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub proposition: u8,
    pub interval: (f64, f64),
    pub direction: i8,
}

/// Aggregate membership answers for one game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipRecord {
    pub in_gv: bool,
    pub certificates: Vec<Certificate>,
    pub in_gb: bool,
    pub joint_feasible: bool,
    pub in_measure_zero: bool,
    pub case: CaseLabel,
    pub region: BudgetRegion,
    /// Set when the game sits within relative 1e-9 of a strict-inequality
    /// decision boundary; knife-edge games are excluded from agreement
    /// statistics.
    pub near_boundary: bool,
}

// ---------------------------------------------------------------------------
// Case windows along the valuation-transfer axis
// ---------------------------------------------------------------------------

/// Boundary crossings of the post-transfer case as `tau_v` grows, for a
/// canonical game.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Thresholds {
    /// Ratio equality `phi1_bar/phi2_bar = x1/x2`.
    pub alpha: f64,
    /// Mirror all-in threshold: case 2b / 1b crossing.
    pub beta: f64,
    /// Own all-in threshold: case 1a / 2a crossing.
    pub gamma: f64,
    /// Case 2a / 3 crossing (regions with `x1 + x2 < 1` only).
    pub lb3: f64,
    /// Case 3 / 2b crossing.
    pub lb5: f64,
}

pub(crate) fn thresholds(c: &GameInstance) -> Thresholds {
    let xx = c.x1 * c.x2;
    Thresholds {
        alpha: (c.phi1 * c.x2 - c.phi2 * c.x1) / (c.x1 + c.x2),
        beta: (c.phi1 - xx * c.phi2) / (1.0 + xx),
        gamma: (xx * c.phi1 - c.phi2) / (1.0 + xx),
        lb3: (xx * c.phi1 - (1.0 - c.x2).powi(2) * c.phi2) / (xx + (1.0 - c.x2).powi(2)),
        lb5: ((1.0 - c.x1).powi(2) * c.phi1 - xx * c.phi2) / ((1.0 - c.x1).powi(2) + xx),
    }
}

/// Interval of `tau_v` on which the post-transfer game lies in `target`,
/// for a canonical game in the given budget region. `None` when the target
/// case does not exist in that region.
fn case_window(c: &GameInstance, region: BudgetRegion, target: CaseLabel) -> Option<(f64, f64)> {
    let t = thresholds(c);
    let inf = f64::INFINITY;
    use BudgetRegion::*;
    use CaseLabel::*;
    match (region, target) {
        (A1, C1b) => Some((t.alpha, inf)),
        (A2, C2b) => Some((t.alpha, t.beta)),
        (A2, C1b) => Some((t.beta, inf)),
        (A3, C2a) => Some((t.gamma, t.alpha)),
        (A3, C1b) => Some((t.alpha, inf)),
        (A4, C2a) => Some((t.gamma, t.alpha)),
        (A4, C2b) => Some((t.alpha, t.beta)),
        (A4, C1b) => Some((t.beta, inf)),
        (A5, C2a) => Some((t.gamma, t.lb3)),
        (A5, C3) => Some((t.lb3, t.lb5)),
        (A5, C2b) => Some((t.lb5, t.beta)),
        (A5, C1b) => Some((t.beta, inf)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Payoff forms inside a target case
// ---------------------------------------------------------------------------

/// A player's payoff as a function of `tau_v` while the post-transfer game
/// stays inside one case: `a + b*tau` plus, for the square-root cases,
/// `0.5*sqrt(k*(phi1-tau)*(phi2+tau))`.
#[derive(Clone, Copy, Debug)]
enum PostForm {
    Linear { a: f64, b: f64 },
    Sqrt { a: f64, b: f64, k: f64 },
}

/// Case-local payoff forms `(player 1, player 2)` for a canonical game.
fn target_forms(c: &GameInstance, target: CaseLabel) -> (PostForm, PostForm) {
    match target {
        // Adversary all-in against front 2; front 1 uncontested.
        CaseLabel::C1b => {
            let r2 = all_in_rate(c.x2);
            (
                PostForm::Linear { a: c.phi1, b: -1.0 },
                PostForm::Linear { a: c.phi2 * r2, b: r2 },
            )
        }
        CaseLabel::C2a => {
            let k = c.x1 / c.x2;
            let r2 = 1.0 - 1.0 / (2.0 * c.x2);
            (
                PostForm::Sqrt { a: 0.0, b: 0.0, k },
                PostForm::Sqrt { a: c.phi2 * r2, b: r2, k },
            )
        }
        CaseLabel::C2b => {
            let k = c.x2 / c.x1;
            let r1 = 1.0 - 1.0 / (2.0 * c.x1);
            (
                PostForm::Sqrt { a: c.phi1 * r1, b: -r1, k },
                PostForm::Sqrt { a: 0.0, b: 0.0, k },
            )
        }
        CaseLabel::C3 => {
            let k = c.x1 * c.x2;
            (
                PostForm::Sqrt { a: 0.5 * c.phi1 * c.x1, b: -0.5 * c.x1, k },
                PostForm::Sqrt { a: 0.5 * c.phi2 * c.x2, b: 0.5 * c.x2, k },
            )
        }
        CaseLabel::C1a | CaseLabel::C4 => unreachable!("not a transfer target"),
    }
}

/// The exact set of `tau` on which the case-local payoff exceeds the
/// baseline `u0`.
///
/// For the square-root forms the gain condition reads
/// `sqrt(k P(tau)) > p + q tau` with `P(tau) = (phi1-tau)(phi2+tau)`;
/// it holds where the right side is negative or where the squared
/// comparison, a convex quadratic, is negative. The union of the two is a
/// single interval because the gain is concave in `tau`.
fn gain_set(c: &GameInstance, form: PostForm, u0: f64) -> IntervalSet {
    match form {
        PostForm::Linear { a, b } => {
            if b > 0.0 {
                IntervalSet::greater_than((u0 - a) / b)
            } else if b < 0.0 {
                IntervalSet::less_than((u0 - a) / b)
            } else if a > u0 {
                IntervalSet::all()
            } else {
                IntervalSet::empty()
            }
        }
        PostForm::Sqrt { a, b, k } => {
            let p = 2.0 * (u0 - a);
            let q = -2.0 * b;
            let linear = if q < 0.0 {
                IntervalSet::greater_than(p / -q)
            } else if q > 0.0 {
                IntervalSet::less_than(-p / q)
            } else if p < 0.0 {
                IntervalSet::all()
            } else {
                IntervalSet::empty()
            };
            let qa = k + q * q;
            let qb = 2.0 * p * q - k * (c.phi1 - c.phi2);
            let qc = p * p - k * c.phi1 * c.phi2;
            let quad = match quadratic_roots(qa, qb, qc) {
                Ok(QuadraticRoots { kind: RootKind::TwoReal { z_minus, z_plus }, .. }) => {
                    IntervalSet::interval(z_minus, z_plus)
                }
                _ => IntervalSet::empty(),
            };
            linear.union(&quad)
        }
    }
}

// ---------------------------------------------------------------------------
// The rule catalogue
// ---------------------------------------------------------------------------

/// Inter-case rules: (budget region, source case, target case, rule id).
///
/// Every case reachable from the source as `tau_v` grows gets a rule, so
/// together with the intra-case rules the catalogue is exhaustive over
/// positive transfers. Ids 4-17 name the distinct (source, target) bound
/// patterns; a pattern recurring in another region keeps its id, since
/// only the case window changes. Ids 18-19 cover transfers out of case 3,
/// which no 4-17 pattern reaches.
const RULES: &[(BudgetRegion, CaseLabel, CaseLabel, u8)] = &[
    (BudgetRegion::A1, CaseLabel::C1a, CaseLabel::C1b, 4),
    (BudgetRegion::A2, CaseLabel::C1a, CaseLabel::C1b, 5),
    (BudgetRegion::A2, CaseLabel::C1a, CaseLabel::C2b, 6),
    (BudgetRegion::A3, CaseLabel::C1a, CaseLabel::C2a, 7),
    (BudgetRegion::A3, CaseLabel::C1a, CaseLabel::C1b, 8),
    (BudgetRegion::A3, CaseLabel::C2a, CaseLabel::C1b, 9),
    (BudgetRegion::A4, CaseLabel::C1a, CaseLabel::C2a, 7),
    (BudgetRegion::A4, CaseLabel::C1a, CaseLabel::C1b, 10),
    (BudgetRegion::A4, CaseLabel::C1a, CaseLabel::C2b, 11),
    (BudgetRegion::A4, CaseLabel::C2a, CaseLabel::C1b, 12),
    (BudgetRegion::A4, CaseLabel::C2a, CaseLabel::C2b, 13),
    (BudgetRegion::A5, CaseLabel::C1a, CaseLabel::C2a, 7),
    (BudgetRegion::A5, CaseLabel::C1a, CaseLabel::C3, 14),
    (BudgetRegion::A5, CaseLabel::C1a, CaseLabel::C2b, 15),
    (BudgetRegion::A5, CaseLabel::C1a, CaseLabel::C1b, 10),
    (BudgetRegion::A5, CaseLabel::C2a, CaseLabel::C3, 16),
    (BudgetRegion::A5, CaseLabel::C2a, CaseLabel::C2b, 17),
    (BudgetRegion::A5, CaseLabel::C2a, CaseLabel::C1b, 12),
    (BudgetRegion::A5, CaseLabel::C3, CaseLabel::C2b, 18),
    (BudgetRegion::A5, CaseLabel::C3, CaseLabel::C1b, 19),
];

/// Intra-case rule ids for the catalogue's first three entries.
fn intra_rule_id(source: CaseLabel) -> u8 {
    match source {
        CaseLabel::C1a => 1,
        CaseLabel::C2a => 2,
        CaseLabel::C3 => 3,
        _ => unreachable!(),
    }
}

/// Width below which an interval is treated as numerical dust.
fn min_width(c: &GameInstance) -> f64 {
    1e-12 * (c.phi1 + c.phi2)
}

fn certify(
    c: &GameInstance,
    base: (f64, f64),
    target: CaseLabel,
    window: (f64, f64),
    kind: CertificateKind,
    proposition: u8,
    direction: i8,
) -> Vec<Certificate> {
    let (f1, f2) = target_forms(c, target);
    let set = gain_set(c, f1, base.0)
        .intersect(&gain_set(c, f2, base.1))
        .intersect(&IntervalSet::interval(window.0, window.1))
        .intersect(&IntervalSet::interval(0.0, c.phi1));
    set.components()
        .iter()
        .filter(|(lo, hi)| hi - lo > min_width(c))
        .map(|&(lo, hi)| Certificate {
            kind,
            proposition,
            interval: (lo, hi),
            direction,
        })
        .collect()
}

/// Source-case classification of a canonical game, with the zero transfer.
fn source_case(c: &GameInstance) -> CaseLabel {
    classify_case(&c.zero_transfer()).expect("valid canonical game classifies")
}

fn intra_certificate(c: &GameInstance, source: CaseLabel, region: BudgetRegion, direction: i8) -> Option<Certificate> {
    if !matches!(source, CaseLabel::C2a | CaseLabel::C3) {
        return None;
    }
    let window = case_window(c, region, source)?;
    let base = player_payoffs(c, &TransferPair::ZERO).expect("baseline payoffs");
    certify(
        c,
        (base.u1, base.u2),
        source,
        window,
        CertificateKind::IntraCase(source),
        intra_rule_id(source),
        direction,
    )
    .into_iter()
    .next()
}

fn inter_certificates(c: &GameInstance, source: CaseLabel, region: BudgetRegion, direction: i8) -> Vec<Certificate> {
    let base = player_payoffs(c, &TransferPair::ZERO).expect("baseline payoffs");
    let mut out = Vec::new();
    for &(r, s, target, prop) in RULES {
        if r != region || s != source {
            continue;
        }
        let Some(window) = case_window(c, region, target) else { continue };
        out.extend(certify(
            c,
            (base.u1, base.u2),
            target,
            window,
            CertificateKind::InterCase(source, target),
            prop,
            direction,
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Public predicates
// ---------------------------------------------------------------------------

fn on_exact_boundary(c: &GameInstance) -> bool {
    let s = (c.phi1 * c.x1 * c.x2 / c.phi2).sqrt();
    c.phi1 * c.x2 == c.phi2 * c.x1 || s == 1.0 || 1.0 - s == c.x2
}

/// Stated conditions for an arbitrarily small beneficial transfer that
/// stays within the source case (rules 2 and 3 of the catalogue; rule 1
/// says case 1 admits none).
pub fn intra_case_condition(g: &GameInstance) -> Result<bool> {
    let (c, _) = g.canonicalize();
    if on_exact_boundary(&c) {
        return Err(Error::OnCaseBoundary);
    }
    match source_case(&c) {
        CaseLabel::C1a => Ok(false),
        CaseLabel::C2a => Ok(c.phi2 < c.phi1
            && 2.0 - 4.0 * c.x2
                < (c.phi1 - c.phi2) * (c.x1 * c.x2 / (c.phi1 * c.phi2)).sqrt()),
        CaseLabel::C3 => Ok(c.phi2 < c.phi1
            && c.x2 * (c.phi1 - c.phi2).powi(2) > 4.0 * c.phi1 * c.phi2 * c.x1),
        CaseLabel::C4 => Err(Error::OnCaseBoundary),
        _ => unreachable!("canonical game"),
    }
}

/// Certificate for an intra-case beneficial valuation transfer, if one
/// exists. The interval is the maximal range of beneficial `tau_v` that
/// keeps the game inside its case.
pub fn intra_case_beneficial(g: &GameInstance) -> Result<Option<Certificate>> {
    let (c, swapped) = g.canonicalize();
    if on_exact_boundary(&c) {
        return Err(Error::OnCaseBoundary);
    }
    let source = source_case(&c);
    if source == CaseLabel::C4 {
        return Err(Error::OnCaseBoundary);
    }
    let direction = if swapped { -1 } else { 1 };
    Ok(intra_certificate(&c, source, c.budget_region(), direction))
}

/// Certificates for beneficial valuation transfers that move the game to a
/// different case, one per catalogue rule whose conditions hold.
pub fn inter_case_beneficial(g: &GameInstance) -> Result<Vec<Certificate>> {
    let (c, swapped) = g.canonicalize();
    let source = source_case(&c);
    if source == CaseLabel::C4 {
        return Ok(Vec::new());
    }
    if on_exact_boundary(&c) {
        return Err(Error::OnCaseBoundary);
    }
    let direction = if swapped { -1 } else { 1 };
    Ok(inter_certificates(&c, source, c.budget_region(), direction))
}

/// Whether a mutually beneficial valuation transfer exists, with the
/// certificates that witness it. Games at ratio equality (case 4) admit
/// none.
pub fn in_gv(g: &GameInstance) -> (bool, Vec<Certificate>) {
    let (c, swapped) = g.canonicalize();
    let source = source_case(&c);
    if source == CaseLabel::C4 {
        return (false, Vec::new());
    }
    let region = c.budget_region();
    let direction = if swapped { -1 } else { 1 };
    let mut certs = Vec::new();
    if let Some(cert) = intra_certificate(&c, source, region, direction) {
        certs.push(cert);
    }
    certs.extend(inter_certificates(&c, source, region, direction));
    (!certs.is_empty(), certs)
}

/// The sign every beneficial valuation transfer must carry: positive
/// (toward Player 2) exactly when Player 1 is relatively weaker.
pub fn valuation_direction(g: &GameInstance) -> Result<i8> {
    let (member, _) = in_gv(g);
    if !member {
        return Err(Error::NotInGv);
    }
    Ok(if g.phi1 * g.x2 > g.phi2 * g.x1 { 1 } else { -1 })
}

/// Grid-based membership in the budget-transfer feasibility set.
pub fn in_gb(g: &GameInstance, n: usize) -> bool {
    assert!(n >= 1_001, "budget membership grid must have at least 1001 points");
    !search_budget(g, n).is_empty()
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Whether the game lies (within relative `tol`) on the exceptional set
/// where the gradient argument for joint transfers fails: a case boundary,
/// the case-2 locus where the two gradients are anti-proportional, or the
/// case-3 point where the catalogue's zero-derivative loci intersect.
pub fn in_measure_zero_joint(g: &GameInstance, tol: f64) -> bool {
    let (c, _) = g.canonicalize();
    if rel_eq(c.phi1 * c.x2, c.phi2 * c.x1, tol) {
        return true;
    }
    let s = (c.phi1 * c.x1 * c.x2 / c.phi2).sqrt();
    if rel_eq(s, 1.0, tol) || rel_eq(1.0 - s, c.x2, tol) {
        return true;
    }
    match source_case(&c) {
        CaseLabel::C2a => rel_eq(
            c.phi1 * (1.0 - 2.0 * c.x2) * (c.x1 + c.x2),
            c.x1 * (c.phi1 - c.phi2),
            tol,
        ),
        CaseLabel::C3 => {
            rel_eq(c.phi1, 3.0 * c.phi2, tol)
                && rel_eq(
                    c.x2 * (c.phi1 - c.phi2).powi(2),
                    4.0 * c.phi1 * c.phi2 * c.x1,
                    tol,
                )
        }
        _ => false,
    }
}

/// A verified common ascent direction for a joint transfer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDirection {
    /// Unit direction components (budget, valuation).
    pub d_b: f64,
    pub d_v: f64,
    /// Step at which the direction was verified, and the payoff deltas
    /// observed there.
    pub step: f64,
    pub delta1: f64,
    pub delta2: f64,
}

/// Constructs a direction along which both payoffs strictly increase, by
/// summing the normalized gradients, and verifies it with a small finite
/// transfer. Fails with [`Error::NoDirection`] when the gradients are zero
/// or diametrically opposed.
pub fn joint_beneficial_direction(g: &GameInstance) -> Result<JointDirection> {
    let (g1, g2) = joint_gradients(g).map_err(|_| Error::NoDirection)?;
    let n1 = g1.norm();
    let n2 = g2.norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::NoDirection);
    }
    let db = g1.d_b / n1 + g2.d_b / n2;
    let dv = g1.d_v / n1 + g2.d_v / n2;
    let nd = db.hypot(dv);
    if nd < 1e-9 {
        return Err(Error::NoDirection);
    }
    let (db, dv) = (db / nd, dv / nd);

    let base_step = 1e-4 * g.phi1.min(g.phi2).min(g.x1).min(g.x2);
    let mut last = (0.0, 0.0, base_step);
    for shrink in [1.0, 1e-2, 1e-4] {
        let step = base_step * shrink;
        let t = TransferPair { tau_v: dv * step, tau_b: db * step };
        if let Ok((d1, d2)) = payoff_deltas(g, &t) {
            if d1 > 0.0 && d2 > 0.0 {
                return Ok(JointDirection { d_b: db, d_v: dv, step, delta1: d1, delta2: d2 });
            }
            last = (d1, d2, step);
        }
    }
    Err(Error::DirectionNotVerified { delta1: last.0, delta2: last.1, step: last.2 })
}

/// Relative distance from the nearest predicate decision boundary:
/// case-classification equalities and budget-region edges. Used to exclude
/// knife-edge games from oracle agreement statistics.
pub fn near_predicate_boundary(g: &GameInstance, tol: f64) -> bool {
    let (c, _) = g.canonicalize();
    let s = (c.phi1 * c.x1 * c.x2 / c.phi2).sqrt();
    let gaps = [
        rel_gap(c.phi1 * c.x2, c.phi2 * c.x1),
        rel_gap(s, 1.0),
        rel_gap(1.0 - s, c.x2),
        rel_gap(c.x1, 1.0),
        rel_gap(c.x2, 1.0),
        rel_gap(c.x1 + c.x2, 1.0),
    ];
    gaps.into_iter().fold(f64::INFINITY, f64::min) < tol
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Options for [`membership_with`].
#[derive(Clone, Copy, Debug)]
pub struct MembershipOptions {
    pub gb_grid: usize,
    pub measure_zero_tol: f64,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        MembershipOptions {
            gb_grid: DEFAULT_GB_GRID,
            measure_zero_tol: DEFAULT_MEASURE_ZERO_TOL,
        }
    }
}

/// Full membership record for one game, with explicit options.
pub fn membership_with(g: &GameInstance, opts: &MembershipOptions) -> MembershipRecord {
    let case = classify_case(&g.zero_transfer()).expect("valid game classifies");
    let region = g.budget_region();
    let (gv, certificates) = in_gv(g);
    let gb = in_gb(g, opts.gb_grid);
    let mz = in_measure_zero_joint(g, opts.measure_zero_tol);
    let joint = !mz && joint_beneficial_direction(g).is_ok();
    MembershipRecord {
        in_gv: gv,
        certificates,
        in_gb: gb,
        joint_feasible: joint,
        in_measure_zero: mz,
        case,
        region,
        near_boundary: near_predicate_boundary(g, 1e-9),
    }
}

/// Full membership record with default options.
pub fn membership(g: &GameInstance) -> MembershipRecord {
    membership_with(g, &MembershipOptions::default())
}
