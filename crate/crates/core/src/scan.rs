//! Parameter-space scans, Monte Carlo sampling, and payoff sweeps, emitted
//! as CSV (and optionally a small scatter SVG).
//!
//! All outputs are deterministic: grid cells and samples are computed
//! independently (sample RNGs are derived as `seed ^ index`), results are
//! merged in index order, and numbers are printed in shortest round-trip
//! form, so files are byte-identical across runs and worker counts.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{BudgetRegion, CaseLabel, GameInstance, TransferPair};
use crate::oracle::SplitMix64;
use crate::payoff::payoff_deltas;
use crate::transfer::{membership_with, MembershipOptions};
use crate::{Error, Result};

/// One grid point of a region scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub x1: f64,
    pub x2: f64,
    pub in_gv: bool,
    pub in_gb: bool,
    pub joint: bool,
    pub measure_zero: bool,
    pub case: CaseLabel,
    pub region: BudgetRegion,
}

/// One row of a payoff sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub tau_v: f64,
    pub delta_u1: f64,
    pub delta_u2: f64,
}

/// One Monte Carlo sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McRecord {
    pub x1: f64,
    pub x2: f64,
    pub in_gv: bool,
}

/// Grid coordinates `min + k*step` for `k >= 1`, up to `max` inclusive
/// (with a half-ulp of slack so e.g. `150 * 0.02` still lands on 3).
pub fn grid_coords(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::NonPositiveParameter { field: "step", value: step });
    }
    if !(min >= 0.0 && max > min) {
        return Err(Error::TransferOutOfRange {
            component: "range",
            value: min,
            lo: 0.0,
            hi: max,
        });
    }
    let slack = step * 1e-9;
    let mut coords = Vec::new();
    let mut k = 1u64;
    loop {
        let v = min + step * k as f64;
        if v > max + slack {
            break;
        }
        coords.push(v);
        k += 1;
    }
    Ok(coords)
}

/// Scans the budget plane at fixed valuations. Rows are ordered by `x2`
/// then `x1`.
pub fn grid_scan(
    phi1: f64,
    phi2: f64,
    x1_range: (f64, f64),
    x2_range: (f64, f64),
    step: f64,
    opts: &MembershipOptions,
) -> Result<Vec<ScanRecord>> {
    GameInstance::new(phi1, phi2, 1.0, 1.0)?;
    let x1s = grid_coords(x1_range.0, x1_range.1, step)?;
    let x2s = grid_coords(x2_range.0, x2_range.1, step)?;
    let cells: Vec<(f64, f64)> = x2s
        .iter()
        .flat_map(|&x2| x1s.iter().map(move |&x1| (x1, x2)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(x1, x2)| {
            let g = GameInstance { phi1, phi2, x1, x2 };
            let m = membership_with(&g, opts);
            ScanRecord {
                x1,
                x2,
                in_gv: m.in_gv,
                in_gb: m.in_gb,
                joint: m.joint_feasible,
                measure_zero: m.in_measure_zero,
                case: m.case,
                region: m.region,
            }
        })
        .collect())
}

/// Evaluates payoff deltas on `n` interior points of `(tau_lo, tau_hi)`,
/// which must sit inside the valuation-transfer domain.
pub fn sweep(g: &GameInstance, tau_lo: f64, tau_hi: f64, n: usize) -> Result<Vec<SweepRecord>> {
    g.validate()?;
    let ordered = tau_lo.is_finite() && tau_hi.is_finite() && tau_lo < tau_hi;
    if !ordered || tau_lo < -g.phi2 || tau_hi > g.phi1 {
        return Err(Error::TransferOutOfRange {
            component: "tau range",
            value: tau_lo,
            lo: -g.phi2,
            hi: g.phi1,
        });
    }
    let step = (tau_hi - tau_lo) / (n + 1) as f64;
    (1..=n)
        .map(|k| {
            let tau_v = tau_lo + step * k as f64;
            let (delta_u1, delta_u2) = payoff_deltas(g, &TransferPair::valuation(tau_v))?;
            Ok(SweepRecord { tau_v, delta_u1, delta_u2 })
        })
        .collect()
}

/// Draws seeded uniform budget pairs from `(0, x1_max] x (0, x2_max]` and
/// tests valuation-transfer membership at each.
pub fn monte_carlo(
    phi1: f64,
    phi2: f64,
    samples: u64,
    seed: u64,
    x1_max: f64,
    x2_max: f64,
) -> Result<Vec<McRecord>> {
    GameInstance::new(phi1, phi2, 1.0, 1.0)?;
    if !(x1_max > 0.0 && x2_max > 0.0) {
        return Err(Error::NonPositiveParameter { field: "budget bound", value: x1_max.min(x2_max) });
    }
    Ok((0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = SplitMix64::new(seed ^ i);
            // 1 - u maps [0,1) onto (0,1], keeping budgets positive.
            let x1 = (1.0 - rng.next_f64()) * x1_max;
            let x2 = (1.0 - rng.next_f64()) * x2_max;
            let g = GameInstance { phi1, phi2, x1, x2 };
            McRecord { x1, x2, in_gv: crate::transfer::in_gv(&g).0 }
        })
        .collect())
}

/// Agreement between sampled membership and the closed-form band that
/// characterizes it when both budgets reach the adversary's (the region-1
/// two-sided bound on `phi2/phi1`).
pub fn mc_summary(records: &[McRecord], phi1: f64, phi2: f64) -> String {
    let mut applicable = 0u64;
    let mut agree = 0u64;
    for r in records {
        let g = GameInstance { phi1, phi2, x1: r.x1, x2: r.x2 };
        let (c, _) = g.canonicalize();
        if c.x1 >= 1.0 && c.x2 >= 1.0 && c.phi1 * c.x2 > c.phi2 * c.x1 {
            applicable += 1;
            let lower = (2.0 * c.x1 * c.x2 - c.x1 - c.x2) / (2.0 * c.x1 * c.x1);
            let upper = (2.0 * c.x2 - 1.0) / (2.0 * c.x1);
            let ratio = c.phi2 / c.phi1;
            let band = lower < ratio && ratio < upper;
            if band == r.in_gv {
                agree += 1;
            }
        }
    }
    format!(
        "region-1 samples: {applicable}, closed-form band agreement: {agree}/{applicable}"
    )
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

/// CSV with header `x1,x2,in_gv,in_gb,joint,measure_zero,case,region`.
pub fn scan_csv(records: &[ScanRecord]) -> String {
    let mut out = String::from("x1,x2,in_gv,in_gb,joint,measure_zero,case,region\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.x1,
            r.x2,
            flag(r.in_gv),
            flag(r.in_gb),
            flag(r.joint),
            flag(r.measure_zero),
            r.case,
            r.region
        )
        .unwrap();
    }
    out
}

/// CSV with header `tau_v,delta_u1,delta_u2`.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from("tau_v,delta_u1,delta_u2\n");
    for r in records {
        writeln!(out, "{},{},{}", r.tau_v, r.delta_u1, r.delta_u2).unwrap();
    }
    out
}

/// CSV with header `x1,x2,in_gv`.
pub fn mc_csv(records: &[McRecord]) -> String {
    let mut out = String::from("x1,x2,in_gv\n");
    for r in records {
        writeln!(out, "{},{},{}", r.x1, r.x2, flag(r.in_gv)).unwrap();
    }
    out
}

const SVG_SIZE: f64 = 640.0;
const SVG_MARGIN: f64 = 40.0;

fn svg_open(out: &mut String) {
    let s = SVG_SIZE;
    write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n"
    )
    .unwrap();
}

fn svg_point(out: &mut String, x: f64, y: f64, x_max: f64, y_max: f64, color: &str, filled: bool) {
    let px = SVG_MARGIN + x / x_max * (SVG_SIZE - 2.0 * SVG_MARGIN);
    let py = SVG_SIZE - SVG_MARGIN - y / y_max * (SVG_SIZE - 2.0 * SVG_MARGIN);
    if filled {
        writeln!(out, "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"2\" fill=\"{color}\"/>").unwrap();
    } else {
        writeln!(
            out,
            "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"2\" fill=\"none\" stroke=\"{color}\"/>"
        )
        .unwrap();
    }
}

/// Scatter of a region scan: blue = valuation only, red = budget only,
/// purple = both, green = joint only.
pub fn scan_svg(records: &[ScanRecord]) -> String {
    let x_max = records.iter().map(|r| r.x1).fold(1.0, f64::max);
    let y_max = records.iter().map(|r| r.x2).fold(1.0, f64::max);
    let mut out = String::new();
    svg_open(&mut out);
    for r in records {
        let color = match (r.in_gv, r.in_gb) {
            (true, true) => "purple",
            (true, false) => "blue",
            (false, true) => "red",
            (false, false) if r.joint => "green",
            _ => continue,
        };
        svg_point(&mut out, r.x1, r.x2, x_max, y_max, color, true);
    }
    out.push_str("</svg>\n");
    out
}

/// Scatter of Monte Carlo samples: filled when a beneficial valuation
/// transfer exists.
pub fn mc_svg(records: &[McRecord]) -> String {
    let x_max = records.iter().map(|r| r.x1).fold(1.0, f64::max);
    let y_max = records.iter().map(|r| r.x2).fold(1.0, f64::max);
    let mut out = String::new();
    svg_open(&mut out);
    for r in records {
        svg_point(&mut out, r.x1, r.x2, x_max, y_max, "black", r.in_gv);
    }
    out.push_str("</svg>\n");
    out
}

/// Two polylines of the payoff deltas across the sweep range.
pub fn sweep_svg(records: &[SweepRecord]) -> String {
    let mut out = String::new();
    svg_open(&mut out);
    if records.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let t_lo = records[0].tau_v;
    let t_hi = records[records.len() - 1].tau_v;
    let d_max = records
        .iter()
        .flat_map(|r| [r.delta_u1.abs(), r.delta_u2.abs()])
        .fold(1e-9, f64::max);
    for (key, color) in [(0usize, "blue"), (1usize, "red")] {
        let pts: Vec<String> = records
            .iter()
            .map(|r| {
                let d = if key == 0 { r.delta_u1 } else { r.delta_u2 };
                let px = SVG_MARGIN + (r.tau_v - t_lo) / (t_hi - t_lo) * (SVG_SIZE - 2.0 * SVG_MARGIN);
                let py = SVG_SIZE / 2.0 - d / d_max * (SVG_SIZE / 2.0 - SVG_MARGIN);
                format!("{px:.1},{py:.1}")
            })
            .collect();
        writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\"/>",
            pts.join(" ")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_lands_on_round_coordinates() {
        let xs = grid_coords(0.0, 3.0, 0.02).unwrap();
        assert_eq!(xs.len(), 150);
        assert_eq!(xs[0], 0.02);
        assert_eq!(*xs.last().unwrap(), 3.0);
        assert!(xs.contains(&1.5) && xs.contains(&2.0));
    }

    #[test]
    fn single_cell_grid() {
        let xs = grid_coords(0.0, 0.5, 1.0).unwrap();
        assert!(xs.is_empty());
        let xs = grid_coords(0.0, 1.0, 0.7).unwrap();
        assert_eq!(xs, vec![0.7]);
    }

    #[test]
    fn sweep_rows_match_payoff_deltas() {
        let g = GameInstance { phi1: 1.2, phi2: 1.0, x1: 1.5, x2: 2.0 };
        let rows = sweep(&g, -1.0, 1.2, 101).unwrap();
        assert_eq!(rows.len(), 101);
        for r in &rows {
            let (d1, d2) = payoff_deltas(&g, &TransferPair::valuation(r.tau_v)).unwrap();
            assert_eq!((d1, d2), (r.delta_u1, r.delta_u2));
        }
    }

    #[test]
    fn sweep_rejects_out_of_domain_ranges() {
        let g = GameInstance { phi1: 1.2, phi2: 1.0, x1: 1.5, x2: 2.0 };
        assert!(sweep(&g, -1.5, 1.0, 10).is_err());
        assert!(sweep(&g, 0.0, 1.3, 10).is_err());
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let a = monte_carlo(1.2, 1.0, 100, 42, 3.0, 3.0).unwrap();
        let b = monte_carlo(1.2, 1.0, 100, 42, 3.0, 3.0).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo(1.2, 1.0, 100, 43, 3.0, 3.0).unwrap();
        assert_ne!(a, c);
        for r in &a {
            assert!(r.x1 > 0.0 && r.x1 <= 3.0 && r.x2 > 0.0 && r.x2 <= 3.0);
        }
    }

    #[test]
    fn csv_flags_are_zero_one() {
        let recs = monte_carlo(1.2, 1.0, 3, 1, 3.0, 3.0).unwrap();
        let csv = mc_csv(&recs);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,in_gv");
        for line in lines {
            let last = line.rsplit(',').next().unwrap();
            assert!(last == "0" || last == "1");
        }
    }
}
