//! Coverage algebra: merging vectors, percentages, gains, and the
//! `improves` predicate that drives suite augmentation.
//!
//! Percentages are exact rationals internally and are rendered with two
//! decimals and a dot separator only at display time.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interp::CoverageVector;

/// Exact percentage arithmetic.
pub type Pct = Ratio<i128>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("coverage vectors belong to different programs: `{0}` vs `{1}`")]
pub struct ProgramMismatch(pub String, pub String);

/// Hit/total counts for one coverage dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub hit: u32,
    pub total: u32,
}

impl Counts {
    /// Exact percentage; a zero total counts as fully covered.
    pub fn pct(&self) -> Pct {
        if self.total == 0 {
            Ratio::from_integer(100)
        } else {
            Ratio::new(100 * i128::from(self.hit), i128::from(self.total))
        }
    }
}

/// Statement and branch coverage of one program under one suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageMetrics {
    pub stmt: Counts,
    pub branch: Counts,
    /// Set when the program has no decisions; such programs report 100%
    /// branch coverage vacuously and never drive augmentation on branches.
    pub no_branches: bool,
}

impl CoverageMetrics {
    pub fn stmt_pct(&self) -> Pct {
        self.stmt.pct()
    }

    pub fn branch_pct(&self) -> Pct {
        self.branch.pct()
    }

    /// Component-wise `>=` on the percentage pair.
    pub fn dominates(&self, other: &CoverageMetrics) -> bool {
        self.stmt_pct() >= other.stmt_pct() && self.branch_pct() >= other.branch_pct()
    }
}

/// Coverage gain in percentage points, statement and branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gain {
    pub stmt: Pct,
    pub branch: Pct,
}

impl Gain {
    pub fn zero() -> Self {
        Gain {
            stmt: Ratio::from_integer(0),
            branch: Ratio::from_integer(0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.stmt == Ratio::from_integer(0) && self.branch == Ratio::from_integer(0)
    }

    /// Point-wise difference of two gains (used for CCT-vs-baseline deltas).
    pub fn minus(&self, other: &Gain) -> Gain {
        Gain {
            stmt: self.stmt - other.stmt,
            branch: self.branch - other.branch,
        }
    }
}

/// Union of two coverage vectors of the same program.
pub fn merge(a: &CoverageVector, b: &CoverageVector) -> Result<CoverageVector, ProgramMismatch> {
    if a.program_id != b.program_id || a.stmt_total != b.stmt_total || a.arm_total != b.arm_total
    {
        return Err(ProgramMismatch(
            a.program_id.to_string(),
            b.program_id.to_string(),
        ));
    }
    let mut out = a.clone();
    out.stmts_hit.extend(b.stmts_hit.iter().copied());
    out.arms_hit.extend(b.arms_hit.iter().copied());
    Ok(out)
}

/// Percentages for a coverage vector.
pub fn metrics(v: &CoverageVector) -> CoverageMetrics {
    CoverageMetrics {
        stmt: Counts {
            hit: v.stmts_hit.len() as u32,
            total: v.stmt_total,
        },
        branch: Counts {
            hit: v.arms_hit.len() as u32,
            total: v.arm_total,
        },
        no_branches: v.arm_total == 0,
    }
}

/// True when `candidate` exercises at least one statement or one branch arm
/// that `current` does not.
pub fn improves(
    candidate: &CoverageVector,
    current: &CoverageVector,
) -> Result<bool, ProgramMismatch> {
    if candidate.program_id != current.program_id {
        return Err(ProgramMismatch(
            candidate.program_id.to_string(),
            current.program_id.to_string(),
        ));
    }
    let new_stmt = candidate
        .stmts_hit
        .iter()
        .any(|s| !current.stmts_hit.contains(s));
    let new_arm = candidate
        .arms_hit
        .iter()
        .any(|a| !current.arms_hit.contains(a));
    Ok(new_stmt || new_arm)
}

/// Point-wise percentage difference `after - before`.
pub fn gain(after: &CoverageMetrics, before: &CoverageMetrics) -> Gain {
    Gain {
        stmt: after.stmt_pct() - before.stmt_pct(),
        branch: after.branch_pct() - before.branch_pct(),
    }
}

/// Render a count pair as a percentage with two decimals, e.g.
/// `format_percent(292, 336)` is `"86.90%"`. Rounding is half away from
/// zero on the second decimal.
pub fn format_percent(hit: u64, total: u64) -> String {
    if total == 0 {
        return "100.00%".to_string();
    }
    format_pct_ratio(Ratio::new(100 * i128::from(hit), i128::from(total)))
}

/// Render an exact percentage value (e.g. a gain) with two decimals.
pub fn format_pct_ratio(pct: Pct) -> String {
    format!("{}%", format_fixed2(pct))
}

/// Render an exact rational with two decimals, rounding half away from zero.
pub fn format_fixed2(value: Ratio<i128>) -> String {
    let scaled = value * Ratio::from_integer(100);
    let (num, den) = (*scaled.numer(), *scaled.denom()); // den > 0 after reduction
    let hundredths = (2 * num.abs() + den) / (2 * den);
    let sign = if num < 0 && hundredths > 0 { "-" } else { "" };
    format!("{sign}{}.{:02}", hundredths / 100, hundredths % 100)
}
