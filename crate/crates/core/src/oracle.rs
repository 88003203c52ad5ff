//! Brute-force root verification for the curve solver.
//!
//! Bisection on the curve residual, deliberately slow and simple: it shares
//! only the residual definition with the closed-form solver and none of the
//! root-finding path, so agreement between the two is meaningful evidence.
//! The residual is strictly monotone in any single unknown factor, so a
//! sign change brackets the unique root.
//!
//! Oracle tolerances are two orders of magnitude tighter than solver
//! acceptance, so oracle error never masks solver error.

use crate::curve::{residual_at, residual_scale, CurveSpec};
use crate::error::{Error, Result};

/// Residual acceptance for the oracle, relative to the curve-side scale.
pub const ORACLE_RESIDUAL_TOL: f64 = 1e-14;
/// Interval-width acceptance for the oracle, relative to the root.
pub const ORACLE_WIDTH_TOL: f64 = 1e-15;

/// Seed interval for automatic bracketing.
const BRACKET_SEED: (f64, f64) = (0.5, 2.0);
/// Geometric expansion factor per bracketing round.
const BRACKET_EXPAND: f64 = 4.0;
/// Hard bracketing bounds; roots outside are treated as infeasible.
const BRACKET_MIN: f64 = 1e-9;
const BRACKET_MAX: f64 = 1e9;

/// Search bounds for one unknown growth factor, `0 < lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketingInterval {
    pub lo: f64,
    pub hi: f64,
}

impl BracketingInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi <= lo {
            return Err(Error::NonPositiveInput(format!("bracket [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

fn opposite_signs(a: f64, b: f64) -> bool {
    a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0)
}

/// Expands geometrically from [1/2, 2] until the residual changes sign,
/// up to [1e-9, 1e9]. No sign change within the cap means the instance is
/// infeasible (used to confirm k=1 infeasibility verdicts).
pub fn auto_bracket(spec: &CurveSpec) -> Result<BracketingInterval> {
    let (mut lo, mut hi) = BRACKET_SEED;
    loop {
        let r_lo = residual_at(spec, lo)?;
        let r_hi = residual_at(spec, hi)?;
        if opposite_signs(r_lo, r_hi) {
            return BracketingInterval::new(lo, hi);
        }
        let mut expanded = false;
        if lo > BRACKET_MIN {
            lo = (lo / BRACKET_EXPAND).max(BRACKET_MIN);
            expanded = true;
        }
        if hi < BRACKET_MAX {
            hi = (hi * BRACKET_EXPAND).min(BRACKET_MAX);
            expanded = true;
        }
        if !expanded {
            return Err(Error::NoSignChange { lo, hi });
        }
    }
}

/// Bisects the residual to the unique root inside `bracket`.
///
/// Terminates when the residual falls under `1e-14·scale`, the interval
/// width under `1e-15·root`, or the interval collapses to adjacent floats;
/// exceeding `max_iter` raises `MaxIterations`.
pub fn bisect_growth(
    spec: &CurveSpec,
    bracket: BracketingInterval,
    max_iter: u32,
) -> Result<f64> {
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut r_lo = residual_at(spec, lo)?;
    let r_hi = residual_at(spec, hi)?;
    if r_lo == 0.0 {
        return Ok(lo);
    }
    if r_hi == 0.0 {
        return Ok(hi);
    }
    if !opposite_signs(r_lo, r_hi) {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Adjacent floats: as converged as f64 allows.
            return Ok(mid.clamp(lo, hi));
        }
        let r_mid = residual_at(spec, mid)?;
        let scale = residual_scale(&spec.resolved(mid)?)?;
        if r_mid.abs() <= ORACLE_RESIDUAL_TOL * scale {
            return Ok(mid);
        }
        if opposite_signs(r_lo, r_mid) {
            hi = mid;
        } else {
            lo = mid;
            r_lo = r_mid;
        }
        if hi - lo <= ORACLE_WIDTH_TOL * mid {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::MaxIterations(max_iter))
}

/// Convenience: bracket automatically, then bisect.
pub fn oracle_solve(spec: &CurveSpec, max_iter: u32) -> Result<f64> {
    let bracket = auto_bracket(spec)?;
    bisect_growth(spec, bracket, max_iter)
}
