//! Curve-data export: CSV sweeps of the swap and staking curves.

use std::io::Write;

use ekamm_core::{
    eval_g0, oracle_solve, solve_unknown_growth, CurveSpec, Error, GrowthVector,
};

use crate::commands::CliError;

/// Relative tolerance for oracle cross-checks under `--verify`.
pub const VERIFY_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Two-asset swap curve: solve g2 from g1 with g0 = 1 (header
    /// `k,g1,g2,status`; infeasible samples keep their row, annotated).
    SwapCurve,
    /// Single-asset staking curve: evaluate g0 from g1 in an n-asset pool
    /// (header `k,n,g1,g0`).
    StakeCurve,
}

#[derive(Debug, Clone)]
pub struct CurveSweepRequest {
    pub mode: SweepMode,
    pub k_values: Vec<f64>,
    /// Pool size; used by stake sweeps only.
    pub n: usize,
    /// Sample grid (lo, hi, steps) over the swept growth factor.
    pub g_range: (f64, f64, usize),
}

impl CurveSweepRequest {
    pub fn validate(&self) -> Result<(), Error> {
        let (lo, hi, steps) = self.g_range;
        if steps < 2 {
            return Err(Error::NonPositiveInput(format!("steps {steps} < 2")));
        }
        if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || lo >= hi {
            return Err(Error::NonPositiveInput(format!("range [{lo}, {hi}]")));
        }
        if self.k_values.is_empty() {
            return Err(Error::NonPositiveInput("no k values".into()));
        }
        for &k in &self.k_values {
            if !k.is_finite() || !(0.0..=1.0).contains(&k) {
                return Err(Error::KOutOfRange(k));
            }
        }
        if self.mode == SweepMode::StakeCurve && self.n == 0 {
            return Err(Error::NonPositiveInput("stake sweep needs n ≥ 1".into()));
        }
        Ok(())
    }

    /// Sorted, deduplicated parameters; output rows are ordered (k, g1).
    fn sorted_k(&self) -> Vec<f64> {
        let mut ks = self.k_values.clone();
        ks.sort_by(|a, b| a.partial_cmp(b).expect("finite k"));
        ks.dedup();
        ks
    }

    fn grid(&self) -> Vec<f64> {
        let (lo, hi, steps) = self.g_range;
        (0..steps)
            .map(|i| {
                if i + 1 == steps {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (steps - 1) as f64
                }
            })
            .collect()
    }
}

/// Runs the sweep, writing CSV rows sorted by (k, g1). With `verify`
/// every sample is cross-checked against the bisection oracle and any
/// disagreement aborts with an audit failure.
pub fn run_sweep(
    req: &CurveSweepRequest,
    writer: &mut dyn Write,
    verify: bool,
) -> Result<(), CliError> {
    req.validate().map_err(CliError::engine)?;
    match req.mode {
        SweepMode::SwapCurve => swap_sweep(req, writer, verify),
        SweepMode::StakeCurve => stake_sweep(req, writer, verify),
    }
}

fn swap_sweep(
    req: &CurveSweepRequest,
    writer: &mut dyn Write,
    verify: bool,
) -> Result<(), CliError> {
    writeln!(writer, "k,g1,g2,status").map_err(CliError::io)?;
    for k in req.sorted_k() {
        for g1 in req.grid() {
            let spec = CurveSpec::equal_weights(
                k,
                GrowthVector::new(vec![Some(g1), None], Some(1.0)).map_err(CliError::engine)?,
            )
            .map_err(CliError::engine)?;
            match solve_unknown_growth(&spec, 1e-12) {
                Ok(g2) => {
                    if verify {
                        cross_check(&spec, g2, k, g1)?;
                    }
                    writeln!(writer, "{k},{g1},{g2},ok").map_err(CliError::io)?;
                }
                Err(Error::NoPositiveRoot(_)) => {
                    if verify && oracle_solve(&spec, 200).is_ok() {
                        return Err(CliError::Audit(format!(
                            "solver says infeasible but oracle found a root at k={k} g1={g1}"
                        )));
                    }
                    writeln!(writer, "{k},{g1},,infeasible").map_err(CliError::io)?;
                }
                Err(other) => return Err(CliError::engine(other)),
            }
        }
    }
    Ok(())
}

fn stake_sweep(
    req: &CurveSweepRequest,
    writer: &mut dyn Write,
    verify: bool,
) -> Result<(), CliError> {
    writeln!(writer, "k,n,g1,g0").map_err(CliError::io)?;
    let n = req.n;
    for k in req.sorted_k() {
        for g1 in req.grid() {
            let mut assets = vec![Some(1.0); n];
            assets[0] = Some(g1);
            let spec = CurveSpec::equal_weights(
                k,
                GrowthVector::new(assets, None).map_err(CliError::engine)?,
            )
            .map_err(CliError::engine)?;
            let g0 = eval_g0(&spec).map_err(CliError::engine)?;
            if verify {
                cross_check(&spec, g0, k, g1)?;
            }
            writeln!(writer, "{k},{n},{g1},{g0}").map_err(CliError::io)?;
        }
    }
    Ok(())
}

fn cross_check(spec: &CurveSpec, solved: f64, k: f64, g1: f64) -> Result<(), CliError> {
    let oracle = oracle_solve(spec, 200).map_err(|e| {
        CliError::Audit(format!(
            "oracle found no root at k={k} g1={g1} where the solver returned {solved}: {e}"
        ))
    })?;
    let rel = (solved - oracle).abs() / oracle.abs().max(1e-300);
    if rel > VERIFY_REL_TOL {
        return Err(CliError::Audit(format!(
            "solver/oracle disagree at k={k} g1={g1}: {solved:e} vs {oracle:e} (rel {rel:e})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_request() -> CurveSweepRequest {
        CurveSweepRequest {
            mode: SweepMode::SwapCurve,
            k_values: vec![0.5],
            n: 2,
            g_range: (0.5, 2.0, 4),
        }
    }

    #[test]
    fn validation_rejects_bad_requests() {
        let mut req = base_request();
        req.g_range = (0.5, 2.0, 1);
        assert!(req.validate().is_err(), "steps < 2");
        let mut req = base_request();
        req.g_range = (0.0, 2.0, 4);
        assert!(req.validate().is_err(), "lo must be > 0");
        let mut req = base_request();
        req.g_range = (2.0, 0.5, 4);
        assert!(req.validate().is_err(), "lo < hi");
        let mut req = base_request();
        req.k_values = vec![1.25];
        assert!(req.validate().is_err(), "k range");
        let mut req = base_request();
        req.k_values.clear();
        assert!(req.validate().is_err(), "no k");
        let mut req = base_request();
        req.mode = SweepMode::StakeCurve;
        req.n = 0;
        assert!(req.validate().is_err(), "stake needs n");
        assert!(base_request().validate().is_ok());
    }

    #[test]
    fn grid_is_inclusive_and_sorted() {
        let req = CurveSweepRequest {
            mode: SweepMode::SwapCurve,
            k_values: vec![0.5, 0.0, 0.5],
            n: 2,
            g_range: (0.05, 3.0, 60),
        };
        let grid = req.grid();
        assert_eq!(grid.len(), 60);
        assert_eq!(grid[0], 0.05);
        assert_eq!(grid[59], 3.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(req.sorted_k(), vec![0.0, 0.5]);
    }
}
