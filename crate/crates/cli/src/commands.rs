//! Command implementations and the error-to-exit-code contract:
//! exit 1 for malformed input, 2 for infeasible trades, 3 for invariant
//! audit failures. Errors go to stderr as one JSON object.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use ekamm_core::doc::{
    format_decimal, parse_pool, receipt_to_json, receipt_to_json_pretty, serialize_pool,
};
use ekamm_core::tradelog::read_trade_log;
use ekamm_core::{
    apply, oracle_solve, pool_init, quote, CurveSpec, Error, GrowthVector, Leg, PoolState, Slot,
    TokenRef, TradeKind, TradeReceipt, TradeSpec, WeightPolicy, WeightVector,
};

use crate::args::{CurveArgs, InitArgs, ReplayArgs, TradeArgs};
use crate::sweep::{run_sweep, CurveSweepRequest, SweepMode, VERIFY_REL_TOL};

#[derive(Debug)]
pub enum CliError {
    /// Unusable flags or arguments.
    Usage(String),
    /// Filesystem trouble.
    Io(String),
    /// Engine rejection; the inner kind decides the exit code.
    Engine { error: Error, context: Option<String> },
    /// An invariant audit or oracle cross-check failed.
    Audit(String),
}

impl CliError {
    pub fn engine(error: Error) -> Self {
        CliError::Engine {
            error,
            context: None,
        }
    }

    pub fn engine_at(error: Error, context: String) -> Self {
        CliError::Engine {
            error,
            context: Some(context),
        }
    }

    pub fn io<E: std::fmt::Display>(e: E) -> Self {
        CliError::Io(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Engine { error, .. } => {
                if error.is_infeasible() {
                    2
                } else {
                    1
                }
            }
            CliError::Audit(_) => 3,
        }
    }

    pub fn kind(&self) -> &str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
            CliError::Engine { error, .. } => error.kind(),
            CliError::Audit(_) => "AuditFailure",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Audit(m) => m.clone(),
            CliError::Engine { error, .. } => error.to_string(),
        }
    }

    /// One JSON object for standard error.
    pub fn to_json(&self) -> String {
        let mut obj = serde_json::json!({
            "error": {
                "kind": self.kind(),
                "message": self.message(),
            }
        });
        if let CliError::Engine {
            context: Some(ctx), ..
        } = self
        {
            obj["error"]["context"] = serde_json::Value::String(ctx.clone());
        }
        obj.to_string()
    }
}

pub type CliResult = Result<(), CliError>;

fn load_pool(path: &Path) -> Result<PoolState, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_pool(&text).map_err(CliError::engine)
}

/// Write-temp-then-rename so a crash never leaves a half-written pool.
fn write_atomic(path: &Path, contents: &str) -> CliResult {
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    fs::write(&tmp, contents).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn cmd_init(args: &InitArgs, out: &mut dyn Write) -> CliResult {
    let policy = match args.policy.as_str() {
        "equal" => {
            if args.weights.is_some() {
                return Err(CliError::Usage(
                    "--weights only applies to --policy constant".into(),
                ));
            }
            WeightPolicy::Equal
        }
        "constant" => {
            let weights = args
                .weights
                .clone()
                .ok_or_else(|| CliError::Usage("--policy constant needs --weights".into()))?;
            WeightPolicy::Constant(
                WeightVector::new(weights, ekamm_core::CurveParams::DEFAULT_REL_TOL)
                    .map_err(CliError::engine)?,
            )
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown policy {other:?} (expected \"equal\" or \"constant\")"
            )))
        }
    };
    let pool = pool_init(
        args.tokens.clone(),
        args.amounts.clone(),
        args.prices.clone(),
        args.k,
        policy,
    )
    .map_err(CliError::engine)?;
    write_atomic(&args.pool, &serialize_pool(&pool))?;
    let summary = serde_json::json!({
        "pool": args.pool.display().to_string(),
        "n": pool.n(),
        "k": format_decimal(pool.params().k),
        "pool_token_supply": format_decimal(pool.supply()),
        "step": pool.step(),
    });
    writeln!(out, "{summary}").map_err(CliError::io)
}

fn parse_leg(raw: &str) -> Result<Leg, CliError> {
    let (token, amount) = raw
        .rsplit_once(':')
        .ok_or_else(|| CliError::Usage(format!("leg {raw:?} is not TOKEN:AMOUNT")))?;
    let amount: f64 = amount
        .parse()
        .map_err(|_| CliError::Usage(format!("bad amount in leg {raw:?}")))?;
    Ok(Leg {
        token: TokenRef::from_symbol(token),
        amount,
    })
}

/// Single-leg trades touching the pool token are stakes/unstakes by the
/// leg's sign; a lone asset-to-asset leg is a swap; anything else is a
/// batch. `--kind` overrides.
fn build_trade_spec(args: &TradeArgs) -> Result<TradeSpec, CliError> {
    let legs: Vec<Leg> = args
        .legs
        .iter()
        .map(|raw| parse_leg(raw))
        .collect::<Result<_, _>>()?;
    let unknown = TokenRef::from_symbol(&args.unknown);
    let kind = match &args.kind {
        Some(raw) => TradeKind::parse(raw).map_err(CliError::engine)?,
        None => infer_kind(&legs, &unknown),
    };
    Ok(TradeSpec {
        kind,
        legs,
        unknown,
    })
}

fn infer_kind(legs: &[Leg], unknown: &TokenRef) -> TradeKind {
    let single = legs.len() == 1;
    let touches_pool =
        *unknown == TokenRef::Pool || legs.iter().any(|l| l.token == TokenRef::Pool);
    if single && touches_pool {
        // Positive flow (asset deposit or supply mint) stakes either way.
        if legs[0].amount >= 0.0 {
            TradeKind::StakeSingle
        } else {
            TradeKind::UnstakeSingle
        }
    } else if single {
        TradeKind::Swap
    } else {
        TradeKind::Batch
    }
}

/// Re-derives the curve instance a receipt settled and confirms the
/// solved slot against the bisection oracle.
fn oracle_check_receipt(
    pool: &PoolState,
    receipt: &TradeReceipt,
    unknown: &TokenRef,
) -> CliResult {
    let slot = match unknown {
        TokenRef::Pool => Slot::Pool,
        TokenRef::Asset(sym) => Slot::Asset(
            pool.token_index(sym)
                .ok_or_else(|| CliError::engine(Error::UnknownToken(sym.clone())))?,
        ),
    };
    let solved = match slot {
        Slot::Pool => receipt.growth0,
        Slot::Asset(i) => receipt.growths[i],
    };
    let mut assets: Vec<Option<f64>> = receipt.growths.iter().copied().map(Some).collect();
    let mut pool_growth = Some(receipt.growth0);
    match slot {
        Slot::Pool => pool_growth = None,
        Slot::Asset(i) => assets[i] = None,
    }
    let weights = pool.policy_weights().map_err(CliError::engine)?;
    let spec = CurveSpec::new(
        pool.params().k,
        weights.clone(),
        weights,
        GrowthVector::new(assets, pool_growth).map_err(CliError::engine)?,
    )
    .map_err(CliError::engine)?;
    let oracle = oracle_solve(&spec, pool.params().max_bisect_iter).map_err(|e| {
        CliError::Audit(format!(
            "oracle cannot reproduce the settled growth {solved}: {e}"
        ))
    })?;
    let rel = (solved - oracle).abs() / oracle.abs().max(1e-300);
    if rel > VERIFY_REL_TOL {
        return Err(CliError::Audit(format!(
            "solver/oracle disagree: {solved:e} vs {oracle:e} (rel {rel:e})"
        )));
    }
    Ok(())
}

pub fn cmd_quote(args: &TradeArgs, out: &mut dyn Write) -> CliResult {
    let pool = load_pool(&args.pool)?;
    let spec = build_trade_spec(args)?;
    let receipt = quote(&pool, &spec).map_err(CliError::engine)?;
    if args.verify {
        oracle_check_receipt(&pool, &receipt, &spec.unknown)?;
    }
    writeln!(out, "{}", receipt_to_json_pretty(&receipt, pool.symbols())).map_err(CliError::io)
}

pub fn cmd_apply(args: &TradeArgs, out: &mut dyn Write) -> CliResult {
    let pool = load_pool(&args.pool)?;
    let spec = build_trade_spec(args)?;
    let (next, receipt) = apply(&pool, &spec).map_err(CliError::engine)?;
    if args.verify {
        oracle_check_receipt(&pool, &receipt, &spec.unknown)?;
    }
    write_atomic(&args.pool, &serialize_pool(&next))?;
    writeln!(out, "{}", receipt_to_json_pretty(&receipt, pool.symbols())).map_err(CliError::io)
}

pub fn cmd_replay(args: &ReplayArgs, out: &mut dyn Write) -> CliResult {
    let mut pool = load_pool(&args.pool)?;
    let file = fs::File::open(&args.trades)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.trades.display())))?;
    let entries = read_trade_log(BufReader::new(file)).map_err(CliError::engine)?;

    let mut max_sf: f64 = 0.0;
    let mut max_ztv: f64 = 0.0;
    let mut applied = 0usize;
    for (log_step, spec) in &entries {
        let (next, receipt) = apply(&pool, spec)
            .map_err(|e| CliError::engine_at(e, format!("log step {log_step}")))?;
        if args.verify {
            oracle_check_receipt(&pool, &receipt, &spec.unknown)?;
        }

        let tol = pool.params().rel_tol;
        let sf = receipt.self_financing_residual;
        let ztv = next
            .zero_total_value_residual()
            .map_err(CliError::engine)?;
        let sf_ok = sf.abs() <= tol * pool.alpha0().abs();
        let ztv_ok = ztv.abs() <= tol * next.alpha0().abs();
        let status = if sf_ok && ztv_ok { "ok" } else { "fail" };
        writeln!(
            out,
            "{{\"receipt\":{},\"audit\":{{\"self_financing\":\"{}\",\"zero_total_value\":\"{}\",\"status\":\"{}\"}}}}",
            receipt_to_json(&receipt, pool.symbols()),
            format_decimal(sf),
            format_decimal(ztv),
            status,
        )
        .map_err(CliError::io)?;
        if status != "ok" {
            return Err(CliError::Audit(format!(
                "invariant audit failed at log step {log_step}"
            )));
        }
        max_sf = max_sf.max(sf.abs());
        max_ztv = max_ztv.max(ztv.abs());
        applied += 1;
        pool = next;
    }

    write_atomic(&args.pool, &serialize_pool(&pool))?;
    let summary = serde_json::json!({
        "summary": {
            "trades": applied,
            "final_step": pool.step(),
            "max_self_financing_residual": format_decimal(max_sf),
            "max_zero_total_value_residual": format_decimal(max_ztv),
            "status": "ok",
        }
    });
    writeln!(out, "{summary}").map_err(CliError::io)
}

pub fn cmd_curve(args: &CurveArgs, out: &mut dyn Write) -> CliResult {
    let mode = match args.sweep.as_str() {
        "swap" => SweepMode::SwapCurve,
        "stake" => SweepMode::StakeCurve,
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep {other:?} (expected \"swap\" or \"stake\")"
            )))
        }
    };
    if mode == SweepMode::StakeCurve && args.n.is_none() {
        return Err(CliError::Usage("stake sweeps need --n".into()));
    }
    if mode == SweepMode::SwapCurve && args.n.is_some() {
        return Err(CliError::Usage(
            "--n only applies to stake sweeps (swap curves are n-independent)".into(),
        ));
    }
    let g_range = parse_range(&args.range)?;
    let req = CurveSweepRequest {
        mode,
        k_values: args.k.clone(),
        n: args.n.unwrap_or(2),
        g_range,
    };
    run_sweep(&req, out, args.verify)
}

fn parse_range(raw: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "range {raw:?} is not lo:hi:steps"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad range lo {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad range hi {:?}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad range steps {:?}", parts[2])))?;
    Ok((lo, hi, steps))
}
