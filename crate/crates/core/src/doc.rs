//! On-disk pool document and receipt output.
//!
//! The pool document is versioned JSON with every real number carried as a
//! decimal string of 17 significant digits, which round-trips any finite
//! f64 bit-exactly:
//!
//! ```json
//! {
//!   "version": 1,
//!   "k": "5.0000000000000000e-1",
//!   "step": 0,
//!   "tokens": [{"symbol": "A", "amount": "1.0000000000000000e2"}],
//!   "pool_token_supply": "2.0000000000000000e2",
//!   "weight_policy": {"kind": "equal"}
//! }
//! ```
//!
//! Constant policies add `"weights": ["..."]`. Malformed JSON or numbers
//! are `MalformedDocument`; a well-formed document describing an invalid
//! pool (non-positive supply, k outside [0,1], bad weights) is an
//! `InvariantViolation`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CurveParams, PoolState, TradeReceipt};
use crate::weights::{WeightPolicy, WeightVector};

/// Current pool-document version.
pub const POOL_DOC_VERSION: u32 = 1;

/// Formats a real as a decimal string with 17 significant digits.
pub fn format_decimal(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses a decimal string to a finite f64.
pub fn parse_decimal(s: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::MalformedDocument(format!("bad decimal {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::MalformedDocument(format!("non-finite decimal {s:?}")));
    }
    Ok(x)
}

#[derive(Debug, Serialize, Deserialize)]
struct PoolDoc {
    version: u32,
    k: String,
    step: u64,
    tokens: Vec<TokenEntry>,
    pool_token_supply: String,
    weight_policy: PolicyDoc,
}

#[derive(Debug, Serialize, Deserialize)]
struct TokenEntry {
    symbol: String,
    amount: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct PolicyDoc {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<String>>,
}

/// Renders a pool state as its on-disk document (pretty JSON plus a
/// trailing newline).
pub fn serialize_pool(pool: &PoolState) -> String {
    let policy = match pool.policy() {
        WeightPolicy::Equal => PolicyDoc {
            kind: "equal".into(),
            weights: None,
        },
        WeightPolicy::Constant(w) => PolicyDoc {
            kind: "constant".into(),
            weights: Some(w.as_slice().iter().copied().map(format_decimal).collect()),
        },
    };
    let doc = PoolDoc {
        version: POOL_DOC_VERSION,
        k: format_decimal(pool.params().k),
        step: pool.step(),
        tokens: pool
            .symbols()
            .iter()
            .zip(pool.alpha())
            .map(|(s, &a)| TokenEntry {
                symbol: s.clone(),
                amount: format_decimal(a),
            })
            .collect(),
        pool_token_supply: format_decimal(pool.supply()),
        weight_policy: policy,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("pool document serializes");
    text.push('\n');
    text
}

/// Parses a pool document back into a state, enforcing every pool
/// invariant. Tolerances are not part of the document and come back as
/// defaults.
pub fn parse_pool(text: &str) -> Result<PoolState> {
    let doc: PoolDoc = serde_json::from_str(text)
        .map_err(|e| Error::MalformedDocument(e.to_string()))?;
    if doc.version != POOL_DOC_VERSION {
        return Err(Error::MalformedDocument(format!(
            "unsupported version {}",
            doc.version
        )));
    }
    let k = parse_decimal(&doc.k)?;
    let supply = parse_decimal(&doc.pool_token_supply)?;
    let mut symbols = Vec::with_capacity(doc.tokens.len());
    let mut alpha = Vec::with_capacity(doc.tokens.len());
    for entry in &doc.tokens {
        symbols.push(entry.symbol.clone());
        alpha.push(parse_decimal(&entry.amount)?);
    }
    let params = CurveParams::new(k).map_err(invariant)?;
    let policy = match doc.weight_policy.kind.as_str() {
        "equal" => WeightPolicy::Equal,
        "constant" => {
            let weights = doc.weight_policy.weights.as_ref().ok_or_else(|| {
                Error::MalformedDocument("constant policy without weights".into())
            })?;
            let parsed: Vec<f64> = weights
                .iter()
                .map(|w| parse_decimal(w))
                .collect::<Result<_>>()?;
            WeightPolicy::Constant(WeightVector::new(parsed, params.rel_tol).map_err(invariant)?)
        }
        other => {
            return Err(Error::MalformedDocument(format!(
                "unknown policy kind {other:?}"
            )))
        }
    };
    if supply <= 0.0 {
        return Err(Error::InvariantViolation(format!(
            "pool token supply {supply} must be > 0"
        )));
    }
    PoolState::new(symbols, alpha, -supply, params, policy, doc.step).map_err(invariant)
}

/// Construction failures on parsed data are invariant violations of the
/// document, whatever their inner flavor.
fn invariant(e: Error) -> Error {
    match e {
        Error::MalformedDocument(_) | Error::InvariantViolation(_) => e,
        other => Error::InvariantViolation(other.to_string()),
    }
}

#[derive(Debug, Serialize)]
struct ReceiptDoc<'a> {
    step: u64,
    symbols: &'a [String],
    deltas: Vec<String>,
    delta0: String,
    growths: Vec<String>,
    growth0: String,
    prices_prev: Vec<String>,
    prices_new: Vec<String>,
    self_financing_residual: String,
}

fn receipt_doc<'a>(receipt: &TradeReceipt, symbols: &'a [String]) -> ReceiptDoc<'a> {
    let dec = |xs: &[f64]| xs.iter().copied().map(format_decimal).collect();
    ReceiptDoc {
        step: receipt.step,
        symbols,
        deltas: dec(&receipt.deltas),
        delta0: format_decimal(receipt.delta0),
        growths: dec(&receipt.growths),
        growth0: format_decimal(receipt.growth0),
        prices_prev: dec(&receipt.prices_prev),
        prices_new: dec(&receipt.prices_new),
        self_financing_residual: format_decimal(receipt.self_financing_residual),
    }
}

/// Receipt as pretty JSON (for single-trade output).
pub fn receipt_to_json_pretty(receipt: &TradeReceipt, symbols: &[String]) -> String {
    serde_json::to_string_pretty(&receipt_doc(receipt, symbols)).expect("receipt serializes")
}

/// Receipt as one compact JSON line (for replay streams).
pub fn receipt_to_json(receipt: &TradeReceipt, symbols: &[String]) -> String {
    serde_json::to_string(&receipt_doc(receipt, symbols)).expect("receipt serializes")
}
