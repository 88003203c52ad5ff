//! Pool state, curve parameters, and trade receipts.
//!
//! A pool holds `n` asset tokens with counts `α_i > 0` plus a pool token
//! with count `α_0 < 0`: the pool token is a liability and the numeraire
//! in which every asset is priced. The defining identity is that the total
//! pool value is zero,
//!
//! ```text
//! α_0 = −Σ α_i · P_i
//! ```
//!
//! with prices implied by the active weight policy. Amounts are abstract
//! positive reals in double precision; all equality checks are relative
//! tolerances scaled by `|α_0|`.

use crate::error::{Error, Result};
use crate::weights::{implied_price, WeightPolicy, WeightVector};

/// Reserved identifier naming the pool token on CLI and CSV surfaces.
/// Never valid as an asset symbol.
pub const POOL_TOKEN: &str = "POOL_TOKEN";

/// Curve parameter and numeric tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveParams {
    /// Curve family parameter, `0 ≤ k ≤ 1`.
    pub k: f64,
    /// Relative tolerance for residual checks and root acceptance.
    pub rel_tol: f64,
    /// Iteration cap for the bisection oracle.
    pub max_bisect_iter: u32,
}

impl CurveParams {
    pub const DEFAULT_REL_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_BISECT_ITER: u32 = 200;

    pub fn new(k: f64) -> Result<Self> {
        Self::with_tolerances(k, Self::DEFAULT_REL_TOL, Self::DEFAULT_MAX_BISECT_ITER)
    }

    pub fn with_tolerances(k: f64, rel_tol: f64, max_bisect_iter: u32) -> Result<Self> {
        if !k.is_finite() || !(0.0..=1.0).contains(&k) {
            return Err(Error::KOutOfRange(k));
        }
        if !rel_tol.is_finite() || rel_tol <= 0.0 {
            return Err(Error::NonPositiveInput(format!("rel_tol {rel_tol}")));
        }
        if max_bisect_iter == 0 {
            return Err(Error::NonPositiveInput("max_bisect_iter 0".into()));
        }
        Ok(Self {
            k,
            rel_tol,
            max_bisect_iter,
        })
    }
}

/// Immutable pool state at one time step.
///
/// All settlement operations are pure: they take a state and return a new
/// one, never mutating in place.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolState {
    symbols: Vec<String>,
    alpha: Vec<f64>,
    alpha0: f64,
    params: CurveParams,
    policy: WeightPolicy,
    step: u64,
}

impl PoolState {
    /// Builds a state and checks every invariant: positive asset counts,
    /// negative pool-token count, unique symbols, policy arity, and the
    /// zero-total-value identity at the policy weights.
    pub fn new(
        symbols: Vec<String>,
        alpha: Vec<f64>,
        alpha0: f64,
        params: CurveParams,
        policy: WeightPolicy,
        step: u64,
    ) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvariantViolation("pool has no asset tokens".into()));
        }
        if symbols.len() != alpha.len() {
            return Err(Error::LengthMismatch(format!(
                "{} symbols vs {} amounts",
                symbols.len(),
                alpha.len()
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvariantViolation("empty token symbol".into()));
            }
            if s == POOL_TOKEN {
                return Err(Error::InvariantViolation(format!(
                    "{POOL_TOKEN} is reserved and cannot name an asset"
                )));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvariantViolation(format!("duplicate symbol {s}")));
            }
        }
        for (s, &a) in symbols.iter().zip(&alpha) {
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::InvariantViolation(format!(
                    "asset {s} balance {a} must be > 0"
                )));
            }
        }
        if !alpha0.is_finite() || alpha0 >= 0.0 {
            return Err(Error::InvariantViolation(format!(
                "pool-token count {alpha0} must be < 0"
            )));
        }
        let pool = Self {
            symbols,
            alpha,
            alpha0,
            params,
            policy,
            step,
        };
        // Arity check plus zero-total-value closure at the policy weights.
        let residual = pool.zero_total_value_residual()?;
        if residual.abs() > pool.params.rel_tol * pool.alpha0.abs() {
            return Err(Error::InvariantViolation(format!(
                "zero-total-value residual {residual:e} exceeds tolerance"
            )));
        }
        Ok(pool)
    }

    pub fn n(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Pool-token count `α_0` (negative: a liability).
    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// Outstanding pool-token supply as seen by stakers, `−α_0 > 0`.
    pub fn supply(&self) -> f64 {
        -self.alpha0
    }

    pub fn params(&self) -> &CurveParams {
        &self.params
    }

    pub fn policy(&self) -> &WeightPolicy {
        &self.policy
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn token_index(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    /// Weights the active policy prescribes for the next step.
    pub fn policy_weights(&self) -> Result<WeightVector> {
        self.policy.weights_at(self.n(), std::slice::from_ref(self))
    }

    /// Implied prices of all assets at the given weights,
    /// `P_i = −ω_i·α_0/α_i`.
    pub fn implied_prices(&self, weights: &WeightVector) -> Result<Vec<f64>> {
        if weights.len() != self.n() {
            return Err(Error::LengthMismatch(format!(
                "{} weights vs {} assets",
                weights.len(),
                self.n()
            )));
        }
        (0..self.n())
            .map(|i| implied_price(weights.get(i), self.alpha0, self.alpha[i]))
            .collect()
    }

    /// `Σ α_i·P_i + α_0` at the policy weights; zero up to rounding for
    /// every state this crate constructs.
    pub fn zero_total_value_residual(&self) -> Result<f64> {
        let weights = self.policy_weights()?;
        let prices = self.implied_prices(&weights)?;
        let asset_value: f64 = self
            .alpha
            .iter()
            .zip(&prices)
            .map(|(a, p)| a * p)
            .sum();
        Ok(asset_value + self.alpha0)
    }
}

/// Creates a pool from genesis deposits and genesis prices (pool-token
/// numeraire). The pool-token liability is derived from the zero-total-value
/// identity, so the minted supply equals the total deposited value.
///
/// The value weights implied by `amounts·prices` must agree with the chosen
/// policy; otherwise the pool would start off its own rebalancing target.
pub fn pool_init(
    symbols: Vec<String>,
    amounts: Vec<f64>,
    prices: Vec<f64>,
    k: f64,
    policy: WeightPolicy,
) -> Result<PoolState> {
    let params = CurveParams::new(k)?;
    if symbols.len() != amounts.len() || symbols.len() != prices.len() {
        return Err(Error::LengthMismatch(format!(
            "{} symbols, {} amounts, {} prices",
            symbols.len(),
            amounts.len(),
            prices.len()
        )));
    }
    for &a in &amounts {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::NonPositiveInput(format!("amount {a}")));
        }
    }
    for &p in &prices {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::NonPositiveInput(format!("price {p}")));
        }
    }
    let n = symbols.len();
    let total_value: f64 = amounts.iter().zip(&prices).map(|(a, p)| a * p).sum();
    let policy_weights = policy.weights_at(n, &[])?;
    for i in 0..n {
        let implied = amounts[i] * prices[i] / total_value;
        let target = policy_weights.get(i);
        if (implied - target).abs() > params.rel_tol {
            return Err(Error::PolicyViolation(format!(
                "genesis weight of {} is {implied}, policy requires {target}",
                symbols[i]
            )));
        }
    }
    PoolState::new(symbols, amounts, -total_value, params, policy, 0)
}

/// Value weights of a pool at externally supplied prices:
/// `ω_i = α_i·p_i / Σ_j α_j·p_j`.
pub fn implied_weights(pool: &PoolState, prices: &[f64]) -> Result<WeightVector> {
    if prices.len() != pool.n() {
        return Err(Error::LengthMismatch(format!(
            "{} prices vs {} assets",
            prices.len(),
            pool.n()
        )));
    }
    for &p in prices {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::NonPositiveInput(format!("price {p}")));
        }
    }
    let total: f64 = pool.alpha().iter().zip(prices).map(|(a, p)| a * p).sum();
    let omega: Vec<f64> = pool
        .alpha()
        .iter()
        .zip(prices)
        .map(|(a, p)| a * p / total)
        .collect();
    WeightVector::new(omega, pool.params().rel_tol)
}

/// Full record of one settlement: signed flows, solved growth factors,
/// the implied prices on both sides of the step, and the self-financing
/// residual, all in pool-token numeraire where applicable.
///
/// Receipts carry everything needed to audit the self-financing condition
/// offline: `Δα_0 + Σ Δα_i · E_k(P_i)` must vanish up to `rel_tol·|α_0|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeReceipt {
    /// Step index of the state the trade produces.
    pub step: u64,
    /// Signed asset flows `Δα_i`, in token units, pool order.
    pub deltas: Vec<f64>,
    /// Signed pool-token flow `Δα_0` (negative when supply is minted).
    pub delta0: f64,
    /// Solved growth factors `g_i`, all known.
    pub growths: Vec<f64>,
    /// Solved pool-token growth factor `g_0`.
    pub growth0: f64,
    /// Implied prices before the trade.
    pub prices_prev: Vec<f64>,
    /// Implied prices after the trade.
    pub prices_new: Vec<f64>,
    /// `Δα_0 + Σ Δα_i · E_k(P_i)`, in pool-token units.
    pub self_financing_residual: f64,
}

impl TradeReceipt {
    /// Pool tokens minted by this trade (positive) or burned (negative).
    pub fn minted(&self) -> f64 {
        -self.delta0
    }
}
