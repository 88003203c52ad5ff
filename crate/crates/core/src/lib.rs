//! Pool engine for a one-parameter family of multi-asset AMM liquidity
//! curves.
//!
//! Every pool carries a parameter `k ∈ [0, 1]` selecting a curve from the
//! family. Trades fix all growth factors but one; the curve pins down the
//! last. `k = 1/2` with equal weights is the constant product market maker;
//! `k = 0` and `k = 1` are the arithmetic- and harmonic-mean boundary
//! curves.
//!
//! Modules:
//!
//! * [`model`] — pool state, curve parameters, receipts;
//! * [`weights`] — rebalancing policies and implied prices;
//! * [`curve`] — curve evaluation, residuals, and the closed-form solver;
//! * [`settle`] — swap/stake/batch settlement and self-financing checks;
//! * [`oracle`] — an independent bisection root-finder for verification;
//! * [`doc`] — the pool document and receipt JSON;
//! * [`tradelog`] — the replay CSV format.

pub mod curve;
pub mod doc;
pub mod error;
pub mod model;
pub mod oracle;
pub mod settle;
pub mod tradelog;
pub mod weights;

pub use curve::{
    curve_residual, ek_average, eval_g0, residual_at, solve_unknown_growth, CurveSpec,
    GrowthVector, Slot, GROWTH_FLOOR,
};
pub use error::{Error, Result};
pub use model::{
    implied_weights, pool_init, CurveParams, PoolState, TradeReceipt, POOL_TOKEN,
};
pub use oracle::{auto_bracket, bisect_growth, oracle_solve, BracketingInterval};
pub use settle::{
    apply, batch_settle, quote, verify_self_financing, Leg, TokenRef, TradeKind, TradeSpec,
};
pub use weights::{implied_price, WeightPolicy, WeightVector};
