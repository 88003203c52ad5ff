//! Trade settlement: swaps, staking, and batch multi-token trades.
//!
//! A trade fixes the signed flow of some tokens and names exactly one leg
//! for the engine to solve. Fixed flows become growth factors, unmentioned
//! tokens get a factor of one, and the curve pins down the unknown. The
//! resulting transition is self-financing by construction:
//!
//! ```text
//! Δα_0 + Σ Δα_i · E_k(P_i) = 0
//! ```
//!
//! which every receipt records as an auditable residual.
//!
//! Pool-token leg amounts are expressed in supply units: positive mints,
//! negative burns. Asset leg amounts are token units: positive into the
//! pool, negative out.

use crate::curve::{solve_unknown_growth, ek_average, CurveSpec, GrowthVector, Slot, GROWTH_FLOOR};
use crate::error::{Error, Result};
use crate::model::{PoolState, TradeReceipt, POOL_TOKEN};
use crate::weights::implied_price;

/// Settlement flavor; mostly validation sugar over the same curve solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TradeKind {
    /// Exchange between two assets; pool supply untouched (`g_0 = 1`).
    Swap,
    /// Deposit one asset against minted pool tokens.
    StakeSingle,
    /// Deposit all assets in proportion; pool grows by the same factor.
    StakeProportional,
    /// Withdraw one asset against burned pool tokens.
    UnstakeSingle,
    /// Withdraw all assets in proportion.
    UnstakeProportional,
    /// Arbitrary fixed legs over any tokens, one unknown, one solve.
    Batch,
}

impl TradeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TradeKind::Swap => "swap",
            TradeKind::StakeSingle => "stake_single",
            TradeKind::StakeProportional => "stake_proportional",
            TradeKind::UnstakeSingle => "unstake_single",
            TradeKind::UnstakeProportional => "unstake_proportional",
            TradeKind::Batch => "batch",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "swap" => TradeKind::Swap,
            "stake_single" => TradeKind::StakeSingle,
            "stake_proportional" => TradeKind::StakeProportional,
            "unstake_single" => TradeKind::UnstakeSingle,
            "unstake_proportional" => TradeKind::UnstakeProportional,
            "batch" => TradeKind::Batch,
            other => return Err(Error::InvalidTrade(format!("unknown trade kind {other}"))),
        })
    }
}

/// A token position in a trade: an asset by symbol, or the pool token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenRef {
    Pool,
    Asset(String),
}

impl TokenRef {
    pub fn from_symbol(s: &str) -> Self {
        if s == POOL_TOKEN {
            TokenRef::Pool
        } else {
            TokenRef::Asset(s.to_string())
        }
    }

    pub fn symbol(&self) -> &str {
        match self {
            TokenRef::Pool => POOL_TOKEN,
            TokenRef::Asset(s) => s,
        }
    }
}

/// One fixed flow of a trade.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub token: TokenRef,
    pub amount: f64,
}

impl Leg {
    pub fn asset(symbol: &str, amount: f64) -> Self {
        Self {
            token: TokenRef::Asset(symbol.to_string()),
            amount,
        }
    }

    pub fn pool(amount: f64) -> Self {
        Self {
            token: TokenRef::Pool,
            amount,
        }
    }
}

/// A trade request: fixed legs plus the single leg to solve for.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeSpec {
    pub kind: TradeKind,
    pub legs: Vec<Leg>,
    pub unknown: TokenRef,
}

impl TradeSpec {
    /// Swap `amount_in` of `token_in` for a solved amount of `token_out`.
    pub fn swap_in(token_in: &str, amount_in: f64, token_out: &str) -> Self {
        Self {
            kind: TradeKind::Swap,
            legs: vec![Leg::asset(token_in, amount_in)],
            unknown: TokenRef::Asset(token_out.to_string()),
        }
    }

    /// Swap a solved amount of `token_in` for exactly `amount_out` of
    /// `token_out`.
    pub fn swap_out(token_in: &str, token_out: &str, amount_out: f64) -> Self {
        Self {
            kind: TradeKind::Swap,
            legs: vec![Leg::asset(token_out, -amount_out)],
            unknown: TokenRef::Asset(token_in.to_string()),
        }
    }

    /// Stake `amount` of one asset for solved pool tokens.
    pub fn stake_single(token: &str, amount: f64) -> Self {
        Self {
            kind: TradeKind::StakeSingle,
            legs: vec![Leg::asset(token, amount)],
            unknown: TokenRef::Pool,
        }
    }

    /// Withdraw `amount` of one asset against solved burned pool tokens.
    pub fn unstake_single(token: &str, amount: f64) -> Self {
        Self {
            kind: TradeKind::UnstakeSingle,
            legs: vec![Leg::asset(token, -amount)],
            unknown: TokenRef::Pool,
        }
    }

    /// Stake every asset in proportion; the listed legs pin the factor.
    pub fn stake_proportional(legs: Vec<Leg>) -> Self {
        Self {
            kind: TradeKind::StakeProportional,
            legs,
            unknown: TokenRef::Pool,
        }
    }

    /// Withdraw every asset in proportion.
    pub fn unstake_proportional(legs: Vec<Leg>) -> Self {
        Self {
            kind: TradeKind::UnstakeProportional,
            legs,
            unknown: TokenRef::Pool,
        }
    }

    pub fn batch(legs: Vec<Leg>, unknown: TokenRef) -> Self {
        Self {
            kind: TradeKind::Batch,
            legs,
            unknown,
        }
    }
}

/// Fixed legs mapped onto growth slots.
struct ResolvedLegs {
    /// Per-asset fixed growth; `None` where nothing was fixed.
    asset_growth: Vec<Option<f64>>,
    /// Fixed pool-token growth, if any.
    pool_growth: Option<f64>,
    unknown_slot: Slot,
}

fn leg_slot(pool: &PoolState, token: &TokenRef) -> Result<Slot> {
    match token {
        TokenRef::Pool => Ok(Slot::Pool),
        TokenRef::Asset(sym) => pool
            .token_index(sym)
            .map(Slot::Asset)
            .ok_or_else(|| Error::UnknownToken(sym.clone())),
    }
}

fn asset_growth(pool: &PoolState, idx: usize, amount: f64) -> Result<f64> {
    let balance = pool.alpha()[idx];
    let g = (balance + amount) / balance;
    if !g.is_finite() || g < GROWTH_FLOOR {
        return Err(Error::InsufficientBalance(format!(
            "flow {amount} of {} against balance {balance}",
            pool.symbols()[idx]
        )));
    }
    Ok(g)
}

fn pool_growth(pool: &PoolState, amount: f64) -> Result<f64> {
    let supply = pool.supply();
    let g = (supply + amount) / supply;
    if !g.is_finite() || g < GROWTH_FLOOR {
        return Err(Error::InsufficientBalance(format!(
            "pool-token flow {amount} against supply {supply}"
        )));
    }
    Ok(g)
}

fn resolve_legs(pool: &PoolState, spec: &TradeSpec) -> Result<ResolvedLegs> {
    let n = pool.n();
    let unknown_slot = leg_slot(pool, &spec.unknown)?;

    let mut asset_growth_slots: Vec<Option<f64>> = vec![None; n];
    let mut pool_growth_slot: Option<f64> = None;
    for leg in &spec.legs {
        if !leg.amount.is_finite() {
            return Err(Error::InvalidTrade(format!(
                "leg amount {} for {}",
                leg.amount,
                leg.token.symbol()
            )));
        }
        let slot = leg_slot(pool, &leg.token)?;
        if slot == unknown_slot {
            return Err(Error::InvalidTrade(format!(
                "{} is both fixed and unknown",
                leg.token.symbol()
            )));
        }
        match slot {
            Slot::Pool => {
                if pool_growth_slot.is_some() {
                    return Err(Error::InvalidTrade("duplicate pool-token leg".into()));
                }
                pool_growth_slot = Some(pool_growth(pool, leg.amount)?);
            }
            Slot::Asset(i) => {
                if asset_growth_slots[i].is_some() {
                    return Err(Error::InvalidTrade(format!(
                        "duplicate leg for {}",
                        pool.symbols()[i]
                    )));
                }
                asset_growth_slots[i] = Some(asset_growth(pool, i, leg.amount)?);
            }
        }
    }

    Ok(ResolvedLegs {
        asset_growth: asset_growth_slots,
        pool_growth: pool_growth_slot,
        unknown_slot,
    })
}

fn validate_kind(spec: &TradeSpec, resolved: &ResolvedLegs) -> Result<()> {
    let kind = spec.kind;
    let has_pool_leg = resolved.pool_growth.is_some();
    match kind {
        TradeKind::Swap => {
            if resolved.unknown_slot == Slot::Pool {
                return Err(Error::InvalidTrade("swap cannot solve the pool token".into()));
            }
            if has_pool_leg {
                return Err(Error::InvalidTrade("swap cannot fix a pool-token leg".into()));
            }
            if spec.legs.len() != 1 {
                return Err(Error::InvalidTrade(format!(
                    "swap takes exactly one fixed leg, got {}",
                    spec.legs.len()
                )));
            }
        }
        TradeKind::StakeSingle | TradeKind::UnstakeSingle => {
            if spec.legs.len() != 1 {
                return Err(Error::InvalidTrade(format!(
                    "{} takes exactly one fixed leg, got {}",
                    kind.as_str(),
                    spec.legs.len()
                )));
            }
            let fixes_pool = has_pool_leg;
            let solves_pool = resolved.unknown_slot == Slot::Pool;
            if fixes_pool == solves_pool {
                return Err(Error::InvalidTrade(format!(
                    "{} must involve the pool token on exactly one side",
                    kind.as_str()
                )));
            }
            let amount = spec.legs[0].amount;
            let staking = kind == TradeKind::StakeSingle;
            if staking && amount < 0.0 {
                return Err(Error::InvalidTrade(format!(
                    "stake leg amount {amount} must be non-negative"
                )));
            }
            if !staking && amount > 0.0 {
                return Err(Error::InvalidTrade(format!(
                    "unstake leg amount {amount} must be non-positive"
                )));
            }
        }
        TradeKind::StakeProportional | TradeKind::UnstakeProportional => {
            if resolved.unknown_slot != Slot::Pool {
                return Err(Error::InvalidTrade(format!(
                    "{} solves the pool token",
                    kind.as_str()
                )));
            }
            if spec.legs.is_empty() {
                return Err(Error::InvalidTrade(format!(
                    "{} needs at least one asset leg",
                    kind.as_str()
                )));
            }
            if has_pool_leg {
                return Err(Error::InvalidTrade(format!(
                    "{} cannot fix a pool-token leg",
                    kind.as_str()
                )));
            }
            let staking = kind == TradeKind::StakeProportional;
            for leg in &spec.legs {
                if staking && leg.amount < 0.0 {
                    return Err(Error::InvalidTrade(format!(
                        "stake leg amount {} must be non-negative",
                        leg.amount
                    )));
                }
                if !staking && leg.amount > 0.0 {
                    return Err(Error::InvalidTrade(format!(
                        "unstake leg amount {} must be non-positive",
                        leg.amount
                    )));
                }
            }
        }
        TradeKind::Batch => {}
    }
    Ok(())
}

/// Builds the growth vector a trade settles on. Proportional kinds
/// collapse directly (`g_0 = g`); everything else leaves one unknown.
fn build_growths(pool: &PoolState, spec: &TradeSpec, resolved: &ResolvedLegs) -> Result<GrowthVector> {
    let n = pool.n();
    let proportional = matches!(
        spec.kind,
        TradeKind::StakeProportional | TradeKind::UnstakeProportional
    );

    if proportional {
        // All asset factors share the common value pinned by the legs;
        // the curve then collapses to g_0 = g with no solve needed.
        let rel_tol = pool.params().rel_tol;
        let mut common: Option<f64> = None;
        for g in resolved.asset_growth.iter().flatten() {
            match common {
                None => common = Some(*g),
                Some(c) => {
                    if (g - c).abs() > rel_tol * c.abs().max(1.0) {
                        return Err(Error::InvalidTrade(format!(
                            "proportional legs imply growths {c} and {g}"
                        )));
                    }
                }
            }
        }
        let g = common.ok_or_else(|| {
            Error::InvalidTrade("proportional trade pinned no growth".into())
        })?;
        return GrowthVector::known(vec![g; n], g);
    }

    let mut assets: Vec<Option<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        if resolved.unknown_slot == Slot::Asset(i) {
            assets.push(None);
        } else {
            assets.push(Some(resolved.asset_growth[i].unwrap_or(1.0)));
        }
    }
    let pool_slot = if resolved.unknown_slot == Slot::Pool {
        None
    } else {
        Some(resolved.pool_growth.unwrap_or(1.0))
    };
    GrowthVector::new(assets, pool_slot)
}

fn map_solver_error(err: Error, k: f64) -> Error {
    match err {
        Error::NoPositiveRoot(msg) if k == 1.0 => Error::KRestriction(msg),
        Error::NoPositiveRoot(msg) => Error::InfeasibleTrade(msg),
        other => other,
    }
}

/// Prices a trade without touching the pool. The receipt records flows,
/// growth factors, prices on both sides, and the self-financing residual.
pub fn quote(pool: &PoolState, spec: &TradeSpec) -> Result<TradeReceipt> {
    let resolved = resolve_legs(pool, spec)?;
    validate_kind(spec, &resolved)?;
    let growths = build_growths(pool, spec, &resolved)?;

    let params = pool.params();
    let solved = if growths.is_fully_known() {
        growths
    } else {
        let weights = pool.policy_weights()?;
        let curve = CurveSpec::new(params.k, weights.clone(), weights, growths.clone())?;
        let value = solve_unknown_growth(&curve, params.rel_tol)
            .map_err(|e| map_solver_error(e, params.k))?;
        growths.with_value(resolved.unknown_slot, value)?
    };
    receipt_for(pool, &solved)
}

/// Builds the receipt of settling `solved` growths against `pool`.
fn receipt_for(pool: &PoolState, solved: &GrowthVector) -> Result<TradeReceipt> {
    let n = pool.n();
    let k = pool.params().k;
    let weights = pool.policy_weights()?;
    let growths = solved.known_assets()?;
    let growth0 = solved
        .pool()
        .ok_or_else(|| Error::InvalidTrade("pool growth factor unsolved".into()))?;

    let alpha = pool.alpha();
    let alpha0 = pool.alpha0();
    let deltas: Vec<f64> = (0..n).map(|i| alpha[i] * (growths[i] - 1.0)).collect();
    let delta0 = alpha0 * (growth0 - 1.0);

    let mut prices_prev = Vec::with_capacity(n);
    let mut prices_new = Vec::with_capacity(n);
    for i in 0..n {
        prices_prev.push(implied_price(weights.get(i), alpha0, alpha[i])?);
        prices_new.push(implied_price(
            weights.get(i),
            growth0 * alpha0,
            growths[i] * alpha[i],
        )?);
    }

    let mut residual = delta0;
    for i in 0..n {
        residual += deltas[i] * ek_average(prices_new[i], prices_prev[i], k)?;
    }
    if residual.abs() > pool.params().rel_tol * alpha0.abs() {
        return Err(Error::InvariantViolation(format!(
            "self-financing residual {residual:e} exceeds tolerance"
        )));
    }

    Ok(TradeReceipt {
        step: pool.step() + 1,
        deltas,
        delta0,
        growths,
        growth0,
        prices_prev,
        prices_new,
        self_financing_residual: residual,
    })
}

/// Settles a trade: returns the successor state and the receipt. The input
/// state is untouched; token counts scale by the solved factors.
pub fn apply(pool: &PoolState, spec: &TradeSpec) -> Result<(PoolState, TradeReceipt)> {
    let receipt = quote(pool, spec)?;
    let alpha_new: Vec<f64> = pool
        .alpha()
        .iter()
        .zip(&receipt.growths)
        .map(|(a, g)| a * g)
        .collect();
    let alpha0_new = pool.alpha0() * receipt.growth0;
    let state = PoolState::new(
        pool.symbols().to_vec(),
        alpha_new,
        alpha0_new,
        pool.params().clone(),
        pool.policy().clone(),
        pool.step() + 1,
    )?;
    Ok((state, receipt))
}

/// Settles an arbitrary set of fixed legs plus one unknown atomically with
/// a single curve solve.
pub fn batch_settle(
    pool: &PoolState,
    legs: Vec<Leg>,
    unknown: TokenRef,
) -> Result<(PoolState, TradeReceipt)> {
    apply(pool, &TradeSpec::batch(legs, unknown))
}

/// Self-financing residual of a transition, computed from the two states
/// and the supplied price vectors:
///
/// ```text
/// Δα_0 + Σ Δα_i · E_k(P_i)
/// ```
///
/// Zero (within `rel_tol·|α_0|`) for every transition this crate produces.
pub fn verify_self_financing(
    prev: &PoolState,
    next: &PoolState,
    prices_prev: &[f64],
    prices_new: &[f64],
    k: f64,
) -> Result<f64> {
    let n = prev.n();
    if next.n() != n || prev.symbols() != next.symbols() {
        return Err(Error::ShapeMismatch(
            "states have different token sets".into(),
        ));
    }
    if prices_prev.len() != n || prices_new.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{}/{} prices vs {n} assets",
            prices_prev.len(),
            prices_new.len()
        )));
    }
    let mut residual = next.alpha0() - prev.alpha0();
    for i in 0..n {
        let delta = next.alpha()[i] - prev.alpha()[i];
        residual += delta * ek_average(prices_new[i], prices_prev[i], k)?;
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::pool_init;
    use crate::weights::WeightPolicy;

    fn equal_pool(n: usize, k: f64, balance: f64) -> PoolState {
        let symbols: Vec<String> = (0..n).map(|i| format!("T{i}")).collect();
        pool_init(
            symbols,
            vec![balance; n],
            vec![1.0; n],
            k,
            WeightPolicy::Equal,
        )
        .unwrap()
    }

    fn pool_ab(k: f64) -> PoolState {
        pool_init(
            vec!["A".into(), "B".into()],
            vec![100.0, 100.0],
            vec![1.0, 1.0],
            k,
            WeightPolicy::Equal,
        )
        .unwrap()
    }

    #[test]
    fn swap_quote_constant_product() {
        let pool = pool_ab(0.5);
        let receipt = quote(&pool, &TradeSpec::swap_in("A", 100.0, "B")).unwrap();
        assert_eq!(receipt.growths, vec![2.0, 0.5]);
        assert_eq!(receipt.growth0, 1.0);
        assert_eq!(receipt.deltas[0], 100.0);
        assert_eq!(receipt.deltas[1], -50.0);
        assert_eq!(receipt.delta0, 0.0);
        assert!(receipt.self_financing_residual.abs() <= 1e-12 * 200.0);
    }

    #[test]
    fn swap_quote_is_pure() {
        let pool = pool_ab(0.5);
        let before = pool.clone();
        let _ = quote(&pool, &TradeSpec::swap_in("A", 100.0, "B")).unwrap();
        assert_eq!(pool, before);
    }

    #[test]
    fn swap_exact_out_at_k1_hits_half_pool_restriction() {
        let pool = pool_ab(1.0);
        let err = quote(&pool, &TradeSpec::swap_out("A", "B", 50.0)).unwrap_err();
        assert!(matches!(err, Error::KRestriction(_)), "{err:?}");

        let receipt = quote(&pool, &TradeSpec::swap_out("A", "B", 49.999)).unwrap();
        assert!(receipt.deltas[0] > 0.0);
        assert_eq!(receipt.deltas[1], -49.999);
    }

    #[test]
    fn single_stake_mints_curve_amount() {
        let pool = equal_pool(10, 0.5, 100.0);
        assert_eq!(pool.supply(), 1000.0);
        let receipt = quote(&pool, &TradeSpec::stake_single("T0", 100.0)).unwrap();
        let expected_g0 = 10.5 / 9.75;
        assert!((receipt.growth0 - expected_g0).abs() <= 1e-14);
        let minted = receipt.minted();
        assert!((minted - 1000.0 * (expected_g0 - 1.0)).abs() <= 1e-9);
        assert!((minted - 76.92307692307692).abs() <= 1e-9);
    }

    #[test]
    fn single_stake_with_fixed_mint_solves_deposit() {
        let pool = equal_pool(2, 0.5, 100.0);
        // Ask for exactly 10 pool tokens; solve the required T0 deposit.
        let spec = TradeSpec {
            kind: TradeKind::StakeSingle,
            legs: vec![Leg::pool(10.0)],
            unknown: TokenRef::Asset("T0".into()),
        };
        let receipt = quote(&pool, &spec).unwrap();
        assert!((receipt.minted() - 10.0).abs() <= 1e-9);
        assert!(receipt.deltas[0] > 10.0, "one-sided deposit pays impact");
        assert_eq!(receipt.deltas[1], 0.0);
    }

    #[test]
    fn proportional_stake_collapses() {
        let pool = equal_pool(3, 0.7, 50.0);
        let legs = vec![Leg::asset("T0", 10.0)];
        let (next, receipt) = apply(&pool, &TradeSpec::stake_proportional(legs)).unwrap();
        let g = (50.0 + 10.0) / 50.0;
        assert_eq!(receipt.growth0, g);
        assert_eq!(receipt.growths, vec![g; 3]);
        for (a_new, a_old) in next.alpha().iter().zip(pool.alpha()) {
            assert_eq!(*a_new, a_old * g);
        }
        assert_eq!(next.supply(), pool.supply() * g);
    }

    #[test]
    fn proportional_unstake_then_stake_restores_state() {
        let pool = equal_pool(2, 0.3, 80.0);
        let (down, _) =
            apply(&pool, &TradeSpec::unstake_proportional(vec![Leg::asset("T0", -20.0)]))
                .unwrap();
        // Scaling by 1/0.75 undoes the 0.75 step: deposit 60·(4/3 − 1) = 20.
        let back = down.alpha()[0] * (1.0 / 0.75 - 1.0);
        let (up, _) = apply(
            &down,
            &TradeSpec::stake_proportional(vec![Leg::asset("T0", back)]),
        )
        .unwrap();
        for (a, b) in up.alpha().iter().zip(pool.alpha()) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
        assert!((up.supply() - pool.supply()).abs() <= 1e-12 * pool.supply());
    }

    #[test]
    fn proportional_legs_must_agree() {
        let pool = equal_pool(2, 0.5, 100.0);
        let spec = TradeSpec::stake_proportional(vec![
            Leg::asset("T0", 10.0),
            Leg::asset("T1", 20.0),
        ]);
        assert!(matches!(
            quote(&pool, &spec),
            Err(Error::InvalidTrade(_))
        ));
    }

    #[test]
    fn identity_batch_leaves_state_unchanged() {
        let pool = pool_ab(0.5);
        let spec = TradeSpec::batch(vec![Leg::asset("A", 0.0)], TokenRef::Asset("B".into()));
        let (next, receipt) = apply(&pool, &spec).unwrap();
        assert_eq!(receipt.deltas, vec![0.0, 0.0]);
        assert_eq!(receipt.delta0, 0.0);
        assert_eq!(receipt.self_financing_residual, 0.0);
        assert_eq!(next.alpha(), pool.alpha());
        assert_eq!(next.alpha0(), pool.alpha0());
        assert_eq!(next.step(), 1);
    }

    #[test]
    fn swap_apply_preserves_constant_product() {
        let pool = pool_ab(0.5);
        let (next, receipt) = apply(&pool, &TradeSpec::swap_in("A", 100.0, "B")).unwrap();
        assert_eq!(next.alpha(), &[200.0, 50.0]);
        assert_eq!(next.supply(), 200.0);
        assert_eq!(next.step(), 1);
        let product = next.alpha()[0] * next.alpha()[1];
        assert!((product - 10_000.0).abs() <= 1e-9);
        // Applying quotes exactly what quote promised.
        let quoted = quote(&pool, &TradeSpec::swap_in("A", 100.0, "B")).unwrap();
        assert_eq!(quoted, receipt);
    }

    #[test]
    fn batch_matches_pairwise_swap() {
        let pool = equal_pool(4, 0.35, 120.0);
        let swap = quote(&pool, &TradeSpec::swap_in("T0", 30.0, "T2")).unwrap();
        let batch = quote(
            &pool,
            &TradeSpec::batch(vec![Leg::asset("T0", 30.0)], TokenRef::Asset("T2".into())),
        )
        .unwrap();
        assert_eq!(swap.growths, batch.growths);
        assert_eq!(swap.growth0, batch.growth0);
    }

    #[test]
    fn batch_multiswap_balances_reciprocal_sums() {
        // k=1/2 with g0=1: Σ g_i must equal Σ 1/g_i over all assets.
        let pool = equal_pool(5, 0.5, 100.0);
        let legs = vec![Leg::asset("T0", 100.0), Leg::asset("T1", -20.0)];
        let (_, receipt) = batch_settle(&pool, legs, TokenRef::Asset("T4".into())).unwrap();
        assert_eq!(receipt.growths[0], 2.0);
        assert_eq!(receipt.growths[1], 0.8);
        assert_eq!(receipt.growths[2], 1.0);
        let sum: f64 = receipt.growths.iter().sum();
        let inv_sum: f64 = receipt.growths.iter().map(|g| 1.0 / g).sum();
        assert!((sum - inv_sum).abs() <= 1e-10, "{sum} vs {inv_sum}");
    }

    #[test]
    fn batch_all_fixed_solves_pool_growth_of_one() {
        let pool = equal_pool(3, 0.5, 100.0);
        let legs = vec![
            Leg::asset("T0", 0.0),
            Leg::asset("T1", 0.0),
            Leg::asset("T2", 0.0),
        ];
        let (_, receipt) = batch_settle(&pool, legs, TokenRef::Pool).unwrap();
        assert_eq!(receipt.growth0, 1.0);
    }

    #[test]
    fn insufficient_balance_detected_before_solving() {
        let pool = pool_ab(0.5);
        let err = quote(&pool, &TradeSpec::swap_out("A", "B", 100.0)).unwrap_err();
        assert!(matches!(err, Error::InsufficientBalance(_)));
        let err = quote(&pool, &TradeSpec::swap_out("A", "B", 150.0)).unwrap_err();
        assert!(matches!(err, Error::InsufficientBalance(_)));
    }

    #[test]
    fn unknown_token_rejected() {
        let pool = pool_ab(0.5);
        assert!(matches!(
            quote(&pool, &TradeSpec::swap_in("A", 10.0, "Z")),
            Err(Error::UnknownToken(_))
        ));
        assert!(matches!(
            quote(&pool, &TradeSpec::swap_in("Z", 10.0, "B")),
            Err(Error::UnknownToken(_))
        ));
    }

    #[test]
    fn malformed_specs_rejected() {
        let pool = pool_ab(0.5);
        // Same token fixed and unknown.
        assert!(matches!(
            quote(&pool, &TradeSpec::swap_in("A", 10.0, "A")),
            Err(Error::InvalidTrade(_))
        ));
        // Duplicate legs.
        let spec = TradeSpec::batch(
            vec![Leg::asset("A", 1.0), Leg::asset("A", 2.0)],
            TokenRef::Asset("B".into()),
        );
        assert!(matches!(quote(&pool, &spec), Err(Error::InvalidTrade(_))));
        // Swap touching the pool token.
        let spec = TradeSpec {
            kind: TradeKind::Swap,
            legs: vec![Leg::pool(1.0)],
            unknown: TokenRef::Asset("B".into()),
        };
        assert!(matches!(quote(&pool, &spec), Err(Error::InvalidTrade(_))));
        // Stake with a negative amount.
        assert!(matches!(
            quote(&pool, &TradeSpec::stake_single("A", -5.0)),
            Err(Error::InvalidTrade(_))
        ));
    }

    #[test]
    fn verify_self_financing_identity_and_swap() {
        let pool = pool_ab(0.5);
        let spec = TradeSpec::batch(vec![Leg::asset("A", 0.0)], TokenRef::Asset("B".into()));
        let (next, receipt) = apply(&pool, &spec).unwrap();
        let r = verify_self_financing(
            &pool,
            &next,
            &receipt.prices_prev,
            &receipt.prices_new,
            0.5,
        )
        .unwrap();
        assert_eq!(r, 0.0);

        let (next, receipt) = apply(&pool, &TradeSpec::swap_in("A", 100.0, "B")).unwrap();
        let r = verify_self_financing(
            &pool,
            &next,
            &receipt.prices_prev,
            &receipt.prices_new,
            0.5,
        )
        .unwrap();
        assert!(r.abs() <= 1e-12 * 200.0, "r={r:e}");
    }

    #[test]
    fn verify_self_financing_detects_corruption() {
        let pool = pool_ab(0.5);
        let (next, receipt) = apply(&pool, &TradeSpec::swap_in("A", 100.0, "B")).unwrap();
        let corrupted = PoolState::new(
            next.symbols().to_vec(),
            next.alpha().to_vec(),
            next.alpha0() + 1.0,
            next.params().clone(),
            next.policy().clone(),
            next.step(),
        )
        .unwrap();
        let r = verify_self_financing(
            &pool,
            &corrupted,
            &receipt.prices_prev,
            &receipt.prices_new,
            0.5,
        )
        .unwrap();
        assert!((r - 1.0).abs() <= 1e-9, "r={r}");
    }

    #[test]
    fn verify_self_financing_shape_checks() {
        let pool2 = pool_ab(0.5);
        let pool3 = equal_pool(3, 0.5, 100.0);
        assert!(matches!(
            verify_self_financing(&pool2, &pool3, &[1.0, 1.0], &[1.0, 1.0], 0.5),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            verify_self_financing(&pool2, &pool2, &[1.0], &[1.0, 1.0], 0.5),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn round_trip_swap_is_lossless() {
        let pool = pool_ab(0.5);
        let (mid, first) = apply(&pool, &TradeSpec::swap_in("A", 40.0, "B")).unwrap();
        let received = -first.deltas[1];
        let (end, second) = apply(&mid, &TradeSpec::swap_in("B", received, "A")).unwrap();
        let returned = -second.deltas[0];
        assert!((returned - 40.0).abs() <= 1e-9 * 40.0, "returned={returned}");
        assert!((end.alpha()[0] - 100.0).abs() <= 1e-9 * 100.0);
        assert!((end.alpha()[1] - 100.0).abs() <= 1e-9 * 100.0);
    }
}
