//! The one-parameter liquidity-curve family and its solver.
//!
//! A settlement step multiplies every token count by a growth factor
//! `g_i = α_i^t / α_i^{t−1}` (index 0 is the pool token). The curve ties
//! the factors together:
//!
//! ```text
//! g_0 · [(1−k) + k·Σ ω_i^t / g_i]  =  k + (1−k)·Σ ω_i^{t−1} · g_i
//! ```
//!
//! `k = 0` makes the pool growth the weighted arithmetic mean of the asset
//! growths, `k = 1` the weighted harmonic mean, and `k = 1/2` with equal
//! weights recovers the constant product market maker. Fixing all factors
//! but one leaves a single unknown the solver finds in closed form: the
//! pool slot is a direct evaluation, an asset slot is the positive root of
//! a quadratic (strictly one exists for `0 < k < 1`), and the `k = 0` /
//! `k = 1` boundaries reduce to linear and harmonic solves that can be
//! infeasible — at `k = 1` no trade may remove half or more of an asset.

use crate::error::{Error, Result};
use crate::weights::WeightVector;

/// Growth factors below this floor are rejected: the curve spikes as any
/// factor approaches zero and the limit is not settleable.
pub const GROWTH_FLOOR: f64 = 1e-12;

/// Identifies one growth-factor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// The pool-token factor `g_0`.
    Pool,
    /// The factor of asset `i` (pool order).
    Asset(usize),
}

/// Per-token growth factors for one settlement step, with at most one
/// unknown slot (the one a solve fills in). Known factors are strictly
/// positive and at least [`GROWTH_FLOOR`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthVector {
    assets: Vec<Option<f64>>,
    pool: Option<f64>,
}

fn check_growth(g: f64) -> Result<f64> {
    if !g.is_finite() || g < GROWTH_FLOOR {
        return Err(Error::NonPositiveGrowth(g));
    }
    Ok(g)
}

impl GrowthVector {
    /// `None` marks the unknown slot; at most one across assets and pool.
    pub fn new(assets: Vec<Option<f64>>, pool: Option<f64>) -> Result<Self> {
        if assets.is_empty() {
            return Err(Error::LengthMismatch("growth vector is empty".into()));
        }
        let unknowns =
            assets.iter().filter(|g| g.is_none()).count() + usize::from(pool.is_none());
        if unknowns > 1 {
            return Err(Error::MultipleUnknowns);
        }
        for g in assets.iter().chain(std::iter::once(&pool)).flatten() {
            check_growth(*g)?;
        }
        Ok(Self { assets, pool })
    }

    /// Fully known vector.
    pub fn known(assets: Vec<f64>, pool: f64) -> Result<Self> {
        Self::new(assets.into_iter().map(Some).collect(), Some(pool))
    }

    /// The no-op step: every factor is one.
    pub fn identity(n: usize) -> Self {
        Self {
            assets: vec![Some(1.0); n],
            pool: Some(1.0),
        }
    }

    pub fn n(&self) -> usize {
        self.assets.len()
    }

    pub fn asset(&self, i: usize) -> Option<f64> {
        self.assets[i]
    }

    pub fn pool(&self) -> Option<f64> {
        self.pool
    }

    /// The unknown slot, if any.
    pub fn unknown(&self) -> Option<Slot> {
        if self.pool.is_none() {
            return Some(Slot::Pool);
        }
        self.assets
            .iter()
            .position(|g| g.is_none())
            .map(Slot::Asset)
    }

    pub fn is_fully_known(&self) -> bool {
        self.unknown().is_none()
    }

    /// Copy with `slot` set to `value`.
    pub fn with_value(&self, slot: Slot, value: f64) -> Result<Self> {
        check_growth(value)?;
        let mut out = self.clone();
        match slot {
            Slot::Pool => out.pool = Some(value),
            Slot::Asset(i) => {
                if i >= out.assets.len() {
                    return Err(Error::LengthMismatch(format!(
                        "asset slot {i} out of range"
                    )));
                }
                out.assets[i] = Some(value);
            }
        }
        Ok(out)
    }

    /// Asset factors as plain values; errors if any is unknown.
    pub fn known_assets(&self) -> Result<Vec<f64>> {
        self.assets
            .iter()
            .map(|g| {
                g.ok_or_else(|| {
                    Error::InvalidTrade("growth vector has an unsolved asset slot".into())
                })
            })
            .collect()
    }
}

/// One fully specified curve instance: the parameter, the weights on both
/// sides of the step, and the growth factors (with at most one unknown).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    k: f64,
    omega_prev: WeightVector,
    omega_new: WeightVector,
    growths: GrowthVector,
}

impl CurveSpec {
    pub fn new(
        k: f64,
        omega_prev: WeightVector,
        omega_new: WeightVector,
        growths: GrowthVector,
    ) -> Result<Self> {
        if !k.is_finite() || !(0.0..=1.0).contains(&k) {
            return Err(Error::KOutOfRange(k));
        }
        if omega_prev.len() != growths.n() || omega_new.len() != growths.n() {
            return Err(Error::LengthMismatch(format!(
                "weights {}/{} vs {} growths",
                omega_prev.len(),
                omega_new.len(),
                growths.n()
            )));
        }
        Ok(Self {
            k,
            omega_prev,
            omega_new,
            growths,
        })
    }

    /// Equal-weight instance, the form used by swaps and stake curves.
    pub fn equal_weights(k: f64, growths: GrowthVector) -> Result<Self> {
        let w = WeightVector::equal(growths.n())?;
        Self::new(k, w.clone(), w, growths)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega_prev(&self) -> &WeightVector {
        &self.omega_prev
    }

    pub fn omega_new(&self) -> &WeightVector {
        &self.omega_new
    }

    pub fn growths(&self) -> &GrowthVector {
        &self.growths
    }

    /// Copy with the unknown slot filled by `value`.
    pub fn resolved(&self, value: f64) -> Result<Self> {
        let slot = self.growths.unknown().ok_or(Error::NoUnknown)?;
        Ok(Self {
            k: self.k,
            omega_prev: self.omega_prev.clone(),
            omega_new: self.omega_new.clone(),
            growths: self.growths.with_value(slot, value)?,
        })
    }
}

/// The k-weighted average across a step: `E_k f = k·f_new + (1−k)·f_prev`.
pub fn ek_average(f_new: f64, f_prev: f64, k: f64) -> Result<f64> {
    if !k.is_finite() || !(0.0..=1.0).contains(&k) {
        return Err(Error::KOutOfRange(k));
    }
    Ok(k * f_new + (1.0 - k) * f_prev)
}

/// Numerator `k + (1−k)·Σ ω_prev·g` and denominator `(1−k) + k·Σ ω_new/g`
/// of the curve, from the asset factors (pool slot ignored).
fn curve_sides(spec: &CurveSpec) -> Result<(f64, f64)> {
    let k = spec.k;
    let n = spec.growths.n();
    let mut sum_prev = 0.0;
    let mut sum_inv = 0.0;
    for i in 0..n {
        let g = spec
            .growths
            .asset(i)
            .ok_or_else(|| Error::InvalidTrade("asset growth factors must all be known".into()))?;
        sum_prev += spec.omega_prev.get(i) * g;
        sum_inv += spec.omega_new.get(i) / g;
    }
    let numerator = k + (1.0 - k) * sum_prev;
    let denominator = (1.0 - k) + k * sum_inv;
    if !numerator.is_finite() || !denominator.is_finite() || denominator <= 0.0 {
        return Err(Error::InvariantViolation(format!(
            "degenerate curve sides {numerator}/{denominator}"
        )));
    }
    Ok((numerator, denominator))
}

/// Magnitude the residual is compared against when accepting a root.
pub fn residual_scale(spec: &CurveSpec) -> Result<f64> {
    let (num, den) = curve_sides(spec)?;
    let g0 = spec.growths.pool().unwrap_or(1.0);
    Ok(1.0_f64.max(num.abs()).max((g0 * den).abs()))
}

/// Pool-token growth implied by fully known asset factors:
///
/// ```text
/// g_0 = [k + (1−k)·Σ ω_prev·g] / [(1−k) + k·Σ ω_new/g]
/// ```
pub fn eval_g0(spec: &CurveSpec) -> Result<f64> {
    let (num, den) = curve_sides(spec)?;
    Ok(num / den)
}

/// Residual of the curve with every factor known, zero exactly on-curve:
///
/// ```text
/// R = g_0·[(1−k) + k·Σ ω_new/g] − k − (1−k)·Σ ω_prev·g
/// ```
///
/// R is affine in `g_0` with strictly positive slope.
pub fn curve_residual(spec: &CurveSpec) -> Result<f64> {
    let g0 = spec
        .growths
        .pool()
        .ok_or_else(|| Error::InvalidTrade("pool growth factor must be known".into()))?;
    let (num, den) = curve_sides(spec)?;
    Ok(g0 * den - num)
}

/// Residual as a function of the unknown slot set to `x`.
pub fn residual_at(spec: &CurveSpec, x: f64) -> Result<f64> {
    curve_residual(&spec.resolved(x)?)
}

/// Solves the curve for its single unknown growth factor.
///
/// * pool slot unknown: direct evaluation (`eval_g0`);
/// * asset slot, `0 < k < 1`: the quadratic `a·g² + b·g + c = 0` with
///   `a = (1−k)·ω_prev_j > 0` and `c = −g_0·k·ω_new_j < 0` has roots of
///   opposite sign; the positive one is returned via the sign-aware
///   quadratic formula (no cancellation);
/// * `k = 0`: linear solve; a non-positive result is infeasible;
/// * `k = 1`: harmonic solve; infeasible when the trade would take half
///   or more of the unknown asset's balance.
///
/// The returned value is validated against the residual at `rel_tol`.
pub fn solve_unknown_growth(spec: &CurveSpec, rel_tol: f64) -> Result<f64> {
    let slot = spec.growths.unknown().ok_or(Error::NoUnknown)?;
    let solution = match slot {
        Slot::Pool => eval_g0(spec)?,
        Slot::Asset(j) => solve_asset_growth(spec, j)?,
    };
    // Accept only roots that actually sit on the curve.
    let resolved = spec.resolved(solution)?;
    let residual = curve_residual(&resolved)?;
    let scale = residual_scale(&resolved)?;
    if residual.abs() > rel_tol * scale {
        return Err(Error::InvariantViolation(format!(
            "solver residual {residual:e} exceeds {rel_tol:e}·{scale:e}"
        )));
    }
    Ok(solution)
}

fn solve_asset_growth(spec: &CurveSpec, j: usize) -> Result<f64> {
    let k = spec.k;
    let g0 = spec
        .growths
        .pool()
        .ok_or(Error::MultipleUnknowns)?;
    let wp = spec.omega_prev.get(j);
    let wn = spec.omega_new.get(j);
    let mut s_prev = 0.0; // Σ_{i≠j} ω_prev·g
    let mut s_inv = 0.0; // Σ_{i≠j} ω_new/g
    for i in 0..spec.growths.n() {
        if i == j {
            continue;
        }
        let g = spec.growths.asset(i).ok_or(Error::MultipleUnknowns)?;
        s_prev += spec.omega_prev.get(i) * g;
        s_inv += spec.omega_new.get(i) / g;
    }

    if k == 0.0 {
        // R = g_0 − s_prev − ω_prev_j·g
        let g = (g0 - s_prev) / wp;
        if !g.is_finite() || g < GROWTH_FLOOR {
            return Err(Error::NoPositiveRoot(format!(
                "linear solve at k=0 gives growth {g}"
            )));
        }
        return Ok(g);
    }
    if k == 1.0 {
        // R = g_0·(s_inv + ω_new_j/g) − 1, so ω_new_j/g = 1/g_0 − s_inv.
        let rhs = 1.0 / g0 - s_inv;
        if rhs <= 0.0 {
            return Err(Error::NoPositiveRoot(format!(
                "harmonic solve at k=1 infeasible (reciprocal budget {rhs})"
            )));
        }
        let g = wn / rhs;
        if !g.is_finite() || g < GROWTH_FLOOR {
            return Err(Error::NoPositiveRoot(format!(
                "harmonic solve at k=1 gives growth {g}"
            )));
        }
        return Ok(g);
    }

    // Multiplying the residual by g turns it into a·g² + b·g + c = 0.
    let a = (1.0 - k) * wp;
    let b = k + (1.0 - k) * s_prev - g0 * ((1.0 - k) + k * s_inv);
    let c = -g0 * k * wn;
    // a > 0 and c < 0, so the discriminant exceeds b² and the roots have
    // opposite signs.
    let disc = b * b - 4.0 * a * c;
    if !disc.is_finite() || disc <= 0.0 {
        return Err(Error::NoPositiveRoot(format!(
            "quadratic discriminant {disc} not positive"
        )));
    }
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    let (r1, r2) = (q / a, c / q);
    let root = if r1 > 0.0 { r1 } else { r2 };
    if !root.is_finite() || root < GROWTH_FLOOR {
        return Err(Error::NoPositiveRoot(format!(
            "quadratic roots {r1} / {r2} have no usable positive root"
        )));
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equal_spec(k: f64, assets: Vec<Option<f64>>, pool: Option<f64>) -> CurveSpec {
        CurveSpec::equal_weights(k, GrowthVector::new(assets, pool).unwrap()).unwrap()
    }

    #[test]
    fn ek_average_selects_endpoints() {
        assert_eq!(ek_average(4.0, 2.0, 0.0).unwrap(), 2.0);
        assert_eq!(ek_average(4.0, 2.0, 1.0).unwrap(), 4.0);
        assert_eq!(ek_average(4.0, 2.0, 0.5).unwrap(), 3.0);
        assert!(matches!(
            ek_average(4.0, 2.0, 1.5),
            Err(Error::KOutOfRange(_))
        ));
    }

    #[test]
    fn growth_vector_rejects_two_unknowns() {
        assert!(matches!(
            GrowthVector::new(vec![None, Some(1.0)], None),
            Err(Error::MultipleUnknowns)
        ));
        assert!(matches!(
            GrowthVector::new(vec![None, None], Some(1.0)),
            Err(Error::MultipleUnknowns)
        ));
    }

    #[test]
    fn growth_vector_rejects_non_positive() {
        assert!(matches!(
            GrowthVector::new(vec![Some(0.0), Some(1.0)], Some(1.0)),
            Err(Error::NonPositiveGrowth(_))
        ));
        assert!(matches!(
            GrowthVector::new(vec![Some(1e-13), Some(1.0)], Some(1.0)),
            Err(Error::NonPositiveGrowth(_))
        ));
        assert!(matches!(
            GrowthVector::new(vec![Some(f64::NAN), Some(1.0)], Some(1.0)),
            Err(Error::NonPositiveGrowth(_))
        ));
    }

    #[test]
    fn identity_trade_has_unit_pool_growth() {
        for k in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for n in [1, 2, 3, 7] {
                let spec = equal_spec(k, vec![Some(1.0); n], None);
                assert_eq!(eval_g0(&spec).unwrap(), 1.0, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn eval_g0_is_arithmetic_mean_at_k0() {
        let spec = equal_spec(0.0, vec![Some(0.5), Some(1.5)], None);
        assert_eq!(eval_g0(&spec).unwrap(), 1.0);
    }

    #[test]
    fn eval_g0_is_harmonic_mean_at_k1() {
        // 1/g0 = (1/0.5 + 1/1.5)/2 = 4/3, so g0 = 3/4.
        let spec = equal_spec(1.0, vec![Some(0.5), Some(1.5)], None);
        let g0 = eval_g0(&spec).unwrap();
        assert!((g0 - 0.75).abs() <= 1e-15, "g0={g0}");
    }

    #[test]
    fn residual_zero_at_identity() {
        for k in [0.0, 0.3, 0.5, 1.0] {
            let spec = equal_spec(k, vec![Some(1.0), Some(1.0)], Some(1.0));
            assert_eq!(curve_residual(&spec).unwrap(), 0.0);
        }
    }

    #[test]
    fn residual_zero_on_constant_product_curve() {
        // g1·g2 = 1 lies on the k=1/2 curve.
        let spec = equal_spec(0.5, vec![Some(2.0), Some(0.5)], Some(1.0));
        assert!(curve_residual(&spec).unwrap().abs() <= 1e-15);
    }

    #[test]
    fn residual_sign_convention() {
        // k=0, g=[0.5, 1.4], g0=1: R = 1 − (0.5 + 1.4)/2 = +0.05.
        let spec = equal_spec(0.0, vec![Some(0.5), Some(1.4)], Some(1.0));
        let r = curve_residual(&spec).unwrap();
        assert!((r - 0.05).abs() <= 1e-15, "r={r}");
    }

    #[test]
    fn residual_affine_in_g0_with_positive_slope() {
        let base = GrowthVector::new(vec![Some(1.3), Some(0.7), Some(1.0)], None).unwrap();
        for k in [0.1, 0.5, 0.9] {
            let r = |g0: f64| {
                let spec =
                    CurveSpec::equal_weights(k, base.with_value(Slot::Pool, g0).unwrap()).unwrap();
                curve_residual(&spec).unwrap()
            };
            let (r1, r2, r3) = (r(0.5), r(1.0), r(1.5));
            assert!(r2 > r1 && r3 > r2);
            // Equal spacing in g0 gives equal residual increments.
            assert!(((r3 - r2) - (r2 - r1)).abs() <= 1e-12);
        }
    }

    #[test]
    fn solve_constant_product_case() {
        let spec = equal_spec(0.5, vec![Some(2.0), None], Some(1.0));
        let g2 = solve_unknown_growth(&spec, 1e-12).unwrap();
        assert!((g2 - 0.5).abs() <= 1e-15, "g2={g2}");
    }

    #[test]
    fn solve_harmonic_case_at_k1() {
        // g2 = g1/(2·g1 − 1) = 0.75/0.5 = 1.5.
        let spec = equal_spec(1.0, vec![Some(0.75), None], Some(1.0));
        let g2 = solve_unknown_growth(&spec, 1e-12).unwrap();
        assert!((g2 - 1.5).abs() <= 1e-15, "g2={g2}");
    }

    #[test]
    fn solve_linear_case_at_k0() {
        // g1 + g2 = 2.
        let spec = equal_spec(0.0, vec![Some(0.5), None], Some(1.0));
        let g2 = solve_unknown_growth(&spec, 1e-12).unwrap();
        assert!((g2 - 1.5).abs() <= 1e-15, "g2={g2}");
    }

    #[test]
    fn solve_k1_half_pool_restriction() {
        let spec = equal_spec(1.0, vec![Some(0.5), None], Some(1.0));
        assert!(matches!(
            solve_unknown_growth(&spec, 1e-12),
            Err(Error::NoPositiveRoot(_))
        ));
        // Strictly above the boundary the solve succeeds.
        let spec = equal_spec(1.0, vec![Some(0.5001), None], Some(1.0));
        assert!(solve_unknown_growth(&spec, 1e-12).unwrap() > 0.0);
    }

    #[test]
    fn solve_k0_infeasible_when_mean_budget_exhausted() {
        // g0=1 needs g1 + g2 = 2; g1 = 2.5 leaves nothing positive.
        let spec = equal_spec(0.0, vec![Some(2.5), None], Some(1.0));
        assert!(matches!(
            solve_unknown_growth(&spec, 1e-12),
            Err(Error::NoPositiveRoot(_))
        ));
    }

    #[test]
    fn solve_quadratic_case_matches_frozen_oracle_value() {
        // k=0.3, g0=1, g1=0.8: positive root of 0.7g² − 0.615g − 0.3 = 0,
        // frozen from the bisection oracle.
        let spec = equal_spec(0.3, vec![Some(0.8), None], Some(1.0));
        let g2 = solve_unknown_growth(&spec, 1e-12).unwrap();
        assert!(
            (g2 - 1.2276659317867313).abs() <= 1e-12,
            "g2={g2:.17e}"
        );
    }

    #[test]
    fn solve_requires_exactly_one_unknown() {
        let spec = equal_spec(0.5, vec![Some(1.0), Some(1.0)], Some(1.0));
        assert!(matches!(
            solve_unknown_growth(&spec, 1e-12),
            Err(Error::NoUnknown)
        ));
    }

    #[test]
    fn solve_pool_slot_uses_direct_evaluation() {
        let spec = equal_spec(0.5, vec![Some(2.0), Some(1.0)], None);
        let direct = eval_g0(&spec).unwrap();
        let solved = solve_unknown_growth(&spec, 1e-12).unwrap();
        assert_eq!(direct, solved);
    }

    #[test]
    fn ten_asset_single_stake_growth() {
        // n=10, k=1/2, g1=2: g0 = 1.05/0.975 = 10.5/9.75.
        let mut assets = vec![Some(1.0); 10];
        assets[0] = Some(2.0);
        let spec = equal_spec(0.5, assets, None);
        let g0 = eval_g0(&spec).unwrap();
        assert!((g0 - 10.5 / 9.75).abs() <= 1e-14, "g0={g0}");
    }

    #[test]
    fn residual_at_substitutes_unknown() {
        let spec = equal_spec(0.5, vec![Some(2.0), None], Some(1.0));
        assert!(residual_at(&spec, 0.5).unwrap().abs() <= 1e-15);
        // The residual is strictly decreasing in an unknown asset factor.
        assert!(residual_at(&spec, 0.25).unwrap() > 0.0);
        assert!(residual_at(&spec, 1.0).unwrap() < 0.0);
    }
}
