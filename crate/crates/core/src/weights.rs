//! Weight policies (rebalancing strategies) and the implied-price formula.
//!
//! A rebalancing strategy fixes the target value weights `ω_i^t` for step
//! `t` using information no later than step `t−1`. Given the weights, every
//! asset has an implied price in pool-token numeraire:
//!
//! ```text
//! P_i = −ω_i · α_0 / α_i
//! ```
//!
//! which is what makes the pool's total value identically zero.

use crate::error::{Error, Result};
use crate::model::PoolState;

/// Tolerance used when validating that a weight vector sums to one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A vector of strictly positive value weights summing to one.
///
/// The stored components are pinned so that their floating-point sum (in
/// index order) is *exactly* 1.0: the final component absorbs any rounding
/// left by the first `n−1`. Inputs may be off by up to the given tolerance;
/// the pinning adjustment is never larger than that.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    omega: Vec<f64>,
}

impl WeightVector {
    /// Validates and pins a weight vector. `tol` bounds the acceptable
    /// deviation of the input sum from one.
    pub fn new(mut omega: Vec<f64>, tol: f64) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::LengthMismatch("weight vector is empty".into()));
        }
        if !tol.is_finite() || tol <= 0.0 {
            return Err(Error::NonPositiveInput(format!("tolerance {tol}")));
        }
        for &w in &omega {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::SignViolation(format!("weight {w} must be > 0")));
            }
        }
        let sum: f64 = omega.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::PolicyViolation(format!(
                "weights sum to {sum}, expected 1 within {tol}"
            )));
        }
        let n = omega.len();
        let partial: f64 = omega[..n - 1].iter().sum();
        let last = 1.0 - partial;
        if last <= 0.0 {
            return Err(Error::SignViolation(format!(
                "pinned final weight {last} must be > 0"
            )));
        }
        omega[n - 1] = last;
        Ok(Self { omega })
    }

    /// Equal weights `1/n`, pinned to sum exactly to one.
    pub fn equal(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::LengthMismatch("weight vector is empty".into()));
        }
        Self::new(vec![1.0 / n as f64; n], WEIGHT_SUM_TOL)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.omega
    }

    pub fn get(&self, i: usize) -> f64 {
        self.omega[i]
    }
}

/// A rebalancing strategy: a rule producing the step-`t` weights from
/// information no later than step `t−1`. Both built-in policies are
/// history-free, so genesis (empty history) is well-defined.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightPolicy {
    /// `ω_i = 1/n` for every asset and every step.
    Equal,
    /// A fixed target vector, identical at every step.
    Constant(WeightVector),
}

impl WeightPolicy {
    /// Weights for the next step. `history` holds prior pool states
    /// (most recent last) and may be empty at genesis; the built-in
    /// policies do not consult it.
    pub fn weights_at(&self, n: usize, _history: &[PoolState]) -> Result<WeightVector> {
        match self {
            WeightPolicy::Equal => WeightVector::equal(n),
            WeightPolicy::Constant(w) => {
                if w.len() != n {
                    return Err(Error::LengthMismatch(format!(
                        "constant policy has {} weights, pool has {n} assets",
                        w.len()
                    )));
                }
                Ok(w.clone())
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WeightPolicy::Equal => "equal",
            WeightPolicy::Constant(_) => "constant",
        }
    }
}

/// Price of one asset in pool-token numeraire: `P_i = −ω_i · α_0 / α_i`.
///
/// `alpha0 < 0` (liability) and `alpha_i > 0`, so the result is strictly
/// positive for positive weights.
pub fn implied_price(omega_i: f64, alpha0: f64, alpha_i: f64) -> Result<f64> {
    if !omega_i.is_finite() || omega_i <= 0.0 {
        return Err(Error::SignViolation(format!("weight {omega_i} must be > 0")));
    }
    if !alpha0.is_finite() || alpha0 >= 0.0 {
        return Err(Error::SignViolation(format!(
            "pool-token count {alpha0} must be < 0"
        )));
    }
    if !alpha_i.is_finite() || alpha_i <= 0.0 {
        return Err(Error::SignViolation(format!(
            "asset count {alpha_i} must be > 0"
        )));
    }
    Ok(-omega_i * alpha0 / alpha_i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_weights_uniform() {
        let w = WeightVector::equal(4).unwrap();
        assert_eq!(w.as_slice(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn equal_weights_sum_exactly_one() {
        for n in 1..=16 {
            let w = WeightVector::equal(n).unwrap();
            let sum: f64 = w.as_slice().iter().sum();
            assert_eq!(sum, 1.0, "n={n} sum={sum:e}");
        }
    }

    #[test]
    fn constant_policy_echoes_weights() {
        let w = WeightVector::new(vec![0.6, 0.4], WEIGHT_SUM_TOL).unwrap();
        let policy = WeightPolicy::Constant(w);
        let out = policy.weights_at(2, &[]).unwrap();
        assert_eq!(out.as_slice(), &[0.6, 0.4]);
    }

    #[test]
    fn constant_policy_arity_mismatch() {
        let w = WeightVector::new(vec![0.6, 0.4], WEIGHT_SUM_TOL).unwrap();
        let policy = WeightPolicy::Constant(w);
        assert!(matches!(
            policy.weights_at(3, &[]),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn policy_output_depends_only_on_history() {
        // Both built-ins are history-free: perturbing or dropping the
        // history leaves the weights untouched.
        let pool = crate::model::pool_init(
            vec!["A".into(), "B".into()],
            vec![100.0, 100.0],
            vec![1.0, 1.0],
            0.5,
            WeightPolicy::Equal,
        )
        .unwrap();
        let perturbed = crate::model::pool_init(
            vec!["A".into(), "B".into()],
            vec![7.0, 7.0],
            vec![3.0, 3.0],
            0.9,
            WeightPolicy::Equal,
        )
        .unwrap();
        for policy in [
            WeightPolicy::Equal,
            WeightPolicy::Constant(WeightVector::new(vec![0.6, 0.4], WEIGHT_SUM_TOL).unwrap()),
        ] {
            let base = policy.weights_at(2, &[]).unwrap();
            assert_eq!(
                base,
                policy.weights_at(2, std::slice::from_ref(&pool)).unwrap()
            );
            assert_eq!(
                base,
                policy
                    .weights_at(2, std::slice::from_ref(&perturbed))
                    .unwrap()
            );
        }
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(matches!(
            WeightVector::new(vec![1.2, -0.2], WEIGHT_SUM_TOL),
            Err(Error::SignViolation(_))
        ));
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(matches!(
            WeightVector::new(vec![0.5, 0.4], WEIGHT_SUM_TOL),
            Err(Error::PolicyViolation(_))
        ));
    }

    #[test]
    fn implied_price_examples() {
        assert_eq!(implied_price(0.5, -200.0, 100.0).unwrap(), 1.0);
        assert_eq!(implied_price(0.5, -200.0, 50.0).unwrap(), 2.0);
        assert_eq!(implied_price(0.25, -400.0, 100.0).unwrap(), 1.0);
    }

    #[test]
    fn implied_price_sign_checks() {
        assert!(matches!(
            implied_price(0.0, -200.0, 100.0),
            Err(Error::SignViolation(_))
        ));
        assert!(matches!(
            implied_price(0.5, 200.0, 100.0),
            Err(Error::SignViolation(_))
        ));
        assert!(matches!(
            implied_price(0.5, -200.0, 0.0),
            Err(Error::SignViolation(_))
        ));
    }
}
