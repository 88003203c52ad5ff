//! Shared instance builders for the engine benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ekamm_core::{pool_init, CurveSpec, GrowthVector, PoolState, WeightPolicy};

/// Deterministic RNG so benchmark inputs are stable across runs.
pub fn bench_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xBE4C)
}

/// Curve instance with one unknown asset slot and n-1 random factors.
pub fn random_asset_solve(rng: &mut ChaCha8Rng, n: usize, k: f64) -> CurveSpec {
    let mut assets: Vec<Option<f64>> = (0..n)
        .map(|_| Some(rng.random_range(0.3f64..=3.0)))
        .collect();
    assets[n / 2] = None;
    CurveSpec::equal_weights(k, GrowthVector::new(assets, Some(1.0)).unwrap()).unwrap()
}

/// Curve instance with the pool slot unknown (stake evaluation).
pub fn random_pool_solve(rng: &mut ChaCha8Rng, n: usize, k: f64) -> CurveSpec {
    let assets: Vec<Option<f64>> = (0..n)
        .map(|_| Some(rng.random_range(0.3f64..=3.0)))
        .collect();
    CurveSpec::equal_weights(k, GrowthVector::new(assets, None).unwrap()).unwrap()
}

/// Equal-weight pool with n assets at the given balance.
pub fn balanced_pool(n: usize, k: f64, balance: f64) -> PoolState {
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
