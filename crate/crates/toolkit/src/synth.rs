//! Seeded synthetic basket generator.
//!
//! The algorithm, so other implementations can agree structurally:
//!
//! 1. PRNG: ChaCha8 seeded with `seed` via `seed_from_u64`.
//! 2. Item of rank `r` (1-based) has weight `r^-skew`; its token is `i<r>`.
//! 3. Per transaction, length is `1 + Poisson(mean_length - 1)` (or `1` when
//!    `mean_length <= 1`), clamped to `n_items`.
//! 4. Items are drawn by weighted sampling without replacement: every item
//!    gets key `ln(u) / weight` with `u` uniform in (0, 1], and the `length`
//!    largest keys win. Tokens are emitted in draw (key) order.

use agraph_core::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

/// Generator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    /// Number of transactions.
    pub n_transactions: usize,
    /// Size of the item universe.
    pub n_items: usize,
    /// Target mean transaction length.
    pub mean_length: f64,
    /// Power-law exponent of item popularity.
    pub skew: f64,
    /// PRNG seed.
    pub seed: u64,
}

/// Rejected generator parameters.
#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("n_items must be positive when transactions are requested")]
    NoItems,
    #[error("mean_length must be in (0, n_items], got {0}")]
    MeanLength(f64),
    #[error("skew must be a positive finite number, got {0}")]
    Skew(f64),
}

/// Builds a dataset according to the module-level algorithm.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset, SynthError> {
    if !(spec.skew.is_finite() && spec.skew > 0.0) {
        return Err(SynthError::Skew(spec.skew));
    }
    if spec.n_transactions == 0 {
        return Ok(Dataset::default());
    }
    if spec.n_items == 0 {
        return Err(SynthError::NoItems);
    }
    if !(spec.mean_length.is_finite()
        && spec.mean_length > 0.0
        && spec.mean_length <= spec.n_items as f64)
    {
        return Err(SynthError::MeanLength(spec.mean_length));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weights: Vec<f64> = (1..=spec.n_items)
        .map(|r| (r as f64).powf(-spec.skew))
        .collect();
    let tokens: Vec<String> = (1..=spec.n_items).map(|r| format!("i{r}")).collect();
    let extra = if spec.mean_length > 1.0 {
        Some(Poisson::new(spec.mean_length - 1.0).expect("positive rate"))
    } else {
        None
    };

    let mut keys: Vec<(f64, usize)> = Vec::with_capacity(spec.n_items);
    let mut rows: Vec<Vec<&str>> = Vec::with_capacity(spec.n_transactions);
    for _ in 0..spec.n_transactions {
        let len = match &extra {
            Some(p) => 1 + p.sample(&mut rng) as usize,
            None => 1,
        }
        .min(spec.n_items);
        keys.clear();
        for (i, w) in weights.iter().enumerate() {
            // u in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            keys.push((u.ln() / w, i));
        }
        keys.select_nth_unstable_by(len - 1, |a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut chosen: Vec<(f64, usize)> = keys[..len].to_vec();
        chosen.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        rows.push(chosen.iter().map(|&(_, i)| tokens[i].as_str()).collect());
    }
    Ok(Dataset::from_rows(rows))
}
