//! Seeded random inputs for property checks, the acceptance suite and the CLI.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::{q, Q, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the box |re|, |im| ≤ scale.
pub fn complex(rng: &mut impl Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
}

/// Uniform complex with modulus in [lo, hi] and uniform phase.
pub fn complex_annulus(rng: &mut impl Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..=hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// n/d with |n| ≤ max_num and 1 ≤ d ≤ max_den.
pub fn rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Q {
    q(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

/// Nonzero rational with the same ranges.
pub fn rational_nonzero(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Q {
    loop {
        let v = rational(rng, max_num, max_den);
        if v != q(0, 1) {
            return v;
        }
    }
}

/// Sorted real positions with gaps at least `min_gap`.
pub fn separated_reals(rng: &mut impl Rng, n: usize, min_gap: f64, spread: f64) -> Vec<f64> {
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(x);
        x += min_gap + rng.gen_range(0.0..spread);
    }
    let mid = out.iter().sum::<f64>() / n as f64;
    out.iter().map(|v| v - mid).collect()
}
