//! Seeded sampling helpers. All randomness in audits flows through
//! `ChaCha8Rng` with explicit seeds so reports are reproducible.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction on the unit sphere of the given dimension.
/// Dimension 0 yields the empty vector.
pub fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    if dim == 0 {
        return Vec::new();
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-8 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Uniform point in the closed ball of the given radius.
pub fn ball_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    if dim == 0 {
        return Vec::new();
    }
    let dir = unit_vector(rng, dim);
    let r = radius * rng.gen_range(0.0f64..=1.0).powf(1.0 / dim as f64);
    dir.into_iter().map(|c| c * r).collect()
}

/// Independent normal coordinates scaled by `scale`.
pub fn scaled_vector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            x * scale
        })
        .collect()
}
