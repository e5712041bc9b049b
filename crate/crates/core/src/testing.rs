//! Seeded random test data.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{l2w_norm, Grid, GridFunction};

fn normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A smooth function with unit `L²_w` norm, determined by `seed`:
/// a random complex cubic plus a random trigonometric mode and a random
/// shifted Gaussian bump.
pub fn random_smooth(grid: &Arc<Grid>, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly: Vec<Complex64> = (0..4).map(|_| normal(&mut rng)).collect();
    let trig = normal(&mut rng);
    let frequency: f64 = rng.gen_range(-2.0..2.0);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let bump = normal(&mut rng);
    let centre: f64 = rng.gen_range(-1.5..1.5);
    let f = GridFunction::from_fn(grid, |v| {
        let p = poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * v + c);
        p + trig * (frequency * v + phase).cos() + bump * (-(v - centre).powi(2)).exp()
    });
    let norm = l2w_norm(&f);
    f.scale((1.0 / norm).into())
}

/// `count` functions from consecutive seeds starting at `seed`.
pub fn random_family(grid: &Arc<Grid>, seed: u64, count: usize) -> Vec<GridFunction> {
    (0..count as u64)
        .map(|k| random_smooth(grid, seed.wrapping_mul(1_000_003).wrapping_add(k)))
        .collect()
}
