//! Spatial data on a periodic `x` grid and its Fourier modes.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::GridFunction;

/// Weighting of the aggregate norm over `ξ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolevWeight {
    /// `1`
    L2,
    /// `1 + ξ²`
    H1,
    /// `1 / (1 + ξ²)`
    HMinus1,
}

impl SobolevWeight {
    fn factor(self, xi: f64) -> f64 {
        match self {
            SobolevWeight::L2 => 1.0,
            SobolevWeight::H1 => 1.0 + xi * xi,
            SobolevWeight::HMinus1 => 1.0 / (1.0 + xi * xi),
        }
    }
}

/// `(∫ weight(ξ) ‖f̂(ξ)‖² dξ)^{1/2}` by the trapezoid rule over the sorted
/// frequencies. A single frequency returns its weighted norm.
pub fn aggregate_norm(xi: &[f64], norms: &[f64], weight: SobolevWeight) -> f64 {
    let mut pairs: Vec<(f64, f64)> = xi
        .iter()
        .zip(norms)
        .map(|(&x, &n)| (x, weight.factor(x) * n * n))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.len() == 1 {
        return pairs[0].1.sqrt();
    }
    pairs
        .windows(2)
        .map(|p| 0.5 * (p[1].0 - p[0].0) * (p[0].1 + p[1].1))
        .sum::<f64>()
        .sqrt()
}

/// Fourier modes `f̂(ξ_k, ·) = Δx Σ_m f(x_m, ·) e^{−iξ_k x_m}` of samples at
/// `x_m = m · period / M`, with `ξ_k = 2πk / period` for `k` in FFT order
/// (`0, 1, …, M/2 − 1, −M/2, …, −1`). Then
/// `∫ |f|² dx ≈ (1/period) Σ_k ‖f̂(ξ_k)‖²`.
pub fn fourier_modes(period: f64, samples: &[GridFunction]) -> Result<Vec<(f64, GridFunction)>> {
    let m = samples.len();
    if m == 0 {
        return Err(Error::InvalidArgument("no spatial samples".into()));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
    }
    let grid = samples[0].grid();
    for s in samples {
        s.check_same_grid(&samples[0])?;
    }
    let fft = FftPlanner::new().plan_fft_forward(m);
    let dx = period / m as f64;
    let n = grid.len();
    let mut modes = vec![vec![Complex64::new(0.0, 0.0); n]; m];
    let mut column = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..n {
        for (c, s) in column.iter_mut().zip(samples) {
            *c = s.values()[j];
        }
        fft.process(&mut column);
        for (mode, &c) in modes.iter_mut().zip(&column) {
            mode[j] = c * dx;
        }
    }
    modes
        .into_iter()
        .enumerate()
        .map(|(k, values)| {
            let signed = if k < m.div_ceil(2) { k as f64 } else { k as f64 - m as f64 };
            Ok((TAU * signed / period, GridFunction::from_values(grid, values)?))
        })
        .collect()
}
