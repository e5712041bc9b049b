use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::numerics::special::weight;

pub const DEFAULT_HALF_WIDTH: f64 = 8.0;
pub const DEFAULT_POINTS: usize = 4096;

/// Symmetric uniform discretization of the real line, shared by the
/// velocity variable `v` and the spectral parameter `lambda`.
///
/// Nodes are `v_j = -L + j * dv` for `j = 0..N`, with `dv = 2L / N`. The
/// left endpoint `-L` is a node, the right endpoint `+L` is not, so the
/// node `v_{N/2}` is exactly zero and `v_{N-1-j} = -v_{j+1}`. Every
/// quadrature is the trapezoid rule with uniform weight `dv`; the two
/// unpaired endpoint contributions carry the factor `w(L) < 1e-20`.
///
/// The grid also owns the FFT plans and the kernel spectrum used by the
/// Cauchy boundary operators, so constructing one is not free; share it
/// through an `Arc`.
pub struct Grid {
    half_width: f64,
    len: usize,
    spacing: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    pub(crate) cauchy: CauchyKernel,
}

pub(crate) struct CauchyKernel {
    pub(crate) forward: Arc<dyn Fft<f64>>,
    pub(crate) inverse: Arc<dyn Fft<f64>>,
    /// DFT of the odd-lattice kernel on the zero-padded grid of length 2N,
    /// already divided by 2N.
    pub(crate) spectrum: Vec<Complex64>,
}

impl Grid {
    pub fn new(half_width: f64, len: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if len < 8 || !len.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and at least 8, got {len}"
            )));
        }
        if weight(half_width) >= 1e-20 {
            return Err(Error::InvalidGrid(format!(
                "w(L) = {:e} is not below 1e-20; increase L",
                weight(half_width)
            )));
        }
        let spacing = 2.0 * half_width / len as f64;
        let nodes: Vec<f64> = (0..len)
            .map(|j| -half_width + j as f64 * spacing)
            .collect();
        let weights = nodes.iter().map(|&v| weight(v)).collect();
        let cauchy = CauchyKernel::new(len);
        Ok(Self {
            half_width,
            len,
            spacing,
            nodes,
            weights,
            cauchy,
        })
    }

    /// Shared handle with the default `L = 8`, `N = 4096`.
    pub fn standard() -> Arc<Self> {
        Arc::new(Self::new(DEFAULT_HALF_WIDTH, DEFAULT_POINTS).expect("default grid is valid"))
    }

    pub fn shared(half_width: f64, len: usize) -> Result<Arc<Self>> {
        Self::new(half_width, len).map(Arc::new)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `w(v_j)` at every node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the node `v = 0`.
    pub fn center(&self) -> usize {
        self.len / 2
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.len == other.len && self.half_width == other.half_width
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left_half_width: self.half_width,
                left_len: self.len,
                right_half_width: other.half_width,
                right_len: other.len,
            })
        }
    }

    /// Trapezoid quadrature of `f(v) w(v)` for a node-wise integrand.
    pub fn integrate_weighted(&self, values: impl IntoIterator<Item = Complex64>) -> Complex64 {
        let sum: Complex64 = values
            .into_iter()
            .zip(&self.weights)
            .map(|(f, &w)| f * w)
            .sum();
        sum * self.spacing
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_width", &self.half_width)
            .field("len", &self.len)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl CauchyKernel {
    fn new(len: usize) -> Self {
        let padded = 2 * len;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(padded);
        let inverse = planner.plan_fft_inverse(padded);

        // PV integral at node j: sum over k with k - j odd of 2 g_k / (k - j).
        // As a convolution out_j = sum_k g_k K(j - k) the kernel is
        // K(d) = -2 / d for odd d, zero for even d.
        let mut spectrum = vec![Complex64::new(0.0, 0.0); padded];
        for d in 1..len as i64 {
            if d % 2 != 0 {
                let value = -2.0 / d as f64;
                spectrum[d as usize] = Complex64::new(value, 0.0);
                spectrum[padded - d as usize] = Complex64::new(-value, 0.0);
            }
        }
        forward.process(&mut spectrum);
        let scale = 1.0 / padded as f64;
        spectrum.iter_mut().for_each(|c| *c *= scale);
        Self {
            forward,
            inverse,
            spectrum,
        }
    }
}
