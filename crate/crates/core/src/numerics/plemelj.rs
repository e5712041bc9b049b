//! Boundary values of the Cauchy transform on the real line.
//!
//! For a function `g` decaying at the edges of the grid,
//!
//! ```text
//! S_± g(λ) = lim_{η→0±} ∫ g(z) / (z − λ − iη) dz = PV ∫ g(z) / (z − λ) dz ± iπ g(λ).
//! ```
//!
//! In Fourier variables (`ĝ(k) = ∫ g(z) e^{−ikz} dz`) these are the half-line
//! multipliers `S_± = ±2πi F⁻¹ χ_± F`. On a truncated grid the periodic DFT
//! version of that multiplier picks up the `O(λ/L²)` tail of the aliased
//! cotangent kernel, which for the Maxwellian is a few percent and does not
//! shrink with `N`. The principal value is therefore taken as the discrete
//! convolution with the odd-lattice kernel
//!
//! ```text
//! PV_j = Σ_{k − j odd} 2 g_k / (k − j),
//! ```
//!
//! which is spectrally accurate for analytic `g` and whose lattice symbol is
//! exactly `iπ sgn(θ)`, so `S_+ − S_− = 2πi` and `S_±² = ±2πi S_±` hold to
//! round-off on decaying data. The convolution is a pointwise multiplier on
//! the zero-padded grid of length `2N` and is evaluated by FFT.

use num_complex::Complex64;

use crate::numerics::function::GridFunction;

/// Edge amplitude, relative to the maximum, above which the transform warns.
pub const LEAKAGE_THRESHOLD: f64 = 1e-10;

/// Side of the real axis from which the boundary value is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    /// `Plus` for `x > 0`, `Minus` otherwise.
    pub fn of(x: f64) -> Side {
        if x > 0.0 {
            Side::Plus
        } else {
            Side::Minus
        }
    }
}

/// `max(|g(v_0)|, |g(v_{N-1})|) / max |g|`, zero for the zero function.
pub fn boundary_leakage(g: &GridFunction) -> f64 {
    let values = g.values();
    let peak = g.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    values[0].norm().max(values[values.len() - 1].norm()) / peak
}

/// `PV ∫ g(z) / (z − λ_j) dz` at every node.
pub fn principal_value(g: &GridFunction) -> GridFunction {
    let leakage = boundary_leakage(g);
    if leakage > LEAKAGE_THRESHOLD {
        log::warn!(
            "Cauchy transform input does not decay at the grid edge (relative edge amplitude {leakage:e})"
        );
    }
    let grid = g.grid();
    let kernel = &grid.cauchy;
    let n = grid.len();
    let mut buffer = vec![Complex64::new(0.0, 0.0); 2 * n];
    buffer[..n].copy_from_slice(g.values());
    kernel.forward.process(&mut buffer);
    buffer
        .iter_mut()
        .zip(&kernel.spectrum)
        .for_each(|(b, k)| *b *= k);
    kernel.inverse.process(&mut buffer);
    buffer.truncate(n);
    GridFunction::from_values(grid, buffer).expect("convolution of finite data is finite")
}

/// Boundary value `S_side g` of the Cauchy transform.
pub fn plemelj(g: &GridFunction, side: Side) -> GridFunction {
    let residue = Complex64::new(0.0, side.sign() * std::f64::consts::PI);
    let mut out = principal_value(g);
    out.values_mut()
        .iter_mut()
        .zip(g.values())
        .for_each(|(o, &x)| *o += residue * x);
    out
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::numerics::special::{cauchy_weight, dawson, weight};
    use crate::numerics::Grid;

    fn weight_fn(grid: &Arc<Grid>) -> GridFunction {
        GridFunction::from_real_fn(grid, weight)
    }

    #[test]
    fn weight_at_origin() {
        let grid = Grid::standard();
        let s = plemelj(&weight_fn(&grid), Side::Plus);
        let at0 = s.values()[grid.center()];
        assert!((at0 - Complex64::new(0.0, PI.sqrt())).norm() < 1e-12, "{at0}");
    }

    #[test]
    fn dawson_identity_on_the_whole_grid() {
        let grid = Grid::standard();
        let w = weight_fn(&grid);
        for side in [Side::Plus, Side::Minus] {
            let s = plemelj(&w, side);
            let err = grid
                .nodes()
                .iter()
                .zip(s.values())
                .map(|(&l, &c)| (c - cauchy_weight(l, side.sign())).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "{side:?}: {err:e}");
        }
        assert!((cauchy_weight(0.7, 1.0).re + 2.0 * dawson(0.7)).abs() < 1e-16);
    }

    #[test]
    fn far_field_matches_direct_quadrature() {
        // g supported in [-1, 1]; at lambda = 5 the integrand is regular.
        let grid = Grid::standard();
        let bump = |z: f64| {
            if z.abs() < 1.0 {
                (-1.0 / (1.0 - z * z)).exp()
            } else {
                0.0
            }
        };
        let g = GridFunction::from_real_fn(&grid, bump);
        let s = plemelj(&g, Side::Minus);
        let j = grid.nodes().iter().position(|&v| v == 5.0).unwrap();
        // Fine midpoint rule on [-1, 1]; the bump is smooth and flat at the ends.
        let m = 200_000;
        let h = 2.0 / m as f64;
        let direct: f64 = (0..m)
            .map(|i| {
                let z = -1.0 + (i as f64 + 0.5) * h;
                bump(z) / (z - 5.0)
            })
            .sum::<f64>()
            * h;
        assert!((s.values()[j].re - direct).abs() < 1e-8);
        assert!(s.values()[j].im.abs() < 1e-12);
    }

    #[test]
    fn jump_is_two_pi_i() {
        let grid = Grid::standard();
        let g = GridFunction::from_fn(&grid, |v| {
            Complex64::new((1.0 + v).cos(), v * v) * weight(v)
        });
        let jump = plemelj(&g, Side::Plus)
            .sub(&plemelj(&g, Side::Minus))
            .unwrap();
        for (j, (&a, &b)) in jump.values().iter().zip(g.values()).enumerate() {
            assert!((a - 2.0 * PI * Complex64::i() * b).norm() < 1e-8, "node {j}");
        }
    }

    #[test]
    fn side_helpers() {
        assert_eq!(Side::of(0.3), Side::Plus);
        assert_eq!(Side::of(-0.3), Side::Minus);
        assert_eq!(Side::Plus.opposite(), Side::Minus);
    }
}
