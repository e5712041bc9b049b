//! Grids, the Maxwellian weight, weighted quadrature and the Cauchy
//! boundary operators.

mod fit;
mod function;
mod grid;
mod plemelj;
pub mod special;

use num_complex::Complex64;
use serde::Serialize;

pub use fit::{linear_fit, polynomial_fit, LineFit};
pub use function::GridFunction;
pub use grid::{Grid, DEFAULT_HALF_WIDTH, DEFAULT_POINTS};
pub use plemelj::{boundary_leakage, plemelj, principal_value, Side, LEAKAGE_THRESHOLD};
pub use special::{dawson, pv_weight, weight, SQRT_PI};

use crate::error::Result;

/// `(f, g)_w = int f(v) conj(g(v)) w(v) dv` by the trapezoid rule.
pub fn inner_w(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    f.check_same_grid(g)?;
    let grid = f.grid();
    Ok(grid.integrate_weighted(
        f.values()
            .iter()
            .zip(g.values())
            .map(|(&a, &b)| a * b.conj()),
    ))
}

/// `(f, 1)_w`, the zeroth moment.
pub fn moment(f: &GridFunction) -> Complex64 {
    f.grid().integrate_weighted(f.values().iter().copied())
}

/// Weighted norm of a function and of its first derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightedNorms {
    /// `||f||_{L^2_w}`
    pub l2w: f64,
    /// `sqrt(||f||^2 + ||f'||^2)` with `f'` the centered divided difference.
    pub h1w: f64,
}

pub fn l2w_norm(f: &GridFunction) -> f64 {
    let grid = f.grid();
    let sum: f64 = f
        .values()
        .iter()
        .zip(grid.weights())
        .map(|(c, &w)| c.norm_sqr() * w)
        .sum();
    (sum * grid.spacing()).sqrt()
}

/// Centered divided difference, one-sided at the two ends.
pub fn divided_difference(f: &GridFunction) -> GridFunction {
    let values = f.values();
    let n = values.len();
    let h = f.grid().spacing();
    let mut out = f.clone();
    {
        let d = out.values_mut();
        d[0] = (values[1] - values[0]) / h;
        d[n - 1] = (values[n - 1] - values[n - 2]) / h;
        for j in 1..n - 1 {
            d[j] = (values[j + 1] - values[j - 1]) / (2.0 * h);
        }
    }
    out
}

pub fn norms(f: &GridFunction) -> WeightedNorms {
    let l2w = l2w_norm(f);
    let derivative = l2w_norm(&divided_difference(f));
    WeightedNorms {
        l2w,
        h1w: l2w.hypot(derivative),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn grid() -> Arc<Grid> {
        Grid::standard()
    }

    #[test]
    fn weight_integrates_to_one() {
        let g = grid();
        let mass = moment(&GridFunction::ones(&g));
        assert!((mass.re - 1.0).abs() < 1e-12 && mass.im == 0.0);
    }

    #[test]
    fn grid_symmetry() {
        let g = grid();
        let v = g.nodes();
        let n = g.len();
        assert_eq!(v[g.center()], 0.0);
        for j in 0..n - 1 {
            assert!((v[n - 1 - j] + v[j + 1]).abs() < 1e-13);
        }
        assert!(v.windows(2).all(|p| p[1] > p[0]));
        assert!(weight(g.half_width()) < 1e-20);
    }

    #[test]
    fn odd_integrands_vanish() {
        let g = grid();
        let odd = GridFunction::from_real_fn(&g, |v| v * v * v + (2.0 * v).sin());
        assert!(moment(&odd).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(8.0, 4095).is_err());
        assert!(Grid::new(4.0, 4096).is_err());
        assert!(Grid::new(-1.0, 64).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let g = grid();
        let one = GridFunction::ones(&g);
        let v = GridFunction::identity(&g);
        assert!((inner_w(&one, &one).unwrap() - 1.0).norm() < 1e-12);
        assert!(inner_w(&v, &one).unwrap().norm() < 1e-15);
        assert!((inner_w(&v, &v).unwrap() - 0.5).norm() < 1e-12);
    }

    #[test]
    fn gaussian_moments_are_exact() {
        // int v^{2k} w dv = (2k-1)!! / 2^k
        let g = grid();
        let mut expected = 1.0;
        for k in 0..=6 {
            if k > 0 {
                expected *= (2 * k - 1) as f64 / 2.0;
            }
            let f = GridFunction::from_real_fn(&g, |v| v.powi(2 * k));
            let m = moment(&f);
            assert!((m.re - expected).abs() < 1e-10 * expected.max(1.0), "k = {k}");
        }
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = GridFunction::ones(&grid());
        let b = GridFunction::ones(&Grid::shared(8.0, 256).unwrap());
        assert!(matches!(
            inner_w(&a, &b),
            Err(crate::Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn norm_examples() {
        let g = grid();
        let zero = norms(&GridFunction::zeros(&g));
        assert_eq!((zero.l2w, zero.h1w), (0.0, 0.0));

        let one = norms(&GridFunction::ones(&g));
        assert!((one.l2w - 1.0).abs() < 1e-12);
        assert!((one.h1w - 1.0).abs() < 1e-12);

        let v = norms(&GridFunction::identity(&g));
        assert!((v.l2w - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((v.h1w - 1.5f64.sqrt()).abs() < 1e-6);
        assert!(v.h1w >= v.l2w);
    }

    #[test]
    fn inner_product_is_sesquilinear() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |v| Complex64::new(v.cos(), v));
        let h = GridFunction::from_fn(&g, |v| Complex64::new(1.0, -v * v));
        let k = GridFunction::from_real_fn(&g, |v| (0.5 * v).sin());
        let a = Complex64::new(0.3, -1.2);
        let combo = f.scale(a).add(&h).unwrap();
        let lhs = inner_w(&combo, &k).unwrap();
        let rhs = a * inner_w(&f, &k).unwrap() + inner_w(&h, &k).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        let conj_side = inner_w(&k, &combo).unwrap();
        assert!((conj_side - rhs.conj()).norm() < 1e-14);
    }
}
