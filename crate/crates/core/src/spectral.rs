//! `L_ξ` on the grid, the discrete eigenmode and its Riesz projector, and
//! the resolvent through the rank-one perturbation formula.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dispersion::{self, LambdaStar};
use crate::error::{Error, Result};
use crate::numerics::{inner_w, l2w_norm, moment, Grid, GridFunction};

/// `|ω|` below which `λ` is treated as an eigenvalue, not a resolvent point.
pub const POLE_THRESHOLD: f64 = 1e-8;

/// `(L_ξ f)(v) = −(1 + ivξ) f(v) + (f, 1)_w`.
pub fn apply_l(xi: f64, f: &GridFunction) -> GridFunction {
    let mass = moment(f);
    f.map(|v, c| -Complex64::new(1.0, v * xi) * c + mass)
}

/// `(L*_ξ f)(v) = (ivξ − 1) f(v) + (f, 1)_w`.
pub fn apply_l_adjoint(xi: f64, f: &GridFunction) -> GridFunction {
    let mass = moment(f);
    f.map(|v, c| Complex64::new(-1.0, v * xi) * c + mass)
}

/// The discrete eigenpair of `L_ξ` for `|ξ| < √π`.
///
/// `e1` has a pole at distance `(1 + λ*)/|ξ|` from the real axis. Grid
/// quadratures involving it are accurate while that distance spans several
/// grid spacings; closer to resonance the mode is refused with
/// [`Error::Unresolved`]. At the default grid this leaves `|ξ| ≲ 1.7`.
#[derive(Clone, Debug)]
pub struct Mode {
    pub xi: f64,
    pub lambda_star: f64,
    /// `v ↦ 1 / (ivξ + 1 + λ*)`
    pub e1: GridFunction,
    /// `v ↦ 1 / (−ivξ + 1 + λ*)`, the eigenfunction of `L*_ξ`
    pub e1bar: GridFunction,
    /// `∂_λ ω(λ*, ξ)`, equal to `(e1, e1bar)_w`
    pub omega_prime: f64,
}

impl Mode {
    /// `Ok(None)` for `|ξ| > √π`, a resonance error on the resonance zone
    /// and an unresolved error where the grid is too coarse for `e1`.
    pub fn new(xi: f64, grid: &Arc<Grid>) -> Result<Option<Mode>> {
        let lambda_star = match dispersion::lambda_star(xi, grid)? {
            LambdaStar::Eigenvalue(l) => l,
            LambdaStar::Resonant => return Err(Error::Resonance { xi }),
            LambdaStar::Absent => return Ok(None),
        };
        let a = 1.0 + lambda_star;
        let required = dispersion::QUADRATURE_POLE_CLEARANCE * grid.spacing();
        if xi != 0.0 && a / xi.abs() < required {
            return Err(Error::Unresolved {
                xi,
                pole_distance: a / xi.abs(),
                required,
            });
        }
        let e1 = GridFunction::from_fn(grid, |v| 1.0 / Complex64::new(a, v * xi));
        let e1bar = e1.conj();
        let omega_prime = if xi == 0.0 {
            1.0
        } else {
            dispersion::omega_prime_lambda(lambda_star, xi, grid)?
        };
        Ok(Some(Mode {
            xi,
            lambda_star,
            e1,
            e1bar,
            omega_prime,
        }))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.e1.grid()
    }

    /// `(f, ē₁)_w / ω′`, the amplitude of `f` along `e₁`.
    pub fn coefficient(&self, f: &GridFunction) -> Result<Complex64> {
        Ok(inner_w(f, &self.e1bar)? / self.omega_prime)
    }

    pub fn project(&self, f: &GridFunction) -> Result<GridFunction> {
        Ok(self.e1.scale(self.coefficient(f)?))
    }

    /// Operator norm `‖e₁‖ ‖ē₁‖ / |ω′|` of the rank-one projector on `L²_w`.
    pub fn projector_norm(&self) -> f64 {
        l2w_norm(&self.e1) * l2w_norm(&self.e1bar) / self.omega_prime.abs()
    }
}

/// Riesz projector onto the discrete eigenmode; zero for `|ξ| > √π`.
pub fn project(xi: f64, f: &GridFunction) -> Result<GridFunction> {
    match Mode::new(xi, f.grid())? {
        Some(mode) => mode.project(f),
        None => Ok(GridFunction::zeros(f.grid())),
    }
}

/// Pointwise `g / (−ivξ − 1 − λ)`.
pub fn free_resolvent_apply(lambda: Complex64, xi: f64, g: &GridFunction) -> GridFunction {
    g.map(|v, c| c / Complex64::new(-1.0 - lambda.re, -v * xi - lambda.im))
}

/// Checks that `λ` is off the essential line and returns the grid value of
/// `ω(λ, ξ) = 1 + (R⁰1, 1)_w`, failing if it is below the pole threshold.
fn resolvent_determinant(lambda: Complex64, xi: f64, grid: &Arc<Grid>) -> Result<Complex64> {
    dispersion::omega(lambda, xi, grid)?;
    let r0_one = free_resolvent_apply(lambda, xi, &GridFunction::ones(grid));
    let omega = 1.0 + moment(&r0_one);
    if omega.norm() < POLE_THRESHOLD {
        return Err(Error::Pole {
            lambda,
            xi,
            modulus: omega.norm(),
        });
    }
    Ok(omega)
}

/// `K(λ, ξ)⁻¹ g = g − (R⁰g, 1)_w / ω · 1`, the inverse of `K = I + V R⁰`.
pub fn k_inverse_apply(lambda: Complex64, xi: f64, g: &GridFunction) -> Result<GridFunction> {
    let omega = resolvent_determinant(lambda, xi, g.grid())?;
    let correction = moment(&free_resolvent_apply(lambda, xi, g)) / omega;
    Ok(g.map(|_, c| c - correction))
}

/// `R(λ, ξ) g = (L_ξ − λ)⁻¹ g = R⁰ K⁻¹ g`.
///
/// Equivalently `R⁰g − R⁰1 (R⁰g, 1)_w / ω(λ, ξ)`.
pub fn resolvent_apply(lambda: Complex64, xi: f64, g: &GridFunction) -> Result<GridFunction> {
    let k = k_inverse_apply(lambda, xi, g)?;
    Ok(free_resolvent_apply(lambda, xi, &k))
}

/// `R(λ, 0) = (V − I)/(1 + λ) − V/λ`, with `V f = (f, 1)_w 1`.
pub fn resolvent_zero_frequency(lambda: Complex64, g: &GridFunction) -> Result<GridFunction> {
    if lambda.norm() < POLE_THRESHOLD || (lambda + 1.0).norm() < POLE_THRESHOLD {
        return Err(Error::Pole {
            lambda,
            xi: 0.0,
            modulus: lambda.norm().min((lambda + 1.0).norm()),
        });
    }
    let mass = moment(g);
    Ok(g.map(|_, c| (mass - c) / (1.0 + lambda) - mass / lambda))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::numerics::{l2w_norm, SQRT_PI};
    use crate::testing::random_smooth;

    fn grid() -> Arc<Grid> {
        Grid::standard()
    }

    fn mode(xi: f64) -> Mode {
        Mode::new(xi, &grid()).unwrap().unwrap()
    }

    fn dist(a: &GridFunction, b: &GridFunction) -> f64 {
        l2w_norm(&a.sub(b).unwrap())
    }

    #[test]
    fn apply_l_examples() {
        let g = grid();
        assert!(apply_l(0.0, &GridFunction::ones(&g)).max_abs() < 1e-12);
        let v = GridFunction::identity(&g);
        assert!(dist(&apply_l(0.0, &v), &v.scale((-1.0).into())) < 1e-14);
        let m = mode(0.8);
        let lhs = apply_l(0.8, &m.e1);
        assert!(dist(&lhs, &m.e1.scale(m.lambda_star.into())) < 1e-8);
    }

    #[test]
    fn mode_invariants() {
        for xi in [-1.5, -1.0, -0.4, 0.0, 0.4, 1.0, 1.5, 1.65] {
            let m = mode(xi);
            let pairing = inner_w(&m.e1, &m.e1bar).unwrap();
            assert!((pairing - m.omega_prime).norm() < 1e-8, "xi = {xi}");
            let mass = inner_w(&m.e1, &GridFunction::ones(m.grid())).unwrap();
            assert!((mass - 1.0).norm() < 1e-8, "xi = {xi}");
        }
        assert!(Mode::new(2.5, &grid()).unwrap().is_none());
        assert!(matches!(
            Mode::new(SQRT_PI, &grid()),
            Err(Error::Resonance { .. })
        ));
        assert!(matches!(
            Mode::new(1.766, &grid()),
            Err(Error::Unresolved { .. })
        ));
        assert!(matches!(
            Mode::new(-1.75, &grid()),
            Err(Error::Unresolved { .. })
        ));
    }

    #[test]
    fn projector_norm_is_attained() {
        for xi in [0.0, 0.6, -1.4] {
            let m = mode(xi);
            let gain = l2w_norm(&m.project(&m.e1bar).unwrap()) / l2w_norm(&m.e1bar);
            assert!((gain - m.projector_norm()).abs() < 1e-10 * gain, "xi = {xi}");
            assert!(m.projector_norm() >= 1.0 - 1e-12);
        }
        assert!((mode(0.0).projector_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adjoint_eigenpair() {
        for xi in [0.3, -1.2] {
            let m = mode(xi);
            let lhs = apply_l_adjoint(xi, &m.e1bar);
            assert!(dist(&lhs, &m.e1bar.scale(m.lambda_star.into())) < 1e-8);
        }
    }

    #[test]
    fn adjoint_is_the_adjoint() {
        let g = grid();
        let f = random_smooth(&g, 3);
        let h = random_smooth(&g, 4);
        let xi = 0.9;
        let lhs = inner_w(&apply_l(xi, &f), &h).unwrap();
        let rhs = inner_w(&f, &apply_l_adjoint(xi, &h)).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn projector_examples() {
        let g = grid();
        let m = mode(0.8);
        assert!(dist(&project(0.8, &m.e1).unwrap(), &m.e1) < 1e-8);
        let f = random_smooth(&g, 1);
        assert!(project(2.5, &f).unwrap().max_abs() == 0.0);
        let p1 = project(0.8, &GridFunction::ones(&g)).unwrap();
        assert!(dist(&p1, &m.e1.scale((1.0 / m.omega_prime).into())) < 1e-8);
        assert!(matches!(project(-SQRT_PI, &f), Err(Error::Resonance { .. })));
        let p0 = project(0.0, &f).unwrap();
        assert!(dist(&p0, &GridFunction::constant(&g, moment(&f))) < 1e-14);
    }

    #[test]
    fn resolvent_examples() {
        let g = grid();
        let one = GridFunction::ones(&g);
        let r = resolvent_apply(Complex64::new(2.0, 0.0), 0.0, &one).unwrap();
        assert!(dist(&r, &one.scale((-0.5).into())) < 1e-12);

        let lambda = Complex64::new(1.0, 1.0);
        let h = random_smooth(&g, 7);
        let r = resolvent_apply(lambda, 1.0, &h).unwrap();
        let residual = apply_l(1.0, &r).add_scaled(-lambda, &r).unwrap();
        assert!(dist(&residual, &h) < 1e-8);

        let lambda = Complex64::new(2.0, 0.0);
        let k = k_inverse_apply(lambda, 0.7, &one).unwrap();
        let omega = dispersion::omega(lambda, 0.7, &g).unwrap();
        assert!(dist(&k, &one.scale(1.0 / omega)) < 1e-10);
    }

    #[test]
    fn resolvent_zero_frequency_matches_general_formula() {
        let g = grid();
        let f = random_smooth(&g, 2);
        for lambda in [Complex64::new(2.0, 0.0), Complex64::new(-0.5, 0.7), Complex64::new(0.3, -2.0)] {
            let a = resolvent_apply(lambda, 0.0, &f).unwrap();
            let b = resolvent_zero_frequency(lambda, &f).unwrap();
            assert!(dist(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn resolvent_rejects_poles_and_the_line() {
        let g = grid();
        let f = random_smooth(&g, 2);
        let l = mode(0.6).lambda_star;
        assert!(matches!(
            resolvent_apply(Complex64::new(l, 0.0), 0.6, &f),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            resolvent_apply(Complex64::new(-1.0, 0.5), 0.6, &f),
            Err(Error::EssentialLine { .. })
        ));
        assert!(resolvent_zero_frequency(Complex64::new(0.0, 0.0), &f).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn projector_is_idempotent_and_commutes(xi in -2.5f64..2.5, seed in 0u64..1000) {
            let g = grid();
            prop_assume!(!matches!(
                Mode::new(xi, &g),
                Err(Error::Resonance { .. } | Error::Unresolved { .. })
            ));
            let f = random_smooth(&g, seed);
            let p = project(xi, &f).unwrap();
            let pp = project(xi, &p).unwrap();
            let scale = l2w_norm(&p).max(1.0);
            prop_assert!(dist(&pp, &p) < 1e-8 * scale);
            if let Some(m) = Mode::new(xi, &g).unwrap() {
                let lp = apply_l(xi, &p);
                prop_assert!(dist(&lp, &p.scale(m.lambda_star.into())) < 1e-8 * scale);
            }
        }

        #[test]
        fn first_resolvent_identity(
            xi in -2.5f64..2.5,
            re1 in 0.1f64..3.0, im1 in -3.0f64..3.0,
            re2 in -0.9f64..3.0, im2 in -3.0f64..3.0,
            seed in 0u64..1000,
        ) {
            let g = grid();
            let l1 = Complex64::new(re1, im1);
            let l2 = Complex64::new(re2, im2);
            let f = random_smooth(&g, seed);
            let (r1, r2) = match (resolvent_apply(l1, xi, &f), resolvent_apply(l2, xi, &f)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return Ok(()),
            };
            let r1r2 = resolvent_apply(l1, xi, &r2).unwrap();
            let lhs = r1.sub(&r2).unwrap();
            let rhs = r1r2.scale(l1 - l2);
            prop_assert!(dist(&lhs, &rhs) < 1e-7 * l2w_norm(&f));
        }

        #[test]
        fn resolvent_contraction_bound(
            xi in -3.0f64..3.0, re in 0.05f64..4.0, im in -4.0f64..4.0, seed in 0u64..1000,
        ) {
            let g = grid();
            let f = random_smooth(&g, seed);
            let r = resolvent_apply(Complex64::new(re, im), xi, &f).unwrap();
            prop_assert!(l2w_norm(&r) <= l2w_norm(&f) / re * (1.0 + 1e-10));
        }
    }
}
