//! Deliberately broken inputs must be caught by the checks that guard them.

use bgk_spectral::acceptance::{self, dawson_plemelj, parseval_error_at, Settings};
use bgk_spectral::numerics::{self, Grid, SQRT_PI};
use bgk_spectral::spectral::Mode;
use bgk_spectral::testing::random_smooth;
use bgk_spectral::{dispersion, gft, Complex64, Error};

#[test]
fn tampered_dawson_fails_criterion_one() {
    let grid = Grid::standard();
    let honest = dawson_plemelj(&grid, numerics::dawson);
    assert!(honest.iter().all(|c| c.passed));
    let tampered = dawson_plemelj(&grid, |x| numerics::dawson(x) * (1.0 + 1e-6));
    assert!(tampered.iter().all(|c| !c.passed), "{}", tampered[0]);
    let shifted = dawson_plemelj(&grid, |x| numerics::dawson(x + 1e-7));
    assert!(shifted.iter().all(|c| !c.passed));
}

#[test]
fn very_coarse_grid_breaks_parseval() {
    let grid = Grid::shared(8.0, 16).unwrap();
    assert!(matches!(
        parseval_error_at(&grid, 7, 0.8, 4),
        Err(Error::Unresolved { .. })
    ));
    let (p, r) = parseval_error_at(&grid, 7, 2.5, 4).unwrap();
    assert!(p.max(r) > 1e-6, "{p:e} {r:e}");
}

#[test]
fn wrong_root_is_rejected_by_the_determinant() {
    let grid = Grid::standard();
    let l = dispersion::lambda_star(0.8, &grid).unwrap().value().unwrap();
    let off = dispersion::omega(Complex64::new(l + 1e-6, 0.0), 0.8, &grid).unwrap();
    assert!(off.norm() > 1e-10);
    assert!(dispersion::implicit_residual(l + 1e-6, 0.8).unwrap() > 1e-10);
}

#[test]
fn resonance_is_refused_without_opt_in() {
    let grid = Grid::standard();
    let f = random_smooth(&grid, 3);
    let xi = numerics::SQRT_PI;
    assert!(matches!(gft::decompose(xi, &f), Err(Error::Resonance { .. })));
    let c = gft::resonance::projection_coefficient(xi, &f).unwrap();
    assert!(c.is_finite());
}

#[test]
fn selected_criteria_run_individually() {
    let settings = Settings::default();
    for id in [1, 4, 7] {
        let r = acceptance::run(id, &settings).unwrap();
        assert!(r.passed, "{r}");
    }
}

/// `B e1` is expected to vanish on the continuous spectrum; reported only.
#[test]
fn continuous_transform_of_eigenfunction_report() {
    let grid = Grid::standard();
    for xi in [0.4, -1.0, 1.5] {
        let m = Mode::new(xi, &grid).unwrap().unwrap();
        let b = gft::forward_b(xi, &m.e1).unwrap();
        println!("xi = {xi}: max |B e1| = {:.3e}", b.max_abs());
        assert!(b.is_finite());
    }
}

/// Growth of the discrete projector toward resonance; reported only.
#[test]
fn projector_growth_report() {
    let grid = Grid::standard();
    for xi in [0.5, 1.0, 1.3, 1.5, 1.6, 1.65, 1.7] {
        let m = Mode::new(xi, &grid).unwrap().unwrap();
        println!(
            "xi = {xi}: |P| = {:.4e}, sqrt(pi) - xi = {:.3e}",
            m.projector_norm(),
            SQRT_PI - xi
        );
        assert!(m.projector_norm().is_finite());
    }
}
