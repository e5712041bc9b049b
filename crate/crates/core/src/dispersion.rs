//! The determinant `ω(λ, ξ) = 1 − ∫ w(v) / (ivξ + 1 + λ) dv`, its boundary
//! values on the essential line `Re λ = −1`, and the discrete eigenvalue
//! curve `λ*(ξ)`.
//!
//! `λ*` is computed four ways that check one another: a bracketed root of
//! `ω(·, ξ)` on the velocity grid, the implicit erf equation, the even power
//! series about `ξ = 0`, and transport along the first-order ODE satisfied by
//! the curve.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::special::{cauchy_weight, dawson, erf, erfc, faddeeva, SQRT_PI};
use crate::numerics::{Grid, Side};

/// `omega` refuses points closer than this to the essential line.
pub const ESSENTIAL_LINE_GAP: f64 = 1e-3;
/// Left end of the root bracket is `−1 + ROOT_BRACKET_OFFSET`.
pub const ROOT_BRACKET_OFFSET: f64 = 1e-8;
/// Target `|ω(λ*, ξ)|` for the root finder.
pub const ROOT_RESIDUAL: f64 = 1e-12;
/// The series for `λ*` is asymptotic; outside this range it is not trusted.
pub const SERIES_RANGE: f64 = 0.5;
pub const SERIES_MAX_TERMS: usize = 32;
/// Frequencies within this distance of `±√π` are treated as resonant.
pub const RESONANCE_ZONE: f64 = 1e-6;
/// Step of the classical RK4 transport of `λ*` along the curve ODE.
pub const ODE_STEP: f64 = 1e-4;
/// Trapezoid quadrature of `ω` is used while the pole of the integrand
/// stays this many grid spacings away from the real `v` axis; closer in, the
/// integral is evaluated through the Faddeeva function.
pub(crate) const QUADRATURE_POLE_CLEARANCE: f64 = 8.0;

/// Classification of `ξ` relative to the discrete spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LambdaStar {
    /// `|ξ| < √π`: the isolated eigenvalue in `(−1, 0]`.
    Eigenvalue(f64),
    /// `|ξ| = √π` (within [`RESONANCE_ZONE`]): the eigenvalue has reached the
    /// essential line; the limit value `−1` is reported.
    Resonant,
    /// `|ξ| > √π`: no discrete spectrum.
    Absent,
}

impl LambdaStar {
    pub fn value(self) -> Option<f64> {
        match self {
            LambdaStar::Eigenvalue(l) => Some(l),
            LambdaStar::Resonant | LambdaStar::Absent => None,
        }
    }

    /// Value for reporting: the eigenvalue, or the limit `−1` at resonance.
    pub fn limit_value(self) -> Option<f64> {
        match self {
            LambdaStar::Eigenvalue(l) => Some(l),
            LambdaStar::Resonant => Some(-1.0),
            LambdaStar::Absent => None,
        }
    }

    pub fn flag(self) -> &'static str {
        match self {
            LambdaStar::Eigenvalue(_) => "eigenvalue",
            LambdaStar::Resonant => "boundary",
            LambdaStar::Absent => "none",
        }
    }
}

/// Which of the four routes to `λ*` a residual belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Root,
    Implicit,
    Series,
    Ode,
}

/// Per-frequency summary of the discrete spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub xi: f64,
    pub lambda_star: LambdaStar,
    /// `∂_λ ω(λ*, ξ)`; `2/π` at resonance (boundary value), absent otherwise.
    pub omega_prime: Option<f64>,
    pub route_residuals: BTreeMap<Route, f64>,
}

pub fn is_resonant(xi: f64) -> bool {
    (xi.abs() - SQRT_PI).abs() < RESONANCE_ZONE
}

/// `∫ w(v) / (ivξ + 1 + λ) dv`, the moment `1 − ω`.
fn resolvent_moment(lambda: Complex64, xi: f64, grid: &Grid) -> Complex64 {
    let a = lambda + 1.0;
    let pole_distance = a.re.abs() / xi.abs();
    if pole_distance >= QUADRATURE_POLE_CLEARANCE * grid.spacing() {
        let ixi = Complex64::new(0.0, xi);
        grid.integrate_weighted(grid.nodes().iter().map(|&v| 1.0 / (ixi * v + a)))
    } else {
        // ∫ w / (a + i|ξ|v) dv = (√π/|ξ|) W(i a/|ξ|) for Re a > 0 and
        // −(√π/|ξ|) W(−i a/|ξ|) for Re a < 0; ω is even in ξ.
        let s = xi.abs();
        let z = Complex64::i() * a / s;
        if a.re > 0.0 {
            faddeeva(z) * (SQRT_PI / s)
        } else {
            -faddeeva(-z) * (SQRT_PI / s)
        }
    }
}

/// The Birman–Schwinger determinant `ω(λ, ξ)`.
///
/// Evaluated by trapezoid quadrature on the velocity grid while the pole of
/// the integrand is well separated from the real axis, and through the
/// Faddeeva function otherwise. `ξ = 0` uses `1 − 1/(1 + λ)`.
pub fn omega(lambda: Complex64, xi: f64, grid: &Grid) -> Result<Complex64> {
    if (lambda.re + 1.0).abs() < ESSENTIAL_LINE_GAP {
        return Err(Error::EssentialLine {
            lambda,
            tolerance: ESSENTIAL_LINE_GAP,
        });
    }
    Ok(omega_unchecked(lambda, xi, grid))
}

/// `omega` without the essential-line guard, for the root bracket and for
/// limits taken towards the line.
pub fn omega_unchecked(lambda: Complex64, xi: f64, grid: &Grid) -> Complex64 {
    if xi == 0.0 {
        return 1.0 - 1.0 / (1.0 + lambda);
    }
    1.0 - resolvent_moment(lambda, xi, grid)
}

fn omega_real(lambda: f64, xi: f64, grid: &Grid) -> f64 {
    omega_unchecked(Complex64::new(lambda, 0.0), xi, grid).re
}

fn boundary_side(xi: f64) -> Result<Side> {
    if xi == 0.0 {
        Err(Error::ZeroFrequency)
    } else {
        Ok(Side::of(xi))
    }
}

/// Boundary value `ω_+(−1 − iλξ, ξ)`, the limit of `ω` from `Re λ > −1`.
///
/// Closed form: `1 − S_{sgn ξ} w(λ) / (iξ)` with `S_± w = −2D(λ) ± iπ w(λ)`,
/// equivalently `−iξ ω_+ = −2D(λ) − i(ξ − sgn(ξ) √π e^{−λ²})`.
pub fn omega_plus(lambda_real: f64, xi: f64) -> Result<Complex64> {
    let side = boundary_side(xi)?;
    Ok(1.0 - cauchy_weight(lambda_real, side.sign()) / Complex64::new(0.0, xi))
}

/// Boundary value `ω_−(−1 + iλξ, −ξ)`, the limit of `ω(·, −ξ)` from
/// `Re λ < −1`.
///
/// Closed form: `1 + S_{sgn ξ} w(λ) / (iξ)`, equivalently
/// `−iξ conj(ω_−) = −2D(λ) − i(ξ + sgn(ξ) √π e^{−λ²})`.
pub fn omega_minus(lambda_real: f64, xi: f64) -> Result<Complex64> {
    let side = boundary_side(xi)?;
    Ok(1.0 + cauchy_weight(lambda_real, side.sign()) / Complex64::new(0.0, xi))
}

/// `∂_λ ω` at the boundary point `−1 − iλξ`, from the closed form of
/// `ω_+` and `D' = 1 − 2xD`.
pub fn omega_plus_prime(lambda_real: f64, xi: f64) -> Result<Complex64> {
    let side = boundary_side(xi)?;
    let l = lambda_real;
    let d_prime = 1.0 - 2.0 * l * dawson(l);
    // d/dλ_b of S w(λ_b) = −2D' ∓ 2iπ λ_b w(λ_b)
    let ds = Complex64::new(
        -2.0 * d_prime,
        -side.sign() * 2.0 * PI * l * crate::numerics::weight(l),
    );
    let ixi = Complex64::new(0.0, xi);
    // λ = −1 − iλ_b ξ, so d/dλ = (d/dλ_b) / (−iξ).
    Ok((-ds / ixi) / (-ixi))
}

/// `∂_λ ω(λ, ξ) = 2 (1 − (1 + λ)(1 − ω)) / ξ²` for real `λ ≠ −1`, `ξ ≠ 0`.
pub fn omega_prime_lambda(lambda: f64, xi: f64, grid: &Grid) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let w = omega(Complex64::new(lambda, 0.0), xi, grid)?.re;
    Ok(2.0 * (1.0 - (1.0 + lambda) * (1.0 - w)) / (xi * xi))
}

fn omega_prime_unchecked(lambda: f64, xi: f64, grid: &Grid) -> f64 {
    let w = omega_real(lambda, xi, grid);
    2.0 * (1.0 - (1.0 + lambda) * (1.0 - w)) / (xi * xi)
}

/// The discrete eigenvalue `λ*(ξ)`, by bisection on `(−1 + δ, 0]` followed by
/// Newton steps with the analytic `∂_λ ω`.
pub fn lambda_star(xi: f64, grid: &Grid) -> Result<LambdaStar> {
    if !xi.is_finite() {
        return Err(Error::InvalidArgument(format!("xi must be finite, got {xi}")));
    }
    if is_resonant(xi) {
        return Ok(LambdaStar::Resonant);
    }
    if xi.abs() > SQRT_PI {
        return Ok(LambdaStar::Absent);
    }
    if xi == 0.0 {
        return Ok(LambdaStar::Eigenvalue(0.0));
    }
    let mut lo = -1.0 + ROOT_BRACKET_OFFSET;
    let mut hi = 0.0;
    let f_lo = omega_real(lo, xi, grid);
    let f_hi = omega_real(hi, xi, grid);
    if f_hi.abs() < ROOT_RESIDUAL * 1e-3 {
        return Ok(LambdaStar::Eigenvalue(0.0));
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Bracket {
            xi,
            reason: format!("omega(-1+delta) = {f_lo:e}, omega(0) = {f_hi:e}"),
        });
    }
    // ω is increasing in λ on the bracket.
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if omega_real(mid, xi, grid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 * (1.0 + hi.abs()) {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let f = omega_real(x, xi, grid);
        let fp = omega_prime_unchecked(x, xi, grid);
        let mut next = x - f / fp;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if omega_real(next, xi, grid) < 0.0 {
            lo = lo.max(next);
        } else {
            hi = hi.min(next);
        }
        let step = (next - x).abs();
        x = next;
        if step < 1e-16 * (1.0 + x.abs()) && omega_real(x, xi, grid).abs() < ROOT_RESIDUAL {
            break;
        }
        if omega_real(x, xi, grid).abs() < 1e-3 * ROOT_RESIDUAL {
            break;
        }
    }
    let residual = omega_real(x, xi, grid).abs();
    if residual >= ROOT_RESIDUAL {
        return Err(Error::Bracket {
            xi,
            reason: format!("Newton stalled at lambda = {x}, |omega| = {residual:e}"),
        });
    }
    Ok(LambdaStar::Eigenvalue(x))
}

/// `|e^{−z²} − (√π/ξ)(sgn ξ − erf z)|` with `z = (λ + 1)/ξ`.
///
/// `sgn ξ − erf z` is evaluated as `erfc(|z|)` with the matching sign so
/// that no cancellation occurs for large `|z|`.
pub fn implicit_residual(lambda: f64, xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let z = (lambda + 1.0) / xi;
    let sgn_minus_erf = if z * xi.signum() >= 0.0 {
        xi.signum() * erfc(z.abs())
    } else {
        xi.signum() - erf(z)
    };
    Ok(((-z * z).exp() - SQRT_PI / xi * sgn_minus_erf).abs())
}

/// Coefficients `a_2, a_4, …, a_{2J}` of `λ* = Σ a_{2j} ξ^{2j}` from
/// `a_2 = −1/2`, `a_{2j} = Σ_{r=1}^{j−1} (2r − 1) a_{2r} a_{2(j−r)}`.
///
/// Entry `j − 1` holds `a_{2j}`.
pub fn series_coefficients(terms: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(terms);
    for j in 1..=terms {
        if j == 1 {
            a.push(-0.5);
            continue;
        }
        let next = (1..j)
            .map(|r| (2 * r - 1) as f64 * a[r - 1] * a[j - r - 1])
            .sum();
        a.push(next);
    }
    a
}

/// Partial sum `Σ_{j=1}^{J} a_{2j} ξ^{2j}`.
///
/// The coefficients grow factorially, so this is an asymptotic expansion:
/// beyond `|ξ| = 0.5` a warning is logged and the value should not be
/// trusted.
pub fn lambda_star_series(xi: f64, terms: usize) -> Result<f64> {
    if terms == 0 || terms > SERIES_MAX_TERMS {
        return Err(Error::InvalidArgument(format!(
            "series terms must be in 1..={SERIES_MAX_TERMS}, got {terms}"
        )));
    }
    if xi.abs() > SERIES_RANGE {
        log::warn!("lambda* series evaluated at |xi| = {} outside |xi| <= {SERIES_RANGE}", xi.abs());
    }
    let s = xi * xi;
    let coefficients = series_coefficients(terms);
    // Horner in s, then one more factor of s.
    let sum = coefficients.iter().rev().fold(0.0, |acc, &a| acc * s + a);
    Ok(sum * s)
}

/// Partial sum truncated just before the smallest term, the best the
/// asymptotic series can do at this `ξ`.
pub fn lambda_star_series_optimal(xi: f64) -> (f64, usize) {
    let s = xi * xi;
    let coefficients = series_coefficients(SERIES_MAX_TERMS);
    let mut sum = 0.0;
    let mut power = 1.0;
    let mut previous = f64::INFINITY;
    let mut used = 0;
    for a in coefficients {
        power *= s;
        let term = a * power;
        if term.abs() >= previous {
            break;
        }
        sum += term;
        previous = term.abs();
        used += 1;
    }
    (sum, used)
}

/// Right side of `dλ*/dξ = ξ/(2λ*) + λ*/ξ + 1/ξ`.
pub fn lambda_star_slope(xi: f64, lambda: f64) -> f64 {
    xi / (2.0 * lambda) + lambda / xi + 1.0 / xi
}

/// Integrate the curve ODE by classical RK4 with step `1e-4` from
/// `(ξ_start, λ*(ξ_start))` and return the largest deviation from the root
/// finder, sampled every 100 steps and at the end point.
pub fn lambda_star_ode_check(xi_start: f64, xi_end: f64, grid: &Grid) -> Result<f64> {
    if !(xi_start > 0.0 && xi_start <= xi_end && xi_end < SQRT_PI) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < xi_start <= xi_end < sqrt(pi), got [{xi_start}, {xi_end}]"
        )));
    }
    let root = |xi: f64| -> Result<f64> {
        lambda_star(xi, grid)?.value().ok_or_else(|| Error::Bracket {
            xi,
            reason: "no eigenvalue".into(),
        })
    };
    let mut lambda = root(xi_start)?;
    if xi_end == xi_start {
        return Ok(0.0);
    }
    let steps = ((xi_end - xi_start) / ODE_STEP).ceil() as usize;
    let h = (xi_end - xi_start) / steps as f64;
    let mut deviation: f64 = 0.0;
    for k in 0..steps {
        let xi = xi_start + k as f64 * h;
        let k1 = lambda_star_slope(xi, lambda);
        let k2 = lambda_star_slope(xi + 0.5 * h, lambda + 0.5 * h * k1);
        let k3 = lambda_star_slope(xi + 0.5 * h, lambda + 0.5 * h * k2);
        let k4 = lambda_star_slope(xi + h, lambda + h * k3);
        lambda += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !lambda.is_finite() || lambda <= -1.0 || lambda >= 0.0 {
            return Err(Error::StepRejected(format!(
                "lambda* transport left (-1, 0) at xi = {}",
                xi + h
            )));
        }
        if (k + 1) % 100 == 0 || k + 1 == steps {
            deviation = deviation.max((lambda - root(xi + h)?).abs());
        }
    }
    Ok(deviation)
}

/// Centered-difference residual of `∂_τ ω = −(1/4) ∂_λλ ω` with `ξ = √τ`.
pub fn heat_residual(lambda: f64, tau: f64, grid: &Grid) -> Result<f64> {
    heat_residual_with_step(lambda, tau, 1e-4, grid)
}

pub fn heat_residual_with_step(lambda: f64, tau: f64, step: f64, grid: &Grid) -> Result<f64> {
    if lambda <= -1.0 + 1e-2 || tau < 1e-2 {
        return Err(Error::InvalidArgument(format!(
            "heat residual needs lambda > -0.99 and tau >= 0.01, got ({lambda}, {tau})"
        )));
    }
    let om = |l: f64, t: f64| omega_real(l, t.sqrt(), grid);
    let d_tau = (om(lambda, tau + step) - om(lambda, tau - step)) / (2.0 * step);
    let d_ll = (om(lambda + step, tau) - 2.0 * om(lambda, tau) + om(lambda - step, tau))
        / (step * step);
    Ok((d_tau + 0.25 * d_ll).abs())
}

/// Centered-difference residual of
/// `dω/dξ + (1/ξ + 2(1+λ)²/ξ³) ω = 1/ξ + 2λ(1+λ)/ξ³`.
pub fn omega_xi_ode_residual(lambda: f64, xi: f64, grid: &Grid) -> Result<f64> {
    omega_xi_ode_residual_with_step(lambda, xi, 1e-4, grid)
}

pub fn omega_xi_ode_residual_with_step(
    lambda: f64,
    xi: f64,
    step: f64,
    grid: &Grid,
) -> Result<f64> {
    if lambda <= -1.0 || xi < 0.1 {
        return Err(Error::InvalidArgument(format!(
            "xi-ODE residual needs lambda > -1 and xi >= 0.1, got ({lambda}, {xi})"
        )));
    }
    let a = 1.0 + lambda;
    let om = |x: f64| omega_real(lambda, x, grid);
    let d_xi = (om(xi + step) - om(xi - step)) / (2.0 * step);
    let xi3 = xi * xi * xi;
    let lhs = d_xi + (1.0 / xi + 2.0 * a * a / xi3) * om(xi);
    let rhs = 1.0 / xi + 2.0 * lambda * a / xi3;
    Ok((lhs - rhs).abs())
}

/// `λ*(ξ)` with the per-route residuals and `∂_λ ω` at the root.
pub fn dispersion_point(xi: f64, grid: &Grid) -> Result<DispersionPoint> {
    let lambda_star = lambda_star(xi, grid)?;
    let mut route_residuals = BTreeMap::new();
    let omega_prime = match lambda_star {
        LambdaStar::Eigenvalue(l) => {
            route_residuals.insert(Route::Root, omega_real(l, xi, grid).abs());
            if xi != 0.0 {
                route_residuals.insert(Route::Implicit, implicit_residual(l, xi)?);
                if xi.abs() <= SERIES_RANGE {
                    let (series, _) = lambda_star_series_optimal(xi);
                    route_residuals.insert(Route::Series, (series - l).abs());
                }
                Some(omega_prime_unchecked(l, xi, grid))
            } else {
                Some(1.0)
            }
        }
        LambdaStar::Resonant => Some(omega_plus_prime(0.0, xi)?.re),
        LambdaStar::Absent => None,
    };
    Ok(DispersionPoint {
        xi,
        lambda_star,
        omega_prime,
        route_residuals,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn grid() -> Arc<Grid> {
        Grid::standard()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn root(xi: f64, g: &Grid) -> f64 {
        lambda_star(xi, g).unwrap().value().unwrap()
    }

    #[test]
    fn omega_examples() {
        let g = grid();
        assert!((omega(c(1.0, 0.0), 0.0, &g).unwrap() - 0.5).norm() < 1e-15);
        let near_line = omega_unchecked(c(-1.0 + 1e-6, 0.0), 2.0, &g);
        assert!((near_line.re - (1.0 - SQRT_PI / 2.0)).abs() < 1e-4, "{near_line}");
        assert!((omega(c(1e6, 0.0), 1.0, &g).unwrap() - 1.0).norm() < 1e-5);
        assert!(matches!(
            omega(c(-1.0 + 1e-4, 0.3), 1.0, &g),
            Err(Error::EssentialLine { .. })
        ));
    }

    #[test]
    fn omega_real_matches_erfcx_closed_form() {
        // For real λ > −1: ω = 1 − (√π/|ξ|) erfcx((1+λ)/|ξ|).
        let g = grid();
        for &(l, xi) in &[(0.0f64, 0.3f64), (-0.5, 1.2), (2.0, 0.7), (-0.9, 1.7), (0.4, -2.5)] {
            let a: f64 = 1.0 + l;
            let closed = 1.0 - SQRT_PI / xi.abs() * crate::numerics::special::erfcx(a / xi.abs());
            let quad = omega(c(l, 0.0), xi, &g).unwrap();
            assert!((quad.re - closed).abs() < 1e-12, "({l}, {xi})");
            assert!(quad.im.abs() < 1e-14);
        }
    }

    #[test]
    fn quadrature_and_faddeeva_routes_agree() {
        let g = grid();
        let xi = 1.1;
        // A point where both routes are valid.
        let lambda = c(-0.7, 0.4);
        let a = lambda + 1.0;
        let z = Complex64::i() * a / xi;
        let closed = 1.0 - faddeeva(z) * (SQRT_PI / xi);
        assert!((omega(lambda, xi, &g).unwrap() - closed).norm() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry_and_evenness() {
        let g = grid();
        for &lambda in &[c(0.3, 0.8), c(-0.5, -1.7), c(2.0, 0.1)] {
            for &xi in &[0.4, 1.3, 2.2] {
                let a = omega(lambda, xi, &g).unwrap();
                let b = omega(lambda.conj(), xi, &g).unwrap();
                assert!((a.conj() - b).norm() < 1e-10);
                let e = omega(lambda, -xi, &g).unwrap();
                assert!((a - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_values() {
        assert!(omega_plus(0.0, SQRT_PI).unwrap().norm() < 1e-15);
        let p = omega_plus(0.0, 1.0).unwrap();
        assert!((p - c(1.0 - SQRT_PI, 0.0)).norm() < 1e-14);
        let m = omega_minus(0.0, 1.0).unwrap();
        assert!((m - c(1.0 + SQRT_PI, 0.0)).norm() < 1e-14);
        assert_eq!(omega_plus(0.3, 0.0), Err(Error::ZeroFrequency));
        assert_eq!(omega_minus(0.3, 0.0), Err(Error::ZeroFrequency));
    }

    #[test]
    fn boundary_closed_forms_match_the_displayed_identities() {
        for &xi in &[0.6, 1.4, 2.3] {
            for &l in &[-1.3, 0.0, 0.8] {
                let lhs = -Complex64::i() * xi * omega_plus(l, xi).unwrap();
                let rhs = c(-2.0 * dawson(l), -(xi - SQRT_PI * (-l * l).exp()));
                assert!((lhs - rhs).norm() < 1e-14);
                let lhs = -Complex64::i() * xi * omega_minus(l, xi).unwrap().conj();
                let rhs = c(-2.0 * dawson(l), -(xi + SQRT_PI * (-l * l).exp()));
                assert!((lhs - rhs).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn boundary_values_are_limits_from_the_right() {
        // ω(−1 + ε − iλ_b ξ, ξ) → ω_+(λ_b, ξ) with error O(ε).
        let g = grid();
        for &xi in &[0.8, -1.3, 2.4] {
            let lb: f64 = 0.45;
            let target = omega_plus(lb, xi).unwrap();
            let errors: Vec<f64> = [1e-1, 5e-2, 2.5e-2, 1.25e-2, 1e-3]
                .iter()
                .map(|&eps| {
                    let lambda = c(-1.0 + eps, -lb * xi);
                    (omega(lambda, xi, &g).unwrap() - target).norm()
                })
                .collect();
            for pair in errors.windows(2).take(3) {
                let order = (pair[0] / pair[1]).log2();
                assert!(order >= 0.9, "xi = {xi}: {errors:?}");
            }
            assert!(errors[4] < 1e-2);
        }
        // ω_− is the limit of ω(·, −ξ) from Re λ < −1.
        let xi = 0.9;
        let lb = -0.2;
        let lambda = c(-1.0 - 1e-6, lb * xi);
        let approx = omega_unchecked(lambda, -xi, &g);
        assert!((approx - omega_minus(lb, xi).unwrap()).norm() < 1e-5);
    }

    #[test]
    fn derivative_identity_matches_finite_difference() {
        let g = grid();
        let (l, xi) = (1.0, 0.7);
        let h = 1e-5;
        let fd = (omega(c(l + h, 0.0), xi, &g).unwrap().re
            - omega(c(l - h, 0.0), xi, &g).unwrap().re)
            / (2.0 * h);
        assert!((omega_prime_lambda(l, xi, &g).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn derivative_at_root_and_at_resonance() {
        let g = grid();
        let l = root(1.0, &g);
        let d = omega_prime_lambda(l, 1.0, &g).unwrap();
        assert!((d + 2.0 * l).abs() < 1e-8);
        assert!(d > 0.0);
        for xi in [SQRT_PI, -SQRT_PI] {
            let d = omega_plus_prime(0.0, xi).unwrap();
            assert!((d - c(2.0 / PI, 0.0)).norm() < 1e-14, "{d}");
        }
    }

    #[test]
    fn lambda_star_examples() {
        let g = grid();
        assert_eq!(lambda_star(0.0, &g).unwrap(), LambdaStar::Eigenvalue(0.0));
        assert_eq!(lambda_star(2.5, &g).unwrap(), LambdaStar::Absent);
        assert_eq!(lambda_star(SQRT_PI, &g).unwrap(), LambdaStar::Resonant);
        let approach: Vec<f64> = [1.7, 1.77, 1.772].iter().map(|&x| root(x, &g)).collect();
        assert!(approach[0] > approach[1] && approach[1] > approach[2]);
        assert!(approach[2] < -0.99, "{approach:?}");
        let l = root(1.0, &g);
        assert!(implicit_residual(l, 1.0).unwrap() < 1e-10);
    }

    #[test]
    fn lambda_star_is_even_decreasing_and_in_range() {
        let g = grid();
        let mut previous = 0.0;
        for k in 1..35 {
            let xi = 0.05 * k as f64;
            let l = root(xi, &g);
            assert!(l > -1.0 && l <= 0.0);
            assert!(l < previous, "xi = {xi}");
            assert!((root(-xi, &g) - l).abs() < 1e-12);
            assert!(omega_prime_lambda(l, xi, &g).unwrap() > 0.0);
            previous = l;
        }
    }

    #[test]
    fn implicit_residual_examples() {
        let g = grid();
        let l = root(0.5, &g);
        assert!(implicit_residual(l, 0.5).unwrap() < 1e-10);
        assert!(implicit_residual(0.0, 1e-2).unwrap() < 1e-10);
        let at_root = implicit_residual(root(1.7, &g), 1.7).unwrap();
        let off_root = implicit_residual(-0.9, 1.7).unwrap();
        assert!(off_root > at_root);
        let neg = implicit_residual(root(-0.8, &g), -0.8).unwrap();
        assert!(neg < 1e-10);
    }

    #[test]
    fn series_coefficients_from_recursion() {
        let a = series_coefficients(4);
        assert_eq!(a[0], -0.5);
        assert_eq!(a[1], 0.25);
        assert_eq!(a[2], -0.5);
        // a_8 = 3 (2 a_2 a_6 + a_4^2) = 27/16
        assert_eq!(a[3], 27.0 / 16.0);
    }

    #[test]
    fn series_matches_root_for_small_xi() {
        let g = grid();
        let l = root(0.1, &g);
        assert!((lambda_star_series(0.1, 12).unwrap() - l).abs() < 1e-12);
        assert!(lambda_star_series(0.1, 0).is_err());
        assert!(lambda_star_series(0.1, 33).is_err());
    }

    #[test]
    fn ode_transport() {
        let g = grid();
        assert_eq!(lambda_star_ode_check(0.7, 0.7, &g).unwrap(), 0.0);
        let dev = lambda_star_ode_check(0.5, 1.5, &g).unwrap();
        assert!(dev < 1e-6, "{dev:e}");
        let dev = lambda_star_ode_check(0.5, 1.74, &g).unwrap();
        assert!(dev < 1e-4, "{dev:e}");
        assert!(lambda_star_ode_check(0.0, 1.0, &g).is_err());
    }

    #[test]
    fn heat_equation_residual() {
        let g = grid();
        assert!(heat_residual(0.5, 1.0, &g).unwrap() < 1e-4);
        assert!(heat_residual(2.0, 0.25, &g).unwrap() < 1e-4);
        let coarse = heat_residual_with_step(0.5, 1.0, 2e-2, &g).unwrap();
        let fine = heat_residual_with_step(0.5, 1.0, 1e-2, &g).unwrap();
        let ratio = coarse / fine;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn xi_ode_residual() {
        let g = grid();
        assert!(omega_xi_ode_residual(0.5, 1.0, &g).unwrap() < 1e-4);
        assert!(omega_xi_ode_residual(0.0, 0.6, &g).unwrap() < 1e-4);
        let coarse = omega_xi_ode_residual_with_step(0.5, 1.0, 2e-2, &g).unwrap();
        let fine = omega_xi_ode_residual_with_step(0.5, 1.0, 1e-2, &g).unwrap();
        let ratio = coarse / fine;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn omega_matches_integral_form_solution_of_xi_ode() {
        // ω = e^{a²/ξ²}/ξ ∫_0^ξ e^{−a²/s²}(1 + 2λa/s²) ds, a = 1 + λ.
        let g = grid();
        let (l, xi) = (0.5f64, 1.0f64);
        let a = 1.0 + l;
        let integrand = |s: f64| {
            if s == 0.0 {
                0.0
            } else {
                (-a * a / (s * s)).exp() * (1.0 + 2.0 * l * a / (s * s))
            }
        };
        // Composite Simpson; the integrand is flat to all orders at 0.
        let m = 20_000;
        let h = xi / m as f64;
        let mut sum = integrand(0.0) + integrand(xi);
        for k in 1..m {
            let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += weight * integrand(k as f64 * h);
        }
        let integral = sum * h / 3.0;
        let oracle = (a * a / (xi * xi)).exp() / xi * integral;
        let value = omega(c(l, 0.0), xi, &g).unwrap().re;
        assert!((value - oracle).abs() < 1e-6, "{value} vs {oracle}");
    }

    #[test]
    fn dispersion_point_bundles_routes() {
        let g = grid();
        let p = dispersion_point(0.3, &g).unwrap();
        assert!(p.route_residuals[&Route::Root] < 1e-12);
        assert!(p.route_residuals[&Route::Implicit] < 1e-10);
        assert!(p.route_residuals.contains_key(&Route::Series));
        let q = dispersion_point(SQRT_PI, &g).unwrap();
        assert_eq!(q.lambda_star.flag(), "boundary");
        assert!((q.omega_prime.unwrap() - 2.0 / PI).abs() < 1e-14);
        let r = dispersion_point(3.0, &g).unwrap();
        assert_eq!(r.lambda_star, LambdaStar::Absent);
        assert!(r.omega_prime.is_none());
    }
}
