//! Generalized Fourier transforms `ℬ_ξ`, `𝒰_ξ` that diagonalize the
//! continuous part of `L_ξ`, their adjoints, and the expansion
//!
//! ```text
//! f = 𝒰*_ξ ℬ_ξ f + P(ξ) f,
//! (f, g)_w = ∫ (ℬ_ξ f)(λ) conj((𝒰_ξ g)(λ)) w(λ) dλ + (P(ξ) f, g)_w.
//! ```
//!
//! With `σ = −sgn ξ`, on the λ grid:
//!
//! ```text
//! ℬ_ξ f  = f − S_σ(f w) / d_B,    d_B = −iξ conj(ω_−(λ, ξ)) = S_σ w − iξ,
//! 𝒰_ξ g  = g − S_σ(g w) / d_U,    d_U =  iξ conj(ω_+(λ, ξ)) = S_σ w + iξ,
//! ℬ*_ξ h = h + S_σ(h w / conj(d_B)),
//! 𝒰*_ξ h = h + S_σ(h w / conj(d_U)).
//! ```
//!
//! `d_B` never vanishes; `d_U` vanishes at `λ = 0` exactly when
//! `|ξ| = √π`, so `𝒰_ξ` and `𝒰*_ξ` refuse the resonance zone. At `ξ = 0`
//! the transforms reduce to the projection `I − V` onto mean-zero functions.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dispersion::{is_resonant, omega_minus, omega_plus};
use crate::error::{Error, Result};
use crate::numerics::{inner_w, l2w_norm, moment, plemelj, Grid, GridFunction, Side, SQRT_PI};
use crate::spectral::Mode;

/// `min |ω_+|` over the λ grid below which `𝒰_ξ` logs a warning.
pub const NEAR_RESONANCE_WARNING: f64 = 1e-3;

fn side(xi: f64) -> Side {
    Side::of(xi).opposite()
}

fn check_resonance(xi: f64) -> Result<()> {
    if is_resonant(xi) {
        Err(Error::Resonance { xi })
    } else {
        Ok(())
    }
}

fn mean_free(f: &GridFunction) -> GridFunction {
    let mass = moment(f);
    f.map(|_, c| c - mass)
}

/// `d_B(λ) = −iξ conj(ω_−(λ, ξ))` at every node.
fn denominator_b(xi: f64, grid: &Grid) -> Result<Vec<Complex64>> {
    let factor = Complex64::new(0.0, -xi);
    grid.nodes()
        .iter()
        .map(|&l| Ok(factor * omega_minus(l, xi)?.conj()))
        .collect()
}

/// `d_U(λ) = iξ conj(ω_+(λ, ξ))` at every node.
fn denominator_u(xi: f64, grid: &Grid) -> Result<Vec<Complex64>> {
    let factor = Complex64::new(0.0, xi);
    let values: Vec<Complex64> = grid
        .nodes()
        .iter()
        .map(|&l| Ok(factor * omega_plus(l, xi)?.conj()))
        .collect::<Result<_>>()?;
    let smallest = values.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min) / xi.abs();
    if smallest < NEAR_RESONANCE_WARNING {
        log::warn!("xi = {xi} is near resonance: min |omega_+| = {smallest:e}");
    }
    Ok(values)
}

/// `g − S_σ(g w) / d`
fn forward(g: &GridFunction, xi: f64, denominator: &[Complex64]) -> GridFunction {
    let transform = plemelj(&g.weighted(), side(xi));
    let mut out = g.clone();
    out.values_mut()
        .iter_mut()
        .zip(transform.values().iter().zip(denominator))
        .for_each(|(o, (&s, &d))| *o -= s / d);
    out
}

/// `h + S_σ(h w / conj(d))`
fn adjoint(h: &GridFunction, xi: f64, denominator: &[Complex64]) -> GridFunction {
    let mut scaled = h.weighted();
    scaled
        .values_mut()
        .iter_mut()
        .zip(denominator)
        .for_each(|(c, d)| *c /= d.conj());
    let transform = plemelj(&scaled, side(xi));
    h.add(&transform).expect("same grid")
}

/// `(ℬ_ξ f)(λ)` on the λ grid; `(I − V) f` at `ξ = 0`.
pub fn forward_b(xi: f64, f: &GridFunction) -> Result<GridFunction> {
    if xi == 0.0 {
        return Ok(mean_free(f));
    }
    Ok(forward(f, xi, &denominator_b(xi, f.grid())?))
}

/// `(𝒰_ξ g)(λ)` on the λ grid; `(I − V) g` at `ξ = 0`.
pub fn forward_u(xi: f64, g: &GridFunction) -> Result<GridFunction> {
    check_resonance(xi)?;
    if xi == 0.0 {
        return Ok(mean_free(g));
    }
    Ok(forward(g, xi, &denominator_u(xi, g.grid())?))
}

/// `(𝒰*_ξ h)(v)`; `(I − V) h` at `ξ = 0`.
pub fn adjoint_u(xi: f64, h: &GridFunction) -> Result<GridFunction> {
    check_resonance(xi)?;
    if xi == 0.0 {
        return Ok(mean_free(h));
    }
    Ok(adjoint(h, xi, &denominator_u(xi, h.grid())?))
}

/// `(ℬ*_ξ h)(v)`; `(I − V) h` at `ξ = 0`.
pub fn adjoint_b(xi: f64, h: &GridFunction) -> Result<GridFunction> {
    if xi == 0.0 {
        return Ok(mean_free(h));
    }
    Ok(adjoint(h, xi, &denominator_b(xi, h.grid())?))
}

/// Continuous and discrete spectral content of one profile.
#[derive(Clone, Debug)]
pub struct SpectralAmplitudes {
    pub xi: f64,
    /// `ℬ_ξ f` over λ
    pub continuous: GridFunction,
    /// `(f, ē₁)_w / ω′`, zero when there is no discrete mode
    pub discrete: Complex64,
    /// `e₁`, absent for `|ξ| > √π`
    pub eigenmode: Option<GridFunction>,
}

pub fn decompose(xi: f64, f: &GridFunction) -> Result<SpectralAmplitudes> {
    check_resonance(xi)?;
    let mode = Mode::new(xi, f.grid())?;
    decompose_with(xi, f, mode.as_ref())
}

/// `decompose` with a precomputed eigenmode, for repeated use at one `ξ`.
pub fn decompose_with(xi: f64, f: &GridFunction, mode: Option<&Mode>) -> Result<SpectralAmplitudes> {
    check_resonance(xi)?;
    let (discrete, eigenmode) = match mode {
        Some(m) => (m.coefficient(f)?, Some(m.e1.clone())),
        None => (Complex64::new(0.0, 0.0), None),
    };
    Ok(SpectralAmplitudes {
        xi,
        continuous: forward_b(xi, f)?,
        discrete,
        eigenmode,
    })
}

/// `𝒰*_ξ (continuous) + discrete · e₁`.
pub fn reconstruct(s: &SpectralAmplitudes) -> Result<GridFunction> {
    let continuous = adjoint_u(s.xi, &s.continuous)?;
    match &s.eigenmode {
        Some(e1) => continuous.add_scaled(s.discrete, e1),
        None => Ok(continuous),
    }
}

/// `∫ ℬ_ξf · conj(𝒰_ξg) w dλ + (P(ξ) f, g)_w`, which should equal `(f, g)_w`.
pub fn parseval(xi: f64, f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    let s = decompose(xi, f)?;
    parseval_with(&s, g)
}

/// Parseval pairing of precomputed amplitudes of `f` against `g`.
pub fn parseval_with(s: &SpectralAmplitudes, g: &GridFunction) -> Result<Complex64> {
    let ug = forward_u(s.xi, g)?;
    let continuous = inner_w(&s.continuous, &ug)?;
    let discrete = match &s.eigenmode {
        Some(e1) => s.discrete * inner_w(e1, g)?,
        None => Complex64::new(0.0, 0.0),
    };
    Ok(continuous + discrete)
}

/// `‖ℬ_ξ f‖ / ‖f‖` and `‖𝒰_ξ f‖ / ‖f‖`.
pub fn transform_gains(xi: f64, f: &GridFunction) -> Result<(f64, f64)> {
    let norm = l2w_norm(f);
    Ok((
        l2w_norm(&forward_b(xi, f)?) / norm,
        l2w_norm(&forward_u(xi, f)?) / norm,
    ))
}

/// The resonant frequencies `±√π`, where `ω_+(λ, ξ)` vanishes at `λ = 0`.
///
/// Nothing here is part of the `L²_w` pipeline; results are diagnostics.
pub mod resonance {
    use super::*;

    fn check_resonant(xi: f64) -> Result<()> {
        if is_resonant(xi) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "xi = {xi} is not a resonant frequency"
            )))
        }
    }

    /// `λ (𝒰_ξ g)(λ)`, whose removable singularity at `λ = 0` is filled by
    /// the limit `−S_σ(g w)(0) / ∂_λ d_U(0)` with `∂_λ d_U(0) = −2`.
    pub fn lambda_forward_u(xi: f64, g: &GridFunction) -> Result<GridFunction> {
        check_resonant(xi)?;
        let grid = g.grid();
        let factor = Complex64::new(0.0, xi);
        let transform = plemelj(&g.weighted(), side(xi));
        let values = grid
            .nodes()
            .iter()
            .zip(g.values().iter().zip(transform.values()))
            .map(|(&l, (&gv, &s))| {
                let d = factor * omega_plus(l, xi)?.conj();
                Ok(if d.norm() < 1e-12 {
                    s / 2.0
                } else {
                    l * gv - l * s / d
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GridFunction::from_values(grid, values)
    }

    /// Amplitude of `f` along `e₁ = 1/(i sgn(ξ) √π v)`: the limit from inside
    /// `|ξ| < √π` of `(f, ē₁)_w / ω′`, i.e. `S_{sgn ξ}(f w)(0) / (iξ)` divided
    /// by the boundary derivative `∂_λ ω_+ = 2/π`.
    pub fn projection_coefficient(xi: f64, f: &GridFunction) -> Result<Complex64> {
        check_resonant(xi)?;
        let grid = f.grid();
        let boundary = plemelj(&f.weighted(), Side::of(xi)).values()[grid.center()];
        Ok(boundary / Complex64::new(0.0, xi) * (std::f64::consts::PI / 2.0))
    }

    /// `e₁` on the grid with the node `v = 0` set to zero.
    pub fn eigenfunction(xi: f64, grid: &Arc<Grid>) -> GridFunction {
        let s = xi.signum();
        GridFunction::from_fn(grid, |v| {
            if v == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                1.0 / Complex64::new(0.0, s * SQRT_PI * v)
            }
        })
    }
}
