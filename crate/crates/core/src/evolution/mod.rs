//! Time evolution of one Fourier mode `∂_t f = L_ξ f`.
//!
//! Two independent propagators: the spectral formula
//!
//! ```text
//! f(t) = e^{−t} 𝒰*_ξ(e^{−iξλt} ℬ_ξ f0) + e^{λ* t} P(ξ) f0
//! ```
//!
//! and classical RK4 on the grid ODE, which serves as the arbiter when the
//! two disagree. The discrete-mode part `e^{λ* t} P(ξ) f0` is the grossly
//! determined solution.

mod modes;
mod report;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::is_resonant;
use crate::error::{Error, Result};
use crate::gft;
use crate::numerics::{l2w_norm, GridFunction, SQRT_PI};
use crate::spectral::Mode;

pub use modes::{aggregate_norm, fourier_modes, SobolevWeight};
pub use report::{
    chapman_enskog_gap, contraction_check, decay_report, AggregateDecay, ChapmanEnskogReport,
    ContractionReport, DecayReport, GapPoint, ModeContraction, ModeDecay,
};

pub const DEFAULT_DT: f64 = 0.01;
/// Largest accepted Richardson error estimate per unit time.
pub const RICHARDSON_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Direct,
    Both,
}

/// Frequencies, output times and integrator settings for an evolution run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionConfig {
    pub xi_list: Vec<f64>,
    /// Increasing, nonnegative.
    pub times: Vec<f64>,
    pub dt: f64,
    pub method: Method,
    /// Allow `|ξ| = √π`; such modes are evolved by the direct integrator
    /// only and excluded from rate fits.
    pub experimental_resonance: bool,
    /// `ξ₀` of the truncated grossly determined solution used for the
    /// aggregate rate; `None` compares against the full one.
    pub gds_cutoff: Option<f64>,
    /// `ε` in the aggregate bound `rate ≤ λ*(ξ₀) + ε`.
    pub rate_slack: f64,
    /// Fit window; `None` means `[T/2, T]` with `T` the last time.
    pub tail_window: Option<(f64, f64)>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            xi_list: vec![0.25, 0.8, 1.5, 2.5],
            times: (0..=24).map(|k| 0.25 * k as f64).collect(),
            dt: DEFAULT_DT,
            method: Method::Both,
            experimental_resonance: false,
            gds_cutoff: None,
            rate_slack: 0.05,
            tail_window: None,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.xi_list.is_empty() {
            return bad("xi_list is empty".into());
        }
        if let Some(x) = self.xi_list.iter().find(|x| !x.is_finite()) {
            return bad(format!("non-finite frequency {x}"));
        }
        if !self.experimental_resonance {
            if let Some(&xi) = self.xi_list.iter().find(|&&x| is_resonant(x)) {
                return Err(Error::Resonance { xi });
            }
        }
        if self.times.is_empty() {
            return bad("times is empty".into());
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("times must be finite and nonnegative".into());
        }
        if self.times.windows(2).any(|p| p[1] <= p[0]) {
            return bad("times must be strictly increasing".into());
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if let Some(c) = self.gds_cutoff {
            if !(c > 0.0 && c < SQRT_PI) {
                return bad(format!("gds cutoff must lie in (0, sqrt(pi)), got {c}"));
            }
        }
        if !(self.rate_slack.is_finite() && self.rate_slack >= 0.0) {
            return bad(format!("rate slack must be nonnegative, got {}", self.rate_slack));
        }
        if let Some((a, b)) = self.tail_window {
            if a >= b || a.is_nan() || b.is_nan() {
                return bad(format!("empty tail window [{a}, {b}]"));
            }
        }
        Ok(())
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn window(&self) -> (f64, f64) {
        self.tail_window.unwrap_or_else(|| {
            let t = self.final_time();
            (0.5 * t, t)
        })
    }
}

/// Spectral propagator for one `(ξ, f0)`: the transforms are computed once
/// and each time costs one application of `𝒰*_ξ`.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    xi: f64,
    amplitudes: gft::SpectralAmplitudes,
    lambda_star: Option<f64>,
}

impl SpectralPropagator {
    pub fn new(xi: f64, f0: &GridFunction) -> Result<Self> {
        if is_resonant(xi) {
            return Err(Error::Resonance { xi });
        }
        let mode = Mode::new(xi, f0.grid())?;
        let amplitudes = gft::decompose_with(xi, f0, mode.as_ref())?;
        Ok(Self {
            xi,
            amplitudes,
            lambda_star: mode.map(|m| m.lambda_star),
        })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn lambda_star(&self) -> Option<f64> {
        self.lambda_star
    }

    pub fn amplitudes(&self) -> &gft::SpectralAmplitudes {
        &self.amplitudes
    }

    fn check_time(t: f64) -> Result<()> {
        if t.is_finite() && t >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("time must be nonnegative, got {t}")))
        }
    }

    /// `e^{(−1 − iξλ) t} (ℬ_ξ f0)(λ)`
    pub fn continuous_amplitude(&self, t: f64) -> Result<GridFunction> {
        Self::check_time(t)?;
        let xi = self.xi;
        Ok(self
            .amplitudes
            .continuous
            .map(|l, c| c * Complex64::new(-t, -xi * l * t).exp()))
    }

    /// `e^{λ* t} P(ξ) f0`, zero without a discrete mode.
    pub fn discrete_part(&self, t: f64) -> Result<GridFunction> {
        Self::check_time(t)?;
        let grid = self.amplitudes.continuous.grid();
        Ok(match (&self.amplitudes.eigenmode, self.lambda_star) {
            (Some(e1), Some(l)) => e1.scale(self.amplitudes.discrete * (l * t).exp()),
            _ => GridFunction::zeros(grid),
        })
    }

    /// `f(t)` in the velocity representation.
    pub fn at(&self, t: f64) -> Result<GridFunction> {
        let continuous = gft::adjoint_u(self.xi, &self.continuous_amplitude(t)?)?;
        continuous.add(&self.discrete_part(t)?)
    }
}

pub fn propagate_spectral(xi: f64, f0: &GridFunction, t: f64) -> Result<GridFunction> {
    SpectralPropagator::new(xi, f0)?.at(t)
}

/// Direct-integrator output at one time.
#[derive(Clone, Debug)]
pub struct DirectSolution {
    pub t: f64,
    /// RK4 solution with the requested step.
    pub f: GridFunction,
    /// `(16/15) ‖f_dt − f_{dt/2}‖_{L²_w}`
    pub error_estimate: f64,
}

/// Classical RK4 for `df/dt = −(1 + ivξ) f + (f, 1)_w` on the grid.
struct Rk4 {
    decay: Vec<Complex64>,
    quadrature: Vec<f64>,
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
}

impl Rk4 {
    fn new(xi: f64, f0: &GridFunction) -> Self {
        let grid = f0.grid();
        let n = grid.len();
        let zero = vec![Complex64::new(0.0, 0.0); n];
        Self {
            decay: grid.nodes().iter().map(|&v| -Complex64::new(1.0, v * xi)).collect(),
            quadrature: grid.weights().iter().map(|&w| w * grid.spacing()).collect(),
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            stage: zero,
        }
    }

    fn rhs(decay: &[Complex64], quadrature: &[f64], f: &[Complex64], out: &mut [Complex64]) {
        let mass: Complex64 = f.iter().zip(quadrature).map(|(c, &w)| c * w).sum();
        for ((o, &a), &c) in out.iter_mut().zip(decay).zip(f) {
            *o = a * c + mass;
        }
    }

    fn step(&mut self, f: &mut [Complex64], h: f64) {
        let Self {
            decay,
            quadrature,
            k,
            stage,
        } = self;
        let [k1, k2, k3, k4] = k;
        Self::rhs(decay, quadrature, f, k1);
        for ((s, &x), &d) in stage.iter_mut().zip(f.iter()).zip(k1.iter()) {
            *s = x + 0.5 * h * d;
        }
        Self::rhs(decay, quadrature, stage, k2);
        for ((s, &x), &d) in stage.iter_mut().zip(f.iter()).zip(k2.iter()) {
            *s = x + 0.5 * h * d;
        }
        Self::rhs(decay, quadrature, stage, k3);
        for ((s, &x), &d) in stage.iter_mut().zip(f.iter()).zip(k3.iter()) {
            *s = x + h * d;
        }
        Self::rhs(decay, quadrature, stage, k4);
        for (j, x) in f.iter_mut().enumerate() {
            *x += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }

    /// Snapshots at `times` using steps no longer than `dt`.
    fn run(xi: f64, f0: &GridFunction, times: &[f64], dt: f64) -> Vec<Vec<Complex64>> {
        let mut stepper = Rk4::new(xi, f0);
        let mut f = f0.values().to_vec();
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let span = t - now;
            if span > 0.0 {
                let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
                let h = span / steps as f64;
                for _ in 0..steps {
                    stepper.step(&mut f, h);
                }
            }
            now = t;
            out.push(f.clone());
        }
        out
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::InvalidArgument(
            "times must be finite, nonnegative and sorted".into(),
        ));
    }
    Ok(())
}

/// RK4 snapshots at sorted `times`, each with a step-halving error
/// estimate. Fails when the estimate exceeds [`RICHARDSON_LIMIT`] per unit
/// time.
pub fn propagate_direct_series(
    xi: f64,
    f0: &GridFunction,
    times: &[f64],
    dt: f64,
) -> Result<Vec<DirectSolution>> {
    check_times(times)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let (coarse, fine) = rayon::join(
        || Rk4::run(xi, f0, times, dt),
        || Rk4::run(xi, f0, times, 0.5 * dt),
    );
    let grid = f0.grid();
    times
        .iter()
        .zip(coarse.into_iter().zip(fine))
        .map(|(&t, (c, h))| {
            let c = GridFunction::from_values(grid, c)
                .map_err(|_| Error::StepRejected(format!("non-finite state at t = {t}")))?;
            let h = GridFunction::from_values(grid, h)
                .map_err(|_| Error::StepRejected(format!("non-finite state at t = {t}")))?;
            let error_estimate = 16.0 / 15.0 * l2w_norm(&c.sub(&h)?);
            if t > 0.0 && error_estimate / t > RICHARDSON_LIMIT {
                return Err(Error::StepRejected(format!(
                    "Richardson estimate {:e} per unit time at t = {t} exceeds {RICHARDSON_LIMIT:e}; reduce dt = {dt}",
                    error_estimate / t
                )));
            }
            Ok(DirectSolution {
                t,
                f: c,
                error_estimate,
            })
        })
        .collect()
}

pub fn propagate_direct(xi: f64, f0: &GridFunction, t: f64, dt: f64) -> Result<DirectSolution> {
    let mut out = propagate_direct_series(xi, f0, &[t], dt)?;
    Ok(out.remove(0))
}

/// `μ̂₀(ξ) = (f0, ē₁)_w / ω′`, zero outside `[−√π, √π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GdsCoefficient {
    pub xi: f64,
    pub mu0: Complex64,
}

pub fn gds_coefficient(xi: f64, f0: &GridFunction) -> Result<GdsCoefficient> {
    let mu0 = match Mode::new(xi, f0.grid())? {
        Some(m) => m.coefficient(f0)?,
        None => Complex64::new(0.0, 0.0),
    };
    Ok(GdsCoefficient { xi, mu0 })
}

/// Grossly determined solution `e^{λ*(ξ) t} μ̂₀(ξ) e₁`, zero for `|ξ| > √π`.
pub fn gds(xi: f64, f0: &GridFunction, t: f64) -> Result<GridFunction> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be nonnegative, got {t}")));
    }
    Ok(match Mode::new(xi, f0.grid())? {
        Some(m) => m.e1.scale(m.coefficient(f0)? * (m.lambda_star * t).exp()),
        None => GridFunction::zeros(f0.grid()),
    })
}

/// `gds` for `|ξ| ≤ ξ₀`, zero otherwise.
pub fn gds_truncated(xi: f64, xi0: f64, f0: &GridFunction, t: f64) -> Result<GridFunction> {
    if !(xi0 > 0.0 && xi0 < SQRT_PI) {
        return Err(Error::InvalidArgument(format!(
            "cutoff must lie in (0, sqrt(pi)), got {xi0}"
        )));
    }
    if xi.abs() <= xi0 {
        gds(xi, f0, t)
    } else {
        Ok(GridFunction::zeros(f0.grid()))
    }
}
