//! Decay, contraction and Chapman–Enskog diagnostics over a set of modes.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::modes::{aggregate_norm, SobolevWeight};
use super::{propagate_direct_series, EvolutionConfig, Method, SpectralPropagator};
use crate::dispersion::{self, is_resonant};
use crate::error::{Error, Result};
use crate::gft;
use crate::numerics::{l2w_norm, linear_fit, norms, Grid, GridFunction, LineFit, SQRT_PI};

/// Fewest samples in the tail window for a rate fit.
pub const MIN_FIT_SAMPLES: usize = 5;
/// Relative tolerance on the per-mode rate `−1`.
pub const RATE_TOLERANCE: f64 = 0.01;
/// Bound on `‖f(t)‖ / ‖f0‖`.
pub const CONTRACTION_BOUND: f64 = 1.0 + 1e-6;

/// Decay of `‖f(t) − g(t)‖` for one frequency, `g` the grossly determined
/// solution.
#[derive(Clone, Debug, Serialize)]
pub struct ModeDecay {
    pub xi: f64,
    pub lambda_star: Option<f64>,
    pub resonant: bool,
    pub times: Vec<f64>,
    /// `‖f(t)‖_{L²_w}`
    pub solution_l2w: Vec<f64>,
    /// `‖f(t) − g(t)‖_{L²_w}`
    pub distance_l2w: Vec<f64>,
    /// `‖f(t) − g(t)‖_{H¹_w}`
    pub distance_h1w: Vec<f64>,
    /// `‖f(t) − g^{ξ₀}(t)‖_{L²_w}` against the truncated solution
    pub truncated_distance_l2w: Vec<f64>,
    /// `‖f_spectral(t) − f_direct(t)‖_{L²_w}` when both propagators ran
    pub propagator_disagreement: Option<Vec<f64>>,
    /// Richardson estimate of the direct integrator
    pub richardson_estimate: Option<Vec<f64>>,
    /// `max_t |‖ℬ_ξ f(t)‖ − e^{−t} ‖ℬ_ξ f0‖|` with `f(t)` from the spectral
    /// propagator, norms over λ
    pub continuous_norm_deviation: Option<f64>,
    /// Least-squares line through `(t, ln ‖f − g‖)` over the tail window
    pub fit: Option<LineFit>,
    pub reference_rate: f64,
    pub rate_tolerance: f64,
    pub rate_passed: Option<bool>,
    /// `‖f − g‖` nonincreasing from the start of the tail window on
    pub monotone_after_transient: bool,
    /// `μ̂₀(ξ)`
    pub gds_mu0: Option<Complex64>,
    /// Projection coefficient at `|ξ| = √π` (experimental path only)
    pub resonant_coefficient: Option<Complex64>,
}

/// Decay of the aggregate `L²(ℝ_ξ)` distance over all modes.
#[derive(Clone, Debug, Serialize)]
pub struct AggregateDecay {
    /// How the per-mode norms are combined.
    pub quadrature: &'static str,
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub h1: Vec<f64>,
    pub h_minus1: Vec<f64>,
    pub gds_cutoff: Option<f64>,
    pub fit: LineFit,
    /// `λ*(ξ₀) + ε` with a cutoff (an upper bound), `−1` without.
    pub reference_rate: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub config: EvolutionConfig,
    pub tail_window: (f64, f64),
    pub transient_window: (f64, f64),
    pub modes: Vec<ModeDecay>,
    pub aggregate: Option<AggregateDecay>,
    /// Largest spectral/direct disagreement over all modes and times.
    pub max_disagreement: Option<f64>,
}

/// `None` when the window holds fewer than [`MIN_FIT_SAMPLES`] samples.
fn fit_tail(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<Option<LineFit>> {
    let (t, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(&t, &v)| t >= window.0 - 1e-12 && t <= window.1 + 1e-12 && v > 0.0)
        .map(|(&t, &v)| (t, v.ln()))
        .unzip();
    if t.len() < MIN_FIT_SAMPLES {
        log::info!(
            "{} samples in the tail window [{}, {}], need {MIN_FIT_SAMPLES}; no rate fit",
            t.len(),
            window.0,
            window.1
        );
        return Ok(None);
    }
    linear_fit(&t, &y).map(Some)
}

fn nonincreasing_after(times: &[f64], values: &[f64], start: f64) -> bool {
    let tail: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= start - 1e-12)
        .map(|(_, &v)| v)
        .collect();
    tail.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-12) + 1e-300)
}

fn mode_decay(config: &EvolutionConfig, xi: f64, f0: &GridFunction) -> Result<ModeDecay> {
    let times = &config.times;
    let window = config.window();
    if is_resonant(xi) {
        let direct = propagate_direct_series(xi, f0, times, config.dt)?;
        return Ok(ModeDecay {
            xi,
            lambda_star: None,
            resonant: true,
            times: times.clone(),
            solution_l2w: direct.iter().map(|s| l2w_norm(&s.f)).collect(),
            distance_l2w: vec![],
            distance_h1w: vec![],
            truncated_distance_l2w: vec![],
            propagator_disagreement: None,
            richardson_estimate: Some(direct.iter().map(|s| s.error_estimate).collect()),
            continuous_norm_deviation: None,
            fit: None,
            reference_rate: -1.0,
            rate_tolerance: RATE_TOLERANCE,
            rate_passed: None,
            monotone_after_transient: false,
            gds_mu0: None,
            resonant_coefficient: Some(gft::resonance::projection_coefficient(xi, f0)?),
        });
    }

    let spectral = SpectralPropagator::new(xi, f0)?;
    let direct = match config.method {
        Method::Spectral => None,
        Method::Direct | Method::Both => Some(propagate_direct_series(xi, f0, times, config.dt)?),
    };
    let initial_continuous = l2w_norm(&spectral.amplitudes().continuous);
    let truncated_away = config.gds_cutoff.is_some_and(|c| xi.abs() > c);

    let mut solution_l2w = Vec::with_capacity(times.len());
    let mut distance_l2w = Vec::with_capacity(times.len());
    let mut distance_h1w = Vec::with_capacity(times.len());
    let mut truncated_distance_l2w = Vec::with_capacity(times.len());
    let mut disagreement = Vec::new();
    let mut continuous_deviation: f64 = 0.0;
    for (k, &t) in times.iter().enumerate() {
        let f_spectral = spectral.at(t)?;
        let continuous = l2w_norm(&gft::forward_b(xi, &f_spectral)?);
        continuous_deviation =
            continuous_deviation.max((continuous - (-t).exp() * initial_continuous).abs());
        let f = match (&direct, config.method) {
            (Some(d), Method::Both) => {
                disagreement.push(l2w_norm(&f_spectral.sub(&d[k].f)?));
                d[k].f.clone()
            }
            (Some(d), _) => d[k].f.clone(),
            (None, _) => f_spectral,
        };
        let g = spectral.discrete_part(t)?;
        let difference = f.sub(&g)?;
        let n = norms(&difference);
        solution_l2w.push(l2w_norm(&f));
        distance_l2w.push(n.l2w);
        distance_h1w.push(n.h1w);
        truncated_distance_l2w.push(if truncated_away { l2w_norm(&f) } else { n.l2w });
    }

    let fit = fit_tail(times, &distance_l2w, window)?;
    let rate_passed = fit.map(|f| (f.slope + 1.0).abs() <= RATE_TOLERANCE);
    Ok(ModeDecay {
        xi,
        lambda_star: spectral.lambda_star(),
        resonant: false,
        times: times.clone(),
        solution_l2w,
        monotone_after_transient: nonincreasing_after(times, &distance_l2w, window.0),
        distance_l2w,
        distance_h1w,
        truncated_distance_l2w,
        propagator_disagreement: (config.method == Method::Both).then_some(disagreement),
        richardson_estimate: direct
            .as_ref()
            .map(|d| d.iter().map(|s| s.error_estimate).collect()),
        continuous_norm_deviation: Some(continuous_deviation),
        fit,
        reference_rate: -1.0,
        rate_tolerance: RATE_TOLERANCE,
        rate_passed,
        gds_mu0: Some(spectral.amplitudes().discrete),
        resonant_coefficient: None,
    })
}

fn aggregate(config: &EvolutionConfig, modes: &[ModeDecay], grid: &Grid) -> Result<Option<AggregateDecay>> {
    let regular: Vec<&ModeDecay> = modes.iter().filter(|m| !m.resonant).collect();
    if regular.len() < 2 {
        return Ok(None);
    }
    let xis: Vec<f64> = regular.iter().map(|m| m.xi).collect();
    let per_time = |k: usize, weight: SobolevWeight| {
        let norms: Vec<f64> = regular
            .iter()
            .map(|m| {
                if config.gds_cutoff.is_some() {
                    m.truncated_distance_l2w[k]
                } else {
                    m.distance_l2w[k]
                }
            })
            .collect();
        aggregate_norm(&xis, &norms, weight)
    };
    let n = config.times.len();
    let l2: Vec<f64> = (0..n).map(|k| per_time(k, SobolevWeight::L2)).collect();
    let h1 = (0..n).map(|k| per_time(k, SobolevWeight::H1)).collect();
    let h_minus1 = (0..n).map(|k| per_time(k, SobolevWeight::HMinus1)).collect();
    let Some(fit) = fit_tail(&config.times, &l2, config.window())? else {
        return Ok(None);
    };
    let (reference_rate, passed) = match config.gds_cutoff {
        Some(xi0) => {
            let lambda = dispersion::lambda_star(xi0, grid)?
                .value()
                .ok_or(Error::Resonance { xi: xi0 })?;
            let reference = lambda + config.rate_slack;
            (reference, fit.slope <= reference)
        }
        None => (-1.0, (fit.slope + 1.0).abs() <= RATE_TOLERANCE),
    };
    Ok(Some(AggregateDecay {
        quadrature: "trapezoid rule over the sorted xi list; H1 and H-1 weight the squared norm by (1 + xi^2)^(+1/-1)",
        times: config.times.clone(),
        l2,
        h1,
        h_minus1,
        gds_cutoff: config.gds_cutoff,
        fit,
        reference_rate,
        passed,
    }))
}

/// Runs the propagators for every frequency in `config` (in parallel),
/// measures `‖f − g‖` and fits decay rates over the tail window.
pub fn decay_report(
    config: &EvolutionConfig,
    grid: &Arc<Grid>,
    initial: &(dyn Fn(f64) -> GridFunction + Sync),
) -> Result<DecayReport> {
    config.validate()?;
    let modes: Vec<ModeDecay> = config
        .xi_list
        .par_iter()
        .map(|&xi| {
            let f0 = initial(xi);
            grid.check_same(f0.grid())?;
            mode_decay(config, xi, &f0)
        })
        .collect::<Result<_>>()?;
    let aggregate = aggregate(config, &modes, grid)?;
    let max_disagreement = modes
        .iter()
        .filter_map(|m| m.propagator_disagreement.as_ref())
        .flatten()
        .copied()
        .reduce(f64::max);
    let window = config.window();
    Ok(DecayReport {
        config: config.clone(),
        tail_window: window,
        transient_window: (0.0, window.0),
        modes,
        aggregate,
        max_disagreement,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeContraction {
    pub xi: f64,
    /// `‖f(t)‖ / ‖f0‖` at every configured time
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractionReport {
    pub modes: Vec<ModeContraction>,
    /// `max_t (∫‖f(t)‖² dξ / ∫‖f0‖² dξ)^{1/2}`, trapezoid over the ξ list
    pub aggregate_max_ratio: Option<f64>,
    pub bound: f64,
    pub passed: bool,
}

/// `max_t ‖f(t)‖ / ‖f0‖` from the direct integrator, per mode and aggregated.
pub fn contraction_check(
    config: &EvolutionConfig,
    grid: &Arc<Grid>,
    initial: &(dyn Fn(f64) -> GridFunction + Sync),
) -> Result<ContractionReport> {
    config.validate()?;
    let runs: Vec<(f64, f64, Vec<f64>)> = config
        .xi_list
        .par_iter()
        .map(|&xi| {
            let f0 = initial(xi);
            grid.check_same(f0.grid())?;
            let norm0 = l2w_norm(&f0);
            let snaps = propagate_direct_series(xi, &f0, &config.times, config.dt)?;
            Ok((xi, norm0, snaps.iter().map(|s| l2w_norm(&s.f)).collect()))
        })
        .collect::<Result<_>>()?;
    let modes: Vec<ModeContraction> = runs
        .iter()
        .map(|(xi, norm0, n)| {
            let ratios: Vec<f64> = n.iter().map(|x| x / norm0).collect();
            ModeContraction {
                xi: *xi,
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
                ratios,
            }
        })
        .collect();
    let aggregate_max_ratio = (runs.len() >= 2).then(|| {
        let xis: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let initial: Vec<f64> = runs.iter().map(|r| r.1).collect();
        let base = aggregate_norm(&xis, &initial, SobolevWeight::L2);
        (0..config.times.len())
            .map(|k| {
                let at: Vec<f64> = runs.iter().map(|r| r.2[k]).collect();
                aggregate_norm(&xis, &at, SobolevWeight::L2) / base
            })
            .fold(0.0, f64::max)
    });
    let worst = modes
        .iter()
        .map(|m| m.max_ratio)
        .chain(aggregate_max_ratio)
        .fold(0.0, f64::max);
    Ok(ContractionReport {
        modes,
        aggregate_max_ratio,
        bound: CONTRACTION_BOUND,
        passed: worst <= CONTRACTION_BOUND,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapPoint {
    pub t: f64,
    /// `max_ξ |e^{λ*(ξ) t} − e^{−ξ² t / 2}|`
    pub gap: f64,
    pub t_gap: f64,
    /// Frequency attaining the maximum.
    pub argmax_xi: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChapmanEnskogReport {
    pub points: Vec<GapPoint>,
    /// Least-squares line through `(ln t, ln gap)`; absent for fewer than
    /// two times.
    pub slope: Option<LineFit>,
    /// `(max − min) / mean` of `t · gap(t)`
    pub t_gap_variation: f64,
    pub xi_samples: usize,
}

/// Gap between the exact discrete-mode factor `e^{λ* t}` and its diffusive
/// approximation `e^{−ξ² t / 2}`, maximized over `samples` frequencies in
/// `(0, √π)` (the gap is even in `ξ`).
pub fn chapman_enskog_gap(t_list: &[f64], grid: &Arc<Grid>, samples: usize) -> Result<ChapmanEnskogReport> {
    if t_list.is_empty() || t_list.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidArgument("times must be positive".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two xi samples".into()));
    }
    let top = SQRT_PI - 1e-3;
    let curve: Vec<(f64, f64)> = (1..=samples)
        .into_par_iter()
        .map(|k| {
            let xi = top * k as f64 / samples as f64;
            let l = dispersion::lambda_star(xi, grid)?
                .value()
                .ok_or(Error::Resonance { xi })?;
            Ok((xi, l))
        })
        .collect::<Result<_>>()?;
    let points: Vec<GapPoint> = t_list
        .iter()
        .map(|&t| {
            let (argmax_xi, gap) = curve
                .iter()
                .map(|&(xi, l)| (xi, ((l * t).exp() - (-0.5 * xi * xi * t).exp()).abs()))
                .fold((0.0, 0.0), |best, p| if p.1 > best.1 { p } else { best });
            GapPoint {
                t,
                gap,
                t_gap: t * gap,
                argmax_xi,
            }
        })
        .collect();
    let slope = if points.len() >= 2 {
        let x: Vec<f64> = points.iter().map(|p| p.t.ln()).collect();
        let y: Vec<f64> = points.iter().map(|p| p.gap.ln()).collect();
        Some(linear_fit(&x, &y)?)
    } else {
        None
    };
    let tg: Vec<f64> = points.iter().map(|p| p.t_gap).collect();
    let mean = tg.iter().sum::<f64>() / tg.len() as f64;
    let spread = tg.iter().copied().fold(f64::MIN, f64::max) - tg.iter().copied().fold(f64::MAX, f64::min);
    Ok(ChapmanEnskogReport {
        points,
        slope,
        t_gap_variation: if mean > 0.0 { spread / mean } else { 0.0 },
        xi_samples: samples,
    })
}
