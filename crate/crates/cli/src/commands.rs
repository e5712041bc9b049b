use std::sync::Arc;

use anyhow::Result;
use bgk_spectral::acceptance::{self, Settings};
use bgk_spectral::dispersion::{self, Route};
use bgk_spectral::evolution::{self, DecayReport, EvolutionConfig, Method, SpectralPropagator};
use bgk_spectral::numerics::Grid;
use bgk_spectral::testing::random_smooth;
use bgk_spectral::GridFunction;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{column, Cell, Sink, Table};
use crate::CliError;

pub fn grid(config: &RunConfig) -> Result<Arc<Grid>> {
    Grid::shared(config.grid.half_width, config.grid.points)
        .map_err(|e| CliError::Config(e.to_string()).into())
}

/// Initial datum for mode `ξ`: a random smooth profile seeded by the run
/// seed and the bits of `ξ`, so each mode is reproducible on its own.
pub fn initial_data(grid: &Arc<Grid>, seed: u64, xi: f64) -> GridFunction {
    random_smooth(grid, seed ^ xi.to_bits())
}

pub fn dispersion(config: &RunConfig, sink: &mut Sink) -> Result<()> {
    let grid = grid(config)?;
    let xis = config.xi.values("xi")?;
    let points = xis
        .par_iter()
        .map(|&xi| dispersion::dispersion_point(xi, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(
        "discrete eigenvalue of the linearized BGK operator per frequency",
        vec![
            column("xi", "spatial frequency"),
            column("lambda_star", "real eigenvalue in (-1, 0]; -1 at |xi| = sqrt(pi) (limit); empty when absent"),
            column("omega_prime", "d omega / d lambda at lambda_star; 2/pi at resonance"),
            column("root_residual", "|omega(lambda_star, xi)| by quadrature"),
            column("implicit_residual", "residual of the closed-form erfc equation"),
            column("series_deviation", "|optimally truncated small-xi series - root|, |xi| <= 0.5"),
            column("flag", "eigenvalue | boundary | none"),
        ],
    );
    let mut worst: f64 = 0.0;
    for p in &points {
        let r = |route| p.route_residuals.get(&route).copied();
        worst = worst.max(r(Route::Root).unwrap_or(0.0)).max(r(Route::Implicit).unwrap_or(0.0));
        table.push(vec![
            p.xi.into(),
            p.lambda_star.limit_value().into(),
            p.omega_prime.into(),
            r(Route::Root).into(),
            r(Route::Implicit).into(),
            r(Route::Series).into(),
            p.lambda_star.flag().into(),
        ]);
    }
    sink.table("dispersion", &table, config)?;
    println!("{} frequencies, worst root residual {worst:.3e}", points.len());
    if worst > config.tolerances.root {
        return Err(CliError::Tolerance(format!(
            "root residual {worst:e} above {:e}",
            config.tolerances.root
        ))
        .into());
    }
    Ok(())
}

fn snapshot(xi: f64, t: f64, f: &GridFunction) -> Table {
    let mut table = Table::new(
        format!("solution profile at xi = {xi}, t = {t}"),
        vec![
            column("v", "velocity node"),
            column("re", "real part of the Fourier mode f(t, xi, v)"),
            column("im", "imaginary part"),
        ],
    );
    for (v, c) in f.grid().nodes().iter().zip(f.values()) {
        table.push(vec![(*v).into(), c.re.into(), c.im.into()]);
    }
    table
}

fn trajectory(config: &EvolutionConfig, xi: f64, f0: &GridFunction) -> Result<Vec<GridFunction>> {
    if config.method == Method::Spectral && !dispersion::is_resonant(xi) {
        let p = SpectralPropagator::new(xi, f0)?;
        return Ok(config.times.iter().map(|&t| p.at(t)).collect::<Result<_, _>>()?);
    }
    let d = evolution::propagate_direct_series(xi, f0, &config.times, config.dt)?;
    Ok(d.into_iter().map(|s| s.f).collect())
}

fn check_agreement(report: &DecayReport, config: &RunConfig) -> Result<()> {
    match report.max_disagreement {
        Some(d) if d > config.tolerances.agreement => Err(CliError::Inconsistency(format!(
            "spectral and direct propagators differ by {d:e} (tolerance {:e})",
            config.tolerances.agreement
        ))
        .into()),
        _ => Ok(()),
    }
}

fn run_decay(config: &RunConfig, grid: &Arc<Grid>) -> Result<(EvolutionConfig, DecayReport)> {
    let evo = config.evolution_config()?;
    evo.validate()?;
    let seed = config.seed;
    let report = evolution::decay_report(&evo, grid, &|xi| initial_data(grid, seed, xi))?;
    Ok((evo, report))
}

pub fn evolve(config: &RunConfig, sink: &mut Sink) -> Result<()> {
    let grid = grid(config)?;
    let (evo, report) = run_decay(config, &grid)?;
    let mut table = Table::new(
        "per-mode evolution summary",
        vec![
            column("xi", "spatial frequency"),
            column("t", "time"),
            column("norm_l2w", "||f(t)|| in L2_w"),
            column("distance_l2w", "||f(t) - g(t)|| in L2_w, g the discrete-mode part"),
            column("distance_h1w", "||f(t) - g(t)|| in H1_w"),
            column("agreement", "||f_spectral(t) - f_direct(t)|| in L2_w (method = both)"),
            column("richardson", "direct integrator error estimate"),
        ],
    );
    for m in &report.modes {
        for (k, &t) in m.times.iter().enumerate() {
            let at = |v: &Option<Vec<f64>>| v.as_ref().and_then(|v| v.get(k).copied());
            table.push(vec![
                m.xi.into(),
                t.into(),
                m.solution_l2w[k].into(),
                m.distance_l2w.get(k).copied().into(),
                m.distance_h1w.get(k).copied().into(),
                at(&m.propagator_disagreement).into(),
                at(&m.richardson_estimate).into(),
            ]);
        }
    }
    sink.table("evolution", &table, config)?;
    sink.report("decay_report", &report, config)?;

    if config.evolution.snapshots {
        let dir = sink.subdir("snapshots")?;
        let profiles = evo
            .xi_list
            .par_iter()
            .map(|&xi| Ok((xi, trajectory(&evo, xi, &initial_data(&grid, config.seed, xi))?)))
            .collect::<Result<Vec<_>>>()?;
        for (xi, fs) in &profiles {
            for (t, f) in evo.times.iter().zip(fs) {
                let name = format!("xi_{xi:+.6}_t_{t:.6}.csv");
                sink.csv_at(dir.join(name), &snapshot(*xi, *t, f))?;
            }
        }
    }
    if let Some(d) = report.max_disagreement {
        println!("max spectral/direct disagreement {d:.3e}");
    }
    check_agreement(&report, config)
}

pub fn parseval(config: &RunConfig, sink: &mut Sink) -> Result<()> {
    let grid = grid(config)?;
    let xis = config.xi.values("xi")?;
    let errors = acceptance::parseval_errors(&grid, config.seed, &xis, config.parseval.pairs)?;
    let mut table = Table::new(
        format!("transform identities over {} random pairs per frequency", config.parseval.pairs),
        vec![
            column("xi", "spatial frequency"),
            column("parseval_defect", "max |<f,g> - expansion| / (||f|| ||g||)"),
            column("reconstruction_error", "max ||reconstruct(decompose f) - f|| / ||f||"),
        ],
    );
    let mut worst: f64 = 0.0;
    for &(xi, p, r) in &errors {
        worst = worst.max(p).max(r);
        table.push(vec![xi.into(), p.into(), r.into()]);
    }
    sink.table("parseval", &table, config)?;
    println!("worst relative defect {worst:.3e}");
    if worst >= config.tolerances.parseval || worst.is_nan() {
        return Err(CliError::Tolerance(format!(
            "Parseval defect {worst:e} above {:e}",
            config.tolerances.parseval
        ))
        .into());
    }
    Ok(())
}

pub fn decay(config: &RunConfig, sink: &mut Sink) -> Result<()> {
    let grid = grid(config)?;
    let (_, report) = run_decay(config, &grid)?;
    let mut modes = Table::new(
        format!(
            "decay of ||f - g|| with rates fitted over t in [{}, {}]",
            report.tail_window.0, report.tail_window.1
        ),
        vec![
            column("xi", "spatial frequency"),
            column("lambda_star", "discrete eigenvalue; empty when absent"),
            column("rate", "fitted slope of ln ||f - g||_L2w"),
            column("reference_rate", "expected rate"),
            column("rate_passed", "|rate - reference| within the relative tolerance"),
            column("monotone", "||f - g|| nonincreasing over the tail window"),
            column("continuous_norm_deviation", "max_t | ||B f(t)|| - e^-t ||B f0|| |"),
        ],
    );
    let flag = |b: Option<bool>| Cell::Text(b.map_or(String::new(), |b| b.to_string()));
    for m in &report.modes {
        modes.push(vec![
            m.xi.into(),
            m.lambda_star.into(),
            m.fit.map(|f| f.slope).into(),
            m.reference_rate.into(),
            flag(m.rate_passed),
            flag(Some(m.monotone_after_transient)),
            m.continuous_norm_deviation.into(),
        ]);
    }
    sink.table("decay_modes", &modes, config)?;
    if let Some(a) = &report.aggregate {
        let mut agg = Table::new(
            format!("aggregate distance over xi ({})", a.quadrature),
            vec![
                column("t", "time"),
                column("l2", "L2 aggregate of ||f - g||"),
                column("h1", "H1 aggregate"),
                column("h_minus1", "H-1 aggregate"),
            ],
        );
        for (k, &t) in a.times.iter().enumerate() {
            agg.push(vec![t.into(), a.l2[k].into(), a.h1[k].into(), a.h_minus1[k].into()]);
        }
        sink.table("decay_aggregate", &agg, config)?;
        println!(
            "aggregate rate {:.4} (reference {:.4}) {}",
            a.fit.slope,
            a.reference_rate,
            if a.passed { "ok" } else { "FAILED" }
        );
    }
    sink.report("decay_report", &report, config)?;
    check_agreement(&report, config)?;
    let failed: Vec<f64> = report
        .modes
        .iter()
        .filter(|m| m.rate_passed == Some(false))
        .map(|m| m.xi)
        .collect();
    if !failed.is_empty() || report.aggregate.as_ref().is_some_and(|a| !a.passed) {
        return Err(CliError::Tolerance(format!("decay rate outside tolerance at xi = {failed:?}")).into());
    }
    Ok(())
}

pub fn chapman_enskog(config: &RunConfig, sink: &mut Sink) -> Result<()> {
    let grid = grid(config)?;
    let ce = &config.chapman_enskog;
    let report = evolution::chapman_enskog_gap(&ce.times()?, &grid, ce.xi_samples)?;
    let mut table = Table::new(
        format!("gap max_xi |exp(lambda_star t) - exp(-xi^2 t / 2)| over {} frequencies", ce.xi_samples),
        vec![
            column("t", "time"),
            column("gap", "maximum over xi in (0, sqrt(pi))"),
            column("t_gap", "t * gap"),
            column("argmax_xi", "frequency attaining the maximum"),
        ],
    );
    for p in &report.points {
        table.push(vec![p.t.into(), p.gap.into(), p.t_gap.into(), p.argmax_xi.into()]);
    }
    sink.table("chapman_enskog", &table, config)?;
    sink.report("chapman_enskog_report", &report, config)?;
    if let Some(s) = report.slope {
        println!(
            "log-log slope {:.4}, relative variation of t*gap {:.4}",
            s.slope, report.t_gap_variation
        );
    }
    Ok(())
}

pub fn selftest(config: &RunConfig, criteria: &[u32], sink: &mut Sink) -> Result<()> {
    let settings = Settings {
        grid: grid(config)?,
        seed: config.seed,
    };
    let ids: Vec<u32> = if criteria.is_empty() {
        acceptance::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        criteria.to_vec()
    };
    let mut reports = Vec::with_capacity(ids.len());
    for id in ids {
        let r = acceptance::run(id, &settings).map_err(|e| CliError::Config(e.to_string()))?;
        println!("{r}");
        reports.push(r);
    }
    let mut table = Table::new(
        "acceptance criteria",
        vec![
            column("id", "criterion number"),
            column("name", "criterion"),
            column("verdict", "pass | fail"),
            column("check", "first failing check, else the tightest one"),
            column("measured", "measured value of that check"),
            column("bound", "its tolerance"),
        ],
    );
    for r in &reports {
        let h = r.headline();
        table.push(vec![
            Cell::Text(r.id.to_string()),
            r.name.into(),
            (if r.passed { "pass" } else { "fail" }).into(),
            h.map_or("", |c| c.name.as_str()).into(),
            h.map(|c| c.measured).filter(|x| x.is_finite()).into(),
            h.map(|c| c.bound).filter(|x| x.is_finite()).into(),
        ]);
    }
    sink.table("selftest", &table, config)?;
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", reports.len());
        Ok(())
    } else {
        Err(CliError::Tolerance(format!("failing criteria: {failed:?}")).into())
    }
}
