//! End-to-end use of the library: initial data on a periodic slab, mode-wise
//! evolution and decay toward the grossly determined solution.

use bgk_spectral::evolution::{self, fourier_modes, EvolutionConfig, Method};
use bgk_spectral::numerics::{l2w_norm, Grid};
use bgk_spectral::{gft, GridFunction};

#[test]
fn slab_modes_decay_and_conserve_parseval() {
    let grid = Grid::shared(8.0, 1024).unwrap();
    let period = 8.0;
    let m = 16;
    let samples: Vec<GridFunction> = (0..m)
        .map(|i| {
            let x = i as f64 * period / m as f64;
            GridFunction::from_real_fn(&grid, move |v| {
                (1.0 + 0.3 * v) * (std::f64::consts::TAU * x / period).cos() + 0.2 * v * v
            })
        })
        .collect();
    let modes = fourier_modes(period, &samples).unwrap();
    let active: Vec<_> = modes.into_iter().filter(|(_, f)| l2w_norm(f) > 1e-10).collect();
    assert_eq!(active.len(), 3);
    for (xi, f) in &active {
        let p = gft::parseval(*xi, f, f).unwrap();
        assert!((p.re - l2w_norm(f).powi(2)).abs() < 1e-8 * l2w_norm(f).powi(2));
        let early = l2w_norm(&evolution::propagate_spectral(*xi, f, 1.0).unwrap());
        let late = l2w_norm(&evolution::propagate_spectral(*xi, f, 4.0).unwrap());
        assert!(late <= early * (1.0 + 1e-9));
    }
}

#[test]
fn default_configuration_report() {
    let grid = Grid::shared(8.0, 1024).unwrap();
    let config = EvolutionConfig {
        method: Method::Both,
        ..EvolutionConfig::default()
    };
    let report = evolution::decay_report(&config, &grid, &|xi| {
        GridFunction::from_real_fn(&grid, move |v| 1.0 + v * xi - v * v)
    })
    .unwrap();
    assert_eq!(report.modes.len(), config.xi_list.len());
    assert!(report.max_disagreement.unwrap() < 1e-4);
    for m in &report.modes {
        let worst = m.richardson_estimate.as_ref().unwrap().iter().fold(0.0, |a: f64, &b| a.max(b));
        assert!(worst < 1e-6 * config.final_time());
    }
}
