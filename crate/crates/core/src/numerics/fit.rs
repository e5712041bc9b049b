use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line `y ≈ slope · x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let c = polynomial_fit(x, y, 1)?;
    let residual = rms_residual(x, y, &c);
    Ok(LineFit {
        slope: c[1],
        intercept: c[0],
        residual,
    })
}

/// Coefficients `c_0..=c_degree` of the least-squares polynomial, lowest
/// order first, by SVD of the Vandermonde matrix.
pub fn polynomial_fit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::FitRejected(format!(
            "{} abscissae but {} ordinates",
            x.len(),
            y.len()
        )));
    }
    if x.len() <= degree {
        return Err(Error::FitRejected(format!(
            "{} samples cannot determine a degree-{degree} polynomial",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::FitRejected("non-finite sample".into()));
    }
    let a = DMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let solution = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::FitRejected(e.to_string()))?;
    Ok(solution.iter().copied().collect())
}

fn rms_residual(x: &[f64], y: &[f64], coefficients: &[f64]) -> f64 {
    let sum: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let p = coefficients.iter().rev().fold(0.0, |acc, &c| acc * xi + c);
            (p - yi).powi(2)
        })
        .sum();
    (sum / x.len() as f64).sqrt()
}
