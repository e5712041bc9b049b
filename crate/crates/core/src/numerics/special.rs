//! Maxwellian weight and the error-function family.

use std::f64::consts::PI;

use errorfunctions::{ComplexErrorFunctions, RealErrorFunctions};
use num_complex::Complex64;

/// `1 / sqrt(pi)`
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
/// `sqrt(pi)`, also the resonant frequency where the discrete mode meets the essential spectrum.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Below this magnitude the Dawson function is summed from its power
/// series, above it from the asymptotic expansion. At 6.5 the smallest
/// asymptotic term is about `exp(-42)`.
const DAWSON_SERIES_LIMIT: f64 = 6.5;

/// Maxwellian weight `w(v) = exp(-v^2) / sqrt(pi)`, normalized to unit mass.
#[inline]
pub fn weight(v: f64) -> f64 {
    (-v * v).exp() * FRAC_1_SQRT_PI
}

/// Dawson function `D(x) = exp(-x^2) * int_0^x exp(t^2) dt`.
///
/// For `|x| < 6.5` this sums `exp(-x^2) * sum_n x^(2n+1) / (n! (2n+1))`,
/// whose terms are all positive, so the relative error stays near machine
/// precision even where `exp(x^2)` is large. Beyond that the asymptotic
/// expansion `1/(2x) * sum_n (2n-1)!! / (2x^2)^n` is truncated at its
/// smallest term.
pub fn dawson(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x == 0.0 || x.is_infinite() {
        return 0.0_f64.copysign(x);
    }
    let ax = x.abs();
    let value = if ax < DAWSON_SERIES_LIMIT {
        dawson_series(ax)
    } else {
        dawson_asymptotic(ax)
    };
    value.copysign(x)
}

fn dawson_series(x: f64) -> f64 {
    let x2 = x * x;
    // p_n = x^(2n+1) / n!
    let mut power = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        power *= x2 / n as f64;
        let term = power / (2 * n + 1) as f64;
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    (-x2).exp() * sum
}

fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..200 {
        let next = term * (2 * n - 1) as f64 * inv;
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * x)
}

/// `PV int w(v) / (v - lambda) dv = -2 D(lambda)`.
#[inline]
pub fn pv_weight(lambda: f64) -> f64 {
    -2.0 * dawson(lambda)
}

/// Closed-form boundary values of the Cauchy transform of the weight,
/// `lim_{eta -> 0+-} int w(v) / (v - lambda - i eta) dv = -2 D(lambda) +- i pi w(lambda)`.
#[inline]
pub fn cauchy_weight(lambda: f64, side_sign: f64) -> Complex64 {
    Complex64::new(pv_weight(lambda), side_sign * PI * weight(lambda))
}

pub fn erf(x: f64) -> f64 {
    RealErrorFunctions::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    RealErrorFunctions::erfc(x)
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    RealErrorFunctions::erfcx(x)
}

/// Faddeeva function `W(z) = exp(-z^2) erfc(-i z)`.
pub fn faddeeva(z: Complex64) -> Complex64 {
    ComplexErrorFunctions::w(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Gauss-Legendre (5 points) on `n` panels.
    fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        const X: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683_1,
            0.0,
            0.538_469_310_105_683_1,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.236_926_885_056_189_1,
            0.478_628_670_499_366_5,
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
        ];
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let mid = a + (p as f64 + 0.5) * h;
                X.iter()
                    .zip(W)
                    .map(|(&x, w)| w * f(mid + 0.5 * h * x))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    }

    #[test]
    fn weight_values() {
        assert!((weight(0.0) - 0.564_189_583_5).abs() < 1e-10);
        assert!((weight(1.0) - 0.207_553_748_7).abs() < 1e-10);
        assert!((FRAC_1_SQRT_PI - 1.0 / PI.sqrt()).abs() < 1e-16);
        assert!((SQRT_PI - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dawson_at_zero_and_slope() {
        assert_eq!(dawson(0.0), 0.0);
        // D' = 1 - 2 x D, so the centered difference at 0 approaches 1.
        let h = 1e-5;
        let slope = (dawson(h) - dawson(-h)) / (2.0 * h);
        assert!((slope - 1.0).abs() < 1e-9, "slope {slope}");
    }

    #[test]
    fn dawson_at_one_matches_quadrature() {
        let integral = gauss_legendre(|t| (t * t).exp(), 0.0, 1.0, 64);
        let oracle = (-1.0f64).exp() * integral;
        assert!((dawson(1.0) - oracle).abs() < 1e-10 * oracle, "{} vs {oracle}", dawson(1.0));
    }

    #[test]
    fn dawson_matches_reference_library() {
        let mut x = -10.0;
        while x <= 10.0 {
            let reference = RealErrorFunctions::dawson(x);
            let rel = (dawson(x) - reference).abs() / reference.abs().max(1e-300);
            assert!(rel < 1e-12, "x = {x}: {} vs {reference} (rel {rel:e})", dawson(x));
            x += 0.013;
        }
    }

    #[test]
    fn dawson_satisfies_its_ode() {
        for &x in &[0.3, 1.7, 4.0, 6.4, 6.6, 9.0] {
            let h = 1e-5;
            let derivative = (dawson(x + h) - dawson(x - h)) / (2.0 * h);
            assert!((derivative - (1.0 - 2.0 * x * dawson(x))).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn pv_weight_is_odd() {
        assert_eq!(pv_weight(0.0), 0.0);
        for &l in &[0.3, 1.7] {
            assert_eq!(pv_weight(-l), -pv_weight(l));
        }
    }

    #[test]
    fn pv_weight_matches_excised_quadrature() {
        // Symmetric excision of radius r around lambda = 1: the principal value
        // equals int_r^R (w(1 + s) - w(1 - s)) / s ds up to the excluded core,
        // which is O(r) because the symmetrized integrand is bounded.
        let lambda = 1.0;
        let errors: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&r| {
                let value = gauss_legendre(
                    |s| (weight(lambda + s) - weight(lambda - s)) / s,
                    r,
                    12.0,
                    4000,
                );
                (value - pv_weight(lambda)).abs()
            })
            .collect();
        assert!(errors[0] < 1e-2 && errors[1] < 1e-3 && errors[2] < 1e-4, "{errors:?}");
        assert!(errors[2] < errors[1] && errors[1] < errors[0]);
    }
}
