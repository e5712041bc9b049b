use std::path::{Path, PathBuf};

use bgk_spectral::evolution::{self, Method};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything a run needs. Every field has a default; unknown keys are
/// rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub xi: Sampling,
    pub time: Sampling,
    pub evolution: EvolutionSettings,
    pub tolerances: Tolerances,
    pub parseval: ParsevalSettings,
    pub chapman_enskog: ChapmanEnskogSettings,
    pub out: PathBuf,
    pub format: Format,
    pub seed: u64,
    pub experimental_resonance: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            xi: Sampling::list(vec![0.25, 0.8, 1.5, 2.5]),
            time: Sampling::range(0.0, 6.0, 25),
            evolution: EvolutionSettings::default(),
            tolerances: Tolerances::default(),
            parseval: ParsevalSettings::default(),
            chapman_enskog: ChapmanEnskogSettings::default(),
            out: PathBuf::from("bgk-out"),
            format: Format::Csv,
            seed: 20_240_501,
            experimental_resonance: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Velocity cutoff `L`; nodes cover `[−L, L)`.
    pub half_width: f64,
    /// Number of nodes `N`.
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            points: 4096,
        }
    }
}

/// Either an explicit `list`, or `count` evenly spaced values from `start`
/// to `end` inclusive.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl Sampling {
    pub fn list(values: Vec<f64>) -> Self {
        Self {
            list: Some(values),
            ..Self::default()
        }
    }

    pub fn range(start: f64, end: f64, count: usize) -> Self {
        Self {
            list: None,
            start: Some(start),
            end: Some(end),
            count: Some(count),
        }
    }

    /// Parses `a,b,c` as a list or `start:end:count` as a range.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |e: String| CliError::Config(format!("cannot parse `{text}`: {e}"));
        let number = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [start, end, count] => Ok(Self::range(
                number(start)?,
                number(end)?,
                count.trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            )),
            [list] => Ok(Self::list(
                list.split(',').map(number).collect::<Result<_, _>>()?,
            )),
            _ => Err(bad("expected `a,b,c` or `start:end:count`".into())),
        }
    }

    pub fn values(&self, what: &str) -> Result<Vec<f64>, CliError> {
        let values = match (self, self.list.as_ref()) {
            (Sampling { start: None, end: None, count: None, .. }, Some(list)) => list.clone(),
            (Sampling { start: Some(a), end: Some(b), count: Some(n), .. }, None) => match *n {
                0 => vec![],
                1 => vec![*a],
                n => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            },
            _ => {
                return Err(CliError::Config(format!(
                    "{what}: give either `list` or all of `start`, `end`, `count`"
                )))
            }
        };
        if values.is_empty() {
            return Err(CliError::Config(format!("{what}: no values")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config(format!("{what}: non-finite value")));
        }
        Ok(values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionSettings {
    pub dt: f64,
    pub method: Method,
    /// `ξ₀` of the truncated grossly determined solution.
    pub gds_cutoff: Option<f64>,
    pub rate_slack: f64,
    pub tail_window: Option<(f64, f64)>,
    /// Write one velocity profile per `(ξ, t)`.
    pub snapshots: bool,
}

impl Default for EvolutionSettings {
    fn default() -> Self {
        Self {
            dt: evolution::DEFAULT_DT,
            method: Method::Both,
            gds_cutoff: None,
            rate_slack: 0.05,
            tail_window: None,
            snapshots: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Spectral vs direct propagator, `L²_w` norm.
    pub agreement: f64,
    /// Relative Parseval and reconstruction defect.
    pub parseval: f64,
    /// `|ω(λ*)|` and the implicit-equation residual.
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            agreement: 1e-4,
            parseval: 1e-6,
            root: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParsevalSettings {
    /// Random `(f, g)` pairs per frequency.
    pub pairs: usize,
}

impl Default for ParsevalSettings {
    fn default() -> Self {
        Self { pairs: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChapmanEnskogSettings {
    /// Times, geometrically spaced.
    pub t_start: f64,
    pub t_end: f64,
    pub count: usize,
    /// Frequencies in `(0, √π)` over which the gap is maximized.
    pub xi_samples: usize,
}

impl Default for ChapmanEnskogSettings {
    fn default() -> Self {
        Self {
            t_start: 5.0,
            t_end: 50.0,
            count: 10,
            xi_samples: 2000,
        }
    }
}

impl ChapmanEnskogSettings {
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        if !(self.t_start > 0.0 && self.t_end > self.t_start && self.count >= 2) {
            return Err(CliError::Config(
                "chapman_enskog: need 0 < t_start < t_end and count >= 2".into(),
            ));
        }
        let ratio = (self.t_end / self.t_start).ln() / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|k| self.t_start * (ratio * k as f64).exp())
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn evolution_config(&self) -> Result<evolution::EvolutionConfig, CliError> {
        let config = evolution::EvolutionConfig {
            xi_list: self.xi.values("xi")?,
            times: self.time.values("time")?,
            dt: self.evolution.dt,
            method: self.evolution.method,
            experimental_resonance: self.experimental_resonance,
            gds_cutoff: self.evolution.gds_cutoff,
            rate_slack: self.evolution.rate_slack,
            tail_window: self.evolution.tail_window,
        };
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&text).unwrap(), c);
        assert_eq!(toml::from_str::<RunConfig>("").unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("sed = 3").is_err());
        assert!(toml::from_str::<RunConfig>("[grid]\nn = 3").is_err());
    }

    #[test]
    fn sampling_forms() {
        assert_eq!(Sampling::parse("0.5, -1").unwrap().values("xi").unwrap(), vec![0.5, -1.0]);
        let r = Sampling::parse("-1:1:5").unwrap().values("xi").unwrap();
        assert_eq!(r, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(Sampling::parse("1:2").is_err());
        assert!(Sampling::parse("a,b").is_err());
        let mixed = Sampling {
            list: Some(vec![1.0]),
            count: Some(3),
            ..Sampling::default()
        };
        assert!(mixed.values("xi").is_err());
    }

    #[test]
    fn geometric_times() {
        let t = ChapmanEnskogSettings::default().times().unwrap();
        assert_eq!(t.len(), 10);
        assert!((t[0] - 5.0).abs() < 1e-12 && (t[9] - 50.0).abs() < 1e-10);
    }
}
