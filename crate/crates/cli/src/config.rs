use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Residual `|g_n|` at which zero-set bisection stops.
    pub bisection: f64,
    /// Simplex diameter at which defect refinement stops.
    pub refinement: f64,
    /// Largest accepted contact-condition residual.
    pub residual: f64,
    /// Smallest defect accepted as evidence of no translated point.
    pub defect_threshold: f64,
    /// Defect at or below which a translated point counts as found.
    pub translated: f64,
    /// Required Fubini–Study separation of `p` and `q`, radians.
    pub fiber_margin: f64,
    /// Radius of the balls around `p` and `q` in the certificate.
    pub certificate_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            bisection: 1e-10,
            refinement: 1e-10,
            residual: 1e-9,
            defect_threshold: 1e-3,
            translated: 1e-8,
            fiber_margin: 0.5,
            certificate_radius: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Complex dimension; the sphere is `S^{2n-1}`.
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub iterate_schedule: Vec<usize>,
    pub grid: usize,
    pub starts: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 2,
            a: 0.5,
            b: 0.5,
            iterate_schedule: vec![1, 2, 4, 8, 16, 32, 64],
            grid: 200_000,
            starts: 64,
            seed: 1,
            tolerances: Tolerances::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let config: Self = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.n < 2 {
            return bad(format!("n must be >= 2, got {}", self.n));
        }
        if !(self.a > 0.0 && self.a < 1.0) {
            return bad(format!("a must lie in (0, 1), got {}", self.a));
        }
        if !(self.b > 0.0 && self.b < 1.0) {
            return bad(format!("b must lie in (0, 1), got {}", self.b));
        }
        if self.grid < 1_000 {
            return bad(format!("grid must be >= 1000, got {}", self.grid));
        }
        if self.starts == 0 {
            return bad("starts must be >= 1".into());
        }
        if self.iterate_schedule.is_empty() || self.iterate_schedule.contains(&0) {
            return bad("iterate_schedule must be a nonempty list of positive integers".into());
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("bisection", t.bisection),
            ("refinement", t.refinement),
            ("residual", t.residual),
            ("defect_threshold", t.defect_threshold),
            ("translated", t.translated),
            ("fiber_margin", t.fiber_margin),
            ("certificate_radius", t.certificate_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        if t.translated >= t.defect_threshold {
            return bad("tolerances.translated must be below tolerances.defect_threshold".into());
        }
        Ok(())
    }

    /// Largest iterate in the schedule.
    pub fn largest_n(&self) -> usize {
        self.iterate_schedule.iter().copied().max().unwrap_or(1)
    }

    /// Schedule sorted ascending without duplicates.
    pub fn schedule(&self) -> Vec<usize> {
        let mut s = self.iterate_schedule.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"grid": 5000, "tolerances": {"residual": 1e-8}}"#).unwrap();
        assert_eq!(c.grid, 5000);
        assert_eq!(c.tolerances.residual, 1e-8);
        assert_eq!(c.tolerances.bisection, 1e-10);
        assert_eq!(c.n, 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"grd": 5000}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"tolerances": {"bisect": 1}}"#).is_err());
    }

    #[test]
    fn invariants_enforced() {
        let base = ExperimentConfig::default();
        for c in [
            ExperimentConfig { n: 1, ..base.clone() },
            ExperimentConfig { a: 1.0, ..base.clone() },
            ExperimentConfig { b: 0.0, ..base.clone() },
            ExperimentConfig { grid: 999, ..base.clone() },
            ExperimentConfig { starts: 0, ..base.clone() },
            ExperimentConfig { iterate_schedule: vec![], ..base.clone() },
            ExperimentConfig { iterate_schedule: vec![0, 2], ..base.clone() },
        ] {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}
