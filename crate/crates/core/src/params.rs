//! Redaction parameters and the `key = value` parameter-file format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("line {0}: expected 'key = value'")]
    BadLine(usize),
    #[error("unknown parameter '{0}'")]
    UnknownKey(String),
    #[error("parameter '{key}': bad value '{value}'")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Range(String),
}

/// All knobs of the redaction pipeline. Field names double as parameter-file
/// keys (`gamma_min = 2`) and CLI flag names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedactionParams {
    /// Smallest cell input width.
    pub gamma_min: u8,
    /// Largest cell width drawn during cone mapping.
    pub gamma_max: u8,
    /// Decoy sequential-block density, as a fraction of mapped lookup cells.
    pub gamma_a_max: f64,
    /// Decoy Boolean-block density, as a fraction of original flip-flops.
    pub gamma_b_max: f64,
    /// Fraction of cell outputs that receive an interconnect mux.
    pub cpi_fraction: f64,
    /// Fraction of gates/flip-flops selected for redaction.
    pub coverage: f64,
    /// Maximum dummy inputs added to one element after construction.
    pub d_max: u8,
    /// Removal-cost weight: fan-in cone size.
    pub w_fi: f64,
    /// Removal-cost weight: fan-out cone size.
    pub w_fo: f64,
    /// Removal-cost weight: signal entropy.
    pub w_h: f64,
    /// Random primary-input vectors per entropy estimate.
    pub entropy_samples: u32,
    /// Master switch for the randomized transformations. Off, the pipeline
    /// maps cones deterministically at `gamma_min` and skips decoy blocks,
    /// dummy-input/reorder/inversion randomization and interconnect muxes.
    pub rt_enabled: bool,
    /// Whether blocks converted from lookup cells during decoy placement
    /// stay eligible for the per-element randomization pass.
    pub randomize_converted: bool,
}

impl Default for RedactionParams {
    fn default() -> Self {
        RedactionParams {
            gamma_min: 2,
            gamma_max: 4,
            gamma_a_max: 0.10,
            gamma_b_max: 0.10,
            cpi_fraction: 1.0,
            coverage: 1.0,
            d_max: 2,
            w_fi: 1.0 / 3.0,
            w_fo: 1.0 / 3.0,
            w_h: 1.0 / 3.0,
            entropy_samples: 1024,
            rt_enabled: true,
            randomize_converted: true,
        }
    }
}

impl RedactionParams {
    /// Hard cap on a cell's width after dummy expansion.
    pub fn width_cap(&self) -> usize {
        self.gamma_max as usize + self.d_max as usize
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if !(2 <= self.gamma_min && self.gamma_min <= self.gamma_max && self.gamma_max <= 6) {
            return Err(ParamsError::Range(format!(
                "need 2 <= gamma_min <= gamma_max <= 6, got {} and {}",
                self.gamma_min, self.gamma_max
            )));
        }
        for (name, v) in [
            ("gamma_a_max", self.gamma_a_max),
            ("gamma_b_max", self.gamma_b_max),
            ("cpi_fraction", self.cpi_fraction),
            ("coverage", self.coverage),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ParamsError::Range(format!("{name} = {v} outside [0, 1]")));
            }
        }
        for (name, v) in [("w_fi", self.w_fi), ("w_fo", self.w_fo), ("w_h", self.w_h)] {
            if v < 0.0 || !v.is_finite() {
                return Err(ParamsError::Range(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        if self.entropy_samples == 0 {
            return Err(ParamsError::Range("entropy_samples must be nonzero".into()));
        }
        Ok(())
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ParamsError> {
        macro_rules! parse {
            () => {
                value.parse().map_err(|_| ParamsError::BadValue {
                    key: key.to_string(),
                    value: value.to_string(),
                })?
            };
        }
        match key {
            "gamma_min" => self.gamma_min = parse!(),
            "gamma_max" => self.gamma_max = parse!(),
            "gamma_a_max" => self.gamma_a_max = parse!(),
            "gamma_b_max" => self.gamma_b_max = parse!(),
            "cpi_fraction" => self.cpi_fraction = parse!(),
            "coverage" => self.coverage = parse!(),
            "d_max" => self.d_max = parse!(),
            "w_fi" => self.w_fi = parse!(),
            "w_fo" => self.w_fo = parse!(),
            "w_h" => self.w_h = parse!(),
            "entropy_samples" => self.entropy_samples = parse!(),
            "rt_enabled" => self.rt_enabled = parse!(),
            "randomize_converted" => self.randomize_converted = parse!(),
            _ => return Err(ParamsError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Parses a parameter file: `key = value` lines, `#` comments, blank
    /// lines ignored. Unknown keys are errors.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ParamsError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ParamsError::BadLine(i + 1))?;
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    /// Canonical `key = value` rendering (documents every key).
    pub fn to_file(&self) -> String {
        let entries: BTreeMap<&str, String> = [
            ("gamma_min", self.gamma_min.to_string()),
            ("gamma_max", self.gamma_max.to_string()),
            ("gamma_a_max", self.gamma_a_max.to_string()),
            ("gamma_b_max", self.gamma_b_max.to_string()),
            ("cpi_fraction", self.cpi_fraction.to_string()),
            ("coverage", self.coverage.to_string()),
            ("d_max", self.d_max.to_string()),
            ("w_fi", self.w_fi.to_string()),
            ("w_fo", self.w_fo.to_string()),
            ("w_h", self.w_h.to_string()),
            ("entropy_samples", self.entropy_samples.to_string()),
            ("rt_enabled", self.rt_enabled.to_string()),
            ("randomize_converted", self.randomize_converted.to_string()),
        ]
        .into_iter()
        .collect();
        let mut out = String::new();
        for (k, v) in entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    /// The non-randomized baseline: same coverage, deterministic mapping.
    pub fn baseline(mut self) -> Self {
        self.rt_enabled = false;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let p = RedactionParams::default();
        let mut q = RedactionParams::default();
        q.gamma_min = 3;
        q.apply_file(&p.to_file()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn unknown_key_rejected() {
        let mut p = RedactionParams::default();
        assert!(matches!(
            p.apply_file("frobnicate = 3\n"),
            Err(ParamsError::UnknownKey(_))
        ));
    }

    #[test]
    fn ranges_enforced() {
        let mut p = RedactionParams::default();
        assert!(p.apply_file("gamma_min = 7\n").is_err());
        let mut p2 = RedactionParams::default();
        assert!(p2.apply_file("coverage = 1.5\n").is_err());
        let mut p3 = RedactionParams::default();
        p3.apply_file("gamma_min = 4 # comment\ncoverage = 0.5\n").unwrap();
        assert_eq!(p3.gamma_min, 4);
        assert_eq!(p3.coverage, 0.5);
    }
}
