//! Run configuration: the model/truncation JSON plus check tolerances.

use serde::{Deserialize, Serialize};

use hubatom_core::model::{self, ModelConfig, ModelSpec, TruncationPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative residual bound for the shifted-average identity check.
    #[serde(default = "default_hs_rel_tol")]
    pub hs_rel_tol: f64,
    /// Relative bound for closed-form vs enumeration agreement.
    #[serde(default = "default_oracle_rel_tol")]
    pub oracle_rel_tol: f64,
    /// Convergence tolerance handed to the adaptive Gaussian average.
    #[serde(default = "default_quad_rel_tol")]
    pub quad_rel_tol: f64,
}

fn default_hs_rel_tol() -> f64 {
    1e-10
}

fn default_oracle_rel_tol() -> f64 {
    1e-12
}

fn default_quad_rel_tol() -> f64 {
    1e-12
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hs_rel_tol: default_hs_rel_tol(),
            oracle_rel_tol: default_oracle_rel_tol(),
            quad_rel_tol: default_quad_rel_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub model_config: ModelConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn model(&self) -> &ModelSpec {
        &self.model_config.model
    }

    pub fn truncation(&self) -> &TruncationPolicy {
        &self.model_config.truncation
    }

    /// Parse and fully validate; the returned message list is empty on
    /// success.
    pub fn from_json(text: &str) -> Result<RunConfig, String> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
        let report = model::validate(config.model(), config.truncation());
        if !report.passed() {
            return Err(format!(
                "invalid config: {}",
                report.violations.join("; ")
            ));
        }
        for (name, value) in [
            ("hs_rel_tol", config.tolerances.hs_rel_tol),
            ("oracle_rel_tol", config.tolerances.oracle_rel_tol),
            ("quad_rel_tol", config.tolerances.quad_rel_tol),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(format!("invalid config: {name} must lie in (0, 1)"));
            }
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEMO: &str = r#"{
        "statistics": "fermion",
        "levels": [{"label": "1", "energy": 0.0}, {"label": "2", "energy": 0.5}],
        "U": 1.0,
        "beta": 1.0,
        "mu": 0.0,
        "truncation": {"n_max_per_level": 6, "N_max": "auto", "tail_tol": 1e-16}
    }"#;

    #[test]
    fn demo_config_parses_with_default_tolerances() {
        let config = RunConfig::from_json(DEMO).unwrap();
        assert_eq!(config.model().levels.len(), 2);
        assert_eq!(config.tolerances, Tolerances::default());
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(RunConfig::from_json("{not json").is_err());
    }

    #[test]
    fn invalid_model_is_rejected_with_named_violation() {
        let bad = DEMO.replace("\"beta\": 1.0", "\"beta\": -1.0");
        let err = RunConfig::from_json(&bad).unwrap_err();
        assert!(err.contains("beta must be positive"), "{err}");
    }

    #[test]
    fn out_of_range_tolerance_rejected() {
        let bad = DEMO.replace(
            "\"truncation\"",
            "\"tolerances\": {\"hs_rel_tol\": 2.0}, \"truncation\"",
        );
        let err = RunConfig::from_json(&bad).unwrap_err();
        assert!(err.contains("hs_rel_tol"), "{err}");
    }
}
