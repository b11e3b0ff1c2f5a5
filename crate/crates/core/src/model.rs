//! System definition: levels, interaction, statistics, and the truncation
//! policy shared by every other module.
//!
//! Times are in units of 1/E with hbar = 1; energies are plain f64 with no
//! unit enforcement beyond documentation.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::{canonical, Error, Result};

/// Particle statistics. Fixes the sign `s` used wherever the closed forms
/// carry an upper (boson) / lower (fermion) sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// `+1` for bosons, `-1` for fermions.
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }
}

/// One single-particle level. Labels are opaque strings; the physics depends
/// only on the energy and the statistics, and degenerate energies are kept
/// distinct by label, never merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub label: String,
    pub energy: f64,
}

/// The locally interacting system: level energies, charging energy `U` on
/// the total particle number, inverse temperature and chemical potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub statistics: Statistics,
    pub levels: Vec<Level>,
    #[serde(rename = "U")]
    pub u: f64,
    pub beta: f64,
    pub mu: f64,
}

impl ModelSpec {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|l| l.energy)
    }

    pub fn min_energy(&self) -> f64 {
        self.energies().fold(f64::INFINITY, f64::min)
    }

    /// Index of the level carrying `label`.
    pub fn level_index(&self, label: &str) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| l.label == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.to_owned(),
                known: self.levels.iter().map(|l| l.label.clone()).collect(),
            })
    }

    /// Cheap structural check used as the precondition of every operation.
    pub fn check_basic(&self) -> Result<()> {
        let report = validate_fields(self);
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(report.join("; ")))
        }
    }
}

/// Truncation ceiling for the total particle number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NMax {
    /// Pick the smallest N whose locked-N term drops below
    /// `tail_tol x running sum`.
    Auto,
    Fixed(usize),
}

impl Serialize for NMax {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NMax::Auto => serializer.serialize_str("auto"),
            NMax::Fixed(n) => serializer.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for NMax {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct NMaxVisitor;

        impl<'de> Visitor<'de> for NMaxVisitor {
            type Value = NMax;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("\"auto\" or a nonnegative integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<NMax, E> {
                if v.eq_ignore_ascii_case("auto") {
                    Ok(NMax::Auto)
                } else {
                    Err(E::custom(format!("expected \"auto\", got \"{v}\"")))
                }
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<NMax, E> {
                Ok(NMax::Fixed(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<NMax, E> {
                if v < 0 {
                    Err(E::custom("N_max must be nonnegative"))
                } else {
                    Ok(NMax::Fixed(v as usize))
                }
            }
        }

        deserializer.deserialize_any(NMaxVisitor)
    }
}

/// Basis/summation truncation shared by all modules: the per-level bosonic
/// occupancy cap and the total-N ceiling. The same cutoffs define the oracle
/// basis, so cross-checks compare identical truncated models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Maximum occupancy per bosonic level; ignored for fermions.
    #[serde(default = "default_n_max_per_level")]
    pub n_max_per_level: usize,
    #[serde(rename = "N_max", default = "default_n_max")]
    pub n_max: NMax,
    /// Relative tail bound for the Auto rule and the locked-N sum check.
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_n_max_per_level() -> usize {
    6
}

fn default_n_max() -> NMax {
    NMax::Auto
}

fn default_tail_tol() -> f64 {
    1e-12
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            n_max_per_level: default_n_max_per_level(),
            n_max: default_n_max(),
            tail_tol: default_tail_tol(),
        }
    }
}

impl TruncationPolicy {
    /// Per-level occupancy ceiling for the given statistics.
    pub fn level_cap(&self, statistics: Statistics) -> usize {
        match statistics {
            Statistics::Fermion => 1,
            Statistics::Boson => self.n_max_per_level,
        }
    }

    /// Largest total N the truncated model can hold.
    pub fn hard_cap(&self, model: &ModelSpec) -> usize {
        model.level_count() * self.level_cap(model.statistics)
    }
}

/// Model plus truncation in the on-disk JSON shape:
/// `{"statistics": ..., "levels": [...], "U": ..., "beta": ..., "mu": ...,
///   "truncation": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub model: ModelSpec,
    #[serde(default)]
    pub truncation: TruncationPolicy,
}

/// Outcome of [`validate`], with one entry per violated invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// The N ceiling actually used downstream, when resolvable.
    pub resolved_n_max: Option<usize>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn validate_fields(model: &ModelSpec) -> Vec<String> {
    let mut violations = Vec::new();
    if model.levels.is_empty() {
        violations.push("levels must be non-empty".to_owned());
    }
    for (i, level) in model.levels.iter().enumerate() {
        if model.levels[..i].iter().any(|l| l.label == level.label) {
            violations.push(format!("duplicate level label '{}'", level.label));
        }
        if !level.energy.is_finite() {
            violations.push(format!("level '{}' energy must be finite", level.label));
        }
    }
    if !(model.beta > 0.0) {
        violations.push("beta must be positive".to_owned());
    }
    if !(model.u >= 0.0) {
        violations.push("U must be nonnegative".to_owned());
    }
    if !model.mu.is_finite() {
        violations.push("mu must be finite".to_owned());
    }
    violations
}

/// Check every structural invariant of the model and the policy, and resolve
/// the Auto N ceiling when the fields pass. Pure: same input, same report.
pub fn validate(model: &ModelSpec, trunc: &TruncationPolicy) -> ValidationReport {
    let mut violations = validate_fields(model);

    if trunc.n_max_per_level < 1 {
        violations.push("n_max_per_level must be at least 1".to_owned());
    }
    if !(trunc.tail_tol > 0.0) {
        violations.push("tail_tol must be positive".to_owned());
    }
    if model.statistics == Statistics::Boson && trunc.n_max == NMax::Auto && model.u == 0.0 {
        violations.push("Auto truncation requires U>0 for bosons".to_owned());
    }

    let resolved_n_max = if violations.is_empty() {
        match canonical::resolve_n_max(model, trunc) {
            Ok(n) => Some(n),
            Err(e) => {
                violations.push(e.to_string());
                None
            }
        }
    } else {
        None
    };

    ValidationReport {
        violations,
        resolved_n_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermion_two_level() -> ModelSpec {
        ModelSpec {
            statistics: Statistics::Fermion,
            levels: vec![
                Level {
                    label: "1".into(),
                    energy: 0.0,
                },
                Level {
                    label: "2".into(),
                    energy: 0.5,
                },
            ],
            u: 1.0,
            beta: 1.0,
            mu: 0.0,
        }
    }

    #[test]
    fn two_fermion_levels_pass_with_n_max_two() {
        let report = validate(&fermion_two_level(), &TruncationPolicy::default());
        assert!(report.passed(), "{:?}", report.violations);
        assert_eq!(report.resolved_n_max, Some(2));
    }

    #[test]
    fn bosonic_auto_requires_interaction() {
        let mut model = fermion_two_level();
        model.statistics = Statistics::Boson;
        model.u = 0.0;
        model.mu = -1.0;
        let report = validate(&model, &TruncationPolicy::default());
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .any(|v| v == "Auto truncation requires U>0 for bosons"));
    }

    #[test]
    fn negative_beta_rejected() {
        let mut model = fermion_two_level();
        model.beta = -1.0;
        let report = validate(&model, &TruncationPolicy::default());
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v == "beta must be positive"));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut model = fermion_two_level();
        model.levels[1].label = "1".into();
        let report = validate(&model, &TruncationPolicy::default());
        assert!(report.violations.iter().any(|v| v.contains("duplicate")));
    }

    #[test]
    fn fixed_n_max_clamped_to_level_count_for_fermions() {
        let trunc = TruncationPolicy {
            n_max: NMax::Fixed(10),
            ..TruncationPolicy::default()
        };
        let report = validate(&fermion_two_level(), &trunc);
        assert_eq!(report.resolved_n_max, Some(2));
    }

    #[test]
    fn validation_is_pure() {
        let model = fermion_two_level();
        let trunc = TruncationPolicy::default();
        assert_eq!(validate(&model, &trunc), validate(&model, &trunc));
    }

    #[test]
    fn nmax_serde_both_forms() {
        let auto: NMax = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(auto, NMax::Auto);
        let fixed: NMax = serde_json::from_str("7").unwrap();
        assert_eq!(fixed, NMax::Fixed(7));
        assert_eq!(serde_json::to_string(&NMax::Auto).unwrap(), "\"auto\"");
        assert_eq!(serde_json::to_string(&NMax::Fixed(3)).unwrap(), "3");
    }
}
