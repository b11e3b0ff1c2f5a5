//! The standard demo model set used by the route-equivalence suites.
#![allow(dead_code)] // shared by several test targets, each using a subset

use hubatom_core::model::{Level, ModelSpec, NMax, Statistics, TruncationPolicy};

pub fn levels(energies: &[f64]) -> Vec<Level> {
    energies
        .iter()
        .enumerate()
        .map(|(i, &energy)| Level {
            label: (i + 1).to_string(),
            energy,
        })
        .collect()
}

fn trunc(n_max_per_level: usize) -> TruncationPolicy {
    TruncationPolicy {
        n_max_per_level,
        n_max: NMax::Auto,
        tail_tol: 1e-16,
    }
}

/// Fermion chains of 1 to 4 levels plus the two bosonic models inside the
/// shifted-argument domain.
pub fn demo_models() -> Vec<(String, ModelSpec, TruncationPolicy)> {
    vec![
        (
            "fermion-1".into(),
            ModelSpec {
                statistics: Statistics::Fermion,
                levels: levels(&[0.3]),
                u: 1.0,
                beta: 1.0,
                mu: 0.0,
            },
            trunc(6),
        ),
        (
            "fermion-2".into(),
            ModelSpec {
                statistics: Statistics::Fermion,
                levels: levels(&[0.0, 0.5]),
                u: 1.0,
                beta: 1.0,
                mu: 0.0,
            },
            trunc(6),
        ),
        (
            "fermion-3".into(),
            ModelSpec {
                statistics: Statistics::Fermion,
                levels: levels(&[-0.3, 0.2, 0.7]),
                u: 0.8,
                beta: 1.5,
                mu: 0.4,
            },
            trunc(6),
        ),
        (
            "fermion-4".into(),
            ModelSpec {
                statistics: Statistics::Fermion,
                levels: levels(&[-0.3, 0.2, 0.7, 1.1]),
                u: 0.8,
                beta: 1.5,
                mu: 0.4,
            },
            trunc(6),
        ),
        (
            "boson-1".into(),
            ModelSpec {
                statistics: Statistics::Boson,
                levels: levels(&[1.0]),
                u: 1.0,
                beta: 1.0,
                mu: -1.0,
            },
            trunc(10),
        ),
        (
            "boson-2".into(),
            ModelSpec {
                statistics: Statistics::Boson,
                levels: levels(&[0.8, 1.3]),
                u: 0.9,
                beta: 1.2,
                mu: -0.6,
            },
            trunc(7),
        ),
    ]
}
