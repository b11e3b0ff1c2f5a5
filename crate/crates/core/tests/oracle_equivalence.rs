//! Route equivalence between the closed-form modules and the enumeration
//! oracle on the standard demo set. Line-set and series comparisons are
//! relative to the set's weight scale, so negligible far-tail sectors kept
//! only by the oracle basis cannot dominate the ratio.

mod common;

use hubatom_core::{canonical, green, model, oracle, subtlety, thermo};
use model::Statistics;

const ORACLE_TOL: f64 = 1e-12;

#[test]
fn grand_partition_agrees() {
    for (name, model, trunc) in common::demo_models() {
        let closed = thermo::grand_partition_interacting(&model, &trunc).unwrap();
        let exact = oracle::exact_grand_partition(&model, &trunc).unwrap();
        let gap = (closed.xi_u - exact).abs() / exact;
        assert!(gap < ORACLE_TOL, "{name}: xi gap {gap:.3e}");
    }
}

#[test]
fn occupations_agree() {
    for (name, model, trunc) in common::demo_models() {
        let closed = thermo::grand_partition_interacting(&model, &trunc).unwrap();
        for (a, level) in model.levels.iter().enumerate() {
            let exact = oracle::exact_occupation(&model, &trunc, &level.label).unwrap();
            let gap = (closed.mean_occupation[a] - exact).abs() / exact;
            assert!(gap < ORACLE_TOL, "{name} alpha={}: gap {gap:.3e}", level.label);
        }
    }
}

#[test]
fn line_sets_agree() {
    for (name, model, trunc) in common::demo_models() {
        for level in &model.levels {
            let alpha = &level.label;
            let pairs = [
                (
                    green::lesser_lines(&model, &trunc, alpha).unwrap(),
                    oracle::exact_lesser_lines(&model, &trunc, alpha).unwrap(),
                ),
                (
                    green::greater_lines(&model, &trunc, alpha).unwrap(),
                    oracle::exact_greater_lines(&model, &trunc, alpha).unwrap(),
                ),
                (
                    green::spectral_lines(&model, &trunc, alpha).unwrap(),
                    oracle::exact_spectral_lines(&model, &trunc, alpha).unwrap(),
                ),
            ];
            for (closed, exact) in pairs {
                let gap = closed.max_weight_gap(&exact);
                assert!(
                    gap < ORACLE_TOL,
                    "{name} alpha={alpha} {:?}: line gap {gap:.3e}",
                    closed.kind
                );
            }
        }
    }
}

#[test]
fn fermion_spectral_three_routes_agree() {
    for (name, model, trunc) in common::demo_models() {
        if model.statistics != Statistics::Fermion {
            continue;
        }
        for level in &model.levels {
            let alpha = &level.label;
            let merged = oracle::exact_spectral_lines(&model, &trunc, alpha).unwrap();
            let special = oracle::exact_spectral_special_fermion(&model, &trunc, alpha).unwrap();
            let closed = green::spectral_lines(&model, &trunc, alpha).unwrap();
            assert!(merged.max_weight_gap(&special) < ORACLE_TOL, "{name} {alpha}");
            assert!(closed.max_weight_gap(&special) < ORACLE_TOL, "{name} {alpha}");
            assert!(
                closed.lines.iter().all(|l| l.weight >= -1e-14),
                "{name} {alpha}: negative spectral weight"
            );
        }
    }
}

#[test]
fn time_series_agree_on_dense_grid() {
    for (name, model, trunc) in common::demo_models() {
        let times: Vec<f64> = (0..32).map(|i| i as f64 * 10.0 * model.beta / 31.0).collect();
        for level in &model.levels {
            let alpha = &level.label;
            for kind in [green::GreenKind::Lesser, green::GreenKind::Greater] {
                let series =
                    green::green_time_series(&model, &trunc, alpha, kind, &times).unwrap();
                let scale = series
                    .values
                    .iter()
                    .map(|v| v.norm())
                    .fold(1.0_f64, f64::max);
                for (t, got) in times.iter().zip(&series.values) {
                    let want = match kind {
                        green::GreenKind::Lesser => {
                            oracle::exact_lesser_time(&model, &trunc, alpha, *t).unwrap()
                        }
                        green::GreenKind::Greater => {
                            oracle::exact_greater_time(&model, &trunc, alpha, *t).unwrap()
                        }
                    };
                    let gap = (got - want).norm() / scale;
                    assert!(
                        gap < ORACLE_TOL,
                        "{name} alpha={alpha} {kind:?} t={t}: gap {gap:.3e}"
                    );
                }
            }
        }
    }
}

#[test]
fn sum_rules_hold() {
    for (name, model, trunc) in common::demo_models() {
        let table = canonical::canonical_partitions(&model, &trunc).unwrap();
        for n in 0..=table.n_max() {
            let total: f64 = (0..model.level_count()).map(|a| table.w(a, n)).sum();
            let want = n as f64 * table.z(n);
            assert!(
                (total - want).abs() <= 1e-12 * want.max(1.0),
                "{name} N={n}: occupation sum rule"
            );
        }
        let s = model.statistics.sign();
        for level in &model.levels {
            let n: f64 = green::fractional_parentage_n(&model, &trunc, &level.label)
                .unwrap()
                .iter()
                .sum();
            let p: f64 = green::fractional_parentage_p(&model, &trunc, &level.label)
                .unwrap()
                .iter()
                .sum();
            assert!(
                (p - s * n - 1.0).abs() < 1e-12,
                "{name} alpha={}: commutator sum rule",
                level.label
            );
            let spectral = green::spectral_lines(&model, &trunc, &level.label).unwrap();
            assert!(
                (spectral.total_weight() - 1.0).abs() < 1e-12,
                "{name} alpha={}: spectral sum rule",
                level.label
            );
        }
    }
}

#[test]
fn kms_holds() {
    for (name, model, trunc) in common::demo_models() {
        for level in &model.levels {
            let v = green::kms_check(&model, &trunc, &level.label).unwrap();
            assert!(v < 1e-12, "{name} alpha={}: kms {v:.3e}", level.label);
        }
    }
}

#[test]
fn contour_matches_dp() {
    for (name, model, trunc) in common::demo_models() {
        let table = canonical::canonical_partitions(&model, &trunc).unwrap();
        let m = 2 * trunc.hard_cap(&model) + 2;
        for n in 0..=table.n_max() {
            let contour = canonical::canonical_partition_contour(&model, &trunc, n, m).unwrap();
            let dp = table.z(n);
            assert!(
                (contour.value - dp).abs() <= 1e-12 * dp.max(1.0),
                "{name} N={n}: contour {} vs dp {dp}",
                contour.value
            );
        }
    }
}

#[test]
fn identity_certificates() {
    for (name, model, trunc) in common::demo_models() {
        let hs = thermo::hs_identity_residual(&model, &trunc, 1e-12).unwrap();
        assert!(hs.residual < 1e-10, "{name}: residual {:.3e}", hs.residual);
        assert!(
            hs.residual_naive > 100.0 * hs.residual,
            "{name}: naive {:.3e} vs {:.3e}",
            hs.residual_naive,
            hs.residual
        );
        let op = oracle::verify_operator_hs(&model, &trunc, 1e-12).unwrap();
        assert!(op < 1e-8, "{name}: operator identity {op:.3e}");
        if model.statistics == Statistics::Fermion {
            for level in &model.levels {
                let r =
                    oracle::fermi_shifted_occupation_check(&model, &trunc, &level.label).unwrap();
                assert!(r < 1e-12, "{name} alpha={}: {r:.3e}", level.label);
            }
        }
    }
}

#[test]
fn one_site_series_matches_oracle_trace() {
    let pair = thermo::naive_vs_exact_one_site(1.0, 1.0, 0.0, 40).unwrap();
    let model = model::ModelSpec {
        statistics: Statistics::Boson,
        levels: common::levels(&[0.0]),
        u: 1.0,
        beta: 1.0,
        mu: 0.0,
    };
    let trunc = model::TruncationPolicy {
        n_max_per_level: 40,
        n_max: model::NMax::Fixed(40),
        tail_tol: 1e-16,
    };
    let trace = oracle::exact_grand_partition(&model, &trunc).unwrap();
    assert!((pair.exact - trace).abs() < 1e-12 * trace);
    let gap = (pair.exact - pair.naive).abs() / pair.exact;
    assert!(gap > 0.1, "reported series gap {gap:.3}");
}

#[test]
fn coherent_checkpoint_and_spin_traces() {
    let amp = subtlety::CoherentAmplitudes {
        z: num_complex::Complex64::new(1.0, 0.0),
        w: num_complex::Complex64::new(1.0, 0.0),
    };
    for t in [0.0, 0.9, 3.1] {
        let direct = subtlety::coherent_matrix_element_direct(&amp, 1.3, t, 60).unwrap();
        let wick = subtlety::coherent_matrix_element_hs(&amp, 1.3, t, 60).unwrap();
        assert!((direct - wick).norm() < 1e-14);
    }
    let spin = subtlety::spin_hs_counterexample(1.0, 32).unwrap();
    assert!((spin.rhs_quadrature - spin.rhs_closed).abs() < 1e-10 * spin.rhs_closed);
    assert!(spin.lhs > spin.rhs_closed);
}
