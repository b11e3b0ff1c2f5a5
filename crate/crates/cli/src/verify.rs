//! The `verify` subcommand: one named residual per library invariant, run
//! against the configured model. A row passes when its value is strictly
//! below its tolerance; the report is byte-deterministic for a fixed config.

use num_complex::Complex64;
use serde::Serialize;

use hubatom_core::model::{ModelSpec, Statistics, TruncationPolicy};
use hubatom_core::{canonical, green, oracle, subtlety, thermo};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckRow>,
    pub pass: bool,
}

fn row(rows: &mut Vec<CheckRow>, name: &'static str, value: f64, tolerance: f64) {
    rows.push(CheckRow {
        name,
        value,
        tolerance,
        pass: value < tolerance,
    });
}

/// Names the suite must emit for a given statistics; the unit tests pin
/// this list so a silently dropped check fails the harness.
#[cfg(test)]
pub fn expected_check_names(statistics: Statistics) -> Vec<&'static str> {
    let mut names = vec![
        "canonical.z0_is_one",
        "canonical.occupation_sum_rule",
        "canonical.contour_route_equivalence",
        "thermo.grand_partition_oracle",
        "thermo.occupation_oracle",
        "thermo.one_site_series_oracle",
        "thermo.hs_identity",
        "thermo.hs_naive_separation",
        "green.commutator_sum_rule",
        "green.spectral_sum_rule",
        "green.lesser_lines_oracle",
        "green.greater_lines_oracle",
        "green.spectral_lines_oracle",
        "green.time_series_oracle",
        "green.kms_identity",
        "oracle.operator_identity",
        "subtlety.coherent_route_agreement",
        "subtlety.short_time_naive_zero",
        "subtlety.short_time_exact_coefficient",
        "subtlety.generalized_decoupling",
        "subtlety.spin_quadrature_vs_closed",
        "subtlety.spin_trace_inequality",
    ];
    if statistics == Statistics::Fermion {
        names.extend([
            "green.fermion_spectral_positivity",
            "oracle.fermion_spectral_special_route",
            "oracle.fermi_shifted_occupation",
        ]);
    }
    names
}

/// Run every check. `naive_hs` swaps the unshifted average into the
/// identity row, the deliberate foil that must fail.
pub fn run(config: &RunConfig, naive_hs: bool) -> Result<VerifyReport, String> {
    let model = config.model();
    let trunc = config.truncation();
    let tol = &config.tolerances;
    let mut rows = Vec::new();

    canonical_checks(model, trunc, &mut rows).map_err(|e| e.to_string())?;
    thermo_checks(model, trunc, tol, naive_hs, &mut rows).map_err(|e| e.to_string())?;
    green_checks(model, trunc, tol, &mut rows).map_err(|e| e.to_string())?;
    oracle_checks(model, trunc, tol, &mut rows).map_err(|e| e.to_string())?;
    subtlety_checks(trunc, &mut rows).map_err(|e| e.to_string())?;

    let pass = rows.iter().all(|r| r.pass);
    Ok(VerifyReport { checks: rows, pass })
}

fn canonical_checks(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    rows: &mut Vec<CheckRow>,
) -> hubatom_core::Result<()> {
    let table = canonical::canonical_partitions(model, trunc)?;
    row(rows, "canonical.z0_is_one", (table.z(0) - 1.0).abs(), 1e-15);

    let mut sum_rule: f64 = 0.0;
    for n in 0..=table.n_max() {
        let total: f64 = (0..model.level_count()).map(|a| table.w(a, n)).sum();
        let want = n as f64 * table.z(n);
        sum_rule = sum_rule.max((total - want).abs() / want.max(1.0));
    }
    row(rows, "canonical.occupation_sum_rule", sum_rule, 1e-12);

    let m = 2 * trunc.hard_cap(model) + 2;
    let mut contour_gap: f64 = 0.0;
    for n in 0..=table.n_max() {
        let contour = canonical::canonical_partition_contour(model, trunc, n, m)?;
        contour_gap = contour_gap.max((contour.value - table.z(n)).abs() / table.z(n).max(1.0));
    }
    row(rows, "canonical.contour_route_equivalence", contour_gap, 1e-12);
    Ok(())
}

fn thermo_checks(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    tol: &crate::config::Tolerances,
    naive_hs: bool,
    rows: &mut Vec<CheckRow>,
) -> hubatom_core::Result<()> {
    let grand = thermo::grand_partition_interacting(model, trunc)?;
    let exact = oracle::exact_grand_partition(model, trunc)?;
    row(
        rows,
        "thermo.grand_partition_oracle",
        (grand.xi_u - exact).abs() / exact,
        tol.oracle_rel_tol,
    );

    let mut occupation_gap: f64 = 0.0;
    for (a, level) in model.levels.iter().enumerate() {
        let want = oracle::exact_occupation(model, trunc, &level.label)?;
        occupation_gap = occupation_gap.max((grand.mean_occupation[a] - want).abs() / want);
    }
    row(rows, "thermo.occupation_oracle", occupation_gap, tol.oracle_rel_tol);

    // Single-site series against its own enumeration trace, at the model's
    // couplings where meaningful (fixed reference values otherwise).
    let (one_u, one_beta, one_mu) = (1.0, 1.0, 0.0);
    let pair = thermo::naive_vs_exact_one_site(one_u, one_beta, one_mu, 40)?;
    let one_site_model = ModelSpec {
        statistics: Statistics::Boson,
        levels: vec![hubatom_core::model::Level {
            label: "site".into(),
            energy: 0.0,
        }],
        u: one_u,
        beta: one_beta,
        mu: one_mu,
    };
    let one_site_trunc = TruncationPolicy {
        n_max_per_level: 40,
        n_max: hubatom_core::model::NMax::Fixed(40),
        tail_tol: 1e-16,
    };
    let trace = oracle::exact_grand_partition(&one_site_model, &one_site_trunc)?;
    row(
        rows,
        "thermo.one_site_series_oracle",
        (pair.exact - trace).abs() / trace,
        tol.oracle_rel_tol,
    );

    let hs = thermo::hs_identity_residual(model, trunc, tol.quad_rel_tol)?;
    let identity_value = if naive_hs { hs.residual_naive } else { hs.residual };
    row(rows, "thermo.hs_identity", identity_value, tol.hs_rel_tol);
    row(
        rows,
        "thermo.hs_naive_separation",
        hs.residual / hs.residual_naive,
        0.01,
    );
    Ok(())
}

fn green_checks(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    tol: &crate::config::Tolerances,
    rows: &mut Vec<CheckRow>,
) -> hubatom_core::Result<()> {
    let s = model.statistics.sign();
    let mut commutator: f64 = 0.0;
    let mut spectral_total: f64 = 0.0;
    let mut lesser_gap: f64 = 0.0;
    let mut greater_gap: f64 = 0.0;
    let mut spectral_gap: f64 = 0.0;
    let mut series_gap: f64 = 0.0;
    let mut kms: f64 = 0.0;
    let mut negativity: f64 = 0.0;

    let times: Vec<f64> = (0..32).map(|i| i as f64 * 10.0 * model.beta / 31.0).collect();

    for level in &model.levels {
        let alpha = &level.label;
        let n: f64 = green::fractional_parentage_n(model, trunc, alpha)?.iter().sum();
        let p: f64 = green::fractional_parentage_p(model, trunc, alpha)?.iter().sum();
        commutator = commutator.max((p - s * n - 1.0).abs());

        let spectral = green::spectral_lines(model, trunc, alpha)?;
        spectral_total = spectral_total.max((spectral.total_weight() - 1.0).abs());
        negativity = negativity.max(
            spectral
                .lines
                .iter()
                .map(|l| -l.weight)
                .fold(0.0_f64, f64::max),
        );

        lesser_gap = lesser_gap.max(
            green::lesser_lines(model, trunc, alpha)?
                .max_weight_gap(&oracle::exact_lesser_lines(model, trunc, alpha)?),
        );
        greater_gap = greater_gap.max(
            green::greater_lines(model, trunc, alpha)?
                .max_weight_gap(&oracle::exact_greater_lines(model, trunc, alpha)?),
        );
        spectral_gap = spectral_gap
            .max(spectral.max_weight_gap(&oracle::exact_spectral_lines(model, trunc, alpha)?));

        for kind in [green::GreenKind::Lesser, green::GreenKind::Greater] {
            let series = green::green_time_series(model, trunc, alpha, kind, &times)?;
            let scale = series.values.iter().map(|v| v.norm()).fold(1.0_f64, f64::max);
            for (t, got) in times.iter().zip(&series.values) {
                let want = match kind {
                    green::GreenKind::Lesser => oracle::exact_lesser_time(model, trunc, alpha, *t)?,
                    green::GreenKind::Greater => {
                        oracle::exact_greater_time(model, trunc, alpha, *t)?
                    }
                };
                series_gap = series_gap.max((got - want).norm() / scale);
            }
        }

        kms = kms.max(green::kms_check(model, trunc, alpha)?);
    }

    row(rows, "green.commutator_sum_rule", commutator, 1e-12);
    row(rows, "green.spectral_sum_rule", spectral_total, 1e-12);
    row(rows, "green.lesser_lines_oracle", lesser_gap, tol.oracle_rel_tol);
    row(rows, "green.greater_lines_oracle", greater_gap, tol.oracle_rel_tol);
    row(rows, "green.spectral_lines_oracle", spectral_gap, tol.oracle_rel_tol);
    row(rows, "green.time_series_oracle", series_gap, tol.oracle_rel_tol);
    row(rows, "green.kms_identity", kms, 1e-12);
    if model.statistics == Statistics::Fermion {
        row(rows, "green.fermion_spectral_positivity", negativity.max(0.0), 1e-14);
    }
    Ok(())
}

fn oracle_checks(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    tol: &crate::config::Tolerances,
    rows: &mut Vec<CheckRow>,
) -> hubatom_core::Result<()> {
    // Relative over sectors above the quadrature's resolvable floor; see
    // the library docs for why deeper sectors carry no signal in doubles.
    let operator = oracle::verify_operator_hs(model, trunc, tol.quad_rel_tol)?;
    row(rows, "oracle.operator_identity", operator, 1e-8);

    if model.statistics == Statistics::Fermion {
        let mut special_gap: f64 = 0.0;
        let mut shifted: f64 = 0.0;
        for level in &model.levels {
            let alpha = &level.label;
            let merged = oracle::exact_spectral_lines(model, trunc, alpha)?;
            let special = oracle::exact_spectral_special_fermion(model, trunc, alpha)?;
            special_gap = special_gap.max(merged.max_weight_gap(&special));
            shifted = shifted.max(oracle::fermi_shifted_occupation_check(model, trunc, alpha)?);
        }
        row(
            rows,
            "oracle.fermion_spectral_special_route",
            special_gap,
            tol.oracle_rel_tol,
        );
        row(rows, "oracle.fermi_shifted_occupation", shifted, tol.oracle_rel_tol);
    }
    Ok(())
}

fn subtlety_checks(
    trunc: &TruncationPolicy,
    rows: &mut Vec<CheckRow>,
) -> hubatom_core::Result<()> {
    let amp = subtlety::CoherentAmplitudes {
        z: Complex64::new(1.0, 0.0),
        w: Complex64::new(1.0, 0.0),
    };
    let mut route_gap: f64 = 0.0;
    for (u, t) in [(1.0, 0.0), (1.0, std::f64::consts::PI), (0.7, 1.3), (2.5, -0.4)] {
        let direct = subtlety::coherent_matrix_element_direct(&amp, u, t, 60)?;
        let wick = subtlety::coherent_matrix_element_hs(&amp, u, t, 60)?;
        route_gap = route_gap.max((direct - wick).norm());
    }
    row(rows, "subtlety.coherent_route_agreement", route_gap, 1e-14);

    let mismatch = subtlety::short_time_mismatch(&amp, 1.0, 1e-6, 40)?;
    row(
        rows,
        "subtlety.short_time_naive_zero",
        mismatch.naive_coeff.norm(),
        1e-300,
    );
    row(
        rows,
        "subtlety.short_time_exact_coefficient",
        (mismatch.exact_coeff - Complex64::new(0.0, -1.0)).norm(),
        1e-12,
    );

    let binary = TruncationPolicy {
        n_max_per_level: 1,
        ..trunc.clone()
    };
    let generalized = subtlety::generalized_hs_residual(
        &[0.0, 0.5],
        &[vec![1.0, 0.5], vec![0.5, 1.0]],
        1.0,
        &binary,
        64,
    )?;
    row(rows, "subtlety.generalized_decoupling", generalized, 1e-8);

    let spin = subtlety::spin_hs_counterexample(1.0, 32)?;
    row(
        rows,
        "subtlety.spin_quadrature_vs_closed",
        (spin.rhs_quadrature - spin.rhs_closed).abs() / spin.rhs_closed,
        1e-10,
    );
    let mut worst_ratio: f64 = 0.0;
    for beta_j in [0.1, 1.0, 5.0] {
        let traces = subtlety::spin_hs_counterexample(beta_j, 32)?;
        worst_ratio = worst_ratio.max(traces.rhs_closed / traces.lhs);
    }
    // Strictly below 1: the operator promotion provably overcounts the trace.
    row(rows, "subtlety.spin_trace_inequality", worst_ratio, 1.0);
    Ok(())
}

/// Fixed-width text table, one row per check.
pub fn render_text(report: &VerifyReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<42} {:>24} {:>10} {:>7}\n",
        "check", "value", "tolerance", "status"
    ));
    for check in &report.checks {
        out.push_str(&format!(
            "{:<42} {:>24.15e} {:>10.1e} {:>7}\n",
            check.name,
            check.value,
            check.tolerance,
            if check.pass { "PASS" } else { "FAIL" }
        ));
    }
    let failures = report.checks.iter().filter(|c| !c.pass).count();
    out.push_str(&format!(
        "verify: {} ({} checks, {} failures)\n",
        if report.pass { "PASS" } else { "FAIL" },
        report.checks.len(),
        failures
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    const FERMION: &str = r#"{
        "statistics": "fermion",
        "levels": [{"label": "1", "energy": 0.0}, {"label": "2", "energy": 0.5}],
        "U": 1.0, "beta": 1.0, "mu": 0.0,
        "truncation": {"n_max_per_level": 6, "N_max": "auto", "tail_tol": 1e-16}
    }"#;

    const BOSON: &str = r#"{
        "statistics": "boson",
        "levels": [{"label": "1", "energy": 1.0}],
        "U": 1.0, "beta": 1.0, "mu": -1.0,
        "truncation": {"n_max_per_level": 10, "N_max": "auto", "tail_tol": 1e-16}
    }"#;

    #[test]
    fn every_named_check_is_emitted() {
        for (text, statistics) in [
            (FERMION, Statistics::Fermion),
            (BOSON, Statistics::Boson),
        ] {
            let config = RunConfig::from_json(text).unwrap();
            let report = run(&config, false).unwrap();
            let emitted: Vec<&str> = report.checks.iter().map(|c| c.name).collect();
            let mut expected = expected_check_names(statistics);
            let mut sorted = emitted.clone();
            sorted.sort_unstable();
            expected.sort_unstable();
            assert_eq!(sorted, expected, "check name drift");
            assert!(report.pass, "{}", render_text(&report));
        }
    }

    #[test]
    fn naive_foil_fails_only_the_identity_row() {
        let config = RunConfig::from_json(FERMION).unwrap();
        let report = run(&config, true).unwrap();
        assert!(!report.pass);
        for check in &report.checks {
            if check.name == "thermo.hs_identity" {
                assert!(!check.pass);
            } else {
                assert!(check.pass, "{} unexpectedly failed", check.name);
            }
        }
    }

    #[test]
    fn text_report_is_deterministic() {
        let config = RunConfig::from_json(FERMION).unwrap();
        let a = render_text(&run(&config, false).unwrap());
        let b = render_text(&run(&config, false).unwrap());
        assert_eq!(a, b);
    }
}
