//! `hubatom`: exact thermodynamics, spectra, and identity verification for
//! locally interacting multi-level systems.
//!
//! Subcommands: `verify`, `thermo`, `spectral`, `green`, `subtlety`.
//! Exit codes: 0 all checks pass / data written; 1 a verification check
//! failed; 2 usage or config error.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > y) guards reject NaN

mod config;
mod verify;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use hubatom_core::model::ModelSpec;
use hubatom_core::{green, subtlety, thermo, Error};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "hubatom", version)]
#[command(about = "Exact solver and verifier for locally interacting multi-level systems")]
struct Cli {
    /// Model + tolerance config (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format for data exports
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Verification foil: run the identity check with the unshifted
    /// Gaussian average (the check must then fail)
    #[arg(long, global = true)]
    naive_hs: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LineKindArg {
    Lesser,
    Greater,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesKindArg {
    Lesser,
    Greater,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full residual suite against the configured model
    Verify,
    /// Grand-canonical thermodynamics and identity residuals (JSON)
    Thermo,
    /// Delta-line decomposition for one level, optionally Lorentz-broadened
    Spectral {
        /// Level label
        #[arg(long)]
        alpha: String,
        #[arg(long, value_enum)]
        kind: LineKindArg,
        /// Lorentzian half-width; emits a broadened curve instead of lines
        #[arg(long)]
        eta: Option<f64>,
        /// Broadening grid bounds (defaults: line range padded by 5)
        #[arg(long)]
        grid_min: Option<f64>,
        #[arg(long)]
        grid_max: Option<f64>,
        #[arg(long, default_value_t = 2001)]
        grid_points: usize,
    },
    /// Time samples of the lesser/greater function for one level
    Green {
        #[arg(long)]
        alpha: String,
        #[arg(long, value_enum)]
        kind: SeriesKindArg,
        /// Last sample time
        #[arg(long)]
        t_max: f64,
        /// Number of samples (1 gives the t=0 point alone)
        #[arg(long)]
        n_t: usize,
    },
    /// Operator-ordering demonstrations (coherent matrix elements,
    /// short-time truncation, spin-trace counterexample)
    Subtlety {
        /// Print only the spin-trace section
        #[arg(long)]
        spin: bool,
        #[arg(long = "betaJ", default_value_t = 1.0)]
        beta_j: f64,
        /// Tensor-quadrature nodes per dimension
        #[arg(long, default_value_t = 32)]
        nodes: usize,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
}

/// Failure modes mapped to exit codes.
enum CliFailure {
    /// Exit 2: bad usage, unreadable or invalid config.
    Usage(String),
    /// Exit 1: a verification check failed.
    Check,
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        CliFailure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliFailure::Check) => ExitCode::from(1),
        Err(CliFailure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliFailure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliFailure::Usage("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliFailure::Usage(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(CliFailure::Usage)
}

fn emit(cli: &Cli, payload: &str) -> Result<(), CliFailure> {
    match &cli.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliFailure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliFailure> {
    match &cli.command {
        Command::Verify => cmd_verify(cli),
        Command::Thermo => cmd_thermo(cli),
        Command::Spectral {
            alpha,
            kind,
            eta,
            grid_min,
            grid_max,
            grid_points,
        } => cmd_spectral(cli, alpha, *kind, *eta, *grid_min, *grid_max, *grid_points),
        Command::Green {
            alpha,
            kind,
            t_max,
            n_t,
        } => cmd_green(cli, alpha, *kind, *t_max, *n_t),
        Command::Subtlety {
            spin,
            beta_j,
            nodes,
            json,
        } => cmd_subtlety(cli, *spin, *beta_j, *nodes, *json),
    }
}

fn cmd_verify(cli: &Cli) -> Result<(), CliFailure> {
    let config = load_config(cli)?;
    let report = verify::run(&config, cli.naive_hs).map_err(CliFailure::Usage)?;
    let payload = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => verify::render_text(&report),
    };
    emit(cli, &payload)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliFailure::Check)
    }
}

#[derive(Serialize)]
struct ThermoOut {
    #[serde(rename = "xi_U")]
    xi_u: f64,
    #[serde(rename = "mean_N")]
    mean_n: f64,
    occupations: BTreeMap<String, f64>,
    hs_residual: Option<f64>,
    hs_residual_naive: Option<f64>,
    nodes_used: Option<usize>,
}

fn cmd_thermo(cli: &Cli) -> Result<(), CliFailure> {
    let config = load_config(cli)?;
    let model = config.model();
    let grand = thermo::grand_partition_interacting(model, config.truncation())
        .map_err(CliFailure::from)?;

    // The identity check needs U > 0 and, for bosons, the shifted-argument
    // domain; outside it the thermodynamics is still reported with nulls.
    let hs = match thermo::hs_identity_residual(model, config.truncation(), config.tolerances.quad_rel_tol) {
        Ok(report) => Some(report),
        Err(Error::InvalidArgument(_)) | Err(Error::BosonShiftDomain { .. }) => None,
        Err(e) => return Err(e.into()),
    };

    let occupations = model
        .levels
        .iter()
        .zip(&grand.mean_occupation)
        .map(|(level, &occ)| (level.label.clone(), occ))
        .collect();
    let out = ThermoOut {
        xi_u: grand.xi_u,
        mean_n: grand.mean_n,
        occupations,
        hs_residual: hs.map(|h| h.residual),
        hs_residual_naive: hs.map(|h| h.residual_naive),
        nodes_used: hs.map(|h| h.nodes),
    };
    emit(cli, &format!("{}\n", serde_json::to_string_pretty(&out).unwrap()))
}

#[derive(Serialize)]
struct LinesOut<'a> {
    alpha: &'a str,
    kind: &'a str,
    convention_note: &'a str,
    lines: Vec<LineOut>,
}

#[derive(Serialize)]
struct LineOut {
    energy: f64,
    weight: f64,
}

#[derive(Serialize)]
struct BroadenedOut<'a> {
    alpha: &'a str,
    kind: &'a str,
    eta: f64,
    samples: Vec<LineOut>,
}

fn line_set(
    model: &ModelSpec,
    config: &RunConfig,
    alpha: &str,
    kind: LineKindArg,
) -> Result<green::SpectralLineSet, CliFailure> {
    let trunc = config.truncation();
    let set = match kind {
        LineKindArg::Lesser => green::lesser_lines(model, trunc, alpha),
        LineKindArg::Greater => green::greater_lines(model, trunc, alpha),
        LineKindArg::Spectral => green::spectral_lines(model, trunc, alpha),
    };
    set.map_err(CliFailure::from)
}

fn kind_name(kind: LineKindArg) -> &'static str {
    match kind {
        LineKindArg::Lesser => "lesser",
        LineKindArg::Greater => "greater",
        LineKindArg::Spectral => "spectral",
    }
}

fn cmd_spectral(
    cli: &Cli,
    alpha: &str,
    kind: LineKindArg,
    eta: Option<f64>,
    grid_min: Option<f64>,
    grid_max: Option<f64>,
    grid_points: usize,
) -> Result<(), CliFailure> {
    let config = load_config(cli)?;
    let set = line_set(config.model(), &config, alpha, kind)?;

    let payload = match eta {
        None => match cli.format {
            Format::Csv => set.to_csv(),
            Format::Json => {
                let out = LinesOut {
                    alpha,
                    kind: kind_name(kind),
                    convention_note: &set.convention_note,
                    lines: set
                        .lines
                        .iter()
                        .map(|l| LineOut {
                            energy: l.energy,
                            weight: l.weight,
                        })
                        .collect(),
                };
                format!("{}\n", serde_json::to_string_pretty(&out).unwrap())
            }
        },
        Some(eta) => {
            if grid_points < 2 {
                return Err(CliFailure::Usage("--grid-points must be at least 2".into()));
            }
            let (lo_default, hi_default) = match (set.lines.first(), set.lines.last()) {
                (Some(first), Some(last)) => (first.energy - 5.0, last.energy + 5.0),
                _ => (-5.0, 5.0),
            };
            let lo = grid_min.unwrap_or(lo_default);
            let hi = grid_max.unwrap_or(hi_default);
            if !(hi > lo) {
                return Err(CliFailure::Usage("--grid-max must exceed --grid-min".into()));
            }
            let step = (hi - lo) / (grid_points - 1) as f64;
            let grid: Vec<f64> = (0..grid_points).map(|i| lo + i as f64 * step).collect();
            let samples = green::broadened_spectrum(&set, eta, &grid).map_err(CliFailure::from)?;
            match cli.format {
                Format::Csv => {
                    let mut out = String::from("energy,rho\n");
                    for (e, rho) in &samples {
                        out.push_str(&format!("{:.16e},{:.16e}\n", e, rho));
                    }
                    out
                }
                Format::Json => {
                    let out = BroadenedOut {
                        alpha,
                        kind: kind_name(kind),
                        eta,
                        samples: samples
                            .iter()
                            .map(|&(energy, weight)| LineOut { energy, weight })
                            .collect(),
                    };
                    format!("{}\n", serde_json::to_string_pretty(&out).unwrap())
                }
            }
        }
    };
    emit(cli, &payload)
}

#[derive(Serialize)]
struct SeriesOut<'a> {
    alpha: &'a str,
    kind: &'a str,
    samples: Vec<SampleOut>,
}

#[derive(Serialize)]
struct SampleOut {
    t: f64,
    re: f64,
    im: f64,
}

fn cmd_green(
    cli: &Cli,
    alpha: &str,
    kind: SeriesKindArg,
    t_max: f64,
    n_t: usize,
) -> Result<(), CliFailure> {
    let config = load_config(cli)?;
    if n_t == 0 {
        return Err(CliFailure::Usage("--n-t must be at least 1".into()));
    }
    if t_max < 0.0 {
        return Err(CliFailure::Usage("--t-max must be nonnegative".into()));
    }
    let times: Vec<f64> = if n_t == 1 {
        vec![0.0]
    } else {
        (0..n_t)
            .map(|i| i as f64 * t_max / (n_t - 1) as f64)
            .collect()
    };
    let green_kind = match kind {
        SeriesKindArg::Lesser => green::GreenKind::Lesser,
        SeriesKindArg::Greater => green::GreenKind::Greater,
    };
    let series = green::green_time_series(config.model(), config.truncation(), alpha, green_kind, &times)
        .map_err(CliFailure::from)?;
    let payload = match cli.format {
        Format::Csv => series.to_csv(),
        Format::Json => {
            let out = SeriesOut {
                alpha,
                kind: match kind {
                    SeriesKindArg::Lesser => "lesser",
                    SeriesKindArg::Greater => "greater",
                },
                samples: series
                    .times
                    .iter()
                    .zip(&series.values)
                    .map(|(&t, v)| SampleOut {
                        t,
                        re: v.re,
                        im: v.im,
                    })
                    .collect(),
            };
            format!("{}\n", serde_json::to_string_pretty(&out).unwrap())
        }
    };
    emit(cli, &payload)
}

#[derive(Serialize)]
struct CxOut {
    re: f64,
    im: f64,
}

impl From<Complex64> for CxOut {
    fn from(v: Complex64) -> Self {
        CxOut { re: v.re, im: v.im }
    }
}

#[derive(Serialize)]
struct SpinOut {
    beta_j: f64,
    nodes_per_dim: usize,
    lhs_trace: f64,
    rhs_closed: f64,
    rhs_quadrature: f64,
}

#[derive(Serialize)]
struct SubtletyOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    coherent: Option<CoherentOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    short_time: Option<ShortTimeOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generalized_residual: Option<f64>,
    spin: SpinOut,
}

#[derive(Serialize)]
struct CoherentOut {
    u: f64,
    t: f64,
    direct: CxOut,
    wick: CxOut,
    route_gap: f64,
}

#[derive(Serialize)]
struct ShortTimeOut {
    exact_coeff: CxOut,
    naive_coeff: CxOut,
}

fn cmd_subtlety(
    cli: &Cli,
    spin_only: bool,
    beta_j: f64,
    nodes: usize,
    json: bool,
) -> Result<(), CliFailure> {
    let spin = subtlety::spin_hs_counterexample(beta_j, nodes).map_err(CliFailure::from)?;
    let spin_out = SpinOut {
        beta_j,
        nodes_per_dim: nodes,
        lhs_trace: spin.lhs,
        rhs_closed: spin.rhs_closed,
        rhs_quadrature: spin.rhs_quadrature,
    };

    let (coherent, short_time, generalized) = if spin_only {
        (None, None, None)
    } else {
        let amp = subtlety::CoherentAmplitudes {
            z: Complex64::new(1.0, 0.0),
            w: Complex64::new(1.0, 0.0),
        };
        let (u, t) = (1.0, std::f64::consts::PI);
        let direct =
            subtlety::coherent_matrix_element_direct(&amp, u, t, 60).map_err(CliFailure::from)?;
        let wick =
            subtlety::coherent_matrix_element_hs(&amp, u, t, 60).map_err(CliFailure::from)?;
        let mismatch =
            subtlety::short_time_mismatch(&amp, u, 1e-6, 40).map_err(CliFailure::from)?;
        let binary = hubatom_core::model::TruncationPolicy {
            n_max_per_level: 1,
            ..Default::default()
        };
        let generalized = subtlety::generalized_hs_residual(
            &[0.0, 0.5],
            &[vec![1.0, 0.5], vec![0.5, 1.0]],
            1.0,
            &binary,
            64,
        )
        .map_err(CliFailure::from)?;
        (
            Some(CoherentOut {
                u,
                t,
                direct: direct.into(),
                wick: wick.into(),
                route_gap: (direct - wick).norm(),
            }),
            Some(ShortTimeOut {
                exact_coeff: mismatch.exact_coeff.into(),
                naive_coeff: mismatch.naive_coeff.into(),
            }),
            Some(generalized),
        )
    };

    let payload = if json || cli.format == Format::Json {
        let out = SubtletyOut {
            coherent,
            short_time,
            generalized_residual: generalized,
            spin: spin_out,
        };
        format!("{}\n", serde_json::to_string_pretty(&out).unwrap())
    } else {
        let mut out = String::new();
        if let Some(c) = &coherent {
            out.push_str(&format!(
                "coherent matrix element (z=w=1, U={}, t={:.15e}):\n  direct = {:.15e} {:+.15e}i\n  wick   = {:.15e} {:+.15e}i\n  gap    = {:.3e}\n",
                c.u, c.t, c.direct.re, c.direct.im, c.wick.re, c.wick.im, c.route_gap
            ));
        }
        if let Some(st) = &short_time {
            out.push_str(&format!(
                "short-time linear coefficients:\n  exact = {:.15e} {:+.15e}i\n  naive = {:.15e} {:+.15e}i (linear truncation before averaging)\n",
                st.exact_coeff.re, st.exact_coeff.im, st.naive_coeff.re, st.naive_coeff.im
            ));
        }
        if let Some(g) = generalized {
            out.push_str(&format!(
                "generalized commuting-operator decoupling residual (2 levels, 64 nodes): {:.3e}\n",
                g
            ));
        }
        out.push_str(&format!(
            "spin-1/2 trace counterexample at betaJ = {:.15e} ({} nodes/dim):\n  trace of exp(betaJ S^2)  = {:.15e}\n  decoupled side (closed)  = {:.15e}\n  decoupled side (quad)    = {:.15e}\n",
            spin_out.beta_j,
            spin_out.nodes_per_dim,
            spin_out.lhs_trace,
            spin_out.rhs_closed,
            spin_out.rhs_quadrature
        ));
        out
    };
    emit(cli, &payload)
}
