//! One-particle Green functions of the locally interacting system, in
//! closed form: spectral line decompositions over locked-N sectors and the
//! corresponding time series (hbar = 1).
//!
//! The building blocks are the fractional parentage weights
//! `n_{a|N} = W_{a,N} e^{beta mu N - beta U N(N-1)/2} / Xi_U` (particle) and
//! `p_{a|N} = (Z_N + s W_{a,N}) e^{...} / Xi_U` (hole), with
//! `W_{a,N} = -(1/beta) dZ_N/d eps_a` taken from the canonical table and
//! `s = +1` (bosons) / `-1` (fermions). The lesser function has lines at
//! `eps_a + U(N-1)`, the greater at `eps_a + U N`.

use num_complex::Complex64;

use crate::canonical::{self, CanonicalTable};
use crate::exec;
use crate::model::{ModelSpec, TruncationPolicy};
use crate::{Error, Result};

/// Ratio below which two line energies count as the same line.
const MERGE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Lesser,
    Greater,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub energy: f64,
    pub weight: f64,
}

/// Delta-line decomposition of one Green-function component for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLineSet {
    pub kind: LineKind,
    pub alpha: String,
    pub lines: Vec<SpectralLine>,
    /// Where the textbook prefactors went; weights here are always bare.
    pub convention_note: String,
}

impl SpectralLineSet {
    /// Sort raw (energy, weight) pairs, merge lines closer than
    /// `1e-12 x max(1, |E|)` by weight addition, and optionally drop lines
    /// whose merged weight is exactly zero.
    pub(crate) fn from_raw(
        kind: LineKind,
        alpha: &str,
        note: &str,
        mut raw: Vec<(f64, f64)>,
        keep_zero_weights: bool,
    ) -> Self {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut lines: Vec<SpectralLine> = Vec::with_capacity(raw.len());
        for (energy, weight) in raw {
            match lines.last_mut() {
                Some(last) if (energy - last.energy).abs() <= MERGE_REL_TOL * energy.abs().max(1.0) => {
                    last.weight += weight;
                }
                _ => lines.push(SpectralLine { energy, weight }),
            }
        }
        if !keep_zero_weights {
            lines.retain(|l| l.weight != 0.0);
        }
        SpectralLineSet {
            kind,
            alpha: alpha.to_owned(),
            lines,
            convention_note: note.to_owned(),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.lines.iter().map(|l| l.weight).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.lines
            .iter()
            .map(|l| l.weight.abs())
            .fold(0.0, f64::max)
    }

    /// Largest weight difference against `other` on the union of the two
    /// energy grids, relative to the largest weight present. Lines missing
    /// on one side count with weight zero, so negligible far-tail lines do
    /// not poison the comparison.
    pub fn max_weight_gap(&self, other: &SpectralLineSet) -> f64 {
        let scale = self.max_weight().max(other.max_weight());
        if scale == 0.0 {
            return 0.0;
        }
        let tol = |e: f64| MERGE_REL_TOL * e.abs().max(1.0);
        let mut gap: f64 = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.lines.len() || j < other.lines.len() {
            let a = self.lines.get(i);
            let b = other.lines.get(j);
            match (a, b) {
                (Some(a), Some(b)) if (a.energy - b.energy).abs() <= tol(a.energy) => {
                    gap = gap.max((a.weight - b.weight).abs());
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.energy < b.energy => {
                    gap = gap.max(a.weight.abs());
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    gap = gap.max(b.weight.abs());
                    j += 1;
                }
                (Some(a), None) => {
                    gap = gap.max(a.weight.abs());
                    i += 1;
                }
                (None, Some(b)) => {
                    gap = gap.max(b.weight.abs());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        gap / scale
    }

    /// CSV with columns `energy, weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("energy,weight\n");
        for line in &self.lines {
            out.push_str(&format!("{:.16e},{:.16e}\n", line.energy, line.weight));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenKind {
    Lesser,
    Greater,
}

/// Complex time samples of `G^<` or `G^>` for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenSeries {
    pub kind: GreenKind,
    pub alpha: String,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl GreenSeries {
    /// CSV with columns `t, re, im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", t, v.re, v.im));
        }
        out
    }
}

/// Locked-N sector data shared by the thermodynamic and spectral closed
/// forms: the canonical table, the per-N terms of the interacting grand sum,
/// and their total.
pub(crate) struct Sectors {
    pub(crate) table: CanonicalTable,
    /// `Z_N e^{beta mu N - beta U N(N-1)/2}` for `N = 0..=n_max`.
    pub(crate) terms: Vec<f64>,
    pub(crate) xi_u: f64,
}

impl Sectors {
    pub(crate) fn new(model: &ModelSpec, trunc: &TruncationPolicy) -> Result<Sectors> {
        let table = canonical::canonical_partitions(model, trunc)?;
        let shift = table.energy_shift();
        let terms: Vec<f64> = (0..=table.n_max())
            .map(|n| table.scaled_z(n) * canonical::locked_weight(model, shift, n))
            .collect();
        let xi_u = exec::pairwise_sum(&terms);
        if table.n_max() < trunc.hard_cap(model) {
            let tail = terms[table.n_max()];
            let bound = trunc.tail_tol * xi_u;
            if tail > bound {
                return Err(Error::TruncationTail {
                    n_max: table.n_max(),
                    tail,
                    bound,
                });
            }
        }
        Ok(Sectors { table, terms, xi_u })
    }

    pub(crate) fn n_max(&self) -> usize {
        self.table.n_max()
    }

    /// `n_{a|N}` for all N.
    pub(crate) fn parentage_n(&self, model: &ModelSpec, alpha_idx: usize) -> Vec<f64> {
        let shift = self.table.energy_shift();
        (0..=self.n_max())
            .map(|n| {
                self.table.scaled_w(alpha_idx, n) * canonical::locked_weight(model, shift, n)
                    / self.xi_u
            })
            .collect()
    }

    /// `p_{a|N}` for all N; negative values beyond -1e-14 are a sign
    /// bookkeeping regression and abort.
    pub(crate) fn parentage_p(&self, model: &ModelSpec, alpha_idx: usize) -> Result<Vec<f64>> {
        let shift = self.table.energy_shift();
        let s = model.statistics.sign();
        let mut out = Vec::with_capacity(self.n_max() + 1);
        for n in 0..=self.n_max() {
            let value = (self.table.scaled_z(n) + s * self.table.scaled_w(alpha_idx, n))
                * canonical::locked_weight(model, shift, n)
                / self.xi_u;
            if value < -1e-14 {
                return Err(Error::NegativeParentage {
                    alpha: model.levels[alpha_idx].label.clone(),
                    n,
                    value,
                });
            }
            out.push(value);
        }
        Ok(out)
    }
}

/// Fractional parentage of the occupation onto fixed-N sectors;
/// `sum_N n_{a|N} = <n_a>`.
pub fn fractional_parentage_n(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<Vec<f64>> {
    let a = model.level_index(alpha)?;
    let sectors = Sectors::new(model, trunc)?;
    Ok(sectors.parentage_n(model, a))
}

/// Fractional parentage of the hole occupation; `sum_N p_{a|N} = 1 + s <n_a>`.
pub fn fractional_parentage_p(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<Vec<f64>> {
    let a = model.level_index(alpha)?;
    let sectors = Sectors::new(model, trunc)?;
    sectors.parentage_p(model, a)
}

const LESSER_NOTE: &str =
    "bare n_{a|N} weights; the energy-space lesser function carries -2*pi*i*s on top";
const GREATER_NOTE: &str =
    "bare p_{a|N} weights; the energy-space greater function carries -2*pi*i on top";
const SPECTRAL_NOTE: &str = "bare weights p_{a|N} - s n_{a|N+1}; total weight is 1";

/// Lesser lines `(eps_a + U(N-1), n_{a|N})`; exact-zero weights dropped.
pub fn lesser_lines(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<SpectralLineSet> {
    let a = model.level_index(alpha)?;
    let sectors = Sectors::new(model, trunc)?;
    let n = sectors.parentage_n(model, a);
    let eps = model.levels[a].energy;
    let raw = n
        .iter()
        .enumerate()
        .map(|(nn, &w)| (eps + model.u * (nn as f64 - 1.0), w))
        .collect();
    Ok(SpectralLineSet::from_raw(
        LineKind::Lesser,
        alpha,
        LESSER_NOTE,
        raw,
        false,
    ))
}

/// Greater lines `(eps_a + U N, p_{a|N})`; exact-zero weights dropped.
pub fn greater_lines(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<SpectralLineSet> {
    let a = model.level_index(alpha)?;
    let sectors = Sectors::new(model, trunc)?;
    let p = sectors.parentage_p(model, a)?;
    let eps = model.levels[a].energy;
    let raw = p
        .iter()
        .enumerate()
        .map(|(nn, &w)| (eps + model.u * nn as f64, w))
        .collect();
    Ok(SpectralLineSet::from_raw(
        LineKind::Greater,
        alpha,
        GREATER_NOTE,
        raw,
        false,
    ))
}

/// Spectral function lines on the merged grid `eps_a + U N`, weights
/// `p_{a|N} - s n_{a|N+1}`. The full grid is kept, including zero-weight
/// points: those mark sectors blocked by statistics rather than absent
/// excitation energies.
pub fn spectral_lines(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<SpectralLineSet> {
    let a = model.level_index(alpha)?;
    let sectors = Sectors::new(model, trunc)?;
    let n = sectors.parentage_n(model, a);
    let p = sectors.parentage_p(model, a)?;
    let s = model.statistics.sign();
    let eps = model.levels[a].energy;
    let raw = (0..=sectors.n_max())
        .map(|nn| {
            let hole = p[nn];
            let particle = if nn < sectors.n_max() { n[nn + 1] } else { 0.0 };
            (eps + model.u * nn as f64, hole - s * particle)
        })
        .collect();
    Ok(SpectralLineSet::from_raw(
        LineKind::Spectral,
        alpha,
        SPECTRAL_NOTE,
        raw,
        true,
    ))
}

/// Time samples of the lesser/greater function:
/// `G^<(t) = (s/i) sum_N e^{-i[eps_a + U(N-1)]t} n_{a|N}`,
/// `G^>(t) = (1/i) sum_N e^{-i(eps_a + U N)t} p_{a|N}`.
pub fn green_time_series(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
    kind: GreenKind,
    times: &[f64],
) -> Result<GreenSeries> {
    let a = model.level_index(alpha)?;
    let sectors = Sectors::new(model, trunc)?;
    let s = model.statistics.sign();
    let eps = model.levels[a].energy;

    let (weights, energies, prefactor): (Vec<f64>, Vec<f64>, Complex64) = match kind {
        GreenKind::Lesser => {
            let n = sectors.parentage_n(model, a);
            let e = (0..n.len()).map(|nn| eps + model.u * (nn as f64 - 1.0)).collect();
            (n, e, Complex64::new(0.0, -s))
        }
        GreenKind::Greater => {
            let p = sectors.parentage_p(model, a)?;
            let e = (0..p.len()).map(|nn| eps + model.u * nn as f64).collect();
            (p, e, Complex64::new(0.0, -1.0))
        }
    };

    let values = times
        .iter()
        .map(|&t| {
            let sum: Complex64 = weights
                .iter()
                .zip(&energies)
                .map(|(&w, &e)| Complex64::new(0.0, -e * t).exp() * w)
                .sum();
            prefactor * sum
        })
        .collect();

    Ok(GreenSeries {
        kind,
        alpha: alpha.to_owned(),
        times: times.to_vec(),
        values,
    })
}

/// Contour-ordered phase-field vertex correlator, a pure phase matrix:
/// rows/columns ordered (forward, backward) branch.
pub fn vertex_correlator(u: f64, t: f64) -> [[Complex64; 2]; 2] {
    let phase = |x: f64| Complex64::new(0.0, x).exp();
    let half = 0.5 * u;
    [
        [phase(-half * t.abs()), phase(half * t)],
        [phase(-half * t), phase(half * t.abs())],
    ]
}

/// Lorentzian broadening of a line set on the given energy grid:
/// `rho_eta(e) = sum_lines w (eta/pi) / ((e - E)^2 + eta^2)`.
pub fn broadened_spectrum(
    lines: &SpectralLineSet,
    eta: f64,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument("broadening eta must be positive".into()));
    }
    let over_pi = eta / std::f64::consts::PI;
    Ok(grid
        .iter()
        .map(|&e| {
            let rho: f64 = lines
                .lines
                .iter()
                .map(|l| l.weight * over_pi / ((e - l.energy).powi(2) + eta * eta))
                .sum();
            (e, rho)
        })
        .collect())
}

/// Detailed-balance check on the line weights:
/// `n_{a|N+1} = e^{-beta(eps_a + U N - mu)} p_{a|N}` for every N below the
/// ceiling. Returns the largest violation relative to the largest lesser
/// weight (per-line ratios are meaningless where both sides underflow).
pub fn kms_check(model: &ModelSpec, trunc: &TruncationPolicy, alpha: &str) -> Result<f64> {
    let a = model.level_index(alpha)?;
    let sectors = Sectors::new(model, trunc)?;
    let n = sectors.parentage_n(model, a);
    let p = sectors.parentage_p(model, a)?;
    let eps = model.levels[a].energy;
    let beta = model.beta;

    let scale = n.iter().copied().fold(f64::MIN_POSITIVE, f64::max);
    let mut worst: f64 = 0.0;
    for nn in 0..sectors.n_max() {
        let exponent = -beta * (eps + model.u * nn as f64 - model.mu);
        let rhs = if p[nn] > 0.0 {
            (exponent + p[nn].ln()).exp()
        } else {
            0.0
        };
        worst = worst.max((n[nn + 1] - rhs).abs());
    }
    Ok(worst / scale)
}
