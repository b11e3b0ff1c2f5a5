//! Canonical partition functions `Z_N` of the noninteracting level set and
//! the occupation-resolved weights `W_{a,N} = -(1/beta) dZ_N/d eps_a`, by
//! level-by-level dynamic programming, plus an independent contour route
//! that inverts the fugacity expansion of the noninteracting grand
//! partition function.
//!
//! Tables are stored against energies shifted by `min_a eps_a`, so the DP
//! never overflows; the shift re-enters downstream as an exact chemical
//! potential offset `Z_N = scaled_z[N] e^{-beta N shift}`.

use num_complex::Complex64;

use crate::model::{ModelSpec, NMax, Statistics, TruncationPolicy};
use crate::{quad, Error, Result};

/// `Z_N` and `W_{a,N}` for `N = 0..=n_max`, in shifted units.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalTable {
    labels: Vec<String>,
    beta: f64,
    energy_shift: f64,
    scaled_z: Vec<f64>,
    scaled_w: Vec<Vec<f64>>,
}

impl CanonicalTable {
    pub fn n_max(&self) -> usize {
        self.scaled_z.len() - 1
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The per-particle rescaling shift (the minimum level energy).
    pub fn energy_shift(&self) -> f64 {
        self.energy_shift
    }

    /// Canonical partition function at fixed particle number.
    pub fn z(&self, n: usize) -> f64 {
        self.scaled_z[n] * (-self.beta * n as f64 * self.energy_shift).exp()
    }

    /// Occupation weight `W_{a,N} = sum_{states, total N} n_a e^{-beta E}`.
    pub fn w(&self, alpha: usize, n: usize) -> f64 {
        self.scaled_w[alpha][n] * (-self.beta * n as f64 * self.energy_shift).exp()
    }

    pub(crate) fn scaled_z(&self, n: usize) -> f64 {
        self.scaled_z[n]
    }

    pub(crate) fn scaled_w(&self, alpha: usize, n: usize) -> f64 {
        self.scaled_w[alpha][n]
    }

    /// CSV with columns `N, Z`, then one `W` column per level label.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,Z");
        for label in &self.labels {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for n in 0..=self.n_max() {
            out.push_str(&format!("{n},{:.16e}", self.z(n)));
            for a in 0..self.labels.len() {
                out.push_str(&format!(",{:.16e}", self.w(a, n)));
            }
            out.push('\n');
        }
        out
    }

    fn truncate(mut self, n_max: usize) -> Self {
        self.scaled_z.truncate(n_max + 1);
        for row in &mut self.scaled_w {
            row.truncate(n_max + 1);
        }
        self
    }
}

/// Boltzmann factor of the locked-N sector on top of the scaled table:
/// `e^{beta N (mu - shift) - beta U N(N-1)/2}`. Multiplying this into
/// `scaled_z[N]` gives the physical `Z_N e^{beta mu N - beta U N(N-1)/2}`
/// with the rescaling shift folded in exactly.
pub(crate) fn locked_weight(model: &ModelSpec, energy_shift: f64, n: usize) -> f64 {
    let nf = n as f64;
    (model.beta * (nf * (model.mu - energy_shift) - model.u * nf * (nf - 1.0) / 2.0)).exp()
}

/// Full table up to the truncation hard cap, before any N ceiling applies.
fn build_full_table(model: &ModelSpec, trunc: &TruncationPolicy) -> CanonicalTable {
    let cap = trunc.level_cap(model.statistics);
    let n_top = trunc.hard_cap(model);
    let shift = model.min_energy();
    let n_levels = model.level_count();

    let mut z = vec![0.0_f64; n_top + 1];
    z[0] = 1.0;
    let mut w = vec![vec![0.0_f64; n_top + 1]; n_levels];

    for (j, level) in model.levels.iter().enumerate() {
        let x = (-model.beta * (level.energy - shift)).exp();
        // Occupancy factors x^i and i x^i for this level.
        let mut pow = Vec::with_capacity(cap + 1);
        let mut acc = 1.0;
        for _ in 0..=cap {
            pow.push(acc);
            acc *= x;
        }

        let z_old = z.clone();
        let mut z_new = vec![0.0_f64; n_top + 1];
        for n in 0..=n_top {
            let mut s = 0.0;
            for (i, p) in pow.iter().enumerate().take(n.min(cap) + 1) {
                s += p * z_old[n - i];
            }
            z_new[n] = s;
        }
        z = z_new;

        for (a, row) in w.iter_mut().enumerate() {
            let mut row_new = vec![0.0_f64; n_top + 1];
            if a == j {
                for (n, slot) in row_new.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for (i, p) in pow.iter().enumerate().take(n.min(cap) + 1) {
                        s += i as f64 * p * z_old[n - i];
                    }
                    *slot = s;
                }
            } else if a < j {
                for (n, slot) in row_new.iter_mut().enumerate() {
                    let mut s = 0.0;
                    for (i, p) in pow.iter().enumerate().take(n.min(cap) + 1) {
                        s += p * row[n - i];
                    }
                    *slot = s;
                }
            }
            *row = row_new;
        }
    }

    CanonicalTable {
        labels: model.levels.iter().map(|l| l.label.clone()).collect(),
        beta: model.beta,
        energy_shift: shift,
        scaled_z: z,
        scaled_w: w,
    }
}

/// Resolve the policy's N ceiling for this model. `Fixed` clamps to the
/// basis hard cap; `Auto` walks the locked-N terms of the interacting grand
/// sum until one drops below `tail_tol` times the running sum.
pub fn resolve_n_max(model: &ModelSpec, trunc: &TruncationPolicy) -> Result<usize> {
    model.check_basic()?;
    if trunc.n_max_per_level < 1 {
        return Err(Error::InvalidModel(
            "n_max_per_level must be at least 1".into(),
        ));
    }
    let hard = trunc.hard_cap(model);
    match trunc.n_max {
        NMax::Fixed(n) => Ok(n.min(hard)),
        NMax::Auto => {
            if model.statistics == Statistics::Boson && model.u == 0.0 {
                return Err(Error::InvalidModel(
                    "Auto truncation requires U>0 for bosons".into(),
                ));
            }
            let table = build_full_table(model, trunc);
            let mut sum = 0.0;
            for n in 0..=hard {
                let term = table.scaled_z(n) * locked_weight(model, table.energy_shift(), n);
                sum += term;
                if n >= 1 && term < trunc.tail_tol * sum {
                    return Ok(n);
                }
            }
            Ok(hard)
        }
    }
}

/// Canonical table for `N = 0..=resolved n_max`, by occupancy-tracked DP.
/// The derivative weights come out of the same recursion, never from
/// numerical differentiation.
pub fn canonical_partitions(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
) -> Result<CanonicalTable> {
    let n_max = resolve_n_max(model, trunc)?;
    Ok(build_full_table(model, trunc).truncate(n_max))
}

/// Contour estimate of one `Z_N`, with its imaginary residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourEstimate {
    pub value: f64,
    /// |Im| of the circle-rule sum relative to `max(1, |Re|)`; bounded by
    /// 1e-12 or the computation errors out.
    pub imag_residue: f64,
}

/// `Z_N` by inverting the fugacity series of the truncated noninteracting
/// grand partition on the unit circle: with `e^{beta mu} = e^{i theta}`,
/// `Z_N = int_0^{2pi} (dtheta/2pi) e^{-i N theta} Xi_0(theta)`. The
/// integrand is a trigonometric polynomial of degree `levels x cap`, so the
/// `M`-point rule is exact once `M` exceeds both that degree and `N`.
pub fn canonical_partition_contour(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    n: usize,
    m: usize,
) -> Result<ContourEstimate> {
    model.check_basic()?;
    let cap = trunc.level_cap(model.statistics);
    let degree = trunc.hard_cap(model);
    if m <= degree.max(n) {
        return Err(Error::ContourNodesTooFew {
            m,
            required_min: degree.max(n) + 1,
        });
    }

    let shift = model.min_energy();
    let beta = model.beta;
    let factors: Vec<f64> = model
        .energies()
        .map(|e| (-beta * (e - shift)).exp())
        .collect();

    let rule = quad::circle_rule(m)?;
    let sum = rule.integrate_complex(|theta| {
        let mut xi = Complex64::new(1.0, 0.0);
        let phase = Complex64::new(0.0, theta).exp();
        for &x in &factors {
            let mut level = Complex64::new(0.0, 0.0);
            let step = phase * x;
            let mut term = Complex64::new(1.0, 0.0);
            for _ in 0..=cap {
                level += term;
                term *= step;
            }
            xi *= level;
        }
        xi * Complex64::new(0.0, -(n as f64) * theta).exp()
    });

    let scale = sum.re.abs().max(1.0);
    let imag_residue = sum.im.abs() / scale;
    if imag_residue >= 1e-12 {
        return Err(Error::ImaginaryResidue {
            what: "contour canonical partition",
            imag: sum.im.abs(),
            bound: 1e-12 * scale,
        });
    }
    Ok(ContourEstimate {
        value: sum.re * (-beta * n as f64 * shift).exp(),
        imag_residue,
    })
}
