//! Executable demonstrations of the operator-ordering pitfalls around
//! Gaussian decoupling of quartic terms.
//!
//! Three exhibits:
//! - the coherent-state matrix element of `e^{-i t U n^2 / 2}` evaluated
//!   directly and through the Wick-theorem decoupling (they agree at any
//!   finite `t`, the "so far so good" checkpoint);
//! - the short-time expansion, where truncating the decoupled integrand at
//!   linear order in `dt` before averaging loses the whole `n^2` term;
//! - Gaussian decoupling of couplings between commuting number operators
//!   (valid, checked state by state) versus the spin-rotational decoupling
//!   of `S^2` (invalid: the two traces provably differ).

use num_complex::Complex64;

use crate::model::TruncationPolicy;
use crate::{exec, quad, Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Bosonic coherent-state labels for the matrix element `<z| ... |w>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitudes {
    pub z: Complex64,
    pub w: Complex64,
}

impl CoherentAmplitudes {
    fn overlap_prefactor(&self) -> f64 {
        (-(self.z.norm_sqr() + self.w.norm_sqr()) / 2.0).exp()
    }

    fn zbar_w(&self) -> Complex64 {
        self.z.conj() * self.w
    }

    /// The dropped series tail must satisfy `|zbar w|^n_max / n_max! < 1e-16`.
    fn check_truncation(&self, n_max: usize) -> Result<()> {
        let x = self.zbar_w().norm();
        let bound = if x == 0.0 {
            0.0
        } else {
            let log_fact: f64 = (1..=n_max).map(|k| (k as f64).ln()).sum();
            (n_max as f64 * x.ln() - log_fact).exp()
        };
        if bound >= 1e-16 {
            return Err(Error::SeriesTruncation {
                bound,
                required: 1e-16,
            });
        }
        Ok(())
    }
}

/// `<z| e^{-i t U n^2/2} |w>` summed directly over number states:
/// `e^{-(|z|^2+|w|^2)/2} sum_n (zbar w)^n / n! e^{-i t U n^2 / 2}`.
pub fn coherent_matrix_element_direct(
    amp: &CoherentAmplitudes,
    u: f64,
    t: f64,
    n_max: usize,
) -> Result<Complex64> {
    amp.check_truncation(n_max)?;
    let zw = amp.zbar_w();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..=n_max {
        let nf = n as f64;
        sum += term * Complex64::new(0.0, -t * u * nf * nf / 2.0).exp();
        term *= zw / (nf + 1.0);
    }
    Ok(sum * amp.overlap_prefactor())
}

/// The same matrix element with each number phase produced by the Wick
/// exponent of the decoupled field, `exp[(1/2) <(-i t phi n)^2>]` with
/// `<phi^2> = U / (-i t)`. Agrees with the direct route at any finite `t`.
pub fn coherent_matrix_element_hs(
    amp: &CoherentAmplitudes,
    u: f64,
    t: f64,
    n_max: usize,
) -> Result<Complex64> {
    amp.check_truncation(n_max)?;
    let zw = amp.zbar_w();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..=n_max {
        let nf = n as f64;
        let phase = if t == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            let minus_it = Complex64::new(0.0, -t);
            let field_variance = u / minus_it;
            (0.5 * (minus_it * nf).powi(2) * field_variance).exp()
        };
        sum += term * phase;
        term *= zw / (nf + 1.0);
    }
    Ok(sum * amp.overlap_prefactor())
}

/// Linear-in-dt coefficients of the matrix element by the two procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeMismatch {
    /// From the direct expansion: `-(i U / 2) <z| n^2 |w>`-type series.
    pub exact_coeff: Complex64,
    /// From truncating the decoupled integrand at linear order in dt and
    /// then averaging: the field's first moment vanishes, so this is zero.
    pub naive_coeff: Complex64,
    /// Finite-difference quotient of the direct element at the given dt;
    /// tends to `exact_coeff` as dt goes to zero.
    pub direct_quotient: Complex64,
}

/// Expose the short-time failure of the naive linear truncation: the exact
/// linear coefficient is `-(i U/2) e^{-(|z|^2+|w|^2)/2} sum_n n^2 (zbar w)^n/n!`,
/// while averaging the linearized integrand first gives exactly zero because
/// the decoupling field is centered.
pub fn short_time_mismatch(
    amp: &CoherentAmplitudes,
    u: f64,
    dt: f64,
    n_max: usize,
) -> Result<ShortTimeMismatch> {
    amp.check_truncation(n_max)?;
    let zw = amp.zbar_w();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum_n2 = Complex64::new(0.0, 0.0);
    let mut sum_n1 = Complex64::new(0.0, 0.0);
    for n in 0..=n_max {
        let nf = n as f64;
        sum_n2 += term * nf * nf;
        sum_n1 += term * nf;
        term *= zw / (nf + 1.0);
    }
    let prefactor = amp.overlap_prefactor();
    let exact_coeff = Complex64::new(0.0, -u / 2.0) * sum_n2 * prefactor;

    // Linearized integrand: overlap x sum_n (zbar w)^n/n! (1 - i dt phi n).
    // Averaging hits the first moment of the centered decoupling field.
    let field_first_moment = 0.0;
    let naive_coeff = Complex64::new(0.0, -field_first_moment) * sum_n1 * prefactor;

    let direct_quotient = if dt == 0.0 {
        exact_coeff
    } else {
        let at_dt = coherent_matrix_element_direct(amp, u, dt, n_max)?;
        let at_zero = coherent_matrix_element_direct(amp, u, 0.0, n_max)?;
        (at_dt - at_zero) / dt
    };

    Ok(ShortTimeMismatch {
        exact_coeff,
        naive_coeff,
        direct_quotient,
    })
}

/// Jacobi eigendecomposition of a small symmetric matrix. Returns
/// (eigenvalues, eigenvector columns).
fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut q: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..64 {
        let mut off = 0.0_f64;
        for i in 0..d {
            for j in (i + 1)..d {
                off = off.max(a[i][j].abs());
            }
        }
        if off < 1e-15 {
            break;
        }
        for p in 0..d {
            for r in (p + 1)..d {
                if a[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[r][r] - a[p][p]) / a[p][r];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k][p];
                    let akr = a[k][r];
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let ark = a[r][k];
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
                for k in 0..d {
                    let qkp = q[k][p];
                    let qkr = q[k][r];
                    q[k][p] = c * qkp - s * qkr;
                    q[k][r] = s * qkp + c * qkr;
                }
            }
        }
    }
    let eigenvalues = (0..d).map(|i| a[i][i]).collect();
    (eigenvalues, q)
}

/// Check the multivariate decoupling of a quadratic coupling between
/// commuting number operators: state by state,
/// `e^{-(beta/2) sum U_ab n_a n_b}` must equal the Gaussian average of
/// `e^{-i beta sum phi_a n_a}` with covariance `U/beta`. The average is
/// evaluated by Gauss-Hermite after the symmetric square-root transform of
/// the covariance, which factorizes the phase into per-axis products.
/// Returns the worst relative deviation over the occupancy basis.
pub fn generalized_hs_residual(
    levels: &[f64],
    coupling: &[Vec<f64>],
    beta: f64,
    trunc: &TruncationPolicy,
    nodes_per_dim: usize,
) -> Result<f64> {
    let d = levels.len();
    if d == 0 || d > 3 {
        return Err(Error::InvalidArgument(
            "generalized decoupling check supports 1 to 3 levels".into(),
        ));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument("beta must be positive".into()));
    }
    if coupling.len() != d || coupling.iter().any(|row| row.len() != d) {
        return Err(Error::InvalidArgument(
            "coupling matrix shape must match the level count".into(),
        ));
    }
    for i in 0..d {
        for j in 0..d {
            if (coupling[i][j] - coupling[j][i]).abs() > 1e-14 {
                return Err(Error::InvalidArgument(
                    "coupling matrix must be symmetric".into(),
                ));
            }
        }
    }
    let (eigenvalues, q) = jacobi_eigen(coupling);
    if eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::NotPositiveDefinite { eigenvalues });
    }

    // phi = A x with A A^T = 2 U / beta, x drawn with weight e^{-x^2}.
    let mut transform = vec![vec![0.0_f64; d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for (k, &lambda) in eigenvalues.iter().enumerate() {
                s += q[i][k] * (2.0 * lambda / beta).sqrt() * q[j][k];
            }
            transform[i][j] = s;
        }
    }

    let rule = quad::gauss_hermite(nodes_per_dim)?;
    let cap = trunc.n_max_per_level as u32;

    let mut occ = vec![0_u32; d];
    let mut worst: f64 = 0.0;
    loop {
        let mut exponent = 0.0;
        for i in 0..d {
            for j in 0..d {
                exponent += coupling[i][j] * occ[i] as f64 * occ[j] as f64;
            }
        }
        let closed = (-beta / 2.0 * exponent).exp();

        // Per-axis frequencies c = A^T n; the phase average factorizes.
        let mut average = Complex64::new(1.0, 0.0);
        for k in 0..d {
            let c: f64 = (0..d).map(|i| transform[i][k] * occ[i] as f64).sum();
            let axis = rule.integrate_complex(|x| Complex64::new(0.0, -beta * c * x).exp());
            average *= axis / SQRT_PI;
        }

        worst = worst.max((average - closed).norm() / closed);

        let mut i = d;
        loop {
            if i == 0 {
                return Ok(worst);
            }
            i -= 1;
            if occ[i] < cap {
                occ[i] += 1;
                break;
            }
            occ[i] = 0;
        }
    }
}

/// The two traces of the spin-rotational decoupling of `e^{beta J S^2}` on
/// spin one-half, plus the Gaussian-average side recomputed by tensor
/// quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCounterexample {
    /// `Tr e^{beta J S^2} = 2 e^{3 beta J / 4}` (S^2 is 3/4 times identity).
    pub lhs: f64,
    /// Closed form of the decoupled side: `2 e^{beta J/4}(1 + beta J/2)`.
    pub rhs_closed: f64,
    /// `< Tr e^{-beta m.S} > = <2 cosh(beta |m|/2)>` over the 3-component
    /// Gaussian field, by tensor Gauss-Hermite.
    pub rhs_quadrature: f64,
}

/// Trace both sides of the (invalid) operator promotion of the
/// spin-rotational decoupling identity for spin one-half. The two sides
/// agree only at `beta J = 0`; the quadrature certifies that the mismatch
/// is not a numerical artifact of the decoupled side.
pub fn spin_hs_counterexample(beta_j: f64, nodes_per_dim: usize) -> Result<SpinCounterexample> {
    if beta_j < 0.0 {
        return Err(Error::InvalidArgument(
            "the decoupling Gaussian needs beta J >= 0".into(),
        ));
    }
    let lhs = 2.0 * (0.75 * beta_j).exp();
    let rhs_closed = 2.0 * (0.25 * beta_j).exp() * (1.0 + beta_j / 2.0);

    // m = 2 sqrt(J/beta) x per component; beta|m|/2 = sqrt(beta J) |x|.
    let freq = beta_j.sqrt();
    let rule = quad::gauss_hermite(nodes_per_dim)?;
    let n = rule.len();
    let nodes = &rule.nodes;
    let weights = &rule.weights;
    let sum = exec::map_sum(n * n * n, |idx| {
        let i = idx / (n * n);
        let j = (idx / n) % n;
        let k = idx % n;
        let r = (nodes[i] * nodes[i] + nodes[j] * nodes[j] + nodes[k] * nodes[k]).sqrt();
        weights[i] * weights[j] * weights[k] * 2.0 * (freq * r).cosh()
    });
    let rhs_quadrature = sum / (SQRT_PI * SQRT_PI * SQRT_PI);

    Ok(SpinCounterexample {
        lhs,
        rhs_closed,
        rhs_quadrature,
    })
}
