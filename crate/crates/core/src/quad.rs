//! Deterministic quadrature kernels: Gauss-Hermite rules for Gaussian
//! averages and the uniform circle rule for Fourier coefficients.

use num_complex::Complex64;

use crate::{exec, Error, Result};

/// Hard ceiling for the adaptive doubling ladder.
pub const ADAPTIVE_NODE_CAP: usize = 1 << 12;

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    GaussHermite,
    UniformCircle,
}

/// Nodes and weights of one quadrature rule. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        exec::pairwise_sum(&self.weights)
    }

    /// `sum_i w_i f(x_i)`; for Gauss-Hermite this approximates
    /// `int f(x) e^{-x^2} dx`, for the circle rule `int f(theta) dtheta/2pi`.
    /// Node evaluations may run in parallel; the reduction is the fixed
    /// index-ordered pairwise tree.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let nodes = &self.nodes;
        let weights = &self.weights;
        exec::map_sum(nodes.len(), |i| weights[i] * f(nodes[i]))
    }

    pub fn integrate_complex<F>(&self, f: F) -> Complex64
    where
        F: Fn(f64) -> Complex64 + Sync + Send,
    {
        let nodes = &self.nodes;
        let weights = &self.weights;
        exec::map_sum_complex(nodes.len(), |i| f(nodes[i]) * weights[i])
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each eigenvector, by implicit-shift QL. `d` holds the
/// diagonal (overwritten with eigenvalues), `e` the subdiagonal, and `z`
/// starts as the first unit vector (overwritten with first components).
/// O(n^2) since only the first eigenvector row is accumulated.
fn tridiag_eigen_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::InvalidArgument(
                    "tridiagonal QL failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Gauss-Hermite rule with `n` nodes for the weight `e^{-x^2}`: exact on
/// `x^k e^{-x^2}` for all `k <= 2n-1`. Nodes ascend; weights sum to
/// `sqrt(pi)`.
///
/// Nodes and weights come from the Golub-Welsch eigenproblem of the Jacobi
/// matrix (zero diagonal, off-diagonal `sqrt(j/2)`), with only the first
/// eigenvector components carried. The rule is symmetrized afterwards so
/// odd moments vanish identically.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "gauss_hermite requires at least one node".into(),
        ));
    }
    let mut d = vec![0.0_f64; n];
    let mut e: Vec<f64> = (1..n).map(|j| (j as f64 / 2.0).sqrt()).collect();
    e.push(0.0);
    let mut z = vec![0.0_f64; n];
    z[0] = 1.0;
    tridiag_eigen_first_row(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let mut nodes: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut weights: Vec<f64> = order.iter().map(|&i| SQRT_PI * z[i] * z[i]).collect();

    // Enforce the exact +-x symmetry of the rule.
    for i in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    Ok(QuadratureRule {
        kind: RuleKind::GaussHermite,
        nodes,
        weights,
    })
}

/// Uniform rule on the circle: `theta_k = 2 pi k / M`, weights `1/M`. Exact
/// on `e^{i m theta}` (giving `delta_{m mod M, 0}`) for any m; resolves the
/// coefficient correctly only while `|m| < M`.
pub fn circle_rule(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "circle_rule requires at least one node".into(),
        ));
    }
    let nodes = (0..m)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / m as f64)
        .collect();
    let weights = vec![1.0 / m as f64; m];
    Ok(QuadratureRule {
        kind: RuleKind::UniformCircle,
        nodes,
        weights,
    })
}

/// Converged Gaussian average and the node count that achieved it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAverage {
    pub value: Complex64,
    pub nodes: usize,
}

/// Mean of `f` under a centered normal of the given variance, by
/// Gauss-Hermite doubling from 8 nodes until two successive estimates agree
/// to `rel_tol` relatively. When the mean is small through cancellation of
/// an O(1) integrand, the relative test can never fire; agreement within
/// the summation's own roundoff scale (`eps x sum_i |w_i f_i|`) then counts
/// as converged. Fails past [`ADAPTIVE_NODE_CAP`], naming the last two
/// estimates.
pub fn adaptive_gaussian_average<F>(f: F, variance: f64, rel_tol: f64) -> Result<GaussianAverage>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    if !(variance > 0.0) {
        return Err(Error::InvalidArgument(
            "gaussian average requires positive variance".into(),
        ));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument(
            "gaussian average requires positive rel_tol".into(),
        ));
    }
    let scale = (2.0 * variance).sqrt();
    let estimate = |nodes: usize| -> Result<(Complex64, f64)> {
        let rule = gauss_hermite(nodes)?;
        let terms = exec::map_collect(nodes, |i| f(scale * rule.nodes[i]) * rule.weights[i]);
        let est = exec::pairwise_sum_complex(&terms) / SQRT_PI;
        let norms: Vec<f64> = terms.iter().map(|t| t.norm()).collect();
        let magnitude = exec::pairwise_sum(&norms) / SQRT_PI;
        Ok((est, magnitude))
    };

    let mut prev: Option<Complex64> = None;
    let mut nodes = 8;
    while nodes <= ADAPTIVE_NODE_CAP {
        let (est, magnitude) = estimate(nodes)?;
        if let Some(p) = prev {
            let gap = (est - p).norm();
            let roundoff_floor = 32.0 * f64::EPSILON * magnitude;
            if gap <= rel_tol * est.norm() || gap <= roundoff_floor {
                return Ok(GaussianAverage { value: est, nodes });
            }
        }
        prev = Some(est);
        nodes *= 2;
    }

    let last = prev.expect("at least one estimate");
    let (second, _) = estimate(ADAPTIVE_NODE_CAP / 2)?;
    Err(Error::QuadratureNonConvergence {
        cap: ADAPTIVE_NODE_CAP,
        prev: second,
        last,
        gap: (last - second).norm() / last.norm().max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_rule_is_midpoint() {
        let rule = gauss_hermite(1).unwrap();
        assert_eq!(rule.nodes, vec![0.0]);
        assert!((rule.weights[0] - SQRT_PI).abs() < 1e-15);
    }

    #[test]
    fn two_node_rule_matches_moment_equations() {
        // Roots of H_2(x) = 4x^2 - 2 at +-1/sqrt(2); weights from the
        // zeroth and second Gaussian moments sqrt(pi) and sqrt(pi)/2.
        let rule = gauss_hermite(2).unwrap();
        let r = 0.5_f64.sqrt();
        assert!((rule.nodes[0] + r).abs() < 1e-15);
        assert!((rule.nodes[1] - r).abs() < 1e-15);
        for w in &rule.weights {
            assert!((w - SQRT_PI / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(gauss_hermite(0).is_err());
        assert!(circle_rule(0).is_err());
    }

    #[test]
    fn quartic_moment_at_twenty_nodes() {
        let rule = gauss_hermite(20).unwrap();
        let got = rule.integrate(|x| x.powi(4));
        let want = 0.75 * SQRT_PI;
        assert!((got - want).abs() < 1e-13 * want);
    }

    #[test]
    fn weight_sums_match_sqrt_pi() {
        for n in [1, 2, 3, 7, 20, 63, 128, 1024] {
            let rule = gauss_hermite(n).unwrap();
            let sum = rule.weight_sum();
            assert!(
                (sum - SQRT_PI).abs() < 1e-13 * SQRT_PI,
                "n={n}: weight sum {sum}"
            );
        }
    }

    #[test]
    fn moment_exactness_up_to_degree_bound() {
        // Closed-form even moments: int x^{2k} e^{-x^2} = (2k-1)!! sqrt(pi)/2^k.
        for n in [3_usize, 5, 8] {
            let rule = gauss_hermite(n).unwrap();
            let mut double_fact = 1.0;
            for k in 0..n {
                if k > 0 {
                    double_fact *= 2.0 * k as f64 - 1.0;
                }
                let want = double_fact * SQRT_PI / 2f64.powi(k as i32);
                let got = rule.integrate(|x| x.powi(2 * k as i32));
                assert!(
                    (got - want).abs() < 1e-12 * want.abs(),
                    "n={n} k={k}: {got} vs {want}"
                );
                // Odd moments vanish by node symmetry.
                let odd = rule.integrate(|x| x.powi(2 * k as i32 + 1));
                assert!(odd.abs() < 1e-12 * want.abs());
            }
        }
    }

    #[test]
    fn large_rule_survives_recurrence_overflow() {
        let rule = gauss_hermite(ADAPTIVE_NODE_CAP).unwrap();
        assert_eq!(rule.len(), ADAPTIVE_NODE_CAP);
        assert!((rule.weight_sum() - SQRT_PI).abs() < 1e-12);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        let second = rule.integrate(|x| x * x);
        assert!((second - SQRT_PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn circle_orthogonality_and_normalization() {
        let rule = circle_rule(4).unwrap();
        let c = rule.integrate_complex(|t| Complex64::new(0.0, t).exp());
        assert!(c.norm() < 1e-15);
        let one = rule.integrate(|_| 1.0);
        assert!((one - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circle_aliasing_at_multiple_of_m() {
        // e^{i 8 theta} sampled on 8 points aliases onto the constant: the
        // rule resolves coefficients only below degree M.
        let rule = circle_rule(8).unwrap();
        let c = rule.integrate_complex(|t| Complex64::new(0.0, 8.0 * t).exp());
        assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gaussian_average_of_unity() {
        let avg = adaptive_gaussian_average(|_| Complex64::new(1.0, 0.0), 0.7, 1e-12).unwrap();
        assert!((avg.value.re - 1.0).abs() < 1e-14);
        assert_eq!(avg.value.im, 0.0);
    }

    #[test]
    fn gaussian_average_recovers_variance() {
        for v in [0.25, 1.0, 3.5] {
            let avg = adaptive_gaussian_average(|x| Complex64::new(x * x, 0.0), v, 1e-12).unwrap();
            assert!((avg.value.re - v).abs() < 1e-12 * v, "v={v}");
        }
    }

    #[test]
    fn gaussian_average_of_phase_gives_charging_factor() {
        // <e^{-i beta x N}> over variance U/beta equals e^{-beta U N^2/2}.
        let (beta, u) = (1.3, 0.9);
        for n in [1.0_f64, 2.0, 3.0] {
            let avg = adaptive_gaussian_average(
                |x| (Complex64::new(0.0, -beta * n) * x).exp(),
                u / beta,
                1e-12,
            )
            .unwrap();
            let want = (-beta * u * n * n / 2.0).exp();
            assert!(
                (avg.value.re - want).abs() < 1e-11 * want,
                "n={n}: {} vs {want}",
                avg.value.re
            );
            assert!(avg.value.im.abs() < 1e-13);
        }
    }

    #[test]
    fn polynomial_average_converges_at_first_doubling() {
        let avg =
            adaptive_gaussian_average(|x| Complex64::new(x.powi(6), 0.0), 1.0, 1e-12).unwrap();
        assert_eq!(avg.nodes, 16); // degree 6 is exact at 8 and 16 nodes
        assert!((avg.value.re - 15.0).abs() < 1e-12 * 15.0); // <x^6> = 15 v^3
    }

    #[test]
    fn kinked_integrand_fails_with_last_two_estimates() {
        let err = adaptive_gaussian_average(|x| Complex64::new(x.abs(), 0.0), 1.0, 1e-13)
            .unwrap_err();
        match err {
            Error::QuadratureNonConvergence { cap, prev, last, .. } => {
                assert_eq!(cap, ADAPTIVE_NODE_CAP);
                // <|x|> = sqrt(2 v / pi) with v = 1.
                let want = (2.0 / std::f64::consts::PI).sqrt();
                assert!((prev.re - want).abs() < 1e-3);
                assert!((last.re - want).abs() < 1e-3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
