//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A model or policy field violates a basic invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Adaptive quadrature did not settle below the node cap.
    #[error(
        "gaussian average did not converge below {cap} nodes; \
         last two estimates {prev} and {last} (relative gap {gap:.3e})"
    )]
    QuadratureNonConvergence {
        cap: usize,
        prev: num_complex::Complex64,
        last: num_complex::Complex64,
        gap: f64,
    },

    /// Bosonic noninteracting grand partition diverges for Re(mu) >= min eps.
    #[error(
        "divergent noninteracting grand partition: bosonic factors require \
         Re(mu_eff) < min eps_a = {min_epsilon}"
    )]
    DivergentGrandPartition { min_epsilon: f64 },

    /// Bosonic shifted-argument domain for the decoupling identity.
    #[error(
        "bosonic identity domain violated: mu + U/2 = {shifted_mu} must stay \
         below min eps_a = {min_epsilon}"
    )]
    BosonShiftDomain { shifted_mu: f64, min_epsilon: f64 },

    /// The locked-N sum still carries weight at the truncation edge.
    #[error(
        "truncation tail {tail:.3e} exceeds tail_tol x sum = {bound:.3e} at \
         N_max = {n_max}; increase N_max"
    )]
    TruncationTail { n_max: usize, tail: f64, bound: f64 },

    /// Circle rule too coarse for the integrand's trigonometric degree.
    #[error("circle rule needs M > {required_min} nodes, got {m}")]
    ContourNodesTooFew { m: usize, required_min: usize },

    /// Occupation-basis enumeration guard.
    #[error("occupation basis has {size} states, above the {cap} guard")]
    BasisTooLarge { size: u128, cap: u128 },

    /// Coherent-state series truncated too early.
    #[error(
        "series truncation too coarse: |zbar w|^n_max / n_max! = {bound:.3e} \
         is not below {required:.1e}"
    )]
    SeriesTruncation { bound: f64, required: f64 },

    /// Hole-parentage weights must be nonnegative; a violation means the
    /// statistics sign bookkeeping regressed.
    #[error("negative hole parentage p[{alpha}|{n}] = {value:.3e}")]
    NegativeParentage { alpha: String, n: usize, value: f64 },

    /// Gaussian coupling matrices must be symmetric positive-definite.
    #[error("coupling matrix is not positive-definite; eigenvalues {eigenvalues:?}")]
    NotPositiveDefinite { eigenvalues: Vec<f64> },

    /// The result of a nominally real quantity carries imaginary residue.
    #[error("imaginary residue {imag:.3e} exceeds {bound:.3e} on {what}")]
    ImaginaryResidue { what: &'static str, imag: f64, bound: f64 },

    /// A scalar argument is outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Level label not present in the model.
    #[error("unknown level label '{label}'; known labels: {known:?}")]
    UnknownLabel { label: String, known: Vec<String> },
}
