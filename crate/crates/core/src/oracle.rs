//! Brute-force ground truth over the truncated occupation-number basis.
//!
//! The Hamiltonian is diagonal in this basis, so "diagonalization" is plain
//! enumeration: every quantity is a thermal sum over occupation vectors.
//! Nothing here touches the canonical-table or parentage kernels; route
//! agreement between this module and the closed forms is the point of the
//! verification suite.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::green::{LineKind, SpectralLineSet};
use crate::model::{ModelSpec, Statistics, TruncationPolicy};
use crate::{exec, quad, Error, Result};

/// Guard on the enumerated basis size.
const BASIS_GUARD: u128 = 10_000_000;

/// One basis state with its occupancies and energy split into the free and
/// charging parts.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationVector {
    pub occupations: Vec<u32>,
    pub total_n: u32,
    /// `sum_a eps_a n_a`
    pub energy_free: f64,
    /// `U/2 N(N-1)`
    pub energy_int: f64,
}

/// All occupation vectors of the truncated model, in lexicographic order
/// with the last level varying fastest.
pub fn enumerate_basis(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
) -> Result<Vec<OccupationVector>> {
    model.check_basic()?;
    let cap = trunc.level_cap(model.statistics) as u32;
    let n_levels = model.level_count();
    let size = (cap as u128 + 1).pow(n_levels as u32);
    if size > BASIS_GUARD {
        return Err(Error::BasisTooLarge {
            size,
            cap: BASIS_GUARD,
        });
    }

    let energies: Vec<f64> = model.energies().collect();
    let mut basis = Vec::with_capacity(size as usize);
    let mut occ = vec![0_u32; n_levels];
    loop {
        let total_n: u32 = occ.iter().sum();
        let energy_free = occ
            .iter()
            .zip(&energies)
            .map(|(&n, &e)| n as f64 * e)
            .sum();
        let nf = total_n as f64;
        basis.push(OccupationVector {
            occupations: occ.clone(),
            total_n,
            energy_free,
            energy_int: model.u / 2.0 * nf * (nf - 1.0),
        });
        // Odometer increment, last level fastest.
        let mut i = n_levels;
        loop {
            if i == 0 {
                return Ok(basis);
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

/// Thermal weights `e^{-beta(E - mu N)}` rescaled by the largest exponent,
/// so stiff models stay inside the representable range.
struct ThermalWeights {
    scaled: Vec<f64>,
    max_exponent: f64,
    scaled_sum: f64,
}

fn thermal_weights(model: &ModelSpec, basis: &[OccupationVector]) -> ThermalWeights {
    let beta = model.beta;
    let mu = model.mu;
    let exponents: Vec<f64> = basis
        .iter()
        .map(|s| -beta * (s.energy_free + s.energy_int - mu * s.total_n as f64))
        .collect();
    let max_exponent = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled = exec::map_collect(exponents.len(), |i| (exponents[i] - max_exponent).exp());
    let scaled_sum = exec::pairwise_sum(&scaled);
    ThermalWeights {
        scaled,
        max_exponent,
        scaled_sum,
    }
}

/// `Xi_U` by direct summation over the basis.
pub fn exact_grand_partition(model: &ModelSpec, trunc: &TruncationPolicy) -> Result<f64> {
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    Ok(tw.scaled_sum * tw.max_exponent.exp())
}

/// `<n_a>` by direct summation.
pub fn exact_occupation(model: &ModelSpec, trunc: &TruncationPolicy, alpha: &str) -> Result<f64> {
    let a = model.level_index(alpha)?;
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    let num = exec::map_sum(basis.len(), |i| {
        basis[i].occupations[a] as f64 * tw.scaled[i]
    });
    Ok(num / tw.scaled_sum)
}

/// `G^<_a(t) = (s/i) < n_a e^{-i[eps_a + U(N-1)]t} >`, states evolved with
/// the number-resolved phase.
pub fn exact_lesser_time(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
    t: f64,
) -> Result<Complex64> {
    let a = model.level_index(alpha)?;
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    let eps = model.levels[a].energy;
    let u = model.u;
    let sum = exec::map_sum_complex(basis.len(), |i| {
        let state = &basis[i];
        let phase = Complex64::new(0.0, -(eps + u * (state.total_n as f64 - 1.0)) * t).exp();
        phase * (state.occupations[a] as f64 * tw.scaled[i])
    });
    Ok(Complex64::new(0.0, -model.statistics.sign()) * sum / tw.scaled_sum)
}

/// `G^>_a(t) = (1/i) < e^{-i(eps_a + U N)t} (1 + s n_a) >`.
pub fn exact_greater_time(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
    t: f64,
) -> Result<Complex64> {
    let a = model.level_index(alpha)?;
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    let eps = model.levels[a].energy;
    let u = model.u;
    let s = model.statistics.sign();
    let sum = exec::map_sum_complex(basis.len(), |i| {
        let state = &basis[i];
        let phase = Complex64::new(0.0, -(eps + u * state.total_n as f64) * t).exp();
        phase * ((1.0 + s * state.occupations[a] as f64) * tw.scaled[i])
    });
    Ok(Complex64::new(0.0, -1.0) * sum / tw.scaled_sum)
}

/// Accumulate per-sector weights keyed by total N, in basis order.
fn accumulate_by_n<F>(basis: &[OccupationVector], tw: &ThermalWeights, f: F) -> BTreeMap<u32, f64>
where
    F: Fn(&OccupationVector) -> f64,
{
    let mut map = BTreeMap::new();
    for (state, &w) in basis.iter().zip(&tw.scaled) {
        *map.entry(state.total_n).or_insert(0.0) += f(state) * w;
    }
    map
}

/// Thermal lesser line accumulation: weight `n_a` at `eps_a + U(N-1)`.
pub fn exact_lesser_lines(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<SpectralLineSet> {
    let a = model.level_index(alpha)?;
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    let eps = model.levels[a].energy;
    let raw = accumulate_by_n(&basis, &tw, |s| s.occupations[a] as f64)
        .into_iter()
        .map(|(n, w)| (eps + model.u * (n as f64 - 1.0), w / tw.scaled_sum))
        .collect();
    Ok(SpectralLineSet::from_raw(
        LineKind::Lesser,
        alpha,
        "enumeration route",
        raw,
        false,
    ))
}

/// Thermal greater line accumulation: weight `1 + s n_a` at `eps_a + U N`.
pub fn exact_greater_lines(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<SpectralLineSet> {
    let a = model.level_index(alpha)?;
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    let eps = model.levels[a].energy;
    let s = model.statistics.sign();
    let raw = accumulate_by_n(&basis, &tw, |st| 1.0 + s * st.occupations[a] as f64)
        .into_iter()
        .map(|(n, w)| (eps + model.u * n as f64, w / tw.scaled_sum))
        .collect();
    Ok(SpectralLineSet::from_raw(
        LineKind::Greater,
        alpha,
        "enumeration route",
        raw,
        false,
    ))
}

/// Spectral lines by accumulating both operator terms onto the merged grid.
pub fn exact_spectral_lines(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<SpectralLineSet> {
    let a = model.level_index(alpha)?;
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    let eps = model.levels[a].energy;
    let s = model.statistics.sign();
    let mut raw = Vec::with_capacity(2 * basis.len());
    for (state, &w) in basis.iter().zip(&tw.scaled) {
        let n_a = state.occupations[a] as f64;
        let n = state.total_n as f64;
        raw.push((eps + model.u * n, (1.0 + s * n_a) * w / tw.scaled_sum));
        raw.push((eps + model.u * (n - 1.0), -s * n_a * w / tw.scaled_sum));
    }
    Ok(SpectralLineSet::from_raw(
        LineKind::Spectral,
        alpha,
        "enumeration route",
        raw,
        true,
    ))
}

/// Fermionic special form: one delta per state at `eps_a + U (N - n_a)`.
/// A third spectral route, fermions only.
pub fn exact_spectral_special_fermion(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<SpectralLineSet> {
    if model.statistics != Statistics::Fermion {
        return Err(Error::InvalidArgument(
            "the reduced-number spectral form holds for fermions only".into(),
        ));
    }
    let a = model.level_index(alpha)?;
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    let eps = model.levels[a].energy;
    let raw = basis
        .iter()
        .zip(&tw.scaled)
        .map(|(state, &w)| {
            let n_prime = (state.total_n - state.occupations[a]) as f64;
            (eps + model.u * n_prime, w / tw.scaled_sum)
        })
        .collect();
    Ok(SpectralLineSet::from_raw(
        LineKind::Spectral,
        alpha,
        "fermionic reduced-number route",
        raw,
        true,
    ))
}

/// Sectors whose closed factor `e^{-beta U N^2/2}` falls below this carry
/// no certifiable signal: the quadrature of the unimodular phase resolves
/// the mean only down to its absolute roundoff floor.
const OPERATOR_HS_FLOOR: f64 = 1e-6;

/// For every total N present in the basis, compare `e^{-beta U N^2/2}`
/// against the Gaussian average of the number phase `e^{-i beta phi N}`.
/// Returns the worst relative deviation over the sectors whose closed
/// factor stays above [`OPERATOR_HS_FLOOR`]; smaller sectors are instead
/// required to average to (numerical) zero.
pub fn verify_operator_hs(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    rel_tol: f64,
) -> Result<f64> {
    model.check_basic()?;
    if !(model.u > 0.0) {
        return Err(Error::InvalidArgument(
            "operator identity check requires U > 0".into(),
        ));
    }
    let basis = enumerate_basis(model, trunc)?;
    let mut seen: Vec<u32> = basis.iter().map(|s| s.total_n).collect();
    seen.sort_unstable();
    seen.dedup();

    let beta = model.beta;
    let mut worst: f64 = 0.0;
    for n in seen {
        let nf = n as f64;
        let closed = (-beta * model.u * nf * nf / 2.0).exp();
        let avg = quad::adaptive_gaussian_average(
            |phi| Complex64::new(0.0, -beta * nf * phi).exp(),
            model.u / beta,
            rel_tol,
        )?;
        let gap = (avg.value - closed).norm();
        worst = worst.max(gap / closed.max(OPERATOR_HS_FLOOR));
    }
    Ok(worst)
}

/// Fermions in equilibrium: `<n_a>` equals the thermal average of the
/// Fermi function at the number-shifted energy `eps_a + U (N - n_a)`.
/// Returns the relative mismatch of the two direct basis sums.
pub fn fermi_shifted_occupation_check(
    model: &ModelSpec,
    trunc: &TruncationPolicy,
    alpha: &str,
) -> Result<f64> {
    if model.statistics != Statistics::Fermion {
        return Err(Error::InvalidArgument(
            "the shifted Fermi function identity holds for fermions only".into(),
        ));
    }
    let a = model.level_index(alpha)?;
    let basis = enumerate_basis(model, trunc)?;
    let tw = thermal_weights(model, &basis);
    let eps = model.levels[a].energy;
    let beta = model.beta;
    let mu = model.mu;
    let u = model.u;

    let lhs = exec::map_sum(basis.len(), |i| {
        basis[i].occupations[a] as f64 * tw.scaled[i]
    }) / tw.scaled_sum;
    let rhs = exec::map_sum(basis.len(), |i| {
        let state = &basis[i];
        let n_prime = (state.total_n - state.occupations[a]) as f64;
        let x = beta * (eps + u * n_prime - mu);
        tw.scaled[i] / (x.exp() + 1.0)
    }) / tw.scaled_sum;

    Ok((lhs - rhs).abs() / lhs.max(f64::MIN_POSITIVE))
}
