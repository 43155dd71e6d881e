use num_complex::Complex64;

use super::record::{MeasurementRecord, SqstMode};
use super::EstimateWithError;
use crate::error::{Error, Result};
use crate::mub::{sample_categorical, sample_from_table, MubFamily};
use crate::parallel::map_rounds;
use crate::simcore::{ObservableMatrix, ShotSource};
use crate::stats::{hoeffding_radius, union_split};

/// Measure `n` copies drawn from `source`. Off-diagonal mode samples the
/// POVM `{Π_k^(m)/d : m ≥ 1}`; diagonal mode measures the computational
/// basis. Born tables are computed once per source component.
pub fn sqst_collect<S>(source: &S, family: &MubFamily, n: u64, mode: SqstMode, seed: u64) -> Result<MeasurementRecord>
where
    S: ShotSource,
    S::State: AsRef<[Complex64]>,
{
    let tables = source
        .components()
        .iter()
        .map(|c| match mode {
            SqstMode::OffdiagMub => family.outcome_table(c.as_ref()),
            SqstMode::DiagComputational => family.basis_probabilities(c.as_ref(), 0).map(|p| vec![p]),
        })
        .collect::<Result<Vec<_>>>()?;
    let outcomes = map_rounds(seed, n, |_, rng| {
        let (i, _) = source.next_indexed(rng);
        match mode {
            SqstMode::OffdiagMub => sample_from_table(&tables[i], rng),
            SqstMode::DiagComputational => (sample_categorical(&tables[i][0], rng), 0),
        }
    });
    MeasurementRecord::new(mode, family.dim(), outcomes, seed)
}

/// `N = ⌈2 ln(4/δ) / ε²⌉`.
pub fn sqst_sample_size(epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("sqst_sample_size needs ε, δ in (0, 1)"));
    }
    Ok((2.0 * (4.0 / delta).ln() / (epsilon * epsilon)).ceil() as u64)
}

/// Sample size for `m` simultaneous element estimates (union bound).
pub fn sqst_sample_size_many(epsilon: f64, delta: f64, m: u64) -> Result<u64> {
    sqst_sample_size(epsilon, union_split(delta, m)?)
}

/// `4 exp(−N ε² / 2)`.
pub fn sqst_failure_probability(n: u64, epsilon: f64) -> f64 {
    4.0 * (-(n as f64) * epsilon * epsilon / 2.0).exp()
}

/// Error radius guaranteed by `n` samples at confidence `1 − δ`.
pub fn sqst_epsilon(n: u64, delta: f64) -> f64 {
    (2.0 * (4.0 / delta).ln() / n as f64).sqrt()
}

fn pick(records: &[&MeasurementRecord], mode: SqstMode, d: usize) -> Result<MeasurementRecord> {
    let mut found: Option<MeasurementRecord> = None;
    for r in records.iter().filter(|r| r.mode == mode) {
        if r.d != d {
            return Err(Error::DimensionMismatch { expected: d, actual: r.d });
        }
        match &mut found {
            Some(acc) => acc.merge(r)?,
            None => found = Some((*r).clone()),
        }
    }
    match found {
        Some(r) if !r.is_empty() => Ok(r),
        _ => Err(Error::invalid(format!("estimate needs a non-empty {mode} record"))),
    }
}

/// Estimate `ρ_ij`. Off-diagonal elements average `conj(η_ij)` over an
/// off-diagonal record; diagonal elements are the frequency of `i` in a
/// diagonal record. The radius `epsilon` bounds the real and imaginary
/// parts separately.
pub fn sqst_estimate_element(
    family: &MubFamily,
    records: &[&MeasurementRecord],
    i: usize,
    j: usize,
    delta: f64,
) -> Result<EstimateWithError> {
    let d = family.dim();
    if i >= d || j >= d {
        return Err(Error::invalid(format!("element ({i}, {j}) outside dimension {d}")));
    }
    let (value, n) = if i == j {
        let r = pick(records, SqstMode::DiagComputational, d)?;
        let hits = r.outcomes.iter().filter(|&&(k, _)| k == i).count();
        (Complex64::new(hits as f64 / r.len() as f64, 0.0), r.len() as u64)
    } else {
        let r = pick(records, SqstMode::OffdiagMub, d)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, m) in &r.outcomes {
            acc += family.eta(i, j, k, m)?.conj();
        }
        (acc / r.len() as f64, r.len() as u64)
    };
    Ok(EstimateWithError { value, epsilon: sqst_epsilon(n, delta), delta, n_used: n })
}

/// Elementwise estimate of the whole density matrix from one record of each
/// mode. The result is Hermitian but need not be positive semidefinite.
pub fn sqst_estimate_matrix(family: &MubFamily, records: &[&MeasurementRecord]) -> Result<ObservableMatrix> {
    let d = family.dim();
    let diag = pick(records, SqstMode::DiagComputational, d)?;
    let off = pick(records, SqstMode::OffdiagMub, d)?;
    let mut acc = nalgebra::DMatrix::<Complex64>::zeros(d, d);
    for &(k, m) in &off.outcomes {
        let v = family.vector(k, m)?;
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    acc[(a, b)] += v[a] * v[b].conj();
                }
            }
        }
    }
    // each |k,m⟩⟨k,m| entry is conj(η)/d
    acc *= Complex64::new(d as f64 / off.len() as f64, 0.0);
    for &(k, _) in &diag.outcomes {
        acc[(k, k)] += 1.0 / diag.len() as f64;
    }
    ObservableMatrix::new(acc)
}

/// Copies per record so that [`sqst_estimate_observable`] reaches `ε` at
/// confidence `1 − δ`; grows with the square of the entrywise 1-norm.
pub fn sqst_observable_sample_size(one_norm: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(one_norm.is_finite() && epsilon > 0.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("sqst_observable_sample_size needs finite norm, ε > 0 and δ in (0, 1)"));
    }
    Ok((8.0 * one_norm * one_norm * (4.0 / delta).ln() / (epsilon * epsilon)).ceil().max(1.0) as u64)
}

/// Estimate `Tr(Aρ)` by splitting `A = A₀ + Ã` into its diagonal and
/// off-diagonal parts. `A₀` is read from the diagonal record; `Ã` from the
/// off-diagonal record through `a_km = d Tr(Ã Π_k^(m))`. Each part gets half
/// of the failure budget `δ`.
pub fn sqst_estimate_observable(
    family: &MubFamily,
    records: &[&MeasurementRecord],
    a: &ObservableMatrix,
    delta: f64,
) -> Result<EstimateWithError> {
    let d = family.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: a.dim() });
    }
    a.ensure_hermitian()?;
    if !a.entrywise_one_norm().is_finite() {
        return Err(Error::invalid("observable has an infinite entrywise 1-norm"));
    }
    let diag_vals: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    let off_part = ObservableMatrix::from_fn(d, |i, j| if i == j { 0.0.into() } else { a.get(i, j) });
    let has_diag = diag_vals.iter().any(|&x| x != 0.0);
    let has_off = off_part.max_norm() > 0.0;
    let part_delta = delta / 2.0;

    let mut value = 0.0;
    let mut epsilon = 0.0;
    let mut n_used = 0u64;
    if has_diag {
        let r = pick(records, SqstMode::DiagComputational, d)?;
        value += r.outcomes.iter().map(|&(k, _)| diag_vals[k]).sum::<f64>() / r.len() as f64;
        let (lo, hi) = min_max(&diag_vals);
        epsilon += hoeffding_radius(r.len() as u64, hi - lo, part_delta);
        n_used += r.len() as u64;
    }
    if has_off {
        let r = pick(records, SqstMode::OffdiagMub, d)?;
        let coeffs = family.decompose(&off_part)?.coefficients;
        let table: Vec<Vec<f64>> = coeffs.iter().map(|row| row.iter().map(|c| d as f64 * c.re).collect()).collect();
        value += r.outcomes.iter().map(|&(k, m)| table[m][k]).sum::<f64>() / r.len() as f64;
        let flat: Vec<f64> = table[1..].iter().flatten().copied().collect();
        let (lo, hi) = min_max(&flat);
        epsilon += hoeffding_radius(r.len() as u64, hi - lo, part_delta);
        n_used += r.len() as u64;
    }
    Ok(EstimateWithError { value: Complex64::new(value, 0.0), epsilon, delta, n_used })
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}
