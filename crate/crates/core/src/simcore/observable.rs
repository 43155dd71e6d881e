use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::PauliString;
use super::statevector::StateVector;
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;

/// A square complex matrix, usually (but not necessarily) Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableMatrix {
    entries: DMatrix<Complex64>,
}

impl ObservableMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), actual: entries.ncols() });
        }
        Ok(Self { entries })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { entries: DMatrix::from_fn(dim, dim, f) }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("matrix rows must all have the same length as the row count"));
        }
        Ok(Self::from_fn(d, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: DMatrix::zeros(dim, dim) }
    }

    /// Dense matrix of a Pauli string, including its phase.
    pub fn from_pauli(p: &PauliString) -> Self {
        let n = p.len();
        let dim = 1usize << n;
        let (xm, zm) = p.masks();
        let ny = p.ops().iter().filter(|&&o| o == super::Pauli::Y).count();
        let global = Complex64::i().powu((p.phase() as u32 + ny as u32) % 4);
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let row = col ^ xm;
            let sign = if (col & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(row, col)] = global * sign;
        }
        Self { entries: m }
    }

    /// Rank-one projector `|v⟩⟨v|` (the vector is used as given).
    pub fn projector(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn projector_onto(state: &StateVector) -> Self {
        Self::projector(state.amplitudes())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in i..d {
                dev = dev.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    pub fn kron(&self, other: &ObservableMatrix) -> Self {
        Self { entries: self.entries.kronecker(&other.entries) }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { entries: self.entries.map(|z| z * s) }
    }

    pub fn add(&self, other: &ObservableMatrix) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self { entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &ObservableMatrix) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self { entries: &self.entries - &other.entries })
    }

    pub fn mul(&self, other: &ObservableMatrix) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self { entries: &self.entries * &other.entries })
    }

    fn same_dim(&self, other: &ObservableMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(())
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.entries[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &ObservableMatrix) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise 1-norm `Σ_ij |a_ij|`.
    pub fn entrywise_one_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).sum()
    }

    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Schatten 1-norm (sum of singular values).
    pub fn trace_norm(&self) -> f64 {
        self.entries.clone().singular_values().iter().sum()
    }

    /// Eigendecomposition of a Hermitian matrix: eigenvalues ascending with
    /// the matching normalized eigenvectors.
    pub fn eigh(&self) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
        self.ensure_hermitian()?;
        // Symmetrize away rounding noise before handing to the solver.
        let sym = (&self.entries + self.entries.adjoint()).map(|z| z * 0.5);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect();
        Ok((values, vectors))
    }

    /// Eigenvalues grouped within `tol` together with their eigenprojectors.
    pub fn spectral_projectors(&self, tol: f64) -> Result<Vec<(f64, ObservableMatrix)>> {
        let (values, vectors) = self.eigh()?;
        let d = self.dim();
        let mut out: Vec<(f64, ObservableMatrix, usize)> = Vec::new();
        for (val, vec) in values.into_iter().zip(vectors) {
            let proj = ObservableMatrix::projector(&vec);
            match out.last_mut() {
                Some((v, p, count)) if (val - *v).abs() <= tol => {
                    *v = (*v * *count as f64 + val) / (*count as f64 + 1.0);
                    *count += 1;
                    p.entries += proj.entries;
                }
                _ => out.push((val, proj, 1)),
            }
        }
        debug_assert_eq!(out.iter().map(|o| o.2).sum::<usize>(), d);
        Ok(out.into_iter().map(|(v, p, _)| (v, p)).collect())
    }
}

/// Exact `⟨ψ|A|ψ⟩` for a Hermitian `A`.
pub fn expectation(state: &StateVector, obs: &ObservableMatrix) -> Result<f64> {
    if obs.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), actual: obs.dim() });
    }
    obs.ensure_hermitian()?;
    let psi = state.amplitudes();
    let a_psi = obs.apply(psi);
    Ok(psi.iter().zip(&a_psi).map(|(p, q)| p.conj() * q).sum::<Complex64>().re)
}
