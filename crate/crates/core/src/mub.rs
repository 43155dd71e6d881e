//! Complete families of mutually unbiased bases and the operator
//! decomposition over their projectors.
//!
//! Basis `0` is the computational basis; bases `1..=d` are written as
//! `|k,m⟩ = d^{-1/2} Σ_l α_l^{km} |l⟩`.
//!
//! * odd prime `d`: `α_l^{km} = ω^{(m-1) l² + k l}`, `ω = e^{2πi/d}`.
//! * `d = 2^M`: with `b = m - 1` read as an element of GF(2^M),
//!   `α_l^{km} = (-1)^{k·l} i^{q_b(l)}` where
//!   `q_b(l) = Σ_j S_jj l_j + 2 Σ_{j<k} S_jk l_j l_k (mod 4)` and
//!   `S_jk = tr(b ξ^j ξ^k)` for the polynomial basis `ξ^j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::simcore::{ObservableMatrix, StateVector};

const PRIMITIVE_POLYS: [u32; 10] = [0b11, 0b111, 0b1011, 0x13, 0x25, 0x43, 0x83, 0x11D, 0x211, 0x409];

/// Largest supported exponent for power-of-two dimensions.
pub const MAX_GF2_EXPONENT: u32 = 10;

/// GF(2^M) via log/antilog tables.
#[derive(Debug, Clone)]
pub struct Gf2m {
    m: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Gf2m {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_GF2_EXPONENT {
            return Err(Error::UnsupportedDimension(1usize << m.min(31)));
        }
        let size = 1u32 << m;
        let poly = PRIMITIVE_POLYS[m as usize - 1];
        let order = size - 1;
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; size as usize];
        let mut v = 1u32;
        for i in 0..order {
            exp[i as usize] = v;
            log[v as usize] = i;
            v <<= 1;
            if v & size != 0 {
                v ^= poly;
            }
        }
        for i in order..2 * order {
            exp[i as usize] = exp[(i - order) as usize];
        }
        Ok(Self { m, exp, log })
    }

    pub fn size(&self) -> u32 {
        1 << self.m
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Absolute trace `a + a² + a⁴ + … + a^{2^{M-1}}`, always 0 or 1.
    pub fn trace(&self, a: u32) -> u32 {
        let mut t = 0;
        let mut p = a;
        for _ in 0..self.m {
            t ^= p;
            p = self.mul(p, p);
        }
        t
    }
}

#[derive(Debug, Clone)]
enum Construction {
    Prime,
    /// `quad[b][l] = q_b(l)` mod 4.
    PowerOfTwo { quad: Vec<Vec<u8>> },
}

/// A complete set of `d + 1` mutually unbiased bases.
#[derive(Debug, Clone)]
pub struct MubFamily {
    d: usize,
    construction: Construction,
}

fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|p| p * p <= d).all(|p| d % p != 0)
}

impl MubFamily {
    pub fn new(d: usize) -> Result<Self> {
        if d.is_power_of_two() && d >= 2 {
            let m = d.trailing_zeros();
            if m > MAX_GF2_EXPONENT {
                return Err(Error::UnsupportedDimension(d));
            }
            Ok(Self { d, construction: Construction::PowerOfTwo { quad: quad_tables(m)? } })
        } else if is_prime(d) {
            Ok(Self { d, construction: Construction::Prime })
        } else {
            Err(Error::UnsupportedDimension(d))
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of bases, `d + 1`.
    pub fn n_bases(&self) -> usize {
        self.d + 1
    }

    fn check(&self, k: usize, m: usize) -> Result<()> {
        if k >= self.d || m > self.d {
            return Err(Error::invalid(format!("outcome ({k}, {m}) outside a family of dimension {}", self.d)));
        }
        Ok(())
    }

    /// `α_l^{km}` for a non-computational basis `m ≥ 1`.
    pub fn alpha(&self, k: usize, m: usize, l: usize) -> Complex64 {
        debug_assert!(m >= 1 && k < self.d && l < self.d);
        match &self.construction {
            Construction::Prime => {
                let d = self.d;
                let e = ((m - 1) * (l * l % d) + k * l) % d;
                Complex64::from_polar(1.0, 2.0 * PI * e as f64 / d as f64)
            }
            Construction::PowerOfTwo { quad } => {
                let e = (quad[m - 1][l] as u32 + 2 * ((k & l).count_ones() & 1)) % 4;
                Complex64::i().powu(e)
            }
        }
    }

    /// Unit vector `|k,m⟩` in the computational basis.
    pub fn vector(&self, k: usize, m: usize) -> Result<Vec<Complex64>> {
        self.check(k, m)?;
        if m == 0 {
            let mut v = vec![Complex64::new(0.0, 0.0); self.d];
            v[k] = Complex64::new(1.0, 0.0);
            return Ok(v);
        }
        let s = 1.0 / (self.d as f64).sqrt();
        Ok((0..self.d).map(|l| self.alpha(k, m, l) * s).collect())
    }

    pub fn projector(&self, k: usize, m: usize) -> Result<ObservableMatrix> {
        Ok(ObservableMatrix::projector(&self.vector(k, m)?))
    }

    /// `η_ij^{km} = conj(α_i^{km}) α_j^{km}`.
    pub fn eta(&self, i: usize, j: usize, k: usize, m: usize) -> Result<Complex64> {
        self.check(k, m)?;
        if m == 0 || i == j || i >= self.d || j >= self.d {
            return Err(Error::invalid("eta needs m ≥ 1 and distinct in-range indices i, j"));
        }
        Ok(self.alpha(k, m, i).conj() * self.alpha(k, m, j))
    }

    /// Born probabilities `|⟨k,m|ψ⟩|²` for every `k` in basis `m`.
    pub fn basis_probabilities(&self, psi: &[Complex64], m: usize) -> Result<Vec<f64>> {
        if psi.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: psi.len() });
        }
        self.check(0, m)?;
        if m == 0 {
            return Ok(psi.iter().map(|a| a.norm_sqr()).collect());
        }
        let d = self.d;
        let amps: Vec<Complex64> = match &self.construction {
            Construction::Prime => (0..d)
                .map(|k| (0..d).map(|l| self.alpha(k, m, l).conj() * psi[l]).sum())
                .collect(),
            Construction::PowerOfTwo { quad } => {
                let mut v: Vec<Complex64> = psi
                    .iter()
                    .zip(&quad[m - 1])
                    .map(|(a, &q)| a * Complex64::i().powu((4 - q as u32) % 4))
                    .collect();
                fwht(&mut v);
                v
            }
        };
        Ok(amps.iter().map(|a| a.norm_sqr() / d as f64).collect())
    }

    /// Probabilities for every basis, indexed `[m][k]`.
    pub fn outcome_table(&self, psi: &[Complex64]) -> Result<Vec<Vec<f64>>> {
        (0..=self.d).map(|m| self.basis_probabilities(psi, m)).collect()
    }

    /// Decompose `A = -Tr(A) 𝟙 + Σ_m Σ_k Tr(A Π_k^(m)) Π_k^(m)`.
    pub fn decompose(&self, a: &ObservableMatrix) -> Result<MubDecomposition> {
        if a.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: a.dim() });
        }
        let mut coefficients = Vec::with_capacity(self.d + 1);
        for m in 0..=self.d {
            let mut row = Vec::with_capacity(self.d);
            for k in 0..self.d {
                let v = self.vector(k, m)?;
                let av = a.apply(&v);
                row.push(v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum());
            }
            coefficients.push(row);
        }
        Ok(MubDecomposition { coefficients, trace_term: a.trace() })
    }
}

/// In-place unnormalized Walsh–Hadamard transform.
fn fwht(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

fn quad_tables(m: u32) -> Result<Vec<Vec<u8>>> {
    let f = Gf2m::new(m)?;
    let d = f.size() as usize;
    let mm = m as usize;
    let xi: Vec<u32> = (0..mm).map(|j| 1u32 << j).collect();
    let mut tables = Vec::with_capacity(d);
    for b in 0..d as u32 {
        let s: Vec<Vec<u8>> = (0..mm)
            .map(|j| (0..mm).map(|k| f.trace(f.mul(b, f.mul(xi[j], xi[k]))) as u8).collect())
            .collect();
        let mut q = vec![0u8; d];
        for l in 1..d {
            let j = l.trailing_zeros() as usize;
            let rest = l & (l - 1);
            let cross: u8 = (j + 1..mm).filter(|&k| rest >> k & 1 == 1).map(|k| s[j][k]).sum();
            q[l] = (q[rest] + s[j][j] + 2 * cross) % 4;
        }
        tables.push(q);
    }
    Ok(tables)
}

/// Coefficients `O_k^(m) = Tr(A Π_k^(m))`, indexed `[m][k]`, plus `Tr(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MubDecomposition {
    pub coefficients: Vec<Vec<Complex64>>,
    pub trace_term: Complex64,
}

impl MubDecomposition {
    pub fn reconstruct(&self, fam: &MubFamily) -> Result<ObservableMatrix> {
        let d = fam.dim();
        let mut acc = ObservableMatrix::identity(d).into_matrix() * (-self.trace_term);
        for (m, row) in self.coefficients.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                let v = fam.vector(k, m)?;
                for i in 0..d {
                    for j in 0..d {
                        acc[(i, j)] += c * v[i] * v[j].conj();
                    }
                }
            }
        }
        ObservableMatrix::new(acc)
    }
}

/// Pure qudit state for SQST.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    amps: Vec<Complex64>,
}

impl QuditState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("qudit amplitudes must be nonempty and normalized"));
        }
        Ok(Self { amps })
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        amps[i] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Haar-random pure state from normalized complex Gaussians.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let mut amps: Vec<Complex64> = (0..d).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= n);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `ρ_ij = ⟨i|ψ⟩⟨ψ|j⟩`.
    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.amps[i] * self.amps[j].conj()
    }
}

impl AsRef<[Complex64]> for QuditState {
    fn as_ref(&self) -> &[Complex64] {
        &self.amps
    }
}

impl From<&StateVector> for QuditState {
    fn from(s: &StateVector) -> Self {
        Self { amps: s.amplitudes().to_vec() }
    }
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

pub(crate) fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Draw one outcome `(k, m)` of the POVM `{Π_k^(m)/d : m ≥ 1}` from a
/// precomputed [`MubFamily::outcome_table`].
pub fn sample_from_table<R: Rng + ?Sized>(table: &[Vec<f64>], rng: &mut R) -> (usize, usize) {
    let d = table.len() - 1;
    let m = 1 + rng.random_range(0..d);
    (sample_categorical(&table[m], rng), m)
}

/// Draw one outcome `(k, m)` with `m` uniform over the non-computational
/// bases and `k` Born-distributed within it.
pub fn sample_mub_povm<R: Rng + ?Sized>(psi: &[Complex64], fam: &MubFamily, rng: &mut R) -> Result<(usize, usize)> {
    if psi.len() != fam.dim() {
        return Err(Error::DimensionMismatch { expected: fam.dim(), actual: psi.len() });
    }
    let m = 1 + rng.random_range(0..fam.dim());
    let p = fam.basis_probabilities(psi, m)?;
    Ok((sample_categorical(&p, rng), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qubit_family_is_z_x_y() {
        let f = MubFamily::new(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            [[c(h, 0.0), c(0.0, h)], [c(h, 0.0), c(0.0, -h)]],
        ];
        for (m, basis) in want.iter().enumerate() {
            for (k, v) in basis.iter().enumerate() {
                let got = f.vector(k, m).unwrap();
                assert!((got[0] - v[0]).norm() < 1e-15 && (got[1] - v[1]).norm() < 1e-15, "{k} {m}");
            }
        }
        assert!((f.eta(0, 1, 0, 1).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((f.eta(0, 1, 1, 1).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_composites() {
        for d in [0, 1, 6, 12, 2048] {
            assert!(matches!(MubFamily::new(d), Err(Error::UnsupportedDimension(_))), "{d}");
        }
    }

    #[test]
    fn gf_tables_are_fields() {
        for m in 1..=MAX_GF2_EXPONENT {
            let f = Gf2m::new(m).unwrap();
            let n = f.size();
            let ones = (0..n).filter(|&a| f.trace(a) == 1).count();
            assert_eq!(ones as u32, n / 2);
            assert!((0..n).all(|a| f.trace(a) <= 1));
        }
    }

    #[test]
    fn fast_probabilities_match_overlaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [4, 5, 8] {
            let f = MubFamily::new(d).unwrap();
            let psi = QuditState::random(d, &mut rng);
            for m in 0..=d {
                let p = f.basis_probabilities(psi.amplitudes(), m).unwrap();
                for (k, pk) in p.iter().enumerate() {
                    let v = f.vector(k, m).unwrap();
                    let o: Complex64 = v.iter().zip(psi.amplitudes()).map(|(a, b)| a.conj() * b).sum();
                    assert!((o.norm_sqr() - pk).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn decomposition_of_identity_and_ket_bra() {
        let f = MubFamily::new(2).unwrap();
        let dec = f.decompose(&ObservableMatrix::identity(2)).unwrap();
        assert!(dec.coefficients.iter().flatten().all(|x| (x - c(1.0, 0.0)).norm() < 1e-14));
        let a = ObservableMatrix::from_fn(2, |i, j| if (i, j) == (1, 0) { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let back = f.decompose(&a).unwrap().reconstruct(&f).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-10);
    }

    #[test]
    fn qudit_sampling_is_uniform_over_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = MubFamily::new(2).unwrap();
        let zero = QuditState::basis(2, 0);
        let mut counts = [[0u32; 2]; 3];
        for _ in 0..10_000 {
            let (k, m) = sample_mub_povm(zero.amplitudes(), &f, &mut rng).unwrap();
            counts[m][k] += 1;
        }
        assert_eq!(counts[0], [0, 0]);
        for m in 1..3 {
            let tot = (counts[m][0] + counts[m][1]) as f64 / 1e4;
            assert!((tot - 0.5).abs() < 0.02);
        }
    }
}
