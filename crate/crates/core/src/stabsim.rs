//! Bit-packed stabilizer tableau with destabilizers.
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers and row `2n` a
//! scratch row used for deterministic measurements. Each row stores its X
//! and Z bits packed into `u64` words plus one sign bit.

use rand::Rng;

use crate::error::{Error, Result};
use crate::simcore::{Basis, LocalSampler, Pauli, PauliString};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

fn word_bit(q: usize) -> (usize, u64) {
    (q / 64, 1u64 << (q % 64))
}

/// Exponent of `i` picked up when multiplying row `i` into row `h`,
/// summed over a word, as (count of +1, count of -1).
#[inline]
fn phase_counts(x1: u64, z1: u64, x2: u64, z2: u64) -> (u32, u32) {
    let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
    let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
    let plus = (px & qy) | (py & qz) | (pz & qx);
    let minus = (px & qz) | (py & qx) | (pz & qy);
    (plus.count_ones(), minus.count_ones())
}

impl StabilizerTableau {
    fn blank(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        Self { n, words, x: vec![0; rows * words], z: vec![0; rows * words], r: vec![false; rows] }
    }

    /// `|0…0⟩`: stabilizers `Z_k`, destabilizers `X_k`.
    pub fn zero_state(n: usize) -> Self {
        let mut t = Self::blank(n);
        for q in 0..n {
            t.set_bit(q, q, true, false);
            t.set_bit(n + q, q, false, true);
        }
        t
    }

    /// Cluster state stabilized by `Z_{k-1} X_k Z_{k+1}`, with `Z_{n} ≡ Z_0`
    /// when `periodic`.
    pub fn linear_cluster(n: usize, periodic: bool) -> Result<Self> {
        if n == 0 || (periodic && n < 3) {
            return Err(Error::invalid(format!("linear cluster of {n} qubits is too small")));
        }
        let mut t = Self::blank(n);
        for k in 0..n {
            t.set_bit(k, k, false, true);
            let row = n + k;
            t.set_bit(row, k, true, false);
            if k > 0 {
                t.set_bit(row, k - 1, false, true);
            } else if periodic {
                t.set_bit(row, n - 1, false, true);
            }
            if k + 1 < n {
                t.set_bit(row, k + 1, false, true);
            } else if periodic {
                t.set_bit(row, 0, false, true);
            }
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    fn set_bit(&mut self, row: usize, q: usize, xb: bool, zb: bool) {
        let (w, m) = word_bit(q);
        let i = row * self.words + w;
        if xb {
            self.x[i] |= m;
        } else {
            self.x[i] &= !m;
        }
        if zb {
            self.z[i] |= m;
        } else {
            self.z[i] &= !m;
        }
    }

    fn row_pauli(&self, row: usize) -> PauliString {
        let ops = (0..self.n)
            .map(|q| {
                let (w, m) = word_bit(q);
                let i = row * self.words + w;
                Pauli::from_bits(self.x[i] & m != 0, self.z[i] & m != 0)
            })
            .collect();
        PauliString::new(ops, self.r[row])
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.n..2 * self.n).map(|r| self.row_pauli(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|r| self.row_pauli(r)).collect()
    }

    /// Row `h` ← row `i` · row `h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let mut e: i64 = 2 * (self.r[h] as i64 + self.r[i] as i64);
        for k in 0..w {
            let (a, b) = (i * w + k, h * w + k);
            let (p, m) = phase_counts(self.x[a], self.z[a], self.x[b], self.z[b]);
            e += p as i64 - m as i64;
            self.x[b] ^= self.x[a];
            self.z[b] ^= self.z[a];
        }
        debug_assert!(e.rem_euclid(2) == 0);
        self.r[h] = e.rem_euclid(4) == 2;
    }

    fn anticommutes(&self, row: usize, xm: &[u64], zm: &[u64]) -> bool {
        let w = self.words;
        let mut acc = 0u32;
        for k in 0..w {
            acc ^= ((self.x[row * w + k] & zm[k]) ^ (self.z[row * w + k] & xm[k])).count_ones() & 1;
        }
        acc == 1
    }

    fn masks(&self, entries: &[(usize, Pauli)]) -> Result<(Vec<u64>, Vec<u64>)> {
        if entries.iter().all(|&(_, p)| p == Pauli::I) {
            return Err(Error::invalid("Pauli product has empty support"));
        }
        let mut xm = vec![0u64; self.words];
        let mut zm = vec![0u64; self.words];
        for &(q, p) in entries {
            if q >= self.n {
                return Err(Error::invalid(format!("qubit {q} outside 0..{}", self.n)));
            }
            let (w, m) = word_bit(q);
            if (xm[w] | zm[w]) & m != 0 {
                return Err(Error::invalid(format!("qubit {q} listed twice")));
            }
            if p.x_bit() {
                xm[w] |= m;
            }
            if p.z_bit() {
                zm[w] |= m;
            }
        }
        Ok((xm, zm))
    }

    /// Measure the Hermitian product `⊗ P_q` over the listed qubits.
    /// Returns the eigenvalue `±1` and updates the tableau.
    pub fn measure_pauli_product<R: Rng + ?Sized>(&mut self, entries: &[(usize, Pauli)], rng: &mut R) -> Result<i8> {
        let (xm, zm) = self.masks(entries)?;
        Ok(if self.measure_masks(&xm, &zm, || rng.random::<bool>()) { -1 } else { 1 })
    }

    /// Measure a dense Hermitian Pauli string, sign included.
    pub fn measure_pauli_string<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<i8> {
        if p.len() != self.n || !p.is_hermitian() {
            return Err(Error::invalid("expected a Hermitian Pauli string over the whole register"));
        }
        let entries: Vec<_> = p.ops().iter().copied().enumerate().collect();
        let s = self.measure_pauli_product(&entries, rng)?;
        Ok(if p.is_negative() { -s } else { s })
    }

    /// Deterministic eigenvalue of the product if it lies in `±` the
    /// stabilizer group, otherwise `None`. Leaves the tableau untouched.
    pub fn peek_pauli_product(&self, entries: &[(usize, Pauli)]) -> Result<Option<i8>> {
        let (xm, zm) = self.masks(entries)?;
        if (self.n..2 * self.n).any(|row| self.anticommutes(row, &xm, &zm)) {
            return Ok(None);
        }
        let mut t = self.clone();
        Ok(Some(if t.measure_masks(&xm, &zm, || false) { -1 } else { 1 }))
    }

    /// Returns the outcome bit (`true` for eigenvalue −1).
    fn measure_masks(&mut self, xm: &[u64], zm: &[u64], mut coin: impl FnMut() -> bool) -> bool {
        let n = self.n;
        let w = self.words;
        if let Some(p) = (n..2 * n).find(|&row| self.anticommutes(row, xm, zm)) {
            for row in 0..2 * n {
                // row p - n is overwritten below
                if row != p && row != p - n && self.anticommutes(row, xm, zm) {
                    self.rowsum(row, p);
                }
            }
            let d = p - n;
            self.x.copy_within(p * w..(p + 1) * w, d * w);
            self.z.copy_within(p * w..(p + 1) * w, d * w);
            self.r[d] = self.r[p];
            let outcome = coin();
            self.x[p * w..(p + 1) * w].copy_from_slice(xm);
            self.z[p * w..(p + 1) * w].copy_from_slice(zm);
            self.r[p] = outcome;
            outcome
        } else {
            let s = 2 * n;
            self.x[s * w..(s + 1) * w].fill(0);
            self.z[s * w..(s + 1) * w].fill(0);
            self.r[s] = false;
            for d in 0..n {
                if self.anticommutes(d, xm, zm) {
                    self.rowsum(s, d + n);
                }
            }
            self.r[s]
        }
    }

    /// Measure one qubit in a Pauli basis; returns the outcome bit.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, q: usize, basis: Basis, rng: &mut R) -> Result<u8> {
        Ok(u8::from(self.measure_pauli_product(&[(q, basis.pauli())], rng)? == -1))
    }

    fn for_rows(&mut self, q: usize, mut f: impl FnMut(&mut bool, &mut u64, &mut u64, u64)) {
        let (w, m) = word_bit(q);
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            f(&mut self.r[row], &mut self.x[i], &mut self.z[i], m);
        }
    }

    pub fn h(&mut self, q: usize) {
        self.for_rows(q, |r, x, z, m| {
            if *x & *z & m != 0 {
                *r = !*r;
            }
            let t = (*x ^ *z) & m;
            *x ^= t;
            *z ^= t;
        });
    }

    pub fn s(&mut self, q: usize) {
        self.for_rows(q, |r, x, z, m| {
            if *x & *z & m != 0 {
                *r = !*r;
            }
            *z ^= *x & m;
        });
    }

    pub fn cnot(&mut self, a: usize, b: usize) {
        let (wa, ma) = word_bit(a);
        let (wb, mb) = word_bit(b);
        for row in 0..2 * self.n {
            let (ia, ib) = (row * self.words + wa, row * self.words + wb);
            let (xa, za) = (self.x[ia] & ma != 0, self.z[ia] & ma != 0);
            let (xb, zb) = (self.x[ib] & mb != 0, self.z[ib] & mb != 0);
            if xa && zb && (xb == za) {
                self.r[row] = !self.r[row];
            }
            if xa {
                self.x[ib] ^= mb;
            }
            if zb {
                self.z[ia] ^= ma;
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cnot(a, b);
        self.h(b);
    }

    fn row_bits(&self, row: usize) -> Vec<u64> {
        let w = self.words;
        let mut v = self.x[row * w..(row + 1) * w].to_vec();
        v.extend_from_slice(&self.z[row * w..(row + 1) * w]);
        v
    }

    fn symplectic(&self, a: usize, b: usize) -> bool {
        let w = self.words;
        self.anticommutes(a, &self.x[b * w..(b + 1) * w], &self.z[b * w..(b + 1) * w])
    }

    /// Stabilizers commute pairwise, pair with their destabilizers, and have
    /// full rank.
    pub fn check_invariants(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if self.symplectic(n + i, n + j) || self.symplectic(i, j) {
                    return false;
                }
                if self.symplectic(i, n + j) != (i == j) {
                    return false;
                }
            }
        }
        gf2_rank((n..2 * n).map(|r| self.row_bits(r)).collect()) == n
    }
}

fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let words = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..words * 64 {
        let (w, m) = word_bit(col);
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][w] & m != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[w] & m != 0 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

impl LocalSampler for StabilizerTableau {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn sample_local<R: Rng + ?Sized>(&self, bases: &[Basis], rng: &mut R) -> Result<Vec<u8>> {
        if bases.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: bases.len() });
        }
        let mut t = self.clone();
        bases.iter().enumerate().map(|(q, &b)| t.measure_qubit(q, b, rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn periodic_generators() {
        let t = StabilizerTableau::linear_cluster(4, true).unwrap();
        let g: Vec<String> = t.stabilizers().iter().map(|p| p.to_string()).collect();
        assert_eq!(g, ["+XZIZ", "+ZXZI", "+IZXZ", "+ZIZX"]);
        assert!(t.check_invariants());
        assert!(StabilizerTableau::linear_cluster(2, true).is_err());
    }

    #[test]
    fn gates_prepare_bell_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = StabilizerTableau::zero_state(2);
        t.h(0);
        t.cnot(0, 1);
        assert_eq!(t.peek_pauli_product(&[(0, Pauli::X), (1, Pauli::X)]).unwrap(), Some(1));
        assert_eq!(t.peek_pauli_product(&[(0, Pauli::Y), (1, Pauli::Y)]).unwrap(), Some(-1));
        assert_eq!(t.peek_pauli_product(&[(0, Pauli::Z)]).unwrap(), None);
        let a = t.measure_qubit(0, Basis::Z, &mut rng).unwrap();
        assert_eq!(t.measure_qubit(1, Basis::Z, &mut rng).unwrap(), a);
        assert!(t.check_invariants());
    }

    #[test]
    fn s_gate_phase() {
        let mut t = StabilizerTableau::zero_state(1);
        t.h(0);
        t.s(0);
        assert_eq!(t.peek_pauli_product(&[(0, Pauli::Y)]).unwrap(), Some(1));
        t.s(0);
        assert_eq!(t.peek_pauli_product(&[(0, Pauli::X)]).unwrap(), Some(-1));
    }

    #[test]
    fn invariants_survive_measurements() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut t = StabilizerTableau::linear_cluster(70, true).unwrap();
        for _ in 0..200 {
            let q = rng.random_range(0..70);
            let b = Basis::ALL[rng.random_range(0..3)];
            t.measure_qubit(q, b, &mut rng).unwrap();
        }
        assert!(t.check_invariants());
    }

    #[test]
    fn rejects_bad_supports() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = StabilizerTableau::zero_state(3);
        assert!(t.measure_pauli_product(&[], &mut rng).is_err());
        assert!(t.measure_pauli_product(&[(3, Pauli::Z)], &mut rng).is_err());
        assert!(t.measure_pauli_product(&[(1, Pauli::Z), (1, Pauli::X)], &mut rng).is_err());
    }
}
