use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::simcore::{Pauli, PauliString};

/// An `n`-qubit Clifford `U` up to global phase, stored as the signed images
/// `U† Z_q U` (stabilizers) and `U† X_q U` (destabilizers).
///
/// Measuring in the rotated basis `U†|b⟩` is the same as measuring the
/// commuting stabilizer images, with outcome bit `b_q = 1` for eigenvalue `−1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    stabilizers: Vec<PauliString>,
    destabilizers: Vec<PauliString>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Sym {
    x: u64,
    z: u64,
}

impl Sym {
    fn dot(self, o: Sym) -> u32 {
        ((self.x & o.z) ^ (self.z & o.x)).count_ones() & 1
    }

    fn add(self, o: Sym) -> Sym {
        Sym { x: self.x ^ o.x, z: self.z ^ o.z }
    }

    fn to_pauli(self, n: usize, negative: bool) -> PauliString {
        let ops = (0..n).map(|q| Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)).collect();
        PauliString::new(ops, negative)
    }
}

/// Project `u` onto the symplectic complement of the chosen pairs.
fn project(mut u: Sym, pairs: &[(Sym, Sym)]) -> Sym {
    for &(v, w) in pairs {
        let (a, b) = (u.dot(w), u.dot(v));
        if a == 1 {
            u = u.add(v);
        }
        if b == 1 {
            u = u.add(w);
        }
    }
    u
}

/// Uniformly random Clifford (modulo phase) on `n ≤ 32` qubits.
///
/// Builds a uniformly random symplectic basis by symplectic Gram–Schmidt:
/// each new vector is a uniform random vector projected onto the complement
/// of the pairs chosen so far, which is uniform on that complement. Signs
/// are drawn independently.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CliffordTableau> {
    if n == 0 || n > 32 {
        return Err(Error::invalid(format!("random_clifford supports 1..=32 qubits, got {n}")));
    }
    let mask = (1u64 << n) - 1;
    let draw = |rng: &mut R| Sym { x: rng.random::<u64>() & mask, z: rng.random::<u64>() & mask };
    let mut pairs: Vec<(Sym, Sym)> = Vec::with_capacity(n);
    for _ in 0..n {
        let v = loop {
            let u = project(draw(rng), &pairs);
            if u.x != 0 || u.z != 0 {
                break u;
            }
        };
        let w = loop {
            let u = project(draw(rng), &pairs);
            if v.dot(u) == 1 {
                break u;
            }
        };
        pairs.push((v, w));
    }
    let stabilizers = pairs.iter().map(|(v, _)| v.to_pauli(n, rng.random())).collect();
    let destabilizers = pairs.iter().map(|(_, w)| w.to_pauli(n, rng.random())).collect();
    Ok(CliffordTableau { stabilizers, destabilizers })
}

impl CliffordTableau {
    pub fn new(stabilizers: Vec<PauliString>, destabilizers: Vec<PauliString>) -> Result<Self> {
        let n = stabilizers.len();
        if n == 0 || destabilizers.len() != n {
            return Err(Error::invalid("a Clifford tableau needs n stabilizers and n destabilizers"));
        }
        for p in stabilizers.iter().chain(&destabilizers) {
            if p.len() != n || !p.is_hermitian() {
                return Err(Error::invalid(format!("tableau row {p} is not a Hermitian {n}-qubit Pauli")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let sz = stabilizers[i].commutes_with(&stabilizers[j]);
                let xx = destabilizers[i].commutes_with(&destabilizers[j]);
                let zx = stabilizers[i].commutes_with(&destabilizers[j]);
                if !sz || !xx || zx == (i == j) {
                    return Err(Error::invalid("tableau rows violate the canonical commutation relations"));
                }
            }
        }
        Ok(Self { stabilizers, destabilizers })
    }

    pub fn n_qubits(&self) -> usize {
        self.stabilizers.len()
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destabilizers
    }
}

/// Comma-separated stabilizers, `/`, comma-separated destabilizers.
impl fmt::Display for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[PauliString]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}/{}", join(&self.stabilizers), join(&self.destabilizers))
    }
}

impl FromStr for CliffordTableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('/').ok_or_else(|| Error::invalid(format!("bad tableau `{s}`")))?;
        let parse = |t: &str| t.split(',').map(str::parse).collect::<Result<Vec<PauliString>>>();
        Self::new(parse(a)?, parse(b)?)
    }
}
