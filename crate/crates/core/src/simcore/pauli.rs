use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn as_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'X' => Some(Basis::X),
            'Y' => Some(Basis::Y),
            'Z' => Some(Basis::Z),
            _ => None,
        }
    }

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn basis(self) -> Option<Basis> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Basis::X),
            Pauli::Y => Some(Basis::Y),
            Pauli::Z => Some(Basis::Z),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `self · other = i^phase · result`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// An `n`-qubit Pauli operator `i^phase · P_0 ⊗ … ⊗ P_{n-1}`.
///
/// Hermitian strings have an even phase, i.e. an overall sign of `±1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: u8,
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { phase: 0, ops: vec![Pauli::I; n] }
    }

    pub fn new(ops: Vec<Pauli>, negative: bool) -> Self {
        Self { phase: if negative { 2 } else { 0 }, ops }
    }

    /// Build from a sparse `(qubit, Pauli)` list.
    pub fn from_sparse(n: usize, entries: &[(usize, Pauli)]) -> Result<Self> {
        let mut ops = vec![Pauli::I; n];
        for &(q, p) in entries {
            if q >= n {
                return Err(Error::invalid(format!("qubit {q} outside 0..{n}")));
            }
            ops[q] = p;
        }
        Ok(Self { phase: 0, ops })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    pub fn negated(&self) -> Self {
        Self { phase: (self.phase + 2) % 4, ops: self.ops.clone() }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.ops.len()).filter(|&q| self.ops[q] != Pauli::I).collect()
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// True when on every qubit both strings act with the same Pauli or one
    /// of them acts trivially, so a single local setting measures both.
    pub fn qubitwise_compatible(&self, other: &PauliString) -> bool {
        self.ops
            .iter()
            .zip(&other.ops)
            .all(|(&a, &b)| a == Pauli::I || b == Pauli::I || a == b)
    }

    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: other.len() });
        }
        let mut phase = self.phase + other.phase;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul(b);
                phase += ph;
                p
            })
            .collect();
        Ok(PauliString { phase: phase % 4, ops })
    }

    /// `(x_mask, z_mask)` over amplitude indices (qubit `q` ↔ bit `n-1-q`).
    pub fn masks(&self) -> (usize, usize) {
        let n = self.ops.len();
        let mut xm = 0usize;
        let mut zm = 0usize;
        for (q, &p) in self.ops.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            if p.x_bit() {
                xm |= bit;
            }
            if p.z_bit() {
                zm |= bit;
            }
        }
        (xm, zm)
    }

    /// Eigenvalue `±1` implied by local outcomes (bit `0` ↔ `+1`) when each
    /// non-identity factor was measured in its own basis.
    pub fn eigenvalue_from_bits(&self, bits: &[u8]) -> i8 {
        let mut parity = self.is_negative() as u8;
        for (q, &p) in self.ops.iter().enumerate() {
            if p != Pauli::I {
                parity ^= bits[q] & 1;
            }
        }
        if parity == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for p in &self.ops {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional `+`/`-` sign followed by `I`, `X`, `Y`, `Z`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let ops = body
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::invalid(format!("bad Pauli character {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::invalid("empty Pauli string"));
        }
        Ok(PauliString::new(ops, negative))
    }
}

/// All `2^k` products of `k` commuting generators, identity first.
pub fn stabilizer_group(generators: &[PauliString]) -> Result<Vec<PauliString>> {
    let n = generators.first().map(PauliString::len).unwrap_or(0);
    for (a, g) in generators.iter().enumerate() {
        if !g.is_hermitian() {
            return Err(Error::invalid(format!("generator {g} is not Hermitian")));
        }
        for h in &generators[a + 1..] {
            if !g.commutes_with(h) {
                return Err(Error::invalid(format!("generators {g} and {h} anticommute")));
            }
        }
    }
    let mut group = vec![PauliString::identity(n)];
    for g in generators {
        let extra: Vec<PauliString> = group.iter().map(|s| s.mul(g)).collect::<Result<_>>()?;
        group.extend(extra);
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_track_phase() {
        let g2: PauliString = "ZXZI".parse().unwrap();
        let g3: PauliString = "IZXZ".parse().unwrap();
        let p = g2.mul(&g3).unwrap();
        assert_eq!(p.to_string(), "+ZYYZ");
        assert!(g2.commutes_with(&g3));
        assert!(!g2.qubitwise_compatible(&g3));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["+XYZI", "-ZZ", "+I"] {
            let p: PauliString = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn group_has_all_products() {
        let gens: Vec<PauliString> = ["XZ", "ZX"].iter().map(|s| s.parse().unwrap()).collect();
        let g = stabilizer_group(&gens).unwrap();
        let names: Vec<String> = g.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["+II", "+XZ", "+ZX", "+YY"]);
    }

    #[test]
    fn eigenvalue_from_bits_uses_sign() {
        let p: PauliString = "-XIZ".parse().unwrap();
        assert_eq!(p.eigenvalue_from_bits(&[0, 1, 0]), -1);
        assert_eq!(p.eigenvalue_from_bits(&[1, 1, 0]), 1);
    }
}
