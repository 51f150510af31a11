//! Pauli operators in binary symplectic form.
//!
//! `PauliOp` drops phases entirely; it is the currency of frames, errors and
//! corrections. `SignedPauli` carries a ±1 sign and is used for stabilizer
//! generators. Both read `(x_i, z_i) = (1, 1)` as `Y` on qubit `i`.

use std::fmt;

use crate::gf2::BitVector;

/// A sign-free Pauli operator on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    pub x: BitVector,
    pub z: BitVector,
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVector::zeros(n), z: BitVector::zeros(n) }
    }

    pub fn new(x: BitVector, z: BitVector) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts must have equal length");
        Self { x, z }
    }

    /// X on every listed qubit.
    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        Self { x: BitVector::from_indices(n, qubits), z: BitVector::zeros(n) }
    }

    /// Z on every listed qubit.
    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        Self { x: BitVector::zeros(n), z: BitVector::from_indices(n, qubits) }
    }

    /// A single-qubit Pauli embedded at `qubit`.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(qubit, p);
        op
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x.or(&self.z).weight()
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).ones()
    }

    /// Whether the two operators commute (symplectic product zero).
    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    /// Product up to phase.
    pub fn compose(&self, other: &PauliOp) -> PauliOp {
        PauliOp { x: self.x.xor(&other.x), z: self.z.xor(&other.z) }
    }

    pub fn compose_assign(&mut self, other: &PauliOp) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Restriction to the listed qubits, in order.
    pub fn restrict(&self, qubits: &[usize]) -> PauliOp {
        PauliOp { x: self.x.gather(qubits), z: self.z.gather(qubits) }
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.len() {
            let c = match self.get(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl std::str::FromStr for PauliOp {
    type Err = crate::gf2::Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut op = PauliOp::identity(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            let p = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(crate::gf2::Gf2Error::Parse(format!("bad Pauli {other:?}"))),
            };
            op.set(i, p);
        }
        Ok(op)
    }
}

/// A Hermitian Pauli operator with a ±1 sign (`sign == true` means −1).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SignedPauli {
    pub op: PauliOp,
    pub sign: bool,
}

impl SignedPauli {
    pub fn plus(op: PauliOp) -> Self {
        Self { op, sign: false }
    }

    pub fn new(op: PauliOp, sign: bool) -> Self {
        Self { op, sign }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutation_rules() {
        let x: PauliOp = "X".parse().unwrap();
        let z: PauliOp = "Z".parse().unwrap();
        let y: PauliOp = "Y".parse().unwrap();
        assert!(!x.commutes_with(&z));
        assert!(!x.commutes_with(&y));
        assert!(x.commutes_with(&x));
        let xx: PauliOp = "XX".parse().unwrap();
        let zz: PauliOp = "ZZ".parse().unwrap();
        assert!(xx.commutes_with(&zz));
    }

    #[test]
    fn weight_counts_support() {
        let p: PauliOp = "XIYZ".parse().unwrap();
        assert_eq!(p.weight(), 3);
        assert_eq!(p.support(), vec![0, 2, 3]);
        assert_eq!(p.to_string(), "XIYZ");
    }
}
