//! Syndrome decoding and logical Bell-measurement processing.
//!
//! Each sector is decoded by table lookup of a minimum-weight preimage. On a
//! table miss the syndrome is solved directly and the solution is greedily
//! shortened by kernel vectors. A decode is heralded when the correction
//! weight reaches half the distance, or when the syndrome is inconsistent.

use super::InterfaceError;
use crate::css::{CssCode, SectorTable};
use crate::gf2::{BitMatrix, BitVector};
use crate::pauli::PauliOp;

/// Correction for one error sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorDecode {
    pub correction: BitVector,
    pub heralded: bool,
}

/// Correction for both sectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub correction: PauliOp,
    pub heralded: bool,
}

/// Decodes `syndrome = checks · e` to a low-weight `e`.
pub fn decode_sector(checks: &BitMatrix, table: &SectorTable, syndrome: &BitVector, distance: usize) -> SectorDecode {
    let n = checks.ncols();
    if syndrome.is_zero() {
        return SectorDecode { correction: BitVector::zeros(n), heralded: false };
    }
    let correction = match table.lookup(syndrome) {
        Some(e) => e.clone(),
        None => match checks.solve(syndrome) {
            Ok(Some(e)) => greedy_shorten(e, &checks.nullspace_basis()),
            // Outside the image: no error explains this syndrome.
            _ => return SectorDecode { correction: BitVector::zeros(n), heralded: true },
        },
    };
    let heralded = 2 * correction.weight() >= distance;
    SectorDecode { correction, heralded }
}

fn greedy_shorten(mut e: BitVector, kernel: &BitMatrix) -> BitVector {
    loop {
        let mut improved = false;
        for k in kernel.rows() {
            let cand = e.xor(k);
            if cand.weight() < e.weight() {
                e = cand;
                improved = true;
            }
        }
        if !improved {
            return e;
        }
    }
}

/// Decodes X-check outcomes `syn_x = H_X e_z` and Z-check outcomes `syn_z = H_Z e_x`.
pub fn decode_syndrome(code: &CssCode, syn_x: &BitVector, syn_z: &BitVector) -> Result<Decoded, InterfaceError> {
    if syn_x.len() != code.hx().nrows() {
        return Err(InterfaceError::InputLength { what: "X-check syndrome", expected: code.hx().nrows(), got: syn_x.len() });
    }
    if syn_z.len() != code.hz().nrows() {
        return Err(InterfaceError::InputLength { what: "Z-check syndrome", expected: code.hz().nrows(), got: syn_z.len() });
    }
    let d = code.distance().value;
    let z = decode_sector(code.hx(), code.z_error_table(), syn_x, d);
    let x = decode_sector(code.hz(), code.x_error_table(), syn_z, d);
    Ok(Decoded { correction: PauliOp::new(x.correction, z.correction), heralded: x.heralded || z.heralded })
}

/// Logical outcomes of a transversal Bell measurement between two blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellOutcome {
    /// `Z̄^Q Z̄^A` parities, read from the Z-basis outcomes `m2` of A.
    pub u: BitVector,
    /// `X̄^Q X̄^A` parities, read from the X-basis outcomes `m1` of Q.
    pub v: BitVector,
    pub heralded: bool,
}

/// Corrects both outcome strings to the nearest codeword and extracts logical parities.
pub fn logical_bell_process(code: &CssCode, m1: &BitVector, m2: &BitVector) -> Result<BellOutcome, InterfaceError> {
    let n = code.n();
    for (what, m) in [("m1", m1), ("m2", m2)] {
        if m.len() != n {
            return Err(InterfaceError::InputLength { what, expected: n, got: m.len() });
        }
    }
    let d = code.distance().value;
    // X-basis outcomes are flipped by Z errors, detected by the X checks.
    let s1 = code.hx().mul_vec(m1)?;
    let z = decode_sector(code.hx(), code.z_error_table(), &s1, d);
    let c1 = m1.xor(&z.correction);
    let s2 = code.hz().mul_vec(m2)?;
    let x = decode_sector(code.hz(), code.x_error_table(), &s2, d);
    let c2 = m2.xor(&x.correction);
    Ok(BellOutcome { u: code.lz().mul_vec(&c2)?, v: code.lx().mul_vec(&c1)?, heralded: z.heralded || x.heralded })
}

/// Residual logical action of a block error after one ideal decode.
pub fn residual_logical_error(code: &CssCode, e: &PauliOp) -> Result<bool, InterfaceError> {
    if code.is_trivial() {
        return Ok(!e.is_identity());
    }
    let syn_x = code.hx().mul_vec(&e.z)?;
    let syn_z = code.hz().mul_vec(&e.x)?;
    let dec = decode_syndrome(code, &syn_x, &syn_z)?;
    let rest = e.compose(&dec.correction);
    if !code.syndrome_is_trivial(&rest)? {
        return Ok(true);
    }
    let (a, b) = code.logical_action(&rest)?;
    Ok(!a.is_zero() || !b.is_zero())
}
