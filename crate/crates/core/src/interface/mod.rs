//! Error-correction gadgets, partial decoding interfaces and the Monte Carlo
//! estimate of their failure rate.

pub mod decoder;
pub mod ec;
pub mod gamma;
pub mod tau;

use thiserror::Error;

pub use decoder::{decode_sector, decode_syndrome, logical_bell_process, residual_logical_error, BellOutcome, Decoded, SectorDecode};
pub use ec::{build_ec, edge_coloring, labels, EcGadget, EcLayout, EC_CALL};
pub use gamma::{
    build_gamma, build_gamma_on, default_proc_layers, gamma_input, output_blocks, resource_generators, resource_state,
    teleport_check, GammaKnobs, InterfaceCircuit, ResourceOracle, StageDepths, TeleportCheck, BELL_CALL,
};
pub use tau::{estimate_tau, fit_lambda, TauConfig, TauEstimate, TauRunner, TrialOutcome};

use crate::circuit::{CircuitError, ClassicalCall, ClassicalProcessor, TableauError};
use crate::css::{CodeError, CodeFamily, CssCode};
use crate::gf2::{BitVector, Gf2Error};
use crate::noise::NoiseError;

#[derive(Debug, Error)]
pub enum InterfaceError {
    #[error("invalid levels r = {r}, r' = {r_prime} for a family of depth {depth}")]
    Levels { r: usize, r_prime: usize, depth: usize },
    #[error("m_{r_prime} = {m_prime} does not divide m_{r} = {m}")]
    Blocks { r: usize, r_prime: usize, m: usize, m_prime: usize },
    #[error("{what} has length {got}, expected {expected}")]
    InputLength { what: &'static str, expected: usize, got: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Decoder callbacks for circuits built from one code family.
///
/// `ec` calls take `[level]` and the X- then Z-check outcomes, and return the
/// herald followed by per-qubit X and Z correction bits (all zero when heralded). `bell` calls take
/// `[r, r']` and the outcome strings `m1 ++ m2`, and return the herald
/// followed by per-qubit X and Z correction bits over all B blocks.
#[derive(Debug, Clone)]
pub struct FamilyProcessor {
    codes: Vec<CssCode>,
}

impl FamilyProcessor {
    pub fn new(family: &CodeFamily) -> Self {
        Self { codes: family.levels.clone() }
    }

    fn code(&self, level: usize) -> Result<&CssCode, CircuitError> {
        level
            .checked_sub(1)
            .and_then(|i| self.codes.get(i))
            .ok_or_else(|| CircuitError::Processor(format!("no code at level {level}")))
    }

    fn ec(&self, level: usize, inputs: &BitVector) -> Result<BitVector, InterfaceError> {
        let code = self.code(level)?;
        let rx = code.hx().nrows();
        let rz = code.hz().nrows();
        if inputs.len() != rx + rz {
            return Err(InterfaceError::InputLength { what: "ec call input", expected: rx + rz, got: inputs.len() });
        }
        let d = decode_syndrome(code, &inputs.slice(0, rx), &inputs.slice(rx, rx + rz))?;
        let out = BitVector::from_bools(&[d.heralded]);
        if d.heralded {
            // A heralded decode is not trusted; the block is left as it is.
            return Ok(out.concat(&BitVector::zeros(2 * code.n())));
        }
        Ok(out.concat(&d.correction.x).concat(&d.correction.z))
    }

    fn bell(&self, r: usize, r_prime: usize, inputs: &BitVector) -> Result<BitVector, InterfaceError> {
        let code = self.code(r)?;
        let code_p = self.code(r_prime)?;
        let n = code.n();
        if inputs.len() != 2 * n {
            return Err(InterfaceError::InputLength { what: "bell call input", expected: 2 * n, got: inputs.len() });
        }
        let out = logical_bell_process(code, &inputs.slice(0, n), &inputs.slice(n, 2 * n))?;
        let (mp, np) = (code_p.m(), code_p.n());
        let blocks = code.m() / mp;
        let mut bx = BitVector::zeros(blocks * np);
        let mut bz = BitVector::zeros(blocks * np);
        for j in 0..code.m() {
            let (blk, jj) = (j / mp, j % mp);
            if out.u.get(j) {
                for q in code_p.lx().row(jj).ones() {
                    bx.flip(blk * np + q);
                }
            }
            if out.v.get(j) {
                for q in code_p.lz().row(jj).ones() {
                    bz.flip(blk * np + q);
                }
            }
        }
        Ok(BitVector::from_bools(&[out.heralded]).concat(&bx).concat(&bz))
    }
}

impl ClassicalProcessor for FamilyProcessor {
    fn process(&self, call: &ClassicalCall, inputs: &BitVector) -> Result<BitVector, CircuitError> {
        let res = match (call.name.as_str(), call.params.as_slice()) {
            (EC_CALL, &[level]) => self.ec(level, inputs),
            (BELL_CALL, &[r, rp]) => self.bell(r, rp, inputs),
            _ => return Err(CircuitError::Processor(format!("unknown call {:?} with params {:?}", call.name, call.params))),
        };
        res.map_err(|e| CircuitError::Processor(e.to_string()))
    }
}
