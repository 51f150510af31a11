//! Pauli-frame backend.
//!
//! A frame records the Pauli difference between a noisy run and one fixed
//! ideal reference run. Clifford gates conjugate it, measurements turn its X
//! part into outcome flips, and decoder calls are re-evaluated only when one
//! of their inputs is flipped: `flip_out = f(ref ⊕ flip_in) ⊕ f(ref)`.

use super::{CircuitError, ClassicalProcessor, CompiledCircuit, NoProcessor, Op};
use crate::gf2::BitVector;
use crate::noise::{self, FaultEffect, FaultPattern, NoiseParams};
use crate::pauli::{Pauli, PauliOp};

/// Pauli error record over quantum slots plus classical flips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: BitVector,
    pub z: BitVector,
    pub classical: BitVector,
}

impl PauliFrame {
    pub fn identity(nq: usize, nc: usize) -> Self {
        Self { x: BitVector::zeros(nq), z: BitVector::zeros(nq), classical: BitVector::zeros(nc) }
    }

    /// Frame holding `p` on the first `p.len()` slots.
    pub fn from_pauli(p: &PauliOp, nq: usize, nc: usize) -> Self {
        let mut f = Self::identity(nq, nc);
        for q in p.support() {
            f.apply(q, p.get(q));
        }
        f
    }

    #[inline]
    pub fn apply(&mut self, q: usize, p: Pauli) {
        let (px, pz) = p.bits();
        if px {
            self.x.flip(q);
        }
        if pz {
            self.z.flip(q);
        }
    }

    /// Frame restricted to the given slots, as a Pauli.
    pub fn restrict(&self, slots: &[usize]) -> PauliOp {
        PauliOp::new(self.x.gather(slots), self.z.gather(slots))
    }

    pub fn compose(&self, other: &PauliFrame) -> PauliFrame {
        PauliFrame {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            classical: self.classical.xor(&other.classical),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero() && self.classical.is_zero()
    }
}

/// Support size of the frame on each block of slots.
pub fn weight_census(frame: &PauliFrame, blocks: &[Vec<usize>]) -> Vec<usize> {
    blocks.iter().map(|b| b.iter().filter(|&&q| frame.x.get(q) || frame.z.get(q)).count()).collect()
}

pub type FrameResult = PauliFrame;

/// Frame simulator bound to one compiled circuit and its ideal reference record.
pub struct FrameSimulator<'a> {
    circuit: &'a CompiledCircuit,
    reference: Vec<bool>,
    proc: &'a dyn ClassicalProcessor,
    ops: Vec<Op>,
}

impl<'a> FrameSimulator<'a> {
    /// `reference` holds the classical value of every slot in one ideal run.
    pub fn new(circuit: &'a CompiledCircuit, reference: Vec<bool>, proc: &'a dyn ClassicalProcessor) -> Self {
        assert_eq!(reference.len(), circuit.num_cslots);
        let ops = circuit.layers.iter().flatten().copied().collect();
        Self { circuit, reference, proc, ops }
    }

    pub fn circuit(&self) -> &CompiledCircuit {
        self.circuit
    }

    pub fn reference(&self) -> &[bool] {
        &self.reference
    }

    /// Draws the fault pattern for `trial` and runs it.
    pub fn run_sampled(&self, params: &NoiseParams, trial: u64, initial: Option<&PauliFrame>) -> Result<PauliFrame, CircuitError> {
        let fp = noise::sample_fault_pattern(self.ops.len(), params, trial);
        self.run_pattern(&fp, params, initial)
    }

    pub fn run_pattern(
        &self,
        fp: &FaultPattern,
        params: &NoiseParams,
        initial: Option<&PauliFrame>,
    ) -> Result<PauliFrame, CircuitError> {
        let effects: Vec<(usize, FaultEffect)> = fp
            .locations
            .iter()
            .map(|&loc| {
                let op = &self.ops[loc];
                let meas = matches!(op, Op::Measure { .. });
                (loc, noise::fault_effect(params.seed, fp.trial, loc, op.fault_arity(), meas))
            })
            .collect();
        self.run_effects(&effects, initial)
    }

    /// Runs with explicit fault effects (location-sorted).
    pub fn run_effects(&self, faults: &[(usize, FaultEffect)], initial: Option<&PauliFrame>) -> Result<PauliFrame, CircuitError> {
        let c = self.circuit;
        let mut f = match initial {
            Some(init) => {
                assert_eq!(init.x.len(), c.num_qslots);
                init.clone()
            }
            None => PauliFrame::identity(c.num_qslots, c.num_cslots),
        };
        let mut next_fault = 0;
        let mut next_call = 0;
        self.run_calls(0, &mut f, &mut next_call)?;
        for (li, layer) in c.layers.iter().enumerate() {
            let base = c.layer_offsets[li];
            for (gi, op) in layer.iter().enumerate() {
                step(&mut f, op);
                let loc = base + gi;
                while next_fault < faults.len() && faults[next_fault].0 == loc {
                    apply_fault(&mut f, op, faults[next_fault].1);
                    next_fault += 1;
                }
            }
            self.run_calls(li + 1, &mut f, &mut next_call)?;
        }
        Ok(f)
    }

    fn run_calls(&self, upto: usize, f: &mut PauliFrame, next_call: &mut usize) -> Result<(), CircuitError> {
        let calls = &self.circuit.calls;
        while *next_call < calls.len() && calls[*next_call].call.after_layer == upto {
            let k = &calls[*next_call];
            *next_call += 1;
            if k.inputs.iter().all(|&s| !f.classical.get(s)) {
                continue;
            }
            let actual: Vec<bool> = k.inputs.iter().map(|&s| self.reference[s] ^ f.classical.get(s)).collect();
            let out = self.proc.process(&k.call, &BitVector::from_bools(&actual))?;
            if out.len() != k.outputs.len() {
                return Err(CircuitError::Processor(format!("call {:?} returned {} bits", k.call.name, out.len())));
            }
            for (i, &s) in k.outputs.iter().enumerate() {
                f.classical.set(s, out.get(i) ^ self.reference[s]);
            }
        }
        Ok(())
    }
}

#[inline]
fn step(f: &mut PauliFrame, op: &Op) {
    match *op {
        Op::Idle(_) | Op::Pauli(..) => {}
        Op::Init(q) | Op::Discard(q) => {
            f.x.set(q, false);
            f.z.set(q, false);
        }
        Op::Measure { q, c } => {
            f.classical.set(c, f.x.get(q));
            f.x.set(q, false);
            f.z.set(q, false);
        }
        Op::H(q) => {
            let (x, z) = (f.x.get(q), f.z.get(q));
            f.x.set(q, z);
            f.z.set(q, x);
        }
        Op::Cnot { c, t } => {
            if f.x.get(c) {
                f.x.flip(t);
            }
            if f.z.get(t) {
                f.z.flip(c);
            }
        }
        Op::IfPauli { c, q, p } => {
            if f.classical.get(c) {
                f.apply(q, p);
            }
        }
    }
}

fn apply_fault(f: &mut PauliFrame, op: &Op, effect: FaultEffect) {
    match (effect, *op) {
        (FaultEffect::None, _) => {}
        (FaultEffect::FlipOutcome, Op::Measure { c, .. }) => f.classical.flip(c),
        (FaultEffect::One(p), Op::Idle(q) | Op::Init(q) | Op::H(q) | Op::Pauli(q, _) | Op::IfPauli { q, .. }) => f.apply(q, p),
        (FaultEffect::Two(pa, pb), Op::Cnot { c, t }) => {
            f.apply(c, pa);
            f.apply(t, pb);
        }
        (e, o) => debug_assert!(false, "fault {e:?} does not fit op {o:?}"),
    }
}

/// Conjugates a frame through a circuit without faults. Circuits with decoder
/// calls fail if a call input is flipped, since no processor is available.
pub fn propagate_frame(c: &CompiledCircuit, frame: &PauliFrame) -> Result<PauliFrame, CircuitError> {
    let sim = FrameSimulator::new(c, vec![false; c.num_cslots], &NoProcessor);
    sim.run_effects(&[], Some(frame))
}
