//! Layered Clifford circuits over labelled wires, and their simulators.
//!
//! A circuit is a sequence of layers; each gate names its input and output
//! wires. Quantum wires may be renamed by a gate, consumed by measurement or
//! discard, and created by initialization. Classical wires are write-once.
//! Decoder calls run between layers as external callbacks.
//!
//! Wires not named by any gate of a layer are left alone and carry no fault
//! location in that layer; builders insert explicit idle gates where waiting
//! qubits should be exposed to noise.

pub mod frame;
pub mod sim;
pub mod tableau;

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitVector;
use crate::pauli::Pauli;

pub use frame::{propagate_frame, weight_census, FrameResult, FrameSimulator, PauliFrame};
pub use sim::{run_ideal, run_noisy, run_tableau, Coins, TableauRun};
pub use tableau::{Tableau, TableauError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("layer {layer}: wire {label:?} used twice")]
    Overlap { layer: usize, label: String },
    #[error("layer {layer}, gate {gate}: {what}")]
    Arity { layer: usize, gate: usize, what: String },
    #[error("layer {layer}: quantum wire {label:?} is not live")]
    NotLive { layer: usize, label: String },
    #[error("layer {layer}: wire {label:?} already exists")]
    AlreadyLive { layer: usize, label: String },
    #[error("classical wire {0:?} read before it is written")]
    UnknownClassical(String),
    #[error("classical wire {0:?} written twice")]
    ClassicalRedefined(String),
    #[error("call {call:?} placed after layer {after} but the circuit has {depth} layers")]
    CallPosition { call: String, after: usize, depth: usize },
    #[error("input tableau has {got} qubits, circuit expects {expected}")]
    InputSize { expected: usize, got: usize },
    #[error("classical processor: {0}")]
    Processor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Idle,
    Init,
    Measure,
    H,
    Cnot,
    X,
    Y,
    Z,
    IfX,
    IfY,
    IfZ,
    Discard,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub gate: GateKind,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    #[serde(rename = "out")]
    pub outputs: Vec<String>,
}

impl Gate {
    fn new(gate: GateKind, inputs: Vec<String>, outputs: Vec<String>) -> Self {
        Self { gate, inputs, outputs }
    }
    pub fn idle(q: &str) -> Self {
        Self::new(GateKind::Idle, vec![q.into()], vec![q.into()])
    }
    pub fn init(q: &str) -> Self {
        Self::new(GateKind::Init, vec![], vec![q.into()])
    }
    pub fn measure(q: &str, c: &str) -> Self {
        Self::new(GateKind::Measure, vec![q.into()], vec![c.into()])
    }
    pub fn h(q: &str) -> Self {
        Self::new(GateKind::H, vec![q.into()], vec![q.into()])
    }
    pub fn cnot(c: &str, t: &str) -> Self {
        Self::new(GateKind::Cnot, vec![c.into(), t.into()], vec![c.into(), t.into()])
    }
    pub fn pauli(p: Pauli, q: &str) -> Self {
        let kind = match p {
            Pauli::X => GateKind::X,
            Pauli::Y => GateKind::Y,
            Pauli::Z => GateKind::Z,
            Pauli::I => GateKind::Idle,
        };
        Self::new(kind, vec![q.into()], vec![q.into()])
    }
    /// Applies `p` to `q` when classical wire `c` holds 1.
    pub fn if_pauli(p: Pauli, c: &str, q: &str) -> Self {
        let kind = match p {
            Pauli::X => GateKind::IfX,
            Pauli::Y => GateKind::IfY,
            Pauli::Z => GateKind::IfZ,
            Pauli::I => panic!("controlled identity"),
        };
        Self::new(kind, vec![c.into(), q.into()], vec![q.into()])
    }
    pub fn discard(q: &str) -> Self {
        Self::new(GateKind::Discard, vec![q.into()], vec![])
    }
}

/// A decoder call executed after `after_layer` layers have run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalCall {
    pub after_layer: usize,
    pub name: String,
    #[serde(default)]
    pub params: Vec<usize>,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    #[serde(rename = "out")]
    pub outputs: Vec<String>,
}

/// Computes classical outputs for decoder calls.
pub trait ClassicalProcessor: Sync {
    fn process(&self, call: &ClassicalCall, inputs: &BitVector) -> Result<BitVector, CircuitError>;
}

/// Processor for circuits without classical calls.
pub struct NoProcessor;

impl ClassicalProcessor for NoProcessor {
    fn process(&self, call: &ClassicalCall, _inputs: &BitVector) -> Result<BitVector, CircuitError> {
        Err(CircuitError::Processor(format!("no handler for call {:?}", call.name)))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    /// Quantum input wires, in the qubit order of the input state.
    pub inputs: Vec<String>,
    pub layers: Vec<Vec<Gate>>,
    #[serde(default)]
    pub classical: Vec<ClassicalCall>,
}

impl Circuit {
    pub fn new(inputs: Vec<String>) -> Self {
        Self { inputs, layers: Vec::new(), classical: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn push_layer(&mut self, gates: Vec<Gate>) {
        self.layers.push(gates);
    }

    /// Schedules a classical call after the layers pushed so far.
    pub fn push_call(&mut self, name: &str, params: Vec<usize>, inputs: Vec<String>, outputs: Vec<String>) {
        self.classical.push(ClassicalCall { after_layer: self.layers.len(), name: name.into(), params, inputs, outputs });
    }

    /// Total number of gate locations.
    pub fn size(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// `(layer, gate)` address of a flat location index.
    pub fn location(&self, flat: usize) -> Option<(usize, usize)> {
        let mut rest = flat;
        for (l, layer) in self.layers.iter().enumerate() {
            if rest < layer.len() {
                return Some((l, rest));
            }
            rest -= layer.len();
        }
        None
    }

    /// Quantum wires live after the last layer.
    pub fn live_outputs(&self) -> BTreeSet<String> {
        let mut live: BTreeSet<String> = self.inputs.iter().cloned().collect();
        for layer in &self.layers {
            for g in layer {
                for i in quantum_inputs(g) {
                    live.remove(i);
                }
            }
            for g in layer {
                if g.gate != GateKind::Measure {
                    live.extend(g.outputs.iter().cloned());
                }
            }
        }
        live
    }

    /// Appends idle layers on every live wire until the depth reaches `depth`.
    pub fn pad_to_depth(&mut self, depth: usize) {
        if self.depth() >= depth {
            return;
        }
        let live: Vec<String> = self.live_outputs().into_iter().collect();
        while self.depth() < depth {
            self.layers.push(live.iter().map(|q| Gate::idle(q)).collect());
        }
    }

    /// Runs `other` after `self`. Inputs of `other` not produced by `self` become inputs.
    pub fn then(mut self, other: Circuit) -> Circuit {
        let produced = self.live_outputs();
        let offset = self.layers.len();
        for i in other.inputs {
            if !produced.contains(&i) && !self.inputs.contains(&i) {
                self.inputs.push(i);
            }
        }
        self.layers.extend(other.layers);
        for mut call in other.classical {
            call.after_layer += offset;
            self.classical.push(call);
        }
        self
    }

    /// Runs the parts side by side on disjoint wires, padding shorter parts with idles.
    pub fn parallel(parts: Vec<Circuit>) -> Circuit {
        let depth = parts.iter().map(Circuit::depth).max().unwrap_or(0);
        let mut out = Circuit::new(Vec::new());
        out.layers = vec![Vec::new(); depth];
        for mut p in parts {
            p.pad_to_depth(depth);
            out.inputs.extend(p.inputs);
            for (l, layer) in p.layers.into_iter().enumerate() {
                out.layers[l].extend(layer);
            }
            out.classical.extend(p.classical);
        }
        out.classical.sort_by_key(|c| c.after_layer);
        out
    }

    /// Validates and lowers the circuit to slot-indexed operations.
    pub fn compile(&self) -> Result<CompiledCircuit, CircuitError> {
        compile(self)
    }
}

fn quantum_inputs(g: &Gate) -> &[String] {
    match g.gate {
        GateKind::IfX | GateKind::IfY | GateKind::IfZ => &g.inputs[1..],
        _ => &g.inputs,
    }
}

/// A gate lowered to simulator slots. Every op is one fault location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Idle(usize),
    Init(usize),
    Measure { q: usize, c: usize },
    H(usize),
    Cnot { c: usize, t: usize },
    Pauli(usize, Pauli),
    IfPauli { c: usize, q: usize, p: Pauli },
    Discard(usize),
}

impl Op {
    /// Number of qubits a fault at this location acts on (0 for discard, measurement flips the outcome).
    pub fn fault_arity(&self) -> usize {
        match self {
            Op::Cnot { .. } => 2,
            Op::Discard(_) => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledCall {
    pub call: ClassicalCall,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

/// Slot-indexed circuit ready for simulation.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    pub num_qslots: usize,
    pub num_cslots: usize,
    pub layers: Vec<Vec<Op>>,
    /// Calls sorted by `after_layer`.
    pub calls: Vec<CompiledCall>,
    /// Slot of each circuit input, in input order.
    pub input_slots: Vec<usize>,
    /// Live quantum wire → slot after the last layer.
    pub output_slots: HashMap<String, usize>,
    /// Classical wire → slot.
    pub cslots: HashMap<String, usize>,
    /// Flat location index of the first op in each layer.
    pub layer_offsets: Vec<usize>,
}

impl CompiledCircuit {
    pub fn size(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn output_slot(&self, label: &str) -> Option<usize> {
        self.output_slots.get(label).copied()
    }

    pub fn cslot(&self, label: &str) -> Option<usize> {
        self.cslots.get(label).copied()
    }

    /// Slots of the given output labels; panics on an unknown label.
    pub fn output_slots_of(&self, labels: &[String]) -> Vec<usize> {
        labels
            .iter()
            .map(|l| self.output_slot(l).unwrap_or_else(|| panic!("{l:?} is not a live output")))
            .collect()
    }
}

fn compile(c: &Circuit) -> Result<CompiledCircuit, CircuitError> {
    let mut slot_of: HashMap<String, usize> = HashMap::new();
    let mut free: BTreeSet<usize> = BTreeSet::new();
    let mut num_qslots = 0usize;
    for (i, q) in c.inputs.iter().enumerate() {
        if slot_of.insert(q.clone(), i).is_some() {
            return Err(CircuitError::AlreadyLive { layer: 0, label: q.clone() });
        }
        num_qslots += 1;
    }
    let input_slots: Vec<usize> = (0..c.inputs.len()).collect();
    let mut cslots: HashMap<String, usize> = HashMap::new();

    let mut calls: Vec<&ClassicalCall> = c.classical.iter().collect();
    calls.sort_by_key(|k| k.after_layer);
    for k in &calls {
        if k.after_layer > c.layers.len() {
            return Err(CircuitError::CallPosition { call: k.name.clone(), after: k.after_layer, depth: c.layers.len() });
        }
    }
    let mut compiled_calls = Vec::new();
    let mut next_call = 0;
    let mut layers = Vec::with_capacity(c.layers.len());
    let mut layer_offsets = Vec::with_capacity(c.layers.len());
    let mut flat = 0usize;

    let run_calls = |upto: usize,
                         next_call: &mut usize,
                         cslots: &mut HashMap<String, usize>,
                         compiled_calls: &mut Vec<CompiledCall>|
     -> Result<(), CircuitError> {
        while *next_call < calls.len() && calls[*next_call].after_layer == upto {
            let k = calls[*next_call];
            let inputs = k
                .inputs
                .iter()
                .map(|l| cslots.get(l).copied().ok_or_else(|| CircuitError::UnknownClassical(l.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            let mut outputs = Vec::new();
            for l in &k.outputs {
                if cslots.contains_key(l) {
                    return Err(CircuitError::ClassicalRedefined(l.clone()));
                }
                let s = cslots.len();
                cslots.insert(l.clone(), s);
                outputs.push(s);
            }
            compiled_calls.push(CompiledCall { call: k.clone(), inputs, outputs });
            *next_call += 1;
        }
        Ok(())
    };

    run_calls(0, &mut next_call, &mut cslots, &mut compiled_calls)?;
    for (li, layer) in c.layers.iter().enumerate() {
        layer_offsets.push(flat);
        let mut seen: HashSet<&str> = HashSet::new();
        for g in layer {
            for i in &g.inputs {
                if !seen.insert(i.as_str()) {
                    return Err(CircuitError::Overlap { layer: li, label: i.clone() });
                }
            }
        }
        let mut ops = Vec::with_capacity(layer.len());
        let mut freed = Vec::new();
        let mut renames: Vec<(String, usize)> = Vec::new();
        let mut inits: Vec<(usize, String)> = Vec::new();
        for (gi, g) in layer.iter().enumerate() {
            let arity = |nin: usize, nout: usize| -> Result<(), CircuitError> {
                if g.inputs.len() != nin || g.outputs.len() != nout {
                    return Err(CircuitError::Arity {
                        layer: li,
                        gate: gi,
                        what: format!("{:?} takes {nin} inputs and {nout} outputs", g.gate),
                    });
                }
                Ok(())
            };
            let take = |label: &str, slot_of: &mut HashMap<String, usize>| {
                slot_of.remove(label).ok_or_else(|| CircuitError::NotLive { layer: li, label: label.to_string() })
            };
            let cread = |label: &str| cslots.get(label).copied().ok_or_else(|| CircuitError::UnknownClassical(label.to_string()));
            match g.gate {
                GateKind::Idle | GateKind::H | GateKind::X | GateKind::Y | GateKind::Z => {
                    arity(1, 1)?;
                    let q = take(&g.inputs[0], &mut slot_of)?;
                    ops.push(match g.gate {
                        GateKind::Idle => Op::Idle(q),
                        GateKind::H => Op::H(q),
                        GateKind::X => Op::Pauli(q, Pauli::X),
                        GateKind::Y => Op::Pauli(q, Pauli::Y),
                        _ => Op::Pauli(q, Pauli::Z),
                    });
                    renames.push((g.outputs[0].clone(), q));
                }
                GateKind::Cnot => {
                    arity(2, 2)?;
                    let a = take(&g.inputs[0], &mut slot_of)?;
                    let b = take(&g.inputs[1], &mut slot_of)?;
                    ops.push(Op::Cnot { c: a, t: b });
                    renames.push((g.outputs[0].clone(), a));
                    renames.push((g.outputs[1].clone(), b));
                }
                GateKind::Init => {
                    arity(0, 1)?;
                    // Slot assigned once all of this layer's inputs are released.
                    ops.push(Op::Init(usize::MAX));
                    inits.push((ops.len() - 1, g.outputs[0].clone()));
                }
                GateKind::Measure => {
                    arity(1, 1)?;
                    let q = take(&g.inputs[0], &mut slot_of)?;
                    let label = &g.outputs[0];
                    if cslots.contains_key(label) {
                        return Err(CircuitError::ClassicalRedefined(label.clone()));
                    }
                    let cs = cslots.len();
                    cslots.insert(label.clone(), cs);
                    ops.push(Op::Measure { q, c: cs });
                    freed.push(q);
                }
                GateKind::IfX | GateKind::IfY | GateKind::IfZ => {
                    arity(2, 1)?;
                    let cb = cread(&g.inputs[0])?;
                    let q = take(&g.inputs[1], &mut slot_of)?;
                    let p = match g.gate {
                        GateKind::IfX => Pauli::X,
                        GateKind::IfY => Pauli::Y,
                        _ => Pauli::Z,
                    };
                    ops.push(Op::IfPauli { c: cb, q, p });
                    renames.push((g.outputs[0].clone(), q));
                }
                GateKind::Discard => {
                    arity(1, 0)?;
                    let q = take(&g.inputs[0], &mut slot_of)?;
                    // Discarded slots are never reused: they may still be entangled.
                    ops.push(Op::Discard(q));
                }
            }
        }
        for (label, q) in renames {
            if slot_of.insert(label.clone(), q).is_some() {
                return Err(CircuitError::AlreadyLive { layer: li, label });
            }
        }
        for (pos, label) in inits {
            let q = match free.pop_first() {
                Some(q) => q,
                None => {
                    num_qslots += 1;
                    num_qslots - 1
                }
            };
            if slot_of.insert(label.clone(), q).is_some() {
                return Err(CircuitError::AlreadyLive { layer: li, label });
            }
            ops[pos] = Op::Init(q);
        }
        free.extend(freed);
        flat += ops.len();
        layers.push(ops);
        run_calls(li + 1, &mut next_call, &mut cslots, &mut compiled_calls)?;
    }
    Ok(CompiledCircuit {
        num_qslots,
        num_cslots: cslots.len(),
        layers,
        calls: compiled_calls,
        input_slots,
        output_slots: slot_of,
        cslots,
        layer_offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut c = Circuit::new(vec!["q0".into(), "q1".into()]);
        c.push_layer(vec![Gate::h("q0"), Gate::idle("q1")]);
        c.push_layer(vec![Gate::cnot("q0", "q1")]);
        c.push_layer(vec![Gate::measure("q0", "m0"), Gate::measure("q1", "m1")]);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"gate\":\"cnot\""));
        assert!(text.contains("\"in\":[\"q0\",\"q1\"]"));
        let back: Circuit = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn overlap_rejected() {
        let mut c = Circuit::new(vec!["a".into(), "b".into()]);
        c.push_layer(vec![Gate::h("a"), Gate::cnot("a", "b")]);
        assert!(matches!(c.compile(), Err(CircuitError::Overlap { .. })));
    }

    #[test]
    fn arity_and_liveness_rejected() {
        let mut c = Circuit::new(vec!["a".into()]);
        c.push_layer(vec![Gate { gate: GateKind::Cnot, inputs: vec!["a".into()], outputs: vec!["a".into()] }]);
        assert!(matches!(c.compile(), Err(CircuitError::Arity { .. })));

        let mut c = Circuit::new(vec!["a".into()]);
        c.push_layer(vec![Gate::measure("a", "m")]);
        c.push_layer(vec![Gate::h("a")]);
        assert!(matches!(c.compile(), Err(CircuitError::NotLive { .. })));
    }

    #[test]
    fn slots_are_reused_after_measurement() {
        let mut c = Circuit::new(vec!["a".into()]);
        c.push_layer(vec![Gate::measure("a", "m")]);
        c.push_layer(vec![Gate::init("b")]);
        let k = c.compile().unwrap();
        assert_eq!(k.num_qslots, 1);
        assert_eq!(k.output_slot("b"), Some(0));
    }

    #[test]
    fn parallel_pads_with_idles() {
        let mut a = Circuit::new(vec!["a".into()]);
        a.push_layer(vec![Gate::h("a")]);
        a.push_layer(vec![Gate::h("a")]);
        let mut b = Circuit::new(vec!["b".into()]);
        b.push_layer(vec![Gate::h("b")]);
        let p = Circuit::parallel(vec![a, b]);
        assert_eq!(p.depth(), 2);
        assert_eq!(p.layers[1].len(), 2);
        assert_eq!(p.layers[1][1], Gate::idle("b"));
        assert_eq!(p.location(3), Some((1, 1)));
    }
}
