//! Exact tableau backend.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::tableau::Tableau;
use super::{CircuitError, ClassicalProcessor, CompiledCircuit, Op};
use crate::gf2::BitVector;
use crate::noise::{self, FaultEffect, FaultPattern, NoiseParams};
use crate::pauli::Pauli;

/// Source of outcomes for random measurements.
pub enum Coins<'a> {
    /// Fresh fair coins.
    Random(Box<ChaCha8Rng>),
    /// Use the given bit per classical slot.
    Forced(&'a [bool]),
}

impl Coins<'_> {
    fn draw(&mut self, cslot: usize) -> bool {
        match self {
            Coins::Random(rng) => rng.gen(),
            Coins::Forced(bits) => bits[cslot],
        }
    }
}

/// Final state and classical record of a tableau run.
#[derive(Debug, Clone)]
pub struct TableauRun {
    pub tableau: Tableau,
    /// Value of each classical slot.
    pub classical: Vec<bool>,
    /// Whether each measurement outcome was random (false for call outputs).
    pub random: Vec<bool>,
}

/// Faults to apply during a tableau run: location-sorted list of effects.
pub type FaultList<'a> = &'a [(usize, FaultEffect)];

/// Runs the compiled circuit on `input` (over the circuit inputs) with optional faults.
pub fn run_tableau(
    c: &CompiledCircuit,
    input: &Tableau,
    faults: FaultList<'_>,
    proc: &dyn ClassicalProcessor,
    mut coins: Coins<'_>,
) -> Result<TableauRun, CircuitError> {
    if input.num_qubits() != c.input_slots.len() {
        return Err(CircuitError::InputSize { expected: c.input_slots.len(), got: input.num_qubits() });
    }
    let extra = c.num_qslots - c.input_slots.len();
    let mut t = Tableau::tensor(input, &Tableau::new(extra));
    let mut classical = vec![false; c.num_cslots];
    let mut random = vec![false; c.num_cslots];
    let mut next_fault = 0;
    let mut next_call = 0;
    let run_calls = |upto: usize, classical: &mut Vec<bool>, next_call: &mut usize| -> Result<(), CircuitError> {
        while *next_call < c.calls.len() && c.calls[*next_call].call.after_layer == upto {
            let k = &c.calls[*next_call];
            let inp = BitVector::from_bools(&k.inputs.iter().map(|&s| classical[s]).collect::<Vec<_>>());
            let out = proc.process(&k.call, &inp)?;
            if out.len() != k.outputs.len() {
                return Err(CircuitError::Processor(format!(
                    "call {:?} returned {} bits, expected {}",
                    k.call.name,
                    out.len(),
                    k.outputs.len()
                )));
            }
            for (i, &s) in k.outputs.iter().enumerate() {
                classical[s] = out.get(i);
            }
            *next_call += 1;
        }
        Ok(())
    };
    run_calls(0, &mut classical, &mut next_call)?;
    for (li, layer) in c.layers.iter().enumerate() {
        let base = c.layer_offsets[li];
        for (gi, op) in layer.iter().enumerate() {
            let loc = base + gi;
            match *op {
                Op::Idle(_) => {}
                // Slots are reused only after measurement, so the reset is deterministic.
                Op::Init(q) => t.reset(q, false),
                Op::Measure { q, c: cs } => {
                    let coin = coins.draw(cs);
                    let m = t.measure_z(q, coin);
                    classical[cs] = m.value;
                    random[cs] = m.random;
                }
                Op::H(q) => t.h(q),
                Op::Cnot { c: a, t: b } => t.cnot(a, b),
                Op::Pauli(q, p) => t.apply_pauli1(q, p),
                Op::IfPauli { c: cs, q, p } => {
                    if classical[cs] {
                        t.apply_pauli1(q, p);
                    }
                }
                Op::Discard(_) => {}
            }
            while next_fault < faults.len() && faults[next_fault].0 == loc {
                apply_fault(&mut t, &mut classical, op, faults[next_fault].1);
                next_fault += 1;
            }
        }
        run_calls(li + 1, &mut classical, &mut next_call)?;
    }
    Ok(TableauRun { tableau: t, classical, random })
}

fn apply_fault(t: &mut Tableau, classical: &mut [bool], op: &Op, effect: FaultEffect) {
    match (effect, *op) {
        (FaultEffect::None, _) => {}
        (FaultEffect::FlipOutcome, Op::Measure { c, .. }) => classical[c] ^= true,
        (FaultEffect::One(p), Op::Idle(q) | Op::Init(q) | Op::H(q) | Op::Pauli(q, _) | Op::IfPauli { q, .. }) => {
            t.apply_pauli1(q, p)
        }
        (FaultEffect::Two(pa, pb), Op::Cnot { c, t: tq }) => {
            if pa != Pauli::I {
                t.apply_pauli1(c, pa);
            }
            if pb != Pauli::I {
                t.apply_pauli1(tq, pb);
            }
        }
        (e, o) => debug_assert!(false, "fault {e:?} does not fit op {o:?}"),
    }
}

/// Draws the twirled effects for a fault pattern on a compiled circuit.
pub fn fault_effects(c: &CompiledCircuit, fp: &FaultPattern, params: &NoiseParams) -> Vec<(usize, FaultEffect)> {
    let ops: Vec<&Op> = c.layers.iter().flatten().collect();
    fp.locations
        .iter()
        .map(|&loc| {
            let op = ops[loc];
            let meas = matches!(op, Op::Measure { .. });
            (loc, noise::fault_effect(params.seed, fp.trial, loc, op.fault_arity(), meas))
        })
        .collect()
}

/// Ideal run with fair coins from `seed`.
pub fn run_ideal(
    c: &CompiledCircuit,
    input: &Tableau,
    proc: &dyn ClassicalProcessor,
    seed: u64,
) -> Result<TableauRun, CircuitError> {
    let coins = Coins::Random(Box::new(noise::stream(seed, noise::domain::MEASUREMENT_COINS, 0)));
    run_tableau(c, input, &[], proc, coins)
}

/// Noisy run: faults at the pattern's locations, twirled per the noise conventions.
pub fn run_noisy(
    c: &CompiledCircuit,
    input: &Tableau,
    fp: &FaultPattern,
    params: &NoiseParams,
    proc: &dyn ClassicalProcessor,
    seed: u64,
) -> Result<TableauRun, CircuitError> {
    let effects = fault_effects(c, fp, params);
    let coins = Coins::Random(Box::new(noise::stream(seed, noise::domain::MEASUREMENT_COINS, 0)));
    run_tableau(c, input, &effects, proc, coins)
}

#[cfg(test)]
mod tests {
    use super::super::{Circuit, Gate, NoProcessor};
    use super::*;
    use crate::css::CssCode;
    use crate::pauli::PauliOp;

    #[test]
    fn h_then_measure_is_random() {
        let mut c = Circuit::new(vec!["q".into()]);
        c.push_layer(vec![Gate::h("q")]);
        c.push_layer(vec![Gate::measure("q", "m")]);
        let k = c.compile().unwrap();
        let mut ones = 0;
        for seed in 0..200 {
            let r = run_ideal(&k, &Tableau::new(1), &NoProcessor, seed).unwrap();
            assert!(r.random[0]);
            ones += r.classical[0] as usize;
        }
        assert!((60..140).contains(&ones), "{ones}");
    }

    #[test]
    fn bell_parity_is_deterministic() {
        let mut c = Circuit::new(vec!["a".into(), "b".into()]);
        c.push_layer(vec![Gate::h("a"), Gate::idle("b")]);
        c.push_layer(vec![Gate::cnot("a", "b")]);
        c.push_layer(vec![Gate::init("p")]);
        c.push_layer(vec![Gate::cnot("a", "p")]);
        c.push_layer(vec![Gate::cnot("b", "p")]);
        c.push_layer(vec![Gate::measure("p", "m")]);
        let k = c.compile().unwrap();
        for seed in 0..20 {
            let r = run_ideal(&k, &Tableau::new(2), &NoProcessor, seed).unwrap();
            assert!(!r.classical[0]);
            assert!(!r.random[0]);
        }
    }

    #[test]
    fn encoded_422_has_zero_syndrome() {
        let code = CssCode::four_two_two();
        for u in 0..4u64 {
            let input = code.encode_state(&BitVector::from_u64(2, u)).unwrap();
            let labels: Vec<String> = (0..4).map(|i| format!("d{i}")).collect();
            let mut c = Circuit::new(labels.clone());
            c.push_layer(vec![Gate::init("ax"), Gate::init("az")]);
            c.push_layer(vec![Gate::h("ax")]);
            for l in &labels {
                c.push_layer(vec![Gate::cnot("ax", l)]);
                c.push_layer(vec![Gate::cnot(l, "az")]);
            }
            c.push_layer(vec![Gate::h("ax")]);
            c.push_layer(vec![Gate::measure("ax", "sx"), Gate::measure("az", "sz")]);
            let k = c.compile().unwrap();
            let r = run_ideal(&k, &input, &NoProcessor, u).unwrap();
            assert_eq!(r.classical, vec![false, false]);
        }
    }

    #[test]
    fn x_fault_flips_measurement() {
        let mut c = Circuit::new(vec!["q".into()]);
        c.push_layer(vec![Gate::idle("q")]);
        c.push_layer(vec![Gate::measure("q", "m")]);
        let k = c.compile().unwrap();
        let r = run_tableau(&k, &Tableau::new(1), &[(0, FaultEffect::One(Pauli::X))], &NoProcessor, Coins::Forced(&[false]))
            .unwrap();
        assert!(r.classical[0]);
        let r = run_tableau(&k, &Tableau::new(1), &[(1, FaultEffect::FlipOutcome)], &NoProcessor, Coins::Forced(&[false]))
            .unwrap();
        assert!(r.classical[0]);
        let r = run_tableau(&k, &Tableau::new(1), &[], &NoProcessor, Coins::Forced(&[false])).unwrap();
        assert!(!r.classical[0]);
        assert_eq!(r.tableau.expectation(&PauliOp::z_on(1, &[0])), Some(false));
    }
}
