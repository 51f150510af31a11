//! The partial decoding interface Γ_{r,r'}: teleport one level-`r` block into
//! `m_r / m_{r'}` level-`r'` blocks through an encoded Bell resource.
//!
//! Stages, in order: error correction on Q while the resource on A and B is
//! produced by an oracle; transversal CNOT Q→A, H on Q and Z measurement of
//! Q and A; the Bell processing call, during which each B block is corrected
//! (or idles at level 1); and the conditional logical Pauli on B.

use serde::{Deserialize, Serialize};

use super::ec::{build_ec, labels, with_idles, EcLayout};
use super::InterfaceError;
use crate::circuit::{Circuit, Gate, Tableau};
use crate::css::{CodeFamily, CssCode};
use crate::gf2::BitVector;
use crate::pauli::{Pauli, PauliOp, SignedPauli};

/// Name of the Bell processing call; `params = [r, r']`.
pub const BELL_CALL: &str = "bell";

/// Default decoder latency in layers for a block of `n` qubits.
pub fn default_proc_layers(n: usize) -> usize {
    1 + n / 16
}

/// Noise model of the resource-state oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceOracle {
    /// Local stochastic parameter on A and B; `None` means `2 · ls_scale · δ`.
    #[serde(default)]
    pub ls_delta: Option<f64>,
    #[serde(default = "one")]
    pub ls_scale: f64,
    /// Probability that the preparation fails outright, leaving a uniformly random Pauli on A and B.
    #[serde(default)]
    pub fail_prob: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ResourceOracle {
    fn default() -> Self {
        Self { ls_delta: None, ls_scale: 1.0, fail_prob: 0.0 }
    }
}

impl ResourceOracle {
    pub fn ls_delta_at(&self, delta: f64) -> f64 {
        self.ls_delta.unwrap_or(2.0 * self.ls_scale * delta).clamp(0.0, 1.0)
    }
}

/// Construction knobs for Γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaKnobs {
    /// EC rounds on Q before the Bell measurement.
    #[serde(default = "one_round")]
    pub s1: usize,
    /// EC rounds on each B block during processing; `None` is 1 above level 1, else 0.
    #[serde(default)]
    pub s2: Option<usize>,
    /// Decoder latency per level (index `r − 1`); missing entries use [`default_proc_layers`].
    #[serde(default)]
    pub proc_layers: Vec<usize>,
    #[serde(default)]
    pub resource: ResourceOracle,
}

fn one_round() -> usize {
    1
}

impl Default for GammaKnobs {
    fn default() -> Self {
        Self { s1: 1, s2: None, proc_layers: Vec::new(), resource: ResourceOracle::default() }
    }
}

impl GammaKnobs {
    pub fn proc_layers_for(&self, family: &CodeFamily, r: usize) -> usize {
        self.proc_layers.get(r - 1).copied().unwrap_or_else(|| default_proc_layers(family.level(r).n()))
    }

    pub fn s2_for(&self, r_prime: usize) -> usize {
        self.s2.unwrap_or(usize::from(r_prime > 1))
    }
}

/// Layer counts of the stages of Γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDepths {
    pub ec: usize,
    pub bell: usize,
    pub processing: usize,
    pub correction: usize,
}

impl StageDepths {
    pub fn total(&self) -> usize {
        self.ec + self.bell + self.processing + self.correction
    }
}

/// A built Γ_{r,r'} with its wire map.
#[derive(Debug, Clone)]
pub struct InterfaceCircuit {
    pub r: usize,
    pub r_prime: usize,
    pub circuit: Circuit,
    pub q: Vec<String>,
    pub a: Vec<String>,
    /// Output blocks `B_1, …`, each `n_{r'}` wires; block `i` carries logicals `i m' … (i+1) m' − 1`.
    pub b: Vec<Vec<String>>,
    pub heralds: Vec<String>,
    pub stages: StageDepths,
}

impl InterfaceCircuit {
    /// Wires of A followed by the B blocks, in resource-state qubit order.
    pub fn resource_wires(&self) -> Vec<String> {
        self.a.iter().chain(self.b.iter().flatten()).cloned().collect()
    }

    pub fn output_wires(&self) -> Vec<String> {
        self.b.iter().flatten().cloned().collect()
    }
}

/// Number of output blocks of Γ_{r,r'}.
pub fn output_blocks(family: &CodeFamily, r: usize, r_prime: usize) -> Result<usize, InterfaceError> {
    check_levels(family, r, r_prime)?;
    let (m, mp) = (family.m(r), family.m(r_prime));
    if mp == 0 || m % mp != 0 {
        return Err(InterfaceError::Blocks { r, r_prime, m, m_prime: mp });
    }
    Ok(m / mp)
}

fn check_levels(family: &CodeFamily, r: usize, r_prime: usize) -> Result<(), InterfaceError> {
    if !(r_prime >= 1 && r > r_prime && r <= family.depth()) {
        return Err(InterfaceError::Levels { r, r_prime, depth: family.depth() });
    }
    Ok(())
}

/// Builds Γ_{r,r'} with fresh wires named under `prefix` and Q wires `q`.
pub fn build_gamma_on(
    family: &CodeFamily,
    r: usize,
    r_prime: usize,
    knobs: &GammaKnobs,
    prefix: &str,
    q: Vec<String>,
) -> Result<InterfaceCircuit, InterfaceError> {
    let blocks = output_blocks(family, r, r_prime)?;
    let code = family.level(r);
    let code_p = family.level(r_prime);
    let n = code.n();
    if q.len() != n {
        return Err(InterfaceError::InputLength { what: "Q wires", expected: n, got: q.len() });
    }
    let a = labels(&format!("{prefix}a"), n);
    let b: Vec<Vec<String>> = (0..blocks).map(|i| labels(&format!("{prefix}b{i}."), code_p.n())).collect();
    let b_flat: Vec<String> = b.iter().flatten().cloned().collect();
    let mut heralds = Vec::new();
    let mut inputs = q.clone();
    inputs.extend(a.iter().cloned());
    inputs.extend(b_flat.iter().cloned());
    let mut circuit = Circuit::new(inputs);

    let proc_r = knobs.proc_layers_for(family, r);
    let ec_q = build_ec(code, knobs.s1, &EcLayout { level: r, prefix: &format!("{prefix}ecq."), data: &q, proc_layers: proc_r });
    heralds.extend(ec_q.heralds.iter().cloned());
    let ec_depth = ec_q.circuit.depth();
    circuit = circuit.then(ec_q.circuit);

    // Transversal logical Bell measurement of Q and A.
    let mut bell = Circuit::new(q.iter().chain(&a).chain(&b_flat).cloned().collect());
    bell.push_layer(with_idles(q.iter().zip(&a).map(|(x, y)| Gate::cnot(x, y)).collect(), &b_flat));
    bell.push_layer(with_idles(q.iter().map(|x| Gate::h(x)).chain(a.iter().map(|y| Gate::idle(y))).collect(), &b_flat));
    let m1 = labels(&format!("{prefix}m1."), n);
    let m2 = labels(&format!("{prefix}m2."), n);
    let meas = q.iter().zip(&m1).chain(a.iter().zip(&m2)).map(|(w, m)| Gate::measure(w, m)).collect();
    bell.push_layer(with_idles(meas, &b_flat));
    let herald = format!("{prefix}bell.h");
    let bx = labels(&format!("{prefix}bx."), b_flat.len());
    let bz = labels(&format!("{prefix}bz."), b_flat.len());
    let mut outs = vec![herald.clone()];
    outs.extend(bx.iter().cloned());
    outs.extend(bz.iter().cloned());
    bell.push_call(BELL_CALL, vec![r, r_prime], m1.iter().chain(&m2).cloned().collect(), outs);
    heralds.push(herald);
    circuit = circuit.then(bell);

    // B blocks wait for the Bell outcome, correcting themselves when encoded.
    let s2 = knobs.s2_for(r_prime);
    let proc_p = knobs.proc_layers_for(family, r_prime);
    let mut parts = Vec::new();
    for (i, blk) in b.iter().enumerate() {
        let g = build_ec(code_p, s2, &EcLayout { level: r_prime, prefix: &format!("{prefix}ecb{i}."), data: blk, proc_layers: proc_p });
        heralds.extend(g.heralds.iter().cloned());
        parts.push(g.circuit);
    }
    let mut processing = Circuit::parallel(parts);
    processing.pad_to_depth(proc_r.max(processing.depth()));
    let processing_depth = processing.depth();
    circuit = circuit.then(processing);

    let mut fix = Circuit::new(b_flat.clone());
    fix.push_layer(b_flat.iter().zip(&bx).map(|(w, c)| Gate::if_pauli(Pauli::X, c, w)).collect());
    fix.push_layer(b_flat.iter().zip(&bz).map(|(w, c)| Gate::if_pauli(Pauli::Z, c, w)).collect());
    circuit = circuit.then(fix);

    let stages = StageDepths { ec: ec_depth, bell: 3, processing: processing_depth, correction: 2 };
    debug_assert_eq!(stages.total(), circuit.depth());
    Ok(InterfaceCircuit { r, r_prime, circuit, q, a, b, heralds, stages })
}

/// Builds Γ_{r,r'} with wires `q0…`, `a0…`, `b{i}.{j}`.
pub fn build_gamma(family: &CodeFamily, r: usize, r_prime: usize, knobs: &GammaKnobs) -> Result<InterfaceCircuit, InterfaceError> {
    check_levels(family, r, r_prime)?;
    build_gamma_on(family, r, r_prime, knobs, "", labels("q", family.level(r).n()))
}

/// Splits a logical Pauli on `blocks · m'` qubits into its physical image on the B blocks.
pub fn blocks_logical_to_physical(code_p: &CssCode, blocks: usize, logical: &SignedPauli) -> Result<SignedPauli, InterfaceError> {
    let (mp, np) = (code_p.m(), code_p.n());
    let mut op = PauliOp::identity(blocks * np);
    let mut sign = logical.sign;
    for i in 0..blocks {
        let part = SignedPauli::plus(PauliOp::new(logical.op.x.slice(i * mp, (i + 1) * mp), logical.op.z.slice(i * mp, (i + 1) * mp)));
        let phys = code_p.logical_to_physical(&part)?;
        sign ^= phys.sign;
        for q in 0..np {
            op.set(i * np + q, phys.op.get(q));
        }
    }
    Ok(SignedPauli::new(op, sign))
}

/// Check generators of all B blocks, placed at `offset` in a register of `total` qubits.
fn block_checks(code_p: &CssCode, blocks: usize, offset: usize, total: usize) -> Vec<SignedPauli> {
    let np = code_p.n();
    let mut gens = Vec::new();
    for i in 0..blocks {
        for g in code_p.check_generators() {
            gens.push(SignedPauli::new(embed(&g.op, offset + i * np, total), g.sign));
        }
    }
    gens
}

fn embed(p: &PauliOp, offset: usize, total: usize) -> PauliOp {
    let mut out = PauliOp::identity(total);
    for q in p.support() {
        out.set(offset + q, p.get(q));
    }
    out
}

/// Generators of the resource state on A ∪ B: the checks of every block and,
/// for each logical `j`, `X̄^A_j X̄^B_j` and `Z̄^A_j Z̄^B_j`.
pub fn resource_generators(family: &CodeFamily, r: usize, r_prime: usize) -> Result<Vec<SignedPauli>, InterfaceError> {
    let blocks = output_blocks(family, r, r_prime)?;
    let (code, code_p) = (family.level(r), family.level(r_prime));
    let (n, m) = (code.n(), code.m());
    let total = n + blocks * code_p.n();
    let mut gens: Vec<SignedPauli> = code.check_generators().into_iter().map(|g| SignedPauli::new(embed(&g.op, 0, total), g.sign)).collect();
    gens.extend(block_checks(code_p, blocks, n, total));
    for j in 0..m {
        for kind in [Pauli::X, Pauli::Z] {
            let logical = match kind {
                Pauli::X => PauliOp::x_on(m, &[j]),
                _ => PauliOp::z_on(m, &[j]),
            };
            let pa = code.logical_to_physical(&SignedPauli::plus(logical.clone()))?;
            let pb = blocks_logical_to_physical(code_p, blocks, &SignedPauli::plus(logical))?;
            let mut op = embed(&pa.op, 0, total);
            op.compose_assign(&embed(&pb.op, n, total));
            gens.push(SignedPauli::new(op, pa.sign ^ pb.sign));
        }
    }
    Ok(gens)
}

/// Ideal resource tableau on A ∪ B.
pub fn resource_state(family: &CodeFamily, r: usize, r_prime: usize) -> Result<Tableau, InterfaceError> {
    let blocks = output_blocks(family, r, r_prime)?;
    let total = family.level(r).n() + blocks * family.level(r_prime).n();
    Ok(Tableau::from_generators(total, &resource_generators(family, r, r_prime)?)?)
}

/// Input tableau of Γ: `q_state` on Q tensored with the ideal resource.
pub fn gamma_input(family: &CodeFamily, r: usize, r_prime: usize, q_state: &Tableau) -> Result<Tableau, InterfaceError> {
    Ok(Tableau::tensor(q_state, &resource_state(family, r, r_prime)?))
}

/// Generators the B blocks must satisfy after teleporting the logical state `logical`.
pub fn expected_output_generators(family: &CodeFamily, r: usize, r_prime: usize, logical: &[SignedPauli]) -> Result<Vec<SignedPauli>, InterfaceError> {
    let blocks = output_blocks(family, r, r_prime)?;
    let code_p = family.level(r_prime);
    let total = blocks * code_p.n();
    let mut gens = block_checks(code_p, blocks, 0, total);
    for g in logical {
        gens.push(blocks_logical_to_physical(code_p, blocks, g)?);
    }
    Ok(gens)
}

/// Whether every generator, placed on `slots`, has a deterministic outcome equal to its sign.
pub fn satisfies(t: &Tableau, slots: &[usize], gens: &[SignedPauli]) -> bool {
    gens.iter().all(|g| {
        let mut full = PauliOp::identity(t.num_qubits());
        for q in g.op.support() {
            full.set(slots[q], g.op.get(q));
        }
        t.expectation(&full) == Some(g.sign)
    })
}

/// Logical Z-basis generators of `|u⟩` on `u.len()` qubits.
pub fn basis_generators(u: &BitVector) -> Vec<SignedPauli> {
    (0..u.len()).map(|j| SignedPauli::new(PauliOp::z_on(u.len(), &[j]), u.get(j))).collect()
}

/// Result of one noiseless Γ run on an encoded logical state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TeleportCheck {
    pub heralded: bool,
    /// B blocks carry exactly the input logical state.
    pub exact: bool,
}

impl TeleportCheck {
    pub fn passed(&self) -> bool {
        self.exact && !self.heralded
    }
}

/// Runs Γ_{r,r'} on the encoding of `logical` with an optional Pauli on Q,
/// without circuit noise, and compares the outputs against the logical state.
pub fn teleport_check(
    family: &CodeFamily,
    gamma: &InterfaceCircuit,
    compiled: &crate::circuit::CompiledCircuit,
    logical: &[SignedPauli],
    error: Option<&PauliOp>,
    seed: u64,
) -> Result<TeleportCheck, InterfaceError> {
    let (r, rp) = (gamma.r, gamma.r_prime);
    let mut q_state = family.level(r).encode_logical_state(logical)?;
    if let Some(e) = error {
        q_state.apply_pauli(e);
    }
    let input = gamma_input(family, r, rp, &q_state)?;
    let run = crate::circuit::run_ideal(compiled, &input, &super::FamilyProcessor::new(family), seed)?;
    let heralded = gamma.heralds.iter().any(|h| compiled.cslot(h).is_some_and(|s| run.classical[s]));
    let slots = compiled.output_slots_of(&gamma.output_wires());
    let exact = satisfies(&run.tableau, &slots, &expected_output_generators(family, r, rp, logical)?);
    Ok(TeleportCheck { heralded, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_identity_check(family: &CodeFamily, r: usize, rp: usize, logical: &[SignedPauli], error: Option<&PauliOp>, seed: u64) -> bool {
        let g = build_gamma(family, r, rp, &GammaKnobs::default()).unwrap();
        let k = g.circuit.compile().unwrap();
        teleport_check(family, &g, &k, logical, error, seed).unwrap().passed()
    }

    #[test]
    fn sizes_for_four_two_two() {
        let fam = CodeFamily::toy();
        let g = build_gamma(&fam, 2, 1, &GammaKnobs::default()).unwrap();
        assert_eq!(g.q.len(), 4);
        assert_eq!(g.a.len(), 4);
        assert_eq!(g.b.len(), 2);
        assert!(g.b.iter().all(|b| b.len() == 1));
        assert_eq!(g.circuit.depth(), g.stages.total());
        let outs = g.circuit.live_outputs();
        assert_eq!(outs.len(), 2);
    }

    #[test]
    fn invalid_levels_rejected() {
        let fam = CodeFamily::toy();
        assert!(build_gamma(&fam, 1, 1, &GammaKnobs::default()).is_err());
        assert!(build_gamma(&fam, 5, 1, &GammaKnobs::default()).is_err());
        assert!(build_gamma(&fam, 2, 0, &GammaKnobs::default()).is_err());
    }

    #[test]
    fn resource_state_is_valid() {
        let fam = CodeFamily::toy();
        for (r, rp) in [(2, 1), (3, 2), (3, 1)] {
            let t = resource_state(&fam, r, rp).unwrap();
            let gens = resource_generators(&fam, r, rp).unwrap();
            let slots: Vec<usize> = (0..t.num_qubits()).collect();
            assert!(satisfies(&t, &slots, &gens));
        }
    }

    #[test]
    fn noiseless_basis_states_teleport() {
        let fam = CodeFamily::toy();
        for u in 0..4u64 {
            let logical = basis_generators(&BitVector::from_u64(2, u));
            for seed in 0..3 {
                assert!(run_identity_check(&fam, 2, 1, &logical, None, seed), "u = {u}, seed = {seed}");
            }
        }
    }

    #[test]
    fn noiseless_plus_states_teleport() {
        let fam = CodeFamily::toy();
        let logical = vec![SignedPauli::plus(PauliOp::x_on(2, &[0])), SignedPauli::new(PauliOp::x_on(2, &[1]), true)];
        for seed in 0..4 {
            assert!(run_identity_check(&fam, 2, 1, &logical, None, seed));
        }
    }

    #[test]
    fn steane_corrects_single_input_errors() {
        let fam = CodeFamily::steane_variant();
        let logical = basis_generators(&BitVector::from_u64(1, 1));
        for q in 0..7 {
            for p in Pauli::NONTRIVIAL {
                let e = PauliOp::single(7, q, p);
                assert!(run_identity_check(&fam, 2, 1, &logical, Some(&e), 5), "qubit {q} {p:?}");
            }
        }
    }

    #[test]
    fn toy_level_three_to_two() {
        let fam = CodeFamily::toy();
        let logical = basis_generators(&BitVector::from_u64(4, 0b1010));
        assert!(run_identity_check(&fam, 3, 2, &logical, None, 1));
    }
}
