//! Executable circuits for Ξ^{[h]}_r and the end-to-end runs on them.
//!
//! The top blocks start in encoded logical states. Every Γ instance takes its
//! resource state as an extra circuit input, produced by the oracle and
//! otherwise untouched until the Γ begins. Final bare qubits are listed in
//! logical order: qubit `i m_r + j` carries logical `j` of top block `i`.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_schedule, Constants, Footprints, InterfaceSchedule, ScheduleError};
use crate::circuit::{run_ideal, Circuit, CompiledCircuit, FrameSimulator, PauliFrame, Tableau};
use crate::css::CodeFamily;
use crate::gf2::BitVector;
use crate::interface::gamma::{basis_generators, satisfies};
use crate::interface::{build_ec, build_gamma_on, labels, resource_state, EcLayout, FamilyProcessor, GammaKnobs, InterfaceError};
use crate::noise::{self, domain, NoiseParams};
use crate::pauli::{Pauli, PauliOp, SignedPauli};

/// What occupies a group of circuit inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentKind {
    Top { block: usize },
    Resource { r: usize, r_prime: usize, gamma: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub wires: Vec<String>,
}

/// A schedule lowered to one circuit.
#[derive(Debug, Clone)]
pub struct ExecutablePlan {
    pub circuit: Circuit,
    /// Input groups in circuit input order.
    pub segments: Vec<Segment>,
    pub top_blocks: Vec<Vec<String>>,
    /// Final bare qubits in logical order.
    pub outputs: Vec<String>,
    pub heralds: Vec<String>,
    pub gammas: usize,
}

impl ExecutablePlan {
    /// Input tableau: the given top-block states and every ideal resource state.
    pub fn initial_state(&self, family: &CodeFamily, top: &[Tableau]) -> Result<Tableau, InterfaceError> {
        let mut cache: HashMap<(usize, usize), Tableau> = HashMap::new();
        let mut t = Tableau::new(0);
        for seg in &self.segments {
            match seg.kind {
                SegmentKind::Top { block } => t = Tableau::tensor(&t, &top[block]),
                SegmentKind::Resource { r, r_prime, .. } => {
                    let res = match cache.entry((r, r_prime)) {
                        Entry::Occupied(e) => e.into_mut(),
                        Entry::Vacant(e) => e.insert(resource_state(family, r, r_prime)?),
                    };
                    t = Tableau::tensor(&t, res);
                }
            }
        }
        Ok(t)
    }
}

/// Lowers the schedule, then applies Γ_{r',1} to every block when `r' > 1`.
pub fn build_plan(family: &CodeFamily, s: &InterfaceSchedule, knobs: &GammaKnobs) -> Result<ExecutablePlan, ScheduleError> {
    let fp = &s.footprints;
    let n_top = family.level(s.r).n();
    let top_blocks: Vec<Vec<String>> = (0..s.h).map(|i| labels(&format!("top{i}."), n_top)).collect();
    let mut segments: Vec<Segment> =
        top_blocks.iter().enumerate().map(|(block, w)| Segment { kind: SegmentKind::Top { block }, wires: w.clone() }).collect();
    let mut circuit = Circuit::new(top_blocks.iter().flatten().cloned().collect());
    let mut heralds = Vec::new();
    let mut blocks = top_blocks.clone();
    let mut gammas = 0;

    for st in &s.stages {
        let level = st.level;
        let mut children: Vec<Option<Vec<String>>> = vec![None; blocks.len() * st.fanout];
        let ec_rounds = |lvl: usize| match fp.ec_round_depth[lvl - 1] {
            0 => 0,
            d => st.macro_depth / d,
        };
        for (l, ml) in st.layers.iter().enumerate() {
            let mut parts = Vec::new();
            for &b in &ml.gamma {
                let g = build_gamma_on(family, level, level - 1, knobs, &format!("s{level}.g{b}."), blocks[b].clone())?;
                segments.push(Segment { kind: SegmentKind::Resource { r: level, r_prime: level - 1, gamma: gammas }, wires: g.resource_wires() });
                gammas += 1;
                heralds.extend(g.heralds.iter().cloned());
                for (t, bw) in g.b.iter().enumerate() {
                    children[b * st.fanout + t] = Some(bw.clone());
                }
                parts.push(g.circuit);
            }
            let mut add_ec = |lvl: usize, tag: &str, idx: usize, data: &[String], parts: &mut Vec<Circuit>| {
                let code = family.level(lvl);
                let rounds = if code.is_trivial() { st.macro_depth } else { ec_rounds(lvl) };
                let prefix = format!("s{level}.l{l}.{tag}{idx}.");
                let layout = EcLayout { level: lvl, prefix: &prefix, data, proc_layers: knobs.proc_layers_for(family, lvl) };
                let g = build_ec(code, rounds, &layout);
                heralds.extend(g.heralds.iter().cloned());
                parts.push(g.circuit);
            };
            for &b in &ml.ec_upper {
                add_ec(level, "u", b, &blocks[b], &mut parts);
            }
            for &c in &ml.ec_lower {
                let data = children[c].clone().expect("children of earlier blocks exist");
                add_ec(level - 1, "c", c, &data, &mut parts);
            }
            let mut layer = Circuit::parallel(parts);
            layer.pad_to_depth(st.macro_depth);
            circuit = circuit.then(layer);
        }
        blocks = children.into_iter().map(|c| c.expect("every block lowered once")).collect();
    }

    let outputs = if s.r_prime > 1 {
        let mut parts = Vec::new();
        let mut outs = Vec::new();
        for (b, wires) in blocks.iter().enumerate() {
            let g = build_gamma_on(family, s.r_prime, 1, knobs, &format!("f.g{b}."), wires.clone())?;
            segments.push(Segment { kind: SegmentKind::Resource { r: s.r_prime, r_prime: 1, gamma: gammas }, wires: g.resource_wires() });
            gammas += 1;
            heralds.extend(g.heralds.iter().cloned());
            outs.extend(g.output_wires());
            parts.push(g.circuit);
        }
        circuit = circuit.then(Circuit::parallel(parts));
        outs
    } else {
        blocks.into_iter().flatten().collect()
    };

    let ordered: Vec<String> = segments.iter().flat_map(|s| s.wires.iter().cloned()).collect();
    debug_assert_eq!(ordered.iter().collect::<BTreeSet<_>>(), circuit.inputs.iter().collect::<BTreeSet<_>>());
    circuit.inputs = ordered;
    Ok(ExecutablePlan { circuit, segments, top_blocks, outputs, heralds, gammas })
}

/// Configuration of the end-to-end experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2eConfig {
    pub r: usize,
    pub r_prime: usize,
    pub h: usize,
    pub noise: NoiseParams,
    /// Local stochastic noise on the prepared top blocks.
    #[serde(default)]
    pub input_delta: f64,
    pub trials: u64,
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default)]
    pub knobs: GammaKnobs,
}

fn one() -> f64 {
    1.0
}

/// Builds the schedule and plan for an e2e configuration.
pub fn plan_for(family: &CodeFamily, cfg: &E2eConfig) -> Result<(InterfaceSchedule, ExecutablePlan), ScheduleError> {
    let fp = Footprints::measure(family, &cfg.knobs)?;
    let consts = Constants::from_footprints(&fp, noise::decimal_rational(cfg.theta))?;
    let s = build_schedule(family, cfg.r, cfg.r_prime, cfg.h, &consts, &fp)?;
    let plan = build_plan(family, &s, &cfg.knobs)?;
    Ok((s, plan))
}

/// Monte Carlo statistics of output errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2eReport {
    pub trials: u64,
    pub outputs: usize,
    pub depth: usize,
    pub circuit_size: usize,
    pub gammas: usize,
    pub heralded: u64,
    /// Trials with at least one nontrivial output qubit.
    pub any_error: u64,
    /// `Pr(q ∈ errors)` per output qubit.
    pub qubit_error: Vec<f64>,
    pub single_max: f64,
    pub single_mean: f64,
    /// `Pr({q, q'} ⊆ errors)` over all pairs.
    pub pair_max: f64,
    pub pair_mean: f64,
    /// Smallest `κ₁` with `Pr(T ⊆ errors) ≤ (κ₁ δ)^{|T|}` for `|T| ≤ 2` on this run (`κ₂ = 1`).
    pub kappa1: Option<f64>,
}

struct E2eRunner<'a> {
    compiled: CompiledCircuit,
    proc: FamilyProcessor,
    reference: Vec<bool>,
    out_slots: Vec<usize>,
    top_slots: Vec<usize>,
    resource_slots: Vec<usize>,
    /// `(start, len)` of each Γ's resource within `resource_slots`.
    resource_groups: Vec<(usize, usize)>,
    herald_slots: Vec<usize>,
    cfg: &'a E2eConfig,
}

impl<'a> E2eRunner<'a> {
    fn new(family: &CodeFamily, plan: &ExecutablePlan, cfg: &'a E2eConfig) -> Result<Self, ScheduleError> {
        let compiled = plan.circuit.compile().map_err(InterfaceError::from)?;
        let proc = FamilyProcessor::new(family);
        let code = family.level(cfg.r);
        let zero = code.encode_state(&BitVector::zeros(code.m())).map_err(InterfaceError::from)?;
        let tops = vec![zero; cfg.h];
        let input = plan.initial_state(family, &tops)?;
        let reference = run_ideal(&compiled, &input, &proc, cfg.noise.seed).map_err(InterfaceError::from)?.classical;
        let mut top_slots = Vec::new();
        let mut resource_slots = Vec::new();
        let mut resource_groups = Vec::new();
        let mut at = 0;
        for seg in &plan.segments {
            let slots = &compiled.input_slots[at..at + seg.wires.len()];
            at += seg.wires.len();
            match seg.kind {
                SegmentKind::Top { .. } => top_slots.extend_from_slice(slots),
                SegmentKind::Resource { .. } => {
                    resource_groups.push((resource_slots.len(), slots.len()));
                    resource_slots.extend_from_slice(slots);
                }
            }
        }
        Ok(Self {
            out_slots: compiled.output_slots_of(&plan.outputs),
            herald_slots: plan.heralds.iter().map(|h| compiled.cslot(h).expect("herald wire")).collect(),
            compiled,
            proc,
            reference,
            top_slots,
            resource_slots,
            resource_groups,
            cfg,
        })
    }

    fn initial_frame(&self, trial: u64) -> PauliFrame {
        let c = &self.compiled;
        let p = &self.cfg.noise;
        let mut f = PauliFrame::identity(c.num_qslots, c.num_cslots);
        // Inputs draw from a seed offset by the input domain so they never share the resource stream.
        let input = noise::sample_ls_iid(self.top_slots.len(), self.cfg.input_delta, p.seed ^ (domain::INPUT << 56), trial);
        for &q in &input.support {
            f.apply(self.top_slots[q], input.pauli.get(q));
        }
        let oracle = &self.cfg.knobs.resource;
        let ls = noise::sample_ls_iid(self.resource_slots.len(), oracle.ls_delta_at(p.delta), p.seed, trial);
        for &q in &ls.support {
            f.apply(self.resource_slots[q], ls.pauli.get(q));
        }
        if oracle.fail_prob > 0.0 {
            for (g, &(start, len)) in self.resource_groups.iter().enumerate() {
                let mut rng = noise::keyed(p.seed, domain::RESOURCE, trial, g as u64);
                if rng.gen::<f64>() < oracle.fail_prob {
                    for &s in &self.resource_slots[start..start + len] {
                        f.apply(s, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]);
                    }
                }
            }
        }
        f
    }
}

#[derive(Clone)]
struct E2eTally {
    trials: u64,
    heralded: u64,
    any: u64,
    single: Vec<u64>,
    pairs: Vec<u64>,
}

impl E2eTally {
    fn new(k: usize) -> Self {
        Self { trials: 0, heralded: 0, any: 0, single: vec![0; k], pairs: vec![0; k * k.saturating_sub(1) / 2] }
    }

    fn merge(mut self, o: E2eTally) -> Self {
        self.trials += o.trials;
        self.heralded += o.heralded;
        self.any += o.any;
        for (a, b) in self.single.iter_mut().zip(o.single) {
            *a += b;
        }
        for (a, b) in self.pairs.iter_mut().zip(o.pairs) {
            *a += b;
        }
        self
    }
}

/// Runs the full Ξ plan under circuit noise and reports output error statistics.
pub fn run_e2e(family: &CodeFamily, cfg: &E2eConfig) -> Result<E2eReport, ScheduleError> {
    if cfg.trials == 0 {
        return Err(InterfaceError::NoTrials.into());
    }
    cfg.noise.check().map_err(InterfaceError::from)?;
    let (_, plan) = plan_for(family, cfg)?;
    let runner = E2eRunner::new(family, &plan, cfg)?;
    let sim = FrameSimulator::new(&runner.compiled, runner.reference.clone(), &runner.proc);
    let k = runner.out_slots.len();
    let tally = (0..cfg.trials)
        .into_par_iter()
        .try_fold(
            || E2eTally::new(k),
            |mut acc, t| {
                let init = runner.initial_frame(t);
                let f = sim.run_sampled(&cfg.noise, t, Some(&init)).map_err(InterfaceError::from)?;
                acc.trials += 1;
                acc.heralded += u64::from(runner.herald_slots.iter().any(|&s| runner.reference[s] ^ f.classical.get(s)));
                let errs: Vec<usize> = (0..k).filter(|&i| f.x.get(runner.out_slots[i]) || f.z.get(runner.out_slots[i])).collect();
                acc.any += u64::from(!errs.is_empty());
                for (ai, &a) in errs.iter().enumerate() {
                    acc.single[a] += 1;
                    for &b in &errs[ai + 1..] {
                        acc.pairs[pair_index(k, a, b)] += 1;
                    }
                }
                Ok::<_, ScheduleError>(acc)
            },
        )
        .try_reduce(|| E2eTally::new(k), |a, b| Ok(a.merge(b)))?;
    let n = tally.trials as f64;
    let qubit_error: Vec<f64> = tally.single.iter().map(|&c| c as f64 / n).collect();
    let pair: Vec<f64> = tally.pairs.iter().map(|&c| c as f64 / n).collect();
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let (single_max, pair_max) = (max(&qubit_error), max(&pair));
    let delta = cfg.noise.delta;
    let kappa1 = (delta > 0.0).then(|| (single_max / delta).max(pair_max.sqrt() / delta));
    Ok(E2eReport {
        trials: tally.trials,
        outputs: k,
        depth: runner.compiled.layers.len(),
        circuit_size: runner.compiled.size(),
        gammas: plan.gammas,
        heralded: tally.heralded,
        any_error: tally.any,
        single_mean: mean(&qubit_error),
        single_max,
        pair_mean: mean(&pair),
        pair_max,
        qubit_error,
        kappa1,
    })
}

fn pair_index(k: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < k);
    a * (2 * k - a - 1) / 2 + (b - a - 1)
}

/// Outcome of exhaustive single-qubit input injections at zero circuit noise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionReport {
    /// Distinct `(qubit, Pauli)` injections, each applied to every top block at once.
    pub injections: usize,
    /// Tableau runs (two logical bases per injection).
    pub runs: usize,
    /// Runs whose outputs differ from the input logical state.
    pub logical_failures: usize,
    pub heralded: usize,
}

/// Injects every single-qubit X, Y, Z at the same position of every top
/// block and checks the outputs carry the input logical states exactly.
pub fn run_injections(family: &CodeFamily, cfg: &E2eConfig) -> Result<InjectionReport, ScheduleError> {
    let (_, plan) = plan_for(family, cfg)?;
    let compiled = plan.circuit.compile().map_err(InterfaceError::from)?;
    let proc = FamilyProcessor::new(family);
    let code = family.level(cfg.r);
    let (n, m) = (code.n(), code.m());
    let out_slots = compiled.output_slots_of(&plan.outputs);
    let cases: Vec<(usize, Pauli, bool)> =
        (0..n).flat_map(|q| Pauli::NONTRIVIAL.into_iter().flat_map(move |p| [(q, p, false), (q, p, true)])).collect();
    let results = cases
        .par_iter()
        .enumerate()
        .map(|(idx, &(q, p, x_basis))| -> Result<(bool, bool), ScheduleError> {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.noise.seed ^ idx as u64);
            let mut expected: Vec<SignedPauli> = Vec::new();
            let mut tops = Vec::new();
            for b in 0..cfg.h {
                let u = BitVector::from_bools(&(0..m).map(|_| rng.gen::<bool>()).collect::<Vec<_>>());
                let gens: Vec<SignedPauli> = basis_generators(&u)
                    .into_iter()
                    .map(|g| if x_basis { SignedPauli::new(PauliOp::new(g.op.z.clone(), g.op.x.clone()), g.sign) } else { g })
                    .collect();
                let mut t = code.encode_logical_state(&gens).map_err(InterfaceError::from)?;
                t.apply_pauli(&PauliOp::single(n, q, p));
                tops.push(t);
                for g in gens {
                    let total = cfg.h * m;
                    let mut op = PauliOp::identity(total);
                    for j in g.op.support() {
                        op.set(b * m + j, g.op.get(j));
                    }
                    expected.push(SignedPauli::new(op, g.sign));
                }
            }
            let input = plan.initial_state(family, &tops)?;
            let run = run_ideal(&compiled, &input, &proc, cfg.noise.seed.wrapping_add(idx as u64)).map_err(InterfaceError::from)?;
            let heralded = plan.heralds.iter().any(|h| run.classical[compiled.cslot(h).expect("herald")]);
            Ok((satisfies(&run.tableau, &out_slots, &expected), heralded))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InjectionReport {
        injections: cases.len() / 2,
        runs: cases.len(),
        logical_failures: results.iter().filter(|r| !r.0).count(),
        heralded: results.iter().filter(|r| r.1).count(),
    })
}
