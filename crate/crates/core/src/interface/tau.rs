//! Monte Carlo estimate of the failure rate τ of Γ_{r,r'}.
//!
//! Each trial samples circuit faults and the resource-oracle noise, runs the
//! Pauli-frame backend against one ideal tableau reference, and classifies
//! the outcome. A trial fails when any decoder heralds, when an output block
//! has reduced weight above `μ n_{r'}`, or when an output block carries a
//! logical error after one ideal decode.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decoder::residual_logical_error;
use super::gamma::{build_gamma, gamma_input, GammaKnobs, InterfaceCircuit};
use super::{FamilyProcessor, InterfaceError};
use crate::circuit::{run_ideal, CompiledCircuit, FrameSimulator, PauliFrame};
use crate::css::{CodeFamily, CssCode};
use crate::gf2::BitVector;
use crate::noise::{self, domain, FaultEffect, NoiseParams};
use crate::pauli::Pauli;
use crate::stats::{wilson, Z95};

/// Inputs of [`estimate_tau`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauConfig {
    pub r: usize,
    pub r_prime: usize,
    pub noise: NoiseParams,
    pub trials: u64,
    pub mu: f64,
    #[serde(default)]
    pub knobs: GammaKnobs,
}

/// Classification of one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    pub heralded: bool,
    /// Reduced weight of the residual frame per output block, capped at `⌊μ n'⌋ + 1`.
    pub weights: Vec<usize>,
    pub logical_errors: Vec<bool>,
    /// Output qubits with a nontrivial residual.
    pub qubit_errors: usize,
    /// Circuit depth in layers.
    pub latency: usize,
}

/// Summary of a Monte Carlo run at one noise strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    pub delta: f64,
    pub ls_delta: f64,
    pub trials: u64,
    pub failures: u64,
    pub heralded: u64,
    pub overweight: u64,
    pub logical: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// Per output block: trial counts by reduced weight `0 ..= weight_cap`.
    pub weight_histograms: Vec<Vec<u64>>,
    pub weight_cap: usize,
    pub mean_out_weight_per_block: Vec<f64>,
    /// Fraction of (trial, output qubit) pairs with a nontrivial residual.
    pub qubit_error_marginal: f64,
    pub latency: usize,
    pub circuit_size: usize,
    /// The decoder contract is realized by one noisy syndrome round plus exact
    /// decoding, not by a single-shot code; always false here.
    pub single_shot_decoder: bool,
}

/// A compiled Γ with its ideal reference, ready to run trials.
pub struct TauRunner<'a> {
    family: &'a CodeFamily,
    pub gamma: InterfaceCircuit,
    pub compiled: CompiledCircuit,
    proc: FamilyProcessor,
    reference: Vec<bool>,
    resource_slots: Vec<usize>,
    block_slots: Vec<Vec<usize>>,
    herald_slots: Vec<usize>,
    knobs: GammaKnobs,
    weight_cap: usize,
    mu: f64,
}

impl<'a> TauRunner<'a> {
    pub fn new(family: &'a CodeFamily, r: usize, r_prime: usize, knobs: &GammaKnobs, mu: f64, seed: u64) -> Result<Self, InterfaceError> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(noise::NoiseError::Mu(mu).into());
        }
        let gamma = build_gamma(family, r, r_prime, knobs)?;
        let compiled = gamma.circuit.compile()?;
        let proc = FamilyProcessor::new(family);
        let code = family.level(r);
        let q_state = code.encode_state(&BitVector::zeros(code.m()))?;
        let input = gamma_input(family, r, r_prime, &q_state)?;
        let reference = run_ideal(&compiled, &input, &proc, seed)?.classical;
        let resource_slots = compiled.input_slots[code.n()..].to_vec();
        let block_slots = gamma.b.iter().map(|b| compiled.output_slots_of(b)).collect();
        let herald_slots = gamma.heralds.iter().map(|h| compiled.cslot(h).expect("herald wire")).collect();
        let np = family.level(r_prime).n();
        let weight_cap = (mu * np as f64).floor() as usize + 1;
        Ok(Self {
            family,
            gamma,
            compiled,
            proc,
            reference,
            resource_slots,
            block_slots,
            herald_slots,
            knobs: knobs.clone(),
            weight_cap,
            mu,
        })
    }

    pub fn simulator(&self) -> FrameSimulator<'_> {
        FrameSimulator::new(&self.compiled, self.reference.clone(), &self.proc)
    }

    fn output_code(&self) -> &CssCode {
        self.family.level(self.gamma.r_prime)
    }

    /// Initial frame on A ∪ B from the resource oracle.
    pub fn resource_frame(&self, params: &NoiseParams, trial: u64) -> PauliFrame {
        let c = &self.compiled;
        let mut f = PauliFrame::identity(c.num_qslots, c.num_cslots);
        let oracle = &self.knobs.resource;
        let ls = noise::sample_ls_iid(self.resource_slots.len(), oracle.ls_delta_at(params.delta), params.seed, trial);
        for &q in &ls.support {
            f.apply(self.resource_slots[q], ls.pauli.get(q));
        }
        if oracle.fail_prob > 0.0 {
            let mut rng = noise::stream(params.seed, domain::RESOURCE, trial);
            if rng.gen::<f64>() < oracle.fail_prob {
                for &s in &self.resource_slots {
                    f.apply(s, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]);
                }
            }
        }
        f
    }

    /// Runs one sampled trial.
    pub fn trial(&self, sim: &FrameSimulator<'_>, params: &NoiseParams, trial: u64) -> Result<TrialOutcome, InterfaceError> {
        let init = self.resource_frame(params, trial);
        let f = sim.run_sampled(params, trial, Some(&init))?;
        self.classify(&f)
    }

    /// Runs explicit faults from an explicit initial frame.
    pub fn trial_with(&self, sim: &FrameSimulator<'_>, effects: &[(usize, FaultEffect)], init: Option<&PauliFrame>) -> Result<TrialOutcome, InterfaceError> {
        let f = sim.run_effects(effects, init)?;
        self.classify(&f)
    }

    /// Classifies a final frame.
    pub fn classify(&self, f: &PauliFrame) -> Result<TrialOutcome, InterfaceError> {
        let heralded = self.herald_slots.iter().any(|&s| self.reference[s] ^ f.classical.get(s));
        let code = self.output_code();
        let limit = self.mu * code.n() as f64;
        let mut weights = Vec::with_capacity(self.block_slots.len());
        let mut logical_errors = Vec::with_capacity(self.block_slots.len());
        let mut qubit_errors = 0;
        for slots in &self.block_slots {
            let p = f.restrict(slots);
            qubit_errors += p.weight();
            if p.is_identity() {
                weights.push(0);
                logical_errors.push(false);
                continue;
            }
            let w = code.reduced_weight_capped(&p, self.weight_cap)?.value.min(self.weight_cap);
            weights.push(w);
            logical_errors.push(residual_logical_error(code, &p)?);
        }
        let overweight = weights.iter().any(|&w| w as f64 > limit);
        let success = !heralded && !overweight && !logical_errors.iter().any(|&e| e);
        Ok(TrialOutcome { success, heralded, weights, logical_errors, qubit_errors, latency: self.compiled.layers.len() })
    }
}

#[derive(Debug, Clone)]
struct Tally {
    trials: u64,
    failures: u64,
    heralded: u64,
    overweight: u64,
    logical: u64,
    qubit_errors: u64,
    hist: Vec<Vec<u64>>,
}

impl Tally {
    fn new(blocks: usize, cap: usize) -> Self {
        Self { trials: 0, failures: 0, heralded: 0, overweight: 0, logical: 0, qubit_errors: 0, hist: vec![vec![0; cap + 1]; blocks] }
    }

    fn add(&mut self, o: &TrialOutcome, limit: f64) {
        self.trials += 1;
        self.failures += u64::from(!o.success);
        self.heralded += u64::from(o.heralded);
        self.overweight += u64::from(o.weights.iter().any(|&w| w as f64 > limit));
        self.logical += u64::from(o.logical_errors.iter().any(|&e| e));
        self.qubit_errors += o.qubit_errors as u64;
        for (h, &w) in self.hist.iter_mut().zip(&o.weights) {
            h[w] += 1;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.failures += other.failures;
        self.heralded += other.heralded;
        self.overweight += other.overweight;
        self.logical += other.logical;
        self.qubit_errors += other.qubit_errors;
        for (a, b) in self.hist.iter_mut().zip(other.hist) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }
}

/// Estimates τ for Γ_{r,r'} over `trials` independent trials.
///
/// Results depend only on the configuration: trial `t` draws from streams
/// keyed by `(seed, t)` and the reduction is a commutative sum.
pub fn estimate_tau(family: &CodeFamily, cfg: &TauConfig) -> Result<TauEstimate, InterfaceError> {
    if cfg.trials == 0 {
        return Err(InterfaceError::NoTrials);
    }
    cfg.noise.check()?;
    let runner = TauRunner::new(family, cfg.r, cfg.r_prime, &cfg.knobs, cfg.mu, cfg.noise.seed)?;
    let sim = runner.simulator();
    let blocks = runner.block_slots.len();
    let np = runner.output_code().n();
    let limit = cfg.mu * np as f64;
    let cap = runner.weight_cap;
    let tally = (0..cfg.trials)
        .into_par_iter()
        .try_fold(
            || Tally::new(blocks, cap),
            |mut acc, t| {
                let o = runner.trial(&sim, &cfg.noise, t)?;
                acc.add(&o, limit);
                Ok::<_, InterfaceError>(acc)
            },
        )
        .try_reduce(|| Tally::new(blocks, cap), |a, b| Ok(a.merge(b)))?;
    let n = tally.trials;
    let (wilson_lo, wilson_hi) = wilson(tally.failures, n, Z95);
    let mean_out_weight_per_block = tally
        .hist
        .iter()
        .map(|h| h.iter().enumerate().map(|(w, &c)| w as f64 * c as f64).sum::<f64>() / n as f64)
        .collect();
    Ok(TauEstimate {
        delta: cfg.noise.delta,
        ls_delta: cfg.knobs.resource.ls_delta_at(cfg.noise.delta),
        trials: n,
        failures: tally.failures,
        heralded: tally.heralded,
        overweight: tally.overweight,
        logical: tally.logical,
        rate: tally.failures as f64 / n as f64,
        wilson_lo,
        wilson_hi,
        weight_histograms: tally.hist,
        weight_cap: cap,
        mean_out_weight_per_block,
        qubit_error_marginal: tally.qubit_errors as f64 / (n as f64 * (blocks * np) as f64),
        latency: runner.compiled.layers.len(),
        circuit_size: runner.compiled.size(),
        single_shot_decoder: false,
    })
}

/// Least-squares slope through the origin of `marginal ≈ λ' δ`.
pub fn fit_lambda(estimates: &[TauEstimate]) -> Option<f64> {
    let sxx: f64 = estimates.iter().map(|e| e.delta * e.delta).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = estimates.iter().map(|e| e.delta * e.qubit_error_marginal).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Op;

    fn cfg(delta: f64, trials: u64, seed: u64) -> TauConfig {
        TauConfig { r: 2, r_prime: 1, noise: NoiseParams::new(delta, seed), trials, mu: 0.5, knobs: GammaKnobs::default() }
    }

    #[test]
    fn zero_noise_never_fails() {
        let fam = CodeFamily::toy();
        let e = estimate_tau(&fam, &cfg(0.0, 200, 3)).unwrap();
        assert_eq!(e.failures, 0);
        assert_eq!(e.rate, 0.0);
        assert_eq!(e.weight_histograms[0][0], 200);
    }

    #[test]
    fn deterministic_under_seed() {
        let fam = CodeFamily::toy();
        let a = estimate_tau(&fam, &cfg(0.02, 500, 11)).unwrap();
        let b = estimate_tau(&fam, &cfg(0.02, 500, 11)).unwrap();
        assert_eq!(a, b);
        assert!(a.failures > 0);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| estimate_tau(&fam, &cfg(0.02, 500, 11))).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn zero_trials_rejected() {
        let fam = CodeFamily::toy();
        assert!(matches!(estimate_tau(&fam, &cfg(0.01, 0, 1)), Err(InterfaceError::NoTrials)));
    }

    #[test]
    fn fault_locality_on_gamma_21() {
        // A single fault can only disturb outputs inside its forward light cone.
        let fam = CodeFamily::toy();
        let runner = TauRunner::new(&fam, 2, 1, &GammaKnobs::default(), 0.5, 0).unwrap();
        let sim = runner.simulator();
        let c = &runner.compiled;
        let ops: Vec<Op> = c.layers.iter().flatten().copied().collect();
        let outputs: usize = runner.block_slots.iter().map(Vec::len).sum();
        for (loc, op) in ops.iter().enumerate() {
            let effects: Vec<FaultEffect> = match op {
                Op::Measure { .. } => vec![FaultEffect::FlipOutcome],
                Op::Cnot { .. } => Pauli::NONTRIVIAL
                    .iter()
                    .flat_map(|&a| Pauli::NONTRIVIAL.iter().map(move |&b| FaultEffect::Two(a, b)))
                    .collect(),
                Op::Discard(_) => vec![],
                _ => Pauli::NONTRIVIAL.iter().map(|&p| FaultEffect::One(p)).collect(),
            };
            for eff in effects {
                let o = runner.trial_with(&sim, &[(loc, eff)], None).unwrap();
                assert!(o.qubit_errors <= outputs);
                if !o.heralded {
                    assert!(o.weights.iter().all(|&w| w <= 1), "loc {loc} {op:?} {eff:?}: {o:?}");
                }
            }
        }
    }

    #[test]
    fn lambda_fit_is_slope() {
        let mk = |d: f64, m: f64| {
            let mut e = estimate_tau(&CodeFamily::toy(), &cfg(0.0, 1, 0)).unwrap();
            e.delta = d;
            e.qubit_error_marginal = m;
            e
        };
        let l = fit_lambda(&[mk(0.01, 0.05), mk(0.02, 0.1)]).unwrap();
        assert!((l - 5.0).abs() < 1e-12);
        assert_eq!(fit_lambda(&[mk(0.0, 0.0)]), None);
    }
}
