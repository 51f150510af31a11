//! Stochastic circuit-level noise, local stochastic samples and the tail bound.
//!
//! Faults are Pauli-twirled: a faulty unitary, idle, preparation or
//! controlled-Pauli location is followed by a uniformly random non-identity
//! Pauli on its support, and a faulty measurement flips its outcome.
//!
//! Randomness comes from ChaCha8 streams keyed by `(seed, domain)` with the
//! trial index as the stream id. Location `k` reads the words at a fixed
//! offset, so every draw is a pure function of `(seed, trial, location)`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Pauli, PauliOp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("delta must lie in [0, 1], got {0}")]
    Delta(f64),
    #[error("mu must lie in (0, 1), got {0}")]
    Mu(f64),
    #[error("only the Pauli-twirled noise instance is implemented")]
    NotTwirled,
}

/// Parameters of stochastic circuit-level noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub delta: f64,
    pub seed: u64,
    #[serde(default = "default_twirl")]
    pub pauli_twirl: bool,
}

fn default_twirl() -> bool {
    true
}

impl NoiseParams {
    pub fn new(delta: f64, seed: u64) -> Self {
        Self { delta, seed, pauli_twirl: true }
    }

    pub fn check(&self) -> Result<(), NoiseError> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(NoiseError::Delta(self.delta));
        }
        if !self.pauli_twirl {
            return Err(NoiseError::NotTwirled);
        }
        Ok(())
    }
}

/// Named RNG domains so unrelated draws never share a stream.
pub mod domain {
    pub const FAULT_SITES: u64 = 1;
    pub const FAULT_PAULIS: u64 = 2;
    pub const LS_SITES: u64 = 3;
    pub const LS_PAULIS: u64 = 4;
    pub const MEASUREMENT_COINS: u64 = 5;
    pub const RESOURCE: u64 = 6;
    pub const TREE: u64 = 7;
    pub const INPUT: u64 = 8;
}

/// A ChaCha8 stream for `(seed, domain, trial)`.
pub fn stream(seed: u64, domain: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Words reserved per keyed location.
const LOCATION_STRIDE: u128 = 16;

/// A stream positioned at the words reserved for `location`.
pub fn keyed(seed: u64, domain: u64, trial: u64, location: u64) -> ChaCha8Rng {
    let mut rng = stream(seed, domain, trial);
    rng.set_word_pos(location as u128 * LOCATION_STRIDE);
    rng
}

/// Threshold for an exact Bernoulli(δ) test on a uniform `u64`.
fn bernoulli_threshold(delta: f64) -> Option<u64> {
    if delta <= 0.0 {
        Some(0)
    } else if delta >= 1.0 {
        None
    } else {
        Some((delta * 18446744073709551616.0) as u64)
    }
}

/// Draws one Bernoulli bit per site from `rng`, one `u64` per site.
fn sample_sites(rng: &mut ChaCha8Rng, count: usize, delta: f64) -> Vec<usize> {
    match bernoulli_threshold(delta) {
        None => (0..count).collect(),
        Some(0) => Vec::new(),
        Some(t) => (0..count).filter(|_| rng.next_u64() < t).collect(),
    }
}

/// Faulty locations of one trial (flat location indices, ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultPattern {
    pub trial: u64,
    pub locations: Vec<usize>,
}

impl FaultPattern {
    pub fn empty(trial: u64) -> Self {
        Self { trial, locations: Vec::new() }
    }
}

/// Marks each of `circuit_size` locations faulty independently with probability `delta`.
pub fn sample_fault_pattern(circuit_size: usize, params: &NoiseParams, trial: u64) -> FaultPattern {
    let mut rng = stream(params.seed, domain::FAULT_SITES, trial);
    FaultPattern { trial, locations: sample_sites(&mut rng, circuit_size, params.delta) }
}

/// Effect of a fault at one location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultEffect {
    None,
    One(Pauli),
    Two(Pauli, Pauli),
    FlipOutcome,
}

/// The twirled fault drawn for `location` in `trial`, given its fault arity.
///
/// Arity 0 is a discard, `usize::MAX` marks a measurement.
pub fn fault_effect(seed: u64, trial: u64, location: usize, arity: usize, is_measurement: bool) -> FaultEffect {
    if is_measurement {
        return FaultEffect::FlipOutcome;
    }
    let mut rng = keyed(seed, domain::FAULT_PAULIS, trial, location as u64);
    match arity {
        0 => FaultEffect::None,
        1 => FaultEffect::One(Pauli::NONTRIVIAL[rng.gen_range(0..3)]),
        _ => {
            let k = rng.gen_range(1..16usize);
            let pick = |b: usize| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][b];
            FaultEffect::Two(pick(k / 4), pick(k % 4))
        }
    }
}

/// One draw of the i.i.d. local stochastic channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalStochasticSample {
    pub support: Vec<usize>,
    pub pauli: PauliOp,
}

/// Each qubit joins the support with probability `delta` and gets a uniform non-identity Pauli.
pub fn sample_ls_iid(qubits: usize, delta: f64, seed: u64, trial: u64) -> LocalStochasticSample {
    let mut rng = stream(seed, domain::LS_SITES, trial);
    let support = sample_sites(&mut rng, qubits, delta);
    let mut pauli = PauliOp::identity(qubits);
    if !support.is_empty() {
        let mut prng = stream(seed, domain::LS_PAULIS, trial);
        for &q in &support {
            pauli.set(q, Pauli::NONTRIVIAL[prng.gen_range(0..3)]);
        }
    }
    LocalStochasticSample { support, pauli }
}

/// Support size only; same draws as [`sample_ls_iid`].
pub fn sample_ls_support_size(qubits: usize, delta: f64, seed: u64, trial: u64) -> usize {
    let mut rng = stream(seed, domain::LS_SITES, trial);
    match bernoulli_threshold(delta) {
        None => qubits,
        Some(0) => 0,
        Some(t) => (0..qubits).filter(|_| rng.next_u64() < t).count(),
    }
}

/// Certified parameter of the composition of two local stochastic channels.
pub fn compose_ls(a_delta: f64, b_delta: f64) -> f64 {
    (a_delta + b_delta).min(1.0)
}

/// Binary entropy `h₂(x) = −x log₂ x − (1−x) log₂(1−x)`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// The analytic tail bound and whether `delta` lies below its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub value: f64,
    /// `delta < 2^{−h₂(μ)/μ}`.
    pub below_threshold: bool,
}

/// `h · (2^{h₂(μ)/μ} δ)^{μn}`.
pub fn tail_bound(mu: f64, delta: f64, n: usize, h: usize) -> Result<TailBound, NoiseError> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(NoiseError::Mu(mu));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(NoiseError::Delta(delta));
    }
    let e = binary_entropy(mu) / mu;
    let value = h as f64 * (e.exp2() * delta).powf(mu * n as f64);
    Ok(TailBound { value, below_threshold: delta < (-e).exp2() })
}

/// Exact decimal value of a finite float's shortest representation, e.g. `0.01 → 1/100`.
pub fn decimal_rational(x: f64) -> BigRational {
    let s = format!("{x:e}");
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i64 = exp.parse().expect("integer exponent");
    let negative = mant.starts_with('-');
    let digits_str = mant.trim_start_matches('-');
    let (int_part, frac_part) = digits_str.split_once('.').unwrap_or((digits_str, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().expect("digits");
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num::pow(ten, (-scale) as usize));
    }
    if negative {
        -r
    } else {
        r
    }
}

/// Exact `Pr[Bin(n, δ) ≥ k]`.
pub fn binomial_tail_exact(n: usize, delta: &BigRational, k: usize) -> BigRational {
    let one = BigRational::one();
    let q = &one - delta;
    let mut total = BigRational::zero();
    let mut binom = BigInt::one();
    for j in 0..=n {
        if j >= k {
            total += BigRational::from_integer(binom.clone()) * num::pow(delta.clone(), j) * num::pow(q.clone(), n - j);
        }
        binom = binom * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    total
}

/// Exact probability that at least one of `h` independent blocks has `≥ k` faulty qubits.
pub fn any_block_overflow_exact(n: usize, delta: &BigRational, k: usize, h: usize) -> BigRational {
    let one = BigRational::one();
    let p = binomial_tail_exact(n, delta, k);
    &one - num::pow(&one - p, h)
}

/// Exact value of the bound when `k = μn` is an integer: `(2^{h₂(μ)/μ})^{k} = μ^{−k}(1−μ)^{−(n−k)}`,
/// so the bound is `h δ^k / (μ^k (1−μ)^{n−k})`.
pub fn tail_bound_exact(mu: &BigRational, delta: &BigRational, n: usize, h: usize) -> Option<BigRational> {
    let k = mu * BigRational::from_integer(BigInt::from(n));
    if !k.is_integer() {
        return None;
    }
    let k = k.to_integer().to_usize()?;
    let one = BigRational::one();
    let denom = num::pow(mu.clone(), k) * num::pow(&one - mu, n - k);
    Some(BigRational::from_integer(BigInt::from(h)) * num::pow(delta.clone(), k) / denom)
}

/// Result of splitting samples by support size.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub low: Vec<LocalStochasticSample>,
    pub overflow: usize,
    pub total: usize,
}

impl Truncation {
    pub fn overflow_frequency(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.overflow as f64 / self.total as f64
        }
    }
}

/// Keeps samples with support `≤ μn`; counts the rest as overflow.
pub fn ls_truncate(samples: impl IntoIterator<Item = LocalStochasticSample>, mu: f64, n: usize) -> Truncation {
    let limit = mu * n as f64;
    let mut out = Truncation { low: Vec::new(), overflow: 0, total: 0 };
    for s in samples {
        out.total += 1;
        if s.support.len() as f64 > limit + 1e-9 {
            out.overflow += 1;
        } else {
            out.low.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_deltas() {
        assert!(sample_fault_pattern(100, &NoiseParams::new(0.0, 1), 0).locations.is_empty());
        assert_eq!(sample_fault_pattern(100, &NoiseParams::new(1.0, 1), 0).locations.len(), 100);
        assert!(sample_ls_iid(10, 0.0, 3, 0).support.is_empty());
        let full = sample_ls_iid(10, 1.0, 3, 0);
        assert_eq!(full.support.len(), 10);
        assert_eq!(full.pauli.weight(), 10);
    }

    #[test]
    fn fault_fraction_concentrates() {
        let p = sample_fault_pattern(1_000_000, &NoiseParams::new(0.1, 7), 0);
        let frac = p.locations.len() as f64 / 1e6;
        assert!((frac - 0.1).abs() < 0.001, "{frac}");
    }

    #[test]
    fn reproducible_streams() {
        let params = NoiseParams::new(0.3, 99);
        assert_eq!(sample_fault_pattern(50, &params, 4), sample_fault_pattern(50, &params, 4));
        assert_ne!(sample_fault_pattern(50, &params, 4), sample_fault_pattern(50, &params, 5));
        assert_eq!(fault_effect(1, 2, 3, 2, false), fault_effect(1, 2, 3, 2, false));
    }

    #[test]
    fn two_qubit_faults_are_nontrivial() {
        for loc in 0..500 {
            match fault_effect(5, 0, loc, 2, false) {
                FaultEffect::Two(a, b) => assert!(a != Pauli::I || b != Pauli::I),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn composition() {
        assert_eq!(compose_ls(0.0, 0.4), 0.4);
        assert!((compose_ls(0.01, 0.02) - 0.03).abs() < 1e-15);
        assert_eq!(compose_ls(0.7, 0.6), 1.0);
    }

    #[test]
    fn entropy_and_boundary() {
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        let b = tail_bound(0.5, 0.25, 2, 1).unwrap();
        assert!((b.value - 1.0).abs() < 1e-12);
        assert!(!b.below_threshold);
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(decimal_rational(0.01), BigRational::new(1.into(), 100.into()));
        assert_eq!(decimal_rational(0.3), BigRational::new(3.into(), 10.into()));
        assert_eq!(decimal_rational(2.5), BigRational::new(5.into(), 2.into()));
        assert_eq!(decimal_rational(1e-3), BigRational::new(1.into(), 1000.into()));
    }

    #[test]
    fn exact_tail_matches_float_bound() {
        let mu = decimal_rational(0.2);
        let delta = decimal_rational(0.01);
        let exact = tail_bound_exact(&mu, &delta, 50, 3).unwrap().to_f64().unwrap();
        let float = tail_bound(0.2, 0.01, 50, 3).unwrap().value;
        assert!((exact - float).abs() / float < 1e-9);
    }

    #[test]
    fn binomial_tail_sums_to_one() {
        let d = decimal_rational(0.3);
        assert_eq!(binomial_tail_exact(7, &d, 0), BigRational::one());
        let p = binomial_tail_exact(2, &d, 2);
        assert_eq!(p, &d * &d);
    }

    #[test]
    fn truncation() {
        let samples: Vec<_> = (0..100).map(|t| sample_ls_iid(20, 0.0, 1, t)).collect();
        assert_eq!(ls_truncate(samples, 0.1, 20).overflow, 0);
        let samples: Vec<_> = (0..100).map(|t| sample_ls_iid(20, 0.5, 1, t)).collect();
        assert_eq!(ls_truncate(samples, 1.0, 20).overflow, 0);
    }
}
