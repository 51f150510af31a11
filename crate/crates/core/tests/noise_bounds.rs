//! Local stochastic tail bounds, checked exactly and by sampling.

use ftinterface::noise::{
    any_block_overflow_exact, binary_entropy, binomial_tail_exact, compose_ls, decimal_rational, sample_ls_iid,
    sample_ls_support_size, tail_bound, tail_bound_exact,
};
use num::{BigRational, One, Zero};
use proptest::prelude::*;

/// Independent oracle: `Σ_{j ≥ k} C(n, j) δ^j (1−δ)^{n−j}` with binomials from Pascal's triangle.
fn pascal_tail(n: usize, delta: &BigRational, k: usize) -> BigRational {
    let mut row = vec![num::BigInt::one()];
    for _ in 0..n {
        let mut next = vec![num::BigInt::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    let q = BigRational::one() - delta;
    (k..=n).map(|j| BigRational::from_integer(row[j].clone()) * num::pow(delta.clone(), j) * num::pow(q.clone(), n - j)).sum()
}

#[test]
fn exact_tail_matches_pascal_oracle() {
    let d = decimal_rational(0.01);
    for (n, k) in [(20, 2), (20, 4), (50, 5), (50, 10), (7, 0)] {
        assert_eq!(binomial_tail_exact(n, &d, k), pascal_tail(n, &d, k));
    }
}

#[test]
fn bound_dominates_exact_overflow_on_grid() {
    for n in [20usize, 50] {
        for mu in [0.1, 0.2] {
            for delta in [0.001, 0.01] {
                for h in [1usize, 8] {
                    let (muq, dq) = (decimal_rational(mu), decimal_rational(delta));
                    let k = (mu * n as f64).round() as usize;
                    let exact = any_block_overflow_exact(n, &dq, k, h);
                    let bound = tail_bound_exact(&muq, &dq, n, h).expect("μn is an integer on this grid");
                    assert!(exact <= bound, "n={n} μ={mu} δ={delta} h={h}");
                    let float = tail_bound(mu, delta, n, h).unwrap().value;
                    let rel = (float - num::ToPrimitive::to_f64(&bound).unwrap()).abs() / float;
                    assert!(rel < 1e-9, "closed forms disagree: {rel}");
                }
            }
        }
    }
}

#[test]
fn sampled_overflow_stays_under_bound() {
    let (n, mu, delta, trials) = (20usize, 0.1, 0.01, 200_000u64);
    let limit = (mu * n as f64).round() as usize;
    let over = (0..trials).filter(|&t| sample_ls_support_size(n, delta, 3, t) > limit).count() as f64;
    let freq = over / trials as f64;
    let bound = tail_bound(mu, delta, n, 1).unwrap().value;
    let sigma = (bound.min(1.0) * (1.0 - bound.min(1.0)) / trials as f64).sqrt();
    assert!(freq <= bound + 3.0 * sigma, "{freq} > {bound}");
}

#[test]
fn entropy_edges() {
    assert_eq!(binary_entropy(0.0), 0.0);
    assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    assert!(tail_bound(0.0, 0.1, 10, 1).is_err());
    assert!(tail_bound(0.1, 1.5, 10, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tail_is_monotone_in_threshold(n in 1usize..30, k in 0usize..30, d in 1u32..500) {
        let delta = BigRational::new(d.into(), 1000.into());
        let a = binomial_tail_exact(n, &delta, k);
        let b = binomial_tail_exact(n, &delta, k + 1);
        prop_assert!(b <= a);
        prop_assert!(a <= BigRational::one() && a >= BigRational::zero());
    }

    #[test]
    fn ls_sample_support_and_pauli_agree(q in 1usize..200, d in 0.0f64..1.0, seed: u64, trial: u64) {
        let s = sample_ls_iid(q, d, seed, trial);
        prop_assert_eq!(s.support.len(), s.pauli.weight());
        prop_assert_eq!(s.support.len(), sample_ls_support_size(q, d, seed, trial));
        prop_assert!(s.support.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn composition_is_a_valid_parameter(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let c = compose_ls(a, b);
        prop_assert!(c >= a.max(b) && c <= 1.0);
    }
}
