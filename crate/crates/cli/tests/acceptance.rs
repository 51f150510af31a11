//! Acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report lines always
//! reach stdout. Exits nonzero when any criterion fails.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ftinterface::blocktree::{
    antichains, enumerate_patterns, exact_inclusion, mc_inclusion, mc_pattern_counts, pattern_probability, NodeSet,
    TreeParams,
};
use ftinterface::circuit::Tableau;
use ftinterface::css::{CodeFamily, CssCode};
use ftinterface::gf2::BitVector;
use ftinterface::interface::gamma::basis_generators;
use ftinterface::interface::{build_gamma, estimate_tau, teleport_check, GammaKnobs, TauConfig};
use ftinterface::noise::{any_block_overflow_exact, decimal_rational, sample_ls_support_size, tail_bound_exact, NoiseParams};
use ftinterface::pauli::{Pauli, PauliOp, SignedPauli};
use ftinterface::scheduler::{build_schedule, qubit_census, run_e2e, run_injections, Constants, E2eConfig, Footprints};
use ftinterface::stats::not_greater_within;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(x: f64) -> BigRational {
    decimal_rational(x)
}

// ---------------------------------------------------------------- criterion 1

fn row_masks(rows: usize, row: impl Fn(usize) -> Vec<usize>) -> Vec<u64> {
    (0..rows).map(|i| row(i).iter().fold(0u64, |m, &q| m | 1 << q)).collect()
}

/// Leading-bit XOR basis of a set of row masks.
fn xor_basis(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

fn in_span(basis: &[u64], x: u64) -> bool {
    basis.iter().fold(x, |v, &b| v.min(v ^ b)) == 0
}

/// Smallest weight of a vector killed by `checks` but outside the span of `stabs`.
fn brute_distance(n: usize, checks: &[u64], stabs: &[u64]) -> Option<usize> {
    let basis = xor_basis(stabs);
    (1u64..1 << n)
        .filter(|&x| checks.iter().all(|c| (c & x).count_ones() % 2 == 0) && !in_span(&basis, x))
        .map(|x| x.count_ones() as usize)
        .min()
}

fn masks(code: &CssCode) -> (Vec<u64>, Vec<u64>) {
    (
        row_masks(code.hx().nrows(), |i| code.hx().row(i).ones()),
        row_masks(code.hz().nrows(), |i| code.hz().row(i).ones()),
    )
}

fn criterion_1() -> Outcome {
    let mut codes = Vec::new();
    for fam in [CodeFamily::toy(), CodeFamily::steane_variant()] {
        let rep = fam.validate();
        check(rep.all_passed(), || format!("{} fails {:?}", fam.name, rep.failures().map(|c| &c.name).collect::<Vec<_>>()))?;
        codes.extend(fam.levels.clone());
    }
    for c in &codes {
        check(c.n() <= 64, || format!("{} too long for the mask oracle", c.name()))?;
        let (hx, hz) = masks(c);
        check(hx.iter().all(|a| hz.iter().all(|b| (a & b).count_ones() % 2 == 0)), || format!("{}: H_X H_Z^T != 0", c.name()))?;
        let (rx, rz) = (xor_basis(&hx).len(), xor_basis(&hz).len());
        check(c.m() == c.n() - rx - rz, || format!("{}: m = {} but n - rank - rank = {}", c.name(), c.m(), c.n() - rx - rz))?;
    }
    let start = Instant::now();
    let mut found = Vec::new();
    for (code, want) in [(CssCode::four_two_two(), 2usize), (CssCode::steane(), 3)] {
        let (hx, hz) = masks(&code);
        let d = brute_distance(code.n(), &hz, &hx).min(brute_distance(code.n(), &hx, &hz));
        check(d == Some(want), || format!("{}: exhaustive distance {d:?}, expected {want}", code.name()))?;
        let lib = code.min_distance(code.n());
        check(lib.exact && lib.value == want, || format!("{}: library distance {lib:?}", code.name()))?;
        found.push(format!("d({}) = {want}", code.name()));
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(1), || format!("exhaustive search took {t:?}"))?;
    Ok(format!("{} codes valid; {} by exhaustive search in {:.3} s", codes.len(), found.join(", "), t.as_secs_f64()))
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let fam = CodeFamily::toy();
    let g = build_gamma(&fam, 2, 1, &GammaKnobs::default()).map_err(|e| e.to_string())?;
    let k = g.circuit.compile().map_err(|e| e.to_string())?;
    let m = fam.m(2);
    for u in 0..1u64 << m {
        let c = teleport_check(&fam, &g, &k, &basis_generators(&BitVector::from_u64(m, u)), None, u).map_err(|e| e.to_string())?;
        check(c.passed(), || format!("basis state {u:0m$b}: {c:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..20 {
        let logical = Tableau::random_state(m, 40, &mut rng).stabilizers();
        let c = teleport_check(&fam, &g, &k, &logical, None, 100 + i).map_err(|e| e.to_string())?;
        check(c.passed(), || format!("random state {i}: {c:?}"))?;
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("Γ_{{2,1}}: {} basis + 20 random states exact in {:.2} s", 1 << m, t.as_secs_f64()))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let fam = CodeFamily::steane_variant();
    let g = build_gamma(&fam, 2, 1, &GammaKnobs::default()).map_err(|e| e.to_string())?;
    let k = g.circuit.compile().map_err(|e| e.to_string())?;
    let n = fam.level(2).n();
    let mut inputs: Vec<Option<PauliOp>> = vec![None];
    for qb in 0..n {
        for p in Pauli::NONTRIVIAL {
            inputs.push(Some(PauliOp::single(n, qb, p)));
        }
    }
    let states: Vec<SignedPauli> = [Pauli::X, Pauli::Y, Pauli::Z]
        .into_iter()
        .flat_map(|p| [false, true].map(|s| SignedPauli::new(PauliOp::single(1, 0, p), s)))
        .collect();
    let mut runs = 0;
    for (i, e) in inputs.iter().enumerate() {
        for (j, s) in states.iter().enumerate() {
            let c = teleport_check(&fam, &g, &k, std::slice::from_ref(s), e.as_ref(), (i * 8 + j) as u64).map_err(|e| e.to_string())?;
            check(c.passed(), || format!("input {e:?} on state {s:?}: {c:?}"))?;
            runs += 1;
        }
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    Ok(format!("Steane Γ_{{2,1}}: {} inputs x 6 logical states = {runs} runs correct in {:.2} s", inputs.len(), t.as_secs_f64()))
}

// ---------------------------------------------------------------- criterion 4

/// Independent oracle: `1 − (1 − Σ_{j≥k} C(n,j) δ^j (1−δ)^{n−j})^h`, binomials from Pascal's triangle.
fn pascal_overflow(n: usize, delta: &BigRational, k: usize, h: usize) -> BigRational {
    let mut row = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = vec![BigInt::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    let one = BigRational::one();
    let qd = &one - delta;
    let tail: BigRational =
        (k..=n).map(|j| BigRational::from_integer(row[j].clone()) * num::pow(delta.clone(), j) * num::pow(qd.clone(), n - j)).sum();
    &one - num::pow(&one - tail, h)
}

/// Independent closed form `h (2^{h₂(μ)/μ} δ)^{μn}` in floating point.
fn float_bound(mu: f64, delta: f64, n: usize, h: usize) -> f64 {
    let h2 = -mu * mu.log2() - (1.0 - mu) * (1.0 - mu).log2();
    h as f64 * (2f64.powf(h2 / mu) * delta).powf(mu * n as f64)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let trials = 1_000_000u64;
    let hmax = 8usize;
    let mut points = 0;
    let mut worst = f64::NEG_INFINITY;
    for n in [20usize, 50] {
        for delta in [0.001, 0.01] {
            let dq = q(delta);
            // Support sizes of hmax independent blocks per trial, shared by both μ and both h.
            let counts: Vec<[u8; 8]> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut s = [0u8; 8];
                    for (b, v) in s.iter_mut().enumerate() {
                        *v = sample_ls_support_size(n, delta, 404, t * hmax as u64 + b as u64) as u8;
                    }
                    s
                })
                .collect();
            for mu in [0.1, 0.2] {
                let k = (mu * n as f64).round() as usize;
                for h in [1usize, 8] {
                    let exact = any_block_overflow_exact(n, &dq, k, h);
                    check(exact == pascal_overflow(n, &dq, k, h), || format!("exact tail disagrees with oracle at n={n} δ={delta} μ={mu} h={h}"))?;
                    let bound = tail_bound_exact(&q(mu), &dq, n, h).ok_or("μn not an integer")?;
                    check(exact <= bound, || format!("exact tail exceeds bound at n={n} δ={delta} μ={mu} h={h}"))?;
                    let fb = float_bound(mu, delta, n, h);
                    let bf = bound.to_f64().unwrap_or(f64::NAN);
                    check((fb - bf).abs() <= 1e-9 * fb, || format!("closed forms disagree: {fb} vs {bf}"))?;
                    let over = counts.iter().filter(|s| s[..h].iter().any(|&c| c as usize >= k)).count() as f64;
                    let freq = over / trials as f64;
                    let b = bf.min(1.0);
                    let sigma = (b * (1.0 - b) / trials as f64).sqrt();
                    check(freq <= bf + 3.0 * sigma, || format!("sampled overflow {freq} > {bf} + 3σ at n={n} δ={delta} μ={mu} h={h}"))?;
                    if sigma > 0.0 {
                        worst = worst.max((freq - bf) / sigma);
                    }
                    points += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(120), || format!("took {t:?}"))?;
    Ok(format!(
        "{points} grid points: exact ≤ bound, sampled overflow ≤ bound + 3σ at 1e6 (max {worst:.1}σ) in {:.1} s",
        t.as_secs_f64()
    ))
}

// ---------------------------------------------------------------- criterion 5

/// Independent oracle: a node is in the failure set when it or an ancestor
/// fails, each node at depth `y` failing on its own with probability `τ_y`.
/// Enumerates failures on the union of root paths of the set.
fn inclusion_oracle(tau: &[BigRational], set: &NodeSet) -> BigRational {
    let mut relevant: Vec<(usize, u64)> = Vec::new();
    for v in set.nodes() {
        for b in 0..=v.depth {
            let a = (b, v.path >> (v.depth - b));
            if !relevant.contains(&a) {
                relevant.push(a);
            }
        }
    }
    let targets: Vec<(usize, u64)> = set.nodes().iter().map(|v| (v.depth, v.path)).collect();
    let one = BigRational::one();
    let mut total = BigRational::zero();
    for bits in 0u32..1 << relevant.len() {
        let failed = |d: usize, p: u64| relevant.iter().position(|&x| x == (d, p)).is_some_and(|i| bits >> i & 1 == 1);
        let covered = targets.iter().all(|&(d, p)| (0..=d).any(|b| failed(b, p >> (d - b))));
        if covered {
            total += relevant
                .iter()
                .enumerate()
                .map(|(i, &(d, _))| if bits >> i & 1 == 1 { tau[d].clone() } else { &one - &tau[d] })
                .fold(one.clone(), |a, b| a * b);
        }
    }
    total
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let trials = 1_000_000u64;
    let mut sets_checked = 0;
    let mut worst: f64 = 0.0;
    for z in [2usize, 3, 4] {
        let sets = antichains(z, 3, true);
        for db in [0.3, 0.1, 0.03] {
            let dq = q(db);
            let params = TreeParams::analytic(z, &dq).map_err(|e| e.to_string())?;
            let tau: Vec<BigRational> = (0..z).map(|y| num::pow(dq.clone(), 1 << (z - y))).collect();
            let counts = mc_inclusion(&params, &sets, trials, 5).map_err(|e| e.to_string())?;
            for (set, &cnt) in sets.iter().zip(&counts) {
                let exact = exact_inclusion(&params, set).map_err(|e| e.to_string())?;
                check(exact == inclusion_oracle(&tau, set), || format!("z={z} δ̄={db} {}: exact disagrees with oracle", set.descriptor()))?;
                let bound = num::pow(q(2.0) * &dq, 2 * set.len());
                check(exact <= bound, || format!("z={z} δ̄={db} {}: {exact} > {bound}", set.descriptor()))?;
                let p = exact.to_f64().unwrap_or(f64::NAN);
                let sigma = (p * (1.0 - p) / trials as f64).sqrt();
                let freq = cnt as f64 / trials as f64;
                check((freq - p).abs() <= 4.0 * sigma, || {
                    format!("z={z} δ̄={db} {}: sampled {freq} vs exact {p} ({:.2}σ)", set.descriptor(), (freq - p) / sigma)
                })?;
                if sigma > 0.0 {
                    worst = worst.max(((freq - p) / sigma).abs());
                }
                sets_checked += 1;
            }
        }
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!(
        "{sets_checked} (z, δ̄, leaf antichain) cases: exact = oracle ≤ (2δ̄)^(2|T|), sampled within 4σ at 1e6 (max {worst:.2}σ) in {:.1} s",
        t.as_secs_f64()
    ))
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let trials = 1_000_000u64;
    let pats = enumerate_patterns(2);
    let mut worst: f64 = 0.0;
    let cases = [TreeParams::from_f64(&[0.2, 0.3]), TreeParams::analytic(2, &q(0.3))];
    for (ci, params) in cases.into_iter().enumerate() {
        let params = params.map_err(|e| e.to_string())?;
        let probs: Vec<BigRational> = pats.iter().map(|p| pattern_probability(&params, p)).collect();
        let total: BigRational = probs.iter().sum();
        check(total.is_one(), || format!("case {ci}: pattern probabilities sum to {total}"))?;
        let counts = mc_pattern_counts(&params, &pats, trials, 6 + ci as u64);
        for ((pat, p), &k) in pats.iter().zip(&probs).zip(&counts) {
            let p = p.to_f64().unwrap_or(f64::NAN);
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let freq = k as f64 / trials as f64;
            check((freq - p).abs() <= 4.0 * sigma, || format!("case {ci} {pat:?}: sampled {freq} vs {p}"))?;
            if sigma > 0.0 {
                worst = worst.max(((freq - p) / sigma).abs());
            }
        }
    }
    Ok(format!(
        "{} patterns x 2 parameter sets: product formula sums to 1, sampled within 4σ at 1e6 (max {worst:.2}σ) in {:.1} s",
        pats.len(),
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let fam = CodeFamily::toy();
    let knobs = GammaKnobs::default();
    let fp = Footprints::measure(&fam, &knobs).map_err(|e| e.to_string())?;
    let c = Constants::from_footprints(&fp, BigRational::one()).map_err(|e| e.to_string())?;
    let cap = &c.theta + c.theta_prime();
    let mut schedules = 0;
    let mut integer_rises = 0;
    for r in 2..=fam.depth() {
        let p1 = c.p1[r - 1];
        let mut ratios = Vec::with_capacity(1024);
        for h in 1..=1024usize {
            let rep = qubit_census(&build_schedule(&fam, r, 1, h, &c, &fp).map_err(|e| e.to_string())?);
            let (mr, hh) = (BigInt::from(fam.m(r)), BigInt::from(h));
            let eta1_bound = &c.theta1 * BigRational::from_integer(&hh * &mr);
            let eta2_bound = &c.theta * BigRational::from_integer(&mr * &hh) + &c.theta * BigRational::from_integer(BigInt::from(p1) * &mr);
            let int = |x: u64| BigRational::from_integer(BigInt::from(x));
            check(int(rep.max_ec) <= eta1_bound, || format!("r={r} h={h}: η₁ = {} > {eta1_bound}", rep.max_ec))?;
            check(int(rep.max_gamma) <= eta2_bound, || format!("r={r} h={h}: η₂ = {} > {eta2_bound}", rep.max_gamma))?;
            check(rep.eta1_ok && rep.eta2_ok, || format!("r={r} h={h}: report flags disagree"))?;
            let ratio = BigRational::new(BigInt::from(rep.max_total), &mr * &hh);
            check(ratio == rep.ratio, || format!("r={r} h={h}: ratio mismatch"))?;
            if h as u64 >= p1 {
                check(ratio <= cap, || format!("r={r} h={h}: ratio {ratio} > θ + θ' = {cap}"))?;
            }
            ratios.push(ratio);
            schedules += 1;
        }
        for e in 0..10 {
            let (a, b) = (&ratios[(1 << e) - 1], &ratios[(2 << e) - 1]);
            check(b <= a, || format!("r={r}: ratio rises from h={} to h={}", 1 << e, 2 << e))?;
        }
        integer_rises += ratios.windows(2).filter(|w| w[1] > w[0]).count();
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    Ok(format!(
        "{schedules} schedules (h = 1..1024, r = 2..4): η₁, η₂ exact, ratio ≤ θ + θ' = {cap} for h ≥ p₁, non-increasing over h = 1, 2, 4, …, 1024 \
         ({integer_rises} unit-step rises at window ceilings) in {:.1} s",
        t.as_secs_f64()
    ))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let fam = CodeFamily::toy();
    let mut pts = Vec::new();
    for delta in [0.02, 0.01, 0.005] {
        let cfg = TauConfig { r: 2, r_prime: 1, noise: NoiseParams::new(delta, 8), trials: 100_000, mu: 0.5, knobs: GammaKnobs::default() };
        let e = estimate_tau(&fam, &cfg).map_err(|e| e.to_string())?;
        pts.push((delta, e.failures, e.trials));
    }
    for w in pts.windows(2) {
        check(not_greater_within((w[0].1, w[0].2), (w[1].1, w[1].2), 3.0), || format!("rate rises from δ={} to δ={}: {pts:?}", w[0].0, w[1].0))?;
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    let rates: Vec<String> = pts.iter().map(|(d, f, n)| format!("τ̂({d}) = {:.4}", *f as f64 / *n as f64)).collect();
    Ok(format!("{} at 1e5 trials each, non-increasing within 3σ, in {:.1} s", rates.join(", "), t.as_secs_f64()))
}

// ---------------------------------------------------------------- criterion 9

fn run_cli(cmd: &str, config: &Path, out: &Path, workers: usize) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_ftinterface"))
        .args([cmd, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--seed", "99", "--workers", &workers.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    check(o.status.success(), || format!("{cmd} exited with {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))
}

fn csv_files(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap_or_default()))
        .collect();
    v.sort();
    Ok(v)
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let configs = [
        ("validate-codes", r#"{"family": "toy"}"#),
        ("interface-sweep", r#"{"deltas": [0.02, 0.01], "trials": 3000}"#),
        ("schedule-audit", r#"{"h_values": [1, 2, 3, 8, 64]}"#),
        ("tree-bounds", r#"{"z_values": [2, 3], "delta_bars": [0.3, 0.1], "mc_trials": 20000}"#),
        ("e2e", r#"{"r": 3, "r_prime": 2, "h": 2, "delta": 0.002, "input_delta": 0.002, "trials": 300, "injections": false}"#),
    ];
    let mut files = 0;
    for (cmd, body) in configs {
        let cfg = tmp.path().join(format!("{cmd}.json"));
        std::fs::write(&cfg, body).map_err(|e| e.to_string())?;
        let (a, b) = (tmp.path().join(format!("{cmd}-a")), tmp.path().join(format!("{cmd}-b")));
        run_cli(cmd, &cfg, &a, 1)?;
        run_cli(cmd, &cfg, &b, 2)?;
        let (fa, fb) = (csv_files(&a)?, csv_files(&b)?);
        check(!fa.is_empty(), || format!("{cmd} wrote no CSV"))?;
        check(fa == fb, || format!("{cmd}: CSV output differs between runs"))?;
        files += fa.len();
    }
    Ok(format!("5 commands run twice (1 and 2 workers): {files} CSV files byte-identical in {:.1} s", start.elapsed().as_secs_f64()))
}

// ---------------------------------------------------------------- criterion 10

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let fam = CodeFamily::toy();
    let mut parts = Vec::new();
    for (r, rp, h) in [(3usize, 2usize, 2usize), (3, 1, 1)] {
        let cfg = E2eConfig {
            r,
            r_prime: rp,
            h,
            noise: NoiseParams::new(0.0, 10),
            input_delta: 0.0,
            trials: 500,
            theta: 1.0,
            knobs: GammaKnobs::default(),
        };
        let rep = run_e2e(&fam, &cfg).map_err(|e| e.to_string())?;
        check(rep.any_error == 0 && rep.heralded == 0, || format!("({r},{rp}) h={h}: noiseless e2e saw errors {rep:?}"))?;
        let inj = run_injections(&fam, &cfg).map_err(|e| e.to_string())?;
        check(inj.injections == 3 * fam.level(r).n(), || format!("({r},{rp}): {} injections", inj.injections))?;
        check(inj.logical_failures == 0, || format!("({r},{rp}) h={h}: {} logical failures in {} runs", inj.logical_failures, inj.runs))?;
        parts.push(format!("Γ({r}→{rp}) h={h}: {} injections / {} runs, 0 failures", inj.injections, inj.runs));
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!("{} in {:.1} s", parts.join("; "), t.as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("code validity", criterion_1),
        ("noiseless interface exactness", criterion_2),
        ("correctable-error completeness", criterion_3),
        ("local stochastic tail bound", criterion_4),
        ("block-tree bounds", criterion_5),
        ("chain rule", criterion_6),
        ("overhead accounting", criterion_7),
        ("noise monotonicity", criterion_8),
        ("determinism", criterion_9),
        ("end-to-end", criterion_10),
    ];
    let only: HashSet<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        match f() {
            Ok(msg) => println!("criterion {id:>2} PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
