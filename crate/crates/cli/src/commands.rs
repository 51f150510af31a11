//! The five subcommands. Each returns whether its invariants held.

use std::collections::HashMap;

use anyhow::{Context, Result};
use ftinterface::blocktree::{antichains, check_final_bound, exact_inclusion, mc_inclusion, BoundKind, TreeParams};
use ftinterface::interface::{estimate_tau, fit_lambda, TauConfig, TauEstimate};
use ftinterface::noise::{decimal_rational, NoiseParams};
use ftinterface::scheduler::{build_schedule, qubit_census, run_e2e, run_injections, Constants, E2eConfig, Footprints};
use ftinterface::stats::{binomial_sigma, not_greater_within};
use num::{BigInt, BigRational, ToPrimitive};
use serde::Serialize;

use crate::config::{AuditConfig, E2eCliConfig, FamilySource, SweepConfig, TreeConfig};
use crate::output::{float, loglog_svg, opt_float, RunOutput, Series};

fn rational_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn validate_codes(src: &FamilySource, out: &mut RunOutput) -> Result<bool> {
    let header = ["check", "passed", "detail"];
    let family = match src.load() {
        Ok(f) => f,
        Err(e) => {
            let detail = format!("{e:#}");
            println!("FAIL load: {detail}");
            out.write_csv("checks.csv", &header, &[vec!["load".into(), "false".into(), detail]])?;
            return Ok(false);
        }
    };
    let report = family.validate();
    let checks: Vec<Vec<String>> =
        report.checks.iter().map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]).collect();
    out.write_csv("checks.csv", &header, &checks)?;
    let mut codes = Vec::new();
    for r in 1..=family.depth() {
        let c = family.level(r);
        let d = c.distance();
        codes.push(vec![
            r.to_string(),
            c.name().to_string(),
            c.n().to_string(),
            c.m().to_string(),
            c.hx().nrows().to_string(),
            c.hz().nrows().to_string(),
            d.value.to_string(),
            d.exact.to_string(),
        ]);
        println!("level {r}: [[{},{},{}{}]] {}", c.n(), c.m(), d.value, if d.exact { "" } else { "+" }, c.name());
    }
    out.write_csv("codes.csv", &["level", "name", "n", "m", "x_checks", "z_checks", "distance", "distance_exact"], &codes)?;
    for c in report.failures() {
        println!("FAIL {}: {}", c.name, c.detail);
    }
    println!("{} checks, {} failed", report.checks.len(), report.failures().count());
    Ok(report.all_passed())
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    family: &'a str,
    r: usize,
    r_prime: usize,
    lambda_fit: Option<f64>,
    /// Whether the failure rate does not rise by more than 3σ as δ decreases.
    non_increasing_3sigma: bool,
    estimates: &'a [TauEstimate],
}

pub fn interface_sweep(cfg: &SweepConfig, src: &FamilySource, out: &mut RunOutput) -> Result<bool> {
    let family = src.load()?;
    let mut estimates = Vec::new();
    for &delta in &cfg.deltas {
        let noise = NoiseParams { delta, seed: cfg.seed, pauli_twirl: cfg.pauli_twirl };
        let tc = TauConfig { r: cfg.r, r_prime: cfg.r_prime, noise, trials: cfg.trials, mu: cfg.mu, knobs: cfg.knobs.clone() };
        out.seed(format!("delta={}", float(delta)), cfg.seed);
        let e = estimate_tau(&family, &tc).with_context(|| format!("Γ_{{{},{}}} at δ = {delta}", cfg.r, cfg.r_prime))?;
        println!("δ = {delta:.3e}: τ̂ = {:.4e} [{:.4e}, {:.4e}] ({} / {})", e.rate, e.wilson_lo, e.wilson_hi, e.failures, e.trials);
        estimates.push(e);
    }
    let rows: Vec<Vec<String>> = estimates
        .iter()
        .map(|e| {
            vec![
                float(e.delta),
                float(e.ls_delta),
                e.trials.to_string(),
                e.failures.to_string(),
                e.heralded.to_string(),
                e.overweight.to_string(),
                e.logical.to_string(),
                float(e.rate),
                float(e.wilson_lo),
                float(e.wilson_hi),
                float(e.qubit_error_marginal),
                e.latency.to_string(),
                e.circuit_size.to_string(),
            ]
        })
        .collect();
    out.write_csv(
        "sweep.csv",
        &[
            "delta",
            "ls_delta",
            "trials",
            "failures",
            "heralded",
            "overweight",
            "logical",
            "rate",
            "wilson_lo",
            "wilson_hi",
            "qubit_error_marginal",
            "latency",
            "circuit_size",
        ],
        &rows,
    )?;
    let mut hist = Vec::new();
    for e in &estimates {
        for (b, h) in e.weight_histograms.iter().enumerate() {
            for (w, c) in h.iter().enumerate() {
                hist.push(vec![float(e.delta), b.to_string(), w.to_string(), c.to_string()]);
            }
        }
    }
    out.write_csv("weights.csv", &["delta", "block", "reduced_weight", "count"], &hist)?;

    let mut order: Vec<&TauEstimate> = estimates.iter().collect();
    order.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    let non_increasing =
        order.windows(2).all(|w| not_greater_within((w[0].failures, w[0].trials), (w[1].failures, w[1].trials), 3.0));
    let lambda = fit_lambda(&estimates);
    println!("failure rate non-increasing within 3σ: {non_increasing}");
    if let Some(l) = lambda {
        println!("fitted marginal slope λ' = {l:.4}");
    }
    let title = format!("Γ_{{{},{}}} failure rate", cfg.r, cfg.r_prime);
    let series = vec![
        Series {
            name: "τ̂".into(),
            points: order.iter().map(|e| (e.delta, e.rate)).collect(),
            bars: order.iter().map(|e| (e.wilson_lo, e.wilson_hi)).collect(),
        },
        Series { name: "δ".into(), points: order.iter().map(|e| (e.delta, e.delta)).collect(), bars: vec![] },
    ];
    out.write("sweep.svg", loglog_svg(&title, "δ", "τ", &series).as_bytes())?;
    out.write_json(
        "summary.json",
        &SweepSummary {
            family: &family.name,
            r: cfg.r,
            r_prime: cfg.r_prime,
            lambda_fit: lambda,
            non_increasing_3sigma: non_increasing,
            estimates: &estimates,
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct ConstantsOut {
    theta: String,
    theta1: String,
    theta_prime: String,
    theta_f64: f64,
    theta1_f64: f64,
    theta_prime_f64: f64,
    p1: Vec<u64>,
    ratio_non_increasing: Vec<(usize, bool)>,
}

pub fn schedule_audit(cfg: &AuditConfig, src: &FamilySource, out: &mut RunOutput) -> Result<bool> {
    let family = src.load()?;
    let fp = Footprints::measure(&family, &cfg.knobs)?;
    let consts = Constants::from_footprints(&fp, decimal_rational(cfg.theta))?;
    let cap = &consts.theta + consts.theta_prime();
    let r_values: Vec<usize> = if cfg.r_values.is_empty() { (2..=family.depth()).collect() } else { cfg.r_values.clone() };
    let mut rows = Vec::new();
    let mut layers = Vec::new();
    let mut series = Vec::new();
    let mut monotone = Vec::new();
    let mut passed = true;
    for &r in &r_values {
        let p1 = consts.p1.get(r - 1).copied().unwrap_or(0);
        let mut pts = Vec::new();
        let mut last: Option<(usize, BigRational)> = None;
        let mut non_increasing = true;
        for &h in &cfg.h_values {
            let s = build_schedule(&family, r, cfg.r_prime, h, &consts, &fp).with_context(|| format!("schedule r = {r}, h = {h}"))?;
            let rep = qubit_census(&s);
            let total_ok = BigRational::from_integer(BigInt::from(rep.max_total)) <= rep.total_bound;
            let cap_ok = (h as u64 >= p1).then(|| rep.ratio <= cap);
            let ok = rep.eta1_ok && rep.eta2_ok && total_ok && cap_ok.unwrap_or(true);
            if !ok {
                println!("FAIL r = {r}, h = {h}: η₁ {} η₂ {} total {} cap {:?}", rep.eta1_ok, rep.eta2_ok, total_ok, cap_ok);
            }
            passed &= ok;
            if let Some((hp, q)) = &last {
                if *hp < h && rep.ratio > *q {
                    non_increasing = false;
                }
            }
            last = Some((h, rep.ratio.clone()));
            let denom = (family.m(r) * h) as f64;
            for l in &rep.layers {
                layers.push(vec![
                    r.to_string(),
                    h.to_string(),
                    l.level.to_string(),
                    l.index.to_string(),
                    l.ec_qubits.to_string(),
                    l.gamma_qubits.to_string(),
                    l.total.to_string(),
                    float(l.total as f64 / denom),
                ]);
            }
            let ratio = rep.ratio_f64();
            pts.push((h as f64, ratio));
            rows.push(vec![
                r.to_string(),
                cfg.r_prime.to_string(),
                h.to_string(),
                rep.layers.len().to_string(),
                rep.max_ec.to_string(),
                rep.max_gamma.to_string(),
                rep.max_total.to_string(),
                float(rational_f64(&rep.total_bound)),
                float(rational_f64(&rep.eta1_bound)),
                float(rational_f64(&rep.eta2_bound)),
                rep.eta1_ok.to_string(),
                rep.eta2_ok.to_string(),
                total_ok.to_string(),
                float(ratio),
                cap_ok.map(|b| b.to_string()).unwrap_or_default(),
                float(rational_f64(&rep.total_bound) - rep.max_total as f64),
            ]);
        }
        println!("r = {r}: p₁ = {p1}, ratio non-increasing over the h grid: {non_increasing}");
        monotone.push((r, non_increasing));
        series.push(Series { name: format!("r = {r}"), points: pts, bars: vec![] });
    }
    out.write_csv(
        "audit.csv",
        &[
            "r",
            "r_prime",
            "h",
            "layers",
            "max_ec",
            "max_gamma",
            "max_total",
            "total_bound",
            "eta1_bound",
            "eta2_bound",
            "eta1_ok",
            "eta2_ok",
            "total_ok",
            "ratio",
            "ratio_cap_ok",
            "bound_margin",
        ],
        &rows,
    )?;
    out.write_csv("census.csv", &["r", "h", "level", "layer", "ec_qubits", "gamma_qubits", "total", "ratio"], &layers)?;
    out.write_json(
        "constants.json",
        &ConstantsOut {
            theta: consts.theta.to_string(),
            theta1: consts.theta1.to_string(),
            theta_prime: consts.theta_prime().to_string(),
            theta_f64: rational_f64(&consts.theta),
            theta1_f64: rational_f64(&consts.theta1),
            theta_prime_f64: rational_f64(&consts.theta_prime()),
            p1: consts.p1.clone(),
            ratio_non_increasing: monotone,
        },
    )?;
    out.write("audit.svg", loglog_svg("Peak qubits per logical qubit", "h", "max total / (m h)", &series).as_bytes())?;
    println!("overhead bounds {}", if passed { "hold" } else { "FAIL" });
    Ok(passed)
}

pub fn tree_bounds(cfg: &TreeConfig, out: &mut RunOutput) -> Result<bool> {
    let mut rows = Vec::new();
    let mut passed = true;
    let mut worst_dev: f64 = 0.0;
    for &z in &cfg.z_values {
        let sets = antichains(z, cfg.max_set_size, cfg.leaves_only);
        for &db in &cfg.delta_bars {
            let dbq = decimal_rational(db);
            let checked = check_final_bound(z, &dbq, &sets)?;
            let params = TreeParams::analytic(z, &dbq)?;
            let counts: HashMap<String, u64> = if cfg.mc_trials > 0 {
                out.seed(format!("z={z} delta_bar={}", float(db)), cfg.seed);
                let c = mc_inclusion(&params, &sets, cfg.mc_trials, cfg.seed)?;
                sets.iter().map(|s| s.descriptor()).zip(c).collect()
            } else {
                HashMap::new()
            };
            let exact_by_set: HashMap<String, f64> = sets
                .iter()
                .map(|s| Ok((s.descriptor(), rational_f64(&exact_inclusion(&params, s)?))))
                .collect::<Result<_>>()?;
            for row in &checked {
                passed &= row.holds;
                if !row.holds {
                    println!("FAIL z = {z}, δ̄ = {db}: {} ({:?})", row.set, row.kind);
                }
                let p = exact_by_set[&row.set];
                let (freq, dev) = match counts.get(&row.set) {
                    Some(&k) => {
                        let f = k as f64 / cfg.mc_trials as f64;
                        let s = binomial_sigma(p, cfg.mc_trials);
                        let dev = if s > 0.0 { (f - p) / s } else if f == p { 0.0 } else { f64::INFINITY };
                        worst_dev = worst_dev.max(dev.abs());
                        (Some(f), Some(dev))
                    }
                    None => (None, None),
                };
                rows.push(vec![
                    z.to_string(),
                    float(db),
                    row.set.clone(),
                    row.size.to_string(),
                    row.weight.to_string(),
                    match row.kind {
                        BoundKind::Leaf => "leaf",
                        BoundKind::NodeWeight => "node_weight",
                        BoundKind::Singleton => "singleton",
                    }
                    .into(),
                    float(row.exact_f64()),
                    float(row.bound_f64()),
                    opt_float(row.margin_log10()),
                    row.holds.to_string(),
                    opt_float(freq),
                    opt_float(dev),
                ]);
            }
        }
    }
    out.write_csv(
        "tree_bounds.csv",
        &[
            "z",
            "delta_bar",
            "set_descriptor",
            "size",
            "weight",
            "bound_kind",
            "exact_prob",
            "bound",
            "margin_log10",
            "holds",
            "mc_freq",
            "mc_sigma_dev",
        ],
        &rows,
    )?;
    println!("{} rows, bounds {}", rows.len(), if passed { "hold" } else { "FAIL" });
    if cfg.mc_trials > 0 {
        println!("largest sampled deviation: {worst_dev:.2}σ");
    }
    Ok(passed)
}

#[derive(Serialize)]
struct E2eSummary<'a> {
    family: &'a str,
    report: &'a ftinterface::scheduler::E2eReport,
    injections: Option<&'a ftinterface::scheduler::InjectionReport>,
}

pub fn e2e(cfg: &E2eCliConfig, src: &FamilySource, out: &mut RunOutput) -> Result<bool> {
    let family = src.load()?;
    let ec = E2eConfig {
        r: cfg.r,
        r_prime: cfg.r_prime,
        h: cfg.h,
        noise: NoiseParams { delta: cfg.delta, seed: cfg.seed, pauli_twirl: cfg.pauli_twirl },
        input_delta: cfg.input_delta,
        trials: cfg.trials,
        theta: cfg.theta,
        knobs: cfg.knobs.clone(),
    };
    out.seed("e2e", cfg.seed);
    let report = run_e2e(&family, &ec)?;
    println!(
        "{} trials over {} outputs: {} with an error, {} heralded; max Pr(q) = {:.4e}, max Pr(q,q') = {:.4e}",
        report.trials, report.outputs, report.any_error, report.heralded, report.single_max, report.pair_max
    );
    if let Some(k) = report.kappa1 {
        println!("κ₁ = {k:.4}");
    }
    let injections = if cfg.injections { Some(run_injections(&family, &ec)?) } else { None };
    let mut passed = true;
    if let Some(inj) = &injections {
        println!("{} injections, {} runs: {} logical failures, {} heralded", inj.injections, inj.runs, inj.logical_failures, inj.heralded);
        passed = inj.logical_failures == 0;
    }
    let rows: Vec<Vec<String>> =
        report.qubit_error.iter().enumerate().map(|(q, &p)| vec![q.to_string(), float(p)]).collect();
    out.write_csv("e2e.csv", &["output_qubit", "error_rate"], &rows)?;
    out.write_json("e2e_summary.json", &E2eSummary { family: &family.name, report: &report, injections: injections.as_ref() })?;
    Ok(passed)
}
