//! Staged, constant-overhead decoding interface: schedule construction,
//! exact qubit accounting and per-block effective interfaces.
//!
//! Stage `r''` (from `r` down to `r' + 1`) holds `h^{(r'')} = k^{r−r''} h`
//! blocks at level `r''`, where `k = m_{r''}/m_{r''−1}`. Macro-layer `l`
//! applies Γ_{r'',r''−1} to the blocks in the window
//! `[(l−1) w, l w)`, with `w = ⌈h^{(r'')} / (θ p₁(m_{r''}))⌉`; blocks
//! before the window have already been lowered and their children are
//! error-corrected at level `r''−1`, blocks after it are error-corrected at
//! level `r''`.

pub mod plan;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::css::CodeFamily;
use crate::interface::{build_ec, build_gamma, labels, output_blocks, EcLayout, GammaKnobs, InterfaceError};

pub use plan::{build_plan, run_e2e, E2eConfig, E2eReport, ExecutablePlan, InjectionReport, run_injections};

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("h must be at least 1")]
    ZeroBlocks,
    #[error("need r ≥ r' ≥ 1 within the family depth {depth}; got r = {r}, r' = {r_prime}")]
    Levels { r: usize, r_prime: usize, depth: usize },
    #[error("constants cover {have} levels, level {need} requested")]
    MissingLevel { have: usize, need: usize },
    #[error("theta must be positive")]
    Theta,
    #[error("block {i} out of range for h = {h}")]
    Block { i: usize, h: usize },
    #[error(transparent)]
    Interface(#[from] InterfaceError),
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ceil_div_q(a: &BigRational, b: &BigRational) -> u64 {
    (a / b).ceil().to_integer().to_u64().expect("window fits in u64")
}

/// Measured qubit footprints and depths of the circuits the schedule uses, per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Footprints {
    pub m: Vec<u64>,
    /// Data plus ancilla qubits of one EC round at level `r` (index `r − 1`).
    pub ec: Vec<u64>,
    /// Depth of one EC round at level `r`.
    pub ec_round_depth: Vec<usize>,
    /// Peak qubits of Γ_{r,r−1} (index `r − 1`; zero at level 1).
    pub gamma: Vec<u64>,
    pub gamma_depth: Vec<usize>,
    /// Peak qubits and depth of Γ_{r,1} (zero at level 1).
    pub gamma_to_one: Vec<u64>,
    pub gamma_to_one_depth: Vec<usize>,
}

impl Footprints {
    /// Builds and compiles every circuit once to read off slot counts and depths.
    pub fn measure(family: &CodeFamily, knobs: &GammaKnobs) -> Result<Self, ScheduleError> {
        let depth = family.depth();
        let mut f = Footprints {
            m: Vec::new(),
            ec: Vec::new(),
            ec_round_depth: Vec::new(),
            gamma: Vec::new(),
            gamma_depth: Vec::new(),
            gamma_to_one: Vec::new(),
            gamma_to_one_depth: Vec::new(),
        };
        for r in 1..=depth {
            let code = family.level(r);
            f.m.push(code.m() as u64);
            let data = labels("d", code.n());
            let ec = build_ec(code, 1, &EcLayout { level: r, prefix: "", data: &data, proc_layers: knobs.proc_layers_for(family, r) });
            let k = ec.circuit.compile().map_err(InterfaceError::from)?;
            f.ec.push(k.num_qslots as u64);
            f.ec_round_depth.push(ec.round_depth);
            if r == 1 {
                f.gamma.push(0);
                f.gamma_depth.push(0);
                f.gamma_to_one.push(0);
                f.gamma_to_one_depth.push(0);
                continue;
            }
            for (target, qubits, depths) in [(r - 1, &mut f.gamma, &mut f.gamma_depth), (1, &mut f.gamma_to_one, &mut f.gamma_to_one_depth)] {
                let g = build_gamma(family, r, target, knobs)?;
                let k = g.circuit.compile().map_err(InterfaceError::from)?;
                qubits.push(k.num_qslots as u64);
                depths.push(g.circuit.depth());
            }
        }
        Ok(f)
    }
}

/// The accounting constants θ, θ₁, θ' and the p₁ table.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    pub theta: BigRational,
    /// `max_r (EC qubits at r) / m_r`.
    pub theta1: BigRational,
    /// `p₁(m_r)` per level (index `r − 1`), non-decreasing.
    pub p1: Vec<u64>,
}

impl Constants {
    /// Smallest θ₁ and p₁ making the footprints satisfy their per-block bounds for the given θ.
    pub fn from_footprints(fp: &Footprints, theta: BigRational) -> Result<Self, ScheduleError> {
        if theta <= BigRational::zero() {
            return Err(ScheduleError::Theta);
        }
        let theta1 = fp
            .ec
            .iter()
            .zip(&fp.m)
            .map(|(&e, &m)| BigRational::new(BigInt::from(e), BigInt::from(m)))
            .max()
            .unwrap_or_else(BigRational::one);
        let mut p1 = Vec::new();
        let mut running = 1u64;
        for (&g, &m) in fp.gamma.iter().zip(&fp.m) {
            let need = ceil_div_q(&int(g), &(&theta * int(m)));
            running = running.max(need);
            p1.push(running);
        }
        Ok(Self { theta, theta1, p1 })
    }

    /// `θ' = θ + θ₁`, so that `η₁ + η₂ ≤ θ p₁(m_r) m_r + θ' m_r h`.
    pub fn theta_prime(&self) -> BigRational {
        &self.theta + &self.theta1
    }

    fn p1_at(&self, r: usize) -> Result<u64, ScheduleError> {
        self.p1.get(r - 1).copied().ok_or(ScheduleError::MissingLevel { have: self.p1.len(), need: r })
    }
}

/// Block assignments of one macro-layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacroLayer {
    /// Level-`r''` blocks receiving Γ.
    pub gamma: Vec<usize>,
    /// Level-`r''` blocks receiving EC at level `r''`.
    pub ec_upper: Vec<usize>,
    /// Level-`(r''−1)` children receiving EC at level `r''−1`.
    pub ec_lower: Vec<usize>,
}

/// One stage lowering every block from level `level` to `level − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub level: usize,
    /// Blocks at `level` entering the stage.
    pub blocks: usize,
    /// Output blocks per Γ.
    pub fanout: usize,
    /// Window size `h_{r''}`.
    pub window: usize,
    /// Layers per macro-layer (the Γ depth).
    pub macro_depth: usize,
    pub layers: Vec<MacroLayer>,
}

/// Ξ^{[h]}_{r,r'} as a sequence of stages.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSchedule {
    pub r: usize,
    pub r_prime: usize,
    pub h: usize,
    pub stages: Vec<Stage>,
    pub constants: Constants,
    pub footprints: Footprints,
}

impl InterfaceSchedule {
    /// Layer count of the whole schedule.
    pub fn depth(&self) -> usize {
        self.stages.iter().map(|s| s.layers.len() * s.macro_depth).sum()
    }

    /// Number of blocks at level `r'` after the last stage.
    pub fn output_blocks(&self) -> usize {
        self.stages.last().map(|s| s.blocks * s.fanout).unwrap_or(self.h)
    }
}

/// Builds the stage and macro-layer structure. `r = r'` gives no stages.
pub fn build_schedule(
    family: &CodeFamily,
    r: usize,
    r_prime: usize,
    h: usize,
    constants: &Constants,
    footprints: &Footprints,
) -> Result<InterfaceSchedule, ScheduleError> {
    if h == 0 {
        return Err(ScheduleError::ZeroBlocks);
    }
    if !(r_prime >= 1 && r >= r_prime && r <= family.depth()) {
        return Err(ScheduleError::Levels { r, r_prime, depth: family.depth() });
    }
    let mut stages = Vec::new();
    let mut blocks = h;
    for level in ((r_prime + 1)..=r).rev() {
        let fanout = output_blocks(family, level, level - 1)?;
        let cap = &constants.theta * int(constants.p1_at(level)?);
        let window = ceil_div_q(&int(blocks as u64), &cap) as usize;
        let count = blocks.div_ceil(window);
        let layers = (0..count)
            .map(|l| {
                let lo = l * window;
                let hi = ((l + 1) * window).min(blocks);
                MacroLayer {
                    gamma: (lo..hi).collect(),
                    ec_upper: (hi..blocks).collect(),
                    ec_lower: (0..lo * fanout).collect(),
                }
            })
            .collect();
        let macro_depth = footprints.gamma_depth[level - 1];
        stages.push(Stage { level, blocks, fanout, window, macro_depth, layers });
        blocks *= fanout;
    }
    Ok(InterfaceSchedule { r, r_prime, h, stages, constants: constants.clone(), footprints: footprints.clone() })
}

/// Qubit census of one macro-layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerCensus {
    pub level: usize,
    pub index: usize,
    pub ec_qubits: u64,
    pub gamma_qubits: u64,
    pub total: u64,
}

/// Census over all macro-layers with the two overhead inequalities checked exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct OverheadReport {
    pub layers: Vec<LayerCensus>,
    pub max_ec: u64,
    pub max_gamma: u64,
    pub max_total: u64,
    /// `θ₁ h m_r`.
    pub eta1_bound: BigRational,
    /// `θ m_r h + θ p₁(m_r) m_r`.
    pub eta2_bound: BigRational,
    pub eta1_ok: bool,
    pub eta2_ok: bool,
    /// `max_total / (m_r h)`.
    pub ratio: BigRational,
    /// `θ p₁(m_r) m_r + θ' m_r h`.
    pub total_bound: BigRational,
    /// Qubits of the final parallel Γ_{r',1} layer, when composed.
    pub final_layer: Option<u64>,
    /// Sum of per-layer totals, final layer included.
    pub sum_total: u64,
    pub theta: BigRational,
    pub theta1: BigRational,
    pub theta_prime: BigRational,
    pub p1: Vec<u64>,
}

impl OverheadReport {
    pub fn ratio_f64(&self) -> f64 {
        self.ratio.to_f64().unwrap_or(f64::NAN)
    }
}

/// Exact qubit census of a schedule.
pub fn qubit_census(s: &InterfaceSchedule) -> OverheadReport {
    let fp = &s.footprints;
    let c = &s.constants;
    let mut layers = Vec::new();
    for st in &s.stages {
        let up = st.level - 1;
        for (index, ml) in st.layers.iter().enumerate() {
            let ec_qubits = ml.ec_upper.len() as u64 * fp.ec[up] + ml.ec_lower.len() as u64 * fp.ec[up - 1];
            let gamma_qubits = ml.gamma.len() as u64 * fp.gamma[up];
            layers.push(LayerCensus { level: st.level, index, ec_qubits, gamma_qubits, total: ec_qubits + gamma_qubits });
        }
    }
    let max_ec = layers.iter().map(|l| l.ec_qubits).max().unwrap_or(0);
    let max_gamma = layers.iter().map(|l| l.gamma_qubits).max().unwrap_or(0);
    let max_total = layers.iter().map(|l| l.total).max().unwrap_or(0);
    let mr = int(fp.m[s.r - 1]);
    let h = int(s.h as u64);
    let p1r = int(c.p1[s.r - 1]);
    let eta1_bound = &c.theta1 * &h * &mr;
    let eta2_bound = &c.theta * &mr * &h + &c.theta * &p1r * &mr;
    let total_bound = &c.theta * &p1r * &mr + c.theta_prime() * &mr * &h;
    OverheadReport {
        eta1_ok: layers.iter().all(|l| int(l.ec_qubits) <= eta1_bound),
        eta2_ok: layers.iter().all(|l| int(l.gamma_qubits) <= eta2_bound),
        ratio: int(max_total) / (&mr * &h),
        sum_total: layers.iter().map(|l| l.total).sum(),
        layers,
        max_ec,
        max_gamma,
        max_total,
        eta1_bound,
        eta2_bound,
        total_bound,
        final_layer: None,
        theta: c.theta.clone(),
        theta1: c.theta1.clone(),
        theta_prime: c.theta_prime(),
        p1: c.p1.clone(),
    }
}

/// Ξ^{[h]}_r: the schedule followed by parallel Γ_{r',1} on every output block.
#[derive(Debug, Clone, PartialEq)]
pub struct FullPlan {
    pub schedule: InterfaceSchedule,
    /// Number of parallel Γ_{r',1} in the last layer (zero when `r' = 1`).
    pub final_gammas: usize,
    pub final_depth: usize,
    pub census: OverheadReport,
}

/// Appends the final Γ_{r',1} layer and extends the census.
pub fn compose_full(s: &InterfaceSchedule) -> FullPlan {
    let mut census = qubit_census(s);
    let fp = &s.footprints;
    let (final_gammas, final_depth) = if s.r_prime > 1 { (s.output_blocks(), fp.gamma_to_one_depth[s.r_prime - 1]) } else { (0, 0) };
    let final_qubits = final_gammas as u64 * fp.gamma_to_one[s.r_prime - 1];
    if final_gammas > 0 {
        census.final_layer = Some(final_qubits);
        census.sum_total += final_qubits;
    }
    FullPlan { schedule: s.clone(), final_gammas, final_depth, census }
}

/// What happens to one descendant of a top block in one stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescendantStep {
    pub level: usize,
    /// Index of the descendant among the level's blocks.
    pub block: usize,
    /// 1-based macro-layer in which it receives Γ.
    pub position: usize,
    /// EC layers at level `level` before Γ: `(position − 1) · macro_depth`.
    pub pre_wait: usize,
    /// EC layers at level `level − 1` on its children after Γ: `(L − position) · macro_depth`.
    pub post_wait: usize,
}

/// The effective interface of one top block: its descendants' steps per stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectivePlan {
    pub block: usize,
    pub steps: Vec<Vec<DescendantStep>>,
    /// Layers from start to end; equals the schedule depth for every block.
    pub layers: usize,
}

/// Extracts block `i`'s effective interface from the schedule.
pub fn effective_interface(s: &InterfaceSchedule, i: usize) -> Result<EffectivePlan, ScheduleError> {
    if i >= s.h {
        return Err(ScheduleError::Block { i, h: s.h });
    }
    let mut steps = Vec::new();
    let mut lo = i;
    let mut hi = i + 1;
    let mut layers = 0;
    for st in &s.stages {
        let count = st.layers.len();
        let stage_steps = (lo..hi)
            .map(|b| {
                let position = b / st.window + 1;
                DescendantStep {
                    level: st.level,
                    block: b,
                    position,
                    pre_wait: (position - 1) * st.macro_depth,
                    post_wait: (count - position) * st.macro_depth,
                }
            })
            .collect();
        steps.push(stage_steps);
        layers += count * st.macro_depth;
        lo *= st.fanout;
        hi *= st.fanout;
    }
    Ok(EffectivePlan { block: i, steps, layers })
}

/// Rebuilds the macro-layer assignments from all effective plans.
pub fn reassemble(s: &InterfaceSchedule, plans: &[EffectivePlan]) -> Vec<Vec<MacroLayer>> {
    s.stages
        .iter()
        .enumerate()
        .map(|(si, st)| {
            let mut layers: Vec<MacroLayer> =
                (0..st.layers.len()).map(|_| MacroLayer { gamma: vec![], ec_upper: vec![], ec_lower: vec![] }).collect();
            for p in plans {
                for d in &p.steps[si] {
                    for (l, ml) in layers.iter_mut().enumerate() {
                        match (l + 1).cmp(&d.position) {
                            std::cmp::Ordering::Equal => ml.gamma.push(d.block),
                            std::cmp::Ordering::Less => ml.ec_upper.push(d.block),
                            std::cmp::Ordering::Greater => ml.ec_lower.extend(d.block * st.fanout..(d.block + 1) * st.fanout),
                        }
                    }
                }
            }
            for ml in &mut layers {
                ml.gamma.sort_unstable();
                ml.ec_upper.sort_unstable();
                ml.ec_lower.sort_unstable();
            }
            layers
        })
        .collect()
}
