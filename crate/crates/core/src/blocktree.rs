//! Block error patterns of the partial-interface tree.
//!
//! A lowering from level `r` to `r' = r − z` is pictured as a perfect binary
//! tree of depth `z − 1`: the root is the first Γ on a block, and a node at
//! depth `y` is one of the `2^y` interfaces Γ_{r−y, r−y−1} that follow. Each
//! node is in state 0 (success), 1 (fails on a valid input, probability
//! `τ_{r−y}`) or 2 (never got a valid input because an ancestor failed).
//!
//! Nodes are `(depth, path)` with the branch bits of `path` read from the most
//! significant end. Heap indices `2^depth − 1 + path` fit in a `u64` mask for
//! `z ≤ 6`, which bounds both the exact and the Monte Carlo routines.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::noise::{self, domain};

/// Largest `z` handled by the exact and mask-based routines.
pub const MAX_DEPTH: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("tree needs z >= 1")]
    ZeroDepth,
    #[error("z = {z} exceeds the cap of {max}")]
    DepthCap { z: usize, max: usize },
    #[error("tau at depth {depth} is {value}, not in [0, 1]")]
    Tau { depth: usize, value: String },
    #[error("node {node} is outside a tree with z = {z}")]
    OutOfRange { node: Node, z: usize },
    #[error("nodes {0} and {1} are in ancestor/descendant relation")]
    NotAntichain(Node, Node),
    #[error("f(v) needs at least two nodes")]
    Singleton,
    #[error("node {0} is not in the set")]
    NotInSet(Node),
}

/// A tree node: `path` holds `depth` branch bits, first branch most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Node {
    pub depth: usize,
    pub path: u64,
}

impl Node {
    pub const ROOT: Node = Node { depth: 0, path: 0 };

    pub fn new(depth: usize, path: u64) -> Self {
        Self { depth, path }
    }

    /// Node from its branch sequence `j_1, …, j_y`.
    pub fn from_branches(branches: &[u8]) -> Self {
        let path = branches.iter().fold(0u64, |p, &b| (p << 1) | u64::from(b & 1));
        Self { depth: branches.len(), path }
    }

    /// `v^{(−b)}`.
    pub fn ancestor(self, b: usize) -> Node {
        assert!(b <= self.depth, "ancestor above the root");
        Node { depth: self.depth - b, path: self.path >> b }
    }

    pub fn child(self, bit: u8) -> Node {
        Node { depth: self.depth + 1, path: (self.path << 1) | u64::from(bit & 1) }
    }

    /// Whether `self ∈ C(other)`: `other` is `self` or one of its ancestors.
    pub fn is_descendant_of(self, other: Node) -> bool {
        self.depth >= other.depth && self.path >> (self.depth - other.depth) == other.path
    }

    pub fn index(self) -> usize {
        (1usize << self.depth) - 1 + self.path as usize
    }

    fn valid_in(self, z: usize) -> bool {
        self.depth < z && self.path < (1u64 << self.depth)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("i")?;
        for k in (0..self.depth).rev() {
            write!(f, ".{}", (self.path >> k) & 1)?;
        }
        Ok(())
    }
}

/// All nodes at depth `y`.
pub fn level_nodes(y: usize) -> impl Iterator<Item = Node> {
    (0..1u64 << y).map(move |p| Node::new(y, p))
}

/// Failure probabilities per depth: `tau[y]` is `τ_{r−y}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    tau: Vec<BigRational>,
    tau_f64: Vec<f64>,
}

impl TreeParams {
    pub fn new(tau: Vec<BigRational>) -> Result<Self, TreeError> {
        if tau.is_empty() {
            return Err(TreeError::ZeroDepth);
        }
        for (depth, t) in tau.iter().enumerate() {
            if t < &BigRational::zero() || t > &BigRational::one() {
                return Err(TreeError::Tau { depth, value: t.to_string() });
            }
        }
        let tau_f64 = tau.iter().map(|t| t.to_f64().unwrap_or(0.0)).collect();
        Ok(Self { tau, tau_f64 })
    }

    /// Empirical rates, read as exact decimals.
    pub fn from_f64(tau: &[f64]) -> Result<Self, TreeError> {
        if let Some((depth, t)) = tau.iter().enumerate().find(|(_, t)| !(0.0..=1.0).contains(*t)) {
            return Err(TreeError::Tau { depth, value: t.to_string() });
        }
        Self::new(tau.iter().map(|&t| noise::decimal_rational(t)).collect())
    }

    /// `τ_{r−y} = δ̄^{2^{z−y}}`, the largest rates the doubly-exponential decay allows.
    pub fn analytic(z: usize, delta_bar: &BigRational) -> Result<Self, TreeError> {
        if z == 0 {
            return Err(TreeError::ZeroDepth);
        }
        if z > MAX_DEPTH {
            return Err(TreeError::DepthCap { z, max: MAX_DEPTH });
        }
        Self::new((0..z).map(|y| num::pow(delta_bar.clone(), 1usize << (z - y))).collect())
    }

    pub fn z(&self) -> usize {
        self.tau.len()
    }

    pub fn tau(&self, y: usize) -> &BigRational {
        &self.tau[y]
    }

    pub fn tau_f64(&self, y: usize) -> f64 {
        self.tau_f64[y]
    }

    pub fn leaf_depth(&self) -> usize {
        self.z() - 1
    }

    fn check_cap(&self) -> Result<(), TreeError> {
        if self.z() > MAX_DEPTH {
            return Err(TreeError::DepthCap { z: self.z(), max: MAX_DEPTH });
        }
        Ok(())
    }
}

/// An antichain `T̄` of nodes in a tree with given `z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeSet {
    z: usize,
    nodes: Vec<Node>,
}

impl NodeSet {
    pub fn new(z: usize, nodes: impl IntoIterator<Item = Node>) -> Result<Self, TreeError> {
        let nodes: Vec<Node> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if let Some(&node) = nodes.iter().find(|n| !n.valid_in(z)) {
            return Err(TreeError::OutOfRange { node, z });
        }
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                if a.is_descendant_of(b) || b.is_descendant_of(a) {
                    return Err(TreeError::NotAntichain(a, b));
                }
            }
        }
        Ok(Self { z, nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn all_leaves(&self) -> bool {
        self.nodes.iter().all(|n| n.depth + 1 == self.z)
    }

    pub fn contains(&self, v: Node) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    /// Heap-index mask; requires `z ≤ MAX_DEPTH`.
    pub fn mask(&self) -> u64 {
        self.nodes.iter().fold(0, |m, n| m | 1u64 << n.index())
    }

    /// `"i.0.1|i.1"`, or `"-"` for the empty set.
    pub fn descriptor(&self) -> String {
        if self.nodes.is_empty() {
            return "-".into();
        }
        self.nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("|")
    }
}

/// Sets `F_0, …, F_{z−1}` of fresh failures per depth.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockPattern {
    pub levels: Vec<BTreeSet<Node>>,
}

impl BlockPattern {
    pub fn empty(z: usize) -> Self {
        Self { levels: vec![BTreeSet::new(); z] }
    }

    /// No element of `F_y` has an ancestor in an earlier `F_{y'}`.
    pub fn is_valid(&self) -> bool {
        self.levels.iter().enumerate().all(|(y, fy)| {
            fy.iter().all(|v| {
                v.depth == y && (1..=y).all(|b| !self.levels[y - b].contains(&v.ancestor(b)))
            })
        })
    }
}

/// One sampled tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSample {
    /// `states[y][path]` in `{0, 1, 2}`.
    pub states: Vec<Vec<u8>>,
    pub pattern: BlockPattern,
    /// `F̄`: leaves in state 1 or 2.
    pub leaf_failures: BTreeSet<Node>,
}

/// Top-down sampling with the tree stream of `(seed, trial)`.
pub fn sample_tree(params: &TreeParams, seed: u64, trial: u64) -> TreeSample {
    let z = params.z();
    let mut rng = noise::stream(seed, domain::TREE, trial);
    let mut states: Vec<Vec<u8>> = Vec::with_capacity(z);
    let mut pattern = BlockPattern::empty(z);
    for y in 0..z {
        let tau = params.tau_f64(y);
        let row: Vec<u8> = (0..1usize << y)
            .map(|p| {
                let alive = y == 0 || states[y - 1][p >> 1] == 0;
                // Every node draws, alive or not, so trials stay aligned across parameters.
                let fail = rng.gen::<f64>() < tau;
                match (alive, fail) {
                    (false, _) => 2,
                    (true, true) => {
                        pattern.levels[y].insert(Node::new(y, p as u64));
                        1
                    }
                    (true, false) => 0,
                }
            })
            .collect();
        states.push(row);
    }
    let leaf_failures = states[z - 1]
        .iter()
        .enumerate()
        .filter(|(_, &s)| s != 0)
        .map(|(p, _)| Node::new(z - 1, p as u64))
        .collect();
    TreeSample { states, pattern, leaf_failures }
}

/// Mask of all nodes in state 1 or 2; requires `z ≤ MAX_DEPTH`.
fn sample_failure_mask(params: &TreeParams, seed: u64, trial: u64) -> u64 {
    let s = sample_tree(params, seed, trial);
    let mut mask = 0u64;
    for (y, row) in s.states.iter().enumerate() {
        for (p, &st) in row.iter().enumerate() {
            if st != 0 {
                mask |= 1u64 << Node::new(y, p as u64).index();
            }
        }
    }
    mask
}

/// `Pr(X_v ∈ {1, 2} ∀ v ∈ T̄)`, exactly.
///
/// With `q(v)` the probability that every node of `T̄` below `v` fails given
/// that `v`'s parent succeeded, `q(v) = τ_y + (1 − τ_y)·[v ∉ T̄]·∏ q(child)`,
/// and subtrees without nodes of `T̄` contribute 1.
pub fn exact_inclusion(params: &TreeParams, set: &NodeSet) -> Result<BigRational, TreeError> {
    params.check_cap()?;
    if set.z() != params.z() {
        if let Some(&node) = set.nodes().iter().find(|n| !n.valid_in(params.z())) {
            return Err(TreeError::OutOfRange { node, z: params.z() });
        }
    }
    Ok(inclusion_rec(params, set, Node::ROOT))
}

fn inclusion_rec(params: &TreeParams, set: &NodeSet, v: Node) -> BigRational {
    if !set.nodes().iter().any(|t| t.is_descendant_of(v)) {
        return BigRational::one();
    }
    let tau = params.tau(v.depth);
    let survive = if set.contains(v) || v.depth + 1 == params.z() {
        BigRational::zero()
    } else {
        inclusion_rec(params, set, v.child(0)) * inclusion_rec(params, set, v.child(1))
    };
    tau + (BigRational::one() - tau) * survive
}

/// `W(T̄) = Σ_{v ∈ T̄} 2^{z−1−y(v)}`.
pub fn node_weight(set: &NodeSet) -> u64 {
    set.nodes().iter().map(|v| 1u64 << (set.z() - 1 - v.depth)).sum()
}

/// Smallest `b > 0` such that `v^{(−b)}` has another element of `T̄` below it.
pub fn f_of_v(set: &NodeSet, v: Node) -> Result<usize, TreeError> {
    if set.len() < 2 {
        return Err(TreeError::Singleton);
    }
    if !set.contains(v) {
        return Err(TreeError::NotInSet(v));
    }
    let target = set.len() - 1;
    (1..=v.depth)
        .find(|&b| {
            let a = v.ancestor(b);
            set.nodes().iter().filter(|t| !t.is_descendant_of(a)).count() < target
        })
        .ok_or(TreeError::NotInSet(v))
}

/// `F_{y→y'}`: every node of `nodes` extended by all branch strings to depth `target`.
pub fn extension(nodes: &BTreeSet<Node>, target: usize) -> BTreeSet<Node> {
    nodes
        .iter()
        .filter(|v| v.depth <= target)
        .flat_map(|v| {
            let extra = target - v.depth;
            (0..1u64 << extra).map(move |s| Node::new(target, (v.path << extra) | s))
        })
        .collect()
}

/// Whether `(F_0, …, F_{z−1}) ▷ F̄`, i.e. `F̄ = ∪_y F_{y→z−1}`.
pub fn induces_partition(pattern: &BlockPattern, fbar: &BTreeSet<Node>) -> bool {
    let leaf = pattern.levels.len().saturating_sub(1);
    let union: BTreeSet<Node> = pattern.levels.iter().flat_map(|f| extension(f, leaf)).collect();
    &union == fbar
}

/// Chain-rule probability `Pr(F_0) ∏_y Pr(F_y | F_0, …, F_{y−1})`; zero for invalid patterns.
pub fn pattern_probability(params: &TreeParams, pattern: &BlockPattern) -> BigRational {
    if pattern.levels.len() != params.z() || !pattern.is_valid() {
        return BigRational::zero();
    }
    let mut p = BigRational::one();
    for (y, fy) in pattern.levels.iter().enumerate() {
        // Nodes at depth y whose ancestors all succeeded, before F_y is drawn.
        let dead: u64 = (0..y).map(|yp| (1u64 << (y - yp)) * pattern.levels[yp].len() as u64).sum();
        let alive = (1u64 << y) - dead;
        let k = fy.len() as u64;
        let tau = params.tau(y);
        p *= num::pow(BigRational::one() - tau, (alive - k) as usize) * num::pow(tau.clone(), k as usize);
    }
    p
}

/// Every block error pattern of a tree with given `z` (small `z` only).
pub fn enumerate_patterns(z: usize) -> Vec<BlockPattern> {
    let mut out = Vec::new();
    let mut cur = BlockPattern::empty(z);
    enumerate_rec(z, 0, &mut cur, &mut out);
    out
}

fn enumerate_rec(z: usize, y: usize, cur: &mut BlockPattern, out: &mut Vec<BlockPattern>) {
    if y == z {
        out.push(cur.clone());
        return;
    }
    let alive: Vec<Node> =
        level_nodes(y).filter(|v| (1..=y).all(|b| !cur.levels[y - b].contains(&v.ancestor(b)))).collect();
    for choice in 0..1u64 << alive.len() {
        cur.levels[y] = alive.iter().enumerate().filter(|(i, _)| choice >> i & 1 == 1).map(|(_, &v)| v).collect();
        enumerate_rec(z, y + 1, cur, out);
    }
    cur.levels[y].clear();
}

/// Antichains of size `1..=max_size` in a tree with given `z`, optionally leaves only.
pub fn antichains(z: usize, max_size: usize, leaves_only: bool) -> Vec<NodeSet> {
    let pool: Vec<Node> = if leaves_only {
        level_nodes(z - 1).collect()
    } else {
        (0..z).flat_map(level_nodes).collect()
    };
    let mut out = Vec::new();
    let mut cur = Vec::new();
    antichain_rec(&pool, 0, max_size, &mut cur, &mut |c: &[Node]| {
        out.push(NodeSet::new(z, c.iter().copied()).expect("built as an antichain"))
    });
    out
}

fn antichain_rec(pool: &[Node], start: usize, max: usize, cur: &mut Vec<Node>, emit: &mut dyn FnMut(&[Node])) {
    for i in start..pool.len() {
        let v = pool[i];
        if cur.iter().any(|&u| u.is_descendant_of(v) || v.is_descendant_of(u)) {
            continue;
        }
        cur.push(v);
        emit(cur);
        if cur.len() < max {
            antichain_rec(pool, i + 1, max, cur, emit);
        }
        cur.pop();
    }
}

/// Which upper bound a row is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    /// `(2δ̄)^{2|T̄|}` for leaf sets.
    Leaf,
    /// `4·4^{|T̄|}·δ̄^{2W(T̄)}`.
    NodeWeight,
    /// `2δ̄^{2^{z−y}}` for a single node at depth `y`.
    Singleton,
}

/// Closed-form bound of the given kind; `None` if it does not apply to `set`.
pub fn closed_form_bound(kind: BoundKind, z: usize, delta_bar: &BigRational, set: &NodeSet) -> Option<BigRational> {
    let two = BigRational::from_integer(BigInt::from(2));
    match kind {
        BoundKind::Leaf => set.all_leaves().then(|| num::pow(two * delta_bar, 2 * set.len())),
        BoundKind::NodeWeight => {
            let four = BigRational::from_integer(BigInt::from(4));
            Some(four.clone() * num::pow(four, set.len()) * num::pow(delta_bar.clone(), 2 * node_weight(set) as usize))
        }
        BoundKind::Singleton => {
            (set.len() == 1).then(|| two * num::pow(delta_bar.clone(), 1usize << (z - set.nodes()[0].depth)))
        }
    }
}

/// One checked set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub z: usize,
    pub delta_bar: f64,
    pub set: String,
    pub size: usize,
    pub weight: u64,
    pub kind: BoundKind,
    #[serde(skip)]
    pub exact: BigRational,
    #[serde(skip)]
    pub bound: BigRational,
    pub holds: bool,
}

impl BoundRow {
    pub fn exact_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(0.0)
    }

    pub fn bound_f64(&self) -> f64 {
        self.bound.to_f64().unwrap_or(0.0)
    }

    /// `log10(bound / exact)`; `None` when the probability is zero.
    pub fn margin_log10(&self) -> Option<f64> {
        if self.exact.is_zero() {
            return None;
        }
        log10_rational(&(&self.bound / &self.exact))
    }
}

/// `log10` of a positive rational without going through an underflowing `f64`.
pub fn log10_rational(x: &BigRational) -> Option<f64> {
    if x <= &BigRational::zero() {
        return None;
    }
    let digits = |n: &BigInt| n.to_string().trim_start_matches('-').len() as i64;
    let (n, d) = (x.numer(), x.denom());
    let shift = digits(n) - digits(d);
    let scaled = if shift >= 0 {
        x / BigRational::from_integer(num::pow(BigInt::from(10), shift as usize))
    } else {
        x * BigRational::from_integer(num::pow(BigInt::from(10), (-shift) as usize))
    };
    Some(scaled.to_f64()?.log10() + shift as f64)
}

/// Checks `exact_inclusion ≤ bound` for each set under `τ_{r−y} = δ̄^{2^{z−y}}`.
///
/// Leaf sets use the leaf bound, other sets the node-weight bound, and
/// singletons additionally the per-node bound.
pub fn check_final_bound(z: usize, delta_bar: &BigRational, sets: &[NodeSet]) -> Result<Vec<BoundRow>, TreeError> {
    let params = TreeParams::analytic(z, delta_bar)?;
    let mut rows = Vec::new();
    for set in sets {
        let exact = exact_inclusion(&params, set)?;
        let kinds: &[BoundKind] = match (set.all_leaves(), set.len() == 1) {
            (true, true) => &[BoundKind::Leaf, BoundKind::Singleton],
            (true, false) => &[BoundKind::Leaf],
            (false, true) => &[BoundKind::NodeWeight, BoundKind::Singleton],
            (false, false) => &[BoundKind::NodeWeight],
        };
        for &kind in kinds {
            let bound = closed_form_bound(kind, z, delta_bar, set).expect("kind applies");
            rows.push(BoundRow {
                z,
                delta_bar: delta_bar.to_f64().unwrap_or(0.0),
                set: set.descriptor(),
                size: set.len(),
                weight: node_weight(set),
                kind,
                holds: exact <= bound,
                exact: exact.clone(),
                bound,
            });
        }
    }
    Ok(rows)
}

/// Monte Carlo counts of `T̄ ⊆ failed nodes` for each set.
pub fn mc_inclusion(params: &TreeParams, sets: &[NodeSet], trials: u64, seed: u64) -> Result<Vec<u64>, TreeError> {
    params.check_cap()?;
    let masks: Vec<u64> = sets.iter().map(NodeSet::mask).collect();
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; masks.len()],
            |mut acc, t| {
                let f = sample_failure_mask(params, seed, t);
                for (c, &m) in acc.iter_mut().zip(&masks) {
                    *c += u64::from(f & m == m);
                }
                acc
            },
        )
        .reduce(|| vec![0u64; masks.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    Ok(counts)
}

/// Monte Carlo frequency of each pattern in `patterns`.
pub fn mc_pattern_counts(params: &TreeParams, patterns: &[BlockPattern], trials: u64, seed: u64) -> Vec<u64> {
    let index: std::collections::HashMap<&BlockPattern, usize> = patterns.iter().enumerate().map(|(i, p)| (p, i)).collect();
    (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; patterns.len()],
            |mut acc, t| {
                let s = sample_tree(params, seed, t);
                if let Some(&i) = index.get(&s.pattern) {
                    acc[i] += 1;
                }
                acc
            },
        )
        .reduce(|| vec![0u64; patterns.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn leaves(z: usize, paths: &[u64]) -> NodeSet {
        NodeSet::new(z, paths.iter().map(|&p| Node::new(z - 1, p))).unwrap()
    }

    /// Enumerates every joint draw of the per-node Bernoulli variables.
    fn brute_inclusion(params: &TreeParams, set: &NodeSet) -> BigRational {
        let z = params.z();
        let nodes: Vec<Node> = (0..z).flat_map(level_nodes).collect();
        let mut total = BigRational::zero();
        for draw in 0..1u64 << nodes.len() {
            let mut p = BigRational::one();
            for (i, v) in nodes.iter().enumerate() {
                let t = params.tau(v.depth);
                p *= if draw >> i & 1 == 1 { t.clone() } else { BigRational::one() - t };
            }
            // A node is failed iff some node on its root path drew a failure.
            let failed = |v: Node| (0..=v.depth).any(|b| draw >> v.ancestor(b).index() & 1 == 1);
            if set.nodes().iter().all(|&v| failed(v)) {
                total += p;
            }
        }
        total
    }

    #[test]
    fn node_navigation() {
        let v = Node::from_branches(&[0, 1, 0]);
        assert_eq!(v.to_string(), "i.0.1.0");
        assert_eq!(v.ancestor(2), Node::from_branches(&[0]));
        assert!(v.is_descendant_of(Node::ROOT));
        assert!(v.is_descendant_of(v));
        assert!(!v.is_descendant_of(Node::from_branches(&[1])));
        assert_eq!(Node::ROOT.index(), 0);
        assert_eq!(Node::new(2, 3).index(), 6);
    }

    #[test]
    fn node_set_rejects_relatives_and_strangers() {
        assert!(matches!(NodeSet::new(3, [Node::ROOT, Node::new(2, 1)]), Err(TreeError::NotAntichain(..))));
        assert!(matches!(NodeSet::new(2, [Node::new(2, 0)]), Err(TreeError::OutOfRange { .. })));
        assert!(NodeSet::new(3, [Node::new(1, 0), Node::new(2, 2)]).is_ok());
    }

    #[test]
    fn sampling_extremes() {
        let zero = TreeParams::new(vec![q(0, 1); 3]).unwrap();
        assert!(sample_tree(&zero, 1, 0).leaf_failures.is_empty());
        let root = TreeParams::new(vec![q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        let s = sample_tree(&root, 1, 0);
        assert_eq!(s.leaf_failures.len(), 4);
        assert_eq!(s.pattern.levels[0], BTreeSet::from([Node::ROOT]));
        assert!(s.states[1].iter().chain(&s.states[2]).all(|&x| x == 2));
    }

    #[test]
    fn sampled_patterns_are_valid_and_partition() {
        let params = TreeParams::from_f64(&[0.2, 0.3, 0.4, 0.3]).unwrap();
        for t in 0..100_000 {
            let s = sample_tree(&params, 5, t);
            assert!(s.pattern.is_valid());
            assert!(induces_partition(&s.pattern, &s.leaf_failures));
        }
    }

    #[test]
    fn exact_inclusion_examples() {
        let tr = q(3, 10);
        let p = TreeParams::new(vec![tr.clone()]).unwrap();
        assert_eq!(exact_inclusion(&p, &NodeSet::new(1, [Node::ROOT]).unwrap()).unwrap(), tr);
        let p = TreeParams::from_f64(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(exact_inclusion(&p, &NodeSet::new(3, []).unwrap()).unwrap(), BigRational::one());
        let sib = leaves(3, &[0, 1]);
        assert_eq!(exact_inclusion(&p, &sib).unwrap(), brute_inclusion(&p, &sib));
    }

    #[test]
    fn exact_inclusion_matches_brute_force_everywhere() {
        let p = TreeParams::from_f64(&[0.15, 0.25, 0.35]).unwrap();
        for set in antichains(3, 4, false) {
            assert_eq!(exact_inclusion(&p, &set).unwrap(), brute_inclusion(&p, &set), "{}", set.descriptor());
        }
    }

    #[test]
    fn exact_inclusion_depth_cap() {
        let p = TreeParams::from_f64(&[0.1; 7]).unwrap();
        assert_eq!(exact_inclusion(&p, &NodeSet::new(7, []).unwrap()), Err(TreeError::DepthCap { z: 7, max: 6 }));
    }

    #[test]
    fn node_weight_examples() {
        assert_eq!(node_weight(&NodeSet::new(4, [Node::ROOT]).unwrap()), 8);
        assert_eq!(node_weight(&leaves(4, &[0, 3, 5])), 3);
        assert_eq!(node_weight(&NodeSet::new(3, [Node::new(1, 0), Node::new(1, 1)]).unwrap()), 4);
    }

    #[test]
    fn node_weight_counts_covered_leaves() {
        for set in antichains(4, 3, false) {
            let covered = level_nodes(3).filter(|l| set.nodes().iter().any(|&v| l.is_descendant_of(v))).count();
            assert_eq!(node_weight(&set) as usize, covered);
        }
    }

    #[test]
    fn f_of_v_examples() {
        let v0 = Node::from_branches(&[0, 0, 0]);
        let t = NodeSet::new(4, [v0, Node::from_branches(&[0, 1, 0])]).unwrap();
        assert_eq!(f_of_v(&t, v0), Ok(2));
        assert_eq!(f_of_v(&leaves(3, &[2, 3]), Node::new(2, 2)), Ok(1));
        assert_eq!(f_of_v(&leaves(4, &[0, 7]), Node::new(3, 0)), Ok(3));
        assert_eq!(f_of_v(&leaves(4, &[0]), Node::new(3, 0)), Err(TreeError::Singleton));
        assert_eq!(f_of_v(&leaves(4, &[0, 7]), Node::new(3, 1)), Err(TreeError::NotInSet(Node::new(3, 1))));
    }

    #[test]
    fn extension_and_partition_examples() {
        let empty = BlockPattern::empty(3);
        assert!(induces_partition(&empty, &BTreeSet::new()));
        let mut root = BlockPattern::empty(3);
        root.levels[0].insert(Node::ROOT);
        assert!(induces_partition(&root, &level_nodes(2).collect()));
        let ext = extension(&BTreeSet::from([Node::new(1, 1)]), 3);
        assert_eq!(ext, (4..8).map(|p| Node::new(3, p)).collect());
    }

    #[test]
    fn pattern_probabilities_sum_to_one_and_reproduce_inclusion() {
        let p = TreeParams::from_f64(&[0.1, 0.2, 0.3]).unwrap();
        let pats = enumerate_patterns(3);
        let total: BigRational = pats.iter().map(|x| pattern_probability(&p, x)).sum();
        assert_eq!(total, BigRational::one());
        for set in antichains(3, 2, true) {
            let via_patterns: BigRational = pats
                .iter()
                .filter(|x| {
                    let fbar: BTreeSet<Node> = x.levels.iter().flat_map(|f| extension(f, 2)).collect();
                    set.nodes().iter().all(|v| fbar.contains(v))
                })
                .map(|x| pattern_probability(&p, x))
                .sum();
            assert_eq!(via_patterns, exact_inclusion(&p, &set).unwrap());
        }
    }

    #[test]
    fn invalid_pattern_has_zero_probability() {
        let p = TreeParams::from_f64(&[0.5, 0.5]).unwrap();
        let mut bad = BlockPattern::empty(2);
        bad.levels[0].insert(Node::ROOT);
        bad.levels[1].insert(Node::new(1, 0));
        assert!(!bad.is_valid());
        assert!(pattern_probability(&p, &bad).is_zero());
    }

    #[test]
    fn final_bound_examples() {
        let rows = check_final_bound(3, &q(1, 10), &antichains(3, 2, true)).unwrap();
        for r in rows.iter().filter(|r| r.kind == BoundKind::Leaf && r.size == 2) {
            assert_eq!(r.bound, q(16, 10_000));
            assert!(r.holds);
        }
        let zero = check_final_bound(3, &q(0, 1), &antichains(3, 3, false)).unwrap();
        assert!(zero.iter().all(|r| r.holds && r.exact.is_zero()));
        let single = check_final_bound(4, &q(1, 10), &[NodeSet::new(4, [Node::new(1, 1)]).unwrap()]).unwrap();
        let s = single.iter().find(|r| r.kind == BoundKind::Singleton).unwrap();
        assert_eq!(s.bound, q(2, 1) * num::pow(q(1, 10), 8));
        assert!(s.holds);
    }

    #[test]
    fn log10_of_tiny_rationals() {
        let x = num::pow(q(1, 10), 400);
        assert!((log10_rational(&x).unwrap() + 400.0).abs() < 1e-9);
        assert!((log10_rational(&q(3, 1)).unwrap() - 3f64.log10()).abs() < 1e-12);
        assert_eq!(log10_rational(&q(0, 1)), None);
    }

    #[test]
    fn monte_carlo_is_worker_independent() {
        let p = TreeParams::from_f64(&[0.2, 0.3, 0.4]).unwrap();
        let sets = antichains(3, 2, false);
        let a = mc_inclusion(&p, &sets, 5_000, 9).unwrap();
        let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| mc_inclusion(&p, &sets, 5_000, 9).unwrap());
        assert_eq!(a, b);
    }
}
