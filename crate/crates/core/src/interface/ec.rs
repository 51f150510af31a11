//! The error-correction gadget: repeated syndrome extraction with one
//! ancilla per check, a decoder call and a conditional Pauli correction.
//!
//! CNOTs of each sector are scheduled by a proper edge coloring of the
//! check/qubit incidence graph, so a sector takes as many layers as its
//! maximum degree. X checks are extracted before Z checks.

use std::collections::HashSet;

use crate::circuit::{Circuit, Gate};
use crate::css::CssCode;
use crate::gf2::BitMatrix;
use crate::pauli::Pauli;

/// Name of the decoder call emitted by the gadget; `params = [level]`.
pub const EC_CALL: &str = "ec";

/// Wire naming and timing for one gadget instance.
#[derive(Debug, Clone, Copy)]
pub struct EcLayout<'a> {
    /// Level tag passed to the decoder call.
    pub level: usize,
    /// Prefix for every wire the gadget creates.
    pub prefix: &'a str,
    /// Data wires, in code qubit order.
    pub data: &'a [String],
    /// Idle layers spent waiting for the decoder.
    pub proc_layers: usize,
}

/// An `s`-round error-correction circuit on one code block.
#[derive(Debug, Clone)]
pub struct EcGadget {
    pub circuit: Circuit,
    pub rounds: usize,
    /// Ancillas per round: one per row of `H_X` and of `H_Z`.
    pub ancillas: usize,
    /// Layers from ancilla initialization to measurement, inclusive.
    pub extraction_depth: usize,
    pub round_depth: usize,
    /// Classical wires carrying the decoder heralds, one per round.
    pub heralds: Vec<String>,
}

/// Wire labels `{prefix}{i}` for `i < n`.
pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Adds idle gates for every wire of `live` the layer does not touch.
pub(crate) fn with_idles(mut gates: Vec<Gate>, live: &[String]) -> Vec<Gate> {
    let used: HashSet<&str> = gates.iter().flat_map(|g| g.inputs.iter().map(String::as_str)).collect();
    let idles: Vec<Gate> = live.iter().filter(|q| !used.contains(q.as_str())).map(|q| Gate::idle(q)).collect();
    gates.extend(idles);
    gates
}

/// Builds `s` rounds of error correction on `layout.data`.
pub fn build_ec(code: &CssCode, s: usize, layout: &EcLayout<'_>) -> EcGadget {
    assert_eq!(layout.data.len(), code.n(), "data wires must match the block length");
    let data = layout.data;
    let mut circuit = Circuit::new(data.to_vec());
    let ancillas = code.hx().nrows() + code.hz().nrows();
    let mut heralds = Vec::new();
    if code.is_trivial() {
        for _ in 0..s {
            circuit.push_layer(with_idles(vec![], data));
        }
        let round_depth = usize::from(s > 0);
        return EcGadget { circuit, rounds: s, ancillas, extraction_depth: 0, round_depth, heralds };
    }
    let x_colors = edge_coloring(code.hx());
    let z_colors = edge_coloring(code.hz());
    let extraction_depth = x_colors.len() + z_colors.len() + 4;
    for round in 0..s {
        let p = format!("{}r{round}.", layout.prefix);
        let ax = labels(&format!("{p}ax"), code.hx().nrows());
        let az = labels(&format!("{p}az"), code.hz().nrows());
        let live: Vec<String> = data.iter().chain(&ax).chain(&az).cloned().collect();

        let inits = ax.iter().chain(&az).map(|a| Gate::init(a)).collect();
        circuit.push_layer(with_idles(inits, data));
        circuit.push_layer(with_idles(ax.iter().map(|a| Gate::h(a)).collect(), &live));
        for class in &x_colors {
            let gates = class.iter().map(|&(i, q)| Gate::cnot(&ax[i], &data[q])).collect();
            circuit.push_layer(with_idles(gates, &live));
        }
        for class in &z_colors {
            let gates = class.iter().map(|&(i, q)| Gate::cnot(&data[q], &az[i])).collect();
            circuit.push_layer(with_idles(gates, &live));
        }
        circuit.push_layer(with_idles(ax.iter().map(|a| Gate::h(a)).collect(), &live));
        let sx = labels(&format!("{p}sx"), ax.len());
        let sz = labels(&format!("{p}sz"), az.len());
        let meas = ax.iter().zip(&sx).chain(az.iter().zip(&sz)).map(|(a, m)| Gate::measure(a, m)).collect();
        circuit.push_layer(with_idles(meas, data));

        let herald = format!("{p}h");
        let cx = labels(&format!("{p}cx"), data.len());
        let cz = labels(&format!("{p}cz"), data.len());
        let mut outputs = vec![herald.clone()];
        outputs.extend(cx.iter().cloned());
        outputs.extend(cz.iter().cloned());
        circuit.push_call(EC_CALL, vec![layout.level], sx.iter().chain(&sz).cloned().collect(), outputs);
        heralds.push(herald);
        for _ in 0..layout.proc_layers {
            circuit.push_layer(with_idles(vec![], data));
        }
        circuit.push_layer(data.iter().zip(&cx).map(|(q, c)| Gate::if_pauli(Pauli::X, c, q)).collect());
        circuit.push_layer(data.iter().zip(&cz).map(|(q, c)| Gate::if_pauli(Pauli::Z, c, q)).collect());
    }
    let round_depth = extraction_depth + layout.proc_layers + 2;
    EcGadget { circuit, rounds: s, ancillas, extraction_depth, round_depth, heralds }
}

/// Proper edge coloring of the bipartite graph with an edge `(i, j)` per
/// nonzero entry, using exactly the maximum degree many colors (König).
/// Returns the color classes as `(row, column)` lists.
pub fn edge_coloring(h: &BitMatrix) -> Vec<Vec<(usize, usize)>> {
    let (rows, cols) = (h.nrows(), h.ncols());
    let edges: Vec<(usize, usize)> = (0..rows).flat_map(|i| h.row(i).ones().into_iter().map(move |j| (i, j))).collect();
    let mut deg_l = vec![0usize; rows];
    let mut deg_r = vec![0usize; cols];
    for &(i, j) in &edges {
        deg_l[i] += 1;
        deg_r[j] += 1;
    }
    let k = deg_l.iter().chain(&deg_r).copied().max().unwrap_or(0);
    // left[i][c] = right endpoint of the color-c edge at i, and symmetrically.
    let mut left = vec![vec![None::<usize>; k]; rows];
    let mut right = vec![vec![None::<usize>; k]; cols];
    for &(u, v) in &edges {
        let a = (0..k).find(|&c| left[u][c].is_none()).expect("degree bound");
        let b = (0..k).find(|&c| right[v][c].is_none()).expect("degree bound");
        if right[v][a].is_some() {
            // Swap colors a and b along the alternating path from v; it cannot reach u.
            let mut path = Vec::new();
            let (mut at_right, mut node, mut c) = (true, v, a);
            loop {
                let next = if at_right { right[node][c] } else { left[node][c] };
                let Some(w) = next else { break };
                path.push(if at_right { (w, node, c) } else { (node, w, c) });
                at_right = !at_right;
                node = w;
                c = if c == a { b } else { a };
            }
            for &(l, r, c) in &path {
                left[l][c] = None;
                right[r][c] = None;
            }
            for &(l, r, c) in &path {
                let nc = if c == a { b } else { a };
                left[l][nc] = Some(r);
                right[r][nc] = Some(l);
            }
        }
        left[u][a] = Some(v);
        right[v][a] = Some(u);
    }
    (0..k)
        .map(|c| (0..rows).filter_map(|i| left[i][c].map(|j| (i, j))).collect())
        .filter(|class: &Vec<(usize, usize)>| !class.is_empty())
        .collect()
}
