//! Plain recursive reference computations of the min-sum LLR recursion.
//!
//! These follow the textbook recursion directly and share no code with the
//! iterative array machinery in [`crate::pathstore`]; they are used to check
//! it during instrumented decoding and in tests.

use crate::kernel::{p_op, polar_transform, q_op, tau};

/// LLR vector of the node at `layer`, position `index`, given the input
/// symbols `u` of every phase preceding the node.
pub fn node_llrs(input: &[f64], u: &[u8], layer: usize, index: usize) -> Vec<f64> {
    if layer == 0 {
        return input.to_vec();
    }
    let parent = node_llrs(input, u, layer - 1, index >> 1);
    let half = parent.len() / 2;
    if index & 1 == 0 {
        (0..half).map(|i| q_op(parent[i], parent[i + half])).collect()
    } else {
        let m = input.len().trailing_zeros() as usize;
        let span = 1usize << (m - layer);
        let start = (index - 1) * span;
        let left = polar_transform(&u[start..start + span]).expect("power-of-two span");
        (0..half)
            .map(|i| p_op(left[i], parent[i], parent[i + half]))
            .collect()
    }
}

/// Per-phase SC penalties `τ(S_m^(i)(u_0^{i-1}), u_i)` along the path `u`.
pub fn sc_penalties(input: &[f64], u: &[u8]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len());
    walk(input, u, 0, &mut out);
    out
}

fn walk(s: &[f64], u: &[u8], start: usize, out: &mut Vec<f64>) -> Vec<u8> {
    let n = s.len();
    if n == 1 {
        out.push(tau(s[0], u[start]));
        return vec![u[start]];
    }
    let h = n / 2;
    let a: Vec<f64> = (0..h).map(|i| q_op(s[i], s[i + h])).collect();
    let left = walk(&a, u, start, out);
    let b: Vec<f64> = (0..h).map(|i| p_op(left[i], s[i], s[i + h])).collect();
    let right = walk(&b, u, start + h, out);
    let mut c: Vec<u8> = left.iter().zip(&right).map(|(x, y)| x ^ y).collect();
    c.extend_from_slice(&right);
    c
}
