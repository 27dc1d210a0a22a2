//! Plotkin decomposition of a code into a tree of outer codes.
//!
//! A node of length `2^μ` starting at phase `start` with local frozen set `F`
//! splits into a left child of length `2^{μ-1}` with frozen set
//! `F ∩ [2^{μ-1}]` and a right child with `{j : j + 2^{μ-1} ∈ F}`. Splitting
//! stops at nodes whose local code has a dedicated decoder.

use std::fmt::Write;

use crate::codespec::CodeSpec;
use crate::outer::LeafCode;
use crate::{Error, Result};

/// Outer code families with dedicated list decoders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OuterKind {
    Rate0,
    /// Repetition code.
    Rep,
    /// Single parity check code.
    Spc,
    /// Two interleaved single parity check codes.
    Dpc,
    Rate1,
    /// First order Reed-Muller code.
    Rm1,
    /// `RM(1, μ-t)` with every symbol repeated `2^t` times.
    Rm1RepConcat { t: usize },
    /// Union of `2^extra.len()` cosets of `RM(1, μ)`; `extra` lists the
    /// additional unfrozen local indices whose rows give the representatives.
    Rm1Cosets { extra: Vec<usize> },
    /// Codes of dimension at most 2, decoded by enumeration.
    LowRateExhaustive,
}

impl OuterKind {
    pub fn name(&self) -> String {
        match self {
            OuterKind::Rate0 => "rate0".into(),
            OuterKind::Rep => "rep".into(),
            OuterKind::Spc => "spc".into(),
            OuterKind::Dpc => "dpc".into(),
            OuterKind::Rate1 => "rate1".into(),
            OuterKind::Rm1 => "rm1".into(),
            OuterKind::Rm1RepConcat { t } => format!("rm1rep(t={t})"),
            OuterKind::Rm1Cosets { extra } => format!("rm1cosets({})", 1 << extra.len()),
            OuterKind::LowRateExhaustive => "lowrate".into(),
        }
    }
}

/// Frozen sets of the two Plotkin components of a node of length `2·half`.
pub fn split(frozen: &[usize], half: usize) -> (Vec<usize>, Vec<usize>) {
    let f0 = frozen.iter().copied().filter(|&j| j < half).collect();
    let f1 = frozen.iter().filter(|&&j| j >= half).map(|&j| j - half).collect();
    (f0, f1)
}

/// Unfrozen local indices of `RM(1, μ)`: `n-1` and `n-1-2^i`.
pub(crate) fn rm1_unfrozen(mu: usize) -> Vec<usize> {
    let n = 1usize << mu;
    let mut u: Vec<usize> = (0..mu).map(|i| n - 1 - (1 << i)).collect();
    u.push(n - 1);
    u.sort_unstable();
    u
}

/// Classifies a local frozen pattern, allowing up to `max_extra` additional
/// unfrozen indices for coset unions of `RM(1, μ)`.
pub fn classify_with(frozen: &[usize], mu: usize, max_extra: usize) -> Option<OuterKind> {
    let n = 1usize << mu;
    let mut mask = vec![true; n];
    let mut unfrozen = Vec::new();
    let mut fr = frozen.to_vec();
    fr.sort_unstable();
    fr.dedup();
    for &f in &fr {
        if f < n {
            mask[f] = false;
        }
    }
    for (j, &free) in mask.iter().enumerate() {
        if free {
            unfrozen.push(j);
        }
    }
    let k = unfrozen.len();
    if k == 0 {
        return Some(OuterKind::Rate0);
    }
    if unfrozen == [n - 1] {
        return Some(OuterKind::Rep);
    }
    if k == n {
        return Some(OuterKind::Rate1);
    }
    if k == n - 1 && !mask[0] {
        return Some(OuterKind::Spc);
    }
    if mu >= 2 && k == n - 2 && !mask[0] && !mask[1] {
        return Some(OuterKind::Dpc);
    }
    if mu >= 1 && unfrozen == rm1_unfrozen(mu) {
        return Some(OuterKind::Rm1);
    }
    for t in 1..mu {
        let step = 1usize << t;
        let lifted: Vec<usize> = rm1_unfrozen(mu - t).iter().map(|&i| i * step + step - 1).collect();
        if unfrozen == lifted {
            return Some(OuterKind::Rm1RepConcat { t });
        }
    }
    if mu >= 2 && max_extra > 0 {
        let base = rm1_unfrozen(mu);
        if base.iter().all(|&i| mask[i]) {
            let extra: Vec<usize> = unfrozen.iter().copied().filter(|i| !base.contains(i)).collect();
            if (1..=max_extra.min(2)).contains(&extra.len()) {
                return Some(OuterKind::Rm1Cosets { extra });
            }
        }
    }
    if k <= 2 {
        return Some(OuterKind::LowRateExhaustive);
    }
    None
}

/// Classification with the default coset rule (unions of two cosets).
pub fn classify(frozen: &[usize], mu: usize) -> Option<OuterKind> {
    classify_with(frozen, mu, TreePolicy::default().max_coset_extras)
}

/// Caps controlling where the decomposition stops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePolicy {
    pub max_spc_len: usize,
    pub max_rate1_len: usize,
    pub max_rm1_len: usize,
    /// Extra unfrozen indices allowed on top of `RM(1, μ)`: 0 disables coset
    /// unions, 1 allows two cosets, 2 allows four.
    pub max_coset_extras: usize,
    /// Global cap on leaf length; 1 yields the symbol-by-symbol tree.
    pub max_leaf_len: Option<usize>,
}

impl Default for TreePolicy {
    fn default() -> Self {
        TreePolicy {
            max_spc_len: 64,
            max_rate1_len: 64,
            max_rm1_len: 128,
            max_coset_extras: 1,
            max_leaf_len: None,
        }
    }
}

impl TreePolicy {
    /// Every leaf has length 1.
    pub fn symbolwise() -> Self {
        TreePolicy {
            max_leaf_len: Some(1),
            ..TreePolicy::default()
        }
    }

    /// Parses comma-separated `key=value` overrides, e.g.
    /// `spc=32,rate1=16,rm1=64,cosets=2,leaf=1`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = TreePolicy::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("bad tree policy item {item:?}")))?;
            let v: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad tree policy value {value:?}")))?;
            match key.trim() {
                "spc" => p.max_spc_len = v,
                "rate1" => p.max_rate1_len = v,
                "rm1" => p.max_rm1_len = v,
                "cosets" => p.max_coset_extras = v.min(2),
                "leaf" => p.max_leaf_len = Some(v.max(1)),
                other => {
                    return Err(Error::InvalidArgument(format!("unknown tree policy key {other:?}")))
                }
            }
        }
        Ok(p)
    }

    fn admits(&self, kind: &OuterKind, len: usize) -> bool {
        if self.max_leaf_len.is_some_and(|cap| len > cap) {
            return false;
        }
        match kind {
            OuterKind::Spc | OuterKind::Dpc => len <= self.max_spc_len,
            OuterKind::Rate1 => len <= self.max_rate1_len,
            OuterKind::Rm1 | OuterKind::Rm1RepConcat { .. } | OuterKind::Rm1Cosets { .. } => {
                len <= self.max_rm1_len
            }
            OuterKind::Rate0 | OuterKind::Rep | OuterKind::LowRateExhaustive => true,
        }
    }
}

/// A node of the decomposition tree.
#[derive(Debug, Clone)]
pub struct Node {
    pub start: usize,
    pub mu: usize,
    pub depth: usize,
    /// Local frozen indices.
    pub frozen: Vec<usize>,
    pub kind: Option<OuterKind>,
    pub children: Option<(usize, usize)>,
}

impl Node {
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        1 << self.mu
    }

    pub fn end(&self) -> usize {
        self.start + self.len() - 1
    }

    pub fn dimension(&self) -> usize {
        self.len() - self.frozen.len()
    }
}

/// A leaf (block) of the tree.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub start: usize,
    pub mu: usize,
    pub code: LeafCode,
}

impl Leaf {
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        1 << self.mu
    }

    /// Last phase covered by the block.
    pub fn last_phase(&self) -> usize {
        self.start + self.len() - 1
    }

    /// Index of the block among the nodes of its layer.
    pub fn r(&self) -> usize {
        self.start >> self.mu
    }

    /// Layer `m - μ` holding the block's LLRs.
    pub fn layer(&self, m: usize) -> usize {
        m - self.mu
    }

    pub fn kind(&self) -> &OuterKind {
        self.code.kind()
    }
}

/// Plotkin decomposition tree with leaves numbered left to right.
#[derive(Debug, Clone)]
pub struct PDTree {
    m: usize,
    nodes: Vec<Node>,
    leaves: Vec<Leaf>,
}

impl PDTree {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Last phases `φ_ψ` of every block.
    pub fn last_phases(&self) -> Vec<usize> {
        self.leaves.iter().map(Leaf::last_phase).collect()
    }

    /// Indented listing of node ranges and kinds.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_node(0, &mut out);
        out
    }

    fn dump_node(&self, id: usize, out: &mut String) {
        let node = &self.nodes[id];
        let label = node.kind.as_ref().map_or("split".to_string(), OuterKind::name);
        let _ = writeln!(
            out,
            "{:indent$}[{},{}] ({},{}) {}",
            "",
            node.start,
            node.end(),
            node.len(),
            node.dimension(),
            label,
            indent = 2 * node.depth
        );
        if let Some((a, b)) = node.children {
            self.dump_node(a, out);
            self.dump_node(b, out);
        }
    }
}

/// True iff every constraint targeting a phase of `[start, start + len)` has
/// its whole support before `start`, so the block decodes in a fixed coset.
fn constraints_fit(spec: &CodeSpec, start: usize, len: usize) -> bool {
    spec.dynamic_constraints()
        .filter(|c| c.target >= start && c.target < start + len)
        .all(|c| c.support.last().is_none_or(|&j| j < start))
}

/// Decomposes `spec` under `policy`.
pub fn build_tree(spec: &CodeSpec, policy: &TreePolicy) -> PDTree {
    let m = spec.m();
    let mut tree = PDTree {
        m,
        nodes: Vec::new(),
        leaves: Vec::new(),
    };
    grow(spec, policy, &mut tree, 0, m, 0, spec.frozen().to_vec());
    tree
}

fn grow(
    spec: &CodeSpec,
    policy: &TreePolicy,
    tree: &mut PDTree,
    start: usize,
    mu: usize,
    depth: usize,
    frozen: Vec<usize>,
) -> usize {
    let len = 1usize << mu;
    let id = tree.nodes.len();
    let kind = classify_with(&frozen, mu, policy.max_coset_extras)
        .filter(|k| policy.admits(k, len) && constraints_fit(spec, start, len));
    let leaf_kind = if mu == 0 {
        Some(if frozen.is_empty() { OuterKind::Rate1 } else { OuterKind::Rate0 })
    } else {
        kind
    };
    tree.nodes.push(Node {
        start,
        mu,
        depth,
        frozen: frozen.clone(),
        kind: leaf_kind.clone(),
        children: None,
    });
    match leaf_kind {
        Some(kind) => {
            tree.leaves.push(Leaf {
                start,
                mu,
                code: LeafCode::new(kind, mu, &frozen),
            });
        }
        None => {
            let half = len / 2;
            let (f0, f1) = split(&frozen, half);
            let a = grow(spec, policy, tree, start, mu - 1, depth + 1, f0);
            let b = grow(spec, policy, tree, start + half, mu - 1, depth + 1, f1);
            tree.nodes[id].children = Some((a, b));
        }
    }
    id
}
