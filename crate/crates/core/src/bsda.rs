//! Block sequential decoding.
//!
//! Paths are partial input vectors ending at a block boundary of the
//! decomposition tree. The best path (largest `R - Ψ`) is popped from a
//! bounded double-ended queue, extended by the most probable codeword of its
//! next block, and its current block is revisited on demand by cloning the
//! path with the next codeword from the outer decoder. A block may be visited
//! at most `L` times; the queue never holds more than `D` paths.
//!
//! The symbol-wise stack decoder is the same machine run on the tree whose
//! leaves all have length one, with the bias read at every phase.

use std::fmt;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::sc_sweep;
use crate::codespec::{CodeSpec, Crc};
use crate::decomposition::{build_tree, PDTree, TreePolicy};
use crate::depq::{Depq, ScoredEntry};
use crate::kernel::{polar_transform, polar_transform_in_place, transform_row, OpCount};
use crate::oracle::node_llrs;
use crate::outer::Emission;
use crate::pathstore::{ArrayBank, PathState};
use crate::sim::channel_llrs;
use crate::{Error, Result};

/// Expected accumulated penalty of the correct path, per phase.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasTable {
    values: Vec<f64>,
}

impl BiasTable {
    pub fn new(values: Vec<f64>) -> Self {
        BiasTable { values }
    }

    /// Table of length `n` that is zero except at the listed phases.
    pub fn sparse(n: usize, entries: &[(usize, f64)]) -> Self {
        let mut values = vec![0.0; n];
        for &(phi, v) in entries {
            values[phi] = v;
        }
        BiasTable { values }
    }

    pub fn zero(n: usize) -> Self {
        BiasTable { values: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, phi: usize) -> f64 {
        self.values[phi]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// One `<phase> <value>` line per phase.
    pub fn to_text(&self) -> String {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{i} {v:.9}\n"))
            .collect()
    }

    /// Parses the output of [`BiasTable::to_text`]; phases not listed are 0.
    pub fn from_text(s: &str, n: usize) -> Result<Self> {
        let mut values = vec![0.0; n];
        for (no, line) in s.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: no + 1, msg };
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(parse_err(format!("expected `<phase> <value>`, got {line:?}")));
            };
            let phi: usize = a.parse().map_err(|e| parse_err(format!("bad phase {a:?}: {e}")))?;
            let v: f64 = b.parse().map_err(|e| parse_err(format!("bad value {b:?}: {e}")))?;
            if phi >= n {
                return Err(parse_err(format!("phase {phi} out of range for n = {n}")));
            }
            values[phi] = v;
        }
        Ok(BiasTable { values })
    }

    pub fn load_file(path: impl AsRef<Path>, n: usize) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?, n)
    }

    pub fn save_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Monte-Carlo estimate of the bias: the all-zero codeword is sent over
/// BPSK/AWGN at `snr_db` (Eb/N0) and an SC sweep along the true path
/// accumulates penalties. By channel symmetry the all-zero word is enough.
pub fn estimate_bias(spec: &CodeSpec, snr_db: f64, samples: usize, seed: u64) -> Result<BiasTable> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is needed".into()));
    }
    let n = spec.n();
    let zero = vec![0u8; n];
    let mut bank = ArrayBank::new(spec.m(), 1, 2 * n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = OpCount::default();
    let mut sums = vec![0.0; n];
    for _ in 0..samples {
        let llrs = channel_llrs(&zero, snr_db, spec.rate(), &mut rng);
        let (_, pen) = sc_sweep(&mut bank, &llrs, |_, _, _| 0, &mut ops)?;
        let mut acc = 0.0;
        for (s, p) in sums.iter_mut().zip(pen) {
            acc += p;
            *s += acc;
        }
    }
    Ok(BiasTable::new(sums.into_iter().map(|s| s / samples as f64).collect()))
}

/// Parameters of the sequential decoders.
#[derive(Debug, Clone)]
pub struct DecoderConfig {
    /// Maximum number of visits of a block; also caps the codewords drawn
    /// from one outer decoder.
    pub list: usize,
    /// Queue capacity `D`.
    pub max_paths: usize,
    /// Per-pool capacity `Λ` in entries; `None` picks
    /// [`ArrayBank::default_capacity`].
    pub pool_capacity: Option<usize>,
    pub bias: BiasTable,
    /// Candidates whose information bits fail this CRC are discarded.
    pub crc: Option<Crc>,
    /// Checks reference counts and LLRs against the recursive oracle after
    /// every step and records pushed scores. Slow.
    pub instrument: bool,
    /// When a block's hard decision was accepted without running its outer
    /// decoder, score the clone with the bound `-d·min|S|` and construct its
    /// codeword only if the clone is popped. Off: construct it at once.
    pub estimate_clones: bool,
}

impl DecoderConfig {
    pub fn new(list: usize, max_paths: usize, bias: BiasTable) -> Self {
        DecoderConfig {
            list,
            max_paths,
            pool_capacity: None,
            bias,
            crc: None,
            instrument: false,
            estimate_clones: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeStatus {
    #[default]
    Ok,
    QueueEmpty,
    PoolExhausted,
    CrcFailed,
}

impl fmt::Display for DecodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecodeStatus::Ok => "ok",
            DecodeStatus::QueueEmpty => "queue-empty",
            DecodeStatus::PoolExhausted => "pool-exhausted",
            DecodeStatus::CrcFailed => "crc-failed",
        })
    }
}

/// Output of any decoder in the crate. Fields a decoder does not track stay
/// at their defaults.
#[derive(Debug, Clone, Default)]
pub struct DecodeResult {
    pub codeword: Vec<u8>,
    pub info: Vec<u8>,
    pub status: DecodeStatus,
    /// Main-loop passes (phases for SC/SCL).
    pub iterations: u64,
    /// LLR plus outer-decoder operations.
    pub ops: OpCount,
    /// LLR recursion operations only.
    pub llr_ops: OpCount,
    /// Key comparisons inside the priority queue.
    pub queue_ops: u64,
    /// Visits per block.
    pub visits: Vec<u32>,
    /// Scores in push order; recorded by instrumented decodes.
    pub pushed: Vec<f64>,
    /// Largest pool consumption in entries.
    pub peak_pool: usize,
    /// Sorted final path metrics (SCL).
    pub final_metrics: Vec<f64>,
    /// Largest deviation from the oracle LLRs (instrumented decodes).
    pub oracle_error: f64,
    pub bytes_copied: u64,
    /// `(block, LLRs)` of every forward pass (instrumented decodes).
    pub block_llrs: Vec<(usize, Vec<f64>)>,
}

impl DecodeResult {
    pub fn is_ok(&self) -> bool {
        self.status == DecodeStatus::Ok
    }
}

/// Dynamic frozen symbol bookkeeping of one block.
#[derive(Debug, Clone, Default)]
struct BlockPlan {
    /// `(constraint, row of A_μ at the local target)`.
    targets: Vec<(usize, Vec<u8>)>,
    /// `(local position, constraints whose support contains it)`.
    participants: Vec<(usize, Vec<u64>)>,
}

/// Reusable decoding context for one code and tree.
pub struct Bsda {
    spec: CodeSpec,
    tree: PDTree,
    config: DecoderConfig,
    plans: Vec<BlockPlan>,
    /// Bias at the end of each block.
    psi_bias: Vec<f64>,
    words: usize,
    bank: ArrayBank,
    queue: Depq,
    paths: Vec<PathState>,
    visits: Vec<u32>,
    input: Vec<f64>,
    llr_ops: OpCount,
    outer_ops: OpCount,
    pushed: Vec<f64>,
    block_llrs: Vec<(usize, Vec<f64>)>,
    oracle_error: f64,
}

impl fmt::Debug for Bsda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bsda")
            .field("n", &self.spec.n())
            .field("blocks", &self.tree.leaf_count())
            .field("list", &self.config.list)
            .field("max_paths", &self.config.max_paths)
            .finish()
    }
}

impl Bsda {
    pub fn new(spec: &CodeSpec, tree: PDTree, config: DecoderConfig) -> Result<Self> {
        if config.list == 0 {
            return Err(Error::InvalidArgument("L must be at least 1".into()));
        }
        if config.max_paths < 2 {
            return Err(Error::InvalidArgument("D must be at least 2".into()));
        }
        if config.bias.len() != spec.n() {
            return Err(Error::InvalidArgument(format!(
                "bias table has {} entries, expected {}",
                config.bias.len(),
                spec.n()
            )));
        }
        if tree.m() != spec.m() {
            return Err(Error::InvalidArgument("tree and code lengths differ".into()));
        }
        let dynamic: Vec<_> = spec.dynamic_constraints().collect();
        let words = dynamic.len().div_ceil(64);
        let mut plans = vec![BlockPlan::default(); tree.leaf_count()];
        for (psi, leaf) in tree.leaves().iter().enumerate() {
            let (a, b) = (leaf.start, leaf.start + leaf.len());
            let plan = &mut plans[psi];
            for (s, c) in dynamic.iter().enumerate() {
                if (a..b).contains(&c.target) {
                    if c.support.iter().any(|&j| j >= a) {
                        return Err(Error::Contract(format!(
                            "constraint on phase {} is not resolvable in block [{a},{b})",
                            c.target
                        )));
                    }
                    plan.targets.push((s, transform_row(leaf.mu, c.target - a)));
                }
            }
            for j in a..b {
                let mut mask = vec![0u64; words];
                let mut any = false;
                for (s, c) in dynamic.iter().enumerate() {
                    if c.support.binary_search(&j).is_ok() {
                        mask[s / 64] |= 1 << (s % 64);
                        any = true;
                    }
                }
                if any {
                    plan.participants.push((j - a, mask));
                }
            }
        }
        let psi_bias = tree.last_phases().iter().map(|&phi| config.bias.at(phi)).collect();
        let m = spec.m();
        let capacity = config
            .pool_capacity
            .unwrap_or_else(|| ArrayBank::default_capacity(m, config.max_paths, config.list));
        let blocks = tree.leaf_count();
        Ok(Bsda {
            spec: spec.clone(),
            bank: ArrayBank::new(m, config.max_paths, capacity),
            queue: Depq::new(config.max_paths),
            paths: vec![PathState::default(); config.max_paths],
            visits: vec![0; blocks],
            input: Vec::new(),
            llr_ops: OpCount::default(),
            outer_ops: OpCount::default(),
            pushed: Vec::new(),
            block_llrs: Vec::new(),
            oracle_error: 0.0,
            tree,
            config,
            plans,
            psi_bias,
            words,
        })
    }

    /// Symbol-by-symbol sequential decoder.
    pub fn sda(spec: &CodeSpec, config: DecoderConfig) -> Result<Self> {
        let tree = build_tree(spec, &TreePolicy::symbolwise());
        Self::new(spec, tree, config)
    }

    pub fn tree(&self) -> &PDTree {
        &self.tree
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    /// Decodes one frame of channel LLRs.
    pub fn decode(&mut self, llrs: &[f64]) -> Result<DecodeResult> {
        if llrs.len() != self.spec.n() {
            return Err(Error::InvalidArgument(format!(
                "expected {} LLRs, got {}",
                self.spec.n(),
                llrs.len()
            )));
        }
        self.bank.reset();
        self.queue.clear();
        self.visits.iter_mut().for_each(|q| *q = 0);
        self.llr_ops = OpCount::default();
        self.outer_ops = OpCount::default();
        self.pushed.clear();
        self.block_llrs.clear();
        self.oracle_error = 0.0;
        self.input = llrs.to_vec();
        let queue_before = self.queue.comparisons();

        let (status, codeword, info, iterations) = match self.run() {
            Ok(found) => found,
            Err(Error::PoolExhausted) => (DecodeStatus::PoolExhausted, Vec::new(), Vec::new(), 0),
            Err(e) => return Err(e),
        };
        let stats = self.bank.stats();
        let n = self.spec.n();
        let k = self.spec.k();
        let (codeword, info) = if codeword.is_empty() {
            (vec![0; n], vec![0; k])
        } else {
            (codeword, info)
        };
        for p in &mut self.paths {
            p.z = None;
        }
        Ok(DecodeResult {
            codeword,
            info,
            status,
            iterations,
            ops: OpCount {
                add: self.llr_ops.add + self.outer_ops.add,
                cmp: self.llr_ops.cmp + self.outer_ops.cmp,
            },
            llr_ops: self.llr_ops,
            queue_ops: self.queue.comparisons() - queue_before,
            visits: self.visits.clone(),
            pushed: std::mem::take(&mut self.pushed),
            block_llrs: std::mem::take(&mut self.block_llrs),
            peak_pool: stats.peak_phi,
            oracle_error: self.oracle_error,
            bytes_copied: stats.bytes_copied,
            ..DecodeResult::default()
        })
    }

    fn push(&mut self, l: usize, score: f64, block: usize) -> Result<()> {
        if self.config.instrument {
            self.pushed.push(score);
        }
        self.queue.push(ScoredEntry { score, path: l, block })
    }

    fn kill(&mut self, l: usize) -> Result<()> {
        self.paths[l] = PathState::default();
        self.bank.kill_path(l)
    }

    fn check(&self) -> Result<()> {
        if self.config.instrument {
            self.bank.check_refcounts()?;
        }
        Ok(())
    }

    /// Main loop; returns status, codeword, info bits and iteration count.
    #[allow(clippy::type_complexity)]
    fn run(&mut self) -> Result<(DecodeStatus, Vec<u8>, Vec<u8>, u64)> {
        let m = self.spec.m();
        let blocks = self.tree.leaf_count();
        let list = self.config.list as u32;
        let root = self.bank.assign_initial_path()?;
        self.bank.load_input(root, &self.input)?;
        self.paths[root] = PathState {
            w: vec![0; self.words],
            w_prev: vec![0; self.words],
            shadow_u: self.config.instrument.then(Vec::new),
            ..PathState::default()
        };
        self.queue.push(ScoredEntry { score: 0.0, path: root, block: 0 })?;
        let mut iterations = 0u64;
        let mut crc_rejected = false;
        loop {
            let Ok(top) = self.queue.pop_max() else {
                let status = if crc_rejected {
                    DecodeStatus::CrcFailed
                } else {
                    DecodeStatus::QueueEmpty
                };
                return Ok((status, Vec::new(), Vec::new(), iterations));
            };
            iterations += 1;
            let l = top.path;
            let psi = self.paths[l].psi;

            if self.paths[l].pending {
                let prev = &self.tree.leaves()[psi - 1];
                let (layer, r) = (prev.layer(m), prev.r());
                let mut z = self.paths[l].z.take().expect("pending path keeps its decoder");
                let em = match z.next(&prev.code, &mut self.outer_ops) {
                    Ok(em) => em,
                    Err(Error::Contract(_)) => {
                        self.kill(l)?;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                self.bank.c_write(l, layer, r)?.copy_from_slice(&em.codeword);
                let p = &mut self.paths[l];
                p.z = Some(z);
                p.pending = false;
                p.more = em.more;
                p.r = p.r_prev + em.e;
                p.w = p.w_prev.clone();
                self.prepare_df(l, psi - 1, &em.codeword);
                self.record_shadow(l, psi - 1, &em.codeword);
                let score = self.paths[l].r - self.psi_bias[psi - 1];
                if self.queue.peek_max().is_some_and(|t| score < t.score) {
                    self.push(l, score, psi)?;
                    continue;
                }
            }

            if psi >= 1 {
                let prev = &self.tree.leaves()[psi - 1];
                if prev.r() % 2 == 1 {
                    self.bank.update_c(l, prev.layer(m), prev.r())?;
                }
            }
            self.check()?;

            if psi == blocks {
                let codeword = self.bank.c_read(l, 0)?.to_vec();
                let mut u = codeword.clone();
                polar_transform_in_place(&mut u);
                debug_assert!(self.spec.input_satisfies(&u));
                let info = self.spec.info_from_input(&u);
                if let Some(crc) = &self.config.crc {
                    if !crc.check(&info) {
                        // the last block may still offer other codewords
                        crc_rejected = true;
                        if self.paths[l].more && self.visits[psi - 1] < list {
                            self.remove_bad_paths()?;
                            self.backward_pass(l)?;
                        }
                        self.kill(l)?;
                        continue;
                    }
                }
                return Ok((DecodeStatus::Ok, codeword, info, iterations));
            }

            if self.paths[l].more && psi >= 1 && self.visits[psi - 1] < list {
                self.remove_bad_paths()?;
                self.backward_pass(l)?;
                self.check()?;
            }

            let leaf = &self.tree.leaves()[psi];
            let (layer, r) = (leaf.layer(m), leaf.r());
            self.bank.calc_s(l, layer, r, &mut self.llr_ops)?;
            self.verify_llrs(l, psi)?;
            self.forward_pass(l)?;
            self.check()?;

            self.visits[psi] += 1;
            if self.visits[psi] >= list {
                let killed = self.queue.remove_if(|e| e.block <= psi + 1 && e.path != l);
                for e in killed {
                    self.kill(e.path)?;
                }
            }
        }
    }

    /// Trims the queue to `D - 2` entries, dropping the worst paths.
    fn remove_bad_paths(&mut self) -> Result<()> {
        while self.queue.len() + 2 > self.config.max_paths {
            let e = self.queue.pop_min()?;
            self.kill(e.path)?;
        }
        Ok(())
    }

    /// Coset representative of block `psi` for path `l`.
    fn coset(&self, l: usize, psi: usize) -> Vec<u8> {
        let w = &self.paths[l].w;
        let mut p = vec![0u8; self.tree.leaves()[psi].len()];
        for (s, row) in &self.plans[psi].targets {
            if w[s / 64] >> (s % 64) & 1 == 1 {
                p.iter_mut().zip(row).for_each(|(a, b)| *a ^= b);
            }
        }
        p
    }

    /// Folds the input symbols of the accepted codeword into the dynamic
    /// frozen symbol accumulators.
    fn prepare_df(&mut self, l: usize, psi: usize, codeword: &[u8]) {
        let plan = &self.plans[psi];
        if plan.participants.is_empty() {
            return;
        }
        let v = polar_transform(codeword).expect("leaf length is a power of two");
        let w = &mut self.paths[l].w;
        for (pos, mask) in &plan.participants {
            if v[*pos] == 1 {
                w.iter_mut().zip(mask).for_each(|(a, b)| *a ^= b);
            }
        }
    }

    fn forward_pass(&mut self, l: usize) -> Result<()> {
        let m = self.spec.m();
        let psi = self.paths[l].psi;
        let coset = self.coset(l, psi);
        let leaf = &self.tree.leaves()[psi];
        let (layer, r) = (leaf.layer(m), leaf.r());
        let s = self.bank.s_read(l, layer)?;
        if self.config.instrument {
            self.block_llrs.push((psi, s.to_vec()));
        }
        let cap = self.config.list;
        let (z, em): (_, Emission) = match leaf.code.shortcut(s, &coset, cap) {
            Some(found) => found,
            None => {
                let mut z = leaf.code.preprocess(s, &coset, cap, &mut self.outer_ops);
                let em = z.next(&leaf.code, &mut self.outer_ops)?;
                (z, em)
            }
        };
        self.bank.c_write(l, layer, r)?.copy_from_slice(&em.codeword);
        let p = &mut self.paths[l];
        p.r_prev = p.r;
        p.r += em.e;
        p.more = em.more;
        p.z = Some(z);
        p.w_prev = p.w.clone();
        let score = p.r - self.psi_bias[psi];
        self.prepare_df(l, psi, &em.codeword);
        self.record_shadow(l, psi, &em.codeword);
        self.paths[l].psi = psi + 1;
        self.push(l, score, psi + 1)
    }

    /// Clones `l` with the next codeword of its last block.
    fn backward_pass(&mut self, l: usize) -> Result<()> {
        let m = self.spec.m();
        let psi = self.paths[l].psi;
        let prev = &self.tree.leaves()[psi - 1];
        let (layer, r) = (prev.layer(m), prev.r());
        let mut z = self.paths[l].z.take().expect("a path with more codewords keeps its decoder");
        self.paths[l].more = false;
        let l2 = self.bank.clone_path(l)?;
        let src = &self.paths[l];
        let mut state = PathState {
            r_prev: src.r_prev,
            psi,
            w: src.w_prev.clone(),
            w_prev: src.w_prev.clone(),
            shadow_u: src.shadow_u.as_ref().map(|u| u[..prev.start].to_vec()),
            ..PathState::default()
        };
        if z.is_deferred() && self.config.estimate_clones {
            let e = z.estimate_next(&prev.code, &mut self.outer_ops);
            state.r = state.r_prev + e;
            state.pending = true;
            state.z = Some(z);
            self.paths[l2] = state;
        } else {
            let em = z.next(&prev.code, &mut self.outer_ops)?;
            self.bank.c_write(l2, layer, r)?.copy_from_slice(&em.codeword);
            state.r = state.r_prev + em.e;
            state.more = em.more;
            state.z = Some(z);
            self.paths[l2] = state;
            self.prepare_df(l2, psi - 1, &em.codeword);
            self.record_shadow(l2, psi - 1, &em.codeword);
        }
        let score = self.paths[l2].r - self.psi_bias[psi - 1];
        self.push(l2, score, psi)
    }

    fn record_shadow(&mut self, l: usize, psi: usize, codeword: &[u8]) {
        if let Some(u) = self.paths[l].shadow_u.as_mut() {
            let start = self.tree.leaves()[psi].start;
            u.truncate(start);
            u.extend(polar_transform(codeword).expect("power-of-two leaf"));
        }
    }

    fn verify_llrs(&mut self, l: usize, psi: usize) -> Result<()> {
        if !self.config.instrument {
            return Ok(());
        }
        let leaf = &self.tree.leaves()[psi];
        let layer = leaf.layer(self.spec.m());
        let u = self.paths[l].shadow_u.as_ref().expect("instrumented paths keep their input symbols");
        let want = node_llrs(&self.input, u, layer, leaf.r());
        let got = self.bank.s_read(l, layer)?;
        for (a, b) in got.iter().zip(&want) {
            self.oracle_error = self.oracle_error.max((a - b).abs());
        }
        Ok(())
    }
}

/// One-shot block sequential decoding.
pub fn decode(spec: &CodeSpec, tree: &PDTree, config: &DecoderConfig, llrs: &[f64]) -> Result<DecodeResult> {
    Bsda::new(spec, tree.clone(), config.clone())?.decode(llrs)
}

/// One-shot symbol-wise sequential decoding.
pub fn decode_sda(spec: &CodeSpec, config: &DecoderConfig, llrs: &[f64]) -> Result<DecodeResult> {
    Bsda::sda(spec, config.clone())?.decode(llrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{ml_decode, sc_decode};
    use crate::codespec::{construct_frozen_set, Constraint};
    use crate::kernel::ellipsoidal_weight;
    use rand::Rng;

    pub(crate) const EXAMPLE: [f64; 16] = [
        0.44, 7.46, 7.19, 2.82, 5.63, 9.78, 6.06, -0.12, -0.64, 9.38, 10.87, 13.0, 13.43, 9.43, 2.02, 13.2,
    ];

    fn polar16() -> CodeSpec {
        CodeSpec::polar(4, vec![0, 4, 8, 9, 10, 12]).unwrap()
    }

    fn example_config(list: usize, d: usize) -> DecoderConfig {
        let bias = BiasTable::sparse(16, &[(3, -0.47), (7, -0.52), (15, -0.56)]);
        let mut c = DecoderConfig::new(list, d, bias);
        c.instrument = true;
        c.estimate_clones = false;
        c
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 0.01 + 1e-9
    }

    #[test]
    fn example_trace() {
        let spec = polar16();
        let tree = build_tree(&spec, &TreePolicy::default());
        let res = decode(&spec, &tree, &example_config(2, 4), &EXAMPLE).unwrap();
        assert_eq!(res.status, DecodeStatus::Ok);
        assert_eq!(res.codeword, vec![0; 16]);
        assert_eq!(res.iterations, 5);
        // score = R - Ψ(φ) throughout; path 1 carries R = -0.56 into blocks 1 and 2
        let want = [0.47, -0.09, -2.42, -0.56 + 0.52, -0.56 - 0.2 + 0.56];
        assert_eq!(res.pushed.len(), want.len());
        assert!(res.pushed.iter().zip(&want).all(|(a, b)| close(*a, *b)), "{:?}", res.pushed);
        assert!(res.oracle_error < 1e-9);
        let blocks: Vec<usize> = res.block_llrs.iter().map(|b| b.0).collect();
        assert_eq!(blocks, vec![0, 1, 1, 2]);
        let printed: [&[f64]; 4] = [
            &[-0.44, 7.46, 2.02, -0.12],
            &[6.08, 16.89, 9.2, -2.94],
            &[5.19, 16.89, 9.2, 2.7],
            &[-0.2, 16.84, 18.05, 15.82, 19.06, 19.2, 8.08, 13.08],
        ];
        for ((_, got), want) in res.block_llrs.iter().zip(printed) {
            assert!(got.iter().zip(want).all(|(a, b)| close(*a, *b)), "{got:?}");
        }
    }

    #[test]
    fn noiseless_frames_never_backtrack() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 2..=7 {
            let n = 1 << m;
            let spec = CodeSpec::polar(m, construct_frozen_set(m, n / 2, 2.0)).unwrap();
            let tree = build_tree(&spec, &TreePolicy::default());
            let config = DecoderConfig::new(4, 16, BiasTable::zero(n));
            let mut dec = Bsda::new(&spec, tree, config).unwrap();
            let info: Vec<u8> = (0..spec.k()).map(|_| rng.gen_range(0..2)).collect();
            let c = spec.encode(&info).unwrap();
            let llrs: Vec<f64> = c.iter().map(|&b| if b == 0 { 3.0 } else { -3.0 }).collect();
            let res = dec.decode(&llrs).unwrap();
            assert_eq!(res.info, info);
            let blocks = dec.tree().leaf_count() as u64;
            assert_eq!(res.iterations, blocks + 1);
            assert!(res.llr_ops.total() as usize <= n * m);
        }
    }

    #[test]
    fn bias_file_round_trip() {
        let t = BiasTable::new(vec![0.0, -0.125, -1.5, -2.0]);
        assert_eq!(BiasTable::from_text(&t.to_text(), 4).unwrap(), t);
        assert!(BiasTable::from_text("9 1.0", 4).is_err());
        assert!(BiasTable::from_text("x 1.0", 4).is_err());
        assert_eq!(BiasTable::from_text("# c\n2 -1\n", 4).unwrap().at(2), -1.0);
    }

    #[test]
    fn bias_is_monotone_and_vanishes_without_noise() {
        let spec = polar16();
        let t = estimate_bias(&spec, 5.0, 2000, 1).unwrap();
        assert!(t.values().windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let quiet = estimate_bias(&spec, 60.0, 50, 1).unwrap();
        assert!(quiet.values().iter().all(|&v| v > -1e-9));
        assert!(estimate_bias(&spec, 5.0, 0, 1).is_err());
    }

    fn subcode(m: usize, k: usize, rng: &mut ChaCha8Rng) -> CodeSpec {
        let n = 1 << m;
        let frozen = construct_frozen_set(m, k, 2.0);
        let mut constraints = Vec::new();
        for &t in &frozen {
            let support: Vec<usize> = (0..t).filter(|j| !frozen.contains(j) && rng.gen_bool(0.4)).collect();
            if !support.is_empty() {
                constraints.push(Constraint { target: t, support });
            }
        }
        let s = CodeSpec::new(m, k, frozen, constraints).unwrap();
        assert_eq!(s.n(), n);
        s
    }

    #[test]
    fn dynamic_frozen_symbols_are_satisfied() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..20 {
            let m = 3 + trial % 4;
            let spec = subcode(m, (1 << m) / 2, &mut rng);
            let tree = build_tree(&spec, &TreePolicy::default());
            let mut config = DecoderConfig::new(8, 64, BiasTable::zero(spec.n()));
            config.instrument = true;
            let mut dec = Bsda::new(&spec, tree, config).unwrap();
            for _ in 0..20 {
                let info: Vec<u8> = (0..spec.k()).map(|_| rng.gen_range(0..2)).collect();
                let c = spec.encode(&info).unwrap();
                let llrs = channel_llrs(&c, 2.0, spec.rate(), &mut rng);
                let res = dec.decode(&llrs).unwrap();
                if res.is_ok() {
                    assert!(spec.is_codeword(&res.codeword));
                    assert_eq!(spec.encode(&res.info).unwrap(), res.codeword);
                }
                assert!(res.oracle_error < 1e-9);
                assert_eq!(res.bytes_copied, 0);
            }
        }
    }

    #[test]
    fn large_list_matches_ml() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut total = 0;
        let mut agree = 0;
        for (m, k) in [(3, 4), (4, 7), (4, 10)] {
            let spec = subcode(m, k, &mut rng);
            let n = spec.n();
            let bias = estimate_bias(&spec, 3.0, 2000, 5).unwrap();
            let list = 1 << k;
            let config = DecoderConfig::new(list, list * k, bias);
            let tree = build_tree(&spec, &TreePolicy::default());
            let mut dec = Bsda::new(&spec, tree, config).unwrap();
            for _ in 0..300 {
                let info: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2)).collect();
                let c = spec.encode(&info).unwrap();
                let llrs = channel_llrs(&c, 3.0, spec.rate(), &mut rng);
                let res = dec.decode(&llrs).unwrap();
                let (ml, e, _) = ml_decode(&spec, &llrs).unwrap();
                total += 1;
                if res.codeword == ml || ellipsoidal_weight(&res.codeword, &llrs).unwrap() == e {
                    agree += 1;
                }
                assert_eq!(res.codeword.len(), n);
            }
        }
        assert!(agree * 100 >= total * 99, "{agree}/{total}");
    }

    #[test]
    fn symbolwise_tree_equals_sda() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for m in 2..=5 {
            let spec = subcode(m, (1 << m) / 2, &mut rng);
            let bias = estimate_bias(&spec, 2.0, 500, 3).unwrap();
            let config = DecoderConfig::new(4, 32, bias);
            let mut a = Bsda::sda(&spec, config.clone()).unwrap();
            let tree = build_tree(&spec, &TreePolicy::parse("leaf=1").unwrap());
            let mut b = Bsda::new(&spec, tree, config).unwrap();
            for _ in 0..50 {
                let info: Vec<u8> = (0..spec.k()).map(|_| rng.gen_range(0..2)).collect();
                let c = spec.encode(&info).unwrap();
                let llrs = channel_llrs(&c, 2.0, spec.rate(), &mut rng);
                let x = a.decode(&llrs).unwrap();
                let y = b.decode(&llrs).unwrap();
                assert_eq!(x.codeword, y.codeword);
                assert_eq!(x.iterations, y.iterations);
            }
        }
    }

    #[test]
    fn sda_with_single_visit_follows_sc() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let spec = CodeSpec::polar(5, construct_frozen_set(5, 16, 2.0)).unwrap();
        let bias = estimate_bias(&spec, 2.0, 500, 3).unwrap();
        let mut dec = Bsda::sda(&spec, DecoderConfig::new(1, 8, bias)).unwrap();
        let mut checked = 0;
        for _ in 0..200 {
            let info: Vec<u8> = (0..16).map(|_| rng.gen_range(0..2)).collect();
            let c = spec.encode(&info).unwrap();
            let llrs = channel_llrs(&c, 2.0, spec.rate(), &mut rng);
            let res = dec.decode(&llrs).unwrap();
            if res.iterations == 33 {
                assert_eq!(res.codeword, sc_decode(&spec, &llrs).unwrap().codeword);
                checked += 1;
            }
        }
        assert!(checked > 100);
        let frozen_only = CodeSpec::polar(3, (0..8).collect()).unwrap();
        let mut dec = Bsda::sda(&frozen_only, DecoderConfig::new(2, 4, BiasTable::zero(8))).unwrap();
        let res = dec.decode(&[1.0, -2.0, 0.5, 0.1, -0.3, 2.0, 1.0, 1.0]).unwrap();
        assert_eq!(res.codeword, vec![0; 8]);
        assert_eq!(res.iterations, 9);
    }

    #[test]
    fn queue_and_visit_bounds_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let spec = CodeSpec::polar(6, construct_frozen_set(6, 32, 2.0)).unwrap();
        let bias = estimate_bias(&spec, 1.0, 500, 3).unwrap();
        let config = DecoderConfig::new(3, 6, bias);
        let tree = build_tree(&spec, &TreePolicy::default());
        let mut dec = Bsda::new(&spec, tree, config).unwrap();
        let blocks = dec.tree().leaf_count() as u64;
        for _ in 0..200 {
            let info: Vec<u8> = (0..32).map(|_| rng.gen_range(0..2)).collect();
            let c = spec.encode(&info).unwrap();
            let llrs = channel_llrs(&c, 0.5, spec.rate(), &mut rng);
            let res = dec.decode(&llrs).unwrap();
            assert!(res.visits.iter().all(|&q| q <= 3));
            assert!(res.iterations <= 3 * blocks + 1 + res.visits.len() as u64 * 3);
            assert!(res.llr_ops.total() <= 3 * 6 * 64);
        }
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        let spec = polar16();
        let tree = build_tree(&spec, &TreePolicy::default());
        assert!(Bsda::new(&spec, tree.clone(), DecoderConfig::new(0, 4, BiasTable::zero(16))).is_err());
        assert!(Bsda::new(&spec, tree.clone(), DecoderConfig::new(1, 1, BiasTable::zero(16))).is_err());
        assert!(Bsda::new(&spec, tree, DecoderConfig::new(1, 4, BiasTable::zero(8))).is_err());
        let mut dec = Bsda::sda(&spec, DecoderConfig::new(1, 4, BiasTable::zero(16))).unwrap();
        assert!(dec.decode(&[0.0; 8]).is_err());
    }
}
