//! On-demand list decoders for outer codes.
//!
//! A decoder is prepared once per visit of a block ([`LeafCode::preprocess`]
//! or the cheaper [`LeafCode::shortcut`]) and then asked for codewords one at
//! a time through [`OuterState::next`], most probable first. Codewords are
//! searched in the coset selected by the dynamic frozen symbols: the LLRs are
//! sign-flipped by the coset representative `p` and every emitted word is
//! corrected by `p` before it is returned.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::decomposition::OuterKind;
use crate::kernel::{polar_transform_in_place, transform_row, OpCount};
use crate::{Error, Result};

/// Chase-II test patterns for odd hard-decision parity, as positions in the
/// reliability order.
const ODD_PATTERNS: [&[u8]; 22] = [
    &[0], &[1], &[2], &[3], &[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3], &[4], &[5], &[6], &[7],
    &[0, 1, 4], &[0, 1, 5], &[0, 1, 6], &[0, 2, 4], &[0, 3, 4], &[8], &[9], &[10], &[11], &[12],
];

/// Chase-II test patterns for even hard-decision parity.
const EVEN_PATTERNS: [&[u8]; 26] = [
    &[], &[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3], &[0, 1, 2, 3], &[0, 4], &[0, 5],
    &[0, 6], &[0, 7], &[1, 4], &[1, 5], &[1, 6], &[1, 7], &[2, 4], &[2, 5], &[2, 6], &[3, 4],
    &[3, 5], &[0, 1, 2, 4], &[0, 8], &[0, 9], &[0, 10], &[0, 11],
];

const RATE1_PATTERNS: [&[u8]; 5] = [&[], &[0], &[1], &[0, 1], &[2]];

/// Number of least reliable positions the Chase patterns refer to.
const CHASE_DEPTH: usize = 13;

fn chase_patterns(parity: u8) -> &'static [&'static [u8]] {
    if parity == 0 {
        &EVEN_PATTERNS
    } else {
        &ODD_PATTERNS
    }
}

fn valid_patterns(patterns: &[&[u8]], n: usize) -> usize {
    patterns.iter().filter(|p| p.iter().all(|&i| (i as usize) < n)).count()
}

/// One codeword produced by an outer decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    /// Codeword in the original (coset-corrected) domain.
    pub codeword: Vec<u8>,
    /// Ellipsoidal weight against the leaf LLRs, or an upper bound when
    /// `estimated` is set.
    pub e: f64,
    pub more: bool,
    pub estimated: bool,
}

/// Fast Hadamard transform in place: `x[a] ← Σ_j (-1)^{popcount(a & j)} x[j]`.
pub fn fht(x: &mut [f64], ops: &mut OpCount) {
    let n = x.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (x[j], x[j + h]);
                x[j] = a + b;
                x[j + h] = a - b;
            }
        }
        ops.add += n as u64;
        h *= 2;
    }
}

/// A classified leaf code with its precomputed decoding tables.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafCode {
    kind: OuterKind,
    mu: usize,
    frozen: Vec<usize>,
    frozen_mask: Vec<bool>,
    k: usize,
    d: usize,
    /// All codewords, for the kinds decoded by enumeration.
    words: Vec<Vec<u8>>,
    /// Coset representatives for the FHT kinds; a single zero word otherwise.
    reps: Vec<Vec<u8>>,
}

impl LeafCode {
    pub fn new(kind: OuterKind, mu: usize, frozen: &[usize]) -> Self {
        let n = 1usize << mu;
        let mut frozen_mask = vec![false; n];
        for &f in frozen {
            frozen_mask[f] = true;
        }
        let unfrozen: Vec<usize> = (0..n).filter(|&i| !frozen_mask[i]).collect();
        let k = unfrozen.len();
        let d = unfrozen.iter().map(|&i| 1usize << i.count_ones()).min().unwrap_or(n);
        let words = match kind {
            OuterKind::Rate0 | OuterKind::Rep | OuterKind::LowRateExhaustive => span(mu, &unfrozen),
            _ => Vec::new(),
        };
        let reps = match &kind {
            OuterKind::Rm1Cosets { extra } => {
                let rows: Vec<Vec<u8>> = extra.iter().map(|&i| transform_row(mu, i)).collect();
                span_of_rows(&rows, n)
            }
            _ => vec![vec![0; n]],
        };
        let mut frozen = frozen.to_vec();
        frozen.sort_unstable();
        LeafCode {
            kind,
            mu,
            frozen,
            frozen_mask,
            k,
            d,
            words,
            reps,
        }
    }

    pub fn kind(&self) -> &OuterKind {
        &self.kind
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn n(&self) -> usize {
        1 << self.mu
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Minimum distance, `min 2^{wt(i)}` over unfrozen local indices.
    pub fn min_distance(&self) -> usize {
        self.d
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    /// Membership test through the inverse transform.
    pub fn is_member(&self, c: &[u8]) -> bool {
        if c.len() != self.n() {
            return false;
        }
        let mut u = c.to_vec();
        polar_transform_in_place(&mut u);
        u.iter().zip(&self.frozen_mask).all(|(&b, &f)| !f || b == 0)
    }

    /// Cheap membership test used by the hard-decision shortcut.
    fn hard_member(&self, c: &[u8]) -> bool {
        let parity = |it: &mut dyn Iterator<Item = &u8>| it.fold(0u8, |a, &b| a ^ b);
        match self.kind {
            OuterKind::Rate0 => c.iter().all(|&b| b == 0),
            OuterKind::Rep => c.iter().all(|&b| b == c[0]),
            OuterKind::Rate1 => true,
            OuterKind::Spc => parity(&mut c.iter()) == 0,
            OuterKind::Dpc => parity(&mut c.iter().step_by(2)) == 0 && parity(&mut c.iter().skip(1).step_by(2)) == 0,
            _ => self.is_member(c),
        }
    }

    /// Number of distinct codewords the decoder can produce when the hard
    /// decision is a codeword.
    fn list_size_even(&self) -> usize {
        let n = self.n();
        match self.kind {
            OuterKind::Spc => valid_patterns(chase_patterns(0), n),
            OuterKind::Dpc => valid_patterns(chase_patterns(0), n / 2).pow(2),
            OuterKind::Rate1 => valid_patterns(&RATE1_PATTERNS, n),
            _ => 1usize.checked_shl(self.k as u32).unwrap_or(usize::MAX),
        }
    }

    fn adjust(&self, s: &[f64], coset: &[u8]) -> Vec<f64> {
        debug_assert_eq!(s.len(), self.n());
        s.iter()
            .zip(coset)
            .map(|(&x, &p)| if p & 1 == 1 { -x } else { x })
            .collect()
    }

    /// Builds the decoder state for LLRs `s` in the coset `coset`; at most
    /// `cap` codewords will be produced.
    pub fn preprocess(&self, s: &[f64], coset: &[u8], cap: usize, ops: &mut OpCount) -> OuterState {
        let adjusted = self.adjust(s, coset);
        let engine = self.build_engine(&adjusted, ops);
        let available = engine.available();
        OuterState {
            s: adjusted,
            coset: coset.to_vec(),
            limit: cap.max(1).min(available),
            emitted: 0,
            skip: None,
            engine,
        }
    }

    /// If the hard decision of the sign-adjusted LLRs is a codeword, returns it
    /// with weight 0 and a state whose preprocessing is deferred.
    pub fn shortcut(&self, s: &[f64], coset: &[u8], cap: usize) -> Option<(OuterState, Emission)> {
        let adjusted = self.adjust(s, coset);
        let hd: Vec<u8> = adjusted.iter().map(|&x| u8::from(x < 0.0)).collect();
        if !self.hard_member(&hd) {
            return None;
        }
        let limit = cap.max(1).min(self.list_size_even());
        let codeword = hd.iter().zip(coset).map(|(a, b)| a ^ b).collect();
        let state = OuterState {
            s: adjusted,
            coset: coset.to_vec(),
            limit,
            emitted: 1,
            skip: Some(hd),
            engine: Engine::Pending,
        };
        let more = state.has_more();
        Some((
            state,
            Emission {
                codeword,
                e: 0.0,
                more,
                estimated: false,
            },
        ))
    }

    fn build_engine(&self, s: &[f64], ops: &mut OpCount) -> Engine {
        let n = self.n();
        match &self.kind {
            OuterKind::Rate0 | OuterKind::Rep | OuterKind::LowRateExhaustive => {
                let mut list: Vec<(f64, usize)> = self
                    .words
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (weight_counted(w, s, ops), i))
                    .collect();
                sort_desc(&mut list, ops);
                Engine::List { list, pos: 0 }
            }
            OuterKind::Spc => Engine::Chase(Chase::new(s, chase_patterns, CHASE_DEPTH, ops)),
            OuterKind::Rate1 => Engine::Chase(Chase::new(s, |_| &RATE1_PATTERNS, 3, ops)),
            OuterKind::Dpc => {
                let even: Vec<f64> = s.iter().copied().step_by(2).collect();
                let odd: Vec<f64> = s.iter().copied().skip(1).step_by(2).collect();
                let even = Chase::new(&even, chase_patterns, CHASE_DEPTH, ops);
                let odd = Chase::new(&odd, chase_patterns, CHASE_DEPTH, ops);
                let mut frontier = BinaryHeap::new();
                frontier.push(Pair {
                    e: even.first_e + odd.first_e,
                    i: 0,
                    j: 0,
                });
                ops.add += 1;
                let mut seen = HashSet::new();
                seen.insert((0, 0));
                Engine::Dpc(Box::new(DpcState {
                    even,
                    odd,
                    frontier,
                    seen,
                }))
            }
            OuterKind::Rm1 | OuterKind::Rm1RepConcat { .. } | OuterKind::Rm1Cosets { .. } => {
                let t = match self.kind {
                    OuterKind::Rm1RepConcat { t } => t,
                    _ => 0,
                };
                let sum_abs = s.iter().fold(0.0, |acc, x| acc + x.abs());
                ops.add += n as u64;
                let tables = self
                    .reps
                    .iter()
                    .map(|rep| {
                        let mut folded = vec![0.0; n >> t];
                        for (j, (&x, &r)) in s.iter().zip(rep).enumerate() {
                            let x = if r == 1 { -x } else { x };
                            if j & ((1 << t) - 1) == 0 {
                                folded[j >> t] = x;
                            } else {
                                folded[j >> t] += x;
                                ops.add += 1;
                            }
                        }
                        fht(&mut folded, ops);
                        folded
                    })
                    .collect::<Vec<_>>();
                let used = tables.iter().map(|tb| vec![[false; 2]; tb.len()]).collect();
                Engine::Fht(FhtState {
                    tables,
                    used,
                    sum_abs,
                    t,
                })
            }
        }
    }

    fn fht_word(&self, t: usize, coset: usize, a: usize, sign: u8) -> Vec<u8> {
        let rep = &self.reps[coset];
        (0..self.n())
            .map(|j| (((a & (j >> t)).count_ones() & 1) as u8) ^ sign ^ rep[j])
            .collect()
    }

    /// Every codeword of the leaf code, for small codes.
    pub fn codewords(&self) -> Vec<Vec<u8>> {
        let unfrozen: Vec<usize> = (0..self.n()).filter(|&i| !self.frozen_mask[i]).collect();
        span(self.mu, &unfrozen)
    }
}

fn span(mu: usize, unfrozen: &[usize]) -> Vec<Vec<u8>> {
    let rows: Vec<Vec<u8>> = unfrozen.iter().map(|&i| transform_row(mu, i)).collect();
    span_of_rows(&rows, 1 << mu)
}

fn span_of_rows(rows: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    (0..1usize << rows.len())
        .map(|x| {
            let mut c = vec![0u8; n];
            for (b, row) in rows.iter().enumerate() {
                if x >> b & 1 == 1 {
                    c.iter_mut().zip(row).for_each(|(a, r)| *a ^= r);
                }
            }
            c
        })
        .collect()
}

fn weight_counted(c: &[u8], s: &[f64], ops: &mut OpCount) -> f64 {
    let mut e = 0.0;
    for (&b, &x) in c.iter().zip(s) {
        if u8::from(x < 0.0) != b {
            e -= x.abs();
            ops.add += 1;
        }
    }
    e
}

/// Stable descending sort by weight, counting comparisons.
fn sort_desc<T>(list: &mut [(f64, T)], ops: &mut OpCount) {
    let mut count = 0u64;
    list.sort_by(|a, b| {
        count += 1;
        b.0.total_cmp(&a.0)
    });
    ops.cmp += count;
}

/// Decoder state `Z` of one visit of a block.
#[derive(Debug, Clone)]
pub struct OuterState {
    s: Vec<f64>,
    coset: Vec<u8>,
    limit: usize,
    emitted: usize,
    /// Word already emitted by the shortcut, to be skipped once.
    skip: Option<Vec<u8>>,
    engine: Engine,
}

#[derive(Debug, Clone)]
enum Engine {
    /// Preprocessing deferred by the hard-decision shortcut.
    Pending,
    List {
        list: Vec<(f64, usize)>,
        pos: usize,
    },
    Chase(Chase),
    Dpc(Box<DpcState>),
    Fht(FhtState),
}

impl Engine {
    fn available(&self) -> usize {
        match self {
            Engine::Pending => 1,
            Engine::List { list, .. } => list.len(),
            Engine::Chase(c) => c.count(),
            Engine::Dpc(d) => d.even.count() * d.odd.count(),
            Engine::Fht(f) => f.tables.len() * f.tables[0].len() * 2,
        }
    }
}

/// Chase-II style candidate generator over the least reliable positions.
#[derive(Debug, Clone)]
struct Chase {
    hd: Vec<u8>,
    patterns: &'static [&'static [u8]],
    /// Least reliable positions, most unreliable first.
    order: Vec<usize>,
    mags: Vec<f64>,
    first_e: f64,
    /// Remaining candidates `(e, pattern index)`, sorted on first use.
    rest: Option<Vec<(f64, usize)>>,
    pos: usize,
}

impl Chase {
    fn new(s: &[f64], pick: fn(u8) -> &'static [&'static [u8]], depth: usize, ops: &mut OpCount) -> Self {
        let hd: Vec<u8> = s.iter().map(|&x| u8::from(x < 0.0)).collect();
        let parity = hd.iter().fold(0, |a, b| a ^ b);
        let patterns = pick(parity);
        let order = least_reliable(s, depth, ops);
        let mags: Vec<f64> = order.iter().map(|&i| s[i].abs()).collect();
        let first_e = -patterns[0].iter().map(|&i| mags[i as usize]).sum::<f64>();
        Chase {
            hd,
            patterns,
            order,
            mags,
            first_e,
            rest: None,
            pos: 0,
        }
    }

    fn valid(&self, p: &[u8]) -> bool {
        p.iter().all(|&i| (i as usize) < self.hd.len())
    }

    fn count(&self) -> usize {
        self.patterns.iter().filter(|p| self.valid(p)).count()
    }

    /// `i`-th best candidate as `(e, pattern index)`.
    fn get(&mut self, i: usize, ops: &mut OpCount) -> Option<(f64, usize)> {
        if i == 0 {
            return Some((self.first_e, 0));
        }
        if self.rest.is_none() {
            let mut rest: Vec<(f64, usize)> = Vec::new();
            for (idx, p) in self.patterns.iter().enumerate().skip(1) {
                if self.valid(p) {
                    let e = -p.iter().map(|&j| self.mags[j as usize]).sum::<f64>();
                    ops.add += p.len() as u64;
                    rest.push((e, idx));
                }
            }
            sort_desc(&mut rest, ops);
            self.rest = Some(rest);
        }
        self.rest.as_ref().and_then(|r| r.get(i - 1).copied())
    }

    fn word(&self, pattern: usize) -> Vec<u8> {
        let mut c = self.hd.clone();
        for &i in self.patterns[pattern] {
            c[self.order[i as usize]] ^= 1;
        }
        c
    }
}

/// Indices of the `depth` smallest `|s|`, sorted ascending (ties by index).
fn least_reliable(s: &[f64], depth: usize, ops: &mut OpCount) -> Vec<usize> {
    let mut count = 0u64;
    let mut idx: Vec<usize> = (0..s.len()).collect();
    let mut cmp = |a: &usize, b: &usize| {
        count += 1;
        s[*a].abs().total_cmp(&s[*b].abs()).then(a.cmp(b))
    };
    let depth = depth.min(s.len());
    if depth < s.len() {
        idx.select_nth_unstable_by(depth, &mut cmp);
        idx.truncate(depth);
    }
    idx.sort_unstable_by(&mut cmp);
    ops.cmp += count;
    idx
}

#[derive(Debug, Clone, PartialEq)]
struct Pair {
    e: f64,
    i: usize,
    j: usize,
}

impl Eq for Pair {}

impl Ord for Pair {
    fn cmp(&self, other: &Self) -> Ordering {
        self.e
            .total_cmp(&other.e)
            .then(self.i.cmp(&other.i))
            .then(other.j.cmp(&self.j))
    }
}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
struct DpcState {
    even: Chase,
    odd: Chase,
    frontier: BinaryHeap<Pair>,
    seen: HashSet<(usize, usize)>,
}

impl DpcState {
    fn pop(&mut self, ops: &mut OpCount) -> Option<(f64, Vec<u8>)> {
        let best = self.frontier.pop()?;
        ops.cmp += (self.frontier.len() + 1).ilog2() as u64;
        for (i, j) in [(best.i + 1, best.j), (best.i, best.j + 1)] {
            if self.seen.contains(&(i, j)) {
                continue;
            }
            let (Some(a), Some(b)) = (self.even.get(i, ops), self.odd.get(j, ops)) else {
                continue;
            };
            self.seen.insert((i, j));
            ops.add += 1;
            self.frontier.push(Pair { e: a.0 + b.0, i, j });
        }
        let a = self.even.get(best.i, ops)?;
        let b = self.odd.get(best.j, ops)?;
        let (we, wo) = (self.even.word(a.1), self.odd.word(b.1));
        let mut c = vec![0u8; we.len() + wo.len()];
        for (k, bit) in we.into_iter().enumerate() {
            c[2 * k] = bit;
        }
        for (k, bit) in wo.into_iter().enumerate() {
            c[2 * k + 1] = bit;
        }
        Some((best.e, c))
    }
}

#[derive(Debug, Clone)]
struct FhtState {
    tables: Vec<Vec<f64>>,
    used: Vec<Vec<[bool; 2]>>,
    sum_abs: f64,
    t: usize,
}

impl FhtState {
    /// Largest unused correlation as `(coset, index, sign, value)`.
    fn pop(&mut self, ops: &mut OpCount) -> Option<(usize, usize, u8, f64)> {
        let mut best: Option<(usize, usize, u8, f64)> = None;
        for (c, table) in self.tables.iter().enumerate() {
            for (a, &x) in table.iter().enumerate() {
                for sign in 0..2u8 {
                    if self.used[c][a][sign as usize] {
                        continue;
                    }
                    let v = if sign == 0 { x } else { -x };
                    ops.cmp += 1;
                    if best.is_none_or(|b| v > b.3) {
                        best = Some((c, a, sign, v));
                    }
                }
            }
        }
        if let Some((c, a, sign, _)) = best {
            self.used[c][a][sign as usize] = true;
        }
        best
    }
}

impl OuterState {
    /// Sign-adjusted LLRs of the block.
    pub fn llrs(&self) -> &[f64] {
        &self.s
    }

    pub fn coset(&self) -> &[u8] {
        &self.coset
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }

    pub fn has_more(&self) -> bool {
        self.emitted < self.limit
    }

    /// True while the shortcut has postponed preprocessing.
    pub fn is_deferred(&self) -> bool {
        matches!(self.engine, Engine::Pending)
    }

    /// Upper bound `-d·min|S|` on the weight of any codeword other than the
    /// hard decision.
    pub fn estimate_next(&self, code: &LeafCode, ops: &mut OpCount) -> f64 {
        let min = self.s.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        ops.cmp += self.s.len().saturating_sub(1) as u64;
        -(code.min_distance() as f64) * min
    }

    /// Produces the next most probable codeword.
    pub fn next(&mut self, code: &LeafCode, ops: &mut OpCount) -> Result<Emission> {
        if !self.has_more() {
            return Err(Error::Contract("outer decoder has no more codewords".into()));
        }
        if matches!(self.engine, Engine::Pending) {
            self.engine = code.build_engine(&self.s, ops);
            self.limit = self.limit.min(self.engine.available());
        }
        loop {
            let Some((e, word)) = self.raw_next(code, ops) else {
                return Err(Error::Contract("outer decoder exhausted".into()));
            };
            if self.skip.as_ref() == Some(&word) {
                self.skip = None;
                continue;
            }
            self.emitted += 1;
            let codeword = word.iter().zip(&self.coset).map(|(a, b)| a ^ b).collect();
            return Ok(Emission {
                codeword,
                e: e.min(0.0),
                more: self.has_more(),
                estimated: false,
            });
        }
    }

    fn raw_next(&mut self, code: &LeafCode, ops: &mut OpCount) -> Option<(f64, Vec<u8>)> {
        match &mut self.engine {
            Engine::Pending => None,
            Engine::List { list, pos } => {
                let (e, i) = *list.get(*pos)?;
                *pos += 1;
                Some((e, code.words[i].clone()))
            }
            Engine::Chase(ch) => {
                let (e, p) = ch.get(ch.pos, ops)?;
                ch.pos += 1;
                Some((e, ch.word(p)))
            }
            Engine::Dpc(d) => d.pop(ops),
            Engine::Fht(f) => {
                let (c, a, sign, v) = f.pop(ops)?;
                ops.add += 1;
                let e = (v - f.sum_abs) / 2.0;
                Some((e, code.fht_word(f.t, c, a, sign)))
            }
        }
    }
}
