//! Path bookkeeping with shared, reference-counted LLR (`S`) and partial-sum
//! (`C`) arrays.
//!
//! Every path maps each layer `λ` to one `S` array and one `C` array of
//! `2^{m-λ}` entries. Clones share arrays; a write access to a shared array
//! hands out a fresh one without copying, since the caller overwrites it
//! completely. Partial sums of a right child are stored inside the array of
//! the lowest ancestor layer reached by its run of trailing ones, at offset
//! `2^{m-λ}(2^δ - 1)`, so a layer needs `2^{m-λ}` bits instead of twice that.
//! Arrays are carved lazily from two growable pools; running past the pool
//! capacity aborts the decode.

use crate::kernel::{p_op, q_op, OpCount};
use crate::outer::OuterState;
use crate::{Error, Result};

const NONE: usize = usize::MAX;
const S: usize = 0;
const C: usize = 1;

/// One decoder hypothesis.
#[derive(Debug, Clone, Default)]
pub struct PathState {
    /// Accumulated penalty through the last decoded block.
    pub r: f64,
    /// Penalty before the last decoded block.
    pub r_prev: f64,
    /// Index of the next block to decode.
    pub psi: usize,
    /// More codewords are available for the last decoded block.
    pub more: bool,
    /// Outer decoder state of the last decoded block.
    pub z: Option<OuterState>,
    /// Dynamic frozen symbol accumulators.
    pub w: Vec<u64>,
    /// Accumulators before the last decoded block.
    pub w_prev: Vec<u64>,
    /// The last block's codeword is still an estimate awaiting construction.
    pub pending: bool,
    /// Input symbols decided so far; kept only by instrumented decodes.
    pub shadow_u: Option<Vec<u8>>,
}

/// Instrumentation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BankStats {
    pub allocations: u64,
    pub bytes_copied: u64,
    /// Largest pool consumption (entries) over both pools since the last reset.
    pub peak_phi: usize,
}

/// Shared array storage for up to `max_paths` live paths.
#[derive(Debug, Clone)]
pub struct ArrayBank {
    m: usize,
    max_paths: usize,
    capacity: usize,
    s_pool: Vec<f64>,
    c_pool: Vec<u8>,
    phi: [usize; 2],
    /// `(path, layer)` → array id, per kind.
    maps: [Vec<usize>; 2],
    refcount: [Vec<u32>; 2],
    /// Pool offset of each array id, `NONE` until first carved.
    offset: [Vec<usize>; 2],
    inactive: [Vec<Vec<usize>>; 2],
    free_paths: Vec<usize>,
    alive: Vec<bool>,
    stats: BankStats,
}

impl ArrayBank {
    /// `capacity` is the per-pool limit `Λ` in entries.
    pub fn new(m: usize, max_paths: usize, capacity: usize) -> Self {
        let ids = (m + 1) * max_paths;
        let mut bank = ArrayBank {
            m,
            max_paths,
            capacity,
            s_pool: Vec::new(),
            c_pool: Vec::new(),
            phi: [0; 2],
            maps: [vec![NONE; ids], vec![NONE; ids]],
            refcount: [vec![0; ids], vec![0; ids]],
            offset: [vec![NONE; ids], vec![NONE; ids]],
            inactive: [Vec::new(), Vec::new()],
            free_paths: Vec::new(),
            alive: vec![false; max_paths],
            stats: BankStats::default(),
        };
        bank.reset();
        bank
    }

    /// Default pool capacity `min(D, 4L)·2n`.
    pub fn default_capacity(m: usize, max_paths: usize, list: usize) -> usize {
        max_paths.min(4 * list).max(1) * 2 * (1 << m)
    }

    /// Drops every path and rewinds the pools.
    pub fn reset(&mut self) {
        for kind in [S, C] {
            self.maps[kind].fill(NONE);
            self.refcount[kind].fill(0);
            self.offset[kind].fill(NONE);
            self.inactive[kind] = (0..=self.m)
                .map(|layer| (0..self.max_paths).rev().map(|t| layer * self.max_paths + t).collect())
                .collect();
        }
        self.phi = [0; 2];
        self.free_paths = (0..self.max_paths).rev().collect();
        self.alive.fill(false);
        self.stats = BankStats::default();
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_paths(&self) -> usize {
        self.max_paths
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn stats(&self) -> BankStats {
        self.stats
    }

    /// Current consumption of the `S` and `C` pools.
    pub fn phi(&self) -> (usize, usize) {
        (self.phi[S], self.phi[C])
    }

    pub fn is_alive(&self, l: usize) -> bool {
        self.alive.get(l).copied().unwrap_or(false)
    }

    pub fn live_paths(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Entries of an array at `layer`; the same for `S` and `C`.
    pub fn array_len(&self, layer: usize) -> usize {
        1 << (self.m - layer)
    }

    pub fn assign_initial_path(&mut self) -> Result<usize> {
        let l = self
            .free_paths
            .pop()
            .ok_or_else(|| Error::Contract("path table full".into()))?;
        self.alive[l] = true;
        Ok(l)
    }

    /// New path sharing every array of `l`.
    pub fn clone_path(&mut self, l: usize) -> Result<usize> {
        self.check_alive(l)?;
        let l2 = self.assign_initial_path()?;
        for kind in [S, C] {
            for layer in 0..=self.m {
                let p = self.maps[kind][l * (self.m + 1) + layer];
                self.maps[kind][l2 * (self.m + 1) + layer] = p;
                if p != NONE {
                    self.refcount[kind][p] += 1;
                }
            }
        }
        Ok(l2)
    }

    pub fn kill_path(&mut self, l: usize) -> Result<()> {
        self.check_alive(l)?;
        for kind in [S, C] {
            for layer in 0..=self.m {
                let slot = l * (self.m + 1) + layer;
                let p = self.maps[kind][slot];
                if p != NONE {
                    self.release(kind, p);
                    self.maps[kind][slot] = NONE;
                }
            }
        }
        self.alive[l] = false;
        self.free_paths.push(l);
        Ok(())
    }

    fn check_alive(&self, l: usize) -> Result<()> {
        if self.is_alive(l) {
            Ok(())
        } else {
            Err(Error::Contract(format!("path {l} is not alive")))
        }
    }

    fn release(&mut self, kind: usize, p: usize) {
        self.refcount[kind][p] -= 1;
        if self.refcount[kind][p] == 0 {
            self.inactive[kind][p / self.max_paths].push(p);
        }
    }

    /// Takes an inactive array of `layer`, carving pool space on first use.
    pub fn allocate(&mut self, kind_is_c: bool, layer: usize) -> Result<usize> {
        let kind = usize::from(kind_is_c);
        let p = self.inactive[kind][layer]
            .pop()
            .ok_or_else(|| Error::Contract(format!("no inactive array at layer {layer}")))?;
        if self.offset[kind][p] == NONE {
            let size = self.array_len(layer);
            if self.phi[kind] + size > self.capacity {
                self.inactive[kind][layer].push(p);
                return Err(Error::PoolExhausted);
            }
            self.offset[kind][p] = self.phi[kind];
            self.phi[kind] += size;
            let needed = self.phi[kind];
            if kind == S {
                if self.s_pool.len() < needed {
                    self.s_pool.resize(needed, 0.0);
                }
            } else if self.c_pool.len() < needed {
                self.c_pool.resize(needed, 0);
            }
            self.stats.peak_phi = self.stats.peak_phi.max(self.phi[kind]);
        }
        self.stats.allocations += 1;
        Ok(p)
    }

    fn mapped(&self, kind: usize, l: usize, layer: usize) -> Result<usize> {
        let p = self.maps[kind][l * (self.m + 1) + layer];
        if p == NONE {
            return Err(Error::Contract(format!("path {l} has no array at layer {layer}")));
        }
        Ok(self.offset[kind][p])
    }

    /// Write access: exclusive arrays are returned as they are, anything else
    /// is replaced by a fresh array whose contents are unspecified.
    fn write_offset(&mut self, kind: usize, l: usize, layer: usize) -> Result<usize> {
        self.check_alive(l)?;
        let slot = l * (self.m + 1) + layer;
        let p = self.maps[kind][slot];
        if p != NONE {
            if self.refcount[kind][p] == 1 {
                return Ok(self.offset[kind][p]);
            }
            self.refcount[kind][p] -= 1;
            self.maps[kind][slot] = NONE;
        }
        let q = self.allocate(kind == C, layer)?;
        self.maps[kind][slot] = q;
        self.refcount[kind][q] = 1;
        Ok(self.offset[kind][q])
    }

    pub fn s_read(&self, l: usize, layer: usize) -> Result<&[f64]> {
        let off = self.mapped(S, l, layer)?;
        Ok(&self.s_pool[off..off + self.array_len(layer)])
    }

    pub fn c_read(&self, l: usize, layer: usize) -> Result<&[u8]> {
        let off = self.mapped(C, l, layer)?;
        Ok(&self.c_pool[off..off + self.array_len(layer)])
    }

    pub fn s_write(&mut self, l: usize, layer: usize) -> Result<&mut [f64]> {
        let off = self.write_offset(S, l, layer)?;
        let len = self.array_len(layer);
        Ok(&mut self.s_pool[off..off + len])
    }

    /// Array id currently mapped for `S` (`c = false`) or `C` at `(l, layer)`.
    pub fn array_id(&self, c: bool, l: usize, layer: usize) -> Option<usize> {
        let p = self.maps[usize::from(c)][l * (self.m + 1) + layer];
        (p != NONE).then_some(p)
    }

    /// Reference count of an array id.
    pub fn refcount(&self, c: bool, id: usize) -> u32 {
        self.refcount[usize::from(c)][id]
    }

    /// Base layer and offset holding the partial sums of node `phi` at `layer`.
    pub fn c_location(&self, layer: usize, phi: usize) -> (usize, usize) {
        if phi.is_multiple_of(2) {
            return (layer, 0);
        }
        let delta = (phi.trailing_ones() as usize).min(layer);
        (layer - delta, (1 << (self.m - layer)) * ((1 << delta) - 1))
    }

    /// Writable slot for the codeword of node `phi` at `layer`.
    pub fn c_write(&mut self, l: usize, layer: usize, phi: usize) -> Result<&mut [u8]> {
        let (base, off) = self.c_location(layer, phi);
        let start = self.write_offset(C, l, base)? + off;
        let len = self.array_len(layer);
        Ok(&mut self.c_pool[start..start + len])
    }

    /// Loads the channel LLRs into layer 0.
    pub fn load_input(&mut self, l: usize, llrs: &[f64]) -> Result<()> {
        if llrs.len() != 1 << self.m {
            return Err(Error::InvalidArgument(format!(
                "expected {} LLRs, got {}",
                1usize << self.m,
                llrs.len()
            )));
        }
        self.s_write(l, 0)?.copy_from_slice(llrs);
        Ok(())
    }

    /// Computes the LLRs of node `phi` at `layer` from the deepest valid
    /// ancestor: one `P` stage if needed, then `Q` stages.
    pub fn calc_s(&mut self, l: usize, layer: usize, phi: usize, ops: &mut OpCount) -> Result<()> {
        if layer == 0 {
            return Ok(());
        }
        let d = if phi == 0 {
            layer - 1
        } else {
            (phi.trailing_zeros() as usize).min(layer - 1)
        };
        let top = layer - d;
        for lam in top..=layer {
            let half = self.array_len(lam);
            let src = self.mapped(S, l, lam - 1)?;
            let dst = self.write_offset(S, l, lam)?;
            let p_stage = lam == top && (phi >> d) % 2 == 1;
            let c_off = if p_stage { self.mapped(C, l, lam)? } else { 0 };
            let (read, write) = disjoint(&mut self.s_pool, src, 2 * half, dst, half);
            if p_stage {
                let c = &self.c_pool[c_off..c_off + half];
                for j in 0..half {
                    write[j] = p_op(c[j], read[j], read[j + half]);
                }
                ops.add += half as u64;
            } else {
                for j in 0..half {
                    write[j] = q_op(read[j], read[j + half]);
                }
                ops.cmp += half as u64;
            }
        }
        Ok(())
    }

    /// Folds the partial sums after the right child `phi` (odd) at `layer`
    /// has been written, up through its run of trailing ones.
    pub fn update_c(&mut self, l: usize, layer: usize, phi: usize) -> Result<()> {
        debug_assert!(phi % 2 == 1);
        let delta = (phi.trailing_ones() as usize).min(layer);
        let base = layer - delta;
        let dst = self.write_offset(C, l, base)?;
        for step in 1..=delta {
            let h = 1usize << (self.m - layer + step - 1);
            let node_off = if step < delta {
                (2 * h) * ((1 << (delta - step)) - 1)
            } else {
                0
            };
            let left = self.mapped(C, l, layer - step + 1)?;
            let at = dst + node_off;
            for j in 0..h {
                self.c_pool[at + j] = self.c_pool[left + j] ^ self.c_pool[at + h + j];
            }
        }
        Ok(())
    }

    /// Checks that every live mapping is counted exactly once.
    pub fn check_refcounts(&self) -> Result<()> {
        for kind in [S, C] {
            let mut counted = vec![0u32; self.refcount[kind].len()];
            for (slot, &p) in self.maps[kind].iter().enumerate() {
                if p != NONE {
                    if !self.alive[slot / (self.m + 1)] {
                        return Err(Error::Contract(format!("dead path maps array {p}")));
                    }
                    counted[p] += 1;
                }
            }
            if counted != self.refcount[kind] {
                return Err(Error::Contract("reference counts out of balance".into()));
            }
            if self.phi[kind] > self.capacity {
                return Err(Error::Contract("pool consumption above capacity".into()));
            }
        }
        Ok(())
    }
}

/// Disjoint read and write windows of one pool.
fn disjoint(pool: &mut [f64], r: usize, rlen: usize, w: usize, wlen: usize) -> (&[f64], &mut [f64]) {
    if r < w {
        let (a, b) = pool.split_at_mut(w);
        (&a[r..r + rlen], &mut b[..wlen])
    } else {
        let (a, b) = pool.split_at_mut(r);
        (&b[..rlen], &mut a[w..w + wlen])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::polar_transform;
    use crate::oracle::node_llrs;
    use rand::{Rng, SeedableRng};

    const EXAMPLE: [f64; 16] = [
        0.44, 7.46, 7.19, 2.82, 5.63, 9.78, 6.06, -0.12, -0.64, 9.38, 10.87, 13.0, 13.43, 9.43, 2.02, 13.2,
    ];

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol + 1e-9)
    }

    #[test]
    fn worked_example_llrs() {
        let mut bank = ArrayBank::new(4, 4, 1 << 10);
        let l = bank.assign_initial_path().unwrap();
        bank.load_input(l, &EXAMPLE).unwrap();
        let mut ops = OpCount::default();
        bank.calc_s(l, 2, 0, &mut ops).unwrap();
        assert!(close(bank.s_read(l, 2).unwrap(), &[-0.44, 7.46, 2.02, -0.12], 1e-9));
        assert_eq!(ops.cmp, 12);
        bank.c_write(l, 2, 0).unwrap().copy_from_slice(&[0, 0, 0, 0]);
        bank.calc_s(l, 2, 1, &mut ops).unwrap();
        assert!(close(bank.s_read(l, 2).unwrap(), &[5.19, 16.89, 9.2, 2.7], 0.01), "{:?}", bank.s_read(l, 2));
        bank.c_write(l, 2, 1).unwrap().copy_from_slice(&[0, 0, 0, 0]);
        bank.update_c(l, 2, 1).unwrap();
        bank.calc_s(l, 1, 1, &mut ops).unwrap();
        let expected = [-0.2, 16.84, 18.05, 15.82, 19.06, 19.2, 8.08, 13.08];
        assert!(close(bank.s_read(l, 1).unwrap(), &expected, 0.01));
    }

    #[test]
    fn c_locations() {
        let bank = ArrayBank::new(4, 2, 64);
        assert_eq!(bank.c_location(3, 2), (3, 0));
        assert_eq!(bank.c_location(4, 3), (2, 3));
        assert_eq!(bank.c_location(4, 15), (0, 15));
        assert_eq!(bank.c_location(2, 1), (1, 4));
        // co-location: one C array per layer has the size of the S array
        for layer in 0..=4 {
            let (base, off) = bank.c_location(layer, (1 << layer) - 1);
            assert!(off + bank.array_len(layer) <= bank.array_len(base));
        }
    }

    /// Decodes `u` phase by phase through the bank and compares against the
    /// recursive reference.
    fn walk_phases(bank: &mut ArrayBank, l: usize, input: &[f64], u: &[u8]) {
        let m = bank.m();
        let mut ops = OpCount::default();
        for phi in 0..u.len() {
            bank.calc_s(l, m, phi, &mut ops).unwrap();
            let s = bank.s_read(l, m).unwrap()[0];
            assert!((s - node_llrs(input, u, m, phi)[0]).abs() < 1e-9);
            bank.c_write(l, m, phi).unwrap()[0] = u[phi];
            if phi % 2 == 1 {
                bank.update_c(l, m, phi).unwrap();
            }
        }
        assert_eq!(ops.total() as usize, m * u.len());
    }

    #[test]
    fn full_walk_matches_encoder_and_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for m in 1..=6 {
            let n = 1 << m;
            for _ in 0..20 {
                let input: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let u: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
                let mut bank = ArrayBank::new(m, 2, 4 * n);
                let l = bank.assign_initial_path().unwrap();
                bank.load_input(l, &input).unwrap();
                walk_phases(&mut bank, l, &input, &u);
                assert_eq!(bank.c_read(l, 0).unwrap(), polar_transform(&u).unwrap().as_slice());
            }
        }
    }

    #[test]
    fn intermediate_partial_sums_match_recursion() {
        // after every odd phase, the folded node codeword equals u·A over its range
        let m = 4;
        let n = 16;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let u: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let mut bank = ArrayBank::new(m, 2, 64);
        let l = bank.assign_initial_path().unwrap();
        bank.load_input(l, &[1.0; 16]).unwrap();
        for phi in 0..n {
            bank.calc_s(l, m, phi, &mut OpCount::default()).unwrap();
            bank.c_write(l, m, phi).unwrap()[0] = u[phi];
            if phi % 2 == 1 {
                bank.update_c(l, m, phi).unwrap();
                let delta = phi.trailing_ones() as usize;
                let layer = m - delta;
                let node = phi >> delta;
                let span = 1 << delta;
                let expected = polar_transform(&u[node * span..(node + 1) * span]).unwrap();
                let (base, off) = bank.c_location(layer, node);
                let arr = bank.c_read(l, base).unwrap();
                assert_eq!(&arr[off..off + span], expected.as_slice());
            }
        }
    }

    #[test]
    fn clone_shares_and_write_detaches() {
        let mut bank = ArrayBank::new(3, 4, 256);
        let a = bank.assign_initial_path().unwrap();
        bank.load_input(a, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        bank.calc_s(a, 1, 0, &mut OpCount::default()).unwrap();
        let before = bank.stats();
        let b = bank.clone_path(a).unwrap();
        assert_eq!(bank.array_id(false, a, 1), bank.array_id(false, b, 1));
        assert_eq!(bank.s_read(a, 1).unwrap(), bank.s_read(b, 1).unwrap());
        let id = bank.array_id(false, a, 1).unwrap();
        assert_eq!(bank.refcount(false, id), 2);
        bank.s_write(b, 1).unwrap().fill(-9.0);
        assert_eq!(bank.s_read(a, 1).unwrap(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(bank.refcount(false, id), 1);
        // exclusive arrays keep their place
        let p1 = bank.s_write(a, 1).unwrap().as_ptr();
        let p2 = bank.s_write(a, 1).unwrap().as_ptr();
        assert_eq!(p1, p2);
        bank.check_refcounts().unwrap();
        bank.kill_path(b).unwrap();
        assert_eq!(bank.refcount(false, id), 1);
        bank.check_refcounts().unwrap();
        assert_eq!(bank.stats().bytes_copied, 0);
        assert!(bank.stats().allocations > before.allocations);
        assert!(bank.kill_path(b).is_err());
        assert!(bank.s_read(b, 0).is_err());
    }

    #[test]
    fn allocation_and_recycling() {
        let mut bank = ArrayBank::new(4, 2, 16);
        let l = bank.assign_initial_path().unwrap();
        bank.s_write(l, 0).unwrap();
        assert_eq!(bank.phi().0, 16);
        bank.kill_path(l).unwrap();
        let l = bank.assign_initial_path().unwrap();
        bank.s_write(l, 0).unwrap();
        assert_eq!(bank.phi().0, 16);
        let small = ArrayBank::new(4, 2, 15);
        let mut small = small;
        let l = small.assign_initial_path().unwrap();
        assert!(matches!(small.s_write(l, 0), Err(Error::PoolExhausted)));
        assert!(small.assign_initial_path().is_ok());
        assert!(small.assign_initial_path().is_err());
    }

    #[test]
    fn random_operation_sequences_keep_counts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let m = 4;
        let mut bank = ArrayBank::new(m, 8, 1 << 12);
        let mut live: Vec<usize> = vec![bank.assign_initial_path().unwrap()];
        bank.load_input(live[0], &[0.5; 16]).unwrap();
        for _ in 0..5000 {
            match rng.gen_range(0..4) {
                0 if live.len() < 8 => {
                    let l = live[rng.gen_range(0..live.len())];
                    live.push(bank.clone_path(l).unwrap());
                }
                1 if live.len() > 1 => {
                    let i = rng.gen_range(0..live.len());
                    bank.kill_path(live.swap_remove(i)).unwrap();
                }
                _ => {
                    let l = live[rng.gen_range(0..live.len())];
                    let layer = rng.gen_range(1..=m);
                    let phi = rng.gen_range(0..1usize << layer);
                    bank.c_write(l, layer, phi).unwrap();
                    bank.s_write(l, layer).unwrap();
                }
            }
            bank.check_refcounts().unwrap();
        }
    }
}
