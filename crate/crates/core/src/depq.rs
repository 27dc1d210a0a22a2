//! Bounded double-ended priority queue of scored paths.
//!
//! An interval heap: node `k` owns slots `2k` (its minimum) and `2k + 1` (its
//! maximum), and the interval of every node contains the intervals of its
//! children. A path-to-slot index allows removal of arbitrary entries.
//! Entries with equal scores are ordered by insertion time, so `pop_max`
//! returns the most recently pushed of several equal maxima.

use std::cmp::Ordering;

use crate::{Error, Result};

/// Queue entry: score of a path, the path id and its block index when pushed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredEntry {
    pub score: f64,
    pub path: usize,
    pub block: usize,
}

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct Depq {
    capacity: usize,
    slots: Vec<(ScoredEntry, u64)>,
    pos: Vec<usize>,
    seq: u64,
    comparisons: u64,
}

impl Depq {
    pub fn new(capacity: usize) -> Self {
        Depq {
            capacity,
            slots: Vec::with_capacity(capacity),
            pos: Vec::new(),
            seq: 0,
            comparisons: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Key comparisons performed so far.
    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    pub fn contains(&self, path: usize) -> bool {
        self.pos.get(path).is_some_and(|&p| p != NONE)
    }

    pub fn clear(&mut self) {
        for (e, _) in &self.slots {
            self.pos[e.path] = NONE;
        }
        self.slots.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScoredEntry> {
        self.slots.iter().map(|(e, _)| e)
    }

    pub fn push(&mut self, entry: ScoredEntry) -> Result<()> {
        if self.slots.len() >= self.capacity {
            return Err(Error::Contract(format!("queue full ({} entries)", self.capacity)));
        }
        if self.contains(entry.path) {
            return Err(Error::Contract(format!("path {} already queued", entry.path)));
        }
        if entry.path >= self.pos.len() {
            self.pos.resize(entry.path + 1, NONE);
        }
        let i = self.slots.len();
        self.seq += 1;
        self.slots.push((entry, self.seq));
        self.pos[entry.path] = i;
        if i % 2 == 1 {
            if self.less(i, i - 1) {
                self.swap(i, i - 1);
                self.min_up(i - 1);
            } else {
                self.max_up(i);
            }
        } else if !self.min_up(i) {
            self.max_up(i);
        }
        Ok(())
    }

    pub fn peek_max(&self) -> Option<&ScoredEntry> {
        match self.slots.len() {
            0 => None,
            1 => Some(&self.slots[0].0),
            _ => Some(&self.slots[1].0),
        }
    }

    pub fn peek_min(&self) -> Option<&ScoredEntry> {
        self.slots.first().map(|(e, _)| e)
    }

    pub fn pop_max(&mut self) -> Result<ScoredEntry> {
        match self.slots.len() {
            0 => Err(Error::QueueEmpty),
            1 => Ok(self.remove_at(0)),
            _ => Ok(self.remove_at(1)),
        }
    }

    pub fn pop_min(&mut self) -> Result<ScoredEntry> {
        if self.slots.is_empty() {
            return Err(Error::QueueEmpty);
        }
        Ok(self.remove_at(0))
    }

    /// Removes the entry of `path`, if queued.
    pub fn remove(&mut self, path: usize) -> Option<ScoredEntry> {
        let p = *self.pos.get(path)?;
        (p != NONE).then(|| self.remove_at(p))
    }

    /// Removes every entry matching `pred` and returns them.
    pub fn remove_if(&mut self, mut pred: impl FnMut(&ScoredEntry) -> bool) -> Vec<ScoredEntry> {
        let victims: Vec<usize> = self.slots.iter().filter(|(e, _)| pred(e)).map(|(e, _)| e.path).collect();
        victims.into_iter().filter_map(|p| self.remove(p)).collect()
    }

    fn key_cmp(&self, i: usize, j: usize) -> Ordering {
        let (a, sa) = &self.slots[i];
        let (b, sb) = &self.slots[j];
        a.score.total_cmp(&b.score).then(sa.cmp(sb))
    }

    fn less(&mut self, i: usize, j: usize) -> bool {
        self.comparisons += 1;
        self.key_cmp(i, j) == Ordering::Less
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.slots.swap(i, j);
        self.pos[self.slots[i].0.path] = i;
        self.pos[self.slots[j].0.path] = j;
    }

    /// Slot holding the maximum of node `k`.
    fn max_slot(&self, k: usize) -> usize {
        if 2 * k + 1 < self.slots.len() {
            2 * k + 1
        } else {
            2 * k
        }
    }

    fn min_up(&mut self, mut i: usize) -> bool {
        let start = i;
        while i >= 2 {
            let parent = ((i / 2 - 1) / 2) * 2;
            if self.less(i, parent) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
        i != start
    }

    fn max_up(&mut self, mut i: usize) -> bool {
        let start = i;
        while i >= 2 {
            let parent = ((i / 2 - 1) / 2) * 2 + 1;
            if self.less(parent, i) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
        i != start
    }

    fn min_down(&mut self, mut k: usize) {
        let len = self.slots.len();
        loop {
            let mut best = None;
            for c in [2 * k + 1, 2 * k + 2] {
                if 2 * c < len && best.is_none_or(|b: usize| self.less(2 * c, 2 * b)) {
                    best = Some(c);
                }
            }
            let Some(c) = best else { break };
            if !self.less(2 * c, 2 * k) {
                break;
            }
            self.swap(2 * c, 2 * k);
            let hi = self.max_slot(c);
            if hi != 2 * c && self.less(hi, 2 * c) {
                self.swap(hi, 2 * c);
            }
            k = c;
        }
    }

    fn max_down(&mut self, mut k: usize) {
        let len = self.slots.len();
        loop {
            let mut best = None;
            for c in [2 * k + 1, 2 * k + 2] {
                if 2 * c < len {
                    let slot = self.max_slot(c);
                    if best.is_none_or(|b: usize| self.less(b, slot)) {
                        best = Some(slot);
                    }
                }
            }
            let Some(child) = best else { break };
            let me = self.max_slot(k);
            if !self.less(me, child) {
                break;
            }
            self.swap(me, child);
            let c = child / 2;
            if child != 2 * c && self.less(child, 2 * c) {
                self.swap(child, 2 * c);
            }
            k = c;
        }
    }

    fn remove_at(&mut self, i: usize) -> ScoredEntry {
        let last = self.slots.len() - 1;
        if i != last {
            self.swap(i, last);
        }
        let (entry, _) = self.slots.pop().expect("nonempty");
        self.pos[entry.path] = NONE;
        if i < last {
            let k = i / 2;
            let hi = self.max_slot(k);
            if hi != 2 * k && self.less(hi, 2 * k) {
                self.swap(hi, 2 * k);
            }
            if !self.min_up(2 * k) {
                self.min_down(k);
            }
            let hi = self.max_slot(k);
            if !self.max_up(hi) {
                self.max_down(k);
            }
        }
        entry
    }

    #[cfg(test)]
    fn check(&self) {
        let len = self.slots.len();
        for k in 0..len.div_ceil(2) {
            let (lo, hi) = (2 * k, self.max_slot(k));
            assert_ne!(self.key_cmp(lo, hi), Ordering::Greater);
            if k > 0 {
                let p = (k - 1) / 2;
                assert_ne!(self.key_cmp(2 * p, lo), Ordering::Greater);
                assert_ne!(self.key_cmp(hi, self.max_slot(p)), Ordering::Greater);
            }
        }
        for (i, (e, _)) in self.slots.iter().enumerate() {
            assert_eq!(self.pos[e.path], i);
        }
    }
}
