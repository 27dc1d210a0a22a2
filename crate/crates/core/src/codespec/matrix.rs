use super::{CodeSpec, Constraint};
use crate::kernel::log2_exact;
use crate::{Error, Result};

/// Dense binary matrix, one `u8` per entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMatrix {
    cols: usize,
    rows: Vec<Vec<u8>>,
}

impl BinMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("matrix rows differ in length".into()));
        }
        if rows.iter().flatten().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("matrix entries must be 0 or 1".into()));
        }
        Ok(BinMatrix { cols, rows })
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// True iff `H·cᵀ = 0`.
    pub fn syndrome_is_zero(&self, c: &[u8]) -> bool {
        self.rows
            .iter()
            .all(|r| r.iter().zip(c).fold(0u8, |acc, (a, b)| acc ^ (a & b)) == 0)
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Words> = self.rows.iter().map(|r| Words::from_bits(r)).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) {
                rows.swap(rank, p);
                let pivot = rows[rank].clone();
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && row.get(col) {
                        row.xor(&pivot);
                    }
                }
                rank += 1;
            }
        }
        rank
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Words(Vec<u64>);

impl Words {
    pub(crate) fn zeros(len: usize) -> Self {
        Words(vec![0; len.div_ceil(64)])
    }

    pub(crate) fn from_bits(bits: &[u8]) -> Self {
        let mut w = Words::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                w.flip(i);
            }
        }
        w
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    pub(crate) fn xor(&mut self, other: &Words) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a ^= b);
    }

    pub(crate) fn last_one(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub(crate) fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// Converts a check matrix `H` of a length-`2^m` code into freezing
/// constraints via `W = H·A_mᵀ` followed by row reduction.
pub fn from_check_matrix(h: &BinMatrix) -> Result<CodeSpec> {
    let n = h.cols();
    log2_exact(n)?;
    let w: Vec<Vec<u8>> = h
        .rows()
        .iter()
        .map(|row| {
            // (h·A_mᵀ)_i = sum of h_j over j whose bits are a subset of i's
            let mut w = row.clone();
            let mut half = 1;
            while half < n {
                for block in (0..n).step_by(2 * half) {
                    for j in block..block + half {
                        w[j + half] ^= w[j];
                    }
                }
                half *= 2;
            }
            w
        })
        .collect();
    from_input_constraints(n, &w)
}

/// Builds a spec from linear constraints on the input vector: each row `r`
/// demands `Σ_j r_j u_j = 0`. Rows are reduced right to left until their last
/// nonzero columns are distinct, then each pivot column is cleared from the
/// other rows so supports only name non-frozen phases.
pub fn from_input_constraints(n: usize, rows: &[Vec<u8>]) -> Result<CodeSpec> {
    let m = log2_exact(n)?;
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("constraint rows must have {n} columns")));
    }
    let mut rows: Vec<Words> = rows.iter().map(|r| Words::from_bits(r)).collect();
    let mut last: Vec<Option<usize>> = rows.iter().map(Words::last_one).collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut assigned = vec![false; rows.len()];
    for col in (0..n).rev() {
        let mut pivot = None;
        for r in 0..rows.len() {
            if assigned[r] || last[r] != Some(col) {
                continue;
            }
            match pivot {
                None => pivot = Some(r),
                Some(p) => {
                    let pr = rows[p].clone();
                    rows[r].xor(&pr);
                    last[r] = rows[r].last_one();
                }
            }
        }
        if let Some(p) = pivot {
            assigned[p] = true;
            pivot_of_col[col] = Some(p);
        }
    }
    if last.iter().any(Option::is_none) {
        return Err(Error::InvalidArgument("check matrix is rank deficient".into()));
    }
    for col in (0..n).rev() {
        let Some(p) = pivot_of_col[col] else { continue };
        let pr = rows[p].clone();
        for r in 0..rows.len() {
            if r != p && last[r].is_some_and(|t| t > col) && rows[r].get(col) {
                rows[r].xor(&pr);
            }
        }
    }
    let mut frozen = Vec::with_capacity(rows.len());
    let mut constraints = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let target = last[r].expect("checked above");
        frozen.push(target);
        let support: Vec<usize> = row.ones().filter(|&j| j != target).collect();
        if !support.is_empty() {
            constraints.push(Constraint { target, support });
        }
    }
    CodeSpec::new(m, n - frozen.len(), frozen, constraints)
}
