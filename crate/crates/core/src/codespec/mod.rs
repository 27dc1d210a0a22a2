//! Code descriptions.
//!
//! Every code handled by the decoders is a [`CodeSpec`]: a length `2^m`, a
//! frozen set and one dynamic freezing constraint per frozen phase. A
//! constraint with an empty support freezes its phase to zero; otherwise the
//! phase carries the XOR of the input symbols listed in the support, all of
//! which precede it. Classical polar codes, polar subcodes, CRC-aided polar
//! codes and any binary linear code of length `2^m` (via its check matrix) fit
//! this form.

mod construct;
mod crc;
mod ebch;
mod matrix;
mod text;

pub use construct::{construct_frozen_set, ga_reliabilities};
pub use crc::{attach_crc, Crc, CrcCode};
pub use ebch::ebch_check_matrix;
pub use matrix::{from_check_matrix, from_input_constraints, BinMatrix};

use crate::kernel::{log2_exact, polar_transform_in_place};
use crate::{Error, Result};

/// Dynamic freezing constraint `u[target] = XOR of u[j] for j in support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub target: usize,
    pub support: Vec<usize>,
}

impl Constraint {
    pub fn is_static(&self) -> bool {
        self.support.is_empty()
    }
}

/// Full definition of a decodable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    m: usize,
    k: usize,
    frozen: Vec<usize>,
    constraints: Vec<Constraint>,
    frozen_mask: Vec<bool>,
}

impl CodeSpec {
    /// Builds and validates a spec. `constraints` may list only the nontrivial
    /// constraints; frozen phases without one are statically frozen.
    pub fn new(m: usize, k: usize, frozen: Vec<usize>, constraints: Vec<Constraint>) -> Result<Self> {
        if m > 24 {
            return Err(Error::InvalidArgument(format!("m = {m} is too large")));
        }
        let n = 1usize << m;
        if k > n {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
        }
        let mut frozen = frozen;
        frozen.sort_unstable();
        if frozen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate frozen index".into()));
        }
        if frozen.len() != n - k {
            return Err(Error::InvalidArgument(format!(
                "frozen set has {} entries, expected n - k = {}",
                frozen.len(),
                n - k
            )));
        }
        if frozen.last().is_some_and(|&f| f >= n) {
            return Err(Error::InvalidArgument("frozen index out of range".into()));
        }
        let mut frozen_mask = vec![false; n];
        for &f in &frozen {
            frozen_mask[f] = true;
        }
        let mut by_target: Vec<Option<Vec<usize>>> = vec![None; n];
        for c in constraints {
            if c.target >= n || !frozen_mask[c.target] {
                return Err(Error::InvalidArgument(format!(
                    "constraint target {} is not a frozen phase",
                    c.target
                )));
            }
            if by_target[c.target].is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate constraint target {}",
                    c.target
                )));
            }
            let mut support = c.support;
            support.sort_unstable();
            if support.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate support index in constraint {}",
                    c.target
                )));
            }
            if support.last().is_some_and(|&j| j >= c.target) {
                return Err(Error::InvalidArgument(format!(
                    "support of constraint {} must precede its target",
                    c.target
                )));
            }
            by_target[c.target] = Some(support);
        }
        let constraints = frozen
            .iter()
            .map(|&t| Constraint {
                target: t,
                support: by_target[t].take().unwrap_or_default(),
            })
            .collect();
        Ok(CodeSpec {
            m,
            k,
            frozen,
            constraints,
            frozen_mask,
        })
    }

    /// Classical polar code with every frozen phase set to zero.
    pub fn polar(m: usize, frozen: Vec<usize>) -> Result<Self> {
        let n = 1usize << m;
        let k = n.checked_sub(frozen.len()).ok_or_else(|| {
            Error::InvalidArgument("frozen set larger than the code length".into())
        })?;
        CodeSpec::new(m, k, frozen, Vec::new())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        1 << self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n() as f64
    }

    /// Frozen phases in ascending order.
    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    pub fn is_frozen(&self, phase: usize) -> bool {
        self.frozen_mask[phase]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    /// One constraint per frozen phase, ordered by target.
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Constraints with a nonempty support.
    pub fn dynamic_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| !c.is_static())
    }

    /// Number of nontrivial constraints.
    pub fn dynamic_count(&self) -> usize {
        self.dynamic_constraints().count()
    }

    /// Phases that appear in the support of some constraint.
    pub fn participating(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self
            .constraints
            .iter()
            .flat_map(|c| c.support.iter().copied())
            .collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    /// Non-frozen phases in ascending order.
    pub fn info_phases(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.frozen_mask[i]).collect()
    }

    /// Input vector `u` for the given information bits.
    pub fn input_vector(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k {
            return Err(Error::InvalidArgument(format!(
                "expected {} information bits, got {}",
                self.k,
                info.len()
            )));
        }
        let n = self.n();
        let mut u = vec![0u8; n];
        let mut bits = info.iter();
        let mut cons = self.constraints.iter();
        for i in 0..n {
            if self.frozen_mask[i] {
                let c = cons.next().expect("one constraint per frozen phase");
                debug_assert_eq!(c.target, i);
                u[i] = c.support.iter().fold(0, |acc, &j| acc ^ u[j]);
            } else {
                u[i] = bits.next().copied().unwrap_or(0) & 1;
            }
        }
        Ok(u)
    }

    /// Encodes `k` information bits into a codeword of length `n`.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        let mut u = self.input_vector(info)?;
        polar_transform_in_place(&mut u);
        Ok(u)
    }

    /// Information bits carried by input vector `u`.
    pub fn info_from_input(&self, u: &[u8]) -> Vec<u8> {
        u.iter()
            .zip(&self.frozen_mask)
            .filter(|(_, &f)| !f)
            .map(|(&b, _)| b)
            .collect()
    }

    /// True iff `u` satisfies every freezing constraint.
    pub fn input_satisfies(&self, u: &[u8]) -> bool {
        u.len() == self.n()
            && self.constraints.iter().all(|c| {
                c.support.iter().fold(0, |acc, &j| acc ^ u[j]) == u[c.target]
            })
    }

    /// True iff `c` is a codeword.
    pub fn is_codeword(&self, c: &[u8]) -> bool {
        if c.len() != self.n() {
            return false;
        }
        let mut u = c.to_vec();
        polar_transform_in_place(&mut u);
        self.input_satisfies(&u)
    }

    /// Checks that `n` is a power of two and returns `m`.
    pub fn m_for_length(n: usize) -> Result<usize> {
        log2_exact(n)
    }

    pub fn to_text(&self) -> String {
        text::save(self)
    }

    pub fn from_text(s: &str) -> Result<Self> {
        text::load(s)
    }

    pub fn load_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_text(&s)
    }

    pub fn save_file(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{polar_transform, transform_row};

    pub(crate) fn example16() -> CodeSpec {
        CodeSpec::polar(4, vec![0, 4, 8, 9, 10, 12]).unwrap()
    }

    #[test]
    fn zero_info_encodes_to_zero() {
        let spec = example16();
        assert_eq!(spec.k(), 10);
        assert_eq!(spec.encode(&[0; 10]).unwrap(), vec![0; 16]);
        assert!(spec.encode(&[0; 9]).is_err());
    }

    #[test]
    fn static_encoding_matches_generator_rows() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for m in 1..=6 {
            let n = 1 << m;
            let k = rng.gen_range(0..=n);
            let frozen = construct_frozen_set(m, k, 2.0);
            let spec = CodeSpec::polar(m, frozen).unwrap();
            let rows: Vec<Vec<u8>> = spec.info_phases().iter().map(|&i| transform_row(m, i)).collect();
            for _ in 0..100 {
                let info: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2)).collect();
                let mut expected = vec![0u8; n];
                for (b, row) in info.iter().zip(&rows) {
                    if *b == 1 {
                        expected.iter_mut().zip(row).for_each(|(e, r)| *e ^= r);
                    }
                }
                assert_eq!(spec.encode(&info).unwrap(), expected);
            }
        }
    }

    #[test]
    fn dynamic_constraint_is_applied() {
        let spec = CodeSpec::new(
            2,
            3,
            vec![3],
            vec![Constraint { target: 3, support: vec![1, 2] }],
        )
        .unwrap();
        for info in [[1u8, 1, 0], [1, 0, 1], [0, 1, 1], [0, 0, 0]] {
            let u = spec.input_vector(&info).unwrap();
            assert_eq!(&u[..3], &info);
            assert_eq!(u[3], info[1] ^ info[2]);
            let c = spec.encode(&info).unwrap();
            assert_eq!(c, polar_transform(&u).unwrap());
            assert!(spec.is_codeword(&c));
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(CodeSpec::new(2, 3, vec![3], vec![Constraint { target: 3, support: vec![3] }]).is_err());
        assert!(CodeSpec::new(2, 3, vec![3], vec![Constraint { target: 2, support: vec![0] }]).is_err());
        assert!(CodeSpec::new(2, 2, vec![3], vec![]).is_err());
        assert!(CodeSpec::new(
            2,
            2,
            vec![2, 3],
            vec![
                Constraint { target: 3, support: vec![0] },
                Constraint { target: 3, support: vec![1] }
            ]
        )
        .is_err());
    }

    #[test]
    fn encode_is_injective_and_onto_small_codes() {
        // every codeword of the check-matrix code is reached exactly once
        let h = BinMatrix::new(vec![vec![1, 1, 1, 1, 0, 0, 0, 0], vec![0, 0, 1, 1, 1, 1, 0, 0]]).unwrap();
        let spec = from_check_matrix(&h).unwrap();
        let k = spec.k();
        assert_eq!(k, 6);
        let mut seen = std::collections::HashSet::new();
        for x in 0..1u32 << k {
            let info: Vec<u8> = (0..k).map(|i| ((x >> i) & 1) as u8).collect();
            let c = spec.encode(&info).unwrap();
            assert!(h.syndrome_is_zero(&c));
            assert!(seen.insert(c));
        }
        let valid = (0..1u32 << 8)
            .map(|x| (0..8).map(|i| ((x >> i) & 1) as u8).collect::<Vec<u8>>())
            .filter(|c| h.syndrome_is_zero(c))
            .count();
        assert_eq!(valid, seen.len());
    }
}
