use super::matrix::{BinMatrix, Words};
use crate::{Error, Result};

/// Primitive polynomials for GF(2^m), m = 2..8, with the leading term.
const PRIMITIVE: [u32; 7] = [0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10001001, 0b1_0001_1101];

struct Field {
    m: usize,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Field {
    fn new(m: usize) -> Self {
        let poly = PRIMITIVE[m - 2];
        let order = (1usize << m) - 1;
        let mut exp = vec![0u32; order];
        let mut log = vec![0u32; order + 1];
        let mut x = 1u32;
        for (i, e) in exp.iter_mut().enumerate() {
            *e = x;
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= poly;
            }
        }
        Field { m, exp, log }
    }

    fn pow(&self, x: u32, e: usize) -> u32 {
        if x == 0 {
            return u32::from(e == 0);
        }
        let order = self.exp.len();
        self.exp[(self.log[x as usize] as usize * e) % order]
    }
}

/// Check matrix of the extended narrow-sense BCH code of length `2^m` with
/// designed distance `designed_distance` (that of the extended code).
///
/// Coordinate `j` is the field element whose polynomial-basis representation
/// is `j`; coordinate 0 is the extension position. Rows: overall parity, then
/// the binary expansions of `x_j^i` for `i = 1..d-2`, reduced to a basis.
pub fn ebch_check_matrix(m: usize, designed_distance: usize) -> Result<BinMatrix> {
    if !(2..=8).contains(&m) {
        return Err(Error::InvalidArgument(format!("eBCH needs 2 ≤ m ≤ 8, got {m}")));
    }
    let n = 1usize << m;
    if designed_distance < 2 || designed_distance > n {
        return Err(Error::InvalidArgument(format!(
            "no extended BCH code of length {n} with designed distance {designed_distance}"
        )));
    }
    let field = Field::new(m);
    let mut candidates = vec![vec![1u8; n]];
    for i in 1..=designed_distance - 2 {
        let values: Vec<u32> = (0..n as u32).map(|x| field.pow(x, i)).collect();
        for b in 0..field.m {
            candidates.push(values.iter().map(|v| (v >> b & 1) as u8).collect());
        }
    }
    // keep rows that are independent of the ones already kept
    let mut basis: Vec<(usize, Words)> = Vec::new();
    let mut rows = Vec::new();
    for row in candidates {
        let mut w = Words::from_bits(&row);
        for (pivot, b) in &basis {
            if w.get(*pivot) {
                w.xor(b);
            }
        }
        if let Some(p) = w.last_one() {
            for (_, b) in basis.iter_mut() {
                if b.get(p) {
                    b.xor(&w);
                }
            }
            basis.push((p, w));
            rows.push(row);
        }
    }
    if rows.len() >= n {
        return Err(Error::InvalidArgument(format!(
            "designed distance {designed_distance} leaves no information symbols at length {n}"
        )));
    }
    BinMatrix::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespec::from_check_matrix;

    #[test]
    fn extended_hamming_8() {
        let h = ebch_check_matrix(3, 4).unwrap();
        assert_eq!(h.row_count(), 4);
        let mut count = 0;
        for x in 0..256u32 {
            let c: Vec<u8> = (0..8).map(|i| (x >> i & 1) as u8).collect();
            if h.syndrome_is_zero(&c) {
                count += 1;
                let w = c.iter().filter(|&&b| b == 1).count();
                assert!([0, 4, 8].contains(&w));
            }
        }
        assert_eq!(count, 16);
    }

    #[test]
    fn ebch_128_64() {
        let h = ebch_check_matrix(7, 22).unwrap();
        assert_eq!(h.row_count(), 64);
        assert!(h.syndrome_is_zero(&[0; 128]));
        let spec = from_check_matrix(&h).unwrap();
        assert_eq!(spec.k(), 64);
    }

    #[test]
    fn bad_parameters() {
        assert!(ebch_check_matrix(1, 2).is_err());
        assert!(ebch_check_matrix(9, 4).is_err());
        assert!(ebch_check_matrix(3, 1).is_err());
        assert!(ebch_check_matrix(3, 9).is_err());
        assert_eq!(ebch_check_matrix(3, 8).unwrap().row_count(), 7);
    }
}
