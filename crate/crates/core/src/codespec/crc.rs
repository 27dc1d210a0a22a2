use super::{construct::ga_reliabilities, from_input_constraints, CodeSpec};
use crate::{Error, Result};

/// Bitwise CRC with zero initial value and no output XOR, so the checksum is
/// a linear function of the message. Bits are processed MSB first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crc {
    /// Generator polynomial including the leading `x^r` term.
    poly: u64,
    degree: usize,
}

impl Crc {
    pub fn new(poly: u64) -> Result<Self> {
        if poly < 2 {
            return Err(Error::InvalidArgument("CRC polynomial must have degree ≥ 1".into()));
        }
        let degree = 63 - poly.leading_zeros() as usize;
        if degree > 62 {
            return Err(Error::InvalidArgument("CRC degree above 62 is unsupported".into()));
        }
        Ok(Crc { poly, degree })
    }

    /// `x^8 + x^2 + x + 1`.
    pub fn crc8() -> Self {
        Crc::new(0x107).unwrap()
    }

    /// IEEE 802.3 CRC-32 polynomial.
    pub fn crc32() -> Self {
        Crc::new(0x1_04C1_1DB7).unwrap()
    }

    /// Parses a hexadecimal polynomial such as `0x107`.
    pub fn parse_hex(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches("0x").trim_start_matches("0X");
        let poly = u64::from_str_radix(t, 16)
            .map_err(|e| Error::InvalidArgument(format!("bad CRC polynomial {s:?}: {e}")))?;
        Crc::new(poly)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    /// Remainder of `msg(x)·x^r` modulo the generator, MSB first.
    pub fn compute(&self, msg: &[u8]) -> Vec<u8> {
        let r = self.degree;
        let mask = (1u64 << r) - 1;
        let low = self.poly & mask;
        let mut reg = 0u64;
        for &b in msg {
            let top = (reg >> (r - 1)) & 1;
            reg = (reg << 1) & mask;
            if top ^ (b as u64 & 1) == 1 {
                reg ^= low;
            }
        }
        (0..r).rev().map(|i| ((reg >> i) & 1) as u8).collect()
    }

    /// Checks a word whose last `r` bits are the CRC of the preceding bits.
    pub fn check(&self, word: &[u8]) -> bool {
        if word.len() < self.degree {
            return false;
        }
        let (msg, tail) = word.split_at(word.len() - self.degree);
        self.compute(msg) == tail
    }

    /// Appends the CRC to `msg`.
    pub fn append(&self, msg: &[u8]) -> Vec<u8> {
        let mut w = msg.to_vec();
        w.extend(self.compute(msg));
        w
    }
}

/// A CRC-aided polar code expressed through dynamic freezing constraints.
#[derive(Debug, Clone)]
pub struct CrcCode {
    pub spec: CodeSpec,
    /// Phases carrying message bits, ascending.
    pub data_phases: Vec<usize>,
    /// Phases carrying the CRC bits, ascending.
    pub crc_phases: Vec<usize>,
    pub crc: Option<Crc>,
}

impl CrcCode {
    /// True iff the message read from the data phases of `codeword` matches
    /// the CRC read from the CRC phases.
    pub fn validate(&self, codeword: &[u8]) -> bool {
        let Ok(u) = crate::kernel::polar_transform(codeword) else {
            return false;
        };
        let msg: Vec<u8> = self.data_phases.iter().map(|&i| u[i]).collect();
        let tail: Vec<u8> = self.crc_phases.iter().map(|&i| u[i]).collect();
        match &self.crc {
            Some(crc) => crc.compute(&msg) == tail,
            None => true,
        }
    }
}

/// Embeds a CRC into `base` as `r` dynamic frozen symbols placed on the `r`
/// least reliable non-frozen phases (Gaussian approximation at `design_ebn0_db`).
pub fn attach_crc(base: &CodeSpec, crc: Option<Crc>, design_ebn0_db: f64) -> Result<CrcCode> {
    let info = base.info_phases();
    let Some(crc) = crc else {
        return Ok(CrcCode {
            spec: base.clone(),
            data_phases: info,
            crc_phases: Vec::new(),
            crc: None,
        });
    };
    let r = crc.degree();
    if r >= info.len() {
        return Err(Error::InvalidArgument(format!(
            "CRC degree {r} leaves no data phases among {} non-frozen phases",
            info.len()
        )));
    }
    let n = base.n();
    let rel = ga_reliabilities(base.m(), design_ebn0_db, base.rate());
    let mut by_rel = info.clone();
    by_rel.sort_by(|&a, &b| rel[a].total_cmp(&rel[b]).then(a.cmp(&b)));
    let mut crc_phases = by_rel[..r].to_vec();
    crc_phases.sort_unstable();
    let data_phases: Vec<usize> = info.iter().copied().filter(|p| !crc_phases.contains(p)).collect();

    let mut rows: Vec<Vec<u8>> = base
        .constraints()
        .iter()
        .map(|c| {
            let mut row = vec![0u8; n];
            row[c.target] = 1;
            c.support.iter().for_each(|&j| row[j] ^= 1);
            row
        })
        .collect();
    let mut columns = vec![vec![0u8; n]; r];
    let mut unit = vec![0u8; data_phases.len()];
    for (d, &phase) in data_phases.iter().enumerate() {
        unit[d] = 1;
        for (i, bit) in crc.compute(&unit).into_iter().enumerate() {
            if bit == 1 {
                columns[i][phase] ^= 1;
            }
        }
        unit[d] = 0;
    }
    for (i, mut row) in columns.into_iter().enumerate() {
        row[crc_phases[i]] ^= 1;
        rows.push(row);
    }
    let spec = from_input_constraints(n, &rows)?;
    Ok(CrcCode {
        spec,
        data_phases,
        crc_phases,
        crc: Some(crc),
    })
}
