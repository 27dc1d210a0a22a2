//! Reference decoders: successive cancellation, list decoding and
//! exhaustive maximum likelihood.

use crate::bsda::{DecodeResult, DecodeStatus};
use crate::codespec::{CodeSpec, Crc};
use crate::kernel::{tau, OpCount};
use crate::pathstore::ArrayBank;
use crate::{Error, Result};

/// Walks the phases of a single path, deciding each input symbol with
/// `decide(phase, llr, u)`; returns the symbols and per-phase penalties.
pub fn sc_sweep(
    bank: &mut ArrayBank,
    llrs: &[f64],
    mut decide: impl FnMut(usize, f64, &[u8]) -> u8,
    ops: &mut OpCount,
) -> Result<(Vec<u8>, Vec<f64>)> {
    let m = bank.m();
    let n = 1usize << m;
    bank.reset();
    let l = bank.assign_initial_path()?;
    bank.load_input(l, llrs)?;
    let mut u = vec![0u8; n];
    let mut pen = Vec::with_capacity(n);
    for phi in 0..n {
        bank.calc_s(l, m, phi, ops)?;
        let s = bank.s_read(l, m)?[0];
        let b = decide(phi, s, &u[..phi]);
        u[phi] = b;
        pen.push(tau(s, b));
        bank.c_write(l, m, phi)?[0] = b;
        if phi % 2 == 1 {
            bank.update_c(l, m, phi)?;
        }
    }
    Ok((u, pen))
}

fn frozen_values(spec: &CodeSpec) -> Vec<Option<&[usize]>> {
    let mut out = vec![None; spec.n()];
    for c in spec.constraints() {
        out[c.target] = Some(c.support.as_slice());
    }
    out
}

/// Min-sum successive cancellation decoding.
pub fn sc_decode(spec: &CodeSpec, llrs: &[f64]) -> Result<DecodeResult> {
    let mut bank = ArrayBank::new(spec.m(), 1, 2 * spec.n());
    let frozen = frozen_values(spec);
    let mut ops = OpCount::default();
    let (u, _) = sc_sweep(
        &mut bank,
        llrs,
        |phi, s, u| match frozen[phi] {
            Some(support) => support.iter().fold(0, |a, &j| a ^ u[j]),
            None => u8::from(s < 0.0),
        },
        &mut ops,
    )?;
    let codeword = bank.c_read(0, 0)?.to_vec();
    Ok(DecodeResult {
        info: spec.info_from_input(&u),
        codeword,
        status: DecodeStatus::Ok,
        iterations: spec.n() as u64,
        ops,
        ..DecodeResult::default()
    })
}

/// Tal-Vardy list decoding with the penalty-sum path metric. With `crc`,
/// the best surviving path whose information bits end in a valid CRC wins.
pub fn scl_decode(spec: &CodeSpec, list: usize, crc: Option<&Crc>, llrs: &[f64]) -> Result<DecodeResult> {
    if list == 0 {
        return Err(Error::InvalidArgument("list size must be at least 1".into()));
    }
    let m = spec.m();
    let n = spec.n();
    let mut bank = ArrayBank::new(m, 2 * list, 4 * list * n);
    let frozen = frozen_values(spec);
    let mut ops = OpCount::default();
    let root = bank.assign_initial_path()?;
    bank.load_input(root, llrs)?;
    // (path id, metric, decided symbols)
    let mut paths: Vec<(usize, f64, Vec<u8>)> = vec![(root, 0.0, Vec::with_capacity(n))];
    for phi in 0..n {
        let mut llr = Vec::with_capacity(paths.len());
        for (l, _, _) in &paths {
            bank.calc_s(*l, m, phi, &mut ops)?;
            llr.push(bank.s_read(*l, m)?[0]);
        }
        let mut next: Vec<(usize, f64, Vec<u8>)> = Vec::with_capacity(paths.len());
        match frozen[phi] {
            Some(support) => {
                for ((l, metric, mut u), s) in paths.into_iter().zip(llr) {
                    let b = support.iter().fold(0, |a, &j| a ^ u[j]);
                    let pen = tau(s, b);
                    if pen != 0.0 {
                        ops.add += 1;
                    }
                    u.push(b);
                    next.push((l, metric + pen, u));
                }
            }
            None => {
                // candidates: (metric, index into paths, bit)
                let mut cands: Vec<(f64, usize, u8)> = Vec::with_capacity(2 * paths.len());
                for (i, ((_, metric, _), &s)) in paths.iter().zip(&llr).enumerate() {
                    for b in 0..2u8 {
                        let pen = tau(s, b);
                        if pen != 0.0 {
                            ops.add += 1;
                        }
                        cands.push((metric + pen, i, b));
                    }
                }
                let mut count = 0u64;
                cands.sort_by(|a, b| {
                    count += 1;
                    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
                });
                ops.cmp += count;
                cands.truncate(list);
                let mut keep = vec![[false; 2]; paths.len()];
                for &(_, i, b) in &cands {
                    keep[i][b as usize] = true;
                }
                for (i, (l, _, _)) in paths.iter().enumerate() {
                    if !keep[i][0] && !keep[i][1] {
                        bank.kill_path(*l)?;
                    }
                }
                for &(metric, i, b) in &cands {
                    let (l, _, ref u) = paths[i];
                    let id = if keep[i][0] && keep[i][1] && b == 1 {
                        bank.clone_path(l)?
                    } else {
                        l
                    };
                    let mut u = u.clone();
                    u.push(b);
                    next.push((id, metric, u));
                }
            }
        }
        for (l, _, u) in &next {
            bank.c_write(*l, m, phi)?[0] = u[phi];
            if phi % 2 == 1 {
                bank.update_c(*l, m, phi)?;
            }
        }
        paths = next;
    }
    let mut count = 0u64;
    paths.sort_by(|a, b| {
        count += 1;
        b.1.total_cmp(&a.1)
    });
    ops.cmp += count;
    let mut status = DecodeStatus::Ok;
    let chosen = match crc {
        None => 0,
        Some(crc) => match paths.iter().position(|(_, _, u)| crc.check(&spec.info_from_input(u))) {
            Some(i) => i,
            None => {
                status = DecodeStatus::CrcFailed;
                0
            }
        },
    };
    let (l, _, u) = &paths[chosen];
    Ok(DecodeResult {
        codeword: bank.c_read(*l, 0)?.to_vec(),
        info: spec.info_from_input(u),
        status,
        iterations: n as u64,
        ops,
        final_metrics: paths.iter().map(|p| p.1).collect(),
        ..DecodeResult::default()
    })
}

/// Exhaustive maximum likelihood decoding by Gray-code enumeration of all
/// `2^k` codewords; ties go to the numerically smallest information vector.
/// Returns the codeword, its ellipsoidal weight and the information bits.
pub fn ml_decode(spec: &CodeSpec, llrs: &[f64]) -> Result<(Vec<u8>, f64, Vec<u8>)> {
    let k = spec.k();
    if k > 24 {
        return Err(Error::InvalidArgument(format!("exhaustive decoding refused for k = {k}")));
    }
    let n = spec.n();
    if llrs.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} LLRs, got {}", llrs.len())));
    }
    let hd: Vec<u8> = llrs.iter().map(|&x| u8::from(x < 0.0)).collect();
    let gens: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            let mut info = vec![0u8; k];
            info[i] = 1;
            let g = spec.encode(&info).expect("valid length");
            (0..n).filter(|&j| g[j] == 1).collect()
        })
        .collect();
    let mut c = vec![0u8; n];
    let mut e: f64 = llrs.iter().zip(&hd).map(|(&s, &h)| if h == 1 { -s.abs() } else { 0.0 }).sum();
    let mut best = (e, 0u32);
    for t in 1u32..(1u32 << k) {
        let j = t.trailing_zeros() as usize;
        for &pos in &gens[j] {
            let before = c[pos] != hd[pos];
            c[pos] ^= 1;
            let after = c[pos] != hd[pos];
            if before != after {
                let a = llrs[pos].abs();
                e += if after { -a } else { a };
            }
        }
        let index = t ^ (t >> 1);
        if e > best.0 || (e == best.0 && index < best.1) {
            best = (e, index);
        }
    }
    let info: Vec<u8> = (0..k).map(|i| (best.1 >> i & 1) as u8).collect();
    let codeword = spec.encode(&info)?;
    let weight = crate::kernel::ellipsoidal_weight(&codeword, llrs)?;
    Ok((codeword, weight, info))
}
