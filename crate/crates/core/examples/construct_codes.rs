//! Builds the three code families: a plain polar code, a polar code with an
//! embedded CRC, and an extended BCH code expressed through dynamic frozen
//! symbols.

use polar_seq::codespec::{attach_crc, construct_frozen_set, ebch_check_matrix, from_check_matrix, CodeSpec, Crc};

fn summary(name: &str, spec: &CodeSpec) {
    println!(
        "{name:<22} n={:<4} k={:<4} frozen={:<4} dynamic={}",
        spec.n(),
        spec.k(),
        spec.frozen().len(),
        spec.dynamic_count()
    );
}

fn main() -> polar_seq::Result<()> {
    let polar = CodeSpec::polar(7, construct_frozen_set(7, 72, 2.5))?;
    summary("polar (128,72)", &polar);

    let with_crc = attach_crc(&polar, Some(Crc::crc8()), 2.5)?;
    summary("polar (128,64)+CRC-8", &with_crc.spec);
    println!("  CRC phases {:?}", with_crc.crc_phases);

    let h = ebch_check_matrix(7, 22)?;
    let ebch = from_check_matrix(&h)?;
    summary("eBCH (128,64,22)", &ebch);
    let c = ebch.encode(&vec![1; ebch.k()])?;
    println!("  H·c = 0: {}", h.syndrome_is_zero(&c));
    Ok(())
}
