//! CRC-aided decoding: the last information bits carry a CRC-8 of the rest,
//! and both list decoders pick the best candidate that passes the check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polar_seq::baselines::scl_decode;
use polar_seq::bsda::{estimate_bias, Bsda, DecodeStatus, DecoderConfig};
use polar_seq::codespec::{construct_frozen_set, CodeSpec, Crc};
use polar_seq::decomposition::{build_tree, TreePolicy};
use polar_seq::sim::channel_llrs;

fn main() -> polar_seq::Result<()> {
    let spec = CodeSpec::polar(7, construct_frozen_set(7, 64, 2.5))?;
    let crc = Crc::crc8();
    let mut config = DecoderConfig::new(8, 64, estimate_bias(&spec, 2.5, 20_000, 1)?);
    config.crc = Some(crc);
    let mut bsda = Bsda::new(&spec, build_tree(&spec, &TreePolicy::default()), config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (frames, snr) = (5000, 2.0);
    let (mut e_bsda, mut e_scl) = (0, 0);
    for _ in 0..frames {
        let data: Vec<u8> = (0..spec.k() - crc.degree()).map(|_| rng.gen_range(0..2)).collect();
        let info = crc.append(&data);
        let llrs = channel_llrs(&spec.encode(&info)?, snr, spec.rate(), &mut rng);
        let r = bsda.decode(&llrs)?;
        e_bsda += usize::from(r.status != DecodeStatus::Ok || r.info != info);
        e_scl += usize::from(scl_decode(&spec, 8, Some(&crc), &llrs)?.info != info);
    }
    println!("(128,64) + CRC-8 at {snr} dB, {frames} frames");
    println!("BSDA L=8 FER {:.2e}", e_bsda as f64 / frames as f64);
    println!("SCL  L=8 FER {:.2e}", e_scl as f64 / frames as f64);
    Ok(())
}
