//! Successive cancellation, list decoding and exhaustive ML on the same noisy
//! frames of a (32,16) polar code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polar_seq::baselines::{ml_decode, sc_decode, scl_decode};
use polar_seq::codespec::{construct_frozen_set, CodeSpec};
use polar_seq::sim::channel_llrs;

fn main() -> polar_seq::Result<()> {
    let spec = CodeSpec::polar(5, construct_frozen_set(5, 16, 2.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let frames = 2000;
    let mut errors = [0usize; 4];
    for _ in 0..frames {
        let info: Vec<u8> = (0..spec.k()).map(|_| rng.gen_range(0..2)).collect();
        let llrs = channel_llrs(&spec.encode(&info)?, 2.0, spec.rate(), &mut rng);
        let got = [
            sc_decode(&spec, &llrs)?.info,
            scl_decode(&spec, 2, None, &llrs)?.info,
            scl_decode(&spec, 8, None, &llrs)?.info,
            ml_decode(&spec, &llrs)?.2,
        ];
        for (e, g) in errors.iter_mut().zip(&got) {
            *e += usize::from(*g != info);
        }
    }
    for (name, e) in ["SC", "SCL L=2", "SCL L=8", "ML"].iter().zip(errors) {
        println!("{name:<8} FER {:.4}", e as f64 / frames as f64);
    }
    Ok(())
}
