//! Encodes random information bits with a Gaussian-approximation polar code
//! and checks the result against the input-side constraints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polar_seq::codespec::{construct_frozen_set, CodeSpec};
use polar_seq::kernel::polar_transform;

fn show(b: &[u8]) -> String {
    b.iter().map(|x| char::from(b'0' + x)).collect()
}

fn main() -> polar_seq::Result<()> {
    let (m, k) = (5, 16);
    let spec = CodeSpec::polar(m, construct_frozen_set(m, k, 2.0))?;
    println!("{}", spec.to_text());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..4 {
        let info: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2)).collect();
        let c = spec.encode(&info)?;
        // the transform is its own inverse, so this recovers u
        let u = polar_transform(&c)?;
        assert!(spec.input_satisfies(&u));
        assert_eq!(spec.info_from_input(&u), info);
        println!("{} -> {}", show(&info), show(&c));
    }
    Ok(())
}
