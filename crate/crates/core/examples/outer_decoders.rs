//! Lists the codewords produced on demand by a few outer decoders, in the
//! order a sequential decoder would request them.

use polar_seq::decomposition::classify;
use polar_seq::kernel::OpCount;
use polar_seq::outer::LeafCode;

fn listing(frozen: &[usize], mu: usize, s: &[f64], count: usize) -> polar_seq::Result<()> {
    let kind = classify(frozen, mu).expect("classifiable pattern");
    let code = LeafCode::new(kind, mu, frozen);
    let mut ops = OpCount::default();
    let mut z = code.preprocess(s, &vec![0; s.len()], count, &mut ops);
    println!("{} (n={}, k={}) on {s:?}", code.kind().name(), code.n(), code.k());
    loop {
        let em = z.next(&code, &mut ops)?;
        println!("  {:?} e = {:+.2}", em.codeword, em.e);
        if !em.more {
            break;
        }
    }
    println!("  {} additions, {} comparisons", ops.add, ops.cmp);
    Ok(())
}

fn main() -> polar_seq::Result<()> {
    listing(&[0], 2, &[-0.44, 7.46, 2.02, -0.12], 4)?;
    listing(&[0, 1, 2, 4], 3, &[-0.2, 16.84, 18.05, 15.82, 19.06, 19.2, 8.08, 13.08], 4)?;
    listing(&[], 3, &[1.1, -0.3, 2.5, 0.2, -4.0, 0.9, 3.3, -0.7], 5)?;
    listing(&[0, 1], 3, &[0.5, -1.2, 0.3, 2.2, -0.1, 1.7, 0.8, -0.6], 6)?;
    Ok(())
}
