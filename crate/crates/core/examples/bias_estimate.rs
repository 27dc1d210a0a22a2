//! Monte-Carlo bias table of the (16,10) polar code at 5 dB.
//!
//! Run with `cargo run --release --example bias_estimate -- [samples]`.

use polar_seq::bsda::estimate_bias;
use polar_seq::codespec::CodeSpec;
use polar_seq::decomposition::{build_tree, TreePolicy};

fn main() -> polar_seq::Result<()> {
    let samples: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let spec = CodeSpec::polar(4, vec![0, 4, 8, 9, 10, 12])?;
    let tree = build_tree(&spec, &TreePolicy::default());
    let t = std::time::Instant::now();
    let bias = estimate_bias(&spec, 5.0, samples, 1)?;
    println!("{samples} samples in {:.2?}", t.elapsed());
    for phi in tree.last_phases() {
        println!("Ψ({phi:2}) = {:+.4}", bias.at(phi));
    }
    Ok(())
}
