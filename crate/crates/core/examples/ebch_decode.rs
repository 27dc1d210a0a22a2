//! Block sequential decoding of the (128,64,22) extended BCH code, whose
//! check matrix is turned into dynamic frozen symbols.
//!
//! `cargo run --release --example ebch_decode -- [frames] [snr]`

use polar_seq::codespec::{ebch_check_matrix, from_check_matrix};
use polar_seq::decomposition::{build_tree, TreePolicy};
use polar_seq::sim::{to_csv, Campaign, DecoderKind};

fn main() -> polar_seq::Result<()> {
    let mut args = std::env::args().skip(1);
    let frames: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3000);
    let snr: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3.5);
    let spec = from_check_matrix(&ebch_check_matrix(7, 22)?)?;
    let tree = build_tree(&spec, &TreePolicy::default());
    println!("{} blocks, {} dynamic frozen symbols", tree.leaf_count(), spec.dynamic_count());
    let mut c = Campaign::new(spec, DecoderKind::Bsda, vec![snr]);
    c.list = 256;
    c.max_paths = 2048;
    c.max_frames = frames;
    c.target_errors = 0;
    print!("{}", to_csv(&c.run()?));
    Ok(())
}
