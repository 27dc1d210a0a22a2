//! Average operation counts of symbol-wise and block sequential decoding on
//! a (1024,512) polar code.
//!
//! `cargo run --release --example sda_vs_bsda -- [frames] [snr]`

use polar_seq::codespec::{construct_frozen_set, CodeSpec};
use polar_seq::sim::{Campaign, DecoderKind};

fn main() -> polar_seq::Result<()> {
    let mut args = std::env::args().skip(1);
    let frames: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let snr: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2.5);
    let spec = CodeSpec::polar(10, construct_frozen_set(10, 512, 2.0))?;
    let mut bias = None;
    for decoder in [DecoderKind::Bsda, DecoderKind::Sda] {
        let mut c = Campaign::new(spec.clone(), decoder, vec![snr]);
        c.list = 32;
        c.max_paths = 256;
        c.design_snr_db = Some(2.25);
        c.max_frames = frames;
        c.target_errors = 0;
        let table = match &bias {
            Some(t) => t,
            None => bias.insert(c.bias_table()?),
        };
        let p = c.run_point(0, snr, Some(table))?;
        println!(
            "{decoder:?}: FER {:.2e}, {:.0} ops/frame ({:.0} add, {:.0} cmp), {:.1} iterations, n·log2(n) = 10240",
            p.fer,
            p.avg_ops_add + p.avg_ops_cmp,
            p.avg_ops_add,
            p.avg_ops_cmp,
            p.avg_iterations
        );
    }
    Ok(())
}
