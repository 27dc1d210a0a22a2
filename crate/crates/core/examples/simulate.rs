//! A small campaign written as CSV, the same format as `polar-seq simulate`.

use polar_seq::codespec::{construct_frozen_set, CodeSpec};
use polar_seq::sim::{to_csv, Campaign, DecoderKind};

fn main() -> polar_seq::Result<()> {
    let spec = CodeSpec::polar(7, construct_frozen_set(7, 64, 2.5))?;
    let mut c = Campaign::new(spec, DecoderKind::Bsda, vec![1.0, 1.5, 2.0, 2.5]);
    c.list = 8;
    c.target_errors = 50;
    c.max_frames = 50_000;
    c.seed = 7;
    print!("{}", to_csv(&c.run()?));
    Ok(())
}
