//! Decodes the 16-symbol worked example with the block sequential decoder
//! and prints every forward pass.

use polar_seq::bsda::{decode, BiasTable, DecoderConfig};
use polar_seq::codespec::CodeSpec;
use polar_seq::decomposition::{build_tree, TreePolicy};

fn main() -> polar_seq::Result<()> {
    let spec = CodeSpec::polar(4, vec![0, 4, 8, 9, 10, 12])?;
    let tree = build_tree(&spec, &TreePolicy::default());
    let llrs = [0.44, 7.46, 7.19, 2.82, 5.63, 9.78, 6.06, -0.12, -0.64, 9.38, 10.87, 13.0, 13.43, 9.43, 2.02, 13.2];
    let bias = BiasTable::sparse(16, &[(3, -0.47), (7, -0.52), (15, -0.56)]);
    let mut config = DecoderConfig::new(2, 4, bias);
    config.instrument = true;
    // clones get their true weight, as in the hand-worked trace
    config.estimate_clones = false;
    let res = decode(&spec, &tree, &config, &llrs)?;
    for (block, s) in &res.block_llrs {
        let s: Vec<String> = s.iter().map(|x| format!("{x:.2}")).collect();
        println!("block {block}: S = ({})", s.join(", "));
    }
    let pushed: Vec<String> = res.pushed.iter().map(|x| format!("{x:+.2}")).collect();
    println!("pushed scores: {}", pushed.join(" "));
    println!("status {}, {} iterations, codeword {:?}", res.status, res.iterations, res.codeword);
    Ok(())
}
