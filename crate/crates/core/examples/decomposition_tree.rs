//! Prints the decomposition tree of the (16,10) code and the leaf kinds of a
//! (256,128) code under the default and the symbol-by-symbol policy.

use polar_seq::codespec::{construct_frozen_set, CodeSpec};
use polar_seq::decomposition::{build_tree, TreePolicy};

fn main() -> polar_seq::Result<()> {
    let small = CodeSpec::polar(4, vec![0, 4, 8, 9, 10, 12])?;
    print!("{}", build_tree(&small, &TreePolicy::default()).dump());

    let spec = CodeSpec::polar(8, construct_frozen_set(8, 128, 2.0))?;
    for (name, policy) in [("default", TreePolicy::default()), ("symbolwise", TreePolicy::symbolwise())] {
        let tree = build_tree(&spec, &policy);
        let mut kinds = std::collections::BTreeMap::new();
        for leaf in tree.leaves() {
            *kinds.entry(leaf.kind().name()).or_insert(0) += 1;
        }
        println!("(256,128) {name}: {} blocks {kinds:?}", tree.leaf_count());
    }
    Ok(())
}
