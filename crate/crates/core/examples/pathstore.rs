//! Copy-on-write LLR arrays: cloning a path shares every array, and only the
//! layers a path writes afterwards get fresh storage.

use polar_seq::kernel::OpCount;
use polar_seq::pathstore::ArrayBank;

fn main() -> polar_seq::Result<()> {
    let m = 4;
    let mut bank = ArrayBank::new(m, 4, ArrayBank::default_capacity(m, 4, 2));
    let llrs = [0.44, 7.46, 7.19, 2.82, 5.63, 9.78, 6.06, -0.12, -0.64, 9.38, 10.87, 13.0, 13.43, 9.43, 2.02, 13.2];
    let mut ops = OpCount::default();
    let a = bank.assign_initial_path()?;
    bank.load_input(a, &llrs)?;
    bank.calc_s(a, 2, 0, &mut ops)?;
    println!("first block LLRs: {:?}", bank.s_read(a, 2)?);

    // two hypotheses for the first (4,3) block
    bank.c_write(a, 2, 0)?.copy_from_slice(&[1, 0, 0, 1]);
    let b = bank.clone_path(a)?;
    println!("clone shares the LLR arrays: {}", bank.array_id(false, a, 2) == bank.array_id(false, b, 2));
    bank.c_write(b, 2, 0)?.copy_from_slice(&[0, 0, 0, 0]);

    for l in [a, b] {
        bank.calc_s(l, 2, 1, &mut ops)?;
        println!("path {l}, second block LLRs: {:?}", bank.s_read(l, 2)?);
    }
    bank.check_refcounts()?;
    println!("{:?}, {} LLR operations", bank.stats(), ops.total());
    Ok(())
}
