//! The bounded double-ended queue: best paths come out of the top, and the
//! worst path is evicted when the queue is full.

use polar_seq::depq::{Depq, ScoredEntry};

fn main() -> polar_seq::Result<()> {
    let mut q = Depq::new(4);
    for (path, score) in [0.47, -0.09, -2.42, 0.12, -0.5, 0.3].into_iter().enumerate() {
        if q.len() == q.capacity() {
            let worst = q.pop_min()?;
            println!("full, evict path {} ({:+.2})", worst.path, worst.score);
        }
        q.push(ScoredEntry { score, path, block: 0 })?;
    }
    while let Ok(e) = q.pop_max() {
        println!("pop path {} ({:+.2})", e.path, e.score);
    }
    println!("{} key comparisons", q.comparisons());
    Ok(())
}
