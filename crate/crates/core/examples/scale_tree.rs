//! Triples solutions: the scalability test, one scaling step, and repeats.

use cwlab::fixtures;
use cwlab::scaling::{is_scalable, scale_k, scale_once};
use cwlab::verify::verify_fc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bad = fixtures::INLINE_3_6.tree()?;
    let rep = is_scalable(&bad)?;
    println!("(3,6) scalable: {}", rep.scalable);
    for d in &rep.offending {
        println!("  leaf {} at path {} (line {})", d.leaf, d.path, d.line);
    }
    // an extra weighing rescues it
    let s = scale_once(&bad, true)?;
    println!("with a deeper completion: ({},{})", s.tree.depth(), s.tree.n_coins);

    let t = fixtures::C_5_20.tree()?;
    for k in 1..=2 {
        let big = scale_k(&t, k)?;
        let ok = verify_fc(&big)?.valid;
        println!("(5,20) scaled {k}x -> ({},{}) valid={ok}", big.depth(), big.n_coins);
    }
    Ok(())
}
