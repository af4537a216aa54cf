//! Checks the shipped solutions, then shows what a failing report looks like.

use cwlab::fixtures::{self, ALL};
use cwlab::verify::{verify, Mode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for f in &ALL {
        let t = f.tree()?;
        let rep = verify(&t, f.mode)?;
        println!("{:<18} ({},{}) {:<6} valid={}", f.name, f.weighings, f.coins, f.mode, rep.valid);
    }

    // The pseudo solution ends in fake-set leaves, which plain FC rejects.
    let pseudo = fixtures::PSEUDO_4_11.tree()?;
    println!("\n{}", verify(&pseudo, Mode::Fc)?);
    Ok(())
}
