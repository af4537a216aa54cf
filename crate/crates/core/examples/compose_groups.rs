//! Builds a solution for N coins from a K-coin solution run on groups.

use cwlab::bounds::compose::compose;

fn main() {
    for (n, a) in [(9, 3), (13, 4), (30, 3), (40, 4)] {
        match compose(n, a) {
            Ok(c) => println!(
                "N={n}, groups of {a}: {} groups + {} leftover, {}+{} weighings, valid={}",
                c.groups, c.leftover, c.stage_depths.0, c.stage_depths.1, c.report.valid
            ),
            Err(e) => println!("N={n}, groups of {a}: {e}"),
        }
    }
}
