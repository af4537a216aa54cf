//! The group graph for three coins and the counting bound it feeds.

use cwlab::graph::{prune_bound_holds, GroupGraph};
use cwlab::model::{Outcome, Weighing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = GroupGraph::initial(3);
    println!("start: {:?}", g.stats());
    let w = Weighing::from_ids(&[1], &[2])?;
    for o in Outcome::ALL {
        let next = g.update(&w, o)?;
        println!("after {w} with {o:?}: {:?}\n{}", next.stats(), next.to_edge_list());
    }
    for n in 5..=8 {
        println!("{n} coins fit in 3 weighings by the bound: {}", prune_bound_holds(GroupGraph::initial(n).stats(), 3));
    }
    Ok(())
}
