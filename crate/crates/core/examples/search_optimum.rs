//! Exhaustive search for the largest coin count per weighing budget.

use std::time::Duration;

use cwlab::search::{search_best, search_exists_with_progress, Progress, SearchConfig, SearchMode, DEFAULT_CEILING};
use cwlab::serialize_text;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for w in 1..=3 {
        for mode in [SearchMode::Solution, SearchMode::ScalableSolution] {
            let (n, _) = search_best(w, &SearchConfig::new(w, 2).mode(mode), DEFAULT_CEILING)?;
            println!("{w} weighings, {mode}: {n} coins");
        }
    }

    let mut cfg = SearchConfig::new(4, 11);
    cfg.time_budget = Some(Duration::from_secs(600));
    cfg.progress_interval = 128;
    let tick = |p: &Progress| eprintln!("  .. {} nodes, {} weighings left", p.nodes, p.remaining);
    let out = search_exists_with_progress(&cfg, Some(&tick))?;
    println!("(4,11) after {} nodes in {:.2?}", out.nodes_explored, out.elapsed);
    if let Some(t) = out.found() {
        print!("{}", serialize_text(t));
    }
    Ok(())
}
