//! Exhaustive search for solutions, scalable solutions and pseudo-solutions,
//! plus the explicit constructions.
//!
//! The search is a depth-first AND/OR walk: a state is solved with `r`
//! weighings if it is already a valid ending, or if some weighing splits it
//! into three states each solved with `r - 1`. Coins that a transposition
//! of the state leaves unchanged are interchangeable, so only one weighing
//! per class composition is tried. Candidate weighings are tried in order of
//! (pan size, sorted left pan, sorted right pan), which makes the first
//! witness the least one in that order.

pub mod construct;
pub(crate) mod engine;

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

pub use construct::{classic_fake_tree, generate_power_solution};
pub use engine::{PruneFlags, Progress};

use crate::model::StrategyTree;
use crate::scaling::Completer;
use crate::verify::{verify_fc, verify_pseudo};
use engine::{initial_rows, Engine, EngineConfig, LeafRule};

/// Largest `w` that [`search_best`] accepts without an override.
pub const DEFAULT_CEILING: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("{coins} coins cannot be narrowed to {output_size} in {weighings} weighing(s)")]
    TooManyCoins {
        coins: usize,
        weighings: u32,
        output_size: usize,
    },
    #[error("{weighings} weighings is above the ceiling {ceiling}; raise it explicitly")]
    InfeasibleDepth { weighings: u32, ceiling: u32 },
    #[error("budget exhausted while deciding {coins} coins: {summary}")]
    BudgetExceeded { coins: usize, summary: FrontierSummary },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Solution,
    ScalableSolution,
    PseudoSolution,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Solution => "solution",
            SearchMode::ScalableSolution => "scalable",
            SearchMode::PseudoSolution => "pseudo",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub weighings: u32,
    pub coins: usize,
    pub mode: SearchMode,
    pub prune: PruneFlags,
    /// Merge interchangeable coins before enumerating weighings.
    pub symmetry: bool,
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Explore the top levels on the rayon pool.
    pub parallel: bool,
    /// Nodes between progress reports.
    pub progress_interval: u64,
}

impl SearchConfig {
    pub fn new(weighings: u32, coins: usize) -> Self {
        SearchConfig {
            weighings,
            coins,
            mode: SearchMode::Solution,
            prune: PruneFlags::ALL,
            symmetry: true,
            node_budget: None,
            time_budget: None,
            parallel: true,
            progress_interval: engine::PROGRESS_EVERY,
        }
    }

    pub fn mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn prune(mut self, prune: PruneFlags) -> Self {
        self.prune = prune;
        self
    }
}

/// Where a budgeted search stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrontierSummary {
    pub nodes_explored: u64,
    pub failed_states_cached: usize,
    pub elapsed_ms: u128,
}

impl fmt::Display for FrontierSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} nodes, {} failed states cached, {} ms",
            self.nodes_explored, self.failed_states_cached, self.elapsed_ms
        )
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Found(StrategyTree),
    ExhaustedNoSolution,
    BudgetExceeded(FrontierSummary),
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&StrategyTree> {
        match &self.verdict {
            Verdict::Found(t) => Some(t),
            _ => None,
        }
    }
}

pub fn search_exists(config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    search_exists_with_progress(config, None)
}

/// As [`search_exists`], calling `progress` every `progress_interval` nodes.
pub fn search_exists_with_progress(
    config: &SearchConfig,
    progress: Option<&(dyn Fn(&Progress) + Sync)>,
) -> Result<SearchOutcome, SearchError> {
    let n = config.coins;
    if !(2..=64).contains(&n) {
        return Err(SearchError::InvalidConfig(format!("coins must be in 2..=64, got {n}")));
    }
    let start = Instant::now();
    let completer = Completer::new();
    let scalable = |rows: &[u64]| completer.group_completable(rows);
    let rule = match config.mode {
        SearchMode::Solution => LeafRule::Fc,
        SearchMode::ScalableSolution => LeafRule::Scalable(&scalable),
        SearchMode::PseudoSolution => LeafRule::Pseudo(&scalable),
    };
    let engine = Engine::new(
        n,
        EngineConfig {
            rule,
            prune: config.prune,
            symmetry: config.symmetry,
            frozen: 0,
            node_budget: config.node_budget,
            deadline: config.time_budget.map(|d| start + d),
            parallel_depth: if config.parallel { 2 } else { 0 },
            progress,
            progress_interval: config.progress_interval,
        },
    );
    let loops = config.mode != SearchMode::Solution;
    let res = engine.solve(&initial_rows(n, loops), config.weighings);
    let elapsed = start.elapsed();
    let nodes = engine.nodes();
    let verdict = match res {
        Ok(Some(root)) => {
            let tree = StrategyTree::new(n, root).expect("engine trees are well formed");
            let rep = match config.mode {
                SearchMode::PseudoSolution => verify_pseudo(&tree),
                _ => verify_fc(&tree),
            }
            .expect("engine trees are well formed");
            assert!(rep.valid, "search produced an invalid tree:\n{rep}");
            Verdict::Found(tree)
        }
        Ok(None) => Verdict::ExhaustedNoSolution,
        Err(_) => Verdict::BudgetExceeded(FrontierSummary {
            nodes_explored: nodes,
            failed_states_cached: engine.memo_len(),
            elapsed_ms: elapsed.as_millis(),
        }),
    };
    Ok(SearchOutcome {
        verdict,
        nodes_explored: nodes,
        elapsed,
    })
}

/// Largest `N` solvable with `weighings`, found by increasing `N` from 2
/// until a search is exhausted. `template` supplies mode, pruning and budgets
/// (applied per search); `ceiling` guards against hopeless depths.
pub fn search_best(
    weighings: u32,
    template: &SearchConfig,
    ceiling: u32,
) -> Result<(usize, StrategyTree), SearchError> {
    if weighings > ceiling {
        return Err(SearchError::InfeasibleDepth { weighings, ceiling });
    }
    let mut best: Option<(usize, StrategyTree)> = None;
    for n in 2..=64 {
        let cfg = SearchConfig {
            weighings,
            coins: n,
            ..template.clone()
        };
        match search_exists(&cfg)?.verdict {
            Verdict::Found(t) => best = Some((n, t)),
            Verdict::ExhaustedNoSolution => break,
            Verdict::BudgetExceeded(summary) => return Err(SearchError::BudgetExceeded { coins: n, summary }),
        }
    }
    best.ok_or_else(|| SearchError::InvalidConfig("no solvable coin count".into()))
}
