//! `cwlab`: verify, expand, scale, search for and bound weighing strategies.
//!
//! Exit codes: 0 valid or found, 1 invalid or not found, 2 usage or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cwlab::bounds::compose::compose;
use cwlab::bounds::emit_tables;
use cwlab::codec::{self, max_coin_in, parse_interchange_str, serialize_interchange, TextOptions};
use cwlab::scaling::{is_scalable, scale_k, scale_once};
use cwlab::search::{search_exists, PruneFlags, SearchConfig, SearchMode, Verdict};
use cwlab::verify::{verify, Mode};
use cwlab::StrategyTree;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const SCHEMA: &str = "cwlab-cli/1";

#[derive(Parser)]
#[command(name = "cwlab", version, about = "Fake coin + chameleon coin weighing strategies")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Fc,
    Ff,
    Pseudo,
}

#[derive(Copy, Clone, ValueEnum)]
enum SearchModeArg {
    Solution,
    Scalable,
    Pseudo,
}

#[derive(Subcommand)]
enum Command {
    /// Check a tree against every (fake, chameleon) placement.
    Verify {
        file: PathBuf,
        /// Number of coins; inferred from the largest coin id if omitted.
        #[arg(long)]
        coins: Option<usize>,
        #[arg(long, value_enum, default_value = "fc")]
        mode: ModeArg,
    },
    /// Print a tree with every `sym` written out.
    Expand {
        file: PathBuf,
        #[arg(long)]
        coins: Option<usize>,
        /// Use the unicode arrow in goto entries.
        #[arg(long)]
        unicode: bool,
    },
    /// Triple the coins of a scalable tree, `times` times over.
    Scale {
        file: PathBuf,
        #[arg(long)]
        coins: Option<usize>,
        #[arg(long, default_value_t = 1)]
        times: u32,
        /// Allow three-weighing completions (single step only).
        #[arg(long)]
        allow_depth3: bool,
        /// Also write the result here, in line format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a tree of the given depth exists.
    Search {
        #[arg(long)]
        weighings: u32,
        #[arg(long)]
        coins: usize,
        #[arg(long, value_enum, default_value = "solution")]
        mode: SearchModeArg,
        /// Stop after this many seconds.
        #[arg(long)]
        budget: Option<f64>,
        /// Stop after this many search nodes.
        #[arg(long)]
        node_budget: Option<u64>,
        /// Disable all pruning rules.
        #[arg(long)]
        no_prune: bool,
        /// Disable symmetry reduction.
        #[arg(long)]
        no_symmetry: bool,
    },
    /// Print the bound tables.
    Bounds {
        #[arg(long, default_value_t = 10)]
        max_w: u32,
        #[arg(long, default_value_t = 62)]
        max_n: usize,
        /// Write CSV instead of the text table (ignored with --format json).
        #[arg(long)]
        csv: bool,
    },
    /// Build an N-coin tree from groups of `group-size` coins and verify it.
    Compose {
        #[arg(long)]
        coins: usize,
        #[arg(long)]
        group_size: usize,
    },
}

struct Input {
    tree: StrategyTree,
    digest: String,
}

fn load(path: &Path, coins: Option<usize>) -> Result<Input> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = format!("sha256:{:x}", Sha256::digest(text.as_bytes()));
    let tree = if text.trim_start().starts_with('{') {
        parse_interchange_str(&text).with_context(|| path.display().to_string())?
    } else {
        let n = match coins {
            Some(n) => n,
            None => {
                let n = max_coin_in(&text).with_context(|| path.display().to_string())?;
                eprintln!("warning: --coins not given, assuming {n} (largest coin id)");
                n
            }
        };
        codec::parse(&text, n).with_context(|| path.display().to_string())?
    };
    Ok(Input { tree, digest })
}

fn emit_json(mut v: Value) {
    v["schema_version"] = json!(SCHEMA);
    println!("{}", serde_json::to_string_pretty(&v).expect("values serialize"));
}

fn verdict_code(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.format == Format::Json;
    match cli.command {
        Command::Verify { file, coins, mode } => {
            let input = load(&file, coins)?;
            let mode = match mode {
                ModeArg::Fc => Mode::Fc,
                ModeArg::Ff => Mode::Ff,
                ModeArg::Pseudo => Mode::Pseudo,
            };
            let rep = verify(&input.tree, mode)?;
            if json {
                emit_json(json!({ "input_digest": input.digest, "report": rep }));
            } else {
                print!("{rep}");
            }
            Ok(verdict_code(rep.valid))
        }
        Command::Expand { file, coins, unicode } => {
            let input = load(&file, coins)?;
            if json {
                emit_json(json!({ "input_digest": input.digest, "tree": serialize_interchange(&input.tree) }));
            } else {
                let opts = TextOptions { compress_sym: false, unicode_arrow: unicode };
                print!("{}", codec::serialize_text_with(&input.tree, opts));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scale { file, coins, times, allow_depth3, out } => {
            let input = load(&file, coins)?;
            if times == 0 {
                bail!("--times must be at least 1");
            }
            let scaled = if allow_depth3 {
                if times != 1 {
                    bail!("--allow-depth3 applies to a single step");
                }
                scale_once(&input.tree, true)?.tree
            } else {
                scale_k(&input.tree, times)?
            };
            let rep = verify(&scaled, Mode::Fc)?;
            let scalable = is_scalable(&scaled)?.scalable;
            if let Some(out) = &out {
                std::fs::write(out, codec::serialize_text(&scaled)).with_context(|| format!("writing {}", out.display()))?;
            }
            if json {
                emit_json(json!({
                    "input_digest": input.digest,
                    "weighings": scaled.depth(),
                    "coins": scaled.n_coins,
                    "valid": rep.valid,
                    "scalable": scalable,
                    "tree": serialize_interchange(&scaled),
                }));
            } else {
                if out.is_none() {
                    print!("{}", codec::serialize_text(&scaled));
                }
                println!("({},{}) {}", scaled.depth(), scaled.n_coins, if rep.valid { "valid" } else { "invalid" });
                println!("scalable: {scalable}");
            }
            Ok(verdict_code(rep.valid))
        }
        Command::Search { weighings, coins, mode, budget, node_budget, no_prune, no_symmetry } => {
            let mut cfg = SearchConfig::new(weighings, coins).mode(match mode {
                SearchModeArg::Solution => SearchMode::Solution,
                SearchModeArg::Scalable => SearchMode::ScalableSolution,
                SearchModeArg::Pseudo => SearchMode::PseudoSolution,
            });
            if no_prune {
                cfg = cfg.prune(PruneFlags::NONE);
            }
            cfg.symmetry = !no_symmetry;
            cfg.node_budget = node_budget;
            cfg.time_budget = budget.map(Duration::from_secs_f64);
            let out = search_exists(&cfg)?;
            let stats = json!({ "nodes_explored": out.nodes_explored, "elapsed_ms": out.elapsed.as_millis() as u64 });
            let (label, tree, found) = match &out.verdict {
                Verdict::Found(t) => ("found", Some(t), true),
                Verdict::ExhaustedNoSolution => ("no solution", None, false),
                Verdict::BudgetExceeded(_) => ("budget exceeded", None, false),
            };
            if json {
                let mut v = json!({
                    "weighings": weighings,
                    "coins": coins,
                    "mode": cfg.mode,
                    "verdict": label,
                    "stats": stats,
                });
                if let Some(t) = tree {
                    v["tree"] = serialize_interchange(t);
                }
                if let Verdict::BudgetExceeded(s) = &out.verdict {
                    v["frontier"] = json!(s);
                }
                emit_json(v);
            } else {
                if let Some(t) = tree {
                    print!("{}", codec::serialize_text(t));
                }
                match &out.verdict {
                    Verdict::BudgetExceeded(s) => println!("({weighings},{coins}) {label}: {s}"),
                    _ => println!(
                        "({weighings},{coins}) {label} after {} nodes in {:.2?}",
                        out.nodes_explored, out.elapsed
                    ),
                }
            }
            Ok(verdict_code(found))
        }
        Command::Bounds { max_w, max_n, csv } => {
            if max_n < 2 {
                bail!("--max-n must be at least 2");
            }
            let t = emit_tables(max_w, max_n);
            if json {
                emit_json(json!({ "tables": t }));
            } else if csv {
                print!("{}\n{}", t.weighings_csv()?, t.coins_csv()?);
            } else {
                print!("{}", t.to_text());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compose { coins, group_size } => {
            let c = compose(coins, group_size)?;
            if json {
                emit_json(json!({
                    "coins": coins,
                    "group_size": group_size,
                    "groups": c.groups,
                    "leftover": c.leftover,
                    "weighings": c.tree.depth(),
                    "stage_depths": [c.stage_depths.0, c.stage_depths.1],
                    "report": c.report,
                }));
            } else {
                println!(
                    "{coins} coins as {} groups of {group_size} + {} leftover: {} + {} weighings",
                    c.groups, c.leftover, c.stage_depths.0, c.stage_depths.1
                );
                print!("{}", c.report);
            }
            Ok(verdict_code(c.report.valid))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("CWLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: CWLAB_THREADS ignored: {e}");
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
