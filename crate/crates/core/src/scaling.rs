//! Tripling a solution: every coin becomes a group of three, the weighings
//! are replayed on groups, and each leaf is finished with a short completion
//! found by local search.
//!
//! Because every coin of a group always shares a pan, the scaled residual at
//! a leaf is the group graph along the path (loops included) blown up to
//! coins: `(f, c)` with `f != c` survives iff the groups of `f` and `c` are
//! joined.

use std::collections::HashMap;

use dashmap::DashMap;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::{iter_bits, BitMatrix};
use crate::model::{path_string, Coin, Leaf, Node, Outcome, PairState, Side, StrategyTree, Weighing};
use crate::search::construct::classic_fake_tree;
use crate::search::engine::{Engine, EngineConfig, LeafRule, PruneFlags, Rows};
use crate::verify::{verify_fc, verify_pseudo};

/// Residual-free coins offered to a completion as makeweights.
const MAKEWEIGHTS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScaleError {
    #[error("input is not a valid solution: {0}")]
    InvalidInput(String),
    #[error("no completion of depth <= {max_depth} for the leaf at {path}")]
    CompletionNotFound { path: String, max_depth: u32 },
    #[error("leaf at {path} needs {coins} coins in its local instance, more than 64")]
    InstanceTooLarge { path: String, coins: usize },
    #[error("scaled tree failed verification: {0}")]
    Verification(String),
    #[error("scaled tree would need {0} coins")]
    TooManyCoins(usize),
}

/// The three coins that replace coin `c`.
pub fn triple(c: Coin) -> [Coin; 3] {
    let b = 3 * c.0;
    [Coin(b - 2), Coin(b - 1), Coin(b)]
}

/// `weighing` with every coin replaced by its triple.
pub fn scale_weighing(w: &Weighing) -> Weighing {
    let up = |pan: &[Coin]| pan.iter().flat_map(|&c| triple(c)).collect::<Vec<_>>();
    Weighing::new(up(w.left()), up(w.right())).expect("triples of disjoint pans are disjoint")
}

/// A coin-level instance small enough for the search engine.
struct Local {
    rows: Rows,
    frozen: u64,
    /// local index -> global coin; the phantom has no global coin
    map: Vec<Option<Coin>>,
}

/// Compresses a residual to: candidate fakes, a few makeweights, and one
/// never-weighed phantom standing for every other chameleon candidate.
fn local_instance(m: &BitMatrix) -> Result<Local, usize> {
    let n = m.n();
    let fakes = m.row_support();
    let chams = m.column_support();
    let fake_list: Vec<usize> = fakes.iter().collect();
    let cham_only: Vec<usize> = chams.iter().filter(|&c| !fakes.contains(c)).collect();
    let free: Vec<usize> = (0..n)
        .filter(|&c| !fakes.contains(c) && !chams.contains(c))
        .take(MAKEWEIGHTS)
        .collect();
    let extra: Vec<usize> = cham_only.iter().copied().take(MAKEWEIGHTS - free.len()).collect();
    let merged: Vec<usize> = cham_only[extra.len()..].to_vec();

    let mut order: Vec<usize> = fake_list.clone();
    order.extend(&extra);
    order.extend(&free);
    let phantom = (!merged.is_empty()).then_some(order.len());
    let size = order.len() + phantom.is_some() as usize;
    if size > 64 {
        return Err(size);
    }
    let mut index: HashMap<usize, usize> = order.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    if let Some(z) = phantom {
        for &g in &merged {
            index.insert(g, z);
        }
    }
    let mut rows: Rows = smallvec::smallvec![0u64; size];
    for (i, &g) in fake_list.iter().enumerate() {
        for c in iter_bits(m.row(g)) {
            rows[i] |= 1u64 << index[&c];
        }
    }
    let mut map: Vec<Option<Coin>> = order.iter().map(|&g| Some(Coin::from_index(g))).collect();
    if phantom.is_some() {
        map.push(None);
    }
    Ok(Local {
        rows,
        frozen: phantom.map_or(0, |z| 1u64 << z),
        map,
    })
}

/// Finds and caches short completions of residual states.
#[derive(Default)]
pub(crate) struct Completer {
    local: DashMap<(Rows, u64, u32, bool), Option<Node>>,
    groups: DashMap<Rows, bool>,
}

impl Completer {
    pub fn new() -> Self {
        Self::default()
    }

    fn solve_local(&self, l: &Local, depth: u32, keep_scalable: bool) -> Option<Node> {
        let key = (l.rows.clone(), l.frozen, depth, keep_scalable);
        if let Some(hit) = self.local.get(&key) {
            return hit.clone();
        }
        let scalable = |rows: &[u64]| self.group_completable(rows);
        let rule = if keep_scalable {
            LeafRule::Scalable(&scalable)
        } else {
            LeafRule::Fc
        };
        let mut cfg = EngineConfig::sequential(rule);
        cfg.frozen = l.frozen;
        cfg.prune = PruneFlags {
            def_bound: false,
            ..PruneFlags::ALL
        };
        let found = Engine::new(l.rows.len(), cfg)
            .solve(&l.rows, depth)
            .expect("completion search has no budget");
        self.local.insert(key, found.clone());
        found
    }

    /// A completion of depth at most `max_depth` for residual `m`, in global
    /// coins. At each depth a completion that can itself be scaled again is
    /// preferred.
    pub fn complete(&self, m: &BitMatrix, max_depth: u32) -> Result<Option<Node>, usize> {
        self.complete_with(m, max_depth, true)
    }

    fn complete_with(&self, m: &BitMatrix, max_depth: u32, prefer_scalable: bool) -> Result<Option<Node>, usize> {
        let l = local_instance(m)?;
        let mut out = None;
        'depths: for d in 2.min(max_depth)..=max_depth {
            for keep in [true, false] {
                if keep && !prefer_scalable {
                    continue;
                }
                if let Some(node) = self.solve_local(&l, d, keep) {
                    out = Some(node);
                    break 'depths;
                }
            }
        }
        Ok(out.map(|node| {
            node.relabeled(&|c| l.map[c.index()].expect("the phantom coin is never used"))
        }))
    }

    /// Whether the scaled residual of group graph `rows` finishes in two weighings.
    pub fn group_completable(&self, rows: &[u64]) -> bool {
        if let Some(v) = self.groups.get(rows) {
            return *v;
        }
        let v = self
            .complete_with(&blow_up(rows), 2, false)
            .map(|n| n.is_some())
            .unwrap_or(false);
        self.groups.insert(Rows::from_slice(rows), v);
        v
    }
}

/// Coin-level residual of a group graph given as one row per group.
fn blow_up(rows: &[u64]) -> BitMatrix {
    let groups = rows.len();
    let mut m = BitMatrix::empty(3 * groups);
    for (g, &row) in rows.iter().enumerate() {
        for h in iter_bits(&[row]) {
            for a in 0..3 {
                for b in 0..3 {
                    let (f, c) = (3 * g + a, 3 * h + b);
                    if f != c {
                        m.set(f, c);
                    }
                }
            }
        }
    }
    m
}

pub(crate) fn group_completable_matrix(completer: &Completer, g: &BitMatrix) -> bool {
    let rows: Rows = (0..g.n()).map(|i| g.row(i)[0]).collect();
    completer.group_completable(&rows)
}

/// Output leaf whose two coins were never separated in a helpful way.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafDiagnosis {
    pub path: String,
    /// Number of the line holding the leaf, in canonical numbering.
    pub line: u64,
    pub leaf: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalabilityReport {
    pub scalable: bool,
    pub offending: Vec<LeafDiagnosis>,
}

/// Which of the four unhelpful situations a weighing is for outputs `a`, `b`:
/// 1 both on the lighter pan, 2 both off a balanced scale, 3 only `a` on the
/// lighter pan, 4 only `b` on the lighter pan.
fn unhelpful_case(w: &Weighing, o: Outcome, a: Coin, b: Coin) -> Option<u8> {
    let light = match o {
        Outcome::Balanced => None,
        Outcome::LeftLight => Some(Side::Left),
        Outcome::RightLight => Some(Side::Right),
    };
    let on_light = |s: Side| Some(s) == light;
    match (w.side_of(a), w.side_of(b)) {
        (Side::Off, Side::Off) => (o == Outcome::Balanced).then_some(2),
        (x, Side::Off) => on_light(x).then_some(3),
        (Side::Off, y) => on_light(y).then_some(4),
        (x, y) => (x == y && on_light(x)).then_some(1),
    }
}

/// True when no weighing on the path separates `a` from `b`. Each coin
/// having been alone on a lighter pan at some point does separate them:
/// each group then holds exactly one coin that is not real.
fn never_separated(path: &[(Weighing, Outcome)], a: Coin, b: Coin) -> bool {
    let mut seen = [false; 5];
    for (w, o) in path {
        match unhelpful_case(w, *o, a, b) {
            Some(c) => seen[c as usize] = true,
            None => return false,
        }
    }
    !(seen[3] && seen[4])
}

/// Checks every reachable two-coin output for a path on which its coins were
/// never usefully separated.
pub fn is_scalable(tree: &StrategyTree) -> Result<ScalabilityReport, ScaleError> {
    let rep = verify_fc(tree).map_err(|e| ScaleError::InvalidInput(e.to_string()))?;
    if !rep.valid {
        return Err(ScaleError::InvalidInput(format!(
            "{} violation(s) as a fake + chameleon solution",
            rep.violations.len()
        )));
    }
    let mut offending = Vec::new();
    let mut path: Vec<(Weighing, Outcome)> = Vec::new();
    scan(&tree.root, &PairState::initial(tree.n_coins), &mut path, &mut offending);
    Ok(ScalabilityReport {
        scalable: offending.is_empty(),
        offending,
    })
}

fn line_of(path: &[Outcome]) -> u64 {
    let mut line = 0u64;
    for o in path.iter().take(path.len().saturating_sub(1)) {
        line = 3 * line + 1 + o.index() as u64;
    }
    line
}

fn scan(node: &Node, state: &PairState, path: &mut Vec<(Weighing, Outcome)>, out: &mut Vec<LeafDiagnosis>) {
    match node {
        Node::Terminal(leaf) => {
            if let Leaf::Output2(a, b) = leaf {
                if !state.is_empty() && never_separated(path, *a, *b) {
                    let outcomes: Vec<Outcome> = path.iter().map(|p| p.1).collect();
                    out.push(LeafDiagnosis {
                        path: path_string(&outcomes),
                        line: line_of(&outcomes),
                        leaf: leaf.to_string(),
                    });
                }
            }
        }
        Node::Decision { weighing, children } => {
            for o in Outcome::ALL {
                let s = state.filter(weighing, o);
                path.push((weighing.clone(), o));
                scan(&children[o.index()], &s, path, out);
                path.pop();
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScaleResult {
    pub tree: StrategyTree,
    /// Deepest completion appended to any leaf.
    pub completion_depth_used: usize,
    /// Completion appended at each original leaf, by outcome path.
    pub per_leaf: Vec<(Vec<Outcome>, Node)>,
}

struct LeafJob {
    path: Vec<Outcome>,
    leaf: Leaf,
    /// Scaled residual with the diagonal kept: a loop at `x` means the next
    /// scaling may find both odd coins inside `x`'s triple.
    residual: BitMatrix,
}

fn collect_leaves(node: &Node, state: &BitMatrix, path: &mut Vec<Outcome>, out: &mut Vec<LeafJob>) {
    match node {
        Node::Terminal(leaf) => out.push(LeafJob {
            path: path.clone(),
            leaf: leaf.clone(),
            residual: state.clone(),
        }),
        Node::Decision { weighing, children } => {
            let sw = scale_weighing(weighing);
            let (l, r) = sw.masks(state.n());
            for o in Outcome::ALL {
                let s = crate::model::filter_matrix(state, l.words(), r.words(), o);
                path.push(o);
                collect_leaves(&children[o.index()], &s, path, out);
                path.pop();
            }
        }
    }
}

fn rebuild(node: &Node, path: &mut Vec<Outcome>, done: &HashMap<Vec<Outcome>, Node>) -> Node {
    match node {
        Node::Terminal(_) => done[path.as_slice()].clone(),
        Node::Decision { weighing, children } => {
            let mut kid = |o: Outcome| {
                path.push(o);
                let k = rebuild(&children[o.index()], path, done);
                path.pop();
                k
            };
            let kids = [kid(Outcome::Balanced), kid(Outcome::LeftLight), kid(Outcome::RightLight)];
            Node::decision(scale_weighing(weighing), kids)
        }
    }
}

fn chameleon_free(m: &BitMatrix) -> bool {
    let fakes = m.row_support();
    !m.column_support().iter().any(|c| fakes.contains(c))
}

fn complete_job(job: &LeafJob, completer: &Completer, max_depth: u32) -> Result<Option<Node>, ScaleError> {
    if job.residual.is_empty() {
        return Ok(Some(Node::leaf(Leaf::Impossible)));
    }
    let coin_level = job.residual.without_diagonal();
    if matches!(job.leaf, Leaf::FakeSet(_)) && chameleon_free(&coin_level) {
        let coins: Vec<Coin> = coin_level.row_support().iter().map(Coin::from_index).collect();
        return Ok(classic_fake_tree(&coins, 2, 2).ok());
    }
    completer
        .complete(&job.residual, max_depth)
        .map_err(|coins| ScaleError::InstanceTooLarge {
            path: path_string(&job.path),
            coins,
        })
}

/// Every leaf whose scaled residual has no completion of depth `max_depth`.
/// Unlike [`scale_once`] this does not stop at the first one.
pub fn stuck_leaves(tree: &StrategyTree, max_depth: u32) -> Result<Vec<LeafDiagnosis>, ScaleError> {
    let n3 = 3 * tree.n_coins;
    if n3 > u16::MAX as usize {
        return Err(ScaleError::TooManyCoins(n3));
    }
    let mut jobs = Vec::new();
    collect_leaves(&tree.root, &BitMatrix::full(n3, true), &mut Vec::new(), &mut jobs);
    let completer = Completer::new();
    let mut out = Vec::new();
    for job in &jobs {
        if complete_job(job, &completer, max_depth)?.is_none() {
            out.push(LeafDiagnosis {
                path: path_string(&job.path),
                line: line_of(&job.path),
                leaf: job.leaf.to_string(),
            });
        }
    }
    Ok(out)
}

pub(crate) fn scale_once_with(
    tree: &StrategyTree,
    allow_depth3: bool,
    completer: &Completer,
) -> Result<ScaleResult, ScaleError> {
    let valid = if tree.has_fake_sets() {
        verify_pseudo(tree)
    } else {
        verify_fc(tree)
    }
    .map_err(|e| ScaleError::InvalidInput(e.to_string()))?;
    if !valid.valid {
        return Err(ScaleError::InvalidInput(format!(
            "{} violation(s) in {} mode",
            valid.violations.len(),
            valid.mode
        )));
    }
    let n3 = 3 * tree.n_coins;
    if n3 > u16::MAX as usize {
        return Err(ScaleError::TooManyCoins(n3));
    }
    let mut jobs = Vec::new();
    collect_leaves(&tree.root, &BitMatrix::full(n3, true), &mut Vec::new(), &mut jobs);
    let max_depth = if allow_depth3 { 3 } else { 2 };

    let finished: Vec<Result<(Vec<Outcome>, Node), ScaleError>> = jobs
        .into_par_iter()
        .map(|job| {
            let node = complete_job(&job, completer, max_depth)?;
            node.map(|n| (job.path.clone(), n)).ok_or(ScaleError::CompletionNotFound {
                path: path_string(&job.path),
                max_depth,
            })
        })
        .collect();
    let mut per_leaf = Vec::with_capacity(finished.len());
    for f in finished {
        per_leaf.push(f?);
    }
    let done: HashMap<Vec<Outcome>, Node> = per_leaf.iter().cloned().collect();
    let root = rebuild(&tree.root, &mut Vec::new(), &done);
    let scaled = StrategyTree::new(n3, root).map_err(|e| ScaleError::Verification(e.to_string()))?;
    let check = verify_fc(&scaled).map_err(|e| ScaleError::Verification(e.to_string()))?;
    if !check.valid {
        return Err(ScaleError::Verification(check.to_string()));
    }
    let completion_depth_used = per_leaf.iter().map(|(_, n)| n.depth()).max().unwrap_or(0);
    Ok(ScaleResult {
        tree: scaled,
        completion_depth_used,
        per_leaf,
    })
}

/// One scaling step: `(w, N)` becomes `(w + 2, 3N)`, or `(w + 3, 3N)` when
/// `allow_depth3` is set and some leaf needs it. The result is re-verified.
pub fn scale_once(tree: &StrategyTree, allow_depth3: bool) -> Result<ScaleResult, ScaleError> {
    scale_once_with(tree, allow_depth3, &Completer::new())
}

/// `k` scaling steps with two-weighing completions.
pub fn scale_k(tree: &StrategyTree, k: u32) -> Result<StrategyTree, ScaleError> {
    let completer = Completer::new();
    let mut t = tree.clone();
    for _ in 0..k {
        t = scale_once_with(&t, false, &completer)?.tree;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse;

    const TWO_THREE: &str = "0. 1 v 2 : ⇒ 1, ⇒ 2, sym.\n1. 1 v 3 : (2,3), (1,2), (3).\n2. 1 v 3 : (1,3), (1), (3).\n";

    #[test]
    fn triples() {
        assert_eq!(triple(Coin(1)), [Coin(1), Coin(2), Coin(3)]);
        assert_eq!(triple(Coin(4)), [Coin(10), Coin(11), Coin(12)]);
        let w = scale_weighing(&Weighing::from_ids(&[2], &[1]).unwrap());
        assert_eq!(w, Weighing::from_ids(&[4, 5, 6], &[1, 2, 3]).unwrap());
    }

    #[test]
    fn three_coins_scale_to_nine() {
        let t = parse(TWO_THREE, 3).unwrap();
        assert!(is_scalable(&t).unwrap().scalable);
        let s = scale_once(&t, false).unwrap();
        assert_eq!((s.tree.n_coins, s.tree.depth()), (9, 4));
        assert_eq!(s.completion_depth_used, 2);
    }

    #[test]
    fn four_coins_need_a_third_weighing() {
        let t = crate::fixtures::INLINE_2_4.tree().unwrap();
        let rep = is_scalable(&t).unwrap();
        assert!(!rep.scalable);
        assert!(matches!(scale_once(&t, false), Err(ScaleError::CompletionNotFound { .. })));
        let s = scale_once(&t, true).unwrap();
        assert_eq!((s.tree.n_coins, s.tree.depth()), (12, 5));
    }

    #[test]
    fn blow_up_counts() {
        // one group holding both: 3 * 2 ordered pairs inside the triple
        assert_eq!(blow_up(&[1]).count(), 6);
    }
}

