//! Checking strategy trees against an adversarial chameleon.
//!
//! Three readings of the same tree are supported:
//!
//! * **FC**: one fake plus one chameleon; every output leaf must contain the fake.
//! * **FF**: two equally light fakes; every reachable output must name both.
//! * **Pseudo**: as FC, but a leaf may also name a set of up to six coins that
//!   holds the fake. The set must exclude the chameleon, unless tripling the
//!   coins still leaves a two-weighing finish for that leaf.
//!
//! Output leaves whose residual is empty are reported as dead leaves but are
//! not violations.

use std::fmt;

use serde::Serialize;

use crate::bits::BitMatrix;
use crate::scaling::{group_completable_matrix, Completer};
use crate::model::{
    filter_matrix, path_string, Coin, Leaf, ModelError, Node, Outcome, PairState, StrategyTree,
    Weighing,
};

/// Subtrees this close to the root are verified in parallel.
const PARALLEL_DEPTH: usize = 3;

/// How many residual pairs a violation keeps for display.
const RESIDUAL_SAMPLE: usize = 16;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fc,
    Ff,
    Pseudo,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fc => "fc",
            Mode::Ff => "ff",
            Mode::Pseudo => "pseudo",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Violation {
    #[serde(serialize_with = "ser_path")]
    pub path: Vec<Outcome>,
    #[serde(serialize_with = "ser_leaf")]
    pub leaf: Leaf,
    /// A consistent assignment the leaf gets wrong: `(fake, chameleon)` in
    /// FC/pseudo mode, the two fakes in FF mode.
    pub witness: Option<(Coin, Coin)>,
    pub residual_size: usize,
    pub residual_sample: Vec<(Coin, Coin)>,
    pub reason: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub mode: Mode,
    pub n_coins: usize,
    pub violations: Vec<Violation>,
    #[serde(serialize_with = "ser_paths")]
    pub dead_leaves: Vec<Vec<Outcome>>,
    pub max_depth: usize,
    pub leaves: usize,
}

fn ser_path<S: serde::Serializer>(p: &[Outcome], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&path_string(p))
}

fn ser_paths<S: serde::Serializer>(ps: &[Vec<Outcome>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| path_string(p)))
}

fn ser_leaf<S: serde::Serializer>(l: &Leaf, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&l.to_string())
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} ({} mode, {} coins, depth {}, {} leaves, {} dead)",
            if self.valid { "valid" } else { "INVALID" },
            self.mode,
            self.n_coins,
            self.max_depth,
            self.leaves,
            self.dead_leaves.len()
        )?;
        for v in &self.violations {
            write!(f, "  {} -> {}: {}", path_string(&v.path), v.leaf, v.reason)?;
            if let Some((a, b)) = v.witness {
                write!(f, " [witness {a},{b}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Partial {
    violations: Vec<Violation>,
    dead: Vec<Vec<Outcome>>,
    leaves: usize,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.violations.extend(other.violations);
        self.dead.extend(other.dead);
        self.leaves += other.leaves;
        self
    }
}

/// Verifies `tree` as a fake + chameleon solution.
pub fn verify_fc(tree: &StrategyTree) -> Result<VerificationReport, ModelError> {
    verify(tree, Mode::Fc)
}

/// Verifies `tree` as a two-fake solution.
pub fn verify_ff(tree: &StrategyTree) -> Result<VerificationReport, ModelError> {
    verify(tree, Mode::Ff)
}

/// Verifies `tree` as a pseudo-solution (fake-set leaves allowed).
pub fn verify_pseudo(tree: &StrategyTree) -> Result<VerificationReport, ModelError> {
    verify(tree, Mode::Pseudo)
}

pub fn verify(tree: &StrategyTree, mode: Mode) -> Result<VerificationReport, ModelError> {
    tree.validate()?;
    let n = tree.n_coins;
    let start = match mode {
        Mode::Fc => PairState::initial(n).m,
        // group graph: the diagonal tracks groups that may hold both
        Mode::Pseudo => BitMatrix::full(n, true),
        Mode::Ff => ff_initial(n),
    };
    let ctx = Ctx {
        mode,
        completer: Completer::new(),
    };
    let mut path = Vec::new();
    let p = walk(&tree.root, &start, &ctx, &mut path);
    Ok(VerificationReport {
        valid: p.violations.is_empty(),
        mode,
        n_coins: n,
        violations: p.violations,
        dead_leaves: p.dead,
        max_depth: tree.depth(),
        leaves: p.leaves,
    })
}

/// Unordered fake pairs `{a, b}`, stored as the upper triangle `a < b`.
fn ff_initial(n: usize) -> BitMatrix {
    let mut m = BitMatrix::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            m.set(a, b);
        }
    }
    m
}

fn ff_filter(m: &BitMatrix, w: &Weighing, outcome: Outcome) -> BitMatrix {
    let n = m.n();
    let (l, r) = w.masks(n);
    let pan = |i: usize| (l.contains(i) as i32) - (r.contains(i) as i32);
    let mut out = BitMatrix::empty(n);
    for (a, b) in m.iter_pairs() {
        let diff = pan(a) + pan(b);
        let o = match diff.cmp(&0) {
            std::cmp::Ordering::Equal => Outcome::Balanced,
            std::cmp::Ordering::Greater => Outcome::LeftLight,
            std::cmp::Ordering::Less => Outcome::RightLight,
        };
        if o == outcome {
            out.set(a, b);
        }
    }
    out
}

fn child_state(state: &BitMatrix, w: &Weighing, o: Outcome, mode: Mode) -> BitMatrix {
    match mode {
        Mode::Ff => ff_filter(state, w, o),
        _ => {
            let (l, r) = w.masks(state.n());
            filter_matrix(state, l.words(), r.words(), o)
        }
    }
}

struct Ctx {
    mode: Mode,
    completer: Completer,
}

fn walk(node: &Node, state: &BitMatrix, ctx: &Ctx, path: &mut Vec<Outcome>) -> Partial {
    let mode = ctx.mode;
    match node {
        Node::Terminal(leaf) => check_leaf(leaf, state, ctx, path),
        Node::Decision { weighing, children } => {
            if path.len() < PARALLEL_DEPTH {
                let run = |o: Outcome| {
                    let s = child_state(state, weighing, o, mode);
                    let mut p = path.clone();
                    p.push(o);
                    walk(&children[o.index()], &s, ctx, &mut p)
                };
                let (a, (b, c)) = rayon::join(
                    || run(Outcome::Balanced),
                    || rayon::join(|| run(Outcome::LeftLight), || run(Outcome::RightLight)),
                );
                a.merge(b).merge(c)
            } else {
                let mut acc = Partial::default();
                for o in Outcome::ALL {
                    let s = child_state(state, weighing, o, mode);
                    path.push(o);
                    acc = acc.merge(walk(&children[o.index()], &s, ctx, path));
                    path.pop();
                }
                acc
            }
        }
    }
}

fn pairs_of(state: &BitMatrix) -> impl Iterator<Item = (Coin, Coin)> + '_ {
    state
        .iter_pairs()
        .map(|(a, b)| (Coin::from_index(a), Coin::from_index(b)))
}

fn without_diagonal(m: &BitMatrix) -> BitMatrix {
    let mut out = m.clone();
    for i in 0..m.n() {
        out.clear(i, i);
    }
    out
}

fn check_leaf(leaf: &Leaf, group: &BitMatrix, ctx: &Ctx, path: &[Outcome]) -> Partial {
    let mode = ctx.mode;
    let plain;
    let state = if mode == Mode::Pseudo {
        plain = without_diagonal(group);
        &plain
    } else {
        group
    };
    let mut p = Partial {
        leaves: 1,
        ..Partial::default()
    };
    let empty = state.is_empty();
    if empty && leaf.is_output() {
        p.dead.push(path.to_vec());
    }
    if empty {
        return p;
    }
    let violation = |witness: Option<(Coin, Coin)>, reason: String| Violation {
        path: path.to_vec(),
        leaf: leaf.clone(),
        witness,
        residual_size: state.count(),
        residual_sample: pairs_of(state).take(RESIDUAL_SAMPLE).collect(),
        reason,
    };
    let found = match mode {
        Mode::Fc | Mode::Pseudo => fc_leaf_error(leaf, state, mode, &|| {
            group.n() <= 64 && group_completable_matrix(&ctx.completer, group)
        }),
        Mode::Ff => ff_leaf_error(leaf, state),
    };
    if let Some((w, reason)) = found {
        p.violations.push(violation(w, reason));
    }
    p
}

fn fc_leaf_error(
    leaf: &Leaf,
    state: &BitMatrix,
    mode: Mode,
    scaled_finish: &dyn Fn() -> bool,
) -> Option<(Option<(Coin, Coin)>, String)> {
    let first_bad = |ok: &dyn Fn(Coin, Coin) -> bool| pairs_of(state).find(|&(f, c)| !ok(f, c));
    match leaf {
        Leaf::Impossible => {
            let w = pairs_of(state).next();
            Some((w, "branch marked impossible is reachable".into()))
        }
        Leaf::Output1(a) => first_bad(&|f, _| f == *a)
            .map(|w| (Some(w), format!("fake may be {} rather than {a}", w.0))),
        Leaf::Output2(a, b) => first_bad(&|f, _| f == *a || f == *b)
            .map(|w| (Some(w), format!("fake may be {}, outside the output", w.0))),
        Leaf::FakeSet(s) => {
            if mode != Mode::Pseudo {
                return Some((None, "fake-set leaf is not allowed in this mode".into()));
            }
            if s.len() > 6 {
                return Some((None, format!("fake set of {} coins is too large", s.len())));
            }
            if let Some(w) = first_bad(&|f, _| s.contains(&f)) {
                return Some((Some(w), format!("fake may be {}, outside the set", w.0)));
            }
            let inside = first_bad(&|_, c| !s.contains(&c))?;
            if scaled_finish() {
                None
            } else {
                Some((
                    Some(inside),
                    format!(
                        "chameleon may be {}, inside the set, and the tripled set has no two-weighing finish",
                        inside.1
                    ),
                ))
            }
        }
    }
}

fn ff_leaf_error(leaf: &Leaf, state: &BitMatrix) -> Option<(Option<(Coin, Coin)>, String)> {
    let first = pairs_of(state).next();
    match leaf {
        Leaf::Output2(a, b) => {
            let bad = pairs_of(state).find(|&(x, y)| (x, y) != (*a, *b));
            bad.map(|w| (Some(w), format!("fakes may be {} and {}", w.0, w.1)))
        }
        Leaf::Output1(_) => Some((first, "single-coin output reachable with two fakes".into())),
        Leaf::Impossible => Some((first, "branch marked impossible is reachable".into())),
        Leaf::FakeSet(_) => Some((first, "fake-set leaf reachable with two fakes".into())),
    }
}

/// Residual `(fake, chameleon)` state at the end of `path`, or `None` if the
/// path leaves the tree.
pub fn residual_at(tree: &StrategyTree, path: &[Outcome]) -> Option<PairState> {
    let mut state = PairState::initial(tree.n_coins);
    let mut node = &tree.root;
    for &o in path {
        match node {
            Node::Decision { weighing, children } => {
                state = state.filter(weighing, o);
                node = &children[o.index()];
            }
            Node::Terminal(_) => return None,
        }
    }
    Some(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[u16], r: &[u16]) -> Weighing {
        Weighing::from_ids(l, r).unwrap()
    }

    fn out(a: u16, b: u16) -> Node {
        Node::leaf(Leaf::output2(Coin(a), Coin(b)))
    }

    fn one(a: u16) -> Node {
        Node::leaf(Leaf::Output1(Coin(a)))
    }

    /// The three-coin, two-weighing strategy built by hand.
    fn two_three() -> StrategyTree {
        let second = |x: u16| w(&[x], &[3]);
        let root = Node::decision(
            w(&[1], &[2]),
            [
                Node::decision(second(1), [out(2, 3), out(1, 2), one(3)]),
                Node::decision(second(1), [out(1, 3), one(1), one(3)]),
                Node::decision(second(2), [out(2, 3), one(2), one(3)]),
            ],
        );
        StrategyTree::new(3, root).unwrap()
    }

    #[test]
    fn two_coins_zero_weighings() {
        let t = StrategyTree::new(2, out(1, 2)).unwrap();
        assert!(verify_fc(&t).unwrap().valid);
        assert!(verify_ff(&t).unwrap().valid);
    }

    #[test]
    fn hand_built_two_three_is_valid() {
        let t = two_three();
        let r = verify_fc(&t).unwrap();
        assert!(r.valid, "{r}");
        assert_eq!(r.max_depth, 2);
        assert_eq!(r.leaves, 9);
        assert!(verify_ff(&t).unwrap().valid);
        assert!(verify_pseudo(&t).unwrap().valid);
    }

    #[test]
    fn wrong_output_reports_witness() {
        let root = Node::decision(w(&[1], &[2]), [out(1, 2), one(1), one(2)]);
        let t = StrategyTree::new(3, root).unwrap();
        let r = verify_fc(&t).unwrap();
        assert!(!r.valid);
        let v = &r.violations[0];
        assert_eq!(v.path, vec![Outcome::Balanced]);
        assert_eq!(v.witness.unwrap().0, Coin(3));
    }

    #[test]
    fn single_output_fails_ff() {
        let t = StrategyTree::new(2, one(1)).unwrap();
        assert!(!verify_fc(&t).unwrap().valid);
        let r = verify_ff(&t).unwrap();
        assert!(!r.valid);
    }

    #[test]
    fn fake_set_rejected_in_fc_mode() {
        let t = StrategyTree::new(4, Node::leaf(Leaf::fake_set(vec![Coin(1), Coin(2), Coin(3)])))
            .unwrap();
        assert!(!verify_fc(&t).unwrap().valid);
        // the chameleon can be anywhere at the root, including inside the set
        assert!(!verify_pseudo(&t).unwrap().valid);
    }

    #[test]
    fn dead_leaves_are_warnings() {
        let again = Node::decision(w(&[1], &[2]), [out(1, 2), one(1), one(2)]);
        let root = Node::decision(w(&[1], &[2]), [out(1, 2), again, one(2)]);
        let t = StrategyTree::new(2, root).unwrap();
        let r = verify_fc(&t).unwrap();
        assert!(r.valid, "{r}");
        assert_eq!(r.dead_leaves, vec![vec![Outcome::LeftLight, Outcome::RightLight]]);
        assert!(verify_fc(&two_three()).unwrap().dead_leaves.is_empty());
    }

    #[test]
    fn residual_at_follows_path() {
        let t = two_three();
        let r = residual_at(&t, &[Outcome::LeftLight, Outcome::RightLight]).unwrap();
        assert_eq!(r.pairs().collect::<Vec<_>>(), vec![(Coin(3), Coin(1))]);
        assert!(residual_at(&t, &[Outcome::Balanced; 3]).is_none());
    }
}
