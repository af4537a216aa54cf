//! Coins, weighings, strategy trees and the adversarial outcome semantics.
//!
//! Weight model: the fake coin is one unit lighter than a real coin. The
//! chameleon picks, independently for every weighing, whether to weigh like a
//! real coin or like the fake. A pan's *deficit* is the number of light units
//! on it; the pan with the larger deficit goes up.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitMatrix, BitSet};

/// A coin, numbered from 1.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coin(pub u16);

impl Coin {
    #[inline]
    pub fn id(self) -> u16 {
        self.0
    }

    #[inline]
    pub(crate) fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub(crate) fn from_index(i: usize) -> Coin {
        Coin(i as u16 + 1)
    }
}

impl fmt::Display for Coin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Result of a single weighing, in the fixed child order.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Balanced,
    LeftLight,
    RightLight,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Balanced, Outcome::LeftLight, Outcome::RightLight];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// The outcome seen when the pans are swapped.
    pub fn mirrored(self) -> Outcome {
        match self {
            Outcome::Balanced => Outcome::Balanced,
            Outcome::LeftLight => Outcome::RightLight,
            Outcome::RightLight => Outcome::LeftLight,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Balanced => '=',
            Outcome::LeftLight => '<',
            Outcome::RightLight => '>',
        }
    }
}

/// Renders an outcome path compactly, e.g. `=<>`.
pub fn path_string(path: &[Outcome]) -> String {
    if path.is_empty() {
        return "(root)".to_string();
    }
    path.iter().map(|o| o.symbol()).collect()
}

/// A set of outcomes, one bit per [`Outcome`].
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct OutcomeSet(u8);

impl OutcomeSet {
    pub fn insert(&mut self, o: Outcome) {
        self.0 |= 1 << o.index();
    }

    pub fn contains(self, o: Outcome) -> bool {
        self.0 >> o.index() & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Outcome> {
        Outcome::ALL.into_iter().filter(move |&o| self.contains(o))
    }
}

impl FromIterator<Outcome> for OutcomeSet {
    fn from_iter<I: IntoIterator<Item = Outcome>>(iter: I) -> Self {
        let mut s = OutcomeSet::default();
        for o in iter {
            s.insert(o);
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("weighing pans have different sizes ({left} vs {right})")]
    UnequalPans { left: usize, right: usize },
    #[error("weighing has empty pans")]
    EmptyPans,
    #[error("coin {0} appears more than once in a weighing")]
    RepeatedCoin(Coin),
    #[error("coin {coin} out of range 1..={n_coins}")]
    CoinOutOfRange { coin: Coin, n_coins: usize },
    #[error("output leaf names coin {0} twice")]
    DegenerateOutput(Coin),
    #[error("fake-set leaf has {0} coins, expected 3..=6")]
    FakeSetSize(usize),
    #[error("malformed tree at {path}: {source}")]
    MalformedTree {
        path: String,
        #[source]
        source: Box<ModelError>,
    },
}

/// Which pan a coin sits on during a weighing.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
    Off,
}

/// Two disjoint, equally sized pans. Written order is preserved; it matters
/// for the positional pan swap used by the text format.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Weighing {
    left: Vec<Coin>,
    right: Vec<Coin>,
}

impl Weighing {
    pub fn new(left: Vec<Coin>, right: Vec<Coin>) -> Result<Self, ModelError> {
        if left.len() != right.len() {
            return Err(ModelError::UnequalPans {
                left: left.len(),
                right: right.len(),
            });
        }
        if left.is_empty() {
            return Err(ModelError::EmptyPans);
        }
        let mut seen = BTreeSet::new();
        for &c in left.iter().chain(&right) {
            if !seen.insert(c) {
                return Err(ModelError::RepeatedCoin(c));
            }
        }
        Ok(Weighing { left, right })
    }

    pub fn from_ids(left: &[u16], right: &[u16]) -> Result<Self, ModelError> {
        Self::new(
            left.iter().copied().map(Coin).collect(),
            right.iter().copied().map(Coin).collect(),
        )
    }

    pub fn left(&self) -> &[Coin] {
        &self.left
    }

    pub fn right(&self) -> &[Coin] {
        &self.right
    }

    pub fn pan_size(&self) -> usize {
        self.left.len()
    }

    pub fn side_of(&self, c: Coin) -> Side {
        if self.left.contains(&c) {
            Side::Left
        } else if self.right.contains(&c) {
            Side::Right
        } else {
            Side::Off
        }
    }

    pub fn coins(&self) -> impl Iterator<Item = Coin> + '_ {
        self.left.iter().chain(&self.right).copied()
    }

    pub fn max_coin(&self) -> Coin {
        self.coins().max().expect("non-empty weighing")
    }

    /// The same weighing with the pans exchanged.
    pub fn swapped(&self) -> Weighing {
        Weighing {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// Relabels every coin through `f`.
    pub fn relabeled(&self, f: impl Fn(Coin) -> Coin) -> Weighing {
        Weighing {
            left: self.left.iter().map(|&c| f(c)).collect(),
            right: self.right.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Canonical ordering key: pan size, then sorted left pan, then sorted right pan.
    pub fn canonical_key(&self) -> (usize, Vec<Coin>, Vec<Coin>) {
        let mut l = self.left.clone();
        let mut r = self.right.clone();
        l.sort_unstable();
        r.sort_unstable();
        (self.left.len(), l, r)
    }

    pub(crate) fn masks(&self, n: usize) -> (BitSet, BitSet) {
        (
            BitSet::from_indices(n, self.left.iter().map(|c| c.index())),
            BitSet::from_indices(n, self.right.iter().map(|c| c.index())),
        )
    }
}

impl fmt::Display for Weighing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Coin]| {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "{} v {}", join(&self.left), join(&self.right))
    }
}

/// What a branch of the strategy concludes.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Leaf {
    /// Only this coin can be fake.
    Output1(Coin),
    /// The fake is one of these two coins (stored in ascending order).
    Output2(Coin, Coin),
    /// The fake is in this set and the chameleon is not (sorted, 3..=6 coins).
    FakeSet(Vec<Coin>),
    /// No consistent assignment reaches this branch.
    Impossible,
}

impl Leaf {
    pub fn output2(a: Coin, b: Coin) -> Leaf {
        if a <= b {
            Leaf::Output2(a, b)
        } else {
            Leaf::Output2(b, a)
        }
    }

    /// Output leaf naming exactly `coins` (0, 1, or 2 of them).
    pub fn output_of(coins: &[Coin]) -> Option<Leaf> {
        match coins {
            [] => Some(Leaf::Impossible),
            [a] => Some(Leaf::Output1(*a)),
            [a, b] => Some(Leaf::output2(*a, *b)),
            _ => None,
        }
    }

    pub fn fake_set(mut coins: Vec<Coin>) -> Leaf {
        coins.sort_unstable();
        coins.dedup();
        Leaf::FakeSet(coins)
    }

    pub fn coins(&self) -> Vec<Coin> {
        match self {
            Leaf::Output1(a) => vec![*a],
            Leaf::Output2(a, b) => vec![*a, *b],
            Leaf::FakeSet(s) => s.clone(),
            Leaf::Impossible => vec![],
        }
    }

    pub fn is_output(&self) -> bool {
        !matches!(self, Leaf::Impossible)
    }

    pub fn relabeled(&self, f: impl Fn(Coin) -> Coin) -> Leaf {
        match self {
            Leaf::Output1(a) => Leaf::Output1(f(*a)),
            Leaf::Output2(a, b) => Leaf::output2(f(*a), f(*b)),
            Leaf::FakeSet(s) => Leaf::fake_set(s.iter().map(|&c| f(c)).collect()),
            Leaf::Impossible => Leaf::Impossible,
        }
    }

    fn validate(&self, n_coins: usize) -> Result<(), ModelError> {
        match self {
            Leaf::Output2(a, b) if a == b => return Err(ModelError::DegenerateOutput(*a)),
            Leaf::FakeSet(s) if !(3..=6).contains(&s.len()) => {
                return Err(ModelError::FakeSetSize(s.len()))
            }
            _ => {}
        }
        for c in self.coins() {
            check_range(c, n_coins)?;
        }
        Ok(())
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::Output1(a) => write!(f, "({a})"),
            Leaf::Output2(a, b) => write!(f, "({a}, {b})"),
            Leaf::FakeSet(s) => {
                let body = s.iter().map(|c| c.to_string()).collect::<Vec<_>>();
                write!(f, "{{{}}}", body.join(", "))
            }
            Leaf::Impossible => write!(f, "()"),
        }
    }
}

fn check_range(c: Coin, n_coins: usize) -> Result<(), ModelError> {
    if c.0 == 0 || c.0 as usize > n_coins {
        Err(ModelError::CoinOutOfRange { coin: c, n_coins })
    } else {
        Ok(())
    }
}

/// A node of a ternary strategy tree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node {
    Decision {
        weighing: Weighing,
        children: Box<[Node; 3]>,
    },
    Terminal(Leaf),
}

impl Node {
    pub fn decision(weighing: Weighing, children: [Node; 3]) -> Node {
        Node::Decision {
            weighing,
            children: Box::new(children),
        }
    }

    pub fn leaf(leaf: Leaf) -> Node {
        Node::Terminal(leaf)
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Terminal(_) => 0,
            Node::Decision { children, .. } => {
                1 + children.iter().map(Node::depth).max().unwrap_or(0)
            }
        }
    }

    pub fn decision_count(&self) -> usize {
        match self {
            Node::Terminal(_) => 0,
            Node::Decision { children, .. } => 1 + children.iter().map(Node::decision_count).sum::<usize>(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Terminal(_) => 1,
            Node::Decision { children, .. } => children.iter().map(Node::leaf_count).sum(),
        }
    }

    pub fn relabeled(&self, f: &impl Fn(Coin) -> Coin) -> Node {
        match self {
            Node::Terminal(l) => Node::Terminal(l.relabeled(f)),
            Node::Decision { weighing, children } => Node::decision(
                weighing.relabeled(f),
                [
                    children[0].relabeled(f),
                    children[1].relabeled(f),
                    children[2].relabeled(f),
                ],
            ),
        }
    }

    /// Follows `path` from this node; `None` if it runs past a leaf.
    pub fn at_path(&self, path: &[Outcome]) -> Option<&Node> {
        let mut node = self;
        for o in path {
            match node {
                Node::Decision { children, .. } => node = &children[o.index()],
                Node::Terminal(_) => return None,
            }
        }
        Some(node)
    }

    /// Visits every leaf together with its outcome path, in lexicographic path order.
    pub fn for_each_leaf<'a>(&'a self, f: &mut impl FnMut(&[Outcome], &'a Leaf)) {
        fn go<'a>(n: &'a Node, path: &mut Vec<Outcome>, f: &mut impl FnMut(&[Outcome], &'a Leaf)) {
            match n {
                Node::Terminal(l) => f(path, l),
                Node::Decision { children, .. } => {
                    for o in Outcome::ALL {
                        path.push(o);
                        go(&children[o.index()], path, f);
                        path.pop();
                    }
                }
            }
        }
        go(self, &mut Vec::new(), f)
    }

    fn validate(&self, n_coins: usize, path: &mut Vec<Outcome>) -> Result<(), ModelError> {
        let wrap = |e: ModelError, path: &[Outcome]| ModelError::MalformedTree {
            path: path_string(path),
            source: Box::new(e),
        };
        match self {
            Node::Terminal(l) => l.validate(n_coins).map_err(|e| wrap(e, path)),
            Node::Decision { weighing, children } => {
                for c in weighing.coins() {
                    check_range(c, n_coins).map_err(|e| wrap(e, path))?;
                }
                for o in Outcome::ALL {
                    path.push(o);
                    children[o.index()].validate(n_coins, path)?;
                    path.pop();
                }
                Ok(())
            }
        }
    }
}

/// A complete weighing strategy for `n_coins` coins.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StrategyTree {
    pub n_coins: usize,
    pub root: Node,
}

impl StrategyTree {
    pub fn new(n_coins: usize, root: Node) -> Result<Self, ModelError> {
        let t = StrategyTree { n_coins, root };
        t.validate()?;
        Ok(t)
    }

    /// Checks coin ranges and leaf shapes. Pan disjointness and sizes are
    /// enforced by [`Weighing::new`].
    pub fn validate(&self) -> Result<(), ModelError> {
        self.root.validate(self.n_coins, &mut Vec::new())
    }

    /// Maximum number of weighings along any path.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn has_fake_sets(&self) -> bool {
        let mut found = false;
        self.root.for_each_leaf(&mut |_, l| found |= matches!(l, Leaf::FakeSet(_)));
        found
    }
}

/// Outcomes the pair `(fake, chameleon)` can produce on `weighing`.
///
/// Evaluated directly from pan deficits for both chameleon choices.
pub fn achievable_outcomes(weighing: &Weighing, fake: Coin, chameleon: Coin) -> OutcomeSet {
    let fs = weighing.side_of(fake);
    let cs = weighing.side_of(chameleon);
    (0..=1)
        .map(|mimic| {
            let deficit = |side| (fs == side) as i32 + mimic * (cs == side) as i32;
            let (l, r) = (deficit(Side::Left), deficit(Side::Right));
            match l.cmp(&r) {
                std::cmp::Ordering::Equal => Outcome::Balanced,
                std::cmp::Ordering::Greater => Outcome::LeftLight,
                std::cmp::Ordering::Less => Outcome::RightLight,
            }
        })
        .collect()
}

/// Which chameleon positions stay consistent for a fake on `side` after `outcome`.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub(crate) enum Allowed {
    All,
    Nothing,
    LeftPan,
    RightPan,
}

/// Row filter table: a fake on `side` survives `outcome` exactly for the
/// chameleon positions returned. Same-coin entries (loops) follow the same
/// table: a fake sharing its group with the chameleon acts like a lone fake.
#[inline]
pub(crate) fn allowed_chameleons(side: Side, outcome: Outcome) -> Allowed {
    use Outcome::*;
    match (side, outcome) {
        (Side::Left, Balanced) => Allowed::RightPan,
        (Side::Left, LeftLight) => Allowed::All,
        (Side::Left, RightLight) => Allowed::Nothing,
        (Side::Right, Balanced) => Allowed::LeftPan,
        (Side::Right, RightLight) => Allowed::All,
        (Side::Right, LeftLight) => Allowed::Nothing,
        (Side::Off, Balanced) => Allowed::All,
        (Side::Off, LeftLight) => Allowed::LeftPan,
        (Side::Off, RightLight) => Allowed::RightPan,
    }
}

/// Applies one observed outcome to a relation matrix given pan masks.
pub(crate) fn filter_matrix(m: &BitMatrix, left: &[u64], right: &[u64], outcome: Outcome) -> BitMatrix {
    let mut out = m.clone();
    for f in 0..m.n() {
        let w = f / 64;
        let b = 1u64 << (f % 64);
        let side = if left[w] & b != 0 {
            Side::Left
        } else if right[w] & b != 0 {
            Side::Right
        } else {
            Side::Off
        };
        let row = out.row_mut(f);
        match allowed_chameleons(side, outcome) {
            Allowed::All => {}
            Allowed::Nothing => row.fill(0),
            Allowed::LeftPan => row.iter_mut().zip(left).for_each(|(x, m)| *x &= m),
            Allowed::RightPan => row.iter_mut().zip(right).for_each(|(x, m)| *x &= m),
        }
    }
    out
}

/// The set of `(fake, chameleon)` assignments still consistent with what has
/// been observed.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PairState {
    pub(crate) m: BitMatrix,
}

/// Summary of a [`PairState`] used by search pruning.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateStatistics {
    pub fake_support: Vec<Coin>,
    pub bidirectional_count: usize,
}

impl PairState {
    /// All `N(N-1)` ordered pairs.
    pub fn initial(n_coins: usize) -> Self {
        PairState {
            m: BitMatrix::full(n_coins, false),
        }
    }

    pub fn empty(n_coins: usize) -> Self {
        PairState {
            m: BitMatrix::empty(n_coins),
        }
    }

    pub fn from_pairs(n_coins: usize, pairs: impl IntoIterator<Item = (Coin, Coin)>) -> Self {
        let mut m = BitMatrix::empty(n_coins);
        for (f, c) in pairs {
            assert!(f != c, "fake and chameleon must differ");
            m.set(f.index(), c.index());
        }
        PairState { m }
    }

    pub fn n_coins(&self) -> usize {
        self.m.n()
    }

    pub fn contains(&self, fake: Coin, chameleon: Coin) -> bool {
        self.m.get(fake.index(), chameleon.index())
    }

    pub fn len(&self) -> usize {
        self.m.count()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Coin, Coin)> + '_ {
        self.m
            .iter_pairs()
            .map(|(f, c)| (Coin::from_index(f), Coin::from_index(c)))
    }

    /// Pairs consistent with additionally observing `outcome` on `weighing`.
    pub fn filter(&self, weighing: &Weighing, outcome: Outcome) -> PairState {
        let (l, r) = weighing.masks(self.n_coins());
        PairState {
            m: filter_matrix(&self.m, l.words(), r.words(), outcome),
        }
    }

    pub fn fake_support(&self) -> Vec<Coin> {
        self.m.row_support().iter().map(Coin::from_index).collect()
    }

    pub fn chameleon_support(&self) -> Vec<Coin> {
        self.m.column_support().iter().map(Coin::from_index).collect()
    }

    pub fn statistics(&self) -> StateStatistics {
        StateStatistics {
            fake_support: self.fake_support(),
            bidirectional_count: self.m.double_count(),
        }
    }

    pub fn is_subset_of(&self, other: &PairState) -> bool {
        self.m.is_subset_of(&other.m)
    }
}

/// Free-function form of [`PairState::filter`].
pub fn filter_state(state: &PairState, weighing: &Weighing, outcome: Outcome) -> PairState {
    state.filter(weighing, outcome)
}

/// Free-function form of [`PairState::statistics`].
pub fn state_statistics(state: &PairState) -> StateStatistics {
    state.statistics()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(l: &[u16], r: &[u16]) -> Weighing {
        Weighing::from_ids(l, r).unwrap()
    }

    fn set(os: &[Outcome]) -> OutcomeSet {
        os.iter().copied().collect()
    }

    #[test]
    fn achievable_examples() {
        use Outcome::*;
        let wt = w(&[1], &[2]);
        assert_eq!(achievable_outcomes(&wt, Coin(1), Coin(2)), set(&[LeftLight, Balanced]));
        assert_eq!(achievable_outcomes(&wt, Coin(3), Coin(4)), set(&[Balanced]));
        assert_eq!(achievable_outcomes(&wt, Coin(3), Coin(1)), set(&[Balanced, LeftLight]));
    }

    #[test]
    fn filter_reproduces_three_coin_cases() {
        use Outcome::*;
        let s = PairState::initial(3);
        let a = s.filter(&w(&[1], &[2]), LeftLight).filter(&w(&[1], &[3]), RightLight);
        assert_eq!(a.pairs().collect::<Vec<_>>(), vec![(Coin(3), Coin(1))]);
        let b = s.filter(&w(&[1], &[2]), Balanced).filter(&w(&[1], &[3]), Balanced);
        assert_eq!(
            b.pairs().collect::<Vec<_>>(),
            vec![(Coin(2), Coin(1)), (Coin(3), Coin(1))]
        );
    }

    #[test]
    fn off_scale_balanced_is_identity() {
        let s = PairState::from_pairs(5, [(Coin(1), Coin(2)), (Coin(2), Coin(1))]);
        assert_eq!(s.filter(&w(&[4], &[5]), Outcome::Balanced), s);
    }

    #[test]
    fn statistics_examples() {
        let st = PairState::initial(4).statistics();
        assert_eq!(st.fake_support.len(), 4);
        assert_eq!(st.bidirectional_count, 6);
        let one = PairState::from_pairs(4, [(Coin(3), Coin(1))]).statistics();
        assert_eq!(one.fake_support, vec![Coin(3)]);
        assert_eq!(one.bidirectional_count, 0);
        let two = PairState::from_pairs(4, [(Coin(1), Coin(2)), (Coin(2), Coin(1))]);
        assert_eq!(two.statistics().bidirectional_count, 1);
    }

    #[test]
    fn weighing_rejects_bad_pans() {
        assert!(matches!(Weighing::from_ids(&[1], &[2, 3]), Err(ModelError::UnequalPans { .. })));
        assert!(matches!(Weighing::from_ids(&[1], &[1]), Err(ModelError::RepeatedCoin(_))));
        assert!(matches!(Weighing::from_ids(&[], &[]), Err(ModelError::EmptyPans)));
    }

    #[test]
    fn tree_validation_catches_range_and_leaf_shape() {
        let bad = StrategyTree::new(
            3,
            Node::decision(
                w(&[1], &[2]),
                [
                    Node::leaf(Leaf::Output1(Coin(4))),
                    Node::leaf(Leaf::Impossible),
                    Node::leaf(Leaf::Impossible),
                ],
            ),
        );
        assert!(matches!(bad, Err(ModelError::MalformedTree { .. })));
        let fs = StrategyTree::new(5, Node::leaf(Leaf::FakeSet(vec![Coin(1), Coin(2)])));
        assert!(fs.is_err());
    }

    fn arb_weighing(n: u16) -> impl Strategy<Value = Weighing> {
        Just((1..=n).collect::<Vec<u16>>())
            .prop_shuffle()
            .prop_flat_map(move |perm| {
                (1..=(n as usize / 2)).prop_map(move |k| {
                    Weighing::from_ids(&perm[..k], &perm[k..2 * k]).unwrap()
                })
            })
    }

    fn arb_state(n: usize) -> impl Strategy<Value = PairState> {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let pairs = (0..n)
                .flat_map(|f| (0..n).map(move |c| (f, c)))
                .filter(|&(f, c)| f != c && bits[f * n + c])
                .map(|(f, c)| (Coin::from_index(f), Coin::from_index(c)));
            PairState::from_pairs(n, pairs)
        })
    }

    proptest! {
        #[test]
        fn outcomes_cover_state(state in arb_state(6), wt in arb_weighing(6)) {
            let kids: Vec<_> = Outcome::ALL.iter().map(|&o| state.filter(&wt, o)).collect();
            for (f, c) in state.pairs() {
                let hits = kids.iter().filter(|k| k.contains(f, c)).count();
                prop_assert!(hits == 1 || hits == 2);
                if hits == 2 {
                    prop_assert!(wt.side_of(c) != Side::Off);
                }
                let ach = achievable_outcomes(&wt, f, c);
                for o in Outcome::ALL {
                    prop_assert_eq!(ach.contains(o), kids[o.index()].contains(f, c));
                }
            }
            for k in &kids {
                prop_assert!(k.is_subset_of(&state));
            }
        }

        #[test]
        fn filter_is_idempotent(state in arb_state(5), wt in arb_weighing(5), oi in 0usize..3) {
            let o = Outcome::ALL[oi];
            let once = state.filter(&wt, o);
            prop_assert_eq!(once.filter(&wt, o), once.clone());
        }

        #[test]
        fn pan_swap_mirrors_outcomes(wt in arb_weighing(6), f in 1u16..=6, c in 1u16..=6) {
            prop_assume!(f != c);
            let a = achievable_outcomes(&wt, Coin(f), Coin(c));
            let b = achievable_outcomes(&wt.swapped(), Coin(f), Coin(c));
            let mirrored: OutcomeSet = a.iter().map(Outcome::mirrored).collect();
            prop_assert_eq!(mirrored, b);
        }
    }
}
