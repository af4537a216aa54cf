//! AND/OR depth-first search over pair relations on at most 64 coins.
//!
//! A state is one `u64` row per coin: bit `c` of row `f` means `(f, c)` is
//! still possible. In group-graph modes the diagonal carries loops.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};
use std::time::Instant;

use dashmap::DashMap;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::model::{Coin, Leaf, Node, Outcome, Weighing};

pub(crate) type Rows = SmallVec<[u64; 24]>;

#[inline]
fn bit(i: usize) -> u64 {
    1u64 << i
}

#[inline]
fn bits(mut w: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if w == 0 {
            None
        } else {
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(b)
        }
    })
}

pub(crate) fn transpose(rows: &[u64]) -> Rows {
    let mut cols: Rows = SmallVec::from_elem(0, rows.len());
    for (r, &row) in rows.iter().enumerate() {
        for c in bits(row) {
            cols[c] |= bit(r);
        }
    }
    cols
}

/// Applies one outcome; `l`/`r` are pan masks.
#[inline]
pub(crate) fn filter_rows(rows: &[u64], l: u64, r: u64, o: Outcome) -> Rows {
    let (on_left, on_right, off) = match o {
        Outcome::Balanced => (r, l, !0u64),
        Outcome::LeftLight => (!0u64, 0, l),
        Outcome::RightLight => (0, !0u64, r),
    };
    rows.iter()
        .enumerate()
        .map(|(f, &row)| {
            let b = bit(f);
            row & if l & b != 0 {
                on_left
            } else if r & b != 0 {
                on_right
            } else {
                off
            }
        })
        .collect()
}

/// Cheap statistics used by leaf rules and prunes.
#[derive(Copy, Clone, Debug, Default)]
pub(crate) struct Shape {
    /// Coins with an off-diagonal outgoing pair.
    pub support: u64,
    /// Coins with any outgoing pair, loops included.
    pub support_with_loops: u64,
    /// Coins in at least one off-diagonal double pair.
    pub double_coins: u64,
    pub d: usize,
    pub e: usize,
    pub f: usize,
    /// Union of all rows.
    pub chameleons: u64,
}

pub(crate) fn shape(rows: &[u64]) -> Shape {
    let cols = transpose(rows);
    let mut s = Shape::default();
    let mut sinks = 0u64;
    for (i, &row) in rows.iter().enumerate() {
        let b = bit(i);
        if row == 0 {
            sinks |= b;
            continue;
        }
        s.support_with_loops |= b;
        s.chameleons |= row;
        if row & !b != 0 {
            s.support |= b;
        }
        if row & b != 0 {
            s.f += 1;
        }
        let dbl = row & cols[i] & !b;
        if dbl != 0 {
            s.double_coins |= b;
            let above = !(b | b.wrapping_sub(1));
            s.d += (dbl & above).count_ones() as usize;
        }
    }
    s.e = rows.iter().filter(|&&row| row & sinks != 0).count();
    s
}

/// Which endings a state may take when it is turned into a leaf.
#[derive(Copy, Clone)]
pub(crate) enum LeafRule<'a> {
    /// At most two candidate fakes remain.
    Fc,
    /// Group graph: FC ending whose scaled residual the callback accepts.
    Scalable(&'a (dyn Fn(&[u64]) -> bool + Sync)),
    /// As `Scalable`, or a set of 3..=6 candidate fake groups with no edge into it.
    Pseudo(&'a (dyn Fn(&[u64]) -> bool + Sync)),
}

fn output_leaf(support: u64) -> Option<Leaf> {
    let mut it = bits(support).map(Coin::from_index);
    match support.count_ones() {
        0 => Some(Leaf::Impossible),
        1 => Some(Leaf::Output1(it.next()?)),
        2 => {
            let a = it.next()?;
            let b = it.next()?;
            Some(Leaf::output2(a, b))
        }
        _ => None,
    }
}

impl LeafRule<'_> {
    fn leaf(&self, rows: &[u64], s: &Shape) -> Option<Leaf> {
        match self {
            LeafRule::Fc => output_leaf(s.support),
            LeafRule::Scalable(ok) => {
                if s.support.count_ones() <= 2 && ok(rows) {
                    output_leaf(s.support)
                } else {
                    None
                }
            }
            LeafRule::Pseudo(ok) => {
                if s.support.count_ones() <= 2 && ok(rows) {
                    return output_leaf(s.support);
                }
                let set = s.support_with_loops;
                let k = set.count_ones();
                if (3..=6).contains(&k) && s.chameleons & set == 0 {
                    Some(Leaf::fake_set(bits(set).map(Coin::from_index).collect()))
                } else {
                    None
                }
            }
        }
    }

    fn cover_divisor(&self) -> usize {
        match self {
            LeafRule::Pseudo(_) => 6,
            _ => 2,
        }
    }

    fn graph_mode(&self) -> bool {
        !matches!(self, LeafRule::Fc)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PruneFlags {
    /// Each leaf settles at most one double pair: `D <= 3^r`.
    pub pair_bound: bool,
    /// Group-graph bound `D + ceil(max(E - F, 0) / 6) + F <= 3^r` (scalable and pseudo modes).
    pub def_bound: bool,
    /// Leaves must also cover every candidate fake outside double pairs.
    pub leaf_feasibility: bool,
}

impl PruneFlags {
    pub const ALL: PruneFlags = PruneFlags {
        pair_bound: true,
        def_bound: true,
        leaf_feasibility: true,
    };
    pub const NONE: PruneFlags = PruneFlags {
        pair_bound: false,
        def_bound: false,
        leaf_feasibility: false,
    };
}

impl Default for PruneFlags {
    fn default() -> Self {
        PruneFlags::ALL
    }
}

/// Snapshot handed to progress callbacks.
#[derive(Clone, Debug)]
pub struct Progress {
    pub nodes: u64,
    /// Weighings still available at the reporting node.
    pub remaining: u32,
    /// Weighings leading to the reporting node, root first.
    pub prefix: Vec<Weighing>,
}

pub(crate) struct EngineConfig<'a> {
    pub rule: LeafRule<'a>,
    pub prune: PruneFlags,
    pub symmetry: bool,
    /// Coins that never go on a pan.
    pub frozen: u64,
    pub node_budget: Option<u64>,
    pub deadline: Option<Instant>,
    /// Levels below the root explored in parallel.
    pub parallel_depth: u32,
    pub progress: Option<&'a (dyn Fn(&Progress) + Sync)>,
    pub progress_interval: u64,
}

impl<'a> EngineConfig<'a> {
    pub fn sequential(rule: LeafRule<'a>) -> Self {
        EngineConfig {
            rule,
            prune: PruneFlags::ALL,
            symmetry: true,
            frozen: 0,
            node_budget: None,
            deadline: None,
            parallel_depth: 0,
            progress: None,
            progress_interval: PROGRESS_EVERY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Aborted;

/// Path of weighings from the root, kept on the stack.
struct Link<'p> {
    pans: (u64, u64),
    parent: Option<&'p Link<'p>>,
}

pub(crate) const PROGRESS_EVERY: u64 = 1 << 16;

pub(crate) struct Engine<'a> {
    cfg: EngineConfig<'a>,
    n: usize,
    failed: DashMap<(Rows, u32), ()>,
    nodes: AtomicU64,
    abort: AtomicBool,
}

/// Ordering key: pan size, then sorted left pan, then sorted right pan.
fn key_cmp(a: (u64, u64), b: (u64, u64)) -> Ordering {
    let size = |m: u64| m.count_ones();
    size(a.0)
        .cmp(&size(b.0))
        .then_with(|| bits(a.0).cmp(bits(b.0)))
        .then_with(|| bits(a.1).cmp(bits(b.1)))
}

pub(crate) fn weighing_of(pans: (u64, u64)) -> Weighing {
    Weighing::new(
        bits(pans.0).map(Coin::from_index).collect(),
        bits(pans.1).map(Coin::from_index).collect(),
    )
    .expect("engine weighings are well formed")
}

impl<'a> Engine<'a> {
    pub fn new(n: usize, cfg: EngineConfig<'a>) -> Self {
        assert!(n <= 64, "search states hold at most 64 coins");
        Engine {
            cfg,
            n,
            failed: DashMap::new(),
            nodes: AtomicU64::new(0),
            abort: AtomicBool::new(false),
        }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(AtomicOrdering::Relaxed)
    }

    pub fn memo_len(&self) -> usize {
        self.failed.len()
    }

    pub fn solve(&self, rows: &[u64], r: u32) -> Result<Option<Node>, Aborted> {
        self.solve_at(rows, r, 0, None)
    }

    fn pow3(r: u32) -> usize {
        3usize.saturating_pow(r)
    }

    /// Necessary conditions for solving `s` with `r` weighings.
    fn admissible(&self, s: &Shape, r: u32) -> bool {
        let cap = Self::pow3(r);
        let p = self.cfg.prune;
        if p.pair_bound && s.d > cap {
            return false;
        }
        if p.leaf_feasibility {
            let loose = (s.support & !s.double_coins).count_ones() as usize;
            if s.d + loose.div_ceil(self.cfg.rule.cover_divisor()) > cap {
                return false;
            }
        }
        if p.def_bound && self.cfg.rule.graph_mode() {
            let x = s.e.saturating_sub(s.f);
            if s.d + x.div_ceil(6) + s.f > cap {
                return false;
            }
        }
        true
    }

    fn tick(&self, r: u32, link: Option<&Link>) -> Result<(), Aborted> {
        if self.abort.load(AtomicOrdering::Relaxed) {
            return Err(Aborted);
        }
        let n = self.nodes.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        if self.cfg.node_budget.is_some_and(|b| n > b) {
            self.abort.store(true, AtomicOrdering::Relaxed);
            return Err(Aborted);
        }
        if n % 1024 == 0 && self.cfg.deadline.is_some_and(|d| Instant::now() >= d) {
            self.abort.store(true, AtomicOrdering::Relaxed);
            return Err(Aborted);
        }
        if n % self.cfg.progress_interval.max(1) == 0 {
            if let Some(cb) = self.cfg.progress {
                let mut prefix = Vec::new();
                let mut cur = link;
                while let Some(l) = cur {
                    prefix.push(weighing_of(l.pans));
                    cur = l.parent;
                }
                prefix.reverse();
                cb(&Progress {
                    nodes: n,
                    remaining: r,
                    prefix,
                });
            }
        }
        Ok(())
    }

    fn solve_at(&self, rows: &[u64], r: u32, depth: u32, link: Option<&Link>) -> Result<Option<Node>, Aborted> {
        self.tick(r, link)?;
        let s = shape(rows);
        if let Some(leaf) = self.cfg.rule.leaf(rows, &s) {
            return Ok(Some(Node::leaf(leaf)));
        }
        if r == 0 || !self.admissible(&s, r) {
            return Ok(None);
        }
        let key = (Rows::from_slice(rows), r);
        if self.failed.contains_key(&key) {
            return Ok(None);
        }
        let cands = self.candidates(rows, &s, r);
        let try_one = |&(pans, ref kids): &((u64, u64), [Rows; 3])| -> Result<Option<Node>, Aborted> {
            let here = Link { pans, parent: link };
            let mut order = [0usize, 1, 2];
            order.sort_by_key(|&i| std::cmp::Reverse(kids[i].iter().map(|w| w.count_ones()).sum::<u32>()));
            let mut solved: [Option<Node>; 3] = [None, None, None];
            for i in order {
                match self.solve_at(&kids[i], r - 1, depth + 1, Some(&here))? {
                    Some(node) => solved[i] = Some(node),
                    None => return Ok(None),
                }
            }
            let [a, b, c] = solved.map(|x| x.expect("all children solved"));
            Ok(Some(Node::decision(weighing_of(pans), [a, b, c])))
        };
        let found = if depth < self.cfg.parallel_depth {
            cands
                .par_iter()
                .map(|c| try_one(c))
                .find_map_first(|res| match res {
                    Ok(None) => None,
                    other => Some(other),
                })
                .unwrap_or(Ok(None))?
        } else {
            let mut hit = None;
            for c in &cands {
                if let Some(node) = try_one(c)? {
                    hit = Some(node);
                    break;
                }
            }
            hit
        };
        if found.is_none() {
            self.failed.insert(key, ());
        }
        Ok(found)
    }

    /// Coin classes under transpositions that fix the state.
    fn classes(&self, rows: &[u64]) -> Vec<u64> {
        let cols = transpose(rows);
        let frozen = self.cfg.frozen;
        let mut reps: Vec<(usize, u64)> = Vec::new();
        for i in 0..self.n {
            if frozen & bit(i) != 0 {
                continue;
            }
            let slot = if self.cfg.symmetry {
                reps.iter().position(|&(j, _)| {
                    let both = bit(i) | bit(j);
                    (rows[i] ^ rows[j]) & !both == 0
                        && (cols[i] ^ cols[j]) & !both == 0
                        && (rows[i] >> i & 1) == (rows[j] >> j & 1)
                        && (rows[i] >> j & 1) == (rows[j] >> i & 1)
                })
            } else {
                None
            };
            match slot {
                Some(k) => reps[k].1 |= bit(i),
                None => reps.push((i, bit(i))),
            }
        }
        reps.into_iter().map(|(_, m)| m).collect()
    }

    /// Candidate weighings with their three child states, in canonical order.
    fn candidates(&self, rows: &[u64], s: &Shape, r: u32) -> Vec<((u64, u64), [Rows; 3])> {
        let classes = self.classes(rows);
        let involved = s.support_with_loops | s.chameleons;
        let real: Vec<bool> = classes.iter().map(|&m| m & involved == 0).collect();
        let sizes: Vec<u32> = classes.iter().map(|m| m.count_ones()).collect();
        let half = (classes.iter().map(|m| m.count_ones()).sum::<u32>() / 2) as usize;

        let mut comps: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
        let mut l = vec![0u8; classes.len()];
        let mut rr = vec![0u8; classes.len()];
        fn rec(
            k: usize,
            sizes: &[u32],
            real: &[bool],
            half: usize,
            l: &mut Vec<u8>,
            rr: &mut Vec<u8>,
            lsum: usize,
            rsum: usize,
            out: &mut Vec<(Vec<u8>, Vec<u8>)>,
        ) {
            if k == sizes.len() {
                if lsum == rsum && lsum > 0 {
                    out.push((l.clone(), rr.clone()));
                }
                return;
            }
            // remaining capacity check keeps the enumeration small
            let rest: usize = sizes[k..].iter().map(|&s| s as usize).sum();
            if lsum.abs_diff(rsum) > rest {
                return;
            }
            for a in 0..=sizes[k] as usize {
                if lsum + a > half {
                    break;
                }
                for b in 0..=(sizes[k] as usize - a) {
                    if rsum + b > half {
                        break;
                    }
                    if real[k] && a > 0 && b > 0 {
                        continue;
                    }
                    l[k] = a as u8;
                    rr[k] = b as u8;
                    rec(k + 1, sizes, real, half, l, rr, lsum + a, rsum + b, out);
                }
            }
            l[k] = 0;
            rr[k] = 0;
        }
        rec(0, &sizes, &real, half, &mut l, &mut rr, 0, 0, &mut comps);

        let masks = |lv: &[u8], rv: &[u8]| -> (u64, u64) {
            let (mut lm, mut rm) = (0u64, 0u64);
            for (k, &cls) in classes.iter().enumerate() {
                let mut it = bits(cls);
                for _ in 0..lv[k] {
                    lm |= bit(it.next().expect("class size"));
                }
                for _ in 0..rv[k] {
                    rm |= bit(it.next().expect("class size"));
                }
            }
            (lm, rm)
        };

        let mut out = Vec::with_capacity(comps.len());
        for (lv, rv) in &comps {
            let only_real = lv.iter().zip(rv).zip(&real).all(|((a, b), re)| *re || (*a == 0 && *b == 0));
            if only_real {
                continue;
            }
            let pans = masks(lv, rv);
            if lv != rv {
                let swapped = masks(rv, lv);
                if key_cmp(swapped, pans) == Ordering::Less {
                    continue;
                }
            }
            let kids = Outcome::ALL.map(|o| filter_rows(rows, pans.0, pans.1, o));
            // a child equal to the parent makes no progress; a shorter tree covers it
            if kids.iter().any(|k| k.as_slice() == rows) {
                continue;
            }
            if !kids.iter().all(|k| {
                let ks = shape(k);
                self.cfg.rule.leaf(k, &ks).is_some() || (r > 1 && self.admissible(&ks, r - 1))
            }) {
                continue;
            }
            out.push((pans, kids));
        }
        out.sort_by(|a, b| key_cmp(a.0, b.0));
        out
    }
}

/// Initial FC state: every ordered pair of distinct coins.
pub(crate) fn initial_rows(n: usize, loops: bool) -> Rows {
    let all = if n == 64 { !0u64 } else { bit(n) - 1 };
    (0..n)
        .map(|i| if loops { all } else { all & !bit(i) })
        .collect()
}
