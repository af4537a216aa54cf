//! Group graphs: the pair relation seen at the level of coin groups.
//!
//! Vertex `u` stands for a group of coins that always share a pan. An edge
//! `u -> v` means group `u` may hold the fake while group `v` holds the
//! chameleon; a loop `u -> u` means group `u` may hold both. Updates use the
//! same outcome table as [`PairState`](crate::model::PairState), applied to
//! the diagonal as well.

use std::fmt;

use serde::Serialize;

use crate::bits::BitMatrix;
use crate::model::{filter_matrix, Coin, ModelError, Outcome, Weighing};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupGraph {
    pub(crate) m: BitMatrix,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct GraphStats {
    /// Unordered pairs `{u, v}`, `u != v`, joined in both directions.
    pub d: usize,
    /// Vertices with an edge into a vertex that has no outgoing edge.
    pub e: usize,
    /// Loops.
    pub f: usize,
}

impl std::ops::Add for GraphStats {
    type Output = GraphStats;
    fn add(self, o: GraphStats) -> GraphStats {
        GraphStats {
            d: self.d + o.d,
            e: self.e + o.e,
            f: self.f + o.f,
        }
    }
}

impl GroupGraph {
    /// Every edge, every loop.
    pub fn initial(n: usize) -> Self {
        GroupGraph {
            m: BitMatrix::full(n, true),
        }
    }

    pub fn empty(n: usize) -> Self {
        GroupGraph {
            m: BitMatrix::empty(n),
        }
    }

    /// Builds a graph from 1-based `(from, to)` vertex pairs.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Coin, Coin)>) -> Self {
        let mut m = BitMatrix::empty(n);
        for (a, b) in edges {
            m.set(a.index(), b.index());
        }
        GroupGraph { m }
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn has_edge(&self, from: Coin, to: Coin) -> bool {
        self.m.get(from.index(), to.index())
    }

    pub fn edges(&self) -> impl Iterator<Item = (Coin, Coin)> + '_ {
        self.m
            .iter_pairs()
            .map(|(a, b)| (Coin::from_index(a), Coin::from_index(b)))
    }

    pub fn edge_count(&self) -> usize {
        self.m.count()
    }

    /// The graph after `weighing` (over vertices) shows `outcome`.
    pub fn update(&self, weighing: &Weighing, outcome: Outcome) -> Result<GroupGraph, ModelError> {
        let n = self.n();
        if let Some(c) = weighing.coins().find(|c| c.0 == 0 || c.0 as usize > n) {
            return Err(ModelError::CoinOutOfRange { coin: c, n_coins: n });
        }
        let (l, r) = weighing.masks(n);
        Ok(GroupGraph {
            m: filter_matrix(&self.m, l.words(), r.words(), outcome),
        })
    }

    pub fn stats(&self) -> GraphStats {
        matrix_stats(&self.m)
    }

    /// One `from to` edge per line, 1-based.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# {} vertices, {} edges\n", self.n(), self.edge_count());
        for (a, b) in self.edges() {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D={} E={} F={}", self.d, self.e, self.f)
    }
}

pub(crate) fn matrix_stats(m: &BitMatrix) -> GraphStats {
    let n = m.n();
    let sinks: Vec<bool> = (0..n).map(|i| m.row_is_empty(i)).collect();
    let e = (0..n)
        .filter(|&u| crate::bits::iter_bits(m.row(u)).any(|v| sinks[v]))
        .count();
    GraphStats {
        d: m.double_count(),
        e,
        f: m.diagonal_count(),
    }
}

/// How the `|E - F| / 6` term of the bound is read.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub enum DeficitReading {
    /// `ceil(max(E - F, 0) / 6)`
    #[default]
    Positive,
    /// `ceil(|E - F| / 6)`
    Absolute,
}

/// Left-hand side of the end-of-solution bound, `D + ceil(x / 6) + F`.
pub fn bound_value(s: GraphStats, reading: DeficitReading) -> u128 {
    let x = match reading {
        DeficitReading::Positive => s.e.saturating_sub(s.f),
        DeficitReading::Absolute => s.e.abs_diff(s.f),
    };
    (s.d + x.div_ceil(6) + s.f) as u128
}

/// Whether `r` more weighings can still reach a scalable or pseudo ending.
pub fn prune_bound_holds(stats: GraphStats, remaining: u32) -> bool {
    prune_bound_holds_with(stats, remaining, DeficitReading::Positive)
}

pub fn prune_bound_holds_with(stats: GraphStats, remaining: u32, reading: DeficitReading) -> bool {
    bound_value(stats, reading) <= 3u128.pow(remaining)
}
