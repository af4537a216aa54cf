//! Splitting `N = aK + r` coins into `K` groups of `a` plus `r` leftovers:
//! a `K`-coin solution run on the groups narrows the fake to two groups or
//! the leftovers, and a `(2a + r)`-coin solution finishes.

use thiserror::Error;

use crate::fixtures;
use crate::model::{Coin, Leaf, Node, StrategyTree, Weighing};
use crate::search::{generate_power_solution, search_exists, SearchConfig};
use crate::verify::{verify_fc, VerificationReport};

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("need at least two groups: {coins} coins in groups of {group_size}")]
    TooFewGroups { coins: usize, group_size: usize },
    #[error("group size must be at least 1")]
    ZeroGroupSize,
    #[error("no known solution for {0} coins")]
    NoBaseTree(usize),
    #[error("solution for {0} coins has fake-set leaves")]
    PseudoBase(usize),
}

#[derive(Debug, Clone)]
pub struct Composition {
    pub tree: StrategyTree,
    pub groups: usize,
    pub group_size: usize,
    pub leftover: usize,
    /// Weighings of the group stage and of the finishing stage.
    pub stage_depths: (usize, usize),
    pub report: VerificationReport,
}

/// A known solution for exactly `m` coins: shipped files, the power
/// construction, or a short budgeted search for small `m`.
pub fn known_tree(m: usize) -> Option<StrategyTree> {
    if m == 2 {
        let root = Node::leaf(Leaf::output2(Coin(1), Coin(2)));
        return StrategyTree::new(2, root).ok();
    }
    let exact = [
        (3, fixtures::INLINE_2_3),
        (4, fixtures::INLINE_2_4),
        (6, fixtures::SCALABLE_3_6),
        (10, fixtures::A_4_10),
        (11, fixtures::B_4_11),
        (20, fixtures::C_5_20),
        (36, fixtures::D_6_36),
    ];
    if let Some((_, f)) = exact.iter().find(|(k, _)| *k == m) {
        return f.tree().ok();
    }
    if let Some(p) = (1..=4).find(|&p| 3usize.pow(p) == m) {
        return generate_power_solution(p).ok();
    }
    if m > 11 {
        return None;
    }
    let lo = crate::bounds::fc_lower(m);
    (lo..=4).find_map(|w| {
        let mut cfg = SearchConfig::new(w, m);
        cfg.node_budget = Some(5_000_000);
        search_exists(&cfg).ok()?.found().cloned()
    })
}

/// Builds and verifies the two-stage solution for `coins` coins in groups
/// of `group_size`, taking base solutions from `base`.
pub fn compose_with(
    coins: usize,
    group_size: usize,
    base: &dyn Fn(usize) -> Option<StrategyTree>,
) -> Result<Composition, ComposeError> {
    if group_size == 0 {
        return Err(ComposeError::ZeroGroupSize);
    }
    let (k, r) = (coins / group_size, coins % group_size);
    if k < 2 {
        return Err(ComposeError::TooFewGroups { coins, group_size });
    }
    let m = 2 * group_size + r;
    let outer = base(k).ok_or(ComposeError::NoBaseTree(k))?;
    let inner = base(m).ok_or(ComposeError::NoBaseTree(m))?;
    for (t, size) in [(&outer, k), (&inner, m)] {
        if t.has_fake_sets() {
            return Err(ComposeError::PseudoBase(size));
        }
    }
    let group = |g: Coin| -> Vec<Coin> {
        let start = (g.0 as usize - 1) * group_size;
        (start + 1..=start + group_size).map(|c| Coin(c as u16)).collect()
    };
    let leftover: Vec<Coin> = (k * group_size + 1..=coins).map(|c| Coin(c as u16)).collect();

    let finish = |chosen: &[Coin]| -> Node {
        let mut picked: Vec<Coin> = chosen.to_vec();
        for g in (1..=k as u16).map(Coin) {
            if picked.len() >= 2 {
                break;
            }
            if !picked.contains(&g) {
                picked.push(g);
            }
        }
        picked.sort();
        let mut pool: Vec<Coin> = picked.iter().flat_map(|&g| group(g)).collect();
        pool.extend(&leftover);
        inner.root.relabeled(&|c| pool[c.index()])
    };
    let root = lift(&outer.root, &group, &|leaf| match leaf {
        Leaf::Output1(g) => finish(&[*g]),
        Leaf::Output2(g, h) => finish(&[*g, *h]),
        _ => finish(&[]),
    });
    let tree = StrategyTree::new(coins, root).expect("composition is well formed");
    let report = verify_fc(&tree).expect("composition is well formed");
    Ok(Composition {
        tree,
        groups: k,
        group_size,
        leftover: r,
        stage_depths: (outer.depth(), inner.depth()),
        report,
    })
}

pub fn compose(coins: usize, group_size: usize) -> Result<Composition, ComposeError> {
    compose_with(coins, group_size, &known_tree)
}

fn lift(node: &Node, group: &dyn Fn(Coin) -> Vec<Coin>, at_leaf: &dyn Fn(&Leaf) -> Node) -> Node {
    match node {
        Node::Terminal(l) => at_leaf(l),
        Node::Decision { weighing, children } => {
            let up = |pan: &[Coin]| pan.iter().flat_map(|&g| group(g)).collect::<Vec<_>>();
            let w = Weighing::new(up(weighing.left()), up(weighing.right())).expect("groups are disjoint");
            Node::decision(
                w,
                [
                    lift(&children[0], group, at_leaf),
                    lift(&children[1], group, at_leaf),
                    lift(&children[2], group, at_leaf),
                ],
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_coins_in_threes() {
        let c = compose(9, 3).unwrap();
        assert!(c.report.valid, "{}", c.report);
        assert_eq!((c.groups, c.leftover), (3, 0));
        assert_eq!(c.tree.depth(), 2 + 3);
    }

    #[test]
    fn leftovers_are_carried() {
        let c = compose(13, 4).unwrap();
        assert_eq!((c.groups, c.leftover), (3, 1));
        assert!(c.report.valid, "{}", c.report);
    }

    #[test]
    fn rejects_single_group() {
        assert!(matches!(compose(5, 3), Err(ComposeError::TooFewGroups { .. })));
    }
}
