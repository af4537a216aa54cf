//! Explicit constructions that need no search.

use crate::model::{Coin, Leaf, Node, StrategyTree, Weighing};

use super::SearchError;

fn pow3(k: u32) -> usize {
    3usize.pow(k)
}

fn leaf_for(coins: &[Coin]) -> Node {
    Node::leaf(match *coins {
        [] => Leaf::Impossible,
        [a] => Leaf::Output1(a),
        [a, b] => Leaf::output2(a, b),
        _ => unreachable!("leaf_for called with more than two coins"),
    })
}

/// Ternary search for a single light coin among `coins` (no chameleon
/// among them) with `w` weighings, stopping at `output_size` candidates.
///
/// Pans take the smallest `k` with both the pans and the rest small enough
/// for the remaining weighings.
pub fn classic_fake_tree(coins: &[Coin], w: u32, output_size: usize) -> Result<Node, SearchError> {
    if !(1..=2).contains(&output_size) {
        return Err(SearchError::InvalidConfig(format!("output size {output_size} is not 1 or 2")));
    }
    let cap = output_size.saturating_mul(3usize.saturating_pow(w));
    if coins.len() > cap {
        return Err(SearchError::TooManyCoins {
            coins: coins.len(),
            weighings: w,
            output_size,
        });
    }
    Ok(classic(coins, w, output_size))
}

fn classic(coins: &[Coin], w: u32, size: usize) -> Node {
    let n = coins.len();
    if n <= size {
        return leaf_for(coins);
    }
    let child_cap = size * pow3(w - 1);
    let k = (1..=n / 2)
        .find(|&k| n - 2 * k <= child_cap && k <= child_cap)
        .expect("capacity checked by caller");
    let (left, rest) = coins.split_at(k);
    let (right, off) = rest.split_at(k);
    let weighing = Weighing::new(left.to_vec(), right.to_vec()).expect("disjoint halves");
    Node::decision(
        weighing,
        [
            classic(off, w - 1, size),
            classic(left, w - 1, size),
            classic(right, w - 1, size),
        ],
    )
}

/// Classic single-coin search on `first`, then on `second` at every leaf,
/// answering the pair of coins found.
fn two_searches(first: &[Coin], second: &[Coin], w: u32) -> Node {
    classic(first, w, 1).replace_leaves(&|head| {
        classic(second, w, 1).map_leaves(&|tail| match (head, tail) {
            (Leaf::Output1(a), Leaf::Output1(b)) => Leaf::output2(*a, *b),
            (Leaf::Output1(a), _) => Leaf::Output1(*a),
            (_, t) => t.clone(),
        })
    })
}

/// `3^n` coins in `2n` weighings.
///
/// The thirds `X1, X2, X3` are compared as `X1 v X2`, then `X1 v X3` (or
/// `X2 v X3` when `X2` was lighter). Depending on the pair of results the
/// fake is pinned to one third (recurse), to one third with the chameleon
/// elsewhere (classic search), or to one of two thirds with the chameleon in
/// the other (two classic searches).
pub fn generate_power_solution(n: u32) -> Result<StrategyTree, SearchError> {
    if n == 0 {
        return Err(SearchError::InvalidConfig("power solution needs n >= 1".into()));
    }
    if pow3(n) > u16::MAX as usize {
        return Err(SearchError::InvalidConfig(format!("3^{n} coins is too many")));
    }
    let coins: Vec<Coin> = (1..=pow3(n) as u16).map(Coin).collect();
    let root = power(&coins, n);
    Ok(StrategyTree::new(coins.len(), root).expect("construction is well formed"))
}

fn power(x: &[Coin], m: u32) -> Node {
    if m == 0 {
        return leaf_for(x);
    }
    let t = x.len() / 3;
    let (x1, x2, x3) = (&x[..t], &x[t..2 * t], &x[2 * t..]);
    let w = |a: &[Coin], b: &[Coin]| Weighing::new(a.to_vec(), b.to_vec()).expect("disjoint thirds");
    let sub = m - 1;
    // balanced first: compare X1 with X3
    let balanced = Node::decision(
        w(x1, x3),
        [
            classic(&[x2, x3].concat(), 2 * sub, 2),
            two_searches(x1, x2, sub),
            power(x3, sub),
        ],
    );
    // `a` lighter than `b` in the first weighing, then `a v c`
    let lighter = |a: &[Coin], c: &[Coin]| {
        Node::decision(
            w(a, c),
            [two_searches(a, c, sub), power(a, sub), classic(c, 2 * sub, 1)],
        )
    };
    Node::decision(w(x1, x2), [balanced, lighter(x1, x3), lighter(x2, x3)])
}

impl Node {
    /// Same shape with every leaf rewritten.
    pub(crate) fn map_leaves(&self, f: &impl Fn(&Leaf) -> Leaf) -> Node {
        self.replace_leaves(&|l| Node::leaf(f(l)))
    }

    /// Same shape with every leaf replaced by a subtree.
    pub(crate) fn replace_leaves(&self, f: &impl Fn(&Leaf) -> Node) -> Node {
        match self {
            Node::Terminal(l) => f(l),
            Node::Decision { weighing, children } => Node::decision(
                weighing.clone(),
                [
                    children[0].replace_leaves(f),
                    children[1].replace_leaves(f),
                    children[2].replace_leaves(f),
                ],
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_fc;

    fn ids(r: std::ops::RangeInclusive<u16>) -> Vec<Coin> {
        r.map(Coin).collect()
    }

    #[test]
    fn four_coins_one_weighing_pairs() {
        let t = classic_fake_tree(&ids(1..=4), 1, 2).unwrap();
        let Node::Decision { weighing, children } = &t else { panic!() };
        assert_eq!(weighing, &Weighing::from_ids(&[1], &[2]).unwrap());
        assert_eq!(children[0], Node::leaf(Leaf::output2(Coin(3), Coin(4))));
    }

    #[test]
    fn classic_sizes() {
        let t = classic_fake_tree(&ids(1..=9), 2, 1).unwrap();
        assert_eq!(t.depth(), 2);
        let mut outs = Vec::new();
        t.for_each_leaf(&mut |_, l| outs.push(l.clone()));
        assert!(outs.iter().all(|l| matches!(l, Leaf::Output1(_))));
        let t = classic_fake_tree(&ids(1..=18), 2, 2).unwrap();
        assert_eq!(t.leaf_count(), 9);
        assert!(matches!(
            classic_fake_tree(&ids(1..=19), 2, 2),
            Err(SearchError::TooManyCoins { coins: 19, .. })
        ));
    }

    #[test]
    fn power_one_is_the_three_coin_tree() {
        let t = generate_power_solution(1).unwrap();
        let text = crate::codec::serialize_text(&t);
        assert_eq!(
            text,
            "0. 1 v 2 : => 1, => 2, sym.\n1. 1 v 3 : (2, 3), (1, 2), (3).\n2. 1 v 3 : (1, 3), (1), (3).\n"
        );
        assert!(verify_fc(&t).unwrap().valid);
    }

    #[test]
    fn power_two_is_valid() {
        let t = generate_power_solution(2).unwrap();
        assert_eq!((t.n_coins, t.depth()), (9, 4));
        assert!(verify_fc(&t).unwrap().valid);
    }
}
