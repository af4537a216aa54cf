//! Direct weight simulation shared by the oracle and acceptance targets:
//! genuine coins weigh 2, the fake weighs 1, and the chameleon picks 1 or 2
//! at every weighing.

use cwlab::model::{Coin, Leaf, Node, Outcome, PairState, StrategyTree, Weighing};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn weight(c: Coin, fake: Coin, cham: Coin, cham_light: bool) -> u32 {
    if c == fake || (c == cham && cham_light) {
        1
    } else {
        2
    }
}

pub fn outcome(w: &Weighing, fake: Coin, cham: Coin, cham_light: bool) -> Outcome {
    let sum = |pan: &[Coin]| pan.iter().map(|&c| weight(c, fake, cham, cham_light)).sum::<u32>();
    let (l, r) = (sum(w.left()), sum(w.right()));
    match l.cmp(&r) {
        std::cmp::Ordering::Equal => Outcome::Balanced,
        std::cmp::Ordering::Less => Outcome::LeftLight,
        std::cmp::Ordering::Greater => Outcome::RightLight,
    }
}

/// Every leaf the pair (fake, cham) can reach holds the fake.
pub fn pair_ok(node: &Node, fake: Coin, cham: Coin) -> bool {
    match node {
        Node::Terminal(Leaf::Output1(a)) => *a == fake,
        Node::Terminal(Leaf::Output2(a, b)) => *a == fake || *b == fake,
        Node::Terminal(_) => false,
        Node::Decision { weighing, children } => [false, true].iter().all(|&light| {
            let o = outcome(weighing, fake, cham, light);
            pair_ok(&children[o.index()], fake, cham)
        }),
    }
}

pub fn oracle_valid(t: &StrategyTree) -> bool {
    let n = t.n_coins as u16;
    (1..=n).all(|f| (1..=n).filter(|&c| c != f).all(|c| pair_ok(&t.root, Coin(f), Coin(c))))
}

pub fn random_weighing(rng: &mut ChaCha8Rng, n: u16) -> Weighing {
    let mut coins: Vec<u16> = (1..=n).collect();
    coins.shuffle(rng);
    let k = rng.gen_range(1..=n as usize / 2);
    Weighing::from_ids(&coins[..k], &coins[k..2 * k]).unwrap()
}

pub fn random_leaf(rng: &mut ChaCha8Rng, n: u16, state: &PairState) -> Leaf {
    let support = state.fake_support();
    if rng.gen_bool(0.6) {
        if let Some(l) = Leaf::output_of(&support) {
            return l;
        }
    }
    match rng.gen_range(0..3) {
        0 => Leaf::Impossible,
        1 => Leaf::Output1(Coin(rng.gen_range(1..=n))),
        _ => {
            let a = rng.gen_range(1..=n);
            let b = loop {
                let b = rng.gen_range(1..=n);
                if b != a {
                    break b;
                }
            };
            Leaf::output2(Coin(a), Coin(b))
        }
    }
}

pub fn random_node(rng: &mut ChaCha8Rng, n: u16, depth: u32, state: &PairState) -> Node {
    if depth == 0 || rng.gen_bool(0.2) {
        return Node::leaf(random_leaf(rng, n, state));
    }
    let w = random_weighing(rng, n);
    let kids = Outcome::ALL.map(|o| random_node(rng, n, depth - 1, &state.filter(&w, o)));
    Node::decision(w, kids)
}
