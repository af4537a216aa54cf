//! Brute-force checks of the verifier against weight simulation.

mod common;

use common::*;
use cwlab::model::{Coin, Outcome, PairState, StrategyTree};
use cwlab::verify::verify_fc;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn verifier_matches_simulation_on_small_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut valid, mut total) = (0, 0);
    for n in 2..=4u16 {
        for _ in 0..4000 {
            let depth = rng.gen_range(0..=3);
            let root = random_node(&mut rng, n, depth, &PairState::initial(n as usize));
            let t = StrategyTree::new(n as usize, root).unwrap();
            let got = verify_fc(&t).unwrap().valid;
            assert_eq!(got, oracle_valid(&t), "disagreement on\n{}", cwlab::serialize_text(&t));
            valid += got as usize;
            total += 1;
        }
    }
    // both verdicts must be well represented for the comparison to mean much
    assert!(valid > total / 20 && valid < total - total / 20, "{valid}/{total} valid");
}

#[test]
fn shipped_small_solutions_match_simulation() {
    for f in cwlab::fixtures::ALL.iter().filter(|f| f.coins <= 6) {
        let t = f.tree().unwrap();
        assert!(oracle_valid(&t), "{}", f.name);
    }
}

proptest! {
    #[test]
    fn filter_keeps_exactly_the_simulated_pairs(
        n in 2u16..=9,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_weighing(&mut rng, n);
        let start = PairState::initial(n as usize);
        for o in Outcome::ALL {
            let s = start.filter(&w, o);
            for f in 1..=n {
                for c in (1..=n).filter(|&c| c != f) {
                    let possible = [false, true]
                        .iter()
                        .any(|&light| outcome(&w, Coin(f), Coin(c), light) == o);
                    prop_assert_eq!(s.contains(Coin(f), Coin(c)), possible, "{} {:?} f={} c={}", w, o, f, c);
                }
            }
        }
    }

    #[test]
    fn every_pair_survives_some_outcome(n in 2u16..=12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_weighing(&mut rng, n);
        let start = PairState::initial(n as usize);
        let kids = Outcome::ALL.map(|o| start.filter(&w, o));
        for (f, c) in start.pairs() {
            prop_assert!(kids.iter().any(|k| k.contains(f, c)));
        }
    }
}
