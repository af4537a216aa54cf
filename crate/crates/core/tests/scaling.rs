use cwlab::fixtures::{self, ALL};
use cwlab::scaling::{is_scalable, scale_k, scale_once, stuck_leaves, triple, ScaleError};
use cwlab::search::{search_exists, SearchConfig, SearchMode};
use cwlab::verify::{verify_fc, Mode};
use cwlab::{Node, StrategyTree};

fn agreement(t: &StrategyTree, name: &str) {
    let syntactic = is_scalable(t).unwrap();
    let built = scale_once(t, false);
    assert_eq!(syntactic.scalable, built.is_ok(), "{name}: {:?}", built.err());
    // the offending leaves are exactly the ones without a short completion
    let stuck: Vec<_> = stuck_leaves(t, 2).unwrap().into_iter().map(|d| d.path).collect();
    let offending: Vec<_> = syntactic.offending.into_iter().map(|d| d.path).collect();
    assert_eq!(stuck, offending, "{name}");
}

#[test]
fn classification_agrees_with_construction_on_fixtures() {
    for f in ALL.iter().filter(|f| f.mode == Mode::Fc) {
        let t = f.tree().unwrap();
        agreement(&t, f.name);
        if let Some(expected) = f.scalable {
            assert_eq!(is_scalable(&t).unwrap().scalable, expected, "{}", f.name);
        }
    }
}

#[test]
fn classification_agrees_on_searched_solutions() {
    for (w, max_n) in [(1, 2), (2, 4), (3, 6)] {
        for n in 2..=max_n {
            for mode in [SearchMode::Solution, SearchMode::ScalableSolution] {
                let out = search_exists(&SearchConfig::new(w, n).mode(mode)).unwrap();
                if let Some(t) = out.found() {
                    agreement(t, &format!("({w},{n}) {mode}"));
                    if mode == SearchMode::ScalableSolution {
                        assert!(is_scalable(t).unwrap().scalable);
                    }
                }
            }
        }
    }
}

#[test]
fn non_scalable_six_coins_points_at_the_together_leaf() {
    let rep = is_scalable(&fixtures::INLINE_3_6.tree().unwrap()).unwrap();
    assert!(!rep.scalable);
    let lines: Vec<u64> = rep.offending.iter().map(|d| d.line).collect();
    assert_eq!(lines, [1]);
    assert_eq!(rep.offending[0].leaf, "(5, 6)");
}

#[test]
fn scaling_preserves_scalability() {
    for f in [
        fixtures::INLINE_2_3,
        fixtures::SCALABLE_3_6,
        fixtures::A_4_10,
        fixtures::C_5_20,
        fixtures::D_6_36,
    ] {
        let s = scale_once(&f.tree().unwrap(), false).unwrap();
        assert_eq!(s.tree.n_coins, 3 * f.coins);
        assert_eq!(s.tree.depth(), f.weighings + s.completion_depth_used);
        assert!(is_scalable(&s.tree).unwrap().scalable, "{}", f.name);
    }
}

#[test]
fn prefix_is_the_tripled_original() {
    let t = fixtures::A_4_10.tree().unwrap();
    let s = scale_once(&t, false).unwrap();
    let (Node::Decision { weighing: w, .. }, Node::Decision { weighing: sw, .. }) = (&t.root, &s.tree.root) else {
        panic!("both trees start with a weighing");
    };
    let tripled: Vec<_> = w.left().iter().flat_map(|&c| triple(c)).collect();
    assert_eq!(sw.left(), tripled.as_slice());
}

#[test]
fn pseudo_solution_scales_to_a_solution() {
    let s = scale_once(&fixtures::PSEUDO_4_11.tree().unwrap(), false).unwrap();
    assert_eq!((s.tree.depth(), s.tree.n_coins), (6, 33));
    assert!(verify_fc(&s.tree).unwrap().valid);
    assert!(is_scalable(&s.tree).unwrap().scalable);
    let t = scale_k(&fixtures::PSEUDO_4_11.tree().unwrap(), 2).unwrap();
    assert_eq!((t.depth(), t.n_coins), (8, 99));
}

#[test]
fn non_scalable_needs_a_third_extra_weighing() {
    for f in [fixtures::INLINE_2_4, fixtures::INLINE_3_6, fixtures::B_4_11] {
        let t = f.tree().unwrap();
        assert!(matches!(scale_once(&t, false), Err(ScaleError::CompletionNotFound { .. })));
        let s = scale_once(&t, true).unwrap();
        assert_eq!(s.completion_depth_used, 3);
        assert_eq!(s.tree.n_coins, 3 * f.coins);
        assert!(verify_fc(&s.tree).unwrap().valid);
        // and the longer scaling can itself be scaled
        assert!(is_scalable(&s.tree).unwrap().scalable, "{}", f.name);
    }
}

#[test]
fn invalid_input_is_refused() {
    let mut text = fixtures::INLINE_2_3.text.to_string();
    text = text.replace("(1), (3)", "(2), (3)");
    let t = cwlab::parse(&text, 3).unwrap();
    assert!(matches!(scale_once(&t, false), Err(ScaleError::InvalidInput(_))));
    assert!(is_scalable(&t).is_err());
}
