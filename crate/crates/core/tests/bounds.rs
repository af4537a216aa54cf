use cwlab::bounds::compose::{compose, known_tree, ComposeError};
use cwlab::bounds::*;

const ITB: [u128; 10] = [3, 4, 7, 13, 22, 38, 66, 115, 198, 344];
const INDUCED: [u128; 10] = [2, 4, 7, 12, 22, 38, 66, 114, 198, 343];
const SCALABLE_ITB: [u128; 10] = [2, 3, 6, 12, 21, 37, 65, 114, 197, 343];
const FOUND: [u128; 10] = [2, 4, 6, 11, 20, 36, 60, 108, 180, 324];

#[test]
fn weighing_rows_match_published_tables() {
    for w in 1..=10u32 {
        let i = w as usize - 1;
        assert_eq!(itb(w), ITB[i], "itb({w})");
        assert_eq!(induced_scalable_bound(w), INDUCED[i], "induced({w})");
        assert_eq!(scalable_itb(w), SCALABLE_ITB[i], "scalable_itb({w})");
        assert_eq!(found(w).unwrap().0, FOUND[i], "found({w})");
    }
    assert_eq!(found(0).unwrap().0, 2);
}

#[test]
fn orderings_hold_far_out() {
    for w in 0..=30 {
        assert!(scalable_itb(w) <= induced_scalable_bound(w));
        assert!(induced_scalable_bound(w) <= itb(w));
        assert!(found(w).unwrap().0 <= itb(w));
        assert!(itb(w) <= itb(w + 1));
        assert!(scalable_itb(w) <= scalable_itb(w + 1));
    }
}

/// Table of known values: (first N, last N, low, high).
const SMALL: [(usize, usize, u32, u32); 8] = [
    (2, 2, 1, 1),
    (3, 4, 2, 2),
    (5, 6, 3, 3),
    (7, 11, 4, 4),
    (12, 20, 5, 5),
    (21, 36, 6, 6),
    (37, 38, 6, 7),
    (39, 62, 7, 7),
];

#[test]
fn coin_rows_match_the_small_table() {
    let t = FcTable::up_to(62);
    for (a, b, lo, hi) in SMALL {
        for n in a..=b {
            assert_eq!(fc_exact(n), Some((lo, hi)), "N={n}");
            let (lower, upper) = fc_bounds(n);
            assert!(lower <= lo && upper == hi, "N={n}: ({lower}, {upper})");
            assert_eq!(t.upper(n), hi);
        }
    }
    assert_eq!(fc_exact(63), None);
}

#[test]
fn composition_reaches_the_found_sizes() {
    assert_eq!(fc_bounds(180).1, 9);
    assert_eq!(fc_bounds(324).1, 10);
    // upper bounds never decrease with N
    let t = FcTable::up_to(3000);
    for n in 3..=3000 {
        assert!(t.upper(n - 1) <= t.upper(n));
    }
}

#[test]
fn tables_render() {
    let t = emit_tables(10, 62);
    assert_eq!(t.by_weighings[5].found, Some(36));
    assert_eq!(t.by_weighings[8].found, Some(180));
    let csv = t.coins_csv().unwrap();
    assert_eq!(csv.lines().next(), Some("N,fc_lower,fc_upper,fc_exact"));
    assert!(csv.contains("\n37,6,7,6-7\n"));
    assert!(t.to_text().lines().count() > 70);
}

#[test]
fn constructive_composition_verifies() {
    for (n, a) in [(9, 3), (12, 3), (20, 4), (30, 3)] {
        let c = compose(n, a).unwrap_or_else(|e| panic!("({n}, {a}): {e}"));
        assert!(c.report.valid, "({n}, {a}):\n{}", c.report);
        assert_eq!(c.tree.n_coins, n);
        assert_eq!(c.tree.depth(), c.stage_depths.0 + c.stage_depths.1);
    }
    assert!(matches!(compose(200, 2), Err(ComposeError::NoBaseTree(100))));
    assert!(known_tree(5).is_some());
}
