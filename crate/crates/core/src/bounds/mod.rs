//! Counting bounds on how many coins `w` weighings can handle, and on how
//! many weighings `N` coins need.
//!
//! All square roots are integer square roots of exact integers:
//! `sqrt(2 * 3^w + 1/4) = sqrt(8 * 3^w + 1) / 2`.

pub mod compose;

use std::fmt::Write as _;

use serde::Serialize;

fn pow3(w: u32) -> u128 {
    3u128.pow(w)
}

/// Most coins any `w`-weighing solution can handle: `floor(sqrt(2*3^w + 1/4) + 1/2)`.
pub fn itb(w: u32) -> u128 {
    ((8 * pow3(w) + 1).isqrt() + 1) / 2
}

/// `floor(sqrt(2 * 3^w))`.
pub fn induced_scalable_bound(w: u32) -> u128 {
    (2 * pow3(w)).isqrt()
}

/// Most coins a scalable solution can handle: `floor(sqrt(2*3^w + 1/4) - 1/2)`,
/// i.e. the largest `N` with `N(N+1)/2 <= 3^w`.
pub fn scalable_itb(w: u32) -> u128 {
    ((8 * pow3(w) + 1).isqrt() - 1) / 2
}

/// Least `k` with `3^k >= x`.
fn ceil_log3(x: u128) -> u32 {
    let mut k = 0;
    while pow3(k) < x {
        k += 1;
    }
    k
}

/// Known number of weighings for small `N`, as an inclusive range.
pub fn fc_exact(n: usize) -> Option<(u32, u32)> {
    let v = match n {
        2 => (1, 1),
        3..=4 => (2, 2),
        5..=6 => (3, 3),
        7..=11 => (4, 4),
        12..=20 => (5, 5),
        21..=36 => (6, 6),
        37..=38 => (6, 7),
        39..=62 => (7, 7),
        _ => return None,
    };
    Some(v)
}

/// Largest coin count with a known solution for `w` weighings, with where it comes from.
pub fn found(w: u32) -> Option<(u128, &'static str)> {
    match w {
        0 => Some((2, "trivial")),
        1 => Some((2, "search")),
        2 => Some((4, "search")),
        3 => Some((6, "search")),
        4 => Some((11, "fixture")),
        5 => Some((20, "fixture")),
        6 => Some((36, "fixture")),
        w if w % 2 == 1 => Some((20 * pow3((w - 5) / 2), "scaled")),
        w => Some((36 * pow3((w - 6) / 2), "scaled")),
    }
}

/// Weighings needed for `N` coins: `(lower, upper)`.
pub fn fc_bounds(n: usize) -> (u32, u32) {
    assert!(n >= 2, "at least two coins");
    (fc_lower(n), FcTable::up_to(n).upper(n))
}

/// `max(1, ceil(log3(N(N-1)/2)))`.
pub fn fc_lower(n: usize) -> u32 {
    let pairs = (n as u128) * (n as u128 - 1) / 2;
    ceil_log3(pairs).max(1)
}

/// `floor(3 * log3 N)`: the largest `k` with `3^k <= N^3`.
pub fn fc_log_bound(n: usize) -> u32 {
    let cube = (n as u128).pow(3);
    let mut k = 0;
    while pow3(k + 1) <= cube {
        k += 1;
    }
    k
}

/// `FC(floor(N/3)) + 4`, recursing down to the known small values.
pub fn fc_third_bound(n: usize) -> u32 {
    match fc_exact(n) {
        Some((_, hi)) => hi,
        None => fc_third_bound(n / 3) + 4,
    }
}

/// Upper bounds for every `N` up to some limit.
///
/// Seeds are the known small values (the pessimistic end where only a range
/// is known) and the solutions that exist for each `w`. Splitting `N = aK + r`
/// into `K` groups of `a` and finishing on `2a + r` coins gives
/// `FC(N) <= FC(K) + FC(2a + r)`, and adding coins never helps.
pub struct FcTable {
    upper: Vec<u32>,
}

impl FcTable {
    pub fn up_to(max_n: usize) -> Self {
        let max_n = max_n.max(2);
        let mut upper = vec![u32::MAX; max_n + 1];
        for (n, slot) in upper.iter_mut().enumerate().skip(2) {
            if let Some((_, hi)) = fc_exact(n) {
                *slot = hi;
            }
            let by_found = (1..)
                .find(|&w| found(w).is_some_and(|(f, _)| f >= n as u128))
                .expect("found values grow without bound");
            *slot = (*slot).min(by_found);
        }
        loop {
            let mut changed = false;
            for n in 4..=max_n {
                for a in 2..=n / 2 {
                    let (k, r) = (n / a, n % a);
                    let m = 2 * a + r;
                    if k < 2 || m >= n {
                        continue;
                    }
                    let v = upper[k].saturating_add(upper[m]);
                    if v < upper[n] {
                        upper[n] = v;
                        changed = true;
                    }
                }
            }
            for n in (2..max_n).rev() {
                if upper[n + 1] < upper[n] {
                    upper[n] = upper[n + 1];
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        FcTable { upper }
    }

    pub fn upper(&self, n: usize) -> u32 {
        self.upper[n]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeighingRow {
    pub w: u32,
    pub found: Option<u128>,
    pub found_source: Option<&'static str>,
    pub itb: u128,
    pub induced_scalable: u128,
    pub scalable_itb: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoinRow {
    pub n: usize,
    pub fc_lower: u32,
    pub fc_upper: u32,
    /// Known value as an inclusive range.
    pub fc_exact: Option<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsTable {
    pub by_weighings: Vec<WeighingRow>,
    pub by_coins: Vec<CoinRow>,
}

pub fn emit_tables(max_w: u32, max_n: usize) -> BoundsTable {
    let by_weighings = (1..=max_w)
        .map(|w| {
            let f = found(w);
            WeighingRow {
                w,
                found: f.map(|x| x.0),
                found_source: f.map(|x| x.1),
                itb: itb(w),
                induced_scalable: induced_scalable_bound(w),
                scalable_itb: scalable_itb(w),
            }
        })
        .collect();
    let table = FcTable::up_to(max_n);
    let by_coins = (2..=max_n)
        .map(|n| CoinRow {
            n,
            fc_lower: fc_lower(n),
            fc_upper: table.upper(n),
            fc_exact: fc_exact(n),
        })
        .collect();
    BoundsTable {
        by_weighings,
        by_coins,
    }
}

fn exact_str(e: Option<(u32, u32)>) -> String {
    match e {
        Some((a, b)) if a == b => a.to_string(),
        Some((a, b)) => format!("{a}-{b}"),
        None => String::new(),
    }
}

impl BoundsTable {
    /// Two aligned text tables.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>4} {:>10} {:>10} {:>18} {:>14}", "w", "found", "itb", "induced_scalable", "scalable_itb");
        for r in &self.by_weighings {
            let found = r.found.map(|f| f.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{:>4} {:>10} {:>10} {:>18} {:>14}",
                r.w, found, r.itb, r.induced_scalable, r.scalable_itb
            );
        }
        if !self.by_coins.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(s, "{:>6} {:>9} {:>9} {:>9}", "N", "fc_lower", "fc_upper", "fc_exact");
            for r in &self.by_coins {
                let _ = writeln!(
                    s,
                    "{:>6} {:>9} {:>9} {:>9}",
                    r.n,
                    r.fc_lower,
                    r.fc_upper,
                    exact_str(r.fc_exact)
                );
            }
        }
        s
    }

    /// The by-weighings table as CSV.
    pub fn weighings_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["w", "found", "itb", "induced_scalable", "scalable_itb"])?;
        for r in &self.by_weighings {
            w.write_record([
                r.w.to_string(),
                r.found.map(|f| f.to_string()).unwrap_or_default(),
                r.itb.to_string(),
                r.induced_scalable.to_string(),
                r.scalable_itb.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("ascii"))
    }

    /// The by-coins table as CSV.
    pub fn coins_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["N", "fc_lower", "fc_upper", "fc_exact"])?;
        for r in &self.by_coins {
            w.write_record([
                r.n.to_string(),
                r.fc_lower.to_string(),
                r.fc_upper.to_string(),
                exact_str(r.fc_exact),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("ascii"))
    }
}
