//! Brute-force oracles shared by the property and acceptance suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use g2q::sl2::{Sl2, Sl2Monomial, Str};

fn string_set(sl: Sl2, s: Str) -> BTreeSet<i32> {
    sl.elements(s).collect()
}

/// Union not a string, or nested; computed on the point sets.
pub fn general_position(sl: Sl2, a: Str, b: Str) -> bool {
    let (x, y) = (string_set(sl, a), string_set(sl, b));
    if x.is_subset(&y) || y.is_subset(&x) {
        return true;
    }
    let u: Vec<i32> = x.union(&y).copied().collect();
    !u.windows(2).all(|w| w[1] - w[0] == 2 * sl.unit)
}

/// Every way to cover the multiset of points by strings in pairwise
/// general position.
pub fn partitions(sl: Sl2, m: &Sl2Monomial) -> Vec<Vec<Str>> {
    fn go(sl: Sl2, rest: &BTreeMap<i32, i32>, acc: &mut Vec<Str>, out: &mut BTreeSet<Vec<Str>>) {
        let Some(&lo) = rest.keys().next() else {
            if acc.iter().enumerate().all(|(i, a)| acc[i + 1..].iter().all(|b| general_position(sl, *a, *b))) {
                let mut v = acc.clone();
                v.sort_unstable();
                out.insert(v);
            }
            return;
        };
        // the lowest remaining point starts some string
        for len in 1.. {
            let s = sl.string_from_lowest(lo, len);
            let mut next = rest.clone();
            let mut fits = true;
            for p in sl.elements(s) {
                match next.get_mut(&p) {
                    Some(e) if *e > 0 => {
                        *e -= 1;
                        if *e == 0 {
                            next.remove(&p);
                        }
                    }
                    _ => fits = false,
                }
            }
            if !fits {
                break;
            }
            acc.push(s);
            go(sl, &next, acc, out);
            acc.pop();
        }
    }
    let rest: BTreeMap<i32, i32> = m.pairs().iter().copied().collect();
    let mut out = BTreeSet::new();
    go(sl, &rest, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// Weyl dimension formula for the highest weight `a·ω₁ + b·ω₂`, node 1 long.
pub fn weyl_dimension(a: i64, b: i64) -> i64 {
    let (a, b) = (b, a);
    (a + 1) * (b + 1) * (a + b + 2) * (a + 2 * b + 3) * (a + 3 * b + 4) * (2 * a + 3 * b + 5) / 120
}
