use std::collections::BTreeMap;

use g2q::cluster::{Quiver, Seed, Vertex};
use g2q::sl2::{Sl2, Sl2Monomial};
use g2q::{a_inverse, a_monomial, Int, ModuleLabel, Monomial, Node, QPolynomial};
use proptest::prelude::*;

mod common;
use common::{partitions, weyl_dimension};

fn node() -> impl Strategy<Value = Node> {
    prop_oneof![Just(Node::One), Just(Node::Two)]
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((node(), -12i32..12, -3i32..=3), 0..6)
        .prop_map(|t| Monomial::from_triples(t).unwrap())
}

fn a_inverses() -> impl Strategy<Value = Vec<(Node, i32)>> {
    prop::collection::vec((node(), -20i32..20), 1..8)
}

fn product_of_a_inverses(list: &[(Node, i32)]) -> Monomial {
    list.iter().fold(Monomial::one(), |acc, &(n, s)| acc * a_inverse(n, s))
}

fn polynomial() -> impl Strategy<Value = QPolynomial> {
    prop::collection::vec((monomial(), -4i64..=4), 1..6)
        .prop_map(|ts| QPolynomial::from_terms(ts.into_iter().map(|(m, c)| (m, Int::from(c)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn a_inverse_products_are_right_negative(list in a_inverses(), more in a_inverses()) {
        let m = product_of_a_inverses(&list);
        prop_assert!(m.is_right_negative().unwrap());
        prop_assert!(!m.is_dominant());
        let n = product_of_a_inverses(&more);
        prop_assert!((&m * &n).is_right_negative().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn leq_is_a_partial_order(a in monomial(), down1 in prop::collection::vec((node(), -9i32..9), 0..5),
                              down2 in prop::collection::vec((node(), -9i32..9), 0..5), other in monomial()) {
        let b = &a * &product_of_a_inverses(&down1);
        let c = &b * &product_of_a_inverses(&down2);
        prop_assert!(a.leq(&a));
        prop_assert!(b.leq(&a));
        prop_assert!(c.leq(&b));
        // transitivity on the chain
        prop_assert!(c.leq(&a));
        for (x, y) in [(&a, &b), (&b, &c), (&a, &other), (&other, &c)] {
            if x.leq(y) && y.leq(x) {
                prop_assert_eq!(x, y);
            }
        }
        if other.leq(&c) {
            prop_assert!(other.leq(&a));
        }
    }

    #[test]
    fn shift_and_iota_are_homomorphisms(m in monomial(), n in monomial(), d in -30i32..30) {
        prop_assert_eq!((&m * &n).shift(d), m.shift(d) * n.shift(d));
        prop_assert_eq!((&m * &n).iota(), m.iota() * n.iota());
        prop_assert_eq!(m.iota().iota(), m.clone());
        prop_assert_eq!(m.shift(d).shift(-d), m.clone());
        prop_assert_eq!(m.inverse().iota(), m.iota().inverse());
    }

    #[test]
    fn iota_turns_a_into_a_inverse(n in node(), s in -30i32..30) {
        prop_assert_eq!(a_monomial(n, s).iota(), a_inverse(n, 12 - s));
        prop_assert_eq!(a_monomial(n, s).shift(4), a_monomial(n, s + 4));
    }

    #[test]
    fn polynomial_maps_are_ring_homomorphisms(p in polynomial(), q in polynomial(), d in -10i32..10) {
        let pq = &p * &q;
        prop_assert_eq!(pq.apply_shift(d), &p.apply_shift(d) * &q.apply_shift(d));
        prop_assert_eq!(pq.apply_iota(), &p.apply_iota() * &q.apply_iota());
        prop_assert_eq!((&p + &q).apply_iota(), &p.apply_iota() + &q.apply_iota());
        prop_assert_eq!(pq.restrict_to_uqg(), &p.restrict_to_uqg() * &q.restrict_to_uqg());
    }

    #[test]
    fn exact_division_inverts_multiplication(p in polynomial(), q in polynomial()) {
        prop_assume!(!q.is_zero());
        let pq = &p * &q;
        prop_assert_eq!(pq.exact_div(&q).unwrap(), Some(p.clone()));
        if q.len() >= 2 {
            // a monomial is a unit, never a multiple of a polynomial with two terms
            let extra = QPolynomial::from_monomial(Monomial::var(Node::One, 40));
            prop_assert_eq!((&pq + &extra).exact_div(&q).unwrap(), None);
        }
    }

    #[test]
    fn text_and_json_round_trip(m in monomial(), p in polynomial()) {
        prop_assert_eq!(m.to_string().parse::<Monomial>().unwrap(), m.clone());
        prop_assert_eq!(g2q::parse_monomial(&m.to_string()).unwrap(), m);
        prop_assert_eq!(p.to_string().parse::<QPolynomial>().unwrap(), p.clone());
        prop_assert_eq!(QPolynomial::from_json(&p.to_json().to_string()).unwrap(), p);
    }

    #[test]
    fn labels_round_trip(k in 0u32..50, l in 0u32..50, s in -1000i32..1000, dual: bool) {
        let label = if dual { ModuleLabel::dual(k, l, s) } else { ModuleLabel::t(k, l, s) };
        prop_assert_eq!(label.to_string().parse::<ModuleLabel>().unwrap(), label);
        prop_assert!(label.highest_monomial().is_dominant());
        prop_assert_eq!(label.is_trivial(), k == 0 && l == 0);
    }
}

// ---- sl2 strings ----

fn sl2() -> impl Strategy<Value = Sl2> {
    prop_oneof![Just(Sl2::STANDARD), Just(Sl2::for_node(Node::One))]
}

/// Dominant monomials of degree at most 8 on a small grid, so that strings
/// overlap and touch often.
fn dominant(unit: i32) -> impl Strategy<Value = Sl2Monomial> {
    prop::collection::vec((0i32..7, 1i32..=3), 1..5).prop_map(move |pts| {
        let mut budget = 8;
        let mut pairs = Vec::new();
        for (p, e) in pts {
            let e = e.min(budget);
            if e > 0 {
                pairs.push((p * unit, e));
                budget -= e;
            }
        }
        Sl2Monomial::from_pairs(pairs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn decomposition_matches_partition_oracle((sl, m) in sl2().prop_flat_map(|sl| (Just(sl), dominant(sl.unit)))) {
        let all = partitions(sl, &m);
        prop_assert_eq!(all.len(), 1, "{} admits {:?}", m, all);
        prop_assert_eq!(sl.decompose_strings(&m).unwrap(), all[0].clone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn peeling_recovers_the_highest_monomials(
        (sl, m, n) in sl2().prop_flat_map(|sl| (Just(sl), dominant(sl.unit), dominant(sl.unit))),
        c in 1i64..4,
    ) {
        let chi = sl.character(&m).unwrap();
        prop_assert_eq!(sl.peel_characters(&chi), Some(vec![(m.clone(), Int::ONE)]));
        let mut sum = chi.clone();
        sum.add_scaled(&sl.character(&n).unwrap(), &Int::from(c));
        let mut expected: BTreeMap<Sl2Monomial, i64> = BTreeMap::new();
        *expected.entry(m.clone()).or_default() += 1;
        *expected.entry(n.clone()).or_default() += c;
        let mut got = sl.peel_characters(&sum).unwrap();
        got.sort();
        let want: Vec<(Sl2Monomial, Int)> = expected.into_iter().map(|(k, v)| (k, Int::from(v))).collect();
        prop_assert_eq!(got, want);
        // removing the highest monomial leaves something that is no character
        let mut broken = chi.clone();
        broken.add_term(m.clone(), &Int::from(-1));
        if !broken.is_zero() {
            prop_assert!(sl.peel_characters(&broken).is_none() || sl.peel_characters(&broken).unwrap().iter().any(|(_, c)| c.is_negative()));
        }
    }
}

// ---- quiver mutation ----

fn random_seed() -> impl Strategy<Value = Seed> {
    (3usize..7)
        .prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let len = pairs.len();
            (Just(n), Just(pairs), prop::collection::vec(-1i32..=1, len), prop::collection::vec(any::<bool>(), n))
        })
        .prop_map(|(n, pairs, mults, frozen)| {
            let v = |i: usize| Vertex::new(Node::One, i as i32);
            let arrows = pairs.iter().zip(&mults).filter(|(_, m)| **m != 0).map(|(&(i, j), &m)| {
                if m > 0 {
                    (v(i), v(j), m as u32)
                } else {
                    (v(j), v(i), (-m) as u32)
                }
            });
            // keep vertex 0 mutable
            let frozen = (1..n).filter(|&i| frozen[i] && i % 3 == 0).map(v);
            Seed::symbolic(Quiver::new((0..n).map(v), arrows, frozen).unwrap(), BTreeMap::new())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mutation_is_an_involution(seed in random_seed(), pick in 0usize..9, path in prop::collection::vec(0usize..9, 0..5)) {
        let mutable: Vec<Vertex> = seed.quiver().vertices().filter(|&v| !seed.quiver().is_frozen(v)).collect();
        let v = mutable[pick % mutable.len()];
        let once = seed.mutate(v).unwrap();
        prop_assert_eq!(once.mutate(v).unwrap(), seed.clone());

        let mut s = seed.clone();
        for p in path {
            s = s.mutate(mutable[p % mutable.len()]).unwrap();
            let q = s.quiver();
            for (a, b, m) in q.arrows() {
                prop_assert!(a != b, "loop at {a}");
                prop_assert!(m > 0);
                prop_assert_eq!(q.multiplicity(b, a), 0, "2-cycle {} {}", a, b);
            }
        }
    }
}

#[test]
fn dual_characters_are_iota_images() {
    let cache = g2q::QCharCache::new(g2q::Caps::default());
    for (k, l) in [(1, 0), (0, 1), (1, 1), (0, 2)] {
        let t = g2q::minaff::label_character(ModuleLabel::t(k, l, -3), &cache).unwrap();
        let d = g2q::minaff::label_character(ModuleLabel::dual(k, l, -3), &cache).unwrap();
        assert_eq!(t.apply_iota(), *d, "k={k} l={l}");
    }
}

fn reflect(w: (i64, i64), node: usize) -> (i64, i64) {
    // simple roots in fundamental-weight coordinates
    let roots = [(2, -3), (-1, 2)];
    let c = if node == 0 { w.0 } else { w.1 };
    (w.0 - c * roots[node].0, w.1 - c * roots[node].1)
}

#[test]
fn restricted_characters_are_weyl_invariant() {
    let cache = g2q::QCharCache::new(g2q::Caps::default());
    let labels = [(0, 1, 15), (1, 0, 0), (0, 2, 0), (1, 1, -7), (0, 3, 1), (2, 0, 0), (1, 2, 4)];
    for (k, l, s) in labels {
        let label = ModuleLabel::t(k, l, s);
        let chi = g2q::minaff::label_character(label, &cache).unwrap().restrict_to_uqg();
        for (&w, c) in chi.iter() {
            for node in 0..2 {
                assert_eq!(chi.coefficient(reflect(w, node)), *c, "{label} at {w:?}");
            }
        }
        let head = (k as i64, l as i64);
        assert_eq!(chi.coefficient(head), Int::ONE, "{label}");
        assert!(chi.dimension() >= Int::from(weyl_dimension(head.0, head.1)));
    }
    let dim = |k, l| g2q::minaff::label_character(ModuleLabel::t(k, l, 0), &cache).unwrap().restrict_to_uqg().dimension();
    assert_eq!(weyl_dimension(0, 1), 7);
    assert_eq!(weyl_dimension(1, 0), 14);
    assert_eq!(dim(0, 1), Int::from(7));
    assert_eq!(dim(1, 0), Int::from(weyl_dimension(1, 0) + 1));
}

#[test]
fn fuzz_corpus_seeds_decode() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let read = |target: &str| -> Vec<(String, String)> {
        let mut out: Vec<_> = std::fs::read_dir(root.join(target))
            .unwrap()
            .map(|e| {
                let path = e.unwrap().path();
                (path.display().to_string(), std::fs::read_to_string(&path).unwrap())
            })
            .collect();
        out.sort();
        assert!(!out.is_empty(), "{target}");
        out
    };
    for (name, src) in read("parse_monomial") {
        g2q::parse_monomial(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, src) in read("parse_polynomial") {
        g2q::parse_polynomial(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, src) in read("polynomial_json") {
        QPolynomial::from_json(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, src) in read("module_label") {
        src.parse::<ModuleLabel>().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, src) in read("seed_json") {
        Seed::from_json(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    // the fuzzer splits these bytes into (rows, plan); read whole they are plans too
    assert!(read("column_plan").iter().all(|(_, s)| g2q::cluster::ColumnPlan::parse(s, 5).is_ok()));
}
