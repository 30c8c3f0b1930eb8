//! q-characters of `U_q(ŝl₂)` on the integer shift grid.
//!
//! Variables are `Y_s`, and a *unit* `u` fixes the grid step: `A_b = Y_{b-u} Y_{b+u}`
//! and a q-string of length `k` centred at `a` is `{a + u(k-1-2i) : 0 ≤ i < k}`.
//! Unit 1 is ordinary `ŝl₂`; unit `r_i` is the rank-one subalgebra at node `i`
//! of G2 seen through [`crate::zp_ring::QPolynomial::beta`].

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::coeff::Int;
use crate::error::{Error, Result};
use crate::monomial::Node;

/// Laurent monomial in the `Y_s`, stored as sorted `(shift, exp)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sl2Monomial {
    pairs: SmallVec<[(i32, i32); 4]>,
}

impl Sl2Monomial {
    pub fn one() -> Sl2Monomial {
        Sl2Monomial::default()
    }

    pub fn var(shift: i32) -> Sl2Monomial {
        Sl2Monomial { pairs: SmallVec::from_slice(&[(shift, 1)]) }
    }

    pub fn from_pairs<I: IntoIterator<Item = (i32, i32)>>(pairs: I) -> Result<Sl2Monomial> {
        let mut raw: SmallVec<[(i32, i64); 8]> = pairs.into_iter().map(|(s, e)| (s, e as i64)).collect();
        raw.sort_unstable_by_key(|p| p.0);
        let mut out = SmallVec::new();
        let mut i = 0;
        while i < raw.len() {
            let (s, mut e) = raw[i];
            i += 1;
            while i < raw.len() && raw[i].0 == s {
                e += raw[i].1;
                i += 1;
            }
            if e != 0 {
                out.push((s, i32::try_from(e).map_err(|_| Error::Overflow)?));
            }
        }
        Ok(Sl2Monomial { pairs: out })
    }

    pub fn pairs(&self) -> &[(i32, i32)] {
        &self.pairs
    }

    pub fn exponent(&self, shift: i32) -> i32 {
        self.pairs.binary_search_by_key(&shift, |p| p.0).map(|i| self.pairs[i].1).unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_dominant(&self) -> bool {
        self.pairs.iter().all(|p| p.1 > 0)
    }

    /// Sum of exponents; `A_b` has degree 2.
    pub fn degree(&self) -> i64 {
        self.pairs.iter().map(|p| p.1 as i64).sum()
    }

    pub fn mul(&self, other: &Sl2Monomial) -> Sl2Monomial {
        Sl2Monomial::from_pairs(self.pairs.iter().chain(other.pairs.iter()).copied()).expect("exponent overflow")
    }
}

impl fmt::Display for Sl2Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("1");
        }
        for (i, &(s, e)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if s < 0 {
                write!(f, "Y_{{{s}}}")?;
            } else {
                write!(f, "Y_{s}")?;
            }
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Sl2Monomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sl2Monomial> {
        crate::text::parse_sl2_monomial(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sl2Polynomial {
    terms: BTreeMap<Sl2Monomial, Int>,
}

impl Sl2Polynomial {
    pub fn one() -> Sl2Polynomial {
        Sl2Polynomial::from_terms([(Sl2Monomial::one(), Int::ONE)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Sl2Monomial, Int)>>(terms: I) -> Sl2Polynomial {
        let mut p = Sl2Polynomial::default();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn add_term(&mut self, m: Sl2Monomial, c: &Int) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn coefficient(&self, m: &Sl2Monomial) -> Int {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sl2Monomial, &Int)> {
        self.terms.iter()
    }

    pub fn mul(&self, other: &Sl2Polynomial) -> Sl2Polynomial {
        let mut out = Sl2Polynomial::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.mul(b), &(ca * cb));
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Sl2Polynomial, c: &Int) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), &(v * c));
        }
    }
}

impl fmt::Display for Sl2Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{m}")?;
        }
        Ok(())
    }
}

/// A q-string: `len` consecutive grid points centred at `center`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Str {
    pub center: i32,
    pub len: u32,
}

/// Rank-one q-character calculus with a fixed grid unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sl2 {
    pub unit: i32,
}

impl Sl2 {
    pub const STANDARD: Sl2 = Sl2 { unit: 1 };

    pub fn for_node(node: Node) -> Sl2 {
        Sl2 { unit: node.r() }
    }

    /// Elements of `s`, largest first.
    pub fn elements(&self, s: Str) -> impl Iterator<Item = i32> {
        let (u, k, a) = (self.unit, s.len as i32, s.center);
        (0..k).map(move |i| a + u * (k - 1 - 2 * i))
    }

    /// The string with elements `lo, lo + 2u, ..., lo + 2u(len - 1)`.
    pub fn string_from_lowest(&self, lo: i32, len: u32) -> Str {
        Str { center: lo + self.unit * (len as i32 - 1), len }
    }

    pub fn highest_monomial(&self, s: Str) -> Sl2Monomial {
        Sl2Monomial::from_pairs(self.elements(s).map(|e| (e, 1))).expect("small exponents")
    }

    /// `A_b⁻¹ = Y_{b-u}⁻¹ Y_{b+u}⁻¹`.
    pub fn a_inverse(&self, b: i32) -> Sl2Monomial {
        Sl2Monomial::from_pairs([(b - self.unit, -1), (b + self.unit, -1)]).expect("small exponents")
    }

    /// Centres of the `A⁻¹` factors along the string, in lowering order:
    /// term `i` of the character is the highest monomial times the first `i`.
    pub fn lowering_centers(&self, s: Str) -> Vec<i32> {
        let (u, k, a) = (self.unit, s.len as i32, s.center);
        (0..k).map(|j| a + u * (k - 2 * j)).collect()
    }

    /// q-character of the evaluation module of a single string.
    pub fn string_character(&self, s: Str) -> Sl2Polynomial {
        let mut m = self.highest_monomial(s);
        let mut out = Sl2Polynomial::from_terms([(m.clone(), Int::ONE)]);
        for b in self.lowering_centers(s) {
            m = m.mul(&self.a_inverse(b));
            out.add_term(m.clone(), &Int::ONE);
        }
        out
    }

    /// Two strings are in general position iff their union is not a string
    /// or one contains the other.
    pub fn in_general_position(&self, a: Str, b: Str) -> bool {
        let (ea, eb): (Vec<i32>, Vec<i32>) = (self.elements(a).collect(), self.elements(b).collect());
        if ea.iter().all(|x| eb.contains(x)) || eb.iter().all(|x| ea.contains(x)) {
            return true;
        }
        let mut union: Vec<i32> = ea.into_iter().chain(eb).collect();
        union.sort_unstable();
        union.dedup();
        !union.windows(2).all(|w| w[1] - w[0] == 2 * self.unit)
    }

    /// The unique decomposition of a dominant monomial into strings in
    /// pairwise general position.
    ///
    /// Peels layers: the distinct support points of each residue class mod
    /// `2u` split into maximal runs of step `2u`, each run is a string, and one copy of every point is
    /// removed. Runs of one layer are disjoint and non-adjacent, and each
    /// later run lies inside a run of the previous layer.
    pub fn decompose_strings(&self, m: &Sl2Monomial) -> Result<Vec<Str>> {
        if !m.is_dominant() {
            return Err(Error::NotDominant(m.to_string()));
        }
        let mut rest: BTreeMap<i32, i32> = m.pairs().iter().copied().collect();
        let mut out = Vec::new();
        while !rest.is_empty() {
            let mut points: Vec<i32> = rest.keys().copied().collect();
            points.sort_unstable_by_key(|&p| (p.rem_euclid(2 * self.unit), p));
            let mut start = 0;
            for i in 1..=points.len() {
                if i == points.len() || points[i] - points[i - 1] != 2 * self.unit {
                    out.push(self.string_from_lowest(points[start], (i - start) as u32));
                    start = i;
                }
            }
            for p in points {
                let e = rest.get_mut(&p).expect("present");
                *e -= 1;
                if *e == 0 {
                    rest.remove(&p);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// q-character of the simple module with dominant highest monomial `m`.
    pub fn character(&self, m: &Sl2Monomial) -> Result<Sl2Polynomial> {
        let mut out = Sl2Polynomial::one();
        for s in self.decompose_strings(m)? {
            out = out.mul(&self.string_character(s));
        }
        Ok(out)
    }

    /// The character of `L(m)` as lowerings of `m`: each entry is a sorted
    /// list of centres `b` with the term `m · Π A_b⁻¹`, and its coefficient.
    pub fn lowerings(&self, m: &Sl2Monomial) -> Result<Vec<(Vec<i32>, Int)>> {
        let mut acc: BTreeMap<Vec<i32>, Int> = BTreeMap::from([(Vec::new(), Int::ONE)]);
        for s in self.decompose_strings(m)? {
            let centers = self.lowering_centers(s);
            let mut next: BTreeMap<Vec<i32>, Int> = BTreeMap::new();
            for (prefix, c) in &acc {
                for take in 0..=centers.len() {
                    let mut key = prefix.clone();
                    key.extend_from_slice(&centers[..take]);
                    key.sort_unstable();
                    *next.entry(key).or_default() += c;
                }
            }
            acc = next;
        }
        Ok(acc.into_iter().collect())
    }

    /// Writes `p` as a nonnegative combination of simple characters,
    /// returning `(highest monomial, multiplicity)` pairs, or `None` when
    /// that is impossible.
    ///
    /// Works down the degree buckets: every term of top degree must be a
    /// highest monomial, and its character only reaches lower degrees.
    pub fn peel_characters(&self, p: &Sl2Polynomial) -> Option<Vec<(Sl2Monomial, Int)>> {
        let mut buckets: BTreeMap<i64, BTreeMap<Sl2Monomial, Int>> = BTreeMap::new();
        for (m, c) in p.iter() {
            buckets.entry(m.degree()).or_default().insert(m.clone(), c.clone());
        }
        let mut out = Vec::new();
        while let Some((_, top)) = buckets.pop_last() {
            for (m, c) in top {
                if c.is_zero() {
                    continue;
                }
                if !m.is_dominant() || !c.is_positive() {
                    return None;
                }
                for (t, v) in self.character(&m).ok()?.iter() {
                    if *t == m {
                        continue;
                    }
                    let entry = buckets.entry(t.degree()).or_default().entry(t.clone()).or_default();
                    *entry -= &(v * &c);
                }
                out.push((m, c));
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(s: &str) -> Sl2Monomial {
        s.parse().unwrap()
    }

    /// All decompositions of the support multiset into strings in pairwise
    /// general position, by exhaustive search.
    fn brute_decompositions(sl: Sl2, m: &Sl2Monomial) -> Vec<Vec<Str>> {
        fn go(sl: Sl2, rest: &mut BTreeMap<i32, i32>, acc: &mut Vec<Str>, out: &mut Vec<Vec<Str>>) {
            let Some((&lo, _)) = rest.iter().next() else {
                let ok = acc.iter().enumerate().all(|(i, a)| acc[i + 1..].iter().all(|b| sl.in_general_position(*a, *b)));
                if ok {
                    let mut v = acc.clone();
                    v.sort_unstable();
                    out.push(v);
                }
                return;
            };
            let mut len = 0;
            while rest.get(&(lo + 2 * sl.unit * len as i32)).copied().unwrap_or(0) > 0 {
                len += 1;
                let s = sl.string_from_lowest(lo, len);
                let pts: Vec<i32> = sl.elements(s).collect();
                for p in &pts {
                    *rest.get_mut(p).unwrap() -= 1;
                }
                let snapshot: Vec<i32> = pts.iter().copied().filter(|p| rest[p] == 0).collect();
                for p in &snapshot {
                    rest.remove(p);
                }
                acc.push(s);
                go(sl, rest, acc, out);
                acc.pop();
                for p in &pts {
                    *rest.entry(*p).or_default() += 1;
                }
            }
        }
        let mut rest: BTreeMap<i32, i32> = m.pairs().iter().copied().collect();
        let mut out = Vec::new();
        go(sl, &mut rest, &mut Vec::new(), &mut out);
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn string_characters() {
        let sl = Sl2::STANDARD;
        assert_eq!(sl.string_character(Str { center: 0, len: 1 }), Sl2Polynomial::from_terms([(y("Y_0"), Int::ONE), (y("Y_2^-1"), Int::ONE)]));
        let two = sl.string_character(Str { center: 1, len: 2 });
        let expect = Sl2Polynomial::from_terms([
            (y("Y_0 Y_2"), Int::ONE),
            (y("Y_0 Y_4^-1"), Int::ONE),
            (y("Y_2^-1 Y_4^-1"), Int::ONE),
        ]);
        assert_eq!(two, expect);
        let node1 = Sl2::for_node(Node::One).string_character(Str { center: 3, len: 2 });
        assert_eq!(node1.coefficient(&y("Y_0 Y_12^-1")), Int::ONE);
        assert_eq!(node1.len(), 3);
    }

    #[test]
    fn general_position_examples() {
        let sl = Sl2::STANDARD;
        let s = |lo, len| sl.string_from_lowest(lo, len);
        assert!(!sl.in_general_position(s(0, 1), s(2, 1)));
        assert!(sl.in_general_position(s(0, 1), s(4, 1)));
        assert!(sl.in_general_position(s(0, 3), s(2, 1)));
        assert!(!sl.in_general_position(s(0, 2), s(2, 2)));
        assert!(sl.in_general_position(s(0, 1), s(1, 1)));
    }

    #[test]
    fn decomposition_matches_exhaustive_search() {
        let sl = Sl2::STANDARD;
        for src in ["Y_0", "Y_0 Y_2", "Y_0^2 Y_2", "Y_0 Y_2^2 Y_4", "Y_0 Y_4", "Y_0 Y_1 Y_2 Y_3", "Y_0^2 Y_2^3 Y_4 Y_8"] {
            let m = y(src);
            let all = brute_decompositions(sl, &m);
            assert_eq!(all.len(), 1, "{src}: {all:?}");
            assert_eq!(sl.decompose_strings(&m).unwrap(), all[0], "{src}");
        }
    }

    #[test]
    fn characters_of_small_modules() {
        let sl = Sl2::STANDARD;
        // Y_0 Y_2 is a single string of length 2, so 3 terms; Y_0 Y_4 is a tensor product
        assert_eq!(sl.character(&y("Y_0 Y_2")).unwrap().len(), 3);
        assert_eq!(sl.character(&y("Y_0 Y_4")).unwrap().len(), 4);
        assert_eq!(sl.character(&y("Y_0^2")).unwrap().coefficient(&y("Y_0 Y_2^-1")), Int::from(2));
        assert!(sl.character(&y("Y_0^-1")).is_err());
        assert_eq!(sl.character(&Sl2Monomial::one()).unwrap(), Sl2Polynomial::one());
    }

    #[test]
    fn lowerings_reproduce_character() {
        let sl = Sl2::for_node(Node::One);
        let m = y("Y_0^2 Y_6 Y_18");
        let ch = sl.character(&m).unwrap();
        let mut rebuilt = Sl2Polynomial::default();
        for (centers, c) in sl.lowerings(&m).unwrap() {
            let mut t = m.clone();
            for b in centers {
                t = t.mul(&sl.a_inverse(b));
            }
            rebuilt.add_term(t, &c);
        }
        assert_eq!(rebuilt, ch);
    }

    #[test]
    fn peeling() {
        let sl = Sl2::STANDARD;
        let a = sl.character(&y("Y_0 Y_2")).unwrap();
        let b = sl.character(&y("Y_0")).unwrap();
        let mut sum = a.clone();
        sum.add_scaled(&b, &Int::from(2));
        sum.add_scaled(&Sl2Polynomial::one(), &Int::from(3));
        let mut peeled = sl.peel_characters(&sum).unwrap();
        peeled.sort();
        assert_eq!(peeled, vec![(Sl2Monomial::one(), Int::from(3)), (y("Y_0"), Int::from(2)), (y("Y_0 Y_2"), Int::ONE)]);
        let mut bad = b.clone();
        bad.add_term(y("Y_2^-1"), &Int::ONE);
        assert_eq!(sl.peel_characters(&bad), None);
    }
}
