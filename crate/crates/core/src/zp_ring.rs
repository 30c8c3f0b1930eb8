//! The ring `ℤP` of finite integer combinations of monomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::coeff::Int;
use crate::error::{Error, Result};
use crate::monomial::{Monomial, Node};
use crate::sl2::{Sl2Monomial, Sl2Polynomial};

/// Products with at least this many term pairs are split across threads.
const PARALLEL_PAIRS: usize = 1 << 16;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QPolynomial {
    terms: FxHashMap<Monomial, Int>,
}

impl QPolynomial {
    pub fn zero() -> QPolynomial {
        QPolynomial::default()
    }

    pub fn one() -> QPolynomial {
        QPolynomial::from_monomial(Monomial::one())
    }

    pub fn from_monomial(m: Monomial) -> QPolynomial {
        let mut terms = FxHashMap::default();
        terms.insert(m, Int::ONE);
        QPolynomial { terms }
    }

    /// Sums repeated monomials and drops zero coefficients.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Int)>>(terms: I) -> QPolynomial {
        let mut p = QPolynomial::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: &Int) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
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

    pub fn coefficient(&self, m: &Monomial) -> Int {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains_key(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Int)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    /// Terms in canonical monomial order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Int)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Sum of coefficients.
    pub fn total(&self) -> Int {
        self.terms.values().fold(Int::ZERO, |acc, c| &acc + c)
    }

    pub fn scale(&self, c: &Int) -> QPolynomial {
        if c.is_zero() {
            return QPolynomial::zero();
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        QPolynomial { terms }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> QPolynomial {
        let terms = self.terms.iter().map(|(k, v)| (k * m, v.clone())).collect();
        QPolynomial { terms }
    }

    /// Convolution product; large products are computed in parallel chunks
    /// and merged, which does not affect the result.
    pub fn mul_poly(&self, other: &QPolynomial) -> QPolynomial {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.is_zero() {
            return QPolynomial::zero();
        }
        let small: Vec<_> = small.terms.iter().collect();
        if small.len().saturating_mul(large.len()) < PARALLEL_PAIRS {
            let mut acc = FxHashMap::default();
            accumulate_products(&mut acc, &small, large);
            return QPolynomial::from_accumulator(acc);
        }
        let chunk = (small.len() / (4 * rayon::current_num_threads())).max(1);
        let acc = small
            .par_chunks(chunk)
            .map(|part| {
                let mut acc = FxHashMap::default();
                accumulate_products(&mut acc, part, large);
                acc
            })
            .reduce(FxHashMap::default, |mut a, mut b| {
                if a.len() < b.len() {
                    std::mem::swap(&mut a, &mut b);
                }
                for (m, c) in b {
                    *a.entry(m).or_default() += &c;
                }
                a
            });
        QPolynomial::from_accumulator(acc)
    }

    fn from_accumulator(mut acc: FxHashMap<Monomial, Int>) -> QPolynomial {
        acc.retain(|_, c| !c.is_zero());
        QPolynomial { terms: acc }
    }

    /// Maximal term under [`Monomial::term_order`].
    pub fn leading_term(&self) -> Option<(&Monomial, &Int)> {
        self.terms.iter().max_by(|a, b| a.0.term_order(b.0))
    }

    /// Returns `r` with `divisor · r = self`, or `None` when no such `r`
    /// exists in `ℤP`.
    ///
    /// Leading-term elimination under the (height, lex) group order. The
    /// remainder is bucketed by height; when the divisor's top height part is
    /// a single monomial each bucket can be cleared in one pass, since
    /// subtracting a multiple of the divisor only touches strictly lower
    /// heights besides the eliminated term. Quotient monomials are confined to
    /// the exponent box `[min_v(p) - min_v(q), max_v(p) - max_v(q)]` for every
    /// variable `v`, which bounds the search when the division is not exact.
    pub fn exact_div(&self, divisor: &QPolynomial) -> Result<Option<QPolynomial>> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(QPolynomial::zero()));
        }
        let bounds = QuotientBox::new(self, divisor);
        let (lead_m, lead_c) = divisor.leading_term().expect("nonzero divisor");
        let (lead_m, lead_c) = (lead_m.clone(), lead_c.clone());
        let lead_inv = lead_m.inverse();
        let lead_height = lead_m.height();
        let top_is_single = divisor.monomials().filter(|m| m.height() == lead_height).count() == 1;
        let rest: Vec<(Monomial, Int, i64)> = divisor
            .terms
            .iter()
            .filter(|(m, _)| **m != lead_m)
            .map(|(m, c)| (m.clone(), c.clone(), m.height()))
            .collect();

        let mut buckets: BTreeMap<i64, FxHashMap<Monomial, Int>> = BTreeMap::new();
        for (m, c) in &self.terms {
            buckets.entry(m.height()).or_default().insert(m.clone(), c.clone());
        }
        let mut quotient = QPolynomial::zero();

        while let Some((height, bucket)) = buckets.pop_last() {
            let q_height = height - lead_height;
            if top_is_single {
                for (m, c) in bucket {
                    if c.is_zero() {
                        continue;
                    }
                    let Some((qm, qc)) = quotient_term(&m, &c, &lead_inv, &lead_c, &bounds) else {
                        return Ok(None);
                    };
                    for (dm, dc, dh) in &rest {
                        let key = &qm * dm;
                        let entry = buckets.entry(q_height + dh).or_default().entry(key).or_default();
                        *entry -= &(&qc * dc);
                    }
                    quotient.add_term(qm, &qc);
                }
            } else {
                let mut ordered: BTreeMap<OrderKey, Int> =
                    bucket.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (OrderKey(m), c)).collect();
                while let Some((OrderKey(m), c)) = ordered.pop_last() {
                    if c.is_zero() {
                        continue;
                    }
                    let Some((qm, qc)) = quotient_term(&m, &c, &lead_inv, &lead_c, &bounds) else {
                        return Ok(None);
                    };
                    for (dm, dc, dh) in &rest {
                        let key = &qm * dm;
                        let delta = &qc * dc;
                        if q_height + dh == height {
                            *ordered.entry(OrderKey(key)).or_default() -= &delta;
                        } else {
                            *buckets.entry(q_height + dh).or_default().entry(key).or_default() -= &delta;
                        }
                    }
                    quotient.add_term(qm, &qc);
                }
            }
        }
        Ok(Some(quotient))
    }

    /// Terms with dominant monomials, in canonical order.
    pub fn dominant_terms(&self) -> Vec<(Monomial, Int)> {
        self.filtered_sorted(|m| m.is_dominant())
    }

    pub fn antidominant_terms(&self) -> Vec<(Monomial, Int)> {
        self.filtered_sorted(|m| m.is_antidominant())
    }

    fn filtered_sorted(&self, keep: impl Fn(&Monomial) -> bool) -> Vec<(Monomial, Int)> {
        let mut v: Vec<_> = self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// The ring map `β_j`: node-`j` variables become `Y_s`, the others become 1.
    pub fn beta(&self, node: Node) -> Sl2Polynomial {
        Sl2Polynomial::from_terms(self.terms.iter().map(|(m, c)| {
            (Sl2Monomial::from_pairs(m.node_part(node)).expect("canonical input"), c.clone())
        }))
    }

    pub fn apply_shift(&self, d: i32) -> QPolynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.shift(d), c.clone())).collect();
        QPolynomial { terms }
    }

    pub fn apply_iota(&self) -> QPolynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.iota(), c.clone())).collect();
        QPolynomial { terms }
    }

    /// Restriction to `U_q g`: every monomial is replaced by its weight.
    pub fn restrict_to_uqg(&self) -> WeightPolynomial {
        let mut w = WeightPolynomial::default();
        for (m, c) in &self.terms {
            w.add_term(m.weight(), c);
        }
        w
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomials serialize")
    }

    pub fn from_json(v: &str) -> Result<QPolynomial> {
        Ok(serde_json::from_str(v)?)
    }
}

fn accumulate_products(acc: &mut FxHashMap<Monomial, Int>, part: &[(&Monomial, &Int)], large: &QPolynomial) {
    for (m1, c1) in part {
        for (m2, c2) in &large.terms {
            let key = *m1 * m2;
            let prod = *c1 * c2;
            *acc.entry(key).or_default() += &prod;
        }
    }
}

fn quotient_term(m: &Monomial, c: &Int, lead_inv: &Monomial, lead_c: &Int, bounds: &QuotientBox) -> Option<(Monomial, Int)> {
    let qc = c.div_exact(lead_c)?;
    let qm = m * lead_inv;
    bounds.admits(&qm).then_some((qm, qc))
}

/// Per-variable exponent range any exact quotient must respect.
struct QuotientBox {
    ranges: FxHashMap<(Node, i32), (i64, i64)>,
    zero_ok: rustc_hash::FxHashSet<(Node, i32)>,
}

impl QuotientBox {
    fn new(p: &QPolynomial, q: &QPolynomial) -> QuotientBox {
        let (pr, qr) = (exponent_ranges(p), exponent_ranges(q));
        let mut ranges = FxHashMap::default();
        for var in pr.keys().chain(qr.keys()) {
            let (plo, phi) = pr.get(var).copied().unwrap_or((0, 0));
            let (qlo, qhi) = qr.get(var).copied().unwrap_or((0, 0));
            ranges.insert(*var, (plo - qlo, phi - qhi));
        }
        let zero_ok = ranges.iter().filter(|(_, &(lo, hi))| lo <= 0 && 0 <= hi).map(|(v, _)| *v).collect();
        QuotientBox { ranges, zero_ok }
    }

    fn admits(&self, m: &Monomial) -> bool {
        let mut required = 0;
        for f in m.factors() {
            let var = (f.node, f.shift);
            match self.ranges.get(&var) {
                Some(&(lo, hi)) if lo <= f.exp as i64 && f.exp as i64 <= hi => {
                    if !self.zero_ok.contains(&var) {
                        required += 1;
                    }
                }
                _ => return false,
            }
        }
        // every variable whose range excludes 0 must be present
        required == self.ranges.len() - self.zero_ok.len()
    }
}

/// `(min, max)` exponent of each variable over all terms, counting absence as 0.
fn exponent_ranges(p: &QPolynomial) -> FxHashMap<(Node, i32), (i64, i64)> {
    let mut ranges: FxHashMap<(Node, i32), (i64, i64)> = FxHashMap::default();
    let mut counts: FxHashMap<(Node, i32), usize> = FxHashMap::default();
    for m in p.monomials() {
        for f in m.factors() {
            let e = f.exp as i64;
            let r = ranges.entry((f.node, f.shift)).or_insert((e, e));
            r.0 = r.0.min(e);
            r.1 = r.1.max(e);
            *counts.entry((f.node, f.shift)).or_default() += 1;
        }
    }
    for (var, r) in ranges.iter_mut() {
        if counts[var] < p.len() {
            r.0 = r.0.min(0);
            r.1 = r.1.max(0);
        }
    }
    ranges
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct OrderKey(Monomial);

impl Ord for OrderKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.term_order(&other.0)
    }
}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl Mul for &QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        self.mul_poly(rhs)
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        self.scale(&Int::from(-1))
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let (neg, abs) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{abs}*{m}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for QPolynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<QPolynomial> {
        crate::text::parse_polynomial(s)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    m: Monomial,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct JsonPoly {
    terms: Vec<JsonTerm>,
}

impl Serialize for QPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.sorted_terms().into_iter().map(|(m, c)| JsonTerm { m: m.clone(), c: c.to_string() }).collect();
        JsonPoly { terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = JsonPoly::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let c: Int = t.c.parse().map_err(|_| serde::de::Error::custom(format!("bad coefficient {:?}", t.c)))?;
            terms.push((t.m, c));
        }
        Ok(QPolynomial::from_terms(terms))
    }
}

/// Laurent polynomial in the two fundamental-weight variables `y₁, y₂`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightPolynomial {
    terms: BTreeMap<(i64, i64), Int>,
}

impl WeightPolynomial {
    pub fn one() -> WeightPolynomial {
        let mut w = WeightPolynomial::default();
        w.add_term((0, 0), &Int::ONE);
        w
    }

    pub fn add_term(&mut self, weight: (i64, i64), c: &Int) {
        let entry = self.terms.entry(weight).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&weight);
        }
    }

    pub fn coefficient(&self, weight: (i64, i64)) -> Int {
        self.terms.get(&weight).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &Int)> {
        self.terms.iter()
    }

    /// Value at `y₁ = y₂ = 1`, i.e. the dimension.
    pub fn dimension(&self) -> Int {
        self.terms.values().fold(Int::ZERO, |acc, c| &acc + c)
    }

    /// `y_i ↦ y_i⁻¹`.
    pub fn invert_weights(&self) -> WeightPolynomial {
        WeightPolynomial { terms: self.terms.iter().map(|(&(a, b), c)| ((-a, -b), c.clone())).collect() }
    }
}

impl Add for &WeightPolynomial {
    type Output = WeightPolynomial;
    fn add(self, rhs: &WeightPolynomial) -> WeightPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(*w, c);
        }
        out
    }
}

impl Mul for &WeightPolynomial {
    type Output = WeightPolynomial;
    fn mul(self, rhs: &WeightPolynomial) -> WeightPolynomial {
        let mut out = WeightPolynomial::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term((a.0 + b.0, a.1 + b.1), &(ca * cb));
            }
        }
        out
    }
}

impl fmt::Display for WeightPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*y1^{a} y2^{b}")?;
        }
        Ok(())
    }
}

impl Serialize for WeightPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for ((a, b), c) in &self.terms {
            seq.serialize_element(&(a, b, c.to_string()))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> QPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn ring_laws_on_examples() {
        let x = p("1_0 + 2*2_{-3}^2");
        assert_eq!(&x * &QPolynomial::one(), x);
        let (y, z) = (p("1_0"), p("2_5 1_1^-1"));
        assert_eq!(&(&y + &z) * &(&y - &z), &(&y * &y) - &(&z * &z));
        assert!((&x - &x).is_zero());
        assert_eq!(&x * &QPolynomial::zero(), QPolynomial::zero());
    }

    #[test]
    fn exact_division_examples() {
        let a = p("1_0 + 2_3 - 3*1_{-2} 2_1^-1");
        let b = p("2_2 + 1 + 1_4^-1");
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&b).unwrap(), Some(a.clone()));
        assert_eq!(prod.exact_div(&a).unwrap(), Some(b.clone()));
        assert_eq!(p("1_0 + 2_0").exact_div(&p("2*1_0")).unwrap(), None);
        assert_eq!(p("1_0").exact_div(&QPolynomial::zero()), Err(Error::DivisionByZero));
        assert_eq!(QPolynomial::zero().exact_div(&b).unwrap(), Some(QPolynomial::zero()));
        // (y^2 - 1) / (y - 1) with y of height 0 exercises the ordered path
        let h0 = p("2_0^5 1_0^-3");
        assert_eq!(h0.leading_term().unwrap().0.height(), 0);
        let num = &(&h0 * &h0) - &QPolynomial::one();
        let den = &h0 - &QPolynomial::one();
        assert_eq!(num.exact_div(&den).unwrap(), Some(&h0 + &QPolynomial::one()));
        let bad = &(&h0 * &h0) + &QPolynomial::one();
        assert_eq!(bad.exact_div(&den).unwrap(), None);
    }

    #[test]
    fn beta_collapses_other_node() {
        let x = p("2_0 + 2_2^-1 1_1 + 2_4 2_8^-1");
        let b = x.beta(Node::One);
        assert_eq!(b.coefficient(&Sl2Monomial::one()), Int::from(2));
        assert_eq!(QPolynomial::one().beta(Node::Two), Sl2Polynomial::one());

        let chi = p("2_0 + 2_2^-1 1_1 + 2_4 2_6 1_7^-1 + 2_4 2_8^-1 + 2_6^-1 2_8^-1 1_5 + 2_10 1_11^-1 + 2_12^-1");
        let y = |s, e| (Sl2Monomial::from_pairs([(s, e)]).unwrap(), Int::ONE);
        let expected = Sl2Polynomial::from_terms([
            (Sl2Monomial::one(), Int::from(3)),
            y(1, 1),
            y(5, 1),
            y(7, -1),
            y(11, -1),
        ]);
        assert_eq!(chi.beta(Node::One), expected);
    }

    #[test]
    fn restriction_and_dimension() {
        let x = p("2_0 + 2_2^-1 1_1 + 2_4 2_8^-1");
        let w = x.restrict_to_uqg();
        assert_eq!(w.coefficient((0, 1)), Int::ONE);
        assert_eq!(w.coefficient((1, -1)), Int::ONE);
        assert_eq!(w.coefficient((0, 0)), Int::ONE);
        assert_eq!(w.dimension(), Int::from(3));
    }

    #[test]
    fn text_and_json_forms() {
        let x = p("2*2_0 - 1_{-1} 2_3^-2 + 1");
        assert_eq!(x.to_string().parse::<QPolynomial>().unwrap(), x);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(QPolynomial::from_json(&json).unwrap(), x);
        assert!(json.starts_with(r#"{"terms":[{"m":[],"c":"1"}"#), "{json}");
        assert!(QPolynomial::from_json(r#"{"terms":[{"m":[[3,0,1]],"c":"1"}]}"#).is_err());
    }
}
