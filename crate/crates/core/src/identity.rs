//! Exact verification of identities `Σ Π χ = Σ Π χ` in `ℤP`.
//!
//! Products of large q-characters have tens of millions of terms, so the two
//! sides are never materialized. Every monomial is mapped to a dense `i8`
//! exponent vector over the variables that occur in the factors, and the
//! identity is checked one weight at a time: the weight is additive, so the
//! weight-`w` part of a product only involves factor terms whose weights
//! sum to `w`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::coeff::Int;
use crate::error::{Error, Result};
use crate::monomial::{Monomial, Node};
use crate::zp_ring::QPolynomial;

type Weight = (i64, i64);

/// A term of one side: the product of its factors.
pub type Product<'a> = Vec<&'a QPolynomial>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub monomial: Monomial,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    pub lhs_terms: u64,
    pub rhs_terms: u64,
    /// Smallest differing monomial in (weight, monomial) order.
    pub mismatch: Option<Mismatch>,
    /// Weights compared, and weights left out by a work budget.
    pub weights_checked: usize,
    pub weights_skipped: usize,
    /// Dominant terms of each product, left side first, in canonical order.
    #[serde(skip)]
    pub dominant: Vec<Vec<(Monomial, Int)>>,
}

struct Basis {
    vars: Vec<(Node, i32)>,
    index: FxHashMap<(Node, i32), usize>,
}

impl Basis {
    fn new<'a>(polys: impl Iterator<Item = &'a QPolynomial>) -> Basis {
        let mut seen: BTreeMap<(Node, i32), ()> = BTreeMap::new();
        for p in polys {
            for m in p.monomials() {
                for f in m.factors() {
                    seen.insert((f.node, f.shift), ());
                }
            }
        }
        let vars: Vec<_> = seen.into_keys().collect();
        let index = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        Basis { vars, index }
    }

    fn dense<const N: usize>(&self, m: &Monomial) -> [i8; N] {
        let mut d = [0i8; N];
        for f in m.factors() {
            d[self.index[&(f.node, f.shift)]] = f.exp as i8;
        }
        d
    }

    fn sparse<const N: usize>(&self, d: &[i8; N]) -> Monomial {
        let triples = d.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (self.vars[i].0, self.vars[i].1, e as i32));
        Monomial::from_triples(triples).expect("small exponents")
    }
}

type Dense<const N: usize> = [i8; N];
type Graded<const N: usize> = BTreeMap<Weight, Vec<(Dense<N>, i128)>>;

fn grade<const N: usize>(basis: &Basis, p: &QPolynomial) -> Result<Graded<N>> {
    let mut out: Graded<N> = BTreeMap::new();
    for (m, c) in p.iter() {
        let c = c.to_i64().ok_or(Error::Overflow)? as i128;
        out.entry(m.weight()).or_default().push((basis.dense(m), c));
    }
    Ok(out)
}

/// A product prepared for streaming: its graded factors and, per output
/// weight, the factor weights that contribute.
struct Prepared<const N: usize> {
    factors: Vec<Graded<N>>,
    plan: BTreeMap<Weight, Vec<Vec<Weight>>>,
}

impl<const N: usize> Prepared<N> {
    fn new(basis: &Basis, product: &[&QPolynomial]) -> Result<Prepared<N>> {
        // bounds every exponent of the product, so lane sums cannot leave i8
        let reach: i64 = product
            .iter()
            .map(|p| p.monomials().flat_map(|m| m.factors()).map(|f| f.exp.unsigned_abs() as i64).max().unwrap_or(0))
            .sum();
        if reach > i8::MAX as i64 {
            return Err(Error::Overflow);
        }
        let factors = product.iter().map(|p| grade::<N>(basis, p)).collect::<Result<Vec<_>>>()?;
        let mut plan: BTreeMap<Weight, Vec<Vec<Weight>>> = BTreeMap::from([((0, 0), vec![Vec::new()])]);
        for f in &factors {
            let mut next: BTreeMap<Weight, Vec<Vec<Weight>>> = BTreeMap::new();
            for (w, combos) in &plan {
                for fw in f.keys() {
                    let entry = next.entry((w.0 + fw.0, w.1 + fw.1)).or_default();
                    for c in combos {
                        let mut c = c.clone();
                        c.push(*fw);
                        entry.push(c);
                    }
                }
            }
            plan = next;
        }
        Ok(Prepared { factors, plan })
    }

    /// Term pairs visited to build the weight-`w` part.
    fn cost(&self, w: Weight) -> f64 {
        self.plan.get(&w).map_or(0.0, |combos| {
            combos.iter().map(|c| self.factors.iter().zip(c).map(|(f, fw)| f[fw].len() as f64).product::<f64>()).sum()
        })
    }

    /// The weight-`w` part of the product.
    fn part(&self, w: Weight) -> Result<FxHashMap<Dense<N>, i128>> {
        let mut acc: FxHashMap<Dense<N>, i128> = FxHashMap::default();
        let Some(combos) = self.plan.get(&w) else {
            return Ok(acc);
        };
        for combo in combos {
            let parts: Vec<&[(Dense<N>, i128)]> = self.factors.iter().zip(combo).map(|(f, fw)| f[fw].as_slice()).collect();
            accumulate(&parts, [0i8; N], 1, &mut acc)?;
        }
        acc.retain(|_, c| *c != 0);
        Ok(acc)
    }
}

fn accumulate<const N: usize>(
    parts: &[&[(Dense<N>, i128)]],
    base: Dense<N>,
    coef: i128,
    acc: &mut FxHashMap<Dense<N>, i128>,
) -> Result<()> {
    let Some((first, rest)) = parts.split_first() else {
        let e = acc.entry(base).or_default();
        *e = e.checked_add(coef).ok_or(Error::Overflow)?;
        return Ok(());
    };
    for (y, cy) in first.iter() {
        let mut z = base;
        for (a, b) in z.iter_mut().zip(y) {
            *a += *b;
        }
        accumulate(rest, z, coef.checked_mul(*cy).ok_or(Error::Overflow)?, acc)?;
    }
    Ok(())
}

/// Checks `Σ lhs = Σ rhs` exactly, counting the terms of both sides and
/// collecting the dominant terms of every product.
pub fn check_identity(lhs: &[Product<'_>], rhs: &[Product<'_>]) -> Result<IdentityCheck> {
    check_identity_within(lhs, rhs, None)
}

/// As [`check_identity`], but with a budget of term pairs: weights are
/// taken cheapest first while the running cost stays within the budget.
/// The comparison is exact on the weights checked; `holds` then only
/// speaks for those.
pub fn check_identity_within(lhs: &[Product<'_>], rhs: &[Product<'_>], budget: Option<f64>) -> Result<IdentityCheck> {
    let basis = Basis::new(lhs.iter().chain(rhs).flatten().copied());
    match basis.vars.len() {
        0..=32 => check_with::<32>(&basis, lhs, rhs, budget),
        33..=64 => check_with::<64>(&basis, lhs, rhs, budget),
        65..=128 => check_with::<128>(&basis, lhs, rhs, budget),
        129..=256 => check_with::<256>(&basis, lhs, rhs, budget),
        n => Err(Error::InvalidParameters(format!("{n} distinct variables exceed the dense kernel width"))),
    }
}

struct WeightResult {
    lhs_terms: u64,
    rhs_terms: u64,
    mismatch: Option<Mismatch>,
    dominant: Vec<Vec<(Monomial, Int)>>,
}

fn check_with<const N: usize>(
    basis: &Basis,
    lhs: &[Product<'_>],
    rhs: &[Product<'_>],
    budget: Option<f64>,
) -> Result<IdentityCheck> {
    let prep = |side: &[Product<'_>]| side.iter().map(|p| Prepared::<N>::new(basis, p)).collect::<Result<Vec<_>>>();
    let (lp, rp) = (prep(lhs)?, prep(rhs)?);
    let mut weights: Vec<Weight> = lp.iter().chain(&rp).flat_map(|p| p.plan.keys().copied()).collect();
    weights.sort_unstable();
    weights.dedup();
    let all_weights = weights.len();
    if let Some(budget) = budget {
        let mut costed: Vec<(f64, Weight)> =
            weights.iter().map(|&w| (lp.iter().chain(&rp).map(|p| p.cost(w)).sum(), w)).collect();
        costed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut spent = 0.0;
        weights = costed
            .into_iter()
            .take_while(|(c, _)| {
                spent += c;
                spent <= budget
            })
            .map(|(_, w)| w)
            .collect();
        weights.sort_unstable();
    }

    let sum = |parts: &mut Vec<FxHashMap<Dense<N>, i128>>| -> FxHashMap<Dense<N>, i128> {
        let mut total = parts.pop().unwrap_or_default();
        for p in parts.drain(..) {
            for (k, v) in p {
                *total.entry(k).or_default() += v;
            }
        }
        total.retain(|_, c| *c != 0);
        total
    };

    let per_weight = weights
        .par_iter()
        .map(|&w| -> Result<WeightResult> {
            let mut lparts = lp.iter().map(|p| p.part(w)).collect::<Result<Vec<_>>>()?;
            let mut rparts = rp.iter().map(|p| p.part(w)).collect::<Result<Vec<_>>>()?;
            let dominant = if w.0 >= 0 && w.1 >= 0 {
                lparts
                    .iter()
                    .chain(&rparts)
                    .map(|part| {
                        let mut d: Vec<(Monomial, Int)> = part
                            .iter()
                            .filter(|(z, _)| z.iter().all(|&e| e >= 0))
                            .map(|(z, c)| (basis.sparse(z), Int::from(*c as i64)))
                            .collect();
                        d.sort_unstable_by(|a, b| a.0.cmp(&b.0));
                        d
                    })
                    .collect()
            } else {
                vec![Vec::new(); lparts.len() + rparts.len()]
            };
            let (l, r) = (sum(&mut lparts), sum(&mut rparts));
            let mut bad: Option<Mismatch> = None;
            let mut consider = |z: &Dense<N>, a: i128, b: i128| {
                if a != b {
                    let m = basis.sparse(z);
                    if bad.as_ref().is_none_or(|x| m < x.monomial) {
                        bad = Some(Mismatch { monomial: m, lhs: a.to_string(), rhs: b.to_string() });
                    }
                }
            };
            for (z, &a) in &l {
                consider(z, a, r.get(z).copied().unwrap_or(0));
            }
            for (z, &b) in &r {
                if !l.contains_key(z) {
                    consider(z, 0, b);
                }
            }
            Ok(WeightResult { lhs_terms: l.len() as u64, rhs_terms: r.len() as u64, mismatch: bad, dominant })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = IdentityCheck {
        holds: true,
        lhs_terms: 0,
        rhs_terms: 0,
        mismatch: None,
        weights_checked: weights.len(),
        weights_skipped: all_weights - weights.len(),
        dominant: vec![Vec::new(); lp.len() + rp.len()],
    };
    for r in per_weight {
        out.lhs_terms += r.lhs_terms;
        out.rhs_terms += r.rhs_terms;
        if out.mismatch.is_none() {
            out.mismatch = r.mismatch;
        }
        for (acc, d) in out.dominant.iter_mut().zip(r.dominant) {
            acc.extend(d);
        }
    }
    for d in &mut out.dominant {
        d.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    }
    out.holds = out.mismatch.is_none();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> QPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn agrees_with_materialized_products() {
        let a = p("1_0 + 2_1 2_3^-1 + 3*1_6^-1");
        let b = p("2_0 + 1_3 2_2^-1 - 1");
        let c = p("2*1_0 2_0 + 1");
        let lhs_poly = &(&a * &b) + &c;
        let check = check_identity(&[vec![&a, &b], vec![&c]], &[vec![&lhs_poly]]).unwrap();
        assert!(check.holds, "{check:?}");
        assert_eq!(check.lhs_terms, lhs_poly.len() as u64);
        assert_eq!(check.rhs_terms, lhs_poly.len() as u64);
        assert_eq!(check.dominant[0], (&a * &b).dominant_terms());
        assert_eq!(check.dominant[2], lhs_poly.dominant_terms());
    }

    #[test]
    fn reports_smallest_mismatch() {
        let a = p("1_0 + 2_1");
        let wrong = p("1_0 + 2_1 + 2_5");
        let check = check_identity(&[vec![&a]], &[vec![&wrong]]).unwrap();
        assert!(!check.holds);
        let m = check.mismatch.unwrap();
        assert_eq!(m.monomial.to_string(), "2_5");
        assert_eq!((m.lhs.as_str(), m.rhs.as_str()), ("0", "1"));
    }

    #[test]
    fn budget_limits_the_weights() {
        let a = p("1_0 + 2_1 + 2_3^-1");
        let wrong = p("1_0 + 2_1 + 2_3^-1 + 5*1_0^2");
        let sq = &a * &a;
        let full = check_identity_within(&[vec![&a, &a]], &[vec![&wrong, &a]], None).unwrap();
        assert!(!full.holds);
        assert_eq!(full.weights_skipped, 0);
        let part = check_identity_within(&[vec![&a, &a]], &[vec![&sq]], Some(3.0)).unwrap();
        assert!(part.holds && part.weights_skipped > 0 && part.weights_checked > 0);
    }

    #[test]
    fn empty_and_constant_sides() {
        let one = QPolynomial::one();
        let check = check_identity(&[vec![&one, &one]], &[vec![&one]]).unwrap();
        assert!(check.holds);
        assert_eq!(check.lhs_terms, 1);
        let check = check_identity(&[], &[]).unwrap();
        assert!(check.holds);
    }
}
