//! Minimal affinizations `T_{k,l}^{(s)}` and `T̃_{k,l}^{(s)}`, the M-system
//! and its dual, dominant-monomial classification, irreducibility witnesses
//! and the m-system obtained by restricting to `U_q g`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeff::Int;
use crate::error::{Error, Result};
use crate::fm::{Caps, QCharCache};
use crate::identity::{check_identity_within, IdentityCheck, Mismatch};
use crate::monomial::{a_inverse, Monomial, Node};
use crate::sl2::{Sl2, Sl2Monomial};
use crate::zp_ring::{QPolynomial, WeightPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    T,
    Dual,
}

/// Names the minimal affinization with highest weight `kω₁ + lω₂` and
/// spectral shift `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleLabel {
    pub kind: Kind,
    pub k: u32,
    pub l: u32,
    pub s: i32,
}

impl ModuleLabel {
    pub fn t(k: u32, l: u32, s: i32) -> ModuleLabel {
        ModuleLabel { kind: Kind::T, k, l, s }
    }

    pub fn dual(k: u32, l: u32, s: i32) -> ModuleLabel {
        ModuleLabel { kind: Kind::Dual, k, l, s }
    }

    pub fn with_kind(self, kind: Kind) -> ModuleLabel {
        ModuleLabel { kind, ..self }
    }

    /// `T_{k,l}^{(s)} = Π_{i<k} 1_{s+6i} · Π_{j<l} 2_{s+6k+2j+1}` and
    /// `T̃_{k,l}^{(s)} = Π_{i<l} 2_{-s-6k-2i-1} · Π_{j<k} 1_{-s-6j}`.
    pub fn highest_monomial(&self) -> Monomial {
        let (k, l, s) = (self.k as i32, self.l as i32, self.s);
        let triples: Vec<(Node, i32, i32)> = match self.kind {
            Kind::T => (0..k)
                .map(|i| (Node::One, s + 6 * i, 1))
                .chain((0..l).map(|j| (Node::Two, s + 6 * k + 2 * j + 1, 1)))
                .collect(),
            Kind::Dual => (0..l)
                .map(|i| (Node::Two, -s - 6 * k - 2 * i - 1, 1))
                .chain((0..k).map(|j| (Node::One, -s - 6 * j, 1)))
                .collect(),
        };
        Monomial::from_triples(triples).expect("small exponents")
    }

    pub fn is_trivial(&self) -> bool {
        self.k == 0 && self.l == 0
    }
}

impl fmt::Display for ModuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            Kind::T => "T",
            Kind::Dual => "Td",
        };
        write!(f, "{tag}:{},{},{}", self.k, self.l, self.s)
    }
}

const LABEL_LIMIT: u32 = 10_000;

impl FromStr for ModuleLabel {
    type Err = Error;

    /// `T:k,l,s` or `Td:k,l,s`.
    fn from_str(src: &str) -> Result<ModuleLabel> {
        let (tag, rest) = src.split_once(':').ok_or_else(|| Error::syntax(0, "expected 'T:' or 'Td:'"))?;
        let kind = match tag.trim() {
            "T" => Kind::T,
            "Td" => Kind::Dual,
            _ => return Err(Error::syntax(0, format!("unknown label kind {tag:?}"))),
        };
        let mut offset = tag.len() + 1;
        let mut fields = Vec::new();
        for part in rest.split(',') {
            let v: i64 = part.trim().parse().map_err(|_| Error::syntax(offset, format!("expected integer, found {part:?}")))?;
            fields.push((v, offset));
            offset += part.len() + 1;
        }
        let [(k, pk), (l, pl), (s, ps)] = fields[..] else {
            return Err(Error::syntax(src.len(), "expected three fields k,l,s"));
        };
        let k = u32::try_from(k).map_err(|_| Error::syntax(pk, "k must be a nonnegative integer"))?;
        let l = u32::try_from(l).map_err(|_| Error::syntax(pl, "l must be a nonnegative integer"))?;
        let s = i32::try_from(s).map_err(|_| Error::syntax(ps, "s out of range"))?;
        if k > LABEL_LIMIT || l > LABEL_LIMIT || s.unsigned_abs() > crate::text::MAX_SHIFT {
            return Err(Error::InvalidParameters(format!("label {src} is too large")));
        }
        Ok(ModuleLabel { kind, k, l, s })
    }
}

impl Serialize for ModuleLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModuleLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// q-character of a labelled module; `χ_q(T̃) = ι(χ_q(T))`.
pub fn label_character(label: ModuleLabel, cache: &QCharCache) -> Result<Arc<QPolynomial>> {
    match label.kind {
        Kind::T => cache.get(&label.highest_monomial()),
        Kind::Dual => Ok(Arc::new(cache.get(&label.with_kind(Kind::T).highest_monomial())?.apply_iota())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Family {
    Eq1,
    Eq2,
}

impl From<Family> for u8 {
    fn from(f: Family) -> u8 {
        match f {
            Family::Eq1 => 1,
            Family::Eq2 => 2,
        }
    }
}

impl TryFrom<u8> for Family {
    type Error = Error;
    fn try_from(v: u8) -> Result<Family> {
        match v {
            1 => Ok(Family::Eq1),
            2 => Ok(Family::Eq2),
            other => Err(Error::InvalidParameters(format!("unknown equation family {other}"))),
        }
    }
}

/// One equation of the M-system (or of the dual system when `dual`):
///
/// * `Eq1`, `k ≥ 1`, `1 ≤ l ≤ 3`:
///   `[T_{k,l}^{(s)}][T_{k,0}^{(s+6)}] = [T_{k+1,0}^{(s)}][T_{k-1,l}^{(s+6)}] + [T_{0,3k+l}^{(s)}]`
/// * `Eq2`, `k, l ≥ 1`:
///   `[T_{k,l+3}^{(s)}][T_{k,l}^{(s+6)}] = [T_{k+1,l}^{(s)}][T_{k-1,l+3}^{(s+6)}] + [T_{0,l}^{(s+6k+6)}][T_{0,3k+l+3}^{(s)}]`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EquationInstance {
    pub family: Family,
    pub k: u32,
    pub l: u32,
    pub s: i32,
    pub dual: bool,
}

/// The three summands of an equation as lists of module labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sides {
    pub lhs: Vec<ModuleLabel>,
    pub rhs1: Vec<ModuleLabel>,
    pub rhs2: Vec<ModuleLabel>,
}

impl EquationInstance {
    pub fn new(family: Family, k: u32, l: u32, s: i32, dual: bool) -> Result<EquationInstance> {
        let eq = EquationInstance { family, k, l, s, dual };
        eq.validate()?;
        Ok(eq)
    }

    /// The instance at the shift used by the worked examples of the
    /// M-system, where the right-most variable of every summand is `2_0`
    /// (or `2_0` on the left for the dual system).
    pub fn normalized(family: Family, k: u32, l: u32, dual: bool) -> Result<EquationInstance> {
        EquationInstance::new(family, k, l, Self::example_shift(family, k, l), dual)
    }

    pub fn example_shift(family: Family, k: u32, l: u32) -> i32 {
        let (k, l) = (k as i32, l as i32);
        match family {
            Family::Eq1 => -6 * k - 2 * l + 1,
            Family::Eq2 => -6 * k - 2 * l - 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.family {
            Family::Eq1 => self.k >= 1 && (1..=3).contains(&self.l),
            Family::Eq2 => self.k >= 1 && self.l >= 1,
        };
        if !ok {
            let range = match self.family {
                Family::Eq1 => "k >= 1 and 1 <= l <= 3",
                Family::Eq2 => "k >= 1 and l >= 1",
            };
            return Err(Error::InvalidParameters(format!("{self}: requires {range}")));
        }
        if self.k > 1000 || self.l > 1000 || self.s.unsigned_abs() > 1 << 24 {
            return Err(Error::InvalidParameters(format!("{self}: parameters too large")));
        }
        Ok(())
    }

    pub fn sides(&self) -> Sides {
        let (k, l, s) = (self.k, self.l, self.s);
        let kind = if self.dual { Kind::Dual } else { Kind::T };
        let lab = |k, l, s| ModuleLabel { kind, k, l, s };
        let keep = |v: Vec<ModuleLabel>| v.into_iter().filter(|x| !x.is_trivial()).collect();
        match self.family {
            Family::Eq1 => Sides {
                lhs: keep(vec![lab(k, l, s), lab(k, 0, s + 6)]),
                rhs1: keep(vec![lab(k + 1, 0, s), lab(k - 1, l, s + 6)]),
                rhs2: keep(vec![lab(0, 3 * k + l, s)]),
            },
            Family::Eq2 => Sides {
                lhs: keep(vec![lab(k, l + 3, s), lab(k, l, s + 6)]),
                rhs1: keep(vec![lab(k + 1, l, s), lab(k - 1, l + 3, s + 6)]),
                rhs2: keep(vec![lab(0, l, s + 6 * k as i32 + 6), lab(0, 3 * k + l + 3, s)]),
            },
        }
    }

    /// `M`: the product of the highest monomials on the left.
    pub fn head(&self) -> Monomial {
        self.sides().lhs.iter().fold(Monomial::one(), |acc, l| acc * l.highest_monomial())
    }

    /// Centre of the `i`-th `A₁⁻¹` in `M_r = M Π_{i<r} A_{1, s+6k-6i-3}⁻¹`.
    fn lowering_center(&self, i: u32) -> i32 {
        self.s + 6 * self.k as i32 - 6 * i as i32 - 3
    }

    /// `M_0 = M, M_1, ..., M_k`.
    pub fn closed_form_dominants(&self) -> Vec<Monomial> {
        let mut out = vec![self.head()];
        for i in 0..self.k {
            let next = out.last().expect("nonempty") * &a_inverse(Node::One, self.lowering_center(i));
            out.push(next);
        }
        out
    }
}

impl fmt::Display for EquationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::Eq1 => "Eq1",
            Family::Eq2 => "Eq2",
        };
        let dual = if self.dual { " dual" } else { "" };
        write!(f, "{fam}{dual}(k={}, l={}, s={})", self.k, self.l, self.s)
    }
}

/// q-characters of all factors of an equation.
pub struct EquationData {
    pub eq: EquationInstance,
    pub sides: Sides,
    pub lhs: Vec<Arc<QPolynomial>>,
    pub rhs1: Vec<Arc<QPolynomial>>,
    pub rhs2: Vec<Arc<QPolynomial>>,
}

impl EquationData {
    pub fn compute(eq: EquationInstance, cache: &QCharCache) -> Result<EquationData> {
        eq.validate()?;
        let sides = eq.sides();
        let chars = |labels: &[ModuleLabel]| labels.iter().map(|l| label_character(*l, cache)).collect::<Result<Vec<_>>>();
        Ok(EquationData { eq, lhs: chars(&sides.lhs)?, rhs1: chars(&sides.rhs1)?, rhs2: chars(&sides.rhs2)?, sides })
    }

    fn product(factors: &[Arc<QPolynomial>]) -> Vec<&QPolynomial> {
        factors.iter().map(|p| p.as_ref()).collect()
    }

    /// Exact check of the identity in `ℤP`.
    pub fn check(&self) -> Result<IdentityCheck> {
        self.check_within(None)
    }

    /// Exact check restricted to the weights that fit a budget of term pairs.
    pub fn check_within(&self, budget: Option<f64>) -> Result<IdentityCheck> {
        check_identity_within(
            &[Self::product(&self.lhs)],
            &[Self::product(&self.rhs1), Self::product(&self.rhs2)],
            budget,
        )
    }

    /// Term counts of the individual factors, labelled.
    pub fn factor_terms(&self) -> Vec<(ModuleLabel, usize)> {
        let labels = self.sides.lhs.iter().chain(&self.sides.rhs1).chain(&self.sides.rhs2);
        let chars = self.lhs.iter().chain(&self.rhs1).chain(&self.rhs2);
        labels.copied().zip(chars.map(|c| c.len())).collect()
    }
}

fn coefficient_in_product(factors: &[Arc<QPolynomial>], m: &Monomial) -> Int {
    match factors {
        [] => Int::from(m.is_one() as i64),
        [only] => only.coefficient(m),
        [first, rest @ ..] => {
            let mut total = Int::ZERO;
            for (a, c) in first.iter() {
                let rest_coef = coefficient_in_product(rest, &(m / a));
                if !rest_coef.is_zero() {
                    total += &(c * &rest_coef);
                }
            }
            total
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorTerms {
    pub label: ModuleLabel,
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationReport {
    pub equation: EquationInstance,
    pub pass: bool,
    pub lhs_terms: u64,
    pub rhs_terms: u64,
    /// Weights compared; a budgeted run leaves some out, and `pass` and the
    /// term counts then cover only the weights checked.
    pub weights_checked: usize,
    pub weights_skipped: usize,
    pub factors: Vec<FactorTerms>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<Mismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominant: Option<DominantReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Witness>>,
}

/// Verifies the equation exactly; for primal instances the dominant
/// classification and witnesses come from the same pass.
pub fn verify_equation(eq: EquationInstance, cache: &QCharCache) -> Result<EquationReport> {
    verify_equation_within(eq, cache, None)
}

/// [`verify_equation`] with a work budget for instances whose products are
/// too large to expand completely; dominant monomials and witnesses are
/// only reported for complete runs.
pub fn verify_equation_within(eq: EquationInstance, cache: &QCharCache, budget: Option<f64>) -> Result<EquationReport> {
    let data = EquationData::compute(eq, cache)?;
    let check = data.check_within(budget)?;
    let (dominant, witnesses) = if eq.dual || check.weights_skipped > 0 {
        (None, None)
    } else {
        (Some(classify_from(&data, &check)), Some(witnesses_from(&data)?))
    };
    Ok(EquationReport {
        equation: eq,
        pass: check.holds,
        lhs_terms: check.lhs_terms,
        rhs_terms: check.rhs_terms,
        weights_checked: check.weights_checked,
        weights_skipped: check.weights_skipped,
        factors: data.factor_terms().into_iter().map(|(label, terms)| FactorTerms { label, terms }).collect(),
        mismatch: check.mismatch,
        dominant,
        witnesses,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominantTerm {
    pub monomial: Monomial,
    pub coefficient: String,
}

fn dominant_terms(v: &[(Monomial, Int)]) -> Vec<DominantTerm> {
    v.iter().map(|(m, c)| DominantTerm { monomial: m.clone(), coefficient: c.to_string() }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominantReport {
    /// Dominant terms of the left product, the first right product and the
    /// second right summand.
    pub lhs: Vec<DominantTerm>,
    pub rhs1: Vec<DominantTerm>,
    pub rhs2: Vec<DominantTerm>,
    /// `M, M_1, ..., M_k`.
    pub closed_form: Vec<Monomial>,
    pub matches: bool,
    /// Whether the `Eq1` formula with exponent `-2l-6i-2` (no `s`) gives the
    /// same monomials; it only does at the normalized shift. Always true
    /// for `Eq2`.
    pub shift_free_form_agrees: bool,
    /// Whether every monomial of the shift-free form is dominant.
    pub shift_free_form_dominant: bool,
}

/// Dominant monomials of the three summands against the closed forms
/// `{M, M_1..M_k}`, `{M, M_1..M_{k-1}}`, `{M_k}` with coefficients 1.
pub fn classify_dominant(eq: EquationInstance, cache: &QCharCache) -> Result<DominantReport> {
    if eq.dual {
        return Err(Error::InvalidParameters("dominant classification is stated for the M-system, not its dual".into()));
    }
    let data = EquationData::compute(eq, cache)?;
    let check = data.check()?;
    Ok(classify_from(&data, &check))
}

fn classify_from(data: &EquationData, check: &IdentityCheck) -> DominantReport {
    let eq = data.eq;
    let closed = eq.closed_form_dominants();
    let k = eq.k as usize;
    let ones = |ms: &[Monomial]| -> Vec<(Monomial, Int)> {
        let mut v: Vec<_> = ms.iter().map(|m| (m.clone(), Int::ONE)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    };
    let (lhs, rhs1, rhs2) = (&check.dominant[0], &check.dominant[1], &check.dominant[2]);
    let matches = *lhs == ones(&closed) && *rhs1 == ones(&closed[..k]) && *rhs2 == ones(&closed[k..]);

    let shift_free: Vec<Monomial> = match eq.family {
        Family::Eq1 => {
            let mut out = vec![eq.head()];
            for i in 0..eq.k as i32 {
                let next = out.last().expect("nonempty") * &a_inverse(Node::One, -2 * eq.l as i32 - 6 * i - 2);
                out.push(next);
            }
            out
        }
        Family::Eq2 => closed.clone(),
    };
    DominantReport {
        lhs: dominant_terms(lhs),
        rhs1: dominant_terms(rhs1),
        rhs2: dominant_terms(rhs2),
        shift_free_form_agrees: shift_free == closed,
        shift_free_form_dominant: shift_free.iter().all(|m| m.is_dominant()),
        closed_form: closed,
        matches,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub r: u32,
    /// `n_r = M_r A_{1, s+6k-6r+3}⁻¹`.
    pub monomial: Monomial,
    /// Coefficient of `n_r` in the first right product.
    pub rhs1_coefficient: String,
    /// Coefficient of `n_r` in the left product.
    pub lhs_coefficient: String,
    /// The node-1 part of `M_r` is dominant and its string character
    /// contains the lowering by `A_{1, s+6k-6r+3}⁻¹`.
    pub reachable: bool,
    pub pass: bool,
}

/// Witnesses `n_r`, `1 ≤ r ≤ k-1`, that the first right summand has no
/// composition factor `L(M_r)`: `n_r` lies in `χ_q(M_r)` but not in the
/// product.
pub fn irreducibility_witnesses(eq: EquationInstance, cache: &QCharCache) -> Result<Vec<Witness>> {
    if eq.dual {
        return Err(Error::InvalidParameters("witnesses are stated for the M-system, not its dual".into()));
    }
    witnesses_from(&EquationData::compute(eq, cache)?)
}

fn witnesses_from(data: &EquationData) -> Result<Vec<Witness>> {
    let eq = data.eq;
    let closed = eq.closed_form_dominants();
    let sl = Sl2::for_node(Node::One);
    let mut out = Vec::new();
    for r in 1..eq.k {
        let center = eq.s + 6 * eq.k as i32 - 6 * r as i32 + 3;
        let m_r = &closed[r as usize];
        let n_r = m_r * &a_inverse(Node::One, center);
        let part = Sl2Monomial::from_pairs(m_r.node_part(Node::One))?;
        let reachable = part.is_dominant() && sl.lowerings(&part)?.iter().any(|(c, _)| c.as_slice() == [center]);
        let rhs1 = coefficient_in_product(&data.rhs1, &n_r);
        let lhs = coefficient_in_product(&data.lhs, &n_r);
        out.push(Witness {
            r,
            pass: reachable && rhs1.is_zero() && lhs.is_zero(),
            monomial: n_r,
            rhs1_coefficient: rhs1.to_string(),
            lhs_coefficient: lhs.to_string(),
            reachable,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MSystemReport {
    pub equation: EquationInstance,
    pub pass: bool,
    pub lhs_dimension: String,
    pub rhs_dimension: String,
    pub lhs_weights: usize,
    /// For dual instances: the restricted identity coincides with the primal one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_primal: Option<bool>,
}

fn restricted_sides(data: &EquationData) -> (WeightPolynomial, WeightPolynomial) {
    let prod = |fs: &[Arc<QPolynomial>]| fs.iter().fold(WeightPolynomial::one(), |acc, p| &acc * &p.restrict_to_uqg());
    let lhs = prod(&data.lhs);
    let rhs = &prod(&data.rhs1) + &prod(&data.rhs2);
    (lhs, rhs)
}

/// The equation restricted to `U_q g`: an identity of ordinary characters.
pub fn verify_m_system(eq: EquationInstance, cache: &QCharCache) -> Result<MSystemReport> {
    let data = EquationData::compute(eq, cache)?;
    let (lhs, rhs) = restricted_sides(&data);
    let matches_primal = if eq.dual {
        let primal = EquationData::compute(EquationInstance { dual: false, ..eq }, cache)?;
        Some(restricted_sides(&primal) == (lhs.clone(), rhs.clone()))
    } else {
        None
    };
    Ok(MSystemReport {
        equation: eq,
        pass: lhs == rhs && matches_primal != Some(false),
        lhs_dimension: lhs.dimension().to_string(),
        rhs_dimension: rhs.dimension().to_string(),
        lhs_weights: lhs.len(),
        matches_primal,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurveyReport {
    pub equation: EquationInstance,
    pub factors: Vec<FactorTerms>,
    /// The identity restricted to `U_q g` holds.
    pub restricted_pass: bool,
    pub lhs_dimension: String,
    pub rhs_dimension: String,
}

/// For instances whose products cannot be expanded: computes the factors
/// one at a time, keeping only their term counts and their restrictions to
/// `U_q g`, and checks the restricted identity.
pub fn survey_equation(eq: EquationInstance, caps: Caps) -> Result<SurveyReport> {
    eq.validate()?;
    let sides = eq.sides();
    let mut factors = Vec::new();
    let mut restrict = |labels: &[ModuleLabel]| -> Result<WeightPolynomial> {
        let mut acc = WeightPolynomial::one();
        for &label in labels {
            let chi = label_character(label, &QCharCache::new(caps))?;
            factors.push(FactorTerms { label, terms: chi.len() });
            acc = &acc * &chi.restrict_to_uqg();
        }
        Ok(acc)
    };
    let lhs = restrict(&sides.lhs)?;
    let rhs = &restrict(&sides.rhs1)? + &restrict(&sides.rhs2)?;
    Ok(SurveyReport {
        equation: eq,
        factors,
        restricted_pass: lhs == rhs,
        lhs_dimension: lhs.dimension().to_string(),
        rhs_dimension: rhs.dimension().to_string(),
    })
}

/// Restriction of a labelled module to `U_q g`.
pub fn restrict_label(label: ModuleLabel, cache: &QCharCache) -> Result<WeightPolynomial> {
    Ok(label_character(label, cache)?.restrict_to_uqg())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    #[test]
    fn highest_monomials() {
        assert_eq!(ModuleLabel::t(1, 1, -7).highest_monomial(), m("1_{-7} 2_0"));
        assert_eq!(ModuleLabel::t(0, 4, -7).highest_monomial(), m("2_{-6} 2_{-4} 2_{-2} 2_0"));
        assert_eq!(ModuleLabel::dual(1, 1, 0).highest_monomial(), m("2_{-7} 1_0"));
        assert!(ModuleLabel::t(0, 0, 5).highest_monomial().is_one());
    }

    #[test]
    fn label_syntax() {
        let l: ModuleLabel = "T:2,1,-13".parse().unwrap();
        assert_eq!(l, ModuleLabel::t(2, 1, -13));
        assert_eq!(l.to_string(), "T:2,1,-13");
        assert_eq!("Td:1,0,3".parse::<ModuleLabel>().unwrap(), ModuleLabel::dual(1, 0, 3));
        for bad in ["T:1,2", "X:1,1,1", "T:-1,1,0", "T:1,1,x", "T1,1,1"] {
            assert!(bad.parse::<ModuleLabel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sides_match_the_worked_examples() {
        let eq = EquationInstance::normalized(Family::Eq1, 1, 1, false).unwrap();
        assert_eq!(eq.s, -7);
        let s = eq.sides();
        let heads = |v: &[ModuleLabel]| v.iter().map(|l| l.highest_monomial().to_string()).collect::<Vec<_>>();
        assert_eq!(heads(&s.lhs), ["1_{-7} 2_0", "1_{-1}"]);
        assert_eq!(heads(&s.rhs1), ["1_{-7} 1_{-1}", "2_0"]);
        assert_eq!(heads(&s.rhs2), ["2_{-6} 2_{-4} 2_{-2} 2_0"]);
        let eq = EquationInstance::normalized(Family::Eq2, 1, 1, false).unwrap();
        assert_eq!(eq.s, -13);
        let s = eq.sides();
        assert_eq!(heads(&s.lhs), ["1_{-13} 2_{-6} 2_{-4} 2_{-2} 2_0", "1_{-7} 2_0"]);
        assert_eq!(heads(&s.rhs1), ["1_{-13} 1_{-7} 2_0", "2_{-6} 2_{-4} 2_{-2} 2_0"]);
        assert_eq!(heads(&s.rhs2)[0], "2_0");
        // dual line with the same parameters
        let d = EquationInstance::normalized(Family::Eq1, 1, 1, true).unwrap().sides();
        assert_eq!(heads(&d.lhs), ["1_7 2_0", "1_1"]);
        assert_eq!(heads(&d.rhs2), ["2_0 2_2 2_4 2_6"]);
        assert!(EquationInstance::new(Family::Eq1, 1, 4, 0, false).is_err());
        assert!(EquationInstance::new(Family::Eq2, 0, 1, 0, false).is_err());
    }

    #[test]
    fn first_example_identity() {
        let cache = QCharCache::new(Caps::default());
        let eq = EquationInstance::new(Family::Eq1, 1, 1, -7, false).unwrap();
        let report = verify_equation(eq, &cache).unwrap();
        assert!(report.pass, "{report:?}");
        let dom = report.dominant.unwrap();
        assert!(dom.matches && dom.shift_free_form_agrees);
        assert_eq!(dom.closed_form[1], m("2_{-6} 2_{-4} 2_{-2} 2_0"));
        assert!(report.witnesses.unwrap().is_empty());
    }

    #[test]
    fn exact_division_recovers_the_mixed_module() {
        let cache = QCharCache::new(Caps::default());
        let chi = |l| label_character(l, &cache).unwrap();
        let num = &(&*chi(ModuleLabel::t(2, 0, -7)) * &*chi(ModuleLabel::t(0, 1, -1))) + &*chi(ModuleLabel::t(0, 4, -7));
        let q = num.exact_div(&chi(ModuleLabel::t(1, 0, -1))).unwrap().unwrap();
        assert_eq!(q, *chi(ModuleLabel::t(1, 1, -7)));
    }

    #[test]
    fn dual_characters_are_iota_images_and_fm_agrees() {
        let cache = QCharCache::new(Caps::default());
        let label = ModuleLabel::dual(1, 1, 0);
        let via_iota = label_character(label, &cache).unwrap();
        let direct = crate::fm::fm_qcharacter(&label.highest_monomial(), Caps::default()).unwrap();
        assert_eq!(*via_iota, direct);
    }

    #[test]
    fn shift_free_form_only_agrees_at_the_normalized_shift() {
        let cache = QCharCache::new(Caps::default());
        let eq = EquationInstance::new(Family::Eq1, 2, 1, 0, false).unwrap();
        let dom = classify_dominant(eq, &cache).unwrap();
        assert!(dom.matches);
        assert_eq!(dom.lhs.len(), 3);
        assert!(!dom.shift_free_form_agrees);
        assert!(!dom.shift_free_form_dominant);
    }

    #[test]
    fn witness_for_second_family() {
        let cache = QCharCache::new(Caps::default());
        let eq = EquationInstance::new(Family::Eq2, 2, 1, 0, false).unwrap();
        let w = irreducibility_witnesses(eq, &cache).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].pass, "{w:?}");
    }

    #[test]
    fn survey_matches_the_full_restriction() {
        let eq = EquationInstance::new(Family::Eq2, 1, 2, 0, false).unwrap();
        let survey = survey_equation(eq, Caps::default()).unwrap();
        let full = verify_m_system(eq, &QCharCache::new(Caps::default())).unwrap();
        assert!(survey.restricted_pass);
        assert_eq!(survey.lhs_dimension, full.lhs_dimension);
        assert_eq!(survey.factors.len(), 6);
    }

    #[test]
    fn m_system_restriction() {
        let cache = QCharCache::new(Caps::default());
        let eq = EquationInstance::new(Family::Eq1, 1, 1, -7, false).unwrap();
        let r = verify_m_system(eq, &cache).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs_dimension, r.rhs_dimension);
        let d = verify_m_system(EquationInstance { dual: true, ..eq }, &cache).unwrap();
        assert_eq!(d.matches_primal, Some(true));
        assert_eq!(d.lhs_dimension, r.lhs_dimension);
        assert_eq!(restrict_label(ModuleLabel::t(0, 0, 3), &cache).unwrap(), WeightPolynomial::one());
        assert_eq!(restrict_label(ModuleLabel::t(0, 1, -1), &cache).unwrap().dimension(), Int::from(7));
        assert_eq!(restrict_label(ModuleLabel::t(1, 0, 0), &cache).unwrap().dimension(), Int::from(15));
    }
}
