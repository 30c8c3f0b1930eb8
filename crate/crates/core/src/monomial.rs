//! Laurent monomials in the variables `Y_{i,aq^s}`, written `i_s`.
//!
//! The spectral parameter `a` is fixed once and for all, so a variable is a
//! pair (node, integer shift). A [`Monomial`] is stored as a list of
//! `(node, shift, exponent)` factors sorted by `(node, shift)` with no zero
//! exponents, which makes structural equality and hashing canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A node of the G2 Dynkin diagram. Node 1 is the long simple root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Node {
    One,
    Two,
}

impl Node {
    pub const ALL: [Node; 2] = [Node::One, Node::Two];

    pub fn index(self) -> usize {
        match self {
            Node::One => 0,
            Node::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    /// Symmetrizing integer `r_i`; `q_i = q^{r_i}`.
    pub fn r(self) -> i32 {
        CARTAN.r[self.index()]
    }
}

impl TryFrom<u8> for Node {
    type Error = Error;
    fn try_from(v: u8) -> Result<Node> {
        Node::try_from(v as i64)
    }
}

impl TryFrom<i64> for Node {
    type Error = Error;
    fn try_from(v: i64) -> Result<Node> {
        match v {
            1 => Ok(Node::One),
            2 => Ok(Node::Two),
            other => Err(Error::UnknownNode(other)),
        }
    }
}

impl From<Node> for u8 {
    fn from(n: Node) -> u8 {
        n.number()
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Cartan data of G2 with `(α₁, α₁) = 6`, `(α₁, α₂) = -3`, `(α₂, α₂) = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CartanData {
    pub c: [[i32; 2]; 2],
    pub r: [i32; 2],
}

pub const CARTAN: CartanData = CartanData { c: [[2, -1], [-3, 2]], r: [3, 1] };

impl CartanData {
    /// `B = diag(r) · C`.
    pub fn symmetrized(&self) -> [[i32; 2]; 2] {
        let mut b = [[0; 2]; 2];
        for (i, row) in b.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.r[i] * self.c[i][j];
            }
        }
        b
    }
}

/// Height of a fundamental weight, `⟨ω_i, ρ^∨⟩`: `ω₁ = 2α₁ + 3α₂`, `ω₂ = α₁ + 2α₂`.
const FUNDAMENTAL_HEIGHT: [i64; 2] = [5, 3];

/// Shift used by the duality involution `i_s ↦ i_{12-s}^{-1}`.
pub const IOTA_OFFSET: i32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub node: Node,
    pub shift: i32,
    pub exp: i32,
}

type Factors = SmallVec<[Factor; 6]>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    factors: Factors,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    /// The variable `Y_{node, aq^shift}`.
    pub fn var(node: Node, shift: i32) -> Monomial {
        Monomial::var_pow(node, shift, 1)
    }

    pub fn var_pow(node: Node, shift: i32, exp: i32) -> Monomial {
        let mut factors = Factors::new();
        if exp != 0 {
            factors.push(Factor { node, shift, exp });
        }
        Monomial { factors }
    }

    /// Builds a monomial from arbitrary `(node, shift, exp)` triples, summing repeats.
    pub fn from_triples<I>(triples: I) -> Result<Monomial>
    where
        I: IntoIterator<Item = (Node, i32, i32)>,
    {
        let mut raw: SmallVec<[(Node, i32, i64); 8]> = triples.into_iter().map(|(n, s, e)| (n, s, e as i64)).collect();
        raw.sort_unstable_by_key(|t| (t.0, t.1));
        let mut factors = Factors::with_capacity(raw.len());
        let mut i = 0;
        while i < raw.len() {
            let (node, shift, mut exp) = raw[i];
            i += 1;
            while i < raw.len() && (raw[i].0, raw[i].1) == (node, shift) {
                exp += raw[i].2;
                i += 1;
            }
            if exp != 0 {
                let exp = i32::try_from(exp).map_err(|_| Error::Overflow)?;
                factors.push(Factor { node, shift, exp });
            }
        }
        Ok(Monomial { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, node: Node, shift: i32) -> i32 {
        self.factors
            .binary_search_by(|f| (f.node, f.shift).cmp(&(node, shift)))
            .map(|i| self.factors[i].exp)
            .unwrap_or(0)
    }

    /// Exponents of the node-`node` variables as `(shift, exp)` pairs in shift order.
    pub fn node_part(&self, node: Node) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.factors.iter().filter(move |f| f.node == node).map(|f| (f.shift, f.exp))
    }

    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Factors::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match (a[i].node, a[i].shift).cmp(&(b[j].node, b[j].shift)) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let exp = a[i].exp.checked_add(b[j].exp)?;
                    if exp != 0 {
                        out.push(Factor { exp, ..a[i] });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        if out.spilled() {
            // characters hold millions of these; drop the slack
            out.shrink_to_fit();
        }
        Some(Monomial { factors: out })
    }

    pub fn checked_pow(&self, e: i32) -> Option<Monomial> {
        if e == 0 {
            return Some(Monomial::one());
        }
        let mut factors = Factors::with_capacity(self.factors.len());
        for f in &self.factors {
            factors.push(Factor { exp: f.exp.checked_mul(e)?, ..*f });
        }
        Some(Monomial { factors })
    }

    pub fn inverse(&self) -> Monomial {
        self.checked_pow(-1).expect("exponent overflow")
    }

    pub fn pow(&self, e: i32) -> Monomial {
        self.checked_pow(e).expect("exponent overflow")
    }

    pub fn is_dominant(&self) -> bool {
        self.factors.iter().all(|f| f.exp > 0)
    }

    pub fn is_antidominant(&self) -> bool {
        self.factors.iter().all(|f| f.exp < 0)
    }

    pub fn is_node_dominant(&self, node: Node) -> bool {
        self.factors.iter().all(|f| f.node != node || f.exp > 0)
    }

    /// True iff every nonzero exponent at the largest occupied shift is negative.
    pub fn is_right_negative(&self) -> Result<bool> {
        let max_shift = self
            .factors
            .iter()
            .map(|f| f.shift)
            .max()
            .ok_or(Error::RightNegativityOfIdentity)?;
        Ok(self.factors.iter().filter(|f| f.shift == max_shift).all(|f| f.exp < 0))
    }

    /// Weight in fundamental-weight coordinates.
    pub fn weight(&self) -> (i64, i64) {
        let mut w = [0i64; 2];
        for f in &self.factors {
            w[f.node.index()] += f.exp as i64;
        }
        (w[0], w[1])
    }

    /// Pairing of the weight with `ρ^∨`. Every `A_{i,s}` has height 1, so
    /// `m ≤ m'` implies `height(m) ≤ height(m')` with the difference counting
    /// the `A`-factors.
    pub fn height(&self) -> i64 {
        self.factors.iter().map(|f| FUNDAMENTAL_HEIGHT[f.node.index()] * f.exp as i64).sum()
    }

    /// The spectral shift `τ`: every `i_s` becomes `i_{s+d}`.
    pub fn shift(&self, d: i32) -> Monomial {
        let factors = self
            .factors
            .iter()
            .map(|f| Factor { shift: f.shift.checked_add(d).expect("shift overflow"), ..*f })
            .collect();
        Monomial { factors }
    }

    /// The involution `ι`: `i_s ↦ i_{12-s}^{-1}`.
    pub fn iota(&self) -> Monomial {
        let mut factors: Factors = self
            .factors
            .iter()
            .map(|f| Factor {
                node: f.node,
                shift: IOTA_OFFSET.checked_sub(f.shift).expect("shift overflow"),
                exp: f.exp.checked_neg().expect("exponent overflow"),
            })
            .collect();
        factors.sort_unstable();
        Monomial { factors }
    }

    /// Smallest and largest occupied shift.
    pub fn shift_range(&self) -> Option<(i32, i32)> {
        let lo = self.factors.iter().map(|f| f.shift).min()?;
        let hi = self.factors.iter().map(|f| f.shift).max()?;
        Some((lo, hi))
    }

    /// Group order used for leading terms: height first, then the
    /// lexicographic order on exponent vectors indexed by `(node, shift)`.
    /// Both parts are compatible with multiplication.
    pub fn term_order(&self, other: &Monomial) -> Ordering {
        self.height().cmp(&other.height()).then_with(|| self.lex_exponent_cmp(other))
    }

    fn lex_exponent_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(x), None) => return x.exp.cmp(&0),
                (None, Some(y)) => return 0.cmp(&y.exp),
                (Some(x), Some(y)) => match (x.node, x.shift).cmp(&(y.node, y.shift)) {
                    Ordering::Less => return x.exp.cmp(&0),
                    Ordering::Greater => return 0.cmp(&y.exp),
                    Ordering::Equal => {
                        if x.exp != y.exp {
                            return x.exp.cmp(&y.exp);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }

    /// Solves `self = Π A_{i,s}^{c_{i,s}}` over the integers.
    ///
    /// The variables are eliminated from the left: the lowest variable of
    /// `A_{1,s}` is `1_{s-3}` and that of `A_{2,s}` is `2_{s-1}`, and no other
    /// `A`-monomial reaches further left, so each coefficient is forced.
    pub fn solve_over_a(&self) -> Option<BTreeMap<(Node, i32), i64>> {
        let (_, hi) = match self.shift_range() {
            None => return Some(BTreeMap::new()),
            Some(r) => r,
        };
        let mut rest: BTreeMap<(i64, Node), i64> =
            self.factors.iter().map(|f| ((f.shift as i64, f.node), f.exp as i64)).collect();
        let mut coeffs = BTreeMap::new();
        while let Some((&(shift, node), &c)) = rest.iter().next() {
            if shift > hi as i64 {
                return None;
            }
            let center = match node {
                Node::One => shift + 3,
                Node::Two => shift + 1,
            };
            for (n, s, e) in a_exponents(node, center) {
                let entry = rest.entry((s, n)).or_default();
                *entry -= c * e as i64;
                if *entry == 0 {
                    rest.remove(&(s, n));
                }
            }
            let center = i32::try_from(center).ok()?;
            coeffs.insert((node, center), c);
        }
        Some(coeffs)
    }

    /// `Some(c)` with `self = Π A^{c}` and every `c ≥ 0`, i.e. `self ∈ Q⁺`.
    pub fn factor_over_a(&self) -> Option<BTreeMap<(Node, i32), i64>> {
        self.solve_over_a().filter(|c| c.values().all(|&v| v >= 0))
    }

    /// `self ≤ other` iff `other · self⁻¹ ∈ Q⁺`.
    pub fn leq(&self, other: &Monomial) -> bool {
        (other / self).factor_over_a().is_some()
    }
}

/// `(node, shift, exp)` triples of `A_{node, center}`.
fn a_exponents(node: Node, center: i64) -> [(Node, i64, i32); 5] {
    match node {
        Node::One => [
            (Node::One, center - 3, 1),
            (Node::One, center + 3, 1),
            (Node::Two, center - 2, -1),
            (Node::Two, center, -1),
            (Node::Two, center + 2, -1),
        ],
        // padded with a zero entry so both arms have the same shape
        Node::Two => [
            (Node::Two, center - 1, 1),
            (Node::Two, center + 1, 1),
            (Node::One, center, -1),
            (Node::One, center, 0),
            (Node::One, center, 0),
        ],
    }
}

/// The monomial `A_{i,s}`: `A_{1,s} = 1_{s-3} 1_{s+3} 2_{s-2}⁻¹ 2_s⁻¹ 2_{s+2}⁻¹`,
/// `A_{2,s} = 2_{s-1} 2_{s+1} 1_s⁻¹`.
pub fn a_monomial(node: Node, s: i32) -> Monomial {
    let triples = a_exponents(node, s as i64)
        .into_iter()
        .map(|(n, sh, e)| (n, i32::try_from(sh).expect("shift overflow"), e));
    Monomial::from_triples(triples).expect("A-monomial exponents are small")
}

/// `A_{i,s}^{-1}`.
pub fn a_inverse(node: Node, s: i32) -> Monomial {
    a_monomial(node, s).inverse()
}

impl Mul<&Monomial> for &Monomial {
    type Output = Monomial;
    fn mul(self, rhs: &Monomial) -> Monomial {
        self.checked_mul(rhs).expect("exponent overflow")
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        &self * &rhs
    }
}

impl Div<&Monomial> for &Monomial {
    type Output = Monomial;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Monomial) -> Monomial {
        self * &rhs.inverse()
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift < 0 {
            write!(f, "{}_{{{}}}", self.node, self.shift)?;
        } else {
            write!(f, "{}_{}", self.node, self.shift)?;
        }
        if self.exp != 1 {
            write!(f, "^{}", self.exp)?;
        }
        Ok(())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Monomial> {
        crate::text::parse_monomial(s)
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.factors.len()))?;
        for f in &self.factors {
            seq.serialize_element(&(f.node.number(), f.shift, f.exp))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(i64, i32, i32)> = Vec::deserialize(deserializer)?;
        if let Some(&(_, s, _)) = raw.iter().find(|(_, s, _)| s.unsigned_abs() > crate::MAX_SHIFT) {
            return Err(serde::de::Error::custom(format!("shift {s} out of range")));
        }
        let triples = raw
            .into_iter()
            .map(|(n, s, e)| Node::try_from(n).map(|n| (n, s, e)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Monomial::from_triples(triples).map_err(serde::de::Error::custom)
    }
}
