//! The Frenkel–Mukhin algorithm for special modules, with a post hoc
//! consistency check and a shift-invariant memo cache.

use std::hash::BuildHasherDefault;
use std::sync::{Arc, RwLock};

use rustc_hash::{FxHashMap, FxHasher};
use serde::Serialize;

use crate::coeff::Int;
use crate::error::{Error, Result};
use crate::monomial::{a_inverse, Monomial, Node};
use crate::sl2::{Sl2, Sl2Monomial};
use crate::zp_ring::QPolynomial;

/// Resource limits for one FM run. Exceeding either is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximal number of `A⁻¹` factors below the head.
    pub max_depth: usize,
    pub max_terms: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_depth: 200, max_terms: 5_000_000 }
    }
}

type FxIndexSet<T> = indexmap::IndexSet<T, BuildHasherDefault<FxHasher>>;

struct FmState {
    monos: FxIndexSet<Monomial>,
    /// Multiplicity already accounted for by node-`i` strings, per node.
    received: Vec<[Int; 2]>,
    coef: Vec<Int>,
    by_depth: Vec<Vec<u32>>,
    caps: Caps,
}

impl FmState {
    fn new(head: Monomial, caps: Caps) -> FmState {
        let mut st = FmState {
            monos: FxIndexSet::default(),
            received: Vec::new(),
            coef: Vec::new(),
            by_depth: Vec::new(),
            caps,
        };
        st.intern(head, 0).expect("head fits");
        st
    }

    fn intern(&mut self, m: Monomial, depth: usize) -> Result<u32> {
        if let Some(id) = self.monos.get_index_of(&m) {
            return Ok(id as u32);
        }
        if depth > self.caps.max_depth {
            return Err(Error::CapExceeded(format!("depth {depth} > {}", self.caps.max_depth)));
        }
        if self.monos.len() >= self.caps.max_terms {
            return Err(Error::CapExceeded(format!("more than {} terms", self.caps.max_terms)));
        }
        let id = self.monos.len() as u32;
        self.monos.insert(m);
        self.received.push([Int::ZERO, Int::ZERO]);
        self.coef.push(Int::ZERO);
        if self.by_depth.len() <= depth {
            self.by_depth.resize_with(depth + 1, Vec::new);
        }
        self.by_depth[depth].push(id);
        Ok(id)
    }

    fn run(&mut self) -> Result<()> {
        let mut depth = 0;
        while depth < self.by_depth.len() {
            let ids = std::mem::take(&mut self.by_depth[depth]);
            for &id in &ids {
                self.treat(id, depth)?;
            }
            self.by_depth[depth] = ids;
            depth += 1;
        }
        Ok(())
    }

    fn treat(&mut self, id: u32, depth: usize) -> Result<()> {
        let m = self.monos[id as usize].clone();
        let c = if id == 0 {
            Int::ONE
        } else {
            let [a, b] = &self.received[id as usize];
            a.max(b).clone()
        };
        if id != 0 && m.is_dominant() {
            return Err(Error::NotSpecial { head: self.monos[0].to_string(), found: m.to_string() });
        }
        self.coef[id as usize] = c.clone();
        for node in Node::ALL {
            let got = self.received[id as usize][node.index()].clone();
            if !m.is_node_dominant(node) {
                if got != c {
                    return Err(Error::Inconsistent(format!(
                        "{m} is not {node}-dominant but only {got} of its multiplicity {c} lies in {node}-strings"
                    )));
                }
                continue;
            }
            let fresh = &c - &got;
            if fresh.is_negative() {
                return Err(Error::Inconsistent(format!("{m} received {got} from node {node} but has multiplicity {c}")));
            }
            if fresh.is_zero() {
                continue;
            }
            let part = Sl2Monomial::from_pairs(m.node_part(node))?;
            for (centers, mult) in Sl2::for_node(node).lowerings(&part)?.iter() {
                let add = &fresh * mult;
                let target = if centers.is_empty() {
                    id
                } else {
                    let mut t = m.clone();
                    for &b in centers {
                        t = t.checked_mul(&a_inverse(node, b)).ok_or(Error::Overflow)?;
                    }
                    self.intern(t, depth + centers.len())?
                };
                self.received[target as usize][node.index()] += &add;
            }
        }
        Ok(())
    }

    fn into_polynomial(self) -> QPolynomial {
        QPolynomial::from_terms(self.monos.into_iter().zip(self.coef))
    }
}

/// q-character of the simple module with dominant highest monomial `head`,
/// assuming the module is special. Non-special input is detected and
/// rejected, and every result passes the per-node string decomposition check.
pub fn fm_qcharacter(head: &Monomial, caps: Caps) -> Result<QPolynomial> {
    if !head.is_dominant() {
        return Err(Error::NotDominant(head.to_string()));
    }
    let mut st = FmState::new(head.clone(), caps);
    st.run()?;
    let p = st.into_polynomial();
    for node in Node::ALL {
        if Sl2::for_node(node).peel_characters(&p.beta(node)).is_none() {
            return Err(Error::Inconsistent(format!("node {node} restriction is not a sum of string characters")));
        }
    }
    Ok(p)
}

/// Consistency report for a candidate q-character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub head: Option<Monomial>,
    pub dominant: Vec<(Monomial, String)>,
    pub special: bool,
    /// Per node: the node restriction is a nonnegative sum of string characters.
    pub peel: [bool; 2],
    /// Every monomial lies below the head.
    pub cone: bool,
    /// Every non-head monomial is right-negative.
    pub right_negative: bool,
    pub positive_coefficients: bool,
}

impl Validation {
    pub fn passed(&self) -> bool {
        self.special && self.peel.iter().all(|&b| b) && self.cone && self.positive_coefficients
    }
}

pub fn validate_character(p: &QPolynomial) -> Validation {
    let dominant = p.dominant_terms();
    let special = dominant.len() == 1 && dominant[0].1 == Int::ONE;
    let head = if special { Some(dominant[0].0.clone()) } else { p.leading_term().map(|(m, _)| m.clone()) };
    let peel = Node::ALL.map(|n| Sl2::for_node(n).peel_characters(&p.beta(n)).is_some());
    let (cone, right_negative) = match &head {
        Some(h) => (
            p.monomials().all(|m| m.leq(h)),
            p.monomials().filter(|m| *m != h).all(|m| m.is_right_negative().unwrap_or(false)),
        ),
        None => (true, true),
    };
    Validation {
        head,
        dominant: dominant.into_iter().map(|(m, c)| (m, c.to_string())).collect(),
        special,
        peel,
        cone,
        right_negative,
        positive_coefficients: p.iter().all(|(_, c)| c.is_positive()),
    }
}

/// Memoized FM results keyed by the head translated to minimal shift 0.
/// Readers share the table; the first finished computation of a key wins.
#[derive(Debug, Default)]
pub struct QCharCache {
    caps: Caps,
    table: RwLock<FxHashMap<Monomial, Arc<QPolynomial>>>,
}

impl QCharCache {
    pub fn new(caps: Caps) -> QCharCache {
        QCharCache { caps, table: RwLock::default() }
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn get(&self, head: &Monomial) -> Result<Arc<QPolynomial>> {
        let offset = head.shift_range().map_or(0, |(lo, _)| lo);
        let key = head.shift(-offset);
        let hit = self.table.read().expect("cache lock").get(&key).cloned();
        let base = match hit {
            Some(p) => p,
            None => {
                let p = Arc::new(fm_qcharacter(&key, self.caps)?);
                self.table.write().expect("cache lock").entry(key).or_insert(p).clone()
            }
        };
        Ok(if offset == 0 { base } else { Arc::new(base.apply_shift(offset)) })
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
