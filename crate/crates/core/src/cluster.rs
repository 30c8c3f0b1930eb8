//! Quivers, seeds and mutation; the truncated G2 initial seed and the column
//! mutation sequences that produce the minimal affinizations.
//!
//! Seeds carry a payload per vertex. In value mode the payload is a
//! q-character and every exchange relation is divided exactly in `ℤP`. In
//! symbolic mode the payload is a Laurent polynomial in the initial cluster
//! variables, where the initial variable at vertex `(i, s)` is written as the
//! monomial `i_s`; an exact division then certifies that the new variable is a
//! Laurent polynomial in the initial cluster.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fm::QCharCache;
use crate::identity::check_identity;
use crate::minaff::{label_character, EquationInstance, Family, ModuleLabel};
use crate::monomial::{Monomial, Node};
use crate::zp_ring::QPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "(Node, i32)", from = "(Node, i32)")]
pub struct Vertex {
    pub node: Node,
    pub shift: i32,
}

impl Vertex {
    pub fn new(node: Node, shift: i32) -> Vertex {
        Vertex { node, shift }
    }

    /// The initial cluster variable at this vertex, as a formal monomial.
    pub fn variable(&self) -> Monomial {
        Monomial::var(self.node, self.shift)
    }
}

impl From<Vertex> for (Node, i32) {
    fn from(v: Vertex) -> (Node, i32) {
        (v.node, v.shift)
    }
}

impl From<(Node, i32)> for Vertex {
    fn from((node, shift): (Node, i32)) -> Vertex {
        Vertex { node, shift }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.node.number(), self.shift)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: BTreeSet<Vertex>,
    arrows: BTreeMap<(Vertex, Vertex), u32>,
    frozen: BTreeSet<Vertex>,
}

impl Quiver {
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        arrows: impl IntoIterator<Item = (Vertex, Vertex, u32)>,
        frozen: impl IntoIterator<Item = Vertex>,
    ) -> Result<Quiver> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut map: BTreeMap<(Vertex, Vertex), u32> = BTreeMap::new();
        for (a, b, m) in arrows {
            if a == b {
                return Err(Error::InvalidQuiver(format!("loop at {a}")));
            }
            for v in [a, b] {
                if !vertices.contains(&v) {
                    return Err(Error::InvalidQuiver(format!("arrow endpoint {v} is not a vertex")));
                }
            }
            if m > 0 {
                let e = map.entry((a, b)).or_default();
                *e = e.checked_add(m).ok_or(Error::Overflow)?;
            }
        }
        if let Some(((a, b), _)) = map.iter().find(|((a, b), _)| map.contains_key(&(*b, *a))) {
            return Err(Error::InvalidQuiver(format!("2-cycle between {a} and {b}")));
        }
        let frozen: BTreeSet<Vertex> = frozen.into_iter().collect();
        if let Some(v) = frozen.iter().find(|v| !vertices.contains(v)) {
            return Err(Error::InvalidQuiver(format!("frozen vertex {v} is not a vertex")));
        }
        Ok(Quiver { vertices, arrows: map, frozen })
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn arrows(&self) -> impl Iterator<Item = (Vertex, Vertex, u32)> + '_ {
        self.arrows.iter().map(|(&(a, b), &m)| (a, b, m))
    }

    pub fn frozen(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.frozen.iter().copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn is_frozen(&self, v: Vertex) -> bool {
        self.frozen.contains(&v)
    }

    pub fn multiplicity(&self, a: Vertex, b: Vertex) -> u32 {
        self.arrows.get(&(a, b)).copied().unwrap_or(0)
    }

    /// Arrows `i → v` as `(i, multiplicity)`.
    pub fn incoming(&self, v: Vertex) -> Vec<(Vertex, u32)> {
        self.arrows.iter().filter(|((_, b), _)| *b == v).map(|(&(a, _), &m)| (a, m)).collect()
    }

    /// Arrows `v → j` as `(j, multiplicity)`.
    pub fn outgoing(&self, v: Vertex) -> Vec<(Vertex, u32)> {
        self.arrows.range((v, Vertex::new(Node::One, i32::MIN))..).take_while(|((a, _), _)| *a == v).map(|(&(_, b), &m)| (b, m)).collect()
    }

    /// Quiver mutation: composite arrows `i → j` for every path `i → v → j`,
    /// reversal of the arrows at `v`, then cancellation of 2-cycles.
    pub fn mutate(&self, v: Vertex) -> Result<Quiver> {
        self.check_mutable(v)?;
        let (inc, out) = (self.incoming(v), self.outgoing(v));
        let mut arrows = self.arrows.clone();
        for &(i, a) in &inc {
            for &(j, b) in &out {
                let add = a.checked_mul(b).ok_or(Error::Overflow)?;
                let e = arrows.entry((i, j)).or_default();
                *e = e.checked_add(add).ok_or(Error::Overflow)?;
            }
        }
        for &(i, a) in &inc {
            arrows.remove(&(i, v));
            arrows.insert((v, i), a);
        }
        for &(j, b) in &out {
            arrows.remove(&(v, j));
            arrows.insert((j, v), b);
        }
        let pairs: Vec<(Vertex, Vertex)> = arrows.keys().copied().filter(|(a, b)| a < b).collect();
        for (a, b) in pairs {
            if let (Some(&x), Some(&y)) = (arrows.get(&(a, b)), arrows.get(&(b, a))) {
                let m = x.min(y);
                for (key, left) in [((a, b), x - m), ((b, a), y - m)] {
                    if left == 0 {
                        arrows.remove(&key);
                    } else {
                        arrows.insert(key, left);
                    }
                }
            }
        }
        Ok(Quiver { vertices: self.vertices.clone(), arrows, frozen: self.frozen.clone() })
    }

    fn check_mutable(&self, v: Vertex) -> Result<()> {
        if !self.vertices.contains(&v) {
            return Err(Error::InvalidQuiver(format!("{v} is not a vertex")));
        }
        if self.frozen.contains(&v) {
            return Err(Error::FrozenVertex(v.to_string()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Value,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "symbolic" => Ok(Mode::Symbolic),
            "value" => Ok(Mode::Value),
            other => Err(Error::InvalidParameters(format!("unknown mode {other:?}"))),
        }
    }
}

/// Above this many term pairs in the numerator, value-mode mutation during a
/// column run certifies the division instead of expanding the products.
pub const MATERIALIZE_PAIRS: f64 = 2e6;

/// A quiver with a payload and an optional module label at every vertex.
/// Mutation returns a new seed; payloads are shared between seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct Seed {
    quiver: Quiver,
    mode: Mode,
    payload: BTreeMap<Vertex, Arc<QPolynomial>>,
    labels: BTreeMap<Vertex, ModuleLabel>,
}

/// The exchange relation `y'_v y_v = Π_{i→v} y_i + Π_{v→j} y_j` in terms of
/// module labels, each product listed with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub incoming: Vec<ModuleLabel>,
    pub outgoing: Vec<ModuleLabel>,
    pub denominator: ModuleLabel,
}

impl Seed {
    /// A seed whose payloads are the initial cluster variables themselves.
    pub fn symbolic(quiver: Quiver, labels: BTreeMap<Vertex, ModuleLabel>) -> Seed {
        let payload = quiver.vertices().map(|v| (v, Arc::new(QPolynomial::from_monomial(v.variable())))).collect();
        Seed { quiver, mode: Mode::Symbolic, payload, labels }
    }

    pub fn with_values(quiver: Quiver, values: BTreeMap<Vertex, Arc<QPolynomial>>, labels: BTreeMap<Vertex, ModuleLabel>) -> Result<Seed> {
        if let Some(v) = quiver.vertices().find(|v| !values.contains_key(v)) {
            return Err(Error::InvalidQuiver(format!("no value at {v}")));
        }
        Ok(Seed { quiver, mode: Mode::Value, payload: values, labels })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn payload(&self, v: Vertex) -> Option<&Arc<QPolynomial>> {
        self.payload.get(&v)
    }

    pub fn label(&self, v: Vertex) -> Option<ModuleLabel> {
        self.labels.get(&v).copied()
    }

    /// The exchange relation at `v`, if every vertex involved is labelled.
    pub fn relation(&self, v: Vertex) -> Option<Relation> {
        let expand = |arrows: Vec<(Vertex, u32)>| -> Option<Vec<ModuleLabel>> {
            let mut out = Vec::new();
            for (u, m) in arrows {
                let l = self.label(u)?;
                out.extend(std::iter::repeat_n(l, m as usize));
            }
            out.sort_unstable();
            Some(out)
        };
        Some(Relation {
            incoming: expand(self.quiver.incoming(v))?,
            outgoing: expand(self.quiver.outgoing(v))?,
            denominator: self.label(v)?,
        })
    }

    fn product(&self, arrows: &[(Vertex, u32)]) -> QPolynomial {
        let mut acc = QPolynomial::one();
        for &(u, m) in arrows {
            for _ in 0..m {
                acc = &acc * &*self.payload[&u];
            }
        }
        acc
    }

    /// Mutation at `v`. The new label is the one forced by the M-system
    /// when the exchange relation is one of its equations.
    pub fn mutate(&self, v: Vertex) -> Result<Seed> {
        self.quiver.check_mutable(v)?;
        let numerator = &self.product(&self.quiver.incoming(v)) + &self.product(&self.quiver.outgoing(v));
        let new = numerator
            .exact_div(&self.payload[&v])?
            .ok_or_else(|| Error::InexactDivision { vertex: v.to_string(), step: 0 })?;
        Ok(self.replaced(v, Arc::new(new)))
    }

    /// Like [`Seed::mutate`], but in value mode a large exchange relation is
    /// not expanded: the q-character `χ` of the label forced by the M-system
    /// is taken as the quotient and `χ · y_v = numerator` is checked by the
    /// streamed identity kernel, which proves the division exact. Returns
    /// whether that path was taken.
    pub fn mutate_cached(&self, v: Vertex, cache: &QCharCache) -> Result<(Seed, bool)> {
        self.quiver.check_mutable(v)?;
        let (inc, out) = (self.quiver.incoming(v), self.quiver.outgoing(v));
        let work = |arrows: &[(Vertex, u32)]| -> f64 {
            arrows.iter().map(|(u, m)| (self.payload[u].len() as f64).powi(*m as i32)).product()
        };
        let label = self.relation(v).and_then(|r| identify_relation(&r)).map(|(_, l)| l);
        let (Mode::Value, Some(label)) = (self.mode, label) else {
            return Ok((self.mutate(v)?, false));
        };
        if work(&inc) + work(&out) <= MATERIALIZE_PAIRS {
            return Ok((self.mutate(v)?, false));
        }
        let candidate = label_character(label, cache)?;
        let factors = |arrows: &[(Vertex, u32)]| -> Vec<&QPolynomial> {
            arrows.iter().flat_map(|(u, m)| std::iter::repeat_n(self.payload[u].as_ref(), *m as usize)).collect()
        };
        let check = check_identity(&[vec![candidate.as_ref(), self.payload[&v].as_ref()]], &[factors(&inc), factors(&out)])?;
        if check.holds {
            Ok((self.replaced(v, candidate), true))
        } else {
            // the quotient, if any, is not the expected character
            Ok((self.mutate(v)?, false))
        }
    }

    fn replaced(&self, v: Vertex, value: Arc<QPolynomial>) -> Seed {
        let mut labels = self.labels.clone();
        match self.relation(v).and_then(|r| identify_relation(&r)) {
            Some((_, produced)) => labels.insert(v, produced),
            None => labels.remove(&v),
        };
        let mut payload = self.payload.clone();
        payload.insert(v, value);
        let quiver = self.quiver.mutate(v).expect("checked mutable");
        Seed { quiver, mode: self.mode, payload, labels }
    }

    pub fn to_json(&self) -> serde_json::Value {
        SeedJson::from(self).to_value()
    }

    /// Reads a seed in the JSON layout of [`Seed::to_json`]; payloads are
    /// reset to the symbolic initial variables.
    pub fn from_json(src: &str) -> Result<Seed> {
        let raw: SeedJson = serde_json::from_str(src)?;
        let quiver = Quiver::new(
            raw.vertices.iter().map(|v| v.vertex),
            raw.arrows.iter().map(|&(a, b, m)| (a, b, m)),
            raw.frozen.iter().copied(),
        )?;
        let labels = raw.vertices.iter().filter_map(|v| v.label.map(|l| (v.vertex, l))).collect();
        Ok(Seed::symbolic(quiver, labels))
    }
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    vertex: Vertex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<ModuleLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedJson {
    vertices: Vec<VertexJson>,
    arrows: Vec<(Vertex, Vertex, u32)>,
    frozen: Vec<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<Mode>,
}

impl SeedJson {
    fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

impl From<&Seed> for SeedJson {
    fn from(seed: &Seed) -> SeedJson {
        SeedJson {
            vertices: seed
                .quiver
                .vertices()
                .map(|v| VertexJson { vertex: v, label: seed.label(v), terms: seed.payload(v).map(|p| p.len()) })
                .collect(),
            arrows: seed.quiver.arrows().collect(),
            frozen: seed.quiver.frozen().collect(),
            mode: Some(seed.mode),
        }
    }
}

/// Finds the M-system equation whose left side contains the denominator and
/// whose right summands are the two products of the relation; returns it
/// with the other left factor.
pub fn identify_relation(rel: &Relation) -> Option<(EquationInstance, ModuleLabel)> {
    let d = rel.denominator;
    if d.kind != crate::minaff::Kind::T || d.k == 0 {
        return None;
    }
    let (a, b, s) = (d.k, d.l, d.s);
    let mut candidates = Vec::new();
    if b == 0 {
        candidates.extend((1..=3).map(|l| (Family::Eq1, a, l, s - 6)));
    }
    if (1..=3).contains(&b) {
        candidates.push((Family::Eq1, a, b, s));
    }
    if b >= 1 {
        candidates.push((Family::Eq2, a, b, s - 6));
    }
    if b >= 4 {
        candidates.push((Family::Eq2, a, b - 3, s));
    }
    let products = [rel.incoming.clone(), rel.outgoing.clone()];
    candidates.into_iter().find_map(|(family, k, l, s)| {
        let eq = EquationInstance::new(family, k, l, s, false).ok()?;
        let sides = eq.sides();
        let sorted = |mut v: Vec<ModuleLabel>| {
            v.sort_unstable();
            v
        };
        let (r1, r2) = (sorted(sides.rhs1), sorted(sides.rhs2));
        let matches = (products[0] == r1 && products[1] == r2) || (products[0] == r2 && products[1] == r1);
        let pos = sides.lhs.iter().position(|l| *l == d)?;
        (matches && sides.lhs.len() == 2).then(|| (eq, sides.lhs[1 - pos]))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Column {
    C1,
    C2,
    C3,
    C4,
}

impl Column {
    pub fn index(self) -> u32 {
        match self {
            Column::C1 => 1,
            Column::C2 => 2,
            Column::C3 => 3,
            Column::C4 => 4,
        }
    }

    /// Vertex in row `row` (from 1), top-down.
    pub fn vertex(self, row: u32) -> Vertex {
        let r = row as i32 - 1;
        match self {
            Column::C4 => Vertex::new(Node::Two, -2 * r),
            c => Vertex::new(Node::One, -1 - 2 * (c.index() as i32 - 1) - 6 * r),
        }
    }

    /// Number of rows of this column in a truncation with `n` rows.
    pub fn height(self, n: u32) -> u32 {
        match self {
            Column::C4 => 3 * n,
            _ => n,
        }
    }
}

impl FromStr for Column {
    type Err = Error;
    fn from_str(s: &str) -> Result<Column> {
        match s.trim() {
            "C1" | "c1" => Ok(Column::C1),
            "C2" | "c2" => Ok(Column::C2),
            "C3" | "c3" => Ok(Column::C3),
            "C4" | "c4" => Ok(Column::C4),
            other => Err(Error::syntax(0, format!("unknown column {other:?}"))),
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.index())
    }
}

/// Initial label at a vertex: `t_{⌈-s/6⌉,0}^{(s)}` at `(1, s)` and
/// `t_{0,(2-s)/2}^{(s-1)}` at `(2, s)`.
pub fn initial_label(v: Vertex) -> ModuleLabel {
    match v.node {
        Node::One => ModuleLabel::t(((-v.shift + 5) / 6) as u32, 0, v.shift),
        Node::Two => ModuleLabel::t(0, ((2 - v.shift) / 2) as u32, v.shift - 1),
    }
}

/// The G2 quiver on rows `1..=n` of the columns `C1`, `C2`, `C3` and rows
/// `1..=3n` of `C4`. A vertex is frozen when the infinite quiver gives it a
/// neighbour outside the truncation.
pub fn g2_quiver(n: u32) -> Result<Quiver> {
    if n < 2 {
        return Err(Error::InvalidParameters("the truncation needs at least 2 rows".into()));
    }
    if n > 10_000 {
        return Err(Error::InvalidParameters("truncation too large".into()));
    }
    let all = [Column::C1, Column::C2, Column::C3, Column::C4];
    let vertices: BTreeSet<Vertex> = all.iter().flat_map(|c| (1..=c.height(n)).map(move |r| c.vertex(r))).collect();
    let neighbours = |v: Vertex| -> [(Vertex, Vertex); 4] {
        let s = v.shift;
        match v.node {
            Node::One => [
                (v, Vertex::new(Node::One, s + 6)),
                (Vertex::new(Node::One, s - 6), v),
                (v, Vertex::new(Node::Two, s - 5)),
                (Vertex::new(Node::Two, s + 1), v),
            ],
            Node::Two => [
                (v, Vertex::new(Node::Two, s + 2)),
                (Vertex::new(Node::Two, s - 2), v),
                (v, Vertex::new(Node::One, s - 1)),
                (Vertex::new(Node::One, s + 5), v),
            ],
        }
    };
    // vertices of the infinite quiver: (1, odd s ≤ -1) and (2, even s ≤ 0)
    let exists = |v: Vertex| match v.node {
        Node::One => v.shift <= -1 && v.shift % 2 != 0,
        Node::Two => v.shift <= 0 && v.shift % 2 == 0,
    };
    let mut arrows = BTreeSet::new();
    let mut frozen = BTreeSet::new();
    for &v in &vertices {
        for (a, b) in neighbours(v) {
            let other = if a == v { b } else { a };
            if !exists(other) {
                continue;
            }
            if vertices.contains(&other) {
                arrows.insert((a, b, 1));
            } else {
                frozen.insert(v);
            }
        }
    }
    Quiver::new(vertices, arrows, frozen)
}

/// The truncated initial seed. Value mode fills in the q-characters of the
/// initial labels.
pub fn g2_initial_seed(n: u32, mode: Mode, cache: &QCharCache) -> Result<Seed> {
    let quiver = g2_quiver(n)?;
    let labels: BTreeMap<Vertex, ModuleLabel> = quiver.vertices().map(|v| (v, initial_label(v))).collect();
    match mode {
        Mode::Symbolic => Ok(Seed::symbolic(quiver, labels)),
        Mode::Value => {
            let values = labels.iter().map(|(v, l)| Ok((*v, label_character(*l, cache)?))).collect::<Result<_>>()?;
            Seed::with_values(quiver, values, labels)
        }
    }
}

/// A sequence of column sweeps over a truncation with `rows` rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnPlan {
    pub columns: Vec<Column>,
    pub rows: u32,
}

impl ColumnPlan {
    /// Sweep `t` (from 0) mutates the first `rows - 1 - t` rows of `C1`-`C3`
    /// (three times as many of `C4`), so the mutated region stays away from
    /// the frozen boundary.
    pub fn new(columns: Vec<Column>, rows: u32) -> Result<ColumnPlan> {
        if rows < 2 {
            return Err(Error::InvalidParameters("a column plan needs at least 2 rows".into()));
        }
        if columns.len() >= rows as usize {
            return Err(Error::InvalidParameters(format!(
                "{} sweeps need at least {} rows, got {rows}",
                columns.len(),
                columns.len() + 1
            )));
        }
        Ok(ColumnPlan { columns, rows })
    }

    /// Parses `C1,C1,C2`.
    pub fn parse(src: &str, rows: u32) -> Result<ColumnPlan> {
        let mut columns = Vec::new();
        let mut pos = 0;
        if !src.trim().is_empty() {
            for part in src.split(',') {
                columns.push(part.parse::<Column>().map_err(|_| Error::syntax(pos, format!("unknown column {:?}", part.trim())))?);
                pos += part.len() + 1;
            }
        }
        ColumnPlan::new(columns, rows)
    }

    /// Rows mutated by sweep `t`.
    pub fn sweep_rows(&self, t: usize) -> u32 {
        let safe = self.rows - 1 - t as u32;
        match self.columns[t] {
            Column::C4 => 3 * safe,
            _ => safe,
        }
    }

    /// Label the closed-form grid assigns to row `k` of sweep `t`, when the
    /// plan so far repeats one of `C1`-`C3`: `t_{k,3r-3+c}^{(-6k-6r+7-2c)}`
    /// for the `r`-th sweep of column `C_c`.
    pub fn grid_label(&self, t: usize, k: u32) -> Option<ModuleLabel> {
        let col = self.columns[t];
        if col == Column::C4 || self.columns[..t].iter().any(|c| *c != col) {
            return None;
        }
        let (c, r) = (col.index() as i32, t as i32 + 1);
        Some(ModuleLabel::t(k, (3 * r - 3 + c) as u32, -6 * k as i32 - 6 * r + 7 - 2 * c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumeratorTerms {
    pub incoming: Vec<ModuleLabel>,
    pub outgoing: Vec<ModuleLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationRecord {
    pub numerator: NumeratorTerms,
    pub denominator: ModuleLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationRecord {
    pub step: usize,
    pub column: Column,
    pub sweep: usize,
    pub row: u32,
    pub vertex: Vertex,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<RelationRecord>,
    pub produced_label: Option<ModuleLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_label: Option<ModuleLabel>,
    pub equation: Option<EquationInstance>,
    /// Number of terms of the new payload.
    pub terms: usize,
    /// The division was certified against the expected character rather
    /// than carried out term by term.
    pub certified: bool,
    /// Value mode: the payload equals the q-character of the produced label.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_matches: Option<bool>,
}

impl MutationRecord {
    pub fn pass(&self) -> bool {
        self.produced_label.is_some()
            && self.expected_label.is_none_or(|e| Some(e) == self.produced_label)
            && self.value_matches != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trace {
    pub plan: ColumnPlan,
    pub mode: Mode,
    pub records: Vec<MutationRecord>,
}

impl Trace {
    pub fn pass(&self) -> bool {
        self.records.iter().all(MutationRecord::pass)
    }
}

/// Replays a column plan from the initial seed. Every division is exact or
/// the run stops with `InexactDivision`.
pub fn run_columns(plan: &ColumnPlan, mode: Mode, cache: &QCharCache) -> Result<(Trace, Seed)> {
    let mut seed = g2_initial_seed(plan.rows, mode, cache)?;
    let mut records = Vec::new();
    for (t, &column) in plan.columns.iter().enumerate() {
        for row in 1..=plan.sweep_rows(t) {
            let vertex = column.vertex(row);
            let step = records.len();
            let relation = seed.relation(vertex);
            let (next, certified) = seed.mutate_cached(vertex, cache).map_err(|e| match e {
                Error::InexactDivision { vertex, .. } => Error::InexactDivision { vertex, step },
                other => other,
            })?;
            seed = next;
            let produced_label = seed.label(vertex);
            let equation = relation.as_ref().and_then(identify_relation).map(|(eq, _)| eq);
            let payload = seed.payload(vertex).expect("mutated vertex has a payload");
            let value_matches = match (mode, produced_label) {
                (Mode::Value, Some(label)) => Some(*label_character(label, cache)? == **payload),
                (Mode::Value, None) => Some(false),
                (Mode::Symbolic, _) => None,
            };
            records.push(MutationRecord {
                step,
                column,
                sweep: t + 1,
                row,
                vertex,
                relation: relation.map(|r| RelationRecord {
                    numerator: NumeratorTerms { incoming: r.incoming, outgoing: r.outgoing },
                    denominator: r.denominator,
                }),
                produced_label,
                expected_label: plan.grid_label(t, row),
                equation,
                terms: payload.len(),
                certified,
                value_matches,
            });
        }
    }
    Ok((Trace { plan: plan.clone(), mode, records }, seed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub relations: usize,
    pub matched: Vec<(usize, EquationInstance)>,
    pub unmatched: Vec<usize>,
    /// Instances hit by more than one relation.
    pub repeated: Vec<EquationInstance>,
    pub bijection: bool,
}

/// Matches every exchange relation of a trace with an M-system equation.
pub fn match_msystem(trace: &Trace) -> MatchReport {
    let mut matched = Vec::new();
    let mut unmatched = Vec::new();
    let mut seen: BTreeMap<EquationInstance, usize> = BTreeMap::new();
    for rec in &trace.records {
        let rel = rec.relation.as_ref().map(|r| Relation {
            incoming: r.numerator.incoming.clone(),
            outgoing: r.numerator.outgoing.clone(),
            denominator: r.denominator,
        });
        match rel.as_ref().and_then(identify_relation) {
            Some((eq, produced)) if Some(produced) == rec.produced_label => {
                *seen.entry(eq).or_default() += 1;
                matched.push((rec.step, eq));
            }
            _ => unmatched.push(rec.step),
        }
    }
    let repeated: Vec<EquationInstance> = seen.into_iter().filter(|(_, n)| *n > 1).map(|(eq, _)| eq).collect();
    MatchReport {
        relations: trace.records.len(),
        bijection: unmatched.is_empty() && repeated.is_empty(),
        matched,
        unmatched,
        repeated,
    }
}

/// Symbolic Laurent check: replays the plan over formal initial variables.
/// Succeeds when every mutation divides exactly, i.e. every new variable is
/// a Laurent polynomial in the initial cluster. Returns the term counts.
pub fn laurent_check(plan: &ColumnPlan, cache: &QCharCache) -> Result<Vec<(Vertex, usize)>> {
    let (trace, _) = run_columns(plan, Mode::Symbolic, cache)?;
    Ok(trace.records.iter().map(|r| (r.vertex, r.terms)).collect())
}
