//! Finite lattices and complete Heyting algebras.
//!
//! Elements of a [`FiniteLattice`] are dense indices ([`Elem`]) into
//! precomputed join, meet and implication tables. Three carriers are
//! provided: the open sets of a [`FiniteTopology`], finite chains
//! `0 < 1/n < … < 1`, and raw partial orders (used to exercise the law
//! checker on lattices that are not Heyting).

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use itertools::Itertools;
use num_rational::Rational64;

use crate::error::{input, Error, Result};

/// A subset of the points of a finite topology, one bit per point.
pub type PointSet = u64;

const MAX_POINTS: usize = 64;

fn full_mask(n: usize) -> PointSet {
    if n == MAX_POINTS {
        PointSet::MAX
    } else {
        (1 << n) - 1
    }
}

fn open_key(mask: PointSet) -> (u32, PointSet) {
    (mask.count_ones(), mask)
}

/// A finite topological space: labelled points and a family of opens
/// closed under union and intersection.
///
/// Opens are stored as bitmasks sorted by `(cardinality, mask)`, so two
/// topologies are equal exactly when their point lists and open families
/// are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteTopology {
    points: Vec<String>,
    opens: Vec<PointSet>,
}

impl FiniteTopology {
    /// Smallest topology on `points` containing every generator.
    pub fn generate<S: AsRef<str>>(points: Vec<String>, generators: &[Vec<S>]) -> Result<Self> {
        check_points(&points)?;
        let masks = generators
            .iter()
            .map(|g| mask_of_labels(&points, g))
            .collect::<Result<Vec<_>>>()?;
        Self::from_masks(points, masks)
    }

    /// Smallest topology containing the given generator masks.
    pub fn from_masks(
        points: Vec<String>,
        generators: impl IntoIterator<Item = PointSet>,
    ) -> Result<Self> {
        check_points(&points)?;
        let full = full_mask(points.len());
        let mut opens: BTreeSet<PointSet> = BTreeSet::from([0, full]);
        for g in generators {
            if g & !full != 0 {
                return input(format!("generator mask {g:#b} mentions unknown points"));
            }
            opens.insert(g);
        }
        // Close under pairwise union and intersection; new sets are combined
        // with everything seen so far until nothing changes.
        let mut frontier: Vec<PointSet> = opens.iter().copied().collect();
        while !frontier.is_empty() {
            let snapshot: Vec<PointSet> = opens.iter().copied().collect();
            let mut next = Vec::new();
            for &a in &frontier {
                for &b in &snapshot {
                    for m in [a | b, a & b] {
                        if opens.insert(m) {
                            next.push(m);
                        }
                    }
                }
            }
            frontier = next;
        }
        let mut opens: Vec<PointSet> = opens.into_iter().collect();
        opens.sort_by_key(|&m| open_key(m));
        Ok(FiniteTopology { points, opens })
    }

    /// Every subset is open.
    pub fn discrete(points: Vec<String>) -> Result<Self> {
        let n = points.len();
        Self::from_masks(points, (0..n).map(|i| 1 << i))
    }

    /// Only the empty set and the whole space are open.
    pub fn indiscrete(points: Vec<String>) -> Result<Self> {
        Self::from_masks(points, [])
    }

    /// Points `1..=m` whose opens are the initial segments `{1..k}`.
    ///
    /// This is the finite stand-in for `[0,1)` with the lower topology: its
    /// open-set lattice is the chain with `m + 1` elements.
    pub fn lower_segments(m: usize) -> Result<Self> {
        let points = (1..=m).map(|i| i.to_string()).collect();
        Self::from_masks(points, (1..=m).map(full_mask))
    }

    /// Every topology on the given points (at most 4 of them), in a
    /// deterministic order.
    pub fn all_on(points: Vec<String>) -> Result<Vec<Self>> {
        check_points(&points)?;
        if points.len() > 4 {
            return input("topology enumeration supports at most 4 points");
        }
        let full = full_mask(points.len());
        let proper: Vec<PointSet> = (1..full).collect();
        let mut out = Vec::new();
        for choice in 0u64..(1u64 << proper.len()) {
            let mut family: Vec<PointSet> = vec![0, full];
            family.extend(
                proper
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| choice >> i & 1 == 1)
                    .map(|(_, &m)| m),
            );
            let set: BTreeSet<PointSet> = family.iter().copied().collect();
            let closed = family.iter().all(|&a| {
                family
                    .iter()
                    .all(|&b| set.contains(&(a | b)) && set.contains(&(a & b)))
            });
            if closed {
                let mut opens: Vec<PointSet> = set.into_iter().collect();
                opens.sort_by_key(|&m| open_key(m));
                out.push(FiniteTopology {
                    points: points.clone(),
                    opens,
                });
            }
        }
        Ok(out)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn full(&self) -> PointSet {
        full_mask(self.points.len())
    }

    pub fn is_open(&self, mask: PointSet) -> bool {
        self.index_of_open(mask).is_some()
    }

    /// Position of `mask` in [`opens`](Self::opens).
    pub fn index_of_open(&self, mask: PointSet) -> Option<usize> {
        self.opens
            .binary_search_by_key(&open_key(mask), |&m| open_key(m))
            .ok()
    }

    /// Largest open contained in `mask`.
    pub fn interior(&self, mask: PointSet) -> PointSet {
        self.opens
            .iter()
            .filter(|&&w| w & !mask == 0)
            .fold(0, |acc, &w| acc | w)
    }

    /// Relative pseudo-complement: the union of all opens `W` with
    /// `W ∩ a ⊆ b`.
    pub fn implies(&self, a: PointSet, b: PointSet) -> PointSet {
        self.opens
            .iter()
            .filter(|&&w| w & a & !b == 0)
            .fold(0, |acc, &w| acc | w)
    }

    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<PointSet> {
        mask_of_labels(&self.points, labels)
    }

    pub fn index_of_point(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn labels_of(&self, mask: PointSet) -> Vec<&str> {
        self.points
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p.as_str())
            .collect()
    }

    /// Renders a point set as `{a b}`.
    pub fn format_set(&self, mask: PointSet) -> String {
        format!("{{{}}}", self.labels_of(mask).join(" "))
    }
}

fn check_points(points: &[String]) -> Result<()> {
    if points.len() > MAX_POINTS {
        return input(format!("at most {MAX_POINTS} points are supported"));
    }
    let distinct: BTreeSet<&String> = points.iter().collect();
    if distinct.len() != points.len() {
        return input("duplicate point label");
    }
    Ok(())
}

fn mask_of_labels<S: AsRef<str>>(points: &[String], labels: &[S]) -> Result<PointSet> {
    labels.iter().try_fold(0, |acc, l| {
        let l = l.as_ref();
        match points.iter().position(|p| p == l) {
            Some(i) => Ok(acc | 1 << i),
            None => input(format!("unknown point `{l}`")),
        }
    })
}

/// An element of a [`FiniteLattice`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub(crate) u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        Elem(i as u32)
    }
}

/// What the elements of a lattice stand for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeCarrier {
    /// The open sets of a topology, in the topology's canonical order.
    OpenSets(FiniteTopology),
    /// The chain `0, 1/n, …, 1`.
    Chain(u32),
    /// A lattice given directly by its order.
    Raw,
}

/// A finite lattice with precomputed operation tables.
///
/// `implication(a, b)` is tabulated as the join of all `w` with
/// `w ∧ a ≤ b`; it is a genuine relative pseudo-complement only when the
/// lattice is Heyting, which [`check_heyting_laws`] decides.
#[derive(Clone, Debug)]
pub struct FiniteLattice {
    carrier: LatticeCarrier,
    labels: Vec<String>,
    leq: Vec<bool>,
    join: Vec<Elem>,
    meet: Vec<Elem>,
    imp: Vec<Elem>,
    bottom: Elem,
    top: Elem,
}

impl PartialEq for FiniteLattice {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.labels == other.labels && self.leq == other.leq
    }
}

impl FiniteLattice {
    /// Builds a lattice from a partial order given as `leq[a][b]`.
    ///
    /// Fails if the relation is not a partial order or some pair lacks a
    /// join or meet.
    pub fn from_order(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return input("a lattice needs at least one element");
        }
        if leq.len() != n || leq.iter().any(|row| row.len() != n) {
            return input("order matrix does not match the element count");
        }
        for a in 0..n {
            if !leq[a][a] {
                return input(format!("order is not reflexive at `{}`", labels[a]));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return input(format!(
                        "order is not antisymmetric on `{}`, `{}`",
                        labels[a], labels[b]
                    ));
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return input("order is not transitive");
                    }
                }
            }
        }
        let bound = |a: usize, b: usize, upper: bool| -> Option<usize> {
            let ok = |c: usize| {
                if upper {
                    leq[a][c] && leq[b][c]
                } else {
                    leq[c][a] && leq[c][b]
                }
            };
            let cands: Vec<usize> = (0..n).filter(|&c| ok(c)).collect();
            cands.iter().copied().find(|&c| {
                cands
                    .iter()
                    .all(|&d| if upper { leq[c][d] } else { leq[d][c] })
            })
        };
        let mut join = Vec::with_capacity(n * n);
        let mut meet = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let j = bound(a, b, true).ok_or_else(|| {
                    Error::Input(format!("`{}` and `{}` have no join", labels[a], labels[b]))
                })?;
                let m = bound(a, b, false).ok_or_else(|| {
                    Error::Input(format!("`{}` and `{}` have no meet", labels[a], labels[b]))
                })?;
                join.push(Elem::from_index(j));
                meet.push(Elem::from_index(m));
            }
        }
        let flat: Vec<bool> = leq.into_iter().flatten().collect();
        let mut l = FiniteLattice {
            carrier: LatticeCarrier::Raw,
            labels,
            leq: flat,
            join,
            meet,
            imp: Vec::new(),
            bottom: Elem(0),
            top: Elem(0),
        };
        l.bottom = l.elements().fold(Elem(0), |acc, e| l.meet(acc, e));
        l.top = l.elements().fold(Elem(0), |acc, e| l.join(acc, e));
        l.imp = l
            .elements()
            .cartesian_product(l.elements())
            .map(|(a, b)| l.join_all(l.elements().filter(|&w| l.leq(l.meet(w, a), b))))
            .collect();
        Ok(l)
    }

    pub fn carrier(&self) -> &LatticeCarrier {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.labels.len() as u32).map(Elem)
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn contains(&self, e: Elem) -> bool {
        e.index() < self.size()
    }

    fn at(&self, a: Elem, b: Elem) -> usize {
        a.index() * self.size() + b.index()
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[self.at(a, b)]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[self.at(a, b)]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[self.at(a, b)]
    }

    /// Join of an arbitrary finite family; the empty join is the bottom.
    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items
            .into_iter()
            .fold(self.bottom, |acc, e| self.join(acc, e))
    }

    /// Meet of an arbitrary finite family; the empty meet is the top.
    pub fn meet_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.top, |acc, e| self.meet(acc, e))
    }

    pub(crate) fn imp_candidate(&self, a: Elem, b: Elem) -> Elem {
        self.imp[self.at(a, b)]
    }

    pub fn label(&self, e: Elem) -> &str {
        &self.labels[e.index()]
    }

    /// Parses an element label: `{a b}` for open sets, a rational such as
    /// `3/4` for chains, the literal label for raw lattices.
    pub fn parse_elem(&self, text: &str) -> Result<Elem> {
        let text = text.trim();
        let found = match &self.carrier {
            LatticeCarrier::OpenSets(t) => {
                let inner = text
                    .strip_prefix('{')
                    .and_then(|s| s.strip_suffix('}'))
                    .ok_or_else(|| Error::Input(format!("expected a set literal, got `{text}`")))?;
                let labels: Vec<&str> = inner.split_whitespace().collect();
                let mask = t.mask_of(&labels)?;
                self.elem_of_open(mask)
                    .ok_or_else(|| Error::Input(format!("{} is not open", t.format_set(mask))))?
            }
            LatticeCarrier::Chain(_) => {
                let q: Rational64 = text
                    .parse()
                    .map_err(|_| Error::Input(format!("expected a rational, got `{text}`")))?;
                self.elem_of_value(q)
                    .ok_or_else(|| Error::Input(format!("{text} is not in the chain")))?
            }
            LatticeCarrier::Raw => self
                .labels
                .iter()
                .position(|l| l == text)
                .map(Elem::from_index)
                .ok_or_else(|| Error::Input(format!("unknown element `{text}`")))?,
        };
        Ok(found)
    }

    /// The open set an element stands for, on open-set lattices.
    pub fn open_set(&self, e: Elem) -> Option<PointSet> {
        match &self.carrier {
            LatticeCarrier::OpenSets(t) => t.opens().get(e.index()).copied(),
            _ => None,
        }
    }

    pub fn elem_of_open(&self, mask: PointSet) -> Option<Elem> {
        match &self.carrier {
            LatticeCarrier::OpenSets(t) => t.index_of_open(mask).map(Elem::from_index),
            _ => None,
        }
    }

    /// The rational an element stands for, on chains.
    pub fn chain_value(&self, e: Elem) -> Option<Rational64> {
        match self.carrier {
            LatticeCarrier::Chain(n) if e.index() <= n as usize => {
                Some(Rational64::new(e.0 as i64, n as i64))
            }
            _ => None,
        }
    }

    pub fn elem_of_value(&self, q: Rational64) -> Option<Elem> {
        match self.carrier {
            LatticeCarrier::Chain(n) => {
                let k = q * Rational64::from_integer(n as i64);
                (k.is_integer() && *k.numer() >= 0 && *k.numer() <= n as i64)
                    .then(|| Elem(*k.numer() as u32))
            }
            _ => None,
        }
    }

    /// The topology behind an open-set lattice.
    pub fn topology(&self) -> Option<&FiniteTopology> {
        match &self.carrier {
            LatticeCarrier::OpenSets(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.carrier {
            LatticeCarrier::OpenSets(t) => {
                write!(
                    f,
                    "open sets of {} ({} opens)",
                    t.format_set(t.full()),
                    self.size()
                )
            }
            LatticeCarrier::Chain(n) => write!(f, "chain:{n}"),
            LatticeCarrier::Raw => write!(f, "raw lattice ({} elements)", self.size()),
        }
    }
}

/// A finite lattice known to be a complete Heyting algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct HeytingLattice(FiniteLattice);

impl Deref for HeytingLattice {
    type Target = FiniteLattice;

    fn deref(&self) -> &FiniteLattice {
        &self.0
    }
}

impl HeytingLattice {
    /// Accepts a lattice only if [`check_heyting_laws`] passes.
    pub fn from_lattice(l: FiniteLattice) -> Result<Self> {
        let report = check_heyting_laws(&l, &LawCheckOptions::default());
        match report.violation {
            None => Ok(HeytingLattice(l)),
            Some(v) => Err(Error::Precondition(format!("lattice is not Heyting: {v}"))),
        }
    }

    /// The open-set lattice of a topology: union, intersection, and
    /// `A → B` the union of all opens `W` with `W ∩ A ⊆ B`.
    pub fn open_sets(t: &FiniteTopology) -> Self {
        let n = t.opens().len();
        let opens = t.opens();
        let idx = |m: PointSet| Elem::from_index(t.index_of_open(m).expect("opens are closed"));
        let mut leq = Vec::with_capacity(n * n);
        let mut join = Vec::with_capacity(n * n);
        let mut meet = Vec::with_capacity(n * n);
        let mut imp = Vec::with_capacity(n * n);
        for &a in opens {
            for &b in opens {
                leq.push(a & !b == 0);
                join.push(idx(a | b));
                meet.push(idx(a & b));
                imp.push(idx(t.implies(a, b)));
            }
        }
        HeytingLattice(FiniteLattice {
            labels: opens.iter().map(|&m| t.format_set(m)).collect(),
            carrier: LatticeCarrier::OpenSets(t.clone()),
            leq,
            join,
            meet,
            imp,
            bottom: idx(0),
            top: idx(t.full()),
        })
    }

    /// The chain `0 < 1/n < … < 1` with max, min, and `a → b = 1` if
    /// `a ≤ b`, else `b`.
    pub fn chain(n: u32) -> Result<Self> {
        if n == 0 {
            return input("chain size must be positive");
        }
        let size = n as usize + 1;
        let mut leq = Vec::with_capacity(size * size);
        let mut join = Vec::with_capacity(size * size);
        let mut meet = Vec::with_capacity(size * size);
        let mut imp = Vec::with_capacity(size * size);
        for a in 0..=n {
            for b in 0..=n {
                leq.push(a <= b);
                join.push(Elem(a.max(b)));
                meet.push(Elem(a.min(b)));
                imp.push(if a <= b { Elem(n) } else { Elem(b) });
            }
        }
        Ok(HeytingLattice(FiniteLattice {
            carrier: LatticeCarrier::Chain(n),
            labels: (0..=n)
                .map(|k| Rational64::new(k as i64, n as i64).to_string())
                .collect(),
            leq,
            join,
            meet,
            imp,
            bottom: Elem(0),
            top: Elem(n),
        }))
    }

    /// The two-element lattice `{0, 1}`.
    pub fn two() -> Self {
        Self::chain(1).expect("n = 1 is valid")
    }

    pub fn imp(&self, a: Elem, b: Elem) -> Elem {
        self.0.imp_candidate(a, b)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.imp(a, self.bottom())
    }

    /// Order-reversing involution `k/n ↦ (n-k)/n` of a chain.
    pub fn chain_negation(&self, a: Elem) -> Option<Elem> {
        match self.carrier() {
            LatticeCarrier::Chain(n) => Some(Elem(n - a.0)),
            _ => None,
        }
    }

    pub fn into_inner(self) -> FiniteLattice {
        self.0
    }
}

/// Tuning for [`check_heyting_laws`].
#[derive(Clone, Debug)]
pub struct LawCheckOptions {
    /// Subsets up to this size are used for the joinAll/meetAll and
    /// distributivity checks, in addition to the full element set.
    pub max_subset_size: usize,
}

impl Default for LawCheckOptions {
    fn default() -> Self {
        LawCheckOptions { max_subset_size: 2 }
    }
}

/// A failed law instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawViolation {
    pub law: &'static str,
    pub witness: Vec<Elem>,
    pub detail: String,
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.law, self.detail)
    }
}

/// Outcome of [`check_heyting_laws`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    /// Number of law instances evaluated.
    pub instances: u64,
    pub violation: Option<LawViolation>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exhaustively checks the lattice axioms, joinAll/meetAll as least upper
/// and greatest lower bounds, distributivity of meet over joins, and the
/// adjunction `w ∧ a ≤ b ⟺ w ≤ (a → b)`. Stops at the first violation.
pub fn check_heyting_laws(l: &FiniteLattice, opts: &LawCheckOptions) -> LawReport {
    let mut instances = 0u64;
    let fail = |law, witness: Vec<Elem>, detail: String, instances| LawReport {
        instances,
        violation: Some(LawViolation {
            law,
            witness,
            detail,
        }),
    };
    let name = |es: &[Elem]| es.iter().map(|&e| l.label(e)).join(", ");

    for a in l.elements() {
        for b in l.elements() {
            instances += 1;
            if a != b && l.leq(a, b) && l.leq(b, a) {
                return fail("antisymmetry", vec![a, b], name(&[a, b]), instances);
            }
            for c in l.elements() {
                if l.leq(a, b) && l.leq(b, c) && !l.leq(a, c) {
                    return fail("transitivity", vec![a, b, c], name(&[a, b, c]), instances);
                }
            }
        }
        if !l.leq(a, a) {
            return fail("reflexivity", vec![a], name(&[a]), instances);
        }
    }

    let mut subsets: Vec<Vec<Elem>> = (0..=opts.max_subset_size.min(l.size()))
        .flat_map(|k| l.elements().combinations(k))
        .collect();
    subsets.push(l.elements().collect());

    for s in &subsets {
        instances += 1;
        let j = l.join_all(s.iter().copied());
        let m = l.meet_all(s.iter().copied());
        if !s.iter().all(|&x| l.leq(x, j)) {
            return fail("join-upper-bound", s.clone(), name(s), instances);
        }
        if !s.iter().all(|&x| l.leq(m, x)) {
            return fail("meet-lower-bound", s.clone(), name(s), instances);
        }
        for u in l.elements() {
            if s.iter().all(|&x| l.leq(x, u)) && !l.leq(j, u) {
                return fail(
                    "join-least",
                    s.clone(),
                    format!("[{}] vs {}", name(s), l.label(u)),
                    instances,
                );
            }
            if s.iter().all(|&x| l.leq(u, x)) && !l.leq(u, m) {
                return fail(
                    "meet-greatest",
                    s.clone(),
                    format!("[{}] vs {}", name(s), l.label(u)),
                    instances,
                );
            }
        }
    }
    if l.join_all([]) != l.bottom() || !l.elements().all(|e| l.leq(l.bottom(), e)) {
        return fail(
            "empty-join",
            vec![],
            "joinAll(∅) is not the bottom".into(),
            instances,
        );
    }
    if l.meet_all([]) != l.top() || !l.elements().all(|e| l.leq(e, l.top())) {
        return fail(
            "empty-meet",
            vec![],
            "meetAll(∅) is not the top".into(),
            instances,
        );
    }

    for a in l.elements() {
        for s in &subsets {
            instances += 1;
            let lhs = l.meet(a, l.join_all(s.iter().copied()));
            let rhs = l.join_all(s.iter().map(|&x| l.meet(a, x)));
            if lhs != rhs {
                return fail(
                    "distributivity",
                    std::iter::once(a).chain(s.iter().copied()).collect(),
                    format!(
                        "{} ∧ ⋁[{}] = {} but ⋁ of meets = {}",
                        l.label(a),
                        name(s),
                        l.label(lhs),
                        l.label(rhs)
                    ),
                    instances,
                );
            }
        }
    }

    for w in l.elements() {
        for a in l.elements() {
            for b in l.elements() {
                instances += 1;
                let imp = l.imp_candidate(a, b);
                if l.leq(l.meet(w, a), b) != l.leq(w, imp) {
                    return fail(
                        "adjunction",
                        vec![w, a, b],
                        format!(
                            "w={} a={} b={} a→b={}",
                            l.label(w),
                            l.label(a),
                            l.label(b),
                            l.label(imp)
                        ),
                        instances,
                    );
                }
            }
        }
    }

    LawReport {
        instances,
        violation: None,
    }
}
