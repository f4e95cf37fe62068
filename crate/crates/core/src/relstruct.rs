//! Relational structures `(X, (R_j)_J)` of arbitrary type.
//!
//! A symbol `j` of arity `n` carries an `(n+1)`-ary relation whose tuples
//! list the arguments first and the result last. Operations become their
//! graphs via [`relation_from_operation`]; constants become unary relations.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use num_rational::Rational64;

use crate::error::{input, Error, Result};

/// An ordered list of symbols with their arities `n_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self> {
        let names: BTreeSet<&str> = symbols.iter().map(|(n, _)| n.as_str()).collect();
        if names.len() != symbols.len() {
            return input("duplicate symbol in signature");
        }
        Ok(Signature { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, j: usize) -> &str {
        &self.symbols[j].0
    }

    pub fn arity(&self, j: usize) -> usize {
        self.symbols[j].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(n, a)| (n.as_str(), *a))
    }
}

/// An `(n+1)`-ary relation over carrier indices, indexed by last coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    arity: usize,
    tuples: Vec<Vec<usize>>,
    ending_at: Vec<Vec<usize>>,
}

impl Relation {
    /// `arity` is the operation arity `n`; every tuple must have `n + 1`
    /// entries below `carrier_len`. Duplicates are dropped.
    pub fn new(
        carrier_len: usize,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        let set: BTreeSet<Vec<usize>> = tuples.into_iter().collect();
        let mut ending_at = vec![Vec::new(); carrier_len];
        for (i, t) in set.iter().enumerate() {
            if t.len() != arity + 1 {
                return input(format!(
                    "tuple {t:?} has length {}, expected {}",
                    t.len(),
                    arity + 1
                ));
            }
            if let Some(&bad) = t.iter().find(|&&x| x >= carrier_len) {
                return input(format!(
                    "tuple {t:?} mentions element {bad} outside the carrier"
                ));
            }
            ending_at[t[arity]].push(i);
        }
        Ok(Relation {
            arity,
            tuples: set.into_iter().collect(),
            ending_at,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// All tuples in lexicographic order.
    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    /// Argument lists `(x_1, …, x_n)` with `(x_1, …, x_n, x)` in the relation.
    pub fn preimages(&self, x: usize) -> impl Iterator<Item = &[usize]> + '_ {
        self.ending_at[x]
            .iter()
            .map(move |&i| &self.tuples[i][..self.arity])
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    /// Each argument list has exactly one result.
    pub fn is_functional(&self, carrier_len: usize) -> bool {
        let counts = self.tuples.iter().counts_by(|t| t[..self.arity].to_vec());
        counts.len() == carrier_len.pow(self.arity as u32) && counts.values().all(|&c| c == 1)
    }
}

/// The graph `{(x_1, …, x_n, op(x_1, …, x_n))}` of a total operation on
/// `{0, …, carrier_len-1}`. `op` returning `None` marks the table partial.
pub fn relation_from_operation(
    carrier_len: usize,
    arity: usize,
    mut op: impl FnMut(&[usize]) -> Option<usize>,
) -> Result<Relation> {
    let mut tuples = Vec::new();
    for args in all_tuples(carrier_len, arity) {
        let Some(r) = op(&args) else {
            return input(format!("operation table is undefined at {args:?}"));
        };
        let mut t = args;
        t.push(r);
        tuples.push(t);
    }
    Relation::new(carrier_len, arity, tuples)
}

/// Every tuple in `{0..base}^len`, lexicographically; one empty tuple when
/// `len == 0`.
pub(crate) fn all_tuples(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if base == 0 && len > 0 {
        0
    } else {
        base.pow(len as u32)
    };
    (0..total).map(move |mut k| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = k % base;
            k /= base;
        }
        t
    })
}

/// A finite carrier with one relation per signature symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalStructure {
    carrier: Vec<String>,
    signature: Signature,
    relations: Vec<Relation>,
}

impl RelationalStructure {
    pub fn new(carrier: Vec<String>, relations: Vec<(String, Relation)>) -> Result<Self> {
        let distinct: BTreeSet<&String> = carrier.iter().collect();
        if distinct.len() != carrier.len() {
            return input("duplicate carrier label");
        }
        for (name, r) in &relations {
            if r.ending_at.len() != carrier.len() {
                return input(format!(
                    "relation `{name}` was built over a different carrier"
                ));
            }
        }
        let signature = Signature::new(
            relations
                .iter()
                .map(|(n, r)| (n.clone(), r.arity()))
                .collect(),
        )?;
        Ok(RelationalStructure {
            carrier,
            signature,
            relations: relations.into_iter().map(|(_, r)| r).collect(),
        })
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn carrier_len(&self) -> usize {
        self.carrier.len()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn relation(&self, j: usize) -> &Relation {
        &self.relations[j]
    }

    /// Looks up a symbol by name.
    pub fn symbol(&self, name: &str) -> Result<usize> {
        self.signature
            .index_of(name)
            .ok_or_else(|| Error::Input(format!("unknown relation `{name}`")))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.carrier.iter().position(|c| c == label)
    }

    pub fn label(&self, x: usize) -> &str {
        &self.carrier[x]
    }
}

/// Labels `0, 1/n, …, 1` of the chain `C_n`.
pub fn chain_labels(n: u32) -> Vec<String> {
    (0..=n)
        .map(|k| Rational64::new(k as i64, n as i64).to_string())
        .collect()
}

/// `([0,1], ∧, ∨, ¬, 0, 1)` restricted to the chain `C_n`, as a relational
/// structure of type 2, 2, 1, 0, 0 with symbols `meet`, `join`, `neg`,
/// `zero`, `one`.
pub fn interval_structure(n: u32) -> Result<RelationalStructure> {
    if n == 0 {
        return input("chain size must be positive");
    }
    let len = n as usize + 1;
    let top = n as usize;
    let relations = vec![
        (
            "meet".to_string(),
            relation_from_operation(len, 2, |a| Some(a[0].min(a[1])))?,
        ),
        (
            "join".to_string(),
            relation_from_operation(len, 2, |a| Some(a[0].max(a[1])))?,
        ),
        (
            "neg".to_string(),
            relation_from_operation(len, 1, |a| Some(top - a[0]))?,
        ),
        (
            "zero".to_string(),
            relation_from_operation(len, 0, |_| Some(0))?,
        ),
        (
            "one".to_string(),
            relation_from_operation(len, 0, |_| Some(top))?,
        ),
    ];
    RelationalStructure::new(chain_labels(n), relations)
}

/// A relation as read from text, before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRelation {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Vec<String>>,
}

/// A structure as read from text, before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawStructure {
    pub carrier: Vec<String>,
    pub relations: Vec<RawRelation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateCarrierLabel(String),
    DuplicateRelation(String),
    WrongLength {
        relation: String,
        tuple: Vec<String>,
        expected: usize,
    },
    UnknownLabel {
        relation: String,
        tuple: Vec<String>,
        label: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateCarrierLabel(l) => write!(f, "duplicate carrier label `{l}`"),
            Violation::DuplicateRelation(r) => write!(f, "duplicate relation `{r}`"),
            Violation::WrongLength {
                relation,
                tuple,
                expected,
            } => write!(
                f,
                "relation `{relation}`: tuple ({}) has {} entries, expected {expected}",
                tuple.join(" "),
                tuple.len()
            ),
            Violation::UnknownLabel {
                relation,
                tuple,
                label,
            } => write!(
                f,
                "relation `{relation}`: tuple ({}) mentions unknown element `{label}`",
                tuple.join(" ")
            ),
        }
    }
}

/// Every arity and carrier-membership violation in a raw structure.
pub fn validate_structure(raw: &RawStructure) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for c in &raw.carrier {
        if !seen.insert(c.as_str()) {
            out.push(Violation::DuplicateCarrierLabel(c.clone()));
        }
    }
    let mut names = BTreeSet::new();
    for r in &raw.relations {
        if !names.insert(r.name.as_str()) {
            out.push(Violation::DuplicateRelation(r.name.clone()));
        }
        for t in &r.tuples {
            if t.len() != r.arity + 1 {
                out.push(Violation::WrongLength {
                    relation: r.name.clone(),
                    tuple: t.clone(),
                    expected: r.arity + 1,
                });
            }
            for l in t {
                if !seen.contains(l.as_str()) {
                    out.push(Violation::UnknownLabel {
                        relation: r.name.clone(),
                        tuple: t.clone(),
                        label: l.clone(),
                    });
                }
            }
        }
    }
    out
}

impl TryFrom<RawStructure> for RelationalStructure {
    type Error = Error;

    fn try_from(raw: RawStructure) -> Result<Self> {
        let violations = validate_structure(&raw);
        if !violations.is_empty() {
            return input(violations.iter().join("; "));
        }
        let index: HashMap<&str, usize> = raw
            .carrier
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let n = raw.carrier.len();
        let relations = raw
            .relations
            .iter()
            .map(|r| {
                let tuples = r
                    .tuples
                    .iter()
                    .map(|t| t.iter().map(|l| index[l.as_str()]).collect());
                Ok((r.name.clone(), Relation::new(n, r.arity, tuples)?))
            })
            .collect::<Result<Vec<_>>>()?;
        RelationalStructure::new(raw.carrier.clone(), relations)
    }
}
