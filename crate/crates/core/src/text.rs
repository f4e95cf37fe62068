//! Line-oriented text formats. `#` starts a comment everywhere; blank lines
//! are ignored. Parse errors carry 1-based line numbers.
//!
//! Topology:
//!
//! ```text
//! points: a b c
//! open: b
//! open: a b
//! ```
//!
//! Structure:
//!
//! ```text
//! carrier: x1 x2 x3 x4
//! relation R arity 2
//! x1 x1 x1
//! x2 x2 x3
//! ```
//!
//! Lattice map (and étalé subobject): `x1 -> {t1 t2}` or `x1 -> 3/4`.
//!
//! Step function: `point 1/3 -> 1` and `interval (1/3,2/3) -> 1/2`; pieces
//! that are not mentioned are 0.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::complex::CarrierSubset;
use crate::convolution::LatticeMap;
use crate::error::{Error, Result};
use crate::lattice::{Elem, FiniteLattice, FiniteTopology};
use crate::relstruct::{RawRelation, RawStructure, RelationalStructure};
use crate::terms::Equation;
use crate::type2::{StepFunction, Q};

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

/// Re-tags a location-free error with a line number.
fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        Error::Input(msg) | Error::Precondition(msg) => Error::Parse { line, msg },
        other => Error::Parse {
            line,
            msg: other.to_string(),
        },
    })
}

/// Non-empty lines with comments stripped, paired with line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn keyword<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key)?
        .trim_start()
        .strip_prefix(':')
        .map(str::trim)
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

pub fn parse_topology(text: &str) -> Result<FiniteTopology> {
    let mut points: Option<(usize, Vec<String>)> = None;
    let mut generators = Vec::new();
    for (n, line) in lines(text) {
        if let Some(rest) = keyword(line, "points") {
            if points.is_some() {
                return perr(n, "duplicate `points:` line");
            }
            points = Some((n, words(rest)));
        } else if let Some(rest) = keyword(line, "open") {
            let Some((_, pts)) = &points else {
                return perr(n, "`open:` before `points:`");
            };
            let g = words(rest);
            if let Some(bad) = g.iter().find(|l| !pts.contains(l)) {
                return perr(n, format!("unknown point `{bad}`"));
            }
            generators.push(g);
        } else {
            return perr(n, format!("expected `points:` or `open:`, got `{line}`"));
        }
    }
    let Some((n, points)) = points else {
        return perr(1, "missing `points:` line");
    };
    at(n, FiniteTopology::generate(points, &generators))
}

/// Parses without checking tuples against the carrier.
pub fn parse_raw_structure(text: &str) -> Result<RawStructure> {
    let mut raw = RawStructure::default();
    let mut carrier_seen = false;
    for (n, line) in lines(text) {
        if let Some(rest) = keyword(line, "carrier") {
            if carrier_seen {
                return perr(n, "duplicate `carrier:` line");
            }
            carrier_seen = true;
            raw.carrier = words(rest);
        } else if let Some(rest) = line.strip_prefix("relation ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let [name, "arity", k] = parts[..] else {
                return perr(n, "expected `relation <name> arity <n>`");
            };
            let arity = k.parse().or_else(|_| perr(n, format!("bad arity `{k}`")))?;
            raw.relations.push(RawRelation {
                name: name.to_string(),
                arity,
                tuples: Vec::new(),
            });
        } else {
            let Some(r) = raw.relations.last_mut() else {
                return perr(n, format!("tuple `{line}` outside a relation block"));
            };
            r.tuples.push(words(line));
        }
    }
    if !carrier_seen {
        return perr(1, "missing `carrier:` line");
    }
    Ok(raw)
}

/// Parses and validates, reporting the first offending line.
pub fn parse_structure(text: &str) -> Result<RelationalStructure> {
    let raw = parse_raw_structure(text)?;
    let carrier: BTreeSet<&str> = raw.carrier.iter().map(String::as_str).collect();
    // walk again to attach line numbers to tuple violations
    let mut current: Option<&RawRelation> = None;
    let mut rel = 0;
    for (n, line) in lines(text) {
        if keyword(line, "carrier").is_some() {
            continue;
        }
        if line.starts_with("relation ") {
            current = raw.relations.get(rel);
            rel += 1;
            continue;
        }
        let r = current.expect("tuples follow a relation header");
        let t = words(line);
        if t.len() != r.arity + 1 {
            return perr(
                n,
                format!(
                    "relation `{}` needs {} entries per tuple, got {}",
                    r.name,
                    r.arity + 1,
                    t.len()
                ),
            );
        }
        if let Some(bad) = t.iter().find(|l| !carrier.contains(l.as_str())) {
            return perr(n, format!("unknown carrier element `{bad}`"));
        }
    }
    at(1, RelationalStructure::try_from(raw))
}

/// One `x -> value` line per carrier element.
pub fn parse_lattice_map(
    l: &FiniteLattice,
    s: &RelationalStructure,
    text: &str,
) -> Result<LatticeMap> {
    let mut values: Vec<Option<Elem>> = vec![None; s.carrier_len()];
    let mut last = 1;
    for (n, line) in lines(text) {
        last = n;
        let Some((x, v)) = line.split_once("->") else {
            return perr(n, "expected `<element> -> <value>`");
        };
        let x = x.trim();
        let Some(i) = s.index_of(x) else {
            return perr(n, format!("unknown carrier element `{x}`"));
        };
        if values[i].is_some() {
            return perr(n, format!("`{x}` assigned twice"));
        }
        values[i] = Some(at(n, l.parse_elem(v))?);
    }
    let missing: Vec<&str> = (0..values.len())
        .filter(|&i| values[i].is_none())
        .map(|i| s.label(i))
        .collect();
    if !missing.is_empty() {
        return perr(last, format!("no value for {}", missing.join(", ")));
    }
    Ok(LatticeMap::new(values.into_iter().flatten().collect()))
}

/// A subset literal such as `{x1 x3}`.
pub fn parse_subset(s: &RelationalStructure, text: &str) -> Result<CarrierSubset> {
    let t = text.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| {
            Error::Input(format!(
                "expected a subset literal like {{x1 x3}}, got `{t}`"
            ))
        })?;
    let labels: Vec<&str> = inner.split_whitespace().collect();
    CarrierSubset::from_labels(s, &labels)
}

/// One equation per line.
pub fn parse_equations(text: &str) -> Result<Vec<Equation>> {
    lines(text)
        .map(|(n, line)| at(n, line.parse::<Equation>()))
        .collect()
}

fn parse_q(n: usize, s: &str) -> Result<Q> {
    s.trim()
        .parse()
        .or_else(|_| perr(n, format!("expected a rational, got `{}`", s.trim())))
}

pub fn parse_step_function(text: &str) -> Result<StepFunction> {
    let mut points: BTreeMap<Q, Q> = BTreeMap::new();
    let mut intervals: Vec<(usize, Q, Q, Q)> = Vec::new();
    for (n, line) in lines(text) {
        let Some((lhs, v)) = line.split_once("->") else {
            return perr(
                n,
                "expected `point <x> -> <v>` or `interval (<a>,<b>) -> <v>`",
            );
        };
        let v = parse_q(n, v)?;
        if v < Q::zero() || v > Q::one() {
            return perr(n, format!("value {v} is outside [0,1]"));
        }
        let lhs = lhs.trim();
        if let Some(x) = lhs.strip_prefix("point") {
            let x = parse_q(n, x)?;
            if x < Q::zero() || x > Q::one() {
                return perr(n, format!("point {x} is outside [0,1]"));
            }
            if points.insert(x, v).is_some() {
                return perr(n, format!("point {x} given twice"));
            }
        } else if let Some(iv) = lhs.strip_prefix("interval") {
            let Some((a, b)) = iv
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.split_once(','))
            else {
                return perr(n, "expected `interval (<a>,<b>)`");
            };
            let (a, b) = (parse_q(n, a)?, parse_q(n, b)?);
            if !(Q::zero() <= a && a < b && b <= Q::one()) {
                return perr(n, format!("bad interval ({a},{b})"));
            }
            intervals.push((n, a, b, v));
        } else {
            return perr(n, format!("unknown piece `{lhs}`"));
        }
    }
    let mut breaks: BTreeSet<Q> = [Q::zero(), Q::one()].into();
    breaks.extend(points.keys().copied());
    for &(_, a, b, _) in &intervals {
        breaks.insert(a);
        breaks.insert(b);
    }
    let breaks: Vec<Q> = breaks.into_iter().collect();
    let mut pv: Vec<Option<Q>> = breaks.iter().map(|b| points.get(b).copied()).collect();
    let mut iv: Vec<Option<Q>> = vec![None; breaks.len() - 1];
    for &(n, a, b, v) in &intervals {
        let lo = breaks.binary_search(&a).expect("endpoint is a breakpoint");
        let hi = breaks.binary_search(&b).expect("endpoint is a breakpoint");
        for i in lo..hi {
            if iv[i].replace(v).is_some_and(|old| old != v) {
                return perr(n, format!("interval ({a},{b}) overlaps another interval"));
            }
            if i > lo && pv[i].replace(v).is_some_and(|old| old != v) {
                return perr(
                    n,
                    format!("interval ({a},{b}) conflicts with point {}", breaks[i]),
                );
            }
        }
    }
    StepFunction::normalized(
        breaks,
        pv.into_iter().map(Option::unwrap_or_default).collect(),
        iv.into_iter().map(Option::unwrap_or_default).collect(),
    )
}
