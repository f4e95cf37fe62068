//! Terms and equations over a signature, evaluated in any algebra of that
//! type, with exhaustive satisfaction checking on finite algebras.
//!
//! Terms are written in prefix form: a bare identifier is a variable and
//! `(f t1 … tn)` applies symbol `f`. Constants are written `(c)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::complex::ComplexAlgebra;
use crate::convolution::ConvolutionAlgebra;
use crate::error::{input, Error, Result};
use crate::lattice::HeytingLattice;
use crate::relstruct::{RelationalStructure, Signature};

/// An algebra whose operations are indexed by a [`Signature`].
pub trait Algebra {
    type Value: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn signature(&self) -> &Signature;

    fn apply(&self, symbol: usize, args: &[&Self::Value]) -> Result<Self::Value>;

    /// Human-readable rendering, used for counterexamples.
    fn render(&self, v: &Self::Value) -> String;
}

/// An algebra with an enumerable carrier `{element(0), element(1), …}`.
pub trait FiniteAlgebra: Algebra + Sync {
    fn cardinality(&self) -> u128;

    fn element(&self, index: u64) -> Self::Value;

    fn index_of(&self, value: &Self::Value) -> u64;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn app(symbol: &str, args: Vec<Term>) -> Self {
        Term::App(symbol.to_string(), args)
    }

    /// Variables have depth 0; an application is one deeper than its
    /// deepest argument.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Checks symbols and arities against a signature.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let j = sig
                    .index_of(f)
                    .ok_or_else(|| Error::Input(format!("unknown symbol `{f}`")))?;
                if sig.arity(j) != args.len() {
                    return input(format!(
                        "`{f}` takes {} arguments, got {}",
                        sig.arity(j),
                        args.len()
                    ));
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) => {
                write!(f, "({s}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        let mut v = self.lhs.variables();
        v.extend(self.rhs.variables());
        v
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        self.lhs.check(sig)?;
        self.rhs.check(sig)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Eq,
    Ident(String),
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<Token>| {
        if !cur.is_empty() {
            out.push(Token::Ident(std::mem::take(cur)));
        }
    };
    for c in text.chars() {
        match c {
            '(' | ')' | '=' => {
                flush(&mut cur, &mut out);
                out.push(match c {
                    '(' => Token::Open,
                    ')' => Token::Close,
                    _ => Token::Eq,
                });
            }
            c if c.is_whitespace() => flush(&mut cur, &mut out),
            c => cur.push(c),
        }
    }
    flush(&mut cur, &mut out);
    out
}

fn parse_term(tokens: &[Token], pos: &mut usize) -> Result<Term> {
    match tokens.get(*pos) {
        Some(Token::Ident(v)) => {
            *pos += 1;
            Ok(Term::Var(v.clone()))
        }
        Some(Token::Open) => {
            *pos += 1;
            let Some(Token::Ident(f)) = tokens.get(*pos) else {
                return input("expected a symbol after `(`");
            };
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some(Token::Close) => {
                        *pos += 1;
                        return Ok(Term::App(f.clone(), args));
                    }
                    None => return input("unbalanced parentheses"),
                    _ => args.push(parse_term(tokens, pos)?),
                }
            }
        }
        Some(t) => input(format!("unexpected token {t:?}")),
        None => input("unexpected end of term"),
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let t = parse_term(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return input("trailing input after term");
        }
        Ok(t)
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let lhs = parse_term(&tokens, &mut pos)?;
        if tokens.get(pos) != Some(&Token::Eq) {
            return input("expected `=` between the two sides");
        }
        pos += 1;
        let rhs = parse_term(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return input("trailing input after equation");
        }
        Ok(Equation { lhs, rhs })
    }
}

/// Evaluates `t` under `env` by structural recursion.
pub fn eval_term<A: Algebra>(
    alg: &A,
    t: &Term,
    env: &HashMap<String, A::Value>,
) -> Result<A::Value> {
    match t {
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| Error::Input(format!("unbound variable `{v}`"))),
        Term::App(f, args) => {
            let j = alg
                .signature()
                .index_of(f)
                .ok_or_else(|| Error::Input(format!("unknown symbol `{f}`")))?;
            let vals = args
                .iter()
                .map(|a| eval_term(alg, a, env))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&A::Value> = vals.iter().collect();
            alg.apply(j, &refs)
        }
    }
}

/// Result of [`holds_in`].
#[derive(Clone, Debug, PartialEq)]
pub enum Satisfaction<V> {
    Holds,
    /// The lexicographically first falsifying assignment.
    Fails {
        assignment: Vec<(String, V)>,
        lhs: V,
        rhs: V,
    },
}

impl<V> Satisfaction<V> {
    pub fn holds(&self) -> bool {
        matches!(self, Satisfaction::Holds)
    }
}

/// Operation tables are built when `|A|^arity` is at most this.
const TABLE_LIMIT: u128 = 1 << 22;

#[derive(Clone, Copy)]
enum Node {
    Var(usize),
    App {
        symbol: usize,
        first: usize,
        len: usize,
    },
}

/// Both sides of an equation compiled into one shared DAG over element
/// indices. Nodes are topologically ordered; `level[i]` is the largest
/// variable position node `i` depends on and `deps[i]` the set of all of
/// them as a bitmask.
struct Compiled {
    nodes: Vec<Node>,
    children: Vec<usize>,
    level: Vec<Option<usize>>,
    deps: Vec<u64>,
    lhs: usize,
    rhs: usize,
}

impl Compiled {
    fn new(eq: &Equation, sig: &Signature, vars: &[&str]) -> Self {
        let mut c = Compiled {
            nodes: Vec::new(),
            children: Vec::new(),
            level: Vec::new(),
            deps: Vec::new(),
            lhs: 0,
            rhs: 0,
        };
        let mut memo: HashMap<Term, usize> = HashMap::new();
        c.lhs = c.add(&eq.lhs, sig, vars, &mut memo);
        c.rhs = c.add(&eq.rhs, sig, vars, &mut memo);
        c
    }

    fn add(
        &mut self,
        t: &Term,
        sig: &Signature,
        vars: &[&str],
        memo: &mut HashMap<Term, usize>,
    ) -> usize {
        if let Some(&id) = memo.get(t) {
            return id;
        }
        let (node, level, deps) = match t {
            Term::Var(v) => {
                let p = vars
                    .iter()
                    .position(|x| x == v)
                    .expect("variable collected");
                (Node::Var(p), Some(p), 1u64 << p)
            }
            Term::App(f, args) => {
                let ids: Vec<usize> = args.iter().map(|a| self.add(a, sig, vars, memo)).collect();
                let level = ids.iter().filter_map(|&i| self.level[i]).max();
                let deps = ids.iter().fold(0, |acc, &i| acc | self.deps[i]);
                let first = self.children.len();
                self.children.extend(&ids);
                let symbol = sig.index_of(f).expect("equation checked");
                (
                    Node::App {
                        symbol,
                        first,
                        len: ids.len(),
                    },
                    level,
                    deps,
                )
            }
        };
        self.nodes.push(node);
        self.level.push(level);
        self.deps.push(deps);
        memo.insert(t.clone(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }
}

enum OpTable {
    Table(Vec<u32>),
    Direct,
}

struct IndexedAlgebra<'a, A: FiniteAlgebra> {
    alg: &'a A,
    card: u64,
    tables: Vec<OpTable>,
}

impl<'a, A: FiniteAlgebra> IndexedAlgebra<'a, A> {
    fn new(alg: &'a A, symbols: &BTreeSet<usize>) -> Result<Self> {
        let card = alg.cardinality();
        if card > u32::MAX as u128 {
            return Err(Error::Capacity {
                what: "algebra elements",
                needed: card,
                bound: u32::MAX as u128,
            });
        }
        let card = card as u64;
        let sig = alg.signature();
        let tables = (0..sig.len())
            .map(|j| {
                let arity = sig.arity(j);
                let size = (card as u128).checked_pow(arity as u32);
                match size {
                    Some(size) if symbols.contains(&j) && size <= TABLE_LIMIT => {
                        let table = (0..size as u64)
                            .into_par_iter()
                            .map(|mut k| {
                                let mut args = vec![0u64; arity];
                                for slot in args.iter_mut().rev() {
                                    *slot = k % card;
                                    k /= card;
                                }
                                let vals: Vec<A::Value> =
                                    args.iter().map(|&i| alg.element(i)).collect();
                                let refs: Vec<&A::Value> = vals.iter().collect();
                                alg.apply(j, &refs).map(|v| alg.index_of(&v) as u32)
                            })
                            .collect::<Result<Vec<u32>>>()?;
                        Ok(OpTable::Table(table))
                    }
                    _ => Ok(OpTable::Direct),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IndexedAlgebra { alg, card, tables })
    }

    fn apply(&self, symbol: usize, args: &[u32]) -> u32 {
        match &self.tables[symbol] {
            OpTable::Table(t) => {
                let k = args.iter().fold(0u64, |acc, &a| acc * self.card + a as u64);
                t[k as usize]
            }
            OpTable::Direct => {
                let vals: Vec<A::Value> =
                    args.iter().map(|&i| self.alg.element(i as u64)).collect();
                let refs: Vec<&A::Value> = vals.iter().collect();
                let v = self
                    .alg
                    .apply(symbol, &refs)
                    .expect("arguments are valid elements");
                self.alg.index_of(&v) as u32
            }
        }
    }

    /// First falsifying assignment with `assign[0] == head`, scanning the
    /// remaining variables lexicographically.
    fn search(&self, c: &Compiled, nvars: usize, head: u32) -> Option<Vec<u32>> {
        if nvars >= 2 {
            return self.search_columns(c, nvars, head);
        }
        let mut assign = vec![head];
        let mut vals = vec![0u32; c.nodes.len()];
        self.eval_scalars(c, &assign, &mut vals, 0, true, &|_| false);
        (vals[c.lhs] != vals[c.rhs]).then(|| std::mem::take(&mut assign))
    }

    /// Like [`Self::search`], but evaluates every node that depends on the
    /// last variable as a whole column over that variable's values. Columns
    /// that depend on the last variable alone are computed once.
    fn search_columns(&self, c: &Compiled, nvars: usize, head: u32) -> Option<Vec<u32>> {
        let last = nvars - 1;
        let only_last = 1u64 << last;
        let card = self.card as usize;
        let is_column = |i: usize| c.deps[i] & only_last != 0;
        let mut assign = vec![0u32; nvars];
        assign[0] = head;
        let mut scalars = vec![0u32; c.nodes.len()];
        let mut columns: Vec<Vec<u32>> = vec![Vec::new(); c.nodes.len()];
        self.eval_scalars(c, &assign, &mut scalars, 0, true, &is_column);
        for i in (0..c.nodes.len()).filter(|&i| c.deps[i] == only_last) {
            self.eval_column(c, i, only_last, &scalars, &mut columns);
        }
        loop {
            for i in (0..c.nodes.len()).filter(|&i| is_column(i) && c.deps[i] != only_last) {
                self.eval_column(c, i, only_last, &scalars, &mut columns);
            }
            let side = |i: usize, k: usize| {
                if is_column(i) {
                    columns[i][k]
                } else {
                    scalars[i]
                }
            };
            if let Some(k) = (0..card).find(|&k| side(c.lhs, k) != side(c.rhs, k)) {
                assign[last] = k as u32;
                return Some(assign);
            }
            let mut p = last;
            loop {
                if p == 1 {
                    return None;
                }
                p -= 1;
                assign[p] += 1;
                if (assign[p] as usize) < card {
                    break;
                }
                assign[p] = 0;
            }
            self.eval_scalars(c, &assign, &mut scalars, p, false, &is_column);
        }
    }

    fn eval_scalars(
        &self,
        c: &Compiled,
        assign: &[u32],
        vals: &mut [u32],
        from: usize,
        all: bool,
        skip: &impl Fn(usize) -> bool,
    ) {
        let mut buf: Vec<u32> = Vec::new();
        for (i, node) in c.nodes.iter().enumerate() {
            let dirty = match c.level[i] {
                Some(l) => l >= from,
                None => all,
            };
            if !dirty || skip(i) {
                continue;
            }
            vals[i] = match *node {
                Node::Var(p) => assign[p],
                Node::App { symbol, first, len } => {
                    buf.clear();
                    buf.extend(c.children[first..first + len].iter().map(|&ch| vals[ch]));
                    self.apply(symbol, &buf)
                }
            };
        }
    }

    fn eval_column(
        &self,
        c: &Compiled,
        i: usize,
        only_last: u64,
        scalars: &[u32],
        columns: &mut [Vec<u32>],
    ) {
        let card = self.card as usize;
        let (done, rest) = columns.split_at_mut(i);
        let out = &mut rest[0];
        out.resize(card, 0);
        let Node::App { symbol, first, len } = c.nodes[i] else {
            out.iter_mut().enumerate().for_each(|(k, v)| *v = k as u32);
            return;
        };
        let kids = &c.children[first..first + len];
        let column = |ch: usize| (c.deps[ch] & only_last != 0).then(|| done[ch].as_slice());
        match (&self.tables[symbol], kids) {
            (OpTable::Table(t), &[a]) => {
                let a = column(a).expect("column node has a column child");
                out.iter_mut().zip(a).for_each(|(v, &x)| *v = t[x as usize]);
            }
            (OpTable::Table(t), &[a, b]) => match (column(a), column(b)) {
                (Some(a), Some(b)) => out
                    .iter_mut()
                    .zip(a.iter().zip(b))
                    .for_each(|(v, (&x, &y))| *v = t[x as usize * card + y as usize]),
                (Some(a), None) => {
                    let y = scalars[b] as usize;
                    out.iter_mut()
                        .zip(a)
                        .for_each(|(v, &x)| *v = t[x as usize * card + y]);
                }
                (None, Some(b)) => {
                    let row = &t[scalars[a] as usize * card..][..card];
                    out.iter_mut()
                        .zip(b)
                        .for_each(|(v, &y)| *v = row[y as usize]);
                }
                (None, None) => unreachable!("column node has a column child"),
            },
            _ => {
                let mut buf = Vec::with_capacity(len);
                for k in 0..card {
                    buf.clear();
                    buf.extend(
                        kids.iter()
                            .map(|&ch| column(ch).map_or(scalars[ch], |col| col[k])),
                    );
                    out[k] = self.apply(symbol, &buf);
                }
            }
        }
    }
}

/// Decides whether `eq` holds under every assignment of elements to its
/// variables. Variables are ordered by name and elements by index, and the
/// first falsifying assignment in that lexicographic order is returned.
pub fn holds_in<A: FiniteAlgebra>(
    alg: &A,
    eq: &Equation,
    bound: u128,
) -> Result<Satisfaction<A::Value>> {
    eq.check(alg.signature())?;
    let vars: Vec<&str> = eq.variables().into_iter().collect();
    let card = alg.cardinality();
    let needed = card.checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    if needed > bound {
        return Err(Error::Capacity {
            what: "variable assignments",
            needed,
            bound,
        });
    }
    if vars.is_empty() {
        let env = HashMap::new();
        let lhs = eval_term(alg, &eq.lhs, &env)?;
        let rhs = eval_term(alg, &eq.rhs, &env)?;
        return Ok(if lhs == rhs {
            Satisfaction::Holds
        } else {
            Satisfaction::Fails {
                assignment: Vec::new(),
                lhs,
                rhs,
            }
        });
    }
    if card == 0 {
        return Ok(Satisfaction::Holds);
    }
    let mut symbols = BTreeSet::new();
    collect_symbols(&eq.lhs, alg.signature(), &mut symbols);
    collect_symbols(&eq.rhs, alg.signature(), &mut symbols);
    let indexed = IndexedAlgebra::new(alg, &symbols)?;
    let compiled = Compiled::new(eq, alg.signature(), &vars);

    let found = (0..indexed.card as u32)
        .into_par_iter()
        .find_map_first(|head| indexed.search(&compiled, vars.len(), head));

    Ok(match found {
        None => Satisfaction::Holds,
        Some(assign) => {
            let assignment: Vec<(String, A::Value)> = vars
                .iter()
                .zip(&assign)
                .map(|(v, &i)| (v.to_string(), alg.element(i as u64)))
                .collect();
            let env: HashMap<String, A::Value> = assignment.iter().cloned().collect();
            Satisfaction::Fails {
                lhs: eval_term(alg, &eq.lhs, &env)?,
                rhs: eval_term(alg, &eq.rhs, &env)?,
                assignment,
            }
        }
    })
}

fn collect_symbols(t: &Term, sig: &Signature, out: &mut BTreeSet<usize>) {
    if let Term::App(f, args) = t {
        if let Some(j) = sig.index_of(f) {
            out.insert(j);
        }
        args.iter().for_each(|a| collect_symbols(a, sig, out));
    }
}

/// Per-equation outcome of [`same_equations_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct EquationOutcome {
    pub equation: Equation,
    pub in_convolution: bool,
    pub in_complex: bool,
    /// Rendered counterexample in `L^X`, if any.
    pub convolution_witness: Option<String>,
    /// Rendered counterexample in `X⁺`, if any.
    pub complex_witness: Option<String>,
}

impl EquationOutcome {
    pub fn agrees(&self) -> bool {
        self.in_convolution == self.in_complex
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SameEquationsReport {
    pub outcomes: Vec<EquationOutcome>,
}

impl SameEquationsReport {
    /// True when no equation separates `L^X` from `X⁺`.
    pub fn agrees(&self) -> bool {
        self.outcomes.iter().all(EquationOutcome::agrees)
    }
}

fn witness<A: Algebra>(alg: &A, s: &Satisfaction<A::Value>) -> Option<String> {
    match s {
        Satisfaction::Holds => None,
        Satisfaction::Fails {
            assignment,
            lhs,
            rhs,
        } => {
            let parts: Vec<String> = assignment
                .iter()
                .map(|(v, x)| format!("{v}={}", alg.render(x)))
                .collect();
            Some(format!(
                "{} gives {} vs {}",
                parts.join(" "),
                alg.render(lhs),
                alg.render(rhs)
            ))
        }
    }
}

/// Checks every equation in both `L^X` and `X⁺` and records whether the
/// two algebras agree on it.
pub fn same_equations_report(
    l: &HeytingLattice,
    s: &RelationalStructure,
    eqs: &[Equation],
    bound: u128,
) -> Result<SameEquationsReport> {
    if l.size() < 2 {
        return Err(Error::Precondition(
            "the lattice must have at least two elements".into(),
        ));
    }
    let conv = ConvolutionAlgebra::new(l, s);
    let complex = ComplexAlgebra::new(s);
    let outcomes = eqs
        .iter()
        .map(|eq| {
            let c = holds_in(&conv, eq, bound)?;
            let p = holds_in(&complex, eq, bound)?;
            Ok(EquationOutcome {
                equation: eq.clone(),
                in_convolution: c.holds(),
                in_complex: p.holds(),
                convolution_witness: witness(&conv, &c),
                complex_witness: witness(&complex, &p),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SameEquationsReport { outcomes })
}

/// Limits for [`random_equation`].
#[derive(Clone, Copy, Debug)]
pub struct EquationShape {
    pub max_depth: usize,
    pub max_vars: usize,
}

impl Default for EquationShape {
    fn default() -> Self {
        EquationShape {
            max_depth: 3,
            max_vars: 3,
        }
    }
}

fn var_name(i: usize, max_vars: usize) -> String {
    const NAMES: [&str; 3] = ["u", "v", "w"];
    if max_vars <= NAMES.len() {
        NAMES[i].to_string()
    } else {
        format!("v{i}")
    }
}

fn random_term(
    sig: &Signature,
    rng: &mut impl Rng,
    depth: usize,
    shape: &EquationShape,
    top: bool,
) -> Term {
    let var = |rng: &mut _| {
        Term::Var(var_name(
            Rng::gen_range(rng, 0..shape.max_vars),
            shape.max_vars,
        ))
    };
    if depth == 0 || sig.is_empty() || (!top && rng.gen_ratio(1, 3)) {
        return var(rng);
    }
    let pick = rng.gen_range(0..sig.len());
    let args = (0..sig.arity(pick))
        .map(|_| random_term(sig, rng, depth - 1, shape, false))
        .collect();
    Term::App(sig.name(pick).to_string(), args)
}

/// A random equation whose sides have depth at most `shape.max_depth` and
/// use at most `shape.max_vars` variables. Both sides are applications
/// when `max_depth > 0`; below the root a variable is chosen with
/// probability 1/3, otherwise a symbol uniformly.
pub fn random_equation(sig: &Signature, rng: &mut impl Rng, shape: &EquationShape) -> Equation {
    let shape = EquationShape {
        max_vars: shape.max_vars.max(1),
        ..*shape
    };
    Equation {
        lhs: random_term(sig, rng, shape.max_depth, &shape, true),
        rhs: random_term(sig, rng, shape.max_depth, &shape, true),
    }
}
