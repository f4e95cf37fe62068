//! Exact operations of the type-2 fuzzy truth value algebra on step
//! functions `[0,1] → [0,1]`.
//!
//! The operations are convolutions of `([0,1], ∧, ∨, ¬, 0, 1)`:
//!
//! ```text
//! (α ⊔ β)(x) = ⋁ { α(y) ∧ β(z) | y ∨ z = x }
//! (α ⊓ β)(x) = ⋁ { α(y) ∧ β(z) | y ∧ z = x }
//! ¬α(x)      = ⋁ { α(y) | 1 - y = x }
//! ```
//!
//! On a chain, `y ∨ z = x` means `y = x, z ≤ x` or `z = x, y ≤ x`, which
//! gives the closed form
//!
//! ```text
//! (α ⊔ β)(x) = (α(x) ∧ sup_{z ≤ x} β(z)) ∨ (sup_{y ≤ x} α(y) ∧ β(x))
//! ```
//!
//! and dually for `⊓` with suprema over `[x, 1]`. Since `1 - y = x` has the
//! single solution `y = 1 - x`, negation is reflection. Step functions are
//! closed under all three, so everything here is exact.
//!
//! [`grid_conv_oracle`] evaluates the defining suprema by brute force on a
//! finite chain and serves as the independent check of the closed forms.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::Rng;

use crate::convolution::{conv_op, LatticeMap};
use crate::error::{input, Error, Result};
use crate::lattice::HeytingLattice;
use crate::relstruct::interval_structure;

pub type Q = Rational64;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn in_unit(v: Q) -> bool {
    v >= Q::zero() && v <= Q::one()
}

/// A piecewise-constant function on `[0,1]` with rational breakpoints
/// `0 = b_0 < … < b_k = 1`, a value at each breakpoint and a value on each
/// open interval `(b_i, b_{i+1})`.
///
/// Always canonical: no interior breakpoint whose value equals both
/// neighbouring interval values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breaks: Vec<Q>,
    points: Vec<Q>,
    intervals: Vec<Q>,
}

fn validate(breaks: &[Q], points: &[Q], intervals: &[Q]) -> Result<()> {
    if breaks.len() < 2 || breaks[0] != Q::zero() || breaks[breaks.len() - 1] != Q::one() {
        return input("breakpoints must start at 0 and end at 1");
    }
    if breaks.windows(2).any(|w| w[0] >= w[1]) {
        return input("breakpoints must be strictly increasing");
    }
    if points.len() != breaks.len() || intervals.len() + 1 != breaks.len() {
        return input("one value per breakpoint and per interval is required");
    }
    if let Some(v) = points.iter().chain(intervals).find(|&&v| !in_unit(v)) {
        return input(format!("value {v} is outside [0,1]"));
    }
    Ok(())
}

fn redundant(points: &[Q], intervals: &[Q], i: usize) -> bool {
    points[i] == intervals[i - 1] && points[i] == intervals[i]
}

impl StepFunction {
    /// Accepts only canonical input.
    pub fn new(breaks: Vec<Q>, points: Vec<Q>, intervals: Vec<Q>) -> Result<Self> {
        validate(&breaks, &points, &intervals)?;
        if let Some(i) = (1..breaks.len() - 1).find(|&i| redundant(&points, &intervals, i)) {
            return input(format!(
                "non-canonical step function: breakpoint {} is redundant",
                breaks[i]
            ));
        }
        Ok(StepFunction {
            breaks,
            points,
            intervals,
        })
    }

    /// Validates and drops redundant breakpoints.
    pub fn normalized(breaks: Vec<Q>, points: Vec<Q>, intervals: Vec<Q>) -> Result<Self> {
        validate(&breaks, &points, &intervals)?;
        Ok(Self::canonical(breaks, points, intervals))
    }

    fn canonical(breaks: Vec<Q>, points: Vec<Q>, intervals: Vec<Q>) -> Self {
        let k = breaks.len() - 1;
        let mut b = vec![breaks[0]];
        let mut p = vec![points[0]];
        let mut iv = Vec::new();
        for i in 1..k {
            if redundant(&points, &intervals, i) {
                continue;
            }
            iv.push(intervals[i - 1]);
            b.push(breaks[i]);
            p.push(points[i]);
        }
        iv.push(intervals[k - 1]);
        b.push(breaks[k]);
        p.push(points[k]);
        StepFunction {
            breaks: b,
            points: p,
            intervals: iv,
        }
    }

    pub fn constant(c: Q) -> Result<Self> {
        Self::new(vec![Q::zero(), Q::one()], vec![c, c], vec![c])
    }

    /// `0̲`: 1 at 0 and 0 elsewhere.
    pub fn zero() -> Self {
        StepFunction {
            breaks: vec![Q::zero(), Q::one()],
            points: vec![Q::one(), Q::zero()],
            intervals: vec![Q::zero()],
        }
    }

    /// `1̲`: 1 at 1 and 0 elsewhere.
    pub fn one() -> Self {
        StepFunction {
            breaks: vec![Q::zero(), Q::one()],
            points: vec![Q::zero(), Q::one()],
            intervals: vec![Q::zero()],
        }
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breaks
    }

    pub fn point_values(&self) -> &[Q] {
        &self.points
    }

    pub fn interval_values(&self) -> &[Q] {
        &self.intervals
    }

    /// Value at `x ∈ [0,1]`.
    pub fn eval(&self, x: Q) -> Result<Q> {
        if !in_unit(x) {
            return input(format!("{x} is outside [0,1]"));
        }
        Ok(match self.breaks.binary_search(&x) {
            Ok(i) => self.points[i],
            Err(i) => self.intervals[i - 1],
        })
    }

    /// Values on a finer partition containing every breakpoint of `self`.
    fn refine(&self, breaks: &[Q]) -> Pieces {
        let points = breaks
            .iter()
            .map(|&b| self.eval(b).expect("breakpoints lie in [0,1]"))
            .collect();
        let intervals = breaks
            .windows(2)
            .map(|w| {
                self.eval((w[0] + w[1]) / q(2, 1))
                    .expect("midpoints lie in [0,1]")
            })
            .collect();
        (points, intervals)
    }

    /// `x ↦ sup { f(y) : y ≤ x }`.
    pub fn sup_left(&self) -> StepFunction {
        let (p, iv) = sweep_left(&self.points, &self.intervals);
        Self::canonical(self.breaks.clone(), p, iv)
    }

    /// `x ↦ sup { f(y) : y ≥ x }`.
    pub fn sup_right(&self) -> StepFunction {
        let (p, iv) = sweep_right(&self.points, &self.intervals);
        Self::canonical(self.breaks.clone(), p, iv)
    }

    /// Renders in the `point …` / `interval (…) -> …` text format.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.breaks.len() {
            writeln!(f, "point {} -> {}", self.breaks[i], self.points[i])?;
            if i + 1 < self.breaks.len() {
                writeln!(
                    f,
                    "interval ({},{}) -> {}",
                    self.breaks[i],
                    self.breaks[i + 1],
                    self.intervals[i]
                )?;
            }
        }
        Ok(())
    }
}

/// Values at breakpoints and on the intervals between them.
type Pieces = (Vec<Q>, Vec<Q>);

fn sweep_left(points: &[Q], intervals: &[Q]) -> Pieces {
    let mut m = Q::zero();
    let mut p = Vec::with_capacity(points.len());
    let mut iv = Vec::with_capacity(intervals.len());
    for (i, &v) in points.iter().enumerate() {
        m = m.max(v);
        p.push(m);
        if let Some(&v) = intervals.get(i) {
            m = m.max(v);
            iv.push(m);
        }
    }
    (p, iv)
}

fn sweep_right(points: &[Q], intervals: &[Q]) -> Pieces {
    let mut m = Q::zero();
    let mut p = vec![Q::zero(); points.len()];
    let mut iv = vec![Q::zero(); intervals.len()];
    for i in (0..points.len()).rev() {
        m = m.max(points[i]);
        p[i] = m;
        if i > 0 {
            m = m.max(intervals[i - 1]);
            iv[i - 1] = m;
        }
    }
    (p, iv)
}

fn merged_breaks(a: &StepFunction, b: &StepFunction) -> Vec<Q> {
    let mut out: Vec<Q> = a.breaks.iter().chain(&b.breaks).copied().collect();
    out.sort();
    out.dedup();
    out
}

/// `(u ∧ env_v) ∨ (env_u ∧ v)` piecewise on the common refinement.
fn envelope_combine(
    a: &StepFunction,
    b: &StepFunction,
    sweep: fn(&[Q], &[Q]) -> Pieces,
) -> StepFunction {
    let breaks = merged_breaks(a, b);
    let (ap, ai) = a.refine(&breaks);
    let (bp, bi) = b.refine(&breaks);
    let (lap, lai) = sweep(&ap, &ai);
    let (lbp, lbi) = sweep(&bp, &bi);
    let combine = |u: &[Q], v: &[Q], eu: &[Q], ev: &[Q]| -> Vec<Q> {
        (0..u.len())
            .map(|i| u[i].min(ev[i]).max(eu[i].min(v[i])))
            .collect()
    };
    let points = combine(&ap, &bp, &lap, &lbp);
    let intervals = combine(&ai, &bi, &lai, &lbi);
    StepFunction::canonical(breaks, points, intervals)
}

/// `α ⊔ β`.
pub fn t2_join(a: &StepFunction, b: &StepFunction) -> StepFunction {
    envelope_combine(a, b, sweep_left)
}

/// `α ⊓ β`.
pub fn t2_meet(a: &StepFunction, b: &StepFunction) -> StepFunction {
    envelope_combine(a, b, sweep_right)
}

/// `¬α`, i.e. `x ↦ α(1 - x)`.
pub fn t2_neg(a: &StepFunction) -> StepFunction {
    StepFunction {
        breaks: a.breaks.iter().rev().map(|&b| Q::one() - b).collect(),
        points: a.points.iter().rev().copied().collect(),
        intervals: a.intervals.iter().rev().copied().collect(),
    }
}

/// `(0̲, 1̲)`.
pub fn t2_constants() -> (StepFunction, StepFunction) {
    (StepFunction::zero(), StepFunction::one())
}

/// A function on the chain `C_n = {0, 1/n, …, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridFunction {
    n: u32,
    values: Vec<Q>,
}

impl GridFunction {
    pub fn new(n: u32, values: Vec<Q>) -> Result<Self> {
        if n == 0 {
            return input("grid size must be positive");
        }
        if values.len() != n as usize + 1 {
            return input(format!(
                "C_{n} has {} points, got {} values",
                n + 1,
                values.len()
            ));
        }
        if let Some(v) = values.iter().find(|&&v| !in_unit(v)) {
            return input(format!("value {v} is outside [0,1]"));
        }
        Ok(GridFunction { n, values })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Value at `k/n`.
    pub fn values(&self) -> &[Q] {
        &self.values
    }
}

impl fmt::Display for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| format!("{}->{}", q(k as i64, self.n as i64), v))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridOp {
    Join,
    Meet,
    Neg,
}

impl GridOp {
    pub fn arity(self) -> usize {
        match self {
            GridOp::Join | GridOp::Meet => 2,
            GridOp::Neg => 1,
        }
    }
}

/// The defining suprema evaluated by brute force over every tuple of the
/// relation `∨`, `∧` or `¬` on `C_n`.
pub fn grid_conv_oracle(op: GridOp, args: &[&GridFunction]) -> Result<GridFunction> {
    if args.len() != op.arity() {
        return input(format!("{op:?} takes {} arguments", op.arity()));
    }
    let n = args[0].n;
    if args.iter().any(|a| a.n != n) {
        return input("grid functions are on different chains");
    }
    let size = n as usize + 1;
    let mut out = vec![Q::zero(); size];
    match op {
        GridOp::Join | GridOp::Meet => {
            let (a, b) = (&args[0].values, &args[1].values);
            for (y, &ay) in a.iter().enumerate() {
                for (z, &bz) in b.iter().enumerate() {
                    let x = if op == GridOp::Join {
                        y.max(z)
                    } else {
                        y.min(z)
                    };
                    out[x] = out[x].max(ay.min(bz));
                }
            }
        }
        GridOp::Neg => {
            for y in 0..size {
                let x = size - 1 - y;
                out[x] = out[x].max(args[0].values[y]);
            }
        }
    }
    GridFunction::new(n, out)
}

/// Restriction of `a` to `C_n`; every breakpoint must lie on the grid.
pub fn sample_to_grid(a: &StepFunction, n: u32) -> Result<GridFunction> {
    if n == 0 {
        return input("grid size must be positive");
    }
    let scale = Q::from_integer(n as i64);
    if let Some(b) = a.breaks.iter().find(|&&b| !(b * scale).is_integer()) {
        return input(format!("breakpoint {b} is not a multiple of 1/{n}"));
    }
    let values = (0..=n)
        .map(|k| a.eval(q(k as i64, n as i64)))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(n, values)
}

/// A random step function with breakpoints on `C_breaks` (each interior
/// grid point kept with probability 1/2) and values drawn from `C_values`.
pub fn random_step_function(rng: &mut impl Rng, breaks: u32, values: u32) -> StepFunction {
    let mut b = vec![Q::zero()];
    b.extend(
        (1..breaks)
            .filter(|_| rng.gen_bool(0.5))
            .map(|k| q(k as i64, breaks as i64)),
    );
    b.push(Q::one());
    let mut value = || q(rng.gen_range(0..=values) as i64, values as i64);
    let points = (0..b.len()).map(|_| value()).collect();
    let intervals = (0..b.len() - 1).map(|_| value()).collect();
    StepFunction::normalized(b, points, intervals).expect("generated pieces are valid")
}

/// A random function on `C_n` with values in `C_n`.
pub fn random_grid_function(rng: &mut impl Rng, n: u32) -> GridFunction {
    let values = (0..=n)
        .map(|_| q(rng.gen_range(0..=n) as i64, n as i64))
        .collect();
    GridFunction { n, values }
}

/// [`GridOp`] applied through the generic convolution over the chain
/// lattice `C_n` and the relational structure of `C_n`. Grid values must
/// lie in `C_n`.
pub fn grid_via_convolution(op: GridOp, args: &[&GridFunction]) -> Result<GridFunction> {
    let n = args
        .first()
        .map(|a| a.n)
        .ok_or_else(|| Error::Input("no arguments".into()))?;
    let lattice = HeytingLattice::chain(n)?;
    let s = interval_structure(n)?;
    let symbol = match op {
        GridOp::Join => "join",
        GridOp::Meet => "meet",
        GridOp::Neg => "neg",
    };
    let maps = args
        .iter()
        .map(|a| {
            a.values
                .iter()
                .map(|&v| {
                    lattice
                        .elem_of_value(v)
                        .ok_or_else(|| Error::Input(format!("{v} is not in C_{n}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(LatticeMap::new)
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&LatticeMap> = maps.iter().collect();
    let out = conv_op(&lattice, &s, s.symbol(symbol)?, &refs)?;
    GridFunction::new(
        n,
        out.values()
            .iter()
            .map(|&e| lattice.chain_value(e).expect("chain element"))
            .collect(),
    )
}

/// Outcome of [`crosscheck`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub n: u32,
    pub trials: u64,
    pub checks: u64,
    pub failure: Option<String>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Compares the closed forms with [`grid_conv_oracle`] on `C_n` for random
/// step functions with values in `C_n`.
///
/// Breakpoints are drawn from `C_{n/2}`, so every open interval between
/// breakpoints contains a point of `C_n`; only then does sampling on `C_n`
/// see every value a supremum can attain. `n` must therefore be even.
pub fn crosscheck(n: u32, trials: u64, seed: u64) -> Result<CrosscheckReport> {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    if n == 0 || !n.is_multiple_of(2) {
        return input(format!(
            "crosscheck grid size must be even and positive, got {n}"
        ));
    }
    let mut checks = 0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let a = random_step_function(&mut rng, n / 2, n);
        let b = random_step_function(&mut rng, n / 2, n);
        let ga = sample_to_grid(&a, n)?;
        let gb = sample_to_grid(&b, n)?;
        let cases = [
            (
                "join",
                sample_to_grid(&t2_join(&a, &b), n)?,
                grid_conv_oracle(GridOp::Join, &[&ga, &gb])?,
            ),
            (
                "meet",
                sample_to_grid(&t2_meet(&a, &b), n)?,
                grid_conv_oracle(GridOp::Meet, &[&ga, &gb])?,
            ),
            (
                "neg",
                sample_to_grid(&t2_neg(&a), n)?,
                grid_conv_oracle(GridOp::Neg, &[&ga])?,
            ),
        ];
        for (op, closed, oracle) in cases {
            checks += 1;
            if closed != oracle {
                return Ok(CrosscheckReport {
                    n,
                    trials,
                    checks,
                    failure: Some(format!(
                        "trial {t} {op}: closed form {closed} but oracle {oracle}\na:\n{a}b:\n{b}"
                    )),
                });
            }
        }
    }
    Ok(CrosscheckReport {
        n,
        trials,
        checks,
        failure: None,
    })
}
