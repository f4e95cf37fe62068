//! Constant étalé spaces `X̂ = X × Y → Y` over a finite topology and their
//! subobjects.
//!
//! An open subset of `X̂` is determined by its cross sections
//! `E^x = ({x} × Y) ∩ E = {x} × A_x`, so a subobject is stored as the family
//! `(A_x)_{x ∈ X}` of opens of `Y`. Relations of a structure lift to
//! constant subobjects of the powers `X̂^{n+1}`, whose cross section over a
//! tuple is all of `Y` or empty.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::{rel_image, CarrierSubset};
use crate::convolution::{
    conv_op, imp_maps, join_maps, map_at, map_count, meet_maps, neg_map, random_map, LatticeMap,
};
use crate::error::{input, Error, Result};
use crate::lattice::{FiniteTopology, HeytingLattice, PointSet};
use crate::relstruct::{all_tuples, RelationalStructure};

/// The constant étalé space of a set of fibers over a base topology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantEtale {
    fibers: Vec<String>,
    base: FiniteTopology,
}

impl ConstantEtale {
    pub fn new(fibers: Vec<String>, base: FiniteTopology) -> Self {
        ConstantEtale { fibers, base }
    }

    pub fn fibers(&self) -> &[String] {
        &self.fibers
    }

    pub fn base(&self) -> &FiniteTopology {
        &self.base
    }

    /// `|O(Y)|^|X|`.
    pub fn subobject_count(&self) -> u128 {
        map_count(self.base.opens().len(), self.fibers.len())
    }

    pub fn whole(&self) -> EtaleSubobject {
        EtaleSubobject {
            sections: vec![self.base.full(); self.fibers.len()],
        }
    }

    pub fn empty(&self) -> EtaleSubobject {
        EtaleSubobject {
            sections: vec![0; self.fibers.len()],
        }
    }

    /// A subobject from its cross sections; each must be open in the base.
    pub fn subobject(&self, sections: Vec<PointSet>) -> Result<EtaleSubobject> {
        if sections.len() != self.fibers.len() {
            return input(format!(
                "{} cross sections given for {} fibers",
                sections.len(),
                self.fibers.len()
            ));
        }
        for (x, &a) in sections.iter().enumerate() {
            if !self.base.is_open(a) {
                return input(format!(
                    "cross section over `{}` is {}, which is not open",
                    self.fibers[x],
                    self.base.format_set(a)
                ));
            }
        }
        Ok(EtaleSubobject { sections })
    }

    /// Every subobject, in the same order as the corresponding lattice maps.
    pub fn all_subobjects(&self, bound: u128) -> Result<impl Iterator<Item = EtaleSubobject> + '_> {
        let needed = self.subobject_count();
        if needed > bound {
            return Err(Error::Capacity {
                what: "subobjects",
                needed,
                bound,
            });
        }
        let opens = self.base.opens();
        Ok((0..needed as u64).map(move |i| EtaleSubobject {
            sections: map_at(opens.len(), self.fibers.len(), i)
                .values()
                .iter()
                .map(|e| opens[e.index()])
                .collect(),
        }))
    }

    fn check(&self, a: &EtaleSubobject) -> Result<()> {
        if a.sections.len() != self.fibers.len() {
            return input("subobject belongs to a different étalé space");
        }
        Ok(())
    }

    fn zip_with(
        &self,
        a: &EtaleSubobject,
        b: &EtaleSubobject,
        f: impl Fn(PointSet, PointSet) -> PointSet,
    ) -> Result<EtaleSubobject> {
        self.check(a)?;
        self.check(b)?;
        Ok(EtaleSubobject {
            sections: a
                .sections
                .iter()
                .zip(&b.sections)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        })
    }

    pub fn union(&self, a: &EtaleSubobject, b: &EtaleSubobject) -> Result<EtaleSubobject> {
        self.zip_with(a, b, |x, y| x | y)
    }

    pub fn intersection(&self, a: &EtaleSubobject, b: &EtaleSubobject) -> Result<EtaleSubobject> {
        self.zip_with(a, b, |x, y| x & y)
    }

    /// Section-wise relative pseudo-complement in `O(Y)`.
    pub fn implies(&self, a: &EtaleSubobject, b: &EtaleSubobject) -> Result<EtaleSubobject> {
        self.zip_with(a, b, |x, y| self.base.implies(x, y))
    }

    pub fn negation(&self, a: &EtaleSubobject) -> Result<EtaleSubobject> {
        self.implies(a, &self.empty())
    }
}

/// An open subset of a constant étalé, as its family of cross sections.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaleSubobject {
    sections: Vec<PointSet>,
}

impl EtaleSubobject {
    pub fn sections(&self) -> &[PointSet] {
        &self.sections
    }

    /// `A_x`, the open of `Y` with `E^x = {x} × A_x`.
    pub fn section(&self, x: usize) -> PointSet {
        self.sections[x]
    }

    /// The represented open set `⋃_x {x} × A_x` as `(fiber, base point)`
    /// pairs.
    pub fn points(&self) -> Vec<(usize, usize)> {
        self.sections
            .iter()
            .enumerate()
            .flat_map(|(x, &a)| {
                (0..64)
                    .filter(move |y| a >> y & 1 == 1)
                    .map(move |y| (x, y))
            })
            .collect()
    }

    /// `{x : y ∈ A_x}`, the fiber over base point `y`.
    pub fn fiber(&self, y: usize) -> CarrierSubset {
        CarrierSubset::new(
            self.sections.len(),
            (0..self.sections.len()).filter(|&x| self.sections[x] >> y & 1 == 1),
        )
        .expect("indices are in range")
    }

    pub fn is_subobject_of(&self, other: &EtaleSubobject) -> bool {
        self.sections
            .iter()
            .zip(&other.sections)
            .all(|(&a, &b)| a & !b == 0)
    }

    /// Renders as `x1 -> {t1 t2}` lines.
    pub fn display<'a>(&'a self, etale: &'a ConstantEtale) -> impl fmt::Display + 'a {
        SubobjectDisplay { sub: self, etale }
    }
}

struct SubobjectDisplay<'a> {
    sub: &'a EtaleSubobject,
    etale: &'a ConstantEtale,
}

impl fmt::Display for SubobjectDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, &a) in self.sub.sections.iter().enumerate() {
            writeln!(
                f,
                "{} -> {}",
                self.etale.fibers[x],
                self.etale.base.format_set(a)
            )?;
        }
        Ok(())
    }
}

/// `Φ(α)`: the subobject with cross sections `{x} × α(x)`.
pub fn phi(l: &HeytingLattice, alpha: &LatticeMap) -> Result<EtaleSubobject> {
    if l.topology().is_none() {
        return input("Φ needs the open-set lattice of a topology");
    }
    let sections = alpha
        .values()
        .iter()
        .map(|&e| {
            l.open_set(e)
                .ok_or_else(|| Error::Input(format!("{e:?} is not an element of the lattice")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EtaleSubobject { sections })
}

/// `Φ⁻¹(A)`: the map `x ↦ A_x`.
pub fn phi_inverse(l: &HeytingLattice, a: &EtaleSubobject) -> Result<LatticeMap> {
    let t = l
        .topology()
        .ok_or_else(|| Error::Input("Φ⁻¹ needs the open-set lattice of a topology".into()))?;
    let values = a
        .sections
        .iter()
        .map(|&m| {
            l.elem_of_open(m)
                .ok_or_else(|| Error::Input(format!("{} is not open", t.format_set(m))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeMap::new(values))
}

/// The constant relational étalé of a structure over a base topology.
#[derive(Clone, Debug)]
pub struct ConstantRelationalEtale<'a> {
    structure: &'a RelationalStructure,
    etale: ConstantEtale,
}

impl<'a> ConstantRelationalEtale<'a> {
    pub fn new(structure: &'a RelationalStructure, base: FiniteTopology) -> Self {
        ConstantRelationalEtale {
            structure,
            etale: ConstantEtale::new(structure.carrier().to_vec(), base),
        }
    }

    pub fn structure(&self) -> &'a RelationalStructure {
        self.structure
    }

    pub fn etale(&self) -> &ConstantEtale {
        &self.etale
    }

    /// Cross section of the lifted relation `R̂_j` over a tuple: all of `Y`
    /// when the tuple is in `R_j`, empty otherwise.
    pub fn lifted_section(&self, j: usize, tuple: &[usize]) -> PointSet {
        if self.structure.relation(j).contains(tuple) {
            self.etale.base.full()
        } else {
            0
        }
    }

    fn check_args(&self, j: usize, args: &[&EtaleSubobject]) -> Result<usize> {
        let arity = self.structure.signature().arity(j);
        if args.len() != arity {
            return input(format!(
                "`{}` takes {arity} arguments, got {}",
                self.structure.signature().name(j),
                args.len()
            ));
        }
        for a in args {
            self.etale.check(a)?;
        }
        Ok(arity)
    }

    /// Relational image `R̂_j(A_1, …, A_n)` in the complex algebra of
    /// subobjects: intersect `R̂_j` with the fiber product
    /// `A_1 × … × A_n × X̂` and project onto the last factor. The cross
    /// section over `x` is
    /// `⋃ { A_1(x_1) ∩ … ∩ A_n(x_n) : (x_1, …, x_n, x) ∈ R_j }`.
    pub fn fiberwise_rel_image(
        &self,
        j: usize,
        args: &[&EtaleSubobject],
    ) -> Result<EtaleSubobject> {
        let arity = self.check_args(j, args)?;
        let n = self.structure.carrier_len();
        let full = self.etale.base.full();
        let mut sections = vec![0; n];
        for tuple in all_tuples(n, arity + 1) {
            let product = args
                .iter()
                .zip(&tuple)
                .fold(full, |acc, (a, &xi)| acc & a.sections[xi]);
            sections[tuple[arity]] |= product & self.lifted_section(j, &tuple);
        }
        Ok(EtaleSubobject { sections })
    }

    /// The same image computed stalk by stalk: over each base point `y`
    /// take the relational image of the fibers `{x : y ∈ A_i(x)}` in `X⁺`.
    pub fn stalkwise_rel_image(
        &self,
        j: usize,
        args: &[&EtaleSubobject],
    ) -> Result<EtaleSubobject> {
        self.check_args(j, args)?;
        let n = self.structure.carrier_len();
        let mut sections = vec![0; n];
        for y in 0..self.etale.base.points().len() {
            let fibers: Vec<CarrierSubset> = args.iter().map(|a| a.fiber(y)).collect();
            let refs: Vec<&CarrierSubset> = fibers.iter().collect();
            for &x in rel_image(self.structure, j, &refs)?.members() {
                sections[x] |= 1 << y;
            }
        }
        Ok(EtaleSubobject { sections })
    }
}

/// A failed instance of the isomorphism check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoCounterexample {
    pub trial: u64,
    pub check: String,
    pub detail: String,
}

/// Outcome of [`verify_main_iso`] and [`verify_main_iso_exhaustive`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainIsoReport {
    pub trials: u64,
    pub checks: u64,
    pub counterexample: Option<IsoCounterexample>,
}

impl MainIsoReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

struct Checker<'a> {
    l: &'a HeytingLattice,
    e: ConstantRelationalEtale<'a>,
}

impl Checker<'_> {
    fn render_maps(&self, maps: &[&LatticeMap]) -> String {
        maps.iter()
            .map(|m| {
                let parts: Vec<String> = m
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(x, &v)| format!("{}->{}", self.e.structure.label(x), self.l.label(v)))
                    .collect();
                format!("[{}]", parts.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn render_sub(&self, a: &EtaleSubobject) -> String {
        let parts: Vec<String> = a
            .sections
            .iter()
            .enumerate()
            .map(|(x, &m)| {
                format!(
                    "{}->{}",
                    self.e.structure.label(x),
                    self.e.etale.base.format_set(m)
                )
            })
            .collect();
        format!("[{}]", parts.join(" "))
    }

    /// `Φ(f_j(args)) = R̂_j(Φ(args))` by both étalé routes.
    fn homomorphism(&self, j: usize, args: &[&LatticeMap]) -> Result<Option<(String, String)>> {
        let conv = phi(self.l, &conv_op(self.l, self.e.structure, j, args)?)?;
        let subs = args
            .iter()
            .map(|a| phi(self.l, a))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&EtaleSubobject> = subs.iter().collect();
        let name = self.e.structure.signature().name(j);
        for (route, img) in [
            ("fiberwise", self.e.fiberwise_rel_image(j, &refs)?),
            ("stalkwise", self.e.stalkwise_rel_image(j, &refs)?),
        ] {
            if img != conv {
                return Ok(Some((
                    format!("relation {name} ({route})"),
                    format!(
                        "args {}: Φ(conv) = {} but image = {}",
                        self.render_maps(args),
                        self.render_sub(&conv),
                        self.render_sub(&img)
                    ),
                )));
            }
        }
        Ok(None)
    }

    /// Φ is a bijection, an order embedding, and commutes with ∨ ∧ → ¬.
    fn lattice_ops(&self, a: &LatticeMap, b: &LatticeMap) -> Result<Option<(String, String)>> {
        let et = &self.e.etale;
        let (pa, pb) = (phi(self.l, a)?, phi(self.l, b)?);
        let shown = || self.render_maps(&[a, b]);
        if phi_inverse(self.l, &pa)? != *a {
            return Ok(Some(("round trip".into(), shown())));
        }
        if a.leq(self.l, b) != pa.is_subobject_of(&pb) {
            return Ok(Some(("order".into(), shown())));
        }
        let pairs = [
            (
                "join",
                phi(self.l, &join_maps(self.l, a, b)?)?,
                et.union(&pa, &pb)?,
            ),
            (
                "meet",
                phi(self.l, &meet_maps(self.l, a, b)?)?,
                et.intersection(&pa, &pb)?,
            ),
            (
                "implication",
                phi(self.l, &imp_maps(self.l, a, b)?)?,
                et.implies(&pa, &pb)?,
            ),
            (
                "negation",
                phi(self.l, &neg_map(self.l, a)?)?,
                et.negation(&pa)?,
            ),
        ];
        for (op, via_maps, via_subs) in pairs {
            if via_maps != via_subs {
                return Ok(Some((format!("{op} commutes with Φ"), shown())));
            }
        }
        Ok(None)
    }
}

fn open_set_topology(l: &HeytingLattice) -> Result<FiniteTopology> {
    l.topology().cloned().ok_or_else(|| {
        Error::Input("the lattice must be the open-set lattice of a topology".into())
    })
}

/// Randomized check of `Φ: L^X → X̂⁺` on `trials` independent draws.
/// Trial `t` uses stream `t` of a ChaCha generator keyed by `seed`, so the
/// report depends only on `(l, s, trials, seed)`.
pub fn verify_main_iso(
    l: &HeytingLattice,
    s: &RelationalStructure,
    trials: u64,
    seed: u64,
) -> Result<MainIsoReport> {
    let checker = Checker {
        l,
        e: ConstantRelationalEtale::new(s, open_set_topology(l)?),
    };
    let n = s.carrier_len();
    let per_trial = s.signature().len() as u64 + 1;
    let found = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Option<IsoCounterexample>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let wrap = |r: Option<(String, String)>| {
                r.map(|(check, detail)| IsoCounterexample {
                    trial: t,
                    check,
                    detail,
                })
            };
            for j in 0..s.signature().len() {
                let args: Vec<LatticeMap> = (0..s.signature().arity(j))
                    .map(|_| random_map(l, n, &mut rng))
                    .collect();
                let refs: Vec<&LatticeMap> = args.iter().collect();
                if let Some(c) = wrap(checker.homomorphism(j, &refs)?) {
                    return Ok(Some(c));
                }
            }
            let a = random_map(l, n, &mut rng);
            let b = random_map(l, n, &mut rng);
            Ok(wrap(checker.lattice_ops(&a, &b)?))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    let counterexample = match found {
        Some(r) => r?,
        None => None,
    };
    Ok(MainIsoReport {
        trials,
        checks: trials * per_trial,
        counterexample,
    })
}

/// Checks `Φ` on every argument tuple of every relation and on every pair
/// of maps. `bound` caps the number of argument tuples per relation.
pub fn verify_main_iso_exhaustive(
    l: &HeytingLattice,
    s: &RelationalStructure,
    bound: u128,
) -> Result<MainIsoReport> {
    let checker = Checker {
        l,
        e: ConstantRelationalEtale::new(s, open_set_topology(l)?),
    };
    let n = s.carrier_len();
    let maps = map_count(l.size(), n);
    let mut checks = 0u64;
    let fail = |checks, (check, detail): (String, String)| MainIsoReport {
        trials: 0,
        checks,
        counterexample: Some(IsoCounterexample {
            trial: 0,
            check,
            detail,
        }),
    };
    for j in 0..s.signature().len() {
        let arity = s.signature().arity(j);
        let needed = maps.saturating_pow(arity as u32);
        if needed > bound {
            return Err(Error::Capacity {
                what: "map argument tuples",
                needed,
                bound,
            });
        }
        for t in all_tuples(maps as usize, arity) {
            checks += 1;
            let args: Vec<LatticeMap> = t.iter().map(|&i| map_at(l.size(), n, i as u64)).collect();
            let refs: Vec<&LatticeMap> = args.iter().collect();
            if let Some(c) = checker.homomorphism(j, &refs)? {
                return Ok(fail(checks, c));
            }
        }
    }
    let needed = maps.saturating_mul(maps);
    if needed > bound {
        return Err(Error::Capacity {
            what: "map pairs",
            needed,
            bound,
        });
    }
    for i in 0..maps as u64 {
        let a = map_at(l.size(), n, i);
        for k in 0..maps as u64 {
            checks += 1;
            if let Some(c) = checker.lattice_ops(&a, &map_at(l.size(), n, k))? {
                return Ok(fail(checks, c));
            }
        }
    }
    Ok(MainIsoReport {
        trials: 0,
        checks,
        counterexample: None,
    })
}
