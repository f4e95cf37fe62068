//! The complex algebra `X⁺ = (P(X), (h_j)_J)` and its isomorphism with the
//! convolution algebra over the two-element lattice.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convolution::{conv_op, LatticeMap};
use crate::error::{input, Error, Result};
use crate::lattice::HeytingLattice;
use crate::relstruct::{all_tuples, RelationalStructure, Signature};
use crate::terms::{Algebra, FiniteAlgebra};

/// A subset of a structure's carrier, kept as a sorted index list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CarrierSubset {
    carrier_len: usize,
    members: Vec<usize>,
}

impl CarrierSubset {
    pub fn new(carrier_len: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&x| x >= carrier_len) {
            return input(format!("element {bad} is outside the carrier"));
        }
        Ok(CarrierSubset {
            carrier_len,
            members: set.into_iter().collect(),
        })
    }

    pub fn empty(carrier_len: usize) -> Self {
        CarrierSubset {
            carrier_len,
            members: Vec::new(),
        }
    }

    pub fn full(carrier_len: usize) -> Self {
        CarrierSubset {
            carrier_len,
            members: (0..carrier_len).collect(),
        }
    }

    /// Builds a subset from carrier labels.
    pub fn from_labels<S: AsRef<str>>(s: &RelationalStructure, labels: &[S]) -> Result<Self> {
        let idx = labels
            .iter()
            .map(|l| {
                s.index_of(l.as_ref())
                    .ok_or_else(|| Error::Input(format!("unknown element `{}`", l.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(s.carrier_len(), idx)
    }

    pub fn carrier_len(&self) -> usize {
        self.carrier_len
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &CarrierSubset) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn union(&self, other: &CarrierSubset) -> CarrierSubset {
        CarrierSubset {
            carrier_len: self.carrier_len,
            members: self
                .members
                .iter()
                .chain(&other.members)
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        }
    }

    /// Position in the enumeration order shared with `2^X`: the first
    /// carrier element is the most significant bit.
    pub fn index(&self) -> u64 {
        self.members
            .iter()
            .fold(0, |acc, &x| acc | 1 << (self.carrier_len - 1 - x))
    }

    pub fn from_index(carrier_len: usize, index: u64) -> Self {
        CarrierSubset {
            carrier_len,
            members: (0..carrier_len)
                .filter(|&x| index >> (carrier_len - 1 - x) & 1 == 1)
                .collect(),
        }
    }

    /// Renders as `{x1 x3}`.
    pub fn display<'a>(&'a self, carrier: &'a [String]) -> impl fmt::Display + 'a {
        SubsetDisplay {
            subset: self,
            carrier,
        }
    }
}

struct SubsetDisplay<'a> {
    subset: &'a CarrierSubset,
    carrier: &'a [String],
}

impl fmt::Display for SubsetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self
            .subset
            .members
            .iter()
            .map(|&x| self.carrier[x].as_str())
            .collect();
        write!(f, "{{{}}}", labels.join(" "))
    }
}

/// Relational image `h_j(A_1, …, A_n)`: all `a` with some
/// `(a_1, …, a_n, a) ∈ R_j` and every `a_i ∈ A_i`. For a nullary symbol this
/// is `R_j` itself.
pub fn rel_image(
    s: &RelationalStructure,
    j: usize,
    args: &[&CarrierSubset],
) -> Result<CarrierSubset> {
    let rel = s.relation(j);
    if args.len() != rel.arity() {
        return input(format!(
            "`{}` takes {} arguments, got {}",
            s.signature().name(j),
            rel.arity(),
            args.len()
        ));
    }
    if let Some(a) = args.iter().find(|a| a.carrier_len != s.carrier_len()) {
        return input(format!(
            "subset over {} elements used with a carrier of {}",
            a.carrier_len,
            s.carrier_len()
        ));
    }
    let image = rel
        .tuples()
        .iter()
        .filter(|t| args.iter().zip(t.iter()).all(|(a, &x)| a.contains(x)))
        .map(|t| t[rel.arity()]);
    CarrierSubset::new(s.carrier_len(), image)
}

/// The characteristic map `χ_A` in `2^X`.
pub fn characteristic_map(two: &HeytingLattice, a: &CarrierSubset) -> LatticeMap {
    LatticeMap::new(
        (0..a.carrier_len)
            .map(|x| {
                if a.contains(x) {
                    two.top()
                } else {
                    two.bottom()
                }
            })
            .collect(),
    )
}

/// The subset whose characteristic map is `m`.
pub fn subset_of_map(two: &HeytingLattice, m: &LatticeMap) -> Result<CarrierSubset> {
    if let Some(e) = m
        .values()
        .iter()
        .find(|&&e| e != two.top() && e != two.bottom())
    {
        return input(format!("{e:?} is not a two-valued map entry"));
    }
    CarrierSubset::new(
        m.len(),
        m.values()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == two.top())
            .map(|(x, _)| x),
    )
}

/// How many argument tuples [`characteristic_iso`] examines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

/// Outcome of [`characteristic_iso`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoReport {
    pub checks: u64,
    pub failure: Option<String>,
}

impl IsoReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Verifies that `A ↦ χ_A` is an order isomorphism `P(X) → 2^X` that
/// carries every relational image to the matching convolution.
///
/// `bound` caps the number of argument tuples in exhaustive mode.
pub fn characteristic_iso(
    s: &RelationalStructure,
    coverage: Coverage,
    bound: u128,
) -> Result<IsoReport> {
    let two = HeytingLattice::two();
    let n = s.carrier_len();
    if n >= 64 {
        return input("carrier too large for subset enumeration");
    }
    let subsets = 1u64 << n;
    let mut checks = 0u64;
    let fail = |checks, msg: String| {
        Ok(IsoReport {
            checks,
            failure: Some(msg),
        })
    };

    let sample: Vec<u64> = match coverage {
        Coverage::Exhaustive => {
            let needed = (subsets as u128).saturating_mul(subsets as u128);
            if needed > bound {
                return Err(Error::Capacity {
                    what: "subset pairs",
                    needed,
                    bound,
                });
            }
            (0..subsets).collect()
        }
        Coverage::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..trials).map(|_| rng.gen_range(0..subsets)).collect()
        }
    };

    for &i in &sample {
        let a = CarrierSubset::from_index(n, i);
        let chi = characteristic_map(&two, &a);
        checks += 1;
        if subset_of_map(&two, &chi)? != a {
            return fail(
                checks,
                format!("round trip fails at {}", a.display(s.carrier())),
            );
        }
        for &k in &sample {
            let b = CarrierSubset::from_index(n, k);
            checks += 1;
            if a.is_subset(&b) != chi.leq(&two, &characteristic_map(&two, &b)) {
                return fail(
                    checks,
                    format!(
                        "order mismatch between {} and {}",
                        a.display(s.carrier()),
                        b.display(s.carrier())
                    ),
                );
            }
        }
    }

    for j in 0..s.signature().len() {
        let arity = s.signature().arity(j);
        let tuples: Box<dyn Iterator<Item = Vec<u64>>> = match coverage {
            Coverage::Exhaustive => {
                let needed = (subsets as u128).saturating_pow(arity as u32);
                if needed > bound {
                    return Err(Error::Capacity {
                        what: "subset argument tuples",
                        needed,
                        bound,
                    });
                }
                Box::new(
                    all_tuples(subsets as usize, arity)
                        .map(|t| t.into_iter().map(|x| x as u64).collect()),
                )
            }
            Coverage::Sampled { trials, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (j as u64 + 1));
                Box::new(
                    (0..trials)
                        .map(move |_| (0..arity).map(|_| rng.gen_range(0..subsets)).collect()),
                )
            }
        };
        for t in tuples {
            checks += 1;
            let args: Vec<CarrierSubset> =
                t.iter().map(|&i| CarrierSubset::from_index(n, i)).collect();
            let arg_refs: Vec<&CarrierSubset> = args.iter().collect();
            let image = rel_image(s, j, &arg_refs)?;
            let chis: Vec<LatticeMap> = args.iter().map(|a| characteristic_map(&two, a)).collect();
            let chi_refs: Vec<&LatticeMap> = chis.iter().collect();
            let conv = conv_op(&two, s, j, &chi_refs)?;
            if conv != characteristic_map(&two, &image) {
                let shown: Vec<String> = args
                    .iter()
                    .map(|a| a.display(s.carrier()).to_string())
                    .collect();
                return fail(
                    checks,
                    format!(
                        "`{}`({}) = {} but the convolution gives {}",
                        s.signature().name(j),
                        shown.join(", "),
                        image.display(s.carrier()),
                        subset_of_map(&two, &conv)?.display(s.carrier())
                    ),
                );
            }
        }
    }
    Ok(IsoReport {
        checks,
        failure: None,
    })
}

/// `X⁺` as an algebra of type `τ`.
#[derive(Clone, Copy, Debug)]
pub struct ComplexAlgebra<'a> {
    structure: &'a RelationalStructure,
}

impl<'a> ComplexAlgebra<'a> {
    pub fn new(structure: &'a RelationalStructure) -> Self {
        ComplexAlgebra { structure }
    }
}

impl Algebra for ComplexAlgebra<'_> {
    type Value = CarrierSubset;

    fn signature(&self) -> &Signature {
        self.structure.signature()
    }

    fn apply(&self, symbol: usize, args: &[&CarrierSubset]) -> Result<CarrierSubset> {
        rel_image(self.structure, symbol, args)
    }

    fn render(&self, v: &CarrierSubset) -> String {
        v.display(self.structure.carrier()).to_string()
    }
}

impl FiniteAlgebra for ComplexAlgebra<'_> {
    fn cardinality(&self) -> u128 {
        1u128
            .checked_shl(self.structure.carrier_len() as u32)
            .unwrap_or(u128::MAX)
    }

    fn element(&self, index: u64) -> CarrierSubset {
        CarrierSubset::from_index(self.structure.carrier_len(), index)
    }

    fn index_of(&self, value: &CarrierSubset) -> u64 {
        value.index()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relstruct::{
        interval_structure, relation_from_operation, RawRelation, RawStructure,
    };

    fn ternary() -> RelationalStructure {
        let t = |a: &str, b: &str, c: &str| vec![a.to_string(), b.to_string(), c.to_string()];
        RelationalStructure::try_from(RawStructure {
            carrier: ["x1", "x2", "x3", "x4"].map(String::from).to_vec(),
            relations: vec![RawRelation {
                name: "R".into(),
                arity: 2,
                tuples: vec![
                    t("x1", "x1", "x1"),
                    t("x2", "x2", "x3"),
                    t("x1", "x3", "x4"),
                    t("x3", "x2", "x4"),
                ],
            }],
        })
        .unwrap()
    }

    #[test]
    fn ternary_image() {
        let s = ternary();
        let a1 = CarrierSubset::from_labels(&s, &["x1", "x2"]).unwrap();
        let a2 = CarrierSubset::from_labels(&s, &["x2", "x3"]).unwrap();
        let img = rel_image(&s, 0, &[&a1, &a2]).unwrap();
        assert_eq!(img.display(s.carrier()).to_string(), "{x3 x4}");
        let empty = CarrierSubset::empty(4);
        assert!(rel_image(&s, 0, &[&a1, &empty]).unwrap().is_empty());
        let full = CarrierSubset::full(4);
        let proj = rel_image(&s, 0, &[&full, &full]).unwrap();
        assert_eq!(proj.members(), &[0, 2, 3]);
        assert!(rel_image(&s, 0, &[&a1]).is_err());
    }

    #[test]
    fn nullary_image_is_the_relation() {
        let s = interval_structure(2).unwrap();
        let one = rel_image(&s, s.symbol("one").unwrap(), &[]).unwrap();
        assert_eq!(one.members(), &[2]);
    }

    #[test]
    fn cyclic_group_complex_multiplication() {
        let r = relation_from_operation(3, 2, |a| Some((a[0] + a[1]) % 3)).unwrap();
        let s = RelationalStructure::new(
            ["0", "1", "2"].map(String::from).to_vec(),
            vec![("+".into(), r)],
        )
        .unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let sa = CarrierSubset::new(3, [a]).unwrap();
                let sb = CarrierSubset::new(3, [b]).unwrap();
                let img = rel_image(&s, 0, &[&sa, &sb]).unwrap();
                assert_eq!(img.members(), &[(a + b) % 3]);
            }
        }
    }

    #[test]
    fn image_preserves_unions() {
        let s = ternary();
        for i in 0..16 {
            for i2 in 0..16 {
                for k in 0..16 {
                    let a = CarrierSubset::from_index(4, i);
                    let a2 = CarrierSubset::from_index(4, i2);
                    let b = CarrierSubset::from_index(4, k);
                    let lhs = rel_image(&s, 0, &[&a.union(&a2), &b]).unwrap();
                    let rhs = rel_image(&s, 0, &[&a, &b])
                        .unwrap()
                        .union(&rel_image(&s, 0, &[&a2, &b]).unwrap());
                    assert_eq!(lhs, rhs);
                    let rhs2 = rel_image(&s, 0, &[&b, &a])
                        .unwrap()
                        .union(&rel_image(&s, 0, &[&b, &a2]).unwrap());
                    assert_eq!(rel_image(&s, 0, &[&b, &a.union(&a2)]).unwrap(), rhs2);
                }
            }
        }
    }

    #[test]
    fn characteristic_of_empty_is_bottom() {
        let two = HeytingLattice::two();
        let chi = characteristic_map(&two, &CarrierSubset::empty(3));
        assert_eq!(chi, LatticeMap::constant(3, two.bottom()));
    }

    #[test]
    fn iso_ternary_and_interval() {
        let r = characteristic_iso(&ternary(), Coverage::Exhaustive, 1_000_000).unwrap();
        assert!(r.passed(), "{:?}", r.failure);
        assert!(r.checks >= 256);
        let s = interval_structure(1).unwrap();
        assert!(characteristic_iso(&s, Coverage::Exhaustive, 1_000_000)
            .unwrap()
            .passed());
        let sampled = characteristic_iso(
            &interval_structure(5).unwrap(),
            Coverage::Sampled {
                trials: 50,
                seed: 3,
            },
            1_000_000,
        )
        .unwrap();
        assert!(sampled.passed());
    }

    #[test]
    fn index_round_trip() {
        for i in 0..32 {
            assert_eq!(CarrierSubset::from_index(5, i).index(), i);
        }
    }
}
