//! The convolution algebra `L^X` of a relational structure over a finite
//! lattice.
//!
//! For a symbol `j` of arity `n` the induced operation is
//!
//! ```text
//! f_j(α_1, …, α_n)(x) = ⋁ { α_1(x_1) ∧ … ∧ α_n(x_n) | (x_1, …, x_n, x) ∈ R_j }
//! ```
//!
//! with the empty meet equal to the top and the empty join equal to the
//! bottom, so a constant `{c}` induces the map sending `c` to the top and
//! everything else to the bottom.

use std::fmt;

use rand::Rng;

use crate::error::{input, Error, Result};
use crate::lattice::{Elem, FiniteLattice, HeytingLattice};
use crate::relstruct::{RelationalStructure, Signature};
use crate::terms::{Algebra, FiniteAlgebra};

/// A total map from carrier indices to lattice elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeMap {
    values: Vec<Elem>,
}

impl LatticeMap {
    pub fn new(values: Vec<Elem>) -> Self {
        LatticeMap { values }
    }

    pub fn constant(len: usize, e: Elem) -> Self {
        LatticeMap {
            values: vec![e; len],
        }
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    pub fn get(&self, x: usize) -> Elem {
        self.values[x]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise order.
    pub fn leq(&self, l: &FiniteLattice, other: &LatticeMap) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| l.leq(a, b))
    }

    /// Renders as `x1 -> {a b}` lines using the structure's labels.
    pub fn display<'a>(
        &'a self,
        l: &'a FiniteLattice,
        carrier: &'a [String],
    ) -> impl fmt::Display + 'a {
        MapDisplay {
            map: self,
            lattice: l,
            carrier,
        }
    }
}

struct MapDisplay<'a> {
    map: &'a LatticeMap,
    lattice: &'a FiniteLattice,
    carrier: &'a [String],
}

impl fmt::Display for MapDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, &e) in self.map.values.iter().enumerate() {
            writeln!(f, "{} -> {}", self.carrier[x], self.lattice.label(e))?;
        }
        Ok(())
    }
}

fn check_map(l: &FiniteLattice, carrier_len: usize, m: &LatticeMap) -> Result<()> {
    if m.len() != carrier_len {
        return input(format!(
            "map has {} values but the carrier has {carrier_len} elements",
            m.len()
        ));
    }
    if let Some(e) = m.values.iter().find(|&&e| !l.contains(e)) {
        return input(format!("map value {e:?} is not an element of the lattice"));
    }
    Ok(())
}

/// The operation `f_j` of `L^X` applied to `args`.
pub fn conv_op(
    l: &FiniteLattice,
    s: &RelationalStructure,
    j: usize,
    args: &[&LatticeMap],
) -> Result<LatticeMap> {
    let arity = s.signature().arity(j);
    if args.len() != arity {
        return input(format!(
            "`{}` takes {arity} arguments, got {}",
            s.signature().name(j),
            args.len()
        ));
    }
    for a in args {
        check_map(l, s.carrier_len(), a)?;
    }
    Ok(conv_op_unchecked(l, s, j, args))
}

pub(crate) fn conv_op_unchecked(
    l: &FiniteLattice,
    s: &RelationalStructure,
    j: usize,
    args: &[&LatticeMap],
) -> LatticeMap {
    let rel = s.relation(j);
    let top = l.top();
    let bottom = l.bottom();
    let values = (0..s.carrier_len())
        .map(|x| {
            let mut acc = bottom;
            for pre in rel.preimages(x) {
                let mut m = top;
                for (arg, &xi) in args.iter().zip(pre) {
                    m = l.meet(m, arg.values[xi]);
                    if m == bottom {
                        break;
                    }
                }
                acc = l.join(acc, m);
                if acc == top {
                    break;
                }
            }
            acc
        })
        .collect();
    LatticeMap { values }
}

fn check_pair(a: &LatticeMap, b: &LatticeMap) -> Result<()> {
    if a.len() != b.len() {
        return input("maps are over carriers of different sizes");
    }
    Ok(())
}

fn zip_with(
    l: &FiniteLattice,
    a: &LatticeMap,
    b: &LatticeMap,
    f: impl Fn(Elem, Elem) -> Elem,
) -> Result<LatticeMap> {
    check_pair(a, b)?;
    check_map(l, a.len(), a)?;
    check_map(l, b.len(), b)?;
    Ok(LatticeMap {
        values: a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&x, &y)| f(x, y))
            .collect(),
    })
}

pub fn join_maps(l: &FiniteLattice, a: &LatticeMap, b: &LatticeMap) -> Result<LatticeMap> {
    zip_with(l, a, b, |x, y| l.join(x, y))
}

pub fn meet_maps(l: &FiniteLattice, a: &LatticeMap, b: &LatticeMap) -> Result<LatticeMap> {
    zip_with(l, a, b, |x, y| l.meet(x, y))
}

pub fn imp_maps(l: &HeytingLattice, a: &LatticeMap, b: &LatticeMap) -> Result<LatticeMap> {
    zip_with(l, a, b, |x, y| l.imp(x, y))
}

pub fn neg_map(l: &HeytingLattice, a: &LatticeMap) -> Result<LatticeMap> {
    check_map(l, a.len(), a)?;
    Ok(LatticeMap {
        values: a.values.iter().map(|&x| l.neg(x)).collect(),
    })
}

pub fn bottom_map(l: &FiniteLattice, carrier_len: usize) -> LatticeMap {
    LatticeMap::constant(carrier_len, l.bottom())
}

pub fn top_map(l: &FiniteLattice, carrier_len: usize) -> LatticeMap {
    LatticeMap::constant(carrier_len, l.top())
}

/// `|L|^|X|`, saturating.
pub fn map_count(lattice_size: usize, carrier_len: usize) -> u128 {
    (lattice_size as u128)
        .checked_pow(carrier_len as u32)
        .unwrap_or(u128::MAX)
}

/// The map at position `index` in [`enumerate_maps`] order.
pub fn map_at(lattice_size: usize, carrier_len: usize, mut index: u64) -> LatticeMap {
    let base = lattice_size as u64;
    let mut values = vec![Elem(0); carrier_len];
    for slot in values.iter_mut().rev() {
        *slot = Elem((index % base) as u32);
        index /= base;
    }
    LatticeMap { values }
}

/// Inverse of [`map_at`].
pub fn map_index(lattice_size: usize, m: &LatticeMap) -> u64 {
    m.values
        .iter()
        .fold(0, |acc, e| acc * lattice_size as u64 + e.0 as u64)
}

/// Every map `X → L`, each once, lexicographically with the first carrier
/// element most significant.
pub fn enumerate_maps(
    l: &FiniteLattice,
    carrier_len: usize,
    bound: u128,
) -> Result<impl Iterator<Item = LatticeMap>> {
    let needed = map_count(l.size(), carrier_len);
    if needed > bound {
        return Err(Error::Capacity {
            what: "lattice maps",
            needed,
            bound,
        });
    }
    let size = l.size();
    Ok((0..needed as u64).map(move |i| map_at(size, carrier_len, i)))
}

/// A uniformly random map.
pub fn random_map(l: &FiniteLattice, carrier_len: usize, rng: &mut impl Rng) -> LatticeMap {
    LatticeMap {
        values: (0..carrier_len)
            .map(|_| Elem(rng.gen_range(0..l.size() as u32)))
            .collect(),
    }
}

/// `L^X` as an algebra of type `τ`.
#[derive(Clone, Copy, Debug)]
pub struct ConvolutionAlgebra<'a> {
    lattice: &'a FiniteLattice,
    structure: &'a RelationalStructure,
}

impl<'a> ConvolutionAlgebra<'a> {
    pub fn new(lattice: &'a FiniteLattice, structure: &'a RelationalStructure) -> Self {
        ConvolutionAlgebra { lattice, structure }
    }

    pub fn lattice(&self) -> &'a FiniteLattice {
        self.lattice
    }

    pub fn structure(&self) -> &'a RelationalStructure {
        self.structure
    }
}

impl Algebra for ConvolutionAlgebra<'_> {
    type Value = LatticeMap;

    fn signature(&self) -> &Signature {
        self.structure.signature()
    }

    fn apply(&self, symbol: usize, args: &[&LatticeMap]) -> Result<LatticeMap> {
        conv_op(self.lattice, self.structure, symbol, args)
    }

    fn render(&self, v: &LatticeMap) -> String {
        let parts: Vec<String> = v
            .values
            .iter()
            .enumerate()
            .map(|(x, &e)| format!("{}->{}", self.structure.label(x), self.lattice.label(e)))
            .collect();
        format!("[{}]", parts.join(" "))
    }
}

impl FiniteAlgebra for ConvolutionAlgebra<'_> {
    fn cardinality(&self) -> u128 {
        map_count(self.lattice.size(), self.structure.carrier_len())
    }

    fn element(&self, index: u64) -> LatticeMap {
        map_at(self.lattice.size(), self.structure.carrier_len(), index)
    }

    fn index_of(&self, value: &LatticeMap) -> u64 {
        map_index(self.lattice.size(), value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteTopology;
    use crate::relstruct::{interval_structure, Relation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vee() -> HeytingLattice {
        let pts = ["a", "b", "c"].map(String::from).to_vec();
        let t =
            FiniteTopology::generate(pts, &[vec!["b"], vec!["a", "b"], vec!["b", "c"]]).unwrap();
        HeytingLattice::open_sets(&t)
    }

    #[test]
    fn nullary_zero_is_spike_at_zero() {
        let two = HeytingLattice::two();
        let s = interval_structure(1).unwrap();
        let zero = conv_op(&two, &s, s.symbol("zero").unwrap(), &[]).unwrap();
        assert_eq!(zero.values(), &[two.top(), two.bottom()]);
    }

    #[test]
    fn empty_relation_gives_bottom() {
        let l = vee();
        let r = Relation::new(2, 2, []).unwrap();
        let s =
            RelationalStructure::new(vec!["p".into(), "q".into()], vec![("f".into(), r)]).unwrap();
        let a = top_map(&l, 2);
        assert_eq!(conv_op(&l, &s, 0, &[&a, &a]).unwrap(), bottom_map(&l, 2));
    }

    #[test]
    fn arity_and_carrier_mismatch() {
        let l = vee();
        let s = interval_structure(1).unwrap();
        let a = top_map(&l, 2);
        assert!(conv_op(&l, &s, 0, &[&a]).is_err());
        let short = top_map(&l, 1);
        assert!(conv_op(&l, &s, 0, &[&a, &short]).is_err());
        let bad = LatticeMap::new(vec![Elem(0), Elem(99)]);
        assert!(conv_op(&l, &s, 0, &[&a, &bad]).is_err());
    }

    #[test]
    fn pointwise_laws() {
        let l = vee();
        let e = |s: &str| l.parse_elem(s).unwrap();
        let a = LatticeMap::new(vec![e("{a b}"), e("{a b c}")]);
        let b = LatticeMap::new(vec![e("{b c}"), e("{}")]);
        assert_eq!(
            meet_maps(&l, &a, &b).unwrap().values(),
            &[e("{b}"), e("{}")]
        );
        assert_eq!(join_maps(&l, &a, &bottom_map(&l, 2)).unwrap(), a);
        assert_eq!(imp_maps(&l, &a, &a).unwrap(), top_map(&l, 2));
        assert_eq!(neg_map(&l, &bottom_map(&l, 2)).unwrap(), top_map(&l, 2));
        assert!(join_maps(&l, &a, &top_map(&l, 3)).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let l = vee();
        assert_eq!(enumerate_maps(&l, 2, 1_000_000).unwrap().count(), 25);
        let two = HeytingLattice::two();
        let all: Vec<LatticeMap> = enumerate_maps(&two, 3, 1_000_000).unwrap().collect();
        assert_eq!(all.len(), 8);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup, all);
        for (i, m) in all.iter().enumerate() {
            assert_eq!(map_index(2, m), i as u64);
        }
        let trivial_t = FiniteTopology::discrete(vec![]).unwrap();
        let trivial = HeytingLattice::open_sets(&trivial_t);
        assert_eq!(enumerate_maps(&trivial, 5, 10).unwrap().count(), 1);
        assert!(matches!(
            enumerate_maps(&l, 20, 1_000_000),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn monotone_and_join_preserving_exhaustively() {
        let l = vee();
        let s = interval_structure(1).unwrap();
        let maps: Vec<LatticeMap> = enumerate_maps(&l, 2, 1000).unwrap().collect();
        for j in 0..s.signature().len() {
            if s.signature().arity(j) != 1 {
                continue;
            }
            for a in &maps {
                for b in &maps {
                    let fa = conv_op(&l, &s, j, &[a]).unwrap();
                    let fb = conv_op(&l, &s, j, &[b]).unwrap();
                    let ab = join_maps(&l, a, b).unwrap();
                    let fab = conv_op(&l, &s, j, &[&ab]).unwrap();
                    assert_eq!(fab, join_maps(&l, &fa, &fb).unwrap());
                    if a.leq(&l, b) {
                        assert!(fa.leq(&l, &fb));
                    }
                }
            }
        }
        let join = s.symbol("join").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_map(&l, 2, &mut rng);
            let a2 = random_map(&l, 2, &mut rng);
            let b = random_map(&l, 2, &mut rng);
            let lhs = conv_op(&l, &s, join, &[&join_maps(&l, &a, &a2).unwrap(), &b]).unwrap();
            let rhs = join_maps(
                &l,
                &conv_op(&l, &s, join, &[&a, &b]).unwrap(),
                &conv_op(&l, &s, join, &[&a2, &b]).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn crisp_maps_follow_forward_image() {
        let two = HeytingLattice::two();
        let s = interval_structure(3).unwrap();
        let maps: Vec<LatticeMap> = enumerate_maps(&two, 4, 1000).unwrap().collect();
        let join = s.symbol("join").unwrap();
        for a in &maps {
            for b in &maps {
                let got = conv_op(&two, &s, join, &[a, b]).unwrap();
                let mut want = vec![two.bottom(); 4];
                for y in 0..4 {
                    for z in 0..4 {
                        if a.get(y) == two.top() && b.get(z) == two.top() {
                            want[y.max(z)] = two.top();
                        }
                    }
                }
                assert_eq!(got.values(), want.as_slice());
            }
        }
    }
}
