//! Fixtures shared by the benchmarks.

use convalg_core::lattice::FiniteTopology;
use convalg_core::relstruct::RelationalStructure;
use convalg_core::text::parse_structure;
use convalg_core::HeytingLattice;

pub const TERNARY_STRUCTURE: &str = "\
carrier: x1 x2 x3 x4
relation R arity 2
x1 x1 x1
x2 x2 x3
x1 x3 x4
x3 x2 x4
";

pub fn ternary() -> RelationalStructure {
    parse_structure(TERNARY_STRUCTURE).expect("fixture parses")
}

/// Open sets of the topology {∅, {b}, {a,b}, {b,c}, {a,b,c}}.
pub fn vee_lattice() -> HeytingLattice {
    let points = ["a", "b", "c"].map(String::from).to_vec();
    let t = FiniteTopology::generate(points, &[vec!["b"], vec!["a", "b"], vec!["b", "c"]])
        .expect("fixture topology");
    HeytingLattice::open_sets(&t)
}
