//! Convolution algebras of relational structures over finite Heyting
//! lattices, complex algebras by relational image, and subobjects of
//! constant étalé spaces over finite topological spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`lattice`]: finite lattices, open-set lattices of finite topologies,
//!   finite chains, and an exhaustive Heyting law checker.
//! * [`relstruct`]: signatures and relational structures of arbitrary type.
//! * [`convolution`]: the convolution algebra `L^X` of lattice-valued maps.
//! * [`complex`]: the complex algebra `P(X)` with relational image.
//! * [`etale`]: open subsets of the constant étalé `X × Y` as families of
//!   opens, fiberwise relational image, and the isomorphism `L^X ≅ X̂⁺`.
//! * [`terms`]: terms, equations and exhaustive satisfaction checking.
//! * [`type2`]: exact operations of the type-2 fuzzy truth value algebra on
//!   step functions, with a brute-force grid oracle.
//! * [`text`]: line-oriented file formats for all of the above.
//!
//! Everything is exact: lattice elements are indices into finite tables,
//! and all numeric values are rationals.

pub mod complex;
pub mod convolution;
mod error;
pub mod etale;
pub mod lattice;
pub mod relstruct;
pub mod terms;
pub mod text;
pub mod type2;

pub use complex::{CarrierSubset, ComplexAlgebra};
pub use convolution::{ConvolutionAlgebra, LatticeMap};
pub use error::{Error, Result};
pub use etale::{ConstantEtale, ConstantRelationalEtale, EtaleSubobject};
pub use lattice::{Elem, FiniteLattice, FiniteTopology, HeytingLattice, PointSet};
pub use relstruct::{Relation, RelationalStructure, Signature};
pub use terms::{Equation, Term};
pub use type2::{GridFunction, StepFunction};

/// Default bound on exhaustive enumerations.
pub const DEFAULT_MAX_ENUM: u128 = 1_000_000;
