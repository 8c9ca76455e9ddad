//! Complex dimension of the closure of a finitely generated subgroup
//! H = Σ Z·u_k of Rⁿ, computed exactly over multi-quadratic fields.
//!
//! Pipeline: [`realparse`] turns text into [`exactnum::RealElement`]s,
//! [`dimension`] builds the integer matrix M_H and reads off p + ri,
//! [`morphism`] handles closed groups E + D and their homomorphisms, and
//! [`relation`] supplies LLL-based relation finding for decimal input.

pub mod dimension;
pub mod exactnum;
pub mod morphism;
pub mod qlinalg;
pub mod realparse;
pub mod relation;

pub use dimension::{ComplexDim, GroupSpec};
pub use exactnum::{Rational, RealElement};
