//! Interface groups for financial transfer architectures.
//!
//! Interfaces are formal integer sums of transfer permissions. An
//! architecture of named local interfaces is closed when its globalized sum
//! vanishes modulo the reflection law `f.a(m)@g + ~g.a(m)@f = 0`.

pub mod algebra;
pub mod architecture;
pub mod error;
pub mod lang;
pub mod locglob;
pub mod reflection;
pub mod transform;

pub use algebra::{ActionId, Alpha, EntityId, Generator, Interface, MotiveAtom, MotiveExpr, Polarity, Scope};
pub use error::{Error, Result};
