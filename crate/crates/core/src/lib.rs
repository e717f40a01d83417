//! Exact dimer-model computations on graphs embedded in closed surfaces.

pub mod cover;
pub mod dimer;
pub mod error;
pub mod identities;
pub mod io;
pub mod kasteleyn;
pub mod lattices;
pub mod pfaffian;
pub mod quadform;
pub mod scalar;
pub mod surface;
pub mod z2;

pub use dimer::{Matching, TwistedZ};
pub use error::{Error, Result};
pub use kasteleyn::Orientation;
pub use scalar::{Exact, Mode, Value, Weight};
pub use surface::{Class, EdgeSet, EmbeddedGraph, HalfEdge, HomologyBasis, SurfaceData};
