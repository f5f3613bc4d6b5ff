//! Exact computation with finite commutative rings and the geometric objects
//! built from them: prime spectra with the Zariski topology, localizations,
//! presheaves and sheaves of rings, direct limits and stalks, locally ringed
//! spaces, affine schemes and schemes.
//!
//! Every structure is materialized as explicit tables, and every axiom is
//! checked exhaustively. Checkers return either a typed counterexample or a
//! [`report::Report`] of named verdicts.

pub mod bitset;
pub mod error;
pub mod geometry;
pub mod guard;
pub mod limits;
pub mod localization;
pub mod report;
pub mod ring;
pub mod sheaf;
pub mod spectrum;
pub mod topology;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use guard::Guards;
pub use report::{Check, Report, Status};
pub use ring::{Elem, FiniteRing, Ideal, MaximalIdeal, PrimeIdeal, RingHom, Submonoid};
