//! Non-autonomous discrete dynamical systems on finite metric spaces,
//! their hyperspace lifts under the Hausdorff metric, and exact (or
//! horizon-bounded) decision procedures for the standard hierarchy of
//! dynamical properties: dense periodicity, transitivity, mixing, the
//! sensitivity family, equicontinuity, expansivity and open-cover
//! topological entropy.
//!
//! A system is a finite metric space with exact rational distances plus a
//! finite list of self-map tables cycled periodically. Because the space
//! and the family are finite, the time-ordered compositions `ω_n` are
//! eventually periodic in `(n mod p, table)`, which makes every property
//! decidable; detectors return three-valued [`detectors::Verdict`]s that
//! carry replayable witnesses and an exactness flag.

pub mod budget;
pub mod detectors;
pub mod entropy;
pub mod error;
pub mod family;
pub mod hyperspace;
pub mod io;
pub mod pointset;
pub mod rat;
pub mod report;
pub mod space;
pub mod suites;
pub mod zoo;

pub use budget::Budget;
pub use error::Error;
pub use family::{CompositionTrace, MapFamily, System};
pub use hyperspace::HyperPoint;
pub use pointset::PointSet;
pub use rat::Rat;
pub use space::{Metric, NamedSet, SpaceModel};

pub type Result<T> = std::result::Result<T, Error>;
