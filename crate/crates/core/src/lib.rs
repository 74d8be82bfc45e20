//! Linear monads of line-bundle sums over `P^n` and `P^n x P^m`.
//!
//! The crate builds monads `M0 -α-> M1 -β-> M2`, computes the Chern data and
//! exact cohomology dimensions of their kernel and cohomology bundles, locates
//! the degeneration locus of `α`, and issues replayable certificates of slope
//! stability, stability on a divisor, and semistability of degenerate limits.

pub mod algebra;
pub mod cohomology;
pub mod monad;
pub mod picard;
pub mod stability;

pub use algebra::{AlgebraError, MultiDegree, PolyMatrix, Polynomial, VarContext};
pub use cohomology::{CohomVector, HalfSpace, LineBundleSum};
pub use monad::{Monad, MonadError, SheafClass};
pub use picard::{BundleSummary, ChernData, SpaceDescriptor};
pub use stability::{Certificate, DivisorSpec, Verdict};
