//! Cone-volume measures of convex polytopes and the machinery around them:
//! subspace concentration checks, moment functionals, isotropic positions,
//! shape distances, section profiles, classical transforms, and stability
//! probes. Everything is deterministic: fixed seeds, ordered reductions,
//! and a byte-stable report writer.

pub mod error;
pub mod geom;
pub mod io;
pub mod isotropic;
pub mod measure;
pub mod metrics;
pub mod par;
pub mod report;
pub mod scc;
pub mod sections;
pub mod acceptance;
pub mod corpus;
pub mod probes;
pub mod subspace;
pub mod tol;
pub mod transforms;
pub mod ufunc;

pub use error::{Error, Result};
pub use geom::Polytope;
pub use measure::{cone_volume_measure, DiscreteSphericalMeasure};
pub use subspace::Subspace;
pub use tol::Tolerances;
