//! Error taxonomy shared by every module.
//!
//! Variants are named after the failure they diagnose, not the module that
//! raised them; the CLI maps them onto its exit-code contract.

/// Library-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input points span an affine set of dimension `rank` < `dim`.
    #[error("input does not span a full-dimensional body in R^{dim} (affine rank {rank})")]
    DegenerateInput { dim: usize, rank: usize },

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Intersection is infeasible or not full-dimensional.
    #[error("intersection is empty or lower-dimensional")]
    EmptyIntersection,

    #[error("linear map is singular (|det| = {det:.3e})")]
    SingularMap { det: f64 },

    /// Some facet hyperplane passes through or behind the origin.
    #[error("origin is not strictly interior (smallest facet offset {offset:.3e})")]
    OriginNotInterior { offset: f64 },

    #[error("measure has no atoms")]
    EmptyMeasure,

    #[error("subspaces are not complementary (dims {dim_l} + {dim_lt} in R^{dim})")]
    NotComplementary {
        dim_l: usize,
        dim_lt: usize,
        dim: usize,
    },

    /// Enumeration would exceed the desk-scale guard (m^n tuples).
    #[error("enumeration over {atoms} atoms in dimension {dim} exceeds the desk-scale guard")]
    TooLarge { atoms: usize, dim: usize },

    /// Second-moment spectrum collapsed below the floor; the support does not
    /// span the space to working precision.
    #[error("support degenerate: second-moment eigenvalue {eigenvalue:.3e} below floor")]
    SupportDegenerate { eigenvalue: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e}); {diagnosis}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        diagnosis: String,
    },

    #[error("point lies outside the projection of the body")]
    OutsideProjection,

    #[error("grid resolution {0} too small (need at least 3)")]
    InvalidResolution(usize),

    #[error("polynomial fit ill-conditioned (relative residual {residual:.3e})")]
    IllConditioned { residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
