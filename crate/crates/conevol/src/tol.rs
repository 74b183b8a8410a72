//! Tolerance ladder.
//!
//! All inputs are desk scale (coordinates of order one), so the thresholds
//! are absolute unless a field says otherwise. Rank and feasibility decisions
//! sit at 1e-9, comparisons of reported values at 1e-12, spectral floors at
//! 1e-14. Keeping the ladder in one struct makes every cutoff auditable.

/// Numeric cutoffs used across the library.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Rank, feasibility and hyperplane-membership decisions.
    pub rank: f64,
    /// Comparisons of reported values.
    pub compare: f64,
    /// Max-norm distance under which two vertices are the same point.
    pub vertex_dedup: f64,
    /// Facets with surface measure below this are dropped from measures.
    pub facet_area_floor: f64,
    /// Angular distance under which two atom directions merge.
    pub atom_merge: f64,
    /// Relative band (times total mass) for concentration equality.
    pub scc_equality: f64,
    /// Relative band for the reported near-equality list.
    pub scc_near_equality: f64,
    /// Entrywise distance between projection matrices under which two
    /// subspaces are the same.
    pub span_dedup: f64,
    /// |det| threshold for calling a tuple of unit vectors independent.
    pub independence: f64,
    /// Floor for second-moment eigenvalues.
    pub eigen_floor: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        rank: 1e-9,
        compare: 1e-12,
        vertex_dedup: 1e-10,
        facet_area_floor: 1e-12,
        atom_merge: 1e-9,
        scc_equality: 1e-9,
        scc_near_equality: 1e-4,
        span_dedup: 1e-8,
        independence: 1e-9,
        eigen_floor: 1e-14,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
