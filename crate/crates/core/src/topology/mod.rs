//! Two-complexes built by capping monochrome cycles, their first homology,
//! and certificates of simple connectivity.

mod complex;
mod snf;
pub mod todd_coxeter;

pub use complex::{
    build_complex, homology_h1, presentation, simply_connected, Pi1Status, Pi1Verdict,
    Presentation, TwoComplex,
};
pub use snf::{smith_invariants, Matrix};
pub use todd_coxeter::{enumerate_cosets, CosetOutcome, CosetTable};

pub const DEFAULT_BUDGET: usize = 100_000;
