//! Numerical flows on spectral measures.
//!
//! The crate simulates diffusion at the level of one-dimensional spectral
//! laws: a forward Ornstein-Uhlenbeck transport flow whose marginals are
//! dilations convolved (freely) with semicircles, the matching reverse-time
//! deconvolution flow, finite-N Hermitian Monte Carlo, a minimizing-movement
//! (JKO) solver for the log-gas free energy, and a verification suite for
//! the entropy / Fisher-information / transport inequalities these flows
//! satisfy.

pub mod convolve;
pub mod error;
pub mod functionals;
pub mod law;
pub mod measure;
pub mod schedule;

pub use convolve::{
    free_convolve_semicircle, semicircle_g, smooth_atoms_to_grid, subordinated_g, AtomicLaw,
    StieltjesSource,
};
pub use error::{Error, Result};
pub use functionals::{
    conjugate_variable, fisher_from_field, free_energy, free_entropy_chi, free_fisher,
    free_fisher_flagged, functional_report, hilbert_transform, log_energy, xi_pairing,
    ConjugateField, FunctionalReport,
};
pub use law::InitialLaw;
pub use measure::{
    semicircle_to_grid, w2, w2_semicircle, AnyMeasure, GridMeasure, ParticleMeasure,
    QuantileFn, SemicircleParams,
};
pub use schedule::{Schedule, ScheduleKind};
