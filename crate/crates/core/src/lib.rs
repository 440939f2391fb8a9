//! Chaos diagnostics for spin-1/2 chains.
//!
//! The pipeline: enumerate a fixed-magnetization, reflection-symmetric basis
//! (`basis`), assemble dense Hamiltonians for the two chain models
//! (`hamiltonian`), diagonalize and rotate into the mean-field eigenframe
//! (`eigen`), then measure chaos indicators: spacing statistics with a Brody
//! fit (`stats`), strength functions and energy-shell structure (`shell`),
//! and quench dynamics with entropy growth laws (`quench`). `output` writes
//! deterministic CSV/JSON artifacts.

pub mod basis;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod numeric;
pub mod output;
pub mod quench;
pub mod shell;
pub mod stats;

pub use basis::{enumerate_sector, reflect, BasisState, Parity, SectorBasis};
pub use eigen::{
    degenerate_multiplets, diagonalize, eigenvalues_only, mean_field_frame,
    mean_field_representation, MeanFieldFrame, MeanFieldRep, Spectrum,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    assemble, assemble_in_product_basis, build_operator, compose_model, default_n_up,
    perturbation_operator, unperturbed_operator, ModelId, ModelSpec, OperatorKind, SymMatrix,
    Term, TermKind,
};
pub use quench::{
    analytic_entropy, averaged_quench, estimate_npc, evolve, gaussian_survival, linear_entropy,
    time_grid, AveragedQuench, NpcEstimate, QuenchTrace,
};
pub use shell::{
    averaged_strength_function, central_band, criticality_scan, delocalization, energy_shell,
    eigenstate_shell_profile, median_rows, row_statistics, strength_function, weight_matrix,
    CriticalityPoint, CriticalityScan, Delocalization, EnvelopeFit, RowStats, Smoothing,
    StrengthFunction,
};
pub use stats::{
    brody_b, brody_density, brody_inverse_cdf, fit_brody, poisson_density, spacing_histogram,
    unfold, wigner_density, BrodyFit, SpacingEnsemble,
};
