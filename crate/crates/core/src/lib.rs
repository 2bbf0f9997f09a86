//! Two-mode (dimer) reduction of the nonlinear Schrödinger equation with a
//! symmetric double-well potential.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: bracketing, bisection and golden-section helpers.
//! * [`dimer`]: closed-form pieces of the two-mode model (Hamiltonian, vector
//!   field, stationarity functions, critical constants).
//! * [`stationary`]: stationary points, stability, bifurcation diagrams and
//!   phase-portrait data.
//! * [`dynamics`]: adaptive Dormand–Prince integration in the phase and
//!   amplitude charts.
//! * [`reduction`]: from a concrete 1D double well to the dimer parameters
//!   (splitting, nonlinear constant, ε ↔ η map).

// NaN must fail validation, so range checks are written as `!(x > lo)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimer;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod reduction;
pub mod stationary;

pub use dimer::{
    amplitude_hamiltonian, d2eta_at_zero, eta_of_z, eta_plus, eta_star, f_pm, fold_condition,
    fold_location, fold_root, g_func, hamiltonian, mu_threshold, to_amplitudes, to_phase,
    vector_field, AmplitudePair, DimerParams, FlowVector, PhasePoint, PhaseReading, StabilityTag,
    StationarySign, DELTA_SING,
};
pub use dynamics::{
    beating_period, integrate_amplitudes, integrate_phase, Chart, IntegrationSettings, Trajectory,
    TrajectoryStates, TrajectoryStatus,
};
pub use error::{DimerError, Result};
pub use reduction::{
    compute_c, cross_terms, epsilon_of_eta, map_epsilon_to_eta, solve_doublet, CrossTerms,
    PotentialFamily, PotentialSpec, ReductionOptions, ReductionResult,
};
pub use stationary::{
    bifurcation_diagram, classify_stability, find_stationary_points, phase_portrait, Branch,
    BranchLabel, BranchSample, PhasePortrait, StationaryPoint, TOL_DEGENERATE,
};
