//! Nonlinearities, the integral identity and nonexistence certificates.

pub mod certificate;
pub mod nonlinearity;
pub mod residual;

pub use certificate::{
    base_coefficient, certificate_sweep, critical_exponent, nonexistence_certificate, sweep_threshold, Certificate,
    Sweep, TheoremTag, Threshold, Verdict,
};
pub use nonlinearity::{check_growth_condition, GrowthCheck, Nonlinearity};
pub use residual::{
    ball_eigenfunction, ball_eigenvalue, identity_residual, residual_tolerance, FnSolution, IdentityReport,
    PositionField, RadialData, SolutionData, VectorField, ZeroSolution,
};
