//! Scalar invariants, `α^k` invariants, classification and isometries.

mod alpha;
mod classify;
mod isometry;
mod weyl;

pub use alpha::{
    alpha_direct, alpha_sequence, alpha_via_theta, alpha_via_theta_form, psi_derivative, psi_of, AlphaSequence,
    ThetaForm,
};
pub use classify::{classify, is_constant, partials_vanish, AlphaConstancy, Classification, Grid, HomogeneityOrder};
pub use isometry::{
    build_isometry, isometry_decision, Isometry, IsometryReport, IsometryVerdict, ALPHA_K_MAX, ALPHA_REL_TOL, FD_STEP,
    FD_TOL,
};
pub use weyl::{
    enumerate_schemes, evaluate_scheme, rho_squared_scheme, sphere_block, tau_scheme, ContractionScheme, CurvatureData,
    MAX_SLOTS,
};
