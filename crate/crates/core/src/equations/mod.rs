//! The eikonal equation and the compatibility analysis of `|∇u| = 1, Δu = f(u)`.

pub mod christoffel;
pub mod compat;
pub mod eikonal;
pub mod ratfun;

pub use christoffel::{christoffel_check, ChristoffelReport};
pub use compat::{
    dplusf_power, dplusf_power_conjugated, spectrum_identities, verify_ode, CompatConfig,
    OdeReport, SpectrumReport,
};
pub use eikonal::{
    constraint_residuals, eikonal_frame, eikonal_from, eikonal_invariants, eikonal_sample,
    eikonal_standard, fiber_rank, verify_singular_vanishing, EikonalSample,
};
pub use ratfun::{RatFun, UniPoly};
