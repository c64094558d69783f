//! Exterior calculus on `J^1(R^n)` and the forms attached to `|∇u| = 1, Δu = f(u)`.

pub mod coef;
pub mod ext;
pub mod omega;
pub mod sections;

pub use coef::Coef;
pub use ext::{hamiltonian, ExtForm, VectorField};
pub use omega::{omega_display, omega_forms, omega_one, omega_recursion, sigma, OmegaReport};
pub use sections::{
    contact_reduction_n2, contact_theta, monge_ampere, pull_to_section, section_forms_display,
    section_forms_n3, ContactReport, MongeAmpere, SectionReport,
};
