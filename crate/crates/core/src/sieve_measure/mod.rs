//! The smooth cutoff `chi`, the divisor-sum majorant `nu_A` and the Fourier
//! representation of `e^x chi(x)`.

pub mod cutoff;
pub mod fourier;
pub mod nu;

pub use cutoff::CutoffFunction;
pub use fourier::{fourier_phi, verify_phi_identity, PhiIdentityReport};
pub use nu::{verify_majorization, MajorizationReport, NuEvaluator, NuStats};
