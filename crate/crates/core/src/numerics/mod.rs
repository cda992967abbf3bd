//! Numerical building blocks shared by every other module.

pub mod extended;
pub mod linalg;
pub mod noncentral;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;

pub use linalg::{hermitian_eig, hermitian_sqrt, CMatrix, CVector, HermitianEig};
pub use noncentral::{noncentral_chi2_2dof, NoncentralChi2Two};
pub use rng::{sample_standard_complex_gaussian, RngStream};
pub use special::{bessel_i, gamma0_upper};
