//! Composition operators `C_phi f = f ∘ phi` on Zen spaces of the right
//! half-plane: norms, essential norms, spectral radii, spectra and
//! semigroups, each reduced to computations with the time-domain weight
//! `w` on `(0, inf)`, together with an independent quadrature and
//! discretization layer that cross-checks the closed forms.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod norms;
pub mod oracle;
pub mod quadrature;
pub mod semigroups;
pub mod spectra;
pub mod symbols;
pub mod weights;

pub use error::{Result, ZenError};
pub use num_complex::Complex64;
