//! Pseudo-spectral Navier-Stokes on the periodic box `[0, 2π)³` together with a
//! Littlewood-Paley diagnostic engine for time-singularity criteria.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grids, Fourier-coefficient fields, transforms, Leray projection, norms.
//! * [`lp`]: dyadic cutoffs, shell projections, Besov norms, Bernstein ratios.
//! * [`solver`]: integrating-factor RK4 integrator with an energy ledger.
//! * [`flux`]: per-shell energy inequality and paraproduct flux terms.
//! * [`criterion`]: dyadic-interval criterion integrals, bad points, Gronwall envelopes.
//! * [`covering`]: Vitali covers of flagged times and Hausdorff premeasures.
//! * [`io`]: CSV series, run manifests and report readers.
//! * [`pipeline`]: the file-level operations behind the `nslab` CLI.

pub mod covering;
pub mod criterion;
pub mod error;
pub mod exponent;
pub mod flux;
pub mod io;
pub mod lp;
pub mod pipeline;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use spectral::{Grid, PhysicalField, SpectralField};

/// Dyadic number `λ_p = 2^p`; `λ_{-1}` is `1/2`.
#[inline]
pub fn lambda(p: i32) -> f64 {
    2f64.powi(p)
}
