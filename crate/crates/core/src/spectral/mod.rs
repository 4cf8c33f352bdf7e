//! Periodic-grid field representation on the torus `[0, 2π)³`.
//!
//! Transform convention: `f(x) = Σ_k f̂(k) e^{ik·x}` and
//! `f̂(k) = n⁻³ Σ_x f(x) e^{-ik·x}`. Lebesgue norms use cell weight `(2π/n)³`,
//! so `‖f‖₂² = (2π)³ Σ_k |f̂(k)|²`.

mod fft;
mod field;
mod grid;
mod ops;
pub mod random;
pub mod snapshot;

pub use fft::{plan, Fft3};
pub use field::{PhysicalField, SpectralField};
pub use grid::Grid;
pub use ops::{
    gradient_norm_l2, inner_product, lebesgue_norm, leray_project, leray_project_in_place,
    physical_inner_product, project_coeff, sup_norm,
};

pub(crate) use ops::{components_to_physical, components_to_spectral};
