//! Seeded random fields used as initial conditions and as test data.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::field::SpectralField;
use super::grid::Grid;
use super::ops::{leray_project_in_place, project_coeff};

/// Canonical representative of the pair `{k, -k}`: first non-zero component positive.
fn is_canonical(k: [i64; 3]) -> bool {
    match k.iter().find(|&&c| c != 0) {
        Some(&c) => c > 0,
        None => false,
    }
}

fn gaussian3<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 3] {
    let mut g = || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    };
    [g(), g(), g()]
}

/// White-noise Hermitian field on every mode with `|k_i| < n/2`, zero mean, unit-variance
/// coefficients. Not divergence-free.
pub fn random_hermitian<R: Rng + ?Sized>(grid: Grid, rng: &mut R) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    let h = (grid.n() / 2) as i64;
    for k1 in -(h - 1)..h {
        for k2 in -(h - 1)..h {
            for k3 in -(h - 1)..h {
                let k = [k1, k2, k3];
                if is_canonical(k) {
                    f.set_mode(k, gaussian3(rng));
                }
            }
        }
    }
    f
}

/// Divergence-free white-noise field.
pub fn random_divfree<R: Rng + ?Sized>(grid: Grid, rng: &mut R) -> SpectralField {
    let mut f = random_hermitian(grid, rng);
    leray_project_in_place(&mut f);
    f
}

/// Parameters of the band-limited random initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSpec {
    /// Shell energy spectrum `E(|k|) ∝ |k|^slope · exp(-|k|²/kc²)`.
    pub slope: f64,
    pub kc: f64,
    /// Target `sqrt(‖u‖₂² / (2π)³)`.
    pub urms: f64,
    pub seed: u64,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        Self {
            slope: -2.0,
            kc: 3.0,
            urms: 1.0,
            seed: 0,
        }
    }
}

/// Random divergence-free field with a prescribed spectrum.
///
/// Modes are drawn in a fixed order over the cube `|k_i| <= ceil(3 kc)`, independent
/// of `n`, so two grids that both represent the cube receive identical coefficients.
/// Modes the grid cannot hold (beyond `n/2 - 1`) are drawn and discarded.
pub fn random_spectrum_field(grid: Grid, spec: &SpectrumSpec) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let kmax = (3.0 * spec.kc).ceil() as i64;
    let h = (grid.n() / 2) as i64;
    let mut modes = Vec::new();
    let mut energy = 0.0;
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            for k3 in -kmax..=kmax {
                let k = [k1, k2, k3];
                if !is_canonical(k) {
                    continue;
                }
                let g = gaussian3(&mut rng);
                let kk = ((k1 * k1 + k2 * k2 + k3 * k3) as f64).sqrt();
                let amp = kk.powf(0.5 * (spec.slope - 2.0)) * (-(kk * kk) / (2.0 * spec.kc * spec.kc)).exp();
                let v = project_coeff(k, [g[0] * amp, g[1] * amp, g[2] * amp]);
                energy += 2.0 * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
                modes.push((k, v));
            }
        }
    }
    let scale = if energy > 0.0 { spec.urms / energy.sqrt() } else { 0.0 };
    let mut f = SpectralField::zeros(grid);
    for (k, v) in modes {
        if k.iter().all(|c| c.abs() < h) {
            f.set_mode(k, [v[0] * scale, v[1] * scale, v[2] * scale]);
        }
    }
    f
}

/// Leray-projected point source `ℙ(e δ_{x0})` restricted to modes with `|k_i| < n/2`.
pub fn point_source(grid: Grid, x0: [f64; 3], e: [f64; 3]) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    let h = (grid.n() / 2) as i64;
    let norm = 1.0 / Grid::volume();
    for k1 in -(h - 1)..h {
        for k2 in -(h - 1)..h {
            for k3 in -(h - 1)..h {
                let k = [k1, k2, k3];
                if !is_canonical(k) {
                    continue;
                }
                let phase = -(k1 as f64 * x0[0] + k2 as f64 * x0[1] + k3 as f64 * x0[2]);
                let z = Complex64::from_polar(norm, phase);
                f.set_mode(k, project_coeff(k, [z * e[0], z * e[1], z * e[2]]));
            }
        }
    }
    f
}
