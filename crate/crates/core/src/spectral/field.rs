use num_complex::Complex64;

use super::grid::Grid;
use super::ops::{components_to_physical, components_to_spectral};
use crate::error::{Error, Result};

/// Real velocity field stored as Fourier coefficients over the full `n³` FFT layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: [Vec<Complex64>; 3],
}

/// Real velocity field sampled at `x = 2πj/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: [Vec<f64>; 3],
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![Complex64::default(); grid.len()];
        Self {
            grid,
            coeffs: [z.clone(), z.clone(), z],
        }
    }

    /// Build from raw coefficients, checking Hermitian symmetry and zero mean.
    pub fn from_coeffs(grid: Grid, coeffs: [Vec<Complex64>; 3]) -> Result<Self> {
        if coeffs.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Data(format!(
                "expected {} coefficients per component",
                grid.len()
            )));
        }
        let f = Self { grid, coeffs };
        let scale = f.max_coeff().max(f64::MIN_POSITIVE);
        if f.coeffs.iter().any(|c| c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::Data("non-finite coefficient".into()));
        }
        if f.hermitian_defect() > 1e-12 * scale {
            return Err(Error::Data("coefficients are not Hermitian-symmetric".into()));
        }
        if f.coeffs.iter().any(|c| c[0].norm() > 1e-12 * scale) {
            return Err(Error::Data("field has non-zero mean".into()));
        }
        Ok(f)
    }

    /// Construct without validation; callers guarantee the invariants.
    pub(crate) fn from_coeffs_unchecked(grid: Grid, coeffs: [Vec<Complex64>; 3]) -> Self {
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.coeffs[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.coeffs[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.coeffs
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.coeffs
    }

    pub fn coeff(&self, k: [i64; 3]) -> [Complex64; 3] {
        let i = self.grid.flat_of(k);
        [self.coeffs[0][i], self.coeffs[1][i], self.coeffs[2][i]]
    }

    /// Set the coefficient at `k` and its Hermitian partner at `-k`.
    pub fn set_mode(&mut self, k: [i64; 3], v: [Complex64; 3]) {
        let i = self.grid.flat_of(k);
        let j = self.grid.mirror(i);
        for (c, vc) in v.iter().enumerate() {
            self.coeffs[c][i] = *vc;
            self.coeffs[c][j] = vc.conj();
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max_k |coeff(-k) - conj(coeff(k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.coeffs {
            for (i, z) in c.iter().enumerate() {
                worst = worst.max((c[self.grid.mirror(i)] - z.conj()).norm());
            }
        }
        worst
    }

    /// `max_k |k·coeff(k)| / max_k |coeff(k)|` (0 for the zero field).
    pub fn divergence_defect(&self) -> f64 {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.grid.len() {
            let k = self.grid.kvec(i);
            let kmag = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt().max(1.0);
            let d: Complex64 = (0..3).map(|c| self.coeffs[c][i] * k[c] as f64).sum();
            worst = worst.max(d.norm() / kmag);
        }
        worst / scale
    }

    pub fn is_divergence_free(&self, tol: f64) -> bool {
        self.divergence_defect() <= tol
    }

    /// `Σ_k |coeff(k)|²` over all components.
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// `‖f‖₂²` through Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        Grid::volume() * self.coeff_energy()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(|z| z.re == 0.0 && z.im == 0.0))
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            c.iter_mut().for_each(|z| *z *= a);
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        assert_eq!(self.grid.n(), other.grid.n(), "grid mismatch");
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            c.iter_mut().zip(o).for_each(|(x, y)| *x += y * a);
        }
    }

    /// Multiply every mode by `m(k)`; `m` must be even in `k` to keep the field real.
    pub fn apply_multiplier(&mut self, mut m: impl FnMut(usize) -> f64) {
        for i in 0..self.grid.len() {
            let w = m(i);
            for c in &mut self.coeffs {
                c[i] *= w;
            }
        }
    }

    /// Copy with modes multiplied by a radial profile `m(|k|)`.
    pub fn radial_filtered(&self, m: impl Fn(f64) -> f64) -> Self {
        let g = self.grid;
        let mut out = self.clone();
        out.apply_multiplier(|i| m(g.k_squared(i).sqrt()));
        out
    }

    /// Zero every mode with some `|k_i| > n/3`.
    pub fn dealias(&mut self) {
        let g = self.grid;
        self.apply_multiplier(|i| if g.is_retained(i) { 1.0 } else { 0.0 });
    }

    pub fn to_physical(&self) -> PhysicalField {
        PhysicalField {
            grid: self.grid,
            values: components_to_physical(self.grid.n(), &self.coeffs),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

impl PhysicalField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![0.0; grid.len()];
        Self {
            grid,
            values: [z.clone(), z.clone(), z],
        }
    }

    pub fn from_values(grid: Grid, values: [Vec<f64>; 3]) -> Result<Self> {
        if values.iter().any(|v| v.len() != grid.len()) {
            return Err(Error::Data(format!("expected {} values per component", grid.len())));
        }
        Ok(Self { grid, values })
    }

    /// Sample `f(x)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let n = grid.n();
        let mut out = Self::zeros(grid);
        for i in 0..grid.len() {
            let x = [grid.coord(i / (n * n)), grid.coord((i / n) % n), grid.coord(i % n)];
            let v = f(x);
            for c in 0..3 {
                out.values[c][i] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> [f64; 3] {
        [self.values[0][idx], self.values[1][idx], self.values[2][idx]]
    }

    /// Forward transform; drops the Nyquist-index imaginary residue so the result is
    /// exactly Hermitian.
    pub fn to_spectral(&self) -> SpectralField {
        let coeffs = components_to_spectral(self.grid.n(), &self.values);
        let mut f = SpectralField::from_coeffs_unchecked(self.grid, coeffs);
        symmetrize(&mut f);
        f
    }
}

/// Replace each coefficient pair by its Hermitian average.
pub(crate) fn symmetrize(f: &mut SpectralField) {
    let g = f.grid();
    for c in 0..3 {
        let comp = f.component_mut(c);
        for i in 0..g.len() {
            let j = g.mirror(i);
            if j < i {
                continue;
            }
            let avg = (comp[i] + comp[j].conj()) * 0.5;
            comp[i] = avg;
            comp[j] = avg.conj();
        }
    }
}
