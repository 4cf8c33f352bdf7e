use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Cubic periodic grid with `n` points per axis on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    nu: f64,
}

impl Grid {
    pub const DOMAIN_LENGTH: f64 = 2.0 * PI;

    pub fn new(n: usize, nu: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("viscosity must be > 0, got {nu}")));
        }
        Ok(Self { n, nu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        Self::new(self.n, nu)
    }

    /// Number of points (and Fourier modes) per component.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        Self::DOMAIN_LENGTH / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    pub fn volume() -> f64 {
        Self::DOMAIN_LENGTH.powi(3)
    }

    /// Signed wavenumber stored at FFT index `i`; the Nyquist index maps to `+n/2`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index holding wavenumber `k` (taken modulo `n`).
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Row-major flat index, `k₁` slowest.
    #[inline]
    pub fn flat(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n + i2) * self.n + i3
    }

    #[inline]
    pub fn flat_of(&self, k: [i64; 3]) -> usize {
        self.flat(self.index_of(k[0]), self.index_of(k[1]), self.index_of(k[2]))
    }

    /// Per-axis FFT indices of a flat index (`n` is a power of two).
    #[inline]
    pub fn axes(&self, idx: usize) -> [usize; 3] {
        let b = self.n.trailing_zeros();
        let mask = self.n - 1;
        [idx >> (2 * b), (idx >> b) & mask, idx & mask]
    }

    #[inline]
    pub fn kvec(&self, idx: usize) -> [i64; 3] {
        self.axes(idx).map(|i| self.wavenumber(i))
    }

    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.kvec(idx);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
    }

    /// Flat index of `-k` for the mode stored at `idx`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let mask = self.n - 1;
        let [a, b, c] = self.axes(idx).map(|i| (self.n - i) & mask);
        self.flat(a, b, c)
    }

    /// True when any component of the mode sits on the Nyquist index.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n / 2;
        self.axes(idx).contains(&h)
    }

    /// Largest retained `|k_i|` under the 2/3 rule.
    pub fn dealias_limit(&self) -> i64 {
        (self.n / 3) as i64
    }

    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        let lim = self.dealias_limit();
        self.kvec(idx).iter().all(|k| k.abs() <= lim)
    }

    /// Physical coordinate `2πj/n` of grid index `j`.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        self.dx() * j as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(8, 1.0).is_err());
        assert!(Grid::new(24, 1.0).is_err());
        assert!(Grid::new(32, 0.0).is_err());
        assert!(Grid::new(32, 1.0).is_ok());
    }

    #[test]
    fn wavenumbers_and_mirror() {
        let g = Grid::new(16, 1.0).unwrap();
        assert_eq!(g.wavenumber(8), 8);
        assert_eq!(g.wavenumber(9), -7);
        let idx = g.flat_of([3, -2, 5]);
        assert_eq!(g.kvec(idx), [3, -2, 5]);
        assert_eq!(g.kvec(g.mirror(idx)), [-3, 2, -5]);
        assert_eq!(g.mirror(0), 0);
        assert!(g.is_nyquist(g.flat_of([8, 0, 0])));
        assert_eq!(g.dealias_limit(), 5);
    }
}
