use num_complex::Complex64;

use super::fft::plan;
use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use crate::error::Result;
use crate::exponent::Exponent;

/// Inverse transforms of Hermitian spectra, two per complex FFT as `a + ib`.
pub(crate) fn reals_to_physical(n: usize, coeffs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let fft = plan(n);
    let mut out = Vec::with_capacity(coeffs.len());
    for pair in coeffs.chunks(2) {
        let mut buf: Vec<Complex64> = match pair {
            [a, b] => a.iter().zip(b.iter()).map(|(x, y)| x + Complex64::i() * y).collect(),
            _ => pair[0].to_vec(),
        };
        fft.inverse(&mut buf);
        out.push(buf.iter().map(|z| z.re).collect());
        if pair.len() == 2 {
            out.push(buf.iter().map(|z| z.im).collect());
        }
    }
    out
}

/// Normalised forward transforms of real fields, two per complex FFT. The outputs are
/// exactly Hermitian.
pub(crate) fn reals_to_spectral(n: usize, values: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let fft = plan(n);
    let grid = Grid::new(n, 1.0).expect("transform size is a valid grid");
    let norm = 1.0 / (n * n * n) as f64;
    let mut out = Vec::with_capacity(values.len());
    for pair in values.chunks(2) {
        let mut buf: Vec<Complex64> = match pair {
            [a, b] => a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)).collect(),
            _ => pair[0].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        };
        fft.forward(&mut buf);
        let mut a = vec![Complex64::default(); buf.len()];
        let mut b = if pair.len() == 2 { vec![Complex64::default(); buf.len()] } else { Vec::new() };
        for idx in 0..buf.len() {
            let z = buf[idx];
            let zc = buf[grid.mirror(idx)].conj();
            a[idx] = (z + zc) * (0.5 * norm);
            if !b.is_empty() {
                b[idx] = (z - zc) * Complex64::new(0.0, -0.5 * norm);
            }
        }
        out.push(a);
        if !b.is_empty() {
            out.push(b);
        }
    }
    out
}

pub(crate) fn components_to_physical(n: usize, coeffs: &[Vec<Complex64>; 3]) -> [Vec<f64>; 3] {
    let mut v = reals_to_physical(n, &[&coeffs[0], &coeffs[1], &coeffs[2]]).into_iter();
    std::array::from_fn(|_| v.next().expect("three components"))
}

pub(crate) fn components_to_spectral(n: usize, values: &[Vec<f64>; 3]) -> [Vec<Complex64>; 3] {
    let mut v = reals_to_spectral(n, &[&values[0], &values[1], &values[2]]).into_iter();
    std::array::from_fn(|_| v.next().expect("three components"))
}

/// Spectral derivative `i k_axis ĉ(k)`; Nyquist wavenumbers are differentiated to zero.
#[cfg(test)]
pub(crate) fn mul_ik(grid: Grid, c: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.n();
    let half = n / 2;
    c.iter()
        .enumerate()
        .map(|(i, z)| {
            let ia = match axis {
                0 => i / (n * n),
                1 => (i / n) % n,
                _ => i % n,
            };
            if ia == half {
                Complex64::default()
            } else {
                z * Complex64::new(0.0, grid.wavenumber(ia) as f64)
            }
        })
        .collect()
}

/// `(I - kkᵀ/|k|²) v` for a single mode; zero at `k = 0`.
#[inline]
pub fn project_coeff(k: [i64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
    if k2 == 0.0 {
        return [Complex64::default(); 3];
    }
    let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
    let dot = (v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2]) / k2;
    [v[0] - dot * kf[0], v[1] - dot * kf[1], v[2] - dot * kf[2]]
}

pub fn leray_project_in_place(f: &mut SpectralField) {
    let g = f.grid();
    for i in 0..g.len() {
        let k = g.kvec(i);
        let v = [f.component(0)[i], f.component(1)[i], f.component(2)[i]];
        let p = project_coeff(k, v);
        for (c, pc) in p.into_iter().enumerate() {
            f.component_mut(c)[i] = pc;
        }
    }
}

/// Leray projection onto divergence-free fields.
pub fn leray_project(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    leray_project_in_place(&mut out);
    out
}

pub(crate) fn lebesgue_norm_values(values: &[Vec<f64>; 3], cell: f64, s: &Exponent) -> Result<f64> {
    s.check_lebesgue()?;
    let len = values[0].len();
    let mag2 = |i: usize| values[0][i].powi(2) + values[1][i].powi(2) + values[2][i].powi(2);
    match s {
        Exponent::Infinity => Ok((0..len).fold(0.0f64, |m, i| m.max(mag2(i))).sqrt()),
        _ => {
            let p = s.value();
            let sum: f64 = if p == 2.0 {
                (0..len).map(mag2).sum()
            } else {
                let half = 0.5 * p;
                (0..len).map(|i| mag2(i).powf(half)).sum()
            };
            Ok((cell * sum).powf(1.0 / p))
        }
    }
}

/// `((2π/n)³ Σ_x |f(x)|^s)^{1/s}`, or the grid maximum for `s = ∞`.
pub fn lebesgue_norm(f: &PhysicalField, s: &Exponent) -> Result<f64> {
    lebesgue_norm_values(f.components(), f.grid().cell_volume(), s)
}

pub fn sup_norm(f: &PhysicalField) -> f64 {
    lebesgue_norm(f, &Exponent::Infinity).expect("infinity is a valid exponent")
}

/// `‖∇f‖₂ = ((2π)³ Σ_k |k|² |f̂(k)|²)^{1/2}`.
pub fn gradient_norm_l2(f: &SpectralField) -> f64 {
    let g = f.grid();
    let mut sum = 0.0;
    for i in 0..g.len() {
        let w: f64 = (0..3).map(|c| f.component(c)[i].norm_sqr()).sum();
        sum += g.k_squared(i) * w;
    }
    (Grid::volume() * sum).sqrt()
}

/// L² inner product `(f, h) = (2π)³ Re Σ_k f̂(k)·conj(ĥ(k))`.
pub fn inner_product(f: &SpectralField, h: &SpectralField) -> f64 {
    let mut sum = 0.0;
    for c in 0..3 {
        sum += f
            .component(c)
            .iter()
            .zip(h.component(c))
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>();
    }
    Grid::volume() * sum
}

/// Grid-weighted pairing `(2π/n)³ Σ_x f(x)·h(x)`.
pub fn physical_inner_product(f: &PhysicalField, h: &PhysicalField) -> f64 {
    let sum: f64 = (0..3)
        .map(|c| {
            f.component(c)
                .iter()
                .zip(h.component(c))
                .map(|(a, b)| a * b)
                .sum::<f64>()
        })
        .sum();
    f.grid().cell_volume() * sum
}
