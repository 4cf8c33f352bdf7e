use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalised 3-D complex FFT on an `m³` row-major array.
pub struct Fft3 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: LazyLock<Mutex<HashMap<usize, Arc<Fft3>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Shared plan for an `m³` transform.
pub fn plan(m: usize) -> Arc<Fft3> {
    let mut plans = PLANS.lock().expect("fft plan cache poisoned");
    plans
        .entry(m)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                m,
                forward: planner.plan_fft_forward(m),
                inverse: planner.plan_fft_inverse(m),
            })
        })
        .clone()
}

impl Fft3 {
    pub fn size(&self) -> usize {
        self.m
    }

    /// `X(k) = Σ_x x(x) e^{-ik·x}` (no normalisation).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(&*self.forward, data);
    }

    /// `x(x) = Σ_k X(k) e^{ik·x}` (no normalisation).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(&*self.inverse, data);
    }

    fn run(&self, fft: &dyn Fft<f64>, data: &mut [Complex64]) {
        let m = self.m;
        assert_eq!(data.len(), m * m * m, "fft buffer has wrong length");
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

        // fastest axis: contiguous lines
        fft.process_with_scratch(data, &mut scratch);

        // middle axis: transpose each plane
        for plane in data.chunks_mut(m * m) {
            transpose_square(plane, m);
            fft.process_with_scratch(plane, &mut scratch);
            transpose_square(plane, m);
        }

        // slowest axis: gather one (k₁, k₃) slab at a time, k₁ contiguous
        let mut slab = vec![Complex64::default(); m * m];
        for i2 in 0..m {
            for i1 in 0..m {
                let row = &data[(i1 * m + i2) * m..(i1 * m + i2 + 1) * m];
                for (i3, v) in row.iter().enumerate() {
                    slab[i3 * m + i1] = *v;
                }
            }
            fft.process_with_scratch(&mut slab, &mut scratch);
            for i1 in 0..m {
                let row = &mut data[(i1 * m + i2) * m..(i1 * m + i2 + 1) * m];
                for (i3, v) in row.iter_mut().enumerate() {
                    *v = slab[i3 * m + i1];
                }
            }
        }
    }
}

fn transpose_square(a: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            a.swap(i * m + j, j * m + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(x: &[Complex64], m: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); x.len()];
        for (kidx, o) in out.iter_mut().enumerate() {
            let k = [kidx / (m * m), (kidx / m) % m, kidx % m];
            for (xidx, v) in x.iter().enumerate() {
                let j = [xidx / (m * m), (xidx / m) % m, xidx % m];
                let phase = -2.0 * PI * ((k[0] * j[0] + k[1] * j[1] + k[2] * j[2]) as f64) / m as f64;
                *o += v * Complex64::from_polar(1.0, phase);
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_on_non_power_of_two() {
        let m = 6;
        let x: Vec<Complex64> = (0..m * m * m)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let expect = naive_dft(&x, m);
        let mut got = x.clone();
        plan(m).forward(&mut got);
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-10);
        }
        plan(m).inverse(&mut got);
        for (a, b) in got.iter().zip(&x) {
            assert!((a / (m * m * m) as f64 - b).norm() < 1e-12);
        }
    }
}
