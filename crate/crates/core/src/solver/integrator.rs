use num_complex::Complex64;

use super::config::{Mode, SolverConfig};
use crate::error::{Error, Result};
use std::sync::{Arc, Mutex};

use crate::spectral::{plan, project_coeff, Grid, SpectralField};

/// Fraction of the advective/viscous stability limit a step may use.
pub const CFL_SAFETY: f64 = 0.5;

/// `ℙ ∇·(u ⊗ u)`, which equals `ℙ(u·∇u)` for divergence-free `u`, together with
/// `max_x |u(x)|`. With `dealias` the input and output are truncated by the 2/3 rule.
pub fn advection_term(u: &SpectralField, dealias: bool) -> (SpectralField, f64) {
    let g = u.grid();
    let len = g.len();
    let fft = plan(g.n());
    let keep = |idx: usize| !dealias || g.is_retained(idx);
    let [u0, u1, u2] = u.components();

    // u₀ + iu₁ and u₂ in one pair of inverse transforms
    let mut a: Vec<Complex64> = (0..len)
        .map(|i| if keep(i) { u0[i] + Complex64::i() * u1[i] } else { Complex64::default() })
        .collect();
    let mut b: Vec<Complex64> = (0..len)
        .map(|i| if keep(i) { u2[i] } else { Complex64::default() })
        .collect();
    fft.inverse(&mut a);
    fft.inverse(&mut b);
    let umax = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x.norm_sqr() + y.re * y.re)
        .fold(0.0f64, f64::max)
        .sqrt();

    // symmetric products packed as (u₀u₀ + iu₀u₁), (u₀u₂ + iu₁u₁), (u₁u₂ + iu₂u₂)
    let mut prods: [Vec<Complex64>; 3] = std::array::from_fn(|_| Vec::with_capacity(len));
    for (x, y) in a.iter().zip(&b) {
        let (v0, v1, v2) = (x.re, x.im, y.re);
        prods[0].push(Complex64::new(v0 * v0, v0 * v1));
        prods[1].push(Complex64::new(v0 * v2, v1 * v1));
        prods[2].push(Complex64::new(v1 * v2, v2 * v2));
    }
    drop((a, b));
    for p in &mut prods {
        fft.forward(p);
    }

    // slot of u_i u_j within the packed buffers: (buffer, imaginary part)
    const SLOT: [[(usize, bool); 3]; 3] = [
        [(0, false), (0, true), (1, false)],
        [(0, true), (1, true), (2, false)],
        [(1, false), (2, false), (2, true)],
    ];
    let norm = 1.0 / len as f64;
    let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::default(); len]);
    for idx in 0..len {
        if g.is_nyquist(idx) || !keep(idx) {
            continue;
        }
        let m = g.mirror(idx);
        let unpack = |(buf, imag): (usize, bool)| {
            let z = prods[buf][idx];
            let zc = prods[buf][m].conj();
            if imag {
                (z - zc) * Complex64::new(0.0, -0.5 * norm)
            } else {
                (z + zc) * (0.5 * norm)
            }
        };
        let k = g.kvec(idx);
        let kf = k.map(|x| x as f64);
        let v: [Complex64; 3] = std::array::from_fn(|i| {
            let acc = unpack(SLOT[i][0]) * kf[0] + unpack(SLOT[i][1]) * kf[1] + unpack(SLOT[i][2]) * kf[2];
            Complex64::new(-acc.im, acc.re)
        });
        for (c, pc) in project_coeff(k, v).into_iter().enumerate() {
            out[c][idx] = pc;
        }
    }
    (SpectralField::from_coeffs_unchecked(g, out), umax)
}

/// New field with `out_c(i) = f(c, i)`.
fn combine(grid: Grid, f: impl Fn(usize, usize) -> Complex64) -> SpectralField {
    let coeffs = std::array::from_fn(|c| (0..grid.len()).map(|i| f(c, i)).collect());
    SpectralField::from_coeffs_unchecked(grid, coeffs)
}

/// Integrating-factor RK4 stepper (Lawson form) with exact viscous decay
/// `exp(-ν|k|² dt)`.
pub struct Integrator {
    grid: Grid,
    mode: Mode,
    dealias: bool,
    forcing: Option<SpectralField>,
    /// `(dt, e^{-ν|k|²dt/2}, e^{-ν|k|²dt})` for the last step size used.
    factors: Mutex<Option<(f64, Arc<[Vec<f64>; 2]>)>>,
}

impl Integrator {
    pub fn new(grid: Grid, mode: Mode, dealias: bool, forcing: Option<SpectralField>) -> Self {
        Self {
            grid,
            mode,
            dealias,
            forcing,
            factors: Mutex::new(None),
        }
    }

    pub fn from_config(cfg: &SolverConfig) -> Self {
        Self::new(cfg.grid, cfg.mode, cfg.dealias, cfg.forcing.build(cfg.grid))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Largest admissible `dt` given `max|u|`.
    pub fn cfl_limit(&self, umax: f64) -> f64 {
        let dx = self.grid.dx();
        let viscous = dx * dx / self.grid.nu();
        let advective = if umax > 0.0 { dx / umax } else { f64::INFINITY };
        CFL_SAFETY * viscous.min(advective)
    }

    /// Right-hand side without the viscous term: `-ℙ(u·∇u) + f`, plus `max|u|`.
    fn rhs(&self, u: &SpectralField) -> (SpectralField, f64) {
        let (mut out, umax) = match self.mode {
            Mode::Full => {
                let (mut adv, umax) = advection_term(u, self.dealias);
                adv.scale(-1.0);
                (adv, umax)
            }
            Mode::Stokes => (
                SpectralField::zeros(self.grid),
                crate::spectral::sup_norm(&u.to_physical()),
            ),
        };
        if let Some(f) = &self.forcing {
            out.axpy(1.0, f);
        }
        (out, umax)
    }

    fn decay(&self, dt: f64) -> Arc<[Vec<f64>; 2]> {
        let mut cache = self.factors.lock().expect("decay cache poisoned");
        if let Some((h, f)) = cache.as_ref() {
            if *h == dt {
                return f.clone();
            }
        }
        let g = self.grid;
        let nu = g.nu();
        let at = |h: f64| (0..g.len()).map(|i| (-nu * g.k_squared(i) * h).exp()).collect();
        let f = Arc::new([at(0.5 * dt), at(dt)]);
        *cache = Some((dt, f.clone()));
        f
    }

    /// Advance `u` from time `t` by `dt`.
    pub fn step(&self, u: &SpectralField, t: f64, dt: f64) -> Result<SpectralField> {
        let factors = self.decay(dt);
        let [eh, ef] = &*factors;
        let g = self.grid;
        let u_ = u.components();

        let (k1, umax) = self.rhs(u);
        let limit = self.cfl_limit(umax);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { t, dt, limit });
        }
        let k1_ = k1.components();
        let a = combine(g, |c, i| (u_[c][i] + k1_[c][i] * (0.5 * dt)) * eh[i]);
        let (k2, _) = self.rhs(&a);
        drop(a);
        let k2_ = k2.components();
        let b = combine(g, |c, i| u_[c][i] * eh[i] + k2_[c][i] * (0.5 * dt));
        let (k3, _) = self.rhs(&b);
        drop(b);
        let k3_ = k3.components();
        let c = combine(g, |c, i| u_[c][i] * ef[i] + k3_[c][i] * (dt * eh[i]));
        let (k4, _) = self.rhs(&c);
        drop(c);
        let k4_ = k4.components();
        let next = combine(g, |c, i| {
            (u_[c][i] + k1_[c][i] * (dt / 6.0)) * ef[i]
                + (k2_[c][i] + k3_[c][i]) * (dt / 3.0 * eh[i])
                + k4_[c][i] * (dt / 6.0)
        });

        if !next.all_finite() {
            return Err(Error::BlowUp { last_valid_time: t });
        }
        Ok(next)
    }
}
