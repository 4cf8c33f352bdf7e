//! Per-shell nonlinear flux, its paraproduct split, and the shell inequality
//! `d/dt‖u_q‖_s + c λ_q² ‖u_q‖_s ≲ Σ_{p≤q} λ_p^{3/s}‖u_p‖_s Σ_{|p-q|≤2} λ_p‖u_p‖_s
//! + λ_q^{3/s+1} Σ_{p≥q-2} ‖u_p‖_s²`.
//!
//! Products are formed on a `3n/2` grid and truncated back to the `n` grid, so every
//! retained mode of every product is alias-free. All transport fields are divergence
//! free, so `a·∇b` is evaluated as `∇·(a ⊗ b)`.

use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::lambda;
use crate::lp::{build_cutoffs, shell_norms, shell_project, ShellCutoffFamily, ShellField, ShellNorms};
use crate::spectral::{components_to_physical, components_to_spectral, plan, Fft3, Grid, SpectralField};

/// `(rhs_low, rhs_high)` of the shell inequality at shell `q`.
pub fn rhs_bound(norms: &ShellNorms, q: i32, s: &Exponent) -> Result<(f64, f64)> {
    if norms.q_min() != ShellCutoffFamily::Q_MIN {
        return Err(Error::Data(format!(
            "shell norms start at {} instead of {}",
            norms.q_min(),
            ShellCutoffFamily::Q_MIN
        )));
    }
    let q_max = norms.q_max();
    if q < norms.q_min() || q > q_max {
        return Err(Error::ShellOutOfRange { q, q_max });
    }
    let inv_s = s.reciprocal();
    let at = |p: i32| norms.get_or_zero(p);
    let low: f64 = (norms.q_min()..=q).map(|p| lambda(p).powf(3.0 * inv_s) * at(p)).sum();
    let near: f64 = ((q - 2).max(norms.q_min())..=(q + 2).min(q_max))
        .map(|p| lambda(p) * at(p))
        .sum();
    let high: f64 = ((q - 2).max(norms.q_min())..=q_max).map(|p| at(p) * at(p)).sum();
    Ok((low * near, lambda(q).powf(3.0 * inv_s + 1.0) * high))
}

/// Signed flux integrals `∫ ℙΔ_q(·)·u_q|u_q|^{s-2}` at one shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxTerms {
    pub q: i32,
    /// Low-high part `Σ_{|p-q|≤2} u_{≤p-2}·∇u_p`.
    pub i1_signed: f64,
    /// High-low part `Σ_{|p-q|≤2} u_p·∇u_{≤p-2}`.
    pub i2_signed: f64,
    /// Resonant part `Σ_{p≥q-2} ũ_p·∇u_p`, `ũ_p = u_{p-1} + u_p + u_{p+1}`.
    pub i3_signed: f64,
    /// `u·∇u` without splitting.
    pub unsplit: f64,
}

impl FluxTerms {
    pub fn i1(&self) -> f64 {
        self.i1_signed.abs()
    }

    pub fn i2(&self) -> f64 {
        self.i2_signed.abs()
    }

    pub fn i3(&self) -> f64 {
        self.i3_signed.abs()
    }

    pub fn split_sum(&self) -> f64 {
        self.i1_signed + self.i2_signed + self.i3_signed
    }

    /// `|I₁ + I₂ + I₃ - unsplit| / |unsplit|` (absolute when the flux vanishes).
    pub fn decomposition_defect(&self) -> f64 {
        let d = (self.split_sum() - self.unsplit).abs();
        if self.unsplit == 0.0 {
            d
        } else {
            d / self.unsplit.abs()
        }
    }
}

/// Everything measured at one shell and one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellTerms {
    pub flux: FluxTerms,
    /// `(-Δu_q, u_q|u_q|^{s-2}) / (λ_q² ‖u_q‖_s^s)`; `None` for an empty shell.
    pub dissipation_ratio: Option<f64>,
}

/// Grid of size `3n/2` holding alias-free products of `n`-grid fields.
struct Padded {
    grid: Grid,
    m: usize,
    fft: Arc<Fft3>,
}

impl Padded {
    fn new(grid: Grid) -> Self {
        let m = 3 * grid.n() / 2;
        Self { grid, m, fft: plan(m) }
    }

    fn len(&self) -> usize {
        self.m * self.m * self.m
    }

    fn index(&self, k: [i64; 3]) -> usize {
        let m = self.m as i64;
        let w = |x: i64| x.rem_euclid(m) as usize;
        (w(k[0]) * self.m + w(k[1])) * self.m + w(k[2])
    }

    /// Two Hermitian `n`-grid spectra to real values on the padded grid.
    fn to_physical_pair(&self, a: &[Complex64], b: Option<&[Complex64]>) -> (Vec<f64>, Vec<f64>) {
        let mut buf = vec![Complex64::default(); self.len()];
        for idx in 0..self.grid.len() {
            if self.grid.is_nyquist(idx) {
                continue;
            }
            let mut z = a[idx];
            if let Some(b) = b {
                z += Complex64::i() * b[idx];
            }
            if z != Complex64::default() {
                buf[self.index(self.grid.kvec(idx))] = z;
            }
        }
        self.fft.inverse(&mut buf);
        let re = buf.iter().map(|z| z.re).collect();
        let im = if b.is_some() { buf.iter().map(|z| z.im).collect() } else { Vec::new() };
        (re, im)
    }

    fn to_physical(&self, f: &[Vec<Complex64>; 3]) -> [Vec<f64>; 3] {
        let (a, b) = self.to_physical_pair(&f[0], Some(&f[1]));
        let (c, _) = self.to_physical_pair(&f[2], None);
        [a, b, c]
    }

    /// Forward transform of `count` real fields produced by `value(c, x)`, two per buffer.
    fn forward(&self, count: usize, value: impl Fn(usize, usize) -> f64 + Sync) -> Packed {
        let bufs = (0..count.div_ceil(2))
            .map(|j| {
                let (c0, c1) = (2 * j, 2 * j + 1);
                let mut buf: Vec<Complex64> = (0..self.len())
                    .into_par_iter()
                    .map(|x| {
                        let im = if c1 < count { value(c1, x) } else { 0.0 };
                        Complex64::new(value(c0, x), im)
                    })
                    .collect();
                self.fft.forward(&mut buf);
                buf
            })
            .collect();
        Packed {
            bufs,
            norm: 1.0 / self.len() as f64,
        }
    }
}

/// Spectra of real fields packed in pairs as `x + iy`.
struct Packed {
    bufs: Vec<Vec<Complex64>>,
    norm: f64,
}

impl Packed {
    #[inline]
    fn get(&self, c: usize, pk: usize, pmk: usize) -> Complex64 {
        let b = &self.bufs[c / 2];
        let z = b[pk];
        let zc = b[pmk].conj();
        let v = if c.is_multiple_of(2) {
            (z + zc) * 0.5
        } else {
            (z - zc) * Complex64::new(0.0, -0.5)
        };
        v * self.norm
    }
}

/// Mode of the pairing weight `φ_q ℙ ŵ_q` on the support of shell `q`.
struct WeightMode {
    k: [f64; 3],
    pk: usize,
    pmk: usize,
    v: [Complex64; 3],
}

struct ShellWeight {
    q: i32,
    modes: Vec<WeightMode>,
    dissipation_ratio: Option<f64>,
}

fn lebesgue_weight(values: &[Vec<f64>; 3], s: f64) -> [Vec<f64>; 3] {
    let e = (s - 2.0) / 2.0;
    let len = values[0].len();
    let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for x in 0..len {
        let m2 = values[0][x].powi(2) + values[1][x].powi(2) + values[2][x].powi(2);
        let f = if e == 0.0 { 1.0 } else { m2.powf(e) };
        for c in 0..3 {
            out[c][x] = values[c][x] * f;
        }
    }
    out
}

fn shell_weight(
    u: &SpectralField,
    q: i32,
    s: f64,
    cutoffs: &ShellCutoffFamily,
    pad: &Padded,
) -> Result<ShellWeight> {
    let grid = u.grid();
    let n = grid.n();
    let uq = shell_project(u, q, cutoffs)?;
    if uq.field.is_zero() {
        return Ok(ShellWeight {
            q,
            modes: Vec::new(),
            dissipation_ratio: None,
        });
    }
    let phys = components_to_physical(n, uq.field.components());
    let w = components_to_spectral(n, &lebesgue_weight(&phys, s));

    let cell = grid.cell_volume();
    let norm_s: f64 = (0..grid.len())
        .map(|x| {
            let m2 = phys[0][x].powi(2) + phys[1][x].powi(2) + phys[2][x].powi(2);
            m2.powf(s / 2.0)
        })
        .sum::<f64>()
        * cell;
    let mut diss = 0.0;
    let mut modes = Vec::new();
    for idx in 0..grid.len() {
        let k2 = grid.k_squared(idx);
        let what = [w[0][idx], w[1][idx], w[2][idx]];
        for c in 0..3 {
            diss += k2 * (uq.field.component(c)[idx] * what[c].conj()).re;
        }
        if grid.is_nyquist(idx) {
            continue;
        }
        let mult = cutoffs.multiplier(q, k2.sqrt());
        if mult == 0.0 {
            continue;
        }
        let kv = grid.kvec(idx);
        let v = crate::spectral::project_coeff(kv, what).map(|z| z * mult);
        modes.push(WeightMode {
            k: kv.map(|x| x as f64),
            pk: pad.index(kv),
            pmk: pad.index(kv.map(|x| -x)),
            v,
        });
    }
    diss *= Grid::volume();
    let denom = lambda(q).powi(2) * norm_s;
    Ok(ShellWeight {
        q,
        modes,
        dissipation_ratio: (denom > 0.0).then(|| diss / denom),
    })
}

/// `(2π)³ Σ_k Re[N(k)·conj v(k)]` with `N_i = Σ_j i k_j T̂_{ij}` (or `T̂_{ji}` if `transpose`).
fn pair_divergence(t: &Packed, weight: &ShellWeight, transpose: bool) -> f64 {
    let mut acc = 0.0;
    for m in &weight.modes {
        for i in 0..3 {
            let mut ni = Complex64::default();
            for j in 0..3 {
                let c = if transpose { j * 3 + i } else { i * 3 + j };
                ni += t.get(c, m.pk, m.pmk) * m.k[j];
            }
            ni *= Complex64::i();
            acc += (ni * m.v[i].conj()).re;
        }
    }
    acc * Grid::volume()
}

/// Symmetric `u ⊗ u` stored as 6 components.
const SYM: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn sym_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    SYM.iter().position(|&p| p == (a, b)).expect("symmetric index")
}

fn pair_symmetric(t: &Packed, weight: &ShellWeight) -> f64 {
    let mut acc = 0.0;
    for m in &weight.modes {
        for i in 0..3 {
            let mut ni = Complex64::default();
            for j in 0..3 {
                ni += t.get(sym_index(i, j), m.pk, m.pmk) * m.k[j];
            }
            ni *= Complex64::i();
            acc += (ni * m.v[i].conj()).re;
        }
    }
    acc * Grid::volume()
}

fn add_into(acc: &mut [Vec<f64>; 3], f: &[Vec<f64>; 3]) {
    for c in 0..3 {
        acc[c].iter_mut().zip(&f[c]).for_each(|(a, b)| *a += b);
    }
}

/// Flux terms and dissipation ratios at every shell in `qs` for exponent `s >= 2`.
pub fn shell_terms(u: &SpectralField, s: &Exponent, qs: RangeInclusive<i32>) -> Result<Vec<ShellTerms>> {
    s.check_lebesgue()?;
    if s.is_infinite() || s.value() < 2.0 {
        return Err(Error::InvalidExponent(s.value()));
    }
    let sv = s.value();
    let grid = u.grid();
    let cutoffs = build_cutoffs(grid);
    for q in [*qs.start(), *qs.end()] {
        cutoffs.check_shell(q)?;
    }
    let pad = Padded::new(grid);
    let len = pad.len();

    let weights = qs
        .clone()
        .map(|q| shell_weight(u, q, sv, &cutoffs, &pad))
        .collect::<Result<Vec<_>>>()?;

    let shells: Vec<Option<[Vec<f64>; 3]>> = cutoffs
        .shells()
        .map(|p| {
            let up = shell_project(u, p, &cutoffs)?;
            Ok((!up.field.is_zero()).then(|| pad.to_physical(up.field.components())))
        })
        .collect::<Result<_>>()?;
    let shell = |p: i32| -> Option<&[Vec<f64>; 3]> {
        if p < cutoffs.q_min() || p > cutoffs.q_max() {
            return None;
        }
        shells[(p - cutoffs.q_min()) as usize].as_ref()
    };

    let mut i1 = vec![0.0; weights.len()];
    let mut i2 = vec![0.0; weights.len()];
    let mut i3 = vec![0.0; weights.len()];
    let slot = |q: i32| -> Option<usize> { qs.contains(&q).then(|| (q - qs.start()) as usize) };

    let zeros = || [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    let mut low = zeros();
    let mut low_nonzero = false;
    for p in cutoffs.shells() {
        if p - 2 >= cutoffs.q_min() {
            if let Some(f) = shell(p - 2) {
                add_into(&mut low, f);
                low_nonzero = true;
            }
        }
        let Some(up) = shell(p) else { continue };

        if low_nonzero {
            let t = pad.forward(9, |c, x| low[c % 3][x] * up[c / 3][x]);
            for q in p - 2..=p + 2 {
                if let Some(j) = slot(q) {
                    i1[j] += pair_divergence(&t, &weights[j], false);
                    i2[j] += pair_divergence(&t, &weights[j], true);
                }
            }
        }

        let mut tilde = up.clone();
        for nb in [p - 1, p + 1] {
            if let Some(f) = shell(nb) {
                add_into(&mut tilde, f);
            }
        }
        let t = pad.forward(9, |c, x| tilde[c % 3][x] * up[c / 3][x]);
        for (j, q) in qs.clone().enumerate() {
            if q <= p + 2 {
                i3[j] += pair_divergence(&t, &weights[j], false);
            }
        }
    }

    let full = pad.to_physical(u.components());
    let t = pad.forward(6, |c, x| {
        let (a, b) = SYM[c];
        full[a][x] * full[b][x]
    });
    Ok(weights
        .iter()
        .enumerate()
        .map(|(j, w)| ShellTerms {
            flux: FluxTerms {
                q: w.q,
                i1_signed: i1[j],
                i2_signed: i2[j],
                i3_signed: i3[j],
                unsplit: pair_symmetric(&t, w),
            },
            dissipation_ratio: w.dissipation_ratio,
        })
        .collect())
}

/// Signed `I₁, I₂, I₃` and the unsplit flux at a single shell.
pub fn nonlinear_flux_terms(u: &SpectralField, q: i32, s: &Exponent) -> Result<FluxTerms> {
    Ok(shell_terms(u, s, q..=q)?[0].flux)
}

/// `(-Δu_q, u_q|u_q|^{s-2}) / (λ_q² ‖u_q‖_s^s)` for a shell field.
pub fn dissipation_ratio(f: &ShellField, s: &Exponent) -> Result<Option<f64>> {
    if s.is_infinite() || s.value() < 2.0 {
        return Err(Error::InvalidExponent(s.value()));
    }
    let grid = f.field.grid();
    let n = grid.n();
    if f.field.is_zero() {
        return Ok(None);
    }
    let phys = components_to_physical(n, f.field.components());
    let w = components_to_spectral(n, &lebesgue_weight(&phys, s.value()));
    let mut diss = 0.0;
    for idx in 0..grid.len() {
        let k2 = grid.k_squared(idx);
        for c in 0..3 {
            diss += k2 * (f.field.component(c)[idx] * w[c][idx].conj()).re;
        }
    }
    diss *= Grid::volume();
    let norm_s: f64 = (0..grid.len())
        .map(|x| (phys[0][x].powi(2) + phys[1][x].powi(2) + phys[2][x].powi(2)).powf(s.value() / 2.0))
        .sum::<f64>()
        * grid.cell_volume();
    Ok(Some(diss / (lambda(f.q).powi(2) * norm_s)))
}

/// `∫ (u·∇u)·u` with the alias-free product; zero for divergence-free `u` up to rounding.
pub fn energy_flux(u: &SpectralField) -> f64 {
    let grid = u.grid();
    let pad = Padded::new(grid);
    let full = pad.to_physical(u.components());
    let t = pad.forward(6, |c, x| {
        let (a, b) = SYM[c];
        full[a][x] * full[b][x]
    });
    let modes = (0..grid.len())
        .filter(|&idx| !grid.is_nyquist(idx))
        .map(|idx| {
            let kv = grid.kvec(idx);
            WeightMode {
                k: kv.map(|x| x as f64),
                pk: pad.index(kv),
                pmk: pad.index(kv.map(|x| -x)),
                v: [u.component(0)[idx], u.component(1)[idx], u.component(2)[idx]],
            }
        })
        .collect();
    pair_symmetric(
        &t,
        &ShellWeight {
            q: 0,
            modes,
            dissipation_ratio: None,
        },
    )
}

/// Shell norms at one time, with flux terms where they were evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellSample {
    pub t: f64,
    pub norms: ShellNorms,
    pub terms: Option<Vec<ShellTerms>>,
}

/// Measure `u` for the shell inequality; `with_terms` adds the (expensive) flux terms.
pub fn sample_shells(
    t: f64,
    u: &SpectralField,
    s: &Exponent,
    qs: RangeInclusive<i32>,
    with_terms: bool,
) -> Result<ShellSample> {
    let cutoffs = build_cutoffs(u.grid());
    let norms = shell_norms(u, s, &cutoffs)?;
    let terms = if with_terms { Some(shell_terms(u, s, qs)?) } else { None };
    Ok(ShellSample { t, norms, terms })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellInequalityRecord {
    pub t: f64,
    pub q: i32,
    pub s: Exponent,
    /// Centered difference of `‖u_q‖_s`.
    pub lhs_diff: f64,
    /// `λ_q² ‖u_q‖_s`.
    pub lhs_visc: f64,
    pub rhs_low: f64,
    pub rhs_high: f64,
    pub i1: Option<f64>,
    pub i2: Option<f64>,
    pub i3: Option<f64>,
    pub dissipation_ratio: Option<f64>,
}

impl ShellInequalityRecord {
    pub fn rhs(&self) -> f64 {
        self.rhs_low + self.rhs_high
    }
}

/// Right sides of the per-term bounds `I₁, I₂, I₃ ≲ (·) ‖u_q‖_s^{s-1}` at shell `q`.
fn term_bounds(norms: &ShellNorms, q: i32, s: f64) -> [f64; 3] {
    let at = |p: i32| norms.get_or_zero(p);
    let (qmin, qmax) = (norms.q_min(), norms.q_max());
    let near = (q - 2).max(qmin)..=(q + 2).min(qmax);
    let low: f64 = (qmin..=q).map(|p| lambda(p).powf(3.0 / s) * at(p)).sum();
    let low_grad: f64 = (qmin..=q).map(|p| lambda(p).powf(3.0 / s + 1.0) * at(p)).sum();
    let near_grad: f64 = near.clone().map(|p| lambda(p) * at(p)).sum();
    let near_sum: f64 = near.map(at).sum();
    let high: f64 = ((q - 3).max(qmin)..=qmax).map(|p| at(p) * at(p)).sum();
    let w = at(q).powf(s - 1.0);
    [
        low * near_grad * w,
        near_sum * low_grad * w,
        lambda(q).powf(1.0 + 3.0 / s) * high * w,
    ]
}

/// Constants fitted on a trajectory; absent when no record constrains them.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FittedConstants {
    /// `ν · min (-Δu_q, u_q|u_q|^{s-2}) / (λ_q² ‖u_q‖_s^s)` over measured shells.
    pub c_visc: Option<f64>,
    /// Smallest constant for which every record satisfies the inequality.
    pub c_rhs: Option<f64>,
    pub c_i1: Option<f64>,
    pub c_i2: Option<f64>,
    /// Fitted against `λ_q^{1+3/s} Σ_{p≥q-3}‖u_p‖_s² ‖u_q‖_s^{s-1}`.
    pub c_i3: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellInequalityReport {
    pub records: Vec<ShellInequalityRecord>,
    pub constants: FittedConstants,
    /// Indices of records no finite constant can satisfy (positive left side, zero right side).
    pub violations: Vec<usize>,
}

impl ShellInequalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// `lhs_diff + c_visc · lhs_visc` for a record.
    pub fn numerator(&self, r: &ShellInequalityRecord) -> f64 {
        r.lhs_diff + self.constants.c_visc.unwrap_or(0.0) * r.lhs_visc
    }
}

/// Largest sample spacing for centered differences at shells up to `q_hi`.
pub fn required_spacing(q_hi: i32) -> f64 {
    0.1 / lambda(q_hi).powi(2)
}

fn fold_max(acc: Option<f64>, v: f64) -> Option<f64> {
    Some(acc.map_or(v, |a| a.max(v)))
}

/// Build records at every sample carrying flux terms (or at every interior sample if
/// none do) and fit the constants. `nu` converts the dissipation ratio into `c`.
pub fn verify_shell_inequality(
    samples: &[ShellSample],
    qs: RangeInclusive<i32>,
    s: &Exponent,
    nu: f64,
) -> Result<ShellInequalityReport> {
    let limit = required_spacing(*qs.end());
    let any_terms = samples.iter().any(|x| x.terms.is_some());
    let centers: Vec<usize> = (0..samples.len())
        .filter(|&j| if any_terms { samples[j].terms.is_some() } else { j > 0 && j + 1 < samples.len() })
        .collect();
    for &j in &centers {
        if j == 0 || j + 1 >= samples.len() {
            return Err(Error::Data(format!(
                "sample at t = {} has no neighbour for a centered difference",
                samples[j].t
            )));
        }
        let h = (samples[j].t - samples[j - 1].t).max(samples[j + 1].t - samples[j].t);
        if !(h > 0.0) {
            return Err(Error::Data("sample times must be strictly increasing".into()));
        }
        if h > limit {
            return Err(Error::InsufficientResolution { spacing: h, required: limit });
        }
    }

    let sv = s.value();
    let records = centers
        .par_iter()
        .map(|&j| {
            let (prev, cur, next) = (&samples[j - 1], &samples[j], &samples[j + 1]);
            qs.clone()
                .map(|q| {
                    let (rhs_low, rhs_high) = rhs_bound(&cur.norms, q, s)?;
                    let at = |p: i32| cur.norms.get_or_zero(p);
                    let term = cur
                        .terms
                        .as_ref()
                        .and_then(|ts| ts.iter().find(|x| x.flux.q == q));
                    let record = ShellInequalityRecord {
                        t: cur.t,
                        q,
                        s: *s,
                        lhs_diff: (next.norms.get_or_zero(q) - prev.norms.get_or_zero(q)) / (next.t - prev.t),
                        lhs_visc: lambda(q).powi(2) * at(q),
                        rhs_low,
                        rhs_high,
                        i1: term.map(|x| x.flux.i1()),
                        i2: term.map(|x| x.flux.i2()),
                        i3: term.map(|x| x.flux.i3()),
                        dissipation_ratio: term.and_then(|x| x.dissipation_ratio),
                    };
                    Ok((record, term_bounds(&cur.norms, q, sv)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    let (records, bounds): (Vec<_>, Vec<_>) = records.into_iter().unzip();

    let mut constants = FittedConstants::default();
    for r in &records {
        if let Some(rho) = r.dissipation_ratio {
            let c = nu * rho;
            constants.c_visc = Some(constants.c_visc.map_or(c, |a: f64| a.min(c)));
        }
    }
    let c = constants.c_visc.unwrap_or(0.0);
    let mut violations = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let num = r.lhs_diff + c * r.lhs_visc;
        let rhs = r.rhs();
        if rhs > 0.0 {
            constants.c_rhs = fold_max(constants.c_rhs, (num / rhs).max(0.0));
        } else if num > 0.0 {
            violations.push(i);
        }
        let bounds = bounds[i];
        for (k, v) in [r.i1, r.i2, r.i3].into_iter().enumerate() {
            let (Some(v), true) = (v, bounds[k] > 0.0) else { continue };
            let slot = match k {
                0 => &mut constants.c_i1,
                1 => &mut constants.c_i2,
                _ => &mut constants.c_i3,
            };
            *slot = fold_max(*slot, v / bounds[k]);
        }
    }
    Ok(ShellInequalityReport {
        records,
        constants,
        violations,
    })
}
