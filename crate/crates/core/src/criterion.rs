//! Criterion quantities on shell-norm time series.
//!
//! `Λ_p(t₀) = λ_p^{r(3/s+2/r-1)} ∫_{I_p(t₀)} Σ_{q≥p-2} ‖u_q(t)‖_s^r dt` with
//! `I_p(t₀) = [t₀ - λ_p^{-2}, t₀]`. A time is bad when `Λ_p(t₀) >= δ^r` along the
//! largest scanned scales, the finite-data stand-in for the `limsup`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::{Exponent, Rational};
use crate::lambda;
use crate::lp::ShellNorms;

/// Minimum number of stored samples inside an integration interval.
pub const MIN_SAMPLES: usize = 8;

/// Default number of largest scales whose maximum replaces the `limsup`.
pub const DEFAULT_TAIL: usize = 3;

fn slack(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}

/// `‖u_q(t)‖_s` sampled at increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellNormSeries {
    times: Vec<f64>,
    norms: Vec<ShellNorms>,
    s: Exponent,
    source: String,
}

impl ShellNormSeries {
    pub fn new(times: Vec<f64>, norms: Vec<ShellNorms>, s: Exponent, source: impl Into<String>) -> Result<Self> {
        if times.len() != norms.len() {
            return Err(Error::Data(format!(
                "{} times but {} norm records",
                times.len(),
                norms.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::Data("empty shell-norm series".into()));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Data(format!("times not strictly increasing at t = {}", w[1])));
            }
        }
        let (lo, hi) = (norms[0].q_min(), norms[0].q_max());
        for (t, n) in times.iter().zip(&norms) {
            if n.q_min() != lo || n.q_max() != hi {
                return Err(Error::Data(format!("shell range changes at t = {t}")));
            }
            if n.values().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Data(format!("negative or non-finite norm at t = {t}")));
            }
        }
        Ok(Self {
            times,
            norms,
            s,
            source: source.into(),
        })
    }

    /// Series with `‖u_q(t)‖_s = f(t, q)` for `q ∈ [q_min, q_max]`.
    pub fn from_fn(
        times: Vec<f64>,
        q_min: i32,
        q_max: i32,
        s: Exponent,
        source: impl Into<String>,
        f: impl Fn(f64, i32) -> f64,
    ) -> Result<Self> {
        let norms = times
            .iter()
            .map(|&t| ShellNorms::new(q_min, (q_min..=q_max).map(|q| f(t, q)).collect()))
            .collect();
        Self::new(times, norms, s, source)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn norms(&self) -> &[ShellNorms] {
        &self.norms
    }

    pub fn s(&self) -> Exponent {
        self.s
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn q_min(&self) -> i32 {
        self.norms[0].q_min()
    }

    pub fn q_max(&self) -> i32 {
        self.norms[0].q_max()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    fn check_covers(&self, a: f64, b: f64) -> Result<()> {
        if a < self.start() - slack(self.start()) || b > self.end() + slack(self.end()) {
            return Err(Error::IntervalOutOfRange {
                start: a,
                end: b,
                first: self.start(),
                last: self.end(),
            });
        }
        Ok(())
    }

    /// Stored sample indices in `[a, b]` (with rounding slack).
    fn inside(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let lo = self.times.partition_point(|&t| t < a - slack(a));
        let hi = self.times.partition_point(|&t| t <= b + slack(b));
        lo..hi.max(lo)
    }

    /// Linear interpolation of `g` (a function of the sample index) at `t`.
    fn interpolate(&self, t: f64, g: &impl Fn(usize) -> f64) -> f64 {
        let j = self.times.partition_point(|&x| x < t);
        if j == 0 {
            return g(0);
        }
        if j >= self.times.len() {
            return g(self.times.len() - 1);
        }
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        if (t1 - t).abs() <= slack(t) {
            return g(j);
        }
        let w = (t - t0) / (t1 - t0);
        (1.0 - w) * g(j - 1) + w * g(j)
    }

    /// Trapezoid rule over stored samples in `[a, b]`, endpoints interpolated.
    fn integrate(&self, a: f64, b: f64, g: impl Fn(usize) -> f64) -> Result<f64> {
        self.check_covers(a, b)?;
        let idx = self.inside(a, b);
        if idx.len() < MIN_SAMPLES {
            return Err(Error::InsufficientSamples {
                start: a,
                end: b,
                found: idx.len(),
                required: MIN_SAMPLES,
                max_spacing: (b - a) / (MIN_SAMPLES - 1) as f64,
            });
        }
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(idx.len() + 2);
        let first = self.times[idx.start];
        if first - a > slack(a) {
            pts.push((a, self.interpolate(a, &g)));
        }
        pts.extend(idx.clone().map(|j| (self.times[j], g(j))));
        let last = self.times[idx.end - 1];
        if b - last > slack(b) {
            pts.push((b, self.interpolate(b, &g)));
        }
        Ok(pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum())
    }

    /// `sup ‖u_q‖_s` over the stored samples in `[a, b]` and the interpolated endpoints.
    fn sup_on(&self, q: i32, a: f64, b: f64) -> Result<f64> {
        self.check_covers(a, b)?;
        let g = |j: usize| self.norms[j].get_or_zero(q);
        let inner = self.inside(a, b).map(g).fold(0.0, f64::max);
        Ok(inner.max(self.interpolate(a, &g)).max(self.interpolate(b, &g)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionParams {
    /// Time exponent, `r > 2`.
    pub r: Exponent,
    /// Space exponent, `s > 3`.
    pub s: Exponent,
    pub alpha: f64,
    pub delta: f64,
    pub p_min: i32,
    pub p_max: i32,
    /// Number of largest scanned scales whose maximum stands in for the `limsup`.
    pub tail: usize,
}

impl CriterionParams {
    pub fn new(r: Exponent, s: Exponent, alpha: f64, delta: f64, p_min: i32, p_max: i32) -> Result<Self> {
        let p = Self {
            r,
            s,
            alpha,
            delta,
            p_min,
            p_max,
            tail: DEFAULT_TAIL,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tail(mut self, tail: usize) -> Result<Self> {
        self.tail = tail;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.r.value() > 2.0) || self.r.is_infinite() {
            return bad(format!("time exponent r must be a finite number > 2, got {}", self.r));
        }
        if !(self.s.value() > 3.0) {
            return bad(format!("space exponent s must be > 3, got {}", self.s));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("delta must lie in (0, 1], got {}", self.delta));
        }
        if self.p_min > self.p_max {
            return bad(format!("empty scale range [{}, {}]", self.p_min, self.p_max));
        }
        if self.tail == 0 {
            return bad("tail must be at least 1".into());
        }
        Ok(())
    }

    /// `δ^r`.
    pub fn threshold(&self) -> f64 {
        self.delta.powf(self.r.value())
    }

    /// Scales whose maximum is the bad-point proxy.
    pub fn tail_scales(&self) -> std::ops::RangeInclusive<i32> {
        (self.p_max - self.tail as i32 + 1).max(self.p_min)..=self.p_max
    }
}

/// `r(3/s + 2/r - 1)`.
pub fn scaling_exponent(r: &Exponent, s: &Exponent) -> f64 {
    let r = r.value();
    r * (3.0 * s.reciprocal() + 2.0 / r - 1.0)
}

/// `r(3/s + 2/r - 1)` in exact arithmetic.
pub fn scaling_exponent_exact(r: Rational, s: Rational) -> Rational {
    r * (Rational::from_integer(3) / s + Rational::from_integer(2) / r - Rational::from_integer(1))
}

/// `I_p(t₀) = [t₀ - λ_p^{-2}, t₀]`.
pub fn dyadic_interval(p: i32, t0: f64) -> (f64, f64) {
    (t0 - lambda(p).powi(-2), t0)
}

/// `I_p(t₀)`, rejected if it leaves the series.
pub fn dyadic_interval_in(series: &ShellNormSeries, p: i32, t0: f64) -> Result<(f64, f64)> {
    let (a, b) = dyadic_interval(p, t0);
    series.check_covers(a, b)?;
    Ok((a, b))
}

fn check_exponent(series: &ShellNormSeries, params: &CriterionParams) -> Result<()> {
    if series.s().value() != params.s.value() {
        return Err(Error::InvalidArgument(format!(
            "series holds s = {} but the criterion asks for s = {}",
            series.s(),
            params.s
        )));
    }
    Ok(())
}

/// `Λ_p(t₀)`.
pub fn criterion_integral(series: &ShellNormSeries, params: &CriterionParams, p: i32, t0: f64) -> Result<f64> {
    check_exponent(series, params)?;
    let r = params.r.value();
    let (a, b) = dyadic_interval(p, t0);
    let lo = (p - 2).max(series.q_min());
    let hi = series.q_max();
    let integral = series.integrate(a, b, |j| {
        let n = &series.norms()[j];
        (lo..=hi).map(|q| n.get_or_zero(q).powf(r)).sum::<f64>()
    })?;
    Ok(lambda(p).powf(scaling_exponent(&params.r, &params.s)) * integral)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionEntry {
    pub t0: f64,
    pub p: i32,
    pub lambda_p: f64,
    pub integral: f64,
    /// The time is bad and this scale reaches the threshold.
    pub bad: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSummary {
    pub t0: f64,
    /// `max` of `Λ_p(t₀)` over the tail scales.
    pub proxy: f64,
    pub bad: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub params: CriterionParams,
    /// One entry per `(t₀, p)`, ordered by `t₀` then `p`.
    pub entries: Vec<CriterionEntry>,
    pub points: Vec<PointSummary>,
}

impl CriterionReport {
    pub fn bad_times(&self) -> Vec<f64> {
        self.points.iter().filter(|x| x.bad).map(|x| x.t0).collect()
    }

    /// Largest proxy over all scanned times.
    pub fn max_proxy(&self) -> f64 {
        self.points.iter().map(|x| x.proxy).fold(0.0, f64::max)
    }

    /// For every bad time, the smallest flagged scale `>= floor`.
    pub fn bad_points(&self, floor: i32) -> Vec<(f64, i32)> {
        bad_points_from_entries(&self.entries, floor)
    }
}

/// `(t₀, p)` pairs for the cover: per bad time, the smallest flagged `p >= floor`.
pub fn bad_points_from_entries(entries: &[CriterionEntry], floor: i32) -> Vec<(f64, i32)> {
    let mut out: Vec<(f64, i32)> = Vec::new();
    for e in entries.iter().filter(|e| e.bad && e.p >= floor) {
        match out.iter_mut().find(|x| x.0 == e.t0) {
            Some(x) => x.1 = x.1.min(e.p),
            None => out.push((e.t0, e.p)),
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// All stored times at least `λ_{p_min}^{-2}` after the start of the series.
pub fn default_t0_grid(series: &ShellNormSeries, params: &CriterionParams) -> Vec<f64> {
    let first = series.start() + lambda(params.p_min).powi(-2);
    series
        .times()
        .iter()
        .copied()
        .filter(|&t| t >= first - slack(first))
        .collect()
}

pub fn detect_bad_points(
    series: &ShellNormSeries,
    params: &CriterionParams,
    t0_grid: &[f64],
) -> Result<CriterionReport> {
    params.validate()?;
    check_exponent(series, params)?;
    let threshold = params.threshold();
    let tail = params.tail_scales();
    let per_point = t0_grid
        .par_iter()
        .map(|&t0| {
            let values = (params.p_min..=params.p_max)
                .map(|p| criterion_integral(series, params, p, t0))
                .collect::<Result<Vec<f64>>>()?;
            let proxy = tail
                .clone()
                .map(|p| values[(p - params.p_min) as usize])
                .fold(0.0, f64::max);
            let bad = proxy >= threshold;
            let entries = values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let p = params.p_min + i as i32;
                    CriterionEntry {
                        t0,
                        p,
                        lambda_p: lambda(p),
                        integral: v,
                        bad: bad && v >= threshold,
                    }
                })
                .collect::<Vec<_>>();
            Ok((PointSummary { t0, proxy, bad }, entries))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::with_capacity(per_point.len());
    let mut entries = Vec::new();
    for (s, e) in per_point {
        points.push(s);
        entries.extend(e);
    }
    Ok(CriterionReport {
        params: *params,
        entries,
        points,
    })
}

/// `λ_q^{3/s-1} sup_{I_q(t₀)} ‖u_q‖_s` for `q ∈ [p_min, p_max]`.
pub fn critical_quantity(series: &ShellNormSeries, params: &CriterionParams, t0: f64) -> Result<Vec<(i32, f64)>> {
    check_exponent(series, params)?;
    let e = 3.0 * params.s.reciprocal() - 1.0;
    (params.p_min..=params.p_max)
        .map(|q| {
            let (a, b) = dyadic_interval(q, t0);
            Ok((q, lambda(q).powf(e) * series.sup_on(q, a, b)?))
        })
        .collect()
}

/// `‖u_q(t)‖_s^{r-1} <= ‖u_q(τ_p)‖_s^{r-1} e^{-cλ_q²(t-τ_p)}
/// + C(1 - e^{-cλ_q²(t-τ_p)}) δ^r λ_q^{3/s-1} λ_p^{r(1-3/s)}`, reported at norm level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallEnvelope {
    pub r: Exponent,
    pub s: Exponent,
    /// May be zero (no forcing from the criterion).
    pub delta: f64,
    /// Decay rate constant `c`.
    pub c: f64,
    /// Source constant `C`.
    pub big_c: f64,
}

impl GronwallEnvelope {
    fn source(&self, q: i32, p: i32) -> f64 {
        let inv_s = self.s.reciprocal();
        let r = self.r.value();
        self.big_c
            * self.delta.powf(r)
            * lambda(q).powf(3.0 * inv_s - 1.0)
            * lambda(p).powf(r * (1.0 - 3.0 * inv_s))
    }

    /// Bound on `‖u_q(τ_p + elapsed)‖_s`.
    pub fn eval(&self, initial: f64, q: i32, p: i32, elapsed: f64) -> f64 {
        let r1 = self.r.value() - 1.0;
        let decay = (-self.c * lambda(q).powi(2) * elapsed).exp();
        let v = initial.powf(r1) * decay + self.source(q, p) * (1.0 - decay);
        v.powf(1.0 / r1)
    }

    /// Limit of [`eval`](Self::eval) as `elapsed → ∞`.
    pub fn limit(&self, q: i32, p: i32) -> f64 {
        self.source(q, p).powf(1.0 / (self.r.value() - 1.0))
    }
}

/// `max (‖u_q(t)‖_s / envelope(t) - 1)` over stored samples with `t >= τ`.
pub fn envelope_excess(series: &ShellNormSeries, env: &GronwallEnvelope, q: i32, p: i32, tau: f64) -> Result<f64> {
    let j0 = series.times().partition_point(|&t| t < tau - slack(tau));
    if j0 >= series.len() {
        return Err(Error::IntervalOutOfRange {
            start: tau,
            end: tau,
            first: series.start(),
            last: series.end(),
        });
    }
    let initial = series.norms()[j0].get_or_zero(q);
    let t_start = series.times()[j0];
    let mut worst = f64::NEG_INFINITY;
    for j in j0..series.len() {
        let bound = env.eval(initial, q, p, series.times()[j] - t_start);
        let v = series.norms()[j].get_or_zero(q);
        let excess = if bound > 0.0 {
            v / bound - 1.0
        } else if v > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(excess);
    }
    Ok(worst)
}

fn m_ratio(r: &Exponent, s: &Exponent) -> f64 {
    let a = 3.0 * s.reciprocal() - 1.0;
    let r = r.value();
    a * r / (r - 1.0)
}

/// `M = Σ_{q≥p-2} (λ_q^{3/s-1} λ_p^{r(1-3/s)})^{r/(r-1)} λ_p^{-r(1-3/s)}`, summed until
/// the terms stop changing the total. The value does not depend on `p`.
pub fn m_constant_series(r: &Exponent, s: &Exponent, p: i32) -> f64 {
    let inv_s = s.reciprocal();
    let rv = r.value();
    let mut total = 0.0;
    let mut q = p - 2;
    loop {
        let term = (lambda(q).powf(3.0 * inv_s - 1.0) * lambda(p).powf(rv * (1.0 - 3.0 * inv_s)))
            .powf(rv / (rv - 1.0))
            * lambda(p).powf(-rv * (1.0 - 3.0 * inv_s));
        total += term;
        if term <= f64::EPSILON * total || q > p + 100_000 {
            return total;
        }
        q += 1;
    }
}

/// Closed form of [`m_constant_series`]: `2^{-2b} / (1 - 2^b)`, `b = (3/s-1) r/(r-1)`.
pub fn m_constant(r: &Exponent, s: &Exponent) -> f64 {
    let b = m_ratio(r, s);
    2f64.powf(-2.0 * b) / (1.0 - 2f64.powf(b))
}

/// `δ <= 1/(64 M C)`.
pub fn delta_admissible(m: f64, c: f64) -> f64 {
    1.0 / (64.0 * m * c)
}

/// Fitted `K` with `∫Σ_{q≥p-2}‖u_q‖_s^r <= K λ_p^{-rα} ∫ sup_{q≥p-2} λ_q^{rα}‖u_q‖_s^r`
/// over all `(p, t₀)`; `None` when every right side vanishes.
pub fn jensen_constant(series: &ShellNormSeries, params: &CriterionParams, t0_grid: &[f64]) -> Result<Option<f64>> {
    check_exponent(series, params)?;
    let r = params.r.value();
    let ra = r * params.alpha;
    let mut k: Option<f64> = None;
    for &t0 in t0_grid {
        for p in params.p_min..=params.p_max {
            let (a, b) = dyadic_interval(p, t0);
            let lo = (p - 2).max(series.q_min());
            let hi = series.q_max();
            let lhs = series.integrate(a, b, |j| {
                let n = &series.norms()[j];
                (lo..=hi).map(|q| n.get_or_zero(q).powf(r)).sum::<f64>()
            })?;
            let rhs = lambda(p).powf(-ra)
                * series.integrate(a, b, |j| {
                    let n = &series.norms()[j];
                    (lo..=hi)
                        .map(|q| lambda(q).powf(ra) * n.get_or_zero(q).powf(r))
                        .fold(0.0, f64::max)
                })?;
            if rhs > 0.0 {
                let v = lhs / rhs;
                k = Some(k.map_or(v, |x| x.max(v)));
            }
        }
    }
    Ok(k)
}
