//! Vitali covers of bad times by dyadic intervals and Hausdorff premeasure sums.

use std::fmt;
use std::str::FromStr;

use crate::criterion::{bad_points_from_entries, CriterionEntry};
use crate::error::{Error, Result};
use crate::exponent::Rational;
use crate::lambda;

/// Vitali dilation factor.
pub const DILATION: f64 = 5.0;

/// `I_p(t) = [t - λ_p^{-2}, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverInterval {
    pub t: f64,
    pub p: i32,
}

impl CoverInterval {
    pub fn length(&self) -> f64 {
        lambda(self.p).powi(-2)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.t - self.length(), self.t)
    }

    /// Same centre, `factor` times the length.
    pub fn dilated(&self, factor: f64) -> (f64, f64) {
        let c = self.t - 0.5 * self.length();
        let h = 0.5 * factor * self.length();
        (c - h, c + h)
    }

    fn intersects(&self, other: &CoverInterval) -> bool {
        let (a, b) = self.bounds();
        let (c, d) = other.bounds();
        a <= d && c <= b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicCover {
    pub floor: i32,
    /// Pairwise disjoint intervals, in selection order.
    pub intervals: Vec<CoverInterval>,
    pub dilation: f64,
}

impl DyadicCover {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Whether `t` lies in some dilated interval.
    pub fn covers(&self, t: f64) -> bool {
        self.intervals.iter().any(|i| {
            let (a, b) = i.dilated(self.dilation);
            a <= t && t <= b
        })
    }
}

/// Greedy Vitali selection: candidates by decreasing length (leftmost first), kept when
/// disjoint from everything kept so far.
pub fn vitali_cover(bad_points: &[(f64, i32)], floor: i32) -> Result<DyadicCover> {
    if let Some(&(t, p)) = bad_points.iter().find(|x| x.1 < floor) {
        return Err(Error::InvalidArgument(format!(
            "bad point t = {t} fired at scale {p}, below the floor {floor}"
        )));
    }
    let mut cand: Vec<CoverInterval> = bad_points.iter().map(|&(t, p)| CoverInterval { t, p }).collect();
    cand.sort_by(|a, b| a.p.cmp(&b.p).then(a.bounds().0.total_cmp(&b.bounds().0)));
    let mut kept: Vec<CoverInterval> = Vec::new();
    for c in &cand {
        if kept.iter().all(|k| !k.intersects(c)) {
            kept.push(*c);
        }
    }
    let cover = DyadicCover {
        floor,
        intervals: kept,
        dilation: DILATION,
    };
    for c in &cand {
        let (a, b) = c.bounds();
        let inside = cover.intervals.iter().any(|k| {
            let (x, y) = k.dilated(DILATION);
            x <= a && b <= y
        });
        assert!(inside, "interval at t = {} not inside any dilated kept interval", c.t);
    }
    Ok(cover)
}

fn premeasure_unchecked(cover: &DyadicCover, d: f64) -> f64 {
    cover
        .intervals
        .iter()
        .map(|i| (cover.dilation * i.length()).powf(d))
        .sum()
}

/// `Σ_i (5 λ_{p_i}^{-2})^d`.
pub fn premeasure_sum(cover: &DyadicCover, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("premeasure exponent must be > 0, got {d}")));
    }
    Ok(premeasure_unchecked(cover, d))
}

/// Which normalisation of the dimension exponent to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `(r/2)(3/s + 2/r - α - 1)`.
    Lemma,
    /// `r(3/s + 2/r - α - 1)`.
    Theorem,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Lemma => "lemma",
            Convention::Theorem => "theorem",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma" => Ok(Convention::Lemma),
            "theorem" => Ok(Convention::Theorem),
            _ => Err(Error::InvalidArgument(format!("unknown convention {s:?}"))),
        }
    }
}

/// Predicted dimension of the bad set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionExponent {
    pub value: f64,
    pub exact: Option<Rational>,
    /// The linear form is `<= 0`: no dimension bound beyond the trivial one.
    pub nonpositive: bool,
}

pub fn dimension_exponent(r: f64, s: f64, alpha: f64, convention: Convention) -> DimensionExponent {
    let form = 3.0 / s + 2.0 / r - alpha - 1.0;
    let value = match convention {
        Convention::Lemma => 0.5 * r * form,
        Convention::Theorem => r * form,
    };
    DimensionExponent {
        value,
        exact: None,
        nonpositive: value <= 0.0,
    }
}

pub fn dimension_exponent_exact(r: Rational, s: Rational, alpha: Rational, convention: Convention) -> DimensionExponent {
    let one = Rational::from_integer(1);
    let form = Rational::from_integer(3) / s + Rational::from_integer(2) / r - alpha - one;
    let exact = match convention {
        Convention::Lemma => r * form / Rational::from_integer(2),
        Convention::Theorem => r * form,
    };
    DimensionExponent {
        value: *exact.numer() as f64 / *exact.denom() as f64,
        exact: Some(exact),
        nonpositive: exact <= Rational::from_integer(0),
    }
}

/// Premeasure sums over scale floors at a fixed exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct PremeasureReport {
    pub d: f64,
    /// `(floor, number of intervals, sum)` by increasing floor.
    pub trend: Vec<(i32, usize, f64)>,
}

impl PremeasureReport {
    /// Least-squares slope of `ln(sum)` against the floor; `None` if any sum is zero.
    pub fn log_slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .trend
            .iter()
            .map(|&(p, _, v)| (p as f64, v))
            .collect();
        if pts.len() < 2 || pts.iter().any(|x| x.1 <= 0.0) {
            return None;
        }
        Some(slope(&pts.iter().map(|&(x, v)| (x, v.ln())).collect::<Vec<_>>()))
    }
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Covers of the report's bad times at every floor in `floors`.
pub fn covers_by_floor(entries: &[CriterionEntry], floors: std::ops::RangeInclusive<i32>) -> Result<Vec<DyadicCover>> {
    floors
        .map(|p| vitali_cover(&bad_points_from_entries(entries, p), p))
        .collect()
}

pub fn premeasure_trend(covers: &[DyadicCover], d: f64) -> Result<PremeasureReport> {
    let trend = covers
        .iter()
        .map(|c| Ok((c.floor, c.len(), premeasure_sum(c, d)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PremeasureReport { d, trend })
}

/// Empirical dimension from a family of covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionEstimate {
    /// Root in `d` of the growth rate of `ln Σ (5λ_{p_i}^{-2})^d` across floors.
    pub estimate: f64,
    /// Largest grid exponent whose premeasure grows with the floor.
    pub lower: Option<f64>,
    /// Smallest grid exponent whose premeasure does not grow.
    pub upper: Option<f64>,
}

/// `None` when some floor has an empty cover (nothing to estimate).
pub fn estimate_dimension(covers: &[DyadicCover], d_grid: &[f64]) -> Option<DimensionEstimate> {
    if covers.len() < 2 || covers.iter().any(|c| c.is_empty()) {
        return None;
    }
    let growth = |d: f64| {
        let pts: Vec<(f64, f64)> = covers
            .iter()
            .map(|c| (c.floor as f64, premeasure_unchecked(c, d).ln()))
            .collect();
        slope(&pts)
    };
    // growth is strictly decreasing in d because every interval is shorter than 1/5
    let estimate = if growth(0.0) <= 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        while growth(hi) > 0.0 && hi < 64.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if growth(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let lower = d_grid.iter().copied().filter(|&d| growth(d) > 0.0).reduce(f64::max);
    let upper = d_grid.iter().copied().filter(|&d| growth(d) <= 0.0).reduce(f64::min);
    Some(DimensionEstimate { estimate, lower, upper })
}

/// `a:b:step` inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("grid must be start:end:step, got {spec:?}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [a, b, h] = parts[..] else { return Err(bad()) };
    if !(h > 0.0) || b < a {
        return Err(bad());
    }
    let count = ((b - a) / h + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| a + i as f64 * h).collect())
}
