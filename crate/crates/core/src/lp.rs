//! Littlewood-Paley decomposition on the periodic grid.
//!
//! `χ` is a smooth radial step equal to 1 on `[0, 3/4]` and 0 on `[1, ∞)`;
//! `φ(ξ) = χ(ξ/2) - χ(ξ)` and `φ_q(ξ) = φ(ξ/λ_q)`. Shell `q >= 0` is `φ_q(|k|) û(k)`;
//! shell `-1` is `χ(|k|) û(k)`. The family telescopes to the identity on the lattice.

use std::ops::RangeInclusive;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::lambda;
use crate::spectral::random::point_source;
use crate::spectral::{lebesgue_norm, Grid, SpectralField};

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth monotone transition, 0 for `t <= 0`, 1 for `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    let a = bump(t);
    let b = bump(1.0 - t);
    a / (a + b)
}

/// Radial cutoffs for a given grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellCutoffFamily {
    n: usize,
    q_max: i32,
}

impl ShellCutoffFamily {
    pub const Q_MIN: i32 = -1;

    /// `q_max` is the last shell whose support meets the lattice, so the family sums to
    /// one on every representable wavenumber (including the cube corners).
    pub fn new(grid: Grid) -> Self {
        let kmax = (grid.n() as f64 / 2.0) * 3f64.sqrt();
        let mut q_max = 0;
        while 0.75 * lambda(q_max + 1) < kmax {
            q_max += 1;
        }
        Self { n: grid.n(), q_max }
    }

    pub fn chi(xi: f64) -> f64 {
        if xi <= 0.75 {
            1.0
        } else if xi >= 1.0 {
            0.0
        } else {
            smooth_step((1.0 - xi) / 0.25)
        }
    }

    pub fn phi(xi: f64) -> f64 {
        Self::chi(0.5 * xi) - Self::chi(xi)
    }

    /// Multiplier of shell `q` at `|k| = kmag`.
    pub fn multiplier(&self, q: i32, kmag: f64) -> f64 {
        if q < 0 {
            Self::chi(kmag)
        } else {
            Self::phi(kmag / lambda(q))
        }
    }

    pub fn q_min(&self) -> i32 {
        Self::Q_MIN
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Largest shell with `λ_q <= n/2`.
    pub fn q_resolved(&self) -> i32 {
        (self.n as f64 / 2.0).log2().floor() as i32
    }

    /// Largest shell whose whole support `|k| < 2λ_q` fits inside the grid's cube.
    pub fn q_interior(&self) -> i32 {
        (self.n as f64 / 4.0).log2().floor() as i32
    }

    pub fn shells(&self) -> RangeInclusive<i32> {
        Self::Q_MIN..=self.q_max
    }

    pub fn shell_count(&self) -> usize {
        (self.q_max - Self::Q_MIN + 1) as usize
    }

    pub fn check_shell(&self, q: i32) -> Result<()> {
        if q < Self::Q_MIN || q > self.q_max {
            return Err(Error::ShellOutOfRange { q, q_max: self.q_max });
        }
        Ok(())
    }
}

/// `build_cutoffs`.
pub fn build_cutoffs(grid: Grid) -> ShellCutoffFamily {
    ShellCutoffFamily::new(grid)
}

/// A field localised to dyadic shell `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellField {
    pub q: i32,
    pub field: SpectralField,
}

pub fn shell_project(f: &SpectralField, q: i32, cutoffs: &ShellCutoffFamily) -> Result<ShellField> {
    cutoffs.check_shell(q)?;
    Ok(ShellField {
        q,
        field: f.radial_filtered(|k| cutoffs.multiplier(q, k)),
    })
}

/// Every shell from `-1` to `q_max`, in order.
pub fn shell_decompose(f: &SpectralField, cutoffs: &ShellCutoffFamily) -> Vec<ShellField> {
    cutoffs
        .shells()
        .map(|q| shell_project(f, q, cutoffs).expect("q in range"))
        .collect()
}

/// Per-shell values indexed from `q_min`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellNorms {
    q_min: i32,
    values: Vec<f64>,
}

impl ShellNorms {
    pub fn new(q_min: i32, values: Vec<f64>) -> Self {
        Self { q_min, values }
    }

    pub fn zeros(q_min: i32, q_max: i32) -> Self {
        Self::new(q_min, vec![0.0; (q_max - q_min + 1).max(0) as usize])
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_min + self.values.len() as i32 - 1
    }

    pub fn get(&self, q: i32) -> Option<f64> {
        if q < self.q_min {
            return None;
        }
        self.values.get((q - self.q_min) as usize).copied()
    }

    /// Value at `q`, with shells outside the stored range treated as empty.
    pub fn get_or_zero(&self, q: i32) -> f64 {
        self.get(q).unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.q_min + i as i32, v))
    }
}

/// `‖u_q‖_s` for every shell, evaluated in physical space.
pub fn shell_norms(f: &SpectralField, s: &Exponent, cutoffs: &ShellCutoffFamily) -> Result<ShellNorms> {
    s.check_lebesgue()?;
    let shells: Vec<i32> = cutoffs.shells().collect();
    let values = shells
        .par_iter()
        .map(|&q| {
            let u = shell_project(f, q, cutoffs)?;
            if u.field.is_zero() {
                return Ok(0.0);
            }
            lebesgue_norm(&u.field.to_physical(), s)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ShellNorms::new(cutoffs.q_min(), values))
}

/// `‖(λ_q^α ‖u_q‖_s)_q‖_{l^{q_besov}}` with `λ_{-1} = 1/2`.
pub fn besov_norm(
    f: &SpectralField,
    alpha: f64,
    s: &Exponent,
    q_besov: &Exponent,
    cutoffs: &ShellCutoffFamily,
) -> Result<f64> {
    let norms = shell_norms(f, s, cutoffs)?;
    Ok(besov_from_shell_norms(&norms, alpha, q_besov))
}

pub fn besov_from_shell_norms(norms: &ShellNorms, alpha: f64, q_besov: &Exponent) -> f64 {
    let weighted = norms.iter().map(|(q, v)| lambda(q).powf(alpha) * v);
    match q_besov {
        Exponent::Infinity => weighted.fold(0.0, f64::max),
        e => {
            let p = e.value();
            weighted.map(|w| w.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// `‖u_q‖_b / (λ_q^{3(1/a - 1/b)} ‖u_q‖_a)` for a shell field and `1 <= a <= b`.
pub fn bernstein_ratio(f: &ShellField, a: &Exponent, b: &Exponent) -> Result<f64> {
    a.check_lebesgue()?;
    b.check_lebesgue()?;
    if a.value() > b.value() {
        return Err(Error::InvalidArgument(format!(
            "Bernstein exponents need a <= b, got a = {a}, b = {b}"
        )));
    }
    if f.field.is_zero() {
        return Err(Error::InvalidArgument("Bernstein ratio of a zero shell is 0/0".into()));
    }
    if a == b {
        return Ok(1.0);
    }
    let phys = f.field.to_physical();
    let na = lebesgue_norm(&phys, a)?;
    let nb = lebesgue_norm(&phys, b)?;
    let scale = lambda(f.q).powf(3.0 * (a.reciprocal() - b.reciprocal()));
    Ok(nb / (scale * na))
}

/// Shell projection of a randomly placed, randomly polarised point source with random
/// amplitude. These are the near-extremal fields for Bernstein's inequality.
pub fn random_shell_field<R: Rng + ?Sized>(
    grid: Grid,
    q: i32,
    cutoffs: &ShellCutoffFamily,
    rng: &mut R,
) -> Result<ShellField> {
    let tau = Grid::DOMAIN_LENGTH;
    let x0 = [rng.random::<f64>() * tau, rng.random::<f64>() * tau, rng.random::<f64>() * tau];
    let mut e = [0.0; 3];
    loop {
        for c in &mut e {
            *c = rng.random::<f64>() * 2.0 - 1.0;
        }
        let m = e.iter().map(|c| c * c).sum::<f64>().sqrt();
        if m > 0.1 && m <= 1.0 {
            e.iter_mut().for_each(|c| *c /= m);
            break;
        }
    }
    let amp = 0.1 + 10.0 * rng.random::<f64>();
    let src = point_source(grid, x0, e).scaled(amp);
    shell_project(&src, q, cutoffs)
}

/// Bernstein ratios for one exponent pair over a range of shells.
#[derive(Debug, Clone)]
pub struct BernsteinSweep {
    pub a: Exponent,
    pub b: Exponent,
    /// `(q, max ratio over trials)`.
    pub per_shell: Vec<(i32, f64)>,
}

impl BernsteinSweep {
    /// Fitted constant `C_B`: the largest ratio seen.
    pub fn constant(&self) -> f64 {
        self.per_shell.iter().map(|&(_, r)| r).fold(0.0, f64::max)
    }

    /// `max_q / min_q` of the per-shell ratios.
    pub fn spread(&self) -> f64 {
        let lo = self.per_shell.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
        self.constant() / lo
    }
}

pub fn bernstein_sweep<R: Rng + ?Sized>(
    grid: Grid,
    a: Exponent,
    b: Exponent,
    shells: RangeInclusive<i32>,
    trials: usize,
    rng: &mut R,
) -> Result<BernsteinSweep> {
    let cutoffs = build_cutoffs(grid);
    let mut per_shell = Vec::new();
    for q in shells {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let f = random_shell_field(grid, q, &cutoffs, rng)?;
            worst = worst.max(bernstein_ratio(&f, &a, &b)?);
        }
        per_shell.push((q, worst));
    }
    Ok(BernsteinSweep { a, b, per_shell })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::random_hermitian;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type Cut = ShellCutoffFamily;

    fn sin4(g: Grid) -> SpectralField {
        let mut f = SpectralField::zeros(g);
        let z = Complex64::default();
        f.set_mode([0, 0, 4], [Complex64::new(0.0, -0.5), z, z]);
        f
    }

    #[test]
    fn cutoff_values() {
        assert_eq!(Cut::chi(0.5), 1.0);
        assert_eq!(Cut::chi(0.75), 1.0);
        assert_eq!(Cut::chi(1.5), 0.0);
        assert_eq!(Cut::chi(1.0), 0.0);
        assert_eq!(Cut::phi(1.0), 1.0);
        assert_eq!(Cut::phi(0.75), 0.0);
        assert_eq!(Cut::phi(2.0), 0.0);
        // monotone on the transition
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = Cut::chi(0.75 + 0.25 * i as f64 / 1000.0);
            assert!(v <= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn telescoping_partition_at_7_3() {
        let g = Grid::new(32, 1.0).unwrap();
        let c = build_cutoffs(g);
        let total: f64 = c.shells().map(|q| c.multiplier(q, 7.3)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // every lattice magnitude of the grid, including the corners
        for i in 0..g.len() {
            let k = g.k_squared(i).sqrt();
            let t: f64 = c.shells().map(|q| c.multiplier(q, k)).sum();
            assert!((t - 1.0).abs() < 1e-12, "|k| = {k}: {t}");
        }
        assert_eq!(c.q_max(), 5);
        assert_eq!(c.q_resolved(), 4);
    }

    #[test]
    fn sin4_lives_in_shell_two() {
        let g = Grid::new(32, 1.0).unwrap();
        let c = build_cutoffs(g);
        let f = sin4(g);
        assert_eq!(shell_project(&f, 2, &c).unwrap().field, f);
        assert!(shell_project(&f, 1, &c).unwrap().field.is_zero());
        assert!(shell_project(&f, 3, &c).unwrap().field.is_zero());
        assert!(matches!(
            shell_project(&f, 6, &c),
            Err(Error::ShellOutOfRange { q: 6, q_max: 5 })
        ));

        let l2 = (2.0 * PI).powf(1.5) / 2f64.sqrt();
        let norms = shell_norms(&f, &Exponent::int(2), &c).unwrap();
        for (q, v) in norms.iter() {
            if q == 2 {
                assert!((v - l2).abs() < 1e-12 * l2);
            } else {
                assert_eq!(v, 0.0);
            }
        }
        let b = besov_norm(&f, 1.0, &Exponent::int(2), &Exponent::Infinity, &c).unwrap();
        assert!((b - 4.0 * l2).abs() < 1e-12 * l2);

        let ratio = bernstein_ratio(&shell_project(&f, 2, &c).unwrap(), &Exponent::int(2), &Exponent::Infinity)
            .unwrap();
        let expect = 1.0 / (4f64.powf(1.5) * l2);
        assert!((ratio - expect).abs() < 1e-12 * expect);
        assert!((ratio - 0.011224).abs() < 1e-6);
    }

    #[test]
    fn zero_field_shells() {
        let g = Grid::new(16, 1.0).unwrap();
        let c = build_cutoffs(g);
        let z = SpectralField::zeros(g);
        assert!(shell_project(&z, 0, &c).unwrap().field.is_zero());
        let norms = shell_norms(&z, &Exponent::rational(10, 3), &c).unwrap();
        assert!(norms.values().iter().all(|&v| v == 0.0));
        let zs = shell_project(&z, 1, &c).unwrap();
        assert!(bernstein_ratio(&zs, &Exponent::int(2), &Exponent::int(4)).is_err());
    }

    #[test]
    fn support_and_overlap() {
        let g = Grid::new(16, 1.0).unwrap();
        let c = build_cutoffs(g);
        let f = random_hermitian(g, &mut ChaCha8Rng::seed_from_u64(5));
        for q in c.shells() {
            let u = shell_project(&f, q, &c).unwrap();
            let lo = if q < 0 { -1.0 } else { 0.75 * lambda(q) };
            let hi = if q < 0 { 1.0 } else { 2.0 * lambda(q) };
            for i in 0..g.len() {
                let k = g.k_squared(i).sqrt();
                if k <= lo || k >= hi {
                    for comp in 0..3 {
                        assert_eq!(u.field.component(comp)[i], Complex64::default());
                    }
                }
            }
            for q2 in c.shells() {
                if (q - q2).abs() >= 2 {
                    let uu = shell_project(&u.field, q2, &c).unwrap();
                    assert!(uu.field.is_zero(), "q = {q}, q' = {q2}");
                }
            }
        }
    }

    #[test]
    fn bernstein_identity_exponents() {
        let g = Grid::new(16, 1.0).unwrap();
        let c = build_cutoffs(g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_shell_field(g, 1, &c, &mut rng).unwrap();
        let e = Exponent::rational(10, 3);
        assert_eq!(bernstein_ratio(&u, &e, &e).unwrap(), 1.0);
        assert!(bernstein_ratio(&u, &Exponent::int(4), &Exponent::int(2)).is_err());
    }
}
