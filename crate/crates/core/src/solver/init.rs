use num_complex::Complex64;

use super::config::{ForcingSpec, InitialCondition};
use crate::spectral::random::random_spectrum_field;
use crate::spectral::{leray_project_in_place, project_coeff, Grid, PhysicalField, SpectralField};

/// `amplitude · e · sin(k·x)` where `e` is the unit projection of the first coordinate
/// axis not parallel to `k`.
pub fn single_mode(grid: Grid, k: [i64; 3], amplitude: f64) -> SpectralField {
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::default();
    let mut e = project_coeff(k, [one, z, z]);
    if e.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1e-12 {
        e = project_coeff(k, [z, one, z]);
    }
    let m = e.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let coef = Complex64::new(0.0, -0.5 * amplitude / m);
    let mut f = SpectralField::zeros(grid);
    f.set_mode(k, [e[0] * coef, e[1] * coef, e[2] * coef]);
    f
}

/// `amplitude · (sin x₁ cos x₂, -cos x₁ sin x₂, 0)`, set coefficient by coefficient.
pub fn taylor_green(grid: Grid, amplitude: f64) -> SpectralField {
    let q = Complex64::new(0.0, 0.25 * amplitude);
    let z = Complex64::default();
    let mut f = SpectralField::zeros(grid);
    f.set_mode([1, 1, 0], [-q, q, z]);
    f.set_mode([1, -1, 0], [-q, -q, z]);
    f
}

/// `amplitude · (sin x₃ + cos x₂, sin x₁ + cos x₃, sin x₂ + cos x₁)`.
pub fn abc_forcing(grid: Grid, amplitude: f64) -> SpectralField {
    let phys = PhysicalField::from_fn(grid, |x| {
        [
            amplitude * (x[2].sin() + x[1].cos()),
            amplitude * (x[0].sin() + x[2].cos()),
            amplitude * (x[1].sin() + x[0].cos()),
        ]
    });
    let mut f = phys.to_spectral();
    // discard transform round-off outside the six forced wavevectors
    let g = grid;
    f.apply_multiplier(|i| if g.k_squared(i) == 1.0 { 1.0 } else { 0.0 });
    leray_project_in_place(&mut f);
    f
}

impl InitialCondition {
    pub fn build(&self, grid: Grid) -> SpectralField {
        match self {
            InitialCondition::SingleMode { k, amplitude } => single_mode(grid, *k, *amplitude),
            InitialCondition::TaylorGreen { amplitude } => taylor_green(grid, *amplitude),
            InitialCondition::RandomDivfree(spec) => random_spectrum_field(grid, spec),
        }
    }
}

impl ForcingSpec {
    pub fn build(&self, grid: Grid) -> Option<SpectralField> {
        match *self {
            ForcingSpec::None => None,
            ForcingSpec::Abc { amplitude } => Some(abc_forcing(grid, amplitude)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_green_matches_physical_formula() {
        let g = Grid::new(16, 1.0).unwrap();
        let p = taylor_green(g, 1.0).to_physical();
        let expect = PhysicalField::from_fn(g, |x| {
            [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]
        });
        for c in 0..3 {
            for (a, b) in p.component(c).iter().zip(expect.component(c)) {
                assert!((a - b).abs() < 1e-14);
            }
        }
        assert_eq!(taylor_green(g, 1.0).divergence_defect(), 0.0);
    }

    #[test]
    fn single_mode_default_is_sin_4x3() {
        let g = Grid::new(16, 1.0).unwrap();
        let f = single_mode(g, [0, 0, 4], 1.0);
        assert_eq!(f.coeff([0, 0, 4])[0], Complex64::new(0.0, -0.5));
        assert_eq!(f.coeff([0, 0, -4])[0], Complex64::new(0.0, 0.5));
        let f = single_mode(g, [1, 0, 0], 2.0);
        assert!(f.divergence_defect() == 0.0);
        assert!((f.to_physical().component(1).iter().cloned().fold(0.0, f64::max) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn abc_forcing_is_divergence_free() {
        let g = Grid::new(16, 1.0).unwrap();
        let f = abc_forcing(g, 1.0);
        assert!(f.divergence_defect() < 1e-14);
        assert!(f.max_coeff() > 0.4);
    }
}
