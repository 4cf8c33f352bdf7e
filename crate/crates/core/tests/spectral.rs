use nslab::spectral::random::{random_divfree, random_hermitian};
use nslab::spectral::{inner_product, lebesgue_norm, leray_project, physical_inner_product};
use nslab::{Exponent, Grid, PhysicalField, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid() -> Grid {
    Grid::new(16, 1.0).unwrap()
}

fn field(seed: u64) -> SpectralField {
    random_hermitian(grid(), &mut ChaCha8Rng::seed_from_u64(seed))
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d.max_coeff()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(seed in any::<u64>()) {
        let f = field(seed);
        let back = f.to_physical().to_spectral();
        prop_assert!(max_diff(&f, &back) <= 1e-12 * f.max_coeff());
    }

    #[test]
    fn leray_idempotent_and_self_adjoint(a in any::<u64>(), b in any::<u64>()) {
        let f = field(a);
        let h = field(b);
        let pf = leray_project(&f);
        prop_assert!(max_diff(&leray_project(&pf), &pf) <= 1e-12 * f.max_coeff());
        prop_assert!(pf.divergence_defect() <= 1e-12);
        let lhs = inner_product(&pf, &h);
        let rhs = inner_product(&f, &leray_project(&h));
        let scale = (f.l2_norm_sq() * h.l2_norm_sq()).sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn parseval(seed in any::<u64>()) {
        let f = field(seed);
        let phys = lebesgue_norm(&f.to_physical(), &Exponent::int(2)).unwrap().powi(2);
        let spec = Grid::volume() * f.coeff_energy();
        prop_assert!((phys - spec).abs() <= 1e-10 * spec);
        prop_assert!((f.l2_norm_sq() - spec).abs() <= 1e-12 * spec);
    }

    #[test]
    fn normalised_norms_increase_with_s(seed in any::<u64>()) {
        let p = field(seed).to_physical();
        let exps = [Exponent::int(2), Exponent::rational(10, 3), Exponent::int(4), Exponent::int(6), Exponent::Infinity];
        let vals: Vec<f64> = exps
            .iter()
            .map(|s| lebesgue_norm(&p, s).unwrap() * Grid::volume().powf(-s.reciprocal()))
            .collect();
        for w in vals.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn inner_products_agree(a in any::<u64>(), b in any::<u64>()) {
        let f = field(a);
        let h = field(b);
        let x = inner_product(&f, &h);
        let y = physical_inner_product(&f.to_physical(), &h.to_physical());
        prop_assert!((x - y).abs() <= 1e-10 * (f.l2_norm_sq() * h.l2_norm_sq()).sqrt());
    }
}

#[test]
fn zero_field_is_zero_everywhere() {
    let p = SpectralField::zeros(grid()).to_physical();
    assert!(p.components().iter().all(|c| c.iter().all(|&v| v == 0.0)));
}

#[test]
fn single_mode_is_a_sine() {
    let g = grid();
    let mut f = SpectralField::zeros(g);
    let z = Complex64::default();
    f.set_mode([0, 0, 4], [Complex64::new(0.0, -0.5), z, z]);
    let p = f.to_physical();
    let expect = PhysicalField::from_fn(g, |x| [(4.0 * x[2]).sin(), 0.0, 0.0]);
    for c in 0..3 {
        for (a, b) in p.component(c).iter().zip(expect.component(c)) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}

#[test]
fn leray_examples() {
    let g = grid();
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::default();
    // a gradient is removed entirely, a transverse mode is untouched
    let mut grad = SpectralField::zeros(g);
    grad.set_mode([1, 2, 0], [one, one * 2.0, z]);
    assert!(leray_project(&grad).max_coeff() < 1e-15);
    let mut shear = SpectralField::zeros(g);
    shear.set_mode([0, 0, 3], [one, z, z]);
    assert_eq!(leray_project(&shear), shear);
}

#[test]
fn random_divfree_fields_are_solenoidal() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let f = random_divfree(grid(), &mut rng);
        assert!(f.divergence_defect() < 1e-13);
        assert_eq!(f.hermitian_defect(), 0.0);
    }
}
