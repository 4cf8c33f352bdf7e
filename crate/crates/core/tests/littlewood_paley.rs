use nslab::lp::{
    besov_norm, bernstein_sweep, build_cutoffs, shell_decompose, shell_norms, shell_project, ShellCutoffFamily,
};
use nslab::spectral::random::random_hermitian;
use nslab::{lambda, Exponent, Grid, SpectralField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(n: usize, seed: u64) -> SpectralField {
    random_hermitian(Grid::new(n, 1.0).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shells_sum_to_the_field(seed in any::<u64>()) {
        let f = field(16, seed);
        let c = build_cutoffs(f.grid());
        let mut sum = SpectralField::zeros(f.grid());
        for s in shell_decompose(&f, &c) {
            sum.axpy(1.0, &s.field);
        }
        sum.axpy(-1.0, &f);
        prop_assert!(sum.l2_norm_sq().sqrt() < 1e-12 * f.l2_norm_sq().sqrt());
    }

    #[test]
    fn multipliers_telescope(k in 0.0f64..40.0) {
        let c = build_cutoffs(Grid::new(64, 1.0).unwrap());
        let total: f64 = c.shells().map(|q| c.multiplier(q, k)).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for q in c.shells() {
            let m = c.multiplier(q, k);
            prop_assert!((0.0..=1.0).contains(&m));
            let (lo, hi) = if q < 0 { (-1.0, 1.0) } else { (0.75 * lambda(q), 2.0 * lambda(q)) };
            if k <= lo || k >= hi {
                prop_assert_eq!(m, 0.0);
            }
        }
    }

    #[test]
    fn non_adjacent_shells_are_orthogonal(seed in any::<u64>(), q in -1i32..=3, gap in 2i32..=4) {
        let f = field(16, seed);
        let c = build_cutoffs(f.grid());
        let q2 = q + gap;
        prop_assume!(q2 <= c.q_max());
        let u = shell_project(&f, q, &c).unwrap();
        prop_assert!(shell_project(&u.field, q2, &c).unwrap().field.is_zero());
    }

    #[test]
    fn besov_l2_is_close_to_the_l2_norm(seed in any::<u64>()) {
        let f = field(16, seed);
        let c = build_cutoffs(f.grid());
        let b = besov_norm(&f, 0.0, &Exponent::int(2), &Exponent::int(2), &c).unwrap();
        let l2 = f.l2_norm_sq().sqrt();
        prop_assert!(b >= l2 / 2f64.sqrt() && b <= l2 * 2f64.sqrt(), "{} vs {}", b, l2);
    }
}

#[test]
fn chi_matches_its_closed_form() {
    let h = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    for i in 1..100 {
        let xi = 0.75 + 0.25 * i as f64 / 100.0;
        let t = (1.0 - xi) / 0.25;
        let expect = h(t) / (h(t) + h(1.0 - t));
        assert!((ShellCutoffFamily::chi(xi) - expect).abs() < 1e-15);
        assert!((ShellCutoffFamily::phi(2.0 * xi) - ShellCutoffFamily::chi(xi)).abs() < 1e-15);
    }
}

#[test]
fn partition_of_unity_on_a_hundred_fields() {
    let g = Grid::new(32, 1.0).unwrap();
    let c = build_cutoffs(g);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let f = random_hermitian(g, &mut rng);
        let mut sum = SpectralField::zeros(g);
        for s in shell_decompose(&f, &c) {
            sum.axpy(1.0, &s.field);
        }
        sum.axpy(-1.0, &f);
        assert!(sum.l2_norm_sq().sqrt() < 1e-12 * f.l2_norm_sq().sqrt());
    }
}

#[test]
fn bernstein_ratios_are_uniform_in_q() {
    let g = Grid::new(32, 1.0).unwrap();
    let c = build_cutoffs(g);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (a, b) in [
        (Exponent::int(2), Exponent::rational(10, 3)),
        (Exponent::int(2), Exponent::Infinity),
        (Exponent::rational(10, 3), Exponent::Infinity),
    ] {
        let sweep = bernstein_sweep(g, a, b, 0..=c.q_interior(), 4, &mut rng).unwrap();
        assert!(sweep.spread() < 5.0, "({a},{b}) spread {}", sweep.spread());
    }
}

#[test]
fn shell_norms_of_a_sum_of_two_shells() {
    let g = Grid::new(32, 1.0).unwrap();
    let c = build_cutoffs(g);
    let f = field(32, 8);
    let u1 = shell_project(&f, 1, &c).unwrap().field;
    let u4 = shell_project(&f, 4, &c).unwrap().field;
    let mut sum = u1.clone();
    sum.axpy(1.0, &u4);
    // shells 1 and 4 do not interact, so shell 1 of the sum is shell 1 of u1 alone
    let s = Exponent::int(4);
    let a = shell_norms(&sum, &s, &c).unwrap().get(1).unwrap();
    let b = shell_norms(&u1, &s, &c).unwrap().get(1).unwrap();
    assert!((a - b).abs() < 1e-12 * b);
}
