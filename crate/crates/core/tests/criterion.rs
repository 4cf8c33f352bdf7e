use nslab::criterion::{
    critical_quantity, criterion_integral, default_t0_grid, detect_bad_points, envelope_excess, jensen_constant,
    scaling_exponent, CriterionParams, GronwallEnvelope, ShellNormSeries,
};
use nslab::lp::{build_cutoffs, shell_norms};
use nslab::solver::{run_observed, InitialCondition, Mode, SolverConfig};
use nslab::{lambda, Error, Exponent, Grid};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s103() -> Exponent {
    Exponent::rational(10, 3)
}

fn params(delta: f64, p_min: i32, p_max: i32) -> CriterionParams {
    CriterionParams::new(s103(), s103(), 0.0, delta, p_min, p_max).unwrap()
}

fn uniform(h: f64, t_end: f64) -> Vec<f64> {
    let count = (t_end / h).round() as usize + 1;
    (0..count).map(|i| i as f64 * h).collect()
}

/// Stokes decay of the mode `(0, 0, 4)`, which sits where `φ_2 = 1`.
fn stokes_series(amplitude: f64, t_end: f64) -> ShellNormSeries {
    let g = Grid::new(16, 1.0).unwrap();
    let cfg = SolverConfig::new(
        g,
        1e-3,
        t_end,
        InitialCondition::SingleMode {
            k: [0, 0, 4],
            amplitude,
        },
    )
    .with_mode(Mode::Stokes);
    let cutoffs = build_cutoffs(g);
    let mut times = Vec::new();
    let mut norms = Vec::new();
    run_observed(&cfg, |_, t, u| {
        times.push(t);
        norms.push(shell_norms(u, &s103(), &cutoffs)?);
        Ok(())
    })
    .unwrap();
    ShellNormSeries::new(times, norms, s103(), "stokes").unwrap()
}

/// Piecewise-random nonnegative norms, one value per `(sample, shell)`.
fn noisy_series(seed: u64) -> ShellNormSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times = uniform(1.0 / 1024.0, 1.0);
    let table: Vec<Vec<f64>> = times
        .iter()
        .map(|_| (0..8).map(|_| rng.random::<f64>().powi(3)).collect())
        .collect();
    let norms = table
        .into_iter()
        .map(|v| nslab::lp::ShellNorms::new(-1, v))
        .collect();
    ShellNormSeries::new(times, norms, s103(), "noise").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn bad_sets_grow_as_delta_shrinks(seed in any::<u64>()) {
        let series = noisy_series(seed);
        let grid = default_t0_grid(&series, &params(0.1, 1, 3));
        let sets: Vec<Vec<f64>> = [0.5, 0.1, 0.01]
            .iter()
            .map(|&d| detect_bad_points(&series, &params(d, 1, 3), &grid).unwrap().bad_times())
            .collect();
        for w in sets.windows(2) {
            prop_assert!(w[0].iter().all(|t| w[1].contains(t)));
        }
        let a = detect_bad_points(&series, &params(0.5, 1, 3), &grid).unwrap();
        let b = detect_bad_points(&series, &params(0.01, 1, 3), &grid).unwrap();
        let pa: Vec<f64> = a.points.iter().map(|x| x.proxy).collect();
        let pb: Vec<f64> = b.points.iter().map(|x| x.proxy).collect();
        prop_assert_eq!(pa, pb);
    }
}

#[test]
fn trapezoid_error_is_second_order() {
    // smooth stand-in for a decaying run
    let f = |t: f64, q: i32| (1.0 + 0.5 * (7.0 * t).sin()) * (-(q as f64 + 2.0) * t).exp();
    let p = params(0.1, 1, 3);
    let at = |h: f64| {
        let s = ShellNormSeries::from_fn(uniform(h, 1.0), -1, 4, s103(), "smooth", f).unwrap();
        [1, 2, 3].map(|pp| criterion_integral(&s, &p, pp, 0.75).unwrap())
    };
    let reference = at(1.0 / 32768.0);
    let errs: Vec<[f64; 3]> = [1.0 / 1024.0, 1.0 / 2048.0, 1.0 / 4096.0]
        .iter()
        .map(|&h| {
            let v = at(h);
            [0, 1, 2].map(|i| (v[i] - reference[i]).abs())
        })
        .collect();
    for i in 0..3 {
        for w in errs.windows(2) {
            let order = (w[0][i] / w[1][i]).log2();
            assert!((1.8..2.2).contains(&order), "p = {}: errors {errs:?}", i + 1);
        }
    }
}

#[test]
fn stokes_decay_is_eventually_good() {
    let series = stokes_series(1.0, 1.0);
    let p = params(0.1, 0, 3);
    let grid = default_t0_grid(&series, &p);
    let report = detect_bad_points(&series, &p, &grid).unwrap();
    // a decaying signal gives a nonincreasing proxy, so the bad set is an initial segment
    for w in report.points.windows(2) {
        assert!(w[1].proxy <= w[0].proxy * (1.0 + 1e-12));
        assert!(w[0].bad || !w[1].bad);
    }
    assert!(report.points.iter().filter(|x| x.t0 >= 0.5).all(|x| !x.bad));
    assert!(report.points.last().unwrap().proxy < 1e-12 * p.threshold());
}

#[test]
fn small_data_is_good_even_at_delta_one() {
    let series = stokes_series(1e-4, 0.5);
    let p = params(1.0, 1, 3);
    let grid = default_t0_grid(&series, &p);
    assert_eq!(grid.len(), 251);
    let report = detect_bad_points(&series, &p, &grid).unwrap();
    assert!(report.bad_times().is_empty());
    assert!(report.max_proxy() > 0.0);
}

#[test]
fn zero_series_is_good() {
    let series = ShellNormSeries::from_fn(uniform(1.0 / 4096.0, 1.5), -1, 5, s103(), "zero", |_, _| 0.0).unwrap();
    let p = params(0.01, 0, 4);
    let report = detect_bad_points(&series, &p, &default_t0_grid(&series, &p)).unwrap();
    assert_eq!(report.max_proxy(), 0.0);
    assert!(report.bad_times().is_empty());
    assert!(report.entries.iter().all(|e| e.integral == 0.0 && !e.bad));
    assert_eq!(jensen_constant(&series, &p, &[1.5]).unwrap(), None);
}

#[test]
fn constant_signal_has_a_closed_form() {
    let c = 0.3;
    let series = ShellNormSeries::from_fn(uniform(1.0 / 4096.0, 2.0), -1, 6, s103(), "const", |_, _| c).unwrap();
    let p = params(0.1, 0, 4);
    let r = s103().value();
    for pp in 0..=4 {
        let shells = (6 - (pp - 2).max(-1) + 1) as f64;
        let expect = lambda(pp).powf(scaling_exponent(&s103(), &s103()) - 2.0) * shells * c.powf(r);
        let got = criterion_integral(&series, &p, pp, 1.5).unwrap();
        assert!((got - expect).abs() < 1e-12 * expect, "p = {pp}");
    }
}

#[test]
fn intervals_must_lie_inside_the_series() {
    let series = ShellNormSeries::from_fn(uniform(1e-3, 0.5), -1, 5, s103(), "x", |_, _| 1.0).unwrap();
    let p = params(0.1, 0, 4);
    let err = criterion_integral(&series, &p, 0, 0.5).unwrap_err();
    assert!(matches!(err, Error::IntervalOutOfRange { .. }));
    let sparse = ShellNormSeries::from_fn(uniform(0.1, 2.0), -1, 5, s103(), "x", |_, _| 1.0).unwrap();
    let err = criterion_integral(&sparse, &p, 3, 1.5).unwrap_err();
    assert!(matches!(err, Error::InsufficientSamples { .. }));
    let other = ShellNormSeries::from_fn(uniform(1e-3, 2.0), -1, 5, Exponent::int(4), "x", |_, _| 1.0).unwrap();
    assert!(criterion_integral(&other, &p, 0, 1.5).is_err());
}

#[test]
fn critical_quantity_of_a_stokes_mode() {
    let series = stokes_series(1.0, 0.6);
    let p = params(0.1, 1, 3);
    let t0 = 0.5625;
    let q2 = |j: usize| series.norms()[j].get_or_zero(2);
    let start = series.times().iter().position(|&t| (t - (t0 - 1.0 / 16.0)).abs() < 1e-9).unwrap();
    for (q, v) in critical_quantity(&series, &p, t0).unwrap() {
        if q == 2 {
            // the sup of a decaying norm sits at the left end of I_2(t₀)
            let expect = lambda(2).powf(3.0 / s103().value() - 1.0) * q2(start);
            assert!((v - expect).abs() < 1e-12 * expect);
        } else {
            assert_eq!(v, 0.0, "q = {q}");
        }
    }
}

#[test]
fn stokes_decay_meets_the_gronwall_envelope() {
    let series = stokes_series(1.0, 0.3);
    let r = s103();
    // with no source the envelope is ‖u_q‖ e^{-cλ_q² t/(r-1)}; the mode decays at λ_2² exactly
    let sharp = GronwallEnvelope {
        r,
        s: s103(),
        delta: 0.0,
        c: r.value() - 1.0,
        big_c: 1.0,
    };
    let excess = envelope_excess(&series, &sharp, 2, 2, 0.05).unwrap();
    assert!(excess.abs() < 1e-6, "{excess}");
    let (t, v) = (series.times(), series.norms());
    let j0 = t.iter().position(|&x| x >= 0.05 - 1e-12).unwrap();
    let last = t.len() - 1;
    let bound = sharp.eval(v[j0].get_or_zero(2), 2, 2, t[last] - t[j0]);
    assert!((v[last].get_or_zero(2) / bound - 1.0).abs() < 1e-6);
    // a slower rate leaves room, which the excess (zero at τ) does not see
    let loose = GronwallEnvelope { c: 1.0, ..sharp };
    assert!(envelope_excess(&series, &loose, 2, 2, 0.05).unwrap().abs() < 1e-12);
    assert!(loose.eval(v[j0].get_or_zero(2), 2, 2, t[last] - t[j0]) > 2.0 * bound);
    let forced = GronwallEnvelope { delta: 0.1, ..loose };
    assert!(forced.limit(2, 2) > 0.0);
    assert!(forced.eval(1.0, 2, 2, 1e3) - forced.limit(2, 2) < 1e-12);
}

#[test]
fn jensen_constant_counts_active_shells() {
    let one = ShellNormSeries::from_fn(uniform(1.0 / 1024.0, 1.0), -1, 6, s103(), "one", |t, q| {
        if q == 3 {
            1.0 + t
        } else {
            0.0
        }
    })
    .unwrap();
    let p = params(0.1, 0, 3);
    let grid = [1.0];
    assert!((jensen_constant(&one, &p, &grid).unwrap().unwrap() - 1.0).abs() < 1e-12);
    let all = ShellNormSeries::from_fn(uniform(1.0 / 1024.0, 1.0), -1, 6, s103(), "all", |_, _| 0.5).unwrap();
    let k = jensen_constant(&all, &p, &grid).unwrap().unwrap();
    // equal shells: the sum is the count times the max, largest at p = 0
    assert!((k - 8.0).abs() < 1e-12, "{k}");
}
