use nslab::solver::{
    advection_term, run, run_observed, EnergyLedger, ForcingSpec, InitialCondition, Integrator, Mode, Simulation,
    SolverConfig,
};
use nslab::spectral::random::{random_divfree, SpectrumSpec};
use nslab::spectral::{inner_product, snapshot, sup_norm};
use nslab::{Error, Grid, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn final_state(cfg: &SolverConfig) -> (f64, SpectralField) {
    let mut last = None;
    run_observed(cfg, |_, t, u| {
        last = Some((t, u.clone()));
        Ok(())
    })
    .unwrap();
    last.unwrap()
}

fn rel_l2(a: &SpectralField, b: &SpectralField) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    (d.l2_norm_sq() / b.l2_norm_sq()).sqrt()
}

/// `max_{x,i,j} |∂_j u_i(x)|`.
fn grad_sup(u: &SpectralField) -> f64 {
    let g = u.grid();
    (0..3)
        .map(|j| {
            let comps = std::array::from_fn(|c| {
                (0..g.len())
                    .map(|i| {
                        if g.is_nyquist(i) {
                            Complex64::default()
                        } else {
                            u.component(c)[i] * Complex64::new(0.0, g.kvec(i)[j] as f64)
                        }
                    })
                    .collect()
            });
            let d = SpectralField::from_coeffs(g, comps).unwrap().to_physical();
            d.components()
                .iter()
                .flat_map(|c| c.iter())
                .fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .fold(0.0, f64::max)
}

#[test]
fn stokes_modes_decay_exactly() {
    let g = Grid::new(16, 0.7).unwrap();
    for k in [[0, 0, 4], [1, 2, 2], [3, 0, -1]] {
        let ic = InitialCondition::SingleMode { k, amplitude: 1.3 };
        let cfg = SolverConfig::new(g, 1e-3, 0.1, ic.clone()).with_mode(Mode::Stokes);
        let (t, u) = final_state(&cfg);
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        let exact = ic.build(g).scaled((-g.nu() * k2 * t).exp());
        assert!(rel_l2(&u, &exact) < 1e-12, "k = {k:?}");
    }
}

#[test]
fn taylor_green_is_an_exact_solution() {
    let g = Grid::new(32, 0.1).unwrap();
    let ic = InitialCondition::TaylorGreen { amplitude: 1.0 };
    let cfg = SolverConfig::new(g, 1e-3, 0.1, ic.clone());
    let (t, u) = final_state(&cfg);
    let exact = ic.build(g).scaled((-2.0 * g.nu() * t).exp());
    assert!(rel_l2(&u, &exact) < 1e-12);
    let (adv, _) = advection_term(&u, true);
    assert!(adv.max_coeff() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn advection_is_energy_neutral(seed in any::<u64>()) {
        let u = random_divfree(Grid::new(16, 1.0).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed));
        let mut v = u.clone();
        v.dealias();
        let (adv, umax) = advection_term(&v, true);
        let bound = 1e-10 * v.l2_norm_sq() * grad_sup(&v);
        prop_assert!(inner_product(&adv, &v).abs() < bound);
        prop_assert!(adv.divergence_defect() < 1e-12);
        prop_assert!((umax - sup_norm(&v.to_physical())).abs() < 1e-12 * umax);
    }

    #[test]
    fn steps_keep_fields_solenoidal(seed in any::<u64>()) {
        let g = Grid::new(16, 0.05).unwrap();
        let spec = SpectrumSpec { kc: 2.0, seed, ..Default::default() };
        let cfg = SolverConfig::new(g, 0.01, 0.1, InitialCondition::RandomDivfree(spec));
        let mut worst: f64 = 0.0;
        run_observed(&cfg, |_, _, u| {
            worst = worst.max(u.divergence_defect());
            Ok(())
        })
        .unwrap();
        prop_assert!(worst < 1e-10);
    }
}

#[test]
fn fourth_order_in_time() {
    let g = Grid::new(16, 0.05).unwrap();
    let spec = SpectrumSpec {
        kc: 2.0,
        urms: 1.5,
        seed: 4,
        ..Default::default()
    };
    let ic = InitialCondition::RandomDivfree(spec);
    let at = |dt: f64| final_state(&SolverConfig::new(g, dt, 0.4, ic.clone())).1;
    let reference = at(0.4 / 640.0);
    let errs: Vec<f64> = [20.0, 40.0, 80.0].iter().map(|m| rel_l2(&at(0.4 / m), &reference)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 3.5, "errors {errs:?}, order {order}");
    }
}

#[test]
fn energy_inequality_on_random_data() {
    let g = Grid::new(16, 0.05).unwrap();
    let cfg = SolverConfig::new(
        g,
        0.005,
        0.5,
        InitialCondition::RandomDivfree(SpectrumSpec {
            kc: 3.0,
            ..Default::default()
        }),
    );
    let ledger = run_observed(&cfg, |_, _, _| Ok(())).unwrap();
    let e0 = ledger.initial_energy();
    let check = ledger.check(1e-4 * e0);
    assert!(check.passed(), "excess {}", check.worst_excess);
    assert_eq!(check.pairs, 101 * 100 / 2);
    // energy actually decays, and the dissipation ledger accounts for it
    let last = ledger.samples().last().unwrap();
    assert!(last.energy < e0);
    assert!((last.energy + last.dissipation - e0).abs() < 1e-3 * e0);
}

#[test]
fn cfl_violation_is_reported() {
    let g = Grid::new(16, 0.01).unwrap();
    let cfg = SolverConfig::new(
        g,
        0.5,
        1.0,
        InitialCondition::RandomDivfree(SpectrumSpec {
            urms: 5.0,
            ..Default::default()
        }),
    );
    let err = run_observed(&cfg, |_, _, _| Ok(())).unwrap_err();
    assert!(matches!(err, Error::Cfl { .. }), "{err}");
    assert_eq!(err.exit_code(), 4);
    let it = Integrator::from_config(&cfg);
    assert!(it.cfl_limit(0.0) > 0.0);
}

#[test]
fn forcing_injects_energy() {
    let g = Grid::new(16, 0.1).unwrap();
    let ic = InitialCondition::TaylorGreen { amplitude: 0.1 };
    let mut forced = SolverConfig::new(g, 0.01, 1.0, ic.clone());
    forced.forcing = ForcingSpec::Abc { amplitude: 1.0 };
    let free = SolverConfig::new(g, 0.01, 1.0, ic);
    let e_forced = final_state(&forced).1.l2_norm_sq();
    let e_free = final_state(&free).1.l2_norm_sq();
    assert!(e_forced > 10.0 * e_free);
}

#[test]
fn simulation_stepping_matches_run_observed() {
    let g = Grid::new(16, 0.1).unwrap();
    let cfg = SolverConfig::new(g, 0.01, 0.05, InitialCondition::TaylorGreen { amplitude: 1.0 });
    let mut sim = Simulation::new(cfg.clone()).unwrap();
    while !sim.is_finished().unwrap() {
        sim.advance().unwrap();
    }
    assert_eq!(sim.step_index(), 5);
    assert!((sim.time() - 0.05).abs() < 1e-15);
    assert_eq!(sim.state(), &final_state(&cfg).1);
}

#[test]
fn runs_are_reproducible_on_disk() {
    let g = Grid::new(16, 0.1).unwrap();
    let cfg = SolverConfig::new(
        g,
        0.01,
        0.1,
        InitialCondition::RandomDivfree(SpectrumSpec {
            seed: 5,
            ..Default::default()
        }),
    )
    .with_stride(3);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run(&cfg, a.path()).unwrap();
    let rb = run(&cfg, b.path()).unwrap();
    // steps 0, 3, 6, 9 and the final step 10
    assert_eq!(ra.snapshots.len(), 5);
    for (x, y) in ra.snapshots.iter().zip(&rb.snapshots) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
    let snap = snapshot::load(ra.snapshots.last().unwrap()).unwrap();
    assert!((snap.time - 0.1).abs() < 1e-15);
    assert_eq!(snap.field, final_state(&cfg).1);
    let ledger = EnergyLedger::read_csv(&ra.ledger_path, g.nu()).unwrap();
    assert_eq!(ledger.samples(), ra.ledger.samples());
}

#[test]
fn config_text_round_trips() {
    let g = Grid::new(32, 0.05).unwrap();
    let mut cfg = SolverConfig::new(
        g,
        0.002,
        0.3,
        InitialCondition::SingleMode {
            k: [1, -2, 3],
            amplitude: 0.25,
        },
    )
    .with_mode(Mode::Stokes)
    .with_stride(7);
    cfg.forcing = ForcingSpec::Abc { amplitude: 0.5 };
    assert_eq!(SolverConfig::parse(&cfg.to_text(), "echo").unwrap(), cfg);
}
