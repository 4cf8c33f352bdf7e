//! File-level operations behind the command-line tool.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::covering::{
    covers_by_floor, dimension_exponent, dimension_exponent_exact, estimate_dimension, premeasure_trend, Convention,
    DimensionEstimate, DimensionExponent,
};
use crate::criterion::{
    default_t0_grid, delta_admissible, detect_bad_points, m_constant, CriterionParams, CriterionReport, ShellNormSeries,
};
use crate::error::{Error, Result};
use crate::exponent::{Exponent, Rational};
use crate::flux::{sample_shells, shell_terms, verify_shell_inequality, FittedConstants, ShellInequalityReport};
use crate::io::{self, PremeasureRow, RunManifest};
use crate::lp::{bernstein_sweep, build_cutoffs, shell_decompose, shell_norms};
use crate::solver::{self, EnergyLedger, RunOutput, SolverConfig};
use crate::spectral::random::{random_divfree, random_hermitian};
use crate::spectral::{snapshot, Grid, SpectralField};

fn write_manifest(manifest: RunManifest, at: &Path, inputs: &[PathBuf], outputs: &[PathBuf]) -> Result<()> {
    let mut m = manifest;
    m.record(at, inputs, outputs)?;
    m.save(at)
}

/// Run the solver and write snapshots, `ledger.csv` and `manifest.json` into `out`.
pub fn simulate(config: &SolverConfig, config_path: Option<&Path>, out: &Path) -> Result<RunOutput> {
    let result = solver::run(config, out)?;
    let mut outputs = result.snapshots.clone();
    outputs.push(result.ledger_path.clone());
    let manifest = RunManifest::new("simulate").with_config("config", config.to_text());
    let inputs: Vec<PathBuf> = config_path.into_iter().map(Path::to_path_buf).collect();
    write_manifest(manifest, &out.join(io::MANIFEST_NAME), &inputs, &outputs)?;
    Ok(result)
}

/// Snapshot files of a run directory in time order (verified against its manifest).
pub fn list_snapshots(dir: &Path) -> Result<Vec<PathBuf>> {
    RunManifest::verify_companion(dir)?;
    let mut out: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "nslp"))
        .collect();
    out.sort();
    if out.is_empty() {
        return Err(Error::Data(format!("no .nslp snapshots in {}", dir.display())));
    }
    Ok(out)
}

/// Shell-norm series for each exponent from the snapshots in `input`.
pub fn shells(input: &Path, exponents: &[Exponent], out: &Path) -> Result<Vec<ShellNormSeries>> {
    if exponents.is_empty() {
        return Err(Error::InvalidArgument("at least one exponent is required".into()));
    }
    for s in exponents {
        s.check_lebesgue()?;
    }
    let files = list_snapshots(input)?;
    let mut times = Vec::with_capacity(files.len());
    let mut norms: Vec<Vec<_>> = vec![Vec::with_capacity(files.len()); exponents.len()];
    for f in &files {
        let snap = snapshot::load(f)?;
        let cutoffs = build_cutoffs(snap.field.grid());
        times.push(snap.time);
        for (k, s) in exponents.iter().enumerate() {
            norms[k].push(shell_norms(&snap.field, s, &cutoffs)?);
        }
    }
    let source = input.display().to_string();
    let series = exponents
        .iter()
        .zip(norms)
        .map(|(s, n)| ShellNormSeries::new(times.clone(), n, *s, source.clone()))
        .collect::<Result<Vec<_>>>()?;
    io::save_series(out, &series)?;
    let manifest_in = RunManifest::companion_path(input);
    let inputs: Vec<PathBuf> = if manifest_in.exists() { vec![manifest_in] } else { files };
    let manifest = RunManifest::new("shells").with_config(
        "s",
        exponents.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "),
    );
    write_manifest(manifest, &RunManifest::companion_path(out), &inputs, &[out.to_path_buf()])?;
    Ok(series)
}

pub fn criterion(series_path: &Path, params: &CriterionParams, out: &Path) -> Result<CriterionReport> {
    RunManifest::verify_companion(series_path)?;
    let series = io::load_series(series_path, Some(&params.s))?;
    let grid = default_t0_grid(&series, params);
    let report = detect_bad_points(&series, params, &grid)?;
    io::write_report(out, &report)?;
    let manifest = RunManifest::new("criterion")
        .with_config("r", params.r)
        .with_config("s", params.s)
        .with_config("alpha", params.alpha)
        .with_config("delta", params.delta)
        .with_config("pmin", params.p_min)
        .with_config("pmax", params.p_max)
        .with_config("tail", params.tail);
    write_manifest(
        manifest,
        &RunManifest::companion_path(out),
        &[series_path.to_path_buf()],
        &[out.to_path_buf()],
    )?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct CoverOptions {
    pub d_grid: Vec<f64>,
    pub convention: Convention,
    pub r: Exponent,
    pub s: Exponent,
    pub alpha: Exponent,
    /// Defaults to the scales present in the report.
    pub floors: Option<RangeInclusive<i32>>,
}

#[derive(Debug, Clone)]
pub struct CoverSummary {
    pub rows: Vec<PremeasureRow>,
    pub estimate: Option<DimensionEstimate>,
    pub predicted: DimensionExponent,
    pub bad_times: usize,
}

pub fn predicted_dimension(r: &Exponent, s: &Exponent, alpha: &Exponent, convention: Convention) -> DimensionExponent {
    match (r.as_rational(), s.as_rational(), alpha.as_rational()) {
        (Some(r), Some(s), Some(a)) => dimension_exponent_exact(r, s, a, convention),
        _ => dimension_exponent(r.value(), s.value(), alpha.value(), convention),
    }
}

pub fn cover(report_path: &Path, opts: &CoverOptions, out: &Path) -> Result<CoverSummary> {
    RunManifest::verify_companion(report_path)?;
    let entries = io::read_report(report_path)?;
    if opts.d_grid.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::InvalidArgument("premeasure exponents must be > 0".into()));
    }
    let floors = match &opts.floors {
        Some(f) => f.clone(),
        None => {
            let lo = entries.iter().map(|e| e.p).min();
            let hi = entries.iter().map(|e| e.p).max();
            match (lo, hi) {
                (Some(lo), Some(hi)) => lo..=hi,
                _ => return Err(Error::Data(format!("{}: empty report", report_path.display()))),
            }
        }
    };
    let covers = covers_by_floor(&entries, floors)?;
    let mut rows = Vec::new();
    for &d in &opts.d_grid {
        for (floor, intervals, premeasure) in premeasure_trend(&covers, d)?.trend {
            rows.push(PremeasureRow {
                d,
                floor,
                intervals,
                premeasure,
            });
        }
    }
    io::write_premeasure(out, &rows)?;
    let manifest = RunManifest::new("cover")
        .with_config("convention", opts.convention)
        .with_config("r", opts.r)
        .with_config("s", opts.s)
        .with_config("alpha", opts.alpha);
    write_manifest(
        manifest,
        &RunManifest::companion_path(out),
        &[report_path.to_path_buf()],
        &[out.to_path_buf()],
    )?;
    let mut bad: Vec<f64> = entries.iter().filter(|e| e.bad).map(|e| e.t0).collect();
    bad.dedup();
    Ok(CoverSummary {
        rows,
        estimate: estimate_dimension(&covers, &opts.d_grid),
        predicted: predicted_dimension(&opts.r, &opts.s, &opts.alpha, opts.convention),
        bad_times: bad.len(),
    })
}

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// The quantity compared against the threshold.
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, metric: f64, threshold: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: metric < threshold,
            metric,
            threshold,
            detail,
        }
    }
}

/// `‖f - Σ_q u_q‖₂ / ‖f‖₂` over random fields.
pub fn check_partition_of_unity(n: usize, trials: usize, seed: u64) -> Result<CheckOutcome> {
    let grid = Grid::new(n, 1.0)?;
    let cutoffs = build_cutoffs(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = random_hermitian(grid, &mut rng);
        let mut sum = SpectralField::zeros(grid);
        for shell in shell_decompose(&f, &cutoffs) {
            sum.axpy(1.0, &shell.field);
        }
        sum.axpy(-1.0, &f);
        worst = worst.max((sum.l2_norm_sq() / f.l2_norm_sq()).sqrt());
    }
    Ok(CheckOutcome::new(
        "partition-of-unity",
        worst,
        1e-12,
        format!("max relative reconstruction error over {trials} fields at n = {n}"),
    ))
}

/// Exponent pairs checked by default.
pub fn default_bernstein_pairs() -> Vec<(Exponent, Exponent)> {
    vec![
        (Exponent::int(1), Exponent::int(2)),
        (Exponent::int(2), Exponent::rational(10, 3)),
        (Exponent::int(2), Exponent::int(4)),
        (Exponent::int(2), Exponent::Infinity),
        (Exponent::rational(10, 3), Exponent::Infinity),
    ]
}

/// Largest spread `max_q / min_q` of the Bernstein ratios over the resolved interior shells.
pub fn check_bernstein(n: usize, trials: usize, seed: u64, pairs: &[(Exponent, Exponent)]) -> Result<CheckOutcome> {
    let grid = Grid::new(n, 1.0)?;
    let cutoffs = build_cutoffs(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (a, b) in pairs {
        let sweep = bernstein_sweep(grid, *a, *b, 0..=cutoffs.q_interior(), trials, &mut rng)?;
        worst = worst.max(sweep.spread());
        detail.push(format!("({a},{b}): C = {:.4}, spread = {:.3}", sweep.constant(), sweep.spread()));
    }
    Ok(CheckOutcome::new("bernstein", worst, 5.0, detail.join("; ")))
}

/// `max_i<j [E_j + D_j - D_i - E_i] / E_0` from a run directory's ledger.
pub fn check_energy(trajectory: &Path, rel_tol: f64) -> Result<CheckOutcome> {
    RunManifest::verify_companion(trajectory)?;
    let ledger = EnergyLedger::read_csv(&trajectory.join("ledger.csv"), 1.0)?;
    Ok(energy_outcome(&ledger, rel_tol))
}

pub fn energy_outcome(ledger: &EnergyLedger, rel_tol: f64) -> CheckOutcome {
    let e0 = ledger.initial_energy();
    let c = ledger.check(rel_tol * e0);
    let rel = if e0 > 0.0 { c.worst_excess / e0 } else { c.worst_excess };
    let mut out = CheckOutcome::new(
        "energy",
        rel,
        rel_tol,
        format!("worst relative excess over {} ordered pairs", c.pairs),
    );
    out.passed = c.passed();
    out
}

/// Shell inequality on a stored trajectory; flux terms at every `terms_every`-th interior snapshot.
pub fn check_shell_inequality(
    trajectory: &Path,
    s: &Exponent,
    qs: RangeInclusive<i32>,
    terms_every: usize,
) -> Result<(ShellInequalityReport, CheckOutcome)> {
    if terms_every == 0 {
        return Err(Error::InvalidArgument("terms_every must be >= 1".into()));
    }
    let files = list_snapshots(trajectory)?;
    let mut samples = Vec::with_capacity(files.len());
    let mut nu = None;
    for (j, f) in files.iter().enumerate() {
        let snap = snapshot::load(f)?;
        nu = Some(snap.field.grid().nu());
        let interior = j > 0 && j + 1 < files.len();
        let with_terms = interior && j % terms_every == 0;
        samples.push(sample_shells(snap.time, &snap.field, s, qs.clone(), with_terms)?);
    }
    let report = verify_shell_inequality(&samples, qs, s, nu.unwrap_or(1.0))?;
    let outcome = shell_inequality_outcome(&report);
    Ok((report, outcome))
}

pub fn shell_inequality_outcome(report: &ShellInequalityReport) -> CheckOutcome {
    let k = &report.constants;
    let show = |v: Option<f64>| v.map_or("absent".to_string(), |x| format!("{x:.6e}"));
    CheckOutcome::new(
        "shell-inequality",
        report.violations.len() as f64,
        0.5,
        format!(
            "{} records; c_visc = {}, c_rhs = {}, c_i1 = {}, c_i2 = {}, c_i3 = {}",
            report.records.len(),
            show(k.c_visc),
            show(k.c_rhs),
            show(k.c_i1),
            show(k.c_i2),
            show(k.c_i3)
        ),
    )
}

/// Largest `|I₁+I₂+I₃ - unsplit| / |unsplit|` over random fields and exponents.
pub fn check_decomposition(n: usize, trials: usize, seed: u64, exponents: &[Exponent]) -> Result<CheckOutcome> {
    let grid = Grid::new(n, 1.0)?;
    let cutoffs = build_cutoffs(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u = random_divfree(grid, &mut rng);
        for s in exponents {
            for t in shell_terms(&u, s, cutoffs.shells())? {
                if t.flux.unsplit != 0.0 || t.flux.split_sum() != 0.0 {
                    worst = worst.max(t.flux.decomposition_defect());
                }
            }
        }
    }
    Ok(CheckOutcome::new(
        "decomposition-exactness",
        worst,
        1e-8,
        format!("max relative defect over {trials} fields at n = {n}"),
    ))
}

/// Write fitted constants as JSON.
pub fn save_constants(path: &Path, constants: &FittedConstants) -> Result<()> {
    let mut text = serde_json::to_string_pretty(constants).map_err(|e| Error::Data(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_constants(path: &Path) -> Result<FittedConstants> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::format(path.display().to_string(), e.line(), e.to_string()))
}

/// Inputs to the summary report; every field is optional.
#[derive(Debug, Clone, Default)]
pub struct ReportInputs {
    pub ledger: Option<PathBuf>,
    pub constants: Option<PathBuf>,
    pub criterion: Option<PathBuf>,
    pub premeasure: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaChain {
    pub r: String,
    pub s: String,
    /// `Σ_{q≥p-2}(λ_q^{3/s-1} λ_p^{r(1-3/s)})^{r/(r-1)} λ_p^{-r(1-3/s)}`.
    pub m: f64,
    /// Fitted right-side constant of the shell inequality.
    pub c: Option<f64>,
    /// `1/(64 M C)`.
    pub delta_admissible: Option<f64>,
    /// Proof devices without a numerical counterpart.
    pub not_computed: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub energy: Option<CheckOutcome>,
    pub constants: Option<FittedConstants>,
    pub criterion_points: Option<usize>,
    pub bad_points: Option<usize>,
    /// `(floor, d, premeasure)` rows.
    pub premeasure: Option<Vec<(i32, f64, f64)>>,
    pub delta_chain: DeltaChain,
}

pub fn report(inputs: &ReportInputs, r: &Exponent, s: &Exponent, out: &Path) -> Result<Summary> {
    let mut in_paths = Vec::new();
    let energy = match &inputs.ledger {
        Some(p) => {
            in_paths.push(p.clone());
            Some(energy_outcome(&EnergyLedger::read_csv(p, 1.0)?, 1e-4))
        }
        None => None,
    };
    let constants = match &inputs.constants {
        Some(p) => {
            in_paths.push(p.clone());
            Some(load_constants(p)?)
        }
        None => None,
    };
    let (criterion_points, bad_points) = match &inputs.criterion {
        Some(p) => {
            RunManifest::verify_companion(p)?;
            in_paths.push(p.clone());
            let entries = io::read_report(p)?;
            let mut all: Vec<f64> = entries.iter().map(|e| e.t0).collect();
            all.dedup();
            let mut bad: Vec<f64> = entries.iter().filter(|e| e.bad).map(|e| e.t0).collect();
            bad.dedup();
            (Some(all.len()), Some(bad.len()))
        }
        None => (None, None),
    };
    let premeasure = match &inputs.premeasure {
        Some(p) => {
            RunManifest::verify_companion(p)?;
            in_paths.push(p.clone());
            Some(io::read_premeasure(p)?.iter().map(|x| (x.floor, x.d, x.premeasure)).collect())
        }
        None => None,
    };
    let m = m_constant(r, s);
    let c = constants.and_then(|k| k.c_rhs);
    let summary = Summary {
        energy,
        constants,
        criterion_points,
        bad_points,
        premeasure,
        delta_chain: DeltaChain {
            r: r.to_string(),
            s: s.to_string(),
            m,
            c,
            delta_admissible: c.filter(|&c| c > 0.0).map(|c| delta_admissible(m, c)),
            not_computed: vec!["p0".into(), "p1".into(), "index set I_p".into()],
        },
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Data(e.to_string()))?;
    text.push('\n');
    fs::write(out, text)?;
    let manifest = RunManifest::new("report").with_config("r", r).with_config("s", s);
    write_manifest(manifest, &RunManifest::companion_path(out), &in_paths, &[out.to_path_buf()])?;
    Ok(summary)
}

/// Exact `r(3/s + 2/r - 1)` where both exponents are rational.
pub fn exact_scaling(r: &Exponent, s: &Exponent) -> Option<Rational> {
    Some(crate::criterion::scaling_exponent_exact(r.as_rational()?, s.as_rational()?))
}
