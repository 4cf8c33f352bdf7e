use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nslab::covering::{parse_grid, Convention};
use nslab::criterion::CriterionParams;
use nslab::pipeline::{self, CheckOutcome, CoverOptions, ReportInputs};
use nslab::solver::SolverConfig;
use nslab::{Error, Exponent, Result};

#[derive(Parser)]
#[command(name = "nslab", version, about = "Periodic Navier-Stokes runs and Littlewood-Paley criterion diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and store snapshots, energy ledger and manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shell norms of every snapshot in a run directory.
    Shells {
        #[arg(long = "in")]
        input: PathBuf,
        /// Lebesgue exponent, repeatable (`2`, `10/3`, `inf`).
        #[arg(long = "s", required = true)]
        s: Vec<Exponent>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Criterion integrals and bad-point flags on a shell-norm series.
    Criterion {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        r: Exponent,
        #[arg(long)]
        s: Exponent,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        pmin: i32,
        #[arg(long)]
        pmax: i32,
        /// Number of largest scales standing in for the limsup.
        #[arg(long, default_value_t = 3)]
        tail: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Vitali covers of the bad times and premeasure sums.
    Cover {
        #[arg(long)]
        report: PathBuf,
        /// `start:end:step`.
        #[arg(long = "d-grid")]
        d_grid: String,
        #[arg(long, value_enum, default_value_t = Conv::Lemma)]
        convention: Conv,
        #[arg(long, default_value = "10/3")]
        r: Exponent,
        #[arg(long, default_value = "10/3")]
        s: Exponent,
        #[arg(long, default_value = "0")]
        alpha: Exponent,
        #[arg(long = "floor-min")]
        floor_min: Option<i32>,
        #[arg(long = "floor-max")]
        floor_max: Option<i32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Property checks.
    Verify {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run directory (energy and shell-inequality checks).
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Exponent(s); defaults depend on the check.
        #[arg(long = "s")]
        s: Vec<Exponent>,
        #[arg(long = "q-min", default_value_t = 0)]
        q_min: i32,
        #[arg(long = "q-max", default_value_t = 4)]
        q_max: i32,
        /// Evaluate flux terms at every k-th snapshot.
        #[arg(long = "terms-every", default_value_t = 1)]
        terms_every: usize,
        /// Records CSV for the shell-inequality check (constants go next to it as JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge outputs into a JSON summary with the admissible-δ chain.
    Report {
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[arg(long)]
        constants: Option<PathBuf>,
        #[arg(long)]
        criterion: Option<PathBuf>,
        #[arg(long)]
        premeasure: Option<PathBuf>,
        #[arg(long, default_value = "10/3")]
        r: Exponent,
        #[arg(long, default_value = "10/3")]
        s: Exponent,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Conv {
    Lemma,
    Theorem,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    PartitionOfUnity,
    Bernstein,
    Energy,
    ShellInequality,
    DecompositionExactness,
}

fn print_outcome(o: &CheckOutcome) {
    println!(
        "{}: {} (metric {:.3e}, threshold {:.1e}); {}",
        o.name,
        if o.passed { "pass" } else { "FAIL" },
        o.metric,
        o.threshold,
        o.detail
    );
}

fn trajectory(t: Option<PathBuf>) -> Result<PathBuf> {
    t.ok_or_else(|| Error::InvalidArgument("--trajectory is required for this check".into()))
}

fn constants_path(out: &std::path::Path) -> PathBuf {
    out.with_extension("constants.json")
}

/// `Ok(true)` when the command succeeded and every check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = SolverConfig::load(&config)?;
            let res = pipeline::simulate(&cfg, Some(&config), &out)?;
            let last = res.ledger.samples().last().map_or(0.0, |s| s.t);
            println!("{} snapshots written to {} (t_end = {last})", res.snapshots.len(), out.display());
        }
        Command::Shells { input, s, out } => {
            let series = pipeline::shells(&input, &s, &out)?;
            println!("{} times x {} exponents written to {}", series[0].len(), series.len(), out.display());
        }
        Command::Criterion {
            series,
            r,
            s,
            alpha,
            delta,
            pmin,
            pmax,
            tail,
            out,
        } => {
            let params = CriterionParams::new(r, s, alpha, delta, pmin, pmax)?.with_tail(tail)?;
            let rep = pipeline::criterion(&series, &params, &out)?;
            println!(
                "{} times scanned, {} bad (max over the {} largest scales, threshold delta^r = {:.6e}); max proxy {:.6e}",
                rep.points.len(),
                rep.bad_times().len(),
                params.tail,
                params.threshold(),
                rep.max_proxy()
            );
        }
        Command::Cover {
            report,
            d_grid,
            convention,
            r,
            s,
            alpha,
            floor_min,
            floor_max,
            out,
        } => {
            let floors = match (floor_min, floor_max) {
                (Some(a), Some(b)) => Some(a..=b),
                (None, None) => None,
                _ => return Err(Error::InvalidArgument("give both --floor-min and --floor-max".into())),
            };
            let opts = CoverOptions {
                d_grid: parse_grid(&d_grid)?,
                convention: match convention {
                    Conv::Lemma => Convention::Lemma,
                    Conv::Theorem => Convention::Theorem,
                },
                r,
                s,
                alpha,
                floors,
            };
            let sum = pipeline::cover(&report, &opts, &out)?;
            let exact = sum.predicted.exact.map_or(String::new(), |e| format!(" = {e}"));
            println!(
                "{} bad times; predicted exponent ({}) {:.6}{exact}{}",
                sum.bad_times,
                opts.convention,
                sum.predicted.value,
                if sum.predicted.nonpositive { " (non-positive)" } else { "" }
            );
            match sum.estimate {
                Some(e) => println!(
                    "premeasure trend: estimated dimension {:.4}, grid bracket [{}, {}]",
                    e.estimate,
                    e.lower.map_or("-".into(), |x| format!("{x:.3}")),
                    e.upper.map_or("-".into(), |x| format!("{x:.3}"))
                ),
                None => println!("premeasure trend: no bad times at some floor; premeasures vanish there"),
            }
        }
        Command::Verify {
            check,
            n,
            trials,
            seed,
            trajectory: traj,
            s,
            q_min,
            q_max,
            terms_every,
            out,
        } => {
            let outcome = match check {
                Check::PartitionOfUnity => pipeline::check_partition_of_unity(n, trials, seed)?,
                Check::Bernstein => pipeline::check_bernstein(n, trials, seed, &pipeline::default_bernstein_pairs())?,
                Check::Energy => pipeline::check_energy(&trajectory(traj)?, 1e-4)?,
                Check::DecompositionExactness => {
                    let s = if s.is_empty() {
                        vec![Exponent::int(2), Exponent::rational(10, 3), Exponent::int(4)]
                    } else {
                        s
                    };
                    pipeline::check_decomposition(n, trials, seed, &s)?
                }
                Check::ShellInequality => {
                    let s = match s.as_slice() {
                        [] => Exponent::rational(10, 3),
                        [one] => *one,
                        _ => return Err(Error::InvalidArgument("give a single --s".into())),
                    };
                    let (rep, outcome) =
                        pipeline::check_shell_inequality(&trajectory(traj)?, &s, q_min..=q_max, terms_every)?;
                    if let Some(out) = out {
                        nslab::io::write_shell_inequality(&out, &rep.records)?;
                        pipeline::save_constants(&constants_path(&out), &rep.constants)?;
                    }
                    outcome
                }
            };
            print_outcome(&outcome);
            return Ok(outcome.passed);
        }
        Command::Report {
            ledger,
            constants,
            criterion,
            premeasure,
            r,
            s,
            out,
        } => {
            let inputs = ReportInputs {
                ledger,
                constants,
                criterion,
                premeasure,
            };
            let sum = pipeline::report(&inputs, &r, &s, &out)?;
            let d = &sum.delta_chain;
            println!(
                "M = {:.6}, C = {}, delta_admissible = {}",
                d.m,
                d.c.map_or("absent".into(), |c| format!("{c:.6e}")),
                d.delta_admissible.map_or("absent".into(), |x| format!("{x:.6e}"))
            );
        }
    }
    Ok(true)
}

fn init_threads() {
    if let Some(k) = std::env::var("NSLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if k > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
