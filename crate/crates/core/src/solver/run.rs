use std::fs;
use std::path::{Path, PathBuf};

use super::config::SolverConfig;
use super::integrator::Integrator;
use super::ledger::EnergyLedger;
use crate::error::Result;
use crate::spectral::{gradient_norm_l2, snapshot, SpectralField};

/// Time-stepping state for one configuration.
pub struct Simulation {
    config: SolverConfig,
    integrator: Integrator,
    state: SpectralField,
    step: usize,
    ledger: EnergyLedger,
}

impl Simulation {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let mut state = config.initial_condition.build(config.grid);
        if config.dealias {
            state.dealias();
        }
        Self::with_state(config, state)
    }

    /// Start from an explicit field instead of the configured initial condition.
    pub fn with_state(config: SolverConfig, state: SpectralField) -> Result<Self> {
        config.validate()?;
        let integrator = Integrator::from_config(&config);
        let mut ledger = EnergyLedger::new(config.grid.nu());
        ledger.record(0.0, state.l2_norm_sq(), gradient_norm_l2(&state).powi(2));
        Ok(Self {
            config,
            integrator,
            state,
            step: 0,
            ledger,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn state(&self) -> &SpectralField {
        &self.state
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.config.dt
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> EnergyLedger {
        self.ledger
    }

    pub fn is_finished(&self) -> Result<bool> {
        Ok(self.step >= self.config.step_count()?)
    }

    /// One step; the ledger gains a sample.
    pub fn advance(&mut self) -> Result<()> {
        let t = self.time();
        self.state = self.integrator.step(&self.state, t, self.config.dt)?;
        self.step += 1;
        let t = self.time();
        self.ledger.record(t, self.state.l2_norm_sq(), gradient_norm_l2(&self.state).powi(2));
        Ok(())
    }
}

/// Run to `t_end`, calling `observer(step, t, field)` at step 0 and every
/// `snapshot_stride` steps (and at the final step).
pub fn run_observed<F>(config: &SolverConfig, mut observer: F) -> Result<EnergyLedger>
where
    F: FnMut(usize, f64, &SpectralField) -> Result<()>,
{
    let mut sim = Simulation::new(config.clone())?;
    let steps = config.step_count()?;
    observer(0, 0.0, sim.state())?;
    while sim.step_index() < steps {
        sim.advance()?;
        let s = sim.step_index();
        if s % config.snapshot_stride == 0 || s == steps {
            observer(s, sim.time(), sim.state())?;
        }
    }
    Ok(sim.into_ledger())
}

/// Output of a file-backed run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<PathBuf>,
    pub ledger_path: PathBuf,
    pub ledger: EnergyLedger,
}

pub fn snapshot_name(index: usize) -> String {
    format!("snap_{index:06}.nslp")
}

/// Run and write `NSLP1` snapshots plus `ledger.csv` into `out`. On failure the
/// snapshots and ledger produced so far are flushed before the error is returned.
pub fn run(config: &SolverConfig, out: &Path) -> Result<RunOutput> {
    fs::create_dir_all(out)?;
    let mut sim = Simulation::new(config.clone())?;
    let steps = config.step_count()?;
    let mut snapshots = Vec::new();
    let write = |sim: &Simulation, snapshots: &mut Vec<PathBuf>| -> Result<()> {
        let p = out.join(snapshot_name(snapshots.len()));
        snapshot::save(&p, sim.time(), sim.state())?;
        snapshots.push(p);
        Ok(())
    };
    write(&sim, &mut snapshots)?;
    let ledger_path = out.join("ledger.csv");
    let mut result = Ok(());
    while sim.step_index() < steps {
        if let Err(e) = sim.advance() {
            result = Err(e);
            break;
        }
        let s = sim.step_index();
        if s % config.snapshot_stride == 0 || s == steps {
            write(&sim, &mut snapshots)?;
        }
    }
    sim.ledger().write_csv(&ledger_path)?;
    result?;
    Ok(RunOutput {
        snapshots,
        ledger_path,
        ledger: sim.into_ledger(),
    })
}
