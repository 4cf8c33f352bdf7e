//! Dealiased pseudo-spectral integrator for the incompressible Navier-Stokes equations
//! `∂_t u + ℙ(u·∇u) = ν Δu` on the periodic box, with an energy ledger.

mod config;
mod init;
mod integrator;
mod ledger;
mod run;

pub use config::{ForcingSpec, InitialCondition, Mode, SolverConfig};
pub use init::{abc_forcing, single_mode, taylor_green};
pub use integrator::{advection_term, Integrator, CFL_SAFETY};
pub use ledger::{EnergyCheck, EnergyLedger, LedgerSample};
pub use run::{run, run_observed, RunOutput, Simulation};
