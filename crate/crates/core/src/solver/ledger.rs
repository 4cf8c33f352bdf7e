use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerSample {
    pub t: f64,
    /// `‖u(t)‖₂²`.
    pub energy: f64,
    /// `2ν ∫₀ᵗ ‖∇u‖₂²` by the trapezoid rule over recorded samples.
    pub dissipation: f64,
    /// `‖∇u(t)‖₂²`, kept so the running integral can be extended.
    pub grad_sq: f64,
}

/// Running record of energy and cumulative dissipation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    nu: f64,
    samples: Vec<LedgerSample>,
}

/// Result of checking `E(t) + 2ν∫_{t₀}^t‖∇u‖² <= E(t₀) + tol` over all recorded pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCheck {
    pub tol: f64,
    /// `max_{t₀ < t} [E(t) + D(t) - D(t₀) - E(t₀)]`.
    pub worst_excess: f64,
    pub pairs: usize,
}

impl EnergyCheck {
    pub fn passed(&self) -> bool {
        self.worst_excess <= self.tol
    }
}

impl EnergyLedger {
    pub fn new(nu: f64) -> Self {
        Self { nu, samples: Vec::new() }
    }

    pub fn samples(&self) -> &[LedgerSample] {
        &self.samples
    }

    pub fn record(&mut self, t: f64, energy: f64, grad_sq: f64) {
        let dissipation = match self.samples.last() {
            Some(prev) => prev.dissipation + self.nu * (t - prev.t) * (prev.grad_sq + grad_sq),
            None => 0.0,
        };
        self.samples.push(LedgerSample {
            t,
            energy,
            dissipation,
            grad_sq,
        });
    }

    pub fn initial_energy(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.energy)
    }

    /// Check every stored pair in `O(N)`: for each `t` compare with the smallest
    /// `E(t₀) + D(t₀)` seen before it.
    pub fn check(&self, tol: f64) -> EnergyCheck {
        let mut worst = f64::NEG_INFINITY;
        let mut best_prev = f64::INFINITY;
        for s in &self.samples {
            let level = s.energy + s.dissipation;
            if best_prev.is_finite() {
                worst = worst.max(level - best_prev);
            }
            best_prev = best_prev.min(level);
        }
        let n = self.samples.len();
        EnergyCheck {
            tol,
            worst_excess: if n < 2 { 0.0 } else { worst },
            pairs: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["t", "energy", "dissipation", "grad_sq"]).map_err(csv_err)?;
        for s in &self.samples {
            w.write_record([
                format!("{:.16e}", s.t),
                format!("{:.16e}", s.energy),
                format!("{:.16e}", s.dissipation),
                format!("{:.16e}", s.grad_sq),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path, nu: f64) -> Result<Self> {
        let name = path.display().to_string();
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let mut ledger = Self::new(nu);
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::format(&name, line, e.to_string()))?;
            let field = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::format(&name, line, format!("bad value in column {j}")))
            };
            ledger.samples.push(LedgerSample {
                t: field(0)?,
                energy: field(1)?,
                dissipation: field(2)?,
                grad_sq: field(3)?,
            });
        }
        Ok(ledger)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for s in &self.samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", s.t, s.energy, s.dissipation)?;
        }
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Data(format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_decay_passes_and_growth_fails() {
        // E(t) = e^{-2t}, dE/dt = -2 e^{-2t} = -2ν G with ν = 1, G = e^{-2t}
        let mut l = EnergyLedger::new(1.0);
        for i in 0..=1000 {
            let t = i as f64 * 1e-3;
            l.record(t, (-2.0 * t).exp(), (-2.0 * t).exp());
        }
        let c = l.check(1e-6);
        assert!(c.passed(), "{c:?}");
        assert_eq!(c.pairs, 1001 * 1000 / 2);

        let mut bad = EnergyLedger::new(1.0);
        bad.record(0.0, 1.0, 0.0);
        bad.record(1.0, 1.1, 0.0);
        assert!(!bad.check(1e-3).passed());
    }
}
