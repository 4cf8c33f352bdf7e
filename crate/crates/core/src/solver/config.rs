use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::random::SpectrumSpec;
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Full nonlinear dynamics.
    Full,
    /// Linear Stokes flow: the advection term is dropped.
    Stokes,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `amplitude · e · sin(k·x)` with `e ⟂ k`.
    SingleMode { k: [i64; 3], amplitude: f64 },
    /// `amplitude · (sin x₁ cos x₂, -cos x₁ sin x₂, 0)`.
    TaylorGreen { amplitude: f64 },
    RandomDivfree(SpectrumSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForcingSpec {
    None,
    /// Steady Arnold-Beltrami-Childress forcing on the `|k| = 1` modes.
    Abc { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub mode: Mode,
    pub snapshot_stride: usize,
    pub initial_condition: InitialCondition,
    pub forcing: ForcingSpec,
}

impl SolverConfig {
    pub fn new(grid: Grid, dt: f64, t_end: f64, initial_condition: InitialCondition) -> Self {
        Self {
            grid,
            dt,
            t_end,
            dealias: true,
            mode: Mode::Full,
            snapshot_stride: 1,
            initial_condition,
            forcing: ForcingSpec::None,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidArgument("snapshot_stride must be >= 1".into()));
        }
        self.step_count()?;
        Ok(())
    }

    /// Number of steps; `t_end` must be an integer multiple of `dt`.
    pub fn step_count(&self) -> Result<usize> {
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(self.dt) {
            return Err(Error::InvalidArgument(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }

    /// Parse the plain-text `key = value` format.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut n = None;
        let mut nu = 1.0;
        let mut dt = None;
        let mut t_end = None;
        let mut mode = Mode::Full;
        let mut dealias = true;
        let mut stride = 1usize;
        let mut ic_name = String::from("taylor_green");
        let mut spectrum = SpectrumSpec::default();
        let mut amplitude = None;
        let mut ic_k = [0i64, 0, 4];
        let mut forcing_name = String::from("none");
        let mut forcing_amp = 1.0;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let line_no = lineno + 1;
            let err = |msg: String| Error::format(source, line_no, msg);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
            let key = key.trim();
            let value = value.trim();
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| err(format!("{key}: cannot parse {v:?} as a number")))
            };
            let int = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| err(format!("{key}: cannot parse {v:?} as an integer")))
            };
            match key {
                "n" => n = Some(int(value)? as usize),
                "nu" => nu = num(value)?,
                "dt" => dt = Some(num(value)?),
                "t_end" => t_end = Some(num(value)?),
                "mode" => {
                    mode = match value {
                        "full" => Mode::Full,
                        "stokes" => Mode::Stokes,
                        other => return Err(err(format!("unknown mode {other:?}"))),
                    }
                }
                "dealias" => {
                    dealias = match value {
                        "true" | "on" | "1" => true,
                        "false" | "off" | "0" => false,
                        other => return Err(err(format!("dealias: expected true/false, got {other:?}"))),
                    }
                }
                "snapshot_stride" => stride = int(value)? as usize,
                "ic.name" => match value {
                    "single_mode" | "taylor_green" | "random_divfree" => ic_name = value.to_string(),
                    other => return Err(err(format!("unknown ic.name {other:?}"))),
                },
                "ic.seed" => spectrum.seed = int(value)?,
                "ic.slope" => spectrum.slope = num(value)?,
                "ic.kc" => spectrum.kc = num(value)?,
                "ic.amplitude" => amplitude = Some(num(value)?),
                "ic.k" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(err(format!("ic.k: expected three integers, got {value:?}")));
                    }
                    for (slot, p) in ic_k.iter_mut().zip(parts) {
                        *slot = p
                            .parse()
                            .map_err(|_| err(format!("ic.k: cannot parse {p:?}")))?;
                    }
                }
                "forcing.name" => match value {
                    "none" | "abc" => forcing_name = value.to_string(),
                    other => return Err(err(format!("unknown forcing.name {other:?}"))),
                },
                "forcing.amplitude" => forcing_amp = num(value)?,
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }

        let missing = |k: &str| Error::format(source, 0, format!("missing required key {k:?}"));
        let grid = Grid::new(n.ok_or_else(|| missing("n"))?, nu)?;
        let initial_condition = match ic_name.as_str() {
            "single_mode" => InitialCondition::SingleMode {
                k: ic_k,
                amplitude: amplitude.unwrap_or(1.0),
            },
            "taylor_green" => InitialCondition::TaylorGreen {
                amplitude: amplitude.unwrap_or(1.0),
            },
            "random_divfree" => {
                if let Some(a) = amplitude {
                    spectrum.urms = a;
                }
                InitialCondition::RandomDivfree(spectrum)
            }
            other => return Err(Error::format(source, 0, format!("unknown ic.name {other:?}"))),
        };
        let forcing = match forcing_name.as_str() {
            "none" => ForcingSpec::None,
            "abc" => ForcingSpec::Abc { amplitude: forcing_amp },
            other => return Err(Error::format(source, 0, format!("unknown forcing.name {other:?}"))),
        };
        let cfg = Self {
            grid,
            dt: dt.ok_or_else(|| missing("dt"))?,
            t_end: t_end.ok_or_else(|| missing("t_end"))?,
            dealias,
            mode,
            snapshot_stride: stride,
            initial_condition,
            forcing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Canonical `key = value` rendering; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}", self.grid.n());
        let _ = writeln!(s, "nu = {:?}", self.grid.nu());
        let _ = writeln!(s, "dt = {:?}", self.dt);
        let _ = writeln!(s, "t_end = {:?}", self.t_end);
        let _ = writeln!(
            s,
            "mode = {}",
            match self.mode {
                Mode::Full => "full",
                Mode::Stokes => "stokes",
            }
        );
        let _ = writeln!(s, "dealias = {}", self.dealias);
        let _ = writeln!(s, "snapshot_stride = {}", self.snapshot_stride);
        match &self.initial_condition {
            InitialCondition::SingleMode { k, amplitude } => {
                let _ = writeln!(s, "ic.name = single_mode");
                let _ = writeln!(s, "ic.k = {},{},{}", k[0], k[1], k[2]);
                let _ = writeln!(s, "ic.amplitude = {amplitude:?}");
            }
            InitialCondition::TaylorGreen { amplitude } => {
                let _ = writeln!(s, "ic.name = taylor_green");
                let _ = writeln!(s, "ic.amplitude = {amplitude:?}");
            }
            InitialCondition::RandomDivfree(spec) => {
                let _ = writeln!(s, "ic.name = random_divfree");
                let _ = writeln!(s, "ic.seed = {}", spec.seed);
                let _ = writeln!(s, "ic.slope = {:?}", spec.slope);
                let _ = writeln!(s, "ic.kc = {:?}", spec.kc);
                let _ = writeln!(s, "ic.amplitude = {:?}", spec.urms);
            }
        }
        match self.forcing {
            ForcingSpec::None => {
                let _ = writeln!(s, "forcing.name = none");
            }
            ForcingSpec::Abc { amplitude } => {
                let _ = writeln!(s, "forcing.name = abc");
                let _ = writeln!(s, "forcing.amplitude = {amplitude:?}");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# random run
n = 32
nu = 0.05
dt = 0.001
t_end = 0.01
mode = full
dealias = true
snapshot_stride = 5
ic.name = random_divfree
ic.seed = 42
ic.slope = -2
ic.kc = 3
forcing.name = none
";

    #[test]
    fn parses_and_round_trips() {
        let cfg = SolverConfig::parse(SAMPLE, "sample").unwrap();
        assert_eq!(cfg.grid.n(), 32);
        assert_eq!(cfg.snapshot_stride, 5);
        assert_eq!(cfg.step_count().unwrap(), 10);
        match cfg.initial_condition {
            InitialCondition::RandomDivfree(s) => assert_eq!(s.seed, 42),
            _ => panic!("wrong ic"),
        }
        let again = SolverConfig::parse(&cfg.to_text(), "echo").unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn reports_line_numbers() {
        let err = SolverConfig::parse("n = 32\ndt = abc\n", "cfg").unwrap_err();
        match err {
            Error::Format { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        assert!(SolverConfig::parse("n = 32\nbogus = 1\n", "cfg").is_err());
        assert!(SolverConfig::parse("n = 32\ndt = 0.3\nt_end = 1\n", "cfg").is_err());
    }
}
