//! `key = value` run configuration.
//!
//! Lines starting with `#` are comments. Recognised keys:
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `fock_dim` | 48 | Fock truncation N |
//! | `x_min`, `x_max`, `n_points` | −12, 12, 193 | square (α,β) window |
//! | `theta1`, `theta2` | pi/3, pi/6 | angle pair; accepts `pi`, `pi/4`, `3*pi/4` |
//! | `state` | `vacuum` | `vacuum`, `coherent A B` or `cat A0 B0 P` |
//! | `alpha`, `beta` | 0.3, −0.2 | labels of U for `ufrac` |
//! | `resolution` | 16 | rows of `fig2`/`fig3` |
//! | `moment_norm` | `purity` | `purity` or `probability` |
//! | `out` | stdout | output path |
//! | `tol.<invariant>` | see `verify` | tolerance override |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bifrac::fock::{coherent_state, FockOperator, FockSpace, FockState};
use bifrac::frame::AnglePair;
use bifrac::frft::SampledAxis;
use bifrac::quasiprob::{cat_density, CatState, MomentNorm};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::verify::DEFAULT_TOLERANCES;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Vacuum,
    Coherent { alpha: f64, beta: f64 },
    Cat { alpha0: f64, beta0: f64, p: f64 },
}

impl StateSpec {
    fn parse(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let nums = |k: usize| -> CliResult<Vec<f64>> {
            if parts.len() != k + 1 {
                return Err(CliError::Config(format!("state '{}' expects {k} numbers", parts[0])));
            }
            parts[1..].iter().map(|p| parse_real(p)).collect()
        };
        match parts.first().copied() {
            Some("vacuum") => nums(0).map(|_| StateSpec::Vacuum),
            Some("coherent") => nums(2).map(|v| StateSpec::Coherent { alpha: v[0], beta: v[1] }),
            Some("cat") => nums(3).map(|v| StateSpec::Cat { alpha0: v[0], beta0: v[1], p: v[2] }),
            _ => Err(CliError::Config(format!("unknown state '{s}'"))),
        }
    }

    fn canonical(&self) -> String {
        match *self {
            StateSpec::Vacuum => "vacuum".into(),
            StateSpec::Coherent { alpha, beta } => format!("coherent {alpha:?} {beta:?}"),
            StateSpec::Cat { alpha0, beta0, p } => format!("cat {alpha0:?} {beta0:?} {p:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fock_dim: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub theta1: f64,
    pub theta2: f64,
    pub state: StateSpec,
    pub alpha: f64,
    pub beta: f64,
    pub resolution: usize,
    pub moment_norm: MomentNorm,
    pub tolerances: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            fock_dim: 48,
            x_min: -12.0,
            x_max: 12.0,
            n_points: 193,
            theta1: std::f64::consts::FRAC_PI_3,
            theta2: std::f64::consts::FRAC_PI_6,
            state: StateSpec::Vacuum,
            alpha: 0.3,
            beta: -0.2,
            resolution: 16,
            moment_norm: MomentNorm::Purity,
            tolerances: DEFAULT_TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            out: None,
        }
    }
}

/// Real number or a multiple of π: `2.5`, `pi`, `-pi/4`, `3*pi/4`.
pub fn parse_real(s: &str) -> CliResult<f64> {
    let bad = || CliError::Config(format!("cannot parse number '{s}'"));
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let coef = match num {
        "pi" => 1.0,
        _ => num.strip_suffix("*pi").ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    let v = coef * std::f64::consts::PI / den;
    Ok(if neg { -v } else { v })
}

fn parse_usize(s: &str) -> CliResult<usize> {
    s.trim().parse().map_err(|_| CliError::Config(format!("cannot parse integer '{s}'")))
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> CliResult<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "fock_dim" => self.fock_dim = parse_usize(value)?,
            "x_min" => self.x_min = parse_real(value)?,
            "x_max" => self.x_max = parse_real(value)?,
            "n_points" => self.n_points = parse_usize(value)?,
            "theta1" => self.theta1 = parse_real(value)?,
            "theta2" => self.theta2 = parse_real(value)?,
            "state" => self.state = StateSpec::parse(value)?,
            "alpha" => self.alpha = parse_real(value)?,
            "beta" => self.beta = parse_real(value)?,
            "resolution" => self.resolution = parse_usize(value)?,
            "moment_norm" => {
                self.moment_norm = match value {
                    "purity" => MomentNorm::Purity,
                    "probability" => MomentNorm::Probability,
                    _ => return Err(CliError::Config(format!("unknown moment_norm '{value}'"))),
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            _ => match key.strip_prefix("tol.") {
                Some(name) if self.tolerances.contains_key(name) => {
                    self.tolerances.insert(name.to_string(), parse_real(value)?);
                }
                _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
            },
        }
        Ok(())
    }

    /// Re-runs the engine's guards on every field that does not depend on
    /// the command.
    pub fn validate(&self) -> CliResult<()> {
        self.space()?;
        self.window()?;
        if self.resolution < 2 {
            return Err(CliError::Config("resolution must be at least 2".into()));
        }
        for v in [self.theta1, self.theta2, self.alpha, self.beta] {
            if !v.is_finite() {
                return Err(CliError::Config("non-finite parameter".into()));
            }
        }
        if let StateSpec::Cat { p, .. } = self.state {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Config(format!("cat weight p = {p} outside [0, 1]")));
            }
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(CliError::Config(format!("tolerance {k} = {v} must be finite and non-negative")));
        }
        Ok(())
    }

    pub fn space(&self) -> CliResult<FockSpace> {
        Ok(FockSpace::new(self.fock_dim)?)
    }

    pub fn window(&self) -> CliResult<SampledAxis<f64>> {
        Ok(SampledAxis::new(self.x_min, self.x_max, self.n_points)?)
    }

    pub fn angles(&self) -> CliResult<AnglePair<f64>> {
        Ok(AnglePair::new(self.theta1, self.theta2)?)
    }

    pub fn density(&self) -> CliResult<FockOperator<f64>> {
        let space = self.space()?;
        let rho = match self.state {
            StateSpec::Vacuum => FockOperator::projector(&FockState::number(space, 0)),
            StateSpec::Coherent { alpha, beta } => FockOperator::projector(&coherent_state(space, alpha, beta)?),
            StateSpec::Cat { alpha0, beta0, p } => cat_density(&CatState { alpha0, beta0, p }, space)?,
        };
        rho.check_tail()?;
        Ok(rho)
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// Every field except the output path, one `key=value` per line.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let norm = match self.moment_norm {
            MomentNorm::Purity => "purity",
            MomentNorm::Probability => "probability",
        };
        let _ = writeln!(s, "fock_dim={}", self.fock_dim);
        let _ = writeln!(s, "x_min={:?}\nx_max={:?}\nn_points={}", self.x_min, self.x_max, self.n_points);
        let _ = writeln!(s, "theta1={:?}\ntheta2={:?}", self.theta1, self.theta2);
        let _ = writeln!(s, "state={}", self.state.canonical());
        let _ = writeln!(s, "alpha={:?}\nbeta={:?}", self.alpha, self.beta);
        let _ = writeln!(s, "resolution={}\nmoment_norm={norm}", self.resolution);
        for (k, v) in &self.tolerances {
            let _ = writeln!(s, "tol.{k}={v:?}");
        }
        s
    }

    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn tolerance_summary(&self) -> String {
        self.tolerances.iter().map(|(k, v)| format!("{k}:{v:e}")).collect::<Vec<_>>().join(",")
    }
}
