use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::Failure;
use crate::dynamics::DEFAULT_DT;
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Run the invariant suite and write a JSON report.
    Verify,
    /// Redhead functional over a range of analyser half-angles.
    BellScan,
    /// Integrate a seeded ensemble and report drift and equivariance.
    Trajectories,
    /// Sample the Weyl curvature on a two-dimensional slice.
    CurvatureMap,
    /// Coincidence fluxes for one pair of analyser angles.
    Coincidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Singlet,
    Product,
    /// Constant density; only meaningful for curvature maps.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Slice {
    /// `beta_A` against `alpha_B - alpha_A` at fixed `beta_B`.
    BetaAlpha,
    /// `beta_A` against `beta_B` at fixed `alpha_B - alpha_A`.
    BetaBeta,
}

fn parse_grid(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("grid must be NB,NA,NG, got '{s}'"));
    }
    let mut g = [0; 3];
    for (slot, p) in g.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("bad grid size '{p}'"))?;
    }
    Ok(g)
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("range must be A:B, got '{s}'"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
    Ok((a, b))
}

#[derive(Debug, Clone, Parser)]
#[command(name = "weyltop", version, about = "Weyl geometrodynamics of spinning tops")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,

    /// Flat key=value file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Angular quadrature grid NB,NA,NG.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<[usize; 3]>,
    #[arg(long, global = true)]
    pub ensemble: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Scan range A:B in degrees of the analyser half-angle difference.
    #[arg(long, global = true, value_parser = parse_range)]
    pub range: Option<(f64, f64)>,
    /// Scan step in degrees.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub state: Option<StateKind>,
    /// Final time for trajectories.
    #[arg(long, global = true)]
    pub t1: Option<f64>,
    /// Keep every n-th integration step in trajectory dumps.
    #[arg(long, global = true)]
    pub record_every: Option<usize>,
    /// Number of ensemble members written as CSV.
    #[arg(long, global = true)]
    pub dump: Option<usize>,
    /// Alice's analyser angle in degrees.
    #[arg(long, global = true)]
    pub theta_a: Option<f64>,
    /// Bob's analyser angle in degrees.
    #[arg(long, global = true)]
    pub theta_b: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub slice: Option<Slice>,
    /// Fixed coordinate of the slice in degrees.
    #[arg(long, global = true)]
    pub fixed: Option<f64>,
    /// Points per slice axis.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Run on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Multiplies every verification tolerance.
    #[arg(long, global = true, hide = true)]
    pub tolerance_scale: Option<f64>,
}

/// `key = value` lines; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

const KEYS: &[&str] = &[
    "grid", "ensemble", "seed", "dt", "range", "step", "out", "format", "state", "t1", "record-every", "dump",
    "theta-a", "theta-b", "slice", "fixed", "resolution", "sequential", "tolerance-scale",
];

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("config line {}: expected key=value", n + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Failure::usage(format!("config line {}: unknown key '{}'", n + 1, k.trim())));
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn get<T, E: std::fmt::Display>(&self, key: &str, parse: impl Fn(&str) -> Result<T, E>) -> Result<Option<T>, Failure> {
        self.entries
            .get(key)
            .map(|v| parse(v).map_err(|e| Failure::usage(format!("config key '{key}': {e}"))))
            .transpose()
    }

    fn value<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key, T::from_str)
    }

    fn choice<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, Failure> {
        self.get(key, |s| T::from_str(s, true))
    }
}

/// Fully resolved parameters of one invocation; echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub grid: [usize; 3],
    pub ensemble: usize,
    pub seed: u64,
    pub dt: f64,
    pub range: (f64, f64),
    pub step: f64,
    pub out: PathBuf,
    pub format: Format,
    pub state: StateKind,
    pub t1: f64,
    pub record_every: usize,
    pub dump: usize,
    pub theta_a: f64,
    pub theta_b: f64,
    pub slice: Slice,
    pub fixed: f64,
    pub resolution: usize,
    pub sequential: bool,
    pub tolerance_scale: f64,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            grid: [4, 4, 4],
            ensemble: 100,
            seed: 42,
            dt: DEFAULT_DT,
            range: (0.0, 90.0),
            step: 1.0,
            out: PathBuf::from("out"),
            format: Format::Csv,
            state: StateKind::Singlet,
            t1: 5.0,
            record_every: 100,
            dump: 10,
            theta_a: 0.0,
            theta_b: 60.0,
            slice: Slice::BetaAlpha,
            fixed: 60.0,
            resolution: 41,
            sequential: false,
            tolerance_scale: 1.0,
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(args: &Args) -> Result<Self, Failure> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let d = Self::defaults(args.command);
        let c = Self {
            command: args.command,
            grid: pick(args.grid, file.get("grid", parse_grid)?, d.grid),
            ensemble: pick(args.ensemble, file.value("ensemble")?, d.ensemble),
            seed: pick(args.seed, file.value("seed")?, d.seed),
            dt: pick(args.dt, file.value("dt")?, d.dt),
            range: pick(args.range, file.get("range", parse_range)?, d.range),
            step: pick(args.step, file.value("step")?, d.step),
            out: pick(args.out.clone(), file.value("out")?, d.out),
            format: pick(args.format, file.choice("format")?, d.format),
            state: pick(args.state, file.choice("state")?, d.state),
            t1: pick(args.t1, file.value("t1")?, d.t1),
            record_every: pick(args.record_every, file.value("record-every")?, d.record_every),
            dump: pick(args.dump, file.value("dump")?, d.dump),
            theta_a: pick(args.theta_a, file.value("theta-a")?, d.theta_a),
            theta_b: pick(args.theta_b, file.value("theta-b")?, d.theta_b),
            slice: pick(args.slice, file.choice("slice")?, d.slice),
            fixed: pick(args.fixed, file.value("fixed")?, d.fixed),
            resolution: pick(args.resolution, file.value("resolution")?, d.resolution),
            sequential: args.sequential || file.value("sequential")?.unwrap_or(false),
            tolerance_scale: pick(args.tolerance_scale, file.value("tolerance-scale")?, d.tolerance_scale),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Failure::usage(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("dt", self.dt)?;
        positive("step", self.step)?;
        if !(self.t1 >= 0.0 && self.t1.is_finite()) {
            return Err(Failure::usage(format!("t1 must be non-negative, got {}", self.t1)));
        }
        if !(self.tolerance_scale >= 0.0 && self.tolerance_scale.is_finite()) {
            return Err(Failure::usage("tolerance scale must be non-negative"));
        }
        let (a, b) = self.range;
        if !(0.0..=90.0).contains(&a) || !(0.0..=90.0).contains(&b) || a > b {
            return Err(Failure::usage(format!("range must satisfy 0 <= A <= B <= 90, got {a}:{b}")));
        }
        if self.ensemble == 0 || self.record_every == 0 || self.resolution < 2 {
            return Err(Failure::usage("ensemble, record-every must be positive and resolution at least 2"));
        }
        if self.grid.contains(&0) {
            return Err(Failure::usage("grid sizes must be positive"));
        }
        for (name, v) in [("theta-a", self.theta_a), ("theta-b", self.theta_b), ("fixed", self.fixed)] {
            if !v.is_finite() {
                return Err(Failure::usage(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    /// Half-angle differences of a Bell scan, in degrees.
    pub fn scan_degrees(&self) -> Vec<f64> {
        let (a, b) = self.range;
        let n = ((b - a) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| a + k as f64 * self.step).collect()
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let args = Args::try_parse_from(["weyltop", "bell-scan", "--step", "0.5"]).unwrap();
        let file = FileConfig::parse("step = 2\nseed = 9 # comment\n").unwrap();
        let d = RunConfig::defaults(args.command);
        assert_eq!(pick(args.step, file.value("step").unwrap(), d.step), 0.5);
        assert_eq!(pick(args.seed, file.value("seed").unwrap(), d.seed), 9);
    }

    #[test]
    fn parses_grid_and_range() {
        assert_eq!(parse_grid("8, 4,4").unwrap(), [8, 4, 4]);
        assert!(parse_grid("8,4").is_err());
        assert_eq!(parse_range("0:45").unwrap(), (0.0, 45.0));
        assert!(parse_range("45").is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        assert!(FileConfig::parse("colour = red").is_err());
        let args = Args::try_parse_from(["weyltop", "bell-scan", "--range", "10:120"]).unwrap();
        assert!(RunConfig::resolve(&args).is_err());
    }

    #[test]
    fn scan_grid() {
        let mut c = RunConfig::defaults(Command::BellScan);
        c.range = (0.0, 45.0);
        assert_eq!(c.scan_degrees().len(), 46);
        c.step = 0.1;
        c.range = (0.0, 90.0);
        assert_eq!(c.scan_degrees().len(), 901);
    }
}
