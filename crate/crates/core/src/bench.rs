//! Benchmark grid runner.
//!
//! For every `(N_D, N_S)` in the grid and every instance index, an instance
//! is generated from `derive_seed(base_seed, [N_D, N_S, index])` and each
//! configured solver is run on it. Every `(instance, solver)` pair yields
//! exactly one [`BenchmarkRecord`], including skips and failures, so result
//! tables are complete and plot-ready.
//!
//! Configuration files are TOML:
//!
//! ```toml
//! base_seed = 7
//! instances_per_size = 3
//! grid = [[2, 6], [3, 6], [7, 42]]
//!
//! [[solvers]]
//! solver = "exhaustive"
//! objective = "range"
//! cap = 10000
//!
//! [[solvers]]
//! solver = "sa"
//! samples = 35
//! sweeps = 1500
//! ```

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::solvers::{solve, Objective, SolveParams, SolveResult, SolverChoice, DEFAULT_EXHAUSTIVE_CAP};
use crate::stack::generate_instance;

fn default_a0() -> f64 {
    2.0
}

fn default_delta() -> f64 {
    0.1
}

fn default_instances() -> usize {
    1
}

/// One solver entry of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub solver: SolverChoice,
    #[serde(default)]
    pub objective: Objective,
    pub rho: Option<f64>,
    pub sweeps: Option<usize>,
    pub samples: Option<usize>,
    /// Wall-clock budget in seconds for the tree searches.
    pub budget: Option<f64>,
    /// Largest gauge-fixed search space `N_S^(N_D-1)` this solver is run on.
    /// Defaults to the exhaustive cap for `exhaustive` and to no cap otherwise.
    pub cap: Option<u64>,
}

impl SolverSpec {
    pub fn new(solver: SolverChoice) -> Self {
        Self {
            solver,
            objective: Objective::default(),
            rho: None,
            sweeps: None,
            samples: None,
            budget: None,
            cap: None,
        }
    }

    fn effective_cap(&self) -> Option<u64> {
        match (self.cap, self.solver) {
            (Some(c), _) => Some(c),
            (None, SolverChoice::Exhaustive) => Some(DEFAULT_EXHAUSTIVE_CAP),
            (None, _) => None,
        }
    }

    fn params(&self, seed: u64) -> SolveParams {
        let base = SolveParams::default();
        SolveParams {
            objective: self.objective,
            rho: self.rho,
            sweeps: self.sweeps.unwrap_or(base.sweeps),
            samples: self.samples.unwrap_or(base.samples),
            seed,
            budget: self.budget.map(Duration::from_secs_f64),
            exhaustive_cap: self.cap.unwrap_or(base.exhaustive_cap),
            ..base
        }
    }

    /// Record label, e.g. `exhaustive-sigma` when the objective matters.
    fn label(&self) -> String {
        match self.solver {
            SolverChoice::Exhaustive => format!("exhaustive-{}", self.objective),
            other => other.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    /// `(N_D, N_S)` pairs.
    pub grid: Vec<(usize, usize)>,
    #[serde(default = "default_instances")]
    pub instances_per_size: usize,
    pub solvers: Vec<SolverSpec>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_a0")]
    pub target_thickness: f64,
    #[serde(default = "default_delta")]
    pub max_variation: f64,
    pub output: Option<PathBuf>,
}

impl BenchmarkConfig {
    /// Desk-scale grid: `N_S = 6` with `N_D = 2..=6`, plus `N_S = 42` with
    /// `N_D = 2..=7`. The exhaustive oracle is capped at `10^4` so it runs on
    /// the small rows only; SA uses 35 samples of 1500 sweeps.
    pub fn desk_scale() -> Self {
        let mut grid: Vec<(usize, usize)> = (2..=6).map(|nd| (nd, 6)).collect();
        grid.extend((2..=7).map(|nd| (nd, 42)));
        let mut exhaustive = SolverSpec::new(SolverChoice::Exhaustive);
        exhaustive.cap = Some(10_000);
        let mut sa = SolverSpec::new(SolverChoice::Sa);
        sa.samples = Some(35);
        sa.sweeps = Some(1500);
        Self {
            grid,
            instances_per_size: 2,
            solvers: vec![
                exhaustive,
                SolverSpec::new(SolverChoice::Exact),
                SolverSpec::new(SolverChoice::Approx),
                sa,
            ],
            base_seed: 2024,
            target_thickness: default_a0(),
            max_variation: default_delta(),
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("size grid is empty".into()));
        }
        if let Some(&(nd, ns)) = self.grid.iter().find(|(nd, ns)| *nd == 0 || *ns == 0) {
            return Err(Error::Config(format!("grid entry ({nd}, {ns}) has a zero dimension")));
        }
        if self.instances_per_size == 0 {
            return Err(Error::Config("instances_per_size must be at least 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("no solvers configured".into()));
        }
        if !(self.max_variation.is_finite() && self.max_variation >= 0.0) {
            return Err(Error::Config("max_variation must be finite and non-negative".into()));
        }
        for s in &self.solvers {
            if s.samples == Some(0) || s.sweeps == Some(0) {
                return Err(Error::Config(format!("solver {} needs samples and sweeps >= 1", s.solver)));
            }
            if s.budget.is_some_and(|b| !(b.is_finite() && b >= 0.0)) {
                return Err(Error::Config(format!("solver {} has an invalid budget", s.solver)));
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }
}

impl FromStr for BenchmarkConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Ok,
    /// The annealer returned no feasible sample.
    Infeasible,
    /// Instance beyond the solver's cap.
    Skipped,
    Error,
}

/// One row of benchmark output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub instance_id: String,
    pub n_disks: usize,
    pub n_segments: usize,
    /// `(N_D - 1) * N_S`, the gauge-fixed QUBO size.
    pub n_vars: usize,
    pub solver: String,
    pub status: RecordStatus,
    pub sigma: Option<f64>,
    pub range: Option<f64>,
    pub energy: Option<f64>,
    pub wall_time: f64,
    pub samples_total: u64,
    pub samples_feasible: u64,
    pub nodes_explored: Option<u64>,
    pub optimal: bool,
    pub rho: Option<f64>,
    pub instance_seed: u64,
    pub solver_seed: Option<u64>,
    /// Space-separated canonical shifts, empty when there is no solution.
    pub shifts: String,
    pub message: String,
}

impl BenchmarkRecord {
    fn blank(instance_id: &str, nd: usize, ns: usize, solver: String, seed: u64) -> Self {
        Self {
            instance_id: instance_id.to_string(),
            n_disks: nd,
            n_segments: ns,
            n_vars: (nd - 1) * ns,
            solver,
            status: RecordStatus::Skipped,
            sigma: None,
            range: None,
            energy: None,
            wall_time: 0.0,
            samples_total: 0,
            samples_feasible: 0,
            nodes_explored: None,
            optimal: false,
            rho: None,
            instance_seed: seed,
            solver_seed: None,
            shifts: String::new(),
            message: String::new(),
        }
    }

    fn fill(&mut self, r: &SolveResult) {
        self.status = if r.solution.is_some() {
            RecordStatus::Ok
        } else {
            RecordStatus::Infeasible
        };
        self.sigma = r.sigma();
        self.range = r.range();
        self.energy = r.energy;
        self.wall_time = r.wall_time;
        self.samples_total = r.samples_total;
        self.samples_feasible = r.samples_feasible;
        self.nodes_explored = r.nodes_explored;
        self.optimal = r.optimal;
        self.rho = r.rho;
        self.solver_seed = r.seed;
        self.shifts = r.shifts().map_or_else(String::new, |s| {
            s.as_slice().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        });
    }
}

/// Runs every configured solver on every generated instance.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<Vec<BenchmarkRecord>> {
    config.validate()?;
    let mut records = Vec::new();
    for &(nd, ns) in &config.grid {
        let space = (ns as u128).checked_pow((nd - 1) as u32).unwrap_or(u128::MAX);
        for index in 0..config.instances_per_size {
            let seed = derive_seed(config.base_seed, &[nd as u64, ns as u64, index as u64]);
            let instance_id = format!("nd{nd}-ns{ns}-{index}");
            let instance = generate_instance(nd, ns, config.target_thickness, config.max_variation, seed);
            for (slot, spec) in config.solvers.iter().enumerate() {
                let mut rec = BenchmarkRecord::blank(&instance_id, nd, ns, spec.label(), seed);
                let stack = match &instance {
                    Ok(s) => s,
                    Err(e) => {
                        rec.status = RecordStatus::Error;
                        rec.message = e.to_string();
                        records.push(rec);
                        continue;
                    }
                };
                if let Some(cap) = spec.effective_cap() {
                    if space > u128::from(cap) {
                        rec.message = format!("search space {space} exceeds cap {cap}");
                        records.push(rec);
                        continue;
                    }
                }
                let devs = stack.deviations();
                let params = spec.params(derive_seed(seed, &[slot as u64]));
                match solve(&devs, spec.solver, &params) {
                    Ok(r) => rec.fill(&r),
                    Err(e) => {
                        rec.status = RecordStatus::Error;
                        rec.message = e.to_string();
                    }
                }
                records.push(rec);
            }
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Writes one line per record (plus a header for CSV), columns in struct order.
pub fn emit_results<W: Write>(records: &[BenchmarkRecord], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r).map_err(csv_error)?;
            }
            w.flush()?;
        }
        OutputFormat::Jsonl => {
            let mut out = out;
            for r in records {
                serde_json::to_writer(&mut out, r).map_err(|e| Error::Io(e.into()))?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

pub fn parse_results<R: BufRead>(input: R, format: OutputFormat) -> Result<Vec<BenchmarkRecord>> {
    match format {
        OutputFormat::Csv => csv::Reader::from_reader(input)
            .deserialize()
            .map(|r| r.map_err(csv_error))
            .collect(),
        OutputFormat::Jsonl => input
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|(i, l)| {
                serde_json::from_str(&l?).map_err(|e| Error::parse(i + 1, e.to_string()))
            })
            .collect(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(line, format!("{other:?}")),
    }
}
