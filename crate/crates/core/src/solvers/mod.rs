//! Solver portfolio behind a single [`solve`] entry point.
//!
//! | name         | objective | method                                         |
//! |--------------|-----------|------------------------------------------------|
//! | `exhaustive` | either    | full enumeration of gauge-fixed configurations |
//! | `exact`      | range     | depth-first branch-and-bound                   |
//! | `approx`     | range     | block decomposition + super-disk recombination |
//! | `sa`         | sigma     | simulated annealing on the gauge-fixed QUBO    |

mod anneal;
mod block;
mod branch_bound;
mod exhaustive;

pub use anneal::{simulated_anneal, AnnealRun, AnnealSchedule};
pub use block::{block_approximate, block_sizes};
pub use branch_bound::{branch_and_bound, subtree_lower_bound, BranchBoundOptions};
pub use exhaustive::{exhaustive_search, DEFAULT_EXHAUSTIVE_CAP};

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{build_qubo, default_penalty};
use crate::stack::{DeviationMatrix, ShiftVector};

/// Quantity minimised by a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Standard deviation of the segment profile.
    Sigma,
    /// Max minus min of the segment profile.
    #[default]
    Range,
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(Objective::Sigma),
            "range" => Ok(Objective::Range),
            other => Err(Error::invalid(format!("unknown objective `{other}`"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Sigma => "sigma",
            Objective::Range => "range",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Exhaustive,
    Exact,
    Approx,
    Sa,
}

impl SolverChoice {
    pub const ALL: [SolverChoice; 4] = [
        SolverChoice::Exhaustive,
        SolverChoice::Exact,
        SolverChoice::Approx,
        SolverChoice::Sa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverChoice::Exhaustive => "exhaustive",
            SolverChoice::Exact => "exact",
            SolverChoice::Approx => "approx",
            SolverChoice::Sa => "sa",
        }
    }
}

impl FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverChoice::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown solver `{s}`")))
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A configuration together with its metrics, always in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub shifts: ShiftVector,
    pub sigma: f64,
    pub range: f64,
}

impl Solution {
    /// Canonicalizes `shifts` and recomputes both metrics from `devs`.
    pub fn evaluate(devs: &DeviationMatrix, shifts: &ShiftVector) -> Result<Self> {
        let shifts = shifts.canonicalize();
        let profile = devs.apply_shifts(&shifts)?;
        Ok(Self {
            sigma: profile.stddev(),
            range: profile.range(),
            shifts,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub solver: SolverChoice,
    /// `None` only when simulated annealing produced no feasible sample.
    pub solution: Option<Solution>,
    /// QUBO energy of the reported sample (best raw energy if none was feasible).
    pub energy: Option<f64>,
    pub wall_time: f64,
    pub samples_total: u64,
    pub samples_feasible: u64,
    pub nodes_explored: Option<u64>,
    /// Proven optimal for the solver's objective.
    pub optimal: bool,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
}

impl SolveResult {
    pub(crate) fn deterministic(
        solver: SolverChoice,
        solution: Solution,
        wall_time: Duration,
        nodes_explored: u64,
        optimal: bool,
    ) -> Self {
        Self {
            solver,
            solution: Some(solution),
            energy: None,
            wall_time: wall_time.as_secs_f64(),
            samples_total: 1,
            samples_feasible: 1,
            nodes_explored: Some(nodes_explored),
            optimal,
            rho: None,
            seed: None,
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.sigma)
    }

    pub fn range(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.range)
    }

    pub fn shifts(&self) -> Option<&ShiftVector> {
        self.solution.as_ref().map(|s| &s.shifts)
    }
}

/// Per-call knobs for [`solve`]. Unused fields are ignored by solvers that do not need them.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveParams {
    pub objective: Objective,
    /// Penalty strength; `None` uses [`default_penalty`].
    pub rho: Option<f64>,
    pub sweeps: usize,
    pub samples: usize,
    pub seed: u64,
    /// `(beta_initial, beta_final)`; `None` derives them from the model.
    pub beta_range: Option<(f64, f64)>,
    pub budget: Option<Duration>,
    pub exhaustive_cap: u64,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            objective: Objective::Range,
            rho: None,
            sweeps: 1500,
            samples: 35,
            seed: 0,
            beta_range: None,
            budget: None,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

/// Runs one solver. Wall time covers the search itself, not model construction or I/O.
pub fn solve(devs: &DeviationMatrix, choice: SolverChoice, params: &SolveParams) -> Result<SolveResult> {
    let bb = BranchBoundOptions {
        budget: params.budget,
    };
    match choice {
        SolverChoice::Exhaustive => exhaustive_search(devs, params.objective, params.exhaustive_cap),
        SolverChoice::Exact => branch_and_bound(devs, &bb),
        SolverChoice::Approx => block_approximate(devs, &bb),
        SolverChoice::Sa => {
            let rho = params.rho.unwrap_or_else(|| default_penalty(devs));
            let model = build_qubo(devs, rho, true)?;
            let schedule = match params.beta_range {
                Some((b0, b1)) => AnnealSchedule::geometric(params.sweeps, b0, b1)?,
                None => AnnealSchedule::auto(&model, params.sweeps)?,
            };
            simulated_anneal(&model, &schedule, params.samples, params.seed)?.into_result(devs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> DeviationMatrix {
        DeviationMatrix::from_rows(vec![vec![-1.5, 0.5], vec![-0.5, 1.5]]).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for c in SolverChoice::ALL {
            assert_eq!(c.name().parse::<SolverChoice>().unwrap(), c);
        }
        assert!("qpu".parse::<SolverChoice>().is_err());
        assert_eq!("sigma".parse::<Objective>().unwrap(), Objective::Sigma);
        assert!("l3".parse::<Objective>().is_err());
    }

    #[test]
    fn exact_on_example() {
        let r = solve(&example(), SolverChoice::Exact, &SolveParams::default()).unwrap();
        assert_eq!(r.range(), Some(0.0));
        assert!(r.optimal);
    }

    #[test]
    fn sa_records_rho_override() {
        let params = SolveParams {
            rho: Some(42.0),
            ..SolveParams::default()
        };
        let r = solve(&example(), SolverChoice::Sa, &params).unwrap();
        assert_eq!(r.rho, Some(42.0));
        assert_eq!(r.shifts().unwrap().as_slice(), &[0, 1]);
    }

    #[test]
    fn sa_rejects_bad_rho() {
        let params = SolveParams {
            rho: Some(-1.0),
            ..SolveParams::default()
        };
        assert!(solve(&example(), SolverChoice::Sa, &params).is_err());
    }

    #[test]
    fn approx_on_three_disks_matches_exact() {
        let devs = crate::stack::generate_instance(3, 6, 2.0, 0.1, 4).unwrap().deviations();
        let p = SolveParams::default();
        let a = solve(&devs, SolverChoice::Approx, &p).unwrap();
        let e = solve(&devs, SolverChoice::Exact, &p).unwrap();
        assert_eq!(a.solver, SolverChoice::Approx);
        assert_eq!(a.solution, e.solution);
    }
}
