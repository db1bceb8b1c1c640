//! Single-flip Metropolis simulated annealing on a QUBO.
//!
//! Each chain starts from a uniformly random bit vector and performs one
//! sweep per temperature step: every variable is proposed once, in a fresh
//! random order, and the flip is accepted with probability
//! `min(1, exp(-beta * dE))` (zero-cost moves are always accepted). The
//! inverse temperature follows a geometric ladder from `beta_initial` to
//! `beta_final`.
//!
//! The flip cost is recomputed from the dense coupling row on every
//! proposal, so one sweep costs `O(n^2)` regardless of the acceptance rate.
//!
//! A chain's sample is the lowest-energy feasible (one-hot) state it passed
//! through. Feasibility and energy are tracked incrementally, so this costs
//! nothing per rejected proposal. A chain that never reaches a feasible state
//! reports its final state, which then decodes as infeasible.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{SolveResult, Solution, SolverChoice};
use crate::stack::{DeviationMatrix, ShiftVector};
use crate::error::{Error, Result};
use crate::qubo::{decode_solution, BinaryAssignment, Decoded, QuboModel};
use crate::rng;

/// Geometric inverse-temperature ladder, one sweep per step.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    sweeps: usize,
    beta_initial: f64,
    beta_final: f64,
}

impl AnnealSchedule {
    pub fn geometric(sweeps: usize, beta_initial: f64, beta_final: f64) -> Result<Self> {
        if sweeps == 0 {
            return Err(Error::invalid("an anneal needs at least one sweep"));
        }
        if !(beta_initial.is_finite() && beta_final.is_finite()) {
            return Err(Error::invalid("inverse temperatures must be finite"));
        }
        if !(beta_initial > 0.0 && beta_initial <= beta_final) {
            return Err(Error::invalid(format!(
                "need 0 < beta_initial <= beta_final, got {beta_initial} and {beta_final}"
            )));
        }
        Ok(Self {
            sweeps,
            beta_initial,
            beta_final,
        })
    }

    /// Derives the ladder from the model's flip energies.
    ///
    /// The hot end accepts the largest possible uphill flip with probability
    /// 1/2, `beta = ln 2 / dE_max`, where `dE_max = max_i (|h_i| + sum_j |J_ij|)`.
    /// The cold end accepts the smallest nonzero coefficient as an uphill
    /// move with probability 1/100, `beta = ln 100 / dE_min`.
    pub fn auto(model: &QuboModel, sweeps: usize) -> Result<Self> {
        let n = model.n_vars();
        let mut row_sum: Vec<f64> = model.linear().iter().map(|h| h.abs()).collect();
        let mut min_nonzero = f64::INFINITY;
        for &h in model.linear() {
            if h != 0.0 {
                min_nonzero = min_nonzero.min(h.abs());
            }
        }
        for (&(i, j), &c) in model.quadratic() {
            row_sum[i] += c.abs();
            row_sum[j] += c.abs();
            if c != 0.0 {
                min_nonzero = min_nonzero.min(c.abs());
            }
        }
        let max_delta = row_sum.into_iter().fold(0.0f64, f64::max);
        if n == 0 || max_delta == 0.0 || !min_nonzero.is_finite() {
            return Self::geometric(sweeps, 1.0, 1.0);
        }
        let hot = std::f64::consts::LN_2 / max_delta;
        let cold = (100f64.ln() / min_nonzero).max(hot);
        Self::geometric(sweeps, hot, cold)
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn beta_initial(&self) -> f64 {
        self.beta_initial
    }

    pub fn beta_final(&self) -> f64 {
        self.beta_final
    }

    /// Inverse temperature of every sweep, ending at `beta_final`.
    pub fn betas(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_final];
        }
        let lo = self.beta_initial.ln();
        let step = (self.beta_final.ln() - lo) / (self.sweeps - 1) as f64;
        (0..self.sweeps)
            .map(|t| {
                if t + 1 == self.sweeps {
                    self.beta_final
                } else {
                    (lo + step * t as f64).exp()
                }
            })
            .collect()
    }
}

/// Dense symmetric view of a model used by the chains.
struct Couplings {
    n: usize,
    linear: Vec<f64>,
    /// Row-major `n x n`, zero diagonal.
    dense: Vec<f64>,
}

impl Couplings {
    fn new(model: &QuboModel) -> Self {
        let n = model.n_vars();
        let mut dense = vec![0.0; n * n];
        for (&(i, j), &c) in model.quadratic() {
            dense[i * n + j] = c;
            dense[j * n + i] = c;
        }
        Self {
            n,
            linear: model.linear().to_vec(),
            dense,
        }
    }

    /// Energy change of flipping variable `i`.
    #[inline]
    fn flip_cost(&self, x: &[f64], i: usize) -> f64 {
        let row = &self.dense[i * self.n..(i + 1) * self.n];
        let field = self.linear[i] + row.iter().zip(x).map(|(j, v)| j * v).sum::<f64>();
        if x[i] == 0.0 {
            field
        } else {
            -field
        }
    }
}

/// Runs one chain and returns its sample: the lowest-energy feasible state
/// visited, or the final state if the chain never touched a feasible one.
fn run_chain<R: Rng>(c: &Couplings, block_len: usize, betas: &[f64], rng: &mut R) -> Vec<bool> {
    let n = c.n;
    let mut x: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 }).collect();

    // one-hot bookkeeping: set bits per block and number of blocks not at exactly one
    let mut set = vec![0usize; n / block_len];
    for (i, &v) in x.iter().enumerate() {
        set[i / block_len] += v as usize;
    }
    let mut broken = set.iter().filter(|&&s| s != 1).count();

    // energy relative to the offset, tracked incrementally
    let mut energy = 0.0;
    for i in 0..n {
        if x[i] == 1.0 {
            energy += c.linear[i];
            let row = &c.dense[i * n + i + 1..(i + 1) * n];
            energy += row.iter().zip(&x[i + 1..]).map(|(j, v)| j * v).sum::<f64>();
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = (broken == 0).then(|| (energy, x.clone()));

    let mut order: Vec<usize> = (0..n).collect();
    for &beta in betas {
        order.shuffle(rng);
        for &i in &order {
            let de = c.flip_cost(&x, i);
            if de <= 0.0 || rng.gen::<f64>() < (-beta * de).exp() {
                let block = i / block_len;
                let before = set[block] == 1;
                if x[i] == 0.0 {
                    x[i] = 1.0;
                    set[block] += 1;
                } else {
                    x[i] = 0.0;
                    set[block] -= 1;
                }
                match (before, set[block] == 1) {
                    (true, false) => broken += 1,
                    (false, true) => broken -= 1,
                    _ => {}
                }
                energy += de;
                if broken == 0 && best.as_ref().is_none_or(|(e, _)| energy < *e) {
                    match best.as_mut() {
                        Some((e, b)) => {
                            *e = energy;
                            b.copy_from_slice(&x);
                        }
                        None => best = Some((energy, x.clone())),
                    }
                }
            }
        }
    }
    let sample = best.map_or(x, |(_, b)| b);
    sample.into_iter().map(|v| v == 1.0).collect()
}

/// Outcome of [`simulated_anneal`] before metrics are attached.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealRun {
    /// Best feasible sample, canonicalized, with its energy.
    pub best: Option<(ShiftVector, f64)>,
    /// Lowest energy over all samples, feasible or not.
    pub best_raw_energy: f64,
    pub samples_total: u64,
    pub samples_feasible: u64,
    pub wall_time: f64,
    pub rho: f64,
    pub seed: u64,
}

impl AnnealRun {
    /// Attaches sigma and range computed from `devs`.
    pub fn into_result(self, devs: &DeviationMatrix) -> Result<SolveResult> {
        let (solution, energy) = match self.best {
            Some((shifts, e)) => (Some(Solution::evaluate(devs, &shifts)?), e),
            None => (None, self.best_raw_energy),
        };
        Ok(SolveResult {
            solver: SolverChoice::Sa,
            solution,
            energy: Some(energy),
            wall_time: self.wall_time,
            samples_total: self.samples_total,
            samples_feasible: self.samples_feasible,
            nodes_explored: None,
            optimal: false,
            rho: Some(self.rho),
            seed: Some(self.seed),
        })
    }
}

/// Runs `samples` independent chains and keeps the best feasible sample.
///
/// Infeasible samples are counted but never repaired. If no chain produced a
/// feasible sample the run carries no solution, only the lowest raw energy.
pub fn simulated_anneal(
    model: &QuboModel,
    schedule: &AnnealSchedule,
    samples: usize,
    seed: u64,
) -> Result<AnnealRun> {
    if model.n_vars() == 0 {
        return Err(Error::invalid("cannot anneal a model without variables"));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }

    let start = Instant::now();
    let couplings = Couplings::new(model);
    let betas = schedule.betas();

    let mut best: Option<(ShiftVector, f64)> = None;
    let mut best_raw = f64::INFINITY;
    let mut feasible = 0u64;
    for chain in 0..samples {
        let mut rng = rng::anneal_rng(seed, chain as u64);
        let bits = BinaryAssignment(run_chain(&couplings, model.n_segments(), &betas, &mut rng));
        let energy = model.energy(bits.bits());
        best_raw = best_raw.min(energy);
        if let Decoded::Feasible(shifts) = decode_solution(&bits, model)? {
            feasible += 1;
            let shifts = shifts.canonicalize();
            let better = match &best {
                None => true,
                Some((s, e)) => energy < *e || (energy == *e && shifts < *s),
            };
            if better {
                best = Some((shifts, energy));
            }
        }
    }

    Ok(AnnealRun {
        best,
        best_raw_energy: best_raw,
        samples_total: samples as u64,
        samples_feasible: feasible,
        wall_time: start.elapsed().as_secs_f64(),
        rho: model.rho(),
        seed,
    })
}
