//! Depth-first branch-and-bound on the range.
//!
//! Disks are fixed one at a time in descending order of their own range;
//! the first of them is the gauge anchor and stays at shift 0. At a node with
//! partial profile `p` and free disks `F` the bound is
//!
//! ```text
//! max(0, range(p) - sum_{k in F} range(B_k))
//! ```
//!
//! which is admissible because `range(f + g) >= range(f) - range(g)` and the
//! range of a sum is at most the sum of the ranges. Children are visited in
//! ascending bound order and a child is cut as soon as its bound reaches the
//! incumbent.

use std::time::{Duration, Instant};

use super::{SolveResult, SolverChoice, Solution};
use crate::error::Result;
use crate::stack::{add_rotated, range_of, DeviationMatrix, ShiftVector};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BranchBoundOptions {
    /// Wall-clock limit. On expiry the incumbent is returned with `optimal = false`.
    pub budget: Option<Duration>,
}

/// Outcome of a raw search, in original disk order and not yet canonicalized.
#[derive(Debug, Clone)]
pub(crate) struct Search {
    pub shifts: Vec<usize>,
    pub leaves: u64,
    pub complete: bool,
}

/// Exact range minimisation.
pub fn branch_and_bound(devs: &DeviationMatrix, opts: &BranchBoundOptions) -> Result<SolveResult> {
    let start = Instant::now();
    let search = search(devs, opts.budget.map(|b| start + b));
    let elapsed = start.elapsed();
    let shifts = ShiftVector::new(search.shifts, devs.n_segments())?;
    Ok(SolveResult::deterministic(
        SolverChoice::Exact,
        Solution::evaluate(devs, &shifts)?,
        elapsed,
        search.leaves,
        search.complete,
    ))
}

/// The bound used at a search node where the disks in `fixed` carry the given
/// shifts and every other disk is free.
pub fn subtree_lower_bound(devs: &DeviationMatrix, fixed: &[(usize, usize)]) -> f64 {
    let mut partial = vec![0.0; devs.n_segments()];
    let mut is_fixed = vec![false; devs.n_disks()];
    for &(k, s) in fixed {
        add_rotated(&mut partial, devs.row(k), s);
        is_fixed[k] = true;
    }
    let free: f64 = (0..devs.n_disks())
        .filter(|&k| !is_fixed[k])
        .map(|k| range_of(devs.row(k)))
        .sum();
    node_bound(range_of(&partial), free)
}

#[inline]
fn node_bound(partial_range: f64, free_range_sum: f64) -> f64 {
    (partial_range - free_range_sum).max(0.0)
}

/// Range of `p + rotate(row, shift)` without materialising it.
#[inline]
fn rotated_range(p: &[f64], row: &[f64], shift: usize) -> f64 {
    let n = row.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (a, b) in p[..n - shift].iter().zip(&row[shift..]) {
        let v = a + b;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for (a, b) in p[n - shift..].iter().zip(&row[..shift]) {
        let v = a + b;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

pub(crate) fn search(devs: &DeviationMatrix, deadline: Option<Instant>) -> Search {
    let nd = devs.n_disks();
    let ns = devs.n_segments();

    let mut order: Vec<usize> = (0..nd).collect();
    let ranges: Vec<f64> = devs.rows().map(range_of).collect();
    order.sort_by(|&a, &b| ranges[b].total_cmp(&ranges[a]).then(a.cmp(&b)));

    // suffix[d] = sum of ranges of order[d..]
    let mut suffix = vec![0.0; nd + 1];
    for d in (0..nd).rev() {
        suffix[d] = suffix[d + 1] + ranges[order[d]];
    }

    let identity = range_of(&devs.apply_shifts(&ShiftVector::identity(nd, ns)).unwrap().0);

    let mut dfs = Dfs {
        rows: order.iter().map(|&k| devs.row(k)).collect(),
        suffix,
        profiles: vec![vec![0.0; ns]; nd],
        children: vec![Vec::with_capacity(ns); nd],
        current: vec![0; nd],
        best: vec![0; nd],
        best_range: identity,
        leaves: 0,
        deadline,
        ticks: 0,
        timed_out: false,
    };
    dfs.profiles[0].copy_from_slice(dfs.rows[0]);

    if nd == 1 {
        dfs.leaves = 1;
    } else {
        dfs.expand(1);
    }

    let mut shifts = vec![0; nd];
    if dfs.best_range < identity {
        for (d, &k) in order.iter().enumerate() {
            shifts[k] = dfs.best[d];
        }
    }
    Search {
        shifts,
        leaves: dfs.leaves,
        complete: !dfs.timed_out,
    }
}

struct Dfs<'a> {
    rows: Vec<&'a [f64]>,
    suffix: Vec<f64>,
    profiles: Vec<Vec<f64>>,
    children: Vec<Vec<(f64, usize)>>,
    current: Vec<usize>,
    best: Vec<usize>,
    best_range: f64,
    leaves: u64,
    deadline: Option<Instant>,
    ticks: u32,
    timed_out: bool,
}

impl Dfs<'_> {
    fn stop(&self) -> bool {
        self.timed_out || self.best_range <= 0.0
    }

    fn check_clock(&mut self) {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(256) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
    }

    /// Places disk `order[depth]`; `profiles[depth - 1]` holds the disks before it.
    fn expand(&mut self, depth: usize) {
        let nd = self.rows.len();
        let row = self.rows[depth];
        let ns = row.len();

        if depth + 1 == nd {
            self.check_clock();
            let parent = &self.profiles[depth - 1];
            self.leaves += ns as u64;
            let mut best_j = None;
            for j in 0..ns {
                let r = rotated_range(parent, row, j);
                if r < self.best_range {
                    self.best_range = r;
                    best_j = Some(j);
                }
            }
            if let Some(j) = best_j {
                self.current[depth] = j;
                self.best.copy_from_slice(&self.current);
            }
            return;
        }

        let rest = self.suffix[depth + 1];
        let mut children = std::mem::take(&mut self.children[depth]);
        children.clear();
        {
            let parent = &self.profiles[depth - 1];
            for j in 0..ns {
                let bound = node_bound(rotated_range(parent, row, j), rest);
                if bound < self.best_range {
                    children.push((bound, j));
                }
            }
        }
        children.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for &(bound, j) in &children {
            if bound >= self.best_range || self.stop() {
                break;
            }
            self.current[depth] = j;
            let (done, todo) = self.profiles.split_at_mut(depth);
            todo[0].copy_from_slice(&done[depth - 1]);
            add_rotated(&mut todo[0], row, j);
            self.expand(depth + 1);
        }
        self.children[depth] = children;
    }
}
