//! Block-decomposition heuristic for stacks too tall for the exact search.
//!
//! The disks are cut into `K` contiguous blocks, `K - 1` of them holding
//! `floor(N_D / K)` disks and the last one the remainder, with the smallest
//! `K >= 3` such that `floor(N_D / K) <= 8`. Each block is solved exactly on
//! its own rows, then collapsed into a rigid super-disk (its optimised
//! segment profile), and the `K` super-disks are rotated against each other
//! by a second exact search.

use std::time::Instant;

use super::branch_bound::{search, BranchBoundOptions};
use super::{branch_and_bound, SolveResult, SolverChoice, Solution};
use crate::error::Result;
use crate::stack::{add_rotated, DeviationMatrix, ShiftVector};

const MAX_BLOCK: usize = 8;
const MIN_BLOCKS: usize = 3;
/// Below this many disks the exact solver is used directly.
const MIN_DISKS: usize = 4;

/// Block sizes for `n_disks` disks.
pub fn block_sizes(n_disks: usize) -> Vec<usize> {
    let k = (MIN_BLOCKS..)
        .find(|&k| n_disks / k <= MAX_BLOCK)
        .expect("some K satisfies the block bound");
    let base = n_disks / k;
    let mut sizes = vec![base; k - 1];
    sizes.push(n_disks - base * (k - 1));
    sizes
}

pub fn block_approximate(devs: &DeviationMatrix, opts: &BranchBoundOptions) -> Result<SolveResult> {
    let nd = devs.n_disks();
    let ns = devs.n_segments();
    if nd < MIN_DISKS {
        let mut r = branch_and_bound(devs, opts)?;
        r.solver = SolverChoice::Approx;
        return Ok(r);
    }

    let start = Instant::now();
    let deadline = opts.budget.map(|b| start + b);
    let mut shifts = vec![0usize; nd];
    let mut super_rows = Vec::new();
    let mut blocks = Vec::new();
    let mut leaves = 0;

    let mut first = 0;
    for size in block_sizes(nd) {
        let disks: Vec<usize> = (first..first + size).collect();
        first += size;
        let sub = devs.select(&disks);
        let found = search(&sub, deadline);
        leaves += found.leaves;

        let mut profile = vec![0.0; ns];
        for (local, &k) in disks.iter().enumerate() {
            shifts[k] = found.shifts[local];
            add_rotated(&mut profile, sub.row(local), found.shifts[local]);
        }
        super_rows.push(profile);
        blocks.push(disks);
    }

    let supers = DeviationMatrix::from_rows_unchecked(super_rows)?;
    let outer = search(&supers, deadline);
    leaves += outer.leaves;
    for (disks, &g) in blocks.iter().zip(&outer.shifts) {
        for &k in disks {
            shifts[k] = (shifts[k] + g) % ns;
        }
    }

    let elapsed = start.elapsed();
    let shifts = ShiftVector::new(shifts, ns)?;
    Ok(SolveResult::deterministic(
        SolverChoice::Approx,
        Solution::evaluate(devs, &shifts)?,
        elapsed,
        leaves,
        false,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stack::generate_instance;

    #[test]
    fn split_rule() {
        assert_eq!(block_sizes(24), vec![8, 8, 8]);
        assert_eq!(block_sizes(9), vec![3, 3, 3]);
        assert_eq!(block_sizes(10), vec![3, 3, 4]);
        assert_eq!(block_sizes(4), vec![1, 1, 2]);
        assert_eq!(block_sizes(7), vec![2, 2, 3]);
        // floor(27 / 3) = 9 > 8, so K = 4
        assert_eq!(block_sizes(27), vec![6, 6, 6, 9]);
        for nd in 3..200 {
            let s = block_sizes(nd);
            assert!(s.len() >= 3);
            assert!(s[0] <= 8);
            assert_eq!(s.iter().sum::<usize>(), nd);
        }
    }

    #[test]
    fn all_zero_is_optimal_value() {
        let devs = DeviationMatrix::from_rows(vec![vec![0.0; 6]; 9]).unwrap();
        let r = block_approximate(&devs, &BranchBoundOptions::default()).unwrap();
        assert_eq!(r.range(), Some(0.0));
        assert_eq!(r.sigma(), Some(0.0));
    }

    #[test]
    fn result_is_canonical_and_consistent() {
        let devs = generate_instance(9, 6, 2.0, 0.1, 3).unwrap().deviations();
        let r = block_approximate(&devs, &BranchBoundOptions::default()).unwrap();
        let sol = r.solution.unwrap();
        assert!(sol.shifts.is_canonical());
        let p = devs.apply_shifts(&sol.shifts).unwrap();
        assert_eq!(p.range(), sol.range);
        assert!(!r.optimal);
    }
}
