use std::time::Instant;

use super::{Objective, SolveResult, SolverChoice, Solution};
use crate::error::{Error, Result};
use crate::stack::{add_rotated, range_of, DeviationMatrix, ShiftVector};

/// Largest gauge-fixed search space `N_S^(N_D-1)` enumerated by default.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 10_000_000;

/// Enumerates every configuration with disk 0 at shift 0.
///
/// Configurations are visited in lexicographic order and only a strictly
/// better value replaces the incumbent, so ties resolve to the
/// lexicographically smallest shift vector.
pub fn exhaustive_search(devs: &DeviationMatrix, objective: Objective, cap: u64) -> Result<SolveResult> {
    let nd = devs.n_disks();
    let ns = devs.n_segments();
    let size = (ns as u128)
        .checked_pow((nd - 1) as u32)
        .unwrap_or(u128::MAX);
    if size > u128::from(cap) {
        return Err(Error::ProblemTooLarge { size, cap });
    }

    let start = Instant::now();
    let score = |p: &[f64]| match objective {
        Objective::Range => range_of(p),
        Objective::Sigma => p.iter().map(|x| x * x).sum(),
    };

    // prefix[d] holds the profile of disks 0..=d
    let mut prefix = vec![vec![0.0; ns]; nd];
    prefix[0].copy_from_slice(devs.row(0));
    let mut current = vec![0usize; nd];
    let mut best = vec![0usize; nd];
    let mut best_score = f64::INFINITY;
    let mut leaves = 0u64;

    if nd == 1 {
        leaves = 1;
    } else {
        // iterative odometer over disks 1..nd
        let mut depth = 1;
        let mut next = vec![0usize; nd];
        loop {
            if next[depth] == ns {
                next[depth] = 0;
                depth -= 1;
                if depth == 0 {
                    break;
                }
                continue;
            }
            let s = next[depth];
            next[depth] += 1;
            current[depth] = s;
            let (done, rest) = prefix.split_at_mut(depth);
            rest[0].copy_from_slice(&done[depth - 1]);
            add_rotated(&mut rest[0], devs.row(depth), s);
            if depth + 1 < nd {
                depth += 1;
            } else {
                leaves += 1;
                let v = score(&rest[0]);
                if v < best_score {
                    best_score = v;
                    best.copy_from_slice(&current);
                }
            }
        }
    }

    let elapsed = start.elapsed();
    let shifts = ShiftVector::new(best, ns)?;
    Ok(SolveResult::deterministic(
        SolverChoice::Exhaustive,
        Solution::evaluate(devs, &shifts)?,
        elapsed,
        leaves,
        true,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_example() {
        let devs = DeviationMatrix::from_rows(vec![vec![-1.5, 0.5], vec![-0.5, 1.5]]).unwrap();
        for obj in [Objective::Range, Objective::Sigma] {
            let r = exhaustive_search(&devs, obj, DEFAULT_EXHAUSTIVE_CAP).unwrap();
            let sol = r.solution.unwrap();
            assert_eq!(sol.shifts.as_slice(), &[0, 1]);
            assert_eq!(sol.range, 0.0);
            assert_eq!(sol.sigma, 0.0);
            assert_eq!(r.nodes_explored, Some(2));
        }
    }

    #[test]
    fn all_zero_ties_break_to_identity() {
        let devs = DeviationMatrix::from_rows(vec![vec![0.0; 4]; 3]).unwrap();
        let r = exhaustive_search(&devs, Objective::Range, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(r.shifts().unwrap(), &ShiftVector::identity(3, 4));
        assert_eq!(r.range(), Some(0.0));
        assert_eq!(r.sigma(), Some(0.0));
        assert_eq!(r.nodes_explored, Some(16));
    }

    #[test]
    fn single_disk_has_no_freedom() {
        let devs = DeviationMatrix::from_rows(vec![vec![-1.0, 0.0, 1.0]]).unwrap();
        let r = exhaustive_search(&devs, Objective::Sigma, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(r.shifts().unwrap().as_slice(), &[0]);
        assert_eq!(r.range(), Some(2.0));
        assert_eq!(r.nodes_explored, Some(1));
    }

    #[test]
    fn cap_is_enforced() {
        let devs = DeviationMatrix::from_rows(vec![vec![0.0; 10]; 5]).unwrap();
        match exhaustive_search(&devs, Objective::Range, 9_999) {
            Err(Error::ProblemTooLarge { size, cap }) => assert_eq!((size, cap), (10_000, 9_999)),
            other => panic!("expected ProblemTooLarge, got {other:?}"),
        }
        assert!(exhaustive_search(&devs, Objective::Range, 10_000).is_ok());
    }
}
