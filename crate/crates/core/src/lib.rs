//! Multi-disk clutch stacking optimization.
//!
//! A clutch stack is `N_D` disks of `N_S` friction elements each. Every disk
//! can be rotated by a discrete shift number, and the goal is to pick the
//! shifts so that the summed segment heights are as flat as possible, measured
//! either by standard deviation or by range.
//!
//! The crate is organised in four layers:
//!
//! - [`stack`]: instances, rotations, metrics and the random instance generator.
//! - [`qubo`]: the one-hot QUBO formulation, energy evaluation and a sparse text export.
//! - [`solvers`]: exhaustive oracle, branch-and-bound on range, block decomposition
//!   and simulated annealing behind a common [`solvers::solve`] entry point.
//! - [`bench`]: benchmark grid runner and CSV / JSONL result emission.

pub mod bench;
pub mod error;
pub mod qubo;
pub mod rng;
pub mod solvers;
pub mod stack;

pub use error::{Error, Result};
