//! Disk stacks, rotations and flatness metrics.
//!
//! A stack of `N_D` disks with `N_S` elements each is described by its raw
//! element heights. All solvers work on the [`DeviationMatrix`], the heights
//! with the population mean removed. Rotating disk `k` by shift `s_k` moves
//! its elements left, so segment `i` receives element `(i + s_k) mod N_S`.

pub(crate) mod format;
mod generate;

pub use generate::generate_instance;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Raw element heights of a disk stack plus the parameters they were drawn with.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskStack {
    n_disks: usize,
    n_segments: usize,
    heights: Vec<f64>,
    target_thickness: f64,
    max_variation: f64,
    seed: Option<u64>,
}

impl DiskStack {
    /// Builds a stack from one row of heights per disk.
    pub fn new(
        rows: Vec<Vec<f64>>,
        target_thickness: f64,
        max_variation: f64,
        seed: Option<u64>,
    ) -> Result<Self> {
        let (n_disks, n_segments, heights) = flatten_rows(rows)?;
        if !target_thickness.is_finite() {
            return Err(Error::invalid("target thickness must be finite"));
        }
        if !(max_variation.is_finite() && max_variation >= 0.0) {
            return Err(Error::invalid("max variation must be finite and non-negative"));
        }
        Ok(Self {
            n_disks,
            n_segments,
            heights,
            target_thickness,
            max_variation,
            seed,
        })
    }

    pub fn n_disks(&self) -> usize {
        self.n_disks
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn target_thickness(&self) -> f64 {
        self.target_thickness
    }

    pub fn max_variation(&self) -> f64 {
        self.max_variation
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn row(&self, disk: usize) -> &[f64] {
        &self.heights[disk * self.n_segments..(disk + 1) * self.n_segments]
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Mean-centered heights `A[k][i] - mean(A)`, with the mean taken over all elements.
    pub fn deviations(&self) -> DeviationMatrix {
        let mean = self.heights.iter().sum::<f64>() / self.heights.len() as f64;
        DeviationMatrix {
            n_disks: self.n_disks,
            n_segments: self.n_segments,
            devs: self.heights.iter().map(|a| a - mean).collect(),
        }
    }
}

fn flatten_rows(rows: Vec<Vec<f64>>) -> Result<(usize, usize, Vec<f64>)> {
    let n_disks = rows.len();
    if n_disks == 0 {
        return Err(Error::invalid("a stack needs at least one disk"));
    }
    let n_segments = rows[0].len();
    if n_segments == 0 {
        return Err(Error::invalid("a disk needs at least one segment"));
    }
    let mut flat = Vec::with_capacity(n_disks * n_segments);
    for (k, row) in rows.into_iter().enumerate() {
        if row.len() != n_segments {
            return Err(Error::invalid(format!(
                "disk {k} has {} segments, expected {n_segments}",
                row.len()
            )));
        }
        if let Some(i) = row.iter().position(|h| !h.is_finite()) {
            return Err(Error::invalid(format!("height ({k}, {i}) is not finite")));
        }
        flat.extend(row);
    }
    Ok((n_disks, n_segments, flat))
}

/// Mean-centered element heights. The only input the solvers need.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationMatrix {
    n_disks: usize,
    n_segments: usize,
    devs: Vec<f64>,
}

impl DeviationMatrix {
    /// Wraps already-centered rows. Rejects input whose entries do not sum to zero
    /// within `1e-9 * N_D * N_S * max|dev|`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::from_rows_unchecked(rows)?;
        let sum: f64 = m.devs.iter().sum();
        if sum.abs() > m.zero_tolerance() {
            return Err(Error::invalid(format!(
                "deviations must sum to zero, got {sum}"
            )));
        }
        Ok(m)
    }

    /// Like [`from_rows`](Self::from_rows) but without the zero-sum check. Used
    /// for disk subsets and super-profiles inside the solvers, whose rows are
    /// not centered on their own.
    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Result<Self> {
        let (n_disks, n_segments, devs) = flatten_rows(rows)?;
        Ok(Self {
            n_disks,
            n_segments,
            devs,
        })
    }

    pub fn n_disks(&self) -> usize {
        self.n_disks
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    #[inline]
    pub fn row(&self, disk: usize) -> &[f64] {
        &self.devs[disk * self.n_segments..(disk + 1) * self.n_segments]
    }

    #[inline]
    pub fn get(&self, disk: usize, segment: usize) -> f64 {
        self.devs[disk * self.n_segments + segment]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.devs.chunks_exact(self.n_segments)
    }

    pub fn max_abs(&self) -> f64 {
        self.devs.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Absolute tolerance for "sums to zero" checks on this matrix.
    pub fn zero_tolerance(&self) -> f64 {
        1e-9 * (self.n_disks * self.n_segments) as f64 * self.max_abs()
    }

    /// A new matrix holding the selected disks in the given order.
    pub(crate) fn select(&self, disks: &[usize]) -> Self {
        let mut devs = Vec::with_capacity(disks.len() * self.n_segments);
        for &k in disks {
            devs.extend_from_slice(self.row(k));
        }
        Self {
            n_disks: disks.len(),
            n_segments: self.n_segments,
            devs,
        }
    }

    /// Segment profile `dh[i] = sum_k devs[k][(i + s[k]) mod N_S]`.
    pub fn apply_shifts(&self, shifts: &ShiftVector) -> Result<SegmentProfile> {
        if shifts.len() != self.n_disks || shifts.n_segments() != self.n_segments {
            return Err(Error::invalid(format!(
                "shift vector is {}x{}, matrix is {}x{}",
                shifts.len(),
                shifts.n_segments(),
                self.n_disks,
                self.n_segments
            )));
        }
        let mut dh = vec![0.0; self.n_segments];
        for (row, &s) in self.rows().zip(shifts.as_slice()) {
            add_rotated(&mut dh, row, s);
        }
        Ok(SegmentProfile(dh))
    }
}

/// `acc[i] += row[(i + shift) mod len]`.
#[inline]
pub(crate) fn add_rotated(acc: &mut [f64], row: &[f64], shift: usize) {
    let n = row.len();
    let (head, tail) = acc.split_at_mut(n - shift);
    for (a, b) in head.iter_mut().zip(&row[shift..]) {
        *a += b;
    }
    for (a, b) in tail.iter_mut().zip(&row[..shift]) {
        *a += b;
    }
}

/// One shift number per disk, each in `0..N_S`.
///
/// Orders lexicographically by shifts, which is the tie-break rule for
/// equally good configurations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftVector {
    shifts: Vec<usize>,
    n_segments: usize,
}

/// Serialized as the bare list of shifts.
impl Serialize for ShiftVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.shifts.serialize(serializer)
    }
}

impl ShiftVector {
    pub fn new(shifts: Vec<usize>, n_segments: usize) -> Result<Self> {
        if n_segments == 0 {
            return Err(Error::invalid("shift vector needs at least one segment"));
        }
        if let Some((k, s)) = shifts.iter().enumerate().find(|(_, &s)| s >= n_segments) {
            return Err(Error::invalid(format!(
                "shift {s} of disk {k} out of range 0..{n_segments}"
            )));
        }
        Ok(Self { shifts, n_segments })
    }

    /// All disks at shift 0.
    pub fn identity(n_disks: usize, n_segments: usize) -> Self {
        Self {
            shifts: vec![0; n_disks],
            n_segments,
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    /// Rotates every disk so that disk 0 sits at shift 0. Metrics are unchanged.
    pub fn canonicalize(&self) -> Self {
        let n = self.n_segments;
        let base = self.shifts.first().copied().unwrap_or(0);
        Self {
            shifts: self.shifts.iter().map(|&s| (s + n - base) % n).collect(),
            n_segments: n,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.shifts.first().is_none_or(|&s| s == 0)
    }

    /// Adds the same offset to every shift.
    pub fn rotate_all(&self, offset: usize) -> Self {
        let n = self.n_segments;
        Self {
            shifts: self.shifts.iter().map(|&s| (s + offset) % n).collect(),
            n_segments: n,
        }
    }
}

/// Which `L_n` norm to take of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    /// `(sum |x|^n)^(1/n)` for `n >= 1`.
    L(u32),
    Infinity,
}

/// Per-segment height deviation `dh` of an assembled stack.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentProfile(pub Vec<f64>);

impl SegmentProfile {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sqrt(mean(dh^2))`. The profile mean is zero, so it is not subtracted.
    pub fn stddev(&self) -> f64 {
        (self.sum_squares() / self.0.len() as f64).sqrt()
    }

    /// `max(dh) - min(dh)`.
    pub fn range(&self) -> f64 {
        range_of(&self.0)
    }

    pub fn sum_squares(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn ln_norm(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Infinity => self.0.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::L(1) => self.0.iter().map(|x| x.abs()).sum(),
            Norm::L(2) => self.sum_squares().sqrt(),
            Norm::L(n) => {
                assert!(n >= 1, "L_n norm needs n >= 1");
                let p = f64::from(n);
                self.0.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }
}

#[inline]
pub(crate) fn range_of(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    hi - lo
}
