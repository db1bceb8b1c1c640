//! One-hot QUBO formulation of the stacking problem.
//!
//! Each encoded disk `k` owns a block of `N_S` binary variables, one per
//! shift, with variable `v = (k - k0) * N_S + j` standing for "disk `k` sits at
//! shift `j`". `k0` is 1 when disk 0 is gauge-fixed at shift 0 and 0 otherwise.
//!
//! The energy is `||dh||_2^2` plus `rho * (sum_j x[k][j] - 1)^2` per encoded
//! disk, expanded into an explicit offset, a dense linear vector (with
//! `x^2 = x` already folded in) and a strictly upper-triangular sparse
//! quadratic map. On a feasible assignment the penalty part vanishes, so the
//! energy equals the squared L2 norm of the segment profile.

mod text;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::stack::{DeviationMatrix, ShiftVector};

/// Relative magnitude below which quadratic coefficients are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n_disks: usize,
    n_segments: usize,
    gauge_fixed: bool,
    rho: f64,
    offset: f64,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
}

/// A value for every model variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryAssignment(pub Vec<bool>);

impl BinaryAssignment {
    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One-hot violations found while decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibleReport {
    /// `(disk, number of set bits)` for every disk whose block is not one-hot.
    pub violations: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Feasible(ShiftVector),
    Infeasible(InfeasibleReport),
}

impl Decoded {
    pub fn feasible(self) -> Option<ShiftVector> {
        match self {
            Decoded::Feasible(s) => Some(s),
            Decoded::Infeasible(_) => None,
        }
    }
}

/// Builds the QUBO for `devs` with penalty strength `rho`.
///
/// With `gauge_fixed`, disk 0 is frozen at shift 0: its rows contribute
/// `sum_i B[0][i]^2` to the offset and a cross term to the linear
/// coefficients, and only disks `1..N_D` get variables.
pub fn build_qubo(devs: &DeviationMatrix, rho: f64, gauge_fixed: bool) -> Result<QuboModel> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::invalid(format!("penalty strength must be positive, got {rho}")));
    }
    let nd = devs.n_disks();
    let ns = devs.n_segments();
    let first = usize::from(gauge_fixed);
    let encoded = nd - first;
    let n_vars = encoded * ns;

    // corr[a][b][d] = sum_m B[a][m] * B[b][(m + d) mod ns]
    let corr = |a: usize, b: usize| -> Vec<f64> {
        let (ra, rb) = (devs.row(a), devs.row(b));
        (0..ns)
            .map(|d| (0..ns).map(|m| ra[m] * rb[(m + d) % ns]).sum())
            .collect()
    };

    let mut offset = rho * encoded as f64;
    let mut linear = vec![0.0; n_vars];
    let mut dense_upper: Vec<((usize, usize), f64)> = Vec::with_capacity(n_vars * n_vars / 2);

    if gauge_fixed {
        offset += devs.row(0).iter().map(|b| b * b).sum::<f64>();
    }

    for ka in first..nd {
        let base_a = (ka - first) * ns;
        let self_corr = corr(ka, ka);
        let anchor_corr = gauge_fixed.then(|| corr(0, ka));
        for j in 0..ns {
            let cross = anchor_corr.as_ref().map_or(0.0, |c| 2.0 * c[j]);
            linear[base_a + j] = self_corr[0] + cross - rho;
        }
        for ja in 0..ns {
            for jb in ja + 1..ns {
                // symmetric pair folded once, plus the within-disk penalty pair
                let w = self_corr[(jb + ns - ja) % ns];
                dense_upper.push(((base_a + ja, base_a + jb), 2.0 * w + 2.0 * rho));
            }
        }
        for kb in ka + 1..nd {
            let base_b = (kb - first) * ns;
            let c = corr(ka, kb);
            for ja in 0..ns {
                for jb in 0..ns {
                    let w = c[(jb + ns - ja) % ns];
                    dense_upper.push(((base_a + ja, base_b + jb), 2.0 * w));
                }
            }
        }
    }

    let max_coeff = linear
        .iter()
        .chain(dense_upper.iter().map(|(_, c)| c))
        .fold(0.0f64, |m, c| m.max(c.abs()));
    let threshold = PRUNE_RELATIVE * max_coeff;
    let quadratic = dense_upper
        .into_iter()
        .filter(|(_, c)| *c != 0.0 && c.abs() >= threshold)
        .collect();

    Ok(QuboModel {
        n_disks: nd,
        n_segments: ns,
        gauge_fixed,
        rho,
        offset,
        linear,
        quadratic,
    })
}

/// Penalty strength `N_S * (sum_k max_i |B[k][i]|)^2 + 1`.
///
/// The first term bounds `||dh||_2^2` for every configuration, so any
/// infeasible assignment (energy at least `rho`) lies above every feasible one.
pub fn default_penalty(devs: &DeviationMatrix) -> f64 {
    let spread: f64 = devs
        .rows()
        .map(|r| r.iter().fold(0.0f64, |m, b| m.max(b.abs())))
        .sum();
    devs.n_segments() as f64 * spread * spread + 1.0
}

/// One-hot encodes `shifts`. Gauge-fixed encoding requires `shifts[0] == 0`.
pub fn encode_shifts(shifts: &ShiftVector, gauge_fixed: bool) -> Result<BinaryAssignment> {
    if gauge_fixed && !shifts.is_canonical() {
        return Err(Error::invalid(
            "gauge-fixed encoding needs shift 0 on disk 0; canonicalize first",
        ));
    }
    let ns = shifts.n_segments();
    let skip = usize::from(gauge_fixed);
    let mut bits = vec![false; (shifts.len().saturating_sub(skip)) * ns];
    for (block, &s) in shifts.as_slice().iter().skip(skip).enumerate() {
        bits[block * ns + s] = true;
    }
    Ok(BinaryAssignment(bits))
}

/// Inverts the one-hot encoding. Infeasible assignments are reported, not repaired.
pub fn decode_solution(x: &BinaryAssignment, model: &QuboModel) -> Result<Decoded> {
    model.check_len(x)?;
    let ns = model.n_segments;
    let first = model.first_encoded_disk();
    let mut shifts = Vec::with_capacity(model.n_disks);
    if model.gauge_fixed {
        shifts.push(0);
    }
    let mut violations = Vec::new();
    for (block, bits) in x.0.chunks_exact(ns).enumerate() {
        let set = bits.iter().filter(|&&b| b).count();
        if set == 1 {
            shifts.push(bits.iter().position(|&b| b).unwrap());
        } else {
            violations.push((block + first, set));
        }
    }
    if violations.is_empty() {
        Ok(Decoded::Feasible(ShiftVector::new(shifts, ns)?))
    } else {
        Ok(Decoded::Infeasible(InfeasibleReport { violations }))
    }
}

/// `offset + sum_i linear[i] x[i] + sum_{i<j} quadratic[i][j] x[i] x[j]`.
pub fn evaluate(model: &QuboModel, x: &BinaryAssignment) -> Result<f64> {
    model.check_len(x)?;
    Ok(model.energy(&x.0))
}

impl QuboModel {
    pub fn n_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn n_disks(&self) -> usize {
        self.n_disks
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn gauge_fixed(&self) -> bool {
        self.gauge_fixed
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    #[cfg(test)]
    pub(crate) fn linear_mut(&mut self) -> &mut [f64] {
        &mut self.linear
    }

    pub fn first_encoded_disk(&self) -> usize {
        usize::from(self.gauge_fixed)
    }

    /// `(disk, shift)` represented by variable `var`.
    pub fn slot(&self, var: usize) -> (usize, usize) {
        (
            var / self.n_segments + self.first_encoded_disk(),
            var % self.n_segments,
        )
    }

    /// Variable standing for `disk` at `shift`, if that disk is encoded.
    pub fn variable(&self, disk: usize, shift: usize) -> Option<usize> {
        let first = self.first_encoded_disk();
        (disk >= first && disk < self.n_disks && shift < self.n_segments)
            .then(|| (disk - first) * self.n_segments + shift)
    }

    /// Energy of a bit vector whose length is already known to match.
    pub(crate) fn energy(&self, bits: &[bool]) -> f64 {
        let lin: f64 = self
            .linear
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(c, _)| c)
            .sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|((i, j), _)| bits[*i] && bits[*j])
            .map(|(_, c)| c)
            .sum();
        self.offset + lin + quad
    }

    fn check_len(&self, x: &BinaryAssignment) -> Result<()> {
        if x.len() != self.n_vars() {
            return Err(Error::invalid(format!(
                "assignment has {} bits, model has {} variables",
                x.len(),
                self.n_vars()
            )));
        }
        Ok(())
    }
}
