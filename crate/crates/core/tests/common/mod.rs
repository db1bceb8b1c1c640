//! Brute-force oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use clutch_opt::qubo::{evaluate, BinaryAssignment, QuboModel};
use clutch_opt::stack::{generate_instance, DeviationMatrix, ShiftVector};

pub fn instance(nd: usize, ns: usize, seed: u64) -> DeviationMatrix {
    generate_instance(nd, ns, 2.0, 0.1, seed).unwrap().deviations()
}

/// Every shift vector, optionally with disk 0 pinned at 0, in lexicographic order.
pub fn all_shift_vectors(nd: usize, ns: usize, gauge_fixed: bool) -> Vec<ShiftVector> {
    let free = if gauge_fixed { nd - 1 } else { nd };
    let total = ns.pow(free as u32);
    (0..total)
        .map(|mut code| {
            let mut s = vec![0; nd];
            for k in (nd - free..nd).rev() {
                s[k] = code % ns;
                code /= ns;
            }
            ShiftVector::new(s, ns).unwrap()
        })
        .collect()
}

pub fn bits_of(mask: u64, n: usize) -> BinaryAssignment {
    BinaryAssignment((0..n).map(|i| mask >> i & 1 == 1).collect())
}

/// Global minimum over all `2^n` assignments, with the first minimiser.
pub fn brute_force_min(model: &QuboModel) -> (f64, BinaryAssignment) {
    let n = model.n_vars();
    assert!(n <= 20, "brute force over {n} variables");
    let mut best = (f64::INFINITY, 0u64);
    for mask in 0..1u64 << n {
        let e = evaluate(model, &bits_of(mask, n)).unwrap();
        if e < best.0 {
            best = (e, mask);
        }
    }
    (best.0, bits_of(best.1, n))
}

/// Direct sum of squares of the segment profile, written out from the definition.
pub fn profile_sum_squares(devs: &DeviationMatrix, shifts: &[usize]) -> f64 {
    let ns = devs.n_segments();
    (0..ns)
        .map(|i| {
            let h: f64 = (0..devs.n_disks())
                .map(|k| devs.get(k, (i + shifts[k]) % ns))
                .sum();
            h * h
        })
        .sum()
}

pub fn rel_close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(floor)
}

/// QUBO energy written out from the one-hot definition: squared profile of
/// the selected shifts plus `rho * (sum_j x_kj - 1)^2` per encoded disk.
pub fn direct_energy(devs: &DeviationMatrix, rho: f64, gauge_fixed: bool, bits: &[bool]) -> f64 {
    let nd = devs.n_disks();
    let ns = devs.n_segments();
    let first = usize::from(gauge_fixed);
    let x = |k: usize, j: usize| if bits[(k - first) * ns + j] { 1.0 } else { 0.0 };
    let mut e = 0.0;
    for i in 0..ns {
        let mut h = if gauge_fixed { devs.get(0, i) } else { 0.0 };
        for k in first..nd {
            for j in 0..ns {
                h += x(k, j) * devs.get(k, (i + j) % ns);
            }
        }
        e += h * h;
    }
    for k in first..nd {
        let c: f64 = (0..ns).map(|j| x(k, j)).sum();
        e += rho * (c - 1.0) * (c - 1.0);
    }
    e
}
