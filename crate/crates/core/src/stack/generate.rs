use rand::distributions::{Distribution, Uniform};

use super::DiskStack;
use crate::error::{Error, Result};
use crate::rng;

/// Draws every element height i.i.d. uniform on `[a0 - delta/2, a0 + delta/2]`.
///
/// The same seed always yields the same matrix, bit for bit.
pub fn generate_instance(
    n_disks: usize,
    n_segments: usize,
    target_thickness: f64,
    max_variation: f64,
    seed: u64,
) -> Result<DiskStack> {
    if n_disks == 0 || n_segments == 0 {
        return Err(Error::invalid(format!(
            "instance dimensions must be positive, got {n_disks}x{n_segments}"
        )));
    }
    if !(max_variation.is_finite() && max_variation >= 0.0) {
        return Err(Error::invalid("max variation must be finite and non-negative"));
    }
    if !target_thickness.is_finite() {
        return Err(Error::invalid("target thickness must be finite"));
    }

    let rows = if max_variation == 0.0 {
        vec![vec![target_thickness; n_segments]; n_disks]
    } else {
        let half = max_variation / 2.0;
        let dist = Uniform::new_inclusive(target_thickness - half, target_thickness + half);
        let mut rng = rng::instance_rng(seed);
        (0..n_disks)
            .map(|_| dist.sample_iter(&mut rng).take(n_segments).collect())
            .collect()
    };
    DiskStack::new(rows, target_thickness, max_variation, Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variation_is_constant() {
        let s = generate_instance(3, 4, 2.0, 0.0, 11).unwrap();
        assert!(s.heights().iter().all(|&h| h == 2.0));
    }

    #[test]
    fn same_seed_same_matrix() {
        let a = generate_instance(7, 42, 2.0, 0.1, 99).unwrap();
        let b = generate_instance(7, 42, 2.0, 0.1, 99).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(7, 42, 2.0, 0.1, 100).unwrap();
        assert_ne!(a.heights(), c.heights());
    }

    #[test]
    fn full_size_dimensions() {
        let s = generate_instance(7, 42, 2.0, 0.1, 1).unwrap();
        assert_eq!((s.n_disks(), s.n_segments()), (7, 42));
        assert_eq!(s.seed(), Some(1));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(generate_instance(0, 4, 2.0, 0.1, 0).is_err());
        assert!(generate_instance(2, 0, 2.0, 0.1, 0).is_err());
        assert!(generate_instance(2, 2, 2.0, -0.1, 0).is_err());
    }

    #[test]
    fn heights_stay_in_interval_and_center_on_target() {
        let (a0, delta) = (2.0, 0.1);
        let s = generate_instance(100, 1000, a0, delta, 5).unwrap();
        let h = s.heights();
        let n = h.len() as f64;
        assert!(h.iter().all(|&x| (a0 - delta / 2.0..=a0 + delta / 2.0).contains(&x)));
        let mean = h.iter().sum::<f64>() / n;
        // standard error of a uniform of width delta
        let se = delta / 12f64.sqrt() / n.sqrt();
        assert!((mean - a0).abs() < 3.0 * se, "mean {mean} too far from {a0}");
    }
}
