mod common;

use clutch_opt::qubo::{build_qubo, decode_solution, default_penalty, encode_shifts, evaluate, BinaryAssignment, Decoded, QuboModel};
use clutch_opt::stack::{DeviationMatrix, ShiftVector};
use proptest::prelude::*;

use common::{all_shift_vectors, brute_force_min, direct_energy, instance, profile_sum_squares};

fn case() -> impl Strategy<Value = (usize, usize, u64, Vec<usize>, bool)> {
    (1usize..=5, 1usize..=7).prop_flat_map(|(nd, ns)| {
        (Just(nd), Just(ns), any::<u64>(), prop::collection::vec(0..ns, nd), any::<bool>())
    })
}

proptest! {
    #[test]
    fn feasible_energy_is_profile_sum_of_squares((nd, ns, seed, s, gauge) in case(), rho in 0.01f64..100.0) {
        let devs = instance(nd, ns, seed);
        let shifts = ShiftVector::new(s, ns).unwrap();
        let shifts = if gauge { shifts.canonicalize() } else { shifts };
        let model = build_qubo(&devs, rho, gauge).unwrap();
        let x = encode_shifts(&shifts, gauge).unwrap();
        let e = evaluate(&model, &x).unwrap();
        let direct = profile_sum_squares(&devs, shifts.as_slice());
        prop_assert!((e - direct).abs() <= 1e-12 * (1.0 + rho));
        match decode_solution(&x, &model).unwrap() {
            Decoded::Feasible(back) => prop_assert_eq!(back, shifts),
            Decoded::Infeasible(r) => prop_assert!(false, "encoded vector decoded infeasible: {:?}", r),
        }
    }

    #[test]
    fn energy_matches_direct_formula(
        (nd, ns, seed, _s, gauge) in case(),
        rho in 0.01f64..10.0,
        bits in prop::collection::vec(any::<bool>(), 35),
    ) {
        let devs = instance(nd, ns, seed);
        let model = build_qubo(&devs, rho, gauge).unwrap();
        let x = &bits[..model.n_vars()];
        let e = evaluate(&model, &BinaryAssignment(x.to_vec())).unwrap();
        let direct = direct_energy(&devs, rho, gauge, x);
        prop_assert!((e - direct).abs() <= 1e-12 * (1.0 + rho) * (1.0 + direct.abs()));
    }

    #[test]
    fn infeasible_assignments_pay_at_least_rho(
        (nd, ns, seed, _s, gauge) in case(),
        rho in 0.001f64..10.0,
        bits in prop::collection::vec(any::<bool>(), 35),
    ) {
        let devs = instance(nd, ns, seed);
        let model = build_qubo(&devs, rho, gauge).unwrap();
        let x = BinaryAssignment(bits[..model.n_vars()].to_vec());
        if let Decoded::Infeasible(report) = decode_solution(&x, &model).unwrap() {
            prop_assert!(!report.violations.is_empty());
            prop_assert!(evaluate(&model, &x).unwrap() >= rho * (1.0 - 1e-12));
        }
    }

    #[test]
    fn export_import_preserves_energies((nd, ns, seed, _s, gauge) in case(), bits in prop::collection::vec(any::<bool>(), 35)) {
        let devs = instance(nd, ns, seed);
        let model = build_qubo(&devs, default_penalty(&devs), gauge).unwrap();
        let back = QuboModel::read_from(model.to_text().as_bytes()).unwrap();
        prop_assert_eq!(&back, &model);
        let x = BinaryAssignment(bits[..model.n_vars()].to_vec());
        prop_assert_eq!(evaluate(&back, &x).unwrap(), evaluate(&model, &x).unwrap());
    }
}

#[test]
fn two_by_two_energy_table() {
    // B = [[-1.5, 0.5], [-0.5, 1.5]], disk 0 pinned, x = (x_10, x_11), rho = 10
    let devs = DeviationMatrix::from_rows(vec![vec![-1.5, 0.5], vec![-0.5, 1.5]]).unwrap();
    let model = build_qubo(&devs, 10.0, true).unwrap();
    let table = [
        ([false, false], 2.5 + 10.0),
        ([true, false], 8.0),
        ([false, true], 0.0),
        ([true, true], 2.5 + 10.0),
    ];
    for (bits, _) in &table {
        let e = evaluate(&model, &BinaryAssignment(bits.to_vec())).unwrap();
        assert!((e - direct_energy(&devs, 10.0, true, bits)).abs() < 1e-12, "{bits:?}");
    }
    for (bits, expected) in &table {
        assert_eq!(evaluate(&model, &BinaryAssignment(bits.to_vec())).unwrap(), *expected);
    }
}

#[test]
fn default_penalty_keeps_minimum_feasible() {
    for seed in 0..20 {
        let nd = 2 + (seed as usize % 3);
        let ns = 2 + (seed as usize % 4);
        let devs = instance(nd, ns, seed);
        for gauge in [true, false] {
            let model = build_qubo(&devs, default_penalty(&devs), gauge).unwrap();
            if model.n_vars() > 16 {
                continue;
            }
            let (min, x) = brute_force_min(&model);
            let Decoded::Feasible(s) = decode_solution(&x, &model).unwrap() else {
                panic!("seed {seed}: infeasible global minimum");
            };
            let best_feasible = all_shift_vectors(nd, ns, gauge)
                .iter()
                .map(|s| profile_sum_squares(&devs, s.as_slice()))
                .fold(f64::INFINITY, f64::min);
            assert!((min - best_feasible).abs() < 1e-12, "seed {seed}");
            assert!((profile_sum_squares(&devs, s.as_slice()) - best_feasible).abs() < 1e-12);
        }
    }
}

#[test]
fn gauge_fixed_and_free_minima_agree() {
    for seed in 0..15 {
        let devs = instance(2 + seed as usize % 3, 2 + seed as usize % 3, 100 + seed);
        let rho = default_penalty(&devs);
        let (free, _) = brute_force_min(&build_qubo(&devs, rho, false).unwrap());
        let (fixed, _) = brute_force_min(&build_qubo(&devs, rho, true).unwrap());
        assert!((free - fixed).abs() < 1e-12, "seed {seed}: {free} vs {fixed}");
    }
}
