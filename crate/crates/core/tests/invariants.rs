use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinlift::catalog::{catalog_spec, Group, Params};
use spinlift::clifford::{geometric_product, Multivector, SignAssignment};
use spinlift::criterion::{check_criterion_with, fixed_space_with, Tolerances};
use spinlift::lift::{double_cover_pi, lift_connected, lift_element};
use spinlift::linalg::{cmax, random_antisymmetric, random_special_orthogonal, RMatrix};
use spinlift::spin_rep::{build_gammas, exp_spin, rep_multivector, rho_so};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

fn rotation(n: usize, seed: u64) -> RMatrix {
    random_special_orthogonal(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn clifford_product_is_associative(
        (n, coeffs) in (1usize..7).prop_flat_map(|n| (Just(n), prop::collection::vec(-1.0f64..1.0, 3 << n)))
    ) {
        let dim = 1usize << n;
        let mv = |k: usize| {
            Multivector::from_terms(
                n,
                (0..dim).map(|m| (m as u32, Complex64::new(coeffs[k * dim + m], 0.0))),
            )
            .unwrap()
        };
        let (a, b, c) = (mv(0), mv(1), mv(2));
        let left = geometric_product(&geometric_product(&a, &b).unwrap(), &c).unwrap();
        let right = geometric_product(&a, &geometric_product(&b, &c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-9);
    }

    #[test]
    fn vectors_square_to_minus_their_norm(v in (1usize..10).prop_flat_map(vector)) {
        let x = Multivector::vector(&v).unwrap();
        let sq = geometric_product(&x, &x).unwrap();
        let norm2: f64 = v.iter().map(|c| c * c).sum();
        let want = Multivector::scalar(v.len(), -norm2).unwrap();
        prop_assert!(sq.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn both_preimages_cover_the_rotation(n in 2usize..9, seed in any::<u64>()) {
        let r = rotation(n, seed);
        let (x, y) = lift_element(&r).unwrap();
        prop_assert_eq!(&y, &x.neg());
        for z in [&x, &y] {
            prop_assert!((double_cover_pi(z).unwrap() - &r).amax() < 1e-9);
        }
    }

    #[test]
    fn lifts_multiply_up_to_sign(n in 2usize..8, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (r1, r2) = (rotation(n, s1), rotation(n, s2));
        let (x1, _) = lift_element(&r1).unwrap();
        let (x2, _) = lift_element(&r2).unwrap();
        let (x12, _) = lift_element(&(&r1 * &r2)).unwrap();
        let prod = geometric_product(&x1, &x2).unwrap();
        let d = prod.max_abs_diff(&x12).unwrap().min(prod.max_abs_diff(&x12.neg()).unwrap());
        prop_assert!(d < 1e-9, "distance {}", d);
    }

    #[test]
    fn spin_rep_intertwines_vectors(n in 2usize..10, seed in any::<u64>(), v in vector(10)) {
        let g = build_gammas(n).unwrap();
        let r = rotation(n, seed);
        let (x, _) = lift_element(&r).unwrap();
        let u = rep_multivector(&g, &x).unwrap();
        let v = &v[..n];
        let rv: Vec<f64> = (&r * DVector::from_column_slice(v)).iter().copied().collect();
        let lhs = &u.entries * g.vector_rep(v).unwrap().entries * u.entries.adjoint();
        let rhs = g.vector_rep(&rv).unwrap().entries;
        prop_assert!(cmax(&(lhs - rhs)) < 1e-9);
    }

    #[test]
    fn exponentiated_rho_covers_expm(n in 2usize..9, seed in any::<u64>()) {
        let g = build_gammas(n).unwrap();
        let a = random_antisymmetric(n, 1.0, &mut ChaCha8Rng::seed_from_u64(seed));
        let u = exp_spin(&rho_so(&g, &a).unwrap());
        let (x, _) = lift_element(&spinlift::linalg::expm(&a)).unwrap();
        let w = rep_multivector(&g, &x).unwrap();
        let d = cmax(&(&u.entries - &w.entries)).min(cmax(&(&u.entries + &w.entries)));
        prop_assert!(d < 1e-8, "distance {}", d);
    }

    #[test]
    fn sign_assignments_are_complete(k in 0usize..7) {
        let all = SignAssignment::all(k);
        prop_assert_eq!(all.len(), 1 << k);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        prop_assert_eq!(distinct.len(), all.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fixed_spinors_are_fixed_and_orthonormal(m in 1usize..4, d in prop::sample::select(vec![3usize, 5, 7])) {
        let spec = catalog_spec(Group::SpxZd, &Params::md(m, d)).unwrap();
        let g = build_gammas(spec.n).unwrap();
        let report = check_criterion_with(&spec, &g, &Tolerances::default()).unwrap();
        let lift = lift_connected(&g, &spec.connected_part).unwrap();
        for outcome in report.per_lift.iter().filter(|o| o.assignment.valid) {
            let fixed = outcome.fixed.as_ref().unwrap();
            let us: Vec<_> = outcome
                .assignment
                .lifted_gens
                .iter()
                .map(|x| rep_multivector(&g, x).unwrap())
                .collect();
            for (i, v) in fixed.basis.iter().enumerate() {
                for u in &us {
                    prop_assert!((&u.entries * v - v).norm() < 1e-8);
                }
                for a in lift.matrices().unwrap() {
                    prop_assert!((&a.entries * v).norm() < 1e-8);
                }
                for (j, w) in fixed.basis.iter().enumerate() {
                    let ip = v.dotc(w);
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn counts_survive_a_change_of_frame(seed in any::<u64>(), pick in 0usize..5) {
        let (group, p) = [
            (Group::SU, Params::m(3)),
            (Group::Sp, Params::m(2)),
            (Group::G2, Params::default()),
            (Group::SUxZ2, Params::m(4)),
            (Group::SpxZd, Params::md(2, 3)),
        ][pick];
        let spec = catalog_spec(group, &p).unwrap();
        let moved = spec.conjugated(&rotation(spec.n, seed));
        let g = build_gammas(spec.n).unwrap();
        let tol = Tolerances::default();
        let mut a = check_criterion_with(&spec, &g, &tol).unwrap().valid_counts();
        let mut b = check_criterion_with(&moved, &g, &tol).unwrap().valid_counts();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fixed_space_of_nothing_is_everything(n in 1usize..9) {
        let g = build_gammas(n).unwrap();
        let r = fixed_space_with(&g, &[], &[], &Tolerances::default()).unwrap();
        prop_assert_eq!(r.dim, g.dim_sigma());
    }

    #[test]
    fn nonpositive_tolerances_are_rejected(v in -1.0f64..=0.0, which in 0usize..3) {
        let mut t = Tolerances::default();
        match which {
            0 => t.rank = v,
            1 => t.gap = v,
            _ => t.residual = v,
        }
        prop_assert!(t.validate().is_err());
    }
}
