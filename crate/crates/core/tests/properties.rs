//! Cross-module invariants on randomized inputs: transform round-trips,
//! convolution algebra, rational-approximation quality, denominator-class
//! partitions, complete-sum periodicity, and the dyadic chaining majorant.

use std::collections::HashSet;

use modmax_core::arithmetic::{
    best_rational_approx, denominator_class, denominator_class_set, farey_set,
};
use modmax_core::expsum::{complete_sum, CompleteSumSpec};
use modmax_core::lattice::{convolve, dft, idft, lp_norm, Domain, LatticeFunction};
use modmax_core::operator::rademacher_menshov_rhs;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_val() -> impl Strategy<Value = Complex64> {
    ((-5.0..5.0f64), (-5.0..5.0f64)).prop_map(|(re, im)| Complex64::new(re, im))
}

fn torus_sizes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=8, 1..=2)
}

fn torus_fn_with(sizes: Vec<usize>) -> impl Strategy<Value = LatticeFunction> {
    let total: usize = sizes.iter().product();
    prop::collection::vec(complex_val(), total).prop_map(move |vals| {
        LatticeFunction::new(
            Domain::Torus {
                sizes: sizes.clone(),
            },
            vals,
        )
        .unwrap()
    })
}

fn max_abs(f: &LatticeFunction) -> f64 {
    f.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn dft_idft_round_trips(f in torus_sizes().prop_flat_map(torus_fn_with)) {
        let back = idft(&dft(&f).unwrap()).unwrap();
        let scale = 1.0 + max_abs(&f);
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn dft_satisfies_parseval(f in torus_sizes().prop_flat_map(torus_fn_with)) {
        let hat = dft(&f).unwrap();
        let total: f64 = f.values().len() as f64;
        let lhs: f64 = hat.values().iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = total * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn convolution_commutes_and_distributes(
        (f, g, h) in torus_sizes().prop_flat_map(|s| {
            (torus_fn_with(s.clone()), torus_fn_with(s.clone()), torus_fn_with(s))
        })
    ) {
        let scale = 1e-10
            * (1.0 + max_abs(&f) * (max_abs(&g) + max_abs(&h)) * f.values().len() as f64);
        let fg = convolve(&f, &g).unwrap();
        let gf = convolve(&g, &f).unwrap();
        for (a, b) in fg.values().iter().zip(gf.values()) {
            prop_assert!((a - b).norm() <= scale);
        }
        let gh = LatticeFunction::new(
            g.domain().clone(),
            g.values().iter().zip(h.values()).map(|(a, b)| a + b).collect(),
        )
        .unwrap();
        let lhs = convolve(&f, &gh).unwrap();
        let fh = convolve(&f, &h).unwrap();
        for ((l, a), b) in lhs.values().iter().zip(fg.values()).zip(fh.values()) {
            prop_assert!((l - (a + b)).norm() <= scale);
        }
    }

    #[test]
    fn lp_norms_satisfy_triangle_inequality(
        (f, g) in torus_sizes().prop_flat_map(|s| {
            (torus_fn_with(s.clone()), torus_fn_with(s))
        }),
        p in 1.0..4.0f64,
    ) {
        let sum = LatticeFunction::new(
            f.domain().clone(),
            f.values().iter().zip(g.values()).map(|(a, b)| a + b).collect(),
        )
        .unwrap();
        let lhs = lp_norm(&sum, p).unwrap();
        let rhs = lp_norm(&f, p).unwrap() + lp_norm(&g, p).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn best_approximant_meets_dirichlet_quality(
        theta in -50.0..50.0f64,
        max_den in 1i64..1000,
    ) {
        let r = best_rational_approx(theta, max_den).unwrap();
        prop_assert!(r.den() >= 1 && r.den() <= max_den);
        let dist = (theta - r.value()).abs();
        prop_assert!(dist <= 1.0 / (max_den as f64 + 1.0) + 1e-12);
        if max_den <= 40 {
            // Exhaustive optimality over every admissible denominator.
            let brute = (1..=max_den)
                .map(|q| {
                    let p = (theta * q as f64).round();
                    (theta - p / q as f64).abs()
                })
                .fold(f64::INFINITY, f64::min);
            prop_assert!(dist <= brute + 1e-12);
        }
    }

    #[test]
    fn denominator_classes_partition_farey(s_max in 2u32..=8) {
        let order = (1i64 << s_max) - 1;
        let all = farey_set(order as f64).unwrap();
        let mut seen: HashSet<(i64, i64)> = HashSet::new();
        let mut count = 0usize;
        for s in 1..=s_max {
            for alpha in denominator_class_set(s).unwrap() {
                prop_assert_eq!(denominator_class(&alpha), s);
                prop_assert!(seen.insert((alpha.num(), alpha.den())), "duplicate member");
                count += 1;
            }
        }
        prop_assert_eq!(count, all.len());
        for alpha in &all {
            prop_assert!(seen.contains(&(alpha.num(), alpha.den())));
        }
    }

    #[test]
    fn complete_sum_is_exactly_periodic_in_a(
        a in -40i64..40,
        q in 1i64..=19,
        d in 1u32..=3,
    ) {
        // b = (1) keeps gcd(a, b, q) = 1 for every a, q.
        let s0 = complete_sum(&CompleteSumSpec::new(a, vec![1], q, d).unwrap());
        for shift in [1i64, -3, 7] {
            let s1 = complete_sum(&CompleteSumSpec::new(a + shift * q, vec![1], q, d).unwrap());
            prop_assert_eq!(s0, s1);
        }
        prop_assert!(s0.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn chaining_majorant_dominates_partial_maxima(
        (a, j0) in (1u32..=6).prop_flat_map(|s| {
            let len = (1usize << s) + 1;
            (prop::collection::vec(complex_val(), len), 0..len)
        }),
        r in prop::sample::select(vec![1.0f64, 2.0, 3.0]),
    ) {
        let rhs = rademacher_menshov_rhs(&a, r, 0, j0).unwrap();
        for x in &a {
            prop_assert!(rhs + 1e-9 >= x.norm(), "r = {}", r);
        }
    }
}
