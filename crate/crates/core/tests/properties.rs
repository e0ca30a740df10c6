mod common;

use adelic_core::sections::{lambda_asy_exact, volume_exact};
use adelic_core::*;
use common::*;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small() -> Opts {
    Opts {
        max_clusters: 3,
        max_breaks: 3,
        ..Opts::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mu_shifts_by_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_adelic(&mut r, &Opts::default());
        let s = random_function(&mut r, false);
        let b = a.add_principal(&s).unwrap();
        for x in pool() {
            let ord = s.ord(&x).unwrap();
            let want = match mu_x(&a, &x).unwrap() {
                Extended::Finite(m) => Extended::Finite(m + ord),
                other => other,
            };
            prop_assert_eq!(mu_x(&b, &x).unwrap(), want);
        }
    }

    #[test]
    fn mu_tot_is_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_adelic(&mut r, &Opts::default());
        let s = random_function(&mut r, false);
        prop_assert_eq!(mu_tot(&a), mu_tot(&a.add_principal(&s).unwrap()));
    }

    #[test]
    fn dirichlet_is_invariant_and_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let opts = Opts { v0_range: (0, 2), tail_chance: 0.3, ..Opts::default() };
        let a = random_adelic(&mut r, &opts);
        let d = decide_dirichlet(&a).unwrap();
        if let Some(w) = d.witness() {
            prop_assert!(verify_witness(&a, w).unwrap());
        }
        if a.green().tails().is_empty() {
            let s = random_function(&mut r, false);
            let d2 = decide_dirichlet(&a.add_principal(&s).unwrap()).unwrap();
            prop_assert_eq!(d.is_yes(), d2.is_yes());
        }
    }

    #[test]
    fn positive_shift_gives_dirichlet(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_adelic(&mut r, &small());
        if !a.degree().is_negative() && a.v0() >= &Rational::zero() {
            // eps >= -mu_tot makes the total nonnegative
            let d = epsilon_dirichlet(&a, &qi(100)).unwrap();
            prop_assert!(d.is_yes());
        }
    }

    #[test]
    fn filtration_is_monotone_and_bounded(seed in any::<u64>(), n in 1u64..4) {
        let mut r = rng(seed);
        let a = random_adelic(&mut r, &small());
        let table = filtration(&a, n);
        prop_assert!(table.jumps.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
        if let Some((_, r0)) = table.jumps.first() {
            prop_assert_eq!(*r0, table.dimension);
        }
        prop_assert!(lambda_max_n(&a, n) <= Extended::Finite(a.essential_minimum() * qi(n as i64)));
        prop_assert!(!deg_plus(&a, n).is_negative());
    }

    #[test]
    fn lambda_max_is_superadditive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_adelic(&mut r, &small());
        let l: Vec<Extended> = (1..=4).map(|n| lambda_max_n(&a, n)).collect();
        for (i, j) in [(1usize, 1usize), (1, 2), (2, 2), (1, 3)] {
            if let (Extended::Finite(x), Extended::Finite(y)) = (&l[i - 1], &l[j - 1]) {
                prop_assert!(l[i + j - 1] >= Extended::Finite(x + y));
            }
        }
    }

    #[test]
    fn asymptotic_invariants_are_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_adelic(&mut r, &small());
        let s = random_function(&mut r, false);
        let b = a.add_principal(&s).unwrap();
        prop_assert_eq!(lambda_asy_exact(&a), lambda_asy_exact(&b));
        prop_assert_eq!(volume_exact(&a), volume_exact(&b));
    }

    #[test]
    fn volume_is_bounded(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_adelic(&mut r, &small());
        let v = volume_exact(&a);
        prop_assert!(!v.is_negative());
        if let Extended::Finite(l) = lambda_asy_exact(&a) {
            let deg = a.degree().max(Rational::zero());
            prop_assert!(v <= qi(2) * l.max(Rational::zero()) * deg);
        }
    }

    #[test]
    fn green_arithmetic_is_consistent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_adelic(&mut r, &small());
        let b = random_adelic(&mut r, &small());
        let sum = a.add(&b).unwrap();
        prop_assert_eq!(sum.v0(), &(a.v0() + b.v0()));
        let back = sum.green().sub(b.green()).unwrap();
        prop_assert_eq!(&back, a.green());
        prop_assert!(sum.violations().is_empty());
    }
}
