use murmur_core::arith::{euler_phi, jacobi, kronecker_symbol, mobius, primes_in_interval, PrimeSieve};
use murmur_core::characters::{gauss_sum, CharacterGroup};
use murmur_core::real_family::{
    b_coefficient, empirical_m, empirical_m_naive, tilde_transform, TruncationPolicy, Variant,
    WeightFunction,
};
use num_rational::Ratio;
use proptest::prelude::*;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::EightD), Just(Variant::Dagger)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_and_phi_are_multiplicative(a in 1u64..5000, b in 1u64..5000) {
        prop_assume!(gcd(a, b) == 1);
        let ab = (a * b) as i64;
        prop_assert_eq!(mobius(ab).unwrap(), mobius(a as i64).unwrap() * mobius(b as i64).unwrap());
        prop_assert_eq!(euler_phi(a * b), euler_phi(a) * euler_phi(b));
    }

    #[test]
    fn kronecker_is_jacobi_for_odd_bottom(a in 0u64..10_000, k in 0u64..5000) {
        let n = 2 * k + 1;
        prop_assert_eq!(kronecker_symbol(a as i64, n as i64).unwrap(), jacobi(a, n));
    }

    #[test]
    fn kronecker_multiplicative_in_bottom(a in -500i64..500, m in 1i64..300, n in 1i64..300) {
        prop_assume!(a != 0);
        let lhs = kronecker_symbol(a, m * n).unwrap();
        let rhs = kronecker_symbol(a, m).unwrap() * kronecker_symbol(a, n).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn b_is_multiplicative(m in 1u64..400, n in 1u64..400, v in variant()) {
        prop_assume!(gcd(m, n) == 1);
        let lhs = b_coefficient(m * n, v).unwrap();
        let rhs = b_coefficient(m, v).unwrap() * b_coefficient(n, v).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn b_on_odd_prime_powers(idx in 0usize..50, k in 1u32..4, v in variant()) {
        let p = PrimeSieve::new(300).primes().filter(|&p| p > 2).nth(idx).unwrap();
        let b = b_coefficient(p.pow(k), v).unwrap();
        prop_assert_eq!(b, Ratio::new(p as i64 - 1, p as i64));
    }

    #[test]
    fn segmented_primes_match_the_sieve(lo in 0u64..50_000, len in 0u64..3000) {
        let sieve = PrimeSieve::new(lo + len);
        prop_assert_eq!(primes_in_interval(lo, lo + len), sieve.primes_in_interval(lo, lo + len));
    }

    #[test]
    fn tilde_is_linear_in_the_weight(
        ys1 in prop::collection::vec(0.0f64..1.0, 5),
        ys2 in prop::collection::vec(0.0f64..1.0, 5),
        alpha in 0.0f64..3.0,
        xi in -3.0f64..3.0,
    ) {
        let xs = vec![0.5, 0.9, 1.2, 1.6, 2.1];
        let mix: Vec<f64> = ys1.iter().zip(&ys2).map(|(a, b)| alpha * a + b).collect();
        let policy = TruncationPolicy::default();
        let t = |ys: &[f64]| {
            let w = WeightFunction::tabulated(xs.clone(), ys.to_vec()).unwrap();
            tilde_transform(&w, xi, &policy)
        };
        let lhs = t(&mix);
        let rhs = alpha * t(&ys1) + t(&ys2);
        prop_assert!((lhs - rhs).abs() <= 10.0 * policy.quad_tol * (1.0 + alpha), "{lhs} vs {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn primitive_gauss_sums_have_modulus_sqrt_n(idx in 0usize..40, k in 0u64..1000) {
        let n = [3u64, 4, 5, 7, 8, 9, 11, 12, 13, 15, 16, 17, 19, 20, 21, 24, 25, 27, 28, 29,
                 31, 32, 33, 35, 36, 37, 39, 40, 41, 43, 44, 45, 47, 48, 49, 51, 52, 53, 55, 56][idx];
        let g = CharacterGroup::new(n).unwrap();
        let chi = g.character(k % g.order());
        let tau = gauss_sum(&g, &chi);
        if g.is_primitive(&chi) {
            prop_assert!((tau.norm_sqr() - n as f64).abs() < 1e-9 * n as f64);
        }
        for a in 1..n as i64 {
            for b in 1..n as i64 {
                let lhs = g.evaluate(&chi, a * b);
                let rhs = g.evaluate(&chi, a) * g.evaluate(&chi, b);
                prop_assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn empirical_matches_the_naive_sum(log2x in 9u32..12, y in 0.2f64..2.0, neg in any::<bool>(), v in variant()) {
        let x = 1u64 << log2x;
        let w = if neg {
            WeightFunction::bump(-2.0, -1.0).unwrap()
        } else {
            WeightFunction::bump(1.0, 2.0).unwrap()
        };
        let fast = empirical_m(y, x, 2.0 / 3.0, &w, v).unwrap();
        let slow = empirical_m_naive(y, x, 2.0 / 3.0, &w, v).unwrap();
        prop_assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
    }
}

#[test]
fn empirical_sum_ignores_the_thread_count() {
    let w = WeightFunction::bump(1.0, 2.0).unwrap();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            [0.3, 0.9, 1.7].map(|y| empirical_m(y, 1 << 14, 2.0 / 3.0, &w, Variant::EightD).unwrap())
        })
    };
    let one = run(1);
    for t in [2, 3, 8] {
        let other = run(t);
        for (a, b) in one.iter().zip(&other) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
