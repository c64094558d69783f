use jetinv_core::equations::compat::{dplusf_power_of, ode_vanishes};
use jetinv_core::equations::{
    christoffel_check, constraint_residuals, dplusf_power, dplusf_power_conjugated, eikonal_sample,
    fiber_rank, spectrum_identities, verify_ode, verify_singular_vanishing, CompatConfig, RatFun,
    UniPoly,
};
use jetinv_core::jetspace::binomial;
use jetinv_core::motion::{prolong_action, random_motion};
use jetinv_core::sampling::{case_rng, random_rational};
use jetinv_core::scalar::{Scalar, Q};
use proptest::prelude::*;
use rand::Rng;

fn distinct_poles(rng: &mut impl Rng, m: usize) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    while out.len() < m {
        let a = random_rational(rng);
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn eikonal_samples_satisfy_the_equation(seed in any::<u64>(), n in 2usize..4, k in 1usize..5) {
        let mut rng = case_rng(seed, 0);
        let s = eikonal_sample(n, k, &mut rng);
        prop_assert!(constraint_residuals(&s.jet).is_empty());
        let moved = prolong_action(&random_motion(&mut rng, n), &s.jet);
        prop_assert!(constraint_residuals(&moved).is_empty());
        if k >= 2 {
            prop_assert_eq!(verify_singular_vanishing(&s.jet).unwrap().failures(), 0);
        }
    }

    #[test]
    fn family_satisfies_the_ode(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = case_rng(seed, 1);
        let m = rng.gen_range(1..=n);
        let cfg = CompatConfig::new(n, distinct_poles(&mut rng, m)).unwrap();
        let r = verify_ode(&cfg);
        prop_assert!(r.vanishes && r.sharp && r.conjugation_agrees);
        prop_assert_eq!(dplusf_power(&cfg, 2), dplusf_power_conjugated(&cfg, 2));
    }

    #[test]
    fn polynomial_f_never_satisfies_the_ode(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = case_rng(seed, 2);
        let mut c: Vec<Q> = (0..2).map(|_| random_rational(&mut rng)).collect();
        c.push(Q::one());
        let f = RatFun::from_poly(UniPoly::new(c));
        prop_assert!(!ode_vanishes(&f, n));
    }

    #[test]
    fn spectrum_identities_hold(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = case_rng(seed, 3);
        let m = rng.gen_range(1..=n);
        let cfg = CompatConfig::new(n, distinct_poles(&mut rng, m)).unwrap();
        let u0 = random_rational(&mut rng);
        if let Ok(r) = spectrum_identities(&cfg, &u0) {
            prop_assert_eq!(r.failures(), 0);
        }
    }
}

#[test]
fn single_pole_powers() {
    // f = 1/u: (D+f)(1) = 1/u, (D+f)^2(1) = 0
    let f = RatFun::simple_pole(&Q::zero());
    assert_eq!(dplusf_power_of(&f, 1), f);
    assert!(dplusf_power_of(&f, 2).is_zero());
}

#[test]
fn fiber_ranks_on_the_equation() {
    let mut rng = case_rng(11, 0);
    for (n, k) in [(2, 3), (2, 4), (3, 3)] {
        let r = fiber_rank(n, k, &mut rng).unwrap();
        assert_eq!(r.expected, binomial(n + k - 2, k));
        assert_eq!(r.rank, r.expected, "n={n} k={k}");
    }
    assert!(fiber_rank(2, 2, &mut rng).is_err());
}

#[test]
fn christoffel_symbols_on_the_equation() {
    let mut rng = case_rng(4, 0);
    let mut checked = 0;
    while checked < 5 {
        let s = eikonal_sample(3, 3, &mut rng);
        let Ok(r) = christoffel_check(&s.jet) else { continue };
        assert!(r.nabla_q2_pass(), "residual {}", r.nabla_q2_residual);
        assert!(r.perturbation_residual < 1e-4);
        checked += 1;
    }
}

#[test]
fn bad_pole_sets_are_rejected() {
    assert!(CompatConfig::new(2, vec![Q::one(), Q::one()]).is_err());
    assert!(CompatConfig::new(1, vec![Q::one(), Q::zero()]).is_err());
    let cfg = CompatConfig::new(2, vec![Q::one()]).unwrap();
    assert!(spectrum_identities(&cfg, &Q::one()).is_err());
}
