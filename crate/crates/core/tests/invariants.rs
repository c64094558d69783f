use jetinv_core::frames::{
    commutator, commutator_fd, eframe_structure_constants, eval_numeric, structure_constants,
    tresse_derivative, tresse_reconstruction_residual, v_fields,
};
use jetinv_core::invariants::{
    catalog, elementary_from_traces, elementary_symmetric_minors, independence_rank,
    invariant_expr, newton_girard, InvariantContext, InvariantId,
};
use jetinv_core::motion::{prolong_action, random_motion};
use jetinv_core::sampling::{case_rng, random_jet};
use jetinv_core::scalar::{q_to_f64, Q};
use jetinv_core::syzygy::{verify_low_order, verify_main_syzygy};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn float_and_exact_evaluation_agree(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 0);
        let j = random_jet(&mut rng, 3, 3);
        let jf = j.to_f64();
        let ctx = InvariantContext::new(&jf);
        for id in catalog(3, 3, 3) {
            let exact = q_to_f64(&jetinv_core::invariants::eval_invariant(&id, &j).unwrap());
            let float = ctx.eval(&id).unwrap();
            prop_assert!((exact - float).abs() <= 1e-9 * exact.abs().max(1.0), "{}", id);
        }
    }

    #[test]
    fn symbolic_and_direct_evaluation_agree(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 1);
        let j = random_jet(&mut rng, 2, 3);
        let ctx = InvariantContext::new(&j);
        for id in catalog(2, 3, 3) {
            prop_assert_eq!(invariant_expr(&id, 2).unwrap().eval(&j).unwrap(), ctx.eval(&id).unwrap());
        }
    }

    #[test]
    fn newton_girard_matches_minors(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = case_rng(seed, 2);
        let j = random_jet(&mut rng, n, 2);
        let ctx = InvariantContext::new(&j);
        prop_assert_eq!(elementary_from_traces(&ctx).unwrap(), elementary_symmetric_minors(ctx.a()));
    }

    #[test]
    fn leibniz_oracle_is_exact(seed in any::<u64>(), n in 2usize..4, s in 2usize..4) {
        let mut rng = case_rng(seed, 3);
        let i0 = rng.gen_range(0..n);
        let mut idx: Vec<usize> = (0..s).map(|_| rng.gen_range(0..n)).collect();
        idx.sort_unstable();
        let j = random_jet(&mut rng, n, s + 1);
        if let Ok(r) = verify_main_syzygy(i0, &idx, &j) {
            prop_assert!(r.oracle_exact);
            prop_assert!(r.corrected_exact);
        }
    }

    #[test]
    fn low_order_relations_hold(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 4);
        let j = random_jet(&mut rng, 2, 3);
        for c in verify_low_order(&j).unwrap() {
            prop_assert!(c.exact, "{}", c.label);
        }
    }

    #[test]
    fn v_frame_structure_constants_are_invariant(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 5);
        let j = random_jet(&mut rng, 2, 3);
        let fields = v_fields(2);
        let moved = prolong_action(&random_motion(&mut rng, 2), &j);
        if let (Ok(a), Ok(b)) = (structure_constants(&fields, &j), structure_constants(&fields, &moved)) {
            prop_assert!(a.is_antisymmetric());
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn tresse_derivatives_reconstruct(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 6);
        let j = random_jet(&mut rng, 2, 3);
        let basis = vec![
            invariant_expr(&InvariantId::I0, 2).unwrap(),
            invariant_expr(&InvariantId::I1, 2).unwrap(),
        ];
        let target = invariant_expr(&InvariantId::TraceA(1), 2).unwrap();
        if let Ok(c) = tresse_derivative(&target, &basis, &j) {
            let r = tresse_reconstruction_residual(&target, &basis, &c, &j).unwrap();
            prop_assert_eq!(r, Q::from_integer(0.into()));
        }
    }
}

#[test]
fn newton_girard_on_known_power_sums() {
    // roots 1, 2, 3: S = (6, 14, 36), E = (6, 11, 6)
    let s: Vec<Q> = [6, 14, 36].iter().map(|&k| Q::from_integer(k.into())).collect();
    let e: Vec<Q> = [6, 11, 6].iter().map(|&k| Q::from_integer(k.into())).collect();
    assert_eq!(newton_girard(&s), e);
}

#[test]
fn ranks_on_the_regular_set() {
    let mut rng = case_rng(9, 0);
    let j = random_jet(&mut rng, 2, 3);
    assert_eq!(independence_rank(&catalog(2, 2, 2), &j.truncate(2)).unwrap(), 5);
    assert_eq!(independence_rank(&catalog(2, 3, 3), &j).unwrap(), 9);
}

#[test]
fn eigen_invariants_are_numeric_only() {
    let mut rng = case_rng(3, 0);
    let j = random_jet(&mut rng, 2, 2);
    let ctx = InvariantContext::new(&j);
    assert!(ctx.eval(&InvariantId::Eigenvalue(1)).is_err());
    let l1 = eval_numeric(&InvariantId::Eigenvalue(1), &j).unwrap();
    let l2 = eval_numeric(&InvariantId::Eigenvalue(2), &j).unwrap();
    let tr = q_to_f64(&ctx.trace_power(1).unwrap());
    assert!((l1 + l2 - tr).abs() < 1e-12);
    let pairs = eval_numeric(&InvariantId::FramePair(1), &j).unwrap()
        + eval_numeric(&InvariantId::FramePair(2), &j).unwrap();
    assert!((pairs - q_to_f64(&ctx.i1().unwrap())).abs() < 1e-9);
}

#[test]
fn commutators_agree_with_central_differences() {
    let mut rng = case_rng(5, 0);
    let j = random_jet(&mut rng, 2, 4);
    let fields = v_fields(2);
    let exact = commutator(&fields[0], &fields[1]).eval_coeffs(&j).unwrap();
    let fd = commutator_fd(&fields[0], &fields[1], &j, 1e-4).unwrap();
    for (a, b) in exact.iter().zip(&fd) {
        assert!((q_to_f64(a) - b).abs() < 1e-5 * q_to_f64(a).abs().max(1.0));
    }
    assert!(eframe_structure_constants(&j).is_ok());
}
