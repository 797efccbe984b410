//! The equivalence oracle: a candidate structure satisfies the higher Jacobi
//! relations if and only if its Hamiltonian satisfies the master equation
//! (both directions, on random candidates).

use linfty_core::linfty::{
    check_higher_jacobi, check_master_equation, hamiltonian_encode, master_equation_components,
};
use linfty_core::sampling::Sampler;

#[test]
fn jacobi_iff_master_equation_on_random_candidates() {
    let mut sampler = Sampler::new(0xC0FFEE);
    let mut passes = 0usize;
    let mut fails = 0usize;
    for round in 0..240 {
        let terms = if round % 2 == 0 { 2 } else { 3 };
        let space = sampler.space(terms, 5);
        let max_arity = if terms == 2 { 3 } else { 4 };
        let candidate = sampler.candidate(&space, max_arity);

        // Full Jacobi: arities are bounded, so residuals can only be nonzero
        // for n <= 2*max_arity - 1; n_max = 5 covers both term counts
        // together with the automatic vanishing beyond it (checked below).
        let n_full = 2 * candidate.max_arity().max(1) - 1;
        let jacobi = check_higher_jacobi(&candidate, n_full);
        let enc = hamiltonian_encode(&candidate).expect("degree rule holds by construction");
        let master = check_master_equation(&enc.hamiltonian, &enc.chart);

        assert_eq!(
            jacobi.all_passed(),
            master.all_passed(),
            "verdicts differ on candidate #{round}:\n{jacobi}\n{master}"
        );

        // Truncated comparison: Jacobi to n <= 4 agrees with the arity <= 4
        // components of 1/2 {H, H}.
        let jacobi4 = check_higher_jacobi(&candidate, 4);
        let comps = master_equation_components(&enc.hamiltonian, &enc.chart);
        let master4 = comps
            .iter()
            .filter(|(arity, _)| **arity <= 4)
            .all(|(_, c)| c.is_zero());
        assert_eq!(
            jacobi4.all_passed(),
            master4,
            "truncated verdicts differ on candidate #{round}"
        );

        if jacobi.all_passed() {
            passes += 1;
        } else {
            fails += 1;
        }
    }
    // the sample must exercise both verdicts
    assert!(passes > 10, "too few valid candidates: {passes}");
    assert!(fails > 10, "too few invalid candidates: {fails}");
}

/// Structures with mutually interacting constants in mixed degrees: the
/// registry and its tilde images exercise the suspension-sign bookkeeping
/// that sparse random candidates can miss.
#[test]
fn equivalence_on_structured_instances() {
    use linfty_core::courant::new_two_term;
    use linfty_core::instances::verified_2term_registry;
    for g in verified_2term_registry() {
        for s in [g.clone(), new_two_term(&g).unwrap()] {
            assert!(check_higher_jacobi(&s, 4).all_passed());
            let enc = hamiltonian_encode(&s).unwrap();
            assert!(
                check_master_equation(&enc.hamiltonian, &enc.chart).all_passed(),
                "master equation fails on a verified structure: {}",
                s.name.clone().unwrap_or_default()
            );
        }
    }
}

/// The smallest interference pattern: l1(m) = x with l2 acting on both
/// layers; the naive (suspension-free) encoding decouples the master
/// equation from the Jacobi relations exactly here.
#[test]
fn equivalence_on_minimal_mixed_pattern() {
    use linfty_core::graded::{GradedSpace, GradedVector};
    use linfty_core::scalar::Scalar;
    for c in [-2i64, -1, 1, 2] {
        let space = GradedSpace::builder()
            .component(0, vec!["a", "x"])
            .component(-1, vec!["m"])
            .build()
            .unwrap();
        let mut s = linfty_core::linfty::LInftyStructure::new(space);
        s.set_constant(1, &["m"], GradedVector::basis("x")).unwrap();
        s.set_constant(
            2,
            &["a", "m"],
            GradedVector::single("m", Scalar::from_int(c)),
        )
        .unwrap();
        for d in [-2i64, -1, 1, 2] {
            let mut t = s.clone();
            t.set_constant(
                2,
                &["a", "x"],
                GradedVector::single("x", Scalar::from_int(d)),
            )
            .unwrap();
            let jac = check_higher_jacobi(&t, 4).all_passed();
            let enc = hamiltonian_encode(&t).unwrap();
            let master = check_master_equation(&enc.hamiltonian, &enc.chart).all_passed();
            assert_eq!(jac, master, "c={c}, d={d}");
            assert_eq!(jac, c == d, "Jacobi holds exactly when c = d");
        }
    }
}

#[test]
fn rejection_sampling_finds_verified_structures() {
    let mut sampler = Sampler::new(42);
    let s2 = sampler
        .sample_verified(2, 4, 3, 4000)
        .expect("a verified 2-term candidate exists");
    assert!(check_higher_jacobi(&s2, 4).all_passed());
    let s3 = sampler
        .sample_verified(3, 5, 4, 4000)
        .expect("a verified 3-term candidate exists");
    assert!(check_higher_jacobi(&s3, 5).all_passed());
}
