//! Schouten module oracles: the recursive bracket against the odd-chart big
//! bracket, graded antisymmetry and Jacobi, and the twisted-Poisson residual
//! against the Maurer-Cartan residual of the derived-bracket presentation.

use linfty_core::base_poly::{monomials_up_to, BasePoly};
use linfty_core::hpoisson::{mc_residual, McConvention};
use linfty_core::poly::big_bracket;
use linfty_core::scalar::Scalar;
use linfty_core::schouten::{
    from_chart_polynomial, odd_chart, schouten_bracket, to_chart_polynomial,
    twisted_poisson_presentation, twisted_poisson_residual, ConstantThreeForm, PolyMultivector,
};

use itertools::Itertools;

/// All monomial multivectors with <= `max_dirs` directions and coefficient
/// degree <= `coeff_cap` on `R^dim`.
fn monomial_multivectors(dim: usize, max_dirs: usize, coeff_cap: u32) -> Vec<PolyMultivector> {
    let mut out = Vec::new();
    let monos = monomials_up_to(dim, coeff_cap);
    for k in 0..=max_dirs {
        for dirs in (0..dim).combinations(k) {
            for m in &monos {
                out.push(PolyMultivector::from_term(
                    dim,
                    &dirs,
                    m.clone(),
                    Scalar::one(),
                ));
            }
        }
    }
    out
}

#[test]
fn bracket_agrees_with_chart_route_exhaustively() {
    let dim = 3;
    let chart = odd_chart(dim);
    for p in monomial_multivectors(dim, 3, 2) {
        for q in monomial_multivectors(dim, 2, 1) {
            let direct = schouten_bracket(&p, &q);
            let via_chart = from_chart_polynomial(
                dim,
                &big_bracket(
                    &to_chart_polynomial(&p, &chart).unwrap(),
                    &to_chart_polynomial(&q, &chart).unwrap(),
                    &chart,
                ),
                &chart,
            )
            .unwrap();
            assert_eq!(
                direct,
                via_chart,
                "chart route disagrees on [{}, {}]",
                p.display(&|i| format!("x{i}")),
                q.display(&|i| format!("x{i}"))
            );
        }
    }
}

#[test]
fn chart_round_trip_is_identity() {
    let dim = 3;
    let chart = odd_chart(dim);
    for p in monomial_multivectors(dim, 3, 2) {
        let round =
            from_chart_polynomial(dim, &to_chart_polynomial(&p, &chart).unwrap(), &chart).unwrap();
        assert_eq!(p, round);
    }
}

#[test]
fn linear_fields_two_routes() {
    // [x1 d2, x2 d1] computed directly and through the chart
    let dim = 2;
    let a = PolyMultivector::from_term(dim, &[1], vec![(0, 1)], Scalar::one());
    let b = PolyMultivector::from_term(dim, &[0], vec![(1, 1)], Scalar::one());
    let chart = odd_chart(dim);
    let direct = schouten_bracket(&a, &b);
    let viachart = from_chart_polynomial(
        dim,
        &big_bracket(
            &to_chart_polynomial(&a, &chart).unwrap(),
            &to_chart_polynomial(&b, &chart).unwrap(),
            &chart,
        ),
        &chart,
    )
    .unwrap();
    assert_eq!(direct, viachart);
    assert!(!direct.is_zero());
}

#[test]
fn graded_antisymmetry_and_jacobi() {
    let dim = 3;
    // smaller slice: <= 3 directions, coefficient degree <= 2 on the outer
    // arguments keeps the triple loop reasonable
    let all = monomial_multivectors(dim, 3, 2);
    let small = monomial_multivectors(dim, 2, 1);
    for p in &all {
        for q in &all {
            let pd = p.uniform_degree().unwrap() as i64;
            let qd = q.uniform_degree().unwrap() as i64;
            let sign = -Scalar::neg_one_pow((pd - 1) * (qd - 1));
            assert_eq!(
                schouten_bracket(p, q),
                schouten_bracket(q, p).scale(&sign),
                "antisymmetry fails"
            );
        }
    }
    for p in &small {
        for q in &small {
            for r in &small {
                let pd = p.uniform_degree().unwrap() as i64;
                let qd = q.uniform_degree().unwrap() as i64;
                let sign = Scalar::neg_one_pow((pd - 1) * (qd - 1));
                let lhs = schouten_bracket(p, &schouten_bracket(q, r));
                let rhs = schouten_bracket(&schouten_bracket(p, q), r)
                    .add(&schouten_bracket(q, &schouten_bracket(p, r)).scale(&sign));
                assert_eq!(lhs, rhs, "Jacobi fails");
            }
        }
    }
}

#[test]
fn constant_pi_no_h_residual_vanishes() {
    let pi = PolyMultivector::from_term(3, &[0, 1], Vec::new(), Scalar::one());
    let h = ConstantThreeForm::new();
    assert!(twisted_poisson_residual(&pi, &h).unwrap().is_zero());
}

#[test]
fn rank_two_pi_kills_wedge3_on_r3() {
    // pi = d1^d2: any H gives wedge^3 pi^# H = 0
    let pi = PolyMultivector::from_term(3, &[0, 1], Vec::new(), Scalar::one());
    let mut h = ConstantThreeForm::new();
    h.set([0, 1, 2], Scalar::from_int(5)).unwrap();
    let r = twisted_poisson_residual(&pi, &h).unwrap();
    assert!(r.is_zero());
}

#[test]
fn three_form_antisymmetry_enforced() {
    let mut h = ConstantThreeForm::new();
    h.set([2, 1, 0], Scalar::one()).unwrap();
    assert_eq!(h.get([0, 1, 2]), -Scalar::one());
    assert_eq!(h.get([1, 0, 2]), Scalar::one());
    assert!(h.set([0, 0, 1], Scalar::one()).is_err());
}

fn random_bivector(dim: usize, coeff_cap: u32, state: &mut u64) -> PolyMultivector {
    let mut next = || {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    };
    let monos = monomials_up_to(dim, coeff_cap);
    let mut pi = PolyMultivector::zero(dim);
    for i in 0..dim {
        for j in i + 1..dim {
            // sparse: skip about half the entries
            if next() % 2 == 0 {
                continue;
            }
            let m = monos[(next() as usize) % monos.len()].clone();
            let c = Scalar::ratio((next() % 9) as i64 - 4, 1 + (next() % 3) as i64);
            pi.add_term(&[i, j], m, c);
        }
    }
    pi
}

/// The cross-module oracle: the Maurer-Cartan residual of the presentation
/// of `T*[1]R^n` (derived-bracket route) equals `1/2[pi,pi] - wedge^3 pi^#
/// H` (multivector route), bit-exact.
#[test]
fn mc_residual_matches_twisted_residual() {
    let mut state = 0xD1CEu64;
    for &(dim, rounds) in &[(3usize, 60usize), (4, 25)] {
        let mut h = ConstantThreeForm::new();
        // a generic constant 3-form
        let mut c = 1i64;
        for t in (0..dim).combinations(3) {
            h.set([t[0], t[1], t[2]], Scalar::ratio(c, 2)).unwrap();
            c += 3;
        }
        let pres = twisted_poisson_presentation(dim, &h).unwrap();
        assert!(
            pres.verify().all_passed(),
            "constant H satisfies the master equation"
        );
        let mut nonzero_seen = 0;
        for _ in 0..rounds {
            let pi = random_bivector(dim, 2, &mut state);
            let alpha = to_chart_polynomial(&pi, &pres.chart).unwrap();
            let mc = mc_residual(&pres, &alpha, McConvention::FromArityTwo).unwrap();
            let mc_mv = from_chart_polynomial(dim, &mc, &pres.chart).unwrap();
            let direct = twisted_poisson_residual(&pi, &h).unwrap();
            assert_eq!(
                mc_mv,
                direct,
                "cross-oracle mismatch for pi = {}",
                pi.display(&|i| format!("x{i}"))
            );
            if !direct.is_zero() {
                nonzero_seen += 1;
            }
        }
        assert!(nonzero_seen > 5, "residuals were all degenerate on R^{dim}");
    }
}

/// A mixed-coefficient example on R^3: pi = x3 d1^d2 + d2^d3 with H = c dx123.
#[test]
fn twisted_example_r3() {
    let mut pi = PolyMultivector::zero(3);
    pi.add_term(&[0, 1], vec![(2, 1)], Scalar::one());
    pi.add_term(&[1, 2], Vec::new(), Scalar::one());
    let mut h = ConstantThreeForm::new();
    h.set([0, 1, 2], Scalar::from_int(7)).unwrap();
    let direct = twisted_poisson_residual(&pi, &h).unwrap();
    let pres = twisted_poisson_presentation(3, &h).unwrap();
    let alpha = to_chart_polynomial(&pi, &pres.chart).unwrap();
    let mc = mc_residual(&pres, &alpha, McConvention::FromArityTwo).unwrap();
    assert_eq!(from_chart_polynomial(3, &mc, &pres.chart).unwrap(), direct);
}

/// Poisson specialization: with H = 0 the residual is 1/2 [pi, pi].
#[test]
fn untwisted_residual_is_half_self_bracket() {
    let mut state = 77u64;
    let h = ConstantThreeForm::new();
    for _ in 0..10 {
        let pi = random_bivector(3, 2, &mut state);
        let r = twisted_poisson_residual(&pi, &h).unwrap();
        let want = schouten_bracket(&pi, &pi).scale(&Scalar::ratio(1, 2));
        assert_eq!(r, want);
    }
}

/// Derivation check used by the homotopy Poisson definition: the extracted
/// binary bracket is a derivation in its last slot.
#[test]
fn extracted_bracket_is_derivation() {
    let dim = 3;
    let h = ConstantThreeForm::new();
    let pres = twisted_poisson_presentation(dim, &h).unwrap();
    let x = |i: usize| PolyMultivector::function(dim, &BasePoly::var(i));
    let f = to_chart_polynomial(&x(0), &pres.chart).unwrap();
    let pi = PolyMultivector::from_term(dim, &[0, 1], vec![(2, 1)], Scalar::one());
    let a = to_chart_polynomial(&pi, &pres.chart).unwrap();
    // l2(pi, x0 * x0) = 2 x0 l2(pi, x0)
    let sq = f.mul(&f, &pres.chart);
    let lhs = linfty_core::hpoisson::derived_bracket_extract(&pres, &[a.clone(), sq]).unwrap();
    let inner = linfty_core::hpoisson::derived_bracket_extract(&pres, &[a, f.clone()]).unwrap();
    let rhs = f.mul(&inner, &pres.chart).scale(&Scalar::from_int(2));
    assert_eq!(lhs, rhs);
}
