//! Courant-kit suite: axiom verification on the registry, the published
//! closed forms of the induced structure (omni-Lie, string type, quadratic
//! string, adjoint deformation), the canonical homomorphism, the
//! derived-bracket route, and the function-section 2-term structure.

use linfty_core::base_poly::BasePoly;
use linfty_core::courant::{
    canonical_morphism, courant_from_2term, generator_sections, new_two_term,
    verify_courant_axioms, verify_courant_two_term, CourantData, DerivedCourant,
};
use linfty_core::graded::GradedVector;
use linfty_core::instances::{
    adjoint_identity, quadratic_string, shift_identity, sl2_invariant_form, string_type,
    verified_2term_registry, verified_2term_up_to_dim, LieAlgebra,
};
use linfty_core::linfty::{check_higher_jacobi, verify_morphism, LInftyStructure};
use linfty_core::poly::GradedPolynomial;
use linfty_core::scalar::Scalar;

fn x(i: usize) -> String {
    format!("x{}", i + 1)
}

fn m(i: usize) -> String {
    format!("m{}", i + 1)
}

fn tensor(i: usize, a: usize) -> String {
    format!("{}:{}*", m(i), x(a))
}

/// u + A as a vector in g~0: u over the x-basis, A as a matrix with
/// `A[i][a]` the coefficient of `m_i (x) x_a*` (so `A(e_a) = sum_i A[i][a]
/// e_i`).
fn elt(u: &[i64], a: &[&[i64]]) -> GradedVector {
    let mut v = GradedVector::zero();
    for (b, c) in u.iter().enumerate() {
        v.add_term(x(b), Scalar::from_int(*c));
    }
    for (i, row) in a.iter().enumerate() {
        for (col, c) in row.iter().enumerate() {
            v.add_term(tensor(i, col), Scalar::from_int(*c));
        }
    }
    v
}

/// A fiber-constant chart polynomial as a base polynomial over `m`-vars.
fn chart_fn_to_base(cd: &CourantData, derived: &DerivedCourant, p: &GradedPolynomial) -> BasePoly {
    let mut out = BasePoly::zero();
    for (mono, c) in p.terms() {
        let mut base = Vec::new();
        for &(rank, mult) in mono.factors() {
            let label = derived.chart.label(rank);
            let i = (0..cd.base_dim())
                .find(|&i| cd.base_name(i) == label)
                .expect("fiber-constant polynomial over the base");
            base.push((i, mult));
        }
        out.add_term(base, c.clone());
    }
    out
}

#[test]
fn courant_axioms_on_registry() {
    for g in verified_2term_up_to_dim(4) {
        let cd = courant_from_2term(&g).unwrap();
        let report = verify_courant_axioms(&cd, 2);
        assert!(
            report.all_passed(),
            "{}:\n{report}",
            g.name.clone().unwrap_or_default()
        );
    }
}

#[test]
fn courant_axioms_on_quadratic_string_sl2() {
    // dim 4 structure with l3 != 0: the T-term and the l3 part of x . y are
    // both live here
    let g = quadratic_string(&LieAlgebra::sl2(), &sl2_invariant_form()).unwrap();
    let cd = courant_from_2term(&g).unwrap();
    let report = verify_courant_axioms(&cd, 1);
    assert!(report.all_passed(), "{report}");
}

#[test]
fn perturbed_l3_breaks_leibniz_axiom() {
    // l3(x1,x2,x3) = m1 on (V -Id-> V) dim 3 violates l1 l3 = 0, i.e. the
    // 1/2{l2,l2} + {l1,l3} component; the Leibniz axiom must fail with a
    // witness
    let mut g = shift_identity(3);
    g.set_constant(
        3,
        &["x1", "x2", "x3"],
        GradedVector::single("m1", Scalar::one()),
    )
    .unwrap();
    assert!(!check_higher_jacobi(&g, 4).all_passed());
    let cd = courant_from_2term(&g).unwrap();
    let report = verify_courant_axioms(&cd, 1);
    assert!(!report.all_passed());
    let fail = report.first_failure().unwrap();
    assert!(!fail.witnesses.is_empty());
    assert!(report
        .checks
        .iter()
        .any(|c| c.name.contains("Leibniz") && c.status == linfty_core::report::CheckStatus::Fail));
}

#[test]
fn derived_bracket_route_agrees_with_tables() {
    for g in verified_2term_registry() {
        let cd = courant_from_2term(&g).unwrap();
        let derived = DerivedCourant::new(&cd).unwrap();
        let gens = generator_sections(&cd, 1);
        for e1 in &gens {
            for e2 in &gens {
                let direct = cd.dorfman(e1, e2);
                let via = derived.dorfman(&cd, e1, e2).unwrap();
                assert_eq!(
                    direct,
                    via,
                    "Dorfman disagreement on {}",
                    g.name.clone().unwrap_or_default()
                );
            }
            for i in 0..cd.base_dim() {
                let f = GradedPolynomial::coordinate(&derived.chart, &cd.base_name(i)).unwrap();
                let got = derived.rho(&cd, e1, &f).unwrap();
                assert_eq!(
                    cd.rho(e1, &BasePoly::var(i)),
                    chart_fn_to_base(&cd, &derived, &got)
                );
            }
        }
        for i in 0..cd.base_dim() {
            let f = GradedPolynomial::coordinate(&derived.chart, &cd.base_name(i)).unwrap();
            let via = derived.d_op(&cd, &f).unwrap();
            assert_eq!(cd.d_op(&BasePoly::var(i)), via);
        }
    }
}

#[test]
fn function_section_two_term_passes_jacobi() {
    for g in verified_2term_up_to_dim(4) {
        let cd = courant_from_2term(&g).unwrap();
        let report = verify_courant_two_term(&cd, 1, 4);
        assert!(
            report.all_passed(),
            "{}:\n{report}",
            g.name.clone().unwrap_or_default()
        );
    }
}

#[test]
fn new_two_term_passes_jacobi_on_registry() {
    for g in verified_2term_registry() {
        let tilde = new_two_term(&g).unwrap();
        let report = check_higher_jacobi(&tilde, 4);
        assert!(
            report.all_passed(),
            "tilde of {} fails:\n{report}",
            g.name.clone().unwrap_or_default()
        );
    }
}

#[test]
fn omni_lie_numeric_instance_dim1() {
    // dim V = 1: u = 1, A = 2, v = 3, B = 5 gives
    // l~20 = 1/2 (A v - B u) = 1/2 (6 - 5) = 1/2 (the gl part [A, B] = 0)
    let g = shift_identity(1);
    let tilde = new_two_term(&g).unwrap();
    let e1 = elt(&[1], &[&[2]]);
    let e2 = elt(&[3], &[&[5]]);
    let got = tilde.eval(2, &[e1, e2]).unwrap();
    let want = GradedVector::single(x(0), Scalar::ratio(1, 2));
    assert_eq!(got, want);
}

/// The closed forms of the omni-Lie structure: l~21(u + A, m) = 1/2 A m,
/// l~20(u + A, v + B) = 1/2 (A v - B u) + [A, B],
/// l~3(u+A, v+B, w+C) = -1/4 ([A,B] w + [B,C] u + [C,A] v).
#[test]
fn omni_lie_closed_forms() {
    for dim in [1usize, 2] {
        let g = shift_identity(dim);
        let tilde = new_two_term(&g).unwrap();
        assert!(check_higher_jacobi(&tilde, 4).all_passed());

        // matrix basis helpers
        let unit = |i: usize| {
            let mut u = vec![0i64; dim];
            u[i] = 1;
            u
        };
        let mat_unit = |i: usize, a: usize| -> Vec<Vec<i64>> {
            let mut mrows = vec![vec![0i64; dim]; dim];
            mrows[i][a] = 1;
            mrows
        };
        let as_elt = |u: Option<usize>, a: Option<(usize, usize)>| -> GradedVector {
            let uvec = u.map(unit).unwrap_or_else(|| vec![0; dim]);
            let arows = a
                .map(|(i, c)| mat_unit(i, c))
                .unwrap_or_else(|| vec![vec![0; dim]; dim]);
            let rows: Vec<&[i64]> = arows.iter().map(|r| r.as_slice()).collect();
            elt(&uvec, &rows)
        };
        // l~1(m_i) = D m = m (as x_i): the gl part vanishes since l2 = 0
        for i in 0..dim {
            let got = tilde.eval_basis(1, &[&m(i)]).unwrap();
            assert_eq!(got, GradedVector::basis(x(i)));
        }
        // l~21(A, m_j) = 1/2 A m_j: for A = E_{ia}, A(m_j) = delta_{aj} m_i
        for i in 0..dim {
            for a in 0..dim {
                for j in 0..dim {
                    let got = tilde
                        .eval(2, &[as_elt(None, Some((i, a))), GradedVector::basis(m(j))])
                        .unwrap();
                    let want = if a == j {
                        GradedVector::single(m(i), Scalar::ratio(1, 2))
                    } else {
                        GradedVector::zero()
                    };
                    assert_eq!(got, want, "l~21(E[{i}{a}], m{j})");
                }
            }
        }
        // u-part of l~21 vanishes
        for b in 0..dim {
            for j in 0..dim {
                let got = tilde
                    .eval(2, &[as_elt(Some(b), None), GradedVector::basis(m(j))])
                    .unwrap();
                assert!(got.is_zero());
            }
        }
        // l~20(E_{ia}, u_b) = 1/2 E_{ia}(e_b) = 1/2 delta_{ab} x_i
        for i in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    let got = tilde
                        .eval(2, &[as_elt(None, Some((i, a))), as_elt(Some(b), None)])
                        .unwrap();
                    let want = if a == b {
                        GradedVector::single(x(i), Scalar::ratio(1, 2))
                    } else {
                        GradedVector::zero()
                    };
                    assert_eq!(got, want);
                }
            }
        }
        // l~20 on two matrices is the commutator
        for (i, a, j, b) in itertools::iproduct!(0..dim, 0..dim, 0..dim, 0..dim) {
            let got = tilde
                .eval(2, &[as_elt(None, Some((i, a))), as_elt(None, Some((j, b)))])
                .unwrap();
            // [E_{ia}, E_{jb}] = delta_{aj} E_{ib} - delta_{bi} E_{ja}
            let mut want = GradedVector::zero();
            if a == j {
                want.add_term(tensor(i, b), Scalar::one());
            }
            if b == i {
                want.add_term(tensor(j, a), -Scalar::one());
            }
            assert_eq!(got, want, "commutator on E[{i}{a}], E[{j}{b}]");
        }
        // l~3(u, A, B) = -1/4 ([A,B] u + 0 + 0) on (u, A, B) ordering
        // = -1/4 [A, B] u by the closed form with v, w matrix-only
        for (b0, i, a, j, bcol) in itertools::iproduct!(0..dim, 0..dim, 0..dim, 0..dim, 0..dim) {
            let got = tilde
                .eval(
                    3,
                    &[
                        as_elt(Some(b0), None),
                        as_elt(None, Some((i, a))),
                        as_elt(None, Some((j, bcol))),
                    ],
                )
                .unwrap();
            // closed form: -1/4 ([B,C] u) with B = E_{ia}, C = E_{j bcol}
            // acting on u = e_{b0}; output lands in g~_{-1} = m-labels
            let mut want = GradedVector::zero();
            if a == j && bcol == b0 {
                want.add_term(m(i), Scalar::ratio(-1, 4));
            }
            if bcol == i && a == b0 {
                want.add_term(m(j), Scalar::ratio(1, 4));
            }
            assert_eq!(got, want, "l~3(e{b0}, E[{i}{a}], E[{j}{bcol}])");
        }
    }
}

/// String type: l~1 = 0, l~21 = 0,
/// l~20(u + xi, v + eta) = [u,v]_k + ad*_u eta - ad*_v xi,
/// l~3(u+xi, v+eta, w+zeta) = -1/2(<[u,v],zeta> + <[v,w],xi> + <[w,u],eta>).
#[test]
fn string_type_closed_forms() {
    for k in [
        LieAlgebra::solvable2(),
        LieAlgebra::heisenberg3(),
        LieAlgebra::sl2(),
    ] {
        let g = string_type(&k).unwrap();
        let tilde = new_two_term(&g).unwrap();
        assert!(check_higher_jacobi(&tilde, 4).all_passed());
        let dim = k.dim;
        // in g~0 the dual part is m1 (x) x_a*; m1 = r-dual coefficient: the
        // tensor label uses the single m-label "r"
        let xi = |a: usize| format!("r:{}*", x(a));
        // l~1 = D = 0 (l1 = 0, l21 = 0)
        let got = tilde.eval_basis(1, &["r"]).unwrap();
        assert!(got.is_zero());
        // l~21 = 0
        for a in 0..dim {
            assert!(tilde.eval_basis(2, &[&x(a), "r"]).unwrap().is_zero());
            assert!(tilde.eval_basis(2, &[&xi(a), "r"]).unwrap().is_zero());
        }
        // l~20(u_a, u_b) = [e_a, e_b]_k (no l3 part: l3 = 0)
        for a in 0..dim {
            for b in 0..dim {
                let got = tilde.eval_basis(2, &[&x(a), &x(b)]).unwrap();
                let want = GradedVector::from_terms(
                    k.bracket_vec(a, b)
                        .into_iter()
                        .enumerate()
                        .map(|(i, c)| (x(i), c)),
                );
                assert_eq!(got, want);
            }
        }
        // l~20(u_a, xi_c) = ad*_{e_a} xi_c: <ad*_u eta, v> = -<eta, [u,v]>
        for a in 0..dim {
            for c in 0..dim {
                let got = tilde.eval_basis(2, &[&x(a), &xi(c)]).unwrap();
                let mut want = GradedVector::zero();
                for b in 0..dim {
                    let coeff = -k.bracket_vec(a, b)[c].clone();
                    want.add_term(xi(b), coeff);
                }
                assert_eq!(got, want, "ad* on ({a}, {c})");
            }
        }
        // l~20(xi, eta) = 0
        for c in 0..dim {
            for d in 0..dim {
                assert!(tilde.eval_basis(2, &[&xi(c), &xi(d)]).unwrap().is_zero());
            }
        }
        // l~3(u_a, u_b, zeta_c) = -1/2 <[e_a, e_b], zeta_c>
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let got = tilde.eval_basis(3, &[&x(a), &x(b), &xi(c)]).unwrap();
                    let coeff = k.bracket_vec(a, b)[c].clone() * Scalar::ratio(-1, 2);
                    let want = GradedVector::single("r", coeff);
                    assert_eq!(got, want);
                }
            }
        }
        // l~3 on three x's or with two duals vanishes
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    assert!(tilde
                        .eval_basis(3, &[&x(a), &x(b), &x(c)])
                        .unwrap()
                        .is_zero());
                    assert!(tilde
                        .eval_basis(3, &[&x(a), &xi(b), &xi(c)])
                        .unwrap()
                        .is_zero());
                }
            }
        }
    }
}

/// Quadratic string on sl2: l~20 gains the K([u,v], .) dual term and l~3
/// the -1/2 K([u,v], w) scalar term.
#[test]
fn quadratic_string_closed_forms() {
    let k = LieAlgebra::sl2();
    let form = sl2_invariant_form();
    let g = quadratic_string(&k, &form).unwrap();
    let tilde = new_two_term(&g).unwrap();
    assert!(check_higher_jacobi(&tilde, 4).all_passed());
    let dim = k.dim;
    let xi = |a: usize| format!("r:{}*", x(a));
    let pair_k = |u: &[Scalar], col: usize| -> Scalar {
        u.iter().enumerate().fold(Scalar::zero(), |acc, (i, c)| {
            acc + c.clone() * form[i][col].clone()
        })
    };
    // l~20(u_a, u_b) = [e_a,e_b] + K([e_a,e_b], .)
    for a in 0..dim {
        for b in 0..dim {
            let got = tilde.eval_basis(2, &[&x(a), &x(b)]).unwrap();
            let br = k.bracket_vec(a, b);
            let mut want =
                GradedVector::from_terms(br.iter().cloned().enumerate().map(|(i, c)| (x(i), c)));
            for c in 0..dim {
                want.add_term(xi(c), pair_k(&br, c));
            }
            assert_eq!(got, want, "({a},{b})");
        }
    }
    // l~3(u_a,u_b,u_c) = -1/2 K([e_a,e_b], e_c)
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let got = tilde.eval_basis(3, &[&x(a), &x(b), &x(c)]).unwrap();
                let want = GradedVector::single(
                    "r",
                    pair_k(&k.bracket_vec(a, b), c) * Scalar::ratio(-1, 2),
                );
                assert_eq!(got, want);
            }
        }
    }
    // mixed slot: -1/2 <[u,v], zeta> as in the string case
    let got = tilde.eval_basis(3, &[&x(0), &x(1), &xi(1)]).unwrap();
    // [h, e] = 2e: <2e, e-dual> = 2
    assert_eq!(got, GradedVector::single("r", Scalar::from_int(-1)));
}

/// The adjoint deformation (k -Id-> k, l2 = [.,.]): the published table.
#[test]
fn adjoint_identity_closed_forms() {
    let k = LieAlgebra::solvable2();
    let g = adjoint_identity(&k).unwrap();
    let tilde = new_two_term(&g).unwrap();
    assert!(check_higher_jacobi(&tilde, 4).all_passed());
    let dim = k.dim;

    let bracket_vecs = |u: &GradedVector, v: &GradedVector| -> GradedVector {
        // [u, v]_k on x-labels
        let mut out = GradedVector::zero();
        for a in 0..dim {
            for b in 0..dim {
                let c = u.coeff(&x(a)) * v.coeff(&x(b));
                if c.is_zero() {
                    continue;
                }
                for (i, w) in k.bracket_vec(a, b).into_iter().enumerate() {
                    out.add_term(x(i), w * c.clone());
                }
            }
        }
        out
    };

    // l~1(m_j) = m_j - ad_{m_j}: x_j minus the adjoint matrix
    for j in 0..dim {
        let got = tilde.eval_basis(1, &[&m(j)]).unwrap();
        let mut want = GradedVector::basis(x(j));
        for a in 0..dim {
            // -ad_{e_j}(e_a) = -[e_j, e_a]: coefficient of m_i at tensor(i, a)
            for (i, c) in k.bracket_vec(j, a).into_iter().enumerate() {
                want.add_term(tensor(i, a), -c);
            }
        }
        assert_eq!(got, want, "D m{j}");
    }

    // l~21(u + A, m) = 1/2 [u, m] + 1/2 A m
    for a in 0..dim {
        for j in 0..dim {
            let got = tilde.eval_basis(2, &[&x(a), &m(j)]).unwrap();
            let mut want = GradedVector::zero();
            for (i, c) in k.bracket_vec(a, j).into_iter().enumerate() {
                want.add_term(m(i), c * Scalar::ratio(1, 2));
            }
            assert_eq!(got, want, "l~21(x{a}, m{j})");
        }
    }
    for (i, a, j) in itertools::iproduct!(0..dim, 0..dim, 0..dim) {
        let got = tilde.eval_basis(2, &[&tensor(i, a), &m(j)]).unwrap();
        let want = if a == j {
            GradedVector::single(m(i), Scalar::ratio(1, 2))
        } else {
            GradedVector::zero()
        };
        assert_eq!(got, want);
    }

    // l~20(u, v) = [u,v] + ad-correction terms; checked against the
    // published form via random combinations evaluated both ways
    // l~20(u_a, v_b) = [u_a, v_b]_k (x-part) + [ad_{u_a}, .]-terms vanish on
    // pure vectors except the l3-free table: here we check the displayed
    // pure-vector case: l~20(x_a, x_b) = [e_a,e_b] + l3(x_a,x_b,.) with
    // l3 = 0, plus the Example's extra terms arise only with matrix parts.
    for a in 0..dim {
        for b in 0..dim {
            let got = tilde.eval_basis(2, &[&x(a), &x(b)]).unwrap();
            let want = bracket_vecs(&GradedVector::basis(x(a)), &GradedVector::basis(x(b)));
            assert_eq!(got, want);
        }
    }
    // matrix-vector case: l~20(E_{ia}, v_b) per the example:
    // 1/2 (A v - 0) + [A, ad_v] + 1/2 ad_{A v}... collect from the display:
    // terms with u = 0, B = 0: 1/2 A v + [A, ad_v] - 1/2 ad_{A v}
    for (i, a, b) in itertools::iproduct!(0..dim, 0..dim, 0..dim) {
        let got = tilde
            .eval(
                2,
                &[GradedVector::basis(tensor(i, a)), GradedVector::basis(x(b))],
            )
            .unwrap();
        let mut want = GradedVector::zero();
        // 1/2 A v: A = E_{ia}: A(e_b) = delta_{ab} e_i
        if a == b {
            want.add_term(x(i), Scalar::ratio(1, 2));
        }
        // [A, ad_v](e_c) = A [e_b, e_c]... compute matrix entries:
        // ([E_{ia}, ad_b])(e_c) = E_{ia}([e_b, e_c]) - [e_b, E_{ia}(e_c)]
        for c in 0..dim {
            // E_{ia}([e_b, e_c]) = <[e_b,e_c], a-coeff> e_i
            let coeff = k.bracket_vec(b, c)[a].clone();
            want.add_term(tensor(i, c), coeff);
            // -[e_b, E_{ia}(e_c)] = -delta_{ac} [e_b, e_i]
            if a == c {
                for (w, cc) in k.bracket_vec(b, i).into_iter().enumerate() {
                    want.add_term(tensor(w, c), -cc);
                }
            }
        }
        // -1/2 ad_{A v}: A v = delta_{ab} e_i: -1/2 ad_{e_i} when a == b
        if a == b {
            for c in 0..dim {
                for (w, cc) in k.bracket_vec(i, c).into_iter().enumerate() {
                    want.add_term(tensor(w, c), cc * Scalar::ratio(-1, 2));
                }
            }
        }
        assert_eq!(got, want, "l~20(E[{i}{a}], x{b})");
    }
}

#[test]
fn canonical_morphism_passes_on_registry() {
    for g in verified_2term_registry() {
        let tilde = new_two_term(&g).unwrap();
        let f = canonical_morphism(&g).unwrap();
        let report = verify_morphism(&f, &tilde, &g).unwrap();
        assert!(
            report.all_passed(),
            "morphism fails on {}:\n{report}",
            g.name.clone().unwrap_or_default()
        );
    }
}

#[test]
fn scaled_f2_breaks_condition_ii() {
    // F2 scaled by 2 on the omni-Lie instance: condition (ii) must fail
    let g = shift_identity(2);
    let tilde = new_two_term(&g).unwrap();
    let mut f = canonical_morphism(&g).unwrap();
    // rebuild with doubled F2
    let f2_doubled: Vec<(String, String, GradedVector)> = {
        let probe = canonical_morphism(&g).unwrap();
        let mut v = Vec::new();
        for a in tilde.space.basis_of_degree(0) {
            for b in tilde.space.basis_of_degree(0) {
                if a < b {
                    let val = probe.apply_f2(&GradedVector::basis(a), &GradedVector::basis(b));
                    if !val.is_zero() {
                        v.push((a.to_string(), b.to_string(), val));
                    }
                }
            }
        }
        v
    };
    for (a, b, val) in f2_doubled {
        f.set_f2(&a, &b, val); // doubles the stored value
    }
    let report = verify_morphism(&f, &tilde, &g).unwrap();
    assert!(!report.all_passed());
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.status == linfty_core::report::CheckStatus::Fail)
        .map(|c| c.name.as_str())
        .collect();
    assert!(failed.iter().any(|n| n.contains("(ii)")), "{failed:?}");
}

#[test]
fn f2_mixed_pair_value() {
    // F2(x, eta (x) n) with <x, eta> = 1 gives -1/2 n
    let g = shift_identity(2);
    let f = canonical_morphism(&g).unwrap();
    let got = f.apply_f2(
        &GradedVector::basis(x(0)),
        &GradedVector::basis(tensor(1, 0)),
    );
    assert_eq!(got, GradedVector::single(m(1), Scalar::ratio(-1, 2)));
}

/// The full-signs instance: tilde of the dim-2 omni-Lie input has all of
/// l~1, l~2, l~3 nonzero and must itself produce a verified Courant
/// algebroid and morphism.
#[test]
fn iterated_construction_on_omni2() {
    let g = shift_identity(2);
    let tilde = new_two_term(&g).unwrap();
    assert!(tilde.maps().any(|(k, m)| *k == 3 && !m.is_zero()));
    let f = canonical_morphism(&tilde).unwrap();
    let tilde2 = new_two_term(&tilde).unwrap();
    let report = verify_morphism(&f, &tilde2, &tilde).unwrap();
    assert!(report.all_passed(), "{report}");
}

#[test]
fn perturbed_l3_localizes_in_master_equation() {
    // the arity-3 component 1/2{l2,l2} + {l1,l3} is the one that breaks
    use linfty_core::linfty::{check_master_equation, hamiltonian_encode};
    let mut g = adjoint_identity(&LieAlgebra::heisenberg3()).unwrap();
    assert!(check_higher_jacobi(&g, 4).all_passed());
    g.set_constant(
        3,
        &["x1", "x2", "x3"],
        GradedVector::single("m1", Scalar::one()),
    )
    .unwrap();
    let enc = hamiltonian_encode(&g).unwrap();
    let report = check_master_equation(&enc.hamiltonian, &enc.chart);
    assert!(!report.all_passed());
    let failing: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.status == linfty_core::report::CheckStatus::Fail)
        .map(|c| c.name.as_str())
        .collect();
    assert!(
        failing
            .iter()
            .any(|n| n.contains("{l_1,l_3}") && n.contains("1/2{l_2,l_2}")),
        "{failing:?}"
    );
}

/// T on three degree-0 constants is 1/2 l3(x,y,z) as a linear function, so
/// the function-section l3 = -T matches the -1/2 l3 coefficient of the
/// published tilde formulas.
#[test]
fn t_fn_on_constants_is_half_l3() {
    use linfty_core::sections::Section;
    let g = quadratic_string(&LieAlgebra::sl2(), &sl2_invariant_form()).unwrap();
    let cd = courant_from_2term(&g).unwrap();
    for a in 0..3usize {
        for b in 0..3 {
            for c in 0..3 {
                let t = cd.t_fn(
                    &Section::generator(a),
                    &Section::generator(b),
                    &Section::generator(c),
                );
                let l3 = g.eval_basis(3, &[&x(a), &x(b), &x(c)]).unwrap().coeff("r");
                let mut want = BasePoly::zero();
                if !l3.is_zero() {
                    want.add_term(vec![(0, 1)], l3 * Scalar::ratio(1, 2));
                }
                assert_eq!(t, want, "T({a},{b},{c})");
            }
        }
    }
}

#[test]
fn string_type_dorfman_table() {
    // x . y = [x, y]_k + K-term when l3 is present (quadratic string)
    let k = LieAlgebra::sl2();
    let form = sl2_invariant_form();
    let g = quadratic_string(&k, &form).unwrap();
    let cd = courant_from_2term(&g).unwrap();
    use linfty_core::sections::Section;
    // h . e = [h, e] + l3(h, e, .): generators 0 = h, 1 = e, 2 = f
    let he = cd.dorfman(&Section::generator(0), &Section::generator(1));
    // [h,e] = 2e; l3(h,e,.) = K([h,e], .) r = 2 K(e, .) r: K(e, f) = 1 so
    // the dual part is 2 r (x) f*: coefficient of generator f* is linear (r)
    let mut want = Section::generator(1).scale(&Scalar::from_int(2));
    // generator index of f* is num_x + 2
    want.add_to(
        cd.num_x() + 2,
        &BasePoly::var(0).scale(&Scalar::from_int(2)),
    );
    assert_eq!(he, want);
}
