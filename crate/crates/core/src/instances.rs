//! Named structures used across the verification suites: shifted identity
//! complexes, string-type algebras, quadratic strings, and small Lie
//! algebras over the rationals.

use crate::error::GradedError;
use crate::graded::{GradedSpace, GradedVector};
use crate::linfty::LInftyStructure;
use crate::scalar::Scalar;

/// A Lie algebra by structure constants: `bracket[i][j]` is `[e_i, e_j]` for
/// `i < j` as coefficient vectors.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub dim: usize,
    pub brackets: Vec<(usize, usize, Vec<Scalar>)>,
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra {
            dim,
            brackets: Vec::new(),
        }
    }

    /// `[e1, e2] = e2`, the 2-dimensional solvable algebra.
    pub fn solvable2() -> Self {
        LieAlgebra {
            dim: 2,
            brackets: vec![(0, 1, vec![Scalar::zero(), Scalar::one()])],
        }
    }

    /// The 3-dimensional Heisenberg algebra `[e1, e2] = e3`.
    pub fn heisenberg3() -> Self {
        LieAlgebra {
            dim: 3,
            brackets: vec![(0, 1, vec![Scalar::zero(), Scalar::zero(), Scalar::one()])],
        }
    }

    /// `sl_2` with basis `(h, e, f)`: `[h,e] = 2e`, `[h,f] = -2f`,
    /// `[e,f] = h`.
    pub fn sl2() -> Self {
        let z = Scalar::zero;
        LieAlgebra {
            dim: 3,
            brackets: vec![
                (0, 1, vec![z(), Scalar::from_int(2), z()]),
                (0, 2, vec![z(), z(), Scalar::from_int(-2)]),
                (1, 2, vec![Scalar::one(), z(), z()]),
            ],
        }
    }

    pub fn bracket_vec(&self, i: usize, j: usize) -> Vec<Scalar> {
        if i == j {
            return vec![Scalar::zero(); self.dim];
        }
        for (a, b, v) in &self.brackets {
            if (*a, *b) == (i, j) {
                return v.clone();
            }
            if (*a, *b) == (j, i) {
                return v.iter().map(|c| -c.clone()).collect();
            }
        }
        vec![Scalar::zero(); self.dim]
    }
}

/// An invariant symmetric form on `sl2` (half the Killing form up to
/// scale): `K(h,h) = 2`, `K(e,f) = 1`.
pub fn sl2_invariant_form() -> Vec<Vec<Scalar>> {
    let z = Scalar::zero;
    vec![
        vec![Scalar::from_int(2), z(), z()],
        vec![z(), z(), Scalar::one()],
        vec![z(), Scalar::one(), z()],
    ]
}

fn x(i: usize) -> String {
    format!("x{}", i + 1)
}

fn m(i: usize) -> String {
    format!("m{}", i + 1)
}

/// The abelian 2-term structure with the given dimensions and no maps.
pub fn abelian_2term(dim0: usize, dim1: usize) -> LInftyStructure {
    let space = GradedSpace::new(vec![
        (0, (0..dim0).map(x).collect()),
        (-1, (0..dim1).map(m).collect()),
    ])
    .unwrap();
    LInftyStructure::new(space).named(format!("abelian({dim0},{dim1})"))
}

/// `(V -Id-> V, l2 = 0, l3 = 0)`: the input of the omni-Lie construction.
pub fn shift_identity(dim: usize) -> LInftyStructure {
    let space = GradedSpace::new(vec![
        (0, (0..dim).map(x).collect()),
        (-1, (0..dim).map(m).collect()),
    ])
    .unwrap();
    let mut s = LInftyStructure::new(space).named(format!("identity({dim})"));
    for i in 0..dim {
        s.set_constant(1, &[&m(i)], GradedVector::basis(x(i)))
            .unwrap();
    }
    s
}

/// `(R -0-> k, l2 = [.,.]_k, l3 = 0)`: the string-type input.
pub fn string_type(k: &LieAlgebra) -> Result<LInftyStructure, GradedError> {
    let space = GradedSpace::new(vec![
        (0, (0..k.dim).map(x).collect()),
        (-1, vec!["r".into()]),
    ])?;
    let mut s = LInftyStructure::new(space).named(format!("string(dim {})", k.dim));
    set_l2_from_lie(&mut s, k)?;
    Ok(s)
}

/// `(R -0-> k, l2 = [.,.]_k, l3 = K([.,.]_k, .))` for a quadratic Lie
/// algebra: the quadratic-string input.
pub fn quadratic_string(
    k: &LieAlgebra,
    form: &[Vec<Scalar>],
) -> Result<LInftyStructure, GradedError> {
    let mut s = string_type(k)?;
    s.name = Some(format!("quadratic-string(dim {})", k.dim));
    for i in 0..k.dim {
        for j in i + 1..k.dim {
            for l in 0..k.dim {
                if l == i || l == j {
                    continue;
                }
                // l3(e_i, e_j, e_l) = K([e_i, e_j], e_l) * r
                let bij = k.bracket_vec(i, j);
                let mut val = Scalar::zero();
                for (a, c) in bij.iter().enumerate() {
                    val += c.clone() * form[a][l].clone();
                }
                if i < j && j < l {
                    s.set_constant(3, &[&x(i), &x(j), &x(l)], GradedVector::single("r", val))?;
                }
            }
        }
    }
    Ok(s)
}

/// `(k -Id-> k, l2 = [.,.]_k adjoint on both layers, l3 = 0)`: the
/// deformation of the omni-Lie input.
pub fn adjoint_identity(k: &LieAlgebra) -> Result<LInftyStructure, GradedError> {
    let space = GradedSpace::new(vec![
        (0, (0..k.dim).map(x).collect()),
        (-1, (0..k.dim).map(m).collect()),
    ])?;
    let mut s = LInftyStructure::new(space).named(format!("adjoint-identity(dim {})", k.dim));
    for i in 0..k.dim {
        s.set_constant(1, &[&m(i)], GradedVector::basis(x(i)))?;
    }
    set_l2_from_lie(&mut s, k)?;
    // l2(x_i, m_j) = [e_i, e_j] in the m-layer
    for i in 0..k.dim {
        for j in 0..k.dim {
            let v = k.bracket_vec(i, j);
            let out = GradedVector::from_terms(v.into_iter().enumerate().map(|(a, c)| (m(a), c)));
            if !out.is_zero() {
                s.set_constant(2, &[&x(i), &m(j)], out)?;
            }
        }
    }
    Ok(s)
}

fn set_l2_from_lie(s: &mut LInftyStructure, k: &LieAlgebra) -> Result<(), GradedError> {
    for (i, j, v) in &k.brackets {
        let out = GradedVector::from_terms(v.iter().enumerate().map(|(a, c)| (x(a), c.clone())));
        if !out.is_zero() {
            s.set_constant(2, &[&x(*i), &x(*j)], out)?;
        }
    }
    Ok(())
}

/// The registry of verified 2-term instances used by the suites, keyed by
/// name. All of them pass the higher Jacobi checks (asserted in tests).
pub fn verified_2term_registry() -> Vec<LInftyStructure> {
    vec![
        abelian_2term(1, 1),
        abelian_2term(2, 1),
        shift_identity(1),
        shift_identity(2),
        string_type(&LieAlgebra::solvable2()).unwrap(),
        string_type(&LieAlgebra::heisenberg3()).unwrap(),
        quadratic_string(&LieAlgebra::sl2(), &sl2_invariant_form()).unwrap(),
        adjoint_identity(&LieAlgebra::solvable2()).unwrap(),
    ]
}

/// The subset of the registry with total dimension at most `cap`.
pub fn verified_2term_up_to_dim(cap: usize) -> Vec<LInftyStructure> {
    verified_2term_registry()
        .into_iter()
        .filter(|s| s.space.total_dim() <= cap)
        .collect()
}
