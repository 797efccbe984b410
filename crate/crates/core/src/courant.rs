//! The Courant algebroid `E = g_{-1}* x (g_0* + g_0) -> g_{-1}*` of a
//! 2-term structure, on the polynomial-section model: anchors, the Dorfman
//! and skew brackets, `D`, `T`, the axiom verifier, the induced 2-term
//! structure on functions and sections, the new 2-term structure on
//! `g_0 + (g_{-1} (x) g_0*)`, and the canonical homomorphism back to `g`.
//!
//! Generators split as constant sections of `g_0` (named after the `g_0`
//! basis) and of `g_0*` (dual labels); coefficients are polynomials on the
//! base `g_{-1}*`, whose linear functions are the `g_{-1}` basis.

use itertools::Itertools;

use crate::base_poly::{monomials_up_to, BasePoly};
use crate::error::GradedError;
use crate::graded::{GradedSpace, GradedVector};
use crate::linfty::{
    hamiltonian_encode_ordered, LInftyOps, LInftyStructure, TupleOrder, TwoTermMorphism,
};
use crate::poly::{big_bracket, GradedPolynomial, ShiftedCotangentChart};
use crate::report::VerificationReport;
use crate::scalar::Scalar;
use crate::sections::Section;

/// Generator indices: `0..nx` are the `g_0` basis, `nx..nx+nx0` the `g_0*`
/// basis (in the canonical order of the underlying space).
#[derive(Clone, Debug)]
pub struct CourantData {
    g: LInftyStructure,
    x_labels: Vec<String>,
    m_labels: Vec<String>,
    /// `anchor[u][i] = rho(u)(m_i)` as a polynomial on the base.
    anchor: Vec<Vec<BasePoly>>,
    /// `dorfman_gens[u][v] = u . v` for constant generators.
    dorfman_gens: Vec<Vec<Section>>,
    /// `d_of_m[i] = D(m_i)`.
    d_of_m: Vec<Section>,
    /// The derived-bracket Hamiltonian is `hamiltonian_sign * sum l_i`.
    pub hamiltonian_sign: Scalar,
}

impl CourantData {
    pub fn input(&self) -> &LInftyStructure {
        &self.g
    }

    pub fn num_x(&self) -> usize {
        self.x_labels.len()
    }

    pub fn num_generators(&self) -> usize {
        2 * self.x_labels.len()
    }

    pub fn base_dim(&self) -> usize {
        self.m_labels.len()
    }

    pub fn generator_name(&self, u: usize) -> String {
        if u < self.num_x() {
            self.x_labels[u].clone()
        } else {
            format!("{}*", self.x_labels[u - self.num_x()])
        }
    }

    pub fn base_name(&self, i: usize) -> String {
        self.m_labels[i].clone()
    }

    fn describe_section(&self, s: &Section) -> String {
        s.display(&|u| self.generator_name(u), &|i| self.base_name(i))
    }

    /// The anchor applied to a base function.
    pub fn rho(&self, e: &Section, f: &BasePoly) -> BasePoly {
        let mut out = BasePoly::zero();
        for (u, coeff) in e.comps() {
            for i in 0..self.base_dim() {
                let df = f.partial(i);
                if df.is_zero() {
                    continue;
                }
                out = out.add(&coeff.mul(&self.anchor[*u][i]).mul(&df));
            }
        }
        out
    }

    /// The fiber metric `<x + xi, y + eta> = <xi, y> + <x, eta>`.
    pub fn pairing(&self, e1: &Section, e2: &Section) -> BasePoly {
        let nx = self.num_x();
        let mut out = BasePoly::zero();
        for (u, f) in e1.comps() {
            for (v, g) in e2.comps() {
                let paired =
                    *u < nx && *v >= nx && *v - nx == *u || *v < nx && *u >= nx && *u - nx == *v;
                if paired {
                    out = out.add(&f.mul(g));
                }
            }
        }
        out
    }

    /// `D f`, the section with `<e, Df> = rho(e) f`.
    pub fn d_op(&self, f: &BasePoly) -> Section {
        let mut out = Section::zero();
        for i in 0..self.base_dim() {
            let df = f.partial(i);
            if df.is_zero() {
                continue;
            }
            out = out.add(&self.d_of_m[i].mul_fn(&df));
        }
        out
    }

    /// The Dorfman bracket, extended from the generator table by
    /// `e . (g v) = g (e . v) + (rho(e) g) v` and
    /// `(f u) . e = f (u . e) - (rho(e) f) u + <u, e> D f`.
    pub fn dorfman(&self, e1: &Section, e2: &Section) -> Section {
        let nx = self.num_x();
        let mut out = Section::zero();
        for (u, f) in e1.comps() {
            for (v, g) in e2.comps() {
                // f g (u . v)
                out = out.add(&self.dorfman_gens[*u][*v].mul_fn(&f.mul(g)));
                // f (rho(u) g) v
                let ug = self.rho(&Section::generator(*u), g);
                out = out.add(&Section::term(*v, f.mul(&ug)));
                // - g (rho(v) f) u
                let vf = self.rho(&Section::generator(*v), f);
                out = out.add(&Section::term(*u, g.mul(&vf).neg()));
                // <u, v> g D f
                let uv_paired = (*u < nx) != (*v < nx) && (*u % nx) == (*v % nx);
                if uv_paired {
                    out = out.add(&self.d_op(f).mul_fn(g));
                }
            }
        }
        out
    }

    /// The skew-symmetric Courant bracket `[[e1, e2]] = 1/2 (e1 . e2 - e2 .
    /// e1)`.
    pub fn courant(&self, e1: &Section, e2: &Section) -> Section {
        let half = Scalar::ratio(1, 2);
        self.dorfman(e1, e2).sub(&self.dorfman(e2, e1)).scale(&half)
    }

    /// `T(e1,e2,e3) = 1/6 <[[e1,e2]], e3> + c.p.`.
    pub fn t_fn(&self, e1: &Section, e2: &Section, e3: &Section) -> BasePoly {
        let sixth = Scalar::ratio(1, 6);
        let mut out = self.pairing(&self.courant(e1, e2), e3);
        out = out.add(&self.pairing(&self.courant(e2, e3), e1));
        out = out.add(&self.pairing(&self.courant(e3, e1), e2));
        out.scale(&sixth)
    }
}

fn two_term_labels(g: &LInftyStructure) -> Result<(Vec<String>, Vec<String>), GradedError> {
    if !g.is_n_term(2) {
        return Err(GradedError::WrongTermCount(2));
    }
    Ok((
        g.space
            .basis_of_degree(0)
            .into_iter()
            .map(String::from)
            .collect(),
        g.space
            .basis_of_degree(-1)
            .into_iter()
            .map(String::from)
            .collect(),
    ))
}

/// Builds the Courant data of a verified 2-term structure from the
/// structure constants:
/// `rho(x)(m) = l21(x, m)`, `rho(xi) = -l1*(xi)`,
/// `D m = l1(m) - l21(m, .)`, `x . y = l20(x, y) + l3(x, y, .)`,
/// `xi . eta = 0`, `x . xi = -xi . x = l20(x, .)* xi`.
pub fn courant_from_2term(g: &LInftyStructure) -> Result<CourantData, GradedError> {
    let (x_labels, m_labels) = two_term_labels(g)?;
    let nx = x_labels.len();
    let nm = m_labels.len();
    // reads l_k values as coefficient tables
    let coeff_on = |v: &GradedVector, labels: &[String]| -> Vec<Scalar> {
        labels.iter().map(|l| v.coeff(l)).collect()
    };
    let to_linear = |v: &GradedVector| -> BasePoly {
        // an element of g_{-1} as a linear function on the base
        let mut p = BasePoly::zero();
        for (i, l) in m_labels.iter().enumerate() {
            let c = v.coeff(l);
            if !c.is_zero() {
                p.add_term(vec![(i, 1)], c);
            }
        }
        p
    };

    // anchors
    let mut anchor = vec![vec![BasePoly::zero(); nm]; 2 * nx];
    for (a, xl) in x_labels.iter().enumerate() {
        for (i, ml) in m_labels.iter().enumerate() {
            // rho(x_a)(m_i) = l21(x_a, m_i), a linear function
            let v = g.eval_basis(2, &[xl, ml])?;
            anchor[a][i] = to_linear(&v);
        }
    }
    for (c, _) in x_labels.iter().enumerate() {
        for (i, ml) in m_labels.iter().enumerate() {
            // rho(xi_c)(m_i) = <xi_c, l1(m_i)>, a constant
            let l1m = g.eval_basis(1, &[ml])?;
            let val = coeff_on(&l1m, &x_labels)[c].clone();
            anchor[nx + c][i] = BasePoly::constant(val);
        }
    }

    // D on linear functions: D m = l1(m) - l21(m, .)
    let mut d_of_m = Vec::with_capacity(nm);
    for ml in &m_labels {
        let mut s = Section::zero();
        let l1m = g.eval_basis(1, &[ml])?;
        for (a, c) in coeff_on(&l1m, &x_labels).into_iter().enumerate() {
            if !c.is_zero() {
                s.add_to(a, &BasePoly::constant(c));
            }
        }
        for (a, xl) in x_labels.iter().enumerate() {
            // -l21(m, x_a) = +l21(x_a, m)
            let v = g.eval_basis(2, &[xl, ml])?;
            s.add_to(nx + a, &to_linear(&v));
        }
        d_of_m.push(s);
    }

    // generator Dorfman table
    let mut dorfman_gens = vec![vec![Section::zero(); 2 * nx]; 2 * nx];
    for (a, xa) in x_labels.iter().enumerate() {
        for (b, xb) in x_labels.iter().enumerate() {
            let mut s = Section::zero();
            let l20 = g.eval_basis(2, &[xa, xb])?;
            for (c, coeff) in coeff_on(&l20, &x_labels).into_iter().enumerate() {
                if !coeff.is_zero() {
                    s.add_to(c, &BasePoly::constant(coeff));
                }
            }
            // l3(x_a, x_b, .) lands in the xi-part with linear coefficients
            for (c, xc) in x_labels.iter().enumerate() {
                let v = g.eval_basis(3, &[xa, xb, xc])?;
                s.add_to(nx + c, &to_linear(&v));
            }
            dorfman_gens[a][b] = s;
        }
    }
    for (a, xa) in x_labels.iter().enumerate() {
        for (c, _) in x_labels.iter().enumerate() {
            // x_a . xi_c = l20(x_a, .)* xi_c: <result, x_b> = -<xi_c,
            // l20(x_a, x_b)>
            let mut s = Section::zero();
            for (b, xb) in x_labels.iter().enumerate() {
                let l20 = g.eval_basis(2, &[xa, xb])?;
                let val = -l20.coeff(&x_labels[c]);
                if !val.is_zero() {
                    s.add_to(nx + b, &BasePoly::constant(val));
                }
            }
            dorfman_gens[a][nx + c] = s.clone();
            dorfman_gens[nx + c][a] = s.scale(&-Scalar::one());
        }
    }
    // xi . eta = 0 already

    Ok(CourantData {
        g: g.clone(),
        x_labels,
        m_labels,
        anchor,
        dorfman_gens,
        d_of_m,
        hamiltonian_sign: -Scalar::one(),
    })
}

/// Generator sections with monomial coefficients of degree at most `cap`.
pub fn generator_sections(cd: &CourantData, cap: u32) -> Vec<Section> {
    let monos = monomials_up_to(cd.base_dim(), cap);
    let mut out = Vec::new();
    for u in 0..cd.num_generators() {
        for m in &monos {
            out.push(Section::term(
                u,
                BasePoly::from_mono(m.clone(), Scalar::one()),
            ));
        }
    }
    out
}

/// The three Courant axioms plus the Jacobiator identity, checked on all
/// generator sections with coefficients of degree at most `degree_cap`.
pub fn verify_courant_axioms(cd: &CourantData, degree_cap: u32) -> VerificationReport {
    let mut report = VerificationReport::new();
    let gens = generator_sections(cd, degree_cap);

    // (C1) polarized: e1 . e2 + e2 . e1 = D <e1, e2>
    let mut w = Vec::new();
    for e1 in &gens {
        for e2 in &gens {
            let lhs = cd.dorfman(e1, e2).add(&cd.dorfman(e2, e1));
            let rhs = cd.d_op(&cd.pairing(e1, e2));
            if lhs != rhs {
                w.push(format!(
                    "({}; {})",
                    cd.describe_section(e1),
                    cd.describe_section(e2)
                ));
            }
        }
    }
    report.record("Courant axiom e.e = 1/2 D<e,e> (polarized)", w);

    // (C2) rho(e1)<e2,e3> = <e1.e2, e3> + <e2, e1.e3>
    let mut w = Vec::new();
    for e1 in &gens {
        for e2 in &gens {
            for e3 in &gens {
                let lhs = cd.rho(e1, &cd.pairing(e2, e3));
                let rhs = cd
                    .pairing(&cd.dorfman(e1, e2), e3)
                    .add(&cd.pairing(e2, &cd.dorfman(e1, e3)));
                if lhs != rhs {
                    w.push(format!(
                        "({}; {}; {})",
                        cd.describe_section(e1),
                        cd.describe_section(e2),
                        cd.describe_section(e3)
                    ));
                }
            }
        }
    }
    report.record("Courant axiom rho(e1)<e2,e3> = <e1.e2,e3> + <e2,e1.e3>", w);

    // (C3) e1 . (e2 . e3) = (e1 . e2) . e3 + e2 . (e1 . e3)
    let mut w = Vec::new();
    for e1 in &gens {
        for e2 in &gens {
            for e3 in &gens {
                let lhs = cd.dorfman(e1, &cd.dorfman(e2, e3));
                let rhs = cd
                    .dorfman(&cd.dorfman(e1, e2), e3)
                    .add(&cd.dorfman(e2, &cd.dorfman(e1, e3)));
                if lhs != rhs {
                    w.push(format!(
                        "({}; {}; {})",
                        cd.describe_section(e1),
                        cd.describe_section(e2),
                        cd.describe_section(e3)
                    ));
                }
            }
        }
    }
    report.record(
        "Courant axiom (Leibniz) e1.(e2.e3) = (e1.e2).e3 + e2.(e1.e3)",
        w,
    );

    // Jacobiator: [[[[e1,e2]],e3]] + c.p. = D T(e1,e2,e3)
    let mut w = Vec::new();
    for e1 in &gens {
        for e2 in &gens {
            for e3 in &gens {
                let mut lhs = cd.courant(&cd.courant(e1, e2), e3);
                lhs = lhs.add(&cd.courant(&cd.courant(e2, e3), e1));
                lhs = lhs.add(&cd.courant(&cd.courant(e3, e1), e2));
                let rhs = cd.d_op(&cd.t_fn(e1, e2, e3));
                if lhs != rhs {
                    w.push(format!(
                        "({}; {}; {})",
                        cd.describe_section(e1),
                        cd.describe_section(e2),
                        cd.describe_section(e3)
                    ));
                }
            }
        }
    }
    report.record("Jacobiator [[[[e1,e2]],e3]] + c.p. = D T(e1,e2,e3)", w);

    // D-anchor compatibility: <e, Df> = rho(e) f on generators and linear f
    let mut w = Vec::new();
    for e in &gens {
        for i in 0..cd.base_dim() {
            let f = BasePoly::var(i);
            if cd.pairing(e, &cd.d_op(&f)) != cd.rho(e, &f) {
                w.push(format!("({}; {})", cd.describe_section(e), cd.base_name(i)));
            }
        }
    }
    report.record("<e, Df> = rho(e) f", w);

    report
}

/// The section-level 2-term structure of a Courant algebroid on
/// `C(M) + Gamma(E)`: `l1 = D`, `l2 = [[.,.]]` / `1/2<e, Df>`, `l3 = -T`.
pub struct CourantTwoTerm<'a> {
    pub cd: &'a CourantData,
}

/// An element of the function-section complex: degree -1 functions or
/// degree 0 sections.
#[derive(Clone, Debug, PartialEq)]
pub enum FnOrSection {
    Fun(BasePoly),
    Sec(Section),
}

impl FnOrSection {
    pub fn degree(&self) -> i64 {
        match self {
            FnOrSection::Fun(_) => -1,
            FnOrSection::Sec(_) => 0,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            FnOrSection::Fun(f) => f.is_zero(),
            FnOrSection::Sec(s) => s.is_zero(),
        }
    }
}

impl LInftyOps for CourantTwoTerm<'_> {
    type Elt = FnOrSection;

    fn zero_elt(&self) -> FnOrSection {
        FnOrSection::Fun(BasePoly::zero())
    }

    fn is_zero_elt(&self, e: &FnOrSection) -> bool {
        e.is_zero()
    }

    fn add_scaled(&self, acc: FnOrSection, e: &FnOrSection, c: &Scalar) -> FnOrSection {
        match (&acc, e) {
            (_, z) if z.is_zero() => acc,
            (z, _) if z.is_zero() => match e {
                FnOrSection::Fun(f) => FnOrSection::Fun(f.scale(c)),
                FnOrSection::Sec(s) => FnOrSection::Sec(s.scale(c)),
            },
            (FnOrSection::Fun(a), FnOrSection::Fun(b)) => FnOrSection::Fun(a.add(&b.scale(c))),
            (FnOrSection::Sec(a), FnOrSection::Sec(b)) => FnOrSection::Sec(a.add(&b.scale(c))),
            _ => unreachable!("mixed degrees cannot combine in a homogeneous residual"),
        }
    }

    fn bracket(&self, arity: usize, args: &[FnOrSection]) -> FnOrSection {
        use FnOrSection::{Fun, Sec};
        let cd = self.cd;
        match (arity, args) {
            (1, [Fun(f)]) => Sec(cd.d_op(f)),
            (1, [Sec(_)]) => Fun(BasePoly::zero()),
            (2, [Sec(e1), Sec(e2)]) => Sec(cd.courant(e1, e2)),
            (2, [Sec(e), Fun(f)]) => Fun(cd.pairing(e, &cd.d_op(f)).scale(&Scalar::ratio(1, 2))),
            (2, [Fun(f), Sec(e)]) => {
                // l2(f, e) = -l2(e, f): degree (-1, 0) pair
                Fun(cd.pairing(e, &cd.d_op(f)).scale(&Scalar::ratio(-1, 2)))
            }
            (2, [Fun(_), Fun(_)]) => self.zero_elt(),
            (3, [Sec(e1), Sec(e2), Sec(e3)]) => Fun(cd.t_fn(e1, e2, e3).neg()),
            (3, _) => self.zero_elt(),
            _ => self.zero_elt(),
        }
    }

    fn top_arity(&self) -> usize {
        3
    }

    fn describe(&self, e: &FnOrSection) -> String {
        match e {
            FnOrSection::Fun(f) => f.display(&|i| self.cd.base_name(i)),
            FnOrSection::Sec(s) => self.cd.describe_section(s),
        }
    }
}

/// Higher Jacobi on the function-section complex over generator elements
/// with coefficient degree at most `cap`, for `n <= n_max`.
pub fn verify_courant_two_term(cd: &CourantData, cap: u32, n_max: usize) -> VerificationReport {
    let ops = CourantTwoTerm { cd };
    let mut elements: Vec<FnOrSection> = Vec::new();
    for m in monomials_up_to(cd.base_dim(), cap) {
        if m.is_empty() {
            continue;
        }
        elements.push(FnOrSection::Fun(BasePoly::from_mono(m, Scalar::one())));
    }
    let sec_cap = cap.min(1);
    for s in generator_sections(cd, sec_cap) {
        elements.push(FnOrSection::Sec(s));
    }
    let mut report = VerificationReport::new();
    for n in 1..=n_max {
        let mut w = Vec::new();
        for tuple in (0..elements.len()).combinations_with_replacement(n) {
            // repeated functions (odd degree) are fine; repeated sections
            // (even degree) force zero
            if tuple
                .windows(2)
                .any(|t| t[0] == t[1] && matches!(elements[t[0]], FnOrSection::Sec(_)))
            {
                continue;
            }
            let elems: Vec<FnOrSection> = tuple.iter().map(|&i| elements[i].clone()).collect();
            let degrees: Vec<i64> = elems.iter().map(|e| e.degree()).collect();
            let residual = crate::linfty::higher_jacobi_residual(&ops, &elems, &degrees).unwrap();
            if !ops.is_zero_elt(&residual) {
                w.push(format!(
                    "({}) -> {}",
                    elems.iter().map(|e| ops.describe(e)).join("; "),
                    ops.describe(&residual)
                ));
            }
        }
        report.record(format!("function-section higher Jacobi n = {n}"), w);
    }
    report
}

/// The basis label of `m (x) x*`. The `x` part is parenthesized when it
/// already carries tensor syntax; trailing primes disambiguate collisions
/// when the construction is iterated.
pub fn tensor_label(m: &str, x: &str) -> String {
    if x.contains(':') || x.contains('*') {
        format!("{m}:({x})*")
    } else {
        format!("{m}:{x}*")
    }
}

/// Splits a `g~0` basis label into its `(m, x)` tensor parts; inverse of
/// [`tensor_label`] up to disambiguating primes.
pub fn split_tensor_label(label: &str) -> Option<(&str, &str)> {
    let label = label.trim_end_matches('\'');
    let (m, rest) = label.split_once(':')?;
    let xi = rest.strip_suffix('*')?;
    if let Some(inner) = xi.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        Some((m, inner))
    } else {
        Some((m, xi))
    }
}

/// The degree-0 labels of `g~`: the `g_0` basis followed by one label per
/// `(m, x)` tensor pair, deterministically disambiguated.
fn tilde_deg0_labels(
    x_labels: &[String],
    m_labels: &[String],
) -> (
    Vec<String>,
    std::collections::BTreeMap<(String, String), String>,
) {
    let mut used: std::collections::BTreeSet<String> = x_labels.iter().cloned().collect();
    for m in m_labels {
        used.insert(m.clone());
    }
    let mut labels: Vec<String> = x_labels.to_vec();
    let mut map = std::collections::BTreeMap::new();
    for ml in m_labels {
        for xl in x_labels {
            let mut l = tensor_label(ml, xl);
            while used.contains(&l) {
                l.push('\'');
            }
            used.insert(l.clone());
            labels.push(l.clone());
            map.insert((ml.clone(), xl.clone()), l);
        }
    }
    (labels, map)
}

/// The new 2-term structure `g~` on `g_0 + (g_{-1} (x) g_0*)` over
/// `g_{-1}`, built from the published closed forms for `D`, the skew
/// bracket, `l~21` and `l~3`.
pub fn new_two_term(g: &LInftyStructure) -> Result<LInftyStructure, GradedError> {
    let (x_labels, m_labels) = two_term_labels(g)?;
    let (deg0, tmap) = tilde_deg0_labels(&x_labels, &m_labels);
    let tensor_label = |m: &str, x: &str| -> String {
        tmap.get(&(m.to_string(), x.to_string()))
            .expect("tensor pair is in the label table")
            .clone()
    };
    let space = GradedSpace::new(vec![(0, deg0), (-1, m_labels.clone())])?;
    let mut out = LInftyStructure::new(space).named(format!(
        "tilde({})",
        g.name.clone().unwrap_or_else(|| "g".into())
    ));

    let pairing = |xi: &str, x: &str| -> Scalar {
        // <xi, x> for xi the dual of some x-label
        if xi == x {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    };
    // D m = l1(m) - l21(m, .), an element of g0 + (g_{-1} (x) g0*)
    let d_of = |ml: &str| -> Result<GradedVector, GradedError> {
        let mut v = g.eval_basis(1, &[ml])?;
        for xl in &x_labels {
            // -l21(m, x) = +l21(x, m), an element of g_{-1}
            let w = g.eval_basis(2, &[xl, ml])?;
            for (nl, c) in w.entries() {
                v.add_term(tensor_label(nl, xl), c.clone());
            }
        }
        Ok(v)
    };
    for ml in &m_labels {
        let v = d_of(ml)?;
        if !v.is_zero() {
            out.set_constant(1, &[ml], v)?;
        }
    }

    // l~20 on the three generator patterns of the skew bracket table.
    // (x, y): l20(x, y) + l3(x, y, .)
    for xa in &x_labels {
        for xb in &x_labels {
            if xb <= xa {
                continue;
            }
            let mut v = g.eval_basis(2, &[xa, xb])?;
            for xc in &x_labels {
                let l3 = g.eval_basis(3, &[xa, xb, xc])?;
                for (nl, c) in l3.entries() {
                    v.add_term(tensor_label(nl, xc), c.clone());
                }
            }
            if !v.is_zero() {
                out.set_constant(2, &[xa, xb], v)?;
            }
        }
    }
    // (x, m (x) xi*): xi (x) l21(x, m) + (l20(x,.)* xi) (x) m
    //                 - 1/2 <xi, x> (l1(m) - l21(m, .))
    for xa in &x_labels {
        for ml in &m_labels {
            for xc in &x_labels {
                let mut v = GradedVector::zero();
                let l21 = g.eval_basis(2, &[xa, ml])?;
                for (nl, c) in l21.entries() {
                    v.add_term(tensor_label(nl, xc), c.clone());
                }
                for xb in &x_labels {
                    // <l20(x_a,.)* xi_c, x_b> = -<xi_c, l20(x_a, x_b)>
                    let l20 = g.eval_basis(2, &[xa, xb])?;
                    let coeff = -l20.coeff(xc);
                    if !coeff.is_zero() {
                        v.add_term(tensor_label(ml, xb), coeff);
                    }
                }
                let xi_x = pairing(xc, xa);
                if !xi_x.is_zero() {
                    let d = d_of(ml)?;
                    v = v.add(&d.scale(&(xi_x * Scalar::ratio(-1, 2))));
                }
                if !v.is_zero() {
                    out.set_constant(2, &[xa, &tensor_label(ml, xc)], v)?;
                }
            }
        }
    }
    // (m (x) xi*, n (x) eta*): l1*eta(m) xi (x) n - l1*xi(n) eta (x) m
    // with <l1* eta, m> = -<eta, l1(m)>
    for (i, ml) in m_labels.iter().enumerate() {
        for xc in &x_labels {
            for (j, nl) in m_labels.iter().enumerate() {
                for xd in &x_labels {
                    let a = tensor_label(ml, xc);
                    let b = tensor_label(nl, xd);
                    if b <= a {
                        continue;
                    }
                    let _ = (i, j);
                    let mut v = GradedVector::zero();
                    // -<eta, l1(m)> xi (x) n
                    let l1m = g.eval_basis(1, &[ml])?;
                    v.add_term(tensor_label(nl, xc), -l1m.coeff(xd));
                    // +<xi, l1(n)> eta (x) m
                    let l1n = g.eval_basis(1, &[nl])?;
                    v.add_term(tensor_label(ml, xd), l1n.coeff(xc));
                    if !v.is_zero() {
                        out.set_constant(2, &[&a, &b], v)?;
                    }
                }
            }
        }
    }

    // l~21(x + xi (x) m, n) = 1/2 l21(x, n) + 1/2 <xi, l1(n)> m
    for nl in &m_labels {
        for xa in &x_labels {
            let v = g.eval_basis(2, &[xa, nl])?.scale(&Scalar::ratio(1, 2));
            if !v.is_zero() {
                out.set_constant(2, &[xa, nl], v)?;
            }
        }
        for ml in &m_labels {
            for xc in &x_labels {
                let l1n = g.eval_basis(1, &[nl])?;
                let coeff = l1n.coeff(xc) * Scalar::ratio(1, 2);
                if !coeff.is_zero() {
                    out.set_constant(
                        2,
                        &[&tensor_label(ml, xc), nl],
                        GradedVector::single(ml.clone(), coeff),
                    )?;
                }
            }
        }
    }

    // l~3 on basis triples of g~0, from the closed form on
    // (x1 + xi1 (x) m1, x2 + xi2 (x) m2, x3 + xi3 (x) m3).
    let rmap: std::collections::BTreeMap<String, (String, String)> = tmap
        .iter()
        .map(|((m, x), l)| (l.clone(), (m.clone(), x.clone())))
        .collect();
    let deg0_basis: Vec<String> = out
        .space
        .basis_of_degree(0)
        .iter()
        .map(|s| s.to_string())
        .collect();
    for a in 0..deg0_basis.len() {
        for b in a + 1..deg0_basis.len() {
            for c in b + 1..deg0_basis.len() {
                let v = tilde_l3(g, &rmap, [&deg0_basis[a], &deg0_basis[b], &deg0_basis[c]])?;
                if !v.is_zero() {
                    out.set_constant(3, &[&deg0_basis[a], &deg0_basis[b], &deg0_basis[c]], v)?;
                }
            }
        }
    }
    Ok(out)
}

/// The closed form for `l~3` evaluated on three basis elements. A label is
/// a tensor element exactly when the construction's label table says so.
fn tilde_l3(
    g: &LInftyStructure,
    rmap: &std::collections::BTreeMap<String, (String, String)>,
    labels: [&str; 3],
) -> Result<GradedVector, GradedError> {
    let parts: Vec<(Option<&str>, Option<(&str, &str)>)> = labels
        .iter()
        .map(|l| match rmap.get(*l) {
            Some((m, x)) => (None, Some((m.as_str(), x.as_str()))),
            None => (Some(*l), None),
        })
        .collect();
    let pair = |xi: Option<(&str, &str)>, x: Option<&str>| -> Scalar {
        match (xi, x) {
            (Some((_, xi)), Some(x)) if xi == x => Scalar::one(),
            _ => Scalar::zero(),
        }
    };
    let mut out = GradedVector::zero();

    // -1/2 l3(x1, x2, x3)
    if let (Some(x1), Some(x2), Some(x3)) = (parts[0].0, parts[1].0, parts[2].0) {
        out = out.add(&g.eval_basis(3, &[x1, x2, x3])?.scale(&Scalar::ratio(-1, 2)));
    }

    // -1/2 (<l20(x1, x2), xi3> m3 + c.p.)
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        if let (Some(xi), Some(xj), Some((mk, xik))) = (parts[i].0, parts[j].0, parts[k].1) {
            let l20 = g.eval_basis(2, &[xi, xj])?;
            let coeff = l20.coeff(xik) * Scalar::ratio(-1, 2);
            out.add_term(mk.to_string(), coeff);
        }
    }

    // -1/4 (<xi1,x2><xi3,l1 m1> m3 - <xi2,x1><xi3,l1 m2> m3 + c.p.)
    // cyclic in (1,2,3), each cycle contributing its two oriented terms
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        // <xi_i, x_j> <xi_k, l1 m_i> m_k
        if let (Some((mi, _)), Some(_), Some((mk, xik))) = (parts[i].1, parts[j].0, parts[k].1) {
            let p1 = pair(parts[i].1, parts[j].0);
            if !p1.is_zero() {
                let l1mi = g.eval_basis(1, &[mi])?;
                let coeff = p1 * l1mi.coeff(xik) * Scalar::ratio(-1, 4);
                out.add_term(mk.to_string(), coeff);
            }
        }
        // -<xi_j, x_i> <xi_k, l1 m_j> m_k
        if let (Some(_), Some((mj, _)), Some((mk, xik))) = (parts[i].0, parts[j].1, parts[k].1) {
            let p1 = pair(parts[j].1, parts[i].0);
            if !p1.is_zero() {
                let l1mj = g.eval_basis(1, &[mj])?;
                let coeff = p1 * l1mj.coeff(xik) * Scalar::ratio(1, 4);
                out.add_term(mk.to_string(), coeff);
            }
        }
    }

    // -1/4 (<xi2, x3> l21(x1, m2) - <xi3, x2> l21(x1, m3) + c.p.)
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        if let (Some(xi), Some((mj, _)), Some(_)) = (parts[i].0, parts[j].1, parts[k].0) {
            // <xi_j, x_k> l21(x_i, m_j)
            let p1 = pair(parts[j].1, parts[k].0);
            if !p1.is_zero() {
                let v = g.eval_basis(2, &[xi, mj])?;
                out = out.add(&v.scale(&(p1 * Scalar::ratio(-1, 4))));
            }
        }
        if let (Some(xi), Some(_), Some((mk, _))) = (parts[i].0, parts[j].0, parts[k].1) {
            // -<xi_k, x_j> l21(x_i, m_k)
            let p1 = pair(parts[k].1, parts[j].0);
            if !p1.is_zero() {
                let v = g.eval_basis(2, &[xi, mk])?;
                out = out.add(&v.scale(&(p1 * Scalar::ratio(1, 4))));
            }
        }
    }
    Ok(out)
}

/// The canonical homomorphism `F = (pr_1, Id, F2)` from `g~` to `g` with
/// `F2(x + xi (x) m, y + eta (x) n) = 1/2 (<xi, y> m - <x, eta> n)`.
pub fn canonical_morphism(g: &LInftyStructure) -> Result<TwoTermMorphism, GradedError> {
    let (x_labels, m_labels) = two_term_labels(g)?;
    let (_, tmap) = tilde_deg0_labels(&x_labels, &m_labels);
    let mut f = TwoTermMorphism::default();
    for xl in &x_labels {
        f.f0.insert(xl.clone(), GradedVector::basis(xl));
    }
    for ml in &m_labels {
        for xl in &x_labels {
            let tl = tmap[&(ml.clone(), xl.clone())].clone();
            f.f0.insert(tl, GradedVector::zero());
        }
        f.f1.insert(ml.clone(), GradedVector::basis(ml));
    }
    // F2(x_a, m (x) xi_c*) = -1/2 <x_a, xi_c> m
    for xa in &x_labels {
        for ml in &m_labels {
            f.set_f2(
                xa,
                &tmap[&(ml.clone(), xa.clone())],
                GradedVector::single(ml.clone(), Scalar::ratio(-1, 2)),
            );
        }
    }
    Ok(f)
}

/// The derived-bracket route: encodes `g`, then computes the Dorfman bracket
/// `{{e1, -Theta}, e2}` on the chart of `T*[2] g*[1]`.
pub struct DerivedCourant {
    pub chart: ShiftedCotangentChart,
    /// `-Theta`, the Courant-side Hamiltonian.
    pub hamiltonian: GradedPolynomial,
}

impl DerivedCourant {
    pub fn new(cd: &CourantData) -> Result<Self, GradedError> {
        // the relation tables read brackets with degree-0 arguments first,
        // so the Courant-side Hamiltonian uses that calibration
        let enc = hamiltonian_encode_ordered(&cd.g, TupleOrder::DescendingDegree)?;
        Ok(DerivedCourant {
            chart: enc.chart,
            hamiltonian: enc.hamiltonian.scale(&cd.hamiltonian_sign),
        })
    }

    /// A section as a degree-1 polynomial on the chart.
    pub fn section_to_poly(
        &self,
        cd: &CourantData,
        s: &Section,
    ) -> Result<GradedPolynomial, GradedError> {
        let mut out = GradedPolynomial::zero();
        for (u, f) in s.comps() {
            let gen = cd.generator_name(*u);
            for (mono, c) in f.terms() {
                let mut labels: Vec<String> = Vec::new();
                for &(v, e) in mono {
                    for _ in 0..e {
                        labels.push(cd.base_name(v));
                    }
                }
                labels.push(gen.clone());
                let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
                out = out.add(&GradedPolynomial::monomial(&self.chart, c.clone(), &refs)?);
            }
        }
        Ok(out)
    }

    pub fn poly_to_section(
        &self,
        cd: &CourantData,
        p: &GradedPolynomial,
    ) -> Result<Section, GradedError> {
        let mut out = Section::zero();
        for (mono, c) in p.terms() {
            let mut base: Vec<(usize, u32)> = Vec::new();
            let mut gen: Option<usize> = None;
            for &(rank, mult) in mono.factors() {
                let label = self.chart.label(rank).to_string();
                if let Some(i) = cd.m_labels.iter().position(|l| *l == label) {
                    base.push((i, mult));
                } else if let Some(u) =
                    (0..cd.num_generators()).find(|&u| cd.generator_name(u) == label)
                {
                    debug_assert!(gen.is_none() && mult == 1);
                    gen = Some(u);
                } else {
                    return Err(GradedError::UnknownCoordinate(label));
                }
            }
            let u = gen.ok_or_else(|| GradedError::Other("polynomial is not a section".into()))?;
            out.add_to(u, &BasePoly::from_mono(base, c.clone()));
        }
        Ok(out)
    }

    /// `e1 . e2 = {{e1, -Theta}, e2}` computed on the chart.
    pub fn dorfman(
        &self,
        cd: &CourantData,
        e1: &Section,
        e2: &Section,
    ) -> Result<Section, GradedError> {
        let p1 = self.section_to_poly(cd, e1)?;
        let p2 = self.section_to_poly(cd, e2)?;
        let inner = big_bracket(&p1, &self.hamiltonian, &self.chart);
        let res = big_bracket(&inner, &p2, &self.chart);
        self.poly_to_section(cd, &res)
    }

    /// `rho(e) f = {{e, -Theta}, f}` as a base polynomial.
    pub fn rho(
        &self,
        cd: &CourantData,
        e: &Section,
        f: &GradedPolynomial,
    ) -> Result<GradedPolynomial, GradedError> {
        let p = self.section_to_poly(cd, e)?;
        let inner = big_bracket(&p, &self.hamiltonian, &self.chart);
        Ok(big_bracket(&inner, f, &self.chart))
    }

    /// `D f = {-Theta, f}`.
    pub fn d_op(&self, cd: &CourantData, f: &GradedPolynomial) -> Result<Section, GradedError> {
        let res = big_bracket(&self.hamiltonian, f, &self.chart);
        self.poly_to_section(cd, &res)
    }
}
