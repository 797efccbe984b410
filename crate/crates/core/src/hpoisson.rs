//! Homotopy Poisson manifolds presented polynomially: the cotangent chart,
//! derived-bracket extraction of the brackets from a Hamiltonian,
//! Maurer-Cartan residuals, and the canonical-transformation residual of a
//! twisted symplectic NQ structure.

use crate::error::GradedError;
use crate::linfty::{
    check_master_equation, extract_on_labels, hamiltonian_encode, suspension_sign, LInftyStructure,
};
use crate::poly::{big_bracket, GradedPolynomial, ShiftedCotangentChart};
use crate::report::VerificationReport;
use crate::scalar::Scalar;

/// A homotopy Poisson manifold `M` of degree `n`, presented by the chart of
/// `T*[n+1] M` and the Hamiltonian `Theta = sum_i l_i` of degree `n + 2`.
pub struct HomotopyPoissonPresentation {
    pub chart: ShiftedCotangentChart,
    pub hamiltonian: GradedPolynomial,
    pub base_degree: i64,
}

impl HomotopyPoissonPresentation {
    /// Wraps a chart and Hamiltonian; the chart shift must be
    /// `base_degree + 1` and the Hamiltonian homogeneous of degree
    /// `base_degree + 2`.
    pub fn new(
        chart: ShiftedCotangentChart,
        hamiltonian: GradedPolynomial,
        base_degree: i64,
    ) -> Result<Self, GradedError> {
        if chart.shift() != base_degree + 1 {
            return Err(GradedError::Other(format!(
                "chart shift {} does not match base degree {}",
                chart.shift(),
                base_degree
            )));
        }
        if !hamiltonian.is_zero() && hamiltonian.homogeneous_degree(&chart) != Some(base_degree + 2)
        {
            return Err(GradedError::Other(format!(
                "Hamiltonian is not homogeneous of degree {}",
                base_degree + 2
            )));
        }
        Ok(HomotopyPoissonPresentation {
            chart,
            hamiltonian,
            base_degree,
        })
    }

    /// The dual presentation `g*[n-1]` of an n-term structure.
    pub fn from_structure(structure: &LInftyStructure) -> Result<Self, GradedError> {
        let enc = hamiltonian_encode(structure)?;
        let n = structure.term_count() as i64;
        HomotopyPoissonPresentation::new(enc.chart, enc.hamiltonian, n - 1)
    }

    /// `{Theta, Theta} = 0` together with the degree audit of the chart.
    pub fn verify(&self) -> VerificationReport {
        let mut report = VerificationReport::new();
        let expected = self.base_degree + 2;
        match self.hamiltonian.homogeneous_degree(&self.chart) {
            Some(d) if d != expected => report.fail(
                format!("Hamiltonian degree = n + 2 = {expected}"),
                vec![format!("found degree {d}")],
            ),
            _ => report.pass(format!("Hamiltonian degree = n + 2 = {expected}")),
        }
        report.merge(check_master_equation(&self.hamiltonian, &self.chart));
        report
    }
}

/// The iterated derived bracket
/// `l_k(a_1, ..., a_k) = {a_k, ..., {a_2, {a_1, Theta}} ...}|_M`
/// on fiber-constant polynomials, read in the graded-antisymmetric
/// convention of the structure maps.
///
/// The raw iterated bracket computes the graded-symmetric shifted brackets;
/// the suspension sign on the argument degrees converts back, so this
/// returns exactly the stored constants on canonical tuples.
pub fn derived_bracket_extract(
    presentation: &HomotopyPoissonPresentation,
    args: &[GradedPolynomial],
) -> Result<GradedPolynomial, GradedError> {
    let chart = &presentation.chart;
    let mut degrees = Vec::with_capacity(args.len());
    for a in args {
        if !a.is_fiber_constant(chart) {
            return Err(GradedError::Other(
                "derived-bracket arguments must be fiber-constant (no momentum coordinates)".into(),
            ));
        }
        match a.homogeneous_degree(chart) {
            Some(d) => degrees.push(d - presentation.base_degree),
            None if a.is_zero() => return Ok(GradedPolynomial::zero()),
            None => {
                return Err(GradedError::Other(
                    "derived-bracket arguments must be homogeneous".into(),
                ))
            }
        }
    }
    let mut cur = presentation.hamiltonian.clone();
    for a in args {
        cur = big_bracket(a, &cur, chart);
        if cur.is_zero() {
            break;
        }
    }
    Ok(cur
        .restrict_to_base(chart)
        .scale(&suspension_sign(&degrees)))
}

/// Extraction on coordinate labels, mirroring the stored-constant view.
pub fn derived_bracket_on_labels(
    presentation: &HomotopyPoissonPresentation,
    labels: &[&str],
) -> Result<GradedPolynomial, GradedError> {
    let chart = &presentation.chart;
    let degrees: Vec<i64> = labels
        .iter()
        .map(|l| Ok(chart.degree(chart.rank_of(l)?) - presentation.base_degree))
        .collect::<Result<_, GradedError>>()?;
    Ok(extract_on_labels(chart, &presentation.hamiltonian, labels)?
        .scale(&suspension_sign(&degrees)))
}

/// Which arity the Maurer-Cartan sum starts at. The full sum
/// includes the `-l_1(alpha)` term; on a homotopy symplectic manifold with
/// `l_1 = 0` the expansion starts at `1/2 l_2(alpha, alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McConvention {
    /// `sum_{i>=1} (-1)^i / i! l_i(alpha, ..., alpha)`
    FromArityOne,
    /// `sum_{i>=2} (-1)^i / i! l_i(alpha, ..., alpha)`
    FromArityTwo,
}

/// The Maurer-Cartan residual `sum_i (-1)^i / i! l_i(alpha, ..., alpha)`.
/// Zero exactly when `alpha` is a Maurer-Cartan element.
pub fn mc_residual(
    presentation: &HomotopyPoissonPresentation,
    alpha: &GradedPolynomial,
    convention: McConvention,
) -> Result<GradedPolynomial, GradedError> {
    let chart = &presentation.chart;
    if !alpha.is_fiber_constant(chart) {
        return Err(GradedError::Other(
            "Maurer-Cartan element must be a function on the base".into(),
        ));
    }
    // iterate C_i = {alpha, C_{i-1}}; l_i(alpha..alpha) = C_i|_M. Each
    // bracket with a fiber-constant alpha strictly lowers momentum degree,
    // so the loop terminates after max momentum degree of Theta steps.
    let mut out = GradedPolynomial::zero();
    let mut cur = presentation.hamiltonian.clone();
    let bound = presentation.hamiltonian.max_momentum_degree(chart) + 1;
    let mut factorial = Scalar::one();
    for i in 1..=bound as i64 {
        cur = big_bracket(alpha, &cur, chart);
        if cur.is_zero() {
            break;
        }
        factorial *= Scalar::from_int(i);
        if matches!(convention, McConvention::FromArityTwo) && i == 1 {
            continue;
        }
        let coeff = Scalar::neg_one_pow(i) * factorial.recip();
        out = out.add(&cur.restrict_to_base(chart).scale(&coeff));
    }
    Ok(out)
}

/// The canonical transformation residual
/// `e^{-alpha} Theta |_M = (Theta - {alpha, Theta} + 1/2 {alpha, {alpha,
/// Theta}} - ...)|_M`; the series terminates because each bracket with a
/// fiber-constant `alpha` strictly lowers momentum degree.
pub fn canonical_transform_residual(
    presentation: &HomotopyPoissonPresentation,
    alpha: &GradedPolynomial,
) -> Result<GradedPolynomial, GradedError> {
    let chart = &presentation.chart;
    if !alpha.is_fiber_constant(chart) {
        return Err(GradedError::Other(
            "canonical transformation requires fiber-constant alpha".into(),
        ));
    }
    if !alpha.is_zero() && alpha.homogeneous_degree(chart) != Some(presentation.base_degree + 1) {
        return Err(GradedError::Other(format!(
            "alpha must be homogeneous of degree n + 1 = {}",
            presentation.base_degree + 1
        )));
    }
    let mut out = presentation.hamiltonian.restrict_to_base(chart);
    let mut cur = presentation.hamiltonian.clone();
    let bound = presentation.hamiltonian.max_momentum_degree(chart) + 1;
    let mut coeff = Scalar::one();
    for k in 1..=bound as i64 {
        cur = big_bracket(alpha, &cur, chart);
        if cur.is_zero() {
            break;
        }
        coeff *= Scalar::from_int(-k).recip(); // (-1)^k / k!
        out = out.add(&cur.restrict_to_base(chart).scale(&coeff));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{GradedSpace, GradedVector};
    use crate::scalar::Scalar;

    fn identity_2term() -> LInftyStructure {
        let space = GradedSpace::builder()
            .component(0, vec!["x"])
            .component(-1, vec!["m"])
            .build()
            .unwrap();
        let mut s = LInftyStructure::new(space);
        s.set_constant(1, &["m"], GradedVector::basis("x")).unwrap();
        s
    }

    #[test]
    fn arity_one_extraction_is_the_stored_map() {
        let p = HomotopyPoissonPresentation::from_structure(&identity_2term()).unwrap();
        let m = GradedPolynomial::coordinate(&p.chart, "m").unwrap();
        let got = derived_bracket_extract(&p, &[m]).unwrap();
        assert_eq!(got, GradedPolynomial::coordinate(&p.chart, "x").unwrap());
    }

    #[test]
    fn constants_beyond_first_slot_kill_the_bracket() {
        let p = HomotopyPoissonPresentation::from_structure(&identity_2term()).unwrap();
        let one = GradedPolynomial::one();
        let m = GradedPolynomial::coordinate(&p.chart, "m").unwrap();
        // {1, Theta} = 0 already
        assert!(derived_bracket_extract(&p, &[one.clone()])
            .unwrap()
            .is_zero());
        assert!(derived_bracket_extract(&p, &[m, one]).unwrap().is_zero());
    }

    #[test]
    fn momentum_arguments_rejected() {
        let p = HomotopyPoissonPresentation::from_structure(&identity_2term()).unwrap();
        let bad = GradedPolynomial::coordinate(&p.chart, "m*").unwrap();
        assert!(derived_bracket_extract(&p, &[bad]).is_err());
    }

    #[test]
    fn mc_residual_of_zero_is_zero() {
        let p = HomotopyPoissonPresentation::from_structure(&identity_2term()).unwrap();
        let z = GradedPolynomial::zero();
        assert!(mc_residual(&p, &z, McConvention::FromArityOne)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn canonical_transform_alpha_zero_is_theta_restricted() {
        let p = HomotopyPoissonPresentation::from_structure(&identity_2term()).unwrap();
        let z = GradedPolynomial::zero();
        let r = canonical_transform_residual(&p, &z).unwrap();
        // Theta has no fiber-constant part
        assert!(r.is_zero());
        assert!(p.hamiltonian.restrict_to_base(&p.chart).is_zero());
    }

    #[test]
    fn mc_includes_l1_term_with_sign() {
        // alpha = m on the identity structure: residual = -l_1-part = -x
        // only in the FromArityOne convention.
        let p = HomotopyPoissonPresentation::from_structure(&identity_2term()).unwrap();
        let alpha = GradedPolynomial::coordinate(&p.chart, "m").unwrap();
        let r1 = mc_residual(&p, &alpha, McConvention::FromArityOne).unwrap();
        let x = GradedPolynomial::coordinate(&p.chart, "x").unwrap();
        assert_eq!(r1, x.scale(&-Scalar::one()));
        let r2 = mc_residual(&p, &alpha, McConvention::FromArityTwo).unwrap();
        assert!(r2.is_zero());
    }
}
