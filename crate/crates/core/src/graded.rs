//! Graded vector spaces with labeled bases and the Koszul sign calculus.
//!
//! Degrees are signed integers. Dual spaces carry negated degrees and a
//! degree shift is a separate wrapper on the recorded degrees, so the same
//! label can denote an element of `g_{-1}` and of `g_{-1}[1]` in two spaces
//! without ambiguity. The canonical basis order everywhere is lexicographic
//! on `(degree, label)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::GradedError;
use crate::scalar::Scalar;

/// The Koszul sign of a permutation of graded elements.
///
/// `perm[k]` is the 0-based index of the element occupying slot `k` of the
/// permuted sequence `(x_{perm[0]}, ..., x_{perm[n-1]})`; `degrees[j]` is the
/// degree of `x_j` in the original order. Sorting the permuted sequence back
/// to the identity by adjacent transpositions contributes `(-1)^{d d'}` for
/// each swap of elements of degrees `d`, `d'`. This is `Ksgn` alone, without
/// the factor `sgn`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<Scalar, GradedError> {
    if perm.len() != degrees.len() {
        return Err(GradedError::LengthMismatch {
            perm: perm.len(),
            degrees: degrees.len(),
        });
    }
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(GradedError::NotBijective(n));
        }
        seen[p] = true;
    }
    // Bubble-sort back to the identity, accumulating signs.
    let mut seq: Vec<usize> = perm.to_vec();
    let mut sign = 1i64;
    for i in 0..n {
        for j in 0..n.saturating_sub(i + 1) {
            if seq[j] > seq[j + 1] {
                if degrees[seq[j]] % 2 != 0 && degrees[seq[j + 1]] % 2 != 0 {
                    sign = -sign;
                }
                seq.swap(j, j + 1);
            }
        }
    }
    Ok(Scalar::from_int(sign))
}

/// `sgn(perm) * Ksgn(perm)`, the combination entering the higher Jacobi sums.
pub fn koszul_sign_with_sgn(perm: &[usize], degrees: &[i64]) -> Result<Scalar, GradedError> {
    let k = koszul_sign(perm, degrees)?;
    Ok(k * permutation_sign(perm))
}

/// The ordinary sign of a permutation given as `perm[k] = sigma(k)`.
pub fn permutation_sign(perm: &[usize]) -> Scalar {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    Scalar::neg_one_pow(inversions as i64)
}

/// One homogeneous summand of a graded space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComponent {
    pub degree: i64,
    pub basis_labels: Vec<String>,
}

/// A finite-dimensional graded vector space with a labeled basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    components: Vec<GradedComponent>,
    /// Basis labels sorted by `(degree, label)`; positions here are the
    /// canonical basis indices used for tuple normalization.
    order: Vec<(String, i64)>,
    index: BTreeMap<String, usize>,
}

impl GradedSpace {
    pub fn new(components: Vec<(i64, Vec<String>)>) -> Result<Self, GradedError> {
        let mut degrees_seen = BTreeMap::new();
        let mut index = BTreeMap::new();
        let mut order: Vec<(String, i64)> = Vec::new();
        let comps: Vec<GradedComponent> = components
            .into_iter()
            .map(|(degree, basis_labels)| GradedComponent {
                degree,
                basis_labels,
            })
            .collect();
        for c in &comps {
            if degrees_seen.insert(c.degree, ()).is_some() {
                return Err(GradedError::DuplicateDegree(c.degree));
            }
            for l in &c.basis_labels {
                order.push((l.clone(), c.degree));
            }
        }
        order.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        for (i, (l, _)) in order.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(GradedError::DuplicateLabel(l.clone()));
            }
        }
        Ok(GradedSpace {
            components: comps,
            order,
            index,
        })
    }

    pub fn builder() -> GradedSpaceBuilder {
        GradedSpaceBuilder(Vec::new())
    }

    pub fn components(&self) -> &[GradedComponent] {
        &self.components
    }

    pub fn total_dim(&self) -> usize {
        self.order.len()
    }

    /// Basis labels in canonical `(degree, label)` order.
    pub fn basis(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(|(l, _)| l.as_str())
    }

    pub fn canonical_index(&self, label: &str) -> Result<usize, GradedError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| GradedError::UnknownLabel(label.to_string()))
    }

    pub fn label(&self, canonical_index: usize) -> &str {
        &self.order[canonical_index].0
    }

    pub fn degree_of_index(&self, canonical_index: usize) -> i64 {
        self.order[canonical_index].1
    }

    pub fn degree_of(&self, label: &str) -> Result<i64, GradedError> {
        Ok(self.order[self.canonical_index(label)?].1)
    }

    /// Labels of one homogeneous component, in canonical order.
    pub fn basis_of_degree(&self, degree: i64) -> Vec<&str> {
        self.order
            .iter()
            .filter(|(_, d)| *d == degree)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.components.iter().map(|c| c.degree).collect();
        d.sort();
        d
    }

    /// The dual space: same labels with a `*` suffix, negated degrees.
    pub fn dualize(&self) -> GradedSpace {
        let comps = self
            .components
            .iter()
            .map(|c| {
                (
                    -c.degree,
                    c.basis_labels.iter().map(|l| format!("{l}*")).collect(),
                )
            })
            .collect();
        GradedSpace::new(comps).expect("dual of a valid space is valid")
    }

    /// Degree shift: `shifted[j] = original[j + n]`, so an element of degree d
    /// is recorded at degree d - n.
    pub fn shift(&self, n: i64) -> GradedSpace {
        let comps = self
            .components
            .iter()
            .map(|c| (c.degree - n, c.basis_labels.clone()))
            .collect();
        GradedSpace::new(comps).expect("shift of a valid space is valid")
    }
}

pub struct GradedSpaceBuilder(Vec<(i64, Vec<String>)>);

impl GradedSpaceBuilder {
    pub fn component<S: Into<String>>(mut self, degree: i64, labels: Vec<S>) -> Self {
        self.0
            .push((degree, labels.into_iter().map(Into::into).collect()));
        self
    }

    pub fn build(self) -> Result<GradedSpace, GradedError> {
        GradedSpace::new(self.0)
    }
}

/// A sparse vector over a labeled basis. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedVector {
    entries: BTreeMap<String, Scalar>,
}

impl GradedVector {
    pub fn zero() -> Self {
        GradedVector::default()
    }

    pub fn single(label: impl Into<String>, coeff: Scalar) -> Self {
        let mut v = GradedVector::zero();
        v.add_term(label.into(), coeff);
        v
    }

    pub fn basis(label: impl Into<String>) -> Self {
        GradedVector::single(label, Scalar::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (String, Scalar)>>(terms: I) -> Self {
        let mut v = GradedVector::zero();
        for (l, c) in terms {
            v.add_term(l, c);
        }
        v
    }

    pub fn add_term(&mut self, label: String, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let e = self
            .entries
            .entry(label.clone())
            .or_insert_with(Scalar::zero);
        *e += coeff;
        if e.is_zero() {
            self.entries.remove(&label);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Scalar)> {
        self.entries.iter().map(|(l, c)| (l.as_str(), c))
    }

    pub fn coeff(&self, label: &str) -> Scalar {
        self.entries
            .get(label)
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, c: &Scalar) -> GradedVector {
        if c.is_zero() {
            return GradedVector::zero();
        }
        GradedVector {
            entries: self
                .entries
                .iter()
                .map(|(l, v)| (l.clone(), v * c))
                .collect(),
        }
    }

    pub fn add(&self, other: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        for (l, c) in other.entries.iter() {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedVector) -> GradedVector {
        self.add(&other.scale(&-Scalar::one()))
    }

    /// The common degree of all entries, if the vector is homogeneous.
    pub fn homogeneous_degree(&self, space: &GradedSpace) -> Result<Option<i64>, GradedError> {
        let mut deg = None;
        for l in self.entries.keys() {
            let d = space.degree_of(l)?;
            match deg {
                None => deg = Some(d),
                Some(p) if p != d => return Ok(None),
                _ => {}
            }
        }
        Ok(deg)
    }
}

impl fmt::Display for GradedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, c)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{l}")?;
            } else {
                write!(f, "{c} {l}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_identity_is_one() {
        let s = koszul_sign(&[0, 1, 2], &[1, 2, 3]).unwrap();
        assert!(s.is_one());
    }

    #[test]
    fn koszul_odd_odd_swap() {
        let s = koszul_sign(&[1, 0], &[1, 1]).unwrap();
        assert_eq!(s, Scalar::from_int(-1));
        let t = koszul_sign(&[1, 0], &[1, 2]).unwrap();
        assert!(t.is_one());
    }

    #[test]
    fn koszul_rejects_bad_inputs() {
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
        assert!(koszul_sign(&[0, 2], &[1, 1]).is_err());
        assert!(koszul_sign(&[0, 1], &[1]).is_err());
    }

    /// Independent oracle: insertion sort, a different decomposition of the
    /// permutation into adjacent transpositions than the implementation uses.
    fn koszul_oracle(perm: &[usize], degrees: &[i64]) -> i64 {
        let mut seq = perm.to_vec();
        let mut sign = 1i64;
        for i in 1..seq.len() {
            let mut j = i;
            while j > 0 && seq[j - 1] > seq[j] {
                if degrees[seq[j - 1]] % 2 != 0 && degrees[seq[j]] % 2 != 0 {
                    sign = -sign;
                }
                seq.swap(j - 1, j);
                j -= 1;
            }
        }
        sign
    }

    #[test]
    fn koszul_matches_adjacent_swap_oracle() {
        // sigma = (1->3, 2->1, 3->2) on degrees [1,2,1]:
        // permuted sequence (x3, x1, x2) i.e. perm = [2,0,1] 0-based.
        let perm = [2usize, 0, 1];
        let degrees = [1i64, 2, 1];
        let got = koszul_sign(&perm, &degrees).unwrap();
        let want = koszul_oracle(&perm, &degrees);
        assert_eq!(got, Scalar::from_int(want));
    }

    #[test]
    fn koszul_is_multiplicative_up_to_n5() {
        use itertools::Itertools;
        // sign(sigma . tau) = sign(sigma on tau-permuted degrees) * sign(tau)
        for n in 1..=5usize {
            let degs: Vec<i64> = (0..n).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect();
            let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
            for sigma in &perms {
                for tau in &perms {
                    // composite[k] = tau[sigma[k]]
                    let composite: Vec<usize> = sigma.iter().map(|&k| tau[k]).collect();
                    let lhs = koszul_sign(&composite, &degs).unwrap();
                    let tau_degs: Vec<i64> = tau.iter().map(|&k| degs[k]).collect();
                    let rhs =
                        koszul_sign(sigma, &tau_degs).unwrap() * koszul_sign(tau, &degs).unwrap();
                    assert_eq!(lhs, rhs, "sigma={sigma:?} tau={tau:?}");
                }
            }
        }
    }

    #[test]
    fn space_rejects_duplicates() {
        assert!(GradedSpace::new(vec![(0, vec!["a".into()]), (0, vec!["b".into()])]).is_err());
        assert!(GradedSpace::new(vec![(0, vec!["a".into()]), (-1, vec!["a".into()])]).is_err());
    }

    #[test]
    fn canonical_order_is_degree_then_label() {
        let s = GradedSpace::builder()
            .component(0, vec!["x2", "x1"])
            .component(-1, vec!["m"])
            .build()
            .unwrap();
        let order: Vec<&str> = s.basis().collect();
        assert_eq!(order, vec!["m", "x1", "x2"]);
        assert_eq!(s.degree_of("m").unwrap(), -1);
    }

    #[test]
    fn dual_negates_degrees() {
        let s = GradedSpace::builder()
            .component(-1, vec!["m"])
            .component(0, vec!["x"])
            .build()
            .unwrap();
        let d = s.dualize();
        assert_eq!(d.degree_of("m*").unwrap(), 1);
        assert_eq!(d.degree_of("x*").unwrap(), 0);
        let sh = s.shift(1);
        assert_eq!(sh.degree_of("m").unwrap(), -2);
    }
}
