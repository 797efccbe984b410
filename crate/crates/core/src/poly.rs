//! Free graded-commutative polynomials on the coordinates of a shifted
//! cotangent chart, and the canonical Poisson bracket (big bracket).
//!
//! A chart `T*[s]M` carries Darboux pairs `(q, p)` with `|q| + |p| = s`. The
//! bracket has degree `-s`; its generator table is `{q, p} = 1` together with
//! the graded symmetry rule
//!
//! ```text
//! {u, v} = -(-1)^{(|u|-s)(|v|-s)} {v, u}
//! ```
//!
//! so `{p, q} = -{q, p}` for an even/even pair like `(x, p)` on `T*[2]A[1]`
//! while `{theta, xi} = +{xi, theta}` for the odd/odd pair. Products extend
//! by the graded Leibniz rule
//!
//! ```text
//! {u, v w} = {u, v} w + (-1)^{(|u|-s)|v|} v {u, w}.
//! ```
//!
//! Monomials are kept in a canonical normal form: factors sorted by the
//! chart's coordinate order (ascending `(degree, label)`), odd coordinates
//! never repeated.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::GradedError;
use crate::scalar::Scalar;

/// One Darboux coordinate of a chart.
#[derive(Clone, Debug)]
pub struct Coordinate {
    pub label: String,
    pub degree: i64,
    /// Rank of the conjugate coordinate.
    pub partner: usize,
    /// True for the momentum half: restriction to the base sets these to zero.
    pub is_momentum: bool,
}

/// A Darboux chart on `T*[s]M` with labeled graded coordinates.
#[derive(Clone, Debug)]
pub struct ShiftedCotangentChart {
    shift: i64,
    coords: Vec<Coordinate>,
    by_label: BTreeMap<String, usize>,
}

impl ShiftedCotangentChart {
    /// Builds a chart from conjugate pairs `(q_label, q_degree, p_label)`;
    /// the momentum degree is forced to `shift - q_degree`.
    pub fn new(
        shift: i64,
        pairs: Vec<(String, i64, String)>,
    ) -> Result<ShiftedCotangentChart, GradedError> {
        // Sort-stable coordinate ranks: ascending (degree, label).
        let mut raw: Vec<(String, i64, bool, String)> = Vec::new();
        for (q, qd, p) in &pairs {
            raw.push((q.clone(), *qd, false, p.clone()));
            raw.push((p.clone(), shift - qd, true, q.clone()));
        }
        raw.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        let mut by_label = BTreeMap::new();
        for (i, (l, _, _, _)) in raw.iter().enumerate() {
            if by_label.insert(l.clone(), i).is_some() {
                return Err(GradedError::DuplicateLabel(l.clone()));
            }
        }
        let coords = raw
            .iter()
            .map(|(l, d, is_p, partner)| Coordinate {
                label: l.clone(),
                degree: *d,
                partner: by_label[partner],
                is_momentum: *is_p,
            })
            .collect();
        Ok(ShiftedCotangentChart {
            shift,
            coords,
            by_label,
        })
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn rank_of(&self, label: &str) -> Result<usize, GradedError> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| GradedError::UnknownCoordinate(label.to_string()))
    }

    pub fn label(&self, rank: usize) -> &str {
        &self.coords[rank].label
    }

    pub fn degree(&self, rank: usize) -> i64 {
        self.coords[rank].degree
    }

    fn is_odd(&self, rank: usize) -> bool {
        self.coords[rank].degree % 2 != 0
    }

    /// `{a, b}` for single coordinates: the Darboux table.
    fn pair_bracket(&self, a: usize, b: usize) -> Scalar {
        if self.coords[a].partner != b {
            return Scalar::zero();
        }
        if !self.coords[a].is_momentum {
            Scalar::one() // {q, p} = 1
        } else {
            // {p, q} = -(-1)^{(|p|-s)(|q|-s)} {q, p}
            let e = (self.coords[a].degree - self.shift) * (self.coords[b].degree - self.shift);
            -Scalar::neg_one_pow(e)
        }
    }

    /// Sign relating `{u,v}` and `{v,u}` for homogeneous `u`, `v`.
    pub fn symmetry_sign(&self, deg_u: i64, deg_v: i64) -> Scalar {
        -Scalar::neg_one_pow((deg_u - self.shift) * (deg_v - self.shift))
    }

    /// Normalizes a raw factor sequence given by labels. Returns the Koszul
    /// sign relative to canonical order, or `None` when an odd coordinate
    /// repeats (the monomial is zero).
    pub fn normalize_monomial(
        &self,
        labels: &[&str],
    ) -> Result<Option<(Scalar, Monomial)>, GradedError> {
        let ranks: Vec<usize> = labels
            .iter()
            .map(|l| self.rank_of(l))
            .collect::<Result<_, _>>()?;
        Ok(self.normalize_ranks(&ranks))
    }

    /// Same as [`Self::normalize_monomial`] on pre-resolved ranks.
    pub fn normalize_ranks(&self, ranks: &[usize]) -> Option<(Scalar, Monomial)> {
        // Insertion sort, accumulating (-1)^{dd'} per adjacent odd-odd swap.
        let mut seq = ranks.to_vec();
        let mut sign = Scalar::one();
        for i in 1..seq.len() {
            let mut j = i;
            while j > 0 && seq[j - 1] > seq[j] {
                if self.is_odd(seq[j - 1]) && self.is_odd(seq[j]) {
                    sign = -sign;
                }
                seq.swap(j - 1, j);
                j -= 1;
            }
        }
        let mut factors: Vec<(usize, u32)> = Vec::new();
        for r in seq {
            match factors.last_mut() {
                Some((last, m)) if *last == r => {
                    if self.is_odd(r) {
                        return None; // odd square
                    }
                    *m += 1;
                }
                _ => factors.push((r, 1)),
            }
        }
        Some((sign, Monomial { factors }))
    }

    pub fn monomial_degree(&self, m: &Monomial) -> i64 {
        m.factors
            .iter()
            .map(|&(r, mult)| self.coords[r].degree * mult as i64)
            .sum()
    }

    /// Number of momentum factors in a monomial (with multiplicity).
    pub fn momentum_degree(&self, m: &Monomial) -> u32 {
        m.factors
            .iter()
            .filter(|&&(r, _)| self.coords[r].is_momentum)
            .map(|&(_, mult)| mult)
            .sum()
    }
}

/// A normal-form monomial: factors `(coordinate rank, multiplicity)` sorted
/// by rank, odd coordinates with multiplicity one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial {
            factors: Vec::new(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.factors
    }

    /// The factor sequence expanded unit by unit, ascending.
    pub fn expanded(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &(r, m) in &self.factors {
            for _ in 0..m {
                out.push(r);
            }
        }
        out
    }

    pub fn contains(&self, rank: usize) -> bool {
        self.factors.iter().any(|&(r, _)| r == rank)
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.factors.iter().map(|&(_, m)| m).sum()
    }
}

/// A sparse polynomial on a chart; no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedPolynomial {
    terms: BTreeMap<Monomial, Scalar>,
}

impl GradedPolynomial {
    pub fn zero() -> Self {
        GradedPolynomial::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = GradedPolynomial::zero();
        p.add_term(Monomial::unit(), c);
        p
    }

    pub fn one() -> Self {
        GradedPolynomial::constant(Scalar::one())
    }

    /// A single chart coordinate as a polynomial.
    pub fn coordinate(chart: &ShiftedCotangentChart, label: &str) -> Result<Self, GradedError> {
        let (sign, m) = chart
            .normalize_monomial(&[label])?
            .expect("single factor cannot vanish");
        let mut p = GradedPolynomial::zero();
        p.add_term(m, sign);
        Ok(p)
    }

    /// Builds `c * l1 l2 ... lk` from labels, normalizing.
    pub fn monomial(
        chart: &ShiftedCotangentChart,
        c: Scalar,
        labels: &[&str],
    ) -> Result<Self, GradedError> {
        let mut p = GradedPolynomial::zero();
        if let Some((sign, m)) = chart.normalize_monomial(labels)? {
            p.add_term(m, sign * c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return GradedPolynomial::zero();
        }
        GradedPolynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    /// Graded-commutative product on a common chart.
    pub fn mul(&self, other: &Self, chart: &ShiftedCotangentChart) -> Self {
        let mut out = GradedPolynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut seq = m1.expanded();
                seq.extend(m2.expanded());
                if let Some((sign, m)) = chart.normalize_ranks(&seq) {
                    out.add_term(m, sign * c1.clone() * c2.clone());
                }
            }
        }
        out
    }

    /// The common degree of all monomials, if homogeneous (`None` for 0).
    pub fn homogeneous_degree(&self, chart: &ShiftedCotangentChart) -> Option<i64> {
        let mut deg = None;
        for m in self.terms.keys() {
            let d = chart.monomial_degree(m);
            match deg {
                None => deg = Some(d),
                Some(p) if p != d => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn is_homogeneous(&self, chart: &ShiftedCotangentChart) -> bool {
        self.is_zero() || self.homogeneous_degree(chart).is_some()
    }

    /// Largest momentum multiplicity among the terms.
    pub fn max_momentum_degree(&self, chart: &ShiftedCotangentChart) -> u32 {
        self.terms
            .keys()
            .map(|m| chart.momentum_degree(m))
            .max()
            .unwrap_or(0)
    }

    /// Restriction to the base: drop every term containing a momentum factor.
    pub fn restrict_to_base(&self, chart: &ShiftedCotangentChart) -> Self {
        GradedPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| chart.momentum_degree(m) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// True when no momentum coordinate occurs.
    pub fn is_fiber_constant(&self, chart: &ShiftedCotangentChart) -> bool {
        self.max_momentum_degree(chart) == 0
    }

    /// Splits into momentum-degree homogeneous parts, keyed by that degree.
    pub fn split_by_momentum_degree(
        &self,
        chart: &ShiftedCotangentChart,
    ) -> BTreeMap<u32, GradedPolynomial> {
        let mut out: BTreeMap<u32, GradedPolynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(chart.momentum_degree(m))
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn display<'a>(&'a self, chart: &'a ShiftedCotangentChart) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, chart }
    }
}

/// The big bracket `{f, g}` on a chart.
///
/// Implemented by the two Leibniz recursions
/// `{c, n1...nk} = sum_i +- n1...{c,n_i}...nk` and
/// `{c m', N} = c {m', N} + (-1)^{|m'| (|N|-s)} {c, N} m'`,
/// with the generator table at the leaves.
pub fn big_bracket(
    f: &GradedPolynomial,
    g: &GradedPolynomial,
    chart: &ShiftedCotangentChart,
) -> GradedPolynomial {
    let mut out = GradedPolynomial::zero();
    for (m1, c1) in f.terms() {
        for (m2, c2) in g.terms() {
            let b = bracket_monomials(m1, m2, chart);
            for (m, c) in b.terms {
                out.add_term(m, c * c1.clone() * c2.clone());
            }
        }
    }
    out
}

fn bracket_monomials(
    m1: &Monomial,
    m2: &Monomial,
    chart: &ShiftedCotangentChart,
) -> GradedPolynomial {
    let left = m1.expanded();
    let right = m2.expanded();
    bracket_seq(&left, &right, chart)
}

fn bracket_seq(left: &[usize], right: &[usize], chart: &ShiftedCotangentChart) -> GradedPolynomial {
    let mut out = GradedPolynomial::zero();
    if left.is_empty() || right.is_empty() {
        return out;
    }
    if left.len() == 1 {
        let c = left[0];
        let cd = chart.degree(c);
        // {c, n1 n2 ... nk}: Leibniz across the factors of the right side.
        let mut passed = 0i64;
        for (i, &n) in right.iter().enumerate() {
            let pb = chart.pair_bracket(c, n);
            if !pb.is_zero() {
                let sign = Scalar::neg_one_pow((cd - chart.shift()) * passed);
                let rest: Vec<usize> = right
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &r)| r)
                    .collect();
                if let Some((nsign, m)) = chart.normalize_ranks(&rest) {
                    out.add_term(m, sign * nsign * pb);
                }
            }
            passed += chart.degree(n);
        }
        return out;
    }
    // {c m', N} = c {m', N} + (-1)^{|m'| (|N|-s)} {c, N} m'
    let c = left[0];
    let rest = &left[1..];
    let rest_deg: i64 = rest.iter().map(|&r| chart.degree(r)).sum();
    let right_deg: i64 = right.iter().map(|&r| chart.degree(r)).sum();

    let inner = bracket_seq(rest, right, chart);
    for (m, coeff) in inner.terms {
        let mut seq = vec![c];
        seq.extend(m.expanded());
        if let Some((nsign, nm)) = chart.normalize_ranks(&seq) {
            out.add_term(nm, nsign * coeff);
        }
    }
    let outer = bracket_seq(&left[..1], right, chart);
    let sign = Scalar::neg_one_pow(rest_deg * (right_deg - chart.shift()));
    for (m, coeff) in outer.terms {
        let mut seq = m.expanded();
        seq.extend_from_slice(rest);
        if let Some((nsign, nm)) = chart.normalize_ranks(&seq) {
            out.add_term(nm, nsign * coeff * sign.clone());
        }
    }
    out
}

pub struct PolyDisplay<'a> {
    poly: &'a GradedPolynomial,
    chart: &'a ShiftedCotangentChart,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_unit() {
                write!(f, "{c}")?;
                continue;
            }
            if !c.is_one() {
                write!(f, "{c} ")?;
            }
            for (j, &(r, mult)) in m.factors().iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                if mult == 1 {
                    write!(f, "{}", self.chart.label(r))?;
                } else {
                    write!(f, "{}^{}", self.chart.label(r), mult)?;
                }
            }
        }
        Ok(())
    }
}
