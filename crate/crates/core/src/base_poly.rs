//! Ordinary (even) sparse polynomials over indexed variables. These carry
//! the coefficients of sections and multivector fields; the graded signs all
//! live elsewhere.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// A monomial as a sorted list of `(variable index, exponent >= 1)`.
pub type BaseMono = Vec<(usize, u32)>;

pub(crate) fn normalize_mono(mut m: BaseMono) -> BaseMono {
    m.retain(|&(_, e)| e > 0);
    m.sort();
    let mut out: BaseMono = Vec::with_capacity(m.len());
    for (v, e) in m {
        match out.last_mut() {
            Some((lv, le)) if *lv == v => *le += e,
            _ => out.push((v, e)),
        }
    }
    out
}

/// A polynomial with rational coefficients in commuting variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BasePoly {
    terms: BTreeMap<BaseMono, Scalar>,
}

impl BasePoly {
    pub fn zero() -> Self {
        BasePoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = BasePoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        BasePoly::constant(Scalar::one())
    }

    pub fn var(i: usize) -> Self {
        let mut p = BasePoly::zero();
        p.add_term(vec![(i, 1)], Scalar::one());
        p
    }

    pub fn from_mono(m: BaseMono, c: Scalar) -> Self {
        let mut p = BasePoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: BaseMono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let m = normalize_mono(m);
        let e = self.terms.entry(m.clone()).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    pub fn constant_part(&self) -> Scalar {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BaseMono, &Scalar)> {
        self.terms.iter()
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
            return BasePoly::zero();
        }
        BasePoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = BasePoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = BasePoly::zero();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|&(v, _)| v == i) {
                let (_, e) = m[pos];
                let mut m2 = m.clone();
                if e == 1 {
                    m2.remove(pos);
                } else {
                    m2[pos].1 = e - 1;
                }
                out.add_term(m2, c * &Scalar::from_int(e as i64));
            }
        }
        out
    }

    /// Substitutes `value` for variable `i`.
    pub fn substitute(&self, i: usize, value: &BasePoly) -> Self {
        let mut out = BasePoly::zero();
        for (m, c) in &self.terms {
            let mut rest: BaseMono = Vec::new();
            let mut power = 0u32;
            for &(v, e) in m {
                if v == i {
                    power = e;
                } else {
                    rest.push((v, e));
                }
            }
            let mut term = BasePoly::from_mono(rest, c.clone());
            for _ in 0..power {
                term = term.mul(value);
            }
            out = out.add(&term);
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    /// Renders with a caller-supplied variable name table.
    pub fn display(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            if m.is_empty() {
                out.push_str(&c.to_string());
                continue;
            }
            if !c.is_one() {
                out.push_str(&format!("{c} "));
            }
            for (j, &(v, e)) in m.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                if e == 1 {
                    out.push_str(&names(v));
                } else {
                    out.push_str(&format!("{}^{}", names(v), e));
                }
            }
        }
        out
    }
}

/// All monomials in `nvars` variables of total degree at most `cap`
/// (including the unit monomial).
pub fn monomials_up_to(nvars: usize, cap: u32) -> Vec<BaseMono> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<BaseMono> = vec![Vec::new()];
    for _ in 0..cap {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.last().map(|&(v, _)| v).unwrap_or(0);
            for v in start..nvars {
                let mut m2 = m.clone();
                match m2.last_mut() {
                    Some((lv, le)) if *lv == v => *le += 1,
                    _ => m2.push((v, 1)),
                }
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
