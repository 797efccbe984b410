//! Sections of trivial bundles over a polynomial base: sparse combinations
//! of fiber generators with polynomial coefficients. Shared by the Courant
//! and Ikeda-Uchino section models.

use std::collections::BTreeMap;

use crate::base_poly::BasePoly;
use crate::scalar::Scalar;

/// A section `sum_u f_u(base) * u` over generator indices `u`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Section {
    comps: BTreeMap<usize, BasePoly>,
}

impl Section {
    pub fn zero() -> Self {
        Section::default()
    }

    pub fn generator(u: usize) -> Self {
        Section::term(u, BasePoly::one())
    }

    pub fn term(u: usize, coeff: BasePoly) -> Self {
        let mut s = Section::zero();
        s.add_to(u, &coeff);
        s
    }

    pub fn add_to(&mut self, u: usize, coeff: &BasePoly) {
        if coeff.is_zero() {
            return;
        }
        let e = self.comps.entry(u).or_insert_with(BasePoly::zero);
        *e = e.add(coeff);
        if e.is_zero() {
            self.comps.remove(&u);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn coeff(&self, u: usize) -> BasePoly {
        self.comps.get(&u).cloned().unwrap_or_default()
    }

    pub fn comps(&self) -> impl Iterator<Item = (&usize, &BasePoly)> {
        self.comps.iter()
    }

    pub fn add(&self, other: &Section) -> Section {
        let mut out = self.clone();
        for (u, c) in &other.comps {
            out.add_to(*u, c);
        }
        out
    }

    pub fn sub(&self, other: &Section) -> Section {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Section {
        if c.is_zero() {
            return Section::zero();
        }
        Section {
            comps: self.comps.iter().map(|(u, f)| (*u, f.scale(c))).collect(),
        }
    }

    /// Multiplies every coefficient by a base function.
    pub fn mul_fn(&self, f: &BasePoly) -> Section {
        if f.is_zero() {
            return Section::zero();
        }
        Section {
            comps: self
                .comps
                .iter()
                .map(|(u, g)| (*u, g.mul(f)))
                .filter(|(_, g)| !g.is_zero())
                .collect(),
        }
    }

    pub fn display(
        &self,
        gen_name: &dyn Fn(usize) -> String,
        var_name: &dyn Fn(usize) -> String,
    ) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (u, f)) in self.comps.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&format!("({}) {}", f.display(var_name), gen_name(*u)));
        }
        out
    }
}
