//! Random candidate structures for the verification suites.
//!
//! Candidates respect only the degree rule `deg(l_k) = 2 - k`; most fail the
//! higher Jacobi relations, which is the point of the equivalence oracle
//! (Jacobi verdict vs master-equation verdict). `sample_verified` rejection
//! samples until the master equation holds.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::graded::{GradedSpace, GradedVector};
use crate::linfty::{check_master_equation, hamiltonian_encode, LInftyStructure};

pub struct Sampler {
    rng: StdRng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: StdRng::seed_from_u64(seed),
        }
    }

    fn small_scalar(&mut self) -> crate::scalar::Scalar {
        let nums = [-2i64, -1, -1, 1, 1, 2, 3];
        let dens = [1i64, 1, 1, 2];
        crate::scalar::Scalar::ratio(
            nums[self.rng.gen_range(0..nums.len())],
            dens[self.rng.gen_range(0..dens.len())],
        )
    }

    /// A random graded space with `terms` components and total dimension at
    /// most `max_total_dim` (at least one basis element per component).
    pub fn space(&mut self, terms: usize, max_total_dim: usize) -> GradedSpace {
        let mut dims = vec![1usize; terms];
        let mut total = terms;
        while total < max_total_dim && self.rng.gen_bool(0.6) {
            let i = self.rng.gen_range(0..terms);
            dims[i] += 1;
            total += 1;
        }
        let comps = (0..terms)
            .map(|t| {
                let d = -(t as i64);
                let labels = (0..dims[t])
                    .map(|j| match t {
                        0 => format!("x{}", j + 1),
                        1 => format!("m{}", j + 1),
                        _ => format!("f{}", j + 1),
                    })
                    .collect();
                (d, labels)
            })
            .collect();
        GradedSpace::new(comps).expect("generated labels are unique")
    }

    /// A sparse candidate: for each arity up to `max_arity`, a few random
    /// constants on degree-admissible tuples. No Jacobi constraint.
    pub fn candidate(&mut self, space: &GradedSpace, max_arity: usize) -> LInftyStructure {
        let mut s = LInftyStructure::new(space.clone());
        let labels: Vec<String> = space.basis().map(String::from).collect();
        let dim = labels.len();
        for arity in 1..=max_arity {
            let tries = self.rng.gen_range(0..=dim + 1);
            'outer: for _ in 0..tries {
                let mut tuple: Vec<usize> =
                    (0..arity).map(|_| self.rng.gen_range(0..dim)).collect();
                tuple.sort();
                // repeated even-degree entries are forced to zero
                for w in tuple.windows(2) {
                    if w[0] == w[1] && space.degree_of_index(w[0]) % 2 == 0 {
                        continue 'outer;
                    }
                }
                let want: i64 =
                    tuple.iter().map(|&i| space.degree_of_index(i)).sum::<i64>() + 2 - arity as i64;
                let targets: Vec<&str> = space.basis_of_degree(want);
                if targets.is_empty() {
                    continue;
                }
                let out = targets[self.rng.gen_range(0..targets.len())];
                let names: Vec<&str> = tuple.iter().map(|&i| space.label(i)).collect();
                let v = GradedVector::single(out.to_string(), self.small_scalar());
                s.set_constant(arity, &names, v)
                    .expect("tuple was built degree-admissible");
            }
        }
        s
    }

    /// Rejection-samples a candidate satisfying the master equation.
    /// Returns `None` if no valid candidate shows up within `attempts`.
    pub fn sample_verified(
        &mut self,
        terms: usize,
        max_total_dim: usize,
        max_arity: usize,
        attempts: usize,
    ) -> Option<LInftyStructure> {
        for _ in 0..attempts {
            let space = self.space(terms, max_total_dim);
            let c = self.candidate(&space, max_arity);
            if c.max_arity() == 0 {
                continue; // abelian: valid but uninformative
            }
            let enc = hamiltonian_encode(&c).expect("candidates satisfy the degree rule");
            if check_master_equation(&enc.hamiltonian, &enc.chart).all_passed() {
                return Some(c);
            }
        }
        None
    }
}
