//! Exact linear algebra over the rationals.
//!
//! Elimination is fraction-free (Bareiss) on an integer matrix obtained by
//! clearing denominators row by row, so intermediate entries stay integral
//! and exact while coefficients grow.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::GradedError;
use crate::graded::GradedVector;
use crate::scalar::Scalar;

fn check_rectangular(rows: &[Vec<Scalar>]) -> Result<usize, GradedError> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(GradedError::RaggedRows {
                row: i,
                got: r.len(),
                want: ncols,
            });
        }
    }
    Ok(ncols)
}

/// Clears denominators of one row, returning primitive integer entries.
fn integerize(row: &[Scalar]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for s in row {
        let d = s.denominator();
        let g = num_integer::gcd(lcm.clone(), d.clone());
        lcm = lcm / g * d;
    }
    row.iter()
        .map(|s| s.numerator() * (&lcm / s.denominator()))
        .collect()
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivot_cols: Vec<usize>,
}

/// Bareiss fraction-free row reduction. The returned rows are in echelon
/// form with `pivot_cols[i]` the pivot column of row `i`.
fn bareiss(mut m: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    let nrows = m.len();
    let mut pivot_cols = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..ncols {
        if r >= nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let t = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = &t / &prev; // exact by Bareiss
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivot_cols.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon {
        rows: m,
        pivot_cols,
    }
}

/// The rank of a rational matrix, computed exactly.
pub fn rank(rows: &[Vec<Scalar>]) -> Result<usize, GradedError> {
    let ncols = check_rectangular(rows)?;
    let m: Vec<Vec<BigInt>> = rows.iter().map(|r| integerize(r)).collect();
    Ok(bareiss(m, ncols).pivot_cols.len())
}

/// An exact basis of the null space `{v : A v = 0}`.
///
/// Each basis vector is normalized to primitive integer entries with the
/// first nonzero entry positive; there is one vector per free column, so the
/// count equals `ncols - rank`. The empty list means a trivial kernel.
pub fn kernel_basis(rows: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, GradedError> {
    let ncols = check_rectangular(rows)?;
    if ncols == 0 {
        return Ok(Vec::new());
    }
    let m: Vec<Vec<BigInt>> = rows.iter().map(|r| integerize(r)).collect();
    let ech = bareiss(m, ncols);
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; ncols];
        for (i, &c) in ech.pivot_cols.iter().enumerate() {
            v[c] = Some(i);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set[free].is_some() {
            continue;
        }
        // Back-substitute with the free column set to 1.
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (i, &pc) in ech.pivot_cols.iter().enumerate().rev() {
            let mut sum = Scalar::zero();
            for j in pc + 1..ncols {
                if !ech.rows[i][j].is_zero() && !v[j].is_zero() {
                    sum += Scalar::from_big(ech.rows[i][j].clone(), BigInt::one()) * v[j].clone();
                }
            }
            let piv = Scalar::from_big(ech.rows[i][pc].clone(), BigInt::one());
            v[pc] = -(sum / piv);
        }
        basis.push(primitive(v));
    }
    Ok(basis)
}

/// Scales a rational vector to primitive integer form, leading entry positive.
fn primitive(v: Vec<Scalar>) -> Vec<Scalar> {
    let ints = integerize(&v);
    let mut g = BigInt::zero();
    for x in &ints {
        g = num_integer::gcd(g, x.clone());
    }
    if g.is_zero() {
        return v;
    }
    let lead_neg = ints.iter().find(|x| !x.is_zero()).map(|x| x.is_negative());
    let sign = if lead_neg == Some(true) { -1 } else { 1 };
    ints.into_iter()
        .map(|x| Scalar::from_big(x * sign, g.clone()))
        .collect()
}

/// Solves `A x = b` exactly; `None` when the system is inconsistent. When the
/// solution is not unique an arbitrary particular solution is returned.
pub fn solve(rows: &[Vec<Scalar>], rhs: &[Scalar]) -> Result<Option<Vec<Scalar>>, GradedError> {
    let ncols = check_rectangular(rows)?;
    if rows.len() != rhs.len() {
        return Err(GradedError::RaggedRows {
            row: rows.len(),
            got: rhs.len(),
            want: rows.len(),
        });
    }
    let aug: Vec<Vec<Scalar>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let m: Vec<Vec<BigInt>> = aug.iter().map(|r| integerize(r)).collect();
    let ech = bareiss(m, ncols + 1);
    if ech.pivot_cols.contains(&ncols) {
        return Ok(None); // pivot in the augmented column
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (i, &pc) in ech.pivot_cols.iter().enumerate().rev() {
        let mut sum = Scalar::from_big(ech.rows[i][ncols].clone(), BigInt::one());
        for j in pc + 1..ncols {
            if !ech.rows[i][j].is_zero() && !x[j].is_zero() {
                sum -= Scalar::from_big(ech.rows[i][j].clone(), BigInt::one()) * x[j].clone();
            }
        }
        x[pc] = sum / Scalar::from_big(ech.rows[i][pc].clone(), BigInt::one());
    }
    Ok(Some(x))
}

/// Attaches labels to the kernel vectors of [`kernel_basis`].
pub fn kernel_basis_labeled(
    rows: &[Vec<Scalar>],
    column_labels: &[String],
) -> Result<Vec<GradedVector>, GradedError> {
    let basis = kernel_basis(rows)?;
    Ok(basis
        .into_iter()
        .map(|v| {
            GradedVector::from_terms(
                v.into_iter()
                    .enumerate()
                    .map(|(i, c)| (column_labels[i].clone(), c)),
            )
        })
        .collect())
}
