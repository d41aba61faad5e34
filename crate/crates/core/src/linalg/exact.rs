//! Fraction-free elimination over the integers.
//!
//! Rational matrices are scaled row by row to integer matrices (row scaling
//! preserves row space and kernel) and reduced with Bareiss-style
//! one-step division, so every intermediate entry is a minor of the input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Mat, Rational};
use crate::error::{Error, Result};

/// Cap on the bit length of any intermediate integer.
pub const MAX_BITS: u64 = 1_000_000;

pub(crate) struct Reduced {
    pub a: Vec<Vec<BigInt>>,
    /// `pivots[k]` is the pivot column of row `k`.
    pub pivots: Vec<usize>,
    /// Common value of every pivot entry after Gauss-Jordan reduction.
    pub det: BigInt,
}

fn lcm_of_denominators(row: &[Rational]) -> BigInt {
    row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales each row by the lcm of its denominators.
pub(crate) fn integer_rows(m: &Mat<Rational>) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let l = lcm_of_denominators(row);
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

fn check_bits(v: &BigInt) -> Result<()> {
    if v.bits() > MAX_BITS {
        Err(Error::BitLengthExceeded(MAX_BITS))
    } else {
        Ok(())
    }
}

/// Fraction-free elimination. Pivots are searched only in the first
/// `pivot_cols` columns. With `jordan` set, entries above each pivot are
/// cleared too and all pivots end up equal to `det`.
pub(crate) fn fraction_free(
    mut a: Vec<Vec<BigInt>>,
    ncols: usize,
    pivot_cols: usize,
    jordan: bool,
) -> Result<Reduced> {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols.min(ncols) {
        if r == nrows {
            break;
        }
        // Smallest nonzero entry keeps growth down.
        let Some(p) = (r..nrows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].bits())
        else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        let targets: Vec<usize> = if jordan {
            (0..nrows).filter(|&i| i != r).collect()
        } else {
            (r + 1..nrows).collect()
        };
        let pivot_row = a[r].clone();
        for i in targets {
            let f = a[i][c].clone();
            for (entry, p) in a[i].iter_mut().zip(&pivot_row) {
                let num = &piv * &*entry - &f * p;
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free division must be exact");
                check_bits(&q)?;
                *entry = q;
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    Ok(Reduced {
        a,
        pivots,
        det: prev,
    })
}

pub(crate) fn rank(m: &Mat<Rational>) -> Result<usize> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0);
    }
    let red = fraction_free(integer_rows(m), m.cols(), m.cols(), false)?;
    Ok(red.pivots.len())
}

/// Makes the first nonzero entry positive and divides out the content.
fn normalize_integer_vector(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return;
    }
    let neg = v
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    for x in v.iter_mut() {
        *x = &*x / &g;
        if neg {
            *x = -&*x;
        }
    }
}

/// Kernel basis, one column per free variable (in column order).
pub(crate) fn null_space(m: &Mat<Rational>) -> Result<Mat<Rational>> {
    let n = m.cols();
    if m.rows() == 0 {
        return Ok(Mat::identity(n));
    }
    let red = fraction_free(integer_rows(m), n, n, true)?;
    let free: Vec<usize> = (0..n).filter(|c| !red.pivots.contains(c)).collect();
    let mut cols = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![BigInt::zero(); n];
        v[f] = red.det.clone();
        for (k, &pc) in red.pivots.iter().enumerate() {
            v[pc] = -red.a[k][f].clone();
        }
        normalize_integer_vector(&mut v);
        cols.push(v.into_iter().map(Rational::from_integer).collect());
    }
    Mat::from_columns(&cols, n)
}

/// Indices of a maximal set of independent columns, greedy in column order.
pub(crate) fn pivot_columns(m: &Mat<Rational>) -> Result<Vec<usize>> {
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let red = fraction_free(integer_rows(m), m.cols(), m.cols(), false)?;
    Ok(red.pivots)
}

fn augmented(a: &Mat<Rational>, rhs: &Mat<Rational>) -> Vec<Vec<BigInt>> {
    (0..a.rows())
        .map(|i| {
            let row: Vec<Rational> = a.row(i).iter().chain(rhs.row(i)).cloned().collect();
            let l = lcm_of_denominators(&row);
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Some solution of `a x = b` (free variables zero), or `None` when the
/// system is inconsistent.
pub(crate) fn solve(a: &Mat<Rational>, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    let n = a.cols();
    let rhs = Mat::from_columns(&[b.to_vec()], a.rows())?;
    let red = fraction_free(augmented(a, &rhs), n + 1, n, true)?;
    let r = red.pivots.len();
    if red.a[r..].iter().any(|row| !row[n].is_zero()) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); n];
    for (k, &pc) in red.pivots.iter().enumerate() {
        x[pc] = Rational::new(red.a[k][n].clone(), red.det.clone());
    }
    Ok(Some(x))
}

pub(crate) fn inverse(m: &Mat<Rational>) -> Result<Option<Mat<Rational>>> {
    let n = m.rows();
    assert!(m.is_square(), "inverse of a non-square matrix");
    let red = fraction_free(augmented(m, &Mat::identity(n)), 2 * n, n, true)?;
    if red.pivots.len() < n {
        return Ok(None);
    }
    Ok(Some(Mat::from_fn(n, n, |i, j| {
        Rational::new(red.a[i][n + j].clone(), red.det.clone())
    })))
}

/// `A (AᵀA)⁻¹ Aᵀ` with dependent columns pruned first.
pub(crate) fn projection(a: &Mat<Rational>) -> Result<Mat<Rational>> {
    let keep = pivot_columns(a)?;
    let a = a.select_columns(&keep);
    let at = a.transpose();
    let gram = &at * &a;
    let inv = inverse(&gram)?.ok_or(Error::SingularGram)?;
    Ok(&(&a * &inv) * &at)
}
