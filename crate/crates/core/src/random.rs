//! Seeded generators for randomized checks and examples.
//!
//! Everything is driven by `ChaCha8Rng`, so a seed reproduces the same
//! objects on every platform and thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::frame::Frame;
use crate::linalg::{self, Field, Mat, Rational, Tolerance};
use crate::naimark::NaimarkPair;
use crate::spark::{is_full_spark, DEFAULT_MAX_M};
use crate::subspace::{Subspace, SubspaceFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = rng(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform on the unit sphere.
pub fn unit_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = linalg::norm_f64(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn gaussian_frame<R: Rng>(n: usize, m: usize, rng: &mut R) -> Frame<f64> {
    Frame::new(n, (0..m).map(|_| gaussian_vector(n, rng)).collect()).expect("n, m > 0")
}

pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat<f64> {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Integer entries drawn uniformly from `-bound..=bound`.
pub fn integer_vector<R: Rng>(n: usize, bound: i64, rng: &mut R) -> Vec<Rational> {
    (0..n)
        .map(|_| Rational::from_i64(rng.random_range(-bound..=bound)))
        .collect()
}

pub fn integer_frame<R: Rng>(n: usize, m: usize, bound: i64, rng: &mut R) -> Frame<Rational> {
    Frame::new(n, (0..m).map(|_| integer_vector(n, bound, rng)).collect()).expect("n, m > 0")
}

/// Small rationals `p/q` with `|p| <= 4`, `1 <= q <= 3`.
pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::from_ratio(rng.random_range(-4..=4), rng.random_range(1..=3))
}

pub fn rational_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Mat<Rational> {
    Mat::from_fn(rows, cols, |_, _| small_rational(rng))
}

/// Integer frame resampled until it is full spark (exactly).
pub fn full_spark_integer_frame<R: Rng>(n: usize, m: usize, rng: &mut R) -> Frame<Rational> {
    let tol = Tolerance::default();
    loop {
        let f = integer_frame(n, m, 5, rng);
        if is_full_spark(&f, &tol, DEFAULT_MAX_M).unwrap_or(false) {
            return f;
        }
    }
}

/// Rational orthogonal matrix `(I - A)(I + A)⁻¹` for a random skew-symmetric
/// `A`. `I + A` is always invertible because `A` has imaginary spectrum.
pub fn cayley_orthogonal<R: Rng>(m: usize, rng: &mut R) -> Mat<Rational> {
    let mut a = Mat::<Rational>::zeros(m, m);
    for i in 0..m {
        for j in i + 1..m {
            let v = small_rational(rng);
            a[(j, i)] = -v.clone();
            a[(i, j)] = v;
        }
    }
    let id = Mat::identity(m);
    let inv = linalg::exact::inverse(&(&id + &a))
        .expect("small entries")
        .expect("I + A is invertible for skew A");
    &(&id - &a) * &inv
}

/// Exact Naimark pair read off the columns of a rational orthogonal
/// matrix: the top `n` entries of each column form the primary frame, the
/// rest the complement.
pub fn rational_naimark_pair<R: Rng>(n: usize, m: usize, rng: &mut R) -> NaimarkPair<Rational> {
    assert!(0 < n && n < m, "need 0 < n < m");
    let q = cayley_orthogonal(m, rng);
    let top = (0..m)
        .map(|j| (0..n).map(|i| q[(i, j)].clone()).collect())
        .collect();
    let bottom = (0..m)
        .map(|j| (n..m).map(|i| q[(i, j)].clone()).collect())
        .collect();
    NaimarkPair::new(
        Frame::new(n, top).expect("shape"),
        Frame::new(m - n, bottom).expect("shape"),
    )
    .expect("same length")
}

/// Orthogonal `n x n` matrix from the SVD basis of a Gaussian matrix.
pub fn orthogonal_matrix<R: Rng>(n: usize, rng: &mut R) -> Mat<f64> {
    let tol = Tolerance::default();
    loop {
        let q = f64::column_basis(&gaussian_matrix(n, n, rng), &tol).expect("float");
        if q.cols() == n {
            return q;
        }
    }
}

/// Random `k`-dimensional subspace of `R^n`.
pub fn random_subspace<R: Rng>(n: usize, k: usize, rng: &mut R) -> Subspace<f64> {
    let tol = Tolerance::default();
    loop {
        let s = Subspace::from_matrix(&gaussian_matrix(n, k, rng), &tol).expect("float");
        if s.dim() == k {
            return s;
        }
    }
}

/// Random composition of `n` into at least `min_parts` positive parts.
pub fn composition<R: Rng>(n: usize, min_parts: usize, rng: &mut R) -> Vec<usize> {
    assert!(min_parts <= n);
    loop {
        let mut parts = Vec::new();
        let mut left = n;
        while left > 0 {
            let p = rng.random_range(1..=left);
            parts.push(p);
            left -= p;
        }
        if parts.len() >= min_parts {
            return parts;
        }
    }
}

/// Family of generic subspaces whose dimensions sum to `n`.
pub fn sum_dim_family<R: Rng>(n: usize, min_parts: usize, rng: &mut R) -> SubspaceFamily<f64> {
    let members = composition(n, min_parts, rng)
        .into_iter()
        .map(|k| random_subspace(n, k, rng))
        .collect();
    SubspaceFamily::new(n, members).expect("nonempty")
}

/// Mutually orthogonal subspaces whose dimensions sum to `n`.
pub fn orthogonal_sum_dim_family<R: Rng>(
    n: usize,
    min_parts: usize,
    rng: &mut R,
) -> SubspaceFamily<f64> {
    let tol = Tolerance::default();
    let q = orthogonal_matrix(n, rng);
    let mut start = 0;
    let mut members = Vec::new();
    for k in composition(n, min_parts, rng) {
        let cols: Vec<usize> = (start..start + k).collect();
        members.push(Subspace::from_matrix(&q.select_columns(&cols), &tol).expect("float"));
        start += k;
    }
    SubspaceFamily::new(n, members).expect("nonempty")
}

/// Subspace spanned by `k` random small-integer vectors (dimension may drop).
pub fn integer_subspace<R: Rng>(n: usize, k: usize, rng: &mut R) -> Subspace<Rational> {
    let vectors: Vec<Vec<Rational>> = (0..k).map(|_| integer_vector(n, 3, rng)).collect();
    Subspace::from_spanning(n, &vectors, &Tolerance::default()).expect("exact")
}
