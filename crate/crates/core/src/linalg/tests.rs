use proptest::prelude::*;

use super::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn ints<T: Field>(rows: &[&[i64]]) -> Mat<T> {
    let cols = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(rows.len(), cols, |i, j| T::from_i64(rows[i][j]))
}

/// Textbook elimination over the rationals, used as an independent oracle.
fn naive_rank(m: &Mat<Rational>) -> usize {
    let mut a = m.row_vecs();
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone() / a[r][c].clone();
                let pivot_row = a[r].clone();
                for (entry, p) in a[i].iter_mut().zip(&pivot_row) {
                    *entry = entry.clone() - p.clone() * f.clone();
                }
            }
        }
        r += 1;
    }
    r
}

fn rational_matrix() -> impl Strategy<Value = Mat<Rational>> {
    (1usize..=8, 1usize..=12).prop_flat_map(|(r, c)| {
        proptest::collection::vec((-5i64..=5, 1i64..=5), r * c).prop_map(move |e| {
            Mat::from_fn(r, c, |i, j| {
                let (n, d) = e[i * c + j];
                q(n, d)
            })
        })
    })
}

/// Low-rank products so rank deficiency actually occurs.
fn low_rank_matrix() -> impl Strategy<Value = Mat<Rational>> {
    (1usize..=8, 1usize..=12, 1usize..=4).prop_flat_map(|(r, c, k)| {
        (
            proptest::collection::vec(-3i64..=3, r * k),
            proptest::collection::vec(-3i64..=3, k * c),
        )
            .prop_map(move |(a, b)| {
                let a = Mat::from_fn(r, k, |i, j| Rational::from_i64(a[i * k + j]));
                let b = Mat::from_fn(k, c, |i, j| Rational::from_i64(b[i * c + j]));
                &a * &b
            })
    })
}

#[test]
fn rank_examples() {
    assert_eq!(rank(&Mat::<Rational>::identity(2), &tol()).unwrap(), 2);
    assert_eq!(
        rank(&ints::<Rational>(&[&[1, 1], &[1, 1]]), &tol()).unwrap(),
        1
    );
    assert_eq!(rank(&ints::<f64>(&[&[1, 1], &[1, 1]]), &tol()).unwrap(), 1);
    let m = ints::<Rational>(&[&[1, 0, 1], &[0, 1, 1]]);
    assert_eq!(rank(&m, &tol()).unwrap(), 2);
    assert_eq!(rank(&m.to_f64(), &tol()).unwrap(), 2);
    assert_eq!(rank(&Mat::<f64>::zeros(3, 2), &tol()).unwrap(), 0);
    assert_eq!(rank(&Mat::<Rational>::zeros(3, 2), &tol()).unwrap(), 0);
}

#[test]
fn null_space_examples() {
    assert_eq!(
        null_space_basis(&Mat::<f64>::identity(3), &tol())
            .unwrap()
            .cols(),
        0
    );

    let k = null_space_basis(&ints::<Rational>(&[&[1, 1]]), &tol()).unwrap();
    assert_eq!(k.cols(), 1);
    assert_eq!(k[(0, 0)], -k[(1, 0)].clone());
    assert!(!k[(0, 0)].is_zero());

    let m = ints::<Rational>(&[&[1, 0, 1], &[0, 1, 1]]);
    let k = null_space_basis(&m, &tol()).unwrap();
    assert_eq!(k.cols(), 1);
    let v = k.column(0);
    assert_eq!(v[0], v[1]);
    assert_eq!(v[0], -v[2].clone());

    let kf = null_space_basis(&m.to_f64(), &tol()).unwrap();
    let v = kf.column(0);
    let s = 1.0 / 3f64.sqrt();
    assert!((v[0].abs() - s).abs() < 1e-12 && (v[0] - v[1]).abs() < 1e-12);
    assert!((v[0] + v[2]).abs() < 1e-12);
}

#[test]
fn projection_examples() {
    let p = projection_onto_colspace(&ints::<Rational>(&[&[1], &[0]]), &tol()).unwrap();
    assert_eq!(p, ints(&[&[1, 0], &[0, 0]]));
    let p = projection_onto_colspace(&ints::<Rational>(&[&[1], &[1]]), &tol()).unwrap();
    assert_eq!(p, Mat::from_fn(2, 2, |_, _| q(1, 2)));
    let p = projection_onto_colspace(&Mat::<Rational>::identity(2), &tol()).unwrap();
    assert_eq!(p, Mat::identity(2));
    let pf = projection_onto_colspace(&ints::<f64>(&[&[1], &[1]]), &tol()).unwrap();
    assert!(pf.approx_eq(&Mat::from_fn(2, 2, |_, _| 0.5), 1e-12));
    // dependent columns are pruned
    let p = projection_onto_colspace(&ints::<Rational>(&[&[1, 2], &[1, 2]]), &tol()).unwrap();
    assert_eq!(p, Mat::from_fn(2, 2, |_, _| q(1, 2)));
}

#[test]
fn eigen_examples() {
    let (l, v) = symmetric_eigen(&ints(&[&[3, 0], &[0, 1]]), &tol()).unwrap();
    assert_eq!(l, vec![3.0, 1.0]);
    assert!((v[(0, 0)].abs() - 1.0).abs() < 1e-12);
    let (l, _) = symmetric_eigen(&ints(&[&[2, 1], &[1, 2]]), &tol()).unwrap();
    assert!((l[0] - 3.0).abs() < 1e-12 && (l[1] - 1.0).abs() < 1e-12);
    let (l, _) = symmetric_eigen(&Mat::identity(2), &tol()).unwrap();
    assert!(l.iter().all(|x| (x - 1.0).abs() < 1e-12));
    assert!(matches!(
        symmetric_eigen(&ints(&[&[1, 2], &[0, 1]]), &tol()),
        Err(Error::NotSymmetric(_))
    ));
}

#[test]
fn inv_sqrt_examples() {
    let r = inv_sqrt_psd(&Mat::identity(2), &tol()).unwrap();
    assert!(r.approx_eq(&Mat::identity(2), 1e-12));
    let r = inv_sqrt_psd(&ints(&[&[4, 0], &[0, 1]]), &tol()).unwrap();
    assert!(r.approx_eq(
        &Mat::from_row_major(2, 2, vec![0.5, 0.0, 0.0, 1.0]).unwrap(),
        1e-12
    ));
    let s: Mat<f64> = ints(&[&[2, 1], &[1, 2]]);
    let r = inv_sqrt_psd(&s, &tol()).unwrap();
    assert!((&(&r * &s) * &r).approx_eq(&Mat::identity(2), 1e-12));
    assert!(matches!(
        inv_sqrt_psd(&ints(&[&[1, 0], &[0, 0]]), &tol()),
        Err(Error::NotPositiveDefinite(_))
    ));
}

#[test]
fn kernel_basis_examples() {
    assert_eq!(
        orthonormal_kernel_basis(&Mat::identity(2), &tol()).cols(),
        0
    );
    let k = orthonormal_kernel_basis(&ints(&[&[1, 0]]), &tol());
    assert!(k.approx_eq(&Mat::from_row_major(2, 1, vec![0.0, 1.0]).unwrap(), 1e-12));
    // three equiangular vectors scaled to a Parseval frame for R^2
    let c = (2.0f64 / 3.0).sqrt();
    let h = 3f64.sqrt() / 2.0;
    let t_star =
        Mat::from_row_major(2, 3, vec![c, -c / 2.0, -c / 2.0, 0.0, c * h, -c * h]).unwrap();
    let k = orthonormal_kernel_basis(&t_star, &tol());
    assert_eq!(k.cols(), 1);
    let v = k.column(0);
    assert!((norm_f64(&v) - 1.0).abs() < 1e-12);
    assert!(t_star
        .mul_vec(&v)
        .iter()
        .all(|x: &f64| f64::abs(*x) < 1e-12));
    assert!(v[0] > 0.0);
}

#[test]
fn solve_and_inverse() {
    let a: Mat<Rational> = ints(&[&[2, 1], &[1, 1]]);
    let x = Rational::solve(&a, &[q(3, 1), q(2, 1)], &tol())
        .unwrap()
        .unwrap();
    assert_eq!(x, vec![q(1, 1), q(1, 1)]);
    let inv = Rational::inverse(&a, &tol()).unwrap().unwrap();
    assert_eq!(&a * &inv, Mat::identity(2));
    let s: Mat<Rational> = ints(&[&[1, 1], &[1, 1]]);
    assert!(Rational::inverse(&s, &tol()).unwrap().is_none());
    assert!(Rational::solve(&s, &[q(1, 1), q(0, 1)], &tol())
        .unwrap()
        .is_none());
    assert!(f64::solve(&s.to_f64(), &[1.0, 0.0], &tol())
        .unwrap()
        .is_none());
}

#[test]
fn greedy_picks_first_basis() {
    let v: Vec<Vec<Rational>> = [[1, 0], [2, 0], [1, 1], [0, 1]]
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_i64(x)).collect())
        .collect();
    assert_eq!(greedy_independent(&v, 2, &tol()).unwrap(), vec![0, 2]);
}

#[test]
fn tolerance_validation() {
    assert!(Tolerance::new(0.0, 1e-12, 1e-9).is_err());
    assert!(Tolerance::new(1e-10, f64::NAN, 1e-9).is_err());
    assert!(Tolerance::new(1e-10, 1e-12, 1e-9).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_rank_matches_naive_oracle(m in rational_matrix()) {
        prop_assert_eq!(rank(&m, &tol()).unwrap(), naive_rank(&m));
    }

    #[test]
    fn float_rank_matches_exact(m in rational_matrix()) {
        prop_assert_eq!(rank(&m.to_f64(), &tol()).unwrap(), rank(&m, &tol()).unwrap());
    }

    #[test]
    fn float_rank_matches_exact_on_low_rank(m in low_rank_matrix()) {
        let r = naive_rank(&m);
        prop_assert_eq!(rank(&m, &tol()).unwrap(), r);
        prop_assert_eq!(rank(&m.to_f64(), &tol()).unwrap(), r);
    }

    #[test]
    fn null_space_is_kernel(m in low_rank_matrix()) {
        let k = null_space_basis(&m, &tol()).unwrap();
        prop_assert_eq!(k.cols(), m.cols() - naive_rank(&m));
        prop_assert!((&m * &k).max_abs() == 0.0);
        let mf = m.to_f64();
        let kf = null_space_basis(&mf, &tol()).unwrap();
        prop_assert_eq!(kf.cols(), k.cols());
        prop_assert!((&mf * &kf).max_abs() <= tol().witness_tol * mf.max_abs());
        prop_assert!((&kf.transpose() * &kf).approx_eq(&Mat::identity(kf.cols()), 1e-9));
    }

    #[test]
    fn projections_are_idempotent_and_symmetric(m in low_rank_matrix()) {
        let p = projection_onto_colspace(&m, &tol()).unwrap();
        prop_assert_eq!(&(&p * &p), &p);
        prop_assert_eq!(&p.transpose(), &p);
        prop_assert_eq!(naive_rank(&p), naive_rank(&m));
        let pf = projection_onto_colspace(&m.to_f64(), &tol()).unwrap();
        prop_assert!((&pf * &pf).max_abs_diff(&pf) <= 1e-9);
        prop_assert!(pf.transpose().max_abs_diff(&pf) <= 1e-9);
        prop_assert!(pf.max_abs_diff(&p.to_f64()) <= 1e-9);
    }

    #[test]
    fn inv_sqrt_on_conditioned_spd(
        n in 1usize..=6,
        seed in any::<u64>(),
        log_cond in 0.0f64..=6.0,
    ) {
        let mut rng = crate::random::rng(seed);
        let q = crate::random::orthogonal_matrix(n, &mut rng);
        let lambdas: Vec<f64> = (0..n)
            .map(|i| if n == 1 { 1.0 } else { 10f64.powf(-log_cond * i as f64 / (n - 1) as f64) })
            .collect();
        let d = Mat::from_fn(n, n, |i, j| if i == j { lambdas[i] } else { 0.0 });
        let s = &(&q * &d) * &q.transpose();
        let s = Mat::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
        let r = inv_sqrt_psd(&s, &tol()).unwrap();
        prop_assert!((&(&r * &s) * &r).max_abs_diff(&Mat::identity(n)) <= 1e-9);
    }
}
