mod common;

use std::f64::consts::SQRT_2;

use common::{gaussian, jacobi_eigenvalues, random_sym};
use polybundle::linalg::{
    dot, extreme_eigs, extreme_eigs_with, smat, smat_values, svec, svec_dim, svec_index, svec_len,
    ConstraintOperator, EigMethod, EigOptions, LinalgError, Mat, SvecVector, SymMatrix, Which,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sym_from_seed(n: usize, density: f64, seed: u64) -> SymMatrix<f64> {
    random_sym(n, density, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn svec_of_identity() {
    assert_eq!(svec(&SymMatrix::<f64>::identity(2)).values(), &[1.0, 0.0, 1.0]);
}

#[test]
fn svec_scales_off_diagonal() {
    let a = SymMatrix::from_triplets(2, [(0, 0, 1.0), (1, 0, 2.0), (1, 1, 3.0)]).unwrap();
    assert_eq!(svec(&a).values(), &[1.0, 2.0 * SQRT_2, 3.0]);
}

#[test]
fn svec_order_is_column_major_lower() {
    let n = 4;
    let mut k = 0;
    for c in 0..n {
        for r in c..n {
            assert_eq!(svec_index(n, r, c), k);
            k += 1;
        }
    }
    assert_eq!(k, svec_len(n));
    assert_eq!(svec_dim(10), Some(4));
    assert_eq!(svec_dim(11), None);
}

#[test]
fn smat_of_unit_svec_is_identity() {
    let v = SvecVector::from_values(vec![1.0, 0.0, 1.0]).unwrap();
    assert_eq!(smat(&v), SymMatrix::identity(2));
}

#[test]
fn smat_of_zero_vector() {
    let z = smat(&SvecVector::<f64>::zeros(3));
    assert_eq!(z.n(), 3);
    assert_eq!(z.nnz(), 0);
}

#[test]
fn smat_rejects_non_triangular_length() {
    assert_eq!(
        smat_values(&[1.0, 2.0]).unwrap_err(),
        LinalgError::NotTriangular(2)
    );
}

#[test]
fn upper_triplets_are_mirrored_and_duplicates_rejected() {
    let a = SymMatrix::from_triplets(3, [(0, 2, 5.0)]).unwrap();
    assert_eq!(a.entries(), &[(2, 0, 5.0)]);
    assert_eq!(a.get(0, 2), 5.0);
    let dup = SymMatrix::from_triplets(3, [(0, 2, 1.0), (2, 0, 1.0)]);
    assert!(matches!(dup, Err(LinalgError::DuplicateEntry { .. })));
    let nan = SymMatrix::from_triplets(2, [(0, 0, f64::NAN)]);
    assert!(matches!(nan, Err(LinalgError::NonFinite { .. })));
}

#[test]
fn operator_on_identity() {
    let op = ConstraintOperator::from_matrices(2, &[SymMatrix::identity(2)]).unwrap();
    assert_eq!(op.apply(&SymMatrix::identity(2)).unwrap(), vec![2.0]);
    assert_eq!(op.adjoint(&[0.0]).unwrap().nnz(), 0);
}

#[test]
fn operator_rejects_wrong_sizes() {
    let op = ConstraintOperator::from_matrices(2, &[SymMatrix::<f64>::identity(2)]).unwrap();
    assert!(op.apply(&SymMatrix::identity(3)).is_err());
    assert!(op.adjoint(&[1.0, 2.0]).is_err());
    assert!(ConstraintOperator::from_matrices(2, &[SymMatrix::<f64>::identity(3)]).is_err());
}

fn sym_strategy(n: usize) -> impl Strategy<Value = SymMatrix<f64>> {
    prop::collection::vec(-10.0f64..10.0, svec_len(n)).prop_map(move |v| {
        let t = polybundle::linalg::svec_coords(n)
            .zip(v)
            .map(|((r, c), x)| (r, c, x));
        SymMatrix::from_triplets(n, t).unwrap()
    })
}

proptest! {
    #[test]
    fn svec_inner_matches_dense_loop(a in sym_strategy(4), b in sym_strategy(4)) {
        let (da, db) = (a.to_dense(), b.to_dense());
        let mut direct = 0.0;
        let mut scale = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                direct += da[(i, j)] * db[(i, j)];
                scale += (da[(i, j)] * db[(i, j)]).abs();
            }
        }
        let via_svec = svec(&a).dot(&svec(&b));
        prop_assert!((via_svec - direct).abs() <= 1e-12 * scale.max(1.0));
        prop_assert!((a.inner(&b) - direct).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn adjoint_identity(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<_> = (0..4).map(|_| random_sym(6, 0.5, &mut rng)).collect();
        let op = ConstraintOperator::from_matrices(6, &mats).unwrap();
        let x = random_sym(6, 0.7, &mut rng);
        let y: Vec<f64> = (0..4).map(|_| gaussian(&mut rng)).collect();
        let lhs = dot(&op.apply(&x).unwrap(), &y);
        let rhs = x.inner(&op.adjoint(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn smat_svec_roundtrip_is_close(a in sym_strategy(5)) {
        let back = smat(&svec(&a)).to_dense();
        let orig = a.to_dense();
        for (x, y) in back.as_slice().iter().zip(orig.as_slice()) {
            prop_assert!((x - y).abs() <= 2.0 * f64::EPSILON * y.abs());
        }
    }
}

#[test]
fn adjoint_is_sum_of_scaled_constraints() {
    let a1 = SymMatrix::from_triplets(3, [(0, 0, 1.0f64), (2, 1, -2.0)]).unwrap();
    let a2 = SymMatrix::from_triplets(3, [(1, 0, 0.5), (2, 2, 3.0)]).unwrap();
    let op = ConstraintOperator::from_matrices(3, &[a1.clone(), a2.clone()]).unwrap();
    let got = op.adjoint(&[2.0, -1.0]).unwrap().to_dense();
    let want = a1.axpby(2.0, &a2, -1.0).to_dense();
    for (x, y) in got.as_slice().iter().zip(want.as_slice()) {
        assert!((x - y).abs() < 1e-15);
    }
    assert_eq!(op.constraint_matrix(1).to_dense(), a2.to_dense());
}

#[test]
fn smallest_of_diagonal() {
    let d = SymMatrix::<f64>::diagonal(&[1.0, 2.0, 3.0]);
    let e = extreme_eigs(&d, 1, Which::Smallest).unwrap();
    assert!((e.values[0] - 1.0).abs() < 1e-14);
    let v = e.vectors.col(0);
    assert!((v[0].abs() - 1.0).abs() < 1e-14);
    assert!(v[1].abs() < 1e-14 && v[2].abs() < 1e-14);
}

#[test]
fn degenerate_spectrum_gives_orthonormal_vectors() {
    for method in [EigMethod::Dense, EigMethod::Lanczos] {
        let opts = EigOptions {
            method,
            ..EigOptions::default()
        };
        let i4 = SymMatrix::<f64>::identity(4);
        let e = extreme_eigs_with(&i4, 2, Which::Largest, &opts).unwrap();
        for &v in &e.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let g = e.vectors.gram();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((g[(1, 1)] - 1.0).abs() < 1e-12);
        assert!(g[(0, 1)].abs() < 1e-12);
    }
}

#[test]
fn eigen_count_is_validated() {
    let d = SymMatrix::<f64>::identity(3);
    assert!(matches!(
        extreme_eigs(&d, 0, Which::Smallest),
        Err(LinalgError::InvalidEigenCount { .. })
    ));
    assert!(extreme_eigs(&d, 4, Which::Smallest).is_err());
}

#[test]
fn jacobi_oracle_fixed_matrix() {
    // Frozen Jacobi eigenvalues of this matrix.
    let expected = [
        -1.7906532046211334,
        -0.06601691417861683,
        1.027373953477087,
        3.207281063058645,
        5.6220151022640135,
    ];
    let a = Mat::from_col_major(
        5,
        5,
        vec![
            4.0, 1.0, 0.0, -2.0, 0.5, //
            1.0, 3.0, 0.7, 0.0, 0.0, //
            0.0, 0.7, -1.0, 1.5, 0.0, //
            -2.0, 0.0, 1.5, 2.0, -0.3, //
            0.5, 0.0, 0.0, -0.3, 0.0,
        ],
    );
    let oracle = jacobi_eigenvalues(&a);
    for (o, e) in oracle.iter().zip(expected) {
        assert!((o - e).abs() < 1e-13);
    }
    let s = SymMatrix::from_dense(&a);
    for method in [EigMethod::Dense, EigMethod::Lanczos] {
        let opts = EigOptions {
            method,
            ..EigOptions::default()
        };
        let lo = extreme_eigs_with(&s, 2, Which::Smallest, &opts).unwrap();
        let hi = extreme_eigs_with(&s, 2, Which::Largest, &opts).unwrap();
        assert!((lo.values[0] - expected[0]).abs() < 1e-10);
        assert!((lo.values[1] - expected[1]).abs() < 1e-10);
        assert!((hi.values[0] - expected[4]).abs() < 1e-10);
        assert!((hi.values[1] - expected[3]).abs() < 1e-10);
    }
}

#[test]
fn random_sparse_matches_dense_oracle() {
    for seed in 0..4 {
        let s = sym_from_seed(50, 0.1, seed);
        let oracle = jacobi_eigenvalues(&s.to_dense());
        for method in [EigMethod::Dense, EigMethod::Lanczos] {
            let opts = EigOptions {
                method,
                ..EigOptions::default()
            };
            let e = extreme_eigs_with(&s, 3, Which::Smallest, &opts).unwrap();
            assert!(e.max_rel_residual(&s) <= 1e-9);
            for k in 0..3 {
                assert!((e.values[k] - oracle[k]).abs() < 1e-8, "{method:?} {k}");
            }
        }
    }
}

#[test]
fn largest_is_negated_smallest_of_negation() {
    for seed in 10..14 {
        let s = sym_from_seed(30, 0.2, seed);
        let hi = extreme_eigs(&s, 3, Which::Largest).unwrap();
        let lo = extreme_eigs(&s.neg(), 3, Which::Smallest).unwrap();
        for (a, b) in hi.values.iter().zip(&lo.values) {
            assert!((a + b).abs() < 1e-10);
        }
    }
}

#[test]
fn lanczos_path_above_dense_cutoff() {
    // n > 400 takes the Lanczos path under EigMethod::Auto.
    let n = 450;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let base = random_sym(n, 0.01, &mut rng);
    let shift = SymMatrix::diagonal(&(0..n).map(|i| i as f64 / 10.0).collect::<Vec<_>>());
    let s = base.axpby(1.0, &shift, 1.0);
    let e = extreme_eigs(&s, 4, Which::Largest).unwrap();
    assert!(e.max_rel_residual(&s) <= 1e-9);
    let dense = extreme_eigs_with(
        &s,
        4,
        Which::Largest,
        &EigOptions {
            method: EigMethod::Dense,
            ..EigOptions::default()
        },
    )
    .unwrap();
    for (a, b) in e.values.iter().zip(&dense.values) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn single_precision_eigenpairs() {
    let s = SymMatrix::<f32>::diagonal(&[3.0, -1.0, 2.0, 0.5]);
    let e = extreme_eigs(&s, 2, Which::Largest).unwrap();
    assert!((e.values[0] - 3.0).abs() < 1e-5);
    assert!((e.values[1] - 2.0).abs() < 1e-5);
}
