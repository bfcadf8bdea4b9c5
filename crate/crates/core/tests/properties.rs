use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use proptest::prelude::*;

use wfa_aak::aak::{block_diagonalize, HankelSize, ReduceOptions, Verification};
use wfa_aak::extensions::{reflect_unstable, split_stable_unstable};
use wfa_aak::linalg::{ordered_schur, solve_discrete_lyapunov, solve_stein, solve_sylvester, Matrix};
use wfa_aak::random::{random_mixed, random_orthogonal, random_stable_wfa, random_sva, seeded};
use wfa_aak::symbol::{symbol_eval, unimodularity_check};
use wfa_aak::wfa::{from_json, gramians, to_json};
use wfa_aak::{aak_reduce, equivalent, minimize, to_sva, Tolerances, Wfa};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn stable_matrix(seed: u64, n: usize, radius: f64) -> Matrix {
    random_stable_wfa(&mut seeded(seed), n, radius).transition().clone()
}

fn max_series_gap(a: &Wfa, b: &Wfa, len: usize) -> f64 {
    a.coefficients(len).iter().zip(b.coefficients(len)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lyapunov_solution_is_psd_and_solves(seed in any::<u64>(), n in 1usize..12) {
        let a = stable_matrix(seed, n, 0.95);
        let b = random_orthogonal(&mut seeded(seed ^ 1), n).column(0).into_owned();
        let s = &b * b.transpose();
        let p = solve_discrete_lyapunov(&a, &s, &tol()).unwrap();
        let res = (&p - &a * &p * a.transpose() - &s).norm();
        prop_assert!(res <= 1e-10 * p.norm().max(1.0));
        let min = SymmetricEigen::new(p.clone()).eigenvalues.min();
        prop_assert!(min >= -1e-10 * p.norm());
    }

    #[test]
    fn stein_matches_dense_kronecker(seed in any::<u64>(), n in 1usize..6, m in 1usize..6) {
        let a = stable_matrix(seed, n, 0.9);
        let b = stable_matrix(seed ^ 2, m, 0.9);
        let c = random_orthogonal(&mut seeded(seed ^ 3), n.max(m)).view((0, 0), (n, m)).into_owned();
        let x = solve_stein(&a, &b, &c, &tol()).unwrap();
        prop_assert!((&x - &a * &x * &b - &c).norm() <= 1e-12 * x.norm().max(1.0));
    }

    #[test]
    fn sylvester_solution_solves(seed in any::<u64>(), n in 1usize..7, m in 1usize..7) {
        let ap = stable_matrix(seed, n, 0.8);
        let am = stable_matrix(seed ^ 4, m, 0.8).try_inverse().unwrap();
        let c = random_orthogonal(&mut seeded(seed ^ 5), n.max(m)).view((0, 0), (n, m)).into_owned();
        let x = solve_sylvester(&ap, &am, &c).unwrap();
        let res = (&ap * &x - &x * &am + &c).norm();
        prop_assert!(res <= 1e-10 * (1.0 + x.norm() * (ap.norm() + am.norm())));
    }

    #[test]
    fn ordered_schur_is_orthogonal_similarity_sorted_by_modulus(seed in any::<u64>(), n in 1usize..10) {
        let a = random_mixed(&mut seeded(seed), n.div_ceil(2), n / 2).transition().clone();
        let f = ordered_schur(&a, &tol()).unwrap();
        prop_assert!((f.u.transpose() * &f.u - Matrix::identity(n, n)).amax() < 1e-12);
        prop_assert!((&f.u * &f.t * f.u.transpose() - &a).norm() < 1e-11 * a.norm());
        let mods: Vec<f64> = f.eigenvalues().iter().map(|z| z.norm()).collect();
        for w in mods.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-9 * w[1]);
        }
        prop_assert_eq!(f.split_index, mods.iter().filter(|&&m| m < 1.0).count());
        for (start, size) in f.blocks() {
            for r in start + size..n {
                for c in start..start + size {
                    prop_assert_eq!(f.t[(r, c)], 0.0);
                }
            }
        }
    }

    #[test]
    fn sva_has_diagonal_gramians_and_same_series(seed in any::<u64>(), n in 1usize..7) {
        let w = random_stable_wfa(&mut seeded(seed), n, 0.9);
        let s = to_sva(&w, &tol()).unwrap();
        let r = s.residuals();
        prop_assert!(r.lyapunov <= 1e-8 && r.sign_symmetry <= 1e-8);
        let g = gramians(s.wfa(), &tol()).unwrap();
        let d = Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(s.singular_numbers()));
        prop_assert!((&g.p - &d).amax() <= 1e-8 * s.singular_numbers()[0]);
        prop_assert!((&g.q - &d).amax() <= 1e-8 * s.singular_numbers()[0]);
        for win in s.singular_numbers().windows(2) {
            prop_assert!(win[0] >= win[1]);
        }
        prop_assert!(equivalent(&w, s.wfa(), 4 * n + 4, &tol()));
    }

    #[test]
    fn minimization_is_idempotent_and_preserves_series(seed in any::<u64>(), n in 1usize..6) {
        let w = random_stable_wfa(&mut seeded(seed), n, 0.9);
        let doubled = w.sum(&w.scaled(-0.5));
        let m = minimize(&doubled, &tol());
        prop_assert!(m.n() <= n);
        let scale = w.coefficients(1)[0].abs().max(1.0);
        prop_assert!(max_series_gap(&doubled, &m, 3 * n + 3) <= 1e-9 * scale);
        let mm = minimize(&m, &tol());
        prop_assert_eq!(mm.n(), m.n());
    }

    #[test]
    fn json_round_trip_is_bit_exact(
        alpha in prop::collection::vec(-1e300f64..1e300, 3),
        a in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 9),
        beta in prop::collection::vec(-1e-300f64..1e-300, 3),
    ) {
        let w = Wfa::new(
            nalgebra::DVector::from_vec(alpha),
            Matrix::from_row_slice(3, 3, &a),
            nalgebra::DVector::from_vec(beta),
        ).unwrap();
        let back = from_json(&to_json(&w)).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn block_diagonalization_preserves_symbol(seed in any::<u64>(), ns in 1usize..4, nu in 0usize..4) {
        let w = random_mixed(&mut seeded(seed), ns, nu);
        let (s, u) = block_diagonalize(&w, &tol()).unwrap();
        prop_assert_eq!(s.n(), ns);
        prop_assert!(s.spectral_radius() < 1.0);
        let sum = if u.n() == 0 { s.clone() } else { s.sum(&u) };
        for j in 0..6 {
            let z = Complex64::from_polar(1.0, 0.3 + j as f64);
            let a = symbol_eval(&w, z, &tol()).unwrap();
            let b = symbol_eval(&sum, z, &tol()).unwrap();
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn split_sums_back_and_reflection_inverts(seed in any::<u64>(), ns in 1usize..4, nu in 1usize..4) {
        let w = random_mixed(&mut seeded(seed), ns, nu);
        let split = split_stable_unstable(&w, &tol()).unwrap();
        for k in 0..=2 * w.n() {
            let f = w.evaluate(k);
            let g = split.stable.evaluate(k) + split.unstable.evaluate(k);
            prop_assert!((f - g).abs() <= 1e-8 * f.abs().max(1.0));
        }
        let r = reflect_unstable(&split.unstable).unwrap();
        prop_assert!(r.spectral_radius() < 1.0);
        let back = reflect_unstable(&r).unwrap();
        prop_assert!(max_series_gap(&back, &split.unstable, 6) <= 1e-9 * split.unstable.evaluate(0).abs().max(1.0) * 5f64.powi(6));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_attains_singular_number(seed in any::<u64>(), n in 2usize..6, kk in 0usize..5) {
        let s = random_sva(&mut seeded(seed), n, 0.9, 1e-3, &tol()).unwrap();
        let k = 1 + kk % (n - 1);
        let opts = ReduceOptions { verification: Verification::On, hankel_size: HankelSize::Auto, ..Default::default() };
        let rep = aak_reduce(&s, k, &opts).unwrap();
        prop_assert_eq!(rep.reduced.n(), k);
        prop_assert!(rep.reduced.spectral_radius() < 1.0);
        let err = rep.achieved_error().unwrap();
        prop_assert!((err / rep.sigma_k - 1.0).abs() <= 1e-6);
        prop_assert!(rep.allpass.max() <= 1e-8);
        prop_assert!(rep.certified);
    }

    #[test]
    fn error_ratio_is_unimodular(seed in any::<u64>(), n in 2usize..6, kk in 0usize..5) {
        let s = random_sva(&mut seeded(seed), n, 0.9, 1e-3, &tol()).unwrap();
        let k = kk % n;
        let u = unimodularity_check(&s, k, 256, &tol()).unwrap();
        prop_assert!(u.max_deviation <= 1e-8);
    }
}
