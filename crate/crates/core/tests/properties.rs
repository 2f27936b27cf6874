//! Randomised invariants of the linear algebra, norms, channels and doubling.

use cpnorm_core::channel::{choi, is_completely_positive, KrausMap, LinearMap};
use cpnorm_core::doubling::{
    abs_doubled, amosov_holevo_check, build_doubled, doubled_abs_output_trace, doubled_output_trace,
};
use cpnorm_core::random::{gaussian_hermitian, gaussian_matrix, random_low_rank, random_psd, random_unitary, rng_from_seed};
use cpnorm_core::{hermitian_eig, matrix_abs, polar_unitary, psd_power, schatten_norm, svd, ComplexMatrix, SchattenExponent, C64};
use proptest::prelude::*;

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), 1.0..6.0]
}

fn q(v: f64) -> SchattenExponent {
    SchattenExponent::new(v).unwrap()
}

fn channel(seed: u64, d_in: usize, d_out: usize) -> KrausMap {
    let min_rank = d_in.div_ceil(d_out);
    let rank = min_rank + (seed as usize % (d_in * d_out - min_rank + 1));
    KrausMap::random_stinespring(d_in, d_out, rank, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..=8) {
        let m = gaussian_hermitian(&mut rng_from_seed(seed), n);
        let e = hermitian_eig(&m).unwrap();
        let scale = 1.0 + m.max_abs();
        prop_assert!(max_diff(&e.reconstruct(), &m) <= 1e-12 * scale);
        let v = &e.eigenvectors;
        prop_assert!(max_diff(&(&v.adjoint() * v), &ComplexMatrix::identity(n)) <= 1e-12 * scale);
    }

    #[test]
    fn abs_is_psd_with_singular_spectrum(seed in any::<u64>(), n in 1usize..=5, rank in 1usize..=5) {
        let a = random_low_rank(&mut rng_from_seed(seed), n, rank.min(n));
        let abs = matrix_abs(&a).unwrap();
        let e = hermitian_eig(&abs).unwrap();
        let s = svd(&a).unwrap().values;
        prop_assert!(e.min_eigenvalue() >= -1e-10);
        for (l, s) in e.eigenvalues.iter().zip(&s) {
            prop_assert!((l - s).abs() <= 1e-10 * (1.0 + s));
        }
    }

    #[test]
    fn polar_identity_holds(seed in any::<u64>(), n in 1usize..=5, rank in 0usize..=5) {
        let mut rng = rng_from_seed(seed);
        let a = if rank == 0 { ComplexMatrix::zeros(n, n) } else { random_low_rank(&mut rng, n, rank.min(n)) };
        let u = polar_unitary(&a).unwrap();
        prop_assert!(max_diff(&(&u * &u.adjoint()), &ComplexMatrix::identity(n)) <= 1e-12);
        let abs = matrix_abs(&a).unwrap();
        let rotated = &(&u * &abs) * &u.adjoint();
        // (AA*)^{1/2} is checked through its square and through A = U|A|
        let scale = 1.0 + a.max_abs() * a.max_abs();
        prop_assert!(max_diff(&(&rotated * &rotated), &(&a * &a.adjoint())) <= 1e-10 * scale);
        prop_assert!(max_diff(&(&u * &abs), &a) <= 1e-10 * (1.0 + a.max_abs()));
        prop_assert!(max_diff(&rotated, &matrix_abs(&a.adjoint()).unwrap()) <= 1e-10 * (1.0 + a.max_abs()));
    }

    #[test]
    fn psd_power_semigroup(seed in any::<u64>(), n in 1usize..=4, s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let p = random_psd(&mut rng_from_seed(seed), n, n);
        let lhs = &psd_power(&p, s).unwrap() * &psd_power(&p, t).unwrap();
        let rhs = psd_power(&p, s + t).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-9 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn schatten_unitary_invariance(seed in any::<u64>(), n in 1usize..=4, e in exponent()) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(&mut rng, n, n);
        let (u, v) = (random_unitary(&mut rng, n), random_unitary(&mut rng, n));
        let base = schatten_norm(&a, q(e)).unwrap();
        let rotated = schatten_norm(&(&(&u * &a) * &v), q(e)).unwrap();
        prop_assert!((base - rotated).abs() <= 1e-10 * (1.0 + base));
    }

    #[test]
    fn schatten_homogeneity(seed in any::<u64>(), n in 1usize..=4, e in exponent(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let a = gaussian_matrix(&mut rng_from_seed(seed), n, n);
        let c = C64::new(re, im);
        let lhs = schatten_norm(&a.scale(c), q(e)).unwrap();
        let rhs = c.norm() * schatten_norm(&a, q(e)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn schatten_monotone_in_exponent(seed in any::<u64>(), n in 1usize..=4, e1 in exponent(), e2 in exponent()) {
        let a = gaussian_matrix(&mut rng_from_seed(seed), n, n);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let n_lo = schatten_norm(&a, q(lo)).unwrap();
        prop_assert!(n_lo + 1e-10 >= schatten_norm(&a, q(hi)).unwrap());
        prop_assert!(n_lo + 1e-10 >= schatten_norm(&a, SchattenExponent::Infinity).unwrap());
    }

    #[test]
    fn schatten_doubling(seed in any::<u64>(), n in 1usize..=4, e in exponent()) {
        let a = gaussian_matrix(&mut rng_from_seed(seed), n, n);
        let doubled = build_doubled(&a).unwrap();
        let lhs = schatten_norm(&doubled.assembled, q(e)).unwrap().powf(e);
        let rhs = 2.0 * schatten_norm(&a, q(e)).unwrap().powf(e);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn channel_linearity_and_hermiticity(seed in any::<u64>(), d_in in 2usize..=3, d_out in 2usize..=3, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let map = channel(seed, d_in, d_out);
        let mut rng = rng_from_seed(seed ^ 0xabc);
        let (a, b) = (gaussian_matrix(&mut rng, d_in, d_in), gaussian_matrix(&mut rng, d_in, d_in));
        let combo = &a.scale_real(alpha) + &b.scale_real(beta);
        let lhs = map.apply(&combo).unwrap();
        let rhs = &map.apply(&a).unwrap().scale_real(alpha) + &map.apply(&b).unwrap().scale_real(beta);
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * (1.0 + rhs.max_abs()));
        let h = gaussian_hermitian(&mut rng, d_in);
        prop_assert!(map.apply(&h).unwrap().hermitian_deviation() <= 1e-12);
        prop_assert!(max_diff(&map.apply(&a.adjoint()).unwrap(), &map.apply(&a).unwrap().adjoint()) <= 1e-12);
        let p = random_psd(&mut rng, d_in, 1);
        prop_assert!(hermitian_eig(&map.apply(&p).unwrap()).unwrap().min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn extension_blockwise_and_cp(seed in any::<u64>(), d_in in 2usize..=3, d_out in 2usize..=3) {
        let map = channel(seed, d_in, d_out);
        let ext = map.extend_identity2();
        let mut rng = rng_from_seed(seed ^ 0x5eed);
        let blocks: Vec<ComplexMatrix> = (0..4).map(|_| gaussian_matrix(&mut rng, d_in, d_in)).collect();
        let x = ComplexMatrix::block2x2(&blocks[0], &blocks[1], &blocks[2], &blocks[3]).unwrap();
        let mapped: Vec<ComplexMatrix> = blocks.iter().map(|b| map.apply(b).unwrap()).collect();
        let expected = ComplexMatrix::block2x2(&mapped[0], &mapped[1], &mapped[2], &mapped[3]).unwrap();
        prop_assert!(max_diff(&ext.apply(&x).unwrap(), &expected) <= 1e-12 * (1.0 + expected.max_abs()));
        prop_assert!(is_completely_positive(&map).unwrap().min_choi_eigenvalue >= -1e-10);
        prop_assert!(hermitian_eig(&choi(&ext).unwrap()).unwrap().min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn doubling_identities(seed in any::<u64>(), d_in in 2usize..=3, d_out in 2usize..=3, e in prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0)]) {
        let map = channel(seed, d_in, d_out);
        let a = gaussian_matrix(&mut rng_from_seed(seed ^ 0xd0b1e), d_in, d_in);
        prop_assert!(doubled_output_trace(&map, &a, e).unwrap().relative_gap() <= 1e-10);
        let split = doubled_abs_output_trace(&map, &a, e).unwrap();
        prop_assert!(split.pair.relative_gap() <= 1e-10);
        prop_assert!(split.min_eigenvalue >= -1e-10);
    }

    #[test]
    fn abs_block_formula(seed in any::<u64>(), n in 1usize..=5, rank in 1usize..=5) {
        let a = random_low_rank(&mut rng_from_seed(seed), n, rank.min(n));
        let direct = matrix_abs(&build_doubled(&a).unwrap().assembled).unwrap();
        prop_assert!(max_diff(&abs_doubled(&a).unwrap(), &direct) <= 1e-10 * (1.0 + a.max_abs()));
    }

    #[test]
    fn unit_norm_preserved(seed in any::<u64>(), n in 1usize..=4, e in exponent()) {
        let a = gaussian_matrix(&mut rng_from_seed(seed), n, n);
        let a = a.scale_real(1.0 / schatten_norm(&a, q(e)).unwrap());
        let abs_q = abs_doubled(&a).unwrap();
        let rotated = abs_q.block(0, 0, n, n);
        let abs = abs_q.block(n, n, n, n);
        for m in [&a, &rotated, &abs] {
            prop_assert!((schatten_norm(m, q(e)).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn amosov_holevo_nonnegative(seed in any::<u64>(), d_in in 2usize..=3, d_out in 2usize..=3, e in exponent()) {
        let map = channel(seed, d_in, d_out);
        let x = gaussian_hermitian(&mut rng_from_seed(seed ^ 0xa401), d_in);
        prop_assert!(amosov_holevo_check(&map, &x, q(e)).unwrap() >= -1e-10);
    }
}
