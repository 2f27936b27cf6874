//! Solver results against oracles that do not use the ascent.

use cpnorm_core::channel::{KrausMap, LinearMap};
use cpnorm_core::random::{gaussian_hermitian, gaussian_matrix, rng_from_seed};
use cpnorm_core::solver::{brute_force_norm, objective_gradient, objective_value, project_to_class};
use cpnorm_core::{norm_pq, ComplexMatrix, InputClass, SchattenExponent, SolverOptions, C64};

fn q(v: f64) -> SchattenExponent {
    SchattenExponent::new(v).unwrap()
}

fn opts() -> SolverOptions {
    SolverOptions { restarts: 8, ..SolverOptions::default() }
}

/// `max ‖s‖_q / ‖s‖_p` over a grid on the non-negative orthant of the unit
/// simplex in dimension 2 or 3.
fn simplex_ratio(d: usize, p: f64, qq: f64, steps: usize) -> f64 {
    let lp = |v: &[f64], e: f64| v.iter().map(|x| x.powf(e)).sum::<f64>().powf(1.0 / e);
    let mut best = 0.0_f64;
    for i in 0..=steps {
        for j in 0..=(if d == 3 { steps - i } else { 0 }) {
            let a = i as f64 / steps as f64;
            let v = if d == 3 {
                let b = j as f64 / steps as f64;
                vec![a, b, 1.0 - a - b]
            } else {
                vec![a, 1.0 - a]
            };
            best = best.max(lp(&v, qq) / lp(&v, p));
        }
    }
    best
}

/// Purity of the depolarised qubit over a grid of pure states on the Bloch
/// sphere, with `‖X‖_2² = Σ |x_ij|²` in place of any spectral routine.
fn bloch_purity_oracle(lambda: f64, steps: usize) -> f64 {
    let mut best = 0.0_f64;
    for it in 0..=steps {
        let theta = std::f64::consts::PI * it as f64 / steps as f64;
        for ip in 0..(2 * steps) {
            let phi = std::f64::consts::PI * ip as f64 / steps as f64;
            let (x, y, z) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            let rho = [
                [C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
                [C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
            ];
            let mut sq = 0.0;
            for (r, row) in rho.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    let mixed = if r == c { C64::new(lambda / 2.0, 0.0) } else { C64::new(0.0, 0.0) };
                    sq += (v * (1.0 - lambda) + mixed).norm_sqr();
                }
            }
            best = best.max(sq.sqrt());
        }
    }
    best
}

#[test]
fn identity_trace_to_frobenius() {
    let est = norm_pq(&KrausMap::identity(3), q(1.0), q(2.0), InputClass::Hermitian, &opts()).unwrap();
    assert!((est.value - 1.0).abs() <= 1e-6, "{}", est.value);
}

#[test]
fn identity_frobenius_to_trace() {
    let est = norm_pq(&KrausMap::identity(2), q(2.0), q(1.0), InputClass::General, &opts()).unwrap();
    assert!((est.value - 2f64.sqrt()).abs() <= 1e-6, "{}", est.value);
}

#[test]
fn identity_matches_simplex_oracle() {
    for d in [2, 3] {
        for &(p, qq) in &[(2.0, 1.0), (3.0, 1.5), (3.0, 1.0), (1.5, 1.0), (2.0, 3.0), (1.0, 3.0)] {
            let oracle = simplex_ratio(d, p, qq, 600);
            for class in [InputClass::Hermitian, InputClass::General] {
                let est = norm_pq(&KrausMap::identity(d), q(p), q(qq), class, &opts()).unwrap();
                assert!((est.value - oracle).abs() <= 1e-5, "d={d} p={p} q={qq}: {} vs {oracle}", est.value);
                if p > qq {
                    let closed = (d as f64).powf(1.0 / qq - 1.0 / p);
                    assert!((est.value - closed).abs() <= 1e-6);
                }
            }
        }
    }
}

#[test]
fn depolarizing_purity_matches_bloch_oracle() {
    for &lambda in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let map = KrausMap::depolarizing(2, lambda).unwrap();
        let est = norm_pq(&map, q(1.0), q(2.0), InputClass::PositiveTraceOne, &opts()).unwrap();
        let oracle = bloch_purity_oracle(lambda, 90);
        assert!((est.value - oracle).abs() <= 1e-6, "lambda={lambda}: {} vs {oracle}", est.value);
    }
    let half = norm_pq(&KrausMap::depolarizing(2, 0.5).unwrap(), q(1.0), q(2.0), InputClass::PositiveTraceOne, &opts()).unwrap();
    assert!((half.value - 0.790569).abs() <= 1e-6);
    let full = norm_pq(&KrausMap::depolarizing(2, 1.0).unwrap(), q(1.0), q(2.0), InputClass::PositiveTraceOne, &opts()).unwrap();
    assert!((full.value - core::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-6);
}

#[test]
fn brute_force_agrees_on_examples() {
    let bf = brute_force_norm(&KrausMap::identity(2), q(2.0), q(2.0), InputClass::General, 2000, false, 3).unwrap();
    assert!((bf - 1.0).abs() <= 1e-3, "{bf}");

    let dep = KrausMap::depolarizing(2, 0.5).unwrap();
    let bf = brute_force_norm(&dep, q(1.0), q(2.0), InputClass::Hermitian, 2000, true, 4).unwrap();
    let est = norm_pq(&dep, q(1.0), q(2.0), InputClass::Hermitian, &opts()).unwrap();
    assert!((bf - est.value).abs() <= 1e-3, "{bf} vs {}", est.value);

    let ad = KrausMap::amplitude_damping(0.3).unwrap();
    let bf = brute_force_norm(&ad, q(1.0), q(2.0), InputClass::PositiveTraceOne, 2000, true, 5).unwrap();
    let est = norm_pq(&ad, q(1.0), q(2.0), InputClass::PositiveTraceOne, &opts()).unwrap();
    assert!((bf - est.value).abs() <= 1e-3, "{bf} vs {}", est.value);
    // the maximiser |0><0| is quartically flat, so first-order ascent stops short
    assert!(est.value + 1e-6 >= bf, "{bf} > {}", est.value);

    let full = KrausMap::amplitude_damping(1.0).unwrap();
    let est = norm_pq(&full, q(1.0), q(2.0), InputClass::PositiveTraceOne, &opts()).unwrap();
    assert!((est.value - 1.0).abs() <= 1e-12);
}

fn trace_power_objective(map: &KrausMap, a: &ComplexMatrix, qq: f64) -> f64 {
    cpnorm_core::schatten_norm(&map.apply(a).unwrap(), q(qq)).unwrap().powf(qq)
}

#[test]
fn gradient_matches_finite_differences() {
    let h = 1e-6;
    for seed in 0..12_u64 {
        let map = KrausMap::random_stinespring(2, 3, 2, seed).unwrap();
        let mut rng = rng_from_seed(100 + seed);
        for &qq in &[1.5, 2.0, 3.0] {
            for class in [InputClass::Hermitian, InputClass::General] {
                let (a, dir) = match class {
                    InputClass::General => (gaussian_matrix(&mut rng, 2, 2), gaussian_matrix(&mut rng, 2, 2)),
                    _ => (gaussian_hermitian(&mut rng, 2), gaussian_hermitian(&mut rng, 2)),
                };
                let grad = objective_gradient(&map, &a, qq, class, 0.0).unwrap();
                let analytic = grad.real_inner(&dir);
                let plus = trace_power_objective(&map, &(&a + &dir.scale_real(h)), qq);
                let minus = trace_power_objective(&map, &(&a - &dir.scale_real(h)), qq);
                let numeric = (plus - minus) / (2.0 * h);
                let rel = (analytic - numeric).abs() / analytic.abs().max(1e-8);
                assert!(rel <= 1e-5, "seed={seed} q={qq}: {analytic} vs {numeric}");
            }
        }
    }
}

#[test]
fn estimate_dominates_samples() {
    for seed in 0..6_u64 {
        let map = KrausMap::random_stinespring(3, 2, 3, seed).unwrap();
        for &(p, qq) in &[(1.0, 2.0), (2.0, 1.5), (3.0, 3.0)] {
            let est = norm_pq(&map, q(p), q(qq), InputClass::General, &opts()).unwrap();
            let bf = brute_force_norm(&map, q(p), q(qq), InputClass::General, 3000, false, seed).unwrap();
            assert!(est.value >= bf - 1e-10, "{} < {bf}", est.value);
            let at_max = objective_value(&map, &est.maximizer, q(p), q(qq), InputClass::General).unwrap();
            assert!((at_max - est.value).abs() <= 1e-12 * est.value);
        }
    }
}

#[test]
fn positive_class_equals_hermitian_trace_norm_input() {
    for seed in 0..6_u64 {
        let map = KrausMap::random_stinespring(2, 3, 3, seed).unwrap();
        for &qq in &[1.5, 2.0, 3.0] {
            let pos = norm_pq(&map, q(1.0), q(qq), InputClass::PositiveTraceOne, &opts()).unwrap();
            let herm = norm_pq(&map, q(1.0), q(qq), InputClass::Hermitian, &opts()).unwrap();
            assert!((pos.value - herm.value).abs() <= 1e-6, "{} vs {}", pos.value, herm.value);
            let rho = &pos.maximizer;
            assert!((rho.trace().re - 1.0).abs() <= 1e-12);
            assert!(cpnorm_core::hermitian_eig(rho).unwrap().min_eigenvalue() >= -1e-12);
        }
    }
}

#[test]
fn projection_lands_on_unit_sphere() {
    let mut rng = rng_from_seed(9);
    for &p in &[1.0, 1.5, 2.0, 3.0] {
        let a = project_to_class(&gaussian_matrix(&mut rng, 3, 3), q(p), InputClass::General).unwrap();
        assert!((cpnorm_core::schatten_norm(&a, q(p)).unwrap() - 1.0).abs() <= 1e-12);
        let h = project_to_class(&gaussian_matrix(&mut rng, 3, 3), q(p), InputClass::Hermitian).unwrap();
        assert!(h.is_hermitian(1e-12));
    }
}

#[test]
fn non_cp_map_refused_without_override() {
    let t = cpnorm_core::TransposeMap { d: 2 };
    assert!(norm_pq(&t, q(1.0), q(2.0), InputClass::Hermitian, &opts()).is_err());
    let allowed = SolverOptions { allow_non_cp: true, ..opts() };
    let est = norm_pq(&t, q(2.0), q(2.0), InputClass::General, &allowed).unwrap();
    assert!((est.value - 1.0).abs() <= 1e-6);
    assert_eq!(t.input_dim(), 2);
}

#[test]
fn ascent_is_monotone() {
    for seed in 0..8_u64 {
        let map = KrausMap::random_stinespring(3, 3, 1 + seed as usize % 9, seed).unwrap();
        for class in [InputClass::Hermitian, InputClass::General, InputClass::PositiveTraceOne] {
            let p = if class == InputClass::PositiveTraceOne { 1.0 } else { 1.5 };
            let est = norm_pq(&map, q(p), q(2.5), class, &opts()).unwrap();
            assert!(!est.value_history.is_empty());
            for w in est.value_history.windows(2) {
                assert!(w[1] >= w[0], "{w:?}");
            }
        }
    }
}

#[test]
fn infinite_exponents_are_exact() {
    let inf = SchattenExponent::Infinity;
    for class in [InputClass::Hermitian, InputClass::General] {
        let est = norm_pq(&KrausMap::identity(2), inf, q(2.0), class, &opts()).unwrap();
        assert!((est.value - 2f64.sqrt()).abs() <= 1e-9, "{}", est.value);
        let est = norm_pq(&KrausMap::identity(3), q(2.0), inf, class, &opts()).unwrap();
        assert!((est.value - 1.0).abs() <= 1e-9, "{}", est.value);
    }
    // ‖Φ(A)‖_1 ≤ Tr Φ(|A|) ≤ Tr Φ(I) for positive Φ and ‖A‖_∞ ≤ 1
    for seed in 0..6_u64 {
        let map = KrausMap::random_stinespring(3, 3, 4, seed).unwrap();
        let bound = map.apply(&ComplexMatrix::identity(3)).unwrap().trace().re;
        for class in [InputClass::Hermitian, InputClass::General] {
            let est = norm_pq(&map, inf, q(1.0), class, &opts()).unwrap();
            assert!((est.value - bound).abs() <= 1e-9 * bound, "{} vs {bound}", est.value);
        }
    }
}
