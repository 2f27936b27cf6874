//! Numerical maximisation of `‖Φ(A)‖_q / ‖A‖_p` over Hermitian, general and
//! density-matrix inputs.
//!
//! Each restart starts from a Gaussian draw projected onto the input class
//! and runs a monotone ascent on the unit p-sphere. Every iteration evaluates
//! two candidates and keeps the better one if it improves the objective:
//!
//! - a Euclidean gradient step `project(A + η·∇/‖∇‖_F)` with step halving,
//! - the maximiser of `Re Tr(∇* X)` over the unit p-ball of the class (the
//!   steepest ascent point in the p-norm geometry). The objective is convex,
//!   so this point never decreases it.
//!
//! Infinite exponents are replaced by `64` during the ascent; the final
//! maximiser is renormalised and re-evaluated with the exact exponents.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::channel::{is_completely_positive, LinearMap};
use crate::eig::hermitian_eig;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::random::{gaussian_hermitian, gaussian_matrix, rng_from_seed, SolverRng};
use crate::schatten::{norm_of_values, schatten_norm, SchattenExponent};
use crate::svd::svd;

/// Finite exponent standing in for `q = ∞` in gradients.
pub const INFINITY_SURROGATE: f64 = 64.0;
/// Consecutive iterations over which the value must improve by `tol_value`.
pub const STALL_WINDOW: usize = 10;
const MAX_HALVINGS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputClass {
    Hermitian,
    General,
    /// Density matrices: PSD with unit trace. Only meaningful with `p = 1`.
    PositiveTraceOne,
}

impl InputClass {
    pub fn name(self) -> &'static str {
        match self {
            Self::Hermitian => "hermitian",
            Self::General => "general",
            Self::PositiveTraceOne => "positive_trace_one",
        }
    }
}

impl fmt::Display for InputClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Initial Euclidean step length (relative to a unit-Frobenius gradient).
    pub step_init: f64,
    /// Stop when the relative Frank–Wolfe gap drops below this.
    pub tol_grad: f64,
    /// Stop when the value gains less than `tol_value·(1+value)` over
    /// [`STALL_WINDOW`] iterations.
    pub tol_value: f64,
    /// Singular-value smoothing used inside the gradient only.
    pub epsilon_smooth: f64,
    pub seed: u64,
    /// Skip the Choi positivity check (negative controls).
    pub allow_non_cp: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iterations: 500,
            step_init: 0.1,
            tol_grad: 1e-9,
            tol_value: 1e-11,
            epsilon_smooth: 1e-12,
            seed: 0,
            allow_non_cp: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.step_init, self.tol_grad, self.tol_value, self.epsilon_smooth];
        if self.restarts == 0 {
            return Err(Error::InvalidParameter { name: "restarts", value: 0.0 });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                value: 0.0,
            });
        }
        for (name, v) in ["step_init", "tol_grad", "tol_value", "epsilon_smooth"].iter().zip(positive) {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter { name, value: v });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Unit p-norm input of the class (unit trace for density matrices).
    pub maximizer: ComplexMatrix,
    pub input_class: InputClass,
    pub p: SchattenExponent,
    pub q: SchattenExponent,
    pub restarts_used: usize,
    /// Index of the restart that produced `value` (lowest index on ties).
    pub best_restart: usize,
    /// Iterations of the best restart.
    pub iterations: usize,
    pub total_iterations: usize,
    /// Whether the best restart met a stopping criterion before the
    /// iteration cap.
    pub converged: bool,
    /// Relative Frank–Wolfe gap at the end of the best restart.
    pub grad_norm_final: f64,
    /// Objective after each accepted iteration of the best restart, starting
    /// with the initial point (values at the surrogate exponent for `∞`).
    pub value_history: Vec<f64>,
}

/// `Re Tr(∇* dA)`-gradient of `Tr|Φ(A)|^q`: `q Φ†(V Σ^{q-1} W*)` with
/// `Φ(A) = V Σ W*`. For Hermitian and density-matrix classes the same
/// quantity is computed from the eigendecomposition as
/// `q Φ†(sgn(Φ(A)) |Φ(A)|^{q-1})`. Singular values enter through
/// `σ (σ² + ε²)^{(q-2)/2}` so the expression stays finite when `Φ(A)` is
/// singular.
pub fn objective_gradient<M: LinearMap>(
    map: &M,
    a: &ComplexMatrix,
    q: f64,
    class: InputClass,
    epsilon_smooth: f64,
) -> Result<ComplexMatrix> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidExponent(q));
    }
    let out = map.apply(a)?;
    let weight = |s: f64| s * (s * s + epsilon_smooth * epsilon_smooth).powf((q - 2.0) / 2.0);
    let inner = match class {
        InputClass::Hermitian | InputClass::PositiveTraceOne => hermitian_eig(&out)?.reconstruct_with(weight),
        InputClass::General => svd(&out)?.reconstruct_with(weight),
    };
    Ok(map.apply_adjoint(&inner)?.scale_real(q))
}

/// Projects a nonzero matrix onto the unit p-sphere of the class.
///
/// Hermitian: `(A + A*)/2` then scale. General: scale. Density matrices:
/// Hermitian part, negative eigenvalues clipped to zero, trace normalised.
pub fn project_to_class(a: &ComplexMatrix, p: SchattenExponent, class: InputClass) -> Result<ComplexMatrix> {
    let a = match class {
        InputClass::General => a.clone(),
        InputClass::Hermitian => a.hermitian_part()?,
        InputClass::PositiveTraceOne => {
            let e = hermitian_eig(&a.hermitian_part()?)?;
            let clipped = e.reconstruct_with(|l| l.max(0.0));
            let t = e.eigenvalues.iter().map(|l| l.max(0.0)).sum::<f64>();
            if !(t > 0.0) {
                return Err(Error::ZeroMatrix);
            }
            return Ok(clipped.scale_real(1.0 / t));
        }
    };
    let n = schatten_norm(&a, p)?;
    if !(n > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    Ok(a.scale_real(1.0 / n))
}

/// Maximiser of `Re Tr(G* X)` over unit p-norm `X` in the class.
fn steepest_point(g: &ComplexMatrix, p: f64, class: InputClass) -> Result<ComplexMatrix> {
    let pe = SchattenExponent::Finite(p);
    let power = if p == 1.0 { f64::INFINITY } else { 1.0 / (p - 1.0) };
    let x = match class {
        InputClass::General => {
            let s = svd(g)?;
            if power.is_infinite() {
                let (l, r) = (s.left.column(0), s.right.column(0));
                let n = l.len();
                ComplexMatrix::from_fn(n, n, |i, j| l[i] * r[j].conj())
            } else {
                s.reconstruct_with(|v| v.powf(power))
            }
        }
        InputClass::Hermitian => {
            let e = hermitian_eig(&g.hermitian_part()?)?;
            if power.is_infinite() {
                let last = e.eigenvalues.len() - 1;
                let top = if e.eigenvalues[0].abs() >= e.eigenvalues[last].abs() { 0 } else { last };
                let sign = e.eigenvalues[top].signum();
                rank_one(&e.eigenvectors.column(top), sign)
            } else {
                e.reconstruct_with(|l| l.signum() * l.abs().powf(power))
            }
        }
        InputClass::PositiveTraceOne => {
            let e = hermitian_eig(&g.hermitian_part()?)?;
            return Ok(rank_one(&e.eigenvectors.column(0), 1.0));
        }
    };
    let n = schatten_norm(&x, pe)?;
    if !(n > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    Ok(x.scale_real(1.0 / n))
}

fn rank_one(v: &[C64], scale: f64) -> ComplexMatrix {
    let n = v.len();
    ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() * scale)
}

fn check_exponents(p: SchattenExponent, class: InputClass) -> Result<()> {
    if class == InputClass::PositiveTraceOne && p != SchattenExponent::Finite(1.0) {
        return Err(Error::InvalidExponent(p.value()));
    }
    Ok(())
}

fn finite_or_surrogate(e: SchattenExponent) -> f64 {
    match e {
        SchattenExponent::Finite(v) => v,
        SchattenExponent::Infinity => INFINITY_SURROGATE,
    }
}

/// `‖Φ(A)‖_q / ‖A‖_p`; density matrices are measured by `‖Φ(A)‖_q` alone.
pub fn objective_value<M: LinearMap>(
    map: &M,
    a: &ComplexMatrix,
    p: SchattenExponent,
    q: SchattenExponent,
    class: InputClass,
) -> Result<f64> {
    let num = schatten_norm(&map.apply(a)?, q)?;
    let den = match class {
        InputClass::PositiveTraceOne => a.trace().re,
        _ => schatten_norm(a, p)?,
    };
    if !(den > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    Ok(num / den)
}

fn random_start<R: Rng>(rng: &mut R, n: usize, p: SchattenExponent, class: InputClass) -> Result<ComplexMatrix> {
    loop {
        let g = match class {
            InputClass::General => gaussian_matrix(rng, n, n),
            InputClass::Hermitian | InputClass::PositiveTraceOne => gaussian_hermitian(rng, n),
        };
        match project_to_class(&g, p, class) {
            Err(Error::ZeroMatrix) => continue,
            other => return other,
        }
    }
}

struct Ascent<'a, M> {
    map: &'a M,
    p: SchattenExponent,
    q: SchattenExponent,
    /// Finite exponent used for gradients.
    q_grad: f64,
    class: InputClass,
    opts: &'a SolverOptions,
}

struct RestartResult {
    maximizer: ComplexMatrix,
    iterations: usize,
    converged: bool,
    gap: f64,
    history: Vec<f64>,
}

impl<M: LinearMap> Ascent<'_, M> {
    fn value(&self, a: &ComplexMatrix) -> Result<f64> {
        objective_value(self.map, a, self.p, self.q, self.class)
    }

    fn run(&self, start: ComplexMatrix) -> Result<RestartResult> {
        let opts = self.opts;
        let q = self.q_grad;
        let mut a = start;
        let mut f = self.value(&a)?;
        let mut step = opts.step_init;
        let mut history: Vec<f64> = Vec::with_capacity(opts.max_iterations + 1);
        history.push(f);
        let mut gap = f64::INFINITY;

        for it in 0..opts.max_iterations {
            let g = objective_gradient(self.map, &a, q, self.class, opts.epsilon_smooth)?;
            let g_norm = g.frobenius_norm();
            if !(g_norm > 0.0) {
                return Ok(RestartResult { maximizer: a, iterations: it, converged: true, gap: 0.0, history });
            }
            let g = g.scale_real(1.0 / g_norm);
            let target = steepest_point(&g, self.p.value(), self.class)?;
            let here = g.real_inner(&a);
            gap = (g.real_inner(&target) - here) / here.abs().max(f64::MIN_POSITIVE);
            if gap < opts.tol_grad {
                return Ok(RestartResult { maximizer: a, iterations: it, converged: true, gap, history });
            }

            let mut best: Option<(f64, ComplexMatrix)> = None;
            let f_target = self.value(&target)?;
            if f_target > f {
                best = Some((f_target, target));
            }
            let mut eta = step;
            for _ in 0..MAX_HALVINGS {
                let cand = match project_to_class(&(&a + &g.scale_real(eta)), self.p, self.class) {
                    Ok(c) => c,
                    Err(Error::ZeroMatrix) => {
                        eta *= 0.5;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let fc = self.value(&cand)?;
                if fc > f {
                    if best.as_ref().is_none_or(|(fb, _)| fc > *fb) {
                        best = Some((fc, cand));
                    }
                    step = (2.0 * eta).min(1e3);
                    break;
                }
                eta *= 0.5;
            }

            let Some((f_new, a_new)) = best else {
                return Ok(RestartResult { maximizer: a, iterations: it + 1, converged: true, gap, history });
            };
            a = a_new;
            f = f_new;
            history.push(f);
            let n = history.len();
            if n > STALL_WINDOW && f - history[n - 1 - STALL_WINDOW] < opts.tol_value * (1.0 + f) {
                return Ok(RestartResult { maximizer: a, iterations: it + 1, converged: true, gap, history });
            }
        }
        Ok(RestartResult {
            maximizer: a,
            iterations: opts.max_iterations,
            converged: false,
            gap,
            history,
        })
    }
}

/// Best value of `‖Φ(A)‖_q / ‖A‖_p` found by multi-start ascent over the
/// input class. With `class = PositiveTraceOne` (requires `p = 1`) this is the
/// maximal output purity `max_ρ ‖Φ(ρ)‖_q`.
///
/// Restart 0 starts from the normalized identity, which maximizes
/// `‖Φ(A)‖_1 / ‖A‖_∞` for every positive `Φ`; restart `k ≥ 1` from a Gaussian
/// draw on ChaCha stream `k` of `seed`. `p = ∞` is handled exactly; `q = ∞`
/// uses [`INFINITY_SURROGATE`] for gradients only, and every accepted step
/// is judged by the exact objective.
pub fn norm_pq<M: LinearMap>(
    map: &M,
    p: SchattenExponent,
    q: SchattenExponent,
    class: InputClass,
    opts: &SolverOptions,
) -> Result<NormEstimate> {
    opts.validate()?;
    check_exponents(p, class)?;
    if !opts.allow_non_cp {
        let cert = is_completely_positive(map)?;
        if !cert.completely_positive {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: cert.min_choi_eigenvalue,
            });
        }
    }
    let q_grad = finite_or_surrogate(q);
    let ascent = Ascent {
        map,
        p,
        q,
        q_grad,
        class,
        opts,
    };
    let n = map.input_dim();

    let mut best: Option<(f64, usize, RestartResult)> = None;
    let mut total_iterations = 0;
    for k in 0..opts.restarts {
        let start = if k == 0 {
            project_to_class(&ComplexMatrix::identity(n), p, class)?
        } else {
            let mut rng: SolverRng = rng_from_seed(opts.seed);
            rng.set_stream(k as u64);
            random_start(&mut rng, n, p, class)?
        };
        let mut result = ascent.run(start)?;
        total_iterations += result.iterations;
        if class != InputClass::PositiveTraceOne {
            result.maximizer = project_to_class(&result.maximizer, p, class)?;
        }
        let value = objective_value(map, &result.maximizer, p, q, class)?;
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, k, result));
        }
    }
    let (value, best_restart, result) = best.expect("restarts >= 1");
    Ok(NormEstimate {
        value,
        maximizer: result.maximizer,
        input_class: class,
        p,
        q,
        restarts_used: opts.restarts,
        best_restart,
        iterations: result.iterations,
        total_iterations,
        converged: result.converged,
        grad_norm_final: result.gap,
        value_history: result.history,
    })
}

fn class_basis(n: usize, class: InputClass) -> Vec<ComplexMatrix> {
    let mut basis = Vec::new();
    for i in 0..n {
        for j in 0..n {
            match class {
                InputClass::General => {
                    basis.push(ComplexMatrix::unit(n, i, j));
                    basis.push(ComplexMatrix::unit(n, i, j).scale(C64::new(0.0, 1.0)));
                }
                _ if i == j => basis.push(ComplexMatrix::unit(n, i, i)),
                _ if i < j => {
                    let (eij, eji) = (ComplexMatrix::unit(n, i, j), ComplexMatrix::unit(n, j, i));
                    basis.push(&eij + &eji);
                    basis.push((&eij - &eji).scale(C64::new(0.0, 1.0)));
                }
                _ => {}
            }
        }
    }
    basis
}

/// Lower-bound oracle: the best objective over `samples` Gaussian draws of the
/// class, for each `(p, q)` on the grid. Returns `values[i][j]` for `ps[i]`,
/// `qs[j]`. Spectra of each draw are computed once and shared by the grid.
pub fn brute_force_grid<M: LinearMap>(
    map: &M,
    ps: &[SchattenExponent],
    qs: &[SchattenExponent],
    class: InputClass,
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    for &p in ps {
        check_exponents(p, class)?;
    }
    let n = map.input_dim();
    let mut rng = rng_from_seed(seed);
    let mut best = alloc::vec![alloc::vec![0.0_f64; qs.len()]; ps.len()];
    let mut drawn = 0;
    while drawn < samples {
        let a = match class {
            InputClass::General => gaussian_matrix(&mut rng, n, n),
            InputClass::Hermitian => gaussian_hermitian(&mut rng, n),
            InputClass::PositiveTraceOne => match project_to_class(&gaussian_hermitian(&mut rng, n), ps[0], class) {
                Ok(rho) => rho,
                Err(Error::ZeroMatrix) => continue,
                Err(e) => return Err(e),
            },
        };
        drawn += 1;
        let in_sv = svd(&a)?.values;
        let out_sv = svd(&map.apply(&a)?)?.values;
        for (i, &p) in ps.iter().enumerate() {
            let den = match class {
                InputClass::PositiveTraceOne => a.trace().re,
                _ => norm_of_values(&in_sv, p),
            };
            if !(den > 0.0) {
                continue;
            }
            for (j, &q) in qs.iter().enumerate() {
                let v = norm_of_values(&out_sv, q) / den;
                if v > best[i][j] {
                    best[i][j] = v;
                }
            }
        }
    }
    Ok(best)
}

/// Sampling oracle for a single `(p, q)`, optionally followed by coordinate
/// pattern search from the best draw.
pub fn brute_force_norm<M: LinearMap>(
    map: &M,
    p: SchattenExponent,
    q: SchattenExponent,
    class: InputClass,
    samples: usize,
    refine: bool,
    seed: u64,
) -> Result<f64> {
    check_exponents(p, class)?;
    let n = map.input_dim();
    let mut rng = rng_from_seed(seed);
    let mut best: Option<(f64, ComplexMatrix)> = None;
    let mut drawn = 0;
    while drawn < samples.max(1) {
        let g = match class {
            InputClass::General => gaussian_matrix(&mut rng, n, n),
            _ => gaussian_hermitian(&mut rng, n),
        };
        let a = match project_to_class(&g, p, class) {
            Ok(a) => a,
            Err(Error::ZeroMatrix) => continue,
            Err(e) => return Err(e),
        };
        drawn += 1;
        let v = objective_value(map, &a, p, q, class)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, a));
        }
    }
    let (mut value, mut a) = best.expect("at least one sample");
    if !refine {
        return Ok(value);
    }
    let basis = class_basis(n, class);
    let mut delta = 0.1;
    let mut passes = 0;
    while delta > 1e-9 && passes < 5000 {
        passes += 1;
        let mut improved = false;
        for b in &basis {
            for sign in [1.0, -1.0] {
                let cand = match project_to_class(&(&a + &b.scale_real(sign * delta)), p, class) {
                    Ok(c) => c,
                    Err(Error::ZeroMatrix) => continue,
                    Err(e) => return Err(e),
                };
                let v = objective_value(map, &cand, p, q, class)?;
                if v > value {
                    value = v;
                    a = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    Ok(value)
}
