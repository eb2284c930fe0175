//! L2-penalized logistic regression.
//!
//! Minimizes the penalized average negative log-likelihood
//!
//! ```text
//! f(b) = (1/N) sum_j [ log(1 + exp(eta_j)) - y_j eta_j ] + lambda * sum_{k penalized} b_k^2
//! ```
//!
//! with Newton steps (iteratively reweighted least squares) and step halving.
//! The intercept is left out of the penalty so that the heavily penalized
//! limit reproduces the base rate. Very wide designs fall back to L-BFGS.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use super::design::DesignMatrix;
use super::fit::{Diagnostics, FitKind, ModelFit};
use crate::error::{Error, Result};

/// Newton steps whose predicted decrease is below this (relative to the
/// objective) are taken without a line search.
const NEWTON_DECREMENT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Converged when the gradient max-norm falls below this.
    pub tolerance: f64,
    /// Designs with more columns than this use first-order updates.
    pub wide_threshold: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-8,
            wide_threshold: 2500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Newton,
    Lbfgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Coefficients on the design's own (possibly standardized) scale.
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Objective value at the start and after every accepted step.
    pub objective_trace: Vec<f64>,
    pub method: Method,
}

/// `log(1 + e^x)` without overflow.
#[inline]
pub fn log1pexp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Log-likelihood of one Bernoulli observation with log-odds `eta`.
#[inline]
pub fn log_likelihood(y: f64, eta: f64) -> f64 {
    y * eta - log1pexp(eta)
}

fn check(design: &DesignMatrix, labels: &[f64], lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if labels.len() != design.n_rows() {
        return Err(Error::invalid("label count does not match design rows"));
    }
    if design.n_rows() == 0 {
        return Err(Error::invalid("empty design"));
    }
    if labels.iter().any(|&y| !(0.0..=1.0).contains(&y)) {
        return Err(Error::invalid("labels must lie in [0, 1]"));
    }
    Ok(())
}

fn linear_predictors(design: &DesignMatrix, beta: &[f64]) -> Vec<f64> {
    (0..design.n_rows()).map(|i| design.dot_row(i, beta)).collect()
}

fn penalty(lambda: f64, mask: &[bool], beta: &[f64]) -> f64 {
    lambda
        * beta
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(b, _)| b * b)
            .sum::<f64>()
}

fn objective_at(eta: &[f64], labels: &[f64], lambda: f64, mask: &[bool], beta: &[f64]) -> f64 {
    let n = eta.len() as f64;
    let loss = compensated_sum(eta.iter().zip(labels).map(|(&e, &y)| log1pexp(e) - y * e));
    loss / n + penalty(lambda, mask, beta)
}

/// Neumaier summation. Near the optimum successive objective values differ
/// by less than the rounding error of a plain running sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

fn gradient_at(
    design: &DesignMatrix,
    eta: &[f64],
    labels: &[f64],
    lambda: f64,
    mask: &[bool],
    beta: &[f64],
) -> Vec<f64> {
    let n = eta.len() as f64;
    let mut g = vec![0.0; design.n_cols()];
    for i in 0..design.n_rows() {
        let r = (sigmoid(eta[i]) - labels[i]) / n;
        let (idx, val) = design.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            g[j as usize] += r * v;
        }
    }
    for ((gj, &b), &m) in g.iter_mut().zip(beta).zip(mask) {
        if m {
            *gj += 2.0 * lambda * b;
        }
    }
    g
}

/// Penalized objective value at `beta`.
pub fn objective(design: &DesignMatrix, labels: &[f64], lambda: f64, beta: &[f64]) -> f64 {
    let eta = linear_predictors(design, beta);
    objective_at(&eta, labels, lambda, &design.penalty_mask(), beta)
}

/// Analytic gradient of the penalized objective at `beta`.
pub fn gradient(design: &DesignMatrix, labels: &[f64], lambda: f64, beta: &[f64]) -> Vec<f64> {
    let eta = linear_predictors(design, beta);
    gradient_at(design, &eta, labels, lambda, &design.penalty_mask(), beta)
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn hessian(design: &DesignMatrix, eta: &[f64], lambda: f64, mask: &[bool]) -> DMatrix<f64> {
    let p = design.n_cols();
    let n = design.n_rows() as f64;
    // upper triangle, column-major
    let mut h = vec![0.0; p * p];
    for i in 0..design.n_rows() {
        let mu = sigmoid(eta[i]);
        let w = mu * (1.0 - mu) / n;
        if w == 0.0 {
            continue;
        }
        let (idx, val) = design.row(i);
        for (a, (&j, &xj)) in idx.iter().zip(val).enumerate() {
            let wxj = w * xj;
            let col = j as usize * p;
            for (&k, &xk) in idx[..=a].iter().zip(&val[..=a]) {
                h[col + k as usize] += wxj * xk;
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            h[k * p + j] = h[j * p + k];
        }
        if mask[j] {
            h[j * p + j] += 2.0 * lambda;
        }
    }
    DMatrix::from_vec(p, p, h)
}

/// Solve `H d = -g`, adding diagonal jitter if `H` is numerically singular.
fn newton_direction(h: DMatrix<f64>, g: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_iterator(g.len(), g.iter().map(|v| -v));
    let scale = (0..h.nrows()).map(|i| h[(i, i)]).fold(0.0, f64::max).max(1e-300);
    let mut jitter = 0.0;
    for _ in 0..10 {
        let mut m = h.clone();
        if jitter > 0.0 {
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
        }
        if let Some(ch) = m.cholesky() {
            let d = ch.solve(&rhs);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d.as_slice().to_vec());
            }
        }
        jitter = if jitter == 0.0 { scale * 1e-12 } else { jitter * 100.0 };
    }
    None
}

/// Minimize the penalized objective from `init` (zeros when `None`).
pub fn solve(
    design: &DesignMatrix,
    labels: &[f64],
    lambda: f64,
    init: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<Solution> {
    check(design, labels, lambda)?;
    if design.n_cols() > opts.wide_threshold {
        return solve_lbfgs(design, labels, lambda, init, opts);
    }
    let mask = design.penalty_mask();
    let mut beta = init.map_or_else(|| vec![0.0; design.n_cols()], <[f64]>::to_vec);
    let mut eta = linear_predictors(design, &beta);
    let mut f = objective_at(&eta, labels, lambda, &mask, &beta);
    let mut trace = vec![f];
    for iter in 0..=opts.max_iterations {
        let g = gradient_at(design, &eta, labels, lambda, &mask, &beta);
        let gnorm = max_norm(&g);
        if gnorm < opts.tolerance {
            return Ok(Solution {
                beta,
                iterations: iter,
                gradient_norm: gnorm,
                objective_trace: trace,
                method: Method::Newton,
            });
        }
        if iter == opts.max_iterations {
            return Err(Error::NonConvergence {
                iterations: iter,
                gradient_norm: gnorm,
            });
        }
        let h = hessian(design, &eta, lambda, &mask);
        let d = newton_direction(h, &g).ok_or(Error::NonConvergence {
            iterations: iter,
            gradient_norm: gnorm,
        })?;
        let xd = linear_predictors(design, &d);
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        let mut t = 1.0;
        let mut accepted = None;
        if -slope <= NEWTON_DECREMENT_FLOOR * (1.0 + f.abs()) {
            // The predicted decrease is below what the objective can resolve,
            // so comparing values is noise; the pure Newton step is safe here.
            let trial_beta: Vec<f64> = beta.iter().zip(&d).map(|(b, s)| b + s).collect();
            let trial_eta: Vec<f64> = eta.iter().zip(&xd).map(|(e, s)| e + s).collect();
            let ft = objective_at(&trial_eta, labels, lambda, &mask, &trial_beta);
            accepted = Some((trial_beta, trial_eta, ft));
            t = 0.0;
        }
        while t > 1e-12 {
            let trial_beta: Vec<f64> = beta.iter().zip(&d).map(|(b, s)| b + t * s).collect();
            let trial_eta: Vec<f64> = eta.iter().zip(&xd).map(|(e, s)| e + t * s).collect();
            let ft = objective_at(&trial_eta, labels, lambda, &mask, &trial_beta);
            if ft <= f + 1e-4 * t * slope {
                accepted = Some((trial_beta, trial_eta, ft));
                break;
            }
            if t == 1.0 && ft <= f {
                // Armijo can fail from rounding alone right at the optimum
                accepted = Some((trial_beta, trial_eta, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((b, e, ft)) = accepted else {
            return Err(Error::NonConvergence {
                iterations: iter,
                gradient_norm: gnorm,
            });
        };
        beta = b;
        eta = e;
        f = ft;
        trace.push(f);
    }
    unreachable!("loop returns on the final iteration")
}

fn solve_lbfgs(
    design: &DesignMatrix,
    labels: &[f64],
    lambda: f64,
    init: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<Solution> {
    const MEMORY: usize = 10;
    let mask = design.penalty_mask();
    let p = design.n_cols();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut beta = init.map_or_else(|| vec![0.0; p], <[f64]>::to_vec);
    let mut eta = linear_predictors(design, &beta);
    let mut f = objective_at(&eta, labels, lambda, &mask, &beta);
    let mut g = gradient_at(design, &eta, labels, lambda, &mask, &beta);
    let mut trace = vec![f];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let max_iter = opts.max_iterations.max(1) * 10;
    for iter in 0..=max_iter {
        let gnorm = max_norm(&g);
        if gnorm < opts.tolerance {
            return Ok(Solution {
                beta,
                iterations: iter,
                gradient_norm: gnorm,
                objective_trace: trace,
                method: Method::Lbfgs,
            });
        }
        if iter == max_iter {
            return Err(Error::NonConvergence {
                iterations: iter,
                gradient_norm: gnorm,
            });
        }
        // two-loop recursion
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = history
            .back()
            .map_or(1.0 / gnorm.max(1.0), |(s, y, _)| dot(s, y) / dot(y, y));
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let xd = linear_predictors(design, &d);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-16 {
            let trial_beta: Vec<f64> = beta.iter().zip(&d).map(|(b, s)| b + t * s).collect();
            let trial_eta: Vec<f64> = eta.iter().zip(&xd).map(|(e, s)| e + t * s).collect();
            let ft = objective_at(&trial_eta, labels, lambda, &mask, &trial_beta);
            if ft <= f + 1e-4 * t * slope {
                accepted = Some((trial_beta, trial_eta, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((nb, ne, nf)) = accepted else {
            return Err(Error::NonConvergence {
                iterations: iter,
                gradient_norm: gnorm,
            });
        };
        let ng = gradient_at(design, &ne, labels, lambda, &mask, &nb);
        let s: Vec<f64> = nb.iter().zip(&beta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = ng.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        beta = nb;
        eta = ne;
        f = nf;
        g = ng;
        trace.push(f);
    }
    unreachable!("loop returns on the final iteration")
}

/// Fit the contextual model at a fixed `lambda` and report coefficients on
/// the original covariate scale.
pub fn fit_contextual_model(design: &DesignMatrix, labels: &[f64], lambda: f64) -> Result<ModelFit> {
    fit_contextual_model_with(design, labels, lambda, None, &SolverOptions::default())
        .map(|(fit, _)| fit)
}

pub fn fit_contextual_model_with(
    design: &DesignMatrix,
    labels: &[f64],
    lambda: f64,
    init: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<(ModelFit, Solution)> {
    let sol = solve(design, labels, lambda, init, opts)?;
    let eta = linear_predictors(design, &sol.beta);
    let mean_ll = eta
        .iter()
        .zip(labels)
        .map(|(&e, &y)| log_likelihood(y, e))
        .sum::<f64>()
        / labels.len() as f64;
    let beta = design.unstandardize(&sol.beta);
    let fit = ModelFit::from_vector(
        design,
        &beta,
        FitKind::Logistic,
        Some(lambda),
        Diagnostics {
            mean_log_likelihood: Some(mean_ll),
            iterations: Some(sol.iterations),
            gradient_norm: Some(sol.gradient_norm),
            ..Default::default()
        },
    );
    Ok((fit, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn instance(seed: u64, n: usize, p: usize) -> (DesignMatrix, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal) * 0.5).collect();
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let mut r = vec![1.0];
            r.extend((1..p).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let eta: f64 = r.iter().zip(&truth).map(|(a, b)| a * b).sum();
            y.push(if rng.random::<f64>() < sigmoid(eta) { 1.0 } else { 0.0 });
            rows.push(r);
        }
        let x = DesignMatrix::from_dense(&rows, &[("intercept", 1, false), ("x", p - 1, true)]).unwrap();
        (x, y)
    }

    #[test]
    fn sigmoid_and_log1pexp_are_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(3f64.ln()) - 0.75).abs() < 1e-15);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!(log1pexp(800.0), 800.0);
        assert!((log1pexp(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!(log1pexp(-800.0) >= 0.0);
    }

    #[test]
    fn negative_lambda_is_rejected() {
        let (x, y) = instance(1, 20, 3);
        assert!(matches!(solve(&x, &y, -1.0, None, &SolverOptions::default()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn heavy_penalty_gives_base_rate_intercept() {
        let (x, y) = instance(2, 300, 6);
        let fit = fit_contextual_model(&x, &y, 1e6).unwrap();
        let p: f64 = y.iter().sum::<f64>() / y.len() as f64;
        assert!((fit.intercept() - (p / (1.0 - p)).ln()).abs() < 1e-5, "{} {}", fit.intercept(), (p / (1.0 - p)).ln());
        for v in fit.group("x").unwrap().values() {
            assert!(v.abs() < 1e-5);
        }
    }

    #[test]
    fn all_positive_labels_give_confident_predictions() {
        let (x, _) = instance(3, 100, 4);
        let y = vec![1.0; 100];
        let sol = solve(&x, &y, 1e-6, None, &SolverOptions::default()).unwrap();
        for i in 0..x.n_rows() {
            assert!(sigmoid(x.dot_row(i, &sol.beta)) > 0.99);
        }
    }

    #[test]
    fn objective_never_increases() {
        for seed in 0..5 {
            let (x, y) = instance(10 + seed, 150, 8);
            let sol = solve(&x, &y, 1e-3, None, &SolverOptions::default()).unwrap();
            for w in sol.objective_trace.windows(2) {
                // equal up to rounding once the decrease is unresolvable
                assert!(w[1] <= w[0] + 1e-15 * w[0].abs(), "{:?}", sol.objective_trace);
            }
        }
    }

    #[test]
    fn unpenalized_intercept_score_equation() {
        let (x, y) = instance(4, 120, 3);
        let sol = solve(&x, &y, 0.0, None, &SolverOptions::default()).unwrap();
        let total_p: f64 = (0..x.n_rows()).map(|i| sigmoid(x.dot_row(i, &sol.beta))).sum();
        let total_y: f64 = y.iter().sum();
        assert!((total_p - total_y).abs() < 1e-6);
    }

    #[test]
    fn lbfgs_fallback_agrees_with_newton() {
        let (x, y) = instance(5, 200, 10);
        let newton = solve(&x, &y, 1e-2, None, &SolverOptions::default()).unwrap();
        let opts = SolverOptions {
            wide_threshold: 0,
            ..Default::default()
        };
        let lbfgs = solve(&x, &y, 1e-2, None, &opts).unwrap();
        assert_eq!(lbfgs.method, Method::Lbfgs);
        for (a, b) in newton.beta.iter().zip(&lbfgs.beta) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let (x, y) = instance(6, 100, 5);
        let opts = SolverOptions {
            max_iterations: 1,
            ..Default::default()
        };
        match solve(&x, &y, 1e-4, None, &opts) {
            Err(Error::NonConvergence { gradient_norm, .. }) => assert!(gradient_norm > 0.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rank_deficient_unpenalized_design_still_converges() {
        // duplicate column: Hessian singular at lambda = 0
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![1.0, (i % 7) as f64, (i % 7) as f64]).collect();
        let y: Vec<f64> = (0..40).map(|i| ((i * 7) % 3 == 0) as u8 as f64).collect();
        let x = DesignMatrix::from_dense(&rows, &[("intercept", 1, false), ("x", 2, true)]).unwrap();
        let sol = solve(&x, &y, 0.0, None, &SolverOptions::default()).unwrap();
        assert!(sol.gradient_norm < 1e-8);
    }
}
