//! Seeded k-fold cross-validation for the contextual model.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::design::{build_contextual_design, groups, DesignMatrix};
use super::logistic::{log_likelihood, sigmoid, solve, SolverOptions};
use crate::error::{Error, Result};
use crate::par::par_map;
use crate::types::PotentialAssist;

/// Default number of grid points between [`DEFAULT_GRID_LO`] and [`DEFAULT_GRID_HI`].
pub const DEFAULT_GRID_POINTS: usize = 25;
pub const DEFAULT_GRID_LO: f64 = 1e-6;
pub const DEFAULT_GRID_HI: f64 = 1e2;

/// `points` log-spaced values from `lo` to `hi`, inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) || points == 0 {
        return Err(Error::invalid(format!("bad log grid {lo}..{hi}:{points}")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                10f64.powf(a + step * i as f64)
            }
        })
        .collect())
}

pub fn default_grid() -> Vec<f64> {
    log_grid(DEFAULT_GRID_LO, DEFAULT_GRID_HI, DEFAULT_GRID_POINTS).expect("valid default grid")
}

/// Parse `"lo..hi:points"` or a comma-separated list of values.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("bad number {t:?} in lambda grid")))
    };
    let grid = if let Some((range, points)) = s.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| Error::invalid(format!("lambda grid {s:?} is not lo..hi:points")))?;
        let points = points
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad point count in lambda grid {s:?}")))?;
        log_grid(num(lo)?, num(hi)?, points)?
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    check_grid(&grid)?;
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("empty lambda grid"));
    }
    if grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::invalid("lambda values must be finite and >= 0"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("lambda grid must be strictly ascending"));
    }
    Ok(())
}

/// Fold index of every row. Row order is shuffled with a seeded permutation
/// and the row at shuffled position `i` goes to fold `i % folds`.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 || folds > n {
        return Err(Error::invalid(format!(
            "need 2 <= folds <= rows, got {folds} folds for {n} rows"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = vec![0; n];
    for (i, &row) in perm.iter().enumerate() {
        out[row] = i % folds;
    }
    Ok(out)
}

fn split(assignment: &[usize], fold: usize) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, &f) in assignment.iter().enumerate() {
        if f == fold {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    (train, test)
}

fn subset(labels: &[f64], rows: &[usize]) -> Vec<f64> {
    rows.iter().map(|&i| labels[i]).collect()
}

fn intercept_only(design: &DesignMatrix) -> bool {
    design.groups().len() == 1 && design.groups()[0].name == groups::INTERCEPT
}

/// Fit on `train` rows. An intercept-only design has a closed form, which
/// also stays finite when the training fold holds a single class.
fn fit_fold(
    design: &DesignMatrix,
    labels: &[f64],
    lambda: f64,
    init: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    if intercept_only(design) && design.n_cols() == 1 {
        let n = labels.len() as f64;
        let p = (labels.iter().sum::<f64>() / n).clamp(0.5 / n, 1.0 - 0.5 / n);
        return Ok(vec![(p / (1.0 - p)).ln()]);
    }
    Ok(solve(design, labels, lambda, init, opts)?.beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaScore {
    pub lambda: f64,
    pub mean_log_likelihood: f64,
}

/// Mean held-out log-likelihood per observation for each grid value.
pub fn lambda_scores(
    design: &DesignMatrix,
    labels: &[f64],
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<Vec<LambdaScore>> {
    check_grid(grid)?;
    if labels.len() != design.n_rows() {
        return Err(Error::invalid("label count does not match design rows"));
    }
    let assignment = fold_assignment(design.n_rows(), folds, seed)?;
    let opts = SolverOptions::default();
    let fold_ids: Vec<usize> = (0..folds).collect();
    // per fold: held-out log-likelihood sums, in grid order
    let per_fold = par_map(&fold_ids, |&k| -> Result<Vec<f64>> {
        let (train, test) = split(&assignment, k);
        let xt = design.select_rows(&train);
        let yt = subset(labels, &train);
        let xv = design.select_rows(&test);
        let yv = subset(labels, &test);
        let mut sums = vec![0.0; grid.len()];
        let mut warm: Option<Vec<f64>> = None;
        for (g, &lambda) in grid.iter().enumerate().rev() {
            let beta = fit_fold(&xt, &yt, lambda, warm.as_deref(), &opts)?;
            sums[g] = (0..xv.n_rows())
                .map(|i| log_likelihood(yv[i], xv.dot_row(i, &beta)))
                .sum();
            warm = Some(beta);
        }
        Ok(sums)
    });
    let mut totals = vec![0.0; grid.len()];
    for sums in per_fold {
        for (t, s) in totals.iter_mut().zip(sums?) {
            *t += s;
        }
    }
    let n = design.n_rows() as f64;
    Ok(grid
        .iter()
        .zip(totals)
        .map(|(&lambda, t)| LambdaScore {
            lambda,
            mean_log_likelihood: t / n,
        })
        .collect())
}

/// Grid value with the best mean held-out log-likelihood; ties go to the
/// smaller value.
pub fn select_lambda(
    design: &DesignMatrix,
    labels: &[f64],
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<f64> {
    check_grid(grid)?;
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    Ok(best(&lambda_scores(design, labels, grid, folds, seed)?))
}

/// Best entry of a score table under the selection rule.
pub fn best(scores: &[LambdaScore]) -> f64 {
    let mut pick = scores[0];
    for s in &scores[1..] {
        if s.mean_log_likelihood > pick.mean_log_likelihood {
            pick = *s;
        }
    }
    pick.lambda
}

/// Which column groups a validation model keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    Full,
    NoScorekeeper,
    NoContext,
    Intercept,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 4] = [
        ModelSpec::Full,
        ModelSpec::NoScorekeeper,
        ModelSpec::NoContext,
        ModelSpec::Intercept,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelSpec::Full => "full",
            ModelSpec::NoScorekeeper => "no-scorekeeper",
            ModelSpec::NoContext => "no-context",
            ModelSpec::Intercept => "intercept",
        }
    }

    /// Groups removed from the full contextual design.
    pub fn dropped_groups(self) -> Vec<&'static str> {
        use groups::*;
        match self {
            ModelSpec::Full => vec![],
            ModelSpec::NoScorekeeper => vec![SK_GENEROSITY, SK_BIAS],
            ModelSpec::NoContext => {
                let mut v = vec![PASSER, POSITION];
                v.extend(CONTEXT);
                v
            }
            ModelSpec::Intercept => vec![
                HOME,
                TEAM,
                OPPONENT,
                SK_GENEROSITY,
                SK_BIAS,
                PASSER,
                POSITION,
                C1,
                C2,
                C3,
                C4,
                C5,
                C6,
                PASSER_ZONE,
                SHOOTER_ZONE,
                ZONE_PAIR,
            ],
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelSpec::ALL
            .into_iter()
            .find(|m| m.name() == s || m.name().replace('-', "_") == s)
            .ok_or_else(|| Error::invalid(format!("unknown model spec {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvMetrics {
    pub spec: ModelSpec,
    pub lambda: f64,
    pub folds: usize,
    pub n_obs: usize,
    /// Held-out log-likelihood averaged over observations.
    pub mean_log_likelihood: f64,
    /// Share of held-out observations misclassified at the 0.5 cutoff.
    pub misclassification: f64,
}

/// Cross-validate one model specification on a prebuilt full design.
pub fn cross_validate_design(
    design: &DesignMatrix,
    labels: &[f64],
    spec: ModelSpec,
    lambda: f64,
    folds: usize,
    seed: u64,
) -> Result<CvMetrics> {
    if labels.len() != design.n_rows() {
        return Err(Error::invalid("label count does not match design rows"));
    }
    let x = design.without_groups(&spec.dropped_groups());
    let assignment = fold_assignment(x.n_rows(), folds, seed)?;
    let opts = SolverOptions::default();
    let fold_ids: Vec<usize> = (0..folds).collect();
    let per_fold = par_map(&fold_ids, |&k| -> Result<(f64, usize)> {
        let (train, test) = split(&assignment, k);
        let beta = fit_fold(&x.select_rows(&train), &subset(labels, &train), lambda, None, &opts)?;
        let mut ll = 0.0;
        let mut wrong = 0;
        for &i in &test {
            let eta = x.dot_row(i, &beta);
            ll += log_likelihood(labels[i], eta);
            let predicted = if sigmoid(eta) >= 0.5 { 1.0 } else { 0.0 };
            if predicted != labels[i] {
                wrong += 1;
            }
        }
        Ok((ll, wrong))
    });
    let mut ll = 0.0;
    let mut wrong = 0;
    for r in per_fold {
        let (l, w) = r?;
        ll += l;
        wrong += w;
    }
    let n = x.n_rows();
    Ok(CvMetrics {
        spec,
        lambda,
        folds,
        n_obs: n,
        mean_log_likelihood: ll / n as f64,
        misclassification: wrong as f64 / n as f64,
    })
}

/// Build the contextual design from `pas` and cross-validate `spec`.
pub fn cross_validate(
    pas: &[PotentialAssist],
    spec: ModelSpec,
    lambda: f64,
    folds: usize,
    seed: u64,
) -> Result<CvMetrics> {
    let (x, y) = build_contextual_design(pas)?;
    cross_validate_design(&x, &y, spec, lambda, folds, seed)
}
