//! Least-squares fit of the team-level ratio model.
//!
//! The full indicator design is rank deficient (each one-hot group sums to
//! the intercept column), so the fit uses the minimum-norm solution. Fitted
//! values do not depend on which solution is chosen, and downstream code only
//! consumes group-centered coefficients.

use nalgebra::{DMatrix, DVector};

use super::design::DesignMatrix;
use super::fit::{Diagnostics, FitKind, ModelFit};
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-10;

pub fn numerical_rank(design: &DesignMatrix) -> usize {
    let x = dense(design);
    let sv = x.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > max * RANK_TOLERANCE).count()
}

fn dense(design: &DesignMatrix) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(design.n_rows(), design.n_cols());
    for i in 0..design.n_rows() {
        let (idx, val) = design.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            x[(i, j as usize)] = v;
        }
    }
    x
}

/// Minimum-norm least-squares solution and its R².
pub fn fit_team_model(design: &DesignMatrix, target: &[f64]) -> Result<ModelFit> {
    let n = design.n_rows();
    if target.len() != n {
        return Err(Error::invalid("target length does not match design rows"));
    }
    if target.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite target value"));
    }
    let x = dense(design);
    let svd = x.clone().svd(true, true);
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > max * RANK_TOLERANCE)
        .count();
    if n < 2 || rank == 0 {
        return Err(Error::Underdetermined {
            observations: n,
            rank,
        });
    }
    let y = DVector::from_column_slice(target);
    let beta = svd
        .solve(&y, max * RANK_TOLERANCE)
        .map_err(|e| Error::invalid(format!("least squares failed: {e}")))?;
    let fitted = &x * &beta;
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ssr: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    let constant = target.iter().all(|&v| v == target[0]);
    let r_squared = if constant || sst == 0.0 { 0.0 } else { 1.0 - ssr / sst };
    Ok(ModelFit::from_vector(
        design,
        beta.as_slice(),
        FitKind::Linear,
        None,
        Diagnostics {
            r_squared: Some(r_squared),
            ..Default::default()
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::design::{build_team_design, groups};
    use crate::types::{GameId, RatioKind, TeamGameRatio, TeamId};

    fn obs(game: usize, team: &str, opp: &str, home: bool, v: f64) -> TeamGameRatio {
        let t = TeamId::new(team).unwrap();
        let o = TeamId::new(opp).unwrap();
        TeamGameRatio {
            game_id: GameId::new(format!("g{game}")).unwrap(),
            scorekeeper: if home { t.clone() } else { o.clone() },
            team: t,
            opponent: o,
            is_home: home,
            kind: RatioKind::Ar,
            value: v,
        }
    }

    fn league(n_teams: usize, games: usize, f: impl Fn(&str, &str, bool) -> f64) -> Vec<TeamGameRatio> {
        let names: Vec<String> = (0..n_teams).map(|i| format!("T{i:02}")).collect();
        let mut out = Vec::new();
        let mut g = 0;
        'outer: for round in 1..n_teams {
            for h in 0..n_teams {
                let a = (h + round) % n_teams;
                out.push(obs(g, &names[h], &names[a], true, f(&names[h], &names[a], true)));
                out.push(obs(g, &names[a], &names[h], false, f(&names[a], &names[h], false)));
                g += 1;
                if g == games {
                    break 'outer;
                }
            }
        }
        out
    }

    #[test]
    fn constant_target_has_zero_r2_and_zero_centered_effects() {
        let data = league(6, 30, |_, _, _| 0.6);
        let (x, y) = build_team_design(&data).unwrap();
        let fit = fit_team_model(&x, &y).unwrap();
        assert_eq!(fit.diagnostics.r_squared, Some(0.0));
        for g in [groups::TEAM, groups::OPPONENT, groups::SK_GENEROSITY, groups::SK_BIAS] {
            for v in fit.centered(g).values() {
                assert!(v.abs() < 1e-10, "{g}: {v}");
            }
        }
    }

    #[test]
    fn noiseless_target_is_reproduced() {
        let eff = |s: &str| (s[1..].parse::<f64>().unwrap() * 0.7).sin() * 0.05;
        let data = league(8, 56, |t, o, home| {
            let sk = if home { t } else { o };
            0.55 + if home { 0.01 + eff(sk) * 0.5 } else { 0.0 } + eff(t) - 0.5 * eff(o) + 0.3 * eff(sk)
        });
        let (x, y) = build_team_design(&data).unwrap();
        let fit = fit_team_model(&x, &y).unwrap();
        for (o, target) in data.iter().zip(&y) {
            assert!((fit.predict_ratio(o) - target).abs() < 1e-8);
        }
        assert!((fit.diagnostics.r_squared.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn predictions_invariant_to_null_space_shift() {
        let data = league(6, 30, |t, o, h| {
            0.5 + 0.01 * (t.len() as f64) + if h { 0.02 } else { 0.0 } + if o == "T01" { 0.03 } else { 0.0 }
        });
        let (x, y) = build_team_design(&data).unwrap();
        let fit = fit_team_model(&x, &y).unwrap();
        let mut shifted = fit.clone();
        // team one-hot sums to the intercept column
        for v in shifted.groups.get_mut(groups::TEAM).unwrap().values_mut() {
            *v += 0.25;
        }
        *shifted
            .groups
            .get_mut(groups::INTERCEPT)
            .unwrap()
            .get_mut(groups::INTERCEPT)
            .unwrap() -= 0.25;
        for o in &data {
            assert!((fit.predict_ratio(o) - shifted.predict_ratio(o)).abs() < 1e-10);
        }
    }

    #[test]
    fn four_row_fixture_matches_hand_least_squares() {
        // Two teams, two games. The design has rank 4, so least squares
        // interpolates the four observations exactly.
        let data = vec![
            obs(1, "A", "B", true, 0.60),
            obs(1, "B", "A", false, 0.50),
            obs(2, "B", "A", true, 0.70),
            obs(2, "A", "B", false, 0.40),
        ];
        let (x, y) = build_team_design(&data).unwrap();
        assert_eq!(numerical_rank(&x), 4);
        let fit = fit_team_model(&x, &y).unwrap();
        for (o, t) in data.iter().zip(&y) {
            assert!((fit.predict_ratio(o) - t).abs() < 1e-12);
        }
        // minimum-norm: coefficients lie in the row space, x^T z for z = (X X^T)^{-1} y
        let xd = DMatrix::from_row_slice(4, 10, &x.to_dense().concat());
        let gram = &xd * xd.transpose();
        let z = gram.try_inverse().unwrap() * DVector::from_column_slice(&y);
        let hand = xd.transpose() * z;
        let ours: Vec<f64> = fit.groups.values().flat_map(|g| g.values().copied()).collect();
        // BTreeMap order: home, intercept, opponent, sk_bias, sk_generosity, team
        let names = x.column_names();
        for (j, (g, l)) in names.iter().enumerate() {
            assert!((fit.coefficient(g, l) - hand[j]).abs() < 1e-10, "{g}/{l}");
        }
        assert_eq!(ours.len(), 10);
    }

    #[test]
    fn too_few_observations_is_underdetermined() {
        let data = vec![obs(1, "A", "B", true, 0.6)];
        let (x, y) = build_team_design(&data).unwrap();
        assert!(matches!(fit_team_model(&x, &y), Err(Error::Underdetermined { .. })));
    }
}
