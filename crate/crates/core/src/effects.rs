//! Post-processing of fitted models: scorekeeper ratios, single-variable
//! effects on an average potential assist, adjusted assist totals, scorekeeper
//! bonus distributions and coefficient stability across fits.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::BoxLine;
use crate::par::par_map;
use crate::regress::design::{contextual_terms, groups};
use crate::regress::fit::ModelFit;
use crate::regress::logistic::sigmoid;
use crate::types::{PotentialAssist, RatioKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Home,
    Away,
}

impl Side {
    pub fn of(is_home: bool) -> Self {
        if is_home {
            Side::Home
        } else {
            Side::Away
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Home => "home",
            Side::Away => "away",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Season ratio a scorekeeper awarded to home teams and to visitors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorekeeperRatio {
    pub scorekeeper: String,
    pub home: f64,
    pub away: f64,
}

/// Raw season-long AR or BR per scorekeeper, pooled over that scorekeeper's
/// games. A side with a zero denominator is reported as NaN.
pub fn seasonal_ratios(lines: &[BoxLine], kind: RatioKind) -> Vec<ScorekeeperRatio> {
    let mut by_game: BTreeMap<&str, Vec<&BoxLine>> = BTreeMap::new();
    for l in lines {
        by_game.entry(l.game_id.as_str()).or_default().push(l);
    }
    // scorekeeper -> [home (num, den), away (num, den)]
    let mut acc: BTreeMap<String, [(u64, u64); 2]> = BTreeMap::new();
    for game in by_game.values() {
        let Some(home) = game.iter().find(|l| l.is_home) else { continue };
        for l in game {
            let opp = game.iter().find(|o| o.team_id == l.opp_id);
            let (num, den) = match kind {
                RatioKind::Ar => (l.ast, l.fgm),
                RatioKind::Br => (l.blk, opp.map_or(0, |o| o.fga)),
            };
            let slot = &mut acc.entry(home.team_id.to_string()).or_default()[usize::from(!l.is_home)];
            slot.0 += u64::from(num);
            slot.1 += u64::from(den);
        }
    }
    let ratio = |(n, d): (u64, u64)| if d == 0 { f64::NAN } else { n as f64 / d as f64 };
    acc.into_iter()
        .map(|(sk, [h, a])| ScorekeeperRatio {
            scorekeeper: sk,
            home: ratio(h),
            away: ratio(a),
        })
        .collect()
}

/// Predicted home and away ratios of every scorekeeper from the team-level
/// fit: the league ratio plus centered generosity, plus centered bias at home.
pub fn predicted_ratios(fit: &ModelFit, league_ratio: f64) -> Result<Vec<ScorekeeperRatio>> {
    let generosity = fit.centered(groups::SK_GENEROSITY);
    if generosity.is_empty() {
        return Err(Error::invalid("fit has no scorekeeper generosity coefficients"));
    }
    let bias = fit.centered(groups::SK_BIAS);
    Ok(generosity
        .into_iter()
        .map(|(sk, g)| {
            let b = bias.get(&sk).copied().unwrap_or(0.0);
            ScorekeeperRatio {
                home: league_ratio + g + b,
                away: league_ratio + g,
                scorekeeper: sk,
            }
        })
        .collect())
}

/// Mean continuous covariates over a set of potential assists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragePotentialAssist {
    pub c1_possession_time: f64,
    pub c2_dribbles: f64,
    pub c3_travel_distance: f64,
    pub c4_pass_distance: f64,
    pub c5_passer_defender_dist: f64,
    pub c6_shooter_defender_dist: f64,
}

impl AveragePotentialAssist {
    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            c1_possession_time: v[0],
            c2_dribbles: v[1],
            c3_travel_distance: v[2],
            c4_pass_distance: v[3],
            c5_passer_defender_dist: v[4],
            c6_shooter_defender_dist: v[5],
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.c1_possession_time,
            self.c2_dribbles,
            self.c3_travel_distance,
            self.c4_pass_distance,
            self.c5_passer_defender_dist,
            self.c6_shooter_defender_dist,
        ]
    }
}

pub fn average_potential_assist(pas: &[PotentialAssist]) -> Result<AveragePotentialAssist> {
    if pas.is_empty() {
        return Err(Error::invalid("no potential assists to average"));
    }
    let mut sum = [0.0; 6];
    for pa in pas {
        for (s, v) in sum.iter_mut().zip(pa.continuous()) {
            *s += v;
        }
    }
    Ok(AveragePotentialAssist::from_array(sum.map(|s| s / pas.len() as f64)))
}

/// Log-odds of the average potential assist: intercept plus the mean
/// covariates times their original-scale coefficients.
pub fn baseline_value(fit: &ModelFit, avg: &AveragePotentialAssist) -> f64 {
    baseline_without(fit, avg, None)
}

fn baseline_without(fit: &ModelFit, avg: &AveragePotentialAssist, skip: Option<&str>) -> f64 {
    groups::CONTINUOUS
        .iter()
        .zip(avg.as_array())
        .filter(|(g, _)| Some(**g) != skip)
        .fold(fit.intercept(), |v, (g, x)| v + x * fit.scalar(g))
}

/// Change in probability from adding `i_beta` to the log-odds `v`.
pub fn effect(v: f64, i_beta: f64) -> f64 {
    sigmoid(v + i_beta) - sigmoid(v)
}

/// Variable whose effect is isolated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interest<'a> {
    /// A level of an indicator group, using its group-centered coefficient.
    Level { group: &'a str, level: &'a str },
    /// A continuous covariate set to `value` on the original scale.
    Continuous { group: &'a str, value: f64 },
}

/// Effect of one variable on the average potential assist. A continuous
/// covariate is first removed from the baseline so it is not counted twice.
pub fn effect_of(fit: &ModelFit, avg: &AveragePotentialAssist, interest: Interest<'_>) -> Result<f64> {
    match interest {
        Interest::Level { group, level } => {
            let centered = fit.centered(group);
            let b = centered
                .get(level)
                .ok_or_else(|| Error::invalid(format!("fit has no level {level:?} in group {group:?}")))?;
            Ok(effect(baseline_value(fit, avg), *b))
        }
        Interest::Continuous { group, value } => {
            if !groups::CONTINUOUS.contains(&group) {
                return Err(Error::invalid(format!("{group:?} is not a continuous covariate")));
            }
            let v = baseline_without(fit, avg, Some(group));
            Ok(effect(v, value * fit.scalar(group)))
        }
    }
}

/// Named effect families reported per player, with the groups each removes.
pub const ADJUSTMENT_EFFECTS: [&str; 7] = [
    "position",
    "passer",
    "home_scorekeeper",
    "away_scorekeeper",
    "team",
    "opponent",
    "home",
];

fn effect_groups(effect: &str, is_home: bool) -> &'static [&'static str] {
    use groups::*;
    match (effect, is_home) {
        ("position", _) => &[POSITION],
        ("passer", _) => &[PASSER],
        ("home_scorekeeper", true) => &[SK_GENEROSITY, SK_BIAS],
        ("away_scorekeeper", false) => &[SK_GENEROSITY],
        ("team", _) => &[TEAM],
        ("opponent", _) => &[OPPONENT],
        ("home", _) => &[HOME],
        _ => &[],
    }
}

/// How adjusted totals are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjustMethod {
    /// Sum of adjusted probabilities over all of a player's potential assists.
    #[default]
    Expectation,
    /// Recorded total plus the summed change in probability.
    RecordedPlusDelta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustOptions {
    pub removed: Vec<String>,
    pub method: AdjustMethod,
}

impl Default for AdjustOptions {
    fn default() -> Self {
        Self {
            removed: groups::NON_CONTEXTUAL.iter().map(|s| s.to_string()).collect(),
            method: AdjustMethod::Expectation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustedAssists {
    pub player_id: String,
    pub potential_assists: usize,
    pub recorded: u32,
    pub adjusted: f64,
    pub change: f64,
    pub original_rank: usize,
    pub adjusted_rank: usize,
    /// Assists gained from each effect family, keyed by [`ADJUSTMENT_EFFECTS`].
    pub contributions: BTreeMap<String, f64>,
}

struct RowAdjustment {
    full: f64,
    adjusted: f64,
    contributions: [f64; 7],
}

fn adjust_row(fit: &ModelFit, pa: &PotentialAssist, removed: &[&str]) -> RowAdjustment {
    let terms = contextual_terms(pa);
    let parts: Vec<(&str, f64)> = terms
        .iter()
        .map(|t| (t.group, fit.coefficient(t.group, t.level) * t.value))
        .collect();
    let eta: f64 = parts.iter().map(|p| p.1).sum();
    let part_of = |gs: &[&str]| -> f64 { parts.iter().filter(|p| gs.contains(&p.0)).map(|p| p.1).sum() };
    let p = sigmoid(eta);
    let mut contributions = [0.0; 7];
    for (c, name) in contributions.iter_mut().zip(ADJUSTMENT_EFFECTS) {
        let gs = effect_groups(name, pa.is_home);
        if !gs.is_empty() {
            *c = p - sigmoid(eta - part_of(gs));
        }
    }
    RowAdjustment {
        full: p,
        adjusted: sigmoid(eta - part_of(removed)),
        contributions,
    }
}

/// Adjusted assist totals per passer after zeroing the removed groups, with a
/// leave-one-family-out decomposition. Players are returned in adjusted rank
/// order.
pub fn adjust_assists(
    fit: &ModelFit,
    pas: &[PotentialAssist],
    opts: &AdjustOptions,
) -> Vec<AdjustedAssists> {
    let removed: Vec<&str> = opts.removed.iter().map(String::as_str).collect();
    let rows = par_map(pas, |pa| adjust_row(fit, pa, &removed));
    struct Acc {
        n: usize,
        recorded: u32,
        full: f64,
        adjusted: f64,
        contributions: [f64; 7],
    }
    let mut by_player: BTreeMap<&str, Acc> = BTreeMap::new();
    for (pa, r) in pas.iter().zip(&rows) {
        let a = by_player.entry(pa.passer.as_str()).or_insert(Acc {
            n: 0,
            recorded: 0,
            full: 0.0,
            adjusted: 0.0,
            contributions: [0.0; 7],
        });
        a.n += 1;
        a.recorded += u32::from(pa.label_recorded_assist);
        a.full += r.full;
        a.adjusted += r.adjusted;
        for (s, c) in a.contributions.iter_mut().zip(r.contributions) {
            *s += c;
        }
    }
    let mut out: Vec<AdjustedAssists> = by_player
        .into_iter()
        .map(|(player, a)| {
            let adjusted = match opts.method {
                AdjustMethod::Expectation => a.adjusted,
                AdjustMethod::RecordedPlusDelta => f64::from(a.recorded) + a.adjusted - a.full,
            };
            AdjustedAssists {
                player_id: player.to_string(),
                potential_assists: a.n,
                recorded: a.recorded,
                adjusted,
                change: adjusted - f64::from(a.recorded),
                original_rank: 0,
                adjusted_rank: 0,
                contributions: ADJUSTMENT_EFFECTS
                    .iter()
                    .zip(a.contributions)
                    .map(|(k, v)| (k.to_string(), v))
                    .collect(),
            }
        })
        .collect();
    out.sort_by(|a, b| b.recorded.cmp(&a.recorded).then_with(|| a.player_id.cmp(&b.player_id)));
    for (i, r) in out.iter_mut().enumerate() {
        r.original_rank = i + 1;
    }
    out.sort_by(|a, b| {
        b.adjusted
            .total_cmp(&a.adjusted)
            .then_with(|| b.recorded.cmp(&a.recorded))
            .then_with(|| a.player_id.cmp(&b.player_id))
    });
    for (i, r) in out.iter_mut().enumerate() {
        r.adjusted_rank = i + 1;
    }
    out
}

/// One team-game: recorded assists minus the expectation with scorekeeper
/// effects removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BonusSample {
    pub game_id: String,
    pub team: String,
    pub scorekeeper: String,
    pub side: Side,
    pub recorded: u32,
    pub expected: f64,
    pub bonus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BonusDistribution {
    pub scorekeeper: String,
    pub side: Side,
    pub n: usize,
    pub mean: f64,
    /// Sample variance; zero for a single sample.
    pub variance: f64,
    /// Mean absolute distance from zero.
    pub mean_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BonusReport {
    pub samples: Vec<BonusSample>,
    pub distributions: Vec<BonusDistribution>,
}

impl BonusReport {
    pub fn distribution(&self, scorekeeper: &str, side: Side) -> Option<&BonusDistribution> {
        self.distributions
            .iter()
            .find(|d| d.scorekeeper == scorekeeper && d.side == side)
    }
}

/// Summary statistics of a sample: mean, sample variance and mean absolute value.
pub fn summarize(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let variance = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let mean_abs = xs.iter().map(|x| x.abs()).sum::<f64>() / n;
    (mean, variance, mean_abs)
}

/// Scorekeeper bonus samples per team-game and their per-scorekeeper,
/// per-side distributions. Sides without games are omitted.
pub fn scorekeeper_bonus(fit: &ModelFit, pas: &[PotentialAssist]) -> BonusReport {
    let removed = [groups::SK_GENEROSITY, groups::SK_BIAS];
    let probs = par_map(pas, |pa| sigmoid(fit.linear_predictor_without(pa, &removed)));
    let mut games: BTreeMap<(&str, &str), (&PotentialAssist, u32, f64)> = BTreeMap::new();
    for (pa, p) in pas.iter().zip(probs) {
        let e = games
            .entry((pa.game_id.as_str(), pa.team.as_str()))
            .or_insert((pa, 0, 0.0));
        e.1 += u32::from(pa.label_recorded_assist);
        e.2 += p;
    }
    let samples: Vec<BonusSample> = games
        .into_values()
        .map(|(pa, recorded, expected)| BonusSample {
            game_id: pa.game_id.to_string(),
            team: pa.team.to_string(),
            scorekeeper: pa.scorekeeper.to_string(),
            side: Side::of(pa.is_home),
            recorded,
            expected,
            bonus: f64::from(recorded) - expected,
        })
        .collect();
    let mut grouped: BTreeMap<(&str, Side), Vec<f64>> = BTreeMap::new();
    for s in &samples {
        grouped.entry((s.scorekeeper.as_str(), s.side)).or_default().push(s.bonus);
    }
    let distributions = grouped
        .into_iter()
        .map(|((sk, side), xs)| {
            let (mean, variance, mean_abs) = summarize(&xs);
            BonusDistribution {
                scorekeeper: sk.to_string(),
                side,
                n: xs.len(),
                mean,
                variance,
                mean_abs,
            }
        })
        .collect();
    BonusReport {
        samples,
        distributions,
    }
}

/// Groups compared by [`coefficient_stability`] by default.
pub const STABILITY_GROUPS: [&str; 8] = [
    groups::TEAM,
    groups::OPPONENT,
    groups::SK_BIAS,
    groups::SK_GENEROSITY,
    groups::POSITION,
    groups::PASSER_ZONE,
    groups::SHOOTER_ZONE,
    groups::ZONE_PAIR,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub group: String,
    pub fit_a: usize,
    pub fit_b: usize,
    pub shared_levels: usize,
    /// None when fewer than two shared levels or a constant group.
    pub correlation: Option<f64>,
}

pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation of same-named levels for every pair of fits and each
/// group in `group_names`.
pub fn coefficient_stability(fits: &[ModelFit], group_names: &[&str]) -> Vec<StabilityRow> {
    let mut out = Vec::new();
    for &g in group_names {
        for i in 0..fits.len() {
            for j in i + 1..fits.len() {
                let (Some(a), Some(b)) = (fits[i].group(g), fits[j].group(g)) else {
                    out.push(StabilityRow {
                        group: g.to_string(),
                        fit_a: i,
                        fit_b: j,
                        shared_levels: 0,
                        correlation: None,
                    });
                    continue;
                };
                let shared: BTreeSet<&String> = a.keys().filter(|k| b.contains_key(*k)).collect();
                let xa: Vec<f64> = shared.iter().map(|k| a[*k]).collect();
                let xb: Vec<f64> = shared.iter().map(|k| b[*k]).collect();
                out.push(StabilityRow {
                    group: g.to_string(),
                    fit_a: i,
                    fit_b: j,
                    shared_levels: shared.len(),
                    correlation: pearson(&xa, &xb),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::fit::{Coefficients, Diagnostics, FitKind};

    fn fit_with(groups: &[(&str, &[(&str, f64)])]) -> ModelFit {
        let mut g = Coefficients::new();
        for (name, levels) in groups {
            g.insert(
                name.to_string(),
                levels.iter().map(|(l, v)| (l.to_string(), *v)).collect(),
            );
        }
        ModelFit {
            fit_kind: FitKind::Linear,
            lambda: None,
            n_obs: 0,
            diagnostics: Diagnostics::default(),
            groups: g,
        }
    }

    #[test]
    fn closed_form_effects() {
        assert_eq!(effect(0.3, 0.0), 0.0);
        assert!((effect(0.0, 3f64.ln()) - 0.25).abs() < 1e-12);
        assert!(effect(-1.0, 0.5) > 0.0);
        assert!(effect(2.0, -0.5) < 0.0);
    }

    #[test]
    fn predicted_ratio_formulas() {
        let fit = fit_with(&[
            ("sk_generosity", &[("A", 0.1), ("B", 0.1)]),
            ("sk_bias", &[("A", 0.0), ("B", 0.02)]),
        ]);
        let r = predicted_ratios(&fit, 0.58).unwrap();
        let b = r.iter().find(|r| r.scorekeeper == "B").unwrap();
        assert!((b.away - 0.58).abs() < 1e-15);
        assert!((b.home - b.away - 0.01).abs() < 1e-15);
        let zero = fit_with(&[("sk_generosity", &[("A", 0.0), ("B", 0.0)])]);
        for r in predicted_ratios(&zero, 0.6).unwrap() {
            assert_eq!((r.home, r.away), (0.6, 0.6));
        }
    }

    #[test]
    fn baseline_of_zero_and_intercept_only_fits() {
        let avg = AveragePotentialAssist::from_array([2.59, 1.87, 16.0, 18.21, 6.67, 9.63]);
        assert_eq!(baseline_value(&fit_with(&[]), &avg), 0.0);
        let fit = fit_with(&[("intercept", &[("intercept", -0.4)])]);
        assert_eq!(baseline_value(&fit, &avg), -0.4);
    }

    #[test]
    fn continuous_interest_is_removed_from_baseline() {
        let avg = AveragePotentialAssist::from_array([2.0, 1.0, 10.0, 15.0, 5.0, 8.0]);
        let fit = fit_with(&[
            ("intercept", &[("intercept", 1.0)]),
            ("c1_possession_time", &[("c1_possession_time", -0.5)]),
        ]);
        // V without C1 is just the intercept
        let e = effect_of(&fit, &avg, Interest::Continuous { group: "c1_possession_time", value: 4.0 }).unwrap();
        assert!((e - (sigmoid(1.0 - 2.0) - sigmoid(1.0))).abs() < 1e-15);
        assert!(effect_of(&fit, &avg, Interest::Continuous { group: "team", value: 1.0 }).is_err());
        assert!(effect_of(&fit, &avg, Interest::Level { group: "team", level: "X" }).is_err());
    }

    #[test]
    fn summary_statistics() {
        let (m, v, a) = summarize(&[1.0, -1.0, 3.0]);
        assert!((m - 1.0).abs() < 1e-15);
        assert!((v - 4.0).abs() < 1e-15);
        assert!((a - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(summarize(&[2.5]), (2.5, 0.0, 2.5));
    }

    #[test]
    fn pearson_edge_cases() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0, 2.0], &[1.0, 1.0]), None);
        assert_eq!(pearson(&[1.0], &[1.0]), None);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn stability_of_identical_fits_is_one() {
        let fit = fit_with(&[("team", &[("A", 0.1), ("B", -0.3), ("C", 0.2)])]);
        let rows = coefficient_stability(&[fit.clone(), fit], &["team", "position"]);
        assert_eq!(rows.len(), 2);
        assert!((rows[0].correlation.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rows[1].correlation, None);
    }

    #[test]
    fn seasonal_ratios_pool_by_scorekeeper() {
        use crate::ingest::tests::box_line;
        let lines = vec![
            box_line("g1", "A", "B", true, 40, 80, 22, 5),
            box_line("g1", "B", "A", false, 38, 90, 19, 3),
            box_line("g2", "A", "C", true, 30, 70, 18, 2),
            box_line("g2", "C", "A", false, 40, 80, 21, 0),
        ];
        let r = seasonal_ratios(&lines, RatioKind::Ar);
        assert_eq!(r.len(), 1);
        assert!((r[0].home - 40.0 / 70.0).abs() < 1e-15);
        assert!((r[0].away - 40.0 / 78.0).abs() < 1e-15);
        let b = seasonal_ratios(&lines, RatioKind::Br);
        assert!((b[0].home - 7.0 / 170.0).abs() < 1e-15);
    }
}
