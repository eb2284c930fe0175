//! Synthetic seasons with known ground truth.
//!
//! Every potential assist is scripted in offensive coordinates: passer and
//! receiver locations are drawn inside chosen zones, the shooter's drive is a
//! chain of jittered dribble anchors, and defenders shadow the offensive
//! players. Moments are emitted exactly at the anchor times, so extraction
//! reproduces the generator's covariates. Labels are drawn from the logistic
//! model under the planted coefficients.
//!
//! Coordinates are kept on a 1/1024 ft lattice so that reflecting into raw
//! court coordinates and back is exact.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::court::{distance, zone_of, CourtPoint, CourtZone, BASKET_X, BASKET_Y, COURT_LENGTH};
use crate::error::{Error, Result};
use crate::ingest::{
    bundle_from_parts, AssistLabel, BoxLine, DataWriter, GameBundle, RosterEntry,
};
use crate::par::par_map;
use crate::regress::design::{groups, zone_pair_name};
use crate::regress::fit::{Coefficients, Diagnostics, FitKind, ModelFit};
use crate::regress::logistic::sigmoid;
use crate::types::{
    Entity, EntityKind, EventKind, EventRecord, GameId, Moment, PlayerId, Position,
    PotentialAssist, TeamId,
};

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

/// League team codes; scorekeepers share their team's code.
pub const TEAM_CODES: [&str; 30] = [
    "ATL", "BKN", "BOS", "CHA", "CHI", "CLE", "DAL", "DEN", "DET", "GSW", "HOU", "IND", "LAC",
    "LAL", "MEM", "MIA", "MIL", "MIN", "NOP", "NYK", "OKC", "ORL", "PHI", "PHX", "POR", "SAC",
    "SAS", "TOR", "UTA", "WAS",
];

/// Roster position pattern for a 12-man team.
const ROSTER_POSITIONS: [Position; 12] = [
    Position::PointGuard,
    Position::ShootingGuard,
    Position::SmallForward,
    Position::PowerForward,
    Position::Center,
    Position::PointGuard,
    Position::ShootingGuard,
    Position::SmallForward,
    Position::PowerForward,
    Position::Center,
    Position::SmallForward,
    Position::ShootingGuard,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthPlayer {
    pub player_id: PlayerId,
    pub name: String,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTeam {
    pub team_id: TeamId,
    pub players: Vec<TruthPlayer>,
}

/// Spread of the sampled coefficients, on the original covariate scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthConfig {
    pub n_teams: usize,
    pub players_per_team: usize,
    pub intercept: f64,
    pub home: f64,
    pub team_sd: f64,
    pub opponent_sd: f64,
    pub sk_generosity_sd: f64,
    pub sk_bias_sd: f64,
    pub passer_sd: f64,
    /// PG, SG, SF, PF, C; centered before use.
    pub position: [f64; 5],
    pub zone_sd: f64,
    pub zone_pair_sd: f64,
    /// C1..C6 per unit on the original scale.
    pub continuous: [f64; 6],
}

impl Default for TruthConfig {
    fn default() -> Self {
        Self {
            n_teams: 30,
            players_per_team: 12,
            intercept: 2.6,
            home: 0.05,
            team_sd: 0.2,
            opponent_sd: 0.2,
            sk_generosity_sd: 0.5,
            sk_bias_sd: 0.3,
            passer_sd: 0.3,
            position: [0.45, 0.1, 0.0, -0.2, -0.35],
            zone_sd: 0.4,
            zone_pair_sd: 0.4,
            continuous: [-0.8, -0.25, -0.03, 0.02, 0.03, 0.04],
        }
    }
}

/// League structure plus the full contextual coefficient set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub teams: Vec<TruthTeam>,
    pub coefficients: Coefficients,
}

fn centered(mut v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len().max(1) as f64;
    for x in &mut v {
        *x -= m;
    }
    v
}

impl GroundTruth {
    /// League of `n_teams` with every coefficient zero.
    pub fn league(n_teams: usize, players_per_team: usize) -> Result<Self> {
        if !(2..=TEAM_CODES.len()).contains(&n_teams) {
            return Err(Error::Generation(format!(
                "team count must be in 2..={}, got {n_teams}",
                TEAM_CODES.len()
            )));
        }
        if players_per_team < 5 {
            return Err(Error::Generation("teams need at least five players".into()));
        }
        let teams: Vec<TruthTeam> = TEAM_CODES[..n_teams]
            .iter()
            .map(|code| TruthTeam {
                team_id: TeamId::new(code).expect("non-empty code"),
                players: (0..players_per_team)
                    .map(|i| TruthPlayer {
                        player_id: PlayerId::new(format!("{code}{:02}", i + 1)).expect("non-empty"),
                        name: format!("{code} Player {}", i + 1),
                        position: ROSTER_POSITIONS[i % ROSTER_POSITIONS.len()],
                    })
                    .collect(),
            })
            .collect();
        let mut truth = Self {
            teams,
            coefficients: Coefficients::new(),
        };
        truth.fill_groups(|_, n| vec![0.0; n], |_| 0.0);
        Ok(truth)
    }

    fn fill_groups(
        &mut self,
        mut group: impl FnMut(&str, usize) -> Vec<f64>,
        mut scalar: impl FnMut(&str) -> f64,
    ) {
        use groups::*;
        let team_levels: Vec<String> = self.teams.iter().map(|t| t.team_id.to_string()).collect();
        let passer_levels: Vec<String> = self
            .teams
            .iter()
            .flat_map(|t| t.players.iter().map(|p| p.player_id.to_string()))
            .collect();
        let zones: Vec<String> = CourtZone::ALL.iter().map(|z| z.name().to_string()).collect();
        let mut c = Coefficients::new();
        let mut put = |name: &str, levels: &[String], values: Vec<f64>| {
            c.insert(
                name.to_string(),
                levels.iter().cloned().zip(values).collect(),
            );
        };
        put(INTERCEPT, &[INTERCEPT.to_string()], vec![scalar(INTERCEPT)]);
        put(HOME, &[HOME.to_string()], vec![scalar(HOME)]);
        for g in [TEAM, OPPONENT, SK_GENEROSITY, SK_BIAS] {
            put(g, &team_levels, group(g, team_levels.len()));
        }
        put(PASSER, &passer_levels, group(PASSER, passer_levels.len()));
        let positions: Vec<String> = Position::ALL.iter().map(|p| p.code().to_string()).collect();
        put(POSITION, &positions, group(POSITION, 5));
        for g in CONTINUOUS {
            put(g, &[g.to_string()], vec![scalar(g)]);
        }
        put(PASSER_ZONE, &zones, group(PASSER_ZONE, 6));
        put(SHOOTER_ZONE, &zones, group(SHOOTER_ZONE, 6));
        let pairs: Vec<String> = CourtZone::ALL
            .iter()
            .flat_map(|&a| CourtZone::ALL.iter().map(move |&b| zone_pair_name(a, b).to_string()))
            .collect();
        put(ZONE_PAIR, &pairs, group(ZONE_PAIR, 36));
        self.coefficients = c;
    }

    /// Random truth: one-hot groups are normal draws centered within their
    /// group, zone pairs are centered along both zones.
    pub fn sample(cfg: &TruthConfig, seed: u64) -> Result<Self> {
        use groups::*;
        let mut truth = Self::league(cfg.n_teams, cfg.players_per_team)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut normal = |n: usize, sd: f64| -> Vec<f64> {
            centered((0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect())
        };
        let mut drawn: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        let n_teams = truth.teams.len();
        let n_players: usize = truth.teams.iter().map(|t| t.players.len()).sum();
        drawn.insert(TEAM, normal(n_teams, cfg.team_sd));
        drawn.insert(OPPONENT, normal(n_teams, cfg.opponent_sd));
        drawn.insert(SK_GENEROSITY, normal(n_teams, cfg.sk_generosity_sd));
        drawn.insert(SK_BIAS, normal(n_teams, cfg.sk_bias_sd));
        drawn.insert(PASSER, normal(n_players, cfg.passer_sd));
        drawn.insert(POSITION, centered(cfg.position.to_vec()));
        drawn.insert(PASSER_ZONE, normal(6, cfg.zone_sd));
        drawn.insert(SHOOTER_ZONE, normal(6, cfg.zone_sd));
        drawn.insert(ZONE_PAIR, double_center(&normal(36, cfg.zone_pair_sd)));
        let scalars: BTreeMap<&str, f64> = [(INTERCEPT, cfg.intercept), (HOME, cfg.home)]
            .into_iter()
            .chain(CONTINUOUS.iter().copied().zip(cfg.continuous))
            .collect();
        truth.fill_groups(
            |g, n| drawn.get(g).cloned().unwrap_or_else(|| vec![0.0; n]),
            |g| scalars.get(g).copied().unwrap_or(0.0),
        );
        Ok(truth)
    }

    /// Set one level and shift the group's other levels so it stays centered.
    pub fn plant(&mut self, group: &str, level: &str, value: f64) -> Result<()> {
        let g = self
            .coefficients
            .get_mut(group)
            .ok_or_else(|| Error::invalid(format!("unknown group {group:?}")))?;
        if !g.contains_key(level) {
            return Err(Error::invalid(format!("unknown level {level:?} in {group:?}")));
        }
        g.insert(level.to_string(), value);
        let others = g.len() - 1;
        if others > 0 {
            let shift = g.values().sum::<f64>() / others as f64;
            for (k, v) in g.iter_mut() {
                if k != level {
                    *v -= shift;
                }
            }
        }
        Ok(())
    }

    /// Scale every level of a group, e.g. to make scorekeeper effects small.
    pub fn scale_group(&mut self, group: &str, factor: f64) -> Result<()> {
        let g = self
            .coefficients
            .get_mut(group)
            .ok_or_else(|| Error::invalid(format!("unknown group {group:?}")))?;
        g.values_mut().for_each(|v| *v *= factor);
        Ok(())
    }

    pub fn set_scalar(&mut self, group: &str, value: f64) -> Result<()> {
        let g = self
            .coefficients
            .get_mut(group)
            .filter(|g| g.len() == 1 && g.contains_key(group))
            .ok_or_else(|| Error::invalid(format!("{group:?} is not a scalar group")))?;
        g.insert(group.to_string(), value);
        Ok(())
    }

    pub fn as_fit(&self) -> ModelFit {
        ModelFit {
            fit_kind: FitKind::Logistic,
            lambda: None,
            n_obs: 0,
            diagnostics: Diagnostics::default(),
            groups: self.coefficients.clone(),
        }
    }

    pub fn roster(&self) -> BTreeMap<PlayerId, RosterEntry> {
        self.teams
            .iter()
            .flat_map(|t| {
                t.players.iter().map(move |p| {
                    (
                        p.player_id.clone(),
                        RosterEntry {
                            player_id: p.player_id.clone(),
                            name: p.name.clone(),
                            team_id: t.team_id.clone(),
                            position: p.position,
                        },
                    )
                })
            })
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::report::write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        crate::report::read_json(path)
    }
}

/// Remove row and column means of a 6x6 table stored row-major.
fn double_center(v: &[f64]) -> Vec<f64> {
    let row: Vec<f64> = (0..6).map(|i| v[i * 6..i * 6 + 6].iter().sum::<f64>() / 6.0).collect();
    let col: Vec<f64> = (0..6).map(|j| (0..6).map(|i| v[i * 6 + j]).sum::<f64>() / 6.0).collect();
    let all = v.iter().sum::<f64>() / 36.0;
    (0..36).map(|k| v[k] - row[k / 6] - col[k % 6] + all).collect()
}

// ---------------------------------------------------------------------------
// Recovery
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRow {
    pub group: String,
    pub levels: usize,
    /// None for single-column groups or constant values.
    pub correlation: Option<f64>,
    pub rmse: f64,
}

/// Values of one group in identifiable form: one-hot groups centered, zone
/// pairs with both zone margins removed, scalars as is.
fn identifiable(coef: &Coefficients, group: &str) -> BTreeMap<String, f64> {
    let Some(g) = coef.get(group) else {
        return BTreeMap::new();
    };
    if g.len() == 1 {
        return g.clone();
    }
    if group == groups::ZONE_PAIR {
        let v: Vec<f64> = CourtZone::ALL
            .iter()
            .flat_map(|&a| CourtZone::ALL.iter().map(move |&b| zone_pair_name(a, b)))
            .map(|name| g.get(name).copied().unwrap_or(0.0))
            .collect();
        let names = CourtZone::ALL
            .iter()
            .flat_map(|&a| CourtZone::ALL.iter().map(move |&b| zone_pair_name(a, b).to_string()));
        return names.zip(double_center(&v)).collect();
    }
    let m = g.values().sum::<f64>() / g.len() as f64;
    g.iter().map(|(k, v)| (k.clone(), v - m)).collect()
}

/// Per-group agreement between a fit and the truth over shared levels.
pub fn recovery_report(truth: &GroundTruth, fit: &ModelFit) -> Vec<RecoveryRow> {
    truth
        .coefficients
        .keys()
        .filter(|g| g.as_str() != groups::INTERCEPT)
        .map(|g| {
            let t = identifiable(&truth.coefficients, g);
            let f = identifiable(&fit.groups, g);
            // levels absent from the fit were never observed
            let shared: Vec<(&f64, &f64)> = t.iter().filter_map(|(k, tv)| f.get(k).map(|fv| (tv, fv))).collect();
            let a: Vec<f64> = shared.iter().map(|p| *p.0).collect();
            let b: Vec<f64> = shared.iter().map(|p| *p.1).collect();
            let rmse = if shared.is_empty() {
                0.0
            } else {
                (a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
            };
            RecoveryRow {
                group: g.clone(),
                levels: shared.len(),
                correlation: crate::effects::pearson(&a, &b),
                rmse,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Season generation
// ---------------------------------------------------------------------------

/// Per-team, per-game possession counts, each drawn uniformly from the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub potential_assists: (u32, u32),
    pub misses: (u32, u32),
    pub turnovers: (u32, u32),
    pub inbound_makes: (u32, u32),
    pub unassisted_makes: (u32, u32),
    /// Makes more than seven seconds after the catch.
    pub late_makes: (u32, u32),
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            potential_assists: (20, 30),
            misses: (8, 14),
            turnovers: (2, 5),
            inbound_makes: (1, 3),
            unassisted_makes: (3, 7),
            late_makes: (0, 2),
        }
    }
}

/// One generated game: raw files content plus the generator's own record of
/// every potential assist.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthGame {
    pub game_id: GameId,
    pub moments: Vec<Moment>,
    pub events: Vec<EventRecord>,
    pub box_lines: Vec<BoxLine>,
    pub labels: Vec<AssistLabel>,
    pub truth_records: Vec<PotentialAssist>,
}

impl SynthGame {
    /// Validate and normalize through the regular ingest path.
    pub fn bundle(&self, roster: &BTreeMap<PlayerId, RosterEntry>) -> Result<GameBundle> {
        let mut b = bundle_from_parts(
            self.box_lines.clone(),
            self.moments.clone(),
            self.events.clone(),
            roster,
        )?;
        b.pop()
            .ok_or_else(|| Error::Generation(format!("game {} did not assemble", self.game_id)))
    }
}

/// Deterministic season: game `i` depends only on the seed and `i`.
#[derive(Debug, Clone)]
pub struct SeasonGenerator {
    pub truth: GroundTruth,
    pub config: GameConfig,
    seed: u64,
    schedule: Vec<(usize, usize)>,
    roster: BTreeMap<PlayerId, RosterEntry>,
}

/// Shuffled double round robin, reshuffled and repeated until `n_games`.
fn build_schedule(n_teams: usize, n_games: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let pairs: Vec<(usize, usize)> = (0..n_teams)
        .flat_map(|h| (0..n_teams).filter(move |&a| a != h).map(move |a| (h, a)))
        .collect();
    let mut out = Vec::with_capacity(n_games);
    while out.len() < n_games {
        let mut round = pairs.clone();
        round.shuffle(rng);
        out.extend(round.into_iter().take(n_games - out.len()));
    }
    out
}

impl SeasonGenerator {
    pub fn new(truth: GroundTruth, n_games: usize, seed: u64) -> Result<Self> {
        Self::with_config(truth, GameConfig::default(), n_games, seed)
    }

    pub fn with_config(truth: GroundTruth, config: GameConfig, n_games: usize, seed: u64) -> Result<Self> {
        if n_games == 0 {
            return Err(Error::Generation("need at least one game".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schedule = build_schedule(truth.teams.len(), n_games, &mut rng);
        let roster = truth.roster();
        Ok(Self {
            truth,
            config,
            seed,
            schedule,
            roster,
        })
    }

    pub fn n_games(&self) -> usize {
        self.schedule.len()
    }

    pub fn roster(&self) -> &BTreeMap<PlayerId, RosterEntry> {
        &self.roster
    }

    pub fn game(&self, index: usize) -> Result<SynthGame> {
        let (h, a) = *self
            .schedule
            .get(index)
            .ok_or_else(|| Error::Generation(format!("no game {index}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64 + 1);
        GameScript::new(&self.truth, &self.config, index, h, a, rng).run()
    }

    /// All games, generated in parallel and returned in schedule order.
    pub fn generate(&self) -> Result<Vec<SynthGame>> {
        let idx: Vec<usize> = (0..self.n_games()).collect();
        par_map(&idx, |&i| self.game(i)).into_iter().collect()
    }

    /// Write the season and its ground truth in the canonical schemas,
    /// one game at a time.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut out = DataWriter::create(dir)?;
        for i in 0..self.n_games() {
            let g = self.game(i)?;
            out.write_game(&g.moments, &g.events, &g.box_lines, &g.labels)?;
        }
        out.finish(&self.roster)?;
        self.truth.save(&dir.join(GROUND_TRUTH_FILE))
    }
}

/// Generate `n_games` with `truth`, deterministic in `seed`.
pub fn generate_season(truth: &GroundTruth, n_games: usize, seed: u64) -> Result<Vec<SynthGame>> {
    SeasonGenerator::new(truth.clone(), n_games, seed)?.generate()
}

// ---------------------------------------------------------------------------
// Possession scripts
// ---------------------------------------------------------------------------

const QUARTER_MS: i64 = 720_000;
const QUARTER_BREAK_MS: i64 = 120_000;
/// Offensive-coordinate limit that keeps every shot on the attacking half.
const MAX_OFFENSE_X: f64 = 46.0;
const PASSER_ZONE_WEIGHTS: [f64; 6] = [0.06, 0.2, 0.2, 0.32, 0.12, 0.1];
const SHOOTER_ZONE_WEIGHTS: [f64; 6] = [0.14, 0.24, 0.2, 0.26, 0.1, 0.06];

fn q(v: f64) -> f64 {
    (v * 1024.0).round() / 1024.0
}

fn qp(x: f64, y: f64) -> CourtPoint {
    CourtPoint::new(q(x), q(y))
}

fn clamp_offense(p: CourtPoint) -> CourtPoint {
    qp(p.x.clamp(0.5, MAX_OFFENSE_X), p.y.clamp(0.5, 49.5))
}

fn clamp_court(p: CourtPoint) -> CourtPoint {
    qp(p.x.clamp(0.5, COURT_LENGTH - 0.5), p.y.clamp(0.5, 49.5))
}

fn sample_in_zone(zone: CourtZone, rng: &mut ChaCha8Rng) -> Result<CourtPoint> {
    let (x0, x1, y0, y1) = match zone {
        CourtZone::Dunk => (2.25, 8.25, 22.0, 28.0),
        CourtZone::Paint => (0.5, 19.0, 17.0, 33.0),
        CourtZone::Long2 => (0.5, 29.0, 1.25, 48.75),
        CourtZone::Arc3 => (0.5, 39.0, 0.5, 49.5),
        CourtZone::Corner3 => (0.5, 14.0, 0.5, 49.5),
        CourtZone::Heave => (30.0, MAX_OFFENSE_X, 0.5, 49.5),
    };
    for _ in 0..10_000 {
        let p = qp(rng.random_range(x0..x1), rng.random_range(y0..y1));
        if zone_of(p)? == zone {
            return Ok(p);
        }
    }
    Err(Error::Generation(format!("could not place a point in {zone}")))
}

fn toward_basket(p: CourtPoint) -> f64 {
    (BASKET_Y - p.y).atan2(BASKET_X - p.x)
}

fn step(p: CourtPoint, angle: f64, len: f64) -> CourtPoint {
    clamp_offense(CourtPoint::new(p.x + len * angle.cos(), p.y + len * angle.sin()))
}

/// A defender shadowing `p` on its basket side.
fn shadow(p: CourtPoint, rng: &mut ChaCha8Rng) -> CourtPoint {
    let d = rng.random_range(1.5..11.0);
    let a = toward_basket(p) + rng.random_range(-1.2..1.2);
    clamp_court(CourtPoint::new(p.x + d * a.cos(), p.y + d * a.sin()))
}

fn loose_spot(rng: &mut ChaCha8Rng) -> CourtPoint {
    qp(rng.random_range(1.0..40.0), rng.random_range(1.0..49.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Assistable,
    Miss,
    Turnover,
    Inbound,
    Unassisted,
    Late,
}

/// Positions of everyone on the floor at one instant, offensive coordinates.
struct Frame {
    t: i64,
    offense: [CourtPoint; 5],
    defense: [CourtPoint; 5],
    ball_holder: usize,
}

struct GameScript<'a> {
    fit: ModelFit,
    config: &'a GameConfig,
    game_id: GameId,
    date: String,
    home: &'a TruthTeam,
    away: &'a TruthTeam,
    rng: ChaCha8Rng,
    moments: Vec<Moment>,
    events: Vec<EventRecord>,
    labels: Vec<AssistLabel>,
    records: Vec<PotentialAssist>,
    /// fgm, fga, ast, blk per side (home first)
    stats: [[u32; 4]; 2],
    clock: i64,
}

fn date_of(index: usize) -> String {
    // 170 game days from late October
    const MONTHS: [(&str, u32); 6] = [("2015-11", 30), ("2015-12", 31), ("2016-01", 31), ("2016-02", 29), ("2016-03", 31), ("2016-04", 13)];
    let mut day = (index / 8) as u32 % 165;
    for (m, len) in MONTHS {
        if day < len {
            return format!("{m}-{:02}", day + 1);
        }
        day -= len;
    }
    "2016-04-13".into()
}

impl<'a> GameScript<'a> {
    fn new(
        truth: &'a GroundTruth,
        config: &'a GameConfig,
        index: usize,
        home: usize,
        away: usize,
        rng: ChaCha8Rng,
    ) -> Self {
        Self {
            fit: truth.as_fit(),
            config,
            game_id: GameId::new(format!("G{:05}", index + 1)).expect("non-empty"),
            date: date_of(index),
            home: &truth.teams[home],
            away: &truth.teams[away],
            rng,
            moments: Vec::new(),
            events: Vec::new(),
            labels: Vec::new(),
            records: Vec::new(),
            stats: [[0; 4]; 2],
            clock: 0,
        }
    }

    fn draw(&mut self, range: (u32, u32)) -> u32 {
        self.rng.random_range(range.0..=range.1.max(range.0))
    }

    fn run(mut self) -> Result<SynthGame> {
        let mut plan: Vec<(usize, Kind)> = Vec::new();
        let c = self.config.clone();
        for side in 0..2 {
            for (kind, range) in [
                (Kind::Assistable, c.potential_assists),
                (Kind::Miss, c.misses),
                (Kind::Turnover, c.turnovers),
                (Kind::Inbound, c.inbound_makes),
                (Kind::Unassisted, c.unassisted_makes),
                (Kind::Late, c.late_makes),
            ] {
                let n = self.draw(range);
                plan.extend(std::iter::repeat_n((side, kind), n as usize));
            }
        }
        plan.shuffle(&mut self.rng);
        let total = plan.len().max(1);
        for (k, (side, kind)) in plan.into_iter().enumerate() {
            let quarter = (1 + k * 4 / total) as u8;
            self.possession(side, kind, quarter)?;
        }
        let home_id = self.home.team_id.clone();
        let away_id = self.away.team_id.clone();
        let line = |s: [u32; 4], team: &TeamId, opp: &TeamId, is_home: bool| BoxLine {
            game_id: self.game_id.clone(),
            date: self.date.clone(),
            team_id: team.clone(),
            opp_id: opp.clone(),
            is_home,
            fgm: s[0],
            fga: s[1],
            ast: s[2],
            blk: s[3],
        };
        let box_lines = vec![
            line(self.stats[0], &home_id, &away_id, true),
            line(self.stats[1], &away_id, &home_id, false),
        ];
        Ok(SynthGame {
            game_id: self.game_id,
            moments: self.moments,
            events: self.events,
            box_lines,
            labels: self.labels,
            truth_records: self.records,
        })
    }

    fn offense(&self, side: usize) -> &'a TruthTeam {
        if side == 0 {
            self.home
        } else {
            self.away
        }
    }

    fn defense(&self, side: usize) -> &'a TruthTeam {
        self.offense(1 - side)
    }

    /// Home attacks the low basket in the first half; halves swap after
    /// halftime and in every other overtime.
    fn attacks_high(side: usize, quarter: u8) -> bool {
        let first_half = quarter <= 2 || (quarter > 4 && quarter % 2 == 1);
        (side == 0) != first_half
    }

    fn start_time(&mut self, quarter: u8) -> i64 {
        let q_start = (i64::from(quarter) - 1) * (QUARTER_MS + QUARTER_BREAK_MS);
        self.clock = self.clock.max(q_start) + self.rng.random_range(1_500..5_000);
        self.clock
    }

    fn event(&mut self, t: i64, kind: EventKind, team: &TruthTeam, player: &PlayerId) {
        self.events.push(EventRecord {
            game_id: self.game_id.clone(),
            wall_time: t,
            kind,
            team: team.team_id.clone(),
            player: player.clone(),
        });
        self.clock = self.clock.max(t);
    }

    fn emit(&mut self, side: usize, quarter: u8, on: &[&TruthPlayer; 5], guards: &[&TruthPlayer; 5], f: &Frame) {
        let high = Self::attacks_high(side, quarter);
        let raw = |p: CourtPoint| if high { p.reflected() } else { p };
        let q_start = (i64::from(quarter) - 1) * (QUARTER_MS + QUARTER_BREAK_MS);
        let game_clock = ((QUARTER_MS - (f.t - q_start)).max(0) as f64) / 1000.0;
        let off = self.offense(side);
        let def = self.defense(side);
        let mut entities = Vec::with_capacity(11);
        for (p, pt) in on.iter().zip(f.offense) {
            entities.push(Entity {
                kind: EntityKind::Player,
                team: Some(off.team_id.clone()),
                player: Some(p.player_id.clone()),
                point: raw(pt),
            });
        }
        for (p, pt) in guards.iter().zip(f.defense) {
            entities.push(Entity {
                kind: EntityKind::Player,
                team: Some(def.team_id.clone()),
                player: Some(p.player_id.clone()),
                point: raw(pt),
            });
        }
        entities.push(Entity {
            kind: EntityKind::Ball,
            team: None,
            player: None,
            point: raw(f.offense[f.ball_holder]).with_height(4.0),
        });
        self.moments.push(Moment {
            game_id: self.game_id.clone(),
            quarter,
            game_clock,
            wall_time: f.t,
            entities,
        });
    }

    fn lineup(&mut self, team: &'a TruthTeam, must: &[usize]) -> [&'a TruthPlayer; 5] {
        let mut idx: Vec<usize> = must.to_vec();
        let mut rest: Vec<usize> = (0..team.players.len()).filter(|i| !must.contains(i)).collect();
        rest.shuffle(&mut self.rng);
        idx.extend(rest.into_iter().take(5 - must.len()));
        [0, 1, 2, 3, 4].map(|k| &team.players[idx[k]])
    }

    fn defend(&mut self, offense: &[CourtPoint; 5]) -> [CourtPoint; 5] {
        let mut out = [CourtPoint::new(0.0, 0.0); 5];
        for (d, p) in out.iter_mut().zip(offense) {
            *d = shadow(*p, &mut self.rng);
        }
        out
    }

    fn pick_zone(&mut self, weights: &[f64; 6]) -> CourtZone {
        let w = WeightedIndex::new(weights).expect("positive weights");
        CourtZone::ALL[w.sample(&mut self.rng)]
    }

    /// Catch-to-release duration and dribble times.
    fn drive_timing(&mut self, t1: i64, late: bool) -> (i64, Vec<i64>) {
        let gap: i64 = if late {
            self.rng.random_range(7_050..9_500)
        } else if self.rng.random_bool(0.35) {
            self.rng.random_range(300..1_500)
        } else {
            self.rng.random_range(900..=7_000)
        };
        let secs = gap as f64 / 1000.0;
        let n = if gap < 800 {
            0
        } else {
            ((secs * self.rng.random_range(0.3..1.2)) as usize).min(((gap - 2) / 150) as usize)
        };
        let mut times: Vec<i64> = Vec::with_capacity(n);
        let span = gap - 2;
        for k in 0..n {
            // evenly spread with jitter, strictly inside (t1, t1 + gap)
            let base = 1 + span * (k as i64 + 1) / (n as i64 + 1);
            let jitter = self.rng.random_range(-40..=40);
            times.push(t1 + (base + jitter).clamp(1, gap - 1));
        }
        times.sort_unstable();
        times.dedup();
        (gap, times)
    }

    fn possession(&mut self, side: usize, kind: Kind, quarter: u8) -> Result<()> {
        match kind {
            Kind::Assistable | Kind::Miss | Kind::Inbound | Kind::Late | Kind::Turnover => {
                self.passing_play(side, kind, quarter)
            }
            Kind::Unassisted => self.solo_play(side, quarter),
        }
    }

    fn passing_play(&mut self, side: usize, kind: Kind, quarter: u8) -> Result<()> {
        let off = self.offense(side);
        let def = self.defense(side);
        let n = off.players.len();
        let passer_i = self.rng.random_range(0..n);
        let mut shooter_i = self.rng.random_range(0..n - 1);
        if shooter_i >= passer_i {
            shooter_i += 1;
        }
        let on = self.lineup(off, &[passer_i, shooter_i]);
        let guards = self.lineup(def, &[]);
        let passer = on[0];
        let shooter = on[1];

        let pz = self.pick_zone(&PASSER_ZONE_WEIGHTS);
        let sz = self.pick_zone(&SHOOTER_ZONE_WEIGHTS);
        let pass_from = sample_in_zone(pz, &mut self.rng)?;
        let catch_at = sample_in_zone(sz, &mut self.rng)?;
        let others = [loose_spot(&mut self.rng), loose_spot(&mut self.rng), loose_spot(&mut self.rng)];

        let t0 = self.start_time(quarter);
        let flight = 150 + (distance(pass_from, catch_at) * 25.0) as i64;
        let t1 = t0 + flight.max(1);

        // shooter position at release of the pass: somewhere on the way
        let shooter_start = step(catch_at, self.rng.random_range(0.0..2.0 * PI), self.rng.random_range(0.0..6.0));
        let at_pass = [pass_from, shooter_start, others[0], others[1], others[2]];
        let pass_frame = Frame {
            t: t0,
            defense: self.defend(&at_pass),
            offense: at_pass,
            ball_holder: 0,
        };
        let at_catch = [pass_from, catch_at, others[0], others[1], others[2]];
        let catch_frame = Frame {
            t: t1,
            defense: self.defend(&at_catch),
            offense: at_catch,
            ball_holder: 1,
        };
        let pass_kind = if kind == Kind::Inbound {
            EventKind::InboundPass
        } else {
            EventKind::PassRelease
        };
        self.event(t0, pass_kind, off, &passer.player_id);
        self.emit(side, quarter, &on, &guards, &pass_frame);
        self.event(t1, EventKind::PassReceive, off, &shooter.player_id);
        self.emit(side, quarter, &on, &guards, &catch_frame);

        if kind == Kind::Turnover {
            let t = t1 + self.rng.random_range(300..3_000);
            self.event(t, EventKind::Turnover, off, &shooter.player_id);
            return Ok(());
        }

        let (gap, dribble_times) = self.drive_timing(t1, kind == Kind::Late);
        let mut anchors = vec![catch_at];
        let mut pos = catch_at;
        for &t in &dribble_times {
            let a = toward_basket(pos) + self.rng.random_range(-1.0..1.0);
            pos = step(pos, a, self.rng.random_range(1.0..6.0));
            anchors.push(pos);
            let mut offense = at_catch;
            offense[1] = pos;
            let frame = Frame {
                t,
                defense: self.defend(&offense),
                offense,
                ball_holder: 1,
            };
            self.event(t, EventKind::Dribble, off, &shooter.player_id);
            self.emit(side, quarter, &on, &guards, &frame);
        }
        let release_at = step(pos, toward_basket(pos) + self.rng.random_range(-0.8..0.8), self.rng.random_range(0.0..4.0));
        anchors.push(release_at);
        let ts = t1 + gap;
        let mut offense = at_catch;
        offense[1] = release_at;
        let release_frame = Frame {
            t: ts,
            defense: self.defend(&offense),
            offense,
            ball_holder: 1,
        };
        self.event(ts, EventKind::ShotRelease, off, &shooter.player_id);
        self.emit(side, quarter, &on, &guards, &release_frame);
        let tm = ts + self.rng.random_range(500..1_300);

        if kind == Kind::Miss {
            self.event(tm, EventKind::ShotMissed, off, &shooter.player_id);
            self.stats[side][1] += 1;
            if self.rng.random_bool(0.12) {
                self.stats[1 - side][3] += 1;
            }
            let (team, who) = if self.rng.random_bool(0.75) {
                (def, guards[self.rng.random_range(0..5)])
            } else {
                (off, on[self.rng.random_range(0..5)])
            };
            let tr = tm + self.rng.random_range(200..900);
            self.event(tr, EventKind::Rebound, team, &who.player_id);
            return Ok(());
        }

        self.event(tm, EventKind::ShotMade, off, &shooter.player_id);
        self.stats[side][0] += 1;
        self.stats[side][1] += 1;

        let credited = match kind {
            Kind::Assistable => {
                let rec = self.record(side, passer, shooter, t1, ts, tm, &anchors, &pass_frame, &catch_frame, dribble_times.len())?;
                let p = sigmoid(self.fit.linear_predictor(&rec));
                let label = self.rng.random_bool(p);
                self.records.push(PotentialAssist {
                    label_recorded_assist: label,
                    ..rec
                });
                label
            }
            Kind::Inbound => self.rng.random_bool(0.6),
            Kind::Late => self.rng.random_bool(0.2),
            _ => false,
        };
        if credited {
            self.stats[side][2] += 1;
            self.labels.push(AssistLabel {
                game_id: self.game_id.clone(),
                wall_time_ms: tm,
                passer_id: passer.player_id.clone(),
            });
        }
        Ok(())
    }

    /// Offensive rebound put back without a pass.
    fn solo_play(&mut self, side: usize, quarter: u8) -> Result<()> {
        let off = self.offense(side);
        let def = self.defense(side);
        let shooter_i = self.rng.random_range(0..off.players.len());
        let on = self.lineup(off, &[shooter_i]);
        let guards = self.lineup(def, &[]);
        let spots = [
            sample_in_zone(CourtZone::Paint, &mut self.rng)?,
            loose_spot(&mut self.rng),
            loose_spot(&mut self.rng),
            loose_spot(&mut self.rng),
            loose_spot(&mut self.rng),
        ];
        let t0 = self.start_time(quarter);
        let frame = Frame {
            t: t0,
            defense: self.defend(&spots),
            offense: spots,
            ball_holder: 0,
        };
        self.event(t0, EventKind::Rebound, off, &on[0].player_id);
        self.emit(side, quarter, &on, &guards, &frame);
        let ts = t0 + self.rng.random_range(400..2_500);
        let release = Frame {
            t: ts,
            defense: self.defend(&spots),
            offense: spots,
            ball_holder: 0,
        };
        self.event(ts, EventKind::ShotRelease, off, &on[0].player_id);
        self.emit(side, quarter, &on, &guards, &release);
        let tm = ts + self.rng.random_range(400..900);
        self.event(tm, EventKind::ShotMade, off, &on[0].player_id);
        self.stats[side][0] += 1;
        self.stats[side][1] += 1;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        side: usize,
        passer: &TruthPlayer,
        shooter: &TruthPlayer,
        t1: i64,
        ts: i64,
        tm: i64,
        anchors: &[CourtPoint],
        pass_frame: &Frame,
        catch_frame: &Frame,
        dribbles: usize,
    ) -> Result<PotentialAssist> {
        let nearest = |p: CourtPoint, d: &[CourtPoint; 5]| d.iter().map(|x| distance(p, *x)).fold(f64::INFINITY, f64::min);
        let pass_from = pass_frame.offense[0];
        let catch_at = catch_frame.offense[1];
        let rec = PotentialAssist {
            game_id: self.game_id.clone(),
            made_wall_time: tm,
            passer: passer.player_id.clone(),
            shooter: shooter.player_id.clone(),
            team: self.offense(side).team_id.clone(),
            opponent: self.defense(side).team_id.clone(),
            is_home: side == 0,
            scorekeeper: self.home.team_id.clone(),
            passer_position: passer.position,
            c1_possession_time: crate::features::possession_time(t1, ts)?,
            c2_dribbles: dribbles as u32,
            c3_travel_distance: crate::features::travel_distance(anchors),
            c4_pass_distance: distance(pass_from, catch_at),
            c5_passer_defender_dist: nearest(pass_from, &pass_frame.defense),
            c6_shooter_defender_dist: nearest(catch_at, &catch_frame.defense),
            c7_passer_zone: zone_of(pass_from)?,
            c8_shooter_zone: zone_of(catch_at)?,
            label_recorded_assist: false,
        };
        rec.validate()
            .map_err(|e| Error::Generation(format!("scripted possession invalid: {e}")))?;
        Ok(rec)
    }
}

// ---------------------------------------------------------------------------
// Worked play
// ---------------------------------------------------------------------------

/// Files describing the single-possession worked example: a guard in the
/// paint passes to a forward in the long-two area who drives two dribbles
/// and scores.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkedPlay {
    pub moments: Vec<crate::types::Moment>,
    pub events: Vec<EventRecord>,
    pub box_lines: Vec<BoxLine>,
    pub roster: BTreeMap<PlayerId, RosterEntry>,
    pub labels: Vec<AssistLabel>,
}

impl WorkedPlay {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut out = DataWriter::create(dir)?;
        out.write_game(&self.moments, &self.events, &self.box_lines, &self.labels)?;
        out.finish(&self.roster)
    }

    pub fn bundle(&self) -> Result<GameBundle> {
        bundle_from_parts(
            self.box_lines.clone(),
            self.moments.clone(),
            self.events.clone(),
            &self.roster,
        )?
        .pop()
        .ok_or_else(|| Error::Generation("worked play did not assemble".into()))
    }
}

fn lerp(a: CourtPoint, b: CourtPoint, s: f64) -> CourtPoint {
    let r = |v: f64| (v * 100.0).round() / 100.0;
    CourtPoint::new(r(a.x + (b.x - a.x) * s), r(a.y + (b.y - a.y) * s))
}

/// Position along piecewise-linear keyframes at time `t`.
fn track(keys: &[(i64, CourtPoint)], t: i64) -> CourtPoint {
    if let Some(&(_, p)) = keys.iter().find(|(kt, _)| *kt == t) {
        return p;
    }
    if t <= keys[0].0 {
        return keys[0].1;
    }
    for w in keys.windows(2) {
        let ((ta, a), (tb, b)) = (w[0], w[1]);
        if t > ta && t < tb {
            return lerp(a, b, (t - ta) as f64 / (tb - ta) as f64);
        }
    }
    keys[keys.len() - 1].1
}

pub fn worked_play_fixture() -> WorkedPlay {
    let game = GameId::new("0021400526").expect("id");
    let lac = TeamId::new("LAC").expect("id");
    let lal = TeamId::new("LAL").expect("id");
    let players: [(&str, &str, &TeamId, Position); 10] = [
        ("cpaul", "Chris Paul", &lac, Position::PointGuard),
        ("bgriffin", "Blake Griffin", &lac, Position::PowerForward),
        ("jredick", "J.J. Redick", &lac, Position::ShootingGuard),
        ("mbarnes", "Matt Barnes", &lac, Position::SmallForward),
        ("djordan", "DeAndre Jordan", &lac, Position::Center),
        ("jlin", "Jeremy Lin", &lal, Position::PointGuard),
        ("cboozer", "Carlos Boozer", &lal, Position::PowerForward),
        ("kbryant", "Kobe Bryant", &lal, Position::ShootingGuard),
        ("wjohnson", "Wesley Johnson", &lal, Position::SmallForward),
        ("jhill", "Jordan Hill", &lal, Position::Center),
    ];
    let ids: Vec<PlayerId> = players.iter().map(|p| PlayerId::new(p.0).expect("id")).collect();
    let roster: BTreeMap<PlayerId, RosterEntry> = players
        .iter()
        .zip(&ids)
        .map(|(p, id)| {
            (
                id.clone(),
                RosterEntry {
                    player_id: id.clone(),
                    name: p.1.to_string(),
                    team_id: p.2.clone(),
                    position: p.3,
                },
            )
        })
        .collect();

    let t_pass = 120_000;
    let t_catch = t_pass + 400;
    let t_d1 = t_catch + 600;
    let t_d2 = t_catch + 1_200;
    let t_shot = t_catch + 1_820;
    let t_made = t_shot + 900;
    let p = CourtPoint::new;

    // passer, shooter, three teammates
    let passer_at = p(14.0, 22.0);
    let catch_at = p(14.0, 10.91);
    let shooter_keys = [
        (t_pass - 400, p(20.0, 6.0)),
        (t_pass, p(16.0, 8.5)),
        (t_catch, catch_at),
        (t_d1, p(14.0, 17.91)),
        (t_d2, p(10.0, 23.91)),
        (t_shot, p(3.801, 23.91)),
    ];
    let teammates = [p(24.0, 40.0), p(30.0, 25.0), p(4.0, 45.0)];
    // defenders: at the pass the nearest to the passer is 3.58 ft away; by the
    // catch they have rotated and the nearest to the shooter is 13.63 ft away
    let defense_at_pass = [p(17.58, 22.0), p(5.25, 27.0), p(20.0, 32.0), p(25.0, 20.0), p(8.0, 38.0)];
    let defense_at_catch = [p(14.0, 24.54), p(5.25, 27.0), p(20.0, 32.0), p(25.0, 20.0), p(8.0, 38.0)];

    let mut times: Vec<i64> = (0..)
        .map(|k| t_pass - 400 + 40 * k)
        .take_while(|t| *t <= t_made)
        .collect();
    times.push(t_shot);
    times.sort_unstable();
    times.dedup();

    let moments = times
        .iter()
        .map(|&t| {
            let shooter = track(&shooter_keys, t);
            let mut entities = Vec::with_capacity(11);
            let mut put = |i: usize, team: &TeamId, pt: CourtPoint| {
                entities.push(Entity {
                    kind: EntityKind::Player,
                    team: Some(team.clone()),
                    player: Some(ids[i].clone()),
                    point: pt,
                });
            };
            put(0, &lac, passer_at);
            put(1, &lac, shooter);
            for (k, tm) in teammates.iter().enumerate() {
                put(2 + k, &lac, *tm);
            }
            for k in 0..5 {
                let d = track(&[(t_pass, defense_at_pass[k]), (t_catch, defense_at_catch[k])], t);
                put(5 + k, &lal, d);
            }
            let ball = if t <= t_pass {
                passer_at.with_height(4.0)
            } else if t < t_catch {
                track(&[(t_pass, passer_at), (t_catch, catch_at)], t).with_height(6.0)
            } else if t <= t_shot {
                shooter.with_height(4.0)
            } else {
                track(&[(t_shot, p(3.801, 23.91)), (t_made, p(5.25, 25.0))], t).with_height(10.0)
            };
            entities.push(Entity {
                kind: EntityKind::Ball,
                team: None,
                player: None,
                point: ball,
            });
            Moment {
                game_id: game.clone(),
                quarter: 1,
                game_clock: (720_000 - t) as f64 / 1000.0,
                wall_time: t,
                entities,
            }
        })
        .collect();

    let ev = |t: i64, kind: EventKind, i: usize| EventRecord {
        game_id: game.clone(),
        wall_time: t,
        kind,
        team: lac.clone(),
        player: ids[i].clone(),
    };
    let events = vec![
        ev(t_pass, EventKind::PassRelease, 0),
        ev(t_catch, EventKind::PassReceive, 1),
        ev(t_d1, EventKind::Dribble, 1),
        ev(t_d2, EventKind::Dribble, 1),
        ev(t_shot, EventKind::ShotRelease, 1),
        ev(t_made, EventKind::ShotMade, 1),
    ];
    let line = |team: &TeamId, opp: &TeamId, home: bool, made: u32| BoxLine {
        game_id: game.clone(),
        date: "2015-01-07".into(),
        team_id: team.clone(),
        opp_id: opp.clone(),
        is_home: home,
        fgm: made,
        fga: made,
        ast: made,
        blk: 0,
    };
    WorkedPlay {
        moments,
        events,
        box_lines: vec![line(&lac, &lal, true, 1), line(&lal, &lac, false, 0)],
        roster,
        labels: vec![AssistLabel {
            game_id: game.clone(),
            wall_time_ms: t_made,
            passer_id: ids[0].clone(),
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_centering_removes_margins() {
        let v: Vec<f64> = (0..36).map(|k| (k as f64 * 0.37).sin()).collect();
        let d = double_center(&v);
        for i in 0..6 {
            assert!(d[i * 6..i * 6 + 6].iter().sum::<f64>().abs() < 1e-12);
            assert!((0..6).map(|r| d[r * 6 + i]).sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn plant_keeps_group_centered() {
        let mut t = GroundTruth::sample(&TruthConfig::default(), 1).unwrap();
        t.plant(groups::SK_BIAS, "UTA", -0.8).unwrap();
        let g = &t.coefficients[groups::SK_BIAS];
        assert_eq!(g["UTA"], -0.8);
        assert!(g.values().sum::<f64>().abs() < 1e-12);
        assert!(t.plant(groups::SK_BIAS, "XXX", 1.0).is_err());
    }

    #[test]
    fn sampled_groups_are_centered() {
        let t = GroundTruth::sample(&TruthConfig::default(), 2).unwrap();
        for (name, g) in &t.coefficients {
            if g.len() > 1 {
                assert!(g.values().sum::<f64>().abs() < 1e-10, "{name}");
            }
        }
        assert_eq!(t.coefficients[groups::PASSER].len(), 360);
    }

    #[test]
    fn truth_recovers_itself() {
        let t = GroundTruth::sample(&TruthConfig::default(), 3).unwrap();
        for row in recovery_report(&t, &t.as_fit()) {
            assert!(row.rmse < 1e-12, "{}", row.group);
            if row.levels > 1 {
                assert!((row.correlation.unwrap() - 1.0).abs() < 1e-12, "{}", row.group);
            }
        }
    }

    #[test]
    fn zone_sampler_hits_every_zone() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for z in CourtZone::ALL {
            for _ in 0..50 {
                let p = sample_in_zone(z, &mut rng).unwrap();
                assert_eq!(zone_of(p).unwrap(), z);
                assert_eq!(p.reflected().reflected(), p);
            }
        }
    }

    #[test]
    fn schedule_is_a_double_round_robin() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = build_schedule(4, 12, &mut rng);
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 12);
        assert!(s.iter().all(|(h, a)| h != a));
    }

    #[test]
    fn worked_play_geometry() {
        let w = worked_play_fixture();
        assert_eq!(w.events.len(), 6);
        assert!(w.moments.iter().all(|m| m.is_complete()));
        assert!(w.moments.windows(2).all(|p| p[0].wall_time < p[1].wall_time));
    }

    fn extracted(g: &SynthGame, gen: &SeasonGenerator) -> Vec<PotentialAssist> {
        let labels: crate::ingest::LabelSet = g.labels.iter().cloned().collect();
        crate::features::extract_potential_assists(&g.bundle(gen.roster()).unwrap(), &labels).records
    }

    #[test]
    fn extraction_reproduces_scripted_records() {
        let truth = GroundTruth::sample(&TruthConfig::default(), 6).unwrap();
        let gen = SeasonGenerator::new(truth, 6, 9).unwrap();
        for i in 0..gen.n_games() {
            let g = gen.game(i).unwrap();
            let got = extracted(&g, &gen);
            assert_eq!(got.len(), g.truth_records.len());
            for (a, b) in got.iter().zip(&g.truth_records) {
                assert_eq!(a.made_wall_time, b.made_wall_time);
                assert_eq!(a.passer, b.passer);
                assert_eq!(a.label_recorded_assist, b.label_recorded_assist);
                assert_eq!(a.c2_dribbles, b.c2_dribbles);
                assert_eq!((a.c7_passer_zone, a.c8_shooter_zone), (b.c7_passer_zone, b.c8_shooter_zone));
                for (x, y) in a.continuous().iter().zip(b.continuous()) {
                    assert!((x - y).abs() < 1e-9, "{x} vs {y}");
                }
            }
            let ast: u32 = g.box_lines.iter().map(|b| b.ast).sum();
            assert!(ast as usize >= got.iter().filter(|r| r.label_recorded_assist).count());
        }
    }

    #[test]
    fn games_are_deterministic_and_independent_of_order() {
        let truth = GroundTruth::sample(&TruthConfig::default(), 7).unwrap();
        let gen = SeasonGenerator::new(truth.clone(), 4, 1).unwrap();
        let all = gen.generate().unwrap();
        assert_eq!(all[3], gen.game(3).unwrap());
        assert_eq!(all, generate_season(&truth, 4, 1).unwrap());
        assert_ne!(all[0], SeasonGenerator::new(truth, 4, 2).unwrap().game(0).unwrap());
    }

    #[test]
    fn default_truth_label_rate_near_two_thirds() {
        let truth = GroundTruth::sample(&TruthConfig::default(), 8).unwrap();
        let games = generate_season(&truth, 40, 3).unwrap();
        let recs: Vec<&PotentialAssist> = games.iter().flat_map(|g| &g.truth_records).collect();
        let rate = recs.iter().filter(|r| r.label_recorded_assist).count() as f64 / recs.len() as f64;
        assert!((0.55..0.75).contains(&rate), "{rate}");
    }

    fn label_rate(intercept: f64) -> (f64, usize) {
        let mut truth = GroundTruth::sample(&TruthConfig::default(), 10).unwrap();
        let names: Vec<String> = truth.coefficients.keys().cloned().collect();
        for g in &names {
            truth.scale_group(g, 0.0).unwrap();
        }
        truth.set_scalar(groups::INTERCEPT, intercept).unwrap();
        let games = generate_season(&truth, 600, 11).unwrap();
        let recs: Vec<&PotentialAssist> = games.iter().flat_map(|g| &g.truth_records).collect();
        let hits = recs.iter().filter(|r| r.label_recorded_assist).count();
        (hits as f64 / recs.len() as f64, recs.len())
    }

    #[test]
    fn zero_truth_labels_are_fair_coins() {
        let (rate, n) = label_rate(0.0);
        assert!(n >= 10_000, "{n}");
        assert!((rate - 0.5).abs() < 0.01, "{rate}");
    }

    #[test]
    fn intercept_only_truth_hits_the_base_rate() {
        let p = 0.6559f64;
        let (rate, n) = label_rate((p / (1.0 - p)).ln());
        assert!(n >= 10_000, "{n}");
        assert!((rate - p).abs() < 0.01, "{rate}");
    }
}
