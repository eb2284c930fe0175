//! Potential-assist detection and the spatio-temporal covariates C(1)-C(9).

use crate::court::{distance, zone_of, CourtPoint};
use crate::error::{Error, Result};
use crate::ingest::{AssistLabel, GameBundle, LabelSet};
use crate::types::{EventKind, EventRecord, PlayerId, PotentialAssist, TeamId};

/// Longest reception-to-release gap for a potential assist, inclusive.
pub const MAX_POSSESSION_MS: i64 = 7_000;

/// Why a candidate pass was dropped during extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipDiagnostic {
    pub game_id: String,
    pub wall_time: i64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub records: Vec<PotentialAssist>,
    pub skipped: Vec<SkipDiagnostic>,
}

/// C(1): seconds between reception and shot release, both in milliseconds.
pub fn possession_time(reception_ms: i64, shot_release_ms: i64) -> Result<f64> {
    let gap = shot_release_ms - reception_ms;
    if gap <= 0 {
        return Err(Error::invalid(format!(
            "shot release at {shot_release_ms} ms does not follow reception at {reception_ms} ms"
        )));
    }
    Ok(gap as f64 / 1000.0)
}

/// C(2): dribbles by `shooter` strictly between reception and release.
pub fn dribble_count(
    events: &[EventRecord],
    shooter: &PlayerId,
    reception_ms: i64,
    release_ms: i64,
) -> u32 {
    events
        .iter()
        .filter(|e| {
            e.kind == EventKind::Dribble
                && &e.player == shooter
                && e.wall_time >= reception_ms
                && e.wall_time <= release_ms
        })
        .count() as u32
}

/// C(3): summed distance between consecutive anchor positions (reception,
/// each dribble, release).
pub fn travel_distance(anchors: &[CourtPoint]) -> f64 {
    anchors.windows(2).map(|w| distance(w[0], w[1])).sum()
}

/// C(4): passer location at release to shooter location at reception.
pub fn pass_distance(release_point: CourtPoint, reception_point: CourtPoint) -> f64 {
    distance(release_point, reception_point)
}

/// C(5)/C(6): minimum distance from `target` to the five opposing players in
/// the moment nearest to `t`.
pub fn nearest_defender_distance(
    bundle: &GameBundle,
    target: &PlayerId,
    target_team: &TeamId,
    t: i64,
) -> Result<f64> {
    let moment = bundle
        .moment_near(t)
        .ok_or_else(|| Error::Validation(format!("no moment within tolerance of {t} ms")))?;
    let at = moment
        .player_point(target)
        .ok_or_else(|| Error::Validation(format!("player {target} absent from moment at {t} ms")))?;
    let opponent = bundle
        .opponent_of(target_team)
        .ok_or_else(|| Error::Validation(format!("team {target_team} not in game")))?;
    let defenders: Vec<CourtPoint> = moment.players_of(opponent).map(|e| e.point).collect();
    if defenders.len() != 5 {
        return Err(Error::Validation(format!(
            "moment at {t} ms has {} opposing players, expected 5",
            defenders.len()
        )));
    }
    Ok(defenders
        .into_iter()
        .map(|d| distance(at, d))
        .fold(f64::INFINITY, f64::min))
}

fn anchor(bundle: &GameBundle, player: &PlayerId, t: i64) -> Result<CourtPoint> {
    bundle
        .moment_near(t)
        .and_then(|m| m.player_point(player))
        .ok_or_else(|| Error::Validation(format!("no anchor moment for {player} near {t} ms")))
}

/// Kinds that end a shooter's possession before the shot.
fn breaks_possession(kind: EventKind) -> bool {
    matches!(
        kind,
        EventKind::Rebound
            | EventKind::Turnover
            | EventKind::PassRelease
            | EventKind::PassReceive
            | EventKind::InboundPass
    )
}

struct Candidate<'a> {
    release: &'a EventRecord,
    reception: &'a EventRecord,
}

/// Find every potential assist in a game and label it from `labels`.
///
/// A record needs a completed in-play pass between teammates, followed by a
/// shot release and make by the receiver within seven seconds of the catch,
/// with no rebound, turnover or other pass by the shooter's team in between.
pub fn extract_potential_assists(bundle: &GameBundle, labels: &LabelSet) -> Extraction {
    let mut out = Extraction::default();
    let events = &bundle.events;
    for (i, reception) in events.iter().enumerate() {
        if reception.kind != EventKind::PassReceive {
            continue;
        }
        // The throw must be the latest pass event before the catch, and an in-play pass.
        let Some(release) = events[..i]
            .iter()
            .rev()
            .find(|e| matches!(e.kind, EventKind::PassRelease | EventKind::InboundPass))
        else {
            continue;
        };
        if release.kind != EventKind::PassRelease
            || release.team != reception.team
            || release.player == reception.player
        {
            continue;
        }
        let Some((shot_idx, shot)) = find_shot(events, i, reception) else {
            continue;
        };
        if shot.wall_time - reception.wall_time > MAX_POSSESSION_MS {
            continue;
        }
        let Some(made) = shot_outcome(events, shot_idx, &reception.player) else {
            continue;
        };
        let cand = Candidate { release, reception };
        match build_record(bundle, &cand, shot, made, labels) {
            Ok(rec) => out.records.push(rec),
            Err(e) => {
                log::debug!("skipping candidate at {} ms: {e}", reception.wall_time);
                out.skipped.push(SkipDiagnostic {
                    game_id: bundle.game_id.to_string(),
                    wall_time: reception.wall_time,
                    reason: e.to_string(),
                })
            }
        }
    }
    out
}

/// Shooter's shot release following `reception` with nothing breaking the possession.
fn find_shot<'a>(
    events: &'a [EventRecord],
    reception_idx: usize,
    reception: &EventRecord,
) -> Option<(usize, &'a EventRecord)> {
    for (j, e) in events.iter().enumerate().skip(reception_idx + 1) {
        if e.kind == EventKind::ShotRelease && e.player == reception.player {
            return Some((j, e));
        }
        if e.team == reception.team && breaks_possession(e.kind) {
            return None;
        }
        if e.kind == EventKind::ShotRelease {
            // someone else shot first
            return None;
        }
    }
    None
}

/// Wall time of the make if the shot at `shot_idx` went in.
fn shot_outcome(events: &[EventRecord], shot_idx: usize, shooter: &PlayerId) -> Option<i64> {
    events[shot_idx + 1..]
        .iter()
        .find(|e| {
            matches!(e.kind, EventKind::ShotMade | EventKind::ShotMissed) && &e.player == shooter
        })
        .filter(|e| e.kind == EventKind::ShotMade)
        .map(|e| e.wall_time)
}

fn build_record(
    bundle: &GameBundle,
    cand: &Candidate<'_>,
    shot: &EventRecord,
    made_at: i64,
    labels: &LabelSet,
) -> Result<PotentialAssist> {
    let shooter = &cand.reception.player;
    let passer = &cand.release.player;
    let team = &cand.reception.team;
    let opponent = bundle
        .opponent_of(team)
        .ok_or_else(|| Error::Validation(format!("team {team} not in game")))?
        .clone();
    let c1 = possession_time(cand.reception.wall_time, shot.wall_time)?;
    let mut anchors = vec![anchor(bundle, shooter, cand.reception.wall_time)?];
    let mut dribbles = 0u32;
    for e in bundle.events.iter().filter(|e| {
        e.kind == EventKind::Dribble
            && &e.player == shooter
            && e.wall_time >= cand.reception.wall_time
            && e.wall_time <= shot.wall_time
    }) {
        anchors.push(anchor(bundle, shooter, e.wall_time)?);
        dribbles += 1;
    }
    anchors.push(anchor(bundle, shooter, shot.wall_time)?);
    let passer_at_release = anchor(bundle, passer, cand.release.wall_time)?;
    let reception_point = anchors[0];
    let passer_position = bundle
        .roster
        .get(passer)
        .map(|r| r.position)
        .ok_or_else(|| Error::Validation(format!("passer {passer} not in roster")))?;
    let label = labels.contains(&AssistLabel {
        game_id: bundle.game_id.clone(),
        wall_time_ms: made_at,
        passer_id: passer.clone(),
    });
    let rec = PotentialAssist {
        game_id: bundle.game_id.clone(),
        made_wall_time: made_at,
        passer: passer.clone(),
        shooter: shooter.clone(),
        team: team.clone(),
        is_home: *team == bundle.home,
        opponent,
        scorekeeper: bundle.home.clone(),
        passer_position,
        c1_possession_time: c1,
        c2_dribbles: dribbles,
        c3_travel_distance: travel_distance(&anchors),
        c4_pass_distance: pass_distance(passer_at_release, reception_point),
        c5_passer_defender_dist: nearest_defender_distance(
            bundle,
            passer,
            team,
            cand.release.wall_time,
        )?,
        c6_shooter_defender_dist: nearest_defender_distance(
            bundle,
            shooter,
            team,
            cand.reception.wall_time,
        )?,
        c7_passer_zone: zone_of(passer_at_release)?,
        c8_shooter_zone: zone_of(reception_point)?,
        label_recorded_assist: label,
    };
    rec.validate()?;
    Ok(rec)
}

/// Raw 25 Hz polyline length of `player` between two times, for comparison
/// with the anchored travel distance.
pub fn polyline_length(bundle: &GameBundle, player: &PlayerId, from_ms: i64, to_ms: i64) -> f64 {
    let pts: Vec<CourtPoint> = bundle
        .moments
        .iter()
        .filter(|m| m.wall_time >= from_ms && m.wall_time <= to_ms)
        .filter_map(|m| m.player_point(player))
        .collect();
    travel_distance(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn possession_time_examples() {
        assert!((possession_time(1000, 2820).unwrap() - 1.82).abs() < 1e-12);
        assert!(possession_time(500, 500).is_err());
        assert!(possession_time(600, 500).is_err());
        assert_eq!(possession_time(0, 7000).unwrap(), 7.0);
    }

    #[test]
    fn travel_distance_examples() {
        let pts = [
            CourtPoint::new(0.0, 0.0),
            CourtPoint::new(3.0, 4.0),
            CourtPoint::new(6.0, 8.0),
        ];
        assert_eq!(travel_distance(&pts), 10.0);
        let p = CourtPoint::new(20.0, 20.0);
        assert_eq!(travel_distance(&[p, p]), 0.0);
    }

    #[test]
    fn pass_distance_examples() {
        let p = CourtPoint::new(3.0, 3.0);
        assert_eq!(pass_distance(p, p), 0.0);
        let d = pass_distance(CourtPoint::new(0.0, 25.0), CourtPoint::new(18.21, 25.0));
        assert!((d - 18.21).abs() < 1e-12);
    }
}
