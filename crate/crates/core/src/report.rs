//! CSV and JSON files exchanged between pipeline stages.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::court::CourtZone;
use crate::effects::{AdjustedAssists, BonusDistribution, BonusSample, StabilityRow, ADJUSTMENT_EFFECTS};
use crate::error::{Error, Result};
use crate::regress::design::zone_pair_name;
use crate::types::{GameId, PlayerId, Position, PotentialAssist, TeamId};

pub const POTENTIAL_ASSISTS_FILE: &str = "potential_assists.csv";
pub const ADJUSTED_ASSISTS_FILE: &str = "adjusted_assists.csv";
pub const BONUS_SAMPLES_FILE: &str = "bonus_samples.csv";
pub const STABILITY_FILE: &str = "stability.csv";

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&s)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct PotentialAssistRow {
    game_id: GameId,
    made_wall_time_ms: i64,
    passer_id: PlayerId,
    shooter_id: PlayerId,
    team_id: TeamId,
    opp_id: TeamId,
    is_home: bool,
    scorekeeper: TeamId,
    passer_position: Position,
    c1_possession_time: f64,
    c2_dribbles: u32,
    c3_travel_distance: f64,
    c4_pass_distance: f64,
    c5_passer_defender_dist: f64,
    c6_shooter_defender_dist: f64,
    c7_passer_zone: CourtZone,
    c8_shooter_zone: CourtZone,
    c9_zone_pair: String,
    label_recorded_assist: u8,
}

impl From<&PotentialAssist> for PotentialAssistRow {
    fn from(p: &PotentialAssist) -> Self {
        Self {
            game_id: p.game_id.clone(),
            made_wall_time_ms: p.made_wall_time,
            passer_id: p.passer.clone(),
            shooter_id: p.shooter.clone(),
            team_id: p.team.clone(),
            opp_id: p.opponent.clone(),
            is_home: p.is_home,
            scorekeeper: p.scorekeeper.clone(),
            passer_position: p.passer_position,
            c1_possession_time: p.c1_possession_time,
            c2_dribbles: p.c2_dribbles,
            c3_travel_distance: p.c3_travel_distance,
            c4_pass_distance: p.c4_pass_distance,
            c5_passer_defender_dist: p.c5_passer_defender_dist,
            c6_shooter_defender_dist: p.c6_shooter_defender_dist,
            c7_passer_zone: p.c7_passer_zone,
            c8_shooter_zone: p.c8_shooter_zone,
            c9_zone_pair: zone_pair_name(p.c7_passer_zone, p.c8_shooter_zone).to_string(),
            label_recorded_assist: u8::from(p.label_recorded_assist),
        }
    }
}

impl TryFrom<PotentialAssistRow> for PotentialAssist {
    type Error = Error;

    fn try_from(r: PotentialAssistRow) -> Result<Self> {
        if r.c9_zone_pair != zone_pair_name(r.c7_passer_zone, r.c8_shooter_zone) {
            return Err(Error::Validation(format!(
                "zone pair {} does not match zones {} and {}",
                r.c9_zone_pair, r.c7_passer_zone, r.c8_shooter_zone
            )));
        }
        let label = match r.label_recorded_assist {
            0 => false,
            1 => true,
            v => return Err(Error::Validation(format!("label must be 0 or 1, got {v}"))),
        };
        let pa = PotentialAssist {
            game_id: r.game_id,
            made_wall_time: r.made_wall_time_ms,
            passer: r.passer_id,
            shooter: r.shooter_id,
            team: r.team_id,
            opponent: r.opp_id,
            is_home: r.is_home,
            scorekeeper: r.scorekeeper,
            passer_position: r.passer_position,
            c1_possession_time: r.c1_possession_time,
            c2_dribbles: r.c2_dribbles,
            c3_travel_distance: r.c3_travel_distance,
            c4_pass_distance: r.c4_pass_distance,
            c5_passer_defender_dist: r.c5_passer_defender_dist,
            c6_shooter_defender_dist: r.c6_shooter_defender_dist,
            c7_passer_zone: r.c7_passer_zone,
            c8_shooter_zone: r.c8_shooter_zone,
            label_recorded_assist: label,
        };
        pa.validate()?;
        Ok(pa)
    }
}

/// Write potential assists, one column per field plus the derived zone pair.
pub fn write_potential_assists<W: Write>(out: W, pas: &[PotentialAssist]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for pa in pas {
        w.serialize(PotentialAssistRow::from(pa))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Potential assists with the header written even when empty.
pub fn save_potential_assists(path: &Path, pas: &[PotentialAssist]) -> Result<()> {
    let file = create(path)?;
    if pas.is_empty() {
        let mut w = csv::Writer::from_writer(file);
        w.write_record(POTENTIAL_ASSIST_COLUMNS)?;
        w.flush().map_err(|e| Error::io(path, e))?;
        return Ok(());
    }
    write_potential_assists(file, pas)
}

const POTENTIAL_ASSIST_COLUMNS: [&str; 19] = [
    "game_id",
    "made_wall_time_ms",
    "passer_id",
    "shooter_id",
    "team_id",
    "opp_id",
    "is_home",
    "scorekeeper",
    "passer_position",
    "c1_possession_time",
    "c2_dribbles",
    "c3_travel_distance",
    "c4_pass_distance",
    "c5_passer_defender_dist",
    "c6_shooter_defender_dist",
    "c7_passer_zone",
    "c8_shooter_zone",
    "c9_zone_pair",
    "label_recorded_assist",
];

pub fn parse_potential_assists<R: Read>(path: &Path, input: R) -> Result<Vec<PotentialAssist>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in rdr.deserialize::<PotentialAssistRow>() {
        let row = rec.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = out.len() as u64 + 2;
        out.push(PotentialAssist::try_from(row).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn read_potential_assists(path: &Path) -> Result<Vec<PotentialAssist>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_potential_assists(path, f)
}

pub fn write_adjusted_assists<W: Write>(out: W, rows: &[AdjustedAssists]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "player_id",
        "potential_assists",
        "recorded",
        "adjusted",
        "change",
        "original_rank",
        "adjusted_rank",
    ];
    header.extend(ADJUSTMENT_EFFECTS);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.player_id.clone(),
            r.potential_assists.to_string(),
            r.recorded.to_string(),
            r.adjusted.to_string(),
            r.change.to_string(),
            r.original_rank.to_string(),
            r.adjusted_rank.to_string(),
        ];
        rec.extend(
            ADJUSTMENT_EFFECTS
                .iter()
                .map(|k| r.contributions.get(*k).copied().unwrap_or(0.0).to_string()),
        );
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn write_serialized<W: Write, T: Serialize>(out: W, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_bonus_samples<W: Write>(out: W, samples: &[BonusSample]) -> Result<()> {
    write_serialized(
        out,
        &["game_id", "team", "scorekeeper", "side", "recorded", "expected", "bonus"],
        samples,
    )
}

pub fn write_bonus_distributions<W: Write>(out: W, dists: &[BonusDistribution]) -> Result<()> {
    write_serialized(
        out,
        &["scorekeeper", "side", "n", "mean", "variance", "mean_abs"],
        dists,
    )
}

/// Stability rows; `fit_a`/`fit_b` index the input fits and an undefined
/// correlation is an empty cell.
pub fn write_stability<W: Write>(out: W, rows: &[StabilityRow]) -> Result<()> {
    write_serialized(
        out,
        &["group", "fit_a", "fit_b", "shared_levels", "correlation"],
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::Side;

    fn sample_pa() -> PotentialAssist {
        PotentialAssist {
            game_id: GameId::new("g1").unwrap(),
            made_wall_time: 12_345,
            passer: PlayerId::new("p1").unwrap(),
            shooter: PlayerId::new("p2").unwrap(),
            team: TeamId::new("LAC").unwrap(),
            opponent: TeamId::new("LAL").unwrap(),
            is_home: true,
            scorekeeper: TeamId::new("LAC").unwrap(),
            passer_position: Position::PointGuard,
            c1_possession_time: 1.82,
            c2_dribbles: 2,
            c3_travel_distance: 20.409_999_999_999_1,
            c4_pass_distance: 0.1 + 0.2,
            c5_passer_defender_dist: 3.58,
            c6_shooter_defender_dist: 13.63,
            c7_passer_zone: CourtZone::Paint,
            c8_shooter_zone: CourtZone::Long2,
            label_recorded_assist: true,
        }
    }

    #[test]
    fn potential_assists_round_trip_exactly() {
        let mut b = sample_pa();
        b.label_recorded_assist = false;
        b.is_home = false;
        b.c7_passer_zone = CourtZone::Heave;
        let pas = vec![sample_pa(), b];
        let mut buf = Vec::new();
        write_potential_assists(&mut buf, &pas).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("game_id,made_wall_time_ms,passer_id"));
        assert!(text.contains("Paint,Long2,Paint>Long2,1"));
        let back = parse_potential_assists(Path::new("x.csv"), buf.as_slice()).unwrap();
        assert_eq!(back, pas);
    }

    #[test]
    fn inconsistent_zone_pair_is_rejected() {
        let mut buf = Vec::new();
        write_potential_assists(&mut buf, &[sample_pa()]).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("Paint>Long2", "Dunk>Dunk");
        match parse_potential_assists(Path::new("x.csv"), text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bonus_and_stability_csv_shape() {
        let mut buf = Vec::new();
        write_bonus_samples(
            &mut buf,
            &[BonusSample {
                game_id: "g".into(),
                team: "A".into(),
                scorekeeper: "A".into(),
                side: Side::Home,
                recorded: 25,
                expected: 22.5,
                bonus: 2.5,
            }],
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "game_id,team,scorekeeper,side,recorded,expected,bonus\ng,A,A,home,25,22.5,2.5\n"
        );
        let mut buf = Vec::new();
        write_stability(
            &mut buf,
            &[StabilityRow {
                group: "team".into(),
                fit_a: 0,
                fit_b: 1,
                shared_levels: 30,
                correlation: None,
            }],
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "group,fit_a,fit_b,shared_levels,correlation\nteam,0,1,30,\n"
        );
    }
}
