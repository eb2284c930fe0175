//! Loading and validating games from the canonical CSV schemas.
//!
//! ```text
//! moments.csv  game_id,quarter,wall_time_ms,game_clock_s,entity,team_id,player_id,x_ft,y_ft,z_ft
//! events.csv   game_id,wall_time_ms,kind,team_id,player_id
//! box.csv      game_id,date,team_id,opp_id,is_home,fgm,fga,ast,blk
//! roster.csv   player_id,name,team_id,position
//! assists.csv  game_id,wall_time_ms,passer_id
//! ```
//!
//! Coordinates are normalized on load so that every possession attacks the
//! basket at `(5.25, 25)`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::court::{CourtPoint, COURT_LENGTH, COURT_WIDTH};
use crate::error::{Error, Result};
use crate::types::{
    Entity, EntityKind, EventKind, EventRecord, GameId, Moment, PlayerId, Position, RatioKind,
    TeamGameRatio, TeamId,
};

pub const MOMENTS_FILE: &str = "moments.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const BOX_FILE: &str = "box.csv";
pub const ROSTER_FILE: &str = "roster.csv";
pub const ASSISTS_FILE: &str = "assists.csv";

/// Tracking coordinates may sit slightly out of bounds; anything beyond this
/// margin is a parse error.
pub const BOUNDS_MARGIN_FT: f64 = 5.0;
/// Largest tolerated share of moments without a ball entity.
pub const MAX_MISSING_BALL_SHARE: f64 = 0.01;
/// Events and moments are asynchronous; an event is matched to the nearest
/// moment within this many milliseconds (two frames at 25 Hz).
pub const ANCHOR_TOLERANCE_MS: i64 = 80;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxLine {
    pub game_id: GameId,
    pub date: String,
    pub team_id: TeamId,
    pub opp_id: TeamId,
    pub is_home: bool,
    pub fgm: u32,
    pub fga: u32,
    pub ast: u32,
    pub blk: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub player_id: PlayerId,
    pub name: String,
    pub team_id: TeamId,
    pub position: Position,
}

/// Scorekeeper decision: the made shot at `wall_time_ms` was credited to `passer_id`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AssistLabel {
    pub game_id: GameId,
    pub wall_time_ms: i64,
    pub passer_id: PlayerId,
}

pub type LabelSet = HashSet<AssistLabel>;

/// One validated, normalized game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameBundle {
    pub game_id: GameId,
    pub date: String,
    pub home: TeamId,
    pub away: TeamId,
    pub moments: Vec<Moment>,
    pub events: Vec<EventRecord>,
    /// Home line first.
    pub box_lines: [BoxLine; 2],
    pub roster: BTreeMap<PlayerId, RosterEntry>,
}

impl GameBundle {
    pub fn box_line(&self, team: &TeamId) -> Option<&BoxLine> {
        self.box_lines.iter().find(|b| &b.team_id == team)
    }

    pub fn opponent_of(&self, team: &TeamId) -> Option<&TeamId> {
        if team == &self.home {
            Some(&self.away)
        } else if team == &self.away {
            Some(&self.home)
        } else {
            None
        }
    }

    /// Moment nearest to `t` within [`ANCHOR_TOLERANCE_MS`].
    pub fn moment_near(&self, t: i64) -> Option<&Moment> {
        moment_near(&self.moments, t, ANCHOR_TOLERANCE_MS)
    }
}

pub(crate) fn moment_near(moments: &[Moment], t: i64, tolerance: i64) -> Option<&Moment> {
    let idx = moments.partition_point(|m| m.wall_time < t);
    let after = moments.get(idx);
    let before = idx.checked_sub(1).and_then(|i| moments.get(i));
    let best = match (before, after) {
        (Some(b), Some(a)) => {
            if t - b.wall_time <= a.wall_time - t {
                b
            } else {
                a
            }
        }
        (Some(b), None) => b,
        (None, Some(a)) => a,
        (None, None) => return None,
    };
    ((best.wall_time - t).abs() <= tolerance).then_some(best)
}

// ---------------------------------------------------------------------------
// CSV rows
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct MomentRow {
    game_id: String,
    quarter: u8,
    wall_time_ms: i64,
    game_clock_s: f64,
    entity: EntityKind,
    team_id: Option<String>,
    player_id: Option<String>,
    x_ft: f64,
    y_ft: f64,
    z_ft: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EventRow {
    game_id: String,
    wall_time_ms: i64,
    kind: EventKind,
    team_id: String,
    player_id: String,
}

struct Rows<T> {
    path: PathBuf,
    rows: Vec<(u64, T)>,
}

fn read_rows<T, R>(path: &Path, reader: R) -> Result<Rows<T>>
where
    T: for<'de> Deserialize<'de>,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<T>() {
        match rec {
            Ok(row) => {
                // header is line 1
                rows.push((rows.len() as u64 + 2, row));
            }
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(Rows {
        path: path.to_path_buf(),
        rows,
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn id<T: std::str::FromStr<Err = Error>>(path: &Path, line: u64, raw: &str) -> Result<T> {
    raw.parse::<T>()
        .map_err(|e| parse_err(path, line, e.to_string()))
}

fn check_coordinate(path: &Path, line: u64, x: f64, y: f64, z: Option<f64>) -> Result<()> {
    let ok = |v: f64, hi: f64| v.is_finite() && v >= -BOUNDS_MARGIN_FT && v <= hi + BOUNDS_MARGIN_FT;
    if !ok(x, COURT_LENGTH) || !ok(y, COURT_WIDTH) || z.is_some_and(|z| !z.is_finite()) {
        return Err(parse_err(
            path,
            line,
            format!("coordinate ({x}, {y}) outside court bounds"),
        ));
    }
    Ok(())
}

fn parse_moments(rows: Rows<MomentRow>) -> Result<BTreeMap<GameId, Vec<Moment>>> {
    let path = &rows.path;
    let mut out: BTreeMap<GameId, Vec<Moment>> = BTreeMap::new();
    let mut current: Option<Moment> = None;
    for (line, row) in rows.rows {
        check_coordinate(path, line, row.x_ft, row.y_ft, row.z_ft)?;
        let game_id: GameId = id(path, line, &row.game_id)?;
        let team = row
            .team_id
            .as_deref()
            .map(|t| id::<TeamId>(path, line, t))
            .transpose()?;
        let player = row
            .player_id
            .as_deref()
            .map(|p| id::<PlayerId>(path, line, p))
            .transpose()?;
        if row.entity == EntityKind::Player && (team.is_none() || player.is_none()) {
            return Err(parse_err(path, line, "player entity without team_id/player_id"));
        }
        let mut point = CourtPoint::new(row.x_ft, row.y_ft);
        point.z = row.z_ft;
        let entity = Entity {
            kind: row.entity,
            team,
            player,
            point,
        };
        let same = current
            .as_ref()
            .is_some_and(|m| m.game_id == game_id && m.wall_time == row.wall_time_ms);
        if same {
            current.as_mut().unwrap().entities.push(entity);
        } else {
            if let Some(m) = current.take() {
                out.entry(m.game_id.clone()).or_default().push(m);
            }
            current = Some(Moment {
                game_id,
                quarter: row.quarter,
                game_clock: row.game_clock_s,
                wall_time: row.wall_time_ms,
                entities: vec![entity],
            });
        }
    }
    if let Some(m) = current.take() {
        out.entry(m.game_id.clone()).or_default().push(m);
    }
    Ok(out)
}

fn parse_events(rows: Rows<EventRow>) -> Result<BTreeMap<GameId, Vec<EventRecord>>> {
    let path = &rows.path;
    let mut out: BTreeMap<GameId, Vec<EventRecord>> = BTreeMap::new();
    for (line, row) in rows.rows {
        let ev = EventRecord {
            game_id: id(path, line, &row.game_id)?,
            wall_time: row.wall_time_ms,
            kind: row.kind,
            team: id(path, line, &row.team_id)?,
            player: id(path, line, &row.player_id)?,
        };
        out.entry(ev.game_id.clone()).or_default().push(ev);
    }
    Ok(out)
}

pub fn read_box_lines(path: &Path) -> Result<Vec<BoxLine>> {
    read_box_from(path, open(path)?)
}

fn read_box_from<R: Read>(path: &Path, reader: R) -> Result<Vec<BoxLine>> {
    Ok(read_rows::<BoxLine, _>(path, reader)?
        .rows
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}

pub fn read_roster(path: &Path) -> Result<BTreeMap<PlayerId, RosterEntry>> {
    read_roster_from(path, open(path)?)
}

fn read_roster_from<R: Read>(path: &Path, reader: R) -> Result<BTreeMap<PlayerId, RosterEntry>> {
    let mut out = BTreeMap::new();
    for (line, entry) in read_rows::<RosterEntry, _>(path, reader)?.rows {
        if let Some(prev) = out.get(&entry.player_id) {
            let prev: &RosterEntry = prev;
            if prev.position != entry.position {
                return Err(Error::Validation(format!(
                    "{}:{line}: player {} listed with two positions",
                    path.display(),
                    entry.player_id
                )));
            }
        }
        out.insert(entry.player_id.clone(), entry);
    }
    Ok(out)
}

pub fn read_labels(path: &Path) -> Result<LabelSet> {
    Ok(read_rows::<AssistLabel, _>(path, open(path)?)?
        .rows
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}

// ---------------------------------------------------------------------------
// Assembly and validation
// ---------------------------------------------------------------------------

fn assemble(
    mut moments: BTreeMap<GameId, Vec<Moment>>,
    mut events: BTreeMap<GameId, Vec<EventRecord>>,
    box_lines: Vec<BoxLine>,
    roster: &BTreeMap<PlayerId, RosterEntry>,
) -> Result<Vec<GameBundle>> {
    let mut by_game: BTreeMap<GameId, Vec<BoxLine>> = BTreeMap::new();
    for line in box_lines {
        by_game.entry(line.game_id.clone()).or_default().push(line);
    }
    if let Some(orphan) = events.keys().find(|g| !by_game.contains_key(*g)) {
        return Err(Error::Validation(format!("events for game {orphan} have no box lines")));
    }
    let mut bundles = Vec::with_capacity(by_game.len());
    for (game_id, lines) in by_game {
        let game_moments = moments.remove(&game_id).unwrap_or_default();
        let game_events = events.remove(&game_id).unwrap_or_default();
        bundles.push(build_bundle(game_id, lines, game_moments, game_events, roster)?);
    }
    Ok(bundles)
}

fn build_bundle(
    game_id: GameId,
    lines: Vec<BoxLine>,
    moments: Vec<Moment>,
    events: Vec<EventRecord>,
    roster: &BTreeMap<PlayerId, RosterEntry>,
) -> Result<GameBundle> {
    let [a, b]: [BoxLine; 2] = lines.try_into().map_err(|l: Vec<BoxLine>| {
        Error::Validation(format!(
            "game {game_id}: expected box lines for exactly two teams, found {}",
            l.len()
        ))
    })?;
    let (home_line, away_line) = match (a.is_home, b.is_home) {
        (true, false) => (a, b),
        (false, true) => (b, a),
        _ => {
            return Err(Error::Validation(format!(
                "game {game_id}: box lines must contain one home and one away team"
            )))
        }
    };
    if home_line.opp_id != away_line.team_id || away_line.opp_id != home_line.team_id {
        return Err(Error::Validation(format!(
            "game {game_id}: box line opponents do not match"
        )));
    }
    if events.is_empty() {
        return Err(Error::Validation(format!("game {game_id}: no events")));
    }
    if let Some(w) = events.windows(2).find(|w| w[1].wall_time < w[0].wall_time) {
        return Err(Error::Validation(format!(
            "game {game_id}: events not sorted by wall time at {} ms",
            w[1].wall_time
        )));
    }
    if let Some(w) = moments.windows(2).find(|w| w[1].wall_time <= w[0].wall_time) {
        return Err(Error::Validation(format!(
            "game {game_id}: moment timestamps not strictly increasing at {} ms",
            w[1].wall_time
        )));
    }
    let home = home_line.team_id.clone();
    let away = away_line.team_id.clone();
    let mut game_roster = BTreeMap::new();
    for ev in &events {
        if ev.team != home && ev.team != away {
            return Err(Error::Validation(format!(
                "game {game_id}: event at {} ms by team {} which is not playing",
                ev.wall_time, ev.team
            )));
        }
        let entry = roster.get(&ev.player).ok_or_else(|| {
            Error::Validation(format!(
                "game {game_id}: player {} not in roster",
                ev.player
            ))
        })?;
        game_roster.insert(ev.player.clone(), entry.clone());
    }
    for m in &moments {
        for e in &m.entities {
            if let Some(p) = &e.player {
                if let Some(entry) = roster.get(p) {
                    game_roster.insert(p.clone(), entry.clone());
                }
            }
        }
    }
    if !moments.is_empty() {
        let missing = moments.iter().filter(|m| m.ball().is_none()).count();
        let share = missing as f64 / moments.len() as f64;
        if share > MAX_MISSING_BALL_SHARE {
            return Err(Error::DataQuality(format!(
                "game {game_id}: ball missing in {missing} of {} moments",
                moments.len()
            )));
        }
    }
    let mut bundle = GameBundle {
        game_id,
        date: home_line.date.clone(),
        home,
        away,
        moments,
        events,
        box_lines: [home_line, away_line],
        roster: game_roster,
    };
    normalize(&mut bundle);
    Ok(bundle)
}

fn half_of(quarter: u8) -> u8 {
    match quarter {
        0..=2 => 1,
        3 | 4 => 2,
        ot => ot,
    }
}

/// Reflect every moment whose possessing team attacks the high-x basket.
///
/// The attacking direction of a team in each half is the majority side of its
/// shot releases; the possessing team at a moment is the team of the latest
/// event at or before it. Normalizing an already normalized bundle is a no-op.
pub fn normalize(bundle: &mut GameBundle) {
    // vote: (team, half) -> (#low, #high)
    let mut votes: HashMap<(TeamId, u8), (u32, u32)> = HashMap::new();
    for ev in bundle.events.iter().filter(|e| e.kind == EventKind::ShotRelease) {
        let Some(m) = bundle.moment_near(ev.wall_time) else {
            continue;
        };
        let Some(p) = m.player_point(&ev.player).or_else(|| m.ball()) else {
            continue;
        };
        let v = votes.entry((ev.team.clone(), half_of(m.quarter))).or_default();
        if p.x > COURT_LENGTH / 2.0 {
            v.1 += 1;
        } else {
            v.0 += 1;
        }
    }
    let attacks_high = |team: &TeamId, half: u8, other: &TeamId| -> bool {
        match votes.get(&(team.clone(), half)) {
            Some(&(low, high)) => high > low,
            None => votes
                .get(&(other.clone(), half))
                .is_some_and(|&(low, high)| low > high),
        }
    };
    let home = bundle.home.clone();
    let away = bundle.away.clone();
    let events = &bundle.events;
    let mut cursor = 0usize;
    for m in bundle.moments.iter_mut() {
        while cursor < events.len() && events[cursor].wall_time <= m.wall_time {
            cursor += 1;
        }
        let team = if cursor > 0 {
            &events[cursor - 1].team
        } else {
            &events[0].team
        };
        let other = if *team == home { &away } else { &home };
        if attacks_high(team, half_of(m.quarter), other) {
            for e in &mut m.entities {
                e.point = e.point.reflected();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Public loaders
// ---------------------------------------------------------------------------

/// Load exactly one game from four CSV files.
pub fn load_game(
    moments_path: &Path,
    events_path: &Path,
    box_path: &Path,
    roster_path: &Path,
) -> Result<GameBundle> {
    let mut games = load_games_from(moments_path, events_path, box_path, roster_path)?;
    match games.len() {
        1 => Ok(games.pop().unwrap()),
        0 => Err(Error::Validation("no games in box file".into())),
        n => Err(Error::Validation(format!("expected one game, found {n}"))),
    }
}

/// Load every game in a data directory holding the canonical file names.
pub fn load_dir(dir: &Path) -> Result<Vec<GameBundle>> {
    load_games_from(
        &dir.join(MOMENTS_FILE),
        &dir.join(EVENTS_FILE),
        &dir.join(BOX_FILE),
        &dir.join(ROSTER_FILE),
    )
}

pub fn load_games_from(
    moments_path: &Path,
    events_path: &Path,
    box_path: &Path,
    roster_path: &Path,
) -> Result<Vec<GameBundle>> {
    let roster = read_roster(roster_path)?;
    let box_lines = read_box_lines(box_path)?;
    let events = parse_events(read_rows(events_path, open(events_path)?)?)?;
    if events.is_empty() {
        return Err(Error::Validation(format!(
            "{}: no events",
            events_path.display()
        )));
    }
    let moments = parse_moments(read_rows(moments_path, open(moments_path)?)?)?;
    assemble(moments, events, box_lines, &roster)
}

/// Assemble bundles from in-memory parts, applying the same validation and
/// normalization as the file loaders.
pub fn bundle_from_parts(
    box_lines: Vec<BoxLine>,
    moments: Vec<Moment>,
    events: Vec<EventRecord>,
    roster: &BTreeMap<PlayerId, RosterEntry>,
) -> Result<Vec<GameBundle>> {
    let mut m: BTreeMap<GameId, Vec<Moment>> = BTreeMap::new();
    for moment in moments {
        m.entry(moment.game_id.clone()).or_default().push(moment);
    }
    let mut e: BTreeMap<GameId, Vec<EventRecord>> = BTreeMap::new();
    for ev in events {
        e.entry(ev.game_id.clone()).or_default().push(ev);
    }
    assemble(m, e, box_lines, roster)
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

const MOMENT_HEADER: [&str; 10] = [
    "game_id", "quarter", "wall_time_ms", "game_clock_s", "entity", "team_id", "player_id", "x_ft",
    "y_ft", "z_ft",
];
const EVENT_HEADER: [&str; 5] = ["game_id", "wall_time_ms", "kind", "team_id", "player_id"];
const BOX_HEADER: [&str; 9] = [
    "game_id", "date", "team_id", "opp_id", "is_home", "fgm", "fga", "ast", "blk",
];
const ROSTER_HEADER: [&str; 4] = ["player_id", "name", "team_id", "position"];
const LABEL_HEADER: [&str; 3] = ["game_id", "wall_time_ms", "passer_id"];

/// CSV writer that has already emitted `header`.
fn with_header<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

fn put_moments<W: Write>(w: &mut csv::Writer<W>, moments: &[Moment]) -> Result<()> {
    for m in moments {
        for e in &m.entities {
            w.serialize(MomentRow {
                game_id: m.game_id.to_string(),
                quarter: m.quarter,
                wall_time_ms: m.wall_time,
                game_clock_s: m.game_clock,
                entity: e.kind,
                team_id: e.team.as_ref().map(|t| t.to_string()),
                player_id: e.player.as_ref().map(|p| p.to_string()),
                x_ft: e.point.x,
                y_ft: e.point.y,
                z_ft: e.point.z,
            })?;
        }
    }
    Ok(())
}

fn put_events<W: Write>(w: &mut csv::Writer<W>, events: &[EventRecord]) -> Result<()> {
    for e in events {
        w.serialize(EventRow {
            game_id: e.game_id.to_string(),
            wall_time_ms: e.wall_time,
            kind: e.kind,
            team_id: e.team.to_string(),
            player_id: e.player.to_string(),
        })?;
    }
    Ok(())
}

fn put_all<W: Write, T: Serialize>(w: &mut csv::Writer<W>, rows: impl IntoIterator<Item = T>) -> Result<()> {
    for r in rows {
        w.serialize(r)?;
    }
    Ok(())
}

fn done<W: Write>(mut w: csv::Writer<W>, what: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(what, e))
}

pub fn write_moments<W: Write>(out: W, moments: &[Moment]) -> Result<()> {
    let mut w = with_header(out, &MOMENT_HEADER)?;
    put_moments(&mut w, moments)?;
    done(w, "<moments>")
}

pub fn write_events<W: Write>(out: W, events: &[EventRecord]) -> Result<()> {
    let mut w = with_header(out, &EVENT_HEADER)?;
    put_events(&mut w, events)?;
    done(w, "<events>")
}

pub fn write_box_lines<W: Write>(out: W, lines: &[BoxLine]) -> Result<()> {
    let mut w = with_header(out, &BOX_HEADER)?;
    put_all(&mut w, lines)?;
    done(w, "<box>")
}

pub fn write_roster<W: Write>(out: W, roster: &BTreeMap<PlayerId, RosterEntry>) -> Result<()> {
    let mut w = with_header(out, &ROSTER_HEADER)?;
    put_all(&mut w, roster.values())?;
    done(w, "<roster>")
}

pub fn write_labels<W: Write>(out: W, labels: &[AssistLabel]) -> Result<()> {
    let mut w = with_header(out, &LABEL_HEADER)?;
    put_all(&mut w, labels)?;
    done(w, "<assists>")
}

/// Write bundles to `dir` in the canonical schemas. Output is ordered by game
/// then time, so reloading yields identical bundles.
pub fn write_dir(dir: &Path, bundles: &[GameBundle]) -> Result<()> {
    let mut out = DataWriter::create(dir)?;
    let mut roster = BTreeMap::new();
    for b in bundles {
        out.write_game(&b.moments, &b.events, &b.box_lines, &[])?;
        roster.extend(b.roster.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    out.finish(&roster)
}

/// Streams games into a data directory one at a time. The roster is written
/// when the writer is finished.
pub struct DataWriter {
    dir: PathBuf,
    moments: csv::Writer<std::io::BufWriter<File>>,
    events: csv::Writer<std::io::BufWriter<File>>,
    box_lines: csv::Writer<std::io::BufWriter<File>>,
    labels: csv::Writer<std::io::BufWriter<File>>,
}

impl DataWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let open = |name: &str, header: &[&str]| {
            let path = dir.join(name);
            with_header(std::io::BufWriter::new(create(&path)?), header)
        };
        Ok(Self {
            dir: dir.to_path_buf(),
            moments: open(MOMENTS_FILE, &MOMENT_HEADER)?,
            events: open(EVENTS_FILE, &EVENT_HEADER)?,
            box_lines: open(BOX_FILE, &BOX_HEADER)?,
            labels: open(ASSISTS_FILE, &LABEL_HEADER)?,
        })
    }

    pub fn write_game(
        &mut self,
        moments: &[Moment],
        events: &[EventRecord],
        box_lines: &[BoxLine],
        labels: &[AssistLabel],
    ) -> Result<()> {
        put_moments(&mut self.moments, moments)?;
        put_events(&mut self.events, events)?;
        put_all(&mut self.box_lines, box_lines)?;
        put_all(&mut self.labels, labels)
    }

    pub fn finish(self, roster: &BTreeMap<PlayerId, RosterEntry>) -> Result<()> {
        done(self.moments, MOMENTS_FILE)?;
        done(self.events, EVENTS_FILE)?;
        done(self.box_lines, BOX_FILE)?;
        done(self.labels, ASSISTS_FILE)?;
        let path = self.dir.join(ROSTER_FILE);
        write_roster(std::io::BufWriter::new(create(&path)?), roster)
    }
}

// ---------------------------------------------------------------------------
// Team-game ratios
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRatio {
    pub game_id: GameId,
    pub team: TeamId,
    pub kind: RatioKind,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatioSet {
    pub observations: Vec<TeamGameRatio>,
    pub skipped: Vec<SkippedRatio>,
}

/// AR and BR for both teams of one game.
pub fn compute_team_game_ratios(bundle: &GameBundle) -> Result<RatioSet> {
    ratios_from_box(&bundle.box_lines)
}

/// Team-game ratio observations for every game in a box file. Team-games with
/// an undefined ratio (no made field goals, or no opponent attempts) are
/// skipped with a warning.
pub fn ratios_from_box(lines: &[BoxLine]) -> Result<RatioSet> {
    let mut by_game: BTreeMap<&GameId, Vec<&BoxLine>> = BTreeMap::new();
    for l in lines {
        by_game.entry(&l.game_id).or_default().push(l);
    }
    let mut set = RatioSet::default();
    for (game_id, lines) in by_game {
        let &[a, b] = lines.as_slice() else {
            return Err(Error::Validation(format!(
                "game {game_id}: expected two box lines, found {}",
                lines.len()
            )));
        };
        let home = match (a.is_home, b.is_home) {
            (true, false) => &a.team_id,
            (false, true) => &b.team_id,
            _ => {
                return Err(Error::Validation(format!(
                    "game {game_id}: needs one home and one away line"
                )))
            }
        };
        for (line, opp) in [(a, b), (b, a)] {
            if line.ast > line.fgm {
                return Err(Error::Validation(format!(
                    "game {game_id}: team {} has more assists than made field goals",
                    line.team_id
                )));
            }
            let mut push = |kind: RatioKind, num: u32, den: u32, why: &str| {
                if den == 0 {
                    log::warn!("skipping {kind:?} for {} in {game_id}: {why}", line.team_id);
                    set.skipped.push(SkippedRatio {
                        game_id: game_id.clone(),
                        team: line.team_id.clone(),
                        kind,
                        reason: why.to_string(),
                    });
                } else {
                    set.observations.push(TeamGameRatio {
                        game_id: game_id.clone(),
                        team: line.team_id.clone(),
                        opponent: opp.team_id.clone(),
                        is_home: line.is_home,
                        scorekeeper: home.clone(),
                        kind,
                        value: f64::from(num) / f64::from(den),
                    });
                }
            };
            push(RatioKind::Ar, line.ast, line.fgm, "no made field goals");
            push(RatioKind::Br, line.blk, opp.fga, "opponent attempted no field goals");
        }
    }
    Ok(set)
}

/// Season-long league ratio: total numerator over total denominator.
pub fn league_ratio(lines: &[BoxLine], kind: RatioKind) -> Result<f64> {
    let (num, den) = match kind {
        RatioKind::Ar => lines.iter().fold((0u64, 0u64), |(n, d), l| {
            (n + u64::from(l.ast), d + u64::from(l.fgm))
        }),
        // every line's blocks are against its opponent's attempts; summed
        // over all lines the denominators cover every attempt once
        RatioKind::Br => lines.iter().fold((0u64, 0u64), |(n, d), l| {
            (n + u64::from(l.blk), d + u64::from(l.fga))
        }),
    };
    if den == 0 {
        return Err(Error::invalid("league ratio undefined: zero denominator"));
    }
    Ok(num as f64 / den as f64)
}

/// Distinct teams appearing in a set of box lines.
pub fn teams_in(lines: &[BoxLine]) -> BTreeSet<TeamId> {
    lines
        .iter()
        .flat_map(|l| [l.team_id.clone(), l.opp_id.clone()])
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::io::Cursor;

    pub(crate) fn box_line(game: &str, team: &str, opp: &str, home: bool, fgm: u32, fga: u32, ast: u32, blk: u32) -> BoxLine {
        BoxLine {
            game_id: GameId::new(game).unwrap(),
            date: "2016-01-07".into(),
            team_id: TeamId::new(team).unwrap(),
            opp_id: TeamId::new(opp).unwrap(),
            is_home: home,
            fgm,
            fga,
            ast,
            blk,
        }
    }

    #[test]
    fn assist_ratio_arithmetic() {
        let lines = vec![
            box_line("g", "A", "B", true, 40, 85, 22, 0),
            box_line("g", "B", "A", false, 38, 80, 20, 5),
        ];
        let set = ratios_from_box(&lines).unwrap();
        let ar_a = set
            .observations
            .iter()
            .find(|r| r.team.as_str() == "A" && r.kind == RatioKind::Ar)
            .unwrap();
        assert_eq!(ar_a.value, 0.55);
        assert_eq!(ar_a.scorekeeper.as_str(), "A");
        let br_a = set
            .observations
            .iter()
            .find(|r| r.team.as_str() == "A" && r.kind == RatioKind::Br)
            .unwrap();
        assert_eq!(br_a.value, 0.0);
        let br_b = set
            .observations
            .iter()
            .find(|r| r.team.as_str() == "B" && r.kind == RatioKind::Br)
            .unwrap();
        assert_eq!(br_b.value, 5.0 / 85.0);
        assert_eq!(br_b.scorekeeper.as_str(), "A");
        assert!(!br_b.is_home);
    }

    #[test]
    fn zero_made_field_goals_is_skipped() {
        let lines = vec![
            box_line("g", "A", "B", true, 0, 10, 0, 0),
            box_line("g", "B", "A", false, 5, 10, 2, 1),
        ];
        let set = ratios_from_box(&lines).unwrap();
        assert_eq!(set.skipped.len(), 1);
        assert_eq!(set.skipped[0].kind, RatioKind::Ar);
        assert_eq!(set.observations.len(), 3);
    }

    #[test]
    fn more_assists_than_makes_is_rejected() {
        let lines = vec![
            box_line("g", "A", "B", true, 5, 10, 6, 0),
            box_line("g", "B", "A", false, 5, 10, 2, 1),
        ];
        assert!(ratios_from_box(&lines).is_err());
    }

    #[test]
    fn out_of_bounds_coordinate_is_a_parse_error_with_line() {
        let csv = "game_id,quarter,wall_time_ms,game_clock_s,entity,team_id,player_id,x_ft,y_ft,z_ft\n\
                   g,1,0,720,ball,,,10,10,5\n\
                   g,1,0,720,player,A,p1,101,20,\n";
        let rows = read_rows::<MomentRow, _>(Path::new("moments.csv"), Cursor::new(csv)).unwrap();
        match parse_moments(rows) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let csv = "game_id,wall_time_ms,kind,team_id,player_id\n\
                   g,10,PASS_RELEASE,A,p1\n\
                   g,notanumber,DRIBBLE,A,p1\n";
        match read_rows::<EventRow, _>(Path::new("events.csv"), Cursor::new(csv)) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {:?}", other.map(|r| r.rows.len())),
        }
        let csv = "game_id,wall_time_ms,kind,team_id,player_id\ng,10,JUMP_BALL,A,p1\n";
        assert!(matches!(
            read_rows::<EventRow, _>(Path::new("events.csv"), Cursor::new(csv)),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn moment_lookup_respects_tolerance() {
        let g = GameId::new("g").unwrap();
        let moments: Vec<Moment> = [0i64, 40, 80, 200]
            .iter()
            .map(|&t| Moment {
                game_id: g.clone(),
                quarter: 1,
                game_clock: 720.0,
                wall_time: t,
                entities: vec![],
            })
            .collect();
        assert_eq!(moment_near(&moments, 39, 80).unwrap().wall_time, 40);
        assert_eq!(moment_near(&moments, 20, 80).unwrap().wall_time, 0);
        assert_eq!(moment_near(&moments, 150, 80).unwrap().wall_time, 200);
        assert!(moment_near(&moments, 140, 50).is_none());
        assert!(moment_near(&moments, 400, 80).is_none());
        assert!(moment_near(&[], 0, 80).is_none());
    }

    #[test]
    fn league_ratio_pools_counts() {
        let lines = vec![
            box_line("g", "A", "B", true, 40, 80, 20, 4),
            box_line("g", "B", "A", false, 10, 20, 10, 2),
        ];
        assert_eq!(league_ratio(&lines, RatioKind::Ar).unwrap(), 30.0 / 50.0);
        assert_eq!(league_ratio(&lines, RatioKind::Br).unwrap(), 6.0 / 100.0);
    }
}
