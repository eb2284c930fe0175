//! Domain vocabulary shared by every stage of the pipeline.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::court::{CourtPoint, CourtZone};
use crate::error::{Error, Result};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(id: impl AsRef<str>) -> Result<Self> {
                let id = id.as_ref().trim();
                if id.is_empty() {
                    return Err(Error::invalid(concat!(stringify!($name), " must be non-empty")));
                }
                Ok(Self(Arc::from(id)))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;
            fn try_from(value: String) -> Result<Self> {
                Self::new(value)
            }
        }

        impl From<$name> for String {
            fn from(value: $name) -> String {
                value.0.to_string()
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                Self::new(s)
            }
        }
    };
}

string_id!(
    /// Team identifier. A scorekeeper is identified by the id of the team that hires it.
    TeamId
);
string_id!(PlayerId);
string_id!(GameId);

/// Primary playing position of a passer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    #[serde(rename = "PG")]
    PointGuard,
    #[serde(rename = "SG")]
    ShootingGuard,
    #[serde(rename = "SF")]
    SmallForward,
    #[serde(rename = "PF")]
    PowerForward,
    #[serde(rename = "C")]
    Center,
}

impl Position {
    pub const ALL: [Position; 5] = [
        Position::PointGuard,
        Position::ShootingGuard,
        Position::SmallForward,
        Position::PowerForward,
        Position::Center,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Position::PointGuard => "PG",
            Position::ShootingGuard => "SG",
            Position::SmallForward => "SF",
            Position::PowerForward => "PF",
            Position::Center => "C",
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Position {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Position::ALL
            .into_iter()
            .find(|p| p.code() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown position {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Player,
    Ball,
}

/// One tracked object in a [`Moment`].
#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub kind: EntityKind,
    pub team: Option<TeamId>,
    pub player: Option<PlayerId>,
    pub point: CourtPoint,
}

/// One 25 Hz tracking sample: ten players and the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Moment {
    pub game_id: GameId,
    /// 1-4, 5+ for overtime periods.
    pub quarter: u8,
    /// Seconds remaining in the period. Carried, never used for ordering.
    pub game_clock: f64,
    /// Master clock in milliseconds.
    pub wall_time: i64,
    pub entities: Vec<Entity>,
}

impl Moment {
    pub fn player_point(&self, player: &PlayerId) -> Option<CourtPoint> {
        self.entities
            .iter()
            .find(|e| e.kind == EntityKind::Player && e.player.as_ref() == Some(player))
            .map(|e| e.point)
    }

    pub fn ball(&self) -> Option<CourtPoint> {
        self.entities
            .iter()
            .find(|e| e.kind == EntityKind::Ball)
            .map(|e| e.point)
    }

    pub fn players_of<'a>(&'a self, team: &'a TeamId) -> impl Iterator<Item = &'a Entity> + 'a {
        self.entities
            .iter()
            .filter(move |e| e.kind == EntityKind::Player && e.team.as_ref() == Some(team))
    }

    pub fn player_count(&self) -> usize {
        self.entities
            .iter()
            .filter(|e| e.kind == EntityKind::Player)
            .count()
    }

    pub fn is_complete(&self) -> bool {
        self.player_count() == 10 && self.ball().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    PassRelease,
    PassReceive,
    Dribble,
    ShotRelease,
    ShotMade,
    ShotMissed,
    Rebound,
    Turnover,
    InboundPass,
}

impl EventKind {
    pub const ALL: [EventKind; 9] = [
        EventKind::PassRelease,
        EventKind::PassReceive,
        EventKind::Dribble,
        EventKind::ShotRelease,
        EventKind::ShotMade,
        EventKind::ShotMissed,
        EventKind::Rebound,
        EventKind::Turnover,
        EventKind::InboundPass,
    ];

    pub fn code(self) -> &'static str {
        match self {
            EventKind::PassRelease => "PASS_RELEASE",
            EventKind::PassReceive => "PASS_RECEIVE",
            EventKind::Dribble => "DRIBBLE",
            EventKind::ShotRelease => "SHOT_RELEASE",
            EventKind::ShotMade => "SHOT_MADE",
            EventKind::ShotMissed => "SHOT_MISSED",
            EventKind::Rebound => "REBOUND",
            EventKind::Turnover => "TURNOVER",
            EventKind::InboundPass => "INBOUND_PASS",
        }
    }
}

impl FromStr for EventKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.code() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown event kind {s:?}")))
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub game_id: GameId,
    pub wall_time: i64,
    pub kind: EventKind,
    pub team: TeamId,
    pub player: PlayerId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioKind {
    /// Team assists over team field goals made.
    Ar,
    /// Team blocks over opponent field goal attempts.
    Br,
}

impl FromStr for RatioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ar" => Ok(RatioKind::Ar),
            "br" => Ok(RatioKind::Br),
            other => Err(Error::invalid(format!("unknown ratio kind {other:?}"))),
        }
    }
}

/// One team-game observation for the team-level ratio model.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamGameRatio {
    pub game_id: GameId,
    pub team: TeamId,
    pub opponent: TeamId,
    pub is_home: bool,
    /// Always the home team of the game.
    pub scorekeeper: TeamId,
    pub kind: RatioKind,
    pub value: f64,
}

/// A completed in-play pass followed by a made field goal within seven seconds,
/// with its spatio-temporal context.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialAssist {
    pub game_id: GameId,
    /// Wall time of the made shot; joins the record to scorekeeper labels.
    pub made_wall_time: i64,
    pub passer: PlayerId,
    pub shooter: PlayerId,
    pub team: TeamId,
    pub opponent: TeamId,
    pub is_home: bool,
    pub scorekeeper: TeamId,
    pub passer_position: Position,
    /// Seconds from reception to shot release.
    pub c1_possession_time: f64,
    pub c2_dribbles: u32,
    /// Feet travelled by the shooter, anchored at reception, dribbles and release.
    pub c3_travel_distance: f64,
    pub c4_pass_distance: f64,
    pub c5_passer_defender_dist: f64,
    pub c6_shooter_defender_dist: f64,
    pub c7_passer_zone: CourtZone,
    pub c8_shooter_zone: CourtZone,
    pub label_recorded_assist: bool,
}

impl PotentialAssist {
    /// Passer and shooter zone interaction. Derived, so it always equals `(c7, c8)`.
    pub fn c9_zone_pair(&self) -> (CourtZone, CourtZone) {
        (self.c7_passer_zone, self.c8_shooter_zone)
    }

    pub fn continuous(&self) -> [f64; 6] {
        [
            self.c1_possession_time,
            f64::from(self.c2_dribbles),
            self.c3_travel_distance,
            self.c4_pass_distance,
            self.c5_passer_defender_dist,
            self.c6_shooter_defender_dist,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.continuous();
        if !(self.c1_possession_time > 0.0 && self.c1_possession_time <= 7.0) {
            return Err(Error::Validation(format!(
                "possession time {} outside (0, 7]",
                self.c1_possession_time
            )));
        }
        if c[2..].iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(format!(
                "negative or non-finite distance in potential assist at {} ms",
                self.made_wall_time
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_reject_empty() {
        assert!(TeamId::new("").is_err());
        assert!(PlayerId::new("   ").is_err());
        assert_eq!(GameId::new("g1").unwrap().as_str(), "g1");
    }

    #[test]
    fn codes_round_trip() {
        for p in Position::ALL {
            assert_eq!(p.code().parse::<Position>().unwrap(), p);
        }
        for k in EventKind::ALL {
            assert_eq!(k.code().parse::<EventKind>().unwrap(), k);
        }
        assert!("GUARD".parse::<Position>().is_err());
    }

    #[test]
    fn ids_serialize_as_plain_strings() {
        let id = TeamId::new("LAC").unwrap();
        assert_eq!(serde_json::to_string(&id).unwrap(), "\"LAC\"");
        let back: TeamId = serde_json::from_str("\"LAC\"").unwrap();
        assert_eq!(back, id);
        assert!(serde_json::from_str::<TeamId>("\"\"").is_err());
    }
}
