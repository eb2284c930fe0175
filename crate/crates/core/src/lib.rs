//! Scorekeeper bias in basketball box scores: tracking-data ingest,
//! potential-assist extraction, the team-level and contextual models, and
//! the effect, adjustment and bonus reports built on them.

pub mod court;
pub mod effects;
pub mod error;
pub mod features;
pub mod ingest;
pub mod par;
pub mod regress;
pub mod report;
pub mod synth;
pub mod types;

pub use court::{distance, zone_of, CourtPoint, CourtZone};
pub use error::{Error, Result};
pub use types::{
    EventKind, EventRecord, GameId, Moment, PlayerId, Position, PotentialAssist, RatioKind,
    TeamGameRatio, TeamId,
};
