//! Court geometry and the six-zone partition of the offensive court.
//!
//! All coordinates are in feet. After offensive normalization the attacking
//! basket sits at `(5.25, 25)`, the baseline is `x = 0` and the sidelines are
//! `y = 0` and `y = 50`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const COURT_LENGTH: f64 = 94.0;
pub const COURT_WIDTH: f64 = 50.0;
pub const BASKET_X: f64 = 5.25;
pub const BASKET_Y: f64 = 25.0;
pub const DUNK_RADIUS: f64 = 3.0;
/// The key runs from the baseline to the free-throw line.
pub const KEY_DEPTH: f64 = 19.0;
pub const KEY_WIDTH: f64 = 16.0;
pub const THREE_POINT_RADIUS: f64 = 23.75;
/// Distance of the corner three-point lines from the basket center.
pub const CORNER_THREE_OFFSET: f64 = 22.0;
/// Corner lines run from the baseline to here, where the arc begins.
pub const CORNER_THREE_MAX_X: f64 = 14.0;
/// The heave line is drawn ten feet beyond the three-point arc.
pub const HEAVE_RADIUS: f64 = THREE_POINT_RADIUS + 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CourtPoint {
    pub x: f64,
    pub y: f64,
    /// Height, only tracked for the ball.
    pub z: Option<f64>,
}

impl CourtPoint {
    pub const BASKET: CourtPoint = CourtPoint {
        x: BASKET_X,
        y: BASKET_Y,
        z: None,
    };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y, z: None }
    }

    pub fn with_height(mut self, z: f64) -> Self {
        self.z = Some(z);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_none_or(f64::is_finite)
    }

    /// Point reflection through center court, which swaps the two baskets.
    pub fn reflected(&self) -> Self {
        Self {
            x: COURT_LENGTH - self.x,
            y: COURT_WIDTH - self.y,
            z: self.z,
        }
    }
}

/// Euclidean distance in the x-y plane.
pub fn distance(a: CourtPoint, b: CourtPoint) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CourtZone {
    Dunk,
    Paint,
    Long2,
    Arc3,
    Corner3,
    Heave,
}

impl CourtZone {
    pub const ALL: [CourtZone; 6] = [
        CourtZone::Dunk,
        CourtZone::Paint,
        CourtZone::Long2,
        CourtZone::Arc3,
        CourtZone::Corner3,
        CourtZone::Heave,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CourtZone::Dunk => "Dunk",
            CourtZone::Paint => "Paint",
            CourtZone::Long2 => "Long2",
            CourtZone::Arc3 => "Arc3",
            CourtZone::Corner3 => "Corner3",
            CourtZone::Heave => "Heave",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CourtZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CourtZone {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CourtZone::ALL
            .into_iter()
            .find(|z| z.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown court zone {s:?}")))
    }
}

/// Zone of a point in normalized offensive coordinates.
///
/// Points on a dividing line belong to the zone nearer the basket; on the
/// corner/arc seam at `x = 14` the corner wins.
pub fn zone_of(p: CourtPoint) -> Result<CourtZone> {
    if !(p.x.is_finite() && p.y.is_finite()) {
        return Err(Error::invalid(format!(
            "non-finite court point ({}, {})",
            p.x, p.y
        )));
    }
    let r = distance(p, CourtPoint::BASKET);
    let half_key = KEY_WIDTH / 2.0;
    let zone = if r <= DUNK_RADIUS {
        CourtZone::Dunk
    } else if p.x <= KEY_DEPTH && (p.y - BASKET_Y).abs() <= half_key {
        CourtZone::Paint
    } else if p.x <= CORNER_THREE_MAX_X && (p.y - BASKET_Y).abs() > CORNER_THREE_OFFSET {
        CourtZone::Corner3
    } else if r <= THREE_POINT_RADIUS {
        CourtZone::Long2
    } else if r <= HEAVE_RADIUS {
        CourtZone::Arc3
    } else {
        CourtZone::Heave
    };
    Ok(zone)
}
