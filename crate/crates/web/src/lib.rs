//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three interactions: look up the shot zone under the cursor, trace how a
//! log-odds shift moves an average potential assist's probability, and
//! simulate the per-game bonus a scorekeeper with a given bias hands out.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scorekeeper::effects::{effect, summarize};
use scorekeeper::{zone_of, CourtPoint, CourtZone};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Half-court extent drawn by the demo, in feet.
pub const HALF_COURT_X: f64 = 47.0;
pub const COURT_Y: f64 = 50.0;

/// Zone name at an offensive-coordinate point, or an empty string if the
/// point is not finite.
#[wasm_bindgen]
pub fn zone_at(x: f64, y: f64) -> String {
    zone_of(CourtPoint::new(x, y))
        .map(|z| z.name().to_string())
        .unwrap_or_default()
}

/// Zone names in the index order used by [`zone_grid`], as a JSON array.
#[wasm_bindgen]
pub fn zone_names() -> String {
    json!(CourtZone::ALL.iter().map(|z| z.name()).collect::<Vec<_>>()).to_string()
}

/// Zone index at the centre of each cell of a `cols` x `rows` grid over the
/// half court, row-major with row 0 at y = 0.
#[wasm_bindgen]
pub fn zone_grid(cols: u32, rows: u32) -> Vec<u8> {
    let (w, h) = (HALF_COURT_X / cols as f64, COURT_Y / rows as f64);
    (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (c, r)))
        .map(|(c, r)| {
            let p = CourtPoint::new((c as f64 + 0.5) * w, (r as f64 + 0.5) * h);
            zone_of(p).map_or(u8::MAX, |z| z.index() as u8)
        })
        .collect()
}

/// Change in probability from adding each shift in `lo..=hi` to baseline
/// log-odds `v`.
#[wasm_bindgen]
pub fn effect_curve(v: f64, lo: f64, hi: f64, points: u32) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![effect(v, lo)],
        n => (0..n)
            .map(|i| effect(v, lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// Per-game bonus for a scorekeeper whose home-side log-odds shift is
/// `shift`: each of `per_game` potential assists is recorded with the shifted
/// probability, and the bonus is recorded minus the unshifted expectation.
/// Returns `{mean, variance, mean_abs, samples}` as JSON.
#[wasm_bindgen]
pub fn simulate_bonus(shift: f64, base_rate: f64, per_game: u32, games: u32, seed: u64) -> String {
    let p = base_rate.clamp(1e-6, 1.0 - 1e-6);
    let shifted = p + effect((p / (1.0 - p)).ln(), shift);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expected = per_game as f64 * p;
    let samples: Vec<f64> = (0..games)
        .map(|_| (0..per_game).filter(|_| rng.random_bool(shifted)).count() as f64 - expected)
        .collect();
    let (mean, variance, mean_abs) = summarize(&samples);
    json!({ "mean": mean, "variance": variance, "mean_abs": mean_abs, "samples": samples }).to_string()
}
