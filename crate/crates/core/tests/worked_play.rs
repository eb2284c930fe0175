//! The shipped single-possession fixture: a paint pass to a forward who
//! drives two dribbles and scores.

use std::path::{Path, PathBuf};
use std::time::Instant;

use scorekeeper::features::extract_potential_assists;
use scorekeeper::ingest::{load_dir, read_labels, ASSISTS_FILE};
use scorekeeper::synth::worked_play_fixture;
use scorekeeper::CourtZone;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/worked_play")
}

const FILES: [&str; 5] = ["moments.csv", "events.csv", "box.csv", "roster.csv", "assists.csv"];

#[test]
fn shipped_files_match_generator() {
    let tmp = tempfile::tempdir().unwrap();
    worked_play_fixture().write(tmp.path()).unwrap();
    if std::env::var_os("UPDATE_FIXTURES").is_some() {
        for f in FILES {
            std::fs::create_dir_all(fixture_dir()).unwrap();
            std::fs::copy(tmp.path().join(f), fixture_dir().join(f)).unwrap();
        }
    }
    for f in FILES {
        let shipped = std::fs::read(fixture_dir().join(f)).unwrap();
        let fresh = std::fs::read(tmp.path().join(f)).unwrap();
        assert!(shipped == fresh, "{f} differs from the generator");
    }
}

#[test]
fn covariates_match_caption() {
    let start = Instant::now();
    let games = load_dir(&fixture_dir()).unwrap();
    let labels = read_labels(&fixture_dir().join(ASSISTS_FILE)).unwrap();
    assert_eq!(games.len(), 1);
    let ex = extract_potential_assists(&games[0], &labels);
    assert!(ex.skipped.is_empty(), "{:?}", ex.skipped);
    assert_eq!(ex.records.len(), 1);
    let r = &ex.records[0];
    let close = |got: f64, want: f64| assert!((got - want).abs() <= 0.01, "{got} vs {want}");
    close(r.c1_possession_time, 1.82);
    assert_eq!(r.c2_dribbles, 2);
    close(r.c3_travel_distance, 20.41);
    close(r.c4_pass_distance, 11.09);
    close(r.c5_passer_defender_dist, 3.58);
    close(r.c6_shooter_defender_dist, 13.63);
    assert_eq!((r.c7_passer_zone, r.c8_shooter_zone), (CourtZone::Paint, CourtZone::Long2));
    assert!(r.label_recorded_assist);
    assert!(r.is_home);
    assert_eq!(r.passer.as_str(), "cpaul");
    assert_eq!(r.shooter.as_str(), "bgriffin");
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn anchored_travel_is_shorter_than_the_sampled_path() {
    let games = load_dir(&fixture_dir()).unwrap();
    let ex = extract_potential_assists(&games[0], &Default::default());
    let r = &ex.records[0];
    let reception = r.made_wall_time - 900 - 1820;
    let path = scorekeeper::features::polyline_length(
        &games[0],
        &r.shooter,
        reception,
        r.made_wall_time - 900,
    );
    assert!(r.c3_travel_distance <= path + 1e-9);
}
