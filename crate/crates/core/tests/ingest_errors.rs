use std::fs;
use std::path::Path;

use scorekeeper::ingest::{load_dir, load_game};
use scorekeeper::synth::worked_play_fixture;
use scorekeeper::Error;

fn fixture_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    worked_play_fixture().write(dir.path()).unwrap();
    dir
}

fn edit(path: &Path, f: impl FnOnce(String) -> String) {
    let s = fs::read_to_string(path).unwrap();
    fs::write(path, f(s)).unwrap();
}

#[test]
fn empty_events_file_is_rejected() {
    let dir = fixture_copy();
    fs::write(dir.path().join("events.csv"), "game_id,wall_time_ms,kind,team_id,player_id\n").unwrap();
    let err = load_dir(dir.path()).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
}

#[test]
fn off_court_coordinate_names_file_and_line() {
    let dir = fixture_copy();
    edit(&dir.path().join("moments.csv"), |s| {
        s.replacen("player,LAC,cpaul,14.0,22.0", "player,LAC,cpaul,101.0,22.0", 1)
    });
    match load_dir(dir.path()).unwrap_err() {
        Error::Parse { path, line, .. } => {
            assert!(path.ends_with("moments.csv"));
            assert_eq!(line, 2);
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = fixture_copy();
    fs::remove_file(dir.path().join("roster.csv")).unwrap();
    assert!(matches!(load_dir(dir.path()), Err(Error::Io { .. })));
}

#[test]
fn unknown_event_kind_is_a_parse_error() {
    let dir = fixture_copy();
    edit(&dir.path().join("events.csv"), |s| s.replacen("DRIBBLE", "JUGGLE", 1));
    assert!(matches!(load_dir(dir.path()), Err(Error::Parse { .. })));
}

#[test]
fn single_game_loader_accepts_the_fixture() {
    let dir = fixture_copy();
    let p = |f: &str| dir.path().join(f);
    let g = load_game(&p("moments.csv"), &p("events.csv"), &p("box.csv"), &p("roster.csv")).unwrap();
    assert_eq!(g.home.as_str(), "LAC");
    assert_eq!(g.events.len(), 6);
}
