//! The fixture corpus on disk. `PARCAUSE_BLESS=1` rewrites the files.

use std::path::PathBuf;

use parcause::fixtures::corpus;
use parcause::Budget;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn corpus_files_match_and_round_trip() {
    let b = Budget::default();
    let bless = std::env::var("PARCAUSE_BLESS").is_ok_and(|v| v == "1");
    let dir = dir();
    if bless {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (name, fx) in corpus().unwrap() {
        let text = fx.to_json();
        let path = dir.join(format!("{name}.json"));
        if bless {
            std::fs::write(&path, &text).unwrap();
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(on_disk, text, "{name} is stale; rerun with PARCAUSE_BLESS=1");
        assert_eq!(fx.reserialise(&on_disk, &b).unwrap(), on_disk, "{name} does not round-trip");
    }
}
