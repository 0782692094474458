use std::collections::BTreeSet;
use std::path::Path;

use skoo::schema::{schema_file, verify_schema_dir, SCHEMA_FILES};
use skoo::turtle::parse_turtle;

fn schema_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/schema"))
}

#[test]
fn embedded_copies_match_the_files_on_disk() {
    verify_schema_dir(schema_dir()).unwrap();
    for f in SCHEMA_FILES {
        let on_disk = std::fs::read_to_string(schema_dir().join(f.path)).unwrap();
        assert_eq!(on_disk, f.contents, "{}", f.path);
    }
}

fn files_under(dir: &Path, rel: &str, out: &mut BTreeSet<String>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name().into_string().unwrap();
        let rel = if rel.is_empty() {
            name
        } else {
            format!("{rel}/{name}")
        };
        if entry.file_type().unwrap().is_dir() {
            files_under(&entry.path(), &rel, out);
        } else {
            out.insert(rel);
        }
    }
}

#[test]
fn every_shipped_file_is_embedded() {
    let mut on_disk = BTreeSet::new();
    files_under(schema_dir(), "", &mut on_disk);
    let embedded: BTreeSet<String> = SCHEMA_FILES.iter().map(|f| f.path.to_owned()).collect();
    assert_eq!(on_disk, embedded);
    assert!(schema_file("fixtures/wille-ch3.ttl").is_some());
    assert!(schema_file("missing.ttl").is_none());
}

#[test]
fn every_turtle_file_parses_without_diagnostics() {
    for f in SCHEMA_FILES.iter().filter(|f| f.path.ends_with(".ttl")) {
        let (_, diags) = skoo::turtle::parse_turtle_lenient(f.contents);
        assert!(diags.is_empty(), "{}: {diags:?}", f.path);
        parse_turtle(f.contents).unwrap();
    }
}

#[test]
fn tampered_directory_is_refused() {
    let dir = std::env::temp_dir().join(format!("skoo-schema-{}", std::process::id()));
    for f in SCHEMA_FILES {
        let path = dir.join(f.path);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, f.contents).unwrap();
    }
    verify_schema_dir(&dir).unwrap();
    std::fs::write(dir.join("skoo.ttl"), "# edited\n").unwrap();
    let err = verify_schema_dir(&dir).unwrap_err();
    assert!(err.to_string().contains("skoo.ttl"));
    std::fs::remove_dir_all(&dir).unwrap();
}
