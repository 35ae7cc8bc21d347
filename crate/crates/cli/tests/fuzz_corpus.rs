//! Replays the checked-in fuzz corpus through each entry point.

use std::fs;
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "{target}");
    out
}

#[test]
fn config_seeds_parse() {
    for (name, bytes) in seeds("config") {
        let text = String::from_utf8(bytes).unwrap();
        assert!(helmloc_cli::parse_config(&text).is_ok(), "{name}");
    }
}

#[test]
fn grid_seeds_decode_or_reject() {
    for (name, bytes) in seeds("grid") {
        match helmloc::grid::decode(&bytes) {
            Ok(u) => assert_eq!(helmloc::grid::encode(&u), bytes, "{name}"),
            Err(_) => assert_eq!(name, "truncated"),
        }
    }
}

#[test]
fn expr_seeds_parse() {
    for (name, bytes) in seeds("expr") {
        let src = String::from_utf8(bytes).unwrap();
        let e = helmloc::expr::Expr::parse(&src).unwrap_or_else(|err| panic!("{name}: {err}"));
        let _ = e.eval(1.5);
    }
}
