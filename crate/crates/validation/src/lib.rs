//! Holds the acceptance suite in `tests/acceptance.rs`: one PASS/FAIL line
//! per criterion. Run it with `cargo test -p helmloc-validation --test acceptance`.
