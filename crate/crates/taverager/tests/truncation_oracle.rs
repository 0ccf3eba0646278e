//! Cross-validation of `truncate` against an exhaustive search: enumerate
//! candidate pairs (x, y) with x a small multiset from the aisle, search for
//! a map x -> t whose cone lies in the co-aisle, and compare every hit with
//! the engine's truncation triangle. Uniqueness of truncation triangles means
//! all hits must agree.

mod support;

use std::time::Instant;

use support::{a2_suite, a3_suite, engine, run_truncation_suite};
use taverager::quiver::Family;

#[test]
fn truncation_matches_exhaustive_search_on_a2() {
    let eng = engine(Family::A(2), -1, 2);
    run_truncation_suite(&eng, &a2_suite(&eng));
}

#[test]
fn truncation_matches_exhaustive_search_on_a3() {
    let start = Instant::now();
    let eng = engine(Family::A(3), -1, 1);
    run_truncation_suite(&eng, &a3_suite(&eng));
    assert!(start.elapsed().as_secs() < 30, "took {:?}", start.elapsed());
}
