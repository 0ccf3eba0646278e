//! Cross-validation of the engine's Hom computation against an independent
//! intertwiner oracle built on explicit representation matrices, plus the
//! translate formula Ext^1(M,N) = dim Hom(N, tau M) and the Euler form
//! identity hom - ext = <dim M, dim N>.

mod support;

use std::time::Instant;

use support::run_hom_window;
use taverager::quiver::Family;

#[test]
fn hom_engine_matches_oracles_on_a3() {
    let start = Instant::now();
    run_hom_window(Family::A(3), -1, 2, 400);
    assert!(start.elapsed().as_secs() < 60, "took {:?}", start.elapsed());
}

#[test]
fn hom_engine_matches_oracles_on_d4() {
    let start = Instant::now();
    run_hom_window(Family::D(4), -1, 1, 400);
    assert!(start.elapsed().as_secs() < 60, "took {:?}", start.elapsed());
}
