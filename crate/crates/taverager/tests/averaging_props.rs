//! Structural properties of the iterated truncation runs: additivity in the
//! input, the shift lemma for step counts congruent to one modulo the period,
//! independence of the averaged pair from the listed order, and the summand
//! conditions on every truncation the runs are built from.

mod support;

use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use support::{
    a2_stable_triple, engine, random_ts, run_additivity, run_shift_lemma_random,
    run_shift_lemma_stable,
};
use taverager::aisle::{truncate, truncation_summand_checks, TStructure};
use taverager::averaging::average_aisles;
use taverager::engine::Engine;
use taverager::id::Obj;
use taverager::quiver::Family;

#[test]
fn refined_run_is_additive_in_the_input() {
    let start = Instant::now();
    let compared = run_additivity(0xadd, 20);
    assert!(compared >= 40, "only {compared} steps compared");
    assert!(start.elapsed().as_secs() < 30, "took {:?}", start.elapsed());
}

#[test]
fn shift_lemma_holds_on_the_stable_triple() {
    let verified = run_shift_lemma_stable();
    assert!(verified >= 30, "only {verified} instances verified");
}

#[test]
fn shift_lemma_holds_on_random_systems() {
    let start = Instant::now();
    let verified = run_shift_lemma_random(0x5417, 20);
    assert!(verified >= 50, "only {verified} instances verified");
    assert!(start.elapsed().as_secs() < 30, "took {:?}", start.elapsed());
}

#[test]
fn averaged_pair_does_not_depend_on_the_listed_order() {
    let eng = engine(Family::A(3), -1, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d8);
    for trial in 0..10 {
        let mut order: Vec<TStructure> = (0..3)
            .map(|j| random_ts(&eng, &mut rng, &format!("o{trial}-{j}")))
            .collect();
        let (avg, rep) = average_aisles(&eng, &order).unwrap();
        order.reverse();
        order.swap(0, 1);
        let (avg2, rep2) = average_aisles(&eng, &order).unwrap();
        assert_eq!(avg.aisle.closure, avg2.aisle.closure, "trial {trial}: aisles differ");
        assert_eq!(avg.coaisle, avg2.coaisle, "trial {trial}: co-aisles differ");
        assert_eq!(rep.validated, rep2.validated, "trial {trial}: verdicts differ");
    }
}

#[test]
fn every_truncation_in_the_suites_passes_the_summand_checks() {
    let a2 = engine(Family::A(2), -1, 2);
    let a3 = engine(Family::A(3), -1, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca);
    let mut suites: Vec<(&Engine, Vec<TStructure>)> = vec![(&a2, a2_stable_triple(&a2))];
    let random: Vec<TStructure> =
        (0..6).map(|j| random_ts(&a3, &mut rng, &format!("t{j}"))).collect();
    suites.push((&a3, random));
    let mut checked = 0usize;
    for (eng, suite) in &suites {
        for ts in suite {
            for id in eng.window.indecs() {
                if !eng.window.interior_degrees().contains(&id.degree()) {
                    continue;
                }
                let tri = truncate(eng, &Obj::one(id.clone()), ts).unwrap();
                truncation_summand_checks(eng, &tri)
                    .unwrap_or_else(|e| panic!("{id} / {}: {e}", ts.name));
                checked += 1;
            }
        }
    }
    assert!(checked >= 50, "only {checked} truncations checked");
}
