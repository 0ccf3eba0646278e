//! Helpers shared between the integration test targets: window construction,
//! the exhaustive truncation oracle, the intertwiner Hom oracle, and the
//! randomized tube setup sampler.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use taverager::aisle::{truncate, truncation_summand_checks, TStructure};
use taverager::engine::{cx, Engine};
use taverager::id::{IndecId, Obj};
use taverager::matrix::{q, QMat};
use taverager::quiver::{Family, Quiver, QuiverPreset};
use taverager::tube::{tube_ext_nonzero, tube_hom_nonzero, TubeObj};
use taverager::window::{ARWindow, Caps};

pub fn engine(fam: Family, lo: i32, hi: i32) -> Engine {
    let w = ARWindow::build(QuiverPreset::new(fam), lo, hi, Caps::default()).unwrap();
    Engine::new(w).unwrap()
}

pub fn degree_slice(eng: &Engine, d: i32) -> Vec<IndecId> {
    eng.window.indecs().iter().filter(|x| x.degree() == d).cloned().collect()
}

pub fn a2_stable_triple(eng: &Engine) -> Vec<TStructure> {
    let p2 = IndecId::finite(0, vec![1, 1]);
    let s2 = IndecId::finite(0, vec![0, 1]);
    let s1 = IndecId::finite(0, vec![1, 0]);
    vec![
        TStructure::from_generators(eng, "stab-p2", &[p2], true).unwrap(),
        TStructure::from_generators(eng, "stab-s2", &[s2], true).unwrap(),
        TStructure::from_generators(eng, "stab-s1", &[s1], true).unwrap(),
    ]
}

pub fn a2_suite(eng: &Engine) -> Vec<TStructure> {
    let mut suite = a2_stable_triple(eng);
    suite.push(TStructure::from_generators(eng, "std0", &degree_slice(eng, 0), false).unwrap());
    suite.push(TStructure::from_generators(eng, "std1", &degree_slice(eng, 1), false).unwrap());
    suite
}

pub fn a3_suite(eng: &Engine) -> Vec<TStructure> {
    vec![
        TStructure::from_generators(eng, "std0", &degree_slice(eng, 0), false).unwrap(),
        TStructure::from_generators(eng, "std1", &degree_slice(eng, 1), false).unwrap(),
        TStructure::from_generators(eng, "stab-s1", &[IndecId::finite(0, vec![1, 0, 0])], true)
            .unwrap(),
        TStructure::from_generators(eng, "proj", &[IndecId::finite(0, vec![1, 1, 1])], false)
            .unwrap(),
        TStructure::from_generators(eng, "mid", &[IndecId::finite(0, vec![0, 1, 0])], false)
            .unwrap(),
    ]
}

/// All multisets of up to `max_len` elements drawn from `pool`.
fn multisets(pool: &[IndecId], max_len: usize) -> Vec<Vec<IndecId>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![(Vec::<IndecId>::new(), 0usize)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (ms, from) in layer {
            for (i, v) in pool.iter().enumerate().skip(from) {
                let mut grown = ms.clone();
                grown.push(v.clone());
                out.push(grown.clone());
                next.push((grown, i));
            }
        }
        layer = next;
    }
    out
}

/// Every (x, y) pair found by brute force: x from the aisle, some map
/// alpha: x -> t over a small coefficient grid, cone(alpha) entirely in the
/// co-aisle.
pub fn oracle_pairs(
    eng: &Engine,
    t: &IndecId,
    ts: &TStructure,
    max_len: usize,
) -> Vec<(Obj, Obj)> {
    let t_cx = eng.cx_of(t).unwrap();
    let pool: Vec<IndecId> = ts
        .aisle
        .closure
        .iter()
        .filter(|v| eng.hom_dim(v, t).unwrap() > 0)
        .cloned()
        .collect();
    let mut found = Vec::new();
    for ms in multisets(&pool, max_len) {
        if ms.is_empty() {
            if ts.in_coaisle(t) {
                found.push((Obj::zero(), Obj::one(t.clone())));
            }
            continue;
        }
        let x = Obj::from_vec(ms);
        let x_cx = eng.cx_of_obj(&x).unwrap();
        let basis = eng.hom_basis(&x_cx, &t_cx);
        if basis.is_empty() || basis.len() > 6 {
            continue;
        }
        // Coefficient grid {-1, 0, 1} per basis element, skipping zero.
        let mut hit = None;
        'combos: for mask in 1..3usize.pow(basis.len() as u32) {
            let mut alpha = cx::zero_map(&x_cx, &t_cx);
            let mut rest = mask;
            for b in &basis {
                let c = rest % 3;
                rest /= 3;
                match c {
                    1 => alpha = cx::add(&alpha, b),
                    2 => alpha = cx::add(&alpha, &cx::scale(b, &q(-1))),
                    _ => {}
                }
            }
            let (cone, _, _) = cx::cone(&alpha);
            let y = eng.decompose(&cone).unwrap();
            if ts.obj_in_coaisle(&y) {
                hit = Some((x.clone(), y));
                break 'combos;
            }
        }
        if let Some(pair) = hit {
            found.push(pair);
        }
    }
    found
}

/// Truncate every interior indecomposable against every t-structure in the
/// suite, run the summand checks, and compare against the exhaustive oracle.
pub fn run_truncation_suite(eng: &Engine, suite: &[TStructure]) {
    for ts in suite {
        for t in eng.window.indecs() {
            if !eng.window.interior_degrees().contains(&t.degree()) {
                continue;
            }
            let tri = truncate(eng, &Obj::one(t.clone()), ts).unwrap();
            assert!(ts.obj_in_aisle(&tri.x), "{t} / {}: x outside aisle", ts.name);
            assert!(ts.obj_in_coaisle(&tri.y), "{t} / {}: y outside co-aisle", ts.name);
            truncation_summand_checks(eng, &tri)
                .unwrap_or_else(|e| panic!("{t} / {}: {e}", ts.name));
            let max_len = tri.x.len().max(3);
            let pairs = oracle_pairs(eng, t, ts, max_len);
            assert!(
                !pairs.is_empty(),
                "{t} / {}: oracle found no truncation candidate",
                ts.name
            );
            for (x, y) in pairs {
                assert_eq!(x, tri.x, "{t} / {}: aisle parts differ", ts.name);
                assert_eq!(y, tri.y, "{t} / {}: co-aisle parts differ", ts.name);
            }
        }
    }
}

pub struct TestRep {
    pub dims: Vec<usize>,
    /// Per arrow (s, t): matrix of shape dims[t] x dims[s].
    pub maps: Vec<QMat>,
}

/// Explicit matrices for the indecomposable with the given dimension vector.
/// Thin roots get identity maps on arrows inside their support; the one fat
/// D4 root needs three lines in general position in the middle plane.
pub fn build_rep(quiv: &Quiver, dimvec: &[u32]) -> TestRep {
    let dims: Vec<usize> = dimvec.iter().map(|&d| d as usize).collect();
    let mut maps = Vec::new();
    if dims.iter().all(|&d| d <= 1) {
        for &(s, t) in &quiv.arrows {
            let mut m = QMat::zero(dims[t], dims[s]);
            if dims[s] == 1 && dims[t] == 1 {
                *m.at_mut(0, 0) = q(1);
            }
            maps.push(m);
        }
        return TestRep { dims, maps };
    }
    assert_eq!(
        (quiv.family, dimvec),
        (Family::D(4), &[1, 1, 2, 1][..]),
        "no explicit matrices for this dimension vector"
    );
    // Arrows of D4 in default orientation: 2 -> 0, 2 -> 1, 3 -> 2.
    for &(s, t) in &quiv.arrows {
        let mut m = QMat::zero(dims[t], dims[s]);
        match (s, t) {
            (2, 0) => *m.at_mut(0, 0) = q(1),
            (2, 1) => *m.at_mut(0, 1) = q(1),
            (3, 2) => {
                *m.at_mut(0, 0) = q(1);
                *m.at_mut(1, 0) = q(1);
            }
            other => panic!("unexpected arrow {other:?}"),
        }
        maps.push(m);
    }
    TestRep { dims, maps }
}

/// Constraint matrix of the intertwiner equations N_a f_s = f_t M_a; its
/// kernel is Hom(M, N) and its cokernel is Ext^1(M, N).
pub fn constraint_matrix(quiv: &Quiver, m: &TestRep, n: &TestRep) -> QMat {
    let mut offset = vec![0usize; quiv.n + 1];
    for v in 0..quiv.n {
        offset[v + 1] = offset[v] + m.dims[v] * n.dims[v];
    }
    let unknowns = offset[quiv.n];
    let rows: usize = quiv.arrows.iter().map(|&(s, t)| m.dims[s] * n.dims[t]).sum();
    let mut c = QMat::zero(rows, unknowns);
    let mut row = 0;
    for (aix, &(s, t)) in quiv.arrows.iter().enumerate() {
        let ma = &m.maps[aix];
        let na = &n.maps[aix];
        for i in 0..n.dims[t] {
            for j in 0..m.dims[s] {
                // (N_a f_s)[i,j]: f_s entry (k, j) weighted by N_a[i, k].
                for k in 0..n.dims[s] {
                    let col = offset[s] + k * m.dims[s] + j;
                    *c.at_mut(row, col) = c.at(row, col).clone() + na.at(i, k).clone();
                }
                // (f_t M_a)[i,j]: f_t entry (i, l) weighted by M_a[l, j].
                for l in 0..m.dims[t] {
                    let col = offset[t] + i * m.dims[t] + l;
                    *c.at_mut(row, col) = c.at(row, col).clone() - ma.at(l, j).clone();
                }
                row += 1;
            }
        }
    }
    c
}

pub fn oracle_hom(quiv: &Quiver, m: &TestRep, n: &TestRep) -> usize {
    let c = constraint_matrix(quiv, m, n);
    c.cols - c.rank()
}

pub fn oracle_ext(quiv: &Quiver, m: &TestRep, n: &TestRep) -> usize {
    let c = constraint_matrix(quiv, m, n);
    c.rows - c.rank()
}

pub fn euler(quiv: &Quiver, d: &[u32], e: &[u32]) -> i64 {
    let mut v: i64 = d.iter().zip(e).map(|(&a, &b)| a as i64 * b as i64).sum();
    for &(s, t) in &quiv.arrows {
        v -= d[s] as i64 * e[t] as i64;
    }
    v
}

pub fn dimvec_of(id: &IndecId) -> &[u32] {
    match id {
        IndecId::FiniteType { dimvec, .. } => dimvec,
        _ => panic!("finite type windows only"),
    }
}

/// Exhaustive Hom cross-check over a window: engine vs intertwiner oracle,
/// Euler form, and the translate formula. Returns the number of pairs.
pub fn run_hom_window(fam: Family, lo: i32, hi: i32, min_pairs: usize) -> usize {
    let eng = engine(fam, lo, hi);
    let quiv = QuiverPreset::new(fam).quiver().unwrap();
    let ids: Vec<IndecId> = eng.window.indecs().to_vec();
    let mut pairs = 0usize;
    for a in &ids {
        let ra = build_rep(&quiv, dimvec_of(a));
        for b in &ids {
            let rb = build_rep(&quiv, dimvec_of(b));
            let expected = match b.degree() - a.degree() {
                0 => oracle_hom(&quiv, &ra, &rb),
                1 => oracle_ext(&quiv, &ra, &rb),
                _ => 0,
            };
            assert_eq!(
                eng.hom_dim(a, b).unwrap(),
                expected,
                "hom({a}, {b}) disagrees with the intertwiner oracle"
            );
            pairs += 1;

            if a.degree() == b.degree() {
                // Euler form: hom - ext in matching degrees.
                let h = oracle_hom(&quiv, &ra, &rb) as i64;
                let e = oracle_ext(&quiv, &ra, &rb) as i64;
                assert_eq!(h - e, euler(&quiv, dimvec_of(a), dimvec_of(b)), "euler({a}, {b})");

                // Translate formula, whenever both sides stay in the window.
                if let Ok(ta) = eng.window.tau(a) {
                    let sb = b.shifted(1);
                    if eng.window.contains(&sb) {
                        assert_eq!(
                            eng.hom_dim(a, &sb).unwrap(),
                            eng.hom_dim(b, &ta).unwrap(),
                            "translate formula at ({a}, {b})"
                        );
                    }
                    assert_eq!(
                        oracle_ext(&quiv, &ra, &rb),
                        eng.hom_dim(b, &ta).unwrap(),
                        "oracle ext vs translate hom at ({a}, {b})"
                    );
                }
            }
        }
    }
    assert!(pairs >= min_pairs, "only {pairs} pairs checked");
    pairs
}

pub fn tube_obj(rho: usize, socle: i64, length: usize) -> TubeObj {
    TubeObj::new(rho, socle, length, 0)
}

pub fn coray_dist(t: &TubeObj, r: &TubeObj) -> usize {
    (r.top() as i64 - t.top() as i64).rem_euclid(t.rho as i64) as usize
}

pub fn ray_dist(t: &TubeObj, r: &TubeObj) -> usize {
    (r.socle as i64 - t.socle as i64).rem_euclid(t.rho as i64) as usize
}

/// Pick a strictly-descending-distance, pairwise hom-orthogonal sublist of
/// the candidates; the distance is measured by `dist` relative to `t`.
pub fn greedy_chain(
    rng: &mut ChaCha8Rng,
    t: &TubeObj,
    mut candidates: Vec<TubeObj>,
    dist: fn(&TubeObj, &TubeObj) -> usize,
) -> Vec<TubeObj> {
    candidates.sort_by_key(|r| std::cmp::Reverse(dist(t, r)));
    let mut out: Vec<TubeObj> = Vec::new();
    for c in candidates {
        if !rng.gen_bool(0.6) {
            continue;
        }
        if let Some(last) = out.last() {
            if dist(t, &c) >= dist(t, last) {
                continue;
            }
        }
        let clash = out
            .iter()
            .any(|o| tube_hom_nonzero(o, &c).unwrap() || tube_hom_nonzero(&c, o).unwrap());
        if !clash {
            out.push(c);
        }
    }
    out
}

/// A sampled instance is a valid truncation setup when the prospective
/// summands are jointly Hom-orthogonal, the plain summands map to t, and a
/// non-zero map from the longest shifted summand to t factors through a plain
/// summand (it factors through the truncation in a genuine triangle).
pub fn valid_setup(t: &TubeObj, rprime: &[TubeObj], r: &[TubeObj]) -> bool {
    if taverager::tube::validate_nohom(rprime, r).is_err() {
        return false;
    }
    if !r.iter().all(|s| tube_hom_nonzero(s, t).unwrap()) {
        return false;
    }
    if let Some(r1) = rprime.first() {
        if tube_hom_nonzero(r1, t).unwrap() {
            return r
                .iter()
                .any(|ri| tube_hom_nonzero(r1, ri).unwrap() && tube_hom_nonzero(ri, t).unwrap());
        }
    }
    true
}

/// Random t-structure from a nonempty generator subset of the window.
pub fn random_ts(eng: &Engine, rng: &mut ChaCha8Rng, name: &str) -> TStructure {
    let ids = eng.window.indecs();
    loop {
        let gens: Vec<IndecId> = ids.iter().filter(|_| rng.gen_bool(0.25)).cloned().collect();
        if gens.is_empty() {
            continue;
        }
        return TStructure::from_generators(eng, name, &gens, false).unwrap();
    }
}

/// y after `i` steps, extending a terminated run by its constant tail.
pub fn y_ext(trace: &taverager::averaging::RunTrace, i: usize) -> Option<Obj> {
    use taverager::averaging::RunStatus;
    match trace.y_at(i) {
        Some(y) => Some(y.clone()),
        None => match trace.status {
            RunStatus::Terminated(_) => Some(trace.steps.last().unwrap().y.clone()),
            _ => None,
        },
    }
}

/// Additivity of the refined run in its input on random A3 systems; returns
/// the number of steps compared.
pub fn run_additivity(seed: u64, trials: usize) -> usize {
    use taverager::averaging::{default_budget, refined_run};
    let eng = engine(Family::A(3), -1, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<IndecId> = eng
        .window
        .indecs()
        .iter()
        .filter(|x| eng.window.interior_degrees().contains(&x.degree()))
        .cloned()
        .collect();
    let mut compared = 0usize;
    for trial in 0..trials {
        let order = vec![
            random_ts(&eng, &mut rng, &format!("r{trial}a")),
            random_ts(&eng, &mut rng, &format!("r{trial}b")),
        ];
        let budget = default_budget(&eng, order.len());
        let a = ids[rng.gen_range(0..ids.len())].clone();
        let b = ids[rng.gen_range(0..ids.len())].clone();
        let sum = Obj::one(a.clone()).plus(&Obj::one(b.clone()));
        let tr_a = refined_run(&eng, &Obj::one(a.clone()), &order, budget).unwrap();
        let tr_b = refined_run(&eng, &Obj::one(b.clone()), &order, budget).unwrap();
        let tr_sum = refined_run(&eng, &sum, &order, budget).unwrap();
        let steps = tr_sum.steps.len().max(tr_a.steps.len()).max(tr_b.steps.len());
        for i in 1..=steps {
            let (Some(ya), Some(yb), Some(ys)) =
                (y_ext(&tr_a, i), y_ext(&tr_b, i), y_ext(&tr_sum, i))
            else {
                break;
            };
            assert_eq!(
                ys,
                ya.plus(&yb),
                "step {i} of the run on {a} + {b} is not the sum of the runs"
            );
            compared += 1;
        }
    }
    compared
}

/// Shift lemma on the stable triple over A2; returns verified instances.
pub fn run_shift_lemma_stable() -> usize {
    use taverager::averaging::check_shift_lemma;
    let eng = engine(Family::A(2), -1, 2);
    let order = a2_stable_triple(&eng);
    let d = order.len();
    let mut verified = 0usize;
    for id in eng.window.indecs() {
        if !eng.window.interior_degrees().contains(&id.degree()) {
            continue;
        }
        let t = Obj::one(id.clone());
        for k in [1, 1 + d, 1 + 2 * d] {
            for n in 0..=4usize {
                match check_shift_lemma(&eng, &t, &order, k, n) {
                    Ok(ok) => {
                        assert!(ok, "shift lemma fails at t={id}, k={k}, n={n}");
                        verified += 1;
                    }
                    Err(taverager::Error::BudgetExhausted(_)) => {}
                    Err(e) => panic!("shift lemma errored at t={id}, k={k}, n={n}: {e}"),
                }
            }
        }
    }
    verified
}

/// Shift lemma on random A3 systems; returns verified instances.
pub fn run_shift_lemma_random(seed: u64, trials: usize) -> usize {
    use taverager::averaging::check_shift_lemma;
    let eng = engine(Family::A(3), -1, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<IndecId> = eng
        .window
        .indecs()
        .iter()
        .filter(|x| eng.window.interior_degrees().contains(&x.degree()))
        .cloned()
        .collect();
    let mut verified = 0usize;
    for trial in 0..trials {
        let d = rng.gen_range(2..=3usize);
        let order: Vec<TStructure> =
            (0..d).map(|j| random_ts(&eng, &mut rng, &format!("s{trial}-{j}"))).collect();
        let t = Obj::one(ids[rng.gen_range(0..ids.len())].clone());
        let k = 1 + d * rng.gen_range(0..=2usize);
        for n in 0..=4usize {
            match check_shift_lemma(&eng, &t, &order, k, n) {
                Ok(ok) => {
                    assert!(ok, "shift lemma fails on trial {trial} at k={k}, n={n}");
                    verified += 1;
                }
                Err(taverager::Error::BudgetExhausted(_)) => {}
                Err(e) => panic!("shift lemma errored on trial {trial}: {e}"),
            }
        }
    }
    verified
}

/// Sample one randomized candidate setup; None when the sample fails the
/// validity conditions.
pub fn sample_setup(rng: &mut ChaCha8Rng) -> Option<(TubeObj, Vec<TubeObj>, Vec<TubeObj>)> {
    let rho = rng.gen_range(2..=7usize);
    let t = tube_obj(rho, rng.gen_range(1..=rho) as i64, rng.gen_range(1..=3 * rho));
    let shifted_candidates: Vec<TubeObj> = (1..=rho)
        .flat_map(|s| (1..rho).map(move |l| (s, l)))
        .map(|(s, l)| tube_obj(rho, s as i64, l))
        .filter(|r| tube_ext_nonzero(r, &t).unwrap())
        .collect();
    let rprime = greedy_chain(rng, &t, shifted_candidates, coray_dist);
    let plain_candidates: Vec<TubeObj> = (1..=rho)
        .flat_map(|s| (1..rho).map(move |l| (s, l)))
        .map(|(s, l)| tube_obj(rho, s as i64, l))
        .filter(|s| tube_hom_nonzero(s, &t).unwrap())
        .collect();
    let r = greedy_chain(rng, &t, plain_candidates, ray_dist);
    if valid_setup(&t, &rprime, &r) {
        Some((t, rprime, r))
    } else {
        None
    }
}
