use std::sync::Arc;

use permres::cover::{
    algorithm2, algorithm2_restarts, algorithm2_seeded, default_iterations, expected_cover_bound, is_cover,
};
use permres::pres::feasibility_matching;
use permres::pres::subsets::next_colex;
use permres::{build_group, FunctionTable, Group};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GROUPS: [&str; 10] =
    ["zn:2", "zn:3", "gf:4", "zn:4", "zn:5", "zn:6", "zn:7", "gf:8", "zn:8", "prod:(zn:4)x(zn:2)"];

fn corpus() -> Vec<FunctionTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    for spec in GROUPS {
        let g = Arc::new(build_group(spec).unwrap());
        let q = g.order();
        if q <= 4 {
            // every function
            let total = q.pow(q as u32);
            for code in 0..total {
                let images = (0..q).map(|i| code / q.pow(i as u32) % q).collect();
                out.push(FunctionTable::new(g.clone(), images).unwrap());
            }
        } else {
            for _ in 0..12 {
                out.push(FunctionTable::random(g.clone(), &mut rng));
            }
        }
    }
    out
}

fn small_sets(q: usize, max: usize) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    for k in 1..=max.min(q) {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            sets.push(combo.clone());
            if !next_colex(&mut combo, q) {
                break;
            }
        }
    }
    sets
}

#[test]
fn repair_agrees_with_matching_on_small_groups() {
    let mut checked = 0usize;
    let mut stalls = Vec::new();
    for f in corpus() {
        let q = f.order();
        for s in small_sets(q, 4) {
            if !is_cover(&f, &s).unwrap().is_cover {
                assert!(feasibility_matching(&f, &s).unwrap().is_none());
                continue;
            }
            checked += 1;
            let out = algorithm2(&f, &s, default_iterations(q)).unwrap();
            let exact = feasibility_matching(&f, &s).unwrap();
            match (&out.subtable, &exact) {
                (Some(a), _) => {
                    assert!(exact.is_some(), "repair found a subtable the matcher missed");
                    assert!(a.covers_all_rows());
                    assert!(a.value_set().iter().all(|v| s.contains(v)));
                    assert!(out.leftover.is_empty());
                }
                (None, Some(_)) => stalls.push((f.images().to_vec(), s.clone())),
                (None, None) => assert!(!out.leftover.is_empty()),
            }
        }
    }
    println!("covers checked: {checked}, heuristic stalls on feasible covers: {}", stalls.len());
    for (images, s) in stalls.iter().take(10) {
        println!("  stall: f = {images:?}, S = {s:?}");
    }
    assert!(checked > 0);
}

#[test]
fn seeded_restarts_are_sound() {
    let seeds: Vec<u64> = (0..4).collect();
    let mut feasible = 0usize;
    let mut found = 0usize;
    for f in corpus() {
        let q = f.order();
        for s in small_sets(q, 3) {
            if !is_cover(&f, &s).unwrap().is_cover {
                continue;
            }
            let exact = feasibility_matching(&f, &s).unwrap();
            feasible += usize::from(exact.is_some());
            let out = algorithm2_seeded(&f, &s, default_iterations(q), 11).unwrap();
            if let Some(a) = out.subtable {
                assert!(exact.is_some());
                assert!(a.covers_all_rows() && a.value_set().iter().all(|v| s.contains(v)));
                found += 1;
            }
            let restarted = algorithm2_restarts(&f, &s, default_iterations(q), &seeds).unwrap();
            assert_eq!(restarted.subtable.is_some(), exact.is_some());
        }
    }
    println!("feasible covers: {feasible}, solved by one seeded run: {found}");
}

#[test]
fn expectation_is_non_increasing_in_k() {
    for q in 2..=40usize {
        for v in 1..=q {
            let b = expected_cover_bound(q, v).unwrap();
            assert!(b.is_monotone(), "q = {q}, v = {v}");
        }
    }
}

#[test]
fn full_set_is_assigned_by_first_fit() {
    for spec in GROUPS {
        let g: Arc<Group> = Arc::new(build_group(spec).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = FunctionTable::random(g.clone(), &mut rng);
            let all: Vec<usize> = (0..g.order()).collect();
            let out = algorithm2(&f, &all, 0).unwrap();
            assert!(out.first_fit_complete && out.subtable.is_some());
        }
    }
}
