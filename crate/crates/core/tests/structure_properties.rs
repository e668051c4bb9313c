use std::collections::BTreeSet;
use std::sync::Arc;

use num::ToPrimitive;
use permres::subtable::{correspondence_count, AdmissibleSubtable};
use permres::{build_group, FunctionTable, Group};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: [&str; 14] = [
    "gf:2", "gf:3", "gf:4", "gf:5", "gf:7", "gf:8", "gf:9", "gf:16", "gf:25", "gf:27", "gf:32", "gf:49", "gf:61",
    "gf:64",
];

fn group(spec: &str) -> Arc<Group> {
    Arc::new(build_group(spec).unwrap())
}

#[test]
fn constructed_groups_satisfy_the_axioms() {
    let specs = FIELDS.iter().copied().chain(["zn:1", "zn:12", "zn:64", "prod:(zn:4)x(zn:2)", "prod:(zn:8)x(gf:8)"]);
    for spec in specs {
        let g = group(spec);
        let q = g.order();
        assert!(q <= 64);
        for a in 0..q {
            assert_eq!(g.add(a, 0), a, "{spec}");
            assert_eq!(g.add(0, a), a, "{spec}");
            assert_eq!(g.add(a, g.neg(a)), 0, "{spec}");
            for b in 0..q {
                for c in 0..q {
                    assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)), "{spec}");
                }
            }
        }
    }
}

#[test]
fn fields_are_distributive() {
    for spec in FIELDS {
        let g = group(spec);
        let field = g.field().unwrap();
        let q = field.order();
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    assert_eq!(field.mul(a, field.add(b, c)), field.add(field.mul(a, b), field.mul(a, c)), "{spec}");
                }
            }
        }
    }
}

#[test]
fn field_addition_is_coordinatewise() {
    for spec in FIELDS {
        let g = group(spec);
        let field = g.field().unwrap();
        let p = field.characteristic();
        for a in 0..field.order() {
            for b in 0..field.order() {
                let (ca, cb) = (field.coefficients(a), field.coefficients(b));
                let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                assert_eq!(g.add(a, b), field.from_coefficients(&sum), "{spec}");
            }
        }
    }
}

/// A random `g` with `g + f` a permutation: pick the permutation first.
fn random_realized(f: &FunctionTable, rng: &mut ChaCha8Rng) -> FunctionTable {
    let g = f.group();
    let mut perm: Vec<usize> = (0..f.order()).collect();
    perm.shuffle(rng);
    FunctionTable::from_fn(g.clone(), |x| g.sub(perm[x], f.eval(x))).unwrap()
}

#[test]
fn realizations_enumerate_the_correspondence_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for spec in ["zn:4", "zn:5", "zn:6", "gf:8", "gf:9", "prod:(zn:4)x(zn:2)"] {
        let g = group(spec);
        for _ in 0..6 {
            let f = FunctionTable::random(g.clone(), &mut rng);
            let a = AdmissibleSubtable::from_realization(&f, &random_realized(&f, &mut rng)).unwrap();
            assert!(a.covers_all_rows());
            let count = correspondence_count(&f).to_u128().unwrap();
            let mut seen = BTreeSet::new();
            for sel in 0..count {
                let h = a.realize(&f, sel).unwrap();
                assert!(h.add_pointwise(&f).unwrap().is_permutation());
                assert_eq!(h.image_size(), a.value_set().len());
                assert_eq!(AdmissibleSubtable::from_realization(&f, &h).unwrap(), a);
                seen.insert(h.images().to_vec());
            }
            assert_eq!(seen.len() as u128, count, "{spec}");
        }
    }
}
