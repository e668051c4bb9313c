//! Exact computation of pres(f).
//!
//! pres(f) is the least `k` for which some `k`-set `S` admits an admissible
//! subtable with range `G` and values in `S`. For each `k` the solver walks
//! the `k`-subsets in colex order, drops those that are not covers and decides
//! the rest by capacitated matching (rows demand 1, column `c` holds
//! `#preim(f, c)` rows).

pub mod matching;
mod model;
mod oracle;
pub mod subsets;

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::function::FunctionTable;
use crate::subtable::{AdmissibleSubtable, SubtractionTable};

pub use model::{build_pres_ip, pres_assignment, verify_pres_solution, x_name, y_name, PresVerification};
pub use oracle::{pres_bruteforce_oracle, ORACLE_MAX_ORDER};

const CHUNK: u64 = 1024;

#[derive(Clone, Debug)]
pub struct PresOptions {
    /// Largest `k` tried; defaults to `q - V(f) + 1`.
    pub max_k: Option<usize>,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    /// Only consider value sets containing 0.
    pub symmetry: bool,
}

impl Default for PresOptions {
    fn default() -> Self {
        PresOptions { max_k: None, workers: 0, symmetry: true }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchStats {
    pub subsets_tested: u64,
    pub cover_rejections: u64,
    pub matchings_run: u64,
    #[serde(serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Clone, Debug)]
pub struct PresResult {
    pub value: usize,
    pub witness_s: Vec<Element>,
    pub witness_a: AdmissibleSubtable,
    pub witness_g: FunctionTable,
    pub stats: SearchStats,
}

/// Per-function data shared by all feasibility tests.
struct Prepared<'a> {
    f: &'a FunctionTable,
    columns: Vec<Element>,
    capacity: Vec<usize>,
    /// Bitset of rows `v + c` over `c in im(f)`: the rows where value `v` occurs.
    reach: Vec<Vec<u64>>,
    words: usize,
}

impl<'a> Prepared<'a> {
    fn new(f: &'a FunctionTable) -> Self {
        let q = f.order();
        let group = f.group();
        let columns = SubtractionTable::new(f).columns().to_vec();
        let capacity = columns.iter().map(|&c| f.preimage_count(c)).collect();
        let words = q.div_ceil(64);
        let reach = (0..q)
            .map(|v| {
                let mut bits = vec![0u64; words];
                for &c in &columns {
                    let r = group.add(v, c);
                    bits[r / 64] |= 1 << (r % 64);
                }
                bits
            })
            .collect();
        Prepared { f, columns, capacity, reach, words }
    }

    fn is_cover(&self, s: &[Element]) -> bool {
        let q = self.f.order();
        (0..self.words).all(|w| {
            let acc = s.iter().fold(0u64, |acc, &v| acc | self.reach[v][w]);
            let full = if w + 1 == self.words && !q.is_multiple_of(64) { (1u64 << (q % 64)) - 1 } else { u64::MAX };
            acc == full
        })
    }

    fn matching(&self, s: &[Element]) -> Option<AdmissibleSubtable> {
        let q = self.f.order();
        let group = self.f.group();
        let mut in_s = vec![false; q];
        s.iter().for_each(|&v| in_s[v] = true);
        let adj: Vec<Vec<usize>> = (0..q)
            .map(|r| (0..self.columns.len()).filter(|&j| in_s[group.sub(r, self.columns[j])]).collect())
            .collect();
        let m = matching::max_matching(&adj, &self.capacity);
        if !m.is_left_perfect() {
            return None;
        }
        let cells = m.assignment.iter().enumerate().map(|(r, j)| (r, self.columns[j.expect("perfect")])).collect();
        Some(AdmissibleSubtable::new(self.f, cells).expect("a row-perfect matching fills every column exactly"))
    }
}

/// An admissible subtable with range `G` and values in `s`, if one exists.
pub fn feasibility_matching(f: &FunctionTable, s: &[Element]) -> Result<Option<AdmissibleSubtable>> {
    if s.is_empty() {
        return Err(Error::Precondition("value set must be nonempty".into()));
    }
    for &v in s {
        f.group().check(v)?;
    }
    Ok(Prepared::new(f).matching(s))
}

struct Counters {
    tested: AtomicU64,
    rejected: AtomicU64,
    matched: AtomicU64,
}

fn search_level(
    prep: &Prepared<'_>,
    k: usize,
    symmetry: bool,
    counters: &Counters,
) -> Result<Option<(Vec<Element>, AdmissibleSubtable)>> {
    let q = prep.f.order();
    let (n, free) = if symmetry { (q - 1, k - 1) } else { (q, k) };
    let offset = usize::from(symmetry);
    let total = subsets::binomial(n, free)
        .filter(|&t| t <= u64::MAX as u128)
        .ok_or_else(|| Error::Precondition(format!("too many {k}-subsets to enumerate")))? as u64;
    let chunks = total.div_ceil(CHUNK);
    let found = (0..chunks).into_par_iter().find_map_first(|chunk| {
        let start = chunk * CHUNK;
        let len = CHUNK.min(total - start);
        let mut combo = subsets::unrank_colex(n, free, start as u128);
        let mut s = Vec::with_capacity(k);
        for step in 0..len {
            if step > 0 {
                subsets::next_colex(&mut combo, n);
            }
            s.clear();
            if symmetry {
                s.push(0);
            }
            s.extend(combo.iter().map(|&i| i + offset));
            counters.tested.fetch_add(1, Ordering::Relaxed);
            if !prep.is_cover(&s) {
                counters.rejected.fetch_add(1, Ordering::Relaxed);
                continue;
            }
            counters.matched.fetch_add(1, Ordering::Relaxed);
            if let Some(a) = prep.matching(&s) {
                return Some((s.clone(), a));
            }
        }
        None
    });
    Ok(found)
}

/// Exact pres(f). The witness set is the colex-first feasible `k`-set at the
/// least feasible `k`, independent of the worker count.
pub fn solve_pres_exact(f: &FunctionTable, opts: &PresOptions) -> Result<PresResult> {
    let started = Instant::now();
    let q = f.order();
    let u = f.uniformity();
    let max_k = opts.max_k.unwrap_or(q - f.image_size() + 1).min(q);
    if max_k < u {
        return Err(Error::Precondition(format!("max_k = {max_k} is below u(f) = {u}")));
    }
    let prep = Prepared::new(f);
    let counters = Counters { tested: AtomicU64::new(0), rejected: AtomicU64::new(0), matched: AtomicU64::new(0) };
    let run = || -> Result<Option<(usize, Vec<Element>, AdmissibleSubtable)>> {
        for k in u.max(1)..=max_k {
            if let Some((s, a)) = search_level(&prep, k, opts.symmetry, &counters)? {
                return Ok(Some((k, s, a)));
            }
        }
        Ok(None)
    };
    let outcome = if opts.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(run)?
    } else {
        run()?
    };
    let (value, witness_s, witness_a) = outcome.ok_or(Error::SearchExhausted { max_k, lower_bound: max_k + 1 })?;
    let witness_g = witness_a.realize(f, 0)?;
    Ok(PresResult {
        value,
        witness_s,
        witness_a,
        witness_g,
        stats: SearchStats {
            subsets_tested: counters.tested.into_inner(),
            cover_rejections: counters.rejected.into_inner(),
            matchings_run: counters.matched.into_inner(),
            elapsed: started.elapsed(),
        },
    })
}
