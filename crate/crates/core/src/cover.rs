//! Covers of `G` associated with `f`, the expected-coverage bound and the
//! assignment-repair search for a range-`G` subtable inside `M_S`.

use std::collections::VecDeque;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::function::FunctionTable;
use crate::subtable::{AdmissibleSubtable, SubtractionTable};

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub s: Vec<Element>,
    pub is_cover: bool,
    pub uncovered_rows: Vec<Element>,
    /// Cells of row `r` whose value lies in `S`.
    pub rows_hit: Vec<usize>,
}

pub fn is_cover(f: &FunctionTable, s: &[Element]) -> Result<CoverReport> {
    let q = f.order();
    let group = f.group();
    let mut in_s = vec![false; q];
    for &v in s {
        group.check(v)?;
        in_s[v] = true;
    }
    let image = f.image();
    let rows_hit: Vec<usize> = (0..q).map(|r| image.iter().filter(|&&c| in_s[group.sub(r, c)]).count()).collect();
    let uncovered_rows: Vec<Element> = (0..q).filter(|&r| rows_hit[r] == 0).collect();
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(CoverReport { s, is_cover: uncovered_rows.is_empty(), uncovered_rows, rows_hit })
}

#[derive(Clone, Debug)]
pub struct CoverBound {
    pub q: usize,
    pub v: usize,
    /// `values[k - 1]` is `q * sum_{i<=k} (-1)^i C(k,i) C(v,i) / C(q,i)`.
    pub values: Vec<BigRational>,
    /// Least `k` whose value is below 1.
    pub min_k: Option<usize>,
}

impl CoverBound {
    pub fn value(&self, k: usize) -> &BigRational {
        &self.values[k - 1]
    }

    /// Whether the values never increase with `k`.
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact values for `k = 1..=k_max` (all `k <= q` when `None`).
pub fn expected_cover_values(q: usize, v: usize, k_max: Option<usize>) -> Result<CoverBound> {
    if v == 0 || v > q {
        return Err(Error::Precondition(format!("need 1 <= v <= q, got v = {v}, q = {q}")));
    }
    let k_max = k_max.unwrap_or(q).min(q);
    // C(v,i)/C(q,i) vanishes for i > v
    let ratios: Vec<BigRational> =
        (0..=v.min(k_max)).map(|i| BigRational::new(binomial_big(v, i), binomial_big(q, i))).collect();
    let qq = BigRational::from_integer(BigInt::from(q));
    let mut values = Vec::with_capacity(k_max);
    let mut min_k = None;
    let one = BigRational::one();
    for k in 1..=k_max {
        let mut sum = BigRational::zero();
        let mut c = BigInt::one();
        for (i, ratio) in ratios.iter().enumerate().take(k + 1) {
            if i > 0 {
                c = c * BigInt::from(k + 1 - i) / BigInt::from(i);
            }
            let term = ratio * BigRational::from_integer(c.clone());
            if i % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let value = &qq * sum;
        if min_k.is_none() && value < one {
            min_k = Some(k);
        }
        values.push(value);
    }
    Ok(CoverBound { q, v, values, min_k })
}

pub fn expected_cover_bound(q: usize, v: usize) -> Result<CoverBound> {
    expected_cover_values(q, v, None)
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn default_iterations(q: usize) -> usize {
    10 * q * q
}

#[derive(Clone, Debug)]
pub struct RepairOutcome {
    pub subtable: Option<AdmissibleSubtable>,
    /// Rows still unassigned when the search stopped.
    pub leftover: Vec<Element>,
    pub iterations: usize,
    /// First-fit alone assigned every row.
    pub first_fit_complete: bool,
    /// Seed of the run that produced this outcome, if randomized.
    pub seed: Option<u64>,
}

fn repair(f: &FunctionTable, s: &[Element], n_iter: usize, mut rng: Option<ChaCha8Rng>) -> Result<RepairOutcome> {
    let report = is_cover(f, s)?;
    if !report.is_cover {
        return Err(Error::NotACover(report.uncovered_rows));
    }
    let q = f.order();
    let group = f.group();
    let columns = SubtractionTable::new(f).columns().to_vec();
    let capacity: Vec<usize> = columns.iter().map(|&c| f.preimage_count(c)).collect();
    let mut in_s = vec![false; q];
    s.iter().for_each(|&v| in_s[v] = true);
    // Q_r as positions into `columns`
    let options: Vec<Vec<usize>> =
        (0..q).map(|r| (0..columns.len()).filter(|&j| in_s[group.sub(r, columns[j])]).collect()).collect();
    let mut assigned: Vec<VecDeque<Element>> = vec![VecDeque::new(); columns.len()];

    let mut queue = VecDeque::new();
    for r in 0..q {
        match options[r].iter().find(|&&j| assigned[j].len() < capacity[j]) {
            Some(&j) => assigned[j].push_back(r),
            None => queue.push_back(r),
        }
    }
    let first_fit_complete = queue.is_empty();

    let mut cursor = vec![0usize; q];
    let mut iterations = 0;
    while iterations < n_iter {
        let Some(r) = queue.pop_front() else { break };
        iterations += 1;
        let j = match rng.as_mut() {
            Some(rng) => *options[r].choose(rng).expect("covered row"),
            None => {
                let open = options[r].iter().filter(|&&j| assigned[j].len() < capacity[j]).max_by(|&&a, &&b| {
                    (capacity[a] - assigned[a].len())
                        .cmp(&(capacity[b] - assigned[b].len()))
                        .then_with(|| columns[b].cmp(&columns[a]))
                });
                match open {
                    Some(&j) => j,
                    None => {
                        let j = options[r][cursor[r] % options[r].len()];
                        cursor[r] += 1;
                        j
                    }
                }
            }
        };
        assigned[j].push_back(r);
        if assigned[j].len() > capacity[j] {
            let evicted = match rng.as_mut() {
                Some(rng) => {
                    let pick = rng.gen_range(0..assigned[j].len() - 1);
                    assigned[j].remove(pick).expect("in range")
                }
                None => assigned[j].pop_front().expect("overfull column"),
            };
            queue.push_back(evicted);
        }
    }
    let subtable = if queue.is_empty() {
        let cells = assigned.iter().zip(&columns).flat_map(|(rows, &c)| rows.iter().map(move |&r| (r, c))).collect();
        Some(AdmissibleSubtable::new(f, cells)?)
    } else {
        None
    };
    let mut leftover: Vec<Element> = queue.into_iter().collect();
    leftover.sort_unstable();
    Ok(RepairOutcome { subtable, leftover, iterations, first_fit_complete, seed: None })
}

/// Deterministic run: first-fit over rows in index order, then the repair
/// loop. A queued row goes to its open column with the most room (lowest
/// index on ties); when all its columns are full it cycles through them in
/// turn and evicts the longest-held row.
pub fn algorithm2(f: &FunctionTable, s: &[Element], n_iter: usize) -> Result<RepairOutcome> {
    repair(f, s, n_iter, None)
}

/// Randomized repair choices (uniform column and evictee) seeded by `seed`.
pub fn algorithm2_seeded(f: &FunctionTable, s: &[Element], n_iter: usize, seed: u64) -> Result<RepairOutcome> {
    let mut out = repair(f, s, n_iter, Some(ChaCha8Rng::seed_from_u64(seed)))?;
    out.seed = Some(seed);
    Ok(out)
}

/// The deterministic run, then the seeded runs in parallel; the first success
/// in seed-list order wins. Returns the last failing outcome otherwise.
pub fn algorithm2_restarts(f: &FunctionTable, s: &[Element], n_iter: usize, seeds: &[u64]) -> Result<RepairOutcome> {
    let base = algorithm2(f, s, n_iter)?;
    if base.subtable.is_some() || seeds.is_empty() {
        return Ok(base);
    }
    let runs: Vec<Result<RepairOutcome>> =
        seeds.par_iter().map(|&seed| algorithm2_seeded(f, s, n_iter, seed)).collect();
    let mut last = base;
    for run in runs {
        let run = run?;
        if run.subtable.is_some() {
            return Ok(run);
        }
        last = run;
    }
    Ok(last)
}
