//! Constructive upper bounds for pres(f).
//!
//! [`algorithm1`] starts from the zero diagonal of the upper block of `M_f`
//! and fills the square table `M_0` (rows `P_0`, columns `j - 1` copies of each
//! `P_j`) one value at a time. Whatever square is left after the last step is
//! closed off with its diagonal.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::function::FunctionTable;
use crate::subtable::{AdmissibleSubtable, Cell};

/// Column of `M_0`: an element of `im(f)` and its copy index (from 1).
pub type CopyColumn = (Element, usize);

/// The square table `M_0` with its rows and copy columns in display order.
#[derive(Clone, Debug)]
pub struct SquareTable {
    pub rows: Vec<Element>,
    pub columns: Vec<CopyColumn>,
}

impl SquareTable {
    pub fn side(&self) -> usize {
        self.rows.len()
    }

    pub fn grid(&self, f: &FunctionTable) -> Vec<Vec<Element>> {
        let g = f.group();
        self.rows.iter().map(|&r| self.columns.iter().map(|&(c, _)| g.sub(r, c)).collect()).collect()
    }
}

/// Rows `P_0` ascending; columns `P_{2,1}, P_{3,1}, P_{3,2}, ...`, each block
/// ascending. Empty when `f` is a permutation.
pub fn build_m0(f: &FunctionTable) -> SquareTable {
    let part = f.preimage_partition();
    let mut columns = Vec::new();
    for j in 2..=part.uniformity {
        for copy in 1..j {
            columns.extend(part.class(j).iter().map(|&c| (c, copy)));
        }
    }
    SquareTable { rows: part.class(0).to_vec(), columns }
}

/// Number of rows of `m` containing `v`; copies in one row count once.
pub fn appearance_count(f: &FunctionTable, m: &SquareTable, v: Element) -> usize {
    let g = f.group();
    m.rows.iter().filter(|&&r| m.columns.iter().any(|&(c, _)| g.sub(r, c) == v)).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Smallest element reaching the rounded-up average; take that many cells.
    Average,
    /// Element with the most appearances; take all of its cells.
    Greedy,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(Strategy::Average),
            "greedy" => Ok(Strategy::Greedy),
            other => Err(Error::Precondition(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyStep {
    /// Rounded-up average for the average strategy; the cell count taken for
    /// the greedy strategy.
    pub mu: usize,
    pub v: Element,
    pub cells: Vec<Cell>,
    /// Side of the square table after this step.
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct GreedyTrace {
    pub n0: usize,
    pub steps: Vec<GreedyStep>,
    pub final_s: Vec<Element>,
    pub final_a: AdmissibleSubtable,
}

impl GreedyTrace {
    /// `1 + k + n_k` for the steps actually taken.
    pub fn worst_case_size(&self) -> usize {
        let n = self.steps.last().map_or(self.n0, |s| s.n);
        1 + self.steps.len() + n
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n0": self.n0,
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "mu": s.mu,
                "v": s.v,
                "cells": s.cells.iter().map(|&(r, c)| [r, c]).collect::<Vec<_>>(),
                "n": s.n,
            })).collect::<Vec<_>>(),
            "S": self.final_s,
            "size": self.final_s.len(),
            "worst_case_size": self.worst_case_size(),
            "subtable": self.final_a.to_json(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct GreedyOptions {
    pub steps: usize,
    pub strategy: Strategy,
    /// Values forced at the first steps, in order; later steps use the strategy.
    pub choices: Vec<Element>,
}

/// `f(0) = 0`, `q` odd and every nonzero image has exactly two preimages.
pub fn is_odd_two_to_one(f: &FunctionTable) -> bool {
    let q = f.order();
    q % 2 == 1
        && f.eval(0) == 0
        && f.preimage_count(0) == 1
        && f.image().iter().all(|&c| c == 0 || f.preimage_count(c) == 2)
}

pub fn algorithm1(f: &FunctionTable, opts: &GreedyOptions) -> Result<GreedyTrace> {
    let q = f.order();
    let g = f.group();
    let divisor = if is_odd_two_to_one(f) { q - 1 } else { q };
    let mut m = build_m0(f);
    let n0 = m.side();
    let mut cells: Vec<Cell> = f.image().into_iter().map(|c| (c, c)).collect();
    let mut s: BTreeSet<Element> = BTreeSet::from([0]);
    let mut steps = Vec::new();
    let mut stamp = vec![usize::MAX; q];
    let mut counts = vec![0usize; q];

    for step in 0..opts.steps {
        if m.side() == 0 {
            break;
        }
        counts.iter_mut().for_each(|c| *c = 0);
        for (i, &r) in m.rows.iter().enumerate() {
            for &(c, _) in &m.columns {
                let v = g.sub(r, c);
                if stamp[v] != i {
                    stamp[v] = i;
                    counts[v] += 1;
                }
            }
        }
        stamp.iter_mut().for_each(|s| *s = usize::MAX);
        let mass: usize = counts.iter().sum();
        let mu = mass.div_ceil(divisor);
        let (v, take) = if let Some(&forced) = opts.choices.get(step) {
            g.check(forced)?;
            if counts[forced] < mu {
                return Err(Error::Precondition(format!(
                    "step {}: {forced} appears {} times, below {mu}",
                    step + 1,
                    counts[forced]
                )));
            }
            (forced, if opts.strategy == Strategy::Greedy { counts[forced] } else { mu })
        } else {
            match opts.strategy {
                Strategy::Average => ((0..q).find(|&v| counts[v] >= mu).expect("the maximum reaches the average"), mu),
                Strategy::Greedy => {
                    let best = *counts.iter().max().expect("nonempty");
                    ((0..q).find(|&v| counts[v] == best).expect("maximum exists"), best)
                }
            }
        };

        let mut taken = Vec::with_capacity(take);
        let mut row_ix = 0;
        while taken.len() < take {
            let r = m.rows[row_ix];
            // the one column of M_f holding v in row r, lowest live copy
            let hit = m
                .columns
                .iter()
                .enumerate()
                .filter(|(_, &(c, _))| g.sub(r, c) == v)
                .min_by_key(|(_, &(_, copy))| copy)
                .map(|(j, _)| j);
            match hit {
                Some(j) => {
                    let (c, _) = m.columns.remove(j);
                    m.rows.remove(row_ix);
                    taken.push((r, c));
                }
                None => row_ix += 1,
            }
        }
        cells.extend_from_slice(&taken);
        s.insert(v);
        let mu = if opts.strategy == Strategy::Average { mu } else { take };
        steps.push(GreedyStep { mu, v, cells: taken, n: m.side() });
    }

    for (&r, &(c, _)) in m.rows.iter().zip(&m.columns) {
        cells.push((r, c));
        s.insert(g.sub(r, c));
    }
    let final_a = AdmissibleSubtable::new(f, cells)?;
    debug_assert!(final_a.covers_all_rows());
    Ok(GreedyTrace { n0, steps, final_s: s.into_iter().collect(), final_a })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(Error::Precondition(format!("unknown parity `{other}`"))),
        }
    }
}

/// `n_0, n_1, ...` down to 0. Even: `n_0 = q/2`, divisor `q`; odd:
/// `n_0 = (q-1)/2`, divisor `q - 1`.
pub fn recurrence_nk(q: usize, parity: Parity) -> Result<Vec<usize>> {
    let (n0, divisor) = match parity {
        Parity::Even if q >= 2 && q.is_multiple_of(2) => (q / 2, q),
        Parity::Odd if q >= 3 && q % 2 == 1 => ((q - 1) / 2, q - 1),
        _ => return Err(Error::ParityMismatch(q)),
    };
    let mut seq = vec![n0];
    let mut n = n0;
    while n > 0 {
        n -= (n * n).div_ceil(divisor);
        seq.push(n);
    }
    Ok(seq)
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `ceil(2 sqrt(m)) - 1`, or `2 sqrt(m) - 2` when `m` is a square.
fn closed_form(m: usize) -> usize {
    let s = isqrt(m);
    if s * s == m {
        return (2 * s).saturating_sub(2);
    }
    // ceil(2 sqrt m) = least t with t^2 >= 4m
    let t = isqrt(4 * m);
    let ceil = if t * t == 4 * m { t } else { t + 1 };
    ceil - 1
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoToOneBound {
    pub q: usize,
    pub parity: Parity,
    pub bound: usize,
    /// `min_{k >= 1} (1 + k + n_k)` from the recurrence.
    pub recurrence_bound: usize,
    pub recurrence_k: usize,
    /// The closed form is below what the recurrence certifies.
    pub conflict: bool,
}

pub fn two_to_one_bound(q: usize, parity: Parity) -> Result<TwoToOneBound> {
    let seq = recurrence_nk(q, parity)?;
    let m = match parity {
        Parity::Even => q,
        Parity::Odd => q - 1,
    };
    let bound = closed_form(m);
    let (recurrence_k, recurrence_bound) = (1..seq.len().max(2))
        .map(|k| (k, 1 + k + seq.get(k).copied().unwrap_or(0)))
        .min_by_key(|&(_, b)| b)
        .expect("nonempty");
    Ok(TwoToOneBound { q, parity, bound, recurrence_bound, recurrence_k, conflict: recurrence_bound > bound })
}

/// `(u(f), q - V(f) + 1)`.
pub fn generic_bounds(f: &FunctionTable) -> (usize, usize) {
    (f.uniformity(), f.order() - f.image_size() + 1)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::algebra::{build_group, Group};
    use crate::fixtures::labeled_example_group;

    /// `A[i]` is the element labelled `a_i`.
    const A: [usize; 8] = [0, 1, 2, 3, 4, 5, 6, 7];

    fn example_f() -> FunctionTable {
        let g = Arc::new(labeled_example_group());
        // 0, a4 -> 0; a1, a5 -> a1; a2, a6 -> a2; a3, a7 -> a3
        FunctionTable::new(g, vec![0, 1, 2, 3, 0, 1, 2, 3]).unwrap()
    }

    fn opts(steps: usize, strategy: Strategy, choices: Vec<Element>) -> GreedyOptions {
        GreedyOptions { steps, strategy, choices }
    }

    #[test]
    fn example_lower_block() {
        let f = example_f();
        let m0 = build_m0(&f);
        assert_eq!(m0.rows, vec![A[4], A[5], A[6], A[7]]);
        let want = vec![
            vec![A[4], A[2], A[1], A[6]],
            vec![A[5], A[7], A[3], A[2]],
            vec![A[6], A[5], A[7], A[4]],
            vec![A[7], A[3], A[6], A[1]],
        ];
        assert_eq!(m0.grid(&f), want);
        assert_eq!(appearance_count(&f, &m0, A[4]), 2);
        assert_eq!(appearance_count(&f, &m0, 0), 0);
    }

    #[test]
    fn average_run_two_steps() {
        let f = example_f();
        let t = algorithm1(&f, &opts(2, Strategy::Average, vec![A[4]])).unwrap();
        assert_eq!(t.steps[0].mu, 2);
        assert_eq!(t.steps[0].cells, vec![(A[4], 0), (A[6], A[3])]);
        assert_eq!(t.steps[1].v, A[3]);
        assert_eq!(t.steps[1].cells, vec![(A[5], A[2])]);
        assert_eq!(t.steps.iter().map(|s| s.n).collect::<Vec<_>>(), vec![2, 1]);
        assert_eq!(t.final_s, vec![0, A[3], A[4]]);
        assert_eq!(t.worst_case_size(), 4);
        assert!(t.final_a.covers_all_rows());
    }

    #[test]
    fn average_run_one_step() {
        let f = example_f();
        let t = algorithm1(&f, &opts(1, Strategy::Average, vec![A[4]])).unwrap();
        assert_eq!(t.final_s, vec![0, A[4], A[6], A[7]]);
        assert_eq!(t.worst_case_size(), 4);
    }

    #[test]
    fn greedy_run() {
        let f = example_f();
        let t = algorithm1(&f, &opts(1, Strategy::Greedy, vec![])).unwrap();
        assert_eq!(t.steps[0].v, A[6]);
        assert_eq!(t.steps[0].n, 1);
        assert_eq!(t.final_s, vec![0, A[6], A[7]]);
    }

    #[test]
    fn forced_choice_must_qualify() {
        let f = example_f();
        assert!(algorithm1(&f, &opts(1, Strategy::Average, vec![0])).is_err());
    }

    #[test]
    fn m0_with_three_to_one() {
        let z9 = Arc::new(Group::cyclic(9).unwrap());
        let f = FunctionTable::from_fn(z9, |x| x % 3).unwrap();
        let m0 = build_m0(&f);
        assert_eq!(m0.side(), 6);
        assert_eq!(m0.columns, vec![(0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (2, 2)]);
        let t = algorithm1(&f, &opts(6, Strategy::Average, vec![])).unwrap();
        assert!(t.final_a.covers_all_rows());
        // copies share entries, so each row counts once
        let v = f.group().sub(m0.rows[0], 0);
        let in_first_row = m0.columns.iter().filter(|&&(c, _)| f.group().sub(m0.rows[0], c) == v).count();
        assert_eq!(in_first_row, 2);
    }

    #[test]
    fn recurrences() {
        assert_eq!(recurrence_nk(16, Parity::Even).unwrap(), vec![8, 4, 3, 2, 1, 0]);
        assert_eq!(recurrence_nk(8, Parity::Even).unwrap(), vec![4, 2, 1, 0]);
        assert_eq!(recurrence_nk(9, Parity::Odd).unwrap(), vec![4, 2, 1, 0]);
        assert!(matches!(recurrence_nk(9, Parity::Even), Err(Error::ParityMismatch(9))));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(two_to_one_bound(16, Parity::Even).unwrap().bound, 6);
        assert_eq!(two_to_one_bound(9, Parity::Odd).unwrap().bound, 5);
        let five = two_to_one_bound(5, Parity::Odd).unwrap();
        assert_eq!((five.bound, five.recurrence_bound, five.conflict), (2, 3, true));
        assert!(!two_to_one_bound(64, Parity::Even).unwrap().conflict);
    }

    #[test]
    fn generic_bounds_examples() {
        let f13 = Arc::new(build_group("gf:13").unwrap());
        assert_eq!(generic_bounds(&FunctionTable::power_map(f13.clone(), 6).unwrap()), (6, 11));
        assert_eq!(generic_bounds(&FunctionTable::power_map(f13, 5).unwrap()), (1, 1));
    }

    #[test]
    fn random_two_to_one_outputs_are_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [8, 16] {
            let g = Arc::new(Group::cyclic(q).unwrap());
            for _ in 0..20 {
                let f = FunctionTable::random_two_to_one(g.clone(), &mut rng).unwrap();
                for k in 0..=4 {
                    let t = algorithm1(&f, &opts(k, Strategy::Average, vec![])).unwrap();
                    assert!(t.final_a.covers_all_rows());
                    assert!(t.final_s.len() <= t.worst_case_size());
                }
            }
        }
    }
}
