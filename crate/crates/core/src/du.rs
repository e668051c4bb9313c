//! The DU-minimizing binary program over the decompressed table, its
//! verifier, a direct backtracking search for a minimum-DU permutation, and
//! the product bound `delta_{g+f} <= delta_f (V(g)^2 - V(g) + 1)`.
//!
//! Index convention: `z_a_b_r_c` linearizes `x_{r+b, c+a} * x_{r,c}` with
//! `r+b = add(r, b)` and `c+a = add(c, a)`, so `delta_a_b` counts the `c` with
//! `F(c + a) = F(c) + b`. Over abelian groups this is the usual
//! `F(c + a) - F(c) = b`.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Element, Group};
use crate::error::{Error, Result};
use crate::function::FunctionTable;
use crate::ip::{Assignment, IpModel, Relation, Violation};

pub fn x_name(r: Element, c: Element) -> String {
    format!("x_{r}_{c}")
}

pub fn z_name(a: Element, b: Element, r: Element, c: Element) -> String {
    format!("z_{a}_{b}_{r}_{c}")
}

pub fn delta_name(a: Element, b: Element) -> String {
    format!("delta_{a}_{b}")
}

pub fn y_name(v: Element) -> String {
    format!("y_{v}")
}

pub const DU_NAME: &str = "DU";
pub const V_NAME: &str = "V";

/// Variables in order: `x_r_c` (row-major), `z_a_b_r_c` (`a != 0`),
/// `delta_a_b`, `DU`, then with `with_y` the `y_v` and `V`. Constraints:
/// `row_r`, `col_c`, `dsum_a_b`, `zlo_a_b_r_c` / `zhi_a_b_r_c`, `dmax_a_b`,
/// then `ylink_r_c: x_r_c - y_{r - f(c)} <= 0` and `vsum`.
pub fn build_du_ip(f: &FunctionTable, with_y: bool) -> Result<IpModel> {
    let group = f.group();
    let q = f.order();
    if q < 2 {
        return Err(Error::Precondition("group order must be at least 2".into()));
    }
    let qi = q as i64;
    let mut model = IpModel::new("du");
    let mut x = vec![0usize; q * q];
    for r in 0..q {
        for c in 0..q {
            x[r * q + c] = model.add_binary(x_name(r, c));
        }
    }
    let z_base = model.variables().len();
    for a in 1..q {
        for b in 0..q {
            for r in 0..q {
                for c in 0..q {
                    model.add_binary(z_name(a, b, r, c));
                }
            }
        }
    }
    let z = |a: usize, b: usize, r: usize, c: usize| z_base + (((a - 1) * q + b) * q + r) * q + c;
    let mut delta = vec![0usize; q * q];
    for a in 1..q {
        for b in 0..q {
            delta[a * q + b] = model.add_integer(delta_name(a, b), 0, qi);
        }
    }
    let du = model.add_integer(DU_NAME, 0, qi);

    for r in 0..q {
        let terms = (0..q).map(|c| (x[r * q + c], 1)).collect();
        model.add_constraint(format!("row_{r}"), terms, Relation::Eq, 1)?;
    }
    for c in 0..q {
        let terms = (0..q).map(|r| (x[r * q + c], 1)).collect();
        model.add_constraint(format!("col_{c}"), terms, Relation::Eq, 1)?;
    }
    for a in 1..q {
        for b in 0..q {
            let mut terms: Vec<(usize, i64)> =
                (0..q).flat_map(|r| (0..q).map(move |c| (r, c))).map(|(r, c)| (z(a, b, r, c), 1)).collect();
            terms.push((delta[a * q + b], -1));
            model.add_constraint(format!("dsum_{a}_{b}"), terms, Relation::Eq, 0)?;
        }
    }
    for a in 1..q {
        for b in 0..q {
            for r in 0..q {
                for c in 0..q {
                    let shifted = x[group.add(r, b) * q + group.add(c, a)];
                    let here = x[r * q + c];
                    let zz = z(a, b, r, c);
                    model.add_constraint(
                        format!("zlo_{a}_{b}_{r}_{c}"),
                        vec![(zz, 2), (shifted, -1), (here, -1)],
                        Relation::Le,
                        0,
                    )?;
                    model.add_constraint(
                        format!("zhi_{a}_{b}_{r}_{c}"),
                        vec![(shifted, 1), (here, 1), (zz, -1)],
                        Relation::Le,
                        1,
                    )?;
                }
            }
        }
    }
    for a in 1..q {
        for b in 0..q {
            model.add_constraint(format!("dmax_{a}_{b}"), vec![(delta[a * q + b], 1), (du, -1)], Relation::Le, 0)?;
        }
    }
    if with_y {
        let y: Vec<usize> = (0..q).map(|v| model.add_binary(y_name(v))).collect();
        let v_var = model.add_integer(V_NAME, 0, qi);
        for r in 0..q {
            for c in 0..q {
                let v = group.sub(r, f.eval(c));
                model.add_constraint(format!("ylink_{r}_{c}"), vec![(x[r * q + c], 1), (y[v], -1)], Relation::Le, 0)?;
            }
        }
        let mut terms: Vec<(usize, i64)> = y.iter().map(|&i| (i, 1)).collect();
        terms.push((v_var, -1));
        model.add_constraint("vsum", terms, Relation::Eq, 0)?;
    }
    model.set_objective(vec![(du, 1)]);
    Ok(model)
}

/// `delta[a][b]` under the model's convention: `#{c : F(c + a) = F(c) + b}`.
pub fn left_delta_counts(group: &Group, perm: &[Element]) -> Vec<Vec<usize>> {
    let q = perm.len();
    let mut counts = vec![vec![0usize; q]; q];
    for (a, row) in counts.iter_mut().enumerate().skip(1) {
        for c in 0..q {
            let b = group.add(group.neg(perm[c]), perm[group.add(c, a)]);
            row[b] += 1;
        }
    }
    counts
}

/// The assignment describing the permutation `perm` (so `x_r_c = [perm(c) = r]`),
/// with `DU = max delta` and, with `with_y`, `y` on exactly `im(perm - f)`.
pub fn encode_du_assignment(f: &FunctionTable, perm: &FunctionTable, with_y: bool) -> Result<Assignment> {
    let group = f.group();
    let q = f.order();
    if perm.order() != q || !perm.is_permutation() {
        return Err(Error::NotPermutationMatrix);
    }
    let images = perm.images();
    let mut asg = Assignment::new();
    for r in 0..q {
        for c in 0..q {
            asg.set(x_name(r, c), i64::from(images[c] == r));
        }
    }
    for a in 1..q {
        for b in 0..q {
            for r in 0..q {
                for c in 0..q {
                    let on = images[c] == r && images[group.add(c, a)] == group.add(r, b);
                    asg.set(z_name(a, b, r, c), i64::from(on));
                }
            }
        }
    }
    let counts = left_delta_counts(group, images);
    let mut du = 0;
    for (a, row) in counts.iter().enumerate().skip(1) {
        for (b, &n) in row.iter().enumerate() {
            asg.set(delta_name(a, b), n as i64);
            du = du.max(n);
        }
    }
    asg.set(DU_NAME, du as i64);
    if with_y {
        let values: BTreeSet<Element> = (0..q).map(|c| group.sub(images[c], f.eval(c))).collect();
        for v in 0..q {
            asg.set(y_name(v), i64::from(values.contains(&v)));
        }
        asg.set(V_NAME, values.len() as i64);
    }
    Ok(asg)
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaMismatch {
    pub a: Element,
    pub b: Element,
    pub claimed: i64,
    pub recomputed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DuVerification {
    /// Every model constraint and bound holds.
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// Decoded `F`, `permutation[c] = F(c)`.
    pub permutation: Vec<Element>,
    pub delta_mismatches: Vec<DeltaMismatch>,
    pub du_claimed: i64,
    /// `max delta` recomputed from `F`.
    pub du_recomputed: usize,
    /// `delta_F` with `F(x + a) - F(x)` differences.
    pub differential_uniformity: usize,
    /// `#im(F - f)` when the model carries the `y` extension.
    pub v_g: Option<usize>,
    pub passed: bool,
}

/// Checks an assignment against the model for `f`; the `y` extension is
/// assumed present exactly when the assignment sets `V`.
pub fn verify_du_solution(f: &FunctionTable, assignment: &Assignment) -> Result<DuVerification> {
    let model = build_du_ip(f, assignment.get(V_NAME).is_some())?;
    verify_du_with_model(&model, f, assignment)
}

/// As [`verify_du_solution`] against a model already built for `f`.
pub fn verify_du_with_model(model: &IpModel, f: &FunctionTable, assignment: &Assignment) -> Result<DuVerification> {
    let with_y = model.var_index(V_NAME).is_some();
    let eval = model.evaluate(assignment)?;
    let group = f.group();
    let q = f.order();
    let x = |r: usize, c: usize| eval.values[r * q + c];
    let mut permutation = vec![usize::MAX; q];
    let mut row_used = vec![false; q];
    for c in 0..q {
        let chosen: Vec<usize> = (0..q).filter(|&r| x(r, c) == 1).collect();
        if chosen.len() != 1 || row_used[chosen[0]] || (0..q).any(|r| !matches!(x(r, c), 0 | 1)) {
            return Err(Error::NotPermutationMatrix);
        }
        row_used[chosen[0]] = true;
        permutation[c] = chosen[0];
    }
    let counts = left_delta_counts(group, &permutation);
    let mut delta_mismatches = Vec::new();
    let mut du_recomputed = 0;
    for (a, row) in counts.iter().enumerate().skip(1) {
        for (b, &n) in row.iter().enumerate() {
            du_recomputed = du_recomputed.max(n);
            let claimed = eval.values[model.var_index(&delta_name(a, b)).expect("declared")];
            if claimed != n as i64 {
                delta_mismatches.push(DeltaMismatch { a, b, claimed, recomputed: n });
            }
        }
    }
    let du_claimed = eval.values[model.var_index(DU_NAME).expect("declared")];
    let perm = FunctionTable::new(group.clone(), permutation.clone())?;
    let v_g = with_y.then(|| (0..q).map(|c| group.sub(permutation[c], f.eval(c))).collect::<BTreeSet<_>>().len());
    let feasible = eval.violations.is_empty();
    let passed = feasible && delta_mismatches.is_empty() && du_claimed == du_recomputed as i64;
    Ok(DuVerification {
        feasible,
        violations: eval.violations,
        permutation,
        delta_mismatches,
        du_claimed,
        du_recomputed,
        differential_uniformity: perm.differential_uniformity(),
        v_g,
        passed,
    })
}

#[derive(Clone, Debug)]
pub struct DuSearchResult {
    pub best_du: usize,
    pub witness_perm: FunctionTable,
    pub nodes_explored: u64,
    /// The search finished, so `best_du` is the optimum.
    pub complete: bool,
}

impl DuSearchResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "best_du": self.best_du,
            "witness_perm": self.witness_perm.images(),
            "nodes_explored": self.nodes_explored,
            "complete": self.complete,
        })
    }
}

/// Depth-first over `F(0), F(1), ...` keeping the counts of
/// `F(y + a) - F(y)` for pairs already fixed.
struct Branch<'a> {
    group: &'a Group,
    q: usize,
    perm: Vec<Element>,
    used: Vec<bool>,
    counts: Vec<usize>,
    nodes: &'a AtomicU64,
    budget: u64,
    stop: &'a AtomicBool,
}

impl Branch<'_> {
    fn new<'a>(group: &'a Group, nodes: &'a AtomicU64, budget: u64, stop: &'a AtomicBool) -> Branch<'a> {
        let q = group.order();
        Branch {
            group,
            q,
            perm: Vec::with_capacity(q),
            used: vec![false; q],
            counts: vec![0; q * q],
            nodes,
            budget,
            stop,
        }
    }

    /// Fixes `F(x) = w` for `x = perm.len()`; false (and nothing changed) when
    /// some count would exceed `cap`.
    fn push(&mut self, w: Element, cap: usize) -> bool {
        let g = self.group;
        let x = self.perm.len();
        let mut touched = Vec::with_capacity(2 * x);
        let mut ok = true;
        for y in 0..x {
            let fy = self.perm[y];
            // (y, a = -y + x) and (x, a = -x + y)
            for (from, to, a) in [(fy, w, g.add(g.neg(y), x)), (w, fy, g.add(g.neg(x), y))] {
                let idx = a * self.q + g.sub(to, from);
                self.counts[idx] += 1;
                touched.push(idx);
                if self.counts[idx] > cap {
                    ok = false;
                }
            }
            if !ok {
                break;
            }
        }
        if !ok {
            touched.iter().for_each(|&i| self.counts[i] -= 1);
            return false;
        }
        self.perm.push(w);
        self.used[w] = true;
        true
    }

    fn pop(&mut self) {
        let g = self.group;
        let w = self.perm.pop().expect("nonempty");
        self.used[w] = false;
        let x = self.perm.len();
        for y in 0..x {
            let fy = self.perm[y];
            for (from, to, a) in [(fy, w, g.add(g.neg(y), x)), (w, fy, g.add(g.neg(x), y))] {
                self.counts[a * self.q + g.sub(to, from)] -= 1;
            }
        }
    }

    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget {
            self.stop.store(true, Ordering::Relaxed);
        }
        !self.stop.load(Ordering::Relaxed)
    }

    /// Best completion with every count below `bound()`, improving `best`.
    fn improve(&mut self, best: &AtomicUsize, found: &mut Option<(usize, Vec<Element>)>) {
        if !self.tick() {
            return;
        }
        if self.perm.len() == self.q {
            let du = self.counts.iter().copied().max().unwrap_or(0);
            best.fetch_min(du, Ordering::Relaxed);
            if found.as_ref().is_none_or(|(d, _)| du < *d) {
                *found = Some((du, self.perm.clone()));
            }
            return;
        }
        for w in 0..self.q {
            let cap = best.load(Ordering::Relaxed).saturating_sub(1);
            if !self.used[w] && self.push(w, cap) {
                self.improve(best, found);
                self.pop();
            }
        }
    }

    /// Lexicographically first completion with every count at most `cap`.
    fn first(&mut self, cap: usize) -> bool {
        if !self.tick() {
            return false;
        }
        if self.perm.len() == self.q {
            return true;
        }
        for w in 0..self.q {
            if !self.used[w] && self.push(w, cap) {
                if self.first(cap) {
                    return true;
                }
                self.pop();
            }
        }
        false
    }
}

/// Exact minimum of `delta_F` over permutations `F` of `group`, with
/// `F(0) = 0` fixed (translating `F` leaves `delta_F` unchanged) and the
/// branches on `F(1)` run in parallel. The witness is the lexicographically
/// first optimal permutation. `budget` caps the number of search nodes.
pub fn min_du_permutation_search(group: &Arc<Group>, budget: Option<u64>) -> Result<DuSearchResult> {
    let q = group.order();
    if q < 2 {
        return Err(Error::Precondition("group order must be at least 2".into()));
    }
    let budget = budget.unwrap_or(u64::MAX);
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let identity: Vec<Element> = (0..q).collect();
    // the identity has DU q; search strictly below it
    let best = AtomicUsize::new(q);
    let branch_results: Vec<Option<(usize, Vec<Element>)>> = (1..q)
        .into_par_iter()
        .map(|w1| {
            let mut br = Branch::new(group, &nodes, budget, &stop);
            let mut found = None;
            if br.push(0, q) && br.push(w1, best.load(Ordering::Relaxed).saturating_sub(1)) {
                br.improve(&best, &mut found);
            }
            found
        })
        .collect();
    let stopped = stop.load(Ordering::Relaxed);
    let best_du = best.load(Ordering::Relaxed);
    let fallback = branch_results
        .into_iter()
        .flatten()
        .filter(|(d, _)| *d == best_du)
        .map(|(_, p)| p)
        .min()
        .unwrap_or(identity.clone());
    let (witness, complete) = if stopped {
        (fallback, false)
    } else {
        let mut br = Branch::new(group, &nodes, u64::MAX, &stop);
        br.push(0, q);
        let ok = br.first(best_du);
        debug_assert!(ok);
        (if ok { br.perm } else { fallback }, true)
    };
    let witness_perm = FunctionTable::new(group.clone(), witness)?;
    Ok(DuSearchResult {
        best_du: witness_perm.differential_uniformity(),
        witness_perm,
        nodes_explored: nodes.into_inner(),
        complete,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductBound {
    pub delta_f: usize,
    pub v_g: usize,
    /// `delta_{g+f}`.
    pub lhs: usize,
    /// `delta_f * (V(g)^2 - V(g) + 1)`.
    pub rhs: usize,
    pub holds: bool,
}

pub fn du_product_bound_check(f: &FunctionTable, g: &FunctionTable) -> Result<ProductBound> {
    if !f.group().is_abelian() {
        return Err(Error::NonAbelian);
    }
    let sum = g.add_pointwise(f)?;
    let delta_f = f.differential_uniformity();
    let v_g = g.image_size();
    let lhs = sum.differential_uniformity();
    let rhs = delta_f * (v_g * v_g - v_g + 1);
    Ok(ProductBound { delta_f, v_g, lhs, rhs, holds: lhs <= rhs })
}
