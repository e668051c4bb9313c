//! The binary program for pres(f) and an independent solution checker.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::Element;
use crate::error::Result;
use crate::function::FunctionTable;
use crate::ip::{Assignment, IpModel, Relation, Violation};
use crate::subtable::AdmissibleSubtable;

pub fn x_name(r: Element, c: Element) -> String {
    format!("x_{r}_{c}")
}

pub fn y_name(v: Element) -> String {
    format!("y_{v}")
}

/// Variables `x_r_c` (row-major, `c` over `im(f)` ascending), then `y_v`.
/// Constraints `row_r`, `col_c`, then `link_r_c: x_r_c - y_{r-c} <= 0`.
pub fn build_pres_ip(f: &FunctionTable) -> IpModel {
    let group = f.group();
    let q = f.order();
    let image = f.image();
    let mut model = IpModel::new("pres");
    let mut x = vec![vec![usize::MAX; q]; q];
    for r in 0..q {
        for &c in &image {
            x[r][c] = model.add_binary(x_name(r, c));
        }
    }
    let y: Vec<usize> = (0..q).map(|v| model.add_binary(y_name(v))).collect();

    for r in 0..q {
        let terms = image.iter().map(|&c| (x[r][c], 1)).collect();
        model.add_constraint(format!("row_{r}"), terms, Relation::Eq, 1).expect("declared");
    }
    for &c in &image {
        let terms = (0..q).map(|r| (x[r][c], 1)).collect();
        model.add_constraint(format!("col_{c}"), terms, Relation::Eq, f.preimage_count(c) as i64).expect("declared");
    }
    for r in 0..q {
        for &c in &image {
            let v = group.sub(r, c);
            model
                .add_constraint(format!("link_{r}_{c}"), vec![(x[r][c], 1), (y[v], -1)], Relation::Le, 0)
                .expect("declared");
        }
    }
    model.set_objective(y.iter().map(|&i| (i, 1)).collect());
    model
}

/// The assignment selecting `A`'s cells with `y` on exactly its value set.
pub fn pres_assignment(f: &FunctionTable, a: &AdmissibleSubtable) -> Assignment {
    let q = f.order();
    let cells: BTreeSet<_> = a.cells().iter().copied().collect();
    let values: BTreeSet<_> = a.value_set().into_iter().collect();
    let mut asg = Assignment::new();
    for r in 0..q {
        for c in f.image() {
            asg.set(x_name(r, c), cells.contains(&(r, c)) as i64);
        }
    }
    for v in 0..q {
        asg.set(y_name(v), values.contains(&v) as i64);
    }
    asg
}

#[derive(Clone, Debug, Serialize)]
pub struct PresVerification {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// `sum y_v`.
    pub objective: i64,
    /// Number of distinct `r - c` over the selected cells.
    pub value_set_size: usize,
}

pub fn verify_pres_solution(f: &FunctionTable, assignment: &Assignment) -> Result<PresVerification> {
    let model = build_pres_ip(f);
    let eval = model.evaluate(assignment)?;
    let group = f.group();
    let mut values = BTreeSet::new();
    for r in 0..f.order() {
        for c in f.image() {
            let idx = model.var_index(&x_name(r, c)).expect("declared");
            if eval.values[idx] != 0 {
                values.insert(group.sub(r, c));
            }
        }
    }
    Ok(PresVerification {
        feasible: eval.violations.is_empty(),
        violations: eval.violations,
        objective: eval.objective,
        value_set_size: values.len(),
    })
}
