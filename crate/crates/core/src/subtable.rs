//! Subtraction tables `M_f`, admissible subtables and their realizations.
//!
//! Rows of `M_f` are ordered by the preimage classes `P_1, ..., P_u` and then
//! `P_0`; columns are `im(f)` ordered `P_1, ..., P_u`. Within a class the order
//! is ascending element index, which puts the zero diagonal on the upper block.

use std::collections::BTreeSet;
use std::sync::Arc;

use num::{BigUint, One};
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Group};
use crate::error::{Error, Result};
use crate::function::FunctionTable;

/// A cell `(row r, column c)` of a subtraction table, holding `r - c`.
pub type Cell = (Element, Element);

#[derive(Clone, Debug)]
pub struct SubtractionTable {
    f: FunctionTable,
    rows: Vec<Element>,
    columns: Vec<Element>,
}

impl SubtractionTable {
    pub fn new(f: &FunctionTable) -> Self {
        let part = f.preimage_partition();
        let columns: Vec<Element> = (1..=part.uniformity).flat_map(|t| part.class(t).iter().copied()).collect();
        let mut rows = columns.clone();
        rows.extend_from_slice(part.class(0));
        SubtractionTable { f: f.clone(), rows, columns }
    }

    pub fn function(&self) -> &FunctionTable {
        &self.f
    }

    pub fn rows(&self) -> &[Element] {
        &self.rows
    }

    pub fn columns(&self) -> &[Element] {
        &self.columns
    }

    #[inline]
    pub fn entry(&self, r: Element, c: Element) -> Element {
        self.f.group().sub(r, c)
    }

    /// Entries in display order, `grid[i][j] = rows[i] - columns[j]`.
    pub fn grid(&self) -> Vec<Vec<Element>> {
        self.rows.iter().map(|&r| self.columns.iter().map(|&c| self.entry(r, c)).collect()).collect()
    }

    /// CSV dump: header `r\c,<columns...>`, then one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r\\c");
        for c in &self.columns {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
        for (r, line) in self.rows.iter().zip(self.grid()) {
            out.push_str(&r.to_string());
            for v in line {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// `q` cells of `M_f` with exactly `#preim(f, c)` cells in every column `c`.
/// Cells are kept sorted; value set and range are always derived.
#[derive(Clone, Debug)]
pub struct AdmissibleSubtable {
    group: Arc<Group>,
    cells: Vec<Cell>,
}

impl PartialEq for AdmissibleSubtable {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.group.order() == other.group.order()
    }
}

impl Eq for AdmissibleSubtable {}

#[derive(Serialize, Deserialize)]
struct SubtableJson {
    cells: Vec<[Element; 2]>,
}

fn admissibility_problem(cells: &[Cell], f: &FunctionTable) -> Option<String> {
    let q = f.order();
    if cells.len() != q {
        return Some(format!("{} cells, expected {q}", cells.len()));
    }
    let mut per_column = vec![0usize; q];
    let mut seen = BTreeSet::new();
    for &(r, c) in cells {
        if r >= q || c >= q || f.preimage_count(c) == 0 {
            return Some(format!("cell ({r}, {c}) is not in the table"));
        }
        if !seen.insert((r, c)) {
            return Some(format!("cell ({r}, {c}) repeated"));
        }
        per_column[c] += 1;
    }
    (0..q)
        .find(|&c| per_column[c] != f.preimage_count(c))
        .map(|c| format!("column {c} has {} cells, needs {}", per_column[c], f.preimage_count(c)))
}

/// (A2) plus cell validity; (A1) holds by construction of the value set.
pub fn check_admissible(cells: &[Cell], f: &FunctionTable) -> bool {
    admissibility_problem(cells, f).is_none()
}

impl AdmissibleSubtable {
    pub fn new(f: &FunctionTable, mut cells: Vec<Cell>) -> Result<Self> {
        if let Some(problem) = admissibility_problem(&cells, f) {
            return Err(Error::NotAdmissible(problem));
        }
        cells.sort_unstable();
        Ok(AdmissibleSubtable { group: f.group().clone(), cells })
    }

    /// The subtable selected by `g`: cell `(g(x) + f(x), f(x))` for each `x`.
    pub fn from_realization(f: &FunctionTable, g: &FunctionTable) -> Result<Self> {
        let sum = g.add_pointwise(f)?;
        let cells = (0..f.order()).map(|x| (sum.eval(x), f.eval(x))).collect();
        Self::new(f, cells)
    }

    pub fn from_json(f: &FunctionTable, text: &str) -> Result<Self> {
        let parsed: SubtableJson = serde_json::from_str(text)?;
        Self::new(f, parsed.cells.into_iter().map(|[r, c]| (r, c)).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<[Element; 2]> = self.cells.iter().map(|&(r, c)| [r, c]).collect();
        serde_json::json!({ "cells": cells })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn value_set(&self) -> Vec<Element> {
        let values: BTreeSet<Element> = self.cells.iter().map(|&(r, c)| self.group.sub(r, c)).collect();
        values.into_iter().collect()
    }

    /// Rows touched by at least one cell.
    pub fn range(&self) -> Vec<Element> {
        let rows: BTreeSet<Element> = self.cells.iter().map(|&(r, _)| r).collect();
        rows.into_iter().collect()
    }

    pub fn covers_all_rows(&self) -> bool {
        self.range().len() == self.group.order()
    }

    /// Column `c`'s chosen rows, ascending.
    fn rows_in_column(&self, c: Element) -> Vec<Element> {
        self.cells.iter().filter(|&&(_, cc)| cc == c).map(|&(r, _)| r).collect()
    }

    /// One function `g` corresponding to this subtable.
    ///
    /// The selector is read in mixed radix over the columns of `M_f` (first
    /// column least significant); each digit ranks, lexicographically, the
    /// bijection from the ascending preimages of `c` to the ascending chosen
    /// rows. Selector 0 pairs them in ascending order.
    pub fn realize(&self, f: &FunctionTable, selector: u128) -> Result<FunctionTable> {
        let count = correspondence_count(f);
        if BigUint::from(selector) >= count {
            return Err(Error::SelectorOutOfRange { selector, count: count.to_string() });
        }
        let table = SubtractionTable::new(f);
        let mut images = vec![0; f.order()];
        let mut rest = selector;
        for &c in table.columns() {
            let preimages = f.preimages(c);
            let rows = self.rows_in_column(c);
            let t = preimages.len();
            let radix = factorial_u128(t);
            let digit = radix.map_or(rest, |r| rest % r);
            rest = radix.map_or(0, |r| rest / r);
            let perm = nth_permutation(t, digit);
            for (x, &slot) in preimages.iter().zip(&perm) {
                images[*x] = self.group.sub(rows[slot], c);
            }
        }
        FunctionTable::new(self.group.clone(), images)
    }
}

fn factorial_u128(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// Lexicographic rank-`k` permutation of `0..n` (factorial number system).
fn nth_permutation(n: usize, mut k: u128) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial_u128(i).unwrap_or(u128::MAX);
        let idx = (k / f) as usize;
        k %= f;
        out.push(pool.remove(idx.min(pool.len() - 1)));
    }
    out
}

/// `prod_t (t!)^{#P_t}`: the functions `g` per admissible subtable.
pub fn correspondence_count(f: &FunctionTable) -> BigUint {
    let mut total = BigUint::one();
    for c in f.image() {
        for k in 2..=f.preimage_count(c) {
            total *= BigUint::from(k);
        }
    }
    total
}

/// The `q x q` table `m_{r,c} = r - f(c)` with columns indexed by the domain.
/// Columns are grouped by `f(c)` in the column order of `M_f`, preimages
/// ascending within a group.
#[derive(Clone, Debug)]
pub struct DecompressedTable {
    f: FunctionTable,
    rows: Vec<Element>,
    columns: Vec<Element>,
}

impl DecompressedTable {
    pub fn new(f: &FunctionTable) -> Self {
        let compressed = SubtractionTable::new(f);
        let columns = compressed.columns().iter().flat_map(|&b| f.preimages(b)).collect();
        DecompressedTable { f: f.clone(), rows: compressed.rows().to_vec(), columns }
    }

    pub fn rows(&self) -> &[Element] {
        &self.rows
    }

    pub fn columns(&self) -> &[Element] {
        &self.columns
    }

    /// `f(c)`, carried as reference metadata for column `c`.
    pub fn column_image(&self, c: Element) -> Element {
        self.f.eval(c)
    }

    #[inline]
    pub fn entry(&self, r: Element, c: Element) -> Element {
        self.f.group().sub(r, self.f.eval(c))
    }

    pub fn grid(&self) -> Vec<Vec<Element>> {
        self.rows.iter().map(|&r| self.columns.iter().map(|&c| self.entry(r, c)).collect()).collect()
    }
}
