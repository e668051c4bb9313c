//! Recomputes the embedded pres tables within size limits and diffs them.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::algebra::build_group;
use crate::error::Result;
use crate::fixtures::{load_table, ReproRow, TableId};
use crate::function::FunctionTable;
use crate::pres::{solve_pres_exact, PresOptions};

/// Used for `max_q` when neither size limit is given.
pub const DEFAULT_MAX_Q: u64 = 31;

#[derive(Clone, Debug, Default)]
pub struct ReproLimits {
    pub max_p: Option<u64>,
    pub max_q: Option<u64>,
    /// Rows not started before the budget runs out are skipped.
    pub time_budget: Option<Duration>,
    pub workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Match,
    Mismatch,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproEntry {
    pub q: u64,
    pub p: u32,
    pub e: u32,
    pub d: u64,
    pub group: String,
    pub expected_pres: usize,
    pub computed_pres: Option<usize>,
    pub expected_u: Option<usize>,
    pub computed_u: Option<usize>,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproReport {
    pub table: String,
    pub rows: Vec<ReproEntry>,
    pub matches: usize,
    pub mismatches: usize,
    pub skips: usize,
}

impl ReproReport {
    pub fn all_match(&self) -> bool {
        self.mismatches == 0
    }
}

fn entry(row: &ReproRow, status: RowStatus, reason: Option<String>) -> ReproEntry {
    ReproEntry {
        q: row.q,
        p: row.p,
        e: row.e,
        d: row.d,
        group: row.group_spec(),
        expected_pres: row.pres,
        computed_pres: None,
        expected_u: row.u,
        computed_u: None,
        status,
        reason,
    }
}

fn within(row: &ReproRow, limits: &ReproLimits) -> bool {
    let max_q = match (limits.max_p, limits.max_q) {
        (None, None) => Some(DEFAULT_MAX_Q),
        (_, max_q) => max_q,
    };
    limits.max_p.is_none_or(|m| row.p as u64 <= m) && max_q.is_none_or(|m| row.q <= m)
}

fn compute(row: &ReproRow, workers: usize) -> Result<ReproEntry> {
    let group = std::sync::Arc::new(build_group(&row.group_spec())?);
    let f = FunctionTable::power_map(group, row.d)?;
    let res = solve_pres_exact(&f, &PresOptions { workers, ..Default::default() })?;
    let u = f.uniformity();
    let ok = res.value == row.pres && row.u.is_none_or(|want| want == u);
    let mut e = entry(row, if ok { RowStatus::Match } else { RowStatus::Mismatch }, None);
    e.computed_pres = Some(res.value);
    e.computed_u = Some(u);
    Ok(e)
}

/// Rows outside the limits are skipped, never estimated. Without a time
/// budget the report depends only on the arguments.
pub fn repro_appendix(table: TableId, limits: &ReproLimits) -> Result<ReproReport> {
    let started = Instant::now();
    let mut rows = Vec::new();
    for row in load_table(table)? {
        let e = if !within(&row, limits) {
            entry(&row, RowStatus::Skip, Some("beyond size limits".into()))
        } else if limits.time_budget.is_some_and(|b| started.elapsed() >= b) {
            entry(&row, RowStatus::Skip, Some("time budget exhausted".into()))
        } else {
            compute(&row, limits.workers)?
        };
        rows.push(e);
    }
    let count = |s| rows.iter().filter(|r| r.status == s).count();
    Ok(ReproReport {
        table: table.to_string(),
        matches: count(RowStatus::Match),
        mismatches: count(RowStatus::Mismatch),
        skips: count(RowStatus::Skip),
        rows,
    })
}
