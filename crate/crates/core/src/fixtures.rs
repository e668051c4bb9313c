//! Data files shipped with the crate: published pres values of power maps,
//! the labelled tables of `x^2` over F9 and the labelled order-8 group used by
//! the worked example of the greedy construction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::algebra::{prime_power, Group};
use crate::error::{Error, Result};

const X2_PRIME: &str = include_str!("../fixtures/pres_x2_prime.csv");
const X2_PRIME_POWER: &str = include_str!("../fixtures/pres_x2_prime_power.csv");
const XD_1MOD4: &str = include_str!("../fixtures/pres_xd_1mod4.csv");
const XD_3MOD4: &str = include_str!("../fixtures/pres_xd_3mod4.csv");
const F9_TABLES: &str = include_str!("../fixtures/f9_square_tables.json");
const LABELED_GROUP: &str = include_str!("../fixtures/labeled_z4xz2.json");

/// Which published table a fixture row comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TableId {
    /// pres(x^2) over prime fields.
    T3,
    /// pres(x^2) over proper prime-power fields.
    T4,
    /// pres(x^d) over F_p, p = 1 mod 4.
    T8,
    /// pres(x^d) over F_p, p = 3 mod 4.
    T9,
}

impl TableId {
    pub const ALL: [TableId; 4] = [TableId::T3, TableId::T4, TableId::T8, TableId::T9];
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableId::T3 => "T3",
            TableId::T4 => "T4",
            TableId::T8 => "T8",
            TableId::T9 => "T9",
        })
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T3" => Ok(TableId::T3),
            "T4" => Ok(TableId::T4),
            "T8" => Ok(TableId::T8),
            "T9" => Ok(TableId::T9),
            _ => Err(Error::Precondition(format!("unknown table `{s}` (expected T3, T4, T8 or T9)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReproRow {
    pub table: TableId,
    pub q: u64,
    pub p: u32,
    pub e: u32,
    /// Explicit field modulus, constant term first.
    pub modulus: Option<Vec<u32>>,
    pub d: u64,
    pub pres: usize,
    pub u: Option<usize>,
    pub upper: Option<usize>,
}

impl ReproRow {
    pub fn group_spec(&self) -> String {
        match &self.modulus {
            Some(m) => {
                let coeffs: Vec<String> = m.iter().map(u32::to_string).collect();
                format!("gf:{}:poly={}", self.q, coeffs.join(","))
            }
            None => format!("gf:{}^{}", self.p, self.e),
        }
    }
}

fn bad(table: TableId, line: usize, reason: impl Into<String>) -> Error {
    Error::Precondition(format!("fixture {table} line {line}: {}", reason.into()))
}

fn num<T: FromStr>(table: TableId, line: usize, field: &str) -> Result<T> {
    field.trim().parse().map_err(|_| bad(table, line, format!("`{field}` is not a number")))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().skip(1).filter(|(_, l)| !l.trim().is_empty()).map(|(i, l)| (i + 1, l.split(',').collect()))
}

/// Loads one table and checks it: `q` is a prime power, and for the `x^d`
/// tables `u = d`, `d | p - 1` and `upper = p - (p - 1)/d`.
pub fn load_table(table: TableId) -> Result<Vec<ReproRow>> {
    let mut rows = Vec::new();
    match table {
        TableId::T3 => {
            for (line, f) in data_lines(X2_PRIME) {
                let [p, pres] = f[..] else { return Err(bad(table, line, "expected 2 fields")) };
                let p: u32 = num(table, line, p)?;
                rows.push(ReproRow {
                    table,
                    q: p as u64,
                    p,
                    e: 1,
                    modulus: None,
                    d: 2,
                    pres: num(table, line, pres)?,
                    u: None,
                    upper: None,
                });
            }
        }
        TableId::T4 => {
            for (line, f) in data_lines(X2_PRIME_POWER) {
                let [q, p, e, modulus, pres] = f[..] else { return Err(bad(table, line, "expected 5 fields")) };
                let modulus = if modulus.trim().is_empty() {
                    None
                } else {
                    Some(modulus.split_whitespace().map(|c| num(table, line, c)).collect::<Result<Vec<u32>>>()?)
                };
                rows.push(ReproRow {
                    table,
                    q: num(table, line, q)?,
                    p: num(table, line, p)?,
                    e: num(table, line, e)?,
                    modulus,
                    d: 2,
                    pres: num(table, line, pres)?,
                    u: None,
                    upper: None,
                });
            }
        }
        TableId::T8 | TableId::T9 => {
            let text = if table == TableId::T8 { XD_1MOD4 } else { XD_3MOD4 };
            for (line, f) in data_lines(text) {
                let [p, d, u, pres, upper] = f[..] else { return Err(bad(table, line, "expected 5 fields")) };
                let p: u32 = num(table, line, p)?;
                rows.push(ReproRow {
                    table,
                    q: p as u64,
                    p,
                    e: 1,
                    modulus: None,
                    d: num(table, line, d)?,
                    pres: num(table, line, pres)?,
                    u: Some(num(table, line, u)?),
                    upper: Some(num(table, line, upper)?),
                });
            }
        }
    }
    for (i, row) in rows.iter().enumerate() {
        let line = i + 2;
        if prime_power(row.q) != Some((row.p, row.e)) {
            return Err(bad(table, line, format!("{} is not {}^{}", row.q, row.p, row.e)));
        }
        if let (Some(u), Some(upper)) = (row.u, row.upper) {
            let p = row.p as u64;
            if u as u64 != row.d || !(p - 1).is_multiple_of(row.d) {
                return Err(bad(table, line, "u(x^d) must equal d with d | p - 1"));
            }
            if upper as u64 != p - (p - 1) / row.d {
                return Err(bad(table, line, "upper bound must be p - (p-1)/d"));
            }
            if row.pres < u || row.pres > upper {
                return Err(bad(table, line, "pres outside [u, upper]"));
            }
        }
    }
    Ok(rows)
}

/// Labelled tables of `x^2` over F9 with modulus `x^2 + 2x + 2`.
#[derive(Clone, Debug, Deserialize)]
pub struct F9Tables {
    pub modulus: Vec<u32>,
    /// Label (`a` is the primitive root) to element index.
    pub labels: BTreeMap<String, usize>,
    pub subtraction: LabeledTable,
    pub decompressed: LabeledTable,
}

#[derive(Clone, Debug, Deserialize)]
pub struct LabeledTable {
    pub columns: Vec<String>,
    #[serde(default)]
    pub column_images: Vec<String>,
    pub rows: Vec<LabeledRow>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct LabeledRow {
    pub row: String,
    pub entries: Vec<String>,
    /// Positions of the selected cells within `entries`.
    pub shaded: Vec<usize>,
}

impl F9Tables {
    pub fn index(&self, label: &str) -> usize {
        self.labels[label]
    }
}

pub fn f9_square_tables() -> F9Tables {
    serde_json::from_str(F9_TABLES).expect("embedded fixture parses")
}

/// `Z4 x Z2` with element `i` playing the label `a_i` (`a_0 = 0`).
pub fn labeled_example_group() -> Group {
    #[derive(Deserialize)]
    struct Cayley {
        table: Vec<Vec<usize>>,
    }
    let parsed: Cayley = serde_json::from_str(LABELED_GROUP).expect("embedded fixture parses");
    Group::from_cayley(&parsed.table).expect("embedded fixture is a group")
}
