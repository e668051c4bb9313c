//! Group-spec strings.
//!
//! ```text
//! zn:<n> | gf:<p>^<e> | gf:<q> | gf:<q>:poly=<c0,c1,...,ce> | prod:(<spec>)x(<spec>) | cayley:<path>
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};

use super::field::{prime_power, FieldContext};
use super::group::Group;

#[derive(Deserialize)]
struct CayleyFile {
    order: usize,
    table: Vec<Vec<usize>>,
}

fn spec_err(spec: &str, reason: impl Into<String>) -> Error {
    Error::GroupSpec { spec: spec.to_string(), reason: reason.into() }
}

fn parse_num(spec: &str, s: &str) -> Result<u64> {
    s.trim().parse::<u64>().map_err(|_| spec_err(spec, format!("`{s}` is not a nonnegative integer")))
}

pub fn build_group(spec: &str) -> Result<Group> {
    let spec = spec.trim();
    let (head, rest) = spec.split_once(':').ok_or_else(|| spec_err(spec, "missing `:`"))?;
    match head {
        "zn" => {
            let n = parse_num(spec, rest)? as usize;
            Group::cyclic(n)
        }
        "gf" => Group::field_additive(Arc::new(parse_field(spec, rest)?)),
        "prod" => {
            let (left, right) = split_product(spec, rest)?;
            Group::direct_product(&build_group(left)?, &build_group(right)?)
        }
        "cayley" => load_cayley(Path::new(rest)),
        other => Err(spec_err(spec, format!("unknown group kind `{other}`"))),
    }
}

fn parse_field(spec: &str, rest: &str) -> Result<FieldContext> {
    let (size, poly) = match rest.split_once(':') {
        Some((size, opt)) => {
            let coeffs = opt.strip_prefix("poly=").ok_or_else(|| spec_err(spec, "expected `poly=`"))?;
            (size, Some(coeffs))
        }
        None => (rest, None),
    };
    let (p, e) = match size.split_once('^') {
        Some((p, e)) => (parse_num(spec, p)? as u32, parse_num(spec, e)? as u32),
        None => prime_power(parse_num(spec, size)?).ok_or_else(|| spec_err(spec, "order is not a prime power"))?,
    };
    match poly {
        None => FieldContext::with_default_modulus(p, e),
        Some(list) => {
            let coeffs: Vec<u32> =
                list.split(',').map(|c| parse_num(spec, c).map(|v| v as u32)).collect::<Result<_>>()?;
            if coeffs.len() != e as usize + 1 {
                return Err(spec_err(spec, format!("modulus must have degree {e}")));
            }
            FieldContext::new(p, coeffs)
        }
    }
}

/// Splits `(<a>)x(<b>)` at the top-level `)x(`.
fn split_product<'a>(spec: &str, rest: &'a str) -> Result<(&'a str, &'a str)> {
    let bytes = rest.as_bytes();
    if bytes.first() != Some(&b'(') {
        return Err(spec_err(spec, "product factors must be parenthesized"));
    }
    let mut depth = 0usize;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth = depth.checked_sub(1).ok_or_else(|| spec_err(spec, "unbalanced parentheses"))?;
                if depth == 0 {
                    let left = &rest[1..i];
                    let tail = &rest[i + 1..];
                    let right = tail
                        .strip_prefix("x(")
                        .and_then(|t| t.strip_suffix(')'))
                        .ok_or_else(|| spec_err(spec, "expected `(<spec>)x(<spec>)`"))?;
                    return Ok((left, right));
                }
            }
            _ => {}
        }
    }
    Err(spec_err(spec, "unbalanced parentheses"))
}

pub fn load_cayley(path: &Path) -> Result<Group> {
    let text = std::fs::read_to_string(path)?;
    let file: CayleyFile = serde_json::from_str(&text)?;
    if file.order != file.table.len() {
        return Err(Error::NotAGroup(format!("order {} but table has {} rows", file.order, file.table.len())));
    }
    Group::from_cayley(&file.table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupKind;

    #[test]
    fn parses_each_form() {
        assert_eq!(build_group("zn:8").unwrap().order(), 8);
        let f9 = build_group("gf:9:poly=2,2,1").unwrap();
        assert_eq!(f9.field().unwrap().modulus(), &[2, 2, 1]);
        assert_eq!(build_group("gf:3^2").unwrap().field().unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(build_group("gf:31").unwrap().order(), 31);
        let g = build_group("prod:(zn:2)x(prod:(zn:2)x(zn:3))").unwrap();
        assert_eq!(g.order(), 12);
        assert!(matches!(g.kind(), GroupKind::Product(..)));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["zn", "zn:x", "gf:12", "gf:9:poly=2,0,1", "gf:9:poly=1,1", "prod:zn:2xzn:3", "foo:3", "zn:0"] {
            assert!(build_group(bad).is_err(), "{bad} should fail");
        }
        assert!(matches!(build_group("gf:9:poly=2,0,1"), Err(Error::ReducibleModulus { .. })));
    }

    #[test]
    fn cayley_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z3.json");
        std::fs::write(&path, r#"{"order":3,"table":[[0,1,2],[1,2,0],[2,0,1]]}"#).unwrap();
        let g = build_group(&format!("cayley:{}", path.display())).unwrap();
        assert_eq!(g.cayley_table(), Group::cyclic(3).unwrap().cayley_table());

        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, r#"{"order":3,"table":[[0,1,2],[1,0,2],[2,2,0]]}"#).unwrap();
        assert!(build_group(&format!("cayley:{}", bad.display())).is_err());
    }
}
