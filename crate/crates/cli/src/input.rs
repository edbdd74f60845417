//! Reading files and parsing argument values.

use std::path::Path;

use asdim_core::abelian::{IntegerMatrix, PresentedAbelian};
use asdim_core::cover::MetricTable;
use asdim_core::rational::parse_rational;
use asdim_core::solvable::{Bound, QuotientSpec, SeriesSpec, Witness};
use asdim_core::workbench::{parse, Workbench};
use asdim_core::{BigInt, BigRational};
use serde_json::Value;

use crate::Failure;

type Result<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))
}

pub fn load_workbench(path: &Path) -> Result<Workbench> {
    Ok(parse(&read(path)?)?)
}

pub fn parse_rational_arg(text: &str, what: &str) -> Result<BigRational> {
    parse_rational(text.trim()).ok_or_else(|| Failure::parse(format!("{what}: expected a rational p/q, got '{text}'")))
}

/// `a..b` (inclusive integer range) or a comma-separated list of rationals.
pub fn parse_t_values(text: &str) -> Result<Vec<BigRational>> {
    if let Some((a, b)) = text.split_once("..") {
        let bad = || Failure::parse(format!("t: expected an integer range a..b, got '{text}'"));
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).map(|n| BigRational::from_integer(n.into())).collect());
    }
    text.split(',').map(|t| parse_rational_arg(t, "t")).collect()
}

fn integer_of(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse()
            .map_err(|_| Failure::parse(format!("{what}: {n} is not an integer"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::parse(format!("{what}: '{s}' is not an integer"))),
        other => Err(Failure::parse(format!("{what}: expected an integer, got {other}"))),
    }
}

fn rows_of(v: &Value, what: &str) -> Result<Vec<Vec<BigInt>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Failure::parse(format!("{what}: expected a list of rows")))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Failure::parse(format!("{what}: each row must be a list")))?
                .iter()
                .map(|x| integer_of(x, what))
                .collect()
        })
        .collect()
}

/// Rows as JSON `[[a,b],[c,d]]` or as `a,b; c,d`.
pub fn parse_matrix(text: &str, cols: Option<usize>) -> Result<IntegerMatrix> {
    let t = text.trim();
    let rows: Vec<Vec<BigInt>> = if t.starts_with('[') {
        let v: Value = serde_json::from_str(t).map_err(|e| Failure::parse(format!("matrix: {e}")))?;
        rows_of(&v, "matrix")?
    } else if t.is_empty() {
        Vec::new()
    } else {
        t.split(';')
            .map(|r| {
                r.split(',')
                    .map(|x| {
                        x.trim()
                            .parse()
                            .map_err(|_| Failure::parse(format!("matrix: '{}' is not an integer", x.trim())))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    let width = match (cols, rows.first()) {
        (Some(c), _) => c,
        (None, Some(r)) => r.len(),
        (None, None) => return Err(Failure::parse("matrix has no rows; pass the column count")),
    };
    IntegerMatrix::from_rows(width, &rows).map_err(|e| Failure::parse(format!("matrix: {e}")))
}

/// Metric table JSON: `{"ids": [...], "distances": [...]}` with the upper
/// triangle in row-major order, entries as integers or `"p/q"` strings.
pub fn read_table(path: &Path) -> Result<MetricTable> {
    let v: Value =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let ids = v["ids"]
        .as_array()
        .ok_or_else(|| Failure::parse("table: 'ids' must be a list"))?
        .iter()
        .map(|x| match x {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(Failure::parse("table: ids must be strings or numbers")),
        })
        .collect::<Result<Vec<_>>>()?;
    let distances = v["distances"]
        .as_array()
        .ok_or_else(|| Failure::parse("table: 'distances' must be a list"))?
        .iter()
        .map(|x| match x {
            Value::String(s) => parse_rational_arg(s, "table distance"),
            Value::Number(n) => parse_rational_arg(&n.to_string(), "table distance"),
            _ => Err(Failure::parse("table: distances must be integers or rational strings")),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricTable::new(ids, distances)?)
}

fn quotient_of(q: &Value) -> Result<QuotientSpec> {
    let justification = q["justification"].as_str().unwrap_or("").to_string();
    if let Some(n) = q.get("free") {
        let n = n
            .as_u64()
            .ok_or_else(|| Failure::parse("series: 'free' takes a generator count"))?;
        return Ok(QuotientSpec::free(n as usize)?);
    }
    if let Some(p) = q.get("presented") {
        let n = p["generators"]
            .as_u64()
            .ok_or_else(|| Failure::parse("series: presented quotients need 'generators'"))? as usize;
        let rows = match p.get("relations") {
            Some(r) => rows_of(r, "series relations")?,
            None => Vec::new(),
        };
        let m = IntegerMatrix::from_rows(n, &rows).map_err(|e| Failure::parse(format!("series relations: {e}")))?;
        return Ok(QuotientSpec::Presented(PresentedAbelian::new(n, m)?));
    }
    if q.get("torsion").is_some_and(|t| t.as_bool() == Some(true)) {
        return Ok(QuotientSpec::torsion(justification));
    }
    match q.get("rank") {
        Some(Value::String(s)) if s == "inf" => Ok(QuotientSpec::declared(Bound::Infinite, justification)),
        Some(r) => {
            let r = r
                .as_u64()
                .ok_or_else(|| Failure::parse("series: 'rank' must be a count or \"inf\""))?;
            Ok(QuotientSpec::declared(Bound::Finite(r), justification))
        }
        None => Err(Failure::parse(
            "series: each quotient needs 'free', 'presented', 'torsion' or 'rank'",
        )),
    }
}

/// Series JSON:
/// `{"name", "quotients": [...], "polycyclic": bool, "witness": {"rank", "justification"}}`.
pub fn read_series_json(path: &Path) -> Result<SeriesSpec> {
    let v: Value =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let name = v["name"].as_str().unwrap_or("series").to_string();
    let quotients = v["quotients"]
        .as_array()
        .ok_or_else(|| Failure::parse("series: 'quotients' must be a list"))?
        .iter()
        .map(quotient_of)
        .collect::<Result<Vec<_>>>()?;
    let polycyclic = v["polycyclic"].as_bool().unwrap_or(false);
    let witness = match v.get("witness") {
        None | Some(Value::Null) => None,
        Some(w) => Some(Witness {
            rank: w["rank"]
                .as_u64()
                .ok_or_else(|| Failure::parse("series: witness needs an integer 'rank'"))?,
            justification: w["justification"].as_str().unwrap_or("").to_string(),
        }),
    };
    Ok(SeriesSpec::new(name, quotients, polycyclic, witness)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use asdim_core::rational::{frac, int};

    #[test]
    fn t_values_accept_ranges_and_lists() {
        assert_eq!(parse_t_values("1..3").unwrap(), vec![int(1), int(2), int(3)]);
        assert_eq!(parse_t_values("1/2, 2").unwrap(), vec![frac(1, 2), int(2)]);
        assert!(parse_t_values("3..1").is_err());
        assert!(parse_t_values("x").is_err());
    }

    #[test]
    fn matrices_in_both_syntaxes_agree() {
        let json = parse_matrix("[[1,-2],[3,4]]", None).unwrap();
        let plain = parse_matrix(" 1, -2 ; 3,4 ", None).unwrap();
        assert_eq!(json, plain);
        assert_eq!(parse_matrix("", Some(3)).unwrap().cols(), 3);
        assert!(parse_matrix("", None).is_err());
        assert!(parse_matrix("[[1.5]]", None).is_err());
    }

    #[test]
    fn quotients_from_json() {
        let q = |text: &str| quotient_of(&serde_json::from_str(text).unwrap());
        assert_eq!(q(r#"{"free": 2}"#).unwrap().rank(), Bound::Finite(2));
        assert_eq!(
            q(r#"{"rank": "inf", "justification": "j"}"#).unwrap().rank(),
            Bound::Infinite
        );
        assert_eq!(q(r#"{"torsion": true}"#).unwrap().rank(), Bound::Finite(0));
        let p = q(r#"{"presented": {"generators": 2, "relations": [[2, 0]]}}"#).unwrap();
        assert_eq!(p.rank(), Bound::Finite(1));
        assert!(q(r#"{"other": 1}"#).is_err());
    }
}
