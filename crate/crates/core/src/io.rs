//! Plain-text formats. Every format ignores blank lines and `#` comments.
//!
//! * poset: an optional `b <weight>` line, then one coordinate per line;
//! * barcode: `<lo> <hi> [<multiplicity>]` with coordinates of the poset;
//! * continuous barcode: `<r> <R|inf> [<multiplicity>]`;
//! * point cloud: comma-separated coordinates, one point per line.

use std::fmt::Write as _;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::interval::{Barcode, Interval};
use crate::poset::WeightedPoset;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::refinement::{ContinuousBar, ContinuousBarcode, LimitRow};

/// Non-empty, comment-stripped lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((k + 1, line))
    })
}

fn number(line: usize, field: &str) -> Result<Rational> {
    parse_rational(field).map_err(|e| Error::parse(line, e.to_string()))
}

fn multiplicity(line: usize, field: Option<&str>) -> Result<usize> {
    match field {
        None => Ok(1),
        Some(f) => f
            .parse::<usize>()
            .ok()
            .filter(|&m| m > 0)
            .ok_or_else(|| Error::parse(line, format!("multiplicity must be a positive integer, got {f:?}"))),
    }
}

fn fields(line: usize, text: &str, min: usize, max: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = text.split_whitespace().collect();
    if f.len() < min || f.len() > max {
        return Err(Error::parse(line, format!("expected {min} to {max} fields, found {}", f.len())));
    }
    Ok(f)
}

/// Parses a poset. Points may come in any order but must be distinct; the
/// default weight applies when no `b` line is given.
pub fn parse_poset(text: &str) -> Result<WeightedPoset> {
    let mut weight = None;
    let mut points: Vec<(Rational, usize)> = Vec::new();
    for (line, body) in content_lines(text) {
        let f = fields(line, body, 1, 2)?;
        if f[0] == "b" {
            if f.len() != 2 {
                return Err(Error::parse(line, "expected `b <weight>`"));
            }
            if weight.is_some() || !points.is_empty() {
                return Err(Error::parse(line, "the `b` line must come first and only once"));
            }
            weight = Some(number(line, f[1])?);
        } else if f.len() == 1 {
            points.push((number(line, f[0])?, line));
        } else {
            return Err(Error::parse(line, "expected one coordinate per line"));
        }
    }
    if points.is_empty() {
        return Err(Error::Validation("poset has no points".into()));
    }
    points.sort();
    if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::parse(w[1].1, format!("duplicate point {}", format_rational(&w[1].0))));
    }
    let coords: Vec<Rational> = points.into_iter().map(|(x, _)| x).collect();
    match weight {
        Some(b) => WeightedPoset::new(coords, b),
        None => WeightedPoset::with_default_weight(coords),
    }
}

pub fn format_poset(poset: &WeightedPoset) -> String {
    let mut out = format!("b {}\n", format_rational(poset.weight()));
    for x in poset.points() {
        let _ = writeln!(out, "{}", format_rational(x));
    }
    out
}

/// Parses bars whose endpoints are points of `poset`.
pub fn parse_barcode(text: &str, poset: &WeightedPoset) -> Result<Barcode> {
    let mut out = Barcode::new();
    for (line, body) in content_lines(text) {
        let f = fields(line, body, 2, 3)?;
        let locate = |s: &str| -> Result<usize> {
            let x = number(line, s)?;
            poset
                .index_of(&x)
                .ok_or_else(|| Error::parse(line, format!("{} is not a point of the poset", format_rational(&x))))
        };
        let (lo, hi) = (locate(f[0])?, locate(f[1])?);
        let bar = Interval::new(lo, hi).map_err(|e| Error::parse(line, e.to_string()))?;
        out.insert(bar, multiplicity(line, f.get(2).copied())?);
    }
    Ok(out)
}

pub fn format_barcode(poset: &WeightedPoset, barcode: &Barcode) -> String {
    let mut out = String::new();
    for &(bar, m) in barcode.entries() {
        let _ = writeln!(
            out,
            "{} {} {}",
            format_rational(&poset.points()[bar.lo()]),
            format_rational(&poset.points()[bar.hi()]),
            m
        );
    }
    out
}

pub fn parse_continuous(text: &str) -> Result<ContinuousBarcode> {
    let mut out = ContinuousBarcode::new();
    for (line, body) in content_lines(text) {
        let f = fields(line, body, 2, 3)?;
        let birth = number(line, f[0])?;
        let death = match f[1] {
            "inf" | "Inf" | "INF" => None,
            s => Some(number(line, s)?),
        };
        let bar = ContinuousBar::new(birth, death).map_err(|e| Error::parse(line, e.to_string()))?;
        out.push(bar, multiplicity(line, f.get(2).copied())?);
    }
    Ok(out)
}

pub fn format_continuous(barcode: &ContinuousBarcode) -> String {
    let mut out = String::new();
    for (bar, m) in barcode.entries() {
        let death = bar.death().map_or_else(|| "inf".to_string(), format_rational);
        let _ = writeln!(out, "{} {} {}", format_rational(bar.birth()), death, m);
    }
    out
}

pub fn parse_cloud(text: &str) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let point = record.iter().map(|f| number(line, f)).collect::<Result<Vec<_>>>()?;
        points.push(point);
    }
    PointCloud::new(points)
}

pub fn format_cloud(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(format_rational).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// One value per line.
pub fn format_values(values: &[Rational]) -> String {
    values.iter().map(|v| format_rational(v) + "\n").collect()
}

/// Tab-separated table with a header row; a missing lower bound prints as `NA`.
pub fn format_limit_table(rows: &[LimitRow]) -> String {
    let mut out = String::from("step\t|X|\tmesh\tlower\tupper\tclassical\n");
    for r in rows {
        let lower = r.lower.as_ref().map_or_else(|| "NA".to_string(), format_rational);
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.step,
            r.size,
            format_rational(&r.mesh),
            lower,
            format_rational(&r.upper),
            format_rational(&r.classical)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn poset_round_trip() {
        let p = parse_poset("# sample\nb 10\n0\n1\n3  # gap\n\n4\n5\n7\n").unwrap();
        assert_eq!(p.points().len(), 6);
        assert_eq!(p.weight(), &int(10));
        assert_eq!(parse_poset(&format_poset(&p)).unwrap(), p);
        let d = parse_poset("0.5\n0\n").unwrap();
        assert_eq!(d.points(), &[int(0), ratio(1, 2)]);
        assert_eq!(d.weight(), &int(2));
    }

    #[test]
    fn poset_errors() {
        assert!(matches!(parse_poset("0\n0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_poset("0\nb 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_poset("0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_poset("x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_poset("# nothing\n").is_err());
        assert!(parse_poset("b -1\n0\n").is_err());
    }

    #[test]
    fn barcode_round_trip() {
        let p = parse_poset("b 10\n0\n1\n3\n4\n5\n7\n").unwrap();
        let b = parse_barcode("1 5 1\n3 4\n3 4 2\n", &p).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(parse_barcode(&format_barcode(&p, &b), &p).unwrap(), b);
        assert!(matches!(parse_barcode("2 5 1\n", &p), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_barcode("5 1 1\n", &p), Err(Error::Parse { .. })));
        assert!(matches!(parse_barcode("1 5 0\n", &p), Err(Error::Parse { .. })));
    }

    #[test]
    fn continuous_round_trip() {
        let b = parse_continuous("0 4 1\n1 inf\n0.25 1/3 2\n").unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(parse_continuous(&format_continuous(&b)).unwrap(), b);
        assert!(parse_continuous("3 3\n").is_err());
        assert!(parse_continuous("inf 3\n").is_err());
    }

    #[test]
    fn cloud_round_trip() {
        let c = parse_cloud("# pts\n0, 0\n1.5,2\n\n-1,1/2\n").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(parse_cloud(&format_cloud(&c)).unwrap(), c);
        assert!(parse_cloud("0,0\n1\n").is_err());
        assert!(parse_cloud("a,b\n").is_err());
        assert!(parse_cloud("").is_err());
    }
}
