//! CSV instance files.
//!
//! Points: `x,y[,...coords][,supply]`. Ranges: `box,lo...,hi...[,demand]` or
//! `disk,cx,cy,radius[,demand]`. Diagrams: `birth,death`. Blank lines and
//! lines starting with `#` are skipped; missing weights default to 1.

use std::path::Path;

use geomatch::{Error, PersistenceDiagram, Point, Range, Result, Scalar};

/// Non-empty, non-comment lines with their 1-based line numbers.
pub struct Rows {
    rows: Vec<(usize, Vec<String>)>,
}

impl Rows {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Ok(Self::parse(&text))
    }

    pub fn parse(text: &str) -> Self {
        let rows = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(i, l)| (i + 1, l.split(',').map(|f| f.trim().to_string()).collect()))
            .collect();
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Dimension implied by the first box row, if any.
    pub fn box_dim(&self) -> Option<usize> {
        self.rows.iter().find(|(_, f)| f[0].eq_ignore_ascii_case("box")).map(|(_, f)| (f.len() - 1) / 2)
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn scalar<S: Scalar>(line: usize, field: &str) -> Result<S> {
    S::parse_scalar(field).ok_or_else(|| parse_error(line, format!("`{field}` is not a number")))
}

fn weight<S: Scalar>(line: usize, field: Option<&String>) -> Result<S> {
    match field {
        None => Ok(S::one()),
        Some(f) => {
            let w: S = scalar(line, f)?;
            if w < S::zero() {
                return Err(parse_error(line, "negative weight"));
            }
            Ok(w)
        }
    }
}

fn point<S: Scalar>(line: usize, fields: &[String]) -> Result<Point<S>> {
    let coords = fields.iter().map(|f| scalar(line, f)).collect::<Result<Vec<S>>>()?;
    Point::new(coords).map_err(|e| parse_error(line, e.to_string()))
}

/// Points of dimension `dim`, each with an optional trailing supply.
pub fn points<S: Scalar>(rows: &Rows, dim: usize) -> Result<(Vec<Point<S>>, Vec<S>)> {
    let mut pts = Vec::with_capacity(rows.len());
    let mut supplies = Vec::with_capacity(rows.len());
    for (line, f) in &rows.rows {
        if f.len() != dim && f.len() != dim + 1 {
            return Err(parse_error(*line, format!("expected {dim} coordinates and an optional supply, found {} fields", f.len())));
        }
        pts.push(point(*line, &f[..dim])?);
        supplies.push(weight(*line, f.get(dim))?);
    }
    Ok((pts, supplies))
}

pub fn ranges<S: Scalar>(rows: &Rows, dim: usize) -> Result<(Vec<Range<S>>, Vec<S>)> {
    let mut out = Vec::with_capacity(rows.len());
    let mut demands = Vec::with_capacity(rows.len());
    for (line, f) in &rows.rows {
        let line = *line;
        let rest = &f[1..];
        let (range, tail) = match f[0].to_ascii_lowercase().as_str() {
            "box" => {
                if rest.len() != 2 * dim && rest.len() != 2 * dim + 1 {
                    return Err(parse_error(line, format!("box needs {} corner coordinates", 2 * dim)));
                }
                let lo = point(line, &rest[..dim])?;
                let hi = point(line, &rest[dim..2 * dim])?;
                (Range::new_box(lo, hi).map_err(|e| parse_error(line, e.to_string()))?, rest.get(2 * dim))
            }
            "disk" => {
                if rest.len() != 3 && rest.len() != 4 {
                    return Err(parse_error(line, "disk needs cx,cy,radius"));
                }
                let center = point(line, &rest[..2])?;
                let radius = scalar(line, &rest[2])?;
                (Range::new_disk(center, radius).map_err(|e| parse_error(line, e.to_string()))?, rest.get(3))
            }
            other => return Err(parse_error(line, format!("unknown range kind `{other}`"))),
        };
        out.push(range);
        demands.push(weight(line, tail)?);
    }
    Ok((out, demands))
}

pub fn diagram<S: Scalar>(rows: &Rows) -> Result<PersistenceDiagram<S>> {
    let mut pts = Vec::with_capacity(rows.len());
    for (line, f) in &rows.rows {
        if f.len() != 2 {
            return Err(parse_error(*line, "expected birth,death"));
        }
        let (b, d) = (scalar::<S>(*line, &f[0])?, scalar::<S>(*line, &f[1])?);
        if d <= b {
            return Err(parse_error(*line, "death must exceed birth"));
        }
        pts.push((b, d));
    }
    PersistenceDiagram::new(pts)
}
