//! Biclique covers ("compact representations") of point/range incidence graphs.
//!
//! A cover is a list of parts `(P_i, R_i)`; the incidence graph is the union of
//! the complete bipartite graphs `K(P_i, R_i)`. Its size is `Σ |P_i| + |R_i|`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Point, Range};
use crate::oracle;
use crate::scalar::Scalar;

/// Pair limit for [`validate_cover`].
pub const VALIDATE_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub points: Vec<usize>,
    pub ranges: Vec<usize>,
}

impl Part {
    pub fn size(&self) -> usize {
        self.points.len() + self.ranges.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BicliqueCover {
    left_count: usize,
    right_count: usize,
    parts: Vec<Part>,
}

impl BicliqueCover {
    pub fn new(left_count: usize, right_count: usize) -> Self {
        Self { left_count, right_count, parts: Vec::new() }
    }

    /// Adds a part; indices are sorted and must be in bounds and distinct.
    /// Parts with an empty side carry no edges and are dropped.
    pub fn push_part(&mut self, mut points: Vec<usize>, mut ranges: Vec<usize>) -> Result<()> {
        points.sort_unstable();
        ranges.sort_unstable();
        check_side(&points, self.left_count, "point")?;
        check_side(&ranges, self.right_count, "range")?;
        if !points.is_empty() && !ranges.is_empty() {
            self.parts.push(Part { points, ranges });
        }
        Ok(())
    }

    /// Appends all parts of `other`, shifting its indices by the given offsets.
    pub fn extend_shifted(&mut self, other: &BicliqueCover, point_offset: usize, range_offset: usize) -> Result<()> {
        for part in &other.parts {
            let pts = part.points.iter().map(|&p| p + point_offset).collect();
            let rgs = part.ranges.iter().map(|&r| r + range_offset).collect();
            self.push_part(pts, rgs)?;
        }
        Ok(())
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    /// σ = Σ (|P_i| + |R_i|).
    pub fn size(&self) -> usize {
        self.parts.iter().map(Part::size).sum()
    }

    /// For every point, the indices of the parts that contain it.
    pub fn point_index(&self) -> Vec<Vec<usize>> {
        let mut index = vec![Vec::new(); self.left_count];
        for (i, part) in self.parts.iter().enumerate() {
            for &p in &part.points {
                index[p].push(i);
            }
        }
        index
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count_with_multiplicity(&self) -> u128 {
        self.parts.iter().map(|p| p.points.len() as u128 * p.ranges.len() as u128).sum()
    }

    /// Line-oriented text form: `sigma=<s> parts=<k>` then `P: .. | R: ..` per part.
    pub fn to_text(&self) -> String {
        let mut out = format!("sigma={} parts={}\n", self.size(), self.parts.len());
        for part in &self.parts {
            out.push_str("P:");
            for p in &part.points {
                let _ = write!(out, " {p}");
            }
            out.push_str(" | R:");
            for r in &part.ranges {
                let _ = write!(out, " {r}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. The point/range counts are not
    /// part of the format, so they are supplied by the caller.
    pub fn from_text(text: &str, left_count: usize, right_count: usize) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
        let (sigma, parts) = parse_header(header)?;
        let mut cover = BicliqueCover::new(left_count, right_count);
        let mut seen = 0usize;
        for (i, line) in lines {
            let lineno = i + 1;
            let parse_err = |message: String| Error::Parse { line: lineno, message };
            let (lhs, rhs) = line.split_once('|').ok_or_else(|| parse_err("expected `P: ... | R: ...`".into()))?;
            let pts = parse_indices(lhs, "P:").map_err(parse_err)?;
            let rgs = parse_indices(rhs, "R:").map_err(parse_err)?;
            if pts.is_empty() || rgs.is_empty() {
                return Err(parse_err("parts must have nonempty sides".into()));
            }
            cover.push_part(pts, rgs).map_err(|e| parse_err(e.to_string()))?;
            seen += 1;
        }
        if seen != parts {
            return Err(Error::Parse { line: 1, message: format!("header announces {parts} parts, found {seen}") });
        }
        if cover.size() != sigma {
            return Err(Error::Parse { line: 1, message: format!("header announces sigma={sigma}, found {}", cover.size()) });
        }
        Ok(cover)
    }
}

impl FromStr for BicliqueCover {
    type Err = Error;

    /// Infers the point/range counts from the largest index present.
    fn from_str(s: &str) -> Result<Self> {
        let loose = Self::from_text(s, usize::MAX, usize::MAX)?;
        let left = loose.parts.iter().flat_map(|p| p.points.last()).max().map_or(0, |m| m + 1);
        let right = loose.parts.iter().flat_map(|p| p.ranges.last()).max().map_or(0, |m| m + 1);
        Ok(Self { left_count: left, right_count: right, parts: loose.parts })
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let err = || Error::Parse { line: 1, message: format!("bad header `{line}`") };
    let mut sigma = None;
    let mut parts = None;
    for tok in line.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(err)?;
        let v: usize = v.parse().map_err(|_| err())?;
        match k {
            "sigma" => sigma = Some(v),
            "parts" => parts = Some(v),
            _ => return Err(err()),
        }
    }
    Ok((sigma.ok_or_else(err)?, parts.ok_or_else(err)?))
}

fn parse_indices(field: &str, tag: &str) -> std::result::Result<Vec<usize>, String> {
    let body = field.trim().strip_prefix(tag).ok_or_else(|| format!("expected `{tag}`"))?;
    body.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad index `{t}`")))
        .collect()
}

fn check_side(ids: &[usize], bound: usize, what: &str) -> Result<()> {
    if let Some(&last) = ids.last() {
        if last >= bound {
            return Err(Error::InvalidInput(format!("{what} index {last} out of bounds ({bound})")));
        }
    }
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(format!("duplicate {what} index inside a part")));
    }
    Ok(())
}

pub fn cover_size(c: &BicliqueCover) -> usize {
    c.size()
}

/// One part `({p}, {r})` per incident pair.
///
/// Disk ranges are paired through a uniform grid (cell side twice the largest
/// radius) so only the 3×3 neighbourhood of a centre's cell is tested.
pub fn trivial_cover<S: Scalar>(points: &[Point<S>], ranges: &[Range<S>]) -> Result<BicliqueCover> {
    let mut cover = BicliqueCover::new(points.len(), ranges.len());
    let mut pairs = Vec::new();
    let disks: Vec<usize> = (0..ranges.len()).filter(|&r| !ranges[r].is_box()).collect();
    let boxes: Vec<usize> = (0..ranges.len()).filter(|&r| ranges[r].is_box()).collect();
    for &r in &boxes {
        for (p, pt) in points.iter().enumerate() {
            if ranges[r].contains(pt)? {
                pairs.push((p, r));
            }
        }
    }
    if !disks.is_empty() {
        grid_disk_pairs(points, ranges, &disks, &mut pairs)?;
    }
    pairs.sort_unstable();
    for (p, r) in pairs {
        cover.parts.push(Part { points: vec![p], ranges: vec![r] });
    }
    Ok(cover)
}

fn grid_disk_pairs<S: Scalar>(
    points: &[Point<S>],
    ranges: &[Range<S>],
    disks: &[usize],
    pairs: &mut Vec<(usize, usize)>,
) -> Result<()> {
    for p in points {
        if p.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
        }
    }
    let to_f = |s: &S| s.to_f64().unwrap_or(0.0);
    let mut max_r = 0f64;
    let mut max_abs = 0f64;
    for &r in disks {
        if let Range::Disk { center, radius_sq } = &ranges[r] {
            max_r = max_r.max(to_f(radius_sq).max(0.0).sqrt());
            max_abs = max_abs.max(to_f(center.coord(0)).abs()).max(to_f(center.coord(1)).abs());
        }
    }
    for p in points {
        max_abs = max_abs.max(to_f(p.coord(0)).abs()).max(to_f(p.coord(1)).abs());
    }
    // slack absorbs the rounding of the float bucket keys; the exact test decides
    let side = 2.0 * max_r * (1.0 + 1e-9) + 8.0 * f64::EPSILON * max_abs + f64::MIN_POSITIVE;
    let brute = !side.is_finite() || max_abs / side > 1e15;
    if brute {
        for &r in disks {
            for (p, pt) in points.iter().enumerate() {
                if ranges[r].contains(pt)? {
                    pairs.push((p, r));
                }
            }
        }
        return Ok(());
    }
    let cell = |x: f64, y: f64| ((x / side).floor() as i64, (y / side).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell(to_f(p.coord(0)), to_f(p.coord(1)))).or_default().push(i);
    }
    for &r in disks {
        let Range::Disk { center, .. } = &ranges[r] else { unreachable!() };
        let (cx, cy) = cell(to_f(center.coord(0)), to_f(center.coord(1)));
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    for &p in bucket {
                        if ranges[r].contains(&points[p])? {
                            pairs.push((p, r));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Edge-disjoint cover of points versus axis-parallel boxes from a multi-level
/// range tree.
///
/// Level `k` sorts the current point subset by coordinate `k` (ties by index)
/// and decomposes each box's `k`-th interval into canonical nodes of a balanced
/// tree over that order. Boxes registered at a node recurse into the node's
/// point subset on the next coordinate; at the last coordinate every node
/// carrying boxes yields one part.
pub fn box_cover<S: Scalar>(points: &[Point<S>], ranges: &[Range<S>]) -> Result<BicliqueCover> {
    let mut cover = BicliqueCover::new(points.len(), ranges.len());
    if ranges.is_empty() || points.is_empty() {
        for r in ranges {
            if !r.is_box() {
                return Err(Error::InvalidInput("box_cover requires box ranges".into()));
            }
        }
        return Ok(cover);
    }
    let d = points[0].dim();
    let mut los = Vec::with_capacity(ranges.len());
    let mut his = Vec::with_capacity(ranges.len());
    for r in ranges {
        match r {
            Range::Box { lo, hi } => {
                if lo.dim() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: lo.dim() });
                }
                los.push(lo);
                his.push(hi);
            }
            Range::Disk { .. } => return Err(Error::InvalidInput("box_cover requires box ranges".into())),
        }
    }
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
        }
    }
    let builder = RangeTreeCover { points, los: &los, his: &his, dim: d };
    let all_points: Vec<usize> = (0..points.len()).collect();
    let all_boxes: Vec<usize> = (0..ranges.len()).collect();
    builder.level(0, all_points, &all_boxes, &mut cover.parts);
    Ok(cover)
}

struct RangeTreeCover<'a, S> {
    points: &'a [Point<S>],
    los: &'a [&'a Point<S>],
    his: &'a [&'a Point<S>],
    dim: usize,
}

impl<S: Scalar> RangeTreeCover<'_, S> {
    fn level(&self, axis: usize, mut subset: Vec<usize>, boxes: &[usize], out: &mut Vec<Part>) {
        let key = |i: &usize| self.points[*i].coord(axis);
        subset.sort_by(|a, b| key(a).total_cmp(key(b)).then(a.cmp(b)));
        let n = subset.len();
        // canonical node (lo, hi) over positions in `subset`, and the boxes registered there
        let mut registered: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut order: Vec<(usize, usize)> = Vec::new();
        for &b in boxes {
            let lo = self.los[b].coord(axis);
            let hi = self.his[b].coord(axis);
            let start = subset.partition_point(|i| key(i) < lo);
            let end = subset.partition_point(|i| key(i) <= hi);
            if start >= end {
                continue;
            }
            decompose(0, n, start, end, &mut |node| {
                registered
                    .entry(node)
                    .or_insert_with(|| {
                        order.push(node);
                        Vec::new()
                    })
                    .push(b)
            });
        }
        order.sort_unstable();
        for node in order {
            let node_boxes = registered.remove(&node).unwrap_or_default();
            let node_points = subset[node.0..node.1].to_vec();
            if axis + 1 == self.dim {
                let mut pts = node_points;
                pts.sort_unstable();
                let mut rgs = node_boxes;
                rgs.sort_unstable();
                out.push(Part { points: pts, ranges: rgs });
            } else {
                self.level(axis + 1, node_points, &node_boxes, out);
            }
        }
    }
}

/// Canonical decomposition of `[start, end)` inside the balanced tree over `[lo, hi)`.
fn decompose(lo: usize, hi: usize, start: usize, end: usize, emit: &mut impl FnMut((usize, usize))) {
    if start <= lo && hi <= end {
        emit((lo, hi));
        return;
    }
    let mid = lo + (hi - lo) / 2;
    if start < mid {
        decompose(lo, mid, start, end, emit);
    }
    if end > mid {
        decompose(mid, hi, start, end, emit);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub edge_set_ok: bool,
    pub edge_disjoint: bool,
    /// Incident pairs not covered by any part.
    pub missing: Vec<(usize, usize)>,
    /// Covered pairs that are not incident.
    pub extra: Vec<(usize, usize)>,
    /// Number of incident pairs covered by two or more parts.
    pub multiply_covered: usize,
}

/// Compares the cover's edge union against brute-force incidences.
pub fn validate_cover<S: Scalar>(c: &BicliqueCover, points: &[Point<S>], ranges: &[Range<S>]) -> Result<CoverReport> {
    let pairs = points.len() as u128 * ranges.len() as u128;
    if pairs > VALIDATE_GUARD || c.edge_count_with_multiplicity() > VALIDATE_GUARD {
        return Err(Error::GuardExceeded { pairs, limit: VALIDATE_GUARD });
    }
    if c.left_count != points.len() || c.right_count != ranges.len() {
        return Err(Error::InvalidInput("cover counts do not match the instance".into()));
    }
    let truth = oracle::brute_force_incidences(points, ranges)?;
    let nr = ranges.len();
    let mut count = vec![0u32; points.len() * nr];
    for part in &c.parts {
        for &p in &part.points {
            for &r in &part.ranges {
                count[p * nr + r] += 1;
            }
        }
    }
    let mut is_edge = vec![false; points.len() * nr];
    for &(p, r) in truth.edges() {
        is_edge[p * nr + r] = true;
    }
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    let mut multiply_covered = 0;
    for p in 0..points.len() {
        for r in 0..nr {
            let k = p * nr + r;
            match (is_edge[k], count[k]) {
                (true, 0) => missing.push((p, r)),
                (false, c) if c > 0 => extra.push((p, r)),
                (true, c) if c > 1 => multiply_covered += 1,
                _ => {}
            }
        }
    }
    let edge_set_ok = missing.is_empty() && extra.is_empty();
    let edge_disjoint = multiply_covered == 0 && count.iter().all(|&c| c <= 1);
    Ok(CoverReport { edge_set_ok, edge_disjoint, missing, extra, multiply_covered })
}
