//! Points, closed ranges and the three planar metrics.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite_value()) {
            return Err(Error::InvalidInput("point coordinates must be finite".into()));
        }
        Ok(Self { coords })
    }

    /// Planar point from two coordinates.
    pub fn xy(x: S, y: S) -> Self {
        Self { coords: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> &S {
        &self.coords[axis]
    }

    /// The 45° rotation (x, y) ↦ (x + y, x − y) that maps L1 balls to axis boxes.
    pub fn rotated45(&self) -> Self {
        debug_assert_eq!(self.dim(), 2);
        let (x, y) = (&self.coords[0], &self.coords[1]);
        Self::xy(x.clone() + y.clone(), x.clone() - y.clone())
    }
}

/// A closed geometric range.
#[derive(Debug, Clone, PartialEq)]
pub enum Range<S> {
    Box { lo: Point<S>, hi: Point<S> },
    /// Planar disk; the squared radius is kept so exact arithmetic never needs roots.
    Disk { center: Point<S>, radius_sq: S },
}

impl<S: Scalar> Range<S> {
    pub fn new_box(lo: Point<S>, hi: Point<S>) -> Result<Self> {
        check_dim(lo.dim(), hi.dim())?;
        if lo.coords.iter().zip(&hi.coords).any(|(a, b)| a > b) {
            return Err(Error::InvalidInput("box requires lo <= hi componentwise".into()));
        }
        Ok(Range::Box { lo, hi })
    }

    pub fn new_disk(center: Point<S>, radius: S) -> Result<Self> {
        if center.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: center.dim() });
        }
        if radius.is_negative() {
            return Err(Error::InvalidInput("disk radius must be nonnegative".into()));
        }
        let radius_sq = radius.clone() * radius;
        Ok(Range::Disk { center, radius_sq })
    }

    /// Disk given directly by its squared radius.
    pub fn disk_squared(center: Point<S>, radius_sq: S) -> Result<Self> {
        if center.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: center.dim() });
        }
        if radius_sq.is_negative() {
            return Err(Error::InvalidInput("disk radius must be nonnegative".into()));
        }
        Ok(Range::Disk { center, radius_sq })
    }

    /// Axis-parallel cube of half-side `half` around `center`.
    pub fn cube(center: &Point<S>, half: &S) -> Result<Self> {
        if half.is_negative() {
            return Err(Error::InvalidInput("ball radius must be nonnegative".into()));
        }
        let lo = center.coords.iter().map(|c| c.clone() - half.clone()).collect();
        let hi = center.coords.iter().map(|c| c.clone() + half.clone()).collect();
        Ok(Range::Box { lo: Point { coords: lo }, hi: Point { coords: hi } })
    }

    pub fn dim(&self) -> usize {
        match self {
            Range::Box { lo, .. } => lo.dim(),
            Range::Disk { .. } => 2,
        }
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Range::Box { .. })
    }

    /// Closed incidence test `p ∈ r`.
    pub fn contains(&self, p: &Point<S>) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(match self {
            Range::Box { lo, hi } => p
                .coords
                .iter()
                .zip(lo.coords.iter().zip(&hi.coords))
                .all(|(c, (a, b))| a <= c && c <= b),
            Range::Disk { center, radius_sq } => squared_l2(center, p) <= *radius_sq,
        })
    }
}

pub fn contains<S: Scalar>(r: &Range<S>, p: &Point<S>) -> Result<bool> {
    r.contains(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    L1,
    L2,
    Linf,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::L1 => "l1",
            Metric::L2 => "l2",
            Metric::Linf => "linf",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Metric::L1),
            "l2" => Ok(Metric::L2),
            "linf" | "l_inf" | "inf" => Ok(Metric::Linf),
            other => Err(Error::InvalidInput(format!("unknown metric `{other}`"))),
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn squared_l2<S: Scalar>(p: &Point<S>, q: &Point<S>) -> S {
    p.coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| {
            let d = a.clone() - b.clone();
            d.clone() * d
        })
        .sum()
}

/// Squared Euclidean distance; exact in rational mode.
pub fn distance_sq<S: Scalar>(p: &Point<S>, q: &Point<S>) -> Result<S> {
    check_dim(p.dim(), q.dim())?;
    Ok(squared_l2(p, q))
}

/// The requested norm of `p − q`. L2 goes through [`Scalar::sqrt_approx`].
pub fn distance<S: Scalar>(metric: Metric, p: &Point<S>, q: &Point<S>) -> Result<S> {
    check_dim(p.dim(), q.dim())?;
    let diffs = p.coords.iter().zip(&q.coords).map(|(a, b)| (a.clone() - b.clone()).abs());
    Ok(match metric {
        Metric::L1 => diffs.sum(),
        Metric::Linf => diffs.fold(S::zero(), crate::scalar::max_of),
        Metric::L2 => squared_l2(p, q).sqrt_approx(),
    })
}

/// `distance(metric, p, q) <= lambda`, with L2 decided on squares.
pub fn within<S: Scalar>(metric: Metric, p: &Point<S>, q: &Point<S>, lambda: &S) -> Result<bool> {
    if lambda.is_negative() {
        return Ok(false);
    }
    match metric {
        Metric::L2 => Ok(distance_sq(p, q)? <= lambda.clone() * lambda.clone()),
        _ => Ok(distance(metric, p, q)? <= *lambda),
    }
}
