//! Bottleneck matchings under L∞, L1 and L2, and the bottleneck distance of
//! persistence diagrams.
//!
//! Every search bisects over ranks of a candidate multiset that is known to
//! contain λ*: for L∞/L1 the entries of four implicit sorted matrices of
//! coordinate differences, for L2 the squared pairwise distances. Each probe is
//! a flow decision on a biclique cover of the distance-≤-λ graph.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::cover::{box_cover, trivial_cover, BicliqueCover};
use crate::error::{Error, Result};
use crate::flow::{build_network, flow_to_matching, max_flow_dinitz, Matching, SupplyDemand};
use crate::geometry::{Metric, Point, Range};
use crate::scalar::Scalar;

/// Implicit matrix `M(i, j) = rows[i] − cols[j]` over ascending sequences, so
/// columns increase downward and rows decrease to the right.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedMatrix<S> {
    rows: Vec<S>,
    cols: Vec<S>,
}

impl<S: Scalar> SortedMatrix<S> {
    pub fn new(mut rows: Vec<S>, mut cols: Vec<S>) -> Self {
        rows.sort_by(Scalar::total_cmp);
        cols.sort_by(Scalar::total_cmp);
        Self { rows, cols }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn len(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> S {
        self.rows[i].clone() - self.cols[j].clone()
    }

    /// Per row, the number of entries `< v` (or `<= v` when `inclusive`).
    /// Row `i` counts a suffix of columns; the suffix start only moves right
    /// as `i` grows, so one sweep suffices.
    fn row_counts(&self, v: &S, inclusive: bool) -> Vec<usize> {
        let m = self.cols.len();
        let mut out = Vec::with_capacity(self.rows.len());
        let mut start = 0;
        for a in &self.rows {
            // entry < v  ⟺  col > a − v ;  entry <= v  ⟺  col >= a − v
            let t = a.clone() - v.clone();
            while start < m && (if inclusive { self.cols[start] < t } else { self.cols[start] <= t }) {
                start += 1;
            }
            out.push(m - start);
        }
        out
    }

    pub fn count_lt(&self, v: &S) -> usize {
        self.row_counts(v, false).iter().sum()
    }

    pub fn count_le(&self, v: &S) -> usize {
        self.row_counts(v, true).iter().sum()
    }
}

/// The four matrices of signed coordinate differences between two planar sets.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceMatrices<S> {
    pub d_x: SortedMatrix<S>,
    pub d_x_bar: SortedMatrix<S>,
    pub d_y: SortedMatrix<S>,
    pub d_y_bar: SortedMatrix<S>,
}

impl<S: Scalar> DifferenceMatrices<S> {
    pub fn as_slice(&self) -> [&SortedMatrix<S>; 4] {
        [&self.d_x, &self.d_x_bar, &self.d_y, &self.d_y_bar]
    }
}

pub fn build_sorted_matrices<S: Scalar>(p: &[Point<S>], q: &[Point<S>]) -> Result<DifferenceMatrices<S>> {
    check_planar(p)?;
    check_planar(q)?;
    let axis = |pts: &[Point<S>], k: usize| pts.iter().map(|x| x.coord(k).clone()).collect::<Vec<_>>();
    Ok(DifferenceMatrices {
        d_x: SortedMatrix::new(axis(p, 0), axis(q, 0)),
        d_x_bar: SortedMatrix::new(axis(q, 0), axis(p, 0)),
        d_y: SortedMatrix::new(axis(p, 1), axis(q, 1)),
        d_y_bar: SortedMatrix::new(axis(q, 1), axis(p, 1)),
    })
}

fn check_planar<S: Scalar>(pts: &[Point<S>]) -> Result<()> {
    match pts.iter().find(|x| x.dim() != 2) {
        Some(x) => Err(Error::DimensionMismatch { expected: 2, found: x.dim() }),
        None => Ok(()),
    }
}

/// The `k`-th smallest (1-based) entry of the union of `mats`, by random
/// pivots drawn from the shrinking open value window.
pub fn select_kth<S: Scalar>(mats: &[&SortedMatrix<S>], k: usize, rng: &mut StdRng) -> Result<S> {
    let total: usize = mats.iter().map(|m| m.len()).sum();
    if k == 0 || k > total {
        return Err(Error::InvalidInput(format!("rank {k} outside 1..={total}")));
    }
    let mut lo: Option<S> = None;
    let mut hi: Option<S> = None;
    loop {
        // per row, window entries occupy columns [m − lt(hi), m − le(lo))
        let mut spans = Vec::new();
        let mut weight = 0usize;
        for (mi, m) in mats.iter().enumerate() {
            let ncols = m.cols.len();
            let upto = hi.as_ref().map(|h| m.row_counts(h, false));
            let below = lo.as_ref().map(|l| m.row_counts(l, true));
            for i in 0..m.rows.len() {
                let first = ncols - upto.as_ref().map_or(ncols, |u| u[i]);
                let last = ncols - below.as_ref().map_or(0, |b| b[i]);
                if last > first {
                    spans.push((mi, i, first, last));
                    weight += last - first;
                }
            }
        }
        if weight == 0 {
            return Err(Error::Internal("selection window became empty".into()));
        }
        let mut pick = rng.gen_range(0..weight);
        let (mi, i, first, _) = *spans
            .iter()
            .find(|&&(_, _, a, b)| {
                if pick < b - a {
                    true
                } else {
                    pick -= b - a;
                    false
                }
            })
            .expect("pick within total weight");
        let pivot = mats[mi].entry(i, first + pick);
        let lt: usize = mats.iter().map(|m| m.count_lt(&pivot)).sum();
        let le: usize = mats.iter().map(|m| m.count_le(&pivot)).sum();
        if k <= lt {
            hi = Some(pivot);
        } else if k <= le {
            return Ok(pivot);
        } else {
            lo = Some(pivot);
        }
    }
}

/// Outcome of a single decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision<S> {
    pub feasible: bool,
    pub matching: Matching<S>,
}

/// Distance threshold; L2 thresholds are carried squared.
#[derive(Debug, Clone, PartialEq)]
enum Threshold<S> {
    Plain(S),
    Squared(S),
}

fn decision_cover<S: Scalar>(p: &[Point<S>], q: &[Point<S>], metric: Metric, t: &Threshold<S>) -> Result<BicliqueCover> {
    match (metric, t) {
        (Metric::Linf, Threshold::Plain(l)) => {
            let ranges = q.iter().map(|c| Range::cube(c, l)).collect::<Result<Vec<_>>>()?;
            box_cover(p, &ranges)
        }
        (Metric::L1, Threshold::Plain(l)) => {
            check_planar(p)?;
            check_planar(q)?;
            let rp: Vec<Point<S>> = p.iter().map(Point::rotated45).collect();
            let ranges = q.iter().map(|c| Range::cube(&c.rotated45(), l)).collect::<Result<Vec<_>>>()?;
            box_cover(&rp, &ranges)
        }
        (Metric::L2, Threshold::Squared(l2)) => {
            let ranges = q.iter().map(|c| Range::disk_squared(c.clone(), l2.clone())).collect::<Result<Vec<_>>>()?;
            trivial_cover(p, &ranges)
        }
        (Metric::L2, Threshold::Plain(l)) => decision_cover(p, q, metric, &Threshold::Squared(l.clone() * l.clone())),
        (_, Threshold::Squared(_)) => Err(Error::Internal("squared threshold for a box metric".into())),
    }
}

fn decide_on<S: Scalar>(cover: &BicliqueCover, sd: &SupplyDemand<S>) -> Result<Decision<S>> {
    let net = build_network(cover, sd)?;
    let flow = max_flow_dinitz(&net)?;
    let target = sd.target();
    let feasible = !(target - flow.value.clone()).is_pos();
    Ok(Decision { feasible, matching: flow_to_matching(&flow, &net, cover)? })
}

fn decide_threshold<S: Scalar>(
    p: &[Point<S>],
    q: &[Point<S>],
    sd: &SupplyDemand<S>,
    metric: Metric,
    t: &Threshold<S>,
) -> Result<Decision<S>> {
    let negative = match t {
        Threshold::Plain(l) | Threshold::Squared(l) => l.is_negative(),
    };
    if negative {
        return Ok(Decision { feasible: false, matching: Matching::new() });
    }
    decide_on(&decision_cover(p, q, metric, t)?, sd)
}

/// Does the graph joining `p ∈ P` to `q ∈ Q` whenever `‖p − q‖ ≤ λ` have a
/// perfect matching? Negative `λ` is infeasible.
pub fn decide<S: Scalar>(p: &[Point<S>], q: &[Point<S>], metric: Metric, lambda: &S) -> Result<Decision<S>> {
    if p.len() != q.len() {
        return Err(Error::InvalidInput(format!("perfect matching needs |P| = |Q| (got {} and {})", p.len(), q.len())));
    }
    decide_threshold(p, q, &SupplyDemand::unit(p.len(), q.len()), metric, &Threshold::Plain(lambda.clone()))
}

/// Many-to-many variant: feasible iff the matching reaches the target value
/// `min(total supply, total demand)`.
pub fn decide_many<S: Scalar>(
    p: &[Point<S>],
    q: &[Point<S>],
    sd: &SupplyDemand<S>,
    metric: Metric,
    lambda: &S,
) -> Result<Decision<S>> {
    check_sd(p, q, sd)?;
    decide_threshold(p, q, sd, metric, &Threshold::Plain(lambda.clone()))
}

fn check_sd<S: Scalar>(p: &[Point<S>], q: &[Point<S>], sd: &SupplyDemand<S>) -> Result<()> {
    if sd.supplies().len() != p.len() || sd.demands().len() != q.len() {
        return Err(Error::InvalidInput("supply/demand lengths differ from the point sets".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BottleneckResult<S> {
    pub metric: Metric,
    /// λ*; under L2 a square root of `lambda_star_sq`, exact only when that is a perfect square.
    pub lambda_star: S,
    pub lambda_star_sq: Option<S>,
    pub matching: Matching<S>,
    /// Number of flow decisions made by the search.
    pub decisions: usize,
}

impl<S: Scalar> BottleneckResult<S> {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "lambda_star": self.lambda_star.to_json(),
            "metric": self.metric.name(),
            "matching": self.matching.to_json(),
            "decisions": self.decisions,
        });
        if let Some(sq) = &self.lambda_star_sq {
            v["lambda_star_sq"] = sq.to_json();
            v["lambda_star_approx"] = serde_json::json!(sq.to_f64().map(f64::sqrt));
        }
        v
    }
}

/// Above this many pairs the L2 candidates are selected implicitly instead of sorted.
pub const MATERIALIZE_LIMIT: usize = 10_000_000;

/// Smallest rank in `lo..=hi` whose candidate is feasible, given that rank `hi` is.
fn bisect_ranks<S: Scalar>(
    mut lo: usize,
    mut hi: usize,
    mut candidate: impl FnMut(usize) -> Result<S>,
    mut feasible: impl FnMut(&S) -> Result<Option<Decision<S>>>,
) -> Result<(S, Decision<S>)> {
    let top = candidate(hi)?;
    let mut best = match feasible(&top)? {
        Some(d) => (top, d),
        None => return Err(Error::Internal("largest candidate is infeasible".into())),
    };
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let v = candidate(mid)?;
        match feasible(&v)? {
            Some(d) => {
                hi = mid;
                best = (v, d);
            }
            None => lo = mid + 1,
        }
    }
    Ok(best)
}

fn search<S: Scalar>(
    p: &[Point<S>],
    q: &[Point<S>],
    sd: &SupplyDemand<S>,
    metric: Metric,
    seed: u64,
) -> Result<BottleneckResult<S>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut decisions = 0usize;
    if p.is_empty() || q.is_empty() {
        return Ok(BottleneckResult {
            metric,
            lambda_star: S::zero(),
            lambda_star_sq: (metric == Metric::L2).then(S::zero),
            matching: Matching::new(),
            decisions,
        });
    }
    let mut probe = |t: Threshold<S>| -> Result<Option<Decision<S>>> {
        decisions += 1;
        let d = decide_threshold(p, q, sd, metric, &t)?;
        Ok(d.feasible.then_some(d))
    };
    let (lambda, decision, sq) = match metric {
        Metric::Linf | Metric::L1 => {
            let (pp, qq): (Vec<Point<S>>, Vec<Point<S>>) = if metric == Metric::L1 {
                check_planar(p)?;
                check_planar(q)?;
                (p.iter().map(Point::rotated45).collect(), q.iter().map(Point::rotated45).collect())
            } else {
                (p.to_vec(), q.to_vec())
            };
            let mats = build_sorted_matrices(&pp, &qq)?;
            let all = mats.as_slice();
            let total: usize = all.iter().map(|m| m.len()).sum();
            let negatives: usize = all.iter().map(|m| m.count_lt(&S::zero())).sum();
            let (l, d) = bisect_ranks(
                negatives + 1,
                total,
                |k| select_kth(&all, k, &mut rng),
                |v| probe(Threshold::Plain(v.clone())),
            )?;
            (l, d, None)
        }
        Metric::L2 => {
            check_planar(p)?;
            check_planar(q)?;
            let sq_dist = |a: &Point<S>, b: &Point<S>| {
                let (dx, dy) = (a.coord(0).clone() - b.coord(0).clone(), a.coord(1).clone() - b.coord(1).clone());
                dx.clone() * dx + dy.clone() * dy
            };
            let pairs = p.len() * q.len();
            let (l2, d) = if pairs <= MATERIALIZE_LIMIT {
                let mut cands: Vec<S> = p.iter().flat_map(|a| q.iter().map(move |b| sq_dist(a, b))).collect();
                cands.sort_by(Scalar::total_cmp);
                cands.dedup();
                let n = cands.len();
                bisect_ranks(1, n, |k| Ok(cands[k - 1].clone()), |v| probe(Threshold::Squared(v.clone())))?
            } else {
                let all = || p.iter().flat_map(|a| q.iter().map(move |b| sq_dist(a, b)));
                let mut rng2 = StdRng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
                bisect_ranks(
                    1,
                    pairs,
                    |k| select_kth_implicit(all, k, &mut rng2),
                    |v| probe(Threshold::Squared(v.clone())),
                )?
            };
            (l2.sqrt_approx(), d, Some(l2))
        }
    };
    Ok(BottleneckResult { metric, lambda_star: lambda, lambda_star_sq: sq, matching: decision.matching, decisions })
}

/// `k`-th smallest of a re-iterable unsorted sequence, by random pivots.
fn select_kth_implicit<S: Scalar, I: Iterator<Item = S>>(all: impl Fn() -> I, k: usize, rng: &mut StdRng) -> Result<S> {
    let mut lo: Option<S> = None;
    let mut hi: Option<S> = None;
    let inside = |v: &S, lo: &Option<S>, hi: &Option<S>| lo.as_ref().is_none_or(|l| v > l) && hi.as_ref().is_none_or(|h| v < h);
    loop {
        let weight = all().filter(|v| inside(v, &lo, &hi)).count();
        if weight == 0 {
            return Err(Error::InvalidInput(format!("rank {k} out of range")));
        }
        let pick = rng.gen_range(0..weight);
        let pivot = all().filter(|v| inside(v, &lo, &hi)).nth(pick).expect("pick within weight");
        let (mut lt, mut le) = (0, 0);
        for v in all() {
            if v < pivot {
                lt += 1;
            }
            if v <= pivot {
                le += 1;
            }
        }
        if k <= lt {
            hi = Some(pivot);
        } else if k <= le {
            return Ok(pivot);
        } else {
            lo = Some(pivot);
        }
    }
}

/// Bottleneck distance with a witness perfect matching. `seed` drives pivot selection.
pub fn bottleneck_search<S: Scalar>(p: &[Point<S>], q: &[Point<S>], metric: Metric, seed: u64) -> Result<BottleneckResult<S>> {
    if p.len() != q.len() {
        return Err(Error::InvalidInput(format!("perfect matching needs |P| = |Q| (got {} and {})", p.len(), q.len())));
    }
    search(p, q, &SupplyDemand::unit(p.len(), q.len()), metric, seed)
}

/// Smallest λ admitting a matching of the target value under the given supplies and demands.
pub fn bottleneck_search_many<S: Scalar>(
    p: &[Point<S>],
    q: &[Point<S>],
    sd: &SupplyDemand<S>,
    metric: Metric,
    seed: u64,
) -> Result<BottleneckResult<S>> {
    check_sd(p, q, sd)?;
    search(p, q, sd, metric, seed)
}

/// Off-diagonal points `(birth, death)` with `death > birth`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram<S> {
    points: Vec<(S, S)>,
}

impl<S: Scalar> PersistenceDiagram<S> {
    pub fn new(points: Vec<(S, S)>) -> Result<Self> {
        for (b, d) in &points {
            if !b.is_finite_value() || !d.is_finite_value() {
                return Err(Error::InvalidInput("diagram points must be finite".into()));
            }
            if d <= b {
                return Err(Error::InvalidInput(format!("diagram point ({b}, {d}) is not above the diagonal")));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(S, S)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn as_points(&self) -> Vec<Point<S>> {
        self.points.iter().map(|(b, d)| Point::xy(b.clone(), d.clone())).collect()
    }

    /// Orthogonal projections onto the diagonal.
    fn projections(&self) -> Vec<Point<S>> {
        self.points
            .iter()
            .map(|(b, d)| {
                let m = (b.clone() + d.clone()) / S::two();
                Point::xy(m.clone(), m)
            })
            .collect()
    }
}

/// Bottleneck distance `W∞(X, Y)` of two diagrams.
pub fn pd_bottleneck<S: Scalar>(x: &PersistenceDiagram<S>, y: &PersistenceDiagram<S>, seed: u64) -> Result<S> {
    Ok(pd_bottleneck_matching(x, y, seed)?.0)
}

/// `W∞(X, Y)` plus the witness on `P = X ⊔ proj(Y)`, `Q = Y ⊔ proj(X)`.
pub fn pd_bottleneck_matching<S: Scalar>(
    x: &PersistenceDiagram<S>,
    y: &PersistenceDiagram<S>,
    seed: u64,
) -> Result<(S, Matching<S>)> {
    let (nx, ny) = (x.len(), y.len());
    if nx + ny == 0 {
        return Ok((S::zero(), Matching::new()));
    }
    let x0 = x.as_points();
    let y0 = y.as_points();
    let mut p = x0.clone();
    p.extend(y.projections());
    let mut q = y0.clone();
    q.extend(x.projections());
    let n = nx + ny;

    let cover_at = |l: &S| -> Result<BicliqueCover> {
        let mut c = BicliqueCover::new(n, n);
        let around_q = q.iter().map(|c| Range::cube(c, l)).collect::<Result<Vec<_>>>()?;
        c.extend_shifted(&box_cover(&x0, &around_q)?, 0, 0)?;
        let around_y = y0.iter().map(|c| Range::cube(c, l)).collect::<Result<Vec<_>>>()?;
        c.extend_shifted(&box_cover(&p[nx..], &around_y)?, nx, 0)?;
        if nx > 0 && ny > 0 {
            c.push_part((nx..n).collect(), (ny..n).collect())?;
        }
        Ok(c)
    };
    let sd = SupplyDemand::unit(n, n);
    let mats = build_sorted_matrices(&p, &q)?;
    let all = mats.as_slice();
    let total: usize = all.iter().map(|m| m.len()).sum();
    let negatives: usize = all.iter().map(|m| m.count_lt(&S::zero())).sum();
    let mut rng = StdRng::seed_from_u64(seed);
    let (l, d) = bisect_ranks(
        negatives + 1,
        total,
        |k| select_kth(&all, k, &mut rng),
        |v| {
            let d = decide_on(&cover_at(v)?, &sd)?;
            Ok(d.feasible.then_some(d))
        },
    )?;
    Ok((l, d.matching))
}
