#![allow(dead_code)]

use geomatch::flow::SupplyDemand;
use geomatch::oracle::{hopcroft_karp, ExplicitBipartite, NaiveRbForest};
use geomatch::rblct::{Color, RbOp};
use geomatch::scalar::{ratio, Rational};
use geomatch::{Metric, Point, Range};
use num_traits::Signed;
use rand::rngs::StdRng;
use rand::Rng;

pub fn q(v: i64) -> Rational {
    ratio(v, 1)
}

/// Coordinates on a coarse half-integer grid so ties and boundary hits are common.
pub fn coord(rng: &mut StdRng, span: i64) -> Rational {
    ratio(rng.gen_range(-2 * span..=2 * span), 2)
}

pub fn random_points(rng: &mut StdRng, n: usize, d: usize, span: i64) -> Vec<Point<Rational>> {
    (0..n).map(|_| Point::new((0..d).map(|_| coord(rng, span)).collect()).unwrap()).collect()
}

pub fn random_boxes(rng: &mut StdRng, m: usize, d: usize, span: i64) -> Vec<Range<Rational>> {
    (0..m)
        .map(|_| {
            let mut lo = Vec::with_capacity(d);
            let mut hi = Vec::with_capacity(d);
            for _ in 0..d {
                let (a, b) = (coord(rng, span), coord(rng, span));
                if a <= b {
                    lo.push(a);
                    hi.push(b);
                } else {
                    lo.push(b);
                    hi.push(a);
                }
            }
            Range::new_box(Point::new(lo).unwrap(), Point::new(hi).unwrap()).unwrap()
        })
        .collect()
}

pub fn random_disks(rng: &mut StdRng, m: usize, span: i64, radius: &Rational) -> Vec<Range<Rational>> {
    (0..m)
        .map(|_| Range::new_disk(Point::xy(coord(rng, span), coord(rng, span)), radius.clone()).unwrap())
        .collect()
}

pub fn integral_sd(rng: &mut StdRng, np: usize, nr: usize, max: i64) -> SupplyDemand<Rational> {
    SupplyDemand::new(
        (0..np).map(|_| q(rng.gen_range(1..=max))).collect(),
        (0..nr).map(|_| q(rng.gen_range(1..=max))).collect(),
    )
    .unwrap()
}

pub fn rational_sd(rng: &mut StdRng, np: usize, nr: usize) -> SupplyDemand<Rational> {
    let val = |rng: &mut StdRng| ratio(rng.gen_range(1..=40), rng.gen_range(1..=7));
    SupplyDemand::new((0..np).map(|_| val(rng)).collect(), (0..nr).map(|_| val(rng)).collect()).unwrap()
}

/// Incidence graph by direct containment, independent of any cover code.
pub fn explicit_graph(points: &[Point<Rational>], ranges: &[Range<Rational>]) -> ExplicitBipartite {
    let mut edges = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for (j, r) in ranges.iter().enumerate() {
            let inside = match r {
                Range::Box { lo, hi } => {
                    (0..p.dim()).all(|k| lo.coord(k) <= p.coord(k) && p.coord(k) <= hi.coord(k))
                }
                Range::Disk { center, radius_sq } => {
                    let dx = p.coord(0) - center.coord(0);
                    let dy = p.coord(1) - center.coord(1);
                    &dx * &dx + &dy * &dy <= *radius_sq
                }
            };
            if inside {
                edges.push((i, j));
            }
        }
    }
    ExplicitBipartite::new(points.len(), ranges.len(), edges).unwrap()
}

/// Distance used by the brute-force bottleneck oracle; L2 is returned squared.
pub fn raw_distance(metric: Metric, a: &Point<Rational>, b: &Point<Rational>) -> Rational {
    let dx = (a.coord(0) - b.coord(0)).abs();
    let dy = (a.coord(1) - b.coord(1)).abs();
    match metric {
        Metric::Linf => dx.max(dy),
        Metric::L1 => dx + dy,
        Metric::L2 => &dx * &dx + &dy * &dy,
    }
}

/// Smallest candidate value whose threshold graph has a perfect matching,
/// found by sorting all candidates and testing with Hopcroft–Karp.
pub fn brute_bottleneck(n_left: usize, n_right: usize, candidates: Vec<Rational>, edge_at: impl Fn(&Rational) -> Vec<(usize, usize)>) -> Rational {
    let mut c = candidates;
    c.sort();
    c.dedup();
    let perfect = |l: &Rational| {
        let g = ExplicitBipartite::new(n_left, n_right, edge_at(l)).unwrap();
        hopcroft_karp(&g).unwrap() == n_left
    };
    let (mut lo, mut hi) = (0, c.len() - 1);
    assert!(perfect(&c[hi]));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect(&c[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    c[lo].clone()
}

/// λ* for point sets; under L2 the squared value.
pub fn brute_point_bottleneck(metric: Metric, p: &[Point<Rational>], q: &[Point<Rational>]) -> Rational {
    let mut cands = Vec::new();
    for a in p {
        for b in q {
            cands.push(raw_distance(metric, a, b));
        }
    }
    brute_bottleneck(p.len(), q.len(), cands, |l| {
        let mut e = Vec::new();
        for (i, a) in p.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                if raw_distance(metric, a, b) <= *l {
                    e.push((i, j));
                }
            }
        }
        e
    })
}

/// Classic diagram reduction: each point may go to its own diagonal
/// projection at cost (d − b)/2, diagonal copies pair up for free.
pub fn brute_pd_bottleneck(x: &[(Rational, Rational)], y: &[(Rational, Rational)]) -> Rational {
    let (nx, ny) = (x.len(), y.len());
    if nx + ny == 0 {
        return q(0);
    }
    let linf = |a: &(Rational, Rational), b: &(Rational, Rational)| (&a.0 - &b.0).abs().max((&a.1 - &b.1).abs());
    let half = |a: &(Rational, Rational)| (&a.1 - &a.0) / q(2);
    let mut cands = vec![q(0)];
    for a in x {
        cands.push(half(a));
        for b in y {
            cands.push(linf(a, b));
        }
    }
    cands.extend(y.iter().map(half));
    // left: x_0..x_{nx−1}, then diagonal copies of y; right: y_0..y_{ny−1}, then diagonal copies of x
    brute_bottleneck(nx + ny, nx + ny, cands, |l| {
        let mut e = Vec::new();
        for (i, a) in x.iter().enumerate() {
            for (j, b) in y.iter().enumerate() {
                if linf(a, b) <= *l {
                    e.push((i, j));
                }
            }
            if half(a) <= *l {
                e.push((i, ny + i));
            }
        }
        for (j, b) in y.iter().enumerate() {
            if half(b) <= *l {
                e.push((nx + j, j));
            }
            for i in 0..nx {
                e.push((nx + j, ny + i));
            }
        }
        e
    })
}

pub fn random_diagram(rng: &mut StdRng, max: usize) -> Vec<(Rational, Rational)> {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| {
            let b = ratio(rng.gen_range(-20..=20), 2);
            let d = &b + ratio(rng.gen_range(1..=24), 2);
            (b, d)
        })
        .collect()
}

/// A random, mostly valid operation for the current naive forest; a small
/// fraction are deliberately invalid to exercise the usage errors.
pub fn random_rb_op(rng: &mut StdRng, naive: &NaiveRbForest<Rational>, max_nodes: usize) -> RbOp<Rational> {
    let n = naive.len();
    if n < 2 || (n < max_nodes && rng.gen_bool(0.02)) {
        return RbOp::MakeTree(if rng.gen_bool(0.5) { Color::Red } else { Color::Blue });
    }
    let v = rng.gen_range(0..n);
    let value = |rng: &mut StdRng| q(rng.gen_range(0..6));
    match rng.gen_range(0..100) {
        0..=29 => {
            let root = if rng.gen_bool(0.97) { naive.findroot(v).unwrap() } else { v };
            let mut w = rng.gen_range(0..n);
            for _ in 0..8 {
                if naive.color(w) != naive.color(root) && naive.findroot(w).unwrap() != root {
                    break;
                }
                w = rng.gen_range(0..n);
            }
            RbOp::Link(root, w, value(rng))
        }
        30..=41 => {
            if naive.parent(v).is_none() && rng.gen_bool(0.9) {
                // prefer a real edge
                if let Some(c) = (0..n).map(|i| (v + i) % n).find(|&u| naive.parent(u).is_some()) {
                    return RbOp::Cut(c);
                }
            }
            RbOp::Cut(v)
        }
        42..=53 => RbOp::Evert(v),
        54..=63 => RbOp::FindRoot(v),
        64..=81 => RbOp::FindBlue(v),
        _ => {
            let color = if rng.gen_bool(0.5) { Color::Red } else { Color::Blue };
            let x = if rng.gen_bool(0.5) {
                value(rng)
            } else {
                // negative amount, within the path minimum most of the time
                let mut m: Option<Rational> = None;
                let mut u = v;
                while let Some(p) = naive.parent(u) {
                    if naive.color(p) == color {
                        let val = naive.value(u).unwrap().clone();
                        m = Some(m.map_or(val.clone(), |c: Rational| c.min(val)));
                    }
                    u = p;
                }
                let cap = m.unwrap_or_else(|| q(0));
                let slack = if rng.gen_bool(0.95) { q(0) } else { q(1) };
                -(cap.min(q(rng.gen_range(0..4)))) - slack
            };
            RbOp::Add(v, color, x)
        }
    }
}
