//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if a hard criterion fails. Soft criteria only warn.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{
    brute_pd_bottleneck, brute_point_bottleneck, explicit_graph, integral_sd, q, random_boxes, random_diagram, random_disks,
    random_points, random_rb_op, rational_sd,
};
use geomatch::bottleneck::{bottleneck_search, pd_bottleneck, PersistenceDiagram};
use geomatch::cover::{box_cover, trivial_cover, validate_cover, BicliqueCover};
use geomatch::flow::{build_network, flow_to_matching, max_flow_dinitz, max_matching_explicit, SupplyDemand};
use geomatch::implicit_dinitz::{max_matching_implicit, max_matching_implicit_traced, PhaseState};
use geomatch::oracle::{hopcroft_karp, reference_max_flow, ExplicitBipartite, NaiveRbForest};
use geomatch::rblct::{prune_to_forest, Color, FindBlue, RbForest, RbOutput};
use geomatch::scalar::{ratio, Rational};
use geomatch::{Metric, Point, Range};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

struct Instance {
    points: Vec<Point<Rational>>,
    ranges: Vec<Range<Rational>>,
    cover: BicliqueCover,
    graph: ExplicitBipartite,
}

/// Random box (d = 1..3) or congruent-disk instance with |P| + |R| ≤ max_n.
fn instance(rng: &mut StdRng, max_n: usize, allow_disks: bool) -> Instance {
    let np = rng.gen_range(1..max_n);
    let nr = rng.gen_range(1..=max_n - np);
    let (points, ranges) = if allow_disks && rng.gen_bool(0.3) {
        let radius = ratio(rng.gen_range(1..10), 2);
        (random_points(rng, np, 2, 5), random_disks(rng, nr, 5, &radius))
    } else {
        let d = rng.gen_range(1..=3);
        (random_points(rng, np, d, 5), random_boxes(rng, nr, d, 5))
    };
    let cover = if ranges[0].is_box() { box_cover(&points, &ranges) } else { trivial_cover(&points, &ranges) }.unwrap();
    let graph = explicit_graph(&points, &ranges);
    Instance { points, ranges, cover, graph }
}

fn cover_correctness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1001);
    let (mut boxes, mut disks) = (0, 0);
    for i in 0..500 {
        let inst = instance(&mut rng, 60, true);
        let rep = ok(validate_cover(&inst.cover, &inst.points, &inst.ranges))?;
        ensure!(rep.edge_set_ok, "instance {i}: {} missing, {} extra", rep.missing.len(), rep.extra.len());
        if inst.ranges[0].is_box() {
            ensure!(rep.edge_disjoint, "instance {i}: {} pairs covered twice", rep.multiply_covered);
            boxes += 1;
        } else {
            disks += 1;
        }
    }
    Ok(format!("{boxes} box and {disks} disk instances"))
}

fn cover_size_accounting() -> Outcome {
    let mut c = BicliqueCover::new(8, 6);
    ok(c.push_part(vec![0, 1, 2], vec![0, 1]))?;
    ok(c.push_part(vec![3, 4], vec![2, 3]))?;
    ok(c.push_part(vec![5, 6, 7], vec![4, 5]))?;
    ensure!(c.size() == 14, "size {}", c.size());
    Ok("sigma = 14".into())
}

fn flow_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1003);
    for i in 0..1000 {
        let inst = instance(&mut rng, 40, true);
        let sd = integral_sd(&mut rng, inst.points.len(), inst.ranges.len(), 10);
        let net = ok(build_network(&inst.cover, &sd))?;
        let f = ok(max_flow_dinitz(&net))?;
        let m = ok(flow_to_matching(&f, &net, &inst.cover))?;
        let want = ok(reference_max_flow(&inst.graph, sd.supplies(), sd.demands()))?;
        ensure!(f.value == want && m.value() == want, "instance {i}: flow {} matching {} oracle {want}", f.value, m.value());
        ensure!(m.len() <= inst.cover.size(), "instance {i}: {} triples > sigma {}", m.len(), inst.cover.size());
        ok(m.check(&inst.points, &inst.ranges, &sd))?;
    }
    Ok("1000 instances".into())
}

fn real_valued_engine() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1004);
    let mut max_phases = 0;
    for i in 0..1000 {
        let inst = instance(&mut rng, 40, true);
        let n = inst.points.len() + inst.ranges.len();
        let sd = rational_sd(&mut rng, inst.points.len(), inst.ranges.len());
        let (m, trace) = ok(max_matching_implicit_traced(&inst.cover, &sd))?;
        let want = ok(reference_max_flow(&inst.graph, sd.supplies(), sd.demands()))?;
        ensure!(m.value() == want, "instance {i}: {} vs oracle {want}", m.value());
        ensure!(trace.len() <= n, "instance {i}: {} phases for n = {n}", trace.len());
        ensure!(trace.windows(2).all(|w| w[0].t_level < w[1].t_level), "instance {i}: level of t not increasing");
        ok(m.check(&inst.points, &inst.ranges, &sd))?;
        max_phases = max_phases.max(trace.len());
    }
    Ok(format!("1000 instances, at most {max_phases} phases"))
}

fn pruning() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1005);
    let mut largest = 0;
    for i in 0..1000 {
        let (np, nr) = (rng.gen_range(1..=40), rng.gen_range(1..=40));
        let target = rng.gen_range(0..=500).min(np * nr);
        let mut pairs = BTreeSet::new();
        while pairs.len() < target {
            pairs.insert((rng.gen_range(0..np), rng.gen_range(0..nr)));
        }
        largest = largest.max(pairs.len());
        let support: Vec<_> = pairs.into_iter().map(|(p, r)| (p, r, ratio(rng.gen_range(1..50), rng.gen_range(1..9)))).collect();
        let f = PhaseState::new(np, nr).with_support(support);
        let g = ok(prune_to_forest(&f))?;
        let n = np + nr;
        ensure!(g.support_is_forest(), "flow {i}: cycle left");
        ensure!(g.support_len() < 2 * n, "flow {i}: {} edges", g.support_len());
        ensure!(g.support().all(|(p, r, _)| f.amount(p, r).is_some()), "flow {i}: new edge");
        ensure!(g.used_supply() == f.used_supply() && g.met_demand() == f.met_demand(), "flow {i}: totals changed");
    }
    Ok(format!("1000 flows, up to {largest} support edges"))
}

fn red_blue_trees() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1006);
    let mut naive = NaiveRbForest::<Rational>::new();
    let mut fast = RbForest::<Rational>::new();
    let (mut valid, mut hits) = (0, 0);
    let mut step = 0;
    while valid < 100_000 {
        let op = random_rb_op(&mut rng, &naive, 200);
        let (want, got) = (naive.apply(&op), fast.apply(&op));
        match (&want, &got) {
            (Ok(a), Ok(b)) => {
                ensure!(a == b, "op {step} {op:?}: {b:?} vs {a:?}");
                valid += 1;
                hits += matches!(a, RbOutput::Blue(FindBlue::Edge { .. })) as usize;
            }
            (Err(_), Err(_)) => {}
            _ => return Err(format!("op {step} {op:?}: {got:?} vs {want:?}")),
        }
        if step % 1000 == 0 {
            ok(fast.check_aggregates())?;
            ensure!(fast.edges() == naive.edges(), "op {step}: edge values diverged");
        }
        step += 1;
    }
    ensure!(fast.edges() == naive.edges(), "final edge values diverged");

    // equal blue values along a path: the rootmost edge wins
    let mut f = RbForest::<Rational>::new();
    for i in 0..7 {
        f.maketree(if i % 2 == 0 { Color::Blue } else { Color::Red });
    }
    for i in 1..7 {
        ok(f.link(i, i - 1, q(2)))?;
    }
    let got = ok(f.findblue(6))?;
    ensure!(got == FindBlue::Edge { node: 1, value: q(2) }, "tie rule: {got:?}");
    Ok(format!("{valid} valid ops on {} nodes, {hits} findblue hits", naive.len()))
}

fn one_to_one() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1007);
    for i in 0..500 {
        let inst = instance(&mut rng, 60, false);
        let sd = SupplyDemand::<Rational>::unit(inst.points.len(), inst.ranges.len());
        let m = ok(max_matching_explicit(&inst.cover, &sd))?;
        let hk = ok(hopcroft_karp(&inst.graph))?;
        ensure!(m.value() == q(hk as i64), "instance {i}: {} vs {hk}", m.value());
        ensure!(m.triples().iter().all(|t| t.amount == q(1)), "instance {i}: fractional triple");
    }
    Ok("500 instances".into())
}

fn bottleneck() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1008);
    for i in 0..200 {
        let n = rng.gen_range(1..=30);
        let p = random_points(&mut rng, n, 2, 8);
        let qs = random_points(&mut rng, n, 2, 8);
        for metric in [Metric::Linf, Metric::L1, Metric::L2] {
            let got = ok(bottleneck_search(&p, &qs, metric, i))?;
            let want = brute_point_bottleneck(metric, &p, &qs);
            let got = if metric == Metric::L2 { got.lambda_star_sq.clone().unwrap() } else { got.lambda_star.clone() };
            ensure!(got == want, "instance {i} {metric:?}: {got} vs {want}");
        }
        let rp: Vec<_> = p.iter().map(Point::rotated45).collect();
        let rq: Vec<_> = qs.iter().map(Point::rotated45).collect();
        let l1 = ok(bottleneck_search(&p, &qs, Metric::L1, i))?.lambda_star;
        let linf = ok(bottleneck_search(&rp, &rq, Metric::Linf, i))?.lambda_star;
        ensure!(l1 == linf, "instance {i}: L1 {l1} vs rotated Linf {linf}");
    }
    Ok("200 instances, three metrics".into())
}

fn persistence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1009);
    for i in 0..100 {
        let x = random_diagram(&mut rng, 20);
        let y = random_diagram(&mut rng, 20);
        let got = ok(pd_bottleneck(&ok(PersistenceDiagram::new(x.clone()))?, &ok(PersistenceDiagram::new(y.clone()))?, i))?;
        let want = brute_pd_bottleneck(&x, &y);
        ensure!(got == want, "pair {i}: {got} vs {want}");
    }
    let x = ok(PersistenceDiagram::new(vec![(q(1), q(3))]))?;
    let y = ok(PersistenceDiagram::new(vec![]))?;
    let single = ok(pd_bottleneck(&x, &y, 0))?;
    ensure!(single == q(1), "single point example gave {single}");
    Ok("100 pairs plus single-point example".into())
}

fn uniform_instance(rng: &mut StdRng, n: usize) -> (Vec<Point<f64>>, Vec<Range<f64>>) {
    let side = (8.0 / n as f64).sqrt();
    let points = (0..n / 2).map(|_| Point::xy(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect();
    let boxes = (0..n - n / 2)
        .map(|_| {
            let (x, y) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let (w, h) = (side * rng.gen_range(0.5..1.5), side * rng.gen_range(0.5..1.5));
            Range::new_box(Point::xy(x, y), Point::xy(x + w, y + h)).unwrap()
        })
        .collect();
    (points, boxes)
}

/// Boxes with uniformly random corners; each one spans a constant fraction of
/// the points, so its canonical decomposition is as large as it gets.
fn wide_instance(rng: &mut StdRng, n: usize) -> (Vec<Point<f64>>, Vec<Range<f64>>) {
    let mut u = || rng.gen_range(0.0..1.0f64);
    let points = (0..n / 2).map(|_| Point::xy(u(), u())).collect();
    let boxes = (0..n - n / 2)
        .map(|_| {
            let (x0, x1, y0, y1) = (u(), u(), u(), u());
            Range::new_box(Point::xy(x0.min(x1), y0.min(y1)), Point::xy(x0.max(x1), y0.max(y1))).unwrap()
        })
        .collect();
    (points, boxes)
}

fn scaling() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1010);
    let mut warnings = Vec::new();
    let mut ratios = Vec::new();
    let mut base = None;
    for k in 10..=16 {
        let n = 1usize << k;
        let (points, boxes) = wide_instance(&mut rng, n);
        let c = ok(box_cover(&points, &boxes))?;
        let ratio = c.size() as f64 / (n as f64 * (k * k) as f64);
        let b = *base.get_or_insert(ratio);
        if ratio > 2.0 * b || ratio < b / 2.0 {
            warnings.push(format!("n=2^{k}: ratio {ratio:.4} vs {b:.4}"));
        }
        ratios.push(format!("{ratio:.3}"));
    }

    let n = 100_000;
    let (points, boxes) = uniform_instance(&mut rng, n);
    let c = ok(box_cover(&points, &boxes))?;
    let sd = SupplyDemand::<f64>::unit(points.len(), boxes.len());
    let start = Instant::now();
    let m = ok(max_matching_implicit(&c, &sd))?;
    ok(m.check(&points, &boxes, &sd))?;
    let detail = format!(
        "sigma/(n log^2 n) = [{}]; n=1e5 matched {} in {:.1}s",
        ratios.join(", "),
        m.value(),
        start.elapsed().as_secs_f64()
    );
    if warnings.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", warnings.join("; ")))
    }
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    soft: bool,
    run: fn() -> Outcome,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "cover correctness", budget: secs(30), soft: false, run: cover_correctness },
        Criterion { name: "cover size accounting", budget: secs(1), soft: false, run: cover_size_accounting },
        Criterion { name: "matching/flow equivalence", budget: secs(60), soft: false, run: flow_equivalence },
        Criterion { name: "real-valued engine", budget: secs(120), soft: false, run: real_valued_engine },
        Criterion { name: "pruning", budget: secs(30), soft: false, run: pruning },
        Criterion { name: "red-blue link-cut tree", budget: secs(60), soft: false, run: red_blue_trees },
        Criterion { name: "one-to-one matchings", budget: secs(30), soft: false, run: one_to_one },
        Criterion { name: "bottleneck", budget: secs(120), soft: false, run: bottleneck },
        Criterion { name: "persistence diagrams", budget: secs(30), soft: false, run: persistence },
        Criterion { name: "scaling smoke", budget: secs(600), soft: true, run: scaling },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut hard_failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let id = format!("C{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || c.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > c.budget => Err(format!("{d}; over budget")),
            r => r,
        };
        let timing = format!("{:.2}s/{}s", elapsed.as_secs_f64(), c.budget.as_secs());
        match result {
            Ok(detail) => println!("PASS {id:<4}{:<28}{timing:>14}  {detail}", c.name),
            Err(detail) if c.soft => println!("WARN {id:<4}{:<28}{timing:>14}  {detail}", c.name),
            Err(detail) => {
                hard_failures += 1;
                println!("FAIL {id:<4}{:<28}{timing:>14}  {detail}", c.name);
            }
        }
    }
    if hard_failures > 0 {
        println!("{hard_failures} criteria failed");
        std::process::exit(1);
    }
}
