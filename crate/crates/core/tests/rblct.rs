mod common;

use common::{q, random_rb_op};
use geomatch::oracle::NaiveRbForest;
use geomatch::rblct::{prune_support, Color, FindBlue, RbForest, RbOp, RbOutput};
use geomatch::scalar::{ratio, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn replay(seed: u64, ops: usize, max_nodes: usize) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut naive = NaiveRbForest::<Rational>::new();
    let mut fast = RbForest::<Rational>::new();
    let (mut ok, mut hits) = (0usize, 0usize);
    for step in 0..ops {
        let op = random_rb_op(&mut rng, &naive, max_nodes);
        let want = naive.apply(&op);
        let got = fast.apply(&op);
        match (&want, &got) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a, b, "step {step}: {op:?}");
                ok += 1;
                hits += matches!(a, RbOutput::Blue(FindBlue::Edge { .. })) as usize;
            }
            (Err(_), Err(_)) => {}
            _ => panic!("step {step}: {op:?} gave {got:?}, expected {want:?}"),
        }
        if step % 97 == 0 {
            fast.check_aggregates().unwrap();
            assert_eq!(fast.edges(), naive.edges(), "step {step}");
        }
    }
    assert_eq!(fast.edges(), naive.edges());
    assert!(ok * 10 >= ops * 7, "only {ok} of {ops} operations were valid");
    assert!(hits * 40 >= ops, "findblue found an edge only {hits} times");
}

#[test]
fn differential_small_forests() {
    for seed in 0..40 {
        replay(seed, 800, 12);
    }
}

#[test]
fn differential_medium_forest() {
    replay(1234, 20_000, 120);
}

#[test]
fn float_forest_agrees_on_integers() {
    let mut rng = StdRng::seed_from_u64(9);
    let mut naive = NaiveRbForest::<Rational>::new();
    let mut fast = RbForest::<f64>::new();
    let to_f = |x: &Rational| x.to_string().parse::<f64>().unwrap_or_else(|_| {
        let (n, d) = (x.numer().to_string(), x.denom().to_string());
        n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
    });
    for _ in 0..5000 {
        let op = random_rb_op(&mut rng, &naive, 30);
        let fop = match &op {
            RbOp::MakeTree(c) => RbOp::MakeTree(*c),
            RbOp::FindRoot(v) => RbOp::FindRoot(*v),
            RbOp::Link(v, w, x) => RbOp::Link(*v, *w, to_f(x)),
            RbOp::Cut(v) => RbOp::Cut(*v),
            RbOp::Evert(v) => RbOp::Evert(*v),
            RbOp::FindBlue(v) => RbOp::FindBlue(*v),
            RbOp::Add(v, c, x) => RbOp::Add(*v, *c, to_f(x)),
        };
        let want = naive.apply(&op);
        let got = fast.apply(&fop);
        match (want, got) {
            (Ok(RbOutput::Blue(FindBlue::Edge { node, value })), Ok(RbOutput::Blue(FindBlue::Edge { node: n2, value: v2 }))) => {
                assert_eq!(node, n2);
                assert!((to_f(&value) - v2).abs() < 1e-9);
            }
            (Ok(RbOutput::Blue(a)), Ok(RbOutput::Blue(b))) => assert_eq!(a == FindBlue::NoBlueEdge, b == FindBlue::NoBlueEdge),
            (Ok(RbOutput::Node(a)), Ok(RbOutput::Node(b))) => assert_eq!(a, b),
            (Ok(RbOutput::Unit), Ok(RbOutput::Unit)) | (Err(_), Err(_)) => {}
            (w, g) => panic!("{op:?}: {g:?} vs {w:?}"),
        }
    }
}

#[test]
fn tie_rule_prefers_rootmost_edge() {
    // path of blue edges all valued 1: the answer is always the edge next to the root
    let mut f = RbForest::<Rational>::new();
    let mut naive = NaiveRbForest::<Rational>::new();
    let k = 9;
    for i in 0..k {
        let c = if i % 2 == 0 { Color::Blue } else { Color::Red };
        f.maketree(c);
        naive.maketree(c);
    }
    for i in 1..k {
        f.link(i, i - 1, q(1)).unwrap();
        naive.link(i, i - 1, q(1)).unwrap();
    }
    for v in 0..k {
        assert_eq!(f.findblue(v).unwrap(), naive.findblue(v).unwrap());
    }
    assert_eq!(f.findblue(k - 1).unwrap(), FindBlue::Edge { node: 1, value: q(1) });
    f.evert(k - 1).unwrap();
    naive.evert(k - 1).unwrap();
    for v in 0..k {
        assert_eq!(f.findblue(v).unwrap(), naive.findblue(v).unwrap());
    }
}

#[test]
fn long_path_amortization() {
    let n = 4000;
    let mut f = RbForest::<Rational>::new();
    for i in 0..n {
        f.maketree(if i % 2 == 0 { Color::Red } else { Color::Blue });
    }
    for i in 1..n {
        f.link(i, i - 1, q(i as i64)).unwrap();
    }
    for i in (0..n).step_by(7) {
        f.findblue(i).unwrap();
        f.evert(i).unwrap();
    }
    let per_op = f.rotations() as f64 / (2 * n) as f64;
    assert!(per_op < 200.0, "{per_op} rotations per operation");
    f.check_aggregates().unwrap();
}

fn totals(np: usize, nr: usize, t: &[(usize, usize, Rational)]) -> (Vec<Rational>, Vec<Rational>) {
    let mut a = vec![q(0); np];
    let mut b = vec![q(0); nr];
    for (p, r, x) in t {
        a[*p] += x;
        b[*r] += x;
    }
    (a, b)
}

fn is_forest(np: usize, nr: usize, t: &[(usize, usize, Rational)]) -> bool {
    let mut parent: Vec<usize> = (0..np + nr).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    t.iter().all(|(p, r, _)| {
        let (a, b) = (find(&mut parent, *p), find(&mut parent, np + r));
        parent[a] = b;
        a != b
    })
}

#[test]
fn prune_random_supports() {
    let mut rng = StdRng::seed_from_u64(77);
    for _ in 0..300 {
        let (np, nr) = (rng.gen_range(1..12), rng.gen_range(1..12));
        let mut pairs = std::collections::BTreeSet::new();
        for _ in 0..rng.gen_range(0..60) {
            pairs.insert((rng.gen_range(0..np), rng.gen_range(0..nr)));
        }
        let t: Vec<_> = pairs.into_iter().map(|(p, r)| (p, r, ratio(rng.gen_range(1..30), rng.gen_range(1..5)))).collect();
        let out = prune_support(np, nr, &t).unwrap();
        assert!(is_forest(np, nr, &out));
        assert!(out.len() < np + nr);
        assert_eq!(totals(np, nr, &out), totals(np, nr, &t));
        assert!(out.iter().all(|(p, r, x)| *x > q(0) && t.iter().any(|(a, b, _)| a == p && b == r)));
    }
}

#[test]
fn prune_float_preserves_totals() {
    let t = vec![(0, 0, 0.25), (1, 0, 1.5), (1, 1, 0.75), (0, 1, 2.0), (2, 1, 1.0), (2, 0, 0.125)];
    let out = prune_support(3, 2, &t).unwrap();
    assert!(out.len() <= 4);
    let mut sums = [0.0f64; 5];
    for (p, r, x) in &out {
        sums[*p] += x;
        sums[3 + r] += x;
    }
    let mut want = [0.0f64; 5];
    for (p, r, x) in &t {
        want[*p] += x;
        want[3 + r] += x;
    }
    for (a, b) in sums.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
}
