//! Slow reference implementations used as test oracles.
//!
//! Nothing here calls into the production solvers: incidences are tested with
//! their own predicate, flows use plain augmenting paths over exact rationals,
//! and the forest oracle keeps parent pointers and scans paths.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Point, Range};
use crate::rblct::{Color, FindBlue, RbOp, RbOutput};
use crate::scalar::{Rational, Scalar};

pub const INCIDENCE_GUARD: u128 = 10_000_000;
pub const FLOW_GUARD: usize = 200;
pub const MATCHING_GUARD: usize = 5000;

/// Dense explicit bipartite graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitBipartite {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
}

impl ExplicitBipartite {
    pub fn new(left: usize, right: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        if edges.iter().any(|&(p, r)| p >= left || r >= right) {
            return Err(Error::InvalidInput("edge endpoint out of range".into()));
        }
        Ok(Self { left, right, edges })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

fn incident<S: Scalar>(r: &Range<S>, p: &Point<S>) -> Result<bool> {
    match r {
        Range::Box { lo, hi } => {
            if lo.dim() != p.dim() {
                return Err(Error::DimensionMismatch { expected: lo.dim(), found: p.dim() });
            }
            for k in 0..p.dim() {
                let c = p.coord(k);
                if c < lo.coord(k) || c > hi.coord(k) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Range::Disk { center, radius_sq } => {
            if p.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
            }
            let dx = p.coord(0).clone() - center.coord(0).clone();
            let dy = p.coord(1).clone() - center.coord(1).clone();
            Ok(dx.clone() * dx + dy.clone() * dy <= *radius_sq)
        }
    }
}

pub fn brute_force_incidences<S: Scalar>(points: &[Point<S>], ranges: &[Range<S>]) -> Result<ExplicitBipartite> {
    let pairs = points.len() as u128 * ranges.len() as u128;
    if pairs > INCIDENCE_GUARD {
        return Err(Error::GuardExceeded { pairs, limit: INCIDENCE_GUARD });
    }
    let mut edges = Vec::new();
    for (p, pt) in points.iter().enumerate() {
        for (r, rg) in ranges.iter().enumerate() {
            if incident(rg, pt)? {
                edges.push((p, r));
            }
        }
    }
    ExplicitBipartite::new(points.len(), ranges.len(), edges)
}

/// Max-flow value of s → P → R → t by BFS augmenting paths in exact arithmetic.
/// Middle edges are uncapacitated.
pub fn reference_max_flow(g: &ExplicitBipartite, supplies: &[Rational], demands: &[Rational]) -> Result<Rational> {
    if g.left + g.right > FLOW_GUARD {
        return Err(Error::GuardExceeded { pairs: (g.left + g.right) as u128, limit: FLOW_GUARD as u128 });
    }
    if supplies.len() != g.left || demands.len() != g.right {
        return Err(Error::InvalidInput("supply/demand lengths do not match graph".into()));
    }
    let n = g.left + g.right + 2;
    let (s, t) = (n - 2, n - 1);
    // dense residual matrix; None = infinite
    let mut cap: Vec<Vec<Option<Rational>>> = vec![vec![Some(Rational::zero()); n]; n];
    for p in 0..g.left {
        cap[s][p] = Some(supplies[p].clone());
    }
    for r in 0..g.right {
        cap[g.left + r][t] = Some(demands[r].clone());
    }
    for &(p, r) in &g.edges {
        cap[p][g.left + r] = None;
    }
    let positive = |c: &Option<Rational>| c.as_ref().is_none_or(|v| v.is_positive());
    let mut total = Rational::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && positive(&cap[u][v]) {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return Ok(total);
        }
        let mut bottleneck: Option<Rational> = None;
        let mut v = t;
        while v != s {
            let u = prev[v];
            if let Some(c) = &cap[u][v] {
                if bottleneck.as_ref().is_none_or(|b| c < b) {
                    bottleneck = Some(c.clone());
                }
            }
            v = u;
        }
        let delta = bottleneck.ok_or_else(|| Error::Internal("unbounded augmenting path".into()))?;
        let mut v = t;
        while v != s {
            let u = prev[v];
            if let Some(c) = &mut cap[u][v] {
                *c -= &delta;
            }
            if let Some(c) = &mut cap[v][u] {
                *c += &delta;
            }
            v = u;
        }
        total += delta;
    }
}

/// Maximum one-to-one matching size.
pub fn hopcroft_karp(g: &ExplicitBipartite) -> Result<usize> {
    if g.left + g.right > 2 * MATCHING_GUARD {
        return Err(Error::GuardExceeded { pairs: (g.left + g.right) as u128, limit: 2 * MATCHING_GUARD as u128 });
    }
    let mut adj = vec![Vec::new(); g.left];
    for &(p, r) in &g.edges {
        adj[p].push(r);
    }
    const NIL: usize = usize::MAX;
    let mut match_l = vec![NIL; g.left];
    let mut match_r = vec![NIL; g.right];
    let mut dist = vec![0usize; g.left];
    let mut size = 0;
    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..g.left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &r in &adj[u] {
                let w = match_r[r];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return Ok(size);
        }
        fn dfs(u: usize, adj: &[Vec<usize>], ml: &mut [usize], mr: &mut [usize], dist: &mut [usize]) -> bool {
            for i in 0..adj[u].len() {
                let r = adj[u][i];
                let w = mr[r];
                if w == usize::MAX || (dist[w] == dist[u] + 1 && dfs(w, adj, ml, mr, dist)) {
                    ml[u] = r;
                    mr[r] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..g.left {
            if match_l[u] == NIL && dfs(u, &adj, &mut match_l, &mut match_r, &mut dist) {
                size += 1;
            }
        }
    }
}

/// Parent-pointer forest replaying the red-blue link-cut tree operations with
/// O(n) path scans.
#[derive(Debug, Clone, Default)]
pub struct NaiveRbForest<S> {
    color: Vec<Color>,
    parent: Vec<Option<usize>>,
    /// value of the edge (v, parent(v)), stored at v
    value: Vec<Option<S>>,
}

impl<S: Scalar> NaiveRbForest<S> {
    pub fn new() -> Self {
        Self { color: Vec::new(), parent: Vec::new(), value: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.color.len()
    }

    pub fn is_empty(&self) -> bool {
        self.color.is_empty()
    }

    pub fn maketree(&mut self, color: Color) -> usize {
        self.color.push(color);
        self.parent.push(None);
        self.value.push(None);
        self.color.len() - 1
    }

    fn check(&self, v: usize) -> Result<()> {
        if v >= self.len() {
            return Err(Error::Usage(format!("unknown node {v}")));
        }
        Ok(())
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn color(&self, v: usize) -> Color {
        self.color[v]
    }

    /// Value of the edge from `v` to its parent.
    pub fn value(&self, v: usize) -> Option<&S> {
        self.value[v].as_ref()
    }

    pub fn findroot(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        let mut u = v;
        while let Some(p) = self.parent[u] {
            u = p;
        }
        Ok(u)
    }

    pub fn link(&mut self, v: usize, w: usize, x: S) -> Result<()> {
        self.check(v)?;
        self.check(w)?;
        if self.parent[v].is_some() {
            return Err(Error::Usage("link: v is not a root".into()));
        }
        if self.color[v] == self.color[w] {
            return Err(Error::Usage("link: endpoints share a color".into()));
        }
        if self.findroot(w)? == v {
            return Err(Error::Usage("link: nodes already connected".into()));
        }
        if x.is_negative() {
            return Err(Error::Usage("link: negative edge value".into()));
        }
        self.parent[v] = Some(w);
        self.value[v] = Some(x);
        Ok(())
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.check(v)?;
        if self.parent[v].is_none() {
            return Err(Error::Usage("cut: v is a root".into()));
        }
        self.parent[v] = None;
        self.value[v] = None;
        Ok(())
    }

    pub fn evert(&mut self, v: usize) -> Result<()> {
        self.check(v)?;
        let mut path = vec![v];
        while let Some(p) = self.parent[*path.last().unwrap()] {
            path.push(p);
        }
        // reverse pointers along the root path; each edge value moves to the new child
        for i in (1..path.len()).rev() {
            let (child, par) = (path[i - 1], path[i]);
            self.value[par] = self.value[child].take();
            self.parent[par] = Some(child);
        }
        self.parent[v] = None;
        self.value[v] = None;
        Ok(())
    }

    /// Edge colors follow the parent endpoint.
    pub fn findblue(&self, v: usize) -> Result<FindBlue<S>> {
        self.check(v)?;
        let mut best: Option<(usize, S)> = None;
        let mut u = v;
        while let Some(p) = self.parent[u] {
            if self.color[p] == Color::Blue {
                let x = self.value[u].clone().expect("edge value present");
                // `<=` keeps the last (closest to the root) minimum
                if best.as_ref().is_none_or(|(_, b)| x <= *b) {
                    best = Some((u, x));
                }
            }
            u = p;
        }
        Ok(match best {
            Some((w, x)) => FindBlue::Edge { node: w, value: x },
            None => FindBlue::NoBlueEdge,
        })
    }

    pub fn add_on_path(&mut self, v: usize, color: Color, x: S) -> Result<()> {
        self.check(v)?;
        let mut path = Vec::new();
        let mut u = v;
        while let Some(p) = self.parent[u] {
            if self.color[p] == color {
                path.push(u);
            }
            u = p;
        }
        for &u in &path {
            let nv = self.value[u].clone().unwrap() + x.clone();
            if nv.is_negative() && !nv.is_negligible() {
                return Err(Error::Usage("add: edge value would become negative".into()));
            }
        }
        for u in path {
            let nv = self.value[u].take().unwrap() + x.clone();
            self.value[u] = Some(nv);
        }
        Ok(())
    }

    /// All edges as `(child, parent, value)`, sorted by child.
    pub fn edges(&self) -> Vec<(usize, usize, S)> {
        (0..self.len())
            .filter_map(|v| self.parent[v].map(|p| (v, p, self.value[v].clone().unwrap())))
            .collect()
    }

    pub fn apply(&mut self, op: &RbOp<S>) -> Result<RbOutput<S>> {
        Ok(match op {
            RbOp::MakeTree(c) => RbOutput::Node(self.maketree(*c)),
            RbOp::FindRoot(v) => RbOutput::Node(self.findroot(*v)?),
            RbOp::Link(v, w, x) => {
                self.link(*v, *w, x.clone())?;
                RbOutput::Unit
            }
            RbOp::Cut(v) => {
                self.cut(*v)?;
                RbOutput::Unit
            }
            RbOp::Evert(v) => {
                self.evert(*v)?;
                RbOutput::Unit
            }
            RbOp::FindBlue(v) => RbOutput::Blue(self.findblue(*v)?),
            RbOp::Add(v, c, x) => {
                self.add_on_path(*v, *c, x.clone())?;
                RbOutput::Unit
            }
        })
    }
}

/// Replays an operation sequence; each entry is the op's output or usage error.
pub fn naive_rb_forest<S: Scalar>(ops: &[RbOp<S>]) -> Vec<Result<RbOutput<S>>> {
    let mut forest = NaiveRbForest::new();
    ops.iter().map(|op| forest.apply(op)).collect()
}
