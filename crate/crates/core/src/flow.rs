//! Explicit path: the five-layer network `s → P → {v_i} → R → t` built from a
//! cover, Dinitz max-flow on it, and recovery of a many-to-many matching from
//! the flow through each part vertex.

use std::collections::VecDeque;

use crate::cover::BicliqueCover;
use crate::error::{Error, Result};
use crate::geometry::{Point, Range};
use crate::scalar::{min_of, Scalar};

/// Edge capacity; `Infinite` marks the never-binding part edges.
#[derive(Debug, Clone, PartialEq)]
pub enum Cap<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Cap<S> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Cap::Infinite)
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            Cap::Finite(c) => Some(c),
            Cap::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Source,
    Sink,
    Point(usize),
    Range(usize),
    /// Middle vertex of cover part `i`.
    Part(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<S> {
    pub from: usize,
    pub to: usize,
    pub cap: Cap<S>,
}

/// Directed network. Edge `k` owns residual arcs `2k` (forward) and `2k + 1`
/// (reverse), so the reverse handle of arc `a` is `a ^ 1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork<S> {
    roles: Vec<NodeRole>,
    edges: Vec<Edge<S>>,
    adj: Vec<Vec<usize>>,
    source: usize,
    sink: usize,
    /// first edge id of each part's block (point edges, then range edges)
    part_edge_start: Vec<usize>,
}

impl<S: Scalar> FlowNetwork<S> {
    /// Empty network holding only a source and a sink.
    pub fn new() -> Self {
        let mut net = Self {
            roles: Vec::new(),
            edges: Vec::new(),
            adj: Vec::new(),
            source: 0,
            sink: 1,
            part_edge_start: Vec::new(),
        };
        net.add_node(NodeRole::Source);
        net.add_node(NodeRole::Sink);
        net
    }

    pub fn add_node(&mut self, role: NodeRole) -> usize {
        self.roles.push(role);
        self.adj.push(Vec::new());
        self.roles.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: Cap<S>) -> usize {
        let k = self.edges.len();
        self.edges.push(Edge { from, to, cap });
        self.adj[from].push(2 * k);
        self.adj[to].push(2 * k + 1);
        k
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn node_count(&self) -> usize {
        self.roles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn role(&self, v: usize) -> NodeRole {
        self.roles[v]
    }

    /// Residual arcs leaving `v`.
    pub fn arcs(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    fn arc_head(&self, a: usize) -> usize {
        let e = &self.edges[a >> 1];
        if a & 1 == 0 {
            e.to
        } else {
            e.from
        }
    }

    #[inline]
    fn arc_tail(&self, a: usize) -> usize {
        let e = &self.edges[a >> 1];
        if a & 1 == 0 {
            e.from
        } else {
            e.to
        }
    }

    /// Residual capacity of arc `a` under `flow`.
    fn residual(&self, a: usize, flow: &[S]) -> Cap<S> {
        let k = a >> 1;
        if a & 1 == 1 {
            return Cap::Finite(flow[k].clone());
        }
        match &self.edges[k].cap {
            Cap::Infinite => Cap::Infinite,
            Cap::Finite(c) => Cap::Finite(c.clone() - flow[k].clone()),
        }
    }

    fn arc_open(&self, a: usize, flow: &[S]) -> bool {
        match self.residual(a, flow) {
            Cap::Infinite => true,
            Cap::Finite(r) => r.is_pos(),
        }
    }

    /// Edge ids `(point edges, range edges)` of part `i`'s middle vertex.
    pub fn part_edges(&self, i: usize, cover: &BicliqueCover) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let start = self.part_edge_start[i];
        let part = &cover.parts()[i];
        let mid = start + part.points.len();
        (start..mid, mid..mid + part.ranges.len())
    }
}

impl<S: Scalar> Default for FlowNetwork<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Per-point supplies and per-range demands, all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SupplyDemand<S> {
    supplies: Vec<S>,
    demands: Vec<S>,
}

impl<S: Scalar> SupplyDemand<S> {
    pub fn new(supplies: Vec<S>, demands: Vec<S>) -> Result<Self> {
        for (what, vals) in [("supply", &supplies), ("demand", &demands)] {
            if let Some(v) = vals.iter().find(|v| !v.is_finite_value() || !v.is_pos()) {
                return Err(Error::InvalidInput(format!("{what} must be positive, got {v}")));
            }
        }
        Ok(Self { supplies, demands })
    }

    pub fn unit(points: usize, ranges: usize) -> Self {
        Self { supplies: vec![S::one(); points], demands: vec![S::one(); ranges] }
    }

    pub fn supplies(&self) -> &[S] {
        &self.supplies
    }

    pub fn demands(&self) -> &[S] {
        &self.demands
    }

    pub fn total_supply(&self) -> S {
        self.supplies.iter().cloned().sum()
    }

    pub fn total_demand(&self) -> S {
        self.demands.iter().cloned().sum()
    }

    /// μ = min(Σ s_p, Σ d_r).
    pub fn target(&self) -> S {
        min_of(self.total_supply(), self.total_demand())
    }

    pub fn is_integral(&self) -> bool {
        self.supplies.iter().chain(&self.demands).all(Scalar::is_integral)
    }
}

/// Five-layer network of a cover: feeders `s→p` (cap `s_p`), drains `r→t`
/// (cap `d_r`) and one middle vertex per part with uncapacitated edges.
///
/// Node layout: `s = 0`, `t = 1`, points, ranges, then part vertices.
/// Edge layout: feeders, drains, then each part's point edges and range edges.
pub fn build_network<S: Scalar>(cover: &BicliqueCover, sd: &SupplyDemand<S>) -> Result<FlowNetwork<S>> {
    let (np, nr) = (cover.left_count(), cover.right_count());
    if sd.supplies.len() != np || sd.demands.len() != nr {
        return Err(Error::InvalidInput(format!(
            "cover has {np} points / {nr} ranges but {} supplies / {} demands",
            sd.supplies.len(),
            sd.demands.len()
        )));
    }
    let mut net = FlowNetwork::new();
    let point_base = net.node_count();
    for p in 0..np {
        net.add_node(NodeRole::Point(p));
    }
    let range_base = net.node_count();
    for r in 0..nr {
        net.add_node(NodeRole::Range(r));
    }
    for (p, s) in sd.supplies.iter().enumerate() {
        net.add_edge(net.source, point_base + p, Cap::Finite(s.clone()));
    }
    for (r, d) in sd.demands.iter().enumerate() {
        net.add_edge(range_base + r, net.sink, Cap::Finite(d.clone()));
    }
    for (i, part) in cover.parts().iter().enumerate() {
        let v = net.add_node(NodeRole::Part(i));
        net.part_edge_start.push(net.edge_count());
        for &p in &part.points {
            net.add_edge(point_base + p, v, Cap::Infinite);
        }
        for &r in &part.ranges {
            net.add_edge(v, range_base + r, Cap::Infinite);
        }
    }
    Ok(net)
}

/// Flow values on every edge of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow<S> {
    pub values: Vec<S>,
    pub value: S,
}

impl<S: Scalar> Flow<S> {
    pub fn zero(net: &FlowNetwork<S>) -> Self {
        Self { values: vec![S::zero(); net.edge_count()], value: S::zero() }
    }

    /// Checks capacities and conservation; returns the first violation found.
    pub fn check(&self, net: &FlowNetwork<S>) -> Result<()> {
        if self.values.len() != net.edge_count() {
            return Err(Error::Internal("flow length differs from edge count".into()));
        }
        let mut balance = vec![S::zero(); net.node_count()];
        for (e, f) in net.edges.iter().zip(&self.values) {
            if f.is_negative() && !f.is_negligible() {
                return Err(Error::Internal(format!("negative flow {f} on edge {}→{}", e.from, e.to)));
            }
            if let Cap::Finite(c) = &e.cap {
                if !(f.clone() - c.clone()).is_negligible() && f > c {
                    return Err(Error::Internal(format!("flow {f} exceeds capacity {c}")));
                }
            }
            balance[e.from] -= f.clone();
            balance[e.to] += f.clone();
        }
        for (v, b) in balance.iter().enumerate() {
            if v != net.source && v != net.sink && !b.is_negligible() {
                return Err(Error::Internal(format!("conservation violated at node {v} (excess {b})")));
            }
        }
        let out = -balance[net.source].clone();
        if !(out.clone() - self.value.clone()).is_negligible() {
            return Err(Error::Internal(format!("flow value {} disagrees with source outflow {out}", self.value)));
        }
        Ok(())
    }
}

/// Dinitz state over a network: per-edge flow plus BFS levels.
struct Dinitz<'a, S> {
    net: &'a FlowNetwork<S>,
    flow: Vec<S>,
    level: Vec<usize>,
    next_arc: Vec<usize>,
}

const UNREACHED: usize = usize::MAX;

impl<'a, S: Scalar> Dinitz<'a, S> {
    fn new(net: &'a FlowNetwork<S>) -> Self {
        Self {
            net,
            flow: vec![S::zero(); net.edge_count()],
            level: vec![UNREACHED; net.node_count()],
            next_arc: vec![0; net.node_count()],
        }
    }

    /// BFS levels over open residual arcs; true iff the sink is reached.
    fn bfs(&mut self) -> bool {
        self.level.fill(UNREACHED);
        self.level[self.net.source] = 0;
        let mut queue = VecDeque::from([self.net.source]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.net.adj[u] {
                let v = self.net.arc_head(a);
                if self.level[v] == UNREACHED && self.net.arc_open(a, &self.flow) {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[self.net.sink] != UNREACHED
    }

    fn push(&mut self, a: usize, delta: &S) {
        let k = a >> 1;
        if a & 1 == 0 {
            self.flow[k] += delta.clone();
        } else {
            self.flow[k] -= delta.clone();
            if self.flow[k].is_negligible() {
                self.flow[k] = S::zero();
            }
        }
    }

    /// Blocking flow on the current level graph by iterative DFS with
    /// current-arc pointers; nodes that cannot reach the sink are retired.
    fn blocking_phase(&mut self) -> Result<S> {
        let net = self.net;
        self.next_arc.fill(0);
        let (s, t) = (net.source, net.sink);
        let mut pushed = S::zero();
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let mut delta: Option<S> = None;
                for &a in &path {
                    if let Cap::Finite(r) = net.residual(a, &self.flow) {
                        if delta.as_ref().is_none_or(|d| r < *d) {
                            delta = Some(r);
                        }
                    }
                }
                let delta = delta.ok_or_else(|| Error::Internal("augmenting path of unbounded capacity".into()))?;
                for &a in &path {
                    self.push(a, &delta);
                }
                pushed += delta;
                // retreat to the tail of the first saturated arc
                let cut = path.iter().position(|&a| !net.arc_open(a, &self.flow)).unwrap_or(0);
                path.truncate(cut);
                u = path.last().map_or(s, |&a| net.arc_head(a));
                continue;
            }
            let mut advanced = false;
            while self.next_arc[u] < net.adj[u].len() {
                let a = net.adj[u][self.next_arc[u]];
                let v = net.arc_head(a);
                if self.level[v] != UNREACHED && self.level[v] == self.level[u] + 1 && net.arc_open(a, &self.flow) {
                    path.push(a);
                    u = v;
                    advanced = true;
                    break;
                }
                self.next_arc[u] += 1;
            }
            if advanced {
                continue;
            }
            if u == s {
                return Ok(pushed);
            }
            self.level[u] = UNREACHED;
            let a = path.pop().expect("non-source node has an incoming path arc");
            u = net.arc_tail(a);
            self.next_arc[u] += 1;
        }
    }

    fn into_flow(self) -> Flow<S> {
        let s = self.net.source;
        let mut value = S::zero();
        for &a in &self.net.adj[s] {
            let f = self.flow[a >> 1].clone();
            if a & 1 == 0 {
                value += f;
            } else {
                value -= f;
            }
        }
        Flow { values: self.flow, value }
    }
}

/// Maximum `s–t` flow by Dinitz phases. Integral capacities give integral flows.
pub fn max_flow_dinitz<S: Scalar>(net: &FlowNetwork<S>) -> Result<Flow<S>> {
    let mut solver = Dinitz::new(net);
    while solver.bfs() {
        let pushed = solver.blocking_phase()?;
        if !pushed.is_pos() {
            break;
        }
    }
    Ok(solver.into_flow())
}

/// One Dinitz phase from the zero flow: a blocking flow of `net`'s level graph.
pub fn blocking_flow<S: Scalar>(net: &FlowNetwork<S>) -> Result<Flow<S>> {
    let mut solver = Dinitz::new(net);
    if solver.bfs() {
        solver.blocking_phase()?;
    }
    Ok(solver.into_flow())
}

/// True iff the sink is reachable from the source in the residual graph of `flow`.
pub fn residual_reaches_sink<S: Scalar>(net: &FlowNetwork<S>, flow: &Flow<S>) -> bool {
    let mut seen = vec![false; net.node_count()];
    seen[net.source] = true;
    let mut stack = vec![net.source];
    while let Some(u) = stack.pop() {
        for &a in &net.adj[u] {
            let v = net.arc_head(a);
            if !seen[v] && net.arc_open(a, &flow.values) {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen[net.sink]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triple<S> {
    pub point: usize,
    pub range: usize,
    pub amount: S,
}

/// Many-to-many matching: at most one positive triple per `(point, range)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching<S> {
    triples: Vec<Triple<S>>,
}

impl<S: Scalar> Matching<S> {
    pub fn new() -> Self {
        Self { triples: Vec::new() }
    }

    /// Merges duplicate pairs and drops non-positive amounts.
    pub fn from_triples(triples: Vec<(usize, usize, S)>, points: usize, ranges: usize) -> Self {
        Self { triples: merge_triples(triples, points, ranges) }
    }

    pub fn triples(&self) -> &[Triple<S>] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// η = Σ a_pr.
    pub fn value(&self) -> S {
        self.triples.iter().map(|t| t.amount.clone()).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.triples
                .iter()
                .map(|t| serde_json::json!({ "p": t.point, "r": t.range, "amount": t.amount.to_json() }))
                .collect(),
        )
    }

    /// Checks positivity, pair uniqueness, supply/demand bounds and incidence.
    pub fn check(&self, points: &[Point<S>], ranges: &[Range<S>], sd: &SupplyDemand<S>) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        let mut used = vec![S::zero(); points.len()];
        let mut met = vec![S::zero(); ranges.len()];
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(self.triples.len());
        for t in &self.triples {
            if t.point >= points.len() || t.range >= ranges.len() {
                return bad(format!("triple ({}, {}) out of bounds", t.point, t.range));
            }
            if !t.amount.is_pos() {
                return bad(format!("non-positive amount on ({}, {})", t.point, t.range));
            }
            if !ranges[t.range].contains(&points[t.point])? {
                return bad(format!("point {} is not inside range {}", t.point, t.range));
            }
            used[t.point] += t.amount.clone();
            met[t.range] += t.amount.clone();
            pairs.push((t.point, t.range));
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return bad("duplicate (point, range) pair".into());
        }
        let over = |got: &S, cap: &S| got > cap && !(got.clone() - cap.clone()).is_negligible();
        for (p, u) in used.iter().enumerate() {
            if over(u, &sd.supplies()[p]) {
                return bad(format!("point {p} ships {u} > supply {}", sd.supplies()[p]));
            }
        }
        for (r, m) in met.iter().enumerate() {
            if over(m, &sd.demands()[r]) {
                return bad(format!("range {r} receives {m} > demand {}", sd.demands()[r]));
            }
        }
        Ok(())
    }
}

pub fn matching_value<S: Scalar>(m: &Matching<S>) -> S {
    m.value()
}

pub fn validate_matching<S: Scalar>(m: &Matching<S>, points: &[Point<S>], ranges: &[Range<S>], sd: &SupplyDemand<S>) -> bool {
    sd.supplies().len() == points.len() && sd.demands().len() == ranges.len() && m.check(points, ranges, sd).is_ok()
}

/// Pairs the in-amounts `ℓ(p)` of one part with its out-amounts `ℓ(r)`,
/// always taking the lowest-index positive entry on each side, and emits at
/// most `|P_i| + |R_i| − 1` triples. Inputs are in index order.
pub fn pair_through<S: Scalar>(lp: &[(usize, S)], lr: &[(usize, S)]) -> Result<Vec<(usize, usize, S)>> {
    let mut lp: Vec<(usize, S)> = lp.to_vec();
    let mut lr: Vec<(usize, S)> = lr.to_vec();
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    loop {
        while i < lp.len() && !lp[i].1.is_pos() {
            i += 1;
        }
        while j < lr.len() && !lr[j].1.is_pos() {
            j += 1;
        }
        if i == lp.len() || j == lr.len() {
            break;
        }
        let delta = min_of(lp[i].1.clone(), lr[j].1.clone());
        lp[i].1 -= delta.clone();
        lr[j].1 -= delta.clone();
        out.push((lp[i].0, lr[j].0, delta));
    }
    let left: S = lp[i.min(lp.len())..].iter().map(|x| x.1.clone()).filter(|v| v.is_pos()).sum();
    let right: S = lr[j.min(lr.len())..].iter().map(|x| x.1.clone()).filter(|v| v.is_pos()).sum();
    if left.is_pos() || right.is_pos() {
        return Err(Error::Internal(format!("part inflow and outflow differ (left over {left} / {right})")));
    }
    Ok(out)
}

/// Bucket-sorts triples by `(point, range)` and sums duplicates.
pub fn merge_triples<S: Scalar>(triples: Vec<(usize, usize, S)>, points: usize, ranges: usize) -> Vec<Triple<S>> {
    // two stable bucket passes: by range, then by point
    let mut by_range: Vec<Vec<(usize, usize, S)>> = vec![Vec::new(); ranges];
    for t in triples {
        by_range[t.1].push(t);
    }
    let mut by_point: Vec<Vec<(usize, usize, S)>> = vec![Vec::new(); points];
    for bucket in by_range {
        for t in bucket {
            by_point[t.0].push(t);
        }
    }
    let mut out: Vec<Triple<S>> = Vec::new();
    for (p, r, a) in by_point.into_iter().flatten() {
        match out.last_mut() {
            Some(last) if last.point == p && last.range == r => last.amount += a,
            _ => out.push(Triple { point: p, range: r, amount: a }),
        }
    }
    out.retain(|t| t.amount.is_pos());
    out
}

/// Recovers a matching of the same value from a flow on [`build_network`]'s output.
pub fn flow_to_matching<S: Scalar>(flow: &Flow<S>, net: &FlowNetwork<S>, cover: &BicliqueCover) -> Result<Matching<S>> {
    if flow.values.len() != net.edge_count() || cover.num_parts() != net.part_edge_start.len() {
        return Err(Error::Internal("flow, network and cover are inconsistent".into()));
    }
    let mut triples = Vec::new();
    for (i, part) in cover.parts().iter().enumerate() {
        let (pe, re) = net.part_edges(i, cover);
        let lp: Vec<(usize, S)> = part.points.iter().copied().zip(flow.values[pe].iter().cloned()).collect();
        let lr: Vec<(usize, S)> = part.ranges.iter().copied().zip(flow.values[re].iter().cloned()).collect();
        triples.extend(pair_through(&lp, &lr)?);
    }
    Ok(Matching::from_triples(triples, cover.left_count(), cover.right_count()))
}

/// Convenience pipeline: network, Dinitz, recovered matching.
pub fn max_matching_explicit<S: Scalar>(cover: &BicliqueCover, sd: &SupplyDemand<S>) -> Result<Matching<S>> {
    let net = build_network(cover, sd)?;
    let flow = max_flow_dinitz(&net)?;
    flow_to_matching(&flow, &net, cover)
}
