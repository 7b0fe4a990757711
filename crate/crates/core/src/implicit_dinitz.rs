//! Dinitz phases over the four-layer graph `s → P → R → t` whose middle edges
//! are given only through a biclique cover. Works for arbitrary nonnegative
//! real supplies and demands.
//!
//! Each phase builds the level graph from the current flow, expands its forward
//! edges through one middle vertex per cover part, takes a blocking flow,
//! projects it back onto `(point, range)` pairs and prunes the support to a
//! forest so the next phase sees `O(n)` backward edges.

use std::collections::BTreeMap;

use crate::cover::BicliqueCover;
use crate::error::{Error, Result};
use crate::flow::{self, Cap, Flow, FlowNetwork, Matching, NodeRole, SupplyDemand};
use crate::rblct;
use crate::scalar::Scalar;

/// Flow between phases: positive amounts on `(point, range)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<S> {
    amounts: BTreeMap<(usize, usize), S>,
    used: Vec<S>,
    met: Vec<S>,
    phase: usize,
    t_levels: Vec<usize>,
}

impl<S: Scalar> PhaseState<S> {
    pub fn new(points: usize, ranges: usize) -> Self {
        Self {
            amounts: BTreeMap::new(),
            used: vec![S::zero(); points],
            met: vec![S::zero(); ranges],
            phase: 0,
            t_levels: Vec::new(),
        }
    }

    pub fn num_points(&self) -> usize {
        self.used.len()
    }

    pub fn num_ranges(&self) -> usize {
        self.met.len()
    }

    /// Support edges `(point, range, amount)` in pair order.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        self.amounts.iter().map(|(&(p, r), a)| (p, r, a))
    }

    pub fn support_len(&self) -> usize {
        self.amounts.len()
    }

    pub fn amount(&self, p: usize, r: usize) -> Option<&S> {
        self.amounts.get(&(p, r))
    }

    pub fn used_supply(&self) -> &[S] {
        &self.used
    }

    pub fn met_demand(&self) -> &[S] {
        &self.met
    }

    pub fn value(&self) -> S {
        self.met.iter().cloned().sum()
    }

    /// Completed phases.
    pub fn phase(&self) -> usize {
        self.phase
    }

    /// Level of `t` in each completed phase.
    pub fn t_levels(&self) -> &[usize] {
        &self.t_levels
    }

    /// Same bookkeeping with a replaced support; per-node totals are recomputed.
    pub fn with_support(&self, support: Vec<(usize, usize, S)>) -> Self {
        let mut next = Self::new(self.num_points(), self.num_ranges());
        next.phase = self.phase;
        next.t_levels = self.t_levels.clone();
        for (p, r, a) in support {
            if a.is_pos() {
                next.used[p] += a.clone();
                next.met[r] += a.clone();
                *next.amounts.entry((p, r)).or_insert_with(S::zero) += a;
            }
        }
        next
    }

    /// True iff the support graph has no cycle.
    pub fn support_is_forest(&self) -> bool {
        let np = self.num_points();
        let mut dsu: Vec<usize> = (0..np + self.num_ranges()).collect();
        fn find(d: &mut [usize], mut x: usize) -> usize {
            while d[x] != x {
                d[x] = d[d[x]];
                x = d[x];
            }
            x
        }
        for &(p, r) in self.amounts.keys() {
            let (a, b) = (find(&mut dsu, p), find(&mut dsu, np + r));
            if a == b {
                return false;
            }
            dsu[a] = b;
        }
        true
    }

    pub fn to_matching(&self) -> Matching<S> {
        let triples = self.amounts.iter().map(|(&(p, r), a)| (p, r, a.clone())).collect();
        Matching::from_triples(triples, self.num_points(), self.num_ranges())
    }
}

/// Forward edges from the points of one odd level to the next range level,
/// restricted from a single cover part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardPart {
    pub level: usize,
    pub part: usize,
    pub points: Vec<usize>,
    pub ranges: Vec<usize>,
}

/// Level graph of one phase. `levels[0]` stands for `{s}` and is empty; odd
/// levels hold points, even levels hold ranges, and `t` sits at `t_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGraph<S> {
    pub levels: Vec<Vec<usize>>,
    pub t_level: usize,
    /// `s → p` with the unused supply of `p`.
    pub feeders: Vec<(usize, S)>,
    /// `r → p` with capacity `f(p, r)`, as `(range, point, capacity)`.
    pub backward: Vec<(usize, usize, S)>,
    /// `r → t` with the unmet demand of `r`.
    pub drains: Vec<(usize, S)>,
    pub forward: Vec<ForwardPart>,
}

impl<S> LevelGraph<S> {
    pub fn vertex_count(&self) -> usize {
        2 + self.levels.iter().map(Vec::len).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LevelOutcome<S> {
    Graph(LevelGraph<S>),
    /// No augmenting path: the current flow is maximum.
    Done,
}

const UNSET: usize = usize::MAX;

/// Reusable per-run buffers: the point→parts index and the level marks.
struct LevelBuilder<'a> {
    cover: &'a BicliqueCover,
    index: Vec<Vec<usize>>,
    point_level: Vec<usize>,
    range_level: Vec<usize>,
    part_used: Vec<bool>,
}

impl<'a> LevelBuilder<'a> {
    fn new(cover: &'a BicliqueCover) -> Self {
        Self {
            cover,
            index: cover.point_index(),
            point_level: vec![UNSET; cover.left_count()],
            range_level: vec![UNSET; cover.right_count()],
            part_used: vec![false; cover.num_parts()],
        }
    }

    fn build<S: Scalar>(&mut self, f: &PhaseState<S>, sd: &SupplyDemand<S>) -> LevelOutcome<S> {
        self.point_level.fill(UNSET);
        self.range_level.fill(UNSET);
        self.part_used.fill(false);
        let mut by_range: Vec<Vec<(usize, S)>> = vec![Vec::new(); f.num_ranges()];
        for (p, r, a) in f.support() {
            by_range[r].push((p, a.clone()));
        }

        let mut g = LevelGraph {
            levels: vec![Vec::new()],
            t_level: 0,
            feeders: Vec::new(),
            backward: Vec::new(),
            drains: Vec::new(),
            forward: Vec::new(),
        };
        let mut frontier = Vec::new();
        for (p, s) in sd.supplies().iter().enumerate() {
            let spare = s.clone() - f.used[p].clone();
            if spare.is_pos() {
                self.point_level[p] = 1;
                frontier.push(p);
                g.feeders.push((p, spare));
            }
        }
        let mut j = 1;
        loop {
            if frontier.is_empty() {
                return LevelOutcome::Done;
            }
            g.levels.push(std::mem::take(&mut frontier));
            let mut next_r = Vec::new();
            for &p in &g.levels[j] {
                for &i in &self.index[p] {
                    if self.part_used[i] {
                        continue;
                    }
                    self.part_used[i] = true;
                    let part = &self.cover.parts()[i];
                    let ranges: Vec<usize> = part
                        .ranges
                        .iter()
                        .copied()
                        .filter(|&r| self.range_level[r] == UNSET || self.range_level[r] == j + 1)
                        .collect();
                    if ranges.is_empty() {
                        continue;
                    }
                    for &r in &ranges {
                        if self.range_level[r] == UNSET {
                            self.range_level[r] = j + 1;
                            next_r.push(r);
                        }
                    }
                    let points = part.points.iter().copied().filter(|&q| self.point_level[q] == j).collect();
                    g.forward.push(ForwardPart { level: j, part: i, points, ranges });
                }
            }
            if next_r.is_empty() {
                return LevelOutcome::Done;
            }
            next_r.sort_unstable();
            for &r in &next_r {
                let unmet = sd.demands()[r].clone() - f.met[r].clone();
                if unmet.is_pos() {
                    g.drains.push((r, unmet));
                }
            }
            g.levels.push(next_r);
            if !g.drains.is_empty() {
                g.t_level = j + 2;
                return LevelOutcome::Graph(g);
            }
            for &r in &g.levels[j + 1] {
                for (p, a) in &by_range[r] {
                    let lv = self.point_level[*p];
                    if lv == UNSET || lv == j + 2 {
                        if lv == UNSET {
                            self.point_level[*p] = j + 2;
                            frontier.push(*p);
                        }
                        g.backward.push((r, *p, a.clone()));
                    }
                }
            }
            frontier.sort_unstable();
            j += 2;
        }
    }
}

/// Level graph of the residual graph of `f`, or `Done` when `t` is unreachable.
pub fn build_level_graph<S: Scalar>(f: &PhaseState<S>, c: &BicliqueCover, sd: &SupplyDemand<S>) -> LevelOutcome<S> {
    LevelBuilder::new(c).build(f, sd)
}

/// Explicit network for a level graph: every forward part goes through a fresh
/// middle vertex with infinite edges; feeder, backward and drain edges are
/// copied. Node roles identify each edge's kind.
pub fn expand_level_graph<S: Scalar>(l: &LevelGraph<S>) -> FlowNetwork<S> {
    let mut net = FlowNetwork::new();
    let mut point_node = std::collections::HashMap::new();
    let mut range_node = std::collections::HashMap::new();
    for (j, level) in l.levels.iter().enumerate().skip(1) {
        for &x in level {
            if j % 2 == 1 {
                point_node.insert(x, net.add_node(NodeRole::Point(x)));
            } else {
                range_node.insert(x, net.add_node(NodeRole::Range(x)));
            }
        }
    }
    for (p, cap) in &l.feeders {
        net.add_edge(net.source(), point_node[p], Cap::Finite(cap.clone()));
    }
    for (r, p, cap) in &l.backward {
        net.add_edge(range_node[r], point_node[p], Cap::Finite(cap.clone()));
    }
    for fp in &l.forward {
        let v = net.add_node(NodeRole::Part(fp.part));
        for p in &fp.points {
            net.add_edge(point_node[p], v, Cap::Infinite);
        }
        for r in &fp.ranges {
            net.add_edge(v, range_node[r], Cap::Infinite);
        }
    }
    for (r, cap) in &l.drains {
        net.add_edge(range_node[r], net.sink(), Cap::Finite(cap.clone()));
    }
    net
}

/// A blocking flow of a leveled network (one Dinitz phase from zero flow).
pub fn blocking_flow<S: Scalar>(lp: &FlowNetwork<S>) -> Result<Flow<S>> {
    flow::blocking_flow(lp)
}

/// Adds the phase flow `g` on the expanded network `lp` to `f`: flow through
/// each middle vertex is re-paired into `(point, range)` increments and flow
/// on backward edges cancels existing amounts.
pub fn augment_and_project<S: Scalar>(f: &PhaseState<S>, g: &Flow<S>, lp: &FlowNetwork<S>) -> Result<PhaseState<S>> {
    if g.values.len() != lp.edge_count() {
        return Err(Error::Internal("phase flow does not match its network".into()));
    }
    let mut next = f.clone();
    let mut ins: BTreeMap<usize, Vec<(usize, S)>> = BTreeMap::new();
    let mut outs: BTreeMap<usize, Vec<(usize, S)>> = BTreeMap::new();
    let mut cancel = Vec::new();
    for (e, x) in lp.edges().iter().zip(&g.values) {
        match (lp.role(e.from), lp.role(e.to)) {
            (NodeRole::Source, NodeRole::Point(p)) => next.used[p] += x.clone(),
            (NodeRole::Range(r), NodeRole::Sink) => next.met[r] += x.clone(),
            (NodeRole::Range(r), NodeRole::Point(p)) => {
                if x.is_pos() {
                    cancel.push((p, r, x.clone()));
                }
            }
            (NodeRole::Point(p), NodeRole::Part(_)) => ins.entry(e.to).or_default().push((p, x.clone())),
            (NodeRole::Part(_), NodeRole::Range(r)) => outs.entry(e.from).or_default().push((r, x.clone())),
            other => return Err(Error::Internal(format!("unexpected edge kind {other:?} in level network"))),
        }
    }
    for (v, lp_in) in &ins {
        let lr_out = outs.get(v).map(Vec::as_slice).unwrap_or(&[]);
        for (p, r, d) in flow::pair_through(lp_in, lr_out)? {
            *next.amounts.entry((p, r)).or_insert_with(S::zero) += d;
        }
    }
    for (p, r, x) in cancel {
        let Some(a) = next.amounts.get_mut(&(p, r)) else {
            return Err(Error::Internal(format!("backward flow on ({p}, {r}) without forward amount")));
        };
        *a -= x;
        if a.is_negative() && !a.is_negligible() {
            return Err(Error::Internal(format!("amount on ({p}, {r}) dropped below zero")));
        }
        if !a.is_pos() {
            next.amounts.remove(&(p, r));
        }
    }
    Ok(next)
}

/// One line of the phase trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord<S> {
    pub t_level: usize,
    pub pushed: S,
    pub support: usize,
}

impl<S: Scalar> std::fmt::Display for PhaseRecord<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "level(t)={} pushed={} support={}", self.t_level, self.pushed, self.support)
    }
}

/// Maximum matching with its phase trace.
pub fn max_matching_implicit_traced<S: Scalar>(
    c: &BicliqueCover,
    sd: &SupplyDemand<S>,
) -> Result<(Matching<S>, Vec<PhaseRecord<S>>)> {
    if sd.supplies().len() != c.left_count() || sd.demands().len() != c.right_count() {
        return Err(Error::InvalidInput("supply/demand lengths differ from the cover's point/range counts".into()));
    }
    let n = c.left_count() + c.right_count();
    let mut builder = LevelBuilder::new(c);
    let mut f = PhaseState::new(c.left_count(), c.right_count());
    let mut trace = Vec::new();
    loop {
        let LevelOutcome::Graph(l) = builder.build(&f, sd) else { break };
        if S::EXACT && f.t_levels.last().is_some_and(|&prev| l.t_level <= prev) {
            return Err(Error::Internal(format!("level of t did not increase ({} after {:?})", l.t_level, f.t_levels)));
        }
        let lp = expand_level_graph(&l);
        let g = blocking_flow(&lp)?;
        if !g.value.is_pos() {
            break;
        }
        let mut next = augment_and_project(&f, &g, &lp)?;
        next.phase += 1;
        next.t_levels.push(l.t_level);
        f = rblct::prune_to_forest(&next)?;
        trace.push(PhaseRecord { t_level: l.t_level, pushed: g.value.clone(), support: f.support_len() });
        if f.phase > n + 1 {
            return Err(Error::Internal(format!("phase count {} exceeds n = {n}", f.phase)));
        }
    }
    Ok((f.to_matching(), trace))
}

pub fn max_matching_implicit<S: Scalar>(c: &BicliqueCover, sd: &SupplyDemand<S>) -> Result<Matching<S>> {
    Ok(max_matching_implicit_traced(c, sd)?.0)
}
