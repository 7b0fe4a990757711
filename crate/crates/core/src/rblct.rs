//! Red-blue link-cut trees and forest pruning of flow supports.
//!
//! Every tree node is red or blue and every edge joins a red node to a blue
//! node. An edge takes the color of its endpoint nearer the root, so rerooting
//! (`evert`) recolors the whole root path.
//!
//! Solid paths are splay trees whose in-order sequence alternates node
//! vertices and edge vertices, shallow end on the left. Each splay vertex keeps
//! two slots (slot 0 = blue, slot 1 = red, read in the vertex's own frame):
//!
//! * `d_val[k] = val_k(v) − min_k(v)` where `val_k` is the edge value when the
//!   vertex is an edge of that color and `+∞` otherwise;
//! * `d_min[k] = min_k(v) − min_k(parent)`, or `min_k(v)` itself at a splay root;
//! * `flip`, the reverse bit stored as xor with the parent's reverse bit.
//!
//! A vertex whose accumulated reverse bit is set reads its slots swapped, which
//! is what lets `evert` flip a whole path by toggling one bit at the root.

use crate::error::{Error, Result};
use crate::implicit_dinitz::PhaseState;
use crate::scalar::Scalar;

const NIL: usize = usize::MAX;
const BLUE: usize = 0;
const RED: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    #[inline]
    fn slot(self) -> usize {
        match self {
            Color::Blue => BLUE,
            Color::Red => RED,
        }
    }

    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

/// Result of [`RbForest::findblue`].
#[derive(Debug, Clone, PartialEq)]
pub enum FindBlue<S> {
    /// `node` is the last vertex on the path whose parent edge is a blue edge of minimum value.
    Edge { node: usize, value: S },
    NoBlueEdge,
}

/// Operation alphabet shared with the naive oracle for differential testing.
#[derive(Debug, Clone, PartialEq)]
pub enum RbOp<S> {
    MakeTree(Color),
    FindRoot(usize),
    Link(usize, usize, S),
    Cut(usize),
    Evert(usize),
    FindBlue(usize),
    Add(usize, Color, S),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RbOutput<S> {
    Node(usize),
    Unit,
    Blue(FindBlue<S>),
}

/// Scalar extended with `+∞`.
#[derive(Debug, Clone, PartialEq)]
enum Ext<S> {
    Fin(S),
    Inf,
}

impl<S: Scalar> Ext<S> {
    #[inline]
    fn add(&self, d: &Ext<S>) -> Ext<S> {
        match (self, d) {
            (Ext::Fin(a), Ext::Fin(b)) if b.is_zero() => Ext::Fin(a.clone()),
            (Ext::Fin(a), Ext::Fin(b)) if a.is_zero() => Ext::Fin(b.clone()),
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a.clone() + b.clone()),
            _ => Ext::Inf,
        }
    }

    /// `a − b` for `a ≥ b`. An infinite `a` stays infinite so that adding any
    /// later base still decodes to `+∞`.
    #[inline]
    fn sub(&self, b: &Ext<S>) -> Ext<S> {
        match (self, b) {
            (Ext::Fin(a), Ext::Fin(b)) if b.is_zero() => Ext::Fin(a.clone()),
            (Ext::Fin(a), Ext::Fin(b)) if a == b => Ext::Fin(S::zero()),
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a.clone() - b.clone()),
            (Ext::Inf, _) => Ext::Inf,
            (Ext::Fin(_), Ext::Inf) => unreachable!("finite minimum below an infinite one"),
        }
    }

    #[inline]
    fn min(self, other: Ext<S>) -> Ext<S> {
        match (&self, &other) {
            (Ext::Inf, _) => other,
            (_, Ext::Inf) => self,
            (Ext::Fin(a), Ext::Fin(b)) => {
                if b < a {
                    other
                } else {
                    self
                }
            }
        }
    }

    fn finite(&self) -> Option<&S> {
        match self {
            Ext::Fin(v) => Some(v),
            Ext::Inf => None,
        }
    }
}

type Pair<S> = [Ext<S>; 2];

fn inf_pair<S: Scalar>() -> Pair<S> {
    [Ext::Inf, Ext::Inf]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Node(usize),
    /// Edge vertex joining two tree nodes.
    Edge(usize, usize),
    Free,
}

#[derive(Debug, Clone)]
struct Vert<S> {
    parent: usize,
    left: usize,
    right: usize,
    flip: bool,
    d_val: Pair<S>,
    d_min: Pair<S>,
    kind: Kind,
    /// absolute minima during a splay, valid only for vertices on the splayed path
    scratch: Pair<S>,
}

impl<S: Scalar> Vert<S> {
    fn new(kind: Kind) -> Self {
        Self {
            parent: NIL,
            left: NIL,
            right: NIL,
            flip: false,
            d_val: [Ext::Fin(S::zero()), Ext::Fin(S::zero())],
            d_min: inf_pair(),
            kind,
            scratch: inf_pair(),
        }
    }
}

/// Forest of red/blue nodes supporting the dynamic-tree operations with
/// color-restricted path minimum and path addition.
#[derive(Debug, Clone, Default)]
pub struct RbForest<S> {
    verts: Vec<Vert<S>>,
    node_vert: Vec<usize>,
    color: Vec<Color>,
    free: Vec<usize>,
    rotations: u64,
}

impl<S: Scalar> RbForest<S> {
    pub fn new() -> Self {
        Self { verts: Vec::new(), node_vert: Vec::new(), color: Vec::new(), free: Vec::new(), rotations: 0 }
    }

    pub fn with_nodes(colors: impl IntoIterator<Item = Color>) -> Self {
        let mut f = Self::new();
        for c in colors {
            f.maketree(c);
        }
        f
    }

    pub fn node_count(&self) -> usize {
        self.node_vert.len()
    }

    pub fn color(&self, v: usize) -> Color {
        self.color[v]
    }

    /// Splay rotations performed so far.
    pub fn rotations(&self) -> u64 {
        self.rotations
    }

    pub fn maketree(&mut self, color: Color) -> usize {
        let id = self.node_vert.len();
        let vx = self.verts.len();
        self.verts.push(Vert::new(Kind::Node(id)));
        self.node_vert.push(vx);
        self.color.push(color);
        id
    }

    fn vert_of(&self, v: usize) -> Result<usize> {
        self.node_vert.get(v).copied().ok_or_else(|| Error::Usage(format!("unknown node {v}")))
    }

    // ---- splay-tree plumbing -------------------------------------------------

    #[inline]
    fn is_splay_root(&self, x: usize) -> bool {
        let p = self.verts[x].parent;
        p == NIL || (self.verts[p].left != x && self.verts[p].right != x)
    }

    /// Applies `x`'s reverse bit to its children; meaning is unchanged.
    fn push(&mut self, x: usize) {
        if !self.verts[x].flip {
            return;
        }
        let v = &mut self.verts[x];
        v.flip = false;
        std::mem::swap(&mut v.left, &mut v.right);
        v.d_val.swap(0, 1);
        v.d_min.swap(0, 1);
        let (l, r) = (v.left, v.right);
        if l != NIL {
            self.verts[l].flip ^= true;
        }
        if r != NIL {
            self.verts[r].flip ^= true;
        }
    }

    /// Absolute minima of child `c`, expressed in its parent's frame.
    #[inline]
    fn child_abs(&self, c: usize, parent_abs: &Pair<S>) -> Pair<S> {
        let v = &self.verts[c];
        let f = v.flip as usize;
        [parent_abs[0].add(&v.d_min[f]), parent_abs[1].add(&v.d_min[1 ^ f])]
    }

    #[inline]
    fn set_child_rel(&mut self, c: usize, abs_in_parent_frame: &Pair<S>, parent_abs: &Pair<S>) {
        let f = self.verts[c].flip as usize;
        let v = &mut self.verts[c];
        v.d_min[f] = abs_in_parent_frame[0].sub(&parent_abs[0]);
        v.d_min[1 ^ f] = abs_in_parent_frame[1].sub(&parent_abs[1]);
    }

    /// Stores `abs` (given in the old parent's frame) as a splay root's own minima.
    #[inline]
    fn make_root_abs(&mut self, c: usize, abs_in_parent_frame: Pair<S>) {
        let f = self.verts[c].flip as usize;
        let [a0, a1] = abs_in_parent_frame;
        let v = &mut self.verts[c];
        v.d_min[f] = a0;
        v.d_min[1 ^ f] = a1;
    }

    /// Absolute minima of a splay root, mapped into the frame of a parent whose
    /// own reverse bit is clear.
    #[inline]
    fn root_abs_in_parent_frame(&self, c: usize) -> Pair<S> {
        let v = &self.verts[c];
        let f = v.flip as usize;
        [v.d_min[f].clone(), v.d_min[1 ^ f].clone()]
    }

    fn val_abs(&self, x: usize, abs: &Pair<S>) -> Pair<S> {
        match self.verts[x].kind {
            Kind::Edge(..) => [abs[0].add(&self.verts[x].d_val[0]), abs[1].add(&self.verts[x].d_val[1])],
            _ => inf_pair(),
        }
    }

    /// Recomputes `x`'s minima after its subtree changed; children and `d_val`
    /// are still encoded against `old`. Returns the new minima in `x`'s frame.
    fn pull(&mut self, x: usize, old: &Pair<S>) -> Pair<S> {
        let (l, r) = (self.verts[x].left, self.verts[x].right);
        let la = (l != NIL).then(|| self.child_abs(l, old));
        let ra = (r != NIL).then(|| self.child_abs(r, old));
        self.pull_from(x, old, la, ra)
    }

    /// Like [`Self::pull`], with the children's absolute minima (in `x`'s
    /// frame) supplied by the caller; only `d_val` is read against `old`.
    fn pull_from(&mut self, x: usize, old: &Pair<S>, la: Option<Pair<S>>, ra: Option<Pair<S>>) -> Pair<S> {
        let val = self.val_abs(x, old);
        let (l, r) = (self.verts[x].left, self.verts[x].right);
        let mut new = val.clone();
        for k in 0..2 {
            if let Some(a) = &la {
                new[k] = std::mem::replace(&mut new[k], Ext::Inf).min(a[k].clone());
            }
            if let Some(a) = &ra {
                new[k] = std::mem::replace(&mut new[k], Ext::Inf).min(a[k].clone());
            }
        }
        if let Some(a) = la {
            self.set_child_rel(l, &a, &new);
        }
        if let Some(a) = ra {
            self.set_child_rel(r, &a, &new);
        }
        if matches!(self.verts[x].kind, Kind::Edge(..)) {
            self.verts[x].d_val = [val[0].sub(&new[0]), val[1].sub(&new[1])];
        }
        new
    }

    /// Rotates `x` above its splay parent. Both carry cleared reverse bits and
    /// valid `scratch` minima.
    fn rotate(&mut self, x: usize) {
        self.rotations += 1;
        let y = self.verts[x].parent;
        let z = self.verts[y].parent;
        let y_was_root = self.is_splay_root(y);
        let ax = self.verts[x].scratch.clone();
        let ay = self.verts[y].scratch.clone();
        let x_is_left = self.verts[y].left == x;
        let b = if x_is_left { self.verts[x].right } else { self.verts[x].left };
        let b_abs = (b != NIL).then(|| self.child_abs(b, &ax));
        // y's other child keeps its place; x's outer child keeps its place
        let c = if x_is_left { self.verts[y].right } else { self.verts[y].left };
        let c_abs = (c != NIL).then(|| self.child_abs(c, &ay));
        let a = if x_is_left { self.verts[x].left } else { self.verts[x].right };
        let a_abs = (a != NIL).then(|| self.child_abs(a, &ax));
        if x_is_left {
            self.verts[y].left = b;
            self.verts[x].right = y;
        } else {
            self.verts[y].right = b;
            self.verts[x].left = y;
        }
        if b != NIL {
            self.verts[b].parent = y;
        }
        self.verts[y].parent = x;
        self.verts[x].parent = z;
        if !y_was_root {
            if self.verts[z].left == y {
                self.verts[z].left = x;
            } else {
                self.verts[z].right = x;
            }
        }
        let ny = if x_is_left {
            self.pull_from(y, &ay, b_abs, c_abs)
        } else {
            self.pull_from(y, &ay, c_abs, b_abs)
        };
        let nx = if x_is_left {
            self.pull_from(x, &ax, a_abs, Some(ny.clone()))
        } else {
            self.pull_from(x, &ax, Some(ny.clone()), a_abs)
        };
        if y_was_root {
            self.verts[x].d_min = nx.clone();
        } else {
            let az = self.verts[z].scratch.clone();
            self.set_child_rel(x, &nx, &az);
        }
        self.verts[x].scratch = nx;
        self.verts[y].scratch = ny;
    }

    /// Splays `x` to the root of its splay tree. Afterwards `x` has a clear
    /// reverse bit and `d_min[x]` holds its absolute minima.
    fn splay(&mut self, x: usize) {
        let mut path = vec![x];
        let mut u = x;
        while !self.is_splay_root(u) {
            u = self.verts[u].parent;
            path.push(u);
        }
        for &u in path.iter().rev() {
            self.push(u);
        }
        let root = *path.last().unwrap();
        self.verts[root].scratch = self.verts[root].d_min.clone();
        for i in (0..path.len() - 1).rev() {
            let abs = self.child_abs(path[i], &self.verts[path[i + 1]].scratch);
            self.verts[path[i]].scratch = abs;
        }
        while !self.is_splay_root(x) {
            let y = self.verts[x].parent;
            if !self.is_splay_root(y) {
                let z = self.verts[y].parent;
                let zig_zig = (self.verts[z].left == y) == (self.verts[y].left == x);
                if zig_zig {
                    self.rotate(y);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    /// Makes the path from `v` to its tree root solid; `v` ends as the splay
    /// root with no right (deeper) child.
    fn expose(&mut self, v: usize) {
        let mut last = NIL;
        let mut x = v;
        while x != NIL {
            self.splay(x);
            let ax = self.verts[x].d_min.clone();
            let r = self.verts[x].right;
            if r != NIL {
                let ra = self.child_abs(r, &ax);
                self.make_root_abs(r, ra);
            }
            let left = self.verts[x].left;
            let left_abs = (left != NIL).then(|| self.child_abs(left, &ax));
            let last_abs = (last != NIL).then(|| self.root_abs_in_parent_frame(last));
            self.verts[x].right = last;
            let nx = self.pull_from(x, &ax, left_abs, last_abs);
            self.verts[x].d_min = nx;
            last = x;
            x = self.verts[x].parent;
        }
        self.splay(v);
    }

    fn alloc_edge(&mut self, a: usize, b: usize) -> usize {
        let vert = Vert::new(Kind::Edge(a, b));
        if let Some(i) = self.free.pop() {
            self.verts[i] = vert;
            i
        } else {
            self.verts.push(vert);
            self.verts.len() - 1
        }
    }

    fn leftmost(&mut self, mut x: usize) -> usize {
        loop {
            self.push(x);
            let l = self.verts[x].left;
            if l == NIL {
                return x;
            }
            x = l;
        }
    }

    fn rightmost(&mut self, mut x: usize) -> usize {
        loop {
            self.push(x);
            let r = self.verts[x].right;
            if r == NIL {
                return x;
            }
            x = r;
        }
    }

    // ---- represented-forest operations --------------------------------------

    pub fn findroot(&mut self, v: usize) -> Result<usize> {
        let vx = self.vert_of(v)?;
        self.expose(vx);
        let r = self.leftmost(vx);
        self.splay(r);
        match self.verts[r].kind {
            Kind::Node(id) => Ok(id),
            _ => Err(Error::Internal("solid path starts with an edge vertex".into())),
        }
    }

    pub fn connected(&mut self, v: usize, w: usize) -> Result<bool> {
        Ok(self.findroot(v)? == self.findroot(w)?)
    }

    /// Adds edge `vw` of value `x` with `w` as the parent of `v`.
    pub fn link(&mut self, v: usize, w: usize, x: S) -> Result<()> {
        let (vx, wx) = (self.vert_of(v)?, self.vert_of(w)?);
        if self.color[v] == self.color[w] {
            return Err(Error::Usage("link: endpoints share a color".into()));
        }
        if x.is_negative() {
            return Err(Error::Usage("link: negative edge value".into()));
        }
        if self.findroot(v)? != v {
            return Err(Error::Usage("link: v is not a root".into()));
        }
        if self.findroot(w)? == v {
            return Err(Error::Usage("link: nodes already connected".into()));
        }
        let e = self.alloc_edge(v, w);
        let slot = self.color[w].slot();
        self.verts[e].d_min[slot] = Ext::Fin(x);
        self.expose(vx);
        self.verts[vx].parent = e;
        self.verts[e].parent = wx;
        Ok(())
    }

    /// Deletes the edge between `v` and its parent.
    pub fn cut(&mut self, v: usize) -> Result<()> {
        let vx = self.vert_of(v)?;
        self.expose(vx);
        let l = self.verts[vx].left;
        if l == NIL {
            return Err(Error::Usage("cut: v is a root".into()));
        }
        let av = self.verts[vx].d_min.clone();
        let la = self.child_abs(l, &av);
        self.make_root_abs(l, la);
        self.verts[l].parent = NIL;
        self.verts[vx].left = NIL;
        let nv = self.pull(vx, &av);
        self.verts[vx].d_min = nv;
        // the parent edge is the last vertex of the detached shallow part
        let e = self.rightmost(l);
        self.splay(e);
        if !matches!(self.verts[e].kind, Kind::Edge(..)) {
            return Err(Error::Internal("vertex preceding a node is not an edge".into()));
        }
        let rest = self.verts[e].left;
        if rest != NIL {
            let ae = self.verts[e].d_min.clone();
            let ra = self.child_abs(rest, &ae);
            self.make_root_abs(rest, ra);
            self.verts[rest].parent = NIL;
        }
        self.verts[e] = Vert::new(Kind::Free);
        self.free.push(e);
        Ok(())
    }

    /// Makes `v` the root of its tree.
    pub fn evert(&mut self, v: usize) -> Result<()> {
        let vx = self.vert_of(v)?;
        self.expose(vx);
        self.verts[vx].flip ^= true;
        Ok(())
    }

    /// Minimum blue edge value on the path from `v` to its root, with the last
    /// (rootmost) child endpoint among the minimum edges.
    pub fn findblue(&mut self, v: usize) -> Result<FindBlue<S>> {
        let vx = self.vert_of(v)?;
        self.expose(vx);
        let Ext::Fin(m) = self.verts[vx].d_min[BLUE].clone() else {
            return Ok(FindBlue::NoBlueEdge);
        };
        let hits = |a: &Ext<S>| matches!(a, Ext::Fin(x) if *x <= m || (x.clone() - m.clone()).is_negligible());
        let mut u = vx;
        let mut au = self.verts[vx].d_min.clone();
        let found = loop {
            let l = self.verts[u].left;
            if l != NIL {
                self.push(l);
                let la = self.child_abs(l, &au);
                if hits(&la[BLUE]) {
                    u = l;
                    au = la;
                    continue;
                }
            }
            if hits(&self.val_abs(u, &au)[BLUE]) {
                break u;
            }
            let r = self.verts[u].right;
            if r == NIL {
                return Err(Error::Internal("findblue lost the minimum".into()));
            }
            self.push(r);
            au = self.child_abs(r, &au);
            u = r;
        };
        self.splay(found);
        let value = self.edge_value_at_root(found);
        let Kind::Edge(a, b) = self.verts[found].kind else {
            return Err(Error::Internal("minimum found on a node vertex".into()));
        };
        let node = if self.color[a] == Color::Red { a } else { b };
        Ok(FindBlue::Edge { node, value })
    }

    /// Adds `x` to every edge of `color` on the path from `v` to its root.
    pub fn add_on_path(&mut self, v: usize, color: Color, x: S) -> Result<()> {
        let vx = self.vert_of(v)?;
        self.expose(vx);
        let k = color.slot();
        if let Ext::Fin(m) = &self.verts[vx].d_min[k] {
            let nm = m.clone() + x.clone();
            if nm.is_negative() && !nm.is_negligible() {
                return Err(Error::Usage("add: edge value would become negative".into()));
            }
            self.verts[vx].d_min[k] = Ext::Fin(nm);
        }
        Ok(())
    }

    pub fn addblue(&mut self, v: usize, x: S) -> Result<()> {
        self.add_on_path(v, Color::Blue, x)
    }

    pub fn addred(&mut self, v: usize, x: S) -> Result<()> {
        self.add_on_path(v, Color::Red, x)
    }

    /// Value of an edge vertex that is the root of its splay tree.
    fn edge_value_at_root(&self, e: usize) -> S {
        let abs = self.verts[e].d_min.clone();
        let val = self.val_abs(e, &abs);
        val[0].finite().or(val[1].finite()).cloned().expect("edge vertex carries a finite value")
    }

    /// Current edges as `(child, parent, value)`, sorted by child.
    pub fn edges(&mut self) -> Vec<(usize, usize, S)> {
        let mut out = Vec::new();
        for e in 0..self.verts.len() {
            let Kind::Edge(a, b) = self.verts[e].kind else { continue };
            self.splay(e);
            let abs = self.verts[e].d_min.clone();
            let val = self.val_abs(e, &abs);
            // after splaying, the frame is the true one: the finite slot is the edge color
            let (color, value) = match (&val[BLUE], &val[RED]) {
                (Ext::Fin(x), _) => (Color::Blue, x.clone()),
                (_, Ext::Fin(x)) => (Color::Red, x.clone()),
                _ => unreachable!("edge vertex without value"),
            };
            let (parent, child) = if self.color[a] == color { (a, b) } else { (b, a) };
            out.push((child, parent, value));
        }
        out.sort_by_key(|t| t.0);
        out
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

    /// Recomputes every splay subtree's minima from scratch and compares them
    /// with the values decoded from the Δ-fields.
    pub fn check_aggregates(&self) -> Result<()> {
        for root in 0..self.verts.len() {
            if matches!(self.verts[root].kind, Kind::Free) || !self.is_splay_root(root) {
                continue;
            }
            let abs = self.verts[root].d_min.clone();
            self.check_subtree(root, abs)?;
        }
        Ok(())
    }

    /// Returns the subtree minima recomputed bottom-up, in `x`'s frame.
    fn check_subtree(&self, x: usize, abs: Pair<S>) -> Result<Pair<S>> {
        let mut best = self.val_abs(x, &abs);
        if let Kind::Edge(..) = self.verts[x].kind {
            let finite = best.iter().filter(|v| v.finite().is_some()).count();
            if finite != 1 {
                return Err(Error::Internal(format!("edge vertex {x} has {finite} finite color slots")));
            }
        }
        for c in [self.verts[x].left, self.verts[x].right] {
            if c == NIL {
                continue;
            }
            let ca = self.child_abs(c, &abs);
            let f = self.verts[c].flip as usize;
            let own = [ca[f].clone(), ca[1 ^ f].clone()];
            let sub = self.check_subtree(c, own)?;
            let in_x = [sub[f].clone(), sub[1 ^ f].clone()];
            for k in 0..2 {
                best[k] = std::mem::replace(&mut best[k], Ext::Inf).min(in_x[k].clone());
            }
        }
        for k in 0..2 {
            let same = match (&best[k], &abs[k]) {
                (Ext::Inf, Ext::Inf) => true,
                (Ext::Fin(a), Ext::Fin(b)) => (a.clone() - b.clone()).is_negligible(),
                _ => false,
            };
            if !same {
                return Err(Error::Internal(format!("stale minimum at splay vertex {x}: {:?} vs {:?}", best[k], abs[k])));
            }
        }
        Ok(best)
    }
}

/// Cuts zero-valued blue edges on the path from `v` upward, rootmost first.
fn cut_zero_blue<S: Scalar>(forest: &mut RbForest<S>, v: usize) -> Result<()> {
    loop {
        match forest.findblue(v)? {
            FindBlue::Edge { node, value } if value.is_negligible() || value.is_negative() => forest.cut(node)?,
            _ => return Ok(()),
        }
    }
}

/// Re-routes flow around cycles of the support graph so that it becomes a
/// forest. Every point and range keeps its total, the surviving support is a
/// subset of the input support, and there are at most `points + ranges − 1`
/// edges. Triples are `(point, range, amount)`; non-positive ones are ignored.
pub fn prune_support<S: Scalar>(
    points: usize,
    ranges: usize,
    triples: &[(usize, usize, S)],
) -> Result<Vec<(usize, usize, S)>> {
    let mut forest =
        RbForest::with_nodes(std::iter::repeat_n(Color::Red, points).chain(std::iter::repeat_n(Color::Blue, ranges)));
    for (p, r, a) in triples {
        if !a.is_pos() {
            continue;
        }
        if *p >= points || *r >= ranges {
            return Err(Error::InvalidInput(format!("support edge ({p}, {r}) out of bounds")));
        }
        let (pn, rn) = (*p, points + *r);
        if !forest.connected(pn, rn)? {
            forest.evert(rn)?;
            forest.link(rn, pn, a.clone())?;
            continue;
        }
        forest.evert(pn)?;
        let FindBlue::Edge { value: delta, .. } = forest.findblue(rn)? else {
            return Err(Error::Internal("connected point and range without a blue edge between them".into()));
        };
        if *a <= delta || (a.clone() - delta.clone()).is_negligible() {
            forest.addred(rn, a.clone())?;
            forest.addblue(rn, -a.clone())?;
            cut_zero_blue(&mut forest, rn)?;
        } else {
            forest.addred(rn, delta.clone())?;
            forest.addblue(rn, -delta.clone())?;
            cut_zero_blue(&mut forest, rn)?;
            forest.evert(rn)?;
            forest.link(rn, pn, a.clone() - delta)?;
        }
    }
    let mut out: Vec<(usize, usize, S)> = forest
        .edges()
        .into_iter()
        .filter(|(_, _, x)| x.is_pos())
        .map(|(c, par, x)| if c < points { (c, par - points, x) } else { (par, c - points, x) })
        .collect();
    out.sort_by_key(|a| (a.0, a.1));
    Ok(out)
}

/// Prunes a phase flow to a forest support with the same per-node totals.
pub fn prune_to_forest<S: Scalar>(f: &PhaseState<S>) -> Result<PhaseState<S>> {
    let triples: Vec<(usize, usize, S)> = f.support().map(|(p, r, a)| (p, r, a.clone())).collect();
    let pruned = prune_support(f.num_points(), f.num_ranges(), &triples)?;
    Ok(f.with_support(pruned))
}
