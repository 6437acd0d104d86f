//! Adaptive sample graph of a domain carrying quasihyperbolic edge weights.
//!
//! The sample points are the corners of the leaves of a dyadic quadtree
//! refined until every cell is small compared with its distance to the
//! boundary (or reaches the resolution floor `h`). Nodes are joined to the
//! nodes lying on their own lattice within `KAPPA` cell sizes, which gives
//! sixteen edge directions on uniform patches. Edge weights integrate the
//! density along the straight edge with composite Gauss-Legendre quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::curve::Curve;
use crate::domain::{DomainSpec, Flavor};
use crate::error::{Error, Result};
use crate::point::PlanePoint;

/// Ratio of cell size to boundary distance above which a cell is split.
pub const THETA: f64 = 0.25;
/// Neighbour radius in units of the node's cell size.
pub const KAPPA: f64 = 2.5;

const GL_X: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL_W: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// Axis-aligned rectangle bounding the sampled part of a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Window {
    pub fn new(lo: Complex64, hi: Complex64) -> Self {
        Window {
            lo: Complex64::new(lo.re.min(hi.re), lo.im.min(hi.im)),
            hi: Complex64::new(lo.re.max(hi.re), lo.im.max(hi.im)),
        }
    }

    /// Bounding box of `pts` padded by `pad` on every side.
    pub fn around(pts: &[Complex64], pad: f64) -> Self {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        Window::new(lo - Complex64::new(pad, pad), hi + Complex64::new(pad, pad))
    }

    /// Default sampling window: the outer boundary's box for bounded
    /// domains; otherwise the box of the query points padded by four times
    /// their spread (at least one unit).
    pub fn for_domain(dom: &DomainSpec, pts: &[Complex64]) -> Self {
        if dom.is_bounded() {
            let (lo, hi) = dom.bounded_bbox().expect("bounded domain has a box");
            return Window::new(lo, hi);
        }
        let mut spread: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                spread = spread.max((pts[i] - pts[j]).norm());
            }
        }
        Window::around(pts, (4.0 * spread).max(1.0))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.lo.re && z.re <= self.hi.re && z.im >= self.lo.im && z.im <= self.hi.im
    }

    pub fn extent(&self) -> f64 {
        (self.hi.re - self.lo.re).max(self.hi.im - self.lo.im)
    }

    fn meets_cell(&self, center: Complex64, half: f64) -> bool {
        center.re + half >= self.lo.re
            && center.re - half <= self.hi.re
            && center.im + half >= self.lo.im
            && center.im - half <= self.hi.im
    }
}

/// How edges are weighted in a shortest-path query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weighting {
    /// Quasihyperbolic length in the given flavor.
    Qh(Flavor),
    /// Euclidean length.
    Length,
    /// Euclidean length times `1 + beta * min(1, length / boundary distance)`.
    Penalized(f64),
}

/// Result of a quasihyperbolic distance query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicResult {
    pub value: f64,
    pub path: Curve,
    pub flavor: Flavor,
    pub resolution: f64,
}

/// Shortest path between two points under some weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub value: f64,
    pub path: Vec<Complex64>,
}

/// A node with its connection cost, used for virtual endpoints.
#[derive(Debug, Clone, Copy)]
struct Stub {
    node: usize,
    len: f64,
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem(f64, u32);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances and predecessors of a Dijkstra run.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    pub dist: Vec<f64>,
    pred: Vec<u32>,
}

impl ShortestPathTree {
    /// Node indices from a source to `target` (inclusive).
    pub fn nodes_to(&self, target: usize) -> Vec<usize> {
        let mut out = vec![target];
        let mut k = target;
        while self.pred[k] != u32::MAX {
            k = self.pred[k] as usize;
            out.push(k);
        }
        out.reverse();
        out
    }
}

/// Quasihyperbolic density at `z`.
pub fn density(dom: &DomainSpec, z: Complex64, flavor: Flavor) -> f64 {
    match flavor {
        Flavor::Euclidean => 1.0 / dom.dist_euclidean(z),
        Flavor::Spherical => 2.0 / ((1.0 + z.norm_sqr()) * dom.dist_spherical(z)),
    }
}

/// Quasihyperbolic length of the segment `[p, q]` by composite 4-point
/// Gauss-Legendre quadrature. Panels are at most half the local length
/// scale, read off the boundary distances `dp`, `dq` at the endpoints.
pub fn segment_qh_length(dom: &DomainSpec, p: Complex64, q: Complex64, flavor: Flavor, dp: f64, dq: f64) -> f64 {
    let len = (q - p).norm();
    if len == 0.0 {
        return 0.0;
    }
    let scale = dp.min(dq).min(1.0 + p.norm().min(q.norm()));
    let panels = ((2.0 * len / scale).ceil() as usize).clamp(1, 4096);
    let mut acc = 0.0;
    for k in 0..panels {
        let a = k as f64 / panels as f64;
        let b = (k + 1) as f64 / panels as f64;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (x, w) in GL_X.iter().zip(GL_W.iter()) {
            let z = p + (q - p) * (mid + half * x);
            acc += w * half * density(dom, z, flavor);
        }
    }
    acc * len
}

/// Quasihyperbolic length of a polygonal curve with the same quadrature as
/// the graph edges.
pub fn curve_qh_length(dom: &DomainSpec, curve: &Curve, flavor: Flavor) -> f64 {
    let v = curve.vertices();
    let d: Vec<f64> = v.iter().map(|z| dom.dist_euclidean(*z)).collect();
    (1..v.len()).map(|k| segment_qh_length(dom, v[k - 1], v[k], flavor, d[k - 1], d[k])).sum()
}

/// The adaptive sample graph.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    dom: DomainSpec,
    h: f64,
    window: Window,
    root_half: f64,
    unit: f64,
    leaves: Vec<(Complex64, f64)>,
    nodes: Vec<Complex64>,
    size: Vec<f64>,
    dist_e: Vec<f64>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
    len: Vec<f64>,
    w_e: Vec<f64>,
    w_s: Vec<f64>,
    lattice: FxHashMap<(i64, i64), u32>,
}

impl MetricGraph {
    /// Sample `dom` inside `window` with resolution floor `h`.
    pub fn build(dom: &DomainSpec, h: f64, window: Window) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidDomain(format!("resolution must be positive, got {h}")));
        }
        let reach = [window.lo.re, window.lo.im, window.hi.re, window.hi.im]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(h);
        let root_half = 2f64.powi(reach.log2().ceil() as i32);
        let mut g = MetricGraph {
            dom: dom.clone(),
            h,
            window,
            root_half,
            unit: 0.0,
            leaves: Vec::new(),
            nodes: Vec::new(),
            size: Vec::new(),
            dist_e: Vec::new(),
            offsets: Vec::new(),
            adj: Vec::new(),
            len: Vec::new(),
            w_e: Vec::new(),
            w_s: Vec::new(),
            lattice: FxHashMap::default(),
        };
        g.build_tree();
        g.build_nodes();
        if g.nodes.is_empty() {
            return Err(Error::EmptyWindow);
        }
        g.build_edges();
        Ok(g)
    }

    /// Build with the default window for the given query points.
    pub fn for_points(dom: &DomainSpec, h: f64, pts: &[Complex64]) -> Result<Self> {
        Self::build(dom, h, Window::for_domain(dom, pts))
    }

    fn local_scale(&self, z: Complex64) -> f64 {
        let sd = self.dom.signed_distance(z);
        if sd <= 0.0 {
            return 0.0;
        }
        sd.min(0.5 * (1.0 + z.norm_sqr()) * self.dom.dist_spherical(z))
    }

    fn refine(&self, center: Complex64, size: f64) -> bool {
        size > self.h && (size > self.window.extent() / 16.0 || size > THETA * self.local_scale(center))
    }

    fn build_tree(&mut self) {
        let mut stack = vec![(Complex64::new(0.0, 0.0), 2.0 * self.root_half)];
        let mut leaves = Vec::new();
        while let Some((c, s)) = stack.pop() {
            let half = 0.5 * s;
            if !self.window.meets_cell(c, half) {
                continue;
            }
            if self.dom.signed_distance(c) < -half * std::f64::consts::SQRT_2 {
                continue;
            }
            if self.refine(c, s) {
                let q = 0.25 * s;
                for (dx, dy) in [(-q, -q), (q, -q), (-q, q), (q, q)] {
                    stack.push((c + Complex64::new(dx, dy), half));
                }
            } else {
                leaves.push((c, s));
            }
        }
        leaves.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        self.unit = leaves.iter().map(|l| l.1).fold(f64::INFINITY, f64::min);
        self.leaves = leaves;
    }

    fn key(&self, z: Complex64) -> (i64, i64) {
        ((z.re / self.unit).round() as i64, (z.im / self.unit).round() as i64)
    }

    fn build_nodes(&mut self) {
        let mut corners: FxHashMap<(i64, i64), f64> = FxHashMap::default();
        for &(c, s) in &self.leaves {
            let half = 0.5 * s;
            for (dx, dy) in [(-half, -half), (half, -half), (-half, half), (half, half)] {
                let p = c + Complex64::new(dx, dy);
                let k = self.key(p);
                let e = corners.entry(k).or_insert(s);
                *e = e.min(s);
            }
        }
        let mut keys: Vec<((i64, i64), f64)> = corners.into_iter().collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0));
        let unit = self.unit;
        let dom = &self.dom;
        let window = self.window;
        let kept: Vec<(Complex64, f64, f64)> = keys
            .par_iter()
            .filter_map(|&((i, j), s)| {
                let p = Complex64::new(i as f64 * unit, j as f64 * unit);
                if !window.contains(p) {
                    return None;
                }
                let d = dom.signed_distance(p);
                (d > 0.0).then_some((p, s, d))
            })
            .collect();
        self.nodes = kept.iter().map(|k| k.0).collect();
        self.size = kept.iter().map(|k| k.1).collect();
        self.dist_e = kept.iter().map(|k| k.2).collect();
        self.lattice = self.nodes.iter().enumerate().map(|(i, p)| (self.key(*p), i as u32)).collect();
    }

    fn lattice_offsets() -> Vec<(i64, i64)> {
        let r = KAPPA.ceil() as i64;
        let mut out = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                if (a, b) != (0, 0) && ((a * a + b * b) as f64) <= KAPPA * KAPPA {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn build_edges(&mut self) {
        let offs = Self::lattice_offsets();
        let n = self.nodes.len();
        let this = &*self;
        let found: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (ki, kj) = this.key(this.nodes[i]);
                let step = (this.size[i] / this.unit).round() as i64;
                let mut out = Vec::new();
                for &(a, b) in &offs {
                    if let Some(&j) = this.lattice.get(&(ki + a * step, kj + b * step)) {
                        out.push(j);
                    }
                }
                out
            })
            .collect();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (i, list) in found.iter().enumerate() {
            for &j in list {
                let (a, b) = if (i as u32) < j { (i as u32, j) } else { (j, i as u32) };
                pairs.push((a, b));
            }
        }
        pairs.par_sort_unstable();
        pairs.dedup();
        let weights: Vec<Option<(f64, f64, f64)>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (i, j) = (i as usize, j as usize);
                let p = this.nodes[i];
                let q = this.nodes[j];
                let l = (q - p).norm();
                let (dp, dq) = (this.dist_e[i], this.dist_e[j]);
                if l >= dp.max(dq) && !this.dom.segment_inside(p, q) {
                    return None;
                }
                let we = segment_qh_length(&this.dom, p, q, Flavor::Euclidean, dp, dq);
                let ws = segment_qh_length(&this.dom, p, q, Flavor::Spherical, dp, dq);
                Some((l, we, ws))
            })
            .collect();
        let mut degree = vec![0usize; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if weights[k].is_some() {
                degree[i as usize] += 1;
                degree[j as usize] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let m = offsets[n];
        let mut adj = vec![0u32; m];
        let mut len = vec![0.0; m];
        let mut w_e = vec![0.0; m];
        let mut w_s = vec![0.0; m];
        let mut fill = offsets.clone();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if let Some((l, we, ws)) = weights[k] {
                for (a, b) in [(i, j), (j, i)] {
                    let slot = fill[a as usize];
                    adj[slot] = b;
                    len[slot] = l;
                    w_e[slot] = we;
                    w_s[slot] = ws;
                    fill[a as usize] += 1;
                }
            }
        }
        self.offsets = offsets;
        self.adj = adj;
        self.len = len;
        self.w_e = w_e;
        self.w_s = w_s;
    }

    pub fn dom(&self) -> &DomainSpec {
        &self.dom
    }

    pub fn resolution(&self) -> f64 {
        self.h
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    /// Leaf cells `(center, size)` of the quadtree.
    pub fn leaves(&self) -> &[(Complex64, f64)] {
        &self.leaves
    }

    /// Cell size attached to a node (smallest adjacent leaf).
    pub fn node_size(&self, i: usize) -> f64 {
        self.size[i]
    }

    /// Euclidean boundary distance of a node.
    pub fn node_dist(&self, i: usize) -> f64 {
        self.dist_e[i]
    }

    /// Neighbours of node `i` with edge lengths and weights `(j, len, w_e, w_s)`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64, f64, f64)> + '_ {
        (self.offsets[i]..self.offsets[i + 1]).map(move |k| (self.adj[k] as usize, self.len[k], self.w_e[k], self.w_s[k]))
    }

    /// Index of the node located exactly at `z`, if any.
    pub fn node_at(&self, z: Complex64) -> Option<usize> {
        let i = *self.lattice.get(&self.key(z))? as usize;
        (self.nodes[i] == z).then_some(i)
    }

    /// Size of the quadtree leaf containing `z`.
    pub fn leaf_size_at(&self, z: Complex64) -> f64 {
        let mut c = Complex64::new(0.0, 0.0);
        let mut s = 2.0 * self.root_half;
        while self.refine(c, s) {
            let q = 0.25 * s;
            c += Complex64::new(if z.re >= c.re { q } else { -q }, if z.im >= c.im { q } else { -q });
            s *= 0.5;
        }
        s
    }

    fn edge_weight(&self, k: usize, i: usize, j: usize, w: Weighting) -> f64 {
        match w {
            Weighting::Qh(Flavor::Euclidean) => self.w_e[k],
            Weighting::Qh(Flavor::Spherical) => self.w_s[k],
            Weighting::Length => self.len[k],
            Weighting::Penalized(beta) => {
                let l = self.len[k];
                l * (1.0 + beta * (l / self.dist_e[i].min(self.dist_e[j])).min(1.0))
            }
        }
    }

    fn stub_weight(&self, z: Complex64, dz: f64, j: usize, w: Weighting) -> f64 {
        let p = self.nodes[j];
        match w {
            Weighting::Qh(f) => segment_qh_length(&self.dom, z, p, f, dz, self.dist_e[j]),
            Weighting::Length => (p - z).norm(),
            Weighting::Penalized(beta) => {
                let l = (p - z).norm();
                l * (1.0 + beta * (l / dz.min(self.dist_e[j])).min(1.0))
            }
        }
    }

    /// Nodes joined to `z` by a straight segment inside the domain: the
    /// lattice neighbours within `KAPPA` local cell sizes (widened until at
    /// least three are found).
    fn stubs(&self, z: Complex64, filter: Option<&(dyn Fn(Complex64, Complex64) -> bool + Sync)>) -> Vec<Stub> {
        if let Some(i) = self.node_at(z) {
            return vec![Stub { node: i, len: 0.0 }];
        }
        let base = self.leaf_size_at(z);
        let mut radius = KAPPA * base;
        for _ in 0..6 {
            let mut cand: Vec<usize> = Vec::new();
            let mut step = 2.0 * base;
            while step >= 0.25 * base && step >= self.unit * 0.999 {
                let k = (step / self.unit).round() as i64;
                let (cx, cy) = (((z.re / step).round()) as i64, ((z.im / step).round()) as i64);
                let r = (radius / step).ceil() as i64 + 1;
                for a in -r..=r {
                    for b in -r..=r {
                        if let Some(&j) = self.lattice.get(&((cx + a) * k, (cy + b) * k)) {
                            cand.push(j as usize);
                        }
                    }
                }
                step *= 0.5;
            }
            cand.sort_unstable();
            cand.dedup();
            let mut stubs: Vec<Stub> = cand
                .into_iter()
                .filter_map(|j| {
                    let p = self.nodes[j];
                    let l = (p - z).norm();
                    if l > radius {
                        return None;
                    }
                    if let Some(f) = filter {
                        if !f(z, p) {
                            return None;
                        }
                    }
                    if l >= self.dist_e[j] && !self.dom.segment_inside(z, p) {
                        return None;
                    }
                    Some(Stub { node: j, len: l })
                })
                .collect();
            if stubs.len() >= 3 {
                stubs.sort_by(|a, b| a.len.total_cmp(&b.len).then(a.node.cmp(&b.node)));
                return stubs;
            }
            radius *= 2.0;
        }
        Vec::new()
    }

    /// Dijkstra from weighted sources, optionally stopping once every target
    /// is settled.
    pub(crate) fn dijkstra(
        &self,
        sources: &[(usize, f64)],
        w: Weighting,
        filter: Option<&(dyn Fn(Complex64, Complex64) -> bool + Sync)>,
        stop_at: Option<&[usize]>,
    ) -> ShortestPathTree {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![u32::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &(s, c) in sources {
            if c < dist[s] {
                dist[s] = c;
                heap.push(HeapItem(c, s as u32));
            }
        }
        let mut remaining = stop_at.map(|t| {
            let mut v = t.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        });
        let is_target = stop_at.map(|t| {
            let mut mark = vec![false; n];
            for &k in t {
                mark[k] = true;
            }
            mark
        });
        while let Some(HeapItem(d, u)) = heap.pop() {
            let u = u as usize;
            if done[u] {
                continue;
            }
            done[u] = true;
            if let (Some(r), Some(mark)) = (remaining.as_mut(), is_target.as_ref()) {
                if mark[u] {
                    *r -= 1;
                    if *r == 0 {
                        break;
                    }
                }
            }
            for k in self.offsets[u]..self.offsets[u + 1] {
                let v = self.adj[k] as usize;
                if done[v] {
                    continue;
                }
                if let Some(f) = filter {
                    if !f(self.nodes[u], self.nodes[v]) {
                        continue;
                    }
                }
                let nd = d + self.edge_weight(k, u, v, w);
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = u as u32;
                    heap.push(HeapItem(nd, v as u32));
                }
            }
        }
        ShortestPathTree { dist, pred }
    }

    /// Full single-source run from a node.
    pub fn tree_from_node(&self, source: usize, w: Weighting) -> ShortestPathTree {
        self.dijkstra(&[(source, 0.0)], w, None, None)
    }

    /// Shortest path between two domain points (not necessarily nodes).
    pub fn shortest_path(
        &self,
        x: Complex64,
        y: Complex64,
        w: Weighting,
        filter: Option<&(dyn Fn(Complex64, Complex64) -> bool + Sync)>,
    ) -> Result<PathResult> {
        for z in [x, y] {
            if !self.dom.contains_finite(z) {
                return Err(Error::PointOutsideDomain(PlanePoint::from(z).to_string()));
            }
        }
        if x == y {
            return Ok(PathResult { value: 0.0, path: vec![x] });
        }
        let dx = self.dom.dist_euclidean(x);
        let dy = self.dom.dist_euclidean(y);
        let sx = self.stubs(x, filter);
        let sy = self.stubs(y, filter);
        let sources: Vec<(usize, f64)> = sx.iter().map(|s| (s.node, self.stub_weight(x, dx, s.node, w))).collect();
        let exits: Vec<(usize, f64)> = sy.iter().map(|s| (s.node, self.stub_weight(y, dy, s.node, w))).collect();
        let targets: Vec<usize> = exits.iter().map(|e| e.0).collect();
        let tree = self.dijkstra(&sources, w, filter, Some(&targets));
        let mut best = f64::INFINITY;
        let mut best_exit = None;
        for &(j, c) in &exits {
            let v = tree.dist[j] + c;
            if v < best {
                best = v;
                best_exit = Some(j);
            }
        }
        // a direct segment competes when both ends see each other nearby
        let reach = KAPPA * self.leaf_size_at(x).max(self.leaf_size_at(y));
        if (x - y).norm() <= reach && filter.map_or(true, |f| f(x, y)) && self.dom.segment_inside(x, y) {
            let direct = match w {
                Weighting::Qh(f) => segment_qh_length(&self.dom, x, y, f, dx, dy),
                Weighting::Length => (x - y).norm(),
                Weighting::Penalized(beta) => {
                    let l = (x - y).norm();
                    l * (1.0 + beta * (l / dx.min(dy)).min(1.0))
                }
            };
            if direct <= best {
                return Ok(PathResult { value: direct, path: vec![x, y] });
            }
        }
        let exit = best_exit.filter(|_| best.is_finite()).ok_or(Error::Disconnected)?;
        let mut path = vec![x];
        for k in tree.nodes_to(exit) {
            let p = self.nodes[k];
            if p != x {
                path.push(p);
            }
        }
        if *path.last().unwrap() != y {
            path.push(y);
        }
        Ok(PathResult { value: best, path })
    }

    /// Pairwise shortest-path distances between domain points, one
    /// Dijkstra run per source (in parallel). Each entry is the smaller of
    /// the two directed estimates, so the matrix is symmetric.
    pub fn distance_matrix(&self, pts: &[Complex64], w: Weighting) -> Result<Vec<Vec<f64>>> {
        for z in pts {
            if !self.dom.contains_finite(*z) {
                return Err(Error::PointOutsideDomain(PlanePoint::from(*z).to_string()));
            }
        }
        let stubs: Vec<Vec<(usize, f64)>> = pts
            .iter()
            .map(|&z| {
                let dz = self.dom.dist_euclidean(z);
                self.stubs(z, None).iter().map(|s| (s.node, self.stub_weight(z, dz, s.node, w))).collect()
            })
            .collect();
        let targets: Vec<usize> = stubs.iter().flatten().map(|s| s.0).collect();
        let rows: Vec<Vec<f64>> = (0..pts.len())
            .into_par_iter()
            .map(|i| {
                let tree = self.dijkstra(&stubs[i], w, None, Some(&targets));
                (0..pts.len())
                    .map(|j| {
                        if i == j {
                            return 0.0;
                        }
                        stubs[j].iter().map(|&(k, c)| tree.dist[k] + c).fold(f64::INFINITY, f64::min)
                    })
                    .collect()
            })
            .collect();
        let n = pts.len();
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                out[i][j] = rows[i][j].min(rows[j][i]);
            }
        }
        if out.iter().flatten().any(|d| !d.is_finite()) {
            return Err(Error::Disconnected);
        }
        Ok(out)
    }

    /// Shortest-path tree from a set of domain points (each joined to the
    /// graph by its stubs) and of graph nodes.
    pub fn tree_from_points(&self, pts: &[Complex64], nodes: &[usize], w: Weighting) -> ShortestPathTree {
        let mut sources: Vec<(usize, f64)> = nodes.iter().map(|&k| (k, 0.0)).collect();
        for &z in pts {
            let dz = self.dom.dist_euclidean(z);
            for s in self.stubs(z, None) {
                sources.push((s.node, self.stub_weight(z, dz, s.node, w)));
            }
        }
        self.dijkstra(&sources, w, None, None)
    }

    /// Quasihyperbolic geodesic between two points.
    pub fn geodesic(&self, x: PlanePoint, y: PlanePoint, flavor: Flavor) -> Result<GeodesicResult> {
        let (xf, yf) = match (x, y) {
            (PlanePoint::Finite(a), PlanePoint::Finite(b)) => (a, b),
            _ => return Err(Error::Unsupported("quasihyperbolic queries at infinity".into())),
        };
        let r = self.shortest_path(xf, yf, Weighting::Qh(flavor), None)?;
        let path = Curve::new(r.path)?;
        let value = curve_qh_length(&self.dom, &path, flavor);
        Ok(GeodesicResult { value, path, flavor, resolution: self.h })
    }

    /// Whether every leaf satisfies the refinement rule (small relative to
    /// its boundary distance, or at the resolution floor).
    pub fn whitney_ok(&self) -> bool {
        self.leaves.iter().all(|&(c, s)| !self.refine(c, s))
    }
}

/// Quasihyperbolic distance with a freshly built graph on the default window.
pub fn qh_distance(dom: &DomainSpec, x: PlanePoint, y: PlanePoint, flavor: Flavor, h: f64) -> Result<GeodesicResult> {
    for z in [x, y] {
        if !dom.contains(z) {
            return Err(Error::PointOutsideDomain(z.to_string()));
        }
    }
    let (xf, yf) = match (x.finite(), y.finite()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Unsupported("quasihyperbolic queries at infinity".into())),
    };
    let g = MetricGraph::for_points(dom, h, &[xf, yf])?;
    g.geodesic(x, y, flavor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::BoundaryComponent;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn unit_disc() -> DomainSpec {
        DomainSpec::new("disc", false, vec![BoundaryComponent::disc(0.0, 0.0, 1.0)]).unwrap()
    }

    #[test]
    fn disc_graph_is_whitney_and_symmetric() {
        let dom = unit_disc();
        let g = MetricGraph::for_points(&dom, 0.05, &[]).unwrap();
        assert!(g.node_count() > 0);
        assert!(g.whitney_ok());
        for i in 0..g.node_count() {
            assert!(g.node_dist(i) > 0.0);
            for (j, _, we, ws) in g.neighbors(i) {
                assert!(we > 0.0 && ws > 0.0);
                let back = g.neighbors(j).find(|e| e.0 == i).unwrap();
                assert_eq!(back.2, we);
            }
        }
    }

    #[test]
    fn radial_disc_distance() {
        let dom = unit_disc();
        let r = qh_distance(&dom, PlanePoint::new(0.0, 0.0), PlanePoint::new(0.5, 0.0), Flavor::Euclidean, 1e-2).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-2 * 2f64.ln(), "{}", r.value);
        assert_eq!(r.path.start(), c(0.0, 0.0));
        assert_eq!(r.path.end(), c(0.5, 0.0));
        assert!((curve_qh_length(&dom, &r.path, Flavor::Euclidean) - r.value).abs() < 1e-12);
    }

    #[test]
    fn halfplane_window_is_connected() {
        let dom = DomainSpec::new("upper", false, vec![BoundaryComponent::halfplane(0.0, 0.0, 0.0, 1.0)]).unwrap();
        let g = MetricGraph::build(&dom, 0.05, Window::new(c(-1.0, 0.1), c(1.0, 2.0))).unwrap();
        let t = g.tree_from_node(0, Weighting::Length);
        assert!(t.dist.iter().all(|d| d.is_finite()));
    }

    #[test]
    fn off_lattice_query_points() {
        let dom = unit_disc();
        let g = MetricGraph::for_points(&dom, 0.02, &[]).unwrap();
        let r = g.shortest_path(c(0.1234, -0.2), c(-0.31, 0.4567), Weighting::Length, None).unwrap();
        let straight = (c(0.1234, -0.2) - c(-0.31, 0.4567)).norm();
        assert!(r.value >= straight - 1e-12 && r.value < straight * 1.03);
    }

    #[test]
    fn empty_window() {
        let dom = unit_disc();
        let e = MetricGraph::build(&dom, 0.1, Window::new(c(5.0, 5.0), c(6.0, 6.0)));
        assert!(matches!(e, Err(Error::EmptyWindow)));
    }
}
