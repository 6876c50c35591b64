//! Graphs with loops, biclique coverings, chromatic number and biclique
//! partition number.
//!
//! A biclique `(A, B)` covers the oriented edge `(x, y)` when `x ∈ A` and
//! `y ∈ B`. An edge `{u, v}` with `u != v` is counted once per biclique and
//! orientation that covers it; a loop `{u, u}` once per biclique with
//! `u ∈ A ∩ B`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BoolMatrix, Rectangle};
use crate::rank::{verify_rectangles, CoverKind, RectangleSet};

/// Default search-node budget for the graph solvers.
pub const DEFAULT_GRAPH_BUDGET: u64 = 50_000_000;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            g.insert(u, (u + 1) % n);
        }
        g
    }

    pub fn petersen() -> Self {
        let mut g = Graph::empty(10);
        for i in 0..5 {
            g.insert(i, (i + 1) % 5);
            g.insert(i, i + 5);
            g.insert(5 + i, 5 + (i + 2) % 5);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::OutOfBounds(format!(
                "edge ({u},{v}) in a graph on {} vertices",
                self.n
            )));
        }
        self.insert(u, v);
        Ok(())
    }

    pub(crate) fn insert(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn has_loops(&self) -> bool {
        (0..self.n).any(|v| self.adj[v].contains(v))
    }

    pub fn loops(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.adj[v].contains(v)).collect()
    }

    pub fn is_simple(&self) -> bool {
        !self.has_loops()
    }

    /// Edges `(u, v)` with `u <= v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.adj[u].ones().filter(move |&v| v >= u).map(move |v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Common degree when every vertex has the same number of neighbors.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n == 0 { 0 } else { self.degree(0) };
        (0..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::empty(vertices.len());
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a) {
                if self.adj[u].contains(v) {
                    g.insert(a, b);
                }
            }
        }
        g
    }

    pub fn adjacency_matrix(&self) -> Result<BoolMatrix> {
        BoolMatrix::from_fn(self.n, self.n, |u, v| self.adj[u].contains(v))
    }

    pub fn to_json(&self) -> String {
        canonical_json(&self.to_file())
    }

    fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: GraphFile = serde_json::from_str(s)?;
        Self::from_edges(f.n, f.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = GraphFile::deserialize(d)?;
        Graph::from_edges(f.n, f.edges.into_iter().map(|[u, v]| (u, v)))
            .map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

pub(crate) fn canonical_json<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .and_then(|v| serde_json::to_string(&v))
        .expect("serializable")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Biclique {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
}

impl Biclique {
    pub fn new(a: impl IntoIterator<Item = usize>, b: impl IntoIterator<Item = usize>) -> Self {
        let a: BTreeSet<usize> = a.into_iter().collect();
        let b: BTreeSet<usize> = b.into_iter().collect();
        Biclique {
            a: a.into_iter().collect(),
            b: b.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty() || self.b.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicliqueCovering {
    pub t: usize,
    pub bicliques: Vec<Biclique>,
}

impl BicliqueCovering {
    pub fn new(t: usize, bicliques: Vec<Biclique>) -> Self {
        BicliqueCovering { t, bicliques }
    }

    pub fn len(&self) -> usize {
        self.bicliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bicliques.is_empty()
    }

    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_vertices(g: &Graph, bicliques: &[Biclique]) -> Result<()> {
    for bc in bicliques {
        if let Some(&v) = bc.a.iter().chain(&bc.b).find(|&&v| v >= g.n) {
            return Err(Error::OutOfBounds(format!(
                "vertex {v} in a graph on {} vertices",
                g.n
            )));
        }
    }
    Ok(())
}

/// Coverage counts of all vertex pairs, keyed `(min, max)`.
fn coverage_map(bicliques: &[Biclique]) -> HashMap<(usize, usize), usize> {
    let mut counts = HashMap::new();
    for bc in bicliques {
        for &x in &bc.a {
            for &y in &bc.b {
                *counts.entry((x.min(y), x.max(y))).or_insert(0) += 1;
            }
        }
    }
    counts
}

pub fn coverage_count(g: &Graph, bicliques: &[Biclique], e: (usize, usize)) -> Result<usize> {
    let (u, v) = (e.0.min(e.1), e.0.max(e.1));
    if !g.has_edge(u, v) {
        return Err(Error::param(format!("({u},{v}) is not an edge")));
    }
    Ok(bicliques
        .iter()
        .map(|bc| {
            let (ua, ub) = (bc.a.contains(&u), bc.b.contains(&u));
            let (va, vb) = (bc.a.contains(&v), bc.b.contains(&v));
            if u == v {
                (ua && ub) as usize
            } else {
                (ua && vb) as usize + (va && ub) as usize
            }
        })
        .sum())
}

/// Every biclique lies in `g` and every edge is covered between 1 and `t`
/// times.
pub fn verify_covering(g: &Graph, c: &BicliqueCovering) -> Result<bool> {
    check_vertices(g, &c.bicliques)?;
    let genuine = c
        .bicliques
        .iter()
        .all(|bc| bc.a.iter().all(|&x| bc.b.iter().all(|&y| g.has_edge(x, y))));
    if !genuine {
        return Ok(false);
    }
    let counts = coverage_map(&c.bicliques);
    Ok(g.edges().into_iter().all(|e| {
        let k = counts.get(&e).copied().unwrap_or(0);
        k >= 1 && k <= c.t
    }))
}

/// Proper coloring with `colors[v] < count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub count: usize,
    pub colors: Vec<usize>,
}

pub fn is_proper_coloring(g: &Graph, colors: &[usize]) -> bool {
    colors.len() == g.n && g.edges().iter().all(|&(u, v)| colors[u] != colors[v])
}

struct ColorSearch<'a> {
    g: &'a Graph,
    k: usize,
    colors: Vec<usize>,
    /// `seen[v][c]`: neighbors of `v` colored `c`.
    seen: Vec<Vec<u32>>,
    sat: Vec<usize>,
    nodes: u64,
    budget: u64,
}

const NONE: usize = usize::MAX;

impl ColorSearch<'_> {
    fn assign(&mut self, v: usize, c: usize) {
        self.colors[v] = c;
        for u in self.g.adj[v].ones() {
            if self.seen[u][c] == 0 {
                self.sat[u] += 1;
            }
            self.seen[u][c] += 1;
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.colors[v] = NONE;
        for u in self.g.adj[v].ones() {
            self.seen[u][c] -= 1;
            if self.seen[u][c] == 0 {
                self.sat[u] -= 1;
            }
        }
    }

    fn pick(&self) -> Option<usize> {
        (0..self.g.n)
            .filter(|&v| self.colors[v] == NONE)
            .max_by_key(|&v| {
                let free_deg = self.g.adj[v].ones().filter(|&u| self.colors[u] == NONE).count();
                (self.sat[v], free_deg, std::cmp::Reverse(v))
            })
    }

    fn run(&mut self, used: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget {
                stage: format!("{}-coloring search", self.k),
            });
        }
        let Some(v) = self.pick() else {
            return Ok(true);
        };
        if self.sat[v] >= self.k {
            return Ok(false);
        }
        for c in 0..self.k.min(used + 1) {
            if self.seen[v][c] > 0 {
                continue;
            }
            self.assign(v, c);
            if self.run(used.max(c + 1))? {
                return Ok(true);
            }
            self.unassign(v, c);
        }
        Ok(false)
    }
}

/// A proper coloring with at most `k` colors, if one exists.
pub fn k_colorable(g: &Graph, k: usize) -> Result<Option<Vec<usize>>> {
    k_colorable_with_budget(g, k, DEFAULT_GRAPH_BUDGET)
}

pub fn k_colorable_with_budget(g: &Graph, k: usize, budget: u64) -> Result<Option<Vec<usize>>> {
    if g.has_loops() {
        return Err(Error::LoopsPresent);
    }
    if g.n == 0 {
        return Ok(Some(vec![]));
    }
    if k == 0 {
        return Ok(None);
    }
    let mut s = ColorSearch {
        g,
        k,
        colors: vec![NONE; g.n],
        seen: vec![vec![0; k]; g.n],
        sat: vec![0; g.n],
        nodes: 0,
        budget,
    };
    Ok(s.run(0)?.then_some(s.colors))
}

fn greedy_clique(g: &Graph) -> usize {
    let mut best = usize::from(g.n > 0);
    for start in 0..g.n {
        let mut cand = g.adj[start].clone();
        let mut size = 1;
        while let Some(v) = cand
            .ones()
            .max_by_key(|&v| (g.adj[v].intersection(&cand).count(), std::cmp::Reverse(v)))
        {
            size += 1;
            cand.intersect_with(&g.adj[v]);
        }
        best = best.max(size);
    }
    best
}

/// Exact chromatic number with an optimal coloring.
pub fn chromatic_number(g: &Graph) -> Result<Coloring> {
    chromatic_number_with_budget(g, DEFAULT_GRAPH_BUDGET)
}

pub fn chromatic_number_with_budget(g: &Graph, budget: u64) -> Result<Coloring> {
    if g.has_loops() {
        return Err(Error::LoopsPresent);
    }
    if g.n == 0 {
        return Ok(Coloring {
            count: 0,
            colors: vec![],
        });
    }
    let mut best = k_colorable_with_budget(g, g.n, budget)?.expect("n colors always suffice");
    let mut count = best.iter().max().map_or(0, |&c| c + 1);
    let lower = greedy_clique(g);
    while count > lower {
        match k_colorable_with_budget(g, count - 1, budget)? {
            Some(c) => {
                count = c.iter().max().map_or(0, |&x| x + 1);
                best = c;
            }
            None => break,
        }
    }
    Ok(Coloring {
        count,
        colors: best,
    })
}

#[derive(Clone, Debug)]
pub struct BpResult {
    pub value: usize,
    pub covering: BicliqueCovering,
    pub optimal: bool,
    pub nodes: u64,
}

struct BpSearch {
    n: usize,
    edges: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    failed: HashMap<FixedBitSet, usize>,
}

impl BpSearch {
    fn open_adj(&self, open: &FixedBitSet) -> Vec<FixedBitSet> {
        let mut adj = vec![FixedBitSet::with_capacity(self.n); self.n];
        for e in open.ones() {
            let (u, v) = self.edges[e];
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }

    /// Bicliques of uncovered edges containing the first uncovered edge,
    /// as edge sets, largest first.
    fn candidates(&mut self, open: &FixedBitSet) -> Vec<(Biclique, FixedBitSet)> {
        let first = open.ones().next().expect("nonempty");
        let (u, v) = self.edges[first];
        let adj = self.open_adj(open);
        let a_pool: Vec<usize> = adj[v].ones().filter(|&x| x != u).collect();
        let mut out = vec![];
        for amask in 0u64..1 << a_pool.len() {
            let mut a = vec![u];
            a.extend(a_pool.iter().enumerate().filter(|(i, _)| amask >> i & 1 == 1).map(|(_, &x)| x));
            let mut common = adj[u].clone();
            for &x in &a[1..] {
                common.intersect_with(&adj[x]);
            }
            let b_pool: Vec<usize> = common.ones().filter(|&y| y != v).collect();
            for bmask in 0u64..1 << b_pool.len() {
                self.nodes += 1;
                let mut b = vec![v];
                b.extend(b_pool.iter().enumerate().filter(|(i, _)| bmask >> i & 1 == 1).map(|(_, &y)| y));
                let mut set = FixedBitSet::with_capacity(self.edges.len());
                for &x in &a {
                    for &y in &b {
                        set.insert(self.index[&(x.min(y), x.max(y))]);
                    }
                }
                out.push((Biclique::new(a.iter().copied(), b), set));
            }
        }
        out.sort_by_key(|(_, s)| std::cmp::Reverse(s.count_ones(..)));
        out
    }

    /// Edges pairwise unable to share a biclique.
    fn lower_bound(&self, open: &FixedBitSet) -> usize {
        let adj = self.open_adj(open);
        let compatible = |(a, b): (usize, usize), (c, d): (usize, usize)| {
            (adj[a].contains(d) && adj[c].contains(b)) || (adj[a].contains(c) && adj[d].contains(b))
        };
        let mut fool: Vec<(usize, usize)> = vec![];
        for e in open.ones() {
            let edge = self.edges[e];
            if fool.iter().all(|&f| !compatible(f, edge)) {
                fool.push(edge);
            }
        }
        fool.len()
    }

    fn search(&mut self, open: &FixedBitSet, depth: usize, out: &mut Vec<Biclique>) -> bool {
        if open.is_clear() {
            return true;
        }
        if depth == 0 || self.exhausted {
            return false;
        }
        if self.failed.get(open).is_some_and(|&d| d >= depth) {
            return false;
        }
        if self.lower_bound(open) > depth {
            return false;
        }
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }
        for (bc, set) in self.candidates(open) {
            let mut rest = open.clone();
            rest.difference_with(&set);
            out.push(bc);
            if self.search(&rest, depth - 1, out) {
                return true;
            }
            out.pop();
            if self.exhausted {
                return false;
            }
        }
        self.failed.insert(open.clone(), depth);
        false
    }
}

/// Minimum biclique partition of a simple graph, by iterative deepening.
pub fn bp_exact(g: &Graph, budget: u64) -> Result<BpResult> {
    if g.has_loops() {
        return Err(Error::LoopsPresent);
    }
    let edges = g.edges();
    let index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    // star partition as the fallback certificate
    let mut stars = vec![];
    let mut left = g.clone();
    for v in 0..g.n {
        let nb: Vec<usize> = left.adj[v].ones().collect();
        if !nb.is_empty() {
            for &u in &nb {
                left.remove_edge(v, u);
            }
            stars.push(Biclique::new([v], nb));
        }
    }
    let mut s = BpSearch {
        n: g.n,
        edges: edges.clone(),
        index,
        nodes: 0,
        budget,
        exhausted: false,
        failed: HashMap::new(),
    };
    let mut open = FixedBitSet::with_capacity(edges.len());
    open.insert_range(..);
    let start = if edges.is_empty() { 0 } else { s.lower_bound(&open) };
    for depth in start..stars.len() {
        let mut found = vec![];
        if s.search(&open, depth, &mut found) {
            return Ok(BpResult {
                value: found.len(),
                covering: BicliqueCovering::new(1, found),
                optimal: true,
                nodes: s.nodes,
            });
        }
        if s.exhausted {
            break;
        }
    }
    Ok(BpResult {
        value: stars.len(),
        covering: BicliqueCovering::new(1, stars),
        optimal: !s.exhausted,
        nodes: s.nodes,
    })
}

/// Biclique indices containing a vertex, with its side in each.
type Label = (Vec<usize>, Vec<bool>);

/// From a `t`-covering of a simple graph, a biclique partition of the
/// subgraph of edges covered exactly `t` times, one biclique per label.
///
/// The label of an edge lists its covering biclique indices `i_1 < ... < i_t`
/// and which of them hold the endpoint that lies in `A_{i_1}` on their `A`
/// side. That endpoint goes to the label's first side.
pub fn partition_from_t_covering(h: &Graph, c: &BicliqueCovering) -> Result<(Graph, BicliqueCovering)> {
    if h.has_loops() {
        return Err(Error::LoopsPresent);
    }
    if !verify_covering(h, c)? {
        return Err(Error::Verification(format!(
            "input is not a valid {}-covering",
            c.t
        )));
    }
    let members: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = c
        .bicliques
        .iter()
        .map(|bc| (bc.a.iter().copied().collect(), bc.b.iter().copied().collect()))
        .collect();
    let mut groups: BTreeMap<Label, (BTreeSet<usize>, BTreeSet<usize>)> =
        BTreeMap::new();
    let mut h2 = Graph::empty(h.n);
    for (u, v) in h.edges() {
        // (index, u on the A side)
        let mut inc: Vec<(usize, bool)> = vec![];
        for (i, (a, b)) in members.iter().enumerate() {
            if a.contains(&u) && b.contains(&v) {
                inc.push((i, true));
            }
            if a.contains(&v) && b.contains(&u) {
                inc.push((i, false));
            }
        }
        if inc.len() != c.t {
            continue;
        }
        h2.insert(u, v);
        let (x, y, flip) = if inc[0].1 { (u, v, false) } else { (v, u, true) };
        let label = (
            inc.iter().map(|&(i, _)| i).collect::<Vec<_>>(),
            inc.iter().map(|&(_, s)| s ^ flip).collect::<Vec<_>>(),
        );
        let entry = groups.entry(label).or_default();
        entry.0.insert(x);
        entry.1.insert(y);
    }
    let bicliques = groups.into_values().map(|(a, b)| Biclique::new(a, b)).collect();
    Ok((h2, BicliqueCovering::new(1, bicliques)))
}

/// Rectangles `A×B` and `B×A` of a biclique partition of a simple graph.
pub fn rectangles_from_bicliques(g: &Graph, c: &BicliqueCovering) -> Result<RectangleSet> {
    if g.has_loops() {
        return Err(Error::LoopsPresent);
    }
    if c.t != 1 || !verify_covering(g, c)? {
        return Err(Error::Verification("input is not a biclique partition".into()));
    }
    let mut rects = vec![];
    for bc in c.bicliques.iter().filter(|bc| !bc.is_empty()) {
        rects.push(Rectangle::new(bc.a.clone(), bc.b.clone())?);
        rects.push(Rectangle::new(bc.b.clone(), bc.a.clone())?);
    }
    Ok(RectangleSet::new(CoverKind::Partition, rects))
}

/// Proper coloring read off a cover of the zeros of the adjacency matrix:
/// each vertex takes the first rectangle containing its diagonal cell.
pub fn coloring_from_zero_cover(g: &Graph, cover: &RectangleSet) -> Result<Coloring> {
    if g.has_loops() {
        return Err(Error::LoopsPresent);
    }
    if g.n == 0 {
        return Ok(Coloring {
            count: 0,
            colors: vec![],
        });
    }
    let zeros = g.adjacency_matrix()?.complement();
    if !verify_rectangles(&zeros, cover)? {
        return Err(Error::Verification("rectangles do not cover the zeros".into()));
    }
    let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
    let mut colors = vec![];
    for v in 0..g.n {
        let r = cover
            .rects
            .iter()
            .position(|r| r.contains(v, v))
            .expect("diagonal zeros are covered");
        let next = renumber.len();
        colors.push(*renumber.entry(r).or_insert(next));
    }
    Ok(Coloring {
        count: renumber.len(),
        colors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn coverage_examples() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let one = [Biclique::new([0], [1])];
        assert_eq!(coverage_count(&g, &one, (0, 1)).unwrap(), 1);
        let two = [Biclique::new([0], [1]), Biclique::new([1], [0])];
        assert_eq!(coverage_count(&g, &two, (1, 0)).unwrap(), 2);
        let lp = Graph::from_edges(1, [(0, 0)]).unwrap();
        assert_eq!(coverage_count(&lp, &[Biclique::new([0], [0])], (0, 0)).unwrap(), 1);
        assert!(coverage_count(&lp, &[], (0, 1)).is_err());
    }

    #[test]
    fn verify_examples() {
        let k3 = Graph::complete(3);
        let stars = BicliqueCovering::new(1, vec![Biclique::new([0], [1, 2]), Biclique::new([1], [2])]);
        assert!(verify_covering(&k3, &stars).unwrap());
        let bad = BicliqueCovering::new(1, vec![Biclique::new([0, 1], [0, 1])]);
        assert!(!verify_covering(&k3, &bad).unwrap());
        let star = BicliqueCovering::new(1, vec![Biclique::new([0, 2], [1])]);
        assert!(verify_covering(&path3(), &star).unwrap());
        let oob = BicliqueCovering::new(1, vec![Biclique::new([5], [1])]);
        assert!(verify_covering(&path3(), &oob).is_err());
    }

    #[test]
    fn chromatic_examples() {
        for n in 1..=6 {
            assert_eq!(chromatic_number(&Graph::complete(n)).unwrap().count, n);
        }
        assert_eq!(chromatic_number(&Graph::cycle(5)).unwrap().count, 3);
        let p = chromatic_number(&Graph::petersen()).unwrap();
        assert_eq!(p.count, 3);
        assert!(is_proper_coloring(&Graph::petersen(), &p.colors));
        assert!(k_colorable(&Graph::petersen(), 2).unwrap().is_none());
        let lp = Graph::from_edges(2, [(0, 0)]).unwrap();
        assert!(matches!(chromatic_number(&lp), Err(Error::LoopsPresent)));
        assert_eq!(chromatic_number(&Graph::empty(0)).unwrap().count, 0);
        assert_eq!(chromatic_number(&Graph::empty(3)).unwrap().count, 1);
    }

    #[test]
    fn bp_examples() {
        for n in 2..=5 {
            let r = bp_exact(&Graph::complete(n), DEFAULT_GRAPH_BUDGET).unwrap();
            assert_eq!(r.value, n - 1);
            assert!(r.optimal);
            assert!(verify_covering(&Graph::complete(n), &r.covering).unwrap());
        }
        assert_eq!(bp_exact(&Graph::from_edges(2, [(0, 1)]).unwrap(), 100).unwrap().value, 1);
        let c4 = Graph::cycle(4);
        let r = bp_exact(&c4, DEFAULT_GRAPH_BUDGET).unwrap();
        assert_eq!(r.value, 1);
        assert!(verify_covering(&c4, &r.covering).unwrap());
        assert_eq!(bp_exact(&Graph::empty(3), 10).unwrap().value, 0);
    }

    #[test]
    fn t_covering_examples() {
        let k3 = Graph::complete(3);
        let stars = BicliqueCovering::new(1, vec![Biclique::new([0], [1, 2]), Biclique::new([1], [2])]);
        let (h2, p) = partition_from_t_covering(&k3, &stars).unwrap();
        assert_eq!(h2, k3);
        assert!(verify_covering(&h2, &p).unwrap());

        // K4 covered twice on some edges
        let k4 = Graph::complete(4);
        let c = BicliqueCovering::new(
            2,
            vec![
                Biclique::new([0, 1], [2, 3]),
                Biclique::new([0], [1, 2, 3]),
                Biclique::new([1, 2], [3]),
            ],
        );
        assert!(verify_covering(&k4, &c).unwrap());
        let (h2, p) = partition_from_t_covering(&k4, &c).unwrap();
        assert_eq!(h2.edges(), vec![(0, 2), (0, 3), (1, 3)]);
        assert!(p.len() <= 36);
        assert!(verify_covering(&h2, &p).unwrap());

        let triple = BicliqueCovering::new(
            2,
            vec![Biclique::new([0], [1]), Biclique::new([1], [0]), Biclique::new([0], [1])],
        );
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert!(partition_from_t_covering(&edge, &triple).is_err());
    }

    #[test]
    fn bridge_examples() {
        let k3 = Graph::complete(3);
        let stars = BicliqueCovering::new(1, vec![Biclique::new([0], [1, 2]), Biclique::new([1], [2])]);
        let rects = rectangles_from_bicliques(&k3, &stars).unwrap();
        assert_eq!(rects.len(), 4);
        assert!(verify_rectangles(&k3.adjacency_matrix().unwrap(), &rects).unwrap());

        let diag = RectangleSet::new(
            CoverKind::Cover,
            (0..4).map(|v| Rectangle::new(vec![v], vec![v]).unwrap()).collect(),
        );
        let col = coloring_from_zero_cover(&Graph::complete(4), &diag).unwrap();
        assert_eq!(col.count, 4);

        let full = RectangleSet::new(
            CoverKind::Cover,
            vec![Rectangle::new(vec![0, 1, 2], vec![0, 1, 2]).unwrap()],
        );
        let col = coloring_from_zero_cover(&Graph::empty(3), &full).unwrap();
        assert_eq!(col.count, 1);
        assert!(coloring_from_zero_cover(&k3, &full).is_err());
    }

    #[test]
    fn json_formats() {
        let g = Graph::from_edges(3, [(1, 0), (2, 2)]).unwrap();
        assert_eq!(g.to_json(), r#"{"edges":[[0,1],[2,2]],"n":3}"#);
        assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
        let c = BicliqueCovering::new(1, vec![Biclique::new([0], [1])]);
        assert_eq!(c.to_json(), r#"{"bicliques":[{"A":[0],"B":[1]}],"t":1}"#);
        assert_eq!(BicliqueCovering::from_json(&c.to_json()).unwrap(), c);
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,5]]}"#).is_err());
    }
}
