//! Exact binary rank (minimum rectangle partition of the ones) and Boolean
//! rank (minimum rectangle cover of the ones), with checkable certificates.
//!
//! Both solvers first collapse duplicate rows and columns and drop all-zero
//! ones; neither rank changes under this reduction and a certificate of the
//! reduced matrix expands back to one of the original. The search then runs
//! iterative deepening on the rectangle count with a transposition table of
//! states already shown infeasible for a given depth.
//!
//! * Binary rank branches on the first uncovered one-entry in row-major order
//!   and tries every all-ones rectangle of the uncovered region that contains
//!   it. Since everything before that entry is covered, the entry is the
//!   top-left corner of any such rectangle. Lower bound: the larger of a
//!   greedy fooling set and the real rank of the uncovered region.
//! * Boolean rank is a set cover over the maximal all-ones rectangles,
//!   branching on the uncovered entry with the fewest covering rectangles.
//!   Lower bound: a greedy fooling set among the uncovered entries.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{BoolMatrix, Rectangle};
use crate::scalar;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Memo entries beyond this are not recorded.
const MEMO_CAP: usize = 2_000_000;

/// Maximal rectangles enumerated before the cover solver gives up on optimality.
const MAX_MAXIMAL_RECTS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverKind {
    Partition,
    Cover,
}

/// Rectangles claimed to partition or cover the ones of a matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectangleSet {
    pub kind: CoverKind,
    pub rects: Vec<Rectangle>,
}

impl RectangleSet {
    pub fn new(kind: CoverKind, rects: Vec<Rectangle>) -> Self {
        RectangleSet { kind, rects }
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let set: RectangleSet = serde_json::from_str(s)?;
        let rects = set
            .rects
            .into_iter()
            .map(|r| Rectangle::new(r.rows, r.cols))
            .collect::<Result<Vec<_>>>()?;
        Ok(RectangleSet { kind: set.kind, rects })
    }

    /// Canonical JSON: sorted keys, compact.
    pub fn to_json(&self) -> String {
        serde_json::to_value(self)
            .and_then(|v| serde_json::to_string(&v))
            .expect("serializable")
    }
}

#[derive(Clone, Debug)]
pub struct RankResult {
    pub value: usize,
    pub certificate: RectangleSet,
    /// `false` when the node budget ran out; `value` is then an upper bound.
    pub optimal: bool,
    pub nodes: u64,
}

/// Checks that every rectangle is all-ones in `m`, that together they cover
/// exactly the ones of `m`, and, for partitions, that they are disjoint.
pub fn verify_rectangles(m: &BoolMatrix, set: &RectangleSet) -> Result<bool> {
    for r in &set.rects {
        r.check_bounds(m.rows(), m.cols())?;
    }
    let mut count = vec![0u32; m.rows() * m.cols()];
    for r in &set.rects {
        if r.rows.is_empty() || r.cols.is_empty() {
            return Ok(false);
        }
        for (i, j) in r.cells() {
            if !m.get(i, j) {
                return Ok(false);
            }
            count[i * m.cols() + j] += 1;
        }
    }
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let c = count[i * m.cols() + j];
            if m.get(i, j) && c == 0 {
                return Ok(false);
            }
            if set.kind == CoverKind::Partition && c > 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn binary_rank(m: &BoolMatrix, node_budget: u64) -> RankResult {
    solve(m, node_budget, CoverKind::Partition)
}

pub fn boolean_rank(m: &BoolMatrix, node_budget: u64) -> RankResult {
    solve(m, node_budget, CoverKind::Cover)
}

/// Nondeterministic, co-nondeterministic and unambiguous communication
/// complexity of the problem of `m`, as ceilings of log ranks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CcMeasures {
    pub np: u32,
    pub conp: u32,
    pub up: u32,
    pub optimal: bool,
}

pub fn cc_measures(m: &BoolMatrix, node_budget: u64) -> CcMeasures {
    let cover = boolean_rank(m, node_budget);
    let co_cover = boolean_rank(&m.complement(), node_budget);
    let part = binary_rank(m, node_budget);
    CcMeasures {
        np: scalar::ceil_log2(cover.value),
        conp: scalar::ceil_log2(co_cover.value),
        up: scalar::ceil_log2(part.value),
        optimal: cover.optimal && co_cover.optimal && part.optimal,
    }
}

fn solve(m: &BoolMatrix, budget: u64, kind: CoverKind) -> RankResult {
    if m.count_ones() == 0 {
        return RankResult {
            value: 0,
            certificate: RectangleSet::new(kind, vec![]),
            optimal: true,
            nodes: 0,
        };
    }
    let Some(red) = Reduced::new(m) else {
        let rects = row_class_rectangles(m);
        return RankResult {
            value: rects.len(),
            certificate: RectangleSet::new(kind, rects),
            optimal: false,
            nodes: 0,
        };
    };
    let (found, optimal, nodes) = match kind {
        CoverKind::Partition => PartitionSearch::new(&red.rows, red.ncols, budget).run(),
        CoverKind::Cover => match CoverSearch::new(&red.rows, red.ncols, budget) {
            Some(s) => s.run(),
            None => (vec![], false, 0),
        },
    };
    let mut rects: Vec<Rectangle> = if found.is_empty() {
        // Cover search could not enumerate maximal rectangles; fall back.
        red.rows
            .iter()
            .enumerate()
            .map(|(i, &mask)| (1u128 << i, mask))
            .collect::<Vec<_>>()
            .into_iter()
            .map(|(rm, cm)| red.expand(rm, cm))
            .collect()
    } else {
        found.into_iter().map(|(rm, cm)| red.expand(rm, cm)).collect()
    };
    rects.sort();
    RankResult {
        value: rects.len(),
        certificate: RectangleSet::new(kind, rects),
        optimal,
        nodes,
    }
}

/// One rectangle per class of identical nonzero rows; valid as both a
/// partition and a cover.
fn row_class_rectangles(m: &BoolMatrix) -> Vec<Rectangle> {
    let mut classes: Vec<(FixedBitSet, Vec<usize>)> = vec![];
    for i in 0..m.rows() {
        let r = m.row(i);
        if r.count_ones(..) == 0 {
            continue;
        }
        match classes.iter_mut().find(|(p, _)| p == r) {
            Some((_, rows)) => rows.push(i),
            None => classes.push((r.clone(), vec![i])),
        }
    }
    classes
        .into_iter()
        .map(|(p, rows)| Rectangle::new(rows, p.ones().collect()).expect("nonempty"))
        .collect()
}

/// The matrix with duplicate rows/columns merged and zero rows/columns
/// removed, stored as `u128` row masks. Transposed when that is what makes
/// the columns fit.
struct Reduced {
    rows: Vec<u128>,
    ncols: usize,
    row_groups: Vec<Vec<usize>>,
    col_groups: Vec<Vec<usize>>,
    transposed: bool,
}

impl Reduced {
    fn new(m: &BoolMatrix) -> Option<Self> {
        Self::build(m, false).or_else(|| Self::build(&m.transpose(), true))
    }

    fn build(m: &BoolMatrix, transposed: bool) -> Option<Self> {
        let mut row_pat: Vec<FixedBitSet> = vec![];
        let mut row_groups: Vec<Vec<usize>> = vec![];
        let mut index: HashMap<FixedBitSet, usize> = HashMap::new();
        for i in 0..m.rows() {
            let r = m.row(i);
            if r.count_ones(..) == 0 {
                continue;
            }
            match index.get(r) {
                Some(&g) => row_groups[g].push(i),
                None => {
                    index.insert(r.clone(), row_pat.len());
                    row_pat.push(r.clone());
                    row_groups.push(vec![i]);
                }
            }
        }
        if row_pat.len() > 128 {
            return None;
        }
        let mut col_index: HashMap<u128, usize> = HashMap::new();
        let mut col_groups: Vec<Vec<usize>> = vec![];
        let mut col_masks: Vec<u128> = vec![];
        for j in 0..m.cols() {
            let mut mask = 0u128;
            for (g, p) in row_pat.iter().enumerate() {
                if p.contains(j) {
                    mask |= 1 << g;
                }
            }
            if mask == 0 {
                continue;
            }
            match col_index.get(&mask) {
                Some(&c) => col_groups[c].push(j),
                None => {
                    if col_groups.len() == 128 {
                        return None;
                    }
                    col_index.insert(mask, col_groups.len());
                    col_groups.push(vec![j]);
                    col_masks.push(mask);
                }
            }
        }
        let mut rows = vec![0u128; row_pat.len()];
        for (c, &mask) in col_masks.iter().enumerate() {
            for (g, row) in rows.iter_mut().enumerate() {
                if mask >> g & 1 == 1 {
                    *row |= 1 << c;
                }
            }
        }
        Some(Reduced {
            ncols: col_groups.len(),
            rows,
            row_groups,
            col_groups,
            transposed,
        })
    }

    fn expand(&self, row_mask: u128, col_mask: u128) -> Rectangle {
        let rows: Vec<usize> = bits(row_mask)
            .flat_map(|g| self.row_groups[g].iter().copied())
            .collect();
        let cols: Vec<usize> = bits(col_mask)
            .flat_map(|c| self.col_groups[c].iter().copied())
            .collect();
        if self.transposed {
            Rectangle::new(cols, rows).expect("nonempty")
        } else {
            Rectangle::new(rows, cols).expect("nonempty")
        }
    }
}

fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

/// Iterates over all submasks of `mask`, including `0` and `mask` itself.
fn submasks(mask: u128) -> impl Iterator<Item = u128> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

fn mask_rank(rows: &[u128], ncols: usize) -> usize {
    let entries: Vec<Vec<i64>> = rows
        .iter()
        .filter(|&&r| r != 0)
        .map(|&r| (0..ncols).map(|j| (r >> j & 1) as i64).collect())
        .collect();
    scalar::exact_rank(&entries)
}

/// Greedy fooling set over `cells`: no two chosen cells fit together in an
/// all-ones rectangle of `grid`.
fn greedy_fooling(grid: &[u128], cells: &mut [(usize, usize)]) -> usize {
    let weight = |&(i, j): &(usize, usize)| {
        let col = grid.iter().filter(|&&r| r >> j & 1 == 1).count();
        grid[i].count_ones() as usize + col
    };
    cells.sort_by_key(|c| (weight(c), c.0, c.1));
    let mut chosen: Vec<(usize, usize)> = vec![];
    for &(a, b) in cells.iter() {
        let fooled = chosen
            .iter()
            .all(|&(c, d)| grid[a] >> d & 1 == 0 || grid[c] >> b & 1 == 0);
        if fooled {
            chosen.push((a, b));
        }
    }
    chosen.len()
}

type Rect = (u128, u128);

struct PartitionSearch {
    start: Vec<u128>,
    ncols: usize,
    budget: u64,
    nodes: u64,
    aborted: bool,
    failed: HashMap<Vec<u128>, usize>,
    stack: Vec<Rect>,
}

impl PartitionSearch {
    fn new(rows: &[u128], ncols: usize, budget: u64) -> Self {
        PartitionSearch {
            start: rows.to_vec(),
            ncols,
            budget,
            nodes: 0,
            aborted: false,
            failed: HashMap::new(),
            stack: vec![],
        }
    }

    fn run(mut self) -> (Vec<Rect>, bool, u64) {
        let greedy = greedy_partition(&self.start);
        let lb = self.lower_bound(&self.start.clone());
        for k in lb..greedy.len() {
            let start = self.start.clone();
            if self.dfs(start, k) {
                return (self.stack, true, self.nodes);
            }
            if self.aborted {
                return (greedy, false, self.nodes);
            }
        }
        (greedy, true, self.nodes)
    }

    fn lower_bound(&self, u: &[u128]) -> usize {
        let mut cells: Vec<(usize, usize)> = u
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| bits(r).map(move |j| (i, j)))
            .collect();
        let fool = greedy_fooling(u, &mut cells);
        fool.max(mask_rank(u, self.ncols))
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
        }
        self.aborted
    }

    fn dfs(&mut self, u: Vec<u128>, k: usize) -> bool {
        let Some(r) = u.iter().position(|&row| row != 0) else {
            return true;
        };
        if k == 0 || self.tick() {
            return false;
        }
        if self.failed.get(&u).is_some_and(|&f| f >= k) {
            return false;
        }
        if self.lower_bound(&u) > k {
            self.remember(u, k);
            return false;
        }
        let c = u[r].trailing_zeros() as usize;
        let mut cands: Vec<Rect> = vec![];
        let others = u[r] & !(1u128 << c);
        for sub in submasks(others) {
            let cols = sub | 1 << c;
            let mut row_ok = 0u128;
            for (i, &row) in u.iter().enumerate().skip(r + 1) {
                if row & cols == cols {
                    row_ok |= 1 << i;
                }
            }
            for rs in submasks(row_ok) {
                cands.push((rs | 1 << r, cols));
                if self.tick() {
                    return false;
                }
            }
        }
        cands.sort_by_key(|&(rm, cm)| {
            (
                std::cmp::Reverse(rm.count_ones() * cm.count_ones()),
                rm,
                cm,
            )
        });
        for (rm, cm) in cands {
            let mut next = u.clone();
            for i in bits(rm) {
                next[i] &= !cm;
            }
            self.stack.push((rm, cm));
            if self.dfs(next, k - 1) {
                return true;
            }
            self.stack.pop();
            if self.aborted {
                return false;
            }
        }
        self.remember(u, k);
        false
    }

    fn remember(&mut self, u: Vec<u128>, k: usize) {
        if self.failed.len() < MEMO_CAP {
            let e = self.failed.entry(u).or_insert(0);
            *e = (*e).max(k);
        }
    }
}

/// Upper bound for the partition search: repeatedly take the first uncovered
/// entry and the largest rectangle through it among a few natural candidates.
fn greedy_partition(start: &[u128]) -> Vec<Rect> {
    let mut u = start.to_vec();
    let mut out = vec![];
    while let Some(r) = u.iter().position(|&row| row != 0) {
        let c = u[r].trailing_zeros();
        let mut best: Rect = (1 << r, u[r]);
        let mut best_area = u[r].count_ones();
        for (t, &row) in u.iter().enumerate().skip(r) {
            if row >> c & 1 == 0 {
                continue;
            }
            let cols = u[r] & if t == r { u128::MAX } else { row };
            let rm = u
                .iter()
                .enumerate()
                .skip(r)
                .filter(|(_, &x)| x & cols == cols)
                .fold(0u128, |acc, (i, _)| acc | 1 << i);
            let area = rm.count_ones() * cols.count_ones();
            if area > best_area {
                best = (rm, cols);
                best_area = area;
            }
        }
        for i in bits(best.0) {
            u[i] &= !best.1;
        }
        out.push(best);
    }
    out
}

struct CoverSearch {
    grid: Vec<u128>,
    cells: Vec<(usize, usize)>,
    rects: Vec<Rect>,
    rect_cells: Vec<FixedBitSet>,
    /// For each cell, the rectangles containing it.
    covering: Vec<Vec<usize>>,
    budget: u64,
    nodes: u64,
    aborted: bool,
    failed: HashMap<FixedBitSet, usize>,
    stack: Vec<usize>,
}

impl CoverSearch {
    fn new(rows: &[u128], _ncols: usize, budget: u64) -> Option<Self> {
        let rects = maximal_rectangles(rows)?;
        let cells: Vec<(usize, usize)> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| bits(r).map(move |j| (i, j)))
            .collect();
        let cell_index: HashMap<(usize, usize), usize> =
            cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut rect_cells = vec![];
        let mut covering = vec![vec![]; cells.len()];
        for (idx, &(rm, cm)) in rects.iter().enumerate() {
            let mut set = FixedBitSet::with_capacity(cells.len());
            for i in bits(rm) {
                for j in bits(cm) {
                    let k = cell_index[&(i, j)];
                    set.insert(k);
                    covering[k].push(idx);
                }
            }
            rect_cells.push(set);
        }
        Some(CoverSearch {
            grid: rows.to_vec(),
            cells,
            rects,
            rect_cells,
            covering,
            budget,
            nodes: 0,
            aborted: false,
            failed: HashMap::new(),
            stack: vec![],
        })
    }

    fn run(mut self) -> (Vec<Rect>, bool, u64) {
        let greedy = self.greedy();
        let mut all = FixedBitSet::with_capacity(self.cells.len());
        all.insert_range(..);
        let lb = self.lower_bound(&all);
        for k in lb..greedy.len() {
            if self.dfs(all.clone(), k) {
                let found = self.stack.iter().map(|&i| self.rects[i]).collect();
                return (found, true, self.nodes);
            }
            if self.aborted {
                break;
            }
        }
        let optimal = !self.aborted;
        let found = greedy.iter().map(|&i| self.rects[i]).collect();
        (found, optimal, self.nodes)
    }

    fn greedy(&self) -> Vec<usize> {
        let mut uncovered = FixedBitSet::with_capacity(self.cells.len());
        uncovered.insert_range(..);
        let mut out = vec![];
        while uncovered.count_ones(..) > 0 {
            let best = (0..self.rects.len())
                .max_by_key(|&i| {
                    (
                        self.rect_cells[i].intersection_count(&uncovered),
                        std::cmp::Reverse(i),
                    )
                })
                .expect("rectangles cover every one");
            uncovered.difference_with(&self.rect_cells[best]);
            out.push(best);
        }
        out
    }

    fn lower_bound(&self, uncovered: &FixedBitSet) -> usize {
        let mut cells: Vec<(usize, usize)> = uncovered.ones().map(|k| self.cells[k]).collect();
        greedy_fooling(&self.grid, &mut cells)
    }

    fn dfs(&mut self, uncovered: FixedBitSet, k: usize) -> bool {
        if uncovered.is_clear() {
            return true;
        }
        if k == 0 {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return false;
        }
        if self.failed.get(&uncovered).is_some_and(|&f| f >= k) {
            return false;
        }
        if self.lower_bound(&uncovered) > k {
            self.remember(uncovered, k);
            return false;
        }
        let cell = uncovered
            .ones()
            .min_by_key(|&c| (self.covering[c].len(), c))
            .expect("nonempty");
        let mut options = self.covering[cell].clone();
        options.sort_by_key(|&i| {
            (
                std::cmp::Reverse(self.rect_cells[i].intersection_count(&uncovered)),
                i,
            )
        });
        for i in options {
            let mut next = uncovered.clone();
            next.difference_with(&self.rect_cells[i]);
            self.stack.push(i);
            if self.dfs(next, k - 1) {
                return true;
            }
            self.stack.pop();
            if self.aborted {
                return false;
            }
        }
        self.remember(uncovered, k);
        false
    }

    fn remember(&mut self, u: FixedBitSet, k: usize) {
        if self.failed.len() < MEMO_CAP {
            let e = self.failed.entry(u).or_insert(0);
            *e = (*e).max(k);
        }
    }
}

/// All maximal all-ones rectangles, as (row mask, column mask). Column sets
/// of maximal rectangles are exactly the nonempty intersections of rows.
fn maximal_rectangles(rows: &[u128]) -> Option<Vec<Rect>> {
    let mut seen: std::collections::HashSet<u128> = rows.iter().copied().filter(|&r| r != 0).collect();
    let mut frontier: Vec<u128> = seen.iter().copied().collect();
    while let Some(cols) = frontier.pop() {
        for &r in rows {
            let c = cols & r;
            if c != 0 && seen.insert(c) {
                if seen.len() > MAX_MAXIMAL_RECTS {
                    return None;
                }
                frontier.push(c);
            }
        }
    }
    let mut out: Vec<Rect> = seen
        .into_iter()
        .map(|cols| {
            let rm = rows
                .iter()
                .enumerate()
                .filter(|(_, &r)| r & cols == cols)
                .fold(0u128, |acc, (i, _)| acc | 1 << i);
            (rm, cols)
        })
        .collect();
    out.sort();
    Some(out)
}
