//! Boolean functions as truth tables, and their certificate complexities.
//!
//! Input `z = (z_1, ..., z_n)` is stored at index `sum z_j * 2^(n-j)`, so
//! `z_1` is the most significant bit and variable `j` lives at bit `n - j`.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable count accepted by the measure computations; the subcube
/// table has `4^n` bits.
pub const MAX_MEASURE_VARS: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    values: FixedBitSet,
}

impl TruthTable {
    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut values = FixedBitSet::with_capacity(1 << n);
        for z in 0..1usize << n {
            if f(z) {
                values.insert(z);
            }
        }
        TruthTable { n, values }
    }

    pub fn from_values(n: usize, values: &[bool]) -> Result<Self> {
        if values.len() != 1 << n {
            return Err(Error::param(format!(
                "truth table for {n} variables needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(Self::from_fn(n, |z| values[z]))
    }

    /// The function whose truth table, read as a binary numeral with `f(0)`
    /// as the most significant digit, equals `code`.
    pub fn from_code(n: usize, code: u64) -> Self {
        let len = 1usize << n;
        Self::from_fn(n, |z| code >> (len - 1 - z) & 1 == 1)
    }

    pub fn constant(n: usize, value: bool) -> Self {
        Self::from_fn(n, |_| value)
    }

    pub fn and(n: usize) -> Self {
        Self::from_fn(n, |z| z == (1 << n) - 1)
    }

    pub fn or(n: usize) -> Self {
        Self::from_fn(n, |z| z != 0)
    }

    pub fn xor(n: usize) -> Self {
        Self::from_fn(n, |z| z.count_ones() % 2 == 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, z: usize) -> bool {
        self.values.contains(z)
    }

    /// Value at the input given as bits `z_1..z_n`.
    pub fn eval_bits(&self, bits: &[bool]) -> bool {
        let z = bits.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        self.eval(z)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.ones()
    }

    pub fn count_ones(&self) -> usize {
        self.values.count_ones(..)
    }

    pub fn negate(&self) -> Self {
        let mut values = self.values.clone();
        values.toggle_range(..);
        TruthTable { n: self.n, values }
    }

    /// Truth table as a `0`/`1` string in index order.
    pub fn bit_string(&self) -> String {
        (0..1usize << self.n)
            .map(|z| if self.eval(z) { '1' } else { '0' })
            .collect()
    }

    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.n, self.bit_string())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let (l1, first) = lines.next().ok_or_else(|| Error::parse(1, "missing variable count"))?;
        if first.is_empty() || !first.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(l1, format!("invalid variable count {first:?}")));
        }
        let n: usize = first
            .parse()
            .map_err(|_| Error::parse(l1, "invalid variable count"))?;
        if n > 24 {
            return Err(Error::parse(l1, format!("too many variables: {n}")));
        }
        let (l2, bits) = lines
            .next()
            .ok_or_else(|| Error::parse(2, "missing truth table line"))?;
        if let Some(pos) = bits.bytes().position(|b| b != b'0' && b != b'1') {
            return Err(Error::parse(l2, format!("invalid character at column {}", pos + 1)));
        }
        if bits.len() != 1 << n {
            return Err(Error::parse(
                l2,
                format!("expected {} values, found {}", 1usize << n, bits.len()),
            ));
        }
        for (lno, rest) in lines {
            if !rest.is_empty() {
                return Err(Error::parse(lno, "unexpected content after truth table"));
            }
        }
        let values: Vec<bool> = bits.bytes().map(|b| b == b'1').collect();
        Self::from_values(n, &values)
    }
}

impl std::fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruthTable({}, {})", self.n, self.bit_string())
    }
}

/// Conjunction of literals: variable index (1-based) to required value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subcube {
    pub fixed: BTreeMap<usize, bool>,
}

impl Subcube {
    pub fn new(fixed: impl IntoIterator<Item = (usize, bool)>) -> Self {
        Subcube {
            fixed: fixed.into_iter().collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.fixed.len()
    }

    /// `(mask, value)` over input indices of an `n`-variable function.
    pub fn masks(&self, n: usize) -> (usize, usize) {
        let mut mask = 0;
        let mut value = 0;
        for (&var, &b) in &self.fixed {
            let bit = 1 << (n - var);
            mask |= bit;
            if b {
                value |= bit;
            }
        }
        (mask, value)
    }

    fn from_masks(n: usize, mask: usize, value: usize) -> Self {
        Subcube::new(
            (1..=n)
                .filter(|&v| mask >> (n - v) & 1 == 1)
                .map(|v| (v, value >> (n - v) & 1 == 1)),
        )
    }

    pub fn in_range(&self, n: usize) -> bool {
        self.fixed.keys().all(|&v| v >= 1 && v <= n)
    }

    pub fn satisfied_by(&self, n: usize, z: usize) -> bool {
        let (mask, value) = self.masks(n);
        z & mask == value
    }

    /// Signed-literal form: `j` for `x_j`, `-j` for its negation.
    pub fn literals(&self) -> Vec<i64> {
        self.fixed
            .iter()
            .map(|(&v, &b)| if b { v as i64 } else { -(v as i64) })
            .collect()
    }

    pub fn from_literals(lits: &[i64]) -> Result<Self> {
        let mut fixed = BTreeMap::new();
        for &l in lits {
            if l == 0 {
                return Err(Error::param("literal 0 is not a variable"));
            }
            let var = l.unsigned_abs() as usize;
            if fixed.insert(var, l > 0).is_some_and(|old| old != (l > 0)) {
                return Err(Error::param(format!("clause fixes x{var} both ways")));
            }
        }
        Ok(Subcube { fixed })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dnf {
    pub clauses: Vec<Subcube>,
    pub unambiguous: bool,
}

impl Dnf {
    pub fn width(&self) -> usize {
        self.clauses.iter().map(Subcube::width).max().unwrap_or(0)
    }

    pub fn eval(&self, n: usize, z: usize) -> bool {
        self.clauses.iter().any(|c| c.satisfied_by(n, z))
    }
}

/// On-disk DNF: `{"clauses":[[1,-2],...],"n":N,"unambiguous":true}`, each
/// clause a list of signed 1-based literals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DnfFile {
    pub n: usize,
    pub unambiguous: bool,
    pub clauses: Vec<Vec<i64>>,
}

impl DnfFile {
    pub fn from_dnf(n: usize, dnf: &Dnf) -> Self {
        DnfFile {
            n,
            unambiguous: dnf.unambiguous,
            clauses: dnf.clauses.iter().map(Subcube::literals).collect(),
        }
    }

    pub fn to_dnf(&self) -> Result<Dnf> {
        let clauses = self
            .clauses
            .iter()
            .map(|c| Subcube::from_literals(c))
            .collect::<Result<Vec<_>>>()?;
        if let Some(c) = clauses.iter().find(|c| !c.in_range(self.n)) {
            return Err(Error::OutOfBounds(format!(
                "clause {:?} mentions a variable outside 1..={}",
                c.literals(),
                self.n
            )));
        }
        Ok(Dnf {
            clauses,
            unambiguous: self.unambiguous,
        })
    }
}

/// `inside[free][z]`: the subcube through `z` with the bits of `free` left
/// open lies entirely in `f^{-1}(1)`.
struct CubeTable {
    n: usize,
    inside: Vec<FixedBitSet>,
}

impl CubeTable {
    fn new(f: &TruthTable) -> Result<Self> {
        let n = f.n;
        if n > MAX_MEASURE_VARS {
            return Err(Error::param(format!(
                "certificate measures support at most {MAX_MEASURE_VARS} variables"
            )));
        }
        let size = 1usize << n;
        let mut inside: Vec<FixedBitSet> = Vec::with_capacity(size);
        inside.push(f.values.clone());
        for free in 1..size {
            let low = free & free.wrapping_neg();
            let base = &inside[free ^ low];
            let mut cur = FixedBitSet::with_capacity(size);
            for z in base.ones() {
                if base.contains(z ^ low) {
                    cur.insert(z);
                }
            }
            inside.push(cur);
        }
        Ok(CubeTable { n, inside })
    }

    fn full(&self) -> usize {
        (1 << self.n) - 1
    }
}

/// Smallest width of a subcube through each one-input that stays inside
/// `f^{-1}(1)`, with the cube achieving it.
fn min_certificates(f: &TruthTable) -> Result<Vec<(usize, usize, usize)>> {
    let table = CubeTable::new(f)?;
    let mut frees: Vec<usize> = (0..=table.full()).collect();
    frees.sort_by_key(|&s| (std::cmp::Reverse(s.count_ones()), s));
    Ok(f
        .ones()
        .map(|z| {
            let free = *frees
                .iter()
                .find(|&&s| table.inside[s].contains(z))
                .expect("the point itself is a cube");
            let mask = table.full() & !free;
            (z, mask, z & mask)
        })
        .collect())
}

/// 1-certificate complexity: the least `k` such that `f` is a `k`-DNF.
pub fn c1(f: &TruthTable) -> Result<usize> {
    Ok(min_certificates(f)?
        .iter()
        .map(|&(_, mask, _)| mask.count_ones() as usize)
        .max()
        .unwrap_or(0))
}

/// A DNF of width `c1(f)` made of one minimal certificate per one-input.
pub fn c1_dnf(f: &TruthTable) -> Result<Dnf> {
    let mut cubes: Vec<(usize, usize)> = min_certificates(f)?
        .into_iter()
        .map(|(_, m, v)| (m, v))
        .collect();
    cubes.sort_unstable();
    cubes.dedup();
    Ok(Dnf {
        clauses: cubes
            .into_iter()
            .map(|(m, v)| Subcube::from_masks(f.n, m, v))
            .collect(),
        unambiguous: false,
    })
}

/// 0-certificate complexity, `c1` of the negation.
pub fn c0(f: &TruthTable) -> Result<usize> {
    c1(&f.negate())
}

/// Unambiguous 1-certificate complexity.
pub fn uc1(f: &TruthTable) -> Result<usize> {
    Ok(uc1_dnf(f)?.width())
}

/// An unambiguous DNF of minimum width: a partition of `f^{-1}(1)` into
/// subcubes, found by iterative deepening on the width bound.
pub fn uc1_dnf(f: &TruthTable) -> Result<Dnf> {
    let table = CubeTable::new(f)?;
    let n = f.n;
    let size = 1usize << n;
    let ones: FixedBitSet = f.values.clone();
    if ones.is_clear() {
        return Ok(Dnf {
            clauses: vec![],
            unambiguous: true,
        });
    }
    for k in 0..=n {
        // cubes of width <= k inside f^{-1}(1), as (mask, value, points)
        let mut cubes: Vec<(usize, usize, FixedBitSet)> = vec![];
        for free in 0..size {
            if n - free.count_ones() as usize > k {
                continue;
            }
            let mask = table.full() & !free;
            for z in table.inside[free].ones() {
                if z & free != 0 {
                    continue;
                }
                let mut pts = FixedBitSet::with_capacity(size);
                let mut sub = free;
                loop {
                    pts.insert(z | sub);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & free;
                }
                cubes.push((mask, z, pts));
            }
        }
        let mut by_point: Vec<Vec<usize>> = vec![vec![]; size];
        for (i, (_, _, pts)) in cubes.iter().enumerate() {
            for p in pts.ones() {
                by_point[p].push(i);
            }
        }
        let mut chosen = vec![];
        if exact_cover(&cubes, &by_point, ones.clone(), &mut chosen) {
            let mut clauses: Vec<Subcube> = chosen
                .iter()
                .map(|&i| Subcube::from_masks(n, cubes[i].0, cubes[i].1))
                .collect();
            clauses.sort();
            return Ok(Dnf {
                clauses,
                unambiguous: true,
            });
        }
    }
    unreachable!("single points always partition f^{{-1}}(1)")
}

fn exact_cover(
    cubes: &[(usize, usize, FixedBitSet)],
    by_point: &[Vec<usize>],
    uncovered: FixedBitSet,
    chosen: &mut Vec<usize>,
) -> bool {
    if uncovered.is_clear() {
        return true;
    }
    let fits = |i: &usize| cubes[*i].2.is_subset(&uncovered);
    let Some(point) = uncovered
        .ones()
        .min_by_key(|&p| (by_point[p].iter().filter(|i| fits(i)).count(), p))
    else {
        return true;
    };
    let mut options: Vec<usize> = by_point[point].iter().copied().filter(|i| fits(i)).collect();
    options.sort_by_key(|&i| std::cmp::Reverse(cubes[i].2.count_ones(..)));
    for i in options {
        let mut next = uncovered.clone();
        next.difference_with(&cubes[i].2);
        chosen.push(i);
        if exact_cover(cubes, by_point, next, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// True iff `dnf` computes exactly `f` and, when flagged unambiguous, no
/// input satisfies two clauses.
pub fn verify_dnf(f: &TruthTable, dnf: &Dnf) -> bool {
    let n = f.n;
    if !dnf.clauses.iter().all(|c| c.in_range(n)) {
        return false;
    }
    let masks: Vec<(usize, usize)> = dnf.clauses.iter().map(|c| c.masks(n)).collect();
    (0..1usize << n).all(|z| {
        let hits = masks.iter().filter(|&&(m, v)| z & m == v).count();
        (hits > 0) == f.eval(z) && (!dnf.unambiguous || hits <= 1)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measures {
    pub c1: usize,
    pub c0: usize,
    pub uc1: usize,
}

pub fn measures(f: &TruthTable) -> Result<Measures> {
    Ok(Measures {
        c1: c1(f)?,
        c0: c0(f)?,
        uc1: uc1(f)?,
    })
}

#[derive(Clone, Debug)]
pub struct GapResult {
    pub f: TruthTable,
    pub uc1: usize,
    pub c0: usize,
    /// Functions examined.
    pub examined: u64,
    /// Every function on `n` variables was examined.
    pub exhaustive: bool,
    /// Exhaustive enumeration was requested but the budget cut it short.
    pub partial: bool,
}

impl GapResult {
    pub fn gap(&self) -> i64 {
        self.c0 as i64 - self.uc1 as i64
    }
}

/// Largest `c0 - uc1` gap over Boolean functions on `n` variables.
///
/// For `n <= 4` the functions are enumerated in order of their truth-table
/// code (up to `budget` of them); beyond that `budget` random functions are
/// drawn from `seed`. Ties go to the smallest truth-table code.
pub fn gap_search(n: usize, budget: u64, seed: u64, parallel: bool) -> Result<GapResult> {
    if n > MAX_MEASURE_VARS {
        return Err(Error::param(format!("gap search supports n <= {MAX_MEASURE_VARS}")));
    }
    let exhaustive_mode = n <= 4;
    let candidates: Vec<TruthTable> = if exhaustive_mode {
        let total = 1u64 << (1u64 << n);
        (0..total.min(budget)).map(|c| TruthTable::from_code(n, c)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..budget)
            .map(|_| {
                let vals: Vec<bool> = (0..1usize << n).map(|_| rng.gen()).collect();
                TruthTable::from_values(n, &vals).expect("sized")
            })
            .collect()
    };
    if candidates.is_empty() {
        return Err(Error::param("gap search budget must be at least 1"));
    }
    let score = |f: &TruthTable| -> Result<(i64, usize, usize)> {
        let u = uc1(f)?;
        let z = c0(f)?;
        Ok((z as i64 - u as i64, u, z))
    };
    let scored: Vec<(i64, usize, usize)> = if parallel {
        candidates.par_iter().map(score).collect::<Result<_>>()?
    } else {
        candidates.iter().map(score).collect::<Result<_>>()?
    };
    let examined = candidates.len() as u64;
    let best = (0..candidates.len())
        .max_by(|&a, &b| {
            scored[a]
                .0
                .cmp(&scored[b].0)
                .then_with(|| candidates[b].bit_string().cmp(&candidates[a].bit_string()))
        })
        .expect("nonempty");
    let total_exhaustive = exhaustive_mode && examined == 1u64 << (1u64 << n);
    Ok(GapResult {
        f: candidates[best].clone(),
        uc1: scored[best].1,
        c0: scored[best].2,
        examined,
        exhaustive: total_exhaustive,
        partial: exhaustive_mode && !total_exhaustive,
    })
}
