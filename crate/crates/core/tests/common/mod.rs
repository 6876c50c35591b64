//! Brute-force reference implementations, written independently of the
//! library's solvers.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use regrank::BoolMatrix;

/// All-ones rectangles of `m` as cell bitmasks (cell `i*cols + j`).
fn ones_rectangles(m: &BoolMatrix) -> Vec<u64> {
    let (r, c) = (m.rows(), m.cols());
    assert!(r * c <= 64);
    let mut out = vec![];
    for rs in 1u32..1 << r {
        for cs in 1u32..1 << c {
            let mut mask = 0u64;
            let mut ok = true;
            for i in (0..r).filter(|i| rs >> i & 1 == 1) {
                for j in (0..c).filter(|j| cs >> j & 1 == 1) {
                    ok &= m.get(i, j);
                    mask |= 1 << (i * c + j);
                }
            }
            if ok {
                out.push(mask);
            }
        }
    }
    out
}

fn ones_mask(m: &BoolMatrix) -> u64 {
    m.ones_positions()
        .into_iter()
        .fold(0, |acc, (i, j)| acc | 1 << (i * m.cols() + j))
}

/// Minimum number of rectangles partitioning (`disjoint`) or covering the
/// ones, by dynamic programming over sets of uncovered cells.
fn min_rectangles(m: &BoolMatrix, disjoint: bool) -> usize {
    let ones = ones_mask(m);
    let rects = ones_rectangles(m);
    let mut memo = std::collections::HashMap::new();
    fn go(s: u64, rects: &[u64], disjoint: bool, memo: &mut std::collections::HashMap<u64, usize>) -> usize {
        if s == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&s) {
            return v;
        }
        let low = s & s.wrapping_neg();
        let mut best = usize::MAX;
        for &r in rects {
            if r & low == 0 || (disjoint && r & !s != 0) {
                continue;
            }
            best = best.min(1 + go(s & !r, rects, disjoint, memo));
        }
        memo.insert(s, best);
        best
    }
    go(ones, &rects, disjoint, &mut memo)
}

pub fn brute_binary_rank(m: &BoolMatrix) -> usize {
    min_rectangles(m, true)
}

pub fn brute_boolean_rank(m: &BoolMatrix) -> usize {
    min_rectangles(m, false)
}

/// Rank over the rationals by plain Gaussian elimination.
pub fn rational_rank(m: &BoolMatrix) -> usize {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| BigRational::from_integer(BigInt::from(m.get(i, j) as u8)))
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for i in 0..a.len() {
            if i != rank && !a[i][col].is_zero() {
                let f = a[i][col].clone() / pivot.clone();
                for j in col..m.cols() {
                    let v = a[rank][j].clone() * f.clone();
                    a[i][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Subcubes of `{0,1}^n` as ternary strings: `(width, points)`.
fn subcubes(n: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = vec![];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        // digit per variable (variable 1 first): 0, 1 or 2 = free
        let mut digits = vec![0; n];
        let mut c = code;
        for d in digits.iter_mut().rev() {
            *d = c % 3;
            c /= 3;
        }
        let width = digits.iter().filter(|&&d| d < 2).count();
        let points = (0..1usize << n)
            .filter(|&z| {
                digits.iter().enumerate().all(|(v, &d)| {
                    let bit = z >> (n - 1 - v) & 1;
                    d == 2 || d == bit
                })
            })
            .collect();
        out.push((width, points));
    }
    out
}

/// `(C1, C0, UC1)` of the function with truth table `values`.
pub fn brute_measures(n: usize, values: &[bool]) -> (usize, usize, usize) {
    let cubes = subcubes(n);
    let c1_of = |vals: &[bool]| -> usize {
        (0..1usize << n)
            .filter(|&z| vals[z])
            .map(|z| {
                cubes
                    .iter()
                    .filter(|(_, pts)| pts.contains(&z) && pts.iter().all(|&p| vals[p]))
                    .map(|(w, _)| *w)
                    .min()
                    .unwrap()
            })
            .max()
            .unwrap_or(0)
    };
    let neg: Vec<bool> = values.iter().map(|v| !v).collect();
    let ones: Vec<usize> = (0..1usize << n).filter(|&z| values[z]).collect();
    let uc1 = (0..=n)
        .find(|&k| {
            let usable: Vec<u64> = cubes
                .iter()
                .filter(|(w, pts)| *w <= k && pts.iter().all(|&p| values[p]))
                .map(|(_, pts)| pts.iter().fold(0u64, |a, &p| a | 1 << p))
                .collect();
            let target = ones.iter().fold(0u64, |a, &p| a | 1 << p);
            partitionable(target, &usable)
        })
        .unwrap_or(0);
    (c1_of(values), c1_of(&neg), uc1)
}

fn partitionable(s: u64, cubes: &[u64]) -> bool {
    if s == 0 {
        return true;
    }
    let low = s & s.wrapping_neg();
    cubes
        .iter()
        .any(|&c| c & low != 0 && c & !s == 0 && partitionable(s & !c, cubes))
}

/// Chromatic number of a simple graph on at most 16 vertices, by dynamic
/// programming over vertex subsets.
pub fn brute_chromatic(n: usize, edges: &[(usize, usize)]) -> usize {
    let full = (1usize << n) - 1;
    let independent: Vec<bool> = (0..=full)
        .map(|s| edges.iter().all(|&(u, v)| !(s >> u & 1 == 1 && s >> v & 1 == 1)))
        .collect();
    let mut dp = vec![usize::MAX; full + 1];
    dp[0] = 0;
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let mut sub = s;
        while sub > 0 {
            if sub & low != 0 && independent[sub] && dp[s & !sub] != usize::MAX {
                dp[s] = dp[s].min(dp[s & !sub] + 1);
            }
            sub = (sub - 1) & s;
        }
    }
    dp[full]
}

/// Discrepancy of a gadget table over all row and column subsets.
pub fn brute_discrepancy(table: &BoolMatrix) -> (i64, i64) {
    let side = table.rows();
    let mut best = 0i64;
    for rs in 0u32..1 << side {
        for cs in 0u32..1 << side {
            let mut s = 0i64;
            for i in (0..side).filter(|i| rs >> i & 1 == 1) {
                for j in (0..side).filter(|j| cs >> j & 1 == 1) {
                    s += if table.get(i, j) { -1 } else { 1 };
                }
            }
            best = best.max(s.abs());
        }
    }
    (best, (side * side) as i64)
}
