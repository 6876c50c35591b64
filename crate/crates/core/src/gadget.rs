//! Two-party gadgets, their discrepancy, Hadamard sign matrices, and
//! composition of a Boolean function with a gadget.
//!
//! Block/bit encoding: `x = (x_1, ..., x_n)` with blocks of `ell` bits maps to
//! the index `sum int(x_i) * 2^(ell*(n-i))`, where `int` reads a block with
//! its first bit most significant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfn::{Dnf, Subcube, TruthTable};
use crate::error::{Error, Result};
use crate::matrix::{BoolMatrix, Rectangle};
use crate::rank::{CoverKind, RectangleSet};
use crate::scalar::prob_at_most_pow2;
use crate::Rational;

/// Largest side of a composed matrix.
pub const COMPOSE_CAP: usize = 1 << 12;

/// Largest gadget side for [`discrepancy_exact`] and [`lindsey_check`].
pub const EXACT_SIDE_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub ell: usize,
    pub table: BoolMatrix,
}

impl Gadget {
    pub fn from_table(ell: usize, table: BoolMatrix) -> Result<Self> {
        if ell == 0 || ell > 12 {
            return Err(Error::param(format!("block length {ell} outside 1..=12")));
        }
        let side = 1 << ell;
        if table.rows() != side || table.cols() != side {
            return Err(Error::param(format!(
                "gadget with ell={ell} needs a {side}x{side} table, got {}x{}",
                table.rows(),
                table.cols()
            )));
        }
        Ok(Gadget { ell, table })
    }

    fn from_fn(ell: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        if ell == 0 || ell > 12 {
            return Err(Error::param(format!("block length {ell} outside 1..=12")));
        }
        let side = 1 << ell;
        Self::from_table(ell, BoolMatrix::from_fn(side, side, f)?)
    }

    pub fn constant(ell: usize, value: bool) -> Result<Self> {
        Self::from_fn(ell, |_, _| value)
    }

    pub fn side(&self) -> usize {
        1 << self.ell
    }

    pub fn eval(&self, x: usize, y: usize) -> bool {
        self.table.get(x, y)
    }

    /// Gadget file: `# ell=<L>` followed by the table in matrix format.
    pub fn to_text(&self) -> String {
        format!("# ell={}\n{}", self.ell, self.table.to_text())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ell = text
            .lines()
            .filter_map(|l| l.trim().strip_prefix("# ell="))
            .next()
            .ok_or_else(|| Error::parse(1, "missing '# ell=' line"))?;
        let ell: usize = ell
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, format!("invalid block length {ell:?}")))?;
        Self::from_table(ell, BoolMatrix::parse(text)?)
    }
}

/// `g_ell(x, y) = x_1 + y_1 + sum_{i>=2} x_i y_i mod 2`.
pub fn gadget_gl(ell: usize) -> Result<Gadget> {
    let top = 1usize << ell.saturating_sub(1);
    Gadget::from_fn(ell, |x, y| {
        let lead = (x & top != 0) ^ (y & top != 0);
        let rest = (x & y & (top - 1)).count_ones() % 2 == 1;
        lead ^ rest
    })
}

/// Inner product mod 2.
pub fn gadget_ip(ell: usize) -> Result<Gadget> {
    Gadget::from_fn(ell, |x, y| (x & y).count_ones() % 2 == 1)
}

/// Every row and column of the table has exactly `2^(ell-1)` ones.
pub fn is_strongly_unbiased(g: &Gadget) -> bool {
    matches!(g.table.is_regular(), Ok(Some(d)) if d == 1 << (g.ell - 1))
}

/// Matrix of `f ∘ g^n`.
pub fn compose(f: &TruthTable, g: &Gadget, n: usize) -> Result<BoolMatrix> {
    if f.n() != n {
        return Err(Error::param(format!(
            "function has {} variables but {n} blocks were requested",
            f.n()
        )));
    }
    let side = side_of(g.ell, n)?;
    let ell = g.ell;
    let block = g.side() - 1;
    BoolMatrix::from_fn(side, side, |x, y| {
        let mut z = 0;
        for i in 0..n {
            let shift = ell * (n - 1 - i);
            let bit = g.eval(x >> shift & block, y >> shift & block) as usize;
            z = z << 1 | bit;
        }
        f.eval(z)
    })
}

fn side_of(ell: usize, n: usize) -> Result<usize> {
    let bits = ell * n;
    if bits > 12 {
        return Err(Error::SizeCap {
            side: if bits < usize::BITS as usize { 1 << bits } else { usize::MAX },
            cap: COMPOSE_CAP,
        });
    }
    Ok(1 << bits)
}

/// `+1` where the gadget is 0 and `-1` where it is 1.
fn signs(g: &Gadget) -> Vec<Vec<i64>> {
    (0..g.side())
        .map(|x| {
            (0..g.side())
                .map(|y| if g.eval(x, y) { -1 } else { 1 })
                .collect()
        })
        .collect()
}

/// Exact discrepancy under the uniform distribution.
///
/// For each row subset the best column subset takes all columns of positive
/// (or all of negative) conditional sum, so only row subsets are enumerated.
pub fn discrepancy_exact(g: &Gadget) -> Result<Rational> {
    let side = g.side();
    if side > EXACT_SIDE_CAP {
        return Err(Error::SizeCap {
            side,
            cap: EXACT_SIDE_CAP,
        });
    }
    let s = signs(g);
    let mut col_sums = vec![0i64; side];
    let mut best = 0i64;
    // Gray-code walk over row subsets
    for step in 1u64..1 << side {
        let row = step.trailing_zeros() as usize;
        let gray = step ^ (step >> 1);
        let sign = if gray >> row & 1 == 1 { 1 } else { -1 };
        for (c, v) in col_sums.iter_mut().zip(&s[row]) {
            *c += sign * v;
        }
        let pos: i64 = col_sums.iter().filter(|&&c| c > 0).sum();
        let neg: i64 = col_sums.iter().filter(|&&c| c < 0).sum();
        best = best.max(pos).max(-neg);
    }
    Ok(Rational::new(best, (side * side) as i64))
}

/// `d <= 2^(-(ell+3)/2)`, decided in integers.
pub fn within_discrepancy_bound(d: &Rational, ell: usize) -> bool {
    prob_at_most_pow2(d, &Rational::new(ell as i64 + 3, 2))
}

/// Largest rectangle imbalance found by alternating best responses from
/// random row subsets. A lower bound on the discrepancy.
pub fn discrepancy_sample(g: &Gadget, trials: u64, seed: u64) -> Result<Rational> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let side = g.side();
    if side > 1 << 10 {
        return Err(Error::SizeCap { side, cap: 1 << 10 });
    }
    let s = signs(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0i64;
    let mut rows = vec![false; side];
    let mut cols = vec![false; side];
    let mut sums = vec![0i64; side];
    for _ in 0..trials {
        for r in rows.iter_mut() {
            *r = rng.gen();
        }
        let mut current = i64::MIN;
        for _round in 0..2 * side {
            // best columns for the chosen rows
            for (j, c) in sums.iter_mut().enumerate() {
                *c = (0..side).filter(|&i| rows[i]).map(|i| s[i][j]).sum();
            }
            let value = best_side(&sums, &mut cols);
            // best rows for the chosen columns
            for (i, r) in sums.iter_mut().enumerate() {
                *r = (0..side).filter(|&j| cols[j]).map(|j| s[i][j]).sum();
            }
            let value = value.max(best_side(&sums, &mut rows));
            if value <= current {
                break;
            }
            current = value;
        }
        best = best.max(current);
    }
    Ok(Rational::new(best, (side * side) as i64))
}

/// Picks the subset with the larger of the positive or negative total and
/// returns its absolute value.
fn best_side(sums: &[i64], pick: &mut [bool]) -> i64 {
    let pos: i64 = sums.iter().filter(|&&c| c > 0).sum();
    let neg: i64 = -sums.iter().filter(|&&c| c < 0).sum::<i64>();
    let take_pos = pos >= neg;
    for (p, &c) in pick.iter_mut().zip(sums) {
        *p = if take_pos { c > 0 } else { c < 0 };
    }
    pos.max(neg)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    pub side: usize,
    pub entries: Vec<Vec<i8>>,
}

impl SignMatrix {
    pub fn new(entries: Vec<Vec<i8>>) -> Result<Self> {
        let side = entries.len();
        if entries.iter().any(|r| r.len() != side) {
            return Err(Error::param("sign matrix must be square"));
        }
        if entries.iter().flatten().any(|&v| v != 1 && v != -1) {
            return Err(Error::param("sign matrix entries must be +1 or -1"));
        }
        Ok(SignMatrix { side, entries })
    }

    /// `(-1)^M`.
    pub fn from_bool(m: &BoolMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        Self::new(
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| if m.get(i, j) { -1 } else { 1 }).collect())
                .collect(),
        )
    }

    pub fn is_hadamard(&self) -> bool {
        let dot = |a: &[i8], b: &[i8]| -> i64 { a.iter().zip(b).map(|(&x, &y)| (x * y) as i64).sum() };
        let cols: Vec<Vec<i8>> = (0..self.side)
            .map(|j| self.entries.iter().map(|r| r[j]).collect())
            .collect();
        (0..self.side).all(|a| {
            (a + 1..self.side).all(|b| {
                dot(&self.entries[a], &self.entries[b]) == 0 && dot(&cols[a], &cols[b]) == 0
            })
        })
    }
}

/// `(H_ell)_{x,y} = (-1)^{x·y}`.
pub fn hadamard(ell: usize) -> Result<SignMatrix> {
    if ell > 12 {
        return Err(Error::param(format!("order {ell} too large")));
    }
    let side = 1usize << ell;
    SignMatrix::new(
        (0..side)
            .map(|x| {
                (0..side)
                    .map(|y| if (x & y).count_ones() % 2 == 0 { 1 } else { -1 })
                    .collect()
            })
            .collect(),
    )
}

/// Checks that every `r x s` submatrix of a Hadamard matrix has entry sum of
/// absolute value at most `sqrt(r * s * side)`.
///
/// For each row subset the extreme column choice of each size `s` is the `s`
/// largest (or smallest) column sums, so the check is exhaustive.
pub fn lindsey_check(h: &SignMatrix) -> Result<bool> {
    if h.side > EXACT_SIDE_CAP {
        return Err(Error::SizeCap {
            side: h.side,
            cap: EXACT_SIDE_CAP,
        });
    }
    if !h.is_hadamard() {
        return Err(Error::param("matrix is not Hadamard"));
    }
    let side = h.side;
    let mut col_sums = vec![0i64; side];
    let mut sorted = vec![0i64; side];
    for step in 1u64..1 << side {
        let row = step.trailing_zeros() as usize;
        let gray = step ^ (step >> 1);
        let sign = if gray >> row & 1 == 1 { 1 } else { -1 };
        for (c, &v) in col_sums.iter_mut().zip(&h.entries[row]) {
            *c += sign * v as i64;
        }
        let r = gray.count_ones() as i64;
        sorted.copy_from_slice(&col_sums);
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let (mut top, mut bottom) = (0i64, 0i64);
        for s in 1..=side {
            top += sorted[s - 1];
            bottom += sorted[side - s];
            let extreme = top.max(-bottom);
            if extreme * extreme > r * s as i64 * side as i64 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rectangle partition of `f ∘ g^n` built from an unambiguous DNF of `f`.
///
/// Each clause with variable set `I` contributes one rectangle
/// `{x : x_I = α} × {y : y_I = β}` for every block assignment `(α, β)` on `I`
/// under which the gadget outputs satisfy the clause.
pub fn lifted_partition(dnf: &Dnf, g: &Gadget, n: usize) -> Result<RectangleSet> {
    if !dnf.unambiguous {
        return Err(Error::param("DNF is not flagged unambiguous"));
    }
    if let Some(c) = dnf.clauses.iter().find(|c| !c.in_range(n)) {
        return Err(Error::OutOfBounds(format!(
            "clause {:?} mentions a variable outside 1..={n}",
            c.literals()
        )));
    }
    for (a, ca) in dnf.clauses.iter().enumerate() {
        for cb in &dnf.clauses[a + 1..] {
            if compatible(ca, cb) {
                return Err(Error::param(format!(
                    "clauses {:?} and {:?} are satisfied together",
                    ca.literals(),
                    cb.literals()
                )));
            }
        }
    }
    let side = side_of(g.ell, n)?;
    let gs = g.side();
    // preimages[b] = gadget input pairs with output b
    let mut preimages: [Vec<(usize, usize)>; 2] = [vec![], vec![]];
    for a in 0..gs {
        for b in 0..gs {
            preimages[g.eval(a, b) as usize].push((a, b));
        }
    }
    let mut rects = vec![];
    for clause in &dnf.clauses {
        let vars: Vec<(usize, bool)> = clause.fixed.iter().map(|(&v, &b)| (v, b)).collect();
        let mut block_mask = 0usize;
        for &(v, _) in &vars {
            block_mask |= (gs - 1) << (g.ell * (n - v));
        }
        if vars.iter().any(|&(_, b)| preimages[b as usize].is_empty()) {
            continue;
        }
        let free: Vec<usize> = (0..side).filter(|&x| x & block_mask == 0).collect();
        let mut choice = vec![0usize; vars.len()];
        'assignments: loop {
            let mut alpha = 0;
            let mut beta = 0;
            for (k, &(v, b)) in vars.iter().enumerate() {
                let (a, bb) = preimages[b as usize][choice[k]];
                let shift = g.ell * (n - v);
                alpha |= a << shift;
                beta |= bb << shift;
            }
            let rows: Vec<usize> = free.iter().map(|&x| x | alpha).collect();
            let cols: Vec<usize> = free.iter().map(|&y| y | beta).collect();
            if let Ok(r) = Rectangle::new(rows, cols) {
                rects.push(r);
            }
            for k in 0..vars.len() {
                choice[k] += 1;
                if choice[k] < preimages[vars[k].1 as usize].len() {
                    continue 'assignments;
                }
                choice[k] = 0;
            }
            break;
        }
    }
    Ok(RectangleSet::new(CoverKind::Partition, rects))
}

fn compatible(a: &Subcube, b: &Subcube) -> bool {
    a.fixed
        .iter()
        .all(|(v, x)| b.fixed.get(v).is_none_or(|y| y == x))
}

/// Row ones predicted for `compose(f, g, n)` with a strongly unbiased `g`:
/// `2^((ell-1) n) * |f^{-1}(1)|`.
pub fn predicted_row_ones(f: &TruthTable, ell: usize) -> usize {
    (1usize << ((ell - 1) * f.n())) * f.count_ones()
}

impl Gadget {
    /// Count of inputs with output 1.
    pub fn count_ones(&self) -> usize {
        self.table.count_ones()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{uc1_dnf, TruthTable};
    use crate::rank::verify_rectangles;

    fn rows_of(g: &Gadget) -> Vec<String> {
        (0..g.side())
            .map(|x| (0..g.side()).map(|y| if g.eval(x, y) { '1' } else { '0' }).collect())
            .collect()
    }

    #[test]
    fn gadget_tables() {
        assert_eq!(rows_of(&gadget_gl(1).unwrap()), ["01", "10"]);
        assert_eq!(rows_of(&gadget_gl(2).unwrap()), ["0011", "0110", "1100", "1001"]);
        assert_eq!(rows_of(&gadget_ip(1).unwrap()), ["00", "01"]);
        assert!(!gadget_ip(2).unwrap().eval(3, 3));
        assert!(gadget_gl(0).is_err());
        assert!(gadget_ip(0).is_err());
    }

    #[test]
    fn unbiasedness() {
        for ell in 1..=8 {
            assert!(is_strongly_unbiased(&gadget_gl(ell).unwrap()), "ell={ell}");
        }
        for ell in 1..=4 {
            assert!(!is_strongly_unbiased(&gadget_ip(ell).unwrap()));
        }
        assert!(!is_strongly_unbiased(&Gadget::constant(2, false).unwrap()));
    }

    #[test]
    fn gadget_file_round_trip() {
        let g = gadget_gl(2).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("# ell=2\n"));
        assert_eq!(Gadget::parse(&text).unwrap(), g);
        assert!(Gadget::parse("2 2\n01\n10\n").is_err());
        assert!(Gadget::parse("# ell=2\n2 2\n01\n10\n").is_err());
    }

    #[test]
    fn compose_examples() {
        let g1 = gadget_gl(1).unwrap();
        let m = compose(&TruthTable::xor(2), &g1, 2).unwrap();
        assert_eq!(m.is_regular().unwrap(), Some(2));
        let one = compose(&TruthTable::constant(2, true), &gadget_gl(2).unwrap(), 2).unwrap();
        assert_eq!(one.count_ones(), 256);
        let and = compose(&TruthTable::and(2), &g1, 2).unwrap();
        assert!(and.get(0b00, 0b11));
        assert!(compose(&TruthTable::and(2), &g1, 3).is_err());
        assert!(matches!(
            compose(&TruthTable::and(2), &gadget_gl(7).unwrap(), 2),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn discrepancy_values() {
        let g1 = gadget_gl(1).unwrap();
        assert_eq!(discrepancy_exact(&g1).unwrap(), Rational::new(1, 4));
        assert!(within_discrepancy_bound(&Rational::new(1, 4), 1));
        assert!(!within_discrepancy_bound(&Rational::new(26, 100), 1));
        assert_eq!(
            discrepancy_exact(&Gadget::constant(1, false).unwrap()).unwrap(),
            Rational::from_integer(1)
        );
        let d2 = discrepancy_exact(&gadget_gl(2).unwrap()).unwrap();
        assert!(within_discrepancy_bound(&d2, 2));
        assert!(discrepancy_exact(&gadget_gl(5).unwrap()).is_err());
    }

    #[test]
    fn sampled_discrepancy_is_a_lower_bound() {
        for ell in 1..=3 {
            let g = gadget_gl(ell).unwrap();
            let s = discrepancy_sample(&g, 200, 7).unwrap();
            assert!(s <= discrepancy_exact(&g).unwrap());
        }
        let one = Gadget::constant(2, true).unwrap();
        assert_eq!(discrepancy_sample(&one, 5, 1).unwrap(), Rational::from_integer(1));
        assert!(discrepancy_sample(&one, 0, 1).is_err());
    }

    #[test]
    fn hadamard_and_lindsey() {
        assert_eq!(hadamard(0).unwrap().entries, vec![vec![1]]);
        assert_eq!(hadamard(1).unwrap().entries, vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(hadamard(2).unwrap().entries[3], vec![1, -1, -1, 1]);
        for ell in 0..=3 {
            let h = hadamard(ell).unwrap();
            assert!(h.is_hadamard());
            assert!(lindsey_check(&h).unwrap());
        }
        let bad = SignMatrix::new(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert!(lindsey_check(&bad).is_err());
    }

    #[test]
    fn lifted_partition_examples() {
        let g1 = gadget_gl(1).unwrap();
        let and = TruthTable::and(2);
        let dnf = uc1_dnf(&and).unwrap();
        let p = lifted_partition(&dnf, &g1, 2).unwrap();
        assert_eq!(p.len(), 4);
        assert!(verify_rectangles(&compose(&and, &g1, 2).unwrap(), &p).unwrap());

        let always = Dnf {
            clauses: vec![Subcube::default()],
            unambiguous: true,
        };
        let p = lifted_partition(&always, &g1, 2).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.rects[0].area(), 16);

        let xor = TruthTable::xor(2);
        let dnf = uc1_dnf(&xor).unwrap();
        let p = lifted_partition(&dnf, &g1, 2).unwrap();
        assert!(p.len() <= 32);
        assert!(verify_rectangles(&compose(&xor, &g1, 2).unwrap(), &p).unwrap());

        let overlapping = Dnf {
            clauses: vec![Subcube::new([(1, true)]), Subcube::new([(2, true)])],
            unambiguous: true,
        };
        assert!(lifted_partition(&overlapping, &g1, 2).is_err());
        assert!(lifted_partition(&Dnf { unambiguous: false, ..dnf }, &g1, 2).is_err());
    }
}
