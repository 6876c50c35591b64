//! Min-entropy and block density of exact distributions over pairs of
//! block strings.
//!
//! A point `(x, y)` has `x, y` in `{0,1}^(ell*n)`, encoded like the gadget
//! module: block 1 occupies the most significant `ell` bits. Block sets are
//! 1-based, matching variable indices elsewhere.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gadget::Gadget;
use crate::matrix::Rectangle;
use crate::scalar::{prob_at_most_pow2, ExactInt};
use crate::Rational;

/// Bound on `ell * n`, so the support has at most `2^20` points.
pub const MAX_BITS: usize = 10;

pub type Point = (u64, u64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDistribution<T: ExactInt> {
    pub ell: usize,
    pub n: usize,
    pub weights: BTreeMap<Point, Ratio<T>>,
}

/// Maximum point probability together with `-log2` of it.
#[derive(Clone, Debug, PartialEq)]
pub struct MinEntropy<T: ExactInt> {
    pub max_prob: Ratio<T>,
    /// Lower and upper bounds on `-log2(max_prob)`, rounded outward.
    pub bits: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Density {
    pub dense: bool,
    /// A violating block set when not dense.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction<T: ExactInt> {
    /// Fixed blocks (1-based, ascending).
    pub blocks: Vec<usize>,
    /// Assignment to `(x_I, y_I)`, blocks concatenated in ascending order.
    pub alpha: Point,
    pub conditioned: BlockDistribution<T>,
}

fn check_shape(ell: usize, n: usize) -> Result<()> {
    if ell == 0 {
        return Err(Error::param("block length must be positive"));
    }
    if ell * n > MAX_BITS {
        return Err(Error::param(format!(
            "ell * n = {} exceeds the limit of {MAX_BITS}",
            ell * n
        )));
    }
    Ok(())
}

fn from_usize<T: ExactInt>(v: usize) -> T {
    T::from_usize(v).expect("small integer fits")
}

/// Sub-word of `v` made of the listed blocks (0-based, in order).
fn project_bits(v: u64, ell: usize, n: usize, blocks: &[usize]) -> u64 {
    let mask = (1u64 << ell) - 1;
    blocks
        .iter()
        .fold(0, |acc, &b| acc << ell | (v >> (ell * (n - 1 - b)) & mask))
}

impl<T: ExactInt> BlockDistribution<T> {
    /// Validates that weights are nonnegative, sum to one and lie in range.
    /// Zero weights are dropped.
    pub fn new(ell: usize, n: usize, weights: BTreeMap<Point, Ratio<T>>) -> Result<Self> {
        check_shape(ell, n)?;
        let limit = 1u64 << (ell * n);
        let mut total = Ratio::<T>::zero();
        for (&(x, y), w) in &weights {
            if x >= limit || y >= limit {
                return Err(Error::OutOfBounds(format!("point ({x},{y}) outside 2^{}", ell * n)));
            }
            if w.is_negative() {
                return Err(Error::param("negative probability"));
            }
            total = total + w.clone();
        }
        if !total.is_one() {
            return Err(Error::param(format!("weights sum to {total:?}, not 1")));
        }
        let weights = weights.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        Ok(BlockDistribution { ell, n, weights })
    }

    /// Uniform distribution on the given points (duplicates ignored).
    pub fn uniform_on(ell: usize, n: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        check_shape(ell, n)?;
        let pts: std::collections::BTreeSet<Point> = points.into_iter().collect();
        if pts.is_empty() {
            return Err(Error::param("empty support"));
        }
        let w = Ratio::new(T::one(), from_usize(pts.len()));
        Self::new(ell, n, pts.into_iter().map(|p| (p, w.clone())).collect())
    }

    /// Independent uniform `X` and `Y`.
    pub fn uniform(ell: usize, n: usize) -> Result<Self> {
        check_shape(ell, n)?;
        let side = 1u64 << (ell * n);
        Self::uniform_on(ell, n, (0..side).flat_map(|x| (0..side).map(move |y| (x, y))))
    }

    pub fn point_mass(ell: usize, n: usize, p: Point) -> Result<Self> {
        Self::uniform_on(ell, n, [p])
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn probability(&self, p: Point) -> Ratio<T> {
        self.weights.get(&p).cloned().unwrap_or_else(Ratio::zero)
    }

    /// Marginal on `(x_I, y_I)` for 1-based blocks `I`.
    pub fn marginal(&self, blocks: &[usize]) -> Result<BTreeMap<Point, Ratio<T>>> {
        let zero_based = self.zero_based(blocks)?;
        let mut out: BTreeMap<Point, Ratio<T>> = BTreeMap::new();
        for (&(x, y), w) in &self.weights {
            let key = (
                project_bits(x, self.ell, self.n, &zero_based),
                project_bits(y, self.ell, self.n, &zero_based),
            );
            let e = out.entry(key).or_insert_with(Ratio::zero);
            *e = e.clone() + w.clone();
        }
        Ok(out)
    }

    /// Distribution of `(X_I, Y_I)` as a distribution on `|I|` blocks.
    pub fn project(&self, blocks: &[usize]) -> Result<Self> {
        let weights = self.marginal(blocks)?;
        Ok(BlockDistribution {
            ell: self.ell,
            n: blocks.len(),
            weights,
        })
    }

    fn zero_based(&self, blocks: &[usize]) -> Result<Vec<usize>> {
        blocks
            .iter()
            .map(|&b| {
                if b == 0 || b > self.n {
                    Err(Error::OutOfBounds(format!("block {b} outside 1..={}", self.n)))
                } else {
                    Ok(b - 1)
                }
            })
            .collect()
    }

    /// Conditions on an event given as a predicate over points.
    pub fn condition(&self, event: impl Fn(Point) -> bool) -> Result<Self> {
        let kept: BTreeMap<Point, Ratio<T>> = self
            .weights
            .iter()
            .filter(|(&p, _)| event(p))
            .map(|(&p, w)| (p, w.clone()))
            .collect();
        let mass = kept.values().fold(Ratio::<T>::zero(), |a, w| a + w.clone());
        if mass.is_zero() {
            return Err(Error::param("conditioning on a probability-zero event"));
        }
        Ok(BlockDistribution {
            ell: self.ell,
            n: self.n,
            weights: kept.into_iter().map(|(p, w)| (p, w / mass.clone())).collect(),
        })
    }

    /// Conditions on `(X_I, Y_I) = alpha`.
    pub fn condition_on_blocks(&self, blocks: &[usize], alpha: Point) -> Result<Self> {
        let zb = self.zero_based(blocks)?;
        let (ell, n) = (self.ell, self.n);
        self.condition(|(x, y)| {
            (project_bits(x, ell, n, &zb), project_bits(y, ell, n, &zb)) == alpha
        })
    }

    /// Independent copies: blocks of `self` come first.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.ell != other.ell {
            return Err(Error::param("block lengths differ"));
        }
        check_shape(self.ell, self.n + other.n)?;
        let shift = self.ell * other.n;
        let mut weights = BTreeMap::new();
        for (&(x1, y1), w1) in &self.weights {
            for (&(x2, y2), w2) in &other.weights {
                weights.insert((x1 << shift | x2, y1 << shift | y2), w1.clone() * w2.clone());
            }
        }
        Ok(BlockDistribution {
            ell: self.ell,
            n: self.n + other.n,
            weights,
        })
    }
}

impl<T: ExactInt + Into<BigInt>> BlockDistribution<T> {
    pub fn min_entropy(&self) -> Result<MinEntropy<T>> {
        min_entropy_of(self.weights.values())
    }

    /// Min-entropy of `(X_I, Y_I)`.
    pub fn block_min_entropy(&self, blocks: &[usize]) -> Result<MinEntropy<T>> {
        min_entropy_of(self.marginal(blocks)?.values())
    }
}

/// Min-entropy of any finite distribution given by its point probabilities.
pub fn min_entropy_of<'a, T: ExactInt + Into<BigInt> + 'a>(
    probs: impl IntoIterator<Item = &'a Ratio<T>>,
) -> Result<MinEntropy<T>> {
    let max_prob = probs
        .into_iter()
        .filter(|p| !p.is_zero())
        .max()
        .cloned()
        .ok_or_else(|| Error::param("empty support"))?;
    let bits = neg_log2_bounds(&max_prob);
    Ok(MinEntropy { max_prob, bits })
}

/// Bounds on `-log2(p)`: exact when `p` is a power of two, otherwise widened
/// by a few ulps on each side.
fn neg_log2_bounds<T: ExactInt + Into<BigInt>>(p: &Ratio<T>) -> (f64, f64) {
    let num: BigInt = p.numer().clone().into();
    let den: BigInt = p.denom().clone().into();
    let is_pow2 = |v: &BigInt| v.is_positive() && (v.clone() & (v.clone() - 1u8)).is_zero();
    if is_pow2(&num) && is_pow2(&den) {
        let v = den.bits() as f64 - num.bits() as f64;
        return (v, v);
    }
    let v = log2_big(&den) - log2_big(&num);
    let slack = 8.0 * f64::EPSILON * v.abs().max(1.0);
    (v - slack, v + slack)
}

fn log2_big(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 52 {
        return v.to_f64().expect("small").log2();
    }
    let shift = bits - 52;
    (v >> shift).to_f64().expect("52 bits").log2() + shift as f64
}

/// `H_inf(X_I, Y_I) >= delta * 2 * ell * |I|` for every nonempty `I`.
///
/// Subsets are scanned in increasing bitmask order (block 1 is bit 0); the
/// first violation is reported.
pub fn is_delta_dense<T: ExactInt + Into<BigInt>>(
    d: &BlockDistribution<T>,
    delta: &Rational,
) -> Result<Density> {
    if d.n > MAX_BITS {
        return Err(Error::param(format!("at most {MAX_BITS} blocks supported")));
    }
    for mask in 1u32..1 << d.n {
        let blocks = mask_blocks(mask, d.n);
        if violates(d, &blocks, delta)? {
            return Ok(Density {
                dense: false,
                witness: Some(blocks),
            });
        }
    }
    Ok(Density {
        dense: true,
        witness: None,
    })
}

fn mask_blocks(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

fn required_bits(d_ell: usize, size: usize, delta: &Rational) -> Rational {
    delta * Rational::from_integer((2 * d_ell * size) as i64)
}

fn violates<T: ExactInt + Into<BigInt>>(
    d: &BlockDistribution<T>,
    blocks: &[usize],
    delta: &Rational,
) -> Result<bool> {
    let need = required_bits(d.ell, blocks.len(), delta);
    let marginal = d.marginal(blocks)?;
    let max = marginal.values().max().cloned().unwrap_or_else(Ratio::zero);
    Ok(!prob_at_most_pow2(&max, &need))
}

/// Uniform distribution on `(g^n)^{-1}(z)`, optionally intersected with a
/// rectangle (rows are `x`, columns `y`). `z` is indexed with `z_1` most
/// significant.
pub fn fiber_distribution<T: ExactInt>(
    g: &Gadget,
    n: usize,
    z: usize,
    rect: Option<&Rectangle>,
) -> Result<BlockDistribution<T>> {
    check_shape(g.ell, n)?;
    if n > 0 && z >> n != 0 || n == 0 && z != 0 {
        return Err(Error::OutOfBounds(format!("target {z} has more than {n} bits")));
    }
    let side = 1u64 << (g.ell * n);
    let block = g.side() as u64 - 1;
    let mut pts = vec![];
    for x in 0..side {
        for y in 0..side {
            let out = (0..n).fold(0usize, |acc, i| {
                let shift = g.ell * (n - 1 - i);
                acc << 1 | g.eval((x >> shift & block) as usize, (y >> shift & block) as usize) as usize
            });
            if out == z && rect.is_none_or(|r| r.contains(x as usize, y as usize)) {
                pts.push((x, y));
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::param("fiber (intersected with the rectangle) is empty"));
    }
    BlockDistribution::uniform_on(g.ell, n, pts)
}

/// `max_a |P[g^S(X_S, Y_S) = a] - 2^{-|S|}|` over all outcomes `a`.
pub fn uniformity_gap<T: ExactInt>(
    d: &BlockDistribution<T>,
    g: &Gadget,
    blocks: &[usize],
) -> Result<Ratio<T>> {
    if g.ell != d.ell {
        return Err(Error::param("gadget block length differs from the distribution's"));
    }
    if blocks.len() > 20 {
        return Err(Error::param("at most 20 blocks in S"));
    }
    let zb = d.zero_based(blocks)?;
    let block = g.side() as u64 - 1;
    let mut outcomes: BTreeMap<u64, Ratio<T>> = BTreeMap::new();
    for (&(x, y), w) in &d.weights {
        let a = zb.iter().fold(0u64, |acc, &b| {
            let shift = d.ell * (d.n - 1 - b);
            acc << 1 | g.eval((x >> shift & block) as usize, (y >> shift & block) as usize) as u64
        });
        let e = outcomes.entry(a).or_insert_with(Ratio::zero);
        *e = e.clone() + w.clone();
    }
    let target = Ratio::new(T::one(), from_usize::<T>(1usize << blocks.len()));
    let mut gap = if outcomes.len() < 1 << blocks.len() {
        target.clone()
    } else {
        Ratio::zero()
    };
    for p in outcomes.values() {
        let dev = (p.clone() - target.clone()).abs();
        if dev > gap {
            gap = dev;
        }
    }
    Ok(gap)
}

/// Fixes a maximum-size violating block set `I` to its most likely value so
/// that the remaining blocks become `delta`-dense.
///
/// Among violating sets of maximum size the first in bitmask order is taken;
/// among assignments the most likely, smallest on ties.
pub fn find_dense_restriction<T: ExactInt + Into<BigInt>>(
    d: &BlockDistribution<T>,
    delta: &Rational,
) -> Result<Restriction<T>> {
    if d.n > MAX_BITS {
        return Err(Error::param(format!("at most {MAX_BITS} blocks supported")));
    }
    let mut chosen: Vec<usize> = vec![];
    for mask in 1u32..1 << d.n {
        if (mask.count_ones() as usize) <= chosen.len() {
            continue;
        }
        let blocks = mask_blocks(mask, d.n);
        if violates(d, &blocks, delta)? {
            chosen = blocks;
        }
    }
    let (alpha, conditioned) = if chosen.is_empty() {
        ((0, 0), d.clone())
    } else {
        let marginal = d.marginal(&chosen)?;
        let max = marginal.values().max().cloned().expect("nonempty support");
        let alpha = *marginal
            .iter()
            .find(|(_, w)| **w == max)
            .expect("max is attained")
            .0;
        (alpha, d.condition_on_blocks(&chosen, alpha)?)
    };
    let rest: Vec<usize> = (1..=d.n).filter(|b| !chosen.contains(b)).collect();
    let check = is_delta_dense(&conditioned.project(&rest)?, delta)?;
    if !check.dense {
        return Err(Error::Consistency(format!(
            "remaining blocks not dense after fixing {chosen:?}; violating set {:?}",
            check.witness
        )));
    }
    Ok(Restriction {
        blocks: chosen,
        alpha,
        conditioned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{gadget_gl, is_strongly_unbiased};
    use crate::{Distribution64, ExactDistribution};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn min_entropy_examples() {
        let u = Distribution64::uniform(1, 2).unwrap();
        assert_eq!(u.min_entropy().unwrap().bits, (4.0, 4.0));
        let p = Distribution64::point_mass(1, 2, (1, 2)).unwrap();
        assert_eq!(p.min_entropy().unwrap().bits, (0.0, 0.0));
        let g1 = gadget_gl(1).unwrap();
        let f0 = fiber_distribution::<i64>(&g1, 1, 0, None).unwrap();
        assert_eq!(f0.support_size(), 2);
        assert_eq!(f0.min_entropy().unwrap().bits, (1.0, 1.0));
        let third = Distribution64::uniform_on(1, 1, [(0, 0), (0, 1), (1, 1)]).unwrap();
        let (lo, hi) = third.min_entropy().unwrap().bits;
        assert!(lo <= 3f64.log2() && 3f64.log2() <= hi);
    }

    #[test]
    fn density_examples() {
        let u = Distribution64::uniform(1, 2).unwrap();
        assert!(is_delta_dense(&u, &r(1, 1)).unwrap().dense);
        let p = Distribution64::point_mass(1, 2, (0, 0)).unwrap();
        let res = is_delta_dense(&p, &r(1, 100)).unwrap();
        assert_eq!(res.witness, Some(vec![1]));
        let g1 = gadget_gl(1).unwrap();
        let fib = fiber_distribution::<i64>(&g1, 2, 0b00, None).unwrap();
        assert_eq!(fib.support_size(), 4);
        assert!(is_delta_dense(&fib, &r(1, 2)).unwrap().dense);
        assert!(!is_delta_dense(&fib, &r(51, 100)).unwrap().dense);
    }

    #[test]
    fn fiber_examples() {
        let g1 = gadget_gl(1).unwrap();
        let f = fiber_distribution::<i64>(&g1, 1, 1, None).unwrap();
        assert_eq!(f.weights.keys().copied().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        let f2 = fiber_distribution::<i64>(&g1, 2, 0b01, None).unwrap();
        assert_eq!(f2.support_size(), 4);
        let full = Rectangle::new((0..4).collect(), (0..4).collect()).unwrap();
        assert_eq!(fiber_distribution::<i64>(&g1, 2, 0b01, Some(&full)).unwrap(), f2);
        let tiny = Rectangle::new(vec![0], vec![0]).unwrap();
        assert!(fiber_distribution::<i64>(&g1, 2, 0b01, Some(&tiny)).is_err());
    }

    #[test]
    fn uniformity_gap_examples() {
        for ell in 1..=2 {
            let g = gadget_gl(ell).unwrap();
            assert!(is_strongly_unbiased(&g));
            let u = Distribution64::uniform(ell, 2).unwrap();
            assert!(uniformity_gap(&u, &g, &[1]).unwrap().is_zero());
            assert!(uniformity_gap(&u, &g, &[2]).unwrap().is_zero());
        }
        let g1 = gadget_gl(1).unwrap();
        let p = Distribution64::point_mass(1, 2, (0, 0)).unwrap();
        assert_eq!(uniformity_gap(&p, &g1, &[1]).unwrap(), Ratio::new(1, 2));
        let fib = fiber_distribution::<i64>(&g1, 3, 0b101, None).unwrap();
        assert_eq!(uniformity_gap(&fib, &g1, &[1, 2, 3]).unwrap(), Ratio::new(7, 8));
    }

    #[test]
    fn dense_restriction_examples() {
        let u = ExactDistribution::uniform(1, 2).unwrap();
        let res = find_dense_restriction(&u, &r(1, 2)).unwrap();
        assert!(res.blocks.is_empty());
        assert_eq!(res.conditioned, u);
        let p = Distribution64::point_mass(1, 3, (5, 2)).unwrap();
        let res = find_dense_restriction(&p, &r(1, 2)).unwrap();
        assert_eq!(res.blocks, vec![1, 2, 3]);
        assert_eq!(res.alpha, (5, 2));
        // half-weight rectangle: first row bit fixed to 0
        let g1 = gadget_gl(1).unwrap();
        let rect = Rectangle::new(vec![0, 1], (0..4).collect()).unwrap();
        let fib = fiber_distribution::<i64>(&g1, 2, 0b01, Some(&rect)).unwrap();
        let res = find_dense_restriction(&fib, &r(1, 4)).unwrap();
        assert_eq!(res.blocks, vec![1]);
        let rest = res.conditioned.project(&[2]).unwrap();
        assert!(is_delta_dense(&rest, &r(1, 4)).unwrap().dense);
        let res = find_dense_restriction(&fib, &r(1, 2)).unwrap();
        assert_eq!(res.blocks, vec![1, 2]);
    }

    #[test]
    fn product_adds_min_entropy() {
        let a = Distribution64::uniform_on(1, 1, [(0, 0), (1, 1)]).unwrap();
        let b = Distribution64::uniform(1, 1).unwrap();
        let ab = a.product(&b).unwrap();
        assert_eq!(ab.n, 2);
        assert_eq!(ab.min_entropy().unwrap().bits, (3.0, 3.0));
        assert_eq!(ab.project(&[1]).unwrap(), a);
        assert_eq!(ab.project(&[2]).unwrap(), b);
    }

    #[test]
    fn rejects_bad_input() {
        let mut w = BTreeMap::new();
        w.insert((0, 0), Ratio::new(1i64, 2));
        assert!(Distribution64::new(1, 1, w.clone()).is_err());
        w.insert((4, 0), Ratio::new(1i64, 2));
        assert!(Distribution64::new(1, 1, w).is_err());
        assert!(Distribution64::uniform(2, 6).is_err());
    }
}
