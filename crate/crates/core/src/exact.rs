//! Exact points, the Hamming embedding and exact squared distances.
//!
//! Every point handled by the engine lies in `(1/n)ℤ^{mn}`, so a point is
//! stored as integer numerators over the shared denominator `n`. Squared
//! distances are then integers over `n²`. Numerators are bounded at
//! construction so that every squared distance fits an `i64` without
//! wrapping.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible absolute numerator.
pub const MAX_NUMERATOR: i32 = 1 << 20;
/// Largest admissible coordinate count `m·n`.
pub const MAX_COORDS: usize = 1 << 20;
/// Largest `n^m` that [`embed_hamming`] will materialise.
pub const MAX_HAMMING_POINTS: u64 = 50_000_000;

/// A point of `ℝ^{mn}` whose coordinates are `nums[i] / n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScaledVector {
    n: u32,
    m: u32,
    nums: Vec<i32>,
}

impl ScaledVector {
    /// Builds a point, checking the length, numerator bounds and that every
    /// block of true coordinates sums to one.
    pub fn new(n: u32, m: u32, nums: Vec<i32>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Domain(format!("n = {n}, m = {m} must be positive")));
        }
        let len = (n as usize)
            .checked_mul(m as usize)
            .filter(|&l| l <= MAX_COORDS)
            .ok_or(Error::Overflow("coordinate count"))?;
        if nums.len() != len {
            return Err(Error::Dimension {
                left: format!("{} coordinates", nums.len()),
                right: format!("m·n = {len}"),
            });
        }
        if nums.iter().any(|v| v.unsigned_abs() > MAX_NUMERATOR as u32) {
            return Err(Error::Overflow("coordinate numerator"));
        }
        for (j, block) in nums.chunks(n as usize).enumerate() {
            let s: i64 = block.iter().map(|&v| i64::from(v)).sum();
            if s != i64::from(n) {
                return Err(Error::Domain(format!(
                    "block {} sums to {s}/{n}, expected 1",
                    j + 1
                )));
            }
        }
        Ok(Self { n, m, nums })
    }

    pub(crate) fn new_unchecked(n: u32, m: u32, nums: Vec<i32>) -> Self {
        debug_assert!(Self::new(n, m, nums.clone()).is_ok());
        Self { n, m, nums }
    }

    /// The embedded Hamming word `word` (letters `0..n`).
    pub fn from_word(n: u32, word: &[u32]) -> Result<Self> {
        let m = word.len() as u32;
        if n < 2 || m == 0 {
            return Err(Error::Domain(format!("n = {n} < 2 or empty word")));
        }
        let mut nums = vec![0i32; n as usize * word.len()];
        for (j, &letter) in word.iter().enumerate() {
            if letter >= n {
                return Err(Error::Domain(format!("letter {letter} outside alphabet of size {n}")));
            }
            nums[j * n as usize + letter as usize] = n as i32;
        }
        Ok(Self { n, m, nums })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn nums(&self) -> &[i32] {
        &self.nums
    }

    pub fn block(&self, j: usize) -> &[i32] {
        let n = self.n as usize;
        &self.nums[j * n..(j + 1) * n]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[i32]> {
        self.nums.chunks(self.n as usize)
    }

    /// The Hamming word if this point lies in `H̃(n,m)`.
    pub fn word(&self) -> Option<Vec<u32>> {
        let n = self.n as i32;
        self.blocks()
            .map(|b| {
                let mut pos = None;
                for (i, &v) in b.iter().enumerate() {
                    match v {
                        0 => {}
                        v if v == n && pos.is_none() => pos = Some(i as u32),
                        _ => return None,
                    }
                }
                pos
            })
            .collect()
    }

    fn same_frame(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::Dimension {
                left: format!("(n, m) = ({}, {})", self.n, self.m),
                right: format!("(n, m) = ({}, {})", other.n, other.m),
            });
        }
        Ok(())
    }

    /// Numerator of the squared distance over `n²`.
    pub fn sq_dist(&self, other: &Self) -> Result<SquaredDistance> {
        self.same_frame(other)?;
        Ok(SquaredDistance::new(
            sq_num(&self.nums, &other.nums),
            u64::from(self.n) * u64::from(self.n),
        ))
    }

    /// Squared norm numerator (over `n²`).
    pub fn norm_sq_num(&self) -> i64 {
        self.nums.iter().map(|&v| i64::from(v) * i64::from(v)).sum()
    }
}

impl fmt::Debug for ScaledVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, b) in self.blocks().enumerate() {
            if j > 0 {
                write!(f, "|")?;
            }
            let parts: Vec<String> = b.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))?;
        }
        write!(f, ")/{}", self.n)
    }
}

/// `Σ (a_i - b_i)²` over numerators. Bounds enforced by [`ScaledVector::new`]
/// keep this inside `i64`.
#[inline]
pub(crate) fn sq_num(a: &[i32], b: &[i32]) -> i64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            d * d
        })
        .sum()
}

/// `d²` as the exact fraction `num / den`, with `den = n²`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SquaredDistance {
    pub num: u64,
    pub den: u64,
}

impl SquaredDistance {
    pub fn new(num: i64, den: u64) -> Self {
        debug_assert!(num >= 0 && den > 0);
        Self { num: num as u64, den }
    }

    /// The value as an integer, when `den` divides `num`.
    pub fn as_integer(&self) -> Option<u64> {
        self.num.is_multiple_of(self.den).then(|| self.num / self.den)
    }

    /// True when the value is one of `2, 4, .., 2m`.
    pub fn is_admissible(&self, m: u32) -> bool {
        matches!(self.as_integer(), Some(v) if v >= 2 && v % 2 == 0 && v <= 2 * u64::from(m))
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    fn reduced(&self) -> (u64, u64) {
        let g = self.num.gcd(&self.den);
        (self.num / g, self.den / g)
    }
}

impl PartialEq for SquaredDistance {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SquaredDistance {}

impl Hash for SquaredDistance {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.reduced().hash(state);
    }
}

impl PartialOrd for SquaredDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SquaredDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den))
            .cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl fmt::Display for SquaredDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.reduced();
        if q == 1 {
            write!(f, "{p}")
        } else {
            write!(f, "{p}/{q}")
        }
    }
}

/// Squared distance between two points of the same frame.
pub fn sq_dist(x: &ScaledVector, y: &ScaledVector) -> Result<SquaredDistance> {
    x.sq_dist(y)
}

/// Calls `f` with every word of `F_n^m` in lexicographic order.
pub fn for_each_word(n: u32, m: u32, mut f: impl FnMut(&[u32])) {
    let mut word = vec![0u32; m as usize];
    loop {
        f(&word);
        let mut i = m as usize;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            word[i] += 1;
            if word[i] < n {
                break;
            }
            word[i] = 0;
        }
    }
}

/// `H̃(n, m)`: the images of all words, in lexicographic word order.
pub fn embed_hamming(n: u32, m: u32) -> Result<Vec<ScaledVector>> {
    if n < 2 || m < 1 {
        return Err(Error::Domain(format!("embed_hamming needs n ≥ 2 and m ≥ 1, got ({n}, {m})")));
    }
    let count = u64::from(n)
        .checked_pow(m)
        .filter(|&c| c <= MAX_HAMMING_POINTS)
        .ok_or(Error::SizeCap {
            count: u128::from(n).pow(m.min(64)),
            cap: u128::from(MAX_HAMMING_POINTS),
        })?;
    let mut out = Vec::with_capacity(count as usize);
    for_each_word(n, m, |w| out.push(ScaledVector::from_word(n, w).expect("valid word")));
    Ok(out)
}

/// Number of points of `H̃(n,m)`, if it fits in `u64`.
pub fn hamming_size(n: u32, m: u32) -> Option<u64> {
    u64::from(n).checked_pow(m)
}

/// Histogram of squared distances over unordered pairs.
pub fn distance_multiset(points: &[ScaledVector]) -> Result<BTreeMap<SquaredDistance, u64>> {
    if points.len() < 2 {
        return Err(Error::EmptyInput("distance multiset needs at least two points".into()));
    }
    let first = &points[0];
    for p in points {
        first.same_frame(p)?;
    }
    let den = u64::from(first.n) * u64::from(first.n);
    let counts = (0..points.len())
        .into_par_iter()
        .fold(BTreeMap::<i64, u64>::new, |mut acc, i| {
            for j in i + 1..points.len() {
                *acc.entry(sq_num(&points[i].nums, &points[j].nums)).or_default() += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    Ok(counts
        .into_iter()
        .map(|(k, v)| (SquaredDistance::new(k, den), v))
        .collect())
}

/// Exact number `a + b·√r` with rational `a`, `b` and squarefree integer `r`.
///
/// Canonical form: either `b = 0` and `r = 0`, or `b ≠ 0` and `r ≥ 2` is a
/// squarefree integer. Equality is therefore structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticValue {
    a: BigRational,
    b: BigRational,
    r: BigInt,
}

impl QuadraticValue {
    pub fn new(a: BigRational, b: BigRational, r: BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Domain(format!("negative radicand {r}")));
        }
        if b.is_zero() || r.is_zero() {
            return Ok(Self::rational(a));
        }
        // √(p/q) = √(p·q) / q, then pull the square part out of p·q.
        let pq = r.numer() * r.denom();
        let (square_root, free) = split_square(&pq)?;
        let coeff = b * BigRational::new(square_root, r.denom().clone());
        if free.is_one() {
            return Ok(Self::rational(a + coeff));
        }
        Ok(Self { a, b: coeff, r: free })
    }

    pub fn rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero(), r: BigInt::zero() }
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn equals_rational(&self, q: &BigRational) -> bool {
        self.as_rational() == Some(q)
    }

    /// Integer value, if the number is an integer.
    pub fn as_integer(&self) -> Option<i64> {
        self.as_rational().filter(|q| q.is_integer()).and_then(|q| q.to_integer().to_i64())
    }
}

impl fmt::Display for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}·√{}", self.a, self.b, self.r)
        }
    }
}

/// Writes `v = s² · f` with `f` squarefree; `v` must be positive and below 2^64.
fn split_square(v: &BigInt) -> Result<(BigInt, BigInt)> {
    let mut rest = v.to_u64().ok_or(Error::Overflow("radicand factorisation"))?;
    let mut square: u64 = 1;
    let mut free: u64 = 1;
    let mut p: u64 = 2;
    while p.saturating_mul(p) <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    free *= rest;
    Ok((BigInt::from(square), BigInt::from(free)))
}

/// A point of the codimension-one extension `ℝ^{2n} × ℝ`: rational blocks
/// plus a last coordinate `sign · √beta_sq`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RootPoint {
    pub rational: ScaledVector,
    pub beta_sq: Ratio<i64>,
    pub sign: i8,
}

impl RootPoint {
    pub fn new(rational: ScaledVector, beta_sq: Ratio<i64>, sign: i8) -> Result<Self> {
        if beta_sq < Ratio::zero() {
            return Err(Error::Domain(format!("β² = {beta_sq} is negative")));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Domain(format!("sign must be ±1, got {sign}")));
        }
        // a zero last coordinate has one representation
        let sign = if beta_sq.is_zero() { 1 } else { sign };
        Ok(Self { rational, beta_sq, sign })
    }

    /// A point with last coordinate zero.
    pub fn flat(rational: ScaledVector) -> Self {
        Self { rational, beta_sq: Ratio::zero(), sign: 1 }
    }
}

fn big(q: Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// Exact squared distance between two extended points:
/// `|x - y|² + β_x² + β_y² - 2·s_x·s_y·√(β_x² β_y²)`.
pub fn quad_sq_dist(x: &RootPoint, y: &RootPoint) -> Result<QuadraticValue> {
    let d = x.rational.sq_dist(&y.rational)?;
    let rational = BigRational::new(BigInt::from(d.num), BigInt::from(d.den));
    let a = rational + big(x.beta_sq) + big(y.beta_sq);
    let b = BigRational::from_integer(BigInt::from(-2 * i64::from(x.sign) * i64::from(y.sign)));
    let r = big(x.beta_sq) * big(y.beta_sq);
    QuadraticValue::new(a, b, r)
}

/// On-disk point-set format shared by the CLI and the golden files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetFile {
    pub n: u32,
    pub m: u32,
    #[serde(default)]
    pub points: Vec<Vec<i32>>,
    #[serde(default)]
    pub root_points: Vec<RootPointRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootPointRecord {
    pub nums: Vec<i32>,
    pub beta_num: i64,
    pub beta_den: i64,
    pub sign: i8,
}

impl PointSetFile {
    pub fn from_points(n: u32, m: u32, points: &[ScaledVector]) -> Self {
        Self {
            n,
            m,
            points: points.iter().map(|p| p.nums.clone()).collect(),
            root_points: Vec::new(),
        }
    }

    pub fn scaled_points(&self) -> Result<Vec<ScaledVector>> {
        self.points
            .iter()
            .map(|p| ScaledVector::new(self.n, self.m, p.clone()))
            .collect()
    }

    pub fn root_points(&self) -> Result<Vec<RootPoint>> {
        self.root_points
            .iter()
            .map(|r| {
                if r.beta_den <= 0 {
                    return Err(Error::Parse(format!("beta_den must be positive, got {}", r.beta_den)));
                }
                let rational = ScaledVector::new(self.n, self.m, r.nums.clone())?;
                RootPoint::new(rational, Ratio::new(r.beta_num, r.beta_den), r.sign)
            })
            .collect()
    }
}

impl From<&RootPoint> for RootPointRecord {
    fn from(p: &RootPoint) -> Self {
        Self {
            nums: p.rational.nums.clone(),
            beta_num: *p.beta_sq.numer(),
            beta_den: *p.beta_sq.denom(),
            sign: p.sign,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn hamming_sizes() {
        assert_eq!(embed_hamming(2, 2).unwrap().len(), 4);
        assert_eq!(embed_hamming(5, 2).unwrap().len(), 25);
        assert_eq!(embed_hamming(19, 4).unwrap().len(), 130_321);
        assert!(matches!(embed_hamming(1, 3), Err(Error::Domain(_))));
        assert!(matches!(embed_hamming(3, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn embedded_h22_is_exact() {
        let pts = embed_hamming(2, 2).unwrap();
        let nums: Vec<&[i32]> = pts.iter().map(|p| p.nums()).collect();
        assert_eq!(nums, vec![&[2, 0, 2, 0][..], &[2, 0, 0, 2], &[0, 2, 2, 0], &[0, 2, 0, 2]]);
    }

    #[test]
    fn distances_in_h32() {
        let a = ScaledVector::from_word(3, &[0, 0]).unwrap();
        let b = ScaledVector::from_word(3, &[0, 1]).unwrap();
        let c = ScaledVector::from_word(3, &[1, 0]).unwrap();
        assert_eq!(a.sq_dist(&b).unwrap().as_integer(), Some(2));
        assert_eq!(b.sq_dist(&c).unwrap().as_integer(), Some(4));
        assert!(a.sq_dist(&a).unwrap().is_zero());
    }

    #[test]
    fn distance_between_section3_vectors() {
        let x = ScaledVector::new(5, 2, vec![2, 2, 2, 2, -3, 1, 1, 1, 1, 1]).unwrap();
        let y = ScaledVector::new(5, 2, vec![1, 1, 1, 1, 1, 3, 3, 3, -2, -2]).unwrap();
        let d = sq_dist(&x, &y).unwrap();
        assert_eq!(d.as_integer(), Some(2));
        assert!(d.is_admissible(2));
    }

    #[test]
    fn frame_mismatch_is_an_error() {
        let a = ScaledVector::from_word(3, &[0, 0]).unwrap();
        let b = ScaledVector::from_word(3, &[0, 0, 0]).unwrap();
        assert!(matches!(a.sq_dist(&b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn block_sum_is_enforced() {
        assert!(ScaledVector::new(3, 1, vec![1, 1, 0]).is_err());
        assert!(ScaledVector::new(3, 1, vec![4, 1, -2]).is_ok());
        assert!(ScaledVector::new(3, 1, vec![1, 1]).is_err());
    }

    #[test]
    fn multisets() {
        let h = embed_hamming(2, 2).unwrap();
        let ms = distance_multiset(&h).unwrap();
        let v: Vec<(String, u64)> = ms.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        assert_eq!(v, vec![("2".to_string(), 4), ("4".to_string(), 2)]);

        let h = embed_hamming(5, 2).unwrap();
        let keys: Vec<Option<u64>> = distance_multiset(&h).unwrap().keys().map(|k| k.as_integer()).collect();
        assert_eq!(keys, vec![Some(2), Some(4)]);

        assert!(matches!(distance_multiset(&h[..1]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn single_pair_at_six() {
        let a = ScaledVector::from_word(2, &[0, 0, 0]).unwrap();
        let b = ScaledVector::from_word(2, &[1, 1, 1]).unwrap();
        let ms = distance_multiset(&[a, b]).unwrap();
        assert_eq!(ms.len(), 1);
        let (k, v) = ms.into_iter().next().unwrap();
        assert_eq!((k.as_integer(), v), (Some(6), 1));
    }

    #[test]
    fn quadratic_canonical_form() {
        // 2·√(1/2) folds to √2
        let v = QuadraticValue::new(q(0, 1), q(2, 1), q(1, 2)).unwrap();
        assert_eq!(v.b(), &q(1, 1));
        assert_eq!(v.r(), &BigInt::from(2));
        // √(9/16) is rational
        let v = QuadraticValue::new(q(5, 2), q(2, 1), q(9, 16)).unwrap();
        assert!(v.equals_rational(&q(4, 1)));
        // √12 = 2√3
        let v = QuadraticValue::new(q(0, 1), q(1, 1), q(12, 1)).unwrap();
        assert_eq!((v.b().clone(), v.r().clone()), (q(2, 1), BigInt::from(3)));
        assert!(QuadraticValue::new(q(0, 1), q(1, 1), q(-1, 1)).is_err());
    }

    fn root(n: u32, nums: Vec<i32>, beta: (i64, i64), sign: i8) -> RootPoint {
        RootPoint::new(ScaledVector::new(n, 2, nums).unwrap(), Ratio::new(beta.0, beta.1), sign).unwrap()
    }

    #[test]
    fn quad_distances() {
        let x = root(2, vec![1, 1, 1, 1], (1, 2), 1);
        assert!(quad_sq_dist(&x, &x).unwrap().equals_rational(&q(0, 1)));

        // n = 8: last coordinates +1/2 and -3/2 over identical rational blocks
        let ones = vec![1; 16];
        let a = root(8, ones.clone(), (1, 4), 1);
        let b = root(8, ones, (9, 4), -1);
        assert_eq!(quad_sq_dist(&a, &b).unwrap().as_integer(), Some(4));

        // n = 4: antipodal pair (x, √(1/2)) and (x, -√(1/2))
        let nums = vec![3, 3, -1, -1, 1, 1, 1, 1];
        let a = root(4, nums.clone(), (1, 2), 1);
        let b = root(4, nums, (1, 2), -1);
        assert_eq!(quad_sq_dist(&a, &b).unwrap().as_integer(), Some(2));
    }

    #[test]
    fn irrational_part_survives_when_radicands_differ() {
        let ones = vec![1; 6];
        let a = root(3, ones.clone(), (2, 3), 1);
        let b = root(3, ones, (4, 3), 1);
        let d = quad_sq_dist(&a, &b).unwrap();
        assert!(d.as_rational().is_none());
        assert_eq!(d.r(), &BigInt::from(2));
    }

    #[test]
    fn word_round_trip() {
        let p = ScaledVector::from_word(4, &[3, 0, 2]).unwrap();
        assert_eq!(p.word(), Some(vec![3, 0, 2]));
        let x = ScaledVector::new(5, 2, vec![2, 2, 2, 2, -3, 1, 1, 1, 1, 1]).unwrap();
        assert_eq!(x.word(), None);
    }
}
