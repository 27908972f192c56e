//! Block patterns and candidate classes.
//!
//! A block pattern is the set of all permutations of a length-`n` block whose
//! numerators are `k0, k0 - n, k0 - 2n, ...` with multiplicities
//! `k_1, k_2, ...`. Because every block sums to one, `k0` is determined by the
//! multiplicities, so a pattern is stored as `(n, mults)` in normalized form
//! (first and last multiplicity non-zero).

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{distinct_permutations, multinomial};
use crate::error::{Error, Result};
use crate::exact::ScaledVector;

/// Default cap on the number of vectors [`CandidateClass::enumerate`] produces.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockPattern {
    n: u32,
    mults: Vec<u32>,
}

impl BlockPattern {
    /// Builds a pattern from level multiplicities, stripping zero
    /// multiplicities at both ends.
    pub fn from_mults(n: u32, mults: &[u32]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("block length must be positive".into()));
        }
        let total: u64 = mults.iter().map(|&k| u64::from(k)).sum();
        if total != u64::from(n) {
            return Err(Error::Domain(format!("multiplicities {mults:?} do not sum to n = {n}")));
        }
        let first = mults.iter().position(|&k| k > 0).expect("non-empty sum");
        let last = mults.iter().rposition(|&k| k > 0).expect("non-empty sum");
        let p = Self { n, mults: mults[first..=last].to_vec() };
        if p.k0().unsigned_abs() > u64::from(crate::exact::MAX_NUMERATOR as u32) {
            return Err(Error::Overflow("block pattern top value"));
        }
        Ok(p)
    }

    /// The constant block `1^n` (every coordinate `1/n`).
    pub fn ones(n: u32) -> Self {
        Self { n, mults: vec![n] }
    }

    /// The pattern of an embedded letter: one coordinate `1`, the rest `0`.
    pub fn unit(n: u32) -> Self {
        if n == 1 {
            return Self::ones(1);
        }
        Self { n, mults: vec![1, n - 1] }
    }

    /// Two-level pattern with `top` coordinates at the higher value.
    pub fn two_level(n: u32, top: u32) -> Result<Self> {
        if top == 0 || top > n {
            return Err(Error::Domain(format!("top multiplicity {top} outside 1..={n}")));
        }
        Self::from_mults(n, &[top, n - top])
    }

    /// The pattern of an explicit block of numerators.
    pub fn from_values(n: u32, values: &[i32]) -> Result<Self> {
        if values.len() != n as usize {
            return Err(Error::Dimension {
                left: format!("{} values", values.len()),
                right: format!("n = {n}"),
            });
        }
        let top = *values.iter().max().ok_or_else(|| Error::EmptyInput("empty block".into()))?;
        let mut mults = Vec::new();
        for &v in values {
            let gap = i64::from(top) - i64::from(v);
            if gap % i64::from(n) != 0 {
                return Err(Error::Domain(format!("value {v} is not on a level below {top} (step {n})")));
            }
            let level = (gap / i64::from(n)) as usize;
            if level >= mults.len() {
                mults.resize(level + 1, 0);
            }
            mults[level] += 1;
        }
        let p = Self::from_mults(n, &mults)?;
        if p.k0() != i64::from(top) {
            return Err(Error::Domain(format!("block with top value {top} does not sum to 1")));
        }
        Ok(p)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of levels.
    pub fn t(&self) -> usize {
        self.mults.len()
    }

    pub fn mults(&self) -> &[u32] {
        &self.mults
    }

    /// Top numerator, `1 + Σ (i-1) k_i`.
    pub fn k0(&self) -> i64 {
        1 + self
            .mults
            .iter()
            .enumerate()
            .map(|(i, &k)| i as i64 * i64::from(k))
            .sum::<i64>()
    }

    /// Numerator of level `i` (0-based).
    pub fn level_value(&self, i: usize) -> i64 {
        self.k0() - i as i64 * i64::from(self.n)
    }

    pub fn is_ones(&self) -> bool {
        self.mults.len() == 1
    }

    pub fn is_unit(&self) -> bool {
        self.n > 1 && self.mults == [1, self.n - 1]
    }

    /// `n · M` contribution of this block: `n(1-n) - 2n k0 - k0² + n Σ i² k_i + 2n t`.
    pub fn m_contribution(&self) -> i64 {
        let n = i64::from(self.n);
        let k0 = self.k0();
        let sq: i64 = self
            .mults
            .iter()
            .enumerate()
            .map(|(i, &k)| (i as i64 + 1).pow(2) * i64::from(k))
            .sum();
        n * (1 - n) - 2 * n * k0 - k0 * k0 + n * sq + 2 * n * self.t() as i64
    }

    /// Coordinates in non-increasing order.
    pub fn sorted_desc(&self) -> Vec<i32> {
        let mut out = Vec::with_capacity(self.n as usize);
        for (i, &k) in self.mults.iter().enumerate() {
            out.extend(std::iter::repeat_n(self.level_value(i) as i32, k as usize));
        }
        out
    }

    pub fn size(&self) -> Option<u128> {
        multinomial(&self.mults)
    }

    /// All distinct arrangements, ascending lexicographically.
    pub fn arrangements(&self) -> Vec<Vec<i32>> {
        distinct_permutations(&self.sorted_desc())
    }

    /// One modification step. Requires `t ≥ 3`.
    pub fn modify(&self) -> Result<Self> {
        let t = self.t();
        if t < 3 {
            return Err(Error::Precondition(format!("modification needs t ≥ 3, block {self} has t = {t}")));
        }
        let mut k = self.mults.clone();
        if t == 3 {
            k[0] -= 1;
            k[1] += 2;
            k[2] -= 1;
        } else {
            k[0] -= 1;
            k[1] += 1;
            k[t - 2] += 1;
            k[t - 1] -= 1;
        }
        Self::from_mults(self.n, &k)
    }

    /// Every normalized pattern whose modification is `self`.
    pub fn inverse_modifications(&self) -> Vec<Self> {
        let mut out = BTreeSet::new();
        for lead in 0..2usize {
            for trail in 0..2usize {
                let mut a: Vec<i64> = Vec::with_capacity(self.t() + 2);
                if lead == 1 {
                    a.push(0);
                }
                a.extend(self.mults.iter().map(|&k| i64::from(k)));
                if trail == 1 {
                    a.push(0);
                }
                let t = a.len();
                if t < 3 {
                    continue;
                }
                if t == 3 {
                    a[0] += 1;
                    a[1] -= 2;
                    a[2] += 1;
                } else {
                    a[0] += 1;
                    a[1] -= 1;
                    a[t - 2] -= 1;
                    a[t - 1] += 1;
                }
                if a.iter().any(|&v| v < 0) {
                    continue;
                }
                let mults: Vec<u32> = a.iter().map(|&v| v as u32).collect();
                let Ok(b) = Self::from_mults(self.n, &mults) else { continue };
                if b.t() == t && b.modify().as_ref() == Ok(self) {
                    out.insert(b);
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Largest `Σ (a_i - b_i)²` over arrangements of two patterns: pair the
/// descending order of one with the ascending order of the other.
pub fn block_max_sq_num(a: &BlockPattern, b: &BlockPattern) -> i64 {
    let x = a.sorted_desc();
    let y = b.sorted_desc();
    x.iter()
        .zip(y.iter().rev())
        .map(|(&p, &q)| (i64::from(p) - i64::from(q)).pow(2))
        .sum()
}

/// Smallest `Σ (a_i - b_i)²` over arrangements: both sorted the same way.
pub fn block_min_sq_num(a: &BlockPattern, b: &BlockPattern) -> i64 {
    let x = a.sorted_desc();
    let y = b.sorted_desc();
    x.iter().zip(&y).map(|(&p, &q)| (i64::from(p) - i64::from(q)).pow(2)).sum()
}

impl fmt::Display for BlockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .mults
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| {
                let v = self.level_value(i);
                if k == 1 {
                    v.to_string()
                } else {
                    format!("{v}^{k}")
                }
            })
            .collect();
        if self.t() == 1 {
            write!(f, "{}", terms[0])
        } else {
            write!(f, "({})^P", terms.join(","))
        }
    }
}

impl fmt::Debug for BlockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.n)
    }
}

/// A product `(x_1, ..., x_m)` of block patterns over a common `n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateClass {
    n: u32,
    blocks: Vec<BlockPattern>,
}

impl CandidateClass {
    pub fn new(blocks: Vec<BlockPattern>) -> Result<Self> {
        let n = blocks.first().ok_or_else(|| Error::EmptyInput("class without blocks".into()))?.n;
        if blocks.iter().any(|b| b.n != n) {
            return Err(Error::Dimension {
                left: format!("block length {n}"),
                right: "blocks of another length".into(),
            });
        }
        Ok(Self { n, blocks })
    }

    /// The class containing a given vector.
    pub fn of_vector(x: &ScaledVector) -> Result<Self> {
        let blocks = x
            .blocks()
            .map(|b| BlockPattern::from_values(x.n(), b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }

    /// `(1^n, ..., 1^n)`.
    pub fn all_ones(n: u32, m: u32) -> Self {
        Self { n, blocks: vec![BlockPattern::ones(n); m as usize] }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.blocks.len() as u32
    }

    pub fn blocks(&self) -> &[BlockPattern] {
        &self.blocks
    }

    pub fn t_sum(&self) -> usize {
        self.blocks.iter().map(BlockPattern::t).sum()
    }

    pub fn max_t(&self) -> usize {
        self.blocks.iter().map(BlockPattern::t).max().unwrap_or(0)
    }

    pub fn is_reduced(&self) -> bool {
        self.max_t() <= 2
    }

    /// `n · M`, the numerator of [`Self::m_value`] over `n`.
    pub fn m_times_n(&self) -> i64 {
        self.blocks.iter().map(BlockPattern::m_contribution).sum()
    }

    /// Largest squared distance from a class member to the Hamming points.
    pub fn m_value(&self) -> Ratio<i64> {
        Ratio::new(self.m_times_n(), i64::from(self.n))
    }

    /// True when every member keeps `H̃(n,m)` an `m`-distance set. The class
    /// of all unit blocks is `H̃` itself and is excluded.
    pub fn is_addable(&self) -> bool {
        let mv = self.m_value();
        if !mv.is_integer() {
            return false;
        }
        let v = mv.to_integer();
        v > 0 && v % 2 == 0 && v <= 2 * i64::from(self.m()) && !self.blocks.iter().all(BlockPattern::is_unit)
    }

    /// Number of members, `Π_j multinomial(n; k^{(j)})`.
    pub fn size(&self) -> Option<u128> {
        self.blocks.iter().try_fold(1u128, |acc, b| acc.checked_mul(b.size()?))
    }

    /// The member whose blocks are non-increasing.
    pub fn canonical_element(&self) -> ScaledVector {
        let nums = self.blocks.iter().flat_map(BlockPattern::sorted_desc).collect();
        ScaledVector::new_unchecked(self.n, self.m(), nums)
    }

    /// All members, lexicographically ascending.
    pub fn enumerate(&self, cap: u128) -> Result<Vec<ScaledVector>> {
        let count = self.size().ok_or(Error::Overflow("class size"))?;
        if count > cap {
            return Err(Error::SizeCap { count, cap });
        }
        let per_block: Vec<Vec<Vec<i32>>> = self.blocks.iter().map(BlockPattern::arrangements).collect();
        let m = self.m();
        let out = per_block
            .iter()
            .map(|v| v.iter())
            .multi_cartesian_product()
            .map(|parts| {
                let nums = parts.into_iter().flatten().copied().collect();
                ScaledVector::new_unchecked(self.n, m, nums)
            })
            .collect::<Vec<_>>();
        debug_assert_eq!(out.len() as u128, count);
        Ok(out)
    }

    /// Replaces block `j` by its modification.
    pub fn modify(&self, j: usize) -> Result<Self> {
        let block = self
            .blocks
            .get(j)
            .ok_or_else(|| Error::Precondition(format!("block index {j} out of range")))?;
        let mut blocks = self.blocks.clone();
        blocks[j] = block.modify()?;
        Ok(Self { n: self.n, blocks })
    }

    /// Repeats [`Self::modify`] until every block has at most two levels.
    pub fn reduce(&self) -> Result<Self> {
        if !self.is_addable() {
            return Err(Error::Precondition(format!("{self} is not addable")));
        }
        let mut cur = self.clone();
        while let Some(j) = cur.blocks.iter().position(|b| b.t() >= 3) {
            cur = cur.modify(j)?;
        }
        Ok(cur)
    }

    /// Every addable class that reduces to `self` through at least one
    /// modification step, with `t_j ≤ m` and `Σ t_j ≤ 2m - 1`.
    pub fn inverse_expansions(&self) -> Result<Vec<Self>> {
        if !self.is_reduced() || !self.is_addable() {
            return Err(Error::Precondition(format!("{self} is not a reduced addable class")));
        }
        let m = self.m() as usize;
        let limit = 2 * i64::from(self.m());
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([self.clone()]);
        while let Some(cur) = queue.pop_front() {
            if cur.m_value() >= Ratio::from_integer(limit) {
                continue;
            }
            for j in 0..cur.blocks.len() {
                for b in cur.blocks[j].inverse_modifications() {
                    let mut blocks = cur.blocks.clone();
                    blocks[j] = b;
                    let next = Self { n: self.n, blocks };
                    if next.max_t() > m || next.t_sum() > 2 * m - 1 || !next.is_addable() {
                        continue;
                    }
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// The class with blocks rearranged: block `j` of the result is block
    /// `perm[j]` of `self`.
    pub fn permute_blocks(&self, perm: &[usize]) -> Self {
        Self { n: self.n, blocks: perm.iter().map(|&i| self.blocks[i].clone()).collect() }
    }

    /// Representative of the orbit under block permutations.
    pub fn orbit_key(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.sort();
        Self { n: self.n, blocks }
    }

    /// Largest squared-distance numerator between two members of `self`.
    pub fn internal_max_sq_num(&self) -> i64 {
        self.blocks.iter().map(|b| block_max_sq_num(b, b)).sum()
    }

    /// Largest squared-distance numerator between a member of `self` and one
    /// of `other`.
    pub fn cross_max_sq_num(&self, other: &Self) -> i64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| block_max_sq_num(a, b)).sum()
    }

    /// Squared-distance numerator between the canonical elements.
    pub fn canonical_sq_num(&self, other: &Self) -> i64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| block_min_sq_num(a, b)).sum()
    }

    /// Blocks other than `1^n`.
    pub fn non_constant_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&j| !self.blocks[j].is_ones()).collect()
    }

    /// Appends `count` copies of `1^n`.
    pub fn with_ones(&self, count: usize) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.extend(std::iter::repeat_n(BlockPattern::ones(self.n), count));
        Self { n: self.n, blocks }
    }

    /// `M` as an integer, when it is one.
    pub fn m_integer(&self) -> Option<i64> {
        let v = self.m_value();
        v.is_integer().then(|| v.to_integer())
    }
}

impl fmt::Display for CandidateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(ToString::to_string).collect();
        write!(f, "({})/{}", parts.join(","), self.n)
    }
}

impl fmt::Debug for CandidateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for CandidateClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CandidateClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in \"{}\"", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn number(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let v: i64 = std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| self.error("number out of range"))?;
        Ok(if neg { -v } else { v })
    }

    /// `value[^mult]`
    fn term(&mut self) -> Result<(i64, u32)> {
        let v = self.number()?;
        let k = if self.eat(b'^') {
            let k = self.number()?;
            u32::try_from(k).map_err(|_| self.error("negative multiplicity"))?
        } else {
            1
        };
        Ok((v, k))
    }

    /// `term` or `(term, ...)[^P]`
    fn block(&mut self) -> Result<Vec<(i64, u32)>> {
        if self.eat(b'(') {
            let mut terms = vec![self.term()?];
            while self.eat(b',') {
                terms.push(self.term()?);
            }
            self.expect(b')')?;
            if self.eat(b'^')
                && !self.eat(b'P') {
                    return Err(self.error("expected 'P' after '^'"));
                }
            Ok(terms)
        } else {
            Ok(vec![self.term()?])
        }
    }
}

fn block_from_terms(n: u32, terms: &[(i64, u32)]) -> Result<BlockPattern> {
    let mut values = Vec::with_capacity(n as usize);
    for &(v, k) in terms {
        let v = i32::try_from(v).map_err(|_| Error::Parse(format!("value {v} out of range")))?;
        if values.len() + k as usize > n as usize {
            return Err(Error::Parse(format!("block has more than n = {n} coordinates")));
        }
        values.extend(std::iter::repeat_n(v, k as usize));
    }
    BlockPattern::from_values(n, &values).map_err(|e| Error::Parse(e.to_string()))
}

impl FromStr for CandidateClass {
    type Err = Error;

    /// Parses `((4^6,-5^3)^P,1^9,1^9)/9`. Whitespace is ignored, `^P` is
    /// optional and the `/n` suffix may be omitted, in which case `n` is the
    /// coordinate count of the first block.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { s: compact.as_bytes(), pos: 0 };
        p.expect(b'(')?;
        let mut blocks = vec![p.block()?];
        while p.eat(b',') {
            blocks.push(p.block()?);
        }
        p.expect(b')')?;
        let n = if p.eat(b'/') {
            let n = p.number()?;
            u32::try_from(n).ok().filter(|&n| n > 0).ok_or_else(|| p.error("bad denominator"))?
        } else {
            blocks[0].iter().map(|&(_, k)| k).sum()
        };
        if p.pos != p.s.len() {
            return Err(p.error("trailing input"));
        }
        let patterns = blocks
            .iter()
            .map(|t| block_from_terms(n, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(patterns)
    }
}
