//! Parameter search: which classes can be added to `H̃(n,m)`.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::class::{BlockPattern, CandidateClass};
use crate::combinatorics::{compositions, distinct_permutations};
use crate::error::{Error, Result};

/// Top values `k0` of a reduced class: `l` two-level blocks (values `> 1`,
/// non-increasing) followed by `m - l` constant blocks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Profile {
    pub n: u32,
    pub m: u32,
    pub l: u32,
    pub k0s: Vec<u32>,
}

impl Profile {
    pub fn new(n: u32, m: u32, top: &[u32]) -> Result<Self> {
        let l = top.len() as u32;
        if l > m {
            return Err(Error::Domain(format!("{l} top values for m = {m}")));
        }
        if top.iter().any(|&k| k < 2 || k > n) || top.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("top values {top:?} must be non-increasing in 2..={n}")));
        }
        let mut k0s = top.to_vec();
        k0s.resize(m as usize, 1);
        Ok(Self { n, m, l, k0s })
    }

    /// `n · M = Σ k0 (n - k0) + 2 l n`.
    pub fn m_times_n(&self) -> i64 {
        let n = i64::from(self.n);
        self.k0s.iter().map(|&k| i64::from(k) * (n - i64::from(k))).sum::<i64>() + 2 * i64::from(self.l) * n
    }

    pub fn m_value(&self) -> Ratio<i64> {
        Ratio::new(self.m_times_n(), i64::from(self.n))
    }

    /// The condition for the profile to give an addable class.
    pub fn is_admissible(&self) -> bool {
        let v = self.m_value();
        let all_unit = self.k0s.iter().all(|&k| k == self.n);
        v.is_integer() && {
            let v = v.to_integer();
            v > 0 && v % 2 == 0 && v <= 2 * i64::from(self.m)
        } && !all_unit
    }

    /// Blocks in profile order: `k1 = n + 1 - k0`, `k2 = k0 - 1`.
    pub fn realize(&self) -> CandidateClass {
        let blocks = self
            .k0s
            .iter()
            .map(|&k0| {
                if k0 == 1 {
                    BlockPattern::ones(self.n)
                } else {
                    BlockPattern::two_level(self.n, self.n + 1 - k0).expect("2 ≤ k0 ≤ n")
                }
            })
            .collect();
        CandidateClass::new(blocks).expect("shared n")
    }

    /// Every distinct block arrangement of [`Self::realize`].
    pub fn arrangements(&self) -> Vec<CandidateClass> {
        let base = self.realize();
        distinct_permutations(base.blocks())
            .into_iter()
            .map(|b| CandidateClass::new(b).expect("shared n"))
            .collect()
    }
}

/// Every admissible profile for `(n, m)`, in lexicographic order of `(l, k0s)`.
pub fn enumerate_profiles(n: u32, m: u32) -> Result<Vec<Profile>> {
    if n < 2 || m < 1 {
        return Err(Error::Domain(format!("profiles need n ≥ 2 and m ≥ 1, got ({n}, {m})")));
    }
    let nn = i64::from(n);
    let budget = 2 * i64::from(m) * nn;
    let mut out = Vec::new();
    for l in 0..=m {
        // constant blocks contribute (n - 1) each, every two-level block at least 2n
        let base = i64::from(m - l) * (nn - 1) + 2 * i64::from(l) * nn;
        if base > budget {
            break;
        }
        let mut top = Vec::with_capacity(l as usize);
        profile_dfs(n, m, l, n, base, budget, &mut top, &mut out);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn profile_dfs(n: u32, m: u32, l: u32, max_k: u32, acc: i64, budget: i64, top: &mut Vec<u32>, out: &mut Vec<Profile>) {
    if top.len() == l as usize {
        let p = Profile::new(n, m, top).expect("valid by construction");
        if p.is_admissible() {
            out.push(p);
        }
        return;
    }
    let nn = i64::from(n);
    for k in (2..=max_k).rev() {
        let add = i64::from(k) * (nn - i64::from(k));
        if acc + add > budget {
            continue;
        }
        top.push(k);
        profile_dfs(n, m, l, k, acc + add, budget, top, out);
        top.pop();
    }
}

/// Addable classes for `(n, m)`: reduced ones and their expansions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCatalog {
    pub reduced: Vec<CandidateClass>,
    pub expanded: Vec<CandidateClass>,
}

impl ClassCatalog {
    pub fn all(&self) -> Vec<CandidateClass> {
        let mut v: Vec<CandidateClass> = self.reduced.iter().chain(&self.expanded).cloned().collect();
        v.sort();
        v
    }

    pub fn is_empty(&self) -> bool {
        self.reduced.is_empty() && self.expanded.is_empty()
    }

    /// Reduced classes with `M < 2m`.
    pub fn expandable(&self) -> Vec<CandidateClass> {
        self.reduced
            .iter()
            .filter(|x| x.m_value() < Ratio::from_integer(2 * i64::from(x.m())))
            .cloned()
            .collect()
    }
}

/// Reduced classes from the profiles, plus all inverse expansions of those
/// with `M < 2m`.
pub fn enumerate_addable_classes(n: u32, m: u32) -> Result<ClassCatalog> {
    let mut reduced = BTreeSet::new();
    for p in enumerate_profiles(n, m)? {
        reduced.extend(p.arrangements());
    }
    let mut expanded = BTreeSet::new();
    for x in &reduced {
        if x.m_value() < Ratio::from_integer(2 * i64::from(m)) {
            expanded.extend(x.inverse_expansions()?);
        }
    }
    Ok(ClassCatalog { reduced: reduced.into_iter().collect(), expanded: expanded.into_iter().collect() })
}

/// Normalized block patterns of length `n` with at most `max_t` levels.
pub fn block_patterns(n: u32, max_t: usize) -> Vec<BlockPattern> {
    let mut out = vec![BlockPattern::ones(n)];
    for t in 2..=max_t.min(n as usize) {
        // first and last multiplicities at least one
        for mut c in compositions(n - 2, t) {
            c[0] += 1;
            c[t - 1] += 1;
            if let Ok(b) = BlockPattern::from_mults(n, &c) {
                out.push(b);
            }
        }
    }
    out.sort();
    out
}

/// Addable classes found by scanning every tuple of block patterns with
/// `t_j ≤ m` and `Σ t_j ≤ 2m - 1`. Independent of the profile route.
pub fn direct_class_search(n: u32, m: u32) -> Result<Vec<CandidateClass>> {
    if n < 2 || m < 1 {
        return Err(Error::Domain(format!("search needs n ≥ 2 and m ≥ 1, got ({n}, {m})")));
    }
    let nn = i64::from(n);
    let budget = 2 * i64::from(m) * nn;
    let floor = nn - 1;
    let max_block = budget - i64::from(m - 1) * floor;
    let patterns: Vec<BlockPattern> = block_patterns(n, m as usize)
        .into_iter()
        .filter(|b| b.m_contribution() <= max_block)
        .collect();
    let t_cap = 2 * m as usize - 1;
    let found: Vec<Vec<CandidateClass>> = patterns
        .par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut stack = vec![first.clone()];
            direct_dfs(m, &patterns, budget, floor, t_cap, first.m_contribution(), first.t(), &mut stack, &mut out);
            out
        })
        .collect();
    let mut all: Vec<CandidateClass> = found.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

#[allow(clippy::too_many_arguments)]
fn direct_dfs(
    m: u32,
    patterns: &[BlockPattern],
    budget: i64,
    floor: i64,
    t_cap: usize,
    acc: i64,
    t_acc: usize,
    stack: &mut Vec<BlockPattern>,
    out: &mut Vec<CandidateClass>,
) {
    let placed = stack.len() as u32;
    if placed == m {
        let x = CandidateClass::new(stack.clone()).expect("shared n");
        if x.is_addable() {
            out.push(x);
        }
        return;
    }
    let rest = i64::from(m - placed - 1);
    for b in patterns {
        let acc2 = acc + b.m_contribution();
        let t2 = t_acc + b.t();
        if acc2 + rest * floor > budget || t2 + rest as usize > t_cap {
            continue;
        }
        stack.push(b.clone());
        direct_dfs(m, patterns, budget, floor, t_cap, acc2, t2, stack, out);
        stack.pop();
    }
}

/// True when no vector can be added to `H̃(n,m)`.
pub fn hamming_is_maximal(n: u32, m: u32) -> Result<bool> {
    Ok(enumerate_profiles(n, m)?.is_empty())
}

/// Largest `n` for which `H̃(n,m)` is not maximal: `m² + m - 1`.
pub fn max_nonmaximal_n(m: u32) -> Result<u32> {
    if m < 2 {
        return Err(Error::Domain(format!("frontier defined for m ≥ 2, got {m}")));
    }
    Ok(m * m + m - 1)
}

/// Result of checking the frontier numerically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrontierCheck {
    pub m: u32,
    pub frontier: u32,
    pub frontier_non_maximal: bool,
    pub witness_m_value: i64,
    /// First `n` above the frontier that admits a profile, if any.
    pub counterexample: Option<u32>,
}

impl FrontierCheck {
    pub fn holds(&self) -> bool {
        self.frontier_non_maximal && self.witness_m_value == 2 * i64::from(self.m) && self.counterexample.is_none()
    }
}

/// Confirms the frontier by search: `(m² + m - 1, m)` admits a profile, the
/// witness profile with top value `m` reaches `M = 2m`, and no `n` in
/// `(m² + m - 1, m² + m - 1 + above]` admits a profile.
pub fn verify_frontier(m: u32, above: u32) -> Result<FrontierCheck> {
    let frontier = max_nonmaximal_n(m)?;
    let frontier_non_maximal = !hamming_is_maximal(frontier, m)?;
    let witness = Profile::new(frontier, m, &[m.max(2)])?;
    let wm = witness.m_value();
    let witness_m_value = if wm.is_integer() { wm.to_integer() } else { -1 };
    let counterexample = ((frontier + 1)..=(frontier + above))
        .into_par_iter()
        .find_first(|&n| !hamming_is_maximal(n, m).unwrap_or(true));
    Ok(FrontierCheck { m, frontier, frontier_non_maximal, witness_m_value, counterexample })
}

/// Appends `i·n` constant blocks. `i` must be even when `n` is even.
pub fn lift_class(x: &CandidateClass, i: u32) -> Result<CandidateClass> {
    if !x.is_addable() {
        return Err(Error::Precondition(format!("{x} is not addable")));
    }
    let n = x.n();
    if n.is_multiple_of(2) && i % 2 == 1 {
        return Err(Error::Precondition(format!("lifting by i = {i} needs i even when n = {n} is even")));
    }
    Ok(x.with_ones((i * n) as usize))
}

fn check_tops(n: u32, top: &[u32]) -> Result<()> {
    if top.is_empty() {
        return Err(Error::Precondition("at least one top value is needed".into()));
    }
    if let Some(&k) = top.iter().find(|&&k| k <= 1 || k >= n) {
        return Err(Error::Precondition(format!("top value {k} outside 2..{n}")));
    }
    Ok(())
}

/// Closed form for the least `m` at which the top values `top` (padded with
/// constant blocks) give an addable class.
pub fn min_m_for(n: u32, top: &[u32]) -> Result<i64> {
    check_tops(n, top)?;
    let nn = i64::from(n);
    let l = top.len() as i64;
    let sq: i64 = top.iter().map(|&k| i64::from(k).pow(2)).sum();
    let num: i64 = top.iter().map(|&k| i64::from(k) * (1 + i64::from(k))).sum();
    let ceil = (num + nn) / (nn + 1);
    let i = if n.is_multiple_of(2) && ceil % 2 == 1 { ceil + 1 } else { ceil };
    Ok(l - sq + i * nn)
}

/// Least `m ≤ max_m` found by scanning, or `None`.
pub fn min_m_scan(n: u32, top: &[u32], max_m: u32) -> Result<Option<u32>> {
    check_tops(n, top)?;
    let l = top.len() as u32;
    let nn = i64::from(n);
    let top_part: i64 = top.iter().map(|&k| i64::from(k) * (nn - i64::from(k))).sum::<i64>() + 2 * i64::from(l) * nn;
    for m in l.max(1)..=max_m {
        let mn = top_part + i64::from(m - l) * (nn - 1);
        if mn % nn != 0 {
            continue;
        }
        let v = mn / nn;
        if v > 0 && v % 2 == 0 && v <= 2 * i64::from(m) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}
