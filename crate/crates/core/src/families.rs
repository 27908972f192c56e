//! Intersecting families, EKR-type bounds and largest bounded subsets of a
//! single class.
//!
//! A two-level block with `k` coordinates at the higher value is identified
//! with the `k`-subset of positions holding that value. Two such blocks are at
//! squared distance `2(k - |A ∩ B|)`, so distance bounds become intersection
//! conditions.

use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use crate::class::CandidateClass;
use crate::clique::BitGraph;
use crate::combinatorics::{binomial, distinct_permutations, subset_masks};
use crate::error::{Error, Result};
use crate::exact::{sq_num, ScaledVector};

/// Closed form `Σ_{j ≥ t+r} C(t+2r, j) C(n-t-2r, k-j)`.
pub fn frankl_count(n: u32, k: u32, t: u32, r: u32) -> u128 {
    let head = t + 2 * r;
    if head > n {
        return 0;
    }
    (t + r..=k.min(head))
        .map(|j| binomial(u64::from(head), u64::from(j)) * binomial(u64::from(n - head), u64::from(k - j)))
        .sum()
}

fn frankl_domain(n: u32, k: u32, t: u32, r: u32) -> bool {
    n >= k && k >= t + r && n >= t + 2 * r
}

/// The `k`-subsets of `{0..n}` meeting `{0..t+2r}` in at least `t + r`
/// points, as bit masks.
pub fn gen_frankl(n: u32, k: u32, t: u32, r: u32) -> Result<Vec<u64>> {
    if !frankl_domain(n, k, t, r) {
        return Err(Error::Precondition(format!(
            "family F{r}({k},{t}) needs n ≥ k ≥ t + r and n ≥ t + 2r, got n = {n}"
        )));
    }
    if n > 64 {
        return Err(Error::Unsupported(format!("ground set of {n} points exceeds 64")));
    }
    let head_mask = if t + 2 * r == 64 { u64::MAX } else { (1u64 << (t + 2 * r)) - 1 };
    Ok(subset_masks(n, k)
        .into_iter()
        .filter(|s| (s & head_mask).count_ones() >= t + r)
        .collect())
}

/// Which part of the complete intersection theorem applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EkrRegime {
    /// Every pair of `k`-sets already meets in `t` points.
    Trivial,
    /// `n > (k - t + 1)(t + 1)`: the star-like family `F_0`.
    Star,
    /// Strict interval for index `r ≥ 1`.
    Interval { r: u32 },
    /// Boundary case: `F_r` and `F_{r+1}` have the same size. The flag
    /// records whether `F_{r+1}` lies inside the family's stated domain.
    Tie { r: u32, next_in_domain: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EkrBound {
    pub bound: u128,
    pub regime: EkrRegime,
}

impl EkrBound {
    /// Index of the extremal family, if one applies.
    pub fn r(&self) -> Option<u32> {
        match self.regime {
            EkrRegime::Trivial => None,
            EkrRegime::Star => Some(0),
            EkrRegime::Interval { r } | EkrRegime::Tie { r, .. } => Some(r),
        }
    }

    pub fn is_tie(&self) -> bool {
        matches!(self.regime, EkrRegime::Tie { .. })
    }
}

/// Largest size of a `t`-intersecting family of `k`-subsets of an `n`-set.
pub fn ekr_bound(n: u32, k: u32, t: u32) -> Result<EkrBound> {
    if !(1 <= t && t <= k && k <= n) {
        return Err(Error::Precondition(format!("need 1 ≤ t ≤ k ≤ n, got (n, k, t) = ({n}, {k}, {t})")));
    }
    let (nn, kk, tt) = (u64::from(n), u64::from(k), u64::from(t));
    if 2 * kk >= nn + tt {
        return Ok(EkrBound { bound: binomial(nn, kk), regime: EkrRegime::Trivial });
    }
    let w = kk - tt + 1;
    // boundary value (k - t + 1)(2 + (t - 1)/(r + 1)), compared as n (r + 1) against w (2(r + 1) + t - 1)
    let cmp = |r: u64| (nn * (r + 1)).cmp(&(w * (2 * (r + 1) + tt - 1)));
    let tie = |r: u32| {
        let bound = frankl_count(n, k, t, r);
        EkrBound { bound, regime: EkrRegime::Tie { r, next_in_domain: frankl_domain(n, k, t, r + 1) } }
    };
    if cmp(0).is_eq() {
        return Ok(tie(0));
    }
    if cmp(0).is_gt() {
        return Ok(EkrBound { bound: frankl_count(n, k, t, 0), regime: EkrRegime::Star });
    }
    for r in 1..=n {
        match cmp(u64::from(r)) {
            std::cmp::Ordering::Equal => return Ok(tie(r)),
            std::cmp::Ordering::Greater => {
                return Ok(EkrBound { bound: frankl_count(n, k, t, r), regime: EkrRegime::Interval { r } })
            }
            std::cmp::Ordering::Less => {}
        }
    }
    Err(Error::Unsupported(format!("no intersection regime found for (n, k, t) = ({n}, {k}, {t})")))
}

/// `C(n,k) - C(n-k,k) + 1`: bound on `|X| + |Y|` for a non-empty
/// cross-intersecting pair of `k`-set families.
pub fn cross_pair_bound(n: u32, k: u32) -> Result<u128> {
    if n < 2 * k {
        return Err(Error::Precondition(format!("cross pair bound needs n ≥ 2k, got n = {n}, k = {k}")));
    }
    Ok(binomial(u64::from(n), u64::from(k)) - binomial(u64::from(n - k), u64::from(k)) + 1)
}

/// `s · C(n-1, k-1)`: bound on `Σ |X_i|` for `s` cross-intersecting families.
pub fn cross_s_bound(n: u32, k: u32, s: u32) -> Result<u128> {
    if n <= 2 * k || u64::from(s) * u64::from(k) <= u64::from(n) {
        return Err(Error::Precondition(format!(
            "cross family bound needs n > 2k and s > n/k, got (n, k, s) = ({n}, {k}, {s})"
        )));
    }
    Ok(u128::from(s) * binomial(u64::from(n - 1), u64::from(k - 1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AnxKind {
    X,
    Y,
    Z,
}

/// The extremal subsets of `(1, 0^k, -1^2)^P`, entries in `{1, 0, -1}`.
pub fn gen_anx(kind: AnxKind, k: u32) -> Result<Vec<Vec<i8>>> {
    let base_k = match kind {
        AnxKind::X | AnxKind::Y => 1,
        AnxKind::Z => 2,
    };
    if k < base_k {
        return Err(Error::Precondition(format!("{kind:?} family needs k ≥ {base_k}, got {k}")));
    }
    let prefixed = |head: i8, rest: &[i8]| -> Vec<Vec<i8>> {
        distinct_permutations(rest)
            .into_iter()
            .map(|p| std::iter::once(head).chain(p).collect())
            .collect()
    };
    let mut fam: Vec<Vec<i8>> = match kind {
        AnxKind::X => {
            let mut v = prefixed(1, &[0, -1, -1]);
            v.extend(prefixed(0, &[1, -1, -1]));
            v
        }
        AnxKind::Y => prefixed(-1, &[1, 0, -1]),
        AnxKind::Z => prefixed(-1, &[1, 0, 0, -1]),
    };
    for j in base_k + 1..=k {
        let mut next: Vec<Vec<i8>> = fam.iter().map(|v| std::iter::once(0).chain(v.iter().copied()).collect()).collect();
        let mut tail = vec![0i8; j as usize];
        tail.extend([-1, -1]);
        next.extend(prefixed(1, &tail));
        fam = next;
    }
    fam.sort();
    fam.dedup();
    Ok(fam)
}

/// [`gen_anx`] with entries `1, 0, -1` replaced by the numerators
/// `k0, k0 - n, k0 - 2n`, where `n = k + 3`.
pub fn anx_scaled(kind: AnxKind, k: u32, k0: i32, n: u32) -> Result<Vec<Vec<i32>>> {
    if n != k + 3 {
        return Err(Error::Precondition(format!("pattern length {n} differs from k + 3 = {}", k + 3)));
    }
    let step = n as i32;
    Ok(gen_anx(kind, k)?
        .into_iter()
        .map(|v| v.into_iter().map(|e| k0 - step * (1 - i32::from(e))).collect())
        .collect())
}

/// The cyclic decomposition of the 2-subsets of a 7-set into 7 triples of
/// pairwise disjoint pairs: shifts of `{{2,4},{1,5},{0,6}}`.
pub fn triangle_decomposition() -> Vec<[u64; 3]> {
    let base: [[u32; 2]; 3] = [[2, 4], [1, 5], [0, 6]];
    (0..7u32)
        .map(|i| base.map(|[a, b]| (1u64 << ((a + 7 - i) % 7)) | (1u64 << ((b + 7 - i) % 7))))
        .collect()
}

/// Bound for the two-block case with pattern sizes 2 and 3 on 7 points,
/// summed over the triangle decomposition: each triangle carries at most
/// `max(C(7,3), C(7,3) - C(4,3) + 1, 3 C(6,2))`.
pub fn triangle_product_bound() -> u128 {
    let per = binomial(7, 3).max(cross_pair_bound(7, 3).expect("7 ≥ 6")).max(cross_s_bound(7, 3, 3).expect("valid"));
    triangle_decomposition().len() as u128 * per
}

/// How a largest bounded subset was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubsetCertificate {
    /// The class has no pair above the bound.
    WholeClass,
    /// Exact maximum clique; `construction` names a known family of the same size.
    BruteForceClique { vertices: usize, construction: Option<String> },
    /// Explicit extremal construction matching a counting bound.
    EkrConstruction { name: String, bound: u128 },
    /// Time-limited clique search that did not finish; the set is a clique
    /// no single vertex extends.
    BudgetedClique { vertices: usize },
}

impl SubsetCertificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self, Self::BudgetedClique { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundedSubset {
    pub class: CandidateClass,
    #[serde(skip)]
    pub points: Vec<ScaledVector>,
    pub size: usize,
    pub certificate: SubsetCertificate,
}

#[derive(Clone, Debug)]
pub struct SubsetOptions {
    /// Largest class solved exactly without a time limit.
    pub exact_cap: usize,
    /// Largest class handed to the time-limited solver.
    pub budget_cap: usize,
    pub budget: Duration,
}

impl Default for SubsetOptions {
    fn default() -> Self {
        Self { exact_cap: 150, budget_cap: 500, budget: Duration::from_secs(10) }
    }
}

struct Construction {
    name: String,
    bound: u128,
    points: Vec<ScaledVector>,
}

fn block_from_mask(mask: u64, n: u32, hi: i32, lo: i32) -> Vec<i32> {
    (0..n).map(|i| if mask >> i & 1 == 1 { hi } else { lo }).collect()
}

/// Product of per-block choices, in block order.
pub(crate) fn product(n: u32, per_block: &[Vec<Vec<i32>>]) -> Vec<ScaledVector> {
    let m = per_block.len() as u32;
    let mut out: Vec<Vec<i32>> = vec![Vec::new()];
    for choices in per_block {
        out = out
            .iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(c);
                    v
                })
            })
            .collect();
    }
    let mut pts: Vec<ScaledVector> = out.into_iter().map(|v| ScaledVector::new_unchecked(n, m, v)).collect();
    pts.sort();
    pts
}

fn construction(x: &CandidateClass) -> Result<Option<Construction>> {
    let n = x.n();
    let m = i64::from(x.m());
    let blocks = x.blocks();
    let non = x.non_constant_blocks();
    let all_of = |j: usize| blocks[j].arrangements();
    let constant = |j: usize| vec![blocks[j].sorted_desc()];
    let two_level = |j: usize| blocks[j].t() == 2;
    let levels = |j: usize| (blocks[j].level_value(0) as i32, blocks[j].level_value(1) as i32);

    if non.len() == 1 && two_level(non[0]) {
        let j = non[0];
        let k = blocks[j].mults()[0];
        let t = i64::from(k) - m;
        if t <= 0 {
            return Ok(None);
        }
        let ekr = ekr_bound(n, k, t as u32)?;
        let Some(r) = ekr.r() else { return Ok(None) };
        let (hi, lo) = levels(j);
        let fam = gen_frankl(n, k, t as u32, r)?;
        let per_block: Vec<Vec<Vec<i32>>> = (0..blocks.len())
            .map(|i| if i == j { fam.iter().map(|&s| block_from_mask(s, n, hi, lo)).collect() } else { constant(i) })
            .collect();
        return Ok(Some(Construction {
            name: format!("F{r}({k},{t},{hi})"),
            bound: ekr.bound,
            points: product(n, &per_block),
        }));
    }

    if non.len() == 2 {
        let (a, b) = (non[0], non[1]);
        let (unit, other) = if blocks[a].is_unit() && two_level(b) {
            (a, b)
        } else if blocks[b].is_unit() && two_level(a) {
            (b, a)
        } else {
            (usize::MAX, usize::MAX)
        };
        if unit != usize::MAX {
            // different unit positions add 2 to the squared distance
            let k = i64::from(blocks[other].mults()[0]);
            let nn = i64::from(n);
            let automatic = (2 * k - nn).max(0);
            if automatic < k - m {
                return Ok(None);
            }
            let cross = k - m + 1;
            if cross <= automatic {
                return Ok(None);
            }
            let (hi, lo) = levels(other);
            // express the cross condition as plain intersection of k'-sets
            let (side, avoid) = if cross == 1 {
                (k, false)
            } else if nn - 2 * k + cross == 1 {
                (nn - k, true)
            } else {
                return Ok(None);
            };
            let bound = cross_s_bound(n, side as u32, n)?;
            let fam: Vec<Vec<i32>> = subset_masks(n, k as u32)
                .into_iter()
                .filter(|s| (s & 1 == 1) != avoid)
                .map(|s| block_from_mask(s, n, hi, lo))
                .collect();
            let per_block: Vec<Vec<Vec<i32>>> = (0..blocks.len())
                .map(|i| {
                    if i == unit {
                        all_of(i)
                    } else if i == other {
                        fam.clone()
                    } else {
                        constant(i)
                    }
                })
                .collect();
            return Ok(Some(Construction {
                name: format!("unit x F0({side},1) on {}", if avoid { "complements" } else { "tops" }),
                bound,
                points: product(n, &per_block),
            }));
        }
        if n == 7 && m == 4 && two_level(a) && two_level(b) {
            let (ka, kb) = (blocks[a].mults()[0], blocks[b].mults()[0]);
            let (whole, star) = match (ka, kb) {
                (2, 3) => (a, b),
                (3, 2) => (b, a),
                _ => return Ok(None),
            };
            let (hi, lo) = levels(star);
            let fam: Vec<Vec<i32>> = subset_masks(7, 3)
                .into_iter()
                .filter(|s| s & 1 == 1)
                .map(|s| block_from_mask(s, 7, hi, lo))
                .collect();
            let per_block: Vec<Vec<Vec<i32>>> = (0..blocks.len())
                .map(|i| {
                    if i == whole {
                        all_of(i)
                    } else if i == star {
                        fam.clone()
                    } else {
                        constant(i)
                    }
                })
                .collect();
            return Ok(Some(Construction {
                name: format!("whole x F0(3,1,{hi})"),
                bound: triangle_product_bound(),
                points: product(n, &per_block),
            }));
        }
    }
    Ok(None)
}

/// First pair of points at squared-distance numerator above `limit`.
pub fn first_violation(points: &[ScaledVector], limit: i64) -> Option<(usize, usize)> {
    (0..points.len()).into_par_iter().find_map_first(|i| {
        (i + 1..points.len())
            .find(|&j| sq_num(points[i].nums(), points[j].nums()) > limit)
            .map(|j| (i, j))
    })
}

/// Graph joining points at squared-distance numerator at most `limit`.
pub fn bounded_distance_graph(points: &[ScaledVector], limit: i64) -> BitGraph {
    BitGraph::from_fn(points.len(), |i, j| sq_num(points[i].nums(), points[j].nums()) <= limit)
}

/// Orbit key under coordinate permutations inside blocks that fix every
/// point of `clique`: per block, the sorted columns `(c_1[i], .., c_d[i], u[i])`.
/// Valid for any point set closed under those permutations.
pub fn coordinate_orbit_key(points: &[ScaledVector]) -> impl Fn(&[usize], usize) -> Vec<i64> + Sync + '_ {
    // columns pack into one u128 at 22 bits per entry (|num| < 2^21)
    const BITS: u32 = 22;
    move |clique, u| {
        let x = &points[u];
        let n = x.n() as usize;
        let packed = (clique.len() + 1) * BITS as usize <= 128;
        let mut key = Vec::with_capacity(x.nums().len() * 2);
        if packed {
            let mut cols: Vec<u128> = Vec::with_capacity(n);
            for j in 0..x.m() as usize {
                cols.clear();
                for i in j * n..(j + 1) * n {
                    let col = clique
                        .iter()
                        .map(|&c| points[c].nums()[i])
                        .chain(std::iter::once(x.nums()[i]))
                        .fold(0u128, |acc, v| acc << BITS | (i64::from(v) + (1 << (BITS - 1))) as u128);
                    cols.push(col);
                }
                cols.sort_unstable();
                key.extend(cols.iter().flat_map(|&c| [(c >> 64) as i64, c as i64]));
            }
            return key;
        }
        let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n);
        for j in 0..x.m() as usize {
            cols.clear();
            for i in j * n..(j + 1) * n {
                let mut col: Vec<i64> = clique.iter().map(|&c| i64::from(points[c].nums()[i])).collect();
                col.push(i64::from(x.nums()[i]));
                cols.push(col);
            }
            cols.sort_unstable();
            key.extend(cols.iter().flatten());
        }
        key
    }
}

/// A largest subset of `x` whose pairwise squared distances are at most `2m`.
pub fn largest_bounded_subset(x: &CandidateClass, opts: &SubsetOptions) -> Result<BoundedSubset> {
    if !x.is_addable() {
        return Err(Error::Precondition(format!("{x} is not addable")));
    }
    let n = i64::from(x.n());
    let limit = 2 * i64::from(x.m()) * n * n;
    let size = x.size().ok_or(Error::Overflow("class size"))?;
    let done = |points: Vec<ScaledVector>, certificate| BoundedSubset {
        class: x.clone(),
        size: points.len(),
        points,
        certificate,
    };

    if x.internal_max_sq_num() <= limit {
        return Ok(done(x.enumerate(crate::class::DEFAULT_ENUMERATION_CAP)?, SubsetCertificate::WholeClass));
    }
    let built = construction(x)?;
    if let Some(c) = &built {
        if c.points.len() as u128 != c.bound {
            return Err(Error::Verification(format!(
                "construction {} for {x} has {} points, bound {}",
                c.name,
                c.points.len(),
                c.bound
            )));
        }
        if let Some((i, j)) = first_violation(&c.points, limit) {
            return Err(Error::Verification(format!(
                "construction {} for {x}: {:?} and {:?} too far apart",
                c.name, c.points[i], c.points[j]
            )));
        }
    }
    if size <= opts.exact_cap as u128 {
        let all = x.enumerate(size)?;
        let g = bounded_distance_graph(&all, limit);
        let r = g.max_clique_with_orbits(None, Some(&coordinate_orbit_key(&all)));
        let vertices = all.len();
        if let Some(c) = built.filter(|c| c.points.len() == r.vertices.len()) {
            return Ok(done(c.points, SubsetCertificate::BruteForceClique { vertices, construction: Some(c.name) }));
        }
        let pts = r.vertices.iter().map(|&i| all[i].clone()).collect();
        return Ok(done(pts, SubsetCertificate::BruteForceClique { vertices, construction: None }));
    }
    if let Some(c) = built {
        return Ok(done(c.points, SubsetCertificate::EkrConstruction { name: c.name, bound: c.bound }));
    }
    if size <= opts.budget_cap as u128 {
        let all = x.enumerate(size)?;
        let g = bounded_distance_graph(&all, limit);
        let r = g.max_clique_with_orbits(Some(opts.budget), Some(&coordinate_orbit_key(&all)));
        let vertices = all.len();
        let pts = r.vertices.iter().map(|&i| all[i].clone()).collect();
        let cert = if r.optimal {
            SubsetCertificate::BruteForceClique { vertices, construction: None }
        } else {
            SubsetCertificate::BudgetedClique { vertices }
        };
        return Ok(done(pts, cert));
    }
    Err(Error::Unsupported(format!("no certified method for the largest bounded subset of {x} ({size} points)")))
}
