//! Maximal 2-distance sets one dimension above `H̃(n,2)`.
//!
//! `Ĥ(n,2)` is `H̃(n,2)` with a zero last coordinate. Candidates carry one
//! block of the two-level pattern `((k/n)^{n-k+1}, (k/n-1)^{k-1})`, the other
//! block `(1/n)^n`, and last coordinate `±√beta_sq(n,k)`. `Y` puts the
//! pattern in the first block, `Z` in the second. `X_k^s` is `Y_k^s ∪ Z_k^-s`:
//! swapping the blocks also reflects the last coordinate. With equal signs
//! the two halves sit at squared distance `4(n-2)/n`, which is admissible
//! only for n ∈ {2, 4}.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::clique::BitGraph;
use crate::error::{Error, Result};
use crate::exact::{embed_hamming, quad_sq_dist, RootPoint, ScaledVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Kind {
    X,
    Y,
    Z,
}

/// `1 + 1/n - k + k²/n`; negative values mean no real last coordinate.
pub fn beta_sq(n: u32, k: u32) -> Ratio<i64> {
    let (n, k) = (i64::from(n), i64::from(k));
    Ratio::new(n + 1 - k * n + k * k, n)
}

/// A named family `Kind_k^sign` and its points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendedCandidate {
    pub kind: Kind,
    pub k: u32,
    pub sign: i8,
    #[serde(serialize_with = "ser_ratio")]
    pub beta_sq: Ratio<i64>,
    #[serde(skip)]
    pub members: Vec<RootPoint>,
}

fn ser_ratio<S: serde::Serializer>(q: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl ExtendedCandidate {
    pub fn name(&self) -> String {
        let sign = if self.sign > 0 { '+' } else { '-' };
        format!("{:?}_{}^{}", self.kind, self.k, sign)
    }
}

impl fmt::Display for ExtendedCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn check_n(n: u32) -> Result<()> {
    if !(2..=1024).contains(&n) {
        return Err(Error::Domain(format!("n = {n} outside 2..=1024")));
    }
    Ok(())
}

/// All arrangements of the two-level block for `k`, as numerators over `n`.
fn pattern_blocks(n: u32, k: u32) -> Vec<Vec<i32>> {
    let (ni, ki) = (n as i32, k as i32);
    (0..n as usize)
        .combinations(k as usize - 1)
        .map(|low| {
            let mut b = vec![ki; n as usize];
            for q in low {
                b[q] = ki - ni;
            }
            b
        })
        .collect()
}

fn members(n: u32, k: u32, kind: Kind, sign: i8) -> Result<Vec<RootPoint>> {
    let ones = vec![1; n as usize];
    let beta = beta_sq(n, k);
    // for k = 1 and k = n + 1 both blocks are all-ones and Y = Z
    let single = k == 1 || k == n + 1;
    let mut out = BTreeSet::new();
    for b in pattern_blocks(n, k) {
        if kind != Kind::Z {
            let nums = [b.clone(), ones.clone()].concat();
            out.insert(RootPoint::new(ScaledVector::new(n, 2, nums)?, beta, sign)?);
        }
        if kind != Kind::Y {
            let s = if kind == Kind::X && !single { -sign } else { sign };
            let nums = [ones.clone(), b.clone()].concat();
            out.insert(RootPoint::new(ScaledVector::new(n, 2, nums)?, beta, s)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// `Ĥ(n,2)`: the embedded words with last coordinate zero.
pub fn flat_hamming(n: u32) -> Result<Vec<RootPoint>> {
    Ok(embed_hamming(n, 2)?.into_iter().map(RootPoint::flat).collect())
}

fn is_two_or_four(x: &RootPoint, y: &RootPoint) -> Result<bool> {
    Ok(matches!(quad_sq_dist(x, y)?.as_integer(), Some(2 | 4)))
}

/// Every family `Kind_k^sign` with a real last coordinate whose points all
/// lie at squared distance 2 or 4 from every point of `Ĥ(n,2)`. When the last
/// coordinate is zero only the `+` family is listed.
pub fn admissible_candidates(n: u32) -> Result<Vec<ExtendedCandidate>> {
    check_n(n)?;
    let flat = flat_hamming(n)?;
    let mut out = Vec::new();
    for k in 1..=n + 1 {
        let beta = beta_sq(n, k);
        if beta.is_negative() {
            continue;
        }
        let signs: &[i8] = if beta.is_zero() { &[1] } else { &[1, -1] };
        for kind in [Kind::X, Kind::Y, Kind::Z] {
            for &sign in signs {
                let members = members(n, k, kind, sign)?;
                let mut ok = true;
                'outer: for x in &members {
                    for y in &flat {
                        if !is_two_or_four(x, y)? {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
                if ok {
                    out.push(ExtendedCandidate { kind, k, sign, beta_sq: beta, members });
                }
            }
        }
    }
    Ok(out)
}

/// One maximal addable set, or a family of them sharing the same support
/// and size.
#[derive(Clone, Debug, Serialize)]
pub struct ExtendedSet {
    /// `A ∪ B` when the set is a union of whole families, otherwise
    /// `subset of A ∪ B`.
    pub name: String,
    pub families: Vec<String>,
    pub size: usize,
    /// Number of maximal sets this entry stands for.
    pub count: usize,
    pub whole_families: bool,
    #[serde(skip)]
    pub representative: Vec<RootPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendedReport {
    pub n: u32,
    pub candidates: Vec<ExtendedCandidate>,
    pub universe: usize,
    pub sets: Vec<ExtendedSet>,
}

/// The distinct points of all admissible families, in a fixed order.
pub fn candidate_universe(candidates: &[ExtendedCandidate]) -> Vec<RootPoint> {
    candidates
        .iter()
        .flat_map(|c| c.members.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Graph on the universe with an edge when the squared distance is 2 or 4.
pub fn candidate_graph(universe: &[RootPoint]) -> Result<BitGraph> {
    let mut g = BitGraph::new(universe.len());
    for i in 0..universe.len() {
        for j in i + 1..universe.len() {
            if is_two_or_four(&universe[i], &universe[j])? {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// Smallest list of family names covering `set`, preferring `X` over the
/// pair `Y`, `Z`. `None` if `set` is not a union of whole families.
fn cover_by_families(set: &BTreeSet<usize>, families: &[Family]) -> Option<Vec<String>> {
    let mut covered = BTreeSet::new();
    let mut used = Vec::new();
    for fam in families {
        if fam.points.is_subset(set) && !fam.points.is_subset(&covered) {
            covered.extend(fam.points.iter().copied());
            used.push(fam);
        }
    }
    used.sort_by_key(|f| f.order);
    (covered == *set).then(|| used.into_iter().map(|f| f.name.clone()).collect())
}

struct Family {
    name: String,
    points: BTreeSet<usize>,
    /// display order inside a union: by k, then kind, `+` first
    order: (u32, Kind, std::cmp::Reverse<i8>),
}

/// Maximal subsets (at least two points) of the admissible candidates with
/// every pairwise squared distance in {2, 4}. Sets that are unions of whole
/// families are listed one by one; the rest are grouped by the families they
/// touch and their size.
pub fn classify_extended(n: u32) -> Result<ExtendedReport> {
    let candidates = admissible_candidates(n)?;
    let universe = candidate_universe(&candidates);
    let index: BTreeMap<&RootPoint, usize> = universe.iter().enumerate().map(|(i, p)| (p, i)).collect();
    // X families first so the cover prefers them
    let mut families: Vec<Family> = candidates
        .iter()
        .map(|c| Family {
            name: c.name(),
            points: c.members.iter().map(|p| index[p]).collect(),
            order: (c.k, c.kind, std::cmp::Reverse(c.sign)),
        })
        .collect();
    families.sort_by_key(|f| (std::cmp::Reverse(f.points.len()), f.order));

    let g = candidate_graph(&universe)?;
    let mut listed = Vec::new();
    let mut grouped: BTreeMap<(Vec<String>, usize), ExtendedSet> = BTreeMap::new();
    for clique in g.maximal_cliques() {
        if clique.len() < 2 {
            continue;
        }
        let set: BTreeSet<usize> = clique.iter().copied().collect();
        let points: Vec<RootPoint> = clique.iter().map(|&i| universe[i].clone()).collect();
        if let Some(names) = cover_by_families(&set, &families) {
            listed.push(ExtendedSet {
                name: names.join(" ∪ "),
                families: names,
                size: set.len(),
                count: 1,
                whole_families: true,
                representative: points,
            });
            continue;
        }
        // support: the families with a point in the set, reduced to a cover
        let touched: BTreeSet<usize> = families
            .iter()
            .filter(|f| !f.points.is_disjoint(&set))
            .flat_map(|f| f.points.iter().copied())
            .collect();
        let support = cover_by_families(&touched, &families).expect("union of families");
        grouped
            .entry((support.clone(), set.len()))
            .and_modify(|e| e.count += 1)
            .or_insert_with(|| ExtendedSet {
                name: format!("subset of {}", support.join(" ∪ ")),
                families: support,
                size: set.len(),
                count: 1,
                whole_families: false,
                representative: points,
            });
    }
    // whole-family unions that are also selections count with the selections
    listed.retain(|s| {
        let absorbed = grouped.iter_mut().find(|((support, size), _)| {
            *size == s.size && s.representative.iter().all(|p| {
                families.iter().any(|f| support.contains(&f.name) && f.points.contains(&index[p]))
            })
        });
        match absorbed {
            Some((_, group)) => {
                group.count += 1;
                false
            }
            None => true,
        }
    });
    listed.sort_by(|a, b| (a.size, &a.name).cmp(&(b.size, &b.name)));
    listed.extend(grouped.into_values());
    Ok(ExtendedReport { n, universe: universe.len(), candidates, sets: listed })
}

/// Dimension of the affine hull, computed exactly. Irrational last
/// coordinates must share one squarefree radicand (they are rescaled by it,
/// which preserves rank).
pub fn affine_rank(points: &[RootPoint]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::EmptyInput("affine_rank needs a point".into()));
    };
    let dim = first.rational.nums().len();
    let mut radicand: Option<Ratio<i64>> = None;
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(points.len());
    for p in points {
        if p.rational.nums().len() != dim {
            return Err(Error::Dimension {
                left: format!("{dim} coordinates"),
                right: format!("{} coordinates", p.rational.nums().len()),
            });
        }
        let last = if p.beta_sq.is_zero() {
            BigRational::zero()
        } else {
            // beta_sq = q² · r with r fixed across the set
            let r = *radicand.get_or_insert(p.beta_sq);
            let ratio = p.beta_sq / r;
            let root = rational_sqrt(ratio).ok_or_else(|| {
                Error::Unsupported(format!("last coordinates √{} and √{} are not commensurable", r, p.beta_sq))
            })?;
            root * BigRational::from_integer(BigInt::from(p.sign))
        };
        let mut row: Vec<BigRational> = p
            .rational
            .nums()
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        row.push(last);
        rows.push(row);
    }
    let base = rows[0].clone();
    let mut diffs: Vec<Vec<BigRational>> = rows[1..]
        .iter()
        .map(|r| r.iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect();
    Ok(row_rank(&mut diffs))
}

fn rational_sqrt(q: Ratio<i64>) -> Option<BigRational> {
    let root = |v: i64| {
        let s = (v as f64).sqrt().round() as i64;
        (s * s == v).then_some(s)
    };
    Some(BigRational::new(root(*q.numer())?.into(), root(*q.denom())?.into()))
}

fn row_rank(rows: &mut [Vec<BigRational>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot;
                let (head, tail) = rows.split_at_mut(r.max(rank));
                let (src, dst) = if r < rank { (&tail[0], &mut head[r]) } else { (&head[rank], &mut tail[0]) };
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= &f * s;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(report: &ExtendedReport) -> Vec<(String, usize, usize)> {
        report.sets.iter().map(|s| (s.name.clone(), s.size, s.count)).collect()
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta_sq(4, 3), Ratio::new(1, 2));
        assert_eq!(beta_sq(8, 1), Ratio::new(1, 4));
        assert_eq!(beta_sq(8, 9), Ratio::new(9, 4));
        assert_eq!(beta_sq(6, 3), Ratio::new(-1, 3));
        assert!(beta_sq(5, 2).is_zero() && beta_sq(5, 3).is_zero());
    }

    #[test]
    fn admissible_k_for_large_n() {
        for n in 6..=12 {
            let ks: BTreeSet<u32> = admissible_candidates(n).unwrap().iter().map(|c| c.k).collect();
            assert_eq!(ks, BTreeSet::from([1, n - 1, n, n + 1]), "n = {n}");
        }
    }

    #[test]
    fn member_counts() {
        for c in admissible_candidates(5).unwrap() {
            let per_layout = pattern_blocks(5, c.k).len();
            let expected = match (c.kind, c.k) {
                (_, 1) | (_, 6) => 1,
                (Kind::X, _) => 2 * per_layout,
                _ => per_layout,
            };
            assert_eq!(c.members.len(), expected, "{c}");
        }
        let c = admissible_candidates(3).unwrap();
        let x2 = c.iter().find(|c| c.name() == "X_2^+").unwrap();
        assert_eq!(x2.members.len(), 6);
    }

    #[test]
    fn eight_uses_both_ends() {
        let r = classify_extended(8).unwrap();
        let n = names(&r);
        assert!(n.contains(&("X_1^+ ∪ X_9^-".into(), 2, 1)), "{n:?}");
        assert!(n.contains(&("X_1^- ∪ X_9^+".into(), 2, 1)), "{n:?}");
    }

    #[test]
    fn four_has_selection_family() {
        let r = classify_extended(4).unwrap();
        let sel: Vec<_> = r.sets.iter().filter(|s| !s.whole_families).collect();
        assert_eq!(sel.len(), 1);
        assert_eq!(sel[0].size, 12);
        assert_eq!(sel[0].count, 4096);
        assert_eq!(sel[0].families, vec!["X_3^+".to_string(), "X_3^-".to_string()]);
    }

    #[test]
    fn five_rank() {
        let r = classify_extended(5).unwrap();
        let set = r.sets.iter().find(|s| s.name == "Y_2^+ ∪ Z_3^+").unwrap();
        assert_eq!(set.size, 15);
        let mut pts = set.representative.clone();
        pts.extend(flat_hamming(5).unwrap());
        assert_eq!(affine_rank(&pts).unwrap(), 8);
    }

    #[test]
    fn rank_basics() {
        let flat = flat_hamming(3).unwrap();
        assert_eq!(affine_rank(&flat).unwrap(), 4);
        let c = admissible_candidates(3).unwrap();
        let mut pts = flat.clone();
        pts.push(c.iter().find(|c| c.name() == "Y_3^+").unwrap().members[0].clone());
        assert_eq!(affine_rank(&pts).unwrap(), 5);
        assert!(affine_rank(&[]).is_err());
    }

    #[test]
    fn reported_sets_are_maximal() {
        for n in [3, 4, 5] {
            let r = classify_extended(n).unwrap();
            let universe = candidate_universe(&r.candidates);
            for set in &r.sets {
                for p in &universe {
                    if set.representative.contains(p) {
                        continue;
                    }
                    let extends = set.representative.iter().all(|q| is_two_or_four(p, q).unwrap());
                    assert!(!extends, "n = {n}: {} extends by {p:?}", set.name);
                }
            }
        }
    }

    #[test]
    fn largest_family_completes_johnson() {
        for n in 3..=7 {
            let c = admissible_candidates(n).unwrap();
            let x = c.iter().find(|c| c.kind == Kind::X && c.k == n - 1 && c.sign == 1).unwrap();
            let mut pts = flat_hamming(n).unwrap();
            pts.extend(x.members.iter().cloned());
            let n = n as usize;
            assert_eq!(pts.len(), n * (2 * n - 1));
            let mut seen = BTreeSet::new();
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    seen.insert(quad_sq_dist(&pts[i], &pts[j]).unwrap().as_integer().unwrap());
                }
            }
            assert_eq!(seen, BTreeSet::from([2, 4]));
        }
    }

    #[test]
    fn four_selection_takes_one_of_each_pair() {
        let r = classify_extended(4).unwrap();
        let sel = r.sets.iter().find(|s| !s.whole_families).unwrap();
        // (x, +) and (y, -) pair up when y is x with 3 and -1 swapped
        let partner = |p: &RootPoint| {
            let nums = p.rational.nums().iter().map(|&v| if v == 3 { -1 } else if v == -1 { 3 } else { v }).collect();
            RootPoint::new(ScaledVector::new(4, 2, nums).unwrap(), p.beta_sq, -p.sign).unwrap()
        };
        for p in &sel.representative {
            assert!(!sel.representative.contains(&partner(p)));
        }
    }
}
