//! The class compatibility graph, assembled sets and exact verification of
//! `S ∪ H̃(n,m)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::class::{CandidateClass, DEFAULT_ENUMERATION_CAP};
use crate::clique::BitGraph;
use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::exact::{embed_hamming, hamming_size, sq_num, ScaledVector, SquaredDistance};
use crate::families::{coordinate_orbit_key, largest_bounded_subset, product, BoundedSubset, SubsetCertificate, SubsetOptions};
use crate::search::enumerate_addable_classes;

/// Random pairs drawn by [`VerifyMode::Fast`] when a pair range is too large.
pub const SAMPLE_PAIRS: u64 = 1_000_000;
/// `H̃ × H̃` is checked pair by pair up to this many embedded points.
pub const DIRECT_HAMMING_POINTS: u64 = 2_000;
const SAMPLE_SEED: u64 = 0x005e_ed0f_4d15;

/// True when `num / n²` is one of `2, 4, .., 2m`.
fn admissible_num(num: i64, n: u32, m: u32) -> bool {
    let den = i64::from(n) * i64::from(n);
    num % den == 0 && {
        let v = num / den;
        v > 0 && v % 2 == 0 && v <= 2 * i64::from(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Compatibility {
    None,
    /// Some pair of members is at an admissible distance.
    Some,
    /// Every pair of members is.
    All,
}

/// Whether members of two distinct classes can be added together.
pub fn pair_compatible(x: &CandidateClass, y: &CandidateClass) -> Result<Compatibility> {
    if x.n() != y.n() || x.m() != y.m() {
        return Err(Error::Dimension {
            left: format!("{x}"),
            right: format!("{y}"),
        });
    }
    if x == y {
        return Err(Error::Precondition(format!("pair_compatible needs distinct classes, got {x} twice")));
    }
    let (n, m) = (x.n(), x.m());
    if !admissible_num(x.canonical_sq_num(y), n, m) {
        Ok(Compatibility::None)
    } else if admissible_num(x.cross_max_sq_num(y), n, m) {
        Ok(Compatibility::All)
    } else {
        Ok(Compatibility::Some)
    }
}

/// Addable classes joined when their canonical elements are compatible.
#[derive(Clone, Debug)]
pub struct CompatibilityGraph {
    n: u32,
    m: u32,
    vertices: Vec<CandidateClass>,
    kinds: Vec<Vec<Compatibility>>,
    graph: BitGraph,
}

impl CompatibilityGraph {
    /// The graph over all addable classes of `(n, m)`.
    pub fn build(n: u32, m: u32) -> Result<Self> {
        Self::from_classes(n, m, enumerate_addable_classes(n, m)?.all())
    }

    pub fn from_classes(n: u32, m: u32, mut vertices: Vec<CandidateClass>) -> Result<Self> {
        vertices.sort();
        vertices.dedup();
        if let Some(x) = vertices.iter().find(|x| x.n() != n || x.m() != m) {
            return Err(Error::Dimension {
                left: format!("{x}"),
                right: format!("(n, m) = ({n}, {m})"),
            });
        }
        let len = vertices.len();
        let rows: Vec<Vec<Compatibility>> = (0..len)
            .into_par_iter()
            .map(|i| {
                (0..len)
                    .map(|j| {
                        if i == j {
                            Compatibility::None
                        } else {
                            pair_compatible(&vertices[i], &vertices[j]).expect("checked frame")
                        }
                    })
                    .collect()
            })
            .collect();
        let graph = BitGraph::from_fn(len, |i, j| rows[i][j] != Compatibility::None);
        Ok(Self { n, m, vertices, kinds: rows, graph })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn vertices(&self) -> &[CandidateClass] {
        &self.vertices
    }

    pub fn graph(&self) -> &BitGraph {
        &self.graph
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn compatibility(&self, i: usize, j: usize) -> Compatibility {
        self.kinds[i][j]
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertices.len()).map(|i| self.graph.degree(i)).sum::<usize>() / 2
    }

    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        self.graph.maximal_cliques()
    }

    /// One representative per block-permutation orbit of maximal cliques,
    /// in the form given by [`clique_orbit_key`], sorted.
    pub fn clique_orbits(&self) -> Vec<Vec<CandidateClass>> {
        let keys: BTreeSet<Vec<CandidateClass>> = self
            .maximal_cliques()
            .iter()
            .map(|c| {
                let classes: Vec<CandidateClass> = c.iter().map(|&i| self.vertices[i].clone()).collect();
                clique_orbit_key(&classes)
            })
            .collect();
        keys.into_iter().collect()
    }
}

/// Smallest sorted image of a set of classes under the block permutations.
pub fn clique_orbit_key(classes: &[CandidateClass]) -> Vec<CandidateClass> {
    let Some(first) = classes.first() else { return Vec::new() };
    let m = first.m() as usize;
    (0..m)
        .permutations(m)
        .map(|p| {
            let mut v: Vec<CandidateClass> = classes.iter().map(|c| c.permute_blocks(&p)).collect();
            v.sort();
            v
        })
        .min()
        .expect("at least one permutation")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// Exhaustive where cheap; `SAMPLE_PAIRS` random pairs otherwise.
    Fast,
    /// Every pair involving an added point.
    Full,
}

impl FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Self::Fast),
            "full" => Ok(Self::Full),
            _ => Err(Error::Parse(format!("verification mode must be fast or full, got {s:?}"))),
        }
    }
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fast => "fast",
            Self::Full => "full",
        })
    }
}

/// A point of `S ∪ H̃(n,m)`: an index into `S` or a word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointRef {
    Added(usize),
    Hamming(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub left: PointRef,
    pub right: PointRef,
    pub sq_dist: SquaredDistance,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} and {:?} at squared distance {}", self.left, self.right, self.sq_dist)
    }
}

/// Outcome of [`verify_union`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnionCertificate {
    pub mode: VerifyMode,
    pub passed: bool,
    /// `|S| + n^m`.
    pub size: u64,
    /// Pairs counted per squared distance. Sampled ranges contribute only
    /// the pairs drawn; `H̃ × H̃` above the direct threshold is counted in
    /// closed form.
    pub distances: BTreeMap<u64, u128>,
    pub pairs_checked: u128,
    pub sampled: bool,
    pub hamming_closed_form: bool,
    pub witness: Option<Witness>,
}

/// Per-range tally: counts indexed by `d² / 2`, plus the first bad pair.
struct Tally {
    counts: Vec<u128>,
    checked: u128,
    witness: Option<Witness>,
}

impl Tally {
    fn new(m: u32) -> Self {
        Self { counts: vec![0; m as usize + 1], checked: 0, witness: None }
    }

    /// Records a pair; returns false on a forbidden distance.
    fn record(&mut self, num: i64, n: u32, m: u32, left: impl FnOnce() -> PointRef, right: impl FnOnce() -> PointRef) -> bool {
        self.checked += 1;
        if admissible_num(num, n, m) {
            self.counts[(num / (i64::from(n) * i64::from(n)) / 2) as usize] += 1;
            true
        } else {
            if self.witness.is_none() {
                self.witness = Some(Witness {
                    left: left(),
                    right: right(),
                    sq_dist: SquaredDistance::new(num, u64::from(n) * u64::from(n)),
                });
            }
            false
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.checked += other.checked;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self
    }
}

/// Per-block coordinate numerators of `x` as `i64`.
fn block_values(x: &ScaledVector) -> Vec<Vec<i64>> {
    x.blocks().map(|b| b.iter().map(|&v| i64::from(v)).collect()).collect()
}

/// `n² d²(x, φ(w)) = |X|² + m n² - 2n Σ_j X_{j, w_j}`.
fn hamming_num(norm: i64, n: u32, m: u32, s: i64) -> i64 {
    let n = i64::from(n);
    norm + i64::from(m) * n * n - 2 * n * s
}

fn word_sum(values: &[Vec<i64>], word: &[u32]) -> i64 {
    values.iter().zip(word).map(|(b, &q)| b[q as usize]).sum()
}

/// Every word of `H̃` against `x`, through an odometer that keeps the sum
/// `Σ_j X_{j, w_j}` up to date.
fn scan_hamming_full(x: &ScaledVector, idx: usize, n: u32, m: u32) -> Tally {
    let values = block_values(x);
    let norm = x.norm_sq_num();
    let lo: i64 = values.iter().map(|b| *b.iter().min().expect("n ≥ 1")).sum();
    let hi: i64 = values.iter().map(|b| *b.iter().max().expect("n ≥ 1")).sum();
    let mut hist = vec![0u64; (hi - lo + 1) as usize];
    let mut word = vec![0u32; m as usize];
    let mut s = word_sum(&values, &word);
    let last = m as usize - 1;
    'words: loop {
        hist[(s - lo) as usize] += 1;
        let mut j = last;
        loop {
            let q = word[j] as usize;
            if q + 1 < n as usize {
                s += values[j][q + 1] - values[j][q];
                word[j] += 1;
                continue 'words;
            }
            s += values[j][0] - values[j][q];
            word[j] = 0;
            if j == 0 {
                break 'words;
            }
            j -= 1;
        }
    }
    let mut tally = Tally::new(m);
    for (off, &count) in hist.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let s = lo + off as i64;
        let num = hamming_num(norm, n, m, s);
        if admissible_num(num, n, m) {
            tally.counts[(num / (i64::from(n) * i64::from(n)) / 2) as usize] += u128::from(count);
            tally.checked += u128::from(count);
        } else {
            tally.checked += u128::from(count);
            if tally.witness.is_none() {
                let mut found = None;
                crate::exact::for_each_word(n, m, |w| {
                    if found.is_none() && word_sum(&values, w) == s {
                        found = Some(w.to_vec());
                    }
                });
                tally.witness = Some(Witness {
                    left: PointRef::Added(idx),
                    right: PointRef::Hamming(found.expect("sum was attained")),
                    sq_dist: SquaredDistance::new(num, u64::from(n) * u64::from(n)),
                });
            }
        }
    }
    tally
}

fn random_word(rng: &mut ChaCha8Rng, n: u32, m: u32) -> Vec<u32> {
    (0..m).map(|_| rng.gen_range(0..n)).collect()
}

/// Exact check that `S ∪ H̃(n,m)` is an `m`-distance set with every squared
/// distance in `{2, 4, .., 2m}`.
pub fn verify_union(points: &[ScaledVector], n: u32, m: u32, mode: VerifyMode) -> Result<UnionCertificate> {
    if n < 2 || m < 1 {
        return Err(Error::Domain(format!("verification needs n ≥ 2 and m ≥ 1, got ({n}, {m})")));
    }
    if let Some(p) = points.iter().find(|p| p.n() != n || p.m() != m) {
        return Err(Error::Dimension {
            left: format!("point {p:?}"),
            right: format!("(n, m) = ({n}, {m})"),
        });
    }
    let h = hamming_size(n, m).ok_or(Error::Overflow("n^m"))?;
    let s = points.len() as u64;
    let mut sampled = false;

    // S × S
    let inner_pairs = s * s.saturating_sub(1) / 2;
    let inner = if mode == VerifyMode::Full || inner_pairs <= 20 * SAMPLE_PAIRS {
        (0..points.len())
            .into_par_iter()
            .map(|i| {
                let mut t = Tally::new(m);
                for j in i + 1..points.len() {
                    t.record(
                        sq_num(points[i].nums(), points[j].nums()),
                        n,
                        m,
                        || PointRef::Added(i),
                        || PointRef::Added(j),
                    );
                }
                t
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Tally::new(m), Tally::merge)
    } else {
        sampled = true;
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let mut t = Tally::new(m);
        for _ in 0..SAMPLE_PAIRS {
            let i = rng.gen_range(0..points.len());
            let mut j = rng.gen_range(0..points.len() - 1);
            if j >= i {
                j += 1;
            }
            let (i, j) = (i.min(j), i.max(j));
            t.record(sq_num(points[i].nums(), points[j].nums()), n, m, || PointRef::Added(i), || PointRef::Added(j));
        }
        t
    };

    // S × H̃
    let cross_pairs = u128::from(s) * u128::from(h);
    let cross = if mode == VerifyMode::Full || cross_pairs <= u128::from(SAMPLE_PAIRS) {
        (0..points.len())
            .into_par_iter()
            .map(|i| scan_hamming_full(&points[i], i, n, m))
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Tally::new(m), Tally::merge)
    } else {
        sampled = true;
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 1);
        let values: Vec<(i64, Vec<Vec<i64>>)> = points.iter().map(|p| (p.norm_sq_num(), block_values(p))).collect();
        let mut t = Tally::new(m);
        for _ in 0..SAMPLE_PAIRS {
            let i = rng.gen_range(0..points.len());
            let w = random_word(&mut rng, n, m);
            let (norm, vals) = &values[i];
            let num = hamming_num(*norm, n, m, word_sum(vals, &w));
            t.record(num, n, m, || PointRef::Added(i), || PointRef::Hamming(w.clone()));
        }
        t
    };

    // H̃ × H̃
    let hamming_closed_form = h > DIRECT_HAMMING_POINTS;
    let base = if hamming_closed_form {
        // h^m C(m, k) (n-1)^k / 2 pairs at Hamming distance k
        let mut t = Tally::new(m);
        for k in 1..=m {
            let c = u128::from(h) * binomial(u64::from(m), u64::from(k)) * u128::from(n - 1).pow(k) / 2;
            t.counts[k as usize] += c;
            t.checked += c;
        }
        t
    } else {
        let ham = embed_hamming(n, m)?;
        let mut t = Tally::new(m);
        let mut words = Vec::with_capacity(ham.len());
        crate::exact::for_each_word(n, m, |w| words.push(w.to_vec()));
        for i in 0..ham.len() {
            for j in i + 1..ham.len() {
                t.record(
                    sq_num(ham[i].nums(), ham[j].nums()),
                    n,
                    m,
                    || PointRef::Hamming(words[i].clone()),
                    || PointRef::Hamming(words[j].clone()),
                );
            }
        }
        t
    };

    let all = inner.merge(cross).merge(base);
    let distances: BTreeMap<u64, u128> = all
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (2 * k as u64, c))
        .collect();
    let passed = all.witness.is_none() && distances.len() == m as usize;
    Ok(UnionCertificate {
        mode,
        passed,
        size: s + h,
        distances,
        pairs_checked: all.checked,
        sampled,
        hamming_closed_form,
        witness: all.witness,
    })
}

/// How one part of an assembled set was chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComponentMethod {
    /// Largest bounded subset of a single class.
    Subset { certificate: SubsetCertificate },
    /// Maximum clique over the members of several classes whose pairwise
    /// compatibility is only partial.
    UnionClique { vertices: usize, optimal: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub classes: Vec<CandidateClass>,
    pub size: usize,
    pub method: ComponentMethod,
}

impl Component {
    pub fn is_certified(&self) -> bool {
        match &self.method {
            ComponentMethod::Subset { certificate } => certificate.is_certified(),
            ComponentMethod::UnionClique { optimal, .. } => *optimal,
        }
    }
}

/// Points added to `H̃(n,m)` from one maximal clique of the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssembledSet {
    pub n: u32,
    pub m: u32,
    pub clique: Vec<CandidateClass>,
    pub components: Vec<Component>,
    #[serde(skip)]
    pub points: Vec<ScaledVector>,
    pub added: usize,
    pub total: u64,
    pub verified: bool,
    /// Every component is provably largest.
    pub certified: bool,
    pub certificate: UnionCertificate,
}

#[derive(Clone, Debug)]
pub struct AssemblyOptions {
    pub subset: SubsetOptions,
    /// Largest union of partially compatible classes searched exactly.
    pub union_cap: usize,
    pub verify: VerifyMode,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { subset: SubsetOptions::default(), union_cap: 2_000, verify: VerifyMode::Fast }
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut i = i;
    while parent[i] != r {
        let next = parent[i];
        parent[i] = r;
        i = next;
    }
    r
}

/// Memo of largest bounded subsets, shared across cliques.
pub type SubsetCache = HashMap<CandidateClass, BoundedSubset>;

/// Substitutes a largest admissible subset for the classes of one clique
/// and verifies the union exactly.
pub fn assemble_clique(classes: &[CandidateClass], opts: &AssemblyOptions, cache: &mut SubsetCache) -> Result<AssembledSet> {
    let first = classes.first().ok_or_else(|| Error::EmptyInput("empty clique".into()))?;
    let (n, m) = (first.n(), first.m());
    let k = classes.len();
    // classes joined by partial compatibility must be solved together
    let mut parent: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in i + 1..k {
            match pair_compatible(&classes[i], &classes[j])? {
                Compatibility::None => {
                    return Err(Error::Precondition(format!("{} and {} are not adjacent", classes[i], classes[j])))
                }
                Compatibility::Some => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                Compatibility::All => {}
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }

    let mut components = Vec::new();
    let mut points = Vec::new();
    for members in groups.values() {
        if let [i] = members[..] {
            let x = &classes[i];
            if !cache.contains_key(x) {
                cache.insert(x.clone(), largest_bounded_subset(x, &opts.subset)?);
            }
            let sub = &cache[x];
            points.extend(sub.points.iter().cloned());
            components.push(Component {
                classes: vec![x.clone()],
                size: sub.size,
                method: ComponentMethod::Subset { certificate: sub.certificate.clone() },
            });
            continue;
        }
        let group: Vec<CandidateClass> = members.iter().map(|&i| classes[i].clone()).collect();
        let total: u128 = group.iter().map(|x| x.size().unwrap_or(u128::MAX)).fold(0, u128::saturating_add);
        if total > opts.union_cap as u128 {
            return Err(Error::Unsupported(format!(
                "partially compatible classes with {total} members exceed the union cap {}",
                opts.union_cap
            )));
        }
        let mut all = Vec::with_capacity(total as usize);
        for x in &group {
            all.extend(x.enumerate(DEFAULT_ENUMERATION_CAP)?);
        }
        let g = BitGraph::from_fn(all.len(), |i, j| admissible_num(sq_num(all[i].nums(), all[j].nums()), n, m));
        let r = g.max_clique_with_orbits(Some(opts.subset.budget), Some(&coordinate_orbit_key(&all)));
        points.extend(r.vertices.iter().map(|&i| all[i].clone()));
        components.push(Component {
            classes: group,
            size: r.vertices.len(),
            method: ComponentMethod::UnionClique { vertices: all.len(), optimal: r.optimal },
        });
    }
    points.sort();
    let certificate = verify_union(&points, n, m, opts.verify)?;
    if !certificate.passed {
        let what = certificate.witness.as_ref().map_or("fewer than m distances".to_string(), ToString::to_string);
        return Err(Error::Verification(format!("assembled set for clique {classes:?}: {what}")));
    }
    let added = points.len();
    let h = hamming_size(n, m).ok_or(Error::Overflow("n^m"))?;
    Ok(AssembledSet {
        n,
        m,
        clique: classes.to_vec(),
        certified: components.iter().all(Component::is_certified),
        components,
        points,
        added,
        total: h + added as u64,
        verified: true,
        certificate,
    })
}

/// One assembled set per orbit of maximal cliques.
pub fn assemble(n: u32, m: u32, opts: &AssemblyOptions) -> Result<Vec<AssembledSet>> {
    let graph = CompatibilityGraph::build(n, m)?;
    let mut cache = SubsetCache::new();
    graph.clique_orbits().iter().map(|c| assemble_clique(c, opts, &mut cache)).collect()
}

/// Everything known about `(n, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub n: u32,
    pub m: u32,
    /// Affine dimension `m(n - 1)`.
    pub d: u32,
    pub hamming: u64,
    pub maximal: bool,
    pub classes: Vec<CandidateClass>,
    pub cliques: Vec<Vec<CandidateClass>>,
    pub assembled: Vec<AssembledSet>,
    pub largest_total: u64,
}

impl ClassificationReport {
    /// `n,d,total` as in the summary tables.
    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.n, self.d, self.largest_total)
    }

    /// Totals of the assembled sets, ascending.
    pub fn totals(&self) -> Vec<u64> {
        let mut t: Vec<u64> = self.assembled.iter().map(|a| a.total).collect();
        t.sort_unstable();
        t
    }
}

pub fn classify(n: u32, m: u32, opts: &AssemblyOptions) -> Result<ClassificationReport> {
    let hamming = hamming_size(n, m).ok_or(Error::Overflow("n^m"))?;
    let graph = CompatibilityGraph::build(n, m)?;
    let cliques = graph.clique_orbits();
    let mut cache = SubsetCache::new();
    let assembled = cliques
        .iter()
        .map(|c| assemble_clique(c, opts, &mut cache))
        .collect::<Result<Vec<_>>>()?;
    let largest_total = assembled.iter().map(|a| a.total).max().unwrap_or(hamming);
    Ok(ClassificationReport {
        n,
        m,
        d: m * (n - 1),
        hamming,
        maximal: graph.is_empty(),
        classes: graph.vertices().to_vec(),
        cliques,
        assembled,
        largest_total,
    })
}

/// Largest total over the assembled sets, and whether `H̃(n,m)` is maximal.
pub fn largest_total(n: u32, m: u32) -> Result<(u64, bool)> {
    let r = classify(n, m, &AssemblyOptions::default())?;
    Ok((r.largest_total, r.maximal))
}

/// Per-block choices; the points are all their combinations.
pub type Selection = Vec<Vec<Vec<i32>>>;

/// `(x_1, .., x_n)^C`: the distinct cyclic shifts of a block.
pub fn cyclic_shifts(block: &[i32]) -> Vec<Vec<i32>> {
    let mut out: Vec<Vec<i32>> = Vec::new();
    for i in 0..block.len() {
        let v: Vec<i32> = block[i..].iter().chain(&block[..i]).copied().collect();
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// `(X_1, .., X_k)^C`: the cyclic rotations of a tuple of block choices.
pub fn rotate_blocks(sel: &Selection) -> Vec<Selection> {
    (0..sel.len())
        .map(|i| sel[i..].iter().chain(&sel[..i]).cloned().collect())
        .collect()
}

/// `(X_1, X_2, X_3, X_4)^{(1 2)(3 4)}`.
pub fn swap_pairs(sel: &Selection) -> Result<Vec<Selection>> {
    if sel.len() != 4 {
        return Err(Error::Domain(format!("(1 2)(3 4) acts on four blocks, got {}", sel.len())));
    }
    let swapped = vec![sel[1].clone(), sel[0].clone(), sel[3].clone(), sel[2].clone()];
    Ok(vec![sel.clone(), swapped])
}

/// Union of the products of several selections, sorted and deduplicated.
pub fn selection_points(n: u32, sels: &[Selection]) -> Vec<ScaledVector> {
    let set: BTreeSet<ScaledVector> = sels.iter().flat_map(|s| product(n, s)).collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CandidateClass {
        s.parse().unwrap()
    }

    #[test]
    fn compatibility_examples() {
        let a = c("((2^4,-3)^P,1^5)/5");
        assert_eq!(pair_compatible(&a, &c("(1^5,(3^3,-2^2)^P)/5")).unwrap(), Compatibility::All);
        assert_eq!(pair_compatible(&a, &c("((3^3,-2^2)^P,1^5)/5")).unwrap(), Compatibility::None);
        let x = c("((3,0^2)^P,1^3,1^3,(4,1,-2)^P)/3");
        let y = c("(1^3,(3,0^2)^P,1^3,(5,-1^2)^P)/3");
        assert_eq!(pair_compatible(&x, &y).unwrap(), Compatibility::Some);
        assert!(pair_compatible(&x, &x).is_err());
    }

    #[test]
    fn all_pairs_brute_force() {
        let g = CompatibilityGraph::build(3, 3).unwrap();
        for i in 0..g.vertices().len() {
            for j in 0..g.vertices().len() {
                if i == j {
                    continue;
                }
                let (x, y) = (&g.vertices()[i], &g.vertices()[j]);
                let xs = x.enumerate(1000).unwrap();
                let ys = y.enumerate(1000).unwrap();
                let ok: Vec<bool> = xs
                    .iter()
                    .flat_map(|p| ys.iter().map(move |q| admissible_num(sq_num(p.nums(), q.nums()), 3, 3)))
                    .collect();
                let expect = if ok.iter().all(|&b| b) {
                    Compatibility::All
                } else if ok.iter().any(|&b| b) {
                    Compatibility::Some
                } else {
                    Compatibility::None
                };
                assert_eq!(g.compatibility(i, j), expect, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn verify_hamming_alone_and_forty_points() {
        let cert = verify_union(&[], 5, 2, VerifyMode::Full).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.distances, BTreeMap::from([(2, 100), (4, 200)]));
        let sets = assemble(5, 2, &AssemblyOptions::default()).unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].total, 40);
        let full = verify_union(&sets[0].points, 5, 2, VerifyMode::Full).unwrap();
        assert!(full.passed);
        assert_eq!(full.pairs_checked, 40 * 39 / 2);
    }

    #[test]
    fn verify_reports_witness() {
        let bad = vec![
            c("((2^4,-3)^P,1^5)/5").canonical_element(),
            c("((3^3,-2^2)^P,1^5)/5").canonical_element(),
        ];
        let cert = verify_union(&bad, 5, 2, VerifyMode::Full).unwrap();
        assert!(!cert.passed);
        let w = cert.witness.unwrap();
        assert_eq!(w.sq_dist, SquaredDistance::new(4, 5));
        assert_eq!((w.left, w.right), (PointRef::Added(0), PointRef::Added(1)));
    }

    #[test]
    fn closed_form_hamming_counts() {
        // above the direct threshold the closed form must match the exact histogram
        let cert = verify_union(&[], 7, 4, VerifyMode::Full).unwrap();
        assert!(cert.hamming_closed_form);
        let pts = embed_hamming(7, 4).unwrap();
        let mut want = BTreeMap::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                *want.entry(sq_num(pts[i].nums(), pts[j].nums()) as u64 / 49).or_insert(0u128) += 1;
            }
        }
        assert_eq!(cert.distances, want);
    }

    #[test]
    fn full_scan_agrees_with_direct_distances() {
        let x = c("((4,1,-2)^P,1^3,1^3)/3").canonical_element();
        let t = scan_hamming_full(&x, 0, 3, 3);
        let mut direct = Tally::new(3);
        for y in embed_hamming(3, 3).unwrap() {
            direct.record(sq_num(x.nums(), y.nums()), 3, 3, || PointRef::Added(0), || PointRef::Added(0));
        }
        assert_eq!(t.counts, direct.counts);
        assert!(t.witness.is_none());
    }

    #[test]
    fn orbit_keys_identify_block_permutations() {
        let a = vec![c("((2^2,-1)^P,1^3,1^3)/3"), c("((5,-1^2)^P,1^3,1^3)/3")];
        let b = vec![c("(1^3,(5,-1^2)^P,1^3)/3"), c("(1^3,(2^2,-1)^P,1^3)/3")];
        assert_eq!(clique_orbit_key(&a), clique_orbit_key(&b));
    }

    #[test]
    fn cyclic_constructors() {
        assert_eq!(cyclic_shifts(&[4, 1, -2]), vec![vec![4, 1, -2], vec![1, -2, 4], vec![-2, 4, 1]]);
        assert_eq!(cyclic_shifts(&[1, 1, 1]).len(), 1);
        let sel: Selection = vec![vec![vec![1]], vec![vec![2]], vec![vec![3]]];
        assert_eq!(rotate_blocks(&sel)[1], vec![vec![vec![2]], vec![vec![3]], vec![vec![1]]]);
        assert!(swap_pairs(&sel).is_err());
    }

    #[test]
    fn small_classifications() {
        let opts = AssemblyOptions { verify: VerifyMode::Full, ..Default::default() };
        let r = classify(3, 3, &opts).unwrap();
        assert_eq!(r.totals(), vec![37, 40]);
        assert_eq!(r.cliques.iter().map(Vec::len).sorted().collect::<Vec<_>>(), vec![3, 4]);
        let r = classify(4, 2, &opts).unwrap();
        assert!(r.maximal);
        assert_eq!(r.largest_total, 16);
        let r = classify(2, 4, &opts).unwrap();
        assert_eq!(r.totals(), vec![25]);
        assert_eq!(r.cliques, vec![r.cliques[0].clone()]);
        assert_eq!(r.cliques[0].len(), 5);
    }
}
