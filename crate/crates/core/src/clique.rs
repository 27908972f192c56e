//! Bitset graphs, maximal-clique enumeration and maximum-clique search.

use std::collections::HashMap;
use std::time::{Duration, Instant};

/// Fixed-size set of vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn empty(n: usize) -> Self {
        Self { words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn and(&self, other: &Self) -> Self {
        Self { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub fn and_not(&self, other: &Self) -> Self {
        Self { words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect() }
    }

    pub fn and_count(&self, other: &Self) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// Undirected loop-free graph stored as adjacency bitsets.
#[derive(Clone, Debug)]
pub struct BitGraph {
    adj: Vec<Bitset>,
}

impl BitGraph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Bitset::empty(n); n] }
    }

    /// Graph on `0..n` with an edge wherever `edge(i, j)` holds (`i < j`).
    pub fn from_fn(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.adj[i].insert(j);
            self.adj[j].insert(i);
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn neighbors(&self, i: usize) -> &Bitset {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(a, &i)| vs[a + 1..].iter().all(|&j| self.has_edge(i, j)))
    }

    /// True when no vertex outside `vs` is adjacent to all of `vs`.
    pub fn is_maximal_clique(&self, vs: &[usize]) -> bool {
        let mut common = Bitset::full(self.len());
        for &v in vs {
            common = common.and(&self.adj[v]);
        }
        self.is_clique(vs) && common.is_empty()
    }

    /// All maximal cliques (Bron–Kerbosch with pivoting), each sorted, the
    /// list sorted lexicographically. An empty graph has none.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if self.is_empty() {
            return out;
        }
        let mut r = Vec::new();
        self.bron_kerbosch(&mut r, Bitset::full(self.len()), Bitset::empty(self.len()), &mut out);
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn bron_kerbosch(&self, r: &mut Vec<usize>, mut p: Bitset, mut x: Bitset, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() {
            if x.is_empty() {
                out.push(r.clone());
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&u| (p.and_count(&self.adj[u]), std::cmp::Reverse(u)))
            .expect("p non-empty");
        let candidates: Vec<usize> = p.and_not(&self.adj[pivot]).iter().collect();
        for v in candidates {
            r.push(v);
            self.bron_kerbosch(r, p.and(&self.adj[v]), x.and(&self.adj[v]), out);
            r.pop();
            p.remove(v);
            x.insert(v);
        }
    }

    /// Maximum clique by branch and bound with greedy-colouring bounds.
    /// With a budget the search may stop early; the result then reports
    /// `optimal = false` and is a clique that no single vertex extends.
    pub fn max_clique(&self, budget: Option<Duration>) -> CliqueResult {
        self.max_clique_with_orbits(budget, None)
    }

    /// [`Self::max_clique`] with isomorph rejection. `orbit(c, u)` must
    /// return the same key for `u` and `u'` only when an automorphism of the
    /// graph fixes every vertex of the clique `c` and maps `u` to `u'`; after
    /// branching on a vertex its whole orbit is dropped.
    pub fn max_clique_with_orbits(&self, budget: Option<Duration>, orbit: Option<&OrbitKey<'_>>) -> CliqueResult {
        let n = self.len();
        if n == 0 {
            return CliqueResult { vertices: Vec::new(), optimal: true, nodes: 0 };
        }
        // renumber by non-increasing degree so low bit positions are dense
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let w = n.div_ceil(64);
        let mut adj = vec![0u64; n * w];
        for (i, &v) in order.iter().enumerate() {
            for u in self.adj[v].iter() {
                let j = pos[u];
                adj[i * w + j / 64] |= 1 << (j % 64);
            }
        }
        let mut s = MaxCliqueSearch {
            w,
            adj,
            order: &order,
            orbit,
            best: Vec::new(),
            deadline: budget.map(|b| Instant::now() + b),
            nodes: 0,
            timed_out: false,
        };
        // a greedy start gives the first bound
        let mut greedy = Vec::new();
        let mut cand = Bitset::full(n).words;
        while let Some(v) = first_bit(&cand) {
            greedy.push(v);
            for (c, a) in cand.iter_mut().zip(s.row(v)) {
                *c &= a;
            }
        }
        s.best = greedy;
        let mut c = Vec::new();
        s.expand(&mut c, Bitset::full(n).words);
        let mut vertices: Vec<usize> = s.best.iter().map(|&i| order[i]).collect();
        let optimal = !s.timed_out;
        if !optimal {
            // extend to a maximal clique
            let mut common = Bitset::full(n);
            for &v in &vertices {
                common = common.and(&self.adj[v]);
            }
            while let Some(v) = common.first() {
                vertices.push(v);
                common = common.and(&self.adj[v]);
            }
        }
        vertices.sort_unstable();
        CliqueResult { vertices, optimal, nodes: s.nodes }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueResult {
    pub vertices: Vec<usize>,
    /// True when the search finished, so no larger clique exists.
    pub optimal: bool,
    pub nodes: u64,
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words.iter().position(|&x| x != 0).map(|i| i * 64 + words[i].trailing_zeros() as usize)
}

/// Orbit rejection runs only this close to the root, where stabilisers are
/// large.
const ORBIT_DEPTH: usize = 5;

/// Key identifying the orbit of a vertex under the stabiliser of a clique.
pub type OrbitKey<'a> = dyn Fn(&[usize], usize) -> Vec<i64> + Sync + 'a;

/// Branch and bound over flat adjacency rows of `w` words each.
struct MaxCliqueSearch<'a> {
    w: usize,
    adj: Vec<u64>,
    order: &'a [usize],
    orbit: Option<&'a OrbitKey<'a>>,
    best: Vec<usize>,
    deadline: Option<Instant>,
    nodes: u64,
    timed_out: bool,
}

impl MaxCliqueSearch<'_> {
    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.w..(v + 1) * self.w]
    }

    /// Greedy sequential colouring of `p`; returns vertices in colour order
    /// with their colour numbers (non-decreasing).
    fn colour(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let w = self.w;
        let mut verts = Vec::new();
        let mut colours = Vec::new();
        let mut uncoloured = p.to_vec();
        let mut q = vec![0u64; w];
        let mut k = 0;
        while uncoloured.iter().any(|&x| x != 0) {
            k += 1;
            q.copy_from_slice(&uncoloured);
            for i in 0..w {
                while q[i] != 0 {
                    let b = q[i].trailing_zeros() as usize;
                    let v = i * 64 + b;
                    uncoloured[i] &= !(1 << b);
                    q[i] &= !(1 << b);
                    let row = &self.adj[v * w..(v + 1) * w];
                    for t in i..w {
                        q[t] &= !row[t];
                    }
                    verts.push(v);
                    colours.push(k);
                }
            }
        }
        (verts, colours)
    }

    fn expand(&mut self, c: &mut Vec<usize>, mut p: Vec<u64>) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        let (verts, colours) = self.colour(&p);
        // orbit ids of the candidates under the stabiliser of `c`
        let orbit_ids: Option<HashMap<usize, usize>> = self.orbit.filter(|_| c.len() < ORBIT_DEPTH).map(|key| {
            let clique: Vec<usize> = c.iter().map(|&i| self.order[i]).collect();
            let mut ids: HashMap<Vec<i64>, usize> = HashMap::new();
            verts
                .iter()
                .map(|&v| {
                    let next = ids.len();
                    (v, *ids.entry(key(&clique, self.order[v])).or_insert(next))
                })
                .collect()
        });
        for idx in (0..verts.len()).rev() {
            let v = verts[idx];
            if p[v / 64] >> (v % 64) & 1 == 0 {
                continue;
            }
            if c.len() + colours[idx] <= self.best.len() || self.timed_out {
                return;
            }
            c.push(v);
            let np: Vec<u64> = p.iter().zip(self.row(v)).map(|(a, b)| a & b).collect();
            if np.iter().all(|&x| x == 0) {
                if c.len() > self.best.len() {
                    self.best = c.clone();
                }
            } else {
                self.expand(c, np);
            }
            c.pop();
            p[v / 64] &= !(1 << (v % 64));
            if let Some(ids) = &orbit_ids {
                let id = ids[&v];
                for &u in &verts[..idx] {
                    if ids[&u] == id {
                        p[u / 64] &= !(1 << (u % 64));
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::subset_masks;

    fn cycle(n: usize) -> BitGraph {
        BitGraph::from_fn(n, |i, j| j == i + 1 || (i == 0 && j == n - 1))
    }

    #[test]
    fn bitset_ops() {
        let mut s = Bitset::empty(130);
        s.insert(3);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 64, 129]);
        assert_eq!(s.len(), 3);
        s.remove(64);
        assert!(!s.contains(64));
        assert_eq!(s.first(), Some(3));
    }

    #[test]
    fn cliques_of_small_graphs() {
        assert!(BitGraph::new(0).maximal_cliques().is_empty());
        assert_eq!(cycle(5).maximal_cliques().len(), 5);
        let k4 = BitGraph::from_fn(4, |_, _| true);
        assert_eq!(k4.maximal_cliques(), vec![vec![0, 1, 2, 3]]);
        let g = BitGraph::new(3);
        assert_eq!(g.maximal_cliques(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn moon_moser_count() {
        // complete 4-partite graph with parts of size 3 has 3^4 maximal cliques
        let g = BitGraph::from_fn(12, |i, j| i / 3 != j / 3);
        let cl = g.maximal_cliques();
        assert_eq!(cl.len(), 81);
        assert!(cl.iter().all(|c| g.is_maximal_clique(c)));
    }

    #[test]
    fn max_clique_matches_enumeration() {
        let g = BitGraph::from_fn(20, |i, j| (i * 7 + j * 3) % 5 != 0 && (i + j) % 4 != 1);
        let best = g.maximal_cliques().iter().map(Vec::len).max().unwrap();
        let r = g.max_clique(None);
        assert!(r.optimal);
        assert!(g.is_clique(&r.vertices));
        assert_eq!(r.vertices.len(), best);
    }

    #[test]
    fn intersecting_family_clique() {
        // 3-subsets of 7 meeting pairwise: the star has 15 members
        let sets = subset_masks(7, 3);
        let g = BitGraph::from_fn(sets.len(), |i, j| sets[i] & sets[j] != 0);
        let r = g.max_clique(None);
        assert!(r.optimal);
        assert_eq!(r.vertices.len(), 15);
    }
}
