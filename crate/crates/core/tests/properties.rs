use hds_core::class::{block_max_sq_num, block_min_sq_num};
use hds_core::clique::BitGraph;
use hds_core::exact::{embed_hamming, quad_sq_dist, sq_dist};
use hds_core::families::{ekr_bound, frankl_count, gen_frankl};
use hds_core::search::enumerate_addable_classes;
use hds_core::{BlockPattern, CandidateClass, RootPoint, ScaledVector};
use num_rational::Ratio;
use proptest::prelude::*;

/// Normalized pattern from raw multiplicities summing to `n`.
fn pattern() -> impl Strategy<Value = BlockPattern> {
    (2u32..=7, prop::collection::vec(0u32..=3, 1..=5)).prop_filter_map("empty", |(n, raw)| {
        let total: u32 = raw.iter().sum();
        if total == 0 || total > n {
            return None;
        }
        let mut mults = raw;
        mults[0] += n - total;
        BlockPattern::from_mults(n, &mults).ok()
    })
}

fn word(n: u32, m: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..n, m as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_doubles_hamming((n, _m, a, b) in (2u32..=6, 1u32..=5).prop_flat_map(|(n, m)| (Just(n), Just(m), word(n, m), word(n, m)))) {
        let x = ScaledVector::from_word(n, &a).unwrap();
        let y = ScaledVector::from_word(n, &b).unwrap();
        let h = a.iter().zip(&b).filter(|(p, q)| p != q).count() as u64;
        prop_assert_eq!(sq_dist(&x, &y).unwrap().as_integer(), Some(2 * h));
        let flat = quad_sq_dist(&RootPoint::flat(x), &RootPoint::flat(y)).unwrap();
        prop_assert_eq!(flat.as_integer(), Some(2 * h as i64));
    }

    #[test]
    fn patterns_sum_to_one(p in pattern()) {
        let s = p.sorted_desc();
        prop_assert_eq!(s.len() as u32, p.n());
        prop_assert_eq!(s.iter().map(|&v| i64::from(v)).sum::<i64>(), i64::from(p.n()));
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn anti_sorted_pairing_is_extremal(a in pattern(), b in pattern()) {
        prop_assume!(a.n() == b.n() && a.n() <= 6);
        let y = b.sorted_desc();
        let dists: Vec<i64> = a
            .arrangements()
            .iter()
            .map(|x| x.iter().zip(&y).map(|(&p, &q)| (i64::from(p) - i64::from(q)).pow(2)).sum())
            .collect();
        prop_assert_eq!(block_max_sq_num(&a, &b), *dists.iter().max().unwrap());
        prop_assert_eq!(block_min_sq_num(&a, &b), *dists.iter().min().unwrap());
    }

    #[test]
    fn m_value_is_max_distance_to_hamming(blocks in prop::collection::vec(pattern(), 1..=3)) {
        let n = blocks[0].n();
        prop_assume!(blocks.iter().all(|b| b.n() == n) && n <= 5);
        let x = CandidateClass::new(blocks).unwrap();
        let c = x.canonical_element();
        let max = embed_hamming(n, x.m())
            .unwrap()
            .iter()
            .map(|y| {
                let d = sq_dist(&c, y).unwrap();
                Ratio::new(d.num as i64, d.den as i64)
            })
            .max()
            .unwrap();
        prop_assert_eq!(x.m_value(), max);
    }

    #[test]
    fn distances_to_hamming_share_parity(blocks in prop::collection::vec(pattern(), 1..=3), pick in any::<prop::sample::Index>()) {
        let n = blocks[0].n();
        prop_assume!(blocks.iter().all(|b| b.n() == n) && n <= 5);
        let x = CandidateClass::new(blocks).unwrap();
        let members = x.enumerate(1 << 16).unwrap();
        let c = &members[pick.index(members.len())];
        let ds: Vec<Ratio<i64>> = embed_hamming(n, x.m())
            .unwrap()
            .iter()
            .map(|y| {
                let d = sq_dist(c, y).unwrap();
                Ratio::new(d.num as i64, d.den as i64)
            })
            .collect();
        for d in &ds {
            let diff = d - ds[0];
            prop_assert!(diff.is_integer() && diff.to_integer() % 2 == 0);
        }
        let m = i64::from(x.m());
        let brute = ds.iter().all(|d| d.is_integer() && d.to_integer() % 2 == 0 && (2..=2 * m).contains(&d.to_integer()))
            && !x.blocks().iter().all(BlockPattern::is_unit);
        prop_assert_eq!(x.is_addable(), brute);
    }

    #[test]
    fn modification_drops_m_by_even_step(p in pattern()) {
        prop_assume!(p.t() >= 3);
        let q = p.modify().unwrap();
        prop_assert_eq!(q.n(), p.n());
        let drop = p.m_contribution() - q.m_contribution();
        let n = i64::from(p.n());
        prop_assert!(drop > 0 && drop % (2 * n) == 0, "drop {} for {}", drop, p);
        prop_assert!(q.inverse_modifications().contains(&p));
    }

    #[test]
    fn inverse_modifications_invert(p in pattern()) {
        for q in p.inverse_modifications() {
            prop_assert_eq!(q.modify().unwrap(), p.clone());
        }
    }

    #[test]
    fn frankl_family_matches_count((n, k, t, r) in (2u32..=10, 1u32..=5, 1u32..=3, 0u32..=3)) {
        prop_assume!(n >= k && k >= t + r && n >= t + 2 * r);
        let fam = gen_frankl(n, k, t, r).unwrap();
        prop_assert_eq!(fam.len() as u128, frankl_count(n, k, t, r));
        for (i, a) in fam.iter().enumerate() {
            for b in &fam[i + 1..] {
                prop_assert!((a & b).count_ones() >= t);
            }
        }
    }
}

fn masks(n: u32, k: u32) -> Vec<u64> {
    (0u64..1 << n).filter(|s| s.count_ones() == k).collect()
}

#[test]
fn ekr_bound_matches_exact_clique() {
    for n in 2..=9u32 {
        for k in 1..=n {
            for t in 1..=k {
                let sets = masks(n, k);
                if sets.len() > 130 {
                    continue;
                }
                let g = BitGraph::from_fn(sets.len(), |i, j| (sets[i] & sets[j]).count_ones() >= t);
                // ground-set permutations fixing the clique permute the candidates
                let key = |c: &[usize], u: usize| {
                    let mut cols: Vec<i64> = (0..n)
                        .map(|e| c.iter().chain([&u]).fold(0i64, |acc, &v| acc << 1 | (sets[v] >> e & 1) as i64))
                        .collect();
                    cols.sort_unstable();
                    cols
                };
                let best = g.max_clique_with_orbits(None, Some(&key));
                assert!(best.optimal);
                let bound = ekr_bound(n, k, t).unwrap().bound;
                assert_eq!(best.vertices.len() as u128, bound, "(n, k, t) = ({n}, {k}, {t})");
            }
        }
    }
}

#[test]
fn reduce_inverts_expansion() {
    for (n, m) in [(3, 3), (5, 3), (9, 3), (2, 4), (3, 4), (5, 4), (7, 4)] {
        let catalog = enumerate_addable_classes(n, m).unwrap();
        for x in catalog.expandable() {
            for e in x.inverse_expansions().unwrap() {
                assert!(e.is_addable() && !e.is_reduced());
                assert_eq!(e.reduce().unwrap(), x, "({n}, {m}): {e}");
            }
        }
        for e in &catalog.expanded {
            assert!(catalog.reduced.contains(&e.reduce().unwrap()));
        }
    }
}
