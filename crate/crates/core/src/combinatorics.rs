//! Counting and enumeration helpers shared by the search modules.

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc
            .checked_mul(u128::from(n - i))
            .expect("binomial coefficient overflows u128")
            / u128::from(i + 1);
    }
    acc
}

/// Binomial coefficient with a possibly negative upper argument treated as zero.
pub fn binomial_i(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 {
        return 0;
    }
    binomial(n as u64, k as u64)
}

/// Multinomial coefficient `n! / (k_1! ... k_t!)` where `n = Σ k_i`.
pub fn multinomial(parts: &[u32]) -> Option<u128> {
    let mut total: u64 = 0;
    let mut acc: u128 = 1;
    for &k in parts {
        total += u64::from(k);
        acc = acc.checked_mul(binomial_checked(total, u64::from(k))?)?;
    }
    Some(acc)
}

fn binomial_checked(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Rearranges `v` into the next lexicographically greater permutation.
/// Returns `false` (leaving `v` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All distinct permutations of a multiset, in ascending lexicographic order.
pub fn distinct_permutations<T: Ord + Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut cur = items.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// All `k`-subsets of `{0, .., n-1}` as bit masks, in colex order.
pub fn subset_masks(n: u32, k: u32) -> Vec<u64> {
    assert!(n <= 64, "subset masks limited to 64 points");
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(u64::from(n), u64::from(k)) as usize);
    let limit: u128 = 1u128 << n;
    let mut x: u64 = (1u64 << k) - 1;
    loop {
        out.push(x);
        // Gosper's hack
        let c = x & x.wrapping_neg();
        let r = x as u128 + c as u128;
        if r >= limit {
            break;
        }
        let r = r as u64;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Every composition of `total` into `parts` non-negative integers, lexicographic.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(rem: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=rem {
            cur.push(v);
            rec(rem - v, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 4), 126);
        assert_eq!(binomial(19, 5), 11628);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial_i(-1, 2), 0);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[1, 4, 2]), Some(105));
        assert_eq!(multinomial(&[1, 2, 3]), Some(60));
        assert_eq!(multinomial(&[5]), Some(1));
    }

    #[test]
    fn multiset_permutations_are_distinct_and_counted() {
        let p = distinct_permutations(&[2, 2, 2, 2, -3]);
        assert_eq!(p.len(), 5);
        let p = distinct_permutations(&[4, 1, -2]);
        assert_eq!(p.len(), 6);
        let p = distinct_permutations(&[1, 0, 0, 0, 0, -1, -1]);
        assert_eq!(p.len() as u128, multinomial(&[1, 4, 2]).unwrap());
        let mut sorted = p.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, p);
    }

    #[test]
    fn gosper_masks() {
        let m = subset_masks(9, 4);
        assert_eq!(m.len(), 126);
        assert!(m.iter().all(|x| x.count_ones() == 4 && *x < 1 << 9));
        assert_eq!(subset_masks(64, 1).len(), 64);
        assert_eq!(subset_masks(5, 0), vec![0]);
    }

    #[test]
    fn composition_count() {
        // stars and bars: C(5 + 2, 2)
        assert_eq!(compositions(5, 3).len(), 21);
    }
}
