//! k-subsets of `0..n` in colexicographic order, with ranking.

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// The subset of colex rank `rank`, ascending.
pub fn unrank_colex(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = vec![0; k];
    let mut top = n;
    for slot in (0..k).rev() {
        // largest c < top with C(c, slot + 1) <= rank
        let mut c = slot;
        let mut lo = slot;
        let mut hi = top;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if binomial(mid, slot + 1).is_some_and(|b| b <= rank) {
                c = mid;
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        rank -= binomial(c, slot + 1).unwrap_or(0);
        out[slot] = c;
        top = c;
    }
    out
}

pub fn rank_colex(subset: &[usize]) -> u128 {
    subset.iter().enumerate().map(|(i, &c)| binomial(c, i + 1).unwrap_or(0)).sum()
}

/// Advances to the colex successor; `false` when `subset` was the last one.
pub fn next_colex(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in 0..k {
        let limit = if i + 1 < k { subset[i + 1] } else { n };
        if subset[i] + 1 < limit {
            subset[i] += 1;
            for (j, slot) in subset[..i].iter_mut().enumerate() {
                *slot = j;
            }
            return true;
        }
    }
    false
}
