//! Segmented sieve of Eratosthenes.

/// Primes up to and including `n`, by a simple sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Primes in `[lo, hi]`, sieved one segment at a time against base primes
/// up to `sqrt(hi)`.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = primes_up_to(hi.isqrt());
    let mut out = Vec::new();
    const SEG: u64 = 1 << 16;
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start + SEG - 1);
        let len = (end - start + 1) as usize;
        let mut composite = vec![false; len];
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut m = p.max(start.div_ceil(p)) * p;
            while m <= end {
                composite[(m - start) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in composite.iter().enumerate() {
            if !c {
                out.push(start + i as u64);
            }
        }
        start = end + 1;
    }
    out
}

/// The segment boundaries used by [`primes_in_range`], exposed so parallel
/// drivers can split work on exactly these cut points and aggregate segment
/// results in a fixed order.
pub fn segment_bounds(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    const SEG: u64 = 1 << 16;
    let mut bounds = Vec::new();
    let mut start = lo.max(2);
    while start <= hi {
        let end = hi.min(start + SEG - 1);
        bounds.push((start, end));
        start = end + 1;
    }
    bounds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::is_prime;

    #[test]
    fn matches_trial_counts() {
        assert_eq!(primes_up_to(100).len(), 25);
        assert_eq!(primes_up_to(1).len(), 0);
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(10_000).len(), 1229);
    }

    #[test]
    fn segmented_matches_simple() {
        let a = primes_in_range(0, 30_000);
        let b = primes_up_to(30_000);
        assert_eq!(a, b);
        let window = primes_in_range(1 << 17, (1 << 17) + 10_000);
        for &p in &window {
            assert!(is_prime(p as i128));
        }
    }

    #[test]
    fn segment_boundaries_checked_by_miller_rabin() {
        // Boundary primes near segment cuts must not be lost or duplicated.
        for (lo, hi) in segment_bounds(60_000, 200_000) {
            let seg = primes_in_range(lo, hi);
            for &p in &seg {
                assert!(is_prime(p as i128), "sieve emitted composite {p}");
            }
            for p in [lo, hi] {
                if is_prime(p as i128) {
                    assert!(seg.contains(&p), "sieve missed boundary prime {p}");
                }
            }
        }
    }
}
