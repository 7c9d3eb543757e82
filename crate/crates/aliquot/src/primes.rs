//! Prime generation and primality testing.
//!
//! A segmented sieve drives the outer loop of the cycle search, and a
//! deterministic Miller-Rabin test (witness set valid for all 64-bit
//! integers) decides primality of chain members, so no probabilistic
//! failure can leak into fixtures.

/// Default segment size for [`SegmentedSieve`], in numbers per segment.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;

/// Primes up to `limit` (inclusive) by a simple sieve of Eratosthenes.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// Iterator over primes in `[lo, hi)` using a segmented sieve.
pub struct SegmentedSieve {
    base: Vec<u64>,
    segment_size: u64,
    hi: u64,
    cur: u64,
    buf: Vec<u64>,
    buf_pos: usize,
}

impl SegmentedSieve {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self::with_segment_size(lo, hi, DEFAULT_SEGMENT_SIZE)
    }

    pub fn with_segment_size(lo: u64, hi: u64, segment_size: u64) -> Self {
        assert!(segment_size >= 64);
        let root = (hi as f64).sqrt() as u64 + 2;
        SegmentedSieve {
            base: small_primes(root),
            segment_size,
            hi,
            cur: lo,
            buf: Vec::new(),
            buf_pos: 0,
        }
    }

    fn fill(&mut self) {
        self.buf.clear();
        self.buf_pos = 0;
        while self.buf.is_empty() && self.cur < self.hi {
            let seg_lo = self.cur;
            let seg_hi = (seg_lo + self.segment_size).min(self.hi);
            let len = (seg_hi - seg_lo) as usize;
            let mut composite = vec![false; len];
            for &p in &self.base {
                if p * p >= seg_hi {
                    break;
                }
                let mut start = p * p;
                if start < seg_lo {
                    start = seg_lo.div_ceil(p) * p;
                }
                let mut q = start;
                while q < seg_hi {
                    composite[(q - seg_lo) as usize] = true;
                    q += p;
                }
            }
            for i in 0..len {
                let n = seg_lo + i as u64;
                if n >= 2 && !composite[i] {
                    self.buf.push(n);
                }
            }
            self.cur = seg_hi;
        }
    }
}

impl Iterator for SegmentedSieve {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.buf_pos >= self.buf.len() {
            self.fill();
            if self.buf.is_empty() {
                return None;
            }
        }
        let p = self.buf[self.buf_pos];
        self.buf_pos += 1;
        Some(p)
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // Witness set from Sinclair, sufficient for n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_prime_list() {
        assert_eq!(small_primes(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(small_primes(1), Vec::<u64>::new());
    }

    #[test]
    fn sieve_matches_trial_division() {
        let sieved: Vec<u64> = SegmentedSieve::with_segment_size(0, 10_000, 256).collect();
        let direct: Vec<u64> = (2..10_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, direct);
    }

    #[test]
    fn sieve_interval() {
        let sieved: Vec<u64> = SegmentedSieve::with_segment_size(1000, 1100, 64).collect();
        let direct: Vec<u64> = (1000..1100).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, direct);
    }

    #[test]
    fn miller_rabin_known_values() {
        assert!(is_prime(2));
        assert!(is_prime(1622311));
        assert!(is_prime(1622471));
        assert!(is_prime(2492223637));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        // Strong pseudoprime to many bases.
        assert!(!is_prime(3215031751));
        assert!(!is_prime(3825123056546413051));
        assert!(is_prime(18446744073709551557));
    }

    #[test]
    fn prime_counts() {
        assert_eq!(SegmentedSieve::new(0, 1_000_000).count(), 78498);
    }
}
