use std::sync::{Arc, RwLock};

use crate::error::{domain, Result};

static SHARED: RwLock<Option<Arc<PrimeTable>>> = RwLock::new(None);

/// Ascending list of all primes up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// The primes `p ≤ y`. `y` must not exceed the table limit.
    pub fn up_to(&self, y: f64) -> &[u64] {
        let end = self.primes.partition_point(|&p| (p as f64) <= y);
        &self.primes[..end]
    }

    /// Build from an explicit list, checking it is exactly the primes up to `limit`.
    pub fn from_parts(limit: u64, primes: Vec<u64>) -> Result<Self> {
        let fresh = sieve(limit)?;
        if fresh.primes != primes {
            return domain(format!("list is not the set of primes up to {limit}"));
        }
        Ok(fresh)
    }

    /// Build from a stored list with cheap structural checks only (ascending, within
    /// `limit`, starting at 2, odd afterwards); primality is not re-proved.
    pub fn from_trusted(limit: u64, primes: Vec<u64>) -> Result<Self> {
        let ordered = primes.windows(2).all(|w| w[0] < w[1]);
        let shaped = primes.first() == Some(&2) && primes[1..].iter().all(|p| p % 2 == 1);
        if !(ordered && shaped && primes.last().is_some_and(|&p| p <= limit)) {
            return domain(format!("stored list is not a prime table up to {limit}"));
        }
        Ok(Self { limit, primes })
    }

    /// Makes `table` the process-wide table if it covers more than the current one.
    pub fn install(table: PrimeTable) {
        let mut guard = SHARED.write().unwrap();
        if guard.as_ref().is_none_or(|t| t.limit < table.limit) {
            *guard = Some(Arc::new(table));
        }
    }

    /// A process-wide table covering at least `limit`, grown on demand.
    pub fn shared(limit: u64) -> Arc<PrimeTable> {
        let limit = limit.max(2);
        if let Some(t) = SHARED.read().unwrap().as_ref() {
            if t.limit >= limit {
                return Arc::clone(t);
            }
        }
        let mut guard = SHARED.write().unwrap();
        if let Some(t) = guard.as_ref() {
            if t.limit >= limit {
                return Arc::clone(t);
            }
        }
        let grow = guard.as_ref().map_or(0, |t| t.limit.saturating_mul(2));
        let table = Arc::new(sieve(limit.max(grow).max(1 << 16)).expect("limit >= 2"));
        *guard = Some(Arc::clone(&table));
        table
    }
}

/// Sieve of Eratosthenes over odd numbers.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return domain(format!("sieve limit must be at least 2, got {limit}"));
    }
    let n = usize::try_from(limit).map_err(|_| crate::Error::Resource("sieve limit".into()))?;
    // composite[i] refers to 2i+1
    let half = n / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_pi(limit));
    primes.push(2);
    primes.extend(composite.iter().enumerate().filter(|&(i, &c)| !c && 2 * i < n).map(|(i, _)| (2 * i + 1) as u64));
    Ok(PrimeTable { limit, primes })
}

fn estimate_pi(limit: u64) -> usize {
    let x = limit as f64;
    (1.3 * x / x.ln().max(1.0)) as usize + 16
}

/// π(limit) by a segmented sieve with segments of `segment` integers.
pub fn count_primes_segmented(limit: u64, segment: usize) -> Result<u64> {
    if limit < 2 {
        return Ok(0);
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = sieve(root.max(2))?;
    let mut count = 0u64;
    let mut lo = 2u64;
    let mut marks = vec![false; segment.max(1)];
    while lo <= limit {
        let hi = (lo + marks.len() as u64 - 1).min(limit);
        let width = (hi - lo + 1) as usize;
        marks[..width].iter_mut().for_each(|m| *m = false);
        for &p in base.primes() {
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut m = start;
            while m <= hi {
                marks[(m - lo) as usize] = true;
                m += p;
            }
        }
        count += marks[..width].iter().filter(|&&m| !m).count() as u64;
        lo = hi + 1;
    }
    Ok(count)
}

/// Primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation as `(p, exponent)` pairs in ascending order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    if n == 0 {
        return 0;
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All `y`-smooth integers in `[1, bound]`, ascending.
pub fn enumerate_smooth(y: f64, bound: u64) -> Result<Vec<u64>> {
    if !(y >= 2.0) {
        return domain(format!("smoothness bound y must be at least 2, got {y}"));
    }
    if bound < 1 {
        return domain("bound must be at least 1");
    }
    let cap = y.min(bound as f64).floor() as u64;
    let primes = sieve(cap.max(2))?;
    let primes = primes.up_to(y);
    let mut out = vec![1u64];
    // multiply in one prime at a time; each product is generated exactly once
    for &p in primes {
        let existing = out.len();
        for i in 0..existing {
            let mut m = out[i];
            while let Some(next) = m.checked_mul(p).filter(|&v| v <= bound) {
                out.push(next);
                m = next;
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}
