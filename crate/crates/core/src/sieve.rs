//! Prime generation.
//!
//! Three independent routes produce the same ascending list of primes:
//!
//! * [`trial_division_oracle`]: per-candidate trial division, deliberately naive.
//! * [`simple_sieve`]: a single odd-only bit sieve over `[0, x]`.
//! * [`segmented_stream`]: an odd-only segmented sieve that streams primes in
//!   bounded memory, optionally sieving several segments in parallel.
//!
//! The first two exist to cross-check the third.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

/// Largest bound accepted by [`simple_sieve`] (about 60 MiB of bits plus the
/// returned list).
pub const SIMPLE_SIEVE_CAP: u64 = 1_000_000_000;

/// Largest bound accepted by [`trial_division_oracle`].
pub const TRIAL_DIVISION_CAP: u64 = 1_000_000;

/// Largest value bound the segmented sieve accepts.
pub const MAX_BOUND: u64 = (1 << 63) - 1;

/// Default number of integers covered by one sieve segment.
pub const DEFAULT_SEGMENT_LENGTH: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SieveError {
    #[error("bound {bound} exceeds the cap of {cap}")]
    BoundExceedsCap { bound: u64, cap: u64 },
    #[error("segment length must be even and at least 2, got {0}")]
    BadSegmentLength(u64),
    #[error("value limit must be at least 2, got {0}")]
    ValueLimitTooSmall(u64),
    #[error("count limit must be at least 1")]
    ZeroCount,
    #[error("worker count must be at least 1")]
    ZeroThreads,
}

/// Where a prime stream stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    /// Emit every prime `<= x`.
    MaxValue(u64),
    /// Emit exactly this many primes.
    MaxCount(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveConfig {
    pub segment_length: u64,
    pub limit: Limit,
    /// Worker threads used to sieve segments. Output does not depend on it.
    pub threads: usize,
    /// First integer considered by the stream.
    pub start: u64,
    /// Number of primes below `start`. Only used to size the sieve range for
    /// [`Limit::MaxCount`] when resuming.
    pub primes_before_start: u64,
}

impl SieveConfig {
    pub fn new(limit: Limit) -> Self {
        SieveConfig {
            segment_length: DEFAULT_SEGMENT_LENGTH,
            limit,
            threads: 1,
            start: 0,
            primes_before_start: 0,
        }
    }

    pub fn with_segment_length(mut self, segment_length: u64) -> Self {
        self.segment_length = segment_length;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    /// Continue a stream that already emitted `primes_before_start` primes,
    /// all of them below `start`.
    pub fn resume_at(mut self, start: u64, primes_before_start: u64) -> Self {
        self.start = start;
        self.primes_before_start = primes_before_start;
        self
    }

    pub fn validate(&self) -> Result<(), SieveError> {
        if self.segment_length < 2 || !self.segment_length.is_multiple_of(2) {
            return Err(SieveError::BadSegmentLength(self.segment_length));
        }
        if self.threads == 0 {
            return Err(SieveError::ZeroThreads);
        }
        match self.limit {
            Limit::MaxValue(x) if x < 2 => return Err(SieveError::ValueLimitTooSmall(x)),
            Limit::MaxValue(x) if x > MAX_BOUND => {
                return Err(SieveError::BoundExceedsCap {
                    bound: x,
                    cap: MAX_BOUND,
                })
            }
            Limit::MaxCount(0) => return Err(SieveError::ZeroCount),
            _ => {}
        }
        if self.start > MAX_BOUND {
            return Err(SieveError::BoundExceedsCap {
                bound: self.start,
                cap: MAX_BOUND,
            });
        }
        let bound = self.value_bound();
        if bound > MAX_BOUND {
            return Err(SieveError::BoundExceedsCap {
                bound,
                cap: MAX_BOUND,
            });
        }
        Ok(())
    }

    /// Largest integer the stream will need to sieve.
    fn value_bound(&self) -> u64 {
        match self.limit {
            Limit::MaxValue(x) => x,
            Limit::MaxCount(n) => {
                nth_prime_upper_bound(n.saturating_add(self.primes_before_start)).max(self.start)
            }
        }
    }
}

/// Upper bound on the `n`-th prime (1-based: `p_1 = 2`).
///
/// Uses `n (ln n + ln ln n)`, valid for `n >= 6`, and a table below that.
pub fn nth_prime_upper_bound(n: u64) -> u64 {
    const SMALL: [u64; 6] = [2, 2, 3, 5, 7, 11];
    if n < 6 {
        return SMALL[n as usize];
    }
    let nf = n as f64;
    let estimate = nf * (nf.ln() + nf.ln().ln());
    // One extra unit absorbs any rounding in the floating-point evaluation.
    (estimate.ceil() as u64).saturating_add(1)
}

/// Bit set of composite odd numbers: bit `i` stands for `2i + 1`.
/// Bit 0 (the number 1) is left clear.
pub(crate) struct OddComposites {
    words: Vec<u64>,
    limit: u64,
}

impl OddComposites {
    pub(crate) fn new(limit: u64) -> Self {
        let slots = limit / 2 + 1;
        let mut words = vec![0u64; slots.div_ceil(64) as usize];
        let mut p = 3u64;
        while p * p <= limit {
            if !test_bit(&words, p / 2) {
                let mut m = p * p;
                while m <= limit {
                    set_bit(&mut words, m / 2);
                    m += 2 * p;
                }
            }
            p += 2;
        }
        OddComposites { words, limit }
    }

    /// `v` must be odd and `<= limit`.
    pub(crate) fn is_composite(&self, v: u64) -> bool {
        debug_assert!(v % 2 == 1 && v <= self.limit);
        test_bit(&self.words, v / 2)
    }
}

#[inline]
fn test_bit(words: &[u64], i: u64) -> bool {
    words[(i / 64) as usize] >> (i % 64) & 1 == 1
}

#[inline]
fn set_bit(words: &mut [u64], i: u64) {
    words[(i / 64) as usize] |= 1 << (i % 64);
}

/// All primes `<= x`, ascending.
pub fn simple_sieve(x: u64) -> Result<Vec<u64>, SieveError> {
    if x > SIMPLE_SIEVE_CAP {
        return Err(SieveError::BoundExceedsCap {
            bound: x,
            cap: SIMPLE_SIEVE_CAP,
        });
    }
    Ok(odd_primes_upto(x).map_or_else(Vec::new, |odd| {
        let mut primes = vec![2];
        primes.extend(odd);
        primes
    }))
}

/// Odd primes `<= x`, or `None` when `x < 2`.
fn odd_primes_upto(x: u64) -> Option<impl Iterator<Item = u64>> {
    if x < 2 {
        return None;
    }
    let bits = OddComposites::new(x);
    Some((3..=x).step_by(2).filter(move |&v| !bits.is_composite(v)))
}

/// All primes `<= x`, found by dividing each candidate by every integer up to
/// its square root.
pub fn trial_division_oracle(x: u64) -> Result<Vec<u64>, SieveError> {
    if x > TRIAL_DIVISION_CAP {
        return Err(SieveError::BoundExceedsCap {
            bound: x,
            cap: TRIAL_DIVISION_CAP,
        });
    }
    Ok((2..=x)
        .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect())
}

/// Stream of primes produced by a segmented odd-only sieve.
///
/// Segments are sieved in batches of `threads`; each batch is reassembled in
/// ascending order before any of its primes are yielded.
pub struct PrimeStream {
    segment_length: u64,
    limit: Limit,
    /// Inclusive upper end of the range currently provisioned with base primes.
    bound: u64,
    base_primes: Arc<Vec<u64>>,
    /// Next integer not yet handed to a segment (always even once sieving starts).
    next_lo: u64,
    start: u64,
    emitted: u64,
    last: Option<u64>,
    buffer: Vec<u64>,
    cursor: usize,
    pool: Option<rayon::ThreadPool>,
    threads: usize,
    exhausted: bool,
}

impl std::fmt::Debug for PrimeStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeStream")
            .field("limit", &self.limit)
            .field("emitted", &self.emitted)
            .field("last", &self.last)
            .field("exhausted", &self.exhausted)
            .finish()
    }
}

/// Build a prime stream for `config`.
pub fn segmented_stream(config: &SieveConfig) -> Result<PrimeStream, SieveError> {
    config.validate()?;
    let bound = config.value_bound();
    let pool = if config.threads > 1 {
        // A pool that fails to build only costs parallelism.
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .ok()
    } else {
        None
    };
    Ok(PrimeStream {
        segment_length: config.segment_length,
        limit: config.limit,
        bound,
        base_primes: Arc::new(odd_base_primes(bound)),
        next_lo: config.start & !1,
        start: config.start,
        emitted: 0,
        last: None,
        buffer: Vec::new(),
        cursor: 0,
        pool,
        threads: config.threads,
        exhausted: false,
    })
}

fn odd_base_primes(bound: u64) -> Vec<u64> {
    odd_primes_upto(bound.isqrt()).map_or_else(Vec::new, Iterator::collect)
}

impl PrimeStream {
    /// Number of primes emitted so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Smallest integer the stream has not yet ruled on.
    pub fn position(&self) -> u64 {
        self.last.map_or(self.start, |p| p + 1)
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    fn refill(&mut self) -> bool {
        self.buffer.clear();
        self.cursor = 0;
        loop {
            let mut ranges = Vec::with_capacity(self.threads);
            while ranges.len() < self.threads {
                let lo = self.next_lo;
                let hi = match self.limit {
                    Limit::MaxValue(x) if lo > x => break,
                    Limit::MaxValue(x) => lo.saturating_add(self.segment_length).min(x + 1),
                    Limit::MaxCount(_) if lo >= MAX_BOUND => break,
                    Limit::MaxCount(_) => lo.saturating_add(self.segment_length).min(MAX_BOUND),
                };
                if hi - 1 > self.bound {
                    // Only reachable for count limits whose sizing estimate fell
                    // short, i.e. a misreported `primes_before_start`.
                    self.bound = (hi - 1).max(self.bound.saturating_mul(2)).min(MAX_BOUND);
                    self.base_primes = Arc::new(odd_base_primes(self.bound));
                }
                self.next_lo = hi;
                ranges.push((lo, hi));
            }
            if ranges.is_empty() {
                return false;
            }
            let base = &self.base_primes;
            let segments: Vec<Vec<u64>> = match &self.pool {
                Some(pool) if ranges.len() > 1 => pool.install(|| {
                    ranges
                        .par_iter()
                        .map(|&(lo, hi)| sieve_segment(lo, hi, base))
                        .collect()
                }),
                _ => ranges
                    .iter()
                    .map(|&(lo, hi)| sieve_segment(lo, hi, base))
                    .collect(),
            };
            for segment in segments {
                self.buffer
                    .extend(segment.into_iter().filter(|&p| p >= self.start));
            }
            if !self.buffer.is_empty() {
                return true;
            }
        }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.exhausted {
            return None;
        }
        if let Limit::MaxCount(n) = self.limit {
            if self.emitted >= n {
                self.exhausted = true;
                return None;
            }
        }
        if self.cursor == self.buffer.len() && !self.refill() {
            self.exhausted = true;
            return None;
        }
        let p = self.buffer[self.cursor];
        self.cursor += 1;
        self.emitted += 1;
        self.last = Some(p);
        Some(p)
    }
}

/// Primes in `[lo, hi)`; `lo` is even and `base` holds every odd prime up to
/// `sqrt(hi - 1)`.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    debug_assert!(lo.is_multiple_of(2) && lo < hi);
    // Slot j stands for the odd number lo + 1 + 2j.
    let slots = ((hi - lo) / 2) as usize;
    let mut composite = vec![false; slots];
    let first_odd = lo + 1;
    for &p in base {
        let square = p * p;
        if square >= hi {
            break;
        }
        let mut m = first_odd.div_ceil(p) * p;
        if m % 2 == 0 {
            m += p;
        }
        let mut j = ((m.max(square) - first_odd) / 2) as usize;
        while j < slots {
            composite[j] = true;
            j += p as usize;
        }
    }
    let mut primes = Vec::with_capacity(slots / 8 + 1);
    if lo <= 2 && 2 < hi {
        primes.push(2);
    }
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|&(_, &c)| !c)
            .map(|(j, _)| first_odd + 2 * j as u64)
            .filter(|&v| v > 1),
    );
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(limit: Limit) -> Vec<u64> {
        segmented_stream(&SieveConfig::new(limit))
            .unwrap()
            .collect()
    }

    #[test]
    fn simple_sieve_small_bounds() {
        assert!(simple_sieve(0).unwrap().is_empty());
        assert!(simple_sieve(1).unwrap().is_empty());
        assert_eq!(simple_sieve(2).unwrap(), vec![2]);
        assert_eq!(simple_sieve(10).unwrap(), vec![2, 3, 5, 7]);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            simple_sieve(SIMPLE_SIEVE_CAP + 1),
            Err(SieveError::BoundExceedsCap { .. })
        ));
        assert!(matches!(
            trial_division_oracle(TRIAL_DIVISION_CAP + 1),
            Err(SieveError::BoundExceedsCap { .. })
        ));
    }

    #[test]
    fn trial_division_small_bounds() {
        assert_eq!(trial_division_oracle(2).unwrap(), vec![2]);
        assert_eq!(
            trial_division_oracle(30).unwrap(),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
    }

    #[test]
    fn count_limited_stream() {
        assert_eq!(stream(Limit::MaxCount(5)), vec![2, 3, 5, 7, 11]);
        assert_eq!(stream(Limit::MaxCount(1)), vec![2]);
    }

    #[test]
    fn value_limited_stream_to_100() {
        let primes = stream(Limit::MaxValue(100));
        assert_eq!(primes.len(), 25);
        assert_eq!(primes.last(), Some(&97));
        assert_eq!(primes, trial_division_oracle(100).unwrap());
    }

    #[test]
    fn tiny_segments_and_odd_bounds() {
        for x in 2..200 {
            let got: Vec<u64> =
                segmented_stream(&SieveConfig::new(Limit::MaxValue(x)).with_segment_length(2))
                    .unwrap()
                    .collect();
            assert_eq!(got, trial_division_oracle(x).unwrap(), "x = {x}");
        }
    }

    #[test]
    fn config_validation() {
        let bad = |c: SieveConfig| segmented_stream(&c).unwrap_err();
        assert_eq!(
            bad(SieveConfig::new(Limit::MaxValue(100)).with_segment_length(3)),
            SieveError::BadSegmentLength(3)
        );
        assert_eq!(
            bad(SieveConfig::new(Limit::MaxValue(100)).with_segment_length(0)),
            SieveError::BadSegmentLength(0)
        );
        assert_eq!(
            bad(SieveConfig::new(Limit::MaxValue(1))),
            SieveError::ValueLimitTooSmall(1)
        );
        assert_eq!(
            bad(SieveConfig::new(Limit::MaxCount(0))),
            SieveError::ZeroCount
        );
        assert_eq!(
            bad(SieveConfig::new(Limit::MaxValue(100)).with_threads(0)),
            SieveError::ZeroThreads
        );
        assert!(matches!(
            bad(SieveConfig::new(Limit::MaxValue(u64::MAX))),
            SieveError::BoundExceedsCap { .. }
        ));
    }

    #[test]
    fn upper_bound_small_table() {
        let primes = trial_division_oracle(100).unwrap();
        for n in 1..=25u64 {
            assert!(
                nth_prime_upper_bound(n) >= primes[n as usize - 1],
                "n = {n}"
            );
        }
        assert!(nth_prime_upper_bound(1) >= 2);
        assert!(nth_prime_upper_bound(6) >= 13);
    }

    #[test]
    fn upper_bound_checked_by_sieving() {
        for n in [10u64, 100, 1_000, 10_000, 100_000] {
            let b = nth_prime_upper_bound(n);
            assert!(simple_sieve(b).unwrap().len() as u64 >= n, "n = {n}");
        }
    }

    #[test]
    fn resume_continues_the_sequence() {
        let all = stream(Limit::MaxCount(2_000));
        let head: Vec<u64> = segmented_stream(&SieveConfig::new(Limit::MaxCount(700)))
            .unwrap()
            .collect();
        let next = head.last().unwrap() + 1;
        let tail: Vec<u64> =
            segmented_stream(&SieveConfig::new(Limit::MaxCount(1_300)).resume_at(next, 700))
                .unwrap()
                .collect();
        assert_eq!([head, tail].concat(), all);
    }

    #[test]
    fn undersized_resume_hint_still_completes() {
        let all = stream(Limit::MaxCount(5_000));
        let tail: Vec<u64> =
            segmented_stream(&SieveConfig::new(Limit::MaxCount(4_000)).resume_at(all[999] + 1, 0))
                .unwrap()
                .collect();
        assert_eq!(tail, all[1000..]);
    }

    #[test]
    fn position_tracks_last_prime() {
        let mut s = segmented_stream(&SieveConfig::new(Limit::MaxCount(3))).unwrap();
        assert_eq!(s.position(), 0);
        s.next();
        s.next();
        assert_eq!(s.position(), 4);
        assert_eq!(s.emitted(), 2);
        s.next();
        assert_eq!(s.next(), None);
        assert!(s.is_exhausted());
    }
}
