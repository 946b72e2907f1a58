//! The prime race: per-class running counts over an ascending prime stream and
//! the signed difference `delta = count5 - count1` as a function of the
//! number of primes consumed.
//!
//! For a general modulus `m` the counters keep one total per residue coprime
//! to `m`. A single signed delta only exists when there are exactly two such
//! residues (m = 3, 4, 6); it is then `count(m - 1) - count(1)`, which for
//! m = 6 reads `count5 - count1`.

use std::cmp::Ordering;

use thiserror::Error;

use crate::residue::Modulus;
use crate::sieve::SieveError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RaceError {
    #[error("prime {prime} does not exceed the previous prime {last}")]
    OutOfOrder { prime: u64, last: u64 },
    #[error("{0} is not a prime candidate")]
    NotPrime(u64),
    #[error("modulus {0} has more than two coprime residue classes; no single delta exists")]
    NotTwoClass(u64),
    #[error("sample stride must be at least 1")]
    ZeroStride,
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaceCounters {
    modulus: Modulus,
    np: u64,
    neither: u64,
    last_prime: u64,
    /// Indexed by residue; entries for residues not coprime to the modulus stay 0.
    counts: Vec<u64>,
}

impl RaceCounters {
    pub fn new(modulus: Modulus) -> Self {
        let counts = vec![0; modulus.value() as usize];
        RaceCounters {
            modulus,
            np: 0,
            neither: 0,
            last_prime: 0,
            counts,
        }
    }

    /// Rebuild counters for a two-class modulus from stored totals.
    pub(crate) fn from_two_class(
        modulus: Modulus,
        count1: u64,
        count_high: u64,
        neither: u64,
        last_prime: u64,
    ) -> Option<Self> {
        if !modulus.is_two_class() {
            return None;
        }
        let np = count1.checked_add(count_high)?.checked_add(neither)?;
        let mut counters = RaceCounters::new(modulus);
        let high = counters.high_residue();
        counters.counts[1] = count1;
        counters.counts[high] = count_high;
        counters.np = np;
        counters.neither = neither;
        counters.last_prime = last_prime;
        Some(counters)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Primes consumed so far (Np).
    pub fn np(&self) -> u64 {
        self.np
    }

    pub fn neither(&self) -> u64 {
        self.neither
    }

    pub fn last_prime(&self) -> Option<u64> {
        (self.np > 0).then_some(self.last_prime)
    }

    pub fn count_of(&self, residue: u64) -> u64 {
        self.counts.get(residue as usize).copied().unwrap_or(0)
    }

    /// Primes in the class of residue 1.
    pub fn count1(&self) -> u64 {
        self.counts[1]
    }

    /// Primes in the class of residue `m - 1` (residue 5 for m = 6).
    pub fn count5(&self) -> u64 {
        self.counts[self.high_residue()]
    }

    fn high_residue(&self) -> usize {
        self.counts.len() - 1
    }

    /// `count5 - count1`, defined only for two-class moduli.
    pub fn delta(&self) -> Option<i64> {
        self.modulus
            .is_two_class()
            .then(|| self.count5() as i64 - self.count1() as i64)
    }

    /// Per-residue totals in ascending residue order.
    pub fn residue_counts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.modulus
            .coprime_residues()
            .iter()
            .map(|&r| (r, self.counts[r as usize]))
    }

    pub fn is_consistent(&self) -> bool {
        let classified: u64 = self.residue_counts().map(|(_, c)| c).sum();
        classified + self.neither == self.np
    }

    /// Consume the next prime of the stream.
    pub fn accumulate(&mut self, prime: u64) -> Result<(), RaceError> {
        if prime < 2 {
            return Err(RaceError::NotPrime(prime));
        }
        if self.np > 0 && prime <= self.last_prime {
            return Err(RaceError::OutOfOrder {
                prime,
                last: self.last_prime,
            });
        }
        match self.modulus.classify(prime) {
            Some(r) => self.counts[r as usize] += 1,
            None => self.neither += 1,
        }
        self.np += 1;
        self.last_prime = prime;
        Ok(())
    }

    /// Current point of the delta series, for two-class moduli after at least
    /// one prime.
    pub fn sample(&self) -> Option<DeltaSample> {
        let delta = self.delta()?;
        let prime = self.last_prime()?;
        Some(DeltaSample {
            np: self.np,
            prime,
            count1: self.count1(),
            count5: self.count5(),
            delta,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaSample {
    pub np: u64,
    pub prime: u64,
    pub count1: u64,
    pub count5: u64,
    pub delta: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignChange {
    pub np: u64,
    pub prime: u64,
}

/// Reports every point where delta takes a nonzero sign different from the
/// last nonzero sign seen. Zero is neutral.
#[derive(Debug, Clone, Copy)]
pub struct SignChangeDetector {
    last_sign: Ordering,
}

impl Default for SignChangeDetector {
    fn default() -> Self {
        SignChangeDetector {
            last_sign: Ordering::Equal,
        }
    }
}

impl SignChangeDetector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Start as if the trajectory had last been strictly on `delta`'s side.
    pub fn seeded(delta: i64) -> Self {
        SignChangeDetector {
            last_sign: delta.cmp(&0),
        }
    }

    pub fn observe(&mut self, sample: &DeltaSample) -> Option<SignChange> {
        let sign = sample.delta.cmp(&0);
        if sign == Ordering::Equal {
            return None;
        }
        let previous = std::mem::replace(&mut self.last_sign, sign);
        (previous != Ordering::Equal && previous != sign).then_some(SignChange {
            np: sample.np,
            prime: sample.prime,
        })
    }
}

/// Zero crossings of a full-resolution delta trajectory.
pub fn sign_changes(trajectory: &[DeltaSample]) -> Vec<SignChange> {
    let mut detector = SignChangeDetector::new();
    trajectory
        .iter()
        .filter_map(|s| detector.observe(s))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaceSummary {
    pub last: DeltaSample,
    pub min_delta: i64,
    pub min_np: u64,
    pub max_delta: i64,
    pub max_np: u64,
    pub sign_changes: Vec<SignChange>,
}

/// Running extrema and crossings over every prime of a race.
#[derive(Debug, Clone)]
pub struct SummaryTracker {
    last: Option<DeltaSample>,
    min: (i64, u64),
    max: (i64, u64),
    detector: SignChangeDetector,
    sign_changes: Vec<SignChange>,
}

impl Default for SummaryTracker {
    fn default() -> Self {
        SummaryTracker {
            last: None,
            min: (i64::MAX, 0),
            max: (i64::MIN, 0),
            detector: SignChangeDetector::new(),
            sign_changes: Vec::new(),
        }
    }
}

impl SummaryTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Continue from a resumed state: extrema start at `sample` since the
    /// history before it is not retained.
    pub fn seeded(sample: DeltaSample) -> Self {
        SummaryTracker {
            last: Some(sample),
            min: (sample.delta, sample.np),
            max: (sample.delta, sample.np),
            detector: SignChangeDetector::seeded(sample.delta),
            sign_changes: Vec::new(),
        }
    }

    pub fn observe(&mut self, sample: DeltaSample) {
        if sample.delta < self.min.0 {
            self.min = (sample.delta, sample.np);
        }
        if sample.delta > self.max.0 {
            self.max = (sample.delta, sample.np);
        }
        if let Some(change) = self.detector.observe(&sample) {
            self.sign_changes.push(change);
        }
        self.last = Some(sample);
    }

    pub fn summary(&self) -> Option<RaceSummary> {
        let last = self.last?;
        Some(RaceSummary {
            last,
            min_delta: self.min.0,
            min_np: self.min.1,
            max_delta: self.max.0,
            max_np: self.max.1,
            sign_changes: self.sign_changes.clone(),
        })
    }
}

/// Counters plus sampling cadence plus (for two-class moduli) the summary
/// tracker.
#[derive(Debug, Clone)]
pub struct Race {
    counters: RaceCounters,
    stride: u64,
    tracker: Option<SummaryTracker>,
}

impl Race {
    pub fn new(modulus: Modulus, stride: u64) -> Result<Self, RaceError> {
        Self::resume(RaceCounters::new(modulus), stride)
    }

    pub fn resume(counters: RaceCounters, stride: u64) -> Result<Self, RaceError> {
        if stride == 0 {
            return Err(RaceError::ZeroStride);
        }
        let tracker = counters
            .modulus()
            .is_two_class()
            .then(|| match counters.sample() {
                Some(s) => SummaryTracker::seeded(s),
                None => SummaryTracker::new(),
            });
        Ok(Race {
            counters,
            stride,
            tracker,
        })
    }

    pub fn counters(&self) -> &RaceCounters {
        &self.counters
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    /// Consume one prime. Returns true when `np` lands on the sampling stride.
    pub fn push(&mut self, prime: u64) -> Result<bool, RaceError> {
        self.counters.accumulate(prime)?;
        if let Some(tracker) = &mut self.tracker {
            tracker.observe(
                self.counters
                    .sample()
                    .expect("two-class counters after a prime"),
            );
        }
        Ok(self.counters.np.is_multiple_of(self.stride))
    }

    /// True when the last consumed prime was not already emitted as a stride
    /// sample, so a closing sample is owed.
    pub fn needs_final_sample(&self) -> bool {
        self.counters.np > 0 && !self.counters.np.is_multiple_of(self.stride)
    }

    pub fn summary(&self) -> Option<RaceSummary> {
        self.tracker.as_ref()?.summary()
    }

    pub fn into_counters(self) -> RaceCounters {
        self.counters
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSeries {
    pub samples: Vec<DeltaSample>,
    pub summary: RaceSummary,
}

/// Run a two-class race over `primes`, keeping every `stride`-th sample plus
/// the final one. The summary covers every prime.
///
/// Returns `Ok(None)` for an empty stream.
pub fn delta_series<I>(
    primes: I,
    modulus: Modulus,
    stride: u64,
) -> Result<Option<DeltaSeries>, RaceError>
where
    I: IntoIterator<Item = u64>,
{
    if !modulus.is_two_class() {
        return Err(RaceError::NotTwoClass(modulus.value()));
    }
    let mut race = Race::new(modulus, stride)?;
    let mut samples = Vec::new();
    for p in primes {
        if race.push(p)? {
            samples.extend(race.counters().sample());
        }
    }
    if race.needs_final_sample() {
        samples.extend(race.counters().sample());
    }
    Ok(race
        .summary()
        .map(|summary| DeltaSeries { samples, summary }))
}
