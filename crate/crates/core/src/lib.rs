//! Prime races between residue classes modulo 6 (and other small moduli).
//!
//! * [`sieve`] streams primes in ascending order and provides two slower
//!   oracles to cross-check the stream.
//! * [`race`] classifies each prime and tracks `delta = count5 - count1`
//!   against the number of primes consumed, with extrema and zero crossings.
//! * [`checkpoint`] serializes race state so long runs can be resumed.
//! * [`products`] covers the multiplication rules between the two classes,
//!   the product counts they imply, and a census of composites per class.

pub mod checkpoint;
pub mod products;
pub mod race;
pub mod residue;
pub mod sieve;

pub use checkpoint::{Checkpoint, CheckpointError};
pub use products::{
    closure_class, composite_census, count_cross_class_products, count_same_class_products,
    enumerate_products, enumerate_products_through, multiplicity_histogram, CensusReport,
    ClassCensus, MultiplicityHistogram, ProductCountReport, ProductsError,
};
pub use race::{
    delta_series, sign_changes, DeltaSample, DeltaSeries, Race, RaceCounters, RaceError,
    RaceSummary, SignChange,
};
pub use residue::{classify, classify_residue, Modulus, ResidueClass};
pub use sieve::{
    nth_prime_upper_bound, segmented_stream, simple_sieve, trial_division_oracle, Limit,
    PrimeStream, SieveConfig, SieveError,
};
