//! Binary checkpoint for resuming long races.
//!
//! Layout, little-endian, 73 bytes:
//!
//! ```text
//! "PRACE"          5 bytes magic
//! version          u32
//! modulus          u64
//! np               u64
//! count1           u64
//! count5           u64   (count of residue modulus - 1)
//! neither          u64
//! last_prime       u64   (0 before the first prime)
//! next_position    u64
//! checksum         u64   wrapping sum of version and the seven words above
//! ```
//!
//! Only two-class moduli (3, 4, 6) can be checkpointed.

use thiserror::Error;

use crate::race::RaceCounters;
use crate::residue::Modulus;

pub const MAGIC: &[u8; 5] = b"PRACE";
pub const FORMAT_VERSION: u32 = 1;
pub const ENCODED_LEN: usize = 5 + 4 + 8 * 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckpointError {
    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt checkpoint: {0}")]
    Corrupt(&'static str),
    #[error("modulus {0} cannot be checkpointed: it has more than two coprime residue classes")]
    UnsupportedModulus(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub format_version: u32,
    pub counters: RaceCounters,
    /// First integer the resumed sieve must consider.
    pub next_position: u64,
}

impl Checkpoint {
    pub fn capture(counters: &RaceCounters) -> Result<Self, CheckpointError> {
        if !counters.modulus().is_two_class() {
            return Err(CheckpointError::UnsupportedModulus(
                counters.modulus().value(),
            ));
        }
        Ok(Checkpoint {
            format_version: FORMAT_VERSION,
            next_position: counters.last_prime().map_or(0, |p| p + 1),
            counters: counters.clone(),
        })
    }

    fn words(&self) -> [u64; 7] {
        let c = &self.counters;
        [
            c.modulus().value(),
            c.np(),
            c.count1(),
            c.count5(),
            c.neither(),
            c.last_prime().unwrap_or(0),
            self.next_position,
        ]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let words = self.words();
        let mut out = Vec::with_capacity(ENCODED_LEN);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.format_version.to_le_bytes());
        for w in words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.extend_from_slice(&checksum(self.format_version, &words).to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(CheckpointError::Corrupt("bad magic"));
        }
        if bytes.len() != ENCODED_LEN {
            return Err(CheckpointError::Corrupt("wrong length"));
        }
        let version = u32::from_le_bytes(bytes[5..9].try_into().unwrap());
        let word = |i: usize| {
            let at = 9 + 8 * i;
            u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
        };
        let words: [u64; 7] = std::array::from_fn(word);
        if word(7) != checksum(version, &words) {
            return Err(CheckpointError::Corrupt("checksum mismatch"));
        }
        if version != FORMAT_VERSION {
            return Err(CheckpointError::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let [modulus, np, count1, count5, neither, last_prime, next_position] = words;
        let modulus =
            Modulus::new(modulus).map_err(|_| CheckpointError::Corrupt("invalid modulus"))?;
        if !modulus.is_two_class() {
            return Err(CheckpointError::UnsupportedModulus(modulus.value()));
        }
        let counters = RaceCounters::from_two_class(modulus, count1, count5, neither, last_prime)
            .ok_or(CheckpointError::Corrupt("counter overflow"))?;
        if counters.np() != np {
            return Err(CheckpointError::Corrupt(
                "np differs from the sum of class counts",
            ));
        }
        let consistent_position = match counters.last_prime() {
            None => last_prime == 0,
            Some(p) => p >= 2 && next_position > p,
        };
        if !consistent_position {
            return Err(CheckpointError::Corrupt(
                "sieve position inconsistent with last prime",
            ));
        }
        Ok(Checkpoint {
            format_version: version,
            counters,
            next_position,
        })
    }
}

fn checksum(version: u32, words: &[u64; 7]) -> u64 {
    words
        .iter()
        .fold(u64::from(version), |acc, &w| acc.wrapping_add(w))
}
