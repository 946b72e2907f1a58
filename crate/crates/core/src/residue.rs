//! Residue classes modulo 6 and their generalization to an arbitrary modulus.

use std::fmt;

use thiserror::Error;

/// Position of an integer relative to the progressions `1 + 6n` and `5 + 6n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResidueClass {
    /// `v = 1 + 6n`.
    R1,
    /// `v = 5 + 6n`.
    R5,
    /// Divisible by 2 or 3; among primes only 2 and 3.
    Neither,
}

impl ResidueClass {
    /// Index `n` of `v` within its progression (`v = r + 6n`), if it lies on one.
    pub fn progression_index(v: u64) -> Option<u64> {
        match classify(v) {
            ResidueClass::R1 | ResidueClass::R5 => Some(v / 6),
            ResidueClass::Neither => None,
        }
    }

    /// The `n`-th term of this progression.
    pub fn term(self, n: u64) -> Option<u64> {
        match self {
            ResidueClass::R1 => Some(1 + 6 * n),
            ResidueClass::R5 => Some(5 + 6 * n),
            ResidueClass::Neither => None,
        }
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidueClass::R1 => "R1",
            ResidueClass::R5 => "R5",
            ResidueClass::Neither => "neither",
        })
    }
}

/// Mod-6 classification of `v`.
pub fn classify(v: u64) -> ResidueClass {
    match v % 6 {
        1 => ResidueClass::R1,
        5 => ResidueClass::R5,
        _ => ResidueClass::Neither,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("modulus must be at least 3, got {0}")]
pub struct InvalidModulus(pub u64);

/// A race modulus `m >= 3` together with its residues coprime to `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    value: u64,
    coprime: Vec<u64>,
}

/// Moduli above this are rejected: per-residue counters are stored densely.
pub const MAX_MODULUS: u64 = 1 << 20;

impl Modulus {
    pub const SIX: u64 = 6;

    pub fn new(value: u64) -> Result<Self, InvalidModulus> {
        if !(3..=MAX_MODULUS).contains(&value) {
            return Err(InvalidModulus(value));
        }
        let coprime = (1..value).filter(|&r| gcd(r, value) == 1).collect();
        Ok(Modulus { value, coprime })
    }

    pub fn six() -> Self {
        Modulus::new(Self::SIX).expect("6 is a valid modulus")
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Residues coprime to the modulus, ascending.
    pub fn coprime_residues(&self) -> &[u64] {
        &self.coprime
    }

    /// True when exactly two residue classes hold all but finitely many
    /// primes (m = 3, 4, 6). Only then is a single signed delta defined.
    pub fn is_two_class(&self) -> bool {
        self.coprime.len() == 2
    }

    /// Residue of `v` when coprime to the modulus, else `None` ("neither").
    pub fn classify(&self, v: u64) -> Option<u64> {
        let r = v % self.value;
        (gcd(r, self.value) == 1).then_some(r)
    }
}

/// Generalized classification: the residue of `v` modulo `modulus` when the
/// two are coprime, otherwise `None`.
pub fn classify_residue(v: u64, modulus: &Modulus) -> Option<u64> {
    modulus.classify(v)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_six_examples() {
        assert_eq!(classify(5), ResidueClass::R5);
        assert_eq!(classify(3), ResidueClass::Neither);
        assert_eq!(classify(2), ResidueClass::Neither);
        assert_eq!(classify(49), ResidueClass::R1);
        assert_eq!(classify(7), ResidueClass::R1);
    }

    #[test]
    fn generalized_agrees_with_mod_six() {
        let six = Modulus::six();
        for v in 2..1000 {
            let expected = match classify(v) {
                ResidueClass::R1 => Some(1),
                ResidueClass::R5 => Some(5),
                ResidueClass::Neither => None,
            };
            assert_eq!(classify_residue(v, &six), expected, "v = {v}");
        }
    }

    #[test]
    fn modulus_bookkeeping() {
        assert_eq!(Modulus::new(2), Err(InvalidModulus(2)));
        assert_eq!(Modulus::six().coprime_residues(), &[1, 5]);
        assert_eq!(Modulus::new(4).unwrap().coprime_residues(), &[1, 3]);
        assert_eq!(Modulus::new(10).unwrap().coprime_residues(), &[1, 3, 7, 9]);
        assert!(Modulus::new(3).unwrap().is_two_class());
        assert!(!Modulus::new(5).unwrap().is_two_class());
        let m10 = Modulus::new(10).unwrap();
        assert_eq!(m10.classify(5), None);
        assert_eq!(m10.classify(13), Some(3));
    }

    #[test]
    fn progression_terms() {
        assert_eq!(ResidueClass::R1.term(2), Some(13));
        assert_eq!(ResidueClass::R5.term(2), Some(17));
        assert_eq!(ResidueClass::progression_index(17), Some(2));
        assert_eq!(ResidueClass::progression_index(15), None);
    }
}
