//! Products across the progressions `1 + 6n` and `5 + 6n`.
//!
//! Multiplication is closed over the two classes: like times like lands in
//! `1 + 6n`, unlike lands in `5 + 6n`. Taking factors from the first `n + 1`
//! terms of each progression (the unit excluded), there are `(n + 1)^2`
//! unordered same-class products and `n (n + 1)` cross-class ones.
//! [`enumerate_products`] counts them by brute force so the closed forms are
//! checked rather than assumed.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::residue::{classify, ResidueClass};
use crate::sieve::OddComposites;

/// Largest depth accepted by [`enumerate_products`].
pub const ENUMERATION_CAP: u64 = 10_000;
/// Largest bound accepted by [`composite_census`].
pub const CENSUS_CAP: u64 = 100_000_000;
/// Largest bound accepted by [`multiplicity_histogram`].
pub const HISTOGRAM_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductsError {
    #[error("closure is only defined for R1 and R5 operands, got {0} and {1}")]
    NeitherOperand(ResidueClass, ResidueClass),
    #[error("{what} bound {bound} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        bound: u64,
        cap: u64,
    },
    #[error("census bound must be at least 1")]
    EmptyRange,
    #[error("{a} * {b} = {product} is not in the expected class {expected}")]
    ClosureViolation {
        a: u64,
        b: u64,
        product: u64,
        expected: ResidueClass,
    },
}

/// Class of a product of members of classes `a` and `b`.
pub fn closure_class(a: ResidueClass, b: ResidueClass) -> Result<ResidueClass, ProductsError> {
    use ResidueClass::*;
    match (a, b) {
        (R1, R1) | (R5, R5) => Ok(R1),
        (R1, R5) | (R5, R1) => Ok(R5),
        _ => Err(ProductsError::NeitherOperand(a, b)),
    }
}

/// Progression index of the product of the `n1`-th term of `a` and the
/// `n2`-th term of `b`, using the expanded forms
///
/// * `(1 + 6n1)(1 + 6n2) = 1 + 6(n1 + n2 + 6 n1 n2)`
/// * `(5 + 6n1)(5 + 6n2) = 1 + 6(4 + 5n1 + 5n2 + 6 n1 n2)`
/// * `(1 + 6n1)(5 + 6n2) = 5 + 6(5n1 + n2 + 6 n1 n2)`
pub fn product_index(
    a: ResidueClass,
    n1: u64,
    b: ResidueClass,
    n2: u64,
) -> Result<(ResidueClass, u64), ProductsError> {
    use ResidueClass::*;
    let class = closure_class(a, b)?;
    let n3 = match (a, b) {
        (R1, R1) => n1 + n2 + 6 * n1 * n2,
        (R5, R5) => 4 + 5 * n1 + 5 * n2 + 6 * n1 * n2,
        (R1, R5) => 5 * n1 + n2 + 6 * n1 * n2,
        (R5, R1) => 5 * n2 + n1 + 6 * n1 * n2,
        _ => unreachable!("rejected by closure_class"),
    };
    Ok((class, n3))
}

/// Unordered same-class products from the first `n + 1` terms of each
/// progression: `(n + 1)^2`.
///
/// Of these, `n(n + 1)/2` come from `1 + 6n` (the unit excluded leaves `n`
/// terms) and `(n + 1)(n + 2)/2` from `5 + 6n`.
pub fn count_same_class_products(n: u64) -> u128 {
    let n = u128::from(n);
    (n + 1) * (n + 1)
}

/// Cross-class products: each of the `n + 1` terms of `5 + 6n` times each of
/// the `n` non-unit terms of `1 + 6n`.
pub fn count_cross_class_products(n: u64) -> u128 {
    let n = u128::from(n);
    n * (n + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductCountReport {
    pub n: u64,
    pub same_class_closed: u128,
    pub cross_class_closed: u128,
    pub same_class_enumerated: u128,
    pub cross_class_enumerated: u128,
}

impl ProductCountReport {
    pub fn agrees(&self) -> bool {
        self.same_class_closed == self.same_class_enumerated
            && self.cross_class_closed == self.cross_class_enumerated
    }
}

/// Count products at depth `n` by listing every factor pair and checking the
/// residue of each product.
pub fn enumerate_products(n: u64) -> Result<ProductCountReport, ProductsError> {
    if n > ENUMERATION_CAP {
        return Err(ProductsError::CapExceeded {
            what: "enumeration",
            bound: n,
            cap: ENUMERATION_CAP,
        });
    }
    // The unit is never a factor.
    let ones: Vec<u64> = (1..=n).map(|i| 1 + 6 * i).collect();
    let fives: Vec<u64> = (0..=n).map(|i| 5 + 6 * i).collect();

    let check = |a: u64, b: u64, expected: ResidueClass| {
        let product = a * b;
        if classify(product) == expected {
            Ok(())
        } else {
            Err(ProductsError::ClosureViolation {
                a,
                b,
                product,
                expected,
            })
        }
    };

    let mut same = 0u128;
    for terms in [&ones, &fives] {
        for (i, &a) in terms.iter().enumerate() {
            for &b in &terms[i..] {
                check(a, b, ResidueClass::R1)?;
                same += 1;
            }
        }
    }
    let mut cross = 0u128;
    for &a in &ones {
        for &b in &fives {
            check(a, b, ResidueClass::R5)?;
            cross += 1;
        }
    }

    Ok(ProductCountReport {
        n,
        same_class_closed: count_same_class_products(n),
        cross_class_closed: count_cross_class_products(n),
        same_class_enumerated: same,
        cross_class_enumerated: cross,
    })
}

/// Reports for every depth `0..=n_max`, enumerated incrementally: depth `n`
/// adds only the pairs that involve a term of index `n`, so the whole table
/// costs as much as a single enumeration at `n_max`.
pub fn enumerate_products_through(n_max: u64) -> Result<Vec<ProductCountReport>, ProductsError> {
    if n_max > ENUMERATION_CAP {
        return Err(ProductsError::CapExceeded {
            what: "enumeration",
            bound: n_max,
            cap: ENUMERATION_CAP,
        });
    }
    let check = |a: u64, b: u64, expected: ResidueClass| {
        let product = a * b;
        if classify(product) == expected {
            Ok(())
        } else {
            Err(ProductsError::ClosureViolation {
                a,
                b,
                product,
                expected,
            })
        }
    };
    let one = |i: u64| 1 + 6 * i;
    let five = |i: u64| 5 + 6 * i;

    let mut same = 0u128;
    let mut cross = 0u128;
    let mut reports = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        if n >= 1 {
            // New non-unit term of 1 + 6n against itself and earlier non-unit terms.
            for i in 1..=n {
                check(one(n), one(i), ResidueClass::R1)?;
                same += 1;
            }
            // ... and against every term of 5 + 6n up to depth n.
            for j in 0..=n {
                check(one(n), five(j), ResidueClass::R5)?;
                cross += 1;
            }
        }
        for j in 0..=n {
            check(five(n), five(j), ResidueClass::R1)?;
            same += 1;
        }
        // New term of 5 + 6n against earlier non-unit terms of 1 + 6n.
        for i in 1..n {
            check(one(i), five(n), ResidueClass::R5)?;
            cross += 1;
        }
        reports.push(ProductCountReport {
            n,
            same_class_closed: count_same_class_products(n),
            cross_class_closed: count_cross_class_products(n),
            same_class_enumerated: same,
            cross_class_enumerated: cross,
        });
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCensus {
    /// Integers in `[1, x]` in the class.
    pub total: u64,
    pub primes: u64,
    pub composites: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusReport {
    pub x: u64,
    pub r1: ClassCensus,
    pub r5: ClassCensus,
    /// Whether the unit 1 (a member of R1, neither prime nor composite) is in range.
    pub unit: bool,
}

impl CensusReport {
    /// `primes_R5(x) - primes_R1(x)`.
    pub fn delta(&self) -> i64 {
        self.r5.primes as i64 - self.r1.primes as i64
    }

    /// Every class member is exactly one of prime, composite or the unit.
    pub fn members_balance(&self) -> bool {
        self.r1.total == self.r1.primes + self.r1.composites + u64::from(self.unit)
            && self.r5.total == self.r5.primes + self.r5.composites
    }

    /// `composites_R1 - composites_R5 = (N_R1 - N_R5) - 1 + delta`.
    pub fn identity_holds(&self) -> bool {
        let lhs = self.r1.composites as i128 - self.r5.composites as i128;
        let unit = i128::from(self.unit);
        let rhs = self.r1.total as i128 - self.r5.total as i128 - unit + self.delta() as i128;
        lhs == rhs
    }
}

/// Classify every integer in `[1, x]` lying on `1 + 6n` or `5 + 6n`.
pub fn composite_census(x: u64) -> Result<CensusReport, ProductsError> {
    if x == 0 {
        return Err(ProductsError::EmptyRange);
    }
    if x > CENSUS_CAP {
        return Err(ProductsError::CapExceeded {
            what: "census",
            bound: x,
            cap: CENSUS_CAP,
        });
    }
    let composites = OddComposites::new(x);
    let tally = |first: u64| {
        let mut census = ClassCensus::default();
        for v in (first..=x).step_by(6) {
            census.total += 1;
            if v == 1 {
                continue;
            }
            if composites.is_composite(v) {
                census.composites += 1;
            } else {
                census.primes += 1;
            }
        }
        census
    };
    Ok(CensusReport {
        x,
        r1: tally(1),
        r5: tally(5),
        unit: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityHistogram {
    pub x: u64,
    pub class: ResidueClass,
    /// Number of factor pairs `r` mapped to how many composites have exactly `r`.
    pub buckets: BTreeMap<u64, u64>,
}

impl MultiplicityHistogram {
    /// Composites counted, one per entry.
    pub fn composites(&self) -> u64 {
        self.buckets.values().sum()
    }

    /// Total unordered factor pairs `d * e`, `1 < d <= e`, over the class.
    pub fn factor_pairs(&self) -> u64 {
        self.buckets.iter().map(|(r, n)| r * n).sum()
    }
}

/// For each composite `c <= x` in `class`, the number of ways to write
/// `c = d * e` with `1 < d <= e`, bucketed by that number.
///
/// The count is derived from the divisor count: `ceil(tau(c) / 2) - 1`.
pub fn multiplicity_histogram(
    x: u64,
    class: ResidueClass,
) -> Result<MultiplicityHistogram, ProductsError> {
    if x > HISTOGRAM_CAP {
        return Err(ProductsError::CapExceeded {
            what: "histogram",
            bound: x,
            cap: HISTOGRAM_CAP,
        });
    }
    let first = match class {
        ResidueClass::R1 => 7,
        ResidueClass::R5 => 5,
        ResidueClass::Neither => return Err(ProductsError::NeitherOperand(class, class)),
    };
    let spf = smallest_prime_factors(x);
    let mut buckets = BTreeMap::new();
    for c in (first..=x).step_by(6) {
        let tau = divisor_count(c, &spf);
        let pairs = tau.div_ceil(2) - 1;
        if pairs > 0 {
            *buckets.entry(pairs).or_insert(0) += 1;
        }
    }
    Ok(MultiplicityHistogram { x, class, buckets })
}

fn smallest_prime_factors(x: u64) -> Vec<u32> {
    let len = x as usize + 1;
    let mut spf = vec![0u32; len];
    for i in 2..len {
        if spf[i] != 0 {
            continue;
        }
        spf[i] = i as u32;
        let mut j = i.saturating_mul(i);
        while j < len {
            if spf[j] == 0 {
                spf[j] = i as u32;
            }
            j += i;
        }
    }
    spf
}

fn divisor_count(mut v: u64, spf: &[u32]) -> u64 {
    let mut tau = 1;
    while v > 1 {
        let p = u64::from(spf[v as usize]);
        let mut exponent = 0;
        while v.is_multiple_of(p) {
            v /= p;
            exponent += 1;
        }
        tau *= exponent + 1;
    }
    tau
}
