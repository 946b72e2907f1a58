use std::io::{self, Write};
use std::path::Path;

use clap::Args;
use primerace_core::sieve::{SIMPLE_SIEVE_CAP, TRIAL_DIVISION_CAP};
use primerace_core::{
    nth_prime_upper_bound, segmented_stream, simple_sieve, trial_division_oracle, Limit,
    SieveConfig,
};

use crate::failure::Failure;
use crate::SieveArgs;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Cross-validate on [2, X].
    #[arg(long, default_value_t = 10_000_000)]
    limit: u64,
    #[command(flatten)]
    sieve: SieveArgs,
}

pub fn run(args: &VerifyArgs) -> Result<(), Failure> {
    if !(2..=SIMPLE_SIEVE_CAP).contains(&args.limit) {
        return Err(Failure::config(format!(
            "--limit must be in [2, {SIMPLE_SIEVE_CAP}]"
        )));
    }
    let config = SieveConfig::new(Limit::MaxValue(args.limit))
        .with_segment_length(args.sieve.segment_size)
        .with_threads(args.sieve.threads());
    config.validate()?;

    let mut checks: Vec<(String, bool)> = Vec::new();

    let reference = simple_sieve(args.limit)?;
    let oracle_bound = args.limit.min(TRIAL_DIVISION_CAP);
    let oracle = trial_division_oracle(oracle_bound)?;
    let prefix = reference.partition_point(|&p| p <= oracle_bound);
    checks.push((
        format!("simple_sieve == trial_division on [2, {oracle_bound}]"),
        reference[..prefix] == oracle[..],
    ));

    let streamed: Vec<u64> = segmented_stream(&config)?.collect();
    checks.push((
        format!("segmented_stream == simple_sieve on [2, {}]", args.limit),
        streamed == reference,
    ));
    checks.push((
        "segmented_stream strictly increasing".to_owned(),
        streamed.windows(2).all(|w| w[0] < w[1]),
    ));

    let np = reference.len() as u64;
    let by_count: Vec<u64> = segmented_stream(&SieveConfig {
        limit: Limit::MaxCount(np),
        ..config.clone()
    })?
    .collect();
    checks.push((
        format!("MaxCount({np}) agrees with MaxValue({})", args.limit),
        by_count.len() as u64 == np && by_count.last() == reference.last(),
    ));
    checks.push((
        format!("nth_prime_upper_bound({np}) >= p_{np}"),
        reference
            .last()
            .is_some_and(|&p| nth_prime_upper_bound(np) >= p),
    ));

    let mut out = io::stdout().lock();
    let mut failed = 0;
    for (name, ok) in &checks {
        if !ok {
            failed += 1;
        }
        writeln!(out, "{}: {name}", if *ok { "PASS" } else { "FAIL" })
            .map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
    }
    writeln!(out, "primes: {np}").map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{failed} of {} checks failed",
            checks.len()
        )))
    }
}
