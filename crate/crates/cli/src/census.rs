use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::Args;
use primerace_core::products::{CENSUS_CAP, HISTOGRAM_CAP};
use primerace_core::{
    composite_census, multiplicity_histogram, MultiplicityHistogram, ResidueClass,
};

use crate::failure::Failure;

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// Count integers in [1, X].
    #[arg(long)]
    limit: u64,
    /// Write the multiplicity histogram CSV here.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

pub fn run(args: &CensusArgs) -> Result<(), Failure> {
    if args.limit == 0 || args.limit > CENSUS_CAP {
        return Err(Failure::config(format!(
            "--limit must be in [1, {CENSUS_CAP}]"
        )));
    }
    let census = composite_census(args.limit).map_err(Failure::config)?;
    let histograms = if args.limit <= HISTOGRAM_CAP {
        let h = |class| multiplicity_histogram(args.limit, class).map_err(Failure::config);
        Some([h(ResidueClass::R1)?, h(ResidueClass::R5)?])
    } else {
        None
    };

    let identity = census.identity_holds() && census.members_balance();
    let mut out = io::stdout().lock();
    let stdout_failure = |e| Failure::io(Path::new("<stdout>"), e);
    (|| -> io::Result<()> {
        writeln!(out, "limit: {}", census.x)?;
        for (name, class) in [("r1", &census.r1), ("r5", &census.r5)] {
            writeln!(out, "{name}_integers: {}", class.total)?;
            writeln!(out, "{name}_primes: {}", class.primes)?;
            writeln!(out, "{name}_composites: {}", class.composites)?;
        }
        writeln!(
            out,
            "unit_in_r1: {}",
            if census.unit { "yes" } else { "no" }
        )?;
        writeln!(out, "delta: {}", census.delta())?;
        writeln!(out, "identity: {}", if identity { "PASS" } else { "FAIL" })?;
        match &histograms {
            Some([r1, r5]) => {
                writeln!(out, "r1_multiplicity: {}", inline(r1))?;
                writeln!(out, "r5_multiplicity: {}", inline(r5))?;
                writeln!(out, "r1_factor_pairs: {}", r1.factor_pairs())?;
                writeln!(out, "r5_factor_pairs: {}", r5.factor_pairs())?;
            }
            None => writeln!(out, "multiplicity: skipped (limit above {HISTOGRAM_CAP})")?,
        }
        out.flush()
    })()
    .map_err(stdout_failure)?;

    if let (Some(path), Some(histograms)) = (&args.out, &histograms) {
        write_histograms(path, histograms).map_err(|e| Failure::io(path, e))?;
    }

    if identity {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "census identity violated at x = {}",
            census.x
        )))
    }
}

/// `r:count` pairs, space separated.
fn inline(h: &MultiplicityHistogram) -> String {
    let parts: Vec<String> = h.buckets.iter().map(|(r, n)| format!("{r}:{n}")).collect();
    if parts.is_empty() {
        "none".to_owned()
    } else {
        parts.join(" ")
    }
}

fn write_histograms(path: &Path, histograms: &[MultiplicityHistogram]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "class,factor_pairs,composites")?;
    for h in histograms {
        for (r, n) in &h.buckets {
            writeln!(w, "{},{r},{n}", h.class)?;
        }
    }
    w.flush()
}
