use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::Args;
use primerace_core::products::{enumerate_products_through, ENUMERATION_CAP};

use crate::failure::Failure;
use crate::OutArgs;

pub const HEADER: &str =
    "n,same_class_closed,same_class_enumerated,cross_class_closed,cross_class_enumerated,status";

#[derive(Debug, Args)]
pub struct ProductsArgs {
    /// Largest progression depth to check.
    #[arg(long = "n-max")]
    n_max: u64,
    #[command(flatten)]
    out: OutArgs,
    /// Perturb the last closed-form value to exercise the failure path.
    #[arg(long = "inject-fault", hide = true)]
    inject_fault: bool,
}

pub fn run(args: &ProductsArgs) -> Result<(), Failure> {
    if args.n_max > ENUMERATION_CAP {
        return Err(Failure::config(format!(
            "--n-max must be at most {ENUMERATION_CAP}"
        )));
    }
    let mut reports =
        enumerate_products_through(args.n_max).map_err(|e| Failure::Verification(e.to_string()))?;
    if args.inject_fault {
        if let Some(last) = reports.last_mut() {
            last.same_class_closed += 1;
        }
    }

    let (table, mut report): (Box<dyn Write>, Box<dyn Write>) = match &args.out.out {
        Some(path) => (
            Box::new(File::create(path).map_err(|e| Failure::io(path, e))?),
            Box::new(io::stdout()),
        ),
        None => (Box::new(io::stdout()), Box::new(io::stderr())),
    };
    let out_path = args.out.out.as_deref().unwrap_or(Path::new("<stdout>"));
    let mut table = BufWriter::new(table);
    let write_table = |table: &mut BufWriter<Box<dyn Write>>| -> io::Result<()> {
        writeln!(table, "{HEADER}")?;
        for r in &reports {
            writeln!(
                table,
                "{},{},{},{},{},{}",
                r.n,
                r.same_class_closed,
                r.same_class_enumerated,
                r.cross_class_closed,
                r.cross_class_enumerated,
                if r.agrees() { "PASS" } else { "FAIL" }
            )?;
        }
        table.flush()
    };
    write_table(&mut table).map_err(|e| Failure::io(out_path, e))?;
    drop(table);

    let failures: Vec<u64> = reports
        .iter()
        .filter(|r| !r.agrees())
        .map(|r| r.n)
        .collect();
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    writeln!(report, "rows: {}", reports.len())
        .and_then(|()| writeln!(report, "failures: {}", failures.len()))
        .and_then(|()| writeln!(report, "status: {status}"))
        .map_err(|e| Failure::io(Path::new("<stdout>"), e))?;

    match failures.first() {
        None => Ok(()),
        Some(n) => Err(Failure::Verification(format!(
            "closed form disagrees with enumeration at n = {n} ({} depths)",
            failures.len()
        ))),
    }
}
