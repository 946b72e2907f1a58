use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use primerace_core::{
    segmented_stream, Checkpoint, Limit, Modulus, Race, RaceCounters, RaceSummary, SieveConfig,
};

use crate::failure::Failure;
use crate::{OutArgs, SieveArgs};

#[derive(Debug, Args)]
pub struct RaceArgs {
    #[command(flatten)]
    limit: LimitArgs,
    /// Race modulus; 6 races 5 mod 6 against 1 mod 6.
    #[arg(long, default_value_t = 6)]
    modulus: u64,
    /// Write a CSV row every K primes (the final prime is always written).
    #[arg(long = "sample-every", default_value_t = 1_000)]
    sample_every: u64,
    #[command(flatten)]
    sieve: SieveArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Checkpoint file, rewritten periodically and at the end of the run.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Primes between checkpoint saves.
    #[arg(long = "checkpoint-every", default_value_t = 1_000_000)]
    checkpoint_every: u64,
    /// Continue from --checkpoint, appending to --out.
    #[arg(long, requires = "checkpoint")]
    resume: bool,
    /// Stop once Np reaches this value, leaving a checkpoint behind.
    #[arg(long = "stop-after", hide = true, requires = "checkpoint")]
    stop_after: Option<u64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct LimitArgs {
    /// Analyse the first N primes.
    #[arg(long)]
    nprimes: Option<u64>,
    /// Analyse every prime up to X.
    #[arg(long)]
    limit: Option<u64>,
}

impl LimitArgs {
    fn limit(&self) -> Limit {
        match (self.nprimes, self.limit) {
            (Some(n), _) => Limit::MaxCount(n),
            (None, Some(x)) => Limit::MaxValue(x),
            (None, None) => unreachable!("clap requires one of the two"),
        }
    }
}

pub fn run(args: &RaceArgs) -> Result<(), Failure> {
    let started = Instant::now();
    if args.sample_every == 0 {
        return Err(Failure::config("--sample-every must be at least 1"));
    }
    if args.checkpoint_every == 0 {
        return Err(Failure::config("--checkpoint-every must be at least 1"));
    }
    let modulus = Modulus::new(args.modulus).map_err(Failure::config)?;
    let limit = args.limit.limit();
    let threads = args.sieve.threads();
    // Validates the user-facing limit before any file is touched.
    SieveConfig::new(limit)
        .with_segment_length(args.sieve.segment_size)
        .with_threads(threads)
        .validate()?;
    if args.checkpoint.is_some() && !modulus.is_two_class() {
        return Err(Failure::config(format!(
            "checkpoints need a modulus with two coprime residue classes (3, 4 or 6), got {}",
            modulus.value()
        )));
    }

    let counters = match (args.resume, &args.checkpoint) {
        (true, Some(path)) => load_checkpoint(path, &modulus, limit)?,
        _ => RaceCounters::new(modulus.clone()),
    };
    let resumed_from = args.resume.then(|| counters.np());
    let columns = header(&modulus);

    let (table, report): (Box<dyn Write>, Box<dyn Write>) = match (&args.out.out, args.resume) {
        (Some(path), true) => {
            truncate_for_resume(path, &columns, &counters, args.sample_every)?;
            let file = OpenOptions::new()
                .append(true)
                .open(path)
                .map_err(|e| Failure::io(path, e))?;
            (Box::new(file), Box::new(io::stdout()))
        }
        (Some(path), false) => {
            let mut file = File::create(path).map_err(|e| Failure::io(path, e))?;
            writeln!(file, "{columns}").map_err(|e| Failure::io(path, e))?;
            (Box::new(file), Box::new(io::stdout()))
        }
        (None, true) => return Err(Failure::config("--resume needs --out to append to")),
        (None, false) => {
            let mut out = io::stdout();
            writeln!(out, "{columns}").map_err(stdout_failure)?;
            (Box::new(out), Box::new(io::stderr()))
        }
    };
    let out_path = args
        .out
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut table = BufWriter::with_capacity(1 << 16, table);

    let remaining = match limit {
        Limit::MaxCount(n) => n
            .checked_sub(counters.np())
            .filter(|&r| r > 0)
            .map(Limit::MaxCount),
        Limit::MaxValue(x) => Some(Limit::MaxValue(x)),
    };
    let position = counters.last_prime().map_or(0, |p| p + 1);
    let primes_before = counters.np();
    let mut race = Race::resume(counters, args.sample_every).map_err(Failure::config)?;

    let mut interrupted = args
        .stop_after
        .is_some_and(|stop| race.counters().np() >= stop);
    if let (Some(remaining), false) = (remaining, interrupted) {
        let config = SieveConfig::new(remaining)
            .with_segment_length(args.sieve.segment_size)
            .with_threads(threads)
            .resume_at(position, primes_before);
        let mut since_checkpoint = 0u64;
        for p in segmented_stream(&config)? {
            let on_stride = race
                .push(p)
                .map_err(|e| Failure::Verification(e.to_string()))?;
            if on_stride {
                write_row(&mut table, race.counters()).map_err(|e| Failure::io(&out_path, e))?;
            }
            if let Some(path) = &args.checkpoint {
                since_checkpoint += 1;
                if since_checkpoint == args.checkpoint_every {
                    since_checkpoint = 0;
                    table.flush().map_err(|e| Failure::io(&out_path, e))?;
                    save_checkpoint(path, race.counters())?;
                }
            }
            if args
                .stop_after
                .is_some_and(|stop| race.counters().np() >= stop)
            {
                interrupted = true;
                break;
            }
        }
    }
    if !interrupted && race.needs_final_sample() {
        write_row(&mut table, race.counters()).map_err(|e| Failure::io(&out_path, e))?;
    }
    table.flush().map_err(|e| Failure::io(&out_path, e))?;
    drop(table);
    if let Some(path) = &args.checkpoint {
        save_checkpoint(path, race.counters())?;
    }

    let mut report = report;
    write_summary(&mut report, &race, resumed_from, interrupted, started)
        .and_then(|()| report.flush())
        .map_err(stdout_failure)
}

fn stdout_failure(e: io::Error) -> Failure {
    Failure::io(Path::new("<stdout>"), e)
}

fn load_checkpoint(path: &Path, modulus: &Modulus, limit: Limit) -> Result<RaceCounters, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    let checkpoint = Checkpoint::from_bytes(&bytes)?;
    let counters = checkpoint.counters;
    if counters.modulus() != modulus {
        return Err(Failure::config(format!(
            "checkpoint was taken with modulus {}, not {}",
            counters.modulus().value(),
            modulus.value()
        )));
    }
    let beyond = match limit {
        Limit::MaxCount(n) => counters.np() > n,
        Limit::MaxValue(x) => counters.last_prime().is_some_and(|p| p > x),
    };
    if beyond {
        return Err(Failure::config(
            "checkpoint lies beyond the requested limit",
        ));
    }
    Ok(counters)
}

fn save_checkpoint(path: &Path, counters: &RaceCounters) -> Result<(), Failure> {
    let bytes = Checkpoint::capture(counters)?.to_bytes();
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Failure::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Failure::io(path, e))
}

/// `np,prime,count<r>...` with a trailing `delta` for two-class moduli.
pub fn header(modulus: &Modulus) -> String {
    let mut h = String::from("np,prime");
    for r in modulus.coprime_residues() {
        h.push_str(&format!(",count{r}"));
    }
    if modulus.is_two_class() {
        h.push_str(",delta");
    }
    h
}

fn write_row(w: &mut impl Write, c: &RaceCounters) -> io::Result<()> {
    write!(w, "{},{}", c.np(), c.last_prime().unwrap_or(0))?;
    for (_, count) in c.residue_counts() {
        write!(w, ",{count}")?;
    }
    if let Some(delta) = c.delta() {
        write!(w, ",{delta}")?;
    }
    writeln!(w)
}

/// Drop rows written after the checkpoint was taken, and an off-stride
/// closing row at the checkpoint itself, so appending reproduces the
/// uninterrupted file.
fn truncate_for_resume(
    path: &Path,
    columns: &str,
    counters: &RaceCounters,
    stride: u64,
) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(columns) {
        return Err(Failure::config(format!(
            "{} does not start with `{columns}`",
            path.display()
        )));
    }
    let np = counters.np();
    let mut kept = format!("{columns}\n");
    for line in lines {
        let row_np: u64 = line
            .split(',')
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| {
                Failure::config(format!("malformed row in {}: {line}", path.display()))
            })?;
        if row_np < np || (row_np == np && np.is_multiple_of(stride)) {
            kept.push_str(line);
            kept.push('\n');
        }
    }
    if kept.len() != text.len() {
        fs::write(path, kept).map_err(|e| Failure::io(path, e))?;
    }
    Ok(())
}

fn write_summary(
    w: &mut impl Write,
    race: &Race,
    resumed_from: Option<u64>,
    interrupted: bool,
    started: Instant,
) -> io::Result<()> {
    let c = race.counters();
    let modulus = c.modulus();
    writeln!(w, "modulus: {}", modulus.value())?;
    writeln!(w, "np: {}", c.np())?;
    writeln!(w, "last_prime: {}", c.last_prime().unwrap_or(0))?;
    for (r, count) in c.residue_counts() {
        writeln!(w, "count{r}: {count}")?;
    }
    writeln!(w, "neither: {}", c.neither())?;
    if let Some(summary) = race.summary() {
        write_delta_summary(w, modulus, &summary)?;
    }
    if let Some(np) = resumed_from {
        writeln!(w, "resumed_from_np: {np}")?;
    }
    writeln!(
        w,
        "status: {}",
        if interrupted {
            "interrupted"
        } else {
            "complete"
        }
    )?;
    writeln!(w, "elapsed_seconds: {:.3}", started.elapsed().as_secs_f64())
}

fn write_delta_summary(w: &mut impl Write, modulus: &Modulus, s: &RaceSummary) -> io::Result<()> {
    writeln!(w, "delta_definition: count{} - count1", modulus.value() - 1)?;
    writeln!(w, "final_delta: {}", s.last.delta)?;
    writeln!(w, "min_delta: {}", s.min_delta)?;
    writeln!(w, "min_delta_np: {}", s.min_np)?;
    writeln!(w, "max_delta: {}", s.max_delta)?;
    writeln!(w, "max_delta_np: {}", s.max_np)?;
    writeln!(w, "sign_changes: {}", s.sign_changes.len())?;
    if let Some(first) = s.sign_changes.first() {
        writeln!(w, "first_sign_change_np: {}", first.np)?;
        writeln!(w, "first_sign_change_prime: {}", first.prime)?;
    }
    Ok(())
}
