//! `secant`: measure secant varieties of projective varieties from the command line.

mod report;

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use secant_core::catalog::{build_family, verify_all, verify_family, EntryOutcome, Family};
use secant_core::engine::{DEFAULT_TRIALS, PRIMES_PER_RUN};
use secant_core::field::PRIME_BITS;
use secant_core::hilbert::hilbert12_with;
use secant_core::terracini::{contact_shape_from, scan_from_report, secant_dim_compiled, tangential_projection_compiled};
use secant_core::{Engine, Error, VarietySpec};

use report::{mismatch_table, EntryReport, Report, SkippedReport, VerifyAllReport};

const EXIT_PARSE: u8 = 1;
const EXIT_SAMPLER: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "secant", version, about = "Secant variety dimensions by randomized exact linear algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze a variety described by a JSON spec file.
    Analyze {
        spec: PathBuf,
        /// Secancy order to report.
        #[arg(long, conflicts_with = "k_max")]
        k: Option<usize>,
        /// Scan orders 1..=N and report at the first defective one.
        #[arg(long)]
        k_max: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Built-in catalog of defective threefolds.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    /// List the families and their default variants.
    List {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify one family representative against its expected invariants.
    Verify {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        /// Defaults to the first default variant of the family.
        #[arg(long)]
        variant: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the variety spec of one family representative.
    Spec {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        variant: Option<String>,
    },
    /// Verify every constructible representative for k in a range such as `2..4`.
    VerifyAll {
        #[arg(long, value_parser = parse_k_range, default_value = "2..4")]
        k_range: RangeInclusive<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    trials: usize,
    #[arg(long, default_value_t = PRIME_BITS)]
    prime_bits: u32,
    #[arg(long, default_value_t = PRIMES_PER_RUN)]
    primes_per_run: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

impl RunArgs {
    fn engine(&self) -> anyhow::Result<Engine> {
        Ok(Engine::configured(self.seed, self.trials, self.prime_bits, self.primes_per_run)?)
    }
}

fn parse_k_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a == 0 || a > b {
        return Err(format!("empty or invalid range {s:?}"));
    }
    Ok(a..=b)
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::SampleExhausted { .. } | Error::SingularSample | Error::NoRootFound) => EXIT_SAMPLER,
            _ => EXIT_PARSE,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze { spec, k, k_max, run } => analyze(&spec, k, k_max, &run),
        Command::Catalog { command } => match command {
            CatalogCommand::List { format, out } => {
                list(format, out.as_deref())?;
                Ok(0)
            }
            CatalogCommand::Verify { family, k, variant, run } => verify(&family, k, variant.as_deref(), &run),
            CatalogCommand::Spec { family, k, variant } => {
                let entry = build_family(family.parse()?, k, variant.as_deref())?;
                println!("{}", serde_json::to_string_pretty(&entry.spec).map_err(anyhow::Error::from)?);
                Ok(0)
            }
            CatalogCommand::VerifyAll { k_range, run } => verify_range(k_range, &run),
        },
    }
}

fn load_spec(path: &Path) -> anyhow::Result<VarietySpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    VarietySpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn analyze(path: &Path, k: Option<usize>, k_max: Option<usize>, args: &RunArgs) -> Result<u8, Failure> {
    let spec = load_spec(path)?;
    let engine = args.engine()?;
    let compiled = engine.compile(&spec)?;
    let top = k.or(k_max).unwrap_or(1);
    let secant = secant_dim_compiled(&engine, &compiled, top)?;
    let order = match (k, k_max) {
        (None, Some(m)) => scan_from_report(&secant).0.unwrap_or(m),
        _ => top,
    };
    let tangential = match tangential_projection_compiled(&engine, &spec, &compiled, order) {
        Ok(t) => Some(t),
        Err(Error::FillsAmbient(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let contact = match &tangential {
        Some(t) => Some(contact_shape_from(&engine, t)?.classification),
        None => None,
    };
    let h = hilbert12_with(&engine, &compiled)?;
    let rep = Report::analysis(&engine, &spec, &secant, order, tangential.as_ref(), contact, h);
    let title = format!("analyze {}", path.display());
    emit(&rep, || rep.markdown(&title), args.format, args.out.as_deref())?;
    Ok(0)
}

fn verify(family: &str, k: usize, variant: Option<&str>, args: &RunArgs) -> Result<u8, Failure> {
    let family: Family = family.parse()?;
    let engine = args.engine()?;
    let entry = match build_family(family, k, variant) {
        Ok(e) => e,
        Err(Error::NotConstructible(_, reason)) => {
            let rep = SkippedReport { family: family.id().into(), k, skipped: true, reason };
            let md = format!("## catalog verify {family} k={k}\n\nskipped: {}\n", rep.reason);
            emit(&rep, || md.clone(), args.format, args.out.as_deref())?;
            eprintln!("{family} at k={k} skipped: {}", rep.reason);
            return Ok(0);
        }
        Err(e) => return Err(e.into()),
    };
    let result = verify_family(&engine, &entry)?;
    let rep = Report::verification(&engine, &result);
    emit(&rep, || rep.markdown(&format!("catalog verify {}", entry.key())), args.format, args.out.as_deref())?;
    if result.pass {
        Ok(0)
    } else {
        eprintln!("{} does not match:\n{}", entry.key(), mismatch_table(&result.mismatches));
        Ok(EXIT_MISMATCH)
    }
}

fn verify_range(ks: RangeInclusive<usize>, args: &RunArgs) -> Result<u8, Failure> {
    let engine = args.engine()?;
    let all = verify_all(&engine, ks);
    let entries = all
        .entries
        .iter()
        .map(|(key, out)| {
            let e = match out {
                EntryOutcome::Verified(v) => EntryReport::Report(Box::new(Report::verification(&engine, v))),
                EntryOutcome::Failed { error, .. } => EntryReport::Error { pass: false, error: error.clone() },
            };
            (key.clone(), e)
        })
        .collect();
    let rep = VerifyAllReport { entries, skipped: all.skipped };
    emit(&rep, || rep.markdown(), args.format, args.out.as_deref())?;
    let failing: Vec<&String> = rep.entries.iter().filter(|(_, e)| !e.pass()).map(|(k, _)| k).collect();
    if failing.is_empty() {
        return Ok(0);
    }
    for key in &failing {
        match &rep.entries[*key] {
            EntryReport::Report(r) => eprintln!("{key} does not match:\n{}", mismatch_table(&r.mismatches)),
            EntryReport::Error { error, .. } => eprintln!("{key} failed: {error}"),
        }
    }
    Ok(EXIT_MISMATCH)
}

#[derive(Serialize)]
struct FamilyListing {
    id: &'static str,
    description: &'static str,
    constructible: bool,
    /// Default variants for each k from 1 to 6 at which the family exists.
    variants: std::collections::BTreeMap<usize, Vec<&'static str>>,
    optional_variants: Vec<&'static str>,
}

fn list(format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let rows: Vec<FamilyListing> = Family::ALL
        .into_iter()
        .map(|f| FamilyListing {
            id: f.id(),
            description: f.description(),
            constructible: f.constructible(),
            variants: (1..=6).filter(|&k| f.unavailable_reason(k).is_none()).map(|k| (k, f.variants(k).to_vec())).collect(),
            optional_variants: f.optional_variants().to_vec(),
        })
        .collect();
    let md = || {
        let mut s = String::from("| id | constructible | description |\n|---|---|---|\n");
        for r in &rows {
            s.push_str(&format!("| {} | {} | {} |\n", r.id, r.constructible, r.description));
        }
        s
    };
    emit(&rows, md, format, out)
}

/// Renders and writes a report once, atomically when a path is given.
fn emit<T: Serialize>(value: &T, markdown: impl FnOnce() -> String, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = match format {
        Format::Json => serde_json::to_string_pretty(value)?,
        Format::Markdown => markdown(),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => write_atomic(path, text.as_bytes()),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        bail!("output directory {} does not exist", dir.display());
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}
