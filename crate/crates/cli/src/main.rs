use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use bsaks_core::admissible::Admissibility;
use bsaks_core::catalog::sets::default_records;
use bsaks_core::catalog::{lookup, spec_from_toml, SequenceSpec, CATALOG_IDS};
use bsaks_core::estimate::{
    asep_upper, ca_estimate, cca_estimate, default_epsilon_grid, sm_delta_check, sm_delta_upper, tcca_estimate,
    wca_estimate, wu_lower, FunctionalFamily, Quantity, QuantityEstimate,
};
use bsaks_core::format::VectorList;
use bsaks_core::polytope::crosspolytope_auto;
use bsaks_core::ramsey::{dichotomy_search, ramsey_extract, verify_dichotomy, Coloring, HereditaryFamily};
use bsaks_core::rational::parse_rational;
use bsaks_core::verify::{fuzz_invariants, run_paper_suite, FuzzConfig, VerificationReport, VerifyConfig};
use bsaks_core::SpaceDescriptor;

const THREADS_VAR: &str = "BSAKS_THREADS";

#[derive(Parser)]
#[command(name = "bsaks", version, about = "Quantitative Banach-Saks measures on computable sequence spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Browse the sequence catalog.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Estimate one quantity of a catalog sequence at a finite horizon.
    Quantity(QuantityArgs),
    /// Minimize the norm over the cross-polytope spanned by a vector list.
    SmMin {
        /// Space shorthand (l1, sup, c, schreier, omega, alpha:1/3, lp:3/2, schreier+l1).
        #[arg(long)]
        space: Option<String>,
        /// Vector list file.
        #[arg(long)]
        vectors: PathBuf,
    },
    /// Finite hereditary-family dichotomy and Ramsey extraction.
    #[command(subcommand)]
    Ramsey(RamseyCmd),
    /// Run a regression suite.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Check finite-window invariants on random rational sequences.
    Fuzz(FuzzArgs),
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List sequence ids and set records.
    List,
    /// Print the first terms of a sequence as a vector list.
    Show {
        id: String,
        #[arg(long, default_value_t = 5)]
        k: u64,
        /// Print the sequence spec instead of its terms.
        #[arg(long)]
        spec: bool,
    },
}

#[derive(Args)]
struct QuantityArgs {
    /// ca, wca, cca, tcca, asep, sm or wu.
    name: String,
    /// Defaults to the home space of a catalog sequence.
    #[arg(long)]
    space: Option<String>,
    /// Catalog id, or a TOML sequence spec file (then --space is required).
    #[arg(long)]
    sequence: String,
    #[arg(long)]
    horizon: u64,
    /// Largest block size for asep (default horizon/2).
    #[arg(long)]
    max_block: Option<u64>,
    /// For sm: check the constant is at least this value on every admissible set.
    #[arg(long)]
    delta: Option<String>,
    /// For sm: admissibility rule, schreier or full.
    #[arg(long, default_value = "schreier")]
    rule: String,
    /// For wu: functional family.
    #[arg(long, default_value = "coordinate+admissible-signs")]
    family: String,
    /// Emit a CSV table instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand)]
enum RamseyCmd {
    /// Find M with the family trace on M all sets of size ≤ d, or a certificate f.
    Dichotomy {
        /// schreier, cardinality-cap:D, empty-only, singletons, even or schreier-half.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: usize,
    },
    /// Find a t-set whose d-subsets all share one color.
    Extract {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: u64,
        /// Lines `i_1 ... i_d color`, one per d-subset of {1..n}.
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Subcommand)]
enum VerifySuite {
    /// Reproduce the registered closed-form examples and inequalities.
    Paper(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run only these check ids (repeatable).
    #[arg(long)]
    only: Vec<String>,
    /// TOML file with horizons, tolerances, caps and fuzz settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record per-check runtimes.
    #[arg(long)]
    timings: bool,
    /// Emit CSV instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, default_value_t = 4)]
    dims: usize,
    #[arg(long, default_value_t = 8)]
    horizon: u64,
    /// Rerun a single trial.
    #[arg(long)]
    trial: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    csv: bool,
}

/// Command outcome: `Ok(true)` passes, `Ok(false)` is a check failure.
type Outcome = Result<bool>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = configure_threads().and_then(|_| dispatch(cli.command));
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw.trim().parse().with_context(|| format!("{THREADS_VAR}={raw} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Catalog(CatalogCmd::List) => catalog_list(),
        Command::Catalog(CatalogCmd::Show { id, k, spec }) => catalog_show(&id, k, spec),
        Command::Quantity(args) => quantity(&args),
        Command::SmMin { space, vectors } => sm_min(space.as_deref(), &vectors),
        Command::Ramsey(RamseyCmd::Dichotomy { family, n, m }) => dichotomy(&family, n, m),
        Command::Ramsey(RamseyCmd::Extract { d, n, coloring, t }) => extract(d, n, &coloring, t),
        Command::Verify { suite: VerifySuite::Paper(args) } => verify_suite(&args),
        Command::Fuzz(args) => fuzz(&args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn emit(text: &str, dest: Option<&Path>) -> Result<()> {
    match dest {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn catalog_list() -> Outcome {
    println!("sequences:");
    for id in CATALOG_IDS {
        let sample = id.replace("<n>", "1").replace("<eps>", "1/2");
        let e = lookup(&sample)?;
        println!("  {id:<30} {:<12} {}", e.space.to_string(), e.description);
    }
    println!("sets:");
    for r in default_records() {
        println!("  {}", r.id);
    }
    Ok(true)
}

fn catalog_show(id: &str, k: u64, spec: bool) -> Outcome {
    let e = lookup(id)?;
    if spec {
        print!("{}", toml::to_string(&e.spec)?);
    } else {
        print!("{}", VectorList::new(Some(e.space), e.spec.prefix(k)).to_text());
    }
    Ok(true)
}

fn resolve_sequence(sequence: &str, space: Option<&str>) -> Result<(SpaceDescriptor, SequenceSpec)> {
    let space = space.map(SpaceDescriptor::parse_shorthand).transpose()?;
    let path = Path::new(sequence);
    if path.is_file() {
        let spec = spec_from_toml(&read(path)?)?;
        let space = space.ok_or_else(|| anyhow!("--space is required for a spec file"))?;
        return Ok((space, spec));
    }
    let e = lookup(sequence)?;
    Ok((space.unwrap_or(e.space), e.spec))
}

fn quantity(a: &QuantityArgs) -> Outcome {
    let q = Quantity::parse(&a.name).ok_or_else(|| anyhow!("unknown quantity `{}`", a.name))?;
    let (space, spec) = resolve_sequence(&a.sequence, a.space.as_deref())?;
    let rule = match a.rule.as_str() {
        "schreier" => Admissibility::Schreier,
        "full" => Admissibility::Full,
        other => bail!("unknown admissibility rule `{other}`"),
    };
    let n = a.horizon;
    let mut extra = None;
    let est: QuantityEstimate = match q {
        Quantity::Ca => ca_estimate(&space, &spec, n)?,
        Quantity::Cca => cca_estimate(&space, &spec, n)?,
        Quantity::Wca => wca_estimate(&space, &spec, n)?,
        Quantity::Tcca => tcca_estimate(&space, &spec, n)?,
        Quantity::Asep => asep_upper(&space, &spec, n, a.max_block.unwrap_or(n / 2))?,
        Quantity::Sm => {
            let window: Vec<u64> = (1..=n).collect();
            if let Some(d) = &a.delta {
                extra = Some(sm_delta_check(&space, &spec, &parse_rational(d)?, n, rule)?);
            }
            sm_delta_upper(&space, &spec, &window, rule)?.estimate
        }
        Quantity::Wu => {
            let family = FunctionalFamily::parse(&a.family)?;
            wu_lower(&space, &spec, spec.weak_limit.as_ref(), &default_epsilon_grid(&spec.bound), family, n)?
        }
    };
    let pass = extra.as_ref().map_or(true, |c| c.pass);
    if a.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["quantity", "m", "value", "bound_kind", "horizon"])?;
        let kind = serde_json::to_value(est.bound_kind)?;
        let kind = kind.as_str().unwrap_or_default();
        w.write_record([q.name(), "", &est.value.display_exact(), kind, &n.to_string()])?;
        for (m, v) in est.profile.iter().flatten().enumerate() {
            w.write_record(["D", &(m + 1).to_string(), &v.display_exact(), "exact", &n.to_string()])?;
        }
        emit(&String::from_utf8(w.into_inner()?)?, None)?;
    } else {
        let mut out = serde_json::to_value(&est)?;
        if let Some(check) = extra {
            out["delta_check"] = json!({
                "delta": check.delta.to_string(),
                "pass": check.pass,
                "certified": check.certified,
                "checked_sets": check.checked_sets,
                "violations": check.violations,
            });
        }
        print_json(&out)?;
    }
    Ok(pass)
}

fn sm_min(space: Option<&str>, vectors: &Path) -> Outcome {
    let list = VectorList::parse(&read(vectors)?)?;
    let space = match (space, list.space) {
        (Some(s), _) => SpaceDescriptor::parse_shorthand(s)?,
        (None, Some(s)) => s,
        (None, None) => bail!("no space given and the vector list declares none"),
    };
    print_json(&crosspolytope_auto(&space, &list.vectors)?)?;
    Ok(true)
}

fn dichotomy(family: &str, n: u64, m: usize) -> Outcome {
    let fam = HereditaryFamily::parse(family, n)?;
    let r = dichotomy_search(&fam, m)?;
    let verified = verify_dichotomy(&fam, &r);
    print_json(&json!({
        "family": family,
        "n": n,
        "m": m,
        "result": r,
        "certificate_verified": verified.is_ok(),
        "verifier_error": verified.as_ref().err(),
    }))?;
    Ok(verified.is_ok())
}

fn extract(d: usize, n: u64, coloring: &Path, t: usize) -> Outcome {
    let c = Coloring::parse(&read(coloring)?, d, n)?;
    let found = ramsey_extract(&c, t)?;
    let color = found.as_ref().map(|m| {
        let first: Vec<u64> = m[..d].to_vec();
        c.color(&first)
    });
    print_json(&json!({ "d": d, "n": n, "t": t, "set": found, "color": color }))?;
    Ok(true)
}

fn load_config(path: Option<&Path>) -> Result<VerifyConfig> {
    match path {
        Some(p) => Ok(VerifyConfig::from_toml(&read(p)?)?),
        None => Ok(VerifyConfig::default()),
    }
}

fn write_report(report: &VerificationReport, csv: bool, dest: Option<&Path>) -> Outcome {
    let text = if csv { report.to_csv() } else { report.to_json() };
    emit(&text, dest)?;
    if dest.is_some() {
        eprintln!("{} passed, {} failed", report.passed, report.failed);
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}{}", c.id, c.reproduce.as_ref().map(|r| format!(" (rerun: {r})")).unwrap_or_default());
    }
    Ok(report.all_pass())
}

fn verify_suite(a: &VerifyArgs) -> Outcome {
    let mut config = load_config(a.config.as_deref())?;
    config.timings |= a.timings;
    let only = (!a.only.is_empty()).then_some(a.only.as_slice());
    let report = run_paper_suite(&config, only)?;
    if report.checks.is_empty() {
        bail!("no check matches {:?}", a.only);
    }
    write_report(&report, a.csv, a.report.as_deref())
}

fn fuzz(a: &FuzzArgs) -> Outcome {
    let config = load_config(a.config.as_deref())?;
    let fc = FuzzConfig { seed: a.seed, trials: a.trials, dims: a.dims, horizon: a.horizon, only_trial: a.trial };
    let report = fuzz_invariants(&fc, &config)?;
    write_report(&report, a.csv, a.report.as_deref())
}
