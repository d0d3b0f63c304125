//! The `polysum` command line.
//!
//! Exit codes: 0 on success, 1 when a verification fails or a claimed
//! decomposition cannot be produced, 2 on usage and I/O errors. Results go
//! to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::decompose::{
    decompose_practical_triangular, theorem2_decompose_with, theorem2_params, Witness,
    DEFAULT_MAX_COMBINATIONS,
};
use crate::error::Error;
use crate::polygonal::gonal_values_upto;
use crate::practical::{generate_practicals, is_practical, PracticalSieve};
use crate::survey::{
    e_lower_bound_with, obstruction_census_with, obstruction_residue, rep_one_gonal_with,
    rep_two_gonal_from, row_from_bitmap, rows_to_csv, rows_to_json_lines, SurveyRow,
};

pub const THREADS_ENV: &str = "POLYSUM_THREADS";
pub const CACHE_ENV: &str = "POLYSUM_CACHE_DIR";

/// Counterexamples listed per gonality before the list is truncated.
const MAX_LISTED: usize = 100;

#[derive(Parser, Debug)]
#[command(name = "polysum", version, about = "Sums of practical and polygonal numbers")]
struct Cli {
    /// Output format; defaults to csv for survey tables and text elsewhere.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Practicality checks and sieves.
    #[command(subcommand)]
    Practical(PracticalCmd),
    /// Decompositions with checkable witnesses.
    #[command(subcommand)]
    Decompose(DecomposeCmd),
    /// Representability censuses.
    #[command(subcommand)]
    Survey(SurveyCmd),
    /// Exhaustive checks that exit 1 on a counterexample.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Parameters of the two-gonal construction.
    #[command(subcommand)]
    Params(ParamsCmd),
}

#[derive(Subcommand, Debug)]
enum PracticalCmd {
    /// Tests one number against the prime-by-prime characterization.
    Check { n: u64 },
    /// Writes the practical numbers up to a bound as a bitmap file.
    Sieve {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum DecomposeCmd {
    /// Practical number plus a triangular number.
    Tri {
        n: u64,
        /// Re-verify the emitted witness from scratch.
        #[arg(long)]
        check: bool,
    },
    /// Practical number plus two s-gonal numbers (search mode).
    Poly {
        #[arg(long)]
        s: u32,
        n: u64,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long = "max-k", default_value_t = 8)]
        max_k: u32,
        #[arg(long = "max-combinations", default_value_t = DEFAULT_MAX_COMBINATIONS)]
        max_combinations: usize,
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Comma-separated gonalities.
    #[arg(long, value_delimiter = ',', required = true)]
    s: Vec<u32>,
    #[arg(long)]
    bound: u64,
    /// Require gonal indices to be at least 1.
    #[arg(long = "no-zero-index")]
    no_zero_index: bool,
}

#[derive(Subcommand, Debug)]
enum SurveyCmd {
    /// Count and largest non-representable n = practical + one s-gonal, n < bound.
    Table(CensusArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Every n < bound is practical + two s-gonal numbers.
    Conj2(CensusArgs),
    /// Obstruction class census and the small-n lower bound.
    Prop47 {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        bound: u64,
    },
}

#[derive(Subcommand, Debug)]
enum ParamsCmd {
    /// Constant, prime count and ln p_r estimate for the proof-mode construction.
    Theorem2 {
        #[arg(long)]
        s: u32,
        #[arg(long = "prime-cap", default_value_t = 1_000_000)]
        prime_cap: u64,
    },
}

enum Failure {
    Verification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoDecompositionFound { .. } => Failure::Verification(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Entry point for the binary.
pub fn main_exit_code() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    // Output is buffered so the worker pool never touches the caller's streams.
    let (mut obuf, mut ebuf) = (Vec::new(), Vec::new());
    let result = pool.install(|| dispatch(&cli, &mut obuf, &mut ebuf));
    let _ = out.write_all(&obuf).and_then(|_| out.flush());
    let _ = err.write_all(&ebuf);
    match result {
        Ok(()) => 0,
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(v) = std::env::var_os(THREADS_ENV) {
        let v = v.to_string_lossy();
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let fmt = cli.format;
    match &cli.command {
        Command::Practical(PracticalCmd::Check { n }) => practical_check(*n, fmt.unwrap_or(Format::Text), out),
        Command::Practical(PracticalCmd::Sieve { bound, out: path }) => {
            let sieve = generate_practicals(*bound)?;
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            sieve.write_to(&mut file)?;
            file.flush()?;
            writeln!(out, "{} practical numbers up to {} written to {}", sieve.count(), bound, path.display())?;
            Ok(())
        }
        Command::Decompose(DecomposeCmd::Tri { n, check }) => {
            let d = decompose_practical_triangular(*n)?;
            emit_witness(&Witness::from(&d), *check, fmt.unwrap_or(Format::Text), out)
        }
        Command::Decompose(DecomposeCmd::Poly { s, n, r, max_k, max_combinations, check }) => {
            let d = theorem2_decompose_with(*s, *n, *r, *max_k, *max_combinations)?;
            emit_witness(&Witness::from(&d), *check, fmt.unwrap_or(Format::Text), out)
        }
        Command::Survey(SurveyCmd::Table(args)) => survey_table(args, fmt.unwrap_or(Format::Csv), out, err),
        Command::Verify(VerifyCmd::Conj2(args)) => verify_conj2(args, fmt.unwrap_or(Format::Text), out, err),
        Command::Verify(VerifyCmd::Prop47 { s, bound }) => {
            verify_prop47(*s, *bound, fmt.unwrap_or(Format::Text), out, err)
        }
        Command::Params(ParamsCmd::Theorem2 { s, prime_cap }) => {
            let p = theorem2_params(*s, *prime_cap)?;
            match fmt.unwrap_or(Format::Text) {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&p).expect("params serialize"))?,
                Format::Csv => {
                    writeln!(out, "s,special_prime,a,r_exact,ln_pr_estimate,product_at_cap,feasible")?;
                    writeln!(
                        out,
                        "{},{},{},{},{:.3},{:.6},{}",
                        p.s_gon,
                        p.special_prime,
                        p.a,
                        p.r_exact.map(|r| r.to_string()).unwrap_or_default(),
                        p.r_estimate_ln_pr,
                        p.product_at_cap,
                        p.feasible()
                    )?;
                }
                Format::Text => {
                    writeln!(out, "s = {}", p.s_gon)?;
                    writeln!(out, "special prime = {} (prime number {})", p.special_prime, p.special_prime_index)?;
                    writeln!(out, "A = {}", p.a)?;
                    writeln!(out, "ln p_r estimate = {:.1}", p.r_estimate_ln_pr)?;
                    writeln!(out, "prod (1 + 1/p) over p <= {} = {:.4}", p.prime_cap, p.product_at_cap)?;
                    match (p.r_exact, p.n_of_s) {
                        (Some(r), Some(n)) => writeln!(out, "feasible: r = {r}, threshold N(s) = {n}")?,
                        (Some(r), None) => writeln!(out, "r = {r}, threshold N(s) exceeds 128 bits")?,
                        _ => writeln!(out, "infeasible: no r with primes up to {} reaches A", p.prime_cap)?,
                    }
                }
            }
            Ok(())
        }
    }
}

fn practical_check(n: u64, fmt: Format, out: &mut dyn Write) -> CmdResult {
    let report = is_practical(n)?;
    match fmt {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?,
        Format::Csv => {
            writeln!(out, "n,practical,failing_prime")?;
            let fp = report.failing_prime.map(|p| p.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{}", n, report.practical, fp)?;
        }
        Format::Text => match report.failing_prime {
            None => writeln!(out, "practical")?,
            Some(p) => {
                let prefix = report.sigma_prefixes.last().copied().unwrap_or(1);
                writeln!(out, "not practical: prime {p} exceeds sigma of the prefix plus one ({})", prefix + 1)?
            }
        },
    }
    Ok(())
}

fn emit_witness(w: &Witness, check: bool, fmt: Format, out: &mut dyn Write) -> CmdResult {
    let json = w.to_json();
    if check {
        let back: Witness = serde_json::from_str(&json).map_err(|e| Failure::Verification(e.to_string()))?;
        back.verify().map_err(Failure::Verification)?;
    }
    match fmt {
        Format::Json => writeln!(out, "{json}")?,
        Format::Text => writeln!(out, "{}", w.to_text())?,
        Format::Csv => {
            let v: serde_json::Value = serde_json::from_str(&json).expect("witness is json");
            let comps = v["components"].as_object().expect("components object");
            let names: Vec<&String> = comps.keys().collect();
            let vals: Vec<String> = comps.values().map(|x| x.to_string()).collect();
            writeln!(out, "n,kind,{}", names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","))?;
            writeln!(out, "{},{},{}", w.n, v["kind"].as_str().unwrap_or(""), vals.join(","))?;
        }
    }
    if check {
        writeln!(out, "{}", if fmt == Format::Json { r#"{"check":"ok"}"# } else { "check: ok" })?;
    }
    Ok(())
}

fn cache_path(dir: &Path, bound: u64) -> PathBuf {
    dir.join(format!("practical-v{}-{bound}.bits", crate::bits::FORMAT_VERSION))
}

/// The practical sieve up to `bound`, read from and written to the cache
/// directory when one is configured.
fn load_sieve(bound: u64, err: &mut dyn Write) -> std::result::Result<PracticalSieve, Failure> {
    let Some(dir) = std::env::var_os(CACHE_ENV).map(PathBuf::from) else {
        return Ok(generate_practicals(bound)?);
    };
    let path = cache_path(&dir, bound);
    if let Ok(f) = std::fs::File::open(&path) {
        match PracticalSieve::read_from(std::io::BufReader::new(f)) {
            Ok(s) if s.bound() == bound => return Ok(s),
            _ => {
                let _ = writeln!(err, "warning: ignoring unreadable cache file {}", path.display());
            }
        }
    }
    let sieve = generate_practicals(bound)?;
    std::fs::create_dir_all(&dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        sieve.write_to(&mut f)?;
        f.flush()?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(sieve)
}

fn check_s_list(s: &[u32]) -> CmdResult {
    if let Some(bad) = s.iter().find(|&&s| s < 4) {
        return Err(Failure::Usage(format!("--s: gonality must be at least 4, got {bad}")));
    }
    Ok(())
}

fn survey_table(args: &CensusArgs, fmt: Format, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    check_s_list(&args.s)?;
    let allow_zero = !args.no_zero_index;
    let sieve = load_sieve(args.bound.max(1), err)?;
    let rows = args
        .s
        .iter()
        .map(|&s| rep_one_gonal_with(&sieve, s, args.bound, allow_zero).map(|b| row_from_bitmap(&b)))
        .collect::<crate::Result<Vec<SurveyRow>>>()?;
    match fmt {
        Format::Csv => write!(out, "{}", rows_to_csv(&rows))?,
        Format::Json => write!(out, "{}", rows_to_json_lines(&rows))?,
        Format::Text => {
            let mut rows = rows;
            rows.sort_by_key(|r| (r.s_gon, r.bound, r.zero_index_allowed));
            for r in rows {
                write!(out, "s={} bound={} allow_zero={}: {} non-representable", r.s_gon, r.bound, r.zero_index_allowed, r.count_non_representable)?;
                match r.largest_non_representable {
                    Some(l) => writeln!(out, ", largest {l}")?,
                    None => writeln!(out)?,
                }
            }
        }
    }
    Ok(())
}

fn verify_conj2(args: &CensusArgs, fmt: Format, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    check_s_list(&args.s)?;
    if args.bound > crate::survey::MAX_TWO_GONAL_BOUND {
        return Err(Failure::Usage(format!(
            "--bound: {} exceeds the two-gonal maximum {}",
            args.bound,
            crate::survey::MAX_TWO_GONAL_BOUND
        )));
    }
    let allow_zero = !args.no_zero_index;
    let sieve = load_sieve(args.bound.max(1), err)?;
    let mut s_list = args.s.clone();
    s_list.sort_unstable();
    s_list.dedup();
    if fmt == Format::Csv {
        writeln!(out, "s,bound,allow_zero,count,counterexamples")?;
    }
    let mut failed = Vec::new();
    for s in s_list {
        let two = rep_two_gonal_from(&rep_one_gonal_with(&sieve, s, args.bound, allow_zero)?)?;
        let clear: Vec<u64> = two.clear_bits().collect();
        let listed = &clear[..clear.len().min(MAX_LISTED)];
        let joined = |sep: &str| listed.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep);
        match fmt {
            Format::Csv => writeln!(out, "{},{},{},{},{}", s, args.bound, allow_zero, clear.len(), joined(" "))?,
            Format::Json => writeln!(
                out,
                "{}",
                serde_json::json!({
                    "s": s,
                    "bound": args.bound,
                    "allow_zero": allow_zero,
                    "count": clear.len(),
                    "counterexamples": listed,
                })
            )?,
            Format::Text if clear.is_empty() => {
                writeln!(out, "s={s} bound={}: every n is representable", args.bound)?
            }
            Format::Text => {
                let more = if clear.len() > listed.len() { ", ..." } else { "" };
                writeln!(out, "s={s} bound={}: {} counterexample(s): {}{more}", args.bound, clear.len(), joined(", "))?
            }
        }
        if !clear.is_empty() {
            failed.push(format!("s={s}: {}", clear[0]));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("counterexamples found ({})", failed.join("; "))))
    }
}

fn verify_prop47(s: u32, bound: u64, fmt: Format, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if s < 4 {
        return Err(Failure::Usage(format!("--s: gonality must be at least 4, got {s}")));
    }
    let sieve = load_sieve(bound.max(s as u64).max(1), err)?;
    let e = e_lower_bound_with(&sieve, s);
    let census = match obstruction_residue(s) {
        Ok(r) => {
            let (size, missing) = obstruction_census_with(&sieve, s, bound)?;
            let gonals = gonal_values_upto(s, bound.saturating_sub(1))?.len() as u64;
            Some((r, size, missing, gonals))
        }
        Err(_) => None,
    };
    match fmt {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::json!({
                "s": s,
                "bound": bound,
                "e_lower_bound": e,
                "residue": census.map(|c| c.0),
                "class_size": census.map(|c| c.1),
                "non_representable": census.map(|c| c.2),
                "gonals": census.map(|c| c.3),
            })
        )?,
        Format::Csv => {
            writeln!(out, "s,bound,e_lower_bound,residue,class_size,non_representable,gonals")?;
            let f = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{s},{bound},{e},{},{},{},{}",
                f(census.map(|c| c.0)),
                f(census.map(|c| c.1)),
                f(census.map(|c| c.2)),
                f(census.map(|c| c.3))
            )?;
        }
        Format::Text => {
            writeln!(out, "s={s}: {e} numbers below {s} are not practical + two {s}-gonal numbers")?;
            match census {
                Some((r, size, missing, _)) => writeln!(
                    out,
                    "class {r} mod 12 below {bound}: {missing} of {size} are not practical + one {s}-gonal number"
                )?,
                None => writeln!(out, "no obstruction class: s is not 0 or 4 mod 12")?,
            }
        }
    }
    if let Some((r, size, missing, gonals)) = census {
        // Members of the class are q + g only with q in {1, 2}.
        if size - missing > 2 * gonals {
            return Err(Failure::Verification(format!(
                "{} members of class {r} are representable, more than 2 * {gonals}",
                size - missing
            )));
        }
    }
    Ok(())
}
