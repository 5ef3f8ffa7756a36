//! Command-line frontend for the kneading library.
//!
//! Exit codes follow one convention across subcommands: 0 on success, 2 when
//! a verification check fails (count mismatch, order violation, failed
//! property), 3 when a numeric solve fails, 64 for usage errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kneading::{
    enumerate_kneading, count_kneading, entropy_estimate, interior_grid, linspace, realize_ivt,
    solve_superstable, superstable_table, sweep, table_order_violation, CensusError, EntropyError,
    EntropyOptions, FamilyError, LevelError, SuperstableRecord, SweepOptions, SweepViolation,
    UnimodalFamily, Word, WordError, DEFAULT_TOL_C,
};

const EXIT_OK: u8 = 0;
const EXIT_VIOLATION: u8 = 2;
const EXIT_SOLVE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "kneading",
    version,
    about = "Kneading words, superstable parameters, and entropy of unimodal interval maps"
)]
struct Cli {
    /// Output format for the main result.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the main result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every kneading word of length n and cross-check the count formula.
    Enumerate {
        #[arg(long)]
        n: u32,
    },
    /// Count kneading words of length n by the divisor-sum formula.
    Count {
        #[arg(long)]
        n: u32,
    },
    /// Solve one kneading word for its superstable parameter.
    Solve {
        #[arg(long)]
        family: String,
        #[arg(long)]
        word: String,
    },
    /// Solve every kneading word of length 1..=n_max and print the table
    /// sorted by parameter.
    Table {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
    },
    /// Kneading word (and optionally entropy) at each point of a parameter
    /// grid, with adjacent-pair monotonicity checks.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0.5)]
        min: f64,
        #[arg(long, default_value_t = 1.0)]
        max: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Itinerary depth for the kneading word at each grid point.
        #[arg(long, default_value_t = 25)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_TOL_C)]
        tol_c: f64,
        /// Also estimate entropy at each grid point (slow at large grids).
        #[arg(long)]
        entropy: bool,
        /// Adjacent entropy decreases beyond this are reported as violations.
        #[arg(long, default_value_t = 5e-3)]
        entropy_tolerance: f64,
        /// Deepest iterate order for lap counting.
        #[arg(long, default_value_t = 3000)]
        tree_depth: usize,
        /// Preimage-tree node budget per grid point.
        #[arg(long, default_value_t = 2_000_000)]
        node_cap: usize,
        /// Write the violations table to this file (default: stderr when
        /// violations exist).
        #[arg(long)]
        violations_out: Option<PathBuf>,
    },
    /// Lap counts and the entropy estimate at one parameter.
    Entropy {
        #[arg(long)]
        family: String,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 3000)]
        tree_depth: usize,
        #[arg(long, default_value_t = 2_000_000)]
        node_cap: usize,
    },
    /// Sample the regularity properties of a family over a parameter range.
    Check {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0.5)]
        mu_min: f64,
        #[arg(long, default_value_t = 1.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 50)]
        mu_points: usize,
        #[arg(long, default_value_t = 100)]
        x_points: usize,
    },
    /// Find a parameter realizing a kneading word strictly between the
    /// kneading words at two given parameters.
    Ivt {
        #[arg(long)]
        family: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        mu1: f64,
        #[arg(long)]
        mu2: f64,
        #[arg(long, default_value_t = 25)]
        depth: usize,
    },
}

#[derive(Debug)]
enum CliError {
    Census(CensusError),
    Family(FamilyError),
    Level(LevelError),
    Entropy(EntropyError),
    Word(WordError),
    UnknownFamily(String),
    Usage(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Census(e) => write!(f, "{e}"),
            CliError::Family(e) => write!(f, "{e}"),
            CliError::Level(e) => write!(f, "{e}"),
            CliError::Entropy(e) => write!(f, "{e}"),
            CliError::Word(e) => write!(f, "{e}"),
            CliError::UnknownFamily(name) => {
                write!(f, "unknown family \"{name}\"; built-ins: {}", UnimodalFamily::BUILTIN_NAMES.join(", "))
            }
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<CensusError> for CliError {
    fn from(e: CensusError) -> CliError {
        CliError::Census(e)
    }
}
impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> CliError {
        CliError::Family(e)
    }
}
impl From<LevelError> for CliError {
    fn from(e: LevelError) -> CliError {
        CliError::Level(e)
    }
}
impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> CliError {
        CliError::Entropy(e)
    }
}
impl From<WordError> for CliError {
    fn from(e: WordError) -> CliError {
        CliError::Word(e)
    }
}
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

fn family_exit_code(e: &FamilyError) -> u8 {
    match e {
        FamilyError::DomainViolation { .. } | FamilyError::SingularPoint { .. } => EXIT_SOLVE,
        _ => EXIT_USAGE,
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Census(CensusError::CountMismatch { .. }) => EXIT_VIOLATION,
        CliError::Census(_) => EXIT_USAGE,
        CliError::Family(inner) => family_exit_code(inner),
        CliError::Level(inner) => match inner {
            LevelError::Family(fe) => family_exit_code(fe),
            LevelError::SolveFailure { .. } | LevelError::OrbitResidual { .. } => EXIT_SOLVE,
            _ => EXIT_USAGE,
        },
        CliError::Entropy(inner) => match inner {
            EntropyError::Family(fe) => family_exit_code(fe),
            EntropyError::BadParameter { .. } => EXIT_USAGE,
            EntropyError::CapExceeded { .. } => EXIT_SOLVE,
        },
        CliError::Word(_) | CliError::UnknownFamily(_) | CliError::Usage(_) | CliError::Io(_) => {
            EXIT_USAGE
        }
    }
}

/// Plain-decimal rendering with 17 significant digits, enough to round-trip
/// any f64. All numeric CSV cells go through this so repeated runs are
/// byte-identical.
fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent parses");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|ch| ch.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 17);
    let point = exp + 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
        out.push_str(".0");
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    out
}

fn family_by_name(name: &str) -> Result<UnimodalFamily, CliError> {
    UnimodalFamily::by_name(name).ok_or_else(|| CliError::UnknownFamily(name.to_string()))
}

fn record_rows(out: &mut String, records: &[SuperstableRecord]) {
    out.push_str("word,mu_star,residual,bracket_width\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.word,
            fmt_sig17(r.mu_star),
            fmt_sig17(r.residual),
            fmt_sig17(r.bracket_width)
        );
    }
}

fn violation_rows(out: &mut String, violations: &[&SweepViolation]) {
    out.push_str("kind,index_left,index_right,mu_left,mu_right,delta,detail\n");
    for v in violations {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            v.kind,
            v.index_left,
            v.index_right,
            fmt_sig17(v.mu_left),
            fmt_sig17(v.mu_right),
            fmt_sig17(v.delta),
            v.detail.replace(',', ";")
        );
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut body = serde_json::to_string_pretty(value).expect("serializable report");
    body.push('\n');
    body
}

struct Outcome {
    body: String,
    exit: u8,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.cmd {
        Cmd::Enumerate { n } => {
            let census = enumerate_kneading(*n)?;
            let body = match cli.format {
                Format::Json => to_json(&census),
                Format::Csv => {
                    let mut out = String::from("n,count_formula,count_enumerated\n");
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        census.n, census.count_formula, census.count_enumerated
                    );
                    for word in &census.words {
                        let _ = writeln!(out, "{word}");
                    }
                    out
                }
            };
            Ok(Outcome { body, exit: EXIT_OK })
        }
        Cmd::Count { n } => {
            let count = count_kneading(*n)?;
            let body = match cli.format {
                Format::Json => to_json(&serde_json::json!({ "n": n, "count": count })),
                Format::Csv => format!("n,count\n{n},{count}\n"),
            };
            Ok(Outcome { body, exit: EXIT_OK })
        }
        Cmd::Solve { family, word } => {
            let fam = family_by_name(family)?;
            let word = Word::parse(word)?;
            let record = solve_superstable(&fam, &word)?;
            let body = match cli.format {
                Format::Json => to_json(&record),
                Format::Csv => {
                    let mut out = String::new();
                    record_rows(&mut out, std::slice::from_ref(&record));
                    out
                }
            };
            Ok(Outcome { body, exit: EXIT_OK })
        }
        Cmd::Table { family, n_max } => {
            if !(1..=12).contains(n_max) {
                return Err(CliError::Usage(format!(
                    "--n-max must be between 1 and 12, got {n_max}"
                )));
            }
            let fam = family_by_name(family)?;
            let records = superstable_table(&fam, *n_max)?;
            let body = match cli.format {
                Format::Json => to_json(&records),
                Format::Csv => {
                    let mut out = String::new();
                    record_rows(&mut out, &records);
                    out
                }
            };
            let exit = match table_order_violation(&records) {
                Some((i, j)) => {
                    eprintln!(
                        "order violation: rows {i} and {j} ({} at {}, {} at {}) are not in symbolic order",
                        records[i].word,
                        fmt_sig17(records[i].mu_star),
                        records[j].word,
                        fmt_sig17(records[j].mu_star)
                    );
                    EXIT_VIOLATION
                }
                None => EXIT_OK,
            };
            Ok(Outcome { body, exit })
        }
        Cmd::Sweep {
            family,
            min,
            max,
            grid,
            depth,
            tol_c,
            entropy,
            entropy_tolerance,
            tree_depth,
            node_cap,
            violations_out,
        } => {
            let fam = family_by_name(family)?;
            let opts = SweepOptions {
                mu_min: *min,
                mu_max: *max,
                grid_points: *grid,
                depth: *depth,
                tol_c: *tol_c,
                entropy_tolerance: *entropy_tolerance,
                entropy: EntropyOptions { max_depth: *tree_depth, node_cap: *node_cap },
                compute_entropy: *entropy,
            };
            let report = sweep(&fam, &opts)?;
            let body = match cli.format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut out = String::from("mu,kneading_word,entropy,lap_depth_reached\n");
                    for p in &report.points {
                        let entropy_cell =
                            p.entropy.map(fmt_sig17).unwrap_or_default();
                        let depth_cell =
                            p.lap_depth.map(|d| d.to_string()).unwrap_or_default();
                        let _ = writeln!(
                            out,
                            "{},{},{},{}",
                            fmt_sig17(p.mu),
                            p.word,
                            entropy_cell,
                            depth_cell
                        );
                    }
                    out
                }
            };
            let violations: Vec<&SweepViolation> = report
                .kneading_violations
                .iter()
                .chain(report.entropy_violations.iter())
                .collect();
            if let Some(path) = violations_out {
                let mut table = String::new();
                violation_rows(&mut table, &violations);
                std::fs::write(path, table)?;
            } else if !violations.is_empty() {
                let mut table = String::new();
                violation_rows(&mut table, &violations);
                eprint!("{table}");
            }
            let exit = if report.clean() { EXIT_OK } else { EXIT_VIOLATION };
            Ok(Outcome { body, exit })
        }
        Cmd::Entropy { family, mu, tree_depth, node_cap } => {
            let fam = family_by_name(family)?;
            let opts = EntropyOptions { max_depth: *tree_depth, node_cap: *node_cap };
            let report = entropy_estimate(&fam, *mu, opts)?;
            let body = match cli.format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut out = String::from("mu,h_estimate,depth_reached,cap_hit\n");
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        fmt_sig17(report.mu),
                        fmt_sig17(report.h_estimate),
                        report.depth_reached,
                        report.cap_hit
                    );
                    out
                }
            };
            Ok(Outcome { body, exit: EXIT_OK })
        }
        Cmd::Check { family, mu_min, mu_max, mu_points, x_points } => {
            if *mu_points < 2 {
                return Err(CliError::Usage(format!(
                    "--mu-points must be at least 2, got {mu_points}"
                )));
            }
            if *x_points < 1 {
                return Err(CliError::Usage("--x-points must be at least 1".to_string()));
            }
            if !(*mu_min > 0.0 && mu_min < mu_max && *mu_max <= 1.0) {
                return Err(CliError::Usage(format!(
                    "need 0 < mu_min < mu_max <= 1, got {mu_min}, {mu_max}"
                )));
            }
            let fam = family_by_name(family)?;
            let mu_grid = linspace(*mu_min, *mu_max, *mu_points);
            let x_grid = interior_grid(*x_points);
            let report = fam.check_class_c(&mu_grid, &x_grid)?;
            let body = match cli.format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut out = String::from(
                        "family,unique_fixed_point,negative_schwarzian,positive_inverse_schwarzian,passed\n",
                    );
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        report.family,
                        report.unique_fixed_point,
                        report.negative_schwarzian,
                        report.positive_inverse_schwarzian,
                        report.passed()
                    );
                    if !report.witnesses.is_empty() {
                        out.push_str("property,mu,point,value\n");
                        for w in &report.witnesses {
                            let _ = writeln!(
                                out,
                                "{},{},{},{}",
                                w.property,
                                fmt_sig17(w.mu),
                                fmt_sig17(w.point),
                                fmt_sig17(w.value)
                            );
                        }
                    }
                    out
                }
            };
            let exit = if report.passed() { EXIT_OK } else { EXIT_VIOLATION };
            Ok(Outcome { body, exit })
        }
        Cmd::Ivt { family, word, mu1, mu2, depth } => {
            let fam = family_by_name(family)?;
            let word = Word::parse(word)?;
            let mu = realize_ivt(&fam, &word, *mu1, *mu2, *depth)?;
            let body = match cli.format {
                Format::Json => to_json(&serde_json::json!({
                    "word": word.to_string(),
                    "mu": mu,
                })),
                Format::Csv => format!("word,mu\n{word},{}\n", fmt_sig17(mu)),
            };
            Ok(Outcome { body, exit: EXIT_OK })
        }
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            handle.write_all(body.as_bytes())?;
            handle.flush()?;
        }
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code as i32);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.out, &outcome.body) {
                eprintln!("error: {e}");
                std::process::exit(EXIT_USAGE as i32);
            }
            std::process::exit(outcome.exit as i32);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e) as i32);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig17;

    #[test]
    fn seventeen_digit_rendering() {
        assert_eq!(fmt_sig17(0.5), "0.50000000000000000");
        assert_eq!(fmt_sig17(1.0), "1.0000000000000000");
        assert_eq!(fmt_sig17(0.0), "0.0000000000000000");
        assert_eq!(fmt_sig17(0.8090169943749475), "0.80901699437494745");
        assert_eq!(fmt_sig17(-0.25), "-0.25000000000000000");
        assert_eq!(fmt_sig17(1e-12), "0.00000000000099999999999999998");
        assert_eq!(fmt_sig17(123.0), "123.00000000000000");
        assert_eq!(fmt_sig17(1e18), "1000000000000000000.0");
    }

    #[test]
    fn rendering_round_trips() {
        for &x in &[0.5, 0.8090169943749475, 1.0 / 3.0, 1e-13, 0.9999999999999999] {
            let s = fmt_sig17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
