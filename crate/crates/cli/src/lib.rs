//! Command implementations for the `qiris` binary.
//!
//! Every command writes to caller-supplied streams and returns its exit
//! status: 0 on success, 1 when a hash is not found or the two crackers
//! disagree, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qiris_core::hashing::DEFAULT_PERM_SEED;
use qiris_core::quantum_sim::DEFAULT_SHOTS;
use qiris_core::rainbow_table::generate_canonical;
use qiris_core::search::{crack_classical_report, DEFAULT_CLASSICAL_THRESHOLD, DEFAULT_RNG_SEED};
use qiris_core::{
    build_buckets, build_permutation, canonical_reduction_specs, crack, load_table, save_table,
    BucketIndex, HexDigest, PearsonPermutation, RainbowTable, SearchConfig,
};
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_FOUND: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const CSV_HEADER: &str =
    "hash,found_q,found_c,agree,grover_invocations,grover_iterations_total,classical_scan_length";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },

    #[error("{path}: line {line}: {reason}")]
    Input {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Core(#[from] qiris_core::Error),

    #[error("output: {0}")]
    Output(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "qiris",
    version,
    about = "Rainbow-table cracking with Grover-decided bucket lookups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a table file from a wordlist.
    Generate {
        #[arg(long)]
        wordlist: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PERM_SEED)]
        perm_seed: u64,
    },
    /// Recover the plaintext for one MD5 digest.
    Crack {
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Print search counters as key=value lines.
        #[arg(long)]
        report: bool,
        hash: String,
    },
    /// Run each digest through both the hybrid and the classical cracker and
    /// emit a CSV comparison.
    Compare {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        hashes: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u32,
    #[arg(long, default_value_t = DEFAULT_RNG_SEED)]
    pub rng_seed: u64,
    #[arg(long, default_value_t = DEFAULT_CLASSICAL_THRESHOLD)]
    pub classical_threshold: usize,
    /// Decide every bucket lookup classically.
    #[arg(long)]
    pub no_quantum: bool,
}

impl Default for SearchArgs {
    fn default() -> Self {
        SearchArgs {
            shots: DEFAULT_SHOTS,
            rng_seed: DEFAULT_RNG_SEED,
            classical_threshold: DEFAULT_CLASSICAL_THRESHOLD,
            no_quantum: false,
        }
    }
}

impl SearchArgs {
    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            shots: self.shots,
            classical_threshold: self.classical_threshold,
            rng_seed: self.rng_seed,
            quantum_enabled: !self.no_quantum,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Generate {
            wordlist,
            out,
            perm_seed,
        } => cmd_generate(&wordlist, &out, perm_seed, stdout),
        Command::Crack {
            table,
            search,
            report,
            hash,
        } => cmd_crack(&table, &hash, &search, report, stdout, stderr),
        Command::Compare {
            table,
            hashes,
            search,
        } => cmd_compare(&table, &hashes, &search, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Splits a file into `(line_number, text)` pairs, skipping blank lines and
/// tolerating CRLF endings.
fn content_lines(path: &Path, bytes: &[u8]) -> Result<Vec<(usize, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        if raw.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        if !raw.is_ascii() {
            return Err(CliError::Input {
                path: path.to_path_buf(),
                line,
                reason: "entry is not ASCII".into(),
            });
        }
        out.push((line, String::from_utf8_lossy(raw).into_owned()));
    }
    Ok(out)
}

pub fn read_wordlist(path: &Path) -> Result<Vec<String>, CliError> {
    let bytes = read_file(path)?;
    let lines = content_lines(path, &bytes)?;
    if lines.is_empty() {
        return Err(CliError::Input {
            path: path.to_path_buf(),
            line: 0,
            reason: "wordlist has no entries".into(),
        });
    }
    lines
        .into_iter()
        .map(|(line, word)| {
            if word.bytes().any(|b| b.is_ascii_whitespace()) {
                Err(CliError::Input {
                    path: path.to_path_buf(),
                    line,
                    reason: format!("entry {word:?} contains whitespace"),
                })
            } else {
                Ok(word)
            }
        })
        .collect()
}

pub fn read_hashes(path: &Path) -> Result<Vec<HexDigest>, CliError> {
    let bytes = read_file(path)?;
    content_lines(path, &bytes)?
        .into_iter()
        .map(|(line, text)| {
            HexDigest::parse(text.trim()).map_err(|e| CliError::Input {
                path: path.to_path_buf(),
                line,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn cmd_generate(
    wordlist: &Path,
    out: &Path,
    perm_seed: u64,
    stdout: &mut dyn Write,
) -> Result<u8, CliError> {
    let words = read_wordlist(wordlist)?;
    let perm = build_permutation(perm_seed);
    let table = generate_canonical(&words, &perm)?;
    save_table(&table, out)?;
    let buckets = build_buckets(&table);
    writeln!(stdout, "chains={}", table.len())?;
    writeln!(stdout, "buckets={}", buckets.len())?;
    Ok(EXIT_OK)
}

/// A loaded table with its permutation and bucket index.
pub struct LoadedTable {
    pub table: RainbowTable,
    pub perm: PearsonPermutation,
    pub buckets: BucketIndex,
}

pub fn open_table(path: &Path) -> Result<LoadedTable, CliError> {
    let table = load_table(path)?;
    let perm = build_permutation(table.perm_seed());
    let buckets = build_buckets(&table);
    Ok(LoadedTable {
        table,
        perm,
        buckets,
    })
}

pub fn cmd_crack(
    table_path: &Path,
    hash: &str,
    search: &SearchArgs,
    show_report: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8, CliError> {
    let hash = HexDigest::parse(hash.trim())?;
    search.config().validate()?;
    let loaded = open_table(table_path)?;
    let report = crack(
        &hash,
        &loaded.table,
        &loaded.buckets,
        &loaded.perm,
        &canonical_reduction_specs(),
        &search.config(),
    )?;
    if let Some(plaintext) = &report.result {
        writeln!(stdout, "{plaintext}")?;
    } else {
        writeln!(stderr, "not found")?;
    }
    if show_report {
        for line in report.counter_lines() {
            writeln!(stdout, "{line}")?;
        }
    }
    Ok(if report.result.is_some() {
        EXIT_OK
    } else {
        EXIT_NOT_FOUND
    })
}

/// One row of the comparison CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareRow {
    pub hash: HexDigest,
    pub found_q: bool,
    pub found_c: bool,
    pub agree: bool,
    pub grover_invocations: usize,
    pub grover_iterations_total: usize,
    pub classical_scan_length: usize,
}

impl CompareRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.hash,
            self.found_q,
            self.found_c,
            self.agree,
            self.grover_invocations,
            self.grover_iterations_total,
            self.classical_scan_length
        )
    }
}

pub fn compare_rows(
    loaded: &LoadedTable,
    hashes: &[HexDigest],
    search: &SearchArgs,
) -> Result<Vec<CompareRow>, CliError> {
    let specs = canonical_reduction_specs();
    let cfg = search.config();
    hashes
        .iter()
        .map(|hash| {
            let q = crack(
                hash,
                &loaded.table,
                &loaded.buckets,
                &loaded.perm,
                &specs,
                &cfg,
            )?;
            let c = crack_classical_report(hash, &loaded.table, &specs);
            Ok(CompareRow {
                hash: hash.clone(),
                found_q: q.result.is_some(),
                found_c: c.result.is_some(),
                agree: q.result == c.result,
                grover_invocations: q.grover_invocations,
                grover_iterations_total: q.grover_iterations_total,
                classical_scan_length: c.scan_length,
            })
        })
        .collect()
}

pub fn cmd_compare(
    table_path: &Path,
    hashes_path: &Path,
    search: &SearchArgs,
    stdout: &mut dyn Write,
) -> Result<u8, CliError> {
    search.config().validate()?;
    let hashes = read_hashes(hashes_path)?;
    let loaded = open_table(table_path)?;
    let rows = compare_rows(&loaded, &hashes, search)?;
    writeln!(stdout, "{CSV_HEADER}")?;
    for row in &rows {
        writeln!(stdout, "{}", row.to_csv())?;
    }
    Ok(if rows.iter().all(|r| r.agree) {
        EXIT_OK
    } else {
        EXIT_NOT_FOUND
    })
}
