//! `qseal` command-line front end.
//!
//! Each protocol role runs as its own invocation and hands state over
//! through files: the public memory file (readable and writable by anyone),
//! Alice's private record, and reader grants. Commands that measure the
//! memory write the collapsed state back, so a broken seal stays broken.
//!
//! Exit status: 0 on success or an intact verdict, 2 on a broken verdict,
//! 1 on usage, I/O or format errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adversary::{run_attack, Strategy};
use crate::error::{Result, SealError};
use crate::montecarlo::{
    render_table, run_trials_with, strategy_or_none, theoretical_rates, Execution, GrantSpec, MessageSpec, TrialConfig,
};
use crate::persist::{read_grant, read_json, read_seal_document, write_json, GrantDocument, SealDocument};
use crate::protocol::{
    alice_verify, bob_verify, default_grant_indices, encode, grant_subset, public_read, sample_grant_indices,
    Verdict, VerificationReport,
};
use crate::rng::{RandomSource, Role};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BROKEN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qseal", version, about = "Quantum seal protocol simulator")]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Seed for this invocation's random stream; a time-based seed is used
    /// (and logged on stderr) when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Trial coordinate; with the same seed, reproduces the streams of
    /// trial N of `simulate`.
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

impl SeedArgs {
    fn source(&self, role: Role, err: &mut dyn Write) -> RandomSource {
        RandomSource::for_role(resolve_seed(self.seed, err), self.trial, role)
    }
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        let _ = writeln!(err, "no --seed given; using seed {s}");
        s
    })
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Seal a bit string: writes the public memory and Alice's private record.
    Encode {
        /// Message bits, e.g. 0110.
        #[arg(long)]
        bits: String,
        /// Public memory file.
        #[arg(long)]
        out: PathBuf,
        /// Alice's private record file.
        #[arg(long)]
        record: PathBuf,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Public readout in the announced basis; writes the collapsed memory back.
    Read {
        #[arg(long = "in")]
        input: PathBuf,
        /// Where to write the post-measurement memory (default: in place).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Alice measures every qubit in its preparation basis.
    VerifyAlice {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Alice prepares fresh copies of chosen qubits for an intended reader.
    Grant {
        #[arg(long)]
        record: PathBuf,
        #[arg(long, default_value = "bob")]
        reader: String,
        /// Comma-separated qubit indices.
        #[arg(long, conflicts_with = "fraction")]
        indices: Option<String>,
        /// Uniformly sample this fraction of the qubits (default: 10% spread over blocks).
        #[arg(long)]
        fraction: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Intended reader SWAP-tests each granted copy against the memory.
    VerifyBob {
        #[arg(long)]
        grant: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Read the memory with an attack strategy; writes the post-attack memory back.
    Attack {
        /// single-qubit | partial | collective
        #[arg(long)]
        strategy: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Monte-Carlo detection statistics.
    Simulate {
        /// TrialConfig JSON file.
        #[arg(long, conflicts_with = "config_json")]
        config: Option<PathBuf>,
        /// TrialConfig as an inline JSON string.
        #[arg(long)]
        config_json: Option<String>,
        /// Random message length per trial.
        #[arg(long, default_value_t = 8)]
        message_bits: usize,
        /// Fixed message, e.g. 0110 (overrides --message-bits).
        #[arg(long)]
        bits: Option<String>,
        /// none | single-qubit | partial | collective
        #[arg(long, default_value = "none")]
        strategy: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, conflicts_with = "indices")]
        fraction: Option<f64>,
        #[arg(long)]
        indices: Option<String>,
        /// Include per-trial records in JSON output.
        #[arg(long)]
        per_trial: bool,
        /// Run trials on one thread.
        #[arg(long)]
        serial: bool,
    },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let format = cli.format;
    match cli.command {
        Command::Encode {
            bits,
            out: public,
            record,
            seed,
        } => {
            let bits = parse_bits(&bits)?;
            let (sealed, memory) = encode(&bits, &mut seed.source(Role::Encode, err))?;
            write_json(&public, &SealDocument::public(&memory, sealed.reading_basis()))?;
            write_json(&record, &SealDocument::record(&sealed))?;
            #[derive(Serialize)]
            struct Summary {
                num_bits: usize,
                num_qubits: usize,
                reading_basis: String,
            }
            let summary = Summary {
                num_bits: sealed.num_bits(),
                num_qubits: sealed.num_qubits(),
                reading_basis: sealed.reading_basis().to_string(),
            };
            emit(out, format, &summary, || {
                format!(
                    "sealed {} bits into {} qubits; reading basis {}\n",
                    summary.num_bits, summary.num_qubits, summary.reading_basis
                )
            })?;
            Ok(EXIT_OK)
        }
        Command::Read {
            input,
            out: dest,
            seed,
        } => {
            let doc = read_seal_document(&input)?;
            let mut memory = doc.to_memory()?;
            let read = public_read(&mut memory, doc.reading_basis, &mut seed.source(Role::Read, err))?;
            save_memory(dest.as_deref().unwrap_or(&input), &doc, &memory)?;
            #[derive(Serialize)]
            struct Output {
                bits: String,
                transcript: String,
            }
            let output = Output {
                bits: bit_string(&read.bits),
                transcript: bit_string(&read.transcript),
            };
            emit(out, format, &output, || {
                format!("bits        {}\ntranscript  {}\n", output.bits, output.transcript)
            })?;
            Ok(EXIT_OK)
        }
        Command::VerifyAlice {
            input,
            record,
            out: dest,
            seed,
        } => {
            let doc = read_seal_document(&input)?;
            let mut memory = doc.to_memory()?;
            let sealed = read_seal_document(&record)?.to_sealed()?;
            let report = alice_verify(&mut memory, &sealed, &mut seed.source(Role::AliceVerify, err))?;
            save_memory(dest.as_deref().unwrap_or(&input), &doc, &memory)?;
            emit_report(out, format, &report)
        }
        Command::Grant {
            record,
            reader,
            indices,
            fraction,
            out: dest,
            seed,
        } => {
            let sealed = read_seal_document(&record)?.to_sealed()?;
            let indices = match (indices, fraction) {
                (Some(list), _) => parse_indices(&list)?,
                (None, Some(f)) => sample_grant_indices(sealed.num_qubits(), f, &mut seed.source(Role::Grant, err))?,
                (None, None) => default_grant_indices(&sealed, &mut seed.source(Role::Grant, err)),
            };
            let grant = grant_subset(&sealed, &reader, &indices)?;
            write_json(&dest, &GrantDocument::from_grant(&grant))?;
            #[derive(Serialize)]
            struct Output<'a> {
                reader_id: &'a str,
                indices: &'a [usize],
            }
            let output = Output {
                reader_id: &reader,
                indices: &indices,
            };
            emit(out, format, &output, || {
                let list: Vec<String> = indices.iter().map(usize::to_string).collect();
                format!("granted {} qubits to {}: {}\n", indices.len(), reader, list.join(","))
            })?;
            Ok(EXIT_OK)
        }
        Command::VerifyBob {
            grant,
            input,
            out: dest,
            seed,
        } => {
            let grant = read_grant(&grant)?;
            let doc = read_seal_document(&input)?;
            let mut memory = doc.to_memory()?;
            let report = bob_verify(grant, &mut memory, &mut seed.source(Role::BobVerify, err))?;
            save_memory(dest.as_deref().unwrap_or(&input), &doc, &memory)?;
            emit_report(out, format, &report)
        }
        Command::Attack {
            strategy,
            input,
            out: dest,
            seed,
        } => {
            let strategy: Strategy = strategy.parse()?;
            let doc = read_seal_document(&input)?;
            let mut memory = doc.to_memory()?;
            let outcome = run_attack(strategy, &mut memory, &mut seed.source(Role::Attack, err))?;
            save_memory(dest.as_deref().unwrap_or(&input), &doc, &memory)?;
            #[derive(Serialize)]
            struct Output {
                strategy: String,
                recovered_bits: String,
                qubits_touched: Vec<usize>,
            }
            let output = Output {
                strategy: outcome.strategy.to_string(),
                recovered_bits: bit_string(&outcome.recovered_bits),
                qubits_touched: outcome.qubits_touched.iter().copied().collect(),
            };
            emit(out, format, &output, || {
                format!(
                    "strategy        {}\nrecovered bits  {}\nqubits touched  {}\n",
                    output.strategy,
                    output.recovered_bits,
                    output.qubits_touched.len()
                )
            })?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            config,
            config_json,
            message_bits,
            bits,
            strategy,
            trials,
            seed,
            fraction,
            indices,
            per_trial,
            serial,
        } => {
            let config = if let Some(path) = config {
                read_json::<TrialConfig>(&path)?
            } else if let Some(text) = config_json {
                serde_json::from_str(&text)?
            } else {
                let message = match bits {
                    Some(b) => MessageSpec::Bits(parse_bits(&b)?),
                    None => MessageSpec::Length(message_bits),
                };
                let grant = match (indices, fraction) {
                    (Some(list), _) => GrantSpec::Indices(parse_indices(&list)?),
                    (None, Some(f)) => GrantSpec::Fraction(f),
                    (None, None) => GrantSpec::Fraction(crate::protocol::DEFAULT_GRANT_FRACTION),
                };
                TrialConfig {
                    message,
                    strategy: strategy_or_none::parse(&strategy)?,
                    grant,
                    trials,
                    seed: resolve_seed(seed, err),
                }
            };
            let execution = if serial { Execution::Serial } else { Execution::Parallel };
            let report = run_trials_with(&config, execution, per_trial)?;
            match format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut *out, &report)?;
                    writeln!(out)?;
                }
                Format::Table => {
                    let theory = theoretical_rates(&config)?;
                    out.write_all(render_table(&report, Some(&theory)).as_bytes())?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn save_memory(path: &Path, doc: &SealDocument, memory: &crate::protocol::QuantumMemory) -> Result<()> {
    let mut updated = SealDocument::public(memory, doc.reading_basis);
    // Keep a private record if the input was a combined document.
    updated.blocks = doc.blocks.clone();
    write_json(path, &updated)
}

fn emit<T: Serialize>(out: &mut dyn Write, format: Format, value: &T, table: impl FnOnce() -> String) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, value)?;
            writeln!(out)?;
        }
        Format::Table => out.write_all(table().as_bytes())?,
    }
    Ok(())
}

fn emit_report(out: &mut dyn Write, format: Format, report: &VerificationReport) -> Result<i32> {
    emit(out, format, report, || {
        format!(
            "qubits checked  {}\nmismatches      {}\nverdict         {:?}\n",
            report.qubits_checked, report.mismatches, report.verdict
        )
    })?;
    Ok(match report.verdict {
        Verdict::Intact => EXIT_OK,
        Verdict::Broken => EXIT_BROKEN,
    })
}

fn parse_bits(text: &str) -> Result<Vec<u8>> {
    let bits = text
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(SealError::Malformed(format!("`{other}` is not a bit"))),
        })
        .collect::<Result<Vec<u8>>>()?;
    if bits.is_empty() {
        return Err(SealError::EmptyMessage);
    }
    Ok(bits)
}

fn parse_indices(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| SealError::Malformed(format!("`{s}` is not a qubit index")))
        })
        .collect()
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}
