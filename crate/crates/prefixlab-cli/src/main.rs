//! `prefixlab`: command-line workbench over machine-graph files.
//!
//! One binary, five subcommands chained over a single text format:
//! `enumerate` materializes the universal interpreter at given budgets,
//! `transform` rewrites one machine into another, `census` tabulates
//! codeword counts, `envelope` emits the non-normative count-envelope
//! report, and `verify` re-checks the invariants of any graph file.
//!
//! Every subcommand is deterministic given its flags and inputs: output
//! files carry no timestamps or randomness, and report provenance is by
//! content hash. Files are written atomically (write to a temporary
//! sibling, then rename).
//!
//! Exit codes are stable API: 0 ok, 1 verification failure, 2 usage,
//! 3 resource ceiling, 4 input invalid, 5 precondition unmet.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use prefixlab::bitstring::BitString;
use prefixlab::census::{self, CensusTable};
use prefixlab::dyadic::Dyadic;
use prefixlab::machine::{self, MachineGraph};
use prefixlab::transform::{self, TransformError};
use prefixlab::universal::{self, UniversalError, DEFAULT_ENUMERATION_CEILING};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CEILING: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_PRECONDITION: u8 = 5;

/// Environment variable overriding the default enumeration ceiling;
/// an explicit `--ceiling` flag wins over both.
const CEILING_ENV: &str = "PREFIXLAB_CEILING";

#[derive(Parser)]
#[command(
    name = "prefixlab",
    version,
    about = "Workbench for finite presentations of prefix-free machines",
    after_help = "Machine-graph files: one `<codeword><TAB><symbol>` line per entry, \
                  both sides over {0,1} with `-` for the empty string; lines starting \
                  with `#` are comments; line order is the enumeration order."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the universal interpreter's halting programs at given budgets
    Enumerate {
        /// Longest program, in bits
        #[arg(long)]
        max_len: u64,
        /// Interpreter step budget per program
        #[arg(long)]
        max_steps: u64,
        /// Cap on 2^(max_len+1) candidate programs
        #[arg(long)]
        ceiling: Option<u64>,
        /// Output machine-graph file
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Rewrite a machine graph into another
    Transform {
        kind: TransformKind,
        /// Input machine-graph file
        input: PathBuf,
        /// Output machine-graph file
        #[arg(short, long)]
        output: PathBuf,
        /// Codewords added per symbol (infinite-preimage)
        #[arg(long)]
        budget: Option<u64>,
        /// Longest output codeword, in bits (dense-optimal)
        #[arg(long)]
        max_len: Option<u64>,
        /// Cap on emitted codewords (dense-optimal)
        #[arg(long)]
        ceiling: Option<u64>,
    },
    /// Tabulate codeword counts by symbol and length
    Census {
        /// Input machine-graph file
        input: PathBuf,
        /// Output JSON table
        #[arg(short, long)]
        output: PathBuf,
        /// Largest counted length (default: longest codeword)
        #[arg(long)]
        max_n: Option<u64>,
        /// Also write the census-derived semi-measure here (JSON)
        #[arg(long)]
        semi_measure: Option<PathBuf>,
    },
    /// Non-normative report comparing census counts to their envelope
    Envelope {
        /// Machine to report on
        machine: PathBuf,
        /// Universal graph supplying the complexity bounds
        universal_graph: PathBuf,
        /// Output TSV report
        #[arg(short, long)]
        output: PathBuf,
        /// Largest reported length (default: longest codeword)
        #[arg(long)]
        max_n: Option<u64>,
        /// Also search each symbol for a codeword within h_tilde + slack
        #[arg(long)]
        witness_slack: Option<u64>,
        /// Where to write the witness TSV (requires --witness-slack)
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Re-check the invariants of a graph file; with a second file,
    /// also check that per-symbol minimal codeword lengths match
    Verify {
        /// Machine-graph file to check
        machine: PathBuf,
        /// The machine this one was transformed from
        source: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    /// Keep only codewords no longer than each symbol's first-listed one
    FinitePreimage,
    /// Widen every preimage with a budgeted codeword family
    InfinitePreimage,
    /// Pad a universal graph into a census-dense machine
    DenseOptimal,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Enumerate {
            max_len,
            max_steps,
            ceiling,
            output,
        } => cmd_enumerate(max_len, max_steps, ceiling, &output),
        Command::Transform {
            kind,
            input,
            output,
            budget,
            max_len,
            ceiling,
        } => cmd_transform(kind, &input, &output, budget, max_len, ceiling),
        Command::Census {
            input,
            output,
            max_n,
            semi_measure,
        } => cmd_census(&input, &output, max_n, semi_measure.as_deref()),
        Command::Envelope {
            machine,
            universal_graph,
            output,
            max_n,
            witness_slack,
            witness_out,
        } => cmd_envelope(
            &machine,
            &universal_graph,
            &output,
            max_n,
            witness_slack,
            witness_out.as_deref(),
        ),
        Command::Verify { machine, source } => cmd_verify(&machine, source.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

/// Flag > environment > default.
fn resolve_ceiling(flag: Option<u64>) -> Result<(u64, bool), CliError> {
    if let Some(c) = flag {
        return Ok((c, true));
    }
    match std::env::var(CEILING_ENV) {
        Ok(text) => {
            let c = text.parse::<u64>().map_err(|_| {
                CliError::new(
                    EXIT_USAGE,
                    format!("{CEILING_ENV}={text:?} is not a nonnegative integer"),
                )
            })?;
            Ok((c, true))
        }
        Err(_) => Ok((DEFAULT_ENUMERATION_CEILING, false)),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<MachineGraph, CliError> {
    MachineGraph::from_text(&read_text(path)?)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

/// Write-then-rename so readers never see a half-written file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| {
        CliError::new(EXIT_INPUT, format!("cannot write {}: {e}", path.display()))
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path)
        .map_err(|e| fail(e.error))?;
    Ok(())
}

fn map_universal_error(e: UniversalError) -> CliError {
    match e {
        UniversalError::CeilingExceeded { .. } => CliError::new(EXIT_CEILING, e.to_string()),
    }
}

fn map_transform_error(e: TransformError) -> CliError {
    match e {
        TransformError::NoDuplicatePreimage => CliError::new(EXIT_PRECONDITION, e.to_string()),
        TransformError::CeilingExceeded { .. } | TransformError::ZeroRunTooLong { .. } => {
            CliError::new(EXIT_CEILING, e.to_string())
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_enumerate(
    max_len: u64,
    max_steps: u64,
    ceiling_flag: Option<u64>,
    output: &Path,
) -> Result<u8, CliError> {
    let (mut ceiling, explicit) = resolve_ceiling(ceiling_flag)?;
    // A ceiling covering more than the candidate count is inert; clamp
    // audibly rather than carry a meaningless limit.
    if explicit {
        if let Some(candidates) = max_len
            .checked_add(1)
            .filter(|s| *s < 64)
            .map(|s| 1u64 << s)
        {
            if ceiling >= candidates {
                eprintln!(
                    "warning: ceiling {ceiling} covers all 2^{} candidate programs; \
                     clamping to {candidates}",
                    max_len + 1
                );
                ceiling = candidates;
            }
        }
    }
    let graph = universal::enumerate(max_len, max_steps, ceiling).map_err(map_universal_error)?;
    write_atomic(output, &graph.to_file_string())?;
    Ok(0)
}

fn cmd_transform(
    kind: TransformKind,
    input: &Path,
    output: &Path,
    budget: Option<u64>,
    max_len: Option<u64>,
    ceiling_flag: Option<u64>,
) -> Result<u8, CliError> {
    let graph = load_graph(input)?;
    match kind {
        TransformKind::FinitePreimage => {
            let result = transform::finite_preimage(&graph);
            write_atomic(output, &result.machine.to_file_string())?;
            let sidecar = sidecar_path(output, "bounds.json");
            write_atomic(&sidecar, &result.bounds_json())?;
        }
        TransformKind::InfinitePreimage => {
            let budget = budget.ok_or_else(|| {
                CliError::new(EXIT_USAGE, "infinite-preimage requires --budget")
            })?;
            if budget == 0 {
                return Err(CliError::new(EXIT_USAGE, "--budget must be at least 1"));
            }
            let widened =
                transform::infinite_preimage(&graph, budget).map_err(map_transform_error)?;
            write_atomic(output, &widened.to_file_string())?;
        }
        TransformKind::DenseOptimal => {
            let max_len = max_len.ok_or_else(|| {
                CliError::new(EXIT_USAGE, "dense-optimal requires --max-len")
            })?;
            let (ceiling, _) = resolve_ceiling(ceiling_flag)?;
            let dense = transform::dense_optimal(&graph, max_len, ceiling)
                .map_err(map_transform_error)?;
            write_atomic(output, &dense.to_file_string())?;
        }
    }
    Ok(0)
}

fn sidecar_path(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    output.with_file_name(name)
}

fn cmd_census(
    input: &Path,
    output: &Path,
    max_n: Option<u64>,
    semi_measure: Option<&Path>,
) -> Result<u8, CliError> {
    let graph = load_graph(input)?;
    let max_n = max_n.unwrap_or_else(|| graph.max_codeword_len());
    let table = CensusTable::build(&graph, max_n);
    write_atomic(output, &table.to_json())?;
    if let Some(path) = semi_measure {
        let sm = transform::semi_measure_of_census(&graph, max_n);
        write_atomic(path, &sm.to_json())?;
    }
    Ok(0)
}

fn cmd_envelope(
    machine_path: &Path,
    universal_path: &Path,
    output: &Path,
    max_n: Option<u64>,
    witness_slack: Option<u64>,
    witness_out: Option<&Path>,
) -> Result<u8, CliError> {
    let machine = load_graph(machine_path)?;
    let u_graph = load_graph(universal_path)?;
    let max_n = max_n.unwrap_or_else(|| machine.max_codeword_len());
    let rows = census::envelope_report(&u_graph, &machine, max_n);
    write_atomic(output, &census::envelope_report_tsv(&rows, &machine.content_hash()))?;
    match (witness_slack, witness_out) {
        (Some(slack), Some(path)) => {
            let rows = transform::optimality_witness_report(&machine, &u_graph, slack);
            write_atomic(
                path,
                &transform::optimality_witness_tsv(&rows, &machine.content_hash(), slack),
            )?;
        }
        (None, None) => {}
        _ => {
            return Err(CliError::new(
                EXIT_USAGE,
                "--witness-slack and --witness-out must be given together",
            ));
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Per-symbol minimal codeword length over a raw entry list.
fn min_lengths(entries: &[(BitString, BitString)]) -> BTreeMap<&BitString, u64> {
    let mut map: BTreeMap<&BitString, u64> = BTreeMap::new();
    for (codeword, symbol) in entries {
        let len = codeword.len() as u64;
        map.entry(symbol)
            .and_modify(|m| *m = (*m).min(len))
            .or_insert(len);
    }
    map
}

/// Runs the invariant checks on raw entry lists (so that invalid
/// presentations are reported, not rejected), printing one line per
/// check.
fn cmd_verify(machine_path: &Path, source_path: Option<&Path>) -> Result<u8, CliError> {
    let text = read_text(machine_path)?;
    let entries = machine::parse_entries(&text)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", machine_path.display())))?;
    let codewords: Vec<BitString> = entries.iter().map(|(p, _)| p.clone()).collect();
    let mut all_pass = true;
    let mut check = |name: &str, outcome: Result<String, String>| match outcome {
        Ok(detail) => println!("PASS {name} ({detail})"),
        Err(detail) => {
            all_pass = false;
            println!("FAIL {name}: {detail}");
        }
    };

    check(
        "prefix-freeness",
        match machine::find_violation(&codewords) {
            None => Ok(format!("{} codewords", codewords.len())),
            Some(e) => Err(e.to_string()),
        },
    );

    let kraft = machine::kraft_sum(codewords.iter());
    check(
        "kraft-bound",
        if kraft <= Dyadic::one() {
            Ok(format!("sum = {kraft}"))
        } else {
            Err(format!("sum = {kraft} exceeds one"))
        },
    );

    // Census reconciliation off the raw entries: cumulative counts must
    // telescope from length slices, marginalize to the domain count, and
    // the slice-weighted sum must reproduce the Kraft sum exactly.
    let max_n = codewords.iter().map(|p| p.len() as u64).max().unwrap_or(0);
    let reconciliation = (|| {
        let mut slice_total = Dyadic::zero();
        let mut symbols: Vec<&BitString> = Vec::new();
        for (_, s) in &entries {
            if !symbols.contains(&s) {
                symbols.push(s);
            }
        }
        for symbol in &symbols {
            for l in 0..=max_n {
                let slice = entries
                    .iter()
                    .filter(|(p, s)| s == *symbol && p.len() as u64 == l)
                    .count() as u64;
                slice_total += &Dyadic::count_times_pow2_neg(slice, l);
            }
        }
        if slice_total != kraft {
            return Err(format!("slice-weighted sum {slice_total} != Kraft sum {kraft}"));
        }
        let mut cumulative_total = 0u64;
        for symbol in &symbols {
            cumulative_total += entries
                .iter()
                .filter(|(p, s)| s == *symbol && p.len() as u64 <= max_n)
                .count() as u64;
        }
        let domain = codewords.iter().filter(|p| p.len() as u64 <= max_n).count() as u64;
        if cumulative_total != domain {
            return Err(format!(
                "per-symbol counts total {cumulative_total}, domain has {domain}"
            ));
        }
        Ok(format!("max length {max_n}"))
    })();
    check("census-reconciliation", reconciliation);

    let counting = (|| {
        let mut mins: Vec<u64> = min_lengths(&entries).into_values().collect();
        mins.sort_unstable();
        for n in 0u64..=16 {
            let count = mins.iter().take_while(|&&l| l < n).count() as u64;
            let limit = (1u64 << n) - 1;
            if count > limit {
                return Err(format!(
                    "{count} symbols below complexity {n}, limit {limit}"
                ));
            }
        }
        Ok("n <= 16".to_string())
    })();
    check("counting-bound", counting);

    if let Some(source_path) = source_path {
        let source_text = read_text(source_path)?;
        let source_entries = machine::parse_entries(&source_text)
            .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", source_path.display())))?;
        let ours = min_lengths(&entries);
        let theirs = min_lengths(&source_entries);
        let preservation = (|| {
            let mut symbols: Vec<&BitString> = ours.keys().chain(theirs.keys()).copied().collect();
            symbols.sort();
            symbols.dedup();
            for symbol in &symbols {
                match (ours.get(*symbol), theirs.get(*symbol)) {
                    (Some(a), Some(b)) if a == b => {}
                    (a, b) => {
                        let show = |v: Option<&u64>| {
                            v.map_or_else(|| "inf".to_string(), |x| x.to_string())
                        };
                        return Err(format!(
                            "symbol {symbol:?}: minimal length {} here, {} in source",
                            show(a),
                            show(b)
                        ));
                    }
                }
            }
            Ok(format!("{} symbols", symbols.len()))
        })();
        check("h-preservation", preservation);
    }

    Ok(if all_pass { 0 } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_path_appends_suffix() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/out.mg"), "bounds.json"),
            PathBuf::from("/tmp/out.mg.bounds.json")
        );
        assert_eq!(
            sidecar_path(Path::new("out.mg"), "bounds.json"),
            PathBuf::from("out.mg.bounds.json")
        );
    }

    #[test]
    fn min_lengths_picks_shortest_per_symbol() {
        let entries = vec![
            ("00".parse().unwrap(), "-".parse().unwrap()),
            ("1".parse().unwrap(), "-".parse().unwrap()),
            ("01".parse().unwrap(), "0".parse().unwrap()),
        ];
        let mins = min_lengths(&entries);
        let empty: BitString = "-".parse().unwrap();
        let zero: BitString = "0".parse().unwrap();
        assert_eq!(mins[&empty], 1);
        assert_eq!(mins[&zero], 2);
    }
}
