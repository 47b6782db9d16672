//! Command-line front end.
//!
//! Every subcommand takes the label encoding explicitly, and every scoring
//! subcommand takes the repair method explicitly. There are no defaults for
//! either.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::builder::PossibleValue;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::conll::{parse_corpus, write_corpus, Corpus};
use crate::convert::convert_corpus;
use crate::error::{Error, Result};
use crate::labels::Scheme;
use crate::repair::{repair_corpus, RepairMethod};
use crate::score::{score_pair, ScoreOptions, ScoreReport};
use crate::stats::{compare_groups, f1_points, summarize_runs};
use crate::validate::{format_report, validate_corpus};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

impl ValueEnum for Scheme {
    fn value_variants<'a>() -> &'a [Self] {
        &Scheme::ALL
    }

    fn to_possible_value(&self) -> Option<PossibleValue> {
        let value = PossibleValue::new(self.name());
        Some(if *self == Scheme::BIO {
            value.alias("IOB2")
        } else {
            value
        })
    }
}

impl ValueEnum for RepairMethod {
    fn value_variants<'a>() -> &'a [Self] {
        &RepairMethod::ALL
    }

    fn to_possible_value(&self) -> Option<PossibleValue> {
        Some(PossibleValue::new(self.name()))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "chunkscore",
    version,
    about = "Validate, repair, convert and score CoNLL-style chunk labels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report every invalid label transition in one or more files.
    Validate {
        /// Chunk encoding scheme of the files.
        #[arg(long, value_enum, ignore_case = true)]
        labels: Scheme,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Repair invalid BIO or IOB1 label sequences and write the result.
    Repair {
        #[arg(long, value_enum, ignore_case = true)]
        labels: Scheme,
        #[arg(long, value_enum, ignore_case = true)]
        repair_method: RepairMethod,
        input: PathBuf,
        output: PathBuf,
    },
    /// Convert valid labels between encoding schemes.
    Convert {
        #[arg(long, value_enum, ignore_case = true)]
        input_labels: Scheme,
        #[arg(long, value_enum, ignore_case = true)]
        output_labels: Scheme,
        input: PathBuf,
        output: PathBuf,
    },
    /// Score prediction files against a reference.
    Score {
        #[command(flatten)]
        common: ScoreArgs,
        #[arg(long, value_enum, ignore_case = true)]
        repair_method: RepairMethod,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
        #[arg(required = true)]
        predictions: Vec<PathBuf>,
    },
    /// Score several runs and report the mean and standard deviation of F1.
    Summarize {
        #[command(flatten)]
        common: ScoreArgs,
        #[arg(long, value_enum, ignore_case = true)]
        repair_method: RepairMethod,
        #[arg(required = true)]
        predictions: Vec<PathBuf>,
    },
    /// Compare two groups of runs with the Wilcoxon rank-sum test.
    Compare {
        #[command(flatten)]
        common: ScoreArgs,
        #[arg(long, value_enum, ignore_case = true)]
        method_a: RepairMethod,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        group_a: Vec<PathBuf>,
        #[arg(long, value_enum, ignore_case = true)]
        method_b: RepairMethod,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        group_b: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ScoreArgs {
    /// Chunk encoding scheme of reference and predictions.
    #[arg(long, value_enum, ignore_case = true)]
    labels: Scheme,
    /// Gold-standard file.
    #[arg(long)]
    reference: PathBuf,
    /// Score even if token text differs between reference and prediction.
    #[arg(long)]
    allow_token_mismatch: bool,
    /// Repair an invalid reference with this method instead of failing.
    #[arg(long, value_enum, ignore_case = true)]
    repair_reference: Option<RepairMethod>,
}

impl ScoreArgs {
    fn options(&self) -> ScoreOptions {
        ScoreOptions {
            allow_token_mismatch: self.allow_token_mismatch,
            reference_repair: self.repair_reference,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code: 0 on success, 1 when invalid labels were found,
/// 2 for usage and other errors.
pub fn dispatch<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", err.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", err.render());
                    EXIT_USAGE
                }
            };
        }
    };

    match run(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            if err.is_validity() {
                EXIT_INVALID
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn run(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Validate { labels, files } => {
            let mut code = EXIT_OK;
            for file in &files {
                let corpus = read_corpus(file)?;
                let report = validate_corpus(&corpus, labels)?;
                for warning in &report.warnings {
                    let _ = writeln!(stderr, "{warning}");
                }
                let _ = write!(stdout, "{}", format_report(&report));
                if !report.is_valid() {
                    code = EXIT_INVALID;
                }
            }
            Ok(code)
        }
        Command::Repair {
            labels,
            repair_method,
            input,
            output,
        } => {
            if !matches!(labels, Scheme::BIO | Scheme::IOB1) {
                return Err(Error::Contract(format!(
                    "repair is only supported for BIO and IOB1 labels, not {labels}"
                )));
            }
            if labels == Scheme::IOB1 && repair_method == RepairMethod::Stanza {
                return Err(Error::UnsupportedRepair {
                    scheme: labels,
                    method: repair_method,
                });
            }
            let corpus = read_corpus(&input)?;
            let repaired = repair_corpus(&corpus, labels, repair_method)?;
            let rows: Vec<_> = corpus.sentences().map(|s| s.rows()).collect();
            for record in &repaired.records {
                let row = &rows[record.sentence][record.token];
                let _ = writeln!(
                    stderr,
                    "Repaired {} -> {} for token '{}' on line {}",
                    record.original,
                    record.repaired,
                    row.token(),
                    row.line()
                );
            }
            let _ = writeln!(
                stderr,
                "Repaired {} labels in {} using {} repair",
                repaired.records.len(),
                corpus.source_name(),
                repair_method
            );
            let bytes = write_corpus(&corpus, &repaired.flat_labels())?;
            write_output(&output, &bytes, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Convert {
            input_labels,
            output_labels,
            input,
            output,
        } => {
            let corpus = read_corpus(&input)?;
            let converted = convert_corpus(&corpus, input_labels, output_labels)?;
            let bytes = write_corpus(&corpus, &converted)?;
            write_output(&output, &bytes, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Score {
            common,
            repair_method,
            format,
            predictions,
        } => {
            let reports = score_files(&common, repair_method, &predictions, stderr)?;
            let multiple = reports.len() > 1;
            for (path, report) in predictions.iter().zip(&reports) {
                let text = match format {
                    OutputFormat::Table => report.format_table(),
                    OutputFormat::Csv => report.format_csv(),
                };
                if multiple {
                    let marker = if format == OutputFormat::Csv {
                        "#"
                    } else {
                        "=="
                    };
                    let _ = writeln!(stdout, "{marker} {}", path.display());
                }
                let _ = write!(stdout, "{text}");
            }
            Ok(EXIT_OK)
        }
        Command::Summarize {
            common,
            repair_method,
            predictions,
        } => {
            let reports = score_files(&common, repair_method, &predictions, stderr)?;
            let f1: Vec<f64> = reports.iter().map(f1_points).collect();
            let summary = summarize_runs(&f1)?;
            let width = predictions
                .iter()
                .map(|p| p.display().to_string().chars().count())
                .max()
                .unwrap_or(0)
                .max(4);
            let _ = writeln!(
                stdout,
                "Labels: {}  Repair: {}",
                common.labels, repair_method
            );
            let _ = writeln!(stdout, "{:<width$}  {:>6}", "File", "F1");
            for (path, report) in predictions.iter().zip(&reports) {
                let _ = writeln!(
                    stdout,
                    "{:<width$}  {:>6}",
                    path.display().to_string(),
                    report.micro().f1_percent()
                );
            }
            let _ = writeln!(stdout, "Mean ± std over {} runs: {}", summary.n(), summary);
            Ok(EXIT_OK)
        }
        Command::Compare {
            common,
            method_a,
            group_a,
            method_b,
            group_b,
        } => {
            let reference = read_corpus(&common.reference)?;
            let preds_a = group_a
                .iter()
                .map(|p| read_corpus(p))
                .collect::<Result<Vec<_>>>()?;
            let preds_b = group_b
                .iter()
                .map(|p| read_corpus(p))
                .collect::<Result<Vec<_>>>()?;
            let options = common.options();
            let report = compare_groups(
                &reference,
                common.labels,
                &options,
                method_a,
                &preds_a,
                method_b,
                &preds_b,
            )?;
            let repaired_reference = report
                .scores_a
                .iter()
                .chain(&report.scores_b)
                .map(|r| r.reference_invalid_transitions)
                .max()
                .unwrap_or(0);
            warn_reference_repair(stderr, &common, repaired_reference);
            let _ = write!(stdout, "{}", report.format_table());
            Ok(EXIT_OK)
        }
    }
}

fn score_files(
    common: &ScoreArgs,
    method: RepairMethod,
    predictions: &[PathBuf],
    stderr: &mut dyn Write,
) -> Result<Vec<ScoreReport>> {
    let reference = read_corpus(&common.reference)?;
    let options = common.options();
    let reports = predictions
        .iter()
        .map(|path| {
            let prediction = read_corpus(path)?;
            score_pair(&reference, &prediction, common.labels, method, &options)
        })
        .collect::<Result<Vec<_>>>()?;
    let repaired_reference = reports
        .first()
        .map_or(0, |r| r.reference_invalid_transitions);
    warn_reference_repair(stderr, common, repaired_reference);
    Ok(reports)
}

fn warn_reference_repair(stderr: &mut dyn Write, common: &ScoreArgs, invalid: usize) {
    if let (Some(method), true) = (common.repair_reference, invalid > 0) {
        let _ = writeln!(
            stderr,
            "WARNING: the reference {} contains {} invalid transitions and was repaired with {} repair.\n\
             WARNING: these scores are NOT computed against the original gold standard.",
            common.reference.display(),
            invalid,
            method
        );
    }
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    if is_stdio(path) {
        let mut bytes = Vec::new();
        io::stdin()
            .read_to_end(&mut bytes)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        return parse_corpus(&bytes, "<stdin>");
    }
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&bytes, &path.display().to_string())
}

/// Writes to a temporary file next to `path` and renames it into place, so
/// a failed run never leaves partial output.
fn write_output(path: &Path, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if is_stdio(path) {
        return stdout.write_all(bytes).map_err(io_err);
    }
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
