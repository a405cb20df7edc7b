//! Command-line front end.
//!
//! ```text
//! window-sketch count  -w 4 -e 1/4 -i stream.txt
//! window-sketch sum    -w 256 -e 1/16 -r 1500 -i -
//! window-sketch bounds -w 1024 -e 1/64
//! window-sketch gen    --kind bernoulli --p 0.3 --length 1000 --seed 7
//! ```
//!
//! Exit codes: 0 success, 2 usage error, 3 parameter-regime error,
//! 4 input error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::bounds;
use crate::count::{CountParams, CountSketch};
use crate::error::Error;
use crate::harness::{evaluate_with, report_json, report_text, EvalOptions, WindowSketch};
use crate::numeric::{parse_rational, Rational};
use crate::streams::{self, LanguageSampler, SumAlphabet};
use crate::sum::{SumParams, SumSketch, Variant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "window-sketch",
    version,
    about = "Additive-error sliding-window sketches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count ones over a sliding window of a bit stream.
    Count(RunArgs),
    /// Sum integers in [0, R] over a sliding window.
    Sum(SumArgs),
    /// Print memory bounds for (W, ε[, R]).
    Bounds(BoundsArgs),
    /// Generate a stream in the line format.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(short = 'w', long)]
    window: u64,
    /// Fraction "p/q" or decimal.
    #[arg(short = 'e', long)]
    epsilon: String,
    /// Path or "-" for standard input.
    #[arg(short = 'i', long, default_value = "-")]
    input: String,
    #[arg(short = 'q', long, default_value_t = 1)]
    query_every: u64,
    /// Clamp estimates to [0, W·R].
    #[arg(long)]
    clamp: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    report: ReportFormat,
}

#[derive(Debug, Args)]
struct SumArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(short = 'r', long)]
    range: u64,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(short = 'w', long)]
    window: u64,
    #[arg(short = 'e', long)]
    epsilon: String,
    #[arg(short = 'r', long)]
    range: Option<u64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    report: ReportFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Bernoulli,
    Uniform,
    Blocks,
    Sumlang,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    length: usize,
    /// Run bits for `blocks` ("1,0,1"), letter indices for `sumlang` ("3,0,7");
    /// random when omitted.
    #[arg(long)]
    pattern: Option<String>,
    #[arg(short = 'w', long)]
    window: Option<u64>,
    #[arg(short = 'e', long)]
    epsilon: Option<String>,
    #[arg(short = 'r', long, default_value_t = 1)]
    range: u64,
    /// Zeros appended after a language word.
    #[arg(long, default_value_t = 0)]
    pad: u64,
}

enum Failure {
    Usage(String),
    Regime(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::OutOfRange { .. } => Failure::Input(e.to_string()),
            other => Failure::Regime(other),
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(
    argv: I,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Count(args) => run_count(args, stdin),
        Command::Sum(args) => run_sum(args, stdin),
        Command::Bounds(args) => run_bounds(args),
        Command::Gen(args) => run_gen(args),
    };
    match outcome {
        Ok(text) => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Regime(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_REGIME
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn parse_epsilon(text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(|e| Failure::Usage(e.to_string()))
}

fn read_input(path: &str, stdin: &mut dyn BufRead) -> Result<Vec<u64>, Failure> {
    let parsed = if path == "-" {
        streams::parse_stream_reader(stdin)
    } else {
        let file = File::open(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
        streams::parse_stream_reader(BufReader::new(file))
    };
    Ok(parsed?)
}

fn render(value: Value, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => format!("{}\n", serde_json::to_string_pretty(&value).expect("json")),
        ReportFormat::Text => report_text(&value),
    }
}

fn evaluate_sketch<S: WindowSketch>(
    sketch: &mut S,
    args: &RunArgs,
    stdin: &mut dyn BufRead,
    header: Map<String, Value>,
) -> Result<String, Failure> {
    if args.query_every == 0 {
        return Err(Failure::Usage("--query-every must be at least 1".into()));
    }
    let values = read_input(&args.input, stdin)?;
    let errors = evaluate_with(
        sketch,
        values,
        EvalOptions {
            query_every: args.query_every,
            clamp: args.clamp,
        },
    )?;
    let mut map = header;
    if let Value::Object(body) = report_json(&errors, &sketch.memory_report()) {
        map.extend(body);
    }
    map.insert(
        "estimate".into(),
        Value::String(crate::numeric::format_decimal(
            if args.clamp {
                sketch.estimate_clamped()
            } else {
                sketch.estimate()
            },
            15,
        )),
    );
    Ok(render(Value::Object(map), args.report))
}

fn run_count(args: RunArgs, stdin: &mut dyn BufRead) -> Result<String, Failure> {
    let epsilon = parse_epsilon(&args.epsilon)?;
    let params = CountParams::derive(args.window, epsilon)?;
    let mut header = Map::new();
    header.insert("sketch".into(), "count".into());
    header.insert("window".into(), params.window().into());
    header.insert("epsilon".into(), epsilon.to_string().into());
    header.insert("blocks".into(), params.blocks().into());
    header.insert("block_size".into(), params.block_size().into());
    let mut sketch = CountSketch::new(params);
    evaluate_sketch(&mut sketch, &args, stdin, header)
}

fn run_sum(args: SumArgs, stdin: &mut dyn BufRead) -> Result<String, Failure> {
    let epsilon = parse_epsilon(&args.run.epsilon)?;
    let params = SumParams::derive(args.run.window, args.range, epsilon)?;
    let mut header = Map::new();
    header.insert("sketch".into(), "sum".into());
    header.insert("window".into(), params.window().into());
    header.insert("range".into(), params.range().into());
    header.insert("epsilon".into(), epsilon.to_string().into());
    let variant = match params.variant() {
        Variant::LargeEps { .. } => "large_eps",
        Variant::SmallEps { .. } => "small_eps",
    };
    header.insert("variant".into(), variant.into());
    header.insert("rho".into(), params.rho().into());
    header.insert("blocks".into(), params.blocks().into());
    let mut sketch = SumSketch::new(params);
    evaluate_sketch(&mut sketch, &args.run, stdin, header)
}

fn run_bounds(args: BoundsArgs) -> Result<String, Failure> {
    let epsilon = parse_epsilon(&args.epsilon)?;
    if args.window < 2 {
        return Err(Failure::Regime(Error::InvalidWindow(args.window)));
    }
    if epsilon <= Rational::from_integer(0) {
        return Err(Failure::Regime(Error::InvalidEpsilon(args.epsilon.clone())));
    }
    let w = args.window;
    let mut map = Map::new();
    map.insert("window".into(), w.into());
    map.insert("epsilon".into(), epsilon.to_string().into());
    map.insert(
        "block_language_bound".into(),
        bounds::block_language_bound(w, epsilon).into(),
    );
    if let Ok(lower) = bounds::count_lower_bound(w, epsilon) {
        map.insert("count_lower_bound".into(), lower.into());
    }
    map.insert(
        "count_upper_theory".into(),
        bounds::count_upper_theory(w, epsilon).into(),
    );
    map.insert(
        "additive_state_bits".into(),
        bounds::additive_state_bits(w, epsilon).into(),
    );
    if let Ok(succinct) = bounds::succinct_bound(w, epsilon) {
        map.insert("succinct_bound".into(), succinct.into());
    }
    if let Some(r) = args.range {
        map.insert("range".into(), r.into());
        map.insert(
            "sum_lower_bound".into(),
            bounds::sum_lower_bound(w, r, epsilon)?.into(),
        );
    }
    Ok(render(Value::Object(map), args.report))
}

fn language_params(args: &GenArgs) -> Result<(u64, Rational), Failure> {
    let window = args
        .window
        .ok_or_else(|| Failure::Usage("--window is required for language streams".into()))?;
    let epsilon = args
        .epsilon
        .as_deref()
        .ok_or_else(|| Failure::Usage("--epsilon is required for language streams".into()))?;
    Ok((window, parse_epsilon(epsilon)?))
}

fn run_gen(args: GenArgs) -> Result<String, Failure> {
    let values = match args.kind {
        GenKind::Bernoulli => {
            if !(0.0..=1.0).contains(&args.p) {
                return Err(Failure::Usage("--p must lie in [0, 1]".into()));
            }
            streams::gen_bernoulli(args.p, args.length, args.seed)
        }
        GenKind::Uniform => streams::gen_uniform(args.range, args.length, args.seed),
        GenKind::Blocks => {
            let (window, epsilon) = language_params(&args)?;
            let pattern = match &args.pattern {
                Some(text) => {
                    streams::parse_pattern(text).map_err(|e| Failure::Usage(e.to_string()))?
                }
                None => LanguageSampler::new(args.seed)
                    .pattern(streams::language_block_count(window, epsilon)),
            };
            streams::gen_block_language(window, epsilon, &pattern)?
                .into_iter()
                .map(|b| b * args.range)
                .collect()
        }
        GenKind::Sumlang => {
            let (window, epsilon) = language_params(&args)?;
            let letters = match &args.pattern {
                Some(text) => text
                    .split(',')
                    .map(|t| t.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| Failure::Usage(format!("bad letter index: {e}")))?,
                None => {
                    let alphabet = SumAlphabet::new(window, args.range, epsilon);
                    LanguageSampler::new(args.seed).letters(alphabet.size, window)
                }
            };
            streams::gen_sum_language(window, args.range, epsilon, &letters)?
        }
    };
    Ok(streams::format_stream(&streams::pad_zeros(
        values, args.pad,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let mut stdin = input.as_bytes();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["window-sketch"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut stdin, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn count_from_stdin() {
        let (code, out, _) = call(
            &["count", "--window", "4", "--epsilon", "1/4", "--input", "-"],
            "1\n1\n1\n1\n",
        );
        assert_eq!(code, 0);
        let json: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(json["max_abs_error"], "1");
        assert_eq!(json["violations"], 0);
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = call(&["sum", "-w", "10", "-e", "1/300", "-r", "10"], "");
        assert_eq!(code, EXIT_REGIME);
        assert!(err.contains("exact summing required"));
        assert_eq!(call(&["count", "-w", "4"], "").0, EXIT_USAGE);
        assert_eq!(call(&["count", "-w", "4", "-e", "abc"], "").0, EXIT_USAGE);
        assert_eq!(
            call(&["count", "-w", "4", "-e", "1/4"], "1\nx\n").0,
            EXIT_INPUT
        );
        assert_eq!(
            call(&["count", "-w", "4", "-e", "1/4"], "1\n2\n").0,
            EXIT_INPUT
        );
        assert_eq!(call(&["count", "-w", "4", "-e", "1/16"], "").0, EXIT_REGIME);
        assert_eq!(
            call(
                &["count", "-w", "4", "-e", "1/4", "-i", "/nonexistent/x"],
                ""
            )
            .0,
            EXIT_INPUT
        );
        assert_eq!(call(&["--help"], "").0, EXIT_OK);
    }

    #[test]
    fn bounds_table() {
        let (code, out, _) = call(&["bounds", "--window", "1024", "--epsilon", "1/64"], "");
        assert_eq!(code, 0);
        let json: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(json["count_lower_bound"], 31);
        assert_eq!(json["count_upper_theory"], 58.0);
    }

    #[test]
    fn decimal_epsilon_is_exact() {
        let (code, out, _) = call(
            &["count", "-w", "8", "-e", "0.25", "--report", "text"],
            "1\n",
        );
        assert_eq!(code, 0);
        assert!(out.contains("epsilon: 1/4\n"));
        assert!(out.contains("blocks: 2\n"));
    }
}
