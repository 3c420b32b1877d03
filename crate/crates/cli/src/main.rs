mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qhyper::batch::{self, Strategy, VerifyConfig};
use qhyper::crossratio::LEMMA_LABELS;
use qhyper::jorgensen::{conjugation_orbit, fk_sequence, jorgensen_test};
use qhyper::spectral::{spectral_report, UNIT_TOL};
use qhyper::spn1::{SamplerConfig, IDENTITY_LABELS};
use qhyper::SpElement;

use output::{fmt_f64, write_csv, write_json, Sink};

#[derive(Parser)]
#[command(name = "qhyper", version, about = "Isometries of quaternionic hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral report for each input element.
    Classify {
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = UNIT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Discreteness test for a loxodromic g and an element h.
    Test {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Trace of the orbit h_{k+1} = h_k g h_k^{-1} in the frame of g.
    Iterate {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The sequence f_k = g^{-k} h_{2k} g^k for k = 0..=K.
    Fk {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residuals of the block identities and corner inequalities over
    /// seeded samples. Exits with status 2 if any sample fails.
    Verify {
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write seeded sample elements as element_XXXX.json.
    Sample {
        #[command(flatten)]
        sampling: Sampling,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Pair {
    /// Two element files: g, then h.
    #[arg(long = "in", num_args = 1, required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct Sampling {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Sample i is a word of length 1 + i mod this.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    word_length: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<qhyper::Error> for Failure {
    fn from(e: qhyper::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(2)
        }
    }
}

fn read_element(path: &Path) -> Result<SpElement, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let offset = output::byte_offset(&text, e.line(), e.column());
        Failure::Usage(format!("{}: parse error at byte {offset}: {e}", path.display()))
    })
}

fn read_pair(pair: &Pair) -> Result<(SpElement, SpElement), Failure> {
    match pair.inputs.as_slice() {
        [g, h] => Ok((read_element(g)?, read_element(h)?)),
        other => Err(Failure::Usage(format!(
            "expected two --in files (g, then h), got {}",
            other.len()
        ))),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Classify { inputs, tol, out } => {
            let mut reports = Vec::with_capacity(inputs.len());
            for path in &inputs {
                let g = read_element(path)?;
                let r = spectral_report(&g, tol)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                reports.push((path, r));
            }
            let sink = Sink::open(out.out.as_deref())?;
            match out.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let v: Vec<_> = reports.iter().map(|(_, r)| r).collect();
                    write_json(sink, &v)?;
                }
                Format::Csv => {
                    let rows = reports.iter().map(|(p, r)| {
                        vec![
                            p.display().to_string(),
                            format!("{:?}", r.kind),
                            opt(r.delta),
                            opt(r.mg),
                            r.low_confidence.to_string(),
                        ]
                    });
                    write_csv(sink, &["input", "kind", "delta", "mg", "low_confidence"], rows)?;
                }
            }
        }
        Command::Test { pair, out } => {
            let (g, h) = read_pair(&pair)?;
            let outcome = jorgensen_test(&g, &h)?;
            let sink = Sink::open(out.out.as_deref())?;
            match out.format.unwrap_or(Format::Json) {
                Format::Json => write_json(sink, &outcome)?,
                Format::Csv => write_csv(
                    sink,
                    &["verdict", "mg", "cross_abs1", "cross_abs2", "condition_holds", "pi0", "diag0", "pi1"],
                    std::iter::once(vec![
                        serde_json::to_value(outcome.verdict)
                            .ok()
                            .and_then(|v| v.as_str().map(str::to_owned))
                            .unwrap_or_default(),
                        fmt_f64(outcome.mg),
                        fmt_f64(outcome.cross_abs1),
                        fmt_f64(outcome.cross_abs2),
                        outcome.condition_holds.to_string(),
                        fmt_f64(outcome.pi0),
                        fmt_f64(outcome.diag0),
                        fmt_f64(outcome.pi1),
                    ]),
                )?,
            }
        }
        Command::Iterate { pair, steps, out } => {
            let (g, h) = read_pair(&pair)?;
            let trace = conjugation_orbit(&g, &h, steps)?;
            let rows = trace.rows();
            let sink = Sink::open(out.out.as_deref())?;
            match out.format.unwrap_or(Format::Csv) {
                Format::Csv => write_csv(
                    sink,
                    &[
                        "k", "pi_k", "sqrt_pi_k", "bound", "corner_nn", "corner_nn1", "corner_n1n",
                        "corner_n1n1", "alpha", "beta", "gamma", "theta", "discrepancy",
                    ],
                    rows.iter().map(|r| {
                        let mut v = vec![r.k.to_string()];
                        v.extend(
                            [
                                r.pi_k, r.sqrt_pi_k, r.bound, r.corner_nn, r.corner_nn1, r.corner_n1n,
                                r.corner_n1n1, r.alpha, r.beta, r.gamma, r.theta, r.discrepancy,
                            ]
                            .map(fmt_f64),
                        );
                        v
                    }),
                )?,
                Format::Json => write_json(
                    sink,
                    &json!({
                        "mg": trace.mg,
                        "t1": trace.t1,
                        "t2": trace.t2,
                        "r": trace.r,
                        "regime": trace.regime,
                        "bounds_hold": trace.bounds_hold(),
                        "underflow_at": trace.underflow_at,
                        "overflow_at": trace.overflow_at,
                        "rows": rows,
                    }),
                )?,
            }
        }
        Command::Fk { pair, steps, out } => {
            let (g, h) = read_pair(&pair)?;
            let report = fk_sequence(&g, &h, steps)?;
            let sink = Sink::open(out.out.as_deref())?;
            match out.format.unwrap_or(Format::Csv) {
                Format::Csv => write_csv(
                    sink,
                    &[
                        "k", "log_scale", "alpha", "beta", "gamma", "theta", "a_nn1", "a_n1n",
                        "unitarity_defect", "corner_nn", "corner_n1n1", "corner_gap",
                    ],
                    report.rows.iter().map(|r| {
                        let mut v = vec![r.k.to_string(), fmt_f64(r.log_scale)];
                        v.extend(r.off_blocks.map(fmt_f64));
                        v.push(fmt_f64(r.unitarity_defect));
                        v.extend(r.corner_moduli.map(fmt_f64));
                        v.push(fmt_f64(r.corner_gap));
                        v
                    }),
                )?,
                Format::Json => write_json(
                    sink,
                    &json!({
                        "degenerate": report.degenerate,
                        "converged": report.converged,
                        "distinct": report.distinct(),
                        "min_pairwise_distance": report.min_pairwise_distance,
                        "rows": report.rows.iter().map(|r| json!({
                            "k": r.k,
                            "f": r.f,
                            "log_scale": r.log_scale,
                            "off_blocks": r.off_blocks,
                            "unitarity_defect": r.unitarity_defect,
                            "corner_moduli": r.corner_moduli,
                            "corner_gap": r.corner_gap,
                        })).collect::<Vec<_>>(),
                    }),
                )?,
            }
        }
        Command::Verify { sampling, tol, sequential, out } => {
            let cfg = VerifyConfig {
                n: sampling.n as usize,
                seed: sampling.seed,
                count: sampling.count as usize,
                max_word_length: sampling.word_length as usize,
                tol,
                sampler: SamplerConfig::default(),
            };
            let strategy = if sequential { Strategy::Sequential } else { Strategy::Parallel };
            let report = batch::verify(&cfg, strategy);
            let sink = Sink::open(out.out.as_deref())?;
            match out.format.unwrap_or(Format::Json) {
                Format::Json => write_json(sink, &report)?,
                Format::Csv => {
                    let mut header = vec!["index".to_owned(), "word_length".to_owned(), "admitted".to_owned()];
                    header.push("membership".to_owned());
                    header.extend((1..IDENTITY_COUNT).map(|i| format!("identity_{i:02}")));
                    header.extend((1..=SLACK_COUNT).map(|i| format!("slack_{i}")));
                    header.extend(["entry_error_1".to_owned(), "entry_error_2".to_owned()]);
                    let header: Vec<&str> = header.iter().map(String::as_str).collect();
                    write_csv(
                        sink,
                        &header,
                        report.rows.iter().map(|r| {
                            let mut v = vec![r.index.to_string(), r.word_length.to_string(), r.admitted.to_string()];
                            v.extend(r.identities.map(fmt_f64));
                            v.extend(r.lemma_slacks.map(fmt_f64));
                            v.extend(r.entry_errors.map(fmt_f64));
                            v
                        }),
                    )?;
                }
            }
            eprintln!(
                "n {} seed {} count {}: max residual {}, min slack {}, max entry error {}, {} failing",
                report.n,
                report.seed,
                report.count,
                fmt_f64(report.max_identity),
                fmt_f64(report.min_slack),
                fmt_f64(report.max_entry_error),
                report.failures
            );
            if !report.passed() {
                return Err(Failure::Verification(format!(
                    "{} of {} samples exceed tolerance {}",
                    report.failures,
                    report.count,
                    fmt_f64(tol)
                )));
            }
        }
        Command::Sample { sampling, out } => {
            fs::create_dir_all(&out)?;
            let cfg = SamplerConfig::default();
            let n = sampling.n as usize;
            let wl = sampling.word_length as usize;
            let elements = batch::run(sampling.count as usize, Strategy::Parallel, |i| {
                batch::sample(n, sampling.seed, i, wl, &cfg)
            });
            for (i, g) in elements.into_iter().enumerate() {
                let g = g?;
                write_json(Sink::open(Some(&out.join(format!("element_{i:04}.json"))))?, &g)?;
            }
        }
    }
    Ok(())
}

const IDENTITY_COUNT: usize = IDENTITY_LABELS.len();
const SLACK_COUNT: usize = LEMMA_LABELS.len();

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}
