//! `featbench`: detect features, generate distorted images, match image
//! pairs and run the robustness benchmark from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use featbench_core::bench::{
    extract, parse_csv, rotation_sweep, run_suite, sweep_to_csv, to_csv, to_markdown, Algo, BenchError, OutputFormat,
    SuiteConfig, DEFAULT_SWEEP_ANGLES,
};
use featbench_core::distort::DistortError;
use featbench_core::imgcore::{dump_keypoints, load_pgm, save_pgm, synth, ImageError, PgmEncoding};
use featbench_core::matcher::{dump_matches, match_descriptors, match_rate};
use featbench_core::{GrayImage, Scenario};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_COMPUTE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "featbench", version, about = "SIFT / SURF / ORB robustness benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect keypoints and write them as JSON.
    Detect {
        #[arg(long)]
        algo: Algo,
        #[arg(long)]
        image: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply one distortion and write the result as PGM.
    Distort {
        /// identity, intensity, rotation, scaling, shearing, fisheye or noise.
        #[arg(long)]
        kind: String,
        /// Scenario parameter as key=value; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Seed for the noise scenario.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Match two images and write the matched pairs as JSON.
    Match {
        #[arg(long)]
        algo: Algo,
        #[arg(long)]
        image1: PathBuf,
        #[arg(long)]
        image2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run all scenario x algorithm cells.
    Bench {
        /// Input PGM; the built-in synthetic scene when omitted.
        #[arg(long)]
        image: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Match rate of every algorithm against rotated copies of the image.
    Sweep {
        #[arg(long)]
        image: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = DEFAULT_SWEEP_ANGLES)]
        angles: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a results CSV for internal consistency.
    Verify {
        #[arg(long)]
        results: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Compute(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Compute(m) => m,
        }
    }
}

impl From<ImageError> for CliError {
    fn from(e: ImageError) -> Self {
        match e {
            ImageError::Open { .. }
            | ImageError::Io(_)
            | ImageError::MalformedHeader(_)
            | ImageError::UnsupportedMaxval(_)
            | ImageError::Truncated { .. } => CliError::Io(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        if e.is_compute() {
            CliError::Compute(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}

fn distort_error(e: DistortError) -> CliError {
    match e {
        DistortError::DegenerateSize { .. } | DistortError::Image(_) => CliError::Compute(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn load(path: &Path) -> Result<GrayImage, CliError> {
    Ok(load_pgm(path)?)
}

fn load_or_synthetic(path: Option<&Path>) -> Result<GrayImage, CliError> {
    match path {
        Some(p) => load(p),
        None => Ok(synth::scene(512, 512, synth::DEFAULT_SCENE_SEED)),
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn compute<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Compute(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = SuiteConfig::default();
    match cli.command {
        Command::Detect { algo, image, out } => {
            let img = load(&image)?;
            let (kps, _) = compute(extract(&img, algo, &cfg))?;
            let json = compute(dump_keypoints(&kps))?;
            write_text(out.as_deref(), &json)?;
            eprintln!("{algo}: {} keypoints", kps.len());
        }
        Command::Distort {
            kind,
            params,
            seed,
            image,
            out,
        } => {
            let pairs = params
                .iter()
                .map(|p| {
                    p.split_once('=')
                        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
                        .ok_or_else(|| CliError::Usage(format!("parameter {p:?} is not key=value")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let scenario = Scenario::from_parts(&kind, &pairs, seed).map_err(distort_error)?;
            let img = load(&image)?;
            let distorted = scenario.apply(&img).map_err(distort_error)?;
            save_pgm(&distorted, &out, PgmEncoding::Binary)?;
            eprintln!("{scenario}: {}x{}", distorted.width(), distorted.height());
        }
        Command::Match {
            algo,
            image1,
            image2,
            out,
        } => {
            let (a, b) = (load(&image1)?, load(&image2)?);
            let (k1, d1) = compute(extract(&a, algo, &cfg))?;
            let (k2, d2) = compute(extract(&b, algo, &cfg))?;
            let matches = compute(match_descriptors(&k1, &d1, &k2, &d2, &cfg.matcher))?;
            write_text(out.as_deref(), &compute(dump_matches(&matches))?)?;
            let rate = if k1.is_empty() && k2.is_empty() {
                0.0
            } else {
                compute(match_rate(matches.len(), k1.len(), k2.len()))?
            };
            eprintln!(
                "{algo}: kpnts1={} kpnts2={} matches={} match_rate={rate:.1}%",
                k1.len(),
                k2.len(),
                matches.len()
            );
        }
        Command::Bench {
            image,
            seed,
            reps,
            format,
            out,
        } => {
            if reps == 0 {
                return Err(CliError::Usage("--reps must be at least 1".into()));
            }
            let img = load_or_synthetic(image.as_deref())?;
            let cfg = SuiteConfig {
                seed,
                repetitions: reps,
                ..cfg
            };
            let outcome = run_suite(&img, &cfg)?;
            if !outcome.results.is_empty() {
                let text = match format {
                    OutputFormat::Csv => to_csv(&outcome.results, &cfg)?,
                    OutputFormat::Markdown => to_markdown(&outcome.results, &cfg)?,
                };
                write_text(out.as_deref(), text.trim_end())?;
            }
            if !outcome.failures.is_empty() {
                let msgs: Vec<String> = outcome.failures.iter().map(|f| f.to_string()).collect();
                return Err(CliError::Compute(format!(
                    "{} cell(s) failed:\n  {}",
                    msgs.len(),
                    msgs.join("\n  ")
                )));
            }
        }
        Command::Sweep { image, angles, out } => {
            let img = load_or_synthetic(image.as_deref())?;
            let points = rotation_sweep(&img, &angles, &cfg)?;
            write_text(out.as_deref(), sweep_to_csv(&points, &cfg)?.trim_end())?;
        }
        Command::Verify { results } => {
            let text = fs::read_to_string(&results).map_err(|e| CliError::Io(format!("{}: {e}", results.display())))?;
            let rows = parse_csv(&text).map_err(|e| CliError::Io(e.to_string()))?;
            for r in &rows {
                if r.matches > r.kpnts1.min(r.kpnts2) {
                    return Err(CliError::Compute(format!(
                        "{} / {}: too many matches",
                        r.scenario, r.algo
                    )));
                }
                if r.kpnts1 + r.kpnts2 > 0 {
                    let expect = compute(match_rate(r.matches, r.kpnts1, r.kpnts2))?;
                    if (expect - r.match_rate_pct).abs() > 0.05 {
                        return Err(CliError::Compute(format!(
                            "{} / {}: match rate {} but counts give {expect:.3}",
                            r.scenario, r.algo, r.match_rate_pct
                        )));
                    }
                }
            }
            println!("{} rows consistent", rows.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
