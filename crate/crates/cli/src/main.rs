use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cadseq::dataset::{
    build_dataset, render_model, BuildOptions, CaptionClient, DatasetMode, HttpCaptionClient,
    MockCaptioner, PipelineConfig, ENDPOINT_VAR,
};
use cadseq::geometry::{build_mesh, export_mesh, prepare_for_tokenization, MeshFormat};
use cadseq::metrics::{evaluate_corpus, EvalConfig, Prediction, DEFAULT_ETA};
use cadseq::sequence::{
    parse_model, parse_model_lenient, serialize_model, validate_model, CadModel,
};
use cadseq::tokenizer::{decode_str, encode_model, vocabulary};

/// Sketch-extrude CAD sequences: validation, spatial tokenization, reconstruction,
/// rendering, dataset building and evaluation.
#[derive(Parser)]
#[command(name = "cadseq", version)]
struct Cli {
    /// More log output on stderr (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and list every violation.
    Validate { model: PathBuf },
    /// Encode a model as a token stream.
    Tokenize {
        model: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Encode as is instead of normalizing into the unit cube first.
        #[arg(long)]
        raw: bool,
    },
    /// Decode a token stream back to model JSON.
    Detokenize {
        tokens: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Mesh a model and export it.
    Reconstruct {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "obj")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render the fixed-view PNG of a model.
    Render {
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Pipeline config file (TOML) with a [render] table.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Build training records from a directory of model files.
    Dataset {
        #[command(subcommand)]
        action: DatasetCommand,
    },
    /// Score predictions against ground truth, paired by file stem.
    Eval {
        pred_dir: PathBuf,
        gt_dir: PathBuf,
        /// Per-model CSV report (stdout if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// JSON summary path (printed to stdout if omitted).
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        n_points: usize,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: u32,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the spatial-token vocabulary as TSV.
    Vocab {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DatasetCommand {
    Build {
        dir: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Output directory (default: <dir>/build).
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        captioner: Captioner,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Obj,
    Stl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Image,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Captioner {
    /// HTTP client if the endpoint variable is set, otherwise the mock.
    Auto,
    Mock,
    Http,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_model(path: &Path) -> Result<CadModel> {
    parse_model(&read_text(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, data: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, data).map_err(|e| internal(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(data)
                .and_then(|_| out.flush())
                .map_err(internal)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p).map_err(input),
        None => Ok(PipelineConfig::default()),
    }
}

fn validate(path: &Path) -> Result<()> {
    let text = read_text(path)?;
    let m = parse_model_lenient(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let report = validate_model(&m);
    if report.is_valid() {
        println!("valid");
        return Ok(());
    }
    for v in &report.violations {
        eprintln!("{}: {v}", path.display());
    }
    Err(input(format!("{} violation(s)", report.violations.len())))
}

fn tokenize(path: &Path, output: Option<&Path>, raw: bool) -> Result<()> {
    let m = read_model(path)?;
    let m = if raw {
        m
    } else {
        prepare_for_tokenization(&m).map_err(input)?
    };
    let t = encode_model(&m).map_err(input)?;
    write_out(output, format!("{t}\n").as_bytes())
}

fn detokenize(path: &Path, output: Option<&Path>) -> Result<()> {
    let m = decode_str(&read_text(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    write_out(output, serialize_model(&m).as_bytes())
}

fn reconstruct(path: &Path, format: Format, output: Option<&Path>) -> Result<()> {
    let mesh = build_mesh(&read_model(path)?).map_err(input)?;
    let format = match format {
        Format::Obj => MeshFormat::Obj,
        Format::Stl => MeshFormat::Stl,
    };
    write_out(output, &export_mesh(&mesh, format))
}

fn render(path: &Path, output: &Path, config: Option<&Path>) -> Result<()> {
    let cfg = load_config(config)?;
    let img = render_model(&read_model(path)?, &cfg.render).map_err(input)?;
    if img.empty_mesh {
        log::warn!("nothing to draw; wrote a background-only image");
    }
    write_out(Some(output), &img.to_png().map_err(internal)?)
}

fn dataset(action: DatasetCommand) -> Result<()> {
    let DatasetCommand::Build {
        dir,
        mode,
        output,
        seed,
        config,
        captioner,
    } = action;
    let opts = BuildOptions {
        mode: match mode {
            Mode::Image => DatasetMode::Image,
            Mode::Text => DatasetMode::Text,
        },
        seed,
        config: load_config(config.as_deref())?,
    };
    let client: Box<dyn CaptionClient> = match (captioner, HttpCaptionClient::from_env()) {
        (Captioner::Mock, _) | (Captioner::Auto, None) => Box::new(MockCaptioner),
        (_, Some(http)) => Box::new(http),
        (Captioner::Http, None) => {
            return Err(input(format!("--captioner http needs {ENDPOINT_VAR}")));
        }
    };
    if !dir.is_dir() {
        return Err(input(format!("{}: not a directory", dir.display())));
    }
    let out = output.unwrap_or_else(|| dir.join("build"));
    let s = build_dataset(&dir, &out, &opts, client.as_ref()).map_err(internal)?;
    for (id, why) in &s.rejected {
        eprintln!("rejected {id}: {why}");
    }
    for (id, why) in &s.skipped {
        eprintln!("skipped {id}: {why}");
    }
    eprintln!(
        "read {}, rejected {}, duplicates {}, skipped {}, filtered {}, uncaptioned {}, records {} -> {}",
        s.read,
        s.rejected.len(),
        s.duplicates,
        s.skipped.len(),
        s.filtered,
        s.uncaptioned,
        s.records,
        out.display()
    );
    Ok(())
}

/// Model files in a directory keyed by stem: `.json` models or `.txt` token streams.
fn list_models(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
    let mut out: Vec<(String, PathBuf)> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json" || x == "txt"))
        .map(|p| {
            (
                p.file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned(),
                p,
            )
        })
        .collect();
    out.sort();
    for w in out.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(input(format!(
                "{}: two files for id {:?}",
                dir.display(),
                w[0].0
            )));
        }
    }
    Ok(out)
}

fn load_any(path: &Path) -> std::result::Result<CadModel, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    if path.extension().is_some_and(|x| x == "txt") {
        decode_str(&text).map_err(|e| e.to_string())
    } else {
        parse_model(&text).map_err(|e| e.to_string())
    }
}

#[allow(clippy::too_many_arguments)]
fn eval(
    pred_dir: &Path,
    gt_dir: &Path,
    report: Option<&Path>,
    summary: Option<&Path>,
    cfg: EvalConfig,
) -> Result<()> {
    let gts = list_models(gt_dir)?
        .into_iter()
        .map(|(id, p)| {
            load_any(&p)
                .map(|m| (id, m))
                .map_err(|e| input(format!("{}: {e}", p.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let preds: Vec<(String, Prediction)> = list_models(pred_dir)?
        .into_iter()
        .map(|(id, p)| {
            let pred = match load_any(&p) {
                Ok(m) => Prediction::Model(m),
                Err(e) => {
                    log::info!("{}: {e}", p.display());
                    Prediction::Unparseable(e)
                }
            };
            (id, pred)
        })
        .collect();
    let r = evaluate_corpus(&preds, &gts, &cfg).map_err(|e| match e {
        cadseq::metrics::EvalError::ThreadPool(_) => internal(e),
        _ => input(e),
    })?;
    write_out(report, r.to_csv().as_bytes())?;
    let json = r.summary_json();
    match summary {
        Some(p) => write_out(Some(p), json.as_bytes())?,
        None if report.is_some() => write_out(None, json.as_bytes())?,
        None => eprint!("{json}"),
    }
    eprintln!("IR {:.2}", r.ir);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { model } => validate(&model),
        Command::Tokenize { model, output, raw } => tokenize(&model, output.as_deref(), raw),
        Command::Detokenize { tokens, output } => detokenize(&tokens, output.as_deref()),
        Command::Reconstruct {
            model,
            format,
            output,
        } => reconstruct(&model, format, output.as_deref()),
        Command::Render {
            model,
            output,
            config,
        } => render(&model, &output, config.as_deref()),
        Command::Dataset { action } => dataset(action),
        Command::Eval {
            pred_dir,
            gt_dir,
            report,
            summary,
            seed,
            n_points,
            eta,
            threads,
        } => {
            if n_points == 0 {
                return Err(input("--n-points must be positive"));
            }
            let cfg = EvalConfig {
                n_points,
                seed,
                eta,
                threads,
            };
            eval(
                &pred_dir,
                &gt_dir,
                report.as_deref(),
                summary.as_deref(),
                cfg,
            )
        }
        Command::Vocab { output } => write_out(output.as_deref(), vocabulary().to_tsv().as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
