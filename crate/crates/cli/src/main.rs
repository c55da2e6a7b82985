//! `gda-lab` command-line front end.
//!
//! Every command builds one JSON config (from `--config`, a `reproduce`
//! preset, or an empty object), overlays command-line flags, and hands the
//! result to the strict config parser. Exit codes: 0 success, 2 config error,
//! 3 runtime abort.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use gda_lab::config::{preset, KlCheckConfig, OptimalMgConfig, PredictConfig, SingleTrialConfig, SweepConfig};
use gda_lab::divergence::{oracle_check, IntegrationGrid};
use gda_lab::report::{write_bound_csv, write_kl_check_csv, write_sweep_csv, SweepMetadata};
use gda_lab::rng::RngKey;
use gda_lab::{
    optimal_mg, parse_config, predict_sweep, run_sweep, run_trial, BgmmBound, BoundMode, BoundRecord, ExperimentConfig,
};

const WORKERS_ENV: &str = "GDA_LAB_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "gda-lab",
    version,
    about = "Generative data augmentation simulation lab (binary Gaussian mixture)"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON experiment config.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps [env: GDA_LAB_WORKERS].
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Master seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Trials per cell.
    #[arg(long, global = true, value_name = "N")]
    runs: Option<u64>,
    #[arg(long, global = true, value_enum)]
    loss: Option<LossArg>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Confidence parameter for high-prob bounds.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Debug: cap rule inside the bGMM bound.
    #[arg(long, global = true, value_enum)]
    cap: Option<CapArg>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum LossArg {
    Nll,
    ZeroOne,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    HighProb,
    Predict,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum CapArg {
    Max,
    Min,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Figure {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Fig1e,
    Fig1f,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long = "m-s", value_delimiter = ',')]
    m_s: Vec<u64>,
    /// Augmentation ratios such as `0,1,5/2,0.5`.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo measurement of the generalization gap over a grid.
    Sweep(GridArgs),
    /// Predicted bGMM bound over a grid.
    Predict(GridArgs),
    /// Grid search for the augmentation ratio minimizing the bound.
    OptimalMg(GridArgs),
    /// Closed-form KL against 1-D numeric integration on random draws.
    KlCheck {
        #[arg(long)]
        draws: Option<usize>,
    },
    /// One trial, printed as JSON.
    SingleTrial {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "m-s")]
        m_s: Option<u64>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        trial_index: Option<u64>,
    },
    /// Preset grid for one figure panel.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure::Config(anyhow::anyhow!(msg.into()))
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Sweep(_) => "sweep",
        Command::Predict(_) => "predict",
        Command::OptimalMg(_) => "optimal-mg",
        Command::KlCheck { .. } => "kl-check",
        Command::SingleTrial { .. } => "single-trial",
        Command::Reproduce { .. } => "reproduce",
    }
}

fn accepted_keys(command: &str) -> &'static [&'static str] {
    match command {
        "sweep" => &[
            "d",
            "m_S",
            "gamma",
            "runs",
            "master_seed",
            "sigma",
            "n_test",
            "loss",
            "workers",
            "out",
        ],
        "predict" | "optimal-mg" => &["d", "m_S", "gamma", "delta", "mode", "cap", "out"],
        "kl-check" => &["draws", "master_seed", "nodes", "out"],
        "single-trial" => &[
            "d",
            "m_S",
            "gamma",
            "sigma",
            "n_test",
            "loss",
            "master_seed",
            "trial_index",
        ],
        _ => &[],
    }
}

fn base_object(cli: &Cli) -> Result<Map<String, Value>, Failure> {
    let value = match (&cli.command, &cli.global.config) {
        (Command::Reproduce { .. }, Some(_)) => {
            return Err(Failure::config("--config cannot be combined with `reproduce`"));
        }
        (Command::Reproduce { figure }, None) => {
            let name = figure
                .to_possible_value()
                .expect("figure has a name")
                .get_name()
                .to_string();
            let cfg = preset(&name).expect("every figure has a preset");
            serde_json::to_value(&cfg).expect("config serialization is infallible")
        }
        (cmd, Some(path)) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))
                .map_err(Failure::Config)?;
            let value: Value = serde_json::from_str(&text)
                .with_context(|| format!("malformed JSON in {}", path.display()))
                .map_err(Failure::Config)?;
            let found = value.get("command").and_then(Value::as_str).unwrap_or("");
            if found != command_name(cmd) {
                return Err(Failure::config(format!(
                    "config {} is for command `{found}`, not `{}`",
                    path.display(),
                    command_name(cmd)
                )));
            }
            value
        }
        (cmd, None) => json!({ "command": command_name(cmd) }),
    };
    match value {
        Value::Object(obj) => Ok(obj),
        _ => Err(Failure::config("config must be a JSON object")),
    }
}

/// Flag overrides as `(config key, flag name, value)`.
fn overrides(cli: &Cli) -> Vec<(&'static str, &'static str, Value)> {
    let g = &cli.global;
    let mut out = Vec::new();
    let mut push = |key, flag, v: Option<Value>| {
        if let Some(v) = v {
            out.push((key, flag, v));
        }
    };
    push("workers", "--workers", g.workers.map(Value::from));
    push("master_seed", "--seed", g.seed.map(Value::from));
    push("runs", "--runs", g.runs.map(Value::from));
    push(
        "loss",
        "--loss",
        g.loss.map(|l| Value::from(l.to_possible_value().unwrap().get_name())),
    );
    push(
        "mode",
        "--mode",
        g.mode.map(|m| Value::from(m.to_possible_value().unwrap().get_name())),
    );
    push("delta", "--delta", g.delta.map(Value::from));
    push(
        "cap",
        "--cap",
        g.cap.map(|c| Value::from(c.to_possible_value().unwrap().get_name())),
    );
    match &cli.command {
        Command::Sweep(grid) | Command::Predict(grid) | Command::OptimalMg(grid) => {
            push("d", "--d", (!grid.d.is_empty()).then(|| json!(grid.d)));
            push("m_S", "--m-s", (!grid.m_s.is_empty()).then(|| json!(grid.m_s)));
            push("gamma", "--gamma", (!grid.gamma.is_empty()).then(|| json!(grid.gamma)));
        }
        Command::KlCheck { draws } => push("draws", "--draws", draws.map(Value::from)),
        Command::SingleTrial {
            d,
            m_s,
            gamma,
            trial_index,
        } => {
            push("d", "--d", d.map(Value::from));
            push("m_S", "--m-s", m_s.map(Value::from));
            push("gamma", "--gamma", gamma.clone().map(Value::from));
            push("trial_index", "--trial-index", trial_index.map(Value::from));
        }
        Command::Reproduce { .. } => {}
    }
    out
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut obj = base_object(cli)?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    let keys = accepted_keys(&command);
    for (key, flag, value) in overrides(cli) {
        if !keys.contains(&key) {
            return Err(Failure::config(format!("{flag} does not apply to `{command}`")));
        }
        obj.insert(key.to_string(), value);
    }
    if keys.contains(&"out") {
        if let Some(out) = &cli.global.out {
            obj.insert("out".into(), json!(out));
        }
    }
    if keys.contains(&"workers") && matches!(obj.get("workers"), None | Some(Value::Null)) {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Failure::config(format!("{WORKERS_ENV}={v} is not a worker count")))?;
            obj.insert("workers".into(), Value::from(n));
        }
    }
    parse_config(&Value::Object(obj).to_string()).map_err(|e| Failure::Config(e.into()))
}

fn with_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let mut f =
                io::BufWriter::new(fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?);
            write(&mut f).with_context(|| format!("cannot write {}", p.display()))?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn run_sweep_cmd(cfg: &SweepConfig) -> anyhow::Result<()> {
    let settings = cfg.settings();
    let result = run_sweep(&cfg.grid(), &settings)?;
    with_output(cfg.out.as_deref(), |w| write_sweep_csv(w, &result.records))?;
    if let Some(out) = &cfg.out {
        let meta = meta_path(out);
        fs::write(&meta, SweepMetadata::new(&settings, &result).to_json() + "\n")
            .with_context(|| format!("cannot write {}", meta.display()))?;
    }
    Ok(())
}

fn run_predict_cmd(cfg: &PredictConfig) -> anyhow::Result<()> {
    let bound = BgmmBound::new(cfg.mode).with_cap(cfg.cap);
    let rows = predict_sweep(&cfg.grid(), cfg.delta, &bound)?;
    with_output(cfg.out.as_deref(), |w| write_bound_csv(w, &rows))
}

fn run_optimal_cmd(cfg: &OptimalMgConfig) -> anyhow::Result<()> {
    let bound = BgmmBound::new(cfg.mode).with_cap(cfg.cap);
    let mut rows = Vec::new();
    for &d in &cfg.d {
        for &m_s in &cfg.m_s {
            let best = optimal_mg(&bound, d, m_s, cfg.delta, &cfg.gamma)?;
            rows.push(BoundRecord {
                d,
                m_s,
                gamma: best.gamma,
                m_g: best.m_g,
                breakdown: best.bound,
                mode: cfg.mode,
                delta: (cfg.mode == BoundMode::HighProb).then_some(cfg.delta),
            });
        }
    }
    with_output(cfg.out.as_deref(), |w| write_bound_csv(w, &rows))
}

fn run_kl_check_cmd(cfg: &KlCheckConfig) -> Result<(), Failure> {
    let grid = IntegrationGrid::new(cfg.nodes).map_err(|e| Failure::Config(e.into()))?;
    let rows =
        oracle_check(cfg.draws, RngKey::new(cfg.master_seed, 0), &grid).map_err(|e| Failure::Runtime(e.into()))?;
    with_output(cfg.out.as_deref(), |w| write_kl_check_csv(w, &rows)).map_err(Failure::Runtime)?;
    let failed = rows.iter().filter(|r| !r.passes()).count();
    if failed > 0 {
        return Err(Failure::Runtime(anyhow::anyhow!(
            "{failed} of {} oracle draws failed",
            rows.len()
        )));
    }
    eprintln!("kl-check: all {} draws agree", rows.len());
    Ok(())
}

fn run_single_trial_cmd(cfg: &SingleTrialConfig, out: Option<&Path>) -> anyhow::Result<()> {
    let trial = cfg.trial();
    let outcome = run_trial(&trial)?;
    let report = json!({
        "config": trial,
        "trial_seed": trial.trial_seed(),
        "outcome": outcome,
    });
    let text = serde_json::to_string_pretty(&report)? + "\n";
    with_output(out, |w| w.write_all(text.as_bytes()))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = build_config(cli)?;
    let runtime = |r: anyhow::Result<()>| r.map_err(Failure::Runtime);
    match &cfg {
        ExperimentConfig::Sweep(c) => runtime(run_sweep_cmd(c)),
        ExperimentConfig::Predict(c) => runtime(run_predict_cmd(c)),
        ExperimentConfig::OptimalMg(c) => runtime(run_optimal_cmd(c)),
        ExperimentConfig::KlCheck(c) => run_kl_check_cmd(c),
        ExperimentConfig::SingleTrial(c) => runtime(run_single_trial_cmd(c, cli.global.out.as_deref())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
