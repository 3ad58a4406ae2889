use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sparseq::experiments::{self, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "sparseq", version, about = "Sparse FIR equalizer design experiments, written as CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean worst-case coherence of each dictionary versus SNR.
    CoherenceVsSnr(Opts),
    /// Closed-form coherence bound against the empirical maximum, per channel memory.
    CoherenceBound(Opts),
    /// Active-tap percentage versus allowed performance loss.
    TapsVsLoss(Opts),
    /// Symbol error rate of dense, sparse and significant-taps equalizers.
    Ser(Opts),
}

#[derive(Args)]
struct Opts {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    nf: Option<String>,
    /// Decision delay, or `auto`.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Comma-separated dB values.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long)]
    eta_max_db: Option<String>,
    /// Comma-separated dictionary kinds, e.g. EIG_DU,CHOL_LH.
    #[arg(long)]
    kinds: Option<String>,
    #[arg(long)]
    sparsity: Option<String>,
    /// Channel memories for coherence-bound.
    #[arg(long)]
    v_grid: Option<String>,
    /// Symbols per channel realization.
    #[arg(long)]
    symbols: Option<String>,
    /// QAM16 or QPSK.
    #[arg(long)]
    constellation: Option<String>,
    /// Use 500 trials.
    #[arg(long)]
    quick: bool,
    /// Circulant (FFT) eigendecomposition instead of the exact one.
    #[arg(long)]
    circulant: bool,
    /// Re-solve significant-taps coefficients on their support.
    #[arg(long)]
    refit: bool,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// Per-trial SER table path (ser only).
    #[arg(long)]
    per_channel: Option<String>,
}

impl Opts {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut kv: Vec<(&'static str, String)> = [
            ("v", &self.v),
            ("nf", &self.nf),
            ("delta", &self.delta),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("snr-db", &self.snr_db),
            ("eta-max-db", &self.eta_max_db),
            ("kinds", &self.kinds),
            ("sparsity", &self.sparsity),
            ("v-grid", &self.v_grid),
            ("symbols", &self.symbols),
            ("constellation", &self.constellation),
            ("out", &self.out),
            ("per-channel", &self.per_channel),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect();
        for (k, on) in [("quick", self.quick), ("circulant", self.circulant), ("refit", self.refit)] {
            if on {
                kv.push((k, "true".into()));
            }
        }
        kv
    }
}

fn resolve(experiment: Experiment, opts: &Opts) -> sparseq::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(experiment);
    if let Some(path) = &opts.config {
        cfg.apply_file_text(&fs::read_to_string(path)?)?;
    }
    for (k, v) in opts.pairs() {
        cfg.set(k, &v)?;
    }
    Ok(cfg)
}

fn execute(experiment: Experiment, opts: &Opts) -> sparseq::Result<()> {
    let cfg = resolve(experiment, opts)?;
    log::info!("{}", cfg.header().trim_end());
    let out = experiments::run(&cfg)?;
    match &cfg.out {
        Some(path) => fs::write(path, &out.csv)?,
        None => print!("{}", out.csv),
    }
    if let (Some(path), Some(per)) = (&cfg.per_channel, &out.per_channel) {
        fs::write(path, per)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (experiment, opts) = match &cli.command {
        Command::CoherenceVsSnr(o) => (Experiment::CoherenceVsSnr, o),
        Command::CoherenceBound(o) => (Experiment::CoherenceBound, o),
        Command::TapsVsLoss(o) => (Experiment::TapsVsLoss, o),
        Command::Ser(o) => (Experiment::Ser, o),
    };
    match execute(experiment, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sparseq {experiment}: {e}");
            ExitCode::from(2)
        }
    }
}
