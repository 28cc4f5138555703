use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slotbragg::pipeline::*;
use slotbragg::qed::{Method, SearchBounds, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "slotbragg", version, about = "Photon indistinguishability and slot-Bragg cavity design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON). Defaults apply when omitted.
    #[arg(long)]
    config: Option<String>,
    /// Worker threads; falls back to SLOTBRAGG_JOBS, then the core count.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, PipelineError> {
        match &self.config {
            Some(path) => RunConfig::load(path),
            None => Ok(RunConfig::default()),
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: slotbragg::qed::QedError| e.to_string())
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got '{s}'"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    Ok((num(a)?, num(b)?))
}

#[derive(Subcommand)]
enum Command {
    /// I for one rate set (rates in units of γ).
    Indist {
        #[arg(long)]
        g: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        gstar: f64,
        #[arg(long, default_value = "eigen", value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// I over a log (g, κ) grid, with the region above a threshold.
    Map {
        #[arg(long)]
        gstar: f64,
        #[arg(long, default_value = "100:1e7", value_parser = parse_range)]
        g_range: (f64, f64),
        #[arg(long, default_value = "100:1e8", value_parser = parse_range)]
        kappa_range: (f64, f64),
        #[arg(long, default_value_t = 60)]
        n: usize,
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
        #[arg(long, default_value = "eigen", value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Smallest g reaching a target I, with κ optimised at each g.
    Threshold {
        #[arg(long)]
        gstar: f64,
        #[arg(long, default_value_t = 0.9)]
        target: f64,
        #[arg(long, default_value = "1:1e7", value_parser = parse_range)]
        g_range: (f64, f64),
        #[arg(long, default_value = "1:1e8", value_parser = parse_range)]
        kappa_range: (f64, f64),
        #[arg(long, default_value = "eigen", value_parser = parse_method)]
        method: Method,
    },
    /// Physics dataset of random corrugation vectors.
    DatasetGen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Fit the surrogate to a dataset.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        history: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Surrogate error on a dataset.
    SurrogateEval {
        #[arg(long)]
        model: String,
        #[arg(long)]
        dataset: String,
    },
    /// GA on the surrogate, then physics verification of the best designs.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        report: Option<String>,
        #[arg(long)]
        history: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Physics evaluation of the template with the given widths.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated corrugation widths in nm.
        #[arg(long, value_delimiter = ',', required = true)]
        widths: Vec<f64>,
    },
    /// Vary one geometry field over a range.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 9)]
        steps: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Physics evaluation of the configured geometry.
    CavityEval {
        #[command(flatten)]
        common: Common,
    },
    /// Fitted index model for the configured calibration targets.
    Calibrate {
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<Output, PipelineError> {
    match cli.command {
        Command::Indist { g, kappa, gstar, method, tol } => {
            cmd_indist(&IndistArgs { g, kappa, gammastar: gstar, method, tol })
        }
        Command::Map { gstar, g_range, kappa_range, n, threshold, method, tol, out, jobs } => {
            let args = MapArgs { gammastar: gstar, g_range, kappa_range, n, threshold, method, tol };
            cmd_map(&args, out.as_deref(), resolve_jobs(jobs)?)
        }
        Command::Threshold { gstar, target, g_range, kappa_range, method } => cmd_threshold(&ThresholdArgs {
            gammastar: gstar,
            target,
            bounds: SearchBounds { g: g_range, kappa: kappa_range },
            method,
        }),
        Command::DatasetGen { common, n, seed, out } => {
            cmd_dataset_gen(&common.load()?, &DatasetOpts { n, seed, jobs: common.jobs, out })
        }
        Command::Train { common, dataset, model, history, seed } => {
            let mut cfg = common.load()?;
            cfg.jobs = common.jobs.or(cfg.jobs);
            cmd_train(&cfg, &TrainOpts { dataset, model_out: model, history_out: history, seed })
        }
        Command::SurrogateEval { model, dataset } => cmd_surrogate_eval(&model, &dataset),
        Command::Optimize { common, model, report, history, seed } => cmd_optimize(
            &common.load()?,
            &OptimizeOpts { model, report_out: report, history_out: history, seed, jobs: common.jobs },
        ),
        Command::Verify { common, widths } => cmd_verify(&common.load()?, &widths),
        Command::Sweep { common, param, from, to, steps, out } => {
            cmd_sweep(&common.load()?, &SweepArgs { param, from, to, steps }, out.as_deref(), common.jobs)
        }
        Command::CavityEval { common } => cmd_cavity_eval(&common.load()?),
        Command::Calibrate { common } => cmd_calibrate(&common.load()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", out.text);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
