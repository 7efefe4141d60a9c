use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hems_core::agent::{Checkpoint, EpisodeLog, TrainError};
use hems_core::config::RunConfig;
use hems_core::data::{synthesize, ExogenousSeries};
use hems_core::experiment::{evaluate, train_run, EvalRun, ExperimentError, PolicyKind};
use hems_core::report::{compare, load_trajectory, save_curve, save_rows, Summary};

mod plots;

#[derive(Parser, Debug)]
#[command(name = "hems", version, about = "Household energy management: simulate, train and compare controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train the constrained agent and write a checkpoint and learning curve.
    Train(TrainArgs),
    /// Roll out one policy over the evaluation span.
    Evaluate(EvaluateArgs),
    /// Tabulate several runs side by side.
    Compare(CompareArgs),
    /// Write a synthetic price/PV/temperature series to CSV.
    SynthData(SynthArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML run configuration; defaults to the desk-scale settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hourly CSV with timestamp, buying price, PV and outdoor temperature.
    #[arg(long, conflicts_with = "synthetic_days")]
    data: Option<PathBuf>,
    /// Generate this many synthetic days instead of reading a CSV.
    #[arg(long)]
    synthetic_days: Option<usize>,
    /// Seed of the synthetic series.
    #[arg(long)]
    seed: Option<u64>,
    /// First day of the evaluation span.
    #[arg(long)]
    eval_start_day: Option<usize>,
    /// Length of the evaluation span in days.
    #[arg(long)]
    eval_days: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    episodes: Option<usize>,
    /// Days at the start of the series used for training.
    #[arg(long)]
    train_days: Option<usize>,
    /// Seed of network initialization, exploration and replay sampling.
    #[arg(long)]
    train_seed: Option<u64>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_policy)]
    policy: PolicyKind,
    /// Agent checkpoint, required for `--policy agent`.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Worker threads across evaluation seeds.
    #[arg(long, default_value_t = 1)]
    parallel_eval: usize,
    /// Number of EV itinerary seeds to evaluate.
    #[arg(long)]
    behavior_seeds: Option<usize>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Existing trajectories as LABEL=PATH; when omitted the baselines (and
    /// the agent, given a checkpoint) are evaluated first.
    #[arg(long = "run", value_parser = parse_run)]
    runs: Vec<(String, PathBuf)>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    parallel_eval: usize,
    /// Also render temperature, SoC and power plots as SVG.
    #[arg(long)]
    plots: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 74)]
    synthetic_days: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_policy(s: &str) -> Result<PolicyKind, String> {
    s.parse()
}

fn parse_run(s: &str) -> Result<(String, PathBuf), String> {
    let (label, path) = s.split_once('=').ok_or_else(|| format!("expected LABEL=PATH, got `{s}`"))?;
    if label.is_empty() {
        return Err("empty run label".into());
    }
    Ok((label.to_string(), PathBuf::from(path)))
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::desk_scale(),
    };
    if let Some(path) = &common.data {
        cfg.data.csv = Some(path.clone());
    }
    if let Some(days) = common.synthetic_days {
        cfg.data.csv = None;
        cfg.data.synthetic_days = days;
    }
    if let Some(seed) = common.seed {
        cfg.data.seed = seed;
    }
    if let Some(d) = common.eval_start_day {
        cfg.eval.start_day = d;
    }
    if let Some(d) = common.eval_days {
        cfg.eval.days = d;
    }
    Ok(cfg)
}

fn prepare(cfg: &RunConfig, out: &Path) -> Result<ExogenousSeries> {
    cfg.validate()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    Ok(cfg.data.load()?)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut cfg = load_config(&args.common)?;
    if let Some(e) = args.episodes {
        cfg.train.episodes = e;
    }
    if let Some(d) = args.train_days {
        cfg.train.train_days = d;
        cfg.train.eval_start_day = d.saturating_sub(cfg.train.eval_days);
    }
    if let Some(s) = args.train_seed {
        cfg.train.seed = s;
    }
    let out = &args.common.out;
    let series = prepare(&cfg, out)?;
    fs::write(out.join("config.toml"), cfg.to_toml()?)?;

    let mut logs: Vec<EpisodeLog> = Vec::new();
    let result = train_run(&cfg, &series, |l| {
        log::info!("episode {} reward {:.3} cost {:.3} lambda {:.4}", l.episode, l.reward, l.cost, l.lambda);
        logs.push(*l);
    });
    save_rows(out.join("episodes.csv"), &logs)?;
    let outcome = match result {
        Ok(o) => o,
        Err(ExperimentError::Train(e @ TrainError::NonFinite { .. })) => {
            let dump = out.join("diagnostic.json");
            if let TrainError::NonFinite { episode, step, stats } = &e {
                let body = serde_json::json!({ "episode": episode, "step": step, "stats": stats, "episodes": logs });
                fs::write(&dump, serde_json::to_string_pretty(&body)?)?;
            }
            bail!("{e}; diagnostics written to {}", dump.display());
        }
        Err(e) => return Err(e.into()),
    };
    save_curve(out.join("learning_curve.csv"), &outcome.curve)?;
    Checkpoint::new(outcome.agent).save(out.join("checkpoint.json"))?;
    println!("trained {} episodes; outputs in {}", cfg.train.episodes, out.display());
    Ok(())
}

fn trajectory_name(policy: &str, runs: usize, seed: u64) -> String {
    if runs == 1 {
        format!("trajectory_{policy}.csv")
    } else {
        format!("trajectory_{policy}_seed{seed}.csv")
    }
}

fn write_eval(out: &Path, policy: PolicyKind, runs: &[EvalRun]) -> Result<Vec<Summary>> {
    let mut summaries = Vec::with_capacity(runs.len());
    for run in runs {
        save_rows(out.join(trajectory_name(&policy.to_string(), runs.len(), run.behavior_seed)), &run.records)?;
        let mut s = run.summary.clone();
        if runs.len() > 1 {
            s.label = format!("{policy}/seed{}", run.behavior_seed);
        }
        summaries.push(s);
    }
    save_rows(out.join(format!("summary_{policy}.csv")), &summaries)?;
    Ok(summaries)
}

fn load_agent(path: Option<&PathBuf>, policy: PolicyKind) -> Result<Option<hems_core::agent::LagrangianSac>> {
    match (policy, path) {
        (PolicyKind::Agent, None) => bail!("--policy agent requires --checkpoint"),
        (PolicyKind::Agent, Some(p)) => {
            Ok(Some(Checkpoint::load(p).with_context(|| format!("loading {}", p.display()))?.agent))
        }
        _ => Ok(None),
    }
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let mut cfg = load_config(&args.common)?;
    if let Some(n) = args.behavior_seeds {
        cfg.eval.behavior_seeds = n;
    }
    let out = &args.common.out;
    let series = prepare(&cfg, out)?;
    let agent = load_agent(args.checkpoint.as_ref(), args.policy)?;
    let runs = evaluate(&cfg, &series, args.policy, agent.as_ref(), args.parallel_eval)?;
    for s in write_eval(out, args.policy, &runs)? {
        println!(
            "{}: total {:.2} EUR (grid {:.2}, degradation {:.2}), comfort violations {} h, departures satisfied {:.1}%",
            s.label,
            s.total_eur,
            s.grid_eur,
            s.degradation_eur,
            s.comfort_violation_hours,
            100.0 * s.departure_satisfaction
        );
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let out = &args.common.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut labelled: Vec<(String, PathBuf)> = args.runs.clone();
    if labelled.is_empty() {
        let series = prepare(&cfg, out)?;
        let mut policies = vec![PolicyKind::Rule1, PolicyKind::Rule2];
        if args.checkpoint.is_some() {
            policies.push(PolicyKind::Agent);
        }
        let mut single = cfg.clone();
        single.eval.behavior_seeds = 1;
        for p in policies {
            let agent = load_agent(args.checkpoint.as_ref(), p)?;
            let runs = evaluate(&single, &series, p, agent.as_ref(), args.parallel_eval)?;
            write_eval(out, p, &runs)?;
            labelled.push((p.to_string(), out.join(trajectory_name(&p.to_string(), 1, 0))));
        }
    }
    if labelled.len() < 2 {
        bail!("compare needs at least two runs");
    }
    let mut summaries = Vec::new();
    let mut trajectories = Vec::new();
    for (label, path) in &labelled {
        let records = load_trajectory(path)?;
        summaries.push(Summary::from_records(label, &records, cfg.eval.departure_threshold));
        trajectories.push((label.clone(), records));
    }
    let rows = compare(&summaries)?;
    save_rows(out.join("comparison.csv"), &rows)?;
    for r in &rows {
        println!(
            "{:>8}  total {:>9.2}  grid {:>8.2}  degradation {:>8.2}  comfort {:>4} h  vs {}: {:>6.2}%",
            r.label,
            r.total_eur,
            r.grid_eur,
            r.degradation_eur,
            r.comfort_violation_hours,
            rows[0].label,
            100.0 * r.improvement_vs_first
        );
    }
    if args.plots {
        plots::render_all(out, &trajectories, &cfg.env.comfort)?;
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let series = synthesize(args.synthetic_days, args.seed)?;
    let path = args.out.join("data.csv");
    series.save_csv(&path)?;
    println!("wrote {} hours to {}", series.len(), path.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::SynthData(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
