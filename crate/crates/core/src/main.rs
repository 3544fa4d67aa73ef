use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sos_auction::harness::{
    self, checks, default_grid, exit_code, load_instances, reduce_pipeline, run_experiment, sweep, CampaignSpec,
    CheckOutcome, ExperimentConfig, InstanceSource, ModeChoice, QChoice,
};
use sos_auction::mechanisms::{optimal_params, Mechanism, DEFAULT_MONTE_CARLO_SAMPLES};
use sos_auction::valuation::{generate_instance, AuctionInstance, GeneratorFamily, GeneratorParams, Limits};
use sos_auction::{Error, Result};

#[derive(Parser)]
#[command(name = "sos-auction", version, about = "Truthful auctions for SOS interdependent valuations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism on instances and check its welfare bound and incentives.
    Run(RunArgs),
    /// Run property and inequality checkers on one instance file.
    Verify(VerifyArgs),
    /// Sweep the sampling bias of the mixture and compare to the analytic curve.
    Sweep(SweepArgs),
    /// Lift an instance to strong-SOS, run a mechanism there and map it back.
    Reduce(ReduceArgs),
    /// Write a generated instance file.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Instance files (JSON).
    #[arg(long = "instance", value_name = "FILE")]
    instances: Vec<PathBuf>,
    /// Generator family for a random campaign.
    #[arg(long, value_name = "FAMILY", conflicts_with = "instances")]
    generator: Option<String>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Agent count, or a range such as `2..4`.
    #[arg(long, default_value = "3")]
    agents: String,
    /// Signal levels per agent, or a range such as `2..4`.
    #[arg(long, default_value = "3")]
    signals: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    MonteCarlo,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "mixture")]
    mechanism: String,
    #[arg(long)]
    p: Option<f64>,
    /// Mixing weight, or `optimal`.
    #[arg(long, alias = "params", default_value = "optimal")]
    q: String,
    #[arg(long)]
    epsilon: Option<f64>,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_MONTE_CARLO_SAMPLES)]
    samples: usize,
    #[arg(long)]
    no_sos: bool,
    #[arg(long)]
    no_ic: bool,
    /// Also run the inequality suite on every instance.
    #[arg(long)]
    lemmas: bool,
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    #[arg(long)]
    all: bool,
    #[arg(long)]
    monotone: bool,
    #[arg(long)]
    sos: bool,
    #[arg(long)]
    strong_sos: bool,
    #[arg(long)]
    deviation: bool,
    #[arg(long)]
    amortized: bool,
    #[arg(long)]
    sampling_bound: bool,
    /// Incentive checks of the three mechanisms.
    #[arg(long)]
    ic: bool,
    /// Sampling probabilities for the expectation bound.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated sampling probabilities.
    #[arg(long, alias = "p-grid", value_delimiter = ',')]
    grid: Vec<f64>,
    /// `optimal` balances q against p; a number fixes it.
    #[arg(long, default_value = "optimal")]
    q: String,
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    instance: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value = "mixture")]
    mechanism: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value = "optimal")]
    q: String,
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 2)]
    agents: usize,
    #[arg(long, default_value_t = 3)]
    signals: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn parse_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("expected a count or a range like 2..4, got `{text}`"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match text.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => {
            let v = parse(text)?;
            Ok((v, v))
        }
    }
}

fn source(args: &SourceArgs) -> Result<InstanceSource> {
    match &args.generator {
        Some(family) => {
            let families = if family == "all" {
                GeneratorFamily::ALL.to_vec()
            } else {
                vec![family.parse()?]
            };
            let (a0, a1) = parse_range(&args.agents)?;
            let (m0, m1) = parse_range(&args.signals)?;
            Ok(InstanceSource::Generator(
                CampaignSpec::new(families, args.count, args.seed)
                    .with_agents(a0, a1)
                    .with_signals(m0, m1),
            ))
        }
        None if args.instances.is_empty() => Err(Error::InvalidParameter(
            "pass --instance FILE or --generator FAMILY".into(),
        )),
        None => Ok(InstanceSource::Files(args.instances.clone())),
    }
}

fn mechanism(name: &str, p: Option<f64>, q: &str) -> Result<Mechanism> {
    let mut config = ExperimentConfig::new(name.parse()?, InstanceSource::Files(vec![]));
    config.p = p;
    config.q = q.parse()?;
    config.epsilon = Some(1.0);
    config.validate()?;
    config.resolved_mechanism()
}

fn print_checks(label: &str, checks: &[CheckOutcome]) {
    for c in checks {
        println!("{label}: {c}");
    }
}

fn cmd_run(args: RunArgs, limits: &Limits) -> Result<i32> {
    let mut config = ExperimentConfig::new(args.mechanism.parse()?, source(&args.source)?);
    config.p = args.p;
    config.q = args.q.parse()?;
    config.epsilon = args.epsilon;
    config.mode = match args.mode {
        ModeArg::Exact => ModeChoice::Exact,
        ModeArg::MonteCarlo => ModeChoice::MonteCarlo {
            samples: args.samples,
            seed: args.source.seed,
        },
    };
    config.verify.sos = !args.no_sos;
    config.verify.ic = !args.no_ic;
    config.verify.lemmas = args.lemmas;
    config.out_dir = args.out_dir;
    let run = run_experiment(&config, limits)?;
    for o in &run.instances {
        let s = &o.summary;
        println!(
            "{}: min ratio {} at {} ({} profiles)",
            s.label, s.min_ratio, s.min_profile, s.profiles
        );
        print_checks(&s.label, &s.checks);
    }
    let status = if run.passed() { "PASS" } else { "FAIL" };
    println!("{status} {}: {} instances, min ratio {}", run.mechanism, run.instances.len(), run.min_ratio());
    Ok(if run.passed() { harness::EXIT_PASS } else { harness::EXIT_VERIFY_FAILED })
}

fn cmd_verify(args: VerifyArgs, limits: &Limits) -> Result<i32> {
    let inst = AuctionInstance::from_json(&fs::read_to_string(&args.instance)?)?;
    let any = args.monotone || args.sos || args.strong_sos || args.deviation || args.amortized || args.sampling_bound || args.ic;
    let all = args.all || !any;
    let ps = if args.p.is_empty() {
        vec![0.25, 0.5, optimal_params().params.p]
    } else {
        args.p.clone()
    };
    let mut out = Vec::new();
    if all || args.monotone {
        out.push(checks::monotone_check(&inst, limits)?);
    }
    if all || args.sos {
        out.push(checks::sos_check(&inst, limits)?);
    }
    if all || args.strong_sos {
        out.push(checks::strong_sos_check(&inst, limits)?);
    }
    if all || args.deviation {
        out.push(checks::deviation_check(&inst, limits)?);
    }
    if all || args.amortized {
        out.push(checks::amortized_check(&inst, limits)?);
    }
    if all || args.sampling_bound {
        out.push(checks::sampling_bound_check(&inst, &ps, limits)?);
    }
    if all || args.ic {
        for m in [
            Mechanism::Contribution,
            Mechanism::Sampling { p: 0.5 },
            Mechanism::Mixture(optimal_params().params),
        ] {
            out.push(checks::incentive_check(&format!("ic-ir {m}"), &inst, &m.exact(), limits)?);
        }
    }
    // Strong-SOS is informative only; SOS instances need not satisfy it.
    let failed = out
        .iter()
        .any(|c| c.failed() && (c.name != "strong-sos" || args.strong_sos));
    for c in &out {
        println!("{c}");
    }
    if let Some(path) = args.json {
        fs::write(path, serde_json::to_string_pretty(&out)? + "\n")?;
    }
    Ok(if failed { harness::EXIT_VERIFY_FAILED } else { harness::EXIT_PASS })
}

fn cmd_sweep(args: SweepArgs, limits: &Limits) -> Result<i32> {
    let instances: Vec<AuctionInstance> = load_instances(&source(&args.source)?, limits)?
        .into_iter()
        .map(|(_, i)| i)
        .collect();
    let grid = if args.grid.is_empty() { default_grid() } else { args.grid };
    let q: QChoice = args.q.parse()?;
    let result = sweep(&instances, &grid, q, limits)?;
    let mut buf = Vec::new();
    result.write_csv(&mut buf)?;
    match args.csv {
        Some(path) => fs::write(path, &buf)?,
        None => print!("{}", String::from_utf8_lossy(&buf)),
    }
    println!("best grid p {} (optimum {})", result.best_p, result.optimal_p);
    let status = if result.holds() { "PASS" } else { "FAIL" };
    println!("{status} measured >= analytic on {} instances", instances.len());
    Ok(if result.holds() { harness::EXIT_PASS } else { harness::EXIT_VERIFY_FAILED })
}

fn cmd_reduce(args: ReduceArgs, limits: &Limits) -> Result<i32> {
    let inst = AuctionInstance::from_json(&fs::read_to_string(&args.instance)?)?;
    let mech = mechanism(&args.mechanism, args.p, &args.q)?;
    let out = reduce_pipeline(&inst, args.epsilon, mech, limits)?;
    let t = &out.transfer;
    println!(
        "c = {}, extended space {:?}, alpha {}, factor {}, induced min ratio {}",
        t.c,
        out.reduced.extended_space().sizes(),
        t.alpha,
        t.factor,
        t.induced.min_ratio
    );
    for c in &out.checks {
        println!("{c}");
    }
    if let Some(dir) = &args.out_dir {
        out.write(dir)?;
    }
    Ok(if out.passed() { harness::EXIT_PASS } else { harness::EXIT_VERIFY_FAILED })
}

fn cmd_generate(args: GenerateArgs, limits: &Limits) -> Result<i32> {
    let family: GeneratorFamily = args.family.parse()?;
    let inst = generate_instance(family, args.agents, args.signals, args.seed, &GeneratorParams::default(), limits)?;
    fs::write(&args.out, inst.to_json()? + "\n")?;
    Ok(harness::EXIT_PASS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { harness::EXIT_USAGE as u8 } else { 0 });
        }
    };
    let limits = Limits::from_env();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, &limits),
        Command::Verify(a) => cmd_verify(a, &limits),
        Command::Sweep(a) => cmd_sweep(a, &limits),
        Command::Reduce(a) => cmd_reduce(a, &limits),
        Command::Generate(a) => cmd_generate(a, &limits),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
