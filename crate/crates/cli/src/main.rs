//! `qsearch`: instance generation, trial simulation, baselines, mean-field
//! trajectories, schedule tuning and experiment sweeps.
//!
//! Exit status is 0 on success, 2 for invalid input or configuration, 3 when a
//! size guard trips, and 1 for anything else (typically an unwritable output).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use qsearch_core::harness::{
    draw_sample, fit_records, read_records_csv, run_experiment, run_on_instances, write_records_csv, BoyerMode,
    DrawnInstance, ExperimentConfig, Method, SampleSpec, Sweep,
};
use qsearch_core::meanfield::{
    boundary_search_r1, integrate_s, integrate_z, write_trajectory_csv, BoundarySearchConfig, Density, FormFamily, Grid,
    SModelVariant,
};
use qsearch_core::optimizer::{run_optimization, write_trace_csv, OptimizeConfig};
use qsearch_core::sat::{emit_dimacs, parse_dimacs, InstanceMeta};
use qsearch_core::schedule::{LinearForm, ScheduleFile};
use qsearch_core::sim::{run_trial, write_histogram_csv, TrialOptions};
use qsearch_core::Error;

#[derive(Parser, Debug)]
#[command(name = "qsearch", version, about = "Structured quantum search for random k-SAT")]
struct Cli {
    /// Base seed; overrides the seed in config files when given.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file, or directory for `gen`. Standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write random instances as DIMACS files with JSON sidecars.
    Gen(GenArgs),
    /// Simulate the phased heuristic and emit records.
    Quantum(QuantumArgs),
    /// Amplitude amplification with known or unknown solution count.
    Aa(AaArgs),
    /// GSAT with restarts.
    Gsat(GsatArgs),
    /// Mean-field trajectories and the end-of-trial search.
    Meanfield {
        #[command(subcommand)]
        model: MeanfieldCommand,
    },
    /// Tune schedule coefficients from a JSON config.
    Optimize(OptimizeArgs),
    /// Run an experiment sweep from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
    /// Median costs and exponential fits from a records CSV.
    Fit {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 4.25)]
    mu: f64,
    #[arg(long)]
    count: usize,
    /// Keep drawing until each instance has a solution.
    #[arg(long)]
    soluble_only: bool,
    /// Alternate m between floor(mu n) and one more when mu n is fractional.
    #[arg(long)]
    mixed_m: bool,
}

/// Where instances come from: DIMACS files, or a fresh soluble sample.
#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["instance", "n"])))]
struct Source {
    /// DIMACS files; a `.json` sidecar next to each supplies its seed.
    #[arg(long, num_args = 1..)]
    instance: Vec<PathBuf>,
    /// Draw a soluble sample at this size instead.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 4.25)]
    mu: f64,
}

#[derive(Args, Debug)]
struct QuantumArgs {
    #[command(flatten)]
    source: Source,
    /// Schedule JSON; the paper-form linear schedule with j = n by default.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Drive the phases with the cost after this many deterministic GSAT steps.
    #[arg(long)]
    informed: Option<usize>,
    /// Estimate Psoln from sampled measurements instead of exactly.
    #[arg(long)]
    shots: Option<u64>,
    /// Per-step cost histograms of the first instance.
    #[arg(long)]
    histograms: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").required(true).args(["known_s", "boyer"])))]
struct AaArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    known_s: bool,
    #[arg(long)]
    boyer: bool,
    /// Simulate the unknown-S loop instead of using its expected cost.
    #[arg(long, requires = "boyer")]
    sampled: bool,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

#[derive(Args, Debug)]
struct GsatArgs {
    #[command(flatten)]
    source: Source,
    /// Moves per try; 2n by default.
    #[arg(long)]
    max_steps_per_try: Option<usize>,
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

#[derive(Subcommand, Debug)]
enum MeanfieldCommand {
    /// Average-amplitude ratio Z(lambda).
    Z(FormArgs),
    /// Pair model (Y, r, theta).
    S {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, value_enum, default_value_t = Variant::Consistent)]
        variant: Variant,
    },
    /// Search phase functions for the smallest r(1).
    SearchR1 {
        #[arg(long, value_enum, default_value_t = FamilyArg::Linear)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 4.25)]
        mu: f64,
        #[arg(long)]
        scan: Option<usize>,
        #[arg(long)]
        starts: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Paper,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Consistent,
    AsPrinted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Linear,
    Spiked,
}

#[derive(Args, Debug)]
struct FormArgs {
    /// Start from the tuned coefficients (also the default).
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, allow_hyphen_values = true)]
    r0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 4.25)]
    mu: f64,
    /// Integration steps on [0, 1].
    #[arg(long, default_value_t = 2000)]
    steps: usize,
}

impl FormArgs {
    fn form(&self) -> LinearForm {
        let (Some(Preset::Paper) | None) = self.preset;
        let p = LinearForm::PAPER;
        LinearForm {
            r0: self.r0.unwrap_or(p.r0),
            r1: self.r1.unwrap_or(p.r1),
            t0: self.t0.unwrap_or(p.t0),
            t1: self.t1.unwrap_or(p.t1),
        }
    }
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    config: PathBuf,
    /// Full report JSON, including held-out results.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Every evaluation as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::ResourceGuard { .. }) => 3,
            CliError::Write { .. } | CliError::Core(Error::Io(_)) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let out = cli.out.as_deref();
    let seed = cli.seed;
    match cli.command {
        Command::Gen(args) => gen(&args, seed.unwrap_or(0), out),
        Command::Quantum(args) => quantum(&args, seed, out),
        Command::Aa(args) => {
            let method = if args.known_s { Method::AaKnownS } else { Method::AaBoyer };
            let mut cfg = ExperimentConfig::new(vec![method], Sweep::One(1), 1, seed.unwrap_or(0));
            cfg.boyer = if args.sampled { BoyerMode::Sampled } else { BoyerMode::Expected };
            cfg.budget = args.budget;
            emit_records(&cfg, &args.source, out)
        }
        Command::Gsat(args) => {
            let mut cfg = ExperimentConfig::new(vec![Method::Gsat], Sweep::One(1), 1, seed.unwrap_or(0));
            cfg.gsat_max_steps_per_try = args.max_steps_per_try;
            cfg.gsat_strict = args.strict;
            cfg.budget = args.budget;
            emit_records(&cfg, &args.source, out)
        }
        Command::Meanfield { model } => meanfield(model, seed.unwrap_or(0), out),
        Command::Optimize(args) => optimize(&args, seed, out),
        Command::Experiment { config } => {
            let mut cfg = ExperimentConfig::from_json(&read(&config)?)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let records = run_experiment(&cfg)?;
            let path = out.map(Path::to_path_buf).or(cfg.output.as_ref().map(PathBuf::from));
            write_output(path.as_deref(), |w| write_records_csv(w, &records))
        }
        Command::Fit { records, level } => {
            let text = read(&records)?;
            let fits = fit_records(&read_records_csv(text.as_bytes())?, level)?;
            let json = serde_json::to_string_pretty(&fits).map_err(Error::from)?;
            write_output(out, |w| Ok(writeln!(w, "{json}")?))
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs `body` against the output file, or standard output.
fn write_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> qsearch_core::Result<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|source| CliError::Write {
                path: p.to_path_buf(),
                source,
            })?;
            let mut w = io::BufWriter::new(file);
            body(&mut w)?;
            w.flush().map_err(|source| CliError::Write {
                path: p.to_path_buf(),
                source,
            })
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            Ok(())
        }
    }
}

fn gen(args: &GenArgs, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let dir = out.unwrap_or(Path::new("."));
    let spec = SampleSpec {
        n: args.n,
        k: args.k,
        mu: args.mu,
        count: args.count,
        soluble_only: args.soluble_only,
        mixed_m: args.mixed_m,
        seed,
        partition: 0,
    };
    let drawn = draw_sample(&spec)?;
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    for d in &drawn {
        let p = d.instance.params();
        let stem = dir.join(format!("n{}_{:04}", p.n, d.slot));
        let meta = InstanceMeta {
            n: p.n,
            k: p.k,
            m: p.m,
            seed: d.seed,
            solutions: d.solutions,
        };
        let json = serde_json::to_string_pretty(&meta).map_err(Error::from)?;
        for (path, body) in [(stem.with_extension("cnf"), emit_dimacs(&d.instance)), (stem.with_extension("json"), json)] {
            fs::write(&path, body).map_err(|source| CliError::Write { path, source })?;
        }
    }
    eprintln!("wrote {} instances to {}", drawn.len(), dir.display());
    Ok(())
}

fn load_instances(src: &Source, seed: Option<u64>) -> CliResult<Vec<DrawnInstance>> {
    if let Some(n) = src.n {
        let spec = SampleSpec {
            k: src.k,
            mu: src.mu,
            ..SampleSpec::paper(n, src.count, seed.unwrap_or(0))
        };
        return Ok(draw_sample(&spec)?);
    }
    src.instance
        .iter()
        .enumerate()
        .map(|(slot, path)| {
            let instance = parse_dimacs(&read(path)?)?;
            let sidecar = path.with_extension("json");
            let meta: Option<InstanceMeta> = match fs::read_to_string(&sidecar) {
                Ok(text) => Some(serde_json::from_str(&text).map_err(Error::from)?),
                Err(_) => None,
            };
            Ok(DrawnInstance {
                slot,
                seed: meta.as_ref().map_or(seed.unwrap_or(0), |m| m.seed),
                instance,
                solutions: None,
            })
        })
        .collect()
}

fn emit_records(cfg: &ExperimentConfig, src: &Source, out: Option<&Path>) -> CliResult<()> {
    let instances = load_instances(src, Some(cfg.seed))?;
    let records = run_on_instances(cfg, &instances)?;
    for r in records.iter().filter(|r| !r.ok()) {
        eprintln!("warning: n = {} seed = {}: {}", r.n, r.seed, r.note);
    }
    write_output(out, |w| write_records_csv(w, &records))
}

fn quantum(args: &QuantumArgs, seed: Option<u64>, out: Option<&Path>) -> CliResult<()> {
    let method = if args.informed.is_some() { Method::QuantumGsatInformed } else { Method::Quantum };
    let mut cfg = ExperimentConfig::new(vec![method], Sweep::One(1), 1, seed.unwrap_or(0));
    if let Some(path) = &args.schedule {
        cfg.schedule = Some(ScheduleFile::from_json(&read(path)?)?);
    }
    if let Some(t) = args.informed {
        cfg.informed_steps = t;
    }
    if args.shots == Some(0) {
        return Err(CliError::Invalid("--shots must be at least 1".into()));
    }
    cfg.shots = args.shots;
    if let Some(path) = &args.histograms {
        let instances = load_instances(&args.source, seed)?;
        let first = &instances[0].instance;
        let costs = first.cost_table()?;
        let schedule = cfg.schedule().build(first.params().n)?;
        let opts = TrialOptions {
            histograms: true,
            amplitude_stats: true,
        };
        let (_, res) = run_trial(&costs, &schedule, opts)?;
        write_output(Some(path), |w| write_histogram_csv(w, &res.histograms, &res.amplitude_stats))?;
    }
    emit_records(&cfg, &args.source, out)
}

fn meanfield(model: MeanfieldCommand, seed: u64, out: Option<&Path>) -> CliResult<()> {
    match model {
        MeanfieldCommand::Z(f) => {
            let z = integrate_z(&f.form(), &Density::new(f.k, f.mu)?, &Grid::fixed(f.steps))?;
            write_output(out, |w| write_trajectory_csv(w, &z, &[]))
        }
        MeanfieldCommand::S { form: f, variant } => {
            let variant = match variant {
                Variant::Consistent => SModelVariant::Consistent,
                Variant::AsPrinted => SModelVariant::AsPrinted,
            };
            let s = integrate_s(&f.form(), &Density::new(f.k, f.mu)?, &Grid::fixed(f.steps), variant)?;
            write_output(out, |w| write_trajectory_csv(w, &[], &s))
        }
        MeanfieldCommand::SearchR1 {
            family,
            eps,
            k,
            mu,
            scan,
            starts,
        } => {
            let family = match family {
                FamilyArg::Linear => FormFamily::Linear,
                FamilyArg::Spiked => FormFamily::Spiked { eps },
            };
            let mut cfg = BoundarySearchConfig::new(family, Density::new(k, mu)?);
            cfg.seed = seed;
            if let Some(s) = scan {
                cfg.scan = s;
            }
            if let Some(s) = starts {
                cfg.starts = s;
            }
            let res = boundary_search_r1(&cfg)?;
            let json = serde_json::to_string_pretty(&res).map_err(Error::from)?;
            write_output(out, |w| Ok(writeln!(w, "{json}")?))
        }
    }
}

fn optimize(args: &OptimizeArgs, seed: Option<u64>, out: Option<&Path>) -> CliResult<()> {
    let mut cfg = OptimizeConfig::from_json(&read(&args.config)?)?;
    if let (Some(s), Some(spec)) = (seed, cfg.sample.as_mut()) {
        spec.seed = s;
    }
    let report = run_optimization(&cfg)?;
    if let Some(path) = &args.trace {
        write_output(Some(path), |w| write_trace_csv(w, &report.trace))?;
    }
    let report_json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    if let Some(path) = &args.report {
        write_output(Some(path), |w| Ok(writeln!(w, "{report_json}")?))?;
    }
    // Best parameters: a schedule file when there is one, else the report.
    let best = match &report.schedule {
        Some(file) => file.to_json()?,
        None => report_json,
    };
    write_output(out, |w| Ok(writeln!(w, "{best}")?))
}
