use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gchaos::chaining::{
    dtau_distance, dudley_integral, empirical_gaussian_sup, greedy_admissible_sequence, induced_distance, MetricMatrix,
    PointFamily,
};
use gchaos::chaos::{
    concentration_probe, sample_chaos_moment, small_ball_probe, translate_probe, BoundReport, ChaosSampleConfig,
};
use gchaos::mc::mix_seed;
use gchaos::norms::{all_partition_norms, partition_norm, NormOptions, PartitionNormResult};
use gchaos::suite::{generate_tensor, run_suite, Distribution, Suite, SuiteConfig};
use gchaos::tensor::io::{read_points, read_tensor, tensor_to_json};
use gchaos::tensor::Partition;
use gchaos::Error;

#[derive(Parser)]
#[command(name = "gchaos", version, about = "Moments of Gaussian chaoses, partition norms and generic chaining")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to this path (a directory for `verify`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition norms of a tensor.
    Norms {
        #[arg(long)]
        tensor: PathBuf,
        /// A single partition such as "{1,3}{2}".
        #[arg(long, conflicts_with = "all")]
        partition: Option<String>,
        /// Every partition of the axes (the default when no partition is given).
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Partition-sum moment bound, optionally against a Monte Carlo moment.
    Bound {
        #[arg(long)]
        tensor: PathBuf,
        /// Moment orders, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        /// Estimate the empirical moment with this many samples.
        #[arg(long)]
        with_empirical: Option<usize>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Monte Carlo estimate of (E|Z|^p)^(1/p).
    Sample {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// One Gaussian vector in every slot.
        #[arg(long)]
        coupled: bool,
        /// Coupled chaos without entries that repeat an index.
        #[arg(long, requires = "coupled")]
        no_diagonal: bool,
    },
    /// Monte Carlo probes of the supporting inequalities.
    Probe {
        #[command(subcommand)]
        probe: Probe,
    },
    /// Covering numbers, Dudley's integral, admissible sequences and Gaussian suprema.
    Chaining(ChainingArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Write a deterministic test tensor.
    Gen {
        /// Axis dimensions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value = "gaussian")]
        dist: Distribution,
    },
}

#[derive(Subcommand)]
enum Probe {
    /// Concentration of the injective norm of a Gaussian contraction.
    Concentration {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Shifted small-ball probability against 2^-k exp(-|x|^2/2).
    SmallBall {
        /// Shift factors: comma-separated coordinates, factors separated by ';'.
        #[arg(long)]
        x: String,
        /// Semi-norm tensor of order k+1; Euclidean norm when omitted.
        #[arg(long)]
        tensor: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Samples for the radius estimate (defaults to --samples).
        #[arg(long)]
        inner_samples: Option<usize>,
    },
    /// Gaussian measure of a translated centered ball.
    Translate {
        #[arg(long)]
        radius: f64,
        /// Translation vector, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Dudley,
    Gamma,
    Empirical,
    All,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct ChainingArgs {
    #[command(subcommand)]
    induced: Option<ChainingCommand>,
    /// Point-set file.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Subcommand)]
enum ChainingCommand {
    /// Distance matrix induced by a tensor on random points, as CSV.
    Induced {
        #[arg(long)]
        tensor: PathBuf,
        /// Number of factors per point; the tensor must have order k+1.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        npoints: usize,
        /// Index set I, 1-based and comma separated.
        #[arg(long, value_delimiter = ',')]
        block: Vec<usize>,
        /// Emit the weighted family D^tau instead of D_I.
        #[arg(long)]
        tau: Option<f64>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: Suite,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Moment orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    ps: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<usize>,
    /// Fixed input tensor for the moment suites.
    #[arg(long)]
    tensor: Option<PathBuf>,
}

/// Exit status: 0 pass, 1 failed check, 2 usage or input error.
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gchaos: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn norm_opts(cli: &Cli, restarts: usize) -> NormOptions {
    NormOptions {
        restarts,
        seed: cli.seed,
        ..NormOptions::default()
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Norms {
            tensor,
            partition,
            all: _,
            restarts,
        } => {
            let a = read_tensor(tensor)?;
            let opts = norm_opts(cli, *restarts);
            let results: Vec<PartitionNormResult> = match partition {
                Some(s) => vec![partition_norm(&a, &s.parse::<Partition>()?, &opts)?],
                None => all_partition_norms(&a, &opts)?,
            };
            if cli.json {
                emit(cli, &to_json(&results))?;
            } else {
                let mut text = String::new();
                for r in &results {
                    writeln!(text, "{} {} {}", r.partition, r.value, r.converged).expect("string write");
                }
                emit(cli, &text)?;
            }
            Ok(Outcome::Pass)
        }
        Command::Bound {
            tensor,
            p,
            with_empirical,
            restarts,
        } => {
            let a = read_tensor(tensor)?;
            let norms = all_partition_norms(&a, &norm_opts(cli, *restarts))?;
            let mut reports = Vec::with_capacity(p.len());
            for &p in p {
                let mut report = BoundReport::from_norms(&norms, p)?;
                if let Some(n) = with_empirical {
                    let cfg = ChaosSampleConfig::decoupled(a.clone(), p, *n, cli.seed);
                    report = report.with_empirical(sample_chaos_moment(&cfg)?);
                }
                reports.push(report);
            }
            if cli.json {
                emit(cli, &to_json(&reports))?;
            } else {
                let mut text = String::from("p,total_bound,empirical,std_error,ratio\n");
                for r in &reports {
                    let field = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
                    writeln!(
                        text,
                        "{},{},{},{},{}",
                        r.p,
                        r.total,
                        field(r.empirical.map(|e| e.value)),
                        field(r.empirical.map(|e| e.std_error)),
                        field(r.ratio)
                    )
                    .expect("string write");
                }
                emit(cli, &text)?;
            }
            Ok(Outcome::Pass)
        }
        Command::Sample {
            tensor,
            p,
            samples,
            coupled,
            no_diagonal,
        } => {
            let a = read_tensor(tensor)?;
            let mut cfg = if *coupled {
                ChaosSampleConfig::coupled(a, *p, *samples, cli.seed)
            } else {
                ChaosSampleConfig::decoupled(a, *p, *samples, cli.seed)
            };
            cfg.no_diagonal = *no_diagonal;
            let est = sample_chaos_moment(&cfg)?;
            if cli.json {
                emit(cli, &to_json(&est))?;
            } else {
                emit(cli, &format!("p={} moment={} std_error={} samples={}\n", est.p, est.value, est.std_error, est.samples))?;
            }
            Ok(Outcome::Pass)
        }
        Command::Probe { probe } => run_probe(cli, probe),
        Command::Chaining(args) => run_chaining(cli, args),
        Command::Verify(args) => run_verify(cli, args),
        Command::Gen { dims, dist } => {
            let t = generate_tensor(dims.clone(), *dist, cli.seed)?;
            emit(cli, &tensor_to_json(&t))?;
            Ok(Outcome::Pass)
        }
    }
}

fn report<T: Serialize>(cli: &Cli, value: &T, summary: String, pass: bool) -> Result<Outcome, Error> {
    if cli.json || cli.out.is_some() {
        emit(cli, &to_json(value))?;
    }
    if !cli.json {
        println!("{summary}");
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn parse_factors(s: &str) -> Result<Vec<Vec<f64>>, Error> {
    s.split(';')
        .map(|factor| {
            factor
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("--x: '{}' is not a number", v.trim())))
                })
                .collect()
        })
        .collect()
}

fn run_probe(cli: &Cli, probe: &Probe) -> Result<Outcome, Error> {
    match probe {
        Probe::Concentration { tensor, p, samples } => {
            let a = read_tensor(tensor)?;
            let r = concentration_probe(&a, *p, *samples, cli.seed, &norm_opts(cli, 16))?;
            let pass = r.ratio <= 3.0;
            let summary = format!("concentration p={} lhs={} rhs={} ratio={} {}", r.p, r.lhs, r.rhs, r.ratio, verdict(pass));
            report(cli, &r, summary, pass)
        }
        Probe::SmallBall {
            x,
            tensor,
            samples,
            inner_samples,
        } => {
            let x = parse_factors(x)?;
            let a = tensor.as_ref().map(read_tensor).transpose()?;
            let r = small_ball_probe(&x, a.as_ref(), *samples, inner_samples.unwrap_or(*samples), cli.seed)?;
            let summary = format!(
                "small-ball radius={} lhs={} se={} rhs={} {}",
                r.radius,
                r.lhs_prob,
                r.std_error,
                r.rhs_bound,
                verdict(r.pass)
            );
            report(cli, &r, summary, r.pass)
        }
        Probe::Translate { radius, x, samples } => {
            let r = translate_probe(*radius, x, *samples, cli.seed)?;
            let summary = format!("translate lhs={} se={} rhs={} {}", r.lhs, r.lhs_se, r.rhs, verdict(r.pass));
            report(cli, &r, summary, r.pass)
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct ChainingReport {
    points: usize,
    diameter: f64,
    dudley: Option<f64>,
    gamma: Option<f64>,
    n_max: Option<usize>,
    empirical_sup: Option<f64>,
    std_error: Option<f64>,
}

fn run_chaining(cli: &Cli, args: &ChainingArgs) -> Result<Outcome, Error> {
    if let Some(ChainingCommand::Induced {
        tensor,
        k,
        npoints,
        block,
        tau,
    }) = &args.induced
    {
        let a = read_tensor(tensor)?;
        if a.order() != k + 1 {
            return Err(Error::Argument(format!("--k {k} needs a tensor of order {}, got {}", k + 1, a.order())));
        }
        let family = PointFamily::random(a, *npoints, cli.seed)?;
        let m: MetricMatrix = match tau {
            Some(tau) => dtau_distance(&family, *tau)?,
            None => {
                if block.contains(&0) {
                    return Err(Error::Argument("--block indices are 1-based".into()));
                }
                let zero_based: Vec<usize> = block.iter().map(|j| j - 1).collect();
                induced_distance(&family, &zero_based)?
            }
        };
        emit(cli, &m.to_csv())?;
        return Ok(Outcome::Pass);
    }
    let path = args
        .points
        .as_ref()
        .ok_or_else(|| Error::Argument("chaining needs --points FILE or the `induced` subcommand".into()))?;
    let points = read_points(path)?;
    let metric = MetricMatrix::from_points(&points)?;
    let want = |m: Mode| args.mode == Mode::All || args.mode == m;
    let mut out = ChainingReport {
        points: points.len(),
        diameter: metric.diameter(),
        dudley: None,
        gamma: None,
        n_max: None,
        empirical_sup: None,
        std_error: None,
    };
    if want(Mode::Dudley) {
        out.dudley = Some(dudley_integral(&metric));
    }
    if want(Mode::Gamma) {
        let g = greedy_admissible_sequence(&metric);
        out.gamma = Some(g.value);
        out.n_max = Some(g.n_max);
    }
    if want(Mode::Empirical) {
        let sup = empirical_gaussian_sup(&points, args.samples, mix_seed(cli.seed, 0))?;
        out.empirical_sup = Some(sup.mean_sup);
        out.std_error = Some(sup.std_error);
    }
    if cli.json {
        emit(cli, &to_json(&out))?;
    } else {
        let mut text = format!("points={} diameter={}\n", out.points, out.diameter);
        if let Some(v) = out.dudley {
            writeln!(text, "dudley={v}").expect("string write");
        }
        if let (Some(v), Some(n)) = (out.gamma, out.n_max) {
            writeln!(text, "gamma={v} n_max={n}").expect("string write");
        }
        if let (Some(v), Some(se)) = (out.empirical_sup, out.std_error) {
            writeln!(text, "empirical_sup={v} std_error={se}").expect("string write");
        }
        emit(cli, &text)?;
    }
    Ok(Outcome::Pass)
}

fn run_verify(cli: &Cli, args: &VerifyArgs) -> Result<Outcome, Error> {
    let base = SuiteConfig::defaults(args.suite, cli.seed);
    let cfg = SuiteConfig {
        order: args.order.unwrap_or(base.order),
        dim: args.dim.unwrap_or(base.dim),
        points: args.points.unwrap_or(base.points),
        trials: args.trials.unwrap_or(base.trials),
        ps: args.ps.clone().unwrap_or(base.ps.clone()),
        samples: args.samples.unwrap_or(base.samples),
        out: cli.out.clone(),
        tensor: args.tensor.clone(),
        ..base
    };
    let report = run_suite(&cfg)?;
    if cli.json {
        print!("{}", report.to_json());
    } else {
        println!(
            "{}: {}/{} rows pass (pass rate {:.4})",
            cfg.suite,
            report.passed,
            report.rows.len(),
            report.pass_rate
        );
        if let Some(dir) = &cfg.out {
            println!("reports written to {}", Path::new(dir).display());
        }
    }
    for row in report.failures() {
        eprintln!(
            "FAIL trial={} case={} p={} measured={} reference={} ratio={}",
            row.trial,
            row.case,
            row.p.map(|p| p.to_string()).unwrap_or_default(),
            row.measured,
            row.reference,
            row.ratio
        );
    }
    Ok(if report.all_passed() { Outcome::Pass } else { Outcome::Fail })
}
