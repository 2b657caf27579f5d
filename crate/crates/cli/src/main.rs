mod output;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use assembly_core::registry::{builtin_names, scan_constants, Builtin};
use assembly_core::sampler::{
    batch_moments, sample_profiles, SamplerConfig, DEFAULT_MAX_REJECTIONS, DEFAULT_STREAMS,
};
use assembly_core::{
    builtin_class, check_condition, class_from_config, q_table, AssemblyClass, BigRational,
    ClassConfig, ClassScalar, ConditionId, Error, Family, MomentEngine, Real, Scalar,
    WeaklyLogParams,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use output::{emit, json_bytes, Cell, Format, Table};
use verify::{Mismatch, VERIFY_CAP};

/// Counting, component statistics and variance bounds for assembly classes.
#[derive(Debug, Parser)]
#[command(name = "assembly-tk", version)]
struct Cli {
    /// Upper bound on worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct ClassArgs {
    /// Built-in class name (see `classes`).
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    class: Option<String>,
    /// Class config file (JSON, or TOML with a .toml extension).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the class radius, e.g. `1`, `1/3` or `0.25`.
    #[arg(long)]
    rho: Option<Real>,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the built-in classes.
    Classes {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Q(n) and G(n) = n! Q(n); float mode prints Q(n) rho^n.
    Count {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        from: usize,
        #[arg(long)]
        n: usize,
        /// Compare against the brute-force oracle (n <= 40).
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the four growth conditions on [1, N].
    Check {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long = "N", default_value_t = 100)]
        range: usize,
        /// Calibrate the constants on [1, N/2] and check them on [1, N].
        #[arg(long, conflicts_with_all = ["theta_upper", "theta", "theta_prime", "n0"])]
        auto: bool,
        #[arg(long)]
        theta_upper: Option<Real>,
        #[arg(long)]
        theta: Option<Real>,
        #[arg(long)]
        theta_prime: Option<Real>,
        #[arg(long)]
        n0: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Law of the number of components of size j at order n.
    Pmf {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mean and variance of an additive function.
    Moments(MomentArgs),
    /// Mean, variance, both bounds and their ratios.
    Tk(MomentArgs),
    /// Bound ratios over a range of orders.
    Sweep {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, default_value = "w")]
        family: Family,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo profiles from conditioned Poisson counts.
    Sample {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        /// Fixed tilt; tuned on (0, rho] when omitted.
        #[arg(long)]
        tilt: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_MAX_REJECTIONS)]
        max_rejections: u64,
        #[arg(long, default_value_t = DEFAULT_STREAMS)]
        streams: usize,
        #[arg(long, default_value = "w")]
        family: Family,
        /// Write accepted profiles as CSV here, with metadata in `<path>.meta.json`.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
struct MomentArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long)]
    n: usize,
    /// w, log, half, rademacher:SEED, distinct, single:J or zero.
    #[arg(long, default_value = "w")]
    family: Family,
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    output: OutputArgs,
}

enum Failure {
    Usage(String),
    Numeric(String),
    Mismatch(Mismatch),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numeric(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptySupport { .. }
            | Error::NonFinite { .. }
            | Error::TooLarge { .. }
            | Error::NoTilt
            | Error::RejectionLimit { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn load_class(args: &ClassArgs) -> Result<AssemblyClass, Failure> {
    let class = match (&args.class, &args.config) {
        (Some(name), None) => builtin_class(name)?,
        (None, Some(path)) => class_from_config(&ClassConfig::load(path)?)?,
        _ => {
            return Err(Failure::Usage(
                "give exactly one of --class or --config".into(),
            ))
        }
    };
    match &args.rho {
        Some(rho) => Ok(class.with_rho(rho.clone())?),
        None => Ok(class),
    }
}

fn check_verify_range(verify: bool, n: usize) -> Outcome {
    if verify && n > VERIFY_CAP {
        return Err(Failure::Usage(format!(
            "--verify needs n <= {VERIFY_CAP}, got {n}"
        )));
    }
    Ok(())
}

fn mismatch(found: Option<Mismatch>) -> Outcome {
    found.map_or(Ok(()), |m| Err(Failure::Mismatch(m)))
}

fn write_table(table: &Table, output: &OutputArgs) -> Outcome {
    let bytes = match output.format {
        Format::Csv => table.to_csv()?,
        Format::Json => json_bytes(&table.to_json())?,
    };
    emit(&bytes, output.out.as_deref())?;
    Ok(())
}

fn classes(output: &OutputArgs) -> Outcome {
    let mut table = Table::new(&["name", "lambda_j", "rho", "description"]);
    for name in builtin_names() {
        let b = Builtin::from_name(name).expect("built-in name");
        table.push(vec![
            Cell::Text(name.into()),
            Cell::Text(b.formula().into()),
            Cell::Num(b.rho()),
            Cell::Text(b.description().into()),
        ]);
    }
    write_table(&table, output)
}

fn count(
    class: &AssemblyClass,
    mode: Mode,
    from: usize,
    n: usize,
    verify: bool,
    output: &OutputArgs,
) -> Outcome {
    if from > n {
        return Err(Failure::Usage(format!("empty range {from}..={n}")));
    }
    check_verify_range(verify, n)?;
    let exact = q_table::<BigRational>(class, if mode == Mode::Exact || verify { n } else { 0 })?;
    if verify {
        let values: Vec<(usize, BigRational)> =
            (from..=n).map(|m| (m, exact.get(m).clone())).collect();
        mismatch(verify::counts(class, &values)?)?;
    }
    let table = match mode {
        Mode::Exact => {
            let mut table = Table::new(&["n", "Q", "G"]);
            let mut fact = BigRational::one_value();
            for m in 1..=n {
                fact = fact.times(&BigRational::from_u64(m as u64));
                if m >= from {
                    let q = exact.get(m);
                    table.push(vec![
                        Cell::Int(m as u64),
                        Cell::scalar(q),
                        Cell::scalar(&q.times(&fact)),
                    ]);
                }
            }
            if from == 0 {
                table.rows.insert(
                    0,
                    vec![
                        Cell::Int(0),
                        Cell::Num(Real::integer(1)),
                        Cell::Num(Real::integer(1)),
                    ],
                );
            }
            table
        }
        Mode::Float => {
            let t = q_table::<f64>(class, n)?;
            let mut table = Table::new(&["n", "scaled_Q"]);
            for m in from..=n {
                table.push(vec![Cell::Int(m as u64), Cell::scalar(t.get(m))]);
            }
            table
        }
    };
    write_table(&table, output)
}

fn params_from_flags(
    rho: &Real,
    theta_upper: Option<Real>,
    theta: Option<Real>,
    theta_prime: Option<Real>,
    n0: Option<usize>,
) -> Result<WeaklyLogParams, Failure> {
    match (theta_upper, theta, theta_prime, n0) {
        (Some(tu), Some(t), Some(tp), Some(n0)) => {
            Ok(WeaklyLogParams::new(rho.clone(), tu, t, tp, n0)?)
        }
        _ => Err(Failure::Usage(
            "give --auto or all of --theta-upper, --theta, --theta-prime, --n0".into(),
        )),
    }
}

fn auto_params(class: &AssemblyClass, range: usize) -> Result<WeaklyLogParams, Failure> {
    let scan = scan_constants(class, class.rho(), (range / 2).max(1))?;
    if scan.theta_prime_at.is_none() || scan.theta_prime <= 0.0 {
        return Err(Failure::Numeric(
            "no order with structures in the calibration range".into(),
        ));
    }
    WeaklyLogParams::new(
        class.rho().clone(),
        scan.theta_upper,
        scan.theta,
        Real::Float(scan.theta_prime),
        scan.n0,
    )
    .map_err(|e| Failure::Numeric(e.to_string()))
}

fn check(
    class: &AssemblyClass,
    params: &WeaklyLogParams,
    range: usize,
    output: &OutputArgs,
) -> Outcome {
    let verdicts = ConditionId::ALL
        .iter()
        .map(|&id| check_condition(class, params, id, range))
        .collect::<Result<Vec<_>, _>>()?;
    let bytes = match output.format {
        Format::Json => json_bytes(
            &json!({ "class": class.name(), "constants": params, "verdicts": verdicts }),
        )?,
        Format::Csv => {
            let mut table = Table::new(&[
                "condition",
                "name",
                "holds",
                "witness_index",
                "witness_value",
                "witness_bound",
                "witness_kind",
                "checked_range",
                "tolerance",
                "rho",
                "theta_upper",
                "theta",
                "theta_prime",
                "n0",
            ]);
            for v in &verdicts {
                let w = v.witness.as_ref();
                table.push(vec![
                    Cell::Int(v.condition.number() as u64),
                    Cell::Text(v.condition.name().into()),
                    Cell::Flag(v.holds),
                    w.map_or(Cell::Empty, |w| Cell::Int(w.index as u64)),
                    w.map_or(Cell::Empty, |w| Cell::Num(w.value.clone())),
                    w.map_or(Cell::Empty, |w| Cell::Num(w.bound.clone())),
                    w.map_or(Cell::Empty, |w| {
                        Cell::Text(
                            serde_json::to_value(w.kind)
                                .ok()
                                .and_then(|k| k.as_str().map(String::from))
                                .unwrap_or_default(),
                        )
                    }),
                    Cell::Int(v.checked_range as u64),
                    v.tolerance
                        .map_or(Cell::Empty, |t| Cell::Num(Real::Float(t))),
                    Cell::Num(params.rho.clone()),
                    Cell::Num(params.theta_upper.clone()),
                    Cell::Num(params.theta.clone()),
                    Cell::Num(params.theta_prime.clone()),
                    Cell::Int(params.n0 as u64),
                ]);
            }
            table.to_csv()?
        }
    };
    emit(&bytes, output.out.as_deref())?;
    Ok(())
}

fn pmf<S: ClassScalar>(class: &AssemblyClass, n: usize, j: usize, output: &OutputArgs) -> Outcome {
    let law = MomentEngine::<S>::new(class, n)?.pmf(n, j)?;
    let mut table = Table::new(&["k", "p"]);
    for (k, p) in law.probabilities.iter().enumerate() {
        table.push(vec![Cell::Int(k as u64), Cell::scalar(p)]);
    }
    write_table(&table, output)
}

fn verify_pmf(class: &AssemblyClass, n: usize, j: usize) -> Outcome {
    let law = MomentEngine::<BigRational>::new(class, n)?.pmf(n, j)?;
    mismatch(verify::pmf(class, n, j, &law.probabilities)?)
}

fn verify_reports(
    class: &AssemblyClass,
    family: &Family,
    orders: impl Iterator<Item = usize>,
) -> Outcome {
    if !family.is_exact() {
        return Err(Failure::Usage(format!(
            "--verify needs a rational-valued family, got `{family}`"
        )));
    }
    let orders: Vec<usize> = orders.collect();
    let top = orders.iter().copied().max().unwrap_or(0);
    let engine = MomentEngine::<BigRational>::new(class, top)?;
    for n in orders.into_iter().filter(|&n| engine.has_support(n)) {
        mismatch(verify::report(&engine, n, &family.for_n(n))?)?;
    }
    Ok(())
}

const REPORT_HEADER: [&str; 7] = ["n", "mean", "variance", "rhs1", "rhs2", "ratio1", "ratio2"];

fn moments<S: ClassScalar>(class: &AssemblyClass, args: &MomentArgs, full: bool) -> Outcome {
    let engine = MomentEngine::<S>::new(class, args.n)?;
    let h = args.family.for_n(args.n);
    let table = if full {
        let r = engine.report(args.n, &h)?;
        let mut table = Table::new(&REPORT_HEADER);
        table.push(vec![
            Cell::Int(r.n as u64),
            Cell::scalar(&r.mean),
            Cell::scalar(&r.variance),
            Cell::scalar(&r.rhs1),
            Cell::opt(r.rhs2.as_ref()),
            Cell::opt(r.ratio1.as_ref()),
            Cell::opt(r.ratio2.as_ref()),
        ]);
        table
    } else {
        let (mean, variance) = engine.moments(args.n, &h)?;
        let mut table = Table::new(&REPORT_HEADER[..3]);
        table.push(vec![
            Cell::Int(args.n as u64),
            Cell::scalar(&mean),
            Cell::scalar(&variance),
        ]);
        table
    };
    write_table(&table, &args.output)
}

fn sweep<S: ClassScalar>(
    class: &AssemblyClass,
    family: &Family,
    from: usize,
    to: usize,
    mode: Mode,
    output: &OutputArgs,
) -> Outcome {
    let summary = MomentEngine::<S>::new(class, to)?.sweep(family, from..=to)?;
    let bytes = match output.format {
        Format::Csv => {
            let mut buf = Vec::new();
            summary.write_csv(&mut buf)?;
            buf
        }
        Format::Json => {
            let mode = match mode {
                Mode::Exact => "exact",
                Mode::Float => "float",
            };
            json_bytes(&summary.to_document(class.name(), &family.name(), mode))?
        }
    };
    emit(&bytes, output.out.as_deref())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sample(
    class: &AssemblyClass,
    n: usize,
    reps: usize,
    config: &SamplerConfig,
    family: &Family,
    dump: Option<&Path>,
    output: &OutputArgs,
) -> Outcome {
    if reps < 2 {
        return Err(Failure::Usage(format!(
            "--reps must be at least 2, got {reps}"
        )));
    }
    let batch = sample_profiles(class, n, reps, config)?;
    let meta = batch.metadata(class.name());
    if let Some(path) = dump {
        let mut buf = Vec::new();
        batch.write_csv(&mut buf)?;
        emit(&buf, Some(path))?;
        let meta_path = PathBuf::from(format!("{}.meta.json", path.display()));
        emit(&json_bytes(&meta)?, Some(&meta_path))?;
    }
    let m = batch_moments(&batch, &family.for_n(n));
    let bytes = match output.format {
        Format::Json => {
            json_bytes(&json!({ "metadata": meta, "family": family.name(), "moments": m }))?
        }
        Format::Csv => {
            let mut table = Table::new(&[
                "class",
                "n",
                "seed",
                "streams",
                "tilt",
                "tilt_clamped",
                "accepted",
                "rejected",
                "acceptance_rate",
                "family",
                "mean",
                "variance",
                "stderr",
            ]);
            table.push(vec![
                Cell::Text(meta.class.clone()),
                Cell::Int(meta.n as u64),
                Cell::Int(meta.seed),
                Cell::Int(meta.streams as u64),
                Cell::Num(Real::Float(meta.tilt)),
                Cell::Flag(meta.tilt_clamped),
                Cell::Int(meta.accepted),
                Cell::Int(meta.rejected),
                Cell::Num(Real::Float(meta.acceptance_rate)),
                Cell::Text(family.name()),
                Cell::Num(Real::Float(m.mean)),
                Cell::Num(Real::Float(m.variance)),
                Cell::Num(Real::Float(m.stderr)),
            ]);
            table.to_csv()?
        }
    };
    emit(&bytes, output.out.as_deref())?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Classes { output } => classes(&output),
        Command::Count {
            class,
            mode,
            from,
            n,
            verify,
            output,
        } => count(&load_class(&class)?, mode, from, n, verify, &output),
        Command::Check {
            class,
            range,
            auto,
            theta_upper,
            theta,
            theta_prime,
            n0,
            output,
        } => {
            let class = load_class(&class)?;
            let params = if auto {
                auto_params(&class, range)?
            } else {
                params_from_flags(class.rho(), theta_upper, theta, theta_prime, n0)?
            };
            check(&class, &params, range, &output)
        }
        Command::Pmf {
            class,
            mode,
            n,
            j,
            verify,
            output,
        } => {
            let class = load_class(&class)?;
            check_verify_range(verify, n)?;
            if verify {
                verify_pmf(&class, n, j)?;
            }
            match mode {
                Mode::Exact => pmf::<BigRational>(&class, n, j, &output),
                Mode::Float => pmf::<f64>(&class, n, j, &output),
            }
        }
        Command::Moments(args) => moment_command(&args, false),
        Command::Tk(args) => moment_command(&args, true),
        Command::Sweep {
            class,
            mode,
            from,
            to,
            family,
            verify,
            output,
        } => {
            let class = load_class(&class)?;
            if from == 0 || from > to {
                return Err(Failure::Usage(format!("invalid order range {from}..={to}")));
            }
            check_verify_range(verify, to)?;
            if verify {
                verify_reports(&class, &family, from..=to)?;
            }
            match mode {
                Mode::Exact => sweep::<BigRational>(&class, &family, from, to, mode, &output),
                Mode::Float => sweep::<f64>(&class, &family, from, to, mode, &output),
            }
        }
        Command::Sample {
            class,
            n,
            reps,
            seed,
            tilt,
            max_rejections,
            streams,
            family,
            dump,
            output,
        } => {
            let class = load_class(&class)?;
            let config = SamplerConfig {
                tilt,
                max_rejections,
                seed,
                streams,
            };
            sample(&class, n, reps, &config, &family, dump.as_deref(), &output)
        }
    }
}

fn moment_command(args: &MomentArgs, full: bool) -> Outcome {
    let class = load_class(&args.class)?;
    if args.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    check_verify_range(args.verify, args.n)?;
    if args.verify {
        verify_reports(&class, &args.family, std::iter::once(args.n))?;
    }
    match args.mode {
        Mode::Exact => moments::<BigRational>(&class, args, full),
        Mode::Float => moments::<f64>(&class, args, full),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) | Failure::Numeric(msg) => eprintln!("error: {msg}"),
                Failure::Mismatch(m) => eprintln!("{m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
