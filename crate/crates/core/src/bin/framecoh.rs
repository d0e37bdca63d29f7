use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use framecoh::bounds::{best_lower_bound, bound_table};
use framecoh::config::Config;
use framecoh::constructions::{
    build_code_frame, build_gaussian, build_harmonic, code_frame_coherence, harmonic_coherence,
    CodeFrameSpec, GaussianFrameSpec, HarmonicFrameSpec,
};
use framecoh::equivalence::{exhaustive_flip_oracle, linear_time_flip};
use framecoh::experiment::{
    run_experiment, run_recovery_trials, AmplitudeChoice, ExperimentConfig, ExperimentId,
    RecoverySetup, RECOVERY_CSV_HEADER,
};
use framecoh::frame::{average_coherence, scp_check, spectral_norm, SPECTRAL_TOLERANCE};
use framecoh::io::{read_frame, write_frame, Encoding};
use framecoh::{CoherenceReport, Frame, FrameError, ScalarField};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "framecoh", version, about = "Low-coherence frames and one-step thresholding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Build a frame and write it as a FRAME v1 file.
    Construct(ConstructArgs),
    /// Print μ, ν, ‖F‖₂ and the strong coherence verdicts of a frame file.
    Analyze {
        frame: PathBuf,
        /// Print a CSV header and row instead of the text report.
        #[arg(long)]
        csv: bool,
    },
    /// Reduce average coherence by flipping column signs.
    Flip {
        frame: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Search all sign patterns instead of the greedy pass (N ≤ 24).
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        binary: bool,
    },
    /// Run one-step thresholding on random sparse problems.
    Recover(RecoverArgs),
    /// Tabulate lower bounds on worst-case coherence.
    Bounds {
        #[arg(short = 'M', long = "rows")]
        m: usize,
        #[arg(long, default_value_t = 2)]
        nmin: usize,
        #[arg(long)]
        nmax: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Run a Monte Carlo experiment; exits 1 when its claim fails.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Table,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    kind: ConstructKind,
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Write the binary variant.
    #[arg(long, global = true)]
    binary: bool,
}

#[derive(Subcommand)]
enum ConstructKind {
    Gaussian {
        #[arg(short = 'M', long = "rows")]
        m: usize,
        #[arg(short = 'N', long = "cols")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Harmonic {
        /// DFT size.
        #[arg(short = 'N', long = "size")]
        n: usize,
        /// Expected number of rows.
        #[arg(short = 'M', long = "rows")]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Code {
        #[arg(short = 'm')]
        m: u32,
        #[arg(short = 't', default_value_t = 1)]
        t: u32,
        /// Modulus as a bitmask, e.g. 0x25 for x⁵ + x² + 1.
        #[arg(long, value_parser = parse_mask)]
        poly: Option<u32>,
    },
    Identity {
        #[arg(short = 'N', long = "size")]
        n: usize,
    },
}

fn parse_mask(s: &str) -> Result<u32, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16),
        None => match s.strip_prefix("0b") {
            Some(bin) => u32::from_str_radix(bin, 2),
            None => s.parse(),
        },
    };
    parsed.map_err(|e| e.to_string())
}

#[derive(Args)]
struct RecoverArgs {
    frame: PathBuf,
    #[arg(long)]
    sigma2: f64,
    /// Oracle SNR for the threshold; defaults to that of each drawn signal.
    #[arg(long, conflicts_with = "lambda")]
    snr: Option<f64>,
    /// Explicit threshold instead of the default choice.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(short = 't', long = "tparam", default_value_t = 0.5)]
    t: f64,
    #[arg(short = 'K', long)]
    k: usize,
    #[arg(long, default_value = "flat")]
    amplitude: String,
    /// Nonzero magnitude; defaults to `floor` times the noise floor.
    #[arg(long, conflicts_with = "floor")]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    floor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    id: Option<String>,
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short = 'M')]
    rows: Option<String>,
    #[arg(short = 'N')]
    cols: Option<String>,
    #[arg(short = 'm')]
    field: Option<String>,
    /// Code-frame `t`, or the threshold parameter for ost-recovery.
    #[arg(short = 't')]
    t: Option<String>,
    #[arg(short = 'K')]
    k: Option<String>,
    #[arg(long)]
    sigma2: Option<String>,
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    nmin: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long)]
    frame: Option<String>,
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(short, long)]
    output: Option<String>,
    /// Any other parameter as key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn configure_threads() -> framecoh::Result<()> {
    let Ok(v) = std::env::var("FRAMECOH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| FrameError::Config(format!("FRAMECOH_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| FrameError::Config(e.to_string()))
}

fn run(cli: Cli) -> framecoh::Result<Outcome> {
    match cli.command {
        Command::Construct(args) => construct(args),
        Command::Analyze { frame, csv } => analyze(&frame, csv),
        Command::Flip {
            frame,
            output,
            oracle,
            binary,
        } => flip(&frame, &output, oracle, binary),
        Command::Recover(args) => recover(args),
        Command::Bounds {
            m,
            nmin,
            nmax,
            format,
        } => {
            if nmin > nmax {
                return Err(FrameError::Config(format!("nmin {nmin} exceeds nmax {nmax}")));
            }
            let table = bound_table(m, nmin..=nmax)?;
            print!(
                "{}",
                match format {
                    TableFormat::Csv => table.to_csv(),
                    TableFormat::Table => table.to_text(),
                }
            );
            Ok(Outcome::Pass)
        }
        Command::Experiment(args) => experiment(args),
    }
}

fn encoding(binary: bool) -> Encoding {
    if binary {
        Encoding::Binary
    } else {
        Encoding::Text
    }
}

fn construct(args: ConstructArgs) -> framecoh::Result<Outcome> {
    let output = args
        .output
        .ok_or_else(|| FrameError::Config("construct needs --output <path>".into()))?;
    let (frame, report) = match args.kind {
        ConstructKind::Gaussian { m, n, seed } => {
            let f = build_gaussian(&GaussianFrameSpec::new(m, n, seed)?)?;
            let r = scp_check(&f)?;
            (f, r)
        }
        ConstructKind::Harmonic { n, m, seed } => {
            let h = build_harmonic(&HarmonicFrameSpec::new(n, m, seed)?)?;
            let s = harmonic_coherence(&h)?;
            let norm = spectral_norm(&h.frame, SPECTRAL_TOLERANCE)?;
            let rows: Vec<String> = h.selected_rows.iter().map(|r| r.to_string()).collect();
            println!("selected_rows ({}) = {}", rows.len(), rows.join(" "));
            if h.resamples > 0 {
                println!("row selection redrawn {} time(s)", h.resamples);
            }
            let r = CoherenceReport::from_parts(h.frame.rows(), n, s.mu, s.nu, norm);
            (h.frame, r)
        }
        ConstructKind::Code { m, t, poly } => {
            let spec = CodeFrameSpec {
                irreducible_poly: poly,
                ..CodeFrameSpec::new(m, t)
            };
            let f = build_code_frame(&spec)?;
            let s = code_frame_coherence(&f)?;
            let norm = spectral_norm(&f, SPECTRAL_TOLERANCE)?;
            println!(
                "mu bound 1/sqrt(2^(m-2t-1)) = {:.12}  nu bound mu/sqrt(2^m) = {:.12}",
                spec.mu_bound(),
                spec.nu_bound(s.mu)
            );
            let r = CoherenceReport::from_parts(f.rows(), f.cols(), s.mu, s.nu, norm);
            (f, r)
        }
        ConstructKind::Identity { n } => {
            let f = Frame::identity(n);
            let r = scp_check(&f)?;
            (f, r)
        }
    };
    write_frame(&output, &frame, encoding(args.binary))?;
    println!("wrote {} ({} x {} {})", output.display(), frame.rows(), frame.cols(), frame.field());
    print_report(&frame, &report);
    Ok(Outcome::Pass)
}

fn print_report(frame: &Frame, report: &CoherenceReport) {
    println!("{report}");
    println!(
        "N/M           = {:.12}",
        frame.cols() as f64 / frame.rows() as f64
    );
    if frame.cols() >= 2 {
        let real = frame.field() == ScalarField::Real;
        println!(
            "lower bound   = {:.12}",
            best_lower_bound(frame.rows(), frame.cols(), real)
        );
    }
}

fn analyze(path: &Path, csv: bool) -> framecoh::Result<Outcome> {
    let frame = read_frame(path)?;
    let report = scp_check(&frame)?;
    if csv {
        println!("{}", CoherenceReport::CSV_HEADER);
        println!("{}", report.csv_row());
    } else {
        println!("{} x {} {} frame", frame.rows(), frame.cols(), frame.field());
        print_report(&frame, &report);
    }
    Ok(Outcome::Pass)
}

fn flip(path: &Path, output: &Path, oracle: bool, binary: bool) -> framecoh::Result<Outcome> {
    let frame = read_frame(path)?;
    let before = average_coherence(&frame)?;
    let (flipped, pattern, after) = if oracle {
        let o = exhaustive_flip_oracle(&frame)?;
        (o.frame, o.pattern, o.min_nu)
    } else {
        let (g, p) = linear_time_flip(&frame)?;
        let nu = average_coherence(&g)?;
        (g, p, nu)
    };
    write_frame(output, &flipped, encoding(binary))?;
    println!("{pattern}");
    eprintln!("nu before = {before:.12}, after = {after:.12}");
    Ok(Outcome::Pass)
}

fn recover(args: RecoverArgs) -> framecoh::Result<Outcome> {
    let frame = read_frame(&args.frame)?;
    let report = scp_check(&frame)?;
    let setup = RecoverySetup {
        k: args.k,
        sigma2: args.sigma2,
        t: args.t,
        amplitude: args.amplitude.parse::<AmplitudeChoice>()?,
        alpha: args.alpha,
        floor_multiple: args.floor,
        snr: args.snr,
        lambda: args.lambda,
    };
    if args.trials == 0 {
        return Err(FrameError::Config("trials must be at least 1".into()));
    }
    let trials = run_recovery_trials(
        &frame,
        report.mu,
        report.spectral_norm,
        &setup,
        args.seed,
        args.trials,
    )?;
    let mut csv = String::from(RECOVERY_CSV_HEADER);
    csv.push('\n');
    for t in &trials {
        csv.push_str(&t.csv_row());
        csv.push('\n');
    }
    emit(&csv, args.output.as_deref())?;
    Ok(Outcome::Pass)
}

fn emit(text: &str, output: Option<&Path>) -> framecoh::Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| FrameError::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| FrameError::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            }),
    }
}

fn experiment(args: ExperimentArgs) -> framecoh::Result<Outcome> {
    let mut config = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let flags = [
        ("M", args.rows),
        ("N", args.cols),
        ("m", args.field),
        ("t", args.t),
        ("K", args.k),
        ("sigma2", args.sigma2),
        ("snr", args.snr),
        ("delta", args.delta),
        ("nmin", args.nmin),
        ("nmax", args.nmax),
        ("frame", args.frame),
        ("seed", args.seed),
        ("trials", args.trials),
        ("output", args.output),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, v);
        }
    }
    if args.oracle {
        config.set("oracle", "true");
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| FrameError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        config.set(k.trim(), v.trim());
    }
    let id = args.id.as_deref().map(str::parse::<ExperimentId>).transpose()?;
    let cfg = ExperimentConfig::from_config(id, &config)?;
    let report = run_experiment(&cfg)?;
    match &cfg.output {
        Some(p) => {
            report.write_csv(p)?;
            print!("{}", report.summary_text());
        }
        None => {
            print!("{}", report.csv());
            eprint!("{}", report.summary_text());
        }
    }
    Ok(if report.summary.pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}
