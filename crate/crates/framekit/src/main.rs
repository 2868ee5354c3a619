//! Experiment runner: generate systems, compute reports, run thinning,
//! verify identities, and emit plot-ready CSV. Exit codes: 0 success,
//! 2 invalid input, 3 numerical failure, 4 partial result, 5 certificate
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use framekit_core::{
    beurling_density, check_near_critical_lemma, find_selector, frame_bounds, frame_measure,
    gabor_system, lattice_index_set, localization_profile, thin_to_density, verify_selector_bound,
    CellPartition, FrameError, FrameSystem, GaborSpec, SelectorOptions, SpectrumSpec, Strategy,
    ThinningConfig, ThinningError, WindowFamily,
};
use framekit::report::{
    self, BoundsOut, DensityOut, Envelope, FrdOut, MeasureOut, NearCriticalOut, Provenance,
    SelectorOut, ThinningConfigOut, TraceOut,
};
use framekit::{load_system, random_parseval, random_system, random_unit_window, save_system};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "framekit", version, about = "Finite frame analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Greedy,
    Random,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::Greedy => Strategy::Greedy,
            StrategyArg::Random => Strategy::Randomized,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Cyclic Gabor system of the given modulus.
    #[arg(long, value_name = "N")]
    gabor: Option<usize>,
    /// Lattice index set "a,b" (divisors of N); default is the full group.
    #[arg(long, value_name = "A,B")]
    lattice: Option<String>,
    /// Window: "gaussian" (default) or "random".
    #[arg(long, default_value = "gaussian")]
    window: String,
    /// Random system "dim,count" instead of a Gabor system.
    #[arg(long, value_name = "DIM,COUNT")]
    random: Option<String>,
    /// Exponential system: spectrum "lo,hi", grid step, frequency step.
    #[arg(long, value_name = "LO,HI")]
    exponential: Option<String>,
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WindowArgs {
    /// Window radii, comma-separated and increasing; default covers half
    /// the domain.
    #[arg(long, value_name = "R1,R2,..")]
    radii: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write tidy CSV rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a system file.
    Gen(GenArgs),
    /// Frame bounds of a system file.
    Bounds {
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Windowed density estimates of a system's index set.
    Density {
        input: PathBuf,
        #[command(flatten)]
        windows: WindowArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Windowed frame measure of a system.
    Measure {
        input: PathBuf,
        #[command(flatten)]
        windows: WindowArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify the measure-density product identity on a system.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        windows: WindowArgs,
        /// Max allowed deviation of the products from 1.
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Also check the sublevel-density inequality at this alpha.
        #[arg(long)]
        near_critical_alpha: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Thin a system toward density 1 + epsilon.
    Thin {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long)]
        r_override: Option<usize>,
        #[arg(long, value_enum, default_value = "greedy")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u128,
        #[arg(long, default_value_t = 64)]
        restarts: u32,
        #[arg(long)]
        density_radius: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        max_iterations: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Selector search benchmark on seeded random Parseval frames.
    SelectorBench {
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        cells: usize,
        #[arg(long, default_value_t = 4)]
        cell_size: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u128,
        #[arg(long, default_value_t = 64)]
        restarts: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tail-energy localization profile against probe atoms.
    Localization {
        input: PathBuf,
        /// Probe indices into the system, comma-separated.
        #[arg(long, value_name = "I1,I2,..")]
        probes: String,
        #[arg(long, value_name = "R1,R2,..")]
        radii: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> CliError {
    CliError { code, message: message.into() }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        let code = match &e {
            FrameError::NumericalFailure(_) => 3,
            FrameError::CertificateFailure(_) => 5,
            _ => 2,
        };
        fail(code, e.to_string())
    }
}

impl From<framekit::FormatError> for CliError {
    fn from(e: framekit::FormatError) -> Self {
        match e {
            framekit::FormatError::Core(c) => c.into(),
            other => fail(2, other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        fail(2, e.to_string())
    }
}

fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(fail(2, format!("{what} must be two comma-separated values")));
    }
    let a = parts[0].trim().parse().map_err(|_| fail(2, format!("bad {what}")))?;
    let b = parts[1].trim().parse().map_err(|_| fail(2, format!("bad {what}")))?;
    Ok((a, b))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| fail(2, format!("bad {what}"))))
        .collect()
}

fn default_radii(f: &FrameSystem) -> Vec<f64> {
    let d = f.geometry().diameter();
    vec![d / 2.0, d + 0.6]
}

fn windows_for(f: &FrameSystem, args: &WindowArgs) -> Result<WindowFamily, CliError> {
    let radii = match &args.radii {
        Some(s) => parse_list(s, "radii")?,
        None => default_radii(f),
    };
    Ok(WindowFamily::grid(f.geometry(), radii)?)
}

fn emit<T: Serialize>(report: T, seed: u64, epsilon: f64, config: &impl Serialize, out: &Option<PathBuf>) -> Result<(), CliError> {
    let envelope = Envelope { provenance: Provenance::new(seed, epsilon, config), report };
    let json = report::to_json(&envelope);
    check_finite(&json)?;
    match out {
        Some(path) => std::fs::write(path, json)?,
        None => print!("{json}"),
    }
    Ok(())
}

/// NaN/Inf anywhere in an output is a reportable bug; serde_json encodes
/// them as null, which this rejects.
fn check_finite(json: &str) -> Result<(), CliError> {
    if json.contains("null") {
        return Err(fail(3, "non-finite value in report"));
    }
    Ok(())
}

fn write_csv(path: &Option<PathBuf>, content: String) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, content)?;
    }
    Ok(())
}

fn gen_system(args: &GenArgs) -> Result<FrameSystem, CliError> {
    if let Some(spec) = &args.random {
        let (dim, count) = parse_pair::<usize>(spec, "--random")?;
        return Ok(random_system(args.seed, dim, count));
    }
    if let Some(spec) = &args.exponential {
        let (lo, hi) = parse_pair::<f64>(spec, "--exponential")?;
        let spectrum = SpectrumSpec::new(vec![(lo, hi)], args.grid_step)?;
        let extent = 1.0 / args.lambda_step;
        let count = (extent * (hi - lo)).round() as i64;
        let lambdas: Vec<f64> = (0..count.max(1)).map(|k| k as f64 * args.lambda_step).collect();
        return Ok(framekit_core::exponential_system(&spectrum, &lambdas)?);
    }
    let n = args
        .gabor
        .ok_or_else(|| fail(2, "one of --gabor, --random, --exponential is required"))?;
    let index_set = match &args.lattice {
        Some(s) => {
            let (a, b) = parse_pair::<usize>(s, "--lattice")?;
            lattice_index_set(n, a, b)?
        }
        None => framekit_core::full_index_set(n),
    };
    let window = match args.window.as_str() {
        "gaussian" => framekit_core::periodized_gaussian(n)?,
        "random" => random_unit_window(args.seed, n),
        other => return Err(fail(2, format!("unknown window kind {other}"))),
    };
    Ok(gabor_system(&GaborSpec::new(n, window, index_set)?)?)
}

#[derive(Serialize)]
struct BenchConfig {
    trials: u32,
    dim: usize,
    cells: usize,
    cell_size: usize,
    strategy: String,
    budget: u128,
    restarts: u32,
    seed: u64,
}

#[derive(Serialize)]
struct BenchTrial {
    seed: u64,
    result: SelectorOut,
}

#[derive(Serialize)]
struct BenchOut {
    trials: Vec<BenchTrial>,
    all_certified: bool,
    worst_achieved: f64,
}

#[derive(Serialize)]
struct LocalizationRowOut {
    probe_index: usize,
    radius: f64,
    tail_energy: f64,
}

#[derive(Serialize)]
struct VerifyOut {
    frd: FrdOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    near_critical: Option<NearCriticalOut>,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct SimpleConfig<'a> {
    command: &'a str,
    input: Option<&'a str>,
    radii: Option<&'a str>,
    seed: u64,
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen(args) => {
            let f = gen_system(&args)?;
            save_system(&f, &args.out)?;
            eprintln!("wrote {} vectors to {}", f.len(), args.out.display());
            Ok(())
        }
        Command::Bounds { input, output } => {
            let f = load_system(&input)?;
            let b = frame_bounds(&f)?;
            let config = simple_config("bounds", Some(&input), None, output.seed);
            println!("A = {:?}  B = {:?}  rank = {}", b.lower, b.upper, b.rank);
            emit(BoundsOut::from(&b), output.seed, 1.0, &config, &output.out)
        }
        Command::Density { input, windows, output } => {
            let f = load_system(&input)?;
            let w = windows_for(&f, &windows)?;
            let d = beurling_density(f.index_points(), f.geometry(), &w)?;
            write_csv(&output.csv, report::density_csv(&d))?;
            let config = simple_config("density", Some(&input), windows.radii.as_deref(), output.seed);
            emit(DensityOut::from(&d), output.seed, 1.0, &config, &output.out)
        }
        Command::Measure { input, windows, output } => {
            let f = load_system(&input)?;
            let w = windows_for(&f, &windows)?;
            let m = frame_measure(&f, &w)?;
            write_csv(&output.csv, report::measure_csv(&m))?;
            let config = simple_config("measure", Some(&input), windows.radii.as_deref(), output.seed);
            emit(MeasureOut::from(&m), output.seed, 1.0, &config, &output.out)
        }
        Command::Verify { input, windows, tolerance, near_critical_alpha, output } => {
            let f = load_system(&input)?;
            let w = windows_for(&f, &windows)?;
            let frd = framekit_core::verify_frd(&f, &w)?;
            write_csv(&output.csv, report::frd_csv(&frd))?;
            let near = match near_critical_alpha {
                Some(alpha) => {
                    Some(NearCriticalOut::from(&check_near_critical_lemma(&f, alpha, &w, 0.1)?))
                }
                None => None,
            };
            let passed =
                frd.max_deviation <= tolerance && near.as_ref().map_or(true, |n| n.holds);
            let out = VerifyOut { frd: FrdOut::from(&frd), near_critical: near, tolerance, passed };
            let config = simple_config("verify", Some(&input), windows.radii.as_deref(), output.seed);
            emit(out, output.seed, 1.0, &config, &output.out)?;
            if !passed {
                return Err(fail(5, "identity deviates beyond tolerance"));
            }
            Ok(())
        }
        Command::Thin {
            input,
            epsilon,
            r_override,
            strategy,
            budget,
            restarts,
            density_radius,
            max_iterations,
            output,
        } => {
            let f = load_system(&input)?;
            let radius = density_radius.unwrap_or_else(|| f.geometry().diameter() + 0.6);
            let mut config = ThinningConfig::new(epsilon, radius)?;
            config.r_override = r_override;
            config.selector_strategy = strategy.into();
            config.selector_budget = budget;
            config.selector_restarts = restarts;
            config.max_iterations = max_iterations;
            config.seed = output.seed;
            let config_out = ThinningConfigOut::from(&config);
            match thin_to_density(&f, &config) {
                Ok(trace) => {
                    write_csv(&output.csv, report::trace_csv(&trace))?;
                    emit(TraceOut::from(&trace), output.seed, epsilon, &config_out, &output.out)
                }
                Err(ThinningError::Partial(trace)) => {
                    write_csv(&output.csv, report::trace_csv(&trace))?;
                    emit(TraceOut::from(&trace), output.seed, epsilon, &config_out, &output.out)?;
                    Err(fail(4, "thinning hit the iteration cap before reaching the target"))
                }
                Err(ThinningError::Frame(e)) => Err(e.into()),
            }
        }
        Command::SelectorBench {
            trials,
            dim,
            cells,
            cell_size,
            strategy,
            budget,
            restarts,
            output,
        } => {
            let strategy: Strategy = strategy.into();
            let count = cells * cell_size;
            let partition = CellPartition::new(
                (0..cells).map(|k| (k * cell_size..(k + 1) * cell_size).collect()).collect(),
            )?;
            let mut rows = Vec::with_capacity(trials as usize);
            let mut all_certified = true;
            let mut worst: f64 = 0.0;
            for t in 0..trials {
                let seed = output.seed.wrapping_add(t as u64);
                let f = random_parseval(seed, dim, count);
                let opts = SelectorOptions { budget, restarts, seed };
                let res = find_selector(&f, &partition, strategy, &opts)?;
                verify_selector_bound(&f, &partition, &res)?;
                all_certified &= res.certified;
                worst = worst.max(res.achieved_bessel);
                rows.push(BenchTrial { seed, result: SelectorOut::from(&res) });
            }
            let config = BenchConfig {
                trials,
                dim,
                cells,
                cell_size,
                strategy: format!("{strategy:?}"),
                budget,
                restarts,
                seed: output.seed,
            };
            let out = BenchOut { trials: rows, all_certified, worst_achieved: worst };
            emit(out, output.seed, 1.0, &config, &output.out)?;
            if !all_certified {
                return Err(fail(5, "a trial exceeded the certified bound"));
            }
            Ok(())
        }
        Command::Localization { input, probes, radii, output } => {
            let f = load_system(&input)?;
            let probe_idx: Vec<usize> = parse_list(&probes, "probes")?;
            let radii: Vec<f64> = parse_list(&radii, "radii")?;
            let probe_sys = f.subset(&probe_idx)?;
            let rows = localization_profile(&f, &probe_sys, &radii)?;
            let out_rows: Vec<LocalizationRowOut> = rows
                .iter()
                .map(|r| LocalizationRowOut {
                    probe_index: probe_idx[r.probe_index],
                    radius: r.radius,
                    tail_energy: r.tail_energy,
                })
                .collect();
            let config = simple_config("localization", Some(&input), None, output.seed);
            emit(out_rows, output.seed, 1.0, &config, &output.out)
        }
    }
}

fn simple_config<'a>(
    command: &'a str,
    input: Option<&'a Path>,
    radii: Option<&'a str>,
    seed: u64,
) -> SimpleConfig<'a> {
    SimpleConfig {
        command,
        input: input.and_then(|p| p.to_str()),
        radii,
        seed,
    }
}
