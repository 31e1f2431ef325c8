//! Command-line front end: curve generation, closed-form vs numeric
//! verification, Monte-Carlo outage sweeps and rate-region computation.

use clap::{Args, Parser, Subcommand};
use dmt_core::closed_form::{
    self, BoundId, ClosedFormError,
};
use dmt_core::curve::PiecewiseCurve;
use dmt_core::sim::{
    achievable_region, constant_gap, estimate_outage, upper_region, AntennaProfile,
    ChannelRealization, ScalingProfile, SlopeFit,
};
use dmt_core::solver::{d_o5_numeric, d_ptp_numeric, normalization_check, GridSpec};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_UNSUPPORTED: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_INPUT: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<ClosedFormError> for Failure {
    fn from(e: ClosedFormError) -> Self {
        let code = match e {
            ClosedFormError::OddNUnsupported { .. } => EXIT_UNSUPPORTED,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(format!("io error: {e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "icdmt",
    about = "Diversity-multiplexing tradeoff curves, verification and Monte-Carlo \
             simulation for the 2-user MIMO interference channel",
    version
)]
struct Cli {
    /// Output directory for generated files
    #[arg(long, global = true, env = "ICDMT_OUT_DIR", default_value = ".")]
    out: PathBuf,
    /// Output format for curve and region files
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Worker-thread cap for Monte-Carlo runs (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate closed-form diversity curves or single points
    Dmt(DmtArgs),
    /// Cross-check closed forms against independent computations
    Verify {
        #[command(subcommand)]
        check: VerifyCheck,
    },
    /// Monte-Carlo outage sweep with diversity-slope fit
    Simulate(SimulateArgs),
    /// Upper and achievable rate regions of one channel realization
    Region(RegionArgs),
}

#[derive(Args)]
struct DmtArgs {
    /// Antennas per node of the symmetric channel
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Cross-link scaling exponent; accepts decimals or fractions like 1/3
    #[arg(long, default_value = "1", value_parser = parse_alpha)]
    alpha: f64,
    /// Comma-separated curves: all, 1-7, optimal, alpha1, mac, nocsit-asym
    #[arg(long, default_value = "all")]
    bound: String,
    /// Rate grid as start:stop:step (curve mode)
    #[arg(long)]
    r_sum_grid: Option<Grid>,
    /// Multiplexing gain of user 1 (point mode)
    #[arg(long)]
    r1: Option<f64>,
    /// Multiplexing gain of user 2 (point mode; defaults to r1)
    #[arg(long)]
    r2: Option<f64>,
    /// Interpret the grid value as the per-user rate of a symmetric pair
    #[arg(long)]
    symmetric_rate: bool,
    /// Transmit antennas per user for the asymmetric no-CSIT curve
    #[arg(long)]
    m: Option<usize>,
    /// Receive antennas at node 1 for the asymmetric no-CSIT curve
    #[arg(long)]
    n1: Option<usize>,
    /// Receive antennas at node 2 for the asymmetric no-CSIT curve
    #[arg(long)]
    n2: Option<usize>,
}

#[derive(Subcommand)]
enum VerifyCheck {
    /// Breakpoint continuity and support-endpoint checks of the closed forms
    Continuity {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Comma-separated exponents to test
        #[arg(long, default_value = "0.25,0.5,1,1.5")]
        alpha_set: AlphaSet,
        #[arg(long, default_value_t = 600)]
        timeout_secs: u64,
    },
    /// Closed form vs grid-search minimizer, reported with the resolution
    /// certificate
    Oracle {
        /// 1 for the single-user curve, 5 for the sum-rate bound
        #[arg(long, default_value_t = 5)]
        bound: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "1", value_parser = parse_alpha)]
        alpha: f64,
        /// Final grid step after refinement
        #[arg(long, default_value_t = 0.02)]
        step: f64,
        #[arg(long, default_value_t = 600)]
        timeout_secs: u64,
    },
    /// Reports the unconstrained minimum of the joint exponent (expected 0
    /// at alpha = 0; negative values flag the documented normalization
    /// anomaly)
    Normalization {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "1", value_parser = parse_alpha)]
        alpha: f64,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value = "1", value_parser = parse_alpha)]
    alpha: f64,
    /// Bound index 1-7
    #[arg(long)]
    bound: usize,
    #[arg(long, default_value_t = 0.0)]
    r1: f64,
    #[arg(long, default_value_t = 0.0)]
    r2: f64,
    /// SNR sweep in dB as start:stop:step
    #[arg(long, default_value = "20:40:5")]
    snr_db: Grid,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RegionArgs {
    /// Channel realization file (JSON)
    #[arg(long)]
    channel: PathBuf,
    /// Nominal SNR in dB
    #[arg(long, default_value_t = 0.0)]
    rho_db: f64,
    #[arg(long, default_value = "1", value_parser = parse_alpha)]
    alpha: f64,
}

/// Accepts decimals and simple fractions ("1/3").
fn parse_alpha(s: &str) -> Result<f64, String> {
    let v = if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| format!("bad fraction: {s}"))?;
        let den: f64 = den.trim().parse().map_err(|_| format!("bad fraction: {s}"))?;
        if den == 0.0 {
            return Err("fraction denominator is zero".into());
        }
        num / den
    } else {
        s.trim().parse().map_err(|_| format!("bad number: {s}"))?
    };
    if !v.is_finite() || v < 0.0 {
        return Err(format!("exponent must be nonnegative and finite, got {s}"));
    }
    Ok(v)
}

#[derive(Clone, Debug)]
struct AlphaSet(Vec<f64>);

impl std::str::FromStr for AlphaSet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',').map(parse_alpha).collect::<Result<_, _>>().map(AlphaSet)
    }
}

/// Inclusive uniform grid described by "start:stop:step".
#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

impl std::str::FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_range(s).map(Grid)
    }
}

/// "start:stop:step" to the inclusive grid it describes.
fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:step, got {s}"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse().map_err(|_| format!("bad number in range: {p}")))
        .collect::<Result<_, String>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || stop < start {
        return Err(format!("range must have stop >= start and step > 0, got {s}"));
    }
    let count = ((stop - start) / step).round() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|i| start + i as f64 * step).collect();
    if let Some(last) = grid.last_mut() {
        if (*last - stop).abs() < step * 1e-9 {
            *last = stop;
        }
    }
    Ok(grid)
}

fn main() -> ExitCode {
    // flag parse errors are input errors under the exit-code contract;
    // help/version are not errors
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.exit_code() == 0 => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    if let Some(t) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized; --threads ignored");
        }
    }
    let result = match &cli.command {
        Command::Dmt(args) => cmd_dmt(&cli, args),
        Command::Verify { check } => cmd_verify(check),
        Command::Simulate(args) => cmd_simulate(&cli, args),
        Command::Region(args) => cmd_region(&cli, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// A named diversity curve: rate argument to diversity order.
struct CurveSpec {
    label: String,
    f: Box<dyn Fn(f64) -> Result<f64, ClosedFormError>>,
}

fn curve_specs(args: &DmtArgs) -> Result<Vec<CurveSpec>, Failure> {
    let n = args.n;
    let alpha = args.alpha;
    if n == 0 {
        return Err(Failure::input("--n must be at least 1"));
    }
    let mut specs = Vec::new();
    for token in args.bound.split(',') {
        let token = token.trim();
        match token {
            "all" => {
                for k in 1..=7usize {
                    specs.push(bound_curve(n, alpha, k));
                }
            }
            "1" | "2" | "3" | "4" | "5" | "6" | "7" => {
                specs.push(bound_curve(n, alpha, token.parse().unwrap()));
            }
            "optimal" => {
                let half = !args.symmetric_rate;
                specs.push(CurveSpec {
                    label: "optimal".into(),
                    f: Box::new(move |r| {
                        let (r1, r2) = if half { (r / 2.0, r / 2.0) } else { (r, r) };
                        closed_form::d_ic_optimal(n, alpha, r1, r2)
                    }),
                });
            }
            "alpha1" => {
                let half = !args.symmetric_rate;
                specs.push(CurveSpec {
                    label: "alpha1".into(),
                    f: Box::new(move |r| {
                        let (r1, r2) = if half { (r / 2.0, r / 2.0) } else { (r, r) };
                        Ok(closed_form::d_ic_alpha1(n, r1, r2))
                    }),
                });
            }
            "mac" => specs.push(CurveSpec {
                label: "mac".into(),
                f: Box::new(move |r| closed_form::d_mac(n, alpha, r)),
            }),
            "nocsit-asym" => {
                let (m, n1, n2) = match (args.m, args.n1, args.n2) {
                    (Some(m), Some(n1), Some(n2)) => (m, n1, n2),
                    _ => {
                        return Err(Failure::input(
                            "nocsit-asym requires --m, --n1 and --n2",
                        ))
                    }
                };
                specs.push(CurveSpec {
                    label: "nocsit-asym".into(),
                    f: Box::new(move |r| {
                        closed_form::d_ic_nocsit_asym(m, n1, n2, alpha, r, r)
                    }),
                });
            }
            other => return Err(Failure::input(format!("unknown bound: {other}"))),
        }
    }
    Ok(specs)
}

/// Bounds 1 and 2 are single-user curves in the per-user rate; 3-5 are
/// functions of the rate sum; 6 and 7 of the weighted sums 2r1+r2 and
/// r1+2r2. In curve mode the grid value is fed to each curve as its own
/// rate argument.
fn bound_curve(n: usize, alpha: f64, k: usize) -> CurveSpec {
    let f: Box<dyn Fn(f64) -> Result<f64, ClosedFormError>> = match k {
        1 | 2 => Box::new(move |r| Ok(closed_form::d_o_single(n, r))),
        3 | 4 => Box::new(move |r| Ok(closed_form::d_o3(n, alpha, r))),
        5 => Box::new(move |r| Ok(closed_form::d_o5(n, alpha, r))),
        6 => Box::new(move |r| closed_form::d_o6(n, alpha, r)),
        _ => Box::new(move |r| closed_form::d_o7(n, alpha, r)),
    };
    CurveSpec {
        label: format!("b{k}"),
        f,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
    std::fs::write(path, contents)?;
    Ok(())
}

fn curve_to_string(curve: &PiecewiseCurve, format: &str) -> String {
    if format == "json" {
        let pts: Vec<[f64; 2]> = curve.breakpoints().iter().map(|&(r, d)| [r, d]).collect();
        serde_json::to_string_pretty(&pts).expect("serializable")
    } else {
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii csv")
    }
}

fn cmd_dmt(cli: &Cli, args: &DmtArgs) -> Result<u8, Failure> {
    let specs = curve_specs(args)?;
    if let Some(r1) = args.r1 {
        let r2 = args.r2.unwrap_or(r1);
        for spec in &specs {
            let value = match spec.label.as_str() {
                "optimal" => closed_form::d_ic_optimal(args.n, args.alpha, r1, r2)?,
                "alpha1" => closed_form::d_ic_alpha1(args.n, r1, r2),
                "nocsit-asym" => {
                    let (m, n1, n2) = (args.m.unwrap(), args.n1.unwrap(), args.n2.unwrap());
                    closed_form::d_ic_nocsit_asym(m, n1, n2, args.alpha, r1, r2)?
                }
                _ => {
                    // per-bound value at the rate pair via its coefficients
                    let k: usize = spec.label[1..].parse().unwrap();
                    let (a1, a2) = BoundId::from_index(k).unwrap().rate_coefficients();
                    (spec.f)(a1 as f64 * r1 + a2 as f64 * r2)?
                }
            };
            println!("{} {}", spec.label, value);
        }
        return Ok(0);
    }
    let Grid(grid) = args
        .r_sum_grid
        .clone()
        .ok_or_else(|| Failure::input("curve mode needs --r-sum-grid (or use --r1/--r2)"))?;
    let step = if grid.len() > 1 { grid[1] - grid[0] } else { 1.0 };
    let r_max = *grid.last().unwrap();
    for spec in &specs {
        let mut samples = Vec::with_capacity(grid.len());
        for &r in &grid {
            samples.push((r, (spec.f)(r)?));
        }
        let curve = PiecewiseCurve::from_samples(
            |r| {
                let idx = ((r - grid[0]) / step).round() as usize;
                samples[idx.min(samples.len() - 1)].1
            },
            r_max,
            step,
        )
        .map_err(|e| Failure::input(format!("curve construction failed: {e}")))?;
        let ext = if cli.format == "json" { "json" } else { "csv" };
        let path = cli.out.join(format!("dmt_{}.{ext}", spec.label));
        write_file(&path, &curve_to_string(&curve, &cli.format))?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

/// Largest plausible curve slope, used to bound the allowed jump between
/// adjacent scan samples.
fn slope_cap(n: usize, alpha: f64) -> f64 {
    50.0 * (n * n) as f64 * (1.0 + alpha)
}

fn cmd_verify(check: &VerifyCheck) -> Result<u8, Failure> {
    match check {
        VerifyCheck::Continuity {
            n,
            alpha_set,
            timeout_secs,
        } => verify_continuity(*n, &alpha_set.0, *timeout_secs),
        VerifyCheck::Oracle {
            bound,
            n,
            alpha,
            step,
            timeout_secs,
        } => verify_oracle(*bound, *n, *alpha, *step, *timeout_secs),
        VerifyCheck::Normalization { n, alpha } => {
            let result = normalization_check(*n, *alpha, &GridSpec::for_alpha(*alpha));
            println!(
                "normalization n={n} alpha={alpha}: min = {}, argmin = {:?}",
                result.value, result.argmin
            );
            if result.value < -1e-9 {
                println!(
                    "note: negative minimum; the conditional density is an exponent \
                     approximation and is not normalized outside the typical region"
                );
            }
            Ok(0)
        }
    }
}

fn verify_continuity(n: usize, alpha_set: &[f64], timeout_secs: u64) -> Result<u8, Failure> {
    let start = Instant::now();
    let h = 1e-5;
    let mut failures = 0u32;
    for &alpha in alpha_set {
        if start.elapsed().as_secs() >= timeout_secs {
            return Err(Failure {
                code: EXIT_TIMEOUT,
                message: "continuity verification exceeded the timeout guard".into(),
            });
        }
        let cap = slope_cap(n, alpha) * h;
        let curves: Vec<(String, Box<dyn Fn(f64) -> Result<f64, ClosedFormError>>)> = vec![
            ("b1".into(), Box::new(move |r| Ok(closed_form::d_o_single(n, r)))),
            ("b3".into(), Box::new(move |r| Ok(closed_form::d_o3(n, alpha, r)))),
            ("b5".into(), Box::new(move |r| Ok(closed_form::d_o5(n, alpha, r)))),
            ("b6".into(), Box::new(move |r| closed_form::d_o6(n, alpha, r))),
        ];
        for (label, f) in curves {
            if label == "b6" && n % 2 != 0 && alpha < 1.0 {
                println!("skip {label} n={n} alpha={alpha}: no closed form");
                continue;
            }
            let r_max = 4.0 * n as f64 * (1.0 + alpha);
            let mut max_jump = 0.0f64;
            let mut prev = f(0.0)?;
            let mut r = h;
            while r <= r_max {
                let v = f(r)?;
                max_jump = max_jump.max((v - prev).abs());
                prev = v;
                r += h;
            }
            let endpoint = f(r_max)?;
            let ok = max_jump <= cap && endpoint.abs() <= 1e-9;
            println!(
                "{} {label} n={n} alpha={alpha}: max step jump {max_jump:.3e} (cap {cap:.3e}), \
                 endpoint {endpoint:.3e}",
                if ok { "pass" } else { "FAIL" }
            );
            if !ok {
                failures += 1;
            }
        }
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn verify_oracle(
    bound: usize,
    n: usize,
    alpha: f64,
    step: f64,
    timeout_secs: u64,
) -> Result<u8, Failure> {
    let start = Instant::now();
    let rounds = (0.32f64 / step).log2().round().max(0.0) as u32;
    let grid = GridSpec {
        step: 0.32,
        upper_bound: alpha.max(1.0) + 1.0,
        refinement_rounds: rounds,
    };
    let mut max_dev = 0.0f64;
    let mut gap = 0.0f64;
    let mut r = 0.0;
    let r_max = match bound {
        1 => n as f64,
        5 => 2.0 * n as f64 * alpha.max(1.0),
        other => {
            return Err(Failure::input(format!(
                "oracle verification covers bounds 1 and 5, got {other}"
            )))
        }
    };
    while r <= r_max + 1e-9 {
        if start.elapsed().as_secs() >= timeout_secs {
            return Err(Failure {
                code: EXIT_TIMEOUT,
                message: "oracle verification exceeded the timeout guard".into(),
            });
        }
        let (closed, numeric) = match bound {
            1 => (
                closed_form::d_o_single(n, r),
                d_ptp_numeric(n, n, r, &grid),
            ),
            _ => (
                closed_form::d_o5(n, alpha, r),
                d_o5_numeric(n, alpha, r, &grid, true),
            ),
        };
        max_dev = max_dev.max((closed - numeric.value).abs());
        gap = numeric.certificate_gap.max(gap);
        r += 0.1;
    }
    let ok = max_dev <= gap;
    println!(
        "{} oracle b{bound} n={n} alpha={alpha}: max |closed - numeric| = {max_dev:.6} \
         (certificate {gap:.6})",
        if ok { "pass" } else { "FAIL" }
    );
    Ok(if ok { 0 } else { 1 })
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<u8, Failure> {
    let id = BoundId::from_index(args.bound)
        .ok_or_else(|| Failure::input(format!("bound index must be 1-7, got {}", args.bound)))?;
    let profile = AntennaProfile::symmetric(args.n)
        .map_err(|e| Failure::input(e.to_string()))?;
    let scaling = ScalingProfile::new(args.alpha, args.snr_db.0.clone())
        .map_err(|e| Failure::input(e.to_string()))?;
    let estimate = estimate_outage(
        &profile, &scaling, id, args.r1, args.r2, args.trials, args.seed,
    )
    .map_err(|e| Failure::input(e.to_string()))?;

    let analytic = analytic_reference(args.n, args.alpha, id, args.r1, args.r2);
    match analytic {
        Ok(d) => println!("analytic diversity order: {d}"),
        Err(e) => println!("analytic diversity order unavailable: {e}"),
    }
    match &estimate.slope {
        SlopeFit::Fitted { slope, std_err } => {
            println!("fitted slope: {slope} (std err {std_err})")
        }
        SlopeFit::Unresolved { reason } => println!("warning: slope unresolved: {reason}"),
    }

    let csv_path = cli.out.join(format!("outage_b{}.csv", args.bound));
    let mut buf = Vec::new();
    estimate.write_csv(&mut buf)?;
    write_file(&csv_path, &String::from_utf8(buf).expect("ascii csv"))?;
    let slope_path = cli.out.join(format!("outage_b{}_slope.json", args.bound));
    write_file(&slope_path, &estimate.slope_json())?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", slope_path.display());
    Ok(0)
}

fn analytic_reference(
    n: usize,
    alpha: f64,
    id: BoundId,
    r1: f64,
    r2: f64,
) -> Result<f64, ClosedFormError> {
    match id {
        BoundId::B1 => Ok(closed_form::d_o_single(n, r1)),
        BoundId::B2 => Ok(closed_form::d_o_single(n, r2)),
        BoundId::B3 | BoundId::B4 => Ok(closed_form::d_o3(n, alpha, r1 + r2)),
        BoundId::B5 => Ok(closed_form::d_o5(n, alpha, r1 + r2)),
        BoundId::B6 => closed_form::d_o6(n, alpha, 2.0 * r1 + r2),
        BoundId::B7 => closed_form::d_o7(n, alpha, r1 + 2.0 * r2),
    }
}

fn cmd_region(cli: &Cli, args: &RegionArgs) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(&args.channel)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", args.channel.display())))?;
    let channel = ChannelRealization::from_json(&text)
        .map_err(|e| Failure::input(format!("channel file: {e}")))?;
    let rho = 10f64.powf(args.rho_db / 10.0);
    let upper = upper_region(&channel, rho, args.alpha)
        .map_err(|e| Failure::input(e.to_string()))?;
    let achievable = achievable_region(&channel, rho, args.alpha)
        .map_err(|e| Failure::input(e.to_string()))?;

    let mut csv = String::from("bound,a1,a2,upper_rhs,achievable_rhs,gap\n");
    for (i, id) in BoundId::ALL.iter().enumerate() {
        let gap = constant_gap(&channel.profile, *id);
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            id.index(),
            upper[i].a1,
            upper[i].a2,
            upper[i].rhs,
            achievable[i].rhs,
            gap
        )
        .expect("in-memory write");
    }
    let path = cli.out.join("region.csv");
    write_file(&path, &csv)?;
    print!("{csv}");
    println!("wrote {}", path.display());
    Ok(0)
}
