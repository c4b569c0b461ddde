//! Command-line front end: balanced-growth analytics, closed-form trajectory
//! simulation, growth-rate tables, family comparison, and first-order
//! condition verification with machine-readable pass/fail.
//!
//! Exit codes: 0 success / verified, 1 verification failure, 2 input
//! validation error, 3 constant-derivation failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lucas_uzawa::{
    bgp_summary, bgp_summary_transformed, derive_constants_sigma_beta, derive_constants_sol1,
    derive_constants_sol2, derive_constants_sol3, eval_log, growth_rates_at, residual_report,
    to_transformed, validate, FocState, ModelError, ModelParams, SolutionConstants,
    SolutionFamily, ValidatedParams,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_DERIVATION_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lucas-uzawa",
    version,
    about = "Closed-form solution families of the Lucas-Uzawa growth model with externalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the balanced-growth-path summary as JSON.
    Bgp(BgpArgs),
    /// Evaluate a closed-form family on a uniform time grid.
    Simulate(SimulateArgs),
    /// Check a closed-form trajectory against the first-order conditions.
    Verify(VerifyArgs),
    /// Tabulate analytic growth rates on a uniform time grid.
    Growth(SimulateArgs),
    /// Compare the growth rates of two families side by side.
    Compare(CompareArgs),
}

#[derive(Args)]
struct BgpArgs {
    /// JSON parameter file with keys sigma, rho, beta, gamma, pi, delta, theta.
    #[arg(long)]
    params: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON parameter file with keys sigma, rho, beta, gamma, pi, delta, theta.
    #[arg(long)]
    params: PathBuf,
    /// Solution family: General1|General2|General3|SigmaBeta1|SigmaBeta2.
    #[arg(long)]
    family: String,
    /// Initial physical capital.
    #[arg(long, default_value_t = 1.0)]
    k0: f64,
    /// Initial human capital (defaults to the value that puts z0 on the BGP).
    #[arg(long)]
    h0: Option<f64>,
    /// Last grid time.
    #[arg(long = "t-max", default_value_t = 50.0)]
    t_max: f64,
    /// Number of grid points (>= 2).
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    sim: SimulateArgs,
    /// Residual threshold for a verified trajectory.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Test hook: scale one state column, e.g. `c:1.01`. Columns:
    /// c,k,h_star,u,lambda,mu_star.
    #[arg(long, hide = true)]
    corrupt: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    /// JSON parameter file with keys sigma, rho, beta, gamma, pi, delta, theta.
    #[arg(long)]
    params: PathBuf,
    /// Solution family; pass the flag exactly twice.
    #[arg(long, num_args = 1, action = clap::ArgAction::Append)]
    family: Vec<String>,
    /// Initial physical capital.
    #[arg(long, default_value_t = 1.0)]
    k0: f64,
    /// Initial human capital (defaults to the value that puts z0 on the BGP).
    #[arg(long)]
    h0: Option<f64>,
    /// Last grid time.
    #[arg(long = "t-max", default_value_t = 50.0)]
    t_max: f64,
    /// Number of grid points (>= 2).
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID_INPUT,
            message: message.into(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        let code = match err {
            ModelError::NoRoot | ModelError::NonConvergent => EXIT_DERIVATION_FAILED,
            _ => EXIT_INVALID_INPUT,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Bgp(args) => cmd_bgp(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Growth(args) => cmd_growth(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

fn load_params(path: &Path) -> Result<ValidatedParams, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let raw: ModelParams = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("invalid parameter file: {e}")))?;
    validate(raw).map_err(|e| CliError::input(format!("invalid parameters: {e}")))
}

fn parse_family(tag: &str) -> Result<SolutionFamily, CliError> {
    SolutionFamily::from_str(tag).map_err(CliError::input)
}

/// Initial human capital that puts z0 exactly on the balanced growth path.
fn default_h0(p: &ValidatedParams, k0: f64) -> Result<f64, ModelError> {
    let bgp = bgp_summary_transformed(p)?;
    let phi = to_transformed(p).phi;
    Ok((bgp.z_bar * k0 / bgp.u_bar).powf(1.0 / phi))
}

fn derive_constants(
    p: &ValidatedParams,
    family: SolutionFamily,
    k0: f64,
    h0: Option<f64>,
) -> Result<SolutionConstants, ModelError> {
    let h0_for = |h0: Option<f64>| -> Result<f64, ModelError> {
        match h0 {
            Some(v) => Ok(v),
            None => default_h0(p, k0),
        }
    };
    match family {
        SolutionFamily::General1 => derive_constants_sol1(p, k0),
        SolutionFamily::General2 => derive_constants_sol2(p, k0, h0_for(h0)?),
        SolutionFamily::General3 => derive_constants_sol3(p, k0, h0_for(h0)?),
        SolutionFamily::SigmaBeta1 => derive_constants_sigma_beta(p, family, k0, None),
        SolutionFamily::SigmaBeta2 => {
            derive_constants_sigma_beta(p, family, k0, Some(h0_for(h0)?))
        }
    }
}

fn grid(t_max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(CliError::input("t-max must be positive"));
    }
    if steps < 2 {
        return Err(CliError::input("steps must be at least 2"));
    }
    Ok((0..steps)
        .map(|i| t_max * i as f64 / (steps - 1) as f64)
        .collect())
}

/// 17 significant digits: enough for bit-exact round trips.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: Option<&PathBuf>, payload: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, payload)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn cmd_bgp(args: BgpArgs) -> Result<u8, CliError> {
    let p = load_params(&args.params)?;
    let summary = bgp_summary(&p)?;
    let mut payload = serde_json::to_string_pretty(&summary).expect("summary serializes");
    payload.push('\n');
    emit(args.out.as_ref(), &payload)?;
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, CliError> {
    let p = load_params(&args.params)?;
    let family = parse_family(&args.family)?;
    let consts = derive_constants(&p, family, args.k0, args.h0)?;
    let ts = grid(args.t_max, args.steps)?;

    let mut points = Vec::with_capacity(ts.len());
    for &t in &ts {
        points.push(eval_log(&consts, &p, t)?.to_point(&p));
    }

    let payload = match args.format {
        Format::Csv => {
            let mut s = String::from("t,c,k,h,u,lambda,mu,h_star,mu_star,z\n");
            for pt in &points {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{}",
                    fmt17(pt.t),
                    fmt17(pt.c),
                    fmt17(pt.k),
                    fmt17(pt.h),
                    fmt17(pt.u),
                    fmt17(pt.lambda),
                    fmt17(pt.mu),
                    fmt17(pt.h_star),
                    fmt17(pt.mu_star),
                    fmt17(pt.z)
                );
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&points).expect("points serialize");
            s.push('\n');
            s
        }
    };
    emit(args.out.as_ref(), &payload)?;
    Ok(0)
}

fn parse_corruption(spec: &str) -> Result<(usize, f64), CliError> {
    let (col, factor) = spec
        .split_once(':')
        .ok_or_else(|| CliError::input("corrupt spec must look like `c:1.01`"))?;
    let idx = match col {
        "c" => 0,
        "k" => 1,
        "h_star" => 2,
        "u" => 3,
        "lambda" => 4,
        "mu_star" => 5,
        other => return Err(CliError::input(format!("unknown state column `{other}`"))),
    };
    let factor: f64 = factor
        .parse()
        .map_err(|e| CliError::input(format!("bad corruption factor: {e}")))?;
    Ok((idx, factor))
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let p = load_params(&args.sim.params)?;
    let family = parse_family(&args.sim.family)?;
    let consts = derive_constants(&p, family, args.sim.k0, args.sim.h0)?;
    let ts = grid(args.sim.t_max, args.sim.steps)?;
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CliError::input("tol must be positive"));
    }
    let corruption = args.corrupt.as_deref().map(parse_corruption).transpose()?;

    let closure = |t: f64| -> FocState {
        let pt = eval_log(&consts, &p, t)
            .expect("closed form evaluates on the verification grid")
            .to_point(&p);
        let mut y = [pt.c, pt.k, pt.h_star, pt.u, pt.lambda, pt.mu_star];
        if let Some((idx, factor)) = corruption {
            y[idx] *= factor;
        }
        FocState::from_array(y)
    };

    let report = residual_report(&closure, &p, &ts, 1e-4)?;
    let mut payload = serde_json::to_string_pretty(&report).expect("report serializes");
    payload.push('\n');
    emit(args.sim.out.as_ref(), &payload)?;

    if report.passes(args.tol) {
        Ok(0)
    } else {
        eprintln!(
            "verification failed: max residual {:.3e} (tol {:.3e}), transversality decay ok: {}",
            report.max_residual(),
            args.tol,
            report.transversality_decay_ok
        );
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_growth(args: SimulateArgs) -> Result<u8, CliError> {
    let p = load_params(&args.params)?;
    let family = parse_family(&args.family)?;
    let consts = derive_constants(&p, family, args.k0, args.h0)?;
    let ts = grid(args.t_max, args.steps)?;

    let mut rates = Vec::with_capacity(ts.len());
    for &t in &ts {
        rates.push(growth_rates_at(&consts, &p, t)?);
    }

    let payload = match args.format {
        Format::Csv => {
            let mut s = String::from("t,g_c,g_k,g_h,g_u,g_lambda,g_mu\n");
            for r in &rates {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    fmt17(r.t),
                    fmt17(r.g_c),
                    fmt17(r.g_k),
                    fmt17(r.g_h),
                    fmt17(r.g_u),
                    fmt17(r.g_lambda),
                    fmt17(r.g_mu)
                );
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rates).expect("rates serialize");
            s.push('\n');
            s
        }
    };
    emit(args.out.as_ref(), &payload)?;
    Ok(0)
}

fn cmd_compare(args: CompareArgs) -> Result<u8, CliError> {
    let p = load_params(&args.params)?;
    if args.family.len() != 2 {
        return Err(CliError::input(
            "compare needs exactly two --family flags, e.g. --family General1 --family General2",
        ));
    }
    let fam_a = parse_family(&args.family[0])?;
    let fam_b = parse_family(&args.family[1])?;
    let consts_a = derive_constants(&p, fam_a, args.k0, args.h0)?;
    let consts_b = derive_constants(&p, fam_b, args.k0, args.h0)?;
    let ts = grid(args.t_max, args.steps)?;

    let mut s = String::from(
        "t,g_c_a,g_c_b,gap_g_c,g_k_a,g_k_b,gap_g_k,g_h_a,g_h_b,gap_g_h,\
         g_u_a,g_u_b,gap_g_u,g_lambda_a,g_lambda_b,gap_g_lambda,g_mu_a,g_mu_b,gap_g_mu\n",
    );
    for &t in &ts {
        let a = growth_rates_at(&consts_a, &p, t)?;
        let b = growth_rates_at(&consts_b, &p, t)?;
        let cols = [
            (a.g_c, b.g_c),
            (a.g_k, b.g_k),
            (a.g_h, b.g_h),
            (a.g_u, b.g_u),
            (a.g_lambda, b.g_lambda),
            (a.g_mu, b.g_mu),
        ];
        let mut row = fmt17(t);
        for (x, y) in cols {
            let _ = write!(row, ",{},{},{}", fmt17(x), fmt17(y), fmt17((x - y).abs()));
        }
        row.push('\n');
        s.push_str(&row);
    }
    emit(args.out.as_ref(), &s)?;
    Ok(0)
}
