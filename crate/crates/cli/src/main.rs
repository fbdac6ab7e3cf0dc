mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use stokes_spectra::ball_spectrum::{a_squared, lambda1_ball};
use stokes_spectra::buckling_oracle::{solve_buckling, MpsConfig, StarDomain, DEFAULT_SEED};
use stokes_spectra::disk_spectrum::{c1, lambda1_disk};
use stokes_spectra::poly3::Poly3;
use stokes_spectra::semidiff_3d::{nonoptimality_certificate, semidiff_f, SpherePerturbation};
use stokes_spectra::shape_deriv_2d::{
    d1_f, d1_lambda, d2_f, gamma, hessian_weight, stream_coefficients, BoundaryPerturbation2D,
    GAMMA_MAX,
};
use stokes_spectra::specfun::{j11, omega};
use stokes_spectra::validation::{run_suite, Suite, ValidationConfig};
use stokes_spectra::Error;

use output::{emit, fmt_num, num, Payload};

const MAX_CUSTOM_DEGREE: u32 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "stokes-spectra",
    version,
    about = "Dirichlet-Stokes eigenvalues of the disk and ball and their shape derivatives"
)]
struct Cli {
    /// Write the result here (atomically) plus `<OUT>.manifest.json`;
    /// stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Root constants and first eigenvalues.
    Constants,
    /// CSV of gamma_n and the Hessian mode weights.
    GammaTable(GammaArgs),
    /// First shape derivatives of lambda_1 and F at the disk.
    D1lambda(FourierArgs),
    /// Second shape derivative of F at the disk.
    D2f(FourierArgs),
    /// Coefficients of the stream-function derivative.
    StreamCoeffs(FourierArgs),
    /// Semi-differential of F at the ball.
    Semidiff(SemidiffArgs),
    /// The yz witness that the ball does not minimize F.
    CertifyNonoptimality,
    /// First buckling eigenvalue of r < 1 + t phi(theta).
    SolveBuckling(BucklingArgs),
    /// Run validation suites; exit code 1 if any check fails.
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Serialize)]
struct GammaArgs {
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..=GAMMA_MAX as u64))]
    n_max: u64,
}

fn parse_mode(s: &str) -> Result<(usize, f64), String> {
    let (n, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected n=VALUE, got '{s}'"))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| format!("bad mode index '{n}'"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("bad coefficient '{v}'"))?;
    if !v.is_finite() {
        return Err(format!("coefficient '{v}' is not finite"));
    }
    Ok((n, v))
}

#[derive(Debug, Args, Serialize)]
struct FourierArgs {
    /// Cosine coefficient `n=VALUE`; repeatable.
    #[arg(long = "cos", value_name = "N=VALUE", value_parser = parse_mode)]
    cos: Vec<(usize, f64)>,
    /// Sine coefficient `n=VALUE`; repeatable.
    #[arg(long = "sin", value_name = "N=VALUE", value_parser = parse_mode)]
    sin: Vec<(usize, f64)>,
}

impl FourierArgs {
    fn perturbation(&self) -> Result<BoundaryPerturbation2D, Error> {
        BoundaryPerturbation2D::from_modes(&self.cos, &self.sin)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Preset {
    Yz,
    Xy,
    Xz,
    One,
    X,
    Custom,
}

#[derive(Debug, Args, Serialize)]
struct SemidiffArgs {
    #[arg(long, value_enum)]
    phi: Preset,
    /// Polynomial for `--phi custom`, e.g. `y*z - 0.5*x^2`; degree <= 6.
    #[arg(long, required_if_eq("phi", "custom"))]
    poly: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct MpsArgs {
    #[arg(long, default_value_t = 24)]
    n_modes: usize,
    /// Boundary collocation points; default 8 * n_modes.
    #[arg(long)]
    m_boundary: Option<usize>,
    /// Interior normalization points; default 2 * n_modes.
    #[arg(long)]
    m_interior: Option<usize>,
    #[arg(long, env = "STOKES_SPECTRA_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 8.0)]
    lambda_lo: f64,
    #[arg(long, default_value_t = 30.0)]
    lambda_hi: f64,
    #[arg(long, default_value_t = 0.25)]
    scan_step: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl MpsArgs {
    fn config(&self) -> MpsConfig {
        let mut cfg = MpsConfig::with_modes(self.n_modes);
        if let Some(m) = self.m_boundary {
            cfg.m_boundary = m;
        }
        if let Some(m) = self.m_interior {
            cfg.m_interior = m;
        }
        cfg.seed = self.seed;
        cfg.lambda_lo = self.lambda_lo;
        cfg.lambda_hi = self.lambda_hi;
        cfg.scan_step = self.scan_step;
        cfg.tol = self.tol;
        cfg
    }
}

#[derive(Debug, Args, Serialize)]
struct BucklingArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    #[command(flatten)]
    phi: FourierArgs,
    #[command(flatten)]
    mps: MpsArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TestKind {
    Fd1,
    Fd2,
    #[value(name = "eigenid-2d")]
    Eigenid2d,
    #[value(name = "eigenid-3d")]
    Eigenid3d,
    All,
}

#[derive(Debug, Args, Serialize)]
struct ValidateArgs {
    #[arg(long, value_enum)]
    test: TestKind,
    /// Coarse FD step; the fine step is h / 2.
    #[arg(long, default_value_t = 0.02)]
    h: f64,
    /// Seed for random perturbations and sample points.
    #[arg(long, default_value_t = 2024)]
    sample_seed: u64,
    #[arg(long, default_value_t = 1e-2)]
    fd2_rtol: f64,
    #[arg(long, default_value_t = 1e-5)]
    fd1_dilation_rtol: f64,
    #[arg(long, default_value_t = 1e-4)]
    fd1_mixed_rtol: f64,
    #[command(flatten)]
    mps: MpsArgs,
}

enum Failure {
    /// Bad input: exit 2.
    Usage(Error),
    /// Computation failed or a check did not pass: exit 1.
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoEigenvalueInBracket { .. }
            | Error::IllConditioned(_)
            | Error::Certificate { .. }
            | Error::Degenerate(_) => Failure::Run(report::error(&e).to_string()),
            other => Failure::Usage(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(json!({"error": {"code": "IO_ERROR", "message": e.to_string()}}).to_string())
    }
}

fn constants() -> Payload {
    let w = omega();
    Payload::Json(json!({
        "j11": num(j11()),
        "lambda1_disk": num(lambda1_disk()),
        "omega": num(w),
        "lambda1_ball": num(lambda1_ball()),
        "a_squared": num(a_squared()),
        "sin_omega": num(w.sin()),
        "c1": num(c1()),
    }))
}

fn gamma_table(n_max: usize) -> Result<Payload, Error> {
    let k2 = j11() * j11();
    let mut csv = String::from("n,gamma_n,asymptotic_ratio,hessian_mode,coercivity_ratio\n");
    for n in 2..=n_max {
        let g = gamma(n)?;
        let h = hessian_weight(n)?;
        let row = [g, g * k2 / (2.0 * (n as f64 + 1.0)), h, h / n as f64].map(fmt_num);
        csv.push_str(&format!("{n},{}\n", row.join(",")));
    }
    Ok(Payload::Csv(csv))
}

fn sphere_perturbation(args: &SemidiffArgs) -> Result<SpherePerturbation, Error> {
    let name = match args.phi {
        Preset::Yz => "yz",
        Preset::Xy => "xy",
        Preset::Xz => "xz",
        Preset::One => "one",
        Preset::X => "x",
        Preset::Custom => {
            let src = args.poly.as_deref().unwrap_or_default();
            let p = Poly3::parse(src)?;
            if p.degree() > MAX_CUSTOM_DEGREE {
                return Err(Error::Parse(format!(
                    "degree {} exceeds {MAX_CUSTOM_DEGREE}",
                    p.degree()
                )));
            }
            return Ok(SpherePerturbation::Polynomial(p));
        }
    };
    SpherePerturbation::preset(name)
}

fn suites_for(test: TestKind) -> Vec<Suite> {
    match test {
        TestKind::Fd1 => vec![Suite::GradientFd],
        TestKind::Fd2 => vec![Suite::HessianFd],
        TestKind::Eigenid2d => vec![Suite::EigenId2d],
        TestKind::Eigenid3d => vec![Suite::EigenId3d],
        TestKind::All => Suite::ALL.to_vec(),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Constants => emit(constants(), out, "constants", &json!({}))?,
        Command::GammaTable(a) => emit(gamma_table(a.n_max as usize)?, out, "gamma-table", a)?,
        Command::D1lambda(a) => {
            let phi = a.perturbation()?;
            let v = json!({
                "alpha_0": num(phi.alpha(0)),
                "d1_lambda": num(d1_lambda(&phi)),
                "d1_f": num(d1_f(&phi)),
            });
            emit(Payload::Json(v), out, "d1lambda", a)?
        }
        Command::D2f(a) => {
            let r = d2_f(&a.perturbation()?)?;
            emit(Payload::Json(report::hessian(&r)), out, "d2f", a)?
        }
        Command::StreamCoeffs(a) => {
            let c = stream_coefficients(&a.perturbation()?)?;
            emit(Payload::Json(report::stream(&c)), out, "stream-coeffs", a)?
        }
        Command::Semidiff(a) => {
            let r = semidiff_f(&sphere_perturbation(a)?)?;
            emit(Payload::Json(report::semidiff(&r)), out, "semidiff", a)?
        }
        Command::CertifyNonoptimality => {
            let r = nonoptimality_certificate()?;
            let mut v = report::semidiff(&r);
            v["certified"] = json!(true);
            v["witness"] = json!("Phi = z e_y, phi = yz");
            emit(Payload::Json(v), out, "certify-nonoptimality", &json!({}))?
        }
        Command::SolveBuckling(a) => {
            let domain = StarDomain::new(a.phi.perturbation()?, a.t)?;
            let r = solve_buckling(&domain, &a.mps.config())?;
            emit(
                Payload::Json(report::buckling(&r, &domain)),
                out,
                "solve-buckling",
                a,
            )?
        }
        Command::Validate(a) => {
            let mps = a.mps.config();
            mps.validate()?;
            let cfg = ValidationConfig {
                mps,
                h: a.h,
                seed: a.sample_seed,
                fd2_rtol: a.fd2_rtol,
                fd1_dilation_rtol: a.fd1_dilation_rtol,
                fd1_mixed_rtol: a.fd1_mixed_rtol,
            };
            let reports: Vec<_> = suites_for(a.test)
                .into_iter()
                .map(|s| run_suite(s, &cfg))
                .collect();
            let name = TestKind::to_possible_value(&a.test)
                .map(|v| v.get_name().to_string())
                .unwrap_or_default();
            let v = report::suites(&name, &reports);
            let passed = v["passed"] == json!(true);
            emit(Payload::Json(v), out, "validate", a)?;
            if !passed {
                return Err(Failure::Run(String::new()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("{}", report::error(&e));
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(1)
        }
    }
}
