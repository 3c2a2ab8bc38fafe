//! `curvcone`: command-line access to the curvcone library.
//!
//! Operator streams are JSON lines (`{"basis":"wedge4","upper":[...21]}`),
//! trajectories are CSV. Exit codes: 0 success, 1 semantic failure, 2 input
//! error, 3 numerical abort.

mod config;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curvcone::cone::{check_report, default_l_tol, lower_bound_l, Face};
use curvcone::cutoff::{build_cutoff, theorem_variant_check, verify_cutoff, CutoffSpec};
use curvcone::decomposition::decompose;
use curvcone::flow::{integrate, TrajectoryConfig};
use curvcone::sampling::{Sampler, SamplerConfig};
use curvcone::verify::{self, Fault, Suite, VerifyConfig};
use curvcone::{ConeParams, CurvatureOperator, Error};

use config::ConfigFile;

#[derive(Debug)]
pub struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn semantic(msg: impl Into<String>) -> Self {
        Self { code: 1, msg: msg.into() }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StepUnderflow { .. }
            | Error::NonMonotone
            | Error::RetryExhausted { .. }
            | Error::Bisection(_)
            | Error::Cutoff(_) => 3,
            _ => 2,
        };
        Self { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::input(format!("i/o error: {e}"))
    }
}

type Outcome = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "curvcone", version, about = "Four-dimensional curvature operators and the eta-mu cone")]
struct Cli {
    /// `key = value` file supplying defaults for flags
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the main output to PATH instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// JSON-lines operator file; stdin when omitted or `-`
    input: Option<PathBuf>,
}

#[derive(Args)]
struct ConeFlags {
    /// Cone parameter eta [default: 1]
    #[arg(long)]
    eta: Option<f64>,
    /// Cone parameter mu [default: 2]
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Block decomposition (A, B, C and spectra) of each operator
    Decompose(Input),
    /// Cone membership report for each operator
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cone: ConeFlags,
        /// Bisection tolerance for l [default: 1e-13 max(1, |R|)]
        #[arg(long)]
        tol: Option<f64>,
        /// Exit 1 unless every operator is a member
        #[arg(long)]
        require_member: bool,
    },
    /// The lower-bound functional l of each operator
    L {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cone: ConeFlags,
        /// Bisection tolerance [default: 1e-13 max(1, |R|)]
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Integrate dR/dt = 2Q(R) from the first operator and write CSV
    Evolve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cone: ConeFlags,
        /// Initial step [default: 1e-3]
        #[arg(long)]
        dt: Option<f64>,
        /// Final time [default: 0.1]
        #[arg(long)]
        t_max: Option<f64>,
        /// Local error tolerance relative to max(1, |R|) [default: 1e-10]
        #[arg(long)]
        tol: Option<f64>,
        /// Stop once |R| reaches this [default: 1e8]
        #[arg(long)]
        blowup_norm: Option<f64>,
        /// Constant steps of size dt, no error control
        #[arg(long)]
        fixed_step: bool,
    },
    /// Draw operators as JSON lines
    Sample {
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        /// Number of operators [default: 10]
        #[arg(long)]
        samples: Option<usize>,
        /// [default: $CURVCONE_SEED or 0]
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        cone: ConeFlags,
        /// Interior margin for members [default: 0.1]
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Certify a cutoff profile on a grid
    Cutoff {
        /// [default: 0.5]
        #[arg(long)]
        eps: Option<f64>,
        /// [default: 1]
        #[arg(long)]
        sigma: Option<f64>,
        /// [default: 0]
        #[arg(long)]
        r: Option<f64>,
        /// Grid points over [r - sigma, r + 2 sigma] [default: 10000]
        #[arg(long)]
        grid: Option<usize>,
        /// Also write x, phi, phi', phi'' at the grid points
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Run the property suites
    Verify {
        #[arg(long)]
        suite: Option<String>,
        /// [default: $CURVCONE_SEED or 0]
        #[arg(long)]
        seed: Option<u64>,
        /// Samples per check [default: 1000]
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultFlag>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Member,
    BoundaryF1,
    BoundaryF2,
    BoundaryF3,
    Raw,
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Kind as ValueEnum>::from_str(s, false)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultFlag {
    SharpSign,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("curvcone: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut out: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::input(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let result = dispatch(cli.command, &cfg, &mut out);
    out.flush()?;
    result
}

fn dispatch(cmd: Command, cfg: &ConfigFile, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Decompose(input) => {
            for op in read_operators(&input)? {
                writeln!(out, "{}", json(&decompose(&op).to_json()))?;
            }
            Ok(())
        }
        Command::Check {
            input,
            cone,
            tol,
            require_member,
        } => {
            let p = cone_params(&cone, cfg)?;
            let tol = positive(cfg.lookup(tol, "tol")?, "tol")?;
            let mut outsiders = 0;
            for op in read_operators(&input)? {
                let rep = check_report(&op, &p, tol);
                outsiders += usize::from(!rep.member);
                writeln!(out, "{}", json(&rep))?;
            }
            if require_member && outsiders > 0 {
                return Err(Failure::semantic(format!("{outsiders} operator(s) outside the cone")));
            }
            Ok(())
        }
        Command::L { input, cone, tol } => {
            let p = cone_params(&cone, cfg)?;
            let tol = positive(cfg.lookup(tol, "tol")?, "tol")?;
            for op in read_operators(&input)? {
                let l = lower_bound_l(&op, &p, tol.unwrap_or_else(|| default_l_tol(&op)))?;
                writeln!(out, "{}", serde_json::json!({ "l": l }))?;
            }
            Ok(())
        }
        Command::Evolve {
            input,
            cone,
            dt,
            t_max,
            tol,
            blowup_norm,
            fixed_step,
        } => {
            let p = cone_params(&cone, cfg)?;
            let defaults = TrajectoryConfig::default();
            let traj_cfg = TrajectoryConfig {
                dt: cfg.resolve(dt, "dt", defaults.dt)?,
                t_max: cfg.resolve(t_max, "t-max", defaults.t_max)?,
                rtol: cfg.resolve(tol, "tol", defaults.rtol)?,
                blowup_norm: cfg.resolve(blowup_norm, "blowup-norm", defaults.blowup_norm)?,
                adaptive: !fixed_step,
                params: Some(p),
            };
            traj_cfg.validate()?;
            let ops = read_operators(&input)?;
            let [r0] = ops.as_slice() else {
                return Err(Failure::input(format!("evolve takes exactly one operator, got {}", ops.len())));
            };
            evolve(r0, &traj_cfg, out)
        }
        Command::Sample {
            kind,
            samples,
            seed,
            cone,
            margin,
        } => {
            let kind = cfg.resolve(kind, "kind", Kind::Member)?;
            let n = cfg.resolve(samples, "samples", 10)?;
            let sc = SamplerConfig {
                seed: resolve_seed(seed, cfg)?,
                margin: cfg.resolve(margin, "margin", SamplerConfig::default().margin)?,
                ..Default::default()
            };
            sc.validate()?;
            let p = cone_params(&cone, cfg)?;
            for i in 0..n as u64 {
                let mut s = Sampler::substream(sc, i);
                let op = match kind {
                    Kind::Raw => s.random_bianchi(),
                    Kind::Member => s.random_member(&p)?,
                    Kind::BoundaryF1 => s.boundary_member(&p, Face::F1)?.op,
                    Kind::BoundaryF2 => s.boundary_member(&p, Face::F2)?.op,
                    Kind::BoundaryF3 => s.boundary_member(&p, Face::F3)?.op,
                };
                writeln!(out, "{}", op.to_json())?;
            }
            Ok(())
        }
        Command::Cutoff {
            eps,
            sigma,
            r,
            grid,
            csv,
        } => {
            let spec = CutoffSpec {
                eps: cfg.resolve(eps, "eps", 0.5)?,
                sigma: cfg.resolve(sigma, "sigma", 1.0)?,
                r: cfg.resolve(r, "r", 0.0)?,
                grid_n: cfg.resolve(grid, "grid", 10_000)?,
            };
            let c = build_cutoff(spec)?;
            let rep = verify_cutoff(&c);
            let mut value = serde_json::to_value(&rep).expect("report serializes");
            value["passed"] = rep.passed().into();
            value["theorem_c0"] = theorem_variant_check(&c).c0.into();
            writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("value serializes"))?;
            if let Some(path) = csv {
                let mut w = BufWriter::new(create(&path)?);
                writeln!(w, "x,phi,dphi,ddphi")?;
                for i in 0..spec.grid_n {
                    let x = spec.grid_point(i);
                    let (f, d1, d2) = c.eval(x);
                    writeln!(w, "{x},{f},{d1},{d2}")?;
                }
                w.flush()?;
            }
            if !rep.passed() {
                return Err(Failure::semantic(format!("{} violation(s)", rep.violations.len())));
            }
            Ok(())
        }
        Command::Verify {
            suite,
            seed,
            samples,
            inject_fault,
        } => {
            let suite: Suite = cfg
                .resolve(suite, "suite", "all".to_string())?
                .parse()
                .map_err(Failure::input)?;
            let samples = cfg.resolve(samples, "samples", 1000)?;
            if samples == 0 {
                return Err(Failure::input("samples must be positive"));
            }
            let vc = VerifyConfig {
                seed: resolve_seed(seed, cfg)?,
                samples,
                suite,
                fault: inject_fault.map(|FaultFlag::SharpSign| Fault::SharpSign),
            };
            let report = verify::run(&vc);
            writeln!(out, "{}", report.to_json())?;
            eprint!("{}", verify::render_table(&report));
            if !report.passed {
                return Err(Failure::semantic("verification failed"));
            }
            Ok(())
        }
    }
}

fn evolve(r0: &CurvatureOperator, cfg: &TrajectoryConfig, out: &mut dyn Write) -> Outcome {
    let traj = integrate(r0, cfg)?;
    let mut header = vec!["t".to_string()];
    for i in 1..=6 {
        for j in i..=6 {
            header.push(format!("r{i}{j}"));
        }
    }
    header.extend(["l", "scalar", "bianchi", "member"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    let mut max_l: f64 = 0.0;
    for s in &traj.samples {
        let mut row = vec![s.t.to_string()];
        row.extend(s.op.upper().iter().map(|x| x.to_string()));
        let l = s.diag.l.map_or(String::new(), |l| {
            max_l = max_l.max(l);
            l.to_string()
        });
        row.push(l);
        row.push(s.diag.scalar.to_string());
        row.push(s.diag.bianchi_residual.to_string());
        row.push(s.diag.member.map_or(String::new(), |m| m.to_string()));
        writeln!(out, "{}", row.join(","))?;
    }
    let last = traj.last();
    eprintln!(
        "status={} steps={} t_end={} max_l={max_l} final_norm={}",
        traj.status.as_str(),
        traj.samples.len() - 1,
        last.t,
        last.diag.norm
    );
    Ok(())
}

fn cone_params(flags: &ConeFlags, cfg: &ConfigFile) -> Result<ConeParams, Failure> {
    let eta = cfg.resolve(flags.eta, "eta", 1.0)?;
    let mu = cfg.resolve(flags.mu, "mu", 2.0)?;
    Ok(ConeParams::new(eta, mu)?)
}

fn positive(v: Option<f64>, name: &str) -> Result<Option<f64>, Failure> {
    match v {
        Some(x) if !(x > 0.0) => Err(Failure::input(format!("{name} must be positive, got {x}"))),
        _ => Ok(v),
    }
}

fn resolve_seed(flag: Option<u64>, cfg: &ConfigFile) -> Result<u64, Failure> {
    if let Some(s) = cfg.lookup(flag, "seed")? {
        return Ok(s);
    }
    match std::env::var("CURVCONE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("CURVCONE_SEED is not an unsigned integer: {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::input(format!("cannot create {}: {e}", path.display())))
}

fn read_operators(input: &Input) -> Result<Vec<CurvatureOperator>, Failure> {
    let reader: Box<dyn BufRead> = match input.input.as_deref() {
        None => Box::new(io::stdin().lock()),
        Some(p) if p == Path::new("-") => Box::new(io::stdin().lock()),
        Some(p) => Box::new(BufReader::new(
            File::open(p).map_err(|e| Failure::input(format!("cannot open {}: {e}", p.display())))?,
        )),
    };
    let mut ops = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let op = CurvatureOperator::from_json(&line).map_err(|e| Failure::input(format!("line {}: {e}", n + 1)))?;
        ops.push(op);
    }
    Ok(ops)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}
