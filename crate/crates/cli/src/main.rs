//! Command-line front end: shaking and relaxation experiments plus the
//! randomized verification batteries, with CSV/report file output.
//!
//! Exit codes: 0 success (or expected outcome), 1 failed check, 2 usage or
//! configuration error, 3 numeric failure during integration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rheokit::dynamics::{
    self, random_traceless_normal, rk4_integrate, shaking_experiment, LagrangianMotion, Trajectory,
};
use rheokit::models::{build_model, CatalogModel, FreeEnergyKind, ZeroDModel};
use rheokit::state::{MaterialParams, ThermoState};
use rheokit::tensor3::{DefGrad, Mat3, Sym3};
use rheokit::verify;
use rheokit::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rheokit",
    version,
    about = "Material-point experiments and consistency checks for finite-strain visco-elastic models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shake a complex fluid periodically and record its dissipation history
    Shake(ShakeArgs),
    /// Hold a uniform stretch and record stress relaxation
    Relax(RelaxArgs),
    /// Run the verification battery applicable to a model
    Check(CheckArgs),
}

/// Material parameters: a config file, overridden by individual flags.
#[derive(Args)]
struct ParamArgs {
    /// Config file with one `name = value` per line (`#` comments)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "eta-s")]
    eta_s: Option<f64>,
    #[arg(long = "eta-p")]
    eta_p: Option<f64>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    conductivity: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<MaterialParams, Error> {
        let mut p = match &self.config {
            Some(path) => MaterialParams::from_config_file(path)?,
            None => MaterialParams::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { p.$field = v; })*
            };
        }
        apply!(
            density,
            mu,
            lambda,
            nu,
            eta,
            lambda1,
            lambda2,
            kappa,
            conductivity,
            omega
        );
        if let Some(v) = self.eta_s {
            p.eta_s = Some(v);
        }
        if let Some(v) = self.eta_p {
            p.eta_p = Some(v);
        }
        Ok(p)
    }
}

#[derive(Args)]
struct ShakeArgs {
    /// oldroyd-b | zaremba-jaumann | zaremba-jaumann-zj
    #[arg(long, default_value = "oldroyd-b")]
    model: String,
    /// Seed for the random traceless forcing matrix (when --m is not given)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "t-end", default_value_t = 4.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Forcing matrix: `zero`, `seed:<n>`, or nine comma-separated entries
    /// (trace projected off with a warning). Defaults to `seed:<--seed>`.
    #[arg(long)]
    m: Option<String>,
    /// Free energy attached to the polymer stress: none | zj. Omitting the
    /// flag keeps the catalog model's own choice.
    #[arg(long = "free-energy")]
    free_energy: Option<String>,
    /// Trajectory CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct RelaxArgs {
    /// maxwell0d | generalized-maxwell0d | maxwell3d-svk | maxwell3d-svk-fluid
    /// | generalized-maxwell3d
    #[arg(long, default_value = "maxwell3d-svk")]
    model: String,
    /// Held dilatation factor (3d) or held stretch (0d)
    #[arg(long, default_value_t = 1.2)]
    alpha: f64,
    #[arg(long = "t-end", default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Trajectory CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated check names that are expected to fail
    #[arg(long = "expect-fail", value_delimiter = ',')]
    expect_fail: Vec<String>,
    /// Report file path (the lines are always printed to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NonFinite { .. } | Error::DetFiCollapse { .. } => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

fn parse_forcing(spec: Option<&str>, default_seed: u64) -> Result<(Mat3, String), Error> {
    match spec {
        None => Ok((
            random_traceless_normal(default_seed),
            format!("seed:{default_seed}"),
        )),
        Some("zero") => Ok((Mat3::ZERO, "zero".to_string())),
        Some(s) if s.starts_with("seed:") => {
            let n: u64 = s["seed:".len()..]
                .parse()
                .map_err(|e| Error::InvalidParams(format!("bad --m seed: {e}")))?;
            Ok((random_traceless_normal(n), format!("seed:{n}")))
        }
        Some(s) => {
            let entries: Vec<f64> = s
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Error::InvalidParams(format!("bad --m entries: {e}")))?;
            if entries.len() != 9 {
                return Err(Error::InvalidParams(format!(
                    "--m needs 9 entries, got {}",
                    entries.len()
                )));
            }
            let m = Mat3::from_flat(&entries);
            if m.trace().abs() > 1e-12 * (1.0 + m.norm()) {
                eprintln!("warning: --m has trace {}, projecting it off", m.trace());
            }
            Ok((m.deviatoric(), "explicit".to_string()))
        }
    }
}

fn write_out(path: &Option<PathBuf>, contents: &str) -> Result<(), Error> {
    if let Some(p) = path {
        std::fs::write(p, contents)?;
    }
    Ok(())
}

fn cmd_shake(args: &ShakeArgs) -> Result<u8, Error> {
    let params = args.params.resolve()?;
    let model = match build_model(&args.model, &params)? {
        CatalogModel::Eulerian(fluid) => fluid,
        _ => {
            return Err(Error::InvalidParams(format!(
                "`{}` is not a complex fluid; shake needs oldroyd-b or zaremba-jaumann",
                args.model
            )))
        }
    };
    let model = match args.free_energy.as_deref() {
        None => model,
        Some("none") => model.with_free_energy(FreeEnergyKind::None),
        Some("zj") => model.with_free_energy(FreeEnergyKind::ZjQuadratic),
        Some(other) => {
            return Err(Error::InvalidParams(format!(
                "unknown --free-energy `{other}` (use none or zj)"
            )))
        }
    };
    let (m, m_desc) = parse_forcing(args.m.as_deref(), args.seed)?;

    let traj = shaking_experiment(&model, &m, params.omega, args.t_end, args.dt, &Sym3::ZERO)?;
    write_out(&args.out, &traj.to_csv_string())?;

    println!("m={m_desc}");
    let min = traj.min_augmented();
    match traj.first_negative_t() {
        Some(t) => println!("min_dissipation={min} first_negative_t={t}"),
        None => println!("min_dissipation={min} first_negative_t=none"),
    }
    Ok(0)
}

/// Builds the trajectory of a 0d prototype under a held stretch.
fn zero_d_relaxation(
    zd: &ZeroDModel,
    alpha: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, Error> {
    let mut traj = Trajectory::default();
    match zd {
        ZeroDModel::Maxwell(m) => {
            let m = *m;
            let rhs = move |_t: f64, y: &[f64]| vec![m.rate(alpha, y[0])];
            let (grid, states) = rk4_integrate(&rhs, &[0.0], (0.0, t_end), dt)?;
            traj.t = grid;
            for y in states {
                let gamma = y[0];
                let force = m.force(alpha, gamma);
                traj.raw_dissipation.push(0.0);
                traj.augmented_dissipation.push(m.dissipation(alpha, gamma));
                traj.cd_lhs.push(m.dissipation(alpha, gamma));
                traj.free_energy.push(m.free_energy(alpha, gamma));
                traj.stress.push(Mat3::from_diag(force, 0.0, 0.0));
                traj.xi.push(y);
            }
        }
        ZeroDModel::GeneralizedMaxwell(gm) => {
            let gm = gm.clone();
            let n = gm.branches.len();
            let rhs = {
                let gm = gm.clone();
                move |_t: f64, y: &[f64]| -> Vec<f64> {
                    gm.branches
                        .iter()
                        .zip(y)
                        .map(|(b, &g)| b.rate(alpha, g))
                        .collect()
                }
            };
            let (grid, states) = rk4_integrate(&rhs, &vec![0.0; n], (0.0, t_end), dt)?;
            traj.t = grid;
            for y in states {
                let force = gm.force(alpha, &y);
                let dissipation: f64 = gm
                    .branches
                    .iter()
                    .zip(&y)
                    .map(|(b, &g)| b.dissipation(alpha, g))
                    .sum();
                let energy: f64 = 0.5 * gm.mu0 * alpha * alpha
                    + gm.branches
                        .iter()
                        .zip(&y)
                        .map(|(b, &g)| b.free_energy(alpha, g))
                        .sum::<f64>();
                traj.raw_dissipation.push(0.0);
                traj.augmented_dissipation.push(dissipation);
                traj.cd_lhs.push(dissipation);
                traj.free_energy.push(energy);
                traj.stress.push(Mat3::from_diag(force, 0.0, 0.0));
                traj.xi.push(y);
            }
        }
        ZeroDModel::KelvinVoigt(_) => {
            return Err(Error::InvalidParams(
                "kelvin-voigt0d creeps under held force; relax needs a Maxwell-family model".into(),
            ))
        }
    }
    Ok(traj)
}

fn cmd_relax(args: &RelaxArgs) -> Result<u8, Error> {
    let params = args.params.resolve()?;
    let traj = match build_model(&args.model, &params)? {
        CatalogModel::ZeroD(zd) => zero_d_relaxation(&zd, args.alpha, args.t_end, args.dt)?,
        CatalogModel::Lagrangian(model) => {
            if model.dims().0 == 0 {
                return Err(Error::InvalidParams(format!(
                    "`{}` has no internal variables to relax; use a Maxwell-family model",
                    args.model
                )));
            }
            // Internal strains start at the identity.
            let blocks = model.dims().0 / 9;
            let mut xi = Vec::with_capacity(9 * blocks);
            for _ in 0..blocks {
                xi.extend_from_slice(&Mat3::identity().to_flat());
            }
            let state0 = ThermoState {
                f: DefGrad::new_unchecked(Mat3::identity() * args.alpha),
                h: Mat3::ZERO,
                theta: 1.0,
                g: rheokit::tensor3::Vec3::ZERO,
                xi,
                pi: vec![],
            };
            let motion =
                LagrangianMotion::constant_stretch(args.alpha, (0.0, args.t_end), args.dt)?;
            dynamics::dissipation_trace(model.as_ref(), &motion, &state0)?
        }
        CatalogModel::Eulerian(_) => {
            return Err(Error::InvalidParams(format!(
                "`{}` is a complex fluid; relax needs a Maxwell-family model",
                args.model
            )))
        }
    };

    write_out(&args.out, &traj.to_csv_string())?;
    let initial = traj.stress_fro_norm(0);
    let maximal = (0..traj.len())
        .map(|i| traj.stress_fro_norm(i))
        .fold(0.0f64, f64::max);
    if initial <= 1e-14 * (1.0 + maximal) {
        println!("final_over_initial=zero_stress");
    } else {
        let ratio = traj.stress_fro_norm(traj.len() - 1) / initial;
        println!("final_over_initial={ratio}");
    }
    Ok(0)
}

fn cmd_check(args: &CheckArgs) -> Result<u8, Error> {
    let params = args.params.resolve()?;
    let model = build_model(&args.model, &params)?;
    let reports = verify::battery(&args.model, &model, args.samples, args.seed)?;

    let known: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    for name in &args.expect_fail {
        if !known.contains(&name.as_str()) {
            return Err(Error::InvalidParams(format!(
                "--expect-fail `{name}` does not match any check in this battery ({})",
                known.join(", ")
            )));
        }
    }

    let mut lines = String::new();
    let mut ok = true;
    for rep in &reports {
        let line = rep.line();
        println!("{line}");
        lines.push_str(&line);
        lines.push('\n');
        let expected_fail = args.expect_fail.iter().any(|n| n == &rep.name);
        if expected_fail == rep.pass {
            ok = false;
        }
    }
    write_out(&args.out, &lines)?;
    Ok(if ok { 0 } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Shake(args) => cmd_shake(args),
        Command::Relax(args) => cmd_relax(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
