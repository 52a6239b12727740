use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lorenz_anticontrol::equilibria::DEFAULT_RESIDUAL_TOL;
use lorenz_anticontrol::integrator::DEFAULT_CAPTURE_RADIUS;
use lorenz_anticontrol::orbits::default_epsilon;
use lorenz_anticontrol::sign::DEFAULT_SIGN_TOL;
use lorenz_anticontrol::{
    branch_symmetry_deviation, certificate, classify_origin, corollary_check, find_equilibria, from_preset,
    integrate, integrate_to_equilibrium, largest_lyapunov_exponent, origin_eigenvalues, regime_classify,
    suggest_anticontrol, trace_heteroclinic, Branch, IntegratorSettings, LleConfig, Mode, Preset, State,
    SystemParams, TrajectoryStatus,
};
use lorenz_workbench::emit::{emit, Format, JsonOnly};
use lorenz_workbench::sweep::{run_sweep, Axis, SweepSpec, Task};
use lorenz_workbench::WorkbenchError;

/// Controlled Lorenz-type systems: equilibria, certificates, orbits, chaos.
#[derive(Parser)]
#[command(name = "lcwb", version)]
struct Cli {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    integ: IntegratorArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Lorenz,
    Chen,
    Lu,
    T,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Lorenz => Preset::Lorenz,
            PresetArg::Chen => Preset::Chen,
            PresetArg::Lu => Preset::Lu,
            PresetArg::T => Preset::TSystem,
        }
    }
}

#[derive(Args)]
struct SystemArgs {
    /// Named system; M, N, P are derived from a, b, c unless given explicitly
    #[arg(long, global = true)]
    preset: Option<PresetArg>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long = "M", global = true, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long = "N", global = true, allow_negative_numbers = true)]
    n: Option<f64>,
    #[arg(long = "P", global = true, allow_negative_numbers = true)]
    p: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// json or csv
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write to a file instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct IntegratorArgs {
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Initial step (adaptive) or step size (with --fixed)
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Use fixed-step RK4 instead of the adaptive pair
    #[arg(long, global = true)]
    fixed: bool,
}

#[derive(Args, Clone, Copy)]
struct StartArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    y0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    z0: f64,
}

impl StartArgs {
    fn state(&self) -> State {
        State::new(self.x0, self.y0, self.z0)
    }
}

#[derive(Args, Clone, Copy)]
struct LleArgs {
    #[arg(long, default_value_t = 500.0)]
    horizon: f64,
    #[arg(long, default_value_t = 50.0)]
    transient: f64,
    #[arg(long, default_value_t = 1.0)]
    renorm: f64,
}

impl LleArgs {
    fn config(&self) -> LleConfig {
        LleConfig {
            renorm_interval: self.renorm,
            transient: self.transient,
            horizon: self.horizon,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibria with eigenvalues and stability dimensions
    Equilibria {
        #[arg(long, default_value_t = DEFAULT_RESIDUAL_TOL)]
        residual_tol: f64,
    },
    /// Classification of the origin
    Classify {
        #[arg(long, default_value_t = DEFAULT_SIGN_TOL)]
        tol: f64,
    },
    /// Lyapunov-function hypotheses and the conclusions they license
    Certificate,
    /// Integrate a trajectory
    Simulate {
        #[command(flatten)]
        start: StartArgs,
        /// Stop once captured by an equilibrium
        #[arg(long)]
        to_equilibrium: bool,
        #[arg(long, default_value_t = DEFAULT_CAPTURE_RADIUS)]
        capture_radius: f64,
    },
    /// Shoot along the unstable manifold of the origin
    Heteroclinic {
        #[arg(long, value_enum, default_value = "both")]
        branch: BranchArg,
        /// Offset along the eigendirection; defaults to 1e-6 (1 + |E+|)
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Largest Lyapunov exponent
    Lle {
        #[command(flatten)]
        start: StartArgs,
        #[command(flatten)]
        lle: LleArgs,
    },
    /// Regime label from certificates and equilibrium stability
    Regime,
    /// Controller pushing the stable Lorenz system past the pitchfork
    SuggestAnticontrol {
        #[arg(long, default_value_t = 28.0)]
        margin: f64,
        /// Also estimate the largest Lyapunov exponent of the controlled system
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        lle: LleArgs,
    },
    /// Evaluate tasks over a one- or two-dimensional parameter grid
    Sweep {
        /// name:start:stop:count, up to two
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        /// Comma-separated: equilibria,origin_class,certificate,regime,lle
        #[arg(long, value_delimiter = ',', default_value = "equilibria,origin_class,certificate,regime")]
        tasks: Vec<String>,
        /// Worker threads; defaults to the available parallelism
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        lle: LleArgs,
    },
}

fn resolve_params(args: &SystemArgs) -> Result<SystemParams, WorkbenchError> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| WorkbenchError::Usage(format!("--{name} is required")))
    };
    let (a, b, c) = (need(args.a, "a")?, need(args.b, "b")?, need(args.c, "c")?);
    let base = match args.preset {
        Some(preset) => from_preset(preset.into(), a, b, c),
        None => SystemParams::lorenz(a, b, c),
    };
    let p = SystemParams::new(
        a,
        b,
        c,
        args.m.unwrap_or(base.m),
        args.n.unwrap_or(base.n),
        args.p.unwrap_or(base.p),
    )?;
    Ok(p)
}

fn settings(args: &IntegratorArgs) -> Result<IntegratorSettings, WorkbenchError> {
    let mut s = IntegratorSettings::default();
    if args.fixed {
        s.mode = Mode::FixedRk4;
        s.dt_init = 1e-3;
    }
    if let Some(v) = args.rel_tol {
        s.rel_tol = v;
    }
    if let Some(v) = args.abs_tol {
        s.abs_tol = v;
    }
    if let Some(v) = args.t_max {
        s.t_max = v;
    }
    if let Some(v) = args.dt {
        s.dt_init = v;
    }
    s.validate()?;
    Ok(s)
}

fn numerical_status(status: TrajectoryStatus) -> Result<(), WorkbenchError> {
    match status {
        TrajectoryStatus::Diverged | TrajectoryStatus::StepLimit => {
            Err(WorkbenchError::Numerical(format!("integration ended with {}", status.name())))
        }
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct ClassifyReport {
    params: SystemParams,
    origin_class: lorenz_anticontrol::OriginClass,
    origin_eigenvalues: [[f64; 2]; 3],
}

#[derive(Serialize)]
struct CertificateOutput {
    params: SystemParams,
    certificate: lorenz_anticontrol::CertificateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    corollary: Option<CorollaryOutput>,
}

#[derive(Serialize)]
struct CorollaryOutput {
    preset: Preset,
    holds: bool,
}

#[derive(Serialize)]
struct BranchSummary {
    branch: Branch,
    epsilon: f64,
    success: bool,
    certified: bool,
    terminal: Option<State>,
    final_distance: f64,
    extremal_x: f64,
    reentered_origin: bool,
    status: TrajectoryStatus,
    steps: usize,
}

#[derive(Serialize)]
struct HeteroclinicOutput {
    params: SystemParams,
    branches: Vec<BranchSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry_deviation: Option<f64>,
}

#[derive(Serialize)]
struct RegimeOutput {
    params: SystemParams,
    regime: lorenz_anticontrol::RegimeLabel,
}

#[derive(Serialize)]
struct AnticontrolOutput {
    suggestion: lorenz_anticontrol::AnticontrolSuggestion,
    #[serde(skip_serializing_if = "Option::is_none")]
    lle: Option<f64>,
}

fn run(cli: Cli) -> Result<(), WorkbenchError> {
    let format: Format = cli.output.format.parse()?;
    let out = cli.output.out.as_deref();
    let integ = settings(&cli.integ)?;

    match cli.command {
        Command::Equilibria { residual_tol } => {
            let p = resolve_params(&cli.system)?;
            emit(&JsonOnly(find_equilibria(&p, residual_tol)?), format, out)
        }
        Command::Classify { tol } => {
            let p = resolve_params(&cli.system)?;
            let report = ClassifyReport {
                params: p,
                origin_class: classify_origin(&p, tol),
                origin_eigenvalues: origin_eigenvalues(&p).map(|z| [z.re, z.im]),
            };
            emit(&JsonOnly(report), format, out)
        }
        Command::Certificate => {
            let p = resolve_params(&cli.system)?;
            let corollary = match cli.system.preset.map(Preset::from) {
                Some(preset) if preset != Preset::Lu => Some(CorollaryOutput {
                    preset,
                    holds: corollary_check(preset, p.a, p.b, p.c)?,
                }),
                _ => None,
            };
            emit(
                &JsonOnly(CertificateOutput {
                    params: p,
                    certificate: certificate(&p),
                    corollary,
                }),
                format,
                out,
            )
        }
        Command::Simulate {
            start,
            to_equilibrium,
            capture_radius,
        } => {
            let p = resolve_params(&cli.system)?;
            let trajectory = if to_equilibrium {
                let eqs = find_equilibria(&p, DEFAULT_RESIDUAL_TOL)?;
                integrate_to_equilibrium(&p, start.state(), &eqs, capture_radius, &integ)?.trajectory
            } else {
                integrate(&p, start.state(), &integ)?
            };
            emit(&trajectory, format, out)?;
            numerical_status(trajectory.status)
        }
        Command::Heteroclinic { branch, epsilon } => {
            let p = resolve_params(&cli.system)?;
            let eps = epsilon.unwrap_or_else(|| default_epsilon(&p));
            let branches = match branch {
                BranchArg::Plus => vec![Branch::PlusX],
                BranchArg::Minus => vec![Branch::MinusX],
                BranchArg::Both => vec![Branch::PlusX, Branch::MinusX],
            };
            let results = branches
                .into_iter()
                .map(|b| trace_heteroclinic(&p, b, eps, &integ))
                .collect::<Result<Vec<_>, _>>()?;
            if format == Format::Csv {
                if results.len() != 1 {
                    return Err(WorkbenchError::Usage("csv output needs a single --branch".into()));
                }
                return emit(&results[0].trajectory, format, out);
            }
            let symmetry_deviation = match results.as_slice() {
                [plus, minus] => Some(branch_symmetry_deviation(plus, minus)?),
                _ => None,
            };
            let branches = results
                .iter()
                .map(|r| BranchSummary {
                    branch: r.branch,
                    epsilon: r.epsilon,
                    success: r.success,
                    certified: r.certified,
                    terminal: r.terminal.map(|e| e.location),
                    final_distance: r.final_distance,
                    extremal_x: r.extremal_x,
                    reentered_origin: r.reentered_origin,
                    status: r.trajectory.status,
                    steps: r.trajectory.len() - 1,
                })
                .collect();
            emit(
                &JsonOnly(HeteroclinicOutput {
                    params: p,
                    branches,
                    symmetry_deviation,
                }),
                format,
                out,
            )
        }
        Command::Lle { start, lle } => {
            let p = resolve_params(&cli.system)?;
            let est = largest_lyapunov_exponent(&p, start.state(), &integ, &lle.config())?;
            emit(&JsonOnly(est), format, out)
        }
        Command::Regime => {
            let p = resolve_params(&cli.system)?;
            emit(
                &JsonOnly(RegimeOutput {
                    params: p,
                    regime: regime_classify(&p),
                }),
                format,
                out,
            )
        }
        Command::SuggestAnticontrol { margin, verify, lle } => {
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| WorkbenchError::Usage(format!("--{name} is required")))
            };
            let (a, b, c) = (need(cli.system.a, "a")?, need(cli.system.b, "b")?, need(cli.system.c, "c")?);
            let suggestion = suggest_anticontrol(a, b, c, margin)?;
            let lle = if verify {
                Some(
                    largest_lyapunov_exponent(&suggestion.params, State::new(1.0, 1.0, 1.0), &integ, &lle.config())?
                        .lambda1,
                )
            } else {
                None
            };
            emit(&JsonOnly(AnticontrolOutput { suggestion, lle }), format, out)
        }
        Command::Sweep {
            axes,
            tasks,
            workers,
            lle,
        } => {
            let base = resolve_params(&cli.system)?;
            let axes = axes.iter().map(|s| s.parse::<Axis>()).collect::<Result<Vec<_>, _>>()?;
            let tasks = tasks.iter().map(|s| s.parse::<Task>()).collect::<Result<Vec<_>, _>>()?;
            let mut spec = SweepSpec::new(base, axes, tasks);
            spec.seed = cli.output.seed;
            spec.settings = integ;
            spec.lle = lle.config();
            let result = run_sweep(&spec, workers)?;
            emit(&result, format, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
