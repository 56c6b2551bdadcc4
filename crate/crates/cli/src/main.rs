//! Command-line front end: solve one configuration or sweep a parameter,
//! emitting profile CSVs, JSON summaries and SVG plots.
//!
//! Exit codes: 0 success, 2 validation failure, 3 solver non-convergence,
//! 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nsexpander::config::{RunSpec, Settings, SweepSpec};
use nsexpander::{run_solve, run_sweep, EXIT_VALIDATION};

#[derive(Parser)]
#[command(
    name = "nsexpander",
    about = "Self-similar expander profiles of a radially symmetric compressible viscous gas",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write profile/summary/plots.
    Solve(RunArgs),
    /// Solve a family of configurations varying one numeric key.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value configuration file; flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Profile family: smooth | cavitating.
    #[arg(long)]
    case: Option<String>,
    /// Spatial dimension (>= 3).
    #[arg(long)]
    d: Option<String>,
    /// Shear viscosity.
    #[arg(long)]
    mu: Option<String>,
    /// Second viscosity coefficient.
    #[arg(long)]
    lambda: Option<String>,
    /// Heat capacity.
    #[arg(long)]
    cv: Option<String>,
    /// Thermal conductivity.
    #[arg(long)]
    kappa: Option<String>,
    /// Ideal-gas constant.
    #[arg(long = "r-gas")]
    r_gas: Option<String>,
    /// Center density (smooth case).
    #[arg(long)]
    p0: Option<String>,
    /// Anchor density at r = delta (cavitating case).
    #[arg(long = "p-delta")]
    p_delta: Option<String>,
    /// Anchor radius (cavitating case).
    #[arg(long)]
    delta: Option<String>,
    /// Center temperature.
    #[arg(long)]
    theta0: Option<String>,
    /// Center velocity slope (cavitating case), in (0, 1/2).
    #[arg(long)]
    alpha: Option<String>,
    /// Truncation radius.
    #[arg(long)]
    rmax: Option<String>,
    /// Number of mesh cells.
    #[arg(long)]
    cells: Option<String>,
    /// Mesh grading exponent (>= 1).
    #[arg(long)]
    grading: Option<String>,
    /// Fixed-point stopping tolerance (weighted sup distance).
    #[arg(long)]
    tol: Option<String>,
    /// Sweep cap for the fixed-point iteration.
    #[arg(long = "max-iter")]
    max_iter: Option<String>,
    /// Relaxation factor in (0, 1]; 1 = undamped.
    #[arg(long)]
    damping: Option<String>,
    /// Inner seeding radius (cavitating case; default delta/1000).
    #[arg(long)]
    rmin: Option<String>,
    /// Profile CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary output path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Directory for SVG plots.
    #[arg(long)]
    plots: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Swept key and values: key=v1,v2,... (alternatively pass the list
    /// directly to the numeric flag, e.g. --theta0 1e-4,2e-4).
    #[arg(long)]
    sweep: Option<String>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, String> {
        let mut s = match &self.config {
            Some(path) => Settings::load_file(path)?,
            None => Settings::default(),
        };
        let mut put = |key: &str, val: &Option<String>| {
            if let Some(v) = val {
                s.set(key, v.clone());
            }
        };
        put("case", &self.case);
        put("d", &self.d);
        put("mu", &self.mu);
        put("lambda", &self.lambda);
        put("cv", &self.cv);
        put("kappa", &self.kappa);
        put("r-gas", &self.r_gas);
        put("p0", &self.p0);
        put("p-delta", &self.p_delta);
        put("delta", &self.delta);
        put("theta0", &self.theta0);
        put("alpha", &self.alpha);
        put("rmax", &self.rmax);
        put("cells", &self.cells);
        put("grading", &self.grading);
        put("tol", &self.tol);
        put("max-iter", &self.max_iter);
        put("damping", &self.damping);
        put("rmin", &self.rmin);
        if let Some(p) = &self.out {
            s.set("out", p.display().to_string());
        }
        if let Some(p) = &self.summary {
            s.set("summary", p.display().to_string());
        }
        if let Some(p) = &self.plots {
            s.set("plots", p.display().to_string());
        }
        Ok(s)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => match args.settings().and_then(|s| RunSpec::from_settings(&s)) {
            Ok(spec) => run_solve(&spec),
            Err(msg) => {
                eprintln!("error: {msg}");
                EXIT_VALIDATION
            }
        },
        Command::Sweep(args) => {
            let outcome = args.run.settings().and_then(|mut settings| {
                let from_list = SweepSpec::extract_from_settings(&mut settings)?;
                let spec = match (&args.sweep, from_list) {
                    (Some(text), None) => SweepSpec::parse(text)?,
                    (None, Some(spec)) => spec,
                    (Some(_), Some(_)) => {
                        return Err("pass either --sweep or a value list, not both".to_string())
                    }
                    (None, None) => return Err("sweep needs --sweep key=v1,v2,...".to_string()),
                };
                Ok((settings, spec))
            });
            match outcome {
                Ok((settings, spec)) => run_sweep(&settings, &spec),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    EXIT_VALIDATION
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
