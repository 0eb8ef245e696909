//! `stefanwalk` — random-walk and finite-difference solvers for
//! one-dimensional heat conduction with a melting front.
//!
//! Every run writes plot-ready data files plus a `manifest.json` that pins
//! the fully resolved configuration; `stefanwalk replay manifest.json`
//! reproduces the data files byte-for-byte. Exit codes: 0 success,
//! 1 configuration error, 2 I/O or input-parse error, 3 numerical
//! non-convergence.

mod driver;
mod manifest;
mod output;
mod run;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::time::Instant;
use stefanwalk::ingest::TimeUnit;
use stefanwalk::{water_params, Error, PhysicalParams, Result};

use manifest::{ResolvedRun, RunManifest, SweepParams, MANIFEST_FILE};
use output::OutputFormat;

#[derive(Parser)]
#[command(
    name = "stefanwalk",
    version,
    about = "Random-walk and finite-difference solvers for one-dimensional \
             heat conduction with a melting front",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unconstrained lattice walk; writes the final-position histogram.
    Free(FreeArgs),
    /// Conduction between two held boundaries, from a uniform start.
    Heat(HeatArgs),
    /// Melting front driven by a boundary temperature.
    Stefan(FrontArgs),
    /// Melting front driven by a boundary gradient (flux).
    StefanFlux(FrontArgs),
    /// Deterministic finite-difference front solver (reference).
    Fdm(FdmArgs),
    /// Error-versus-resolution sweep over several seeds.
    Converge(ConvergeArgs),
    /// Root of the transcendental front-speed equation.
    Lambda(LambdaArgs),
    /// Re-run a recorded manifest, reproducing its data files bytewise.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct PhysArgs {
    /// Thermal diffusivity.
    #[arg(long, value_name = "A")]
    alpha: Option<f64>,
    /// Latent-to-specific-heat ratio l/c.
    #[arg(long, value_name = "B")]
    beta: Option<f64>,
    /// Ice/water preset in mm-s-K units (instead of --alpha/--beta).
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    water: bool,
}

impl PhysArgs {
    fn resolve(&self) -> Result<PhysicalParams> {
        if self.water {
            Ok(water_params())
        } else {
            PhysicalParams::dimensionless(self.alpha.unwrap_or(1.0), self.beta.unwrap_or(1.0))
        }
    }

    fn default_dx(&self) -> f64 {
        if self.water {
            1.0
        } else {
            0.01
        }
    }

    fn default_len(&self) -> f64 {
        if self.water {
            100.0
        } else {
            1.0
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Cell width (default 0.01, or 1.0 mm with --water).
    #[arg(long)]
    dx: Option<f64>,
    /// Domain length (default 1.0, or 100.0 mm with --water).
    #[arg(long = "L", value_name = "LEN")]
    len: Option<f64>,
    /// Time horizon (defaults to the series end for csv drivers).
    #[arg(long)]
    tmax: Option<f64>,
}

#[derive(Args)]
struct WalkArgs {
    /// Walkers per degree per cell.
    #[arg(long, default_value_t = 10_000)]
    n: u32,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all available cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Data-file format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct FreeArgs {
    /// Number of walkers.
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    /// Number of lattice hops.
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Lattice spacing (default sqrt(2/steps), putting the final time at 1).
    #[arg(long)]
    dx: Option<f64>,
    /// Release position.
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all available cores).
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct HeatArgs {
    /// Uniform initial temperature of the interior.
    #[arg(long, default_value_t = 1.0)]
    initial: f64,
    /// Temperature driver at x = 0: const:<T0> | exp | sin | csv:<path>.
    #[arg(long, default_value = "const:0")]
    left: String,
    /// Temperature driver at x = L.
    #[arg(long, default_value = "const:0")]
    right: String,
    /// Also write a K-term series reference field (needs const:0 ends).
    #[arg(long, value_name = "K")]
    terms: Option<usize>,
    /// Time unit of csv driver files: s | min | h.
    #[arg(long, default_value = "s")]
    time_unit: String,
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct FrontArgs {
    /// Boundary driver: const:<T0> | exp | sin | csv:<path> for temperature
    /// runs; flux:<q0> | fluxcsv:<path> for gradient runs.
    #[arg(long)]
    driver: String,
    /// Time unit of csv driver files: s | min | h.
    #[arg(long, default_value = "s")]
    time_unit: String,
    /// Accept front increments coarser than a tenth of a cell.
    #[arg(long)]
    allow_coarse_front: bool,
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    walk: WalkArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct FdmArgs {
    /// Boundary temperature driver: const:<T0> | exp | sin | csv:<path>.
    #[arg(long)]
    driver: String,
    /// Time unit of csv driver files: s | min | h.
    #[arg(long, default_value = "s")]
    time_unit: String,
    /// Time step (default dx^2 / (4 alpha)).
    #[arg(long)]
    dt: Option<f64>,
    /// Random seed, recorded in the manifest; this solver is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker count, recorded in the manifest; this solver is serial.
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Scenario driver with a closed-form reference: const:<T0> | exp.
    #[arg(long, default_value = "const:1")]
    driver: String,
    /// What to sweep: n:<v,v,...> (walker levels) or dx:<v,v,...> (cell
    /// widths).
    #[arg(long, value_name = "SPEC")]
    sweep: String,
    /// Fixed cell width for an n sweep (default 0.01).
    #[arg(long)]
    dx: Option<f64>,
    /// Fixed scale factor for a dx sweep.
    #[arg(long, default_value_t = 10_000)]
    n: u32,
    /// Comma-separated seeds (at least 3).
    #[arg(long, default_value = "1,2,3,4,5")]
    seeds: String,
    /// Cross-section comparison time (default: tmax).
    #[arg(long)]
    tstar: Option<f64>,
    /// Cross-sections are compared on [0, xmax].
    #[arg(long, default_value_t = 0.4)]
    xmax: f64,
    /// Domain length.
    #[arg(long = "L", default_value_t = 1.0, value_name = "LEN")]
    len: f64,
    /// Time horizon.
    #[arg(long)]
    tmax: f64,
    /// Worker threads for concurrent runs (default: all available cores).
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct LambdaArgs {
    /// Latent-to-specific-heat ratio l/c.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Boundary temperature above melting.
    #[arg(long, default_value_t = 1.0)]
    t0: f64,
    /// Residual tolerance for the root.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ReplayArgs {
    /// Manifest written by a previous run.
    manifest: PathBuf,
    /// Override the output directory (default: the manifest's).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A fully resolved run plus where and how to write it.
#[derive(Debug)]
struct Job {
    run: ResolvedRun,
    format: OutputFormat,
    out_dir: PathBuf,
}

fn resolve_workers(requested: Option<usize>) -> Result<usize> {
    match requested {
        Some(0) => Err(Error::config("--workers must be at least 1")),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
    }
}

/// `--tmax` if given, otherwise the end of the longest sampled series among
/// `specs` (closed-form drivers have no natural horizon).
fn resolve_tmax(explicit: Option<f64>, specs: &[&str], unit: TimeUnit) -> Result<f64> {
    if let Some(t) = explicit {
        return Ok(t);
    }
    let mut end: Option<f64> = None;
    for spec in specs {
        if let Some(e) = driver::series_end(spec, unit)? {
            end = Some(end.map_or(e, |cur| cur.max(e)));
        }
    }
    end.ok_or_else(|| {
        Error::config("--tmax is required unless a csv/fluxcsv driver supplies a time span")
    })
}

fn parse_list<T: std::str::FromStr>(list: &str, context: &str) -> Result<Vec<T>> {
    list.split(',')
        .map(|item| {
            item.trim()
                .parse::<T>()
                .map_err(|_| Error::config(format!("bad value '{item}' in '{context}'")))
        })
        .collect()
}

fn parse_sweep(spec: &str, fixed_dx: f64, fixed_n: u32) -> Result<SweepParams> {
    let (kind, list) = spec.split_once(':').ok_or_else(|| {
        Error::config(format!(
            "sweep '{spec}' must look like n:100,1000,10000 or dx:0.02,0.01,0.005"
        ))
    })?;
    match kind {
        "n" => Ok(SweepParams::ScaleFactor {
            levels: parse_list(list, spec)?,
            dx: fixed_dx,
        }),
        "dx" => Ok(SweepParams::CellWidth {
            levels: parse_list(list, spec)?,
            n: fixed_n,
        }),
        other => Err(Error::config(format!(
            "unknown sweep variable '{other}'; use n or dx"
        ))),
    }
}

fn front_job(args: FrontArgs, flux: bool) -> Result<Job> {
    let params = args.phys.resolve()?;
    let unit = TimeUnit::parse(&args.time_unit)?;
    let t_max = resolve_tmax(args.grid.tmax, &[&args.driver], unit)?;
    let dx = args.grid.dx.unwrap_or_else(|| args.phys.default_dx());
    let domain_len = args.grid.len.unwrap_or_else(|| args.phys.default_len());
    let workers = resolve_workers(args.walk.workers)?;
    let run = if flux {
        ResolvedRun::StefanFlux {
            params,
            driver: args.driver,
            time_unit: args.time_unit,
            dx,
            domain_len,
            t_max,
            n: args.walk.n,
            seed: args.walk.seed,
            workers,
            allow_coarse_front: args.allow_coarse_front,
        }
    } else {
        ResolvedRun::Stefan {
            params,
            driver: args.driver,
            time_unit: args.time_unit,
            dx,
            domain_len,
            t_max,
            n: args.walk.n,
            seed: args.walk.seed,
            workers,
            allow_coarse_front: args.allow_coarse_front,
        }
    };
    Ok(Job {
        run,
        format: args.out.format,
        out_dir: args.out.out,
    })
}

/// Turns parsed flags into a fully pinned run. `Replay` never reaches this
/// point; it loads its `ResolvedRun` from the manifest instead.
fn resolve(command: Command) -> Result<Job> {
    match command {
        Command::Free(args) => {
            let dx = args
                .dx
                .unwrap_or_else(|| (2.0 / args.steps as f64).sqrt());
            Ok(Job {
                run: ResolvedRun::Free {
                    walkers: args.n,
                    x0: args.x0,
                    steps: args.steps,
                    dx,
                    seed: args.seed,
                    workers: resolve_workers(args.workers)?,
                },
                format: args.out.format,
                out_dir: args.out.out,
            })
        }
        Command::Heat(args) => {
            let params = args.phys.resolve()?;
            let unit = TimeUnit::parse(&args.time_unit)?;
            let t_max = resolve_tmax(args.grid.tmax, &[&args.left, &args.right], unit)?;
            Ok(Job {
                run: ResolvedRun::Heat {
                    params,
                    initial: args.initial,
                    left: args.left,
                    right: args.right,
                    time_unit: args.time_unit,
                    dx: args.grid.dx.unwrap_or_else(|| args.phys.default_dx()),
                    domain_len: args.grid.len.unwrap_or_else(|| args.phys.default_len()),
                    t_max,
                    n: args.walk.n,
                    seed: args.walk.seed,
                    workers: resolve_workers(args.walk.workers)?,
                    terms: args.terms,
                },
                format: args.out.format,
                out_dir: args.out.out,
            })
        }
        Command::Stefan(args) => front_job(args, false),
        Command::StefanFlux(args) => front_job(args, true),
        Command::Fdm(args) => {
            let params = args.phys.resolve()?;
            let unit = TimeUnit::parse(&args.time_unit)?;
            let t_max = resolve_tmax(args.grid.tmax, &[&args.driver], unit)?;
            let dx = args.grid.dx.unwrap_or_else(|| args.phys.default_dx());
            Ok(Job {
                run: ResolvedRun::Fdm {
                    params,
                    driver: args.driver,
                    time_unit: args.time_unit,
                    dx,
                    dt: args.dt.unwrap_or(dx * dx / (4.0 * params.alpha)),
                    domain_len: args.grid.len.unwrap_or_else(|| args.phys.default_len()),
                    t_max,
                    seed: args.seed,
                    workers: resolve_workers(args.workers)?,
                },
                format: args.out.format,
                out_dir: args.out.out,
            })
        }
        Command::Converge(args) => {
            let params = args.phys.resolve()?;
            let sweep = parse_sweep(
                &args.sweep,
                args.dx.unwrap_or_else(|| args.phys.default_dx()),
                args.n,
            )?;
            Ok(Job {
                run: ResolvedRun::Converge {
                    params,
                    driver: args.driver,
                    domain_len: args.len,
                    t_max: args.tmax,
                    t_star: args.tstar.unwrap_or(args.tmax),
                    x_max: args.xmax,
                    sweep,
                    seeds: parse_list(&args.seeds, "--seeds")?,
                    workers: resolve_workers(args.workers)?,
                },
                format: args.out.format,
                out_dir: args.out.out,
            })
        }
        Command::Lambda(args) => Ok(Job {
            run: ResolvedRun::Lambda {
                beta: args.beta,
                t0: args.t0,
                tol: args.tol,
            },
            format: args.out.format,
            out_dir: args.out.out,
        }),
        Command::Replay(_) => unreachable!("replay is dispatched before resolution"),
    }
}

fn dispatch(command: Command) -> Result<Option<String>> {
    let job = match command {
        Command::Replay(args) => {
            let loaded = RunManifest::load(&args.manifest)?;
            Job {
                out_dir: args
                    .out
                    .unwrap_or_else(|| PathBuf::from(&loaded.out_dir)),
                run: loaded.run,
                format: loaded.format,
            }
        }
        other => resolve(other)?,
    };

    let started = Instant::now();
    let outcome = run::execute(&job.run, job.format, &job.out_dir)?;
    let duration_s = started.elapsed().as_secs_f64();

    let mut outputs = outcome.outputs;
    outputs.insert("manifest".to_string(), MANIFEST_FILE.to_string());
    RunManifest {
        tool: "stefanwalk".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        run: job.run,
        format: job.format,
        out_dir: job.out_dir.display().to_string(),
        inputs: outcome.inputs,
        outputs,
        duration_s,
    }
    .save(&job.out_dir.join(MANIFEST_FILE))?;

    println!("{}, runtime = {duration_s:.3} s", outcome.summary);
    Ok(outcome.soft_failure)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) => 1,
        Error::Parse { .. } | Error::Io { .. } => 2,
        Error::NonConvergence(_) => 3,
    }
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print to stdout and exit 0; genuine flag
            // problems are configuration errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(None) => 0,
        Ok(Some(failure)) => {
            eprintln!("error: {failure}");
            3
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn job_for(argv: &[&str]) -> Result<Job> {
        let cli = Cli::try_parse_from(argv).expect("flags should parse");
        resolve(cli.command)
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn water_preset_fills_grid_defaults() {
        let path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/orebro_2019-03-01_03.csv"
        );
        let spec = format!("csv:{path}");
        let job = job_for(&[
            "stefanwalk",
            "stefan",
            "--driver",
            &spec,
            "--time-unit",
            "h",
            "--water",
        ])
        .unwrap();
        match job.run {
            ResolvedRun::Stefan {
                params,
                dx,
                domain_len,
                t_max,
                ..
            } => {
                assert!((params.alpha - 0.1429).abs() < 1e-12);
                assert_eq!(dx, 1.0);
                assert_eq!(domain_len, 100.0);
                assert!((t_max - 62.0 * 3600.0).abs() < 1e-9);
            }
            other => panic!("wrong run: {other:?}"),
        }
    }

    #[test]
    fn tmax_is_required_for_closed_form_drivers() {
        let err = job_for(&["stefanwalk", "stefan", "--driver", "const:1"]).unwrap_err();
        assert!(err.to_string().contains("--tmax"));
    }

    #[test]
    fn water_conflicts_with_explicit_constants() {
        let parsed = Cli::try_parse_from([
            "stefanwalk", "stefan", "--driver", "const:1", "--tmax", "1", "--water", "--alpha",
            "2",
        ]);
        assert!(parsed.is_err());
    }

    #[test]
    fn sweep_specs_parse_both_variables() {
        match parse_sweep("n:100,1000,10000", 0.01, 7).unwrap() {
            SweepParams::ScaleFactor { levels, dx } => {
                assert_eq!(levels, vec![100, 1000, 10000]);
                assert_eq!(dx, 0.01);
            }
            other => panic!("wrong sweep: {other:?}"),
        }
        match parse_sweep("dx:0.02,0.01", 0.5, 7).unwrap() {
            SweepParams::CellWidth { levels, n } => {
                assert_eq!(levels, vec![0.02, 0.01]);
                assert_eq!(n, 7);
            }
            other => panic!("wrong sweep: {other:?}"),
        }
        assert!(parse_sweep("t:1,2", 0.01, 7).is_err());
        assert!(parse_sweep("n_only", 0.01, 7).is_err());
        assert!(parse_sweep("n:1,x", 0.01, 7).is_err());
    }

    #[test]
    fn zero_workers_is_rejected() {
        let err = job_for(&[
            "stefanwalk", "stefan", "--driver", "const:1", "--tmax", "0.5", "--workers", "0",
        ])
        .unwrap_err();
        assert!(err.to_string().contains("--workers"));
    }

    #[test]
    fn fdm_defaults_keep_the_scheme_stable() {
        let job = job_for(&[
            "stefanwalk", "fdm", "--driver", "const:1", "--tmax", "0.5", "--dx", "0.02",
        ])
        .unwrap();
        match job.run {
            ResolvedRun::Fdm { dx, dt, params, .. } => {
                let r = params.alpha * dt / (dx * dx);
                assert!((r - 0.25).abs() < 1e-12);
            }
            other => panic!("wrong run: {other:?}"),
        }
    }
}
