//! Executes a resolved run and writes its data files.
//!
//! Fresh invocations and `replay` both land here with identical
//! [`ResolvedRun`] values, which is what makes replayed data files
//! byte-identical: same parameters, same seeded streams, same formatting.

use std::collections::BTreeMap;
use std::path::Path;
use stefanwalk::analytic;
use stefanwalk::ingest::TimeUnit;
use stefanwalk::{
    make_grid, run_convergence, simulate_fixed_dirichlet, simulate_free, simulate_stefan,
    simulate_stefan_flux, solve_fdm_stefan, BoundaryDriver, ConvergenceScenario, DriverKind,
    Error, FdmConfig, HeatRunConfig, PhysicalParams, Result, SolutionField, StefanRunConfig,
    SweepSpec,
};

use crate::driver;
use crate::manifest::{ResolvedRun, SweepParams};
use crate::output::{self, OutputFormat};

/// What a finished run hands back to `main` for the manifest and the
/// summary line (the caller appends the runtime).
pub struct Outcome {
    pub summary: String,
    pub inputs: Vec<String>,
    pub outputs: BTreeMap<String, String>,
    /// Set when the files were written but the result itself signals
    /// numerical failure, e.g. a sweep whose errors did not shrink.
    pub soft_failure: Option<String>,
}

impl Outcome {
    fn new(summary: String) -> Self {
        Outcome {
            summary,
            inputs: Vec::new(),
            outputs: BTreeMap::new(),
            soft_failure: None,
        }
    }
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("note: {w}");
    }
}

fn note_truncation(field: &SolutionField) {
    if field.metadata.truncated {
        let step = field.metadata.truncated_at_step.unwrap_or(0);
        eprintln!(
            "note: the front reached the end of the domain at step {step} \
             (t = {:.6}); the recorded field stops there",
            step as f64 * field.metadata.dt
        );
    }
}

fn peak_temperature(field: &SolutionField) -> f64 {
    (0..field.ts.len())
        .flat_map(|j| field.temperatures.time_slice(j).iter().copied())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn front_summary(field: &SolutionField) -> String {
    let final_s = field
        .front
        .as_ref()
        .and_then(|f| f.s.last().copied())
        .unwrap_or(f64::NAN);
    format!(
        "final s = {final_s:.6}, peak T = {:.6}",
        peak_temperature(field)
    )
}

/// Writes the field matrix and, when present, the front trajectory;
/// records both in `outputs`.
fn write_solution(
    field: &SolutionField,
    format: OutputFormat,
    out_dir: &Path,
    outputs: &mut BTreeMap<String, String>,
) -> Result<()> {
    let field_name = format!("field.{}", format.ext());
    output::write_text(&out_dir.join(&field_name), &output::field_text(field, format))?;
    outputs.insert("field".to_string(), field_name);
    if let Some(front) = &field.front {
        let front_name = format!("front.{}", format.ext());
        output::write_text(&out_dir.join(&front_name), &output::front_text(front, format))?;
        outputs.insert("front".to_string(), front_name);
    }
    Ok(())
}

pub fn execute(run: &ResolvedRun, format: OutputFormat, out_dir: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    match run {
        ResolvedRun::Free {
            walkers,
            x0,
            steps,
            dx,
            seed,
            workers,
        } => {
            let hist = simulate_free(*walkers, *x0, *steps, *dx, *seed, *workers)?;
            let name = format!("histogram.{}", format.ext());
            output::write_text(&out_dir.join(&name), &output::histogram_text(&hist, format))?;
            let mut outcome = Outcome::new(format!(
                "{walkers} walkers after {steps} hops: mean = {:.6}, variance = {:.6}",
                hist.mean(),
                hist.variance()
            ));
            outcome.outputs.insert("histogram".to_string(), name);
            Ok(outcome)
        }

        ResolvedRun::Heat {
            params,
            initial,
            left,
            right,
            time_unit,
            dx,
            domain_len,
            t_max,
            n,
            seed,
            workers,
            terms,
        } => {
            let unit = TimeUnit::parse(time_unit)?;
            let left_d = driver::materialize(left, unit, *t_max)?;
            driver::expect_kind(&left_d.driver, DriverKind::Dirichlet, "heat")?;
            let right_d = driver::materialize(right, unit, *t_max)?;
            driver::expect_kind(&right_d.driver, DriverKind::Dirichlet, "heat")?;
            warn_all(&left_d.warnings);
            warn_all(&right_d.warnings);

            let grid = make_grid(params.alpha, *dx, *domain_len, *t_max)?;
            let cfg = HeatRunConfig {
                params: *params,
                grid,
                left: left_d.driver.clone(),
                right: right_d.driver.clone(),
                n: *n,
                seed: *seed,
                workers: *workers,
            };
            let initial_t = *initial;
            let heat_run = simulate_fixed_dirichlet(&cfg, |_| initial_t)?;

            let mut outcome = Outcome::new(format!(
                "final s = n/a, peak T = {:.6}",
                peak_temperature(&heat_run.solution)
            ));
            write_solution(&heat_run.solution, format, out_dir, &mut outcome.outputs)?;
            if let Some(k) = terms {
                let zero = |d: &BoundaryDriver| matches!(d, BoundaryDriver::Constant(v) if *v == 0.0);
                if !zero(&left_d.driver) || !zero(&right_d.driver) {
                    return Err(Error::config(
                        "--terms writes the series reference, which only exists when both \
                         ends are held at const:0",
                    ));
                }
                let (alpha, len, k) = (params.alpha, *domain_len, *k);
                let text = output::reference_text(
                    &heat_run.solution.xs,
                    &heat_run.solution.ts,
                    |x, t| {
                        initial_t
                            * analytic::fourier_temperature(x, t, len, alpha, k)
                                .expect("grid nodes lie inside the series domain")
                    },
                    format,
                );
                let name = format!("reference.{}", format.ext());
                output::write_text(&out_dir.join(&name), &text)?;
                outcome.outputs.insert("reference".to_string(), name);
            }
            for d in [&left_d, &right_d] {
                if let Some(src) = &d.source {
                    outcome.inputs.push(src.display().to_string());
                }
            }
            Ok(outcome)
        }

        ResolvedRun::Stefan {
            params,
            driver,
            time_unit,
            dx,
            domain_len,
            t_max,
            n,
            seed,
            workers,
            allow_coarse_front,
        } => front_walk(
            false,
            params,
            driver,
            time_unit,
            *dx,
            *domain_len,
            *t_max,
            *n,
            *seed,
            *workers,
            *allow_coarse_front,
            format,
            out_dir,
        ),

        ResolvedRun::StefanFlux {
            params,
            driver,
            time_unit,
            dx,
            domain_len,
            t_max,
            n,
            seed,
            workers,
            allow_coarse_front,
        } => front_walk(
            true,
            params,
            driver,
            time_unit,
            *dx,
            *domain_len,
            *t_max,
            *n,
            *seed,
            *workers,
            *allow_coarse_front,
            format,
            out_dir,
        ),

        ResolvedRun::Fdm {
            params,
            driver,
            time_unit,
            dx,
            dt,
            domain_len,
            t_max,
            ..
        } => {
            let unit = TimeUnit::parse(time_unit)?;
            let parsed = driver::materialize(driver, unit, *t_max)?;
            driver::expect_kind(&parsed.driver, DriverKind::Dirichlet, "fdm")?;
            warn_all(&parsed.warnings);
            let cfg = FdmConfig {
                params: *params,
                driver: parsed.driver,
                dx: *dx,
                dt: *dt,
                domain_len: *domain_len,
                t_max: *t_max,
            };
            let field = solve_fdm_stefan(&cfg)?;
            note_truncation(&field);
            let mut outcome = Outcome::new(front_summary(&field));
            write_solution(&field, format, out_dir, &mut outcome.outputs)?;
            if let Some(src) = parsed.source {
                outcome.inputs.push(src.display().to_string());
            }
            Ok(outcome)
        }

        ResolvedRun::Converge {
            params,
            driver,
            domain_len,
            t_max,
            t_star,
            x_max,
            sweep,
            seeds,
            workers,
        } => {
            let parsed = driver::materialize(driver, TimeUnit::Seconds, *t_max)?;
            driver::expect_kind(&parsed.driver, DriverKind::Dirichlet, "converge")?;
            let scenario = ConvergenceScenario {
                params: *params,
                driver: parsed.driver,
                domain_len: *domain_len,
                t_max: *t_max,
                t_star: *t_star,
                x_max: *x_max,
            };
            let spec = match sweep {
                SweepParams::ScaleFactor { levels, dx } => SweepSpec::ScaleFactor {
                    levels: levels.clone(),
                    dx: *dx,
                },
                SweepParams::CellWidth { levels, n } => SweepSpec::CellWidth {
                    levels: levels.clone(),
                    n: *n,
                },
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(*workers)
                .build()
                .map_err(|e| Error::config(format!("cannot start {workers} workers: {e}")))?;
            let report = pool.install(|| run_convergence(&scenario, &spec, seeds))?;

            let (json_name, csv_name) = output::write_report(&report, out_dir)?;
            let means: Vec<String> = report
                .levels
                .iter()
                .map(|level| {
                    let mean = if report.primary_metric == "front_rms" {
                        level.front_rms_mean
                    } else {
                        level.linf_mean
                    };
                    format!("{mean:.4}")
                })
                .collect();
            let mut outcome = Outcome::new(format!(
                "swept {} over {} levels: {} means = [{}], monotone = {}",
                report.sweep,
                report.levels.len(),
                report.primary_metric,
                means.join(", "),
                report.monotone
            ));
            outcome.outputs.insert("report_json".to_string(), json_name);
            outcome.outputs.insert("report_csv".to_string(), csv_name);
            if !report.monotone {
                outcome.soft_failure = Some(format!(
                    "{} means did not decrease monotonically across the {} levels",
                    report.primary_metric, report.sweep
                ));
            }
            Ok(outcome)
        }

        ResolvedRun::Lambda { beta, t0, tol } => {
            let sol = analytic::solve_lambda(*beta, *t0, *tol)?;
            let q0 = analytic::flux_amplitude(sol.lambda)?;
            let name = format!("lambda.{}", format.ext());
            output::write_text(&out_dir.join(&name), &output::lambda_text(&sol, q0, format))?;
            let fallback = if sol.bisection_fallback {
                ", bisection fallback"
            } else {
                ""
            };
            let mut outcome = Outcome::new(format!(
                "lambda = {:.6}, q0 = {q0:.6} (residual {:.2e}, {} iterations{fallback})",
                sol.lambda, sol.residual, sol.iterations
            ));
            outcome.outputs.insert("lambda".to_string(), name);
            Ok(outcome)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn front_walk(
    flux: bool,
    params: &PhysicalParams,
    driver_spec: &str,
    time_unit: &str,
    dx: f64,
    domain_len: f64,
    t_max: f64,
    n: u32,
    seed: u64,
    workers: usize,
    allow_coarse_front: bool,
    format: OutputFormat,
    out_dir: &Path,
) -> Result<Outcome> {
    let unit = TimeUnit::parse(time_unit)?;
    let parsed = driver::materialize(driver_spec, unit, t_max)?;
    let (command, want) = if flux {
        ("stefan-flux", DriverKind::Neumann)
    } else {
        ("stefan", DriverKind::Dirichlet)
    };
    driver::expect_kind(&parsed.driver, want, command)?;
    warn_all(&parsed.warnings);

    let grid = make_grid(params.alpha, dx, domain_len, t_max)?;
    let cfg = StefanRunConfig {
        params: *params,
        grid,
        driver: parsed.driver,
        n,
        seed,
        workers,
        allow_coarse_front,
    };
    let walk = if flux {
        simulate_stefan_flux(&cfg)?
    } else {
        simulate_stefan(&cfg)?
    };
    note_truncation(&walk.solution);

    let mut outcome = Outcome::new(front_summary(&walk.solution));
    write_solution(&walk.solution, format, out_dir, &mut outcome.outputs)?;
    if let Some(src) = parsed.source {
        outcome.inputs.push(src.display().to_string());
    }
    Ok(outcome)
}
