//! Error metrics and convergence studies for the walk solvers.
//!
//! A scenario pairs a walk configuration with the closed-form solution it
//! should approach; a sweep varies either the walker scale factor `n` or the
//! cell width `dx` across several levels and seeds, and the report records
//! per-run errors, per-level statistics, and whether the mean of the primary
//! error metric strictly decreases from level to level.

use crate::analytic;
use crate::boundary::BoundaryDriver;
use crate::error::{Error, Result};
use crate::field::{FrontCurve, SolutionField};
use crate::params::{make_grid, PhysicalParams};
use crate::rw::{simulate_stefan, StefanRunConfig};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Largest and root-mean-square deviation between a computed cross-section
/// and `oracle(x, t_j)` over grid nodes with `x` in `x_range`, where `t_j`
/// is the recorded time nearest `t_star`.
pub fn cross_section_error(
    field: &SolutionField,
    oracle: impl Fn(f64, f64) -> f64,
    t_star: f64,
    x_range: (f64, f64),
) -> Result<(f64, f64)> {
    let t_end = *field.ts.last().ok_or_else(|| Error::config("empty field"))?;
    // Recorded levels end one step short of the horizon (the last level is
    // at t_max - dt), so allow t_star up to one step past it.
    let bound = (t_end + field.metadata.dt) * (1.0 + 1e-9);
    if !(0.0..=bound).contains(&t_star) {
        return Err(Error::Domain(format!(
            "comparison time {t_star} outside the computed horizon [0, {bound}]"
        )));
    }
    let (t_j, slice) = field.cross_section(t_star);
    let mut linf: f64 = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for (i, &x) in field.xs.iter().enumerate() {
        if x < x_range.0 || x > x_range.1 {
            continue;
        }
        let e = slice[i] - oracle(x, t_j);
        linf = linf.max(e.abs());
        sum_sq += e * e;
        count += 1;
    }
    if count == 0 {
        return Err(Error::config(format!(
            "no grid nodes inside x range [{}, {}]",
            x_range.0, x_range.1
        )));
    }
    Ok((linf, (sum_sq / count as f64).sqrt()))
}

/// Root-mean-square deviation of a recorded front trajectory from
/// `offset + oracle(t_j)` over every recorded step. An empty trajectory has
/// no deviations and yields zero.
pub fn front_error(front: &FrontCurve, oracle: impl Fn(f64) -> f64, offset: f64) -> f64 {
    if front.s.is_empty() {
        return 0.0;
    }
    let sum_sq: f64 = front
        .ts
        .iter()
        .zip(&front.s)
        .map(|(&t, &s)| {
            let e = s - (offset + oracle(t));
            e * e
        })
        .sum();
    (sum_sq / front.s.len() as f64).sqrt()
}

/// A melt scenario with a known closed-form solution: a constant boundary
/// temperature (similarity solution) or the exponential boundary `e^t - 1`
/// (exact solution `T = e^(t-x) - 1`, `s = t`, valid for unit constants).
#[derive(Debug, Clone)]
pub struct ConvergenceScenario {
    pub params: PhysicalParams,
    pub driver: BoundaryDriver,
    pub domain_len: f64,
    pub t_max: f64,
    /// Time of the cross-section comparison.
    pub t_star: f64,
    /// Cross-sections are compared on `[0, x_max]`.
    pub x_max: f64,
}

/// Closed-form references for one scenario: temperature `(x, t)` and front
/// position `t` (without the one-cell head start, which comparisons add).
struct Oracles {
    temperature: Box<dyn Fn(f64, f64) -> f64 + Sync>,
    front: Box<dyn Fn(f64) -> f64 + Sync>,
}

impl ConvergenceScenario {
    fn oracles(&self) -> Result<Oracles> {
        let alpha = self.params.alpha;
        match self.driver {
            BoundaryDriver::Constant(t0) if t0 > 0.0 => {
                let beta = self.params.beta();
                let lambda = analytic::solve_lambda(beta, t0, 1e-12)?.lambda;
                Ok(Oracles {
                    temperature: Box::new(move |x, t| {
                        analytic::stefan_temperature(x, t, alpha, t0, lambda).unwrap_or(0.0)
                    }),
                    front: Box::new(move |t| analytic::stefan_front(t, alpha, lambda)),
                })
            }
            BoundaryDriver::Exponential => {
                if (alpha - 1.0).abs() > 1e-12 || (self.params.beta() - 1.0).abs() > 1e-12 {
                    return Err(Error::config(
                        "the exponential-driver closed form needs alpha = 1 and beta = 1",
                    ));
                }
                Ok(Oracles {
                    temperature: Box::new(|x, t| {
                        analytic::special_temperature(x, t).unwrap_or(0.0)
                    }),
                    front: Box::new(analytic::special_front),
                })
            }
            ref d => Err(Error::config(format!(
                "no closed-form reference for driver {}",
                d.descriptor()
            ))),
        }
    }
}

/// What a sweep varies: the walker scale factor at fixed cell width, or the
/// cell width at a fixed scale factor.
#[derive(Debug, Clone)]
pub enum SweepSpec {
    ScaleFactor { levels: Vec<u32>, dx: f64 },
    CellWidth { levels: Vec<f64>, n: u32 },
}

impl SweepSpec {
    fn variable(&self) -> &'static str {
        match self {
            SweepSpec::ScaleFactor { .. } => "n",
            SweepSpec::CellWidth { .. } => "dx",
        }
    }

    /// The error that decides the monotone verdict. Raising `n` mainly
    /// sharpens temperatures (front resolution scales the same way), while
    /// shrinking `dx` mainly sharpens the front trajectory.
    fn primary_metric(&self) -> &'static str {
        match self {
            SweepSpec::ScaleFactor { .. } => "cross_section_linf",
            SweepSpec::CellWidth { .. } => "front_rms",
        }
    }

    fn level_values(&self) -> Vec<f64> {
        match self {
            SweepSpec::ScaleFactor { levels, .. } => {
                levels.iter().map(|&n| n as f64).collect()
            }
            SweepSpec::CellWidth { levels, .. } => levels.clone(),
        }
    }

    fn run_inputs(&self, level_idx: usize) -> (u32, f64) {
        match self {
            SweepSpec::ScaleFactor { levels, dx } => (levels[level_idx], *dx),
            SweepSpec::CellWidth { levels, n } => (*n, levels[level_idx]),
        }
    }
}

/// Per-seed errors of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunErrors {
    pub seed: u64,
    pub cross_section_linf: f64,
    pub cross_section_l2: f64,
    pub front_rms: f64,
}

/// One sweep level with its per-seed errors and their statistics.
#[derive(Debug, Clone, Serialize)]
pub struct LevelStats {
    /// Value of the sweep variable at this level.
    pub value: f64,
    pub runs: Vec<RunErrors>,
    pub linf_mean: f64,
    pub linf_std: f64,
    pub l2_mean: f64,
    pub l2_std: f64,
    pub front_rms_mean: f64,
    pub front_rms_std: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    /// Sweep variable: `"n"` or `"dx"`.
    pub sweep: String,
    /// Error deciding the verdict: cross-section worst-case for `n` sweeps,
    /// front RMS for `dx` sweeps.
    pub primary_metric: String,
    pub seeds: Vec<u64>,
    pub levels: Vec<LevelStats>,
    /// True iff the mean of the primary metric strictly decreases across
    /// levels.
    pub monotone: bool,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat table, one row per (level, seed).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sweep,level,seed,cross_section_linf,cross_section_l2,front_rms\n");
        for level in &self.levels {
            for run in &level.runs {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    self.sweep,
                    level.value,
                    run.seed,
                    run.cross_section_linf,
                    run.cross_section_l2,
                    run.front_rms
                )
                .expect("writing to string cannot fail");
            }
        }
        out
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Runs the scenario at every (level, seed) pair and reports whether the
/// primary error metric's per-level mean strictly decreases. Runs execute
/// concurrently; the report depends only on the inputs.
pub fn run_convergence(
    scenario: &ConvergenceScenario,
    sweep: &SweepSpec,
    seeds: &[u64],
) -> Result<ConvergenceReport> {
    let values = sweep.level_values();
    if values.len() < 2 {
        return Err(Error::config(format!(
            "a sweep needs at least 2 levels, got {}",
            values.len()
        )));
    }
    if seeds.len() < 3 {
        return Err(Error::config(format!(
            "a sweep needs at least 3 seeds, got {}",
            seeds.len()
        )));
    }
    let oracles = scenario.oracles()?;

    let jobs: Vec<(usize, u64)> = (0..values.len())
        .flat_map(|li| seeds.iter().map(move |&s| (li, s)))
        .collect();
    let results: Vec<Result<(usize, RunErrors)>> = jobs
        .par_iter()
        .map(|&(li, seed)| {
            let (n, dx) = sweep.run_inputs(li);
            let grid = make_grid(scenario.params.alpha, dx, scenario.domain_len, scenario.t_max)
                .map_err(|e| level_context(sweep, li, seed, e))?;
            let cfg = StefanRunConfig::new(
                scenario.params,
                grid,
                scenario.driver.clone(),
                n,
                seed,
            );
            let run =
                simulate_stefan(&cfg).map_err(|e| level_context(sweep, li, seed, e))?;
            let (linf, l2) = cross_section_error(
                &run.solution,
                &oracles.temperature,
                scenario.t_star,
                (0.0, scenario.x_max),
            )
            .map_err(|e| level_context(sweep, li, seed, e))?;
            let front = run
                .solution
                .front
                .as_ref()
                .expect("front walks always record a trajectory");
            let rms = front_error(front, &oracles.front, dx);
            Ok((
                li,
                RunErrors {
                    seed,
                    cross_section_linf: linf,
                    cross_section_l2: l2,
                    front_rms: rms,
                },
            ))
        })
        .collect();

    let mut per_level: Vec<Vec<RunErrors>> = vec![Vec::new(); values.len()];
    for r in results {
        let (li, errs) = r?;
        per_level[li].push(errs);
    }
    // Parallel collection preserves job order per level; keep seed order
    // explicit anyway so the report is structurally deterministic.
    for runs in &mut per_level {
        runs.sort_by_key(|r| seeds.iter().position(|&s| s == r.seed));
    }

    let levels: Vec<LevelStats> = values
        .iter()
        .zip(per_level)
        .map(|(&value, runs)| {
            let (linf_mean, linf_std) =
                mean_std(runs.iter().map(|r| r.cross_section_linf).collect::<Vec<_>>().into_iter());
            let (l2_mean, l2_std) =
                mean_std(runs.iter().map(|r| r.cross_section_l2).collect::<Vec<_>>().into_iter());
            let (front_rms_mean, front_rms_std) =
                mean_std(runs.iter().map(|r| r.front_rms).collect::<Vec<_>>().into_iter());
            LevelStats {
                value,
                runs,
                linf_mean,
                linf_std,
                l2_mean,
                l2_std,
                front_rms_mean,
                front_rms_std,
            }
        })
        .collect();

    let primary: Vec<f64> = levels
        .iter()
        .map(|l| match sweep.primary_metric() {
            "front_rms" => l.front_rms_mean,
            _ => l.linf_mean,
        })
        .collect();
    let monotone = primary.windows(2).all(|w| w[1] < w[0]);

    Ok(ConvergenceReport {
        sweep: sweep.variable().to_string(),
        primary_metric: sweep.primary_metric().to_string(),
        seeds: seeds.to_vec(),
        levels,
        monotone,
    })
}

fn level_context(sweep: &SweepSpec, level_idx: usize, seed: u64, e: Error) -> Error {
    let (n, dx) = sweep.run_inputs(level_idx);
    Error::config(format!(
        "sweep level {}={}, seed {seed}: {e}",
        sweep.variable(),
        match sweep {
            SweepSpec::ScaleFactor { .. } => n.to_string(),
            SweepSpec::CellWidth { .. } => dx.to_string(),
        }
    ))
}
