//! Random-walk Monte Carlo solvers.
//!
//! Temperature is carried by discrete walkers: `n` walkers represent one
//! degree, each walker hops one cell left or right per time step with
//! probability 1/2, and the lattice couples the step sizes through
//! `dt = dx^2 / (2 alpha)`. Negative walker counts carry temperatures below
//! the melting point. For moving-front runs, a walker stepping just past the
//! front is absorbed and shifts the front by `(c/l) dx / n` in the direction
//! of its sign; the shift is applied immediately, so later walkers within
//! the same time step see the moved front.
//!
//! Randomness comes from one dedicated stream per data index (walker index
//! for free runs, time step and cell for lattice runs), so results are a
//! pure function of the master seed no matter how many workers share the
//! step: workers only split cells whose moves cannot touch the front, and
//! their integer deposits merge by summation.

use crate::boundary::{BoundaryDriver, DriverKind};
use crate::error::{Error, Result};
use crate::field::{Field2, FrontCurve, FrontState, RunMetadata, SolutionField, WalkerLedger};
use crate::params::{GridSpec, PhysicalParams};
use crate::rng::{StreamFactory, RNG_DESCRIPTION};
use rayon::prelude::*;
use std::time::Instant;

/// Cells per parallel work unit in the bulk pass.
const BULK_CHUNK: usize = 32;

/// Largest front shift per absorbed walker, as a fraction of `dx`. Coarser
/// resolutions make single absorptions move the front by a visible jump and
/// the run no longer approximates the Stefan condition.
const MAX_FRONT_STEP_FRACTION: f64 = 0.1;

fn round_count(x: f64) -> i64 {
    // f64::round ties away from zero, matching the reference rounding.
    x.round() as i64
}

#[inline]
fn stream_id(step: usize, cell: usize, n_x: usize) -> u64 {
    step as u64 * n_x as u64 + cell as u64
}

// ---------------------------------------------------------------------------
// Free-space walk
// ---------------------------------------------------------------------------

/// Final-position histogram of a free random walk released at `x0`.
///
/// After `steps` hops every walker sits on a lattice point of the same
/// parity, so occupied points are `2 dx` apart and the natural bin width is
/// `2 dx`: bin `m` holds the point `x0 + (2 m - steps) dx`.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub x0: f64,
    pub dx: f64,
    pub steps: usize,
    pub n_walkers: u64,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin_width(&self) -> f64 {
        2.0 * self.dx
    }

    /// Lattice point at the center of bin `m`.
    pub fn center(&self, m: usize) -> f64 {
        self.x0 + (2.0 * m as f64 - self.steps as f64) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|m| self.center(m)).collect()
    }

    /// Probability density per bin: `count / (n_walkers * 2 dx)`.
    pub fn densities(&self) -> Vec<f64> {
        let norm = 1.0 / (self.n_walkers as f64 * self.bin_width());
        self.counts.iter().map(|&c| c as f64 * norm).collect()
    }

    pub fn mean(&self) -> f64 {
        let total: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(m, &c)| c as f64 * self.center(m))
            .sum();
        total / self.n_walkers as f64
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let total: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                let d = self.center(m) - mean;
                c as f64 * d * d
            })
            .sum();
        total / self.n_walkers as f64
    }

    /// L1 distance between the bin densities and a reference density
    /// evaluated at the bin centers: `sum |rho_m - ref(x_m)| * 2 dx`.
    pub fn l1_distance(&self, reference: impl Fn(f64) -> f64) -> f64 {
        self.densities()
            .iter()
            .enumerate()
            .map(|(m, &rho)| (rho - reference(self.center(m))).abs() * self.bin_width())
            .sum()
    }
}

/// Walks `n_walkers` independent walkers for `steps` hops from `x0` and
/// returns their final-position histogram. Walker `w` draws from stream `w`,
/// so any split of walkers over workers produces identical results.
pub fn simulate_free(
    n_walkers: u64,
    x0: f64,
    steps: usize,
    dx: f64,
    seed: u64,
    workers: usize,
) -> Result<Histogram> {
    if n_walkers == 0 {
        return Err(Error::config("need at least one walker"));
    }
    if steps == 0 {
        return Err(Error::config("need at least one step"));
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::config(format!("dx must be positive, got {dx}")));
    }
    if workers == 0 {
        return Err(Error::config("need at least one worker"));
    }
    let factory = StreamFactory::new(seed);
    let n_bins = steps + 1;

    let walk_range = |lo: u64, hi: u64| -> Vec<u64> {
        let mut counts = vec![0u64; n_bins];
        for w in lo..hi {
            let rights = factory.stream(w).right_count(steps as u64);
            counts[rights as usize] += 1;
        }
        counts
    };

    const WALKER_CHUNK: u64 = 4096;
    let chunks: Vec<(u64, u64)> = (0..n_walkers)
        .step_by(WALKER_CHUNK as usize)
        .map(|lo| (lo, (lo + WALKER_CHUNK).min(n_walkers)))
        .collect();

    let partials: Vec<Vec<u64>> = if workers == 1 {
        chunks.iter().map(|&(lo, hi)| walk_range(lo, hi)).collect()
    } else {
        let pool = build_pool(workers)?;
        pool.install(|| {
            chunks
                .par_iter()
                .map(|&(lo, hi)| walk_range(lo, hi))
                .collect()
        })
    };

    let mut counts = vec![0u64; n_bins];
    for p in partials {
        for (c, v) in counts.iter_mut().zip(p) {
            *c += v;
        }
    }
    Ok(Histogram {
        x0,
        dx,
        steps,
        n_walkers,
        counts,
    })
}

// ---------------------------------------------------------------------------
// Shared lattice machinery
// ---------------------------------------------------------------------------

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("could not build worker pool: {e}")))
}

/// Moves all walkers of one front-independent cell. Targets at or below
/// cell 0 leave through the fixed boundary; targets above `right_limit`
/// leave through the far boundary (two-sided runs only).
#[inline]
fn move_bulk_cell(
    factory: &StreamFactory,
    sid: u64,
    i: usize,
    c: i64,
    right_limit: usize,
    next: &mut [i64],
    exits: &mut i64,
) {
    let sign = if c < 0 { -1 } else { 1 };
    let m = c.unsigned_abs();
    let rights = factory.stream(sid).right_count(m) as i64;
    let lefts = m as i64 - rights;
    let rt = i + 1;
    if rt <= right_limit {
        next[rt] += sign * rights;
    } else {
        *exits += sign * rights;
    }
    if i >= 2 {
        next[i - 1] += sign * lefts;
    } else {
        *exits += sign * lefts;
    }
}

/// Moves the walkers of cells `[lo, hi)` at step `j`, merging deposits into
/// `next`. Splitting over workers cannot change the result: each cell draws
/// from its own stream and deposits are integer sums.
// The loop index doubles as the cell id for stream selection and neighbor
// arithmetic, so iterating over indices is clearer than `enumerate`.
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn bulk_pass(
    factory: &StreamFactory,
    j: usize,
    n_x: usize,
    lo: usize,
    hi: usize,
    right_limit: usize,
    cur: &[i64],
    next: &mut [i64],
    exits: &mut i64,
    pool: Option<&rayon::ThreadPool>,
) {
    match pool {
        None => {
            for i in lo..hi {
                let c = cur[i];
                if c != 0 {
                    move_bulk_cell(factory, stream_id(j, i, n_x), i, c, right_limit, next, exits);
                }
            }
        }
        Some(pool) => {
            let ranges: Vec<(usize, usize)> = (lo..hi)
                .step_by(BULK_CHUNK)
                .map(|a| (a, (a + BULK_CHUNK).min(hi)))
                .collect();
            let partials: Vec<(Vec<i64>, i64)> = pool.install(|| {
                ranges
                    .par_iter()
                    .map(|&(a, b)| {
                        let mut local = vec![0i64; n_x];
                        let mut local_exits = 0i64;
                        for i in a..b {
                            let c = cur[i];
                            if c != 0 {
                                move_bulk_cell(
                                    factory,
                                    stream_id(j, i, n_x),
                                    i,
                                    c,
                                    right_limit,
                                    &mut local,
                                    &mut local_exits,
                                );
                            }
                        }
                        (local, local_exits)
                    })
                    .collect()
            });
            for (local, local_exits) in partials {
                for (n, l) in next.iter_mut().zip(local) {
                    *n += l;
                }
                *exits += local_exits;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Two-sided fixed-boundary walk (no front)
// ---------------------------------------------------------------------------

/// Configuration for the fixed-boundary heat-equation walk on `[0, L]` with
/// prescribed temperatures at both ends.
#[derive(Debug, Clone)]
pub struct HeatRunConfig {
    pub params: PhysicalParams,
    pub grid: GridSpec,
    pub left: BoundaryDriver,
    pub right: BoundaryDriver,
    /// Walkers per degree.
    pub n: u32,
    pub seed: u64,
    pub workers: usize,
}

/// A finished walk: the temperature field plus its exact walker ledger.
#[derive(Debug, Clone)]
pub struct RwRun {
    pub solution: SolutionField,
    pub ledger: WalkerLedger,
}

/// Exact integer accounting of every walker in a finished run.
pub fn absorbed_ledger(run: &RwRun) -> WalkerLedger {
    run.ledger
}

fn validate_common(
    grid: &GridSpec,
    params: &PhysicalParams,
    n: u32,
    workers: usize,
) -> Result<()> {
    params.validate()?;
    if !grid.is_bounded() {
        return Err(Error::config("lattice runs need a bounded domain"));
    }
    if grid.n_x < 3 {
        return Err(Error::config(format!(
            "domain of {} cells is too short; need at least 3",
            grid.n_x
        )));
    }
    grid.check_coupling(params)?;
    if n == 0 {
        return Err(Error::config("scale factor n must be at least 1"));
    }
    if workers == 0 {
        return Err(Error::config("need at least one worker"));
    }
    Ok(())
}

/// Walks the heat equation on `[0, L]` with absorbing, prescribed-temperature
/// cells at both ends and initial interior profile `g`.
///
/// Both boundary cells are overwritten to `round(n * f(t_j))` every step;
/// walkers stepping into them are discarded (and tallied) first.
pub fn simulate_fixed_dirichlet(
    config: &HeatRunConfig,
    g: impl Fn(f64) -> f64,
) -> Result<RwRun> {
    let start = Instant::now();
    validate_common(&config.grid, &config.params, config.n, config.workers)?;
    for (side, driver) in [("left", &config.left), ("right", &config.right)] {
        if driver.kind() != DriverKind::Dirichlet {
            return Err(Error::config(format!(
                "{side} driver {} prescribes a gradient; this solver needs temperatures",
                driver.descriptor()
            )));
        }
    }
    let grid = config.grid;
    let (n_x, n_t) = (grid.n_x, grid.n_t);
    let nf = config.n as f64;
    let factory = StreamFactory::new(config.seed);
    let pool = if config.workers > 1 {
        Some(build_pool(config.workers)?)
    } else {
        None
    };

    let mut counts: Field2<i64> = Field2::zeros(n_x, n_t);
    let mut injected: i64 = 0;
    let mut exits: i64 = 0;

    // Interior initial profile.
    for i in 1..n_x - 1 {
        let c = round_count(nf * g(i as f64 * grid.dx));
        counts.set(i, 0, c);
        injected += c;
    }

    for j in 0..n_t {
        let t_j = j as f64 * grid.dt;
        let left = round_count(nf * config.left.eval(t_j));
        let right = round_count(nf * config.right.eval(t_j));
        counts.set(0, j, left);
        counts.set(n_x - 1, j, right);
        injected += left + right;
        if j + 1 == n_t {
            break;
        }
        let (cur, next) = counts.step_pair(j);
        bulk_pass(
            &factory,
            j,
            n_x,
            0,
            n_x,
            n_x - 2,
            cur,
            next,
            &mut exits,
            pool.as_ref(),
        );
    }

    let ledger = WalkerLedger {
        injected,
        in_field: counts.total_at(n_t - 1),
        absorbed_front_pos: 0,
        absorbed_front_neg: 0,
        absorbed_fixed: exits,
        discarded_solid: 0,
        clamp_events: 0,
    };
    debug_assert!(ledger.balances());

    let metadata = RunMetadata {
        solver: "rw-fixed".to_string(),
        seed: config.seed,
        n: config.n,
        dx: grid.dx,
        dt: grid.dt,
        alpha: config.params.alpha,
        beta: None,
        driver: format!(
            "left:{} right:{}",
            config.left.descriptor(),
            config.right.descriptor()
        ),
        workers: config.workers,
        rng: RNG_DESCRIPTION.to_string(),
        runtime_s: start.elapsed().as_secs_f64(),
        truncated: false,
        truncated_at_step: None,
        clamp_events: 0,
    };
    Ok(RwRun {
        solution: SolutionField {
            xs: grid.xs(),
            ts: grid.ts(),
            temperatures: counts.to_temperatures(config.n),
            front: None,
            metadata,
        },
        ledger,
    })
}

// ---------------------------------------------------------------------------
// Moving-front solvers
// ---------------------------------------------------------------------------

/// Configuration for a moving-front (melting/freezing) run on `[0, L]`.
#[derive(Debug, Clone)]
pub struct StefanRunConfig {
    pub params: PhysicalParams,
    pub grid: GridSpec,
    pub driver: BoundaryDriver,
    /// Walkers per degree.
    pub n: u32,
    pub seed: u64,
    pub workers: usize,
    /// Accept front shifts coarser than `dx / 10` per walker (the default
    /// guard keeps single absorptions from visibly jumping the front).
    pub allow_coarse_front: bool,
}

impl StefanRunConfig {
    pub fn new(
        params: PhysicalParams,
        grid: GridSpec,
        driver: BoundaryDriver,
        n: u32,
        seed: u64,
    ) -> Self {
        StefanRunConfig {
            params,
            grid,
            driver,
            n,
            seed,
            workers: 1,
            allow_coarse_front: false,
        }
    }

    fn validate(&self, want: DriverKind) -> Result<()> {
        validate_common(&self.grid, &self.params, self.n, self.workers)?;
        if self.driver.kind() != want {
            let (have, need) = match want {
                DriverKind::Dirichlet => ("a gradient", "temperatures"),
                DriverKind::Neumann => ("temperatures", "a gradient"),
            };
            return Err(Error::config(format!(
                "driver {} prescribes {have}; this solver needs {need}",
                self.driver.descriptor()
            )));
        }
        let per_walker = self.params.front_step(self.grid.dx) / self.n as f64;
        if !self.allow_coarse_front && per_walker > MAX_FRONT_STEP_FRACTION * self.grid.dx {
            return Err(Error::config(format!(
                "front moves {per_walker:.3e} per walker, more than {MAX_FRONT_STEP_FRACTION} dx = {:.3e}; \
                 raise n to at least {} (or allow coarse fronts explicitly)",
                MAX_FRONT_STEP_FRACTION * self.grid.dx,
                (self.params.front_step(self.grid.dx) / (MAX_FRONT_STEP_FRACTION * self.grid.dx))
                    .ceil() as u64,
            )));
        }
        Ok(())
    }
}

/// How walkers enter a moving-front run each step.
enum Injection<'a> {
    /// Boundary cell overwritten to `round(n * f(t_j))`.
    Temperature(&'a BoundaryDriver),
    /// First step seeds cell 1 with `n` walkers; afterwards the boundary
    /// cell is set to `round(-n dx h(t_j) + counts[1][j])`.
    Gradient(&'a BoundaryDriver),
}

/// Melting-front walk with a prescribed boundary temperature.
///
/// Per step: the boundary cell is overwritten to `round(n f(t_j))`, the
/// front position is recorded, and every walker hops. Hops into `(0, j_s]`
/// land; a hop onto `j_s + 1` is absorbed and moves the front by
/// `sign * (c/l) dx / n` immediately; everything else is discarded. The run
/// stops at `t_max` or when the front reaches the last cell (`truncated`).
pub fn simulate_stefan(config: &StefanRunConfig) -> Result<RwRun> {
    config.validate(DriverKind::Dirichlet)?;
    run_front_walk(config, Injection::Temperature(&config.driver), "rw-stefan")
}

/// Melting-front walk driven by a prescribed boundary gradient.
///
/// Identical walker dynamics to [`simulate_stefan`]; only the injection
/// differs: at `j = 0` cell 1 is seeded with `n` walkers (the gradient is
/// singular or unknown at `t = 0`), afterwards the boundary cell count is
/// `round(-n dx h(t_j) + counts[1][j])`.
pub fn simulate_stefan_flux(config: &StefanRunConfig) -> Result<RwRun> {
    config.validate(DriverKind::Neumann)?;
    run_front_walk(config, Injection::Gradient(&config.driver), "rw-stefan-flux")
}

// As in `bulk_pass`, the loop index is the cell id, not just a subscript.
#[allow(clippy::needless_range_loop)]
fn run_front_walk(config: &StefanRunConfig, injection: Injection, solver: &str) -> Result<RwRun> {
    let start = Instant::now();
    let grid = config.grid;
    let (n_x, n_t) = (grid.n_x, grid.n_t);
    let nf = config.n as f64;
    let factory = StreamFactory::new(config.seed);
    let pool = if config.workers > 1 {
        Some(build_pool(config.workers)?)
    } else {
        None
    };

    let ds = config.params.front_step(grid.dx) / nf;
    let mut front = FrontState::new(grid.dx, ds);
    let mut counts: Field2<i64> = Field2::zeros(n_x, n_t);
    let mut injected: i64 = 0;
    let mut exits: i64 = 0;
    let mut discarded_solid: i64 = 0;
    let mut executed = n_t;
    let mut truncated = false;

    for j in 0..n_t {
        let t_j = j as f64 * grid.dt;
        match injection {
            Injection::Temperature(driver) => {
                let bc = round_count(nf * driver.eval(t_j));
                debug_assert_eq!(counts.at(0, j), 0, "boundary cell must receive no deposits");
                counts.set(0, j, bc);
                injected += bc;
            }
            Injection::Gradient(driver) => {
                if j == 0 {
                    let seed_cell = config.n as i64;
                    counts.set(1, 0, seed_cell);
                    injected += seed_cell;
                } else {
                    let h = driver.eval(t_j);
                    let bc = round_count(-nf * grid.dx * h + counts.at(1, j) as f64);
                    debug_assert_eq!(counts.at(0, j), 0);
                    counts.set(0, j, bc);
                    injected += bc;
                }
            }
        }
        front.record();
        if j + 1 == n_t {
            break;
        }

        // Cells below the front cell at step start can never reach the
        // front this step (absorptions only happen while processing cells
        // at or beyond it, in ascending order), so they move in bulk.
        let js_start = front.cell();
        let bulk_end = js_start.min(n_x);
        let (cur, next) = counts.step_pair(j);
        bulk_pass(
            &factory,
            j,
            n_x,
            0,
            bulk_end,
            n_x - 1,
            cur,
            next,
            &mut exits,
            pool.as_ref(),
        );

        // Cells at or beyond the front: walker by walker, ascending, with
        // the front index re-read at every hop so absorptions within the
        // step shift the target window immediately.
        for i in bulk_end..n_x {
            let c = cur[i];
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { -1 } else { 1 };
            let m = c.unsigned_abs();
            let mut stream = factory.stream(stream_id(j, i, n_x));
            for _ in 0..m {
                let target = i as i64 + stream.step_direction();
                let js = front.cell() as i64;
                if target >= 1 && target <= js && target < n_x as i64 {
                    next[target as usize] += sign;
                } else if target == js + 1 {
                    front.absorb(sign);
                } else if target <= 0 {
                    exits += sign;
                } else {
                    // Stranded beyond the front by an earlier retreat and
                    // now stepping deeper into the solid.
                    discarded_solid += sign;
                }
            }
        }

        if front.cell() >= n_x - 1 {
            truncated = true;
            executed = j + 2;
            break;
        }
    }

    let last = executed - 1;
    let ledger = WalkerLedger {
        injected,
        in_field: counts.total_at(last),
        absorbed_front_pos: front.absorbed_pos,
        absorbed_front_neg: front.absorbed_neg,
        absorbed_fixed: exits,
        discarded_solid,
        clamp_events: front.clamp_events,
    };
    debug_assert!(ledger.balances());

    let metadata = RunMetadata {
        solver: solver.to_string(),
        seed: config.seed,
        n: config.n,
        dx: grid.dx,
        dt: grid.dt,
        alpha: config.params.alpha,
        beta: Some(config.params.beta()),
        driver: config.driver.descriptor(),
        workers: config.workers,
        rng: RNG_DESCRIPTION.to_string(),
        runtime_s: start.elapsed().as_secs_f64(),
        truncated,
        truncated_at_step: truncated.then_some(executed - 1),
        clamp_events: front.clamp_events,
    };
    let trajectory = front.trajectory.clone();
    let front_curve = FrontCurve {
        ts: (0..trajectory.len()).map(|j| j as f64 * grid.dt).collect(),
        s: trajectory,
    };
    if executed < n_t {
        counts = counts.truncate_time(executed);
    }
    Ok(RwRun {
        solution: SolutionField {
            xs: grid.xs(),
            ts: (0..executed).map(|j| j as f64 * grid.dt).collect(),
            temperatures: counts.to_temperatures(config.n),
            front: Some(front_curve),
            metadata,
        },
        ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_grid;

    fn unit_params(beta: f64) -> PhysicalParams {
        PhysicalParams::dimensionless(1.0, beta).unwrap()
    }

    #[test]
    fn free_single_step_splits_evenly() {
        let h = simulate_free(100_000, 0.0, 1, 0.1, 5, 1).unwrap();
        assert_eq!(h.counts().len(), 2);
        let left = h.counts()[0] as f64;
        let total = h.n_walkers as f64;
        // 5 sigma of a fair binomial split
        assert!((left / total - 0.5).abs() < 5.0 * 0.5 / total.sqrt());
        assert_eq!(h.counts().iter().sum::<u64>(), h.n_walkers);
        assert_eq!(h.center(0), -0.1);
        assert_eq!(h.center(1), 0.1);
    }

    #[test]
    fn free_variance_tracks_step_count() {
        let steps = 100;
        let dx = (2.0f64 / 5.0).sqrt() / 2.0;
        let h = simulate_free(50_000, 0.0, steps, dx, 11, 1).unwrap();
        let expected = steps as f64 * dx * dx;
        assert!((h.variance() / expected - 1.0).abs() < 0.05);
        assert!(h.mean().abs() < 0.05);
    }

    #[test]
    fn free_walk_is_deterministic_and_worker_independent() {
        let a = simulate_free(10_000, 0.0, 50, 0.1, 7, 1).unwrap();
        let b = simulate_free(10_000, 0.0, 50, 0.1, 7, 4).unwrap();
        assert_eq!(a.counts(), b.counts());
        let c = simulate_free(10_000, 0.0, 50, 0.1, 8, 1).unwrap();
        assert_ne!(a.counts(), c.counts());
    }

    #[test]
    fn free_rejects_bad_config() {
        assert!(simulate_free(0, 0.0, 1, 0.1, 0, 1).is_err());
        assert!(simulate_free(10, 0.0, 0, 0.1, 0, 1).is_err());
        assert!(simulate_free(10, 0.0, 1, 0.0, 0, 1).is_err());
        assert!(simulate_free(10, 0.0, 1, 0.1, 0, 0).is_err());
    }

    fn fixed_config(n: u32, seed: u64) -> HeatRunConfig {
        HeatRunConfig {
            params: unit_params(1.0),
            grid: make_grid(1.0, 0.05, 1.0, 0.05).unwrap(),
            left: BoundaryDriver::Constant(0.0),
            right: BoundaryDriver::Constant(0.0),
            n,
            seed,
            workers: 1,
        }
    }

    #[test]
    fn fixed_zero_everything_stays_zero() {
        let run = simulate_fixed_dirichlet(&fixed_config(100, 3), |_| 0.0).unwrap();
        let temps = &run.solution.temperatures;
        for j in 0..temps.n_t() {
            assert!(temps.time_slice(j).iter().all(|&v| v == 0.0));
        }
        assert!(run.ledger.balances());
        assert_eq!(run.ledger.injected, 0);
    }

    #[test]
    fn fixed_boundary_cells_follow_the_drivers() {
        let mut cfg = fixed_config(100, 3);
        cfg.left = BoundaryDriver::Constant(1.0);
        cfg.right = BoundaryDriver::Sinusoid;
        let run = simulate_fixed_dirichlet(&cfg, |_| 0.0).unwrap();
        let sol = &run.solution;
        for (j, &t) in sol.ts.iter().enumerate() {
            assert_eq!(sol.temperatures.at(0, j), 1.0);
            let want = (100.0 * t.sin()).round() / 100.0;
            assert_eq!(sol.temperatures.at(sol.xs.len() - 1, j), want);
        }
        assert!(run.ledger.balances());
    }

    #[test]
    fn fixed_ledger_balances_with_unit_initial_profile() {
        let run = simulate_fixed_dirichlet(&fixed_config(50, 9), |_| 1.0).unwrap();
        assert!(run.ledger.balances());
        // 18 interior cells at 50 walkers each.
        assert_eq!(run.ledger.injected, 18 * 50);
        assert!(run.ledger.absorbed_fixed > 0);
    }

    #[test]
    fn fixed_worker_count_does_not_change_results() {
        let mut a = fixed_config(200, 21);
        a.left = BoundaryDriver::Constant(1.0);
        let run1 = simulate_fixed_dirichlet(&a, |_| 1.0).unwrap();
        a.workers = 4;
        let run4 = simulate_fixed_dirichlet(&a, |_| 1.0).unwrap();
        for j in 0..run1.solution.temperatures.n_t() {
            assert_eq!(
                run1.solution.temperatures.time_slice(j),
                run4.solution.temperatures.time_slice(j)
            );
        }
        assert_eq!(run1.ledger, run4.ledger);
    }

    fn stefan_config(n: u32, seed: u64, driver: BoundaryDriver) -> StefanRunConfig {
        StefanRunConfig::new(
            unit_params(1.0),
            make_grid(1.0, 0.02, 1.0, 0.1).unwrap(),
            driver,
            n,
            seed,
        )
    }

    #[test]
    fn stefan_zero_driver_leaves_front_alone() {
        let run = simulate_stefan(&stefan_config(100, 1, BoundaryDriver::Constant(0.0))).unwrap();
        let front = run.solution.front.as_ref().unwrap();
        assert!(front.s.iter().all(|&s| s == 0.02));
        assert_eq!(run.ledger.injected, 0);
        assert!(run.ledger.balances());
    }

    #[test]
    fn stefan_front_starts_one_cell_in_and_advances() {
        let run = simulate_stefan(&stefan_config(100, 2, BoundaryDriver::Constant(1.0))).unwrap();
        let front = run.solution.front.as_ref().unwrap();
        assert_eq!(front.s[0], 0.02);
        assert!(front.s.last().unwrap() > &0.1);
        // Nonnegative driver: the front never retreats.
        for w in front.s.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(run.ledger.balances());
        assert_eq!(run.ledger.absorbed_front_neg, 0);
    }

    #[test]
    fn stefan_ledger_reconstructs_front_displacement() {
        let run = simulate_stefan(&stefan_config(150, 4, BoundaryDriver::Exponential)).unwrap();
        let front = run.solution.front.as_ref().unwrap();
        let ds = unit_params(1.0).front_step(0.02) / 150.0;
        let net = run.ledger.absorbed_front_pos as i64 - run.ledger.absorbed_front_neg as i64
            + run.ledger.clamp_events as i64;
        let rebuilt = 0.02 + net as f64 * ds;
        assert_eq!(rebuilt.to_bits(), front.s.last().unwrap().to_bits());
    }

    #[test]
    fn stefan_seed_and_worker_determinism() {
        let base = stefan_config(120, 33, BoundaryDriver::Constant(1.0));
        let a = simulate_stefan(&base).unwrap();
        let b = simulate_stefan(&base).unwrap();
        let mut with_workers = base.clone();
        with_workers.workers = 3;
        let c = simulate_stefan(&with_workers).unwrap();
        let fa = a.solution.front.as_ref().unwrap();
        let fb = b.solution.front.as_ref().unwrap();
        let fc = c.solution.front.as_ref().unwrap();
        assert_eq!(fa.s, fb.s);
        assert_eq!(fa.s, fc.s);
        assert_eq!(a.ledger, c.ledger);
        for j in 0..a.solution.temperatures.n_t() {
            assert_eq!(
                a.solution.temperatures.time_slice(j),
                c.solution.temperatures.time_slice(j)
            );
        }
    }

    #[test]
    fn stefan_refreezing_driver_retreats_the_front() {
        // Warm for a while, then hard freeze.
        let series = crate::ingest::TemperatureSeries::new(
            vec![0.0, 0.05, 0.06, 0.2],
            vec![2.0, 2.0, -3.0, -3.0],
        )
        .unwrap();
        let mut cfg = stefan_config(100, 8, BoundaryDriver::SampledTemperature(series));
        cfg.grid = make_grid(1.0, 0.02, 1.0, 0.2).unwrap();
        let run = simulate_stefan(&cfg).unwrap();
        let front = run.solution.front.as_ref().unwrap();
        let peak = front.s.iter().cloned().fold(0.0, f64::max);
        let last = *front.s.last().unwrap();
        assert!(peak > 0.05, "front should melt outward first, peak {peak}");
        assert!(last < peak, "front should retreat after the freeze");
        assert!(run.ledger.absorbed_front_neg > 0);
        assert!(run.ledger.balances());
    }

    #[test]
    fn stefan_hard_freeze_clamps_at_one_cell() {
        let run = simulate_stefan(&stefan_config(60, 6, BoundaryDriver::Constant(-2.0))).unwrap();
        let front = run.solution.front.as_ref().unwrap();
        assert!(front.s.iter().all(|&s| s >= 0.02));
        assert!(run.ledger.clamp_events > 0);
        assert!(run.solution.metadata.clamp_events > 0);
        assert!(run.ledger.balances());
    }

    #[test]
    fn stefan_truncates_when_front_reaches_far_end() {
        // Hot driver on a very short domain.
        let mut cfg = stefan_config(40, 5, BoundaryDriver::Constant(4.0));
        cfg.grid = make_grid(1.0, 0.02, 0.1, 1.0).unwrap(); // 5 cells
        let run = simulate_stefan(&cfg).unwrap();
        assert!(run.solution.metadata.truncated);
        assert!(run.solution.ts.len() < cfg.grid.n_t);
        assert_eq!(
            run.solution.temperatures.n_t(),
            run.solution.ts.len(),
            "field is trimmed to executed steps"
        );
        assert!(run.ledger.balances());
    }

    #[test]
    fn stefan_rejects_coarse_front_resolution() {
        // beta = 0.5 -> front step 2 dx / n; n = 10 gives dx / 5 > dx / 10.
        let cfg = StefanRunConfig::new(
            unit_params(0.5),
            make_grid(1.0, 0.02, 1.0, 0.05).unwrap(),
            BoundaryDriver::Constant(1.0),
            10,
            1,
        );
        let err = simulate_stefan(&cfg).unwrap_err();
        assert!(err.to_string().contains("raise n"), "{err}");
        let mut relaxed = cfg;
        relaxed.allow_coarse_front = true;
        simulate_stefan(&relaxed).unwrap();
    }

    #[test]
    fn stefan_rejects_wrong_driver_kind() {
        let cfg = stefan_config(100, 1, BoundaryDriver::InverseSqrtFlux { q0: 1.0 });
        assert!(simulate_stefan(&cfg).is_err());
        let cfg = stefan_config(100, 1, BoundaryDriver::Constant(1.0));
        assert!(simulate_stefan_flux(&cfg).is_err());
    }

    #[test]
    fn flux_seeds_then_tracks_gradient() {
        let mut cfg = stefan_config(500, 12, BoundaryDriver::InverseSqrtFlux { q0: 0.9108 });
        cfg.grid = make_grid(1.0, 0.02, 1.0, 0.1).unwrap();
        let run = simulate_stefan_flux(&cfg).unwrap();
        let temps = &run.solution.temperatures;
        // Step 0: seeded cell 1, empty boundary cell.
        assert_eq!(temps.at(1, 0), 1.0);
        assert_eq!(temps.at(0, 0), 0.0);
        // Afterwards the boundary cell holds round(-n dx h + c1)/n.
        let j = 50;
        let t_j = j as f64 * cfg.grid.dt;
        let h = -0.9108 / t_j.sqrt();
        let want = ((-500.0 * 0.02 * h + (temps.at(1, j) * 500.0)).round()) / 500.0;
        assert_eq!(temps.at(0, j), want);
        assert!(run.ledger.balances());
    }

    #[test]
    fn flux_with_zero_gradient_conserves_walkers_inward() {
        // After the seed, a zero-flux boundary only loses walkers, so the
        // field total never grows.
        let series =
            crate::ingest::TemperatureSeries::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let mut cfg = stefan_config(400, 3, BoundaryDriver::SampledFlux(series));
        cfg.grid = make_grid(1.0, 0.02, 1.0, 0.05).unwrap();
        let run = simulate_stefan_flux(&cfg).unwrap();
        let temps = &run.solution.temperatures;
        let mut prev = f64::INFINITY;
        for j in 0..temps.n_t() {
            let total: f64 = temps.time_slice(j).iter().sum();
            assert!(total <= prev + 1e-12);
            prev = total;
        }
        assert!(run.ledger.balances());
    }

    #[test]
    fn bulk_and_walker_paths_agree() {
        // Far from the front both paths must produce identical moves; run a
        // front walk whose front never leaves cell 1 and compare against the
        // fixed-boundary solver on the same seed/streams for interior cells.
        // Simpler direct check: the bulk popcount path is exercised by
        // every run above; here we pin one cell's split against stepwise
        // draws through the public rng contract.
        let factory = StreamFactory::new(77);
        let sid = stream_id(3, 5, 50);
        let mut next_a = vec![0i64; 50];
        let mut exits_a = 0;
        move_bulk_cell(&factory, sid, 5, 120, 49, &mut next_a, &mut exits_a);
        let mut stream = factory.stream(sid);
        let mut rights = 0;
        for _ in 0..120 {
            if stream.step_direction() == 1 {
                rights += 1;
            }
        }
        assert_eq!(next_a[6], rights);
        assert_eq!(next_a[4], 120 - rights);
        assert_eq!(exits_a, 0);
    }
}
