//! Shared scenario builders for the criterion benchmarks: small,
//! fixed-seed configurations that finish in milliseconds so timing noise
//! comes from the solver, not from setup.

use stefanwalk::{make_grid, BoundaryDriver, FdmConfig, PhysicalParams, StefanRunConfig};

pub fn unit_params() -> PhysicalParams {
    PhysicalParams::dimensionless(1.0, 1.0).expect("unit constants are valid")
}

/// Constant-unit-temperature melting run on the unit interval.
pub fn small_stefan(n: u32, dx: f64, t_max: f64, seed: u64) -> StefanRunConfig {
    let params = unit_params();
    let grid = make_grid(params.alpha, dx, 1.0, t_max).expect("benchmark grid is valid");
    StefanRunConfig::new(params, grid, BoundaryDriver::Constant(1.0), n, seed)
}

/// Matching finite-difference configuration at the default time step.
pub fn small_fdm(dx: f64, t_max: f64) -> FdmConfig {
    FdmConfig::with_default_dt(unit_params(), BoundaryDriver::Constant(1.0), dx, 1.0, t_max)
}
