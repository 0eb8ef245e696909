//! Moderate-resolution checks that the walkers actually solve the physics:
//! free walks reproduce the Gaussian kernel, fixed-boundary walks track the
//! series solution, and moving-front walks track the similarity solution and
//! the exact exponential-driver solution.

use stefanwalk::analytic;
use stefanwalk::{
    make_grid, simulate_fixed_dirichlet, simulate_free, simulate_stefan, simulate_stefan_flux,
    BoundaryDriver, HeatRunConfig, PhysicalParams, StefanRunConfig,
};

fn unit(beta: f64) -> PhysicalParams {
    PhysicalParams::dimensionless(1.0, beta).unwrap()
}

#[test]
fn free_walk_matches_gaussian_kernel() {
    // dt = dx^2 / 2 with alpha = 1; pick dx so 200 steps reach t = 1.
    let steps = 200;
    let dx = (2.0 / steps as f64).sqrt();
    let h = simulate_free(100_000, 0.0, steps, dx, 42, 1).unwrap();
    let t = steps as f64 * dx * dx / 2.0;
    assert!((t - 1.0).abs() < 1e-12);
    let l1 = h.l1_distance(|x| analytic::gaussian_temperature(x, t, 1.0).unwrap());
    assert!(l1 < 0.05, "L1 distance to Gaussian too large: {l1}");
    assert!((h.variance() / (steps as f64 * dx * dx) - 1.0).abs() < 0.05);
}

#[test]
fn fixed_walk_tracks_series_solution_while_cooling() {
    // Unit initial temperature, both ends held at zero.
    let cfg = HeatRunConfig {
        params: unit(1.0),
        grid: make_grid(1.0, 0.02, 1.0, 0.2).unwrap(),
        left: BoundaryDriver::Constant(0.0),
        right: BoundaryDriver::Constant(0.0),
        n: 2_000,
        seed: 314,
        workers: 1,
    };
    let run = simulate_fixed_dirichlet(&cfg, |_| 1.0).unwrap();
    for &t in &[0.05, 0.1, 0.2] {
        let got = run.solution.sample(0.5, t);
        let want = analytic::fourier_temperature(0.5, t, 1.0, 1.0, 100).unwrap();
        assert!(
            (got - want).abs() < 0.08,
            "t={t}: walk {got} vs series {want}"
        );
    }
    assert!(run.ledger.balances());
}

#[test]
fn stefan_walk_tracks_similarity_solution() {
    let dx = 0.02;
    let cfg = StefanRunConfig::new(
        unit(1.0),
        make_grid(1.0, dx, 1.0, 0.3).unwrap(),
        BoundaryDriver::Constant(1.0),
        1_000,
        7,
    );
    let run = simulate_stefan(&cfg).unwrap();
    let sol = &run.solution;
    let lambda = analytic::solve_lambda(1.0, 1.0, 1e-12).unwrap().lambda;

    // Front: one-cell head start plus the similarity curve.
    let front = sol.front.as_ref().unwrap();
    let s_end = *front.s.last().unwrap();
    let want_end = dx + analytic::stefan_front(0.3, 1.0, lambda);
    assert!(
        (s_end - want_end).abs() < 0.04,
        "front at t=0.3: {s_end} vs {want_end}"
    );

    // Temperatures across the melted region at the final time.
    let (t_j, slice) = sol.cross_section(0.3);
    for (i, &x) in sol.xs.iter().enumerate() {
        if x > 0.5 {
            break;
        }
        let want = analytic::stefan_temperature(x, t_j, 1.0, 1.0, lambda).unwrap();
        assert!(
            (slice[i] - want).abs() < 0.09,
            "x={x}: walk {} vs similarity {want}",
            slice[i]
        );
    }
    assert!(run.ledger.balances());
}

#[test]
fn stefan_walk_tracks_exponential_driver_solution() {
    // Boundary e^t - 1 has the exact solution T = e^(t-x) - 1, s = t.
    let dx = 0.02;
    let cfg = StefanRunConfig::new(
        unit(1.0),
        make_grid(1.0, dx, 1.0, 0.5).unwrap(),
        BoundaryDriver::Exponential,
        1_000,
        11,
    );
    let run = simulate_stefan(&cfg).unwrap();
    let front = run.solution.front.as_ref().unwrap();
    let s_end = *front.s.last().unwrap();
    assert!(
        (s_end - (dx + 0.5)).abs() < 0.05,
        "front at t=0.5: {s_end} vs {}",
        dx + 0.5
    );
    let got = run.solution.sample(0.3, 0.5);
    let want = analytic::special_temperature(0.3, 0.5).unwrap();
    assert!((got - want).abs() < 0.09, "T(0.3, 0.5): {got} vs {want}");
}

#[test]
fn flux_walk_reproduces_unit_boundary_temperature() {
    // The gradient -q0/sqrt(t) with q0 = 1/(sqrt(pi) erf(lambda)) drives the
    // same melt as a unit boundary temperature, so T(0, t) should hover
    // around one once the seeded walkers spread out.
    let lambda = analytic::solve_lambda(1.0, 1.0, 1e-12).unwrap().lambda;
    let q0 = analytic::flux_amplitude(lambda).unwrap();
    let cfg = StefanRunConfig::new(
        unit(1.0),
        make_grid(1.0, 0.02, 1.0, 0.5).unwrap(),
        BoundaryDriver::InverseSqrtFlux { q0 },
        1_000,
        23,
    );
    let run = simulate_stefan_flux(&cfg).unwrap();
    let sol = &run.solution;
    let j0 = sol.ts.iter().position(|&t| t >= 0.1).unwrap();
    let boundary: Vec<f64> = (j0..sol.ts.len()).map(|j| sol.temperatures.at(0, j)).collect();
    let mean = boundary.iter().sum::<f64>() / boundary.len() as f64;
    assert!(
        (mean - 1.0).abs() < 0.15,
        "time-averaged boundary temperature {mean} should be near 1"
    );
    // And the front should track the same similarity curve.
    let front = sol.front.as_ref().unwrap();
    let s_end = *front.s.last().unwrap();
    let want = 0.02 + analytic::stefan_front(0.5, 1.0, lambda);
    assert!((s_end - want).abs() < 0.06, "front {s_end} vs {want}");
}
