use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Material constants for the liquid phase.
///
/// Units are any internally consistent set; the built-in water preset uses
/// mm, s, K, J, kg. Only `alpha` and `beta()` enter the solvers directly,
/// the remaining constants are kept so that `alpha == k_l / (rho * c)`
/// stays checkable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Thermal diffusivity `k_l / (rho * c)`.
    pub alpha: f64,
    /// Specific heat capacity of the liquid.
    pub c: f64,
    /// Latent heat of melting.
    pub l: f64,
    /// Density of the liquid.
    pub rho: f64,
    /// Thermal conductivity of the liquid.
    pub k_l: f64,
}

impl PhysicalParams {
    /// Builds a parameter set from all five constants, checking that the
    /// diffusivity is consistent with `k_l / (rho * c)`.
    pub fn new(alpha: f64, c: f64, l: f64, rho: f64, k_l: f64) -> Result<Self> {
        let p = PhysicalParams { alpha, c, l, rho, k_l };
        p.validate()?;
        Ok(p)
    }

    /// Unit-free parameter set: diffusivity `alpha` and Stefan ratio
    /// `beta = l / c` chosen directly, with `c = rho = 1` and `k_l = alpha`.
    pub fn dimensionless(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, 1.0, beta, 1.0, alpha)
    }

    /// Ratio of latent to sensible heat, `beta = l / c`, in temperature units.
    pub fn beta(&self) -> f64 {
        self.l / self.c
    }

    /// Front advance per absorbed walker batch: `delta_s = (c / l) * dx`.
    pub fn front_step(&self, dx: f64) -> f64 {
        dx * self.c / self.l
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("c", self.c),
            ("l", self.l),
            ("rho", self.rho),
            ("k_l", self.k_l),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::config(format!(
                    "physical parameter {name} must be finite and positive, got {v}"
                )));
            }
        }
        let derived = self.k_l / (self.rho * self.c);
        if (derived / self.alpha - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!(
                "alpha = {} inconsistent with k_l/(rho*c) = {}",
                self.alpha, derived
            )));
        }
        Ok(())
    }
}

/// Water near 0 degC in mm / s / K / J / kg units: c = 4.22 kJ/(kg K),
/// l = 334 kJ/kg, alpha = 0.1429 mm^2/s. Conductivity is derived from the
/// other three so the set is internally consistent; the resulting Stefan
/// ratio is beta = l/c = 79.147 K.
pub fn water_params() -> PhysicalParams {
    let c = 4220.0; // J/(kg K)
    let l = 334_000.0; // J/kg
    let alpha = 0.1429; // mm^2/s
    let rho = 1.0e-6; // kg/mm^3
    PhysicalParams {
        alpha,
        c,
        l,
        rho,
        k_l: alpha * rho * c, // W/(mm K)
    }
}

/// Space/time lattice for the walk. The time step is always slaved to the
/// cell width through `dt = dx^2 / (2 alpha)`, which is what makes the
/// unbiased +-1 walk diffuse with the requested diffusivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Cell width.
    pub dx: f64,
    /// Time step, always `dx^2 / (2 alpha)`.
    pub dt: f64,
    /// Number of lattice nodes `x_i = i * dx`; 0 means an unbounded domain
    /// (free-space runs only).
    pub n_x: usize,
    /// Number of time levels `t_j = j * dt`.
    pub n_t: usize,
    /// Nominal domain length (`f64::INFINITY` for unbounded grids).
    pub domain_len: f64,
    /// Nominal end time.
    pub t_max: f64,
}

/// Ceiling that forgives the ~1 ulp downward jitter of quotients such as
/// `1.0 / 0.01`, so nominal integer ratios stay exact.
fn robust_ceil(x: f64) -> usize {
    (x - 1e-9 * x.max(1.0)).ceil() as usize
}

/// Builds the lattice for a diffusivity and resolution. `domain_len` may be
/// `f64::INFINITY` for free-space walks, in which case `n_x` is set to 0.
pub fn make_grid(alpha: f64, dx: f64, domain_len: f64, t_max: f64) -> Result<GridSpec> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::config(format!("alpha must be positive, got {alpha}")));
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::config(format!("dx must be positive, got {dx}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::config(format!("t_max must be positive, got {t_max}")));
    }
    if domain_len <= 0.0 || domain_len.is_nan() {
        return Err(Error::config(format!(
            "domain length must be positive, got {domain_len}"
        )));
    }
    let dt = dx * dx / (2.0 * alpha);
    let n_t = robust_ceil(t_max / dt).max(1);
    let n_x = if domain_len.is_finite() {
        let n = robust_ceil(domain_len / dx);
        if n < 2 {
            return Err(Error::config(format!(
                "domain {domain_len} shorter than two cells of width {dx}"
            )));
        }
        n
    } else {
        0
    };
    Ok(GridSpec {
        dx,
        dt,
        n_x,
        n_t,
        domain_len,
        t_max,
    })
}

impl GridSpec {
    /// Node coordinates `x_i = i * dx`. Empty for unbounded grids.
    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| i as f64 * self.dx).collect()
    }

    /// Time coordinates `t_j = j * dt`.
    pub fn ts(&self) -> Vec<f64> {
        (0..self.n_t).map(|j| j as f64 * self.dt).collect()
    }

    pub fn is_bounded(&self) -> bool {
        self.n_x > 0
    }

    /// Checks that this grid's time step matches `dx^2 / (2 alpha)` for the
    /// given parameter set.
    pub fn check_coupling(&self, params: &PhysicalParams) -> Result<()> {
        let want = self.dx * self.dx / (2.0 * params.alpha);
        if (self.dt / want - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "grid dt = {} does not match dx^2/(2 alpha) = {} for alpha = {}",
                self.dt, want, params.alpha
            )));
        }
        Ok(())
    }

    /// Index of the time level nearest to `t`.
    pub fn nearest_time_index(&self, t: f64) -> usize {
        let j = (t / self.dt).round();
        (j.max(0.0) as usize).min(self.n_t.saturating_sub(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_matches_reference_resolution() {
        // dx = 1e-2 on the unit interval up to t = 0.5 with alpha = 1.
        let g = make_grid(1.0, 0.01, 1.0, 0.5).unwrap();
        assert!((g.dt - 5e-5).abs() < 1e-18);
        assert_eq!(g.n_x, 100);
        assert_eq!(g.n_t, 10_000);
    }

    #[test]
    fn grid_accepts_unbounded_domain() {
        // Free-space walk resolution: dx = sqrt(2/5) gives dt = 1/5.
        let dx = (2.0f64 / 5.0).sqrt();
        let g = make_grid(1.0, dx, f64::INFINITY, 1.0).unwrap();
        assert!((g.dt - 0.2).abs() < 1e-15);
        assert_eq!(g.n_t, 5);
        assert_eq!(g.n_x, 0);
        assert!(!g.is_bounded());
    }

    #[test]
    fn grid_single_step() {
        let g = make_grid(0.5, 0.1, 1.0, 0.01).unwrap();
        assert!((g.dt - 0.01).abs() < 1e-15);
        assert_eq!(g.n_t, 1);
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(make_grid(0.0, 0.01, 1.0, 0.5).is_err());
        assert!(make_grid(1.0, -0.01, 1.0, 0.5).is_err());
        assert!(make_grid(1.0, 0.01, 1.0, 0.0).is_err());
        assert!(make_grid(1.0, 1.2, 1.0, 0.5).is_err()); // < 2 cells
    }

    #[test]
    fn water_preset_is_consistent() {
        let w = water_params();
        w.validate().unwrap();
        assert!((w.alpha - 0.1429).abs() < 1e-15);
        // beta resolves to the exact ratio l/c, not its rounded literature value.
        assert!((w.beta() - 79.146_919_431_279_62).abs() < 1e-10);
        assert!((w.front_step(1.0) - 0.012_634_730_538_922_156).abs() < 1e-15);
    }

    #[test]
    fn dimensionless_params() {
        let p = PhysicalParams::dimensionless(1.0, 2.0).unwrap();
        assert_eq!(p.beta(), 2.0);
        assert_eq!(p.alpha, 1.0);
        p.validate().unwrap();
    }

    #[test]
    fn inconsistent_alpha_rejected() {
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn nearest_time_index_clamps() {
        let g = make_grid(1.0, 0.1, 1.0, 0.05).unwrap();
        assert_eq!(g.nearest_time_index(-1.0), 0);
        assert_eq!(g.nearest_time_index(1e9), g.n_t - 1);
    }
}
