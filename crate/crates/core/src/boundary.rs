use crate::ingest::TemperatureSeries;

/// What a driver prescribes at the fixed boundary `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriverKind {
    /// Prescribed temperature `T(0, t) = f(t)`.
    Dirichlet,
    /// Prescribed gradient `dT/dx(0, t) = h(t)`.
    Neumann,
}

/// Time-dependent condition applied at the fixed boundary.
///
/// Temperatures are degrees above the melting point, so a Dirichlet driver
/// may go negative (refreezing). Neumann drivers return the gradient value
/// itself; a negative gradient means heat flowing into the domain.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryDriver {
    /// `f(t) = T0`.
    Constant(f64),
    /// `f(t) = e^t - 1`, the driver whose front moves as `s(t) = t`.
    Exponential,
    /// `f(t) = sin t`.
    Sinusoid,
    /// Piecewise-linear interpolation of a measured temperature series.
    SampledTemperature(TemperatureSeries),
    /// `h(t) = -q0 / sqrt(t)`, the gradient that reproduces a constant
    /// unit boundary temperature when `q0 = 1 / (sqrt(pi) erf(lambda))`.
    /// Conductivity is folded into `q0` (unit conductivity convention).
    InverseSqrtFlux { q0: f64 },
    /// Piecewise-linear interpolation of a measured gradient series.
    SampledFlux(TemperatureSeries),
}

impl BoundaryDriver {
    pub fn kind(&self) -> DriverKind {
        match self {
            BoundaryDriver::Constant(_)
            | BoundaryDriver::Exponential
            | BoundaryDriver::Sinusoid
            | BoundaryDriver::SampledTemperature(_) => DriverKind::Dirichlet,
            BoundaryDriver::InverseSqrtFlux { .. } | BoundaryDriver::SampledFlux(_) => {
                DriverKind::Neumann
            }
        }
    }

    /// Evaluates the driver at time `t`. Pure: same `t`, same value.
    ///
    /// `InverseSqrtFlux` is singular at `t = 0`; solvers replace the first
    /// step by a seeding rule and never evaluate it there.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            BoundaryDriver::Constant(t0) => *t0,
            BoundaryDriver::Exponential => t.exp() - 1.0,
            BoundaryDriver::Sinusoid => t.sin(),
            BoundaryDriver::SampledTemperature(series) => series.eval(t),
            BoundaryDriver::InverseSqrtFlux { q0 } => -q0 / t.sqrt(),
            BoundaryDriver::SampledFlux(series) => series.eval(t),
        }
    }

    /// Compact text form, identical to the CLI driver mini-language.
    pub fn descriptor(&self) -> String {
        match self {
            BoundaryDriver::Constant(t0) => format!("const:{t0}"),
            BoundaryDriver::Exponential => "exp".to_string(),
            BoundaryDriver::Sinusoid => "sin".to_string(),
            BoundaryDriver::SampledTemperature(series) => format!("csv:{}", series.source_label()),
            BoundaryDriver::InverseSqrtFlux { q0 } => format!("flux:{q0}"),
            BoundaryDriver::SampledFlux(series) => format!("fluxcsv:{}", series.source_label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_closed_forms() {
        assert_eq!(BoundaryDriver::Constant(2.5).eval(123.0), 2.5);
        assert!((BoundaryDriver::Exponential.eval(1.0) - (1f64.exp() - 1.0)).abs() < 1e-15);
        assert_eq!(BoundaryDriver::Exponential.eval(0.0), 0.0);
        assert!((BoundaryDriver::Sinusoid.eval(0.5) - 0.5f64.sin()).abs() < 1e-15);
        let h = BoundaryDriver::InverseSqrtFlux { q0: 0.9108 };
        assert!((h.eval(4.0) + 0.9108 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn kinds_partition_the_variants() {
        assert_eq!(BoundaryDriver::Constant(1.0).kind(), DriverKind::Dirichlet);
        assert_eq!(BoundaryDriver::Exponential.kind(), DriverKind::Dirichlet);
        assert_eq!(BoundaryDriver::Sinusoid.kind(), DriverKind::Dirichlet);
        assert_eq!(
            BoundaryDriver::InverseSqrtFlux { q0: 1.0 }.kind(),
            DriverKind::Neumann
        );
    }

    #[test]
    fn descriptors_round_trip_the_mini_language() {
        assert_eq!(BoundaryDriver::Constant(1.0).descriptor(), "const:1");
        assert_eq!(BoundaryDriver::Exponential.descriptor(), "exp");
        assert_eq!(BoundaryDriver::Sinusoid.descriptor(), "sin");
        assert_eq!(
            BoundaryDriver::InverseSqrtFlux { q0: 0.9108 }.descriptor(),
            "flux:0.9108"
        );
    }

    #[test]
    fn eval_is_pure() {
        let d = BoundaryDriver::Sinusoid;
        let a = d.eval(0.7);
        let b = d.eval(0.7);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
