//! Closed-form solutions used as accuracy oracles for the walk and
//! finite-difference solvers: the error function, the transcendental
//! front-speed coefficient, the similarity solution for a constant boundary
//! temperature, the exponential-driver solution, the free-space Gaussian
//! kernel, and the two-sided Fourier sine series.

// Coefficients and pinned reference values keep every digit emitted by the
// tools that produced them; the surplus digits just round to the nearest f64.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

// Error function coefficients, from the FreeBSD msun / SunPro rational
// approximation (accurate to well under 1 ulp).
const ERX: f64 = 8.45062911510467529297e-01;
const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;
const VERY_TINY: f64 = 2.848094538889218e-306;
const SMALL: f64 = 3.725290298461914e-09; // 2^-28

/// sqrt(pi), to the last f64 digit.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Error function `erf(x) = 2/sqrt(pi) * integral_0^x exp(-y^2) dy`.
///
/// `erf(+inf) = 1`, `erf(-inf) = -1`, `erf(NaN) = NaN`; absolute error is
/// below 1e-15 everywhere.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return -1.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < SMALL {
            if x < VERY_TINY {
                0.125 * (8.0 * x + EFX8 * x) // avoid underflow
            } else {
                x + EFX * x
            }
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            x + x * (r / s)
        };
        return if sign { -temp } else { temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign { -ERX - p / q } else { ERX + p / q };
    }
    if x >= 6.0 {
        return if sign { -1.0 } else { 1.0 };
    }
    let s = 1.0 / (x * x);
    let (r, q) = if x < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s
                * (SA1
                    + s * (SA2
                        + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    // Split x to get an exactly representable leading part for exp(-x^2).
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    let w = f64::exp(-z * z - 0.5625) * f64::exp((z - x) * (z + x) + r / q);
    if sign {
        w / x - 1.0
    } else {
        1.0 - w / x
    }
}

/// Root of the front-speed equation together with diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct LambdaSolution {
    pub lambda: f64,
    /// `|f(lambda)|` at the accepted root.
    pub residual: f64,
    pub iterations: u32,
    /// True if Newton failed and the bracketing fallback produced the root.
    pub bisection_fallback: bool,
}

/// Left side of the front-speed equation
/// `sqrt(pi) * beta * x * exp(x^2) * erf(x) - t0`,
/// whose positive root `lambda` sets the front position
/// `s(t) = 2 lambda sqrt(alpha t)` for a constant boundary temperature `t0`.
fn lambda_eq(x: f64, beta: f64, t0: f64) -> f64 {
    SQRT_PI * beta * x * (x * x).exp() * erf(x) - t0
}

fn lambda_eq_deriv(x: f64, beta: f64) -> f64 {
    beta * (SQRT_PI * (x * x).exp() * erf(x) * (2.0 * x * x + 1.0) + 2.0 * x)
}

/// Solves the front-speed equation for `lambda > 0` by Newton iteration from
/// `x0 = 1`, stopping when `|f(lambda)| <= tol`. Falls back to bisection on
/// an expanding bracket if Newton stalls or leaves the domain.
pub fn solve_lambda(beta: f64, t0: f64, tol: f64) -> Result<LambdaSolution> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::config(format!("beta must be positive, got {beta}")));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::config(format!(
            "boundary temperature must be positive, got {t0}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::config(format!("tolerance must be positive, got {tol}")));
    }

    let f = |x: f64| lambda_eq(x, beta, t0);
    let mut x = 1.0f64;
    for it in 0..100 {
        let fx = f(x);
        if fx.abs() <= tol {
            return Ok(LambdaSolution {
                lambda: x,
                residual: fx.abs(),
                iterations: it,
                bisection_fallback: false,
            });
        }
        let d = lambda_eq_deriv(x, beta);
        if !fx.is_finite() || !d.is_finite() || d == 0.0 {
            break;
        }
        let next = x - fx / d;
        if !next.is_finite() || next <= 0.0 {
            break;
        }
        x = next;
    }

    // Bracketing fallback: f(0+) = -t0 < 0 and f is strictly increasing.
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut grow = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        grow += 1;
        if grow > 60 || !f(hi).is_finite() {
            return Err(Error::NonConvergence(format!(
                "front-speed equation has no bracketable root for beta={beta}, t0={t0}"
            )));
        }
    }
    for it in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol {
            return Ok(LambdaSolution {
                lambda: mid,
                residual: fm.abs(),
                iterations: it,
                bisection_fallback: true,
            });
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence(format!(
        "front-speed equation not converged to |f| <= {tol} for beta={beta}, t0={t0}"
    )))
}

/// Similarity (Neumann) temperature profile behind the front for a constant
/// boundary temperature `t0`:
/// `T(x, t) = t0 (1 - erf(x / (2 sqrt(alpha t))) / erf(lambda))`.
/// Defined for `t > 0` and `0 <= x <= s(t)`.
pub fn stefan_temperature(x: f64, t: f64, alpha: f64, t0: f64, lambda: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("similarity profile needs t > 0, got {t}")));
    }
    let s = stefan_front(t, alpha, lambda);
    if x < 0.0 || x > s * (1.0 + 1e-12) + 1e-300 {
        return Err(Error::Domain(format!(
            "x = {x} outside the liquid region [0, {s}] at t = {t}"
        )));
    }
    Ok(t0 * (1.0 - erf(x / (2.0 * (alpha * t).sqrt())) / erf(lambda)))
}

/// Front position for a constant boundary temperature:
/// `s(t) = 2 lambda sqrt(alpha t)`.
pub fn stefan_front(t: f64, alpha: f64, lambda: f64) -> f64 {
    2.0 * lambda * (alpha * t).sqrt()
}

/// Exact solution for the exponential driver `f(t) = e^t - 1` with
/// `alpha = beta = 1`: `T(x, t) = e^(t - x) - 1` on `0 <= x <= t`.
pub fn special_temperature(x: f64, t: f64) -> Result<f64> {
    if x < 0.0 || x > t {
        return Err(Error::Domain(format!(
            "exponential-driver profile defined on 0 <= x <= t, got x={x}, t={t}"
        )));
    }
    Ok((t - x).exp() - 1.0)
}

/// Front position for the exponential driver: `s(t) = t`.
pub fn special_front(t: f64) -> f64 {
    t
}

/// Free-space heat kernel for a unit point release at the origin:
/// `T(x, t) = (4 pi alpha t)^(-1/2) exp(-x^2 / (4 alpha t))`, `t > 0`.
pub fn gaussian_temperature(x: f64, t: f64, alpha: f64) -> Result<f64> {
    if !(t > 0.0) || !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "heat kernel needs t > 0 and alpha > 0, got t={t}, alpha={alpha}"
        )));
    }
    let denom = 4.0 * std::f64::consts::PI * alpha * t;
    Ok((-x * x / (4.0 * alpha * t)).exp() / denom.sqrt())
}

/// Fourier sine-series solution on `[0, len]` with both ends held at zero
/// and unit initial temperature, truncated after `terms` odd modes:
/// `T(x,t) = (4/pi) sum exp(-alpha pi^2 m^2 t / len^2) sin(m pi x / len) / m`
/// over `m = 1, 3, 5, ...`.
pub fn fourier_temperature(x: f64, t: f64, len: f64, alpha: f64, terms: usize) -> Result<f64> {
    if !(len > 0.0) || x < 0.0 || x > len {
        return Err(Error::Domain(format!(
            "series solution needs 0 <= x <= len, got x={x}, len={len}"
        )));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("series solution needs t >= 0, got {t}")));
    }
    if terms == 0 {
        return Err(Error::config("series needs at least one term"));
    }
    let pi = std::f64::consts::PI;
    let mut sum = 0.0;
    for k in 0..terms {
        let m = (2 * k + 1) as f64;
        sum += (-alpha * pi * pi * m * m * t / (len * len)).exp() * (m * pi * x / len).sin() / m;
    }
    Ok(4.0 / pi * sum)
}

/// Gradient amplitude that makes the inverse-square-root flux reproduce a
/// unit constant boundary temperature: `q0 = 1 / (sqrt(pi) erf(lambda))`.
pub fn flux_amplitude(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(1.0 / (SQRT_PI * erf(lambda)))
}
