//! The boundary-driver mini-language: one `--driver` flag covers constant,
//! exponential, and sinusoidal temperatures, inverse-square-root fluxes, and
//! measured series loaded from CSV files.
//!
//! Specs are plain strings (`const:1`, `exp`, `sin`, `csv:air.csv`,
//! `flux:0.9108`, `fluxcsv:grad.csv`), so a manifest can store them verbatim
//! and a replay can rebuild the identical driver.

use std::path::PathBuf;
use stefanwalk::ingest::{self, TimeUnit};
use stefanwalk::{BoundaryDriver, DriverKind, Error, Result};

/// A built driver plus what the manifest and the console need to know.
#[derive(Debug)]
pub struct ParsedDriver {
    pub driver: BoundaryDriver,
    /// Source file for sampled drivers, as written in the driver string.
    pub source: Option<PathBuf>,
    /// Extrapolation notes for sampled series.
    pub warnings: Vec<String>,
}

impl ParsedDriver {
    fn plain(driver: BoundaryDriver) -> Self {
        ParsedDriver {
            driver,
            source: None,
            warnings: Vec::new(),
        }
    }
}

fn parse_value(text: &str, spec: &str) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| Error::config(format!("bad number '{text}' in driver '{spec}'")))?;
    if !v.is_finite() {
        return Err(Error::config(format!(
            "driver '{spec}' needs a finite value, got {v}"
        )));
    }
    Ok(v)
}

/// Builds the driver a spec describes. Sampled specs read their file here;
/// `t_max` is only used to warn when the run outlives the data.
pub fn materialize(spec: &str, unit: TimeUnit, t_max: f64) -> Result<ParsedDriver> {
    match spec {
        "exp" => return Ok(ParsedDriver::plain(BoundaryDriver::Exponential)),
        "sin" => return Ok(ParsedDriver::plain(BoundaryDriver::Sinusoid)),
        _ => {}
    }
    if let Some(value) = spec.strip_prefix("const:") {
        let t0 = parse_value(value, spec)?;
        return Ok(ParsedDriver::plain(BoundaryDriver::Constant(t0)));
    }
    if let Some(value) = spec.strip_prefix("flux:") {
        let q0 = parse_value(value, spec)?;
        return Ok(ParsedDriver::plain(BoundaryDriver::InverseSqrtFlux {
            q0,
        }));
    }
    if let Some(path) = spec.strip_prefix("csv:") {
        let series = ingest::load_series(path, unit)?;
        let (driver, warnings) = ingest::driver_from_series(series, t_max)?;
        return Ok(ParsedDriver {
            driver,
            source: Some(PathBuf::from(path)),
            warnings,
        });
    }
    if let Some(path) = spec.strip_prefix("fluxcsv:") {
        let series = ingest::load_series(path, unit)?;
        let (driver, warnings) = ingest::flux_driver_from_series(series, t_max)?;
        return Ok(ParsedDriver {
            driver,
            source: Some(PathBuf::from(path)),
            warnings,
        });
    }
    Err(Error::config(format!(
        "unknown driver '{spec}'; expected const:<T0>, exp, sin, csv:<path>, flux:<q0>, or fluxcsv:<path>"
    )))
}

/// End time of the series a sampled spec points at (`None` for closed-form
/// drivers). Lets `--tmax` default to the span of the measurements.
pub fn series_end(spec: &str, unit: TimeUnit) -> Result<Option<f64>> {
    let path = match spec.strip_prefix("csv:") {
        Some(p) => p,
        None => match spec.strip_prefix("fluxcsv:") {
            Some(p) => p,
            None => return Ok(None),
        },
    };
    let series = ingest::load_series(path, unit)?;
    Ok(Some(series.end_time()))
}

/// Rejects a driver of the wrong kind with a hint at the right subcommand.
pub fn expect_kind(driver: &BoundaryDriver, want: DriverKind, command: &str) -> Result<()> {
    if driver.kind() == want {
        return Ok(());
    }
    let msg = match driver.kind() {
        DriverKind::Dirichlet => format!(
            "driver '{}' prescribes a temperature, but `{command}` needs a gradient \
             (flux:<q0> or fluxcsv:<path>)",
            driver.descriptor()
        ),
        DriverKind::Neumann => format!(
            "driver '{}' prescribes a gradient; use `stefan-flux` for flux drivers",
            driver.descriptor()
        ),
    };
    Err(Error::Config(msg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(spec: &str) -> Result<ParsedDriver> {
        materialize(spec, TimeUnit::Seconds, 1.0)
    }

    #[test]
    fn closed_form_specs_parse() {
        assert_eq!(
            build("const:1").unwrap().driver,
            BoundaryDriver::Constant(1.0)
        );
        assert_eq!(
            build("const:-2.5").unwrap().driver,
            BoundaryDriver::Constant(-2.5)
        );
        assert_eq!(build("exp").unwrap().driver, BoundaryDriver::Exponential);
        assert_eq!(build("sin").unwrap().driver, BoundaryDriver::Sinusoid);
        assert_eq!(
            build("flux:0.9108").unwrap().driver,
            BoundaryDriver::InverseSqrtFlux { q0: 0.9108 }
        );
    }

    #[test]
    fn parsed_specs_round_trip_through_descriptors() {
        for spec in ["const:1", "const:-2.5", "exp", "sin", "flux:0.9108"] {
            let first = build(spec).unwrap().driver;
            let again = build(&first.descriptor()).unwrap().driver;
            assert_eq!(first, again);
        }
    }

    #[test]
    fn bad_specs_are_config_errors() {
        for spec in ["", "konst:1", "const:", "const:abc", "flux:inf", "csv"] {
            match build(spec) {
                Err(Error::Config(_)) => {}
                other => panic!("spec '{spec}' gave {other:?}"),
            }
        }
    }

    #[test]
    fn sampled_specs_load_the_bundled_series() {
        let path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/orebro_2019-03-01_03.csv"
        );
        let spec = format!("csv:{path}");
        let parsed = materialize(&spec, TimeUnit::Hours, 3600.0).unwrap();
        assert_eq!(parsed.driver.kind(), DriverKind::Dirichlet);
        assert_eq!(parsed.source.as_deref(), Some(std::path::Path::new(path)));
        let end = series_end(&spec, TimeUnit::Hours).unwrap().unwrap();
        assert!((end - 62.0 * 3600.0).abs() < 1e-9);
    }

    #[test]
    fn kind_mismatch_names_the_right_subcommand() {
        let temp = build("const:1").unwrap().driver;
        let flux = build("flux:1").unwrap().driver;
        assert!(expect_kind(&temp, DriverKind::Dirichlet, "stefan").is_ok());
        let err = expect_kind(&temp, DriverKind::Neumann, "stefan-flux").unwrap_err();
        assert!(err.to_string().contains("stefan-flux"));
        let err = expect_kind(&flux, DriverKind::Dirichlet, "stefan").unwrap_err();
        assert!(err.to_string().contains("stefan-flux"));
    }
}
