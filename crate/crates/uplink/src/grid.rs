//! Parsing of threshold and density grids.
//!
//! A range is written `start:stop:count` and includes both ends. A list is
//! written `a,b,c`. A single number is a one-point grid.

use crate::CliError;

fn invalid(spec: &str, reason: &'static str) -> CliError {
    CliError::InvalidGrid { spec: spec.to_owned(), reason }
}

fn number(spec: &str, s: &str) -> Result<f64, CliError> {
    let x: f64 = s.trim().parse().map_err(|_| invalid(spec, "not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(spec, "values must be finite"))
    }
}

fn range_parts(spec: &str) -> Result<Option<(f64, f64, usize)>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        1 => Ok(None),
        3 => {
            let count: usize =
                parts[2].trim().parse().map_err(|_| invalid(spec, "count must be a positive integer"))?;
            if count == 0 {
                return Err(invalid(spec, "count must be a positive integer"));
            }
            Ok(Some((number(spec, parts[0])?, number(spec, parts[1])?, count)))
        }
        _ => Err(invalid(spec, "expected start:stop:count")),
    }
}

fn list(spec: &str) -> Result<Vec<f64>, CliError> {
    let values = spec.split(',').map(|s| number(spec, s)).collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(invalid(spec, "grid is empty"));
    }
    Ok(values)
}

/// Evenly spaced points from `start` to `stop`, ends exact.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let step = (stop - start) / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect()
}

/// Log-spaced points from `start` to `stop`, ends exact.
pub fn logspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    let (a, b) = (start.log10(), stop.log10());
    let mut v: Vec<f64> = linspace(a, b, count).into_iter().map(|e| 10f64.powf(e)).collect();
    v[0] = start;
    if count > 1 {
        v[count - 1] = stop;
    }
    v
}

/// A linear range or an explicit list.
pub fn parse_linear(spec: &str) -> Result<Vec<f64>, CliError> {
    match range_parts(spec)? {
        Some((a, b, n)) => Ok(linspace(a, b, n)),
        None => list(spec),
    }
}

/// A log-spaced range of positive values or an explicit list.
pub fn parse_log(spec: &str) -> Result<Vec<f64>, CliError> {
    match range_parts(spec)? {
        Some((a, b, n)) if a > 0.0 && b > 0.0 => Ok(logspace(a, b, n)),
        Some(_) => Err(invalid(spec, "log-spaced ends must be positive")),
        None => list(spec),
    }
}
