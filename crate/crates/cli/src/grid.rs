//! Numeric grid specifications: `"a,b,c"`, `"lin:start:stop:count"` or
//! `"log:start:stop:count"`, or a JSON array of numbers.

use serde::{Deserialize, Serialize};

/// Upper bound on the number of points a grid spec may expand to.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Text(String),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let v = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Text(s) => return parse_grid(s),
        };
        check_points(v)
    }
}

fn check_points(v: Vec<f64>) -> Result<Vec<f64>, String> {
    if v.is_empty() {
        return Err("grid is empty".into());
    }
    if v.len() > MAX_GRID_POINTS {
        return Err(format!("grid has more than {MAX_GRID_POINTS} points"));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(format!("grid value {x} is not finite"));
    }
    Ok(v)
}

fn number(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", s.trim()))
}

fn ranged(body: &str, kind: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("`{kind}:` grids take start:stop:count"));
    }
    let start = number(parts[0])?;
    let stop = number(parts[1])?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a point count", parts[2].trim()))?;
    if count == 0 {
        return Err("grid is empty".into());
    }
    if count > MAX_GRID_POINTS {
        return Err(format!("grid has more than {MAX_GRID_POINTS} points"));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err("grid bounds must be finite".into());
    }
    Ok((start, stop, count))
}

/// Expands a textual grid spec.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if let Some(body) = spec.strip_prefix("lin:") {
        let (a, b, n) = ranged(body, "lin")?;
        if n == 1 {
            return Ok(vec![a]);
        }
        let step = (b - a) / (n - 1) as f64;
        let mut v: Vec<f64> = (0..n).map(|k| a + step * k as f64).collect();
        v[n - 1] = b;
        return check_points(v);
    }
    if let Some(body) = spec.strip_prefix("log:") {
        let (a, b, n) = ranged(body, "log")?;
        if a <= 0.0 || b <= 0.0 {
            return Err("`log:` grid bounds must be positive".into());
        }
        return check_points(spin_ibr::noise::log_grid(a, b, n));
    }
    if spec.is_empty() {
        return Err("grid is empty".into());
    }
    check_points(spec.split(',').map(number).collect::<Result<Vec<f64>, String>>()?)
}
