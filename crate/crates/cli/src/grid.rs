//! X-grid mini-language: `a`, `a:b:s` (arithmetic step s) or `a:b:xr`
//! (geometric ratio r). Both endpoints are inclusive.

use crate::config::ConfigError;

const SLACK: f64 = 1e-9;

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ConfigError> {
    let err = |msg: String| ConfigError::field("xgrid", msg);
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let num = |s: &str| -> Result<f64, ConfigError> {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| err(format!("'{s}' is not a finite number")))
    };
    match parts.as_slice() {
        [a] => {
            let a = num(a)?;
            if a <= 0.0 {
                return Err(err(format!("grid value {a} must be positive")));
            }
            Ok(vec![a])
        }
        [a, b, step] => {
            let (a, b) = (num(a)?, num(b)?);
            if a <= 0.0 || b < a {
                return Err(err(format!("need 0 < a <= b, got {a}:{b}")));
            }
            if let Some(r) = step.strip_prefix('x') {
                let r = num(r)?;
                if r <= 1.0 {
                    return Err(err(format!("geometric ratio must exceed 1, got {r}")));
                }
                let mut out = Vec::new();
                let mut j = 0;
                loop {
                    let v = a * r.powi(j);
                    if v > b * (1.0 + SLACK) {
                        break;
                    }
                    out.push(v);
                    j += 1;
                }
                Ok(out)
            } else {
                let s = num(step)?;
                if s <= 0.0 {
                    return Err(err(format!("step must be positive, got {s}")));
                }
                let count = ((b - a) / s * (1.0 + SLACK)).floor() as usize;
                Ok((0..=count).map(|j| a + j as f64 * s).collect())
            }
        }
        _ => Err(err(format!("cannot parse '{spec}': expected a, a:b:s or a:b:xr"))),
    }
}

/// The grid as positive integers; fails if any point is not integral.
pub fn parse_integer_grid(spec: &str) -> Result<Vec<u64>, ConfigError> {
    parse_grid(spec)?
        .into_iter()
        .map(|v| {
            let r = v.round();
            if (v - r).abs() > SLACK * v.max(1.0) || r < 1.0 {
                Err(ConfigError::field("xgrid", format!("grid point {v} is not a positive integer")))
            } else {
                Ok(r as u64)
            }
        })
        .collect()
}
