//! Flag value parsers: angles in units of π and numeric grids.

use std::f64::consts::PI;

use serde::Serialize;

/// A real number, optionally with a `pi` factor: `pi`, `-pi`, `0.5pi`, `pi/4`, `3pi/4`, `1.2`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let value = match t.find("pi") {
        None => parse_number(t)?,
        Some(at) => {
            let coef = match &t[..at] {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => parse_number(c.trim_end_matches('*'))?,
            };
            let rest = &t[at + 2..];
            let divisor = match rest.strip_prefix('/') {
                Some(d) => parse_number(d)?,
                None if rest.is_empty() => 1.0,
                None => return Err(format!("cannot parse angle {text:?}")),
            };
            if divisor == 0.0 {
                return Err(format!("division by zero in angle {text:?}"));
            }
            coef * PI / divisor
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("angle {text:?} is not finite"))
    }
}

fn parse_number(t: &str) -> Result<f64, String> {
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("cannot parse number {t:?}"))
}

/// An ordered, non-empty list of grid points.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

/// `min:max:steps` (inclusive, `steps >= 1`) or a comma list. Entries accept the `pi` suffix.
pub fn parse_grid(text: &str) -> Result<Grid, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("grid is empty".into());
    }
    let parts: Vec<&str> = t.split(':').collect();
    let points = match parts.as_slice() {
        [lo, hi, steps] => {
            let (lo, hi) = (parse_angle(lo)?, parse_angle(hi)?);
            let steps: usize = steps
                .trim()
                .parse()
                .map_err(|_| format!("grid step count {steps:?} is not an integer"))?;
            match steps {
                0 => return Err("grid needs at least one step".into()),
                1 => vec![lo],
                _ => (0..steps)
                    .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
                    .collect(),
            }
        }
        [_] => t.split(',').map(parse_angle).collect::<Result<_, _>>()?,
        _ => return Err(format!("grid {text:?} must be min:max:steps or a comma list")),
    };
    Ok(Grid(points))
}

/// Numbers with 12 significant digits, shortest form, no negative zero.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), FRAC_PI_2);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        for bad in ["", "pipi", "pi/0", "x", "2pi3", "nan"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:5").unwrap().0, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.3").unwrap().0, vec![0.3]);
        assert_eq!(parse_grid("0,pi").unwrap().0, vec![0.0, PI]);
        assert_eq!(parse_grid("0:pi:1").unwrap().0, vec![0.0]);
        for bad in ["", "0:1:0", "0:1", "0:1:x", "a,b"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.125), "0.125");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(FRAC_PI_2), "1.57079632679");
        assert_eq!(format_number(-1.0 / 3.0), "-0.333333333333");
        assert_eq!(format_number(1e-20), "1e-20");
        assert_eq!(format_number(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_number(0.99999999999999), "1");
    }
}
