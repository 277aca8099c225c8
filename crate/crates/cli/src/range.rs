//! Parser for `start:stop:step` sweep ranges.

use crate::error::CliError;

/// Parse `a:b:c` into the inclusive grid `a, a+c, ..., b` (a small relative
/// slack keeps the endpoint when `c` doesn't divide the span exactly).
/// A bare number yields a single point; `start > stop` yields an empty grid.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = |what: &str| CliError::Usage(format!("invalid range `{text}`: {what}"));
    match parts.len() {
        1 => {
            let v: f64 = parts[0].trim().parse().map_err(|_| bad("not a number"))?;
            if !v.is_finite() {
                return Err(bad("not finite"));
            }
            Ok(vec![v])
        }
        3 => {
            let start: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
            let stop: f64 = parts[1].trim().parse().map_err(|_| bad("bad stop"))?;
            let step: f64 = parts[2].trim().parse().map_err(|_| bad("bad step"))?;
            if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
                return Err(bad("not finite"));
            }
            if step <= 0.0 {
                return Err(bad("step must be positive"));
            }
            let mut grid = Vec::new();
            let slack = 1e-9 * step.max(1.0);
            let mut k = 0u64;
            loop {
                let v = start + step * k as f64;
                if v > stop + slack {
                    break;
                }
                grid.push(v);
                k += 1;
                if k > 1_000_000 {
                    return Err(bad("more than a million points"));
                }
            }
            Ok(grid)
        }
        _ => Err(bad("expected `value` or `start:stop:step`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value() {
        assert_eq!(parse_range("9.5").unwrap(), vec![9.5]);
    }

    #[test]
    fn inclusive_endpoint() {
        let g = parse_range("7:10:0.5").unwrap();
        assert_eq!(g.len(), 7);
        assert!((g[0] - 7.0).abs() < 1e-12);
        assert!((g[6] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_survives_inexact_step() {
        let g = parse_range("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[10] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reversed_range_is_empty() {
        assert!(parse_range("5:2:1").unwrap().is_empty());
    }

    #[test]
    fn zero_step_rejected() {
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1:-0.5").is_err());
        assert!(parse_range("a:b:c").is_err());
        assert!(parse_range("1:2").is_err());
    }
}
