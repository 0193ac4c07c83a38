//! `start:step:stop` grid parsing for SNR, rate, probability, and
//! multiplexing-gain sweeps.  A bare number is a one-point grid.

use anyhow::{bail, Context, Result};

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        1 => {
            let v: f64 = parts[0]
                .trim()
                .parse()
                .with_context(|| format!("invalid number {:?}", parts[0]))?;
            ensure_finite(&[v])?;
            Ok(vec![v])
        }
        3 => {
            let start: f64 = parts[0].trim().parse().context("invalid grid start")?;
            let step: f64 = parts[1].trim().parse().context("invalid grid step")?;
            let stop: f64 = parts[2].trim().parse().context("invalid grid stop")?;
            ensure_finite(&[start, step, stop])?;
            if step <= 0.0 {
                bail!("grid step must be positive, got {step}");
            }
            if stop < start {
                bail!("grid stop {stop} is below start {start}");
            }
            let count = ((stop - start) / step + 1.5).floor() as usize;
            let mut grid: Vec<f64> = (0..count).map(|k| start + step * k as f64).collect();
            // keep points at or below stop, tolerating rounding at the top
            grid.retain(|&v| v <= stop + 1e-9 * step);
            if grid.is_empty() {
                bail!("grid {spec:?} produced no points");
            }
            Ok(grid)
        }
        _ => bail!("grid must be a number or start:step:stop, got {spec:?}"),
    }
}

fn ensure_finite(vals: &[f64]) -> Result<()> {
    for v in vals {
        if !v.is_finite() {
            bail!("grid values must be finite, got {v}");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value() {
        assert_eq!(parse_grid("10").unwrap(), vec![10.0]);
        assert_eq!(parse_grid("-2.5").unwrap(), vec![-2.5]);
    }

    #[test]
    fn three_part_grid() {
        assert_eq!(parse_grid("0:5:20").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_grid("0:0.5:1").unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("0:0:10").is_err());
        assert!(parse_grid("10:1:0").is_err());
        assert!(parse_grid("1:2").is_err());
    }
}
