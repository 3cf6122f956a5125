//! Standalone Caputo table on `[0, 1]` against closed forms.

use std::str::FromStr;

use fracflow_core::fraccalc::{caputo_left, AxisGrid, FractionalOrder, SampledCurve};
use fracflow_oracle::gamma_ref;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `f = 1`.
    Constant,
    /// `f = x^beta`, `beta > 0`.
    Power(f64),
    /// `f = sin x`.
    Sin,
}

impl FromStr for Preset {
    type Err = CliError;

    /// `constant`, `sin`, `power(2)`, `power:2` or `power` (beta = 2).
    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let bad = || CliError::Config(format!("unknown preset `{s}` (expected constant, power(beta) or sin)"));
        match s {
            "constant" => return Ok(Preset::Constant),
            "sin" => return Ok(Preset::Sin),
            "power" => return Ok(Preset::Power(2.0)),
            _ => {}
        }
        let arg = s
            .strip_prefix("power(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("power:"))
            .ok_or_else(bad)?;
        let beta: f64 = arg.trim().parse().map_err(|_| bad())?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(CliError::Config(format!("preset power: beta must be positive, got {beta}")));
        }
        Ok(Preset::Power(beta))
    }
}

impl Preset {
    fn eval(self, x: f64) -> f64 {
        match self {
            Preset::Constant => 1.0,
            Preset::Power(b) => x.powf(b),
            Preset::Sin => x.sin(),
        }
    }

    /// Closed-form Caputo derivative of order `a` at `x`.
    pub fn reference(self, x: f64, a: f64) -> f64 {
        match self {
            Preset::Constant => 0.0,
            Preset::Power(b) => {
                let c = gamma_ref(b + 1.0) / gamma_ref(b + 1.0 - a);
                if b == a {
                    c
                } else {
                    c * x.powf(b - a)
                }
            }
            // sum_k (-1)^k x^(2k+1-a) / Gamma(2k+2-a)
            Preset::Sin => {
                let mut sum = 0.0;
                for k in 0..60 {
                    let e = 2.0 * k as f64 + 1.0;
                    let term = x.powf(e - a) / gamma_ref(e + 1.0 - a);
                    sum += if k % 2 == 0 { term } else { -term };
                    if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                        break;
                    }
                }
                sum
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub x: f64,
    pub numerical: f64,
    pub reference: f64,
    pub abs_error: f64,
}

pub fn table(preset: Preset, alpha: f64, count: usize) -> Result<Vec<Row>, CliError> {
    let order = FractionalOrder::new(alpha).map_err(|e| CliError::Config(format!("--alpha: {e}")))?;
    let grid = AxisGrid::new(0.0, 1.0, count).map_err(|e| CliError::Config(format!("--count: {e}")))?;
    let f = SampledCurve::from_fn(grid, |x| preset.eval(x)).map_err(|e| CliError::Config(e.to_string()))?;
    let d = caputo_left(&f, order).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(f.grid
        .nodes()
        .into_iter()
        .zip(d.values)
        .map(|(x, numerical)| {
            let reference = preset.reference(x, alpha);
            Row { x, numerical, reference, abs_error: (numerical - reference).abs() }
        })
        .collect())
}

pub fn write_table(out: &mut impl std::io::Write, rows: &[Row]) -> std::io::Result<()> {
    use crate::output::float;
    writeln!(out, "x,numerical,reference,abs_error")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", float(r.x), float(r.numerical), float(r.reference), float(r.abs_error))?;
    }
    Ok(())
}
