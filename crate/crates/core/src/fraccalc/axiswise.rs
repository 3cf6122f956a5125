use rayon::prelude::*;

use super::{CaputoKernel, FormField, FractionalOrder};
use crate::error::{Error, Result};
use crate::geometry::GridChart;

/// Axis-wise left Caputo partial derivatives on a [`GridChart`].
///
/// Every partial acts along one axis with the lower end of that axis as terminal and all
/// other coordinates frozen.
#[derive(Debug, Clone)]
pub struct PartialDerivative {
    chart: GridChart,
    kernels: Vec<CaputoKernel>,
    order: FractionalOrder,
}

impl PartialDerivative {
    pub fn new(chart: &GridChart, order: FractionalOrder) -> Self {
        let kernels = chart.axes().iter().map(|a| CaputoKernel::new(a, order)).collect();
        Self { chart: chart.clone(), kernels, order }
    }

    pub fn chart(&self) -> &GridChart {
        &self.chart
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    /// `d^alpha_axis f` at every node.
    pub fn along(&self, f: &[f64], axis: usize) -> Vec<f64> {
        assert_eq!(f.len(), self.chart.len(), "field does not match chart");
        let stride = self.chart.stride(axis);
        let count = self.chart.axis(axis).count;
        let kernel = &self.kernels[axis];
        let starts = self.chart.line_starts(axis);
        let lines: Vec<Vec<f64>> = starts
            .par_iter()
            .map(|&s| {
                let line: Vec<f64> = (0..count).map(|k| f[s + k * stride]).collect();
                let mut out = vec![0.0; count];
                kernel.apply(&line, &mut out);
                out
            })
            .collect();
        let mut out = vec![0.0; f.len()];
        for (s, line) in starts.iter().zip(lines) {
            for (k, v) in line.into_iter().enumerate() {
                out[s + k * stride] = v;
            }
        }
        out
    }

    /// All partials, indexed by axis.
    pub fn all(&self, f: &[f64]) -> Vec<Vec<f64>> {
        (0..self.chart.dim()).map(|k| self.along(f, k)).collect()
    }
}

fn check_finite(f: &[f64]) -> Result<()> {
    match f.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(Error::InvalidSamples(k)),
        None => Ok(()),
    }
}

/// Fractional gradient: the 1-form with components `d^alpha_i f`.
pub fn frac_grad(chart: &GridChart, f: &[f64], order: FractionalOrder) -> Result<FormField> {
    chart.check_len(f.len())?;
    check_finite(f)?;
    let d = PartialDerivative::new(chart, order);
    FormField::new(chart.clone(), 1, d.all(f))
}

/// Fractional divergence `d^alpha_i V^i` of a vector field given by its components.
pub fn frac_div(chart: &GridChart, v: &[Vec<f64>], order: FractionalOrder) -> Result<Vec<f64>> {
    if v.len() != chart.dim() {
        return Err(Error::ShapeMismatch(format!("{} components for dimension {}", v.len(), chart.dim())));
    }
    let d = PartialDerivative::new(chart, order);
    let mut out = vec![0.0; chart.len()];
    for (k, comp) in v.iter().enumerate() {
        chart.check_len(comp.len())?;
        check_finite(comp)?;
        for (o, x) in out.iter_mut().zip(d.along(comp, k)) {
            *o += x;
        }
    }
    Ok(out)
}
