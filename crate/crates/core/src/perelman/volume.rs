use crate::error::{Error, Result};
use crate::fraccalc::{AxisGrid, FractionalOrder, RlIntegralKernel};
use crate::geometry::{DMetric, GridChart};

/// Quadrature weights of the upper-terminal operator `1/Gamma(a) int (x_2 - x)^(a-1) f dx`
/// on one axis, product-trapezoid in `x`.
///
/// A periodic axis is closed by appending the wrap node and folding its weight back onto
/// node 0; at `alpha = 1` that gives the uniform rule `h`.
pub fn axis_weights(axis: &AxisGrid, order: FractionalOrder) -> Vec<f64> {
    if axis.periodic {
        let kernel = RlIntegralKernel::new(axis.spacing, order, axis.count + 1);
        let mut w = kernel.weights_at(axis.count);
        let wrap = w.pop().unwrap_or(0.0);
        w[0] += wrap;
        w
    } else {
        RlIntegralKernel::new(axis.spacing, order, axis.count).weights_at(axis.count - 1)
    }
}

/// Fractional volume measure: per-axis weights times the d-metric density
/// `sqrt|det g_ij| sqrt|det g_ab|`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeElement {
    pub chart: GridChart,
    pub density: Vec<f64>,
    pub axis_weights: Vec<Vec<f64>>,
    node_weights: Vec<f64>,
}

impl VolumeElement {
    pub fn new(g: &DMetric, order: FractionalOrder) -> Result<Self> {
        Self::from_density(&g.chart, g.density()?, order)
    }

    pub fn from_density(chart: &GridChart, density: Vec<f64>, order: FractionalOrder) -> Result<Self> {
        chart.check_len(density.len())?;
        if let Some(p) = density.iter().position(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::DegenerateMetric { node: p, cond: f64::INFINITY });
        }
        let axis_weights: Vec<Vec<f64>> = chart.axes().iter().map(|a| axis_weights(a, order)).collect();
        let node_weights = (0..chart.len())
            .map(|p| chart.position(p).iter().zip(&axis_weights).map(|(&i, w)| w[i]).product::<f64>() * density[p])
            .collect();
        Ok(Self { chart: chart.clone(), density, axis_weights, node_weights })
    }

    /// Weight of each node, density included.
    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub fn integrate(&self, field: &[f64]) -> f64 {
        assert_eq!(field.len(), self.node_weights.len(), "field does not match chart");
        field.iter().zip(&self.node_weights).map(|(f, w)| f * w).sum()
    }

    pub fn total(&self) -> f64 {
        self.node_weights.iter().sum()
    }
}

/// `int field dV` with the fractional measure of `g`.
pub fn fractional_volume_integral(field: &[f64], g: &DMetric, order: FractionalOrder) -> Result<f64> {
    g.chart.check_len(field.len())?;
    Ok(VolumeElement::new(g, order)?.integrate(field))
}
