//! One-dimensional fractional operators on uniform grids and the axis-wise calculus built on
//! top of them.
//!
//! All derivatives are left-sided with the lower end of each axis as terminal. The Caputo
//! derivative uses the L1 product-integration scheme, the RL integral uses product-trapezoid
//! weights. At `alpha == 1` the derivative dispatches to second-order finite differences.

mod axiswise;
mod forms;
mod kernel;

pub use axiswise::{frac_div, frac_grad, PartialDerivative};
pub use forms::{exterior_derivative, FormField};
pub use kernel::{gamma, CaputoKernel, RlIntegralKernel};

use crate::error::{Error, Result};

/// Order `alpha` of the fractional operators, `0 < alpha <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub const fn integer() -> Self {
        Self(1.0)
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    /// `alpha == 1` selects the classical operators.
    pub fn is_integer(self) -> bool {
        self.0 == 1.0
    }
}

/// Uniform nodes on `[lower, upper]`.
///
/// A periodic axis covers `[lower, upper)` with `count` nodes and spacing
/// `(upper - lower) / count`; the node at `upper` is identified with node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisGrid {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub spacing: f64,
    pub periodic: bool,
}

impl AxisGrid {
    pub fn new(lower: f64, upper: f64, count: usize) -> Result<Self> {
        Self::check(lower, upper, count)?;
        Ok(Self { lower, upper, count, spacing: (upper - lower) / (count - 1) as f64, periodic: false })
    }

    pub fn periodic(lower: f64, upper: f64, count: usize) -> Result<Self> {
        Self::check(lower, upper, count)?;
        Ok(Self { lower, upper, count, spacing: (upper - lower) / count as f64, periodic: true })
    }

    fn check(lower: f64, upper: f64, count: usize) -> Result<()> {
        if count < 3 {
            return Err(Error::GridTooSmall(count));
        }
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(Error::InvalidGrid(format!("bounds [{lower}, {upper}] are not increasing")));
        }
        Ok(())
    }

    pub fn node(&self, k: usize) -> f64 {
        self.lower + k as f64 * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.node(k)).collect()
    }

    /// Length of the covered interval.
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Samples of a function on an [`AxisGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub grid: AxisGrid,
    pub values: Vec<f64>,
}

impl SampledCurve {
    pub fn new(grid: AxisGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for {} nodes",
                values.len(),
                grid.count
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSamples(k));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: AxisGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self { grid: self.grid.clone(), values }
    }
}

fn validate(f: &SampledCurve) -> Result<()> {
    if f.grid.count < 3 {
        return Err(Error::GridTooSmall(f.grid.count));
    }
    if f.values.len() != f.grid.count {
        return Err(Error::ShapeMismatch(format!("{} samples for {} nodes", f.values.len(), f.grid.count)));
    }
    match f.values.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(Error::InvalidSamples(k)),
        None => Ok(()),
    }
}

/// Left Caputo derivative at every node; zero at the terminal node.
pub fn caputo_left(f: &SampledCurve, order: FractionalOrder) -> Result<SampledCurve> {
    validate(f)?;
    let kernel = CaputoKernel::new(&f.grid, order);
    let mut out = vec![0.0; f.values.len()];
    kernel.apply(&f.values, &mut out);
    Ok(f.with_values(out))
}

/// Left Riemann-Liouville derivative, computed as the Caputo derivative plus the
/// contribution `f(lower) (x - lower)^(-alpha) / Gamma(1 - alpha)` of the initial value.
///
/// The RL derivative of a function with `f(lower) != 0` is singular at the terminal node;
/// the value there is reported as 0 like the Caputo derivative.
pub fn rl_derivative_left(f: &SampledCurve, order: FractionalOrder) -> Result<SampledCurve> {
    let mut out = caputo_left(f, order)?;
    if !order.is_integer() {
        let a = order.alpha();
        let f0 = f.values[0];
        let g = gamma(1.0 - a);
        for (k, v) in out.values.iter_mut().enumerate().skip(1) {
            *v += f0 * (k as f64 * f.grid.spacing).powf(-a) / g;
        }
    }
    Ok(out)
}

/// Left Riemann-Liouville integral; zero at the terminal node.
pub fn rl_integral_left(f: &SampledCurve, order: FractionalOrder) -> Result<SampledCurve> {
    validate(f)?;
    let kernel = RlIntegralKernel::new(f.grid.spacing, order, f.values.len());
    Ok(f.with_values(kernel.running(&f.values)))
}

/// Max-norm of `I^alpha(D^alpha f) - (f - f(lower))`.
pub fn fundamental_theorem_residual(f: &SampledCurve, order: FractionalOrder) -> Result<f64> {
    let d = caputo_left(f, order)?;
    let back = rl_integral_left(&d, order)?;
    let f0 = f.values[0];
    Ok(back
        .values
        .iter()
        .zip(&f.values)
        .map(|(b, v)| (b - (v - f0)).abs())
        .fold(0.0, f64::max))
}
