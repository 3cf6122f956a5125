use super::{FractionalOrder, PartialDerivative};
use crate::error::{Error, Result};
use crate::geometry::GridChart;

/// Differential form of degree 0, 1 or 2 in the fractional coframe `(dx^i)^alpha`.
///
/// Components are stored per index combination: one for degree 0, `dim` for degree 1 and
/// `dim * dim` (row-major `[i * dim + j]`, antisymmetric) for degree 2.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    chart: GridChart,
    degree: usize,
    coefficients: Vec<Vec<f64>>,
}

impl FormField {
    pub fn new(chart: GridChart, degree: usize, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let d = chart.dim();
        let expected = match degree {
            0 => 1,
            1 => d,
            2 => d * d,
            _ => return Err(Error::ShapeMismatch(format!("degree {degree} not supported"))),
        };
        if coefficients.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} components for a {degree}-form in dimension {d}",
                coefficients.len()
            )));
        }
        for c in &coefficients {
            chart.check_len(c.len())?;
        }
        if degree == 2 {
            for i in 0..d {
                for j in 0..d {
                    let (a, b) = (&coefficients[i * d + j], &coefficients[j * d + i]);
                    if a.iter().zip(b).any(|(x, y)| (x + y).abs() > 1e-12 * (1.0 + x.abs())) {
                        return Err(Error::ShapeMismatch("2-form coefficients are not antisymmetric".into()));
                    }
                }
            }
        }
        Ok(Self { chart, degree, coefficients })
    }

    pub fn scalar(chart: GridChart, f: Vec<f64>) -> Result<Self> {
        Self::new(chart, 0, vec![f])
    }

    pub fn chart(&self) -> &GridChart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    /// Component `i` of a 1-form, or the scalar of a 0-form.
    pub fn component(&self, i: usize) -> &[f64] {
        &self.coefficients[i]
    }

    /// Coefficient of `(dx^i)^alpha ^ (dx^j)^alpha` of a 2-form.
    pub fn pair(&self, i: usize, j: usize) -> &[f64] {
        &self.coefficients[i * self.chart.dim() + j]
    }
}

/// Fractional exterior derivative.
///
/// A 0-form maps to its fractional gradient. A 1-form `F_j (dx^j)^alpha` maps to the 2-form
/// with coefficients `d_i F_j - d_j F_i`.
pub fn exterior_derivative(omega: &FormField, order: FractionalOrder) -> Result<FormField> {
    let chart = omega.chart.clone();
    let d = PartialDerivative::new(&chart, order);
    match omega.degree {
        0 => FormField::new(chart, 1, d.all(&omega.coefficients[0])),
        1 => {
            let dim = chart.dim();
            let partials: Vec<Vec<Vec<f64>>> = omega.coefficients.iter().map(|c| d.all(c)).collect();
            let mut out = vec![vec![0.0; chart.len()]; dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    if i == j {
                        continue;
                    }
                    out[i * dim + j] = partials[j][i].iter().zip(&partials[i][j]).map(|(a, b)| a - b).collect();
                }
            }
            FormField::new(chart, 2, out)
        }
        k => Err(Error::TopDegree(k)),
    }
}
