use crate::error::{Error, Result};
use crate::tensor::{invert_symmetric, BlockInverse, Components};

use super::GridChart;

/// N-connection coefficients `N_i^a`, stored as `coefficients.get(&[i, a])` with `a`
/// counted from 0 within the vertical block.
#[derive(Debug, Clone, PartialEq)]
pub struct NConnectionField {
    pub chart: GridChart,
    pub coefficients: Components,
}

impl NConnectionField {
    pub fn new(chart: GridChart, coefficients: Components) -> Result<Self> {
        if coefficients.shape() != [chart.h_dim(), chart.v_dim()] || coefficients.nodes() != chart.len() {
            return Err(Error::ShapeMismatch("N-connection must have shape [n, m]".into()));
        }
        check_finite(&coefficients)?;
        Ok(Self { chart, coefficients })
    }

    pub fn zero(chart: &GridChart) -> Self {
        let coefficients = Components::zeros(&[chart.h_dim(), chart.v_dim()], chart.len());
        Self { chart: chart.clone(), coefficients }
    }

    /// `N_i^a(u)` from a closure `f(i, a, u)`.
    pub fn from_fn(chart: &GridChart, f: impl Fn(usize, usize, &[f64]) -> f64) -> Result<Self> {
        let coords: Vec<Vec<f64>> = (0..chart.len()).map(|p| chart.coords(p)).collect();
        let c = Components::from_fn(&[chart.h_dim(), chart.v_dim()], chart.len(), |idx, p| f(idx[0], idx[1], &coords[p]));
        Self::new(chart.clone(), c)
    }

    pub fn get(&self, i: usize, a: usize) -> &[f64] {
        self.coefficients.get(&[i, a])
    }
}

fn check_finite(c: &Components) -> Result<()> {
    for comp in c.fields() {
        if let Some(p) = comp.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSamples(p));
        }
    }
    Ok(())
}

fn check_symmetric(c: &Components) -> Result<()> {
    let d = c.shape()[0];
    for i in 0..d {
        for j in i + 1..d {
            let (a, b) = (c.get(&[i, j]), c.get(&[j, i]));
            if let Some(p) = a.iter().zip(b).position(|(x, y)| (x - y).abs() > 1e-12 * (1.0 + x.abs())) {
                return Err(Error::ShapeMismatch(format!("metric block not symmetric at node {p}")));
            }
        }
    }
    Ok(())
}

/// d-metric: horizontal block `g_ij` (shape `[n, n]`) and vertical block `g_ab` (`[m, m]`).
#[derive(Debug, Clone, PartialEq)]
pub struct DMetric {
    pub chart: GridChart,
    pub h: Components,
    pub v: Components,
}

impl DMetric {
    /// Validates symmetry, finiteness and nondegeneracy of both blocks.
    pub fn new(chart: GridChart, h: Components, v: Components) -> Result<Self> {
        let (n, m) = (chart.h_dim(), chart.v_dim());
        if h.shape() != [n, n] || v.shape() != [m, m] || h.nodes() != chart.len() || v.nodes() != chart.len() {
            return Err(Error::ShapeMismatch("d-metric blocks must have shapes [n, n] and [m, m]".into()));
        }
        check_finite(&h)?;
        check_finite(&v)?;
        check_symmetric(&h)?;
        check_symmetric(&v)?;
        let g = Self { chart, h, v };
        g.inverse()?;
        Ok(g)
    }

    pub fn flat(chart: &GridChart) -> Self {
        let (n, m, len) = (chart.h_dim(), chart.v_dim(), chart.len());
        let id = |d: usize| Components::from_fn(&[d, d], len, |idx, _| if idx[0] == idx[1] { 1.0 } else { 0.0 });
        Self { chart: chart.clone(), h: id(n), v: id(m) }
    }

    /// Blocks from closures `h(i, j, u)` and `v(a, b, u)`; only `i <= j` is queried.
    pub fn from_fn(
        chart: &GridChart,
        h: impl Fn(usize, usize, &[f64]) -> f64,
        v: impl Fn(usize, usize, &[f64]) -> f64,
    ) -> Result<Self> {
        let coords: Vec<Vec<f64>> = (0..chart.len()).map(|p| chart.coords(p)).collect();
        let sym = |f: &dyn Fn(usize, usize, &[f64]) -> f64, d: usize| {
            Components::from_fn(&[d, d], chart.len(), |idx, p| f(idx[0].min(idx[1]), idx[0].max(idx[1]), &coords[p]))
        };
        Self::new(chart.clone(), sym(&h, chart.h_dim()), sym(&v, chart.v_dim()))
    }

    /// Inverses and determinants of both blocks.
    pub fn inverse(&self) -> Result<(BlockInverse, BlockInverse)> {
        Ok((invert_symmetric(&self.h)?, invert_symmetric(&self.v)?))
    }

    /// `sqrt|det g_ij| * sqrt|det g_ab|` at every node.
    pub fn density(&self) -> Result<Vec<f64>> {
        let (h, v) = self.inverse()?;
        Ok(h.det.iter().zip(&v.det).map(|(a, b)| (a.abs() * b.abs()).sqrt()).collect())
    }

    /// Block entry in full frame indices, zero for mixed h/v pairs.
    pub fn full(&self, alpha: usize, beta: usize) -> Option<&[f64]> {
        let n = self.chart.h_dim();
        match (alpha < n, beta < n) {
            (true, true) => Some(self.h.get(&[alpha, beta])),
            (false, false) => Some(self.v.get(&[alpha - n, beta - n])),
            _ => None,
        }
    }
}

/// Full symmetric metric `g_{alpha beta}` in coordinate components.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMetric {
    pub chart: GridChart,
    pub g: Components,
}

/// Vielbein pair. `forward.get(&[mu, alpha])` expands coordinate frame vectors in the
/// N-adapted frame, `inverse` is its matrix inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTransform {
    pub chart: GridChart,
    pub forward: Components,
    pub inverse: Components,
}

impl FrameTransform {
    /// Coordinate components `F T F^T` of a covariant 2-tensor given in the N-adapted frame.
    pub fn covariant_to_coordinate(&self, t: &Components) -> Components {
        let d = self.chart.dim();
        let f = &self.forward;
        Components::from_fn(&[d, d], self.chart.len(), |idx, p| {
            let mut s = 0.0;
            for a in 0..d {
                let fa = f.at(&[idx[0], a], p);
                if fa == 0.0 {
                    continue;
                }
                for b in 0..d {
                    s += fa * t.at(&[a, b], p) * f.at(&[idx[1], b], p);
                }
            }
            s
        })
    }
}
