//! Reference configurations shared by the tests, the acceptance suite and the CLI presets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::error::Result;
use crate::fraccalc::AxisGrid;
use crate::geometry::{DMetric, GridChart, NConnectionField};
use crate::perelman::Variation;
use crate::tensor::Components;

/// `c0 + sum amp * cos(k . u + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigField {
    pub c0: f64,
    pub terms: Vec<(f64, Vec<f64>, f64)>,
}

impl TrigField {
    pub fn eval(&self, u: &[f64]) -> f64 {
        self.c0
            + self
                .terms
                .iter()
                .map(|(a, k, ph)| a * (k.iter().zip(u).map(|(x, y)| x * y).sum::<f64>() + ph).cos())
                .sum::<f64>()
    }

    fn random(rng: &mut ChaCha8Rng, c0: f64, amp: f64, dim: usize, terms: usize) -> Self {
        let terms = (0..terms)
            .map(|_| {
                let k = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                (rng.random_range(-amp..amp), k, rng.random_range(0.0..TAU))
            })
            .collect();
        Self { c0, terms }
    }
}

/// Smooth, well-conditioned d-metric and N-connection given by closed-form fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFields {
    pub n: usize,
    pub m: usize,
    /// Upper-triangular entries of `g_ij`, row-major.
    pub h: Vec<TrigField>,
    pub v: Vec<TrigField>,
    /// `N_i^a` at `[i * m + a]`.
    pub n_conn: Vec<TrigField>,
}

fn tri(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    i * d - i * (i + 1) / 2 + j
}

impl SmoothFields {
    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = n + m;
        let block = |rng: &mut ChaCha8Rng, k: usize| {
            let mut out = Vec::new();
            for i in 0..k {
                for j in i..k {
                    let c0 = if i == j { 1.5 } else { 0.0 };
                    out.push(TrigField::random(rng, c0, 0.15, d, 3));
                }
            }
            out
        };
        let h = block(&mut rng, n);
        let v = block(&mut rng, m);
        let n_conn = (0..n * m).map(|_| TrigField::random(&mut rng, 0.0, 0.4, d, 3)).collect();
        Self { n, m, h, v, n_conn }
    }

    pub fn g_h(&self, i: usize, j: usize, u: &[f64]) -> f64 {
        self.h[tri(self.n, i, j)].eval(u)
    }

    pub fn g_v(&self, a: usize, b: usize, u: &[f64]) -> f64 {
        self.v[tri(self.m, a, b)].eval(u)
    }

    pub fn n_coef(&self, i: usize, a: usize, u: &[f64]) -> f64 {
        self.n_conn[i * self.m + a].eval(u)
    }

    /// Coordinate metric of the d-metric at a point, as rows.
    pub fn coordinate_metric(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let (n, m) = (self.n, self.m);
        let d = n + m;
        let mut g = vec![vec![0.0; d]; d];
        for i in 0..n {
            for j in 0..n {
                let mut s = self.g_h(i, j, u);
                for a in 0..m {
                    for b in 0..m {
                        s += self.n_coef(i, a, u) * self.n_coef(j, b, u) * self.g_v(a, b, u);
                    }
                }
                g[i][j] = s;
            }
            for b in 0..m {
                let s: f64 = (0..m).map(|e| self.n_coef(i, e, u) * self.g_v(e, b, u)).sum();
                g[i][n + b] = s;
                g[n + b][i] = s;
            }
        }
        for a in 0..m {
            for b in 0..m {
                g[n + a][n + b] = self.g_v(a, b, u);
            }
        }
        g
    }

    pub fn build(&self, chart: &GridChart) -> Result<(DMetric, NConnectionField)> {
        let g = DMetric::from_fn(chart, |i, j, u| self.g_h(i, j, u), |a, b, u| self.g_v(a, b, u))?;
        let n = NConnectionField::from_fn(chart, |i, a, u| self.n_coef(i, a, u))?;
        Ok((g, n))
    }
}

/// Uniform chart on `[0, 1]^(n+m)` with `count` nodes per axis.
pub fn unit_box(n: usize, m: usize, count: usize) -> Result<GridChart> {
    let axes = (0..n + m).map(|_| AxisGrid::new(0.0, 1.0, count)).collect::<Result<Vec<_>>>()?;
    GridChart::new(n, m, axes)
}

/// Periodic unit cube with `count` nodes per axis.
pub fn unit_torus(n: usize, m: usize, count: usize) -> Result<GridChart> {
    let axes = (0..n + m).map(|_| AxisGrid::periodic(0.0, 1.0, count)).collect::<Result<Vec<_>>>()?;
    GridChart::new(n, m, axes)
}

/// Sphere band `theta in [pi/4, 3pi/4]`, `phi in [0, 2pi)` periodic, times a periodic unit
/// vertical circle with `v_count` nodes.
pub fn sphere_chart(count: usize, v_count: usize) -> Result<GridChart> {
    let axes = vec![
        AxisGrid::new(FRAC_PI_4, 3.0 * FRAC_PI_4, count)?,
        AxisGrid::periodic(0.0, TAU, count)?,
        AxisGrid::periodic(0.0, 1.0, v_count)?,
    ];
    GridChart::new(2, 1, axes)
}

/// Round-sphere h-block `r^2 diag(1, sin^2 theta)` with a flat vertical block.
pub fn sphere_metric(chart: &GridChart, radius: f64) -> Result<DMetric> {
    let r2 = radius * radius;
    DMetric::from_fn(
        chart,
        |i, j, u| match (i, j) {
            (0, 0) => r2,
            (1, 1) => r2 * u[0].sin().powi(2),
            _ => 0.0,
        },
        |_, _, _| 1.0,
    )
}

/// Conformally perturbed flat torus `(1 + eps sin 2pi x1 sin 2pi x2) delta_ij`, flat vertical.
pub fn perturbed_torus_metric(chart: &GridChart, eps: f64) -> Result<DMetric> {
    DMetric::from_fn(
        chart,
        |i, j, u| if i == j { 1.0 + eps * (2.0 * PI * u[0]).sin() * (2.0 * PI * u[1]).sin() } else { 0.0 },
        |a, b, _| if a == b { 1.0 } else { 0.0 },
    )
}

/// Separable d-metric on a unit torus: `N = 0`, `g_ij` depends on `x` only and `g_ab` on `y`
/// only. Returns the metric and a potential that depends on both.
pub fn separable_state(chart: &GridChart) -> Result<(DMetric, Vec<f64>)> {
    let n = chart.h_dim();
    let g = DMetric::from_fn(
        chart,
        |i, j, u| if i == j { 1.0 + 0.05 * (TAU * u[0]).sin() * (TAU * u[n - 1]).sin() } else { 0.0 },
        |a, b, u| if a == b { 1.2 + 0.1 * (TAU * u[n + a]).cos() } else { 0.0 },
    )?;
    let f = chart.sample(|u| 0.1 * (TAU * u[0]).sin() * (TAU * u[n - 1]).cos() + 0.1 * (TAU * (u[n] + u[0])).sin());
    Ok((g, f))
}

/// Direction that keeps a separable d-metric separable: `delta g_ij(x)`, `delta g_ab(y)` and
/// an unrestricted `delta f`, all periodic on the unit torus.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDirection {
    pub n: usize,
    pub m: usize,
    /// Upper-triangular entries, row-major.
    pub h: Vec<TrigField>,
    pub v: Vec<TrigField>,
    pub f: TrigField,
}

impl SeparableDirection {
    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = n + m;
        let periodic = |rng: &mut ChaCha8Rng, axes: std::ops::Range<usize>, amp: f64| {
            let terms = (0..3)
                .map(|_| {
                    let k = (0..d).map(|x| if axes.contains(&x) { TAU * rng.random_range(-1i32..=1) as f64 } else { 0.0 }).collect();
                    (rng.random_range(-amp..amp), k, rng.random_range(0.0..TAU))
                })
                .collect();
            TrigField { c0: 0.0, terms }
        };
        let h = (0..n * (n + 1) / 2).map(|_| periodic(&mut rng, 0..n, 0.3)).collect();
        let v = (0..m * (m + 1) / 2).map(|_| periodic(&mut rng, n..d, 0.3)).collect();
        let f = periodic(&mut rng, 0..d, 0.5);
        Self { n, m, h, v, f }
    }

    pub fn v_h(&self, i: usize, j: usize, u: &[f64]) -> f64 {
        self.h[tri(self.n, i, j)].eval(u)
    }

    pub fn v_v(&self, a: usize, b: usize, u: &[f64]) -> f64 {
        self.v[tri(self.m, a, b)].eval(u)
    }

    /// `(g + eps v_h, g + eps v_v)` and `f + eps delta f`.
    pub fn apply(&self, g: &DMetric, f: &[f64], eps: f64) -> Result<(DMetric, Vec<f64>)> {
        let chart = &g.chart;
        let coords: Vec<Vec<f64>> = (0..chart.len()).map(|p| chart.coords(p)).collect();
        let h = Components::from_fn(g.h.shape(), chart.len(), |x, p| g.h.at(x, p) + eps * self.v_h(x[0], x[1], &coords[p]));
        let v = Components::from_fn(g.v.shape(), chart.len(), |x, p| g.v.at(x, p) + eps * self.v_v(x[0], x[1], &coords[p]));
        let df = chart.sample(|u| self.f.eval(u));
        Ok((DMetric::new(chart.clone(), h, v)?, f.iter().zip(df).map(|(a, b)| a + eps * b).collect()))
    }

    /// The direction sampled on `chart`, with the whole potential change in `f_h`.
    pub fn variation(&self, chart: &GridChart) -> Variation {
        let coords: Vec<Vec<f64>> = (0..chart.len()).map(|p| chart.coords(p)).collect();
        Variation {
            v_h: Components::from_fn(&[self.n, self.n], chart.len(), |x, p| self.v_h(x[0], x[1], &coords[p])),
            v_v: Components::from_fn(&[self.m, self.m], chart.len(), |x, p| self.v_v(x[0], x[1], &coords[p])),
            f_h: chart.sample(|u| self.f.eval(u)),
            f_v: vec![0.0; chart.len()],
        }
    }
}
