use crate::error::{Error, Result};
use crate::fraccalc::{FractionalOrder, PartialDerivative};
use crate::tensor::{invert_symmetric, Components};

use super::{CoordinateMetric, DMetric, FrameTransform, NConnectionField};

/// N-adapted frame derivatives `e_j = d_j - N_j^a d_a`, `e_b = d_b`.
#[derive(Debug, Clone)]
pub struct FrameDerivative {
    partial: PartialDerivative,
    n_conn: NConnectionField,
}

impl FrameDerivative {
    pub fn new(n_conn: &NConnectionField, order: FractionalOrder) -> Self {
        Self { partial: PartialDerivative::new(&n_conn.chart, order), n_conn: n_conn.clone() }
    }

    pub fn partial(&self) -> &PartialDerivative {
        &self.partial
    }

    pub fn n_conn(&self) -> &NConnectionField {
        &self.n_conn
    }

    /// `e_beta f` for every frame direction `beta`.
    pub fn all(&self, f: &[f64]) -> Vec<Vec<f64>> {
        let d = self.partial.all(f);
        self.combine(d)
    }

    /// Converts coordinate partials into frame derivatives.
    pub fn combine(&self, mut d: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let chart = &self.n_conn.chart;
        let (n, m) = (chart.h_dim(), chart.v_dim());
        for j in 0..n {
            for a in 0..m {
                let nja = self.n_conn.get(j, a);
                let (h, v) = d.split_at_mut(n);
                for ((x, &c), &dv) in h[j].iter_mut().zip(nja).zip(&v[a]) {
                    *x -= c * dv;
                }
            }
        }
        d
    }

    pub fn along(&self, f: &[f64], beta: usize) -> Vec<f64> {
        let chart = &self.n_conn.chart;
        let n = chart.h_dim();
        let mut out = self.partial.along(f, beta);
        if beta < n {
            for a in 0..chart.v_dim() {
                let dv = self.partial.along(f, n + a);
                for ((o, c), x) in out.iter_mut().zip(self.n_conn.get(beta, a)).zip(dv) {
                    *o -= c * x;
                }
            }
        }
        out
    }
}

/// `e_beta f` for a single direction.
pub fn nadapted_derivative(f: &[f64], beta: usize, n_conn: &NConnectionField, order: FractionalOrder) -> Result<Vec<f64>> {
    let chart = &n_conn.chart;
    chart.check_len(f.len())?;
    if beta >= chart.dim() {
        return Err(Error::IndexOutOfRange { index: beta, dim: chart.dim() });
    }
    Ok(FrameDerivative::new(n_conn, order).along(f, beta))
}

/// Structure functions of the N-adapted frame, `[e_alpha, e_beta] = W^gamma_{alpha beta} e_gamma`.
///
/// The nonzero ones are `W^a_ib = d_b N_i^a = -W^a_bi` and `W^a_ij = Omega^a_ij` with
/// `Omega^a_ij = e_j N_i^a - e_i N_j^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Anholonomy {
    /// `dv.get(&[i, b, a]) = d_b N_i^a`.
    pub dv: Components,
    /// `omega.get(&[a, i, j]) = Omega^a_ij`.
    pub omega: Components,
}

impl Anholonomy {
    /// All coefficients `W^gamma_{alpha beta}` as a `[dim, dim, dim]` array (gamma first).
    pub fn full(&self) -> Components {
        let (n, m) = (self.omega.shape()[1], self.omega.shape()[0]);
        let d = n + m;
        let mut w = Components::zeros(&[d, d, d], self.omega.nodes());
        for a in 0..m {
            for i in 0..n {
                for j in 0..n {
                    *w.get_mut(&[n + a, i, j]) = self.omega.get(&[a, i, j]).to_vec();
                }
                for b in 0..m {
                    let x = self.dv.get(&[i, b, a]);
                    *w.get_mut(&[n + a, i, n + b]) = x.to_vec();
                    *w.get_mut(&[n + a, n + b, i]) = x.iter().map(|v| -v).collect();
                }
            }
        }
        w
    }
}

pub fn anholonomy(n_conn: &NConnectionField, order: FractionalOrder) -> Anholonomy {
    let chart = &n_conn.chart;
    let (n, m, len) = (chart.h_dim(), chart.v_dim(), chart.len());
    let e = FrameDerivative::new(n_conn, order);
    // en[i][a][beta] = e_beta N_i^a
    let en: Vec<Vec<Vec<Vec<f64>>>> = (0..n).map(|i| (0..m).map(|a| e.all(n_conn.get(i, a))).collect()).collect();
    let dv = Components::from_fn(&[n, m, m], len, |idx, p| en[idx[0]][idx[2]][n + idx[1]][p]);
    let omega = Components::from_fn(&[m, n, n], len, |idx, p| {
        let (a, i, j) = (idx[0], idx[1], idx[2]);
        en[i][a][j][p] - en[j][a][i][p]
    });
    Anholonomy { dv, omega }
}

/// Vielbein of the N-connection: `forward = [[I, N], [0, I]]`, `inverse = [[I, -N], [0, I]]`.
pub fn vielbein(n_conn: &NConnectionField) -> FrameTransform {
    let chart = &n_conn.chart;
    let (n, d) = (chart.h_dim(), chart.dim());
    let build = |sign: f64| {
        Components::from_fn(&[d, d], chart.len(), |idx, p| {
            let (r, c) = (idx[0], idx[1]);
            if r == c {
                1.0
            } else if r < n && c >= n {
                sign * n_conn.coefficients.at(&[r, c - n], p)
            } else {
                0.0
            }
        })
    };
    FrameTransform { chart: chart.clone(), forward: build(1.0), inverse: build(-1.0) }
}

/// Coordinate metric `g_ij + N_i^a N_j^b g_ab`, `N_i^e g_eb`, `g_ab`.
pub fn dmetric_to_coordinate(g: &DMetric, n_conn: &NConnectionField) -> Result<CoordinateMetric> {
    if g.chart != n_conn.chart {
        return Err(Error::ChartMismatch);
    }
    let chart = &g.chart;
    let (n, m, d) = (chart.h_dim(), chart.v_dim(), chart.dim());
    let nn = &n_conn.coefficients;
    let ng = Components::from_fn(&[n, m], chart.len(), |idx, p| {
        (0..m).map(|e| nn.at(&[idx[0], e], p) * g.v.at(&[e, idx[1]], p)).sum()
    });
    let full = Components::from_fn(&[d, d], chart.len(), |idx, p| {
        let (r, c) = (idx[0], idx[1]);
        match (r < n, c < n) {
            (true, true) => g.h.at(&[r, c], p) + (0..m).map(|a| ng.at(&[r, a], p) * nn.at(&[c, a], p)).sum::<f64>(),
            (true, false) => ng.at(&[r, c - n], p),
            (false, true) => ng.at(&[c, r - n], p),
            (false, false) => g.v.at(&[r - n, c - n], p),
        }
    });
    Ok(CoordinateMetric { chart: chart.clone(), g: full })
}

/// Inverse of [`dmetric_to_coordinate`].
pub fn coordinate_to_dmetric(cg: &CoordinateMetric) -> Result<(DMetric, NConnectionField)> {
    let chart = &cg.chart;
    let (n, m, len) = (chart.h_dim(), chart.v_dim(), chart.len());
    let gv = Components::from_fn(&[m, m], len, |idx, p| cg.g.at(&[n + idx[0], n + idx[1]], p));
    let inv = invert_symmetric(&gv).map_err(|e| match e {
        Error::DegenerateMetric { node, .. } => Error::DegenerateVerticalMetric(node),
        other => other,
    })?;
    let nn = Components::from_fn(&[n, m], len, |idx, p| {
        (0..m).map(|b| cg.g.at(&[idx[0], n + b], p) * inv.inverse.at(&[b, idx[1]], p)).sum()
    });
    let gh = Components::from_fn(&[n, n], len, |idx, p| {
        let (i, j) = (idx[0], idx[1]);
        let mut s = cg.g.at(&[i, j], p);
        for a in 0..m {
            for b in 0..m {
                s -= nn.at(&[i, a], p) * nn.at(&[j, b], p) * gv.at(&[a, b], p);
            }
        }
        s
    });
    let n_conn = NConnectionField::new(chart.clone(), nn)?;
    let g = DMetric::new(chart.clone(), gh, gv)?;
    Ok((g, n_conn))
}
