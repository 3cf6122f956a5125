//! Canonical d-connection, torsion, curvature, Ricci and Einstein tensors, the distortion to
//! the Levi-Civita connection and metricity diagnostics.
//!
//! Connection coefficients follow `D_{e_beta} e_alpha = Gamma^gamma_{alpha beta} e_gamma`, so
//! `L^i_jk` is the h-component of `D_k e_j` and `C^i_jc` that of `D_c e_j`.

mod curvature;
mod distortion;
mod generic;

pub use curvature::{curvature_with, ricci_with, trace_blocks, dcurvature, einstein_tensor, ricci_contract, scalar_curvature, CurvatureBlocks, EinsteinBlocks, RicciBlocks};
pub use distortion::{distortion_with, levi_civita_distortion, push_to_coordinates, DistortionBlocks};
pub use generic::{full_curvature, full_ricci};

use crate::error::{Error, Result};
use crate::fraccalc::FractionalOrder;
use crate::geometry::{anholonomy, Anholonomy, DMetric, FrameDerivative, GridChart, NConnectionField};
use crate::tensor::Components;

/// Per-state quantities shared by the connection, curvature and functional computations.
#[derive(Debug, Clone)]
pub struct DGeometry {
    pub g: DMetric,
    pub n_conn: NConnectionField,
    pub order: FractionalOrder,
    pub frame: FrameDerivative,
    /// `g^ij`, shape `[n, n]`.
    pub ginv_h: Components,
    /// `g^ab`, shape `[m, m]`.
    pub ginv_v: Components,
    pub det_h: Vec<f64>,
    pub det_v: Vec<f64>,
    pub anholonomy: Anholonomy,
    /// `dg_h.get(&[j, r, beta]) = e_beta g_jr`.
    pub dg_h: Components,
    /// `dg_v.get(&[a, b, beta]) = e_beta g_ab`.
    pub dg_v: Components,
}

impl DGeometry {
    pub fn new(g: &DMetric, n_conn: &NConnectionField, order: FractionalOrder) -> Result<Self> {
        if g.chart != n_conn.chart {
            return Err(Error::ChartMismatch);
        }
        let (ih, iv) = g.inverse()?;
        let frame = FrameDerivative::new(n_conn, order);
        let chart = &g.chart;
        let d = chart.dim();
        let block_derivs = |b: &Components| {
            let k = b.shape()[0];
            let mut out = Components::zeros(&[k, k, d], chart.len());
            for i in 0..k {
                for j in i..k {
                    for (beta, f) in frame.all(b.get(&[i, j])).into_iter().enumerate() {
                        if i != j {
                            *out.get_mut(&[j, i, beta]) = f.clone();
                        }
                        *out.get_mut(&[i, j, beta]) = f;
                    }
                }
            }
            out
        };
        Ok(Self {
            dg_h: block_derivs(&g.h),
            dg_v: block_derivs(&g.v),
            anholonomy: anholonomy(n_conn, order),
            g: g.clone(),
            n_conn: n_conn.clone(),
            order,
            frame,
            ginv_h: ih.inverse,
            ginv_v: iv.inverse,
            det_h: ih.det,
            det_v: iv.det,
        })
    }

    pub fn chart(&self) -> &GridChart {
        &self.g.chart
    }

    pub fn h_dim(&self) -> usize {
        self.g.chart.h_dim()
    }

    pub fn v_dim(&self) -> usize {
        self.g.chart.v_dim()
    }

    /// `e_beta f` for every direction.
    pub fn e(&self, f: &[f64]) -> Vec<Vec<f64>> {
        self.frame.all(f)
    }

    /// `d_b N_k^a` at node `p`.
    pub fn dv_n(&self, k: usize, a: usize, b: usize, p: usize) -> f64 {
        self.anholonomy.dv.at(&[k, b, a], p)
    }
}

/// Coefficient blocks of a d-connection.
///
/// Shapes: `l_h [n,n,n]` for `L^i_jk`, `l_v [m,m,n]` for `L^a_bk`, `c_h [n,n,m]` for
/// `C^i_jc` and `c_v [m,m,m]` for `C^a_bc`, all with the upper index first.
#[derive(Debug, Clone, PartialEq)]
pub struct DConnectionCoeffs {
    pub chart: GridChart,
    pub l_h: Components,
    pub l_v: Components,
    pub c_h: Components,
    pub c_v: Components,
}

impl DConnectionCoeffs {
    /// All coefficients as `Gamma^gamma_{alpha beta}` in a `[dim, dim, dim]` array.
    pub fn full(&self) -> Components {
        let (n, m) = (self.chart.h_dim(), self.chart.v_dim());
        let d = n + m;
        Components::from_fn(&[d, d, d], self.chart.len(), |idx, p| {
            let (g, a, b) = (idx[0], idx[1], idx[2]);
            match (g < n, a < n, b < n) {
                (true, true, true) => self.l_h.at(&[g, a, b], p),
                (false, false, true) => self.l_v.at(&[g - n, a - n, b], p),
                (true, true, false) => self.c_h.at(&[g, a, b - n], p),
                (false, false, false) => self.c_v.at(&[g - n, a - n, b - n], p),
                _ => 0.0,
            }
        })
    }
}

/// Deliberate corruptions of the canonical coefficients, used to check that the
/// diagnostics detect a broken connection.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CanonicalMutation {
    #[default]
    None,
    /// Flips the sign of the `e_r g_jk` term in `L^i_jk`.
    FlipHorizontalTerm,
}

/// Canonical d-connection of `(g, N)`.
pub fn canonical_dconnection(g: &DMetric, n_conn: &NConnectionField, order: FractionalOrder) -> Result<DConnectionCoeffs> {
    Ok(canonical_from(&DGeometry::new(g, n_conn, order)?, CanonicalMutation::None))
}

#[doc(hidden)]
pub fn canonical_mutated(geo: &DGeometry, mutation: CanonicalMutation) -> DConnectionCoeffs {
    canonical_from(geo, mutation)
}

/// Canonical d-connection from a prepared [`DGeometry`].
pub fn canonical(geo: &DGeometry) -> DConnectionCoeffs {
    canonical_from(geo, CanonicalMutation::None)
}

fn canonical_from(geo: &DGeometry, mutation: CanonicalMutation) -> DConnectionCoeffs {
    let (n, m, len) = (geo.h_dim(), geo.v_dim(), geo.chart().len());
    let gv = &geo.g.v;
    let (ih, iv) = (&geo.ginv_h, &geo.ginv_v);
    let (dh, dv) = (&geo.dg_h, &geo.dg_v);
    let sign = if mutation == CanonicalMutation::FlipHorizontalTerm { -1.0 } else { 1.0 };

    let l_h = Components::from_fn(&[n, n, n], len, |idx, p| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        (0..n)
            .map(|r| 0.5 * ih.at(&[i, r], p) * ((dh.at(&[j, r, k], p) + dh.at(&[k, r, j], p)) - sign * dh.at(&[j, k, r], p)))
            .sum()
    });
    let l_v = Components::from_fn(&[m, m, n], len, |idx, p| {
        let (a, b, k) = (idx[0], idx[1], idx[2]);
        let mut s = 0.0;
        for c in 0..m {
            let mut t = dv.at(&[b, c, k], p);
            for d in 0..m {
                t -= gv.at(&[d, c], p) * geo.dv_n(k, d, b, p) + gv.at(&[d, b], p) * geo.dv_n(k, d, c, p);
            }
            s += 0.5 * iv.at(&[a, c], p) * t;
        }
        geo.dv_n(k, a, b, p) + s
    });
    let c_h = Components::from_fn(&[n, n, m], len, |idx, p| {
        let (i, j, c) = (idx[0], idx[1], idx[2]);
        (0..n).map(|k| 0.5 * ih.at(&[i, k], p) * dh.at(&[j, k, n + c], p)).sum()
    });
    let c_v = Components::from_fn(&[m, m, m], len, |idx, p| {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        (0..m)
            .map(|d| 0.5 * iv.at(&[a, d], p) * ((dv.at(&[b, d, n + c], p) + dv.at(&[c, d, n + b], p)) - dv.at(&[b, c, n + d], p)))
            .sum()
    });
    DConnectionCoeffs { chart: geo.chart().clone(), l_h, l_v, c_h, c_v }
}

/// d-torsion blocks.
///
/// Shapes: `hhh [n,n,n]` for `T^i_jk`, `hhv [n,n,m]` for `T^i_ja`, `vhh [m,n,n]` for
/// `T^a_ji`, `vvh [m,m,n]` for `T^a_bi` and `vvv [m,m,m]` for `T^a_bc`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionBlocks {
    pub hhh: Components,
    pub hhv: Components,
    pub vhh: Components,
    pub vvh: Components,
    pub vvv: Components,
}

/// `T^i_jk = L^i_jk - L^i_kj`, `T^i_ja = C^i_ja`, `T^a_ji = Omega^a_ji`,
/// `T^a_bi = d_b N_i^a - L^a_bi`, `T^a_bc = C^a_bc - C^a_cb`.
pub fn dtorsion(gamma: &DConnectionCoeffs, n_conn: &NConnectionField, order: FractionalOrder) -> Result<TorsionBlocks> {
    if gamma.chart != n_conn.chart {
        return Err(Error::ChartMismatch);
    }
    Ok(torsion_with(gamma, &anholonomy(n_conn, order)))
}

pub fn torsion_with(gamma: &DConnectionCoeffs, w: &Anholonomy) -> TorsionBlocks {
    let (n, m, len) = (gamma.chart.h_dim(), gamma.chart.v_dim(), gamma.chart.len());
    TorsionBlocks {
        hhh: Components::from_fn(&[n, n, n], len, |x, p| gamma.l_h.at(&[x[0], x[1], x[2]], p) - gamma.l_h.at(&[x[0], x[2], x[1]], p)),
        hhv: gamma.c_h.clone(),
        vhh: w.omega.clone(),
        vvh: Components::from_fn(&[m, m, n], len, |x, p| w.dv.at(&[x[2], x[1], x[0]], p) - gamma.l_v.at(&[x[0], x[1], x[2]], p)),
        vvv: Components::from_fn(&[m, m, m], len, |x, p| gamma.c_v.at(&[x[0], x[1], x[2]], p) - gamma.c_v.at(&[x[0], x[2], x[1]], p)),
    }
}

/// Largest absolute nonmetricity `D_gamma g` over the four d-metric blocks.
pub fn metricity_residual(gamma: &DConnectionCoeffs, g: &DMetric, n_conn: &NConnectionField, order: FractionalOrder) -> Result<f64> {
    Ok(metricity_with(gamma, &DGeometry::new(g, n_conn, order)?))
}

pub fn metricity_with(gamma: &DConnectionCoeffs, geo: &DGeometry) -> f64 {
    let (n, m, len) = (geo.h_dim(), geo.v_dim(), geo.chart().len());
    let (gh, gv, dh, dv) = (&geo.g.h, &geo.g.v, &geo.dg_h, &geo.dg_v);
    let mut worst: f64 = 0.0;
    for p in 0..len {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = dh.at(&[i, j, k], p);
                    for q in 0..n {
                        r -= gamma.l_h.at(&[q, i, k], p) * gh.at(&[q, j], p) + gamma.l_h.at(&[q, j, k], p) * gh.at(&[i, q], p);
                    }
                    worst = worst.max(r.abs());
                }
                for c in 0..m {
                    let mut r = dh.at(&[i, j, n + c], p);
                    for q in 0..n {
                        r -= gamma.c_h.at(&[q, i, c], p) * gh.at(&[q, j], p) + gamma.c_h.at(&[q, j, c], p) * gh.at(&[i, q], p);
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for k in 0..n {
                    let mut r = dv.at(&[a, b, k], p);
                    for c in 0..m {
                        r -= gamma.l_v.at(&[c, a, k], p) * gv.at(&[c, b], p) + gamma.l_v.at(&[c, b, k], p) * gv.at(&[a, c], p);
                    }
                    worst = worst.max(r.abs());
                }
                for e in 0..m {
                    let mut r = dv.at(&[a, b, n + e], p);
                    for c in 0..m {
                        r -= gamma.c_v.at(&[c, a, e], p) * gv.at(&[c, b], p) + gamma.c_v.at(&[c, b, e], p) * gv.at(&[a, c], p);
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests;
