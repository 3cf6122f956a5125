use super::{DConnectionCoeffs, DGeometry};
use crate::error::{Error, Result};
use crate::fraccalc::FractionalOrder;
use crate::geometry::{DMetric, GridChart, NConnectionField};
use crate::tensor::Components;

/// d-curvature blocks, indices in the order of the block name (upper index first).
///
/// `hhhh: R^i_hjk`, `vvhh: R^a_bjk`, `hhhv: R^i_jka`, `vvhv: R^c_bka`, `hhvv: R^i_jbc`,
/// `vvvv: R^a_bcd`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBlocks {
    pub chart: GridChart,
    pub hhhh: Components,
    pub vvhh: Components,
    pub hhhv: Components,
    pub vvhv: Components,
    pub hhvv: Components,
    pub vvvv: Components,
}

/// Ricci blocks `R_ij`, `R_ia`, `R_ai`, `R_ab` and the h/v scalar curvatures.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciBlocks {
    pub chart: GridChart,
    pub hh: Components,
    pub hv: Components,
    pub vh: Components,
    pub vv: Components,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
}

impl RicciBlocks {
    /// Full `[dim, dim]` Ricci tensor in the N-adapted frame.
    pub fn full(&self) -> Components {
        let (n, m) = (self.chart.h_dim(), self.chart.v_dim());
        let d = n + m;
        Components::from_fn(&[d, d], self.chart.len(), |x, p| match (x[0] < n, x[1] < n) {
            (true, true) => self.hh.at(&[x[0], x[1]], p),
            (true, false) => self.hv.at(&[x[0], x[1] - n], p),
            (false, true) => self.vh.at(&[x[0] - n, x[1]], p),
            (false, false) => self.vv.at(&[x[0] - n, x[1] - n], p),
        })
    }

    /// `R + S` at every node.
    pub fn total_scalar(&self) -> Vec<f64> {
        self.r.iter().zip(&self.s).map(|(a, b)| a + b).collect()
    }
}

/// Einstein blocks `G_ij`, `G_ia`, `G_ai`, `G_ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct EinsteinBlocks {
    pub hh: Components,
    pub hv: Components,
    pub vh: Components,
    pub vv: Components,
}

/// Frame derivatives of every component: the result has shape `c.shape + [dim]`.
pub(crate) fn frame_derivs(geo: &DGeometry, c: &Components) -> Components {
    let d = geo.chart().dim();
    let mut shape = c.shape().to_vec();
    shape.push(d);
    let mut out = Components::zeros(&shape, c.nodes());
    for idx in c.indices() {
        let comp = c.get(&idx);
        if comp.iter().all(|&v| v == 0.0) {
            continue;
        }
        for (beta, f) in geo.e(comp).into_iter().enumerate() {
            let mut full = idx.clone();
            full.push(beta);
            *out.get_mut(&full) = f;
        }
    }
    out
}

pub fn dcurvature(gamma: &DConnectionCoeffs, n_conn: &NConnectionField, g: &DMetric, order: FractionalOrder) -> Result<CurvatureBlocks> {
    if gamma.chart != n_conn.chart || gamma.chart != g.chart {
        return Err(Error::ChartMismatch);
    }
    Ok(curvature_with(gamma, &DGeometry::new(g, n_conn, order)?))
}

/// Curvature blocks from a prepared [`DGeometry`].
pub fn curvature_with(gamma: &DConnectionCoeffs, geo: &DGeometry) -> CurvatureBlocks {
    let (n, m, len) = (geo.h_dim(), geo.v_dim(), geo.chart().len());
    let (lh, lv, ch, cv) = (&gamma.l_h, &gamma.l_v, &gamma.c_h, &gamma.c_v);
    let om = &geo.anholonomy.omega;
    let dlh = frame_derivs(geo, lh);
    let dlv = frame_derivs(geo, lv);
    let dch = frame_derivs(geo, ch);
    let dcv = frame_derivs(geo, cv);
    // d_a N_k^b - L^b_ak
    let t = |b: usize, a: usize, k: usize, p: usize| geo.dv_n(k, b, a, p) - lv.at(&[b, a, k], p);

    let hhhh = Components::from_fn(&[n, n, n, n], len, |x, p| {
        let (i, h, j, k) = (x[0], x[1], x[2], x[3]);
        let mut s = dlh.at(&[i, h, j, k], p) - dlh.at(&[i, h, k, j], p);
        for q in 0..n {
            s += lh.at(&[q, h, j], p) * lh.at(&[i, q, k], p) - lh.at(&[q, h, k], p) * lh.at(&[i, q, j], p);
        }
        for a in 0..m {
            s -= ch.at(&[i, h, a], p) * om.at(&[a, k, j], p);
        }
        s
    });
    let vvhh = Components::from_fn(&[m, m, n, n], len, |x, p| {
        let (a, b, j, k) = (x[0], x[1], x[2], x[3]);
        let mut s = dlv.at(&[a, b, j, k], p) - dlv.at(&[a, b, k, j], p);
        for c in 0..m {
            s += lv.at(&[c, b, j], p) * lv.at(&[a, c, k], p) - lv.at(&[c, b, k], p) * lv.at(&[a, c, j], p);
            s -= cv.at(&[a, b, c], p) * om.at(&[c, k, j], p);
        }
        s
    });
    let hhhv = Components::from_fn(&[n, n, n, m], len, |x, p| {
        let (i, j, k, a) = (x[0], x[1], x[2], x[3]);
        // D_k C^i_ja
        let mut dc = dch.at(&[i, j, a, k], p);
        for q in 0..n {
            dc += lh.at(&[i, q, k], p) * ch.at(&[q, j, a], p) - lh.at(&[q, j, k], p) * ch.at(&[i, q, a], p);
        }
        let mut s = dlh.at(&[i, j, k, n + a], p);
        for b in 0..m {
            dc -= lv.at(&[b, a, k], p) * ch.at(&[i, j, b], p);
            s += ch.at(&[i, j, b], p) * t(b, a, k, p);
        }
        s - dc
    });
    let vvhv = Components::from_fn(&[m, m, n, m], len, |x, p| {
        let (c, b, k, a) = (x[0], x[1], x[2], x[3]);
        // D_k C^c_ba
        let mut dc = dcv.at(&[c, b, a, k], p);
        let mut s = dlv.at(&[c, b, k, n + a], p);
        for d in 0..m {
            dc += lv.at(&[c, d, k], p) * cv.at(&[d, b, a], p) - lv.at(&[d, b, k], p) * cv.at(&[c, d, a], p)
                - lv.at(&[d, a, k], p) * cv.at(&[c, b, d], p);
            s += cv.at(&[c, b, d], p) * t(d, a, k, p);
        }
        s - dc
    });
    let hhvv = Components::from_fn(&[n, n, m, m], len, |x, p| {
        let (i, j, b, c) = (x[0], x[1], x[2], x[3]);
        let mut s = dch.at(&[i, j, b, n + c], p) - dch.at(&[i, j, c, n + b], p);
        for h in 0..n {
            s += ch.at(&[h, j, b], p) * ch.at(&[i, h, c], p) - ch.at(&[h, j, c], p) * ch.at(&[i, h, b], p);
        }
        s
    });
    let vvvv = Components::from_fn(&[m, m, m, m], len, |x, p| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        let mut s = dcv.at(&[a, b, c, n + d], p) - dcv.at(&[a, b, d, n + c], p);
        for e in 0..m {
            s += cv.at(&[e, b, c], p) * cv.at(&[a, e, d], p) - cv.at(&[e, b, d], p) * cv.at(&[a, e, c], p);
        }
        s
    });
    CurvatureBlocks { chart: geo.chart().clone(), hhhh, vvhh, hhhv, vvhv, hhvv, vvvv }
}

/// `R_ij = R^k_ijk`, `R_ia = -R^k_ika`, `R_ai = R^b_aib`, `R_ab = R^c_abc`. The scalar
/// fields are left at zero; see [`scalar_curvature`].
pub fn ricci_contract(r: &CurvatureBlocks) -> RicciBlocks {
    let (n, m, len) = (r.chart.h_dim(), r.chart.v_dim(), r.chart.len());
    RicciBlocks {
        chart: r.chart.clone(),
        hh: Components::from_fn(&[n, n], len, |x, p| (0..n).map(|k| r.hhhh.at(&[k, x[0], x[1], k], p)).sum()),
        hv: Components::from_fn(&[n, m], len, |x, p| -(0..n).map(|k| r.hhhv.at(&[k, x[0], k, x[1]], p)).sum::<f64>()),
        vh: Components::from_fn(&[m, n], len, |x, p| (0..m).map(|b| r.vvhv.at(&[b, x[0], x[1], b], p)).sum()),
        vv: Components::from_fn(&[m, m], len, |x, p| (0..m).map(|c| r.vvvv.at(&[c, x[0], x[1], c], p)).sum()),
        r: vec![0.0; len],
        s: vec![0.0; len],
    }
}

/// `R = g^ij R_ij` and `S = g^ab R_ab`.
pub fn scalar_curvature(g: &DMetric, ric: &RicciBlocks) -> Result<(Vec<f64>, Vec<f64>)> {
    let (ih, iv) = g.inverse()?;
    Ok((trace_blocks(&ih.inverse, &ric.hh), trace_blocks(&iv.inverse, &ric.vv)))
}

pub fn trace_blocks(inv: &Components, t: &Components) -> Vec<f64> {
    let d = inv.shape()[0];
    (0..inv.nodes())
        .map(|p| {
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    s += inv.at(&[i, j], p) * t.at(&[i, j], p);
                }
            }
            s
        })
        .collect()
}

/// `G = Ric - g (R + S) / 2` blockwise; mixed blocks carry no metric term.
pub fn einstein_tensor(g: &DMetric, ric: &RicciBlocks) -> EinsteinBlocks {
    let len = g.chart.len();
    let total = ric.total_scalar();
    let shift = |rb: &Components, gb: &Components| {
        Components::from_fn(rb.shape(), len, |x, p| rb.at(x, p) - 0.5 * gb.at(x, p) * total[p])
    };
    EinsteinBlocks { hh: shift(&ric.hh, &g.h), hv: ric.hv.clone(), vh: ric.vh.clone(), vv: shift(&ric.vv, &g.v) }
}

/// Ricci blocks with scalars filled in, from a prepared geometry.
pub fn ricci_with(gamma: &DConnectionCoeffs, geo: &DGeometry) -> RicciBlocks {
    let mut ric = ricci_contract(&curvature_with(gamma, geo));
    ric.r = trace_blocks(&geo.ginv_h, &ric.hh);
    ric.s = trace_blocks(&geo.ginv_v, &ric.vv);
    ric
}
