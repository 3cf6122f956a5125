use super::{canonical, DConnectionCoeffs, DGeometry};
use crate::error::Result;
use crate::fraccalc::{FractionalOrder, PartialDerivative};
use crate::geometry::{vielbein, DMetric, GridChart, NConnectionField};
use crate::tensor::Components;

/// Distortion `Z` from the canonical d-connection to the Levi-Civita connection.
///
/// Both arrays have shape `[dim, dim, dim]` in the convention of [`DConnectionCoeffs::full`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionBlocks {
    pub chart: GridChart,
    pub z: Components,
    pub levi_civita: Components,
}

pub fn levi_civita_distortion(g: &DMetric, n_conn: &NConnectionField, order: FractionalOrder) -> Result<DistortionBlocks> {
    let geo = DGeometry::new(g, n_conn, order)?;
    let hat = canonical(&geo);
    Ok(distortion_with(&hat, &geo))
}

/// With `K^c_dj = L^c_dj - d_d N_j^c` the nonzero blocks are
///
/// - `Z^a_jk = -C^i_jb g_ik g^ab - Omega^a_jk / 2`
/// - `Z^i_bk = Omega^c_jk g_cb g^ji / 2 + C^i_kb`
/// - `Z^i_kb = Omega^c_jk g_cb g^ji / 2`
/// - `Z^a_jb = K^a_bj`
/// - `Z^i_ab = -g^ij (K^c_aj g_cb + K^c_bj g_ca) / 2`
pub fn distortion_with(hat: &DConnectionCoeffs, geo: &DGeometry) -> DistortionBlocks {
    let (n, m, len) = (geo.h_dim(), geo.v_dim(), geo.chart().len());
    let d = n + m;
    let (gh, gv, ih, iv) = (&geo.g.h, &geo.g.v, &geo.ginv_h, &geo.ginv_v);
    let om = &geo.anholonomy.omega;
    let k = |c: usize, dd: usize, j: usize, p: usize| hat.l_v.at(&[c, dd, j], p) - geo.dv_n(j, c, dd, p);
    // Omega^c_jk g_cb g^ji / 2
    let half_om = |i: usize, kk: usize, b: usize, p: usize| {
        let mut s = 0.0;
        for c in 0..m {
            for j in 0..n {
                s += om.at(&[c, j, kk], p) * gv.at(&[c, b], p) * ih.at(&[j, i], p);
            }
        }
        0.5 * s
    };
    let z = Components::from_fn(&[d, d, d], len, |x, p| {
        let (gm, al, be) = (x[0], x[1], x[2]);
        match (gm < n, al < n, be < n) {
            (false, true, true) => {
                let (a, j, kk) = (gm - n, al, be);
                let mut s = -0.5 * om.at(&[a, j, kk], p);
                for i in 0..n {
                    for b in 0..m {
                        s -= hat.c_h.at(&[i, j, b], p) * gh.at(&[i, kk], p) * iv.at(&[a, b], p);
                    }
                }
                s
            }
            (true, false, true) => {
                let (i, b, kk) = (gm, al - n, be);
                half_om(i, kk, b, p) + hat.c_h.at(&[i, kk, b], p)
            }
            (true, true, false) => half_om(gm, al, be - n, p),
            (false, true, false) => k(gm - n, be - n, al, p),
            (true, false, false) => {
                let (i, a, b) = (gm, al - n, be - n);
                let mut s = 0.0;
                for j in 0..n {
                    let mut t = 0.0;
                    for c in 0..m {
                        t += k(c, a, j, p) * gv.at(&[c, b], p) + k(c, b, j, p) * gv.at(&[c, a], p);
                    }
                    s += ih.at(&[i, j], p) * t;
                }
                -0.5 * s
            }
            _ => 0.0,
        }
    });
    let hat_full = hat.full();
    let levi_civita = Components::from_fn(&[d, d, d], len, |x, p| hat_full.at(x, p) + z.at(x, p));
    DistortionBlocks { chart: geo.chart().clone(), z, levi_civita }
}

/// Coordinate-frame coefficients `G^r_{mu nu}` (with `D_{d_nu} d_mu = G^r_{mu nu} d_r`) of a
/// connection given in the N-adapted frame.
pub fn push_to_coordinates(gamma: &Components, n_conn: &NConnectionField, order: FractionalOrder) -> Components {
    let chart = &n_conn.chart;
    let (n, d) = (chart.h_dim(), chart.dim());
    let fr = vielbein(n_conn);
    let partial = PartialDerivative::new(chart, order);
    // dn[i][a][nu] = d_nu N_i^a
    let dn: Vec<Vec<Vec<Vec<f64>>>> = (0..n).map(|i| (0..chart.v_dim()).map(|a| partial.all(n_conn.get(i, a))).collect()).collect();
    Components::from_fn(&[d, d, d], chart.len(), |x, p| {
        let (rho, mu, nu) = (x[0], x[1], x[2]);
        let mut s = 0.0;
        for g in 0..d {
            let inv = fr.inverse.at(&[g, rho], p);
            if inv == 0.0 {
                continue;
            }
            let mut t = if mu < n && g >= n { dn[mu][g - n][nu][p] } else { 0.0 };
            for a in 0..d {
                let fa = fr.forward.at(&[mu, a], p);
                if fa == 0.0 {
                    continue;
                }
                for b in 0..d {
                    t += fa * fr.forward.at(&[nu, b], p) * gamma.at(&[g, a, b], p);
                }
            }
            s += t * inv;
        }
        s
    })
}
