use super::Normalization;
use crate::connection::{distortion_with, full_ricci, trace_blocks, RicciBlocks};
use crate::error::{Error, Result};
use crate::geometry::vielbein;
use crate::perelman::{Evaluation, VolumeElement};
use crate::tensor::Components;

/// Right sides of the metric equations in coordinate components.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonRhs {
    /// Rate of `g_ij`, shape `[n, n]`.
    pub h: Components,
    /// Rate of `g_ab`, shape `[m, m]`.
    pub v: Components,
    /// Rate of `N_j^e g_ae`, shape `[n, m]`.
    pub p: Components,
    pub lambda: f64,
    /// Scalar curvature entering `lambda`.
    pub scalar: Vec<f64>,
    /// `max |R_ia|, |R_ai|` of the canonical d-connection.
    pub constraint: f64,
}

/// `r = int R dV / int dV`, then `lambda = r/5`, `r/(n+m)` or 0.
pub fn normalization_lambda(scalar: &[f64], volume: &VolumeElement, mode: Normalization) -> Result<f64> {
    let divisor = match mode {
        Normalization::None => return Ok(0.0),
        Normalization::ROverFive => 5.0,
        Normalization::Dimension => volume.chart.dim() as f64,
    };
    let total = volume.total();
    if !(total > 0.0) {
        return Err(Error::ZeroVolume);
    }
    Ok(volume.integrate(scalar) / total / divisor)
}

/// Levi-Civita flow: coordinate Ricci `F R F^T` from `Gamma-hat + Z`, then
///
/// - `dg_ij = 2 [N_i^a N_j^b (R_ab - lambda g_ab) - R_ij + lambda g_ij] - n_term_ij`
/// - `dg_ab = -2 R_ab + 2 lambda g_ab`
/// - `d(N_j^e g_ae) = -2 R_ja + 2 lambda N_j^e g_ae`
///
/// `n_term` is `g_cd D_chi(N_i^c N_j^d)`; `None` means `N` is frozen.
pub fn hamilton_rhs_lc(ev: &Evaluation, mode: Normalization, n_term: Option<&Components>) -> Result<HamiltonRhs> {
    let geo = &ev.geo;
    let (n, len) = (geo.h_dim(), geo.chart().len());
    let lc = distortion_with(&ev.gamma, geo).levi_civita;
    let frame_ricci = symmetrized(&full_ricci(&lc, geo));
    let hh = Components::from_fn(&[n, n], len, |x, p| frame_ricci.at(x, p));
    let vv = Components::from_fn(&[geo.v_dim(), geo.v_dim()], len, |x, p| frame_ricci.at(&[n + x[0], n + x[1]], p));
    let scalar: Vec<f64> =
        trace_blocks(&geo.ginv_h, &hh).iter().zip(trace_blocks(&geo.ginv_v, &vv)).map(|(a, b)| a + b).collect();
    let coord = vielbein(&geo.n_conn).covariant_to_coordinate(&frame_ricci);
    assemble(ev, coord, scalar, mode, n_term)
}

/// Canonical flow: same shape with the canonical Ricci blocks pushed to coordinates
/// (mixed blocks dropped and reported as the constraint residual).
pub fn hamilton_rhs_canonical(ev: &Evaluation, mode: Normalization, n_term: Option<&Components>) -> Result<HamiltonRhs> {
    let geo = &ev.geo;
    let (n, d, len) = (geo.h_dim(), geo.chart().dim(), geo.chart().len());
    let ric = &ev.ricci;
    let diag = Components::from_fn(&[d, d], len, |x, p| match (x[0] < n, x[1] < n) {
        (true, true) => ric.hh.at(x, p),
        (false, false) => ric.vv.at(&[x[0] - n, x[1] - n], p),
        _ => 0.0,
    });
    let coord = symmetrized(&vielbein(&geo.n_conn).covariant_to_coordinate(&diag));
    let scalar = ric.total_scalar();
    assemble(ev, coord, scalar, mode, n_term)
}

fn assemble(
    ev: &Evaluation,
    coord: Components,
    scalar: Vec<f64>,
    mode: Normalization,
    n_term: Option<&Components>,
) -> Result<HamiltonRhs> {
    let geo = &ev.geo;
    let (n, m, len) = (geo.h_dim(), geo.v_dim(), geo.chart().len());
    let lambda = normalization_lambda(&scalar, &ev.volume, mode)?;
    let (g, nc) = (&geo.g, &geo.n_conn);
    let h = Components::from_fn(&[n, n], len, |x, p| {
        let (i, j) = (x[0], x[1]);
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                s += nc.get(i, a)[p] * nc.get(j, b)[p] * (coord.at(&[n + a, n + b], p) - lambda * g.v.at(&[a, b], p));
            }
        }
        let extra = n_term.map_or(0.0, |t| t.at(x, p));
        2.0 * (s - coord.at(x, p) + lambda * g.h.at(x, p)) - extra
    });
    let v = Components::from_fn(&[m, m], len, |x, p| {
        -2.0 * coord.at(&[n + x[0], n + x[1]], p) + 2.0 * lambda * g.v.at(x, p)
    });
    let p = Components::from_fn(&[n, m], len, |x, q| {
        let (j, a) = (x[0], x[1]);
        let ng: f64 = (0..m).map(|e| nc.get(j, e)[q] * g.v.at(&[a, e], q)).sum();
        -2.0 * coord.at(&[j, n + a], q) + 2.0 * lambda * ng
    });
    Ok(HamiltonRhs { h, v, p, lambda, scalar, constraint: mixed_ricci(&ev.ricci) })
}

fn mixed_ricci(ric: &RicciBlocks) -> f64 {
    ric.hv.max_abs().max(ric.vh.max_abs())
}

fn symmetrized(t: &Components) -> Components {
    Components::from_fn(t.shape(), t.nodes(), |x, p| 0.5 * (t.at(&[x[0], x[1]], p) + t.at(&[x[1], x[0]], p)))
}

/// `-Lap f + |Df|^2 - R - S`, plus `(n+m)/(2 tau)` when `with_tau` is set.
pub fn coupled_potential_rhs(ev: &Evaluation, with_tau: bool) -> Result<Vec<f64>> {
    let shift = if with_tau {
        if !(ev.tau > 0.0) {
            return Err(Error::NonPositiveTau(ev.tau));
        }
        ev.dim() / (2.0 * ev.tau)
    } else {
        0.0
    };
    let (p, r) = (&ev.potential, &ev.ricci);
    Ok((0..ev.f.len())
        .map(|k| -(p.lap_h[k] + p.lap_v[k]) + p.grad2_h[k] + p.grad2_v[k] - r.r[k] - r.s[k] + shift)
        .collect())
}
