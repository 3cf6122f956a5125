use std::f64::consts::PI;

use super::VolumeElement;
use crate::connection::{canonical, ricci_with, DConnectionCoeffs, DGeometry, RicciBlocks};
use crate::error::{Error, Result};
use crate::fraccalc::FractionalOrder;
use crate::geometry::{DMetric, NConnectionField};
use crate::tensor::Components;

/// Derivatives of the potential with respect to the canonical d-connection.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTerms {
    /// `e_beta f`.
    pub grad: Vec<Vec<f64>>,
    /// `g^jk e_j f e_k f`.
    pub grad2_h: Vec<f64>,
    /// `g^bc e_b f e_c f`.
    pub grad2_v: Vec<f64>,
    /// `D_i D_j f = e_i e_j f - L^k_ji e_k f`, shape `[n, n]`.
    pub hess_h: Components,
    /// `D_a D_b f = e_a e_b f - C^c_ba e_c f`, shape `[m, m]`.
    pub hess_v: Components,
    pub lap_h: Vec<f64>,
    pub lap_v: Vec<f64>,
}

impl PotentialTerms {
    pub fn new(geo: &DGeometry, gamma: &DConnectionCoeffs, f: &[f64]) -> Self {
        let (n, m, len) = (geo.h_dim(), geo.v_dim(), geo.chart().len());
        let grad = geo.e(f);
        let second: Vec<Vec<Vec<f64>>> = grad.iter().map(|g| geo.e(g)).collect();
        let hess_h = Components::from_fn(&[n, n], len, |x, p| {
            let (i, j) = (x[0], x[1]);
            second[j][i][p] - (0..n).map(|k| gamma.l_h.at(&[k, j, i], p) * grad[k][p]).sum::<f64>()
        });
        let hess_v = Components::from_fn(&[m, m], len, |x, p| {
            let (a, b) = (x[0], x[1]);
            second[n + b][n + a][p] - (0..m).map(|c| gamma.c_v.at(&[c, b, a], p) * grad[n + c][p]).sum::<f64>()
        });
        let quad = |inv: &Components, off: usize, k: usize, p: usize| {
            let mut s = 0.0;
            for i in 0..k {
                for j in 0..k {
                    s += inv.at(&[i, j], p) * grad[off + i][p] * grad[off + j][p];
                }
            }
            s
        };
        let grad2_h = (0..len).map(|p| quad(&geo.ginv_h, 0, n, p)).collect();
        let grad2_v = (0..len).map(|p| quad(&geo.ginv_v, n, m, p)).collect();
        let lap_h = crate::connection::trace_blocks(&geo.ginv_h, &hess_h);
        let lap_v = crate::connection::trace_blocks(&geo.ginv_v, &hess_v);
        Self { grad, grad2_h, grad2_v, hess_h, hess_v, lap_h, lap_v }
    }
}

/// Everything the functionals need for one `(g, N, f, tau)`.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub geo: DGeometry,
    pub gamma: DConnectionCoeffs,
    pub ricci: RicciBlocks,
    pub potential: PotentialTerms,
    pub volume: VolumeElement,
    pub f: Vec<f64>,
    pub tau: f64,
}

impl Evaluation {
    pub fn new(g: &DMetric, n_conn: &NConnectionField, f: &[f64], tau: f64, order: FractionalOrder) -> Result<Self> {
        g.chart.check_len(f.len())?;
        let geo = DGeometry::new(g, n_conn, order)?;
        Ok(Self::from_geometry(geo, f, tau))
    }

    pub fn from_geometry(geo: DGeometry, f: &[f64], tau: f64) -> Self {
        let gamma = canonical(&geo);
        let ricci = ricci_with(&gamma, &geo);
        let potential = PotentialTerms::new(&geo, &gamma, f);
        let density = geo.det_h.iter().zip(&geo.det_v).map(|(a, b)| (a.abs() * b.abs()).sqrt()).collect();
        let volume = VolumeElement::from_density(geo.chart(), density, geo.order).expect("metric already validated");
        Self { geo, gamma, ricci, potential, volume, f: f.to_vec(), tau }
    }

    pub fn dim(&self) -> f64 {
        self.geo.chart().dim() as f64
    }

    /// `(4 pi tau)^(-(n+m)/2) e^-f` at every node.
    pub fn mu(&self) -> Vec<f64> {
        mu_density(&self.f, self.tau, self.geo.chart().dim())
    }

    /// `R + S + |Df|^2` at every node.
    fn scalar_plus_grad(&self) -> Vec<f64> {
        let (r, s, p) = (&self.ricci.r, &self.ricci.s, &self.potential);
        (0..self.f.len()).map(|k| r[k] + s[k] + p.grad2_h[k] + p.grad2_v[k]).collect()
    }

    /// `|R_ij + D_iD_j f - c g_ij|^2 + |R_ab + D_aD_b f - c g_ab|^2` at every node.
    fn soliton_defect(&self, c: f64) -> Vec<f64> {
        let g = &self.geo.g;
        let h = block_norm2(&self.geo.ginv_h, |x, p| self.ricci.hh.at(x, p) + self.potential.hess_h.at(x, p) - c * g.h.at(x, p));
        let v = block_norm2(&self.geo.ginv_v, |x, p| self.ricci.vv.at(x, p) + self.potential.hess_v.at(x, p) - c * g.v.at(x, p));
        h.iter().zip(&v).map(|(a, b)| a + b).collect()
    }
}

/// `g^ik g^jl T_ij T_kl` at every node.
fn block_norm2(inv: &Components, t: impl Fn(&[usize], usize) -> f64) -> Vec<f64> {
    let d = inv.shape()[0];
    (0..inv.nodes())
        .map(|p| {
            let tt: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| t(&[i, j], p)).collect()).collect();
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            s += inv.at(&[i, k], p) * inv.at(&[j, l], p) * tt[i][j] * tt[k][l];
                        }
                    }
                }
            }
            s
        })
        .collect()
}

pub fn mu_density(f: &[f64], tau: f64, dim: usize) -> Vec<f64> {
    let c = (4.0 * PI * tau).powf(-(dim as f64) / 2.0);
    f.iter().map(|v| c * (-v).exp()).collect()
}

/// `int mu dV`.
pub fn mu_mass(f: &[f64], tau: f64, volume: &VolumeElement) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::NonPositiveTau(tau));
    }
    Ok(volume.integrate(&mu_density(f, tau, volume.chart.dim())))
}

/// Shifts `f` by `log(int mu dV)` so that the shifted potential has unit mass.
pub fn normalize_potential(f: &[f64], tau: f64, volume: &VolumeElement) -> Result<Vec<f64>> {
    let mass = mu_mass(f, tau, volume)?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::NonFiniteMass(mass));
    }
    let shift = mass.ln();
    Ok(f.iter().map(|v| v + shift).collect())
}

/// `F = int (R + S + |Df|^2) e^-f dV`.
pub fn functional_f(ev: &Evaluation) -> f64 {
    let integrand: Vec<f64> = ev.scalar_plus_grad().iter().zip(&ev.f).map(|(a, f)| a * (-f).exp()).collect();
    ev.volume.integrate(&integrand)
}

/// Which gradient term enters `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WForm {
    /// `tau (R + S + |h Df| + |v Df|)^2`.
    #[default]
    AsPrinted,
    /// `tau (R + S + |h Df|^2 + |v Df|^2)`.
    NormSquared,
}

/// `W = int [tau * (curvature and gradient term) + f - (n+m)/2] mu dV`.
pub fn functional_w(ev: &Evaluation, form: WForm) -> Result<f64> {
    if !(ev.tau > 0.0) {
        return Err(Error::NonPositiveTau(ev.tau));
    }
    let (r, s, p) = (&ev.ricci.r, &ev.ricci.s, &ev.potential);
    let half = ev.dim() / 2.0;
    let mu = ev.mu();
    let integrand: Vec<f64> = (0..ev.f.len())
        .map(|k| {
            let core = match form {
                WForm::AsPrinted => (r[k] + s[k] + p.grad2_h[k].sqrt() + p.grad2_v[k].sqrt()).powi(2),
                WForm::NormSquared => r[k] + s[k] + p.grad2_h[k] + p.grad2_v[k],
            };
            (ev.tau * core + ev.f[k] - half) * mu[k]
        })
        .collect();
    Ok(ev.volume.integrate(&integrand))
}

/// Variation directions: `delta g_ij = v_h`, `delta g_ab = v_v`, `delta f = f_h + f_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Variation {
    pub v_h: Components,
    pub v_v: Components,
    pub f_h: Vec<f64>,
    pub f_v: Vec<f64>,
}

/// First variation of `F`, per block
/// `-v^ij (R_ij + D_iD_j f) - v^ab (R_ab + D_aD_b f) + ((hv + vv)/2 - hf - vf)(2 Lap f - |Df|^2 + R + S)`
/// weighted by `e^-f dV`.
///
/// The trace and potential terms multiply the full bracket. Splitting it per block only agrees
/// when the cross terms integrate to zero (e.g. `f` independent of `y` and `v_ab = 0`).
pub fn first_variation_f(ev: &Evaluation, var: &Variation) -> Result<f64> {
    let len = ev.f.len();
    if var.v_h.shape() != ev.geo.g.h.shape()
        || var.v_v.shape() != ev.geo.g.v.shape()
        || var.v_h.nodes() != len
        || var.v_v.nodes() != len
        || var.f_h.len() != len
        || var.f_v.len() != len
    {
        return Err(Error::ShapeMismatch("variation does not match the state".into()));
    }
    let p = &ev.potential;
    let ric = &ev.ricci;
    let block = |v: &Components, rb: &Components, hess: &Components, inv: &Components, q: usize| {
        let d = v.shape()[0];
        let mut contract = 0.0;
        let mut trace = 0.0;
        for i in 0..d {
            for j in 0..d {
                let t = rb.at(&[i, j], q) + hess.at(&[i, j], q);
                for k in 0..d {
                    for l in 0..d {
                        contract += inv.at(&[i, k], q) * inv.at(&[j, l], q) * v.at(&[k, l], q) * t;
                    }
                }
                trace += inv.at(&[i, j], q) * v.at(&[i, j], q);
            }
        }
        (contract, trace)
    };
    let integrand: Vec<f64> = (0..len)
        .map(|q| {
            let (ch, th) = block(&var.v_h, &ric.hh, &p.hess_h, &ev.geo.ginv_h, q);
            let (cv, tv) = block(&var.v_v, &ric.vv, &p.hess_v, &ev.geo.ginv_v, q);
            let bracket = 2.0 * (p.lap_h[q] + p.lap_v[q]) - p.grad2_h[q] - p.grad2_v[q] + ric.r[q] + ric.s[q];
            let weight = (th + tv) / 2.0 - var.f_h[q] - var.f_v[q];
            (-ch - cv + weight * bracket) * (-ev.f[q]).exp()
        })
        .collect();
    Ok(ev.volume.integrate(&integrand))
}

/// `2 int [|R_ij + D_iD_j f|^2 + |R_ab + D_aD_b f|^2] e^-f dV`.
pub fn df_dchi_integral(ev: &Evaluation) -> f64 {
    let integrand: Vec<f64> = ev.soliton_defect(0.0).iter().zip(&ev.f).map(|(d, f)| 2.0 * d * (-f).exp()).collect();
    ev.volume.integrate(&integrand)
}

/// `2 int tau [|R_ij + D_iD_j f - g_ij/2tau|^2 + |R_ab + D_aD_b f - g_ab/2tau|^2] mu dV`.
pub fn dw_dchi_integral(ev: &Evaluation) -> Result<f64> {
    if !(ev.tau > 0.0) {
        return Err(Error::NonPositiveTau(ev.tau));
    }
    let mu = ev.mu();
    let integrand: Vec<f64> = ev.soliton_defect(0.5 / ev.tau).iter().zip(&mu).map(|(d, m)| 2.0 * ev.tau * d * m).collect();
    Ok(ev.volume.integrate(&integrand))
}

/// Average energy, entropy, fluctuation and log of the partition function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoRecord {
    pub energy: f64,
    pub entropy: f64,
    pub sigma: f64,
    pub log_z: f64,
}

/// - `E = -tau^2 int (R + S + |Df|^2 - (n+m)/(2 tau)) mu dV`
/// - `S = -int [tau (R + S + |Df|^2) + f - (n+m)] mu dV`
/// - `sigma = 2 tau^4 int [|R_ij + D_iD_j f - g_ij/2tau|^2 + |R_ab + D_aD_b f - g_ab/2tau|^2] mu dV`
/// - `log Z = int (-f + (n+m)/2) mu dV`
pub fn thermodynamics(ev: &Evaluation) -> Result<ThermoRecord> {
    let tau = ev.tau;
    if !(tau > 0.0) {
        return Err(Error::NonPositiveTau(tau));
    }
    let d = ev.dim();
    let mu = ev.mu();
    let base = ev.scalar_plus_grad();
    let len = ev.f.len();
    let e: Vec<f64> = (0..len).map(|k| (base[k] - d / (2.0 * tau)) * mu[k]).collect();
    let s: Vec<f64> = (0..len).map(|k| (tau * base[k] + ev.f[k] - d) * mu[k]).collect();
    let z: Vec<f64> = (0..len).map(|k| (-ev.f[k] + d / 2.0) * mu[k]).collect();
    let sig: Vec<f64> = ev.soliton_defect(0.5 / tau).iter().zip(&mu).map(|(x, m)| x * m).collect();
    Ok(ThermoRecord {
        energy: -tau * tau * ev.volume.integrate(&e),
        entropy: -ev.volume.integrate(&s),
        sigma: 2.0 * tau.powi(4) * ev.volume.integrate(&sig),
        log_z: ev.volume.integrate(&z),
    })
}
