use super::ivp::{caputo_l1_latest, FractionalIvp, Rhs};
use super::rhs::{coupled_potential_rhs, hamilton_rhs_canonical, hamilton_rhs_lc, HamiltonRhs};
use super::{ConnectionMode, Coupling, FlowConfig, FlowState};
use crate::connection::DGeometry;
use crate::error::{Error, Result};
use crate::fraccalc::gamma;
use crate::geometry::{DMetric, GridChart, NConnectionField};
use crate::perelman::{
    df_dchi_integral, dw_dchi_integral, functional_f, functional_w, mu_mass, normalize_potential, thermodynamics,
    Evaluation, VolumeElement,
};
use crate::tensor::{invert_symmetric, symmetric_eigenvalues, Components};

/// Diagnostics of one accepted state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub chi: f64,
    pub f_functional: f64,
    pub w_functional: f64,
    pub mean_r: f64,
    pub mean_s: f64,
    pub lambda: f64,
    pub constraint_residual: f64,
    pub mu_mass: f64,
    pub g_min_eig: f64,
    pub g_max_eig: f64,
    pub energy: f64,
    pub entropy: f64,
    pub sigma: f64,
    /// `2 int |Ric + Hess f|^2 e^-f dV`.
    pub df_dchi: f64,
    pub dw_dchi: f64,
    /// Largest `|u_ij - u_ji|` of the stepped metric before symmetrization.
    pub asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub chi: f64,
    pub state: FlowState,
    /// Packed right side at this state.
    pub rate: Vec<f64>,
}

/// Accepted states with uniform spacing in `chi`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowHistory {
    pub step: f64,
    pub entries: Vec<HistoryEntry>,
}

impl FlowHistory {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first(&self) -> &FlowState {
        &self.entries[0].state
    }

    pub fn last(&self) -> &FlowState {
        &self.entries[self.entries.len() - 1].state
    }

    /// Recorded state at `chi`, which must hit a step to within `1e-9` of the spacing.
    pub fn at(&self, chi: f64) -> Result<&FlowState> {
        let chi0 = self.entries.first().ok_or(Error::OutOfHistory(chi))?.chi;
        let k = ((chi - chi0) / self.step).round();
        if !(k >= 0.0) || (chi - chi0 - k * self.step).abs() > 1e-9 * self.step {
            return Err(Error::OutOfHistory(chi));
        }
        self.entries.get(k as usize).map(|e| &e.state).ok_or(Error::OutOfHistory(chi))
    }
}

/// Outcome of [`evolve`]. `stopped` holds the flow singularity that ended the run early.
#[derive(Debug, Clone)]
pub struct FlowRun {
    pub history: FlowHistory,
    pub initial: StepRecord,
    pub records: Vec<StepRecord>,
    pub stopped: Option<Error>,
}

/// Runs `config.steps` steps from `initial`.
///
/// In `W` coupling the initial potential is shifted to unit `mu` mass first. Invalid input
/// is an error; a singularity during the run is reported in [`FlowRun::stopped`] with the
/// history up to the last good state.
pub fn evolve(config: &FlowConfig, initial: &FlowState) -> Result<FlowRun> {
    config.validate()?;
    let order = config.order;
    let mut start = FlowState::new(initial.g.clone(), initial.n_conn.clone(), initial.f.clone(), initial.tau)?;
    start.chi = initial.chi;
    if config.coupling == Coupling::W {
        let a = order.alpha();
        let tau_end = start.tau - config.span().powf(a) / gamma(a + 1.0);
        if !(tau_end > 0.0) {
            return Err(Error::InvalidConfig(format!("tau reaches {tau_end:.3e} within the flow span")));
        }
        let volume = VolumeElement::new(&start.g, order)?;
        start.f = normalize_potential(&start.f, start.tau, &volume)?;
    }
    let layout = Layout::new(&start.g, config.evolve_n);
    let mut rhs = FlowRhs::new(config, layout.clone(), &start);
    let mut ivp = match FractionalIvp::new(order, config.step, start.chi, layout.pack(&start), &mut rhs) {
        Ok(ivp) => ivp,
        Err(Error::FlowSingularity { reason, .. }) => return Err(Error::InvalidConfig(reason)),
        Err(e) => return Err(e),
    };
    let initial_record = rhs.record(0, start.chi)?;
    let mut records = Vec::with_capacity(config.steps);
    let mut stopped = None;
    for k in 1..=config.steps {
        match ivp.step(&mut rhs) {
            Ok(_) => records.push(rhs.record(k, ivp.chi())?),
            Err(e) => {
                stopped = Some(e);
                break;
            }
        }
    }
    let entries = ivp
        .states()
        .iter()
        .zip(ivp.rates())
        .enumerate()
        .map(|(k, (u, f))| {
            let chi = ivp.chi_at(k);
            let (state, _) = layout.unpack(u, &rhs.frozen_n, chi)?;
            Ok(HistoryEntry { chi, state, rate: f.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowRun { history: FlowHistory { step: config.step, entries }, initial: initial_record, records, stopped })
}

/// Packing of `(g_ij, g_ab, f, tau[, N_j^e g_ae])` into one vector.
#[derive(Debug, Clone)]
struct Layout {
    chart: GridChart,
    n: usize,
    m: usize,
    len: usize,
    with_p: bool,
    /// Negative eigenvalue count of each block at the start; the flow must keep it.
    signature: (usize, usize),
}

impl Layout {
    fn new(g: &DMetric, with_p: bool) -> Self {
        let chart = &g.chart;
        let signature = (negative_count(&g.h, 0), negative_count(&g.v, 0));
        Self { chart: chart.clone(), n: chart.h_dim(), m: chart.v_dim(), len: chart.len(), with_p, signature }
    }

    fn v_off(&self) -> usize {
        self.n * self.n * self.len
    }

    fn f_off(&self) -> usize {
        self.v_off() + self.m * self.m * self.len
    }

    fn tau_off(&self) -> usize {
        self.f_off() + self.len
    }

    fn p_off(&self) -> usize {
        self.tau_off() + 1
    }

    fn size(&self) -> usize {
        self.p_off() + if self.with_p { self.n * self.m * self.len } else { 0 }
    }

    fn write(&self, out: &mut [f64], h: &Components, v: &Components, f: &[f64], tau: f64, p: Option<&Components>) {
        let len = self.len;
        for (k, field) in h.fields().iter().enumerate() {
            out[k * len..(k + 1) * len].copy_from_slice(field);
        }
        for (k, field) in v.fields().iter().enumerate() {
            let o = self.v_off() + k * len;
            out[o..o + len].copy_from_slice(field);
        }
        out[self.f_off()..self.f_off() + len].copy_from_slice(f);
        out[self.tau_off()] = tau;
        if let (true, Some(p)) = (self.with_p, p) {
            for (k, field) in p.fields().iter().enumerate() {
                let o = self.p_off() + k * len;
                out[o..o + len].copy_from_slice(field);
            }
        }
    }

    fn pack(&self, s: &FlowState) -> Vec<f64> {
        let mut out = vec![0.0; self.size()];
        let p = self.with_p.then(|| lower_n(&s.g, &s.n_conn));
        self.write(&mut out, &s.g.h, &s.g.v, &s.f, s.tau, p.as_ref());
        out
    }

    /// State from a packed vector; the blocks are symmetrized and the asymmetry returned.
    fn unpack(&self, u: &[f64], frozen_n: &NConnectionField, chi: f64) -> Result<(FlowState, f64)> {
        let (n, m, len) = (self.n, self.m, self.len);
        let singular = |reason: String| Error::FlowSingularity { chi, reason };
        let mut asym: f64 = 0.0;
        let mut block = |off: usize, d: usize| {
            let at = |i: usize, j: usize, p: usize| u[off + (i * d + j) * len + p];
            for i in 0..d {
                for j in 0..i {
                    for p in 0..len {
                        asym = asym.max((at(i, j, p) - at(j, i, p)).abs());
                    }
                }
            }
            Components::from_fn(&[d, d], len, |x, p| 0.5 * (at(x[0], x[1], p) + at(x[1], x[0], p)))
        };
        let h = block(0, n);
        let v = block(self.v_off(), m);
        let g = DMetric::new(self.chart.clone(), h, v).map_err(|e| singular(e.to_string()))?;
        for p in 0..len {
            if (negative_count(&g.h, p), negative_count(&g.v, p)) != self.signature {
                return Err(singular(format!("metric signature changed at node {p}")));
            }
        }
        let f = u[self.f_off()..self.f_off() + len].to_vec();
        if let Some(p) = f.iter().position(|x| !x.is_finite()) {
            return Err(singular(format!("potential is not finite at node {p}")));
        }
        let tau = u[self.tau_off()];
        if !(tau > 0.0) {
            return Err(singular(format!("tau = {tau}")));
        }
        let n_conn = if self.with_p {
            let inv = invert_symmetric(&g.v).map_err(|e| singular(e.to_string()))?.inverse;
            let off = self.p_off();
            let coefficients = Components::from_fn(&[n, m], len, |x, q| {
                (0..m).map(|a| u[off + (x[0] * m + a) * len + q] * inv.at(&[a, x[1]], q)).sum()
            });
            NConnectionField::new(self.chart.clone(), coefficients).map_err(|e| singular(e.to_string()))?
        } else {
            frozen_n.clone()
        };
        Ok((FlowState { g, n_conn, f, tau, chi }, asym))
    }
}

/// `N_j^e g_ae`, shape `[n, m]`.
fn lower_n(g: &DMetric, n_conn: &NConnectionField) -> Components {
    let m = g.chart.v_dim();
    Components::from_fn(&[g.chart.h_dim(), m], g.chart.len(), |x, q| {
        (0..m).map(|e| n_conn.get(x[0], e)[q] * g.v.at(&[x[1], e], q)).sum()
    })
}

/// `g_cd d_chi(N_i^c N_j^d)` at `alpha = 1`, with `d_chi N_i^c = (d_chi P_ia - N_i^e d_chi g_ae) g^ac`
/// taken from the rates of the same state.
fn chain_rule_n_term(state: &FlowState, ev: &Evaluation, rhs: &HamiltonRhs) -> Components {
    let (n, m, len) = (state.g.chart.h_dim(), state.g.chart.v_dim(), state.g.chart.len());
    let nc = &state.n_conn;
    let inv = &ev.geo.ginv_v;
    let dn = Components::from_fn(&[n, m], len, |x, q| {
        let (i, c) = (x[0], x[1]);
        (0..m)
            .map(|a| {
                let lowered: f64 = (0..m).map(|e| nc.get(i, e)[q] * rhs.v.at(&[a, e], q)).sum();
                (rhs.p.at(&[i, a], q) - lowered) * inv.at(&[a, c], q)
            })
            .sum()
    });
    Components::from_fn(&[n, n], len, |x, q| {
        let (i, j) = (x[0], x[1]);
        let mut s = 0.0;
        for c in 0..m {
            for d in 0..m {
                let rate = dn.at(&[i, c], q) * nc.get(j, d)[q] + nc.get(i, c)[q] * dn.at(&[j, d], q);
                s += state.g.v.at(&[c, d], q) * rate;
            }
        }
        s
    })
}

/// `N_i^c N_j^d`, shape `[n, n, m, m]`.
fn n_products(n_conn: &NConnectionField) -> Components {
    let chart = &n_conn.chart;
    let (n, m) = (chart.h_dim(), chart.v_dim());
    Components::from_fn(&[n, n, m, m], chart.len(), |x, p| n_conn.get(x[0], x[2])[p] * n_conn.get(x[1], x[3])[p])
}

struct Snapshot {
    ev: Evaluation,
    rhs: HamiltonRhs,
    asym: f64,
}

struct FlowRhs<'a> {
    config: &'a FlowConfig,
    layout: Layout,
    frozen_n: NConnectionField,
    products: Vec<Components>,
    last: Option<Snapshot>,
}

impl<'a> FlowRhs<'a> {
    fn new(config: &'a FlowConfig, layout: Layout, start: &FlowState) -> Self {
        Self { config, layout, frozen_n: start.n_conn.clone(), products: Vec::new(), last: None }
    }

    /// `g_cd D_chi(N_i^c N_j^d)` by the L1 rule over the product history (`alpha < 1`).
    fn n_term(&mut self, past: &[Vec<f64>], state: &FlowState) -> Result<Components> {
        while self.products.len() < past.len() {
            let k = self.products.len();
            let (s, _) = self.layout.unpack(&past[k], &self.frozen_n, 0.0)?;
            self.products.push(n_products(&s.n_conn));
        }
        let current = n_products(&state.n_conn);
        let (n, m, len) = (self.layout.n, self.layout.m, self.layout.len);
        let (step, order) = (self.config.step, self.config.order);
        let mut rate = Components::zeros(&[n, n, m, m], len);
        for idx in current.indices() {
            let out = rate.get_mut(&idx);
            for (p, slot) in out.iter_mut().enumerate() {
                let values: Vec<f64> =
                    self.products[..past.len()].iter().map(|c| c.at(&idx, p)).chain([current.at(&idx, p)]).collect();
                *slot = caputo_l1_latest(&values, step, order);
            }
        }
        let g = &state.g;
        Ok(Components::from_fn(&[n, n], len, |x, p| {
            let mut s = 0.0;
            for c in 0..m {
                for d in 0..m {
                    s += g.v.at(&[c, d], p) * rate.at(&[x[0], x[1], c, d], p);
                }
            }
            s
        }))
    }

    fn record(&self, step: usize, chi: f64) -> Result<StepRecord> {
        let snap = self.last.as_ref().expect("right side evaluated before recording");
        let ev = &snap.ev;
        let total = ev.volume.total();
        let thermo = thermodynamics(ev)?;
        let (lo, hi) = eigen_range(&ev.geo.g);
        Ok(StepRecord {
            step,
            chi,
            f_functional: functional_f(ev),
            w_functional: functional_w(ev, self.config.w_form)?,
            mean_r: ev.volume.integrate(&ev.ricci.r) / total,
            mean_s: ev.volume.integrate(&ev.ricci.s) / total,
            lambda: snap.rhs.lambda,
            constraint_residual: snap.rhs.constraint,
            mu_mass: mu_mass(&ev.f, ev.tau, &ev.volume)?,
            g_min_eig: lo,
            g_max_eig: hi,
            energy: thermo.energy,
            entropy: thermo.entropy,
            sigma: thermo.sigma,
            df_dchi: df_dchi_integral(ev),
            dw_dchi: dw_dchi_integral(ev)?,
            asymmetry: snap.asym,
        })
    }
}

impl Rhs for FlowRhs<'_> {
    fn eval(&mut self, past: &[Vec<f64>], chi: f64, u: &[f64]) -> Result<Vec<f64>> {
        let singular = |e: Error| match e {
            Error::FlowSingularity { .. } => e,
            other => Error::FlowSingularity { chi, reason: other.to_string() },
        };
        let (state, asym) = self.layout.unpack(u, &self.frozen_n, chi)?;
        let geo = DGeometry::new(&state.g, &state.n_conn, self.config.order).map_err(singular)?;
        let ev = Evaluation::from_geometry(geo, &state.f, state.tau);
        let mut rhs = match self.config.mode {
            ConnectionMode::LeviCivita => hamilton_rhs_lc(&ev, self.config.normalization, None),
            ConnectionMode::Canonical => hamilton_rhs_canonical(&ev, self.config.normalization, None),
        }
        .map_err(singular)?;
        if self.config.evolve_n {
            let term = if self.config.order.is_integer() {
                chain_rule_n_term(&state, &ev, &rhs)
            } else {
                self.n_term(past, &state)?
            };
            rhs.h = rhs.h.sub(&term);
        }
        let (f_rate, tau_rate) = match self.config.coupling {
            Coupling::Off => (vec![0.0; self.layout.len], 0.0),
            Coupling::F => (coupled_potential_rhs(&ev, false).map_err(singular)?, 0.0),
            Coupling::W => (coupled_potential_rhs(&ev, true).map_err(singular)?, -1.0),
        };
        let mut out = vec![0.0; self.layout.size()];
        self.layout.write(&mut out, &rhs.h, &rhs.v, &f_rate, tau_rate, Some(&rhs.p));
        if let Some(k) = out.iter().position(|x| !x.is_finite()) {
            return Err(Error::FlowSingularity { chi, reason: format!("right side is not finite at entry {k}") });
        }
        self.last = Some(Snapshot { ev, rhs, asym });
        Ok(out)
    }
}

fn negative_count(block: &Components, p: usize) -> usize {
    symmetric_eigenvalues(&block_rows(block, p)).iter().filter(|e| **e < 0.0).count()
}

fn block_rows(block: &Components, p: usize) -> Vec<Vec<f64>> {
    let d = block.shape()[0];
    (0..d).map(|i| (0..d).map(|j| block.at(&[i, j], p)).collect()).collect()
}

/// Smallest and largest eigenvalue over both blocks and all nodes.
fn eigen_range(g: &DMetric) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for block in [&g.h, &g.v] {
        for p in 0..block.nodes() {
            for e in symmetric_eigenvalues(&block_rows(block, p)) {
                lo = lo.min(e);
                hi = hi.max(e);
            }
        }
    }
    (lo, hi)
}
