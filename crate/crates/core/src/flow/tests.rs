use super::*;
use crate::connection::DGeometry;
use crate::fraccalc::{gamma, FractionalOrder};
use crate::geometry::{DMetric, GridChart, NConnectionField};
use crate::perelman::{Evaluation, VolumeElement};
use crate::scenarios::{perturbed_torus_metric, sphere_chart, sphere_metric, unit_box, unit_torus};
use crate::tensor::Components;
use proptest::prelude::*;

use fracflow_oracle as oracle;

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn scalar_ivp(a: f64, step: f64, steps: usize, f: impl Fn(f64, f64) -> f64) -> (FractionalIvp, Vec<f64>) {
    let mut rhs = |_: &[Vec<f64>], chi: f64, u: &[f64]| Ok(vec![f(chi, u[0])]);
    let mut ivp = FractionalIvp::new(order(a), step, 0.0, vec![0.0], &mut rhs).unwrap();
    let mut path = vec![0.0];
    for _ in 0..steps {
        path.push(ivp.step(&mut rhs).unwrap()[0]);
    }
    (ivp, path)
}

fn eval_of(g: &DMetric, f: Vec<f64>, a: f64) -> Evaluation {
    Evaluation::new(g, &NConnectionField::zero(&g.chart), &f, 1.0, order(a)).unwrap()
}

fn state(g: DMetric) -> FlowState {
    let len = g.chart.len();
    let n = NConnectionField::zero(&g.chart);
    FlowState::new(g, n, vec![0.0; len], 1.0).unwrap()
}

#[test]
fn zero_rhs_keeps_state() {
    for a in [0.3, 0.7, 1.0] {
        let mut rhs = |_: &[Vec<f64>], _: f64, u: &[f64]| Ok(vec![0.0; u.len()]);
        let mut ivp = FractionalIvp::new(order(a), 0.1, 0.0, vec![1.5, -2.0], &mut rhs).unwrap();
        for _ in 0..20 {
            ivp.step(&mut rhs).unwrap();
        }
        assert_eq!(ivp.current(), &[1.5, -2.0]);
    }
}

#[test]
fn power_solution_of_constant_rhs() {
    let a = 0.5;
    let (ivp, path) = scalar_ivp(a, 0.01, 100, |_, _| oracle::gamma_ref(a + 1.0));
    let err = path.iter().enumerate().map(|(k, u)| (u - ivp.chi_at(k).powf(a)).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-3, "error {err}");
}

#[test]
fn heun_at_integer_order() {
    let (ivp, path) = scalar_ivp(1.0, 0.01, 50, |_, u| -2.0 * (u - 1.0));
    let mut u: f64 = 0.0;
    for k in 1..=50 {
        let f0 = -2.0 * (u - 1.0);
        let f1 = -2.0 * (u + 0.01 * f0 - 1.0);
        u += 0.005 * (f0 + f1);
        assert!((path[k] - u).abs() < 1e-15);
    }
    let exact = 1.0 - (-2.0 * ivp.chi()).exp();
    assert!((u - exact).abs() < 1e-4);
}

#[test]
fn fractional_stepper_converges() {
    // D^a u = Gamma(3)/Gamma(3-a) chi^(2-a), u = chi^2
    let a = 0.6;
    let err = |steps: usize| {
        let (_, path) = scalar_ivp(a, 1.0 / steps as f64, steps, |chi, _| 2.0 / gamma(3.0 - a) * chi.powf(2.0 - a));
        (path[steps] - 1.0).abs()
    };
    let (e1, e2) = (err(20), err(40));
    assert!(e1 / e2 >= 2.0, "ratio {}", e1 / e2);
}

#[test]
fn l1_derivative_of_linear_history() {
    let a = 0.4;
    let h = 0.05;
    let values: Vec<f64> = (0..30).map(|k| 3.0 * k as f64 * h).collect();
    let t = 29.0 * h;
    let expect = 3.0 * t.powf(1.0 - a) / oracle::gamma_ref(2.0 - a);
    assert!((caputo_l1_latest(&values, h, order(a)) - expect).abs() < 1e-12);
    assert_eq!(caputo_l1_latest(&values[..1], h, order(a)), 0.0);
}

#[test]
fn flat_rhs_vanishes() {
    let chart = unit_torus(2, 1, 8).unwrap();
    let ev = eval_of(&DMetric::flat(&chart), vec![0.0; chart.len()], 0.7);
    for rhs in [
        hamilton_rhs_lc(&ev, Normalization::None, None).unwrap(),
        hamilton_rhs_canonical(&ev, Normalization::Dimension, None).unwrap(),
    ] {
        assert_eq!(rhs.h.max_abs() + rhs.v.max_abs() + rhs.p.max_abs(), 0.0);
        assert_eq!(rhs.lambda, 0.0);
        assert_eq!(rhs.constraint, 0.0);
    }
}

#[test]
fn sphere_rhs_is_minus_two_ricci() {
    let chart = sphere_chart(48, 3).unwrap();
    let g = sphere_metric(&chart, 1.0).unwrap();
    let ev = eval_of(&g, vec![0.0; chart.len()], 1.0);
    let lc = hamilton_rhs_lc(&ev, Normalization::None, None).unwrap();
    let can = hamilton_rhs_canonical(&ev, Normalization::None, None).unwrap();
    let mut err: f64 = 0.0;
    for &p in &chart.interior(2) {
        for x in g.h.indices() {
            let expect = -2.0 * g.h.at(&x, p);
            err = err.max((lc.h.at(&x, p) - expect).abs()).max((can.h.at(&x, p) - expect).abs());
        }
    }
    assert!(err < 5e-3, "error {err}");
    assert!(can.constraint < 1e-12);
}

#[test]
fn dimension_normalization_shrinks_rhs() {
    let chart = sphere_chart(32, 3).unwrap();
    let g = sphere_metric(&chart, 1.0).unwrap();
    let ev = eval_of(&g, vec![0.0; chart.len()], 1.0);
    let norm = |r: &HamiltonRhs| {
        let inner = chart.interior(2);
        let sq = |c: &Components| c.fields().iter().map(|f| inner.iter().map(|&p| f[p] * f[p]).sum::<f64>()).sum::<f64>();
        sq(&r.h) + sq(&r.v)
    };
    let plain = hamilton_rhs_canonical(&ev, Normalization::None, None).unwrap();
    let scaled = hamilton_rhs_canonical(&ev, Normalization::Dimension, None).unwrap();
    assert!((scaled.lambda - 2.0 / 3.0).abs() < 5e-3, "lambda {}", scaled.lambda);
    assert!(norm(&scaled) < norm(&plain));
    let fixed = hamilton_rhs_canonical(&ev, Normalization::ROverFive, None).unwrap();
    assert!((fixed.lambda - 0.4).abs() < 3e-3);
}

#[test]
fn lambda_of_constant_scalar() {
    let chart = unit_box(2, 1, 9).unwrap();
    let g = perturbed_torus_metric(&chart, 0.2).unwrap();
    let vol = VolumeElement::new(&g, order(0.6)).unwrap();
    let c = 1.7;
    let l = normalization_lambda(&vec![c; chart.len()], &vol, Normalization::Dimension).unwrap();
    assert!((l - c / 3.0).abs() < 1e-14);
    assert_eq!(normalization_lambda(&vec![c; chart.len()], &vol, Normalization::None).unwrap(), 0.0);
}

#[test]
fn canonical_without_n_is_minus_two_ricci() {
    let chart = unit_box(2, 1, 10).unwrap();
    let g = DMetric::from_fn(&chart, |i, j, u| if i == j { 1.0 + 0.2 * u[0] * u[1] } else { 0.1 * u[2] }, |_, _, u| 1.0 + u[0]).unwrap();
    let ev = eval_of(&g, vec![0.0; chart.len()], 1.0);
    let rhs = hamilton_rhs_canonical(&ev, Normalization::None, None).unwrap();
    for x in g.h.indices() {
        for p in 0..chart.len() {
            let sym = ev.ricci.hh.at(&x, p) + ev.ricci.hh.at(&[x[1], x[0]], p);
            assert!((rhs.h.at(&x, p) + sym).abs() < 1e-12);
        }
    }
    let mixed = ev.ricci.hv.max_abs().max(ev.ricci.vh.max_abs());
    assert_eq!(rhs.constraint, mixed);
    assert!(mixed > 1e-6);
}

#[test]
fn potential_rhs_of_quadratic() {
    let chart = unit_box(1, 1, 21).unwrap();
    let f = chart.sample(|u| u[0] * u[0]);
    let ev = eval_of(&DMetric::flat(&chart), f, 1.0);
    let rhs = coupled_potential_rhs(&ev, false).unwrap();
    for p in 0..chart.len() {
        let x = chart.coords(p)[0];
        assert!((rhs[p] - (-2.0 + 4.0 * x * x)).abs() < 1e-10, "{} vs {}", rhs[p], -2.0 + 4.0 * x * x);
    }
    let flat = eval_of(&DMetric::flat(&chart), vec![0.3; chart.len()], 0.5);
    assert!(coupled_potential_rhs(&flat, false).unwrap().iter().all(|v| *v == 0.0));
    assert!(coupled_potential_rhs(&flat, true).unwrap().iter().all(|v| *v == 1.0));
}

#[test]
fn sphere_potential_rhs_carries_curvature() {
    let chart = sphere_chart(48, 3).unwrap();
    let ev = eval_of(&sphere_metric(&chart, 1.0).unwrap(), vec![0.0; chart.len()], 1.0);
    let rhs = coupled_potential_rhs(&ev, false).unwrap();
    let err = chart.interior(2).iter().map(|&p| (rhs[p] + 2.0).abs()).fold(0.0, f64::max);
    assert!(err < 3e-3, "error {err}");
}

#[test]
fn flat_torus_is_a_fixed_point() {
    let chart = unit_torus(2, 1, 8).unwrap();
    for a in [0.7, 1.0] {
        let mut cfg = FlowConfig::new(order(a), 1e-3, 30);
        cfg.coupling = Coupling::F;
        let run = evolve(&cfg, &state(DMetric::flat(&chart))).unwrap();
        assert!(run.stopped.is_none());
        assert_eq!(run.records.len(), 30);
        assert_eq!(run.history.len(), 31);
        assert_eq!(run.history.last().g, DMetric::flat(&chart));
        assert!(run.records.iter().all(|r| r.f_functional.abs() < 1e-12 && r.asymmetry == 0.0));
    }
}

#[test]
fn sphere_shrinks_linearly() {
    let chart = sphere_chart(32, 3).unwrap();
    let cfg = FlowConfig::new(FractionalOrder::integer(), 1e-4, 50);
    let run = evolve(&cfg, &state(sphere_metric(&chart, 1.0).unwrap())).unwrap();
    let g = &run.history.last().g;
    let expect = 1.0 - 2.0 * 5e-3;
    for &p in &chart.interior(3) {
        assert!((g.h.at(&[0, 0], p) / expect - 1.0).abs() < 1e-2);
    }
    let b = breather_classify(&run.history, 0.0, 5e-3).unwrap();
    assert_eq!(b.h.kind, BreatherKind::Shrinking);
    assert!((b.h.beta - expect).abs() < 1e-3, "beta {}", b.h.beta);
    assert_eq!(b.v.kind, BreatherKind::Steady);
    assert_eq!(b.whole.kind, BreatherKind::None);
}

#[test]
fn integer_flow_is_classical_heun() {
    let chart = sphere_chart(16, 3).unwrap();
    let g0 = sphere_metric(&chart, 1.0).unwrap();
    let cfg = FlowConfig::new(FractionalOrder::integer(), 1e-3, 3);
    let run = evolve(&cfg, &state(g0.clone())).unwrap();
    let rate = |g: &DMetric| hamilton_rhs_canonical(&eval_of(g, vec![0.0; chart.len()], 1.0), Normalization::None, None).unwrap().h;
    let mut g = g0;
    for k in 1..=3 {
        let r0 = rate(&g);
        let pred = DMetric::new(chart.clone(), Components::from_fn(&[2, 2], chart.len(), |x, p| g.h.at(x, p) + 1e-3 * r0.at(x, p)), g.v.clone()).unwrap();
        let r1 = rate(&pred);
        let next = Components::from_fn(&[2, 2], chart.len(), |x, p| g.h.at(x, p) + 5e-4 * (r0.at(x, p) + r1.at(x, p)));
        g = DMetric::new(chart.clone(), next, g.v.clone()).unwrap();
        let diff = run.history.entries[k].state.g.h.sub(&g.h).max_abs();
        assert!(diff < 1e-12, "step {k}: {diff}");
    }
}

#[test]
fn singularity_stops_the_run() {
    // the theta band has free ends, so it degenerates there before the analytic collapse at 1/2
    let chart = sphere_chart(12, 3).unwrap();
    let cfg = FlowConfig::new(FractionalOrder::integer(), 0.005, 120);
    let run = evolve(&cfg, &state(sphere_metric(&chart, 1.0).unwrap())).unwrap();
    match run.stopped {
        Some(crate::Error::FlowSingularity { chi, ref reason }) => assert!(chi > 0.0 && chi <= 0.5, "chi {chi}: {reason}"),
        other => panic!("expected a singularity, got {other:?}"),
    }
    assert_eq!(run.history.len(), run.records.len() + 1);
    assert!(run.records.len() < 120);
    assert!(run.records.last().unwrap().g_min_eig > 0.0);
}

#[test]
fn w_coupling_normalizes_and_guards_tau() {
    let chart = unit_torus(2, 1, 8).unwrap();
    let g = perturbed_torus_metric(&chart, 0.05).unwrap();
    let mut s = state(g);
    s.f = chart.sample(|u| 0.3 + 0.1 * (std::f64::consts::TAU * u[0]).cos());
    let mut cfg = FlowConfig::new(FractionalOrder::integer(), 1e-4, 5);
    cfg.coupling = Coupling::W;
    let run = evolve(&cfg, &s).unwrap();
    assert!((run.initial.mu_mass - 1.0).abs() < 1e-12);
    assert!((run.history.last().tau - (1.0 - 5e-4)).abs() < 1e-14);
    cfg.step = 0.1;
    cfg.steps = 20;
    assert!(matches!(evolve(&cfg, &s), Err(crate::Error::InvalidConfig(_))));
}

#[test]
fn config_validation() {
    let mut cfg = FlowConfig::new(FractionalOrder::integer(), 0.0, 5);
    assert!(cfg.validate().is_err());
    cfg.step = 1e-3;
    cfg.steps = 0;
    assert!(cfg.validate().is_err());
    cfg.steps = 10;
    cfg.evolve_n = true;
    assert!(cfg.validate().is_err());
    cfg.mode = ConnectionMode::LeviCivita;
    assert!(cfg.validate().is_ok());
}

#[test]
fn constant_n_with_flat_metric_stays_put() {
    let chart = unit_torus(2, 1, 6).unwrap();
    let n = NConnectionField::from_fn(&chart, |i, _, _| 0.3 + 0.1 * i as f64).unwrap();
    let s = FlowState::new(DMetric::flat(&chart), n.clone(), vec![0.0; chart.len()], 1.0).unwrap();
    let mut cfg = FlowConfig::new(order(0.8), 1e-3, 10);
    cfg.mode = ConnectionMode::LeviCivita;
    cfg.evolve_n = true;
    let run = evolve(&cfg, &s).unwrap();
    let last = run.history.last();
    assert!(last.n_conn.coefficients.sub(&n.coefficients).max_abs() < 1e-14);
    assert!(last.g.h.sub(&DMetric::flat(&chart).h).max_abs() < 1e-14);
}

#[test]
fn evolving_n_follows_the_coordinate_flow() {
    // LC mode with N evolving: the coordinate metric g_ij + N N g_ab, N g, g_ab moves by -2 Ric.
    let chart = unit_torus(2, 1, 12).unwrap();
    let tau = std::f64::consts::TAU;
    let g = DMetric::from_fn(&chart, |i, j, u| if i == j { 1.0 + 0.1 * (tau * u[0]).sin() } else { 0.0 }, |_, _, u| 1.0 + 0.1 * (tau * u[1]).cos()).unwrap();
    let n = NConnectionField::from_fn(&chart, |i, _, u| 0.1 * ((i + 1) as f64) * (tau * u[1]).sin()).unwrap();
    let s = FlowState::new(g, n, vec![0.0; chart.len()], 1.0).unwrap();
    let mut cfg = FlowConfig::new(FractionalOrder::integer(), 1e-6, 2);
    cfg.mode = ConnectionMode::LeviCivita;
    cfg.evolve_n = true;
    let run = evolve(&cfg, &s).unwrap();
    let coord = |st: &FlowState| crate::geometry::dmetric_to_coordinate(&st.g, &st.n_conn).unwrap().g;
    let (c0, c2) = (coord(run.history.first()), coord(run.history.last()));
    let geo = DGeometry::new(&run.history.first().g, &run.history.first().n_conn, FractionalOrder::integer()).unwrap();
    let ev = Evaluation::from_geometry(geo, &vec![0.0; chart.len()], 1.0);
    let lc = crate::connection::distortion_with(&ev.gamma, &ev.geo).levi_civita;
    let ric = crate::geometry::vielbein(&ev.geo.n_conn).covariant_to_coordinate(&crate::connection::full_ricci(&lc, &ev.geo));
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in c0.indices() {
        for p in 0..chart.len() {
            let rate = (c2.at(&x, p) - c0.at(&x, p)) / 2e-6;
            let expect = -(ric.at(&x, p) + ric.at(&[x[1], x[0]], p));
            err = err.max((rate - expect).abs());
            scale = scale.max(expect.abs());
        }
    }
    assert!(err < 1e-3 * scale, "error {err} scale {scale}");
}

#[test]
fn breathers_of_flat_and_perturbed_flows() {
    let chart = unit_torus(2, 1, 8).unwrap();
    let cfg = FlowConfig::new(FractionalOrder::integer(), 1e-3, 4);
    let flat = evolve(&cfg, &state(DMetric::flat(&chart))).unwrap();
    let b = breather_classify(&flat.history, 1e-3, 4e-3).unwrap();
    assert_eq!(b.whole.kind, BreatherKind::Steady);
    assert_eq!(b.whole.beta, 1.0);
    let mut cfg = FlowConfig::new(FractionalOrder::integer(), 1e-3, 10);
    cfg.steps = 10;
    let bumpy = evolve(&cfg, &state(perturbed_torus_metric(&chart, 0.05).unwrap())).unwrap();
    let b = breather_classify(&bumpy.history, 0.0, 1e-2).unwrap();
    assert_eq!(b.h.kind, BreatherKind::None);
    assert!(breather_classify(&bumpy.history, 0.0, 0.5).is_err());
    assert!(breather_classify(&bumpy.history, 0.0005, 1e-2).is_err());
}

#[test]
fn shifted_history_is_detected() {
    let chart = unit_torus(2, 1, 8).unwrap();
    let g1 = perturbed_torus_metric(&chart, 0.1).unwrap();
    let shifted = |g: &DMetric, s: usize, c: f64| {
        let pull = |b: &Components| {
            Components::from_fn(b.shape(), chart.len(), |x, p| {
                let mut pos = chart.position(p);
                pos[0] = (pos[0] + s) % 8;
                c * b.at(x, chart.node(&pos))
            })
        };
        DMetric::new(chart.clone(), pull(&g.h), pull(&g.v)).unwrap()
    };
    let g2 = shifted(&g1, 8 - 3, 1.3);
    let entry = |g: DMetric, chi: f64| {
        let mut s = state(g);
        s.chi = chi;
        HistoryEntry { chi, state: s, rate: Vec::new() }
    };
    let history = FlowHistory { step: 1.0, entries: vec![entry(g1, 0.0), entry(g2, 1.0)] };
    let b = breather_classify(&history, 0.0, 1.0).unwrap();
    assert_eq!(b.whole.kind, BreatherKind::Expanding);
    assert!((b.whole.beta - 1.3).abs() < 1e-12);
    assert_eq!(b.shift[0], 3);
}

fn small_chart() -> GridChart {
    unit_torus(1, 1, 6).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constant_states_are_stationary(a in 0.1f64..1.0, c in -3.0f64..3.0) {
        let mut rhs = |_: &[Vec<f64>], _: f64, u: &[f64]| Ok(vec![0.0; u.len()]);
        let mut ivp = FractionalIvp::new(order(a), 0.05, 0.0, vec![c; 3], &mut rhs).unwrap();
        for _ in 0..8 {
            ivp.step(&mut rhs).unwrap();
        }
        prop_assert!(ivp.current().iter().all(|v| *v == c));
    }

    #[test]
    fn scaled_flat_metric_is_fixed(s in 0.2f64..5.0) {
        let chart = small_chart();
        let g = DMetric::from_fn(&chart, |i, j, _| if i == j { s } else { 0.0 }, |_, _, _| s).unwrap();
        let cfg = FlowConfig::new(order(0.5), 1e-2, 5);
        let run = evolve(&cfg, &state(g.clone())).unwrap();
        prop_assert_eq!(&run.history.last().g, &g);
    }
}



#[test]
fn fractional_flow_grows_high_modes() {
    // left-sided differences compose to a lagged second difference, so below alpha = 1 the
    // perturbation grows where the integer flow smooths it
    let chart = unit_torus(2, 1, 12).unwrap();
    let g = perturbed_torus_metric(&chart, 0.05).unwrap();
    let dev = |a: f64| {
        let step = (0.02 / 144.0 * gamma(a + 1.0)).powf(1.0 / a);
        let run = evolve(&FlowConfig::new(order(a), step, 100), &state(g.clone())).unwrap();
        assert!(run.stopped.is_none());
        run.history.last().g.h.get(&[0, 0]).iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
    };
    assert!(dev(1.0) < 0.025);
    assert!(dev(0.9) > 0.1);
}
