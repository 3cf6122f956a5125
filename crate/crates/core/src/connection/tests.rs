use super::*;
use crate::fraccalc::FractionalOrder;
use crate::scenarios::{sphere_chart, sphere_metric, unit_box, SmoothFields};

use fracflow_oracle as oracle;

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn random_geometry(count: usize, a: f64, seed: u64) -> (DGeometry, SmoothFields) {
    let chart = unit_box(2, 1, count).unwrap();
    let fields = SmoothFields::random(2, 1, seed);
    let (g, n) = fields.build(&chart).unwrap();
    (DGeometry::new(&g, &n, order(a)).unwrap(), fields)
}

#[test]
fn flat_geometry_has_no_connection_or_curvature() {
    let chart = unit_box(2, 2, 6).unwrap();
    let g = DMetric::flat(&chart);
    let n = NConnectionField::zero(&chart);
    for a in [0.4, 1.0] {
        let gamma = canonical_dconnection(&g, &n, order(a)).unwrap();
        assert_eq!(gamma.full().max_abs(), 0.0);
        let r = dcurvature(&gamma, &n, &g, order(a)).unwrap();
        for b in [&r.hhhh, &r.vvhh, &r.hhhv, &r.vvhv, &r.hhvv, &r.vvvv] {
            assert_eq!(b.max_abs(), 0.0);
        }
        let ric = ricci_contract(&r);
        let (rr, ss) = scalar_curvature(&g, &ric).unwrap();
        assert!(rr.iter().chain(&ss).all(|&v| v == 0.0));
        let e = einstein_tensor(&g, &ric);
        assert_eq!(e.hh.max_abs() + e.vv.max_abs() + e.hv.max_abs(), 0.0);
        assert_eq!(metricity_residual(&gamma, &g, &n, order(a)).unwrap(), 0.0);
    }
}

#[test]
fn canonical_torsion_and_metricity_vanish() {
    for a in [0.5, 1.0] {
        let (geo, _) = random_geometry(16, a, 7);
        let gamma = canonical(&geo);
        let t = torsion_with(&gamma, &geo.anholonomy);
        assert!(t.hhh.max_abs() <= 1e-12, "alpha {a}: {}", t.hhh.max_abs());
        assert!(t.vvv.max_abs() <= 1e-12);
        let res = metricity_with(&gamma, &geo);
        assert!(res <= 1e-10, "alpha {a}: {res}");
    }
}

#[test]
fn mutated_connection_breaks_metricity() {
    let (geo, _) = random_geometry(8, 1.0, 3);
    let bad = canonical_mutated(&geo, CanonicalMutation::FlipHorizontalTerm);
    assert!(metricity_with(&bad, &geo) > 1e-3);

    let mut shifted = canonical(&geo);
    for v in shifted.l_h.get_mut(&[0, 1, 0]) {
        *v += 0.1;
    }
    let gmin = geo.g.h.fields().iter().flatten().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    assert!(metricity_with(&shifted, &geo) >= 0.01 * gmin);
}

#[test]
fn y_independent_h_metric_has_no_c_block() {
    let chart = unit_box(2, 1, 7).unwrap();
    let g = DMetric::from_fn(&chart, |i, j, u| if i == j { 1.0 + u[0] * u[1] } else { 0.1 * u[0] }, |_, _, u| 1.0 + u[2]).unwrap();
    let n = NConnectionField::from_fn(&chart, |i, _, u| u[i] * u[2]).unwrap();
    let gamma = canonical_dconnection(&g, &n, order(0.6)).unwrap();
    assert_eq!(gamma.c_h.max_abs(), 0.0);
}

#[test]
fn x_independent_v_metric_has_no_mixed_torsion() {
    let chart = unit_box(2, 1, 7).unwrap();
    let g = DMetric::from_fn(&chart, |i, j, u| if i == j { 1.0 + u[0] * u[2] } else { 0.0 }, |_, _, u| 1.0 + u[2] * u[2]).unwrap();
    let n = NConnectionField::zero(&chart);
    let gamma = canonical_dconnection(&g, &n, order(0.6)).unwrap();
    let t = dtorsion(&gamma, &n, order(0.6)).unwrap();
    assert_eq!(t.vvh.max_abs(), 0.0);
    assert_eq!(t.vhh.max_abs(), 0.0);
}

#[test]
fn sphere_christoffels_and_curvature() {
    let chart = sphere_chart(64, 3).unwrap();
    let g = sphere_metric(&chart, 1.0).unwrap();
    let n = NConnectionField::zero(&chart);
    let geo = DGeometry::new(&g, &n, FractionalOrder::integer()).unwrap();
    let gamma = canonical(&geo);
    let interior = chart.interior(2);
    let mut err: f64 = 0.0;
    for &p in &interior {
        let th = chart.coords(p)[0];
        let expect = [
            ([0, 1, 1], -th.sin() * th.cos()),
            ([1, 0, 1], th.cos() / th.sin()),
            ([1, 1, 0], th.cos() / th.sin()),
            ([0, 0, 0], 0.0),
            ([1, 1, 1], 0.0),
        ];
        for (idx, v) in expect {
            err = err.max((gamma.l_h.at(&idx, p) - v).abs());
        }
    }
    assert!(err <= 1e-3, "christoffel error {err}");
    let ric = ricci_with(&gamma, &geo);
    let rerr = interior.iter().map(|&p| (ric.r[p] - 2.0).abs()).fold(0.0, f64::max);
    assert!(rerr <= 2e-3, "scalar error {rerr}");
    for &p in &interior {
        for i in 0..2 {
            for j in 0..2 {
                assert!((ric.hh.at(&[i, j], p) - g.h.at(&[i, j], p)).abs() < 2e-3);
            }
        }
        assert!(ric.s[p].abs() < 1e-12);
    }
    // h-trace of the Einstein tensor is R - (R + S) for n = 2.
    let e = einstein_tensor(&g, &ric);
    let tr = trace_blocks(&geo.ginv_h, &e.hh);
    for &p in &interior {
        assert!((tr[p] - (ric.r[p] - ric.total_scalar()[p])).abs() < 1e-12);
    }
}

#[test]
fn scalar_curvature_scales_inversely() {
    let chart = sphere_chart(32, 3).unwrap();
    let n = NConnectionField::zero(&chart);
    let g1 = sphere_metric(&chart, 1.0).unwrap();
    let g2 = sphere_metric(&chart, 3f64.sqrt()).unwrap();
    let r = |g: &DMetric| {
        let geo = DGeometry::new(g, &n, FractionalOrder::integer()).unwrap();
        ricci_with(&canonical(&geo), &geo).r
    };
    let (a, b) = (r(&g1), r(&g2));
    for p in chart.interior(2) {
        assert!((a[p] - 3.0 * b[p]).abs() < 1e-12);
    }
}

#[test]
fn product_metric_has_no_mixed_ricci() {
    let chart = unit_box(2, 1, 12).unwrap();
    let g = DMetric::from_fn(&chart, |i, j, u| if i == j { 1.0 + 0.3 * u[0] * u[1] } else { 0.1 * u[0] }, |_, _, u| 1.0 + u[2] * u[2]).unwrap();
    let n = NConnectionField::zero(&chart);
    let geo = DGeometry::new(&g, &n, order(0.7)).unwrap();
    let ric = ricci_with(&canonical(&geo), &geo);
    assert!(ric.hv.max_abs() < 1e-12 && ric.vh.max_abs() < 1e-12);
}

/// Each d-curvature block against the curvature of the same coefficients computed with the
/// general anholonomic-frame formula.
#[test]
fn curvature_blocks_match_general_formula() {
    for a in [0.6, 1.0] {
        let (geo, _) = random_geometry(7, a, 11);
        let gamma = canonical(&geo);
        let r = curvature_with(&gamma, &geo);
        let full = full_curvature(&gamma.full(), &geo);
        let n = 2;
        let mut err: f64 = 0.0;
        for p in 0..geo.chart().len() {
            for x in r.hhhh.indices() {
                err = err.max((r.hhhh.at(&x, p) - full.at(&[x[0], x[1], x[3], x[2]], p)).abs());
            }
            for x in r.vvhh.indices() {
                err = err.max((r.vvhh.at(&x, p) - full.at(&[n + x[0], n + x[1], x[3], x[2]], p)).abs());
            }
            for x in r.hhhv.indices() {
                err = err.max((r.hhhv.at(&x, p) - full.at(&[x[0], x[1], n + x[3], x[2]], p)).abs());
            }
            for x in r.vvhv.indices() {
                err = err.max((r.vvhv.at(&x, p) - full.at(&[n + x[0], n + x[1], n + x[3], x[2]], p)).abs());
            }
            for x in r.hhvv.indices() {
                err = err.max((r.hhvv.at(&x, p) - full.at(&[x[0], x[1], n + x[3], n + x[2]], p)).abs());
            }
            for x in r.vvvv.indices() {
                err = err.max((r.vvvv.at(&x, p) - full.at(&[n + x[0], n + x[1], n + x[3], n + x[2]], p)).abs());
            }
        }
        assert!(err < 1e-9, "alpha {a}: {err}");
        let ric = ricci_with(&gamma, &geo).full();
        let gen = full_ricci(&gamma.full(), &geo);
        assert!(ric.sub(&gen).max_abs() < 1e-9);
    }
}

#[test]
fn curvature_blocks_are_antisymmetric() {
    let (geo, _) = random_geometry(6, 0.5, 5);
    let r = curvature_with(&canonical(&geo), &geo);
    for p in 0..geo.chart().len() {
        for x in r.hhhh.indices() {
            assert!((r.hhhh.at(&x, p) + r.hhhh.at(&[x[0], x[1], x[3], x[2]], p)).abs() <= 1e-12);
        }
        for x in r.hhvv.indices() {
            assert!((r.hhvv.at(&x, p) + r.hhvv.at(&[x[0], x[1], x[3], x[2]], p)).abs() <= 1e-12);
        }
        for x in r.vvvv.indices() {
            assert!((r.vvvv.at(&x, p) + r.vvvv.at(&[x[0], x[1], x[3], x[2]], p)).abs() <= 1e-12);
        }
    }
}

#[test]
fn distortion_vanishes_for_product_metric() {
    let chart = unit_box(2, 1, 9).unwrap();
    let g = DMetric::from_fn(&chart, |i, j, u| if i == j { 1.0 + u[0] * u[1] } else { 0.2 * u[1] }, |_, _, u| 2.0 + u[2]).unwrap();
    let n = NConnectionField::zero(&chart);
    let z = levi_civita_distortion(&g, &n, order(0.5)).unwrap();
    assert!(z.z.max_abs() < 1e-14);
}

#[test]
fn distortion_zero_blocks() {
    let (geo, _) = random_geometry(6, 0.5, 2);
    let z = distortion_with(&canonical(&geo), &geo);
    for p in 0..geo.chart().len() {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_eq!(z.z.at(&[i, j, k], p), 0.0);
                }
            }
        }
        assert_eq!(z.z.at(&[2, 2, 2], p), 0.0);
    }
}

/// At alpha = 1 the reconstructed Levi-Civita connection, pushed to coordinates, matches
/// Christoffel symbols of the closed-form coordinate metric.
#[test]
fn distortion_matches_coordinate_christoffels() {
    let (geo, fields) = random_geometry(41, 1.0, 21);
    let lc = distortion_with(&canonical(&geo), &geo).levi_civita;
    let coord = push_to_coordinates(&lc, &geo.n_conn, geo.order);
    let chart = geo.chart();
    let mut err: f64 = 0.0;
    for p in chart.interior(2) {
        let u = chart.coords(p);
        let reference = oracle::christoffel_ref(|x| fields.coordinate_metric(x), &u, 1e-5);
        for x in coord.indices() {
            err = err.max((coord.at(&x, p) - reference[x[0]][x[1]][x[2]]).abs());
        }
    }
    eprintln!("distortion error {err}");
    assert!(err <= 1e-3, "max error {err}");
}
