use fracflow_oracle as oracle;
use fracflow_core::connection::*;
use fracflow_core::fraccalc::FractionalOrder;
use fracflow_core::geometry::NConnectionField;
use fracflow_core::scenarios::{sphere_chart, sphere_metric, unit_box, SmoothFields};

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

#[test]
fn torsion_and_metricity_of_the_canonical_connection() {
    let chart = unit_box(2, 1, 16).unwrap();
    let (g, n) = SmoothFields::random(2, 1, 41).build(&chart).unwrap();
    for a in [0.5, 1.0] {
        let gamma = canonical_dconnection(&g, &n, order(a)).unwrap();
        let t = dtorsion(&gamma, &n, order(a)).unwrap();
        assert!(t.hhh.max_abs() <= 1e-12 && t.vvv.max_abs() <= 1e-12);
        assert!(t.vhh.max_abs() > 1e-3, "generic N has anholonomy");
        assert!(metricity_residual(&gamma, &g, &n, order(a)).unwrap() <= 1e-10);
    }
}

#[test]
fn sphere_against_coordinate_christoffels() {
    let chart = sphere_chart(64, 3).unwrap();
    let g = sphere_metric(&chart, 1.0).unwrap();
    let n = NConnectionField::zero(&chart);
    let gamma = canonical_dconnection(&g, &n, FractionalOrder::integer()).unwrap();
    let metric = |u: &[f64]| vec![vec![1.0, 0.0, 0.0], vec![0.0, u[0].sin().powi(2), 0.0], vec![0.0, 0.0, 1.0]];
    let mut err: f64 = 0.0;
    for p in chart.interior(2) {
        let reference = oracle::christoffel_ref(metric, &chart.coords(p), 1e-5);
        for x in gamma.l_h.indices() {
            err = err.max((gamma.l_h.at(&x, p) - reference[x[0]][x[1]][x[2]]).abs());
        }
    }
    assert!(err <= 1e-3, "{err}");
    let ric = ricci_contract(&dcurvature(&gamma, &n, &g, FractionalOrder::integer()).unwrap());
    let (r, s) = scalar_curvature(&g, &ric).unwrap();
    for p in chart.interior(2) {
        assert!((r[p] - 2.0).abs() <= 2e-3);
        assert!(s[p].abs() <= 1e-12);
    }
}

#[test]
fn levi_civita_from_distortion_matches_coordinates() {
    let chart = unit_box(2, 1, 41).unwrap();
    let fields = SmoothFields::random(2, 1, 13);
    let (g, n) = fields.build(&chart).unwrap();
    let z = levi_civita_distortion(&g, &n, FractionalOrder::integer()).unwrap();
    let coord = push_to_coordinates(&z.levi_civita, &n, FractionalOrder::integer());
    let mut err: f64 = 0.0;
    for p in chart.interior(2) {
        let reference = oracle::christoffel_ref(|u| fields.coordinate_metric(u), &chart.coords(p), 1e-5);
        for x in coord.indices() {
            err = err.max((coord.at(&x, p) - reference[x[0]][x[1]][x[2]]).abs());
        }
    }
    assert!(err <= 1e-3, "{err}");
}

#[test]
fn injected_sign_error_is_caught_by_metricity() {
    let chart = unit_box(2, 1, 10).unwrap();
    let (g, n) = SmoothFields::random(2, 1, 3).build(&chart).unwrap();
    let geo = DGeometry::new(&g, &n, FractionalOrder::integer()).unwrap();
    let good = canonical_mutated(&geo, CanonicalMutation::None);
    let bad = canonical_mutated(&geo, CanonicalMutation::FlipHorizontalTerm);
    assert!(metricity_with(&good, &geo) <= 1e-10);
    assert!(metricity_with(&bad, &geo) > 1e-3);
}
