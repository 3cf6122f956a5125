use fracflow_core::fraccalc::FractionalOrder;
use fracflow_core::geometry::*;
use fracflow_core::scenarios::{unit_box, SmoothFields};

#[test]
fn coordinate_metric_round_trip_on_random_fields() {
    let chart = unit_box(2, 2, 6).unwrap();
    let fields = SmoothFields::random(2, 2, 11);
    let (g, n) = fields.build(&chart).unwrap();
    let coord = dmetric_to_coordinate(&g, &n).unwrap();
    for p in 0..chart.len() {
        let reference = fields.coordinate_metric(&chart.coords(p));
        for x in coord.g.indices() {
            assert!((coord.g.at(&x, p) - reference[x[0]][x[1]]).abs() < 1e-12);
        }
    }
    let (g2, n2) = coordinate_to_dmetric(&coord).unwrap();
    assert!(g2.h.sub(&g.h).max_abs() < 1e-12);
    assert!(g2.v.sub(&g.v).max_abs() < 1e-12);
    assert!(n2.coefficients.sub(&n.coefficients).max_abs() < 1e-12);
}

#[test]
fn vielbein_inverts_metric_conversion() {
    // F g_frame F^T reproduces the coordinate metric
    let chart = unit_box(1, 2, 5).unwrap();
    let fields = SmoothFields::random(1, 2, 5);
    let (g, n) = fields.build(&chart).unwrap();
    let full = fracflow_core::tensor::Components::from_fn(&[3, 3], chart.len(), |x, p| g.full(x[0], x[1]).map_or(0.0, |c| c[p]));
    let pushed = vielbein(&n).covariant_to_coordinate(&full);
    let coord = dmetric_to_coordinate(&g, &n).unwrap();
    assert!(pushed.sub(&coord.g).max_abs() < 1e-12);
}

#[test]
fn anholonomy_matches_closed_form_at_integer_order() {
    let chart = unit_box(2, 1, 41).unwrap();
    let fields = SmoothFields::random(2, 1, 2);
    let (_, n) = fields.build(&chart).unwrap();
    let w = anholonomy(&n, FractionalOrder::integer());
    let d = 1e-5;
    let partial = |i: usize, k: usize, u: &[f64]| {
        let (mut up, mut dn) = (u.to_vec(), u.to_vec());
        up[k] += d;
        dn[k] -= d;
        (fields.n_coef(i, 0, &up) - fields.n_coef(i, 0, &dn)) / (2.0 * d)
    };
    let mut err: f64 = 0.0;
    for p in chart.interior(2) {
        let u = chart.coords(p);
        let e = |i: usize, j: usize| partial(j, i, &u) - fields.n_coef(i, 0, &u) * partial(j, 2, &u);
        let omega = e(1, 0) - e(0, 1);
        err = err.max((w.omega.at(&[0, 0, 1], p) - omega).abs());
        err = err.max((w.dv.at(&[0, 0, 0], p) - partial(0, 2, &u)).abs());
    }
    assert!(err < 5e-3, "{err}");
}
