use fracflow_core::fraccalc::FractionalOrder;
use fracflow_core::geometry::{DMetric, NConnectionField};
use fracflow_core::perelman::*;
use fracflow_core::scenarios::{separable_state, unit_box, unit_torus, SeparableDirection};

fn central_difference(dir: &SeparableDirection, g: &DMetric, f: &[f64], n: &NConnectionField, order: FractionalOrder) -> f64 {
    let eps = 1e-4;
    let at = |e: f64| {
        let (gg, ff) = dir.apply(g, f, e).unwrap();
        functional_f(&Evaluation::new(&gg, n, &ff, 1.0, order).unwrap())
    };
    (at(eps) - at(-eps)) / (2.0 * eps)
}

#[test]
fn first_variation_matches_central_differences() {
    let chart = unit_torus(2, 1, 16).unwrap();
    let (g, f) = separable_state(&chart).unwrap();
    let n = NConnectionField::zero(&chart);
    let ev = Evaluation::new(&g, &n, &f, 1.0, FractionalOrder::integer()).unwrap();
    for seed in 1..=3 {
        let dir = SeparableDirection::random(2, 1, seed);
        let analytic = first_variation_f(&ev, &dir.variation(&chart)).unwrap();
        let fd = central_difference(&dir, &g, &f, &n, FractionalOrder::integer());
        assert!((analytic - fd).abs() <= 1e-3 * fd.abs(), "seed {seed}: {analytic} vs {fd}");
    }
}

#[test]
fn potential_variation_can_be_split_between_blocks() {
    let chart = unit_torus(2, 1, 12).unwrap();
    let (g, f) = separable_state(&chart).unwrap();
    let ev = Evaluation::new(&g, &NConnectionField::zero(&chart), &f, 1.0, FractionalOrder::integer()).unwrap();
    let whole = SeparableDirection::random(2, 1, 9).variation(&chart);
    let mut split = whole.clone();
    split.f_v = split.f_h.iter().map(|v| 0.25 * v).collect();
    split.f_h.iter_mut().for_each(|v| *v *= 0.75);
    let (a, b) = (first_variation_f(&ev, &whole).unwrap(), first_variation_f(&ev, &split).unwrap());
    assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
}

#[test]
fn normalization_and_flat_thermodynamics() {
    let chart = unit_box(2, 1, 9).unwrap();
    let g = DMetric::flat(&chart);
    let order = FractionalOrder::integer();
    let volume = VolumeElement::new(&g, order).unwrap();
    let tau = 0.8;
    let f = normalize_potential(&vec![0.25; chart.len()], tau, &volume).unwrap();
    assert!((mu_mass(&f, tau, &volume).unwrap() - 1.0).abs() <= 1e-10);
    // constant f: mu = 1/V, so <E> = tau^2 (n+m)/(2 tau) and log Z = -f + (n+m)/2
    let ev = Evaluation::new(&g, &NConnectionField::zero(&chart), &f, tau, order).unwrap();
    let t = thermodynamics(&ev).unwrap();
    assert!((t.energy - 1.5 * tau).abs() <= 1e-8);
    assert!((t.log_z - (1.5 - f[0])).abs() <= 1e-8);
    assert!(t.sigma >= 0.0);
}

#[test]
fn fractional_volume_of_a_flat_box() {
    let chart = unit_box(1, 1, 65).unwrap();
    let g = DMetric::flat(&chart);
    let one = vec![1.0; chart.len()];
    assert!((fractional_volume_integral(&one, &g, FractionalOrder::integer()).unwrap() - 1.0).abs() < 1e-12);
    // each axis weighs int_0^1 (1 - x)^(a-1) / Gamma(a) dx = 1 / Gamma(a + 1)
    let a = 0.6;
    let expect = (1.0 / fracflow_core::fraccalc::gamma(a + 1.0)).powi(2);
    let got = fractional_volume_integral(&one, &g, FractionalOrder::new(a).unwrap()).unwrap();
    assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
}
