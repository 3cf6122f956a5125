use super::curvature::frame_derivs;
use super::DGeometry;
use crate::tensor::Components;

/// Riemann tensor of an arbitrary linear connection in the N-adapted frame.
///
/// `gamma` holds `Gamma^s_{a b}` with `D_{e_b} e_a = Gamma^s_{ab} e_s`. The result is
/// `R^s_{a m v} = e_m G^s_av - e_v G^s_am + G^l_av G^s_lm - G^l_am G^s_lv - W^l_mv G^s_al`.
pub fn full_curvature(gamma: &Components, geo: &DGeometry) -> Components {
    let d = geo.chart().dim();
    let w = geo.anholonomy.full();
    let dg = frame_derivs(geo, gamma);
    Components::from_fn(&[d, d, d, d], geo.chart().len(), |x, p| {
        let (s, a, mu, nu) = (x[0], x[1], x[2], x[3]);
        let mut r = dg.at(&[s, a, nu, mu], p) - dg.at(&[s, a, mu, nu], p);
        for l in 0..d {
            r += gamma.at(&[l, a, nu], p) * gamma.at(&[s, l, mu], p) - gamma.at(&[l, a, mu], p) * gamma.at(&[s, l, nu], p)
                - w.at(&[l, mu, nu], p) * gamma.at(&[s, a, l], p);
        }
        r
    })
}

/// Ricci tensor `Ric_{a v} = R^s_{a s v}` of an arbitrary connection, shape `[dim, dim]`.
pub fn full_ricci(gamma: &Components, geo: &DGeometry) -> Components {
    let d = geo.chart().dim();
    let w = geo.anholonomy.full();
    let dg = frame_derivs(geo, gamma);
    Components::from_fn(&[d, d], geo.chart().len(), |x, p| {
        let (a, nu) = (x[0], x[1]);
        let mut r = 0.0;
        for s in 0..d {
            r += dg.at(&[s, a, nu, s], p) - dg.at(&[s, a, s, nu], p);
            for l in 0..d {
                r += gamma.at(&[l, a, nu], p) * gamma.at(&[s, l, s], p) - gamma.at(&[l, a, s], p) * gamma.at(&[s, l, nu], p)
                    - w.at(&[l, s, nu], p) * gamma.at(&[s, a, l], p);
            }
        }
        r
    })
}
