//! Independent reference computations for tests and the acceptance suite. Nothing here
//! depends on the fracflow crates.

/// Lanczos approximation (g = 7, 9 terms), accurate to ~1e-15 relative.
pub fn gamma_ref(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_ref(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of a smooth integrand.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let f = &f as &dyn Fn(f64) -> f64;
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `1/Gamma(beta) * int_a^x (x - t)^(beta - 1) g(t) dt`, with the substitution
/// `s = (x - t)^beta` removing the endpoint singularity.
pub fn rl_integral_ref(g: impl Fn(f64) -> f64, a: f64, x: f64, beta: f64) -> f64 {
    let top = (x - a).powf(beta);
    integrate(|s| g(x - s.powf(1.0 / beta)), 0.0, top, 1e-13) / (beta * gamma_ref(beta))
}

/// Caputo derivative of order `alpha < 1` from the derivative `dg` of the function.
pub fn caputo_ref(dg: impl Fn(f64) -> f64, a: f64, x: f64, alpha: f64) -> f64 {
    rl_integral_ref(dg, a, x, 1.0 - alpha)
}

/// Riemann-Liouville derivative `d/dx I^(1-alpha) g` by a central difference of the
/// integral evaluated with the reference quadrature.
pub fn rl_derivative_ref(g: impl Fn(f64) -> f64 + Copy, a: f64, x: f64, alpha: f64) -> f64 {
    let d = 1e-4;
    let i = |y: f64| rl_integral_ref(g, a, y, 1.0 - alpha);
    (-i(x + 2.0 * d) + 8.0 * i(x + d) - 8.0 * i(x - d) + i(x - 2.0 * d)) / (12.0 * d)
}

/// Symmetric matrix inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().partial_cmp(&m[y][c].abs()).unwrap()).unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let k = m[r][c];
                let row_c = m[c].clone();
                for (v, w) in m[r].iter_mut().zip(row_c) {
                    *v -= k * w;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Christoffel symbols `Gamma^c_ab` of a coordinate metric at a point, from central
/// differences of the metric function with step `d`.
pub fn christoffel_ref(metric: impl Fn(&[f64]) -> Vec<Vec<f64>>, u: &[f64], d: f64) -> Vec<Vec<Vec<f64>>> {
    let dim = u.len();
    let dg: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|k| {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[k] += d;
            dn[k] -= d;
            let (gp, gm) = (metric(&up), metric(&dn));
            (0..dim).map(|i| (0..dim).map(|j| (gp[i][j] - gm[i][j]) / (2.0 * d)).collect()).collect()
        })
        .collect();
    let ginv = invert(&metric(u));
    let mut out = vec![vec![vec![0.0; dim]; dim]; dim];
    for c in 0..dim {
        for a in 0..dim {
            for b in 0..dim {
                let mut s = 0.0;
                for e in 0..dim {
                    s += 0.5 * ginv[c][e] * (dg[a][e][b] + dg[b][e][a] - dg[e][a][b]);
                }
                out[c][a][b] = s;
            }
        }
    }
    out
}
