use super::{AxisGrid, FractionalOrder};

/// Euler's gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Precomputed L1 weights for the left Caputo derivative on one axis.
///
/// `D^a f(x_n) = h^-a / Gamma(2 - a) * sum_{k<n} b_k (f_{n-k} - f_{n-k-1})` with
/// `b_k = (k+1)^(1-a) - k^(1-a)`.
#[derive(Debug, Clone)]
pub struct CaputoKernel {
    order: FractionalOrder,
    spacing: f64,
    periodic: bool,
    weights: Vec<f64>,
}

impl CaputoKernel {
    pub fn new(grid: &AxisGrid, order: FractionalOrder) -> Self {
        let weights = if order.is_integer() {
            Vec::new()
        } else {
            let a = order.alpha();
            let scale = grid.spacing.powf(-a) / gamma(2.0 - a);
            let e = 1.0 - a;
            (0..grid.count).map(|k| scale * ((k + 1) as f64).powf(e) - scale * (k as f64).powf(e)).collect()
        };
        Self { order, spacing: grid.spacing, periodic: grid.periodic, weights }
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    /// Applies the derivative to one line of samples. `out` must have the same length.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        debug_assert_eq!(n, out.len());
        if self.order.is_integer() {
            self.classical(f, out);
            return;
        }
        let d: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
        out[0] = 0.0;
        for i in 1..n {
            let mut acc = 0.0;
            for (j, dj) in d[..i].iter().enumerate() {
                acc += self.weights[i - 1 - j] * dj;
            }
            out[i] = acc;
        }
    }

    fn classical(&self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        let h2 = 2.0 * self.spacing;
        for i in 1..n - 1 {
            out[i] = (f[i + 1] - f[i - 1]) / h2;
        }
        if self.periodic {
            out[0] = (f[1] - f[n - 1]) / h2;
            out[n - 1] = (f[0] - f[n - 2]) / h2;
        } else {
            out[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) / h2;
            out[n - 1] = (4.0 * (f[n - 1] - f[n - 2]) - (f[n - 1] - f[n - 3])) / h2;
        }
    }
}

/// Product-trapezoid weights for the left RL integral.
///
/// `I^a f(x_n) = h^a / Gamma(a+2) * (a0(n) f_0 + sum_{0<j<n} c(n-j) f_j + f_n)` with
/// `a0(n) = (n-1)^(a+1) - (n-1-a) n^a` and `c(m) = (m+1)^(a+1) - 2 m^(a+1) + (m-1)^(a+1)`.
#[derive(Debug, Clone)]
pub struct RlIntegralKernel {
    alpha: f64,
    scale: f64,
    interior: Vec<f64>,
}

impl RlIntegralKernel {
    pub fn new(spacing: f64, order: FractionalOrder, count: usize) -> Self {
        let a = order.alpha();
        let scale = spacing.powf(a) / gamma(a + 2.0);
        let p = a + 1.0;
        let interior = (0..count)
            .map(|m| {
                if m == 0 {
                    0.0
                } else {
                    let m = m as f64;
                    (m + 1.0).powf(p) - 2.0 * m.powf(p) + (m - 1.0).powf(p)
                }
            })
            .collect();
        Self { alpha: a, scale, interior }
    }

    fn first(&self, n: usize) -> f64 {
        let a = self.alpha;
        let n = n as f64;
        (n - 1.0).powf(a + 1.0) - (n - 1.0 - a) * n.powf(a)
    }

    /// Quadrature weights `w_j` with `I^a f(x_n) = sum_j w_j f_j`, for `j = 0..=n`.
    pub fn weights_at(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n + 1];
        if n == 0 {
            return w;
        }
        w[0] = self.scale * self.first(n);
        for (j, wj) in w.iter_mut().enumerate().take(n).skip(1) {
            *wj = self.scale * self.interior[n - j];
        }
        w[n] = self.scale;
        w
    }

    /// The integral evaluated at every node of the line.
    pub fn running(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for n in 1..f.len() {
            let mut acc = self.first(n) * f[0] + f[n];
            for j in 1..n {
                acc += self.interior[n - j] * f[j];
            }
            out[n] = self.scale * acc;
        }
        out
    }
}
