use crate::error::{Error, Result};
use crate::fraccalc::{gamma, FractionalOrder};

/// Fractional initial-value problem `D^alpha_chi u = F(u)` with Caputo derivative in `chi`,
/// advanced by a product-integration predictor-corrector over the full history.
///
/// At `alpha = 1` the step is classical Heun. The right side receives the accepted states
/// strictly before the candidate, so it can form history-dependent terms of its own.
#[derive(Debug, Clone)]
pub struct FractionalIvp {
    order: FractionalOrder,
    step: f64,
    chi0: f64,
    states: Vec<Vec<f64>>,
    rates: Vec<Vec<f64>>,
}

/// Right side `F(past, chi, u)`.
pub trait Rhs {
    fn eval(&mut self, past: &[Vec<f64>], chi: f64, u: &[f64]) -> Result<Vec<f64>>;
}

impl<T> Rhs for T
where
    T: FnMut(&[Vec<f64>], f64, &[f64]) -> Result<Vec<f64>>,
{
    fn eval(&mut self, past: &[Vec<f64>], chi: f64, u: &[f64]) -> Result<Vec<f64>> {
        self(past, chi, u)
    }
}

impl FractionalIvp {
    /// Evaluates `F(u0)` once to seed the history.
    pub fn new(order: FractionalOrder, step: f64, chi0: f64, u0: Vec<f64>, rhs: &mut impl Rhs) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {step}")));
        }
        let f0 = rhs.eval(&[], chi0, &u0)?;
        check_len(&u0, &f0)?;
        Ok(Self { order, step, chi0, states: vec![u0], rates: vec![f0] })
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn step_size(&self) -> f64 {
        self.step
    }

    pub fn steps_taken(&self) -> usize {
        self.states.len() - 1
    }

    pub fn chi(&self) -> f64 {
        self.chi_at(self.steps_taken())
    }

    pub fn chi_at(&self, k: usize) -> f64 {
        self.chi0 + k as f64 * self.step
    }

    pub fn current(&self) -> &[f64] {
        self.states.last().expect("history is never empty")
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn rates(&self) -> &[Vec<f64>] {
        &self.rates
    }

    /// Advances one step and returns the new state.
    pub fn step(&mut self, rhs: &mut impl Rhs) -> Result<&[f64]> {
        let k = self.steps_taken();
        let chi_next = self.chi_at(k + 1);
        let next = if self.order.is_integer() {
            let (u, f) = (self.current(), &self.rates[k]);
            let guess: Vec<f64> = u.iter().zip(f).map(|(u, f)| u + self.step * f).collect();
            let fp = rhs.eval(&self.states, chi_next, &guess)?;
            check_len(&guess, &fp)?;
            u.iter().zip(f).zip(&fp).map(|((u, a), b)| u + 0.5 * self.step * (a + b)).collect()
        } else {
            let a = self.order.alpha();
            let u0 = &self.states[0];
            let scale_p = self.step.powf(a) / gamma(a + 1.0);
            let mut guess = u0.clone();
            for (j, f) in self.rates.iter().enumerate() {
                let w = scale_p * predictor_weight(a, k, j);
                guess.iter_mut().zip(f).for_each(|(g, f)| *g += w * f);
            }
            let fp = rhs.eval(&self.states, chi_next, &guess)?;
            check_len(&guess, &fp)?;
            let scale_c = self.step.powf(a) / gamma(a + 2.0);
            let mut u: Vec<f64> = u0.iter().zip(&fp).map(|(u, f)| u + scale_c * f).collect();
            for (j, f) in self.rates.iter().enumerate() {
                let w = scale_c * corrector_weight(a, k, j);
                u.iter_mut().zip(f).for_each(|(u, f)| *u += w * f);
            }
            u
        };
        let f_next = rhs.eval(&self.states, chi_next, &next)?;
        check_len(&next, &f_next)?;
        self.states.push(next);
        self.rates.push(f_next);
        Ok(self.current())
    }
}

/// `(k+1-j)^a - (k-j)^a`.
fn predictor_weight(a: f64, k: usize, j: usize) -> f64 {
    let d = (k - j) as f64;
    (d + 1.0).powf(a) - d.powf(a)
}

/// Fractional trapezoid weights for `u_{k+1}`, excluding the new node (weight 1).
fn corrector_weight(a: f64, k: usize, j: usize) -> f64 {
    let kf = k as f64;
    if j == 0 {
        kf.powf(a + 1.0) - (kf - a) * (kf + 1.0).powf(a)
    } else {
        let d = (k - j) as f64;
        (d + 2.0).powf(a + 1.0) + d.powf(a + 1.0) - 2.0 * (d + 1.0).powf(a + 1.0)
    }
}

fn check_len(u: &[f64], f: &[f64]) -> Result<()> {
    if u.len() == f.len() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("right side has {} entries for a state of {}", f.len(), u.len())))
    }
}

/// L1 approximation of the Caputo derivative in `chi` at the newest of `values`
/// (uniform spacing `step`).
pub fn caputo_l1_latest(values: &[f64], step: f64, order: FractionalOrder) -> f64 {
    let k = values.len().saturating_sub(1);
    if k == 0 {
        return 0.0;
    }
    let a = order.alpha();
    let scale = step.powf(-a) / gamma(2.0 - a);
    (0..k)
        .map(|j| {
            let b = ((j + 1) as f64).powf(1.0 - a) - (j as f64).powf(1.0 - a);
            b * (values[k - j] - values[k - j - 1])
        })
        .sum::<f64>()
        * scale
}
