use crate::error::{Error, Result};
use crate::fraccalc::AxisGrid;

/// Sampled coordinate box `u = (x^1..x^n, y^1..y^m)`.
///
/// Axes `0..n` are horizontal, `n..n+m` vertical. Nodes are stored row-major with the last
/// axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridChart {
    n: usize,
    m: usize,
    axes: Vec<AxisGrid>,
    strides: Vec<usize>,
    len: usize,
}

impl GridChart {
    pub fn new(n: usize, m: usize, axes: Vec<AxisGrid>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidGrid(format!("need n >= 1 and m >= 1, got n = {n}, m = {m}")));
        }
        if axes.len() != n + m {
            return Err(Error::InvalidGrid(format!("{} axes for dimension {}", axes.len(), n + m)));
        }
        if let Some(a) = axes.iter().find(|a| a.count < 3) {
            return Err(Error::GridTooSmall(a.count));
        }
        let mut strides = vec![1; axes.len()];
        for k in (0..axes.len() - 1).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].count;
        }
        let len = strides[0] * axes[0].count;
        Ok(Self { n, m, axes, strides, len })
    }

    pub fn h_dim(&self) -> usize {
        self.n
    }

    pub fn v_dim(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn axes(&self) -> &[AxisGrid] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &AxisGrid {
        &self.axes[k]
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    /// Per-axis integer position of node `p`.
    pub fn position(&self, p: usize) -> Vec<usize> {
        self.strides.iter().zip(&self.axes).map(|(s, a)| (p / s) % a.count).collect()
    }

    pub fn node(&self, pos: &[usize]) -> usize {
        pos.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coords(&self, p: usize) -> Vec<f64> {
        self.position(p).iter().zip(&self.axes).map(|(&i, a)| a.node(i)).collect()
    }

    /// Samples `f(u)` at every node.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len).map(|p| f(&self.coords(p))).collect()
    }

    /// Nodes at least `margin` away from both ends of every non-periodic axis.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        (0..self.len)
            .filter(|&p| {
                self.position(p).iter().zip(&self.axes).all(|(&i, a)| a.periodic || (i >= margin && i + margin < a.count))
            })
            .collect()
    }

    /// Starting node of every grid line along `axis`.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        let s = self.strides[axis];
        let c = self.axes[axis].count;
        (0..self.len).filter(|p| (p / s).is_multiple_of(c)).collect()
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len == self.len {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("field of {len} samples on a chart of {} nodes", self.len)))
        }
    }
}
