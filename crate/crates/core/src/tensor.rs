//! Multi-index component storage on grid nodes and small per-node matrix helpers.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Reject metric blocks whose condition number exceeds this bound.
pub const MAX_CONDITION: f64 = 1e8;

/// A family of scalar fields indexed by a fixed-shape multi-index.
///
/// `get(&[i, j, k])` returns the field of that component at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    shape: Vec<usize>,
    nodes: usize,
    data: Vec<Vec<f64>>,
}

impl Components {
    pub fn zeros(shape: &[usize], nodes: usize) -> Self {
        let count = shape.iter().product();
        Self { shape: shape.to_vec(), nodes, data: vec![vec![0.0; nodes]; count] }
    }

    /// Fills every component from `f(index, node)`.
    pub fn from_fn(shape: &[usize], nodes: usize, f: impl Fn(&[usize], usize) -> f64) -> Self {
        let mut out = Self::zeros(shape, nodes);
        for (flat, comp) in out.data.iter_mut().enumerate() {
            let idx = unflatten(shape, flat);
            for (p, v) in comp.iter_mut().enumerate() {
                *v = f(&idx, p);
            }
        }
        out
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter().zip(&self.shape).fold(0, |acc, (i, s)| {
            debug_assert!(i < s);
            acc * s + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &[f64] {
        &self.data[self.flat(idx)]
    }

    pub fn get_mut(&mut self, idx: &[usize]) -> &mut Vec<f64> {
        let f = self.flat(idx);
        &mut self.data[f]
    }

    pub fn at(&self, idx: &[usize], p: usize) -> f64 {
        self.data[self.flat(idx)][p]
    }

    /// Every multi-index in row-major order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        (0..self.data.len()).map(|f| unflatten(&self.shape, f)).collect()
    }

    pub fn fields(&self) -> &[Vec<f64>] {
        &self.data
    }

    /// Largest absolute entry over all components and nodes.
    pub fn max_abs(&self) -> f64 {
        self.max_abs_on(0..self.nodes)
    }

    /// Largest absolute entry restricted to the given nodes.
    pub fn max_abs_on(&self, nodes: impl IntoIterator<Item = usize> + Clone) -> f64 {
        self.data
            .iter()
            .map(|c| nodes.clone().into_iter().map(|p| c[p].abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        Self { shape: self.shape.clone(), nodes: self.nodes, data }
    }
}

fn unflatten(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        idx[k] = flat % shape[k];
        flat /= shape[k];
    }
    idx
}

/// Inverse and determinant of a symmetric block at every node.
#[derive(Debug, Clone)]
pub struct BlockInverse {
    pub inverse: Components,
    pub det: Vec<f64>,
}

/// Inverts a field of symmetric `d x d` blocks `block.get(&[i, j])`, rejecting blocks whose
/// condition number exceeds [`MAX_CONDITION`].
pub fn invert_symmetric(block: &Components) -> Result<BlockInverse> {
    let d = block.shape()[0];
    let nodes = block.nodes();
    let mut inverse = Components::zeros(&[d, d], nodes);
    let mut det = vec![0.0; nodes];
    for p in 0..nodes {
        let m = DMatrix::from_fn(d, d, |i, j| block.at(&[i, j], p));
        let (lo, hi) = extreme_eigenvalues(&m);
        let cond = if lo == 0.0 { f64::INFINITY } else { hi / lo };
        if !cond.is_finite() || cond > MAX_CONDITION {
            return Err(Error::DegenerateMetric { node: p, cond });
        }
        let inv = m.clone().try_inverse().ok_or(Error::DegenerateMetric { node: p, cond })?;
        det[p] = m.determinant();
        for i in 0..d {
            for j in 0..d {
                inverse.get_mut(&[i, j])[p] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
            }
        }
    }
    Ok(BlockInverse { inverse, det })
}

/// Smallest and largest absolute eigenvalue of a symmetric matrix.
fn extreme_eigenvalues(m: &DMatrix<f64>) -> (f64, f64) {
    let e = SymmetricEigen::new(m.clone()).eigenvalues;
    let lo = e.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let hi = e.iter().map(|x| x.abs()).fold(0.0, f64::max);
    (lo, hi)
}

/// Signed eigenvalues of a symmetric matrix given as rows.
pub fn symmetric_eigenvalues(rows: &[Vec<f64>]) -> Vec<f64> {
    let d = rows.len();
    let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
    SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
}
