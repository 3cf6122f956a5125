use super::FlowHistory;
use crate::error::Result;
use crate::geometry::{DMetric, GridChart};

/// Largest relative misfit `|beta g1 - phi* g2| / |g1|` still counted as a breather.
pub const BREATHER_TOL: f64 = 1e-4;
/// `|beta - 1|` below this is steady.
pub const STEADY_TOL: f64 = 1e-6;
/// Nodes skipped at each end of a non-periodic axis. Curvature there comes from one-sided
/// stencils, and its error reaches two further rows through the next second derivative.
pub const BREATHER_MARGIN: usize = 4;
/// Exhaustive shift search is used while `shifts * nodes` stays below this.
const EXHAUSTIVE_BUDGET: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreatherKind {
    Steady,
    Shrinking,
    Expanding,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockBreather {
    pub kind: BreatherKind,
    pub beta: f64,
    pub residual: f64,
}

impl BlockBreather {
    fn classify(beta: f64, residual: f64) -> Self {
        let kind = if !(residual <= BREATHER_TOL) {
            BreatherKind::None
        } else if (beta - 1.0).abs() <= STEADY_TOL {
            BreatherKind::Steady
        } else if beta < 1.0 {
            BreatherKind::Shrinking
        } else {
            BreatherKind::Expanding
        };
        Self { kind, beta, residual }
    }
}

/// Result for the whole d-metric (one `beta`) and for each block separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Breather {
    pub whole: BlockBreather,
    pub h: BlockBreather,
    pub v: BlockBreather,
    /// Node shift per axis (zero on non-periodic axes).
    pub shift: Vec<usize>,
}

/// Restricted detector: scalings and integer translations along periodic axes.
///
/// `beta` is the least-squares scale with `beta g(chi1) ~ phi* g(chi2)`. Non-periodic axes
/// are compared [`BREATHER_MARGIN`] nodes away from their ends.
pub fn breather_classify(history: &FlowHistory, chi1: f64, chi2: f64) -> Result<Breather> {
    let g1 = &history.at(chi1)?.g;
    let g2 = &history.at(chi2)?.g;
    let chart = &g1.chart;
    let nodes = chart.interior(BREATHER_MARGIN);
    let periodic: Vec<usize> = (0..chart.dim()).filter(|&k| chart.axis(k).periodic).collect();
    let fit = |shift: &[usize]| Fit::new(g1, g2, chart, &nodes, shift);
    let mut shift = vec![0; chart.dim()];
    let combos: usize = periodic.iter().map(|&k| chart.axis(k).count).product();
    let mut best = fit(&shift);
    if combos.saturating_mul(nodes.len()) <= EXHAUSTIVE_BUDGET {
        for c in 0..combos {
            let mut rest = c;
            let mut trial = vec![0; chart.dim()];
            for &k in &periodic {
                trial[k] = rest % chart.axis(k).count;
                rest /= chart.axis(k).count;
            }
            let f = fit(&trial);
            if f.score() < best.score() {
                best = f;
                shift = trial;
            }
        }
    } else {
        for _ in 0..4 {
            let mut moved = false;
            for &k in &periodic {
                for s in 0..chart.axis(k).count {
                    let mut trial = shift.clone();
                    trial[k] = s;
                    let f = fit(&trial);
                    if f.score() < best.score() {
                        best = f;
                        shift = trial;
                        moved = true;
                    }
                }
            }
            if !moved {
                break;
            }
        }
    }
    Ok(Breather {
        whole: BlockBreather::classify(best.whole.0, best.whole.1),
        h: BlockBreather::classify(best.h.0, best.h.1),
        v: BlockBreather::classify(best.v.0, best.v.1),
        shift,
    })
}

/// `(beta, residual)` for the whole metric and each block at one shift.
struct Fit {
    whole: (f64, f64),
    h: (f64, f64),
    v: (f64, f64),
}

impl Fit {
    fn new(g1: &DMetric, g2: &DMetric, chart: &GridChart, nodes: &[usize], shift: &[usize]) -> Self {
        let moved: Vec<usize> = nodes
            .iter()
            .map(|&p| {
                let pos: Vec<usize> = chart
                    .position(p)
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (i + shift[k]) % chart.axis(k).count)
                    .collect();
                chart.node(&pos)
            })
            .collect();
        // sums of a.a, a.b, b.b per block
        let sums = |a: &crate::tensor::Components, b: &crate::tensor::Components| {
            let mut s = [0.0; 3];
            for (fa, fb) in a.fields().iter().zip(b.fields()) {
                for (&p, &q) in nodes.iter().zip(&moved) {
                    s[0] += fa[p] * fa[p];
                    s[1] += fa[p] * fb[q];
                    s[2] += fb[q] * fb[q];
                }
            }
            s
        };
        let solve = |s: [f64; 3]| {
            let beta = s[1] / s[0];
            let misfit = (beta * beta * s[0] - 2.0 * beta * s[1] + s[2]).max(0.0);
            (beta, (misfit / s[0]).sqrt())
        };
        let sh = sums(&g1.h, &g2.h);
        let sv = sums(&g1.v, &g2.v);
        let whole = solve([sh[0] + sv[0], sh[1] + sv[1], sh[2] + sv[2]]);
        Self { whole, h: solve(sh), v: solve(sv) }
    }

    fn score(&self) -> f64 {
        self.h.1 + self.v.1
    }
}
