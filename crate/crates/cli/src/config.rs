//! Scenario files: TOML with one level of sections.
//!
//! ```toml
//! name = "sphere"
//! alpha = 1.0
//!
//! [chart]
//! n = 2
//! m = 1
//! lower = [0.7853981633974483, 0.0, 0.0]
//! upper = [2.356194490192345, 6.283185307179586, 1.0]
//! count = [32, 32, 8]
//! periodic = [false, true, true]
//!
//! [metric]
//! preset = "sphere-h"
//! radius = 1.0
//!
//! [flow]
//! step = 1e-4
//! steps = 50
//! ```
//!
//! Trigonometric rows read `[.., amplitude, phase, k_1 .. k_d]` and add
//! `amplitude * cos(2 pi k.u + phase)`. Polynomial rows read `[i, a, coefficient, p_1 .. p_d]`
//! and add `coefficient * prod u_k^p_k`.

use serde::Deserialize;
use std::f64::consts::TAU;
use std::path::PathBuf;

use fracflow_core::flow::{ConnectionMode, Coupling, FlowConfig, FlowState, Normalization};
use fracflow_core::fraccalc::{AxisGrid, FractionalOrder};
use fracflow_core::geometry::{DMetric, GridChart, NConnectionField};
use fracflow_core::perelman::WForm;
use fracflow_core::scenarios::sphere_metric;

use crate::CliError;

/// Smallest node count per axis accepted for a flow run.
pub const MIN_FLOW_COUNT: usize = 8;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub alpha: f64,
    pub chart: ChartSection,
    #[serde(default)]
    pub metric: MetricSection,
    #[serde(default)]
    pub connection: ConnectionSection,
    #[serde(default)]
    pub potential: PotentialSection,
    pub flow: FlowSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSection {
    pub n: usize,
    pub m: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub count: Vec<usize>,
    #[serde(default)]
    pub periodic: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricPreset {
    #[default]
    Flat,
    SphereH,
    Custom,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    #[serde(default)]
    pub preset: MetricPreset,
    pub radius: Option<f64>,
    /// Rows `[i, j, amplitude, phase, k..]` for `g_ij`, added symmetrically.
    #[serde(default)]
    pub h: Vec<Vec<f64>>,
    /// Rows `[a, b, amplitude, phase, k..]` for `g_ab`.
    #[serde(default)]
    pub v: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectionPreset {
    #[default]
    Zero,
    Constant,
    Polynomial,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSection {
    #[serde(default)]
    pub preset: ConnectionPreset,
    /// `n` rows of `m` values.
    #[serde(default)]
    pub values: Vec<Vec<f64>>,
    /// Rows `[i, a, coefficient, p..]`.
    #[serde(default)]
    pub terms: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    #[serde(default)]
    pub constant: f64,
    /// Rows `[amplitude, phase, k..]`.
    #[serde(default)]
    pub terms: Vec<Vec<f64>>,
    #[serde(default = "one")]
    pub tau: f64,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self { constant: 0.0, terms: Vec::new(), tau: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    #[default]
    Canonical,
    LeviCivita,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationName {
    #[default]
    None,
    /// `lambda = r/5`.
    ROver5,
    /// `lambda = r/(n+m)`.
    Dimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingName {
    #[default]
    Off,
    F,
    W,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub step: f64,
    pub steps: usize,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub normalization: NormalizationName,
    #[serde(default)]
    pub coupling: CouplingName,
    #[serde(default)]
    pub evolve_n: bool,
    #[serde(default)]
    pub w_norm_squared: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub flow: FlowConfig,
    pub initial: FlowState,
    pub output: OutputSection,
}

/// 1-based line of `key` inside `[section]` (or the top level), for diagnostics.
fn locate(src: &str, field: &str) -> Option<usize> {
    let (section, key) = match field.split_once('.') {
        Some((s, k)) => (Some(s), k),
        None => (None, field),
    };
    let key = key.split('[').next().unwrap_or(key);
    let mut current: Option<&str> = None;
    for (no, line) in src.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = Some(name.trim());
            continue;
        }
        let lhs = t.split('=').next().unwrap_or("").trim();
        if current == section && t.contains('=') && lhs == key {
            return Some(no + 1);
        }
    }
    None
}

struct Checker<'a> {
    src: &'a str,
    origin: String,
}

impl Checker<'_> {
    fn fail(&self, field: &str, message: impl std::fmt::Display) -> CliError {
        let at = locate(self.src, field).map(|l| format!(" (line {l})")).unwrap_or_default();
        CliError::Config(format!("{}: field `{field}`{at}: {message}", self.origin))
    }
}

impl ScenarioConfig {
    pub fn parse(src: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(src).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }
}

/// Parses and validates a scenario file.
pub fn load(path: &std::path::Path) -> Result<Scenario, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    build(&src, &path.display().to_string())
}

/// Parses and validates scenario text. `origin` names the source in messages.
pub fn build(src: &str, origin: &str) -> Result<Scenario, CliError> {
    let cfg = ScenarioConfig::parse(src, origin)?;
    let ck = Checker { src, origin: origin.to_string() };
    let order = FractionalOrder::new(cfg.alpha).map_err(|e| ck.fail("alpha", e))?;
    let chart = build_chart(&cfg.chart, &ck)?;
    let g = build_metric(&cfg.metric, &chart, &ck)?;
    let n_conn = build_connection(&cfg.connection, &chart, &ck)?;
    let d = chart.dim();
    for (r, row) in cfg.potential.terms.iter().enumerate() {
        if row.len() != 2 + d {
            return Err(ck.fail(&format!("potential.terms[{r}]"), format!("expected {} numbers, got {}", 2 + d, row.len())));
        }
    }
    let f = chart.sample(|u| cfg.potential.constant + cfg.potential.terms.iter().map(|row| trig(row, u)).sum::<f64>());
    if !(cfg.potential.tau > 0.0 && cfg.potential.tau.is_finite()) {
        return Err(ck.fail("potential.tau", format!("must be positive, got {}", cfg.potential.tau)));
    }
    let initial = FlowState::new(g, n_conn, f, cfg.potential.tau).map_err(|e| ck.fail("potential", e))?;

    let fs = &cfg.flow;
    if !(fs.step > 0.0 && fs.step.is_finite()) {
        return Err(ck.fail("flow.step", format!("must be positive, got {}", fs.step)));
    }
    if fs.steps == 0 {
        return Err(ck.fail("flow.steps", "must be at least 1"));
    }
    let mut flow = FlowConfig::new(order, fs.step, fs.steps);
    flow.mode = match fs.mode {
        ModeName::Canonical => ConnectionMode::Canonical,
        ModeName::LeviCivita => ConnectionMode::LeviCivita,
    };
    flow.normalization = match fs.normalization {
        NormalizationName::None => Normalization::None,
        NormalizationName::ROver5 => Normalization::ROverFive,
        NormalizationName::Dimension => Normalization::Dimension,
    };
    flow.coupling = match fs.coupling {
        CouplingName::Off => Coupling::Off,
        CouplingName::F => Coupling::F,
        CouplingName::W => Coupling::W,
    };
    flow.evolve_n = fs.evolve_n;
    flow.w_form = if fs.w_norm_squared { WForm::NormSquared } else { WForm::AsPrinted };
    if flow.evolve_n && flow.mode != ConnectionMode::LeviCivita {
        return Err(ck.fail("flow.evolve_n", "N evolution needs mode = \"levi-civita\""));
    }
    flow.validate().map_err(|e| ck.fail("flow", e))?;
    Ok(Scenario { name: cfg.name, flow, initial, output: cfg.output })
}

fn build_chart(c: &ChartSection, ck: &Checker) -> Result<GridChart, CliError> {
    if c.n == 0 {
        return Err(ck.fail("chart.n", "needs at least one horizontal axis"));
    }
    if c.m == 0 {
        return Err(ck.fail("chart.m", "needs at least one vertical axis"));
    }
    let d = c.n + c.m;
    for (name, len) in [("chart.lower", c.lower.len()), ("chart.upper", c.upper.len()), ("chart.count", c.count.len())] {
        if len != d {
            return Err(ck.fail(name, format!("expected {d} entries (n + m), got {len}")));
        }
    }
    if !c.periodic.is_empty() && c.periodic.len() != d {
        return Err(ck.fail("chart.periodic", format!("expected {d} entries (n + m), got {}", c.periodic.len())));
    }
    let mut axes = Vec::with_capacity(d);
    for k in 0..d {
        if c.count[k] < MIN_FLOW_COUNT {
            return Err(ck.fail("chart.count", format!("axis {k} has {} nodes, flow runs need at least {MIN_FLOW_COUNT}", c.count[k])));
        }
        if !(c.lower[k].is_finite() && c.upper[k].is_finite() && c.lower[k] < c.upper[k]) {
            return Err(ck.fail("chart.upper", format!("axis {k}: need lower < upper, got [{}, {}]", c.lower[k], c.upper[k])));
        }
        let axis = if c.periodic.get(k).copied().unwrap_or(false) {
            AxisGrid::periodic(c.lower[k], c.upper[k], c.count[k])
        } else {
            AxisGrid::new(c.lower[k], c.upper[k], c.count[k])
        };
        axes.push(axis.map_err(|e| ck.fail("chart", e))?);
    }
    GridChart::new(c.n, c.m, axes).map_err(|e| ck.fail("chart", e))
}

/// `amplitude * cos(2 pi k.u + phase)` from `[amplitude, phase, k..]`.
fn trig(row: &[f64], u: &[f64]) -> f64 {
    let phase = TAU * row[2..].iter().zip(u).map(|(k, x)| k * x).sum::<f64>() + row[1];
    row[0] * phase.cos()
}

fn index(v: f64, dim: usize, field: &str, ck: &Checker) -> Result<usize, CliError> {
    if v >= 0.0 && v.fract() == 0.0 && (v as usize) < dim {
        Ok(v as usize)
    } else {
        Err(ck.fail(field, format!("index {v} is not an integer in 0..{dim}")))
    }
}

/// Checks `[p, q, amplitude, phase, k..]` rows and returns their index pairs.
fn trig_rows(rows: &[Vec<f64>], block: usize, d: usize, field: &str, ck: &Checker) -> Result<Vec<(usize, usize)>, CliError> {
    rows.iter()
        .enumerate()
        .map(|(r, row)| {
            let name = format!("{field}[{r}]");
            if row.len() != 4 + d {
                return Err(ck.fail(&name, format!("expected {} numbers, got {}", 4 + d, row.len())));
            }
            Ok((index(row[0], block, &name, ck)?, index(row[1], block, &name, ck)?))
        })
        .collect()
}

fn build_metric(s: &MetricSection, chart: &GridChart, ck: &Checker) -> Result<DMetric, CliError> {
    match s.preset {
        MetricPreset::Flat => Ok(DMetric::flat(chart)),
        MetricPreset::SphereH => {
            if chart.h_dim() != 2 {
                return Err(ck.fail("metric.preset", "sphere-h needs n = 2 (theta, phi)"));
            }
            let theta = chart.axis(0);
            let top = theta.node(theta.count - 1);
            if !(theta.lower > 0.0 && top < std::f64::consts::PI) {
                return Err(ck.fail("chart.lower", "sphere-h needs the theta axis strictly inside (0, pi)"));
            }
            let r = s.radius.unwrap_or(1.0);
            if !(r > 0.0 && r.is_finite()) {
                return Err(ck.fail("metric.radius", format!("must be positive, got {r}")));
            }
            sphere_metric(chart, r).map_err(|e| ck.fail("metric", e))
        }
        MetricPreset::Custom => {
            let d = chart.dim();
            let hi = trig_rows(&s.h, chart.h_dim(), d, "metric.h", ck)?;
            let vi = trig_rows(&s.v, chart.v_dim(), d, "metric.v", ck)?;
            let sum = |rows: &[Vec<f64>], idx: &[(usize, usize)], p: usize, q: usize, u: &[f64]| {
                rows.iter()
                    .zip(idx)
                    .filter(|(_, &(a, b))| (a, b) == (p, q) || (b, a) == (p, q))
                    .map(|(row, _)| trig(&row[2..], u))
                    .sum::<f64>()
            };
            DMetric::from_fn(chart, |i, j, u| sum(&s.h, &hi, i, j, u), |a, b, u| sum(&s.v, &vi, a, b, u))
                .map_err(|e| ck.fail("metric", e))
        }
    }
}

fn build_connection(s: &ConnectionSection, chart: &GridChart, ck: &Checker) -> Result<NConnectionField, CliError> {
    let (n, m, d) = (chart.h_dim(), chart.v_dim(), chart.dim());
    match s.preset {
        ConnectionPreset::Zero => Ok(NConnectionField::zero(chart)),
        ConnectionPreset::Constant => {
            if s.values.len() != n || s.values.iter().any(|r| r.len() != m) {
                return Err(ck.fail("connection.values", format!("expected {n} rows of {m} values")));
            }
            NConnectionField::from_fn(chart, |i, a, _| s.values[i][a]).map_err(|e| ck.fail("connection", e))
        }
        ConnectionPreset::Polynomial => {
            let mut idx = Vec::with_capacity(s.terms.len());
            for (r, row) in s.terms.iter().enumerate() {
                let name = format!("connection.terms[{r}]");
                if row.len() != 3 + d {
                    return Err(ck.fail(&name, format!("expected {} numbers, got {}", 3 + d, row.len())));
                }
                if row[3..].iter().any(|p| !(*p >= 0.0 && p.fract() == 0.0)) {
                    return Err(ck.fail(&name, "powers must be non-negative integers"));
                }
                idx.push((index(row[0], n, &name, ck)?, index(row[1], m, &name, ck)?));
            }
            NConnectionField::from_fn(chart, |i, a, u| {
                s.terms
                    .iter()
                    .zip(&idx)
                    .filter(|(_, &k)| k == (i, a))
                    .map(|(row, _)| row[2] * row[3..].iter().zip(u).map(|(p, x)| x.powi(*p as i32)).product::<f64>())
                    .sum()
            })
            .map_err(|e| ck.fail("connection", e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"
name = "flat"
alpha = 0.7

[chart]
n = 2
m = 1
lower = [0.0, 0.0, 0.0]
upper = [1.0, 1.0, 1.0]
count = [8, 8, 8]
periodic = [true, true, true]

[flow]
step = 1e-3
steps = 10
"#;

    #[test]
    fn minimal_file_uses_defaults() {
        let s = build(FLAT, "flat.toml").unwrap();
        assert_eq!(s.name, "flat");
        assert_eq!(s.flow.mode, ConnectionMode::Canonical);
        assert_eq!(s.flow.coupling, Coupling::Off);
        assert_eq!(s.output.format, Format::Csv);
        assert_eq!(s.initial.g, DMetric::flat(s.initial.chart()));
        assert_eq!(s.initial.tau, 1.0);
    }

    #[test]
    fn bad_alpha_names_field_and_line() {
        let src = FLAT.replace("alpha = 0.7", "alpha = 1.5");
        let msg = build(&src, "x.toml").unwrap_err().to_string();
        assert!(msg.contains("`alpha`") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn syntax_and_unknown_keys_report_lines() {
        let msg = build(&FLAT.replace("steps = 10", "steps = ten"), "x.toml").unwrap_err().to_string();
        assert!(msg.contains("line 15"), "{msg}");
        let msg = build(&FLAT.replace("steps = 10", "steps = 10\nstpe = 1"), "x.toml").unwrap_err().to_string();
        assert!(msg.contains("stpe") && msg.contains("line 16"), "{msg}");
    }

    #[test]
    fn small_grids_and_shapes_are_rejected() {
        let msg = build(&FLAT.replace("[8, 8, 8]", "[8, 4, 8]"), "x.toml").unwrap_err().to_string();
        assert!(msg.contains("chart.count") && msg.contains("line 10"), "{msg}");
        let msg = build(&FLAT.replace("[8, 8, 8]", "[8, 8]"), "x.toml").unwrap_err().to_string();
        assert!(msg.contains("chart.count"), "{msg}");
    }

    #[test]
    fn custom_metric_and_connections() {
        let src = format!(
            "{FLAT}\n[metric]\npreset = \"custom\"\nh = [[0, 0, 1, 0, 0, 0, 0], [1, 1, 1, 0, 0, 0, 0], [0, 1, 0.1, 0, 1, 0, 0]]\nv = [[0, 0, 2, 0, 0, 0, 0]]\n\n[connection]\npreset = \"polynomial\"\nterms = [[1, 0, 0.5, 1, 0, 2]]\n"
        );
        let s = build(&src, "x.toml").unwrap();
        let chart = s.initial.chart().clone();
        let p = chart.node(&[2, 3, 4]);
        let u = chart.coords(p);
        assert!((s.initial.g.h.at(&[0, 1], p) - 0.1 * (TAU * u[0]).cos()).abs() < 1e-15);
        assert_eq!(s.initial.g.h.at(&[1, 0], p), s.initial.g.h.at(&[0, 1], p));
        assert_eq!(s.initial.g.v.at(&[0, 0], p), 2.0);
        assert!((s.initial.n_conn.get(1, 0)[p] - 0.5 * u[0] * u[2] * u[2]).abs() < 1e-15);
        assert_eq!(s.initial.n_conn.get(0, 0)[p], 0.0);

        let src = format!("{FLAT}\n[connection]\npreset = \"constant\"\nvalues = [[0.1], [0.2]]\n");
        let s = build(&src, "x.toml").unwrap();
        assert!(s.initial.n_conn.get(1, 0).iter().all(|&v| v == 0.2));
        let bad = format!("{FLAT}\n[connection]\npreset = \"constant\"\nvalues = [[0.1]]\n");
        assert!(build(&bad, "x.toml").unwrap_err().to_string().contains("connection.values"));
    }

    #[test]
    fn unknown_preset_is_a_parse_error() {
        let src = format!("{FLAT}\n[metric]\npreset = \"hyperbolic\"\n");
        let msg = build(&src, "x.toml").unwrap_err().to_string();
        assert!(msg.contains("hyperbolic") && msg.contains("line 18"), "{msg}");
    }

    #[test]
    fn evolve_n_needs_levi_civita() {
        let src = FLAT.replace("steps = 10", "steps = 10\nevolve_n = true");
        assert!(build(&src, "x.toml").unwrap_err().to_string().contains("flow.evolve_n"));
        let src = FLAT.replace("steps = 10", "steps = 10\nevolve_n = true\nmode = \"levi-civita\"");
        assert!(build(&src, "x.toml").is_ok());
    }
}
