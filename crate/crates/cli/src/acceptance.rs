//! Acceptance suite shared by `fracflow selftest` and the `acceptance` test target.
//!
//! Numbered criteria decide the exit status. Invariant lines are printed as well but are
//! informational; one of them is known to fail (see its title).

use std::f64::consts::TAU;
use std::fmt;
use std::time::Instant;

use fracflow_core::connection::*;
use fracflow_core::flow::*;
use fracflow_core::fraccalc::{caputo_left, fundamental_theorem_residual, AxisGrid, FractionalOrder, SampledCurve};
use fracflow_core::geometry::{vielbein, DMetric, GridChart, NConnectionField};
use fracflow_core::perelman::*;
use fracflow_core::scenarios::*;
use fracflow_core::tensor::Components;
use fracflow_core::Result;
use fracflow_oracle::{christoffel_ref, gamma_ref};

/// Wall-clock budget of the whole suite, in seconds.
pub const TIME_BUDGET: f64 = 120.0;

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Corrupts the canonical coefficients used by the connection criteria.
    pub mutation: CanonicalMutation,
}

#[derive(Debug, Clone)]
pub struct Line {
    /// Criterion number, or `None` for an informational invariant.
    pub criterion: Option<u32>,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let label = match self.criterion {
            Some(k) => format!("criterion {k:>2}"),
            None => "invariant   ".to_string(),
        };
        write!(f, "[{tag}] {label}  {:<40} {} ({:.2} s)", self.title, self.detail, self.seconds)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub lines: Vec<Line>,
    pub seconds: f64,
}

impl Report {
    /// True when every numbered criterion passed.
    pub fn passed(&self) -> bool {
        self.lines.iter().filter(|l| l.criterion.is_some()).all(|l| l.passed)
    }

    pub fn criterion(&self, k: u32) -> Option<&Line> {
        self.lines.iter().find(|l| l.criterion == Some(k))
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

type Check = fn(&Options) -> Result<Outcome>;

const CRITERIA: [(u32, &str, Check); 14] = [
    (1, "Caputo power rule", power_rule),
    (2, "constant annihilation", constant_annihilation),
    (3, "fundamental theorem", fundamental_theorem),
    (4, "canonical torsion", canonical_torsion),
    (5, "metricity identity", metricity),
    (6, "integer reduction on the sphere", sphere_reduction),
    (7, "distortion consistency", distortion_consistency),
    (8, "flat fixed point", flat_fixed_point),
    (9, "sphere shrink", sphere_shrink),
    (10, "fractional IVP oracle", ivp_oracle),
    (11, "F monotonicity", f_monotonicity),
    (12, "first variation", first_variation),
    (13, "mu normalization", mu_normalization),
    (14, "thermodynamics", thermodynamics_sanity),
];

const INVARIANTS: [(&str, Check); 8] = [
    ("Leibniz rule fails", leibniz_failure),
    ("frame duality", frame_duality),
    ("curvature antisymmetry", curvature_antisymmetry),
    ("integer flow is Heun", heun_consistency),
    ("step refinement order", step_refinement),
    ("monotone integrands", monotone_integrands),
    ("symmetry and constraint", symmetry_and_constraint),
    ("first variation, alpha 0.5 (known gap)", fractional_first_variation),
];

/// Runs the suite on a single worker thread, calling `on_line` as each line completes.
pub fn run(opts: &Options, mut on_line: impl FnMut(&Line) + Send) -> Report {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("single-thread pool");
    pool.install(|| {
        let start = Instant::now();
        let mut lines = Vec::new();
        let mut record = |criterion: Option<u32>, title: &'static str, check: Check| {
            let t = Instant::now();
            let (passed, detail) = match check(opts) {
                Ok(o) => (o.passed, o.detail),
                Err(e) => (false, format!("error: {e}")),
            };
            let line = Line { criterion, title, passed, detail, seconds: t.elapsed().as_secs_f64() };
            on_line(&line);
            lines.push(line);
        };
        for (k, title, check) in CRITERIA {
            record(Some(k), title, check);
        }
        for (title, check) in INVARIANTS {
            record(None, title, check);
        }
        let seconds = start.elapsed().as_secs_f64();
        let line = Line {
            criterion: Some(15),
            title: "suite runtime, one thread",
            passed: seconds < TIME_BUDGET,
            detail: format!("{seconds:.1} s (< {TIME_BUDGET} s)"),
            seconds,
        };
        on_line(&line);
        lines.push(line);
        Report { lines, seconds }
    })
}

fn e(x: f64) -> String {
    format!("{x:.2e}")
}

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).expect("order in (0, 1]")
}

fn unit(count: usize) -> Result<AxisGrid> {
    AxisGrid::new(0.0, 1.0, count)
}

fn power_error(count: usize) -> Result<f64> {
    let f = SampledCurve::from_fn(unit(count)?, |x| x * x)?;
    let d = caputo_left(&f, order(0.5))?;
    let c = gamma_ref(3.0) / gamma_ref(2.5);
    Ok(f.grid
        .nodes()
        .iter()
        .zip(&d.values)
        .filter(|(x, _)| **x >= 0.05)
        .map(|(x, v)| (v / (c * x.powf(1.5)) - 1.0).abs())
        .fold(0.0, f64::max))
}

fn power_rule(_: &Options) -> Result<Outcome> {
    let t = Instant::now();
    let coarse = power_error(1024)?;
    let secs = t.elapsed().as_secs_f64();
    let fine = power_error(2048)?;
    let (ratio, need) = (coarse / fine, 2f64.powf(1.4));
    outcome(
        coarse <= 1e-3 && ratio >= need && secs < 1.0,
        format!("rel err {} <= 1e-3, refinement ratio {ratio:.2} >= {need:.2}, 1024 nodes in {secs:.3} s", e(coarse)),
    )
}

fn constant_annihilation(_: &Options) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in [0.3, 0.5, 0.8] {
        let c = SampledCurve::from_fn(unit(1024)?, |_| 1.7)?;
        worst = caputo_left(&c, order(a))?.values.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    outcome(worst <= 1e-14, format!("max |D c| {} <= 1e-14 for alpha 0.3, 0.5, 0.8", e(worst)))
}

fn fundamental_theorem(_: &Options) -> Result<Outcome> {
    let mut res = Vec::new();
    for k in [128, 256, 512, 1024] {
        res.push(fundamental_theorem_residual(&SampledCurve::from_fn(unit(k)?, |x| x.powf(1.5))?, order(0.5))?);
    }
    let monotone = res.windows(2).all(|w| w[1] < w[0]);
    let text: Vec<String> = res.iter().map(|&r| e(r)).collect();
    outcome(res[3] <= 1e-3 && monotone, format!("residuals {} (128..1024 nodes), last <= 1e-3, decreasing", text.join(" > ")))
}

/// Random smooth `(g, N)` on a 16^3 box for the connection criteria.
fn random_geometry(a: f64) -> Result<DGeometry> {
    let chart = unit_box(2, 1, 16)?;
    let (g, n) = SmoothFields::random(2, 1, 41).build(&chart)?;
    DGeometry::new(&g, &n, order(a))
}

fn canonical_torsion(opts: &Options) -> Result<Outcome> {
    let (mut hhh, mut vvv): (f64, f64) = (0.0, 0.0);
    for a in [0.5, 1.0] {
        let geo = random_geometry(a)?;
        let t = torsion_with(&canonical_mutated(&geo, opts.mutation), &geo.anholonomy);
        hhh = hhh.max(t.hhh.max_abs());
        vvv = vvv.max(t.vvv.max_abs());
    }
    outcome(hhh <= 1e-12 && vvv <= 1e-12, format!("max |T^i_jk| {}, max |T^a_bc| {} <= 1e-12 (alpha 0.5, 1; 16^3)", e(hhh), e(vvv)))
}

fn metricity(opts: &Options) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0] {
        let geo = random_geometry(a)?;
        worst = worst.max(metricity_with(&canonical_mutated(&geo, opts.mutation), &geo));
    }
    outcome(worst <= 1e-10, format!("residual {} <= 1e-10 (alpha 0.5, 1; 16^3)", e(worst)))
}

fn sphere_reduction(opts: &Options) -> Result<Outcome> {
    let chart = sphere_chart(64, 3)?;
    let g = sphere_metric(&chart, 1.0)?;
    let n = NConnectionField::zero(&chart);
    let geo = DGeometry::new(&g, &n, FractionalOrder::integer())?;
    let gamma = canonical_mutated(&geo, opts.mutation);
    let metric = |u: &[f64]| vec![vec![1.0, 0.0, 0.0], vec![0.0, u[0].sin().powi(2), 0.0], vec![0.0, 0.0, 1.0]];
    let interior = chart.interior(2);
    let mut christoffel: f64 = 0.0;
    for &p in &interior {
        let reference = christoffel_ref(metric, &chart.coords(p), 1e-5);
        for x in gamma.l_h.indices() {
            christoffel = christoffel.max((gamma.l_h.at(&x, p) - reference[x[0]][x[1]][x[2]]).abs());
        }
    }
    let ric = ricci_contract(&curvature_with(&gamma, &geo));
    let (r, _) = scalar_curvature(&g, &ric)?;
    let dev = interior.iter().map(|&p| (r[p] - 2.0).abs()).fold(0.0, f64::max);
    outcome(
        dev <= 2e-3 && christoffel <= 1e-3,
        format!("max |R - 2| {} <= 2e-3, Christoffel err {} <= 1e-3 (64^2 interior)", e(dev), e(christoffel)),
    )
}

fn distortion_consistency(_: &Options) -> Result<Outcome> {
    let count = 41;
    let chart = unit_box(2, 1, count)?;
    let fields = SmoothFields::random(2, 1, 13);
    let (g, n) = fields.build(&chart)?;
    let z = levi_civita_distortion(&g, &n, FractionalOrder::integer())?;
    let coord = push_to_coordinates(&z.levi_civita, &n, FractionalOrder::integer());
    let mut err: f64 = 0.0;
    for p in chart.interior(2) {
        let reference = christoffel_ref(|u| fields.coordinate_metric(u), &chart.coords(p), 1e-5);
        for x in coord.indices() {
            err = err.max((coord.at(&x, p) - reference[x[0]][x[1]][x[2]]).abs());
        }
    }
    outcome(err <= 1e-3, format!("max err {} <= 1e-3 ({count}^3 interior)", e(err)))
}

fn frozen(g: DMetric, f: Vec<f64>) -> Result<FlowState> {
    let chart = g.chart.clone();
    FlowState::new(g, NConnectionField::zero(&chart), f, 1.0)
}

fn flat(chart: &GridChart) -> Result<FlowState> {
    frozen(DMetric::flat(chart), vec![0.0; chart.len()])
}

fn all_records(run: &FlowRun) -> Vec<StepRecord> {
    std::iter::once(run.initial).chain(run.records.iter().copied()).collect()
}

/// Fails on an early stop so a partial run cannot pass a criterion.
fn complete(run: FlowRun) -> Result<FlowRun> {
    match run.stopped {
        Some(e) => Err(e),
        None => Ok(run),
    }
}

fn flat_fixed_point(_: &Options) -> Result<Outcome> {
    let chart = unit_torus(2, 1, 8)?;
    let (mut drift, mut f_max): (f64, f64) = (0.0, 0.0);
    for a in [0.7, 1.0] {
        let run = complete(evolve(&FlowConfig::new(order(a), 1e-3, 100), &flat(&chart)?)?)?;
        let (first, last) = (&run.history.first().g, &run.history.last().g);
        drift = drift.max(last.h.sub(&first.h).max_abs().max(last.v.sub(&first.v).max_abs()));
        f_max = all_records(&run).iter().fold(f_max, |m, r| m.max(r.f_functional.abs()));
    }
    outcome(drift <= 1e-8 && f_max <= 1e-10, format!("|g - g0| {} <= 1e-8, |F| {} <= 1e-10 (alpha 0.7, 1; 100 steps)", e(drift), e(f_max)))
}

fn sphere_shrink(_: &Options) -> Result<Outcome> {
    let chart = sphere_chart(32, 3)?;
    let g = sphere_metric(&chart, 1.0)?;
    let run = complete(evolve(&FlowConfig::new(FractionalOrder::integer(), 1e-4, 50), &frozen(g, vec![0.0; chart.len()])?)?)?;
    let mut worst: f64 = 0.0;
    for entry in &run.history.entries {
        let r2 = 1.0 - 2.0 * entry.chi;
        for p in chart.interior(2) {
            let s2 = chart.coords(p)[0].sin().powi(2);
            let h = &entry.state.g.h;
            worst = worst.max((h.at(&[0, 0], p) / r2 - 1.0).abs()).max((h.at(&[1, 1], p) / (r2 * s2) - 1.0).abs());
        }
    }
    outcome(worst <= 1e-2, format!("max |g / (1 - 2 chi) g0 - 1| {} <= 1e-2 (50 steps of 1e-4)", e(worst)))
}

fn ivp_oracle(_: &Options) -> Result<Outcome> {
    let a = 0.5;
    let c = gamma_ref(a + 1.0);
    let mut rhs = |_: &[Vec<f64>], _: f64, _: &[f64]| Ok(vec![c]);
    let mut ivp = FractionalIvp::new(order(a), 1e-2, 0.0, vec![0.0], &mut rhs)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = ivp.step(&mut rhs)?[0];
        worst = worst.max((u - ivp.chi().powf(a)).abs());
    }
    outcome(worst <= 1e-3, format!("max |u - chi^0.5| {} <= 1e-3 over 100 steps", e(worst)))
}

fn perturbed(count: usize) -> Result<FlowState> {
    let chart = unit_torus(2, 1, count)?;
    let f = chart.sample(|u| 0.1 * (TAU * u[0]).cos());
    frozen(perturbed_torus_metric(&chart, 0.05)?, f)
}

fn f_monotonicity(_: &Options) -> Result<Outcome> {
    let mut cfg = FlowConfig::new(FractionalOrder::integer(), 1e-4, 20);
    cfg.coupling = Coupling::F;
    let run = complete(evolve(&cfg, &perturbed(16)?)?)?;
    let (mut min_fd, mut mismatch) = (f64::INFINITY, 0.0f64);
    for w in all_records(&run).windows(2) {
        let fd = (w[1].f_functional - w[0].f_functional) / cfg.step;
        let predicted = 0.5 * (w[0].df_dchi + w[1].df_dchi);
        min_fd = min_fd.min(fd);
        mismatch = mismatch.max((fd - predicted).abs() / predicted.abs());
    }
    outcome(
        min_fd >= -1e-8 && mismatch <= 0.05,
        format!("min dF/dchi {} >= -1e-8, rel gap to integral {} <= 5e-2 (16^3, 20 steps)", e(min_fd), e(mismatch)),
    )
}

fn variation_gap(a: f64, seed: u64) -> Result<f64> {
    let chart = unit_torus(2, 1, 16)?;
    let (g, f) = separable_state(&chart)?;
    let n = NConnectionField::zero(&chart);
    let dir = SeparableDirection::random(2, 1, seed);
    let analytic = first_variation_f(&Evaluation::new(&g, &n, &f, 1.0, order(a))?, &dir.variation(&chart))?;
    let eps = 1e-4;
    let at = |s: f64| -> Result<f64> {
        let (gg, ff) = dir.apply(&g, &f, s)?;
        Ok(functional_f(&Evaluation::new(&gg, &n, &ff, 1.0, order(a))?))
    };
    let fd = (at(eps)? - at(-eps)?) / (2.0 * eps);
    Ok((analytic - fd).abs() / fd.abs())
}

fn first_variation(_: &Options) -> Result<Outcome> {
    let gaps = (1..=3).map(|s| variation_gap(1.0, s)).collect::<Result<Vec<_>>>()?;
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    let text: Vec<String> = gaps.iter().map(|&g| e(g)).collect();
    outcome(worst <= 1e-3, format!("rel gaps {} <= 1e-3 (three seeded directions, 16^3)", text.join(", ")))
}

fn mu_drift(step: f64) -> Result<(f64, f64)> {
    let mut cfg = FlowConfig::new(FractionalOrder::integer(), step, (1e-2 / step).round() as usize);
    cfg.coupling = Coupling::W;
    let run = complete(evolve(&cfg, &perturbed(16)?)?)?;
    let recs = all_records(&run);
    let drift = recs.windows(2).map(|w| (w[1].mu_mass - w[0].mu_mass).abs()).fold(0.0, f64::max);
    Ok(((recs[0].mu_mass - 1.0).abs(), drift))
}

fn mu_normalization(_: &Options) -> Result<Outcome> {
    let (mass, coarse) = mu_drift(1e-3)?;
    let (_, fine) = mu_drift(5e-4)?;
    let ratio = coarse / fine;
    outcome(
        mass <= 1e-10 && coarse <= 1e-4 && ratio >= 1.8,
        format!("|mass - 1| {} <= 1e-10, drift {} <= 1e-4, halving ratio {ratio:.2} >= 1.8", e(mass), e(coarse)),
    )
}

fn thermodynamics_sanity(_: &Options) -> Result<Outcome> {
    let chart = unit_box(2, 1, 9)?;
    let g = DMetric::flat(&chart);
    let o = FractionalOrder::integer();
    let tau = 0.8;
    let f = normalize_potential(&vec![0.25; chart.len()], tau, &VolumeElement::new(&g, o)?)?;
    let t = thermodynamics(&Evaluation::new(&g, &NConnectionField::zero(&chart), &f, tau, o)?)?;
    // constant f on a unit box: mu = 1/V, <E> = tau (n+m)/2, log Z = (n+m)/2 - f
    let (de, dz) = ((t.energy - 1.5 * tau).abs(), (t.log_z - (1.5 - f[0])).abs());
    let mut sigma = t.sigma;
    for a in [0.8, 1.0] {
        let mut cfg = FlowConfig::new(order(a), 1e-4, 10);
        cfg.coupling = Coupling::W;
        let run = complete(evolve(&cfg, &perturbed(10)?)?)?;
        sigma = all_records(&run).iter().fold(sigma, |m, r| m.min(r.sigma));
    }
    outcome(
        de <= 1e-8 && dz <= 1e-8 && sigma >= 0.0,
        format!("|E - E0| {}, |log Z - Z0| {} <= 1e-8; min sigma {} >= 0 over W runs", e(de), e(dz), e(sigma)),
    )
}

fn leibniz_failure(_: &Options) -> Result<Outcome> {
    let a = order(0.5);
    let f = SampledCurve::from_fn(unit(1024)?, |x| x.powf(1.5))?;
    let ff = SampledCurve::from_fn(unit(1024)?, |x| x.powi(3))?;
    let (df, dff) = (caputo_left(&f, a)?, caputo_left(&ff, a)?);
    let gap = (0..1024).map(|k| (dff.values[k] - 2.0 * df.values[k] * f.values[k]).abs()).fold(0.0, f64::max);
    outcome(gap > 0.1, format!("max |D(f^2) - 2 f Df| {} > 0.1", e(gap)))
}

fn frame_duality(_: &Options) -> Result<Outcome> {
    let chart = unit_box(2, 2, 6)?;
    let (_, n) = SmoothFields::random(2, 2, 7).build(&chart)?;
    let v = vielbein(&n);
    let d = chart.dim();
    let prod = Components::from_fn(&[d, d], chart.len(), |x, p| {
        (0..d).map(|k| v.forward.at(&[x[0], k], p) * v.inverse.at(&[k, x[1]], p)).sum::<f64>() - if x[0] == x[1] { 1.0 } else { 0.0 }
    });
    let err = prod.max_abs();
    outcome(err <= 1e-12, format!("max |F F^-1 - I| {} <= 1e-12", e(err)))
}

fn curvature_antisymmetry(_: &Options) -> Result<Outcome> {
    let chart = unit_box(2, 1, 8)?;
    let (g, n) = SmoothFields::random(2, 1, 5).build(&chart)?;
    let geo = DGeometry::new(&g, &n, order(0.5))?;
    let r = curvature_with(&canonical(&geo), &geo);
    let mut worst: f64 = 0.0;
    for block in [&r.hhhh, &r.hhvv, &r.vvvv] {
        for p in 0..chart.len() {
            for x in block.indices() {
                worst = worst.max((block.at(&x, p) + block.at(&[x[0], x[1], x[3], x[2]], p)).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max |R + R(swapped)| {} <= 1e-12 (alpha 0.5)", e(worst)))
}

fn heun_consistency(_: &Options) -> Result<Outcome> {
    let chart = sphere_chart(16, 3)?;
    let g0 = sphere_metric(&chart, 1.0)?;
    let zero = vec![0.0; chart.len()];
    let n = NConnectionField::zero(&chart);
    let o = FractionalOrder::integer();
    let dt = 1e-3;
    let run = complete(evolve(&FlowConfig::new(o, dt, 5), &frozen(g0.clone(), zero.clone())?)?)?;
    let rate = |g: &DMetric| -> Result<Components> {
        Ok(hamilton_rhs_canonical(&Evaluation::new(g, &n, &zero, 1.0, o)?, Normalization::None, None)?.h)
    };
    let shift = |g: &DMetric, r: &Components, s: f64| {
        let h = Components::from_fn(&[2, 2], chart.len(), |x, p| g.h.at(x, p) + s * r.at(x, p));
        DMetric::new(chart.clone(), h, g.v.clone())
    };
    let (mut g, mut worst) = (g0, 0.0f64);
    for k in 1..=5 {
        let r0 = rate(&g)?;
        let r1 = rate(&shift(&g, &r0, dt)?)?;
        g = shift(&shift(&g, &r0, 0.5 * dt)?, &r1, 0.5 * dt)?;
        worst = worst.max(run.history.entries[k].state.g.h.sub(&g.h).max_abs());
    }
    outcome(worst <= 1e-6, format!("max per-step gap {} <= 1e-6 (sphere 16^2, alpha 1)", e(worst)))
}

/// Final metric after `span` with step `span / steps`.
fn torus_end(a: f64, span: f64, steps: usize) -> Result<DMetric> {
    let chart = unit_torus(2, 1, 8)?;
    let s = frozen(perturbed_torus_metric(&chart, 0.05)?, vec![0.0; chart.len()])?;
    let run = complete(evolve(&FlowConfig::new(order(a), span / steps as f64, steps), &s)?)?;
    Ok(run.history.last().g.clone())
}

fn step_refinement(_: &Options) -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    // short spans: at alpha < 1 the lagged one-sided second differences let high modes grow
    for (a, span, need) in [(1.0, 1e-2, 2.0), (0.5, 1e-4, 1.0)] {
        let g: Vec<DMetric> = [5, 10, 20].iter().map(|&k| torus_end(a, span, k)).collect::<Result<_>>()?;
        let (d1, d2) = (g[0].h.sub(&g[1].h).max_abs(), g[1].h.sub(&g[2].h).max_abs());
        let p = (d1 / d2).log2();
        ok &= p >= need;
        parts.push(format!("alpha {a}: order {p:.2} >= {need}"));
    }
    outcome(ok, format!("{} (perturbed torus 8^3)", parts.join(", ")))
}

fn monotone_integrands(_: &Options) -> Result<Outcome> {
    let (mut df, mut dw) = (f64::INFINITY, f64::INFINITY);
    for (a, coupling) in [(1.0, Coupling::F), (0.7, Coupling::W)] {
        let mut cfg = FlowConfig::new(order(a), 1e-4, 10);
        cfg.coupling = coupling;
        for r in all_records(&complete(evolve(&cfg, &perturbed(10)?)?)?) {
            df = df.min(r.df_dchi);
            dw = dw.min(r.dw_dchi);
        }
    }
    outcome(df >= -1e-12 && dw >= -1e-12, format!("min dF integral {}, min dW integral {} >= -1e-12", e(df), e(dw)))
}

fn symmetry_and_constraint(_: &Options) -> Result<Outcome> {
    let mut cfg = FlowConfig::new(order(0.8), 1e-4, 10);
    cfg.coupling = Coupling::W;
    let recs = all_records(&complete(evolve(&cfg, &perturbed(10)?)?)?);
    let asym = recs.iter().map(|r| r.asymmetry).fold(0.0, f64::max);
    let constraint = recs.iter().map(|r| r.constraint_residual).fold(0.0, f64::max);
    outcome(
        asym <= 1e-12 && constraint <= 1e-10,
        format!("asymmetry {} <= 1e-12, mixed Ricci {} <= 1e-10 (product metric)", e(asym), e(constraint)),
    )
}

fn fractional_first_variation(_: &Options) -> Result<Outcome> {
    let gaps = (1..=3).map(|s| variation_gap(0.5, s)).collect::<Result<Vec<_>>>()?;
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    outcome(worst <= 1e-3, format!("max rel gap {} <= 1e-3; a left-sided derivative is not self-adjoint", e(worst)))
}

