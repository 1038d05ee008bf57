//! Named verification runs.
//!
//! Each check draws its samples from a seeded ChaCha stream, evaluates a set
//! of gates (`value ≤ tol`) and returns a report whose JSON form depends
//! only on the context. Reals in reports are 17-digit decimal strings.

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{self, q, q_frac, q_from_f64, q_to_f64, Q};
use crate::fd::FdConfig;
use crate::flows::{self, CotangentPoint, Lamination, Side};
use crate::lorentz::{self, Cocycle};
use crate::mat2::RMat;
use crate::serial::real_to_string;
use crate::surface::{CurveRef, WeightedMulticurve};
use crate::symplectic::{
    self, ChartedMap, ConstantForm, GoldmanForm, GoldmanKind, HolonomyChart, PullbackReport,
};
use crate::teich::{
    self, cocycle_length, fn_holonomy, panel_distance, spiral_charts, trace_length, CocycleChart, FnChart,
    FnCoordinates, ShearChart, TeichPoint,
};
use crate::testbed::Testbed;
use crate::traintrack::{self, TrainTrack, WeightSystem};

pub const CHECKS: [&str; 10] = [
    "de-linear-identity",
    "de-factor-2",
    "length-consistency",
    "flow-property",
    "mess-round-trip",
    "mink-cocycle",
    "goldman-gates",
    "grafting-symplecto",
    "wick-ads-composition",
    "construction-health",
];

/// Inputs shared by all checks.
#[derive(Clone, Debug)]
pub struct CheckContext {
    pub seed: u64,
    /// Overrides each check's default sample count.
    pub trials: Option<usize>,
    pub fd: FdConfig,
    /// Overrides the tolerance of each check's headline gate.
    pub tol: Option<f64>,
    pub t11: Testbed,
    pub g2: Testbed,
    pub onesw: Testbed,
}

impl Default for CheckContext {
    fn default() -> Self {
        Self {
            seed: 7,
            trials: None,
            fd: FdConfig::default(),
            tol: None,
            t11: Testbed::t11(),
            g2: Testbed::g2(),
            onesw: Testbed::onesw(),
        }
    }
}

impl CheckContext {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }

    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    #[serde(with = "crate::serial::real")]
    pub value: f64,
    #[serde(with = "crate::serial::real")]
    pub tol: f64,
    pub passed: bool,
}

impl Gate {
    pub fn new(name: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tol,
            passed: value <= tol,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub seed: u64,
    pub fd: FdConfig,
    pub gates: Vec<Gate>,
    pub details: Value,
}

impl CheckReport {
    fn new(name: &str, ctx: &CheckContext, gates: Vec<Gate>, details: Value) -> Self {
        Self {
            check: name.into(),
            passed: gates.iter().all(|g| g.passed),
            seed: ctx.seed,
            fd: ctx.fd,
            gates,
            details,
        }
    }

    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.gates.iter().filter(|g| !g.passed).map(|g| g.name.as_str()).collect()
    }
}

pub fn run_check(name: &str, ctx: &CheckContext) -> Result<CheckReport> {
    match name {
        "de-linear-identity" => de_linear_identity(ctx),
        "de-factor-2" => de_factor_2(ctx),
        "length-consistency" => length_consistency(ctx),
        "flow-property" => flow_property(ctx),
        "mess-round-trip" => mess_round_trip(ctx),
        "mink-cocycle" => mink_cocycle(ctx),
        "goldman-gates" => goldman_gates(ctx),
        "grafting-symplecto" => grafting_symplecto(ctx),
        "wick-ads-composition" => wick_ads_composition(ctx),
        "construction-health" => construction_health(ctx),
        _ => Err(Error::UnknownCheck(name.into())),
    }
}

fn r(x: f64) -> Value {
    Value::String(real_to_string(x))
}

fn rv(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| r(*x)).collect())
}

fn pullback_json(p: &PullbackReport) -> Value {
    serde_json::to_value(p).expect("reports serialize")
}

// ---------------------------------------------------------------------------
// Sampling

fn rand_q(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Q {
    q_frac(rng.random_range(-num..=num), rng.random_range(1..=den))
}

fn t11_coords(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..2).map(|_| rng.random_range(-1.5..1.5)).collect()
}

fn g2_coords(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..3).map(|_| rng.random_range(0.8..2.5)).collect();
    x.extend((0..3).map(|_| rng.random_range(-1.0..1.0)));
    x
}

fn g2_multicurve(rng: &mut ChaCha8Rng, all: bool) -> Result<WeightedMulticurve> {
    loop {
        let w: Vec<Q> = (0..3)
            .map(|_| {
                if all || rng.random_bool(0.7) {
                    q_frac(rng.random_range(1..=16), 8)
                } else {
                    q(0)
                }
            })
            .collect();
        let l = WeightedMulticurve::pants(&w)?;
        if !l.is_empty() {
            return Ok(l);
        }
    }
}

/// A measure on the t11 dual track: `(a, b, a + b)` with `a, b > 0`.
fn t11_measure(chart: &ShearChart, a: f64, b: f64) -> Result<WeightSystem> {
    let (a, b) = (q_from_f64(a).ok_or(Error::NonFinite(0))?, q_from_f64(b).ok_or(Error::NonFinite(1))?);
    let mut w = traintrack::validate_weights(chart.track(), vec![a.clone(), b.clone(), a + b])?;
    w.realizable = true;
    Ok(w)
}

fn g2_point(chart: &Arc<FnChart>, x: &[f64]) -> Result<TeichPoint> {
    TeichPoint::fn_point(chart.clone(), FnCoordinates::from_flat(x)?)
}

fn pants_weights(l: &Lamination) -> Result<Vec<f64>> {
    match l {
        Lamination::Multicurve(m) => {
            let mut w = vec![0.0; 3];
            for c in m.components() {
                match c.curve {
                    CurveRef::ChartCurve(i) if i < 3 => w[i] = q_to_f64(&c.weight),
                    _ => return Err(Error::NotPantsSupported(c.curve.to_string())),
                }
            }
            Ok(w)
        }
        Lamination::Cocycle(_) => Err(Error::IncompatibleLamination("expected a multicurve".into())),
    }
}

fn weights_to_multicurve(w: &[f64]) -> Result<WeightedMulticurve> {
    let q: Vec<Q> = w
        .iter()
        .enumerate()
        .map(|(i, &x)| q_from_f64(x).ok_or(Error::NonFinite(i)))
        .collect::<Result<_>>()?;
    if let Some(x) = q.iter().find(|x| x.is_negative()) {
        return Err(Error::NonPositiveWeight(exact::q_to_string(x)));
    }
    WeightedMulticurve::pants(&q)
}

// ---------------------------------------------------------------------------
// Chart maps

fn thurston_gram_f64(chart: &ShearChart) -> Result<Vec<Vec<f64>>> {
    let g = traintrack::thurston_gram(chart.track(), &chart.cocycle_basis())?;
    Ok(g.iter().map(|r| r.iter().map(q_to_f64).collect()).collect())
}

/// `𝓔 ∘ δ⁻¹` on the shear chart: `(q, p) ↦ (m_L, m_R)`.
pub fn shear_de_map(chart: &Arc<ShearChart>) -> ChartedMap {
    let n = chart.dim();
    let c = chart.clone();
    ChartedMap::new("E ∘ delta^-1", 2 * n, 2 * n, move |x| {
        let base = flows::shear_point(&c, &x[..n])?;
        let cp = CotangentPoint {
            base,
            covector: x[n..].to_vec(),
            exact: None,
            fd: None,
        };
        let (m, l) = flows::delta_inverse(&cp)?;
        let (a, b) = flows::double_earthquake(&m, &l)?;
        let mut out = a.chart_vector();
        out.extend(b.chart_vector());
        Ok(out)
    })
}

/// `𝒢' = graft ∘ δ⁻¹` on the shear chart: `(q, p) ↦ (re, im)` in reduced
/// coordinates.
pub fn shear_graft_map(chart: &Arc<ShearChart>) -> ChartedMap {
    let n = chart.dim();
    let c = chart.clone();
    ChartedMap::new("graft ∘ delta^-1", 2 * n, 2 * n, move |x| {
        let sigma = c.from_reduced(&x[..n])?;
        let tau = flows::shear_covector_to_cocycle(&c, &x[n..])?;
        let z = flows::graft_shearbend(&c, &sigma, &tau, &q(1))?;
        let re = c.to_reduced(&c.coords(z.re)?).ok_or(Error::TrackMismatch)?;
        let im = c.to_reduced(&c.coords(z.im)?).ok_or(Error::TrackMismatch)?;
        Ok(re.iter().chain(&im).map(q_to_f64).collect())
    })
}

/// `(𝒢')⁻¹` on the shear chart: `(re, im) ↦ (q, p)`.
pub fn shear_ungraft_map(chart: &Arc<ShearChart>) -> ChartedMap {
    let n = chart.dim();
    let c = chart.clone();
    ChartedMap::new("(graft ∘ delta^-1)^-1", 2 * n, 2 * n, move |x| {
        let z = flows::ComplexShearCoordinates {
            re: c.from_reduced(&x[..n])?.values,
            im: c.from_reduced(&x[n..])?.values,
        };
        let (sigma, tau) = flows::ungraft_shearbend(&c, &z, &q(1))?;
        let m = TeichPoint::shear(c.clone(), sigma)?;
        let d = flows::delta(&m, &Lamination::Cocycle(tau), FdConfig::default())?;
        let mut out = m.chart_vector();
        out.extend(d.covector);
        Ok(out)
    })
}

/// `𝓔 ∘ δ⁻¹` on the FN chart, restricted to covectors `Σ pᵢ dℓᵢ`:
/// `(ℓ, τ, p) ↦ (m_L, m_R)`.
pub fn fn_de_map(chart: &Arc<FnChart>) -> ChartedMap {
    let c = chart.clone();
    ChartedMap::new("E ∘ delta^-1", 9, 12, move |x| {
        let base = g2_point(&c, &x[..6])?;
        let mut covector = x[6..].to_vec();
        covector.extend([0.0; 3]);
        let (m, l) = flows::delta_inverse(&CotangentPoint {
            base,
            covector,
            exact: None,
            fd: None,
        })?;
        let (a, b) = flows::double_earthquake(&m, &l)?;
        let mut out = a.chart_vector();
        out.extend(b.chart_vector());
        Ok(out)
    })
}

/// `𝒢' = graft ∘ δ⁻¹` on the FN chart: `(ℓ, τ, p) ↦ (ℓ, τ, w)` with `w`
/// the weights of `δ⁻¹(p)`.
pub fn fn_graft_map(chart: &Arc<FnChart>) -> ChartedMap {
    let c = chart.clone();
    ChartedMap::new("graft ∘ delta^-1", 9, 9, move |x| {
        let base = g2_point(&c, &x[..6])?;
        let mut covector = x[6..].to_vec();
        covector.extend([0.0; 3]);
        let (_, l) = flows::delta_inverse(&CotangentPoint {
            base,
            covector,
            exact: None,
            fd: None,
        })?;
        let mut out = x[..6].to_vec();
        out.extend(pants_weights(&l)?);
        Ok(out)
    })
}

/// `W = 𝓔' ∘ (𝒢')⁻¹` on the FN ℂP chart: `(ℓ, τ, w) ↦ (m_L, m_R)`. The
/// bending weights are the lamination, so `δ` and `δ⁻¹` cancel.
pub fn fn_wick_map(chart: &Arc<FnChart>) -> ChartedMap {
    let c = chart.clone();
    ChartedMap::new("W = E' ∘ G'^-1", 9, 12, move |x| {
        let m = g2_point(&c, &x[..6])?;
        let l = Lamination::Multicurve(weights_to_multicurve(&x[6..])?);
        let a = lorentz::wick_pleated(&m, &l)?;
        let mut out = a.left.chart_vector();
        out.extend(a.right.chart_vector());
        Ok(out)
    })
}

/// Cotangent form restricted to `(ℓ, τ, p_ℓ)`.
fn fn_cotangent_form() -> ConstantForm {
    let mut g = vec![vec![0.0; 9]; 9];
    for i in 0..3 {
        g[i][6 + i] = 1.0;
        g[6 + i][i] = -1.0;
    }
    ConstantForm {
        name: "cotangent (p_tau = 0)".into(),
        gram: g,
    }
}

fn fn_real_builder(chart: &Arc<FnChart>) -> symplectic::RealBuilder {
    let c = chart.clone();
    Arc::new(move |x: &[f64]| {
        let p = FnCoordinates::from_flat(x)?;
        fn_holonomy(&c, &p.lengths, &p.twists)
    })
}

fn fn_complex_form(chart: &Arc<FnChart>, cfg: FdConfig) -> GoldmanForm {
    let c = chart.clone();
    GoldmanForm {
        name: "goldman-tr1".into(),
        dim: 9,
        chart: HolonomyChart::Complex(Arc::new(move |x: &[f64]| {
            let tw: Vec<Complex64> = (0..3).map(|i| Complex64::new(x[3 + i], x[6 + i])).collect();
            fn_holonomy(&c, &x[..3], &tw)
        })),
        cfg,
    }
}

fn fn_ads_form(chart: &Arc<FnChart>, cfg: FdConfig) -> GoldmanForm {
    GoldmanForm {
        name: "goldman-tr-1".into(),
        dim: 12,
        chart: HolonomyChart::Pair {
            builder: fn_real_builder(chart),
            split: 6,
        },
        cfg,
    }
}

fn de_target_form(chart: &ShearChart) -> Result<ConstantForm> {
    let g = thurston_gram_f64(chart)?;
    Ok(ConstantForm::block_sum("thurston ⊕ -thurston", &g, 1.0, &g, -1.0))
}

fn shear_cp_form(chart: &ShearChart) -> Result<ConstantForm> {
    Ok(ConstantForm::imaginary_part("Im thurston^C", &thurston_gram_f64(chart)?))
}

/// Samples `(q, p)` with `p = δ(m, τ)` for a positive measure `τ`.
fn shear_cotangent_samples(chart: &Arc<ShearChart>, rng: &mut ChaCha8Rng, k: usize) -> Result<Vec<Vec<f64>>> {
    (0..k)
        .map(|_| {
            let x = t11_coords(rng);
            let tau = t11_measure(chart, rng.random_range(0.2..1.5), rng.random_range(0.2..1.5))?;
            let m = flows::shear_point(chart, &x)?;
            let d = flows::delta(&m, &Lamination::Cocycle(tau), FdConfig::default())?;
            Ok(x.into_iter().chain(d.covector).collect())
        })
        .collect()
}

fn fn_cotangent_samples(rng: &mut ChaCha8Rng, k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| {
            let mut x = g2_coords(rng);
            x.extend((0..3).map(|_| rng.random_range(0.2..1.5)));
            x
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Checks

fn de_linear_identity(ctx: &CheckContext) -> Result<CheckReport> {
    let trials = ctx.trials(100);
    let mut rng = ctx.rng(1);
    let tracks: Vec<TrainTrack> = vec![
        ctx.onesw.track(),
        ctx.t11.track(),
        ctx.g2.track(),
        traintrack::punctured_torus_spiral().0,
    ];
    let mut rows = Vec::new();
    let mut mismatches = 0usize;
    let mut total = 0usize;
    for t in &tracks {
        let mut equal = 0usize;
        for _ in 0..trials {
            let w: Vec<WeightSystem> = (0..4).map(|_| traintrack::random_weight_system(t, &mut rng, 12)).collect();
            let (lhs, rhs) = traintrack::de_pullback_identity(t, &w[0], &w[1], &w[2], &w[3])?;
            if lhs == rhs {
                equal += 1;
            }
        }
        mismatches += trials - equal;
        total += trials;
        rows.push(json!({"track": t.name(), "dimension": t.dimension(), "trials": trials, "equal": equal}));
    }
    let gates = vec![
        Gate::new("exact-mismatches", mismatches as f64, 0.0),
        Gate::new("tracks-short", 3usize.saturating_sub(tracks.len()) as f64, 0.0),
    ];
    Ok(CheckReport::new("de-linear-identity", ctx, gates, json!({"tracks": rows, "total": total})))
}

fn de_factor_2(ctx: &CheckContext) -> Result<CheckReport> {
    let chart = ctx.t11.shear_chart()?;
    let n = chart.dim();
    let mut rng = ctx.rng(2);
    let samples: Vec<Vec<f64>> = (0..ctx.trials(10))
        .map(|_| {
            let mut x = t11_coords(&mut rng);
            x.extend((0..n).map(|_| rng.random_range(-1.0..1.0)));
            x
        })
        .collect();
    let map = shear_de_map(&chart);
    let report = symplectic::pullback_check(
        &map,
        &ConstantForm::cotangent(n),
        &de_target_form(&chart)?,
        Some(2.0),
        &samples,
        ctx.fd,
    )?;

    // Exact path: the map is (q, p) ↦ (q + G⁻¹p, q − G⁻¹p).
    let g = traintrack::thurston_gram(chart.track(), &chart.cocycle_basis())?;
    let gi = exact::inverse(&g).ok_or_else(|| Error::Singular("Thurston Gram".into()))?;
    let mut jac = vec![vec![q(0); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            jac[i][n + j] = gi[i][j].clone();
            jac[n + i][n + j] = -gi[i][j].clone();
        }
        jac[i][i] = q(1);
        jac[n + i][i] = q(1);
    }
    let mut src = vec![vec![q(0); 2 * n]; 2 * n];
    for i in 0..n {
        src[i][n + i] = q(1);
        src[n + i][i] = q(-1);
    }
    let mut tgt = vec![vec![q(0); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            tgt[i][j] = g[i][j].clone();
            tgt[n + i][n + j] = -g[i][j].clone();
        }
    }
    let ex = symplectic::pullback_exact(&jac, &src, &tgt)?;
    let exact_ok = ex.constant == Some(q(2));

    // Differentiability sampling on a nonlinear observable: traces of E_L.
    let panel = ctx.t11.panel.clone();
    let c = chart.clone();
    let observable = ChartedMap::new("panel ∘ E_L ∘ delta^-1", 2 * n, panel.len(), move |x| {
        let base = flows::shear_point(&c, &x[..n])?;
        let (m, l) = flows::delta_inverse(&CotangentPoint {
            base,
            covector: x[n..].to_vec(),
            exact: None,
            fd: None,
        })?;
        flows::earthquake(&m, &l, 1.0, Side::Left)?.trace_panel(&panel)
    });
    let mut ratios = Vec::new();
    for x in samples.iter().take(3) {
        let v: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        ratios.push(symplectic::difference_quotient_ratio(&observable, x, &v, 1e-2)?);
    }
    let ratio_dev = ratios.iter().map(|r| (r - 4.0).abs()).fold(0.0, f64::max);

    let gates = vec![
        Gate::new("max-dev", report.max_dev, ctx.tol(1e-6)),
        Gate::new("fitted-c-minus-2", (report.fitted_c - 2.0).abs(), 1e-6),
        Gate::new("exact-c-not-2", if exact_ok { 0.0 } else { 1.0 }, 0.0),
        Gate::new("fd-halving-ratio-minus-4", ratio_dev, 0.5),
    ];
    let details = json!({
        "pullback": pullback_json(&report),
        "exact_constant": ex.constant.as_ref().map(exact::q_to_string),
        "fd_halving_ratios": rv(&ratios),
    });
    Ok(CheckReport::new("de-factor-2", ctx, gates, details))
}

fn length_consistency(ctx: &CheckContext) -> Result<CheckReport> {
    let chart = ctx.t11.shear_chart()?;
    let kappa = ctx
        .t11
        .calibration
        .kappa_l
        .ok_or_else(|| Error::Format("t11 testbed records no kappa_l".into()))?;
    let charts = spiral_charts(ctx.trials(5).max(5));
    let mut rng = ctx.rng(3);
    let mut points = ctx.t11.points.clone();
    points.push(t11_coords(&mut rng));
    let (mut dev, mut spread, mut cusp) = (0.0f64, 0.0f64, 0.0f64);
    let mut rows = Vec::new();
    for x in &points {
        let m = flows::shear_point(&chart, x)?;
        let rho = m.holonomy()?;
        let mut ks = Vec::new();
        for sc in &charts {
            let ext = sc.extract(rho)?;
            let omega = q_to_f64(&cocycle_length(sc, &ext.coords, &sc.curve_cocycle())?);
            let len = trace_length(rho, &sc.curve)?.length;
            dev = dev.max((len - kappa * omega).abs());
            cusp = cusp.max(ext.puncture_residual());
            ks.push(len / omega);
            rows.push(json!({"point": rv(x), "curve": sc.curve.to_string(), "trace_length": r(len), "omega": r(omega)}));
        }
        let (lo, hi) = ks.iter().fold((f64::MAX, f64::MIN), |(a, b), &k| (a.min(k), b.max(k)));
        spread = spread.max(hi - lo);
    }
    let gates = vec![
        Gate::new("length-dev", dev, ctx.tol(1e-8)),
        Gate::new("kappa-spread", spread, 1e-8),
        Gate::new("cusp-leaf-shears", cusp, 1e-8),
        Gate::new("curves-short", 5usize.saturating_sub(charts.len()) as f64, 0.0),
    ];
    Ok(CheckReport::new("length-consistency", ctx, gates, json!({"kappa_l": r(kappa), "samples": rows})))
}

fn flow_property(ctx: &CheckContext) -> Result<CheckReport> {
    let trials = ctx.trials(20);
    let mut rng = ctx.rng(4);
    let chart = ctx.t11.shear_chart()?;
    let mut exact_fail = 0usize;
    for _ in 0..trials {
        let sigma = chart.from_reduced_exact(&[rand_q(&mut rng, 30, 7), rand_q(&mut rng, 30, 7)])?;
        let tau = traintrack::random_weight_system(chart.track(), &mut rng, 9);
        let (s, t) = (rand_q(&mut rng, 20, 5), rand_q(&mut rng, 20, 5));
        let two = flows::earthquake_shear(&chart, &flows::earthquake_shear(&chart, &sigma, &tau, &s, Side::Left)?, &tau, &t, Side::Left)?;
        let one = flows::earthquake_shear(&chart, &sigma, &tau, &(&s + &t), Side::Left)?;
        let back = flows::earthquake_shear(&chart, &flows::earthquake_shear(&chart, &sigma, &tau, &s, Side::Left)?, &tau, &s, Side::Right)?;
        if two != one || back != sigma {
            exact_fail += 1;
        }
    }
    let fnc = ctx.g2.fn_chart()?;
    let panel = &ctx.g2.panel;
    let mut fn_dev = 0.0f64;
    for _ in 0..trials {
        let x = FnCoordinates::from_flat(&g2_coords(&mut rng))?;
        let l = g2_multicurve(&mut rng, false)?;
        let (s, t) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let two = flows::earthquake_fn(&fnc, &flows::earthquake_fn(&fnc, &x, &l, s, Side::Left)?, &l, t, Side::Left)?;
        let one = flows::earthquake_fn(&fnc, &x, &l, s + t, Side::Left)?;
        let a = teich::holonomy_from_fn(&fnc, &two)?.trace_panel(panel);
        let b = teich::holonomy_from_fn(&fnc, &one)?.trace_panel(panel);
        fn_dev = fn_dev.max(panel_distance(&a, &b));
    }
    let gates = vec![
        Gate::new("shear-exact-mismatches", exact_fail as f64, 0.0),
        Gate::new("fn-panel-dev", fn_dev, ctx.tol(1e-9)),
    ];
    Ok(CheckReport::new("flow-property", ctx, gates, json!({"trials": trials})))
}

fn mess_round_trip(ctx: &CheckContext) -> Result<CheckReport> {
    let trials = ctx.trials(20);
    let mut rng = ctx.rng(5);
    let fnc = ctx.g2.fn_chart()?;
    let chart = ctx.t11.shear_chart()?;
    let (mut fn_dev, mut shear_dev, mut half_dev, mut fuchsian) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let m = g2_point(&fnc, &g2_coords(&mut rng))?;
        let l = Lamination::Multicurve(g2_multicurve(&mut rng, false)?);
        let a = lorentz::ads_from_plus_boundary(&m, &l)?;
        let back = flows::earthquake(&a.right, &l.scale(&q(2))?, 1.0, Side::Left)?;
        fn_dev = fn_dev.max(panel_distance(&a.left.trace_panel(&ctx.g2.panel)?, &back.trace_panel(&ctx.g2.panel)?));
        let half = l.scale(&q_frac(1, 2))?;
        let h = lorentz::ads_from_plus_boundary(&m, &half)?;
        let hb = flows::earthquake(&h.right, &half.scale(&q(2))?, 1.0, Side::Left)?;
        half_dev = half_dev.max(panel_distance(&h.left.trace_panel(&ctx.g2.panel)?, &hb.trace_panel(&ctx.g2.panel)?));

        let m = flows::shear_point(&chart, &t11_coords(&mut rng))?;
        let l = Lamination::Cocycle(traintrack::random_weight_system(chart.track(), &mut rng, 9));
        let a = lorentz::ads_from_plus_boundary(&m, &l)?;
        let back = flows::earthquake(&a.right, &l.scale(&q(2))?, 1.0, Side::Left)?;
        shear_dev = shear_dev.max(panel_distance(&a.left.trace_panel(&ctx.t11.panel)?, &back.trace_panel(&ctx.t11.panel)?));
        let z = lorentz::ads_from_plus_boundary(&m, &Lamination::Cocycle(WeightSystem::zero(chart.track())))?;
        fuchsian = fuchsian.max(panel_distance(&z.left.trace_panel(&ctx.t11.panel)?, &z.right.trace_panel(&ctx.t11.panel)?));
    }
    let gates = vec![
        Gate::new("fn-panel-dev", fn_dev, ctx.tol(1e-8)),
        Gate::new("shear-panel-dev", shear_dev, ctx.tol(1e-8)),
        Gate::new("half-lamination-dev", half_dev, 1e-8),
        Gate::new("fuchsian-dev", fuchsian, 1e-12),
    ];
    Ok(CheckReport::new("mess-round-trip", ctx, gates, json!({"trials": trials})))
}

fn cocycle_dev(a: &Cocycle<f64>, b: &Cocycle<f64>) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (*x - *y).max_abs() / y.max_abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Least-squares `s` with `a ≈ s·b`.
fn cocycle_ratio(a: &Cocycle<f64>, b: &Cocycle<f64>) -> f64 {
    let (mut ab, mut bb) = (0.0, 0.0);
    for (x, y) in a.values.iter().zip(&b.values) {
        for (p, q) in x.entries().iter().zip(y.entries()) {
            ab += p * q;
            bb += q * q;
        }
    }
    ab / bb
}

fn mink_cocycle(ctx: &CheckContext) -> Result<CheckReport> {
    let fnc = ctx.g2.fn_chart()?;
    let mut rng = ctx.rng(6);
    let samples = ctx.trials(10);
    let (mut residual, mut words, mut additivity, mut shape) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut scales = Vec::new();
    for k in 0..samples {
        let m = g2_point(&fnc, &g2_coords(&mut rng))?;
        let l = g2_multicurve(&mut rng, true)?;
        let whole = lorentz::mink_from_lamination(&m, &Lamination::Multicurve(l.clone()), ctx.fd)?;
        residual = residual.max(whole.residual);
        words = words.max(whole.word_residual);
        let mut sum = Cocycle::zero(4);
        for c in l.components() {
            let single = WeightedMulticurve::new(vec![(c.curve.clone(), c.weight.clone())])?;
            let part = lorentz::mink_from_lamination(&m, &Lamination::Multicurve(single), ctx.fd)?;
            residual = residual.max(part.residual);
            words = words.max(part.word_residual);
            sum = sum.add(&part.translation);
        }
        additivity = additivity.max(cocycle_dev(&sum, &whole.translation));
        let c = &l.components()[k % l.components().len()];
        let single = WeightedMulticurve::new(vec![(c.curve.clone(), c.weight.clone())])?;
        let fd = lorentz::mink_from_lamination(&m, &Lamination::Multicurve(single.clone()), ctx.fd)?;
        let oracle = lorentz::twist_cocycle(&m, &single)?;
        let s = cocycle_ratio(&fd.translation, &oracle);
        shape = shape.max(cocycle_dev(&fd.translation, &oracle.scale_real(s)));
        scales.push(s);
    }
    let mean = scales.iter().sum::<f64>() / scales.len() as f64;
    let std = (scales.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / scales.len() as f64).sqrt();
    let gates = vec![
        Gate::new("cocycle-residual", residual, ctx.tol(1e-6)),
        Gate::new("word-derivative-dev", words, 1e-6),
        Gate::new("additivity-dev", additivity, 1e-6),
        Gate::new("oracle-scale-spread", std / mean.abs(), 1e-4),
        Gate::new("oracle-shape-dev", shape, 1e-6),
    ];
    let details = json!({"oracle_scale_mean": r(mean), "oracle_scale_std": r(std), "scales": rv(&scales)});
    Ok(CheckReport::new("mink-cocycle", ctx, gates, details))
}

fn random_sl2(rng: &mut ChaCha8Rng) -> RMat {
    let a = rng.random_range(-1.0..1.0);
    RMat::new(a, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), -a)
}

fn goldman_gates(ctx: &CheckContext) -> Result<CheckReport> {
    let fnc = ctx.g2.fn_chart()?;
    let kappa = ctx
        .g2
        .calibration
        .kappa_g
        .ok_or_else(|| Error::Format("g2 testbed records no kappa_g".into()))?;
    let mut rng = ctx.rng(7);
    let form = GoldmanForm {
        name: "goldman-killing-real".into(),
        dim: 6,
        chart: HolonomyChart::Real(fn_real_builder(&fnc)),
        cfg: ctx.fd,
    };
    let (mut anti, mut cob, mut decomp, mut wolpert) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut fitted = Vec::new();
    for _ in 0..ctx.trials(3) {
        let x = g2_coords(&mut rng);
        let (rho, us) = form.real_cocycles(&x)?;
        let mut g = vec![vec![0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                g[i][j] = symplectic::goldman_pairing(&rho, &us[i], &us[j], GoldmanKind::KillingReal)?;
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                anti = anti.max((g[i][j] + g[j][i]).abs());
                let w = if j == i + 3 {
                    1.0
                } else if i == j + 3 {
                    -1.0
                } else {
                    0.0
                };
                wolpert = wolpert.max((g[i][j] - kappa * w).abs());
            }
            fitted.push(g[i % 3][i % 3 + 3]);
        }
        for _ in 0..5 {
            let b = Cocycle::coboundary(&rho, &random_sl2(&mut rng));
            for u in &us {
                cob = cob.max(symplectic::goldman_pairing(&rho, &b, u, GoldmanKind::KillingReal)?.abs());
            }
        }
        let y = g2_coords(&mut rng);
        let (rho_r, vs) = form.real_cocycles(&y)?;
        let mix = |c: &[Cocycle<f64>], rng: &mut ChaCha8Rng| {
            c.iter().fold(Cocycle::zero(4), |acc, u| acc.add(&u.scale_real(rng.random_range(-1.0..1.0))))
        };
        let (ul, vl, ur, vr) = (mix(&us, &mut rng), mix(&us, &mut rng), mix(&vs, &mut rng), mix(&vs, &mut rng));
        let d = symplectic::ads_pairing_decomposition((&rho, &rho_r), (&ul, &ur), (&vl, &vr))?;
        decomp = decomp.max(d.defect);
        let zero = Cocycle::zero(4);
        let left_only = symplectic::ads_pairing((&rho, &rho_r), (&ul, &zero), (&vl, &zero))?;
        decomp = decomp.max((left_only - 0.5 * d.left).abs());
    }
    let mean = fitted.iter().sum::<f64>() / fitted.len() as f64;
    let gates = vec![
        Gate::new("antisymmetry", anti, 1e-10),
        Gate::new("coboundary", cob, ctx.tol(1e-6)),
        Gate::new("tr-1-decomposition", decomp, 1e-12),
        Gate::new("kappa-g-wolpert-dev", wolpert, 1e-6),
    ];
    let details = json!({"kappa_g_recorded": r(kappa), "kappa_g_fitted": r(mean)});
    Ok(CheckReport::new("goldman-gates", ctx, gates, details))
}

struct GraftFits {
    shear: PullbackReport,
    fn_chart: PullbackReport,
}

fn graft_fits(ctx: &CheckContext, rng: &mut ChaCha8Rng) -> Result<GraftFits> {
    let chart = ctx.t11.shear_chart()?;
    let k = ctx.trials(10);
    let shear = symplectic::pullback_check(
        &shear_graft_map(&chart),
        &ConstantForm::cotangent(chart.dim()),
        &shear_cp_form(&chart)?,
        None,
        &shear_cotangent_samples(&chart, rng, k)?,
        ctx.fd,
    )?;
    let fnc = ctx.g2.fn_chart()?;
    let fn_chart = symplectic::pullback_check(
        &fn_graft_map(&fnc),
        &fn_cotangent_form(),
        &fn_complex_form(&fnc, ctx.fd),
        None,
        &fn_cotangent_samples(rng, k),
        ctx.fd,
    )?;
    Ok(GraftFits { shear, fn_chart })
}

fn grafting_symplecto(ctx: &CheckContext) -> Result<CheckReport> {
    let mut rng = ctx.rng(8);
    let fits = graft_fits(ctx, &mut rng)?;
    let mut gates = vec![
        Gate::new("shear-rel-residual", fits.shear.rel_residual, ctx.tol(1e-4)),
        Gate::new("fn-rel-residual", fits.fn_chart.rel_residual, ctx.tol(1e-4)),
    ];
    if let Some(k) = ctx.t11.calibration.kappa_gr {
        gates.push(Gate::new("shear-kappa-gr-vs-recorded", (fits.shear.fitted_c - k).abs(), 1e-4));
    }
    if let Some(k) = ctx.g2.calibration.kappa_gr {
        gates.push(Gate::new("fn-kappa-gr-vs-recorded", (fits.fn_chart.fitted_c - k).abs(), 1e-4));
    }
    let details = json!({"shear": pullback_json(&fits.shear), "fn": pullback_json(&fits.fn_chart)});
    Ok(CheckReport::new("grafting-symplecto", ctx, gates, details))
}

fn wick_ads_composition(ctx: &CheckContext) -> Result<CheckReport> {
    let mut rng = ctx.rng(9);
    let k = ctx.trials(10);
    let fits = graft_fits(ctx, &mut rng)?;

    // Shear chart.
    let chart = ctx.t11.shear_chart()?;
    let n = chart.dim();
    let samples = shear_cotangent_samples(&chart, &mut rng, k)?;
    let e = symplectic::pullback_check(&shear_de_map(&chart), &ConstantForm::cotangent(n), &de_target_form(&chart)?, None, &samples, ctx.fd)?;
    let graft = shear_graft_map(&chart);
    let cp_samples = samples.iter().map(|x| graft.eval(x)).collect::<Result<Vec<_>>>()?;
    let w_map = shear_ungraft_map(&chart).then(&shear_de_map(&chart))?;
    let w = symplectic::pullback_check(&w_map, &shear_cp_form(&chart)?, &de_target_form(&chart)?, None, &cp_samples, ctx.fd)?;
    let shear_pred = e.fitted_c / fits.shear.fitted_c;

    // Fig. 2 round trip on grafted data, exactly.
    let mut round_trip = 0usize;
    for x in &samples {
        let sigma = chart.from_reduced(&x[..n])?;
        let tau = flows::shear_covector_to_cocycle(&chart, &x[n..])?;
        let z = flows::graft_shearbend(&chart, &sigma, &tau, &q(1))?;
        let (s2, t2) = flows::ungraft_shearbend(&chart, &z, &q(1))?;
        let m = TeichPoint::shear(chart.clone(), s2)?;
        let a = lorentz::wick_pleated(&m, &Lamination::Cocycle(t2))?;
        let b = flows::double_earthquake(&TeichPoint::shear(chart.clone(), sigma)?, &Lamination::Cocycle(tau))?;
        if a.left != b.0 || a.right != b.1 {
            round_trip += 1;
        }
    }

    // FN chart.
    let fnc = ctx.g2.fn_chart()?;
    let fn_samples = fn_cotangent_samples(&mut rng, k);
    let ads = fn_ads_form(&fnc, ctx.fd);
    let e_fn = symplectic::pullback_check(&fn_de_map(&fnc), &fn_cotangent_form(), &ads, None, &fn_samples, ctx.fd)?;
    let w_fn = symplectic::pullback_check(&fn_wick_map(&fnc), &fn_complex_form(&fnc, ctx.fd), &ads, None, &fn_samples, ctx.fd)?;
    let fn_pred = e_fn.fitted_c / fits.fn_chart.fitted_c;

    let tol = ctx.tol(1e-4);
    let gates = vec![
        Gate::new("shear-composition-dev", (w.fitted_c - shear_pred).abs(), tol),
        Gate::new("fn-composition-dev", (w_fn.fitted_c - fn_pred).abs(), tol),
        Gate::new("shear-w-rel-residual", w.rel_residual, 1e-4),
        Gate::new("fn-w-rel-residual", w_fn.rel_residual, 1e-4),
        Gate::new("shear-e-rel-residual", e.rel_residual, 1e-4),
        Gate::new("fn-e-rel-residual", e_fn.rel_residual, 1e-4),
        Gate::new("graft-round-trip-mismatches", round_trip as f64, 0.0),
    ];
    let details = json!({
        "shear": {"c_e": r(e.fitted_c), "kappa_gr": r(fits.shear.fitted_c), "c_w": r(w.fitted_c), "predicted": r(shear_pred)},
        "fn": {"c_e": r(e_fn.fitted_c), "kappa_gr": r(fits.fn_chart.fitted_c), "c_w": r(w_fn.fitted_c), "predicted": r(fn_pred)},
        "pullbacks": [pullback_json(&e), pullback_json(&w), pullback_json(&e_fn), pullback_json(&w_fn)],
    });
    Ok(CheckReport::new("wick-ads-composition", ctx, gates, details))
}

fn construction_health(ctx: &CheckContext) -> Result<CheckReport> {
    let mut rng = ctx.rng(10);
    let trials = ctx.trials(20);
    let fnc = ctx.g2.fn_chart()?;
    let chart = ctx.t11.shear_chart()?;
    let (mut relator, mut cusp) = (0.0f64, 0.0f64);
    let mut fn_points = ctx.g2.points.clone();
    fn_points.extend((0..trials).map(|_| g2_coords(&mut rng)));
    for x in &fn_points {
        relator = relator.max(g2_point(&fnc, x)?.holonomy()?.relator_residual());
        let a = lorentz::ads_from_plus_boundary(&g2_point(&fnc, x)?, &Lamination::Multicurve(g2_multicurve(&mut rng, false)?))?;
        let (l, r) = lorentz::ads_holonomy_pair(&a)?;
        relator = relator.max(l.relator_residual()).max(r.relator_residual());
    }
    let mut t_points = ctx.t11.points.clone();
    t_points.extend((0..trials).map(|_| t11_coords(&mut rng)));
    for x in &t_points {
        let h = flows::shear_point(&chart, x)?;
        cusp = cusp.max(h.holonomy()?.cusp_residuals().into_iter().fold(0.0, f64::max));
    }
    let small = CheckContext {
        trials: Some(3),
        ..ctx.clone()
    };
    let mut differing = Vec::new();
    for name in ["de-factor-2", "mink-cocycle"] {
        let a = serde_json::to_string(&run_check(name, &small)?).expect("reports serialize");
        let b = serde_json::to_string(&run_check(name, &small)?).expect("reports serialize");
        if a != b {
            differing.push(name);
        }
    }
    let gates = vec![
        Gate::new("fn-relator-residual", relator, ctx.tol(1e-9)),
        Gate::new("cusp-parabolicity", cusp, 1e-10),
        Gate::new("nondeterministic-reports", differing.len() as f64, 0.0),
    ];
    let details = json!({"fn_points": fn_points.len(), "shear_points": t_points.len(), "differing": differing});
    Ok(CheckReport::new("construction-health", ctx, gates, details))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes_with_small_samples() {
        let ctx = CheckContext {
            trials: Some(3),
            ..CheckContext::default()
        };
        for name in CHECKS {
            let rep = run_check(name, &ctx).unwrap();
            assert!(rep.passed, "{name}: {:?}", rep.gates);
        }
    }

    #[test]
    fn unknown_check_is_an_input_error() {
        assert!(matches!(run_check("nope", &CheckContext::default()), Err(Error::UnknownCheck(_))));
    }
}
