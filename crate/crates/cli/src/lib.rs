//! `wick` command-line front end.
//!
//! Every command reads a testbed, evaluates one library entry point and
//! emits a JSON report that embeds the job record. Reports are written to
//! `--out` atomically or printed to stdout.
//!
//! Exit codes: 0 success, 1 numerical gate failure, 2 input error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use wick_core::checks::{self, CheckContext};
use wick_core::exact::{q_from_f64, q_parse, q_to_string, Q};
use wick_core::fd::FdConfig;
use wick_core::flows::{self, Lamination, Side};
use wick_core::lorentz::{self, ProjectiveData};
use wick_core::mat2::Mat2;
use wick_core::serial::real_to_string;
use wick_core::surface::{CurveWord, WeightedMulticurve};
use wick_core::symplectic::{self, ChartForm, GoldmanForm, HolonomyChart, PairingKind};
use wick_core::teich::{self, ChartPoint, FnCoordinates, Holonomy, TeichPoint};
use wick_core::testbed::{Testbed, TestbedChart};
use wick_core::traintrack::{self, WeightSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] wick_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "wick", version, about = "Earthquakes, grafting and Wick rotations on surface-group representations")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct Common {
    /// Testbed file, or the name of a bundled testbed (t11, g2, onesw).
    #[arg(long, global = true)]
    pub testbed: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Finite-difference step.
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub h: f64,
    /// Overrides the tolerance of a check's headline gate.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides a check's sample count.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Build the holonomy of a point and report its residuals.
    Holonomy(PointArgs),
    /// Length of a curve word or of a lamination.
    Length {
        #[command(flatten)]
        point: PointArgs,
        /// Curve as signed generator indices, e.g. `1,2,-1`.
        #[arg(long, allow_hyphen_values = true)]
        curve: Option<String>,
        #[arg(long)]
        l: Option<String>,
    },
    /// Left or right earthquake along a lamination.
    Earthquake {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        t: String,
        #[arg(long, value_enum, default_value_t = SideArg::L)]
        side: SideArg,
    },
    /// The pair `(E_L(m, l), E_R(m, l))`.
    DoubleEarthquake(FlowArgs),
    /// Grafting along `t·l`.
    Graft {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long, default_value = "1")]
        t: String,
    },
    /// Lorentzian structure from a point and a lamination.
    Wick {
        #[arg(value_enum)]
        geometry: Geometry,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Evaluate one pairing on two tangent vectors.
    Form {
        /// thurston, cotangent, goldman-killing-real, goldman-tr1 or goldman-tr-1.
        #[arg(long)]
        kind: String,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Run a named verification.
    Check {
        name: String,
    },
    /// Print a bundled testbed as JSON.
    Testbed {
        name: String,
    },
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct PointArgs {
    /// Chart coordinates, comma separated; defaults to the testbed's first
    /// reference point. Rational entries such as `1/3` keep shear charts exact.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct FlowArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Lamination: track edge weights (shear) or pants-curve weights (FN),
    /// comma separated; `empty` for the zero lamination.
    #[arg(long, allow_hyphen_values = true)]
    pub l: String,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum SideArg {
    L,
    R,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Ads,
    Ds,
    Mink,
}

/// The record embedded in every report.
#[derive(Debug, Serialize)]
pub struct Job {
    #[serde(flatten)]
    pub command: Command,
    pub testbed: String,
    pub seed: u64,
    #[serde(with = "wick_core::serial::real")]
    pub h: f64,
    #[serde(with = "wick_core::serial::opt_real")]
    pub tol: Option<f64>,
    pub trials: Option<usize>,
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
}

/// Parses arguments, runs the job and writes the report; returns the exit
/// code.
pub fn main_with_args<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.report).expect("reports serialize") + "\n";
            let written = match &cli.common.out {
                Some(p) => write_atomic(p, &text),
                None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                }),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INPUT;
            }
            if out.exit == EXIT_GATE {
                let failed: Vec<&str> = out.report["result"]["gates"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .filter(|g| g["passed"] == false)
                    .filter_map(|g| g["name"].as_str())
                    .collect();
                let _ = writeln!(stderr, "gate failure: {}", failed.join(", "));
            }
            out.exit
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

/// Writes through a sibling temporary file so readers never see a partial
/// report.
pub fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().ok_or_else(|| CliError::Input(format!("--out {}: not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, text).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

fn default_testbed(cmd: &Command) -> &'static str {
    match cmd {
        Command::Check { name } => match name.as_str() {
            "mink-cocycle" | "goldman-gates" => "g2",
            "de-linear-identity" => "onesw",
            _ => "t11",
        },
        Command::Form { kind, .. } if kind.starts_with("goldman") => "g2",
        _ => "t11",
    }
}

fn load_testbed(cli: &Cli) -> CliResult<(String, Testbed)> {
    match &cli.common.testbed {
        Some(p) => Ok((p.display().to_string(), Testbed::load(p)?)),
        None => {
            let name = default_testbed(&cli.command);
            Ok((name.to_string(), Testbed::builtin(name).expect("bundled testbed")))
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    if !(cli.common.h.is_finite() && cli.common.h > 0.0) {
        return Err(CliError::Input(format!("--h must be positive, got {}", cli.common.h)));
    }
    let (testbed_name, tb) = load_testbed(cli)?;
    let job = Job {
        command: cli.command.clone(),
        testbed: testbed_name,
        seed: cli.common.seed,
        h: cli.common.h,
        tol: cli.common.tol,
        trials: cli.common.trials,
        output: cli.common.out.clone(),
    };
    let fd = FdConfig::with_h(cli.common.h);
    let mut exit = EXIT_OK;
    let result = match &cli.command {
        Command::Holonomy(p) => holonomy_report(&tb, &point(&tb, p.m.as_deref())?)?,
        Command::Length { point: p, curve, l } => length_report(&tb, &point(&tb, p.m.as_deref())?, curve.as_deref(), l.as_deref())?,
        Command::Earthquake { flow, t, side } => {
            let (m, l) = flow_inputs(&tb, flow)?;
            let t = parse_real(t, "--t")?;
            let side = match side {
                SideArg::L => Side::Left,
                SideArg::R => Side::Right,
            };
            let e = flows::earthquake(&m, &l, t, side)?;
            json!({
                "point": point_json(&e),
                "trace_panel": panel_json(&tb, &e)?,
                "warning": flows::flow_warning(&l, t),
            })
        }
        Command::DoubleEarthquake(flow) => {
            let (m, l) = flow_inputs(&tb, flow)?;
            let (a, b) = flows::double_earthquake(&m, &l)?;
            json!({"left": point_json(&a), "right": point_json(&b)})
        }
        Command::Graft { flow, t } => {
            let (m, l) = flow_inputs(&tb, flow)?;
            graft_report(&m, &l, &parse_rational(t, "--t")?)?
        }
        Command::Wick { geometry, flow } => {
            let (m, l) = flow_inputs(&tb, flow)?;
            wick_report(&tb, *geometry, &m, &l, fd)?
        }
        Command::Form { kind, m, u, v } => form_report(&tb, kind, m.as_deref(), u, v, fd)?,
        Command::Check { name } => {
            if !checks::CHECKS.contains(&name.as_str()) {
                return Err(CliError::Input(format!("unknown check {name:?}; known: {}", checks::CHECKS.join(", "))));
            }
            let ctx = check_context(cli, &tb)?;
            let rep = checks::run_check(name, &ctx)?;
            if !rep.passed {
                exit = EXIT_GATE;
            }
            serde_json::to_value(&rep).expect("reports serialize")
        }
        Command::Testbed { name } => {
            let t = Testbed::builtin(name).ok_or_else(|| CliError::Input(format!("no bundled testbed {name:?}")))?;
            serde_json::to_value(&t).expect("testbeds serialize")
        }
    };
    Ok(Outcome {
        report: json!({"job": job, "result": result}),
        exit,
    })
}

/// Checks read the bundled testbeds, with `--testbed` replacing the one of
/// the same chart family.
fn check_context(cli: &Cli, tb: &Testbed) -> CliResult<CheckContext> {
    let mut ctx = CheckContext {
        seed: cli.common.seed,
        trials: cli.common.trials,
        fd: FdConfig::with_h(cli.common.h),
        tol: cli.common.tol,
        ..CheckContext::default()
    };
    if cli.common.testbed.is_some() {
        match &tb.chart {
            TestbedChart::Shear { .. } => ctx.t11 = tb.clone(),
            TestbedChart::Fn { .. } => ctx.g2 = tb.clone(),
            TestbedChart::Track { .. } => ctx.onesw = tb.clone(),
        }
    }
    Ok(ctx)
}

// ---------------------------------------------------------------------------
// Input parsing

fn split(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_real(s: &str, what: &str) -> CliResult<f64> {
    let x = match q_parse(s) {
        Some(q) => wick_core::exact::q_to_f64(&q),
        None => s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("{what}: cannot parse {s:?} as a number")))?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Input(format!("{what}: {s:?} is not finite")))
    }
}

fn parse_rational(s: &str, what: &str) -> CliResult<Q> {
    match q_parse(s) {
        Some(q) => Ok(q),
        None => q_from_f64(parse_real(s, what)?).ok_or_else(|| CliError::Input(format!("{what}: {s:?} is not finite"))),
    }
}

fn parse_reals(s: &str, what: &str) -> CliResult<Vec<f64>> {
    split(s).map(|x| parse_real(x, what)).collect()
}

fn parse_rationals(s: &str, what: &str) -> CliResult<Vec<Q>> {
    split(s).map(|x| parse_rational(x, what)).collect()
}

fn point(tb: &Testbed, m: Option<&str>) -> CliResult<TeichPoint> {
    match &tb.chart {
        TestbedChart::Shear { .. } => {
            let chart = tb.shear_chart()?;
            let coords = match m {
                Some(s) if split(s).all(|x| q_parse(x).is_some()) => chart.from_reduced_exact(&parse_rationals(s, "--m")?)?,
                Some(s) => chart.from_reduced(&parse_reals(s, "--m")?)?,
                None => chart.from_reduced(first_point(tb)?)?,
            };
            Ok(TeichPoint::shear(chart, coords)?)
        }
        TestbedChart::Fn { .. } => {
            let x = match m {
                Some(s) => parse_reals(s, "--m")?,
                None => first_point(tb)?.to_vec(),
            };
            Ok(TeichPoint::fn_point(tb.fn_chart()?, FnCoordinates::from_flat(&x)?)?)
        }
        TestbedChart::Track { .. } => Err(CliError::Input(format!("testbed {} has no Teichmüller chart", tb.name))),
    }
}

fn first_point(tb: &Testbed) -> CliResult<&[f64]> {
    tb.points
        .first()
        .map(Vec::as_slice)
        .ok_or_else(|| CliError::Input(format!("testbed {} has no reference points; pass --m", tb.name)))
}

fn lamination(tb: &Testbed, s: &str) -> CliResult<Lamination> {
    let empty = s.trim() == "empty";
    match &tb.chart {
        TestbedChart::Shear { .. } => {
            let chart = tb.shear_chart()?;
            let track = teich::CocycleChart::track(&*chart);
            if empty {
                return Ok(Lamination::Cocycle(WeightSystem::zero(track)));
            }
            Ok(Lamination::Cocycle(traintrack::validate_weights(track, parse_rationals(s, "--l")?)?))
        }
        TestbedChart::Fn { .. } => {
            if empty {
                return Ok(Lamination::Multicurve(WeightedMulticurve::empty()));
            }
            Ok(Lamination::Multicurve(WeightedMulticurve::pants(&parse_rationals(s, "--l")?)?))
        }
        TestbedChart::Track { .. } => Err(CliError::Input(format!("testbed {} has no Teichmüller chart", tb.name))),
    }
}

fn flow_inputs(tb: &Testbed, f: &FlowArgs) -> CliResult<(TeichPoint, Lamination)> {
    Ok((point(tb, f.m.as_deref())?, lamination(tb, &f.l)?))
}

// ---------------------------------------------------------------------------
// Output

fn r(x: f64) -> Value {
    Value::String(real_to_string(x))
}

fn rv(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| r(*x)).collect())
}

fn c(z: Complex64) -> Value {
    json!({"re": r(z.re), "im": r(z.im)})
}

fn real_matrix(m: &Mat2<f64>) -> Value {
    json!([[r(m.a), r(m.b)], [r(m.c), r(m.d)]])
}

fn complex_matrix(m: &Mat2<Complex64>) -> Value {
    json!([[c(m.a), c(m.b)], [c(m.c), c(m.d)]])
}

fn point_json(m: &TeichPoint) -> Value {
    match m.chart_point() {
        ChartPoint::Shear { chart, coords } => json!({
            "chart": "shear",
            "reduced": chart.to_reduced(coords).map(|v| v.iter().map(q_to_string).collect::<Vec<_>>()),
            "shears": coords.values.iter().map(q_to_string).collect::<Vec<_>>(),
        }),
        ChartPoint::Fn { coords, .. } => json!({
            "chart": "fenchel-nielsen",
            "lengths": rv(&coords.lengths),
            "twists": rv(&coords.twists),
        }),
    }
}

fn panel_json(tb: &Testbed, m: &TeichPoint) -> CliResult<Value> {
    let traces = m.trace_panel(&tb.panel)?;
    Ok(Value::Array(
        tb.panel
            .iter()
            .zip(traces)
            .map(|(w, t)| json!({"word": w.to_string(), "trace": r(t)}))
            .collect(),
    ))
}

fn holonomy_json(h: &Holonomy<f64>) -> Value {
    json!({
        "generators": h.generators.iter().map(real_matrix).collect::<Vec<_>>(),
        "relator_residual": r(h.relator_residual()),
        "det_residual": r(h.det_residual()),
        "cusp_residuals": rv(&h.cusp_residuals()),
    })
}

fn holonomy_report(tb: &Testbed, m: &TeichPoint) -> CliResult<Value> {
    let h = m.holonomy()?;
    let mut v = holonomy_json(h);
    v["point"] = point_json(m);
    v["presentation"] = Value::String(h.presentation.describe());
    v["trace_panel"] = panel_json(tb, m)?;
    Ok(v)
}

fn length_report(tb: &Testbed, m: &TeichPoint, curve: Option<&str>, l: Option<&str>) -> CliResult<Value> {
    let mut out = json!({"point": point_json(m)});
    if let Some(s) = curve {
        let letters: Vec<i64> = split(s)
            .map(|x| x.parse().map_err(|_| CliError::Input(format!("--curve: cannot parse {x:?} as a signed generator"))))
            .collect::<CliResult<_>>()?;
        let w = CurveWord::from_signed(&letters)?;
        let t = teich::trace_length(m.holonomy()?, &w)?;
        out["curve"] = json!({"word": w.to_string(), "length": r(t.length), "parabolic": t.parabolic});
    }
    if let Some(s) = l {
        match (lamination(tb, s)?, m.chart_point()) {
            (Lamination::Cocycle(tau), ChartPoint::Shear { chart, coords }) => {
                let omega = teich::cocycle_length(&**chart, coords, &tau)?;
                out["lamination"] = json!({"thurston_pairing": q_to_string(&omega)});
            }
            (Lamination::Multicurve(mc), _) => {
                out["lamination"] = json!({"length": r(teich::lamination_length(m, &mc)?)});
            }
            _ => unreachable!("lamination() matches the chart family"),
        }
    }
    if curve.is_none() && l.is_none() {
        return Err(CliError::Input("length needs --curve or --l".into()));
    }
    Ok(out)
}

fn graft_report(m: &TeichPoint, l: &Lamination, t: &Q) -> CliResult<Value> {
    match (m.chart_point(), l) {
        (ChartPoint::Shear { chart, coords }, Lamination::Cocycle(tau)) => {
            let z = flows::graft_shearbend(chart, coords, tau, t)?;
            let h = z.holonomy(chart)?;
            Ok(json!({
                "shear_bend": z,
                "generators": h.generators.iter().map(complex_matrix).collect::<Vec<_>>(),
            }))
        }
        (ChartPoint::Fn { chart, coords }, Lamination::Multicurve(mc)) => {
            let h = flows::graft_fn(chart, coords, mc, wick_core::exact::q_to_f64(t))?;
            Ok(json!({
                "generators": h.generators.iter().map(complex_matrix).collect::<Vec<_>>(),
                "relator_residual": r(h.relator_residual()),
            }))
        }
        _ => unreachable!("lamination() matches the chart family"),
    }
}

fn wick_report(tb: &Testbed, g: Geometry, m: &TeichPoint, l: &Lamination, fd: FdConfig) -> CliResult<Value> {
    Ok(match g {
        Geometry::Ads => {
            let a = lorentz::ads_from_plus_boundary(m, l)?;
            let (lp, rp) = (a.left.trace_panel(&tb.panel)?, a.right.trace_panel(&tb.panel)?);
            let (lh, rh) = a.holonomy_pair()?;
            json!({
                "left": point_json(&a.left),
                "right": point_json(&a.right),
                "left_trace_panel": rv(&lp),
                "right_trace_panel": rv(&rp),
                "panel_distance": r(teich::panel_distance(&lp, &rp)),
                "relator_residuals": rv(&[lh.relator_residual(), rh.relator_residual()]),
            })
        }
        Geometry::Ds => {
            let data = match (m.chart_point(), l) {
                (ChartPoint::Shear { chart, coords }, Lamination::Cocycle(tau)) => ProjectiveData::ShearBend {
                    chart: chart.clone(),
                    coords: flows::graft_shearbend(chart, coords, tau, &wick_core::exact::q(1))?,
                },
                (ChartPoint::Fn { chart, coords }, Lamination::Multicurve(mc)) => {
                    ProjectiveData::Holonomy(flows::graft_fn(chart, coords, mc, 1.0)?)
                }
                _ => unreachable!("lamination() matches the chart family"),
            };
            let ds = lorentz::ds_from_projective(data)?;
            let h = ds.holonomy()?;
            json!({
                "fuchsian": ds.fuchsian,
                "generators": h.generators.iter().map(complex_matrix).collect::<Vec<_>>(),
                "trace_panel": h.trace_panel(&tb.panel).into_iter().map(c).collect::<Vec<_>>(),
            })
        }
        Geometry::Mink => {
            let p = lorentz::mink_from_lamination(m, l, fd)?;
            json!({
                "linear": holonomy_json(&p.linear),
                "translation": p.translation.values.iter().map(real_matrix).collect::<Vec<_>>(),
                "cocycle_residual": r(p.residual),
                "fd": p.fd,
            })
        }
    })
}

fn form_report(tb: &Testbed, kind: &str, m: Option<&str>, u: &str, v: &str, fd: FdConfig) -> CliResult<Value> {
    let kind: PairingKind = kind.parse().map_err(|e: wick_core::Error| CliError::Input(e.to_string()))?;
    let value = match kind {
        PairingKind::Thurston => {
            let t = tb.track();
            let a = traintrack::validate_weights(&t, parse_rationals(u, "--u")?)?;
            let b = traintrack::validate_weights(&t, parse_rationals(v, "--v")?)?;
            Value::String(q_to_string(&traintrack::thurston_form(&t, &a, &b)?))
        }
        PairingKind::Cotangent => r(symplectic::cotangent_form(&parse_reals(u, "--u")?, &parse_reals(v, "--v")?)?),
        PairingKind::Goldman(g) => {
            let chart = tb.fn_chart().map_err(|_| {
                wick_core::Error::PuncturedPresentation(format!("testbed {} ({})", tb.name, tb.marking))
            })?;
            let builder: symplectic::RealBuilder = {
                let c = chart.clone();
                Arc::new(move |x: &[f64]| {
                    let p = FnCoordinates::from_flat(x)?;
                    teich::fn_holonomy(&c, &p.lengths, &p.twists)
                })
            };
            let (holonomy, dim) = match g {
                symplectic::GoldmanKind::KillingReal => (HolonomyChart::Real(builder), 6),
                symplectic::GoldmanKind::TrMinus1 => (HolonomyChart::Pair { builder, split: 6 }, 12),
                symplectic::GoldmanKind::Tr1 => {
                    let c = chart.clone();
                    let complex: symplectic::ComplexBuilder = Arc::new(move |x: &[f64]| {
                        let tw: Vec<Complex64> = (0..3).map(|i| Complex64::new(x[3 + i], x[6 + i])).collect();
                        teich::fn_holonomy(&c, &x[..3], &tw)
                    });
                    (HolonomyChart::Complex(complex), 9)
                }
                symplectic::GoldmanKind::Tr0 => {
                    return Err(wick_core::Error::PairingKind {
                        kind: kind.to_string(),
                        what: "FN chart tangent vectors; Minkowski pairings take cocycles from `wick mink`".into(),
                    }
                    .into())
                }
            };
            let x = match m {
                Some(s) => parse_reals(s, "--m")?,
                None => {
                    let base = first_point(tb)?.to_vec();
                    let mut x = base.clone();
                    while x.len() < dim {
                        x.extend(&base);
                    }
                    x.truncate(dim);
                    if dim == 9 {
                        x[6..].fill(0.0);
                    }
                    x
                }
            };
            let form = GoldmanForm {
                name: kind.to_string(),
                dim,
                chart: holonomy,
                cfg: fd,
            };
            let (a, b) = (parse_reals(u, "--u")?, parse_reals(v, "--v")?);
            for (name, w) in [("--m", &x), ("--u", &a), ("--v", &b)] {
                if w.len() != dim {
                    return Err(CliError::Input(format!("{name}: expected {dim} coordinates, got {}", w.len())));
                }
            }
            let g = form.gram(&x)?;
            let val: f64 = (0..dim).map(|i| (0..dim).map(|j| a[i] * g[i][j] * b[j]).sum::<f64>()).sum();
            json!({"value": r(val), "at": rv(&x), "fd": fd})
        }
    };
    Ok(json!({"kind": kind.to_string(), "value": value}))
}
