//! Points of Teichmüller space in shear and Fenchel–Nielsen charts.
//!
//! Holonomy is only defined up to conjugation and sign, so every comparison
//! in this crate goes through traces of a fixed word panel.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, q_from_f64, q_to_f64, Q};
use crate::mat2::{hyperbolic_frame, ideal_det, IdealPoint, Mat2, RMat, Scalar};
use crate::surface::{build_presentation, reduce_word, CurveRef, CurveWord, GroupPresentation, Letter, SurfaceSig, WeightedMulticurve};
use crate::traintrack::{self, validate_weights, SpiralLayout, TrainTrack, WeightSystem};

/// Tolerance on `|det − 1|` for holonomy matrices.
pub const DET_TOL: f64 = 1e-12;
/// Tolerance on the relator residual of a closed-surface holonomy.
pub const RELATOR_TOL: f64 = 1e-9;
/// `|tr| − 2` below this counts as parabolic.
pub const PARABOLIC_TOL: f64 = 1e-10;

/// Generator matrices of a representation of the surface group.
#[derive(Clone, Debug, PartialEq)]
pub struct Holonomy<T> {
    pub generators: Vec<Mat2<T>>,
    pub presentation: Arc<GroupPresentation>,
}

pub type RealHolonomy = Holonomy<f64>;
pub type ComplexHolonomy = Holonomy<Complex64>;

impl<T: Scalar> Holonomy<T> {
    pub fn new(generators: Vec<Mat2<T>>, presentation: Arc<GroupPresentation>) -> Result<Self> {
        if generators.len() != presentation.rank() {
            return Err(Error::DimensionMismatch {
                expected: presentation.rank(),
                got: generators.len(),
            });
        }
        for (i, g) in generators.iter().enumerate() {
            if !g.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Self {
            generators,
            presentation,
        })
    }

    pub fn letter(&self, l: Letter) -> Mat2<T> {
        let g = self.generators[l.generator];
        if l.inverse {
            g.inv()
        } else {
            g
        }
    }

    pub fn eval(&self, w: &CurveWord) -> Mat2<T> {
        w.letters
            .iter()
            .fold(Mat2::identity(), |acc, &l| acc * self.letter(l))
    }

    pub fn trace(&self, w: &CurveWord) -> T {
        self.eval(w).trace()
    }

    pub fn trace_panel(&self, words: &[CurveWord]) -> Vec<T> {
        words.iter().map(|w| self.trace(w)).collect()
    }

    /// Largest `min ‖ρ(r) ∓ Id‖` over the relators; 0 for free presentations.
    pub fn relator_residual(&self) -> f64 {
        self.presentation
            .relators
            .iter()
            .map(|r| self.eval(r).distance_to_pm_identity())
            .fold(0.0, f64::max)
    }

    pub fn det_residual(&self) -> f64 {
        self.generators
            .iter()
            .map(|g| (g.det() - T::one()).modulus())
            .fold(0.0, f64::max)
    }

    /// `|tr| − 2` on every peripheral word.
    pub fn cusp_residuals(&self) -> Vec<f64> {
        self.presentation
            .peripherals
            .iter()
            .map(|p| (self.trace(p).modulus() - 2.0).abs())
            .collect()
    }

    pub fn conjugate(&self, g: &Mat2<T>) -> Self {
        Self {
            generators: self.generators.iter().map(|m| m.conj_by(g)).collect(),
            presentation: self.presentation.clone(),
        }
    }

    pub fn check(&self) -> Result<()> {
        let d = self.det_residual();
        if d > DET_TOL {
            return Err(Error::RelatorResidual {
                residual: d,
                tolerance: DET_TOL,
            });
        }
        let r = self.relator_residual();
        if r > RELATOR_TOL {
            return Err(Error::RelatorResidual {
                residual: r,
                tolerance: RELATOR_TOL,
            });
        }
        Ok(())
    }
}

impl Holonomy<f64> {
    pub fn to_complex(&self) -> ComplexHolonomy {
        Holonomy {
            generators: self.generators.iter().map(RMat::to_complex).collect(),
            presentation: self.presentation.clone(),
        }
    }
}

/// Largest relative difference between two trace panels, compared on
/// `tr²` so the PSL sign ambiguity drops out.
pub fn panel_distance<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let (x2, y2) = (x * x, y * y);
            (x2 - y2).modulus() / (1.0f64).max(x2.modulus())
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLength {
    #[serde(with = "crate::serial::real")]
    pub length: f64,
    pub parabolic: bool,
}

/// `ℓ = 2 arccosh(|tr|/2)`; `|tr| = 2` gives 0 flagged parabolic.
pub fn length_from_trace(tr: f64) -> Result<TraceLength> {
    let a = tr.abs();
    if !a.is_finite() {
        return Err(Error::NonFinite(0));
    }
    if a < 2.0 - PARABOLIC_TOL {
        return Err(Error::Elliptic(a));
    }
    if a <= 2.0 + PARABOLIC_TOL {
        return Ok(TraceLength {
            length: 0.0,
            parabolic: true,
        });
    }
    Ok(TraceLength {
        length: 2.0 * (a / 2.0).acosh(),
        parabolic: false,
    })
}

pub fn trace_length(rho: &RealHolonomy, w: &CurveWord) -> Result<TraceLength> {
    length_from_trace(rho.trace(w))
}

/// Deterministic panel of distinct cyclically reduced words, starting with
/// the generators and the given extra words.
pub fn word_panel(rank: usize, extra: &[CurveWord], size: usize, seed: u64) -> Vec<CurveWord> {
    let mut out: Vec<CurveWord> = Vec::new();
    let push = |w: CurveWord, out: &mut Vec<CurveWord>| {
        let w = reduce_word(&w, true);
        let w = CurveWord::new(w.letters);
        if !w.is_empty() && !out.contains(&w) && !out.contains(&w.inverse()) {
            out.push(w);
        }
    };
    for g in 0..rank {
        push(CurveWord::generator(g), &mut out);
    }
    for w in extra {
        push(w.clone(), &mut out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < size {
        let len = rng.random_range(2..=6);
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        while letters.len() < len {
            let l = Letter::new(rng.random_range(0..rank), rng.random_bool(0.5));
            if letters.last() != Some(&l.inv()) {
                letters.push(l);
            }
        }
        push(CurveWord::new(letters), &mut out);
    }
    out.truncate(size);
    out
}

/// Substitutes `images[g]` for each generator `g`, then freely reduces.
pub fn substitute(w: &CurveWord, images: &[CurveWord]) -> CurveWord {
    let mut out = CurveWord::default();
    for l in &w.letters {
        let img = &images[l.generator];
        out = out.concat(&if l.inverse { img.inverse() } else { img.clone() });
    }
    CurveWord::new(reduce_word(&out, false).letters)
}

// ---------------------------------------------------------------------------
// Shear charts

/// Charts whose coordinates are transverse cocycles on a train track.
pub trait CocycleChart {
    fn track(&self) -> &TrainTrack;
    /// Shear coordinates read as a weight system on the chart's track.
    fn cocycle_of(&self, sigma: &ShearCoordinates) -> Result<WeightSystem>;
}

/// Per-edge shears; exact rationals so earthquakes add without rounding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShearCoordinates {
    #[serde(with = "crate::serial::rational_vec")]
    pub values: Vec<Q>,
    pub complete: bool,
}

impl ShearCoordinates {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(q_to_f64).collect()
    }
}

/// Ideal triangulation of a punctured surface with its dual track.
///
/// Triangles list their edges counter-clockwise on sides 0, 1, 2.
/// `gluing[t][i]` is the `(triangle, side)` glued to side `i` of `t`.
/// A generator is a loop in the dual graph, given by the sides it exits
/// through starting from the base `(triangle, side)` frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShearChartSpec {
    pub name: String,
    pub surface: SurfaceSig,
    pub edges: Vec<String>,
    pub triangles: Vec<[usize; 3]>,
    pub gluing: Vec<[(usize, usize); 3]>,
    pub base: (usize, usize),
    pub generators: Vec<Vec<usize>>,
    pub track: TrainTrack,
    /// Track weight of edge `e` is `weight_signs[e] · shear(e)`.
    pub weight_signs: Vec<i8>,
    #[serde(with = "crate::serial::rational_rows")]
    pub puncture_rows: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ShearChartSpec", into = "ShearChartSpec")]
pub struct ShearChart {
    spec: ShearChartSpec,
    #[serde(skip)]
    presentation: Arc<GroupPresentation>,
    #[serde(skip)]
    complete_basis: Vec<Vec<Q>>,
}

impl TryFrom<ShearChartSpec> for ShearChart {
    type Error = Error;
    fn try_from(s: ShearChartSpec) -> Result<Self> {
        ShearChart::new(s)
    }
}

impl From<ShearChart> for ShearChartSpec {
    fn from(c: ShearChart) -> Self {
        c.spec
    }
}

fn bad(msg: String) -> Error {
    Error::InvalidTrack(msg)
}

impl ShearChart {
    pub fn new(spec: ShearChartSpec) -> Result<Self> {
        let presentation = build_presentation(spec.surface)?;
        if spec.surface.is_closed() {
            return Err(bad("shear charts need a punctured surface".into()));
        }
        let n = spec.edges.len();
        let nt = spec.triangles.len();
        if spec.gluing.len() != nt {
            return Err(bad("gluing table size differs from triangle count".into()));
        }
        let mut slots = vec![0usize; n];
        for (t, tri) in spec.triangles.iter().enumerate() {
            for (i, &e) in tri.iter().enumerate() {
                if e >= n {
                    return Err(bad(format!("triangle {t} names edge {e}")));
                }
                slots[e] += 1;
                let (t2, i2) = spec.gluing[t][i];
                if t2 >= nt || i2 > 2 || spec.gluing[t2][i2] != (t, i) || spec.triangles[t2][i2] != e {
                    return Err(bad(format!("side {i} of triangle {t} is glued inconsistently")));
                }
            }
        }
        if slots.iter().any(|&k| k != 2) {
            return Err(bad("every edge must bound exactly two triangle sides".into()));
        }
        if spec.base.0 >= nt || spec.base.1 > 2 {
            return Err(bad("base frame out of range".into()));
        }
        if spec.generators.len() != presentation.rank() {
            return Err(bad(format!(
                "{} generator loops for a free group of rank {}",
                spec.generators.len(),
                presentation.rank()
            )));
        }
        for (g, path) in spec.generators.iter().enumerate() {
            let (t, _) = walk(&spec, path);
            if t != spec.base.0 || path.iter().any(|&s| s > 2) {
                return Err(bad(format!("generator loop {g} does not close at the base triangle")));
            }
        }
        if spec.track.edge_count() != n || spec.weight_signs.len() != n {
            return Err(bad("dual track edges do not match the triangulation".into()));
        }
        if spec.weight_signs.iter().any(|s| s.abs() != 1) {
            return Err(bad("weight signs must be ±1".into()));
        }
        if spec.track.switches().len() != nt {
            return Err(bad("dual track needs one switch per triangle".into()));
        }
        for (t, sw) in spec.track.switches().iter().enumerate() {
            let mut a = [sw.incoming, sw.out_plus, sw.out_minus];
            let mut b = spec.triangles[t];
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(bad(format!("switch {t} does not mirror the corners of triangle {t}")));
            }
        }
        if spec.puncture_rows.iter().any(|r| r.len() != n) {
            return Err(bad("puncture row length differs from edge count".into()));
        }
        let complete_basis = exact::nullspace(&spec.puncture_rows, n);
        let chart = Self {
            spec,
            presentation: Arc::new(presentation),
            complete_basis,
        };
        // Complete shears and track weights must describe the same space.
        let dim = chart.spec.track.dimension();
        if dim != chart.complete_basis.len() {
            return Err(bad(format!(
                "track weight space has dimension {dim}, complete shears {}",
                chart.complete_basis.len()
            )));
        }
        for b in &chart.complete_basis {
            validate_weights(&chart.spec.track, chart.signed(b))?;
        }
        Ok(chart)
    }

    pub fn spec(&self) -> &ShearChartSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn surface(&self) -> SurfaceSig {
        self.spec.surface
    }

    pub fn presentation(&self) -> &Arc<GroupPresentation> {
        &self.presentation
    }

    pub fn edge_count(&self) -> usize {
        self.spec.edges.len()
    }

    /// Basis of the complete shears (kernel of the puncture rows).
    pub fn complete_basis(&self) -> &[Vec<Q>] {
        &self.complete_basis
    }

    /// Dimension after imposing the puncture rows.
    pub fn dim(&self) -> usize {
        self.complete_basis.len()
    }

    fn signed(&self, v: &[Q]) -> Vec<Q> {
        v.iter()
            .zip(&self.spec.weight_signs)
            .map(|(x, &s)| if s < 0 { -x.clone() } else { x.clone() })
            .collect()
    }

    pub fn coords(&self, values: Vec<Q>) -> Result<ShearCoordinates> {
        if values.len() != self.edge_count() {
            return Err(Error::DimensionMismatch {
                expected: self.edge_count(),
                got: values.len(),
            });
        }
        let complete = self
            .spec
            .puncture_rows
            .iter()
            .all(|r| exact::dot(r, &values).is_zero());
        Ok(ShearCoordinates { values, complete })
    }

    /// Exact rational image of finite floats.
    pub fn coords_f64(&self, values: &[f64]) -> Result<ShearCoordinates> {
        let qs = values
            .iter()
            .enumerate()
            .map(|(i, &x)| q_from_f64(x).ok_or(Error::NonFinite(i)))
            .collect::<Result<Vec<_>>>()?;
        self.coords(qs)
    }

    /// `Σ x_i b_i` over the complete basis.
    pub fn from_reduced(&self, x: &[f64]) -> Result<ShearCoordinates> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let xs = x
            .iter()
            .enumerate()
            .map(|(i, &v)| q_from_f64(v).ok_or(Error::NonFinite(i)))
            .collect::<Result<Vec<_>>>()?;
        self.from_reduced_exact(&xs)
    }

    pub fn from_reduced_exact(&self, x: &[Q]) -> Result<ShearCoordinates> {
        let mut v = vec![Q::zero(); self.edge_count()];
        for (c, b) in x.iter().zip(&self.complete_basis) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += c * bi;
            }
        }
        self.coords(v)
    }

    pub fn to_reduced(&self, sigma: &ShearCoordinates) -> Option<Vec<Q>> {
        exact::solve_in_span(&self.complete_basis, &sigma.values)
    }

    /// Basis of the complete shears as weight systems on the dual track.
    pub fn cocycle_basis(&self) -> Vec<WeightSystem> {
        self.complete_basis
            .iter()
            .map(|b| validate_weights(&self.spec.track, self.signed(b)).expect("checked at construction"))
            .collect()
    }

    /// Shears of a weight system on the dual track.
    pub fn shears_of(&self, w: &WeightSystem) -> Result<ShearCoordinates> {
        if w.track != self.spec.track.id() {
            return Err(Error::TrackMismatch);
        }
        self.coords(self.signed(&w.weights))
    }

    /// Same chart with the base frame moved along the dual path `path`,
    /// ending with a turn to side `side`. Generators are conjugated by the
    /// path and U-turns cancelled.
    pub fn rebase(&self, path: &[usize], side: usize) -> Result<Self> {
        let (t_new, arrivals) = walk(&self.spec, path);
        if t_new == usize::MAX || side > 2 {
            return Err(bad("rebase path leaves the triangulation".into()));
        }
        // Reverse path: exit through each arrival side in turn.
        let back: Vec<usize> = arrivals.iter().rev().copied().collect();
        let mut spec = self.spec.clone();
        spec.base = (t_new, side);
        spec.generators = self
            .spec
            .generators
            .iter()
            .map(|g| {
                let mut p = back.clone();
                p.extend_from_slice(g);
                p.extend_from_slice(path);
                cancel_uturns(&spec, p)
            })
            .collect();
        Self::new(spec)
    }
}

impl CocycleChart for ShearChart {
    fn track(&self) -> &TrainTrack {
        &self.spec.track
    }

    fn cocycle_of(&self, sigma: &ShearCoordinates) -> Result<WeightSystem> {
        if sigma.values.len() != self.edge_count() {
            return Err(Error::TrackMismatch);
        }
        validate_weights(&self.spec.track, self.signed(&sigma.values))
    }
}

// Follows exits from the base; returns the final triangle and arrival sides.
fn walk(spec: &ShearChartSpec, path: &[usize]) -> (usize, Vec<usize>) {
    let mut t = spec.base.0;
    let mut arrivals = Vec::with_capacity(path.len());
    for &x in path {
        if x > 2 {
            return (usize::MAX, arrivals);
        }
        let (t2, s2) = spec.gluing[t][x];
        arrivals.push(s2);
        t = t2;
    }
    (t, arrivals)
}

fn cancel_uturns(spec: &ShearChartSpec, mut p: Vec<usize>) -> Vec<usize> {
    loop {
        let (_, arrivals) = walk(spec, &p);
        let hit = (1..p.len()).find(|&k| p[k] == arrivals[k - 1]);
        match hit {
            Some(k) => {
                p.drain(k - 1..=k);
            }
            None => return p,
        }
    }
}

fn turn<T: Scalar>(from: usize, to: usize) -> Mat2<T> {
    let one = T::one();
    let z = T::zero();
    let r = Mat2::new(one, one, -one, z);
    if from == to {
        Mat2::identity()
    } else if to == (from + 1) % 3 {
        r
    } else {
        r * r
    }
}

fn cross<T: Scalar>(s: T) -> Mat2<T> {
    let h = s.scale(0.5);
    Mat2::new(T::zero(), h.exp(), -(-h).exp(), T::zero())
}

/// Holonomy over any scalar field; complex shears give shear-bend holonomy.
pub fn shear_holonomy<T: Scalar>(chart: &ShearChart, values: &[T]) -> Result<Holonomy<T>> {
    if values.len() != chart.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: chart.edge_count(),
            got: values.len(),
        });
    }
    let spec = &chart.spec;
    let gens = spec
        .generators
        .iter()
        .map(|path| {
            let (mut t, mut side) = spec.base;
            let mut m = Mat2::<T>::identity();
            for &x in path {
                m = m * turn(side, x) * cross(values[spec.triangles[t][x]]);
                (t, side) = spec.gluing[t][x];
            }
            m * turn(side, spec.base.1)
        })
        .collect();
    Holonomy::new(gens, chart.presentation.clone())
}

pub fn holonomy_from_shear(chart: &ShearChart, sigma: &ShearCoordinates) -> Result<RealHolonomy> {
    shear_holonomy(chart, &sigma.to_f64())
}

/// `Ω_Th(σ_m, τ)` on the chart's track, uncalibrated.
pub fn cocycle_length<C: CocycleChart>(chart: &C, sigma: &ShearCoordinates, tau: &WeightSystem) -> Result<Q> {
    let s = chart.cocycle_of(sigma)?;
    traintrack::thurston_form(chart.track(), &s, tau)
}

/// Two-triangle ideal triangulation of the once-punctured torus.
///
/// Generator `a` crosses edges `x, z`, generator `b` crosses `y, z`; the
/// peripheral `[a,b]` is parabolic exactly when `x + y + z = 0`.
pub fn punctured_torus_chart() -> ShearChart {
    let track = traintrack::torus_two_switch();
    ShearChart::new(ShearChartSpec {
        name: "t11".into(),
        surface: SurfaceSig {
            genus: 1,
            punctures: 1,
        },
        edges: vec!["x".into(), "y".into(), "z".into()],
        triangles: vec![[0, 1, 2], [0, 1, 2]],
        gluing: vec![[(1, 0), (1, 1), (1, 2)], [(0, 0), (0, 1), (0, 2)]],
        base: (0, 2),
        generators: vec![vec![0, 2], vec![1, 2]],
        track,
        weight_signs: vec![1, 1, -1],
        puncture_rows: vec![vec![exact::q(1), exact::q(1), exact::q(1)]],
    })
    .expect("static chart")
}

// ---------------------------------------------------------------------------
// Curve-adapted spiral charts on the punctured torus

/// Chart of the maximal lamination made of a closed curve `γ` and three
/// leaves spiralling onto it (both sides spiralling towards the attracting
/// end). `partner` completes `γ` to a marking with `[γ, partner]` conjugate
/// to `[a, b]`.
///
/// The loop base weight (the twist part of the cocycle) is not extracted
/// and is set to zero; the length pairing does not see it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpiralChart {
    pub curve: CurveWord,
    pub partner: CurveWord,
    #[serde(skip, default = "spiral_track")]
    track: (TrainTrack, SpiralLayout),
}

fn spiral_track() -> (TrainTrack, SpiralLayout) {
    traintrack::punctured_torus_spiral()
}

/// Shears read off a holonomy in a [`SpiralChart`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpiralExtraction {
    pub coords: ShearCoordinates,
    /// Shear of the leaf joining the two sides of the curve.
    pub s0: f64,
    /// Shears of the two cusp leaves; equal for a complete structure.
    pub s1: f64,
    pub s2: f64,
}

impl SpiralExtraction {
    /// How far the cusp leaves are from the puncture row `s12 = 0`.
    pub fn puncture_residual(&self) -> f64 {
        self.s1.abs().max(self.s2.abs())
    }
}

impl SpiralChart {
    pub fn new(curve: CurveWord, partner: CurveWord) -> Self {
        Self {
            curve,
            partner,
            track: spiral_track(),
        }
    }

    pub fn layout(&self) -> &SpiralLayout {
        &self.track.1
    }

    /// The closed leaf as a carried curve with unit weight.
    pub fn curve_cocycle(&self) -> WeightSystem {
        let (t, lay) = &self.track;
        traintrack::carried_cocycle(t, lay.loop_counts(0, t.edge_count())).expect("loop is carried")
    }

    pub fn extract(&self, rho: &RealHolonomy) -> Result<SpiralExtraction> {
        let w = rho.eval(&self.curve);
        let u = rho.eval(&self.partner);
        let bm = u * w.inv() * u.inv();
        let c = w * bm;
        let pa = w.fixed_point(true).ok_or(Error::Elliptic(w.trace().abs()))?;
        let pb = bm.fixed_point(true).ok_or(Error::Elliptic(bm.trace().abs()))?;
        let pc = c.parabolic_fixed_point();
        let s0 = shear(pa, pb, w.inv().apply_ideal(pc), pc);
        let s1 = shear(pa, pc, pb, w.apply_ideal(pb));
        let s2 = shear(pb, pc, pa, bm.inv().apply_ideal(pa));
        if !(s0.is_finite() && s1.is_finite() && s2.is_finite()) {
            return Err(Error::FiniteDifference("degenerate spiral cross-ratio".into()));
        }
        let (t, lay) = &self.track;
        let mut pins: Vec<(usize, Q)> = vec![(lay.branches[0], q_from_f64(s0).ok_or(Error::NonFinite(0))?)];
        // Puncture row: the cusp-leaf shear is zero; its numerical value is
        // reported through `puncture_residual`.
        pins.push((lay.branches[1], Q::zero()));
        pins.push((lay.loop_segments[0][lay.loop_segments[0].len() - 1], Q::zero()));
        let weights = solve_pinned(t, &pins)?;
        Ok(SpiralExtraction {
            coords: ShearCoordinates {
                values: weights,
                complete: true,
            },
            s0,
            s1,
            s2,
        })
    }
}

impl CocycleChart for SpiralChart {
    fn track(&self) -> &TrainTrack {
        &self.track.0
    }

    fn cocycle_of(&self, sigma: &ShearCoordinates) -> Result<WeightSystem> {
        validate_weights(&self.track.0, sigma.values.clone())
    }
}

fn solve_pinned(t: &TrainTrack, pins: &[(usize, Q)]) -> Result<Vec<Q>> {
    let basis = traintrack::weight_space_basis(t);
    let restricted: Vec<Vec<Q>> = basis
        .iter()
        .map(|b| pins.iter().map(|(e, _)| b.weights[*e].clone()).collect())
        .collect();
    let target: Vec<Q> = pins.iter().map(|(_, v)| v.clone()).collect();
    if exact::rank(&restricted) != basis.len() {
        return Err(Error::Singular("pinned edges do not determine the weights".into()));
    }
    let c = exact::solve_in_span(&restricted, &target)
        .ok_or_else(|| Error::Singular("pinned values are inconsistent".into()))?;
    let mut w = vec![Q::zero(); t.edge_count()];
    for (ci, b) in c.iter().zip(&basis) {
        for (wi, bi) in w.iter_mut().zip(&b.weights) {
            *wi += ci * bi;
        }
    }
    Ok(w)
}

fn cyclic_key(p: IdealPoint) -> f64 {
    // Increasing along ℝ ∪ {∞} in the counter-clockwise direction.
    let q = if p.1 > 0.0 || (p.1 == 0.0 && p.0 > 0.0) { p } else { (-p.0, -p.1) };
    -q.1.atan2(q.0)
}

fn cyclically_between(s: f64, e: f64, t: f64) -> bool {
    if s < e {
        s < t && t < e
    } else {
        t > s || t < e
    }
}

/// Shear of the edge `(u, v)` with third vertices `w1`, `w2` on either side:
/// the log of minus the cross-ratio, positive when the triangles slide left.
pub fn shear(u: IdealPoint, v: IdealPoint, w1: IdealPoint, w2: IdealPoint) -> f64 {
    let (wp, w) = if cyclically_between(cyclic_key(u), cyclic_key(v), cyclic_key(w1)) {
        (w1, w2)
    } else {
        (w2, w1)
    };
    let cr = ideal_det(wp, u) * ideal_det(w, v) / (ideal_det(wp, v) * ideal_det(w, u));
    (-cr).ln()
}

/// Curve-adapted charts for distinct simple closed curves, found by
/// applying the orientation-preserving remarkings `(a,b) ↦ (a,ba)`,
/// `(a,b) ↦ (ab,b)` and `(a,b) ↦ (b,a⁻¹)` breadth first.
pub fn spiral_charts(count: usize) -> Vec<SpiralChart> {
    let a = CurveWord::generator(0);
    let b = CurveWord::generator(1);
    let mut queue = std::collections::VecDeque::from([(a, b)]);
    let mut seen: Vec<CurveWord> = Vec::new();
    let mut out = Vec::new();
    while let Some((x, y)) = queue.pop_front() {
        if out.len() >= count {
            break;
        }
        let key = reduce_word(&x, true);
        let key = CurveWord::new(key.letters);
        let is_new = !seen.iter().any(|s| cyclic_equal(s, &key) || cyclic_equal(s, &key.inverse()));
        if is_new {
            seen.push(key);
            out.push(SpiralChart::new(x.clone(), y.clone()));
        }
        let r = |w: CurveWord| CurveWord::new(reduce_word(&w, false).letters);
        queue.push_back((x.clone(), r(y.concat(&x))));
        queue.push_back((r(x.concat(&y)), y.clone()));
        queue.push_back((y.clone(), x.inverse()));
    }
    out
}

fn cyclic_equal(a: &CurveWord, b: &CurveWord) -> bool {
    let n = a.len();
    n == b.len() && (0..n.max(1)).any(|k| (0..n).all(|i| a.letters[(i + k) % n] == b.letters[i]))
}

// ---------------------------------------------------------------------------
// Fenchel–Nielsen charts

/// Pants decomposition data. The only layout built in is the genus-2
/// dumbbell: `γ1 = a1`, `γ2 = a2`, `γ3 = [a1, b1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnChart {
    pub name: String,
    pub surface: SurfaceSig,
    pub curves: Vec<PantsCurve>,
    /// Each pants lists its three boundary curves.
    pub pants: Vec<[usize; 3]>,
    pub layout: FnLayout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PantsCurve {
    pub name: String,
    pub word: CurveWord,
    /// +1 when increasing the twist rotates the left side forward.
    pub twist_sign: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FnLayout {
    GenusTwoDumbbell,
}

impl FnChart {
    pub fn genus_two() -> Self {
        let w = |xs: &[i64]| CurveWord::from_signed(xs).expect("static word");
        Self {
            name: "g2".into(),
            surface: SurfaceSig {
                genus: 2,
                punctures: 0,
            },
            curves: vec![
                PantsCurve { name: "gamma1".into(), word: w(&[1]), twist_sign: 1 },
                PantsCurve { name: "gamma2".into(), word: w(&[3]), twist_sign: 1 },
                PantsCurve { name: "gamma3".into(), word: w(&[1, 2, -1, -2]), twist_sign: 1 },
            ],
            pants: vec![[0, 0, 2], [1, 1, 2]],
            layout: FnLayout::GenusTwoDumbbell,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.surface.genus as usize;
        if !self.surface.is_closed() || g < 2 {
            return Err(bad("FN charts are for closed surfaces of genus ≥ 2".into()));
        }
        if self.curves.len() != 3 * g - 3 || self.pants.len() != 2 * g - 2 {
            return Err(bad("wrong number of pants curves or pants".into()));
        }
        let mut count = vec![0; self.curves.len()];
        for p in &self.pants {
            for &c in p {
                if c >= count.len() {
                    return Err(bad(format!("pants boundary {c} out of range")));
                }
                count[c] += 1;
            }
        }
        if count.iter().any(|&k| k != 2) {
            return Err(bad("every pants curve must bound exactly two pants cuffs".into()));
        }
        if self.layout == FnLayout::GenusTwoDumbbell && g != 2 {
            return Err(bad("dumbbell layout needs genus 2".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.curves.len()
    }

    pub fn presentation(&self) -> Result<GroupPresentation> {
        build_presentation(self.surface)
    }

    pub fn curve_word(&self, i: usize) -> Result<&CurveWord> {
        self.curves
            .get(i)
            .map(|c| &c.word)
            .ok_or_else(|| Error::UnknownCurve(format!("gamma{}", i + 1)))
    }
}

/// Lengths and twists (both in hyperbolic length units).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnCoordinates {
    #[serde(with = "crate::serial::real_vec")]
    pub lengths: Vec<f64>,
    #[serde(with = "crate::serial::real_vec")]
    pub twists: Vec<f64>,
}

impl FnCoordinates {
    pub fn new(lengths: Vec<f64>, twists: Vec<f64>) -> Result<Self> {
        if lengths.len() != twists.len() {
            return Err(Error::DimensionMismatch {
                expected: lengths.len(),
                got: twists.len(),
            });
        }
        for (i, &l) in lengths.iter().enumerate() {
            if !l.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if l <= 0.0 {
                return Err(Error::NonPositiveLength { index: i, value: l });
            }
        }
        if let Some(i) = twists.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite(lengths.len() + i));
        }
        Ok(Self { lengths, twists })
    }

    /// `(ℓ₁, …, ℓₖ, τ₁, …, τₖ)`.
    pub fn from_flat(x: &[f64]) -> Result<Self> {
        let k = x.len() / 2;
        Self::new(x[..k].to_vec(), x[k..].to_vec())
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.lengths.clone();
        v.extend_from_slice(&self.twists);
        v
    }
}

fn one_holed_torus<T: Scalar>(l: f64, twist: T, boundary: f64) -> (RMat, RMat, Mat2<T>) {
    let a = RMat::translation(l);
    let s = ((boundary / 4.0).cosh() / (l / 2.0).sinh()).asinh();
    let b0 = RMat::new(s.cosh(), s.sinh(), s.sinh(), s.cosh());
    let b = lift(&b0) * Mat2::translation(twist);
    (a, b0, b)
}

fn lift<T: Scalar>(m: &RMat) -> Mat2<T> {
    Mat2::new(T::from_real(m.a), T::from_real(m.b), T::from_real(m.c), T::from_real(m.d))
}

// Frame at the foot of the common perpendicular from the `A` axis to the
// boundary axis: boundary attracting end at ∞, foot at height 1.
fn seam_frame(a: &RMat, b0: &RMat) -> Result<RMat> {
    let k = *a * *b0 * a.inv() * b0.inv();
    let (n, _) = hyperbolic_frame(&k).ok_or(Error::Elliptic(k.trace().abs()))?;
    let prod = n.b * n.d / (n.a * n.c);
    if !(prod > 0.0) {
        return Err(Error::Singular("seam foot is not on the boundary axis".into()));
    }
    Ok(n * RMat::translation(0.5 * prod.ln()))
}

/// Dumbbell gluing of two one-holed tori along `γ3`, with real lengths and
/// twists in any scalar field (complex twists give grafted holonomy).
pub fn fn_holonomy<T: Scalar>(chart: &FnChart, lengths: &[f64], twists: &[T]) -> Result<Holonomy<T>> {
    chart.validate()?;
    for (i, &l) in lengths.iter().enumerate() {
        if !(l > 0.0) {
            return Err(Error::NonPositiveLength { index: i, value: l });
        }
    }
    if lengths.len() != 3 || twists.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: lengths.len().min(twists.len()),
        });
    }
    let (l1, l2, l3) = (lengths[0], lengths[1], lengths[2]);
    let sgn = |i: usize| twists[i].scale(f64::from(chart.curves[i].twist_sign));
    let (a1, b01, b1) = one_holed_torus(l1, sgn(0), l3);
    let (a2, b02, b2) = one_holed_torus(l2, sgn(1), l3);
    let f1 = seam_frame(&a1, &b01)?;
    let f2 = seam_frame(&a2, &b02)?;
    let g1: Mat2<T> = lift(&f1.inv());
    let f1: Mat2<T> = lift(&f1);
    // The second torus sits on the other side of the seam: rotate by π.
    let w = RMat::new(0.0, -1.0, 1.0, 0.0);
    let g2 = Mat2::translation(sgn(2)) * lift(&(w * f2.inv()));
    let g2i = g2.inv();
    let gens = vec![
        g1 * lift(&a1) * f1,
        g1 * b1 * f1,
        g2 * lift(&a2) * g2i,
        g2 * b2 * g2i,
    ];
    let h = Holonomy::new(gens, Arc::new(chart.presentation()?))?;
    let r = h.relator_residual();
    if r > RELATOR_TOL {
        return Err(Error::RelatorResidual {
            residual: r,
            tolerance: RELATOR_TOL,
        });
    }
    Ok(h)
}

pub fn holonomy_from_fn(chart: &FnChart, x: &FnCoordinates) -> Result<RealHolonomy> {
    fn_holonomy(chart, &x.lengths, &x.twists)
}

/// Grafted holonomy: twist `τᵢ + i·bendᵢ`.
pub fn holonomy_from_fn_complex(chart: &FnChart, x: &FnCoordinates, bend: &[f64]) -> Result<ComplexHolonomy> {
    let tw: Vec<Complex64> = x
        .twists
        .iter()
        .zip(bend)
        .map(|(&t, &b)| Complex64::new(t, b))
        .collect();
    fn_holonomy(chart, &x.lengths, &tw)
}

// ---------------------------------------------------------------------------
// Points

#[derive(Clone, Debug)]
pub enum ChartPoint {
    Shear {
        chart: Arc<ShearChart>,
        coords: ShearCoordinates,
    },
    Fn {
        chart: Arc<FnChart>,
        coords: FnCoordinates,
    },
}

/// A point of Teichmüller space in a named chart, caching its holonomy.
#[derive(Clone, Debug)]
pub struct TeichPoint {
    point: ChartPoint,
    holonomy: OnceLock<RealHolonomy>,
}

impl PartialEq for TeichPoint {
    fn eq(&self, other: &Self) -> bool {
        match (&self.point, &other.point) {
            (ChartPoint::Shear { chart: c1, coords: x1 }, ChartPoint::Shear { chart: c2, coords: x2 }) => {
                c1 == c2 && x1 == x2
            }
            (ChartPoint::Fn { chart: c1, coords: x1 }, ChartPoint::Fn { chart: c2, coords: x2 }) => {
                c1 == c2 && x1 == x2
            }
            _ => false,
        }
    }
}

impl TeichPoint {
    pub fn shear(chart: Arc<ShearChart>, coords: ShearCoordinates) -> Result<Self> {
        if coords.values.len() != chart.edge_count() {
            return Err(Error::DimensionMismatch {
                expected: chart.edge_count(),
                got: coords.values.len(),
            });
        }
        Ok(Self {
            point: ChartPoint::Shear { chart, coords },
            holonomy: OnceLock::new(),
        })
    }

    pub fn fn_point(chart: Arc<FnChart>, coords: FnCoordinates) -> Result<Self> {
        chart.validate()?;
        if coords.lengths.len() != chart.curves.len() {
            return Err(Error::DimensionMismatch {
                expected: chart.curves.len(),
                got: coords.lengths.len(),
            });
        }
        Ok(Self {
            point: ChartPoint::Fn { chart, coords },
            holonomy: OnceLock::new(),
        })
    }

    pub fn chart_point(&self) -> &ChartPoint {
        &self.point
    }

    pub fn holonomy(&self) -> Result<&RealHolonomy> {
        if let Some(h) = self.holonomy.get() {
            return Ok(h);
        }
        let h = match &self.point {
            ChartPoint::Shear { chart, coords } => holonomy_from_shear(chart, coords)?,
            ChartPoint::Fn { chart, coords } => holonomy_from_fn(chart, coords)?,
        };
        Ok(self.holonomy.get_or_init(|| h))
    }

    /// Chart coordinates as floats: reduced complete shears or `(ℓ, τ)`.
    pub fn chart_vector(&self) -> Vec<f64> {
        match &self.point {
            ChartPoint::Shear { chart, coords } => chart
                .to_reduced(coords)
                .map(|v| v.iter().map(q_to_f64).collect())
                .unwrap_or_else(|| coords.to_f64()),
            ChartPoint::Fn { coords, .. } => coords.flat(),
        }
    }

    pub fn trace_panel(&self, words: &[CurveWord]) -> Result<Vec<f64>> {
        Ok(self.holonomy()?.trace_panel(words))
    }

    pub fn resolve_curve(&self, c: &CurveRef) -> Result<CurveWord> {
        match (c, &self.point) {
            (CurveRef::Word(w), _) => Ok(w.clone()),
            (CurveRef::ChartCurve(i), ChartPoint::Fn { chart, .. }) => chart.curve_word(*i).cloned(),
            (CurveRef::ChartCurve(_), ChartPoint::Shear { .. }) => Err(Error::UnknownCurve(c.to_string())),
        }
    }
}

/// `Σ wᵢ · ℓ(γᵢ)` from trace lengths.
pub fn lamination_length(m: &TeichPoint, l: &WeightedMulticurve) -> Result<f64> {
    let rho = m.holonomy()?;
    let mut total = 0.0;
    for c in l.components() {
        let w = m.resolve_curve(&c.curve)?;
        total += q_to_f64(&c.weight) * trace_length(rho, &w)?.length;
    }
    Ok(total)
}

/// Recorded per-testbed constants relating this crate's normalizations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// `trace length = κ_L · Ω_Th(σ_m, τ_γ)`.
    #[serde(default, with = "crate::serial::opt_real")]
    pub kappa_l: Option<f64>,
    /// Goldman killing-real pairing relative to ω_WP.
    #[serde(default, with = "crate::serial::opt_real")]
    pub kappa_g: Option<f64>,
    /// Grafting pullback constant.
    #[serde(default, with = "crate::serial::opt_real")]
    pub kappa_gr: Option<f64>,
}
