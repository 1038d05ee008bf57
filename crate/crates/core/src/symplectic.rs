//! Symplectic forms and pullback checks.
//!
//! Goldman forms are evaluated as cup products of group cocycles against the
//! relator `Π[aᵢ, bᵢ]` of a closed surface. Forms on charts are exposed as
//! Gram matrices so that pullbacks reduce to `Jᵀ Ω J`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Q;
use crate::fd::{self, FdConfig};
use crate::lorentz::{cocycle_of_curve, Cocycle};
use crate::mat2::{trace_pairing, Mat2, RMat, Scalar};
use crate::surface::{CurveWord, GroupPresentation, Letter};
use crate::teich::{ComplexHolonomy, Holonomy, RealHolonomy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoldmanKind {
    /// `tr(x v) + tr(u y)` on `𝔰𝔩₂ ⋉ 𝔰𝔩₂`.
    Tr0,
    /// `½ tr(x_L y_L) − ½ tr(x_R y_R)` on `𝔰𝔩₂ × 𝔰𝔩₂`.
    TrMinus1,
    /// `Im tr(z w)` on `𝔰𝔩₂(ℂ)`.
    Tr1,
    /// `tr(x y)` on `𝔰𝔩₂(ℝ)`.
    KillingReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingKind {
    Thurston,
    Cotangent,
    Goldman(GoldmanKind),
}

impl fmt::Display for PairingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairingKind::Thurston => "thurston",
            PairingKind::Cotangent => "cotangent",
            PairingKind::Goldman(GoldmanKind::Tr0) => "goldman-tr0",
            PairingKind::Goldman(GoldmanKind::TrMinus1) => "goldman-tr-1",
            PairingKind::Goldman(GoldmanKind::Tr1) => "goldman-tr1",
            PairingKind::Goldman(GoldmanKind::KillingReal) => "goldman-killing-real",
        })
    }
}

impl FromStr for PairingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "thurston" => PairingKind::Thurston,
            "cotangent" => PairingKind::Cotangent,
            "goldman-tr0" | "tr0" => PairingKind::Goldman(GoldmanKind::Tr0),
            "goldman-tr-1" | "tr-1" => PairingKind::Goldman(GoldmanKind::TrMinus1),
            "goldman-tr1" | "tr1" => PairingKind::Goldman(GoldmanKind::Tr1),
            "goldman-killing-real" | "killing-real" => PairingKind::Goldman(GoldmanKind::KillingReal),
            _ => {
                return Err(Error::PairingKind {
                    kind: s.into(),
                    what: "any form".into(),
                })
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Cup products

/// Group and Lie-algebra operations needed by the cup product.
pub trait Coefficients {
    type G: Copy;
    type A: Copy;
    fn one() -> Self::G;
    fn mul(a: &Self::G, b: &Self::G) -> Self::G;
    fn inv(a: &Self::G) -> Self::G;
    fn ad(g: &Self::G, x: &Self::A) -> Self::A;
    fn add(x: &Self::A, y: &Self::A) -> Self::A;
    fn neg(x: &Self::A) -> Self::A;
    fn zero() -> Self::A;
}

/// `SL₂` over `T`, acting on `𝔰𝔩₂` by conjugation.
pub struct Sl2<T>(std::marker::PhantomData<T>);

impl<T: Scalar> Coefficients for Sl2<T> {
    type G = Mat2<T>;
    type A = Mat2<T>;
    fn one() -> Self::G {
        Mat2::identity()
    }
    fn mul(a: &Self::G, b: &Self::G) -> Self::G {
        *a * *b
    }
    fn inv(a: &Self::G) -> Self::G {
        a.inv()
    }
    fn ad(g: &Self::G, x: &Self::A) -> Self::A {
        x.conj_by(g)
    }
    fn add(x: &Self::A, y: &Self::A) -> Self::A {
        *x + *y
    }
    fn neg(x: &Self::A) -> Self::A {
        -*x
    }
    fn zero() -> Self::A {
        Mat2::zero()
    }
}

/// `SL₂(ℝ) × SL₂(ℝ)`.
pub struct Sl2Pair;

impl Coefficients for Sl2Pair {
    type G = (RMat, RMat);
    type A = (RMat, RMat);
    fn one() -> Self::G {
        (RMat::identity(), RMat::identity())
    }
    fn mul(a: &Self::G, b: &Self::G) -> Self::G {
        (a.0 * b.0, a.1 * b.1)
    }
    fn inv(a: &Self::G) -> Self::G {
        (a.0.inv(), a.1.inv())
    }
    fn ad(g: &Self::G, x: &Self::A) -> Self::A {
        (x.0.conj_by(&g.0), x.1.conj_by(&g.1))
    }
    fn add(x: &Self::A, y: &Self::A) -> Self::A {
        (x.0 + y.0, x.1 + y.1)
    }
    fn neg(x: &Self::A) -> Self::A {
        (-x.0, -x.1)
    }
    fn zero() -> Self::A {
        (RMat::zero(), RMat::zero())
    }
}

/// `SL₂(ℝ) ⋉ 𝔰𝔩₂` with `(A, t)(B, s) = (AB, t + Ad_A s)`.
pub struct Iso21;

impl Coefficients for Iso21 {
    type G = (RMat, RMat);
    type A = (RMat, RMat);
    fn one() -> Self::G {
        (RMat::identity(), RMat::zero())
    }
    fn mul(a: &Self::G, b: &Self::G) -> Self::G {
        (a.0 * b.0, a.1 + b.1.conj_by(&a.0))
    }
    fn inv(a: &Self::G) -> Self::G {
        let ai = a.0.inv();
        (ai, -a.1.conj_by(&ai))
    }
    fn ad(g: &Self::G, x: &Self::A) -> Self::A {
        let ax = x.0.conj_by(&g.0);
        (ax, x.1.conj_by(&g.0) + g.1.commutator(&ax))
    }
    fn add(x: &Self::A, y: &Self::A) -> Self::A {
        (x.0 + y.0, x.1 + y.1)
    }
    fn neg(x: &Self::A) -> Self::A {
        (-x.0, -x.1)
    }
    fn zero() -> Self::A {
        (RMat::zero(), RMat::zero())
    }
}

fn letter_value<C: Coefficients>(rho: &[C::G], u: &[C::A], l: Letter) -> C::A {
    let x = &u[l.generator];
    if l.inverse {
        C::neg(&C::ad(&C::inv(&rho[l.generator]), x))
    } else {
        *x
    }
}

fn letter_group<C: Coefficients>(rho: &[C::G], l: Letter) -> C::G {
    if l.inverse {
        C::inv(&rho[l.generator])
    } else {
        rho[l.generator]
    }
}

/// `u(w)` by the cocycle rule.
pub fn cocycle_eval<C: Coefficients>(rho: &[C::G], u: &[C::A], w: &CurveWord) -> C::A {
    let mut acc = C::zero();
    let mut prefix = C::one();
    for &l in &w.letters {
        acc = C::add(&acc, &C::ad(&prefix, &letter_value::<C>(rho, u, l)));
        prefix = C::mul(&prefix, &letter_group::<C>(rho, l));
    }
    acc
}

fn closed_relator(p: &GroupPresentation) -> Result<&CurveWord> {
    if !p.peripherals.is_empty() {
        return Err(Error::PuncturedPresentation(format!("{} peripheral generators", p.peripherals.len())));
    }
    let r = p
        .single_relator()
        .ok_or_else(|| Error::PuncturedPresentation(format!("{} relators", p.relators.len())))?;
    // Each generator must occur once with each sign.
    let mut seen = vec![(0, 0); p.rank()];
    for l in &r.letters {
        if l.inverse {
            seen[l.generator].1 += 1;
        } else {
            seen[l.generator].0 += 1;
        }
    }
    if seen.iter().any(|&s| s != (1, 1)) {
        return Err(Error::PuncturedPresentation("relator is not a product of commutators".into()));
    }
    Ok(r)
}

/// Cup product of two cocycles paired by `b`, evaluated on the fundamental
/// class of the closed surface.
pub fn cup_product<C, P>(pres: &GroupPresentation, rho: &[C::G], u: &[C::A], v: &[C::A], b: impl Fn(&C::A, &C::A) -> P) -> Result<P>
where
    C: Coefficients,
    P: Zero,
{
    let r = closed_relator(pres)?;
    let n = pres.rank();
    if rho.len() != n || u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rho.len().min(u.len()).min(v.len()),
        });
    }
    let mut total = P::zero();
    let mut prefix = C::one();
    let mut u_prefix = C::zero();
    for &l in &r.letters {
        let ux = letter_value::<C>(rho, u, l);
        let vx = letter_value::<C>(rho, v, l);
        total = total + b(&u_prefix, &C::ad(&prefix, &vx));
        u_prefix = C::add(&u_prefix, &C::ad(&prefix, &ux));
        prefix = C::mul(&prefix, &letter_group::<C>(rho, l));
    }
    for i in 0..n {
        total = total + b(&u[i], &v[i]);
    }
    Ok(total)
}

fn kind_error(kind: GoldmanKind, what: &str) -> Error {
    Error::PairingKind {
        kind: PairingKind::Goldman(kind).to_string(),
        what: what.into(),
    }
}

/// Goldman pairing on a real holonomy; only the killing-real kind applies.
pub fn goldman_pairing(rho: &RealHolonomy, u: &Cocycle<f64>, v: &Cocycle<f64>, kind: GoldmanKind) -> Result<f64> {
    if kind != GoldmanKind::KillingReal {
        return Err(kind_error(kind, "a real holonomy"));
    }
    cup_product::<Sl2<f64>, f64>(&rho.presentation, &rho.generators, &u.values, &v.values, trace_pairing)
}

/// Complex trace cup product `∫ tr(u ∪ v)`.
pub fn goldman_complex_value(rho: &ComplexHolonomy, u: &Cocycle<Complex64>, v: &Cocycle<Complex64>) -> Result<Complex64> {
    cup_product::<Sl2<Complex64>, Complex64>(&rho.presentation, &rho.generators, &u.values, &v.values, trace_pairing)
}

/// Goldman pairing on a complex holonomy; only `tr₁ = Im tr` applies.
pub fn goldman_pairing_complex(rho: &ComplexHolonomy, u: &Cocycle<Complex64>, v: &Cocycle<Complex64>, kind: GoldmanKind) -> Result<f64> {
    if kind != GoldmanKind::Tr1 {
        return Err(kind_error(kind, "a complex holonomy"));
    }
    Ok(goldman_complex_value(rho, u, v)?.im)
}

/// `tr₋₁` pairing on a holonomy pair, computed on the product group.
pub fn ads_pairing(
    pair: (&RealHolonomy, &RealHolonomy),
    u: (&Cocycle<f64>, &Cocycle<f64>),
    v: (&Cocycle<f64>, &Cocycle<f64>),
) -> Result<f64> {
    let rho: Vec<(RMat, RMat)> = pair.0.generators.iter().copied().zip(pair.1.generators.iter().copied()).collect();
    let zip = |a: &Cocycle<f64>, b: &Cocycle<f64>| -> Vec<(RMat, RMat)> { a.values.iter().copied().zip(b.values.iter().copied()).collect() };
    cup_product::<Sl2Pair, f64>(&pair.0.presentation, &rho, &zip(u.0, u.1), &zip(v.0, v.1), |x, y| {
        0.5 * trace_pairing(&x.0, &y.0) - 0.5 * trace_pairing(&x.1, &y.1)
    })
}

/// Both sides of the `tr₋₁` decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct AdsDecomposition {
    #[serde(with = "crate::serial::real")]
    pub combined: f64,
    #[serde(with = "crate::serial::real")]
    pub left: f64,
    #[serde(with = "crate::serial::real")]
    pub right: f64,
    /// `|combined − (½ left − ½ right)|`.
    #[serde(with = "crate::serial::real")]
    pub defect: f64,
}

pub fn ads_pairing_decomposition(
    pair: (&RealHolonomy, &RealHolonomy),
    u: (&Cocycle<f64>, &Cocycle<f64>),
    v: (&Cocycle<f64>, &Cocycle<f64>),
) -> Result<AdsDecomposition> {
    let combined = ads_pairing(pair, u, v)?;
    let left = goldman_pairing(pair.0, u.0, v.0, GoldmanKind::KillingReal)?;
    let right = goldman_pairing(pair.1, u.1, v.1, GoldmanKind::KillingReal)?;
    Ok(AdsDecomposition {
        combined,
        left,
        right,
        defect: (combined - (0.5 * left - 0.5 * right)).abs(),
    })
}

/// A Minkowski holonomy `g ↦ (ρ(g), t(g))`.
#[derive(Clone, Debug)]
pub struct IsoHolonomy {
    pub linear: RealHolonomy,
    pub translation: Cocycle<f64>,
}

impl IsoHolonomy {
    fn group(&self) -> Vec<(RMat, RMat)> {
        self.linear.generators.iter().copied().zip(self.translation.values.iter().copied()).collect()
    }
}

/// Tangent cocycle of a Minkowski holonomy: `(x, u)` per generator.
#[derive(Clone, Debug)]
pub struct IsoCocycle {
    pub rotation: Cocycle<f64>,
    pub translation: Cocycle<f64>,
}

impl IsoCocycle {
    fn values(&self) -> Vec<(RMat, RMat)> {
        self.rotation.values.iter().copied().zip(self.translation.values.iter().copied()).collect()
    }

    /// Largest `|u(r)|` on the relator.
    pub fn relator_residual(&self, at: &IsoHolonomy) -> f64 {
        at.linear
            .presentation
            .relators
            .iter()
            .map(|r| {
                let (a, b) = cocycle_eval::<Iso21>(&at.group(), &self.values(), r);
                a.max_abs().max(b.max_abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Tangent cocycle `(Ȧ A⁻¹, ṫ − [Ȧ A⁻¹, t])` of a curve of Minkowski
/// holonomies.
pub fn iso_cocycle_of_curve(curve: impl Fn(f64) -> Result<IsoHolonomy>, cfg: FdConfig) -> Result<(IsoHolonomy, IsoCocycle)> {
    let at = curve(0.0)?;
    let (_, rot) = cocycle_of_curve(|t| Ok(curve(t)?.linear), cfg)?;
    let tdot = fd::derivative(|t| Ok(curve(t)?.translation.values), cfg)?;
    let translation = Cocycle {
        values: tdot
            .iter()
            .zip(&rot.values)
            .zip(&at.translation.values)
            .map(|((td, x), t)| *td - x.commutator(t))
            .collect(),
    };
    Ok((at, IsoCocycle { rotation: rot, translation }))
}

/// `tr₀` pairing on a Minkowski holonomy.
pub fn mink_pairing(at: &IsoHolonomy, u: &IsoCocycle, v: &IsoCocycle) -> Result<f64> {
    cup_product::<Iso21, f64>(&at.linear.presentation, &at.group(), &u.values(), &v.values(), |x, y| {
        trace_pairing(&x.0, &y.1) + trace_pairing(&x.1, &y.0)
    })
}

/// Cocycle `ρ̇ ρ⁻¹` of the chart direction `v` at `x`.
pub fn cocycle_from_direction<T: Scalar>(
    builder: impl Fn(&[f64]) -> Result<Holonomy<T>>,
    x: &[f64],
    v: &[f64],
    cfg: FdConfig,
) -> Result<Cocycle<T>> {
    if x.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: v.len(),
        });
    }
    let (_, u) = cocycle_of_curve(
        |t| {
            let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + t * b).collect();
            builder(&y)
        },
        cfg,
    )?;
    Ok(u)
}

/// `Σ (q̇₁ ṗ₂ − q̇₂ ṗ₁)` on vectors laid out as `(q, p)`.
pub fn cotangent_form(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() || u.len() % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: u.len() + u.len() % 2,
            got: v.len(),
        });
    }
    let n = u.len() / 2;
    Ok((0..n).map(|i| u[i] * v[n + i] - v[i] * u[n + i]).sum())
}

// ---------------------------------------------------------------------------
// Forms on charts

/// A 2-form on a chart, given by its Gram matrix at each point.
pub trait ChartForm {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn gram(&self, x: &[f64]) -> Result<Vec<Vec<f64>>>;
}

/// A form with the same Gram matrix everywhere.
#[derive(Clone, Debug)]
pub struct ConstantForm {
    pub name: String,
    pub gram: Vec<Vec<f64>>,
}

impl ChartForm for ConstantForm {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn dim(&self) -> usize {
        self.gram.len()
    }
    fn gram(&self, _: &[f64]) -> Result<Vec<Vec<f64>>> {
        Ok(self.gram.clone())
    }
}

impl ConstantForm {
    /// Cotangent form on `(q, p)` with `n` positions.
    pub fn cotangent(n: usize) -> Self {
        let mut g = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            g[i][n + i] = 1.0;
            g[n + i][i] = -1.0;
        }
        Self {
            name: PairingKind::Cotangent.to_string(),
            gram: g,
        }
    }

    pub fn from_exact(name: &str, g: &[Vec<Q>]) -> Self {
        Self {
            name: name.into(),
            gram: g.iter().map(|r| r.iter().map(crate::exact::q_to_f64).collect()).collect(),
        }
    }

    /// `ca·A ⊕ cb·B`.
    pub fn block_sum(name: &str, a: &[Vec<f64>], ca: f64, b: &[Vec<f64>], cb: f64) -> Self {
        let (n, m) = (a.len(), b.len());
        let mut g = vec![vec![0.0; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = ca * a[i][j];
            }
        }
        for i in 0..m {
            for j in 0..m {
                g[n + i][n + j] = cb * b[i][j];
            }
        }
        Self { name: name.into(), gram: g }
    }

    /// `ω((a₁, b₁), (a₂, b₂)) = Ω(a₁, b₂) + Ω(b₁, a₂)`: the imaginary part of
    /// the complex-bilinear extension of `Ω`.
    pub fn imaginary_part(name: &str, g: &[Vec<f64>]) -> Self {
        let n = g.len();
        let mut out = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                out[i][n + j] = g[i][j];
                out[n + i][j] = g[i][j];
            }
        }
        Self { name: name.into(), gram: out }
    }
}

pub type RealBuilder = Arc<dyn Fn(&[f64]) -> Result<RealHolonomy> + Send + Sync>;
pub type ComplexBuilder = Arc<dyn Fn(&[f64]) -> Result<ComplexHolonomy> + Send + Sync>;

/// How a Goldman form reads holonomy off chart coordinates.
#[derive(Clone)]
pub enum HolonomyChart {
    /// Real holonomy; paired with killing-real.
    Real(RealBuilder),
    /// Complex holonomy; paired with `tr₁`.
    Complex(ComplexBuilder),
    /// Coordinates `(x_L, x_R)` split at `split`; paired with `tr₋₁`.
    Pair { builder: RealBuilder, split: usize },
}

/// A Goldman form pulled back to chart coordinates by finite differences.
#[derive(Clone)]
pub struct GoldmanForm {
    pub name: String,
    pub dim: usize,
    pub chart: HolonomyChart,
    pub cfg: FdConfig,
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

impl GoldmanForm {
    pub fn kind(&self) -> GoldmanKind {
        match self.chart {
            HolonomyChart::Real(_) => GoldmanKind::KillingReal,
            HolonomyChart::Complex(_) => GoldmanKind::Tr1,
            HolonomyChart::Pair { .. } => GoldmanKind::TrMinus1,
        }
    }

    /// Basis cocycles at `x` for the real or complex charts.
    pub fn real_cocycles(&self, x: &[f64]) -> Result<(RealHolonomy, Vec<Cocycle<f64>>)> {
        match &self.chart {
            HolonomyChart::Real(b) => {
                let us = (0..x.len())
                    .map(|i| cocycle_from_direction(|y| b(y), x, &unit(x.len(), i), self.cfg))
                    .collect::<Result<_>>()?;
                Ok((b(x)?, us))
            }
            _ => Err(kind_error(self.kind(), "real cocycles")),
        }
    }
}

impl ChartForm for GoldmanForm {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn gram(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let n = self.dim;
        let mut g = vec![vec![0.0; n]; n];
        match &self.chart {
            HolonomyChart::Real(_) => {
                let (rho, us) = self.real_cocycles(x)?;
                for i in 0..n {
                    for j in i + 1..n {
                        g[i][j] = goldman_pairing(&rho, &us[i], &us[j], GoldmanKind::KillingReal)?;
                        g[j][i] = -g[i][j];
                    }
                }
            }
            HolonomyChart::Complex(b) => {
                let rho = b(x)?;
                let us = (0..n)
                    .map(|i| cocycle_from_direction(|y| b(y), x, &unit(n, i), self.cfg))
                    .collect::<Result<Vec<_>>>()?;
                for i in 0..n {
                    for j in i + 1..n {
                        g[i][j] = goldman_pairing_complex(&rho, &us[i], &us[j], GoldmanKind::Tr1)?;
                        g[j][i] = -g[i][j];
                    }
                }
            }
            HolonomyChart::Pair { builder, split } => {
                let (l, r) = (&x[..*split], &x[*split..]);
                let left = builder(l)?;
                let right = builder(r)?;
                let ul = (0..l.len())
                    .map(|i| cocycle_from_direction(|y| builder(y), l, &unit(l.len(), i), self.cfg))
                    .collect::<Result<Vec<_>>>()?;
                let ur = (0..r.len())
                    .map(|i| cocycle_from_direction(|y| builder(y), r, &unit(r.len(), i), self.cfg))
                    .collect::<Result<Vec<_>>>()?;
                let zl = Cocycle::zero(left.generators.len());
                let zr = Cocycle::zero(right.generators.len());
                let dir = |i: usize| if i < *split { (&ul[i], &zr) } else { (&zl, &ur[i - split]) };
                for i in 0..n {
                    for j in i + 1..n {
                        g[i][j] = ads_pairing((&left, &right), dir(i), dir(j))?;
                        g[j][i] = -g[i][j];
                    }
                }
            }
        }
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// Pullbacks

pub type ChartFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// A map between chart coordinates.
#[derive(Clone)]
pub struct ChartedMap {
    pub name: String,
    pub source_dim: usize,
    pub target_dim: usize,
    pub f: ChartFn,
}

impl ChartedMap {
    pub fn new(name: &str, source_dim: usize, target_dim: usize, f: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            source_dim,
            target_dim,
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                got: x.len(),
            });
        }
        let y = (self.f)(x)?;
        if y.len() != self.target_dim {
            return Err(Error::DimensionMismatch {
                expected: self.target_dim,
                got: y.len(),
            });
        }
        Ok(y)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChartedMap) -> Result<ChartedMap> {
        if self.target_dim != other.source_dim {
            return Err(Error::DimensionMismatch {
                expected: other.source_dim,
                got: self.target_dim,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(ChartedMap::new(&format!("{} ∘ {}", other.name, self.name), self.source_dim, other.target_dim, move |x| {
            b.eval(&a.eval(x)?)
        }))
    }

    /// Jacobian as target-by-source rows.
    pub fn jacobian(&self, x: &[f64], cfg: FdConfig) -> Result<Vec<Vec<f64>>> {
        let cols = fd::jacobian(|y| self.eval(y), x, cfg)?;
        Ok((0..self.target_dim).map(|r| cols.iter().map(|c| c[r]).collect()).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PullbackSample {
    #[serde(with = "crate::serial::real_vec")]
    pub point: Vec<f64>,
    /// Least-squares constant at this point alone.
    #[serde(with = "crate::serial::real")]
    pub fitted_c: f64,
    /// `max |F*ω_tgt − c·ω_src|` with the reported constant.
    #[serde(with = "crate::serial::real")]
    pub max_dev: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PullbackReport {
    pub map: String,
    pub source_form: String,
    pub target_form: String,
    pub fd: FdConfig,
    /// The constant the deviation is measured against.
    #[serde(with = "crate::serial::real")]
    pub c: f64,
    #[serde(with = "crate::serial::opt_real")]
    pub expected: Option<f64>,
    #[serde(with = "crate::serial::real")]
    pub fitted_c: f64,
    #[serde(with = "crate::serial::real")]
    pub max_dev: f64,
    /// `‖F*ω_tgt − c·ω_src‖ / ‖F*ω_tgt‖` over all samples.
    #[serde(with = "crate::serial::real")]
    pub rel_residual: f64,
    pub samples: Vec<PullbackSample>,
}

fn pullback_at(j: &[Vec<f64>], t: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (m, n) = (j.len(), j.first().map_or(0, Vec::len));
    let mut tj = vec![vec![0.0; n]; m];
    for a in 0..m {
        for k in 0..n {
            tj[a][k] = (0..m).map(|b| t[a][b] * j[b][k]).sum();
        }
    }
    (0..n)
        .map(|i| (0..n).map(|k| (0..m).map(|a| j[a][i] * tj[a][k]).sum()).collect())
        .collect()
}

fn fit(pairs: &[(f64, f64)]) -> Option<f64> {
    let ss: f64 = pairs.iter().map(|(_, s)| s * s).sum();
    (ss > 0.0).then(|| pairs.iter().map(|(p, s)| p * s).sum::<f64>() / ss)
}

/// Checks `F*ω_tgt = c·ω_src` at each sample. With `expected = None` the
/// constant is fitted.
pub fn pullback_check(
    map: &ChartedMap,
    source: &dyn ChartForm,
    target: &dyn ChartForm,
    expected: Option<f64>,
    samples: &[Vec<f64>],
    cfg: FdConfig,
) -> Result<PullbackReport> {
    if source.dim() != map.source_dim || target.dim() != map.target_dim {
        return Err(Error::DimensionMismatch {
            expected: map.source_dim,
            got: source.dim(),
        });
    }
    let mut per = Vec::with_capacity(samples.len());
    for x in samples {
        let j = map.jacobian(x, cfg)?;
        let p = pullback_at(&j, &target.gram(&map.eval(x)?)?);
        let s = source.gram(x)?;
        let pairs: Vec<(f64, f64)> = p.iter().flatten().copied().zip(s.iter().flatten().copied()).collect();
        per.push((x.clone(), pairs));
    }
    let all: Vec<(f64, f64)> = per.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let fitted = fit(&all).ok_or_else(|| Error::Singular("source form vanishes on every sample".into()))?;
    let c = expected.unwrap_or(fitted);
    let dev = |v: &[(f64, f64)]| v.iter().map(|(p, s)| (p - c * s).abs()).fold(0.0, f64::max);
    let num: f64 = all.iter().map(|(p, s)| (p - c * s).powi(2)).sum();
    let den: f64 = all.iter().map(|(p, _)| p * p).sum();
    let samples: Vec<PullbackSample> = per
        .iter()
        .map(|(x, v)| PullbackSample {
            point: x.clone(),
            fitted_c: fit(v).unwrap_or(f64::NAN),
            max_dev: dev(v),
        })
        .collect();
    Ok(PullbackReport {
        map: map.name.clone(),
        source_form: source.name(),
        target_form: target.name(),
        fd: cfg,
        c,
        expected,
        fitted_c: fitted,
        max_dev: dev(&all),
        rel_residual: if den > 0.0 { (num / den).sqrt() } else { num.sqrt() },
        samples,
    })
}

/// Exact pullback of a linear map with rational Jacobian `j` (target rows,
/// source columns). `constant` is `Some(c)` when `F*ω_tgt = c·ω_src` holds
/// exactly.
#[derive(Clone, Debug)]
pub struct ExactPullback {
    pub pullback: Vec<Vec<Q>>,
    pub constant: Option<Q>,
}

pub fn pullback_exact(j: &[Vec<Q>], source: &[Vec<Q>], target: &[Vec<Q>]) -> Result<ExactPullback> {
    let m = j.len();
    let n = j.first().map_or(0, Vec::len);
    if target.len() != m || source.len() != n {
        return Err(Error::DimensionMismatch { expected: m, got: target.len() });
    }
    let mut p = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            let mut acc = Q::zero();
            for a in 0..m {
                for b in 0..m {
                    acc += &j[a][i] * &target[a][b] * &j[b][k];
                }
            }
            p[i][k] = acc;
        }
    }
    let mut constant: Option<Q> = None;
    let mut ok = true;
    'outer: for i in 0..n {
        for k in 0..n {
            let s = &source[i][k];
            if s.is_zero() {
                ok &= p[i][k].is_zero();
            } else {
                let c = &p[i][k] / s;
                match &constant {
                    None => constant = Some(c),
                    Some(c0) if *c0 == c => {}
                    Some(_) => ok = false,
                }
            }
            if !ok {
                break 'outer;
            }
        }
    }
    Ok(ExactPullback {
        pullback: p,
        constant: if ok { constant } else { None },
    })
}

/// `|D(h) − D(h/2)|` for plain central differences of `f` along `v`: first
/// order convergence shows up as a ratio near 4 between successive halvings.
pub fn difference_quotient_ratio(f: &ChartedMap, x: &[f64], v: &[f64], h: f64) -> Result<f64> {
    let d = |h: f64| fd::directional(|y| f.eval(y), x, v, FdConfig { h, richardson: 0 });
    let (a, b, c) = (d(h)?, d(h / 2.0)?, d(h / 4.0)?);
    let gap = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max);
    let (g1, g2) = (gap(&a, &b), gap(&b, &c));
    Ok(if g2 == 0.0 { f64::INFINITY } else { g1 / g2 })
}
