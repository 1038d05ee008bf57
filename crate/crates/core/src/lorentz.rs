//! Lorentzian data built from points and laminations.
//!
//! Anti-de Sitter structures are holonomy pairs `(ρ_L, ρ_R)`; Minkowski
//! structures are a Fuchsian holonomy plus an `𝔰𝔩₂`-valued cocycle; de Sitter
//! structures are complex projective data.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::q_to_f64;
use crate::fd::{self, FdConfig};
use crate::flows::{self, ComplexShearCoordinates, Lamination, Side};
use crate::mat2::{Mat2, RMat, Scalar};
use crate::surface::{CurveRef, CurveWord, Letter, WeightedMulticurve};
use crate::teich::{ChartPoint, ComplexHolonomy, FnLayout, Holonomy, RealHolonomy, ShearChart, TeichPoint};

/// Cocycle residual allowed for finite-difference cocycles.
pub const COCYCLE_TOL: f64 = 1e-6;

/// A group cocycle `u: π₁ → 𝔰𝔩₂`, stored on generators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cocycle<T> {
    pub values: Vec<Mat2<T>>,
}

impl<T: Scalar> Cocycle<T> {
    pub fn zero(rank: usize) -> Self {
        Self {
            values: vec![Mat2::zero(); rank],
        }
    }

    /// The coboundary `g ↦ X − Ad(ρ(g)) X`.
    pub fn coboundary(rho: &Holonomy<T>, x: &Mat2<T>) -> Self {
        Self {
            values: rho.generators.iter().map(|g| *x - x.conj_by(g)).collect(),
        }
    }

    pub fn letter(&self, rho: &Holonomy<T>, l: Letter) -> Mat2<T> {
        let u = self.values[l.generator];
        if l.inverse {
            -u.conj_by(&rho.generators[l.generator].inv())
        } else {
            u
        }
    }

    /// `u(w)` by `u(gh) = u(g) + Ad(ρ(g)) u(h)`.
    pub fn eval(&self, rho: &Holonomy<T>, w: &CurveWord) -> Mat2<T> {
        self.eval_scaled(rho, w).0
    }

    /// `u(w)` together with `max(1, s)`, `s` the largest summand of the
    /// expansion. Summands grow like `|ρ|²·|u|`, so defects are measured
    /// against this scale rather than absolutely.
    pub fn eval_scaled(&self, rho: &Holonomy<T>, w: &CurveWord) -> (Mat2<T>, f64) {
        let mut acc = Mat2::zero();
        let mut scale = 1.0f64;
        let mut prefix = Mat2::identity();
        for &l in &w.letters {
            let term = self.letter(rho, l).conj_by(&prefix);
            scale = scale.max(term.max_abs());
            acc = acc + term;
            prefix = prefix * rho.letter(l);
        }
        (acc, scale)
    }

    /// Largest `|u(r)|` over the relators relative to the expansion's
    /// scale; zero for free groups.
    pub fn relator_residual(&self, rho: &Holonomy<T>) -> f64 {
        rho.presentation
            .relators
            .iter()
            .map(|r| {
                let (v, scale) = self.eval_scaled(rho, r);
                v.max_abs() / scale
            })
            .fold(0.0, f64::max)
    }

    pub fn trace_residual(&self) -> f64 {
        self.values.iter().map(|u| u.trace().modulus()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|a| a.scale_real(c)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(Mat2::max_abs).fold(0.0, f64::max)
    }
}

/// `u(g) = (d/dt ρ_t(g)) ρ(g)⁻¹` for a curve of holonomies `t ↦ ρ_t`.
///
/// The trace part is finite-difference noise and is projected away after a
/// sanity bound.
pub fn cocycle_of_curve<T: Scalar>(curve: impl Fn(f64) -> Result<Holonomy<T>>, cfg: FdConfig) -> Result<(Holonomy<T>, Cocycle<T>)> {
    let rho = curve(0.0)?;
    let dot = fd::derivative(|t| Ok(curve(t)?.generators), cfg)?;
    let values: Vec<Mat2<T>> = dot
        .iter()
        .zip(&rho.generators)
        .map(|(d, g)| *d * g.inv())
        .collect();
    let u = Cocycle { values };
    let tr = u.trace_residual();
    if tr > COCYCLE_TOL {
        return Err(Error::CocycleResidual {
            residual: tr,
            tolerance: COCYCLE_TOL,
        });
    }
    let half = T::from_real(0.5);
    let u = Cocycle {
        values: u
            .values
            .iter()
            .map(|x| *x - Mat2::identity().scale(x.trace() * half))
            .collect(),
    };
    let res = u.relator_residual(&rho);
    if res > COCYCLE_TOL {
        return Err(Error::CocycleResidual {
            residual: res,
            tolerance: COCYCLE_TOL,
        });
    }
    Ok((rho, u))
}

/// Infinitesimal generator of translation along the axis of a hyperbolic
/// element: `exp(ℓ J) = ±M`.
pub fn axis_generator(m: &RMat) -> Result<RMat> {
    let tr = m.trace();
    if tr.abs() <= 2.0 {
        return Err(Error::Elliptic(tr.abs()));
    }
    let sh = (tr * tr / 4.0 - 1.0).sqrt();
    Ok((*m - m.inv()).scale(tr.signum() / (4.0 * sh)))
}

/// An anti-de Sitter structure as its pair of boundary points.
#[derive(Clone, Debug, PartialEq)]
pub struct AdSPoint {
    pub left: TeichPoint,
    pub right: TeichPoint,
}

impl AdSPoint {
    pub fn holonomy_pair(&self) -> Result<(RealHolonomy, RealHolonomy)> {
        Ok((self.left.holonomy()?.clone(), self.right.holonomy()?.clone()))
    }
}

/// MGHC AdS structure with future boundary `(m, l)`: the double earthquake.
pub fn ads_from_plus_boundary(m: &TeichPoint, l: &Lamination) -> Result<AdSPoint> {
    let (left, right) = flows::double_earthquake(m, l)?;
    Ok(AdSPoint { left, right })
}

/// AdS rescaling of the pleated hyperbolic structure: same pair as
/// [`ads_from_plus_boundary`].
pub fn wick_pleated(m: &TeichPoint, l: &Lamination) -> Result<AdSPoint> {
    ads_from_plus_boundary(m, l)
}

pub fn ads_holonomy_pair(a: &AdSPoint) -> Result<(RealHolonomy, RealHolonomy)> {
    a.holonomy_pair()
}

/// Minkowski structure: linear part and translational cocycle.
#[derive(Clone, Debug)]
pub struct MinkPoint {
    pub linear: RealHolonomy,
    pub translation: Cocycle<f64>,
    pub fd: FdConfig,
    /// Relator defect of the cocycle relative to the expansion's scale.
    pub residual: f64,
    /// Largest relative gap between `u(gᵢ gⱼ⁻¹)` by the cocycle rule and a
    /// direct derivative of `ρ_t(gᵢ gⱼ⁻¹)`.
    pub word_residual: f64,
}

/// Step for the direct word derivatives. Word holonomies reach entries of
/// order 10², so at the default step roundoff alone is about 10⁻⁷.
const WORD_STEP: f64 = 1e-3;

/// `d/dt|₀ hol(E_L(m, t·l))` as a cocycle at `hol(m)`.
pub fn mink_from_lamination(m: &TeichPoint, l: &Lamination, cfg: FdConfig) -> Result<MinkPoint> {
    let curve = |t: f64| -> Result<RealHolonomy> { Ok(flows::earthquake(m, l, t, Side::Left)?.holonomy()?.clone()) };
    let (rho, u) = cocycle_of_curve(curve, cfg)?;
    let residual = u.relator_residual(&rho);
    let word_cfg = FdConfig {
        h: cfg.h.max(WORD_STEP),
        ..cfg
    };
    let mut word_residual = 0.0f64;
    let n = rho.generators.len();
    for i in 0..n {
        for j in 0..n {
            let w = CurveWord::generator(i).concat(&CurveWord::generator(j).inverse());
            let g = rho.eval(&w).inv();
            let direct = fd::derivative(|t| Ok(curve(t)?.eval(&w)), word_cfg)? * g;
            let (rule, scale) = u.eval_scaled(&rho, &w);
            word_residual = word_residual.max((direct - rule).max_abs() / scale);
        }
    }
    if residual.max(word_residual) > COCYCLE_TOL {
        return Err(Error::CocycleResidual {
            residual: residual.max(word_residual),
            tolerance: COCYCLE_TOL,
        });
    }
    Ok(MinkPoint {
        linear: rho,
        translation: u,
        fd: cfg,
        residual,
        word_residual,
    })
}

/// Closed-form earthquake cocycle for a pants multicurve in the dumbbell
/// layout: each twist conjugates one side of its curve by translation along
/// the curve's axis.
pub fn twist_cocycle(m: &TeichPoint, l: &WeightedMulticurve) -> Result<Cocycle<f64>> {
    let chart = match m.chart_point() {
        ChartPoint::Fn { chart, .. } => chart,
        ChartPoint::Shear { .. } => {
            return Err(Error::IncompatibleLamination("twist cocycles need an FN chart".into()));
        }
    };
    match chart.layout {
        FnLayout::GenusTwoDumbbell => {}
    }
    let rho = m.holonomy()?;
    let g = &rho.generators;
    let mut u = Cocycle::zero(g.len());
    for c in l.components() {
        let i = match c.curve {
            CurveRef::ChartCurve(i) if i < 3 => i,
            _ => return Err(Error::NotPantsSupported(c.curve.to_string())),
        };
        let w = q_to_f64(&c.weight) * f64::from(chart.curves[i].twist_sign);
        match i {
            // γ1 = a1 and γ2 = a2: the twist moves b1 (resp. b2) along a.
            0 | 1 => {
                let (a, b) = (2 * i, 2 * i + 1);
                let j = axis_generator(&g[a])?;
                u.values[b] = u.values[b] + j.conj_by(&g[b]).scale(w);
            }
            // γ3 = [a1, b1]: the whole second handle is conjugated.
            _ => {
                let j = axis_generator(&rho.eval(chart.curve_word(2)?))?;
                for k in [2, 3] {
                    u.values[k] = u.values[k] + (j - j.conj_by(&g[k])).scale(w);
                }
            }
        }
    }
    Ok(u)
}

/// Complex projective data on the surface.
#[derive(Clone, Debug)]
pub enum ProjectiveData {
    ShearBend {
        chart: std::sync::Arc<ShearChart>,
        coords: ComplexShearCoordinates,
    },
    Holonomy(ComplexHolonomy),
}

/// A de Sitter structure, stored as its projective data.
#[derive(Clone, Debug)]
pub struct DsPoint {
    pub data: ProjectiveData,
    /// The projective structure is Fuchsian (real holonomy, zero bending).
    pub fuchsian: bool,
}

impl DsPoint {
    pub fn holonomy(&self) -> Result<ComplexHolonomy> {
        match &self.data {
            ProjectiveData::ShearBend { chart, coords } => coords.holonomy(chart),
            ProjectiveData::Holonomy(h) => Ok(h.clone()),
        }
    }
}

const REAL_TOL: f64 = 1e-12;

/// Scheme-Fuchsian flag: the character is real on words of length ≤ 3 in
/// the generators.
fn real_character(h: &ComplexHolonomy) -> bool {
    let n = h.generators.len();
    let mut words = Vec::new();
    for i in 0..n {
        words.push(CurveWord::generator(i));
        for j in 0..n {
            words.push(CurveWord::generator(i).concat(&CurveWord::generator(j)));
            for k in 0..n {
                words.push(CurveWord::generator(i).concat(&CurveWord::generator(j)).concat(&CurveWord::generator(k)));
            }
        }
    }
    words.iter().all(|w| {
        let t = h.trace(w);
        t.im.abs() <= REAL_TOL * t.norm().max(1.0)
    })
}

pub fn ds_from_projective(data: ProjectiveData) -> Result<DsPoint> {
    let fuchsian = match &data {
        ProjectiveData::ShearBend { coords, .. } => coords.is_real(),
        ProjectiveData::Holonomy(h) => real_character(h),
    };
    Ok(DsPoint { data, fuchsian })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exact::{q, q_frac};
    use crate::teich::{punctured_torus_chart, CocycleChart, FnChart, FnCoordinates};
    use crate::traintrack::validate_weights;

    fn g2(x: &[f64]) -> TeichPoint {
        TeichPoint::fn_point(Arc::new(FnChart::genus_two()), FnCoordinates::from_flat(x).unwrap()).unwrap()
    }

    #[test]
    fn axis_generator_matches_diagonal() {
        let j = axis_generator(&RMat::translation(1.7)).unwrap();
        assert!((j - RMat::translation_generator()).max_abs() < 1e-14);
        let j = axis_generator(&-RMat::translation(1.7)).unwrap();
        assert!((j - RMat::translation_generator()).max_abs() < 1e-14);
        assert!(axis_generator(&RMat::new(0.0, -1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn mink_matches_twist_formula() {
        let m = g2(&[1.3, 0.8, 2.1, 0.4, -0.3, 0.7]);
        for w in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [2, 1, 3]] {
            let mc = WeightedMulticurve::pants(&w.map(q)).unwrap();
            let mink = mink_from_lamination(&m, &Lamination::Multicurve(mc.clone()), FdConfig::default()).unwrap();
            let direct = twist_cocycle(&m, &mc).unwrap();
            let dev = mink.translation.add(&direct.scale_real(-1.0)).max_abs();
            assert!(dev < 1e-7, "{w:?}: {dev}");
            assert!(mink.residual < 1e-6, "{}", mink.residual);
        }
    }

    #[test]
    fn coboundary_is_a_cocycle() {
        let m = g2(&[1.3, 0.8, 2.1, 0.4, -0.3, 0.7]);
        let rho = m.holonomy().unwrap();
        let u = Cocycle::coboundary(rho, &RMat::new(0.3, 1.0, -0.5, -0.3));
        assert!(u.relator_residual(rho) < 1e-9);
    }

    #[test]
    fn mink_in_shear_chart() {
        let c = Arc::new(punctured_torus_chart());
        let m = TeichPoint::shear(c.clone(), c.from_reduced_exact(&[q_frac(1, 3), q_frac(-5, 4)]).unwrap()).unwrap();
        let tau = validate_weights(c.track(), vec![q(1), q(2), q(3)]).unwrap();
        let mink = mink_from_lamination(&m, &Lamination::Cocycle(tau), FdConfig::default()).unwrap();
        assert!(mink.residual < 1e-6, "{}", mink.residual);
        assert!(mink.translation.max_abs() > 1e-3);
    }

    #[test]
    fn ds_flags() {
        let chart = FnChart::genus_two();
        let x = FnCoordinates::new(vec![1.3, 0.8, 2.1], vec![0.4, -0.3, 0.7]).unwrap();
        let l = WeightedMulticurve::pants(&[q(1), q(1), q(1)]).unwrap();
        let flat = flows::graft_fn(&chart, &x, &l, 0.0).unwrap();
        assert!(ds_from_projective(ProjectiveData::Holonomy(flat)).unwrap().fuchsian);
        let bent = flows::graft_fn(&chart, &x, &l, 0.5).unwrap();
        assert!(!ds_from_projective(ProjectiveData::Holonomy(bent)).unwrap().fuchsian);
    }
}
