//! Earthquakes, double earthquakes, the covector map δ and grafting.
//!
//! In shear charts an earthquake adds the lamination cocycle to the shear
//! coordinates; in Fenchel–Nielsen charts it shifts twists. Grafting
//! complexifies the same parameter.

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, q_from_f64, q_to_f64, Q};
use crate::fd::{self, FdConfig};
use crate::surface::{CurveRef, WeightedMulticurve};
use crate::teich::{
    fn_holonomy, lamination_length, shear_holonomy, ChartPoint, CocycleChart, ComplexHolonomy, FnChart,
    FnCoordinates, ShearChart, ShearCoordinates, TeichPoint,
};
use crate::traintrack::{self, WeightSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Side {
    fn sign(self) -> i64 {
        match self {
            Side::Left => 1,
            Side::Right => -1,
        }
    }
}

/// Lamination data in either chart family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lamination {
    /// Transverse cocycle on the dual track of a shear chart.
    Cocycle(WeightSystem),
    /// Multicurve on the pants curves of an FN chart.
    Multicurve(WeightedMulticurve),
}

impl Lamination {
    pub fn is_zero(&self) -> bool {
        match self {
            Lamination::Cocycle(w) => w.is_zero(),
            Lamination::Multicurve(m) => m.is_empty(),
        }
    }

    /// Scales the measure by `c > 0`.
    pub fn scale(&self, c: &Q) -> Result<Self> {
        Ok(match self {
            Lamination::Cocycle(w) => Lamination::Cocycle(w.scale(c)),
            Lamination::Multicurve(m) => Lamination::Multicurve(crate::surface::multicurve_scale(m, c)?),
        })
    }
}

/// `None` when `t·weight ≥ 0` holds, otherwise a note that the flow left
/// measured-lamination semantics.
pub fn flow_warning(l: &Lamination, t: f64) -> Option<&'static str> {
    let nonneg = match l {
        Lamination::Cocycle(w) => w.is_nonnegative(),
        Lamination::Multicurve(_) => true,
    };
    (!(nonneg && t >= 0.0)).then_some("t·weight is negative somewhere: not a measured-lamination earthquake")
}

/// `σ ± t·τ`, exact.
pub fn earthquake_shear(chart: &ShearChart, sigma: &ShearCoordinates, tau: &WeightSystem, t: &Q, side: Side) -> Result<ShearCoordinates> {
    let shift = chart.shears_of(tau)?;
    if sigma.values.len() != shift.values.len() {
        return Err(Error::TrackMismatch);
    }
    let f = t * Q::from_integer(side.sign().into());
    chart.coords(sigma.values.iter().zip(&shift.values).map(|(s, d)| s + &f * d).collect())
}

/// Twist shift `τᵢ ± t·wᵢ` on the pants curves of `l`.
pub fn earthquake_fn(chart: &FnChart, x: &FnCoordinates, l: &WeightedMulticurve, t: f64, side: Side) -> Result<FnCoordinates> {
    let mut twists = x.twists.clone();
    for c in l.components() {
        match c.curve {
            CurveRef::ChartCurve(i) if i < chart.curves.len() => {
                twists[i] += side.sign() as f64 * t * q_to_f64(&c.weight);
            }
            _ => return Err(Error::NotPantsSupported(c.curve.to_string())),
        }
    }
    FnCoordinates::new(x.lengths.clone(), twists)
}

pub fn earthquake(m: &TeichPoint, l: &Lamination, t: f64, side: Side) -> Result<TeichPoint> {
    match (m.chart_point(), l) {
        (ChartPoint::Shear { chart, coords }, Lamination::Cocycle(tau)) => {
            let tq = q_from_f64(t).ok_or(Error::NonFinite(0))?;
            TeichPoint::shear(chart.clone(), earthquake_shear(chart, coords, tau, &tq, side)?)
        }
        (ChartPoint::Fn { chart, coords }, Lamination::Multicurve(mc)) => {
            TeichPoint::fn_point(chart.clone(), earthquake_fn(chart, coords, mc, t, side)?)
        }
        _ => Err(Error::IncompatibleLamination("lamination kind does not match the chart family".into())),
    }
}

/// `(E_L(m, l), E_R(m, l))`.
pub fn double_earthquake(m: &TeichPoint, l: &Lamination) -> Result<(TeichPoint, TeichPoint)> {
    Ok((earthquake(m, l, 1.0, Side::Left)?, earthquake(m, l, 1.0, Side::Right)?))
}

/// A covector at a point, in the dual of the base chart's coordinates.
#[derive(Clone, Debug)]
pub struct CotangentPoint {
    pub base: TeichPoint,
    pub covector: Vec<f64>,
    /// Exact covector when the chart computation is exact.
    pub exact: Option<Vec<Q>>,
    /// Steps used when the covector came from finite differences.
    pub fd: Option<FdConfig>,
}

/// `δ(m, l) = d_m L(l)`.
///
/// Shear charts: components `Ω_Th(bᵢ, τ)` over the complete basis, exact.
/// FN charts: finite-difference gradient of the lamination length.
pub fn delta(m: &TeichPoint, l: &Lamination, cfg: FdConfig) -> Result<CotangentPoint> {
    match (m.chart_point(), l) {
        (ChartPoint::Shear { chart, .. }, Lamination::Cocycle(tau)) => {
            let ex = chart
                .cocycle_basis()
                .iter()
                .map(|b| traintrack::thurston_form(chart.track(), b, tau))
                .collect::<Result<Vec<Q>>>()?;
            Ok(CotangentPoint {
                base: m.clone(),
                covector: ex.iter().map(q_to_f64).collect(),
                exact: Some(ex),
                fd: None,
            })
        }
        (ChartPoint::Fn { chart, coords }, Lamination::Multicurve(mc)) => {
            if !mc.is_pants_supported() {
                return Err(Error::NotPantsSupported("multicurve".into()));
            }
            let x0 = coords.flat();
            let grad = fd::jacobian(
                |x| {
                    let p = TeichPoint::fn_point(chart.clone(), FnCoordinates::from_flat(x)?)?;
                    Ok(vec![lamination_length(&p, mc)?])
                },
                &x0,
                cfg,
            )?;
            Ok(CotangentPoint {
                base: m.clone(),
                covector: grad.into_iter().map(|c| c[0]).collect(),
                exact: None,
                fd: Some(cfg),
            })
        }
        _ => Err(Error::IncompatibleLamination("lamination kind does not match the chart family".into())),
    }
}

/// Inverse of [`delta`].
///
/// Shear charts: solves `Gram · t = p` exactly. FN charts: the image of δ
/// on pants-supported multicurves is `Σ wᵢ dℓᵢ`, so the twist components
/// must vanish and the length components become the weights.
pub fn delta_inverse(p: &CotangentPoint) -> Result<(TeichPoint, Lamination)> {
    match p.base.chart_point() {
        ChartPoint::Shear { chart, .. } => {
            let tau = match &p.exact {
                Some(ex) => shear_exact_covector_to_cocycle(chart, ex)?,
                None => shear_covector_to_cocycle(chart, &p.covector)?,
            };
            Ok((p.base.clone(), Lamination::Cocycle(tau)))
        }
        ChartPoint::Fn { chart, .. } => {
            let k = chart.curves.len();
            if p.covector.len() != 2 * k {
                return Err(Error::DimensionMismatch {
                    expected: 2 * k,
                    got: p.covector.len(),
                });
            }
            if let Some(i) = p.covector[k..].iter().position(|x| *x != 0.0) {
                return Err(Error::IncompatibleLamination(format!(
                    "covector has twist component {} on gamma{}; not in the image of pants-supported laminations",
                    p.covector[k + i],
                    i + 1
                )));
            }
            let weights = p.covector[..k]
                .iter()
                .enumerate()
                .map(|(i, &w)| q_from_f64(w).ok_or(Error::NonFinite(i)))
                .collect::<Result<Vec<_>>>()?;
            Ok((p.base.clone(), Lamination::Multicurve(WeightedMulticurve::pants(&weights)?)))
        }
    }
}

/// The cocycle `τ` with `Ω_Th(bᵢ, τ) = pᵢ`.
pub fn shear_covector_to_cocycle(chart: &ShearChart, p: &[f64]) -> Result<WeightSystem> {
    let pq = p
        .iter()
        .enumerate()
        .map(|(i, &x)| q_from_f64(x).ok_or(Error::NonFinite(i)))
        .collect::<Result<Vec<_>>>()?;
    shear_exact_covector_to_cocycle(chart, &pq)
}

pub fn shear_exact_covector_to_cocycle(chart: &ShearChart, pq: &[Q]) -> Result<WeightSystem> {
    let basis = chart.cocycle_basis();
    if pq.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: pq.len(),
        });
    }
    let gram = traintrack::thurston_gram(chart.track(), &basis)?;
    let inv = exact::inverse(&gram).ok_or_else(|| Error::Singular("Thurston form is degenerate on this chart".into()))?;
    let t = exact::mat_vec(&inv, pq);
    let mut w = WeightSystem::zero(chart.track());
    for (ti, b) in t.iter().zip(&basis) {
        w = w.add(&b.scale(ti))?;
    }
    w.realizable = w.is_nonnegative();
    Ok(w)
}

/// Shear-bend coordinates `σ + iβ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexShearCoordinates {
    #[serde(with = "crate::serial::rational_vec")]
    pub re: Vec<Q>,
    #[serde(with = "crate::serial::rational_vec")]
    pub im: Vec<Q>,
}

impl ComplexShearCoordinates {
    pub fn values(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| Complex64::new(q_to_f64(a), q_to_f64(b)))
            .collect()
    }

    pub fn holonomy(&self, chart: &ShearChart) -> Result<ComplexHolonomy> {
        shear_holonomy(chart, &self.values())
    }

    pub fn is_real(&self) -> bool {
        self.im.iter().all(Zero::is_zero)
    }
}

/// `σ + i·t·τ`; the bending lamination must be a measure.
pub fn graft_shearbend(chart: &ShearChart, sigma: &ShearCoordinates, tau: &WeightSystem, t: &Q) -> Result<ComplexShearCoordinates> {
    if let Some(e) = tau.weights.iter().position(|w| w.is_negative()) {
        return Err(Error::NegativeBending(e));
    }
    let bend = chart.shears_of(tau)?;
    if bend.values.len() != sigma.values.len() {
        return Err(Error::TrackMismatch);
    }
    Ok(ComplexShearCoordinates {
        re: sigma.values.clone(),
        im: bend.values.iter().map(|b| b * t).collect(),
    })
}

/// Inverse of [`graft_shearbend`] for `t ≠ 0`: the real part and the
/// bending cocycle.
pub fn ungraft_shearbend(chart: &ShearChart, z: &ComplexShearCoordinates, t: &Q) -> Result<(ShearCoordinates, WeightSystem)> {
    if t.is_zero() {
        return Err(Error::Singular("grafting at t = 0 forgets the lamination".into()));
    }
    let sigma = chart.coords(z.re.clone())?;
    let bend = chart.coords(z.im.iter().map(|b| b / t).collect())?;
    let mut tau = chart.cocycle_of(&bend)?;
    if let Some(e) = tau.weights.iter().position(|w| w.is_negative()) {
        return Err(Error::NegativeBending(e));
    }
    tau.realizable = true;
    Ok((sigma, tau))
}

/// Holonomy with complex twists `τᵢ + i·t·wᵢ`.
pub fn graft_fn(chart: &FnChart, x: &FnCoordinates, l: &WeightedMulticurve, t: f64) -> Result<ComplexHolonomy> {
    let mut bend = vec![0.0; chart.curves.len()];
    for c in l.components() {
        match c.curve {
            CurveRef::ChartCurve(i) if i < bend.len() => bend[i] += t * q_to_f64(&c.weight),
            _ => return Err(Error::NotPantsSupported(c.curve.to_string())),
        }
    }
    let tw: Vec<Complex64> = x
        .twists
        .iter()
        .zip(&bend)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    fn_holonomy(chart, &x.lengths, &tw)
}

/// Shared handle constructors used by the CLI and the checks.
pub fn shear_point(chart: &Arc<ShearChart>, reduced: &[f64]) -> Result<TeichPoint> {
    TeichPoint::shear(chart.clone(), chart.from_reduced(reduced)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q_frac};
    use crate::teich::{panel_distance, punctured_torus_chart, word_panel};

    fn setup() -> (Arc<ShearChart>, ShearCoordinates, WeightSystem) {
        let c = Arc::new(punctured_torus_chart());
        let s = c.from_reduced_exact(&[q_frac(1, 3), q_frac(-5, 4)]).unwrap();
        let basis = c.cocycle_basis();
        let tau = basis[0].scale(&q(2)).add(&basis[1].scale(&q(3))).unwrap();
        (c, s, tau)
    }

    #[test]
    fn shear_flow_is_exact() {
        let (c, s, tau) = setup();
        let z = q(0);
        assert_eq!(earthquake_shear(&c, &s, &tau, &z, Side::Left).unwrap(), s);
        let one = q(1);
        let twice = earthquake_shear(&c, &earthquake_shear(&c, &s, &tau, &one, Side::Left).unwrap(), &tau, &one, Side::Left).unwrap();
        assert_eq!(twice, earthquake_shear(&c, &s, &tau, &q(2), Side::Left).unwrap());
        let t = q_frac(7, 9);
        let back = earthquake_shear(&c, &earthquake_shear(&c, &s, &tau, &t, Side::Left).unwrap(), &tau, &t, Side::Right).unwrap();
        assert_eq!(back, s);
        assert!(twice.complete);
    }

    #[test]
    fn fn_flow_examples() {
        let chart = FnChart::genus_two();
        let x = FnCoordinates::new(vec![1.3, 0.8, 2.1], vec![0.4, -0.3, 0.7]).unwrap();
        let l = WeightedMulticurve::pants(&[q(1), q(0), q_frac(1, 2)]).unwrap();
        assert_eq!(earthquake_fn(&chart, &x, &l, 0.0, Side::Left).unwrap(), x);
        let a = earthquake_fn(&chart, &earthquake_fn(&chart, &x, &l, 1.0, Side::Left).unwrap(), &l, 1.0, Side::Left).unwrap();
        let b = earthquake_fn(&chart, &x, &l, 2.0, Side::Left).unwrap();
        assert_eq!(a, b);
        let back = earthquake_fn(&chart, &earthquake_fn(&chart, &x, &l, 0.5, Side::Left).unwrap(), &l, 0.5, Side::Right).unwrap();
        assert_eq!(back, x);
        let word = WeightedMulticurve::new(vec![(CurveRef::Word(crate::surface::CurveWord::generator(1)), q(1))]).unwrap();
        assert!(matches!(earthquake_fn(&chart, &x, &word, 1.0, Side::Left), Err(Error::NotPantsSupported(_))));
    }

    #[test]
    fn double_earthquake_in_shear_chart() {
        let (c, s, tau) = setup();
        let m = TeichPoint::shear(c.clone(), s.clone()).unwrap();
        let (l, r) = double_earthquake(&m, &Lamination::Cocycle(tau.clone())).unwrap();
        let (sl, sr) = traintrack::double_earthquake_linear(&c.cocycle_of(&s).unwrap(), &tau).unwrap();
        match (l.chart_point(), r.chart_point()) {
            (ChartPoint::Shear { coords: a, .. }, ChartPoint::Shear { coords: b, .. }) => {
                assert_eq!(c.cocycle_of(a).unwrap().weights, sl.weights);
                assert_eq!(c.cocycle_of(b).unwrap().weights, sr.weights);
            }
            _ => unreachable!(),
        }
        let (l0, r0) = double_earthquake(&m, &Lamination::Cocycle(WeightSystem::zero(c.track()))).unwrap();
        assert!(l0 == m && r0 == m);
    }

    #[test]
    fn mess_round_trip_in_shear_chart() {
        let (c, s, tau) = setup();
        let m = TeichPoint::shear(c, s).unwrap();
        let l = Lamination::Cocycle(tau);
        let (ml, mr) = double_earthquake(&m, &l).unwrap();
        let back = earthquake(&mr, &l.scale(&q(2)).unwrap(), 1.0, Side::Left).unwrap();
        assert!(back == ml);
        let panel = word_panel(2, &[], 20, 1);
        assert!(panel_distance(&back.trace_panel(&panel).unwrap(), &ml.trace_panel(&panel).unwrap()) < 1e-12);
    }

    #[test]
    fn delta_round_trip_and_linearity() {
        let (c, s, tau) = setup();
        let m = TeichPoint::shear(c.clone(), s).unwrap();
        let l = Lamination::Cocycle(tau.clone());
        let d = delta(&m, &l, FdConfig::default()).unwrap();
        let (_, back) = delta_inverse(&d).unwrap();
        assert_eq!(back, Lamination::Cocycle(WeightSystem { realizable: back_real(&back), ..tau.clone() }));
        let d3 = delta(&m, &l.scale(&q(3)).unwrap(), FdConfig::default()).unwrap();
        let ex: Vec<Q> = d.exact.unwrap().iter().map(|x| x * q(3)).collect();
        assert_eq!(d3.exact.unwrap(), ex);
        let z = delta(&m, &Lamination::Cocycle(WeightSystem::zero(c.track())), FdConfig::default()).unwrap();
        assert!(z.covector.iter().all(|x| *x == 0.0));
    }

    fn back_real(l: &Lamination) -> bool {
        matches!(l, Lamination::Cocycle(w) if w.realizable)
    }

    #[test]
    fn delta_of_pants_curve_is_length_direction() {
        let chart = Arc::new(FnChart::genus_two());
        let x = FnCoordinates::new(vec![1.3, 0.8, 2.1], vec![0.4, -0.3, 0.7]).unwrap();
        let m = TeichPoint::fn_point(chart, x).unwrap();
        let l = Lamination::Multicurve(WeightedMulticurve::pants(&[q(1), q(0), q(0)]).unwrap());
        let d = delta(&m, &l, FdConfig::default()).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in d.covector.iter().zip(expected) {
            assert!((a - b).abs() < 5e-7, "{:?}", d.covector);
        }
    }

    #[test]
    fn grafting_examples() {
        let (c, s, _) = setup();
        let tau = traintrack::validate_weights(c.track(), vec![q(1), q(2), q(3)]).unwrap();
        let g0 = graft_shearbend(&c, &s, &tau, &q(0)).unwrap();
        assert!(g0.is_real());
        let panel = word_panel(2, &[], 20, 3);
        let real = crate::teich::holonomy_from_shear(&c, &s).unwrap().trace_panel(&panel);
        let cplx = g0.holonomy(&c).unwrap().trace_panel(&panel);
        for (a, b) in real.iter().zip(&cplx) {
            assert!((Complex64::new(*a, 0.0) - b).norm() < 1e-12);
        }
        let g = graft_shearbend(&c, &s, &tau, &q_frac(3, 2)).unwrap();
        let (s2, tau2) = ungraft_shearbend(&c, &g, &q_frac(3, 2)).unwrap();
        assert_eq!((s2, tau2.weights), (s.clone(), tau.weights.clone()));
        let neg = tau.scale(&q(-1));
        assert!(matches!(graft_shearbend(&c, &s, &neg, &q(1)), Err(Error::NegativeBending(0))));
    }

    #[test]
    fn graft_fn_at_zero_is_real() {
        let chart = FnChart::genus_two();
        let x = FnCoordinates::new(vec![1.3, 0.8, 2.1], vec![0.4, -0.3, 0.7]).unwrap();
        let l = WeightedMulticurve::pants(&[q(1), q(2), q(1)]).unwrap();
        let h = graft_fn(&chart, &x, &l, 0.0).unwrap();
        assert!(h.generators.iter().all(|g| g.entries().iter().all(|z| z.im == 0.0)));
    }
}
