//! Train tracks, weight systems and the Thurston form.
//!
//! A track is stored combinatorially: edges are indices, each switch lists
//! one incoming edge and two ordered outgoing edges. The `(+, −)` order is
//! input data, never derived. Extra linear constraints (puncture rows) cut
//! the weight space further.

use std::ops::{Add, Mul, Sub};

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, q, q_to_string, Q};
use crate::surface::SurfaceSig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Switch {
    #[serde(rename = "in")]
    pub incoming: usize,
    pub out_plus: usize,
    pub out_minus: usize,
}

impl Switch {
    pub const fn new(incoming: usize, out_plus: usize, out_minus: usize) -> Self {
        Self {
            incoming,
            out_plus,
            out_minus,
        }
    }
}

/// Serialized form; [`TrainTrack`] is built from it through validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackSpec {
    pub name: String,
    pub edges: Vec<String>,
    pub switches: Vec<Switch>,
    #[serde(default, with = "crate::serial::rational_rows")]
    pub constraints: Vec<Vec<Q>>,
    #[serde(default)]
    pub surface: Option<SurfaceSig>,
    #[serde(default)]
    pub maximal: bool,
    /// Allows edges with a free end, for local pieces of a track.
    #[serde(default)]
    pub fragment: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TrackSpec", into = "TrackSpec")]
pub struct TrainTrack {
    spec: TrackSpec,
    id: u64,
}

impl TryFrom<TrackSpec> for TrainTrack {
    type Error = Error;
    fn try_from(spec: TrackSpec) -> Result<Self> {
        TrainTrack::new(spec)
    }
}

impl From<TrainTrack> for TrackSpec {
    fn from(t: TrainTrack) -> Self {
        t.spec
    }
}

impl TrainTrack {
    pub fn new(spec: TrackSpec) -> Result<Self> {
        let n = spec.edges.len();
        let mut ends = vec![0usize; n];
        for (v, s) in spec.switches.iter().enumerate() {
            for e in [s.incoming, s.out_plus, s.out_minus] {
                if e >= n {
                    return Err(Error::InvalidTrack(format!("switch {v} names edge {e}, track has {n} edges")));
                }
                ends[e] += 1;
            }
        }
        for (e, &k) in ends.iter().enumerate() {
            let ok = if spec.fragment { (1..=2).contains(&k) } else { k == 2 };
            if !ok {
                return Err(Error::InvalidTrack(format!(
                    "edge {} ({}) has {k} switch ends",
                    e, spec.edges[e]
                )));
            }
        }
        for (r, row) in spec.constraints.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTrack(format!("constraint row {r} has {} entries, expected {n}", row.len())));
            }
        }
        let id = fingerprint(&spec);
        Ok(Self { spec, id })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn spec(&self) -> &TrackSpec {
        &self.spec
    }

    pub fn edge_count(&self) -> usize {
        self.spec.edges.len()
    }

    pub fn edge_names(&self) -> &[String] {
        &self.spec.edges
    }

    pub fn switches(&self) -> &[Switch] {
        &self.spec.switches
    }

    pub fn constraints(&self) -> &[Vec<Q>] {
        &self.spec.constraints
    }

    pub fn surface(&self) -> Option<SurfaceSig> {
        self.spec.surface
    }

    pub fn is_maximal(&self) -> bool {
        self.spec.maximal
    }

    pub fn is_fragment(&self) -> bool {
        self.spec.fragment
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.spec.edges.iter().position(|e| e == name)
    }

    /// Same track with extra constraint rows appended.
    pub fn with_constraints(&self, rows: Vec<Vec<Q>>) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.constraints.extend(rows);
        Self::new(spec)
    }

    /// Switch relations `a(in) − a(out+) − a(out−) = 0` followed by constraint rows.
    pub fn relation_matrix(&self) -> Vec<Vec<Q>> {
        let n = self.edge_count();
        let mut rows: Vec<Vec<Q>> = self
            .spec
            .switches
            .iter()
            .map(|s| {
                let mut r = vec![Q::zero(); n];
                r[s.incoming] += q(1);
                r[s.out_plus] -= q(1);
                r[s.out_minus] -= q(1);
                r
            })
            .collect();
        rows.extend(self.spec.constraints.iter().cloned());
        rows
    }

    pub fn dimension(&self) -> usize {
        self.edge_count() - exact::rank(&self.relation_matrix())
    }
}

// FNV-1a over the canonical JSON; stable across runs and platforms.
fn fingerprint(spec: &TrackSpec) -> u64 {
    let bytes = serde_json::to_vec(spec).unwrap_or_default();
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Rational edge weights satisfying the switch relations of one track.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightSystem {
    pub track: u64,
    #[serde(with = "crate::serial::rational_vec")]
    pub weights: Vec<Q>,
    /// Set when the weights count strands of a carried multicurve.
    #[serde(default)]
    pub realizable: bool,
}

impl WeightSystem {
    pub fn zero(track: &TrainTrack) -> Self {
        Self {
            track: track.id(),
            weights: vec![Q::zero(); track.edge_count()],
            realizable: true,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|w| !w.is_negative())
    }

    fn same_track(&self, other: &Self) -> Result<()> {
        if self.track != other.track || self.weights.len() != other.weights.len() {
            return Err(Error::TrackMismatch);
        }
        Ok(())
    }

    fn combine(&self, other: &Self, f: impl Fn(&Q, &Q) -> Q) -> Result<Self> {
        self.same_track(other)?;
        let weights: Vec<Q> = self.weights.iter().zip(&other.weights).map(|(a, b)| f(a, b)).collect();
        let realizable = weights.iter().all(|w| !w.is_negative()) && self.realizable && other.realizable;
        Ok(Self {
            track: self.track,
            weights,
            realizable,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            track: self.track,
            weights: self.weights.iter().map(|w| w * c).collect(),
            realizable: self.realizable && !c.is_negative(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(exact::q_to_f64).collect()
    }
}

fn check_track(t: &TrainTrack, a: &WeightSystem) -> Result<()> {
    if a.track != t.id() || a.weights.len() != t.edge_count() {
        return Err(Error::TrackMismatch);
    }
    Ok(())
}

pub fn validate_weights(t: &TrainTrack, a: Vec<Q>) -> Result<WeightSystem> {
    if a.len() != t.edge_count() {
        return Err(Error::WeightLength {
            expected: t.edge_count(),
            got: a.len(),
        });
    }
    for (v, s) in t.switches().iter().enumerate() {
        let outgoing = &a[s.out_plus] + &a[s.out_minus];
        if a[s.incoming] != outgoing {
            return Err(Error::SwitchViolation {
                switch: v,
                incoming: q_to_string(&a[s.incoming]),
                outgoing: q_to_string(&outgoing),
            });
        }
    }
    for (r, row) in t.constraints().iter().enumerate() {
        let value = exact::dot(row, &a);
        if !value.is_zero() {
            return Err(Error::ConstraintViolation {
                row: r,
                value: q_to_string(&value),
            });
        }
    }
    Ok(WeightSystem {
        track: t.id(),
        realizable: a.iter().all(|w| !w.is_negative()),
        weights: a,
    })
}

/// Exact basis of the weight space (switch relations plus constraints).
pub fn weight_space_basis(t: &TrainTrack) -> Vec<WeightSystem> {
    exact::nullspace(&t.relation_matrix(), t.edge_count())
        .into_iter()
        .map(|weights| WeightSystem {
            track: t.id(),
            realizable: weights.iter().all(|w| !w.is_negative()),
            weights,
        })
        .collect()
}

/// Coordinates of `a` in `basis`, or `None` when `a` is not in the span.
pub fn basis_coordinates(basis: &[WeightSystem], a: &WeightSystem) -> Option<Vec<Q>> {
    let vs: Vec<Vec<Q>> = basis.iter().map(|b| b.weights.clone()).collect();
    exact::solve_in_span(&vs, &a.weights)
}

/// `Σ_v a(e_v⁺) b(e_v⁻) − b(e_v⁺) a(e_v⁻)` over any ring of weights.
pub fn thurston_sum<T>(t: &TrainTrack, a: &[T], b: &[T]) -> T
where
    T: Clone + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    t.switches().iter().fold(T::zero(), |acc, s| {
        acc + a[s.out_plus].clone() * b[s.out_minus].clone()
            - b[s.out_plus].clone() * a[s.out_minus].clone()
    })
}

pub fn thurston_form(t: &TrainTrack, a: &WeightSystem, b: &WeightSystem) -> Result<Q> {
    check_track(t, a)?;
    check_track(t, b)?;
    Ok(thurston_sum(t, &a.weights, &b.weights))
}

/// Gram matrix `Ω_Th(b_i, b_j)` of a list of weight systems.
pub fn thurston_gram(t: &TrainTrack, basis: &[WeightSystem]) -> Result<Vec<Vec<Q>>> {
    basis
        .iter()
        .map(|a| basis.iter().map(|b| thurston_form(t, a, b)).collect())
        .collect()
}

/// `(σ + τ, σ − τ)`.
pub fn double_earthquake_linear(sigma: &WeightSystem, tau: &WeightSystem) -> Result<(WeightSystem, WeightSystem)> {
    Ok((sigma.add(tau)?, sigma.sub(tau)?))
}

/// Both sides of `Ω(ρ₁+θ₁, ρ₂+θ₂) − Ω(ρ₁−θ₁, ρ₂−θ₂) = 2Ω(θ₁,ρ₂) − 2Ω(θ₂,ρ₁)`.
pub fn de_pullback_identity(
    t: &TrainTrack,
    rho1: &WeightSystem,
    theta1: &WeightSystem,
    rho2: &WeightSystem,
    theta2: &WeightSystem,
) -> Result<(Q, Q)> {
    let (p1, m1) = double_earthquake_linear(rho1, theta1)?;
    let (p2, m2) = double_earthquake_linear(rho2, theta2)?;
    let lhs = thurston_form(t, &p1, &p2)? - thurston_form(t, &m1, &m2)?;
    let rhs = q(2) * thurston_form(t, theta1, rho2)? - q(2) * thurston_form(t, theta2, rho1)?;
    Ok((lhs, rhs))
}

/// Strand counts of a carried multicurve, checked and tagged realizable.
pub fn carried_cocycle(t: &TrainTrack, counts: Vec<Q>) -> Result<WeightSystem> {
    if let Some((edge, c)) = counts.iter().enumerate().find(|(_, c)| c.is_negative()) {
        return Err(Error::NegativeCount {
            edge,
            count: q_to_string(c),
        });
    }
    let mut w = validate_weights(t, counts)?;
    w.realizable = true;
    Ok(w)
}

/// A random element of the weight space: small integer combination of the
/// basis divided by a random denominator.
pub fn random_weight_system<R: Rng + ?Sized>(t: &TrainTrack, rng: &mut R, bound: i64) -> WeightSystem {
    let basis = weight_space_basis(t);
    let den = q(rng.random_range(1..=bound.max(1)));
    let mut w = WeightSystem::zero(t);
    for b in &basis {
        let c = q(rng.random_range(-bound..=bound)) / &den;
        w = w.add(&b.scale(&c)).expect("same track");
    }
    w.realizable = w.is_nonnegative();
    w
}

/// The fragment around a single switch: edges `e, e+, e−`, one relation.
pub fn one_switch() -> TrainTrack {
    TrainTrack::new(TrackSpec {
        name: "one-switch".into(),
        edges: vec!["e".into(), "e+".into(), "e-".into()],
        switches: vec![Switch::new(0, 1, 2)],
        constraints: Vec::new(),
        surface: None,
        maximal: false,
        fragment: true,
    })
    .expect("static track")
}

/// One-switch fragment with both outgoing weights pinned to zero; its weight
/// space is `{0}`.
pub fn pinned_one_switch() -> TrainTrack {
    let mut spec = one_switch().spec.clone();
    spec.name = "one-switch-pinned".into();
    spec.constraints = vec![vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]];
    TrainTrack::new(spec).expect("static track")
}

/// Two-switch track on the punctured torus, dual to the two-triangle ideal
/// triangulation. Both switches read `e3 → (e1, e2)`.
pub fn torus_two_switch() -> TrainTrack {
    TrainTrack::new(TrackSpec {
        name: "torus-two-switch".into(),
        edges: vec!["e1".into(), "e2".into(), "e3".into()],
        switches: vec![Switch::new(2, 0, 1), Switch::new(2, 0, 1)],
        constraints: Vec::new(),
        surface: Some(SurfaceSig {
            genus: 1,
            punctures: 1,
        }),
        maximal: true,
        fragment: false,
    })
    .expect("static track")
}

/// Side of a closed leaf a spiralling branch attaches to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Tracks made of closed loops with branches spiralling onto them.
///
/// Left attachments spiral along the loop orientation, right ones against
/// it. Each loop is cut into one segment per attachment, in call order.
#[derive(Clone, Debug, Default)]
pub struct SpiralTrackBuilder {
    loops: Vec<(String, Vec<(usize, Side)>)>,
    branches: Vec<String>,
}

/// Edge layout of a track produced by [`SpiralTrackBuilder`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpiralLayout {
    /// Segment edge ids of each loop, in loop order.
    pub loop_segments: Vec<Vec<usize>>,
    /// Edge id of each branch.
    pub branches: Vec<usize>,
}

impl SpiralTrackBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_loop(&mut self, name: &str) -> usize {
        self.loops.push((name.to_string(), Vec::new()));
        self.loops.len() - 1
    }

    /// Adds a branch running from `(loop, side)` to `(loop, side)`.
    pub fn branch(&mut self, name: &str, from: (usize, Side), to: (usize, Side)) -> usize {
        let b = self.branches.len();
        self.branches.push(name.to_string());
        self.loops[from.0].1.push((b, from.1));
        self.loops[to.0].1.push((b, to.1));
        b
    }

    pub fn build(
        &self,
        name: &str,
        surface: Option<SurfaceSig>,
        constraints: impl FnOnce(&SpiralLayout, usize) -> Vec<Vec<Q>>,
    ) -> Result<(TrainTrack, SpiralLayout)> {
        let mut edges = Vec::new();
        let mut loop_segments = Vec::new();
        for (name, att) in &self.loops {
            let ids: Vec<usize> = (0..att.len())
                .map(|j| {
                    edges.push(format!("{name}.{j}"));
                    edges.len() - 1
                })
                .collect();
            loop_segments.push(ids);
        }
        let branches: Vec<usize> = self
            .branches
            .iter()
            .map(|b| {
                edges.push(b.clone());
                edges.len() - 1
            })
            .collect();
        let mut switches = Vec::new();
        for (k, (_, att)) in self.loops.iter().enumerate() {
            let segs = &loop_segments[k];
            let m = segs.len();
            for (j, &(b, side)) in att.iter().enumerate() {
                // Switch j sits between segment j-1 (upstream) and segment j.
                let up = segs[(j + m - 1) % m];
                let down = segs[j];
                let br = branches[b];
                switches.push(match side {
                    Side::Left => Switch::new(down, up, br),
                    Side::Right => Switch::new(up, down, br),
                });
            }
        }
        let layout = SpiralLayout {
            loop_segments,
            branches,
        };
        let rows = constraints(&layout, edges.len());
        let track = TrainTrack::new(TrackSpec {
            name: name.to_string(),
            edges,
            switches,
            constraints: rows,
            surface,
            maximal: true,
            fragment: false,
        })?;
        Ok((track, layout))
    }
}

impl SpiralLayout {
    /// Weight 1 on every segment of `loop_id`, 0 elsewhere: the closed leaf
    /// itself as a carried curve.
    pub fn loop_counts(&self, loop_id: usize, edges: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); edges];
        for &e in &self.loop_segments[loop_id] {
            v[e] = q(1);
        }
        v
    }
}

/// Track of the maximal lamination made of a closed curve on the punctured
/// torus and the three leaves spiralling onto it.
///
/// Branch `s0` carries the leaf joining the two sides of the curve, branch
/// `s12` the two leaves running out to the cusp; the puncture row forces
/// `s12 = 0`.
pub fn punctured_torus_spiral() -> (TrainTrack, SpiralLayout) {
    let mut b = SpiralTrackBuilder::new();
    let g = b.add_loop("g");
    b.branch("s0", (g, Side::Left), (g, Side::Right));
    b.branch("s12", (g, Side::Left), (g, Side::Right));
    // Reorder attachments so the loop reads s0-left, s12-left, s0-right, s12-right.
    b.loops[g].1 = vec![(0, Side::Left), (1, Side::Left), (0, Side::Right), (1, Side::Right)];
    b.build("punctured-torus-spiral", Some(SurfaceSig { genus: 1, punctures: 1 }), |lay, n| {
        let mut row = vec![Q::zero(); n];
        row[lay.branches[1]] = q(1);
        vec![row]
    })
    .expect("static track")
}

/// Maximal track on the closed genus-2 surface: the three pants curves of
/// the dumbbell decomposition as loops, three spiralling arcs per pants.
pub fn genus_two_pants() -> (TrainTrack, SpiralLayout) {
    let mut b = SpiralTrackBuilder::new();
    let g1 = b.add_loop("g1");
    let g2 = b.add_loop("g2");
    let g3 = b.add_loop("g3");
    b.branch("f11", (g1, Side::Left), (g1, Side::Right));
    b.branch("f13", (g1, Side::Left), (g3, Side::Left));
    b.branch("f31", (g3, Side::Left), (g1, Side::Right));
    b.branch("f22", (g2, Side::Left), (g2, Side::Right));
    b.branch("f23", (g2, Side::Left), (g3, Side::Right));
    b.branch("f32", (g3, Side::Right), (g2, Side::Right));
    b.build("genus-two-pants", Some(SurfaceSig { genus: 2, punctures: 0 }), |_, _| Vec::new())
        .expect("static track")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn one_switch_validation() {
        let t = one_switch();
        assert!(validate_weights(&t, qs(&[5, 2, 3])).is_ok());
        assert!(matches!(
            validate_weights(&t, qs(&[1, 1, 1])),
            Err(Error::SwitchViolation { switch: 0, .. })
        ));
        assert!(validate_weights(&t, qs(&[0, 0, 0])).is_ok());
        assert!(matches!(
            validate_weights(&t, qs(&[1, 1])),
            Err(Error::WeightLength { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn one_switch_form_value() {
        let t = one_switch();
        let a = validate_weights(&t, qs(&[5, 2, 3])).unwrap();
        let b = validate_weights(&t, qs(&[3, 1, 2])).unwrap();
        // Brute force: 2·2 − 1·3.
        assert_eq!(thurston_form(&t, &a, &b).unwrap(), q(2 * 2 - 3));
        assert_eq!(thurston_form(&t, &a, &a).unwrap(), q(0));
    }

    #[test]
    fn dimensions() {
        assert_eq!(weight_space_basis(&one_switch()).len(), 2);
        assert_eq!(weight_space_basis(&pinned_one_switch()).len(), 0);
        let (g2, _) = genus_two_pants();
        assert_eq!(g2.switches().len(), 12);
        assert_eq!(g2.edge_count(), 18);
        assert_eq!(weight_space_basis(&g2).len(), 6);
        assert_eq!(weight_space_basis(&torus_two_switch()).len(), 2);
        let (pt, _) = punctured_torus_spiral();
        assert_eq!(weight_space_basis(&pt).len(), 2);
    }

    #[test]
    fn double_earthquake_examples() {
        let t = one_switch();
        let s = validate_weights(&t, qs(&[5, 2, 3])).unwrap();
        let tau = validate_weights(&t, qs(&[3, 1, 2])).unwrap();
        let (l, r) = double_earthquake_linear(&s, &tau).unwrap();
        assert_eq!(l.weights, qs(&[8, 3, 5]));
        assert_eq!(r.weights, qs(&[2, 1, 1]));
        let z = WeightSystem::zero(&t);
        let (l, r) = double_earthquake_linear(&s, &z).unwrap();
        assert_eq!((l.clone(), r), (s.clone(), s.clone()));
        let (l, r) = double_earthquake_linear(&z, &tau).unwrap();
        assert_eq!(l.weights, tau.weights);
        assert_eq!(r.weights, qs(&[-3, -1, -2]));
    }

    #[test]
    fn pullback_identity_examples() {
        let t = one_switch();
        let a = validate_weights(&t, qs(&[5, 2, 3])).unwrap();
        let b = validate_weights(&t, qs(&[3, 1, 2])).unwrap();
        let z = WeightSystem::zero(&t);
        assert_eq!(de_pullback_identity(&t, &a, &z, &b, &z).unwrap(), (q(0), q(0)));
        let (lhs, rhs) = de_pullback_identity(&t, &a, &b, &b, &a).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mismatched_tracks_rejected() {
        let a = WeightSystem::zero(&one_switch());
        let b = WeightSystem::zero(&torus_two_switch());
        assert_eq!(a.add(&b), Err(Error::TrackMismatch));
        assert_eq!(thurston_form(&one_switch(), &a, &b), Err(Error::TrackMismatch));
    }

    #[test]
    fn carried_counts() {
        let t = one_switch();
        let one = carried_cocycle(&t, qs(&[1, 1, 0])).unwrap();
        assert!(one.realizable);
        let k = carried_cocycle(&t, qs(&[4, 4, 0])).unwrap();
        assert_eq!(k, one.scale(&q(4)));
        assert!(carried_cocycle(&t, qs(&[1, 0, 0])).is_err());
        assert!(matches!(
            carried_cocycle(&t, qs(&[-1, -1, 0])),
            Err(Error::NegativeCount { edge: 0, .. })
        ));
    }

    #[test]
    fn spiral_loop_is_carried() {
        let (t, lay) = punctured_torus_spiral();
        let c = carried_cocycle(&t, lay.loop_counts(0, t.edge_count())).unwrap();
        assert!(c.realizable);
        // Branch weights enter the loop pairing with a factor −2.
        let s0 = lay.branches[0];
        for b in weight_space_basis(&t) {
            let s = b.scale(&q_frac(-7, 3));
            assert_eq!(thurston_form(&t, &s, &c).unwrap(), q(-2) * &s.weights[s0]);
        }
    }

    #[test]
    fn track_json_round_trip() {
        let (t, _) = genus_two_pants();
        let s = serde_json::to_string(&t).unwrap();
        let back: TrainTrack = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.id(), t.id());
    }

    #[test]
    fn dangling_edge_needs_fragment_flag() {
        let mut spec = one_switch().spec().clone();
        spec.fragment = false;
        assert!(matches!(TrainTrack::new(spec), Err(Error::InvalidTrack(_))));
    }
}
