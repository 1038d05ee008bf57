//! Surfaces, their fundamental groups, curve words and weighted multicurves.
//!
//! Marking convention: a closed genus-g surface has generators
//! `a1, b1, …, ag, bg` and the single relator `[a1,b1]…[ag,bg]` with
//! `[x,y] = x y x⁻¹ y⁻¹`. A surface with `n > 0` punctures adds
//! `c1, …, c(n-1)` and drops the relator; puncture `j < n` has peripheral
//! word `cj`, the last puncture has `[a1,b1]…[ag,bg] c1 … c(n-1)`.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{q_to_string, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSig {
    pub genus: u32,
    pub punctures: u32,
}

impl SurfaceSig {
    pub fn new(genus: u32, punctures: u32) -> Result<Self> {
        let chi = 2 - 2 * i64::from(genus) - i64::from(punctures);
        if chi >= 0 {
            return Err(Error::NotHyperbolic {
                genus,
                punctures,
                chi,
            });
        }
        Ok(Self { genus, punctures })
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * i64::from(self.genus) - i64::from(self.punctures)
    }

    /// Real dimension of Teichmüller space, `6g − 6 + 2n`.
    pub fn teich_dim(&self) -> usize {
        (6 * self.genus as usize + 2 * self.punctures as usize) - 6
    }

    pub fn is_closed(&self) -> bool {
        self.punctures == 0
    }

    /// Named testbed tag, if this signature is one of the bundled ones.
    pub fn testbed_tag(&self) -> Option<&'static str> {
        match (self.genus, self.punctures) {
            (1, 1) => Some("t11"),
            (2, 0) => Some("g2"),
            _ => None,
        }
    }
}

/// Generator index with an inversion flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self::new(self.generator, !self.inverse)
    }

    /// Signed 1-based encoding: `a1 = 1`, `a1⁻¹ = -1`.
    pub fn to_signed(self) -> i64 {
        let g = self.generator as i64 + 1;
        if self.inverse {
            -g
        } else {
            g
        }
    }

    pub fn from_signed(x: i64) -> Option<Self> {
        if x == 0 {
            return None;
        }
        Some(Self::new(x.unsigned_abs() as usize - 1, x < 0))
    }
}

/// A word in the generators. `cyclic` records that the word was cyclically
/// reduced and denotes a conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CurveWord {
    pub letters: Vec<Letter>,
    pub cyclic: bool,
}

impl CurveWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self {
            letters,
            cyclic: false,
        }
    }

    pub fn from_signed(xs: &[i64]) -> Result<Self> {
        xs.iter()
            .map(|&x| Letter::from_signed(x).ok_or_else(|| Error::Format("letter 0 in word".into())))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.letters.iter().map(|l| l.to_signed()).collect()
    }

    pub fn generator(g: usize) -> Self {
        Self::new(vec![Letter::new(g, false)])
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.letters.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::new(letters)
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &Self, y: &Self) -> Self {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    /// Largest generator index used, plus one.
    pub fn rank_used(&self) -> usize {
        self.letters.iter().map(|l| l.generator + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for CurveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.to_signed().iter().map(i64::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for CurveWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_signed().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CurveWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let xs = Vec::<i64>::deserialize(d)?;
        CurveWord::from_signed(&xs).map_err(serde::de::Error::custom)
    }
}

/// Free reduction, then cyclic reduction when `cyclic` is set.
pub fn reduce_word(w: &CurveWord, cyclic: bool) -> CurveWord {
    let mut out: Vec<Letter> = Vec::with_capacity(w.letters.len());
    for &l in &w.letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    if cyclic || w.cyclic {
        let mut lo = 0;
        let mut hi = out.len();
        while hi - lo >= 2 && out[lo] == out[hi - 1].inv() {
            lo += 1;
            hi -= 1;
        }
        out = out[lo..hi].to_vec();
    }
    CurveWord {
        letters: out,
        cyclic: cyclic || w.cyclic,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<CurveWord>,
    pub peripherals: Vec<CurveWord>,
}

impl GroupPresentation {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `w` spelled with generator names, inverses as `x^-1`.
    pub fn spell(&self, w: &CurveWord) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = w
            .letters
            .iter()
            .map(|l| {
                let name = &self.generators[l.generator];
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect();
        parts.join(" ")
    }

    /// One-line statement of the marking convention.
    pub fn describe(&self) -> String {
        let mut out = format!("generators {}", self.generators.join(" "));
        for r in &self.relators {
            out += &format!("; relator {}", self.spell(r));
        }
        for p in &self.peripherals {
            out += &format!("; peripheral {}", self.spell(p));
        }
        out
    }

    /// The single relator of a closed-surface presentation.
    pub fn single_relator(&self) -> Option<&CurveWord> {
        match self.relators.as_slice() {
            [r] if self.peripherals.is_empty() => Some(r),
            _ => None,
        }
    }
}

pub fn build_presentation(sig: SurfaceSig) -> Result<GroupPresentation> {
    let sig = SurfaceSig::new(sig.genus, sig.punctures)?;
    let g = sig.genus as usize;
    let n = sig.punctures as usize;
    let single = g == 1;
    let mut generators = Vec::new();
    for i in 1..=g {
        if single {
            generators.push("a".to_string());
            generators.push("b".to_string());
        } else {
            generators.push(format!("a{i}"));
            generators.push(format!("b{i}"));
        }
    }
    let mut product = CurveWord::default();
    for i in 0..g {
        let c = CurveWord::commutator(&CurveWord::generator(2 * i), &CurveWord::generator(2 * i + 1));
        product = product.concat(&c);
    }
    if n == 0 {
        return Ok(GroupPresentation {
            generators,
            relators: vec![product],
            peripherals: Vec::new(),
        });
    }
    let mut peripherals = Vec::new();
    for j in 1..n {
        generators.push(format!("c{j}"));
        let w = CurveWord::generator(2 * g + j - 1);
        product = product.concat(&w);
        peripherals.push(w);
    }
    peripherals.push(product);
    Ok(GroupPresentation {
        generators,
        relators: Vec::new(),
        peripherals,
    })
}

/// A curve named either by a word or by a pants-curve index of an FN chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveRef {
    Word(CurveWord),
    ChartCurve(usize),
}

impl fmt::Display for CurveRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveRef::Word(w) => write!(f, "word[{w}]"),
            CurveRef::ChartCurve(i) => write!(f, "gamma{}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticurveComponent {
    pub curve: CurveRef,
    #[serde(with = "crate::serial::rational")]
    pub weight: Q,
}

/// Positive rational weights on pairwise distinct curves.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<MulticurveComponent>", into = "Vec<MulticurveComponent>")]
pub struct WeightedMulticurve {
    components: Vec<MulticurveComponent>,
}

impl WeightedMulticurve {
    pub fn new(components: Vec<(CurveRef, Q)>) -> Result<Self> {
        let mut out: Vec<MulticurveComponent> = Vec::with_capacity(components.len());
        for (curve, weight) in components {
            if !weight.is_positive() {
                return Err(Error::NonPositiveWeight(q_to_string(&weight)));
            }
            if out.iter().any(|c| c.curve == curve) {
                return Err(Error::DuplicateCurve(curve.to_string()));
            }
            out.push(MulticurveComponent { curve, weight });
        }
        Ok(Self { components: out })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Multicurve on pants curves `γ_i` with the given weights; zero weights are dropped.
    pub fn pants(weights: &[Q]) -> Result<Self> {
        Self::new(
            weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(i, w)| (CurveRef::ChartCurve(i), w.clone()))
                .collect(),
        )
    }

    pub fn components(&self) -> &[MulticurveComponent] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_pants_supported(&self) -> bool {
        self.components
            .iter()
            .all(|c| matches!(c.curve, CurveRef::ChartCurve(_)))
    }
}

impl TryFrom<Vec<MulticurveComponent>> for WeightedMulticurve {
    type Error = Error;
    fn try_from(v: Vec<MulticurveComponent>) -> Result<Self> {
        Self::new(v.into_iter().map(|c| (c.curve, c.weight)).collect())
    }
}

impl From<WeightedMulticurve> for Vec<MulticurveComponent> {
    fn from(m: WeightedMulticurve) -> Self {
        m.components
    }
}

pub fn multicurve_scale(l: &WeightedMulticurve, c: &Q) -> Result<WeightedMulticurve> {
    if !c.is_positive() {
        return Err(Error::NonPositiveScale(q_to_string(c)));
    }
    Ok(WeightedMulticurve {
        components: l
            .components
            .iter()
            .map(|m| MulticurveComponent {
                curve: m.curve.clone(),
                weight: &m.weight * c,
            })
            .collect(),
    })
}
