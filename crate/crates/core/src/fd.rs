//! Central finite differences with Richardson extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{Mat2, Scalar};

/// Step configuration; recorded in every report that uses it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    #[serde(with = "crate::serial::real")]
    pub h: f64,
    pub richardson: u32,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            h: 1e-5,
            richardson: 1,
        }
    }
}

impl FdConfig {
    pub fn with_h(h: f64) -> Self {
        Self {
            h,
            ..Self::default()
        }
    }
}

/// Values that finite differences can be taken of.
pub trait FdValue: Clone {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self;
    fn finite(&self) -> bool;
}

impl FdValue for f64 {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        a * self + b * other
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Scalar> FdValue for Mat2<T> {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        self.scale_real(a) + other.scale_real(b)
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl<V: FdValue> FdValue for Vec<V> {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        self.iter().zip(other).map(|(x, y)| x.lin(a, y, b)).collect()
    }
    fn finite(&self) -> bool {
        self.iter().all(FdValue::finite)
    }
}

/// `d/dt f(t)` at `t = 0`.
pub fn derivative<V: FdValue>(f: impl Fn(f64) -> Result<V>, cfg: FdConfig) -> Result<V> {
    let central = |h: f64| -> Result<V> {
        let p = f(h)?;
        let m = f(-h)?;
        let d = p.lin(0.5 / h, &m, -0.5 / h);
        if d.finite() {
            Ok(d)
        } else {
            Err(Error::FiniteDifference(format!("step {h:e}")))
        }
    };
    let levels = cfg.richardson as usize;
    let mut row: Vec<V> = Vec::with_capacity(levels + 1);
    for k in 0..=levels {
        row.push(central(cfg.h / f64::from(1u32 << k))?);
    }
    // Tableau: each level cancels the next even power of h.
    for j in 1..=levels {
        let factor = 4f64.powi(j as i32);
        row = row
            .windows(2)
            .map(|w| w[1].lin(factor / (factor - 1.0), &w[0], -1.0 / (factor - 1.0)))
            .collect();
    }
    Ok(row.pop().expect("non-empty tableau"))
}

/// Directional derivative of `f` at `x` along `v`.
pub fn directional<V: FdValue>(f: impl Fn(&[f64]) -> Result<V>, x: &[f64], v: &[f64], cfg: FdConfig) -> Result<V> {
    derivative(
        |t| {
            let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + t * b).collect();
            f(&y)
        },
        cfg,
    )
}

/// Jacobian columns `∂f/∂x_j`.
pub fn jacobian(f: impl Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], cfg: FdConfig) -> Result<Vec<Vec<f64>>> {
    (0..x.len())
        .map(|j| {
            let mut e = vec![0.0; x.len()];
            e[j] = 1.0;
            directional(&f, x, &e, cfg)
        })
        .collect()
}
