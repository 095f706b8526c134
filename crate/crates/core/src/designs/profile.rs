//! Piecewise radial media.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::RadialDiffeo;

/// Radial coefficient: constant or a rule `r -> value`.
#[derive(Clone)]
pub enum Coef {
    Const(f64),
    Var(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Coef {
    pub fn var(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Coef::Var(Arc::new(f))
    }

    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        match self {
            Coef::Const(c) => *c,
            Coef::Var(f) => f(r),
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Coef::Const(c) => Some(*c),
            Coef::Var(_) => None,
        }
    }
}

impl fmt::Debug for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Const(c) => write!(f, "Const({c})"),
            Coef::Var(_) => write!(f, "Var(..)"),
        }
    }
}

impl From<f64> for Coef {
    fn from(c: f64) -> Self {
        Coef::Const(c)
    }
}

/// Which radial equation the profile describes.
///
/// With `L = l(l+1)` and `q = r^2 a u'`, both models solve
/// `q' = b L u - r^2 K u + r^2 w p` where
/// `K = omega^2 w` (Helmholtz, spectral parameter `omega`) or
/// `K = a (E - V)` (Schrödinger, spectral parameter `E`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveModel {
    Helmholtz,
    Schrodinger,
}

/// Coefficients on `[r0, r1]`: radial and tangential conductivity eigenvalues
/// (orthonormal frame), bulk density `w = |g|^{1/2}` and potential `v`.
#[derive(Clone, Debug)]
pub struct RadialInterval {
    pub r0: f64,
    pub r1: f64,
    pub a: Coef,
    pub b: Coef,
    pub w: Coef,
    pub v: Coef,
    /// `a` vanishes quadratically at `r0`; the medium inside is decoupled.
    pub degenerate_inner: bool,
}

impl RadialInterval {
    pub fn new(r0: f64, r1: f64, a: Coef, b: Coef, w: Coef) -> Self {
        Self {
            r0,
            r1,
            a,
            b,
            w,
            v: Coef::Const(0.0),
            degenerate_inner: false,
        }
    }

    pub fn uniform(r0: f64, r1: f64, a: f64, b: f64, w: f64) -> Self {
        Self::new(r0, r1, a.into(), b.into(), w.into())
    }

    pub fn with_potential(mut self, v: Coef) -> Self {
        self.v = v;
        self
    }

    pub fn is_constant(&self) -> bool {
        [&self.a, &self.b, &self.w, &self.v].iter().all(|c| c.constant().is_some())
    }

    pub fn coefficients(&self, r: f64) -> Coefficients {
        Coefficients {
            a: self.a.at(r),
            b: self.b.at(r),
            w: self.w.at(r),
            v: self.v.at(r),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub w: f64,
    pub v: f64,
}

/// One-sided limit selector at interfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Piecewise radial medium on `(0, 2]`.
#[derive(Clone, Debug)]
pub struct RadialMediumProfile {
    pub label: String,
    pub model: WaveModel,
    pub intervals: Vec<RadialInterval>,
}

pub const OUTER_RADIUS: f64 = 2.0;

impl RadialMediumProfile {
    pub fn new(label: impl Into<String>, model: WaveModel, intervals: Vec<RadialInterval>) -> Result<Self> {
        let p = Self {
            label: label.into(),
            model,
            intervals,
        };
        p.validate()?;
        Ok(p)
    }

    /// Homogeneous isotropic ball with `a = b = w = 1`.
    pub fn homogeneous() -> Self {
        Self::uniform(1.0, 1.0)
    }

    /// Isotropic ball with conductivity `a` and density `w`.
    pub fn uniform(a: f64, w: f64) -> Self {
        Self {
            label: format!("uniform a={a} w={w}"),
            model: WaveModel::Helmholtz,
            intervals: vec![RadialInterval::uniform(0.0, OUTER_RADIUS, a, a, w)],
        }
    }

    /// Free Schrödinger operator `-Laplace - E` on the ball.
    pub fn free_schrodinger() -> Self {
        Self {
            label: "free".into(),
            model: WaveModel::Schrodinger,
            intervals: vec![RadialInterval::uniform(0.0, OUTER_RADIUS, 1.0, 1.0, 1.0)],
        }
    }

    /// Checks the partition of `(0, 2]` and positivity at interior sample points.
    pub fn validate(&self) -> Result<()> {
        let first = self
            .intervals
            .first()
            .ok_or_else(|| Error::Domain("profile has no intervals".into()))?;
        if first.r0 != 0.0 {
            return Err(Error::Domain(format!("profile starts at r = {} instead of 0", first.r0)));
        }
        let last = self.intervals.last().unwrap();
        if (last.r1 - OUTER_RADIUS).abs() > 1e-14 {
            return Err(Error::Domain(format!("profile ends at r = {} instead of 2", last.r1)));
        }
        for pair in self.intervals.windows(2) {
            if (pair[0].r1 - pair[1].r0).abs() > 1e-14 {
                return Err(Error::Domain(format!(
                    "gap or overlap between intervals at r = {} / {}",
                    pair[0].r1, pair[1].r0
                )));
            }
        }
        for iv in &self.intervals {
            if !(iv.r1 > iv.r0) {
                return Err(Error::Domain(format!("empty interval [{}, {}]", iv.r0, iv.r1)));
            }
            for k in 1..8 {
                let r = iv.r0 + (iv.r1 - iv.r0) * k as f64 / 8.0;
                let c = iv.coefficients(r);
                if !(c.a > 0.0 && c.b > 0.0 && c.w > 0.0 && c.v.is_finite()) {
                    return Err(Error::Domain(format!(
                        "degenerate coefficients at r = {r}: {c:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Index of the interval containing `r` (left interval at interfaces for `Side::Minus`).
    pub fn locate(&self, r: f64, side: Side) -> Option<usize> {
        if !(r >= 0.0 && r <= OUTER_RADIUS) {
            return None;
        }
        let idx = self.intervals.iter().position(|iv| match side {
            Side::Minus => r > iv.r0 && r <= iv.r1,
            Side::Plus => r >= iv.r0 && r < iv.r1,
        });
        idx.or(match side {
            Side::Minus => Some(0),
            Side::Plus => Some(self.intervals.len() - 1),
        })
    }

    pub fn coefficients(&self, r: f64, side: Side) -> Result<Coefficients> {
        let i = self
            .locate(r, side)
            .ok_or_else(|| Error::Domain(format!("radius {r} outside (0, 2]")))?;
        Ok(self.intervals[i].coefficients(r))
    }

    /// Radial eigenvalue `a` (interval interior value, right limit at interfaces).
    pub fn a(&self, r: f64) -> f64 {
        self.coefficients(r, Side::Plus).map(|c| c.a).unwrap_or(f64::NAN)
    }

    pub fn b(&self, r: f64) -> f64 {
        self.coefficients(r, Side::Plus).map(|c| c.b).unwrap_or(f64::NAN)
    }

    pub fn w(&self, r: f64) -> f64 {
        self.coefficients(r, Side::Plus).map(|c| c.w).unwrap_or(f64::NAN)
    }

    /// `r^2 a(r)`: the coefficient of the radial flux, equal to the `rr`
    /// component of the conductivity density in spherical coordinates on the equator.
    pub fn radial_flux_coefficient(&self, r: f64, side: Side) -> f64 {
        self.coefficients(r, side).map(|c| r * r * c.a).unwrap_or(f64::NAN)
    }

    /// Index of the first interval of the part seen from the boundary:
    /// everything before a degenerate interface is decoupled.
    pub fn coupled_start(&self) -> usize {
        self.intervals.iter().rposition(|iv| iv.degenerate_inner).unwrap_or(0)
    }

    /// Interface radii strictly inside `(0, 2)`.
    pub fn interfaces(&self) -> Vec<f64> {
        self.intervals.iter().skip(1).map(|iv| iv.r0).collect()
    }

    /// Push-forward by a radial diffeomorphism `phi` of `[0, 2]` fixing both ends.
    ///
    /// At `rho = phi(r)`: `a~ = a phi' r^2/phi^2`, `b~ = b/phi'`, `w~ = w r^2/(phi' phi^2)`.
    pub fn pushforward(&self, phi: &RadialDiffeo) -> Result<Self> {
        if self.model != WaveModel::Helmholtz {
            return Err(Error::Domain("push-forward is defined for Helmholtz profiles".into()));
        }
        if (phi.phi(OUTER_RADIUS) - OUTER_RADIUS).abs() > 1e-12 || phi.phi(0.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("{} does not fix r = 0 and r = 2", phi.label)));
        }
        let intervals = self
            .intervals
            .iter()
            .map(|iv| {
                let pull = |c: &Coef, rule: fn(f64, f64, f64, f64) -> f64| {
                    let (c, phi) = (c.clone(), phi.clone());
                    Coef::var(move |rho| {
                        let r = phi.phi_inverse(rho);
                        if r == 0.0 {
                            let d0 = phi.dphi(0.0);
                            return rule(c.at(0.0), 1.0, d0, d0);
                        }
                        rule(c.at(r), r, phi.phi(r), phi.dphi(r))
                    })
                };
                RadialInterval {
                    r0: phi.phi(iv.r0),
                    r1: if iv.r1 == OUTER_RADIUS { OUTER_RADIUS } else { phi.phi(iv.r1) },
                    a: pull(&iv.a, |a, r, p, dp| a * dp * r * r / (p * p)),
                    b: pull(&iv.b, |b, _, _, dp| b / dp),
                    w: pull(&iv.w, |w, r, p, dp| w * r * r / (dp * p * p)),
                    v: iv.v.clone(),
                    degenerate_inner: iv.degenerate_inner,
                }
            })
            .collect();
        Self::new(format!("{} pushed by {}", self.label, phi.label), self.model, intervals)
    }

    /// Coefficient samples for serialisation; `per_interval` points per interval.
    pub fn to_schema(&self, per_interval: usize) -> ProfileSchema {
        let intervals = self
            .intervals
            .iter()
            .map(|iv| {
                let n = if iv.is_constant() { 1 } else { per_interval.max(2) };
                let samples = (0..n)
                    .map(|k| {
                        let r = if n == 1 {
                            0.5 * (iv.r0 + iv.r1)
                        } else {
                            iv.r0 + (iv.r1 - iv.r0) * (k as f64 + 0.5) / n as f64
                        };
                        let c = iv.coefficients(r);
                        ProfileSample {
                            r,
                            a: c.a,
                            b: c.b,
                            w: c.w,
                            v: c.v,
                        }
                    })
                    .collect();
                IntervalSchema {
                    r0: iv.r0,
                    r1: iv.r1,
                    constant: iv.is_constant(),
                    degenerate_inner: iv.degenerate_inner,
                    samples,
                }
            })
            .collect();
        ProfileSchema {
            label: self.label.clone(),
            model: self.model,
            outer_radius: OUTER_RADIUS,
            intervals,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProfileSample {
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub w: f64,
    pub v: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IntervalSchema {
    pub r0: f64,
    pub r1: f64,
    pub constant: bool,
    pub degenerate_inner: bool,
    pub samples: Vec<ProfileSample>,
}

/// Structured-text form of a profile.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProfileSchema {
    pub label: String,
    pub model: WaveModel,
    pub outer_radius: f64,
    pub intervals: Vec<IntervalSchema>,
}
