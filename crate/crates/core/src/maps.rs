//! Coordinate maps, push-forwards and singular-map diagnostics.
//!
//! Conventions: for `F: x -> y` with Jacobian `DF = dy/dx`,
//!
//! * metrics push forward covariantly, `(F_* g)(y) = DF^{-T} g(x) DF^{-1}`,
//! * conductivities push forward as densities,
//!   `(F_* sigma)(y) = DF sigma(x) DF^T / |det DF|`,
//!
//! both evaluated at `x = F^{-1}(y)`. The two agree through
//! [`metric_to_conductivity`](crate::geometry::metric_to_conductivity).

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Mat3, Point3, SingularSet, SymTensor3, SymTensorField, Vec3};

type PointRule = dyn Fn(&Point3) -> Point3 + Send + Sync;
type JacobianRule = dyn Fn(&Point3) -> Mat3 + Send + Sync;
type ProfileRule = dyn Fn(f64) -> (f64, f64) + Send + Sync;
type InverseRule = dyn Fn(f64) -> f64 + Send + Sync;

/// Invertible map with analytic Jacobian, possibly singular on a set.
#[derive(Clone)]
pub struct DiffeoMap {
    forward: Arc<PointRule>,
    inverse: Arc<PointRule>,
    jacobian: Arc<JacobianRule>,
    /// Removed from the domain of `forward`.
    pub singular: SingularSet,
    /// Removed from the domain of `inverse` (image of the blown-up set).
    pub image_singular: SingularSet,
    pub label: String,
}

impl fmt::Debug for DiffeoMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffeoMap")
            .field("label", &self.label)
            .field("singular", &self.singular)
            .field("image_singular", &self.image_singular)
            .finish_non_exhaustive()
    }
}

impl DiffeoMap {
    pub fn new(
        label: impl Into<String>,
        singular: SingularSet,
        image_singular: SingularSet,
        forward: impl Fn(&Point3) -> Point3 + Send + Sync + 'static,
        inverse: impl Fn(&Point3) -> Point3 + Send + Sync + 'static,
        jacobian: impl Fn(&Point3) -> Mat3 + Send + Sync + 'static,
    ) -> Self {
        Self {
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            jacobian: Arc::new(jacobian),
            singular,
            image_singular,
            label: label.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(
            "identity",
            SingularSet::Empty,
            SingularSet::Empty,
            |p| *p,
            |p| *p,
            |_| Mat3::identity(),
        )
    }

    pub fn forward(&self, x: &Point3) -> Result<Point3> {
        self.singular.check(x)?;
        Ok((self.forward)(x))
    }

    pub fn inverse(&self, y: &Point3) -> Result<Point3> {
        self.image_singular.check(y)?;
        Ok((self.inverse)(y))
    }

    /// `DF(x)`, rows indexed by output coordinate.
    pub fn jacobian(&self, x: &Point3) -> Result<Mat3> {
        self.singular.check(x)?;
        Ok((self.jacobian)(x))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &DiffeoMap) -> DiffeoMap {
        let (f1, f2) = (self.forward.clone(), other.forward.clone());
        let (i1, i2) = (self.inverse.clone(), other.inverse.clone());
        let (j1, j2) = (self.jacobian.clone(), other.jacobian.clone());
        let f1b = f1.clone();
        DiffeoMap::new(
            format!("{} then {}", self.label, other.label),
            self.singular.clone(),
            other.image_singular.clone(),
            move |x| f2(&f1(x)),
            move |y| i1(&i2(y)),
            move |x| j2(&f1b(x)) * j1(x),
        )
    }
}

/// Radial map `x -> phi(|x|) x/|x|` described by its profile.
#[derive(Clone)]
pub struct RadialDiffeo {
    phi: Arc<ProfileRule>,
    inv: Arc<InverseRule>,
    pub label: String,
}

impl fmt::Debug for RadialDiffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialDiffeo").field("label", &self.label).finish_non_exhaustive()
    }
}

impl RadialDiffeo {
    /// `phi` returns `(phi(r), phi'(r))`; `inv` is its inverse.
    pub fn new(
        label: impl Into<String>,
        phi: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
        inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            phi: Arc::new(phi),
            inv: Arc::new(inv),
            label: label.into(),
        }
    }

    /// Inverse computed by safeguarded Newton iteration (requires `phi' > 0`).
    pub fn with_newton_inverse(
        label: impl Into<String>,
        phi: impl Fn(f64) -> (f64, f64) + Send + Sync + Clone + 'static,
    ) -> Self {
        let p = phi.clone();
        Self::new(label, phi, move |rho| newton_inverse(&p, rho))
    }

    /// `r -> r + c r (4 - r^2)/4` on `[0, 2]`, identity beyond. Fixes `r = 0` and `r = 2`;
    /// monotone for `|c| < 1/2`.
    pub fn smooth_bump(c: f64) -> Result<Self> {
        if !(c.abs() < 0.5) {
            return Err(Error::Parameter {
                name: "c",
                value: c,
                constraint: "|c| < 1/2",
            });
        }
        Ok(Self::with_newton_inverse(format!("smooth radial bump c={c}"), move |r: f64| {
            if r <= 2.0 {
                (r + c * r * (4.0 - r * r) / 4.0, 1.0 + c * (4.0 - 3.0 * r * r) / 4.0)
            } else {
                (r, 1.0)
            }
        }))
    }

    pub fn phi(&self, r: f64) -> f64 {
        (self.phi)(r).0
    }

    pub fn dphi(&self, r: f64) -> f64 {
        (self.phi)(r).1
    }

    pub fn phi_inverse(&self, rho: f64) -> f64 {
        (self.inv)(rho)
    }

    /// Jacobian `phi' n n^T + (phi/r)(I - n n^T)` at `x`.
    pub fn jacobian_at(&self, x: &Point3) -> Mat3 {
        let r = x.coords.norm();
        let (p, dp) = (self.phi)(r);
        if r == 0.0 {
            return Mat3::identity() * dp;
        }
        let n = x.coords / r;
        let nn = n * n.transpose();
        nn * dp + (Mat3::identity() - nn) * (p / r)
    }

    /// The associated 3D map. `singular` is removed from the domain, `image_singular`
    /// from the range.
    pub fn to_map(&self, singular: SingularSet, image_singular: SingularSet) -> DiffeoMap {
        let (f, i, j) = (self.clone(), self.clone(), self.clone());
        DiffeoMap::new(
            self.label.clone(),
            singular,
            image_singular,
            move |x| radial_apply(x, |r| f.phi(r)),
            move |y| radial_apply(y, |r| i.phi_inverse(r)),
            move |x| j.jacobian_at(x),
        )
    }
}

fn radial_apply(p: &Point3, g: impl Fn(f64) -> f64) -> Point3 {
    let r = p.coords.norm();
    if r == 0.0 {
        return *p;
    }
    Point3::from(p.coords * (g(r) / r))
}

fn newton_inverse(phi: &impl Fn(f64) -> (f64, f64), rho: f64) -> f64 {
    let mut r = rho;
    for _ in 0..100 {
        let (p, dp) = phi(r);
        let step = (p - rho) / dp;
        r = (r - step).max(0.5 * r);
        if step.abs() <= 1e-16 * (1.0 + r.abs()) {
            break;
        }
    }
    r
}

/// Blow-up of the origin: `F_1(x) = (|x|/2 + 1) x/|x|` for `0 < |x| <= 2`,
/// identity for `|x| > 2`. Inverse `y -> 2(|y| - 1) y/|y|` on `1 < |y| <= 2`.
pub fn blowup_radial() -> RadialDiffeo {
    RadialDiffeo::new(
        "blow-up of the origin",
        |r| if r <= 2.0 { (0.5 * r + 1.0, 0.5) } else { (r, 1.0) },
        |rho| if rho <= 2.0 { 2.0 * (rho - 1.0) } else { rho },
    )
}

pub fn blowup_point_map() -> DiffeoMap {
    blowup_radial().to_map(
        SingularSet::origin(),
        SingularSet::Ball {
            center: [0.0; 3],
            radius: 1.0,
        },
    )
}

fn check_truncation(r: f64) -> Result<()> {
    if r > 1.0 && r < 2.0 {
        Ok(())
    } else {
        Err(Error::Parameter {
            name: "R",
            value: r,
            constraint: "1 < R < 2",
        })
    }
}

/// Truncated blow-up `F_R` with `rho = 2(R - 1)`: identity on `|y| > 2`,
/// `(1 + |y|/2) y/|y|` on `rho < |y| <= 2` and the linear scaling
/// `y -> (R/rho) y` on `|y| <= rho`.
pub fn truncation_radial(r_trunc: f64) -> Result<RadialDiffeo> {
    check_truncation(r_trunc)?;
    let rho = 2.0 * (r_trunc - 1.0);
    let s = r_trunc / rho;
    Ok(RadialDiffeo::new(
        format!("truncated blow-up R={r_trunc}"),
        move |y| {
            if y <= rho {
                (s * y, s)
            } else if y <= 2.0 {
                (1.0 + 0.5 * y, 0.5)
            } else {
                (y, 1.0)
            }
        },
        move |x| {
            if x <= r_trunc {
                x / s
            } else if x <= 2.0 {
                2.0 * (x - 1.0)
            } else {
                x
            }
        },
    ))
}

pub fn truncation_map(r_trunc: f64) -> Result<DiffeoMap> {
    Ok(truncation_radial(r_trunc)?.to_map(SingularSet::Empty, SingularSet::Empty))
}

/// Non-radial triangular diffeomorphism `(x1 + a sin x2, x2 + b x3^2, x3)` with a
/// non-symmetric Jacobian, used to tell covariant and contravariant placements apart.
pub fn shear_map(a: f64, b: f64) -> DiffeoMap {
    DiffeoMap::new(
        format!("shear a={a} b={b}"),
        SingularSet::Empty,
        SingularSet::Empty,
        move |x| Point3::new(x.x + a * x.y.sin(), x.y + b * x.z * x.z, x.z),
        move |y| {
            let x2 = y.y - b * y.z * y.z;
            Point3::new(y.x - a * x2.sin(), x2, y.z)
        },
        move |x| {
            Mat3::new(
                1.0, a * x.y.cos(), 0.0, //
                0.0, 1.0, 2.0 * b * x.z, //
                0.0, 0.0, 1.0,
            )
        },
    )
}

fn inverse_jacobian(f: &DiffeoMap, y: &Point3) -> Result<(Point3, Mat3, Mat3)> {
    let x = f.inverse(y)?;
    let j = f.jacobian(&x)?;
    let jinv = j
        .try_inverse()
        .ok_or_else(|| Error::Domain(format!("Jacobian of {} not invertible at {:?}", f.label, [x.x, x.y, x.z])))?;
    Ok((x, j, jinv))
}

/// `(F_* g)(y) = DF^{-T} g(F^{-1} y) DF^{-1}`.
pub fn pushforward_metric(f: &DiffeoMap, g: &SymTensorField, y: &Point3) -> Result<SymTensor3> {
    let (x, _, jinv) = inverse_jacobian(f, y)?;
    Ok(g.eval(&x)?.congruence(&jinv.transpose()))
}

/// `(F_* sigma)(y) = DF sigma DF^T / |det DF|` at `x = F^{-1}(y)`.
pub fn pushforward_conductivity(f: &DiffeoMap, sigma: &SymTensorField, y: &Point3) -> Result<SymTensor3> {
    let (x, j, _) = inverse_jacobian(f, y)?;
    Ok(sigma.eval(&x)?.congruence(&j).scale(1.0 / j.determinant().abs()))
}

/// Field version of [`pushforward_metric`].
pub fn pushforward_metric_field(f: &DiffeoMap, g: &SymTensorField) -> SymTensorField {
    let (f, g) = (f.clone(), g.clone());
    let singular = f.image_singular.clone();
    SymTensorField::new(singular, move |y| {
        pushforward_metric(&f, &g, y).unwrap_or(SymTensor3::scalar(f64::NAN))
    })
}

/// Field version of [`pushforward_conductivity`].
pub fn pushforward_conductivity_field(f: &DiffeoMap, sigma: &SymTensorField) -> SymTensorField {
    let (f, s) = (f.clone(), sigma.clone());
    let singular = f.image_singular.clone();
    SymTensorField::new(singular, move |y| {
        pushforward_conductivity(&f, &s, y).unwrap_or(SymTensor3::scalar(f64::NAN))
    })
}

/// Pass/fail thresholds for [`validate_singular_map`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SingularMapThresholds {
    pub c0_min: f64,
    pub c1_min: f64,
}

impl Default for SingularMapThresholds {
    fn default() -> Self {
        Self {
            c0_min: 1e-3,
            c1_min: 1e-2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularMapReport {
    /// Largest `c0` with `dF >= c0 I` on the samples (smallest singular value).
    pub c0: f64,
    /// Largest `c1` with `det dF >= c1 / dist` on the samples.
    pub c1: f64,
    pub samples: usize,
    pub closest_distance: f64,
    pub c0_ok: bool,
    pub c1_ok: bool,
    pub passed: bool,
}

/// Samples `dF` on shells around `gamma` at distances from `1e-1` down to `1e-6`
/// along quasi-uniform directions and fits the constants of the Jacobian conditions.
pub fn validate_singular_map(
    f: &DiffeoMap,
    gamma: &Point3,
    samples: usize,
    thresholds: SingularMapThresholds,
) -> SingularMapReport {
    let shells = 11;
    let per_shell = samples.div_ceil(shells).max(1);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let (mut c0, mut c1) = (f64::INFINITY, f64::INFINITY);
    let mut count = 0;
    let mut closest = f64::INFINITY;
    for s in 0..shells {
        let dist = 10f64.powf(-1.0 - 5.0 * s as f64 / (shells - 1) as f64);
        for k in 0..per_shell {
            if count == samples {
                break;
            }
            let z = 1.0 - (2.0 * k as f64 + 1.0) / per_shell as f64;
            let rad = (1.0 - z * z).sqrt();
            let th = golden * k as f64;
            let dir = Vec3::new(rad * th.cos(), rad * th.sin(), z);
            let x = Point3::from(gamma.coords + dir * dist);
            let Ok(j) = f.jacobian(&x) else { continue };
            let sv = j.singular_values();
            c0 = c0.min(sv.min());
            c1 = c1.min(j.determinant() * dist);
            closest = closest.min(dist);
            count += 1;
        }
    }
    let c0_ok = c0 >= thresholds.c0_min;
    let c1_ok = c1 >= thresholds.c1_min;
    SingularMapReport {
        c0,
        c1,
        samples: count,
        closest_distance: closest,
        c0_ok,
        c1_ok,
        passed: c0_ok && c1_ok,
    }
}

/// One manifold piece of a design.
#[derive(Clone, Debug)]
pub struct ManifoldPiece {
    pub name: String,
    pub domain: String,
    pub metric: Option<SymTensorField>,
    /// Blown-up submanifold `gamma_j`, if any.
    pub blowup: Option<SingularSet>,
}

/// Device region `N_j` with its interface surface `Sigma_j`.
#[derive(Clone, Debug)]
pub struct DeviceRegion {
    pub name: String,
    pub interface: SingularSet,
}

/// Map between a manifold piece and a device region. `map` is `None` when
/// the physical realisation is left abstract and only chart transitions are used.
#[derive(Clone, Debug)]
pub struct PieceMap {
    pub source: usize,
    pub target: usize,
    pub map: Option<DiffeoMap>,
    pub description: String,
}

/// Singular transformation optics design `(M, N, F)`.
#[derive(Clone, Debug, Default)]
pub struct StoDesign {
    pub pieces: Vec<ManifoldPiece>,
    pub regions: Vec<DeviceRegion>,
    pub maps: Vec<PieceMap>,
}

impl StoDesign {
    /// Checks index consistency and `dim gamma_j <= n - 2 = 1`.
    pub fn validate(&self) -> Result<()> {
        for m in &self.maps {
            if m.source >= self.pieces.len() || m.target >= self.regions.len() {
                return Err(Error::Consistency(format!(
                    "map `{}` references piece {} / region {} out of range",
                    m.description, m.source, m.target
                )));
            }
        }
        for p in &self.pieces {
            if let Some(d) = p.blowup.as_ref().and_then(SingularSet::dimension) {
                if d > 1 {
                    return Err(Error::Consistency(format!(
                        "blow-up set of `{}` has dimension {d} > 1",
                        p.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// The single-coating cloak: `M_1 = B(0,2)` Euclidean blown up at the
    /// origin onto the shell `N_1`, and `M_2 = B(0,1)` mapped identically onto `N_2`.
    pub fn single_coating_cloak() -> Self {
        let unit = SingularSet::unit_sphere();
        StoDesign {
            pieces: vec![
                ManifoldPiece {
                    name: "M1".into(),
                    domain: "B(0,2) minus origin".into(),
                    metric: Some(SymTensorField::euclidean()),
                    blowup: Some(SingularSet::origin()),
                },
                ManifoldPiece {
                    name: "M2".into(),
                    domain: "B(0,1)".into(),
                    metric: Some(SymTensorField::euclidean()),
                    blowup: None,
                },
            ],
            regions: vec![
                DeviceRegion {
                    name: "N1".into(),
                    interface: unit.clone(),
                },
                DeviceRegion {
                    name: "N2".into(),
                    interface: unit,
                },
            ],
            maps: vec![
                PieceMap {
                    source: 0,
                    target: 0,
                    map: Some(blowup_point_map()),
                    description: "F1 blow-up".into(),
                },
                PieceMap {
                    source: 1,
                    target: 1,
                    map: Some(DiffeoMap::identity()),
                    description: "F2 identity".into(),
                },
            ],
        }
    }
}
