//! Points, symmetric tensors and tensor fields.
//!
//! Tensors are always stored in Cartesian components. The spherical
//! representations used when talking about radial media are conversion
//! views ([`SymTensor3::to_orthonormal_spherical`] and
//! [`SymTensor3::to_spherical_density`]), never the storage format: the
//! spherical chart degenerates on the z-axis.
//!
//! In three dimensions a Riemannian metric `g` and an anisotropic
//! conductivity `sigma` determine each other through
//! `sigma^{ij} = |g|^{1/2} g^{ij}` and `g^{ij} = (det sigma)^{-1} sigma^{ij}`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Smallest-to-largest eigenvalue ratio below which a tensor is treated as degenerate.
pub const SPD_RATIO: f64 = 1e-14;

/// Evaluations closer than this to a declared singular set are rejected.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

/// Symmetric 3x3 tensor stored by its six independent components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymTensor3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
}

impl SymTensor3 {
    pub const fn new(xx: f64, yy: f64, zz: f64, xy: f64, xz: f64, yz: f64) -> Self {
        Self { xx, yy, zz, xy, xz, yz }
    }

    pub const fn identity() -> Self {
        Self::diagonal(1.0, 1.0, 1.0)
    }

    pub const fn diagonal(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c, 0.0, 0.0, 0.0)
    }

    pub fn scalar(s: f64) -> Self {
        Self::diagonal(s, s, s)
    }

    /// Symmetric part of an arbitrary matrix.
    pub fn from_matrix(m: &Mat3) -> Self {
        Self::new(
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 2)],
            0.5 * (m[(0, 1)] + m[(1, 0)]),
            0.5 * (m[(0, 2)] + m[(2, 0)]),
            0.5 * (m[(1, 2)] + m[(2, 1)]),
        )
    }

    /// `radial * n n^T + tangential * (I - n n^T)` for a unit vector `n`.
    pub fn radial_tangential(n: &Vec3, radial: f64, tangential: f64) -> Self {
        let nn = n * n.transpose();
        Self::from_matrix(&(nn * radial + (Mat3::identity() - nn) * tangential))
    }

    pub fn to_matrix(&self) -> Mat3 {
        Mat3::new(
            self.xx, self.xy, self.xz, //
            self.xy, self.yy, self.yz, //
            self.xz, self.yz, self.zz,
        )
    }

    pub fn components(&self) -> [f64; 6] {
        [self.xx, self.yy, self.zz, self.xy, self.xz, self.yz]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    pub fn det(&self) -> f64 {
        self.to_matrix().determinant()
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn scale(&self, s: f64) -> Self {
        let c = self.components();
        Self::new(c[0] * s, c[1] * s, c[2] * s, c[3] * s, c[4] * s, c[5] * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.components(), other.components());
        Self::new(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4], a[5] + b[5])
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let eig = SymmetricEigen::new(self.to_matrix());
        let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// Positive definite in the sense `lambda_min > SPD_RATIO * lambda_max > 0`.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_finite() {
            return false;
        }
        let [lo, _, hi] = self.eigenvalues();
        hi > 0.0 && lo > SPD_RATIO * hi
    }

    fn require_spd(&self, what: &str) -> Result<()> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} is not positive definite (eigenvalues {:?})",
                self.eigenvalues()
            )))
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = self
            .to_matrix()
            .try_inverse()
            .ok_or_else(|| Error::Domain("singular tensor has no inverse".into()))?;
        Ok(Self::from_matrix(&m))
    }

    /// `J T J^T`.
    pub fn congruence(&self, j: &Mat3) -> Self {
        Self::from_matrix(&(j * self.to_matrix() * j.transpose()))
    }

    /// `v^T T v`.
    pub fn quadratic(&self, v: &Vec3) -> f64 {
        v.dot(&(self.to_matrix() * v))
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.to_matrix() * v
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Components in the orthonormal frame `(e_r, e_theta, e_phi)` at `p`
    /// (theta polar angle, phi azimuth).
    pub fn to_orthonormal_spherical(&self, p: &Point3) -> Result<Mat3> {
        let frame = spherical_frame(p)?;
        Ok(frame * self.to_matrix() * frame.transpose())
    }

    /// Coordinate-basis components in `(r, theta, phi)` of the tensor
    /// density `sigma`, i.e. `r^2 sin(theta) (du/dx) sigma (du/dx)^T`.
    ///
    /// This is the representation in which a conductivity carries explicit
    /// `sin(theta)` factors; the weight is the Jacobian of the chart.
    pub fn to_spherical_density(&self, p: &Point3) -> Result<Mat3> {
        let frame = spherical_frame(p)?;
        let r = p.coords.norm();
        let sin_theta = (p.x * p.x + p.y * p.y).sqrt() / r;
        // rows of du/dx: e_r, e_theta / r, e_phi / (r sin theta)
        let scale = Mat3::from_diagonal(&Vec3::new(1.0, 1.0 / r, 1.0 / (r * sin_theta)));
        let du_dx = scale * frame;
        Ok(du_dx * self.to_matrix() * du_dx.transpose() * (r * r * sin_theta))
    }
}

impl fmt::Display for SymTensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}, {}], [{}, {}, {}], [{}, {}, {}]]",
            self.xx, self.xy, self.xz, self.xy, self.yy, self.yz, self.xz, self.yz, self.zz
        )
    }
}

/// Rows are `e_r`, `e_theta`, `e_phi` at `p`. Undefined on the z-axis.
pub fn spherical_frame(p: &Point3) -> Result<Mat3> {
    let r = p.coords.norm();
    let rho = (p.x * p.x + p.y * p.y).sqrt();
    if r == 0.0 || rho <= 1e-300 {
        return Err(Error::SingularSet {
            point: [p.x, p.y, p.z],
            set: "spherical chart axis".into(),
        });
    }
    let (st, ct) = (rho / r, p.z / r);
    let (cp, sp) = (p.x / rho, p.y / rho);
    Ok(Mat3::new(
        st * cp, st * sp, ct, //
        ct * cp, ct * sp, -st, //
        -sp, cp, 0.0,
    ))
}

/// `sigma = |det g|^{1/2} g^{-1}`.
pub fn metric_to_conductivity(g: &SymTensor3) -> Result<SymTensor3> {
    g.require_spd("metric")?;
    let density = g.det().sqrt();
    Ok(g.inverse()?.scale(density))
}

/// Inverse of [`metric_to_conductivity`] in three dimensions:
/// `g^{ij} = (det sigma)^{-1} sigma^{ij}`, hence `g = det(sigma) sigma^{-1}`.
pub fn conductivity_to_metric(sigma: &SymTensor3) -> Result<SymTensor3> {
    sigma.require_spd("conductivity")?;
    Ok(sigma.inverse()?.scale(sigma.det()))
}

/// Volume density `|det g|^{1/2}`. Equals `det sigma` for the associated conductivity.
pub fn volume_density(g: &SymTensor3) -> Result<f64> {
    g.require_spd("metric")?;
    Ok(g.det().sqrt())
}

/// Set removed from the domain of a field or map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularSet {
    Empty,
    Point { at: [f64; 3] },
    Sphere { center: [f64; 3], radius: f64 },
    /// Closed ball; evaluation anywhere inside is rejected.
    Ball { center: [f64; 3], radius: f64 },
    Segment { from: [f64; 3], to: [f64; 3] },
    Union { parts: Vec<SingularSet> },
}

impl SingularSet {
    pub fn origin() -> Self {
        SingularSet::Point { at: [0.0; 3] }
    }

    pub fn unit_sphere() -> Self {
        SingularSet::Sphere {
            center: [0.0; 3],
            radius: 1.0,
        }
    }

    /// Euclidean distance from `p` to the set (`+inf` for the empty set).
    pub fn distance(&self, p: &Point3) -> f64 {
        let v = |a: &[f64; 3]| Vec3::new(a[0], a[1], a[2]);
        match self {
            SingularSet::Empty => f64::INFINITY,
            SingularSet::Point { at } => (p.coords - v(at)).norm(),
            SingularSet::Sphere { center, radius } => ((p.coords - v(center)).norm() - radius).abs(),
            SingularSet::Ball { center, radius } => ((p.coords - v(center)).norm() - radius).max(0.0),
            SingularSet::Segment { from, to } => {
                let (a, b) = (v(from), v(to));
                let d = b - a;
                let t = if d.norm_squared() == 0.0 {
                    0.0
                } else {
                    ((p.coords - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0)
                };
                (p.coords - (a + d * t)).norm()
            }
            SingularSet::Union { parts } => {
                parts.iter().map(|s| s.distance(p)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Topological dimension of the set (`None` when empty).
    pub fn dimension(&self) -> Option<usize> {
        match self {
            SingularSet::Empty => None,
            SingularSet::Point { .. } => Some(0),
            SingularSet::Segment { .. } => Some(1),
            SingularSet::Sphere { .. } => Some(2),
            SingularSet::Ball { .. } => Some(3),
            SingularSet::Union { parts } => parts.iter().filter_map(|p| p.dimension()).max(),
        }
    }

    pub fn check(&self, p: &Point3) -> Result<()> {
        if self.distance(p) <= SINGULAR_CUTOFF {
            Err(Error::SingularSet {
                point: [p.x, p.y, p.z],
                set: self.describe(),
            })
        } else {
            Ok(())
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SingularSet::Empty => "empty".into(),
            SingularSet::Point { at } => format!("point {at:?}"),
            SingularSet::Sphere { center, radius } => format!("sphere |x - {center:?}| = {radius}"),
            SingularSet::Ball { center, radius } => format!("ball |x - {center:?}| <= {radius}"),
            SingularSet::Segment { from, to } => format!("segment {from:?} -> {to:?}"),
            SingularSet::Union { parts } => parts.iter().map(|p| p.describe()).collect::<Vec<_>>().join(" u "),
        }
    }
}

type TensorRule = dyn Fn(&Point3) -> SymTensor3 + Send + Sync;
type ScalarRule = dyn Fn(&Point3) -> f64 + Send + Sync;

/// Position-dependent symmetric tensor with a declared singular support.
#[derive(Clone)]
pub struct SymTensorField {
    rule: Arc<TensorRule>,
    singular: SingularSet,
}

impl SymTensorField {
    pub fn new(singular: SingularSet, rule: impl Fn(&Point3) -> SymTensor3 + Send + Sync + 'static) -> Self {
        Self {
            rule: Arc::new(rule),
            singular,
        }
    }

    pub fn constant(t: SymTensor3) -> Self {
        Self::new(SingularSet::Empty, move |_| t)
    }

    pub fn euclidean() -> Self {
        Self::constant(SymTensor3::identity())
    }

    pub fn singular_set(&self) -> &SingularSet {
        &self.singular
    }

    /// Evaluates the rule, rejecting singular-set points and checking positivity.
    pub fn eval(&self, p: &Point3) -> Result<SymTensor3> {
        self.singular.check(p)?;
        let t = (self.rule)(p);
        if !t.is_positive_definite() {
            return Err(Error::Domain(format!(
                "tensor field not positive definite at {:?}: {t}",
                [p.x, p.y, p.z]
            )));
        }
        Ok(t)
    }

    /// Evaluates without the positivity check (still rejects the singular set).
    pub fn eval_raw(&self, p: &Point3) -> Result<SymTensor3> {
        self.singular.check(p)?;
        Ok((self.rule)(p))
    }
}

impl fmt::Debug for SymTensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymTensorField").field("singular", &self.singular).finish_non_exhaustive()
    }
}

/// Position-dependent scalar (bulk modulus, potential, source).
#[derive(Clone)]
pub struct ScalarField {
    rule: Arc<ScalarRule>,
    singular: SingularSet,
}

impl ScalarField {
    pub fn new(singular: SingularSet, rule: impl Fn(&Point3) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            rule: Arc::new(rule),
            singular,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(SingularSet::Empty, move |_| c)
    }

    pub fn eval(&self, p: &Point3) -> Result<f64> {
        self.singular.check(p)?;
        let v = (self.rule)(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("scalar field not finite at {:?}", [p.x, p.y, p.z])))
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("singular", &self.singular).finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_metric_gives_identity_conductivity() {
        let s = metric_to_conductivity(&SymTensor3::identity()).unwrap();
        assert!(s.max_abs_diff(&SymTensor3::identity()) < 1e-15);
        assert_eq!(volume_density(&SymTensor3::identity()).unwrap(), 1.0);
    }

    #[test]
    fn scalar_metric_cases() {
        let g = SymTensor3::scalar(4.0);
        let s = metric_to_conductivity(&g).unwrap();
        assert!(s.max_abs_diff(&SymTensor3::scalar(2.0)) < 1e-15);
        assert!((volume_density(&g).unwrap() - 8.0).abs() < 1e-14);
        let back = conductivity_to_metric(&SymTensor3::scalar(2.0)).unwrap();
        assert!(back.max_abs_diff(&g) < 1e-14);
        let unit = conductivity_to_metric(&SymTensor3::identity()).unwrap();
        assert!(unit.max_abs_diff(&SymTensor3::identity()) < 1e-15);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let bad = SymTensor3::diagonal(1.0, 1.0, 0.0);
        assert!(matches!(metric_to_conductivity(&bad), Err(Error::Domain(_))));
        assert!(matches!(conductivity_to_metric(&bad), Err(Error::Domain(_))));
        let tiny = SymTensor3::diagonal(1.0, 1.0, 1e-15);
        assert!(volume_density(&tiny).is_err());
        let indefinite = SymTensor3::diagonal(1.0, -1.0, 1.0);
        assert!(metric_to_conductivity(&indefinite).is_err());
    }

    #[test]
    fn spherical_density_view_has_chart_weights() {
        // isotropic unit conductivity: density components r^2 sin(t) diag(1, 1/r^2, 1/(r^2 sin^2 t))
        let p = Point3::new(0.3, -0.4, 1.2);
        let r = p.coords.norm();
        let st = 0.5 / r;
        let m = SymTensor3::identity().to_spherical_density(&p).unwrap();
        let expect = [r * r * st, st, 1.0 / st];
        for i in 0..3 {
            assert!((m[(i, i)] - expect[i]).abs() < 1e-12 * expect[i]);
        }
        assert!(m[(0, 1)].abs() < 1e-12 && m[(0, 2)].abs() < 1e-12 && m[(1, 2)].abs() < 1e-12);
    }

    #[test]
    fn chart_axis_is_singular() {
        assert!(spherical_frame(&Point3::new(0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn singular_set_distances() {
        let p = Point3::new(0.0, 0.0, 3.0);
        assert_eq!(SingularSet::unit_sphere().distance(&p), 2.0);
        let seg = SingularSet::Segment { from: [0.0, 0.0, 0.0], to: [0.0, 0.0, 1.0] };
        assert_eq!(seg.distance(&p), 2.0);
        assert_eq!(seg.dimension(), Some(1));
        assert!(SingularSet::origin().check(&Point3::origin()).is_err());
        let field = SymTensorField::new(SingularSet::unit_sphere(), |_| SymTensor3::identity());
        assert!(field.eval(&Point3::new(1.0, 0.0, 0.0)).is_err());
        assert!(field.eval(&Point3::new(1.5, 0.0, 0.0)).is_ok());
    }
}
