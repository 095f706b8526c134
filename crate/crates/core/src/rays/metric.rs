//! Metrics as seen by the ray tracer: inverse tensor, Hamiltonian gradient and
//! the spheres on which the tracer has to stop and act.

use crate::error::{Error, Result};
use crate::geometry::{Point3, SingularSet, SymTensor3, SymTensorField, Vec3};

/// What happens when a ray reaches an [`EventSphere`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurfaceKind {
    /// The metric jumps across the sphere; the covector is refracted.
    Refract,
    /// Singular surface: reaching it ends the trace at the tangency guard.
    Singular,
    /// Tagged stop (used for gluing spheres).
    Stop(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventSphere {
    pub center: Point3,
    pub radius: f64,
    pub kind: SurfaceKind,
}

impl EventSphere {
    pub fn new(center: Point3, radius: f64, kind: SurfaceKind) -> Self {
        Self { center, radius, kind }
    }

    /// Signed distance, positive outside.
    #[inline]
    pub fn level(&self, x: &Point3) -> f64 {
        (x - self.center).norm() - self.radius
    }

    pub fn normal(&self, x: &Point3) -> Vec3 {
        (x - self.center).normalize()
    }
}

/// A Riemannian metric given through its inverse `g^{ij}`.
///
/// Rays follow Hamilton's equations for `H(x, p) = g^{ij}(x) p_i p_j / 2`.
pub trait RayMetric: Send + Sync {
    /// Inverse metric `g^{ij}` at `x`.
    fn inverse(&self, x: &Point3) -> Result<SymTensor3>;

    /// `(dH/dp, dH/dx)`. The default differentiates [`RayMetric::inverse`]
    /// numerically (central differences, step `1e-6`, one Richardson step).
    fn hamiltonian_gradient(&self, x: &Point3, p: &Vec3) -> Result<(Vec3, Vec3)> {
        let dp = self.inverse(x)?.apply(p);
        let h = |y: &Point3| -> Result<f64> { Ok(0.5 * self.inverse(y)?.quadratic(p)) };
        let mut dx = Vec3::zeros();
        for k in 0..3 {
            let mut e = Vec3::zeros();
            e[k] = 1.0;
            let central = |s: f64| -> Result<f64> { Ok((h(&(x + e * s))? - h(&(x - e * s))?) / (2.0 * s)) };
            let (d1, d2) = (central(1e-6)?, central(5e-7)?);
            dx[k] = (4.0 * d2 - d1) / 3.0;
        }
        Ok((dp, dx))
    }

    /// Surfaces the tracer must locate exactly.
    fn surfaces(&self) -> Vec<EventSphere> {
        Vec::new()
    }

    fn singular_set(&self) -> SingularSet {
        SingularSet::Empty
    }

    fn hamiltonian(&self, x: &Point3, p: &Vec3) -> Result<f64> {
        Ok(0.5 * self.inverse(x)?.quadratic(p))
    }
}

/// Flat metric.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

impl RayMetric for Euclidean {
    fn inverse(&self, _: &Point3) -> Result<SymTensor3> {
        Ok(SymTensor3::identity())
    }

    fn hamiltonian_gradient(&self, _: &Point3, p: &Vec3) -> Result<(Vec3, Vec3)> {
        Ok((*p, Vec3::zeros()))
    }
}

/// Push-forward of the Euclidean metric by the blow-up of the origin.
///
/// On `1 < |x| < 2` the inverse metric is `A n n^T + T (I - n n^T)` with
/// `A = 1/4` and `T = |x|^2 / (4 (|x| - 1)^2)`; it is Euclidean elsewhere.
/// The radial component jumps at `|x| = 2`, where rays are refracted.
#[derive(Clone, Copy, Debug, Default)]
pub struct CloakMetric;

impl CloakMetric {
    pub const RADIAL: f64 = 0.25;

    pub fn tangential(rho: f64) -> f64 {
        let s = rho / (2.0 * (rho - 1.0));
        s * s
    }

    fn in_shell(rho: f64) -> bool {
        rho > 1.0 && rho < 2.0
    }
}

impl RayMetric for CloakMetric {
    fn inverse(&self, x: &Point3) -> Result<SymTensor3> {
        let rho = x.coords.norm();
        self.singular_set().check(x)?;
        if !Self::in_shell(rho) {
            return Ok(SymTensor3::identity());
        }
        Ok(SymTensor3::radial_tangential(
            &(x.coords / rho),
            Self::RADIAL,
            Self::tangential(rho),
        ))
    }

    fn hamiltonian_gradient(&self, x: &Point3, p: &Vec3) -> Result<(Vec3, Vec3)> {
        let rho = x.coords.norm();
        if !Self::in_shell(rho) {
            self.singular_set().check(x)?;
            return Ok((*p, Vec3::zeros()));
        }
        if rho - 1.0 < crate::geometry::SINGULAR_CUTOFF {
            return Err(Error::SingularSet {
                point: [x.x, x.y, x.z],
                set: "|x| = 1".into(),
            });
        }
        let n = x.coords / rho;
        let pn = n.dot(p);
        let t = Self::tangential(rho);
        let dt = -rho / (2.0 * (rho - 1.0).powi(3));
        let a = Self::RADIAL;
        let dp = p * t + n * ((a - t) * pn);
        let tangential_sq = p.norm_squared() - pn * pn;
        let dx = n * (0.5 * dt * tangential_sq) + (p - n * pn) * ((a - t) * pn / rho);
        Ok((dp, dx))
    }

    fn surfaces(&self) -> Vec<EventSphere> {
        vec![
            EventSphere::new(Point3::origin(), 2.0, SurfaceKind::Refract),
            EventSphere::new(Point3::origin(), 1.0, SurfaceKind::Singular),
        ]
    }

    fn singular_set(&self) -> SingularSet {
        SingularSet::unit_sphere()
    }
}

/// Metric given by a tensor field of `g_{ij}`; derivatives are numerical.
#[derive(Clone, Debug)]
pub struct FieldMetric {
    pub field: SymTensorField,
    pub surfaces: Vec<EventSphere>,
}

impl FieldMetric {
    pub fn new(field: SymTensorField) -> Self {
        Self {
            field,
            surfaces: Vec::new(),
        }
    }

    pub fn with_surfaces(mut self, surfaces: Vec<EventSphere>) -> Self {
        self.surfaces = surfaces;
        self
    }
}

impl RayMetric for FieldMetric {
    fn inverse(&self, x: &Point3) -> Result<SymTensor3> {
        self.field.eval(x)?.inverse()
    }

    fn surfaces(&self) -> Vec<EventSphere> {
        self.surfaces.clone()
    }

    fn singular_set(&self) -> SingularSet {
        self.field.singular_set().clone()
    }
}
