//! Adaptive Hamiltonian ray tracing with exact surface events.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::metric::{EventSphere, RayMetric, SurfaceKind};
use crate::error::{Error, Result};
use crate::geometry::{Point3, Vec3};
use crate::ode::Dopri5;

/// Phase-space state of a ray.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayState {
    pub position: Point3,
    /// Momentum covector `p_i`.
    pub momentum: Vec3,
    pub t: f64,
    /// Accumulated optical (metric) length.
    pub length: f64,
}

impl RayState {
    pub fn new(position: Point3, momentum: Vec3) -> Self {
        Self {
            position,
            momentum,
            t: 0.0,
            length: 0.0,
        }
    }

    /// State leaving `position` with velocity along `direction`, scaled to `H = 1/2`
    /// so that the parameter is metric arclength.
    pub fn launch(metric: &dyn RayMetric, position: Point3, direction: Vec3) -> Result<Self> {
        let g = metric.inverse(&position)?.inverse()?;
        let p = g.apply(&direction);
        let speed = p.dot(&direction);
        if !(speed > 0.0) {
            return Err(Error::Domain(format!("zero launch direction at {position:?}")));
        }
        Ok(Self::new(position, p / speed.sqrt()))
    }

    fn pack(&self) -> [f64; 7] {
        let (x, p) = (self.position, self.momentum);
        [x.x, x.y, x.z, p.x, p.y, p.z, self.length]
    }

    fn unpack(y: &[f64; 7], t: f64) -> Self {
        Self {
            position: Point3::new(y[0], y[1], y[2]),
            momentum: Vec3::new(y[3], y[4], y[5]),
            t,
            length: y[6],
        }
    }
}

/// One recorded point of a trace. `piece` is 0 for the Euclidean
/// (or single-chart) part and 1 on a wormhole handle, where `position`
/// holds the sphere point and `zeta` the handle coordinate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RaySample {
    pub t: f64,
    pub position: [f64; 3],
    pub momentum: [f64; 3],
    pub hamiltonian: f64,
    pub length: f64,
    pub piece: usize,
    pub zeta: Option<f64>,
    pub zeta_momentum: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// Left the domain sphere.
    Exited,
    /// Step collapse or arrival at a singular surface.
    TangencyGuard,
    MaxSteps,
    /// Parameter budget `t_max` used up.
    ParameterLimit,
    /// Reached the stop surface with this tag (for instance a gluing sphere).
    Stopped(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceOptions {
    pub t_max: f64,
    pub tol: f64,
    /// Trace ends when the ray leaves `|x| < domain_radius`.
    pub domain_radius: Option<f64>,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Step size below which the tangency guard fires.
    pub min_step: f64,
    /// Distance to the singular set below which the tangency guard fires for rays not moving away.
    pub guard_distance: f64,
    pub record: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            t_max: 100.0,
            tol: 1e-10,
            domain_radius: Some(3.0),
            h_init: 1e-2,
            h_max: 0.05,
            max_steps: 1_000_000,
            min_step: 1e-12,
            guard_distance: 1e-9,
            record: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceResult {
    pub samples: Vec<RaySample>,
    pub termination: Termination,
    #[serde(skip)]
    pub end: RayState,
    pub initial_hamiltonian: f64,
    /// `max |H - H0| / H0` over accepted steps.
    pub max_drift: f64,
    pub refractions: usize,
    pub steps: usize,
}

impl TraceResult {
    /// Relative Hamiltonian drift per unit parameter.
    pub fn drift_rate(&self) -> f64 {
        self.max_drift / self.end.t.max(1.0)
    }

    /// Unit Euclidean direction of the final velocity.
    pub fn exit_direction(&self, metric: &dyn RayMetric) -> Result<Vec3> {
        Ok(metric.inverse(&self.end.position)?.apply(&self.end.momentum).normalize())
    }

    pub fn csv_header() -> &'static str {
        "t,x,y,z,px,py,pz,H,length,piece,zeta,pzeta"
    }

    /// Polyline as CSV rows (no header).
    pub fn csv_rows(&self, out: &mut String) {
        use std::fmt::Write;
        for s in &self.samples {
            let opt = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
                s.t,
                s.position[0],
                s.position[1],
                s.position[2],
                s.momentum[0],
                s.momentum[1],
                s.momentum[2],
                s.hamiltonian,
                s.length,
                s.piece,
                opt(s.zeta),
                opt(s.zeta_momentum)
            );
        }
    }
}

fn sample(state: &RayState, h: f64) -> RaySample {
    RaySample {
        t: state.t,
        position: [state.position.x, state.position.y, state.position.z],
        momentum: [state.momentum.x, state.momentum.y, state.momentum.z],
        hamiltonian: h,
        length: state.length,
        piece: 0,
        zeta: None,
        zeta_momentum: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Action {
    Surface(SurfaceKind),
    Exit,
}

struct Surface {
    sphere: EventSphere,
    action: Action,
    side: f64,
}

/// Bisection for the first zero of `level` along the trial step `(0, h]`.
pub(crate) fn locate_crossing<const N: usize, F, L>(
    solver: &Dopri5,
    f: &mut F,
    t: f64,
    y: &[f64; N],
    h: f64,
    side: f64,
    level: L,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    L: Fn(&[f64; N]) -> f64,
{
    let (mut lo, mut hi) = (0.0, h);
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * (t.abs() + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (ym, _) = solver.attempt(f, t, y, mid);
        if level(&ym) * side > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Covector after crossing `sphere` at `x`: the tangential part is kept and the
/// normal part solves `H = h0` on the far side. Reflects when no solution exists.
fn refract(metric: &dyn RayMetric, sphere: &EventSphere, x: &Point3, p: &Vec3, outward: bool, h0: f64) -> Result<(Vec3, bool)> {
    let n = sphere.normal(x);
    let delta = 1e-12 * sphere.radius.max(1.0);
    let beyond = if outward { delta } else { -delta };
    let far = sphere.center + n * (sphere.radius + beyond);
    let g = metric.inverse(&far)?;
    let (a2, a1, a0) = (g.quadratic(&n), 2.0 * n.dot(&g.apply(p)), g.quadratic(p) - 2.0 * h0);
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let want = if outward { 1.0 } else { -1.0 };
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let roots = [(-a1 + sq) / (2.0 * a2), (-a1 - sq) / (2.0 * a2)];
        let best = roots
            .iter()
            .filter(|&&al| n.dot(&g.apply(&(p + n * al))) * want > 0.0)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()));
        if let Some(al) = best {
            return Ok((p + n * *al, true));
        }
    }
    let near = sphere.center + n * (sphere.radius - beyond);
    let g = metric.inverse(&near)?;
    let al = -2.0 * n.dot(&g.apply(p)) / g.quadratic(&n);
    Ok((p + n * al, false))
}

/// Integrates Hamilton's equations `x' = dH/dp`, `p' = -dH/dx` from `start`.
///
/// Metric jumps on [`SurfaceKind::Refract`] spheres are handled by refraction,
/// arrival at a [`SurfaceKind::Singular`] sphere or a collapsing step ends the
/// trace at the tangency guard.
pub fn trace(metric: &dyn RayMetric, start: RayState, opts: &TraceOptions) -> Result<TraceResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter {
            name: "tol",
            value: opts.tol,
            constraint: "tol > 0",
        });
    }
    let singular = metric.singular_set();
    singular.check(&start.position)?;
    let h0 = metric.hamiltonian(&start.position, &start.momentum)?;
    if !(h0 > 0.0) {
        return Err(Error::Domain(format!("initial Hamiltonian {h0} is not positive")));
    }
    let velocity0 = metric.hamiltonian_gradient(&start.position, &start.momentum)?.0;
    let mut surfaces: Vec<Surface> = metric
        .surfaces()
        .into_iter()
        .map(|s| Surface {
            sphere: s,
            action: Action::Surface(s.kind),
            side: 0.0,
        })
        .collect();
    if let Some(r) = opts.domain_radius {
        surfaces.push(Surface {
            sphere: EventSphere::new(Point3::origin(), r, SurfaceKind::Stop(usize::MAX)),
            action: Action::Exit,
            side: 0.0,
        });
    }
    for s in &mut surfaces {
        let lev = s.sphere.level(&start.position);
        s.side = if lev.abs() > 1e-12 * s.sphere.radius {
            lev.signum()
        } else {
            s.sphere.normal(&start.position).dot(&velocity0).signum()
        };
    }

    let mut rhs = |_: f64, y: &[f64; 7]| -> [f64; 7] {
        let x = Point3::new(y[0], y[1], y[2]);
        let p = Vec3::new(y[3], y[4], y[5]);
        match metric.hamiltonian_gradient(&x, &p) {
            Ok((dp, dx)) => [dp.x, dp.y, dp.z, -dx.x, -dx.y, -dx.z, p.dot(&dp).max(0.0).sqrt()],
            Err(_) => [f64::NAN; 7],
        }
    };
    let solver = Dopri5 {
        rtol: opts.tol,
        atol: opts.tol,
        norm_floor: 0.0,
        h_init: opts.h_init,
        h_min: opts.min_step,
        h_max: opts.h_max,
        max_steps: opts.max_steps,
    };

    let mut state = start;
    let mut y = state.pack();
    let mut samples = Vec::new();
    if opts.record {
        samples.push(sample(&state, h0));
    }
    let mut max_drift: f64 = 0.0;
    let mut refractions = 0;
    let mut h = opts.h_init.min(opts.h_max);
    let mut steps = 0;
    let termination = loop {
        if steps >= opts.max_steps {
            break Termination::MaxSteps;
        }
        let remaining = opts.t_max - state.t;
        if remaining <= 0.0 {
            break Termination::ParameterLimit;
        }
        let step = h.min(remaining);
        let (y_new, err) = solver.attempt(&mut rhs, state.t, &y, step);
        if !err.is_finite() || err > 1.0 || y_new.iter().any(|v| !v.is_finite()) {
            h = if err.is_finite() { solver.adapt(step, err) } else { 0.2 * step };
            if h < opts.min_step {
                break Termination::TangencyGuard;
            }
            continue;
        }
        steps += 1;
        let x_new = Point3::new(y_new[0], y_new[1], y_new[2]);
        let mut event: Option<(usize, f64)> = None;
        for (i, s) in surfaces.iter().enumerate() {
            if s.sphere.level(&x_new) * s.side <= 0.0 {
                let sphere = s.sphere;
                let hs = locate_crossing(&solver, &mut rhs, state.t, &y, step, s.side, |v: &[f64; 7]| {
                    sphere.level(&Point3::new(v[0], v[1], v[2]))
                });
                if event.map_or(true, |(_, he)| hs < he) {
                    event = Some((i, hs));
                }
            }
        }
        let Some((i, hs)) = event else {
            let next = RayState::unpack(&y_new, state.t + step);
            let hnow = metric.hamiltonian(&next.position, &next.momentum)?;
            y = y_new;
            state = next;
            max_drift = max_drift.max((hnow - h0).abs() / h0);
            if opts.record {
                samples.push(sample(&state, hnow));
            }
            let dist = singular.distance(&state.position);
            if dist < opts.guard_distance {
                let v = metric.hamiltonian_gradient(&state.position, &state.momentum)?.0;
                let ahead = singular.distance(&(state.position + v * 1e-3 * opts.guard_distance));
                if ahead - dist <= 1e-9 * 1e-3 * opts.guard_distance {
                    break Termination::TangencyGuard;
                }
            }
            h = solver.adapt(step, err);
            continue;
        };
        let (mut y_ev, _) = solver.attempt(&mut rhs, state.t, &y, hs);
        if y_ev.iter().any(|v| !v.is_finite()) {
            break Termination::TangencyGuard;
        }
        let s = &mut surfaces[i];
        let mut x = Point3::new(y_ev[0], y_ev[1], y_ev[2]);
        x = s.sphere.center + s.sphere.normal(&x) * s.sphere.radius;
        y_ev[0] = x.x;
        y_ev[1] = x.y;
        y_ev[2] = x.z;
        y = y_ev;
        state = RayState::unpack(&y, state.t + hs);
        let outcome = match s.action {
            Action::Exit => Some(Termination::Exited),
            Action::Surface(SurfaceKind::Singular) => Some(Termination::TangencyGuard),
            Action::Surface(SurfaceKind::Stop(k)) => Some(Termination::Stopped(k)),
            Action::Surface(SurfaceKind::Refract) => {
                let outward = s.side < 0.0;
                let (p, transmitted) = refract(metric, &s.sphere, &x, &state.momentum, outward, h0)?;
                if transmitted {
                    s.side = -s.side;
                }
                // sit strictly on the side whose metric the new covector belongs to
                let n = s.sphere.normal(&x);
                state.position = s.sphere.center + n * (s.sphere.radius + s.side * 1e-12 * s.sphere.radius.max(1.0));
                state.momentum = p;
                y = state.pack();
                refractions += 1;
                None
            }
        };
        if opts.record {
            let hnow = metric.hamiltonian(&state.position, &state.momentum).unwrap_or(h0);
            samples.push(sample(&state, hnow));
        }
        if let Some(term) = outcome {
            break term;
        }
        h = solver.adapt(step, err).max(hs).min(opts.h_max);
    };
    Ok(TraceResult {
        samples,
        termination,
        end: state,
        initial_hamiltonian: h0,
        max_drift,
        refractions,
        steps,
    })
}

/// A ray started on the domain sphere.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RayLaunch {
    pub start: [f64; 3],
    pub direction: [f64; 3],
    /// Distance of the straight line from the origin.
    pub impact: f64,
}

impl RayLaunch {
    /// Ray on the sphere of radius `radius` heading along `direction` with the
    /// given impact parameter, offset from the origin along `offset` (made orthogonal).
    pub fn new(radius: f64, direction: Vec3, offset: Vec3, impact: f64) -> Result<Self> {
        let d = direction.normalize();
        let e = offset - d * offset.dot(&d);
        if e.norm() == 0.0 || impact.abs() >= radius {
            return Err(Error::Domain("ray launch needs an offset transverse to the direction and |impact| < radius".into()));
        }
        let e = e.normalize();
        let x = e * impact - d * (radius * radius - impact * impact).sqrt();
        Ok(Self {
            start: [x.x, x.y, x.z],
            direction: [d.x, d.y, d.z],
            impact,
        })
    }

    pub fn position(&self) -> Point3 {
        Point3::new(self.start[0], self.start[1], self.start[2])
    }

    pub fn dir(&self) -> Vec3 {
        Vec3::new(self.direction[0], self.direction[1], self.direction[2])
    }
}

/// `count` rays with uniformly random directions, transverse offsets and
/// impact parameters in `impact_range`, launched from the sphere of radius `radius`.
pub fn random_ray_family(count: usize, impact_range: (f64, f64), radius: f64, seed: u64) -> Result<Vec<RayLaunch>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = |rng: &mut ChaCha8Rng| {
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - z * z).sqrt();
        Vec3::new(s * phi.cos(), s * phi.sin(), z)
    };
    (0..count)
        .map(|_| {
            let d = unit(&mut rng);
            let mut e = unit(&mut rng);
            while e.cross(&d).norm() < 1e-3 {
                e = unit(&mut rng);
            }
            let b = if impact_range.1 > impact_range.0 {
                rng.random_range(impact_range.0..impact_range.1)
            } else {
                impact_range.0
            };
            RayLaunch::new(radius, d, e, b)
        })
        .collect()
}

/// Deviation of a traced ray from the straight-line oracle.
#[derive(Clone, Debug, Serialize)]
pub struct RayComparison {
    pub impact: f64,
    pub termination: Termination,
    /// `|x_exit - x_line| / R`.
    pub exit_error: f64,
    /// `|v_exit - d|` for unit vectors.
    pub direction_error: f64,
    /// Relative optical length error.
    pub length_error: f64,
    pub drift_rate: f64,
    /// Set when the ray did not leave the domain normally.
    pub flagged: bool,
}

/// Compares a finished trace of `ray` with the straight line through the same
/// start, which leaves the sphere of radius `radius` at `x0 - 2 (x0.d) d`.
pub fn compare_with_line(metric: &dyn RayMetric, ray: &RayLaunch, res: &TraceResult, radius: f64) -> Result<RayComparison> {
    let x0 = ray.position();
    let d = ray.dir();
    let s = -2.0 * x0.coords.dot(&d);
    let exit = x0 + d * s;
    let flagged = res.termination != Termination::Exited;
    let (exit_error, direction_error, length_error) = if flagged {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        (
            (res.end.position - exit).norm() / radius,
            (res.exit_direction(metric)? - d).norm(),
            (res.end.length - s).abs() / s,
        )
    };
    Ok(RayComparison {
        impact: ray.impact,
        termination: res.termination,
        exit_error,
        direction_error,
        length_error,
        drift_rate: res.drift_rate(),
        flagged,
    })
}

/// Traces each ray through `metric` and compares with the straight line
/// through the same start, which is the ray of the Euclidean metric when
/// the metric is a push-forward by a map fixing the domain sphere.
pub fn travel_time_compare(metric: &dyn RayMetric, rays: &[RayLaunch], opts: &TraceOptions) -> Result<Vec<RayComparison>> {
    let radius = opts.domain_radius.ok_or_else(|| Error::Domain("travel time comparison needs a domain radius".into()))?;
    let mut o = opts.clone();
    o.record = false;
    rays.par_iter()
        .map(|ray| {
            let res = trace(metric, RayState::launch(metric, ray.position(), ray.dir())?, &o)?;
            compare_with_line(metric, ray, &res, radius)
        })
        .collect()
}
