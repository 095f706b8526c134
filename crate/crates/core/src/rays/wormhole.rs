//! Rays through the wormhole: straight lines outside the two balls, geodesics
//! of the warped handle `h^2 dzeta^2 + r(zeta)^2 g_{S^2}` inside.
//!
//! On the handle the ray is stored as an embedded unit vector `s`, its velocity
//! `s'`, and `(zeta, zeta')`. The geodesic equations are
//!
//! ```text
//! zeta'' = r r' |s'|^2 / h^2
//! s''    = -|s'|^2 s - 2 (r'/r) zeta' s'
//! ```
//!
//! and `J = r^2 s x s'` is conserved (Clairaut). With unit speed, `|J| = r sin(angle to the zeta axis)`.

use serde::Serialize;

use super::metric::{EventSphere, RayMetric, SurfaceKind};
use super::trace::{locate_crossing, trace, RaySample, RayState, Termination, TraceOptions, TraceResult};
use crate::designs::wormhole::WormholeDesign;
use crate::error::{Error, Result};
use crate::geometry::{Point3, SymTensor3, Vec3};
use crate::ode::Dopri5;

/// End of the handle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HandleEnd {
    /// `zeta = 0`, glued to the sphere around `O`.
    O,
    /// `zeta = 1`, glued to the sphere around `P`.
    P,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Transit {
    pub entered: HandleEnd,
    pub exited: Option<HandleEnd>,
    /// Initial `|J|`.
    pub clairaut: f64,
    /// `max | |J| - |J0| |` along the handle.
    pub clairaut_drift: f64,
    /// Extreme `zeta` reached (max when entering at `O`, min when entering at `P`).
    pub zeta_extreme: f64,
}

impl Transit {
    pub fn returned(&self) -> bool {
        self.exited == Some(self.entered)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WormholeTrace {
    pub trace: TraceResult,
    pub transits: Vec<Transit>,
}

struct Exterior {
    o: Point3,
    p: Point3,
    outer: f64,
}

const TAG_O: usize = 0;
const TAG_P: usize = 1;
const TAG_OUT: usize = 2;

impl RayMetric for Exterior {
    fn inverse(&self, _: &Point3) -> Result<SymTensor3> {
        Ok(SymTensor3::identity())
    }

    fn hamiltonian_gradient(&self, _: &Point3, p: &Vec3) -> Result<(Vec3, Vec3)> {
        Ok((*p, Vec3::zeros()))
    }

    fn surfaces(&self) -> Vec<EventSphere> {
        let mid = Point3::from((self.o.coords + self.p.coords) * 0.5);
        vec![
            EventSphere::new(self.o, 1.0, SurfaceKind::Stop(TAG_O)),
            EventSphere::new(self.p, 1.0, SurfaceKind::Stop(TAG_P)),
            EventSphere::new(mid, self.outer, SurfaceKind::Stop(TAG_OUT)),
        ]
    }
}

fn reflect(v: &Vec3) -> Vec3 {
    Vec3::new(v.x, v.y, -v.z)
}

fn handle_sample(design: &WormholeDesign, y: &[f64; 9], t: f64) -> RaySample {
    let (r, _) = design.warp.eval(y[6]);
    let h = design.handle_length;
    let ps = Vec3::new(y[3], y[4], y[5]) * (r * r);
    let pz = h * h * y[7];
    RaySample {
        t,
        position: [y[0], y[1], y[2]],
        momentum: [ps.x, ps.y, ps.z],
        hamiltonian: 0.5 * (pz * pz / (h * h) + ps.norm_squared() / (r * r)),
        length: y[8],
        piece: 1,
        zeta: Some(y[6]),
        zeta_momentum: Some(pz),
    }
}

/// Traces a ray that starts in the exterior piece through any number of
/// handle transits (at most `max_transits`), ending when it leaves the sphere
/// of radius `L/2 + 4` around the midpoint of `O` and `P`.
pub fn wormhole_trace(design: &WormholeDesign, start: RayState, opts: &TraceOptions, max_transits: usize) -> Result<WormholeTrace> {
    let (o, p) = (design.centre_o(), design.centre_p());
    if (start.position - o).norm() <= 1.0 || (start.position - p).norm() <= 1.0 {
        return Err(Error::Domain("wormhole rays must start outside both balls".into()));
    }
    let exterior = Exterior {
        o,
        p,
        outer: 0.5 * design.separation + 4.0,
    };
    let ext_opts = TraceOptions {
        domain_radius: None,
        ..opts.clone()
    };
    let mut samples = Vec::new();
    let mut transits = Vec::new();
    let mut state = start;
    let mut steps = 0;
    let mut refractions = 0;
    let mut max_drift: f64 = 0.0;
    let h0 = 0.5 * start.momentum.norm_squared();
    let speed = (2.0 * h0).sqrt();
    let termination = loop {
        let budget = TraceOptions {
            t_max: opts.t_max - state.t,
            max_steps: opts.max_steps.saturating_sub(steps),
            ..ext_opts.clone()
        };
        let local = RayState { t: 0.0, ..state };
        let leg = trace(&exterior, local, &budget)?;
        steps += leg.steps;
        refractions += leg.refractions;
        max_drift = max_drift.max(leg.max_drift);
        let t0 = state.t;
        samples.extend(leg.samples.iter().map(|s| RaySample { t: s.t + t0, ..*s }));
        state = RayState { t: leg.end.t + t0, ..leg.end };
        let end = match leg.termination {
            Termination::Stopped(TAG_O) => HandleEnd::O,
            Termination::Stopped(TAG_P) => HandleEnd::P,
            Termination::Stopped(_) => break Termination::Exited,
            other => break other,
        };
        if transits.len() >= max_transits {
            break Termination::Stopped(end as usize);
        }
        let v = state.momentum / speed;
        let (n, s, vt_handle, sign) = match end {
            HandleEnd::O => {
                let n = state.position - o;
                (n, n, v - n * v.dot(&n), 1.0)
            }
            HandleEnd::P => {
                let n = state.position - p;
                (n, reflect(&n), reflect(&(v - n * v.dot(&n))), -1.0)
            }
        };
        let zeta0 = if end == HandleEnd::O { 0.0 } else { 1.0 };
        let (r0, _) = design.warp.eval(zeta0);
        let hl = design.handle_length;
        let sdot = vt_handle / r0;
        let zdot = -sign * v.dot(&n) / hl;
        let mut y = [s.x, s.y, s.z, sdot.x, sdot.y, sdot.z, zeta0, zdot, state.length];
        let (transit, exit, t_end, hs) = handle_leg(design, &mut y, state.t, end, opts, &mut samples)?;
        steps += hs;
        transits.push(transit);
        let Some(exit) = exit else {
            state.t = t_end;
            break if t_end >= opts.t_max { Termination::ParameterLimit } else { Termination::MaxSteps };
        };
        let s = Vec3::new(y[0], y[1], y[2]).normalize();
        let sdot = Vec3::new(y[3], y[4], y[5]);
        let (r1, _) = design.warp.eval(y[6]);
        let normal_speed = hl * y[7].abs();
        let (pos, vel) = match exit {
            HandleEnd::O => (o + s, sdot * r1 + s * normal_speed),
            HandleEnd::P => {
                let n = reflect(&s);
                (p + n, reflect(&(sdot * r1)) + n * normal_speed)
            }
        };
        state = RayState {
            position: pos,
            momentum: vel * speed,
            t: t_end,
            length: y[8],
        };
    };
    Ok(WormholeTrace {
        trace: TraceResult {
            samples,
            termination,
            end: state,
            initial_hamiltonian: h0,
            max_drift,
            refractions,
            steps,
        },
        transits,
    })
}

/// Integrates the handle geodesic until `zeta` leaves `(0, 1)`.
fn handle_leg(
    design: &WormholeDesign,
    y: &mut [f64; 9],
    t_start: f64,
    entered: HandleEnd,
    opts: &TraceOptions,
    samples: &mut Vec<RaySample>,
) -> Result<(Transit, Option<HandleEnd>, f64, usize)> {
    let hl = design.handle_length;
    let warp = &design.warp;
    let mut rhs = |_: f64, v: &[f64; 9]| -> [f64; 9] {
        let (r, dr) = warp.eval(v[6]);
        let s = Vec3::new(v[0], v[1], v[2]);
        let sd = Vec3::new(v[3], v[4], v[5]);
        let w2 = sd.norm_squared();
        let acc = -s * w2 - sd * (2.0 * dr / r * v[7]);
        let zdd = r * dr * w2 / (hl * hl);
        let speed = (hl * hl * v[7] * v[7] + r * r * w2).sqrt();
        [sd.x, sd.y, sd.z, acc.x, acc.y, acc.z, v[7], zdd, speed]
    };
    let clairaut = |v: &[f64; 9]| {
        let (r, _) = warp.eval(v[6]);
        let s = Vec3::new(v[0], v[1], v[2]);
        let sd = Vec3::new(v[3], v[4], v[5]);
        r * r * s.cross(&sd).norm()
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
    let j0 = clairaut(y);
    let mut drift: f64 = 0.0;
    let mut extreme = y[6];
    let mut t = t_start;
    let mut h = opts.h_init.min(opts.h_max);
    let mut steps = 0;
    // sides of the levels zeta and zeta - 1
    let (side0, side1) = (1.0, -1.0);
    if opts.record {
        samples.push(handle_sample(design, y, t));
    }
    let exit = loop {
        if steps >= opts.max_steps || t >= opts.t_max {
            break None;
        }
        let step = h.min(opts.t_max - t);
        let (y_new, err) = solver.attempt(&mut rhs, t, y, step);
        if !err.is_finite() || err > 1.0 {
            h = if err.is_finite() { solver.adapt(step, err) } else { 0.2 * step };
            if h < opts.min_step {
                return Err(Error::Numerical(format!("step collapse on the handle at zeta = {}", y[6])));
            }
            continue;
        }
        steps += 1;
        let crossed = [(y_new[6] * side0 <= 0.0, HandleEnd::O), ((y_new[6] - 1.0) * side1 <= 0.0, HandleEnd::P)];
        let mut event: Option<(f64, HandleEnd)> = None;
        for (hit, end) in crossed {
            if hit {
                let (lev, side): (fn(&[f64; 9]) -> f64, f64) = match end {
                    HandleEnd::O => (|v| v[6], side0),
                    HandleEnd::P => (|v| v[6] - 1.0, side1),
                };
                let hs = locate_crossing(&solver, &mut rhs, t, y, step, side, lev);
                if event.map_or(true, |(he, _)| hs < he) {
                    event = Some((hs, end));
                }
            }
        }
        let (advance, next) = match event {
            Some((hs, _)) => (hs, solver.attempt(&mut rhs, t, y, hs).0),
            None => (step, y_new),
        };
        *y = next;
        t += advance;
        let s = Vec3::new(y[0], y[1], y[2]).normalize();
        let sd = Vec3::new(y[3], y[4], y[5]);
        let sd = sd - s * s.dot(&sd);
        y[..6].copy_from_slice(&[s.x, s.y, s.z, sd.x, sd.y, sd.z]);
        drift = drift.max((clairaut(y) - j0).abs());
        extreme = match entered {
            HandleEnd::O => extreme.max(y[6]),
            HandleEnd::P => extreme.min(y[6]),
        };
        if let Some((_, end)) = event {
            y[6] = if end == HandleEnd::O { 0.0 } else { 1.0 };
            if opts.record {
                samples.push(handle_sample(design, y, t));
            }
            break Some(end);
        }
        if opts.record {
            samples.push(handle_sample(design, y, t));
        }
        h = solver.adapt(step, err);
    };
    Ok((
        Transit {
            entered,
            exited: exit,
            clairaut: j0,
            clairaut_drift: drift,
            zeta_extreme: extreme,
        },
        exit,
        t,
        steps,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::wormhole::{default_wormhole, wormhole_geometry, Warp};
    use crate::rays::metric::Euclidean;

    fn launch(x: Point3, d: Vec3) -> RayState {
        RayState::launch(&Euclidean, x, d).unwrap()
    }

    #[test]
    fn ray_missing_the_balls_is_straight() {
        let d = default_wormhole();
        let res = wormhole_trace(&d, launch(Point3::new(-4.0, 0.0, 2.0), Vec3::x()), &TraceOptions::default(), 4).unwrap();
        assert!(res.transits.is_empty());
        assert_eq!(res.trace.termination, Termination::Exited);
        assert!((res.trace.end.position.y).abs() < 1e-14 && (res.trace.end.position.z - 2.0).abs() < 1e-14);
    }

    #[test]
    fn axial_ray_transits() {
        let d = default_wormhole();
        let res = wormhole_trace(&d, launch(Point3::new(0.0, 0.0, -3.0), Vec3::z()), &TraceOptions::default(), 4).unwrap();
        assert_eq!(res.transits.len(), 1);
        assert_eq!(res.transits[0].exited, Some(HandleEnd::P));
        let end = res.trace.end.position;
        assert!(end.x.abs() < 1e-9 && end.y.abs() < 1e-9 && end.z > 5.0, "{end:?}");
        // 2 to reach O, handle length 1, then 3 from P + e_z to the outer sphere
        assert!((res.trace.end.length - 6.0).abs() < 1e-9);
    }

    #[test]
    fn narrow_handle_returns_off_axis_rays() {
        let d = wormhole_geometry(4.0, 2.0, Warp::Collimator { r_min: 0.2 }).unwrap();
        let res = wormhole_trace(&d, launch(Point3::new(0.5, 0.0, -3.0), Vec3::z()), &TraceOptions::default(), 4).unwrap();
        let tr = res.transits[0];
        assert!(tr.returned(), "{tr:?}");
        assert!((tr.clairaut - 0.5).abs() < 1e-12);
        assert!(tr.clairaut_drift < 1e-8, "{tr:?}");
        assert!(tr.zeta_extreme < 0.5);
        // a near-axial ray passes
        let res = wormhole_trace(&d, launch(Point3::new(0.1, 0.0, -3.0), Vec3::z()), &TraceOptions::default(), 4).unwrap();
        assert_eq!(res.transits[0].exited, Some(HandleEnd::P));
        assert!(res.transits[0].clairaut_drift < 1e-8);
    }
}
