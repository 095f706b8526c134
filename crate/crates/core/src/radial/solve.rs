//! Separated radial equation for a single harmonic degree.
//!
//! State `(u, q)` with `q = r^2 a u'`; both are continuous across interfaces.
//! On each interval
//!
//! ```text
//! u' = q / (r^2 a)
//! q' = (b L - r^2 K) u + r^2 w p(r),   L = l(l+1)
//! ```
//!
//! with `K` given by the profile's [`WaveModel`]. Constant isotropic
//! intervals without source use spherical Bessel (or power) closed forms,
//! everything else the adaptive integrator.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::designs::profile::{Coefficients, RadialInterval, RadialMediumProfile, Side, WaveModel, OUTER_RADIUS};
use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::special::{gauss_legendre, radial_pair};

/// Radial profile `p_l(r)` of the source's degree-`l` component.
pub type SourceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub rtol: f64,
    /// Series start radius near the origin.
    pub r_start: f64,
    /// Series start offset at a degenerate inner endpoint.
    pub degenerate_offset: f64,
    /// Condition estimate above which the problem is declared resonant.
    pub resonance_threshold: f64,
    /// Use the integrator on every interval (closed forms disabled).
    pub force_ode: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            r_start: 1e-4,
            degenerate_offset: 1e-6,
            resonance_threshold: 1e12,
            force_ode: false,
        }
    }
}

impl SolveOptions {
    fn integrator(&self, span: f64) -> Dopri5 {
        Dopri5 {
            rtol: self.rtol,
            atol: 1e-300,
            norm_floor: 1e-8,
            h_init: (span * 1e-3).max(1e-12),
            h_min: 1e-15,
            h_max: f64::INFINITY,
            max_steps: 200_000,
        }
    }
}

#[inline]
pub(crate) fn k_coefficient(model: WaveModel, s: f64, c: &Coefficients) -> f64 {
    match model {
        WaveModel::Helmholtz => s * s * c.w,
        WaveModel::Schrodinger => c.a * (s - c.v),
    }
}

fn spectral_name(model: WaveModel) -> &'static str {
    match model {
        WaveModel::Helmholtz => "omega",
        WaveModel::Schrodinger => "E",
    }
}

#[derive(Clone, Copy, Debug)]
enum Basis {
    Bessel { l: u32, kappa: f64 },
    Power { p: f64 },
}

impl Basis {
    fn eval(&self, r: f64) -> (f64, f64, f64, f64) {
        match *self {
            Basis::Bessel { l, kappa } => {
                let b = radial_pair(l, kappa, r);
                (b.f, b.df, b.g, b.dg)
            }
            Basis::Power { p } => (
                r.powf(p),
                if p == 0.0 { 0.0 } else { p * r.powf(p - 1.0) },
                r.powf(-p - 1.0),
                -(p + 1.0) * r.powf(-p - 2.0),
            ),
        }
    }
}

/// Two-term Frobenius branch `u = amp (t/t0)^p (1 + c t^2)/(1 + c t0^2)`, `t = r - base`.
#[derive(Clone, Copy, Debug)]
struct Series {
    base: f64,
    t0: f64,
    p: f64,
    c: f64,
    amp: f64,
}

impl Series {
    fn u_du(&self, r: f64) -> (f64, f64) {
        let t = r - self.base;
        let norm = self.amp / (self.t0.powf(self.p) * (1.0 + self.c * self.t0 * self.t0));
        let u = norm * t.powf(self.p) * (1.0 + self.c * t * t);
        let lead = if self.p == 0.0 { 0.0 } else { self.p * t.powf(self.p - 1.0) };
        let du = norm * (lead + self.c * (self.p + 2.0) * t.powf(self.p + 1.0));
        (u, du)
    }
}

#[derive(Clone, Debug)]
enum Segment {
    Zero,
    Closed { basis: Basis, a: f64, c1: f64, c2: f64 },
    Ode { nodes: Vec<(f64, [f64; 2])>, series: Option<Series> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum StartKind {
    Regular,
    Degenerate,
}

struct Problem<'a> {
    intervals: &'a [RadialInterval],
    model: WaveModel,
    l: u32,
    s: f64,
    source: Option<&'a SourceFn>,
    opts: SolveOptions,
}

struct Propagation {
    segments: Vec<Segment>,
    end: [f64; 2],
    peak: f64,
}

impl Problem<'_> {
    fn lf(&self) -> f64 {
        (self.l * (self.l + 1)) as f64
    }

    fn closed_basis(&self, iv: &RadialInterval) -> Option<(Basis, f64)> {
        if self.opts.force_ode || self.source.is_some() || !iv.is_constant() {
            return None;
        }
        let c = iv.coefficients(iv.r0);
        let kappa = k_coefficient(self.model, self.s, &c) / c.a;
        if c.a == c.b {
            Some((Basis::Bessel { l: self.l, kappa }, c.a))
        } else if kappa == 0.0 {
            let p = 0.5 * (-1.0 + (1.0 + 4.0 * c.b / c.a * self.lf()).sqrt());
            Some((Basis::Power { p }, c.a))
        } else {
            None
        }
    }

    fn series(&self, iv: &RadialInterval, kind: StartKind, amp: f64) -> Series {
        let (base, t0) = match kind {
            StartKind::Regular => (0.0, self.opts.r_start.min(0.5 * iv.r1)),
            StartKind::Degenerate => (iv.r0, self.opts.degenerate_offset),
        };
        let r = base + t0;
        let c = iv.coefficients(r);
        // leading behaviour A ~ alpha t^2, b ~ beta, r^2 K ~ kappa t^2
        let alpha = r * r * c.a / (t0 * t0);
        let kappa = r * r * k_coefficient(self.model, self.s, &c) / (t0 * t0);
        let p = 0.5 * (-1.0 + (1.0 + 4.0 * c.b / alpha * self.lf()).sqrt());
        Series {
            base,
            t0,
            p,
            c: -kappa / (alpha * (4.0 * p + 6.0)),
            amp,
        }
    }

    fn rhs<'b>(&'b self, iv: &'b RadialInterval) -> impl FnMut(f64, &[f64; 2]) -> [f64; 2] + 'b {
        let lf = self.lf();
        move |r, y| {
            let c = iv.coefficients(r);
            let r2 = r * r;
            let mut dq = (c.b * lf - r2 * k_coefficient(self.model, self.s, &c)) * y[0];
            if let Some(p) = self.source {
                dq += r2 * c.w * p(r);
            }
            [y[1] / (r2 * c.a), dq]
        }
    }

    /// Propagates from the inner end of `intervals[0]` to the outer end of the last
    /// interval. `amp` scales the homogeneous start; `amp = 0` gives the particular
    /// solution with zero start.
    fn propagate(&self, kind: StartKind, amp: f64, record: bool) -> Result<Propagation> {
        let mut segments = Vec::with_capacity(self.intervals.len());
        let mut state = [0.0, 0.0];
        let mut peak: f64 = 0.0;
        for (i, iv) in self.intervals.iter().enumerate() {
            if let Some((basis, a)) = self.closed_basis(iv) {
                let (c1, c2) = if i == 0 {
                    (amp, 0.0)
                } else {
                    let (f, df, g, dg) = basis.eval(iv.r0);
                    let a0 = iv.r0 * iv.r0 * a;
                    let det = a0 * (f * dg - g * df);
                    (
                        (state[0] * a0 * dg - g * state[1]) / det,
                        (f * state[1] - state[0] * a0 * df) / det,
                    )
                };
                let (f, df, g, dg) = basis.eval(iv.r1);
                state = [c1 * f + c2 * g, iv.r1 * iv.r1 * a * (c1 * df + c2 * dg)];
                segments.push(Segment::Closed { basis, a, c1, c2 });
            } else {
                let mut series = None;
                let r_from = if i == 0 {
                    let sk = if kind == StartKind::Degenerate || iv.r0 == 0.0 {
                        kind
                    } else {
                        return Err(Error::Domain("regular start requires an interval at the origin".into()));
                    };
                    let ser = self.series(iv, sk, amp);
                    let r = ser.base + ser.t0;
                    let (u, du) = ser.u_du(r);
                    state = [u, r * r * iv.a.at(r) * du];
                    series = Some(ser);
                    r
                } else {
                    iv.r0
                };
                let mut nodes = Vec::new();
                if record {
                    nodes.push((r_from, state));
                }
                let solver = self.opts.integrator(iv.r1 - r_from);
                let (_, end) = solver.solve(self.rhs(iv), r_from, state, iv.r1, |r, y| {
                    if record {
                        nodes.push((r, *y));
                    }
                    ControlFlow::Continue(())
                })?;
                state = end;
                segments.push(Segment::Ode { nodes, series });
            }
            peak = peak.max(state[0].abs()).max(state[1].abs());
        }
        Ok(Propagation { segments, end: state, peak })
    }

    /// Recorded propagation with component `idx` of the end state driven to
    /// `target`; `slope` is that component for the unit homogeneous start.
    /// Corrects the superposition estimate for step-size differences between runs.
    fn shoot(&self, kind: StartKind, mut amp: f64, idx: usize, target: f64, slope: f64) -> Result<Propagation> {
        let mut run = self.propagate(kind, amp, true)?;
        if self.source.is_some() {
            for _ in 0..3 {
                let miss = target - run.end[idx];
                if miss.abs() <= 1e-14 * run.peak.max(target.abs()) {
                    break;
                }
                amp += miss / slope;
                run = self.propagate(kind, amp, true)?;
            }
        }
        Ok(run)
    }
}

/// End state `(u, q)` at `r = 2` of the homogeneous solution with unit start,
/// and the peak of `|u|, |q|` at interval ends. No resonance check.
pub(crate) fn unit_shot(profile: &RadialMediumProfile, l: u32, spectral: f64, opts: SolveOptions) -> Result<([f64; 2], f64)> {
    let start = profile.coupled_start();
    let outer = &profile.intervals[start..];
    let kind = if outer[0].degenerate_inner {
        StartKind::Degenerate
    } else {
        StartKind::Regular
    };
    let p = Problem {
        intervals: outer,
        model: profile.model,
        l,
        s: spectral,
        source: None,
        opts,
    };
    let run = p.propagate(kind, 1.0, false)?;
    Ok((run.end, run.peak))
}

/// Solution of one radial problem.
#[derive(Clone)]
pub struct RadialSolution {
    pub l: u32,
    /// `omega` (Helmholtz) or `E` (Schrödinger).
    pub spectral: f64,
    pub model: WaveModel,
    pub boundary_value: f64,
    /// Shooting condition estimate `max |state| / |u(2)|` of the homogeneous solve.
    pub condition: f64,
    intervals: Vec<RadialInterval>,
    segments: Vec<Segment>,
    source: Option<SourceFn>,
    opts: SolveOptions,
}

impl std::fmt::Debug for RadialSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialSolution")
            .field("l", &self.l)
            .field("spectral", &self.spectral)
            .field("model", &self.model)
            .field("condition", &self.condition)
            .finish_non_exhaustive()
    }
}

/// Solves the degree-`l` problem with Dirichlet value `boundary` at `r = 2`.
///
/// The part of the profile inside a degenerate interface (ideal cloak) is
/// decoupled from the boundary; it is solved with vanishing flux at the
/// interface when a source is present and is identically zero otherwise.
pub fn radial_solve(
    profile: &RadialMediumProfile,
    l: u32,
    spectral: f64,
    source: Option<SourceFn>,
    boundary: f64,
    opts: SolveOptions,
) -> Result<RadialSolution> {
    let start = profile.coupled_start();
    let outer = &profile.intervals[start..];
    let kind = if outer[0].degenerate_inner {
        StartKind::Degenerate
    } else {
        StartKind::Regular
    };
    let name = spectral_name(profile.model);
    let hom = Problem {
        intervals: outer,
        model: profile.model,
        l,
        s: spectral,
        source: None,
        opts,
    };
    let h = hom.propagate(kind, 1.0, false)?;
    let condition = if h.end[0] == 0.0 { f64::INFINITY } else { h.peak / h.end[0].abs() };
    if !(condition <= opts.resonance_threshold) {
        return Err(Error::Resonance {
            what: name,
            value: spectral,
            degree: l,
            condition,
        });
    }
    let forced = Problem {
        source: source.as_ref(),
        ..hom
    };
    let particular_end = if source.is_some() {
        forced.propagate(kind, 0.0, false)?.end[0]
    } else {
        0.0
    };
    let amp = (boundary - particular_end) / h.end[0];
    let mut segments = forced.shoot(kind, amp, 0, boundary, h.end[0])?.segments;

    if start > 0 {
        let inner = Problem {
            intervals: &profile.intervals[..start],
            ..forced
        };
        let inner_segments = if source.is_some() {
            let hin = Problem { source: None, ..inner }.propagate(StartKind::Regular, 1.0, false)?;
            let pin = inner.propagate(StartKind::Regular, 0.0, false)?;
            let cond = if hin.end[1] == 0.0 { f64::INFINITY } else { hin.peak / hin.end[1].abs() };
            if !(cond <= opts.resonance_threshold) {
                return Err(Error::Resonance {
                    what: "interior Neumann eigenvalue",
                    value: spectral,
                    degree: l,
                    condition: cond,
                });
            }
            inner.shoot(StartKind::Regular, -pin.end[1] / hin.end[1], 1, 0.0, hin.end[1])?.segments
        } else {
            vec![Segment::Zero; start]
        };
        segments.splice(0..0, inner_segments);
    }

    Ok(RadialSolution {
        l,
        spectral,
        model: profile.model,
        boundary_value: boundary,
        condition,
        intervals: profile.intervals.clone(),
        segments,
        source,
        opts,
    })
}

impl RadialSolution {
    fn problem(&self) -> Problem<'_> {
        Problem {
            intervals: &self.intervals,
            model: self.model,
            l: self.l,
            s: self.spectral,
            source: self.source.as_ref(),
            opts: self.opts,
        }
    }

    fn locate(&self, r: f64, side: Side) -> Result<usize> {
        if !(r >= 0.0 && r <= OUTER_RADIUS) {
            return Err(Error::Domain(format!("radius {r} outside [0, 2]")));
        }
        let idx = self.intervals.iter().position(|iv| match side {
            Side::Minus => r > iv.r0 && r <= iv.r1,
            Side::Plus => r >= iv.r0 && r < iv.r1,
        });
        Ok(idx.unwrap_or(match side {
            Side::Minus => 0,
            Side::Plus => self.intervals.len() - 1,
        }))
    }

    /// `(u, q)` at `r` on the given side of an interface.
    pub fn state(&self, r: f64, side: Side) -> Result<[f64; 2]> {
        let i = self.locate(r, side)?;
        let iv = &self.intervals[i];
        match &self.segments[i] {
            Segment::Zero => Ok([0.0, 0.0]),
            Segment::Closed { basis, a, c1, c2 } => {
                let (f, df, g, dg) = basis.eval(r);
                let (u, du) = if *c2 == 0.0 { (c1 * f, c1 * df) } else { (c1 * f + c2 * g, c1 * df + c2 * dg) };
                Ok([u, r * r * a * du])
            }
            Segment::Ode { nodes, series } => {
                let first = nodes.first().map(|n| n.0).unwrap_or(iv.r0);
                if r < first {
                    let ser = series.ok_or_else(|| Error::Domain(format!("radius {r} before the first node")))?;
                    let (u, du) = ser.u_du(r.max(ser.base));
                    return Ok([u, r * r * iv.a.at(r) * du]);
                }
                let k = nodes.partition_point(|n| n.0 <= r).saturating_sub(1);
                let (r0, y0) = nodes[k];
                if r == r0 {
                    return Ok(y0);
                }
                let p = self.problem();
                p.opts.integrator(r - r0).integrate(p.rhs(iv), r0, y0, r)
            }
        }
    }

    /// `(u, u')` at `r`.
    pub fn eval(&self, r: f64, side: Side) -> Result<(f64, f64)> {
        let [u, q] = self.state(r, side)?;
        let iv = &self.intervals[self.locate(r, side)?];
        let a = r * r * iv.a.at(r);
        Ok((u, if a == 0.0 { 0.0 } else { q / a }))
    }

    /// Radial flux `q = r^2 a u'`.
    pub fn flux(&self, r: f64, side: Side) -> Result<f64> {
        Ok(self.state(r, side)?[1])
    }

    /// `q(2) / (4 u(2)) = a(2) u'(2) / u(2)`.
    pub fn dn_ratio(&self) -> Result<f64> {
        let [u, q] = self.state(OUTER_RADIUS, Side::Minus)?;
        Ok(q / (OUTER_RADIUS * OUTER_RADIUS * u))
    }

    /// Residual `q' - (b L - r^2 K) u - r^2 w p` at an interval-interior radius,
    /// with `q'` from a central difference of step `h`.
    pub fn residual(&self, r: f64, h: f64) -> Result<f64> {
        let i = self.locate(r, Side::Plus)?;
        let iv = &self.intervals[i];
        if r - h <= iv.r0 || r + h >= iv.r1 {
            return Err(Error::Domain(format!("radius {r} too close to an interface for step {h}")));
        }
        let qp = self.state(r + h, Side::Plus)?[1];
        let qm = self.state(r - h, Side::Plus)?[1];
        let u = self.state(r, Side::Plus)?[0];
        let c = iv.coefficients(r);
        let p = self.problem();
        let mut rhs = (c.b * p.lf() - r * r * k_coefficient(self.model, self.spectral, &c)) * u;
        if let Some(src) = &self.source {
            rhs += r * r * c.w * src(r);
        }
        Ok((qp - qm) / (2.0 * h) - rhs)
    }

    /// Jumps `(r, [u], [q])` at every interface.
    pub fn interface_jumps(&self) -> Result<Vec<(f64, f64, f64)>> {
        let mut out = Vec::new();
        for (i, iv) in self.intervals.iter().enumerate().skip(1) {
            if iv.degenerate_inner || matches!(self.segments[i - 1], Segment::Zero) {
                continue;
            }
            let m = self.state(iv.r0, Side::Minus)?;
            let p = self.state(iv.r0, Side::Plus)?;
            out.push((iv.r0, p[0] - m[0], p[1] - m[1]));
        }
        Ok(out)
    }

    /// `int_{lo}^{hi} f(r, u, u', coefficients) dr`.
    pub fn integrate<F>(&self, lo: f64, hi: f64, f: F) -> Result<f64>
    where
        F: Fn(f64, f64, f64, &Coefficients) -> f64,
    {
        let (gx, gw) = gauss_legendre(16);
        let quad = |a: f64, b: f64, iv: &RadialInterval, eval: &dyn Fn(f64) -> Result<(f64, f64)>| -> Result<f64> {
            // panels graded geometrically towards r = 0
            let mut edges: Vec<f64> = if a == 0.0 {
                (0..=60).rev().map(|k| b * 0.5f64.powi(k)).collect()
            } else {
                (0..=4).map(|k| a + (b - a) * k as f64 / 4.0).collect()
            };
            if a == 0.0 {
                edges.insert(0, 0.0);
            }
            let mut sum = 0.0;
            for e in edges.windows(2) {
                let (mid, h) = (0.5 * (e[0] + e[1]), e[1] - e[0]);
                for (x, w) in gx.iter().zip(&gw) {
                    let r = mid + 0.5 * h * x;
                    let (u, du) = eval(r)?;
                    sum += w * f(r, u, du, &iv.coefficients(r)) * 0.5 * h;
                }
            }
            Ok(sum)
        };
        let mut total = 0.0;
        for (i, iv) in self.intervals.iter().enumerate() {
            let (a, b) = (lo.max(iv.r0), hi.min(iv.r1));
            if b <= a {
                continue;
            }
            match &self.segments[i] {
                Segment::Zero => {}
                Segment::Closed { .. } => {
                    total += quad(a, b, iv, &|r| self.eval(r, Side::Plus).map(|x| if r == iv.r1 { self.eval(r, Side::Minus).unwrap_or(x) } else { x }))?;
                }
                Segment::Ode { nodes, series } => {
                    let first = nodes.first().map(|n| n.0).unwrap_or(iv.r0);
                    if let Some(ser) = series {
                        if a < first {
                            let coeff = |r: f64| {
                                let (u, du) = ser.u_du(r);
                                Ok((u, du))
                            };
                            total += quad(a.max(ser.base), b.min(first), iv, &coeff)?;
                        }
                    }
                    total += self.integrate_nodes(iv, nodes, a.max(first), b, &f)?;
                }
            }
        }
        Ok(total)
    }

    fn integrate_nodes<F>(&self, iv: &RadialInterval, nodes: &[(f64, [f64; 2])], a: f64, b: f64, f: &F) -> Result<f64>
    where
        F: Fn(f64, f64, f64, &Coefficients) -> f64,
    {
        if b <= a {
            return Ok(0.0);
        }
        let p = self.problem();
        let lf = p.lf();
        let mut total = 0.0;
        for w in nodes.windows(2) {
            let (r0, y0) = w[0];
            let r1 = w[1].0;
            let (lo, hi) = (a.max(r0), b.min(r1));
            if hi <= lo {
                continue;
            }
            let start = if lo > r0 {
                p.opts.integrator(lo - r0).integrate(p.rhs(iv), r0, y0, lo)?
            } else {
                y0
            };
            let aug = |r: f64, y: &[f64; 3]| {
                let c = iv.coefficients(r);
                let r2 = r * r;
                let du = y[1] / (r2 * c.a);
                let mut dq = (c.b * lf - r2 * k_coefficient(p.model, p.s, &c)) * y[0];
                if let Some(src) = p.source {
                    dq += r2 * c.w * src(r);
                }
                [du, dq, f(r, y[0], du, &c)]
            };
            let mut solver = p.opts.integrator(hi - lo);
            solver.rtol = p.opts.rtol.max(1e-12);
            let end = solver.integrate(aug, lo, [start[0], start[1], 0.0], hi)?;
            total += end[2];
        }
        Ok(total)
    }
}
