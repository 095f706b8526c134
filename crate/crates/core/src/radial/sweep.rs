//! Dirichlet-to-Neumann spectra and the parameter sweeps built on them.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::solve::{radial_solve, unit_shot, SolveOptions, SourceFn};
use crate::designs::cloak::{layered_isotropic_profile, quantum_potential_profile, truncated_cloak_profile, QuantumCloakSpec};
use crate::designs::profile::{Coef, RadialInterval, RadialMediumProfile, Side, WaveModel, OUTER_RADIUS};
use crate::error::{Error, Result};

pub const DEFAULT_LMAX: u32 = 8;

/// DN eigenvalues `lambda_l` at one frequency (or energy), one per degree.
///
/// `lambda_l = q(2) / (4 u(2))`, normalised so the homogeneous static ball gives `l/2`.
#[derive(Clone, Debug, Serialize)]
pub struct DnSpectrum {
    pub spectral: f64,
    pub model: WaveModel,
    pub values: Vec<(u32, f64)>,
}

impl DnSpectrum {
    pub fn get(&self, l: u32) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == l).map(|(_, v)| *v)
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.values.iter().map(|(_, v)| *v).collect()
    }

    /// Per-degree `|lambda_l - other_l|`.
    pub fn errors(&self, other: &DnSpectrum) -> Vec<f64> {
        self.values
            .iter()
            .zip(&other.values)
            .map(|((_, a), (_, b))| (a - b).abs())
            .collect()
    }
}

pub fn dn_spectrum(profile: &RadialMediumProfile, spectral: f64, l_max: u32) -> Result<DnSpectrum> {
    dn_spectrum_with(profile, spectral, l_max, SolveOptions::default())
}

pub fn dn_spectrum_with(profile: &RadialMediumProfile, spectral: f64, l_max: u32, opts: SolveOptions) -> Result<DnSpectrum> {
    let values = (0..=l_max)
        .into_par_iter()
        .map(|l| {
            let sol = radial_solve(profile, l, spectral, None, 1.0, opts)?;
            Ok((l, sol.dn_ratio()?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DnSpectrum {
        spectral,
        model: profile.model,
        values,
    })
}

/// Spectrum of the homogeneous ball for the given model.
pub fn free_spectrum(model: WaveModel, spectral: f64, l_max: u32) -> Result<DnSpectrum> {
    let p = match model {
        WaveModel::Helmholtz => RadialMediumProfile::homogeneous(),
        WaveModel::Schrodinger => RadialMediumProfile::free_schrodinger(),
    };
    dn_spectrum(&p, spectral, l_max)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    /// Swept parameter (`R` or the layer count).
    pub parameter: f64,
    pub lambdas: Option<Vec<f64>>,
    pub errors: Option<Vec<f64>>,
    /// Set when this row could not be solved (for instance at a resonance).
    pub flag: Option<String>,
}

/// Per-degree DN errors of a family of profiles against a reference spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub parameter_name: String,
    pub spectral: f64,
    pub l_max: u32,
    pub reference: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    fn build(
        parameter_name: &str,
        reference: &DnSpectrum,
        l_max: u32,
        params: &[f64],
        profile: impl Fn(f64) -> Result<RadialMediumProfile> + Sync,
    ) -> Self {
        let rows = params
            .par_iter()
            .map(|&x| match profile(x).and_then(|p| dn_spectrum(&p, reference.spectral, l_max)) {
                Ok(s) => ConvergenceRow {
                    parameter: x,
                    errors: Some(s.errors(reference)),
                    lambdas: Some(s.lambdas()),
                    flag: None,
                },
                Err(e) => ConvergenceRow {
                    parameter: x,
                    lambdas: None,
                    errors: None,
                    flag: Some(e.to_string()),
                },
            })
            .collect();
        Self {
            parameter_name: parameter_name.into(),
            spectral: reference.spectral,
            l_max,
            reference: reference.lambdas(),
            rows,
        }
    }

    /// Whether the error of degree `l` decreases along the unflagged rows.
    /// Errors at or below `floor` count as converged.
    pub fn is_decreasing(&self, l: u32, floor: f64) -> bool {
        let errs: Vec<f64> = self
            .rows
            .iter()
            .filter_map(|r| r.errors.as_ref().map(|e| e[l as usize]))
            .collect();
        errs.windows(2).all(|w| w[1] < w[0] || w[0] <= floor && w[1] <= floor)
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.flag.is_some()).count()
    }
}

fn check_decreasing(name: &'static str, xs: &[f64]) -> Result<()> {
    if let Some(w) = xs.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(Error::Parameter {
            name,
            value: w[1],
            constraint: "strictly decreasing list",
        });
    }
    Ok(())
}

/// DN errors of `truncated_cloak_profile(R)` against the homogeneous ball,
/// for each `R` in a decreasing list. Rows that fail are flagged.
pub fn cloak_convergence_sweep(omega: f64, l_max: u32, r_list: &[f64]) -> Result<ConvergenceTable> {
    check_decreasing("R", r_list)?;
    let reference = free_spectrum(WaveModel::Helmholtz, omega, l_max)?;
    Ok(ConvergenceTable::build("R", &reference, l_max, r_list, truncated_cloak_profile))
}

/// DN errors of the laminated profile with `n` shell pairs against the
/// anisotropic truncated cloak with the same `R`.
pub fn homogenization_sweep(r_trunc: f64, omega: f64, l_max: u32, layers: &[usize]) -> Result<ConvergenceTable> {
    let reference = dn_spectrum(&truncated_cloak_profile(r_trunc)?, omega, l_max)?;
    let params: Vec<f64> = layers.iter().map(|&n| n as f64).collect();
    Ok(ConvergenceTable::build("n", &reference, l_max, &params, |n| {
        layered_isotropic_profile(r_trunc, n as usize)
    }))
}

/// Neumann data at the truncation sphere for boundary value 1 at `r = 2`.
#[derive(Clone, Debug, Serialize)]
pub struct HiddenFlux {
    pub r_trunc: f64,
    pub omega: f64,
    pub l: u32,
    /// `r^2 a u'` at `R-`.
    pub interior_flux: f64,
    /// `r^2 a u'` at `R+`.
    pub exterior_flux: f64,
    /// `u'(R-)`.
    pub interior_derivative: f64,
    /// `u(R-)`.
    pub interior_value: f64,
}

pub fn hidden_bc_flux(r_trunc: f64, omega: f64, l: u32) -> Result<HiddenFlux> {
    let p = truncated_cloak_profile(r_trunc)?;
    let sol = radial_solve(&p, l, omega, None, 1.0, SolveOptions::default())?;
    let (interior_value, du) = sol.eval(r_trunc, Side::Minus)?;
    Ok(HiddenFlux {
        r_trunc,
        omega,
        l,
        interior_flux: sol.flux(r_trunc, Side::Minus)?,
        exterior_flux: sol.flux(r_trunc, Side::Plus)?,
        interior_derivative: du,
        interior_value,
    })
}

pub fn hidden_flux_sweep(omega: f64, l: u32, r_list: &[f64]) -> Result<Vec<HiddenFlux>> {
    check_decreasing("R", r_list)?;
    r_list.par_iter().map(|&r| hidden_bc_flux(r, omega, l)).collect()
}

/// Profile of `-Laplace + W - E` on `B(0, radius)` rescaled to `B(0, 2)`.
fn scaled_ball(radius: f64, potential: Option<&SourceFn>) -> Result<RadialMediumProfile> {
    let s = radius / OUTER_RADIUS;
    let mut iv = RadialInterval::uniform(0.0, OUTER_RADIUS, 1.0, 1.0, 1.0);
    if let Some(w) = potential {
        let w = Arc::clone(w);
        iv = iv.with_potential(Coef::var(move |x| s * s * w(s * x)));
    }
    RadialMediumProfile::new(format!("ball radius {radius}"), WaveModel::Schrodinger, vec![iv])
}

fn neumann_roots(l: u32, radius: f64, potential: Option<&SourceFn>, count: usize, e_max: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0) {
        return Err(Error::Parameter {
            name: "radius",
            value: radius,
            constraint: "positive radius",
        });
    }
    let profile = scaled_ball(radius, potential)?;
    let s2 = (radius / OUTER_RADIUS).powi(2);
    let opts = SolveOptions::default();
    let mismatch = |e: f64| -> Result<f64> {
        let ([u, q], _) = unit_shot(&profile, l, s2 * e, opts)?;
        Ok(q / u.abs().max(f64::MIN_POSITIVE))
    };
    let w_min = match potential {
        Some(w) => (0..=256).map(|k| w(radius * k as f64 / 256.0)).fold(f64::INFINITY, f64::min),
        None => 0.0,
    };
    let step = 0.25 / (radius * radius);
    let mut roots = Vec::new();
    let mut e = w_min - step;
    let mut f = mismatch(e)?;
    while roots.len() < count && e <= e_max {
        let e1 = e + step;
        let f1 = mismatch(e1)?;
        if f1 == 0.0 {
            roots.push(e1);
        } else if f != 0.0 && f.signum() != f1.signum() {
            let (mut lo, mut hi, mut flo) = (e, e1, f);
            while hi - lo > 1e-13 * hi.abs().max(1.0) {
                let mid = 0.5 * (lo + hi);
                let fm = mismatch(mid)?;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        e = e1;
        f = f1;
    }
    Ok(roots)
}

/// First `count` energies `E` for which `-Laplace + W` on `B(0, radius)` has a
/// degree-`l` eigenfunction with `u'(radius) = 0`, by shooting and bisection.
pub fn neumann_eigenvalues(l: u32, radius: f64, potential: Option<SourceFn>, count: usize) -> Result<Vec<f64>> {
    neumann_roots(l, radius, potential.as_ref(), count, f64::INFINITY)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumRow {
    pub layers: usize,
    pub r_trunc: f64,
    /// Constant interior potential `W` on `B(0,1)`.
    pub potential: f64,
    pub lambdas: Vec<f64>,
    pub errors: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumTable {
    pub energy: f64,
    pub l_max: u32,
    pub free: Vec<f64>,
    pub rows: Vec<QuantumRow>,
}

impl QuantumTable {
    pub fn row(&self, layers: usize, potential: f64) -> Option<&QuantumRow> {
        self.rows.iter().find(|r| r.layers == layers && r.potential == potential)
    }

    /// Per-degree `|lambda(W1) - lambda(W2)|` at a fixed layer count.
    pub fn potential_difference(&self, layers: usize, w1: f64, w2: f64) -> Option<Vec<f64>> {
        let (a, b) = (self.row(layers, w1)?, self.row(layers, w2)?);
        Some(a.lambdas.iter().zip(&b.lambdas).map(|(x, y)| (x - y).abs()).collect())
    }
}

const HYPOTHESIS_TOL: f64 = 1e-6;

/// DN errors of the quantum cloak against free space along a list of layer
/// counts, for each constant interior potential.
///
/// Fails with a precondition error when `E` is a Dirichlet eigenvalue of the
/// free ball or a Neumann eigenvalue of `-Laplace + W` on `B(0,1)`, except for
/// the constant mode at `E = W = 0`.
pub fn quantum_dn_convergence(energy: f64, layers: &[usize], potentials: &[f64], l_max: u32) -> Result<QuantumTable> {
    let free = match free_spectrum(WaveModel::Schrodinger, energy, l_max) {
        Ok(s) => s,
        Err(Error::Resonance { degree, .. }) => {
            return Err(Error::Precondition(format!(
                "E = {energy} is a Dirichlet eigenvalue of the free ball (l = {degree})"
            )))
        }
        Err(e) => return Err(e),
    };
    for &w in potentials {
        let pot: SourceFn = Arc::new(move |_| w);
        for l in 0..=l_max {
            if l == 0 && w == 0.0 && energy == 0.0 {
                // the constant mode is also a solution of the full static problem
                continue;
            }
            let roots = neumann_roots(l, 1.0, Some(&pot), usize::MAX, energy + 1.0)?;
            if let Some(ek) = roots.iter().find(|ek| (*ek - energy).abs() < HYPOTHESIS_TOL * energy.abs().max(1.0)) {
                return Err(Error::Precondition(format!(
                    "E = {energy} is within {HYPOTHESIS_TOL} of the interior Neumann eigenvalue {ek} (l = {l}, W = {w})"
                )));
            }
        }
    }
    let jobs: Vec<(usize, f64)> = layers.iter().flat_map(|&n| potentials.iter().map(move |&w| (n, w))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, w)| {
            let spec = QuantumCloakSpec::new(n, energy, Some(w));
            let s = dn_spectrum(&quantum_potential_profile(&spec)?, energy, l_max)?;
            Ok(QuantumRow {
                layers: n,
                r_trunc: spec.r_trunc,
                potential: w,
                errors: s.errors(&free),
                lambdas: s.lambdas(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantumTable {
        energy,
        l_max,
        free: free.lambdas(),
        rows,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrappedPoint {
    pub energy: f64,
    /// `int_0^1 gamma u^2 r^2 dr / int_1^2 gamma u^2 r^2 dr` for `u(2) = 1`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrappedScan {
    pub layers: usize,
    pub l: u32,
    pub potential: f64,
    pub points: Vec<TrappedPoint>,
    /// Energies skipped because the full problem was resonant there.
    pub skipped: Vec<f64>,
    pub peak_energy: f64,
    pub peak_ratio: f64,
    pub median_ratio: f64,
    /// Width of the contiguous run of samples around the peak above half its height.
    pub fwhm: f64,
}

impl TrappedScan {
    /// Linear interpolation of the ratio at `energy`.
    pub fn ratio_at(&self, energy: f64) -> Option<f64> {
        let k = self.points.partition_point(|p| p.energy <= energy);
        if k == 0 || k == self.points.len() {
            return None;
        }
        let (a, b) = (self.points[k - 1], self.points[k]);
        let t = (energy - a.energy) / (b.energy - a.energy);
        Some(a.ratio + t * (b.ratio - a.ratio))
    }
}

/// Interior to exterior energy ratio of a single quantum cloak solve.
pub fn trapped_ratio(layers: usize, energy: f64, l: u32, potential: f64) -> Result<f64> {
    let spec = QuantumCloakSpec::new(layers, energy, Some(potential));
    let profile = quantum_potential_profile(&spec)?;
    let sol = radial_solve(&profile, l, energy, None, 1.0, SolveOptions::default())?;
    let density = |r: f64, u: f64, _: f64, c: &crate::designs::profile::Coefficients| c.a * u * u * r * r;
    let inner = sol.integrate(0.0, 1.0, density)?;
    let outer = sol.integrate(1.0, OUTER_RADIUS, density)?;
    Ok(inner / outer)
}

/// Scans the energy ratio over `samples` equally spaced energies in `[e_lo, e_hi]`.
pub fn trapped_state_scan(layers: usize, e_lo: f64, e_hi: f64, samples: usize, l: u32, potential: f64) -> Result<TrappedScan> {
    if !(e_lo.is_finite() && e_hi.is_finite() && e_hi > e_lo && samples >= 2) {
        return Err(Error::Parameter {
            name: "E_range",
            value: e_hi - e_lo,
            constraint: "finite range with e_hi > e_lo and at least 2 samples",
        });
    }
    let energies: Vec<f64> = (0..samples)
        .map(|k| e_lo + (e_hi - e_lo) * k as f64 / (samples - 1) as f64)
        .collect();
    let results = energies
        .par_iter()
        .map(|&e| match trapped_ratio(layers, e, l, potential) {
            Ok(r) => Ok((e, Some(r))),
            Err(Error::Resonance { .. }) => Ok((e, None)),
            Err(err) => Err(err),
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<TrappedPoint> = results
        .iter()
        .filter_map(|&(energy, r)| r.map(|ratio| TrappedPoint { energy, ratio }))
        .collect();
    let skipped = results.iter().filter(|(_, r)| r.is_none()).map(|(e, _)| *e).collect();
    if points.is_empty() {
        return Err(Error::Numerical("every energy in the scan was resonant".into()));
    }
    let ipeak = (0..points.len())
        .max_by(|&a, &b| points[a].ratio.total_cmp(&points[b].ratio))
        .unwrap();
    let peak = points[ipeak];
    let mut sorted: Vec<f64> = points.iter().map(|p| p.ratio).collect();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median_ratio = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    };
    let half = 0.5 * peak.ratio;
    let mut lo = ipeak;
    while lo > 0 && points[lo - 1].ratio > half {
        lo -= 1;
    }
    let mut hi = ipeak;
    while hi + 1 < points.len() && points[hi + 1].ratio > half {
        hi += 1;
    }
    let spacing = (e_hi - e_lo) / (samples - 1) as f64;
    Ok(TrappedScan {
        layers,
        l,
        potential,
        fwhm: (hi - lo + 1) as f64 * spacing,
        points,
        skipped,
        peak_energy: peak.energy,
        peak_ratio: peak.ratio,
        median_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::RadialDiffeo;
    use crate::special::radial_pair;

    #[test]
    fn homogeneous_static_spectrum() {
        let s = free_spectrum(WaveModel::Helmholtz, 0.0, DEFAULT_LMAX).unwrap();
        for (l, v) in &s.values {
            assert!((v - *l as f64 / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn homogeneous_spectrum_by_ode() {
        let opts = SolveOptions {
            force_ode: true,
            ..SolveOptions::default()
        };
        let s = dn_spectrum_with(&RadialMediumProfile::homogeneous(), 0.0, DEFAULT_LMAX, opts).unwrap();
        for (l, v) in &s.values {
            assert!((v - *l as f64 / 2.0).abs() < 1e-8, "l={l}: {v}");
        }
    }

    #[test]
    fn monopole_at_positive_frequency() {
        // u = j0(omega r): lambda_0 = omega j0'(2 omega) / j0(2 omega)
        for omega in [0.3, 1.0, 1.4, 2.7] {
            let x: f64 = 2.0 * omega;
            let exact = (x * x.cos() - x.sin()) / (2.0 * x.sin());
            let ode = dn_spectrum_with(
                &RadialMediumProfile::homogeneous(),
                omega,
                0,
                SolveOptions {
                    force_ode: true,
                    ..SolveOptions::default()
                },
            )
            .unwrap();
            let closed = free_spectrum(WaveModel::Helmholtz, omega, 0).unwrap();
            assert!((closed.values[0].1 - exact).abs() < 1e-12);
            assert!((ode.values[0].1 - exact).abs() < 1e-9, "{omega}: {} {exact}", ode.values[0].1);
        }
    }

    #[test]
    fn smooth_pushforward_keeps_the_spectrum() {
        let base = RadialMediumProfile::new(
            "smooth",
            WaveModel::Helmholtz,
            vec![RadialInterval::new(
                0.0,
                OUTER_RADIUS,
                Coef::var(|r| 1.0 + 0.3 * r * r),
                Coef::var(|r| 1.2 - 0.1 * r),
                Coef::var(|r| 1.0 + 0.5 * (r * 0.7).sin()),
            )],
        )
        .unwrap();
        let pushed = base.pushforward(&RadialDiffeo::smooth_bump(0.3).unwrap()).unwrap();
        for omega in [0.0, 1.0] {
            let a = dn_spectrum(&base, omega, DEFAULT_LMAX).unwrap();
            let b = dn_spectrum(&pushed, omega, DEFAULT_LMAX).unwrap();
            for (l, e) in a.errors(&b).iter().enumerate() {
                assert!(*e < 1e-8, "omega={omega} l={l}: {e}");
            }
        }
    }

    #[test]
    fn static_truncated_cloak_is_nearly_invisible() {
        let t = cloak_convergence_sweep(0.0, 4, &[1.5, 1.25, 1.1, 1.05, 1.01, 1.001]).unwrap();
        assert_eq!(t.flagged(), 0);
        let last = t.rows.last().unwrap().errors.as_ref().unwrap();
        assert!(last[1] < 1e-3);
        for row in &t.rows {
            assert_eq!(row.lambdas.as_ref().unwrap()[0], 0.0);
        }
        for l in 0..=4 {
            assert!(t.is_decreasing(l, 1e-14), "l={l}");
        }
    }

    #[test]
    fn sweep_rejects_increasing_radii() {
        assert!(matches!(cloak_convergence_sweep(0.0, 2, &[1.1, 1.2]), Err(Error::Parameter { .. })));
    }

    #[test]
    fn hidden_flux_is_transmitted_and_vanishes_statically_for_constants() {
        let h = hidden_bc_flux(1.3, 1.0, 2).unwrap();
        assert!((h.interior_flux - h.exterior_flux).abs() < 1e-10 * h.interior_flux.abs().max(1.0));
        let h0 = hidden_bc_flux(1.3, 0.0, 0).unwrap();
        assert!(h0.interior_flux.abs() < 1e-14);
        assert!((h0.interior_value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn neumann_roots_of_the_unit_ball() {
        let e = neumann_eigenvalues(0, 1.0, None, 3).unwrap();
        assert!(e[0].abs() < 1e-12, "{e:?}");
        assert!((e[1].sqrt() - 4.493409457909064).abs() < 1e-9, "{e:?}");
        // l = 1: zeros of j1', first at k = 2.0815759778...
        let e1 = neumann_eigenvalues(1, 1.0, None, 1).unwrap();
        let k = e1[0].sqrt();
        assert!(radial_pair(1, k * k, 1.0).df.abs() < 1e-9);
        assert!((k - 2.0815759778181).abs() < 1e-9);
    }

    #[test]
    fn neumann_roots_shift_with_constant_potential_and_scale_with_radius() {
        let w: SourceFn = Arc::new(|_| 3.0);
        let a = neumann_eigenvalues(2, 1.0, None, 2).unwrap();
        let b = neumann_eigenvalues(2, 1.0, Some(w), 2).unwrap();
        let c = neumann_eigenvalues(2, 0.5, None, 2).unwrap();
        for i in 0..2 {
            assert!((b[i] - a[i] - 3.0).abs() < 1e-8);
            assert!((c[i] - 4.0 * a[i]).abs() < 1e-8 * c[i]);
        }
    }

    #[test]
    fn quantum_hypothesis_violation_is_reported() {
        let e = neumann_eigenvalues(0, 1.0, None, 2).unwrap()[1];
        let err = quantum_dn_convergence(e, &[4], &[0.0], 1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        // j0(2k) = 0 at k = pi/2
        let e = std::f64::consts::FRAC_PI_2.powi(2);
        assert!(matches!(quantum_dn_convergence(e, &[4], &[0.0], 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn quantum_static_limit_matches_conductivity_laminate() {
        let q = quantum_dn_convergence(0.0, &[8], &[0.0], 3).unwrap();
        let r = quantum_potential_profile(&QuantumCloakSpec::new(8, 0.0, None)).unwrap();
        let c = dn_spectrum(&layered_isotropic_profile(r.intervals[0].r1, 8).unwrap(), 0.0, 3).unwrap();
        for (x, y) in q.rows[0].lambdas.iter().zip(c.lambdas()) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
