//! Cloak material families: ideal, truncated, layered, quantum and Maxwell.

use serde::Serialize;

use super::profile::{Coef, RadialInterval, RadialMediumProfile, WaveModel, OUTER_RADIUS};
use crate::error::{Error, Result};
use crate::geometry::{Point3, SingularSet, SymTensor3, SymTensorField};
use crate::maps::{blowup_point_map, pushforward_conductivity};

/// Radial eigenvalue of the cloak shell, `2 (r-1)^2 / r^2`.
pub fn shell_radial(r: f64) -> f64 {
    2.0 * (r - 1.0).powi(2) / (r * r)
}

/// Tangential eigenvalue of the cloak shell.
pub const SHELL_TANGENTIAL: f64 = 2.0;

/// Bulk density of the cloak shell, `8 (r-1)^2 / r^2`.
pub fn shell_density(r: f64) -> f64 {
    8.0 * (r - 1.0).powi(2) / (r * r)
}

/// Isotropic value used inside the cloaked region.
pub const INTERIOR_CONDUCTIVITY: f64 = 2.0;
/// Bulk density inside the cloaked region (`g^{1/2} = 8`, i.e. `g = 64`).
pub const INTERIOR_DENSITY: f64 = 8.0;

fn shell_interval(r0: f64) -> RadialInterval {
    RadialInterval::new(
        r0,
        OUTER_RADIUS,
        Coef::var(shell_radial),
        SHELL_TANGENTIAL.into(),
        Coef::var(shell_density),
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

/// Push-forward of the homogeneous ball by the blow-up of the origin, with the
/// isotropic value 2 (density 8) in the cloaked ball.
pub fn ideal_cloak_profile() -> RadialMediumProfile {
    let mut shell = shell_interval(1.0);
    shell.degenerate_inner = true;
    RadialMediumProfile {
        label: "ideal cloak".into(),
        model: WaveModel::Helmholtz,
        intervals: vec![
            RadialInterval::uniform(0.0, 1.0, INTERIOR_CONDUCTIVITY, INTERIOR_CONDUCTIVITY, INTERIOR_DENSITY),
            shell,
        ],
    }
}

/// Ideal profile on `(R, 2)`, isotropic 2 with density 8 on `(0, R)`.
pub fn truncated_cloak_profile(r_trunc: f64) -> Result<RadialMediumProfile> {
    check_truncation(r_trunc)?;
    Ok(RadialMediumProfile {
        label: format!("truncated cloak R={r_trunc}"),
        model: WaveModel::Helmholtz,
        intervals: vec![
            RadialInterval::uniform(0.0, r_trunc, INTERIOR_CONDUCTIVITY, INTERIOR_CONDUCTIVITY, INTERIOR_DENSITY),
            shell_interval(r_trunc),
        ],
    })
}

/// Two isotropic phases `(high, low)` of an equal-thickness laminate whose
/// harmonic mean is `radial` and arithmetic mean is `tangential`.
pub fn laminate_phases(radial: f64, tangential: f64) -> Result<(f64, f64)> {
    if !(radial > 0.0 && tangential > 0.0) || radial > tangential * (1.0 + 1e-12) {
        return Err(Error::Consistency(format!(
            "no two-phase laminate with harmonic mean {radial} and arithmetic mean {tangential}"
        )));
    }
    let disc = (tangential * tangential - radial * tangential).max(0.0).sqrt();
    Ok((tangential + disc, tangential - disc))
}

/// Laminate of `2n` equal shells on `(R, 2)`, high phase first in each pair,
/// locally matched to the truncated cloak at each pair midpoint.
pub fn layered_isotropic_profile(r_trunc: f64, layers: usize) -> Result<RadialMediumProfile> {
    check_truncation(r_trunc)?;
    if layers == 0 {
        return Err(Error::Parameter {
            name: "n",
            value: 0.0,
            constraint: "n >= 1",
        });
    }
    let h = (OUTER_RADIUS - r_trunc) / (2 * layers) as f64;
    let mut intervals = vec![RadialInterval::uniform(
        0.0,
        r_trunc,
        INTERIOR_CONDUCTIVITY,
        INTERIOR_CONDUCTIVITY,
        INTERIOR_DENSITY,
    )];
    for k in 0..layers {
        let start = r_trunc + 2.0 * k as f64 * h;
        let mid = start + h;
        let end = if k + 1 == layers { OUTER_RADIUS } else { start + 2.0 * h };
        let (hi, lo) = laminate_phases(shell_radial(mid), SHELL_TANGENTIAL)?;
        intervals.push(RadialInterval::new(start, mid, hi.into(), hi.into(), Coef::var(shell_density)));
        intervals.push(RadialInterval::new(mid, end, lo.into(), lo.into(), Coef::var(shell_density)));
    }
    RadialMediumProfile::new(format!("layered cloak R={r_trunc} n={layers}"), WaveModel::Helmholtz, intervals)
}

/// Truncation radius schedule of the quantum cloak, `R(n) = 1 + 2/n^2` (capped at 1.5).
pub fn quantum_truncation(n: usize) -> f64 {
    (1.0 + 2.0 / (n * n) as f64).min(1.5)
}

/// Parameters of the approximate quantum cloak.
#[derive(Clone, Debug, Serialize)]
pub struct QuantumCloakSpec {
    pub layers: usize,
    pub r_trunc: f64,
    pub energy: f64,
    /// Constant potential `W` on `B(0,1)`.
    pub interior_potential: Option<f64>,
}

impl QuantumCloakSpec {
    pub fn new(layers: usize, energy: f64, interior_potential: Option<f64>) -> Self {
        Self {
            layers,
            r_trunc: quantum_truncation(layers),
            energy,
            interior_potential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Parameter {
                name: "n",
                value: 0.0,
                constraint: "n >= 1",
            });
        }
        check_truncation(self.r_trunc)?;
        if !self.energy.is_finite() {
            return Err(Error::Parameter {
                name: "E",
                value: self.energy,
                constraint: "finite energy",
            });
        }
        Ok(())
    }
}

/// Shell-interior value of the quantum potential for piecewise constant `gamma`:
/// `V = E (1 - w/gamma)` (the `gamma^{-1/2} Laplace gamma^{1/2}` term vanishes there).
pub fn quantum_potential_value(gamma: f64, w: f64, energy: f64) -> f64 {
    energy * (1.0 - w / gamma)
}

/// Schrödinger profile for `-Laplace + W + V_n^E` written in the conductivity
/// variable `u = gamma^{-1/2} psi`.
///
/// The shells carry `a = b = gamma` (laminate phases) and `V = E (1 - w/gamma)`.
/// The solver propagates `u` and `r^2 gamma u'`, which are continuous across
/// interfaces; the distributional part of `V` is exactly the jump of `psi`
/// implied by this substitution. Inside `B(0,R)` the value `gamma = 2` is used
/// with `g^{1/2} = gamma`, so `V = W` there.
pub fn quantum_potential_profile(spec: &QuantumCloakSpec) -> Result<RadialMediumProfile> {
    spec.validate()?;
    let layered = layered_isotropic_profile(spec.r_trunc, spec.layers)?;
    let e = spec.energy;
    let g = INTERIOR_CONDUCTIVITY;
    let mut intervals = Vec::new();
    match spec.interior_potential {
        Some(wv) => {
            intervals.push(RadialInterval::uniform(0.0, 1.0, g, g, g).with_potential(wv.into()));
            intervals.push(RadialInterval::uniform(1.0, spec.r_trunc, g, g, g));
        }
        None => intervals.push(RadialInterval::uniform(0.0, spec.r_trunc, g, g, g)),
    }
    for iv in layered.intervals.into_iter().skip(1) {
        let gamma = iv.a.constant().expect("laminate phases are constant");
        let v = Coef::var(move |r| quantum_potential_value(gamma, shell_density(r), e));
        intervals.push(RadialInterval { v, ..iv });
    }
    RadialMediumProfile::new(
        format!(
            "quantum cloak n={} R={} E={} W={:?}",
            spec.layers, spec.r_trunc, e, spec.interior_potential
        ),
        WaveModel::Schrodinger,
        intervals,
    )
}

/// Permittivity and permeability `(eps, mu)` of the spherical cloak.
/// Both equal the cloak conductivity on `1 < |x| < 2` and the identity elsewhere.
pub fn maxwell_cloak_tensors(x: &Point3) -> Result<(SymTensor3, SymTensor3)> {
    SingularSet::unit_sphere().check(x)?;
    let r = x.coords.norm();
    if r < 1.0 || r >= OUTER_RADIUS {
        return Ok((SymTensor3::identity(), SymTensor3::identity()));
    }
    let t = pushforward_conductivity(&blowup_point_map(), &SymTensorField::euclidean(), x)?;
    Ok((t, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::profile::Side;
    use crate::geometry::{metric_to_conductivity, volume_density};
    use crate::maps::pushforward_metric;
    use nalgebra::Vector3;
    use proptest::prelude::*;

    #[test]
    fn ideal_values() {
        let p = ideal_cloak_profile();
        p.validate().unwrap();
        // orthonormal frame radial eigenvalue and the flux coefficient r^2 a
        assert!((p.a(1.5) - 2.0 / 9.0).abs() < 1e-15);
        assert!((p.radial_flux_coefficient(1.5, Side::Plus) - 0.5).abs() < 1e-15);
        assert_eq!(p.b(1.5), 2.0);
        assert!((p.w(1.5).powi(2) - 0.790_123_456_790_123_4).abs() < 1e-14);
        assert_eq!(shell_radial(1.0), 0.0);
        assert_eq!(p.a(0.5), 2.0);
        assert_eq!(p.w(0.5), 8.0);
        assert_eq!(p.coupled_start(), 1);
    }

    #[test]
    fn shell_matches_the_pushed_forward_metric() {
        // determinant bookkeeping: geometry -> maps -> designs
        for &r in &[1.01, 1.3, 1.5, 1.77, 1.999] {
            let y = Point3::new(r * 0.6, r * 0.0, r * 0.8);
            let g = pushforward_metric(&blowup_point_map(), &SymTensorField::euclidean(), &y).unwrap();
            let sigma = metric_to_conductivity(&g).unwrap();
            let n = Vector3::new(0.6, 0.0, 0.8);
            assert!((sigma.quadratic(&n) - shell_radial(r)).abs() < 1e-12);
            let t = Vector3::new(0.0, 1.0, 0.0);
            assert!((sigma.quadratic(&t) - SHELL_TANGENTIAL).abs() < 1e-12);
            let w = volume_density(&g).unwrap();
            assert!((w - shell_density(r)).abs() < 1e-12);
            assert!((w * w - 64.0 * (r - 1.0).powi(4) / r.powi(4)).abs() < 1e-12);
        }
    }

    #[test]
    fn truncated_values() {
        let p = truncated_cloak_profile(1.5).unwrap();
        assert!((p.radial_flux_coefficient(1.5, Side::Plus) - 0.5).abs() < 1e-15);
        assert_eq!(p.coefficients(1.5, Side::Minus).unwrap().a, 2.0);
        assert!((p.coefficients(1.5, Side::Plus).unwrap().a - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(p.w(1.2).powi(2), 64.0);
        assert!(matches!(truncated_cloak_profile(2.5), Err(Error::Parameter { name: "R", .. })));
        assert!(truncated_cloak_profile(1.0).is_err());
        let ideal = ideal_cloak_profile();
        for &r in &[1.2, 1.5, 1.9, 2.0] {
            let t = truncated_cloak_profile(1.1).unwrap();
            assert_eq!(t.coefficients(r, Side::Plus).unwrap(), ideal.coefficients(r, Side::Plus).unwrap());
        }
        // pointwise limit as R -> 1 at fixed r != 1
        let t = truncated_cloak_profile(1.0 + 1e-9).unwrap();
        assert_eq!(t.a(0.7), ideal.a(0.7));
        assert_eq!(t.a(1.3), ideal.a(1.3));
    }

    #[test]
    fn laminate_phase_examples() {
        let (x, y) = laminate_phases(0.5, 2.0).unwrap();
        assert!((x - (2.0 + 3f64.sqrt())).abs() < 1e-15);
        assert!((y - (2.0 - 3f64.sqrt())).abs() < 1e-15);
        assert!((2.0 * x * y / (x + y) - 0.5).abs() < 1e-14);
        assert_eq!(laminate_phases(1.3, 1.3).unwrap(), (1.3, 1.3));
        assert!(matches!(laminate_phases(3.0, 2.0), Err(Error::Consistency(_))));
    }

    #[test]
    fn layered_structure() {
        let p = layered_isotropic_profile(1.2, 4).unwrap();
        assert_eq!(p.intervals.len(), 9);
        let widths: Vec<f64> = p.intervals[1..].iter().map(|iv| iv.r1 - iv.r0).collect();
        for w in &widths {
            assert!((w - 0.1).abs() < 1e-14);
        }
        for pair in p.intervals[1..].chunks(2) {
            let (hi, lo) = (pair[0].a.constant().unwrap(), pair[1].a.constant().unwrap());
            assert!(hi > lo);
            let mid = pair[0].r1;
            assert!((2.0 * hi * lo / (hi + lo) - shell_radial(mid)).abs() < 1e-12);
            assert!(((hi + lo) / 2.0 - 2.0).abs() < 1e-12);
            assert!((pair[0].w.at(mid) - shell_density(mid)).abs() < 1e-15);
        }
        assert!(layered_isotropic_profile(1.2, 0).is_err());
    }

    #[test]
    fn quantum_potential_examples() {
        assert_eq!(quantum_potential_value(1.0, 1.0, 3.7), 0.0);
        assert_eq!(quantum_potential_value(2.0, 0.5, 4.0), 4.0 * (1.0 - 0.25));
        assert_eq!(quantum_potential_value(0.3, 0.9, 0.0), 0.0);
        let p = quantum_potential_profile(&QuantumCloakSpec::new(8, 1.0, Some(10.0))).unwrap();
        assert_eq!(p.model, WaveModel::Schrodinger);
        assert_eq!(p.coefficients(0.5, Side::Plus).unwrap().v, 10.0);
        assert_eq!(p.coefficients(1.01, Side::Plus).unwrap().v, 0.0);
        let shell = p.coefficients(1.5, Side::Plus).unwrap();
        assert!((shell.v - (1.0 - shell_density(1.5) / shell.a)).abs() < 1e-15);
        let spec = QuantumCloakSpec::new(0, 1.0, None);
        assert!(spec.validate().is_err());
        assert_eq!(quantum_truncation(1), 1.5);
        assert_eq!(quantum_truncation(4), 1.125);
    }

    #[test]
    fn maxwell_pair() {
        let (e, m) = maxwell_cloak_tensors(&Point3::new(1.5, 0.0, 0.0)).unwrap();
        assert_eq!(e, m);
        let d = e.to_spherical_density(&Point3::new(1.5, 0.0, 0.0)).unwrap();
        assert!((d[(0, 0)] - 0.5).abs() < 1e-14 && (d[(1, 1)] - 2.0).abs() < 1e-14 && (d[(2, 2)] - 2.0).abs() < 1e-14);
        assert_eq!(maxwell_cloak_tensors(&Point3::new(0.2, 0.3, 0.1)).unwrap().0, SymTensor3::identity());
        assert_eq!(maxwell_cloak_tensors(&Point3::new(0.0, 3.0, 0.0)).unwrap().1, SymTensor3::identity());
        assert!(matches!(maxwell_cloak_tensors(&Point3::new(0.0, 1.0, 0.0)), Err(Error::SingularSet { .. })));
    }

    proptest! {
        #[test]
        fn laminate_means_hold(a in 0.001f64..5.0, extra in 0.0f64..5.0) {
            let b = a + extra;
            let (x, y) = laminate_phases(a, b).unwrap();
            prop_assert!((2.0 * x * y / (x + y) - a).abs() < 1e-12 * b.max(1.0));
            prop_assert!(((x + y) / 2.0 - b).abs() < 1e-12 * b.max(1.0));
        }

        #[test]
        fn shell_density_closed_form(r in 1.0f64..2.0) {
            let w = shell_density(r);
            prop_assert!((w * w - 64.0 * (r - 1.0).powi(4) / r.powi(4)).abs() < 1e-12);
        }
    }
}
