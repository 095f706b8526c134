use std::sync::Arc;

use stoptics::designs::{
    default_wormhole, ideal_cloak_profile, maxwell_cloak_tensors, truncated_cloak_profile, Side,
};
use stoptics::geometry::{Point3, SymTensor3, SymTensorField};
use stoptics::maps::{blowup_point_map, pushforward_conductivity, truncation_map};
use stoptics::radial::{radial_solve, trapped_ratio, SolveOptions, SourceFn};

fn assert_diag(m: &nalgebra::Matrix3<f64>, d: [f64; 3], tol: f64) {
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { d[i] } else { 0.0 };
            assert!((m[(i, j)] - want).abs() < tol, "({i},{j}) = {} vs {want}", m[(i, j)]);
        }
    }
}

#[test]
fn cloak_conductivity_density_at_r_one_and_a_half() {
    let x = Point3::new(1.5, 0.0, 0.0);
    let sigma = pushforward_conductivity(&blowup_point_map(), &SymTensorField::euclidean(), &x).unwrap();
    assert_diag(&sigma.to_spherical_density(&x).unwrap(), [0.5, 2.0, 2.0], 1e-12);
}

#[test]
fn maps_send_unit_point_to_one_and_a_half() {
    let p = Point3::new(1.0, 0.0, 0.0);
    assert!((blowup_point_map().forward(&p).unwrap() - Point3::new(1.5, 0.0, 0.0)).norm() < 1e-15);
    assert!((truncation_map(1.5).unwrap().forward(&p).unwrap() - Point3::new(1.5, 0.0, 0.0)).norm() < 1e-15);
}

#[test]
fn bulk_modulus_closed_forms() {
    let ideal = ideal_cloak_profile();
    let g = ideal.w(1.5).powi(2);
    assert!((g - 64.0 * 1.5f64.powi(-4) * 0.5f64.powi(4)).abs() < 1e-14);
    assert!((g - 0.79012).abs() < 1e-5);
    let truncated = truncated_cloak_profile(1.5).unwrap();
    for r in [0.1, 0.7, 1.2, 1.49] {
        assert_eq!(truncated.w(r).powi(2), 64.0);
    }
    let c = truncated.coefficients(1.5, Side::Plus).unwrap();
    assert!((1.5 * 1.5 * c.a - 0.5).abs() < 1e-14);
    assert_eq!(c.b, 2.0);
}

#[test]
fn maxwell_tensors_equal_the_conductivity() {
    let x = Point3::new(0.0, 1.5, 0.0);
    let (eps, mu) = maxwell_cloak_tensors(&x).unwrap();
    assert_eq!(eps, mu);
    let frame = eps.to_orthonormal_spherical(&x).unwrap();
    assert_diag(&(frame * 1.5 * 1.5), [0.5, 4.5, 4.5], 1e-12);
    assert_diag(&eps.to_spherical_density(&x).unwrap(), [0.5, 2.0, 2.0], 1e-12);
    let (eps_in, mu_in) = maxwell_cloak_tensors(&Point3::new(0.2, -0.3, 0.1)).unwrap();
    assert_eq!(eps_in, SymTensor3::identity());
    assert_eq!(mu_in, SymTensor3::identity());
}

#[test]
fn default_wormhole_geometry() {
    let w = default_wormhole();
    assert_eq!(w.separation, 4.0);
    assert_eq!(w.centre_p(), Point3::new(0.0, 0.0, 4.0));
    assert_eq!(w.warp.eval(0.37), (1.0, 0.0));
}

#[test]
fn truncated_interior_with_source_has_factor_four() {
    let omega = 1.0;
    let p: SourceFn = Arc::new(|r| 1.0 + 0.5 * r * r);
    let sol = radial_solve(&truncated_cloak_profile(1.5).unwrap(), 0, omega, Some(p.clone()), 1.0, SolveOptions::default()).unwrap();
    let h = 1e-3;
    let du = |r: f64| sol.eval(r, Side::Minus).unwrap().1;
    for r in [0.2, 0.5, 0.9, 1.3] {
        let (u, d1) = sol.eval(r, Side::Minus).unwrap();
        let d2 = (-du(r + 2.0 * h) + 8.0 * du(r + h) - 8.0 * du(r - h) + du(r - 2.0 * h)) / (12.0 * h);
        let res = d2 + 2.0 * d1 / r + 4.0 * omega * omega * u - 4.0 * p(r);
        assert!(res.abs() < 1e-8, "r = {r}: {res:e}");
    }
}

#[test]
fn waves_pass_when_far_from_interior_eigenvalues() {
    for e in [16.0, 17.5, 23.0] {
        let ratio = trapped_ratio(16, e, 0, 0.0).unwrap();
        assert!(ratio < 1e-2, "E = {e}: {ratio}");
    }
    assert!(trapped_ratio(16, 19.925, 0, 0.0).unwrap() > 1.0);
}
