//! Conductivity of the ideal cloak: push-forward of the identity by the
//! blow-up map, compared with the closed form in spherical components.

use stoptics::designs::cloak::{shell_density, shell_radial, SHELL_TANGENTIAL};
use stoptics::geometry::{metric_to_conductivity, volume_density, Point3, SymTensorField};
use stoptics::maps::{blowup_point_map, pushforward_conductivity, pushforward_metric};

fn main() -> stoptics::Result<()> {
    let f = blowup_point_map();
    let id = SymTensorField::euclidean();
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "|x|", "radial", "closed", "tangential", "sqrt|g|");
    for r in [1.05, 1.25, 1.5, 1.75, 1.95] {
        let x = Point3::new(0.6 * r, 0.0, 0.8 * r);
        let sigma = pushforward_conductivity(&f, &id, &x)?;
        let frame = sigma.to_orthonormal_spherical(&x)?;
        let g = pushforward_metric(&f, &id, &x)?;
        assert!(metric_to_conductivity(&g)?.max_abs_diff(&sigma) < 1e-12);
        println!(
            "{r:>6.2} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
            frame[(0, 0)],
            shell_radial(r),
            frame[(1, 1)],
            volume_density(&g)?
        );
        assert!((frame[(1, 1)] - SHELL_TANGENTIAL).abs() < 1e-12);
        assert!((volume_density(&g)? - shell_density(r)).abs() < 1e-12);
    }
    Ok(())
}
