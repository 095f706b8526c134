//! Blow-up and truncated blow-up maps, and the Jacobian bounds near the
//! blown-up point.

use stoptics::geometry::Point3;
use stoptics::maps::{blowup_point_map, truncation_map, validate_singular_map, SingularMapThresholds, StoDesign};

fn main() -> stoptics::Result<()> {
    let f = blowup_point_map();
    for r in [0.01, 0.5, 1.0, 2.0, 2.5] {
        let x = Point3::new(r, 0.0, 0.0);
        let y = f.forward(&x)?;
        println!("F({r:>4}) = {:.6}   back {:.6}", y.x, f.inverse(&y)?.x);
    }

    let report = validate_singular_map(&f, &Point3::origin(), 220, SingularMapThresholds::default());
    println!(
        "\nsingular-map check: c0 = {:.3e}, c1 = {:.3e}, closest {:.1e}, passed {}",
        report.c0, report.c1, report.closest_distance, report.passed
    );

    for r_trunc in [1.5, 1.1, 1.01] {
        let fr = truncation_map(r_trunc)?;
        let y = fr.forward(&Point3::new(0.0, 0.0, 2.0 * (r_trunc - 1.0)))?;
        println!("R = {r_trunc}: inner sphere |y| = 2(R-1) is sent to |x| = {:.12}", y.z);
    }

    let design = StoDesign::single_coating_cloak();
    design.validate()?;
    println!("\nsingle-coating design: {} pieces, {} device regions", design.pieces.len(), design.regions.len());
    Ok(())
}
