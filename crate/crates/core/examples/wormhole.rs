use stoptics::designs::{wormhole_geometry, Warp};
use stoptics::geometry::{Point3, Vec3};
use stoptics::rays::{wormhole_trace, RayState, TraceOptions};

fn main() -> stoptics::Result<()> {
    let opts = TraceOptions::default();
    for (name, warp) in [("product", Warp::Product), ("collimator", Warp::Collimator { r_min: 0.2 })] {
        let design = wormhole_geometry(4.0, 2.0, warp)?;
        println!("{name} handle");
        for b in [0.0, 0.1, 0.5, 1.5] {
            let start = RayState::new(Point3::new(b, 0.0, -3.0), Vec3::z());
            let w = wormhole_trace(&design, start, &opts, 4)?;
            let end = w.trace.end.position;
            let transits: Vec<String> = w
                .transits
                .iter()
                .map(|t| format!("{:?}->{:?} J={:.3} zeta*={:.3}", t.entered, t.exited, t.clairaut, t.zeta_extreme))
                .collect();
            println!("  b = {b:<4} ends at ({:6.3}, {:6.3}, {:6.3})  {}", end.x, end.y, end.z, transits.join(", "));
        }
    }
    Ok(())
}
